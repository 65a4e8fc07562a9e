use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use infoshot_core::baselines::ScoreTrack;
use infoshot_core::feature_store::save_features_csv;
use infoshot_core::{
    load_features, medoid_sample, save_features, topk_by_score, uniform_sample, AnomalyMode, BenchmarkConfig,
    BudgetSpec, InfoShot, KeyframeSet, KeyframerConfig, SegmenterConfig,
};

mod eval;
mod manifest;

/// An argument problem. Maps to exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Parser)]
#[command(name = "infoshot", version, about = "Budgeted keyframe sampling over frame features")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample keyframes from one feature file.
    Sample(SampleArgs),
    /// Write a synthetic benchmark suite with ground truth.
    Synth(SynthArgs),
    /// Run samplers over a suite and report recall and distortion.
    Eval(eval::EvalArgs),
    /// Convert a feature file between ISF and CSV.
    Convert(ConvertArgs),
}

#[derive(Args, Debug, Clone, Copy)]
#[group(required = true, multiple = false)]
pub struct BudgetArgs {
    /// Budget as sampled frames per second of video.
    #[arg(long)]
    rate: Option<f64>,
    /// Budget as an absolute frame count.
    #[arg(long)]
    count: Option<usize>,
}

impl BudgetArgs {
    pub fn spec(&self) -> Result<BudgetSpec> {
        let spec = match (self.rate, self.count) {
            (Some(r), _) => BudgetSpec::Rate(r),
            (_, Some(c)) => BudgetSpec::Count(c),
            _ => return Err(usage("one of --rate or --count is required")),
        };
        spec.validate().map_err(|e| usage(e.to_string()))?;
        Ok(spec)
    }
}

#[derive(Args, Debug, Clone)]
pub struct SamplerArgs {
    #[arg(long, default_value_t = 0.7)]
    lambda: f64,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Half-width of the volatility neighbourhood.
    #[arg(long, default_value_t = 1)]
    neighborhood: usize,
    #[arg(long, default_value_t = 3)]
    window_min: usize,
    #[arg(long, default_value_t = 15)]
    window_max: usize,
    #[arg(long, default_value_t = 3)]
    shot_min: usize,
    #[arg(long, default_value_t = 300)]
    shot_max: usize,
    #[arg(long, default_value_t = 600)]
    block_size: usize,
}

impl SamplerArgs {
    pub fn sampler(&self) -> Result<InfoShot> {
        let s = InfoShot {
            segmenter: SegmenterConfig {
                window_min: self.window_min,
                window_max: self.window_max,
                min_shot_len: self.shot_min,
                max_shot_len: self.shot_max,
            },
            keyframer: KeyframerConfig {
                lambda: self.lambda,
                alpha: self.alpha,
                neighborhood_k: self.neighborhood,
            },
            block_size: self.block_size,
        };
        s.segmenter.validate().map_err(|e| usage(e.to_string()))?;
        s.keyframer.validate().map_err(|e| usage(e.to_string()))?;
        if s.block_size == 0 {
            return Err(usage("block size must be positive"));
        }
        Ok(s)
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SampleMethod {
    Infoshot,
    Uniform,
    Topk,
    Medoid,
}

#[derive(Args)]
struct SampleArgs {
    /// Feature file (.isf, or .csv with --fps).
    #[arg(long)]
    features: PathBuf,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Frame rate of a CSV feature file.
    #[arg(long)]
    fps: Option<f64>,
    #[command(flatten)]
    sampler: SamplerArgs,
    #[arg(long, value_enum, default_value = "infoshot")]
    method: SampleMethod,
    /// Per-frame scores for `--method topk` (CSV or single-column ISF).
    #[arg(long)]
    scores: Option<PathBuf>,
    /// Seed for `--method medoid`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Keyframe JSON output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Shot partition JSON output (infoshot only).
    #[arg(long)]
    partition_out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    HeavyTail,
    HighVariance,
    /// Heavy-tail on even ids, high-variance on odd ids.
    Alternate,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    frames: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    shots: Option<usize>,
    #[arg(long)]
    anomaly_scale: Option<f64>,
    #[arg(long, value_enum, default_value = "alternate")]
    mode: ModeArg,
}

#[derive(Args)]
struct ConvertArgs {
    #[arg(long)]
    input: PathBuf,
    /// Output path; a .csv/.txt extension writes CSV, anything else ISF.
    #[arg(long)]
    output: PathBuf,
    /// Frame rate of a CSV input.
    #[arg(long)]
    fps: Option<f64>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("INFOSHOT_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Sample(a) => cmd_sample(&a),
        Command::Synth(a) => cmd_synth(&a),
        Command::Eval(a) => eval::cmd_eval(&a),
        Command::Convert(a) => cmd_convert(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn cmd_sample(a: &SampleArgs) -> Result<()> {
    let budget = a.budget.spec()?;
    let sampler = a.sampler.sampler()?;
    if a.method == SampleMethod::Topk && a.scores.is_none() {
        return Err(usage("--method topk requires --scores"));
    }
    if a.partition_out.is_some() && a.method != SampleMethod::Infoshot {
        return Err(usage("--partition-out is only available for --method infoshot"));
    }
    let seq = load_features(&a.features, a.fps).with_context(|| format!("loading {}", a.features.display()))?;
    let k = budget.resolve(seq.frame_count(), seq.fps())?;
    let t = seq.frame_count();

    let (set, shots) = match a.method {
        SampleMethod::Infoshot => {
            let out = sampler.run_with_k(&seq, k)?;
            if let Some(p) = &a.partition_out {
                write_text(p, &out.partition.to_json()?)?;
            }
            let shots = out.partition.realized_shots();
            (out.keyframes, Some(shots))
        }
        SampleMethod::Uniform => (KeyframeSet::from_indices(&uniform_sample(t, k)?, k), None),
        SampleMethod::Medoid => (KeyframeSet::from_indices(&medoid_sample(&seq, k, a.seed)?, k), None),
        SampleMethod::Topk => {
            let path = a.scores.as_ref().expect("checked above");
            let track = ScoreTrack::load(path).with_context(|| format!("loading {}", path.display()))?;
            (KeyframeSet::from_indices(&topk_by_score(&track, k, t)?, k), None)
        }
    };

    if let Some(out) = &a.out {
        write_text(out, &set.to_json()?)?;
    }
    let m = shots.map_or_else(|| "-".to_string(), |s| s.to_string());
    println!("T={t} K={k} M'={m} |K|={}", set.len());
    Ok(())
}

fn cmd_synth(a: &SynthArgs) -> Result<()> {
    let mut cfg = BenchmarkConfig::default();
    if let Some(v) = a.count {
        cfg.count = v;
    }
    if let Some(v) = a.frames {
        cfg.frames = v;
    }
    if let Some(v) = a.dim {
        cfg.dim = v;
    }
    if let Some(v) = a.shots {
        cfg.shots = v;
    }
    if let Some(v) = a.anomaly_scale {
        cfg.anomaly_scale = v;
    }
    cfg.anomaly_mode = match a.mode {
        ModeArg::HeavyTail => Some(AnomalyMode::HeavyTail),
        ModeArg::HighVariance => Some(AnomalyMode::HighVariance),
        ModeArg::Alternate => None,
    };
    if cfg.count == 0 || cfg.dim == 0 || cfg.shots == 0 || cfg.frames < cfg.shots {
        return Err(usage("--count, --dim and --shots must be positive and --frames at least --shots"));
    }

    std::fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    let mut entries = Vec::with_capacity(cfg.count);
    for i in 0..cfg.count {
        let v = cfg.video(a.seed, i)?;
        let features = format!("{}.isf", v.id);
        let truth = format!("{}.truth.json", v.id);
        save_features(&v.features, &a.out_dir.join(&features))
            .with_context(|| format!("writing {features}"))?;
        write_text(&a.out_dir.join(&truth), &v.truth.to_json()?)?;
        log::debug!("wrote {}", v.id);
        entries.push(manifest::Entry { id: v.id, features, truth });
    }
    let m = manifest::Manifest { seed: a.seed, config: cfg, videos: entries };
    let path = a.out_dir.join("manifest.json");
    write_text(&path, &serde_json::to_string_pretty(&m)?)?;
    println!("wrote {} sequences to {}", m.videos.len(), a.out_dir.display());
    Ok(())
}

fn cmd_convert(a: &ConvertArgs) -> Result<()> {
    let seq = load_features(&a.input, a.fps).with_context(|| format!("loading {}", a.input.display()))?;
    let to_csv = a
        .output
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv") || e.eq_ignore_ascii_case("txt"));
    if to_csv {
        save_features_csv(&seq, &a.output)?;
    } else {
        save_features(&seq, &a.output)?;
    }
    println!("T={} n={} fps={}", seq.frame_count(), seq.dim(), seq.fps());
    Ok(())
}
