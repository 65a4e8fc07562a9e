use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use infoshot_core::evaluator::{aggregate, evaluate_video};
use infoshot_core::{medoid_sample, uniform_sample, BudgetSpec, EvalReport, InfoShot, VideoRun};
use rayon::prelude::*;
use serde::Serialize;

use crate::manifest::{Manifest, Video};
use crate::{usage, BudgetArgs, SamplerArgs};

#[derive(Args)]
pub struct EvalArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Comma-separated list of infoshot, uniform, medoid.
    #[arg(long, default_value = "infoshot,uniform")]
    methods: String,
    /// JSON report path. One CSV per method is written next to it.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Worker threads. Row order does not depend on this.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Base seed for the medoid baseline.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    sampler: SamplerArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Method {
    Infoshot,
    Uniform,
    Medoid,
}

impl Method {
    fn parse(name: &str) -> Result<Self> {
        match name {
            "infoshot" => Ok(Self::Infoshot),
            "uniform" => Ok(Self::Uniform),
            "medoid" => Ok(Self::Medoid),
            "topk" => Err(usage("topk needs per-video score tracks; use `sample --method topk`")),
            other => Err(usage(format!("unknown method {other:?}"))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Self::Infoshot => "infoshot",
            Self::Uniform => "uniform",
            Self::Medoid => "medoid",
        }
    }
}

#[derive(Serialize)]
struct MethodReport {
    method: &'static str,
    #[serde(flatten)]
    report: EvalReport,
}

#[derive(Serialize)]
struct Report {
    budget: BudgetSpecJson,
    methods: Vec<MethodReport>,
}

#[derive(Serialize)]
#[serde(rename_all = "lowercase")]
enum BudgetSpecJson {
    Rate(f64),
    Count(usize),
}

fn pick(method: Method, sampler: &InfoShot, video: &Video, k: usize, seed: u64) -> Result<Vec<usize>> {
    let t = video.features.frame_count();
    Ok(match method {
        Method::Infoshot => sampler.run_with_k(&video.features, k)?.keyframes.indices(),
        Method::Uniform => uniform_sample(t, k)?,
        Method::Medoid => medoid_sample(&video.features, k, seed)?,
    })
}

fn run_method(method: Method, sampler: &InfoShot, videos: &[Video], budget: BudgetSpec, seed: u64) -> Result<EvalReport> {
    let rows = videos
        .par_iter()
        .enumerate()
        .map(|(i, v)| {
            let k = budget.resolve(v.features.frame_count(), v.features.fps())?;
            let samples = pick(method, sampler, v, k, seed.wrapping_add(i as u64))
                .with_context(|| format!("{} on {}", method.name(), v.id))?;
            let run = VideoRun { id: &v.id, features: &v.features, truth: &v.truth, samples: &samples, budget_k: k };
            Ok(evaluate_video(&run)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(rows)?)
}

fn fmt_rate(r: Option<f64>) -> String {
    r.map_or_else(|| "-".to_string(), |v| format!("{v:.3}"))
}

pub fn cmd_eval(a: &EvalArgs) -> Result<()> {
    let budget = a.budget.spec()?;
    let sampler = a.sampler.sampler()?;
    let methods = a
        .methods
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(Method::parse)
        .collect::<Result<Vec<_>>>()?;
    if methods.is_empty() {
        return Err(usage("--methods is empty"));
    }
    if a.jobs == 0 {
        return Err(usage("--jobs must be at least 1"));
    }

    let manifest = Manifest::read(&a.manifest)?;
    let videos = manifest.load_videos(&a.manifest)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(a.jobs).build()?;

    let mut reports = Vec::with_capacity(methods.len());
    for &m in &methods {
        log::info!("running {} on {} videos", m.name(), videos.len());
        let report = pool.install(|| run_method(m, &sampler, &videos, budget, a.seed))?;
        reports.push(MethodReport { method: m.name(), report });
    }

    println!("{:<10} {:>7} {:>7} {:>7} {:>9}", "method", "R", "ER", "CR", "Dist");
    for r in &reports {
        println!(
            "{:<10} {:>7} {:>7} {:>7} {:>9.5}",
            r.method,
            fmt_rate(r.report.frame_recall),
            fmt_rate(r.report.event_recall),
            fmt_rate(r.report.complete_coverage),
            r.report.distortion
        );
    }

    if let Some(path) = &a.report {
        let report = Report {
            budget: match budget {
                BudgetSpec::Rate(r) => BudgetSpecJson::Rate(r),
                BudgetSpec::Count(c) => BudgetSpecJson::Count(c),
            },
            methods: reports,
        };
        std::fs::write(path, serde_json::to_string_pretty(&report)?)
            .with_context(|| format!("writing {}", path.display()))?;
        for r in &report.methods {
            let csv_path = csv_path(path, r.method);
            let file = std::fs::File::create(&csv_path).with_context(|| format!("writing {}", csv_path.display()))?;
            r.report.write_csv(std::io::BufWriter::new(file))?;
        }
    }
    Ok(())
}

fn csv_path(report: &Path, method: &str) -> PathBuf {
    let stem = report.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
    report.with_file_name(format!("{stem}.{method}.csv"))
}
