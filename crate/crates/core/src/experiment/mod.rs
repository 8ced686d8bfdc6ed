//! Reproducible experiment sweeps.
//!
//! An [`ExperimentConfig`] selects an experiment, a point-set generator and
//! a list of `(d, N)` pairs. Each pair becomes a job; jobs run in parallel
//! and their rows are assembled in configuration order, so a report is a
//! deterministic function of its configuration.

mod config;
mod report;
mod runners;

use std::time::Instant;

use rayon::prelude::*;

use crate::combinatorics::exact_log;
use crate::error::{config as config_error, Result};
use crate::pointset::{generate_faure_net, generate_hammersley, generate_random, io::read_any};
use crate::PointSet;

pub use config::{
    parse_config_text, parse_n_list, ExperimentConfig, ExperimentKind, Format, GeneratorKind, KEYS,
};
pub use report::{Check, ExperimentReport, Row};

/// One point set of a sweep.
#[derive(Clone, Debug)]
pub struct Job {
    pub points: PointSet,
    /// Base of the net when the points come from a net generator.
    pub base: Option<u64>,
}

impl Job {
    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn label(&self) -> String {
        format!("d={} N={}", self.dim(), self.len())
    }
}

/// Point set for dimension `d` and size `n` under the configured generator.
pub fn build_point_set(cfg: &ExperimentConfig, d: usize, n: u64) -> Result<Job> {
    let size = usize::try_from(n).map_err(|_| config_error(format!("N = {n} is too large")))?;
    match cfg.generator {
        GeneratorKind::Random => Ok(Job {
            points: generate_random(d, size, cfg.seed)?,
            base: None,
        }),
        GeneratorKind::Hammersley => Ok(Job {
            points: generate_hammersley(d, size)?,
            base: (d <= 2 && n.is_power_of_two()).then_some(2),
        }),
        GeneratorKind::Faure => {
            let base = cfg.base_for(d);
            let s = exact_log(n, base).ok_or_else(|| {
                config_error(format!("N = {n} is not a power of the Faure base {base}"))
            })?;
            Ok(Job {
                points: generate_faure_net(base, s, d)?,
                base: Some(base),
            })
        }
    }
}

/// The jobs of a configuration: the point-set file if one is given,
/// otherwise every `(d, N)` in order.
pub fn jobs(cfg: &ExperimentConfig) -> Result<Vec<Job>> {
    if let Some(path) = &cfg.points {
        let points = read_any(std::path::Path::new(path))?;
        return Ok(vec![Job {
            points,
            base: cfg.base,
        }]);
    }
    let pairs: Vec<(usize, u64)> = cfg
        .dims
        .iter()
        .flat_map(|&d| cfg.n_list.iter().map(move |&n| (d, n)))
        .collect();
    pairs
        .into_par_iter()
        .map(|(d, n)| build_point_set(cfg, d, n).map_err(|e| e.context(format!("d={d} N={n}"))))
        .collect()
}

/// Runs the configured experiment.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    let jobs = jobs(cfg)?;
    let runner = runners::runner(cfg.experiment);
    let parts: Vec<runners::Part> = jobs
        .par_iter()
        .map(|job| runner(cfg, job).map_err(|e| e.context(job.label())))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for part in parts {
        rows.extend(part.rows);
        checks.extend(part.checks);
    }
    let mut report = ExperimentReport::new(cfg, rows, checks);
    if cfg.timing {
        report.wall_clock_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(kind: ExperimentKind, extra: &str) -> ExperimentConfig {
        let text = format!("seed = 5\nsamples = 4000\n{extra}");
        ExperimentConfig::resolve(Some(kind), &parse_config_text(&text).unwrap()).unwrap()
    }

    fn quantity<'a>(r: &'a ExperimentReport, q: &str) -> Vec<&'a Row> {
        r.rows
            .iter()
            .filter(|row| row.str("quantity") == Some(q))
            .collect()
    }

    #[test]
    fn every_experiment_runs_on_small_inputs() {
        let cases = [
            (ExperimentKind::NormsSweep, "n-list = 1,16\np = 3"),
            (ExperimentKind::RothTest, "n-list = 2^4\ndim = 2,3"),
            (
                ExperimentKind::LemmaBounds,
                "n-list = 2^4\nlevels-above = 2",
            ),
            (ExperimentKind::DichotomyExample, "n-list = 2^6"),
            (ExperimentKind::ProductBound, "n-list = 3^3"),
            (ExperimentKind::Tails, "n-list = 2^6\nsamples = 20000"),
            (ExperimentKind::NetVerify, "n-list = 2^6\ntrials = 200"),
            (ExperimentKind::Interpolation, "n-list = 2^5"),
            (ExperimentKind::HaarScan, "n-list = 2^4\nlevels-above = 1"),
        ];
        for (kind, extra) in cases {
            let r = run(&cfg(kind, extra)).unwrap();
            assert!(!r.rows.is_empty(), "{kind}");
            assert!(
                r.passed,
                "{kind}: {:?}",
                r.failed_checks().collect::<Vec<_>>()
            );
            assert!(
                r.rows.iter().all(|row| row.get("method").is_some()),
                "{kind}"
            );
        }
    }

    #[test]
    fn single_point_row_is_degenerate() {
        let r = run(&cfg(ExperimentKind::NormsSweep, "n-list = 1")).unwrap();
        let row = &quantity(&r, "L1")[0];
        assert_eq!(row.f64("n"), Some(1.0));
        assert!(row.get("ratio_log").unwrap().is_null());
    }

    #[test]
    fn faure_sizes_must_be_powers() {
        let c = cfg(ExperimentKind::NetVerify, "dim = 3\nn-list = 64");
        let err = run(&c).unwrap_err().to_string();
        assert!(err.contains("not a power"), "{err}");
    }

    #[test]
    fn dichotomy_needs_a_net() {
        let c = cfg(
            ExperimentKind::DichotomyExample,
            "generator = random\nn-list = 64",
        );
        assert!(run(&c).is_err());
    }

    #[test]
    fn large_delta_leaves_points_alone() {
        let r = run(&cfg(
            ExperimentKind::DichotomyExample,
            "n-list = 2^8\ndelta = 0.9",
        ))
        .unwrap();
        // only the point nearest the corner can fall in Q
        assert!(quantity(&r, "collapsed_points")[0].f64("value").unwrap() <= 1.0);
        assert!(quantity(&r, "||D-D'||_2")[0].f64("value").unwrap() < 1e-2);
        assert!(quantity(&r, "||D-D'||_1")[0].f64("value").unwrap() < 1e-3);
    }

    #[test]
    fn product_bound_is_three_dimensional() {
        assert!(run(&cfg(ExperimentKind::ProductBound, "dim = 2\nn-list = 4")).is_err());
    }

    #[test]
    fn net_verify_flags_a_non_net() {
        let c = cfg(
            ExperimentKind::NetVerify,
            "generator = random\nbase = 2\nn-list = 16\ntrials = 50",
        );
        let r = run(&c).unwrap();
        assert!(!r.passed);
    }

    #[test]
    fn reports_are_identical_across_thread_counts() {
        let c = cfg(ExperimentKind::RothTest, "dim = 2,3\nn-list = 2^4,2^6");
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let a = one.install(|| run(&c).unwrap().to_json());
        let b = four.install(|| run(&c).unwrap().to_json());
        assert_eq!(a, b);
    }

    #[test]
    fn points_file_replaces_generator() {
        let dir = std::env::temp_dir().join(format!("dps-exp-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("p.txt");
        let p = generate_hammersley(2, 32).unwrap();
        crate::pointset::io::write_text(&p, std::fs::File::create(&path).unwrap()).unwrap();
        let c = cfg(
            ExperimentKind::Interpolation,
            &format!("points = {}", path.display()),
        );
        let r = run(&c).unwrap();
        assert!(r.rows.iter().all(|row| row.f64("N") == Some(32.0)));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
