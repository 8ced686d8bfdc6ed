//! One function per experiment, each mapping a job to rows and checks.

use rayon::prelude::*;
use serde_json::Value;

use super::config::{ExperimentConfig, ExperimentKind};
use super::report::{Check, Row};
use super::Job;
use crate::combinatorics::exact_log;
use crate::discrepancy::{
    counting_l1, counting_l2_squared, l2_norm_exact, luxemburg_norm, DiscrepancySample,
    EmpiricalMeasure, NormReport, OrliczSpec, INEQUALITY_SLACK,
};
use crate::error::{config, Result};
use crate::haar::{all_coefficients, log_level, RFunction, ShapeVector, ORDER_CAP};
use crate::pointset::{check_counting_bound, corner_collapse, corner_cube_members, verify_net};
use crate::sum::{det_mean_var, Neumaier};
use crate::testfn::{
    lattice_thresholds, tail_distribution, tail_range_limit, z_norm_squared_identity, InnerMode,
    TestFunction,
};

/// Generous bound used for the recorded `‖Z‖_p` trend.
pub const Z_NORM_ENVELOPE: f64 = 5.0;

/// Largest threshold used when tails are requested without thresholds.
pub const DEFAULT_TAIL_LIMIT: f64 = 5.0;

#[derive(Default)]
pub(super) struct Part {
    pub rows: Vec<Row>,
    pub checks: Vec<Check>,
}

impl Part {
    fn check(&mut self, name: String, passed: bool, detail: String) {
        self.checks.push(Check::new(name, passed, detail));
    }
}

pub(super) type Runner = fn(&ExperimentConfig, &Job) -> Result<Part>;

pub(super) fn runner(kind: ExperimentKind) -> Runner {
    match kind {
        ExperimentKind::NormsSweep => norms_sweep,
        ExperimentKind::RothTest => roth_test,
        ExperimentKind::LemmaBounds => lemma_bounds,
        ExperimentKind::DichotomyExample => dichotomy_example,
        ExperimentKind::ProductBound => product_bound,
        ExperimentKind::Tails => tails,
        ExperimentKind::NetVerify => net_verify,
        ExperimentKind::Interpolation => interpolation,
        ExperimentKind::HaarScan => haar_scan,
    }
}

fn tag(job: &Job) -> String {
    format!("d={} N={}", job.dim(), job.len())
}

/// Columns shared by every row.
fn base_row(job: &Job) -> Row {
    Row::new()
        .with("generator", job.points.generator().name.clone())
        .with("d", job.dim())
        .with("N", job.len())
        .with("n", log_level(job.len()))
}

fn norm_row(job: &Job, r: &NormReport) -> Row {
    base_row(job)
        .with("quantity", r.norm_kind.to_string())
        .with("value", r.value)
        .with("std_error", r.std_error)
        .with("method", method_name(r))
        .with("samples", r.samples)
        .with("seed", r.seed)
}

fn method_name(r: &NormReport) -> Value {
    serde_json::to_value(r.method).expect("method serializes")
}

fn value_row(job: &Job, quantity: &str, value: f64, std_error: f64, method: &str) -> Row {
    base_row(job)
        .with("quantity", quantity)
        .with("value", value)
        .with("std_error", std_error)
        .with("method", method)
}

/// `(ln N)^e`, undefined (NaN) for `N = 1`.
fn log_power(n_points: usize, e: f64) -> f64 {
    let l = (n_points as f64).ln();
    if l > 0.0 {
        l.powf(e)
    } else {
        f64::NAN
    }
}

fn with_log_ratios(row: Row, value: f64, job: &Job) -> Row {
    let d = job.dim() as f64;
    let n = job.len();
    row.with("ratio_log", value / log_power(n, 1.0))
        .with("ratio_log_half", value / log_power(n, 0.5))
        .with("ratio_log_dm1_half", value / log_power(n, 0.5 * (d - 1.0)))
}

/// Exact empirical-measure inequalities on one sample set.
fn sample_checks(part: &mut Part, job: &Job, smp: &DiscrepancySample, p: f64) -> Result<()> {
    let ic = smp.interpolation(p)?;
    part.check(
        format!("interpolation p={p} {}", tag(job)),
        ic.holds,
        format!("L{} = {} <= {}", ic.r, ic.lr, ic.rhs),
    );
    let m = smp.measure();
    part.check(
        format!("L1 <= L2 {}", tag(job)),
        m.l1_le_l2(),
        format!("L1 = {}, L2 = {}", m.lp(1.0).0, m.lp(2.0).0),
    );
    Ok(())
}

fn norms_sweep(cfg: &ExperimentConfig, job: &Job) -> Result<Part> {
    let mut part = Part::default();
    let d = job.dim();
    let smp = DiscrepancySample::draw(&job.points, cfg.samples, cfg.seed)?;
    let exact = l2_norm_exact(&job.points);
    let mut reports = vec![smp.lp_norm(1.0)?, smp.lp_norm(2.0)?];
    if cfg.p != 1.0 && cfg.p != 2.0 {
        reports.push(smp.lp_norm(cfg.p)?);
    }
    if d >= 2 {
        reports.push(smp.orlicz_norm(OrliczSpec::llogl(0.5 * (d as f64 - 2.0))?, cfg.tol)?);
    }
    reports.push(exact.clone());
    for r in &reports {
        let mut row = with_log_ratios(norm_row(job, r), r.value, job)
            .with("ratio_sqrt_n", r.value / (job.len() as f64).sqrt());
        if r.std_error > 0.0 && r.norm_kind.to_string() == "L2" {
            row = row.with("z_vs_exact", (r.value - exact.value) / r.std_error);
        }
        part.rows.push(row);
    }
    sample_checks(&mut part, job, &smp, cfg.p)?;
    Ok(part)
}

fn roth_test(cfg: &ExperimentConfig, job: &Job) -> Result<Part> {
    let mut part = Part::default();
    let d = job.dim();
    let z = TestFunction::build_z(&job.points, None)?;
    let n = f64::from(z.n());
    let norm_scale = n.powf(0.5 * (d as f64 - 1.0));

    let zi = z.inner_product(&job.points, InnerMode::Exact)?;
    part.rows.push(
        value_row(job, "<D,Z>", zi.value, 0.0, "exact").with("ratio_n", zi.value / norm_scale),
    );
    let zi_mc = z.inner_product(
        &job.points,
        InnerMode::MonteCarlo {
            samples: cfg.samples,
            seed: cfg.seed,
        },
    )?;
    part.rows.push(
        value_row(job, "<D,Z>", zi_mc.value, zi_mc.std_error, "monte_carlo")
            .with("samples", cfg.samples)
            .with("seed", cfg.seed)
            .with("z_vs_exact", (zi_mc.value - zi.value) / zi_mc.std_error),
    );

    let zn = z.l2_norm_squared_exact()?;
    let identity = z_norm_squared_identity(z.n(), d);
    part.rows.push(
        value_row(job, "||Z||_2^2", zn, 0.0, "exact")
            .with("expected", identity)
            .with("components", z.len()),
    );
    part.check(
        format!("||Z||_2^2 identity {}", tag(job)),
        (zn - identity).abs() <= 1e-9,
        format!("{zn} vs {identity}"),
    );

    let zs = z.sample(cfg.samples, cfg.seed);
    for p in [4.0, 6.0] {
        let (v, se) = EmpiricalMeasure::new(&zs).lp(p);
        part.rows.push(
            value_row(job, &format!("||Z||_{p}"), v, se, "monte_carlo")
                .with("samples", cfg.samples)
                .with("seed", cfg.seed),
        );
        part.check(
            format!("||Z||_{p} <= {Z_NORM_ENVELOPE} {}", tag(job)),
            v <= Z_NORM_ENVELOPE,
            format!("{v}"),
        );
    }

    let eps = cfg.epsilon_for(d);
    let y = z.to_dichotomy(eps)?;
    let q = n.powf(eps);
    let yi = y.inner_product(&job.points, InnerMode::Exact)?;
    part.rows.push(
        value_row(job, "<D,Y>", yi.value, 0.0, "exact")
            .with("epsilon", eps)
            .with("q", q)
            .with("ratio_n", yi.value / norm_scale),
    );
    let ys = y.sample(cfg.samples, cfg.seed);
    let m = ys.len();
    let big = ys.iter().filter(|v| v.abs() > 1.0).count() as f64 / m as f64;
    part.rows.push(
        value_row(
            job,
            "|{|Y|>1}|",
            big,
            (big * (1.0 - big) / m as f64).sqrt(),
            "monte_carlo",
        )
        .with("q", q)
        .with("exp_minus_q2", (-q * q).exp()),
    );

    let smp = DiscrepancySample::draw(&job.points, cfg.samples, cfg.seed)?;
    let dv = smp.values();
    let (trunc, var) = det_mean_var(m, |i| {
        if ys[i].abs() <= 1.0 {
            dv[i] * ys[i]
        } else {
            0.0
        }
    });
    let l1 = smp.lp_norm(1.0)?;
    part.rows.push(
        value_row(
            job,
            "<D,Y1_{|Y|<=1}>",
            trunc,
            (var / m as f64).sqrt(),
            "monte_carlo",
        )
        .with("l1", l1.value),
    );
    part.rows.push(norm_row(job, &l1));
    part.check(
        format!("<D,Y1> <= ||D||_1 {}", tag(job)),
        trunc <= l1.value * (1.0 + INEQUALITY_SLACK),
        format!("{trunc} vs {}", l1.value),
    );
    Ok(part)
}

fn lemma_bounds(cfg: &ExperimentConfig, job: &Job) -> Result<Part> {
    let mut part = Part::default();
    let n = log_level(job.len());
    let top = (n + cfg.levels_above).min(ORDER_CAP);
    for k in n..=top {
        let shapes = ShapeVector::all_of_order(k, job.dim());
        let values: Vec<f64> = shapes
            .par_iter()
            .map(|s| RFunction::greedy(&job.points, s)?.inner_product(&job.points))
            .collect::<Result<_>>()?;
        let (imin, &vmin) = values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("at least one shape");
        let (imax, &vmax) = values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("at least one shape");
        let scale = 2f64.powi(k as i32) / job.len() as f64;
        part.rows.push(
            value_row(job, "greedy_min", vmin, 0.0, "exact")
                .with("level", k)
                .with("shape", shapes[imin].to_string()),
        );
        part.rows.push(
            value_row(job, "greedy_max", vmax, 0.0, "exact")
                .with("level", k)
                .with("shape", shapes[imax].to_string()),
        );
        part.rows.push(
            value_row(job, "upper_scaled", vmax * scale, 0.0, "exact")
                .with("level", k)
                .with("shape", shapes[imax].to_string()),
        );
        part.check(
            format!("greedy values >= 0 {} level {k}", tag(job)),
            vmin >= 0.0,
            format!("min {vmin} at {}", shapes[imin]),
        );
    }
    Ok(part)
}

fn dichotomy_example(cfg: &ExperimentConfig, job: &Job) -> Result<Part> {
    if job.base.is_none() && cfg.points.is_none() {
        return Err(config("the dichotomy example needs a net generator"));
    }
    let mut part = Part::default();
    let d = job.dim();
    let delta = cfg.delta_for(d);
    let members = corner_cube_members(&job.points, delta)?;
    let collapsed = corner_collapse(&job.points, delta)?;
    let cjob = Job {
        points: collapsed,
        base: job.base,
    };
    part.rows.push(
        value_row(job, "collapsed_points", members.len() as f64, 0.0, "exact").with("delta", delta),
    );

    let quarter = (job.len() as f64).powf(0.25);
    let l2 = l2_norm_exact(&cjob.points);
    part.rows.push(
        with_log_ratios(norm_row(&cjob, &l2), l2.value, job)
            .with("delta", delta)
            .with("ratio_quarter", l2.value / quarter),
    );
    let smp = DiscrepancySample::draw(&cjob.points, cfg.samples, cfg.seed)?;
    let l1 = smp.lp_norm(1.0)?;
    part.rows.push(
        with_log_ratios(norm_row(&cjob, &l1), l1.value, job)
            .with("delta", delta)
            .with("ratio_quarter", l1.value / quarter),
    );
    let original = l2_norm_exact(&job.points);
    part.rows
        .push(norm_row(job, &original).with("ratio_quarter", original.value / quarter));

    // D_N - D'_N is the counting function of the collapsed originals
    let moved: Vec<f64> = members
        .iter()
        .flat_map(|&i| job.points.point(i).iter().copied())
        .collect();
    let diff_l1 = counting_l1(d, &moved);
    let diff_l2 = counting_l2_squared(d, &moved).max(0.0).sqrt();
    part.rows.push(
        value_row(job, "||D-D'||_1", diff_l1, 0.0, "exact")
            .with("delta", delta)
            .with("ratio_quarter", diff_l1 / quarter),
    );
    part.rows.push(
        value_row(job, "||D-D'||_2", diff_l2, 0.0, "exact")
            .with("delta", delta)
            .with("ratio_quarter", diff_l2 / quarter),
    );
    sample_checks(&mut part, &cjob, &smp, cfg.p)?;
    Ok(part)
}

fn product_bound(cfg: &ExperimentConfig, job: &Job) -> Result<Part> {
    let d = job.dim();
    if d != 3 && !(cfg.allow_any_dim && d >= 2) {
        return Err(config(format!(
            "the product bound is three-dimensional (got d = {d}; set allow-any-dim)"
        )));
    }
    let mut part = Part::default();
    let n = f64::from(log_level(job.len()));
    let smp = DiscrepancySample::draw(&job.points, cfg.samples, cfg.seed)?;
    let l1 = smp.lp_norm(1.0)?;
    let llogl = smp.orlicz_norm(OrliczSpec::llogl(1.0)?, cfg.tol)?;
    part.rows.push(norm_row(job, &l1));
    part.rows.push(norm_row(job, &llogl));
    let product = l1.value * llogl.value;
    // errors added linearly: the two estimates share one sample
    let se = product * (l1.std_error / l1.value + llogl.std_error / llogl.value);
    part.rows.push(
        value_row(job, "L1*LlogL", product, se, "monte_carlo")
            .with("ratio_n2", product / (n * n))
            .with("lower_3sigma_n2", (product - 3.0 * se) / (n * n)),
    );

    let alpha = (llogl.value / l1.value).sqrt();
    let base = TestFunction::build_y_sine(&job.points, cfg.sine_c[0], None, cfg.allow_any_dim)?;
    let dv = smp.values();
    for &c in &cfg.sine_c {
        let y = base.with_sine_c(c)?;
        let ys = y.sample(cfg.samples, cfg.seed);
        let m = ys.len();
        let (inner, var) = det_mean_var(m, |i| dv[i] * ys[i]);
        part.rows.push(
            value_row(
                job,
                "<D,Y_sine>",
                inner,
                (var / m as f64).sqrt(),
                "monte_carlo",
            )
            .with("c", c)
            .with("ratio_n", inner / n),
        );
        let truncated: Vec<f64> = ys
            .iter()
            .map(|&v| if v.abs() > alpha { v } else { 0.0 })
            .collect();
        let (enorm, ese) = luxemburg_norm(
            &EmpiricalMeasure::new(&truncated),
            OrliczSpec::ExpL,
            cfg.tol,
        )?;
        let outside = truncated.iter().filter(|v| **v != 0.0).count();
        part.rows.push(
            value_row(job, "||Y1_E||_expL", enorm, ese, "bisection_mc")
                .with("c", c)
                .with("alpha", alpha)
                .with("alpha_times_norm", alpha * enorm)
                .with("measure_E", outside as f64 / m as f64),
        );
    }
    sample_checks(&mut part, job, &smp, cfg.p)?;
    Ok(part)
}

fn tails(cfg: &ExperimentConfig, job: &Job) -> Result<Part> {
    let mut part = Part::default();
    let z = TestFunction::build_z(&job.points, None)?;
    let thresholds = match &cfg.thresholds {
        Some(t) => t.clone(),
        None => lattice_thresholds(&z, DEFAULT_TAIL_LIMIT).expect("Z is lattice valued"),
    };
    let limit = (job.dim() >= 3).then(|| tail_range_limit(z.n(), job.dim()));
    let rep = tail_distribution(&z, &thresholds, cfg.samples, cfg.seed, limit)?;
    let m = rep.samples as f64;
    for i in 0..rep.thresholds.len() {
        let s = rep.survival[i];
        part.rows.push(
            value_row(
                job,
                "survival",
                s,
                (s * (1.0 - s) / m).sqrt(),
                "monte_carlo",
            )
            .with("t", rep.thresholds[i])
            .with("exceedances", rep.exceedances[i])
            .with("fitted", rep.fitted[i])
            .with("samples", rep.samples)
            .with("seed", rep.seed),
        );
    }
    part.check(
        format!("survival nonincreasing {}", tag(job)),
        rep.survival.windows(2).all(|w| w[0] >= w[1]),
        String::new(),
    );
    match &rep.fit {
        Some(fit) => {
            part.rows.push(
                value_row(job, "tail_fit_b", fit.b, 0.0, "least_squares")
                    .with("a", fit.a)
                    .with("r_squared", fit.r_squared)
                    .with("envelope_a", fit.envelope_a)
                    .with("points", fit.points)
                    .with("range_limit", limit.map_or(Value::Null, Value::from)),
            );
            part.check(
                format!("tail fit b > 0 {}", tag(job)),
                fit.b > 0.0,
                format!("b = {}", fit.b),
            );
            part.check(
                format!("tail fit R^2 >= 0.9 {}", tag(job)),
                fit.r_squared >= 0.9,
                format!("R^2 = {}", fit.r_squared),
            );
        }
        None => part.check(
            format!("tail fit exists {}", tag(job)),
            false,
            format!("flagged thresholds {:?}", rep.flagged),
        ),
    }
    Ok(part)
}

fn net_verify(cfg: &ExperimentConfig, job: &Job) -> Result<Part> {
    let base = job
        .base
        .or(cfg.base)
        .ok_or_else(|| config("net verification needs a base (use a net generator or set base)"))?;
    let s = exact_log(job.len() as u64, base)
        .ok_or_else(|| config(format!("N = {} is not a power of {base}", job.len())))?;
    let mut part = Part::default();
    let verdict = verify_net(&job.points, base, s)?;
    let mut row = value_row(
        job,
        "net",
        f64::from(u8::from(verdict.is_net)),
        0.0,
        "exact",
    )
    .with("base", base)
    .with("s", s)
    .with("boxes_checked", verdict.boxes_checked);
    if let Some(v) = &verdict.violation {
        row = row
            .with("violation_exponents", format!("{:?}", v.exponents))
            .with("violation_position", format!("{:?}", v.position))
            .with("violation_count", v.count);
    }
    part.rows.push(row);
    part.check(
        format!("net property base {base} {}", tag(job)),
        verdict.is_net,
        format!("{} boxes", verdict.boxes_checked),
    );
    let cb = check_counting_bound(&job.points, s, cfg.trials, cfg.seed);
    part.rows.push(
        value_row(
            job,
            "max_box_deviation",
            cb.max_deviation,
            0.0,
            "sampled_boxes",
        )
        .with("bound", cb.bound)
        .with("trials", cb.trials)
        .with("seed", cfg.seed),
    );
    part.check(
        format!("counting bound s^(d-1) {}", tag(job)),
        cb.holds(),
        format!("{} <= {}", cb.max_deviation, cb.bound),
    );
    Ok(part)
}

fn interpolation(cfg: &ExperimentConfig, job: &Job) -> Result<Part> {
    let mut part = Part::default();
    let smp = DiscrepancySample::draw(&job.points, cfg.samples, cfg.seed)?;
    let ic = smp.interpolation(cfg.p)?;
    for (q, v) in [
        ("L1", ic.l1),
        (&*format!("Lp({})", ic.p), ic.lp),
        (&*format!("Lp({})", ic.r), ic.lr),
    ] {
        part.rows.push(
            value_row(job, q, v, f64::NAN, "monte_carlo")
                .with("samples", cfg.samples)
                .with("seed", cfg.seed),
        );
    }
    part.rows.push(
        value_row(job, "sqrt(L1*Lp)", ic.rhs, f64::NAN, "monte_carlo")
            .with("p", ic.p)
            .with("r", ic.r)
            .with("holds", ic.holds),
    );
    sample_checks(&mut part, job, &smp, cfg.p)?;
    Ok(part)
}

fn haar_scan(cfg: &ExperimentConfig, job: &Job) -> Result<Part> {
    let mut part = Part::default();
    let n = log_level(job.len());
    let top = (n + cfg.levels_above).min(ORDER_CAP);
    for k in n..=top {
        let shapes = ShapeVector::all_of_order(k, job.dim());
        let rows: Vec<Row> = shapes
            .par_iter()
            .map(|s| {
                let c = all_coefficients(&job.points, s)?;
                let abs: f64 = c.iter().map(|v| v.abs()).collect::<Neumaier>().value();
                let min = c.iter().copied().fold(f64::INFINITY, f64::min);
                let max = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                Ok(value_row(job, "sum_abs_coefficients", abs, 0.0, "exact")
                    .with("level", k)
                    .with("shape", s.to_string())
                    .with("min_coefficient", min)
                    .with("max_coefficient", max)
                    .with("nonzero", c.iter().filter(|v| **v != 0.0).count())
                    .with("scaled", abs * 2f64.powi(k as i32) / job.len() as f64))
            })
            .collect::<Result<_>>()?;
        part.rows.extend(rows);
    }
    Ok(part)
}
