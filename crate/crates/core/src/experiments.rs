//! Seeded verification suites. Each returns an [`ExperimentResult`] whose
//! per-trial records carry enough (seed, body spec) to replay a trial alone.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::asymmetry::{constant_with, decompose, f_at, ConstantOptions, Which};
use crate::error::Result;
use crate::exec::Exec;
use crate::gauge::GaugeContext;
use crate::generators::{hexagon, jitter, sharpness_hexagon, BodySpec};
use crate::geometry::{
    apply_linear, hausdorff_bodies, hausdorff_distance, hausdorff_points, Body, ConvexPolygon,
    Mat2, RoundedPolygon, Vec2,
};
use crate::orthogonality::{a_plus, b_plus};

/// One trial (or one sequence step) of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub body: Option<BodySpec>,
    pub values: BTreeMap<String, f64>,
    pub residual: f64,
}

/// A named `(parameter, value)` series, e.g. residual against `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub name: String,
    pub trials: usize,
    pub tolerance: f64,
    pub max_residual: f64,
    pub pass: bool,
    /// Failed qualitative checks (ordering, trend); each adds residual 1.
    pub failures: Vec<String>,
    pub records: Vec<TrialRecord>,
    pub series: Vec<Series>,
    pub runtime_seconds: f64,
}

impl ExperimentResult {
    fn finish(
        name: &str,
        tolerance: f64,
        records: Vec<TrialRecord>,
        series: Vec<Series>,
        failures: Vec<String>,
        start: Instant,
    ) -> Self {
        let mut max_residual = records.iter().map(|r| r.residual).fold(0.0, f64::max);
        if !failures.is_empty() {
            max_residual = max_residual.max(1.0);
        }
        if records.iter().any(|r| r.residual.is_nan()) {
            max_residual = f64::NAN;
        }
        ExperimentResult {
            name: name.to_string(),
            trials: records.len(),
            tolerance,
            max_residual,
            pass: max_residual <= tolerance,
            failures,
            records,
            series,
            runtime_seconds: start.elapsed().as_secs_f64(),
        }
    }
}

/// Independent per-trial seed (splitmix64 of the pair).
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    let mut z = seed ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn random_spec(seed: u64, trial: usize) -> (u64, BodySpec) {
    let s = trial_seed(seed, trial);
    (
        s,
        BodySpec::Random {
            n: 5 + (s % 8) as usize,
            seed: s,
        },
    )
}

fn record(
    trial: usize,
    seed: u64,
    body: Option<BodySpec>,
    values: &[(&str, f64)],
    residual: f64,
) -> TrialRecord {
    TrialRecord {
        trial,
        seed,
        body,
        values: values.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        residual,
    }
}

fn nan_record(
    trial: usize,
    seed: u64,
    body: Option<BodySpec>,
    err: impl std::fmt::Display,
) -> TrialRecord {
    let mut r = record(trial, seed, body, &[], f64::NAN);
    r.values.insert(format!("error: {err}"), f64::NAN);
    r
}

fn exact() -> ConstantOptions {
    ConstantOptions {
        exec: Exec::Sequential,
        ..ConstantOptions::default()
    }
}

/// `ĉ_out(P) = c_in(P^ω)` and `c_in(P) = ĉ_out(P^ω)` on random polygons.
pub fn run_duality(trials: usize, seed: u64, exec: Exec) -> ExperimentResult {
    let start = Instant::now();
    let records = exec.map_range(trials, |t| {
        let (s, spec) = random_spec(seed, t);
        duality_trial(t, s, spec.clone()).unwrap_or_else(|e| nan_record(t, s, Some(spec), e))
    });
    ExperimentResult::finish("duality", 1e-9, records, vec![], vec![], start)
}

/// One duality trial on an arbitrary polygon spec.
pub fn duality_trial(t: usize, s: u64, spec: BodySpec) -> Result<TrialRecord> {
    let ctx = GaugeContext::standard(spec.polygon()?);
    let dual = ctx.dual_context()?;
    let o = exact();
    let hat = constant_with(&ctx, Which::HatOut, &o)?.value;
    let din = constant_with(&dual, Which::In, &o)?.value;
    let cin = constant_with(&ctx, Which::In, &o)?.value;
    let dhat = constant_with(&dual, Which::HatOut, &o)?.value;
    let residual = (hat - din).abs().max((cin - dhat).abs());
    Ok(record(
        t,
        s,
        Some(spec),
        &[
            ("c_hat_out", hat),
            ("dual_c_in", din),
            ("c_in", cin),
            ("dual_c_hat_out", dhat),
        ],
        residual,
    ))
}

/// Random invertible `T` with entries in `[−2, 2]`, `|det T| ≥ 0.1` and the requested orientation.
pub fn random_linear_map(rng: &mut ChaCha8Rng, reversing: bool) -> Mat2 {
    loop {
        let m = Mat2::new(
            rng.random_range(-2.0..=2.0),
            rng.random_range(-2.0..=2.0),
            rng.random_range(-2.0..=2.0),
            rng.random_range(-2.0..=2.0),
        );
        let det = m.det();
        if det.abs() < 0.1 {
            continue;
        }
        return if (det < 0.0) == reversing {
            m
        } else {
            Mat2::new(m.c, m.d, m.a, m.b)
        };
    }
}

/// Constants are unchanged by linear maps; `f_out`, `f̂_out` pick up
/// `sign(det T)` pointwise and `f_in` is unchanged.
pub fn run_invariance(trials: usize, seed: u64, exec: Exec) -> ExperimentResult {
    let start = Instant::now();
    let records = exec.map_range(trials, |t| {
        let (s, spec) = random_spec(seed, t);
        let mut rng = ChaCha8Rng::seed_from_u64(s ^ 0x5EED);
        let m = if t == 0 {
            Mat2::IDENTITY
        } else {
            random_linear_map(&mut rng, t % 2 == 1)
        };
        invariance_trial(t, s, spec.clone(), m).unwrap_or_else(|e| nan_record(t, s, Some(spec), e))
    });
    ExperimentResult::finish("invariance", 1e-9, records, vec![], vec![], start)
}

pub fn invariance_trial(t: usize, s: u64, spec: BodySpec, m: Mat2) -> Result<TrialRecord> {
    let p = spec.polygon()?;
    let img = apply_linear(m, &p)?;
    let a = GaugeContext::standard(p);
    let b = GaugeContext::standard(img.polygon);
    let o = exact();
    let mut residual: f64 = 0.0;
    let mut values = vec![("det", img.det)];
    for w in Which::ALL {
        let ca = constant_with(&a, w, &o)?.value;
        let cb = constant_with(&b, w, &o)?.value;
        residual = residual.max((ca - cb).abs());
        values.push((w.name(), ca));
    }
    let mut checked = 0usize;
    for w in Which::ALL {
        let sign = if w == Which::In { 1.0 } else { img.orientation };
        for piece in decompose(&a, w, Exec::Sequential)?.pieces {
            let x = Vec2::from_angle(piece.mid);
            let tx = m.apply(x);
            let fb = f_at(&b, w, tx.angle())?;
            residual = residual.max((fb - sign * piece.value).abs());
            if w != Which::In {
                checked += 1;
            }
        }
    }
    values.push(("outer_pieces_checked", checked as f64 / 2.0));
    Ok(record(t, s, Some(spec), &values, residual))
}

/// `c_out < 2` on the smoothed hexagons, increasing in `α`, above
/// `2 − 5/(α + 1.5)` and within `10⁻²` of `(2α+1)/(α+1.5)`.
pub fn run_bound_and_sharpness(alphas: &[f64], eps: f64, exec: Exec) -> ExperimentResult {
    let start = Instant::now();
    let opts = ConstantOptions {
        exec: Exec::Sequential,
        ..ConstantOptions::default()
    };
    let records = exec.map(alphas, |&alpha| {
        let spec = BodySpec::SharpnessHexagon { alpha, eps };
        let envelope = (2.0 * alpha + 1.0) / (alpha + 1.5);
        match sharpness_hexagon(alpha, eps)
            .and_then(|r| constant_with(&GaugeContext::standard(r), Which::Out, &opts))
        {
            Ok(rep) => record(
                0,
                0,
                Some(spec),
                &[
                    ("alpha", alpha),
                    ("c_out", rep.value),
                    ("envelope", envelope),
                ],
                (rep.value - envelope).abs(),
            ),
            Err(e) => nan_record(0, 0, Some(spec), e),
        }
    });
    let records: Vec<TrialRecord> = records
        .into_iter()
        .enumerate()
        .map(|(i, mut r)| {
            r.trial = i;
            r
        })
        .collect();
    let vals: Vec<(f64, f64)> = alphas
        .iter()
        .zip(&records)
        .map(|(&a, r)| (a, r.values.get("c_out").copied().unwrap_or(f64::NAN)))
        .collect();
    let mut failures = Vec::new();
    for &(a, v) in &vals {
        if !(v < 2.0) {
            failures.push(format!("alpha={a}: c_out={v} is not < 2"));
        }
        if !(v >= 2.0 - 5.0 / (a + 1.5)) {
            failures.push(format!("alpha={a}: c_out={v} below 2 - 5/(alpha+1.5)"));
        }
    }
    let mut sorted = vals.clone();
    sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
    for w in sorted.windows(2) {
        if !(w[1].1 > w[0].1) {
            failures.push(format!(
                "c_out not increasing between alpha={} and alpha={}",
                w[0].0, w[1].0
            ));
        }
    }
    let series = vec![Series {
        name: "c_out".into(),
        points: sorted,
    }];
    ExperimentResult::finish("bound", 1e-2, records, series, failures, start)
}

/// Two-sided bound `γ_P/(1+δ) ≤ γ_L ≤ (1+δ)γ_P` with `δ = αε/(1−αε)`,
/// `ε = d_H(P, L)` and `B ⊆ αP`.
pub fn run_sandwich(trials: usize, seed: u64, exec: Exec) -> ExperimentResult {
    let start = Instant::now();
    let records = exec.map_range(trials, |t| {
        let (s, spec) = random_spec(seed, t);
        sandwich_trial(t, s, spec.clone(), 1000).unwrap_or_else(|e| nan_record(t, s, Some(spec), e))
    });
    ExperimentResult::finish("sandwich", 1e-9, records, vec![], vec![], start)
}

/// Trial kinds cycle through `L = P`, `L = P ⊕ εB` and vertex jitter.
pub fn sandwich_trial(t: usize, s: u64, spec: BodySpec, points: usize) -> Result<TrialRecord> {
    let p = spec.polygon()?;
    let alpha = 1.0 / p.inradius_about_origin();
    let mut rng = ChaCha8Rng::seed_from_u64(s ^ 0xB0D1);
    let eps_target = rng.random_range(1e-4..1e-2f64).min(0.5 / alpha);
    let (l, eps): (Body, f64) = match t % 3 {
        0 => (p.clone().into(), 0.0),
        1 => {
            let l: Body = RoundedPolygon::new(p.clone(), eps_target)?.into();
            let d = hausdorff_bodies(&p.clone().into(), &l);
            (l, d)
        }
        _ => {
            // halve the magnitude until the jittered polygon stays convex
            let mut m = eps_target;
            let j = loop {
                match jitter(&p, m, s) {
                    Ok(j) => break j,
                    Err(_) if m > 1e-8 => m *= 0.5,
                    Err(e) => return Err(e),
                }
            };
            let d = hausdorff_distance(&p, &j);
            (j.into(), d)
        }
    };
    let delta = alpha * eps / (1.0 - alpha * eps);
    let cp = GaugeContext::standard(p);
    let cl = GaugeContext::standard(l);
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let x = Vec2::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let gp = cp.gauge(x);
        let gl = cl.gauge(x);
        let low = gp / (1.0 + delta) - gl;
        let high = gl - (1.0 + delta) * gp;
        worst = worst.max(low.max(high) / gp.max(1.0));
    }
    Ok(record(
        t,
        s,
        Some(spec),
        &[
            ("alpha", alpha),
            ("eps", eps),
            ("delta", delta),
            ("kind", (t % 3) as f64),
        ],
        worst.max(0.0),
    ))
}

/// Settings of the continuity suite.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityConfig {
    pub base: ConvexPolygon,
    /// Rounding radius of the smooth limit body.
    pub r0: f64,
    pub ns: Vec<usize>,
    pub seed: u64,
    /// Polar angle of the fixed ray for the `b⁺` check.
    pub ray_angle: f64,
    /// Direction angle for the `a⁺` check on polygons.
    pub support_angle: f64,
    pub final_threshold: f64,
    pub max_non_monotone: usize,
}

impl ContinuityConfig {
    pub fn new(seed: u64) -> Self {
        ContinuityConfig {
            base: hexagon(3.0).expect("valid hexagon"),
            r0: 0.25,
            ns: (2..=9).map(|k| 1usize << k).collect(),
            seed,
            ray_angle: 0.7,
            support_angle: 1.1,
            final_threshold: 1e-2,
            max_non_monotone: 2,
        }
    }
}

/// Residuals of a sequence `K_n → K` for each `n`:
/// `d_H(K_n^ω, K^ω)`, `|c_out(K_n) − c_out(K)|`, `|c_in(K_n) − c_in(K)|`
/// and `|b⁺_{K_n}(x₀) − b⁺_K(x₀)|`.
pub fn sequence_residuals(
    limit: &Body,
    seq: &(dyn Fn(usize) -> Result<Body> + Sync),
    ns: &[usize],
    ray_angle: f64,
    exec: Exec,
) -> Result<Vec<[f64; 4]>> {
    let opts = ConstantOptions {
        exec: Exec::Sequential,
        ..ConstantOptions::default()
    };
    let k = GaugeContext::standard(limit.clone());
    let kd = k.dual()?.boundary_points().to_vec();
    let c_out_k = constant_with(&k, Which::Out, &opts)?.value;
    let c_in_k = constant_with(&k, Which::In, &opts)?.value;
    let x0 = Vec2::from_angle(ray_angle);
    let b_k = b_plus(&k, x0)?;
    let rows = exec.map(ns, |&n| -> Result<[f64; 4]> {
        let kn = GaugeContext::standard(seq(n)?);
        let dn = kn.dual()?.boundary_points().to_vec();
        Ok([
            hausdorff_points(&dn, &kd),
            (constant_with(&kn, Which::Out, &opts)?.value - c_out_k).abs(),
            (constant_with(&kn, Which::In, &opts)?.value - c_in_k).abs(),
            b_plus(&kn, x0)?.distance(b_k),
        ])
    });
    rows.into_iter().collect()
}

const SERIES_NAMES: [&str; 4] = ["dual_hausdorff", "c_out", "c_in", "b_plus"];

/// Number of steps where the residual grows.
pub fn non_monotone_steps(values: &[f64]) -> usize {
    values.windows(2).filter(|w| w[1] > w[0]).count()
}

/// Convergence suite: `rounded(P, r0 + 1/n)` and `rounded(jitter(P, 1/n), r0)`
/// towards `rounded(P, r0)`, plus `a⁺` on `jitter(P, 1/n)` towards `P`.
pub fn run_continuity(seed: u64, exec: Exec) -> ExperimentResult {
    run_continuity_with(&ContinuityConfig::new(seed), exec)
}

pub fn run_continuity_with(cfg: &ContinuityConfig, exec: Exec) -> ExperimentResult {
    let start = Instant::now();
    let p = cfg.base.clone();
    let r0 = cfg.r0;
    let seed = cfg.seed;
    let limit: Body = match RoundedPolygon::new(p.clone(), r0) {
        Ok(r) => r.into(),
        Err(e) => {
            return ExperimentResult::finish(
                "continuity",
                cfg.final_threshold,
                vec![nan_record(0, seed, None, e)],
                vec![],
                vec![],
                start,
            )
        }
    };
    // Jitter directions come from the first derived seed whose largest
    // jitter (n = min ns) still gives a convex polygon.
    let Some(jseed) = (0..100).map(|k| trial_seed(seed, k)).find(|&s| {
        cfg.ns
            .iter()
            .all(|&n| jitter(&p, 1.0 / n as f64, s).is_ok())
    }) else {
        return ExperimentResult::finish(
            "continuity",
            cfg.final_threshold,
            vec![nan_record(0, seed, None, "no valid jitter seed")],
            vec![],
            vec![],
            start,
        );
    };
    let widen = |n: usize| -> Result<Body> {
        Ok(RoundedPolygon::new(p.clone(), r0 + 1.0 / n as f64)?.into())
    };
    let shake = |n: usize| -> Result<Body> {
        Ok(RoundedPolygon::new(jitter(&p, 1.0 / n as f64, jseed)?, r0)?.into())
    };
    type Seq<'a> = (&'a str, &'a (dyn Fn(usize) -> Result<Body> + Sync));
    let sequences: [Seq; 2] = [("rounded", &widen), ("jitter", &shake)];

    let mut records = Vec::new();
    let mut series = Vec::new();
    let mut failures = Vec::new();
    let mut check = |name: String, pts: Vec<(f64, f64)>, records: &mut Vec<TrialRecord>| {
        let vals: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let last = *vals.last().unwrap_or(&f64::NAN);
        let nm = non_monotone_steps(&vals);
        let fit = pts.iter().map(|&(n, r)| n * r).fold(0.0, f64::max);
        if nm > cfg.max_non_monotone {
            failures.push(format!("{name}: {nm} non-monotone steps"));
        }
        records.push(record(
            records.len(),
            seed,
            None,
            &[
                ("final", last),
                ("rate_constant", fit),
                ("non_monotone_steps", nm as f64),
                ("jitter_seed", jseed as f64),
            ],
            last,
        ));
        series.push(Series { name, points: pts });
    };

    for (label, seq) in sequences {
        match sequence_residuals(&limit, seq, &cfg.ns, cfg.ray_angle, exec) {
            Ok(rows) => {
                for (j, metric) in SERIES_NAMES.iter().enumerate() {
                    let pts = cfg
                        .ns
                        .iter()
                        .zip(&rows)
                        .map(|(&n, r)| (n as f64, r[j]))
                        .collect();
                    check(format!("{label}/{metric}"), pts, &mut records);
                }
            }
            Err(e) => records.push(nan_record(records.len(), seed, None, e)),
        }
    }

    let u = Vec2::from_angle(cfg.support_angle);
    let base = GaugeContext::standard(p.clone());
    let a_series: Result<Vec<(f64, f64)>> = a_plus(&base, u).and_then(|a0| {
        cfg.ns
            .iter()
            .map(|&n| {
                let pn = GaugeContext::standard(jitter(&p, 1.0 / n as f64, jseed)?);
                Ok((n as f64, a_plus(&pn, u)?.distance(a0)))
            })
            .collect()
    });
    match a_series {
        Ok(pts) => check("polygon_jitter/a_plus".into(), pts, &mut records),
        Err(e) => records.push(nan_record(records.len(), seed, None, e)),
    }
    ExperimentResult::finish(
        "continuity",
        cfg.final_threshold,
        records,
        series,
        failures,
        start,
    )
}
