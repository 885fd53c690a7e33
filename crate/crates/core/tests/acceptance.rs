//! Acceptance criteria. Each prints one `PASS`/`FAIL` line; the binary exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use gauge_asym::asymmetry::{
    constant_with, find_common_orthogonal, find_common_orthogonal_inner, relative_gap,
    ConstantOptions, Which,
};
use gauge_asym::exec::Exec;
use gauge_asym::experiments::{
    run_bound_and_sharpness, run_continuity, run_duality, run_invariance, run_sandwich, trial_seed,
};
use gauge_asym::gauge::{gauge_eval, polygon_dual, GaugeContext};
use gauge_asym::generators::{hexagon, random_convex_polygon, regular, rounded, symmetrize};
use gauge_asym::geometry::{ConvexPolygon, SymplecticForm, Vec2};
use gauge_asym::oracle::{constant_sampled, gauge_bisect, orthogonality_grid, OracleConfig};
use gauge_asym::orthogonality::b_plus;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20240601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_polygon(k: usize) -> ConvexPolygon {
    let s = trial_seed(SEED, k);
    random_convex_polygon(5 + (s % 8) as usize, s).expect("random polygon")
}

fn exact(w: Which, ctx: &GaugeContext) -> f64 {
    constant_with(ctx, w, &ConstantOptions::default())
        .expect("constant")
        .value
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let r = run_duality(100, SEED, Exec::Parallel);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        r.pass && r.trials == 100 && r.max_residual <= 1e-9 && secs < 10.0,
        format!(
            "duality on {} polygons, max residual {:.2e}, {:.2}s",
            r.trials, r.max_residual, secs
        ),
    )
}

fn criterion_2() -> Outcome {
    let r = run_bound_and_sharpness(&[1.0, 3.0, 10.0, 50.0], 1e-3, Exec::Parallel);
    let values: Vec<f64> = r.records.iter().map(|t| t.values["c_out"]).collect();
    let envelope_gap = r
        .records
        .iter()
        .map(|t| (t.values["c_out"] - t.values["envelope"]).abs())
        .fold(0.0, f64::max);
    let pass =
        r.pass && values.iter().all(|&c| c < 2.0) && values[3] >= 1.95 && envelope_gap <= 1e-2;
    outcome(
        pass,
        format!("smoothed hexagons c_out = {values:.5?}, max envelope gap {envelope_gap:.2e}"),
    )
}

/// Moves the first vertex that keeps the polygon valid radially outward by `d`.
fn perturb_one_vertex(p: &ConvexPolygon, d: f64) -> Option<ConvexPolygon> {
    (0..p.len()).find_map(|i| {
        let mut v = p.vertices().to_vec();
        v[i] = v[i] + v[i].normalized() * d;
        ConvexPolygon::new(v).ok().filter(|q| q.len() == p.len())
    })
}

fn criterion_3() -> Outcome {
    let mut bodies: Vec<ConvexPolygon> = (0..50).map(|k| symmetrize(&random_polygon(k))).collect();
    bodies.push(symmetrize(&hexagon(3.0).unwrap()));
    bodies.push(regular(6).unwrap());
    let mut worst_sym: f64 = 0.0;
    let mut least_pert = f64::INFINITY;
    let mut missing = 0;
    for p in &bodies {
        let ctx = GaugeContext::standard(p.clone());
        for w in Which::ALL {
            worst_sym = worst_sym.max(exact(w, &ctx));
        }
        match perturb_one_vertex(p, 0.05) {
            Some(q) => {
                let ctx = GaugeContext::standard(q);
                for w in Which::ALL {
                    least_pert = least_pert.min(exact(w, &ctx));
                }
            }
            None => missing += 1,
        }
    }
    outcome(
        worst_sym <= 1e-12 && least_pert > 1e-4 && missing == 0,
        format!(
            "{} symmetric bodies max constant {worst_sym:.2e}; perturbed min constant {least_pert:.3e}",
            bodies.len()
        ),
    )
}

fn criterion_4() -> Outcome {
    let r = run_invariance(100, SEED, Exec::Parallel);
    let min_pieces = r
        .records
        .iter()
        .map(|t| t.values.get("outer_pieces_checked").copied().unwrap_or(0.0))
        .fold(f64::INFINITY, f64::min);
    outcome(
        r.pass && r.trials == 100 && min_pieces >= 10.0,
        format!(
            "{} (P, T) pairs, max residual {:.2e}, min pieces per trial {min_pieces}",
            r.trials, r.max_residual
        ),
    )
}

fn criterion_5() -> Outcome {
    let r = run_sandwich(50, SEED, Exec::Parallel);
    outcome(
        r.pass && r.trials == 50,
        format!(
            "{} trials x 1000 points, max slack {:.2e}",
            r.trials, r.max_residual
        ),
    )
}

fn max_vertex_deviation(a: &ConvexPolygon, b: &ConvexPolygon) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let near = |p: &ConvexPolygon, q: &ConvexPolygon| {
        p.vertices()
            .iter()
            .map(|&v| {
                q.vertices()
                    .iter()
                    .map(|&w| v.distance(w))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    near(a, b).max(near(b, a))
}

fn criterion_6() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let p = random_polygon(k);
        let form = SymplecticForm::new(if k % 2 == 0 { 1.0 } else { -2.5 }).unwrap();
        let bidual = polygon_dual(&polygon_dual(&p, form).unwrap(), form).unwrap();
        worst = worst.max(max_vertex_deviation(&bidual, &p.negated()));
    }
    outcome(
        worst <= 1e-9,
        format!("100 polygons, max vertex deviation {worst:.2e}"),
    )
}

fn criterion_7() -> Outcome {
    let r = run_continuity(0, Exec::Parallel);
    let finals: Vec<String> = r
        .series
        .iter()
        .map(|s| {
            format!(
                "{} {:.1e}",
                s.name,
                s.points.last().map_or(f64::NAN, |p| p.1)
            )
        })
        .collect();
    let mut detail = format!("n up to 512; final residuals: {}", finals.join(", "));
    for f in &r.failures {
        detail.push_str(&format!("; {f}"));
    }
    outcome(r.pass, detail)
}

fn criterion_8() -> Outcome {
    let cfg = OracleConfig {
        boundary_samples: 10_000,
        ..OracleConfig::default()
    };
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let ctx = GaugeContext::standard(random_polygon(1000 + k));
        for w in [Which::Out, Which::In] {
            worst = worst.max(relative_gap(
                exact(w, &ctx),
                constant_sampled(&ctx, w, &cfg),
            ));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut gauge_gap: f64 = 0.0;
    for i in 0..1000 {
        let ctx = GaugeContext::standard(random_polygon(2000 + i % 20));
        let x = Vec2::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        gauge_gap = gauge_gap.max((gauge_eval(&ctx, x) - gauge_bisect(&ctx, x)).abs());
    }
    outcome(
        worst <= 1e-3 && gauge_gap <= 1e-9,
        format!("constants vs sampling: max relative gap {worst:.2e}; gauge vs bisection: {gauge_gap:.2e}"),
    )
}

fn criterion_9() -> Outcome {
    let mut bodies: Vec<GaugeContext> = vec![
        GaugeContext::standard(regular(4).unwrap()),
        GaugeContext::standard(rounded(hexagon(3.0).unwrap(), 0.1).unwrap()),
        GaugeContext::new(hexagon(3.0).unwrap(), SymplecticForm::new(-1.5).unwrap()),
    ];
    bodies.extend((0..7).map(|k| GaugeContext::standard(random_polygon(3000 + k))));
    bodies.extend(
        (0..2).map(|k| GaugeContext::standard(rounded(random_polygon(3100 + k), 0.05).unwrap())),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 9);
    let mut slack: f64 = f64::NEG_INFINITY;
    let mut equality: f64 = 0.0;
    for i in 0..10_000 {
        let ctx = &bodies[i % bodies.len()];
        let x = Vec2::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let y = Vec2::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let bound = ctx.gauge(x) * ctx.dual_gauge(y);
        slack = slack.max((ctx.omega(x, y) - bound) / bound.max(1.0));
        if let Ok(b) = b_plus(ctx, x) {
            let rhs = ctx.gauge(x) * ctx.dual_gauge(b);
            equality = equality.max((ctx.omega(x, b) - rhs).abs() / rhs.max(1.0));
        }
    }

    let grid = OracleConfig::default();
    let mut checked = 0;
    let mut failed = Vec::new();
    let triangle = GaugeContext::standard(
        ConvexPolygon::from_points(&[[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]]).unwrap(),
    );
    let searches = bodies
        .iter()
        .enumerate()
        .map(|(i, c)| (format!("body {i}"), find_common_orthogonal(c), c))
        .chain(std::iter::once((
            "triangle inner".to_string(),
            find_common_orthogonal_inner(&triangle),
            &triangle,
        )));
    for (name, found, ctx) in searches {
        checked += 1;
        match found {
            Ok(pair)
                if orthogonality_grid(ctx, pair.x, pair.y, &grid)
                    && orthogonality_grid(ctx, -pair.x, pair.y, &grid) => {}
            Ok(_) => failed.push(format!("{name}: grid rejects pair")),
            Err(e) => failed.push(format!("{name}: {e}")),
        }
    }
    outcome(
        slack <= 1e-12 && equality <= 1e-9 && failed.is_empty(),
        format!(
            "10000 pairs max slack {slack:.2e}; equality residual {equality:.2e}; common orthogonal pairs {}/{checked} verified{}",
            checked - failed.len(),
            if failed.is_empty() { String::new() } else { format!(" ({})", failed.join("; ")) }
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(usize, fn() -> Outcome); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut failures = 0;
    for (n, run) in criteria {
        let start = Instant::now();
        let o = run();
        if !o.pass {
            failures += 1;
        }
        println!(
            "{} criterion {n}: {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {}/9 criteria passed", 9 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
