//! Brute-force reference implementations for cross-checking the exact kernels.
//!
//! Nothing here reuses the production gauge, ray, support or asymmetry code:
//! gauges come from bisection on a point-in-body test, tangents from finite
//! differences of sampled boundary points, support points from a hill-climbing
//! walk over the vertices. Only `Vec2` arithmetic and the form are shared.

use std::f64::consts::{PI, TAU};

use crate::exec::Exec;
use crate::gauge::GaugeContext;
use crate::geometry::{Body, SymplecticForm, Vec2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub boundary_samples: usize,
    pub t_grid: usize,
    pub refine_iters: usize,
    pub tol: f64,
    pub exec: Exec,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            boundary_samples: 10_000,
            t_grid: 401,
            refine_iters: 60,
            tol: 1e-9,
            exec: Exec::default(),
        }
    }
}

/// Raw body data read once from a context.
struct Raw {
    verts: Vec<Vec2>,
    eps: f64,
    form: SymplecticForm,
}

impl Raw {
    fn of(ctx: &GaugeContext) -> Raw {
        let body: &Body = ctx.body();
        Raw {
            verts: body.core().vertices().to_vec(),
            eps: body.radius(),
            form: ctx.form(),
        }
    }

    fn polygon_contains(&self, q: Vec2) -> bool {
        let n = self.verts.len();
        (0..n).all(|i| {
            let a = self.verts[i];
            let b = self.verts[(i + 1) % n];
            (b - a).cross(q - a) >= 0.0
        })
    }

    fn distance_to_core(&self, q: Vec2) -> f64 {
        if self.polygon_contains(q) {
            return 0.0;
        }
        let n = self.verts.len();
        (0..n)
            .map(|i| {
                let a = self.verts[i];
                let e = self.verts[(i + 1) % n] - a;
                let t = ((q - a).dot(e) / e.dot(e)).clamp(0.0, 1.0);
                (q - (a + e * t)).norm()
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn contains(&self, q: Vec2) -> bool {
        if self.eps == 0.0 {
            self.polygon_contains(q)
        } else {
            self.distance_to_core(q) <= self.eps
        }
    }

    /// Bisection for `sup{λ : λx ∈ K}`, returned as `1/λ`.
    fn gauge(&self, x: Vec2) -> f64 {
        if x.x == 0.0 && x.y == 0.0 {
            return 0.0;
        }
        let mut lo = 0.0;
        let mut hi = 1.0 / x.norm();
        while self.contains(x * hi) {
            lo = hi;
            hi *= 2.0;
        }
        while hi - lo > 1e-15 * hi {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.contains(x * mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        2.0 / (lo + hi)
    }

    fn boundary(&self, theta: f64) -> Vec2 {
        let u = Vec2::from_angle(theta);
        u / self.gauge(u)
    }

    fn lebesgue_area(&self) -> f64 {
        let n = self.verts.len();
        let mut twice = 0.0;
        let mut perim = 0.0;
        for i in 0..n {
            let a = self.verts[i];
            let b = self.verts[(i + 1) % n];
            twice += a.x * b.y - a.y * b.x;
            perim += (b - a).norm();
        }
        0.5 * twice + perim * self.eps + PI * self.eps * self.eps
    }

    fn area(&self) -> f64 {
        self.form.scale().abs() * self.lebesgue_area()
    }

    /// Unit tangent at the boundary point in direction `theta`, or `None`
    /// when the one-sided secants disagree (a polygon corner).
    fn tangent(&self, theta: f64) -> Option<Vec2> {
        let h = 1e-5;
        let q0 = self.boundary(theta);
        let qp = self.boundary(theta + h);
        let qm = self.boundary(theta - h);
        if self.eps == 0.0 {
            let fwd = (qp - q0).normalized();
            let back = (q0 - qm).normalized();
            if fwd.cross(back).abs() > 1e-6 || fwd.dot(back) < 0.0 {
                return None;
            }
        }
        Some((qp - qm).normalized())
    }

    /// `b(x)` at polar angle `theta`, from the finite-difference tangent.
    fn b(&self, theta: f64) -> Option<Vec2> {
        let x = Vec2::from_angle(theta);
        let d = self.tangent(theta)?;
        let d = if self.form.omega(x, d) > 0.0 { d } else { -d };
        Some(d / self.gauge(d) + d / self.gauge(-d))
    }

    /// Support point maximizing `⟨·, g⟩`, by walking the vertex cycle uphill.
    fn support_walk(&self, g: Vec2) -> Vec2 {
        let n = self.verts.len();
        let val = |i: usize| self.verts[i % n].dot(g);
        let mut i = 0;
        loop {
            if val(i + 1) > val(i) {
                i = (i + 1) % n;
            } else if val(i + n - 1) > val(i) {
                i = (i + n - 1) % n;
            } else {
                break;
            }
        }
        self.verts[i] + g.normalized() * self.eps
    }

    fn f_in(&self, theta: f64) -> f64 {
        let x = Vec2::from_angle(theta);
        // ω(x, z) = ⟨z, s·x⊥⟩
        let g = Vec2::new(-x.y, x.x) * self.form.scale();
        let a_plus = self.support_walk(-g);
        let a_minus = self.support_walk(g);
        self.form.omega(a_plus, a_minus) / self.area()
    }

    fn dual_gauge(&self, v: Vec2, samples: &[(f64, Vec2)]) -> f64 {
        if v.x == 0.0 && v.y == 0.0 {
            return 0.0;
        }
        let f = |t: f64| self.form.omega(self.boundary(t), v);
        let (k, _) = samples
            .iter()
            .enumerate()
            .map(|(k, &(_, z))| (k, self.form.omega(z, v)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("samples");
        let h = TAU / samples.len() as f64;
        let t0 = samples[k].0;
        -golden(|t| -f(t), t0 - h, t0 + h, 1e-13).1
    }
}

/// Minimizes a unimodal `f` on `[lo, hi]`.
fn golden(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, width: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if hi - lo <= width {
            break;
        }
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Gauge by bisection on point membership.
pub fn gauge_bisect(ctx: &GaugeContext, x: Vec2) -> f64 {
    Raw::of(ctx).gauge(x)
}

/// Outcome of the definitional orthogonality test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridCheck {
    pub orthogonal: bool,
    /// `γ(x) − min_t γ(x + t·y)`, non-negative up to round-off.
    pub deficit: f64,
    pub argmin_t: f64,
}

/// Checks `γ(x) ≤ γ(x + t·y)` over a grid of `t` with golden refinement.
pub fn orthogonality_grid_check(
    ctx: &GaugeContext,
    x: Vec2,
    y: Vec2,
    cfg: &OracleConfig,
) -> GridCheck {
    let raw = Raw::of(ctx);
    let g = |t: f64| raw.gauge(x + y * t);
    let gx = raw.gauge(x);
    let span = 2.0 * (x.norm() / y.norm()).max(1.0);
    let m = cfg.t_grid.max(3);
    let step = 2.0 * span / (m - 1) as f64;
    let (k, _) = (0..m)
        .map(|k| (k, g(-span + step * k as f64)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("grid");
    let t0 = -span + step * k as f64;
    let (t, v) = golden(g, t0 - step, t0 + step, 1e-12);
    let (t, v) = if v < g(t0) { (t, v) } else { (t0, g(t0)) };
    let deficit = gx - v;
    GridCheck {
        orthogonal: deficit <= cfg.tol * gx.max(1.0),
        deficit,
        argmin_t: t,
    }
}

pub fn orthogonality_grid(ctx: &GaugeContext, x: Vec2, y: Vec2, cfg: &OracleConfig) -> bool {
    orthogonality_grid_check(ctx, x, y, cfg).orthogonal
}

/// Sampled lower bound for an asymmetry constant (`Which::Out`, `In`, `HatOut`).
pub fn constant_sampled(
    ctx: &GaugeContext,
    which: crate::asymmetry::Which,
    cfg: &OracleConfig,
) -> f64 {
    use crate::asymmetry::Which;
    let raw = Raw::of(ctx);
    let n = cfg.boundary_samples.max(1);
    let theta = |k: usize| TAU * (k as f64 + 0.5) / n as f64;
    let values: Vec<f64> = match which {
        Which::Out => cfg.exec.map_range(n, |k| {
            let t = theta(k);
            match (raw.b(t), raw.b(t + PI)) {
                (Some(b), Some(bp)) => (raw.form.omega(b, bp) / raw.area()).abs(),
                _ => 0.0,
            }
        }),
        Which::In => cfg.exec.map_range(n, |k| raw.f_in(theta(k)).abs()),
        Which::HatOut => {
            let samples: Vec<(f64, Vec2)> =
                (0..n).map(|k| (theta(k), raw.boundary(theta(k)))).collect();
            let dual_pts: Vec<Vec2> = cfg.exec.map_range(n, |k| {
                let u = Vec2::from_angle(theta(k));
                u / raw.dual_gauge(u, &samples)
            });
            let twice: f64 = (0..n)
                .map(|k| dual_pts[k].cross(dual_pts[(k + 1) % n]))
                .sum();
            let dual_area = 0.5 * twice * raw.form.scale().abs();
            cfg.exec.map_range(n, |k| {
                let t = theta(k);
                match (raw.b(t), raw.b(t + PI)) {
                    (Some(b), Some(bp)) => {
                        let bh = b / raw.dual_gauge(b, &samples);
                        let bph = bp / raw.dual_gauge(bp, &samples);
                        (raw.form.omega(bh, bph) / dual_area).abs()
                    }
                    _ => 0.0,
                }
            })
        }
    };
    values.into_iter().fold(0.0, f64::max)
}

/// `max_{z∈∂K} ω(z, v)` over sampled boundary points with golden refinement.
pub fn dual_gauge_sampled(ctx: &GaugeContext, v: Vec2, cfg: &OracleConfig) -> f64 {
    let raw = Raw::of(ctx);
    let n = cfg.boundary_samples.max(8);
    let samples: Vec<(f64, Vec2)> = (0..n)
        .map(|k| {
            let t = TAU * k as f64 / n as f64;
            (t, raw.boundary(t))
        })
        .collect();
    raw.dual_gauge(v, &samples)
}

/// Oracle `b(x)` at polar angle `theta`, for cross-checks of the `b` map.
pub fn b_sampled(ctx: &GaugeContext, theta: f64) -> Option<Vec2> {
    Raw::of(ctx).b(theta)
}

/// Oracle `(a⁺, a⁻)` for direction `x`.
pub fn a_walk(ctx: &GaugeContext, x: Vec2) -> (Vec2, Vec2) {
    let raw = Raw::of(ctx);
    let g = Vec2::new(-x.y, x.x) * raw.form.scale();
    (raw.support_walk(-g), raw.support_walk(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymmetry::Which;
    use crate::generators::hexagon;
    use crate::geometry::{ConvexPolygon, RoundedPolygon};

    fn square() -> ConvexPolygon {
        ConvexPolygon::from_points(&[[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]]).unwrap()
    }

    #[test]
    fn bisection_examples() {
        let sq = GaugeContext::standard(square());
        assert!((gauge_bisect(&sq, Vec2::new(2.0, 0.0)) - 2.0).abs() < 1e-12);
        let hex = GaugeContext::standard(hexagon(3.0).unwrap());
        assert!((gauge_bisect(&hex, Vec2::new(6.0, 0.0)) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn grid_examples() {
        let sq = GaugeContext::standard(square());
        let cfg = OracleConfig::default();
        assert!(orthogonality_grid(
            &sq,
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
            &cfg
        ));
        assert!(!orthogonality_grid(
            &sq,
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 0.0),
            &cfg
        ));
    }

    #[test]
    fn sampled_constants_and_dual_gauge() {
        let cfg = OracleConfig {
            boundary_samples: 2000,
            ..OracleConfig::default()
        };
        let sq = GaugeContext::standard(square());
        for w in [Which::Out, Which::In] {
            assert!(constant_sampled(&sq, w, &cfg) < 1e-9);
        }
        assert!((dual_gauge_sampled(&sq, Vec2::new(1.0, 0.0), &cfg) - 1.0).abs() < 1e-9);
        assert_eq!(dual_gauge_sampled(&sq, Vec2::ZERO, &cfg), 0.0);
        let r = GaugeContext::standard(RoundedPolygon::new(square(), 0.5).unwrap());
        assert!((dual_gauge_sampled(&r, Vec2::new(1.0, 0.0), &cfg) - 1.5).abs() < 1e-6);
    }
}
