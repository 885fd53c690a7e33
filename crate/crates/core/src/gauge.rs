//! Gauge evaluation, the symplectic dual body and its gauge, the antipode map.
//!
//! The dual body is `K^ω = {w : ω(z, w) ≤ 1 for all z ∈ K}`, so its gauge is
//! `γ_ω(v) = max_{z∈K} ω(z, v)` and the sandwich `ω(x, y) ≤ γ(x)·γ_ω(y)` holds
//! with equality exactly when the line through `x/γ(x)` in direction `y`
//! supports `K` and `ω(x, y) ≥ 0`.

use std::f64::consts::TAU;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::geometry::{
    area, ray_boundary, rounded_ray, Body, BoundaryPoint, ConvexPolygon, RoundedPolygon,
    SymplecticForm, Vec2, TOL_DEGENERATE,
};

/// Boundary samples kept for an implicit dual (plus its corner angles).
pub const DUAL_BOUNDARY_SAMPLES: usize = 4096;

/// A body with its symplectic form and cached derived data.
#[derive(Debug)]
pub struct GaugeContext {
    body: Body,
    form: SymplecticForm,
    area: f64,
    dual: OnceLock<Result<DualBody>>,
}

impl Clone for GaugeContext {
    fn clone(&self) -> Self {
        GaugeContext::new(self.body.clone(), self.form)
    }
}

impl GaugeContext {
    pub fn new(body: impl Into<Body>, form: SymplecticForm) -> Self {
        let body = body.into();
        let area = area(&body, form);
        GaugeContext {
            body,
            form,
            area,
            dual: OnceLock::new(),
        }
    }

    /// Context with the standard form `s = 1`.
    pub fn standard(body: impl Into<Body>) -> Self {
        GaugeContext::new(body, SymplecticForm::STANDARD)
    }

    pub fn body(&self) -> &Body {
        &self.body
    }

    pub fn form(&self) -> SymplecticForm {
        self.form
    }

    /// `λ_ω(K)`.
    pub fn area(&self) -> f64 {
        self.area
    }

    #[inline]
    pub fn omega(&self, u: Vec2, v: Vec2) -> f64 {
        self.form.omega(u, v)
    }

    #[inline]
    pub fn gauge(&self, x: Vec2) -> f64 {
        gauge_eval(self, x)
    }

    #[inline]
    pub fn dual_gauge(&self, v: Vec2) -> f64 {
        dual_gauge_eval(self, v)
    }

    /// The dual body, built on first use.
    pub fn dual(&self) -> Result<&DualBody> {
        self.dual
            .get_or_init(|| build_dual(&self.body, self.form))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// `λ_ω(K^ω)`.
    pub fn dual_area(&self) -> Result<f64> {
        Ok(self.dual()?.lebesgue_area() * self.form.scale().abs())
    }

    /// Context on the dual polygon with the same form. Only polygonal bodies
    /// have an explicit dual.
    pub fn dual_context(&self) -> Result<GaugeContext> {
        match self.dual()? {
            DualBody::Polygon(p) => Ok(GaugeContext::new(p.clone(), self.form)),
            DualBody::Implicit(_) => Err(GeomError::InvalidArgument(
                "dual of a rounded body has no polygon context".into(),
            )),
        }
    }
}

/// `γ_K(x)`.
pub fn gauge_eval(ctx: &GaugeContext, x: Vec2) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    match &ctx.body {
        Body::Polygon(p) => p.gauge(x),
        Body::Rounded(r) if r.radius() == 0.0 => r.core().gauge(x),
        Body::Rounded(r) => 1.0 / rounded_ray(r, x).0,
    }
}

/// Direction `g` with `ω(z, v) = ⟨z, g⟩` for every `z`.
#[inline]
fn omega_covector(form: SymplecticForm, v: Vec2) -> Vec2 {
    Vec2::new(v.y, -v.x) * form.scale()
}

/// `γ_ω(v) = max_{z∈K} ω(z, v)`, the support function of `K` at a quarter turn of `s·v`.
pub fn dual_gauge_eval(ctx: &GaugeContext, v: Vec2) -> f64 {
    body_dual_gauge(&ctx.body, ctx.form, v)
}

fn body_dual_gauge(body: &Body, form: SymplecticForm, v: Vec2) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    body.support(omega_covector(form, v))
}

/// The dual body of a gauge context.
#[derive(Debug, Clone, PartialEq)]
pub enum DualBody {
    /// Exact dual of a polygon: one vertex per source edge.
    Polygon(ConvexPolygon),
    /// Dual of a rounded polygon, kept through its gauge.
    Implicit(ImplicitDual),
}

impl DualBody {
    pub fn gauge(&self, v: Vec2) -> f64 {
        match self {
            DualBody::Polygon(p) => p.gauge(v),
            DualBody::Implicit(d) => d.gauge(v),
        }
    }

    pub fn lebesgue_area(&self) -> f64 {
        match self {
            DualBody::Polygon(p) => p.lebesgue_area(),
            DualBody::Implicit(d) => d.area,
        }
    }

    /// Counterclockwise boundary points (exact vertices, or the sampled polyline).
    pub fn boundary_points(&self) -> &[Vec2] {
        match self {
            DualBody::Polygon(p) => p.vertices(),
            DualBody::Implicit(d) => &d.boundary,
        }
    }

    pub fn as_polygon(&self) -> Option<&ConvexPolygon> {
        match self {
            DualBody::Polygon(p) => Some(p),
            DualBody::Implicit(_) => None,
        }
    }
}

/// Dual of `core ⊕ εB`: `γ_ω(v) = max_i ω(v_i, v) + ε|s|·|v|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImplicitDual {
    source: RoundedPolygon,
    form: SymplecticForm,
    boundary: Vec<Vec2>,
    area: f64,
}

impl ImplicitDual {
    fn new(source: RoundedPolygon, form: SymplecticForm) -> Self {
        let body = Body::Rounded(source.clone());
        let g = |v: Vec2| body_dual_gauge(&body, form, v);
        let kinks = dual_kink_angles(source.core());

        let mut angles: Vec<f64> = (0..DUAL_BOUNDARY_SAMPLES)
            .map(|k| TAU * k as f64 / DUAL_BOUNDARY_SAMPLES as f64)
            .chain(kinks.iter().copied())
            .collect();
        angles.sort_by(f64::total_cmp);
        angles.dedup_by(|a, b| (*a - *b).abs() <= TOL_DEGENERATE);
        let boundary = angles
            .iter()
            .map(|&t| {
                let u = Vec2::from_angle(t);
                u / g(u)
            })
            .collect();

        let area = polar_area(&g, &kinks);
        ImplicitDual {
            source,
            form,
            boundary,
            area,
        }
    }

    pub fn gauge(&self, v: Vec2) -> f64 {
        if v.is_zero() {
            return 0.0;
        }
        let c = self.source.core();
        let s = self.form.scale();
        let m = c
            .vertices()
            .iter()
            .map(|&z| s * z.cross(v))
            .fold(f64::NEG_INFINITY, f64::max);
        m + self.source.radius() * s.abs() * v.norm()
    }

    /// Lebesgue area from polar quadrature.
    pub fn lebesgue_area(&self) -> f64 {
        self.area
    }

    pub fn boundary(&self) -> &[Vec2] {
        &self.boundary
    }
}

/// Angles where the maximizing core vertex of `v ↦ max ω(z, v)` switches:
/// the directions `±e_i` of the core edges.
fn dual_kink_angles(core: &ConvexPolygon) -> Vec<f64> {
    let mut a: Vec<f64> = (0..core.len())
        .flat_map(|i| {
            let e = core.edge_vector(i);
            [e.angle(), (-e).angle()]
        })
        .collect();
    a.sort_by(f64::total_cmp);
    a.dedup_by(|x, y| (*x - *y).abs() <= TOL_DEGENERATE);
    a
}

/// Lebesgue area of `{g ≤ 1}` as `½∫ g(u(θ))^{-2} dθ`, integrated piecewise
/// between the kinks of `g` where the integrand is analytic.
fn polar_area(g: &dyn Fn(Vec2) -> f64, kinks: &[f64]) -> f64 {
    let f = |t: f64| g(Vec2::from_angle(t)).powi(-2);
    let mut cuts: Vec<f64> = kinks.to_vec();
    if cuts.is_empty() {
        cuts.push(0.0);
    }
    let m = cuts.len();
    let mut total = 0.0;
    for k in 0..m {
        let a = cuts[k];
        let b = if k + 1 < m {
            cuts[k + 1]
        } else {
            cuts[0] + TAU
        };
        total += simpson_adaptive(&f, a, b);
    }
    0.5 * total
}

/// Composite Simpson on `2^k` panels, doubled until successive values agree.
fn simpson_adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let mut n = 16usize;
    let h = (b - a) / n as f64;
    let ends = f(a) + f(b);
    let mut odd: f64 = (0..n / 2).map(|i| f(a + (2 * i + 1) as f64 * h)).sum();
    let mut even: f64 = (1..n / 2).map(|i| f(a + (2 * i) as f64 * h)).sum();
    let mut prev = (ends + 4.0 * odd + 2.0 * even) * h / 3.0;
    loop {
        n *= 2;
        let h = (b - a) / n as f64;
        even += odd;
        odd = (0..n / 2).map(|i| f(a + (2 * i + 1) as f64 * h)).sum();
        let cur = (ends + 4.0 * odd + 2.0 * even) * h / 3.0;
        if (cur - prev).abs() <= 1e-13 * cur.abs() || n >= 1 << 20 {
            return cur;
        }
        prev = cur;
    }
}

fn build_dual(body: &Body, form: SymplecticForm) -> Result<DualBody> {
    match body.as_polygon() {
        Some(p) => Ok(DualBody::Polygon(polygon_dual(p, form)?)),
        None => match body {
            Body::Rounded(r) => Ok(DualBody::Implicit(ImplicitDual::new(r.clone(), form))),
            Body::Polygon(_) => unreachable!("as_polygon covers polygons"),
        },
    }
}

/// Dual polygon vertex `w_i` solves `ω(v_i, w) = ω(v_{i+1}, w) = 1`, giving
/// `w_i = e_i / (s·(v_i × v_{i+1}))`.
pub fn polygon_dual(p: &ConvexPolygon, form: SymplecticForm) -> Result<ConvexPolygon> {
    let n = p.len();
    let mut w = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = (p.vertex(i), p.vertex(i + 1));
        let det = form.omega(a, b);
        if det.abs() <= TOL_DEGENERATE * a.norm() * b.norm() * form.scale().abs() {
            return Err(GeomError::DegenerateSystem { edge: i });
        }
        w.push((b - a) / det);
    }
    ConvexPolygon::new(w).map_err(|_| GeomError::DegenerateSystem { edge: 0 })
}

/// Builds (or fetches) the dual of a context's body.
pub fn dual_body(ctx: &GaugeContext) -> Result<DualBody> {
    ctx.dual().cloned()
}

/// `p(x) = −x/γ(−x)`, with its locus.
pub fn antipode_p(ctx: &GaugeContext, x: Vec2) -> Result<BoundaryPoint> {
    if x.is_zero() {
        return Err(GeomError::ZeroVector);
    }
    ray_boundary(&ctx.body, -x)
}

/// `d_γ(a, b) = γ(b − a)`.
pub fn gauge_distance(ctx: &GaugeContext, a: Vec2, b: Vec2) -> f64 {
    gauge_eval(ctx, b - a)
}

/// Worst violations of the gauge axioms over random samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaugeAxiomReport {
    pub samples: usize,
    /// `γ(0)` plus any non-positive value at a non-zero vector.
    pub nondegeneracy: f64,
    /// `max |γ(αx) − αγ(x)| / max(1, αγ(x))`.
    pub homogeneity: f64,
    /// `max (γ(x + y) − γ(x) − γ(y))⁺ / max(1, γ(x) + γ(y))`.
    pub subadditivity: f64,
}

impl GaugeAxiomReport {
    pub fn max_violation(&self) -> f64 {
        self.nondegeneracy
            .max(self.homogeneity)
            .max(self.subadditivity)
    }
}

pub fn check_gauge_axioms(ctx: &GaugeContext, samples: usize, seed: u64) -> GaugeAxiomReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vec =
        |rng: &mut ChaCha8Rng| Vec2::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
    let mut rep = GaugeAxiomReport {
        samples,
        nondegeneracy: gauge_eval(ctx, Vec2::ZERO).abs(),
        homogeneity: 0.0,
        subadditivity: 0.0,
    };
    for _ in 0..samples {
        let x = vec(&mut rng);
        let y = vec(&mut rng);
        let alpha: f64 = rng.random_range(0.0..10.0);
        let gx = gauge_eval(ctx, x);
        let gy = gauge_eval(ctx, y);
        if !x.is_zero() && gx <= 0.0 {
            rep.nondegeneracy = rep.nondegeneracy.max(1.0 - gx);
        }
        let h = (gauge_eval(ctx, x * alpha) - alpha * gx).abs() / (alpha * gx).max(1.0);
        rep.homogeneity = rep.homogeneity.max(h);
        let s = (gauge_eval(ctx, x + y) - gx - gy).max(0.0) / (gx + gy).max(1.0);
        rep.subadditivity = rep.subadditivity.max(s);
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::hexagon;
    use crate::geometry::Locus;

    fn square() -> ConvexPolygon {
        ConvexPolygon::from_points(&[[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]]).unwrap()
    }

    fn triangle() -> ConvexPolygon {
        ConvexPolygon::from_points(&[[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]]).unwrap()
    }

    #[test]
    fn gauge_examples() {
        let sq = GaugeContext::standard(square());
        assert_eq!(sq.gauge(Vec2::new(2.0, 0.0)), 2.0);
        assert_eq!(sq.gauge(Vec2::ZERO), 0.0);
        let hex = GaugeContext::standard(hexagon(3.0).unwrap());
        assert!((hex.gauge(Vec2::new(6.0, 0.0)) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn dual_gauge_examples() {
        let sq = GaugeContext::standard(square());
        assert_eq!(sq.dual_gauge(Vec2::new(1.0, 0.0)), 1.0);
        assert_eq!(sq.dual_gauge(Vec2::ZERO), 0.0);
        let r = GaugeContext::standard(RoundedPolygon::new(square(), 0.5).unwrap());
        assert!((r.dual_gauge(Vec2::new(1.0, 0.0)) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn dual_examples() {
        let sq = GaugeContext::standard(square());
        let d = sq.dual().unwrap().as_polygon().unwrap().clone();
        let mut v: Vec<[f64; 2]> = d.vertices().iter().map(|&w| w.into()).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(v, vec![[-1.0, 0.0], [0.0, -1.0], [0.0, 1.0], [1.0, 0.0]]);

        let tri = GaugeContext::standard(triangle());
        let dual = tri.dual().unwrap().as_polygon().unwrap().clone();
        assert_eq!(dual.len(), 3);
        for &w in dual.vertices() {
            let m = triangle()
                .vertices()
                .iter()
                .map(|&z| z.cross(w))
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((m - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bidual_is_negation() {
        for form in [SymplecticForm::STANDARD, SymplecticForm::new(-2.5).unwrap()] {
            let ctx = GaugeContext::new(hexagon(3.0).unwrap(), form);
            let bi = ctx.dual_context().unwrap().dual_context().unwrap();
            let bi = bi.body().core().vertices().to_vec();
            let neg = ctx.body().core().negated();
            assert_eq!(bi.len(), neg.len());
            for w in &bi {
                let d = neg
                    .vertices()
                    .iter()
                    .map(|v| v.distance(*w))
                    .fold(f64::INFINITY, f64::min);
                assert!(d < 1e-12, "{d}");
            }
        }
    }

    #[test]
    fn implicit_dual_area_matches_polygon_limit() {
        // Rounding radius zero is exactly polygonal; a tiny radius must be close.
        let ctx = GaugeContext::standard(square());
        let exact = ctx.dual_area().unwrap();
        assert_eq!(exact, 2.0);
        let r = GaugeContext::standard(RoundedPolygon::new(square(), 1e-9).unwrap());
        assert!((r.dual_area().unwrap() - exact).abs() < 1e-7);
        for w in r.dual().unwrap().boundary_points() {
            assert!((r.dual().unwrap().gauge(*w) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn implicit_dual_of_disk() {
        // A tiny core rounded by 1 is nearly the unit disk, whose dual is the unit disk.
        let core = ConvexPolygon::from_points(&[[1e-6, 0.0], [0.0, 1e-6], [-1e-6, -1e-6]]).unwrap();
        let ctx = GaugeContext::standard(RoundedPolygon::new(core, 1.0).unwrap());
        assert!((ctx.dual_area().unwrap() - std::f64::consts::PI).abs() < 1e-4);
    }

    #[test]
    fn antipode_examples() {
        let hex = GaugeContext::standard(hexagon(3.0).unwrap());
        let p = antipode_p(&hex, Vec2::new(0.0, -1.0)).unwrap();
        assert_eq!(p.point, Vec2::new(0.0, 1.0));
        assert!(matches!(p.locus, Locus::Vertex { .. }));
        let sq = GaugeContext::standard(square());
        let p = antipode_p(&sq, Vec2::new(1.0, 0.5)).unwrap();
        assert_eq!(p.point, Vec2::new(-1.0, -0.5));
        assert_eq!(antipode_p(&sq, Vec2::ZERO), Err(GeomError::ZeroVector));
    }

    #[test]
    fn axioms_and_distance() {
        for ctx in [
            GaugeContext::standard(square()),
            GaugeContext::standard(hexagon(3.0).unwrap()),
        ] {
            assert!(check_gauge_axioms(&ctx, 1000, 5).max_violation() <= 1e-12);
        }
        let hex = GaugeContext::standard(hexagon(3.0).unwrap());
        let e = Vec2::new(3.0, 0.0);
        assert_eq!(gauge_distance(&hex, e, e), 0.0);
        assert!((gauge_distance(&hex, Vec2::ZERO, e) - 1.0).abs() < 1e-15);
        assert!((gauge_distance(&hex, e, Vec2::ZERO) - 3.0).abs() < 1e-15);
    }
}
