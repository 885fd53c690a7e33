//! Orthogonality `x ⊣ y` and the boundary maps `b±` (supporting-line
//! directions) and `a±` (support points).

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::gauge::GaugeContext;
use crate::geometry::{ray_boundary, Body, Locus, Vec2, TOL_GEOM};

/// Angular tolerance for refusing edge-parallel support queries.
pub const TOL_PARALLEL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrthogonalityWitness {
    pub x: Vec2,
    /// The certifying sign of `y` (`ω(x, y) ≥ 0`).
    pub y: Vec2,
    pub equality_residual: f64,
}

/// Decides `x ⊣ y` through the equality case of `ω(x, y) ≤ γ(x)·γ_ω(y)`.
pub fn is_orthogonal(ctx: &GaugeContext, x: Vec2, y: Vec2) -> Result<(bool, OrthogonalityWitness)> {
    if x.is_zero() || y.is_zero() {
        return Err(GeomError::ZeroVector);
    }
    let y = if ctx.omega(x, y) >= 0.0 { y } else { -y };
    let lhs = ctx.omega(x, y);
    let rhs = ctx.gauge(x) * ctx.dual_gauge(y);
    let residual = (rhs - lhs).abs();
    let ok = residual <= TOL_GEOM * rhs.max(1.0);
    Ok((
        ok,
        OrthogonalityWitness {
            x,
            y,
            equality_residual: residual,
        },
    ))
}

/// Unit tangent `d` at `x/γ(x)`, oriented so that `ω(x, d) > 0`.
fn oriented_tangent(ctx: &GaugeContext, x: Vec2) -> Result<Vec2> {
    if x.is_zero() {
        return Err(GeomError::ZeroVector);
    }
    let bp = ray_boundary(ctx.body(), x)?;
    let d = match (bp.locus, bp.tangent(ctx.body())) {
        (Locus::Vertex { index }, _) => return Err(GeomError::NonSmoothPoint { vertex: index }),
        (_, Some(d)) => d,
        (_, None) => unreachable!("non-vertex loci have tangents"),
    };
    Ok(if ctx.omega(x, d) > 0.0 { d } else { -d })
}

fn to_boundary(ctx: &GaugeContext, v: Vec2) -> Vec2 {
    v / ctx.gauge(v)
}

/// The point of `∂K` in the supporting direction at `x/γ(x)` with `ω(x, b⁺) > 0`.
pub fn b_plus(ctx: &GaugeContext, x: Vec2) -> Result<Vec2> {
    let d = oriented_tangent(ctx, x)?;
    Ok(to_boundary(ctx, d))
}

/// As [`b_plus`] with `ω(x, b⁻) < 0`.
pub fn b_minus(ctx: &GaugeContext, x: Vec2) -> Result<Vec2> {
    let d = oriented_tangent(ctx, x)?;
    Ok(to_boundary(ctx, -d))
}

/// `b(x) = b⁺(x) − b⁻(x)`.
pub fn b_map(ctx: &GaugeContext, x: Vec2) -> Result<Vec2> {
    let d = oriented_tangent(ctx, x)?;
    Ok(to_boundary(ctx, d) - to_boundary(ctx, -d))
}

/// Unit `ĝ` with `ω(x, z) = |g|·⟨z, ĝ⟩`; refuses edge-parallel `x`.
fn support_covector(ctx: &GaugeContext, x: Vec2) -> Result<Vec2> {
    if x.is_zero() {
        return Err(GeomError::ZeroVector);
    }
    let core = ctx.body().core();
    let xh = x.normalized();
    for i in 0..core.len() {
        let e = core.edge_vector(i).normalized();
        if xh.cross(e).abs() < TOL_PARALLEL {
            return Err(GeomError::SupportNotUnique { edge: i });
        }
    }
    Ok(x.perp().normalized() * ctx.form().orientation())
}

/// The unique maximizer of `⟨·, u⟩` on the body.
fn argmax_support(body: &Body, u: Vec2) -> Vec2 {
    let core = body.core();
    let mut best = core.vertex(0);
    let mut val = best.dot(u);
    for &v in &core.vertices()[1..] {
        let d = v.dot(u);
        if d > val {
            val = d;
            best = v;
        }
    }
    best + u * body.radius()
}

/// `a⁺(x) = argmin_{z∈K} ω(x, z)`, so `ω(a⁺(x), x) > 0`.
pub fn a_plus(ctx: &GaugeContext, x: Vec2) -> Result<Vec2> {
    let g = support_covector(ctx, x)?;
    Ok(argmax_support(ctx.body(), -g))
}

/// `a⁻(x) = argmax_{z∈K} ω(x, z)`.
pub fn a_minus(ctx: &GaugeContext, x: Vec2) -> Result<Vec2> {
    let g = support_covector(ctx, x)?;
    Ok(argmax_support(ctx.body(), g))
}
