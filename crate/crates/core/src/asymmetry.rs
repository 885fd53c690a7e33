//! The outer, inner and normalized outer asymmetry functions and their
//! constants.
//!
//! On polygons every function is piecewise constant in the polar angle, so the
//! constants are exact maxima over piece (or sector) midpoints. On rounded
//! bodies the same breakpoints split the circle into smooth pieces, which are
//! sampled and then refined by golden-section search.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::exec::Exec;
use crate::gauge::GaugeContext;
use crate::geometry::{ray_boundary, Body, Vec2, TOL_DEGENERATE};
use crate::orthogonality::{a_minus, a_plus, b_map, b_plus, is_orthogonal};

/// Breakpoints closer than this (in radians) are merged.
pub const TOL_MERGE: f64 = 1e-12;

/// Values at or below this are treated as zero when locating sign changes.
const TOL_ZERO: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Out,
    In,
    HatOut,
}

impl Which {
    pub const ALL: [Which; 3] = [Which::Out, Which::In, Which::HatOut];

    pub fn name(self) -> &'static str {
        match self {
            Which::Out => "c_out",
            Which::In => "c_in",
            Which::HatOut => "c_hat_out",
        }
    }
}

/// `f_out(x) = ω(b(x), b(p(x))) / λ_ω(K)`. Only the direction of `x` matters.
pub fn f_out(ctx: &GaugeContext, x: Vec2) -> Result<f64> {
    let b = b_map(ctx, x)?;
    let bp = b_map(ctx, -x)?;
    Ok(ctx.omega(b, bp) / ctx.area())
}

/// `f_in(x) = ω(a⁺(x), a⁻(x)) / λ_ω(K)`.
pub fn f_in(ctx: &GaugeContext, direction: Vec2) -> Result<f64> {
    let ap = a_plus(ctx, direction)?;
    let am = a_minus(ctx, direction)?;
    Ok(ctx.omega(ap, am) / ctx.area())
}

/// `f̂_out(x) = ω(b̂(x), b̂(p(x))) / λ_ω(K^ω)` with `b̂ = b / γ_ω(b)`.
pub fn f_hat_out(ctx: &GaugeContext, x: Vec2) -> Result<f64> {
    let hat = |v: Vec2| -> Result<Vec2> {
        let b = b_map(ctx, v)?;
        Ok(b / ctx.dual_gauge(b))
    };
    let (b, bp) = (hat(x)?, hat(-x)?);
    Ok(ctx.omega(b, bp) / ctx.dual_area()?)
}

/// Evaluates the chosen function at polar angle `theta`.
pub fn f_at(ctx: &GaugeContext, which: Which, theta: f64) -> Result<f64> {
    let u = Vec2::from_angle(theta);
    match which {
        Which::Out => f_out(ctx, u),
        Which::In => f_in(ctx, u),
        Which::HatOut => f_hat_out(ctx, u),
    }
}

/// `2·λ_ω` of the quadrilateral `b⁺(x), b⁻(p(x)), b⁻(x), b⁺(p(x))`, by shoelace.
pub fn quadrilateral_ratio(ctx: &GaugeContext, x: Vec2) -> Result<f64> {
    let pts = [
        b_plus(ctx, x)?,
        crate::orthogonality::b_minus(ctx, -x)?,
        crate::orthogonality::b_minus(ctx, x)?,
        b_plus(ctx, -x)?,
    ];
    let twice: f64 = (0..4).map(|i| pts[i].cross(pts[(i + 1) % 4])).sum();
    Ok(twice.abs() * ctx.form().scale().abs() / ctx.area())
}

/// One open arc of polar angles on which a function is constant (polygons) or smooth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Piece {
    pub start: f64,
    pub end: f64,
    pub mid: f64,
    /// Function value at the midpoint.
    pub value: f64,
}

/// Circular breakpoint list in polar angle with per-piece midpoint values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub which: Which,
    /// Sorted angles in `[0, 2π)`.
    pub breakpoints: Vec<f64>,
    pub pieces: Vec<Piece>,
}

/// Pieces of `∂K` for `f_out` and `f̂_out`.
pub type PieceDecomposition = Decomposition;
/// Direction sectors for `f_in`.
pub type SectorDecomposition = Decomposition;

fn normalize_angle(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

fn merged_breakpoints(mut angles: Vec<f64>) -> Vec<f64> {
    for a in angles.iter_mut() {
        *a = normalize_angle(*a);
    }
    angles.sort_by(f64::total_cmp);
    angles.dedup_by(|a, b| (*a - *b).abs() <= TOL_MERGE);
    if angles.len() > 1 && angles[0] + TAU - angles[angles.len() - 1] <= TOL_MERGE {
        angles.pop();
    }
    angles
}

/// Breakpoint angles where the combinatorics of `f_out` change: the polar
/// angles of boundary corners (polygon vertices, or arc/edge junctions of a
/// rounded body), together with their antipodal directions.
pub fn outer_breakpoints(body: &Body) -> Vec<f64> {
    let core = body.core();
    let eps = body.radius();
    let n = core.len();
    let mut a = Vec::with_capacity(4 * n);
    for i in 0..n {
        let v = core.vertex(i);
        if eps == 0.0 {
            a.push(v.angle());
        } else {
            let prev = core.normals()[(i + n - 1) % n];
            let next = core.normals()[i];
            a.push((v + prev * eps).angle());
            a.push((v + next * eps).angle());
        }
    }
    let anti: Vec<f64> = a.iter().map(|t| t + PI).collect();
    a.extend(anti);
    merged_breakpoints(a)
}

/// Directions `±e_i` of the core edges, where `a±` jump.
pub fn sector_breakpoints(body: &Body) -> Vec<f64> {
    let core = body.core();
    let a = (0..core.len())
        .flat_map(|i| {
            let e = core.edge_vector(i);
            [e.angle(), e.angle() + PI]
        })
        .collect();
    merged_breakpoints(a)
}

fn breakpoints_for(body: &Body, which: Which) -> Vec<f64> {
    match which {
        Which::Out | Which::HatOut => outer_breakpoints(body),
        Which::In => sector_breakpoints(body),
    }
}

fn arcs(bp: &[f64]) -> Vec<(f64, f64)> {
    let m = bp.len();
    (0..m)
        .map(|k| {
            let a = bp[k];
            let b = if k + 1 < m { bp[k + 1] } else { bp[0] + TAU };
            (a, b)
        })
        .collect()
}

/// Breakpoints with the function evaluated at each piece midpoint.
pub fn decompose(ctx: &GaugeContext, which: Which, exec: Exec) -> Result<Decomposition> {
    if which == Which::HatOut {
        ctx.dual_area()?;
    }
    let breakpoints = breakpoints_for(ctx.body(), which);
    let spans = arcs(&breakpoints);
    let values = exec.map(&spans, |&(a, b)| {
        let mid = 0.5 * (a + b);
        f_at(ctx, which, mid).map(|value| Piece {
            start: a,
            end: b,
            mid,
            value,
        })
    });
    let pieces = values.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(Decomposition {
        which,
        breakpoints,
        pieces,
    })
}

pub fn piece_decomposition(ctx: &GaugeContext) -> Result<PieceDecomposition> {
    decompose(ctx, Which::Out, Exec::default())
}

pub fn sector_decomposition(ctx: &GaugeContext) -> Result<SectorDecomposition> {
    decompose(ctx, Which::In, Exec::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    /// Midpoint evaluation of a piecewise-constant function.
    ExactPiecewise { pieces: usize },
    /// Per-piece sampling followed by golden-section refinement.
    Sampled {
        pieces: usize,
        samples_per_piece: usize,
        refine_width: f64,
    },
}

/// Where the maximum is attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    /// Polar angle in `[0, 2π)`.
    pub angle: f64,
    /// The boundary point in that direction.
    pub point: Vec2,
    /// Signed function value there.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymmetryReport {
    pub which: Which,
    /// The constant (a supremum of `|f|`).
    pub value: f64,
    pub witness: Witness,
    pub method: Method,
    /// Reported accuracy: round-off scale for exact results, the refinement
    /// width for sampled ones.
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantOptions {
    pub samples_per_piece: usize,
    pub refine_width: f64,
    pub exec: Exec,
}

impl Default for ConstantOptions {
    fn default() -> Self {
        ConstantOptions {
            samples_per_piece: 64,
            refine_width: 1e-9,
            exec: Exec::default(),
        }
    }
}

/// Candidate maximum: larger `|value|` wins, then the smaller angle.
#[derive(Debug, Clone, Copy)]
struct Best {
    abs: f64,
    angle: f64,
    value: f64,
}

impl Best {
    const NONE: Best = Best {
        abs: f64::NEG_INFINITY,
        angle: f64::INFINITY,
        value: 0.0,
    };

    fn at(angle: f64, value: f64) -> Best {
        Best {
            abs: value.abs(),
            angle: normalize_angle(angle),
            value,
        }
    }

    fn better(self, o: Best) -> Best {
        if o.abs > self.abs || (o.abs == self.abs && o.angle < self.angle) {
            o
        } else {
            self
        }
    }
}

fn report(
    ctx: &GaugeContext,
    which: Which,
    best: Best,
    method: Method,
    tolerance: f64,
) -> Result<AsymmetryReport> {
    let point = ray_boundary(ctx.body(), Vec2::from_angle(best.angle))?.point;
    Ok(AsymmetryReport {
        which,
        value: best.abs.max(0.0),
        witness: Witness {
            angle: best.angle,
            point,
            value: best.value,
        },
        method,
        tolerance,
    })
}

/// The constant `sup |f|` for the chosen function.
pub fn constant_with(
    ctx: &GaugeContext,
    which: Which,
    opts: &ConstantOptions,
) -> Result<AsymmetryReport> {
    if ctx.body().as_polygon().is_some() {
        let dec = decompose(ctx, which, opts.exec)?;
        let best = dec
            .pieces
            .iter()
            .map(|p| Best::at(p.mid, p.value))
            .fold(Best::NONE, Best::better);
        let tol = 64.0 * f64::EPSILON * best.abs.max(1.0);
        report(
            ctx,
            which,
            best,
            Method::ExactPiecewise {
                pieces: dec.pieces.len(),
            },
            tol,
        )
    } else {
        sampled_constant(ctx, which, opts)
    }
}

fn sampled_constant(
    ctx: &GaugeContext,
    which: Which,
    opts: &ConstantOptions,
) -> Result<AsymmetryReport> {
    if which == Which::HatOut {
        ctx.dual_area()?;
    }
    let m = opts.samples_per_piece.max(1);
    let spans = arcs(&breakpoints_for(ctx.body(), which));
    let eval = |t: f64| f_at(ctx, which, t).ok();
    let per_piece = opts.exec.map(&spans, |&(a, b)| {
        let h = (b - a) / m as f64;
        let mut best = Best::NONE;
        let mut best_k = 0;
        for k in 0..m {
            let t = a + (k as f64 + 0.5) * h;
            if let Some(v) = eval(t) {
                let cand = Best::at(t, v);
                if cand.abs > best.abs {
                    best = cand;
                    best_k = k;
                }
            }
        }
        if best.abs == f64::NEG_INFINITY {
            return best;
        }
        let t0 = a + (best_k as f64 + 0.5) * h;
        let lo = (t0 - h).max(a);
        let hi = (t0 + h).min(b);
        let (t, v) = golden_max(
            |t| eval(t).map_or(f64::NEG_INFINITY, f64::abs),
            lo,
            hi,
            opts.refine_width,
        );
        if v > best.abs {
            if let Some(val) = eval(t) {
                return best.better(Best::at(t, val));
            }
        }
        best
    });
    let best = per_piece.into_iter().fold(Best::NONE, Best::better);
    report(
        ctx,
        which,
        best,
        Method::Sampled {
            pieces: spans.len(),
            samples_per_piece: m,
            refine_width: opts.refine_width,
        },
        opts.refine_width,
    )
}

/// Golden-section search for a maximum of a unimodal `g` on `[lo, hi]`.
pub(crate) fn golden_max(
    g: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    width: f64,
) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    let mut gc = g(c);
    let mut gd = g(d);
    while hi - lo > width {
        if gc >= gd {
            hi = d;
            d = c;
            gd = gc;
            c = hi - r * (hi - lo);
            gc = g(c);
        } else {
            lo = c;
            c = d;
            gc = gd;
            d = lo + r * (hi - lo);
            gd = g(d);
        }
    }
    if gc >= gd {
        (c, gc)
    } else {
        (d, gd)
    }
}

pub fn c_out(ctx: &GaugeContext) -> Result<AsymmetryReport> {
    constant_with(ctx, Which::Out, &ConstantOptions::default())
}

pub fn c_in(ctx: &GaugeContext) -> Result<AsymmetryReport> {
    constant_with(ctx, Which::In, &ConstantOptions::default())
}

pub fn c_hat_out(ctx: &GaugeContext) -> Result<AsymmetryReport> {
    constant_with(ctx, Which::HatOut, &ConstantOptions::default())
}

/// A pair with `x ⊣ y` and `−x ⊣ y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CommonOrthogonal {
    /// A point of `∂K`.
    pub x: Vec2,
    pub y: Vec2,
    pub residual: f64,
}

fn check_pair(ctx: &GaugeContext, x: Vec2, y: Vec2) -> Option<CommonOrthogonal> {
    if x.is_zero() || y.is_zero() {
        return None;
    }
    let (ok1, w1) = is_orthogonal(ctx, x, y).ok()?;
    let (ok2, w2) = is_orthogonal(ctx, -x, y).ok()?;
    (ok1 && ok2).then_some(CommonOrthogonal {
        x,
        y,
        residual: w1.equality_residual.max(w2.equality_residual),
    })
}

fn boundary_at(ctx: &GaugeContext, theta: f64) -> Option<Vec2> {
    ray_boundary(ctx.body(), Vec2::from_angle(theta))
        .ok()
        .map(|b| b.point)
}

/// Candidate pairs at a polar angle, for outer or inner searches.
fn candidates_at(
    ctx: &GaugeContext,
    which: Which,
    theta: f64,
    neighbours: &[f64],
) -> Vec<(Vec2, Vec2)> {
    let mut out = Vec::new();
    match which {
        Which::In => {
            let dir = Vec2::from_angle(theta);
            for &t in std::iter::once(&theta).chain(neighbours) {
                let u = Vec2::from_angle(t);
                for a in [a_plus(ctx, u), a_minus(ctx, u)].into_iter().flatten() {
                    out.push((a, dir));
                }
            }
        }
        _ => {
            if let Some(x) = boundary_at(ctx, theta) {
                for &t in std::iter::once(&theta).chain(neighbours) {
                    for s in [0.0, PI] {
                        if let Ok(y) = b_plus(ctx, Vec2::from_angle(t + s)) {
                            out.push((x, y));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Bisects a sign change of `f` on `[a, b]` down to floating-point resolution.
fn bisect_zero(f: impl Fn(f64) -> Option<f64>, mut a: f64, mut b: f64, fa: f64) -> f64 {
    let sa = fa.signum();
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        match f(m) {
            Some(0.0) => return m,
            Some(v) if v.signum() == sa => a = m,
            Some(_) => b = m,
            None => break,
        }
    }
    0.5 * (a + b)
}

/// Finds `x ∈ ∂K` and `y` with `x ⊣ y` and `−x ⊣ y`, from a zero or a sign
/// change of `f_out` around the boundary.
pub fn find_common_orthogonal(ctx: &GaugeContext) -> Result<CommonOrthogonal> {
    common_orthogonal(ctx, Which::Out)
}

/// As [`find_common_orthogonal`] but driven by sign changes of `f_in`; `y`
/// is a direction whose two supporting lines touch `K` at `x` and at a
/// negative multiple of `x`.
pub fn find_common_orthogonal_inner(ctx: &GaugeContext) -> Result<CommonOrthogonal> {
    common_orthogonal(ctx, Which::In)
}

fn common_orthogonal(ctx: &GaugeContext, which: Which) -> Result<CommonOrthogonal> {
    let smooth = ctx.body().as_polygon().is_none();
    let spans = arcs(&breakpoints_for(ctx.body(), which));
    // Samples ordered around the circle, with the index of their span.
    let per = if smooth { 16 } else { 1 };
    let mut samples: Vec<(usize, f64, f64)> = Vec::with_capacity(spans.len() * per);
    for (k, &(a, b)) in spans.iter().enumerate() {
        let h = (b - a) / per as f64;
        for j in 0..per {
            let t = a + (j as f64 + 0.5) * h;
            samples.push((k, t, f_at(ctx, which, t)?));
        }
    }

    let eval = |t: f64| f_at(ctx, which, t).ok();
    let pair_at = |theta: f64, nb: &[f64]| -> Option<CommonOrthogonal> {
        candidates_at(ctx, which, theta, nb)
            .into_iter()
            .find_map(|(x, y)| check_pair(ctx, x, y))
    };

    for &(_, t, v) in &samples {
        if v.abs() <= TOL_ZERO {
            if let Some(p) = pair_at(t, &[]) {
                return Ok(p);
            }
        }
    }

    let m = samples.len();
    for i in 0..m {
        let (ka, ta, va) = samples[i];
        let (kb, mut tb, vb) = samples[(i + 1) % m];
        if va.signum() == vb.signum() {
            continue;
        }
        if tb < ta {
            tb += TAU;
        }
        let found = if smooth && ka == kb {
            let t = bisect_zero(eval, ta, tb, va);
            pair_at(t, &[])
        } else {
            let mut edge = spans[ka].1;
            if smooth && ka != kb {
                // Smooth functions are continuous across junctions too.
                let t = bisect_zero(eval, ta, tb, va);
                if let Some(p) = pair_at(t, &[]) {
                    return Ok(p);
                }
                edge = t;
            }
            pair_at(edge, &[ta, tb])
        };
        if let Some(p) = found {
            return Ok(p);
        }
    }
    Err(GeomError::NoSignChangeFound)
}

/// Relative gap between two constants, for reports.
pub fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(TOL_DEGENERATE)
}
