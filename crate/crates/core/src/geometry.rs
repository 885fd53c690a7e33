//! Exact planar primitives: vectors, the symplectic form, validated convex
//! polygons, outer-rounded polygons, areas, ray casting from the origin,
//! Hausdorff distances and linear images.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

/// Absolute tolerance for boundary membership and constraint checks.
pub const TOL_GEOM: f64 = 1e-9;

/// Threshold on normalized cross products for degeneracy detection.
pub const TOL_DEGENERATE: f64 = 1e-12;

/// Edge parameter tolerance for snapping ray hits onto polygon vertices.
const TOL_LOCUS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    /// Checked constructor rejecting NaN and infinities.
    pub fn try_new(x: f64, y: f64) -> Result<Self> {
        if x.is_finite() && y.is_finite() {
            Ok(Vec2 { x, y })
        } else {
            Err(GeomError::NonFinite)
        }
    }

    #[inline]
    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Vec2 { x: c, y: s }
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// The standard determinant `x₁y₂ − y₁x₂`.
    #[inline]
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Counterclockwise quarter turn.
    #[inline]
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn normalized(self) -> Vec2 {
        self / self.norm()
    }

    /// Polar angle in `[0, 2π)`.
    pub fn angle(self) -> f64 {
        let a = self.y.atan2(self.x);
        if a < 0.0 {
            a + TAU
        } else {
            a
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn is_zero(self) -> bool {
        self.x == 0.0 && self.y == 0.0
    }

    pub fn distance(self, o: Vec2) -> f64 {
        (self - o).norm()
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2::new(a[0], a[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl SubAssign for Vec2 {
    fn sub_assign(&mut self, o: Vec2) {
        self.x -= o.x;
        self.y -= o.y;
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    #[inline]
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn div(self, s: f64) -> Vec2 {
        Vec2::new(self.x / s, self.y / s)
    }
}

/// Row-major 2×2 matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2::new(1.0, 0.0, 0.0, 1.0);

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub const fn diag(x: f64, y: f64) -> Self {
        Mat2::new(x, 0.0, 0.0, y)
    }

    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Mat2::new(c, -s, s, c)
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, v: Vec2) -> Vec2 {
        Vec2::new(self.a * v.x + self.b * v.y, self.c * v.x + self.d * v.y)
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        Some(Mat2::new(
            self.d / det,
            -self.b / det,
            -self.c / det,
            self.a / det,
        ))
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    fn max_abs(&self) -> f64 {
        self.a
            .abs()
            .max(self.b.abs())
            .max(self.c.abs())
            .max(self.d.abs())
    }
}

/// `ω(u, v) = s·(u_x v_y − u_y v_x)` with non-zero scale `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymplecticForm {
    scale: f64,
}

impl Default for SymplecticForm {
    fn default() -> Self {
        SymplecticForm::STANDARD
    }
}

impl SymplecticForm {
    pub const STANDARD: SymplecticForm = SymplecticForm { scale: 1.0 };

    pub fn new(scale: f64) -> Result<Self> {
        if scale == 0.0 || !scale.is_finite() {
            return Err(GeomError::InvalidScale(scale));
        }
        Ok(SymplecticForm { scale })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    #[inline]
    pub fn omega(&self, u: Vec2, v: Vec2) -> f64 {
        self.scale * u.cross(v)
    }

    /// +1 when the form agrees with the standard orientation.
    pub fn orientation(&self) -> f64 {
        self.scale.signum()
    }
}

/// Free-function form of [`SymplecticForm::omega`].
pub fn omega(form: SymplecticForm, u: Vec2, v: Vec2) -> f64 {
    form.omega(u, v)
}

/// A strictly convex polygon, stored counterclockwise, with the origin
/// strictly inside. Edge `i` runs from vertex `i` to vertex `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Vec2>,
    normals: Vec<Vec2>,
    offsets: Vec<f64>,
}

impl ConvexPolygon {
    /// Validates a vertex list. Clockwise input is reversed. Vertices lying
    /// on the open segment between their neighbours are dropped.
    pub fn new(vertices: Vec<Vec2>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(GeomError::TooFewVertices {
                count: vertices.len(),
            });
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(GeomError::NonFinite);
        }
        let mut v = vertices;
        let twice_area = shoelace2(&v);
        if twice_area == 0.0 {
            return Err(GeomError::NotConvex { index: 0 });
        }
        if twice_area < 0.0 {
            v.reverse();
        }

        let n = v.len();
        let mut keep = vec![true; n];
        for i in 0..n {
            let prev = v[(i + n - 1) % n];
            let next = v[(i + 1) % n];
            let e1 = v[i] - prev;
            let e2 = next - v[i];
            let (l1, l2) = (e1.norm(), e2.norm());
            if l1 == 0.0 || l2 == 0.0 {
                return Err(GeomError::NotConvex { index: i });
            }
            let sin = e1.cross(e2) / (l1 * l2);
            if sin.abs() <= TOL_DEGENERATE {
                if e1.dot(e2) > 0.0 {
                    keep[i] = false;
                    continue;
                }
                return Err(GeomError::NotConvex { index: i });
            }
            if sin < 0.0 {
                return Err(GeomError::NotConvex { index: i });
            }
        }
        let v: Vec<Vec2> = v
            .into_iter()
            .zip(keep)
            .filter_map(|(p, k)| k.then_some(p))
            .collect();
        if v.len() < 3 {
            return Err(GeomError::NotConvex { index: 0 });
        }

        // All left turns could still wind twice (a pentagram).
        let n = v.len();
        let turning: f64 = (0..n)
            .map(|i| {
                let e1 = v[i] - v[(i + n - 1) % n];
                let e2 = v[(i + 1) % n] - v[i];
                e1.cross(e2).atan2(e1.dot(e2))
            })
            .sum();
        if (turning - TAU).abs() > 1e-6 {
            return Err(GeomError::NotConvex { index: 0 });
        }

        let scale = v.iter().map(|p| p.norm()).fold(0.0, f64::max);
        let mut normals = Vec::with_capacity(n);
        let mut offsets = Vec::with_capacity(n);
        for i in 0..n {
            let e = v[(i + 1) % n] - v[i];
            let len = e.norm();
            let normal = Vec2::new(e.y, -e.x) / len;
            let c = normal.dot(v[i]);
            if c <= TOL_DEGENERATE * scale {
                return Err(GeomError::OriginNotInterior { edge: i });
            }
            normals.push(normal);
            offsets.push(c);
        }
        Ok(ConvexPolygon {
            vertices: v,
            normals,
            offsets,
        })
    }

    pub fn from_points(points: &[[f64; 2]]) -> Result<Self> {
        ConvexPolygon::new(points.iter().map(|&p| Vec2::from(p)).collect())
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Vertex with cyclic indexing.
    #[inline]
    pub fn vertex(&self, i: usize) -> Vec2 {
        self.vertices[i % self.vertices.len()]
    }

    #[inline]
    pub fn edge_vector(&self, i: usize) -> Vec2 {
        self.vertex(i + 1) - self.vertex(i)
    }

    /// Outward unit normals `n_i` of the edges.
    pub fn normals(&self) -> &[Vec2] {
        &self.normals
    }

    /// Offsets `c_i = ⟨n_i, v_i⟩ > 0`, the distances from the origin to the edge lines.
    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn lebesgue_area(&self) -> f64 {
        0.5 * shoelace2(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        (0..self.len()).map(|i| self.edge_vector(i).norm()).sum()
    }

    /// Radius of the largest origin-centred disk inside the polygon.
    pub fn inradius_about_origin(&self) -> f64 {
        self.offsets.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn circumradius_about_origin(&self) -> f64 {
        self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn translated(&self, by: Vec2) -> Result<ConvexPolygon> {
        ConvexPolygon::new(self.vertices.iter().map(|&v| v + by).collect())
    }

    pub fn negated(&self) -> ConvexPolygon {
        ConvexPolygon::new(self.vertices.iter().map(|&v| -v).collect())
            .expect("negation preserves validity")
    }

    /// Minkowski functional `max_i ⟨n_i, x⟩ / c_i`.
    #[inline]
    pub fn gauge(&self, x: Vec2) -> f64 {
        self.max_edge_ratio(x).1.max(0.0)
    }

    fn max_edge_ratio(&self, x: Vec2) -> (usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for (i, (n, c)) in self.normals.iter().zip(&self.offsets).enumerate() {
            let r = n.dot(x) / c;
            if r > best.1 {
                best = (i, r);
            }
        }
        best
    }
}

/// Twice the signed area of a closed vertex loop.
fn shoelace2(v: &[Vec2]) -> f64 {
    let n = v.len();
    (0..n).map(|i| v[i].cross(v[(i + 1) % n])).sum()
}

/// Strict convex hull (monotone chain), counterclockwise, collinear points removed.
pub fn convex_hull(points: &[Vec2]) -> Vec<Vec2> {
    let mut pts: Vec<Vec2> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Vec2> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Vec2>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                if (b - a).cross(p - b) <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Outer rounding `core ⊕ εB`: offset edges alternating with radius-ε arcs
/// centred at the core vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundedPolygon {
    core: ConvexPolygon,
    radius: f64,
}

impl RoundedPolygon {
    pub fn new(core: ConvexPolygon, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(GeomError::InvalidRadius(radius));
        }
        Ok(RoundedPolygon { core, radius })
    }

    pub fn core(&self) -> &ConvexPolygon {
        &self.core
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `A + Pε + πε²`.
    pub fn lebesgue_area(&self) -> f64 {
        let e = self.radius;
        self.core.lebesgue_area() + self.core.perimeter() * e + PI * e * e
    }

    /// Angular range `[start, end]` of the outward normals along the arc at
    /// vertex `i`, with `end ≥ start`.
    pub fn arc_range(&self, i: usize) -> (f64, f64) {
        let n = self.core.len();
        let start = self.core.normals[(i + n - 1) % n].angle();
        let mut end = self.core.normals[i % n].angle();
        if end < start {
            end += TAU;
        }
        (start, end)
    }

    /// Endpoints of the offset copy of edge `i`.
    pub fn offset_edge(&self, i: usize) -> (Vec2, Vec2) {
        let n = self.core.normals[i % self.core.len()] * self.radius;
        (self.core.vertex(i) + n, self.core.vertex(i + 1) + n)
    }
}

/// A unit disk: either an exact polygon or an outer-rounded polygon.
#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    Polygon(ConvexPolygon),
    Rounded(RoundedPolygon),
}

impl From<ConvexPolygon> for Body {
    fn from(p: ConvexPolygon) -> Self {
        Body::Polygon(p)
    }
}

impl From<RoundedPolygon> for Body {
    fn from(r: RoundedPolygon) -> Self {
        Body::Rounded(r)
    }
}

impl Body {
    /// The underlying polygon (the core for rounded bodies).
    pub fn core(&self) -> &ConvexPolygon {
        match self {
            Body::Polygon(p) => p,
            Body::Rounded(r) => &r.core,
        }
    }

    pub fn radius(&self) -> f64 {
        match self {
            Body::Polygon(_) => 0.0,
            Body::Rounded(r) => r.radius,
        }
    }

    /// `Some` when the body is exactly polygonal (including zero-radius rounding).
    pub fn as_polygon(&self) -> Option<&ConvexPolygon> {
        match self {
            Body::Polygon(p) => Some(p),
            Body::Rounded(r) if r.radius == 0.0 => Some(&r.core),
            Body::Rounded(_) => None,
        }
    }

    pub fn is_smooth(&self) -> bool {
        self.radius() > 0.0
    }

    pub fn lebesgue_area(&self) -> f64 {
        match self {
            Body::Polygon(p) => p.lebesgue_area(),
            Body::Rounded(r) => r.lebesgue_area(),
        }
    }

    /// Support function `h(u) = max_{z∈K} ⟨z, u⟩`.
    pub fn support(&self, u: Vec2) -> f64 {
        let core = self.core();
        let h = core
            .vertices()
            .iter()
            .map(|v| v.dot(u))
            .fold(f64::NEG_INFINITY, f64::max);
        h + self.radius() * u.norm()
    }
}

/// Where on the boundary a point sits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Locus {
    /// Interior of edge `index` (offset edge for rounded bodies), at parameter `t`.
    Edge { index: usize, t: f64 },
    /// A polygon vertex.
    Vertex { index: usize },
    /// The arc around core vertex `vertex`, at outward-normal angle `angle`.
    Arc { vertex: usize, angle: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub point: Vec2,
    pub locus: Locus,
}

impl BoundaryPoint {
    /// Unit direction of the unique supporting line, if there is one.
    pub fn tangent(&self, body: &Body) -> Option<Vec2> {
        match self.locus {
            Locus::Edge { index, .. } => Some(body.core().edge_vector(index).normalized()),
            Locus::Arc { angle, .. } => Some(Vec2::from_angle(angle).perp()),
            Locus::Vertex { .. } => None,
        }
    }
}

/// `λ_ω(K) = |s|·area(K)`.
pub fn area(body: &Body, form: SymplecticForm) -> f64 {
    form.scale().abs() * body.lebesgue_area()
}

/// The point where the ray `{t·direction : t > 0}` leaves the body.
pub fn ray_boundary(body: &Body, direction: Vec2) -> Result<BoundaryPoint> {
    if direction.is_zero() {
        return Err(GeomError::ZeroDirection);
    }
    if !direction.is_finite() {
        return Err(GeomError::NonFinite);
    }
    Ok(match body {
        Body::Polygon(p) => polygon_ray(p, direction),
        Body::Rounded(r) if r.radius == 0.0 => polygon_ray(&r.core, direction),
        Body::Rounded(r) => rounded_ray(r, direction).1,
    })
}

fn polygon_ray(p: &ConvexPolygon, d: Vec2) -> BoundaryPoint {
    let (i, g) = p.max_edge_ratio(d);
    let q = d / g;
    let v = p.vertex(i);
    let e = p.edge_vector(i);
    let t = (q - v).dot(e) / e.norm_sq();
    let n = p.len();
    if t <= TOL_LOCUS {
        BoundaryPoint {
            point: v,
            locus: Locus::Vertex { index: i },
        }
    } else if t >= 1.0 - TOL_LOCUS {
        BoundaryPoint {
            point: p.vertex(i + 1),
            locus: Locus::Vertex { index: (i + 1) % n },
        }
    } else {
        BoundaryPoint {
            point: q,
            locus: Locus::Edge { index: i, t },
        }
    }
}

/// Returns the exit parameter `t*` (so `t*·d ∈ ∂K`) and the boundary point.
///
/// Every offset-edge hit and every vertex-disk hit lies in `K`, and the exit
/// point lies on one of them, so the largest candidate is the exit.
pub(crate) fn rounded_ray(r: &RoundedPolygon, d: Vec2) -> (f64, BoundaryPoint) {
    let eps = r.radius;
    let core = &r.core;
    let dd = d.norm_sq();
    let mut best_t = f64::NEG_INFINITY;
    let mut best = Locus::Vertex { index: 0 };
    for i in 0..core.len() {
        let normal = core.normals[i];
        let dn = normal.dot(d);
        if dn > 0.0 {
            let t = (core.offsets[i] + eps) / dn;
            let e = core.edge_vector(i);
            let u = (d * t - core.vertex(i) - normal * eps).dot(e) / e.norm_sq();
            if (-TOL_LOCUS..=1.0 + TOL_LOCUS).contains(&u) && t > best_t {
                best_t = t;
                best = Locus::Edge {
                    index: i,
                    t: u.clamp(0.0, 1.0),
                };
            }
        }
        let v = core.vertex(i);
        let cr = d.cross(v);
        let disc = dd * eps * eps - cr * cr;
        if disc >= 0.0 {
            let t = (d.dot(v) + disc.sqrt()) / dd;
            if t > best_t {
                best_t = t;
                best = Locus::Arc {
                    vertex: i,
                    angle: (d * t - v).angle(),
                };
            }
        }
    }
    let point = match best {
        Locus::Arc { vertex, angle } => core.vertex(vertex) + Vec2::from_angle(angle) * eps,
        _ => d * best_t,
    };
    (best_t, BoundaryPoint { point, locus: best })
}

fn segment_distance(q: Vec2, a: Vec2, b: Vec2) -> f64 {
    let e = b - a;
    let len2 = e.norm_sq();
    let t = if len2 > 0.0 {
        ((q - a).dot(e) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    q.distance(a + e * t)
}

/// Euclidean distance from `q` to the convex region bounded by the CCW loop `pts`.
pub fn point_to_convex_distance(pts: &[Vec2], q: Vec2) -> f64 {
    let n = pts.len();
    let inside = (0..n).all(|i| (pts[(i + 1) % n] - pts[i]).cross(q - pts[i]) >= 0.0);
    if inside {
        return 0.0;
    }
    (0..n)
        .map(|i| segment_distance(q, pts[i], pts[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

/// Hausdorff distance between two convex CCW loops via vertex-to-body distances.
pub fn hausdorff_points(a: &[Vec2], b: &[Vec2]) -> f64 {
    let ab = a
        .iter()
        .map(|&v| point_to_convex_distance(b, v))
        .fold(0.0, f64::max);
    let ba = b
        .iter()
        .map(|&v| point_to_convex_distance(a, v))
        .fold(0.0, f64::max);
    ab.max(ba)
}

/// Hausdorff distance (Euclidean unit disk) between convex polygons.
pub fn hausdorff_distance(k: &ConvexPolygon, l: &ConvexPolygon) -> f64 {
    hausdorff_points(k.vertices(), l.vertices())
}

/// Hausdorff distance between bodies as `max_u |h_K(u) − h_L(u)|`.
///
/// Between consecutive edge-normal angles of both cores the maximizing
/// vertices are fixed, so the difference is `⟨v − w, u⟩ + (ε_K − ε_L)` and its
/// extremes sit at the sector ends or at `±(v − w)`.
pub fn hausdorff_bodies(k: &Body, l: &Body) -> f64 {
    let mut angles: Vec<f64> = k
        .core()
        .normals()
        .iter()
        .chain(l.core().normals())
        .map(|n| n.angle())
        .collect();
    angles.sort_by(f64::total_cmp);
    let argmax = |p: &ConvexPolygon, u: Vec2| -> Vec2 {
        *p.vertices()
            .iter()
            .max_by(|a, b| a.dot(u).total_cmp(&b.dot(u)))
            .expect("non-empty polygon")
    };
    let diff = |u: Vec2| (k.support(u) - l.support(u)).abs();
    let dr = k.radius() - l.radius();
    let m = angles.len();
    let mut best: f64 = 0.0;
    for s in 0..m {
        let a0 = angles[s];
        let mut a1 = angles[(s + 1) % m];
        if a1 <= a0 {
            a1 += TAU;
        }
        best = best.max(diff(Vec2::from_angle(a0)));
        if a1 - a0 <= 0.0 {
            continue;
        }
        let mid = Vec2::from_angle(0.5 * (a0 + a1));
        let w = argmax(k.core(), mid) - argmax(l.core(), mid);
        if w.is_zero() {
            best = best.max(dr.abs());
            continue;
        }
        for cand in [w, -w] {
            let mut ca = cand.angle();
            if ca < a0 {
                ca += TAU;
            }
            if ca <= a1 {
                let u = Vec2::from_angle(ca);
                best = best.max((w.dot(u) + dr).abs());
            }
        }
    }
    best
}

/// Image of a polygon under an invertible linear map.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearImage {
    pub polygon: ConvexPolygon,
    /// `det T`: the factor α with `ω(Tx, Tz) = α ω(x, z)` for the standard form.
    pub det: f64,
    /// `sign(det T)`.
    pub orientation: f64,
}

pub fn apply_linear(t: Mat2, p: &ConvexPolygon) -> Result<LinearImage> {
    let det = t.det();
    let scale = t.max_abs();
    if !det.is_finite() || det.abs() <= TOL_DEGENERATE * scale * scale {
        return Err(GeomError::SingularMap { det });
    }
    let mut verts: Vec<Vec2> = p.vertices().iter().map(|&v| t.apply(v)).collect();
    if det < 0.0 {
        verts.reverse();
    }
    Ok(LinearImage {
        polygon: ConvexPolygon::new(verts)?,
        det,
        orientation: det.signum(),
    })
}
