//! Body constructors: the hexagon family, roundings, random polygons,
//! symmetrizations, re-anchoring and vertex jitter.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::geometry::{convex_hull, Body, ConvexPolygon, Mat2, RoundedPolygon, Vec2};

const MAX_ATTEMPTS: usize = 100;
const MIN_INRADIUS: f64 = 0.05;

/// The six points `A(0,1), B(−1,0), C(−1,−1), D(0,−1), E(α,0), F(α/(1+α), α/(1+α))`.
pub fn hexagon_points(alpha: f64) -> Result<[Vec2; 6]> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(GeomError::NonPositiveAlpha(alpha));
    }
    let k = alpha / (1.0 + alpha);
    Ok([
        Vec2::new(0.0, 1.0),
        Vec2::new(-1.0, 0.0),
        Vec2::new(-1.0, -1.0),
        Vec2::new(0.0, -1.0),
        Vec2::new(alpha, 0.0),
        Vec2::new(k, k),
    ])
}

/// The hexagon `ABCDEF` as a unit disk. `F` lies on segment `AE`, so the
/// validated polygon keeps the five corners `A, B, C, D, E`.
pub fn hexagon(alpha: f64) -> Result<ConvexPolygon> {
    ConvexPolygon::new(hexagon_points(alpha)?.to_vec())
}

/// `core ⊕ εB`.
pub fn rounded(core: ConvexPolygon, eps: f64) -> Result<RoundedPolygon> {
    RoundedPolygon::new(core, eps)
}

/// A smooth body within Hausdorff distance `2ε` of `hexagon(α)` whose tangent
/// along the ray through `D` is horizontal and whose tangent along the ray
/// through `A` is parallel to `AB`: the hexagon shifted by `(ε, 0)` and
/// rounded by `ε`. On it `|f_out(D)|` tends to `(2α+1)/(α+1.5)` as `ε → 0`.
pub fn sharpness_hexagon(alpha: f64, eps: f64) -> Result<RoundedPolygon> {
    let hex = hexagon(alpha)?.translated(Vec2::new(eps, 0.0))?;
    RoundedPolygon::new(hex, eps)
}

/// Regular `n`-gon inscribed in the unit circle, with a vertex at angle 0.
pub fn regular(n: usize) -> Result<ConvexPolygon> {
    if n < 3 {
        return Err(GeomError::TooFewVertices { count: n });
    }
    ConvexPolygon::new(
        (0..n)
            .map(|k| Vec2::from_angle(TAU * k as f64 / n as f64))
            .collect(),
    )
}

/// Seeded random convex polygon with exactly `n` vertices.
///
/// `n + 8` points at uniform random angles and radii in `[0.8, 1]` are mapped
/// by a random anisotropic stretch; their hull is thinned to `n` vertices by
/// repeatedly removing the vertex cutting off the smallest triangle. The
/// result is translated so that its vertex centroid sits at a random offset
/// from the origin, and rejected when the origin is closer than 0.05 to an
/// edge line.
pub fn random_convex_polygon(n: usize, seed: u64) -> Result<ConvexPolygon> {
    if n < 3 {
        return Err(GeomError::TooFewVertices { count: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        if let Some(p) = random_attempt(n, &mut rng) {
            return Ok(p);
        }
    }
    Err(GeomError::DegenerateSample {
        attempts: MAX_ATTEMPTS,
    })
}

fn random_attempt(n: usize, rng: &mut ChaCha8Rng) -> Option<ConvexPolygon> {
    let stretch = Mat2::rotation(rng.random_range(0.0..TAU))
        .mul(&Mat2::diag(1.0, rng.random_range(0.5..1.0)));
    let pts: Vec<Vec2> = (0..n + 8)
        .map(|_| {
            let t = rng.random_range(0.0..TAU);
            let r = rng.random_range(0.8..1.0);
            stretch.apply(Vec2::from_angle(t) * r)
        })
        .collect();
    let mut hull = convex_hull(&pts);
    if hull.len() < n {
        return None;
    }
    while hull.len() > n {
        let m = hull.len();
        let cut = (0..m)
            .map(|i| {
                let (a, b, c) = (hull[(i + m - 1) % m], hull[i], hull[(i + 1) % m]);
                (i, (b - a).cross(c - b))
            })
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .map(|(i, _)| i)?;
        hull.remove(cut);
    }
    let centroid = hull.iter().fold(Vec2::ZERO, |s, &v| s + v) / n as f64;
    let offset = Vec2::from_angle(rng.random_range(0.0..TAU)) * rng.random_range(0.0..0.4);
    let shifted: Vec<Vec2> = hull.iter().map(|&v| v - centroid - offset).collect();
    let p = ConvexPolygon::new(shifted).ok()?;
    (p.len() == n && p.inradius_about_origin() >= MIN_INRADIUS).then_some(p)
}

/// Convex hull of `P ∪ (−P)`.
pub fn symmetrize(p: &ConvexPolygon) -> ConvexPolygon {
    let pts: Vec<Vec2> = p.vertices().iter().flat_map(|&v| [v, -v]).collect();
    ConvexPolygon::new(convex_hull(&pts)).expect("hull of a body and its reflection is valid")
}

/// `P − o`: the same body seen from the interior point `o`.
pub fn reanchor(p: &ConvexPolygon, o: Vec2) -> Result<ConvexPolygon> {
    p.translated(-o)
}

/// Moves vertex `i` by `magnitude` along a seeded direction `θ_i`. The
/// directions depend only on the seed, so shrinking `magnitude` moves every
/// vertex back along the same segment.
pub fn jitter(p: &ConvexPolygon, magnitude: f64, seed: u64) -> Result<ConvexPolygon> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = p
        .vertices()
        .iter()
        .map(|&v| v + Vec2::from_angle(rng.random_range(0.0..TAU)) * magnitude)
        .collect();
    ConvexPolygon::new(v)
}

/// Serializable recipe for a body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BodySpec {
    Hexagon {
        alpha: f64,
    },
    SharpnessHexagon {
        alpha: f64,
        eps: f64,
    },
    Rounded {
        core: Box<BodySpec>,
        eps: f64,
    },
    Random {
        n: usize,
        seed: u64,
    },
    Regular {
        n: usize,
    },
    Symmetrized {
        spec: Box<BodySpec>,
    },
    Reanchored {
        spec: Box<BodySpec>,
        origin: Vec2,
    },
    Jittered {
        spec: Box<BodySpec>,
        magnitude: f64,
        seed: u64,
    },
    Custom {
        vertices: Vec<Vec2>,
    },
}

impl BodySpec {
    pub fn materialize(&self) -> Result<Body> {
        Ok(match self {
            BodySpec::SharpnessHexagon { alpha, eps } => sharpness_hexagon(*alpha, *eps)?.into(),
            BodySpec::Rounded { core, eps } => rounded(core.polygon()?, *eps)?.into(),
            _ => self.polygon()?.into(),
        })
    }

    /// The polygon this spec describes; rounded specs are rejected.
    pub fn polygon(&self) -> Result<ConvexPolygon> {
        match self {
            BodySpec::Hexagon { alpha } => hexagon(*alpha),
            BodySpec::Random { n, seed } => random_convex_polygon(*n, *seed),
            BodySpec::Regular { n } => regular(*n),
            BodySpec::Symmetrized { spec } => Ok(symmetrize(&spec.polygon()?)),
            BodySpec::Reanchored { spec, origin } => reanchor(&spec.polygon()?, *origin),
            BodySpec::Jittered {
                spec,
                magnitude,
                seed,
            } => jitter(&spec.polygon()?, *magnitude, *seed),
            BodySpec::Custom { vertices } => ConvexPolygon::new(vertices.clone()),
            BodySpec::Rounded { .. } | BodySpec::SharpnessHexagon { .. } => Err(
                GeomError::InvalidArgument("spec describes a rounded body".into()),
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{hausdorff_bodies, hausdorff_distance};

    #[test]
    fn hexagon_examples() {
        let p = hexagon_points(1.0).unwrap();
        assert_eq!(p[5], Vec2::new(0.5, 0.5));
        let p = hexagon_points(3.0).unwrap();
        assert_eq!(p[5], Vec2::new(0.75, 0.75));
        // CF parallel to AB
        assert_eq!((p[5] - p[2]).cross(p[1] - p[0]), 0.0);
        assert_eq!(hexagon(1.0).unwrap().lebesgue_area(), 2.5);
        assert_eq!(hexagon(0.0), Err(GeomError::NonPositiveAlpha(0.0)));
        assert!(hexagon(1e6).is_ok());
    }

    #[test]
    fn rounding_examples() {
        let sq = regular(4).unwrap();
        let r = rounded(sq.clone(), 0.0).unwrap();
        assert_eq!(r.core(), &sq);
        let r = rounded(sq.clone(), 0.25).unwrap();
        assert!((hausdorff_bodies(&sq.into(), &r.into()) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn random_is_deterministic_and_exact() {
        let a = random_convex_polygon(6, 42).unwrap();
        assert_eq!(a, random_convex_polygon(6, 42).unwrap());
        assert_eq!(a.len(), 6);
        for seed in 0..1000 {
            let p = random_convex_polygon(3 + (seed as usize % 10), seed).unwrap();
            assert!(p.inradius_about_origin() >= 0.05);
        }
    }

    #[test]
    fn symmetrize_and_reanchor() {
        let tri = ConvexPolygon::from_points(&[[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]]).unwrap();
        let s = symmetrize(&tri);
        assert_eq!(s.len(), 6);
        for v in s.vertices() {
            assert!(s.vertices().contains(&-*v));
        }
        let sq = regular(4).unwrap();
        assert_eq!(reanchor(&sq, Vec2::ZERO).unwrap(), sq);
        assert!(matches!(
            reanchor(&sq, Vec2::new(1.0, 0.0)),
            Err(GeomError::OriginNotInterior { .. })
        ));
    }

    #[test]
    fn jitter_moves_each_vertex_by_magnitude() {
        let p = hexagon(3.0).unwrap();
        let j = jitter(&p, 0.01, 9).unwrap();
        for (a, b) in p.vertices().iter().zip(j.vertices()) {
            assert!((a.distance(*b) - 0.01).abs() < 1e-15);
        }
        assert!(hausdorff_distance(&p, &j) <= 0.01 + 1e-15);
    }

    #[test]
    fn spec_round_trip() {
        let spec = BodySpec::Rounded {
            core: Box::new(BodySpec::Reanchored {
                spec: Box::new(BodySpec::Regular { n: 5 }),
                origin: Vec2::new(0.1, 0.2),
            }),
            eps: 0.1,
        };
        let json = serde_json::to_string(&spec).unwrap();
        let back: BodySpec = serde_json::from_str(&json).unwrap();
        assert_eq!(spec, back);
        assert!(back.materialize().unwrap().is_smooth());
    }
}
