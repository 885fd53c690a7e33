//! Body documents and JSON output.

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::error::GeomError;
use crate::gauge::GaugeContext;
use crate::generators::{hexagon, random_convex_polygon};
use crate::geometry::{ConvexPolygon, RoundedPolygon, SymplecticForm, Vec2};

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BodyKind {
    Polygon {
        vertices: Vec<[f64; 2]>,
    },
    Rounded {
        vertices: Vec<[f64; 2]>,
        radius: f64,
    },
    Hexagon {
        alpha: f64,
    },
    Random {
        n: usize,
        seed: u64,
    },
}

/// `{"type": ..., ..., "omega_scale": s}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyDocument {
    #[serde(flatten)]
    pub kind: BodyKind,
    #[serde(default = "one")]
    pub omega_scale: f64,
}

impl BodyDocument {
    pub fn parse(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn polygon(p: &ConvexPolygon, omega_scale: f64) -> Self {
        BodyDocument {
            kind: BodyKind::Polygon {
                vertices: p.vertices().iter().map(|&v| v.into()).collect(),
            },
            omega_scale,
        }
    }

    pub fn form(&self) -> Result<SymplecticForm, GeomError> {
        SymplecticForm::new(self.omega_scale)
    }

    fn points(v: &[[f64; 2]]) -> Vec<Vec2> {
        v.iter().map(|&p| Vec2::from(p)).collect()
    }

    /// Builds the body and its context; any failure means an invalid document.
    pub fn context(&self) -> Result<GaugeContext, GeomError> {
        let form = self.form()?;
        Ok(match &self.kind {
            BodyKind::Polygon { vertices } => {
                GaugeContext::new(ConvexPolygon::new(Self::points(vertices))?, form)
            }
            BodyKind::Rounded { vertices, radius } => GaugeContext::new(
                RoundedPolygon::new(ConvexPolygon::new(Self::points(vertices))?, *radius)?,
                form,
            ),
            BodyKind::Hexagon { alpha } => GaugeContext::new(hexagon(*alpha)?, form),
            BodyKind::Random { n, seed } => {
                GaugeContext::new(random_convex_polygon(*n, *seed)?, form)
            }
        })
    }
}

/// Writes every float with 17 significant digits, enough to round-trip any `f64`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactFloats;

impl Formatter for ExactFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Compact JSON with exact floats.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, ExactFloats);
    value.serialize(&mut ser).expect("in-memory serialization");
    String::from_utf8(out).expect("JSON is UTF-8")
}
