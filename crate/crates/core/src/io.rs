//! On-disk formats.
//!
//! * Matrix: `{"rows", "cols", "data"}` with row-major data.
//! * Frame: `{"ambient_dim", "frame_dim", "matrix"}`.
//! * Tangent: a frame object plus `"base"` holding the base frame.
//! * Grassmann point: `{"oriented", "representative"}`.
//! * Curve frame: `{"frame", "scale"}`.
//! * Curve: CSV with one `x,y` pair per line, closed implicitly.
//!
//! JSON numbers use the shortest representation that round-trips, so
//! reading back a written file reproduces every bit.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grassmann::GrassmannPoint;
use crate::matcore::Matrix;
use crate::shapes::{CurveFrame, PlanarCurve};
use crate::stiefel::{StiefelPoint, TangentVector};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameJson {
    pub ambient_dim: usize,
    pub frame_dim: usize,
    pub matrix: Matrix,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TangentJson {
    pub ambient_dim: usize,
    pub frame_dim: usize,
    pub matrix: Matrix,
    pub base: FrameJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrassmannJson {
    pub oriented: bool,
    pub representative: FrameJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveFrameJson {
    pub frame: FrameJson,
    pub scale: f64,
}

fn check_dims(ambient: usize, frame: usize, m: &Matrix) -> Result<()> {
    if m.shape() != (ambient, frame) {
        return Err(Error::ShapeMismatch(format!(
            "declared {ambient}x{frame} but matrix is {:?}",
            m.shape()
        )));
    }
    Ok(())
}

impl TryFrom<FrameJson> for StiefelPoint {
    type Error = Error;

    fn try_from(f: FrameJson) -> Result<Self> {
        check_dims(f.ambient_dim, f.frame_dim, &f.matrix)?;
        StiefelPoint::new(f.matrix)
    }
}

impl From<StiefelPoint> for FrameJson {
    fn from(x: StiefelPoint) -> Self {
        FrameJson {
            ambient_dim: x.ambient_dim(),
            frame_dim: x.frame_dim(),
            matrix: x.into_matrix(),
        }
    }
}

impl TryFrom<TangentJson> for TangentVector {
    type Error = Error;

    fn try_from(t: TangentJson) -> Result<Self> {
        check_dims(t.ambient_dim, t.frame_dim, &t.matrix)?;
        let base = StiefelPoint::try_from(t.base)?;
        TangentVector::new(base, t.matrix)
    }
}

impl From<TangentVector> for TangentJson {
    fn from(v: TangentVector) -> Self {
        TangentJson {
            ambient_dim: v.base().ambient_dim(),
            frame_dim: v.base().frame_dim(),
            matrix: v.matrix().clone(),
            base: v.base().clone().into(),
        }
    }
}

impl TryFrom<GrassmannJson> for GrassmannPoint {
    type Error = Error;

    fn try_from(g: GrassmannJson) -> Result<Self> {
        Ok(GrassmannPoint::new(
            StiefelPoint::try_from(g.representative)?,
            g.oriented,
        ))
    }
}

impl From<GrassmannPoint> for GrassmannJson {
    fn from(g: GrassmannPoint) -> Self {
        GrassmannJson {
            oriented: g.oriented(),
            representative: g.representative().clone().into(),
        }
    }
}

impl TryFrom<CurveFrameJson> for CurveFrame {
    type Error = Error;

    fn try_from(c: CurveFrameJson) -> Result<Self> {
        CurveFrame::new(StiefelPoint::try_from(c.frame)?, c.scale)
    }
}

impl From<CurveFrame> for CurveFrameJson {
    fn from(c: CurveFrame) -> Self {
        CurveFrameJson {
            scale: c.scale(),
            frame: c.frame().clone().into(),
        }
    }
}

/// Reads `x,y` lines into raw points; blank lines are skipped.
pub fn read_curve_points<R: Read>(reader: R) -> Result<Vec<[f64; 2]>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let mut pts = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::InvalidArgument(format!("curve CSV: {e}")))?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        if rec.len() != 2 {
            return Err(Error::InvalidArgument(format!(
                "curve CSV line {}: expected 2 fields, got {}",
                line + 1,
                rec.len()
            )));
        }
        let parse = |s: &str| -> Result<f64> {
            let v: f64 = s.parse().map_err(|_| {
                Error::InvalidArgument(format!("curve CSV line {}: bad number {s:?}", line + 1))
            })?;
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "curve CSV line {}: non-finite coordinate",
                    line + 1
                )));
            }
            Ok(v)
        };
        pts.push([parse(&rec[0])?, parse(&rec[1])?]);
    }
    Ok(pts)
}

/// Writes one `x,y` line per sample with 17 significant digits.
pub fn write_curve<W: Write>(mut w: W, curve: &PlanarCurve) -> std::io::Result<()> {
    for [x, y] in curve.points() {
        writeln!(w, "{x:.16e},{y:.16e}")?;
    }
    Ok(())
}
