//! Closed planar curves as Stiefel frames.
//!
//! A closed polygon with `N` samples becomes an `N × 2` frame: the edge
//! vectors `d_i` (as complex numbers, curve rescaled to length 2) have
//! continuous square roots `q_i = √(N·d_i)`, and the frame columns are
//! `Re q / √N` and `Im q / √N`. Closure (`Σ d_i = 0`) is exactly the
//! statement that the two columns are orthogonal with equal norms, and the
//! length normalization makes those norms one. Translation disappears with
//! the edge vectors, scaling with the normalization, and rotating the curve
//! by `α` rotates the frame by `α/2` inside SO(2).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grassmann::{grassmann_distance, GrassmannPoint};
use crate::io::CurveFrameJson;
use crate::matcore::{polar_factor, Matrix};
use crate::stiefel::{stiefel_distance, ShootingConfig, StiefelPoint};

pub const MIN_POINTS: usize = 8;
/// Cap on the polar-polish displacement in [`curve_to_frame`].
pub const MAX_POLISH: f64 = 1e-3;

/// Closed polygon with uniformly spaced parameter, last point joined to the
/// first.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarCurve {
    points: Vec<[f64; 2]>,
}

impl PlanarCurve {
    pub fn new(points: Vec<[f64; 2]>) -> Result<Self> {
        let n = points.len();
        if n < MIN_POINTS {
            return Err(Error::TooFewPoints(n));
        }
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "curve has non-finite coordinates".into(),
            ));
        }
        let lengths: Vec<f64> = edges(&points).iter().map(|[a, b]| a.hypot(*b)).collect();
        let total: f64 = lengths.iter().sum();
        for (index, &length) in lengths.iter().enumerate() {
            if length <= 1e-12 * total {
                return Err(Error::DegenerateEdge { index, length });
            }
        }
        Ok(PlanarCurve { points })
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn length(&self) -> f64 {
        edges(&self.points).iter().map(|[a, b]| a.hypot(*b)).sum()
    }

    pub fn translate(&self, dx: f64, dy: f64) -> PlanarCurve {
        PlanarCurve {
            points: self.points.iter().map(|[x, y]| [x + dx, y + dy]).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> PlanarCurve {
        PlanarCurve {
            points: self.points.iter().map(|[x, y]| [s * x, s * y]).collect(),
        }
    }

    /// Rotation by `alpha` radians about the origin.
    pub fn rotate(&self, alpha: f64) -> PlanarCurve {
        let (s, c) = alpha.sin_cos();
        PlanarCurve {
            points: self
                .points
                .iter()
                .map(|[x, y]| [c * x - s * y, s * x + c * y])
                .collect(),
        }
    }

    /// Same curve starting from sample `k`.
    pub fn shift_start(&self, k: usize) -> PlanarCurve {
        let mut points = self.points.clone();
        points.rotate_left(k % self.points.len());
        PlanarCurve { points }
    }
}

fn edges(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let n = points.len();
    (0..n)
        .map(|i| {
            let [x0, y0] = points[i];
            let [x1, y1] = points[(i + 1) % n];
            [x1 - x0, y1 - y0]
        })
        .collect()
}

/// A curve modulo translation and scale: the frame plus the original length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CurveFrameJson", into = "CurveFrameJson")]
pub struct CurveFrame {
    frame: StiefelPoint,
    scale: f64,
}

impl CurveFrame {
    pub fn new(frame: StiefelPoint, scale: f64) -> Result<Self> {
        if frame.frame_dim() != 2 {
            return Err(Error::ShapeMismatch(format!(
                "curve frames have two columns, got {}",
                frame.frame_dim()
            )));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "curve scale must be positive, got {scale}"
            )));
        }
        Ok(CurveFrame { frame, scale })
    }

    pub fn frame(&self) -> &StiefelPoint {
        &self.frame
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

/// The transform together with how far the final polish moved the frame.
#[derive(Debug, Clone)]
pub struct FrameTransform {
    pub frame: CurveFrame,
    pub polish_displacement: f64,
}

/// Maps a curve to its frame; see the module docs for the construction.
pub fn curve_to_frame(c: &PlanarCurve) -> Result<CurveFrame> {
    curve_to_frame_detailed(c).map(|t| t.frame)
}

pub fn curve_to_frame_detailed(c: &PlanarCurve) -> Result<FrameTransform> {
    let n = c.len();
    let nf = n as f64;
    let d = edges(&c.points);
    let length: f64 = d.iter().map(|[a, b]| a.hypot(*b)).sum();
    let norm = 2.0 / length;

    let sqrt_n = nf.sqrt();
    let mut raw = Matrix::zeros(n, 2);
    let mut prev: Option<(f64, f64)> = None;
    let mut prev_dir = 0.0;
    for (i, [dx, dy]) in d.iter().enumerate() {
        let dir = dy.atan2(*dx);
        if i > 0 {
            let turn = (dir - prev_dir + PI).rem_euclid(2.0 * PI) - PI;
            if turn.abs() >= PI - 1e-12 {
                return Err(Error::BranchFailure(i));
            }
        }
        prev_dir = dir;
        // principal square root of N·d_i, then the branch closest to q_{i−1}
        let (re, im) = complex_sqrt(dx * norm * nf, dy * norm * nf);
        let (re, im) = match prev {
            Some((pr, pi)) if re * pr + im * pi < 0.0 => (-re, -im),
            _ => (re, im),
        };
        prev = Some((re, im));
        raw.set(i, 0, re / sqrt_n);
        raw.set(i, 1, im / sqrt_n);
    }
    let polished = polar_factor(&raw)?;
    let displacement = (&polished - &raw).norm_fro();
    if displacement > MAX_POLISH {
        return Err(Error::PolishTooLarge { displacement });
    }
    Ok(FrameTransform {
        frame: CurveFrame::new(StiefelPoint::new(polished)?, length)?,
        polish_displacement: displacement,
    })
}

fn complex_sqrt(re: f64, im: f64) -> (f64, f64) {
    let r = re.hypot(im);
    let a = ((r + re) * 0.5).sqrt();
    let b = ((r - re) * 0.5).sqrt();
    (a, if im < 0.0 { -b } else { b })
}

/// Inverse transform: squares `q_i = (u_i + i v_i)·√N`, scales the edges
/// back to the stored length and sums them, centroid at the origin.
pub fn frame_to_curve(f: &CurveFrame) -> PlanarCurve {
    let m = f.frame.matrix();
    let n = m.rows();
    let nf = n as f64;
    let k = f.scale / 2.0;
    let d: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let (u, v) = (m.get(i, 0), m.get(i, 1));
            [(u * u - v * v) * k, 2.0 * u * v * k]
        })
        .collect();
    let mut pts = Vec::with_capacity(n);
    let (mut x, mut y) = (0.0, 0.0);
    for e in &d {
        pts.push([x, y]);
        x += e[0];
        y += e[1];
    }
    let cx = pts.iter().map(|p| p[0]).sum::<f64>() / nf;
    let cy = pts.iter().map(|p| p[1]).sum::<f64>() / nf;
    PlanarCurve {
        points: pts.iter().map(|[x, y]| [x - cx, y - cy]).collect(),
    }
}

/// `‖Σ d_i‖` of the edges reconstructed from a frame.
pub fn closure_defect(f: &CurveFrame) -> f64 {
    let m = f.frame.matrix();
    let k = f.scale / 2.0;
    let (mut sx, mut sy) = (0.0, 0.0);
    for i in 0..m.rows() {
        let (u, v) = (m.get(i, 0), m.get(i, 1));
        sx += (u * u - v * v) * k;
        sy += 2.0 * u * v * k;
    }
    sx.hypot(sy)
}

fn same_resolution(c1: &PlanarCurve, c2: &PlanarCurve) -> Result<()> {
    if c1.len() != c2.len() {
        return Err(Error::ResolutionMismatch(c1.len(), c2.len()));
    }
    Ok(())
}

/// Distance between curves modulo translation and scaling.
pub fn curve_distance(c1: &PlanarCurve, c2: &PlanarCurve, cfg: &ShootingConfig) -> Result<f64> {
    same_resolution(c1, c2)?;
    let f1 = curve_to_frame(c1)?;
    let f2 = curve_to_frame(c2)?;
    stiefel_distance(&f1.frame, &f2.frame, cfg)
}

/// Distance between curves modulo translation, scaling and rotation, on the
/// oriented Grassmannian of the frames.
pub fn curve_distance_mod_rotation(
    c1: &PlanarCurve,
    c2: &PlanarCurve,
    cfg: &ShootingConfig,
) -> Result<f64> {
    same_resolution(c1, c2)?;
    let f1 = curve_to_frame(c1)?;
    let f2 = curve_to_frame(c2)?;
    grassmann_distance(
        &GrassmannPoint::new(f1.frame, true),
        &GrassmannPoint::new(f2.frame, true),
        cfg,
    )
}

/// `n` samples of the ellipse with semi-axes `a`, `b`, uniform in angle.
pub fn ellipse(n: usize, a: f64, b: f64) -> Result<PlanarCurve> {
    PlanarCurve::new(
        (0..n)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / n as f64;
                [a * t.cos(), b * t.sin()]
            })
            .collect(),
    )
}
