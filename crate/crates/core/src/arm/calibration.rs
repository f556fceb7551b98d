//! Least-squares affine calibration between screen pixels and the arm's
//! workspace plane.
//!
//! A flat phone under a 3-axis arm is an affine relation to first order, so
//! the map is a 2x3 matrix fit from >= 3 non-collinear pixel/workspace
//! correspondences by solving the normal equations.

use serde::{Deserialize, Serialize};

use crate::arm::ArmError;
use crate::geom::PxPoint;

/// A point in the arm's workspace plane, millimeters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WsPoint {
    pub x: f64,
    pub y: f64,
}

impl WsPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Rectangular reach limits of the arm, millimeters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkspaceBounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl WorkspaceBounds {
    pub fn contains(&self, p: WsPoint) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }
}

/// Calibrated pixel -> workspace map plus the contact/hover heights.
/// Immutable after fitting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationMap {
    /// Row-major 2x3 affine: [a00, a01, a02, a10, a11, a12].
    pub affine: [f64; 6],
    pub z_contact: f64,
    pub z_hover: f64,
    /// Max Euclidean fit error over the correspondences, mm.
    pub residual: f64,
}

impl CalibrationMap {
    /// Build from an explicit matrix (used by tests and profile loading).
    pub fn from_affine(affine: [f64; 6], z_contact: f64, z_hover: f64) -> Result<Self, ArmError> {
        if z_hover <= z_contact {
            return Err(ArmError::BadZOrder {
                hover: z_hover,
                contact: z_contact,
            });
        }
        let map = Self {
            affine,
            z_contact,
            z_hover,
            residual: 0.0,
        };
        map.inverse_linear()?; // must be invertible
        Ok(map)
    }

    pub fn identity(z_contact: f64, z_hover: f64) -> Self {
        Self::from_affine([1.0, 0.0, 0.0, 0.0, 1.0, 0.0], z_contact, z_hover)
            .expect("identity is invertible")
    }

    /// Apply the affine exactly.
    pub fn apply(&self, p: PxPoint) -> WsPoint {
        let a = &self.affine;
        WsPoint {
            x: a[0] * p.x + a[1] * p.y + a[2],
            y: a[3] * p.x + a[4] * p.y + a[5],
        }
    }

    fn inverse_linear(&self) -> Result<[f64; 4], ArmError> {
        let a = &self.affine;
        let det = a[0] * a[4] - a[1] * a[3];
        let scale = a[0].abs().max(a[1].abs()).max(a[3].abs()).max(a[4].abs());
        if det.abs() <= 1e-12 * scale.max(1.0).powi(2) {
            return Err(ArmError::NonInvertible(det.abs()));
        }
        Ok([a[4] / det, -a[1] / det, -a[3] / det, a[0] / det])
    }

    /// Invert: workspace point back to the pixel that maps onto it.
    pub fn invert(&self, w: WsPoint) -> Result<PxPoint, ArmError> {
        let inv = self.inverse_linear()?;
        let tx = w.x - self.affine[2];
        let ty = w.y - self.affine[5];
        Ok(PxPoint::new(inv[0] * tx + inv[1] * ty, inv[2] * tx + inv[3] * ty))
    }
}

/// Solve a 3x3 linear system by Gaussian elimination with partial pivoting.
/// Returns None when the matrix is (numerically) singular.
fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    let mut scale = 0.0f64;
    for row in &m {
        for v in row {
            scale = scale.max(v.abs());
        }
    }
    for col in 0..3 {
        let pivot_row = (col..3)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        if m[pivot_row][col].abs() <= 1e-10 * scale.max(1.0) {
            return None;
        }
        m.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let pivot = m[col];
        for row in (col + 1)..3 {
            let f = m[row][col] / pivot[col];
            for (mk, pk) in m[row].iter_mut().zip(pivot).skip(col) {
                *mk -= f * pk;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0f64; 3];
    for row in (0..3).rev() {
        let mut v = b[row];
        for k in (row + 1)..3 {
            v -= m[row][k] * x[k];
        }
        x[row] = v / m[row][row];
    }
    Some(x)
}

/// Fit the affine by least squares over pixel/workspace correspondences.
///
/// Both output rows share the Gram matrix of the design rows [x, y, 1], so
/// collinear inputs show up as a singular system and are rejected.
pub fn fit_calibration(
    correspondences: &[(PxPoint, WsPoint)],
    z_contact: f64,
    z_hover: f64,
) -> Result<CalibrationMap, ArmError> {
    let n = correspondences.len();
    if n < 3 {
        return Err(ArmError::TooFewPoints(n));
    }
    if z_hover <= z_contact {
        return Err(ArmError::BadZOrder {
            hover: z_hover,
            contact: z_contact,
        });
    }

    let mut gram = [[0.0f64; 3]; 3];
    let mut rhs_x = [0.0f64; 3];
    let mut rhs_y = [0.0f64; 3];
    for (p, w) in correspondences {
        let row = [p.x, p.y, 1.0];
        for i in 0..3 {
            for j in 0..3 {
                gram[i][j] += row[i] * row[j];
            }
            rhs_x[i] += row[i] * w.x;
            rhs_y[i] += row[i] * w.y;
        }
    }

    let wx = solve3(gram, rhs_x).ok_or(ArmError::CollinearPoints)?;
    let wy = solve3(gram, rhs_y).ok_or(ArmError::CollinearPoints)?;

    let mut map = CalibrationMap {
        affine: [wx[0], wx[1], wx[2], wy[0], wy[1], wy[2]],
        z_contact,
        z_hover,
        residual: 0.0,
    };
    map.residual = correspondences
        .iter()
        .map(|(p, w)| {
            let m = map.apply(*p);
            ((m.x - w.x).powi(2) + (m.y - w.y).powi(2)).sqrt()
        })
        .fold(0.0, f64::max);
    // The fitted linear part must be usable both ways.
    map.inverse_linear()?;
    Ok(map)
}
