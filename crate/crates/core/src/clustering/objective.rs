use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Continuous, nondecreasing φ with φ(0) = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub enum Loss {
    /// φ(r) = r²
    #[default]
    Square,
    /// φ(r) = r
    Abs,
    /// φ(r) = r^p, p ≥ 1
    Power(f64),
}

impl Loss {
    pub fn eval(self, r: f64) -> f64 {
        match self {
            Loss::Square => r * r,
            Loss::Abs => r,
            Loss::Power(p) => r.powf(p),
        }
    }

    fn validate(self) -> Result<()> {
        match self {
            Loss::Power(p) if !(p >= 1.0 && p.is_finite()) => {
                Err(Error::param("phi power", p, "need a finite p >= 1"))
            }
            _ => Ok(()),
        }
    }
}

/// `Φ(C, F_n) = (1/n) Σ_i min_{c ∈ C} φ(‖x_i − c‖)` over the rows of `points`
/// and `centers`.
pub fn phi_objective(points: &DMatrix<f64>, centers: &DMatrix<f64>, phi: Loss) -> Result<f64> {
    phi.validate()?;
    if centers.nrows() == 0 {
        return Err(Error::EmptyCenters);
    }
    if points.nrows() == 0 {
        return Err(Error::param("points", 0, "need at least one point"));
    }
    if points.ncols() != centers.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "points have dimension {} but centers {}",
            points.ncols(),
            centers.ncols()
        )));
    }
    let total: f64 = points
        .row_iter()
        .map(|x| {
            centers
                .row_iter()
                .map(|c| phi.eval((x - c).norm()))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    Ok(total / points.nrows() as f64)
}
