use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical tolerances shared by every analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Residual tolerance for accepted roots, relative to the coefficient scale.
    pub root_tol: f64,
    /// Roots closer than this are merged into one multiple root.
    pub cluster_radius: f64,
    /// Real parts closer than this (relative to the exponent spread) count as tied.
    pub real_part_tie_tol: f64,
    /// Minimum relative modulus admitted on a counting contour.
    pub contour_min_modulus: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            root_tol: 1e-10,
            cluster_radius: 1e-6,
            real_part_tie_tol: 1e-8,
            contour_min_modulus: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.root_tol,
            self.cluster_radius,
            self.real_part_tie_tol,
            self.contour_min_modulus,
        ];
        if all.iter().all(|t| t.is_finite() && *t > 0.0) {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "tolerances must be finite and positive: {self:?}"
            )))
        }
    }
}
