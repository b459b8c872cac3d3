//! Uniform discretization of the positive-frequency axis.
//!
//! Only positive frequencies are stored. Bin centers sit at half-integer
//! multiples of the spacing, `omega_k = (k + 1/2) * delta_omega`, so that
//! neither the DC point nor the sign function at zero is ever sampled. The
//! negative-frequency half of any operator is implied by Hermitian mirroring
//! of its stored coefficients.

use crate::error::{EosError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    n_points: usize,
    delta_omega: f64,
}

impl FrequencyGrid {
    /// Grid with `n_points` bins of width `delta_omega` (rad/s).
    pub fn new(n_points: usize, delta_omega: f64) -> Result<Self> {
        if n_points < 2 {
            return Err(EosError::Domain(format!(
                "grid needs at least 2 points, got {n_points}"
            )));
        }
        if !(delta_omega > 0.0) || !delta_omega.is_finite() {
            return Err(EosError::Domain(format!(
                "grid spacing must be positive and finite, got {delta_omega}"
            )));
        }
        Ok(Self { n_points, delta_omega })
    }

    /// Grid covering angular frequencies up to `omega_max` with `n_points` bins.
    pub fn from_max(omega_max: f64, n_points: usize) -> Result<Self> {
        if !(omega_max > 0.0) {
            return Err(EosError::Domain(format!(
                "omega_max must be positive, got {omega_max}"
            )));
        }
        Self::new(n_points, omega_max / n_points as f64)
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn delta_omega(&self) -> f64 {
        self.delta_omega
    }

    /// Upper edge of the covered band; equals `n_points * delta_omega` exactly.
    pub fn omega_max(&self) -> f64 {
        self.n_points as f64 * self.delta_omega
    }

    /// Center frequency of bin `k`.
    pub fn omega(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * self.delta_omega
    }

    /// All bin center frequencies.
    pub fn omegas(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.omega(k)).collect()
    }

    /// Index of the bin containing `omega`, if within the grid.
    pub fn bin_of(&self, omega: f64) -> Option<usize> {
        if omega < 0.0 || omega >= self.omega_max() {
            return None;
        }
        let k = (omega / self.delta_omega).floor() as usize;
        Some(k.min(self.n_points - 1))
    }

    /// Error unless `other` is the same discretization.
    pub fn check_same(&self, other: &Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(EosError::GridMismatch(format!(
                "{} x {:.6e} vs {} x {:.6e}",
                self.n_points, self.delta_omega, other.n_points, other.delta_omega
            )))
        }
    }
}
