//! Unit conversions and physical constants.
//!
//! All internal quantities are SI: angular frequencies in rad/s, times in
//! seconds, lengths in meters. The interfaces accept ordinary frequencies in
//! THz and times in femtoseconds and convert at the boundary.

use std::f64::consts::PI;

pub const TWO_PI: f64 = 2.0 * PI;

/// Ordinary frequency in THz to angular frequency in rad/s.
pub fn thz(f_thz: f64) -> f64 {
    TWO_PI * f_thz * 1e12
}

/// Angular frequency in rad/s to ordinary frequency in THz.
pub fn to_thz(omega: f64) -> f64 {
    omega / (TWO_PI * 1e12)
}

/// Femtoseconds to seconds.
pub fn fs(t_fs: f64) -> f64 {
    t_fs * 1e-15
}

/// Seconds to femtoseconds.
pub fn to_fs(t: f64) -> f64 {
    t * 1e15
}

/// Fundamental constants and the transverse quantization area entering the
/// continuum mode normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Vacuum speed of light, m/s.
    pub c: f64,
    /// Vacuum permittivity, F/m.
    pub epsilon_0: f64,
    /// Effective transverse beam cross-section, m^2.
    pub cross_section_a: f64,
}

/// Default effective cross-section for a tightly focused probe inside a thin
/// electro-optic crystal (a few-micron waist).
pub const DEFAULT_CROSS_SECTION: f64 = 3.0e-11;

impl PhysicalConstants {
    /// SI constants with the given transverse cross-section.
    pub fn si(cross_section_a: f64) -> Self {
        Self {
            hbar: 1.054_571_817e-34,
            c: 2.997_924_58e8,
            epsilon_0: 8.854_187_812_8e-12,
            cross_section_a,
        }
    }

    /// Dimensionless convention (hbar = c = epsilon_0 = A = 1) used by the
    /// algebraic oracle tests.
    pub fn natural() -> Self {
        Self { hbar: 1.0, c: 1.0, epsilon_0: 1.0, cross_section_a: 1.0 }
    }

    pub fn validate(&self) -> crate::error::Result<()> {
        if self.hbar > 0.0 && self.c > 0.0 && self.epsilon_0 > 0.0 && self.cross_section_a > 0.0 {
            Ok(())
        } else {
            Err(crate::error::EosError::Domain(
                "physical constants must be strictly positive".into(),
            ))
        }
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::si(DEFAULT_CROSS_SECTION)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thz_round_trip() {
        let w = thz(40.0);
        assert!((to_thz(w) - 40.0).abs() < 1e-12);
        assert!((w - 2.513274122871834e14).abs() / w < 1e-12);
    }

    #[test]
    fn constants_validate() {
        assert!(PhysicalConstants::default().validate().is_ok());
        assert!(PhysicalConstants::natural().validate().is_ok());
        let bad = PhysicalConstants { hbar: 0.0, ..PhysicalConstants::natural() };
        assert!(bad.validate().is_err());
    }
}
