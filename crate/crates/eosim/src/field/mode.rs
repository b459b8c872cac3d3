//! Spectral modes of the traveling-wave field and their quadrature algebra.
//!
//! A `SpectralMode` stores complex coefficients over the positive-frequency
//! grid; it represents the linear combination `∫ dω c(ω) â_ω` of annihilation
//! operators. The creation half at negative frequencies is implied by the
//! mirror rule `â_{-ω} = â_ω†`, so a Hermitian observable built from a mode
//! carries `conj(c)` on its creation side.
//!
//! The positive-frequency field mode coefficient at time `t` and position `x`
//! is `c(ω) = -i sqrt(ħω / (4π ε0 c n_ω A)) exp(-iω(t - n_ω x / c))`, the
//! spectral density of a quantized traveling wave of transverse area `A` in a
//! medium of index `n_ω`. The Hilbert partner multiplies each stored
//! coefficient by `i` (the negative half picks up `-i` under mirroring).

use num_complex::Complex64 as C64;

use crate::error::{EosError, Result};
use crate::units::PhysicalConstants;

use super::grid::FrequencyGrid;

#[derive(Debug, Clone)]
pub struct SpectralMode {
    grid: FrequencyGrid,
    coeffs: Vec<C64>,
}

impl SpectralMode {
    pub fn new(grid: FrequencyGrid, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != grid.n_points() {
            return Err(EosError::GridMismatch(format!(
                "coefficient length {} does not match grid size {}",
                coeffs.len(),
                grid.n_points()
            )));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn zero(grid: FrequencyGrid) -> Self {
        let n = grid.n_points();
        Self { grid, coeffs: vec![C64::new(0.0, 0.0); n] }
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [C64] {
        &mut self.coeffs
    }

    /// Squared norm `Σ |c_k|² Δω`.
    pub fn norm_sq(&self) -> f64 {
        let dw = self.grid.delta_omega();
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() * dw
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sq() - 1.0).abs() <= tol
    }

    /// Unit-norm copy; errors on the zero mode.
    pub fn normalized(&self) -> Result<Self> {
        let n2 = self.norm_sq();
        if n2 <= 0.0 {
            return Err(EosError::Domain("cannot normalize the zero mode".into()));
        }
        Ok(self.scaled(C64::new(1.0 / n2.sqrt(), 0.0)))
    }

    pub fn scaled(&self, s: C64) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c * s).collect();
        Self { grid: self.grid.clone(), coeffs }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self { grid: self.grid.clone(), coeffs })
    }

    /// Hilbert partner: every stored (positive-frequency) coefficient gains a
    /// factor `i`. Applying it twice negates the mode.
    pub fn hilbert(&self) -> Self {
        self.scaled(C64::new(0.0, 1.0))
    }

    /// Copy with all coefficients above `omega_m` set to zero.
    pub fn bandlimited(&self, omega_m: f64) -> Result<Self> {
        check_band(omega_m, &self.grid)?;
        let mut out = self.clone();
        for (k, c) in out.coeffs.iter_mut().enumerate() {
            if out.grid.omega(k) > omega_m {
                *c = C64::new(0.0, 0.0);
            }
        }
        Ok(Self { grid: self.grid.clone(), coeffs: out.coeffs })
    }

    /// Time-translated copy: coefficients rotate by `exp(-iω dt)`.
    pub fn delayed(&self, dt: f64) -> Self {
        let mut out = self.clone();
        for (k, c) in out.coeffs.iter_mut().enumerate() {
            let ph = -self.grid.omega(k) * dt;
            *c *= C64::from_polar(1.0, ph);
        }
        out
    }
}

/// Creation-side coefficients implied by Hermitian mirroring.
pub fn mirror(coeffs: &[C64]) -> Vec<C64> {
    coeffs.iter().map(|c| c.conj()).collect()
}

fn check_band(omega_m: f64, grid: &FrequencyGrid) -> Result<()> {
    if !(omega_m > 0.0) {
        return Err(EosError::Domain(format!(
            "band edge must be positive, got {omega_m:.6e}"
        )));
    }
    if omega_m > grid.omega_max() {
        return Err(EosError::Range(format!(
            "band edge {omega_m:.6e} exceeds grid support {:.6e}",
            grid.omega_max()
        )));
    }
    Ok(())
}

/// Positive-frequency magnitude of the field mode normalization,
/// `sqrt(ħω / (4π ε0 c n_ω A))`.
pub fn field_prefactor(omega: f64, n: f64, consts: &PhysicalConstants) -> f64 {
    (consts.hbar * omega
        / (4.0 * std::f64::consts::PI * consts.epsilon_0 * consts.c * n * consts.cross_section_a))
        .sqrt()
}

/// Traveling-wave field mode evaluated at time `t` and position `x`.
///
/// `refractive_index` supplies `n(ω)` over the grid and must stay positive.
pub fn electric_mode_at(
    t: f64,
    x: f64,
    refractive_index: &dyn Fn(f64) -> f64,
    grid: &FrequencyGrid,
    consts: &PhysicalConstants,
) -> Result<SpectralMode> {
    consts.validate()?;
    let mut coeffs = Vec::with_capacity(grid.n_points());
    for k in 0..grid.n_points() {
        let w = grid.omega(k);
        let n = refractive_index(w);
        if !(n > 0.0) || !n.is_finite() {
            return Err(EosError::Domain(format!(
                "refractive index must be positive, got {n} at omega {w:.6e}"
            )));
        }
        let mag = field_prefactor(w, n, consts);
        let phase = -w * (t - n * x / consts.c);
        coeffs.push(C64::new(0.0, -mag) * C64::from_polar(1.0, phase));
    }
    SpectralMode::new(grid.clone(), coeffs)
}

/// Hilbert partner of `mode` (free-function form of [`SpectralMode::hilbert`]).
pub fn hilbert_of(mode: &SpectralMode) -> SpectralMode {
    mode.hilbert()
}

/// Band-limited field mode at time `t`: coefficients vanish above `omega_m`.
pub fn bandlimited_e(
    t: f64,
    omega_m: f64,
    refractive_index: &dyn Fn(f64) -> f64,
    grid: &FrequencyGrid,
    consts: &PhysicalConstants,
) -> Result<SpectralMode> {
    check_band(omega_m, grid)?;
    electric_mode_at(t, 0.0, refractive_index, grid, consts)?.bandlimited(omega_m)
}

/// Band-limited Hilbert quadrature mode at time `t`.
pub fn bandlimited_h(
    t: f64,
    omega_m: f64,
    refractive_index: &dyn Fn(f64) -> f64,
    grid: &FrequencyGrid,
    consts: &PhysicalConstants,
) -> Result<SpectralMode> {
    Ok(bandlimited_e(t, omega_m, refractive_index, grid, consts)?.hilbert())
}

/// Discrete pairing `Σ a_k* b_k Δω` — the normal-ordered commutator of the
/// operators represented by `a` and `b`.
pub fn overlap(a: &SpectralMode, b: &SpectralMode) -> Result<C64> {
    a.grid().check_same(b.grid())?;
    Ok(overlap_slices(a.coeffs(), b.coeffs(), a.grid().delta_omega()))
}

/// Same pairing on raw coefficient slices of equal length.
pub fn overlap_slices(a: &[C64], b: &[C64], delta_omega: f64) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = C64::new(0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        acc += x.conj() * y;
    }
    acc * delta_omega
}

/// Positive-frequency waveform samples of a mode.
#[derive(Debug, Clone)]
pub struct TimeWaveform {
    /// `w(t) = Σ c_k exp(iω_k t) Δω`; a detection mode constructed at `t0`
    /// peaks at `t0` under this phase convention.
    pub analytic: Vec<C64>,
    /// Hermitian sum `w(t) + conj(w(t)) = 2 Re w(t)` including the mirror term.
    pub real: Vec<f64>,
}

/// Sample the temporal waveform of `mode` at the given times.
pub fn time_waveform(mode: &SpectralMode, t_samples: &[f64]) -> TimeWaveform {
    let dw = mode.grid().delta_omega();
    let mut analytic = Vec::with_capacity(t_samples.len());
    let mut real = Vec::with_capacity(t_samples.len());
    for &t in t_samples {
        let mut acc = C64::new(0.0, 0.0);
        for (k, c) in mode.coeffs().iter().enumerate() {
            if c.norm_sqr() == 0.0 {
                continue;
            }
            acc += c * C64::from_polar(1.0, mode.grid().omega(k) * t);
        }
        acc *= dw;
        analytic.push(acc);
        real.push(2.0 * acc.re);
    }
    TimeWaveform { analytic, real }
}

/// Temporal sampling kernel of the observable represented by `mode`.
///
/// Dividing out the field normalization exposes how the observable weights
/// the field in time: `k(τ) = (1/π) Re Σ [c_k / (-i E0_k)] exp(iω_k τ) Δω`.
/// The band-limited field mode yields the even kernel `sin(ω_m τ)/(π τ)`; its
/// Hilbert partner yields the odd `(cos(ω_m τ) - 1)/(π τ)`.
pub fn sampling_kernel(
    mode: &SpectralMode,
    refractive_index: &dyn Fn(f64) -> f64,
    consts: &PhysicalConstants,
    t_samples: &[f64],
) -> Vec<f64> {
    let dw = mode.grid().delta_omega();
    let minus_i = C64::new(0.0, -1.0);
    let reduced: Vec<C64> = mode
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let w = mode.grid().omega(k);
            let e0 = field_prefactor(w, refractive_index(w), consts);
            c / (minus_i * e0)
        })
        .collect();
    t_samples
        .iter()
        .map(|&t| {
            let mut acc = C64::new(0.0, 0.0);
            for (k, r) in reduced.iter().enumerate() {
                if r.norm_sqr() == 0.0 {
                    continue;
                }
                acc += r * C64::from_polar(1.0, mode.grid().omega(k) * t);
            }
            acc.re * dw / std::f64::consts::PI
        })
        .collect()
}

/// Relative odd/even asymmetry of samples taken at times mirrored about a
/// center index; 0 for an even function, 2 for an odd one.
pub fn parity_asymmetry(samples: &[f64]) -> f64 {
    let n = samples.len();
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n / 2 {
        let a = samples[i];
        let b = samples[n - 1 - i];
        num += (a - b) * (a - b);
        den += a * a + b * b;
    }
    if den == 0.0 {
        0.0
    } else {
        (num / den).sqrt()
    }
}
