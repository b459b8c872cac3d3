//! Gaussian states over finite orthonormal mode bases.
//!
//! Quadratures are ordered `(x_1, p_1, ..., x_M, p_M)` with the vacuum
//! covariance equal to `I/2` (symmetric ordering). Detection observables
//! project onto the basis; any out-of-basis weight contributes plain vacuum
//! noise.

mod linalg;
mod sampling;

pub use sampling::sample_shots;

use num_complex::Complex64 as C64;

use crate::chain::DetectionOperator;
use crate::error::{EosError, Result};
use crate::field::{overlap, FrequencyGrid, SpectralMode};

pub(crate) use linalg::{cholesky, congruence, inv2, matvec, sym_eigenvalues};

/// Orthonormal family of spectral modes.
#[derive(Debug, Clone)]
pub struct ModeBasis {
    modes: Vec<SpectralMode>,
    gram_tolerance: f64,
}

impl ModeBasis {
    pub const DEFAULT_GRAM_TOL: f64 = 1e-10;

    /// Orthonormalize `modes` by modified Gram-Schmidt, dropping members that
    /// are linearly dependent on earlier ones.
    pub fn orthonormalize(modes: Vec<SpectralMode>, gram_tolerance: f64) -> Result<Self> {
        if modes.is_empty() {
            return Err(EosError::Domain("mode basis cannot be empty".into()));
        }
        let grid = modes[0].grid().clone();
        let mut kept: Vec<SpectralMode> = Vec::new();
        for mut m in modes {
            grid.check_same(m.grid())?;
            for b in &kept {
                let c = overlap(b, &m)?;
                let proj = b.scaled(-c);
                m = m.add(&proj)?;
            }
            let n2 = m.norm_sq();
            if n2 > 1e-12 {
                kept.push(m.scaled(C64::new(1.0 / n2.sqrt(), 0.0)));
            }
        }
        if kept.is_empty() {
            return Err(EosError::Domain("all basis candidates were degenerate".into()));
        }
        let basis = Self { modes: kept, gram_tolerance };
        basis.check_gram()?;
        Ok(basis)
    }

    /// Wrap modes that are already orthonormal within `gram_tolerance`.
    pub fn from_orthonormal(modes: Vec<SpectralMode>, gram_tolerance: f64) -> Result<Self> {
        if modes.is_empty() {
            return Err(EosError::Domain("mode basis cannot be empty".into()));
        }
        let grid = modes[0].grid().clone();
        for m in &modes {
            grid.check_same(m.grid())?;
        }
        let basis = Self { modes, gram_tolerance };
        basis.check_gram()?;
        Ok(basis)
    }

    fn check_gram(&self) -> Result<()> {
        for i in 0..self.modes.len() {
            for j in i..self.modes.len() {
                let g = overlap(&self.modes[i], &self.modes[j])?;
                let expect = if i == j { 1.0 } else { 0.0 };
                if (g - C64::new(expect, 0.0)).norm() > self.gram_tolerance {
                    return Err(EosError::Invariant(format!(
                        "basis Gram matrix deviates from identity at ({i}, {j}): {g}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[SpectralMode] {
        &self.modes
    }

    pub fn grid(&self) -> &FrequencyGrid {
        self.modes[0].grid()
    }

    /// Projections `<m_i, coeffs>` of a coefficient vector onto the basis.
    pub fn project(&self, coeffs: &[C64]) -> Vec<C64> {
        let dw = self.grid().delta_omega();
        self.modes
            .iter()
            .map(|m| crate::field::overlap_slices(m.coeffs(), coeffs, dw))
            .collect()
    }
}

/// Mean vector and covariance matrix of a Gaussian state over a mode basis.
#[derive(Debug, Clone)]
pub struct GaussianState {
    basis: ModeBasis,
    mean: Vec<f64>,
    cov: Vec<f64>,
}

impl GaussianState {
    /// Vacuum over `basis`: zero mean, covariance `I/2`.
    pub fn vacuum(basis: ModeBasis) -> Self {
        let d = 2 * basis.len();
        let mut cov = vec![0.0; d * d];
        for i in 0..d {
            cov[i * d + i] = 0.5;
        }
        Self { basis, mean: vec![0.0; d], cov }
    }

    /// Single-mode squeezed vacuum on a one-mode basis: `var(x) = e^{-2r}/2`,
    /// `var(p) = e^{+2r}/2`.
    pub fn single_mode_squeezed(basis: ModeBasis, r: f64) -> Result<Self> {
        if basis.len() != 1 {
            return Err(EosError::Domain(format!(
                "squeezed vacuum constructor expects one mode, got {}",
                basis.len()
            )));
        }
        let mut s = Self::vacuum(basis);
        s.cov[0] = 0.5 * (-2.0 * r).exp();
        s.cov[3] = 0.5 * (2.0 * r).exp();
        Ok(s)
    }

    pub fn from_parts(basis: ModeBasis, mean: Vec<f64>, cov: Vec<f64>) -> Result<Self> {
        let s = Self::from_measured(basis, mean, cov)?;
        s.validate()?;
        Ok(s)
    }

    /// Build from measured joint statistics: requires a symmetric,
    /// classically positive covariance but not the quantum uncertainty
    /// relation. Simultaneous noisy readout of conjugate quadratures can
    /// imply mode covariances slightly below the symplectic bound; their
    /// Husimi distribution (covariance plus vacuum) is still well defined.
    pub fn from_measured(basis: ModeBasis, mean: Vec<f64>, cov: Vec<f64>) -> Result<Self> {
        let d = 2 * basis.len();
        if mean.len() != d || cov.len() != d * d {
            return Err(EosError::Domain(format!(
                "state dimensions do not match basis: mean {}, cov {}, expected {d} / {}",
                mean.len(),
                cov.len(),
                d * d
            )));
        }
        for i in 0..d {
            for j in 0..d {
                let dev = (cov[i * d + j] - cov[j * d + i]).abs();
                if dev > 1e-12 * (1.0 + cov[i * d + i].abs()) {
                    return Err(EosError::Invariant(format!(
                        "covariance not symmetric at ({i}, {j}): {dev:.3e}"
                    )));
                }
            }
        }
        let min_eig = sym_eigenvalues(&cov, d).into_iter().fold(f64::INFINITY, f64::min);
        if min_eig < -1e-10 {
            return Err(EosError::Invariant(format!(
                "covariance not positive semi-definite: min eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self { basis, mean, cov })
    }

    pub fn basis(&self) -> &ModeBasis {
        &self.basis
    }

    pub fn n_modes(&self) -> usize {
        self.basis.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn cov(&self) -> &[f64] {
        &self.cov
    }

    pub fn mean_mut(&mut self) -> &mut [f64] {
        &mut self.mean
    }

    /// Symmetry of the covariance and the uncertainty relation
    /// `cov + (i/2) Omega >= 0`.
    pub fn validate(&self) -> Result<()> {
        let d = 2 * self.basis.len();
        for i in 0..d {
            for j in 0..d {
                let diff = (self.cov[i * d + j] - self.cov[j * d + i]).abs();
                if diff > 1e-12 * (1.0 + self.cov[i * d + i].abs()) {
                    return Err(EosError::Invariant(format!(
                        "covariance not symmetric at ({i}, {j}): {diff:.3e}"
                    )));
                }
            }
        }
        let min = self.uncertainty_min_eigenvalue();
        if min < -1e-10 {
            return Err(EosError::Invariant(format!(
                "uncertainty relation violated: min eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }

    /// Smallest eigenvalue of the Hermitian matrix `cov + (i/2) Omega`,
    /// computed through its real symmetric embedding.
    pub fn uncertainty_min_eigenvalue(&self) -> f64 {
        let d = 2 * self.basis.len();
        let omega = symplectic_form(self.basis.len());
        // H = S + iA with S = cov, A = Omega/2; embed as [[S, -A], [A, S]]
        let n2 = 2 * d;
        let mut emb = vec![0.0; n2 * n2];
        for i in 0..d {
            for j in 0..d {
                let s = self.cov[i * d + j];
                let a = 0.5 * omega[i * d + j];
                emb[i * n2 + j] = s;
                emb[i * n2 + d + j] = -a;
                emb[(d + i) * n2 + j] = a;
                emb[(d + i) * n2 + d + j] = s;
            }
        }
        sym_eigenvalues(&emb, n2)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    /// Apply a symplectic matrix: `mean -> S mean`, `cov -> S cov S^T`.
    pub fn apply_symplectic(&mut self, s: &[f64]) -> Result<()> {
        let d = 2 * self.basis.len();
        if s.len() != d * d {
            return Err(EosError::Domain("symplectic matrix dimension mismatch".into()));
        }
        self.mean = matvec(s, &self.mean, d);
        self.cov = congruence(s, &self.cov, d);
        Ok(())
    }

    /// Shift the mean of mode `i` by `(dx, dp)`.
    pub fn displace(&mut self, i: usize, dx: f64, dp: f64) {
        self.mean[2 * i] += dx;
        self.mean[2 * i + 1] += dp;
    }

    /// 2x2 covariance block of mode `i`.
    pub fn mode_cov(&self, i: usize) -> [f64; 4] {
        let d = 2 * self.basis.len();
        let r = 2 * i;
        [
            self.cov[r * d + r],
            self.cov[r * d + r + 1],
            self.cov[(r + 1) * d + r],
            self.cov[(r + 1) * d + r + 1],
        ]
    }

    pub fn mode_mean(&self, i: usize) -> [f64; 2] {
        [self.mean[2 * i], self.mean[2 * i + 1]]
    }
}

/// Symplectic form on `(x_1, p_1, ..., x_M, p_M)`: block-diagonal
/// `[[0, 1], [-1, 0]]`.
pub fn symplectic_form(m: usize) -> Vec<f64> {
    let d = 2 * m;
    let mut omega = vec![0.0; d * d];
    for i in 0..m {
        omega[(2 * i) * d + 2 * i + 1] = 1.0;
        omega[(2 * i + 1) * d + 2 * i] = -1.0;
    }
    omega
}

/// Linear mixing of annihilation and creation operators in discrete-ladder
/// units: `b'_j = Σ_k alpha[j,k] b_k + beta[j,k] b_k†`.
#[derive(Debug, Clone)]
pub struct BogoliubovTransform {
    m: usize,
    pub alpha: Vec<C64>,
    pub beta: Vec<C64>,
}

impl BogoliubovTransform {
    pub fn new(m: usize, alpha: Vec<C64>, beta: Vec<C64>) -> Self {
        assert_eq!(alpha.len(), m * m);
        assert_eq!(beta.len(), m * m);
        Self { m, alpha, beta }
    }

    pub fn identity(m: usize) -> Self {
        let mut alpha = vec![C64::new(0.0, 0.0); m * m];
        for i in 0..m {
            alpha[i * m + i] = C64::new(1.0, 0.0);
        }
        Self { m, alpha, beta: vec![C64::new(0.0, 0.0); m * m] }
    }

    /// Single-mode squeezer: `b' = cosh(r) b - e^{i phi} sinh(r) b†`.
    pub fn squeezer(r: f64, phi: f64) -> Self {
        let alpha = vec![C64::new(r.cosh(), 0.0)];
        let beta = vec![-C64::from_polar(r.sinh(), phi)];
        Self { m: 1, alpha, beta }
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn beta_norm(&self) -> f64 {
        self.beta.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Verify `alpha alpha† - beta beta† = I` and `alpha beta^T = beta alpha^T`.
    pub fn check_symplectic(&self, tol: f64) -> Result<()> {
        let m = self.m;
        let mut max_dev = 0.0f64;
        for i in 0..m {
            for j in 0..m {
                let mut g = C64::new(0.0, 0.0);
                let mut s = C64::new(0.0, 0.0);
                for k in 0..m {
                    g += self.alpha[i * m + k] * self.alpha[j * m + k].conj()
                        - self.beta[i * m + k] * self.beta[j * m + k].conj();
                    s += self.alpha[i * m + k] * self.beta[j * m + k]
                        - self.beta[i * m + k] * self.alpha[j * m + k];
                }
                let expect = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                max_dev = max_dev.max((g - expect).norm()).max(s.norm());
            }
        }
        if max_dev > tol {
            return Err(EosError::Invariant(format!(
                "Bogoliubov symplectic conditions violated by {max_dev:.3e}"
            )));
        }
        Ok(())
    }

    /// Real symplectic matrix acting on `(x_1, p_1, ...)`.
    pub fn to_symplectic(&self) -> Vec<f64> {
        let m = self.m;
        let d = 2 * m;
        let mut s = vec![0.0; d * d];
        for j in 0..m {
            for k in 0..m {
                let al = self.alpha[j * m + k];
                let be = self.beta[j * m + k];
                let plus = al + be.conj();
                let minus = al - be.conj();
                s[(2 * j) * d + 2 * k] = plus.re;
                s[(2 * j) * d + 2 * k + 1] = -plus.im;
                s[(2 * j + 1) * d + 2 * k] = minus.im;
                s[(2 * j + 1) * d + 2 * k + 1] = minus.re;
            }
        }
        s
    }
}

/// Gaussian signal mode and squeezed state: the unit-norm envelope
/// `G(omega) ∝ sqrt(omega) exp(-(omega - omega0)^2 / (4 sigma^2))` squeezed
/// by `r` along its amplitude quadrature.
pub fn squeezed_signal(
    omega0: f64,
    sigma: f64,
    r: f64,
    grid: &FrequencyGrid,
) -> Result<(SpectralMode, GaussianState)> {
    if !(omega0 > 0.0) || !(sigma > 0.0) {
        return Err(EosError::Domain(format!(
            "signal center and width must be positive, got {omega0:.3e}, {sigma:.3e}"
        )));
    }
    if omega0 > grid.omega_max() {
        return Err(EosError::Range(format!(
            "signal center {omega0:.3e} beyond grid support {:.3e}",
            grid.omega_max()
        )));
    }
    if 4.0 * sigma > grid.omega_max() {
        return Err(EosError::Range(format!(
            "signal envelope width {sigma:.3e} too wide for grid support {:.3e}",
            grid.omega_max()
        )));
    }
    let coeffs: Vec<C64> = (0..grid.n_points())
        .map(|k| {
            let w = grid.omega(k);
            let g = w.sqrt() * (-(omega0 - w).powi(2) / (4.0 * sigma * sigma)).exp();
            C64::new(g, 0.0)
        })
        .collect();
    let mode = SpectralMode::new(grid.clone(), coeffs)?.normalized()?;
    let basis = ModeBasis::from_orthonormal(vec![mode.clone()], ModeBasis::DEFAULT_GRAM_TOL)?;
    let state = GaussianState::single_mode_squeezed(basis, r)?;
    Ok((mode, state))
}

/// Basis projections of a detection operator, the quadrature weight vector,
/// and the out-of-basis residual weight.
pub(crate) struct OperatorProjection {
    pub weights: Vec<f64>,
    pub residual_weight: f64,
}

pub(crate) fn project_operator(
    state: &GaussianState,
    op: &DetectionOperator,
) -> Result<OperatorProjection> {
    state.basis.grid().check_same(op.grid())?;
    let amps = state.basis.project(op.a_coeffs());
    let dw = op.grid().delta_omega();

    // guard: the basis must capture at least half of the signal-region
    // detection weight (the probe-region part is vacuum by construction)
    let signal = op.signal_mode();
    let sig_amps = state.basis.project(signal.coeffs());
    let sig_norm = signal.norm_sq();
    if sig_norm > 0.0 {
        let captured: f64 = sig_amps.iter().map(|c| c.norm_sqr()).sum();
        let residual = (sig_norm - captured).max(0.0);
        if residual > 0.5 * sig_norm {
            return Err(EosError::BasisTooSmall(format!(
                "basis captures only {:.1}% of the in-band detection weight",
                100.0 * captured / sig_norm
            )));
        }
    }

    let mut weights = Vec::with_capacity(2 * amps.len());
    let mut in_basis = 0.0;
    for a in &amps {
        in_basis += a.norm_sqr();
        weights.push(std::f64::consts::SQRT_2 * a.re);
        weights.push(-std::f64::consts::SQRT_2 * a.im);
    }
    let total = op.a_coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>() * dw
        + op.aux_coeffs().map_or(0.0, |x| x.iter().map(|c| c.norm_sqr()).sum::<f64>() * dw);
    let residual_weight = (total - in_basis).max(0.0);
    Ok(OperatorProjection { weights, residual_weight })
}

/// First and second central moments of a detection operator on a state.
/// Out-of-basis detection weight contributes vacuum noise.
pub fn detection_moments(state: &GaussianState, op: &DetectionOperator) -> Result<(f64, f64)> {
    let proj = project_operator(state, op)?;
    let d = 2 * state.n_modes();
    let mean: f64 = proj.weights.iter().zip(state.mean()).map(|(w, m)| w * m).sum();
    let sv = matvec(state.cov(), &proj.weights, d);
    let var: f64 = proj.weights.iter().zip(&sv).map(|(w, s)| w * s).sum::<f64>()
        + proj.residual_weight;
    Ok((mean, var))
}

/// Variance of `op` on `state` minus the variance of `baseline` on the
/// vacuum of the same basis; exactly zero when `state` is the vacuum and the
/// operators coincide.
pub fn variance_delta(
    state: &GaussianState,
    op: &DetectionOperator,
    baseline: &DetectionOperator,
) -> Result<f64> {
    let (_, v) = detection_moments(state, op)?;
    let vacuum = GaussianState::vacuum(state.basis.clone());
    let (_, v0) = detection_moments(&vacuum, baseline)?;
    Ok(v - v0)
}

/// Symmetrized covariance of two detection operators on a state,
/// `<{O1, O2}>/2 - <O1><O2>`.
pub fn detection_covariance(
    state: &GaussianState,
    op1: &DetectionOperator,
    op2: &DetectionOperator,
) -> Result<f64> {
    op1.grid().check_same(op2.grid())?;
    let p1 = project_operator(state, op1)?;
    let p2 = project_operator(state, op2)?;
    let d = 2 * state.n_modes();
    let sv = matvec(state.cov(), &p2.weights, d);
    let mut cov: f64 = p1.weights.iter().zip(&sv).map(|(w, s)| w * s).sum();

    // vacuum cross-covariance of the out-of-basis remainders
    let dw = op1.grid().delta_omega();
    let amps1 = state.basis.project(op1.a_coeffs());
    let amps2 = state.basis.project(op2.a_coeffs());
    let mut cross = C64::new(0.0, 0.0);
    for (x, y) in op1.a_coeffs().iter().zip(op2.a_coeffs()) {
        cross += x.conj() * y;
    }
    cross *= dw;
    if let (Some(p), Some(q)) = (op1.aux_coeffs(), op2.aux_coeffs()) {
        let mut aux = C64::new(0.0, 0.0);
        for (x, y) in p.iter().zip(q) {
            aux += x.conj() * y;
        }
        cross += aux * dw;
    }
    for (a, b) in amps1.iter().zip(&amps2) {
        cross -= a.conj() * b;
    }
    cov += cross.re;
    Ok(cov)
}

/// Husimi-Q of mode `mode_index` evaluated on a complex-amplitude grid:
/// a Gaussian in `(sqrt(2) Re alpha, sqrt(2) Im alpha)` with covariance
/// `cov_mode + I/2`.
pub fn husimi_q(
    state: &GaussianState,
    mode_index: usize,
    alpha_grid: &[C64],
) -> Result<Vec<f64>> {
    if mode_index >= state.n_modes() {
        return Err(EosError::Range(format!(
            "mode index {mode_index} beyond basis size {}",
            state.n_modes()
        )));
    }
    let c = state.mode_cov(mode_index);
    let q_cov = [c[0] + 0.5, c[1], c[2], c[3] + 0.5];
    let det = q_cov[0] * q_cov[3] - q_cov[1] * q_cov[2];
    if !(det > 0.0) || q_cov[0] <= 0.0 {
        return Err(EosError::Invariant(format!(
            "Husimi covariance not positive definite (det {det:.3e})"
        )));
    }
    let inv = inv2(&q_cov).ok_or_else(|| {
        EosError::Invariant("Husimi covariance is singular".into())
    })?;
    let mean = state.mode_mean(mode_index);
    let norm = 1.0 / (std::f64::consts::PI * det.sqrt());
    Ok(alpha_grid
        .iter()
        .map(|a| {
            let dx = std::f64::consts::SQRT_2 * a.re - mean[0];
            let dp = std::f64::consts::SQRT_2 * a.im - mean[1];
            let quad = dx * (inv[0] * dx + inv[1] * dp) + dp * (inv[2] * dx + inv[3] * dp);
            norm * (-0.5 * quad).exp()
        })
        .collect())
}

#[cfg(test)]
mod tests;
