use approx::assert_relative_eq;
use num_complex::Complex64 as C64;

use crate::chain::DetectionOperator;
use crate::error::EosError;
use crate::field::{FrequencyGrid, SpectralMode};
use crate::units::thz;

use super::*;

fn grid() -> FrequencyGrid {
    FrequencyGrid::from_max(thz(400.0), 512).unwrap()
}

fn disjoint_flat_mode(grid: &FrequencyGrid, lo: usize, len: usize) -> SpectralMode {
    let mut m = SpectralMode::zero(grid.clone());
    for k in lo..lo + len {
        m.coeffs_mut()[k] = C64::new(1.0, 0.0);
    }
    m.normalized().unwrap()
}

#[test]
fn vacuum_variance_of_any_unit_quadrature_is_half() {
    let g = grid();
    let m = disjoint_flat_mode(&g, 10, 40);
    let op = DetectionOperator::from_mode_quadrature(&m).unwrap();
    let basis = ModeBasis::from_orthonormal(vec![m], ModeBasis::DEFAULT_GRAM_TOL).unwrap();
    let state = GaussianState::vacuum(basis);
    let (mean, var) = detection_moments(&state, &op).unwrap();
    assert!(mean.abs() < 1e-15);
    assert_relative_eq!(var, 0.5, max_relative = 1e-12);
}

#[test]
fn squeezed_closed_forms() {
    let g = grid();
    let (mode, state) = squeezed_signal(thz(20.0), thz(4.0), 0.5, &g).unwrap();
    let op_x = DetectionOperator::from_mode_quadrature(&mode).unwrap();
    let op_p = DetectionOperator::from_mode_quadrature(&mode.hilbert()).unwrap();
    let (_, vx) = detection_moments(&state, &op_x).unwrap();
    let (_, vp) = detection_moments(&state, &op_p).unwrap();
    assert_relative_eq!(vx, 0.18393972058572117, epsilon = 1e-9);
    assert_relative_eq!(vp, 1.3591409142295226, epsilon = 1e-9);
    // variance delta against the same operator on vacuum
    let dv = variance_delta(&state, &op_x, &op_x).unwrap();
    assert_relative_eq!(dv, -0.3160602794142788, epsilon = 1e-9);
    // vacuum in, zero out
    let vac = GaussianState::vacuum(state.basis().clone());
    assert!(variance_delta(&vac, &op_x, &op_x).unwrap().abs() < 1e-14);
}

#[test]
fn r_zero_is_vacuum() {
    let g = grid();
    let (_, state) = squeezed_signal(thz(20.0), thz(4.0), 0.0, &g).unwrap();
    let c = state.mode_cov(0);
    assert_relative_eq!(c[0], 0.5, epsilon = 1e-15);
    assert_relative_eq!(c[3], 0.5, epsilon = 1e-15);
    assert_eq!(c[1], 0.0);
}

#[test]
fn signal_mode_peak_sits_just_above_center() {
    // dense scan oracle for the argmax of sqrt(w) * gaussian
    let g = FrequencyGrid::from_max(thz(400.0), 8192).unwrap();
    let omega0 = thz(20.0);
    let sigma = thz(4.0);
    let (mode, _) = squeezed_signal(omega0, sigma, 0.5, &g).unwrap();
    let (kmax, _) = mode
        .coeffs()
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
        .unwrap();
    let grid_peak = g.omega(kmax);
    // scan the continuum expression densely
    let mut best = (0.0, -1.0);
    for i in 0..200_000 {
        let w = omega0 * 0.5 + (i as f64) * (2.0 * omega0 - 0.5 * omega0) / 200_000.0;
        let v = w.sqrt() * (-(omega0 - w).powi(2) / (4.0 * sigma * sigma)).exp();
        if v > best.1 {
            best = (w, v);
        }
    }
    assert!(best.0 > omega0, "peak should sit above the center");
    assert!((grid_peak - best.0).abs() <= g.delta_omega());
}

#[test]
fn squeezed_signal_range_errors() {
    let g = grid();
    assert!(matches!(
        squeezed_signal(thz(20.0), thz(150.0), 0.5, &g),
        Err(EosError::Range(_))
    ));
    assert!(matches!(
        squeezed_signal(thz(500.0), thz(4.0), 0.5, &g),
        Err(EosError::Range(_))
    ));
    assert!(squeezed_signal(-1.0, thz(4.0), 0.5, &g).is_err());
}

#[test]
fn efficiency_mixing_matches_beam_splitter_oracle() {
    let g = grid();
    let (mode, state) = squeezed_signal(thz(20.0), thz(4.0), 0.5, &g).unwrap();
    let other = disjoint_flat_mode(&g, 400, 50);
    assert!(crate::field::overlap(&mode, &other).unwrap().norm() < 1e-12);

    let gamma: f64 = 0.83;
    let mixed = mode
        .scaled(C64::new(gamma, 0.0))
        .add(&other.scaled(C64::new((1.0 - gamma * gamma).sqrt(), 0.0)))
        .unwrap();
    let op = DetectionOperator::from_mode_quadrature(&mixed).unwrap();

    // two-mode beam-splitter oracle: mix the squeezed mode with vacuum at
    // transmissivity gamma^2, then measure the x quadrature of the output
    let basis2 = ModeBasis::from_orthonormal(
        vec![mode.clone(), other.clone()],
        ModeBasis::DEFAULT_GRAM_TOL,
    )
    .unwrap();
    let mut two_mode = GaussianState::vacuum(basis2.clone());
    // embed squeezing on mode 0
    let d = 4;
    let mut cov = two_mode.cov().to_vec();
    cov[0] = 0.5 * (-1.0f64).exp();
    cov[d + 1] = 0.5 * (1.0f64).exp();
    two_mode = GaussianState::from_parts(basis2, two_mode.mean().to_vec(), cov).unwrap();
    let t = gamma;
    let rsl = (1.0 - gamma * gamma).sqrt();
    #[rustfmt::skip]
    let bs: Vec<f64> = vec![
        t,   0.0, rsl, 0.0,
        0.0, t,   0.0, rsl,
        -rsl, 0.0, t,  0.0,
        0.0, -rsl, 0.0, t,
    ];
    two_mode.apply_symplectic(&bs).unwrap();
    let oracle_var = two_mode.cov()[0];

    let (_, var) = detection_moments(&state, &op).unwrap();
    assert_relative_eq!(var, oracle_var, epsilon = 1e-9);
    // closed form: gamma^2 e^{-2r}/2 + (1 - gamma^2)/2
    let closed = gamma * gamma * 0.5 * (-1.0f64).exp() + (1.0 - gamma * gamma) * 0.5;
    assert_relative_eq!(var, closed, epsilon = 1e-9);
}

#[test]
fn out_of_basis_weight_counts_as_vacuum() {
    let g = grid();
    let (mode, state) = squeezed_signal(thz(20.0), thz(4.0), 0.5, &g).unwrap();
    // operator with deliberate probe-band weight outside the basis but with
    // its signal-band content fully captured
    let stray = disjoint_flat_mode(&g, 300, 60);
    let a: Vec<C64> = mode
        .coeffs()
        .iter()
        .zip(stray.coeffs())
        .map(|(m, s)| 0.6 * m + 0.8 * s)
        .collect();
    let op = DetectionOperator::from_raw(g.clone(), a, None, 1.0, thz(150.0), 0.0).unwrap();
    let (_, var) = detection_moments(&state, &op).unwrap();
    // half the weight squeezed, half vacuum: 0.36 e^{-1}/2 + 0.64 * 1/2
    let expect = 0.36 * 0.5 * (-1.0f64).exp() + 0.64 * 0.5;
    assert_relative_eq!(var, expect, epsilon = 1e-9);
}

#[test]
fn basis_too_small_guard_fires_on_in_band_mismatch() {
    let g = grid();
    let (_, state) = squeezed_signal(thz(20.0), thz(4.0), 0.5, &g).unwrap();
    // an in-band operator nearly orthogonal to the signal mode
    let op_mode = disjoint_flat_mode(&g, 100, 30);
    let op = DetectionOperator::from_mode_quadrature(&op_mode).unwrap();
    assert!(matches!(
        detection_moments(&state, &op),
        Err(EosError::BasisTooSmall(_))
    ));
}

#[test]
fn dense_extended_basis_oracle_agrees() {
    // randomized states on <= 3 modes vs an explicit extended-basis
    // computation of the same moments
    let g = grid();
    let modes = vec![
        disjoint_flat_mode(&g, 0, 30),
        disjoint_flat_mode(&g, 40, 30),
        disjoint_flat_mode(&g, 80, 30),
    ];
    let basis = ModeBasis::from_orthonormal(modes.clone(), ModeBasis::DEFAULT_GRAM_TOL).unwrap();

    let mut rng_state = 0x9e3779b97f4a7c15u64;
    let mut next = move || {
        rng_state = rng_state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((rng_state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
    };

    for trial in 0..100 {
        // random pure-Gaussian state: squeeze + rotate each mode, then a
        // passive mixing rotation between modes, plus a random mean
        let mut state = GaussianState::vacuum(basis.clone());
        let d = 6;
        let mut s_total: Vec<f64> = (0..d * d)
            .map(|i| if i % (d + 1) == 0 { 1.0 } else { 0.0 })
            .collect();
        for m in 0..3 {
            let r = next();
            let phi = next() * std::f64::consts::PI;
            let bog = BogoliubovTransform::squeezer(r, phi);
            let s1 = bog.to_symplectic();
            // embed into the 3-mode symplectic
            let mut s_embed: Vec<f64> = (0..d * d)
                .map(|i| if i % (d + 1) == 0 { 1.0 } else { 0.0 })
                .collect();
            for a in 0..2 {
                for b in 0..2 {
                    s_embed[(2 * m + a) * d + 2 * m + b] = s1[a * 2 + b];
                }
            }
            s_total = super::linalg::matmul(&s_embed, &s_total, d);
        }
        state.apply_symplectic(&s_total).unwrap();
        for i in 0..3 {
            state.displace(i, next(), next());
        }
        state.validate().unwrap();

        // random Hermitian observable over the three modes plus a stray
        // component
        let mut a = vec![C64::new(0.0, 0.0); g.n_points()];
        for (mi, m) in modes.iter().enumerate() {
            let c = C64::new(next(), next());
            let _ = mi;
            for (k, v) in m.coeffs().iter().enumerate() {
                a[k] += c * v;
            }
        }
        let stray = disjoint_flat_mode(&g, 130, 20);
        let cs = C64::new(0.3 * next(), 0.3 * next());
        for (k, v) in stray.coeffs().iter().enumerate() {
            a[k] += cs * v;
        }
        let op = DetectionOperator::from_raw(g.clone(), a, None, 1.0, g.omega_max(), 0.0).unwrap();

        let (mean, var) = detection_moments(&state, &op).unwrap();

        // oracle: extend the basis with the stray mode and evaluate the
        // quadratic form on the explicit 4-mode covariance
        let ext = ModeBasis::from_orthonormal(
            vec![
                modes[0].clone(),
                modes[1].clone(),
                modes[2].clone(),
                stray.clone(),
            ],
            ModeBasis::DEFAULT_GRAM_TOL,
        )
        .unwrap();
        let amps = ext.project(op.a_coeffs());
        let d4 = 8;
        let mut cov4 = vec![0.0; d4 * d4];
        let mut mean4 = vec![0.0; d4];
        for i in 0..d4 {
            cov4[i * d4 + i] = 0.5;
        }
        for i in 0..6 {
            mean4[i] = state.mean()[i];
            for j in 0..6 {
                cov4[i * d4 + j] = state.cov()[i * 6 + j];
            }
        }
        let mut w4 = vec![0.0; d4];
        for (i, aamp) in amps.iter().enumerate() {
            w4[2 * i] = std::f64::consts::SQRT_2 * aamp.re;
            w4[2 * i + 1] = -std::f64::consts::SQRT_2 * aamp.im;
        }
        let mv = super::linalg::matvec(&cov4, &w4, d4);
        let var_oracle: f64 = w4.iter().zip(&mv).map(|(x, y)| x * y).sum();
        let mean_oracle: f64 = w4.iter().zip(&mean4).map(|(x, y)| x * y).sum();

        assert!(
            (var - var_oracle).abs() <= 1e-9 * (1.0 + var_oracle.abs()),
            "trial {trial}: var {var} vs oracle {var_oracle}"
        );
        assert!(
            (mean - mean_oracle).abs() <= 1e-9 * (1.0 + mean_oracle.abs()),
            "trial {trial}: mean {mean} vs oracle {mean_oracle}"
        );
    }
}

#[test]
fn measured_statistics_need_only_classical_positivity() {
    let g = grid();
    let m = disjoint_flat_mode(&g, 5, 20);
    let basis = ModeBasis::from_orthonormal(vec![m], ModeBasis::DEFAULT_GRAM_TOL).unwrap();
    // slightly below the symplectic bound but classically positive:
    // rejected as a quantum state, accepted as measured statistics
    let cov = vec![0.494, 0.0, 0.0, 0.502];
    assert!(GaussianState::from_parts(basis.clone(), vec![0.0; 2], cov.clone()).is_err());
    let st = GaussianState::from_measured(basis.clone(), vec![0.1, -0.2], cov).unwrap();
    let q = husimi_q(&st, 0, &[C64::new(0.0, 0.0)]).unwrap();
    assert!(q[0] > 0.0);
    // a non-positive covariance is rejected either way
    let bad = vec![0.5, 0.9, 0.9, 0.5];
    assert!(GaussianState::from_measured(basis, vec![0.0; 2], bad).is_err());
}

#[test]
fn uncertainty_relation_checked() {
    let g = grid();
    let m = disjoint_flat_mode(&g, 5, 20);
    let basis = ModeBasis::from_orthonormal(vec![m], ModeBasis::DEFAULT_GRAM_TOL).unwrap();
    let vac = GaussianState::vacuum(basis.clone());
    assert!(vac.validate().is_ok());
    assert!(vac.uncertainty_min_eigenvalue() > -1e-12);

    // an unphysical covariance below the vacuum limit must be rejected
    let cov = vec![0.1, 0.0, 0.0, 0.1];
    assert!(GaussianState::from_parts(basis.clone(), vec![0.0; 2], cov).is_err());

    // squeezed states remain physical for a range of r and angles
    for i in 0..8 {
        let r = 0.25 * (i as f64 + 1.0);
        let bog = BogoliubovTransform::squeezer(r, 0.4 * i as f64);
        bog.check_symplectic(1e-9).unwrap();
        let mut st = GaussianState::vacuum(basis.clone());
        st.apply_symplectic(&bog.to_symplectic()).unwrap();
        st.validate().unwrap();
        // vacuum variance 1/2 maps to at least e^{-2r}/2 in every direction
        let eigs = super::sym_eigenvalues(&st.cov().to_vec(), 2);
        let min = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min >= 0.5 * (-2.0 * r).exp() - 1e-12);
    }
}

#[test]
fn bogoliubov_squeezer_is_symplectic_and_squeezes() {
    let bog = BogoliubovTransform::squeezer(0.5, 0.0);
    bog.check_symplectic(1e-12).unwrap();
    let s = bog.to_symplectic();
    // b' = cosh b - sinh b†  ->  x' = (cosh - sinh) x = e^{-r} x
    assert_relative_eq!(s[0], (-0.5f64).exp(), epsilon = 1e-12);
    assert_relative_eq!(s[3], (0.5f64).exp(), epsilon = 1e-12);
    let bad = BogoliubovTransform::new(
        1,
        vec![C64::new(1.0, 0.0)],
        vec![C64::new(0.5, 0.0)],
    );
    assert!(bad.check_symplectic(1e-9).is_err());
}

#[test]
fn husimi_vacuum_and_displaced_and_squeezed() {
    let g = grid();
    let (_, state) = squeezed_signal(thz(20.0), thz(4.0), 0.5, &g).unwrap();

    // vacuum: Q(0) = 1/pi, Q(alpha) = exp(-|alpha|^2)/pi
    let vac = GaussianState::vacuum(state.basis().clone());
    let q0 = husimi_q(&vac, 0, &[C64::new(0.0, 0.0)]).unwrap()[0];
    assert_relative_eq!(q0, 1.0 / std::f64::consts::PI, epsilon = 1e-12);
    let a = C64::new(0.7, -0.4);
    let qa = husimi_q(&vac, 0, &[a]).unwrap()[0];
    assert_relative_eq!(
        qa,
        (-a.norm_sqr()).exp() / std::f64::consts::PI,
        epsilon = 1e-12
    );

    // displaced vacuum: peak moves to (x + i p)/sqrt(2)
    let mut disp = GaussianState::vacuum(state.basis().clone());
    disp.displace(0, 1.2, -0.6);
    let peak = C64::new(1.2 / std::f64::consts::SQRT_2, -0.6 / std::f64::consts::SQRT_2);
    let qp = husimi_q(&disp, 0, &[peak]).unwrap()[0];
    assert_relative_eq!(qp, 1.0 / std::f64::consts::PI, epsilon = 1e-12);

    // squeezed: numerical marginal variances of the Q distribution equal
    // (e^{-2r} + 1)/2 and (e^{+2r} + 1)/2
    let n = 161;
    let half = 5.0;
    let step = 2.0 * half / (n - 1) as f64;
    let mut alphas = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            alphas.push(C64::new(-half + i as f64 * step, -half + j as f64 * step));
        }
    }
    let q = husimi_q(&state, 0, &alphas).unwrap();
    let cell = step * step;
    let total: f64 = q.iter().sum::<f64>() * cell;
    assert!((total - 1.0).abs() < 1e-6, "Q normalization {total}");
    assert!(q.iter().all(|&v| v >= 0.0));
    let mut vx = 0.0;
    let mut vp = 0.0;
    for (al, qi) in alphas.iter().zip(&q) {
        let x = std::f64::consts::SQRT_2 * al.re;
        let p = std::f64::consts::SQRT_2 * al.im;
        vx += x * x * qi * cell / 2.0;
        vp += p * p * qi * cell / 2.0;
    }
    // the (x, p) variances of Q carry a 1/2 Jacobian when integrated in
    // d^2 alpha = dx dp / 2
    vx *= 2.0;
    vp *= 2.0;
    assert_relative_eq!(vx, 0.5 * ((-1.0f64).exp() + 1.0), max_relative = 1e-5);
    assert_relative_eq!(vp, 0.5 * ((1.0f64).exp() + 1.0), max_relative = 1e-5);
}

#[test]
fn husimi_rejects_bad_inputs() {
    let g = grid();
    let (_, state) = squeezed_signal(thz(20.0), thz(4.0), 0.5, &g).unwrap();
    assert!(matches!(
        husimi_q(&state, 3, &[C64::new(0.0, 0.0)]),
        Err(EosError::Range(_))
    ));
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        // every squeezed-and-rotated vacuum stays a physical state and its
        // Bogoliubov transform stays symplectic
        #[test]
        fn constructed_covariances_respect_uncertainty(
            r in -1.5f64..1.5,
            phi in 0.0f64..std::f64::consts::PI,
        ) {
            let g = FrequencyGrid::new(32, 1.0).unwrap();
            let m = disjoint_flat_mode(&g, 0, 8);
            let basis =
                ModeBasis::from_orthonormal(vec![m], ModeBasis::DEFAULT_GRAM_TOL).unwrap();
            let bog = BogoliubovTransform::squeezer(r, phi);
            bog.check_symplectic(1e-9).unwrap();
            let mut st = GaussianState::vacuum(basis);
            st.apply_symplectic(&bog.to_symplectic()).unwrap();
            prop_assert!(st.validate().is_ok());
            prop_assert!(st.uncertainty_min_eigenvalue() > -1e-10);
        }
    }
}

#[test]
fn orthonormalize_drops_degenerate_members() {
    let g = grid();
    let m1 = disjoint_flat_mode(&g, 0, 20);
    let m2 = disjoint_flat_mode(&g, 10, 20); // overlaps m1
    let dup = m1.clone();
    let basis =
        ModeBasis::orthonormalize(vec![m1, dup, m2], ModeBasis::DEFAULT_GRAM_TOL).unwrap();
    assert_eq!(basis.len(), 2);
    for i in 0..2 {
        for j in 0..2 {
            let gm = crate::field::overlap(&basis.modes()[i], &basis.modes()[j]).unwrap();
            let expect = if i == j { 1.0 } else { 0.0 };
            assert!((gm - C64::new(expect, 0.0)).norm() < 1e-10);
        }
    }
}
