//! Experiment orchestration: the four front-end commands build chains from a
//! configuration, evaluate them, and emit CSV/SVG/manifest files. All heavy
//! lifting happens in the library modules; this layer owns file layout and
//! the derived plots.

use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;

use crate::chain::{detect, DetectionOperator, EosChain, ProbePulse, ProbeShape};
use crate::config::ExperimentConfig;
use crate::error::{EosError, Result};
use crate::field::{
    bandlimited_e, bandlimited_h, overlap_slices, sampling_kernel, SpectralMode,
};
use crate::gaussian::{
    detection_covariance, detection_moments, husimi_q, sample_shots, variance_delta,
    GaussianState, ModeBasis,
};
use crate::metrics::{
    bandwidth_sweep, optimize_bandwidth, GammaFloorMode, Quadrature, ResourceConstraint,
};
use crate::report::{self, Manifest, Series};
use crate::units::{fs, thz, to_fs, to_thz};

/// Outcome of one command: the files it wrote.
pub struct RunOutput {
    pub files: Vec<PathBuf>,
}

fn finish(mut manifest: Manifest, files: Vec<PathBuf>, dir: &Path) -> Result<RunOutput> {
    for f in &files {
        manifest.record(f);
    }
    let mpath = manifest.write(dir)?;
    let mut all = files;
    all.push(mpath);
    Ok(RunOutput { files: all })
}

/// Time scan of the per-quadrature variances of a squeezed signal.
pub struct TomographyScan {
    pub times: Vec<f64>,
    pub dv_e: Vec<f64>,
    pub dv_h: Vec<f64>,
    pub cov_eh: Vec<f64>,
    pub pred_e: Vec<f64>,
    pub pred_h: Vec<f64>,
}

/// Detected joint statistics of the multiplexed pair at one sampling time.
pub struct JointReadout {
    pub mean: [f64; 2],
    pub cov: [f64; 4],
}

/// Single-mode prediction for the variance shift of a squeezed mode seen
/// through a gate with complex coupling `amp`.
pub fn single_mode_variance_shift(amp: C64, r: f64) -> f64 {
    let w = amp.norm_sqr();
    let phi = amp.arg();
    let c = phi.cos().powi(2);
    let s = phi.sin().powi(2);
    w * (((-2.0 * r).exp() - 1.0) * c + ((2.0 * r).exp() - 1.0) * s)
}

/// Basis spanning the signal mode and the in-band parts of both gates.
pub fn tomography_basis(
    signal: &SpectralMode,
    op_e: &DetectionOperator,
    op_h: &DetectionOperator,
) -> Result<ModeBasis> {
    ModeBasis::orthonormalize(
        vec![signal.clone(), op_e.signal_mode(), op_h.signal_mode()],
        ModeBasis::DEFAULT_GRAM_TOL,
    )
}

/// Squeezed state of the configured signal expressed on `basis` (squeezing
/// on the first basis mode, vacuum elsewhere).
pub fn embed_squeezed_state(basis: ModeBasis, r: f64) -> Result<GaussianState> {
    let m = basis.len();
    let d = 2 * m;
    let mut cov = vec![0.0; d * d];
    for i in 0..d {
        cov[i * d + i] = 0.5;
    }
    cov[0] = 0.5 * (-2.0 * r).exp();
    cov[d + 1] = 0.5 * (2.0 * r).exp();
    GaussianState::from_parts(basis, vec![0.0; d], cov)
}

/// Evaluate the multiplexed pair on the squeezed signal at time `t`.
pub fn joint_readout(
    chain: &EosChain,
    signal: &SpectralMode,
    r: f64,
    t: f64,
) -> Result<(JointReadout, DetectionOperator, DetectionOperator)> {
    let (op_e, op_h) = detect::multiplexed_eh(chain, t)?;
    let basis = tomography_basis(signal, &op_e, &op_h)?;
    let state = embed_squeezed_state(basis, r)?;
    let (me, ve) = detection_moments(&state, &op_e)?;
    let (mh, vh) = detection_moments(&state, &op_h)?;
    let c = detection_covariance(&state, &op_e, &op_h)?;
    Ok((JointReadout { mean: [me, mh], cov: [ve, c, c, vh] }, op_e, op_h))
}

/// Scan the detected variance shifts over the configured time window.
pub fn tomography_scan(cfg: &ExperimentConfig, chain: &EosChain) -> Result<TomographyScan> {
    let grid = cfg.grid()?;
    let (signal, _) = crate::gaussian::squeezed_signal(
        thz(cfg.signal.omega0_thz),
        thz(cfg.signal.sigma_thz),
        cfg.signal.r,
        &grid,
    )?;
    let r = cfg.signal.r;
    let (op_e0, op_h0) = detect::multiplexed_eh(chain, 0.0)?;
    let dw = grid.delta_omega();

    let tb = &cfg.tomography;
    let n_t = ((tb.t_max_fs - tb.t_min_fs) / tb.t_step_fs).round() as usize + 1;
    let mut out = TomographyScan {
        times: Vec::with_capacity(n_t),
        dv_e: Vec::with_capacity(n_t),
        dv_h: Vec::with_capacity(n_t),
        cov_eh: Vec::with_capacity(n_t),
        pred_e: Vec::with_capacity(n_t),
        pred_h: Vec::with_capacity(n_t),
    };
    for i in 0..n_t {
        let t = fs(tb.t_min_fs + i as f64 * tb.t_step_fs);
        let op_e = op_e0.at_time(t);
        let op_h = op_h0.at_time(t);
        let basis = tomography_basis(&signal, &op_e, &op_h)?;
        let state = embed_squeezed_state(basis.clone(), r)?;
        let vac = GaussianState::vacuum(basis);
        let dv_e = variance_delta(&state, &op_e, &op_e)?;
        let dv_h = variance_delta(&state, &op_h, &op_h)?;
        let c_sig = detection_covariance(&state, &op_e, &op_h)?;
        let c_vac = detection_covariance(&vac, &op_e, &op_h)?;
        let amp_e = overlap_slices(signal.coeffs(), op_e.a_coeffs(), dw);
        let amp_h = overlap_slices(signal.coeffs(), op_h.a_coeffs(), dw);
        out.times.push(t);
        out.dv_e.push(dv_e);
        out.dv_h.push(dv_h);
        out.cov_eh.push(c_sig - c_vac);
        out.pred_e.push(single_mode_variance_shift(amp_e, r));
        out.pred_h.push(single_mode_variance_shift(amp_h, r));
    }
    Ok(out)
}

fn default_time_axis(band_edge: f64, n: usize) -> Vec<f64> {
    // a few oscillation periods of the band edge on each side
    let span = 8.0 * std::f64::consts::PI / band_edge;
    (0..n)
        .map(|i| -span + 2.0 * span * i as f64 / (n - 1) as f64)
        .collect()
}

/// Band-limited quadrature waveforms and the chain's coupled gate profiles.
pub fn run_waveforms(cfg: &ExperimentConfig, dir: &Path) -> Result<RunOutput> {
    let grid = cfg.grid()?;
    let consts = cfg.constants();
    let crystal = cfg.crystal();
    let n_of = |w: f64| crystal.n(w);
    let wm = cfg.band_edge();
    let manifest = Manifest::new("waveforms", &cfg.to_toml(), 0);

    let e_bl = bandlimited_e(0.0, wm, &n_of, &grid, &consts)?;
    let h_bl = bandlimited_h(0.0, wm, &n_of, &grid, &consts)?;

    let chain = cfg.chain()?;
    let (op_e, op_h) = detect::multiplexed_eh(&chain, 0.0)?;
    let gate_e = op_e.signal_mode();
    let gate_h = op_h.signal_mode();

    let ts = default_time_axis(wm, 801);
    let k_e = sampling_kernel(&e_bl, &n_of, &consts, &ts);
    let k_h = sampling_kernel(&h_bl, &n_of, &consts, &ts);
    // gate kernels, rescaled to the target amplitude for overlay
    let scale_e = (e_bl.norm_sq() / gate_e.norm_sq().max(1e-300)).sqrt();
    let scale_h = (h_bl.norm_sq() / gate_h.norm_sq().max(1e-300)).sqrt();
    let k_ge: Vec<f64> = sampling_kernel(&gate_e, &n_of, &consts, &ts)
        .into_iter()
        .map(|v| v * scale_e)
        .collect();
    let k_gh: Vec<f64> = sampling_kernel(&gate_h, &n_of, &consts, &ts)
        .into_iter()
        .map(|v| v * scale_h)
        .collect();

    let mut files = Vec::new();
    let rows: Vec<Vec<f64>> = ts
        .iter()
        .enumerate()
        .map(|(i, &t)| vec![to_fs(t), k_e[i], k_h[i], k_ge[i], k_gh[i]])
        .collect();
    let wf_path = dir.join("waveforms.csv");
    report::write_csv(&wf_path, &["t_fs", "e_bl", "h_bl", "eos_e", "eos_h"], &rows)?;
    files.push(wf_path);

    for (name, op) in [("operator_e.csv", &op_e), ("operator_h.csv", &op_h)] {
        let rows: Vec<Vec<f64>> = (0..grid.n_points())
            .map(|k| {
                let c = op.a_coeffs()[k];
                vec![to_thz(grid.omega(k)), c.re, c.im]
            })
            .collect();
        let p = dir.join(name);
        report::write_csv(&p, &["omega_thz", "re_a", "im_a"], &rows)?;
        files.push(p);
    }

    if cfg.output.svg {
        let tfs: Vec<f64> = ts.iter().map(|&t| to_fs(t)).collect();
        let svg = report::svg_lines(
            "Band-limited quadrature kernels and coupled gates",
            "t (fs)",
            "sampling kernel",
            &[
                Series { label: "E band-limited", xs: &tfs, ys: &k_e },
                Series { label: "H band-limited", xs: &tfs, ys: &k_h },
                Series { label: "EOS gate (E)", xs: &tfs, ys: &k_ge },
                Series { label: "EOS gate (H)", xs: &tfs, ys: &k_gh },
            ],
            false,
        );
        let p = dir.join("waveforms.svg");
        report::write_atomic(&p, &svg)?;
        files.push(p);
    }
    finish(manifest, files, dir)
}

/// Bandwidth sweep plus constrained optimum for one quadrature.
pub fn run_sweep(
    cfg: &ExperimentConfig,
    quadrature: Quadrature,
    constraint: ResourceConstraint,
    dir: &Path,
) -> Result<RunOutput> {
    let setup = cfg.sweep_setup()?;
    let manifest = Manifest::new(&format!("sweep-{quadrature}-{constraint}"), &cfg.to_toml(), 0);
    let sweep = bandwidth_sweep(&setup, quadrature, constraint, &cfg.sweep_bandwidths())?;
    let opt = optimize_bandwidth(
        &setup,
        quadrature,
        constraint,
        GammaFloorMode::FullBandReference,
        cfg.sweep.scan_points,
    )?;

    let mut files = Vec::new();
    let rows: Vec<Vec<f64>> = (0..sweep.bandwidths.len())
        .map(|i| {
            vec![
                to_thz(sweep.bandwidths[i]),
                sweep.theta_bl[i],
                sweep.theta_full[i],
                sweep.gamma[i],
                match constraint {
                    ResourceConstraint::ConstantPhotonNumber => 0.0,
                    ResourceConstraint::ConstantIntensity => 1.0,
                },
            ]
        })
        .collect();
    let sweep_path = dir.join(format!("sweep_{quadrature}_{constraint}.csv"));
    report::write_csv(
        &sweep_path,
        &["bandwidth_thz", "theta_bl", "theta_full", "gamma", "constraint"],
        &rows,
    )?;
    files.push(sweep_path);

    let opt_path = dir.join(format!("optimum_{quadrature}_{constraint}.json"));
    let json = serde_json::json!({
        "quadrature": quadrature.to_string(),
        "constraint": constraint.to_string(),
        "bandwidth_thz": to_thz(opt.bandwidth),
        "theta_bl": opt.theta_bl,
        "gamma": opt.gamma,
        "gamma_floor": opt.gamma_floor,
        "skipped_points": sweep.skipped.len(),
    });
    report::write_atomic(&opt_path, &serde_json::to_string_pretty(&json).unwrap())?;
    files.push(opt_path);

    if cfg.output.svg {
        let bthz: Vec<f64> = sweep.bandwidths.iter().map(|&b| to_thz(b)).collect();
        let svg = report::svg_lines(
            &format!("Coupling and matching vs bandwidth ({quadrature}, {constraint})"),
            "probe bandwidth (THz)",
            "value",
            &[
                Series { label: "theta band-limited", xs: &bthz, ys: &sweep.theta_bl },
                Series { label: "theta full", xs: &bthz, ys: &sweep.theta_full },
                Series { label: "gamma", xs: &bthz, ys: &sweep.gamma },
            ],
            true,
        );
        let p = dir.join(format!("sweep_{quadrature}_{constraint}.svg"));
        report::write_atomic(&p, &svg)?;
        files.push(p);
    }
    finish(manifest, files, dir)
}

/// Time-resolved variance tomography, Husimi grid and optional shot samples.
pub fn run_tomography(
    cfg: &ExperimentConfig,
    shots: usize,
    seed: u64,
    dir: &Path,
) -> Result<RunOutput> {
    let manifest = Manifest::new("tomography", &cfg.to_toml(), seed);
    let chain = cfg.chain()?;
    let scan = tomography_scan(cfg, &chain)?;

    let mut files = Vec::new();
    let rows: Vec<Vec<f64>> = (0..scan.times.len())
        .map(|i| {
            vec![
                to_fs(scan.times[i]),
                scan.dv_e[i],
                scan.dv_h[i],
                scan.cov_eh[i],
                scan.pred_e[i],
                scan.pred_h[i],
            ]
        })
        .collect();
    let scan_path = dir.join("tomography.csv");
    report::write_csv(
        &scan_path,
        &["t_fs", "dv_e", "dv_h", "cov_eh", "pred_e", "pred_h"],
        &rows,
    )?;
    files.push(scan_path);

    // joint readout at the center of the scan drives the reconstruction
    let grid = cfg.grid()?;
    let (signal, _) = crate::gaussian::squeezed_signal(
        thz(cfg.signal.omega0_thz),
        thz(cfg.signal.sigma_thz),
        cfg.signal.r,
        &grid,
    )?;
    let (joint, op_e, op_h) = joint_readout(&chain, &signal, cfg.signal.r, 0.0)?;
    let recon = reconstructed_state(&grid, &joint)?;

    let tbl = &cfg.tomography;
    let n = tbl.husimi_points.max(3);
    let half = tbl.husimi_half_width;
    let step = 2.0 * half / (n - 1) as f64;
    let mut alphas = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            alphas.push(C64::new(-half + i as f64 * step, -half + j as f64 * step));
        }
    }
    let q = husimi_q(&recon, 0, &alphas)?;
    let rows: Vec<Vec<f64>> = alphas
        .iter()
        .zip(&q)
        .map(|(a, &v)| vec![a.re, a.im, v])
        .collect();
    let q_path = dir.join("husimi.csv");
    report::write_csv(&q_path, &["re_alpha", "im_alpha", "q"], &rows)?;
    files.push(q_path);

    if shots > 0 {
        let basis = tomography_basis(&signal, &op_e, &op_h)?;
        let state = embed_squeezed_state(basis, cfg.signal.r)?;
        let samples = sample_shots(&state, &op_e, &op_h, shots, seed)?;
        let rows: Vec<Vec<f64>> = samples
            .iter()
            .enumerate()
            .map(|(i, (e, h))| vec![i as f64, *e, *h])
            .collect();
        let s_path = dir.join("shots.csv");
        report::write_csv(&s_path, &["shot_index", "e", "h"], &rows)?;
        files.push(s_path);
    }

    if cfg.output.svg {
        let tfs: Vec<f64> = scan.times.iter().map(|&t| to_fs(t)).collect();
        let svg = report::svg_lines(
            "Detected variance shifts vs sampling time",
            "t (fs)",
            "variance shift (shot-noise units)",
            &[
                Series { label: "dV E detected", xs: &tfs, ys: &scan.dv_e },
                Series { label: "dV H detected", xs: &tfs, ys: &scan.dv_h },
                Series { label: "E-H covariance", xs: &tfs, ys: &scan.cov_eh },
                Series { label: "dV E rescaled signal", xs: &tfs, ys: &scan.pred_e },
                Series { label: "dV H rescaled signal", xs: &tfs, ys: &scan.pred_h },
            ],
            false,
        );
        let p = dir.join("tomography.svg");
        report::write_atomic(&p, &svg)?;
        files.push(p);

        let axis: Vec<f64> = (0..n).map(|i| -half + i as f64 * step).collect();
        let heat = report::svg_heatmap("Husimi Q of the reconstructed mode", &axis, &axis, &q, n, n);
        let hp = dir.join("husimi.svg");
        report::write_atomic(&hp, &heat)?;
        files.push(hp);
    }
    finish(manifest, files, dir)
}

/// Single-mode Gaussian state implied by a joint readout, in shot-noise
/// units; its Husimi function is the detected covariance plus vacuum.
/// Asymmetric couplings can place the measured covariance slightly below
/// the symplectic bound, so only classical positivity is required here.
pub fn reconstructed_state(
    grid: &crate::field::FrequencyGrid,
    joint: &JointReadout,
) -> Result<GaussianState> {
    // carrier mode is only a label here; statistics live in mean/cov
    let mut carrier = SpectralMode::zero(grid.clone());
    carrier.coeffs_mut()[0] = C64::new(1.0, 0.0);
    let basis = ModeBasis::orthonormalize(vec![carrier], ModeBasis::DEFAULT_GRAM_TOL)?;
    GaussianState::from_measured(basis, joint.mean.to_vec(), joint.cov.to_vec())
}

/// Beam-splitter variant: split the shared-probe output between a field arm
/// and a Hilbert arm.
pub fn run_variant_beam_splitter(
    cfg: &ExperimentConfig,
    transmission: Option<f64>,
    dir: &Path,
) -> Result<RunOutput> {
    let manifest = Manifest::new("variant-beam-splitter", &cfg.to_toml(), 0);
    let chain = variant_chain(cfg)?;
    let wm = cfg.band_edge();

    // balance the split from the single-arm couplings unless overridden;
    // arm coupling is exactly linear in the power share, so divide it out
    let (half_e, half_h) = detect::beam_splitter_variant(&chain, 0.5, 0.0)?;
    let theta_e = crate::metrics::coupling_intensity(&half_e, wm)?.0 / 0.5;
    let theta_h = crate::metrics::coupling_intensity(&half_h, wm)?.0 / 0.5;
    let tau = match transmission {
        Some(t) => t,
        None => detect::balanced_transmission(theta_e, theta_h)?,
    };
    let (op_e, op_h) = detect::beam_splitter_variant(&chain, tau, 0.0)?;
    let (te_arm, _) = crate::metrics::coupling_intensity(&op_e, wm)?;
    let (th_arm, _) = crate::metrics::coupling_intensity(&op_h, wm)?;

    let json = serde_json::json!({
        "transmission_field_arm": tau,
        "theta_e_single": theta_e,
        "theta_h_single": theta_h,
        "theta_e_arm": te_arm,
        "theta_h_arm": th_arm,
        "share_sum": te_arm / theta_e + th_arm / theta_h,
        "commutator_scale": op_e.commutator_scale(&op_h),
    });
    let p = dir.join("beam_splitter.json");
    report::write_atomic(&p, &serde_json::to_string_pretty(&json).unwrap())?;
    finish(manifest, vec![p], dir)
}

/// Arbitrary-quadrature variant: scan the readout phase.
pub fn run_variant_phase_scan(
    cfg: &ExperimentConfig,
    phi_list: &[f64],
    dir: &Path,
) -> Result<RunOutput> {
    if phi_list.is_empty() {
        return Err(EosError::Config("phase scan needs at least one phase".into()));
    }
    let manifest = Manifest::new("variant-phase-scan", &cfg.to_toml(), 0);
    let grid = cfg.grid()?;
    let consts = cfg.constants();
    let crystal = cfg.crystal();
    let setup = cfg.sweep_setup()?;
    let probe = ProbePulse::new(
        ProbeShape::Sinc {
            center: setup.e_carrier,
            bandwidth: setup.reference_bandwidth(Quadrature::E) * 0.6,
        },
        cfg.probe.photon_number,
    );
    let (signal, _) = crate::gaussian::squeezed_signal(
        thz(cfg.signal.omega0_thz),
        thz(cfg.signal.sigma_thz),
        cfg.signal.r,
        &grid,
    )?;

    let mut rows = Vec::new();
    for &phi in phi_list {
        let op = detect::arbitrary_phase_quadrature(
            &grid,
            &consts,
            &crystal,
            &probe,
            phi,
            cfg.signal_band_max(),
            0.0,
        )?;
        let basis = ModeBasis::orthonormalize(
            vec![signal.clone(), op.signal_mode()],
            ModeBasis::DEFAULT_GRAM_TOL,
        )?;
        let state = embed_squeezed_state(basis.clone(), cfg.signal.r)?;
        let (_, var) = detection_moments(&state, &op)?;
        let dv = variance_delta(&state, &op, &op)?;
        rows.push(vec![phi, var, dv]);
    }
    let p = dir.join("phase_scan.csv");
    report::write_csv(&p, &["phi_rad", "variance", "dv"], &rows)?;
    let mut files = vec![p];

    if cfg.output.svg && rows.len() > 1 {
        let phis: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let dvs: Vec<f64> = rows.iter().map(|r| r[2]).collect();
        let svg = report::svg_lines(
            "Variance shift vs readout phase",
            "phi (rad)",
            "dV (shot-noise units)",
            &[Series { label: "dV", xs: &phis, ys: &dvs }],
            false,
        );
        let sp = dir.join("phase_scan.svg");
        report::write_atomic(&sp, &svg)?;
        files.push(sp);
    }
    finish(manifest, files, dir)
}

/// Shared-probe chain for the beam-splitter variant: a delocalized probe
/// with a moderate carrier share serves both quadratures.
pub fn variant_chain(cfg: &ExperimentConfig) -> Result<EosChain> {
    let setup = cfg.sweep_setup()?;
    let probe = ProbePulse::new(
        ProbeShape::OddPhase {
            center: setup.h_carrier,
            bandwidth: setup.reference_bandwidth(Quadrature::H) * 0.5,
            carrier_fraction: 0.5,
            carrier_width: setup.h_carrier_width,
        },
        cfg.probe.photon_number,
    );
    let ports = detect::hilbert_quadrature_ports(&probe);
    EosChain::new(
        cfg.grid()?,
        cfg.constants(),
        cfg.crystal(),
        probe,
        ports,
        cfg.signal_band_max(),
    )
}
