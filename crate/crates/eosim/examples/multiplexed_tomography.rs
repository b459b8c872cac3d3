//! Read both quadratures of the squeezed signal simultaneously through the
//! multiplexed chain: variance scan, joint statistics, Husimi moments and a
//! batch of simultaneous shot samples.

use eosim::config::ExperimentConfig;
use eosim::experiments::{
    joint_readout, reconstructed_state, tomography_basis, tomography_scan,
};
use eosim::gaussian::{husimi_q, sample_shots, squeezed_signal};
use eosim::units::{thz, to_fs};
use num_complex::Complex64 as C64;

fn main() -> eosim::Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.grid.n_points = 2048;
    let chain = cfg.chain()?;
    let grid = cfg.grid()?;
    let (signal, _) =
        squeezed_signal(thz(cfg.signal.omega0_thz), thz(cfg.signal.sigma_thz), cfg.signal.r, &grid)?;

    let scan = tomography_scan(&cfg, &chain)?;
    let imax = scan
        .dv_e
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    println!(
        "strongest field-quadrature shift: dV_E = {:+.4e} at t = {:.1} fs",
        scan.dv_e[imax],
        to_fs(scan.times[imax])
    );
    println!(
        "variance shift ranges: dV_E in [{:+.3e}, {:+.3e}], dV_H in [{:+.3e}, {:+.3e}]",
        scan.dv_e.iter().cloned().fold(f64::INFINITY, f64::min),
        scan.dv_e.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        scan.dv_h.iter().cloned().fold(f64::INFINITY, f64::min),
        scan.dv_h.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    );

    let (joint, op_e, op_h) = joint_readout(&chain, &signal, cfg.signal.r, 0.0)?;
    println!(
        "joint covariance at t=0: var_e = {:.5}, var_h = {:.5}, cov = {:+.2e}",
        joint.cov[0], joint.cov[3], joint.cov[1]
    );
    println!("commutator scale of the pair: {:.2e}", op_e.commutator_scale(&op_h));

    let recon = reconstructed_state(&grid, &joint)?;
    let q0 = husimi_q(&recon, 0, &[C64::new(0.0, 0.0)])?[0];
    println!("reconstructed Husimi Q(0) = {q0:.5} (vacuum would give {:.5})", 1.0 / std::f64::consts::PI);

    let basis = tomography_basis(&signal, &op_e, &op_h)?;
    let state = eosim::experiments::embed_squeezed_state(basis, cfg.signal.r)?;
    let shots = sample_shots(&state, &op_e, &op_h, 200_000, 7)?;
    let n = shots.len() as f64;
    let (me, mh) = shots.iter().fold((0.0, 0.0), |a, s| (a.0 + s.0, a.1 + s.1));
    let (me, mh) = (me / n, mh / n);
    let mut ve = 0.0;
    let mut vh = 0.0;
    for (e, h) in &shots {
        ve += (e - me) * (e - me);
        vh += (h - mh) * (h - mh);
    }
    println!(
        "empirical shot variances ({} shots): {:.5} / {:.5}",
        shots.len(),
        ve / n,
        vh / n
    );
    Ok(())
}
