//! Beam-splitter layout: one probe drives the crystal, the output splits
//! between a field arm and a Hilbert arm with a transmission chosen to
//! balance the two couplings.

use eosim::chain::detect::{balanced_transmission, beam_splitter_variant};
use eosim::config::ExperimentConfig;
use eosim::experiments::variant_chain;
use eosim::metrics::coupling_intensity;

fn main() -> eosim::Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.grid.n_points = 2048;
    let chain = variant_chain(&cfg)?;
    let wm = cfg.band_edge();

    // arm coupling is exactly linear in the power share: divide it out
    let (half_e, half_h) = beam_splitter_variant(&chain, 0.5, 0.0)?;
    let theta_e = coupling_intensity(&half_e, wm)?.0 / 0.5;
    let theta_h = coupling_intensity(&half_h, wm)?.0 / 0.5;
    println!("single-arm couplings: theta_e = {theta_e:.4e}, theta_h = {theta_h:.4e}");

    let tau = balanced_transmission(theta_e, theta_h)?;
    println!(
        "balanced transmission toward the field arm: {tau:.4} \
         ({:.1}x more photons to the Hilbert arm)",
        (1.0 - tau) / tau
    );

    let (arm_e, arm_h) = beam_splitter_variant(&chain, tau, 0.0)?;
    let (te, _) = coupling_intensity(&arm_e, wm)?;
    let (th, _) = coupling_intensity(&arm_h, wm)?;
    println!("balanced arm couplings: {te:.4e} / {th:.4e}");
    println!(
        "power-share sum (exactly 1): {:.12}",
        te / theta_e + th / theta_h
    );
    println!("arm commutator scale: {:.2e}", arm_e.commutator_scale(&arm_h));
    Ok(())
}
