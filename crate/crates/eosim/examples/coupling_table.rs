//! Print the coupling/matching summary of the reference configuration:
//! plateau and peak values of both quadratures and the constrained optimum.
//! Useful when exploring crystal or probe parameter changes.

use eosim::config::ExperimentConfig;
use eosim::metrics::*;
use eosim::units::{thz, to_thz};

fn main() -> eosim::Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.grid.n_points = 2048;
    let setup = cfg.sweep_setup()?;

    let b_ref_e = setup.reference_bandwidth(Quadrature::E);
    let (plateau, full_e, gamma_e) =
        setup.evaluate(Quadrature::E, ResourceConstraint::ConstantPhotonNumber, b_ref_e)?;
    println!("field readout at full band ({:.0} THz):", to_thz(b_ref_e));
    println!("  theta_bl plateau = {plateau:.4e}   theta_full = {full_e:.4e}   gamma = {gamma_e:.5}");

    let bws = log_spaced(thz(30.0), b_ref_e, 20);
    let ci = bandwidth_sweep(&setup, Quadrature::E, ResourceConstraint::ConstantIntensity, &bws)?;
    let (ipk, _) = ci
        .theta_bl
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    println!(
        "  constant-intensity peak: theta_bl = {:.4e} at {:.1} THz",
        ci.theta_bl[ipk],
        to_thz(ci.bandwidths[ipk])
    );
    let opt = optimize_bandwidth(
        &setup,
        Quadrature::E,
        ResourceConstraint::ConstantIntensity,
        GammaFloorMode::FullBandReference,
        16,
    )?;
    println!(
        "  constrained optimum: theta_bl = {:.4e} at {:.1} THz (gamma {:.5})",
        opt.theta_bl,
        to_thz(opt.bandwidth),
        opt.gamma
    );

    let fine = log_spaced(thz(65.0), thz(110.0), 10);
    let h = bandwidth_sweep(&setup, Quadrature::H, ResourceConstraint::ConstantIntensity, &fine)?;
    let (ipk, gpk) = h
        .gamma
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    let b_pk = h.bandwidths[ipk];
    println!("\nHilbert readout:");
    println!("  matching peak: gamma = {gpk:.5} at {:.1} THz", to_thz(b_pk));
    println!("  theta_bl (constant intensity) there = {:.4e}", h.theta_bl[ipk]);
    let (cp, cp_full, _) =
        setup.evaluate(Quadrature::H, ResourceConstraint::ConstantPhotonNumber, b_pk)?;
    println!("  theta_bl (constant photons) there = {cp:.4e} (theta_full {cp_full:.4e})");
    let b_ref_h = setup.reference_bandwidth(Quadrature::H);
    let (_, full_h, gamma_h_full) =
        setup.evaluate(Quadrature::H, ResourceConstraint::ConstantPhotonNumber, b_ref_h)?;
    println!(
        "  at full band ({:.0} THz): theta_full = {full_h:.4e}, gamma = {gamma_h_full:.5}",
        to_thz(b_ref_h)
    );
    Ok(())
}
