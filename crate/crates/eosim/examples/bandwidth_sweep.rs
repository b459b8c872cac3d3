//! Sweep the probe bandwidth for one quadrature under both resource
//! constraints and run the matching-constrained optimization.
//!
//! Usage: cargo run --release --example bandwidth_sweep [e|h]

use eosim::config::ExperimentConfig;
use eosim::metrics::{
    bandwidth_sweep, log_spaced, optimize_bandwidth, GammaFloorMode, Quadrature,
    ResourceConstraint,
};
use eosim::units::{thz, to_thz};

fn main() -> eosim::Result<()> {
    let quadrature = match std::env::args().nth(1).as_deref() {
        Some("h") | Some("H") => Quadrature::H,
        _ => Quadrature::E,
    };
    let mut cfg = ExperimentConfig::default();
    cfg.grid.n_points = 2048;
    let setup = cfg.sweep_setup()?;
    let bws = log_spaced(thz(20.0), setup.reference_bandwidth(quadrature), 14);

    for constraint in [
        ResourceConstraint::ConstantPhotonNumber,
        ResourceConstraint::ConstantIntensity,
    ] {
        let sweep = bandwidth_sweep(&setup, quadrature, constraint, &bws)?;
        println!("\n{quadrature} sweep under {constraint}:");
        println!("  B (THz)   theta_bl    theta_full  gamma");
        for i in 0..sweep.bandwidths.len() {
            println!(
                "  {:7.1}   {:.4e}  {:.4e}  {:.5}",
                to_thz(sweep.bandwidths[i]),
                sweep.theta_bl[i],
                sweep.theta_full[i],
                sweep.gamma[i]
            );
        }
    }

    let opt = optimize_bandwidth(
        &setup,
        quadrature,
        ResourceConstraint::ConstantIntensity,
        GammaFloorMode::FullBandReference,
        16,
    )?;
    println!(
        "\nconstrained optimum: {:.1} THz with theta_bl = {:.4e} at gamma = {:.5} (floor {:.5})",
        to_thz(opt.bandwidth),
        opt.theta_bl,
        opt.gamma,
        opt.gamma_floor
    );
    Ok(())
}
