//! Arbitrary-quadrature readout: tuned waveplate pairs realize the
//! observable at any phase between the field and Hilbert quadratures. On
//! squeezed input the variance shift modulates sinusoidally with period pi.

use eosim::chain::{detect::arbitrary_phase_quadrature, ProbePulse, ProbeShape};
use eosim::config::ExperimentConfig;
use eosim::experiments::embed_squeezed_state;
use eosim::gaussian::{squeezed_signal, variance_delta, ModeBasis};
use eosim::metrics::Quadrature;
use eosim::units::thz;

fn main() -> eosim::Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.grid.n_points = 2048;
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
    let (signal, _) =
        squeezed_signal(thz(cfg.signal.omega0_thz), thz(cfg.signal.sigma_thz), cfg.signal.r, &grid)?;

    println!("  phi/pi    dV (shot-noise units)");
    for i in 0..=8 {
        let phi = std::f64::consts::PI * i as f64 / 8.0;
        let op = arbitrary_phase_quadrature(
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
        let state = embed_squeezed_state(basis, cfg.signal.r)?;
        let dv = variance_delta(&state, &op, &op)?;
        println!("  {:6.3}   {:+.5e}", phi / std::f64::consts::PI, dv);
    }
    Ok(())
}
