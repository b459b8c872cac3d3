//! Assemble the two single-quadrature detection chains and report the gate
//! alignment, coupling intensity and mode matching of each readout.

use eosim::chain::{detect, CrystalParams, EosChain, ProbePulse, ProbeShape};
use eosim::field::{bandlimited_e, bandlimited_h, FrequencyGrid};
use eosim::metrics::{coupling_intensity, mode_matching};
use eosim::units::{thz, PhysicalConstants};

fn main() -> eosim::Result<()> {
    let grid = FrequencyGrid::from_max(thz(400.0), 2048)?;
    let consts = PhysicalConstants::default();
    let crystal = CrystalParams::znte();
    let n_of = |w: f64| crystal.n(w);
    let wm = thz(40.0);
    let lam = detect::default_signal_band_max();

    // field readout: flat probe, one quarter-wave port
    let probe_e = ProbePulse::new(ProbeShape::Sinc { center: thz(300.0), bandwidth: thz(200.0) }, 5e9);
    let ports_e = detect::field_quadrature_ports(&probe_e);
    let chain_e = EosChain::new(grid.clone(), consts, crystal.clone(), probe_e, ports_e, lam)?;
    let op_e = detect::detected_e_operator(&chain_e, 0.0)?;
    let target_e = bandlimited_e(0.0, wm, &n_of, &grid, &consts)?.normalized()?;
    let (bl, full) = coupling_intensity(&op_e, wm)?;
    let gamma = mode_matching(&op_e, &target_e, wm)?;
    println!("field readout   : theta_bl = {bl:.4e}  theta_full = {full:.4e}  gamma = {gamma:.5}");

    // Hilbert readout: delocalized strong-carrier probe, carrier-split ports
    let probe_h = ProbePulse::new(
        ProbeShape::OddPhase {
            center: thz(260.0),
            bandwidth: thz(86.0),
            carrier_fraction: 0.98,
            carrier_width: thz(3.0),
        },
        5e9,
    );
    let ports_h = detect::hilbert_quadrature_ports(&probe_h);
    let chain_h = EosChain::new(grid.clone(), consts, crystal.clone(), probe_h, ports_h, lam)?;
    let op_h = detect::detected_h_operator(&chain_h, 0.0)?;
    let target_h = bandlimited_h(0.0, wm, &n_of, &grid, &consts)?.normalized()?;
    let (bl, full) = coupling_intensity(&op_h, wm)?;
    let gamma = mode_matching(&op_h, &target_h, wm)?;
    println!("Hilbert readout : theta_bl = {bl:.4e}  theta_full = {full:.4e}  gamma = {gamma:.5}");

    // vacuum variance of every normalized readout is 1/2
    println!("vacuum variances: {:.6} / {:.6}", op_e.vacuum_variance(), op_h.vacuum_variance());
    for w in chain_e.warnings().iter().chain(chain_h.warnings()) {
        println!("note: {w}");
    }
    Ok(())
}
