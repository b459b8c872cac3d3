//! Construct the squeezed Gaussian signal and verify its closed-form
//! quadrature variances and Husimi-Q values.

use eosim::chain::DetectionOperator;
use eosim::field::FrequencyGrid;
use eosim::gaussian::{detection_moments, husimi_q, squeezed_signal, GaussianState};
use eosim::units::thz;
use num_complex::Complex64 as C64;

fn main() -> eosim::Result<()> {
    let grid = FrequencyGrid::from_max(thz(400.0), 4096)?;
    let (mode, state) = squeezed_signal(thz(20.0), thz(4.0), 0.5, &grid)?;

    let peak_bin = mode
        .coeffs()
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
        .map(|(k, _)| k)
        .unwrap();
    println!(
        "signal envelope peak: {:.3} THz (center 20 THz, pulled up by the sqrt(w) weight)",
        eosim::units::to_thz(grid.omega(peak_bin))
    );

    let op_x = DetectionOperator::from_mode_quadrature(&mode)?;
    let op_p = DetectionOperator::from_mode_quadrature(&mode.hilbert())?;
    let (_, vx) = detection_moments(&state, &op_x)?;
    let (_, vp) = detection_moments(&state, &op_p)?;
    println!("matched quadrature variances: {vx:.6} / {vp:.6}");
    println!("closed forms e^-1/2, e^+1/2:  {:.6} / {:.6}", 0.5 * (-1.0f64).exp(), 0.5 * 1.0f64.exp());

    let vac = GaussianState::vacuum(state.basis().clone());
    let q0 = husimi_q(&vac, 0, &[C64::new(0.0, 0.0)])?[0];
    println!("vacuum Q(0) = {q0:.6} (1/pi = {:.6})", 1.0 / std::f64::consts::PI);
    let qs = husimi_q(&state, 0, &[C64::new(0.0, 0.0)])?[0];
    println!("squeezed Q(0) = {qs:.6}");
    Ok(())
}
