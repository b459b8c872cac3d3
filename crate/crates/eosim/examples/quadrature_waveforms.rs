//! Build the band-limited field and Hilbert quadrature modes and print their
//! temporal sampling kernels: the field kernel is even and localized, its
//! Hilbert partner odd with slowly decaying tails.

use eosim::field::{
    bandlimited_e, bandlimited_h, overlap, parity_asymmetry, sampling_kernel, FrequencyGrid,
};
use eosim::units::{thz, PhysicalConstants};

fn main() -> eosim::Result<()> {
    let grid = FrequencyGrid::from_max(thz(400.0), 4096)?;
    let consts = PhysicalConstants::default();
    let n_of = |_: f64| 1.0;
    let wm = thz(40.0);

    let e_bl = bandlimited_e(0.0, wm, &n_of, &grid, &consts)?;
    let h_bl = bandlimited_h(0.0, wm, &n_of, &grid, &consts)?;

    println!("band edge: 40 THz, grid: {} bins", grid.n_points());
    println!("norm^2(E_BL) = {:.6e}", e_bl.norm_sq());
    println!("overlap(E_BL, H_BL) = {:.3e} + {:.3e} i  (i times the norm)",
        overlap(&e_bl, &h_bl)?.re,
        overlap(&e_bl, &h_bl)?.im
    );

    let ts: Vec<f64> = (0..401).map(|i| (i as f64 - 200.0) * 0.5e-15).collect();
    let ke = sampling_kernel(&e_bl, &n_of, &consts, &ts);
    let kh = sampling_kernel(&h_bl, &n_of, &consts, &ts);
    println!("E kernel parity asymmetry: {:.2e} (even)", parity_asymmetry(&ke));
    let odd: Vec<f64> = ke
        .iter()
        .zip(kh.iter().rev())
        .map(|(_, &b)| b)
        .zip(kh.iter())
        .map(|(rev, &fwd)| fwd + rev)
        .collect();
    println!(
        "H kernel oddness violation: {:.2e}",
        (odd.iter().map(|v| v * v).sum::<f64>()
            / kh.iter().map(|v| v * v).sum::<f64>().max(1e-300))
        .sqrt()
    );

    println!("\n   t (fs)    E kernel      H kernel");
    for i in (0..ts.len()).step_by(40) {
        println!("  {:7.1}  {:+.5e}  {:+.5e}", ts[i] * 1e15, ke[i], kh[i]);
    }
    Ok(())
}
