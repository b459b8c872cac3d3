//! Seeded joint sampling of commuting detection-operator pairs.
//!
//! Shots are drawn from the analytic joint Gaussian of the two observables.
//! The stream is counter-based: shots are generated in fixed-size chunks,
//! each chunk on its own ChaCha stream derived from the seed, so the output
//! is reproducible and independent of how the chunks are evaluated.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::chain::DetectionOperator;
use crate::error::{EosError, Result};

use super::{cholesky, detection_covariance, detection_moments, GaussianState};

/// Shots per RNG stream.
const CHUNK: u64 = 1 << 16;

/// Tolerance on the commutator of a jointly sampled pair, in shot-noise units.
const COMMUTE_TOL: f64 = 1e-9;

fn standard_normal_pair(rng: &mut ChaCha12Rng) -> (f64, f64) {
    // Box-Muller on uniforms from the top 53 bits
    let u1 = ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64);
    let u2 = ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64);
    let r = (-2.0 * u1.ln()).sqrt();
    let th = 2.0 * std::f64::consts::PI * u2;
    (r * th.cos(), r * th.sin())
}

/// Draw `n_shots` simultaneous `(e, h)` readings of two commuting detection
/// operators on a Gaussian state. Deterministic for a fixed seed.
pub fn sample_shots(
    state: &GaussianState,
    op_e: &DetectionOperator,
    op_h: &DetectionOperator,
    n_shots: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    if n_shots == 0 {
        return Err(EosError::Domain("shot count must be at least 1".into()));
    }
    let comm = op_e.commutator_scale(op_h);
    if comm.abs() > COMMUTE_TOL {
        return Err(EosError::NonCommuting(format!(
            "operators do not commute (scale {comm:.3e}); assign disjoint ports"
        )));
    }

    let (mean_e, var_e) = detection_moments(state, op_e)?;
    let (mean_h, var_h) = detection_moments(state, op_h)?;
    let cov_eh = detection_covariance(state, op_e, op_h)?;
    let cov = [var_e, cov_eh, cov_eh, var_h];
    let l = cholesky(&cov, 2)
        .map_err(|e| EosError::Invariant(format!("joint covariance not PSD: {e}")))?;

    let mut out = Vec::with_capacity(n_shots);
    let chunks = (n_shots as u64).div_ceil(CHUNK);
    for chunk in 0..chunks {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(chunk + 1);
        let lo = chunk * CHUNK;
        let hi = ((chunk + 1) * CHUNK).min(n_shots as u64);
        for _ in lo..hi {
            let (z1, z2) = standard_normal_pair(&mut rng);
            let e = mean_e + l[0] * z1;
            let h = mean_h + l[2] * z1 + l[3] * z2;
            out.push((e, h));
        }
    }
    Ok(out)
}
