//! Coupling-intensity and mode-matching metrics, bandwidth sweeps under
//! resource constraints, and constrained probe-bandwidth optimization.
//!
//! Coupling intensity is the detection weight a readout places on signal
//! frequencies, in units of its local-oscillator shot noise: the
//! band-limited value integrates `|a(omega)|^2` up to the signal band edge,
//! the full value up to the signal/probe boundary. Their gap is detection
//! weight wasted on frequencies that carry no signal, admixing vacuum noise.
//! Mode matching is the normalized band-limited overlap between the detected
//! gate and a target quadrature mode; it reaches 1 when the gate is
//! proportional to the target inside the band.

use crate::chain::{
    detect, CrystalParams, DetectionOperator, EosChain, ProbePulse, ProbeShape,
};
use crate::error::{EosError, Result};
use crate::field::{bandlimited_e, bandlimited_h, overlap, FrequencyGrid, SpectralMode};
use crate::units::PhysicalConstants;

/// Which quadrature a sweep or an experiment reads out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    E,
    H,
}

impl std::fmt::Display for Quadrature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Quadrature::E => write!(f, "e"),
            Quadrature::H => write!(f, "h"),
        }
    }
}

/// Probe resource held fixed while the bandwidth varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResourceConstraint {
    /// Total photon number fixed at the reference value.
    ConstantPhotonNumber,
    /// Peak intensity fixed (crystal damage threshold): a transform-limited
    /// pulse of bandwidth B lasts ~1/B, so the photon budget scales as
    /// `reference_bandwidth / B`, anchored at the full-band photon number.
    ConstantIntensity,
}

impl std::fmt::Display for ResourceConstraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ResourceConstraint::ConstantPhotonNumber => write!(f, "constant_photon_number"),
            ResourceConstraint::ConstantIntensity => write!(f, "constant_intensity"),
        }
    }
}

/// Band-limited and full coupling intensity of a detection operator.
///
/// Returns `(theta_bl, theta_full)` with `theta_full >= theta_bl`.
pub fn coupling_intensity(op: &DetectionOperator, omega_m: f64) -> Result<(f64, f64)> {
    let edge = omega_m.min(op.signal_band_max);
    let bl = op.weight_below(edge) * op.shot_scale;
    let full = op.weight_below(op.signal_band_max) * op.shot_scale;
    Ok((bl, full))
}

/// Normalized band-limited overlap between the detected gate and `target`.
///
/// Hermitian observables pair through the normal-ordered commutator, which
/// reduces to twice the real part of the coefficient overlap; the real part
/// is what distinguishes the two quadratures of the same temporal mode.
/// Returned as a magnitude in [0, 1].
pub fn mode_matching(
    op: &DetectionOperator,
    target: &SpectralMode,
    omega_m: f64,
) -> Result<f64> {
    let t_bl = target.bandlimited(omega_m)?;
    let g_bl = op.signal_mode().bandlimited(omega_m)?;
    let tt = t_bl.norm_sq();
    let gg = g_bl.norm_sq();
    if tt <= 0.0 || gg <= 1e-300 {
        return Err(EosError::Domain(
            "mode matching undefined: zero band-limited weight".into(),
        ));
    }
    Ok(overlap(&t_bl, &g_bl)?.re.abs() / (tt * gg).sqrt())
}

/// Everything needed to evaluate one readout at a chosen probe bandwidth.
#[derive(Debug, Clone)]
pub struct SweepSetup {
    pub grid: FrequencyGrid,
    pub consts: PhysicalConstants,
    pub crystal: CrystalParams,
    /// Carrier of the flat field-readout probe, rad/s.
    pub e_carrier: f64,
    /// Carrier of the delocalized Hilbert-readout probe, rad/s.
    pub h_carrier: f64,
    /// Photon budget at the reference bandwidth.
    pub photon_number: f64,
    /// Signal band edge `omega_m` for band-limited metrics.
    pub band_edge: f64,
    pub signal_band_max: f64,
    /// Carrier photon share of the odd-phase probe.
    pub h_carrier_fraction: f64,
    /// Carrier peak width of the odd-phase probe, rad/s.
    pub h_carrier_width: f64,
}

impl SweepSetup {
    /// Largest symmetric bandwidth around `carrier` that stays inside the
    /// grid and above the signal region.
    pub fn full_bandwidth(grid: &FrequencyGrid, carrier: f64, signal_band_max: f64) -> f64 {
        2.0 * (grid.omega_max() - carrier).min(carrier - signal_band_max)
    }

    pub fn carrier(&self, quadrature: Quadrature) -> f64 {
        match quadrature {
            Quadrature::E => self.e_carrier,
            Quadrature::H => self.h_carrier,
        }
    }

    /// Full usable probe bandwidth for the quadrature: the resource
    /// constraint anchor and the matching-floor reference.
    pub fn reference_bandwidth(&self, quadrature: Quadrature) -> f64 {
        Self::full_bandwidth(&self.grid, self.carrier(quadrature), self.signal_band_max)
    }

    fn photons_at(
        &self,
        quadrature: Quadrature,
        bandwidth: f64,
        constraint: ResourceConstraint,
    ) -> f64 {
        match constraint {
            ResourceConstraint::ConstantPhotonNumber => self.photon_number,
            ResourceConstraint::ConstantIntensity => {
                self.photon_number * self.reference_bandwidth(quadrature) / bandwidth
            }
        }
    }

    fn probe(
        &self,
        quadrature: Quadrature,
        bandwidth: f64,
        constraint: ResourceConstraint,
    ) -> ProbePulse {
        let photons = self.photons_at(quadrature, bandwidth, constraint);
        let shape = match quadrature {
            Quadrature::E => ProbeShape::Sinc { center: self.e_carrier, bandwidth },
            Quadrature::H => ProbeShape::OddPhase {
                center: self.h_carrier,
                bandwidth,
                carrier_fraction: self.h_carrier_fraction,
                carrier_width: self.h_carrier_width,
            },
        };
        ProbePulse::new(shape, photons)
    }

    fn target(&self, quadrature: Quadrature) -> Result<SpectralMode> {
        let n_of = |w: f64| self.crystal.n(w);
        let m = match quadrature {
            Quadrature::E => bandlimited_e(0.0, self.band_edge, &n_of, &self.grid, &self.consts)?,
            Quadrature::H => bandlimited_h(0.0, self.band_edge, &n_of, &self.grid, &self.consts)?,
        };
        m.normalized()
    }

    /// Chain for a single-quadrature readout at the given bandwidth.
    pub fn chain(
        &self,
        quadrature: Quadrature,
        constraint: ResourceConstraint,
        bandwidth: f64,
    ) -> Result<EosChain> {
        if !(bandwidth > 0.0) {
            return Err(EosError::Range("bandwidth must be positive".into()));
        }
        let reference = self.reference_bandwidth(quadrature);
        if bandwidth > reference * (1.0 + 1e-12) {
            return Err(EosError::Range(format!(
                "bandwidth {:.3e} exceeds the usable probe band {:.3e}",
                bandwidth, reference
            )));
        }
        let probe = self.probe(quadrature, bandwidth, constraint);
        let ports = match quadrature {
            Quadrature::E => detect::field_quadrature_ports(&probe),
            Quadrature::H => detect::hilbert_quadrature_ports(&probe),
        };
        EosChain::new(
            self.grid.clone(),
            self.consts,
            self.crystal.clone(),
            probe,
            ports,
            self.signal_band_max,
        )
    }

    /// `(theta_bl, theta_full, gamma)` at one bandwidth.
    pub fn evaluate(
        &self,
        quadrature: Quadrature,
        constraint: ResourceConstraint,
        bandwidth: f64,
    ) -> Result<(f64, f64, f64)> {
        let chain = self.chain(quadrature, constraint, bandwidth)?;
        let op = chain.operator(0.0)?;
        let (bl, full) = coupling_intensity(&op, self.band_edge)?;
        let gamma = mode_matching(&op, &self.target(quadrature)?, self.band_edge)?;
        Ok((bl, full, gamma))
    }
}

/// Bandwidth-indexed sweep record.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub quadrature: Quadrature,
    pub constraint: ResourceConstraint,
    /// Bandwidths that evaluated successfully, rad/s.
    pub bandwidths: Vec<f64>,
    pub theta_bl: Vec<f64>,
    pub theta_full: Vec<f64>,
    pub gamma: Vec<f64>,
    /// Points that could not be evaluated, with the reason.
    pub skipped: Vec<(f64, String)>,
}

impl SweepResult {
    pub fn is_empty(&self) -> bool {
        self.bandwidths.is_empty()
    }
}

/// Default sweep domain: log-spaced bandwidths between `lo` and `hi`,
/// with both endpoints exact.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && lo > 0.0 && hi > lo);
    let (la, lb) = (lo.ln(), hi.ln());
    let mut out: Vec<f64> = (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect();
    out[0] = lo;
    out[n - 1] = hi;
    out
}

/// Evaluate coupling intensity and mode matching across `bandwidths`.
/// Points outside the usable range are recorded as skipped, not fatal.
pub fn bandwidth_sweep(
    setup: &SweepSetup,
    quadrature: Quadrature,
    constraint: ResourceConstraint,
    bandwidths: &[f64],
) -> Result<SweepResult> {
    let mut out = SweepResult {
        quadrature,
        constraint,
        bandwidths: Vec::new(),
        theta_bl: Vec::new(),
        theta_full: Vec::new(),
        gamma: Vec::new(),
        skipped: Vec::new(),
    };
    let mut sorted = bandwidths.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for b in sorted {
        match setup.evaluate(quadrature, constraint, b) {
            Ok((bl, full, gamma)) => {
                out.bandwidths.push(b);
                out.theta_bl.push(bl);
                out.theta_full.push(full);
                out.gamma.push(gamma);
            }
            Err(e) => out.skipped.push((b, e.to_string())),
        }
    }
    if out.is_empty() {
        return Err(EosError::Range("no bandwidth in the sweep could be evaluated".into()));
    }
    Ok(out)
}

/// How the mode-matching floor of the constrained optimization is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaFloorMode {
    /// At least the matching achieved at the full reference bandwidth.
    /// Matching efficiencies are meaningful at the percent level (the
    /// band-limited overlap saturates slowly), so the floor carries the
    /// percent-rounding slack [`REFERENCE_FLOOR_SLACK`].
    FullBandReference,
    Explicit(f64),
}

/// Slack applied below the full-band matching when it serves as the floor.
pub const REFERENCE_FLOOR_SLACK: f64 = 5e-3;

/// Result of the constrained bandwidth optimization.
#[derive(Debug, Clone, Copy)]
pub struct OptimumPoint {
    pub bandwidth: f64,
    pub theta_bl: f64,
    pub gamma: f64,
    pub gamma_floor: f64,
}

/// Maximize the band-limited coupling intensity over bandwidth subject to
/// `gamma >= floor`: a coarse scan followed by golden-section refinement,
/// with a bisection onto the feasibility boundary when the optimum is
/// constraint-limited.
pub fn optimize_bandwidth(
    setup: &SweepSetup,
    quadrature: Quadrature,
    constraint: ResourceConstraint,
    floor_mode: GammaFloorMode,
    scan_points: usize,
) -> Result<OptimumPoint> {
    let b_hi = setup.reference_bandwidth(quadrature);
    let b_lo = (setup.band_edge * 0.25).max(8.0 * setup.grid.delta_omega());
    let floor = match floor_mode {
        GammaFloorMode::Explicit(g) => g,
        GammaFloorMode::FullBandReference => {
            let (_, _, g) = setup.evaluate(quadrature, constraint, b_hi)?;
            g - REFERENCE_FLOOR_SLACK
        }
    };

    let scan = log_spaced(b_lo, b_hi, scan_points.max(8));
    let sweep = bandwidth_sweep(setup, quadrature, constraint, &scan)?;
    let feasible: Vec<usize> = (0..sweep.bandwidths.len())
        .filter(|&i| sweep.gamma[i] >= floor)
        .collect();
    if feasible.is_empty() {
        let closest = (0..sweep.bandwidths.len())
            .min_by(|&a, &b| {
                (floor - sweep.gamma[a])
                    .partial_cmp(&(floor - sweep.gamma[b]))
                    .unwrap()
            })
            .unwrap();
        return Err(EosError::Infeasible(format!(
            "no bandwidth reaches matching {:.6}; closest is {:.6} at {:.2} THz",
            floor,
            sweep.gamma[closest],
            crate::units::to_thz(sweep.bandwidths[closest])
        )));
    }

    let eval_masked = |b: f64| -> (f64, f64) {
        match setup.evaluate(quadrature, constraint, b) {
            Ok((bl, _, g)) => {
                if g >= floor {
                    (bl, g)
                } else {
                    (f64::NEG_INFINITY, g)
                }
            }
            Err(_) => (f64::NEG_INFINITY, 0.0),
        }
    };

    let &ibest = feasible
        .iter()
        .max_by(|&&a, &&b| sweep.theta_bl[a].partial_cmp(&sweep.theta_bl[b]).unwrap())
        .unwrap();
    let mut best = OptimumPoint {
        bandwidth: sweep.bandwidths[ibest],
        theta_bl: sweep.theta_bl[ibest],
        gamma: sweep.gamma[ibest],
        gamma_floor: floor,
    };

    // golden-section refinement around the best feasible scan point
    let lo = if ibest > 0 { sweep.bandwidths[ibest - 1] } else { sweep.bandwidths[ibest] };
    let hi = if ibest + 1 < sweep.bandwidths.len() {
        sweep.bandwidths[ibest + 1]
    } else {
        sweep.bandwidths[ibest]
    };
    if hi > lo {
        const RESP: f64 = 0.381_966_011_250_105; // 2 - golden ratio
        let mut a = lo;
        let mut b = hi;
        let mut x1 = a + RESP * (b - a);
        let mut x2 = b - RESP * (b - a);
        let mut f1 = eval_masked(x1);
        let mut f2 = eval_masked(x2);
        for _ in 0..24 {
            if f1.0 > f2.0 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = a + RESP * (b - a);
                f1 = eval_masked(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = b - RESP * (b - a);
                f2 = eval_masked(x2);
            }
            if (b - a) < 1e-3 * best.bandwidth {
                break;
            }
        }
        for (x, f) in [(x1, f1), (x2, f2)] {
            if f.0 > best.theta_bl {
                best = OptimumPoint { bandwidth: x, theta_bl: f.0, gamma: f.1, gamma_floor: floor };
            }
        }
    }

    // if an infeasible neighbor borders the best point, the optimum may sit
    // exactly on the feasibility boundary: bisect gamma = floor
    for dir in [-1isize, 1isize] {
        let ni = ibest as isize + dir;
        if ni < 0 || ni as usize >= sweep.bandwidths.len() {
            continue;
        }
        let ni = ni as usize;
        if sweep.gamma[ni] >= floor {
            continue;
        }
        let mut inside = sweep.bandwidths[ibest];
        let mut outside = sweep.bandwidths[ni];
        for _ in 0..30 {
            let mid = 0.5 * (inside + outside);
            match setup.evaluate(quadrature, constraint, mid) {
                Ok((_, _, g)) if g >= floor => inside = mid,
                _ => outside = mid,
            }
            if (outside - inside).abs() < 1e-4 * inside {
                break;
            }
        }
        if let Ok((bl, _, g)) = setup.evaluate(quadrature, constraint, inside) {
            if g >= floor && bl > best.theta_bl {
                best = OptimumPoint { bandwidth: inside, theta_bl: bl, gamma: g, gamma_floor: floor };
            }
        }
    }

    Ok(best)
}
