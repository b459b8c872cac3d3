//! The electro-optic detection chain.
//!
//! A strong coherent near-infrared probe drives a chi(2) interaction inside
//! a thin crystal, scattering signal-band sidebands into the probe band. The
//! output is split into spectral-filter ports, each passed through a
//! waveplate and a Wollaston prism onto a balanced detector pair. The
//! linearized, shot-noise-normalized photocurrent difference of each port is
//! a Hermitian observable of the signal field: a [`DetectionOperator`].

pub mod detect;
pub mod kernel;

pub use detect::{
    arbitrary_phase_quadrature, beam_splitter_variant, detected_e_operator, detected_h_operator,
    interaction_kernel, multiplexed_eh, EosChain,
};
pub use kernel::ScatteringGenerator;

use num_complex::Complex64 as C64;

use crate::error::{EosError, Result};
use crate::field::{FrequencyGrid, SpectralMode};
use crate::units::PhysicalConstants;

/// Refractive index model of the electro-optic crystal over the full grid.
#[derive(Debug, Clone, PartialEq)]
pub enum RefractiveIndexModel {
    Constant(f64),
    /// Zincblende-like dispersion: a slow linear ramp across the signal band,
    /// a quadratic fit through three anchors in the probe band, and a linear
    /// blend in between. Frequencies in rad/s, indices dimensionless.
    Zincblende {
        mir_n0: f64,
        mir_n1: f64,
        mir_edge: f64,
        nir_min: f64,
        /// (omega, n) anchors for the quadratic probe-band fit.
        nir_anchors: [(f64, f64); 3],
    },
}

impl RefractiveIndexModel {
    /// ZnTe-like defaults: n rising 2.55 -> 2.59 across 0-40 THz in the
    /// signal band; quadratic through literature values at 200/300/400 THz
    /// in the probe band.
    pub fn znte() -> Self {
        use crate::units::thz;
        RefractiveIndexModel::Zincblende {
            mir_n0: 2.55,
            mir_n1: 2.59,
            mir_edge: thz(40.0),
            nir_min: thz(150.0),
            nir_anchors: [(thz(200.0), 2.7355), (thz(300.0), 2.7891), (thz(400.0), 2.8806)],
        }
    }

    pub fn n(&self, omega: f64) -> f64 {
        match self {
            RefractiveIndexModel::Constant(n) => *n,
            RefractiveIndexModel::Zincblende { mir_n0, mir_n1, mir_edge, nir_min, nir_anchors } => {
                let w = omega.abs();
                if w <= *mir_edge {
                    mir_n0 + (mir_n1 - mir_n0) * w / mir_edge
                } else if w >= *nir_min {
                    lagrange3(nir_anchors, w)
                } else {
                    let lo = *mir_n1;
                    let hi = lagrange3(nir_anchors, *nir_min);
                    let f = (w - mir_edge) / (nir_min - mir_edge);
                    lo + (hi - lo) * f
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let probes = [1e12, 1e14, 1e15, 2.6e15];
        for &w in &probes {
            let n = self.n(w);
            if !(n > 1.0 && n < 4.0) {
                return Err(EosError::Domain(format!(
                    "refractive index {n:.4} at omega {w:.3e} outside (1, 4)"
                )));
            }
        }
        Ok(())
    }
}

fn lagrange3(anchors: &[(f64, f64); 3], w: f64) -> f64 {
    let [(x0, y0), (x1, y1), (x2, y2)] = *anchors;
    let l0 = (w - x1) * (w - x2) / ((x0 - x1) * (x0 - x2));
    let l1 = (w - x0) * (w - x2) / ((x1 - x0) * (x1 - x2));
    let l2 = (w - x0) * (w - x1) / ((x2 - x0) * (x2 - x1));
    y0 * l0 + y1 * l1 + y2 * l2
}

/// Electro-optic crystal parameters.
#[derive(Debug, Clone)]
pub struct CrystalParams {
    /// Crystal length, m.
    pub length: f64,
    /// Electro-optic coefficient, m/V.
    pub r41: f64,
    pub index: RefractiveIndexModel,
    /// Disable the phase-matching factor to quantify its effect.
    pub phase_matching: bool,
}

impl CrystalParams {
    /// Thin ZnTe crystal defaults.
    pub fn znte() -> Self {
        Self {
            length: 7e-6,
            r41: 4e-12,
            index: RefractiveIndexModel::znte(),
            phase_matching: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0) {
            return Err(EosError::Domain(format!(
                "crystal length must be positive, got {:.3e}",
                self.length
            )));
        }
        if self.r41 == 0.0 || !self.r41.is_finite() {
            return Err(EosError::Domain("electro-optic coefficient must be nonzero".into()));
        }
        self.index.validate()
    }

    pub fn n(&self, omega: f64) -> f64 {
        self.index.n(omega)
    }

    /// Quadratic coupling constant `lambda = A eps0 d / 2` with `d = -n^4 r41`
    /// evaluated at the probe carrier.
    pub fn coupling_lambda(&self, carrier: f64, consts: &PhysicalConstants) -> f64 {
        let n = self.n(carrier);
        let d = -n.powi(4) * self.r41;
        consts.cross_section_a * consts.epsilon_0 * d / 2.0
    }
}

/// Spectral shape of the coherent probe pulse.
#[derive(Debug, Clone, PartialEq)]
pub enum ProbeShape {
    /// Flat (rectangular) spectrum with zero spectral phase: a sinc envelope
    /// in time. `center` and `bandwidth` in rad/s.
    Sinc { center: f64, bandwidth: f64 },
    /// Delocalized probe: a strong narrow carrier plus flat sidebands whose
    /// spectral phase jumps by +pi/2 above and -pi/2 below the carrier.
    /// `carrier_fraction` is the photon share held by the carrier peak.
    OddPhase { center: f64, bandwidth: f64, carrier_fraction: f64, carrier_width: f64 },
    /// Coherent superposition of a flat field-readout block and an odd-phase
    /// Hilbert part occupying disjoint bands, for multiplexed detection.
    /// `e_photon_share` is the photon fraction in the flat block.
    Multiplexed {
        e_center: f64,
        e_bandwidth: f64,
        h_center: f64,
        h_bandwidth: f64,
        h_carrier_fraction: f64,
        h_carrier_width: f64,
        e_photon_share: f64,
    },
}

impl ProbeShape {
    /// Carrier frequency (for the multiplexed shape, the strong Hilbert
    /// carrier).
    pub fn center(&self) -> f64 {
        match self {
            ProbeShape::Sinc { center, .. } | ProbeShape::OddPhase { center, .. } => *center,
            ProbeShape::Multiplexed { h_center, .. } => *h_center,
        }
    }

    pub fn bandwidth(&self) -> f64 {
        match self {
            ProbeShape::Sinc { bandwidth, .. } | ProbeShape::OddPhase { bandwidth, .. } => {
                *bandwidth
            }
            ProbeShape::Multiplexed { e_center, e_bandwidth, h_center, h_bandwidth, .. } => {
                h_center + 0.5 * h_bandwidth - (e_center - 0.5 * e_bandwidth)
            }
        }
    }

    /// Support interval of the spectral amplitude.
    pub fn support(&self) -> (f64, f64) {
        match self {
            ProbeShape::Multiplexed { e_center, e_bandwidth, h_center, h_bandwidth, .. } => {
                (e_center - 0.5 * e_bandwidth, h_center + 0.5 * h_bandwidth)
            }
            _ => {
                let c = self.center();
                let b = self.bandwidth();
                (c - 0.5 * b, c + 0.5 * b)
            }
        }
    }

    /// Unnormalized spectral amplitude at angular frequency `nu`.
    pub fn amplitude_unnorm(&self, nu: f64) -> C64 {
        match self {
            ProbeShape::Sinc { center, bandwidth } => {
                if (nu - center).abs() <= 0.5 * bandwidth {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }
            ProbeShape::OddPhase { center, bandwidth, carrier_fraction, carrier_width } => {
                odd_phase_amplitude(nu, *center, *bandwidth, *carrier_fraction, *carrier_width)
            }
            ProbeShape::Multiplexed {
                e_center,
                e_bandwidth,
                h_center,
                h_bandwidth,
                h_carrier_fraction,
                h_carrier_width,
                e_photon_share,
            } => {
                if (nu - e_center).abs() <= 0.5 * e_bandwidth {
                    C64::new((e_photon_share / e_bandwidth).sqrt(), 0.0)
                } else {
                    odd_phase_amplitude(
                        nu,
                        *h_center,
                        *h_bandwidth,
                        *h_carrier_fraction,
                        *h_carrier_width,
                    ) * (1.0 - e_photon_share).sqrt()
                }
            }
        }
    }

    pub fn validate(&self, grid: &FrequencyGrid) -> Result<()> {
        let (lo, hi) = self.support();
        if lo <= 0.0 || hi > grid.omega_max() {
            return Err(EosError::Range(format!(
                "probe support [{:.3e}, {:.3e}] exceeds the grid (0, {:.3e}]",
                lo,
                hi,
                grid.omega_max()
            )));
        }
        let check_odd = |fraction: f64, width: f64, bandwidth: f64| -> Result<()> {
            if !(0.0..=1.0).contains(&fraction) {
                return Err(EosError::Domain(format!(
                    "carrier fraction {fraction} outside [0, 1]"
                )));
            }
            if width >= bandwidth {
                return Err(EosError::Domain(
                    "carrier width must be smaller than the probe bandwidth".into(),
                ));
            }
            if width < 2.0 * grid.delta_omega() {
                return Err(EosError::Domain(format!(
                    "carrier width {:.3e} below twice the grid spacing {:.3e}",
                    width,
                    grid.delta_omega()
                )));
            }
            Ok(())
        };
        match self {
            ProbeShape::Sinc { .. } => Ok(()),
            ProbeShape::OddPhase { carrier_fraction, carrier_width, bandwidth, .. } => {
                check_odd(*carrier_fraction, *carrier_width, *bandwidth)
            }
            ProbeShape::Multiplexed {
                e_center,
                e_bandwidth,
                h_center,
                h_bandwidth,
                h_carrier_fraction,
                h_carrier_width,
                e_photon_share,
            } => {
                check_odd(*h_carrier_fraction, *h_carrier_width, *h_bandwidth)?;
                if !(0.0..=1.0).contains(e_photon_share) {
                    return Err(EosError::Domain(format!(
                        "field-block photon share {e_photon_share} outside [0, 1]"
                    )));
                }
                if e_center + 0.5 * e_bandwidth > h_center - 0.5 * h_bandwidth {
                    return Err(EosError::Config(
                        "multiplexed probe bands overlap; the field block must sit \
                         below the Hilbert band"
                            .into(),
                    ));
                }
                Ok(())
            }
        }
    }
}

// Sideband phase convention: the sidebands sit +pi/2 ahead of the carrier on
// BOTH sides; the odd detection phase (positive above the carrier, negative
// below) is completed by the opposite Wollaston subtraction order of the two
// readout ports. Putting the sign flip in the probe instead of the ports
// makes the sideband self-mixing terms add coherently into the wrong
// quadrature and ruins the matching. The sidebands are flattened in photon
// flux (amplitude ~ 1/sqrt(nu)) so that their self-mixing above and below
// the carrier cancels under the sign flip despite the sqrt(nu) mode
// normalization.
fn odd_phase_amplitude(
    nu: f64,
    center: f64,
    bandwidth: f64,
    carrier_fraction: f64,
    carrier_width: f64,
) -> C64 {
    let d = nu - center;
    if d.abs() <= 0.5 * carrier_width {
        C64::new((carrier_fraction / carrier_width).sqrt(), 0.0)
    } else if d.abs() <= 0.5 * bandwidth {
        let side = ((1.0 - carrier_fraction) / (bandwidth - carrier_width)).sqrt()
            * (center / nu).sqrt();
        C64::new(0.0, side)
    } else {
        C64::new(0.0, 0.0)
    }
}

/// Coherent probe pulse: a spectral shape carrying `photon_number` photons.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbePulse {
    pub shape: ProbeShape,
    pub photon_number: f64,
}

impl ProbePulse {
    pub fn new(shape: ProbeShape, photon_number: f64) -> Self {
        Self { shape, photon_number }
    }

    pub fn validate(&self, grid: &FrequencyGrid) -> Result<()> {
        if !(self.photon_number > 0.0) {
            return Err(EosError::Domain(format!(
                "probe photon number must be positive, got {:.3e}",
                self.photon_number
            )));
        }
        self.shape.validate(grid)
    }

    /// Normalization constant such that the grid quadrature of
    /// `|C * shape|^2` equals the photon number.
    pub fn norm_constant(&self, grid: &FrequencyGrid) -> f64 {
        let dw = grid.delta_omega();
        let mut s = 0.0;
        for k in 0..grid.n_points() {
            s += self.shape.amplitude_unnorm(grid.omega(k)).norm_sqr();
        }
        (self.photon_number / (s * dw)).sqrt()
    }

    /// Normalized spectral amplitude at an arbitrary frequency.
    pub fn amplitude(&self, nu: f64, norm_constant: f64) -> C64 {
        self.shape.amplitude_unnorm(nu) * norm_constant
    }

    /// Normalized amplitude sampled on the grid, as a spectral mode scaled by
    /// `sqrt(photon_number)`.
    pub fn sampled(&self, grid: &FrequencyGrid) -> SpectralMode {
        let c = self.norm_constant(grid);
        let coeffs = (0..grid.n_points())
            .map(|k| self.amplitude(grid.omega(k), c))
            .collect();
        SpectralMode::new(grid.clone(), coeffs).expect("length matches by construction")
    }
}

/// Waveplate inserted before the Wollaston prism of a port.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Waveplate {
    None,
    Half,
    Quarter,
}

/// One spectral-filter port of the detection chain.
#[derive(Debug, Clone)]
pub struct Port {
    pub omega_min: f64,
    pub omega_max: f64,
    pub waveplate: Waveplate,
    /// Waveplate fast-axis angle from the probe polarization, rad.
    pub angle: f64,
    /// Which Wollaston output is subtracted: +1 or -1.
    pub sign: f64,
    /// Direct local-oscillator phase for a tuned half+quarter waveplate pair.
    /// When set, the port readout uses a unit-magnitude coefficient
    /// `exp(i lo_phase)` and the discrete `waveplate` field is ignored.
    pub lo_phase: Option<f64>,
}

impl Port {
    /// Balanced-detection coefficients after the waveplate: the DC weight on
    /// the probe intensity (must cancel) and the complex weight of the
    /// linearized cross term.
    pub fn jones_coefficients(&self) -> (f64, C64) {
        if let Some(phi) = self.lo_phase {
            return (0.0, C64::from_polar(1.0, phi));
        }
        match self.waveplate {
            Waveplate::None => (1.0, C64::new(0.0, 0.0)),
            Waveplate::Half => {
                let dc = (4.0 * self.angle).cos();
                let zeta = C64::new((4.0 * self.angle).sin(), 0.0);
                (dc, zeta)
            }
            Waveplate::Quarter => {
                let c2 = (2.0 * self.angle).cos();
                let s2 = (2.0 * self.angle).sin();
                // zeta = sin(2 theta) (cos(2 theta) - i), DC = cos^2(2 theta)
                (c2 * c2, C64::new(s2 * c2, -s2))
            }
        }
    }

    pub fn validate(&self, grid: &FrequencyGrid) -> Result<()> {
        if !(self.omega_min >= 0.0 && self.omega_max > self.omega_min) {
            return Err(EosError::Config(format!(
                "empty or inverted port band [{:.3e}, {:.3e}]",
                self.omega_min, self.omega_max
            )));
        }
        if self.omega_max > grid.omega_max() {
            return Err(EosError::Config(format!(
                "port band edge {:.3e} beyond grid support {:.3e}",
                self.omega_max,
                grid.omega_max()
            )));
        }
        if !(0.0..std::f64::consts::PI).contains(&self.angle) {
            return Err(EosError::Config(format!(
                "waveplate angle {:.4} outside [0, pi)",
                self.angle
            )));
        }
        if self.sign != 1.0 && self.sign != -1.0 {
            return Err(EosError::Config("port sign must be +1 or -1".into()));
        }
        let (dc, zeta) = self.jones_coefficients();
        if dc.abs() > 1e-10 {
            return Err(EosError::Config(format!(
                "waveplate at angle {:.5} rad does not cancel the probe mean (DC weight {dc:.3e})",
                self.angle
            )));
        }
        if zeta.norm() < 1e-12 {
            return Err(EosError::Config(
                "port waveplate produces no linear readout".into(),
            ));
        }
        Ok(())
    }

    pub fn contains(&self, omega: f64) -> bool {
        omega >= self.omega_min && omega < self.omega_max
    }
}

/// Ordered, non-overlapping set of ports.
#[derive(Debug, Clone)]
pub struct PortConfig {
    pub ports: Vec<Port>,
}

impl PortConfig {
    pub fn new(ports: Vec<Port>) -> Self {
        Self { ports }
    }

    pub fn validate(&self, grid: &FrequencyGrid) -> Result<()> {
        if self.ports.is_empty() {
            return Err(EosError::Config("port configuration is empty".into()));
        }
        for p in &self.ports {
            p.validate(grid)?;
        }
        for w in self.ports.windows(2) {
            if w[1].omega_min < w[0].omega_max {
                return Err(EosError::Config(format!(
                    "ports overlap or are out of order near {:.3e}",
                    w[1].omega_min
                )));
            }
        }
        Ok(())
    }

    /// True when no frequency belongs to ports of both configurations.
    pub fn disjoint_from(&self, other: &PortConfig) -> bool {
        for a in &self.ports {
            for b in &other.ports {
                if a.omega_min < b.omega_max && b.omega_min < a.omega_max {
                    return false;
                }
            }
        }
        true
    }
}

/// Hermitian balanced-detection observable, normalized to vacuum variance 1/2.
///
/// The observable is `Σ_k (a_k â_k + b_k â_k†) Δω` with `b = conj(a)` after
/// Hermitian mirroring, plus an optional coefficient block on an independent
/// auxiliary vacuum channel (the open port of a beam splitter).
#[derive(Debug, Clone)]
pub struct DetectionOperator {
    grid: FrequencyGrid,
    a: Vec<C64>,
    b: Vec<C64>,
    aux: Option<Vec<C64>>,
    /// Physical shot-noise denominator (total probe photons over the ports).
    pub normalization: f64,
    /// Conversion from stored (variance-normalized) weights back to
    /// shot-noise units: twice the pre-normalization vacuum variance.
    pub shot_scale: f64,
    /// Boundary between the signal region and the probe region, rad/s.
    pub signal_band_max: f64,
    /// Sampling time of this readout, s.
    pub time: f64,
}

impl DetectionOperator {
    /// Build from annihilation coefficients; rescales so the vacuum variance
    /// is exactly 1/2 and mirrors the creation side.
    pub fn from_raw(
        grid: FrequencyGrid,
        a: Vec<C64>,
        aux: Option<Vec<C64>>,
        normalization: f64,
        signal_band_max: f64,
        time: f64,
    ) -> Result<Self> {
        if a.len() != grid.n_points() {
            return Err(EosError::GridMismatch(format!(
                "coefficient length {} vs grid {}",
                a.len(),
                grid.n_points()
            )));
        }
        if let Some(x) = &aux {
            if x.len() != grid.n_points() {
                return Err(EosError::GridMismatch("aux coefficient length mismatch".into()));
            }
        }
        let dw = grid.delta_omega();
        let mut weight = a.iter().map(|c| c.norm_sqr()).sum::<f64>() * dw;
        if let Some(x) = &aux {
            weight += x.iter().map(|c| c.norm_sqr()).sum::<f64>() * dw;
        }
        if !(weight > 0.0) {
            return Err(EosError::Invariant(
                "detection operator has zero weight; nothing is detected".into(),
            ));
        }
        let scale = 1.0 / (2.0 * weight).sqrt();
        let a: Vec<C64> = a.into_iter().map(|c| c * scale).collect();
        let aux = aux.map(|x| x.into_iter().map(|c| c * scale).collect::<Vec<_>>());
        let b = crate::field::mirror(&a);
        Ok(Self {
            grid,
            a,
            b,
            aux,
            normalization,
            shot_scale: 2.0 * weight,
            signal_band_max,
            time,
        })
    }

    /// Quadrature observable `(â_m + â_m†)/sqrt(2)` of a unit-norm mode.
    pub fn from_mode_quadrature(mode: &SpectralMode) -> Result<Self> {
        let m = mode.normalized()?;
        let grid = m.grid().clone();
        let max = grid.omega_max();
        Self::from_raw(grid, m.coeffs().to_vec(), None, 1.0, max, 0.0)
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    /// Annihilation coefficients over the grid.
    pub fn a_coeffs(&self) -> &[C64] {
        &self.a
    }

    /// Creation coefficients (the Hermitian mirror of `a_coeffs`).
    pub fn b_coeffs(&self) -> &[C64] {
        &self.b
    }

    pub fn aux_coeffs(&self) -> Option<&[C64]> {
        self.aux.as_deref()
    }

    /// Vacuum variance; exactly 1/2 for a normalized operator.
    pub fn vacuum_variance(&self) -> f64 {
        let dw = self.grid.delta_omega();
        let mut v = self.a.iter().map(|c| c.norm_sqr()).sum::<f64>() * dw;
        if let Some(x) = &self.aux {
            v += x.iter().map(|c| c.norm_sqr()).sum::<f64>() * dw;
        }
        v
    }

    /// Detection weight carried by frequencies at or below `omega`.
    pub fn weight_below(&self, omega: f64) -> f64 {
        let dw = self.grid.delta_omega();
        let mut v = 0.0;
        for (k, c) in self.a.iter().enumerate() {
            if self.grid.omega(k) <= omega {
                v += c.norm_sqr();
            }
        }
        v * dw
    }

    /// Total detection weight including the auxiliary channel.
    pub fn total_weight(&self) -> f64 {
        self.vacuum_variance()
    }

    /// Signal-region part of the annihilation coefficients as a mode.
    pub fn signal_mode(&self) -> SpectralMode {
        let coeffs = self
            .a
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if self.grid.omega(k) <= self.signal_band_max {
                    *c
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect();
        SpectralMode::new(self.grid.clone(), coeffs).expect("same grid")
    }

    /// The same readout at sampling time `t`: every coefficient rotates by
    /// `exp(-i omega (t - time))`.
    pub fn at_time(&self, t: f64) -> Self {
        let dt = t - self.time;
        let rot = |v: &[C64]| -> Vec<C64> {
            v.iter()
                .enumerate()
                .map(|(k, c)| c * C64::from_polar(1.0, -self.grid.omega(k) * dt))
                .collect()
        };
        let a = rot(&self.a);
        let b = crate::field::mirror(&a);
        Self {
            grid: self.grid.clone(),
            b,
            aux: self.aux.as_ref().map(|x| rot(x)),
            a,
            normalization: self.normalization,
            shot_scale: self.shot_scale,
            signal_band_max: self.signal_band_max,
            time: t,
        }
    }

    /// Scalar `m` such that the commutator with `other` equals `i m`
    /// in shot-noise units; 0 for a jointly measurable pair.
    pub fn commutator_scale(&self, other: &Self) -> f64 {
        let dw = self.grid.delta_omega();
        let mut acc = C64::new(0.0, 0.0);
        for (x, y) in self.a.iter().zip(&other.a) {
            acc += x * y.conj();
        }
        match (&self.aux, &other.aux) {
            (Some(p), Some(q)) => {
                for (x, y) in p.iter().zip(q) {
                    acc += x * y.conj();
                }
            }
            _ => {}
        }
        2.0 * acc.im * dw
    }
}
