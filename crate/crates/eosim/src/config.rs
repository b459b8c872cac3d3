//! Experiment configuration: a single TOML file with grid, crystal, probe,
//! ports, signal, sweep and output blocks. Frequencies are given in THz at
//! this boundary and converted to SI internally. Unknown keys are rejected.

use serde::{Deserialize, Serialize};

use crate::chain::{
    detect, CrystalParams, EosChain, PortConfig, ProbePulse, ProbeShape, RefractiveIndexModel,
};
use crate::error::{EosError, Result};
use crate::field::FrequencyGrid;
use crate::metrics::{Quadrature, ResourceConstraint, SweepSetup};
use crate::units::{thz, PhysicalConstants, DEFAULT_CROSS_SECTION};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridBlock {
    pub omega_max_thz: f64,
    pub n_points: usize,
}

impl Default for GridBlock {
    fn default() -> Self {
        Self { omega_max_thz: 400.0, n_points: 4096 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstantsBlock {
    pub cross_section_um2: f64,
    pub natural_units: bool,
}

impl Default for ConstantsBlock {
    fn default() -> Self {
        Self { cross_section_um2: DEFAULT_CROSS_SECTION * 1e12, natural_units: false }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CrystalBlock {
    pub length_um: f64,
    pub r41_pm_per_v: f64,
    pub phase_matching: bool,
    pub mir_index: [f64; 2],
    pub mir_edge_thz: f64,
    pub nir_fit_min_thz: f64,
    /// `(f_thz, n)` anchors of the quadratic probe-band index fit.
    pub nir_anchors: [[f64; 2]; 3],
}

impl Default for CrystalBlock {
    fn default() -> Self {
        Self {
            length_um: 7.0,
            r41_pm_per_v: 4.0,
            phase_matching: true,
            mir_index: [2.55, 2.59],
            mir_edge_thz: 40.0,
            nir_fit_min_thz: 150.0,
            nir_anchors: [[200.0, 2.7355], [300.0, 2.7891], [400.0, 2.8806]],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeBlock {
    /// One of `sinc`, `odd-phase`, `multiplexed`.
    pub shape: String,
    pub photon_number: f64,
    pub center_thz: f64,
    pub bandwidth_thz: f64,
    pub carrier_fraction: f64,
    pub carrier_width_thz: f64,
    /// Multiplexed layout: flat field block.
    pub e_center_thz: f64,
    pub e_bandwidth_thz: f64,
    pub e_photon_share: f64,
}

impl Default for ProbeBlock {
    fn default() -> Self {
        Self {
            shape: "multiplexed".into(),
            photon_number: 5e9,
            center_thz: 340.0,
            bandwidth_thz: 120.0,
            carrier_fraction: 0.98,
            carrier_width_thz: 3.0,
            e_center_thz: 217.5,
            e_bandwidth_thz: 55.0,
            e_photon_share: 0.5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PortsBlock {
    /// Field/Hilbert boundary of the multiplexed layout.
    pub split_eh_thz: f64,
    /// Hilbert band split (the odd-phase carrier).
    pub h_split_thz: f64,
    /// Signal/probe boundary used by coupling metrics.
    pub signal_band_max_thz: f64,
}

impl Default for PortsBlock {
    fn default() -> Self {
        Self { split_eh_thz: 275.0, h_split_thz: 340.0, signal_band_max_thz: 140.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SignalBlock {
    pub omega0_thz: f64,
    pub sigma_thz: f64,
    pub r: f64,
}

impl Default for SignalBlock {
    fn default() -> Self {
        Self { omega0_thz: 20.0, sigma_thz: 4.0, r: 0.5 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepBlock {
    /// Carrier of the field-readout (flat) sweep probe.
    pub e_carrier_thz: f64,
    /// Carrier of the Hilbert-readout (delocalized) sweep probe.
    pub h_carrier_thz: f64,
    pub h_carrier_fraction: f64,
    pub h_carrier_width_thz: f64,
    pub min_bandwidth_thz: f64,
    pub max_bandwidth_thz: f64,
    pub n_points: usize,
    /// Coarse scan resolution of the constrained optimization.
    pub scan_points: usize,
}

impl Default for SweepBlock {
    fn default() -> Self {
        Self {
            e_carrier_thz: 300.0,
            h_carrier_thz: 260.0,
            h_carrier_fraction: 0.98,
            h_carrier_width_thz: 3.0,
            min_bandwidth_thz: 10.0,
            max_bandwidth_thz: 400.0,
            n_points: 40,
            scan_points: 16,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TomographyBlock {
    pub t_min_fs: f64,
    pub t_max_fs: f64,
    pub t_step_fs: f64,
    pub husimi_half_width: f64,
    pub husimi_points: usize,
    pub shots: usize,
    pub seed: u64,
}

impl Default for TomographyBlock {
    fn default() -> Self {
        Self {
            t_min_fs: -250.0,
            t_max_fs: 250.0,
            t_step_fs: 2.0,
            husimi_half_width: 4.0,
            husimi_points: 81,
            shots: 0,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub directory: String,
    pub svg: bool,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self { directory: String::new(), svg: true }
    }
}

/// Root configuration document.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub grid: GridBlock,
    pub constants: ConstantsBlock,
    pub crystal: CrystalBlock,
    pub probe: ProbeBlock,
    pub ports: PortsBlock,
    pub signal: SignalBlock,
    pub sweep: SweepBlock,
    pub tomography: TomographyBlock,
    pub output: OutputBlock,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text)
            .map_err(|e| EosError::Config(format!("cannot parse config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| EosError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        self.constants().validate()?;
        self.crystal().validate()?;
        let grid = self.grid()?;
        self.probe()?.validate(&grid)?;
        self.multiplexed_ports()?.validate(&grid)?;
        if !(self.signal.omega0_thz > 0.0 && self.signal.sigma_thz > 0.0) {
            return Err(EosError::Config("signal block needs positive frequencies".into()));
        }
        if self.sweep.n_points < 2 || self.sweep.min_bandwidth_thz <= 0.0 {
            return Err(EosError::Config("sweep block needs >= 2 positive bandwidths".into()));
        }
        if self.tomography.t_step_fs <= 0.0 || self.tomography.t_max_fs <= self.tomography.t_min_fs
        {
            return Err(EosError::Config("tomography time scan is empty".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<FrequencyGrid> {
        FrequencyGrid::from_max(thz(self.grid.omega_max_thz), self.grid.n_points)
    }

    pub fn constants(&self) -> PhysicalConstants {
        if self.constants.natural_units {
            PhysicalConstants::natural()
        } else {
            PhysicalConstants::si(self.constants.cross_section_um2 * 1e-12)
        }
    }

    pub fn crystal(&self) -> CrystalParams {
        let c = &self.crystal;
        CrystalParams {
            length: c.length_um * 1e-6,
            r41: c.r41_pm_per_v * 1e-12,
            phase_matching: c.phase_matching,
            index: RefractiveIndexModel::Zincblende {
                mir_n0: c.mir_index[0],
                mir_n1: c.mir_index[1],
                mir_edge: thz(c.mir_edge_thz),
                nir_min: thz(c.nir_fit_min_thz),
                nir_anchors: [
                    (thz(c.nir_anchors[0][0]), c.nir_anchors[0][1]),
                    (thz(c.nir_anchors[1][0]), c.nir_anchors[1][1]),
                    (thz(c.nir_anchors[2][0]), c.nir_anchors[2][1]),
                ],
            },
        }
    }

    pub fn probe(&self) -> Result<ProbePulse> {
        let p = &self.probe;
        let shape = match p.shape.as_str() {
            "sinc" => ProbeShape::Sinc {
                center: thz(p.center_thz),
                bandwidth: thz(p.bandwidth_thz),
            },
            "odd-phase" => ProbeShape::OddPhase {
                center: thz(p.center_thz),
                bandwidth: thz(p.bandwidth_thz),
                carrier_fraction: p.carrier_fraction,
                carrier_width: thz(p.carrier_width_thz),
            },
            "multiplexed" => ProbeShape::Multiplexed {
                e_center: thz(p.e_center_thz),
                e_bandwidth: thz(p.e_bandwidth_thz),
                h_center: thz(p.center_thz),
                h_bandwidth: thz(p.bandwidth_thz),
                h_carrier_fraction: p.carrier_fraction,
                h_carrier_width: thz(p.carrier_width_thz),
                e_photon_share: p.e_photon_share,
            },
            other => {
                return Err(EosError::Config(format!(
                    "unknown probe shape '{other}' (expected sinc, odd-phase or multiplexed)"
                )))
            }
        };
        Ok(ProbePulse::new(shape, p.photon_number))
    }

    pub fn signal_band_max(&self) -> f64 {
        thz(self.ports.signal_band_max_thz)
    }

    /// Signal band edge for band-limited metrics: twice the signal center.
    pub fn band_edge(&self) -> f64 {
        thz(2.0 * self.signal.omega0_thz)
    }

    pub fn multiplexed_ports(&self) -> Result<PortConfig> {
        let probe = self.probe()?;
        match probe.shape {
            ProbeShape::Multiplexed { .. } => detect::multiplexed_ports(
                &probe,
                thz(self.ports.split_eh_thz),
                thz(self.ports.h_split_thz),
            ),
            ProbeShape::Sinc { .. } => Ok(detect::field_quadrature_ports(&probe)),
            ProbeShape::OddPhase { .. } => Ok(detect::hilbert_quadrature_ports(&probe)),
        }
    }

    /// Chain for the configured probe and port layout.
    pub fn chain(&self) -> Result<EosChain> {
        EosChain::new(
            self.grid()?,
            self.constants(),
            self.crystal(),
            self.probe()?,
            self.multiplexed_ports()?,
            self.signal_band_max(),
        )
    }

    /// Sweep evaluator for single-quadrature bandwidth scans.
    pub fn sweep_setup(&self) -> Result<SweepSetup> {
        Ok(SweepSetup {
            grid: self.grid()?,
            consts: self.constants(),
            crystal: self.crystal(),
            e_carrier: thz(self.sweep.e_carrier_thz),
            h_carrier: thz(self.sweep.h_carrier_thz),
            photon_number: self.probe.photon_number,
            band_edge: self.band_edge(),
            signal_band_max: self.signal_band_max(),
            h_carrier_fraction: self.sweep.h_carrier_fraction,
            h_carrier_width: thz(self.sweep.h_carrier_width_thz),
        })
    }

    pub fn sweep_bandwidths(&self) -> Vec<f64> {
        crate::metrics::log_spaced(
            thz(self.sweep.min_bandwidth_thz),
            thz(self.sweep.max_bandwidth_thz),
            self.sweep.n_points,
        )
    }
}

/// Parse a CLI quadrature flag.
pub fn parse_quadrature(s: &str) -> Result<Quadrature> {
    match s.to_ascii_lowercase().as_str() {
        "e" | "field" => Ok(Quadrature::E),
        "h" | "hilbert" => Ok(Quadrature::H),
        other => Err(EosError::Config(format!("unknown quadrature '{other}'"))),
    }
}

/// Parse a CLI constraint flag.
pub fn parse_constraint(s: &str) -> Result<ResourceConstraint> {
    match s.to_ascii_lowercase().replace('_', "-").as_str() {
        "constant-photon-number" | "photons" => Ok(ResourceConstraint::ConstantPhotonNumber),
        "constant-intensity" | "intensity" => Ok(ResourceConstraint::ConstantIntensity),
        other => Err(EosError::Config(format!("unknown constraint '{other}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_validates_and_round_trips() {
        let cfg = ExperimentConfig::default();
        cfg.validate().unwrap();
        let text = cfg.to_toml();
        let back = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(back.grid.n_points, cfg.grid.n_points);
        assert_eq!(back.probe.shape, cfg.probe.shape);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ExperimentConfig::from_toml("[grid]\nomega_max_thz = 400.0\nbogus = 1\n");
        assert!(matches!(err, Err(EosError::Config(_))));
        let err = ExperimentConfig::from_toml("[nonsense]\nx = 1\n");
        assert!(matches!(err, Err(EosError::Config(_))));
    }

    #[test]
    fn invalid_probe_shape_is_rejected() {
        let mut cfg = ExperimentConfig::default();
        cfg.probe.shape = "gaussian".into();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn flag_parsers() {
        assert_eq!(parse_quadrature("E").unwrap(), Quadrature::E);
        assert_eq!(parse_quadrature("hilbert").unwrap(), Quadrature::H);
        assert!(parse_quadrature("x").is_err());
        assert_eq!(
            parse_constraint("constant-intensity").unwrap(),
            ResourceConstraint::ConstantIntensity
        );
        assert_eq!(
            parse_constraint("constant_photon_number").unwrap(),
            ResourceConstraint::ConstantPhotonNumber
        );
        assert!(parse_constraint("free-lunch").is_err());
    }
}
