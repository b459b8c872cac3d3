//! Discretized continuum field conventions: frequency grids, spectral modes,
//! Hilbert quadrature construction and overlap pairings.

pub mod grid;
pub mod mode;

pub use grid::FrequencyGrid;
pub use mode::{
    bandlimited_e, bandlimited_h, electric_mode_at, field_prefactor, hilbert_of, mirror, overlap,
    overlap_slices, parity_asymmetry, sampling_kernel, time_waveform, SpectralMode, TimeWaveform,
};
