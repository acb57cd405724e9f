//! Pulse-sequence simulation with quasi-static dephasing, band-resolved
//! observables, contrast and parameter scans.

mod band;
mod filter;
mod scans;
mod sequence;
mod simulate;
mod trace;

pub use band::{
    band_evolution, contrast_window, first_crossing, raman_contrast, transfer_contrast, BandEvolution,
    CONTRAST_TOL, CONTRAST_WINDOW_PERIODS,
};
pub use filter::{extract_interband_population, period_average};
pub use scans::{scan_contrast_vs_frequency, scan_localization, scan_rabi_vs_amplitude};
pub use sequence::{
    run_sequence, run_sequence_projected, Axis, NoiseModel, PulseSequence, Segment, DEFAULT_REALIZATIONS,
    DEFAULT_SIGMA_DETUNING_MHZ,
};
pub use simulate::{
    linspace, simulate_floquet_raman, simulate_photon_assisted, simulate_rabi, simulate_ramsey,
    simulate_third_order, Preparation, DEFAULT_PULSE_RABI_MHZ,
};
pub use trace::{Column, ScanResult, TimeTrace, TraceMeta};
