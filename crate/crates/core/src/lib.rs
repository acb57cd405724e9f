//! Floquet dynamics of a weakly, periodically driven two-level spin.
//!
//! The crate propagates the rotating-frame Hamiltonian
//! `H(t) = (Δz/2)σz + (Δx/2 + A sin φ(t))σx`, analyses its Floquet
//! structure (quasienergies, the two-band Wannier-Stark ladder, Raman
//! resonances), simulates pulse-sequence experiments with quasi-static
//! dephasing, and drives all of it from TOML scenario files.
//!
//! All frequencies are angular frequencies in rad/s and all times are in
//! seconds; [`units`] converts from the `(2π)·MHz` and µs figures used in
//! configuration files and outputs.

pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod fit;
pub mod floquet;
pub mod ladder;
pub mod optimize;
pub mod scenario;
pub mod spin;
pub mod units;

pub use dynamics::{
    hamiltonian_at, lab_frame_check, propagate_state, propagate_unitary, DriveParams, HamiltonianSample, Integrator,
    Propagator, Scheme,
};
pub use error::{Error, Result};
pub use floquet::{
    adiabaticity_parameter, eigenbasis, floquet_spectrum, raman_rabi_frequency, resonance_frequency,
    resonance_locate, EigenBasis, FloquetSpectrum, RabiMethod,
};
pub use ladder::{ladder_model, LadderModel};
pub use spin::{Mat2, SpinState};

/// Library version recorded in output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
