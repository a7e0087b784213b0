//! Born-level partial-wave phase shifts for screened electron-electron
//! scattering in the total-spin-zero channel.
//!
//! Two independent routes produce the singlet amplitude:
//!
//! * method A sandwiches the reduced two-spin operator between coupled
//!   spin states ([`operator_amplitude`]);
//! * method B contracts explicit Dirac bilinears for z-polarized electrons
//!   ([`dirac_amplitude`]).
//!
//! [`partial_wave`] projects either one onto S, P, D, F waves and converts
//! the projection to a first-Born phase shift.

pub mod dirac_amplitude;
pub mod error;
pub mod kinematics;
pub mod numerics;
pub mod operator_amplitude;
pub mod partial_wave;
pub mod spin_algebra;
pub mod vec3;

pub use error::{Error, Result};
pub use kinematics::{build_kinematics, ComKinematics, EnergyUnit, PhysicsConstants};
pub use operator_amplitude::{
    AmplitudeMode, AmplitudeTerm, Channels, ExchangeSpinTreatment, TermMask, Vertex,
};
pub use partial_wave::{phase_shift, phase_shifts, Method, PhaseShiftRecord, Wave};
pub use vec3::Vec3;
