//! Models of a flux-tunable Josephson coupler between two transmon-style
//! qubits.
//!
//! The transverse coupling g and the diagonal coupling J are computed along
//! four independent routes: the weak-coupling network formula
//! ([`linear::weak_coupling_g`]), the full linearized network
//! ([`linear::linear_network`]), first-order nonlinear corrections
//! ([`nonlinear`]) and exact diagonalization on a phase grid ([`exact`]).
//! All quantities are SI internally; frequencies are angular (rad/s).

pub mod equilibrium;
pub mod error;
pub mod exact;
pub mod linear;
pub mod nonlinear;
pub mod params;
pub mod units;

pub use equilibrium::{
    coupling_zero_fluxes, equilibrium, solve_y_exact, solve_y_perturbative, EquilibriumState,
};
pub use error::{CouplerError, Result};
pub use linear::{linear_network, transverse_g_linear, weak_coupling_g, LinearNetwork};
pub use nonlinear::{gamma_coefficients, NonlinearCoefficients, Zeta};
pub use params::{CircuitParams, Qubit};
