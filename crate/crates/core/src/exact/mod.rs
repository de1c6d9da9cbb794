//! Exact diagonalization of the two-qubit circuit on a phase grid.

pub mod anharmonicity;
pub mod eigen;
pub mod grid;
pub mod hamiltonian;
pub mod massless;
pub mod spectrum;

pub use anharmonicity::{
    anharmonicity_1d, default_1d_grid, uncoupled_anharmonicity, UncoupledBias,
};
pub use grid::{GridSpec, KineticStencil};
pub use hamiltonian::{
    assemble_hamiltonian, assemble_harmonic_hamiltonian, potential_surface, GridHamiltonian,
};
pub use massless::{minimize_massless, MasslessPotential};
pub use spectrum::{
    lowest_spectrum, lowest_spectrum_with, SpectrumOptions, SpectrumResult, StateLabel,
};

use crate::equilibrium::equilibrium;
use crate::error::Result;
use crate::params::CircuitParams;

/// Default number of eigenpairs: ground, both one-excitation states and the
/// three two-excitation states.
pub const DEFAULT_STATE_COUNT: usize = 6;

/// Assembles and diagonalizes at one external flux.
pub fn exact_spectrum(
    params: &CircuitParams,
    phi_ext: f64,
    grid: &GridSpec,
) -> Result<SpectrumResult> {
    let eq = equilibrium(params, phi_ext)?;
    let h = assemble_hamiltonian(params, &eq, grid)?;
    lowest_spectrum(&h, DEFAULT_STATE_COUNT)
}
