use serde::{Deserialize, Serialize};

use crate::error::{CouplerError, Result};
use crate::units::{FLUX_QUANTUM, HBAR};

/// Hardware values for the two qubits and the coupler, in SI units.
///
/// Index 1 and 2 label the two qubits. `lt` is the zero-bias linear
/// inductance of the coupler junction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    pub c1: f64,
    pub c2: f64,
    pub lj1: f64,
    pub lj2: f64,
    pub l01: f64,
    pub l02: f64,
    pub lt: f64,
    pub phi0: f64,
    pub hbar: f64,
}

impl CircuitParams {
    /// Symmetric circuit with the given per-qubit values.
    pub fn symmetric(c: f64, lj: f64, l0: f64, lt: f64) -> Self {
        Self {
            c1: c,
            c2: c,
            lj1: lj,
            lj2: lj,
            l01: l0,
            l02: l0,
            lt,
            phi0: FLUX_QUANTUM,
            hbar: HBAR,
        }
    }

    /// The example device: C = 91 fF, Lj = 8.6 nH, L0 = 200 pH, LT = 1.3 nH.
    pub fn reference_circuit() -> Self {
        Self::symmetric(91e-15, 8.6e-9, 200e-12, 1.3e-9)
    }

    pub fn with_lt(mut self, lt: f64) -> Self {
        self.lt = lt;
        self
    }

    pub fn with_lj(mut self, lj: f64) -> Self {
        self.lj1 = lj;
        self.lj2 = lj;
        self
    }

    pub fn with_l0(mut self, l0: f64) -> Self {
        self.l01 = l0;
        self.l02 = l0;
        self
    }

    /// Exchange the labels of the two qubits.
    pub fn swapped(self) -> Self {
        Self {
            c1: self.c2,
            c2: self.c1,
            lj1: self.lj2,
            lj2: self.lj1,
            l01: self.l02,
            l02: self.l01,
            ..self
        }
    }

    /// (L01 + L02) / LT.
    pub fn screening_ratio(&self) -> f64 {
        (self.l01 + self.l02) / self.lt
    }

    /// Φ0 / 2π, the flux scale that converts phases to fluxes.
    pub fn reduced_flux(&self) -> f64 {
        self.phi0 / (2.0 * std::f64::consts::PI)
    }

    /// (Φ0/2π)², the energy prefactor of every inductive term.
    pub fn energy_scale(&self) -> f64 {
        self.reduced_flux().powi(2)
    }

    pub fn capacitance(&self, qubit: Qubit) -> f64 {
        match qubit {
            Qubit::One => self.c1,
            Qubit::Two => self.c2,
        }
    }

    pub fn junction_inductance(&self, qubit: Qubit) -> f64 {
        match qubit {
            Qubit::One => self.lj1,
            Qubit::Two => self.lj2,
        }
    }

    pub fn ground_inductance(&self, qubit: Qubit) -> f64 {
        match qubit {
            Qubit::One => self.l01,
            Qubit::Two => self.l02,
        }
    }

    /// True when both qubits carry identical C, Lj and L0.
    pub fn is_symmetric(&self) -> bool {
        self.c1 == self.c2 && self.lj1 == self.lj2 && self.l01 == self.l02
    }

    /// Checks positivity of every element but not the single-branch
    /// regime; see [`Self::validate`].
    pub fn validate_elements(&self) -> Result<()> {
        let named = [
            ("C1", self.c1),
            ("C2", self.c2),
            ("Lj1", self.lj1),
            ("Lj2", self.lj2),
            ("L01", self.l01),
            ("L02", self.l02),
            ("LT", self.lt),
            ("Phi0", self.phi0),
            ("hbar", self.hbar),
        ];
        for (name, value) in named {
            if !(value.is_finite() && value > 0.0) {
                return Err(CouplerError::InvalidParams(format!(
                    "{name} must be finite and strictly positive, got {value:e}"
                )));
            }
        }
        Ok(())
    }

    /// Full validation, including `(L01+L02)/LT < 1`.
    pub fn validate(&self) -> Result<()> {
        self.validate_elements()?;
        let ratio = self.screening_ratio();
        if ratio >= 1.0 {
            return Err(CouplerError::InvalidRegime { ratio });
        }
        Ok(())
    }

    pub(crate) fn require_symmetric(&self, what: &'static str) -> Result<()> {
        if self.is_symmetric() {
            Ok(())
        } else {
            Err(CouplerError::AsymmetricParams(what))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Qubit {
    One,
    Two,
}
