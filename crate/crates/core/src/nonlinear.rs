//! First-order corrections from the junction nonlinearities.
//!
//! The quartic qubit-junction term and the cubic/quartic coupler-junction
//! terms are carried to first order. The resulting anharmonic potential is
//!
//! ```text
//! U⁽¹⁾/(Φ0/2π)² = Γ04 (φ1⁴ + φ2⁴) + Γ03 (φ1³ − φ2³) + Γ13 (φ1 φ2³ + φ1³ φ2)
//!               + Γ12 (φ1 φ2² − φ1² φ2) + Γ22 φ1² φ2²
//! ```
//!
//! for identical qubits with L0 ≪ Lj ≪ LT. Γ13 corrects the transverse
//! coupling; Γ22 gives a small direct σz⊗σz term. The dominant σz⊗σz term
//! comes from level repulsion with the second excited states, J ≈ g²/η.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::equilibrium::EquilibriumState;
use crate::error::{CouplerError, Result};
use crate::linear::LinearNetwork;
use crate::params::CircuitParams;
use crate::units::khz_to_rad_s;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlinearCoefficients {
    pub gamma04: f64,
    pub gamma03: f64,
    pub gamma13: f64,
    pub gamma12: f64,
    pub gamma22: f64,
    /// α and β evaluated at the current flux, not their asymptotic limits.
    pub alpha: f64,
    pub beta: f64,
}

pub fn gamma_coefficients(
    params: &CircuitParams,
    eq: &EquilibriumState,
    net: &LinearNetwork,
) -> Result<NonlinearCoefficients> {
    params.require_symmetric("nonlinear coefficients")?;
    let (lj, l0, lt) = (params.lj1, params.l01, params.lt);
    let (sin, cos) = if eq.is_open_coupler() {
        (eq.sin_delta().signum(), 0.0)
    } else {
        (eq.sin_delta(), eq.cos_delta())
    };
    let alpha = net.alpha1;
    let beta = net.beta1;
    Ok(NonlinearCoefficients {
        gamma04: -1.0 / (24.0 * lj),
        gamma03: alpha.powi(3) * sin / (6.0 * lt),
        gamma13: alpha * alpha * cos / (6.0 * lt),
        gamma12: alpha.powi(3) * sin / (2.0 * lt),
        gamma22: alpha * beta * (beta / l0 - alpha * cos / lt),
        alpha,
        beta,
    })
}

/// ħ ω_q L_q / (Φ0/2π), the flux-scaled zero-point product entering every
/// harmonic matrix element of qubit 1.
fn zero_point_product(params: &CircuitParams, net: &LinearNetwork) -> f64 {
    params.hbar * net.omega_q1 * net.l_q1 / params.reduced_flux()
}

/// Γ13 correction to the transverse coupling, in rad/s:
/// δg = (3/2) Γ13 (ħ ω_q L_q / (Φ0/2π))² / ħ.
pub fn delta_g(params: &CircuitParams, coeffs: &NonlinearCoefficients, net: &LinearNetwork) -> f64 {
    1.5 * coeffs.gamma13 * zero_point_product(params, net).powi(2) / params.hbar
}

/// Suppression factor ζ = g_tot / g.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Zeta {
    Defined(f64),
    /// The linear coupling is too close to zero for the ratio to mean
    /// anything.
    Undefined,
}

impl Zeta {
    pub fn value(self) -> Option<f64> {
        match self {
            Zeta::Defined(z) => Some(z),
            Zeta::Undefined => None,
        }
    }
}

/// Below |g|/2π = 1 kHz the suppression ratio is reported as undefined.
pub const ZETA_MIN_COUPLING_KHZ: f64 = 1.0;

pub fn g_total_and_zeta(g_linear: f64, dg: f64) -> (f64, Zeta) {
    let g_tot = g_linear + dg;
    let zeta = if dg == 0.0 {
        Zeta::Defined(1.0)
    } else if g_linear.abs() > khz_to_rad_s(ZETA_MIN_COUPLING_KHZ) {
        Zeta::Defined(1.0 + dg / g_linear)
    } else {
        Zeta::Undefined
    };
    (g_tot, zeta)
}

/// Closed-form suppression for L0 ≪ Lj ≪ LT: ζ ≈ 1 − π² ħω_q / (Φ0²/2Lj).
pub fn zeta_closed_form(params: &CircuitParams, omega_q: f64) -> f64 {
    1.0 - PI * PI * params.hbar * omega_q / (params.phi0 * params.phi0 / (2.0 * params.lj1))
}

/// J ≈ g_tot² / η from repulsion of |11⟩ by |02⟩ and |20⟩.
pub fn j_dominant(g_tot: f64, eta: f64) -> Result<f64> {
    if eta.is_nan() || eta <= 0.0 {
        return Err(CouplerError::NonPositiveAnharmonicity { eta });
    }
    Ok(g_tot * g_tot / eta)
}

/// Γ22 contribution J = Γ22 (2π/Φ0)² (ħ ω_q L_q / 2)², in rad/s.
pub fn j_subdominant(
    params: &CircuitParams,
    coeffs: &NonlinearCoefficients,
    net: &LinearNetwork,
) -> f64 {
    let half = 0.5 * zero_point_product(params, net);
    coeffs.gamma22 * half * half / params.hbar
}
