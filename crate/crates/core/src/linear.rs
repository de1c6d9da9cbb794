//! Harmonic approximation of the coupled circuit.
//!
//! Two routes are provided. The weak-coupling route treats the inductor
//! network classically (`network_impedances`, `weak_coupling_g`) with a
//! flux-independent qubit frequency. The full linearized route eliminates
//! the massless nodes exactly at quadratic order (`linear_network`) and
//! yields flux-dependent self-inductances, the bilinear coefficient Γ11 and
//! the transverse coupling `transverse_g_linear`.

use serde::{Deserialize, Serialize};

use crate::equilibrium::EquilibriumState;
use crate::error::{CouplerError, Result};
use crate::params::CircuitParams;

/// Mutual inductance M and qubit self-inductance L_q of the classical
/// network, for identical qubit-side elements.
pub fn network_impedances(params: &CircuitParams, eq: &EquilibriumState) -> Result<(f64, f64)> {
    params.require_symmetric("network impedances")?;
    let (lj, l0) = (params.lj1, params.l01);
    let m = mutual_inductance(l0, params.lt, eq);
    Ok((m, lj + l0 - m))
}

/// M = L0² / (L_eff + 2 L0), written in terms of cos δ so the open coupler
/// gives exactly zero.
fn mutual_inductance(l0: f64, lt: f64, eq: &EquilibriumState) -> f64 {
    if eq.is_open_coupler() {
        return 0.0;
    }
    let cos = eq.cos_delta();
    l0 * l0 * cos / (lt + 2.0 * l0 * cos)
}

/// Weak-coupling transverse coupling in rad/s for resonant identical
/// qubits at the supplied (flux-independent) angular frequency.
pub fn weak_coupling_g(params: &CircuitParams, eq: &EquilibriumState, omega_q: f64) -> Result<f64> {
    params.require_symmetric("weak-coupling g")?;
    let (lj, l0, lt) = (params.lj1, params.l01, params.lt);
    if eq.is_open_coupler() {
        return Ok(0.0);
    }
    let cos = eq.cos_delta();
    Ok(-l0 * l0 * cos * omega_q / (2.0 * (lj + l0) * (lt + 2.0 * l0 * cos)))
}

/// Weak-coupling estimate of Γ11, kept for comparison against the full
/// expression in [`LinearNetwork::gamma11`].
pub fn gamma11_weak(params: &CircuitParams, eq: &EquilibriumState) -> Result<f64> {
    params.require_symmetric("weak-coupling gamma11")?;
    let (lj, l0, lt) = (params.lj1, params.l01, params.lt);
    if eq.is_open_coupler() {
        return Ok(0.0);
    }
    let cos = eq.cos_delta();
    Ok(-l0 * l0 * cos / ((lj + l0).powi(2) * (lt + 2.0 * l0 * cos)))
}

/// Quadratic-order quantities at one flux point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearNetwork {
    pub cos_delta: f64,
    /// 1/L_Σᵢ = 1/Ljᵢ + 1/L0ᵢ + cos δ/LT.
    pub l_sigma1: f64,
    pub l_sigma2: f64,
    /// D = 1/(L_Σ1 L_Σ2) − cos²δ/LT², in 1/H².
    pub d: f64,
    /// Response of ξᵢ to φᵢ.
    pub alpha1: f64,
    pub alpha2: f64,
    /// Response of ξ_ī to φᵢ.
    pub beta1: f64,
    pub beta2: f64,
    pub l_q1: f64,
    pub l_q2: f64,
    /// Coefficient of φ1 φ2 in the quadratic potential, in 1/H.
    pub gamma11: f64,
    /// Classical mutual inductance; only defined for identical qubits.
    pub mutual: Option<f64>,
    /// 1 − (M/L_q)², diagnostic only.
    pub k_factor: Option<f64>,
    pub omega_q1: f64,
    pub omega_q2: f64,
    /// ⟨0|φ|1⟩ of each uncoupled harmonic qubit.
    pub phi01_1: f64,
    pub phi01_2: f64,
}

impl LinearNetwork {
    /// ξ⁽⁰⁾ = (α1 φ1 + β2 φ2, α2 φ2 + β1 φ1).
    pub fn linear_response(&self, phi1: f64, phi2: f64) -> (f64, f64) {
        (
            self.alpha1 * phi1 + self.beta2 * phi2,
            self.alpha2 * phi2 + self.beta1 * phi1,
        )
    }
}

pub fn linear_network(params: &CircuitParams, eq: &EquilibriumState) -> Result<LinearNetwork> {
    params.validate()?;
    let p = params;
    let cos = if eq.is_open_coupler() {
        0.0
    } else {
        eq.cos_delta()
    };

    let inv_sigma1 = 1.0 / p.lj1 + 1.0 / p.l01 + cos / p.lt;
    let inv_sigma2 = 1.0 / p.lj2 + 1.0 / p.l02 + cos / p.lt;
    let d = inv_sigma1 * inv_sigma2 - cos * cos / (p.lt * p.lt);
    if d.abs() < 1e-6 / (p.lj1 * p.lj2) {
        return Err(CouplerError::DegenerateNetwork { d });
    }

    let alpha1 = inv_sigma2 / (p.lj1 * d);
    let alpha2 = inv_sigma1 / (p.lj2 * d);
    let beta1 = cos / (p.lj1 * p.lt * d);
    let beta2 = cos / (p.lj2 * p.lt * d);

    let inv_lq1 = (1.0 - alpha1).powi(2) / p.lj1
        + alpha1 * alpha1 / p.l01
        + beta1 * beta1 / p.lj2
        + beta1 * beta1 / p.l02
        + cos * (alpha1 - beta1).powi(2) / p.lt;
    let inv_lq2 = (1.0 - alpha2).powi(2) / p.lj2
        + alpha2 * alpha2 / p.l02
        + beta2 * beta2 / p.lj1
        + beta2 * beta2 / p.l01
        + cos * (alpha2 - beta2).powi(2) / p.lt;
    let gamma11 = (alpha1 - 1.0) * beta2 / p.lj1
        + (alpha2 - 1.0) * beta1 / p.lj2
        + alpha1 * beta2 / p.l01
        + alpha2 * beta1 / p.l02
        - cos * (alpha1 - beta1) * (alpha2 - beta2) / p.lt;

    let l_q1 = 1.0 / inv_lq1;
    let l_q2 = 1.0 / inv_lq2;
    let omega_q1 = 1.0 / (l_q1 * p.c1).sqrt();
    let omega_q2 = 1.0 / (l_q2 * p.c2).sqrt();
    let phi01 = |l_q: f64, omega: f64| (p.hbar * l_q * omega / 2.0).sqrt() / p.reduced_flux();

    let (mutual, k_factor) = match network_impedances(p, eq) {
        Ok((m, lq)) => (Some(m), Some(1.0 - (m / lq).powi(2))),
        Err(_) => (None, None),
    };

    Ok(LinearNetwork {
        cos_delta: cos,
        l_sigma1: 1.0 / inv_sigma1,
        l_sigma2: 1.0 / inv_sigma2,
        d,
        alpha1,
        alpha2,
        beta1,
        beta2,
        l_q1,
        l_q2,
        gamma11,
        mutual,
        k_factor,
        omega_q1,
        omega_q2,
        phi01_1: phi01(l_q1, omega_q1),
        phi01_2: phi01(l_q2, omega_q2),
    })
}

/// g = Γ11 √(L_q1 L_q2) √(ω_q1 ω_q2) / 2, in rad/s.
pub fn transverse_g_linear(net: &LinearNetwork) -> f64 {
    0.5 * net.gamma11 * (net.l_q1 * net.l_q2).sqrt() * (net.omega_q1 * net.omega_q2).sqrt()
}
