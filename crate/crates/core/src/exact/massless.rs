//! Elimination of the two massless node phases.
//!
//! In deviation variables around the DC equilibrium the potential, in units
//! of (Φ0/2π)², is
//!
//! ```text
//! u = (ξ̄1+ξ1)²/2L01 + (ξ̄2+ξ2)²/2L02 − cos(φ1−ξ1)/Lj1 − cos(φ2−ξ2)/Lj2
//!     − cos(ξ1−ξ2−δ)/LT
//! ```
//!
//! and each grid point (φ1, φ2) needs its minimum over (ξ1, ξ2).

use crate::equilibrium::EquilibriumState;
use crate::error::{CouplerError, Result};
use crate::linear::linear_network;
use crate::params::CircuitParams;

const GRADIENT_TOLERANCE: f64 = 1e-12;
const MAX_ITERATIONS: usize = 100;

/// Two-qubit potential with the massless phases still free.
#[derive(Debug, Clone, Copy)]
pub struct MasslessPotential {
    energy_scale: f64,
    xi1_bar: f64,
    xi2_bar: f64,
    delta: f64,
    inv_l01: f64,
    inv_l02: f64,
    inv_lj1: f64,
    inv_lj2: f64,
    inv_lt: f64,
    l0_scale: f64,
}

impl MasslessPotential {
    pub fn new(params: &CircuitParams, eq: &EquilibriumState) -> Self {
        Self {
            energy_scale: params.energy_scale(),
            xi1_bar: eq.xi1_bar,
            xi2_bar: eq.xi2_bar,
            delta: eq.delta,
            inv_l01: 1.0 / params.l01,
            inv_l02: 1.0 / params.l02,
            inv_lj1: 1.0 / params.lj1,
            inv_lj2: 1.0 / params.lj2,
            inv_lt: 1.0 / params.lt,
            l0_scale: params.l01.min(params.l02),
        }
    }

    /// Potential in units of (Φ0/2π)², i.e. in 1/H.
    pub fn reduced(&self, phi1: f64, phi2: f64, xi1: f64, xi2: f64) -> f64 {
        let a = self.xi1_bar + xi1;
        let b = self.xi2_bar + xi2;
        0.5 * a * a * self.inv_l01 + 0.5 * b * b * self.inv_l02
            - (phi1 - xi1).cos() * self.inv_lj1
            - (phi2 - xi2).cos() * self.inv_lj2
            - (xi1 - xi2 - self.delta).cos() * self.inv_lt
    }

    /// Potential in joules.
    pub fn energy(&self, phi1: f64, phi2: f64, xi1: f64, xi2: f64) -> f64 {
        self.energy_scale * self.reduced(phi1, phi2, xi1, xi2)
    }

    pub fn gradient(&self, phi1: f64, phi2: f64, xi1: f64, xi2: f64) -> [f64; 2] {
        let s = (xi1 - xi2 - self.delta).sin() * self.inv_lt;
        [
            (self.xi1_bar + xi1) * self.inv_l01 - (phi1 - xi1).sin() * self.inv_lj1 + s,
            (self.xi2_bar + xi2) * self.inv_l02 - (phi2 - xi2).sin() * self.inv_lj2 - s,
        ]
    }

    pub fn hessian(&self, phi1: f64, phi2: f64, xi1: f64, xi2: f64) -> [[f64; 2]; 2] {
        let c = (xi1 - xi2 - self.delta).cos() * self.inv_lt;
        [
            [self.inv_l01 + (phi1 - xi1).cos() * self.inv_lj1 + c, -c],
            [-c, self.inv_l02 + (phi2 - xi2).cos() * self.inv_lj2 + c],
        ]
    }

    /// Gradient norm in units of the natural scale 1/L0.
    fn scaled_gradient_norm(&self, g: [f64; 2]) -> f64 {
        g[0].hypot(g[1]) * self.l0_scale
    }

    /// Newton minimization from `seed`, with a backtracking line search and
    /// a gradient step whenever the local Hessian is not positive definite.
    pub fn minimize(&self, phi1: f64, phi2: f64, seed: (f64, f64)) -> Result<(f64, f64)> {
        let (mut xi1, mut xi2) = seed;
        let mut value = self.reduced(phi1, phi2, xi1, xi2);
        let mut grad = self.gradient(phi1, phi2, xi1, xi2);
        let mut converged = false;
        for _ in 0..MAX_ITERATIONS {
            if self.scaled_gradient_norm(grad) < GRADIENT_TOLERANCE {
                converged = true;
                break;
            }
            let h = self.hessian(phi1, phi2, xi1, xi2);
            let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
            let (d1, d2) = if h[0][0] > 0.0 && det > 0.0 {
                (
                    -(h[1][1] * grad[0] - h[0][1] * grad[1]) / det,
                    -(h[0][0] * grad[1] - h[1][0] * grad[0]) / det,
                )
            } else {
                let scale = self.l0_scale;
                (-grad[0] * scale, -grad[1] * scale)
            };

            let mut step = 1.0;
            let (mut n1, mut n2, mut nv);
            loop {
                n1 = xi1 + step * d1;
                n2 = xi2 + step * d2;
                nv = self.reduced(phi1, phi2, n1, n2);
                // near the minimum the decrease is below the rounding of the
                // cosine terms, so a shrinking gradient also counts
                let slack = 1e-14 * (self.inv_lj1 + self.inv_lj2 + self.inv_lt + value.abs());
                if nv <= value + slack || step < 1e-10 {
                    break;
                }
                let ng = self.gradient(phi1, phi2, n1, n2);
                if ng[0].hypot(ng[1]) < grad[0].hypot(grad[1]) {
                    break;
                }
                step *= 0.5;
            }
            if n1 == xi1 && n2 == xi2 {
                break;
            }
            xi1 = n1;
            xi2 = n2;
            value = nv;
            grad = self.gradient(phi1, phi2, xi1, xi2);
        }
        let residual = self.scaled_gradient_norm(grad);
        if !converged && residual >= GRADIENT_TOLERANCE {
            return Err(CouplerError::NonConvergence {
                what: "massless minimization",
                iterations: MAX_ITERATIONS,
                residual,
            });
        }
        let h = self.hessian(phi1, phi2, xi1, xi2);
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        if !(h[0][0] > 0.0 && det > 0.0) {
            return Err(CouplerError::SaddlePoint { phi1, phi2 });
        }
        Ok((xi1, xi2))
    }
}

/// Minimizes the potential over the massless phases at one grid point.
///
/// Without a seed the linear response of the harmonic network is used,
/// falling back to the origin when the network is degenerate.
pub fn minimize_massless(
    params: &CircuitParams,
    eq: &EquilibriumState,
    phi1: f64,
    phi2: f64,
    seed: Option<(f64, f64)>,
) -> Result<(f64, f64)> {
    params.validate()?;
    let seed = match seed {
        Some(s) => s,
        None => linear_network(params, eq)
            .map(|net| net.linear_response(phi1, phi2))
            .unwrap_or((0.0, 0.0)),
    };
    MasslessPotential::new(params, eq).minimize(phi1, phi2, seed)
}

/// Minimized potential U(φ1, φ2) in joules at a single point.
pub fn eliminated_potential(
    params: &CircuitParams,
    eq: &EquilibriumState,
    phi1: f64,
    phi2: f64,
) -> Result<f64> {
    let (xi1, xi2) = minimize_massless(params, eq, phi1, phi2, None)?;
    Ok(MasslessPotential::new(params, eq).energy(phi1, phi2, xi1, xi2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::equilibrium;
    use std::f64::consts::PI;

    #[test]
    fn origin_is_the_minimum_at_the_origin() {
        let p = CircuitParams::reference_circuit();
        for phi_ext in [0.0, 0.3 * PI, 0.598 * PI, PI, 1.7 * PI] {
            let eq = equilibrium(&p, phi_ext).unwrap();
            let (a, b) = minimize_massless(&p, &eq, 0.0, 0.0, None).unwrap();
            assert!(a.abs() < 1e-13 && b.abs() < 1e-13, "{phi_ext}: {a} {b}");
        }
    }

    #[test]
    fn small_displacement_follows_linear_response() {
        let p = CircuitParams::reference_circuit();
        let eq = equilibrium(&p, 0.3 * PI).unwrap();
        let net = linear_network(&p, &eq).unwrap();
        for phi in [0.01, 0.02] {
            let (a, b) = minimize_massless(&p, &eq, phi, 0.0, Some((0.0, 0.0))).unwrap();
            let (la, lb) = net.linear_response(phi, 0.0);
            // the quadratic mismatch comes from the cubic term of the coupler
            assert!((a - la).abs() < 0.05 * phi * phi, "{a} {la}");
            assert!((b - lb).abs() < 0.05 * phi * phi, "{b} {lb}");
        }
    }

    #[test]
    fn result_is_a_stationary_minimum() {
        let p = CircuitParams::reference_circuit();
        let eq = equilibrium(&p, 0.3 * PI).unwrap();
        let u = MasslessPotential::new(&p, &eq);
        let (a, b) = u.minimize(1.0, -0.7, (0.0, 0.0)).unwrap();
        let g = u.gradient(1.0, -0.7, a, b);
        assert!(g[0].hypot(g[1]) * p.l01 < 1e-12);
        let v = u.reduced(1.0, -0.7, a, b);
        for (da, db) in [(1e-4, 0.0), (-1e-4, 0.0), (0.0, 1e-4), (0.0, -1e-4)] {
            assert!(u.reduced(1.0, -0.7, a + da, b + db) > v);
        }
    }

    #[test]
    fn seeding_does_not_change_the_answer() {
        let p = CircuitParams::reference_circuit();
        let eq = equilibrium(&p, 1.2 * PI).unwrap();
        let u = MasslessPotential::new(&p, &eq);
        let a = u.minimize(2.5, 1.9, (0.0, 0.0)).unwrap();
        let b = u.minimize(2.5, 1.9, (0.4, -0.3)).unwrap();
        assert!((a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
    }

    #[test]
    fn invalid_params_are_rejected() {
        let p = CircuitParams::reference_circuit();
        let eq = equilibrium(&p, 0.0).unwrap();
        let bad = p.with_lt(0.3e-9);
        assert!(minimize_massless(&bad, &eq, 0.1, 0.1, None).is_err());
    }
}
