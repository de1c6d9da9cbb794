//! DC equilibrium of the coupler loop.
//!
//! At fixed external flux the potential is minimized with respect to all
//! four node phases. Two conditions give φ̄ᵢ = ξ̄ᵢ; the remaining two reduce
//! to a single transcendental equation for the screening phase
//!
//! ```text
//! y = -r sin(y + φ_ext),    r = (L01 + L02) / LT,
//! ```
//!
//! from which the node phases and the DC coupler phase δ = φ_ext + y follow.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{CouplerError, Result};
use crate::params::CircuitParams;
use crate::units::wrap_pi;

/// |cos δ| below this is treated as an open coupler (infinite L_eff).
pub const OPEN_COUPLER_COS: f64 = 1e-12;

const Y_TOLERANCE: f64 = 1e-14;
const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumState {
    pub phi_ext: f64,
    /// Screening phase sum (L01 + L02)·x.
    pub y: f64,
    /// Screening current scaled by Φ0/2π, in 1/H.
    pub x: f64,
    pub xi1_bar: f64,
    pub xi2_bar: f64,
    /// DC phase across the coupler junction, continuous in `phi_ext`.
    pub delta: f64,
    /// LT / cos δ; `f64::INFINITY` at the open-coupler points.
    pub l_eff: f64,
}

impl EquilibriumState {
    pub fn cos_delta(&self) -> f64 {
        self.delta.cos()
    }

    pub fn sin_delta(&self) -> f64 {
        self.delta.sin()
    }

    /// δ wrapped into `[0, 2π)`.
    pub fn delta_mod_two_pi(&self) -> f64 {
        crate::units::wrap_two_pi(self.delta)
    }

    pub fn is_open_coupler(&self) -> bool {
        self.cos_delta().abs() < OPEN_COUPLER_COS
    }
}

/// Solves `y + r sin(y + φ_ext) = 0` to 1e-14 with a safeguarded Newton
/// iteration on the bracket `[-r, r]`.
///
/// For `r < 1` the left-hand side is strictly increasing in `y`, so the
/// root is unique.
pub fn solve_y_exact(params: &CircuitParams, phi_ext: f64) -> Result<f64> {
    let r = params.screening_ratio();
    if r.is_nan() || r >= 1.0 {
        return Err(CouplerError::InvalidRegime { ratio: r });
    }
    if !phi_ext.is_finite() {
        return Err(CouplerError::InvalidParams(format!(
            "external flux must be finite, got {phi_ext}"
        )));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    // Reduce the flux first so that y is exactly periodic in φ_ext.
    let phase = wrap_pi(phi_ext);
    let residual = |y: f64| y + r * (y + phase).sin();

    let (mut lo, mut hi) = (-r, r);
    let mut y = -r * phase.sin();
    for _ in 0..MAX_ITERATIONS {
        let g = residual(y);
        if g.abs() < Y_TOLERANCE * 0.1 {
            return Ok(y);
        }
        if g > 0.0 {
            hi = y;
        } else {
            lo = y;
        }
        let slope = 1.0 + r * (y + phase).cos();
        let newton = y - g / slope;
        y = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < f64::EPSILON * r {
            break;
        }
    }
    let g = residual(y);
    if g.abs() < Y_TOLERANCE {
        Ok(y)
    } else {
        Err(CouplerError::NonConvergence {
            what: "screening equation",
            iterations: MAX_ITERATIONS,
            residual: g.abs(),
        })
    }
}

/// Second-order series solution `-r sin φ + (r²/2) sin 2φ`.
pub fn solve_y_perturbative(params: &CircuitParams, phi_ext: f64) -> f64 {
    let r = params.screening_ratio();
    -r * phi_ext.sin() + 0.5 * r * r * (2.0 * phi_ext).sin()
}

/// DC solution at `phi_ext`, built on the exact screening phase.
pub fn equilibrium(params: &CircuitParams, phi_ext: f64) -> Result<EquilibriumState> {
    params.validate()?;
    let y = solve_y_exact(params, phi_ext)?;
    let x = y / (params.l01 + params.l02);
    let xi1_bar = -params.l01 * x;
    let xi2_bar = params.l02 * x;
    let delta = phi_ext + xi2_bar - xi1_bar;
    let cos = delta.cos();
    let l_eff = if cos.abs() < OPEN_COUPLER_COS {
        f64::INFINITY
    } else {
        params.lt / cos
    };
    Ok(EquilibriumState {
        phi_ext,
        y,
        x,
        xi1_bar,
        xi2_bar,
        delta,
        l_eff,
    })
}

/// External fluxes in `[0, 2π)` at which cos δ = 0 and the coupling
/// vanishes: `(π/2 + r, 3π/2 − r)`.
pub fn coupling_zero_fluxes(params: &CircuitParams) -> (f64, f64) {
    let r = params.screening_ratio();
    (0.5 * PI + r, 1.5 * PI - r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reference_circuit() -> CircuitParams {
        CircuitParams::reference_circuit()
    }

    #[test]
    fn fixed_points_at_zero_and_pi() {
        let p = reference_circuit();
        assert_eq!(solve_y_exact(&p, 0.0).unwrap(), 0.0);
        assert!(solve_y_exact(&p, PI).unwrap().abs() < 1e-15);
        assert_eq!(solve_y_perturbative(&p, 0.0), 0.0);
    }

    #[test]
    fn quarter_flux_matches_bisection_value() {
        // 200-step bisection at 40 digits.
        let y = solve_y_exact(&reference_circuit(), 0.5 * PI).unwrap();
        assert!((y - -0.294_449_831_793_816_1).abs() < 1e-14);
        let pert = solve_y_perturbative(&reference_circuit(), 0.5 * PI);
        assert!((pert - -0.307_692_307_692_307_7).abs() < 1e-15);
        assert!((y - pert).abs() < 0.03);
    }

    #[test]
    fn perturbative_y_tracks_exact_over_period() {
        // Third order term peaks near 0.49 r³ = 0.0142 rad for the reference circuit.
        let p = reference_circuit();
        let r = p.screening_ratio();
        let max = (0..=400)
            .map(|k| 2.0 * PI * k as f64 / 400.0)
            .map(|phi| (solve_y_exact(&p, phi).unwrap() - solve_y_perturbative(&p, phi)).abs())
            .fold(0.0, f64::max);
        assert!(max < 0.52 * r.powi(3), "max deviation {max}");
        assert!(max > 0.01);
    }

    #[test]
    fn series_error_scales_as_cube_of_ratio() {
        let mut constants = Vec::new();
        for r in [0.1, 0.2, 0.3] {
            let p = CircuitParams::reference_circuit().with_l0(0.5 * r * 1.3e-9);
            assert!((p.screening_ratio() - r).abs() < 1e-12);
            let max = (0..=400)
                .map(|k| 2.0 * PI * k as f64 / 400.0)
                .map(|phi| (solve_y_exact(&p, phi).unwrap() - solve_y_perturbative(&p, phi)).abs())
                .fold(0.0, f64::max);
            constants.push(max / r.powi(3));
        }
        for c in &constants {
            assert!(*c > 0.45 && *c < 0.52, "fitted constant {c}");
        }
    }

    #[test]
    fn rejects_screening_ratio_at_or_above_one() {
        let p = reference_circuit().with_lt(0.4e-9);
        assert!(matches!(
            solve_y_exact(&p, 1.0),
            Err(CouplerError::InvalidRegime { .. })
        ));
        assert!(equilibrium(&p, 1.0).is_err());
    }

    #[test]
    fn equilibrium_at_special_fluxes() {
        let p = reference_circuit();
        let eq = equilibrium(&p, 0.0).unwrap();
        assert_eq!(eq.delta, 0.0);
        assert_eq!(eq.l_eff, p.lt);
        assert_eq!(eq.xi1_bar, 0.0);
        assert_eq!(eq.xi2_bar, 0.0);

        let eq = equilibrium(&p, PI).unwrap();
        assert!((eq.delta - PI).abs() < 1e-15);
        assert!((eq.l_eff + p.lt).abs() < 1e-20);
    }

    #[test]
    fn coupling_zeros_for_reference_circuit() {
        let (a, b) = coupling_zero_fluxes(&reference_circuit());
        assert!((a / PI - 0.598).abs() < 0.001);
        assert!((b / PI - 1.402).abs() < 0.001);
        let q = reference_circuit().with_l0(0.0);
        assert_eq!(coupling_zero_fluxes(&q), (0.5 * PI, 1.5 * PI));
    }

    #[test]
    fn coupling_zeros_are_open_coupler_points() {
        let p = reference_circuit();
        let (a, b) = coupling_zero_fluxes(&p);
        for phi in [a, b] {
            let eq = equilibrium(&p, phi).unwrap();
            assert!(eq.cos_delta().abs() < 1e-10);
            assert!(eq.l_eff.is_infinite() || eq.l_eff.abs() > 1e3 * p.lt);
        }
    }

    #[test]
    fn delta_curve_is_monotone_and_pinned() {
        let p = reference_circuit();
        let r = p.screening_ratio();
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=480 {
            let phi = 2.0 * PI * k as f64 / 480.0;
            let eq = equilibrium(&p, phi).unwrap();
            assert!(eq.delta > prev);
            assert!((eq.delta - phi).abs() <= r + 1e-12);
            prev = eq.delta;
        }
        assert!((equilibrium(&p, 2.0 * PI).unwrap().delta - 2.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn delta_accessor_wraps() {
        let eq = equilibrium(&reference_circuit(), 2.0 * PI + 0.3).unwrap();
        assert!(eq.delta > 2.0 * PI);
        assert!((eq.delta_mod_two_pi() - (eq.delta - 2.0 * PI)).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn equilibrium_residuals(phi in -10.0f64..10.0, l0 in 50e-12f64..300e-12, lt in 0.7e-9f64..3e-9) {
            let p = CircuitParams::reference_circuit().with_l0(l0).with_lt(lt);
            prop_assume!(p.screening_ratio() < 0.95);
            let eq = equilibrium(&p, phi).unwrap();
            let r = p.screening_ratio();
            prop_assert!((eq.y + r * (eq.y + phi).sin()).abs() < 1e-12);
            prop_assert!((eq.xi1_bar / p.l01 + eq.x).abs() * p.l01 < 1e-12);
            prop_assert!((eq.xi2_bar / p.l02 - eq.x).abs() * p.l02 < 1e-12);
            let screening = (eq.xi1_bar - eq.xi2_bar - phi).sin() / p.lt;
            prop_assert!((eq.x - screening).abs() * p.lt < 1e-12);
            prop_assert!((eq.y - eq.x * (p.l01 + p.l02)).abs() < 1e-15);
            prop_assert!((eq.delta - (phi + eq.xi2_bar - eq.xi1_bar)).abs() < 1e-15);
        }

        #[test]
        fn y_is_odd_and_periodic(phi in -7.0f64..7.0) {
            let p = reference_circuit();
            let y = solve_y_exact(&p, phi).unwrap();
            prop_assert!((y + solve_y_exact(&p, -phi).unwrap()).abs() < 1e-14);
            prop_assert!((y - solve_y_exact(&p, phi + 2.0 * PI).unwrap()).abs() < 1e-14);
            let r = p.screening_ratio();
            prop_assert!(y.abs() <= r);
        }

        #[test]
        fn equilibrium_is_periodic(phi in 0.0f64..6.3) {
            let p = reference_circuit();
            let a = equilibrium(&p, phi).unwrap();
            let b = equilibrium(&p, phi + 2.0 * PI).unwrap();
            prop_assert!((a.y - b.y).abs() < 1e-13);
            prop_assert!((a.xi1_bar - b.xi1_bar).abs() < 1e-13);
            prop_assert!((b.delta - a.delta - 2.0 * PI).abs() < 1e-13);
            if a.l_eff.is_finite() && b.l_eff.is_finite() {
                prop_assert!((a.l_eff - b.l_eff).abs() <= 1e-10 * a.l_eff.abs());
            }
        }
    }
}
