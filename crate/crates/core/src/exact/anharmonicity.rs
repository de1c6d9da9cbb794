use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::equilibrium::{coupling_zero_fluxes, equilibrium, EquilibriumState};
use crate::error::{CouplerError, Result};
use crate::exact::eigen::dense_lowest;
use crate::exact::grid::GridSpec;
use crate::exact::massless::MasslessPotential;
use crate::linear::linear_network;
use crate::params::{CircuitParams, Qubit};

/// How a single qubit is isolated from its partner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum UncoupledBias {
    /// Coupler biased where cos δ = 0.
    #[default]
    ZeroCouplingFlux,
    /// Coupler junction replaced by a 1 MH inductance.
    OpenCoupler,
}

/// Inductance standing in for an absent coupler.
pub const OPEN_COUPLER_LT: f64 = 1e6;

/// Grid used for single-qubit spectra.
pub fn default_1d_grid() -> GridSpec {
    GridSpec {
        n_points: 201,
        span: PI,
        ..GridSpec::default()
    }
}

/// Lowest `count` levels in joules of −(ħ²/2C(Φ0/2π)²) d²/dφ² + U(φ).
pub fn levels_from_potential_1d(
    params: &CircuitParams,
    capacitance: f64,
    grid: &GridSpec,
    potential: &[f64],
    count: usize,
) -> Result<Vec<f64>> {
    grid.validate()?;
    let n = grid.n_points;
    if potential.len() != n {
        return Err(CouplerError::InvalidGrid(format!(
            "potential has {} entries, expected {n}",
            potential.len()
        )));
    }
    let t = params.hbar * params.hbar
        / (2.0 * capacitance * params.energy_scale() * grid.d_phi().powi(2));
    let coeffs = grid.stencil.coefficients();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = potential[i] + t * coeffs[0];
        for (s, c) in coeffs.iter().enumerate().skip(1) {
            if i + s < n {
                m[(i, i + s)] = t * c;
                m[(i + s, i)] = t * c;
            }
        }
    }
    Ok(dense_lowest(m, count).values)
}

/// Potential of one qubit with the other held at its equilibrium and both
/// massless phases relaxed, in joules.
pub fn qubit_potential_1d(
    params: &CircuitParams,
    eq: &EquilibriumState,
    grid: &GridSpec,
    qubit: Qubit,
) -> Result<Vec<f64>> {
    params.validate()?;
    grid.validate()?;
    let u = MasslessPotential::new(params, eq);
    let pts = grid.points();
    // sweep outward from the origin so every seed is a close neighbour
    let c = grid.center();
    let mut out = vec![0.0; grid.n_points];
    let at = |phi: f64| match qubit {
        Qubit::One => (phi, 0.0),
        Qubit::Two => (0.0, phi),
    };
    for half in [
        (c..grid.n_points).collect::<Vec<_>>(),
        (0..=c).rev().collect(),
    ] {
        let mut seed = (0.0, 0.0);
        for i in half {
            let (p1, p2) = at(pts[i]);
            let xi = u
                .minimize(p1, p2, seed)
                .map_err(|e| CouplerError::GridPoint {
                    phi1: p1,
                    phi2: p2,
                    source: Box::new(e),
                })?;
            out[i] = u.energy(p1, p2, xi.0, xi.1);
            seed = xi;
        }
    }
    Ok(out)
}

fn eta_from_levels(params: &CircuitParams, levels: &[f64]) -> f64 {
    ((levels[1] - levels[0]) - (levels[2] - levels[1])) / params.hbar
}

/// Lowest three levels of one qubit at the given equilibrium, in joules.
pub fn qubit_levels_1d(
    params: &CircuitParams,
    eq: &EquilibriumState,
    grid: &GridSpec,
    qubit: Qubit,
) -> Result<Vec<f64>> {
    let potential = qubit_potential_1d(params, eq, grid, qubit)?;
    levels_from_potential_1d(params, params.capacitance(qubit), grid, &potential, 3)
}

/// η = (E1 − E0) − (E2 − E1) of qubit 1 at the given equilibrium, in rad/s.
pub fn anharmonicity_1d(
    params: &CircuitParams,
    eq: &EquilibriumState,
    grid: &GridSpec,
) -> Result<f64> {
    let levels = qubit_levels_1d(params, eq, grid, Qubit::One)?;
    Ok(eta_from_levels(params, &levels))
}

/// Same as [`anharmonicity_1d`] with the potential replaced by φ²/2L_q1.
pub fn harmonic_anharmonicity_1d(
    params: &CircuitParams,
    eq: &EquilibriumState,
    grid: &GridSpec,
) -> Result<f64> {
    let net = linear_network(params, eq)?;
    let scale = params.energy_scale();
    let potential: Vec<f64> = grid
        .points()
        .iter()
        .map(|p| scale * 0.5 * p * p / net.l_q1)
        .collect();
    let levels = levels_from_potential_1d(params, params.c1, grid, &potential, 3)?;
    Ok(eta_from_levels(params, &levels))
}

/// η of qubit 1 with the coupler switched off according to `bias`.
pub fn uncoupled_anharmonicity(
    params: &CircuitParams,
    grid: &GridSpec,
    bias: UncoupledBias,
) -> Result<f64> {
    let (p, eq) = uncoupled_equilibrium(params, bias)?;
    anharmonicity_1d(&p, &eq, grid)
}

pub fn uncoupled_equilibrium(
    params: &CircuitParams,
    bias: UncoupledBias,
) -> Result<(CircuitParams, EquilibriumState)> {
    params.validate()?;
    match bias {
        UncoupledBias::ZeroCouplingFlux => {
            let (zero, _) = coupling_zero_fluxes(params);
            Ok((*params, equilibrium(params, zero)?))
        }
        UncoupledBias::OpenCoupler => {
            let p = params.with_lt(OPEN_COUPLER_LT);
            Ok((p, equilibrium(&p, 0.0)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::rad_s_to_mhz;

    #[test]
    fn harmonic_potential_has_no_anharmonicity() {
        let p = CircuitParams::reference_circuit();
        let eq = equilibrium(&p, 0.3 * PI).unwrap();
        let eta = harmonic_anharmonicity_1d(&p, &eq, &default_1d_grid()).unwrap();
        assert!(rad_s_to_mhz(eta).abs() < 1.0, "{}", rad_s_to_mhz(eta));
    }

    #[test]
    fn harmonic_levels_match_oscillator_frequency() {
        let p = CircuitParams::reference_circuit();
        let eq = equilibrium(&p, 0.0).unwrap();
        let net = linear_network(&p, &eq).unwrap();
        let scale = p.energy_scale();
        let grid = default_1d_grid();
        let pot: Vec<f64> = grid
            .points()
            .iter()
            .map(|x| scale * 0.5 * x * x / net.l_q1)
            .collect();
        let lv = levels_from_potential_1d(&p, p.c1, &grid, &pot, 3).unwrap();
        let omega = (lv[1] - lv[0]) / p.hbar;
        assert!((omega / net.omega_q1 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn qubit_potentials_mirror_each_other() {
        let p = CircuitParams::reference_circuit();
        let eq = equilibrium(&p, 0.4 * PI).unwrap();
        let grid = GridSpec::new(21, PI).unwrap();
        let a = qubit_potential_1d(&p, &eq, &grid, Qubit::One).unwrap();
        let b = qubit_potential_1d(&p, &eq, &grid, Qubit::Two).unwrap();
        let n = grid.n_points;
        for i in 0..n {
            let rel = (a[i] - b[n - 1 - i]).abs() / a[i].abs();
            assert!(rel < 1e-13);
        }
    }

    #[test]
    fn both_uncoupled_choices_are_close() {
        let p = CircuitParams::reference_circuit();
        let grid = default_1d_grid();
        let zero = uncoupled_anharmonicity(&p, &grid, UncoupledBias::ZeroCouplingFlux).unwrap();
        let open = uncoupled_anharmonicity(&p, &grid, UncoupledBias::OpenCoupler).unwrap();
        assert!(zero > 0.0 && open > 0.0);
        assert!((zero / open - 1.0).abs() < 0.02, "{zero} {open}");
    }

    #[test]
    fn rejects_wrong_potential_length() {
        let p = CircuitParams::reference_circuit();
        assert!(levels_from_potential_1d(&p, p.c1, &default_1d_grid(), &[0.0; 3], 3).is_err());
    }
}
