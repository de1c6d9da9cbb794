use std::io::Write;

use nalgebra::DMatrix;

use crate::equilibrium::EquilibriumState;
use crate::error::{CouplerError, Result};
use crate::exact::grid::GridSpec;
use crate::exact::massless::MasslessPotential;
use crate::linear::{linear_network, LinearNetwork};
use crate::params::CircuitParams;

/// Two-qubit Hamiltonian on an n×n phase grid.
///
/// Index `i * n + j` holds the point (φ1 = grid[i], φ2 = grid[j]). The
/// kinetic part is a banded finite-difference Laplacian along each axis with
/// open boundaries; the diagonal carries the eliminated potential.
#[derive(Debug, Clone)]
pub struct GridHamiltonian {
    grid: GridSpec,
    potential: Vec<f64>,
    /// Stencil coefficients already multiplied by the hopping energy of each axis.
    kinetic1: Vec<f64>,
    kinetic2: Vec<f64>,
    reference_widths: [f64; 2],
    exchange_symmetric: bool,
    hbar: f64,
}

impl GridHamiltonian {
    /// Builds from a potential surface in joules, row-major in (φ1, φ2).
    ///
    /// `reference_widths` are the ground-state phase spreads used to label
    /// eigenstates by excitation number.
    pub fn from_potential(
        params: &CircuitParams,
        grid: GridSpec,
        potential: Vec<f64>,
        reference_widths: [f64; 2],
    ) -> Result<Self> {
        grid.validate()?;
        let n = grid.n_points;
        if potential.len() != n * n {
            return Err(CouplerError::InvalidGrid(format!(
                "potential has {} entries, expected {}",
                potential.len(),
                n * n
            )));
        }
        if let Some(bad) = potential.iter().find(|u| !u.is_finite()) {
            return Err(CouplerError::InvalidGrid(format!(
                "non-finite potential value {bad}"
            )));
        }
        let hop = |c: f64| {
            params.hbar * params.hbar / (2.0 * c * params.energy_scale() * grid.d_phi().powi(2))
        };
        let t1 = hop(params.c1);
        let t2 = hop(params.c2);
        let coeffs = grid.stencil.coefficients();
        let mut h = Self {
            grid,
            potential,
            kinetic1: coeffs.iter().map(|c| c * t1).collect(),
            kinetic2: coeffs.iter().map(|c| c * t2).collect(),
            reference_widths,
            exchange_symmetric: false,
            hbar: params.hbar,
        };
        h.exchange_symmetric = params.c1 == params.c2 && h.potential_is_exchange_symmetric();
        Ok(h)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.n_points * self.grid.n_points
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn reference_widths(&self) -> [f64; 2] {
        self.reference_widths
    }

    /// True when the operator commutes with the exchange map
    /// (φ1, φ2) → (−φ2, −φ1).
    pub fn is_exchange_symmetric(&self) -> bool {
        self.exchange_symmetric
    }

    /// Image of a flat index under (φ1, φ2) → (−φ2, −φ1).
    pub fn exchange_index(&self, index: usize) -> usize {
        let n = self.grid.n_points;
        let (i, j) = (index / n, index % n);
        (n - 1 - j) * n + (n - 1 - i)
    }

    fn potential_is_exchange_symmetric(&self) -> bool {
        (0..self.dim()).all(|k| self.potential[k] == self.potential[self.exchange_index(k)])
    }

    /// Adds a constant to every diagonal element.
    pub fn shift_diagonal(&mut self, shift: f64) {
        for u in &mut self.potential {
            *u += shift;
        }
    }

    /// Value of the (i, i) matrix element.
    pub fn diagonal(&self, index: usize) -> f64 {
        self.potential[index] + self.kinetic1[0] + self.kinetic2[0]
    }

    /// y = H x.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.grid.n_points;
        let d0 = self.kinetic1[0] + self.kinetic2[0];
        let reach = self.kinetic1.len() - 1;
        for i in 0..n {
            let row = i * n;
            for j in 0..n {
                let k = row + j;
                let mut acc = (self.potential[k] + d0) * x[k];
                for s in 1..=reach {
                    let c2 = self.kinetic2[s];
                    if j >= s {
                        acc += c2 * x[k - s];
                    }
                    if j + s < n {
                        acc += c2 * x[k + s];
                    }
                    let c1 = self.kinetic1[s];
                    if i >= s {
                        acc += c1 * x[k - s * n];
                    }
                    if i + s < n {
                        acc += c1 * x[k + s * n];
                    }
                }
                y[k] = acc;
            }
        }
    }

    /// Dense copy, for small grids and cross-checks.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        let mut e = vec![0.0; dim];
        let mut col = vec![0.0; dim];
        for c in 0..dim {
            e[c] = 1.0;
            self.apply(&e, &mut col);
            e[c] = 0.0;
            for r in 0..dim {
                m[(r, c)] = col[r];
            }
        }
        m
    }

    /// Writes `phi1,phi2,U` rows, U in joules.
    pub fn write_potential_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let pts = self.grid.points();
        let n = self.grid.n_points;
        writeln!(out, "phi1,phi2,U_J")?;
        for i in 0..n {
            for j in 0..n {
                writeln!(
                    out,
                    "{:e},{:e},{:e}",
                    pts[i],
                    pts[j],
                    self.potential[i * n + j]
                )?;
            }
        }
        Ok(())
    }
}

fn reference_widths(params: &CircuitParams, net: Option<&LinearNetwork>) -> [f64; 2] {
    match net {
        Some(n) => [n.phi01_1, n.phi01_2],
        None => {
            // series Lj + L0 oscillator, used when the network is degenerate
            let width = |c: f64, l: f64| {
                let omega = 1.0 / (l * c).sqrt();
                (params.hbar * l * omega / 2.0).sqrt() / params.reduced_flux()
            };
            [
                width(params.c1, params.lj1 + params.l01),
                width(params.c2, params.lj2 + params.l02),
            ]
        }
    }
}

/// Eliminated potential on the whole grid, row-major, in joules.
///
/// Points are visited in row-major order and each minimization is seeded
/// with the previous solution. For symmetric circuits only one point of each
/// exchange pair is minimized; its partner is copied so the surface is
/// exactly symmetric.
pub fn potential_surface(
    params: &CircuitParams,
    eq: &EquilibriumState,
    grid: &GridSpec,
) -> Result<Vec<f64>> {
    params.validate()?;
    grid.validate()?;
    let n = grid.n_points;
    let pts = grid.points();
    let u = MasslessPotential::new(params, eq);
    let symmetric = params.is_symmetric();
    let first_seed = linear_network(params, eq)
        .map(|net| net.linear_response(pts[0], pts[0]))
        .unwrap_or((0.0, 0.0));

    let mut surface = vec![0.0; n * n];
    let mut xi = vec![(0.0, 0.0); n * n];
    let mut seed = first_seed;
    for i in 0..n {
        for j in 0..n {
            let k = i * n + j;
            let mirror = (n - 1 - j) * n + (n - 1 - i);
            if symmetric && mirror < k {
                surface[k] = surface[mirror];
                let (a, b) = xi[mirror];
                xi[k] = (-b, -a);
            } else {
                let (phi1, phi2) = (pts[i], pts[j]);
                let sol = u
                    .minimize(phi1, phi2, seed)
                    .map_err(|e| CouplerError::GridPoint {
                        phi1,
                        phi2,
                        source: Box::new(e),
                    })?;
                xi[k] = sol;
                surface[k] = u.energy(phi1, phi2, sol.0, sol.1);
            }
            seed = if j + 1 < n { xi[k] } else { xi[i * n] };
        }
    }
    Ok(surface)
}

/// Full nonlinear Hamiltonian at one flux point.
pub fn assemble_hamiltonian(
    params: &CircuitParams,
    eq: &EquilibriumState,
    grid: &GridSpec,
) -> Result<GridHamiltonian> {
    let surface = potential_surface(params, eq, grid)?;
    let net = linear_network(params, eq).ok();
    GridHamiltonian::from_potential(
        params,
        *grid,
        surface,
        reference_widths(params, net.as_ref()),
    )
}

/// Hamiltonian with the diagonal replaced by the harmonic form
/// φ1²/2L_q1 + φ2²/2L_q2 + Γ11 φ1 φ2.
pub fn assemble_harmonic_hamiltonian(
    params: &CircuitParams,
    eq: &EquilibriumState,
    grid: &GridSpec,
) -> Result<GridHamiltonian> {
    grid.validate()?;
    let net = linear_network(params, eq)?;
    let pts = grid.points();
    let n = grid.n_points;
    let scale = params.energy_scale();
    let mut surface = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (pts[i], pts[j]);
            surface[i * n + j] =
                scale * (0.5 * a * a / net.l_q1 + 0.5 * b * b / net.l_q2 + net.gamma11 * a * b);
        }
    }
    GridHamiltonian::from_potential(params, *grid, surface, reference_widths(params, Some(&net)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::equilibrium;
    use crate::exact::grid::KineticStencil;
    use std::f64::consts::PI;

    fn small_grid() -> GridSpec {
        GridSpec::new(15, PI).unwrap()
    }

    #[test]
    fn dense_matrix_is_exactly_symmetric() {
        let p = CircuitParams::reference_circuit();
        let eq = equilibrium(&p, 0.3 * PI).unwrap();
        let h = assemble_hamiltonian(&p, &eq, &small_grid()).unwrap();
        let m = h.to_dense();
        assert_eq!((&m - m.transpose()).amax(), 0.0);
        assert_eq!(m[(7, 7)], h.diagonal(7));
    }

    #[test]
    fn symmetric_circuit_gives_exchange_symmetric_operator() {
        let p = CircuitParams::reference_circuit();
        for phi_ext in [0.0, 0.3 * PI, PI, 1.6 * PI] {
            let eq = equilibrium(&p, phi_ext).unwrap();
            let h = assemble_hamiltonian(&p, &eq, &small_grid()).unwrap();
            assert!(h.is_exchange_symmetric());
            let m = h.to_dense();
            let dim = h.dim();
            for r in 0..dim {
                for c in 0..dim {
                    assert_eq!(m[(r, c)], m[(h.exchange_index(r), h.exchange_index(c))]);
                }
            }
        }
    }

    #[test]
    fn mirrored_points_agree_with_direct_minimization() {
        let p = CircuitParams::reference_circuit();
        let eq = equilibrium(&p, 0.7 * PI).unwrap();
        let grid = small_grid();
        let surface = potential_surface(&p, &eq, &grid).unwrap();
        let u = MasslessPotential::new(&p, &eq);
        let pts = grid.points();
        let n = grid.n_points;
        for (i, j) in [(14, 2), (13, 0), (9, 4)] {
            let (a, b) = u.minimize(pts[i], pts[j], (0.0, 0.0)).unwrap();
            let direct = u.energy(pts[i], pts[j], a, b);
            let rel = (surface[i * n + j] - direct).abs() / direct.abs();
            assert!(rel < 1e-13, "{rel}");
        }
    }

    #[test]
    fn asymmetric_circuit_is_not_flagged_symmetric() {
        let mut p = CircuitParams::reference_circuit();
        p.lj2 = 8.0e-9;
        let eq = equilibrium(&p, 0.3 * PI).unwrap();
        let h = assemble_hamiltonian(&p, &eq, &small_grid()).unwrap();
        assert!(!h.is_exchange_symmetric());
    }

    #[test]
    fn kinetic_part_matches_stencil() {
        let p = CircuitParams::reference_circuit();
        let grid = GridSpec::new(9, PI)
            .unwrap()
            .with_stencil(KineticStencil::TightBinding);
        let h = GridHamiltonian::from_potential(&p, grid, vec![0.0; 81], [0.4, 0.4]).unwrap();
        let m = h.to_dense();
        let t = p.hbar * p.hbar / (2.0 * p.c1 * p.energy_scale() * grid.d_phi().powi(2));
        assert!((m[(40, 40)] - 4.0 * t).abs() < 1e-12 * t);
        assert!((m[(40, 41)] + t).abs() < 1e-12 * t);
        assert!((m[(40, 49)] + t).abs() < 1e-12 * t);
        assert_eq!(m[(40, 42)], 0.0);
        // open boundary: no wraparound between rows
        assert_eq!(m[(8, 9)], 0.0);
    }

    #[test]
    fn rejects_mismatched_potential() {
        let p = CircuitParams::reference_circuit();
        assert!(
            GridHamiltonian::from_potential(&p, small_grid(), vec![0.0; 10], [0.4, 0.4]).is_err()
        );
        let mut v = vec![0.0; 225];
        v[3] = f64::NAN;
        assert!(GridHamiltonian::from_potential(&p, small_grid(), v, [0.4, 0.4]).is_err());
    }

    #[test]
    fn potential_csv_has_one_row_per_point() {
        let p = CircuitParams::reference_circuit();
        let eq = equilibrium(&p, 0.0).unwrap();
        let h = assemble_hamiltonian(&p, &eq, &small_grid()).unwrap();
        let mut buf = Vec::new();
        h.write_potential_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 225);
        assert!(text.starts_with("phi1,phi2,U_J\n"));
    }
}
