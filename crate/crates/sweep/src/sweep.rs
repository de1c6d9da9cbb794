use std::f64::consts::PI;

use coupler_core::equilibrium::{equilibrium, EquilibriumState};
use coupler_core::exact::{
    assemble_hamiltonian, default_1d_grid, lowest_spectrum, uncoupled_anharmonicity,
    SpectrumResult, DEFAULT_STATE_COUNT,
};
use coupler_core::linear::{linear_network, transverse_g_linear, weak_coupling_g, LinearNetwork};
use coupler_core::nonlinear::{
    delta_g, g_total_and_zeta, gamma_coefficients, j_dominant, j_subdominant,
    NonlinearCoefficients, Zeta,
};
use coupler_core::units::{rad_s_to_ghz, rad_s_to_hz, rad_s_to_khz, rad_s_to_mhz};
use coupler_core::{CouplerError, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{CouplingPath, SweepConfig};

/// One flux point of a sweep. Absent values belong to disabled paths or to
/// a failed computation noted in `diagnostic`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct SweepRow {
    pub phi_ext_over_pi: f64,
    pub delta_rad: Option<f64>,
    #[serde(rename = "L_eff_nH")]
    pub l_eff_nh: Option<f64>,
    #[serde(rename = "omega_q_GHz")]
    pub omega_q_ghz: Option<f64>,
    #[serde(rename = "g_weak_MHz")]
    pub g_weak_mhz: Option<f64>,
    #[serde(rename = "g_linear_MHz")]
    pub g_linear_mhz: Option<f64>,
    #[serde(rename = "dg_MHz")]
    pub dg_mhz: Option<f64>,
    #[serde(rename = "g_tot_MHz")]
    pub g_tot_mhz: Option<f64>,
    pub zeta: Option<Zeta>,
    #[serde(rename = "splitting_ED_MHz")]
    pub splitting_ed_mhz: Option<f64>,
    #[serde(rename = "J_approx_kHz")]
    pub j_approx_khz: Option<f64>,
    #[serde(rename = "J_sub_Hz")]
    pub j_sub_hz: Option<f64>,
    #[serde(rename = "J_ED_kHz")]
    pub j_ed_khz: Option<f64>,
    #[serde(rename = "eta_MHz")]
    pub eta_mhz: Option<f64>,
    /// Empty when every enabled path succeeded.
    pub diagnostic: String,
}

impl SweepRow {
    pub fn failed(&self) -> bool {
        !self.diagnostic.is_empty()
    }
}

/// Everything computed at a single flux point.
#[derive(Debug, Clone, Serialize)]
pub struct PointReport {
    pub phi_ext: f64,
    pub equilibrium: Option<EquilibriumState>,
    pub network: Option<LinearNetwork>,
    pub nonlinear: Option<NonlinearCoefficients>,
    pub spectrum: Option<SpectrumResult>,
    pub row: SweepRow,
}

fn needs_anharmonicity(config: &SweepConfig) -> bool {
    config.has(CouplingPath::Perturbative) || config.has(CouplingPath::Exact)
}

/// Single-qubit anharmonicity used by the J estimate, in rad/s.
pub fn sweep_anharmonicity(config: &SweepConfig) -> Result<f64> {
    if let Some(eta) = config.eta_override {
        return Ok(eta);
    }
    let grid = default_1d_grid().with_stencil(config.grid.stencil);
    uncoupled_anharmonicity(&config.circuit, &grid, config.eta_bias)
}

fn note(diag: &mut Vec<String>, what: &str, err: &CouplerError) {
    diag.push(format!("{what}: {err}"));
}

/// Evaluates every enabled path at one flux. `eta` is the anharmonicity
/// from [`sweep_anharmonicity`], or the error that prevented computing it.
pub fn evaluate_point(config: &SweepConfig, phi_ext: f64, eta: &Result<f64>) -> PointReport {
    let p = &config.circuit;
    let mut row = SweepRow {
        phi_ext_over_pi: phi_ext / PI,
        ..SweepRow::default()
    };
    let mut diag = Vec::new();
    let mut report = PointReport {
        phi_ext,
        equilibrium: None,
        network: None,
        nonlinear: None,
        spectrum: None,
        row: SweepRow::default(),
    };

    let eq = match equilibrium(p, phi_ext) {
        Ok(eq) => eq,
        Err(e) => {
            note(&mut diag, "equilibrium", &e);
            row.diagnostic = diag.join("; ");
            report.row = row;
            return report;
        }
    };
    report.equilibrium = Some(eq);
    row.delta_rad = Some(eq.delta);
    row.l_eff_nh = eq.l_eff.is_finite().then_some(eq.l_eff * 1e9);
    if needs_anharmonicity(config) {
        match eta {
            Ok(v) => row.eta_mhz = Some(rad_s_to_mhz(*v)),
            Err(e) => note(&mut diag, "anharmonicity", e),
        }
    }

    if config.has(CouplingPath::Weak) {
        match weak_coupling_g(p, &eq, config.omega_q_weak) {
            Ok(g) => row.g_weak_mhz = Some(rad_s_to_mhz(g)),
            Err(e) => note(&mut diag, "weak", &e),
        }
    }

    let wants_network = config.has(CouplingPath::Linear) || config.has(CouplingPath::Perturbative);
    let net = if wants_network {
        match linear_network(p, &eq) {
            Ok(net) => Some(net),
            Err(e) => {
                note(&mut diag, "linear", &e);
                None
            }
        }
    } else {
        None
    };
    report.network = net;

    if let Some(net) = &net {
        row.omega_q_ghz = Some(rad_s_to_ghz(net.omega_q1));
        let g = transverse_g_linear(net);
        if config.has(CouplingPath::Linear) {
            row.g_linear_mhz = Some(rad_s_to_mhz(g));
        }
        if config.has(CouplingPath::Perturbative) {
            match gamma_coefficients(p, &eq, net) {
                Ok(coeffs) => {
                    report.nonlinear = Some(coeffs);
                    let dg = delta_g(p, &coeffs, net);
                    let (g_tot, zeta) = g_total_and_zeta(g, dg);
                    row.dg_mhz = Some(rad_s_to_mhz(dg));
                    row.g_tot_mhz = Some(rad_s_to_mhz(g_tot));
                    row.zeta = Some(zeta);
                    row.j_sub_hz = Some(rad_s_to_hz(j_subdominant(p, &coeffs, net)));
                    if let Ok(eta) = eta {
                        match j_dominant(g_tot, *eta) {
                            Ok(j) => row.j_approx_khz = Some(rad_s_to_khz(j)),
                            Err(e) => note(&mut diag, "J estimate", &e),
                        }
                    }
                }
                Err(e) => note(&mut diag, "perturbative", &e),
            }
        }
    }

    if config.has(CouplingPath::Exact) {
        let spectrum = assemble_hamiltonian(p, &eq, &config.grid)
            .and_then(|h| lowest_spectrum(&h, DEFAULT_STATE_COUNT));
        match spectrum {
            Ok(s) => {
                row.splitting_ed_mhz = Some(rad_s_to_mhz(s.splitting));
                row.j_ed_khz = s.j.map(rad_s_to_khz);
                report.spectrum = Some(s);
            }
            Err(e) => note(&mut diag, "exact", &e),
        }
    }

    row.diagnostic = diag.join("; ");
    report.row = row;
    report
}

/// Worker count: explicit request, then the `COUPLER_WORKERS` environment
/// variable, then the number of CPUs.
pub fn resolve_workers(requested: Option<usize>) -> usize {
    requested
        .or_else(|| {
            std::env::var("COUPLER_WORKERS")
                .ok()
                .and_then(|v| v.trim().parse::<usize>().ok())
        })
        .filter(|&n| n > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub failures: usize,
}

/// Runs all enabled paths over the configured flux range.
///
/// Points run on a pool of `workers` threads and come back in flux order;
/// each point is computed independently, so the result does not depend on
/// the worker count.
pub fn run_sweep(config: &SweepConfig, workers: usize) -> SweepOutcome {
    let eta = if needs_anharmonicity(config) {
        sweep_anharmonicity(config)
    } else {
        Ok(f64::NAN)
    };
    let fluxes = config.fluxes();
    let work = || -> Vec<SweepRow> {
        fluxes
            .par_iter()
            .map(|&phi| evaluate_point(config, phi, &eta).row)
            .collect()
    };
    let rows = match rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
    {
        Ok(pool) => pool.install(work),
        Err(_) => fluxes
            .iter()
            .map(|&phi| evaluate_point(config, phi, &eta).row)
            .collect(),
    };
    let failures = rows.iter().filter(|r| r.failed()).count();
    SweepOutcome { rows, failures }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::REFERENCE_CONFIG_JSON;
    use std::path::Path;

    fn analytic_config() -> SweepConfig {
        let mut c =
            SweepConfig::from_json_str(REFERENCE_CONFIG_JSON, Path::new("tableI.json")).unwrap();
        c.paths = [
            CouplingPath::Weak,
            CouplingPath::Linear,
            CouplingPath::Perturbative,
        ]
        .into_iter()
        .collect();
        c.eta_override = Some(coupler_core::units::mhz_to_rad_s(213.0));
        c.n_flux = 25;
        c
    }

    #[test]
    fn disabled_paths_leave_columns_absent() {
        let mut c = analytic_config();
        c.paths = [CouplingPath::Weak].into_iter().collect();
        let out = run_sweep(&c, 1);
        assert_eq!(out.failures, 0);
        let r = &out.rows[3];
        assert!(r.g_weak_mhz.is_some() && r.delta_rad.is_some());
        assert!(r.g_linear_mhz.is_none() && r.g_tot_mhz.is_none() && r.splitting_ed_mhz.is_none());
        assert!(r.eta_mhz.is_none() && r.omega_q_ghz.is_none());
    }

    #[test]
    fn worker_count_does_not_change_rows() {
        let c = analytic_config();
        assert_eq!(run_sweep(&c, 1).rows, run_sweep(&c, 3).rows);
    }

    #[test]
    fn asymmetric_circuit_records_per_point_errors() {
        let mut c = analytic_config();
        c.circuit.lj2 = 8.0e-9;
        let out = run_sweep(&c, 1);
        assert_eq!(out.failures, c.n_flux);
        let r = &out.rows[0];
        assert!(r.g_linear_mhz.is_some());
        assert!(r.g_weak_mhz.is_none());
        assert!(r.diagnostic.contains("weak"));
    }

    #[test]
    fn override_feeds_j_estimate() {
        let c = analytic_config();
        let out = run_sweep(&c, 1);
        let r = &out.rows[0];
        let g = r.g_tot_mhz.unwrap();
        assert!((r.j_approx_khz.unwrap() - 1e3 * g * g / 213.0).abs() < 1e-9);
        assert_eq!(r.eta_mhz, Some(213.0));
    }

    #[test]
    fn env_var_caps_workers() {
        assert_eq!(resolve_workers(Some(3)), 3);
        assert!(resolve_workers(None) >= 1);
    }
}
