use serde::{Deserialize, Serialize};

use crate::error::{CouplerError, Result};
use crate::exact::eigen::{dense_lowest, lanczos_lowest, start_vector, Eigenpairs, LanczosOptions};
use crate::exact::hamiltonian::GridHamiltonian;

/// Minimum weight in one excitation manifold for a state to be classified.
pub const LABEL_WEIGHT_THRESHOLD: f64 = 0.5;

/// Per-state classification of the two-qubit spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateLabel {
    Ground,
    #[serde(rename = "sym-1exc")]
    SymOneExcitation,
    #[serde(rename = "antisym-1exc")]
    AntisymOneExcitation,
    #[serde(rename = "11")]
    BothExcited,
    #[serde(rename = "02/20-sym")]
    DoubleSym,
    #[serde(rename = "02/20-antisym")]
    DoubleAntisym,
    Unassigned,
}

impl StateLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            StateLabel::Ground => "ground",
            StateLabel::SymOneExcitation => "sym-1exc",
            StateLabel::AntisymOneExcitation => "antisym-1exc",
            StateLabel::BothExcited => "11",
            StateLabel::DoubleSym => "02/20-sym",
            StateLabel::DoubleAntisym => "02/20-antisym",
            StateLabel::Unassigned => "unassigned",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateInfo {
    /// Joules.
    pub energy: f64,
    pub label: StateLabel,
    /// ⟨ψ| swap |ψ⟩ with swap the plain exchange of the two qubit labels;
    /// present only for exchange-symmetric operators.
    pub swap_parity: Option<f64>,
    /// Excitation number with the largest harmonic-basis weight.
    pub excitation: usize,
    /// Weight in that manifold.
    pub manifold_weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    /// Lowest eigenvalues in joules, ascending.
    pub energies: Vec<f64>,
    pub labels: Vec<StateLabel>,
    pub states: Vec<StateInfo>,
    /// |E(antisym) − E(sym)| / ħ.
    pub splitting: f64,
    /// (E(sym) − E(antisym)) / 2ħ, the coupling with the sign convention of
    /// the analytic formulas.
    pub g_signed: f64,
    pub g_magnitude: f64,
    /// (E11 − E+ − E− + E00) / 4ħ.
    pub j: Option<f64>,
    /// Two-qubit estimate 2 E1 − E2 from the manifold centroids.
    pub eta: Option<f64>,
}

impl SpectrumResult {
    pub fn energy_of(&self, label: StateLabel) -> Option<f64> {
        self.states
            .iter()
            .find(|s| s.label == label)
            .map(|s| s.energy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum EigenMethod {
    /// Dense for grids up to 41 points per axis, Lanczos otherwise.
    #[default]
    Auto,
    Lanczos,
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumOptions {
    pub method: EigenMethod,
    pub lanczos: LanczosOptions,
    /// Use the exchange symmetry to split the problem when it is exact.
    pub use_symmetry: bool,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            method: EigenMethod::Lanczos,
            lanczos: LanczosOptions::default(),
            use_symmetry: true,
        }
    }
}

const DENSE_MAX_POINTS: usize = 41;

pub fn lowest_spectrum(h: &GridHamiltonian, k: usize) -> Result<SpectrumResult> {
    lowest_spectrum_with(h, k, &SpectrumOptions::default())
}

pub fn lowest_spectrum_with(
    h: &GridHamiltonian,
    k: usize,
    options: &SpectrumOptions,
) -> Result<SpectrumResult> {
    if k < 6 {
        return Err(CouplerError::InvalidGrid(format!(
            "at least 6 eigenpairs are needed for labelling, requested {k}"
        )));
    }
    let pairs = eigenpairs(h, k, options)?;
    classify(h, pairs)
}

fn eigenpairs(h: &GridHamiltonian, k: usize, options: &SpectrumOptions) -> Result<Eigenpairs> {
    let dense = match options.method {
        EigenMethod::Dense => true,
        EigenMethod::Lanczos => false,
        EigenMethod::Auto => h.grid().n_points <= DENSE_MAX_POINTS,
    };
    if dense {
        return Ok(dense_lowest(h.to_dense(), k));
    }
    let dim = h.dim();
    let start = start_vector(dim);
    let apply = |x: &[f64], y: &mut [f64]| h.apply(x, y);
    if !(options.use_symmetry && h.is_exchange_symmetric()) {
        return lanczos_lowest(apply, |_: &mut [f64]| {}, dim, k, &start, &options.lanczos);
    }
    let image: Vec<usize> = (0..dim).map(|i| h.exchange_index(i)).collect();
    let sector = |sign: f64| {
        let image = &image;
        move |x: &mut [f64]| {
            for i in 0..x.len() {
                let m = image[i];
                if m > i {
                    let v = 0.5 * (x[i] + sign * x[m]);
                    x[i] = v;
                    x[m] = sign * v;
                } else if m == i {
                    x[i] = if sign > 0.0 { x[i] } else { 0.0 };
                }
            }
        }
    };
    let even = lanczos_lowest(apply, sector(1.0), dim, k, &start, &options.lanczos)?;
    let odd = lanczos_lowest(apply, sector(-1.0), dim, k, &start, &options.lanczos)?;
    let mut merged: Vec<(f64, Vec<f64>)> = even
        .values
        .into_iter()
        .zip(even.vectors)
        .chain(odd.values.into_iter().zip(odd.vectors))
        .collect();
    merged.sort_by(|a, b| a.0.total_cmp(&b.0));
    merged.truncate(k);
    let (values, vectors) = merged.into_iter().unzip();
    Ok(Eigenpairs { values, vectors })
}

/// Normalized 1D harmonic functions n = 0, 1, 2 of phase spread `width`.
fn harmonic_basis(points: &[f64], width: f64) -> [Vec<f64>; 3] {
    let mut basis = [Vec::new(), Vec::new(), Vec::new()];
    for (n, f) in basis.iter_mut().enumerate() {
        *f = points
            .iter()
            .map(|&p| {
                let x = p / width;
                let g = (-0.25 * x * x).exp();
                match n {
                    0 => g,
                    1 => x * g,
                    _ => (x * x - 1.0) * g,
                }
            })
            .collect();
        let norm = f.iter().map(|v| v * v).sum::<f64>().sqrt();
        f.iter_mut().for_each(|v| *v /= norm);
    }
    basis
}

/// c[a][b] = ⟨χ_a ⊗ χ_b | ψ⟩.
fn overlaps(psi: &[f64], n: usize, b1: &[Vec<f64>; 3], b2: &[Vec<f64>; 3]) -> [[f64; 3]; 3] {
    let mut c = [[0.0; 3]; 3];
    for (a, fa) in b1.iter().enumerate() {
        let mut row = vec![0.0; n];
        for i in 0..n {
            let w = fa[i];
            for j in 0..n {
                row[j] += w * psi[i * n + j];
            }
        }
        for (b, fb) in b2.iter().enumerate() {
            c[a][b] = row.iter().zip(fb).map(|(x, y)| x * y).sum();
        }
    }
    c
}

fn classify(h: &GridHamiltonian, pairs: Eigenpairs) -> Result<SpectrumResult> {
    let n = h.grid().n_points;
    let pts = h.grid().points();
    let widths = h.reference_widths();
    let b1 = harmonic_basis(&pts, widths[0]);
    let b2 = harmonic_basis(&pts, widths[1]);
    let symmetric = h.is_exchange_symmetric();

    let mut states = Vec::with_capacity(pairs.values.len());
    let mut taken: Vec<StateLabel> = Vec::new();
    for (energy, psi) in pairs.values.iter().zip(&pairs.vectors) {
        let c = overlaps(psi, n, &b1, &b2);
        let weights = [
            c[0][0] * c[0][0],
            c[1][0] * c[1][0] + c[0][1] * c[0][1],
            c[1][1] * c[1][1] + c[2][0] * c[2][0] + c[0][2] * c[0][2],
        ];
        let (excitation, &manifold_weight) = weights
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("three manifolds");
        // the grid exchange maps φ → −φ as well; each quantum of excitation
        // flips the sign of the harmonic functions, so the plain swap parity
        // carries an extra (−1)^N
        let swap_parity = if symmetric {
            let p: f64 = (0..psi.len())
                .map(|i| psi[i] * psi[h.exchange_index(i)])
                .sum();
            Some(if excitation % 2 == 1 { -p } else { p })
        } else {
            None
        };

        let mut label = StateLabel::Unassigned;
        if manifold_weight > LABEL_WEIGHT_THRESHOLD {
            let sign = swap_parity.unwrap_or_else(|| match excitation {
                1 => (c[1][0] * c[0][1]).signum(),
                2 => (c[2][0] * c[0][2]).signum(),
                _ => 1.0,
            });
            label = match excitation {
                0 => StateLabel::Ground,
                1 if sign > 0.0 => StateLabel::SymOneExcitation,
                1 => StateLabel::AntisymOneExcitation,
                _ if sign < 0.0 && swap_parity.is_some() => StateLabel::DoubleAntisym,
                _ => {
                    let both = c[1][1] * c[1][1];
                    let plus = 0.5 * (c[2][0] + c[0][2]).powi(2);
                    let minus = 0.5 * (c[2][0] - c[0][2]).powi(2);
                    if both >= plus && both >= minus {
                        StateLabel::BothExcited
                    } else if plus >= minus {
                        StateLabel::DoubleSym
                    } else {
                        StateLabel::DoubleAntisym
                    }
                }
            };
            if taken.contains(&label) {
                label = StateLabel::Unassigned;
            } else {
                taken.push(label);
            }
        }
        states.push(StateInfo {
            energy: *energy,
            label,
            swap_parity,
            excitation,
            manifold_weight,
        });
    }

    let find = |label: StateLabel| states.iter().find(|s| s.label == label).map(|s| s.energy);
    let hbar = h.hbar();
    let required = [
        StateLabel::Ground,
        StateLabel::SymOneExcitation,
        StateLabel::AntisymOneExcitation,
        StateLabel::BothExcited,
    ];
    for label in required {
        if find(label).is_none() {
            let summary: Vec<String> = states
                .iter()
                .map(|s| {
                    format!(
                        "{}(N={}, w={:.3})",
                        s.label.as_str(),
                        s.excitation,
                        s.manifold_weight
                    )
                })
                .collect();
            return Err(CouplerError::LabelAmbiguity(format!(
                "no state classified as {}; states: {}",
                label.as_str(),
                summary.join(", ")
            )));
        }
    }
    let e00 = find(StateLabel::Ground).unwrap();
    let e_sym = find(StateLabel::SymOneExcitation).unwrap();
    let e_anti = find(StateLabel::AntisymOneExcitation).unwrap();
    let e11 = find(StateLabel::BothExcited).unwrap();
    let splitting = (e_anti - e_sym).abs() / hbar;
    let g_signed = (e_sym - e_anti) / (2.0 * hbar);
    let j = (e11 - e_sym - e_anti + e00) / (4.0 * hbar);
    let eta = match (find(StateLabel::DoubleSym), find(StateLabel::DoubleAntisym)) {
        (Some(a), Some(b)) => {
            let e1 = 0.5 * (e_sym + e_anti) - e00;
            let e2 = 0.5 * (a + b) - e00;
            Some((2.0 * e1 - e2) / hbar)
        }
        _ => None,
    };

    Ok(SpectrumResult {
        energies: pairs.values,
        labels: states.iter().map(|s| s.label).collect(),
        states,
        splitting,
        g_signed,
        g_magnitude: 0.5 * splitting,
        j: Some(j),
        eta,
    })
}
