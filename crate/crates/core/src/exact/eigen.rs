//! Lowest eigenpairs of large symmetric operators.
//!
//! Lanczos with full reorthogonalization, optionally restricted to an
//! invariant subspace by a projector applied after every product. The
//! tridiagonal problem is solved by Sturm bisection and inverse iteration so
//! that only the wanted Ritz pairs are ever formed.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{CouplerError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    /// Ritz residual bound relative to the spectral scale.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Convergence is tested every this many steps.
    pub check_interval: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 3000,
            check_interval: 20,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Eigenpairs {
    /// Ascending.
    pub values: Vec<f64>,
    /// Unit-norm eigenvectors, same order as `values`.
    pub vectors: Vec<Vec<f64>>,
}

/// Deterministic start vector with no special structure.
pub fn start_vector(dim: usize) -> Vec<f64> {
    const GOLDEN: f64 = 0.618_033_988_749_894_9;
    (0..dim)
        .map(|i| {
            let v = (i as f64 + 1.0) * GOLDEN;
            v - v.floor() - 0.5
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Number of eigenvalues of the tridiagonal (a, b) strictly below `x`.
fn sturm_count(a: &[f64], b: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..a.len() {
        let off = if i == 0 { 0.0 } else { b[i - 1] * b[i - 1] / q };
        q = a[i] - x - off;
        if q == 0.0 {
            q = -f64::EPSILON * (a[i].abs() + x.abs() + 1e-300);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..a.len() {
        let left = if i > 0 { b[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < a.len() { b[i].abs() } else { 0.0 };
        lo = lo.min(a[i] - left - right);
        hi = hi.max(a[i] + left + right);
    }
    (lo, hi)
}

/// The `k`-th smallest eigenvalue (0-based) by bisection.
fn tridiagonal_eigenvalue(a: &[f64], b: &[f64], k: usize, bounds: (f64, f64)) -> f64 {
    let (mut lo, mut hi) = bounds;
    let width = (hi - lo).max(f64::MIN_POSITIVE);
    lo -= 1e-12 * width;
    hi += 1e-12 * width;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(a, b, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solves (T − λ) x = rhs by Gaussian elimination with partial pivoting.
fn tridiagonal_solve(a: &[f64], b: &[f64], lambda: f64, rhs: &mut [f64], scale: f64) {
    let m = a.len();
    if m == 1 {
        let d = a[0] - lambda;
        let d = if d.abs() < f64::EPSILON * scale {
            f64::EPSILON * scale
        } else {
            d
        };
        rhs[0] /= d;
        return;
    }
    // rows hold (diag, super1, super2) after elimination
    let mut d: Vec<f64> = a.iter().map(|v| v - lambda).collect();
    let mut u1: Vec<f64> = (0..m).map(|i| if i + 1 < m { b[i] } else { 0.0 }).collect();
    let mut u2 = vec![0.0; m];
    let mut sub: Vec<f64> = (0..m).map(|i| if i + 1 < m { b[i] } else { 0.0 }).collect();
    let tiny = f64::EPSILON * scale;
    for i in 0..m - 1 {
        let l = sub[i];
        if l.abs() > d[i].abs() {
            // swap rows i and i+1
            let (di, u1i, u2i) = (d[i], u1[i], u2[i]);
            d[i] = l;
            u1[i] = d[i + 1];
            u2[i] = u1[i + 1];
            d[i + 1] = u1i;
            u1[i + 1] = u2i;
            rhs.swap(i, i + 1);
            let f = di / d[i];
            d[i + 1] -= f * u1[i];
            u1[i + 1] -= f * u2[i];
            rhs[i + 1] -= f * rhs[i];
        } else {
            if d[i].abs() < tiny {
                d[i] = tiny;
            }
            let f = l / d[i];
            d[i + 1] -= f * u1[i];
            u1[i + 1] -= f * u2[i];
            rhs[i + 1] -= f * rhs[i];
        }
        sub[i] = 0.0;
    }
    if d[m - 1].abs() < tiny {
        d[m - 1] = tiny;
    }
    for i in (0..m).rev() {
        let mut s = rhs[i];
        if i + 1 < m {
            s -= u1[i] * rhs[i + 1];
        }
        if i + 2 < m {
            s -= u2[i] * rhs[i + 2];
        }
        rhs[i] = s / d[i];
    }
}

/// Lowest `k` eigenpairs of a symmetric tridiagonal matrix.
pub fn tridiagonal_lowest(a: &[f64], b: &[f64], k: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let m = a.len();
    let k = k.min(m);
    let bounds = gershgorin(a, b);
    let scale = bounds.0.abs().max(bounds.1.abs()).max(f64::MIN_POSITIVE);
    let values: Vec<f64> = (0..k)
        .map(|i| tridiagonal_eigenvalue(a, b, i, bounds))
        .collect();
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(k);
    for (i, &lambda) in values.iter().enumerate() {
        let mut x: Vec<f64> = start_vector(m).iter().map(|v| v + 1.0).collect();
        for _ in 0..3 {
            tridiagonal_solve(a, b, lambda, &mut x, scale);
            // keep clustered vectors apart
            for (j, prev) in vectors.iter().enumerate() {
                if (values[j] - lambda).abs() < 1e-8 * scale {
                    let c = dot(prev, &x);
                    axpy(-c, prev, &mut x);
                }
            }
            let nx = norm(&x);
            if nx == 0.0 || !nx.is_finite() {
                x = vec![0.0; m];
                x[i.min(m - 1)] = 1.0;
            } else {
                x.iter_mut().for_each(|v| *v /= nx);
            }
        }
        vectors.push(x);
    }
    (values, vectors)
}

/// Lowest `k` eigenpairs of the operator `apply` by Lanczos.
///
/// `project`, when given, must be an orthogonal projector commuting with
/// the operator; the iteration then stays inside its range.
pub fn lanczos_lowest<A, P>(
    apply: A,
    project: P,
    dim: usize,
    k: usize,
    start: &[f64],
    options: &LanczosOptions,
) -> Result<Eigenpairs>
where
    A: Fn(&[f64], &mut [f64]),
    P: Fn(&mut [f64]),
{
    if k == 0 || dim == 0 {
        return Err(CouplerError::Eigensolver("no eigenpairs requested".into()));
    }
    let mut q = start.to_vec();
    project(&mut q);
    let nq = norm(&q);
    if nq == 0.0 || !nq.is_finite() {
        return Err(CouplerError::Eigensolver(
            "start vector has no component in the subspace".into(),
        ));
    }
    q.iter_mut().for_each(|v| *v /= nq);

    let limit = options.max_iterations.min(dim);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(limit.min(1024));
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; dim];
    let mut scale = 0.0_f64;
    let mut last_residual = f64::INFINITY;

    loop {
        apply(&q, &mut w);
        project(&mut w);
        let a = dot(&q, &w);
        basis.push(std::mem::take(&mut q));
        alpha.push(a);
        // two passes of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                axpy(-c, v, &mut w);
            }
        }
        let b = norm(&w);
        let m = alpha.len();
        let (lo, hi) = gershgorin(&alpha, &beta);
        scale = scale.max(lo.abs()).max(hi.abs());
        let exhausted = b <= 1e-14 * scale || m >= limit;

        if exhausted || (m >= k && m.is_multiple_of(options.check_interval)) {
            let (values, svecs) = tridiagonal_lowest(&alpha, &beta, k);
            let residual = svecs
                .iter()
                .map(|s| (b * s[m - 1]).abs())
                .fold(0.0_f64, f64::max);
            last_residual = residual / scale;
            let converged = values.len() == k && residual <= options.tolerance * scale;
            // an invariant subspace yields exact pairs, possibly fewer than k
            let invariant = b <= 1e-14 * scale;
            if converged || invariant {
                let vectors = svecs
                    .iter()
                    .map(|s| {
                        let mut x = vec![0.0; dim];
                        for (coef, v) in s.iter().zip(&basis) {
                            axpy(*coef, v, &mut x);
                        }
                        let nx = norm(&x);
                        x.iter_mut().for_each(|e| *e /= nx);
                        x
                    })
                    .collect();
                return Ok(Eigenpairs { values, vectors });
            }
        }
        if exhausted {
            break;
        }
        beta.push(b);
        q = w.iter().map(|v| v / b).collect();
    }
    Err(CouplerError::NonConvergence {
        what: "Lanczos eigensolver",
        iterations: alpha.len(),
        residual: last_residual,
    })
}

/// Lowest `k` eigenpairs of a dense symmetric matrix.
pub fn dense_lowest(matrix: DMatrix<f64>, k: usize) -> Eigenpairs {
    let eig = SymmetricEigen::new(matrix);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    order.truncate(k);
    Eigenpairs {
        values: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        vectors: order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
            .collect(),
    }
}
