//! Dense eigendecompositions of Hermitian and unitary matrices.
//!
//! Hermitian problems go straight to faer's self-adjoint solver. Unitary
//! matrices are mapped to a Hermitian one by a Cayley transform
//! `C = i(I − W)(I + W)⁻¹`, `W = e^{iα}U`, which shares eigenvectors with
//! `U` and maps phase `θ` to `tan((θ + α)/2)`. The rotation `α` keeps the
//! spectrum of `W` away from `−1` so that `I + W` is well conditioned.

use std::f64::consts::{PI, TAU};

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use num_complex::Complex64 as C64;

use super::operator::{max_abs_diff, DenseOperator, DenseUnitary};
use crate::error::{Error, Result};

/// Reconstruction tolerance for [`eig_unitary`].
pub const RECONSTRUCTION_TOL: f64 = 1e-8;

/// Largest `|tan((θ+α)/2)|` accepted before re-centering the rotation.
const CAYLEY_NORM_LIMIT: f64 = 1e8;
/// Reconstruction error that triggers a second, re-centered attempt.
const RETRY_TOL: f64 = 1e-11;

#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `values`.
    pub vectors: Mat<C64>,
}

#[derive(Clone, Debug)]
pub struct UnitaryEigen {
    /// Eigenphases in `[0, 2π)`, ascending.
    pub phases: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `phases`.
    pub vectors: Mat<C64>,
    /// `max|U − V e^{iθ} V†|`.
    pub reconstruction_error: f64,
}

pub fn eig_hermitian(a: &DenseOperator) -> Result<HermitianEigen> {
    if !a.is_hermitian() {
        return Err(Error::Validation {
            what: "hermiticity",
            defect: super::operator::hermiticity_defect(a.matrix()),
        });
    }
    hermitian_eigen(a.matrix())
}

/// Eigenvalues only; cheaper than [`eig_hermitian`].
pub fn eigvals_hermitian(a: &DenseOperator) -> Result<Vec<f64>> {
    if !a.is_hermitian() {
        return Err(Error::Validation {
            what: "hermiticity",
            defect: super::operator::hermiticity_defect(a.matrix()),
        });
    }
    let mut values = a
        .matrix()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numerical(format!("self-adjoint eigenvalues: {e:?}")))?;
    values.sort_by(f64::total_cmp);
    Ok(values)
}

pub(crate) fn hermitian_eigen(m: &Mat<C64>) -> Result<HermitianEigen> {
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numerical(format!("self-adjoint eigendecomposition: {e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[i].re.total_cmp(&s[j].re));
    let values = order.iter().map(|&i| s[i].re).collect();
    let vectors = Mat::from_fn(n, n, |r, c| u[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

pub fn eig_unitary(u: &DenseUnitary) -> Result<UnitaryEigen> {
    // `DenseUnitary` can only be built from a validated matrix, so the
    // precondition holds; the defect is re-checked to guard `from_raw` paths.
    let defect = u.unitarity_defect();
    if !(defect < super::operator::UNITARY_TOL) {
        return Err(Error::Validation {
            what: "unitarity",
            defect,
        });
    }
    let m = u.matrix();
    let first = cayley_attempt(m, 0.0)?;
    let attempt = if first.cayley_norm <= CAYLEY_NORM_LIMIT && first.eig.reconstruction_error < RETRY_TOL {
        first
    } else {
        // place the widest gap of the rough spectrum at −1
        let alpha = recentering_rotation(&first.eig.phases);
        let second = cayley_attempt(m, alpha)?;
        if second.eig.reconstruction_error <= first.eig.reconstruction_error {
            second
        } else {
            first
        }
    };
    if !(attempt.eig.reconstruction_error < RECONSTRUCTION_TOL) {
        return Err(Error::Numerical(format!(
            "unitary eigendecomposition reconstructs to {:.3e}",
            attempt.eig.reconstruction_error
        )));
    }
    Ok(attempt.eig)
}

struct CayleyAttempt {
    eig: UnitaryEigen,
    cayley_norm: f64,
}

fn cayley_attempt(u: &Mat<C64>, alpha: f64) -> Result<CayleyAttempt> {
    let n = u.nrows();
    let rot = C64::from_polar(1.0, alpha);
    let w = Mat::from_fn(n, n, |i, j| rot * u[(i, j)]);
    let one = C64::new(1.0, 0.0);
    let plus = Mat::from_fn(n, n, |i, j| if i == j { one + w[(i, j)] } else { w[(i, j)] });
    let minus = Mat::from_fn(n, n, |i, j| if i == j { one - w[(i, j)] } else { -w[(i, j)] });
    // (I + W) and (I − W) commute, so C = i (I + W)⁻¹ (I − W)
    let x = plus.partial_piv_lu().solve(&minus);
    let i_unit = C64::new(0.0, 1.0);
    let c = Mat::from_fn(n, n, |r, s| 0.5 * i_unit * (x[(r, s)] - x[(s, r)].conj()));
    if c.col_iter().any(|col| col.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())) {
        return Err(Error::Numerical("Cayley transform produced non-finite entries".into()));
    }
    let he = hermitian_eigen(&c)?;
    let cayley_norm = he.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let v = he.vectors;

    // phases from Rayleigh quotients v† U v, which do not depend on α
    let uv = u * &v;
    let mut pairs: Vec<(f64, usize)> = (0..n)
        .map(|k| {
            let q: C64 = v.col(k).iter().zip(uv.col(k).iter()).map(|(a, b)| a.conj() * b).sum();
            (wrap_phase(q.arg()), k)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let phases: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let vectors = Mat::from_fn(n, n, |r, c| v[(r, pairs[c].1)]);

    let scaled = Mat::from_fn(n, n, |r, c| vectors[(r, c)] * C64::from_polar(1.0, phases[c]));
    let recon = &scaled * vectors.adjoint();
    let reconstruction_error = max_abs_diff(&recon, u);
    Ok(CayleyAttempt {
        eig: UnitaryEigen {
            phases,
            vectors,
            reconstruction_error,
        },
        cayley_norm,
    })
}

/// Rotation that moves the midpoint of the widest circular gap to `π`.
fn recentering_rotation(sorted_phases: &[f64]) -> f64 {
    let n = sorted_phases.len();
    if n == 0 {
        return 0.0;
    }
    let mut best_gap = sorted_phases[0] + TAU - sorted_phases[n - 1];
    let mut best_mid = sorted_phases[n - 1] + 0.5 * best_gap;
    for w in sorted_phases.windows(2) {
        let gap = w[1] - w[0];
        if gap > best_gap {
            best_gap = gap;
            best_mid = w[0] + 0.5 * gap;
        }
    }
    PI - best_mid
}

/// Maps any angle into `[0, 2π)`.
pub fn wrap_phase(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}
