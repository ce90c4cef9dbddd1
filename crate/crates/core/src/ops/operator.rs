use faer::Mat;
use num_complex::Complex64 as C64;

use super::state::StateVector;
use crate::error::{arg, Error, Result};

/// Hermiticity tolerance, `max|A − A†|`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Unitarity tolerance, `max|U†U − I|`.
pub const UNITARY_TOL: f64 = 1e-9;

/// Dense complex square matrix with an optional, verified Hermitian claim.
#[derive(Clone, Debug)]
pub struct DenseOperator {
    entries: Mat<C64>,
    hermitian: bool,
}

impl DenseOperator {
    /// Wraps a general (not necessarily Hermitian) square matrix.
    pub fn general(entries: Mat<C64>) -> Result<Self> {
        check_square(&entries)?;
        Ok(Self {
            entries,
            hermitian: false,
        })
    }

    /// Wraps a matrix that must be Hermitian to within [`HERMITIAN_TOL`].
    pub fn hermitian(entries: Mat<C64>) -> Result<Self> {
        check_square(&entries)?;
        let defect = hermiticity_defect(&entries);
        if defect >= HERMITIAN_TOL {
            return Err(Error::Validation {
                what: "hermiticity",
                defect,
            });
        }
        Ok(Self {
            entries,
            hermitian: true,
        })
    }

    /// Like [`DenseOperator::hermitian`] but replaces the matrix with its
    /// Hermitian part first; for results of contractions that are Hermitian
    /// only up to rounding.
    pub fn hermitian_part(entries: Mat<C64>) -> Result<Self> {
        check_square(&entries)?;
        let n = entries.nrows();
        let sym = Mat::from_fn(n, n, |i, j| 0.5 * (entries[(i, j)] + entries[(j, i)].conj()));
        Ok(Self {
            entries: sym,
            hermitian: true,
        })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: Mat::zeros(dim, dim),
            hermitian: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn matrix(&self) -> &Mat<C64> {
        &self.entries
    }

    pub fn into_matrix(self) -> Mat<C64> {
        self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[(row, col)]
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.entries)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.entries[(i, i)]).sum()
    }

    /// `max|self − other|` over entries.
    pub fn max_abs_diff(&self, other: &DenseOperator) -> Result<f64> {
        if self.dim() != other.dim() {
            return arg("operators have different dimensions");
        }
        Ok(max_abs_diff(&self.entries, &other.entries))
    }

    /// `self + factor · other`, Hermitian if both are and `factor` is real.
    pub fn add_scaled(&self, factor: f64, other: &DenseOperator) -> Result<DenseOperator> {
        if self.dim() != other.dim() {
            return arg("operators have different dimensions");
        }
        let n = self.dim();
        let entries = Mat::from_fn(n, n, |i, j| self.entries[(i, j)] + factor * other.entries[(i, j)]);
        Ok(Self {
            entries,
            hermitian: self.hermitian && other.hermitian,
        })
    }

    /// Commutator `[self, other]` (never Hermitian-flagged).
    pub fn commutator(&self, other: &DenseOperator) -> Result<DenseOperator> {
        if self.dim() != other.dim() {
            return arg("operators have different dimensions");
        }
        let ab = &self.entries * &other.entries;
        let ba = &other.entries * &self.entries;
        DenseOperator::general(ab - ba)
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.dim() != self.dim() {
            return arg("state and operator dimensions differ");
        }
        Ok(StateVector::from_raw(
            state.n_sites(),
            matvec(&self.entries, state.amplitudes()),
        ))
    }
}

/// Dense matrix known to be unitary to within [`UNITARY_TOL`].
#[derive(Clone, Debug)]
pub struct DenseUnitary {
    entries: Mat<C64>,
    defect: f64,
}

impl DenseUnitary {
    /// Validates `max|U†U − I| <` [`UNITARY_TOL`].
    pub fn new(entries: Mat<C64>) -> Result<Self> {
        check_square(&entries)?;
        let defect = unitarity_defect(&entries);
        if !(defect < UNITARY_TOL) {
            return Err(Error::Validation {
                what: "unitarity",
                defect,
            });
        }
        Ok(Self { entries, defect })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: Mat::identity(dim, dim),
            defect: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &Mat<C64> {
        &self.entries
    }

    pub fn into_matrix(self) -> Mat<C64> {
        self.entries
    }

    /// The measured `max|U†U − I|` recorded at construction.
    pub fn unitarity_defect(&self) -> f64 {
        self.defect
    }

    pub fn max_abs_diff(&self, other: &DenseUnitary) -> Result<f64> {
        if self.dim() != other.dim() {
            return arg("unitaries have different dimensions");
        }
        Ok(max_abs_diff(&self.entries, &other.entries))
    }

    /// `self · other`.
    pub fn compose(&self, other: &DenseUnitary) -> Result<DenseUnitary> {
        if self.dim() != other.dim() {
            return arg("unitaries have different dimensions");
        }
        DenseUnitary::new(&self.entries * &other.entries)
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.dim() != self.dim() {
            return arg("state and unitary dimensions differ");
        }
        Ok(StateVector::from_raw(
            state.n_sites(),
            matvec(&self.entries, state.amplitudes()),
        ))
    }
}

fn check_square(m: &Mat<C64>) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return arg(format!("expected a non-empty square matrix, got {}x{}", m.nrows(), m.ncols()));
    }
    Ok(())
}

pub(crate) fn matvec(m: &Mat<C64>, v: &[C64]) -> Vec<C64> {
    let n = m.nrows();
    let mut out = vec![C64::new(0.0, 0.0); n];
    // column-major storage: accumulate column by column
    for (j, &vj) in v.iter().enumerate() {
        if vj == C64::new(0.0, 0.0) {
            continue;
        }
        let col = m.col(j);
        for (o, &a) in out.iter_mut().zip(col.iter()) {
            *o += a * vj;
        }
    }
    out
}

pub(crate) fn max_abs(m: &Mat<C64>) -> f64 {
    let mut best = 0.0f64;
    for j in 0..m.ncols() {
        for &x in m.col(j).iter() {
            best = best.max(x.norm());
        }
    }
    best
}

pub(crate) fn max_abs_diff(a: &Mat<C64>, b: &Mat<C64>) -> f64 {
    let mut best = 0.0f64;
    for j in 0..a.ncols() {
        for (&x, &y) in a.col(j).iter().zip(b.col(j).iter()) {
            best = best.max((x - y).norm());
        }
    }
    best
}

pub(crate) fn hermiticity_defect(m: &Mat<C64>) -> f64 {
    let n = m.nrows();
    let mut best = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            best = best.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    best
}

pub(crate) fn unitarity_defect(m: &Mat<C64>) -> f64 {
    let prod = m.adjoint() * m;
    let n = m.nrows();
    let mut best = 0.0f64;
    for j in 0..n {
        for (i, &x) in prod.col(j).iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            best = best.max((x - C64::new(target, 0.0)).norm());
        }
    }
    best
}
