use faer::Mat;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::operator::DenseOperator;
use super::state::{dim_of, StateVector};
use crate::error::{arg, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Product of single-site Pauli matrices on distinct sites.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliString {
    factors: Vec<(usize, Axis)>,
    flip_mask: usize,
    z_mask: usize,
    y_count: u32,
}

impl PauliString {
    pub fn new(factors: &[(usize, Axis)]) -> Result<Self> {
        let mut flip_mask = 0usize;
        let mut z_mask = 0usize;
        let mut y_count = 0u32;
        let mut seen = 0usize;
        for &(site, axis) in factors {
            if site >= usize::BITS as usize - 1 {
                return arg(format!("site index {site} is out of range"));
            }
            let bit = 1usize << site;
            if seen & bit != 0 {
                return arg(format!("site {site} appears twice in a Pauli string"));
            }
            seen |= bit;
            match axis {
                Axis::X => flip_mask |= bit,
                Axis::Z => z_mask |= bit,
                Axis::Y => {
                    flip_mask |= bit;
                    z_mask |= bit;
                    y_count += 1;
                }
            }
        }
        Ok(Self {
            factors: factors.to_vec(),
            flip_mask,
            z_mask,
            y_count,
        })
    }

    pub fn single(site: usize, axis: Axis) -> Result<Self> {
        Self::new(&[(site, axis)])
    }

    pub fn factors(&self) -> &[(usize, Axis)] {
        &self.factors
    }

    /// Highest site index touched, if any.
    pub fn max_site(&self) -> Option<usize> {
        self.factors.iter().map(|&(s, _)| s).max()
    }

    /// `P|z⟩ = phase(z) |z ⊕ flip⟩`.
    ///
    /// `σʸ|↑⟩ = i|↓⟩`, `σʸ|↓⟩ = −i|↑⟩`, so every Y contributes `i` times the
    /// sign of its input bit, and every Z the sign of its input bit.
    #[inline]
    pub(crate) fn action(&self, z: usize) -> (usize, C64) {
        let negative = (z & self.z_mask).count_ones() & 1 == 1;
        let sign = if negative { -1.0 } else { 1.0 };
        let phase = match self.y_count % 4 {
            0 => C64::new(sign, 0.0),
            1 => C64::new(0.0, sign),
            2 => C64::new(-sign, 0.0),
            _ => C64::new(0.0, -sign),
        };
        (z ^ self.flip_mask, phase)
    }

    fn check_sites(&self, n_sites: usize) -> Result<()> {
        match self.max_site() {
            Some(s) if s >= n_sites => arg(format!("site {s} out of range for {n_sites} sites")),
            _ => Ok(()),
        }
    }

    /// Dense `2^L × 2^L` matrix of the string.
    pub fn to_dense(&self, n_sites: usize) -> Result<DenseOperator> {
        self.check_sites(n_sites)?;
        let dim = dim_of(n_sites)?;
        let mut m = Mat::<C64>::zeros(dim, dim);
        for z in 0..dim {
            let (row, phase) = self.action(z);
            m[(row, z)] = phase;
        }
        DenseOperator::hermitian(m)
    }

    /// Accumulates `coeff · P` into a dense matrix.
    pub(crate) fn add_to(&self, coeff: f64, m: &mut Mat<C64>) {
        for z in 0..m.ncols() {
            let (row, phase) = self.action(z);
            m[(row, z)] += phase * coeff;
        }
    }
}

/// Applies a Pauli string to a state with bit operations only.
pub fn apply_pauli_string(sites: &[(usize, Axis)], state: &StateVector) -> Result<StateVector> {
    let p = PauliString::new(sites)?;
    p.check_sites(state.n_sites())?;
    let src = state.amplitudes();
    let mut out = vec![C64::new(0.0, 0.0); src.len()];
    for (z, &a) in src.iter().enumerate() {
        let (target, phase) = p.action(z);
        out[target] = phase * a;
    }
    Ok(StateVector::from_raw(state.n_sites(), out))
}

/// Builds `Σ_k c_k P_k` as a dense Hermitian operator.
pub fn pauli_sum(n_sites: usize, terms: &[(f64, PauliString)]) -> Result<DenseOperator> {
    let dim = dim_of(n_sites)?;
    let mut m = Mat::<C64>::zeros(dim, dim);
    for (c, p) in terms {
        p.check_sites(n_sites)?;
        p.add_to(*c, &mut m);
    }
    DenseOperator::hermitian(m)
}
