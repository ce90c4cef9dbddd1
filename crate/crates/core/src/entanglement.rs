//! Reduced density matrices and von Neumann entropies of site subsets.

use faer::Mat;
use num_complex::Complex64 as C64;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::ops::{eigvals_hermitian, DenseOperator, StateVector};
use crate::stats::{mean, std_dev};

/// Allowed deviation of `Tr ρ` from one.
pub const TRACE_TOL: f64 = 1e-8;

/// Sorted, distinct sites of a subsystem; the bath is the complement.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubsystemChoice {
    sites: Vec<usize>,
    n_sites: usize,
}

impl SubsystemChoice {
    pub fn new(sites: &[usize], n_sites: usize) -> Result<Self> {
        let mut sorted = sites.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != sites.len() {
            return arg("subsystem sites must be distinct");
        }
        if sorted.is_empty() || sorted.len() >= n_sites {
            return arg(format!(
                "subsystem must hold between 1 and {} sites, got {}",
                n_sites.saturating_sub(1),
                sorted.len()
            ));
        }
        if let Some(&s) = sorted.iter().find(|&&s| s >= n_sites) {
            return arg(format!("site {s} out of range for {n_sites} sites"));
        }
        Ok(Self { sites: sorted, n_sites })
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Complementary subsystem.
    pub fn complement(&self) -> SubsystemChoice {
        let sites = (0..self.n_sites).filter(|s| !self.sites.contains(s)).collect();
        SubsystemChoice {
            sites,
            n_sites: self.n_sites,
        }
    }

    fn mask(&self) -> usize {
        self.sites.iter().fold(0, |m, &s| m | (1 << s))
    }
}

/// Packs the bits of `z` selected by `mask` into the low bits, in order.
fn gather_bits(z: usize, mask: usize) -> usize {
    let mut out = 0;
    let mut k = 0;
    let mut m = mask;
    while m != 0 {
        let bit = m.trailing_zeros();
        out |= ((z >> bit) & 1) << k;
        k += 1;
        m &= m - 1;
    }
    out
}

/// `ρ_S = Tr_B |ψ⟩⟨ψ|` by reshaping the amplitudes into `c[i_S, i_B]`.
pub fn reduced_density_matrix(state: &StateVector, sub: &SubsystemChoice) -> Result<DenseOperator> {
    if sub.n_sites() != state.n_sites() {
        return arg(format!(
            "subsystem is defined on {} sites but the state has {}",
            sub.n_sites(),
            state.n_sites()
        ));
    }
    let s_mask = sub.mask();
    let b_mask = (state.dim() - 1) & !s_mask;
    let n_s = 1usize << sub.sites().len();
    let n_b = state.dim() / n_s;
    let mut c = Mat::<C64>::zeros(n_s, n_b);
    for (z, &a) in state.amplitudes().iter().enumerate() {
        c[(gather_bits(z, s_mask), gather_bits(z, b_mask))] = a;
    }
    DenseOperator::hermitian_part(&c * c.adjoint())
}

/// `−Tr ρ log₂ ρ` in bits, with negative rounding eigenvalues clamped to 0.
pub fn von_neumann_entropy(rho: &DenseOperator) -> Result<f64> {
    let trace = rho.trace();
    let defect = (trace - C64::new(1.0, 0.0)).norm();
    if defect > TRACE_TOL {
        return Err(Error::Validation { what: "trace", defect });
    }
    let values = eigvals_hermitian(rho)?;
    Ok(values
        .into_iter()
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.log2())
        .sum::<f64>()
        .max(0.0))
}

/// `count` distinct subsystems of `size` sites drawn from a seeded stream.
/// Contiguous blocks are drawn by their first site.
pub fn random_subsystems(
    n_sites: usize,
    count: usize,
    size: usize,
    seed: u64,
    contiguous: bool,
) -> Result<Vec<SubsystemChoice>> {
    if size == 0 || size >= n_sites {
        return arg(format!("subsystem size {size} needs 0 < size < L = {n_sites}"));
    }
    let available = if contiguous {
        (n_sites - size + 1) as u128
    } else {
        binomial(n_sites, size)
    };
    if count as u128 > available {
        return arg(format!(
            "only {available} distinct subsystems of {size} sites exist for L = {n_sites}, asked for {count}"
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<SubsystemChoice> = Vec::with_capacity(count);
    while out.len() < count {
        let sites: Vec<usize> = if contiguous {
            let start = sample(&mut rng, n_sites - size + 1, 1).index(0);
            (start..start + size).collect()
        } else {
            sample(&mut rng, n_sites, size).into_vec()
        };
        let choice = SubsystemChoice::new(&sites, n_sites)?;
        if !out.contains(&choice) {
            out.push(choice);
        }
    }
    Ok(out)
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

/// Entropies of one state over several subsystems.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyPanel {
    pub entropies: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation over subsystems.
    pub std: f64,
}

pub fn entropy_over(state: &StateVector, subsystems: &[SubsystemChoice]) -> Result<EntropyPanel> {
    if subsystems.is_empty() {
        return arg("no subsystems given");
    }
    let entropies = subsystems
        .iter()
        .map(|s| von_neumann_entropy(&reduced_density_matrix(state, s)?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(EntropyPanel {
        mean: mean(&entropies),
        std: std_dev(&entropies),
        entropies,
    })
}

/// Mean and spread of the entropy over `n_subsystems` random site subsets.
pub fn entropy_panel(state: &StateVector, n_subsystems: usize, subsystem_size: usize, seed: u64) -> Result<EntropyPanel> {
    let subs = random_subsystems(state.n_sites(), n_subsystems, subsystem_size, seed, false)?;
    entropy_over(state, &subs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gather_packs_selected_bits() {
        assert_eq!(gather_bits(0b1011, 0b1010), 0b11);
        assert_eq!(gather_bits(0b0100, 0b0101), 0b10);
    }

    #[test]
    fn product_state_is_pure() {
        let psi = StateVector::basis(4, 0b0110).unwrap();
        let sub = SubsystemChoice::new(&[1, 3], 4).unwrap();
        let rho = reduced_density_matrix(&psi, &sub).unwrap();
        assert!(von_neumann_entropy(&rho).unwrap().abs() < 1e-12);
    }

    #[test]
    fn bell_pair_is_maximally_mixed() {
        let s = 0.5f64.sqrt();
        let psi = StateVector::from_amplitudes(
            2,
            vec![C64::new(s, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0)],
        )
        .unwrap();
        let rho = reduced_density_matrix(&psi, &SubsystemChoice::new(&[0], 2).unwrap()).unwrap();
        assert!((rho.get(0, 0).re - 0.5).abs() < 1e-15 && rho.get(0, 1).norm() < 1e-15);
        assert!((von_neumann_entropy(&rho).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_level_mixture() {
        let mut m = Mat::<C64>::zeros(2, 2);
        m[(0, 0)] = C64::new(0.75, 0.0);
        m[(1, 1)] = C64::new(0.25, 0.0);
        let s = von_neumann_entropy(&DenseOperator::hermitian(m).unwrap()).unwrap();
        assert!((s - (2.0 - 0.75 * 3f64.log2())).abs() < 1e-12);
    }

    #[test]
    fn bad_trace_is_rejected() {
        let m = Mat::<C64>::identity(2, 2);
        assert!(matches!(
            von_neumann_entropy(&DenseOperator::hermitian(m).unwrap()),
            Err(Error::Validation { what: "trace", .. })
        ));
    }

    #[test]
    fn invalid_subsystems() {
        assert!(SubsystemChoice::new(&[0, 0], 3).is_err());
        assert!(SubsystemChoice::new(&[3], 3).is_err());
        assert!(SubsystemChoice::new(&[0, 1, 2], 3).is_err());
        assert!(SubsystemChoice::new(&[], 3).is_err());
    }

    #[test]
    fn random_subsystems_are_distinct() {
        let subs = random_subsystems(9, 6, 3, 42, false).unwrap();
        for (i, a) in subs.iter().enumerate() {
            assert!(subs[i + 1..].iter().all(|b| b != a));
        }
        assert_eq!(subs, random_subsystems(9, 6, 3, 42, false).unwrap());
        let blocks = random_subsystems(9, 7, 3, 1, true).unwrap();
        assert!(blocks.iter().all(|b| b.sites()[2] - b.sites()[0] == 2));
        assert!(random_subsystems(9, 8, 3, 1, true).is_err());
        assert!(random_subsystems(3, 1, 3, 1, false).is_err());
    }

    #[test]
    fn product_state_panel() {
        let panel = entropy_panel(&StateVector::basis(5, 3).unwrap(), 6, 3, 9).unwrap();
        assert!(panel.mean.abs() < 1e-12 && panel.std.abs() < 1e-12);
    }
}
