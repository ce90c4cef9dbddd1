//! Random-circuit baseline: a Hadamard layer followed by layers of random
//! single-qubit gates from `{√X, √Y, T}` and nearest-neighbour CZ gates.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{arg, Result};
use crate::ops::kernels::{apply_cz, apply_single_site};
use crate::ops::StateVector;

/// Single-qubit gates; matrices in the `(↑, ↓)` basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    /// `exp(−iπσˣ/4)`.
    SqrtX,
    /// `exp(−iπσʸ/4)`.
    SqrtY,
    /// `diag(1, e^{iπ/4})`.
    T,
    Hadamard,
}

impl Gate {
    /// Gates drawn in random layers, indexed by the random draw.
    pub const RANDOM_SET: [Gate; 3] = [Gate::SqrtX, Gate::SqrtY, Gate::T];

    pub fn matrix(self) -> [[C64; 2]; 2] {
        let r = C64::new(FRAC_1_SQRT_2, 0.0);
        let zero = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        match self {
            Gate::SqrtX => {
                let m = C64::new(0.0, -FRAC_1_SQRT_2);
                [[r, m], [m, r]]
            }
            Gate::SqrtY => [[r, -r], [r, r]],
            Gate::T => [[one, zero], [zero, C64::from_polar(1.0, std::f64::consts::FRAC_PI_4)]],
            Gate::Hadamard => [[r, r], [r, -r]],
        }
    }
}

/// Which bonds receive a CZ in each layer.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CzSchedule {
    /// Bonds `(2k, 2k+1)` on even layers and `(2k+1, 2k+2)` on odd layers.
    #[default]
    Brickwork,
    /// Every bond in every layer.
    Fixed,
}

impl CzSchedule {
    /// Left sites `i` of the bonds `(i, i+1)` acted on in `layer`.
    pub fn bonds(self, n_sites: usize, layer: usize) -> Vec<usize> {
        let all = 0..n_sites.saturating_sub(1);
        match self {
            CzSchedule::Fixed => all.collect(),
            CzSchedule::Brickwork => all.filter(|i| i % 2 == layer % 2).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub n_sites: usize,
    pub layers: usize,
    pub seed: u64,
    pub cz_schedule: CzSchedule,
}

impl CircuitSpec {
    pub fn new(n_sites: usize, layers: usize, seed: u64) -> Result<Self> {
        let spec = Self {
            n_sites,
            layers,
            seed,
            cz_schedule: CzSchedule::Brickwork,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=crate::model::MAX_SITES).contains(&self.n_sites) {
            return arg(format!("circuits need 2..={} qubits, got {}", crate::model::MAX_SITES, self.n_sites));
        }
        Ok(())
    }
}

/// Gates of `layer`: qubit `q` takes the `q`-th draw of the layer's stream.
pub fn draw_layer(seed: u64, layer: usize, n_sites: usize) -> Vec<Gate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(layer as u64);
    (0..n_sites)
        .map(|_| Gate::RANDOM_SET[rng.random_range(0..3)])
        .collect()
}

pub fn apply_gate(state: &mut StateVector, site: usize, gate: Gate) -> Result<()> {
    if site >= state.n_sites() {
        return arg(format!("site {site} out of range for {} qubits", state.n_sites()));
    }
    apply_single_site(state.amplitudes_mut(), site, &gate.matrix());
    Ok(())
}

pub fn apply_cz_gate(state: &mut StateVector, a: usize, b: usize) -> Result<()> {
    if a == b || a >= state.n_sites() || b >= state.n_sites() {
        return arg(format!("invalid CZ sites ({a}, {b})"));
    }
    apply_cz(state.amplitudes_mut(), a, b);
    Ok(())
}

/// One layer: `gates[q]` on every qubit, then the CZs of the schedule.
pub fn apply_layer(state: &mut StateVector, gates: &[Gate], layer: usize, schedule: CzSchedule) -> Result<()> {
    if gates.len() != state.n_sites() {
        return arg(format!("layer has {} gates for {} qubits", gates.len(), state.n_sites()));
    }
    for (q, &g) in gates.iter().enumerate() {
        apply_gate(state, q, g)?;
    }
    for i in schedule.bonds(state.n_sites(), layer) {
        apply_cz_gate(state, i, i + 1)?;
    }
    Ok(())
}

pub fn apply_hadamard_layer(state: &mut StateVector) {
    for q in 0..state.n_sites() {
        apply_single_site(state.amplitudes_mut(), q, &Gate::Hadamard.matrix());
    }
}

/// States after the Hadamard layer and after each of the `spec.layers` layers.
pub fn circuit_trajectory(spec: &CircuitSpec, initial: &StateVector) -> Result<Vec<StateVector>> {
    spec.validate()?;
    if initial.n_sites() != spec.n_sites {
        return arg(format!(
            "initial state has {} qubits, circuit has {}",
            initial.n_sites(),
            spec.n_sites
        ));
    }
    let mut state = initial.clone();
    apply_hadamard_layer(&mut state);
    let mut out = Vec::with_capacity(spec.layers + 1);
    out.push(state.clone());
    for layer in 0..spec.layers {
        let gates = draw_layer(spec.seed, layer, spec.n_sites);
        apply_layer(&mut state, &gates, layer, spec.cz_schedule)?;
        out.push(state.clone());
    }
    Ok(out)
}

pub fn run_circuit(spec: &CircuitSpec, initial: &StateVector) -> Result<StateVector> {
    spec.validate()?;
    if initial.n_sites() != spec.n_sites {
        return arg(format!(
            "initial state has {} qubits, circuit has {}",
            initial.n_sites(),
            spec.n_sites
        ));
    }
    let mut state = initial.clone();
    apply_hadamard_layer(&mut state);
    for layer in 0..spec.layers {
        let gates = draw_layer(spec.seed, layer, spec.n_sites);
        apply_layer(&mut state, &gates, layer, spec.cz_schedule)?;
    }
    Ok(state)
}

/// Layer count matching `m` drive cycles at frequency `omega` (units of
/// `J`), taking one layer to last as long as a cycle at `ω = 8J`.
pub fn matched_time_axis(omega: f64, m_analog: usize) -> Result<usize> {
    if !(omega > 0.0 && omega.is_finite()) {
        return arg(format!("omega must be positive, got {omega}"));
    }
    Ok((m_analog as f64 * 8.0 / omega).round() as usize)
}
