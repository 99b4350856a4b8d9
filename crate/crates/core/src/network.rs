//! Hebbian network construction and the gradient-flow vector field.
//!
//! The phase dynamics is
//!
//! ```text
//! dphi_i/dt = (1/N) sum_j C_ij sin(phi_j - phi_i) + (eps/N) sum_j sin 2(phi_j - phi_i)
//! ```
//!
//! with `C_ij = sum_k xi^k_i xi^k_j` over the stored memories. The field is
//! the negative gradient of [`HebbianNetwork::potential`], and every bipolar
//! state is an equilibrium.

use crate::error::{ModelError, Result};
use crate::pattern::{check_dims, sign_equivalent, BinaryPattern};

/// Phase configuration of the N oscillators at some time.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    phases: Vec<f64>,
    time: f64,
}

impl PhaseState {
    pub fn new(phases: Vec<f64>) -> Self {
        Self { phases, time: 0.0 }
    }

    pub fn with_time(phases: Vec<f64>, time: f64) -> Self {
        Self { phases, time }
    }

    pub fn dim(&self) -> usize {
        self.phases.len()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn mean_phase(&self) -> f64 {
        self.phases.iter().sum::<f64>() / self.phases.len() as f64
    }

    /// Same state with a constant added to every phase.
    pub fn translated(&self, c: f64) -> Self {
        Self {
            phases: self.phases.iter().map(|p| p + c).collect(),
            time: self.time,
        }
    }

    /// Phases folded into [0, 2 pi) for display purposes.
    pub fn wrapped(&self) -> Vec<f64> {
        self.phases
            .iter()
            .map(|p| p.rem_euclid(std::f64::consts::TAU))
            .collect()
    }
}

/// Memory set plus Hebbian coupling matrix and second-harmonic strength.
/// Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HebbianNetwork {
    memories: Vec<BinaryPattern>,
    /// Dense row-major N x N coupling; entries are integers of the same
    /// parity as M, stored as reals for the numerics downstream.
    coupling: Vec<f64>,
    epsilon: f64,
    dim: usize,
}

impl HebbianNetwork {
    /// Builds the network for `memories` with second-harmonic strength
    /// `epsilon`. Memories must be pairwise distinct up to sign.
    pub fn build(memories: Vec<BinaryPattern>, epsilon: f64) -> Result<Self> {
        if memories.is_empty() {
            return Err(ModelError::ParameterOutOfRange(
                "at least one memory required".into(),
            ));
        }
        if !(epsilon >= 0.0) {
            return Err(ModelError::NegativeEpsilon(epsilon));
        }
        let dim = memories[0].dim();
        for m in &memories[1..] {
            check_dims(dim, m.dim())?;
        }
        for k in 0..memories.len() {
            for l in (k + 1)..memories.len() {
                if sign_equivalent(&memories[k], &memories[l])? {
                    return Err(ModelError::AntipodalMemories {
                        first: k,
                        second: l,
                    });
                }
            }
        }

        let mut coupling = vec![0.0; dim * dim];
        for xi in &memories {
            for i in 0..dim {
                let xi_i = xi.get(i) as f64;
                for j in 0..dim {
                    coupling[i * dim + j] += xi_i * xi.get(j) as f64;
                }
            }
        }
        Ok(Self {
            memories,
            coupling,
            epsilon,
            dim,
        })
    }

    /// Same memory set with a different second-harmonic strength; the
    /// coupling matrix is reused.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0) {
            return Err(ModelError::NegativeEpsilon(epsilon));
        }
        Ok(Self {
            memories: self.memories.clone(),
            coupling: self.coupling.clone(),
            epsilon,
            dim: self.dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn memories(&self) -> &[BinaryPattern] {
        &self.memories
    }

    pub fn memory_count(&self) -> usize {
        self.memories.len()
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.coupling[i * self.dim + j]
    }

    /// Index of the memory `eta` coincides with up to sign, if any.
    pub fn memory_index_of(&self, eta: &BinaryPattern) -> Result<Option<usize>> {
        for (k, xi) in self.memories.iter().enumerate() {
            if sign_equivalent(xi, eta)? {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }

    /// The vector field of the phase dynamics, evaluated from pairwise phase
    /// differences so that the output depends on the phases only through
    /// `phi_j - phi_i`. Components sum to zero.
    pub fn rhs(&self, state: &PhaseState) -> Result<Vec<f64>> {
        check_dims(self.dim, state.dim())?;
        let n = self.dim;
        let ph = state.phases();
        let mut out = vec![0.0; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = ph[j] - ph[i];
                let term = self.coupling(i, j) * d.sin() + self.epsilon * (2.0 * d).sin();
                out[i] += term;
                out[j] -= term;
            }
        }
        let nf = n as f64;
        for v in &mut out {
            *v /= nf;
        }
        Ok(out)
    }

    /// Algebraically identical expansion of [`Self::rhs`] through per-memory
    /// phasor sums: O(N*M) instead of O(N^2), at the cost of machine-level
    /// (~1e-15) deviations from the pairwise form. The integrator hot loop
    /// uses this; contracts are stated against `rhs`.
    pub(crate) fn rhs_factored(&self, ph: &[f64], out: &mut [f64]) {
        let n = self.dim;
        let nf = n as f64;
        debug_assert_eq!(ph.len(), n);
        debug_assert_eq!(out.len(), n);

        let mut sin = vec![0.0; n];
        let mut cos = vec![0.0; n];
        for i in 0..n {
            sin[i] = ph[i].sin();
            cos[i] = ph[i].cos();
        }

        let m = self.memories.len();
        let mut mem_sin = vec![0.0; m];
        let mut mem_cos = vec![0.0; m];
        for (k, xi) in self.memories.iter().enumerate() {
            let mut s = 0.0;
            let mut c = 0.0;
            for i in 0..n {
                let x = xi.get(i) as f64;
                s += x * sin[i];
                c += x * cos[i];
            }
            mem_sin[k] = s;
            mem_cos[k] = c;
        }

        let mut sin2_sum = 0.0;
        let mut cos2_sum = 0.0;
        for i in 0..n {
            sin2_sum += 2.0 * sin[i] * cos[i];
            cos2_sum += cos[i] * cos[i] - sin[i] * sin[i];
        }

        for i in 0..n {
            let mut acc = 0.0;
            for (k, xi) in self.memories.iter().enumerate() {
                let x = xi.get(i) as f64;
                acc += x * (cos[i] * mem_sin[k] - sin[i] * mem_cos[k]);
            }
            let s2 = 2.0 * sin[i] * cos[i];
            let c2 = cos[i] * cos[i] - sin[i] * sin[i];
            acc += self.epsilon * (c2 * sin2_sum - s2 * cos2_sum);
            out[i] = acc / nf;
        }
    }

    /// Potential of the gradient flow; `rhs = -grad potential`. Written for
    /// two memories in the source material, the same double sum applies to
    /// any M through the coupling matrix.
    pub fn potential(&self, state: &PhaseState) -> Result<f64> {
        check_dims(self.dim, state.dim())?;
        let n = self.dim;
        let ph = state.phases();
        // Diagonal terms: C_ii = M and cos 0 = 1.
        let mut first = (self.memories.len() * n) as f64;
        let mut second = n as f64;
        for i in 0..n {
            for j in (i + 1)..n {
                let d = ph[j] - ph[i];
                first += 2.0 * self.coupling(i, j) * d.cos();
                second += 2.0 * (2.0 * d).cos();
            }
        }
        let nf = n as f64;
        Ok(-first / (2.0 * nf) - self.epsilon * second / (4.0 * nf))
    }
}

/// Canonical phase encoding of a binary pattern: 0 where the entry is +1,
/// pi where it is -1. An equilibrium of every matching network.
pub fn bipolar_state(eta: &BinaryPattern) -> PhaseState {
    PhaseState::new(
        eta.entries()
            .iter()
            .map(|&e| if e == 1 { 0.0 } else { std::f64::consts::PI })
            .collect(),
    )
}

/// Overlap `m(eta) = |(1/N) sum_i eta_i e^(i phi_i)|` in [0, 1]; invariant
/// under global phase shifts and under `eta -> -eta`.
pub fn overlap(state: &PhaseState, eta: &BinaryPattern) -> Result<f64> {
    check_dims(state.dim(), eta.dim())?;
    let mut re = 0.0;
    let mut im = 0.0;
    for (p, &e) in state.phases().iter().zip(eta.entries()) {
        let x = e as f64;
        re += x * p.cos();
        im += x * p.sin();
    }
    let n = state.dim() as f64;
    Ok((re.hypot(im) / n).min(1.0))
}
