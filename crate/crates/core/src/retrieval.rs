//! Subgrouping tournament for error-free retrieval: standards are paired
//! into two-memory networks round by round, each pair resolved by running
//! the gradient flow from the defective query, until one standard remains.
//! Winners are only ever selected by overlap against a memory, so the output
//! is always a member of the standard set.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{init_from_gray, integrate, IntegratorConfig};
use crate::error::{ModelError, Result};
use crate::network::{overlap, HebbianNetwork};
use crate::pattern::{sign_equivalent, BinaryPattern, GrayPattern};
use crate::spectral::critical_epsilon_m2;

/// How standards are grouped into pairs each round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairing {
    /// Adjacent pairs in list order: (0,1), (2,3), ...
    InOrder,
    /// A seeded shuffle before pairing; the tournament derives one shuffle
    /// seed per round from this base seed.
    Seeded(u64),
}

/// Tournament parameters. The per-pair strength is
/// `epsilon_fraction * critical epsilon` of that pair, which keeps every
/// non-memory pattern linearly unstable during the round.
#[derive(Debug, Clone, PartialEq)]
pub struct TournamentConfig {
    /// In (0, 1); fraction of the pair's critical strength to run at.
    pub epsilon_fraction: f64,
    pub pairing: Pairing,
    /// Terminal overlap a memory must exceed to win its pair.
    pub overlap_threshold: f64,
    pub integrator: IntegratorConfig,
}

impl Default for TournamentConfig {
    fn default() -> Self {
        Self {
            epsilon_fraction: 0.5,
            pairing: Pairing::InOrder,
            overlap_threshold: 0.999,
            integrator: IntegratorConfig::default(),
        }
    }
}

impl TournamentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon_fraction > 0.0 && self.epsilon_fraction < 1.0) {
            return Err(ModelError::ParameterOutOfRange(format!(
                "epsilon_fraction must lie strictly inside (0, 1), got {}",
                self.epsilon_fraction
            )));
        }
        if !(self.overlap_threshold > 0.0 && self.overlap_threshold < 1.0) {
            return Err(ModelError::ParameterOutOfRange(format!(
                "overlap_threshold must lie strictly inside (0, 1), got {}",
                self.overlap_threshold
            )));
        }
        self.integrator.validate()
    }
}

/// One subgroup of a round: a pair to be resolved dynamically, or a lone
/// pass-through standard when the round has odd size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subgroup {
    Pair(usize, usize),
    Single(usize),
}

/// Which member of a pair won.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairWinner {
    First,
    Second,
}

/// Outcome of one two-memory retrieval run.
#[derive(Debug, Clone, PartialEq)]
pub struct PairRetrieval {
    pub winner: PairWinner,
    /// Terminal overlaps with the two memories.
    pub overlaps: (f64, f64),
    pub steps: usize,
    pub converged: bool,
    /// Second-harmonic strength the pair ran at.
    pub epsilon: f64,
}

/// Diagnostics for one resolved pair inside a tournament round, in global
/// standard indices.
#[derive(Debug, Clone, PartialEq)]
pub struct PairRecord {
    pub first: usize,
    pub second: usize,
    pub winner: usize,
    pub overlaps: (f64, f64),
    pub steps: usize,
    pub epsilon: f64,
}

/// One tournament round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    /// 1-based round number, matching report conventions.
    pub round: usize,
    pub subgroups: Vec<Subgroup>,
    /// Surviving standard indices, in subgroup order.
    pub winners: Vec<usize>,
    pub pairs: Vec<PairRecord>,
}

/// Final tournament result.
#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalOutcome {
    pub winner_index: usize,
    pub winner: BinaryPattern,
    pub rounds: Vec<RoundRecord>,
    /// Number of two-memory integrations performed.
    pub total_integrations: usize,
}

/// Resolves one pair: runs the two-memory network at
/// `epsilon_fraction * critical epsilon` from `arccos(defective)` and picks
/// the memory whose terminal overlap clears the threshold.
pub fn retrieve_pair(
    xi1: &BinaryPattern,
    xi2: &BinaryPattern,
    defective: &GrayPattern,
    cfg: &TournamentConfig,
) -> Result<PairRetrieval> {
    cfg.validate()?;
    let critical = critical_epsilon_m2(xi1, xi2)?;
    let epsilon = cfg.epsilon_fraction * critical.value;
    let net = HebbianNetwork::build(vec![xi1.clone(), xi2.clone()], epsilon)?;
    let initial = init_from_gray(defective)?;
    let trajectory = integrate(&net, &initial, &cfg.integrator)?;
    let m1 = overlap(&trajectory.terminal, xi1)?;
    let m2 = overlap(&trajectory.terminal, xi2)?;

    let first = m1 > cfg.overlap_threshold;
    let second = m2 > cfg.overlap_threshold;
    let winner = match (first, second) {
        (true, true) => return Err(ModelError::AmbiguousRetrieval { m1, m2 }),
        (false, false) => return Err(ModelError::NoRetrieval { m1, m2 }),
        (true, false) => PairWinner::First,
        (false, true) => PairWinner::Second,
    };
    Ok(PairRetrieval {
        winner,
        overlaps: (m1, m2),
        steps: trajectory.steps,
        converged: trajectory.converged,
        epsilon,
    })
}

/// Groups `indices` into pairs (plus at most one singleton): `InOrder` keeps
/// list order, `Seeded` shuffles deterministically first.
pub fn subgroup(indices: &[usize], pairing: &Pairing) -> Vec<Subgroup> {
    let order: Vec<usize> = match pairing {
        Pairing::InOrder => indices.to_vec(),
        Pairing::Seeded(seed) => {
            let mut v = indices.to_vec();
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            v.shuffle(&mut rng);
            v
        }
    };
    order
        .chunks(2)
        .map(|c| match c {
            [a, b] => Subgroup::Pair(*a, *b),
            [a] => Subgroup::Single(*a),
            _ => unreachable!(),
        })
        .collect()
}

/// Runs the full subgrouping tournament over the standards for one defective
/// query. Every round restarts from the original query, so pairs within a
/// round are independent; the outcome is deterministic given the inputs.
pub fn tournament(
    standards: &[BinaryPattern],
    defective: &GrayPattern,
    cfg: &TournamentConfig,
) -> Result<RetrievalOutcome> {
    cfg.validate()?;
    if standards.is_empty() {
        return Err(ModelError::ParameterOutOfRange(
            "at least one standard pattern required".into(),
        ));
    }
    let dim = standards[0].dim();
    for s in standards {
        crate::pattern::check_dims(dim, s.dim())?;
    }
    crate::pattern::check_dims(dim, defective.dim())?;
    for k in 0..standards.len() {
        for l in (k + 1)..standards.len() {
            if sign_equivalent(&standards[k], &standards[l])? {
                return Err(ModelError::AntipodalMemories {
                    first: k,
                    second: l,
                });
            }
        }
    }

    let mut current: Vec<usize> = (0..standards.len()).collect();
    let mut rounds: Vec<RoundRecord> = Vec::new();
    let mut total_integrations = 0usize;

    while current.len() > 1 {
        let round = rounds.len() + 1;
        let pairing = match cfg.pairing {
            Pairing::InOrder => Pairing::InOrder,
            Pairing::Seeded(seed) => Pairing::Seeded(seed.wrapping_add(round as u64)),
        };
        let subgroups = subgroup(&current, &pairing);
        let mut winners = Vec::with_capacity(subgroups.len());
        let mut pairs = Vec::new();
        for sg in &subgroups {
            match *sg {
                Subgroup::Single(idx) => winners.push(idx),
                Subgroup::Pair(a, b) => {
                    total_integrations += 1;
                    let resolved =
                        retrieve_pair(&standards[a], &standards[b], defective, cfg).map_err(
                            |e| match e {
                                ModelError::NoRetrieval { m1, m2 } => {
                                    ModelError::NoRetrievalInRound { round, m1, m2 }
                                }
                                other => other,
                            },
                        )?;
                    let winner = match resolved.winner {
                        PairWinner::First => a,
                        PairWinner::Second => b,
                    };
                    winners.push(winner);
                    pairs.push(PairRecord {
                        first: a,
                        second: b,
                        winner,
                        overlaps: resolved.overlaps,
                        steps: resolved.steps,
                        epsilon: resolved.epsilon,
                    });
                }
            }
        }
        rounds.push(RoundRecord {
            round,
            subgroups,
            winners: winners.clone(),
            pairs,
        });
        current = winners;
    }

    let winner_index = current[0];
    Ok(RetrievalOutcome {
        winner_index,
        winner: standards[winner_index].clone(),
        rounds,
        total_integrations,
    })
}
