//! Binary patterns, sign equivalence, Hamming/overlap arithmetic, and the
//! agreement/disagreement index sets that parameterize the closed-form
//! Jacobian spectra.
//!
//! Indices are 0-based throughout the API; reports and the CLI render them
//! 1-based.

use std::fmt;

use crate::error::{ModelError, Result};

/// A vector of N entries, each exactly +1 or -1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryPattern {
    entries: Vec<i8>,
}

impl BinaryPattern {
    /// Builds a pattern from raw +1/-1 entries. N must be at least 2.
    pub fn new(entries: Vec<i8>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(ModelError::InvalidPattern(format!(
                "dimension must be at least 2, got {}",
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|&e| e != 1 && e != -1) {
            return Err(ModelError::InvalidPattern(format!(
                "entry {} at index {pos} is not +1 or -1",
                entries[pos]
            )));
        }
        Ok(Self { entries })
    }

    /// Parses a compact `+`/`-` string, e.g. `"++-+"`.
    pub fn from_pm_str(s: &str) -> Result<Self> {
        let entries = s
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                other => Err(ModelError::InvalidPattern(format!(
                    "unexpected character {other:?}"
                ))),
            })
            .collect::<Result<Vec<i8>>>()?;
        Self::new(entries)
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> i8 {
        self.entries[i]
    }

    pub fn negated(&self) -> Self {
        Self {
            entries: self.entries.iter().map(|e| -e).collect(),
        }
    }

    /// Canonical representative of the sign class: first entry forced to +1.
    pub fn canonical(&self) -> Self {
        if self.entries[0] == 1 {
            self.clone()
        } else {
            self.negated()
        }
    }

    pub fn dot(&self, other: &Self) -> Result<i64> {
        check_dims(self.dim(), other.dim())?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| (a as i64) * (b as i64))
            .sum())
    }

    /// The same pattern viewed as grayscale (entries exactly +1.0 / -1.0).
    pub fn to_gray(&self) -> GrayPattern {
        GrayPattern {
            entries: self.entries.iter().map(|&e| e as f64).collect(),
        }
    }
}

impl fmt::Display for BinaryPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &e in &self.entries {
            f.write_str(if e == 1 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

/// A vector of N reals in [-1, 1]; the defective/grayscale input of a
/// retrieval query before phase initialization.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayPattern {
    entries: Vec<f64>,
}

impl GrayPattern {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(ModelError::InvalidPattern(
                "gray pattern must not be empty".into(),
            ));
        }
        for (index, &value) in entries.iter().enumerate() {
            if !(-1.0..=1.0).contains(&value) {
                return Err(ModelError::OutOfRange { index, value });
            }
        }
        Ok(Self { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> f64 {
        self.entries[i]
    }
}

/// Number of entries in which the two patterns differ.
pub fn hamming(a: &BinaryPattern, b: &BinaryPattern) -> Result<usize> {
    check_dims(a.dim(), b.dim())?;
    Ok(a.entries
        .iter()
        .zip(&b.entries)
        .filter(|(x, y)| x != y)
        .count())
}

/// True iff `a = b` or `a = -b`; such patterns encode the same bipolar state.
pub fn sign_equivalent(a: &BinaryPattern, b: &BinaryPattern) -> Result<bool> {
    let d = hamming(a, b)?;
    Ok(d == 0 || d == a.dim())
}

/// An index set split by the sign its defining memory entry takes there.
/// Only the split matters for eigenspace labels; eigenvalues depend on the
/// combined cardinalities alone.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SignSplit {
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
}

impl SignSplit {
    pub fn len(&self) -> usize {
        self.plus.len() + self.minus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plus.is_empty() && self.minus.is_empty()
    }

    /// All member indices in ascending order.
    pub fn indices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.plus.iter().chain(&self.minus).copied().collect();
        v.sort_unstable();
        v
    }

    fn push(&mut self, index: usize, plus: bool) {
        if plus {
            self.plus.push(index);
        } else {
            self.minus.push(index);
        }
    }
}

/// Probe-pattern refinement of the two-memory partition. The +/- split
/// records the common sign of the memories on each index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeRefinement {
    /// Indices where the memories agree and the probe matches them.
    pub i11: SignSplit,
    /// Indices where the memories agree and the probe opposes them.
    pub i12: SignSplit,
    /// Indices where the memories disagree and the probe matches the first.
    pub i21: SignSplit,
    /// Indices where the memories disagree and the probe opposes the first.
    pub i22: SignSplit,
}

/// Agreement/disagreement partition of `[0, N)` for a memory pair, with the
/// optional probe refinement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoMemoryIndexSets {
    /// Indices where the two memories agree.
    pub i1: Vec<usize>,
    /// Indices where the two memories disagree.
    pub i2: Vec<usize>,
    /// Populated only when a probe pattern was supplied.
    pub refinement: Option<ProbeRefinement>,
}

impl TwoMemoryIndexSets {
    pub fn dim(&self) -> usize {
        self.i1.len() + self.i2.len()
    }
}

/// Computes the I-partition for a memory pair, refining by `eta` when given.
///
/// Fails with [`ModelError::AntipodalMemories`] when the memories coincide up
/// to sign (the partition would be trivial and every two-memory statement
/// downstream assumes it is not).
pub fn index_sets_two(
    xi1: &BinaryPattern,
    xi2: &BinaryPattern,
    eta: Option<&BinaryPattern>,
) -> Result<TwoMemoryIndexSets> {
    check_dims(xi1.dim(), xi2.dim())?;
    if sign_equivalent(xi1, xi2)? {
        return Err(ModelError::AntipodalMemories {
            first: 0,
            second: 1,
        });
    }
    let n = xi1.dim();
    let mut i1 = Vec::new();
    let mut i2 = Vec::new();
    for i in 0..n {
        if xi1.get(i) == xi2.get(i) {
            i1.push(i);
        } else {
            i2.push(i);
        }
    }

    let refinement = match eta {
        None => None,
        Some(eta) => {
            check_dims(xi1.dim(), eta.dim())?;
            let mut r = ProbeRefinement {
                i11: SignSplit::default(),
                i12: SignSplit::default(),
                i21: SignSplit::default(),
                i22: SignSplit::default(),
            };
            for i in 0..n {
                let agree = xi1.get(i) == xi2.get(i);
                let matches_first = eta.get(i) == xi1.get(i);
                let plus = xi1.get(i) == 1;
                match (agree, matches_first) {
                    (true, true) => r.i11.push(i, plus),
                    (true, false) => r.i12.push(i, plus),
                    (false, true) => r.i21.push(i, plus),
                    (false, false) => r.i22.push(i, plus),
                }
            }
            Some(r)
        }
    };

    Ok(TwoMemoryIndexSets { i1, i2, refinement })
}

/// J-partition of `[0, N)` for a memory triple, taking `xi1` as the
/// distinguished memory. The +/- split records the sign of `xi2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeMemoryIndexSets {
    /// Indices where the second and third memories agree.
    pub j1: Vec<usize>,
    /// Indices where they disagree.
    pub j2: Vec<usize>,
    /// Within `j1`: the common value also matches the first memory.
    pub j11: SignSplit,
    /// Within `j1`: the common value opposes the first memory.
    pub j12: SignSplit,
    /// Within `j2`: the second memory matches the first.
    pub j21: SignSplit,
    /// Within `j2`: the second memory opposes the first.
    pub j22: SignSplit,
}

impl ThreeMemoryIndexSets {
    pub fn dim(&self) -> usize {
        self.j1.len() + self.j2.len()
    }

    pub fn all_four_nonempty(&self) -> bool {
        !self.j11.is_empty()
            && !self.j12.is_empty()
            && !self.j21.is_empty()
            && !self.j22.is_empty()
    }
}

/// Computes the J-partition for a memory triple.
///
/// Only strictly antipodal pairs (`xi_k = -xi_l`) are rejected here: equal
/// memories yield a well-defined partition with an empty side, and it is the
/// three-memory theorems downstream that refuse such degenerate inputs.
pub fn index_sets_three(
    xi1: &BinaryPattern,
    xi2: &BinaryPattern,
    xi3: &BinaryPattern,
) -> Result<ThreeMemoryIndexSets> {
    check_dims(xi1.dim(), xi2.dim())?;
    check_dims(xi1.dim(), xi3.dim())?;
    let mems = [xi1, xi2, xi3];
    for k in 0..3 {
        for l in (k + 1)..3 {
            if hamming(mems[k], mems[l])? == mems[k].dim() {
                return Err(ModelError::AntipodalMemories {
                    first: k,
                    second: l,
                });
            }
        }
    }

    let n = xi1.dim();
    let mut sets = ThreeMemoryIndexSets {
        j1: Vec::new(),
        j2: Vec::new(),
        j11: SignSplit::default(),
        j12: SignSplit::default(),
        j21: SignSplit::default(),
        j22: SignSplit::default(),
    };
    for i in 0..n {
        let plus = xi2.get(i) == 1;
        if xi2.get(i) == xi3.get(i) {
            sets.j1.push(i);
            if xi2.get(i) == xi1.get(i) {
                sets.j11.push(i, plus);
            } else {
                sets.j12.push(i, plus);
            }
        } else {
            sets.j2.push(i);
            if xi2.get(i) == xi1.get(i) {
                sets.j21.push(i, plus);
            } else {
                sets.j22.push(i, plus);
            }
        }
    }
    Ok(sets)
}

pub(crate) fn check_dims(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(ModelError::DimensionMismatch { left, right })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pat(s: &str) -> BinaryPattern {
        BinaryPattern::from_pm_str(s).unwrap()
    }

    #[test]
    fn rejects_bad_entries_and_short_patterns() {
        assert!(matches!(
            BinaryPattern::new(vec![1, 0, -1]),
            Err(ModelError::InvalidPattern(_))
        ));
        assert!(matches!(
            BinaryPattern::new(vec![1]),
            Err(ModelError::InvalidPattern(_))
        ));
        assert!(BinaryPattern::new(vec![1, -1]).is_ok());
    }

    #[test]
    fn gray_range_is_enforced() {
        assert!(GrayPattern::new(vec![0.0, 1.0, -1.0]).is_ok());
        assert_eq!(
            GrayPattern::new(vec![0.0, 1.5]),
            Err(ModelError::OutOfRange {
                index: 1,
                value: 1.5
            })
        );
    }

    #[test]
    fn block_pair_partition() {
        let sets = index_sets_two(&pat("++++++"), &pat("+++---"), None).unwrap();
        assert_eq!(sets.i1, vec![0, 1, 2]);
        assert_eq!(sets.i2, vec![3, 4, 5]);
        assert!(sets.refinement.is_none());
    }

    #[test]
    fn block_pair_refinement() {
        let eta = pat("++-++-");
        let sets = index_sets_two(&pat("++++++"), &pat("+++---"), Some(&eta)).unwrap();
        let r = sets.refinement.unwrap();
        assert_eq!(r.i11.indices(), vec![0, 1]);
        assert_eq!(r.i12.indices(), vec![2]);
        assert_eq!(r.i21.indices(), vec![3, 4]);
        assert_eq!(r.i22.indices(), vec![5]);
    }

    #[test]
    fn antipodal_pair_is_rejected() {
        assert_eq!(
            index_sets_two(&pat("+-"), &pat("-+"), None),
            Err(ModelError::AntipodalMemories {
                first: 0,
                second: 1
            })
        );
        // Equality counts as sign-equivalence too.
        assert!(index_sets_two(&pat("+-"), &pat("+-"), None).is_err());
    }

    #[test]
    fn worked_triple_partition() {
        let sets = index_sets_three(&pat("+++++"), &pat("++---"), &pat("+-+-+")).unwrap();
        assert_eq!(sets.j11.indices(), vec![0]);
        assert_eq!(sets.j12.indices(), vec![3]);
        assert_eq!(sets.j21.indices(), vec![1]);
        assert_eq!(sets.j22.indices(), vec![2, 4]);
        assert_eq!(sets.j1, vec![0, 3]);
        assert_eq!(sets.j2, vec![1, 2, 4]);
    }

    #[test]
    fn equal_memories_pass_through_with_empty_side() {
        let sets = index_sets_three(&pat("++--"), &pat("+-+-"), &pat("+-+-")).unwrap();
        assert!(sets.j2.is_empty());
        assert_eq!(sets.j1.len(), 4);
    }

    #[test]
    fn strictly_antipodal_triple_is_rejected() {
        assert_eq!(
            index_sets_three(&pat("++--"), &pat("+-+-"), &pat("-+-+")),
            Err(ModelError::AntipodalMemories {
                first: 1,
                second: 2
            })
        );
    }

    #[test]
    fn four_dim_triple_enumerated() {
        // Resolved by brute enumeration of the defining conditions.
        let sets = index_sets_three(&pat("++--"), &pat("+-+-"), &pat("+--+")).unwrap();
        assert_eq!(sets.j1, vec![0, 1]);
        assert_eq!(sets.j11.indices(), vec![0]);
        assert_eq!(sets.j12.indices(), vec![1]);
        assert_eq!(sets.j21.indices(), vec![3]);
        assert_eq!(sets.j22.indices(), vec![2]);
    }

    #[test]
    fn hamming_basics() {
        let a = pat("++--");
        assert_eq!(hamming(&a, &a).unwrap(), 0);
        assert_eq!(hamming(&a, &a.negated()).unwrap(), 4);
        assert_eq!(hamming(&pat("++--"), &pat("+--+")).unwrap(), 2);
        assert_eq!(
            hamming(&pat("++"), &pat("+++")),
            Err(ModelError::DimensionMismatch { left: 2, right: 3 })
        );
    }

    #[test]
    fn sign_equivalence_basics() {
        assert!(sign_equivalent(&pat("+-+"), &pat("-+-")).unwrap());
        assert!(sign_equivalent(&pat("+-+"), &pat("+-+")).unwrap());
        assert!(!sign_equivalent(&pat("+-+"), &pat("+++")).unwrap());
    }

    #[test]
    fn canonical_representative_leads_with_plus() {
        assert_eq!(pat("-+-").canonical(), pat("+-+"));
        assert_eq!(pat("+-+").canonical(), pat("+-+"));
    }

    fn arb_pattern(n: usize) -> impl Strategy<Value = BinaryPattern> {
        prop::collection::vec(prop::bool::ANY, n..=n).prop_map(|bits| {
            BinaryPattern::new(bits.iter().map(|&b| if b { 1 } else { -1 }).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn partition_and_refinement_counts(
            bits1 in prop::collection::vec(prop::bool::ANY, 2..12),
            flip in prop::collection::vec(prop::bool::ANY, 2..12),
            probe in prop::collection::vec(prop::bool::ANY, 2..12),
        ) {
            let n = bits1.len().min(flip.len()).min(probe.len());
            prop_assume!(n >= 2);
            let xi1 = BinaryPattern::new(bits1[..n].iter().map(|&b| if b {1} else {-1}).collect()).unwrap();
            let xi2 = BinaryPattern::new(
                xi1.entries().iter().zip(&flip[..n]).map(|(&e, &f)| if f { -e } else { e }).collect()
            ).unwrap();
            prop_assume!(!sign_equivalent(&xi1, &xi2).unwrap());
            let eta = BinaryPattern::new(probe[..n].iter().map(|&b| if b {1} else {-1}).collect()).unwrap();

            let sets = index_sets_two(&xi1, &xi2, Some(&eta)).unwrap();
            let r = sets.refinement.as_ref().unwrap();
            // i1/i2 partition [0, n)
            let mut all: Vec<usize> = sets.i1.iter().chain(&sets.i2).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
            prop_assert!(!sets.i1.is_empty() && !sets.i2.is_empty());
            // refinement cardinalities add up
            prop_assert_eq!(r.i11.len() + r.i12.len(), sets.i1.len());
            prop_assert_eq!(r.i21.len() + r.i22.len(), sets.i2.len());

            // negating the probe swaps i11 <-> i12 and i21 <-> i22
            let neg = index_sets_two(&xi1, &xi2, Some(&eta.negated())).unwrap();
            let rn = neg.refinement.unwrap();
            prop_assert_eq!(rn.i11.indices(), r.i12.indices());
            prop_assert_eq!(rn.i12.indices(), r.i11.indices());
            prop_assert_eq!(rn.i21.indices(), r.i22.indices());
            prop_assert_eq!(rn.i22.indices(), r.i21.indices());

            // negating the second memory swaps i1 <-> i2
            let swapped = index_sets_two(&xi1, &xi2.negated(), None).unwrap();
            prop_assert_eq!(&swapped.i1, &sets.i2);
            prop_assert_eq!(&swapped.i2, &sets.i1);
        }

        #[test]
        fn three_memory_partition_is_exact(n in 3usize..10, seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let draw = |rng: &mut rand_chacha::ChaCha8Rng| {
                BinaryPattern::new((0..n).map(|_| if rng.gen::<bool>() {1} else {-1}).collect()).unwrap()
            };
            let (a, b, c) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
            prop_assume!(hamming(&a, &b).unwrap() != n);
            prop_assume!(hamming(&a, &c).unwrap() != n);
            prop_assume!(hamming(&b, &c).unwrap() != n);
            let sets = index_sets_three(&a, &b, &c).unwrap();
            let mut all: Vec<usize> = sets.j1.iter().chain(&sets.j2).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
            prop_assert_eq!(sets.j11.len() + sets.j12.len(), sets.j1.len());
            prop_assert_eq!(sets.j21.len() + sets.j22.len(), sets.j2.len());
            // distinct non-antipodal memories leave at least three subsets nonempty
            if !sign_equivalent(&a, &b).unwrap()
                && !sign_equivalent(&a, &c).unwrap()
                && !sign_equivalent(&b, &c).unwrap()
            {
                let empties = [&sets.j11, &sets.j12, &sets.j21, &sets.j22]
                    .iter()
                    .filter(|s| s.is_empty())
                    .count();
                prop_assert!(empties <= 1);
            }
        }
    }

    proptest! {
        #[test]
        fn hamming_negation_identity(a in arb_pattern(8), b in arb_pattern(8)) {
            let d = hamming(&a, &b).unwrap();
            prop_assert_eq!(hamming(&a, &b.negated()).unwrap(), 8 - d);
            prop_assert_eq!(hamming(&b, &a).unwrap(), d);
        }
    }
}
