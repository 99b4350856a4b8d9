//! Jacobian assembly at bipolar equilibria, closed-form eigenspectra for two-
//! and three-memory networks, critical second-harmonic strengths, stability
//! classification, and the numeric eigensolver oracle.
//!
//! Every non-shift eigenvalue of the Jacobian moves with slope exactly -2 in
//! epsilon (the epsilon part acts as `-2 eps` on the complement of the
//! all-ones direction), so lambda_max crosses zero exactly once; that is what
//! [`bisect_critical_epsilon`] locates.

use crate::error::{ModelError, Result};
use crate::linalg::{symmetric_eigenvalues, SquareMatrix};
use crate::network::HebbianNetwork;
use crate::pattern::{
    check_dims, index_sets_three, index_sets_two, BinaryPattern, ThreeMemoryIndexSets,
};

/// Eigenvalues with |lambda| at or below this band are reported Marginal;
/// it separates the exact-zero shift mode and boundary cases from rounding.
pub const MARGINAL_TOL: f64 = 1e-10;
/// Absolute gap below which numerically computed eigenvalues are grouped
/// into one multiplicity cluster.
pub const CLUSTER_TOL: f64 = 1e-8;

/// One eigenvalue group of a Jacobian spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEntry {
    pub value: f64,
    pub multiplicity: usize,
    /// Eigenspace descriptor such as `V[1]` or `V(I1;I2)`; `numeric` for
    /// clustered eigensolver output.
    pub label: String,
}

/// Eigenvalues of a Jacobian at a bipolar equilibrium, grouped by eigenspace.
/// Multiplicities always sum to the dimension. Equal values from distinct
/// eigenspaces stay separate here and are merged only when comparing.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub dim: usize,
    pub entries: Vec<SpectrumEntry>,
}

impl SpectrumReport {
    fn new(dim: usize) -> Self {
        Self {
            dim,
            entries: Vec::new(),
        }
    }

    /// Entries with multiplicity zero are suppressed.
    fn push(&mut self, value: f64, multiplicity: usize, label: &str) {
        if multiplicity > 0 {
            self.entries.push(SpectrumEntry {
                value,
                multiplicity,
                label: label.to_string(),
            });
        }
    }

    pub fn total_multiplicity(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    /// The full eigenvalue multiset, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev = Vec::with_capacity(self.dim);
        for e in &self.entries {
            ev.extend(std::iter::repeat(e.value).take(e.multiplicity));
        }
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }

    /// Largest eigenvalue after removing one copy of the shift mode: the
    /// `V[1]` entry when labeled, otherwise the eigenvalue closest to zero.
    pub fn lambda_max_nonzero(&self) -> f64 {
        let mut ev = self.eigenvalues();
        let skip = self
            .entries
            .iter()
            .find(|e| e.label == "V[1]")
            .map(|e| e.value)
            .unwrap_or_else(|| {
                ev.iter()
                    .copied()
                    .min_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap())
                    .unwrap_or(0.0)
            });
        if let Some(pos) = ev.iter().position(|&v| v == skip) {
            ev.remove(pos);
        }
        ev.last().copied().unwrap_or(f64::NEG_INFINITY)
    }
}

/// Linear stability of a bipolar state, judged on the spectrum with the
/// single shift-mode zero removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

impl std::fmt::Display for Stability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Stability::Stable => "Stable",
            Stability::Unstable => "Unstable",
            Stability::Marginal => "Marginal",
        })
    }
}

/// Which route produced the spectrum a verdict rests on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumSource {
    AnalyticM2,
    AnalyticM3,
    Numeric,
}

impl std::fmt::Display for SpectrumSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SpectrumSource::AnalyticM2 => "analytic-m2",
            SpectrumSource::AnalyticM3 => "analytic-m3",
            SpectrumSource::Numeric => "numeric",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityVerdict {
    pub status: Stability,
    /// Largest eigenvalue excluding the single shift-mode zero.
    pub lambda_max_nonzero: f64,
    pub source: SpectrumSource,
}

impl StabilityVerdict {
    fn from_lambda(lambda: f64, source: SpectrumSource) -> Self {
        let status = if lambda < -MARGINAL_TOL {
            Stability::Stable
        } else if lambda > MARGINAL_TOL {
            Stability::Unstable
        } else {
            Stability::Marginal
        };
        Self {
            status,
            lambda_max_nonzero: lambda,
            source,
        }
    }
}

/// Which regime a critical strength was computed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpsilonRegime {
    /// Two memories with 1 < |I1| < N-1.
    Generic,
    /// Two memories with |I1| = 1 or |I1| = N-1.
    Boundary,
    /// Three memories; the payload is the 0-based memory index.
    ThreeMemory(usize),
}

/// A critical second-harmonic strength together with the regime that
/// determined its formula.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalEpsilon {
    pub value: f64,
    pub regime: EpsilonRegime,
}

/// Jacobian of the phase dynamics at the bipolar state of `eta`:
/// off-diagonal `C_ij eta_i eta_j / N + 2 eps / N`, diagonal the negative
/// row sum. Symmetric with rows summing to zero.
pub fn jacobian(net: &HebbianNetwork, eta: &BinaryPattern) -> Result<SquareMatrix> {
    check_dims(net.dim(), eta.dim())?;
    let n = net.dim();
    let nf = n as f64;
    let mut m = SquareMatrix::zeros(n);
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i == j {
                continue;
            }
            let v = net.coupling(i, j) * (eta.get(i) * eta.get(j)) as f64 / nf
                + 2.0 * net.epsilon() / nf;
            m.set(i, j, v);
            diag -= v;
        }
        m.set(i, i, diag);
    }
    Ok(m)
}

/// Eigenvalues of a symmetric matrix clustered into multiplicity groups;
/// the oracle the analytic spectra are checked against.
pub fn numeric_spectrum(matrix: &SquareMatrix) -> Result<SpectrumReport> {
    let ev = symmetric_eigenvalues(matrix)?;
    let mut report = SpectrumReport::new(matrix.n());
    let mut idx = 0;
    while idx < ev.len() {
        let mut end = idx + 1;
        while end < ev.len() && ev[end] - ev[end - 1] <= CLUSTER_TOL {
            end += 1;
        }
        let cluster = &ev[idx..end];
        let mean = cluster.iter().sum::<f64>() / cluster.len() as f64;
        report.push(mean, cluster.len(), "numeric");
        idx = end;
    }
    Ok(report)
}

fn require_memory_count(net: &HebbianNetwork, expected: usize) -> Result<()> {
    if net.memory_count() != expected {
        return Err(ModelError::WrongMemoryCount {
            expected,
            found: net.memory_count(),
        });
    }
    Ok(())
}

/// Spectrum at either memory of a two-memory network (both have the same
/// Jacobian): `{0, -2(|I1|/N + eps), -2(|I2|/N + eps), -2 eps}` with
/// multiplicities `{1, |I1|-1, |I2|-1, 1}`.
pub fn analytic_spectrum_memory_m2(net: &HebbianNetwork) -> Result<SpectrumReport> {
    require_memory_count(net, 2)?;
    let sets = index_sets_two(&net.memories()[0], &net.memories()[1], None)?;
    let n = net.dim() as f64;
    let (n1, n2) = (sets.i1.len(), sets.i2.len());
    let eps = net.epsilon();

    let mut report = SpectrumReport::new(net.dim());
    report.push(0.0, 1, "V[1]");
    report.push(-2.0 * (n1 as f64 / n + eps), n1 - 1, "V(I1)");
    report.push(-2.0 * (n2 as f64 / n + eps), n2 - 1, "V(I2)");
    report.push(-2.0 * eps, 1, "V(I1;I2)");
    Ok(report)
}

/// Spectrum at a non-memory pattern of a two-memory network: the eight-case
/// form driven by the probe refinement cardinalities. Condition-failing and
/// multiplicity-zero items are suppressed.
pub fn analytic_spectrum_pattern_m2(
    net: &HebbianNetwork,
    eta: &BinaryPattern,
) -> Result<SpectrumReport> {
    require_memory_count(net, 2)?;
    check_dims(net.dim(), eta.dim())?;
    if let Some(k) = net.memory_index_of(eta)? {
        return Err(ModelError::IsMemory(k));
    }
    let sets = index_sets_two(&net.memories()[0], &net.memories()[1], Some(eta))?;
    let r = sets.refinement.as_ref().expect("probe was supplied");
    let n = net.dim() as f64;
    let eps = net.epsilon();
    let (n11, n12, n21, n22) = (r.i11.len(), r.i12.len(), r.i21.len(), r.i22.len());

    let mut report = SpectrumReport::new(net.dim());
    report.push(0.0, 1, "V[1]");
    report.push(-2.0 * eps, 1, "V(I1;I2)");
    if n11 > 0 {
        report.push(
            2.0 * ((n12 as f64 - n11 as f64) / n - eps),
            n11 - 1,
            "V(I11+;I11-)+V(I11+)+V(I11-)",
        );
    }
    if n12 > 0 {
        report.push(
            2.0 * ((n11 as f64 - n12 as f64) / n - eps),
            n12 - 1,
            "V(I12+;I12-)+V(I12+)+V(I12-)",
        );
    }
    if n11 > 0 && n12 > 0 {
        report.push(
            2.0 * ((n11 + n12) as f64 / n - eps),
            1,
            "V(I11;I12)",
        );
    }
    if n21 > 0 {
        report.push(
            2.0 * ((n22 as f64 - n21 as f64) / n - eps),
            n21 - 1,
            "V(I21+;I21-)+V(I21+)+V(I21-)",
        );
    }
    if n22 > 0 {
        report.push(
            2.0 * ((n21 as f64 - n22 as f64) / n - eps),
            n22 - 1,
            "V(I22+;I22-)+V(I22+)+V(I22-)",
        );
    }
    if n21 > 0 && n22 > 0 {
        report.push(
            2.0 * ((n21 + n22) as f64 / n - eps),
            1,
            "V(I21;I22)",
        );
    }
    Ok(report)
}

/// Spectrum at memory `which` (0-based) of a three-memory network, from the
/// J-partition recomputed with that memory in the distinguished role.
///
/// The `V(J1;J2)` eigenvalue is `-(1 + 2 eps)`, not `-2 eps`: applying the
/// Jacobian to the defining vector leaves a `-x_i` term from the constant
/// part of `S_ij xi_i xi_j` on the opposite block, which has no two-memory
/// counterpart. The numeric oracle pins this down (see tests).
pub fn analytic_spectrum_memory_m3(
    net: &HebbianNetwork,
    which: usize,
) -> Result<SpectrumReport> {
    require_memory_count(net, 3)?;
    if which >= 3 {
        return Err(ModelError::ParameterOutOfRange(format!(
            "memory index must be 0, 1, or 2, got {which}"
        )));
    }
    let mems = net.memories();
    let rest: Vec<usize> = (0..3).filter(|&k| k != which).collect();
    let sets = index_sets_three(&mems[which], &mems[rest[0]], &mems[rest[1]])?;
    Ok(spectrum_from_three_sets(&sets, net.dim(), net.epsilon()))
}

fn spectrum_from_three_sets(
    sets: &ThreeMemoryIndexSets,
    dim: usize,
    eps: f64,
) -> SpectrumReport {
    let n = dim as f64;
    let (n11, n12, n21, n22) = (
        sets.j11.len(),
        sets.j12.len(),
        sets.j21.len(),
        sets.j22.len(),
    );
    let (n1, n2) = (sets.j1.len(), sets.j2.len());

    let mut report = SpectrumReport::new(dim);
    report.push(0.0, 1, "V[1]");
    report.push(-1.0 - 2.0 * eps, 1, "V(J1;J2)");
    if n11 > 0 {
        report.push(
            (-3.0 * n11 as f64 + n12 as f64 - n2 as f64) / n - 2.0 * eps,
            n11 - 1,
            "V(J11+;J11-)+V(J11+)+V(J11-)",
        );
    }
    if n12 > 0 {
        report.push(
            (-3.0 * n12 as f64 + n11 as f64 - n2 as f64) / n - 2.0 * eps,
            n12 - 1,
            "V(J12+;J12-)+V(J12+)+V(J12-)",
        );
    }
    if n11 > 0 && n12 > 0 {
        report.push((n1 as f64 - n2 as f64) / n - 2.0 * eps, 1, "V(J11;J12)");
    }
    if n21 > 0 {
        report.push(
            (-3.0 * n21 as f64 + n22 as f64 - n1 as f64) / n - 2.0 * eps,
            n21 - 1,
            "V(J21+;J21-)+V(J21+)+V(J21-)",
        );
    }
    if n22 > 0 {
        report.push(
            (-3.0 * n22 as f64 + n21 as f64 - n1 as f64) / n - 2.0 * eps,
            n22 - 1,
            "V(J22+;J22-)+V(J22+)+V(J22-)",
        );
    }
    if n21 > 0 && n22 > 0 {
        report.push((n2 as f64 - n1 as f64) / n - 2.0 * eps, 1, "V(J21;J22)");
    }
    report
}

/// Critical strength for a memory pair: below it every non-memory pattern is
/// linearly unstable while the memories stay stable for every positive
/// epsilon.
pub fn critical_epsilon_m2(
    xi1: &BinaryPattern,
    xi2: &BinaryPattern,
) -> Result<CriticalEpsilon> {
    let sets = index_sets_two(xi1, xi2, None)?;
    let n = sets.dim();
    let n1 = sets.i1.len();
    if n1 == 1 || n1 == n - 1 {
        Ok(CriticalEpsilon {
            value: (n - 1) as f64 / n as f64,
            regime: EpsilonRegime::Boundary,
        })
    } else {
        Ok(CriticalEpsilon {
            value: n1.min(n - n1) as f64 / n as f64,
            regime: EpsilonRegime::Generic,
        })
    }
}

/// Critical strengths of the three memories of a triple; memory `l` is
/// stable above and unstable below its value. Requires all four J-subsets
/// nonempty (the theorem hypothesis).
pub fn critical_epsilon_m3(
    xi1: &BinaryPattern,
    xi2: &BinaryPattern,
    xi3: &BinaryPattern,
) -> Result<[CriticalEpsilon; 3]> {
    let sets = index_sets_three(xi1, xi2, xi3)?;
    if !sets.all_four_nonempty() {
        return Err(ModelError::HypothesisViolated(format!(
            "J-subset cardinalities (|J11|, |J12|, |J21|, |J22|) = ({}, {}, {}, {}) must all be positive",
            sets.j11.len(),
            sets.j12.len(),
            sets.j21.len(),
            sets.j22.len()
        )));
    }
    let n = sets.dim() as f64;
    // For each memory the threshold is | |A|/N - 1/2 | where A is the
    // agreement set of the other two memories.
    let agree = |a: &BinaryPattern, b: &BinaryPattern| -> f64 {
        a.entries()
            .iter()
            .zip(b.entries())
            .filter(|(x, y)| x == y)
            .count() as f64
    };
    let values = [agree(xi2, xi3), agree(xi1, xi3), agree(xi1, xi2)];
    Ok([0, 1, 2].map(|l| CriticalEpsilon {
        value: (values[l] / n - 0.5).abs(),
        regime: EpsilonRegime::ThreeMemory(l),
    }))
}

/// Conservative lower bound on the critical strength of `eta` carried over
/// from the orthogonal-memory theory:
/// `max_l (N^2 - sum_k (xi_k . eta)^2) / (2 (N^2 - (xi_l . eta)^2))`.
/// Memories attaining |dot| = N are skipped; if none remain the bound is
/// undefined. Its lower-bound property is only guaranteed for mutually
/// orthogonal memory sets.
pub fn legacy_epsilon_lower_bound(
    memories: &[BinaryPattern],
    eta: &BinaryPattern,
) -> Result<f64> {
    if memories.is_empty() {
        return Err(ModelError::ParameterOutOfRange(
            "at least one memory required".into(),
        ));
    }
    let n2 = (eta.dim() * eta.dim()) as f64;
    let mut dots2 = Vec::with_capacity(memories.len());
    for m in memories {
        let d = m.dot(eta)? as f64;
        dots2.push(d * d);
    }
    let total: f64 = dots2.iter().sum();
    let mut best: Option<f64> = None;
    for &d2 in &dots2 {
        if d2 >= n2 {
            continue;
        }
        let candidate = (n2 - total) / (2.0 * (n2 - d2));
        best = Some(best.map_or(candidate, |b: f64| b.max(candidate)));
    }
    best.ok_or(ModelError::DegenerateOverlap)
}

/// Full spectrum of the Jacobian at `eta`, analytic where a closed form
/// exists (two memories anywhere; three memories at a memory) and numeric
/// otherwise.
pub fn spectrum(net: &HebbianNetwork, eta: &BinaryPattern) -> Result<(SpectrumReport, SpectrumSource)> {
    check_dims(net.dim(), eta.dim())?;
    match net.memory_count() {
        2 => {
            let report = if net.memory_index_of(eta)?.is_some() {
                analytic_spectrum_memory_m2(net)?
            } else {
                analytic_spectrum_pattern_m2(net, eta)?
            };
            Ok((report, SpectrumSource::AnalyticM2))
        }
        3 => match net.memory_index_of(eta)? {
            Some(l) => Ok((analytic_spectrum_memory_m3(net, l)?, SpectrumSource::AnalyticM3)),
            None => Ok((numeric_spectrum(&jacobian(net, eta)?)?, SpectrumSource::Numeric)),
        },
        _ => Ok((numeric_spectrum(&jacobian(net, eta)?)?, SpectrumSource::Numeric)),
    }
}

/// Stability verdict for the bipolar state of `eta`.
///
/// At a critical strength the verdict is Marginal by construction;
/// linearization alone cannot certify the stability the potential-continuity
/// argument provides there.
pub fn classify(net: &HebbianNetwork, eta: &BinaryPattern) -> Result<StabilityVerdict> {
    let (report, source) = spectrum(net, eta)?;
    Ok(StabilityVerdict::from_lambda(
        report.lambda_max_nonzero(),
        source,
    ))
}

/// Locates the sign change of `lambda_max_nonzero` in epsilon by bisection.
/// Requires instability at `lo` and stability at `hi`. With `force_numeric`
/// the evaluations go through the assembled Jacobian and the eigensolver,
/// independent of every closed form.
pub fn bisect_critical_epsilon(
    memories: &[BinaryPattern],
    eta: &BinaryPattern,
    lo: f64,
    hi: f64,
    tol: f64,
    force_numeric: bool,
) -> Result<f64> {
    if !(lo >= 0.0 && hi > lo && tol > 0.0) {
        return Err(ModelError::ParameterOutOfRange(format!(
            "invalid bracket [{lo}, {hi}] or tolerance {tol}"
        )));
    }
    let base = HebbianNetwork::build(memories.to_vec(), lo)?;
    let eval = |eps: f64| -> Result<f64> {
        let net = base.with_epsilon(eps)?;
        let report = if force_numeric {
            numeric_spectrum(&jacobian(&net, eta)?)?
        } else {
            spectrum(&net, eta)?.0
        };
        Ok(report.lambda_max_nonzero())
    };
    let f_lo = eval(lo)?;
    let f_hi = eval(hi)?;
    if !(f_lo > 0.0 && f_hi < 0.0) {
        return Err(ModelError::ParameterOutOfRange(format!(
            "no sign change bracketed: lambda({lo}) = {f_lo:e}, lambda({hi}) = {f_hi:e}"
        )));
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if eval(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
