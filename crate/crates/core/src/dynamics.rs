//! Time integration of the gradient flow, convergence detection, overlap and
//! phase-diameter tracing, and the exponential basin certificate.

use std::io::{self, Write};

use crate::error::{ModelError, Result};
use crate::network::{bipolar_state, overlap, HebbianNetwork, PhaseState};
use crate::pattern::{check_dims, BinaryPattern, GrayPattern};

/// Fixed-step integrator settings.
///
/// The vector field is globally bounded by `M + eps`, so the explicit scheme
/// is comfortable whenever `dt < 2 / (M + 2 eps)`; the default leaves a wide
/// margin for the memory counts used here.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_max: f64,
    /// Convergence threshold on the infinity norm of the vector field.
    pub stop_tol: f64,
    /// A sample is stored every `trace_stride` steps; the terminal state is
    /// always stored exactly.
    pub trace_stride: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: 0.05,
            t_max: 200.0,
            stop_tol: 1e-8,
            trace_stride: 10,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(ModelError::ParameterOutOfRange(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_max > 0.0) {
            return Err(ModelError::ParameterOutOfRange(format!(
                "t_max must be positive, got {}",
                self.t_max
            )));
        }
        if !(self.stop_tol > 0.0) {
            return Err(ModelError::ParameterOutOfRange(format!(
                "stop_tol must be positive, got {}",
                self.stop_tol
            )));
        }
        if self.trace_stride == 0 {
            return Err(ModelError::ParameterOutOfRange(
                "trace_stride must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// One stored snapshot along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySample {
    pub time: f64,
    pub state: PhaseState,
    /// Overlap with each memory, in memory order.
    pub overlaps: Vec<f64>,
    /// Raw phase diameter of the snapshot (no shift applied).
    pub diameter: f64,
}

/// Result of integrating the gradient flow.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub terminal: PhaseState,
    /// True when the stopping rule fired before `t_max`.
    pub converged: bool,
    pub steps: usize,
}

impl Trajectory {
    pub fn terminal_overlaps(&self, net: &HebbianNetwork) -> Result<Vec<f64>> {
        net.memories()
            .iter()
            .map(|m| overlap(&self.terminal, m))
            .collect()
    }

    /// Writes the sample table: header `t diameter m1 m2 ...`, one
    /// space-delimited row per stored sample, 9 significant digits.
    pub fn write_table(&self, w: &mut dyn Write) -> io::Result<()> {
        write!(w, "t diameter")?;
        let memories = self.samples.first().map_or(0, |s| s.overlaps.len());
        for k in 1..=memories {
            write!(w, " m{k}")?;
        }
        writeln!(w)?;
        for s in &self.samples {
            write!(w, "{:.8e} {:.8e}", s.time, s.diameter)?;
            for m in &s.overlaps {
                write!(w, " {:.8e}", m)?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Exponential contraction certificate for the basin of a memory of a
/// two-memory network.
///
/// `h` is the diameter of the initial state in coordinates shifted by the
/// memory's bipolar state — the tightest admissible bound, rather than a
/// strictly larger one. When `satisfied`, the shifted diameter obeys
/// `D(t) <= D(0) * exp(-lambda1 * t)` and never reaches pi/2.
#[derive(Debug, Clone, PartialEq)]
pub struct BasinCertificate {
    pub h: f64,
    /// Certified decay rate `4 eps cos(h) cos(h/2) / pi`; meaningful only
    /// when `satisfied`.
    pub lambda1: f64,
    pub initial_diameter: f64,
    /// Whether the hypothesis `D(0) < pi/2` holds.
    pub satisfied: bool,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Integrates the gradient flow with the classical 4th-order one-step scheme
/// at fixed `dt`, stopping once the field's infinity norm drops below
/// `stop_tol` (converged) or `t_max` is reached (not converged).
///
/// After stopping, the terminal state is re-centered so its mean phase
/// matches the initial mean; the zero shift mode would otherwise leave the
/// snapshot's gauge to rounding.
pub fn integrate(
    net: &HebbianNetwork,
    initial: &PhaseState,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    check_dims(net.dim(), initial.dim())?;
    let n = net.dim();
    let t0 = initial.time();
    let mean0 = initial.mean_phase();

    let mut ph = initial.phases().to_vec();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut stage = vec![0.0; n];

    let mut samples: Vec<TrajectorySample> = Vec::new();
    let mut steps = 0usize;
    let mut t = t0;
    let converged;

    loop {
        net.rhs_factored(&ph, &mut k1);
        if inf_norm(&k1) < cfg.stop_tol {
            // confirm against the pairwise-difference form before stopping
            let exact = net.rhs(&PhaseState::with_time(ph.clone(), t))?;
            if inf_norm(&exact) < cfg.stop_tol {
                converged = true;
                break;
            }
        }
        if t - t0 >= cfg.t_max {
            converged = false;
            break;
        }
        if steps % cfg.trace_stride == 0 {
            samples.push(make_sample(net, &ph, t)?);
        }

        let dt = cfg.dt;
        for i in 0..n {
            stage[i] = ph[i] + 0.5 * dt * k1[i];
        }
        net.rhs_factored(&stage, &mut k2);
        for i in 0..n {
            stage[i] = ph[i] + 0.5 * dt * k2[i];
        }
        net.rhs_factored(&stage, &mut k3);
        for i in 0..n {
            stage[i] = ph[i] + dt * k3[i];
        }
        net.rhs_factored(&stage, &mut k4);
        for i in 0..n {
            ph[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        steps += 1;
        t = t0 + steps as f64 * cfg.dt;
        if ph.iter().any(|p| !p.is_finite()) {
            return Err(ModelError::NonFiniteState(t));
        }
    }

    // undo shift-mode drift for reproducible snapshots
    let mean_now = ph.iter().sum::<f64>() / n as f64;
    let correction = mean0 - mean_now;
    for p in &mut ph {
        *p += correction;
    }

    let terminal = PhaseState::with_time(ph, t);
    let last_time = samples.last().map(|s| s.time);
    let terminal_sample = make_sample(net, terminal.phases(), t)?;
    if last_time == Some(t) {
        *samples.last_mut().unwrap() = terminal_sample;
    } else {
        samples.push(terminal_sample);
    }

    Ok(Trajectory {
        samples,
        terminal,
        converged,
        steps,
    })
}

fn make_sample(net: &HebbianNetwork, ph: &[f64], t: f64) -> Result<TrajectorySample> {
    let state = PhaseState::with_time(ph.to_vec(), t);
    let overlaps = net
        .memories()
        .iter()
        .map(|m| overlap(&state, m))
        .collect::<Result<Vec<f64>>>()?;
    let diameter = diameter(&state);
    Ok(TrajectorySample {
        time: t,
        state,
        overlaps,
        diameter,
    })
}

/// Phase initialization of a grayscale query: `phi_i = arccos(entry_i)`,
/// so certain cells map to 0 or pi and a masked cell (0) to pi/2.
pub fn init_from_gray(defective: &GrayPattern) -> Result<PhaseState> {
    let mut phases = Vec::with_capacity(defective.dim());
    for (index, &value) in defective.entries().iter().enumerate() {
        if !(-1.0..=1.0).contains(&value) {
            return Err(ModelError::OutOfRange { index, value });
        }
        phases.push(value.acos());
    }
    Ok(PhaseState::new(phases))
}

/// Max minus min phase, without modular wrapping: the shifted-coordinate
/// Lyapunov quantity of the basin estimate.
pub fn diameter(state: &PhaseState) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &p in state.phases() {
        lo = lo.min(p);
        hi = hi.max(p);
    }
    if state.phases().is_empty() {
        0.0
    } else {
        hi - lo
    }
}

/// The state expressed in coordinates shifted by the bipolar state of
/// `memory`, i.e. `phi_i - phi*_i(memory)`.
pub fn shifted_state(state: &PhaseState, memory: &BinaryPattern) -> Result<PhaseState> {
    check_dims(state.dim(), memory.dim())?;
    let anchor = bipolar_state(memory);
    Ok(PhaseState::with_time(
        state
            .phases()
            .iter()
            .zip(anchor.phases())
            .map(|(p, a)| p - a)
            .collect(),
        state.time(),
    ))
}

/// Builds the basin certificate for memory `memory_index` (0-based) of a
/// two-memory network, evaluated at `initial`.
pub fn basin_certificate(
    net: &HebbianNetwork,
    memory_index: usize,
    initial: &PhaseState,
) -> Result<BasinCertificate> {
    if net.memory_count() != 2 {
        return Err(ModelError::WrongMemoryCount {
            expected: 2,
            found: net.memory_count(),
        });
    }
    if memory_index >= 2 {
        return Err(ModelError::ParameterOutOfRange(format!(
            "memory index must be 0 or 1, got {memory_index}"
        )));
    }
    check_dims(net.dim(), initial.dim())?;
    let shifted = shifted_state(initial, &net.memories()[memory_index])?;
    let h = diameter(&shifted);
    let lambda1 = 4.0 * net.epsilon() * h.cos() * (0.5 * h).cos() / std::f64::consts::PI;
    Ok(BasinCertificate {
        h,
        lambda1,
        initial_diameter: h,
        satisfied: h < std::f64::consts::FRAC_PI_2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pat(s: &str) -> BinaryPattern {
        BinaryPattern::from_pm_str(s).unwrap()
    }

    fn block_net(eps: f64) -> HebbianNetwork {
        HebbianNetwork::build(vec![pat("++++++"), pat("+++---")], eps).unwrap()
    }

    #[test]
    fn equilibrium_converges_at_step_zero() {
        let net = block_net(0.25);
        let init = bipolar_state(&pat("++++++"));
        let traj = integrate(&net, &init, &IntegratorConfig::default()).unwrap();
        assert!(traj.converged);
        assert_eq!(traj.steps, 0);
        assert_eq!(traj.terminal, init);
        assert_eq!(traj.samples.len(), 1);
    }

    #[test]
    fn flipped_pattern_flows_back_to_the_memory() {
        let net = block_net(0.25);
        // xi1 with two entries flipped, as a grayscale query
        let defective = GrayPattern::new(vec![-1.0, 1.0, 1.0, 1.0, -1.0, 1.0]).unwrap();
        let init = init_from_gray(&defective).unwrap();
        let traj = integrate(&net, &init, &IntegratorConfig::default()).unwrap();
        assert!(traj.converged);
        let m = traj.terminal_overlaps(&net).unwrap();
        assert!(m[0] > 0.999, "terminal overlap with xi1 was {}", m[0]);
    }

    #[test]
    fn potential_never_increases_along_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..5 {
            let net = block_net(rng.gen_range(0.05..0.6));
            let init = PhaseState::new((0..6).map(|_| rng.gen_range(0.0..3.14)).collect());
            let traj = integrate(&net, &init, &IntegratorConfig::default()).unwrap();
            let mut prev = f64::INFINITY;
            for s in &traj.samples {
                let f = net.potential(&s.state).unwrap();
                assert!(f <= prev + 1e-9, "potential rose: {prev} -> {f}");
                prev = f;
            }
        }
    }

    #[test]
    fn converged_terminal_satisfies_the_stopping_rule() {
        let net = block_net(0.3);
        let init = PhaseState::new(vec![0.3, 0.1, 2.8, 3.0, 0.2, 2.9]);
        let cfg = IntegratorConfig::default();
        let traj = integrate(&net, &init, &cfg).unwrap();
        assert!(traj.converged);
        let r = net.rhs(&traj.terminal).unwrap();
        assert!(inf_norm(&r) < cfg.stop_tol);
        // times strictly increasing
        for w in traj.samples.windows(2) {
            assert!(w[1].time > w[0].time);
        }
        // mean phase preserved through re-centering
        assert!((traj.terminal.mean_phase() - init.mean_phase()).abs() < 1e-9);
    }

    #[test]
    fn t_max_cuts_off_without_convergence() {
        let net = block_net(0.25);
        let init = PhaseState::new(vec![0.4, 1.1, 2.2, 0.6, 1.9, 2.5]);
        let cfg = IntegratorConfig {
            t_max: 0.2,
            ..Default::default()
        };
        let traj = integrate(&net, &init, &cfg).unwrap();
        assert!(!traj.converged);
        assert_eq!(traj.steps, 4);
    }

    #[test]
    fn absurd_step_size_trips_the_finiteness_guard() {
        let net = block_net(0.25);
        let init = PhaseState::new(vec![0.4, 1.1, 2.2, 0.6, 1.9, 2.5]);
        let cfg = IntegratorConfig {
            dt: 1e300,
            t_max: 1e301,
            ..Default::default()
        };
        assert!(matches!(
            integrate(&net, &init, &cfg),
            Err(ModelError::NonFiniteState(_))
        ));
    }

    #[test]
    fn gray_initialization_maps_endpoints_and_zero() {
        let g = GrayPattern::new(vec![1.0, -1.0, 0.0]).unwrap();
        let st = init_from_gray(&g).unwrap();
        assert_eq!(st.phases()[0], 0.0);
        assert!((st.phases()[1] - std::f64::consts::PI).abs() < 1e-15);
        assert!((st.phases()[2] - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn diameter_examples() {
        assert_eq!(diameter(&PhaseState::new(vec![1.7; 5])), 0.0);
        let st = PhaseState::new(vec![0.0, std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_2]);
        assert!((diameter(&st) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert_eq!(diameter(&st.translated(3.3)), diameter(&st));
    }

    #[test]
    fn certificate_formula_and_hypothesis_gate() {
        let net = block_net(0.5);
        // initial = phi*(xi1) + ramp of diameter pi/3
        let anchor = bipolar_state(&pat("++++++"));
        let h = std::f64::consts::FRAC_PI_3;
        let ph: Vec<f64> = (0..6)
            .map(|i| anchor.phases()[i] + h * i as f64 / 5.0)
            .collect();
        let cert = basin_certificate(&net, 0, &PhaseState::new(ph)).unwrap();
        assert!(cert.satisfied);
        assert!((cert.h - h).abs() < 1e-12);
        let expect = 3.0_f64.sqrt() / 2.0 / std::f64::consts::PI;
        assert!((cert.lambda1 - expect).abs() < 1e-12, "{}", cert.lambda1);

        // diameter at or beyond pi/2 voids the promise
        let wide: Vec<f64> = (0..6)
            .map(|i| anchor.phases()[i] + 1.6 * i as f64 / 5.0)
            .collect();
        let cert = basin_certificate(&net, 0, &PhaseState::new(wide)).unwrap();
        assert!(!cert.satisfied);

        assert!(matches!(
            basin_certificate(
                &HebbianNetwork::build(vec![pat("++-")], 0.1).unwrap(),
                0,
                &PhaseState::new(vec![0.0; 3])
            ),
            Err(ModelError::WrongMemoryCount { .. })
        ));
    }

    #[test]
    fn certified_decay_holds_along_the_flow() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for &eps in &[0.25, 0.5] {
            let net = block_net(eps);
            let anchor = bipolar_state(&pat("+++---"));
            let spread: Vec<f64> = (0..6).map(|_| rng.gen_range(0.0..1.0)).collect();
            let (lo, hi) = spread
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| {
                    (l.min(x), h.max(x))
                });
            let target = 1.2;
            let ph: Vec<f64> = (0..6)
                .map(|i| anchor.phases()[i] + (spread[i] - lo) * target / (hi - lo))
                .collect();
            let init = PhaseState::new(ph);
            let cert = basin_certificate(&net, 1, &init).unwrap();
            assert!(cert.satisfied);

            let traj = integrate(&net, &init, &IntegratorConfig::default()).unwrap();
            for s in &traj.samples {
                let d = diameter(&shifted_state(&s.state, &pat("+++---")).unwrap());
                let bound = cert.initial_diameter * (-cert.lambda1 * (s.time)).exp();
                assert!(d <= bound + 1e-6, "t = {}: {d} > {bound}", s.time);
                assert!(d < std::f64::consts::FRAC_PI_2);
            }
        }
    }

    #[test]
    fn table_export_shape() {
        let net = block_net(0.25);
        let init = PhaseState::new(vec![0.3, 0.0, 0.1, 2.9, 3.0, 3.1]);
        let traj = integrate(&net, &init, &IntegratorConfig::default()).unwrap();
        let mut buf = Vec::new();
        traj.write_table(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t diameter m1 m2");
        for line in lines {
            assert_eq!(line.split_whitespace().count(), 4);
        }
    }
}
