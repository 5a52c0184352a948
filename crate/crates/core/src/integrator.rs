//! Adaptive integration of the reduced and full systems with trajectory
//! recording and event detection.
//!
//! The default stepper is the Dormand-Prince 5(4) embedded pair with its
//! fourth-order dense output; a fixed-step classical RK4 (with cubic
//! Hermite dense output) is available for reproducibility studies. Event
//! functions are sampled on a sub-step grid of the dense output and sign
//! changes are polished by bisection to a time accuracy of 1e-9, so event
//! locations do not depend on the recording stride.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::model::{rhs_full_raw, rhs_reduced_raw, FullState, NoiseSpec, ReducedState, SystemParams};
use crate::{Error, Result};

/// Time accuracy of event localization.
const EVENT_TIME_TOL: f64 = 1e-9;
/// Residual target for the event condition at the recorded state.
const EVENT_VALUE_TOL: f64 = 1e-8;
/// Interior points per step checked for event sign changes.
const EVENT_SUBDIV: usize = 4;

/// Stepper selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Method {
    /// Adaptive Dormand-Prince 5(4).
    Dopri5,
    /// Classical fixed-step RK4 with the given step.
    FixedRk4 { h: f64 },
}

/// Step control and recording configuration.
///
/// Tolerances bound the local error per unit step, so they act as a drift
/// rate: a horizon of 1e3 at `rel_tol` 1e-9 keeps conserved quantities
/// near 1e-6 relative. Because the control divides by the step size,
/// relative tolerances below ~1e-10 hit the f64 roundoff floor and the
/// step controller reports underflow instead of silently stalling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Integration horizon.
    pub max_tau: f64,
    /// Recording stride; 0 records every accepted step, infinity records
    /// only the endpoints.
    pub sample_interval: f64,
    pub method: Method,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-11,
            max_step: 1.0,
            max_tau: 1e3,
            sample_interval: 0.1,
            method: Method::Dopri5,
        }
    }
}

impl IntegratorConfig {
    pub fn with_horizon(max_tau: f64) -> Self {
        Self { max_tau, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidParams("tolerances must be > 0".into()));
        }
        if !(self.max_tau > 0.0) {
            return Err(Error::InvalidParams("max_tau must be > 0".into()));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::InvalidParams("max_step must be > 0".into()));
        }
        if self.sample_interval < 0.0 || self.sample_interval.is_nan() {
            return Err(Error::InvalidParams("sample_interval must be >= 0".into()));
        }
        if let Method::FixedRk4 { h } = self.method {
            if !(h > 0.0) {
                return Err(Error::InvalidParams("fixed step must be > 0".into()));
            }
        }
        Ok(())
    }
}

/// Sign-change direction an event responds to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Rising,
    Falling,
    Any,
}

/// What happens when an event fires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventAction {
    Record,
    Stop,
}

/// Scalar event function; an event fires when it crosses zero.
#[derive(Clone)]
pub enum EventKind {
    /// cos ξ = 0: the atom passes a node of the standing wave.
    NodeCrossing,
    /// u = 0 with du/dτ > 0: the Poincaré section used for attractor
    /// classification and bifurcation diagrams.
    SectionU0,
    /// |ξ| reaches the given position (detectors at ±position).
    DetectorHit { position: f64 },
    /// Caller-supplied scalar function of (τ, state).
    Custom {
        label: String,
        f: Arc<dyn Fn(f64, &ReducedState) -> f64 + Send + Sync>,
    },
}

impl EventKind {
    pub fn label(&self) -> &str {
        match self {
            EventKind::NodeCrossing => "node",
            EventKind::SectionU0 => "section_u0",
            EventKind::DetectorHit { .. } => "detector",
            EventKind::Custom { label, .. } => label,
        }
    }

    fn eval(&self, tau: f64, s: &ReducedState) -> f64 {
        match self {
            EventKind::NodeCrossing => s.xi.cos(),
            EventKind::SectionU0 => s.u,
            EventKind::DetectorHit { position } => s.xi * s.xi - position * position,
            EventKind::Custom { f, .. } => f(tau, s),
        }
    }

    /// Structural equality (custom events compare by label).
    pub fn matches(&self, other: &EventKind) -> bool {
        match (self, other) {
            (EventKind::NodeCrossing, EventKind::NodeCrossing) => true,
            (EventKind::SectionU0, EventKind::SectionU0) => true,
            (EventKind::DetectorHit { position: a }, EventKind::DetectorHit { position: b }) => {
                a == b
            }
            (EventKind::Custom { label: a, .. }, EventKind::Custom { label: b, .. }) => a == b,
            _ => false,
        }
    }
}

impl fmt::Debug for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EventKind({})", self.label())
    }
}

/// An event detector: kind, direction filter, and firing action.
#[derive(Debug, Clone)]
pub struct EventSpec {
    pub kind: EventKind,
    pub direction: Direction,
    pub action: EventAction,
}

impl EventSpec {
    pub fn node_crossing() -> Self {
        Self { kind: EventKind::NodeCrossing, direction: Direction::Any, action: EventAction::Record }
    }

    pub fn section_u0() -> Self {
        Self { kind: EventKind::SectionU0, direction: Direction::Rising, action: EventAction::Record }
    }

    /// Detector pair at ξ = ±position; stops the integration when hit.
    pub fn detector(position: f64) -> Self {
        Self {
            kind: EventKind::DetectorHit { position },
            direction: Direction::Rising,
            action: EventAction::Stop,
        }
    }

    pub fn custom(
        label: impl Into<String>,
        direction: Direction,
        f: impl Fn(f64, &ReducedState) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            kind: EventKind::Custom { label: label.into(), f: Arc::new(f) },
            direction,
            action: EventAction::Record,
        }
    }

    fn accepts(&self, g_left: f64, g_right: f64) -> bool {
        match self.direction {
            Direction::Rising => g_left < 0.0 && g_right >= 0.0,
            Direction::Falling => g_left > 0.0 && g_right <= 0.0,
            Direction::Any => (g_left < 0.0) != (g_right < 0.0) || (g_left != 0.0 && g_right == 0.0),
        }
    }
}

/// A located event occurrence.
#[derive(Debug, Clone)]
pub struct Event {
    /// Index into the event spec list passed to [`integrate`].
    pub spec_index: usize,
    pub label: String,
    pub tau: f64,
    pub state: ReducedState,
}

/// Recorded trajectory: sampled states plus located events, all in the
/// reduced coordinates (full-system runs are projected).
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ReducedState>,
    pub events: Vec<Event>,
    /// Whether the run ended early on a Stop event.
    pub stopped: bool,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory has at least the initial sample")
    }

    pub fn final_state(&self) -> ReducedState {
        *self.states.last().expect("trajectory has at least the initial sample")
    }

    /// Events produced by the spec at `spec_index`.
    pub fn events_of(&self, spec_index: usize) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(move |e| e.spec_index == spec_index)
    }
}

/// Event states matching the given spec (kind and direction as passed to
/// the integration), in time order.
pub fn section_points(traj: &Trajectory, spec: &EventSpec) -> Vec<ReducedState> {
    traj.events
        .iter()
        .filter(|e| e.label == spec.kind.label())
        .map(|e| e.state)
        .collect()
}

/// Integrate the reduced system.
pub fn integrate(
    s0: &ReducedState,
    prm: &SystemParams,
    cfg: &IntegratorConfig,
    events: &[EventSpec],
    noise: Option<&NoiseSpec>,
) -> Result<Trajectory> {
    cfg.validate()?;
    prm.validate()?;
    if !s0.is_finite() {
        return Err(Error::NonFiniteState(format!("{s0:?}")));
    }
    let noise = noise.map(|n| n.build()).transpose()?;
    let prm = *prm;
    match &noise {
        Some(nf) => {
            let rhs = move |t: f64, y: &[f64; 5]| {
                let mut d = rhs_reduced_raw(y, &prm);
                d[1] += nf.eval(t);
                d
            };
            drive(&rhs, s0.to_array(), cfg, &|y| ReducedState::from_array(*y), events)
        }
        None => {
            let rhs = move |_t: f64, y: &[f64; 5]| rhs_reduced_raw(y, &prm);
            drive(&rhs, s0.to_array(), cfg, &|y| ReducedState::from_array(*y), events)
        }
    }
}

/// Integrate the full pumped-cavity system; the recorded trajectory and
/// all event functions live on the projected reduced coordinates.
pub fn integrate_full(
    s0: &FullState,
    prm: &SystemParams,
    cfg: &IntegratorConfig,
    events: &[EventSpec],
    noise: Option<&NoiseSpec>,
) -> Result<Trajectory> {
    cfg.validate()?;
    prm.validate()?;
    if !s0.is_finite() {
        return Err(Error::NonFiniteState(format!("{s0:?}")));
    }
    let noise = noise.map(|n| n.build()).transpose()?;
    let prm = *prm;
    let project = |y: &[f64; 7]| FullState::from_array(*y).project_reduced();
    match &noise {
        Some(nf) => {
            let rhs = move |t: f64, y: &[f64; 7]| {
                let mut d = rhs_full_raw(y, &prm, t);
                d[1] += nf.eval(t);
                d
            };
            drive(&rhs, s0.to_array(), cfg, &project, events)
        }
        None => {
            let rhs = move |t: f64, y: &[f64; 7]| rhs_full_raw(y, &prm, t);
            drive(&rhs, s0.to_array(), cfg, &project, events)
        }
    }
}

/// Terminal state after integrating the reduced system for `tau` time
/// units, with no recording. Used by hot loops (Lyapunov accumulation,
/// basin scans).
pub fn propagate(
    s0: &ReducedState,
    prm: &SystemParams,
    tau: f64,
    cfg: &IntegratorConfig,
) -> Result<ReducedState> {
    let mut cfg = *cfg;
    cfg.max_tau = tau;
    cfg.sample_interval = f64::INFINITY;
    let traj = integrate(s0, prm, &cfg, &[], None)?;
    Ok(traj.final_state())
}

// ---------------------------------------------------------------------------
// Core driver, generic over the state dimension.

/// Dormand-Prince 5(4) coefficients.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Error weights b - b̂ (uses the FSAL stage k7).
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
/// Dense-output weights for the fifth contribution.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Dense-output polynomial for one accepted step,
/// y(t0 + θh) = c1 + θ(c2 + (1−θ)(c3 + θ(c4 + (1−θ)c5))).
struct DenseStep<const N: usize> {
    t0: f64,
    h: f64,
    cont: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    fn eval(&self, t: f64) -> [f64; N] {
        let theta = ((t - self.t0) / self.h).clamp(0.0, 1.0);
        let theta1 = 1.0 - theta;
        let mut y = [0.0; N];
        for i in 0..N {
            y[i] = self.cont[0][i]
                + theta
                    * (self.cont[1][i]
                        + theta1
                            * (self.cont[2][i]
                                + theta * (self.cont[3][i] + theta1 * self.cont[4][i])));
        }
        y
    }
}

struct StepOutcome<const N: usize> {
    y1: [f64; N],
    f1: [f64; N],
    dense: DenseStep<N>,
}

/// One Dopri5 attempt; returns the error norm alongside the candidate step.
fn dopri5_step<const N: usize>(
    rhs: &impl Fn(f64, &[f64; N]) -> [f64; N],
    t: f64,
    y: &[f64; N],
    f0: &[f64; N],
    h: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> (StepOutcome<N>, f64) {
    let mut k = [[0.0; N]; 7];
    k[0] = *f0;
    for s in 1..6 {
        let mut ys = *y;
        for i in 0..N {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate().take(s) {
                acc += A[s][j] * kj[i];
            }
            ys[i] += h * acc;
        }
        k[s] = rhs(t + C[s] * h, &ys);
    }
    // sixth stage lands on t + h and doubles as the solution
    let mut y1 = *y;
    for i in 0..N {
        let mut acc = 0.0;
        for (j, kj) in k.iter().enumerate().take(6) {
            acc += A[6][j] * kj[i];
        }
        y1[i] += h * acc;
    }
    k[6] = rhs(t + h, &y1);

    // error per unit step: the tolerance bounds the accumulation rate, so
    // a run over tau ~ 1e3 at rel_tol 1e-9 keeps its global drift near 1e-6
    let mut err_sq = 0.0;
    for i in 0..N {
        let mut e = 0.0;
        for (j, kj) in k.iter().enumerate() {
            e += E[j] * kj[i];
        }
        let sc = abs_tol + rel_tol * y[i].abs().max(y1[i].abs());
        let r = e / sc;
        err_sq += r * r;
    }
    let err = (err_sq / N as f64).sqrt();

    let mut cont = [[0.0; N]; 5];
    for i in 0..N {
        let ydiff = y1[i] - y[i];
        let bspl = h * k[0][i] - ydiff;
        cont[0][i] = y[i];
        cont[1][i] = ydiff;
        cont[2][i] = bspl;
        cont[3][i] = ydiff - h * k[6][i] - bspl;
        let mut d = 0.0;
        for (j, kj) in k.iter().enumerate() {
            d += D[j] * kj[i];
        }
        cont[4][i] = h * d;
    }
    (
        StepOutcome { y1, f1: k[6], dense: DenseStep { t0: t, h, cont } },
        err,
    )
}

/// Classical RK4 step with cubic Hermite dense output.
fn rk4_step<const N: usize>(
    rhs: &impl Fn(f64, &[f64; N]) -> [f64; N],
    t: f64,
    y: &[f64; N],
    f0: &[f64; N],
    h: f64,
) -> StepOutcome<N> {
    let mut y2 = *y;
    for i in 0..N {
        y2[i] += 0.5 * h * f0[i];
    }
    let k2 = rhs(t + 0.5 * h, &y2);
    let mut y3 = *y;
    for i in 0..N {
        y3[i] += 0.5 * h * k2[i];
    }
    let k3 = rhs(t + 0.5 * h, &y3);
    let mut y4 = *y;
    for i in 0..N {
        y4[i] += h * k3[i];
    }
    let k4 = rhs(t + h, &y4);
    let mut y1 = *y;
    for i in 0..N {
        y1[i] += h / 6.0 * (f0[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    let f1 = rhs(t + h, &y1);
    let mut cont = [[0.0; N]; 5];
    for i in 0..N {
        let ydiff = y1[i] - y[i];
        let bspl = h * f0[i] - ydiff;
        cont[0][i] = y[i];
        cont[1][i] = ydiff;
        cont[2][i] = bspl;
        cont[3][i] = ydiff - h * f1[i] - bspl;
        cont[4][i] = 0.0;
    }
    StepOutcome { y1, f1, dense: DenseStep { t0: t, h, cont } }
}

/// Hairer's starting-step heuristic.
fn initial_step<const N: usize>(
    rhs: &impl Fn(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    y0: &[f64; N],
    f0: &[f64; N],
    cfg: &IntegratorConfig,
) -> f64 {
    let sc: Vec<f64> = y0.iter().map(|y| cfg.abs_tol + cfg.rel_tol * y.abs()).collect();
    let norm = |v: &[f64; N]| -> f64 {
        (v.iter().zip(&sc).map(|(x, s)| (x / s) * (x / s)).sum::<f64>() / N as f64).sqrt()
    };
    let d0 = norm(y0);
    let d1 = norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let mut y1 = *y0;
    for i in 0..N {
        y1[i] += h0 * f0[i];
    }
    let f1 = rhs(t0 + h0, &y1);
    let mut diff = [0.0; N];
    for i in 0..N {
        diff[i] = f1[i] - f0[i];
    }
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(cfg.max_step).min(cfg.max_tau)
}

fn drive<const N: usize>(
    rhs: &impl Fn(f64, &[f64; N]) -> [f64; N],
    y0: [f64; N],
    cfg: &IntegratorConfig,
    project: &impl Fn(&[f64; N]) -> ReducedState,
    events: &[EventSpec],
) -> Result<Trajectory> {
    let t_end = cfg.max_tau;
    let mut t = 0.0;
    let mut y = y0;
    let mut f = rhs(t, &y);
    if f.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteState(format!("initial derivative at {y:?}")));
    }

    let mut traj = Trajectory::default();
    traj.times.push(t);
    traj.states.push(project(&y));

    // event function values at the current time
    let mut g_prev: Vec<f64> = {
        let s = project(&y);
        events.iter().map(|e| e.kind.eval(t, &s)).collect()
    };

    let every_step = cfg.sample_interval == 0.0;
    let mut next_sample = if every_step || !cfg.sample_interval.is_finite() {
        f64::INFINITY
    } else {
        cfg.sample_interval
    };

    let mut h = match cfg.method {
        Method::Dopri5 => initial_step(rhs, t, &y, &f, cfg),
        Method::FixedRk4 { h } => h.min(t_end),
    };
    let mut facmax = 10.0;

    while t < t_end {
        h = h.min(t_end - t);
        let outcome = match cfg.method {
            Method::Dopri5 => {
                let (outcome, err) = dopri5_step(rhs, t, &y, &f, h, cfg.rel_tol, cfg.abs_tol);
                if !err.is_finite() || outcome.y1.iter().any(|x| !x.is_finite()) {
                    // retry with a smaller step before declaring blowup
                    h *= 0.1;
                    if h < 1e-14 * t.abs().max(1.0) {
                        return Err(Error::StepUnderflow { tau: t, last_state: y.to_vec() });
                    }
                    facmax = 1.0;
                    continue;
                }
                if err > 1.0 {
                    h *= (0.9 * err.powf(-0.25)).max(0.2);
                    if h < 1e-14 * t.abs().max(1.0) {
                        return Err(Error::StepUnderflow { tau: t, last_state: y.to_vec() });
                    }
                    facmax = 1.0;
                    continue;
                }
                let fac = (0.9 * err.powf(-0.25)).clamp(0.2, facmax);
                facmax = 10.0;
                let h_next = (h * fac).min(cfg.max_step);
                let o = outcome;
                h = h_next;
                o
            }
            Method::FixedRk4 { .. } => {
                let o = rk4_step(rhs, t, &y, &f, h);
                if o.y1.iter().any(|x| !x.is_finite()) {
                    return Err(Error::NonFiniteState(format!("at tau = {}", t + h)));
                }
                o
            }
        };

        let step_t0 = outcome.dense.t0;
        let step_h = outcome.dense.h;
        let step_end = step_t0 + step_h;

        // locate events inside the step on the dense output
        let mut stop_at: Option<f64> = None;
        if !events.is_empty() {
            let mut found: Vec<Event> = Vec::new();
            let mut g_right_end = g_prev.clone();
            for (ei, spec) in events.iter().enumerate() {
                let mut t_left = step_t0;
                let mut g_left = g_prev[ei];
                for sub in 1..=EVENT_SUBDIV {
                    let t_right = step_t0 + step_h * sub as f64 / EVENT_SUBDIV as f64;
                    let s_right = project(&outcome.dense.eval(t_right));
                    let g_right = spec.kind.eval(t_right, &s_right);
                    if spec.accepts(g_left, g_right) {
                        let (te, se) = locate_event(
                            spec,
                            &outcome.dense,
                            project,
                            t_left,
                            t_right,
                            g_left,
                            g_right,
                        );
                        found.push(Event {
                            spec_index: ei,
                            label: spec.kind.label().to_string(),
                            tau: te,
                            state: se,
                        });
                    }
                    t_left = t_right;
                    g_left = g_right;
                }
                g_right_end[ei] = g_left;
            }
            found.sort_by(|a, b| a.tau.total_cmp(&b.tau).then(a.spec_index.cmp(&b.spec_index)));
            for ev in found {
                if let Some(ts) = stop_at {
                    if ev.tau > ts {
                        break;
                    }
                }
                let stops = events[ev.spec_index].action == EventAction::Stop;
                let ev_tau = ev.tau;
                traj.events.push(ev);
                if stops {
                    stop_at = Some(ev_tau);
                }
            }
            g_prev = g_right_end;
        }

        let record_until = stop_at.unwrap_or(step_end);

        // record scheduled samples inside the step
        if every_step {
            if record_until >= step_end {
                traj.times.push(step_end);
                traj.states.push(project(&outcome.y1));
            }
        } else {
            while next_sample <= record_until + 1e-12 * record_until.abs().max(1.0) {
                if next_sample > step_end {
                    break;
                }
                let ys = outcome.dense.eval(next_sample);
                traj.times.push(next_sample);
                traj.states.push(project(&ys));
                next_sample += cfg.sample_interval;
            }
        }

        if let Some(ts) = stop_at {
            let ys = outcome.dense.eval(ts);
            if traj.final_time() < ts {
                traj.times.push(ts);
                traj.states.push(project(&ys));
            }
            traj.stopped = true;
            return Ok(traj);
        }

        t = step_end;
        y = outcome.y1;
        f = outcome.f1;
    }

    if traj.final_time() < t {
        traj.times.push(t);
        traj.states.push(project(&y));
    }
    Ok(traj)
}

/// Bisection on the dense output; ties at the bracket boundary resolve to
/// the earlier time.
fn locate_event<const N: usize>(
    spec: &EventSpec,
    dense: &DenseStep<N>,
    project: &impl Fn(&[f64; N]) -> ReducedState,
    mut a: f64,
    mut b: f64,
    g_a: f64,
    _g_b: f64,
) -> (f64, ReducedState) {
    if g_a == 0.0 {
        return (a, project(&dense.eval(a)));
    }
    let left_sign = g_a < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let s = project(&dense.eval(mid));
        let g = spec.kind.eval(mid, &s);
        if (g < 0.0) == left_sign && g != 0.0 {
            a = mid;
        } else {
            b = mid;
        }
        if b - a < EVENT_TIME_TOL {
            let sb = project(&dense.eval(b));
            if spec.kind.eval(b, &sb).abs() <= EVENT_VALUE_TOL {
                break;
            }
        }
    }
    let state = project(&dense.eval(b));
    (b, state)
}
