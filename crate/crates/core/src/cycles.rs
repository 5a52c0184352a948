//! Long-term attractor classification (limit-cycle period, chaos),
//! bifurcation diagrams over the photon number, and the (n, δ)
//! synchronization map.
//!
//! The period of a limit cycle is counted operationally on the u = 0
//! (rising) Poincaré section: after the transient, the section points of a
//! period-m cycle form exactly m clusters, stable across two consecutive
//! observation windows. Slowly converging cells extend their transient by
//! doubling; cells whose clusters never stabilize are tested for chaos via
//! the maximal Lyapunov exponent.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chaos::{grid_values, max_lyapunov, LyapunovConfig};
use crate::integrator::{integrate, EventSpec, IntegratorConfig};
use crate::model::{NoiseSpec, ReducedState};
use crate::{Error, Result, SystemParams};

/// Attractor categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AttractorKind {
    Period(u32),
    Chaotic,
    Unresolved,
}

/// Classification result with its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttractorLabel {
    pub kind: AttractorKind,
    /// Lyapunov estimate, when one was computed.
    pub lambda: Option<f64>,
    /// Cluster count observed in the last window pair.
    pub cluster_count: usize,
    /// Transient actually discarded before the decisive windows.
    pub transient_used: f64,
}

impl AttractorLabel {
    /// Map category code: 1, 2, 3 for those periods, 4 for periods 4-12,
    /// 5 for chaos, 0 for unresolved.
    pub fn category(&self) -> u8 {
        match self.kind {
            AttractorKind::Period(1) => 1,
            AttractorKind::Period(2) => 2,
            AttractorKind::Period(3) => 3,
            AttractorKind::Period(_) => 4,
            AttractorKind::Chaotic => 5,
            AttractorKind::Unresolved => 0,
        }
    }
}

/// Classification protocol parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyConfig {
    /// Initial transient.
    pub transient: f64,
    /// Transient budget: doubled on slow convergence up to this value.
    pub max_transient: f64,
    /// Length (time) of one observation window; stability requires two.
    pub window: f64,
    /// Cluster merge tolerance after per-coordinate scaling.
    pub cluster_eps: f64,
    /// Highest period reported; more clusters mean chaos or unresolved.
    pub max_period: usize,
    /// Chaos threshold on the maximal Lyapunov exponent.
    pub lambda_min: f64,
    /// Accumulation horizon of the Lyapunov fallback.
    pub lyap_horizon: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            transient: 2e3,
            max_transient: 1.6e4,
            window: 400.0,
            cluster_eps: 1e-3,
            max_period: 12,
            lambda_min: 0.01,
            lyap_horizon: 1e4,
            rel_tol: 1e-9,
            abs_tol: 1e-11,
        }
    }
}

impl ClassifyConfig {
    /// Cheaper settings for large grids (basin maps): shorter transient
    /// budget, smaller windows, relaxed tolerance, short Lyapunov run.
    pub fn coarse() -> Self {
        Self {
            transient: 1000.0,
            max_transient: 8000.0,
            window: 250.0,
            lyap_horizon: 1500.0,
            rel_tol: 1e-7,
            abs_tol: 1e-9,
            ..Self::default()
        }
    }

    fn integrator(&self, span: f64) -> IntegratorConfig {
        IntegratorConfig {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_tau: span,
            sample_interval: f64::INFINITY,
            ..IntegratorConfig::default()
        }
    }
}

/// Section-point coordinates used for clustering: ξ enters as
/// (cos ξ, sin ξ) so ballistic cycles cluster like trapped ones; u is
/// omitted (it is zero on the section by construction).
fn section_coords(s: &ReducedState) -> [f64; 5] {
    [s.xi.cos(), s.xi.sin(), s.p, s.v, s.z]
}

/// Single-linkage clustering after per-coordinate scaling.
///
/// The scale of each coordinate is its standard deviation over the window,
/// floored at a small fraction of its magnitude so that a fully converged
/// cycle (all points numerically identical) is one cluster rather than
/// amplified jitter.
pub(crate) fn cluster_labels(points: &[[f64; 5]], eps: f64) -> (usize, Vec<usize>) {
    let n = points.len();
    if n == 0 {
        return (0, Vec::new());
    }
    let mut mean = [0.0f64; 5];
    for p in points {
        for i in 0..5 {
            mean[i] += p[i];
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let mut var = [0.0f64; 5];
    for p in points {
        for i in 0..5 {
            let d = p[i] - mean[i];
            var[i] += d * d;
        }
    }
    // floor the scale at 1e-3 of the coordinate's natural magnitude
    // ((cos, sin) and z are order one, p and v at least order one), so a
    // converged cycle whose points are numerically identical stays one
    // cluster instead of having its jitter amplified to unit size
    let mut scale = [0.0f64; 5];
    for i in 0..5 {
        let std = (var[i] / n as f64).sqrt();
        let typical = match i {
            2 | 3 => mean[i].abs().max(1.0),
            _ => 1.0,
        };
        scale[i] = std.max(1e-3 * typical);
    }

    fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut parent: Vec<usize> = (0..n).collect();
    let eps_sq = eps * eps;
    for i in 0..n {
        for j in (i + 1)..n {
            let mut d = 0.0;
            for k in 0..5 {
                let r = (points[i][k] - points[j][k]) / scale[k];
                d += r * r;
                if d > eps_sq {
                    break;
                }
            }
            if d <= eps_sq {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut labels = vec![usize::MAX; n];
    let mut count = 0;
    for i in 0..n {
        let root = find(&mut parent, i);
        if labels[root] == usize::MAX {
            labels[root] = count;
            count += 1;
        }
    }
    let assignment: Vec<usize> = (0..n).map(|i| labels[find(&mut parent, i)]).collect();
    (count, assignment)
}

struct Observation {
    label: AttractorLabel,
    /// Rising-section states of the decisive window pair, in time order.
    window_states: Vec<ReducedState>,
    /// Negative v values at u = 0 crossings (either direction) in the
    /// decisive window pair: the bifurcation-diagram observable.
    v_negative: Vec<f64>,
}

fn observe(prm: &SystemParams, s0: &ReducedState, cfg: &ClassifyConfig) -> Result<Observation> {
    observe_with_noise(prm, s0, cfg, None)
}

fn observe_with_noise(
    prm: &SystemParams,
    s0: &ReducedState,
    cfg: &ClassifyConfig,
    noise: Option<&NoiseSpec>,
) -> Result<Observation> {
    let section_any = EventSpec {
        direction: crate::integrator::Direction::Any,
        ..EventSpec::section_u0()
    };
    let mut state = integrate(s0, prm, &cfg.integrator(cfg.transient), &[], noise)?.final_state();
    let mut transient_used = cfg.transient;

    loop {
        let span = 2.0 * cfg.window;
        let traj = integrate(&state, prm, &cfg.integrator(span), &[section_any.clone()], noise)?;
        state = traj.final_state();

        // split u=0 crossings by direction: rising means du/dtau = delta*v > 0
        let rising: Vec<&crate::integrator::Event> = traj
            .events
            .iter()
            .filter(|e| prm.delta * e.state.v > 0.0)
            .collect();
        let v_negative: Vec<f64> = traj
            .events
            .iter()
            .filter(|e| e.state.v < 0.0)
            .map(|e| e.state.v)
            .collect();

        let half = cfg.window;
        let w1: Vec<[f64; 5]> = rising
            .iter()
            .filter(|e| e.tau < half)
            .map(|e| section_coords(&e.state))
            .collect();
        let w2: Vec<[f64; 5]> = rising
            .iter()
            .filter(|e| e.tau >= half)
            .map(|e| section_coords(&e.state))
            .collect();
        let all: Vec<[f64; 5]> = rising.iter().map(|e| section_coords(&e.state)).collect();
        let window_states: Vec<ReducedState> = rising.iter().map(|e| e.state).collect();

        if w1.len() >= 2 && w2.len() >= 2 {
            let (m1, _) = cluster_labels(&w1, cfg.cluster_eps);
            let (m2, _) = cluster_labels(&w2, cfg.cluster_eps);
            let (m_all, _) = cluster_labels(&all, cfg.cluster_eps);
            if m1 == m2
                && m1 == m_all
                && m1 <= cfg.max_period
                && w1.len() >= 2 * m1
                && w2.len() >= 2 * m1
            {
                return Ok(Observation {
                    label: AttractorLabel {
                        kind: AttractorKind::Period(m1 as u32),
                        lambda: None,
                        cluster_count: m1,
                        transient_used,
                    },
                    window_states,
                    v_negative,
                });
            }
        }

        // unstable or data-starved: extend the transient, then fall back
        // to the Lyapunov criterion
        if transient_used + span < cfg.max_transient {
            transient_used += span;
            continue;
        }

        let (m_final, _) = cluster_labels(&all, cfg.cluster_eps);
        if noise.is_some() {
            // a Lyapunov exponent of the forced flow is not the chaos
            // criterion used here; report the cluster structure as-is
            return Ok(Observation {
                label: AttractorLabel {
                    kind: AttractorKind::Unresolved,
                    lambda: None,
                    cluster_count: m_final,
                    transient_used,
                },
                window_states,
                v_negative,
            });
        }
        let lyap_cfg = LyapunovConfig {
            transient: 0.0,
            horizon: cfg.lyap_horizon,
            rel_tol: cfg.rel_tol.max(1e-8),
            abs_tol: cfg.abs_tol.max(1e-10),
            ..LyapunovConfig::default()
        };
        let est = max_lyapunov(prm, &state, &lyap_cfg)?;
        let kind = if est.lambda > cfg.lambda_min {
            AttractorKind::Chaotic
        } else {
            AttractorKind::Unresolved
        };
        return Ok(Observation {
            label: AttractorLabel {
                kind,
                lambda: Some(est.lambda),
                cluster_count: m_final,
                transient_used,
            },
            window_states,
            v_negative,
        });
    }
}

/// Classify the long-term attractor reached from `s0`.
pub fn classify_attractor(
    prm: &SystemParams,
    s0: &ReducedState,
    cfg: &ClassifyConfig,
) -> Result<AttractorLabel> {
    Ok(observe(prm, s0, cfg)?.label)
}

/// Classification together with the rising-section states of the decisive
/// windows; the raw material for cycle-structure checks.
pub fn classify_with_sections(
    prm: &SystemParams,
    s0: &ReducedState,
    cfg: &ClassifyConfig,
) -> Result<(AttractorLabel, Vec<ReducedState>)> {
    let obs = observe(prm, s0, cfg)?;
    Ok((obs.label, obs.window_states))
}

/// One photon-number cell of a bifurcation diagram.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BifurcationRecord {
    pub n: f64,
    /// Distinct negative v values on the u = 0 section (diagram branch).
    pub v_values: Vec<f64>,
    pub label: AttractorLabel,
    pub error: Option<String>,
}

/// Deduplicate scalar section values: sorted cluster means with a gap
/// threshold relative to the observed spread.
pub(crate) fn distinct_values(mut vs: Vec<f64>, rel_tol: f64) -> Vec<f64> {
    if vs.is_empty() {
        return vs;
    }
    vs.sort_by(f64::total_cmp);
    let spread = vs.last().unwrap() - vs.first().unwrap();
    let tol = (spread * rel_tol).max(1e-6 * (1.0 + vs[0].abs()));
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=vs.len() {
        if i == vs.len() || vs[i] - vs[i - 1] > tol {
            let chunk = &vs[start..i];
            out.push(chunk.iter().sum::<f64>() / chunk.len() as f64);
            start = i;
        }
    }
    out
}

/// Scan the bifurcation diagram over n at fixed initial conditions.
pub fn bifurcation_scan(
    prm_base: &SystemParams,
    n_range: (f64, f64),
    n_steps: usize,
    s0: &ReducedState,
    cfg: &ClassifyConfig,
) -> Result<Vec<BifurcationRecord>> {
    bifurcation_scan_noisy(prm_base, n_range, n_steps, s0, cfg, None)
}

/// Bifurcation scan with an optional stochastic force on the momentum
/// equation.
pub fn bifurcation_scan_noisy(
    prm_base: &SystemParams,
    n_range: (f64, f64),
    n_steps: usize,
    s0: &ReducedState,
    cfg: &ClassifyConfig,
    noise: Option<&NoiseSpec>,
) -> Result<Vec<BifurcationRecord>> {
    if n_steps < 1 {
        return Err(Error::InvalidParams("n_steps must be >= 1".into()));
    }
    let ns = grid_values(n_range, n_steps);
    Ok(ns
        .par_iter()
        .map(|&n| {
            let prm = SystemParams { n, ..*prm_base };
            match prm
                .validate()
                .and_then(|_| observe_with_noise(&prm, s0, cfg, noise))
            {
                Ok(obs) => BifurcationRecord {
                    n,
                    v_values: distinct_values(obs.v_negative, 0.02),
                    label: obs.label,
                    error: None,
                },
                Err(e) => BifurcationRecord {
                    n,
                    v_values: Vec::new(),
                    label: AttractorLabel {
                        kind: AttractorKind::Unresolved,
                        lambda: None,
                        cluster_count: 0,
                        transient_used: 0.0,
                    },
                    error: Some(e.to_string()),
                },
            }
        })
        .collect())
}

/// One cell of the synchronization map.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyncCell {
    pub n: f64,
    pub delta: f64,
    pub label: AttractorLabel,
    pub error: Option<String>,
}

/// Attractor categories over an (n, δ) grid at fixed α, γ_a and initial
/// conditions.
pub fn synchronization_map(
    prm_base: &SystemParams,
    n_range: (f64, f64),
    delta_range: (f64, f64),
    dims: (usize, usize),
    s0: &ReducedState,
    cfg: &ClassifyConfig,
) -> Result<Vec<SyncCell>> {
    if dims.0 < 1 || dims.1 < 1 {
        return Err(Error::InvalidParams("empty synchronization grid".into()));
    }
    let cells: Vec<(f64, f64)> = grid_values(n_range, dims.0)
        .into_iter()
        .flat_map(|n| {
            grid_values(delta_range, dims.1)
                .into_iter()
                .map(move |delta| (n, delta))
        })
        .collect();
    Ok(cells
        .par_iter()
        .map(|&(n, delta)| {
            let prm = SystemParams { n, delta, ..*prm_base };
            match prm.validate().and_then(|_| classify_attractor(&prm, s0, cfg)) {
                Ok(label) => SyncCell { n, delta, label, error: None },
                Err(e) => SyncCell {
                    n,
                    delta,
                    label: AttractorLabel {
                        kind: AttractorKind::Unresolved,
                        lambda: None,
                        cluster_count: 0,
                        transient_used: 0.0,
                    },
                    error: Some(e.to_string()),
                },
            }
        })
        .collect())
}
