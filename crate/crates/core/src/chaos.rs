//! Maximal Lyapunov exponent estimation, Lyapunov maps, and box-counting
//! dimension of attractor samples.
//!
//! The position enters all metrics through (cos ξ, sin ξ): the dynamics is
//! 2π-periodic in ξ, and ballistic trajectories would otherwise make the
//! separation norm meaningless. Momentum is weighted by α (the velocity
//! scale) and the dipole quadratures by 1/√(2n) (their natural magnitude),
//! so all coordinates contribute at order one.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::integrator::{propagate, IntegratorConfig};
use crate::model::ReducedState;
use crate::{Error, Result, SystemParams};

/// Benettin-procedure configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovConfig {
    /// Transient discarded before accumulation.
    pub transient: f64,
    /// Accumulation horizon after the transient.
    pub horizon: f64,
    /// Time between renormalizations.
    pub renorm_interval: f64,
    /// Initial separation in scaled units.
    pub d0: f64,
    /// Leading renormalization intervals discarded while the separation
    /// aligns with the fastest-growing direction.
    pub discard_intervals: usize,
    /// Renormalization intervals per stderr block.
    pub block: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for LyapunovConfig {
    fn default() -> Self {
        Self {
            transient: 2e3,
            horizon: 5e4,
            renorm_interval: 1.0,
            d0: 1e-8,
            discard_intervals: 50,
            block: 50,
            rel_tol: 1e-7,
            abs_tol: 1e-9,
        }
    }
}

impl LyapunovConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.horizon >= 100.0 * self.renorm_interval) {
            return Err(Error::InvalidParams(
                "lyapunov horizon must cover at least 100 renormalization intervals".into(),
            ));
        }
        if !(self.d0 > 0.0 && self.renorm_interval > 0.0 && self.transient >= 0.0) {
            return Err(Error::InvalidParams("bad lyapunov configuration".into()));
        }
        Ok(())
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

/// Maximal Lyapunov exponent estimate with block-averaged spread.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    /// Exponent in units of Ω₀.
    pub lambda: f64,
    /// Standard error of the block means.
    pub stderr: f64,
    pub horizon: f64,
    pub renorm_interval: f64,
}

fn wrap_pi(x: f64) -> f64 {
    let mut r = x.rem_euclid(std::f64::consts::TAU);
    if r > std::f64::consts::PI {
        r -= std::f64::consts::TAU;
    }
    r
}

/// Scaled separation between two phase points.
fn separation(a: &ReducedState, b: &ReducedState, prm: &SystemParams) -> f64 {
    let s_uv = (2.0 * prm.n).sqrt().max(1.0);
    let dxi = wrap_pi(a.xi - b.xi);
    let dp = prm.alpha * (a.p - b.p);
    let du = (a.u - b.u) / s_uv;
    let dv = (a.v - b.v) / s_uv;
    let dz = a.z - b.z;
    (dxi * dxi + dp * dp + du * du + dv * dv + dz * dz).sqrt()
}

/// Two-trajectory Benettin estimate of the maximal Lyapunov exponent.
pub fn max_lyapunov(
    prm: &SystemParams,
    s0: &ReducedState,
    cfg: &LyapunovConfig,
) -> Result<LyapunovEstimate> {
    cfg.validate()?;
    let icfg = cfg.integrator(cfg.renorm_interval);

    let mut reference = if cfg.transient > 0.0 {
        propagate(s0, prm, cfg.transient, &cfg.integrator(cfg.transient))?
    } else {
        *s0
    };

    // deterministic perturbation, equal weight per scaled coordinate
    let s_uv = (2.0 * prm.n).sqrt().max(1.0);
    let c = cfg.d0 / 5f64.sqrt();
    let mut shadow = ReducedState::new(
        reference.xi + c,
        reference.p + c / prm.alpha,
        reference.u + c * s_uv,
        reference.v + c * s_uv,
        reference.z + c,
    );

    let intervals = (cfg.horizon / cfg.renorm_interval).floor() as usize;
    let mut rates = Vec::with_capacity(intervals.saturating_sub(cfg.discard_intervals));
    for k in 0..intervals {
        reference = propagate(&reference, prm, cfg.renorm_interval, &icfg)?;
        shadow = propagate(&shadow, prm, cfg.renorm_interval, &icfg)?;
        let d = separation(&reference, &shadow, prm);
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::NonFiniteState("lyapunov separation".into()));
        }
        if k >= cfg.discard_intervals {
            rates.push((d / cfg.d0).ln() / cfg.renorm_interval);
        }
        // pull the shadow back to distance d0 along the current offset
        let f = cfg.d0 / d;
        shadow = ReducedState::new(
            reference.xi + (shadow.xi - reference.xi) * f,
            reference.p + (shadow.p - reference.p) * f,
            reference.u + (shadow.u - reference.u) * f,
            reference.v + (shadow.v - reference.v) * f,
            reference.z + (shadow.z - reference.z) * f,
        );
    }
    if rates.is_empty() {
        return Err(Error::InsufficientData("no accumulation intervals".into()));
    }

    let lambda = rates.iter().sum::<f64>() / rates.len() as f64;
    let blocks: Vec<f64> = rates
        .chunks(cfg.block)
        .filter(|c| c.len() == cfg.block)
        .map(|c| c.iter().sum::<f64>() / c.len() as f64)
        .collect();
    let stderr = if blocks.len() >= 2 {
        let mean = blocks.iter().sum::<f64>() / blocks.len() as f64;
        let var = blocks.iter().map(|b| (b - mean) * (b - mean)).sum::<f64>()
            / (blocks.len() - 1) as f64;
        (var / blocks.len() as f64).sqrt()
    } else {
        f64::NAN
    };
    Ok(LyapunovEstimate {
        lambda,
        stderr,
        horizon: cfg.horizon,
        renorm_interval: cfg.renorm_interval,
    })
}

/// One cell of a Lyapunov map.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LyapunovCell {
    pub n: f64,
    pub delta: f64,
    pub result: Option<LyapunovEstimate>,
    pub error: Option<String>,
}

/// λ over an (n, δ) grid; cells run in parallel, assembly is ordered by
/// cell index.
pub fn lyapunov_map(
    prm_base: &SystemParams,
    n_range: (f64, f64),
    delta_range: (f64, f64),
    dims: (usize, usize),
    s0: &ReducedState,
    cfg: &LyapunovConfig,
) -> Result<Vec<LyapunovCell>> {
    if dims.0 < 1 || dims.1 < 1 {
        return Err(Error::InvalidParams("empty lyapunov grid".into()));
    }
    cfg.validate()?;
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
            let cell_prm = SystemParams { n, delta, ..*prm_base };
            match cell_prm
                .validate()
                .and_then(|_| max_lyapunov(&cell_prm, s0, cfg))
            {
                Ok(est) => LyapunovCell { n, delta, result: Some(est), error: None },
                Err(e) => LyapunovCell { n, delta, result: None, error: Some(e.to_string()) },
            }
        })
        .collect())
}

pub(crate) fn grid_values(range: (f64, f64), count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![range.0];
    }
    (0..count)
        .map(|i| range.0 + (range.1 - range.0) * i as f64 / (count as f64 - 1.0))
        .collect()
}

/// Embed a state for dimension estimation: (u, v, z, p, cos ξ, sin ξ).
pub fn embed(s: &ReducedState) -> [f64; 6] {
    [s.u, s.v, s.z, s.p, s.xi.cos(), s.xi.sin()]
}

/// Box-counting dimension estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub dimension: f64,
    /// Fit quality over the selected scaling window.
    pub r_squared: f64,
    /// Dyadic scale indices (inclusive) of the window used.
    pub window: (usize, usize),
    /// log2 box counts per scale index.
    pub log2_counts: Vec<f64>,
}

/// Least-squares box-counting dimension over dyadic scales.
///
/// Coordinates are normalized to unit extent, counts use box edge 2^-j of
/// the extent for j = 0..scales, and the slope is fit on the contiguous
/// window (length ≥ 4 when available) of non-saturated scales that
/// maximizes the linear-fit R². Scales whose count is limited by the
/// sample size rather than the set geometry are excluded.
pub fn box_counting_dimension(points: &[[f64; 6]], scales: usize) -> Result<DimensionEstimate> {
    if scales < 5 {
        return Err(Error::InvalidParams("need at least 5 dyadic scales".into()));
    }
    if points.is_empty() {
        return Err(Error::InsufficientData("no points".into()));
    }
    let dim = 6;
    let mut lo = [f64::INFINITY; 6];
    let mut hi = [f64::NEG_INFINITY; 6];
    for p in points {
        for i in 0..dim {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    let mut span = [0.0; 6];
    let mut max_span = 0.0f64;
    for i in 0..dim {
        span[i] = hi[i] - lo[i];
        max_span = max_span.max(span[i]);
    }
    if max_span == 0.0 {
        // a single point occupies one box at every scale
        return Ok(DimensionEstimate {
            dimension: 0.0,
            r_squared: 1.0,
            window: (0, scales - 1),
            log2_counts: vec![0.0; scales],
        });
    }

    let counts: Vec<usize> = (0..scales)
        .into_par_iter()
        .map(|j| {
            let boxes_per_side = (1u64 << j) as f64;
            let mut boxes: HashSet<[i32; 6]> = HashSet::with_capacity(points.len() / 4);
            for p in points {
                let mut key = [0i32; 6];
                for i in 0..dim {
                    let x = if span[i] > 0.0 { (p[i] - lo[i]) / span[i] } else { 0.0 };
                    key[i] = ((x * boxes_per_side).floor() as i32).min(boxes_per_side as i32 - 1);
                }
                boxes.insert(key);
            }
            boxes.len()
        })
        .collect();

    let log2_counts: Vec<f64> = counts.iter().map(|&c| (c as f64).log2()).collect();

    // drop scales limited by the sample count rather than the set
    let n_pts = points.len() as f64;
    let usable: Vec<usize> = (0..scales)
        .filter(|&j| (counts[j] as f64) <= n_pts / 10.0)
        .collect();
    if usable.len() < 3 {
        return Err(Error::NoScalingWindow(format!(
            "only {} usable scales of {scales}",
            usable.len()
        )));
    }
    let min_len = 4.min(usable.len());

    let mut best: Option<(f64, f64, (usize, usize))> = None;
    for start in 0..usable.len() {
        for end in (start + min_len - 1)..usable.len() {
            let idx = &usable[start..=end];
            if idx.last().unwrap() - idx.first().unwrap() + 1 != idx.len() {
                continue; // non-contiguous
            }
            let (slope, r2) = fit_line(idx, &log2_counts);
            let better = match best {
                None => true,
                Some((_, best_r2, _)) => r2 > best_r2,
            };
            if better {
                best = Some((slope, r2, (idx[0], *idx.last().unwrap())));
            }
        }
    }
    let (dimension, r_squared, window) =
        best.ok_or_else(|| Error::NoScalingWindow("no contiguous window".into()))?;
    Ok(DimensionEstimate { dimension, r_squared, window, log2_counts })
}

/// Least squares of log2 N against the scale index j (slope = dimension,
/// since the box edge halves each step).
fn fit_line(idx: &[usize], y: &[f64]) -> (f64, f64) {
    let n = idx.len() as f64;
    let sx: f64 = idx.iter().map(|&i| i as f64).sum();
    let sy: f64 = idx.iter().map(|&i| y[i]).sum();
    let sxx: f64 = idx.iter().map(|&i| (i as f64) * (i as f64)).sum();
    let sxy: f64 = idx.iter().map(|&i| (i as f64) * y[i]).sum();
    let denom = n * sxx - sx * sx;
    if denom == 0.0 {
        return (0.0, 0.0);
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let mean = sy / n;
    let ss_tot: f64 = idx.iter().map(|&i| (y[i] - mean) * (y[i] - mean)).sum();
    let ss_res: f64 = idx
        .iter()
        .map(|&i| {
            let fit = intercept + slope * i as f64;
            (y[i] - fit) * (y[i] - fit)
        })
        .sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    (slope, r2)
}

/// Post-transient attractor sample in the box-counting embedding.
pub fn attractor_sample(
    prm: &SystemParams,
    s0: &ReducedState,
    transient: f64,
    n_points: usize,
    stride: f64,
    icfg: &IntegratorConfig,
) -> Result<Vec<[f64; 6]>> {
    let mut cfg = *icfg;
    cfg.max_tau = transient + n_points as f64 * stride;
    cfg.sample_interval = stride;
    let traj = crate::integrator::integrate(s0, prm, &cfg, &[], None)?;
    Ok(traj
        .times
        .iter()
        .zip(&traj.states)
        .filter(|(t, _)| **t > transient)
        .map(|(_, s)| embed(s))
        .collect())
}
