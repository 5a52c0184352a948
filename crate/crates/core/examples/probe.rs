// Scratch calibration runs; not part of the deliverable.
use atomwave::integrator::{integrate, EventSpec, IntegratorConfig};
use atomwave::model::trap_frequency;
use atomwave::{ReducedState, SystemParams};
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    match args.get(1).map(|s| s.as_str()) {
        Some("cost") => cost(),
        Some("triplet") => triplet(),
        Some("trapfreq") => trapfreq(),
        Some("grouping") => grouping(),
        _ => eprintln!("usage: probe [cost|triplet|trapfreq|grouping]"),
    }
}

fn cost() {
    for (n, rel) in [(3000.0, 1e-9), (3000.0, 1e-7), (24000.0, 1e-9), (24000.0, 1e-7)] {
        let prm = SystemParams::reduced(0.01, 24.0, n, 0.3).unwrap();
        let s0 = ReducedState::ground(0.0, 60.0);
        let mut cfg = IntegratorConfig::with_horizon(1000.0);
        cfg.rel_tol = rel;
        cfg.abs_tol = rel * 1e-2;
        cfg.sample_interval = f64::INFINITY;
        let t = Instant::now();
        let traj = integrate(&s0, &prm, &cfg, &[], None).unwrap();
        println!(
            "n={n} rel={rel:.0e}: tau=1000 in {:?}, final p={:.3}",
            t.elapsed(),
            traj.final_state().p
        );
    }
    // with section events
    let prm = SystemParams::reduced(0.01, 24.0, 3000.0, 0.3).unwrap();
    let s0 = ReducedState::ground(0.0, 60.0);
    let mut cfg = IntegratorConfig::with_horizon(1000.0);
    cfg.sample_interval = f64::INFINITY;
    let t = Instant::now();
    let traj = integrate(&s0, &prm, &cfg, &[EventSpec::section_u0()], None).unwrap();
    println!("with events: {:?}, {} events", t.elapsed(), traj.events.len());
}

fn triplet() {
    for n in [3000.0, 14846.0, 24000.0] {
        let prm = SystemParams::reduced(0.01, 24.0, n, 0.3).unwrap();
        let s0 = ReducedState::ground(0.0, 60.0);
        let mut cfg = IntegratorConfig::with_horizon(2600.0);
        cfg.sample_interval = f64::INFINITY;
        let t = Instant::now();
        let traj = integrate(&s0, &prm, &cfg, &[EventSpec::section_u0()], None).unwrap();
        let pts: Vec<_> = traj
            .events
            .iter()
            .filter(|e| e.tau > 2000.0)
            .map(|e| e.state)
            .collect();
        println!(
            "n={n}: {} section points after transient ({:?})",
            pts.len(),
            t.elapsed()
        );
        for s in pts.iter().take(14) {
            println!(
                "  v={:+.6} z={:+.6} p={:+.4} cos_xi={:+.6}",
                s.v,
                s.z,
                s.p,
                s.xi.cos()
            );
        }
    }
}

fn trapfreq() {
    // measured small-oscillation frequency about the node vs Eq.-(16)-style value
    for (delta, n, gamma, alpha) in [
        (24.0, 1e4, 0.3, 0.01),
        (24.0, 3000.0, 0.3, 0.01),
        (-18.0, 8000.0, 0.2, 0.005),
        (35.0, 20000.0, 0.5, 0.02),
    ] {
        let prm = SystemParams::reduced(alpha, delta, n, gamma).unwrap();
        let omega = trap_frequency(&prm).unwrap();
        let well = if delta > 0.0 { std::f64::consts::FRAC_PI_2 } else { 0.0 };
        let xi_m = 0.03;
        let s0 = ReducedState::ground(well + xi_m, 0.0);
        let horizon = 80.0 * std::f64::consts::TAU / omega;
        let mut cfg = IntegratorConfig::with_horizon(horizon);
        cfg.sample_interval = f64::INFINITY;
        // time successive maxima of xi via p = 0 falling crossings
        let ev = EventSpec::custom("pzero", atomwave::integrator::Direction::Falling, |_, s| s.p);
        let traj = integrate(&s0, &prm, &cfg, &[ev], None).unwrap();
        let times: Vec<f64> = traj.events.iter().map(|e| e.tau).collect();
        // discard early transient oscillations, average the rest
        if times.len() > 20 {
            let skip = times.len() / 2;
            let t_first = times[skip];
            let t_last = *times.last().unwrap();
            let periods = (times.len() - 1 - skip) as f64;
            let measured = std::f64::consts::TAU / ((t_last - t_first) / periods);
            println!(
                "delta={delta} n={n}: omega_eq16={omega:.5} measured={measured:.5} rel={:.4}",
                (measured - omega).abs() / omega
            );
        } else {
            println!("delta={delta} n={n}: only {} crossings", times.len());
        }
    }
}

fn grouping() {
    for (delta, n, p0s) in [
        (-24.0, 10000.0, vec![20.0, 60.0, 120.0]),
        (-24.0, 24000.0, vec![20.0, 60.0, 120.0]),
        (24.0, 10000.0, vec![50.0, 400.0]),
    ] {
        let prm = SystemParams::reduced(0.01, delta, n, 0.3).unwrap();
        for p0 in &p0s {
            let s0 = ReducedState::ground(0.0, *p0);
            let mut cfg = IntegratorConfig::with_horizon(4000.0);
            cfg.sample_interval = 1.0;
            let t = Instant::now();
            let traj = integrate(&s0, &prm, &cfg, &[], None).unwrap();
            let tail: Vec<f64> = traj
                .times
                .iter()
                .zip(&traj.states)
                .filter(|(t, _)| **t > 3200.0)
                .map(|(_, s)| s.p.abs())
                .collect();
            let mean = tail.iter().sum::<f64>() / tail.len() as f64;
            println!(
                "delta={delta} n={n} p0={p0}: final |p| mean={mean:.2} ({:?})",
                t.elapsed()
            );
        }
    }
}
