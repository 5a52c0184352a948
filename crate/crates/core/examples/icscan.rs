// temp probe: IC scan for section cluster counts
use atomwave::integrator::{integrate, EventSpec, IntegratorConfig};
use atomwave::{ReducedState, SystemParams};

fn nclusters(vs: &[f64]) -> usize {
    if vs.is_empty() { return 0; }
    let mut v = vs.to_vec();
    v.sort_by(f64::total_cmp);
    let range = v.last().unwrap() - v.first().unwrap();
    let tol = (range * 0.05).max(1e-6 * (1.0 + v[0].abs()));
    let mut k = 1;
    for w in v.windows(2) {
        if w[1] - w[0] > tol { k += 1; }
    }
    k
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n: f64 = args[1].parse().unwrap();
    let transient: f64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(3000.0);
    let prm = SystemParams::reduced(0.01, 24.0, n, 0.3).unwrap();
    for (xi0, p0, u0, v0, z0) in [
        (0.0, 60.0, 0.0, 0.0, -1.0),
        (std::f64::consts::FRAC_PI_2, 60.0, 0.0, 0.0, -1.0),
        (0.0, 60.0, 0.0, 0.0, 1.0),
        (0.0, 60.0, 0.0, 0.0, 0.0),
        (0.0, 65.0, 0.0, 0.0, 0.9),
        (0.0, 60.0, 10.0, 0.0, -1.0),
        (1.0, 60.0, 0.0, 0.0, -1.0),
        (0.0, 40.0, 0.0, 0.0, -1.0),
        (0.0, 60.0, 0.0, 10.0, -1.0),
        (0.3, 62.0, 0.0, 0.0, 0.8),
    ] {
        let s0 = ReducedState::new(xi0, p0, u0, v0, z0);
        let mut cfg = IntegratorConfig::with_horizon(transient + 400.0);
        cfg.sample_interval = f64::INFINITY;
        let traj = integrate(&s0, &prm, &cfg, &[EventSpec::section_u0()], None).unwrap();
        let vs: Vec<f64> = traj.events.iter().filter(|e| e.tau > transient && e.state.v < 0.0)
            .map(|e| e.state.v).collect();
        let vs_all: Vec<f64> = traj.events.iter().filter(|e| e.tau > transient)
            .map(|e| e.state.v).collect();
        println!("xi0={xi0:.3} p0={p0} u0={u0} v0={v0} z0={z0}: {} pts, clusters(all v)={}, vneg pts={} sample v: {:?}",
            vs_all.len(), nclusters(&vs_all), vs.len(), &vs_all.iter().take(4).collect::<Vec<_>>());
    }
}
