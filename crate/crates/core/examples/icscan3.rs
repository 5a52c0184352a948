// temp probe: window-resolved section spread over long runs
use atomwave::integrator::{integrate, EventSpec, IntegratorConfig};
use atomwave::{ReducedState, SystemParams};

fn main() {
    let n: f64 = std::env::args().nth(1).unwrap().parse().unwrap();
    let xi0: f64 = std::env::args().nth(2).unwrap().parse().unwrap();
    let u0: f64 = std::env::args().nth(3).unwrap().parse().unwrap();
    let rel: f64 = std::env::args().nth(4).unwrap().parse().unwrap();
    let horizon: f64 = std::env::args().nth(5).unwrap().parse().unwrap();
    let prm = SystemParams::reduced(0.01, 24.0, n, 0.3).unwrap();
    let s0 = ReducedState::new(xi0, 60.0, u0, 0.0, -1.0);
    let mut cfg = IntegratorConfig::with_horizon(horizon);
    cfg.rel_tol = rel; cfg.abs_tol = rel * 1e-2;
    cfg.sample_interval = f64::INFINITY;
    let traj = integrate(&s0, &prm, &cfg, &[EventSpec::section_u0()], None).unwrap();
    let w = 1000.0;
    let mut start = 0.0;
    while start < horizon {
        let vs: Vec<f64> = traj.events.iter()
            .filter(|e| e.tau >= start && e.tau < start + w)
            .map(|e| e.state.v).collect();
        if !vs.is_empty() {
            let mut s = vs.clone(); s.sort_by(f64::total_cmp);
            let spread = s.last().unwrap() - s.first().unwrap();
            // count distinct values at 1e-4 abs resolution
            let mut k = 1;
            for pair in s.windows(2) { if pair[1] - pair[0] > 1e-3 { k += 1; } }
            println!("[{start:>6.0},{:>6.0}) pts={:<4} spread={spread:>9.4} distinct~{k}", start+w, vs.len());
        }
        start += w;
    }
}
