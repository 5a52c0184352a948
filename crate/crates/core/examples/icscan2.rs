// temp probe: triplet at xi0=1.0 + tolerance robustness + n-scan
use atomwave::integrator::{integrate, EventSpec, IntegratorConfig};
use atomwave::{ReducedState, SystemParams};

fn clusters(vs: &[f64]) -> usize {
    if vs.is_empty() { return 0; }
    let mut v = vs.to_vec();
    v.sort_by(f64::total_cmp);
    let range = v.last().unwrap() - v.first().unwrap();
    let tol = (range * 0.05).max(1e-6 * (1.0 + v[0].abs()));
    let mut k = 1;
    for w in v.windows(2) { if w[1] - w[0] > tol { k += 1; } }
    k
}

fn run(n: f64, xi0: f64, rel: f64, transient: f64) -> (usize, usize, f64) {
    let prm = SystemParams::reduced(0.01, 24.0, n, 0.3).unwrap();
    let s0 = ReducedState::ground(xi0, 60.0);
    let mut cfg = IntegratorConfig::with_horizon(transient + 400.0);
    cfg.rel_tol = rel; cfg.abs_tol = rel * 1e-2;
    cfg.sample_interval = f64::INFINITY;
    let traj = integrate(&s0, &prm, &cfg, &[EventSpec::section_u0()], None).unwrap();
    let vs: Vec<f64> = traj.events.iter().filter(|e| e.tau > transient).map(|e| e.state.v).collect();
    // spread within each rough cluster as chaos proxy: max consecutive gap stats
    let mut sorted = vs.clone(); sorted.sort_by(f64::total_cmp);
    let spread = if sorted.len() > 1 { sorted.last().unwrap() - sorted.first().unwrap() } else { 0.0 };
    (vs.len(), clusters(&vs), spread)
}

fn main() {
    let mode = std::env::args().nth(1).unwrap_or_default();
    if mode == "triplet" {
        for n in [3000.0, 14846.0, 24000.0] {
            for rel in [1e-7, 1e-8, 1e-9, 1e-10] {
                let (npts, k, spread) = run(n, 1.0, rel, 6000.0);
                println!("n={n} rel={rel:.0e}: pts={npts} clusters={k} spread={spread:.4}");
            }
        }
    } else if mode == "nscan" {
        let lo: f64 = std::env::args().nth(2).unwrap().parse().unwrap();
        let hi: f64 = std::env::args().nth(3).unwrap().parse().unwrap();
        let steps: usize = std::env::args().nth(4).unwrap().parse().unwrap();
        for i in 0..=steps {
            let n = lo + (hi - lo) * i as f64 / steps as f64;
            let (npts, k, spread) = run(n, 1.0, 1e-8, 6000.0);
            println!("n={n:.0}: pts={npts} clusters={k} spread={spread:.4}");
        }
    }
}
