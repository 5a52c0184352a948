// temp probe: what does n=24000 collapse into? + escape-time stats over ICs
use atomwave::integrator::{integrate, EventSpec, IntegratorConfig};
use atomwave::{ReducedState, SystemParams};

fn main() {
    let mode = std::env::args().nth(1).unwrap_or_default();
    let prm = SystemParams::reduced(0.01, 24.0, 24000.0, 0.3).unwrap();
    if mode == "state" {
        let s0 = ReducedState::ground(0.0, 60.0);
        let mut cfg = IntegratorConfig::with_horizon(20000.0);
        cfg.sample_interval = f64::INFINITY;
        let traj = integrate(&s0, &prm, &cfg, &[EventSpec::section_u0()], None).unwrap();
        for t0 in [8000.0, 12000.0, 16000.0, 19000.0] {
            let ev: Vec<_> = traj.events.iter().filter(|e| e.tau >= t0).take(3).collect();
            for e in ev {
                println!("tau={:.1} xi={:>9.3} p={:>8.3} v={:>9.5} z={:>8.5}", e.tau, e.state.xi, e.state.p, e.state.v, e.state.z);
            }
        }
        println!("final: {:?}", traj.final_state());
    } else if mode == "escape" {
        // escape time vs IC: detect first 500-tau window with tiny v-spread
        for (xi0, p0) in [(0.0,60.0),(1.0,60.0),(0.5,55.0),(0.25,60.0),(0.75,65.0),(1.3,58.0),(0.1,62.0),(2.0,60.0)] {
            let s0 = ReducedState::ground(xi0, p0);
            let mut cfg = IntegratorConfig::with_horizon(50000.0);
            cfg.sample_interval = f64::INFINITY;
            let traj = integrate(&s0, &prm, &cfg, &[EventSpec::section_u0()], None).unwrap();
            let mut esc = f64::NAN;
            let mut t0 = 1000.0;
            while t0 < 50000.0 {
                let vs: Vec<f64> = traj.events.iter().filter(|e| e.tau >= t0 && e.tau < t0 + 500.0).map(|e| e.state.v).collect();
                if vs.len() > 20 {
                    let mut s = vs.clone(); s.sort_by(f64::total_cmp);
                    if s.last().unwrap() - s.first().unwrap() < 1.0 { esc = t0; break; }
                }
                t0 += 500.0;
            }
            println!("xi0={xi0} p0={p0}: collapse at ~{esc}");
        }
    }
}
