use atomwave::integrator::{integrate, EventSpec, IntegratorConfig};
use atomwave::{ReducedState, SystemParams};
fn main() {
    let prm = SystemParams::reduced(0.01, 24.0, 24000.0, 0.3).unwrap();
    let s0 = ReducedState::ground(0.0, 60.0);
    for horizon in [20000.0f64, 20000.0] {
        let mut cfg = IntegratorConfig::with_horizon(horizon);
        cfg.sample_interval = f64::INFINITY;
        let traj = integrate(&s0, &prm, &cfg, &[EventSpec::section_u0()], None).unwrap();
        let vs: Vec<f64> = traj.events.iter().filter(|e| e.tau >= 8000.0 && e.tau < 9000.0).map(|e| e.state.v).collect();
        let mut s = vs.clone(); s.sort_by(f64::total_cmp);
        println!("horizon={horizon}: pts [8000,9000) = {}, spread = {:.4}, final p = {:.6}",
            vs.len(), s.last().unwrap()-s.first().unwrap(), traj.final_state().p);
    }
}
