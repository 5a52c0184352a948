//! Conservation oracles for the dissipation-free limit.
//!
//! Both conserved quantities are first verified algebraically: their time
//! derivative, assembled from the right-hand side by the chain rule, must
//! vanish at randomly drawn phase points. Only then are the integration
//! drift bounds trusted as integrator checks.

use atomwave::integrator::{integrate, IntegratorConfig};
use atomwave::model::rhs_reduced;
use atomwave::{ReducedState, SystemParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// u² + v² + nz²: squared length of the Bloch vector in field-scaled
/// variables.
fn casimir(s: &ReducedState, prm: &SystemParams) -> f64 {
    s.u * s.u + s.v * s.v + prm.n * s.z * s.z
}

fn casimir_dot(s: &ReducedState, d: &ReducedState, prm: &SystemParams) -> f64 {
    2.0 * s.u * d.u + 2.0 * s.v * d.v + 2.0 * prm.n * s.z * d.z
}

/// αp²/2 − u cos ξ − (δ/2) z: mechanical plus interaction plus internal
/// energy.
fn energy(s: &ReducedState, prm: &SystemParams) -> f64 {
    0.5 * prm.alpha * s.p * s.p - s.u * s.xi.cos() - 0.5 * prm.delta * s.z
}

fn energy_dot(s: &ReducedState, d: &ReducedState, prm: &SystemParams) -> f64 {
    prm.alpha * s.p * d.p - d.u * s.xi.cos() + s.u * s.xi.sin() * d.xi
        - 0.5 * prm.delta * d.z
}

#[test]
fn analytic_derivatives_vanish_at_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..1_000_000 {
        let prm = SystemParams::reduced(
            rng.gen_range(0.001..0.1),
            rng.gen_range(-40.0..40.0),
            rng.gen_range(0.0..30000.0),
            0.0,
        )
        .unwrap();
        let s = ReducedState::new(
            rng.gen_range(-10.0..10.0),
            rng.gen_range(-500.0..500.0),
            rng.gen_range(-100.0..100.0),
            rng.gen_range(-100.0..100.0),
            rng.gen_range(-1.0..1.0),
        );
        let d = rhs_reduced(&s, &prm).unwrap();

        let c_dot = casimir_dot(&s, &d, &prm);
        let c_scale = (s.u * d.u).abs() + (s.v * d.v).abs() + (prm.n * s.z * d.z).abs() + 1.0;
        assert!(
            c_dot.abs() <= 1e-12 * c_scale,
            "casimir derivative {c_dot} at {s:?} {prm:?}"
        );

        let e_dot = energy_dot(&s, &d, &prm);
        let e_scale =
            (prm.alpha * s.p * d.p).abs() + (d.u * s.xi.cos()).abs() + (0.5 * prm.delta * d.z).abs() + 1.0;
        assert!(
            e_dot.abs() <= 1e-12 * e_scale,
            "energy derivative {e_dot} at {s:?} {prm:?}"
        );
    }
}

#[test]
fn conserved_quantities_drift_below_tolerance() {
    let prm = SystemParams::reduced(0.01, 24.0, 3000.0, 0.0).unwrap();
    let s0 = ReducedState::ground(0.0, 60.0);
    let mut cfg = IntegratorConfig::with_horizon(1e3);
    cfg.sample_interval = 1.0;
    let traj = integrate(&s0, &prm, &cfg, &[], None).unwrap();

    let c0 = casimir(&s0, &prm);
    let e0 = energy(&s0, &prm);
    let c_scale = c0.abs().max(1.0);
    let e_scale = e0.abs().max(1.0);
    let mut worst_c = 0.0f64;
    let mut worst_e = 0.0f64;
    for s in &traj.states {
        worst_c = worst_c.max((casimir(s, &prm) - c0).abs() / c_scale);
        worst_e = worst_e.max((energy(s, &prm) - e0).abs() / e_scale);
    }
    assert!(worst_c < 1e-6, "casimir drift {worst_c:.3e}");
    assert!(worst_e < 1e-6, "energy drift {worst_e:.3e}");
}
