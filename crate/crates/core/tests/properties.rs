use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use atomwall::kernels::KernelConfig;
use atomwall::model::{to_physical, to_reduced, AtomSpec, Environment, ReducedPoint, StateLabel};
use atomwall::shifts::{shift_si, shift_states, shift_tf};

const RB_OMEGA0: f64 = 2.37e15;

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.log10()..hi.log10()).prop_map(|e| 10f64.powf(e))
}

fn theta_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![log_uniform(1e-2, 1e4), Just(f64::INFINITY)]
}

fn atom_strategy() -> impl Strategy<Value = AtomSpec> {
    (0.0..1.0f64, 0.0..1.0f64, 0.01..1.0f64).prop_map(|(x, y, z)| AtomSpec::new(RB_OMEGA0, x, y, z).unwrap())
}

fn cfg() -> KernelConfig {
    KernelConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ground_and_excited_tf_are_opposite(zeta in log_uniform(1e-3, 1e2), theta in theta_strategy(), atom in atom_strategy()) {
        let p = ReducedPoint::new(zeta, theta).unwrap();
        let g = shift_tf(StateLabel::Ground, &atom, p, &cfg()).unwrap().0;
        let e = shift_tf(StateLabel::Excited, &atom, p, &cfg()).unwrap().0;
        prop_assert_eq!(g, -e);
    }

    #[test]
    fn rr_is_shared_by_all_states(zeta in log_uniform(1e-3, 1e2), theta in theta_strategy(), atom in atom_strategy()) {
        let p = ReducedPoint::new(zeta, theta).unwrap();
        let v = shift_states(&StateLabel::ALL, &atom, p, &cfg()).unwrap();
        prop_assert_eq!(v[0].rr, v[1].rr);
        prop_assert_eq!(v[1].rr, v[2].rr);
    }

    #[test]
    fn physical_shift_is_linear_in_alpha(
        a in atom_strategy(),
        b in atom_strategy(),
        t in 0.0..1000.0f64,
        z in log_uniform(1e-10, 1e-5),
    ) {
        let env = Environment::new(t, z).unwrap();
        let [ax, ay, az] = a.alpha();
        let [bx, by, bz] = b.alpha();
        let sum = AtomSpec::new(RB_OMEGA0, ax + bx, ay + by, az + bz).unwrap();
        for state in StateLabel::ALL {
            let ea = shift_si(state, &a, &env, &cfg()).unwrap();
            let eb = shift_si(state, &b, &env, &cfg()).unwrap();
            let es = shift_si(state, &sum, &env, &cfg()).unwrap();
            let scale = ea.tf.abs() + eb.tf.abs() + ea.rr.abs() + eb.rr.abs();
            prop_assert!((es.total - ea.total - eb.total).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn reduced_output_is_scale_invariant(
        k in (-3i32..=3).prop_map(|e| 2f64.powi(e)),
        t in 1.0..1000.0f64,
        z in log_uniform(1e-10, 1e-5),
    ) {
        // powers of two keep every product exact, so the outputs agree bitwise
        let atom = AtomSpec::isotropic(RB_OMEGA0, 1.0).unwrap();
        let scaled = atom.with_omega0(k * RB_OMEGA0).unwrap();
        let p = to_reduced(&atom, &Environment::new(t, z).unwrap()).unwrap();
        let q = to_reduced(&scaled, &Environment::new(k * t, z / k).unwrap()).unwrap();
        prop_assert_eq!(p, q);
        let a = shift_states(&StateLabel::ALL, &atom, p, &cfg()).unwrap();
        let b = shift_states(&StateLabel::ALL, &scaled, q, &cfg()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.total.to_bits(), y.total.to_bits());
            prop_assert_eq!(x.tf.to_bits(), y.tf.to_bits());
        }
    }

    #[test]
    fn reduced_physical_round_trip(t in 0.0..1e4f64, z in log_uniform(1e-12, 1e-3)) {
        let atom = AtomSpec::isotropic(RB_OMEGA0, 1.0).unwrap();
        let env = Environment::new(t, z).unwrap();
        let back = to_physical(&atom, to_reduced(&atom, &env).unwrap());
        prop_assert!((back.distance / z - 1.0).abs() < 1e-14);
        if t == 0.0 {
            prop_assert_eq!(back.temperature, 0.0);
        } else {
            prop_assert!((back.temperature / t - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn cold_ground_total_is_negative(zeta in log_uniform(1e-3, 1e2), atom in atom_strategy()) {
        let p = ReducedPoint::zero_temperature(zeta).unwrap();
        let v = shift_states(&[StateLabel::Ground], &atom, p, &cfg()).unwrap();
        prop_assert!(v[0].total < 0.0);
    }
}

#[test]
fn cold_intermediate_total_is_small() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let atom = AtomSpec::isotropic(RB_OMEGA0, 1.0).unwrap();
    for _ in 0..64 {
        let p = ReducedPoint::new(rng.gen_range(20.0..100.0), 1e6).unwrap();
        let g = &shift_states(&[StateLabel::Ground], &atom, p, &cfg()).unwrap()[0];
        assert!(g.total.abs() <= 0.05 * g.tf.abs().max(g.rr.abs()), "{p} {g:?}");
    }
}
