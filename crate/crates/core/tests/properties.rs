use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::{Matrix4, Vector3};
use nffd::analysis::{state_fidelity, TwoQubitPureState};
use nffd::fields::{
    lattice_potential, nffd_potential, potential_map, rs_amplitude, rs_amplitude_with, ApertureSpec, GridSpec,
    LatticeConfig, QuadratureOptions, TrapLaserParams,
};
use nffd::gates::{
    collision_phase_gate, effective_hamiltonian, evolve, kron, mandel_output, rx, rz, synthesize_zxz,
    unitarity_deviation, CollisionParams, PulseSettings, RamanParams, TwoLevelUnitary,
};
use nffd::machine::{
    default_lattice, run_two_qubit_gate, schedule_parallel, Layout, ProtocolSettings, Register, StepParams, TrapArray,
};
use nffd::oracles;
use nffd::statedep::{
    collision_schedule, component_minimum, component_potential, qubit_potential, Component, ComponentWeights,
    StateDepConfig, WeightScheme, SAMPLES_PER_QUARTER_TURN,
};
use nffd::Complex64;
use proptest::prelude::*;

const K: f64 = 2.0 * PI;

fn unitary() -> impl Strategy<Value = TwoLevelUnitary> {
    (-PI..PI, 0.0..PI, -PI..PI, -PI..PI).prop_map(|(a, b, d, g)| {
        let m = (rz(a) * rx(b) * rz(d)).matrix() * Complex64::from_polar(1.0, g);
        TwoLevelUnitary::new(m).unwrap()
    })
}

fn pure_state() -> impl Strategy<Value = TwoQubitPureState> {
    prop::array::uniform4((-1.0..1.0f64, -1.0..1.0f64))
        .prop_filter("non-zero", |a| a.iter().any(|(r, i)| r.abs() + i.abs() > 1e-3))
        .prop_map(|a| {
            let amps = a.map(|(r, i)| Complex64::new(r, i));
            let n = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            TwoQubitPureState::new(amps.map(|c| c / n)).unwrap()
        })
}

fn square(rows: usize, cols: usize) -> TrapArray {
    let layout = Layout::Square { pitch: 1.0, rows, cols };
    TrapArray::new(layout, ApertureSpec::new(1.0).unwrap(), default_lattice()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn potential_is_never_positive(z in 0.2..6.0f64, rho in 0.0..2.5f64, a in 1.0..2.0f64) {
        let tl = TrapLaserParams::default();
        let u = nffd_potential(&Vector3::new(rho, 0.0, z), &ApertureSpec::new(a).unwrap(), &tl).unwrap();
        prop_assert!(u <= 0.0);
    }

    #[test]
    fn field_is_axisymmetric(z in 0.3..4.0f64, rho in 0.05..2.0f64, phi in 0.0..2.0 * PI) {
        let ap = ApertureSpec::new(1.5).unwrap();
        let a = rs_amplitude(&Vector3::new(rho, 0.0, z), &ap).unwrap();
        let b = rs_amplitude(&Vector3::new(rho * phi.cos(), rho * phi.sin(), z), &ap).unwrap();
        prop_assert!((a.value - b.value).norm() <= 1e-10 * a.value.norm().max(1.0));
    }

    #[test]
    fn tighter_tolerance_stays_within_error_estimate(z in 0.3..4.0f64, rho in 0.0..1.8f64) {
        let ap = ApertureSpec::new(1.0).unwrap();
        let p = Vector3::new(rho, 0.0, z);
        let coarse = rs_amplitude_with(&p, &ap, &QuadratureOptions::with_tol(1e-8)).unwrap();
        let fine = rs_amplitude_with(&p, &ap, &QuadratureOptions::with_tol(5e-9)).unwrap();
        prop_assert!((coarse.value - fine.value).norm() <= coarse.error_estimate);
    }

    #[test]
    fn lattice_is_periodic(x in -3.0..3.0f64, y in -3.0..3.0f64, z in -3.0..3.0f64, k in 1.0..10.0f64) {
        let cfg = LatticeConfig::new(k, [Some(1.3), None, Some(0.4)]).unwrap();
        let p = Vector3::new(x, y, z);
        let v = lattice_potential(&p, &cfg);
        for axis in 0..3 {
            let mut q = p;
            q[axis] += cfg.period();
            prop_assert!((lattice_potential(&q, &cfg) - v).abs() <= 1e-12);
        }
    }
}

#[test]
fn potential_map_is_mirror_symmetric_in_r() {
    let grid = GridSpec::uniform((-1.2, 1.2, 7), (0.4, 2.0, 5));
    let map = potential_map(&ApertureSpec::new(1.0).unwrap(), &TrapLaserParams::default(), &grid).unwrap();
    let n = map.r.len();
    for i in 0..n {
        for (a, b) in map.row(i).iter().zip(map.row(n - 1 - i)) {
            assert!((a - b).abs() <= 1e-10 * map.u0.abs());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn closed_form_well_matches_scan(theta in -PI..PI, wp in 0.0..1.0f64, wm in 0.0..1.0f64) {
        let w = ComponentWeights::new(wp, wm);
        let cfg = StateDepConfig::new(1.0, K, WeightScheme::Mandel).unwrap();
        let period = cfg.period();
        // near-degenerate weights have no well
        prop_assume!(component_minimum(theta, w, K, 0.0).is_ok());
        let x = component_minimum(theta, w, K, 0.0).unwrap();
        let n = 100_000;
        let scan = oracles::dense_scan_argmin(|x| component_potential(x, theta, w, &cfg), 0.0, period, n);
        prop_assert!(oracles::periodic_distance(x, scan, period) <= 2.0 * period / n as f64);
    }

    #[test]
    fn raman_components_mirror(theta in -FRAC_PI_4 + 1e-9..FRAC_PI_4 - 1e-9) {
        let s = WeightScheme::RamanBasis;
        let x0 = component_minimum(theta, s.weights(Component::Zero), K, 0.0).unwrap();
        let x1 = component_minimum(theta, s.weights(Component::One), K, 0.0).unwrap();
        prop_assert!((x0 + x1).abs() <= 1e-12);
    }

    #[test]
    fn raman_potentials_coincide_at_zero_angle(x in -2.0..2.0f64) {
        let cfg = StateDepConfig::new(1.7, K, WeightScheme::RamanBasis).unwrap();
        let (v0, v1) = qubit_potential(x, 0.0, &cfg);
        prop_assert!((v0 - v1).abs() <= 1e-12);
    }

    #[test]
    fn schedules_are_continuous(i in -6i64..6, gap in 1i64..6, mandel in any::<bool>()) {
        let scheme = if mandel { WeightScheme::Mandel } else { WeightScheme::RamanBasis };
        let cfg = StateDepConfig::new(1.0, K, scheme).unwrap();
        let ramp = collision_schedule(i, i + gap, cfg.period(), K, &cfg).unwrap();
        for r in [&ramp.forward, &ramp.reverse, &ramp.full()] {
            for w in r.samples().windows(2) {
                prop_assert!(w[1].0 > w[0].0);
                prop_assert!((w[1].1 - w[0].1).abs() <= FRAC_PI_2 / SAMPLES_PER_QUARTER_TURN as f64 + 1e-15);
            }
        }
    }
}

#[test]
fn mandel_potentials_differ_only_where_sigma_shifts_agree() {
    let cfg = StateDepConfig::new(1.0, K, WeightScheme::Mandel).unwrap();
    for i in 0..200 {
        let x = i as f64 * 0.005;
        let (v0, v1) = qubit_potential(x, 0.0, &cfg);
        let (vp, vm) = nffd::statedep::v_plus_minus(x, 0.0, &cfg);
        if (vp - vm).abs() <= 1e-12 {
            assert!((v0 - v1).abs() <= 1e-12);
        }
    }
}

#[test]
fn raman_components_move_apart() {
    let s = WeightScheme::RamanBasis;
    let h = 1e-6;
    let slope = |c| {
        let w = s.weights(c);
        (component_minimum(h, w, K, 0.0).unwrap() - component_minimum(-h, w, K, 0.0).unwrap()) / (2.0 * h)
    };
    assert!(slope(Component::One) > 0.0);
    assert!(slope(Component::Zero) < 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn evolve_is_unitary_and_composes(
        o0 in 0.1..3.0f64, o1 in 0.1..3.0f64, d in 2.0..50.0f64, e in -1.0..1.0f64,
        t1 in 0.0..50.0f64, t2 in 0.0..50.0f64,
    ) {
        let h = effective_hamiltonian(&RamanParams::new(o0, o1, -d, e).unwrap()).unwrap();
        let u = evolve(&h, t1 + t2);
        prop_assert!(unitarity_deviation(u.matrix()) <= 1e-12);
        let split = evolve(&h, t2) * evolve(&h, t1);
        prop_assert!((u.matrix() - split.matrix()).iter().all(|z| z.norm() <= 1e-11));
    }

    #[test]
    fn evolve_matches_trotter_product(o0 in 0.1..2.0f64, o1 in 0.1..2.0f64, d in 2.0..30.0f64, e in -0.5..0.5f64, t in 0.0..20.0f64) {
        let h = effective_hamiltonian(&RamanParams::new(o0, o1, d, e).unwrap()).unwrap();
        let want = oracles::trotter_product(&h, t, 64);
        prop_assert!((evolve(&h, t).matrix() - want).iter().all(|z| z.norm() <= 1e-8));
    }

    #[test]
    fn synthesized_recipe_reproduces_target(u in unitary()) {
        let recipe = synthesize_zxz(&u, &PulseSettings::default()).unwrap();
        let got = recipe.unitary();
        prop_assert!(unitarity_deviation(got.matrix()) <= 1e-12);
        let overlap = nffd::gates::phase_insensitive_overlap(got.matrix(), u.matrix());
        prop_assert!((overlap - 1.0).abs() <= 1e-10);
        for p in &recipe.pulses {
            prop_assert!(p.duration >= 0.0);
        }
    }

    #[test]
    fn collision_gate_is_diagonal(x in 0.0..10.0f64, phases in prop::array::uniform4(-PI..PI)) {
        let g = collision_phase_gate(&CollisionParams::new(1.0, x).unwrap());
        prop_assert!(unitarity_deviation(&g) <= 1e-12);
        let d = Matrix4::from_diagonal(&nalgebra::Vector4::from(phases.map(|p| Complex64::from_polar(1.0, p))));
        prop_assert!((g * d - d * g).iter().all(|z| z.norm() <= 1e-15));
    }

    #[test]
    fn gate_output_is_normalized(u in -5.0..5.0f64, t in 0.0..10.0f64) {
        let s = mandel_output(&CollisionParams::new(u, t).unwrap());
        let n: f64 = s.amplitudes().iter().map(|a| a.norm_sqr()).sum();
        prop_assert!((n - 1.0).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn concurrence_is_local_unitary_invariant(s in pure_state(), u in unitary(), v in unitary()) {
        let moved = TwoQubitPureState::new(oracles::apply4(&kron(&u, &v), s.amplitudes())).unwrap();
        prop_assert!((s.concurrence() - moved.concurrence()).abs() <= 1e-10);
        prop_assert!((s.concurrence() - oracles::concurrence_from_purity(s.amplitudes())).abs() <= 1e-9);
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded(s in pure_state(), t in pure_state()) {
        let a = state_fidelity(s.amplitudes(), t.amplitudes()).unwrap();
        let b = state_fidelity(t.amplitudes(), s.amplitudes()).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!((a - b).abs() <= 1e-15);
    }
}

fn random_register(bits: &[u8], u: &[TwoLevelUnitary], sites: Vec<usize>) -> Register {
    let bits: Vec<bool> = bits.iter().map(|&b| b == 1).collect();
    let mut reg = Register::from_bits(&bits, sites).unwrap();
    for (q, g) in u.iter().enumerate() {
        reg.apply_one_qubit(q, g).unwrap();
    }
    reg
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gate_protocol_invariants(
        bits in prop::collection::vec(0u8..2, 4),
        rots in prop::collection::vec(unitary(), 4),
        pair in (0usize..4, 0usize..4).prop_filter("distinct", |(a, b)| a != b),
        x in 0.0..2.0 * PI,
        pre in any::<bool>(),
    ) {
        // four qubits scattered over a 3×3 grid
        let sites = vec![0, 2, 4, 7];
        let mut array = square(3, 3);
        let mut reg = random_register(&bits, &rots, sites);
        let (i, j) = pair;
        let spectators: Vec<usize> = (0..4).filter(|&q| q != i && q != j).collect();
        let before = reg.reduced_density(&spectators).unwrap();
        let cp = CollisionParams::new(1.0, x).unwrap();
        let trace = run_two_qubit_gate(&mut reg, &mut array, i, j, &cp, pre, &ProtocolSettings::default()).unwrap();

        prop_assert!((reg.norm_sqr() - 1.0).abs() <= 1e-10);
        let after = reg.reduced_density(&spectators).unwrap();
        prop_assert!((after - before).iter().all(|z| z.norm() <= 1e-10));

        let ids: Vec<u8> = trace.steps.iter().map(|s| s.step).collect();
        prop_assert_eq!(ids, vec![1, 2, 3, 4, 5, 6]);
        let (StepParams::Collide { legs: fwd, .. }, StepParams::Return { legs: back, .. }) =
            (&trace.steps[3].params, &trace.steps[4].params) else { panic!("step layout") };
        for (f, b) in fwd.iter().zip(back) {
            let fs: Vec<f64> = f.ramp.thetas().collect();
            let mut bs: Vec<f64> = b.ramp.thetas().collect();
            bs.reverse();
            prop_assert_eq!(fs, bs);
        }
    }

    #[test]
    fn zero_hold_gate_undone_by_inverse_hadamards(
        bits in prop::collection::vec(0u8..2, 3),
        rots in prop::collection::vec(unitary(), 3),
        pair in (0usize..3, 0usize..3).prop_filter("distinct", |(a, b)| a != b),
        u in -3.0..3.0f64,
    ) {
        let mut array = square(2, 3);
        let initial = random_register(&bits, &rots, vec![0, 4, 5]);
        let mut reg = initial.clone();
        let (i, j) = pair;
        let cp = CollisionParams::new(u, 0.0).unwrap();
        let settings = ProtocolSettings::default();
        let trace = run_two_qubit_gate(&mut reg, &mut array, i, j, &cp, true, &settings).unwrap();
        let StepParams::Hadamard { recipe: Some(recipe), .. } = &trace.steps[0].params else { panic!("no recipe") };
        let inverse = recipe.unitary().adjoint();
        reg.apply_one_qubit(i, &inverse).unwrap();
        reg.apply_one_qubit(j, &inverse).unwrap();
        for (a, b) in reg.amplitudes().iter().zip(initial.amplitudes()) {
            prop_assert!((a - b).norm() <= 1e-10);
        }
    }

    #[test]
    fn disjoint_one_qubit_gates_commute(u in unitary(), v in unitary(), q in 0usize..4, dq in 1usize..4) {
        let p = (q + dq) % 4;
        let base = random_register(&[0, 1, 0, 1], &[], vec![0, 1, 2, 3]);
        let mut a = base.clone();
        a.apply_one_qubit(q, &u).unwrap();
        a.apply_one_qubit(p, &v).unwrap();
        let mut b = base;
        b.apply_one_qubit(p, &v).unwrap();
        b.apply_one_qubit(q, &u).unwrap();
        prop_assert!(a.amplitudes().iter().zip(b.amplitudes()).all(|(x, y)| (x - y).norm() <= 1e-12));
    }

    #[test]
    fn schedule_batches_are_conflict_free(
        raw in prop::collection::vec((0usize..36, 1usize..36), 1..10),
    ) {
        let array = square(6, 6);
        let pairs: Vec<(usize, usize)> = raw.iter().map(|&(i, d)| (i, (i + d) % 36)).collect();
        let batches = schedule_parallel(&array, &pairs).unwrap();
        let mut seen: Vec<(usize, usize)> = batches.concat();
        let mut want = pairs.clone();
        seen.sort();
        want.sort();
        prop_assert_eq!(seen, want);
        for b in &batches {
            for (n, p) in b.iter().enumerate() {
                for q in &b[n + 1..] {
                    for x in [p.0, p.1] {
                        for y in [q.0, q.1] {
                            prop_assert!(x != y && x / 6 != y / 6 && x % 6 != y % 6);
                        }
                    }
                }
            }
        }
    }
}
