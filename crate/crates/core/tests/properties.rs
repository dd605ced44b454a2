use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use qdchoice::channels::{
    ancilla_z_dephase, gradient_measurement_block, refocus_unitary, DephaseSpec,
};
use qdchoice::experiment::{
    detection_closed_form, detection_probability, expected_fringe_amplitude, fit_cosine,
    run_circuit, DelayedChoiceConfig,
};
use qdchoice::numcore::{
    c, cis, frame_distance, gates, gp_distance, kron, rotation, ComplexMatrix,
};
use qdchoice::pulselang::{
    compile_gate, parse_sequence, sequence_unitary, Axis, GateName, PulseEvent, PulseSequence,
};
use qdchoice::spinmodel::{pseudo_pure, DeviationMatrix, Ket, Spin, SpinSystem};
use qdchoice::tomo::{measure_expectations, reconstruct};

fn axis_vec() -> impl Strategy<Value = [f64; 3]> {
    (0.0..PI, 0.0..TAU).prop_map(|(t, p)| [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()])
}

fn su2() -> impl Strategy<Value = ComplexMatrix> {
    (axis_vec(), -TAU..TAU).prop_map(|(n, a)| rotation(n, a))
}

fn general2() -> impl Strategy<Value = ComplexMatrix> {
    prop::array::uniform8(-1.0..1.0f64).prop_map(|v| {
        ComplexMatrix::new(2, (0..4).map(|k| c(v[2 * k], v[2 * k + 1])).collect()).unwrap()
    })
}

fn unitary4() -> impl Strategy<Value = ComplexMatrix> {
    (su2(), su2(), su2(), su2(), 0usize..3).prop_map(|(a, b, c2, d, k)| {
        let local1 = kron(&a, &b).unwrap();
        let local2 = kron(&c2, &d).unwrap();
        let ent = [
            gates::identity(),
            gates::cnot(),
            gates::controlled_hadamard(),
        ][k]
            .clone();
        &(&local2 * &ent) * &local1
    })
}

fn axis() -> impl Strategy<Value = Axis> {
    prop_oneof![
        Just(Axis::X),
        Just(Axis::MinusX),
        Just(Axis::Y),
        Just(Axis::MinusY),
        Just(Axis::Z)
    ]
}

fn spin() -> impl Strategy<Value = Spin> {
    prop_oneof![Just(Spin::A), Just(Spin::S)]
}

fn unitary_event() -> impl Strategy<Value = PulseEvent> {
    prop_oneof![
        (spin(), axis(), -359.0..=360.0f64)
            .prop_map(|(s, a, deg)| PulseEvent::rotation(s, a, deg).unwrap()),
        (1u32..5).prop_map(|k| PulseEvent::j_evolution(k).unwrap()),
        spin().prop_map(|target| PulseEvent::RefocusPiX { target }),
    ]
}

fn any_event() -> impl Strategy<Value = PulseEvent> {
    prop_oneof![4 => unitary_event(), 1 => Just(PulseEvent::GradientZ)]
}

fn ket() -> impl Strategy<Value = Ket> {
    prop::array::uniform8(-1.0..1.0f64)
        .prop_filter("non-zero", |v| v.iter().any(|x| x.abs() > 1e-3))
        .prop_map(|v| Ket(std::array::from_fn(|k| c(v[2 * k], v[2 * k + 1]))).normalized())
}

fn pure_state() -> impl Strategy<Value = DeviationMatrix> {
    ket().prop_map(|k| pseudo_pure(&k).unwrap())
}

fn hermitian_trace_one() -> impl Strategy<Value = DeviationMatrix> {
    prop::array::uniform16(-1.0..1.0f64).prop_map(|v| {
        // diagonal in v[0..4], upper-triangle pairs in v[4..10] + i·v[10..16]
        let pair = |r: usize, col: usize| r * (7 - r) / 2 + col - r - 1;
        let mut m = ComplexMatrix::from_fn(4, |r, col| match r.cmp(&col) {
            std::cmp::Ordering::Equal => c(v[r], 0.0),
            std::cmp::Ordering::Less => c(v[4 + pair(r, col)], v[10 + pair(r, col)]),
            std::cmp::Ordering::Greater => c(v[4 + pair(col, r)], -v[10 + pair(col, r)]),
        })
        .unwrap();
        let shift = (1.0 - m.trace().re) / 4.0;
        m = &m + &ComplexMatrix::identity(4).unwrap().scale(c(shift, 0.0));
        DeviationMatrix::raw(m).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn kron_mixed_product(a in general2(), b in general2(), x in general2(), y in general2()) {
        let lhs = &kron(&a, &b).unwrap() * &kron(&x, &y).unwrap();
        let rhs = kron(&(&a * &x), &(&b * &y)).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-14);
    }

    #[test]
    fn kron_of_unitaries_is_unitary(a in su2(), b in su2()) {
        prop_assert!(kron(&a, &b).unwrap().unitarity_error() < 1e-14);
    }

    #[test]
    fn gp_distance_metric_like(u in unitary4(), v in unitary4(), phi in -PI..PI, psi in -PI..PI) {
        let d = gp_distance(&u, &v).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert!((d - gp_distance(&v, &u).unwrap()).abs() < 1e-14);
        let shifted = gp_distance(&u.scale(cis(phi)), &v.scale(cis(psi))).unwrap();
        prop_assert!((d - shifted).abs() < 1e-13);
        prop_assert!(gp_distance(&u, &u.scale(cis(phi))).unwrap() < 1e-14);
    }

    #[test]
    fn sequences_are_unitary(events in prop::collection::vec(unitary_event(), 0..24)) {
        let seq = PulseSequence::new("p", events);
        let u = sequence_unitary(&seq, &SpinSystem::default()).unwrap();
        prop_assert!(u.unitarity_error() < 1e-12);
    }

    #[test]
    fn sequence_product_composes(
        a in prop::collection::vec(unitary_event(), 0..8),
        b in prop::collection::vec(unitary_event(), 0..8),
    ) {
        let sys = SpinSystem::default();
        let sa = PulseSequence::new("a", a);
        let sb = PulseSequence::new("b", b);
        let joined = sequence_unitary(&sa.clone().then(&sb), &sys).unwrap();
        let product = &sequence_unitary(&sb, &sys).unwrap() * &sequence_unitary(&sa, &sys).unwrap();
        prop_assert!(joined.max_abs_diff(&product).unwrap() < 1e-13);
    }

    #[test]
    fn render_parse_round_trip(events in prop::collection::vec(any_event(), 0..24)) {
        let seq = PulseSequence::new("round trip", events);
        let back = parse_sequence(&seq.render()).unwrap();
        prop_assert_eq!(back.events, seq.events);
    }

    #[test]
    fn parser_never_panics(text in "\\PC{0,80}") {
        let _ = parse_sequence(&text);
    }

    #[test]
    fn parser_errors_point_inside_the_input(text in "[a-zA-Z0-9/ .+-]{0,30}") {
        if let Err(e) = parse_sequence(&text) {
            prop_assert_eq!(e.line, 1);
            prop_assert!(e.column >= 1 && e.column <= text.chars().count() + 1);
        }
    }

    #[test]
    fn pulse_cnot_is_in_its_class_for_any_coupling(j in 1.0..2000.0f64) {
        let sys = SpinSystem::new(j, 1e-5).unwrap();
        let u = sequence_unitary(&compile_gate(GateName::CnotAs, &sys), &sys).unwrap();
        prop_assert!(gp_distance(&u, &GateName::CnotAs.pulse_class_unitary()).unwrap() < 1e-12);
        prop_assert!(frame_distance(&u, &gates::cnot()).unwrap().0 < 1e-12);
    }

    #[test]
    fn dephasing_is_idempotent_trace_preserving_positive(d in pure_state()) {
        let once = ancilla_z_dephase(&d);
        let twice = ancilla_z_dephase(&once);
        prop_assert!(once.matrix().max_abs_diff(twice.matrix()).unwrap() < 1e-15);
        prop_assert!((once.trace() - 1.0).abs() < 1e-14);
        prop_assert!(once.min_eigenvalue() > -1e-12);
        prop_assert_eq!(once.populations(), d.populations());
    }

    #[test]
    fn dephasing_is_linear(a in hermitian_trace_one(), b in hermitian_trace_one(), t in 0.0..1.0f64) {
        let mix = |x: &ComplexMatrix, y: &ComplexMatrix| {
            &x.scale(c(t, 0.0)) + &y.scale(c(1.0 - t, 0.0))
        };
        let lhs = ancilla_z_dephase(&DeviationMatrix::raw(mix(a.matrix(), b.matrix())).unwrap());
        let rhs = mix(ancilla_z_dephase(&a).matrix(), ancilla_z_dephase(&b).matrix());
        prop_assert!(lhs.matrix().max_abs_diff(&rhs).unwrap() < 1e-14);
    }

    #[test]
    fn gradient_block_matches_ideal_for_three_or_more_samples(
        d in hermitian_trace_one(),
        samples in 3usize..12,
        r in -2.0..2.0f64,
    ) {
        let spec = DephaseSpec::gradient(samples).unwrap().with_gamma_ratio(r);
        let raw = gradient_measurement_block(&d, &spec).unwrap();
        let expect = ancilla_z_dephase(&d).evolve(&refocus_unitary()).unwrap();
        prop_assert!(raw.matrix().max_abs_diff(expect.matrix()).unwrap() < 1e-12);
    }

    #[test]
    fn tomography_inverts_measurement(a in pure_state(), b in pure_state(), t in 0.0..=1.0f64) {
        let d = DeviationMatrix::projector_normalized(
            &a.matrix().scale(c(t, 0.0)) + &b.matrix().scale(c(1.0 - t, 0.0)),
        )
        .unwrap();
        let back = reconstruct(&measure_expectations(&d).unwrap()).unwrap();
        prop_assert!(back.matrix().max_abs_diff(d.matrix()).unwrap() < 1e-12);
    }

    #[test]
    fn detection_is_periodic_and_even(alpha in 0.0..=PI, theta in 0.0..=PI) {
        let sys = SpinSystem::default();
        let p = |t: f64| {
            detection_probability(&run_circuit(&DelayedChoiceConfig::gate(alpha, t).unwrap(), &sys).unwrap()).unwrap()
        };
        let here = p(theta);
        prop_assert!((here - p(TAU - theta)).abs() < 1e-12);
        prop_assert!((here - detection_closed_form(alpha, theta)).abs() < 1e-12);
        prop_assert!((p(0.0) - p(TAU)).abs() < 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&here));
    }

    #[test]
    fn fringe_amplitude_grows_with_alpha(a1 in 0.0..=PI, a2 in 0.0..=PI) {
        let (lo, hi) = if a1 <= a2 { (a1, a2) } else { (a2, a1) };
        let thetas: Vec<f64> = (0..9).map(|k| k as f64 * TAU / 8.0).collect();
        let amp = |a: f64| {
            let pts: Vec<(f64, f64)> = thetas.iter().map(|&t| (t, detection_closed_form(a, t))).collect();
            fit_cosine(&pts).unwrap().amplitude
        };
        prop_assert!(expected_fringe_amplitude(lo) <= expected_fringe_amplitude(hi));
        prop_assert!(amp(lo) <= amp(hi) + 1e-12);
    }
}
