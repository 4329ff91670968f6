mod common;

use mbqc_canon::canon::{
    canonicalize, canonicalize_with_order, decide_equiv, eliminate_interior, reduce_phasepoly,
    rgslc_to_phasepoly, to_rgslc, CanonError, CanonicalDiagram,
};
use mbqc_canon::clifford::{Basis, Effect, LocalClifford, Sign};
use mbqc_canon::diagram::Diagram;
use mbqc_canon::evaluate::evaluate;
use mbqc_canon::exact::ExactState;
use mbqc_canon::flow::find_flow;
use mbqc_canon::random::{self, DiagramParams};
use mbqc_canon::rewrite::{apply_step, replay};
use proptest::prelude::*;
use rand::seq::SliceRandom;

use common::{four_qubit_state, load, same_up_to_scalar};

fn state(d: &Diagram) -> ExactState {
    evaluate(d).unwrap()
}

#[test]
fn pipeline_matches_direct_construction() {
    let mut rng = random::rng(7);
    for i in 0..600 {
        let n = 1 + i % 7;
        let d = random::flowed_diagram(&mut rng, DiagramParams::new(n));
        let c = canonicalize(&d).unwrap_or_else(|e| panic!("{e} on {d:?}"));
        assert_eq!(replay(&d, &c.trace).unwrap(), c.diagram);
        let s = state(&d);
        assert!(s.proportional(&state(&c.diagram)).unwrap());
        assert_eq!(CanonicalDiagram::from_state(&s).unwrap(), c.canonical);
    }
}

#[test]
fn each_stage_preserves_semantics_and_shape() {
    let mut rng = random::rng(8);
    for i in 0..300 {
        let d = random::flowed_diagram(&mut rng, DiagramParams::new(2 + i % 6));
        let s = state(&d);
        let (d1, t1) = eliminate_interior(&d).unwrap();
        assert_eq!(replay(&d, &t1).unwrap(), d1);
        assert_eq!(d1.interior().count(), 0);
        assert!(d1.graph().inputs().is_empty());
        assert_eq!(d1.wires().len(), d.wires().len());
        assert!(same_up_to_scalar(&s, &state(&d1)));

        let (d2, t2) = to_rgslc(&d1).unwrap();
        assert_eq!(replay(&d1, &t2).unwrap(), d2);
        assert!(same_up_to_scalar(&s, &state(&d2)));

        // Accepting the result is this stage's precondition check.
        let (p, d3, t3) = rgslc_to_phasepoly(&d2).unwrap();
        assert_eq!(replay(&d2, &t3).unwrap(), d3);
        assert!(same_up_to_scalar(&s, &p.evaluate()));
        assert!(same_up_to_scalar(&s, &state(&d3)));
    }
}

#[test]
fn stages_reject_diagrams_outside_their_domain() {
    let mut d = Diagram::new();
    d.add_output(0, LocalClifford::IDENTITY).unwrap();
    d.add_measured(1, Effect::new(Basis::X, Sign::Plus))
        .unwrap();
    assert_eq!(canonicalize(&d).map(|_| ()), Err(CanonError::NoFlow));
    d.add_edge(0, 1).unwrap();
    assert!(matches!(to_rgslc(&d), Err(CanonError::Precondition(_))));
    assert!(canonicalize(&d).is_ok());
}

#[test]
fn four_qubit_state_canonical_form() {
    let c = CanonicalDiagram::from_state(&four_qubit_state()).unwrap();
    assert!(same_up_to_scalar(
        &c.phase_poly().evaluate(),
        &four_qubit_state()
    ));
    assert_eq!(c.phase_poly().offending_connections(&[0, 1, 2, 3]), 0);
}

#[test]
fn reduction_strictly_decreases_offending_connections() {
    let mut rng = random::rng(9);
    let mut nontrivial = 0;
    for i in 0..800 {
        let n = 1 + i % 8;
        let p = random::phase_poly_diagram(&mut rng, n);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let r = reduce_phasepoly(&p.to_diagram(), &order).unwrap();
        let counts = &r.offending_counts;
        assert_eq!(counts[0], p.offending_connections(&order));
        assert_eq!(*counts.last().unwrap(), 0);
        assert!(counts.windows(2).all(|w| w[1] < w[0]), "{counts:?}");
        assert_eq!(r.diagram.offending_connections(&order), 0);
        assert!(same_up_to_scalar(&p.evaluate(), &r.diagram.evaluate()));
        nontrivial += (counts.len() > 2) as usize;
    }
    assert!(nontrivial > 50);
}

#[test]
fn different_orders_give_equivalent_canonical_forms() {
    let mut rng = random::rng(10);
    for i in 0..200 {
        let d = random::flowed_diagram(&mut rng, DiagramParams::new(2 + i % 6));
        let n = d.wires().len();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let (p, e, trace) = canonicalize_with_order(&d, &order).unwrap();
        assert_eq!(p.offending_connections(&order), 0);
        assert_eq!(replay(&d, &trace).unwrap(), e);
        let default = canonicalize(&d).unwrap();
        assert!(same_up_to_scalar(
            &p.evaluate(),
            &default.canonical.phase_poly().evaluate()
        ));
    }
}

#[test]
fn canonical_forms_separate_inequivalent_diagrams() {
    let mut rng = random::rng(11);
    let (mut same, mut different) = (0, 0);
    for _ in 0..600 {
        let n = rng_size(&mut rng);
        let a = random::flowed_diagram(&mut rng, DiagramParams::new(n));
        let b = random::flowed_diagram(&mut rng, DiagramParams::new(n));
        if a.wires().len() != b.wires().len() {
            continue;
        }
        let equal = canonicalize(&a).unwrap().canonical == canonicalize(&b).unwrap().canonical;
        assert_eq!(equal, same_up_to_scalar(&state(&a), &state(&b)));
        if equal {
            same += 1;
        } else {
            different += 1;
        }
    }
    assert!(
        same > 10 && different > 100,
        "{same} equal, {different} different"
    );
}

fn rng_size<R: rand::Rng>(rng: &mut R) -> usize {
    rng.gen_range(1..=4)
}

/// Replays `trace` from `d`, checking flow at every intermediate diagram.
fn replay_with_flow(d: &Diagram, trace: &[mbqc_canon::rewrite::RewriteStep]) -> Diagram {
    let mut cur = d.clone();
    for (i, step) in trace.iter().enumerate() {
        cur = apply_step(&cur, step).unwrap();
        assert!(
            find_flow(cur.graph()).is_some(),
            "no flow after step {i}: {step:?}"
        );
    }
    cur
}

#[test]
fn worked_pair_is_connected_by_a_flow_preserving_trace() {
    let d = load("worked_d.json");
    let e = load("worked_d_prime.json");
    let s = state(&d);
    assert!(same_up_to_scalar(&s, &four_qubit_state()));
    assert!(same_up_to_scalar(&s, &state(&e)));
    let trace = decide_equiv(&d, &e).unwrap();
    assert_eq!(replay_with_flow(&d, &trace), e);
    let back = decide_equiv(&e, &d).unwrap();
    assert_eq!(replay_with_flow(&e, &back), d);
}

#[test]
fn inequivalent_diagrams_are_reported() {
    let d = load("worked_d.json");
    let mut e = load("worked_d_prime.json");
    e.set_effect(2, Effect::new(Basis::Y, Sign::Minus)).unwrap();
    assert!(!same_up_to_scalar(&state(&d), &state(&e)));
    assert_eq!(decide_equiv(&d, &e), Err(CanonError::NotEquivalent));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn canonical_form_is_invariant_under_rewrites(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = random::rng(seed);
        let d = random::flowed_diagram(&mut rng, DiagramParams::new(n));
        let (e, trace) = random::random_rewrites(&mut rng, &d, 10, 9);
        prop_assert_eq!(replay(&d, &trace).unwrap(), e.clone());
        let (a, b) = (canonicalize(&d).unwrap(), canonicalize(&e).unwrap());
        prop_assert_eq!(a.canonical, b.canonical);
    }

    #[test]
    fn equivalence_traces_replay(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = random::rng(seed);
        let d = random::flowed_diagram(&mut rng, DiagramParams::new(n));
        let (e, _) = random::random_rewrites(&mut rng, &d, 6, 8);
        let trace = decide_equiv(&d, &e).unwrap();
        prop_assert_eq!(replay_with_flow(&d, &trace), e);
    }
}
