//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every criterion prints a PASS/FAIL line even when another one fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use mbqc_canon::canon::{canonicalize, decide_equiv, phasepoly_to_canonical, reduce_phasepoly};
use mbqc_canon::clifford::{Basis, Effect, LocalClifford, Sign};
use mbqc_canon::diagram::Diagram;
use mbqc_canon::exact::ExactState;
use mbqc_canon::flow::{brute_force_flow_exists, find_flow, verify_flow, z_insert_flow_update};
use mbqc_canon::gf2::{AffineSpace, BitRow};
use mbqc_canon::graph::{Label, LabelledOpenGraph, VertexId, VertexSet};
use mbqc_canon::io::DiagramFile;
use mbqc_canon::phasepoly::{
    diagram_from_pair, pair_from_state, state_from_pair, PhasePolyDiagram, PhasePolynomial, Spider,
};
use mbqc_canon::random::{self, DiagramParams};
use mbqc_canon::rewrite::{
    apply_step, lc_rewrite, pivot_rewrite, replay, z_delete, z_insert, RewriteStep,
};
use rand::seq::SliceRandom;
use rand::Rng;

use common::{four_qubit_state, brute_evaluate, load, same_up_to_scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Lc,
    Pivot,
    ZDelete,
    ZInsert,
}

const KINDS: [Kind; 4] = [Kind::Lc, Kind::Pivot, Kind::ZDelete, Kind::ZInsert];

/// Every application of `kind` to `d`. Z-insertion is enumerated over all
/// neighbour sets and both signs.
fn all_applications(d: &Diagram, kind: Kind) -> Vec<Diagram> {
    let g = d.graph();
    let free: Vec<VertexId> = g.vertices().filter(|&v| !g.is_input(v)).collect();
    match kind {
        Kind::Lc => free.iter().map(|&u| lc_rewrite(d, u).unwrap()).collect(),
        Kind::Pivot => g
            .edges()
            .filter(|&(a, b)| !g.is_input(a) && !g.is_input(b))
            .map(|(a, b)| pivot_rewrite(d, a, b).unwrap())
            .collect(),
        Kind::ZDelete => d
            .interior()
            .filter(|&v| d.effect(v).unwrap().basis == Basis::Z)
            .map(|v| z_delete(d, v).unwrap().0)
            .collect(),
        Kind::ZInsert => {
            let vs: Vec<VertexId> = g.vertices().collect();
            let mut out = Vec::new();
            for mask in 0..1usize << vs.len() {
                let w: VertexSet = vs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &v)| v)
                    .collect();
                for sign in [Sign::Plus, Sign::Minus] {
                    out.push(z_insert(d, &w, sign).unwrap().0);
                }
            }
            out
        }
    }
}

/// One random application of `kind`, if any applies.
fn random_application<R: Rng>(
    rng: &mut R,
    d: &Diagram,
    kind: Kind,
) -> Option<(Diagram, RewriteStep)> {
    let g = d.graph();
    match kind {
        Kind::Lc => {
            let free: Vec<VertexId> = g.vertices().filter(|&v| !g.is_input(v)).collect();
            let u = *free.choose(rng)?;
            Some((lc_rewrite(d, u).unwrap(), RewriteStep::Lc { vertex: u }))
        }
        Kind::Pivot => {
            let edges: Vec<_> = g
                .edges()
                .filter(|&(a, b)| !g.is_input(a) && !g.is_input(b))
                .collect();
            let (u, v) = *edges.choose(rng)?;
            Some((pivot_rewrite(d, u, v).unwrap(), RewriteStep::Pivot { u, v }))
        }
        Kind::ZDelete => {
            let zs: Vec<VertexId> = d
                .interior()
                .filter(|&v| d.effect(v).unwrap().basis == Basis::Z)
                .collect();
            let (e, step) = z_delete(d, *zs.choose(rng)?).unwrap();
            Some((e, step))
        }
        Kind::ZInsert => {
            let w: VertexSet = g.vertices().filter(|_| rng.gen_bool(0.5)).collect();
            let sign = if rng.gen_bool(0.5) {
                Sign::Plus
            } else {
                Sign::Minus
            };
            let (e, x) = z_insert(d, &w, sign).unwrap();
            Some((
                e,
                RewriteStep::ZInsert {
                    vertex: x,
                    neighbours: w.into_iter().collect(),
                    sign,
                },
            ))
        }
    }
}

fn graphs_on(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    (0..1usize << pairs.len())
        .map(|m| {
            pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| m >> i & 1 == 1)
                .map(|(_, &p)| p)
                .collect()
        })
        .collect()
}

fn decorated(n: usize, edges: &[(usize, usize)], code: usize) -> Diagram {
    let cliffords: Vec<LocalClifford> = LocalClifford::all().collect();
    let effects: Vec<Effect> = Effect::all().collect();
    let per = cliffords.len() + effects.len();
    let mut d = Diagram::new();
    let mut c = code;
    for v in 0..n {
        let k = c % per;
        c /= per;
        if k < cliffords.len() {
            d.add_output(v, cliffords[k]).unwrap();
        } else {
            d.add_measured(v, effects[k - cliffords.len()]).unwrap();
        }
    }
    for &(a, b) in edges {
        d.add_edge(a, b).unwrap();
    }
    d
}

fn four_qubit_golden() -> String {
    let start = Instant::now();
    let p = PhasePolyDiagram::new(
        vec![
            Spider::Green { quarter_turns: 1 },
            Spider::Green { quarter_turns: 0 },
            Spider::Red { half_turns: 1 },
            Spider::Red { half_turns: 0 },
        ],
        [(0, 1), (0, 2), (0, 3), (1, 3)],
    )
    .unwrap();
    let s = p.evaluate();
    assert!(same_up_to_scalar(&s, &four_qubit_state()));
    assert!(same_up_to_scalar(
        &brute_evaluate(&p.to_diagram()),
        &four_qubit_state()
    ));
    assert_eq!(diagram_from_pair(&four_qubit_state(), &[0, 1]).unwrap(), p);
    let (a, p12) = pair_from_state(&s, &[0, 1]).unwrap();
    assert_eq!(
        p12,
        PhasePolynomial::new(&[0, 1], [(0, 1)], [(0, 1)]).unwrap()
    );
    assert_eq!(p12.to_string(), "x1 + 2x1x2");
    let (b, p23) = pair_from_state(&s, &[1, 2]).unwrap();
    assert_eq!(a, b);
    assert_eq!(
        p23,
        PhasePolynomial::new(&[1, 2], [(1, 2), (2, 3)], [(1, 2)]).unwrap()
    );
    assert_eq!(p23.to_string(), "2x2 + 3x3 + 2x2x3");
    let took = start.elapsed();
    assert!(took < Duration::from_secs(1), "{took:?}");
    format!("exact match in {took:?}")
}

/// Checks every rewrite on every decoration of one graph; returns the
/// number of rewritten diagrams compared.
fn sweep_decorations(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut count = 0;
    for code in 0..30usize.pow(n as u32) {
        let d = decorated(n, edges, code);
        let s = brute_evaluate(&d);
        for kind in KINDS {
            for e in all_applications(&d, kind) {
                assert!(
                    same_up_to_scalar(&s, &brute_evaluate(&e)),
                    "{kind:?} on {d:?}"
                );
                count += 1;
            }
        }
    }
    count
}

fn rewrite_soundness() -> String {
    let start = Instant::now();
    let graphs: Vec<(usize, Vec<(usize, usize)>)> = (1..=3)
        .flat_map(|n| graphs_on(n).into_iter().map(move |g| (n, g)))
        .collect();
    let exhaustive: usize = std::thread::scope(|scope| {
        let handles: Vec<_> = graphs
            .iter()
            .map(|(n, edges)| scope.spawn(move || sweep_decorations(*n, edges)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep panicked"))
            .sum()
    });
    let mut rng = random::rng(1001);
    let mut random_checks = [0usize; 4];
    for (i, kind) in KINDS.into_iter().enumerate() {
        while random_checks[i] < 1000 {
            let n = rng.gen_range(1..=6);
            let d = random::diagram(&mut rng, DiagramParams::new(n));
            let Some((e, _)) = random_application(&mut rng, &d, kind) else {
                continue;
            };
            // The inserted vertex keeps every check within seven vertices.
            assert!(
                same_up_to_scalar(&brute_evaluate(&d), &brute_evaluate(&e)),
                "{kind:?} on {d:?}"
            );
            random_checks[i] += 1;
        }
    }
    let took = start.elapsed();
    assert!(took < Duration::from_secs(120), "{took:?}");
    format!("{exhaustive} exhaustive and {random_checks:?} random checks in {took:?}")
}

fn within_limits(g: &LabelledOpenGraph) -> bool {
    g.measured().count() <= 5 && g.vertices().filter(|&v| !g.is_input(v)).count() <= 8
}

fn flow_preservation() -> String {
    let mut rng = random::rng(1002);
    let mut counts = [0usize; 4];
    let mut updates = 0;
    for (i, kind) in KINDS.into_iter().enumerate() {
        while counts[i] < 1000 {
            let n = rng.gen_range(1..=6);
            let d = random::flowed_diagram(&mut rng, DiagramParams::new(n));
            if !within_limits(d.graph()) {
                continue;
            }
            let Some((e, step)) = random_application(&mut rng, &d, kind) else {
                continue;
            };
            if !within_limits(e.graph()) {
                continue;
            }
            assert!(find_flow(e.graph()).is_some(), "{step:?} on {d:?}");
            assert!(
                brute_force_flow_exists(e.graph()).unwrap(),
                "{step:?} on {d:?}"
            );
            if let RewriteStep::ZInsert {
                vertex, neighbours, ..
            } = &step
            {
                let f = find_flow(d.graph()).unwrap();
                let w: VertexSet = neighbours.iter().copied().collect();
                verify_flow(e.graph(), &z_insert_flow_update(&f, *vertex, &w)).unwrap();
                updates += 1;
            }
            counts[i] += 1;
        }
    }
    format!("{counts:?} rewrites, {updates} constructed flows verified")
}

fn oracle_agreement() -> String {
    let mut rng = random::rng(1003);
    let (mut checked, mut with_flow) = (0, 0);
    let mut seen = std::collections::BTreeSet::new();
    while checked < 1000 {
        let n = rng.gen_range(2..=8);
        let density = rng.gen_range(0.2..0.7);
        let g = random::labelled_graph(&mut rng, n, density);
        if !within_limits(&g) {
            continue;
        }
        let found = find_flow(&g).is_some();
        assert_eq!(found, brute_force_flow_exists(&g).unwrap(), "{g:?}");
        seen.extend(g.labels().values().copied());
        checked += 1;
        with_flow += found as usize;
    }
    assert_eq!(seen.len(), Label::ALL.len());
    format!("{checked} graphs agree, {with_flow} with flow")
}

fn canonical_json(d: &Diagram) -> String {
    DiagramFile::from_canonical(&canonicalize(d).unwrap().canonical).to_json()
}

fn canonical_uniqueness() -> String {
    let mut rng = random::rng(1004);
    let mut steps = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=6);
        let d = random::flowed_diagram(&mut rng, DiagramParams::new(n));
        let (e, trace) = random::random_rewrites(&mut rng, &d, 10, 9);
        assert!(find_flow(e.graph()).is_some());
        assert_eq!(canonical_json(&d), canonical_json(&e), "{trace:?}");
        steps += trace.len();
    }
    let mut distinct = 0;
    while distinct < 100 {
        let n = rng.gen_range(1..=4);
        let a = random::flowed_diagram(&mut rng, DiagramParams::new(n));
        let b = random::flowed_diagram(&mut rng, DiagramParams::new(n));
        if a.wires().len() != b.wires().len()
            || same_up_to_scalar(&brute_evaluate(&a), &brute_evaluate(&b))
        {
            continue;
        }
        assert_ne!(canonical_json(&a), canonical_json(&b));
        distinct += 1;
    }
    format!("1000 rewritten pairs ({steps} steps) identical, {distinct} distinct pairs separated")
}

fn worked_equivalence() -> String {
    let d = load("worked_d.json");
    let e = load("worked_d_prime.json");
    let trace = decide_equiv(&d, &e).unwrap();
    let mut cur = d.clone();
    for step in &trace {
        cur = apply_step(&cur, step).unwrap();
        let f = find_flow(cur.graph()).unwrap_or_else(|| panic!("no flow after {step:?}"));
        verify_flow(cur.graph(), &f).unwrap();
    }
    assert_eq!(cur, e);
    assert_eq!(
        mbqc_canon::io::diagram_to_json(&cur),
        mbqc_canon::io::diagram_to_json(&e)
    );
    assert_eq!(replay(&d, &trace).unwrap(), e);
    format!("trace of {} steps replays exactly", trace.len())
}

fn termination() -> String {
    let mut rng = random::rng(1005);
    let mut iterations = 0;
    for i in 0..1000 {
        let n = 1 + i % 8;
        let p = random::phase_poly_diagram(&mut rng, n);
        let mut order: Vec<usize> = (0..n).collect();
        if i % 2 == 1 {
            order.shuffle(&mut rng);
        }
        let r = reduce_phasepoly(&p.to_diagram(), &order).unwrap();
        let c = &r.offending_counts;
        assert!(c.windows(2).all(|w| w[1] < w[0]), "{c:?}");
        assert_eq!(*c.last().unwrap(), 0);
        iterations += c.len() - 1;
        let (canon, _) = phasepoly_to_canonical(&p).unwrap();
        assert!(same_up_to_scalar(
            &canon.phase_poly().evaluate(),
            &p.evaluate()
        ));
    }
    format!("1000 inputs, {iterations} strictly decreasing iterations")
}

fn all_polynomials(free: &[usize]) -> Vec<PhasePolynomial> {
    let pairs: Vec<(usize, usize)> = free
        .iter()
        .enumerate()
        .flat_map(|(i, &j)| free[i + 1..].iter().map(move |&k| (j, k)))
        .collect();
    let mut out = Vec::new();
    for lin in 0..4usize.pow(free.len() as u32) {
        for mask in 0..1usize << pairs.len() {
            let linear = free
                .iter()
                .enumerate()
                .map(|(i, &j)| (j, ((lin >> (2 * i)) & 3) as u8));
            let quad = pairs
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &p)| p);
            out.push(PhasePolynomial::new(free, linear, quad).unwrap());
        }
    }
    out
}

fn coefficient_uniqueness() -> String {
    let mut pairs_checked = 0;
    for n in 0..=3usize {
        let free: Vec<usize> = (0..n).collect();
        let a = if n == 0 {
            AffineSpace::point(&BitRow::from_bools(&[true]))
        } else {
            AffineSpace::full(n)
        };
        let free = if n == 0 { Vec::new() } else { free };
        let polys = all_polynomials(&free);
        let states: Vec<ExactState> = polys
            .iter()
            .map(|p| state_from_pair(&a, p).unwrap())
            .collect();
        for i in 0..states.len() {
            for j in i + 1..states.len() {
                assert!(!same_up_to_scalar(&states[i], &states[j]));
                pairs_checked += 1;
            }
        }
    }
    let mut rng = random::rng(1008);
    for _ in 0..2000 {
        let k = rng.gen_range(1..=8);
        let free: Vec<usize> = (0..k).collect();
        let linear: Vec<(usize, u8)> = free.iter().map(|&j| (j, rng.gen_range(0..4))).collect();
        let quad: Vec<(usize, usize)> = free
            .iter()
            .flat_map(|&j| free.iter().filter(move |&&l| l > j).map(move |&l| (j, l)))
            .filter(|_| rng.gen_bool(0.5))
            .collect();
        let p = PhasePolynomial::new(&free, linear, quad).unwrap();
        let lq = p.to_linear_quadratic();
        assert_eq!(PhasePolynomial::from_linear_quadratic(&lq), p);
        for m in 0..1usize << k {
            let x = BitRow::from_bools(&(0..k).map(|i| m >> i & 1 == 1).collect::<Vec<_>>());
            assert_eq!(lq.evaluate(&x), p.evaluate(&x));
        }
    }
    format!("{pairs_checked} coefficient pairs non-proportional, 2000 conversions agree")
}

type Criterion = (&'static str, fn() -> String);

fn main() {
    let criteria: [Criterion; 8] = [
        (
            "four-qubit example amplitudes and polynomials",
            four_qubit_golden,
        ),
        ("rewrite soundness", rewrite_soundness),
        ("flow preservation", flow_preservation),
        (
            "flow finder agrees with exhaustive oracle",
            oracle_agreement,
        ),
        ("canonical form uniqueness", canonical_uniqueness),
        ("worked equivalence trace", worked_equivalence),
        ("reduction termination", termination),
        ("phase coefficient uniqueness", coefficient_uniqueness),
    ];
    std::panic::set_hook(Box::new(|info| eprintln!("  {info}")));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match catch_unwind(AssertUnwindSafe(check)) {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(_) => {
                println!("criterion {}: FAIL  {name}", i + 1);
                failed += 1;
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}
