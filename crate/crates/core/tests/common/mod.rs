//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use mbqc_canon::diagram::{Diagram, Wire};
use mbqc_canon::exact::{ExactState, GaussInt};
use mbqc_canon::graph::{Label, LabelledOpenGraph};

/// Checks the nine Pauli flow conditions directly from their statements.
/// Returns the first violated `(vertex, condition, witness)` in ascending
/// order, with the Y condition read as excluding `v = u`.
pub fn naive_flow_violation(
    g: &LabelledOpenGraph,
    p: &BTreeMap<usize, BTreeSet<usize>>,
    precedes: impl Fn(usize, usize) -> bool,
) -> Option<(usize, u8, usize)> {
    let vertices: Vec<usize> = g.vertices().collect();
    for u in g.measured() {
        let pu = &p[&u];
        let odd = |v: usize| g.neighbours(v).iter().filter(|w| pu.contains(w)).count() % 2 == 1;
        let lab = |v: usize| g.label(v);
        for &v in &vertices {
            if pu.contains(&v)
                && v != u
                && !matches!(lab(v), Some(Label::X | Label::Y))
                && !precedes(u, v)
            {
                return Some((u, 1, v));
            }
        }
        for &v in &vertices {
            if odd(v) && v != u && !matches!(lab(v), Some(Label::Y | Label::Z)) && !precedes(u, v) {
                return Some((u, 2, v));
            }
        }
        for &v in &vertices {
            if v != u && !precedes(u, v) && lab(v) == Some(Label::Y) && pu.contains(&v) != odd(v) {
                return Some((u, 3, v));
            }
        }
        let (inp, ino) = (pu.contains(&u), odd(u));
        let (cond, ok) = match lab(u).unwrap() {
            Label::XY => (4, !inp && ino),
            Label::XZ => (5, inp && ino),
            Label::YZ => (6, inp && !ino),
            Label::X => (7, ino),
            Label::Z => (8, inp),
            Label::Y => (9, inp != ino),
        };
        if !ok {
            return Some((u, cond, u));
        }
    }
    None
}

/// Sums the diagram over every assignment of its vertex and wire values.
/// Exponential in the vertex count; meant for a handful of vertices.
pub fn brute_evaluate(d: &Diagram) -> ExactState {
    let g = d.graph();
    let vertices: Vec<usize> = g.vertices().collect();
    let idx = |v: usize| vertices.iter().position(|&x| x == v).unwrap();
    let wires = d.wires();
    let nv = vertices.len();
    let nw = wires.len();
    let edges: Vec<(usize, usize)> = g.edges().map(|(a, b)| (idx(a), idx(b))).collect();
    // Common exponent: every edge 1/√2, plus each factor's own exponent.
    let mut exp = -(edges.len() as i32);
    let mut effects = Vec::new();
    for (&v, e) in d.effects() {
        let (row, e_exp) = e.row();
        exp += e_exp;
        effects.push((idx(v), row));
    }
    // (vertex position, matrix, vertex value indexes the column).
    let mut boundary = Vec::new();
    for w in &wires {
        let (v, m, col) = match *w {
            Wire::Output(v) => (v, d.output_clifford(v).unwrap().matrix(), true),
            Wire::Input(v) => (v, d.input_clifford(v).unwrap().matrix(), false),
        };
        exp += m.sqrt2_exponent;
        boundary.push((idx(v), m, col));
    }
    let mut amps = vec![GaussInt::ZERO; 1 << nw];
    for (out, amp) in amps.iter_mut().enumerate() {
        let mut total = GaussInt::ZERO;
        for x in 0..1usize << nv {
            let xb = |i: usize| (x >> i) & 1;
            let mut term = GaussInt::ONE;
            for &(a, b) in &edges {
                if xb(a) == 1 && xb(b) == 1 {
                    term = -term;
                }
            }
            for (i, row) in &effects {
                term *= row[xb(*i)];
            }
            for (k, (i, m, col)) in boundary.iter().enumerate() {
                let w = (out >> (nw - 1 - k)) & 1;
                term *= if *col {
                    m.get(w, xb(*i))
                } else {
                    m.get(xb(*i), w)
                };
                if term.is_zero() {
                    break;
                }
            }
            total += term;
        }
        *amp = total;
    }
    ExactState::new(amps, exp).unwrap()
}

/// Proportional, treating two zero vectors as equal.
pub fn same_up_to_scalar(a: &ExactState, b: &ExactState) -> bool {
    a.proportional(b).unwrap()
}

pub fn four_qubit_state() -> ExactState {
    ExactState::from_terms(
        4,
        &[
            ("0010", GaussInt::ONE),
            ("0111", GaussInt::ONE),
            ("1001", GaussInt::I),
            ("1100", -GaussInt::I),
        ],
    )
}

pub fn load(name: &str) -> Diagram {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    mbqc_canon::io::diagram_from_json(&text).unwrap()
}
