//! Exact dense evaluation of diagrams by factor-graph contraction.
//!
//! Each vertex contributes one boolean variable (a green spider forces all of
//! its legs equal) and each boundary wire one more. Hadamard edges, effects
//! and boundary Cliffords are factors over these variables. Vertex variables
//! are summed out one at a time, always picking the one whose elimination
//! touches the fewest variables.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::clifford::Mat2;
use crate::diagram::{Diagram, Wire};
use crate::exact::{strip_twos, ExactState, GaussInt};

pub const DEFAULT_WIRE_LIMIT: usize = 12;
const INTERMEDIATE_LIMIT: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("diagram has {wires} boundary wires, limit is {limit}")]
    TooManyWires { wires: usize, limit: usize },
    #[error("contraction needs an intermediate over {0} variables")]
    IntermediateTooLarge(usize),
}

/// A table over boolean variables; `vars[0]` is the most significant bit of
/// the table index. Values are `table[k] · (√2)^exp`.
#[derive(Debug, Clone)]
struct Factor {
    vars: Vec<usize>,
    table: Vec<GaussInt>,
    exp: i32,
}

impl Factor {
    fn build(vars: Vec<usize>, exp: i32, f: impl Fn(&[bool]) -> GaussInt) -> Factor {
        let n = vars.len();
        let mut bits = vec![false; n];
        let table = (0..1usize << n)
            .map(|k| {
                for (i, b) in bits.iter_mut().enumerate() {
                    *b = (k >> (n - 1 - i)) & 1 == 1;
                }
                f(&bits)
            })
            .collect();
        Factor { vars, table, exp }
    }

    fn value(&self, assignment: &[bool]) -> GaussInt {
        let idx = self
            .vars
            .iter()
            .fold(0usize, |acc, &v| (acc << 1) | assignment[v] as usize);
        self.table[idx]
    }

    fn matrix(row_var: usize, col_var: usize, m: &Mat2) -> Factor {
        Factor::build(vec![row_var, col_var], m.sqrt2_exponent, |b| {
            m.get(b[0] as usize, b[1] as usize)
        })
    }
}

/// Multiplies `factors` and sums out `var`.
fn eliminate(factors: Vec<Factor>, var: usize, nvars: usize) -> Result<Factor, EvalError> {
    let scope: BTreeSet<usize> = factors
        .iter()
        .flat_map(|f| f.vars.iter().copied())
        .filter(|&v| v != var)
        .collect();
    if scope.len() > INTERMEDIATE_LIMIT {
        return Err(EvalError::IntermediateTooLarge(scope.len()));
    }
    let vars: Vec<usize> = scope.into_iter().collect();
    let exp = factors.iter().map(|f| f.exp).sum();
    let mut assignment = vec![false; nvars];
    let n = vars.len();
    let mut table = Vec::with_capacity(1 << n);
    for k in 0..1usize << n {
        for (i, &v) in vars.iter().enumerate() {
            assignment[v] = (k >> (n - 1 - i)) & 1 == 1;
        }
        let mut total = GaussInt::ZERO;
        for value in [false, true] {
            assignment[var] = value;
            let mut term = GaussInt::ONE;
            for f in &factors {
                term *= f.value(&assignment);
                if term.is_zero() {
                    break;
                }
            }
            total += term;
        }
        table.push(total);
    }
    let mut out = Factor { vars, table, exp };
    out.exp += 2 * strip_twos(&mut out.table);
    Ok(out)
}

pub fn evaluate(d: &Diagram) -> Result<ExactState, EvalError> {
    evaluate_with_limit(d, DEFAULT_WIRE_LIMIT)
}

/// The state of `d` with inputs bent to outputs, in the order of
/// [`Diagram::wires`]. Qubit 0 is the most significant index bit.
pub fn evaluate_with_limit(d: &Diagram, wire_limit: usize) -> Result<ExactState, EvalError> {
    let wires = d.wires();
    if wires.len() > wire_limit {
        return Err(EvalError::TooManyWires {
            wires: wires.len(),
            limit: wire_limit,
        });
    }
    let g = d.graph();
    let vertices: Vec<_> = g.vertices().collect();
    let var_of = |v| vertices.binary_search(&v).unwrap();
    let nv = vertices.len();
    let nvars = nv + wires.len();

    let mut factors = Vec::new();
    let hadamard_edge = |b: &[bool]| {
        if b[0] && b[1] {
            -GaussInt::ONE
        } else {
            GaussInt::ONE
        }
    };
    for (a, b) in g.edges() {
        factors.push(Factor::build(vec![var_of(a), var_of(b)], -1, hadamard_edge));
    }
    for (&v, e) in d.effects() {
        let (row, exp) = e.row();
        factors.push(Factor::build(vec![var_of(v)], exp, |b| row[b[0] as usize]));
    }
    for (k, w) in wires.iter().enumerate() {
        let wire_var = nv + k;
        match *w {
            Wire::Output(v) => {
                let m = d.output_clifford(v).expect("output wire").matrix();
                factors.push(Factor::matrix(wire_var, var_of(v), &m));
            }
            Wire::Input(v) => {
                let m = d.input_clifford(v).expect("input wire").matrix();
                factors.push(Factor::matrix(var_of(v), wire_var, &m));
            }
        }
    }

    let mut remaining: BTreeSet<usize> = (0..nv).collect();
    while !remaining.is_empty() {
        let cost = |var: usize| {
            factors
                .iter()
                .filter(|f| f.vars.contains(&var))
                .flat_map(|f| f.vars.iter().copied())
                .collect::<BTreeSet<_>>()
                .len()
        };
        let var = *remaining.iter().min_by_key(|&&v| (cost(v), v)).unwrap();
        remaining.remove(&var);
        let (touching, rest): (Vec<_>, Vec<_>) =
            factors.into_iter().partition(|f| f.vars.contains(&var));
        factors = rest;
        factors.push(eliminate(touching, var, nvars)?);
    }

    let n = wires.len();
    let mut exp = 0;
    let mut assignment = vec![false; nvars];
    let mut amplitudes = Vec::with_capacity(1 << n);
    for f in &factors {
        exp += f.exp;
    }
    for k in 0..1usize << n {
        for i in 0..n {
            assignment[nv + i] = (k >> (n - 1 - i)) & 1 == 1;
        }
        let mut amp = GaussInt::ONE;
        for f in &factors {
            amp *= f.value(&assignment);
        }
        amplitudes.push(amp);
    }
    let mut state = ExactState::new(amplitudes, exp).expect("power of two");
    state.reduce();
    Ok(state)
}
