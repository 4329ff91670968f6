//! Seeded generators for graphs, diagrams and rewrite sequences.
//!
//! All randomness comes from ChaCha8 seeded with a `u64`, so a seed names
//! the same instance on every platform.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::clifford::{Basis, Effect, LocalClifford, Sign};
use crate::diagram::Diagram;
use crate::flow::find_flow;
use crate::graph::{Label, LabelledOpenGraph, VertexId, VertexSet};
use crate::phasepoly::{PhasePolyDiagram, Spider};
use crate::rewrite::{lc_rewrite, pivot_rewrite, z_delete, z_insert, RewriteStep};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_edges<R: Rng>(rng: &mut R, n: usize, density: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(density) {
                edges.push((a, b));
            }
        }
    }
    edges
}

/// A labelled open graph on `0..n` with at least one output and labels
/// drawn from all six kinds.
pub fn labelled_graph<R: Rng>(rng: &mut R, n: usize, density: f64) -> LabelledOpenGraph {
    assert!(n >= 1);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let outputs = 1 + rng.gen_range(0..n);
    let output_set: VertexSet = order[..outputs].iter().copied().collect();
    let inputs: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.3)).collect();
    let labels = (0..n)
        .filter(|v| !output_set.contains(v))
        .map(|v| (v, *Label::ALL.choose(rng).unwrap()))
        .collect::<Vec<_>>();
    LabelledOpenGraph::from_parts(
        0..n,
        random_edges(rng, n, density),
        inputs,
        output_set,
        labels,
    )
    .expect("generated graph is well formed")
}

fn random_effect<R: Rng>(rng: &mut R) -> Effect {
    let basis = *[Basis::X, Basis::Y, Basis::Z].choose(rng).unwrap();
    let sign = if rng.gen_bool(0.5) {
        Sign::Plus
    } else {
        Sign::Minus
    };
    Effect::new(basis, sign)
}

fn random_clifford<R: Rng>(rng: &mut R) -> LocalClifford {
    let all: Vec<_> = LocalClifford::all().collect();
    *all.choose(rng).unwrap()
}

/// Shape of a random diagram.
#[derive(Debug, Clone, Copy)]
pub struct DiagramParams {
    pub vertices: usize,
    pub max_outputs: usize,
    pub input_probability: f64,
    pub edge_density: f64,
}

impl DiagramParams {
    pub fn new(vertices: usize) -> Self {
        DiagramParams {
            vertices,
            max_outputs: vertices,
            input_probability: 0.25,
            edge_density: 0.45,
        }
    }
}

/// A diagram with Pauli effects on measured vertices and uniformly random
/// boundary Cliffords. Flow is not guaranteed.
pub fn diagram<R: Rng>(rng: &mut R, p: DiagramParams) -> Diagram {
    let n = p.vertices;
    assert!(n >= 1);
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(rng);
    let outputs = 1 + rng.gen_range(0..p.max_outputs.clamp(1, n));
    let mut d = Diagram::new();
    for v in 0..n {
        if ids[..outputs].contains(&v) {
            d.add_output(v, random_clifford(rng)).unwrap();
        } else {
            d.add_measured(v, random_effect(rng)).unwrap();
        }
    }
    for (a, b) in random_edges(rng, n, p.edge_density) {
        d.add_edge(a, b).unwrap();
    }
    for v in 0..n {
        if rng.gen_bool(p.input_probability) {
            d.make_input(v, random_clifford(rng)).unwrap();
        }
    }
    d
}

/// Rejection-samples [`diagram`] until the graph has a Pauli flow.
pub fn flowed_diagram<R: Rng>(rng: &mut R, p: DiagramParams) -> Diagram {
    loop {
        let d = diagram(rng, p);
        if find_flow(d.graph()).is_some() {
            return d;
        }
    }
}

/// A phase-polynomial diagram on `n` qubits.
pub fn phase_poly_diagram<R: Rng>(rng: &mut R, n: usize) -> PhasePolyDiagram {
    let spiders: Vec<Spider> = (0..n)
        .map(|_| {
            if rng.gen_bool(0.35) {
                Spider::Red {
                    half_turns: rng.gen_range(0..2),
                }
            } else {
                Spider::Green {
                    quarter_turns: rng.gen_range(0..4),
                }
            }
        })
        .collect();
    let edges: Vec<_> = random_edges(rng, n, 0.5)
        .into_iter()
        .filter(|&(a, b)| !(spiders[a].is_red() && spiders[b].is_red()))
        .collect();
    PhasePolyDiagram::new(spiders, edges).expect("red pairs were skipped")
}

/// One uniformly chosen applicable rewrite: LC, pivot, Z-deletion or
/// Z-insertion. Z-insertion is always applicable.
pub fn random_rewrite<R: Rng>(rng: &mut R, d: &Diagram) -> (Diagram, RewriteStep) {
    let g = d.graph();
    let non_inputs: Vec<VertexId> = g.vertices().filter(|&v| !g.is_input(v)).collect();
    let pivots: Vec<(VertexId, VertexId)> = g
        .edges()
        .filter(|&(a, b)| !g.is_input(a) && !g.is_input(b))
        .collect();
    let deletable: Vec<VertexId> = d
        .interior()
        .filter(|&v| d.effect(v).map(|e| e.basis) == Some(Basis::Z))
        .collect();
    loop {
        match rng.gen_range(0..4) {
            0 if !non_inputs.is_empty() => {
                let u = *non_inputs.choose(rng).unwrap();
                return (lc_rewrite(d, u).unwrap(), RewriteStep::Lc { vertex: u });
            }
            1 if !pivots.is_empty() => {
                let (u, v) = *pivots.choose(rng).unwrap();
                let (u, v) = if rng.gen_bool(0.5) { (u, v) } else { (v, u) };
                return (pivot_rewrite(d, u, v).unwrap(), RewriteStep::Pivot { u, v });
            }
            2 if !deletable.is_empty() => {
                return z_delete(d, *deletable.choose(rng).unwrap()).unwrap();
            }
            3 => {
                let neighbours: VertexSet = g.vertices().filter(|_| rng.gen_bool(0.4)).collect();
                let sign = if rng.gen_bool(0.5) {
                    Sign::Plus
                } else {
                    Sign::Minus
                };
                let (out, x) = z_insert(d, &neighbours, sign).unwrap();
                let step = RewriteStep::ZInsert {
                    vertex: x,
                    neighbours: neighbours.into_iter().collect(),
                    sign,
                };
                return (out, step);
            }
            _ => {}
        }
    }
}

/// Up to `max_steps` random rewrites, keeping at most `max_vertices`
/// vertices by skipping insertions once the diagram is that large.
pub fn random_rewrites<R: Rng>(
    rng: &mut R,
    d: &Diagram,
    max_steps: usize,
    max_vertices: usize,
) -> (Diagram, Vec<RewriteStep>) {
    let steps = rng.gen_range(0..=max_steps);
    let mut cur = d.clone();
    let mut trace = Vec::new();
    let mut misses = 0;
    while trace.len() < steps && misses < 64 {
        let (next, step) = random_rewrite(rng, &cur);
        if next.graph().num_vertices() > max_vertices {
            misses += 1;
            continue;
        }
        cur = next;
        trace.push(step);
    }
    (cur, trace)
}
