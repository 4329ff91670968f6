//! The four flow-preserving rewrites on diagrams, their inverses, and the
//! trace steps that record them.
//!
//! Local complementation and pivoting rest on the graph-state identities
//!
//! ```text
//! |G⟩ ∝ X(a)_u · Π_{w ∈ N(u)} Z(b)_w · |G ⋆ u⟩
//! |G⟩ ∝ H_u H_v · Π_{w ∈ N(u) ∩ N(v)} Z(2)_w · |G ∧ uv⟩
//! ```
//!
//! with `a = LC_SELF_QUARTER_TURNS` and `b = LC_NEIGHBOUR_QUARTER_TURNS`. The
//! operators on the right are absorbed into the vertex decorations, so the
//! rewritten diagram denotes the same map up to a scalar.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clifford::{Basis, LocalClifford, Sign};
use crate::diagram::{Diagram, DiagramError, Wire};
use crate::graph::{GraphError, VertexId, VertexSet};

/// X quarter-turns absorbed by the vertex a local complementation is about.
pub const LC_SELF_QUARTER_TURNS: i64 = 3;
/// Z quarter-turns absorbed by each of its neighbours.
pub const LC_NEIGHBOUR_QUARTER_TURNS: i64 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("vertex {0} is an input")]
    InputVertex(VertexId),
    #[error("vertex {0} is not Z-measured")]
    NotZMeasured(VertexId),
    #[error("vertex {0} already exists")]
    VertexExists(VertexId),
    #[error("recorded {what} of vertex {vertex} does not match the diagram")]
    RecordMismatch {
        vertex: VertexId,
        what: &'static str,
    },
    #[error("cannot unbend: {0}")]
    BadUnbend(String),
    #[error("relabelling is not a bijection onto fresh ids: {0}")]
    BadRelabel(String),
}

impl From<GraphError> for RewriteError {
    fn from(e: GraphError) -> Self {
        RewriteError::Diagram(e.into())
    }
}

/// One entry of a rewrite trace. `Lc`, `Pivot`, `ZDelete` and `ZInsert` are
/// the flow-preserving rewrites; the remaining kinds change only how the
/// diagram is presented and leave the underlying open graph's flow intact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RewriteStep {
    Lc {
        vertex: VertexId,
    },
    Pivot {
        u: VertexId,
        v: VertexId,
    },
    ZDelete {
        vertex: VertexId,
        neighbours: Vec<VertexId>,
        sign: Sign,
    },
    ZInsert {
        vertex: VertexId,
        neighbours: Vec<VertexId>,
        sign: Sign,
    },
    /// Turns input `input` into a measured vertex attached to a new output
    /// vertex `output` that carries the bent input wire.
    Bend {
        input: VertexId,
        output: VertexId,
    },
    Unbend {
        input: VertexId,
        output: VertexId,
    },
    /// Marks the switch to reading the diagram in phase-polynomial form.
    ColourChange,
    Relabel {
        map: Vec<(VertexId, VertexId)>,
    },
}

impl RewriteStep {
    pub fn is_rewrite(&self) -> bool {
        matches!(
            self,
            RewriteStep::Lc { .. }
                | RewriteStep::Pivot { .. }
                | RewriteStep::ZDelete { .. }
                | RewriteStep::ZInsert { .. }
        )
    }

    /// Steps that undo this one when applied in order.
    pub fn inverse(&self) -> Vec<RewriteStep> {
        match self {
            RewriteStep::Lc { vertex } => vec![RewriteStep::Lc { vertex: *vertex }; 3],
            RewriteStep::Pivot { .. } | RewriteStep::ColourChange => vec![self.clone()],
            RewriteStep::ZDelete {
                vertex,
                neighbours,
                sign,
            } => vec![RewriteStep::ZInsert {
                vertex: *vertex,
                neighbours: neighbours.clone(),
                sign: *sign,
            }],
            RewriteStep::ZInsert {
                vertex,
                neighbours,
                sign,
            } => vec![RewriteStep::ZDelete {
                vertex: *vertex,
                neighbours: neighbours.clone(),
                sign: *sign,
            }],
            RewriteStep::Bend { input, output } => vec![RewriteStep::Unbend {
                input: *input,
                output: *output,
            }],
            RewriteStep::Unbend { input, output } => vec![RewriteStep::Bend {
                input: *input,
                output: *output,
            }],
            RewriteStep::Relabel { map } => vec![RewriteStep::Relabel {
                map: map.iter().map(|&(a, b)| (b, a)).collect(),
            }],
        }
    }
}

/// The trace that undoes `trace`.
pub fn invert_trace(trace: &[RewriteStep]) -> Vec<RewriteStep> {
    trace.iter().rev().flat_map(|s| s.inverse()).collect()
}

fn check_vertex(d: &Diagram, u: VertexId) -> Result<(), RewriteError> {
    if d.graph().contains(u) {
        Ok(())
    } else {
        Err(GraphError::UnknownVertex(u).into())
    }
}

fn check_not_input(d: &Diagram, u: VertexId) -> Result<(), RewriteError> {
    check_vertex(d, u)?;
    if d.graph().is_input(u) {
        Err(RewriteError::InputVertex(u))
    } else {
        Ok(())
    }
}

/// Local complementation about `u`, which must not be an input.
pub fn lc_rewrite(d: &Diagram, u: VertexId) -> Result<Diagram, RewriteError> {
    check_not_input(d, u)?;
    let mut out = d.clone();
    out.replace_graph(d.graph().local_complement(u)?);
    out.precompose(u, LocalClifford::x(LC_SELF_QUARTER_TURNS))?;
    let z = LocalClifford::z(LC_NEIGHBOUR_QUARTER_TURNS);
    for &w in d.neighbours(u) {
        out.precompose(w, z)?;
    }
    Ok(out)
}

/// `m` successive local complementations about `u`.
pub fn lc_power(d: &Diagram, u: VertexId, m: usize) -> Result<Diagram, RewriteError> {
    let mut out = d.clone();
    for _ in 0..m {
        out = lc_rewrite(&out, u)?;
    }
    if m == 0 {
        check_not_input(d, u)?;
    }
    Ok(out)
}

/// Pivot about the edge `(u, v)`; neither endpoint may be an input.
pub fn pivot_rewrite(d: &Diagram, u: VertexId, v: VertexId) -> Result<Diagram, RewriteError> {
    check_not_input(d, u)?;
    check_not_input(d, v)?;
    let pivoted = d.graph().pivot(u, v)?;
    let common: Vec<_> = d
        .neighbours(u)
        .intersection(d.neighbours(v))
        .copied()
        .collect();
    let mut out = d.clone();
    out.replace_graph(pivoted);
    let h = LocalClifford::hadamard();
    out.precompose(u, h)?;
    out.precompose(v, h)?;
    for w in common {
        out.precompose(w, LocalClifford::z(2))?;
    }
    Ok(out)
}

/// Deletes the Z-measured non-input vertex `u`. A `-` outcome leaves a Z(π)
/// on every former neighbour.
pub fn z_delete(d: &Diagram, u: VertexId) -> Result<(Diagram, RewriteStep), RewriteError> {
    check_not_input(d, u)?;
    let effect = d.effect(u).filter(|e| e.basis == Basis::Z);
    let Some(effect) = effect else {
        return Err(RewriteError::NotZMeasured(u));
    };
    let neighbours: Vec<_> = d.neighbours(u).iter().copied().collect();
    let mut out = d.clone();
    out.remove_measured(u)?;
    if effect.sign == Sign::Minus {
        for &w in &neighbours {
            out.precompose(w, LocalClifford::z(2))?;
        }
    }
    let step = RewriteStep::ZDelete {
        vertex: u,
        neighbours,
        sign: effect.sign,
    };
    Ok((out, step))
}

/// Inserts a fresh Z-measured vertex adjacent to `neighbours`, using the
/// diagram's next unused id.
pub fn z_insert(
    d: &Diagram,
    neighbours: &VertexSet,
    sign: Sign,
) -> Result<(Diagram, VertexId), RewriteError> {
    let x = d.next_id();
    Ok((z_insert_with_id(d, x, neighbours, sign)?, x))
}

/// [`z_insert`] with an explicit id for the new vertex.
pub fn z_insert_with_id(
    d: &Diagram,
    x: VertexId,
    neighbours: &VertexSet,
    sign: Sign,
) -> Result<Diagram, RewriteError> {
    if d.graph().contains(x) {
        return Err(RewriteError::VertexExists(x));
    }
    for &w in neighbours {
        check_vertex(d, w)?;
    }
    let mut out = d.clone();
    out.add_measured(x, crate::clifford::Effect::new(Basis::Z, sign))?;
    for &w in neighbours {
        out.add_edge(x, w)?;
        if sign == Sign::Minus {
            out.precompose(w, LocalClifford::z(2))?;
        }
    }
    Ok(out)
}

/// Bends input `u` into a state leg carried by a new output vertex.
pub fn bend_input(d: &Diagram, u: VertexId) -> Result<(Diagram, RewriteStep), RewriteError> {
    let w = d.next_id();
    Ok((
        bend_input_to(d, u, w)?,
        RewriteStep::Bend {
            input: u,
            output: w,
        },
    ))
}

fn bend_input_to(d: &Diagram, u: VertexId, w: VertexId) -> Result<Diagram, RewriteError> {
    check_vertex(d, u)?;
    if d.graph().contains(w) {
        return Err(RewriteError::VertexExists(w));
    }
    let wires: Vec<Wire> = d
        .wires()
        .into_iter()
        .map(|x| {
            if x == Wire::Input(u) {
                Wire::Output(w)
            } else {
                x
            }
        })
        .collect();
    let mut out = d.clone();
    let c_in = out.clear_input(u)?;
    // The bent leg carries the transpose of the input Clifford; the new
    // Hadamard edge is cancelled by a Hadamard on the new output.
    out.add_output(w, LocalClifford::hadamard().then(c_in.transpose()))?;
    out.add_edge(u, w)?;
    out.set_order(Some(wires))?;
    Ok(out)
}

/// Undoes [`bend_input`].
pub fn unbend(d: &Diagram, u: VertexId, w: VertexId) -> Result<Diagram, RewriteError> {
    check_vertex(d, u)?;
    check_vertex(d, w)?;
    let g = d.graph();
    if !g.is_output(w) || g.is_input(w) || g.neighbours(w) != &VertexSet::from([u]) {
        return Err(RewriteError::BadUnbend(format!(
            "{w} must be an output whose only neighbour is {u}"
        )));
    }
    if g.is_input(u) {
        return Err(RewriteError::BadUnbend(format!("{u} is already an input")));
    }
    let wires: Vec<Wire> = d
        .wires()
        .into_iter()
        .map(|x| {
            if x == Wire::Output(w) {
                Wire::Input(u)
            } else {
                x
            }
        })
        .collect();
    let mut out = d.clone();
    let c_out = out.remove_output(w)?;
    let c_in = LocalClifford::hadamard().then(c_out).transpose();
    out.make_input(u, c_in)?;
    out.set_order(Some(wires))?;
    Ok(out)
}

pub fn relabel(d: &Diagram, map: &[(VertexId, VertexId)]) -> Result<Diagram, RewriteError> {
    let m: BTreeMap<_, _> = map.iter().copied().collect();
    if m.len() != map.len() {
        return Err(RewriteError::BadRelabel("duplicate source id".into()));
    }
    let targets: VertexSet = m.values().copied().collect();
    if targets.len() != m.len() {
        return Err(RewriteError::BadRelabel(
            "two vertices map to the same id".into(),
        ));
    }
    if m.len() != d.graph().num_vertices() || !d.graph().vertices().all(|v| m.contains_key(&v)) {
        return Err(RewriteError::BadRelabel(
            "map must cover exactly the vertices".into(),
        ));
    }
    Ok(d.relabelled(&m)?)
}

/// Applies a recorded step. Recorded Z-deletions must match the diagram.
pub fn apply_step(d: &Diagram, step: &RewriteStep) -> Result<Diagram, RewriteError> {
    match step {
        RewriteStep::Lc { vertex } => lc_rewrite(d, *vertex),
        RewriteStep::Pivot { u, v } => pivot_rewrite(d, *u, *v),
        RewriteStep::ZDelete {
            vertex,
            neighbours,
            sign,
        } => {
            let (out, actual) = z_delete(d, *vertex)?;
            let RewriteStep::ZDelete {
                neighbours: n,
                sign: s,
                ..
            } = &actual
            else {
                unreachable!()
            };
            if n != neighbours {
                return Err(RewriteError::RecordMismatch {
                    vertex: *vertex,
                    what: "neighbourhood",
                });
            }
            if s != sign {
                return Err(RewriteError::RecordMismatch {
                    vertex: *vertex,
                    what: "measurement sign",
                });
            }
            Ok(out)
        }
        RewriteStep::ZInsert {
            vertex,
            neighbours,
            sign,
        } => z_insert_with_id(d, *vertex, &neighbours.iter().copied().collect(), *sign),
        RewriteStep::Bend { input, output } => bend_input_to(d, *input, *output),
        RewriteStep::Unbend { input, output } => unbend(d, *input, *output),
        RewriteStep::ColourChange => Ok(d.clone()),
        RewriteStep::Relabel { map } => relabel(d, map),
    }
}

/// Applies a whole trace.
pub fn replay(d: &Diagram, trace: &[RewriteStep]) -> Result<Diagram, RewriteError> {
    trace
        .iter()
        .try_fold(d.clone(), |acc, s| apply_step(&acc, s))
}
