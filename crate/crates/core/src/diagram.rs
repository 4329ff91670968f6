//! MBQC+LC diagrams: a graph state with Pauli measurement effects on the
//! non-outputs and single-qubit Cliffords on the boundary wires.
//!
//! Every vertex is a green spider and every graph edge a Hadamard edge. A
//! measured vertex carries one of the six Pauli effects. An output vertex
//! carries a Clifford applied to its output leg; an input vertex carries a
//! Clifford applied to its input leg before it enters the spider.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clifford::{Basis, Effect, LocalClifford};
use crate::graph::{GraphError, Label, LabelledOpenGraph, VertexId, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("vertex {0} is not an output")]
    NotAnOutput(VertexId),
    #[error("vertex {0} is not an input")]
    NotAnInput(VertexId),
    #[error("vertex {0} is not measured")]
    NotMeasured(VertexId),
    #[error("invalid wire order: {0}")]
    BadOrder(String),
}

/// A boundary wire of a diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Wire {
    Input(VertexId),
    Output(VertexId),
}

impl Wire {
    pub fn vertex(self) -> VertexId {
        match self {
            Wire::Input(v) | Wire::Output(v) => v,
        }
    }
}

pub fn label_of(basis: Basis) -> Label {
    match basis {
        Basis::X => Label::X,
        Basis::Y => Label::Y,
        Basis::Z => Label::Z,
    }
}

#[derive(Debug, Clone, Default)]
pub struct Diagram {
    graph: LabelledOpenGraph,
    effects: BTreeMap<VertexId, Effect>,
    output_cliffords: BTreeMap<VertexId, LocalClifford>,
    input_cliffords: BTreeMap<VertexId, LocalClifford>,
    order: Option<Vec<Wire>>,
    next_id: VertexId,
}

// `next_id` is allocation state, not part of the diagram.
impl PartialEq for Diagram {
    fn eq(&self, o: &Self) -> bool {
        self.graph == o.graph
            && self.effects == o.effects
            && self.output_cliffords == o.output_cliffords
            && self.input_cliffords == o.input_cliffords
            && self.order == o.order
    }
}

impl Eq for Diagram {}

impl Diagram {
    pub fn new() -> Self {
        Self::default()
    }

    fn insert_vertex(&mut self, v: VertexId) -> Result<(), DiagramError> {
        self.graph.add_vertex(v)?;
        self.next_id = self.next_id.max(v + 1);
        Ok(())
    }

    pub fn add_measured(&mut self, v: VertexId, effect: Effect) -> Result<(), DiagramError> {
        self.insert_vertex(v)?;
        self.graph.set_label(v, label_of(effect.basis))?;
        self.effects.insert(v, effect);
        Ok(())
    }

    pub fn add_output(&mut self, v: VertexId, clifford: LocalClifford) -> Result<(), DiagramError> {
        self.insert_vertex(v)?;
        self.graph.set_output(v)?;
        self.output_cliffords.insert(v, clifford);
        Ok(())
    }

    /// Makes an existing vertex an input with the given input-leg Clifford.
    pub fn make_input(&mut self, v: VertexId, clifford: LocalClifford) -> Result<(), DiagramError> {
        self.graph.set_input(v, true)?;
        self.input_cliffords.insert(v, clifford);
        Ok(())
    }

    pub fn add_edge(&mut self, a: VertexId, b: VertexId) -> Result<(), DiagramError> {
        Ok(self.graph.add_edge(a, b)?)
    }

    pub fn set_order(&mut self, order: Option<Vec<Wire>>) -> Result<(), DiagramError> {
        if let Some(o) = &order {
            self.check_order(o)?;
        }
        // An order equal to the default is stored as no order.
        self.order = order.filter(|o| *o != self.default_wires());
        Ok(())
    }

    fn default_wires(&self) -> Vec<Wire> {
        self.graph
            .inputs()
            .iter()
            .map(|&v| Wire::Input(v))
            .chain(self.graph.outputs().iter().map(|&v| Wire::Output(v)))
            .collect()
    }

    fn check_order(&self, order: &[Wire]) -> Result<(), DiagramError> {
        let mut given = order.to_vec();
        given.sort();
        let mut expected = self.default_wires();
        expected.sort();
        if given != expected {
            return Err(DiagramError::BadOrder(
                "order must list every input and output wire exactly once".into(),
            ));
        }
        Ok(())
    }

    pub fn graph(&self) -> &LabelledOpenGraph {
        &self.graph
    }

    pub fn effect(&self, v: VertexId) -> Option<Effect> {
        self.effects.get(&v).copied()
    }

    pub fn effects(&self) -> &BTreeMap<VertexId, Effect> {
        &self.effects
    }

    pub fn output_clifford(&self, v: VertexId) -> Option<LocalClifford> {
        self.output_cliffords.get(&v).copied()
    }

    pub fn input_clifford(&self, v: VertexId) -> Option<LocalClifford> {
        self.input_cliffords.get(&v).copied()
    }

    pub fn explicit_order(&self) -> Option<&[Wire]> {
        self.order.as_deref()
    }

    /// Wire order of the state obtained by bending inputs: the explicit
    /// order if any, else inputs then outputs, each ascending.
    pub fn wires(&self) -> Vec<Wire> {
        self.order.clone().unwrap_or_else(|| self.default_wires())
    }

    pub fn next_id(&self) -> VertexId {
        self.next_id
    }

    pub fn neighbours(&self, v: VertexId) -> &VertexSet {
        self.graph.neighbours(v)
    }

    /// Vertices that are neither inputs nor outputs.
    pub fn interior(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.graph
            .measured()
            .filter(move |v| !self.graph.is_input(*v))
    }

    pub fn set_effect(&mut self, v: VertexId, effect: Effect) -> Result<(), DiagramError> {
        if !self.effects.contains_key(&v) {
            return Err(DiagramError::NotMeasured(v));
        }
        self.graph.set_label(v, label_of(effect.basis))?;
        self.effects.insert(v, effect);
        Ok(())
    }

    pub fn set_output_clifford(
        &mut self,
        v: VertexId,
        c: LocalClifford,
    ) -> Result<(), DiagramError> {
        match self.output_cliffords.get_mut(&v) {
            Some(slot) => {
                *slot = c;
                Ok(())
            }
            None => Err(DiagramError::NotAnOutput(v)),
        }
    }

    pub fn set_input_clifford(
        &mut self,
        v: VertexId,
        c: LocalClifford,
    ) -> Result<(), DiagramError> {
        match self.input_cliffords.get_mut(&v) {
            Some(slot) => {
                *slot = c;
                Ok(())
            }
            None => Err(DiagramError::NotAnInput(v)),
        }
    }

    /// Removes `v` as an input and returns its Clifford. Any explicit order
    /// is dropped; the caller sets a new one.
    pub(crate) fn clear_input(&mut self, v: VertexId) -> Result<LocalClifford, DiagramError> {
        let c = self
            .input_cliffords
            .remove(&v)
            .ok_or(DiagramError::NotAnInput(v))?;
        self.graph.set_input(v, false)?;
        self.order = None;
        Ok(c)
    }

    #[cfg(test)]
    fn set_next_id(&mut self, next: VertexId) {
        self.next_id = self.next_id.max(next);
    }

    pub(crate) fn replace_graph(&mut self, graph: LabelledOpenGraph) {
        debug_assert!(graph.vertices().eq(self.graph.vertices()));
        self.graph = graph;
    }

    /// Removes a vertex that is not on the boundary.
    pub(crate) fn remove_measured(&mut self, v: VertexId) -> Result<Effect, DiagramError> {
        let e = self
            .effects
            .remove(&v)
            .ok_or(DiagramError::NotMeasured(v))?;
        self.graph.remove_vertex(v)?;
        Ok(e)
    }

    /// Inserts `c` between the spider of `v` and its decoration: an output
    /// Clifford `C` becomes `C ∘ c` and an effect `⟨e|` becomes `⟨e| ∘ c`.
    pub(crate) fn precompose(&mut self, v: VertexId, c: LocalClifford) -> Result<(), DiagramError> {
        if let Some(slot) = self.output_cliffords.get_mut(&v) {
            *slot = c.then(*slot);
            Ok(())
        } else if let Some(e) = self.effects.get(&v).copied() {
            self.set_effect(v, e.after(c))
        } else {
            Err(GraphError::UnknownVertex(v).into())
        }
    }

    /// Removes an output vertex that is not an input. Any explicit order is
    /// dropped; the caller sets a new one.
    pub(crate) fn remove_output(&mut self, v: VertexId) -> Result<LocalClifford, DiagramError> {
        if self.graph.is_input(v) {
            return Err(DiagramError::NotAnOutput(v));
        }
        let c = self
            .output_cliffords
            .remove(&v)
            .ok_or(DiagramError::NotAnOutput(v))?;
        self.graph.remove_vertex(v)?;
        self.order = None;
        Ok(c)
    }

    /// Renames vertices through `map`, which must be injective and defined
    /// on every vertex.
    pub fn relabelled(&self, map: &BTreeMap<VertexId, VertexId>) -> Result<Diagram, DiagramError> {
        let image = |v: VertexId| map.get(&v).copied().ok_or(GraphError::UnknownVertex(v));
        let mut out = Diagram::new();
        for v in self.graph.vertices() {
            let w = image(v)?;
            if let Some(e) = self.effect(v) {
                out.add_measured(w, e)?;
            } else {
                out.add_output(w, self.output_clifford(v).unwrap())?;
            }
        }
        for (a, b) in self.graph.edges() {
            out.add_edge(image(a)?, image(b)?)?;
        }
        for (&v, &c) in &self.input_cliffords {
            out.make_input(image(v)?, c)?;
        }
        let order = self
            .order
            .as_ref()
            .map(|o| {
                o.iter()
                    .map(|w| {
                        Ok(match *w {
                            Wire::Input(v) => Wire::Input(image(v)?),
                            Wire::Output(v) => Wire::Output(image(v)?),
                        })
                    })
                    .collect::<Result<Vec<_>, GraphError>>()
            })
            .transpose()?;
        out.set_order(order)?;
        out.next_id = out.next_id.max(self.next_id);
        Ok(out)
    }
}
