//! Labelled open graphs with graph-level local complementation and pivoting.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type VertexId = usize;
pub type VertexSet = BTreeSet<VertexId>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("vertex {0} already exists")]
    DuplicateVertex(VertexId),
    #[error("self-loop on vertex {0}")]
    SelfLoop(VertexId),
    #[error("({0}, {1}) is not an edge")]
    NotAnEdge(VertexId, VertexId),
    #[error("measured vertex {0} has no label")]
    MissingLabel(VertexId),
    #[error("output vertex {0} carries a measurement label")]
    LabelOnOutput(VertexId),
}

/// Measurement label: a Pauli basis or a measurement plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    X,
    Y,
    Z,
    XY,
    XZ,
    YZ,
}

impl Label {
    pub const ALL: [Label; 6] = [
        Label::X,
        Label::Y,
        Label::Z,
        Label::XY,
        Label::XZ,
        Label::YZ,
    ];

    pub fn is_pauli(self) -> bool {
        matches!(self, Label::X | Label::Y | Label::Z)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A simple undirected graph with inputs, outputs and a label on every
/// non-output vertex.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelledOpenGraph {
    adjacency: BTreeMap<VertexId, VertexSet>,
    inputs: VertexSet,
    outputs: VertexSet,
    labels: BTreeMap<VertexId, Label>,
}

impl LabelledOpenGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds and validates a graph from its parts.
    pub fn from_parts(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
        inputs: impl IntoIterator<Item = VertexId>,
        outputs: impl IntoIterator<Item = VertexId>,
        labels: impl IntoIterator<Item = (VertexId, Label)>,
    ) -> Result<Self, GraphError> {
        let mut g = LabelledOpenGraph::new();
        for v in vertices {
            g.add_vertex(v)?;
        }
        for (a, b) in edges {
            g.add_edge(a, b)?;
        }
        for v in inputs {
            g.check(v)?;
            g.inputs.insert(v);
        }
        for v in outputs {
            g.check(v)?;
            g.outputs.insert(v);
        }
        for (v, l) in labels {
            g.check(v)?;
            g.labels.insert(v, l);
        }
        g.validate()?;
        Ok(g)
    }

    /// Every vertex outside `O` is labelled and no output is.
    pub fn validate(&self) -> Result<(), GraphError> {
        for &v in self.adjacency.keys() {
            match (self.outputs.contains(&v), self.labels.contains_key(&v)) {
                (false, false) => return Err(GraphError::MissingLabel(v)),
                (true, true) => return Err(GraphError::LabelOnOutput(v)),
                _ => {}
            }
        }
        Ok(())
    }

    fn check(&self, v: VertexId) -> Result<(), GraphError> {
        if self.adjacency.contains_key(&v) {
            Ok(())
        } else {
            Err(GraphError::UnknownVertex(v))
        }
    }

    pub fn add_vertex(&mut self, v: VertexId) -> Result<(), GraphError> {
        if self.adjacency.contains_key(&v) {
            return Err(GraphError::DuplicateVertex(v));
        }
        self.adjacency.insert(v, VertexSet::new());
        Ok(())
    }

    /// Removes `v`, its edges, its label and its boundary roles.
    pub fn remove_vertex(&mut self, v: VertexId) -> Result<(), GraphError> {
        let nbrs = self
            .adjacency
            .remove(&v)
            .ok_or(GraphError::UnknownVertex(v))?;
        for w in nbrs {
            self.adjacency.get_mut(&w).unwrap().remove(&v);
        }
        self.inputs.remove(&v);
        self.outputs.remove(&v);
        self.labels.remove(&v);
        Ok(())
    }

    pub fn add_edge(&mut self, a: VertexId, b: VertexId) -> Result<(), GraphError> {
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        self.check(a)?;
        self.check(b)?;
        self.adjacency.get_mut(&a).unwrap().insert(b);
        self.adjacency.get_mut(&b).unwrap().insert(a);
        Ok(())
    }

    pub fn remove_edge(&mut self, a: VertexId, b: VertexId) -> Result<(), GraphError> {
        if !self.has_edge(a, b) {
            return Err(GraphError::NotAnEdge(a, b));
        }
        self.adjacency.get_mut(&a).unwrap().remove(&b);
        self.adjacency.get_mut(&b).unwrap().remove(&a);
        Ok(())
    }

    fn toggle_edge(&mut self, a: VertexId, b: VertexId) {
        debug_assert_ne!(a, b);
        let na = self.adjacency.get_mut(&a).unwrap();
        if !na.remove(&b) {
            na.insert(b);
            self.adjacency.get_mut(&b).unwrap().insert(a);
        } else {
            self.adjacency.get_mut(&b).unwrap().remove(&a);
        }
    }

    pub fn set_input(&mut self, v: VertexId, is_input: bool) -> Result<(), GraphError> {
        self.check(v)?;
        if is_input {
            self.inputs.insert(v);
        } else {
            self.inputs.remove(&v);
        }
        Ok(())
    }

    /// Marks `v` as an output and drops its label.
    pub fn set_output(&mut self, v: VertexId) -> Result<(), GraphError> {
        self.check(v)?;
        self.outputs.insert(v);
        self.labels.remove(&v);
        Ok(())
    }

    /// Marks `v` as measured with `label`.
    pub fn set_label(&mut self, v: VertexId, label: Label) -> Result<(), GraphError> {
        self.check(v)?;
        self.outputs.remove(&v);
        self.labels.insert(v, label);
        Ok(())
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.adjacency.contains_key(&v)
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.adjacency.get(&a).is_some_and(|n| n.contains(&b))
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.adjacency.keys().copied()
    }

    pub fn num_vertices(&self) -> usize {
        self.adjacency.len()
    }

    /// Edges `(a, b)` with `a < b`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adjacency
            .iter()
            .flat_map(|(&a, n)| n.range(a + 1..).map(move |&b| (a, b)))
    }

    pub fn num_edges(&self) -> usize {
        self.edges().count()
    }

    /// Neighbours of `v`; empty for unknown vertices.
    pub fn neighbours(&self, v: VertexId) -> &VertexSet {
        static EMPTY: VertexSet = VertexSet::new();
        self.adjacency.get(&v).unwrap_or(&EMPTY)
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.neighbours(v).len()
    }

    pub fn inputs(&self) -> &VertexSet {
        &self.inputs
    }

    pub fn outputs(&self) -> &VertexSet {
        &self.outputs
    }

    pub fn is_input(&self, v: VertexId) -> bool {
        self.inputs.contains(&v)
    }

    pub fn is_output(&self, v: VertexId) -> bool {
        self.outputs.contains(&v)
    }

    /// `None` for outputs and unknown vertices.
    pub fn label(&self, v: VertexId) -> Option<Label> {
        self.labels.get(&v).copied()
    }

    pub fn labels(&self) -> &BTreeMap<VertexId, Label> {
        &self.labels
    }

    /// Measured vertices `V \ O`, ascending.
    pub fn measured(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.labels.keys().copied()
    }

    /// Vertices with an odd number of neighbours in `set`.
    pub fn odd_neighbourhood(&self, set: &VertexSet) -> Result<VertexSet, GraphError> {
        let mut odd = VertexSet::new();
        for &s in set {
            self.check(s)?;
            for &w in &self.adjacency[&s] {
                if !odd.remove(&w) {
                    odd.insert(w);
                }
            }
        }
        Ok(odd)
    }

    /// `G ⋆ u`: toggles every edge between distinct neighbours of `u`.
    pub fn local_complement(&self, u: VertexId) -> Result<Self, GraphError> {
        let mut g = self.clone();
        g.local_complement_in_place(u)?;
        Ok(g)
    }

    pub fn local_complement_in_place(&mut self, u: VertexId) -> Result<(), GraphError> {
        self.check(u)?;
        let nbrs: Vec<_> = self.adjacency[&u].iter().copied().collect();
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                self.toggle_edge(a, b);
            }
        }
        Ok(())
    }

    /// `G ∧ uv = G ⋆ u ⋆ v ⋆ u`, computed directly: connectivity between the
    /// three neighbour classes is toggled and the neighbourhoods of `u` and
    /// `v` are exchanged.
    pub fn pivot(&self, u: VertexId, v: VertexId) -> Result<Self, GraphError> {
        self.check(u)?;
        self.check(v)?;
        if !self.has_edge(u, v) {
            return Err(GraphError::NotAnEdge(u, v));
        }
        let nu = &self.adjacency[&u];
        let nv = &self.adjacency[&v];
        let only_u: Vec<_> = nu
            .iter()
            .filter(|&&w| w != v && !nv.contains(&w))
            .copied()
            .collect();
        let only_v: Vec<_> = nv
            .iter()
            .filter(|&&w| w != u && !nu.contains(&w))
            .copied()
            .collect();
        let common: Vec<_> = nu.intersection(nv).copied().collect();
        let mut g = self.clone();
        for (xs, ys) in [(&only_u, &only_v), (&only_u, &common), (&only_v, &common)] {
            for &a in xs.iter() {
                for &b in ys.iter() {
                    g.toggle_edge(a, b);
                }
            }
        }
        for &w in only_u.iter().chain(&only_v) {
            g.toggle_edge(u, w);
            g.toggle_edge(v, w);
        }
        Ok(g)
    }

    /// `G ⋆ u ⋆ v ⋆ u`, by definition.
    pub fn pivot_by_local_complements(&self, u: VertexId, v: VertexId) -> Result<Self, GraphError> {
        if !self.has_edge(u, v) {
            self.check(u)?;
            self.check(v)?;
            return Err(GraphError::NotAnEdge(u, v));
        }
        self.local_complement(u)?
            .local_complement(v)?
            .local_complement(u)
    }
}
