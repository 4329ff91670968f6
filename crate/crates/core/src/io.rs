//! JSON diagram files and JSON-lines traces.
//!
//! Output is deterministic: vertices sorted by id, edges sorted, fields in
//! a fixed order, two-space indentation and a trailing newline. Structural
//! equality of diagrams is byte equality of their files.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::CanonicalDiagram;
use crate::clifford::{Basis, Effect, LocalClifford, Sign};
use crate::diagram::{Diagram, DiagramError, Wire};
use crate::graph::{Label, LabelledOpenGraph, VertexId};
use crate::phasepoly::{PhasePolyDiagram, Spider, StabilizerError};
use crate::rewrite::RewriteStep;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("trace line {line}: {message}")]
    Trace { line: usize, message: String },
}

impl From<DiagramError> for IoError {
    fn from(e: DiagramError) -> Self {
        IoError::Schema(e.to_string())
    }
}

impl From<StabilizerError> for IoError {
    fn from(e: StabilizerError) -> Self {
        IoError::Schema(e.to_string())
    }
}

fn schema(msg: impl Into<String>) -> IoError {
    IoError::Schema(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagramKind {
    MbqcLc,
    PhasePoly,
    Canonical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Output,
    Measured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Colour {
    Green,
    Red,
}

/// One vertex. Measured vertices carry `basis` and `sign`, outputs of an
/// MBQC+LC diagram a `clifford`, inputs an `input_clifford`, and spiders of
/// a phase-polynomial diagram a `colour` and `phase_quarter_turns`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexRecord {
    pub id: VertexId,
    pub role: Role,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub input: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Basis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<Sign>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clifford: Option<LocalClifford>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_clifford: Option<LocalClifford>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colour: Option<Colour>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_quarter_turns: Option<u8>,
}

impl VertexRecord {
    fn bare(id: VertexId, role: Role) -> Self {
        VertexRecord {
            id,
            role,
            input: false,
            basis: None,
            sign: None,
            clifford: None,
            input_clifford: None,
            colour: None,
            phase_quarter_turns: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub u: VertexId,
    pub v: VertexId,
    pub hadamard: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramFile {
    pub version: u32,
    pub kind: DiagramKind,
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<EdgeRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<Wire>>,
}

impl DiagramFile {
    pub fn parse(text: &str) -> Result<Self, IoError> {
        let file: DiagramFile =
            serde_json::from_str(text).map_err(|e| IoError::Json(e.to_string()))?;
        file.validate()?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn from_diagram(d: &Diagram) -> Self {
        let g = d.graph();
        let vertices = g
            .vertices()
            .map(|v| {
                let mut r;
                if let Some(e) = d.effect(v) {
                    r = VertexRecord::bare(v, Role::Measured);
                    r.basis = Some(e.basis);
                    r.sign = Some(e.sign);
                } else {
                    r = VertexRecord::bare(v, Role::Output);
                    r.clifford = d.output_clifford(v);
                }
                if g.is_input(v) {
                    r.input = true;
                    r.input_clifford = d.input_clifford(v);
                }
                r
            })
            .collect();
        let edges = g
            .edges()
            .map(|(u, v)| EdgeRecord {
                u,
                v,
                hadamard: true,
            })
            .collect();
        DiagramFile {
            version: FORMAT_VERSION,
            kind: DiagramKind::MbqcLc,
            vertices,
            edges,
            order: d.explicit_order().map(<[Wire]>::to_vec),
        }
    }

    pub fn from_phase_poly(p: &PhasePolyDiagram) -> Self {
        Self::phase_poly_file(p, DiagramKind::PhasePoly)
    }

    pub fn from_canonical(c: &CanonicalDiagram) -> Self {
        Self::phase_poly_file(c.phase_poly(), DiagramKind::Canonical)
    }

    fn phase_poly_file(p: &PhasePolyDiagram, kind: DiagramKind) -> Self {
        let vertices = p
            .spiders()
            .iter()
            .enumerate()
            .map(|(j, s)| {
                let mut r = VertexRecord::bare(j, Role::Output);
                let (colour, turns) = match *s {
                    Spider::Green { quarter_turns } => (Colour::Green, quarter_turns),
                    Spider::Red { half_turns } => (Colour::Red, 2 * half_turns),
                };
                r.colour = Some(colour);
                r.phase_quarter_turns = Some(turns);
                r
            })
            .collect();
        let edges = p
            .edges()
            .iter()
            .map(|&(u, v)| EdgeRecord {
                u,
                v,
                hadamard: !p.spiders()[u].is_red() && !p.spiders()[v].is_red(),
            })
            .collect();
        DiagramFile {
            version: FORMAT_VERSION,
            kind,
            vertices,
            edges,
            order: None,
        }
    }

    fn validate(&self) -> Result<(), IoError> {
        if self.version != FORMAT_VERSION {
            return Err(schema(format!(
                "unsupported version {}, expected {FORMAT_VERSION}",
                self.version
            )));
        }
        for w in self.vertices.windows(2) {
            if w[0].id >= w[1].id {
                return Err(schema("vertex ids must be unique and ascending"));
            }
        }
        match self.kind {
            DiagramKind::MbqcLc => {
                self.build_diagram()?;
            }
            DiagramKind::PhasePoly => {
                self.build_phase_poly()?;
            }
            DiagramKind::Canonical => {
                CanonicalDiagram::new(self.build_phase_poly()?)?;
            }
        }
        Ok(())
    }

    fn build_diagram(&self) -> Result<Diagram, IoError> {
        let mut d = Diagram::new();
        for r in &self.vertices {
            if r.colour.is_some() || r.phase_quarter_turns.is_some() {
                return Err(schema(format!(
                    "vertex {}: colour and phase belong to phase-polynomial files",
                    r.id
                )));
            }
            match r.role {
                Role::Measured => {
                    if r.clifford.is_some() {
                        return Err(schema(format!(
                            "measured vertex {} has an output clifford",
                            r.id
                        )));
                    }
                    let (Some(basis), Some(sign)) = (r.basis, r.sign) else {
                        return Err(schema(format!(
                            "measured vertex {} needs basis and sign",
                            r.id
                        )));
                    };
                    d.add_measured(r.id, Effect::new(basis, sign))?;
                }
                Role::Output => {
                    if r.basis.is_some() || r.sign.is_some() {
                        return Err(schema(format!("output vertex {} has a measurement", r.id)));
                    }
                    d.add_output(r.id, r.clifford.unwrap_or(LocalClifford::IDENTITY))?;
                }
            }
            if r.input {
                d.make_input(r.id, r.input_clifford.unwrap_or(LocalClifford::IDENTITY))?;
            } else if r.input_clifford.is_some() {
                return Err(schema(format!(
                    "vertex {} has an input clifford but is not an input",
                    r.id
                )));
            }
        }
        for e in &self.edges {
            if !e.hadamard {
                return Err(schema(format!(
                    "edge ({}, {}): MBQC+LC edges are Hadamard edges",
                    e.u, e.v
                )));
            }
            if d.graph().has_edge(e.u, e.v) {
                return Err(schema(format!("duplicate edge ({}, {})", e.u, e.v)));
            }
            d.add_edge(e.u, e.v)?;
        }
        d.set_order(self.order.clone())?;
        Ok(d)
    }

    fn build_phase_poly(&self) -> Result<PhasePolyDiagram, IoError> {
        if self.order.is_some() {
            return Err(schema("phase-polynomial files are ordered by vertex id"));
        }
        let mut spiders = Vec::new();
        for (j, r) in self.vertices.iter().enumerate() {
            if r.id != j {
                return Err(schema("phase-polynomial vertex ids must be 0, 1, 2, ..."));
            }
            if r.role != Role::Output
                || r.input
                || r.basis.is_some()
                || r.sign.is_some()
                || r.clifford.is_some()
                || r.input_clifford.is_some()
            {
                return Err(schema(format!("spider {j} must be a plain output")));
            }
            let (Some(colour), Some(turns)) = (r.colour, r.phase_quarter_turns) else {
                return Err(schema(format!(
                    "spider {j} needs colour and phase_quarter_turns"
                )));
            };
            spiders.push(match colour {
                Colour::Green if turns < 4 => Spider::Green {
                    quarter_turns: turns,
                },
                Colour::Red if turns == 0 || turns == 2 => Spider::Red {
                    half_turns: turns / 2,
                },
                _ => {
                    return Err(schema(format!(
                        "spider {j} has phase {turns} quarter turns"
                    )))
                }
            });
        }
        let mut seen = std::collections::BTreeSet::new();
        for e in &self.edges {
            let (a, b) = (e.u.min(e.v), e.u.max(e.v));
            if !seen.insert((a, b)) {
                return Err(schema(format!("duplicate edge ({a}, {b})")));
            }
            let (Some(sa), Some(sb)) = (spiders.get(a), spiders.get(b)) else {
                return Err(schema(format!("edge ({a}, {b}) names an unknown spider")));
            };
            if e.hadamard != (!sa.is_red() && !sb.is_red()) {
                return Err(schema(format!(
                    "edge ({a}, {b}) must be {} (Hadamard exactly between green spiders)",
                    if e.hadamard { "plain" } else { "Hadamard" }
                )));
            }
        }
        Ok(PhasePolyDiagram::new(spiders, seen)?)
    }

    /// The file as an MBQC+LC diagram. Phase-polynomial files become
    /// output-only diagrams with spider Cliffords.
    pub fn to_diagram(&self) -> Result<Diagram, IoError> {
        match self.kind {
            DiagramKind::MbqcLc => self.build_diagram(),
            _ => Ok(self.build_phase_poly()?.to_diagram()),
        }
    }

    pub fn to_phase_poly(&self) -> Result<PhasePolyDiagram, IoError> {
        match self.kind {
            DiagramKind::MbqcLc => Err(schema("expected a phase_poly or canonical file")),
            _ => self.build_phase_poly(),
        }
    }
}

/// A labelled open graph on its own, for flow commands on graphs whose
/// labels include measurement planes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub version: u32,
    /// Always `"open_graph"`.
    pub kind: String,
    pub vertices: Vec<VertexId>,
    pub edges: Vec<(VertexId, VertexId)>,
    pub inputs: Vec<VertexId>,
    pub outputs: Vec<VertexId>,
    pub labels: std::collections::BTreeMap<VertexId, Label>,
}

pub const GRAPH_KIND: &str = "open_graph";

impl GraphFile {
    pub fn from_graph(g: &LabelledOpenGraph) -> Self {
        GraphFile {
            version: FORMAT_VERSION,
            kind: GRAPH_KIND.into(),
            vertices: g.vertices().collect(),
            edges: g.edges().collect(),
            inputs: g.inputs().iter().copied().collect(),
            outputs: g.outputs().iter().copied().collect(),
            labels: g.labels().clone(),
        }
    }

    pub fn parse(text: &str) -> Result<LabelledOpenGraph, IoError> {
        let f: GraphFile = serde_json::from_str(text).map_err(|e| IoError::Json(e.to_string()))?;
        if f.version != FORMAT_VERSION {
            return Err(schema(format!("unsupported version {}", f.version)));
        }
        if f.kind != GRAPH_KIND {
            return Err(schema(format!(
                "expected kind {GRAPH_KIND}, found {}",
                f.kind
            )));
        }
        LabelledOpenGraph::from_parts(f.vertices, f.edges, f.inputs, f.outputs, f.labels)
            .map_err(|e| schema(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }
}

/// The open graph of either file kind: a graph file directly, or the
/// underlying graph of a diagram file.
pub fn graph_from_json(text: &str) -> Result<LabelledOpenGraph, IoError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| IoError::Json(e.to_string()))?;
    if value.get("kind").and_then(|k| k.as_str()) == Some(GRAPH_KIND) {
        GraphFile::parse(text)
    } else {
        Ok(diagram_from_json(text)?.graph().clone())
    }
}

pub fn diagram_to_json(d: &Diagram) -> String {
    DiagramFile::from_diagram(d).to_json()
}

pub fn diagram_from_json(text: &str) -> Result<Diagram, IoError> {
    DiagramFile::parse(text)?.to_diagram()
}

/// One JSON object per line.
pub fn trace_to_jsonl(trace: &[RewriteStep]) -> String {
    trace
        .iter()
        .map(|s| serde_json::to_string(s).expect("steps serialize") + "\n")
        .collect()
}

/// Parses a trace; blank lines are ignored.
pub fn trace_from_jsonl(text: &str) -> Result<Vec<RewriteStep>, IoError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| IoError::Trace {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}
