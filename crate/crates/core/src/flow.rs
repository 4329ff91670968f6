//! Pauli flow: verification, a layered finder and a brute-force existence
//! oracle.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{solve, BitMatrix, BitRow};
use crate::graph::{Label, LabelledOpenGraph, VertexId, VertexSet};

/// A structural problem with a flow, as opposed to a failed condition.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlowError {
    #[error("order contains a cycle through vertex {0}")]
    Cyclic(VertexId),
    #[error("flow mentions unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("measured vertex {0} has no correction set")]
    MissingCorrection(VertexId),
    #[error("correction set given for output vertex {0}")]
    CorrectionOnOutput(VertexId),
    #[error("correction set of {vertex} contains input {input}")]
    CorrectionContainsInput { vertex: VertexId, input: VertexId },
}

/// A failed flow condition: `condition` (1 to 9) does not hold for the
/// corrected vertex `vertex`, witnessed by `witness`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub vertex: VertexId,
    pub condition: u8,
    pub witness: VertexId,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.vertex, self.condition, self.witness)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("malformed flow: {0}")]
    Malformed(#[from] FlowError),
    #[error("condition {} fails at vertex {} (witness {})", .0.condition, .0.vertex, .0.witness)]
    Violation(Violation),
}

/// How to read the Y-vertex condition (3) when the Y vertex is the corrected
/// vertex itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum YConditionReading {
    /// Only `v ≠ u`; the vertex itself is governed by the Y self-condition (9).
    #[default]
    ExcludeSelf,
    /// Every Y vertex including `u`. This contradicts condition 9, so no
    /// Y-measured vertex can then be corrected.
    Literal,
}

/// Correction sets `p` and a strict partial order `≺`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliFlow {
    correction: BTreeMap<VertexId, VertexSet>,
    relations: BTreeSet<(VertexId, VertexId)>,
    successors: BTreeMap<VertexId, VertexSet>,
}

impl PauliFlow {
    /// Builds a flow from correction sets and generating relations `u ≺ v`;
    /// the order is their transitive closure, which must be acyclic.
    pub fn new(
        correction: BTreeMap<VertexId, VertexSet>,
        relations: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self, FlowError> {
        let relations: BTreeSet<_> = relations.into_iter().collect();
        let successors = transitive_closure(&relations)?;
        Ok(PauliFlow {
            correction,
            relations,
            successors,
        })
    }

    pub fn correction(&self, u: VertexId) -> Option<&VertexSet> {
        self.correction.get(&u)
    }

    pub fn corrections(&self) -> &BTreeMap<VertexId, VertexSet> {
        &self.correction
    }

    /// The generating relations as given.
    pub fn relations(&self) -> &BTreeSet<(VertexId, VertexId)> {
        &self.relations
    }

    /// `u ≺ v` in the closed order.
    pub fn precedes(&self, u: VertexId, v: VertexId) -> bool {
        self.successors.get(&u).is_some_and(|s| s.contains(&v))
    }

    /// Everything strictly after `u`.
    pub fn successors(&self, u: VertexId) -> VertexSet {
        self.successors.get(&u).cloned().unwrap_or_default()
    }

    fn mentioned(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.correction
            .iter()
            .flat_map(|(&u, s)| std::iter::once(u).chain(s.iter().copied()))
            .chain(self.relations.iter().flat_map(|&(a, b)| [a, b]))
    }
}

fn transitive_closure(
    relations: &BTreeSet<(VertexId, VertexId)>,
) -> Result<BTreeMap<VertexId, VertexSet>, FlowError> {
    let mut direct: BTreeMap<VertexId, VertexSet> = BTreeMap::new();
    for &(a, b) in relations {
        if a == b {
            return Err(FlowError::Cyclic(a));
        }
        direct.entry(a).or_default().insert(b);
    }
    let mut closure = BTreeMap::new();
    for &start in direct.keys() {
        let mut seen = VertexSet::new();
        let mut stack: Vec<_> = direct[&start].iter().copied().collect();
        while let Some(v) = stack.pop() {
            if v == start {
                return Err(FlowError::Cyclic(start));
            }
            if seen.insert(v) {
                if let Some(next) = direct.get(&v) {
                    stack.extend(next.iter().copied());
                }
            }
        }
        closure.insert(start, seen);
    }
    Ok(closure)
}

#[derive(Serialize, Deserialize)]
struct CorrectionEntry {
    vertex: VertexId,
    set: Vec<VertexId>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FlowRepr {
    correction: Vec<CorrectionEntry>,
    order: Vec<(VertexId, VertexId)>,
}

impl Serialize for PauliFlow {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FlowRepr {
            correction: self
                .correction
                .iter()
                .map(|(&vertex, set)| CorrectionEntry {
                    vertex,
                    set: set.iter().copied().collect(),
                })
                .collect(),
            order: self.relations.iter().copied().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PauliFlow {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = FlowRepr::deserialize(d)?;
        let mut correction = BTreeMap::new();
        for e in repr.correction {
            if correction
                .insert(e.vertex, e.set.into_iter().collect())
                .is_some()
            {
                return Err(serde::de::Error::custom(format!(
                    "duplicate correction entry for vertex {}",
                    e.vertex
                )));
            }
        }
        PauliFlow::new(correction, repr.order).map_err(serde::de::Error::custom)
    }
}

fn check_well_formed(g: &LabelledOpenGraph, f: &PauliFlow) -> Result<(), FlowError> {
    if let Some(v) = f.mentioned().find(|&v| !g.contains(v)) {
        return Err(FlowError::UnknownVertex(v));
    }
    if let Some(u) = g.measured().find(|u| !f.correction.contains_key(u)) {
        return Err(FlowError::MissingCorrection(u));
    }
    for (&u, set) in &f.correction {
        if g.is_output(u) {
            return Err(FlowError::CorrectionOnOutput(u));
        }
        if let Some(&input) = set.iter().find(|v| g.is_input(**v)) {
            return Err(FlowError::CorrectionContainsInput { vertex: u, input });
        }
    }
    Ok(())
}

/// Whether the self-conditions (4 to 9) hold for `u` with label `label`.
fn local_conditions_hold(label: Label, in_p: bool, in_odd: bool) -> bool {
    match label {
        Label::XY => !in_p && in_odd,
        Label::XZ => in_p && in_odd,
        Label::YZ => in_p && !in_odd,
        Label::X => in_odd,
        Label::Z => in_p,
        Label::Y => in_p != in_odd,
    }
}

fn local_condition_number(label: Label) -> u8 {
    match label {
        Label::XY => 4,
        Label::XZ => 5,
        Label::YZ => 6,
        Label::X => 7,
        Label::Z => 8,
        Label::Y => 9,
    }
}

pub fn verify_flow(g: &LabelledOpenGraph, f: &PauliFlow) -> Result<(), VerifyError> {
    verify_flow_with(g, f, YConditionReading::default())
}

/// Checks all nine conditions. The first failure is reported in ascending
/// order of corrected vertex, then condition number, then witness.
pub fn verify_flow_with(
    g: &LabelledOpenGraph,
    f: &PauliFlow,
    reading: YConditionReading,
) -> Result<(), VerifyError> {
    check_well_formed(g, f)?;
    let fail = |vertex, condition, witness| {
        Err(VerifyError::Violation(Violation {
            vertex,
            condition,
            witness,
        }))
    };
    for (u, label_u) in g.labels().iter().map(|(&u, &l)| (u, l)) {
        let p = &f.correction[&u];
        let odd = g.odd_neighbourhood(p).expect("checked vertices");
        for &v in p {
            if v != u && !matches!(g.label(v), Some(Label::X | Label::Y)) && !f.precedes(u, v) {
                return fail(u, 1, v);
            }
        }
        for &v in &odd {
            if v != u && !matches!(g.label(v), Some(Label::Y | Label::Z)) && !f.precedes(u, v) {
                return fail(u, 2, v);
            }
        }
        for (&v, _) in g.labels().iter().filter(|(_, &l)| l == Label::Y) {
            if v == u && reading == YConditionReading::ExcludeSelf {
                continue;
            }
            if !f.precedes(u, v) && p.contains(&v) != odd.contains(&v) {
                return fail(u, 3, v);
            }
        }
        if !local_conditions_hold(label_u, p.contains(&u), odd.contains(&u)) {
            return fail(u, local_condition_number(label_u), u);
        }
    }
    Ok(())
}

/// Finds a Pauli flow if one exists.
///
/// Vertices are corrected in layers, starting from the outputs. In each round
/// every uncorrected vertex `u` solves a linear system for a correction set
/// drawn from already corrected vertices, `u` itself and X/Y-labelled
/// vertices, such that no uncorrected vertex is forced after `u`. The order
/// puts later-found layers first.
pub fn find_flow(g: &LabelledOpenGraph) -> Option<PauliFlow> {
    let mut solved: VertexSet = g.outputs().clone();
    let mut layer: BTreeMap<VertexId, usize> = solved.iter().map(|&v| (v, 0)).collect();
    let mut unsolved: VertexSet = g.measured().collect();
    let mut correction = BTreeMap::new();
    let mut depth = 0;
    while !unsolved.is_empty() {
        depth += 1;
        let found: Vec<_> = unsolved
            .iter()
            .filter_map(|&u| correction_for(g, u, &solved, &unsolved).map(|k| (u, k)))
            .collect();
        if found.is_empty() {
            return None;
        }
        for (u, k) in found {
            unsolved.remove(&u);
            solved.insert(u);
            layer.insert(u, depth);
            correction.insert(u, k);
        }
    }
    let relations = layer.iter().flat_map(|(&u, &lu)| {
        layer
            .iter()
            .filter(move |&(_, &lv)| lu > lv)
            .map(move |(&v, _)| (u, v))
    });
    let flow = PauliFlow::new(correction, relations).expect("layered order is acyclic");
    if let Err(e) = verify_flow(g, &flow) {
        panic!("flow finder produced an invalid flow: {e}");
    }
    Some(flow)
}

fn correction_for(
    g: &LabelledOpenGraph,
    u: VertexId,
    solved: &VertexSet,
    unsolved: &VertexSet,
) -> Option<VertexSet> {
    let label_u = g.label(u)?;
    let candidates: Vec<VertexId> = g
        .vertices()
        .filter(|&v| {
            !g.is_input(v)
                && (v == u
                    || solved.contains(&v)
                    || matches!(g.label(v), Some(Label::X | Label::Y)))
        })
        .collect();
    let n = candidates.len();
    let index_of = |v: VertexId| candidates.binary_search(&v).ok();
    // Row expressing membership of `v` in Odd(k) over the candidate indicator k.
    let odd_row = |v: VertexId| {
        let mut row = BitRow::zeros(n);
        for &w in g.neighbours(v) {
            if let Some(i) = index_of(w) {
                row.toggle(i);
            }
        }
        row
    };
    let member_row = |v: VertexId| {
        let mut row = BitRow::zeros(n);
        if let Some(i) = index_of(v) {
            row.set(i, true);
        }
        row
    };
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for &v in unsolved.iter().filter(|&&v| v != u) {
        match g.label(v) {
            Some(Label::Z) | None => {}
            Some(Label::Y) => {
                let mut row = odd_row(v);
                row.xor_assign(&member_row(v));
                rows.push(row);
                rhs.push(false);
            }
            Some(_) => {
                rows.push(odd_row(v));
                rhs.push(false);
            }
        }
    }
    let mut require = |row: BitRow, value: bool| {
        rows.push(row);
        rhs.push(value);
    };
    match label_u {
        Label::XY => {
            require(member_row(u), false);
            require(odd_row(u), true);
        }
        Label::XZ => {
            require(member_row(u), true);
            require(odd_row(u), true);
        }
        Label::YZ => {
            require(member_row(u), true);
            require(odd_row(u), false);
        }
        Label::X => require(odd_row(u), true),
        Label::Z => require(member_row(u), true),
        Label::Y => {
            let mut row = odd_row(u);
            row.xor_assign(&member_row(u));
            require(row, true);
        }
    }
    let m = BitMatrix::from_rows(n, rows).expect("rows sized to candidates");
    let x = solve(&m, &BitRow::from_bools(&rhs)).ok()?;
    Some(x.ones().map(|i| candidates[i]).collect())
}

/// Size limits for [`brute_force_flow_exists`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_measured: usize,
    pub max_non_inputs: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_measured: 5,
            max_non_inputs: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("graph too large for exhaustive flow search: {measured} measured, {non_inputs} non-input vertices")]
pub struct OracleLimitExceeded {
    pub measured: usize,
    pub non_inputs: usize,
}

pub fn brute_force_flow_exists(g: &LabelledOpenGraph) -> Result<bool, OracleLimitExceeded> {
    brute_force_flow_exists_with(g, OracleLimits::default(), YConditionReading::default())
}

/// Exhaustive existence check. For every measured vertex, every correction
/// set satisfying its self-condition is enumerated together with the order
/// relations conditions 1 to 3 then force; a flow exists iff some choice of
/// one set per vertex forces an acyclic relation.
pub fn brute_force_flow_exists_with(
    g: &LabelledOpenGraph,
    limits: OracleLimits,
    reading: YConditionReading,
) -> Result<bool, OracleLimitExceeded> {
    let measured: Vec<VertexId> = g.measured().collect();
    let non_inputs: Vec<VertexId> = g.vertices().filter(|v| !g.is_input(*v)).collect();
    if measured.len() > limits.max_measured || non_inputs.len() > limits.max_non_inputs {
        return Err(OracleLimitExceeded {
            measured: measured.len(),
            non_inputs: non_inputs.len(),
        });
    }
    let mut options: Vec<Vec<BTreeSet<(VertexId, VertexId)>>> = Vec::new();
    for &u in &measured {
        let label_u = g.label(u).unwrap();
        let mut forced_sets: BTreeSet<BTreeSet<(VertexId, VertexId)>> = BTreeSet::new();
        for mask in 0u32..1 << non_inputs.len() {
            let p: VertexSet = non_inputs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &v)| v)
                .collect();
            let odd = g.odd_neighbourhood(&p).unwrap();
            if !local_conditions_hold(label_u, p.contains(&u), odd.contains(&u)) {
                continue;
            }
            let mut forced = BTreeSet::new();
            let mut literal_conflict = false;
            for &v in &measured {
                let lv = g.label(v).unwrap();
                let by_p = p.contains(&v) && !matches!(lv, Label::X | Label::Y);
                let by_odd = odd.contains(&v) && !matches!(lv, Label::Y | Label::Z);
                let by_y = lv == Label::Y && p.contains(&v) != odd.contains(&v);
                if v == u {
                    literal_conflict |= by_y && reading == YConditionReading::Literal;
                } else if by_p || by_odd || by_y {
                    forced.insert((u, v));
                }
            }
            if !literal_conflict {
                forced_sets.insert(forced);
            }
        }
        let minimal: Vec<_> = forced_sets
            .iter()
            .filter(|s| !forced_sets.iter().any(|t| t != *s && t.is_subset(s)))
            .cloned()
            .collect();
        if minimal.is_empty() {
            return Ok(false);
        }
        options.push(minimal);
    }
    Ok(search_acyclic(&options, 0, &mut BTreeSet::new()))
}

fn search_acyclic(
    options: &[Vec<BTreeSet<(VertexId, VertexId)>>],
    i: usize,
    chosen: &mut BTreeSet<(VertexId, VertexId)>,
) -> bool {
    if transitive_closure(chosen).is_err() {
        return false;
    }
    let Some(choices) = options.get(i) else {
        return true;
    };
    for edges in choices {
        let added: Vec<_> = edges.difference(chosen).copied().collect();
        chosen.extend(added.iter().copied());
        let ok = search_acyclic(options, i + 1, chosen);
        for e in &added {
            chosen.remove(e);
        }
        if ok {
            return true;
        }
    }
    false
}

/// Extends a flow across a newly inserted Z-measured vertex `x` adjacent to
/// `neighbours`: `x` corrects itself and precedes its neighbours.
pub fn z_insert_flow_update(f: &PauliFlow, x: VertexId, neighbours: &VertexSet) -> PauliFlow {
    let mut correction = f.correction.clone();
    correction.insert(x, VertexSet::from([x]));
    let relations = f
        .relations
        .iter()
        .copied()
        .chain(neighbours.iter().map(|&w| (x, w)));
    PauliFlow::new(correction, relations).expect("fresh vertex has no predecessors")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(
        n: usize,
        edges: &[(usize, usize)],
        inputs: &[usize],
        outputs: &[usize],
        labels: &[(usize, Label)],
    ) -> LabelledOpenGraph {
        LabelledOpenGraph::from_parts(
            0..n,
            edges.iter().copied(),
            inputs.iter().copied(),
            outputs.iter().copied(),
            labels.iter().copied(),
        )
        .unwrap()
    }

    #[test]
    fn wire_without_measurements_has_trivial_flow() {
        let g = graph(1, &[], &[0], &[0], &[]);
        let f = find_flow(&g).unwrap();
        assert!(f.corrections().is_empty());
        assert!(f.relations().is_empty());
    }

    #[test]
    fn xy_input_corrected_by_output() {
        let g = graph(2, &[(0, 1)], &[0], &[1], &[(0, Label::XY)]);
        let f = find_flow(&g).unwrap();
        assert_eq!(f.correction(0), Some(&VertexSet::from([1])));
        assert!(f.precedes(0, 1));
        assert_eq!(brute_force_flow_exists(&g), Ok(true));
    }

    #[test]
    fn isolated_z_corrects_itself() {
        let g = graph(2, &[], &[], &[1], &[(0, Label::Z)]);
        let f = find_flow(&g).unwrap();
        assert_eq!(f.correction(0), Some(&VertexSet::from([0])));
    }

    #[test]
    fn empty_correction_fails_xy_condition() {
        let g = graph(2, &[(0, 1)], &[], &[1], &[(0, Label::XY)]);
        let f = PauliFlow::new(BTreeMap::from([(0, VertexSet::new())]), []).unwrap();
        assert_eq!(
            verify_flow(&g, &f),
            Err(VerifyError::Violation(Violation {
                vertex: 0,
                condition: 4,
                witness: 0
            }))
        );
    }

    #[test]
    fn malformed_flows_are_distinguished() {
        let g = graph(2, &[(0, 1)], &[0], &[1], &[(0, Label::XY)]);
        let none = PauliFlow::new(BTreeMap::new(), []).unwrap();
        assert_eq!(
            verify_flow(&g, &none),
            Err(VerifyError::Malformed(FlowError::MissingCorrection(0)))
        );
        let with_input =
            PauliFlow::new(BTreeMap::from([(0, VertexSet::from([0, 1]))]), [(0, 1)]).unwrap();
        assert!(matches!(
            verify_flow(&g, &with_input),
            Err(VerifyError::Malformed(
                FlowError::CorrectionContainsInput { .. }
            ))
        ));
        assert_eq!(
            PauliFlow::new(BTreeMap::new(), [(0, 1), (1, 0)]).unwrap_err(),
            FlowError::Cyclic(0)
        );
    }

    #[test]
    fn literal_reading_rejects_y_vertices() {
        let g = graph(2, &[(0, 1)], &[], &[1], &[(0, Label::Y)]);
        let f = find_flow(&g).unwrap();
        assert_eq!(verify_flow(&g, &f), Ok(()));
        assert!(matches!(
            verify_flow_with(&g, &f, YConditionReading::Literal),
            Err(VerifyError::Violation(Violation { condition: 3, .. }))
        ));
        let lit =
            brute_force_flow_exists_with(&g, OracleLimits::default(), YConditionReading::Literal);
        assert_eq!(lit, Ok(false));
        assert_eq!(brute_force_flow_exists(&g), Ok(true));
    }

    #[test]
    fn unmeasured_graphs_always_have_flow() {
        let g = graph(3, &[(0, 1), (1, 2)], &[], &[0, 1, 2], &[]);
        assert_eq!(brute_force_flow_exists(&g), Ok(true));
        let all_z = graph(
            3,
            &[(0, 1), (1, 2)],
            &[],
            &[],
            &[(0, Label::Z), (1, Label::Z), (2, Label::Z)],
        );
        assert_eq!(brute_force_flow_exists(&all_z), Ok(true));
        assert!(find_flow(&all_z).is_some());
    }

    #[test]
    fn xy_without_correctable_neighbour_has_no_flow() {
        let g = graph(2, &[], &[], &[1], &[(0, Label::XY)]);
        assert!(find_flow(&g).is_none());
        assert_eq!(brute_force_flow_exists(&g), Ok(false));
    }

    #[test]
    fn z_insert_update_orders_new_vertex_first() {
        let f = PauliFlow::new(BTreeMap::from([(0, VertexSet::from([1]))]), [(0, 1)]).unwrap();
        let g = z_insert_flow_update(&f, 5, &VertexSet::from([0]));
        assert_eq!(g.correction(5), Some(&VertexSet::from([5])));
        assert_eq!(g.successors(5), VertexSet::from([0, 1]));
        let empty = z_insert_flow_update(&f, 5, &VertexSet::new());
        assert!(empty.successors(5).is_empty());
        assert_eq!(empty.relations(), f.relations());
    }

    #[test]
    fn flow_json_shape() {
        let f = PauliFlow::new(BTreeMap::from([(0, VertexSet::from([1]))]), [(0, 1)]).unwrap();
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(
            json,
            r#"{"correction":[{"vertex":0,"set":[1]}],"order":[[0,1]]}"#
        );
        assert_eq!(serde_json::from_str::<PauliFlow>(&json).unwrap(), f);
    }
}
