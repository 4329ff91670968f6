//! Rewriting a stabilizer diagram to its unique canonical form.
//!
//! The pipeline bends inputs into outputs, deletes every interior vertex,
//! brings the remaining local Cliffords into reduced form, reads the result
//! as a phase-polynomial diagram and finally removes every connection from
//! a red spider to a later green one. Each stage records a trace of
//! rewrite steps, so two equivalent diagrams are connected by the first
//! trace followed by the inverse of the second.
//!
//! Qubits are identified with wire positions: inputs (bent) and outputs in
//! the diagram's wire order.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::clifford::{Basis, Effect, Gate, LocalClifford, Sign};
use crate::diagram::{Diagram, Wire};
use crate::exact::ExactState;
use crate::flow::find_flow;
use crate::graph::VertexId;
use crate::phasepoly::{
    diagram_from_pair, rank_of, support_space, PhasePolyDiagram, Spider, StabilizerError,
};
use crate::rewrite::{
    bend_input, lc_rewrite, pivot_rewrite, relabel, z_delete, RewriteError, RewriteStep,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CanonError {
    #[error("the diagram has no Pauli flow")]
    NoFlow,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("the diagrams are not equivalent")]
    NotEquivalent,
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Stabilizer(#[from] StabilizerError),
}

/// A diagram being rewritten together with the steps applied so far.
#[derive(Debug, Clone)]
struct Tracked {
    d: Diagram,
    trace: Vec<RewriteStep>,
}

impl Tracked {
    fn new(d: &Diagram) -> Self {
        Tracked {
            d: d.clone(),
            trace: Vec::new(),
        }
    }

    fn lc(&mut self, u: VertexId, m: usize) -> Result<(), RewriteError> {
        for _ in 0..m {
            self.d = lc_rewrite(&self.d, u)?;
            self.trace.push(RewriteStep::Lc { vertex: u });
        }
        Ok(())
    }

    fn pivot(&mut self, u: VertexId, v: VertexId) -> Result<(), RewriteError> {
        self.d = pivot_rewrite(&self.d, u, v)?;
        self.trace.push(RewriteStep::Pivot { u, v });
        Ok(())
    }

    fn z_delete(&mut self, u: VertexId) -> Result<(), RewriteError> {
        let (d, step) = z_delete(&self.d, u)?;
        self.d = d;
        self.trace.push(step);
        Ok(())
    }

    fn output_clifford(&self, v: VertexId) -> LocalClifford {
        self.d
            .output_clifford(v)
            .expect("every vertex is an output")
    }
}

fn require_flow(d: &Diagram) -> Result<(), CanonError> {
    find_flow(d.graph()).map(|_| ()).ok_or(CanonError::NoFlow)
}

/// Bends every input into a new output and deletes every measured vertex.
/// The result has only output vertices, in the same wire order.
pub fn eliminate_interior(d: &Diagram) -> Result<(Diagram, Vec<RewriteStep>), CanonError> {
    require_flow(d)?;
    let mut t = Tracked::new(d);
    let inputs: Vec<VertexId> = d
        .wires()
        .iter()
        .filter_map(|w| match *w {
            Wire::Input(v) => Some(v),
            Wire::Output(_) => None,
        })
        .collect();
    for u in inputs {
        let (next, step) = bend_input(&t.d, u)?;
        t.d = next;
        t.trace.push(step);
    }
    loop {
        let Some(u) = t.d.interior().next() else {
            break;
        };
        let effect = t.d.effect(u).expect("interior vertices are measured");
        match effect.basis {
            Basis::Z => {}
            Basis::Y => {
                // One of LC and LC^3 turns Y into Z+; pick it so the deletion
                // leaves the neighbours alone.
                let m = [1, 3]
                    .into_iter()
                    .find(|&m| {
                        effect.after(LocalClifford::x(3 * m as i64))
                            == Effect::new(Basis::Z, Sign::Plus)
                    })
                    .expect("an X-axis quarter-turn maps Y to Z+");
                t.lc(u, m)?;
            }
            Basis::X => {
                let neighbours = t.d.neighbours(u).clone();
                let v = neighbours
                    .iter()
                    .copied()
                    .find(|&w| t.d.graph().is_output(w))
                    .or_else(|| neighbours.iter().next().copied())
                    .ok_or_else(|| {
                        CanonError::Precondition(format!("X-measured vertex {u} is isolated"))
                    })?;
                t.pivot(u, v)?;
            }
        }
        t.z_delete(u)?;
    }
    Ok((t.d, t.trace))
}

fn is_diagonal(c: LocalClifford) -> bool {
    c.z_quarter_turns().is_some()
}

/// LC^m about a vertex precomposes its Clifford with `X(3m)`.
fn after_own_lc(c: LocalClifford, m: usize) -> LocalClifford {
    LocalClifford::x(3 * m as i64).then(c)
}

fn reduced_cliffords() -> [LocalClifford; 2] {
    [
        LocalClifford::from_word(&[Gate::z(1), Gate::x(1)]),
        LocalClifford::from_word(&[Gate::z(3), Gate::x(1)]),
    ]
}

fn is_reduced(c: LocalClifford) -> bool {
    is_diagonal(c) || reduced_cliffords().contains(&c)
}

fn check_all_outputs(d: &Diagram) -> Result<(), CanonError> {
    if !d.graph().inputs().is_empty() || !d.effects().is_empty() {
        return Err(CanonError::Precondition(
            "expected a diagram of output vertices only".into(),
        ));
    }
    Ok(())
}

/// Local complementations that leave every output Clifford either a Z
/// rotation or one of the two reduced non-diagonal forms, with no two
/// non-diagonal vertices adjacent.
///
/// A vertex is tracked by where its Clifford sends Z and X. LC about the
/// vertex rotates the image of Z about the image of X; LC about a neighbour
/// fixes the image of Z. So the number of non-diagonal vertices never grows
/// and drops whenever some vertex can be made diagonal by its own LC.
pub fn to_rgslc(d: &Diagram) -> Result<(Diagram, Vec<RewriteStep>), CanonError> {
    check_all_outputs(d)?;
    let mut t = Tracked::new(d);
    let vertices: Vec<VertexId> = d.graph().vertices().collect();
    loop {
        let fixable = vertices.iter().find_map(|&v| {
            let c = t.output_clifford(v);
            if is_diagonal(c) {
                return None;
            }
            (1..4)
                .find(|&m| is_diagonal(after_own_lc(c, m)))
                .map(|m| (v, m))
        });
        if let Some((v, m)) = fixable {
            t.lc(v, m)?;
            continue;
        }
        // Remaining non-diagonal vertices send X to ±Z. An LC about one of
        // two adjacent ones makes the other fixable.
        let clash = t.d.graph().edges().find(|&(a, b)| {
            !is_diagonal(t.output_clifford(a)) && !is_diagonal(t.output_clifford(b))
        });
        if let Some((a, _)) = clash {
            t.lc(a, 1)?;
            continue;
        }
        break;
    }
    for &v in &vertices {
        let c = t.output_clifford(v);
        if !is_reduced(c) {
            let m = (1..4)
                .find(|&m| reduced_cliffords().contains(&after_own_lc(c, m)))
                .expect("a rotation about ±Z reaches the reduced form");
            t.lc(v, m)?;
        }
    }
    Ok((t.d, t.trace))
}

fn is_red_form(c: LocalClifford) -> bool {
    matches!(Spider::from_clifford(c), Some(Spider::Red { .. }))
}

/// LC about each non-diagonal vertex to turn it into a red spider, then a
/// colour change. Returns the rewritten diagram and its phase-polynomial
/// reading.
pub fn rgslc_to_phasepoly(
    d: &Diagram,
) -> Result<(PhasePolyDiagram, Diagram, Vec<RewriteStep>), CanonError> {
    check_all_outputs(d)?;
    for v in d.graph().vertices() {
        let c = d.output_clifford(v).unwrap();
        if !is_reduced(c) {
            return Err(CanonError::Precondition(format!(
                "vertex {v} has Clifford {c:?}"
            )));
        }
    }
    if let Some((a, b)) = d.graph().edges().find(|&(a, b)| {
        !is_diagonal(d.output_clifford(a).unwrap()) && !is_diagonal(d.output_clifford(b).unwrap())
    }) {
        return Err(CanonError::Precondition(format!(
            "non-diagonal vertices {a} and {b} are adjacent"
        )));
    }
    let mut t = Tracked::new(d);
    let vertices: Vec<VertexId> = d.graph().vertices().collect();
    for v in vertices {
        let c = t.output_clifford(v);
        if !is_diagonal(c) {
            let m = [1, 3]
                .into_iter()
                .find(|&m| is_red_form(after_own_lc(c, m)))
                .expect("LC or LC^3 maps a reduced Clifford to a red spider");
            t.lc(v, m)?;
        }
    }
    t.trace.push(RewriteStep::ColourChange);
    let p = PhasePolyDiagram::from_diagram(&t.d)?;
    Ok((p, t.d, t.trace))
}

/// Vertices whose Clifford is one `X(π)` away from a spider decoration get
/// LC², which leaves the graph alone and applies `X(π)` to the vertex and
/// `Z(π)` to its neighbours.
fn fix_half_turns(t: &mut Tracked) -> Result<(), RewriteError> {
    loop {
        let broken = t.d.graph().vertices().find(|&v| {
            let c = t.output_clifford(v);
            Spider::from_clifford(c).is_none()
                && Spider::from_clifford(after_own_lc(c, 2)).is_some()
        });
        match broken {
            Some(v) => t.lc(v, 2)?,
            None => return Ok(()),
        }
    }
}

/// Result of reducing a phase-polynomial diagram to canonical form.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub diagram: PhasePolyDiagram,
    pub mbqc: Diagram,
    pub trace: Vec<RewriteStep>,
    /// Red-to-later-green connections before each iteration and at the end.
    pub offending_counts: Vec<usize>,
}

/// Repeatedly takes the first red spider `d` with a connection to a later
/// green spider and the last such green `f`. An odd-phase `f` is handled by
/// LC about `f` and then `d`, any other by a pivot on `(f, d)`. Either way
/// `f` turns red and `d` green, and the number of red-to-later-green
/// connections strictly drops.
///
/// `d` must be in phase-polynomial form with its qubits in wire order;
/// `order` lists wire positions from first to last.
pub fn reduce_phasepoly(d: &Diagram, order: &[usize]) -> Result<Reduction, CanonError> {
    check_all_outputs(d)?;
    let mut t = Tracked::new(d);
    let mut pp = PhasePolyDiagram::from_diagram(&t.d)?;
    let n = pp.len();
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..n).collect::<Vec<_>>() {
        return Err(CanonError::Precondition(
            "order is not a permutation of the qubits".into(),
        ));
    }
    let rank = rank_of(order);
    let vertex_at: Vec<VertexId> = t.d.wires().iter().map(|w| w.vertex()).collect();
    let mut counts = vec![pp.offending_connections(order)];
    while *counts.last().unwrap() > 0 {
        let spiders = pp.spiders();
        let later_green = |r: usize| {
            pp.neighbours(r)
                .filter(|&g| !spiders[g].is_red() && rank[g] > rank[r])
                .max_by_key(|&g| rank[g])
        };
        let (dk, fh) = order
            .iter()
            .filter(|&&r| spiders[r].is_red())
            .find_map(|&r| later_green(r).map(|g| (r, g)))
            .expect("a positive count has an offending pair");
        let (dv, fv) = (vertex_at[dk], vertex_at[fh]);
        let odd = matches!(spiders[fh], Spider::Green { quarter_turns } if quarter_turns % 2 == 1);
        let attempts: Vec<Vec<(VertexId, usize)>> = if odd {
            [1, 3]
                .into_iter()
                .flat_map(|m1| [1, 3].into_iter().map(move |m2| vec![(fv, m1), (dv, m2)]))
                .collect()
        } else {
            vec![Vec::new()]
        };
        let mut next = None;
        for lcs in attempts {
            let mut trial = t.clone();
            if odd {
                for &(v, m) in &lcs {
                    trial.lc(v, m)?;
                }
            } else {
                trial.pivot(fv, dv)?;
            }
            fix_half_turns(&mut trial)?;
            if let Ok(q) = PhasePolyDiagram::from_diagram(&trial.d) {
                if q.spiders()[fh].is_red() && !q.spiders()[dk].is_red() {
                    next = Some((trial, q));
                    break;
                }
            }
        }
        let (trial, q) = next.expect("the reduction step keeps phase-polynomial form");
        let count = q.offending_connections(order);
        assert!(
            count < *counts.last().unwrap(),
            "red-to-later-green connections did not decrease"
        );
        counts.push(count);
        t = trial;
        pp = q;
    }
    Ok(Reduction {
        diagram: pp,
        mbqc: t.d,
        trace: t.trace,
        offending_counts: counts,
    })
}

/// Canonical form of a phase-polynomial diagram whose qubit `k` is the
/// output vertex `k`.
pub fn phasepoly_to_canonical(
    p: &PhasePolyDiagram,
) -> Result<(CanonicalDiagram, Vec<RewriteStep>), CanonError> {
    let order: Vec<usize> = (0..p.len()).collect();
    let r = reduce_phasepoly(&p.to_diagram(), &order)?;
    Ok((CanonicalDiagram::new(r.diagram)?, r.trace))
}

/// A phase-polynomial diagram in which every red spider is connected only
/// to earlier qubits. There is exactly one per stabilizer state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalDiagram(PhasePolyDiagram);

impl CanonicalDiagram {
    pub fn new(p: PhasePolyDiagram) -> Result<Self, StabilizerError> {
        for (j, s) in p.spiders().iter().enumerate() {
            if s.is_red() && p.neighbours(j).any(|k| k > j) {
                return Err(StabilizerError::Malformed(format!(
                    "red spider {j} is connected to a later qubit"
                )));
            }
        }
        Ok(CanonicalDiagram(p))
    }

    /// Builds the canonical diagram directly from the state, using the
    /// canonical free variables of its support.
    pub fn from_state(s: &ExactState) -> Result<Self, StabilizerError> {
        let a = support_space(s)?;
        let p = diagram_from_pair(s, &a.canonical_free_vars())?;
        CanonicalDiagram::new(p)
    }

    pub fn phase_poly(&self) -> &PhasePolyDiagram {
        &self.0
    }

    pub fn into_inner(self) -> PhasePolyDiagram {
        self.0
    }
}

/// Output of [`canonicalize`].
#[derive(Debug, Clone)]
pub struct Canonicalization {
    pub canonical: CanonicalDiagram,
    /// The canonical form as a diagram, reached from the input by `trace`.
    pub diagram: Diagram,
    pub trace: Vec<RewriteStep>,
}

pub fn canonicalize(d: &Diagram) -> Result<Canonicalization, CanonError> {
    let n = d.wires().len();
    canonicalize_with_order(d, &(0..n).collect::<Vec<_>>()).map(|(c, diagram, trace)| {
        Canonicalization {
            canonical: CanonicalDiagram::new(c).expect("reduced in wire order"),
            diagram,
            trace,
        }
    })
}

/// Runs the whole pipeline with qubits ranked by `order` (wire positions,
/// first to last). The result is canonical with respect to that order.
pub fn canonicalize_with_order(
    d: &Diagram,
    order: &[usize],
) -> Result<(PhasePolyDiagram, Diagram, Vec<RewriteStep>), CanonError> {
    let (d1, mut trace) = eliminate_interior(d)?;
    let (d2, t2) = to_rgslc(&d1)?;
    let (_, d3, t3) = rgslc_to_phasepoly(&d2)?;
    let r = reduce_phasepoly(&d3, order)?;
    trace.extend(t2);
    trace.extend(t3);
    trace.extend(r.trace);
    Ok((r.diagram, r.mbqc, trace))
}

/// A trace rewriting `a` into `b`, if they denote the same map up to a
/// scalar. The trace canonicalizes `a`, renames its canonical vertices to
/// those of `b`'s canonical form, and undoes `b`'s canonicalization.
pub fn decide_equiv(a: &Diagram, b: &Diagram) -> Result<Vec<RewriteStep>, CanonError> {
    let ca = canonicalize(a)?;
    let cb = canonicalize(b)?;
    if ca.canonical != cb.canonical {
        return Err(CanonError::NotEquivalent);
    }
    let map: BTreeMap<VertexId, VertexId> = ca
        .diagram
        .wires()
        .iter()
        .zip(cb.diagram.wires())
        .map(|(x, y)| (x.vertex(), y.vertex()))
        .collect();
    let map: Vec<(VertexId, VertexId)> = map.into_iter().collect();
    debug_assert_eq!(relabel(&ca.diagram, &map).ok().as_ref(), Some(&cb.diagram));
    let mut trace = ca.trace;
    trace.push(RewriteStep::Relabel { map });
    trace.extend(crate::rewrite::invert_trace(&cb.trace));
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluate::evaluate;
    use crate::rewrite::replay;

    fn assert_equiv(a: &Diagram, b: &Diagram) {
        assert!(evaluate(a)
            .unwrap()
            .proportional(&evaluate(b).unwrap())
            .unwrap());
    }

    #[test]
    fn reduced_forms_become_red_after_one_lc() {
        for c in reduced_cliffords() {
            assert!([1, 3].iter().any(|&m| is_red_form(after_own_lc(c, m))));
        }
    }

    #[test]
    fn interior_free_diagram_is_untouched() {
        let mut d = Diagram::new();
        d.add_output(0, LocalClifford::IDENTITY).unwrap();
        d.add_output(1, LocalClifford::z(1)).unwrap();
        d.add_edge(0, 1).unwrap();
        let (e, trace) = eliminate_interior(&d).unwrap();
        assert_eq!(e, d);
        assert!(trace.is_empty());
    }

    #[test]
    fn clashing_non_diagonal_pair_is_resolved() {
        let mut d = Diagram::new();
        let r = reduced_cliffords()[0];
        d.add_output(0, r).unwrap();
        d.add_output(1, r).unwrap();
        d.add_edge(0, 1).unwrap();
        let (e, trace) = to_rgslc(&d).unwrap();
        assert!(!trace.is_empty());
        assert_equiv(&d, &e);
        let (_, f, _) = rgslc_to_phasepoly(&e).unwrap();
        assert_equiv(&d, &f);
    }

    #[test]
    fn identity_cliffords_stay() {
        let mut d = Diagram::new();
        for v in 0..3 {
            d.add_output(v, LocalClifford::IDENTITY).unwrap();
        }
        d.add_edge(0, 1).unwrap();
        d.add_edge(1, 2).unwrap();
        let (e, trace) = to_rgslc(&d).unwrap();
        assert_eq!(e, d);
        assert!(trace.is_empty());
    }

    #[test]
    fn pipeline_on_measured_path() {
        let mut d = Diagram::new();
        d.add_measured(0, Effect::new(Basis::X, Sign::Plus))
            .unwrap();
        d.add_measured(1, Effect::new(Basis::Y, Sign::Minus))
            .unwrap();
        d.add_output(2, LocalClifford::IDENTITY).unwrap();
        d.add_output(3, LocalClifford::z(1)).unwrap();
        d.add_edge(0, 1).unwrap();
        d.add_edge(1, 2).unwrap();
        d.add_edge(1, 3).unwrap();
        d.add_edge(0, 3).unwrap();
        d.make_input(0, LocalClifford::IDENTITY).unwrap();
        let c = canonicalize(&d).unwrap();
        assert_eq!(replay(&d, &c.trace).unwrap(), c.diagram);
        assert_equiv(&d, &c.diagram);
        let direct = CanonicalDiagram::from_state(&evaluate(&d).unwrap()).unwrap();
        assert_eq!(direct, c.canonical);
    }
}
