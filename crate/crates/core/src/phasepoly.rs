//! Stabilizer states as (affine support, mod-4 phase polynomial) pairs and
//! the phase-polynomial diagrams that draw them.
//!
//! Variables are 0-based here; variable `j` is qubit `j`, the most
//! significant bit of a state index. Display forms are 1-based (`x1`, ...).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clifford::LocalClifford;
use crate::diagram::{Diagram, Wire};
use crate::exact::{ExactState, GaussInt};
use crate::gf2::{AffineSpace, BitMatrix, BitRow, DependencyTable, Gf2Error};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StabilizerError {
    #[error("the zero vector is not a state")]
    ZeroState,
    #[error("support is not an affine subspace")]
    NotAffine,
    #[error("not a stabilizer state: {0}")]
    NotStabilizer(String),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
    #[error("malformed phase-polynomial diagram: {0}")]
    Malformed(String),
}

/// `p(x) = Σ r_j x_j + 2 Σ s_jk x_j x_k (mod 4)` over the free variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhasePolynomial {
    free: Vec<usize>,
    linear: BTreeMap<usize, u8>,
    quadratic: BTreeSet<(usize, usize)>,
}

impl PhasePolynomial {
    /// `linear` gives `r_j` (reduced mod 4), `quadratic` the pairs with
    /// `s_jk = 1`. Every index must be free.
    pub fn new(
        free: &[usize],
        linear: impl IntoIterator<Item = (usize, u8)>,
        quadratic: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, StabilizerError> {
        let mut free = free.to_vec();
        free.sort_unstable();
        free.dedup();
        let is_free = |j: &usize| free.binary_search(j).is_ok();
        let mut lin = BTreeMap::new();
        for (j, r) in linear {
            if !is_free(&j) {
                return Err(StabilizerError::Malformed(format!(
                    "x{} is not free",
                    j + 1
                )));
            }
            if r % 4 != 0 {
                lin.insert(j, r % 4);
            }
        }
        let mut quad = BTreeSet::new();
        for (j, k) in quadratic {
            if !is_free(&j) || !is_free(&k) || j == k {
                return Err(StabilizerError::Malformed(format!(
                    "bad quadratic term x{}x{}",
                    j + 1,
                    k + 1
                )));
            }
            quad.insert((j.min(k), j.max(k)));
        }
        Ok(PhasePolynomial {
            free,
            linear: lin,
            quadratic: quad,
        })
    }

    pub fn zero(free: &[usize]) -> Self {
        PhasePolynomial::new(free, [], []).unwrap()
    }

    pub fn free(&self) -> &[usize] {
        &self.free
    }

    pub fn r(&self, j: usize) -> u8 {
        self.linear.get(&j).copied().unwrap_or(0)
    }

    pub fn s(&self, j: usize, k: usize) -> bool {
        self.quadratic.contains(&(j.min(k), j.max(k)))
    }

    pub fn quadratic_terms(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.quadratic.iter().copied()
    }

    pub fn evaluate(&self, x: &BitRow) -> u8 {
        let lin: u32 = self
            .linear
            .iter()
            .filter(|(&j, _)| x.get(j))
            .map(|(_, &r)| r as u32)
            .sum();
        let quad = self
            .quadratic
            .iter()
            .filter(|&&(j, k)| x.get(j) && x.get(k))
            .count() as u32;
        ((lin + 2 * quad) % 4) as u8
    }

    /// The mod-2 form `i^{l(x)} (-1)^{q(x)}` of the same phase.
    pub fn to_linear_quadratic(&self) -> LinearQuadratic {
        let d: BTreeMap<usize, bool> = self.free.iter().map(|&j| (j, self.r(j) % 2 == 1)).collect();
        let c = self.free.iter().map(|&j| (j, self.r(j) / 2 == 1)).collect();
        let mut pairs = BTreeSet::new();
        for (a, &j) in self.free.iter().enumerate() {
            for &k in &self.free[a + 1..] {
                if self.s(j, k) ^ (d[&j] && d[&k]) {
                    pairs.insert((j, k));
                }
            }
        }
        LinearQuadratic {
            free: self.free.clone(),
            d,
            c,
            c_pairs: pairs,
        }
    }

    pub fn from_linear_quadratic(lq: &LinearQuadratic) -> Self {
        let linear = lq
            .free
            .iter()
            .map(|&j| (j, lq.d[&j] as u8 + 2 * lq.c[&j] as u8));
        let mut quad = Vec::new();
        for (a, &j) in lq.free.iter().enumerate() {
            for &k in &lq.free[a + 1..] {
                if lq.c_pairs.contains(&(j, k)) ^ (lq.d[&j] && lq.d[&k]) {
                    quad.push((j, k));
                }
            }
        }
        PhasePolynomial::new(&lq.free, linear, quad).unwrap()
    }
}

impl fmt::Display for PhasePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<String> = self
            .linear
            .iter()
            .map(|(&j, &r)| match r {
                1 => format!("x{}", j + 1),
                _ => format!("{r}x{}", j + 1),
            })
            .collect();
        terms.extend(
            self.quadratic
                .iter()
                .map(|(j, k)| format!("2x{}x{}", j + 1, k + 1)),
        );
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join(" + "))
        }
    }
}

/// Mod-2 coefficients `d_j`, `c_j`, `c_jk` with
/// `l(x) = ⊕ d_j x_j` and `q(x) = ⊕ c_jk x_j x_k ⊕ ⊕ c_j x_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearQuadratic {
    pub free: Vec<usize>,
    pub d: BTreeMap<usize, bool>,
    pub c: BTreeMap<usize, bool>,
    pub c_pairs: BTreeSet<(usize, usize)>,
}

impl LinearQuadratic {
    /// The exponent of `i` in `i^{l(x)} (-1)^{q(x)}`, mod 4.
    pub fn evaluate(&self, x: &BitRow) -> u8 {
        let l = self
            .free
            .iter()
            .filter(|&&j| self.d[&j] && x.get(j))
            .count()
            % 2;
        let q1 = self
            .free
            .iter()
            .filter(|&&j| self.c[&j] && x.get(j))
            .count();
        let q2 = self
            .c_pairs
            .iter()
            .filter(|&&(j, k)| x.get(j) && x.get(k))
            .count();
        ((l + 2 * ((q1 + q2) % 2)) % 4) as u8
    }
}

pub(crate) fn bits_to_index(x: &BitRow) -> usize {
    let n = x.len();
    x.ones().fold(0, |acc, i| acc | 1 << (n - 1 - i))
}

pub(crate) fn index_to_bits(k: usize, n: usize) -> BitRow {
    let bits: Vec<bool> = (0..n).map(|i| (k >> (n - 1 - i)) & 1 == 1).collect();
    BitRow::from_bools(&bits)
}

fn free_assignments(table: &DependencyTable) -> impl Iterator<Item = BitRow> + '_ {
    let f = table.free().len();
    (0..1usize << f).map(move |m| {
        let values: Vec<bool> = (0..f).map(|i| (m >> (f - 1 - i)) & 1 == 1).collect();
        table.point(&values)
    })
}

/// `Σ_{x ∈ A} i^{p(x)} |x⟩`.
pub fn state_from_pair(
    a: &AffineSpace,
    p: &PhasePolynomial,
) -> Result<ExactState, StabilizerError> {
    let table = a.dependency_table(p.free())?;
    let mut s = ExactState::zero(a.num_vars());
    let mut amps = s.amplitudes().to_vec();
    for x in free_assignments(&table) {
        amps[bits_to_index(&x)] = GaussInt::i_pow(p.evaluate(&x) as i64);
    }
    s = ExactState::new(amps, 0).expect("power of two");
    Ok(s)
}

/// The support of `s` as an affine space.
pub fn support_space(s: &ExactState) -> Result<AffineSpace, StabilizerError> {
    let n = s.qubits();
    let support: Vec<BitRow> = s.support().map(|k| index_to_bits(k, n)).collect();
    if support.is_empty() {
        return Err(StabilizerError::ZeroState);
    }
    let a = AffineSpace::affine_hull(&support).ok_or(StabilizerError::NotAffine)?;
    if 1usize.checked_shl(a.dim() as u32) != Some(support.len()) {
        return Err(StabilizerError::NotAffine);
    }
    Ok(a)
}

/// Recovers the support and the unique phase polynomial over `free`; the
/// constant term is dropped by normalizing at the all-free-zero point.
pub fn pair_from_state(
    s: &ExactState,
    free: &[usize],
) -> Result<(AffineSpace, PhasePolynomial), StabilizerError> {
    let a = support_space(s)?;
    let table = a.dependency_table(free)?;
    let base = s.amplitude(bits_to_index(&table.point(&vec![false; free.len()])));
    let turns = |x: &BitRow| -> Result<u8, StabilizerError> {
        s.amplitude(bits_to_index(x))
            .quarter_turns_from(base)
            .ok_or_else(|| {
                StabilizerError::NotStabilizer("amplitude ratio is not a power of i".into())
            })
    };
    let unit = |idx: &[usize]| {
        let values: Vec<bool> = (0..free.len()).map(|i| idx.contains(&i)).collect();
        table.point(&values)
    };
    let free_sorted = table.free().to_vec();
    let mut linear = Vec::new();
    for (i, &j) in free_sorted.iter().enumerate() {
        linear.push((j, turns(&unit(&[i]))?));
    }
    let mut quadratic = Vec::new();
    for i in 0..free_sorted.len() {
        for k in i + 1..free_sorted.len() {
            let both = turns(&unit(&[i, k]))? as i32;
            let rest = (both - linear[i].1 as i32 - linear[k].1 as i32).rem_euclid(4);
            match rest {
                0 => {}
                2 => quadratic.push((free_sorted[i], free_sorted[k])),
                _ => {
                    return Err(StabilizerError::NotStabilizer(
                        "pairwise phase is not a multiple of two".into(),
                    ))
                }
            }
        }
    }
    let p = PhasePolynomial::new(&free_sorted, linear, quadratic)?;
    for x in free_assignments(&table) {
        if turns(&x)? != p.evaluate(&x) {
            return Err(StabilizerError::NotStabilizer(
                "phases are not a quadratic polynomial".into(),
            ));
        }
    }
    Ok((a, p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Spider {
    /// Phase `quarter_turns · π/2`.
    Green { quarter_turns: u8 },
    /// Phase `half_turns · π`.
    Red { half_turns: u8 },
}

impl Spider {
    pub fn is_red(self) -> bool {
        matches!(self, Spider::Red { .. })
    }

    /// Output-leg Clifford of the vertex that draws this spider in a
    /// diagram of green spiders and Hadamard edges.
    pub fn clifford(self) -> LocalClifford {
        match self {
            Spider::Green { quarter_turns } => LocalClifford::z(quarter_turns as i64),
            Spider::Red { half_turns } => {
                LocalClifford::z(2 * half_turns as i64).then(LocalClifford::hadamard())
            }
        }
    }

    pub fn from_clifford(c: LocalClifford) -> Option<Spider> {
        (0..4u8)
            .map(|k| Spider::Green { quarter_turns: k })
            .chain((0..2u8).map(|k| Spider::Red { half_turns: k }))
            .find(|s| s.clifford() == c)
    }
}

/// Green and red spiders, one output each, indexed by qubit. Green–green
/// edges are Hadamard edges, green–red edges are plain, red–red edges are
/// not allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhasePolyDiagram {
    spiders: Vec<Spider>,
    edges: BTreeSet<(usize, usize)>,
}

impl PhasePolyDiagram {
    pub fn new(
        spiders: Vec<Spider>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, StabilizerError> {
        let n = spiders.len();
        for s in &spiders {
            match *s {
                Spider::Green { quarter_turns } if quarter_turns >= 4 => {
                    return Err(StabilizerError::Malformed(
                        "green phase out of range".into(),
                    ))
                }
                Spider::Red { half_turns } if half_turns >= 2 => {
                    return Err(StabilizerError::Malformed(
                        "red phase must be 0 or π".into(),
                    ))
                }
                _ => {}
            }
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(StabilizerError::Malformed(format!("bad edge ({a}, {b})")));
            }
            if spiders[a].is_red() && spiders[b].is_red() {
                return Err(StabilizerError::Malformed(format!(
                    "red spiders {a} and {b} are connected"
                )));
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(PhasePolyDiagram {
            spiders,
            edges: set,
        })
    }

    pub fn spiders(&self) -> &[Spider] {
        &self.spiders
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.spiders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spiders.is_empty()
    }

    pub fn connected(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn neighbours(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&k| k != j && self.connected(j, k))
    }

    /// Red spiders `d` and green spiders `f` connected with `f` after `d` in
    /// `order` (a list of qubits, first to last).
    pub fn offending_connections(&self, order: &[usize]) -> usize {
        let rank = rank_of(order);
        self.edges
            .iter()
            .filter(|&&(a, b)| {
                let (red, green) = match (self.spiders[a].is_red(), self.spiders[b].is_red()) {
                    (true, false) => (a, b),
                    (false, true) => (b, a),
                    _ => return false,
                };
                rank[red] < rank[green]
            })
            .count()
    }

    /// Builds the diagram of `(A, p)` with free variables `p.free()`.
    pub fn from_pair(a: &AffineSpace, p: &PhasePolynomial) -> Result<Self, StabilizerError> {
        let table = a.dependency_table(p.free())?;
        let n = a.num_vars();
        let mut spiders = vec![Spider::Green { quarter_turns: 0 }; n];
        let mut edges = Vec::new();
        for &j in p.free() {
            spiders[j] = Spider::Green {
                quarter_turns: p.r(j),
            };
        }
        for row in table.rows() {
            spiders[row.var] = Spider::Red {
                half_turns: row.constant as u8,
            };
            for (i, &f) in table.free().iter().enumerate() {
                if row.coeffs.get(i) {
                    edges.push((row.var, f));
                }
            }
        }
        edges.extend(p.quadratic_terms());
        PhasePolyDiagram::new(spiders, edges)
    }

    /// The support, the free variables (green spiders) and the polynomial.
    pub fn to_pair(&self) -> (AffineSpace, PhasePolynomial) {
        let n = self.len();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        let mut free = Vec::new();
        let mut linear = Vec::new();
        for (j, s) in self.spiders.iter().enumerate() {
            match *s {
                Spider::Green { quarter_turns } => {
                    free.push(j);
                    linear.push((j, quarter_turns));
                }
                Spider::Red { half_turns } => {
                    let mut row = BitRow::zeros(n);
                    row.set(j, true);
                    for k in self.neighbours(j) {
                        row.set(k, true);
                    }
                    rows.push(row);
                    rhs.push(half_turns == 1);
                }
            }
        }
        let quadratic = self
            .edges
            .iter()
            .copied()
            .filter(|&(a, b)| !self.spiders[a].is_red() && !self.spiders[b].is_red());
        let r = BitMatrix::from_rows(n, rows).expect("rows sized to qubits");
        let a = AffineSpace::new(r, BitRow::from_bools(&rhs))
            .expect("each red spider fixes its own variable");
        let p = PhasePolynomial::new(&free, linear, quadratic).expect("indices are free");
        (a, p)
    }

    /// The diagram as an MBQC+LC diagram with outputs `0..n` and no
    /// measurements: red spiders become green ones behind a Hadamard.
    pub fn to_diagram(&self) -> Diagram {
        let mut d = Diagram::new();
        for (j, s) in self.spiders.iter().enumerate() {
            d.add_output(j, s.clifford()).unwrap();
        }
        for &(a, b) in &self.edges {
            d.add_edge(a, b).unwrap();
        }
        d
    }

    /// Reads an unmeasured, input-free diagram whose output Cliffords are
    /// all spider decorations. Qubit `k` is the `k`-th wire.
    pub fn from_diagram(d: &Diagram) -> Result<Self, StabilizerError> {
        if !d.graph().inputs().is_empty() || !d.effects().is_empty() {
            return Err(StabilizerError::Malformed(
                "diagram has inputs or measurements".into(),
            ));
        }
        let wires = d.wires();
        let position: BTreeMap<usize, usize> = wires
            .iter()
            .enumerate()
            .map(|(k, w)| (w.vertex(), k))
            .collect();
        let mut spiders = Vec::new();
        for w in &wires {
            let Wire::Output(v) = *w else { unreachable!() };
            let c = d.output_clifford(v).unwrap();
            spiders.push(Spider::from_clifford(c).ok_or_else(|| {
                StabilizerError::Malformed(format!("vertex {v} has Clifford {c:?}"))
            })?);
        }
        let edges = d.graph().edges().map(|(a, b)| (position[&a], position[&b]));
        PhasePolyDiagram::new(spiders, edges)
    }

    pub fn evaluate(&self) -> ExactState {
        let (a, p) = self.to_pair();
        state_from_pair(&a, &p).expect("free set read from the diagram")
    }
}

pub(crate) fn rank_of(order: &[usize]) -> Vec<usize> {
    let mut rank = vec![0; order.len()];
    for (r, &q) in order.iter().enumerate() {
        rank[q] = r;
    }
    rank
}

/// The phase-polynomial diagram of `s` with free variables `free`.
pub fn diagram_from_pair(
    s: &ExactState,
    free: &[usize],
) -> Result<PhasePolyDiagram, StabilizerError> {
    let (a, p) = pair_from_state(s, free)?;
    PhasePolyDiagram::from_pair(&a, &p)
}

/// The state of a phase-polynomial diagram and its free variables.
pub fn pair_from_diagram(d: &PhasePolyDiagram) -> (ExactState, Vec<usize>) {
    let (a, p) = d.to_pair();
    let free = p.free().to_vec();
    (state_from_pair(&a, &p).expect("consistent pair"), free)
}
