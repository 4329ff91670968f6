//! Single-qubit Cliffords (modulo global phase) and the six Pauli
//! measurement effects.
//!
//! A [`LocalClifford`] is one of the 24 elements of the single-qubit Clifford
//! group up to scalar. It is written as a word over quarter-turn phase gates
//! `Z(k)` and `X(k)`, and every element has a canonical shortest word so two
//! decorations compare equal exactly when they denote the same operator.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::exact::{strip_twos, GaussInt};

/// A 2x2 matrix `entries · (√2)^sqrt2_exponent`, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mat2 {
    pub entries: [GaussInt; 4],
    pub sqrt2_exponent: i32,
}

impl Mat2 {
    pub fn identity() -> Self {
        Mat2 {
            entries: [GaussInt::ONE, GaussInt::ZERO, GaussInt::ZERO, GaussInt::ONE],
            sqrt2_exponent: 0,
        }
    }

    pub fn get(&self, row: usize, col: usize) -> GaussInt {
        self.entries[2 * row + col]
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let mut entries = [GaussInt::ZERO; 4];
        for r in 0..2 {
            for c in 0..2 {
                entries[2 * r + c] =
                    self.get(r, 0) * rhs.get(0, c) + self.get(r, 1) * rhs.get(1, c);
            }
        }
        let mut m = Mat2 {
            entries,
            sqrt2_exponent: self.sqrt2_exponent + rhs.sqrt2_exponent,
        };
        m.sqrt2_exponent += 2 * strip_twos(&mut m.entries);
        m
    }

    pub fn transpose(&self) -> Mat2 {
        let e = self.entries;
        Mat2 {
            entries: [e[0], e[2], e[1], e[3]],
            sqrt2_exponent: self.sqrt2_exponent,
        }
    }

    /// Equality up to a nonzero scalar.
    pub fn proportional(&self, other: &Mat2) -> bool {
        let Some(p) = (0..4).find(|&k| !self.entries[k].is_zero()) else {
            return other.entries.iter().all(|e| e.is_zero());
        };
        let (sp, op) = (self.entries[p], other.entries[p]);
        !op.is_zero() && (0..4).all(|k| self.entries[k] * op == other.entries[k] * sp)
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, row: [GaussInt; 2]) -> [GaussInt; 2] {
        [
            row[0] * self.get(0, 0) + row[1] * self.get(1, 0),
            row[0] * self.get(0, 1) + row[1] * self.get(1, 1),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    Z,
    X,
}

/// A phase gate `Z(k·π/2)` or `X(k·π/2)`, written `Z1`, `X3`, ...
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gate {
    pub axis: Axis,
    pub quarter_turns: u8,
}

impl Gate {
    pub fn z(k: i64) -> Self {
        Gate {
            axis: Axis::Z,
            quarter_turns: k.rem_euclid(4) as u8,
        }
    }

    pub fn x(k: i64) -> Self {
        Gate {
            axis: Axis::X,
            quarter_turns: k.rem_euclid(4) as u8,
        }
    }

    /// Exact matrix: `Z(k) = diag(1, i^k)`, `X(k) = H Z(k) H`.
    pub fn matrix(&self) -> Mat2 {
        let w = GaussInt::i_pow(self.quarter_turns as i64);
        match self.axis {
            Axis::Z => Mat2 {
                entries: [GaussInt::ONE, GaussInt::ZERO, GaussInt::ZERO, w],
                sqrt2_exponent: 0,
            },
            Axis::X => {
                let (p, m) = (GaussInt::ONE + w, GaussInt::ONE - w);
                let mut entries = [p, m, m, p];
                let twos = strip_twos(&mut entries);
                Mat2 {
                    entries,
                    sqrt2_exponent: -2 + 2 * twos,
                }
            }
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = match self.axis {
            Axis::Z => 'Z',
            Axis::X => 'X',
        };
        write!(f, "{a}{}", self.quarter_turns)
    }
}

impl FromStr for Gate {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let mut chars = s.chars();
        let axis = match chars.next() {
            Some('Z') => Axis::Z,
            Some('X') => Axis::X,
            _ => return Err(format!("bad gate {s:?}: expected Z<k> or X<k>")),
        };
        let k: i64 = chars
            .as_str()
            .parse()
            .map_err(|_| format!("bad gate {s:?}: quarter turns must be an integer"))?;
        Ok(match axis {
            Axis::Z => Gate::z(k),
            Axis::X => Gate::x(k),
        })
    }
}

impl Serialize for Gate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Gate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Matrix of a word; the first gate acts first.
pub fn word_matrix(word: &[Gate]) -> Mat2 {
    word.iter()
        .fold(Mat2::identity(), |acc, g| g.matrix().mul(&acc))
}

struct CliffordTable {
    words: Vec<Vec<Gate>>,
    matrices: Vec<Mat2>,
}

impl CliffordTable {
    fn lookup(&self, m: &Mat2) -> Option<usize> {
        self.matrices.iter().position(|t| t.proportional(m))
    }
}

fn table() -> &'static CliffordTable {
    static TABLE: OnceLock<CliffordTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let gens: Vec<Gate> = (1..4).map(Gate::z).chain((1..4).map(Gate::x)).collect();
        let mut t = CliffordTable {
            words: vec![vec![]],
            matrices: vec![Mat2::identity()],
        };
        let mut frontier = 0;
        while frontier < t.words.len() {
            let (word, m) = (t.words[frontier].clone(), t.matrices[frontier]);
            for g in &gens {
                let next = g.matrix().mul(&m);
                if t.lookup(&next).is_none() {
                    let mut w = word.clone();
                    w.push(*g);
                    t.words.push(w);
                    t.matrices.push(next);
                }
            }
            frontier += 1;
        }
        assert_eq!(t.words.len(), 24);
        t
    })
}

/// One of the 24 single-qubit Cliffords modulo phase.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalClifford(u8);

impl LocalClifford {
    pub const IDENTITY: LocalClifford = LocalClifford(0);

    pub fn all() -> impl Iterator<Item = LocalClifford> {
        (0..24u8).map(LocalClifford)
    }

    pub fn from_matrix(m: &Mat2) -> Option<Self> {
        table().lookup(m).map(|k| LocalClifford(k as u8))
    }

    pub fn from_word(word: &[Gate]) -> Self {
        Self::from_matrix(&word_matrix(word)).expect("phase gate words are Clifford")
    }

    pub fn gate(g: Gate) -> Self {
        Self::from_word(&[g])
    }

    pub fn z(k: i64) -> Self {
        Self::gate(Gate::z(k))
    }

    pub fn x(k: i64) -> Self {
        Self::gate(Gate::x(k))
    }

    pub fn hadamard() -> Self {
        let h = Mat2 {
            entries: [GaussInt::ONE, GaussInt::ONE, GaussInt::ONE, -GaussInt::ONE],
            sqrt2_exponent: -1,
        };
        Self::from_matrix(&h).unwrap()
    }

    /// Canonical shortest word.
    pub fn word(self) -> &'static [Gate] {
        &table().words[self.0 as usize]
    }

    pub fn matrix(self) -> Mat2 {
        table().matrices[self.0 as usize]
    }

    /// `next ∘ self`: apply `self`, then `next`.
    pub fn then(self, next: LocalClifford) -> LocalClifford {
        Self::from_matrix(&next.matrix().mul(&self.matrix())).unwrap()
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(self, first: LocalClifford) -> LocalClifford {
        first.then(self)
    }

    pub fn inverse(self) -> LocalClifford {
        LocalClifford::all()
            .find(|c| c.then(self) == LocalClifford::IDENTITY)
            .unwrap()
    }

    /// Operator transpose. Both generator families are symmetric matrices,
    /// so this reverses the word.
    pub fn transpose(self) -> LocalClifford {
        Self::from_matrix(&self.matrix().transpose()).unwrap()
    }

    /// `Some(k)` when this is the diagonal `Z(k)`.
    pub fn z_quarter_turns(self) -> Option<u8> {
        (0..4).find(|&k| LocalClifford::z(k as i64) == self)
    }

    pub fn index(self) -> u8 {
        self.0
    }
}

impl fmt::Debug for LocalClifford {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LocalClifford[")?;
        for (i, g) in self.word().iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{g}")?;
        }
        f.write_str("]")
    }
}

impl Serialize for LocalClifford {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.word().serialize(s)
    }
}

impl<'de> Deserialize<'de> for LocalClifford {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let word = Vec::<Gate>::deserialize(d)?;
        Ok(LocalClifford::from_word(&word))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

impl FromStr for Sign {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "+" => Ok(Sign::Plus),
            "-" => Ok(Sign::Minus),
            _ => Err(format!("bad sign {s:?}: expected + or -")),
        }
    }
}

/// A Pauli measurement effect: the bra of the `sign`-eigenstate of `basis`.
///
/// Rows: `X± = (1, ±1)/√2`, `Y± = (1, ∓i)/√2`, `Z+ = (1, 0)`, `Z- = (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Effect {
    pub basis: Basis,
    pub sign: Sign,
}

impl Effect {
    pub const fn new(basis: Basis, sign: Sign) -> Self {
        Effect { basis, sign }
    }

    pub fn all() -> impl Iterator<Item = Effect> {
        [Basis::X, Basis::Y, Basis::Z].into_iter().flat_map(|b| {
            [Sign::Plus, Sign::Minus]
                .into_iter()
                .map(move |s| Effect::new(b, s))
        })
    }

    /// Row vector `entries · (√2)^exponent`.
    pub fn row(self) -> ([GaussInt; 2], i32) {
        let one = GaussInt::ONE;
        match (self.basis, self.sign) {
            (Basis::X, Sign::Plus) => ([one, one], -1),
            (Basis::X, Sign::Minus) => ([one, -one], -1),
            (Basis::Y, Sign::Plus) => ([one, -GaussInt::I], -1),
            (Basis::Y, Sign::Minus) => ([one, GaussInt::I], -1),
            (Basis::Z, Sign::Plus) => ([one, GaussInt::ZERO], 0),
            (Basis::Z, Sign::Minus) => ([GaussInt::ZERO, one], 0),
        }
    }

    fn from_row(row: [GaussInt; 2]) -> Option<Effect> {
        Effect::all().find(|e| {
            let (r, _) = e.row();
            row[0] * r[1] == row[1] * r[0] && (!row[0].is_zero() || !row[1].is_zero())
        })
    }

    /// The effect `⟨self| ∘ c`, i.e. measuring after applying `c`.
    pub fn after(self, c: LocalClifford) -> Effect {
        let (row, _) = self.row();
        Effect::from_row(c.matrix().left_apply(row)).expect("Cliffords permute Pauli effects")
    }
}

impl fmt::Display for Effect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.basis, self.sign)
    }
}
