//! Exact amplitudes: Gaussian integers with a shared power of √2.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("state dimension mismatch: {0} vs {1} amplitudes")]
    DimensionMismatch(usize, usize),
    #[error("amplitude vector of length {0} is not a power of two")]
    NotPowerOfTwo(usize),
}

/// `re + im·i` with integer parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct GaussInt {
    pub re: i64,
    pub im: i64,
}

impl From<[i64; 2]> for GaussInt {
    fn from([re, im]: [i64; 2]) -> Self {
        GaussInt { re, im }
    }
}

impl From<GaussInt> for [i64; 2] {
    fn from(g: GaussInt) -> Self {
        [g.re, g.im]
    }
}

impl GaussInt {
    pub const ZERO: GaussInt = GaussInt { re: 0, im: 0 };
    pub const ONE: GaussInt = GaussInt { re: 1, im: 0 };
    pub const I: GaussInt = GaussInt { re: 0, im: 1 };

    pub const fn new(re: i64, im: i64) -> Self {
        GaussInt { re, im }
    }

    /// `i^k` for any integer `k`.
    pub fn i_pow(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => GaussInt::new(1, 0),
            1 => GaussInt::new(0, 1),
            2 => GaussInt::new(-1, 0),
            _ => GaussInt::new(0, -1),
        }
    }

    pub fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn conj(self) -> Self {
        GaussInt::new(self.re, -self.im)
    }

    fn is_even(self) -> bool {
        self.re % 2 == 0 && self.im % 2 == 0
    }

    fn half(self) -> Self {
        GaussInt::new(self.re / 2, self.im / 2)
    }

    /// The `k` in `0..4` with `self = i^k · other`, if any.
    pub fn quarter_turns_from(self, other: GaussInt) -> Option<u8> {
        (0..4u8).find(|&k| GaussInt::i_pow(k as i64) * other == self)
    }
}

impl Add for GaussInt {
    type Output = GaussInt;
    fn add(self, o: GaussInt) -> GaussInt {
        GaussInt::new(self.re + o.re, self.im + o.im)
    }
}

impl AddAssign for GaussInt {
    fn add_assign(&mut self, o: GaussInt) {
        self.re += o.re;
        self.im += o.im;
    }
}

impl Sub for GaussInt {
    type Output = GaussInt;
    fn sub(self, o: GaussInt) -> GaussInt {
        GaussInt::new(self.re - o.re, self.im - o.im)
    }
}

impl Neg for GaussInt {
    type Output = GaussInt;
    fn neg(self) -> GaussInt {
        GaussInt::new(-self.re, -self.im)
    }
}

impl Mul for GaussInt {
    type Output = GaussInt;
    fn mul(self, o: GaussInt) -> GaussInt {
        GaussInt::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

impl MulAssign for GaussInt {
    fn mul_assign(&mut self, o: GaussInt) {
        *self = *self * o;
    }
}

impl fmt::Display for GaussInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re, self.im) {
            (re, 0) => write!(f, "{re}"),
            (0, im) => write!(f, "{im}i"),
            (re, im) if im < 0 => write!(f, "{re}{im}i"),
            (re, im) => write!(f, "{re}+{im}i"),
        }
    }
}

/// Divides every entry by 2 while all are even, returning how many times.
pub(crate) fn strip_twos(values: &mut [GaussInt]) -> i32 {
    let mut count = 0;
    while values.iter().any(|v| !v.is_zero()) && values.iter().all(|v| v.is_even()) {
        for v in values.iter_mut() {
            *v = v.half();
        }
        count += 1;
    }
    count
}

/// A dense state on `qubits` qubits: amplitude `k` is
/// `amplitudes[k] · (√2)^sqrt2_exponent`. Qubit 0 is the most significant
/// bit of `k`, so `|0010⟩` is index 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ExactStateRepr")]
pub struct ExactState {
    qubits: usize,
    sqrt2_exponent: i32,
    amplitudes: Vec<GaussInt>,
}

#[derive(Deserialize)]
struct ExactStateRepr {
    qubits: usize,
    sqrt2_exponent: i32,
    amplitudes: Vec<GaussInt>,
}

impl TryFrom<ExactStateRepr> for ExactState {
    type Error = ExactError;
    fn try_from(r: ExactStateRepr) -> Result<Self, ExactError> {
        if r.qubits >= usize::BITS as usize || r.amplitudes.len() != 1 << r.qubits {
            return Err(ExactError::DimensionMismatch(
                1usize.checked_shl(r.qubits as u32).unwrap_or(0),
                r.amplitudes.len(),
            ));
        }
        ExactState::new(r.amplitudes, r.sqrt2_exponent)
    }
}

impl ExactState {
    pub fn new(amplitudes: Vec<GaussInt>, sqrt2_exponent: i32) -> Result<Self, ExactError> {
        let len = amplitudes.len();
        if !len.is_power_of_two() {
            return Err(ExactError::NotPowerOfTwo(len));
        }
        Ok(ExactState {
            qubits: len.trailing_zeros() as usize,
            sqrt2_exponent,
            amplitudes,
        })
    }

    pub fn zero(qubits: usize) -> Self {
        ExactState {
            qubits,
            sqrt2_exponent: 0,
            amplitudes: vec![GaussInt::ZERO; 1 << qubits],
        }
    }

    /// Builds a state from `(bitstring, amplitude)` terms, e.g. `("0010", 1)`.
    pub fn from_terms(qubits: usize, terms: &[(&str, GaussInt)]) -> Self {
        let mut s = ExactState::zero(qubits);
        for (bits, amp) in terms {
            let idx = usize::from_str_radix(bits, 2).expect("binary string");
            s.amplitudes[idx] += *amp;
        }
        s
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn sqrt2_exponent(&self) -> i32 {
        self.sqrt2_exponent
    }

    pub fn amplitudes(&self) -> &[GaussInt] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> GaussInt {
        self.amplitudes[index]
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes.iter().all(|a| a.is_zero())
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&k| !self.amplitudes[k].is_zero())
    }

    pub fn scaled(&self, factor: GaussInt) -> Self {
        ExactState {
            qubits: self.qubits,
            sqrt2_exponent: self.sqrt2_exponent,
            amplitudes: self.amplitudes.iter().map(|&a| a * factor).collect(),
        }
    }

    /// Pulls common factors of two into the exponent; the value is unchanged.
    pub fn reduce(&mut self) {
        self.sqrt2_exponent += 2 * strip_twos(&mut self.amplitudes);
    }

    /// Whether `other = z · self` for some nonzero complex `z`, decided by
    /// cross-multiplication against a pivot amplitude.
    pub fn proportional(&self, other: &ExactState) -> Result<bool, ExactError> {
        if self.len() != other.len() {
            return Err(ExactError::DimensionMismatch(self.len(), other.len()));
        }
        let Some(pivot) = (0..self.len()).find(|&k| !self.amplitudes[k].is_zero()) else {
            return Ok(other.is_zero());
        };
        let (sp, tp) = (self.amplitudes[pivot], other.amplitudes[pivot]);
        if tp.is_zero() {
            return Ok(false);
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .all(|(&s, &t)| s * tp == t * sp))
    }
}

/// Free-function form of [`ExactState::proportional`].
pub fn proportional(s: &ExactState, t: &ExactState) -> Result<bool, ExactError> {
    s.proportional(t)
}

impl fmt::Display for ExactState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for k in self.support() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(
                f,
                "({})|{:0width$b}⟩",
                self.amplitudes[k],
                k,
                width = self.qubits
            )?;
        }
        if first {
            f.write_str("0")?;
        }
        if self.sqrt2_exponent != 0 {
            write!(f, " · √2^{}", self.sqrt2_exponent)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn proportional_examples() {
        let s = ExactState::from_terms(2, &[("00", GaussInt::ONE), ("11", GaussInt::ONE)]);
        assert!(s.proportional(&s.scaled(GaussInt::I)).unwrap());
        let t = ExactState::from_terms(2, &[("00", GaussInt::ONE), ("11", -GaussInt::ONE)]);
        assert!(!s.proportional(&t).unwrap());
        assert!(!s.proportional(&ExactState::zero(2)).unwrap());
        assert!(s.proportional(&ExactState::zero(3)).is_err());
    }

    #[test]
    fn exponent_does_not_affect_proportionality() {
        let mut s =
            ExactState::from_terms(1, &[("0", GaussInt::new(2, 2)), ("1", GaussInt::new(4, 0))]);
        let before = s.clone();
        s.reduce();
        assert_eq!(s.sqrt2_exponent(), 2);
        assert_eq!(s.amplitude(0), GaussInt::new(1, 1));
        assert!(s.proportional(&before).unwrap());
    }

    #[test]
    fn serde_shape() {
        let s = ExactState::from_terms(1, &[("1", GaussInt::new(0, -1))]);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(
            json,
            r#"{"qubits":1,"sqrt2_exponent":0,"amplitudes":[[0,0],[0,-1]]}"#
        );
        let back: ExactState = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }
}
