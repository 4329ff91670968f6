//! Linear algebra over GF(2) and affine subspaces of GF(2)^n.
//!
//! Rows are bit-packed into `u64` words so elimination is word-level XOR.
//! Variable indices are 0-based here; the IO layer converts to the 1-based
//! `x_1 .. x_n` naming.

use std::fmt;

use thiserror::Error;

/// Default cap on `dim(A)` for [`AffineSpace::enumerate_points`].
pub const DEFAULT_ENUMERATION_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gf2Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("inconsistent linear system")]
    Inconsistent,
    #[error("the given variables do not parameterise the affine space")]
    InvalidFreeSet,
    #[error("affine space of dimension {dim} exceeds the enumeration limit {limit}")]
    LimitExceeded { dim: usize, limit: usize },
}

/// A fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitRow {
    len: usize,
    words: Vec<u64>,
}

impl BitRow {
    pub fn zeros(len: usize) -> Self {
        BitRow {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut row = BitRow::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                row.set(i, true);
            }
        }
        row
    }

    /// Parses a string of `0`/`1` characters, first character is index 0.
    pub fn from_bit_str(s: &str) -> Option<Self> {
        let bits: Option<Vec<bool>> = s
            .chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect();
        bits.map(|b| BitRow::from_bools(&b))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: usize) {
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &BitRow) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitRow) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            % 2
            == 1
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

impl fmt::Debug for BitRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitRow({self})")
    }
}

impl fmt::Display for BitRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A dense `rows x cols` matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitRow>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            cols,
            rows: vec![BitRow::zeros(cols); rows],
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitRow>) -> Result<Self, Gf2Error> {
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Gf2Error::DimensionMismatch {
                expected: cols,
                found: r.len(),
            });
        }
        Ok(BitMatrix { cols, rows })
    }

    /// Builds a matrix from 0/1 entries; all rows must share a length.
    pub fn from_entries(cols: usize, entries: &[&[u8]]) -> Result<Self, Gf2Error> {
        let rows = entries
            .iter()
            .map(|r| BitRow::from_bools(&r.iter().map(|&e| e != 0).collect::<Vec<_>>()))
            .collect();
        BitMatrix::from_rows(cols, rows)
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value);
    }

    pub fn row(&self, r: usize) -> &BitRow {
        &self.rows[r]
    }

    pub fn rows(&self) -> &[BitRow] {
        &self.rows
    }

    pub fn mul_vec(&self, x: &BitRow) -> BitRow {
        let mut out = BitRow::zeros(self.nrows());
        for (i, row) in self.rows.iter().enumerate() {
            out.set(i, row.dot(x));
        }
        out
    }

    pub fn rank(&self) -> usize {
        let zero = BitRow::zeros(self.nrows());
        let order: Vec<usize> = (0..self.cols).collect();
        eliminate(self.clone(), zero, &order).2.len()
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.rows.iter().map(|r| r.to_string()))
            .finish()
    }
}

/// Result of reducing `[M | b]` to reduced row echelon form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    /// Nonzero rows only, one per pivot.
    pub matrix: BitMatrix,
    pub rhs: BitRow,
    /// Pivot column of each row of `matrix`.
    pub pivots: Vec<usize>,
}

/// Gauss-Jordan elimination with pivot columns chosen in `order`.
/// Returns (reduced rows, rhs, pivots, consistent).
fn eliminate(
    m: BitMatrix,
    b: BitRow,
    order: &[usize],
) -> (Vec<BitRow>, Vec<bool>, Vec<usize>, bool) {
    let mut rows = m.rows;
    let mut rhs: Vec<bool> = b.to_bools();
    let mut pivots = Vec::new();
    let mut next = 0;
    for &c in order {
        let Some(p) = (next..rows.len()).find(|&r| rows[r].get(c)) else {
            continue;
        };
        rows.swap(next, p);
        rhs.swap(next, p);
        let (pivot_row, pivot_rhs) = (rows[next].clone(), rhs[next]);
        for r in 0..rows.len() {
            if r != next && rows[r].get(c) {
                rows[r].xor_assign(&pivot_row);
                rhs[r] ^= pivot_rhs;
            }
        }
        pivots.push(c);
        next += 1;
    }
    let consistent = rhs[next..].iter().all(|&v| !v);
    rows.truncate(next);
    rhs.truncate(next);
    (rows, rhs, pivots, consistent)
}

fn rref_in_order(m: &BitMatrix, augment: &BitRow, order: &[usize]) -> Result<Rref, Gf2Error> {
    if augment.len() != m.nrows() {
        return Err(Gf2Error::DimensionMismatch {
            expected: m.nrows(),
            found: augment.len(),
        });
    }
    let (rows, rhs, pivots, consistent) = eliminate(m.clone(), augment.clone(), order);
    if !consistent {
        return Err(Gf2Error::Inconsistent);
    }
    Ok(Rref {
        matrix: BitMatrix {
            cols: m.ncols(),
            rows,
        },
        rhs: BitRow::from_bools(&rhs),
        pivots,
    })
}

/// Reduced row echelon form of `[m | augment]`, pivots chosen left to right.
pub fn rref(m: &BitMatrix, augment: &BitRow) -> Result<Rref, Gf2Error> {
    let order: Vec<usize> = (0..m.ncols()).collect();
    rref_in_order(m, augment, &order)
}

/// One solution of `m x = b`, with every non-pivot variable set to zero.
pub fn solve(m: &BitMatrix, b: &BitRow) -> Result<BitRow, Gf2Error> {
    let r = rref(m, b)?;
    let mut x = BitRow::zeros(m.ncols());
    for (i, &p) in r.pivots.iter().enumerate() {
        x.set(p, r.rhs.get(i));
    }
    Ok(x)
}

/// Basis of `{x : m x = 0}`.
pub fn nullspace(m: &BitMatrix) -> Vec<BitRow> {
    let order: Vec<usize> = (0..m.ncols()).collect();
    let (rows, _, pivots, _) = eliminate(m.clone(), BitRow::zeros(m.nrows()), &order);
    let mut basis = Vec::new();
    for free in (0..m.ncols()).filter(|c| !pivots.contains(c)) {
        let mut v = BitRow::zeros(m.ncols());
        v.set(free, true);
        for (row, &p) in rows.iter().zip(&pivots) {
            if row.get(free) {
                v.set(p, true);
            }
        }
        basis.push(v);
    }
    basis
}

/// The solution set of `R x = b` over GF(2), with `R` of full row rank.
#[derive(Clone, PartialEq, Eq)]
pub struct AffineSpace {
    n: usize,
    constraints: BitMatrix,
    rhs: BitRow,
}

impl AffineSpace {
    /// Reduces the system; inconsistent systems are rejected.
    pub fn new(r: BitMatrix, b: BitRow) -> Result<Self, Gf2Error> {
        let reduced = rref(&r, &b)?;
        Ok(AffineSpace {
            n: r.ncols(),
            constraints: reduced.matrix,
            rhs: reduced.rhs,
        })
    }

    pub fn full(n: usize) -> Self {
        AffineSpace {
            n,
            constraints: BitMatrix::zeros(0, n),
            rhs: BitRow::zeros(0),
        }
    }

    pub fn point(x: &BitRow) -> Self {
        let n = x.len();
        let rows = (0..n)
            .map(|i| {
                let mut r = BitRow::zeros(n);
                r.set(i, true);
                r
            })
            .collect();
        AffineSpace {
            n,
            constraints: BitMatrix { cols: n, rows },
            rhs: x.clone(),
        }
    }

    /// Smallest affine space containing every point. `None` for an empty set.
    pub fn affine_hull(points: &[BitRow]) -> Option<Self> {
        let base = points.first()?;
        let n = base.len();
        let diffs: Vec<BitRow> = points[1..]
            .iter()
            .map(|p| {
                let mut d = p.clone();
                d.xor_assign(base);
                d
            })
            .collect();
        let span = BitMatrix {
            cols: n,
            rows: diffs,
        };
        // Constraints are the annihilator of the difference span.
        let rows = nullspace(&span);
        let constraints = BitMatrix { cols: n, rows };
        let rhs = constraints.mul_vec(base);
        AffineSpace::new(constraints, rhs).ok()
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.nrows()
    }

    pub fn dim(&self) -> usize {
        self.n - self.constraints.nrows()
    }

    pub fn constraints(&self) -> (&BitMatrix, &BitRow) {
        (&self.constraints, &self.rhs)
    }

    pub fn contains(&self, x: &BitRow) -> bool {
        x.len() == self.n && self.constraints.mul_vec(x) == self.rhs
    }

    /// The canonical free variables: scanning `x_1, x_2, ...` in order, a
    /// variable is dependent iff the constraints fix it given the earlier
    /// free variables.
    ///
    /// A variable is fixed by its predecessors exactly when some constraint
    /// in the row space has it as its highest-index entry, so these are the
    /// pivots of an elimination that scans columns from the right.
    pub fn canonical_free_vars(&self) -> Vec<usize> {
        let order: Vec<usize> = (0..self.n).rev().collect();
        let reduced = rref_in_order(&self.constraints, &self.rhs, &order)
            .expect("affine space constraints are consistent");
        (0..self.n)
            .filter(|c| !reduced.pivots.contains(c))
            .collect()
    }

    /// Expresses every variable outside `free` over the variables in `free`.
    pub fn dependency_table(&self, free: &[usize]) -> Result<DependencyTable, Gf2Error> {
        let mut free_sorted = free.to_vec();
        free_sorted.sort_unstable();
        free_sorted.dedup();
        if free_sorted.len() != free.len()
            || free_sorted.len() != self.dim()
            || free_sorted.iter().any(|&f| f >= self.n)
        {
            return Err(Gf2Error::InvalidFreeSet);
        }
        let dependent: Vec<usize> = (0..self.n).filter(|c| !free_sorted.contains(c)).collect();
        let order: Vec<usize> = dependent.iter().chain(&free_sorted).copied().collect();
        let reduced = rref_in_order(&self.constraints, &self.rhs, &order)?;
        if reduced.pivots != dependent {
            return Err(Gf2Error::InvalidFreeSet);
        }
        let rows = reduced
            .pivots
            .iter()
            .enumerate()
            .map(|(i, &var)| {
                let row = reduced.matrix.row(i);
                let coeffs = BitRow::from_bools(
                    &free_sorted.iter().map(|&f| row.get(f)).collect::<Vec<_>>(),
                );
                DependentRow {
                    var,
                    constant: reduced.rhs.get(i),
                    coeffs,
                }
            })
            .collect();
        Ok(DependencyTable {
            n: self.n,
            free: free_sorted,
            rows,
        })
    }

    /// Every point of the space, ascending with `x_1` as the most
    /// significant bit.
    pub fn enumerate_points(&self, limit: usize) -> Result<Vec<BitRow>, Gf2Error> {
        if self.dim() > limit {
            return Err(Gf2Error::LimitExceeded {
                dim: self.dim(),
                limit,
            });
        }
        let table = self.dependency_table(&self.canonical_free_vars())?;
        let mut points: Vec<BitRow> = (0..1usize << self.dim())
            .map(|mask| {
                let assignment: Vec<bool> = (0..self.dim()).map(|i| (mask >> i) & 1 == 1).collect();
                table.point(&assignment)
            })
            .collect();
        points.sort_by_key(|p| p.to_bools());
        Ok(points)
    }
}

impl fmt::Debug for AffineSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AffineSpace")
            .field("n", &self.n)
            .field("constraints", &self.constraints)
            .field("rhs", &self.rhs)
            .finish()
    }
}

/// `x_var = constant ⊕ ⨁_k coeffs[k] x_{free[k]}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependentRow {
    pub var: usize,
    pub constant: bool,
    /// Indexed by position in [`DependencyTable::free`].
    pub coeffs: BitRow,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyTable {
    n: usize,
    free: Vec<usize>,
    rows: Vec<DependentRow>,
}

impl DependencyTable {
    pub fn free(&self) -> &[usize] {
        &self.free
    }

    pub fn rows(&self) -> &[DependentRow] {
        &self.rows
    }

    pub fn row_for(&self, var: usize) -> Option<&DependentRow> {
        self.rows.iter().find(|r| r.var == var)
    }

    /// Whether dependent `var` depends on free variable `free_var`.
    pub fn depends_on(&self, var: usize, free_var: usize) -> bool {
        let Some(pos) = self.free.iter().position(|&f| f == free_var) else {
            return false;
        };
        self.row_for(var).is_some_and(|r| r.coeffs.get(pos))
    }

    /// The point induced by assigning `values[k]` to `free[k]`.
    pub fn point(&self, values: &[bool]) -> BitRow {
        assert_eq!(values.len(), self.free.len());
        let mut x = BitRow::zeros(self.n);
        for (&f, &v) in self.free.iter().zip(values) {
            x.set(f, v);
        }
        for row in &self.rows {
            let mut v = row.constant;
            for k in row.coeffs.ones() {
                v ^= values[k];
            }
            x.set(row.var, v);
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_qubit_space() -> AffineSpace {
        // x1 ⊕ x3 = 1, x1 ⊕ x2 ⊕ x4 = 0
        let r = BitMatrix::from_entries(4, &[&[1, 0, 1, 0], &[1, 1, 0, 1]]).unwrap();
        AffineSpace::new(r, BitRow::from_bools(&[true, false])).unwrap()
    }

    #[test]
    fn rref_pivots_on_example_system() {
        let r = BitMatrix::from_entries(4, &[&[1, 0, 1, 0], &[1, 1, 0, 1]]).unwrap();
        let out = rref(&r, &BitRow::from_bools(&[true, false])).unwrap();
        assert_eq!(out.pivots, vec![0, 1]);
        // idempotent
        let again = rref(&out.matrix, &out.rhs).unwrap();
        assert_eq!(again, out);
    }

    #[test]
    fn rref_empty_and_inconsistent() {
        let empty = BitMatrix::zeros(0, 3);
        let out = rref(&empty, &BitRow::zeros(0)).unwrap();
        assert!(out.pivots.is_empty());

        let r = BitMatrix::from_entries(1, &[&[1], &[1]]).unwrap();
        assert_eq!(
            rref(&r, &BitRow::from_bools(&[false, true])),
            Err(Gf2Error::Inconsistent)
        );
        assert!(matches!(
            rref(&r, &BitRow::zeros(3)),
            Err(Gf2Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn canonical_free_vars_examples() {
        assert_eq!(four_qubit_space().canonical_free_vars(), vec![0, 1]);
        assert_eq!(AffineSpace::full(3).canonical_free_vars(), vec![0, 1, 2]);
        let p = AffineSpace::point(&BitRow::from_bit_str("101").unwrap());
        assert!(p.canonical_free_vars().is_empty());
    }

    #[test]
    fn dependency_tables_for_four_qubit_space() {
        let a = four_qubit_space();
        let t = a.dependency_table(&[0, 1]).unwrap();
        let x3 = t.row_for(2).unwrap();
        assert!(x3.constant && t.depends_on(2, 0) && !t.depends_on(2, 1));
        let x4 = t.row_for(3).unwrap();
        assert!(!x4.constant && t.depends_on(3, 0) && t.depends_on(3, 1));

        let t = a.dependency_table(&[1, 2]).unwrap();
        let x1 = t.row_for(0).unwrap();
        assert!(x1.constant && t.depends_on(0, 2) && !t.depends_on(0, 1));
        let x4 = t.row_for(3).unwrap();
        assert!(x4.constant && t.depends_on(3, 1) && t.depends_on(3, 2));

        let t = a.dependency_table(&[2, 3]).unwrap();
        let x1 = t.row_for(0).unwrap();
        assert!(x1.constant && t.depends_on(0, 2) && !t.depends_on(0, 3));
        let x2 = t.row_for(1).unwrap();
        assert!(x2.constant && t.depends_on(1, 2) && t.depends_on(1, 3));
        for mask in 0..4 {
            let p = t.point(&[mask & 1 == 1, mask & 2 == 2]);
            assert!(a.contains(&p));
        }
    }

    #[test]
    fn invalid_free_sets_are_rejected() {
        let a = four_qubit_space();
        // x1 and x3 are tied together, so {x1, x3} cannot both be free.
        assert_eq!(a.dependency_table(&[0, 2]), Err(Gf2Error::InvalidFreeSet));
        assert_eq!(a.dependency_table(&[0]), Err(Gf2Error::InvalidFreeSet));
        assert_eq!(a.dependency_table(&[0, 0]), Err(Gf2Error::InvalidFreeSet));
    }

    #[test]
    fn enumerate_examples() {
        let pts: Vec<String> = four_qubit_space()
            .enumerate_points(DEFAULT_ENUMERATION_LIMIT)
            .unwrap()
            .iter()
            .map(|p| p.to_string())
            .collect();
        assert_eq!(pts, ["0010", "0111", "1001", "1100"]);

        let x = BitRow::from_bit_str("0110").unwrap();
        assert_eq!(AffineSpace::point(&x).enumerate_points(4).unwrap(), vec![x]);

        let pts: Vec<String> = AffineSpace::full(2)
            .enumerate_points(4)
            .unwrap()
            .iter()
            .map(|p| p.to_string())
            .collect();
        assert_eq!(pts, ["00", "01", "10", "11"]);

        assert!(matches!(
            AffineSpace::full(5).enumerate_points(4),
            Err(Gf2Error::LimitExceeded { dim: 5, limit: 4 })
        ));
    }

    #[test]
    fn hull_of_support() {
        let pts: Vec<BitRow> = ["0010", "0111", "1001", "1100"]
            .iter()
            .map(|s| BitRow::from_bit_str(s).unwrap())
            .collect();
        let hull = AffineSpace::affine_hull(&pts).unwrap();
        assert_eq!(hull.dim(), 2);
        assert_eq!(hull.enumerate_points(4).unwrap(), pts);
    }
}
