//! Deterministic dense linear algebra over Q(zeta_L).
//!
//! Everything funnels through a streaming reduced row-echelon form: rows are
//! inserted one at a time, the pivot is always the lowest nonzero column, and
//! pivots are normalized to 1. Identical input order gives byte-identical
//! bases, which is what makes every reported basis reproducible.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{FieldSpec, Scalar};

/// Row payload carried through elimination (used for universal-form
/// preimages). Payloads must transform exactly like their rows.
pub trait LinearTag: Clone {
    fn tag_scale(&mut self, c: &Scalar);
    /// self -= c * other
    fn tag_sub_scaled(&mut self, c: &Scalar, other: &Self);
}

impl LinearTag for () {
    fn tag_scale(&mut self, _c: &Scalar) {}
    fn tag_sub_scaled(&mut self, _c: &Scalar, _other: &Self) {}
}

/// A streaming reduced row-echelon form with tagged rows.
///
/// Invariants: rows are sorted by pivot column, pivots are 1, and every pivot
/// column is zero in all other rows.
#[derive(Clone)]
pub struct TaggedRref<T: LinearTag> {
    cols: usize,
    rows: Vec<(Vec<Scalar>, T)>,
    pivots: Vec<usize>,
}

impl<T: LinearTag> TaggedRref<T> {
    pub fn new(cols: usize) -> Self {
        TaggedRref {
            cols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn rows(&self) -> &[(Vec<Scalar>, T)] {
        &self.rows
    }

    /// Reduces `row` against the basis in place; returns the elimination
    /// coefficients per basis row (the coordinates along each stored row).
    pub fn reduce_in_place(&self, row: &mut [Scalar], tag: Option<&mut T>) -> Vec<Scalar> {
        assert_eq!(row.len(), self.cols, "row length mismatch");
        let mut coeffs = Vec::with_capacity(self.rows.len());
        let mut tag = tag;
        for ((basis, basis_tag), &p) in self.rows.iter().zip(&self.pivots) {
            let c = row[p].clone();
            coeffs.push(c.clone());
            if c.is_zero() {
                continue;
            }
            for (x, b) in row.iter_mut().zip(basis) {
                if !b.is_zero() {
                    *x = x.sub(&c.mul(b));
                }
            }
            if let Some(t) = tag.as_deref_mut() {
                t.tag_sub_scaled(&c, basis_tag);
            }
        }
        coeffs
    }

    /// Inserts a row (with its tag); returns true if the rank grew.
    pub fn insert(&mut self, mut row: Vec<Scalar>, mut tag: T) -> bool {
        self.reduce_in_place(&mut row, Some(&mut tag));
        let pivot = match row.iter().position(|x| !x.is_zero()) {
            Some(p) => p,
            None => return false,
        };
        // Normalize the pivot to 1.
        let inv = row[pivot].inv().expect("nonzero pivot");
        for x in row.iter_mut() {
            if !x.is_zero() {
                *x = x.mul(&inv);
            }
        }
        tag.tag_scale(&inv);
        // Back-substitute into the existing rows.
        for ((existing, existing_tag), _) in self.rows.iter_mut().zip(&self.pivots) {
            let c = existing[pivot].clone();
            if c.is_zero() {
                continue;
            }
            for (x, b) in existing.iter_mut().zip(&row) {
                if !b.is_zero() {
                    *x = x.sub(&c.mul(b));
                }
            }
            existing_tag.tag_sub_scaled(&c, &tag);
        }
        // Keep rows ordered by pivot column.
        let at = self.pivots.partition_point(|&p| p < pivot);
        self.pivots.insert(at, pivot);
        self.rows.insert(at, (row, tag));
        true
    }

    /// True when `row` lies in the row span.
    pub fn contains(&self, row: &[Scalar]) -> bool {
        let mut r = row.to_vec();
        self.reduce_in_place(&mut r, None);
        r.iter().all(Scalar::is_zero)
    }

    /// Coordinates of `row` in the stored basis; errors if it is outside the
    /// span. Valid because pivots are fully reduced across rows.
    pub fn coordinates(&self, row: &[Scalar]) -> Result<Vec<Scalar>> {
        let mut r = row.to_vec();
        let coeffs = self.reduce_in_place(&mut r, None);
        if r.iter().all(Scalar::is_zero) {
            Ok(coeffs)
        } else {
            Err(Error::InternalInconsistency(
                "vector is outside the spanned subspace".into(),
            ))
        }
    }
}

impl<T: LinearTag> fmt::Debug for TaggedRref<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TaggedRref(rank {}, cols {})", self.rank(), self.cols)
    }
}

/// Result of [`rref`]: canonical basis rows, pivot columns and the rank.
#[derive(Clone, Debug)]
pub struct RrefResult {
    pub basis: Vec<Vec<Scalar>>,
    pub pivots: Vec<usize>,
    pub rank: usize,
}

/// Deterministic reduced row-echelon form of the given rows.
pub fn rref(rows: &[Vec<Scalar>], cols: usize) -> RrefResult {
    let mut r = TaggedRref::<()>::new(cols);
    for row in rows {
        r.insert(row.clone(), ());
    }
    let rank = r.rank();
    let pivots = r.pivots.clone();
    RrefResult {
        basis: r.rows.into_iter().map(|(row, _)| row).collect(),
        pivots,
        rank,
    }
}

/// A dense matrix with entries in a single Q(zeta_L).
#[derive(Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    field: Arc<FieldSpec>,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl ExactMatrix {
    pub fn zeros(field: &Arc<FieldSpec>, rows: usize, cols: usize) -> Self {
        ExactMatrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![Scalar::zero(field); rows * cols],
        }
    }

    pub fn identity(field: &Arc<FieldSpec>, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one(field));
        }
        m
    }

    pub fn from_rows(field: &Arc<FieldSpec>, rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        ExactMatrix {
            field: field.clone(),
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Builds a matrix from integer entries, row major.
    pub fn from_int_rows(field: &Arc<FieldSpec>, rows: &[&[i64]]) -> Self {
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&v| Scalar::from_integer(field, v)))
            .collect::<Vec<_>>();
        ExactMatrix {
            field: field.clone(),
            rows: rows.len(),
            cols: rows.first().map_or(0, |r| r.len()),
            data,
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn add(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.add(b))
            .collect();
        ExactMatrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.sub(b))
            .collect();
        ExactMatrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn neg(&self) -> ExactMatrix {
        ExactMatrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(Scalar::neg).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> ExactMatrix {
        ExactMatrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.mul(c)).collect(),
        }
    }

    pub fn mul(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        let field = self.field();
        let mut out = ExactMatrix::zeros(field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j).add(&a.mul(b));
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    /// [A, B] = AB - BA.
    pub fn commutator(&self, other: &ExactMatrix) -> ExactMatrix {
        self.mul(other).sub(&other.mul(self))
    }

    /// Kronecker product, blocks of `other` scaled by entries of `self`.
    pub fn kron(&self, other: &ExactMatrix) -> ExactMatrix {
        let field = self.field();
        let mut out = ExactMatrix::zeros(field, self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let b = other.get(k, l);
                        if b.is_zero() {
                            continue;
                        }
                        out.set(i * other.rows + k, j * other.cols + l, a.mul(b));
                    }
                }
            }
        }
        out
    }

    /// Row-major flattening, the vector form used by all span computations.
    pub fn flatten(&self) -> Vec<Scalar> {
        self.data.clone()
    }

    pub fn from_flat(field: &Arc<FieldSpec>, rows: usize, cols: usize, flat: &[Scalar]) -> Self {
        assert_eq!(flat.len(), rows * cols);
        ExactMatrix {
            field: field.clone(),
            rows,
            cols,
            data: flat.to_vec(),
        }
    }

    pub fn transpose(&self) -> ExactMatrix {
        let mut out = self.clone();
        out.rows = self.cols;
        out.cols = self.rows;
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        out
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let entries: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", entries.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Basis of the right null space of `m`, ordered by free-column index.
pub fn kernel_basis(m: &ExactMatrix) -> Vec<Vec<Scalar>> {
    let field = m.field().clone();
    let rows: Vec<Vec<Scalar>> = (0..m.rows).map(|i| m.row(i).to_vec()).collect();
    let red = rref(&rows, m.cols);
    let mut out = Vec::new();
    let mut pivot_set = vec![false; m.cols];
    for &p in &red.pivots {
        pivot_set[p] = true;
    }
    for free in 0..m.cols {
        if pivot_set[free] {
            continue;
        }
        let mut v = vec![Scalar::zero(&field); m.cols];
        v[free] = Scalar::one(&field);
        for (row, &p) in red.basis.iter().zip(&red.pivots) {
            // pivot coordinate satisfies x_p = -row[free]
            v[p] = row[free].neg();
        }
        out.push(v);
    }
    out
}

/// Eliminates on the first `split` columns before the rest and returns the
/// total rank together with a basis of `{ y : (0, y) lies in the row span }`.
pub fn paired_reduce(rows: &[Vec<Scalar>], split: usize) -> (usize, Vec<Vec<Scalar>>) {
    let cols = rows.first().map_or(split, Vec::len);
    assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
    assert!(split <= cols);
    let mut r = TaggedRref::<()>::new(cols);
    for row in rows {
        r.insert(row.clone(), ());
    }
    let rank = r.rank();
    let second = r
        .rows()
        .iter()
        .zip(r.pivots())
        .filter(|(_, &p)| p >= split)
        .map(|((row, _), _)| row[split..].to_vec())
        .collect();
    (rank, second)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f4() -> Arc<FieldSpec> {
        FieldSpec::new(4).unwrap()
    }

    fn s(field: &Arc<FieldSpec>, v: i64) -> Scalar {
        Scalar::from_integer(field, v)
    }

    fn int_rows(field: &Arc<FieldSpec>, rows: &[&[i64]]) -> Vec<Vec<Scalar>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| s(field, v)).collect())
            .collect()
    }

    #[test]
    fn rref_basics() {
        let f = f4();
        // {(1,1),(2,2)} -> rank 1, basis {(1,1)}
        let red = rref(&int_rows(&f, &[&[1, 1], &[2, 2]]), 2);
        assert_eq!(red.rank, 1);
        assert_eq!(red.basis, int_rows(&f, &[&[1, 1]]));
        // empty input -> rank 0
        let red = rref(&[], 3);
        assert_eq!(red.rank, 0);
        // {(0,1),(1,0)} -> rank 2, pivots (0,1) after reordering
        let red = rref(&int_rows(&f, &[&[0, 1], &[1, 0]]), 2);
        assert_eq!(red.rank, 2);
        assert_eq!(red.pivots, vec![0, 1]);
        assert_eq!(red.basis, int_rows(&f, &[&[1, 0], &[0, 1]]));
    }

    #[test]
    fn rref_is_idempotent() {
        let f = f4();
        let rows = int_rows(&f, &[&[2, 4, 6], &[1, 3, 5], &[0, 2, 4]]);
        let once = rref(&rows, 3);
        let twice = rref(&once.basis, 3);
        assert_eq!(once.basis, twice.basis);
        assert_eq!(once.pivots, twice.pivots);
    }

    #[test]
    fn kernel_basis_examples() {
        let f = f4();
        // identity 2x2 -> empty basis
        let id = ExactMatrix::identity(&f, 2);
        assert!(kernel_basis(&id).is_empty());
        // zero 2x3 -> 3 basis vectors
        let z = ExactMatrix::zeros(&f, 2, 3);
        assert_eq!(kernel_basis(&z).len(), 3);
        // (1 1) -> basis {(1,-1)} up to normalization
        let m = ExactMatrix::from_int_rows(&f, &[&[1, 1]]);
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 1);
        // check m * k = 0
        let prod: Scalar = k[0]
            .iter()
            .zip([s(&f, 1), s(&f, 1)].iter())
            .fold(Scalar::zero(&f), |acc, (a, b)| acc.add(&a.mul(b)));
        assert!(prod.is_zero());
    }

    #[test]
    fn paired_reduce_examples() {
        let f = f4();
        // rows {(1,0 | 1,0),(1,0 | 0,1)} with split 2 -> spans {(1,-1)}
        let rows = int_rows(&f, &[&[1, 0, 1, 0], &[1, 0, 0, 1]]);
        let (rank, second) = paired_reduce(&rows, 2);
        assert_eq!(rank, 2);
        assert_eq!(second.len(), 1);
        // reported basis is normalized; must be a multiple of (1,-1)
        assert_eq!(second[0][0].mul(&s(&f, -1)), second[0][1]);
        assert!(!second[0][0].is_zero());

        let rows = int_rows(&f, &[&[1, 0, 1, 0]]);
        let (_, second) = paired_reduce(&rows, 2);
        assert!(second.is_empty());

        let rows = int_rows(&f, &[&[0, 0, 1, 0]]);
        let (rank, second) = paired_reduce(&rows, 2);
        assert_eq!(rank, 1);
        assert_eq!(second, int_rows(&f, &[&[1, 0]]));
    }

    #[test]
    fn kron_and_commutator() {
        let f = f4();
        let a = ExactMatrix::from_int_rows(&f, &[&[1, 2], &[3, 4]]);
        let id = ExactMatrix::identity(&f, 2);
        let k = a.kron(&id);
        assert_eq!(k.nrows(), 4);
        assert_eq!(k.get(0, 0), &s(&f, 1));
        assert_eq!(k.get(1, 1), &s(&f, 1));
        assert_eq!(k.get(0, 2), &s(&f, 2));
        assert_eq!(k.get(3, 1), &s(&f, 3));
        assert!(id.commutator(&a).is_zero());
    }

    #[test]
    fn coordinates_in_span() {
        let f = f4();
        let mut r = TaggedRref::<()>::new(3);
        r.insert(int_rows(&f, &[&[1, 0, 1]]).remove(0), ());
        r.insert(int_rows(&f, &[&[0, 1, 1]]).remove(0), ());
        let coords = r.coordinates(&int_rows(&f, &[&[2, 3, 5]]).remove(0)).unwrap();
        assert_eq!(coords, vec![s(&f, 2), s(&f, 3)]);
        assert!(r.coordinates(&int_rows(&f, &[&[0, 0, 1]]).remove(0)).is_err());
    }
}
