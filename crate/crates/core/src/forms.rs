//! Reduced universal differential forms over a finite algebra.
//!
//! A degree-k form lives in A (x) Abar^k where Abar = A / K.1. With the unit
//! normalized to the first basis vector, a spanning tuple is
//! (i0; i1, ..., ik) with i0 ranging over the full basis and the i_j >= 1
//! over the non-unit basis vectors. Forms are sparse maps from tuples to
//! scalars; the tuple keys are ordered, which fixes every enumeration in the
//! engine.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::linalg::{ExactMatrix, LinearTag};
use crate::scalar::{FieldSpec, Scalar};
use crate::triple::{EvenTriple, FiniteAlgebra};

/// Sparse universal form of a fixed degree.
#[derive(Clone, PartialEq)]
pub struct UniversalForm {
    field: Arc<FieldSpec>,
    degree: usize,
    /// Tuple (i0; i1..ik) -> coefficient; keys have length degree + 1.
    terms: BTreeMap<Vec<u16>, Scalar>,
}

impl UniversalForm {
    pub fn zero(field: &Arc<FieldSpec>, degree: usize) -> Self {
        UniversalForm {
            field: field.clone(),
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// The form 1 * tuple, e.g. `from_tuple(&f, &[i])` is the algebra basis
    /// vector b_i as a degree-0 form.
    pub fn from_tuple(field: &Arc<FieldSpec>, tuple: &[u16]) -> Self {
        let mut form = UniversalForm::zero(field, tuple.len() - 1);
        form.add_term(tuple.to_vec(), Scalar::one(field));
        form
    }

    /// Degree-0 form from algebra coordinates.
    pub fn from_coords(field: &Arc<FieldSpec>, coords: &[Scalar]) -> Self {
        let mut form = UniversalForm::zero(field, 0);
        for (i, c) in coords.iter().enumerate() {
            form.add_term(vec![i as u16], c.clone());
        }
        form
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u16>, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, tuple: Vec<u16>, coeff: Scalar) {
        debug_assert_eq!(tuple.len(), self.degree + 1);
        debug_assert!(tuple[1..].iter().all(|&i| i >= 1), "Abar slots exclude the unit");
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(tuple) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().add(&coeff);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &UniversalForm) -> UniversalForm {
        assert_eq!(self.degree, other.degree);
        let mut out = self.clone();
        for (t, c) in &other.terms {
            out.add_term(t.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &UniversalForm) -> UniversalForm {
        assert_eq!(self.degree, other.degree);
        let mut out = self.clone();
        for (t, c) in &other.terms {
            out.add_term(t.clone(), c.neg());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> UniversalForm {
        let mut out = UniversalForm::zero(&self.field, self.degree);
        if c.is_zero() {
            return out;
        }
        for (t, x) in &self.terms {
            out.terms.insert(t.clone(), x.mul(c));
        }
        out
    }

    pub fn neg(&self) -> UniversalForm {
        let mut out = UniversalForm::zero(&self.field, self.degree);
        for (t, x) in &self.terms {
            out.terms.insert(t.clone(), x.neg());
        }
        out
    }

    /// The universal differential d(a0 (x) a1bar ... ) = 1 (x) a0bar (x) ...;
    /// tuples whose a0 is the unit die because 1bar = 0.
    pub fn d(&self) -> UniversalForm {
        let mut out = UniversalForm::zero(&self.field, self.degree + 1);
        for (t, c) in &self.terms {
            if t[0] == 0 {
                continue;
            }
            let mut tuple = Vec::with_capacity(t.len() + 1);
            tuple.push(0);
            tuple.extend_from_slice(t);
            out.add_term(tuple, c.clone());
        }
        out
    }

    /// Right product with the generator form d(b_j) = 1 (x) bbar_j, which
    /// just appends a slot (the graded-product correction terms vanish on a
    /// unit b0).
    pub fn append_slot(&self, j: u16) -> UniversalForm {
        debug_assert!(j >= 1);
        let mut out = UniversalForm::zero(&self.field, self.degree + 1);
        for (t, c) in &self.terms {
            let mut tuple = Vec::with_capacity(t.len() + 1);
            tuple.extend_from_slice(t);
            tuple.push(j);
            out.terms.insert(tuple, c.clone());
        }
        out
    }

    /// Graded product in the reduced universal algebra.
    ///
    /// For m >= 1 the product of a0 (x) a1bar ... ambar with
    /// b0 (x) b1bar ... bnbar is the alternating sum: fuse am with b0, fuse
    /// each interior pair (with sign), and finally multiply a0 a1 (with sign
    /// (-1)^m); fused interior slots are reduced modulo K.1.
    pub fn product(&self, other: &UniversalForm, algebra: &FiniteAlgebra) -> UniversalForm {
        let m = self.degree;
        let n = other.degree;
        let mut out = UniversalForm::zero(&self.field, m + n);
        for (ta, ca) in &self.terms {
            for (tb, cb) in &other.terms {
                let c = ca.mul(cb);
                if m == 0 {
                    // Left multiplication into b0.
                    for (k, sc) in algebra.basis_product_terms(ta[0] as usize, tb[0] as usize) {
                        let mut tuple = tb.clone();
                        tuple[0] = *k as u16;
                        out.add_term(tuple, c.mul(sc));
                    }
                    continue;
                }
                // Term 1: ... a_{m-1}bar (x) (a_m b0)bar (x) b1bar ...
                for (k, sc) in
                    algebra.basis_product_terms(ta[m] as usize, tb[0] as usize)
                {
                    if *k == 0 {
                        continue; // unit class vanishes in Abar
                    }
                    let mut tuple = Vec::with_capacity(m + n + 1);
                    tuple.extend_from_slice(&ta[..m]);
                    tuple.push(*k as u16);
                    tuple.extend_from_slice(&tb[1..]);
                    out.add_term(tuple, c.mul(sc));
                }
                // Interior terms i = 1..m-1: fuse slots a_{m-i}, a_{m-i+1};
                // b0 becomes a class slot and dies if it is the unit.
                if tb[0] != 0 {
                    for i in 1..m {
                        let sign = if i % 2 == 1 {
                            Scalar::from_integer(&self.field, -1)
                        } else {
                            Scalar::one(&self.field)
                        };
                        let lo = m - i;
                        for (k, sc) in algebra
                            .basis_product_terms(ta[lo] as usize, ta[lo + 1] as usize)
                        {
                            if *k == 0 {
                                continue;
                            }
                            let mut tuple = Vec::with_capacity(m + n + 1);
                            tuple.extend_from_slice(&ta[..lo]);
                            tuple.push(*k as u16);
                            tuple.extend_from_slice(&ta[lo + 2..]);
                            tuple.extend_from_slice(tb);
                            out.add_term(tuple, c.mul(sc).mul(&sign));
                        }
                    }
                    // Last term: (-1)^m (a0 a1) (x) a2bar ... (x) b0bar ...
                    let sign = if m % 2 == 1 {
                        Scalar::from_integer(&self.field, -1)
                    } else {
                        Scalar::one(&self.field)
                    };
                    for (k, sc) in
                        algebra.basis_product_terms(ta[0] as usize, ta[1] as usize)
                    {
                        let mut tuple = Vec::with_capacity(m + n + 1);
                        tuple.push(*k as u16);
                        tuple.extend_from_slice(&ta[2..]);
                        tuple.extend_from_slice(tb);
                        out.add_term(tuple, c.mul(sc).mul(&sign));
                    }
                }
            }
        }
        out
    }

    /// The representation pi(a0 (x) a1bar ... akbar) = rho(a0) [D, rho(a1)]
    /// ... [D, rho(ak)], extended linearly.
    pub fn pi(&self, t: &EvenTriple) -> ExactMatrix {
        let commutators: Vec<ExactMatrix> = (0..t.algebra().dim())
            .map(|i| t.dirac().commutator(t.rep().matrix(i)))
            .collect();
        self.pi_with(t, &commutators)
    }

    /// Like [`UniversalForm::pi`] with the commutators [D, rho(b_i)]
    /// precomputed by the caller.
    pub fn pi_with(&self, t: &EvenTriple, commutators: &[ExactMatrix]) -> ExactMatrix {
        let d = t.space_dim();
        let field = t.field();
        let mut out = ExactMatrix::zeros(field, d, d);
        for (tuple, c) in &self.terms {
            let mut m = t.rep().matrix(tuple[0] as usize).clone();
            for &slot in &tuple[1..] {
                m = m.mul(&commutators[slot as usize]);
            }
            out = out.add(&m.scale(c));
        }
        out
    }
}

impl LinearTag for UniversalForm {
    fn tag_scale(&mut self, c: &Scalar) {
        *self = self.scale(c);
    }

    fn tag_sub_scaled(&mut self, c: &Scalar, other: &Self) {
        if c.is_zero() {
            return;
        }
        *self = self.sub(&other.scale(c));
    }
}

impl fmt::Debug for UniversalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UniversalForm(deg {}, {} terms)", self.degree, self.terms.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn d_of_unit_is_zero_and_d_squared_vanishes() {
        let t = catalog::example("two_point").unwrap();
        let f = t.field();
        let unit = UniversalForm::from_tuple(f, &[0]);
        assert!(unit.d().is_zero());
        let b = UniversalForm::from_tuple(f, &[1]);
        let db = b.d();
        assert_eq!(db.degree(), 1);
        assert_eq!(db.terms().len(), 1);
        assert!(db.terms().contains_key(&vec![0, 1]));
        assert!(db.d().is_zero());
    }

    #[test]
    fn degree_zero_product_is_algebra_product() {
        let t = catalog::example("two_point").unwrap();
        let f = t.field();
        let alg = t.algebra();
        // f * f = f in the normalized basis [1, f].
        let b = UniversalForm::from_tuple(f, &[1]);
        let prod = b.product(&b, alg);
        assert_eq!(prod, b);
        // unit * omega = omega for a degree-1 form.
        let unit = UniversalForm::from_tuple(f, &[0]);
        let omega = UniversalForm::from_tuple(f, &[1, 1]);
        assert_eq!(unit.product(&omega, alg), omega);
    }

    #[test]
    fn pi_of_unit_is_identity() {
        let t = catalog::example("two_point").unwrap();
        let f = t.field();
        let unit = UniversalForm::from_tuple(f, &[0]);
        assert_eq!(unit.pi(&t), ExactMatrix::identity(f, 2));
        // pi(d 1) = 0.
        assert!(unit.d().pi(&t).is_zero());
    }

    #[test]
    fn pi_of_f_df_matches_hand_computation() {
        // two_point normalized basis [1, f]: rho(f) = diag(0,1),
        // [D, rho(f)] = [[0,1],[-1,0]], so rho(f)[D,rho(f)] = [[0,0],[-1,0]].
        let t = catalog::example("two_point").unwrap();
        let f = t.field();
        let form = UniversalForm::from_tuple(f, &[1, 1]);
        let expected = ExactMatrix::from_int_rows(f, &[&[0, 0], &[-1, 0]]);
        assert_eq!(form.pi(&t), expected);
    }

    #[test]
    fn append_slot_agrees_with_product_by_generator() {
        let t = catalog::example("g_m2_outer").unwrap();
        let f = t.field();
        let alg = t.algebra();
        let omega = UniversalForm::from_tuple(f, &[2, 3, 1]);
        let gen = UniversalForm::from_tuple(f, &[1]).d();
        assert_eq!(omega.append_slot(1), omega.product(&gen, alg));
    }
}
