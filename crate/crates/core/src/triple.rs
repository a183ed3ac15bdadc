//! Finite-dimensional even algebraic spectral triples.
//!
//! A triple is an algebra given by structure constants, a representation by
//! exact matrices, an operator D and a grading gamma with gamma^2 = 1,
//! gamma D = -D gamma and [gamma, rho(A)] = 0. On construction the algebra
//! basis is changed so that the unit is the first basis vector; the remaining
//! vectors then descend to a basis of A/K.1, which is what the universal-form
//! machinery indexes.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{ExactMatrix, TaggedRref};
use crate::scalar::{FieldSpec, Scalar};

/// A unital associative algebra with a distinguished basis.
#[derive(Clone, Debug)]
pub struct FiniteAlgebra {
    field: Arc<FieldSpec>,
    dim: usize,
    labels: Vec<String>,
    /// b_i * b_j = sum_k sc[(i,j)][k] b_k, zero entries omitted.
    sc: BTreeMap<(usize, usize), Vec<(usize, Scalar)>>,
    /// Coordinates of the unit; e_0 once normalized.
    unit: Vec<Scalar>,
}

impl FiniteAlgebra {
    pub fn new(
        field: Arc<FieldSpec>,
        labels: Vec<String>,
        sc_entries: Vec<(usize, usize, usize, Scalar)>,
        unit: Vec<Scalar>,
    ) -> Result<Self> {
        let dim = labels.len();
        if unit.len() != dim {
            return Err(Error::Shape(format!(
                "unit vector length {} does not match dim {dim}",
                unit.len()
            )));
        }
        let mut sc: BTreeMap<(usize, usize), Vec<(usize, Scalar)>> = BTreeMap::new();
        for (i, j, k, c) in sc_entries {
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::Shape(format!(
                    "structure constant index ({i},{j},{k}) out of range for dim {dim}"
                )));
            }
            if c.is_zero() {
                continue;
            }
            sc.entry((i, j)).or_default().push((k, c));
        }
        for v in sc.values_mut() {
            v.sort_by_key(|(k, _)| *k);
        }
        Ok(FiniteAlgebra {
            field,
            dim,
            labels,
            sc,
            unit,
        })
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn unit(&self) -> &[Scalar] {
        &self.unit
    }

    pub fn unit_is_first_basis_vector(&self) -> bool {
        self.unit[0].is_one() && self.unit[1..].iter().all(Scalar::is_zero)
    }

    /// Coordinates of b_i * b_j.
    pub fn basis_product(&self, i: usize, j: usize) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(&self.field); self.dim];
        if let Some(terms) = self.sc.get(&(i, j)) {
            for (k, c) in terms {
                out[*k] = c.clone();
            }
        }
        out
    }

    /// Sparse product terms of b_i * b_j.
    pub fn basis_product_terms(&self, i: usize, j: usize) -> &[(usize, Scalar)] {
        self.sc.get(&(i, j)).map_or(&[], Vec::as_slice)
    }

    pub fn sc_entries(&self) -> Vec<(usize, usize, usize, Scalar)> {
        let mut out = Vec::new();
        for ((i, j), terms) in &self.sc {
            for (k, c) in terms {
                out.push((*i, *j, *k, c.clone()));
            }
        }
        out
    }

    /// Product of two coordinate vectors.
    pub fn mul_elements(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(&self.field); self.dim];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                if let Some(terms) = self.sc.get(&(i, j)) {
                    let c = xi.mul(yj);
                    for (k, ck) in terms {
                        out[*k] = out[*k].add(&c.mul(ck));
                    }
                }
            }
        }
        out
    }

    pub fn unit_vector(&self) -> Vec<Scalar> {
        self.unit.clone()
    }
}

/// Matrices of the representation, one per algebra basis vector.
#[derive(Clone, Debug)]
pub struct Representation {
    dim: usize,
    mats: Vec<ExactMatrix>,
}

impl Representation {
    pub fn new(mats: Vec<ExactMatrix>) -> Result<Self> {
        let dim = mats
            .first()
            .map(ExactMatrix::nrows)
            .ok_or_else(|| Error::Shape("representation needs at least one matrix".into()))?;
        for m in &mats {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::Shape(
                    "representation matrices must be square and equal-sized".into(),
                ));
            }
        }
        Ok(Representation { dim, mats })
    }

    pub fn space_dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self, i: usize) -> &ExactMatrix {
        &self.mats[i]
    }

    pub fn matrices(&self) -> &[ExactMatrix] {
        &self.mats
    }

    /// rho applied to a coordinate vector.
    pub fn apply(&self, x: &[Scalar]) -> ExactMatrix {
        let field = self.mats[0].field();
        let mut out = ExactMatrix::zeros(field, self.dim, self.dim);
        for (xi, m) in x.iter().zip(&self.mats) {
            if !xi.is_zero() {
                out = out.add(&m.scale(xi));
            }
        }
        out
    }
}

/// Preimage of gamma under the representation, when it exists.
#[derive(Clone, Debug, PartialEq)]
pub enum GammaPreimage {
    Present(Vec<Scalar>),
    Absent,
}

impl GammaPreimage {
    pub fn is_present(&self) -> bool {
        matches!(self, GammaPreimage::Present(_))
    }
}

/// One named exact check of [`validate_triple`].
#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failed_names(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.to_string())
            .collect()
    }

    fn push(&mut self, name: &'static str, pass: bool, detail: Option<String>) {
        self.checks.push(Check { name, pass, detail });
    }
}

/// An even algebraic spectral triple (A, V, D, gamma).
#[derive(Clone, Debug)]
pub struct EvenTriple {
    algebra: FiniteAlgebra,
    rep: Representation,
    dirac: ExactMatrix,
    gamma: ExactMatrix,
}

impl EvenTriple {
    /// Builds a triple, changing basis so the unit is the first basis vector.
    pub fn new(
        algebra: FiniteAlgebra,
        rep: Representation,
        dirac: ExactMatrix,
        gamma: ExactMatrix,
    ) -> Result<Self> {
        let d = rep.space_dim();
        if algebra.dim != rep.mats.len() {
            return Err(Error::Shape(format!(
                "algebra dim {} but {} representation matrices",
                algebra.dim,
                rep.mats.len()
            )));
        }
        if dirac.nrows() != d || dirac.ncols() != d || gamma.nrows() != d || gamma.ncols() != d {
            return Err(Error::Shape("D and gamma must be d x d".into()));
        }
        let (algebra, rep) = normalize_unit_first(algebra, rep)?;
        Ok(EvenTriple {
            algebra,
            rep,
            dirac,
            gamma,
        })
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.algebra
    }

    pub fn rep(&self) -> &Representation {
        &self.rep
    }

    pub fn dirac(&self) -> &ExactMatrix {
        &self.dirac
    }

    pub fn gamma(&self) -> &ExactMatrix {
        &self.gamma
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        self.algebra.field()
    }

    pub fn space_dim(&self) -> usize {
        self.rep.space_dim()
    }
}

/// Change of basis making the unit the first basis vector. The pivot slot is
/// the lowest index with a nonzero unit coordinate; remaining basis vectors
/// keep their order.
fn normalize_unit_first(
    algebra: FiniteAlgebra,
    rep: Representation,
) -> Result<(FiniteAlgebra, Representation)> {
    if algebra.unit_is_first_basis_vector() {
        return Ok((algebra, rep));
    }
    let n = algebra.dim;
    let field = algebra.field.clone();
    let pivot = algebra
        .unit
        .iter()
        .position(|c| !c.is_zero())
        .ok_or_else(|| Error::Shape("unit vector is zero".into()))?;

    // Rows of P = new basis vectors in old coordinates.
    let mut p_rows: Vec<Vec<Scalar>> = Vec::with_capacity(n);
    p_rows.push(algebra.unit.clone());
    let mut labels = vec!["1".to_string()];
    for j in 0..n {
        if j != pivot {
            let mut e = vec![Scalar::zero(&field); n];
            e[j] = Scalar::one(&field);
            p_rows.push(e);
            labels.push(algebra.labels[j].clone());
        }
    }

    // Invert P by reducing [P | I].
    let mut aug = TaggedRref::<()>::new(2 * n);
    for (r, row) in p_rows.iter().enumerate() {
        let mut a = row.clone();
        let mut rhs = vec![Scalar::zero(&field); n];
        rhs[r] = Scalar::one(&field);
        a.extend(rhs);
        aug.insert(a, ());
    }
    let left_pivots: Vec<usize> = aug.pivots().iter().copied().take_while(|&p| p < n).collect();
    if left_pivots.len() != n {
        return Err(Error::Shape("unit completion is not a basis".into()));
    }
    // Old e_j in new coordinates: row r of the inverse appears as the right
    // half of the rref row with pivot r.
    let p_inv_rows: Vec<Vec<Scalar>> =
        aug.rows().iter().map(|(row, _)| row[n..].to_vec()).collect();
    let old_to_new = |v: &[Scalar]| -> Vec<Scalar> {
        // old e_j = sum_c (P^-1)[j][c] new_c, extended linearly.
        let mut out = vec![Scalar::zero(&field); n];
        for (j, vj) in v.iter().enumerate() {
            if vj.is_zero() {
                continue;
            }
            for (c, entry) in p_inv_rows[j].iter().enumerate() {
                if !entry.is_zero() {
                    out[c] = out[c].add(&vj.mul(entry));
                }
            }
        }
        out
    };

    // Structure constants in the new basis.
    let mut entries = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let prod_old = algebra.mul_elements(&p_rows[a], &p_rows[b]);
            let prod_new = old_to_new(&prod_old);
            for (k, c) in prod_new.into_iter().enumerate() {
                if !c.is_zero() {
                    entries.push((a, b, k, c));
                }
            }
        }
    }
    let mut unit = vec![Scalar::zero(&field); n];
    unit[0] = Scalar::one(&field);
    let new_algebra = FiniteAlgebra::new(field, labels, entries, unit)?;
    let new_mats: Vec<ExactMatrix> = p_rows.iter().map(|row| rep.apply(row)).collect();
    Ok((new_algebra, Representation::new(new_mats)?))
}

/// Runs every exact structural check on the triple.
pub fn validate_triple(t: &EvenTriple) -> Result<ValidationReport> {
    let alg = &t.algebra;
    let rep = &t.rep;
    let n = alg.dim;
    let field = alg.field();
    let mut report = ValidationReport::default();

    report.push(
        "unit_is_first_basis_vector",
        alg.unit_is_first_basis_vector(),
        None,
    );

    // Unit laws 1 * b = b * 1 = b.
    let mut unit_ok = true;
    let mut unit_detail = None;
    for i in 0..n {
        let mut e = vec![Scalar::zero(field); n];
        e[i] = Scalar::one(field);
        let left = alg.mul_elements(&alg.unit, &e);
        let right = alg.mul_elements(&e, &alg.unit);
        if left != e || right != e {
            unit_ok = false;
            unit_detail = Some(format!("unit law fails on basis vector {i}"));
            break;
        }
    }
    report.push("unit_law", unit_ok, unit_detail);

    // Associativity on all basis triples.
    let mut assoc_ok = true;
    let mut assoc_detail = None;
    'outer: for i in 0..n {
        let mut e_i = vec![Scalar::zero(field); n];
        e_i[i] = Scalar::one(field);
        for j in 0..n {
            let ij = alg.basis_product(i, j);
            for k in 0..n {
                let mut e_k = vec![Scalar::zero(field); n];
                e_k[k] = Scalar::one(field);
                let jk = alg.basis_product(j, k);
                let lhs = alg.mul_elements(&ij, &e_k);
                let rhs = alg.mul_elements(&e_i, &jk);
                if lhs != rhs {
                    assoc_ok = false;
                    assoc_detail = Some(format!("(b{i} b{j}) b{k} != b{i} (b{j} b{k})"));
                    break 'outer;
                }
            }
        }
    }
    report.push("associativity", assoc_ok, assoc_detail);

    // rho is an algebra homomorphism.
    let mut hom_ok = true;
    let mut hom_detail = None;
    'hom: for i in 0..n {
        for j in 0..n {
            let lhs = rep.matrix(i).mul(rep.matrix(j));
            let rhs = rep.apply(&alg.basis_product(i, j));
            if lhs != rhs {
                hom_ok = false;
                hom_detail = Some(format!("rho(b{i}) rho(b{j}) != rho(b{i} b{j})"));
                break 'hom;
            }
        }
    }
    report.push("representation_homomorphism", hom_ok, hom_detail);

    // rho(1) = identity.
    let id = ExactMatrix::identity(field, rep.space_dim());
    report.push("unit_acts_as_identity", rep.apply(&alg.unit) == id, None);

    // gamma^2 = 1.
    report.push("gamma_squared", t.gamma.mul(&t.gamma) == id, None);

    // gamma commutes with the algebra.
    let mut comm_ok = true;
    let mut comm_detail = None;
    for i in 0..n {
        if !t.gamma.commutator(rep.matrix(i)).is_zero() {
            comm_ok = false;
            comm_detail = Some(format!("[gamma, rho(b{i})] != 0"));
            break;
        }
    }
    report.push("gamma_commutes_with_algebra", comm_ok, comm_detail);

    // gamma D + D gamma = 0.
    let anti = t.gamma.mul(&t.dirac).add(&t.dirac.mul(&t.gamma));
    report.push("anticommutation", anti.is_zero(), None);

    Ok(report)
}

/// Product triple (A1 (x) A2, V1 (x) V2, D1 (x) 1 + gamma1 (x) D2,
/// gamma1 (x) gamma2).
pub fn tensor_triples(t1: &EvenTriple, t2: &EvenTriple) -> Result<EvenTriple> {
    let f1 = t1.field();
    let f2 = t2.field();
    if f1 != f2 {
        return Err(Error::FieldMismatch(f1.order(), f2.order()));
    }
    let n1 = t1.algebra.dim;
    let n2 = t2.algebra.dim;
    let field = f1.clone();

    let mut labels = Vec::with_capacity(n1 * n2);
    for l1 in t1.algebra.labels() {
        for l2 in t2.algebra.labels() {
            labels.push(format!("{l1}(x){l2}"));
        }
    }
    let mut entries = Vec::new();
    for ((i1, j1), terms1) in &t1.algebra.sc {
        for ((i2, j2), terms2) in &t2.algebra.sc {
            for (k1, c1) in terms1 {
                for (k2, c2) in terms2 {
                    entries.push((i1 * n2 + i2, j1 * n2 + j2, k1 * n2 + k2, c1.mul(c2)));
                }
            }
        }
    }
    let mut unit = vec![Scalar::zero(&field); n1 * n2];
    for (a, ua) in t1.algebra.unit.iter().enumerate() {
        for (b, ub) in t2.algebra.unit.iter().enumerate() {
            unit[a * n2 + b] = ua.mul(ub);
        }
    }
    let algebra = FiniteAlgebra::new(field.clone(), labels, entries, unit)?;

    let mut mats = Vec::with_capacity(n1 * n2);
    for m1 in t1.rep.matrices() {
        for m2 in t2.rep.matrices() {
            mats.push(m1.kron(m2));
        }
    }
    let rep = Representation::new(mats)?;

    let id2 = ExactMatrix::identity(&field, t2.space_dim());
    let dirac = t1.dirac.kron(&id2).add(&t1.gamma.kron(&t2.dirac));
    let gamma = t1.gamma.kron(&t2.gamma);
    EvenTriple::new(algebra, rep, dirac, gamma)
}

/// The G functor: doubles the algebra with the star product
/// (a,b)(a',b') = (aa'+bb', ab'+ba') and represents (a,b) by
/// rho(a) + gamma rho(b), which puts gamma into the image.
pub fn gammafy(t: &EvenTriple) -> Result<EvenTriple> {
    let n = t.algebra.dim;
    let field = t.field().clone();
    let mut labels = Vec::with_capacity(2 * n);
    for l in t.algebra.labels() {
        labels.push(l.clone());
    }
    for l in t.algebra.labels() {
        labels.push(format!("{l}~g"));
    }
    // Basis: u_i = (b_i, 0) for i < n, v_i = (0, b_i) for i >= n.
    // u_i u_j = (b_i b_j, 0), u_i v_j = v_i u_j = (0, b_i b_j),
    // v_i v_j = (b_i b_j, 0).
    let mut entries = Vec::new();
    for ((i, j), terms) in &t.algebra.sc {
        for (k, c) in terms {
            entries.push((*i, *j, *k, c.clone()));
            entries.push((*i, j + n, k + n, c.clone()));
            entries.push((i + n, *j, k + n, c.clone()));
            entries.push((i + n, j + n, *k, c.clone()));
        }
    }
    let mut unit = vec![Scalar::zero(&field); 2 * n];
    unit[0] = Scalar::one(&field);
    debug_assert!(t.algebra.unit_is_first_basis_vector());
    let algebra = FiniteAlgebra::new(field, labels, entries, unit)?;

    let mut mats = Vec::with_capacity(2 * n);
    for m in t.rep.matrices() {
        mats.push(m.clone());
    }
    for m in t.rep.matrices() {
        mats.push(t.gamma.mul(m));
    }
    let rep = Representation::new(mats)?;
    EvenTriple::new(algebra, rep, t.dirac.clone(), t.gamma.clone())
}

/// Forward/backward coordinate maps of the isomorphism
/// (a,b) |-> (a+b, a-b) from the star-doubled algebra onto the coordinatewise
/// direct sum A (+) A. Errors unless the input has the doubled shape.
pub fn star_to_direct_sum_iso(doubled: &FiniteAlgebra) -> Result<(ExactMatrix, ExactMatrix)> {
    let two_n = doubled.dim;
    if two_n % 2 != 0 {
        return Err(Error::Shape("doubled algebra must have even dimension".into()));
    }
    let n = two_n / 2;
    let field = doubled.field().clone();
    // Check the doubled block pattern of the structure constants: products of
    // same-copy vectors land in the first copy, mixed products in the second.
    for ((i, j), terms) in &doubled.sc {
        let same_copy = (*i < n) == (*j < n);
        for (k, _) in terms {
            let in_first = *k < n;
            if same_copy != in_first {
                return Err(Error::Shape(
                    "structure constants do not have the star-doubled shape".into(),
                ));
            }
        }
    }
    let one = Scalar::one(&field);
    let half = Scalar::from_ratio(&field, 1, 2);
    let mut forward = ExactMatrix::zeros(&field, two_n, two_n);
    let mut backward = ExactMatrix::zeros(&field, two_n, two_n);
    for i in 0..n {
        // u_i = (b_i, 0) |-> (b_i, b_i); v_i = (0, b_i) |-> (b_i, -b_i)
        forward.set(i, i, one.clone());
        forward.set(i, n + i, one.clone());
        forward.set(n + i, i, one.clone());
        forward.set(n + i, n + i, one.neg());
        // (x, y) |-> ((x+y)/2, (x-y)/2)
        backward.set(i, i, half.clone());
        backward.set(i, n + i, half.clone());
        backward.set(n + i, i, half.clone());
        backward.set(n + i, n + i, half.neg());
    }
    Ok((forward, backward))
}

/// Coordinatewise product in the direct-sum picture A (+) A, components
/// multiplied with the original algebra read off the doubled one.
pub fn direct_sum_product(doubled: &FiniteAlgebra, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
    let n = doubled.dim / 2;
    let field = doubled.field();
    let mut out = vec![Scalar::zero(field); 2 * n];
    for i in 0..n {
        for j in 0..n {
            if let Some(terms) = doubled.sc.get(&(i, j)) {
                let cx = x[i].mul(&y[j]);
                let cy = x[n + i].mul(&y[n + j]);
                for (k, c) in terms {
                    out[*k] = out[*k].add(&cx.mul(c));
                    out[n + *k] = out[n + *k].add(&cy.mul(c));
                }
            }
        }
    }
    out
}

/// Solves rho(eta) = gamma exactly; the rref-canonical solution is returned
/// when gamma has several preimages.
pub fn gamma_in_image(t: &EvenTriple) -> GammaPreimage {
    let n = t.algebra.dim;
    let d = t.space_dim();
    let field = t.field();
    // Augmented system: one row per matrix entry, columns = basis + rhs.
    let mut rows = Vec::with_capacity(d * d);
    for r in 0..d {
        for c in 0..d {
            let mut row = Vec::with_capacity(n + 1);
            for i in 0..n {
                row.push(t.rep.matrix(i).get(r, c).clone());
            }
            row.push(t.gamma.get(r, c).clone());
            rows.push(row);
        }
    }
    let red = crate::linalg::rref(&rows, n + 1);
    // Inconsistent iff some pivot sits in the rhs column.
    if red.pivots.contains(&n) {
        return GammaPreimage::Absent;
    }
    // Particular solution with free variables set to zero.
    let mut eta = vec![Scalar::zero(field); n];
    for (row, &p) in red.basis.iter().zip(&red.pivots) {
        eta[p] = row[n].clone();
    }
    debug_assert_eq!(t.rep.apply(&eta), t.gamma.clone());
    GammaPreimage::Present(eta)
}
