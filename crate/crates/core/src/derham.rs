//! Exact de Rham machinery on flat tori T^d and the doubled complex.
//!
//! Forms carry trigonometric-polynomial coefficients: a term is a lattice
//! mode k in Z^d times dx^S for a sorted index set S. Exterior
//! differentiation multiplies by i k_j and inserts dx^j with the usual sign,
//! so every map here preserves the mode lattice; windowed cohomology solves
//! therefore decompose into one small exact block per mode.
//!
//! The doubled complex has degree-m term Omega^(m-1) + Omega^m + Omega^(m-1)
//! + Omega^m with the differential (w, x, wt, xt) |-> (d wt + (-1)^m (xt -
//! x), d xt, d w + (-1)^m (x - xt), d x); degree 0 is the pair diag(f, g)
//! mapping to (g - f, dg, f - g, df). Components above the top degree are
//! zero forms, which is what makes the complex stop at m = d.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{kernel_basis, ExactMatrix};
use crate::scalar::{FieldSpec, Scalar};

/// A differential form on T^d with finitely many Fourier modes.
#[derive(Clone, PartialEq)]
pub struct TrigForm {
    field: Arc<FieldSpec>,
    dims: usize,
    degree: usize,
    /// (mode k, sorted index set S) -> coefficient of e^(i<k,x>) dx^S.
    terms: BTreeMap<(Vec<i64>, Vec<u8>), Scalar>,
}

impl TrigForm {
    pub fn zero(field: &Arc<FieldSpec>, dims: usize, degree: usize) -> Self {
        TrigForm {
            field: field.clone(),
            dims,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(
        field: &Arc<FieldSpec>,
        dims: usize,
        mode: Vec<i64>,
        indices: Vec<u8>,
        coeff: Scalar,
    ) -> Self {
        let mut f = TrigForm::zero(field, dims, indices.len());
        f.add_term(mode, indices, coeff);
        f
    }

    pub fn one(field: &Arc<FieldSpec>, dims: usize) -> Self {
        TrigForm::monomial(field, dims, vec![0; dims], vec![], Scalar::one(field))
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<(Vec<i64>, Vec<u8>), Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, mode: Vec<i64>, indices: Vec<u8>, coeff: Scalar) {
        debug_assert_eq!(mode.len(), self.dims);
        debug_assert_eq!(indices.len(), self.degree);
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]), "indices sorted");
        debug_assert!(indices.iter().all(|&j| (j as usize) < self.dims));
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((mode, indices)) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                let s = e.get().add(&coeff);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &TrigForm) -> TrigForm {
        assert_eq!(self.degree, other.degree);
        assert_eq!(self.dims, other.dims);
        let mut out = self.clone();
        for ((k, s), c) in &other.terms {
            out.add_term(k.clone(), s.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &TrigForm) -> TrigForm {
        assert_eq!(self.degree, other.degree);
        let mut out = self.clone();
        for ((k, s), c) in &other.terms {
            out.add_term(k.clone(), s.clone(), c.neg());
        }
        out
    }

    pub fn neg(&self) -> TrigForm {
        let mut out = TrigForm::zero(&self.field, self.dims, self.degree);
        for ((k, s), c) in &self.terms {
            out.terms.insert((k.clone(), s.clone()), c.neg());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> TrigForm {
        let mut out = TrigForm::zero(&self.field, self.dims, self.degree);
        if c.is_zero() {
            return out;
        }
        for ((k, s), x) in &self.terms {
            let v = x.mul(c);
            if !v.is_zero() {
                out.terms.insert((k.clone(), s.clone()), v);
            }
        }
        out
    }

    /// Exterior derivative: (k, S) -> sum over j not in S of
    /// i k_j sign(j, S) (k, S + j). Top degree returns the zero form.
    pub fn d(&self) -> TrigForm {
        let mut out = TrigForm::zero(&self.field, self.dims, self.degree + 1);
        if self.degree >= self.dims {
            return out;
        }
        let i = Scalar::i(&self.field);
        for ((k, s), c) in &self.terms {
            for j in 0..self.dims as u8 {
                if s.contains(&j) {
                    continue;
                }
                let kj = k[j as usize];
                if kj == 0 {
                    continue;
                }
                let pos = s.iter().filter(|&&t| t < j).count();
                let sign = if pos % 2 == 1 { -1 } else { 1 };
                let mut s2 = s.clone();
                s2.insert(pos, j);
                let coeff = c
                    .mul(&i)
                    .mul(&Scalar::from_integer(&self.field, kj * sign));
                out.add_term(k.clone(), s2, coeff);
            }
        }
        out
    }

    /// Wedge product; degrees add, modes add, and overflowing the top degree
    /// is reported.
    pub fn wedge(&self, other: &TrigForm) -> Result<TrigForm> {
        assert_eq!(self.dims, other.dims);
        let degree = self.degree + other.degree;
        if degree > self.dims {
            return Err(Error::DegreeOverflow(degree, self.dims));
        }
        let mut out = TrigForm::zero(&self.field, self.dims, degree);
        for ((k1, s1), c1) in &self.terms {
            'terms: for ((k2, s2), c2) in &other.terms {
                // Shuffle sign: count inversions when merging s1 and s2.
                let mut inversions = 0usize;
                for &b in s2 {
                    if s1.contains(&b) {
                        continue 'terms;
                    }
                    inversions += s1.iter().filter(|&&a| a > b).count();
                }
                let mut merged: Vec<u8> = s1.iter().chain(s2.iter()).copied().collect();
                merged.sort_unstable();
                let mode: Vec<i64> = k1.iter().zip(k2).map(|(a, b)| a + b).collect();
                let mut coeff = c1.mul(c2);
                if inversions % 2 == 1 {
                    coeff = coeff.neg();
                }
                out.add_term(mode, merged, coeff);
            }
        }
        Ok(out)
    }

    /// Multiplication by a function (degree-0 form).
    pub fn mul_fn(&self, f: &TrigForm) -> TrigForm {
        assert_eq!(f.degree, 0);
        f.wedge(self).expect("degree unchanged")
    }

    pub fn within_window(&self, n: i64) -> bool {
        self.terms
            .keys()
            .all(|(k, _)| k.iter().all(|m| m.abs() <= n))
    }
}

impl fmt::Debug for TrigForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((k, s), c)| format!("({c}) e^{k:?} dx{s:?}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// An element of the doubled complex.
#[derive(Clone, PartialEq, Debug)]
pub enum DoubledForm {
    /// Degree 0: the function pair diag(f, g).
    Pair(TrigForm, TrigForm),
    /// Degree m >= 1: (w_(m-1), w_m, wt_(m-1), wt_m).
    Quad {
        m: usize,
        lo: TrigForm,
        hi: TrigForm,
        lo_t: TrigForm,
        hi_t: TrigForm,
    },
}

impl DoubledForm {
    pub fn degree(&self) -> usize {
        match self {
            DoubledForm::Pair(..) => 0,
            DoubledForm::Quad { m, .. } => *m,
        }
    }

    pub fn zero(field: &Arc<FieldSpec>, dims: usize, m: usize) -> DoubledForm {
        if m == 0 {
            DoubledForm::Pair(
                TrigForm::zero(field, dims, 0),
                TrigForm::zero(field, dims, 0),
            )
        } else {
            DoubledForm::Quad {
                m,
                lo: TrigForm::zero(field, dims, m - 1),
                hi: TrigForm::zero(field, dims, m),
                lo_t: TrigForm::zero(field, dims, m - 1),
                hi_t: TrigForm::zero(field, dims, m),
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            DoubledForm::Pair(f, g) => f.is_zero() && g.is_zero(),
            DoubledForm::Quad { lo, hi, lo_t, hi_t, .. } => {
                lo.is_zero() && hi.is_zero() && lo_t.is_zero() && hi_t.is_zero()
            }
        }
    }

    pub fn add(&self, other: &DoubledForm) -> DoubledForm {
        match (self, other) {
            (DoubledForm::Pair(f1, g1), DoubledForm::Pair(f2, g2)) => {
                DoubledForm::Pair(f1.add(f2), g1.add(g2))
            }
            (
                DoubledForm::Quad { m, lo, hi, lo_t, hi_t },
                DoubledForm::Quad { m: m2, lo: lo2, hi: hi2, lo_t: lo_t2, hi_t: hi_t2 },
            ) => {
                assert_eq!(m, m2);
                DoubledForm::Quad {
                    m: *m,
                    lo: lo.add(lo2),
                    hi: hi.add(hi2),
                    lo_t: lo_t.add(lo_t2),
                    hi_t: hi_t.add(hi_t2),
                }
            }
            _ => panic!("degree mismatch in DoubledForm::add"),
        }
    }

    pub fn sub(&self, other: &DoubledForm) -> DoubledForm {
        match (self, other) {
            (DoubledForm::Pair(f1, g1), DoubledForm::Pair(f2, g2)) => {
                DoubledForm::Pair(f1.sub(f2), g1.sub(g2))
            }
            (
                DoubledForm::Quad { m, lo, hi, lo_t, hi_t },
                DoubledForm::Quad { m: m2, lo: lo2, hi: hi2, lo_t: lo_t2, hi_t: hi_t2 },
            ) => {
                assert_eq!(m, m2);
                DoubledForm::Quad {
                    m: *m,
                    lo: lo.sub(lo2),
                    hi: hi.sub(hi2),
                    lo_t: lo_t.sub(lo_t2),
                    hi_t: hi_t.sub(hi_t2),
                }
            }
            _ => panic!("degree mismatch in DoubledForm::sub"),
        }
    }

    pub fn scale(&self, c: &Scalar) -> DoubledForm {
        match self {
            DoubledForm::Pair(f, g) => DoubledForm::Pair(f.scale(c), g.scale(c)),
            DoubledForm::Quad { m, lo, hi, lo_t, hi_t } => DoubledForm::Quad {
                m: *m,
                lo: lo.scale(c),
                hi: hi.scale(c),
                lo_t: lo_t.scale(c),
                hi_t: hi_t.scale(c),
            },
        }
    }
}

/// The doubled differential; errors when the source degree already exceeds
/// the manifold dimension (the complex vanishes beyond the top degree).
pub fn doubled_delta(q: &DoubledForm, dims: usize) -> Result<DoubledForm> {
    let m = q.degree();
    if m > dims {
        return Err(Error::ZeroTarget(m, dims));
    }
    Ok(match q {
        DoubledForm::Pair(f, g) => DoubledForm::Quad {
            m: 1,
            lo: g.sub(f),
            hi: g.d(),
            lo_t: f.sub(g),
            hi_t: f.d(),
        },
        DoubledForm::Quad { m, lo, hi, lo_t, hi_t } => {
            let sign_is_minus = m % 2 == 1;
            let diff = |x: &TrigForm, y: &TrigForm| {
                if sign_is_minus {
                    x.sub(y).neg()
                } else {
                    x.sub(y)
                }
            };
            DoubledForm::Quad {
                m: m + 1,
                lo: lo_t.d().add(&diff(hi_t, hi)),
                hi: hi_t.d(),
                lo_t: lo.d().add(&diff(hi, hi_t)),
                hi_t: hi.d(),
            }
        }
    })
}

/// Left action of diag(phi, psi) on the doubled complex.
pub fn bimodule_left(phi: &TrigForm, psi: &TrigForm, q: &DoubledForm) -> DoubledForm {
    match q {
        DoubledForm::Pair(f, g) => DoubledForm::Pair(f.mul_fn(phi), g.mul_fn(psi)),
        DoubledForm::Quad { m, lo, hi, lo_t, hi_t } => DoubledForm::Quad {
            m: *m,
            lo: lo.mul_fn(phi),
            hi: hi.mul_fn(phi),
            lo_t: lo_t.mul_fn(psi),
            hi_t: hi_t.mul_fn(psi),
        },
    }
}

/// Right action of diag(phi, psi): parity-split, with a d(phi) wedge
/// correction in the top slots.
pub fn bimodule_right(q: &DoubledForm, phi: &TrigForm, psi: &TrigForm) -> DoubledForm {
    match q {
        DoubledForm::Pair(f, g) => DoubledForm::Pair(f.mul_fn(phi), g.mul_fn(psi)),
        DoubledForm::Quad { m, lo, hi, lo_t, hi_t } => {
            if m % 2 == 0 {
                let corr = phi.d().wedge(lo).expect("degree fits");
                let corr_t = psi.d().wedge(lo_t).expect("degree fits");
                DoubledForm::Quad {
                    m: *m,
                    lo: lo.mul_fn(phi),
                    hi: hi.mul_fn(phi).sub(&corr),
                    lo_t: lo_t.mul_fn(psi),
                    hi_t: hi_t.mul_fn(psi).sub(&corr_t),
                }
            } else {
                let corr = psi.d().wedge(lo).expect("degree fits");
                let corr_t = phi.d().wedge(lo_t).expect("degree fits");
                DoubledForm::Quad {
                    m: *m,
                    lo: lo.mul_fn(psi),
                    hi: hi.mul_fn(psi).add(&corr),
                    lo_t: lo_t.mul_fn(phi),
                    hi_t: hi_t.mul_fn(phi).add(&corr_t),
                }
            }
        }
    }
}

/// Sorted index subsets of {0..dims} of the given size, lexicographic.
pub fn subsets(dims: usize, size: usize) -> Vec<Vec<u8>> {
    fn rec(start: u8, dims: u8, size: usize, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if size == 0 {
            out.push(prefix.clone());
            return;
        }
        for j in start..dims {
            prefix.push(j);
            rec(j + 1, dims, size - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if size <= dims {
        rec(0, dims as u8, size, &mut Vec::new(), &mut out);
    }
    out
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut out = 1usize;
    for i in 0..k {
        out = out * (n - i) / (i + 1);
    }
    out
}

/// Component layout of the degree-m doubled space at a fixed mode:
/// lo subsets, hi subsets, lo_t subsets, hi_t subsets (degree 0: f, g).
fn doubled_basis_dim(dims: usize, m: usize) -> usize {
    if m == 0 {
        2
    } else {
        2 * (binomial(dims, m - 1) + binomial(dims, m))
    }
}

/// Embeds one basis coefficient vector at a fixed mode into a DoubledForm.
fn doubled_from_coeffs(
    field: &Arc<FieldSpec>,
    dims: usize,
    m: usize,
    mode: &[i64],
    coeffs: &[Scalar],
) -> DoubledForm {
    if m == 0 {
        let mut f = TrigForm::zero(field, dims, 0);
        let mut g = TrigForm::zero(field, dims, 0);
        f.add_term(mode.to_vec(), vec![], coeffs[0].clone());
        g.add_term(mode.to_vec(), vec![], coeffs[1].clone());
        return DoubledForm::Pair(f, g);
    }
    let lo_sets = subsets(dims, m - 1);
    let hi_sets = subsets(dims, m);
    let mut parts = [
        TrigForm::zero(field, dims, m - 1),
        TrigForm::zero(field, dims, m),
        TrigForm::zero(field, dims, m - 1),
        TrigForm::zero(field, dims, m),
    ];
    let mut idx = 0;
    for (p, sets) in [(0, &lo_sets), (1, &hi_sets), (2, &lo_sets), (3, &hi_sets)] {
        for s in sets.iter() {
            parts[p].add_term(mode.to_vec(), s.clone(), coeffs[idx].clone());
            idx += 1;
        }
    }
    let [lo, hi, lo_t, hi_t] = parts;
    DoubledForm::Quad { m, lo, hi, lo_t, hi_t }
}

/// Reads the coefficient vector of a single-mode DoubledForm back out.
fn doubled_to_coeffs(field: &Arc<FieldSpec>, dims: usize, q: &DoubledForm, mode: &[i64]) -> Vec<Scalar> {
    match q {
        DoubledForm::Pair(f, g) => {
            let key = (mode.to_vec(), vec![]);
            vec![
                f.terms.get(&key).cloned().unwrap_or_else(|| Scalar::zero(field)),
                g.terms.get(&key).cloned().unwrap_or_else(|| Scalar::zero(field)),
            ]
        }
        DoubledForm::Quad { m, lo, hi, lo_t, hi_t } => {
            let lo_sets = subsets(dims, *m - 1);
            let hi_sets = subsets(dims, *m);
            let mut out = Vec::new();
            for (part, sets) in [(lo, &lo_sets), (hi, &hi_sets), (lo_t, &lo_sets), (hi_t, &hi_sets)]
            {
                for s in sets.iter() {
                    let key = (mode.to_vec(), s.clone());
                    out.push(
                        part.terms
                            .get(&key)
                            .cloned()
                            .unwrap_or_else(|| Scalar::zero(field)),
                    );
                }
            }
            out
        }
    }
}

/// One Psi/Phi verification record.
#[derive(Clone, Debug)]
pub struct PsiPhiCheck {
    pub degree: usize,
    pub cocycles_checked: usize,
    pub psi_phi_is_identity: bool,
    pub phi_psi_closes_via_witness: bool,
}

/// Windowed cohomology of the doubled complex plus the de Rham comparison
/// and the Psi/Phi verification.
#[derive(Clone, Debug)]
pub struct DerhamCohomology {
    pub dims: usize,
    pub window: u32,
    pub betti_doubled: Vec<usize>,
    pub betti_de_rham: Vec<usize>,
    pub checks: Vec<PsiPhiCheck>,
}

fn window_modes(dims: usize, n: i64) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..dims {
        let mut next = Vec::with_capacity(out.len() * (2 * n as usize + 1));
        for prefix in &out {
            for k in -n..=n {
                let mut p = prefix.clone();
                p.push(k);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Per-mode matrix of delta_m (or of the plain exterior derivative when
/// `plain`), columns indexed by the fixed component layout.
fn mode_matrix(
    field: &Arc<FieldSpec>,
    dims: usize,
    m: usize,
    mode: &[i64],
    plain: bool,
) -> ExactMatrix {
    if plain {
        let dom = subsets(dims, m);
        let cod = subsets(dims, m + 1);
        let mut mat = ExactMatrix::zeros(field, cod.len(), dom.len());
        for (c, s) in dom.iter().enumerate() {
            let x = TrigForm::monomial(field, dims, mode.to_vec(), s.clone(), Scalar::one(field));
            let dx = x.d();
            for (r, s2) in cod.iter().enumerate() {
                let key = (mode.to_vec(), s2.clone());
                if let Some(v) = dx.terms.get(&key) {
                    mat.set(r, c, v.clone());
                }
            }
        }
        return mat;
    }
    let dom = doubled_basis_dim(dims, m);
    let cod = doubled_basis_dim(dims, m + 1);
    let mut mat = ExactMatrix::zeros(field, cod, dom);
    for c in 0..dom {
        let mut coeffs = vec![Scalar::zero(field); dom];
        coeffs[c] = Scalar::one(field);
        let q = doubled_from_coeffs(field, dims, m, mode, &coeffs);
        let dq = doubled_delta(&q, dims).expect("degree in range");
        let out = doubled_to_coeffs(field, dims, &dq, mode);
        for (r, v) in out.into_iter().enumerate() {
            mat.set(r, c, v);
        }
    }
    mat
}

fn matrix_rank(m: &ExactMatrix) -> usize {
    let cols: Vec<Vec<Scalar>> = (0..m.ncols())
        .map(|j| (0..m.nrows()).map(|i| m.get(i, j).clone()).collect())
        .collect();
    crate::linalg::rref(&cols, m.nrows()).rank
}

/// Computes windowed Betti numbers of the doubled complex on T^dims through
/// degree `upto`, the plain de Rham Betti numbers, and verifies the
/// cohomology comparison maps on `cocycle_checks` random cocycles per degree.
pub fn doubled_cohomology(
    field: &Arc<FieldSpec>,
    dims: usize,
    window: u32,
    upto: usize,
    seed: u64,
    cocycle_checks: usize,
) -> Result<DerhamCohomology> {
    if upto > dims {
        return Err(Error::ZeroTarget(upto, dims));
    }
    let n = window as i64;
    if n < 1 {
        return Err(Error::Shape("window must be at least 1".into()));
    }
    let modes = window_modes(dims, n);

    // Ranks per degree, summed over modes.
    let mut rank_doubled = vec![0usize; dims + 1];
    let mut dim_doubled = vec![0usize; dims + 1];
    let mut rank_plain = vec![0usize; dims + 1];
    let mut dim_plain = vec![0usize; dims + 1];
    // Per-mode kernels for cocycle sampling, per degree.
    let mut kernels: Vec<Vec<(Vec<i64>, Vec<Vec<Scalar>>)>> = vec![Vec::new(); dims + 1];
    let mut kernels_plain: Vec<Vec<(Vec<i64>, Vec<Vec<Scalar>>)>> = vec![Vec::new(); dims + 1];

    for mode in &modes {
        for m in 0..=dims {
            let mat = mode_matrix(field, dims, m, mode, false);
            dim_doubled[m] += doubled_basis_dim(dims, m);
            rank_doubled[m] += matrix_rank(&mat);
            let kern = kernel_basis(&mat);
            if !kern.is_empty() {
                kernels[m].push((mode.clone(), kern));
            }
            let pmat = mode_matrix(field, dims, m, mode, true);
            dim_plain[m] += binomial(dims, m);
            rank_plain[m] += matrix_rank(&pmat);
            let pkern = kernel_basis(&pmat);
            if !pkern.is_empty() {
                kernels_plain[m].push((mode.clone(), pkern));
            }
        }
    }

    let mut betti_doubled = Vec::with_capacity(upto + 1);
    let mut betti_de_rham = Vec::with_capacity(dims + 1);
    for m in 0..=dims {
        let prev = if m == 0 { 0 } else { rank_doubled[m - 1] };
        if m <= upto {
            betti_doubled.push(dim_doubled[m] - rank_doubled[m] - prev);
        }
        let prev_p = if m == 0 { 0 } else { rank_plain[m - 1] };
        betti_de_rham.push(dim_plain[m] - rank_plain[m] - prev_p);
    }

    // Psi/Phi verification on random cocycles per degree 1..=upto.
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    let mut checks = Vec::new();
    for m in 1..=upto {
        let mut psi_phi_ok = true;
        let mut witness_ok = true;
        for _ in 0..cocycle_checks {
            // Random doubled cocycle at degree m.
            let zeta = random_kernel_element(field, dims, m, &kernels[m], &mut rng);
            debug_assert!(doubled_delta(&zeta, dims)?.is_zero());
            let (lo, hi, lo_t, hi_t) = match &zeta {
                DoubledForm::Quad { lo, hi, lo_t, hi_t, .. } => (lo, hi, lo_t, hi_t),
                DoubledForm::Pair(..) => unreachable!("degree >= 1"),
            };
            // Psi(zeta) = ([hi + hi_t], [lo + lo_t]); both must be closed.
            let v_m = hi.add(hi_t);
            let v_m1 = lo.add(lo_t);
            if !v_m.d().is_zero() || !v_m1.d().is_zero() {
                witness_ok = false;
                continue;
            }
            // Phi . Psi (zeta) - zeta must be the coboundary of the stated
            // witness.
            let half = Scalar::from_ratio(field, 1, 2);
            let phi_psi = DoubledForm::Quad {
                m,
                lo: v_m1.scale(&half),
                hi: v_m.scale(&half),
                lo_t: v_m1.scale(&half),
                hi_t: v_m.scale(&half),
            };
            let xi = phi_psi.sub(&zeta);
            let c = Scalar::from_ratio(field, if m % 2 == 0 { -1 } else { 1 }, 4);
            let w_lo = lo.sub(lo_t).scale(&c);
            let witness = if m == 1 {
                DoubledForm::Pair(w_lo.clone(), w_lo.neg())
            } else {
                DoubledForm::Quad {
                    m: m - 1,
                    lo: TrigForm::zero(field, dims, m - 2),
                    hi: w_lo.clone(),
                    lo_t: TrigForm::zero(field, dims, m - 2),
                    hi_t: w_lo.neg(),
                }
            };
            if !doubled_delta(&witness, dims)?.sub(&xi).is_zero() {
                witness_ok = false;
            }

            // Psi . Phi = id on random closed pairs (v_m, v_(m-1)).
            let vm = random_plain_cocycle(field, dims, m, &kernels_plain[m], &mut rng);
            let vm1 = random_plain_cocycle(field, dims, m - 1, &kernels_plain[m - 1], &mut rng);
            let phi = DoubledForm::Quad {
                m,
                lo: vm1.scale(&half),
                hi: vm.scale(&half),
                lo_t: vm1.scale(&half),
                hi_t: vm.scale(&half),
            };
            if !doubled_delta(&phi, dims)?.is_zero() {
                psi_phi_ok = false;
                continue;
            }
            let (plo, phi_hi, plo_t, phi_t) = match &phi {
                DoubledForm::Quad { lo, hi, lo_t, hi_t, .. } => (lo, hi, lo_t, hi_t),
                DoubledForm::Pair(..) => unreachable!(),
            };
            if phi_hi.add(phi_t) != vm || plo.add(plo_t) != vm1 {
                psi_phi_ok = false;
            }
        }
        checks.push(PsiPhiCheck {
            degree: m,
            cocycles_checked: cocycle_checks,
            psi_phi_is_identity: psi_phi_ok,
            phi_psi_closes_via_witness: witness_ok,
        });
    }

    Ok(DerhamCohomology {
        dims,
        window,
        betti_doubled,
        betti_de_rham,
        checks,
    })
}

fn random_small_scalar(field: &Arc<FieldSpec>, rng: &mut impl Rng) -> Scalar {
    let a = rng.gen_range(-3i64..=3);
    let b = rng.gen_range(-2i64..=2);
    Scalar::from_integer(field, a).add(&Scalar::i(field).scale(
        &num_rational::BigRational::from(num_bigint::BigInt::from(b)),
    ))
}

fn random_kernel_element(
    field: &Arc<FieldSpec>,
    dims: usize,
    m: usize,
    kernels: &[(Vec<i64>, Vec<Vec<Scalar>>)],
    rng: &mut impl Rng,
) -> DoubledForm {
    let mut out = DoubledForm::zero(field, dims, m);
    if kernels.is_empty() {
        return out;
    }
    for _ in 0..3 {
        let (mode, kern) = &kernels[rng.gen_range(0..kernels.len())];
        let v = &kern[rng.gen_range(0..kern.len())];
        let c = random_small_scalar(field, rng);
        let coeffs: Vec<Scalar> = v.iter().map(|x| x.mul(&c)).collect();
        out = out.add(&doubled_from_coeffs(field, dims, m, mode, &coeffs));
    }
    out
}

fn random_plain_cocycle(
    field: &Arc<FieldSpec>,
    dims: usize,
    m: usize,
    kernels: &[(Vec<i64>, Vec<Vec<Scalar>>)],
    rng: &mut impl Rng,
) -> TrigForm {
    let mut out = TrigForm::zero(field, dims, m);
    if kernels.is_empty() {
        return out;
    }
    let sets = subsets(dims, m);
    for _ in 0..3 {
        let (mode, kern) = &kernels[rng.gen_range(0..kernels.len())];
        let v = &kern[rng.gen_range(0..kern.len())];
        let c = random_small_scalar(field, rng);
        for (idx, s) in sets.iter().enumerate() {
            out.add_term(mode.clone(), s.clone(), v[idx].mul(&c));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f4() -> Arc<FieldSpec> {
        FieldSpec::new(4).unwrap()
    }

    #[test]
    fn exterior_derivative_basics() {
        let f = f4();
        // d(e^{i x1}) = i e^{i x1} dx1 on T^2.
        let e = TrigForm::monomial(&f, 2, vec![1, 0], vec![], Scalar::one(&f));
        let de = e.d();
        assert_eq!(de.terms().len(), 1);
        assert_eq!(
            de.terms().get(&(vec![1, 0], vec![0])).cloned().unwrap(),
            Scalar::i(&f)
        );
        // d of a constant vanishes, d^2 = 0.
        assert!(TrigForm::one(&f, 2).d().is_zero());
        let x = TrigForm::monomial(&f, 3, vec![1, -2, 1], vec![], Scalar::one(&f));
        assert!(x.d().d().is_zero());
        // Top degree clamps to the zero form.
        let top = TrigForm::monomial(&f, 2, vec![1, 1], vec![0, 1], Scalar::one(&f));
        assert!(top.d().is_zero());
    }

    #[test]
    fn wedge_antisymmetry_and_leibniz() {
        let f = f4();
        let dx0 = TrigForm::monomial(&f, 2, vec![0, 0], vec![0], Scalar::one(&f));
        let dx1 = TrigForm::monomial(&f, 2, vec![0, 0], vec![1], Scalar::one(&f));
        let w01 = dx0.wedge(&dx1).unwrap();
        let w10 = dx1.wedge(&dx0).unwrap();
        assert_eq!(w01, w10.neg());
        assert!(dx0.wedge(&dx0).unwrap().is_zero());
        // Leibniz on functions and forms.
        let a = TrigForm::monomial(&f, 2, vec![1, 0], vec![], Scalar::one(&f));
        let b = TrigForm::monomial(&f, 2, vec![0, 2], vec![1], Scalar::i(&f));
        let lhs = a.wedge(&b).unwrap().d();
        let rhs = a.d().wedge(&b).unwrap().add(&a.wedge(&b.d()).unwrap());
        assert_eq!(lhs, rhs);
        // Degree overflow is flagged.
        assert!(w01.wedge(&dx0).is_err());
    }

    #[test]
    fn doubled_delta_squares_to_zero() {
        let f = f4();
        let a = TrigForm::monomial(&f, 2, vec![1, 1], vec![], Scalar::one(&f));
        let b = TrigForm::monomial(&f, 2, vec![0, -1], vec![], Scalar::i(&f));
        let pair = DoubledForm::Pair(a.clone(), b.clone());
        let d0 = doubled_delta(&pair, 2).unwrap();
        let d1 = doubled_delta(&d0, 2).unwrap();
        assert!(d1.is_zero());
        // diag(f, g) -> (g - f, dg, f - g, df).
        match &d0 {
            DoubledForm::Quad { lo, hi, lo_t, hi_t, .. } => {
                assert_eq!(*lo, b.sub(&a));
                assert_eq!(*hi, b.d());
                assert_eq!(*lo_t, a.sub(&b));
                assert_eq!(*hi_t, a.d());
            }
            DoubledForm::Pair(..) => panic!("expected quad"),
        }
        // Beyond the top degree the complex is gone.
        let top = DoubledForm::zero(&f, 2, 3);
        assert!(matches!(doubled_delta(&top, 2), Err(Error::ZeroTarget(3, 2))));
    }

    #[test]
    fn bimodule_laws() {
        let f = f4();
        let dims = 2;
        let one = TrigForm::one(&f, dims);
        let phi = TrigForm::monomial(&f, dims, vec![1, 0], vec![], Scalar::one(&f))
            .add(&one);
        let psi = TrigForm::monomial(&f, dims, vec![0, 1], vec![], Scalar::i(&f));
        let phi2 = TrigForm::monomial(&f, dims, vec![-1, 1], vec![], Scalar::one(&f));
        let psi2 = one.clone();
        for m in 1..=dims {
            let q = DoubledForm::Quad {
                m,
                lo: TrigForm::monomial(&f, dims, vec![1, 1], subsets(dims, m - 1)[0].clone(), Scalar::one(&f)),
                hi: TrigForm::monomial(&f, dims, vec![0, 1], subsets(dims, m)[0].clone(), Scalar::i(&f)),
                lo_t: TrigForm::zero(&f, dims, m - 1),
                hi_t: TrigForm::monomial(&f, dims, vec![1, 0], subsets(dims, m)[0].clone(), Scalar::one(&f)),
            };
            // Left action by the identity pair.
            assert_eq!(bimodule_left(&one, &one, &q), q);
            // Right action by constants is scalar multiplication.
            let c = TrigForm::one(&f, dims).scale(&Scalar::from_ratio(&f, 3, 2));
            let r = bimodule_right(&q, &c, &c);
            assert_eq!(r, q.scale(&Scalar::from_ratio(&f, 3, 2)));
            // Module law: (q . F) . G = q . (F G) with diagonal products.
            let lhs = bimodule_right(&bimodule_right(&q, &phi, &psi), &phi2, &psi2);
            let prod_phi = phi.wedge(&phi2).unwrap();
            let prod_psi = psi.wedge(&psi2).unwrap();
            let rhs = bimodule_right(&q, &prod_phi, &prod_psi);
            assert_eq!(lhs, rhs, "right module law at degree {m}");
            // Left and right actions commute.
            let lr = bimodule_left(&phi, &psi, &bimodule_right(&q, &phi2, &psi2));
            let rl = bimodule_right(&bimodule_left(&phi, &psi, &q), &phi2, &psi2);
            assert_eq!(lr, rl, "left/right commute at degree {m}");
        }
    }

    #[test]
    fn windowed_cohomology_t1_t2() {
        let f = f4();
        let report = doubled_cohomology(&f, 1, 3, 1, 7, 5).unwrap();
        assert_eq!(report.betti_doubled, vec![1, 2]);
        assert_eq!(report.betti_de_rham, vec![1, 1]);
        let report = doubled_cohomology(&f, 2, 2, 2, 7, 5).unwrap();
        assert_eq!(report.betti_doubled, vec![1, 3, 3]);
        assert_eq!(report.betti_de_rham, vec![1, 2, 1]);
        for c in &report.checks {
            assert!(c.psi_phi_is_identity, "degree {}", c.degree);
            assert!(c.phi_psi_closes_via_witness, "degree {}", c.degree);
        }
    }

    #[test]
    fn windowed_cohomology_t3() {
        let f = f4();
        let report = doubled_cohomology(&f, 3, 1, 3, 11, 3).unwrap();
        assert_eq!(report.betti_doubled, vec![1, 4, 6, 4]);
        assert_eq!(report.betti_de_rham, vec![1, 3, 3, 1]);
        for c in &report.checks {
            assert!(c.psi_phi_is_identity && c.phi_psi_closes_via_witness);
        }
    }
}
