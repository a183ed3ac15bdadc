//! Exact arithmetic in the cyclotomic-rational field Q(zeta_L).
//!
//! Elements are residues modulo the L-th cyclotomic polynomial with
//! arbitrary-precision rational coefficients, so equality and zero tests are
//! exact. The order L is always a multiple of 4, which guarantees that
//! `i = zeta_L^(L/4)` lives in the field.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Euler totient by trial-division factorization; L stays tiny here.
fn totient(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Coefficients of the L-th cyclotomic polynomial (index = degree, monic).
///
/// Computed by exact division: Phi_L = (x^L - 1) / prod_{d | L, d < L} Phi_d.
fn cyclotomic(l: u64) -> Vec<BigInt> {
    if l == 1 {
        // x - 1
        return vec![BigInt::from(-1), BigInt::one()];
    }
    let mut numer = vec![BigInt::zero(); l as usize + 1];
    numer[0] = BigInt::from(-1);
    numer[l as usize] = BigInt::one();
    for d in 1..l {
        if l % d == 0 {
            numer = poly_div_exact(&numer, &cyclotomic(d));
        }
    }
    numer
}

/// Exact division of integer polynomials, panics on a nonzero remainder.
fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem: Vec<BigInt> = num.to_vec();
    let dd = den.len() - 1;
    assert!(den[dd].is_one(), "divisor must be monic");
    let mut quot = vec![BigInt::zero(); rem.len() - dd];
    for i in (dd..rem.len()).rev() {
        let c = rem[i].clone();
        if c.is_zero() {
            continue;
        }
        quot[i - dd] = c.clone();
        for (j, dj) in den.iter().enumerate() {
            let idx = i - dd + j;
            rem[idx] = &rem[idx] - &c * dj;
        }
    }
    assert!(rem.iter().all(Zero::is_zero), "non-exact polynomial division");
    quot
}

/// The scalar field Q(zeta_L): order, reduction polynomial and cached data.
#[derive(Debug)]
pub struct FieldSpec {
    order: u64,
    degree: usize,
    /// Monic cyclotomic polynomial Phi_L, index = degree.
    reduction: Vec<BigInt>,
    /// zeta^m reduced modulo Phi_L, for m in 0..L.
    zeta_powers: Vec<Vec<BigRational>>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order
    }
}
impl Eq for FieldSpec {}

impl FieldSpec {
    /// Builds Q(zeta_L). Requires L >= 4 and 4 | L so that i is in the field.
    pub fn new(order: u64) -> Result<Arc<Self>> {
        if order < 4 || order % 4 != 0 {
            return Err(Error::InvalidFieldOrder(order));
        }
        let reduction = cyclotomic(order);
        let degree = reduction.len() - 1;
        debug_assert_eq!(degree as u64, totient(order));

        // Reduce zeta^m for every m < L once; conj and roots of unity read
        // from this table.
        let mut zeta_powers = Vec::with_capacity(order as usize);
        for m in 0..order as usize {
            let mut poly = vec![BigRational::zero(); m + 1];
            poly[m] = BigRational::one();
            zeta_powers.push(reduce_mod(poly, &reduction, degree));
        }
        Ok(Arc::new(FieldSpec {
            order,
            degree,
            reduction,
            zeta_powers,
        }))
    }

    /// Smallest valid field containing both i and zeta_q: L = lcm(4, q).
    pub fn containing_root(q: u64) -> Result<Arc<Self>> {
        let q = q.max(1);
        let l = num_integer::lcm(4, q);
        Self::new(l)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Degree of the extension, phi(L).
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn reduction_polynomial(&self) -> &[BigInt] {
        &self.reduction
    }
}

/// Reduce a rational polynomial modulo the monic `reduction` polynomial and
/// pad/truncate to `degree` coefficients.
fn reduce_mod(mut poly: Vec<BigRational>, reduction: &[BigInt], degree: usize) -> Vec<BigRational> {
    for i in (degree..poly.len()).rev() {
        let c = std::mem::replace(&mut poly[i], BigRational::zero());
        if c.is_zero() {
            continue;
        }
        for (j, rj) in reduction.iter().enumerate().take(degree) {
            let idx = i - degree + j;
            let delta = &c * BigRational::from(rj.clone());
            poly[idx] -= delta;
        }
    }
    poly.truncate(degree);
    poly.resize(degree, BigRational::zero());
    poly
}

/// An element of Q(zeta_L) in canonical form (degree < phi(L)).
#[derive(Clone, PartialEq, Eq)]
pub struct Scalar {
    field: Arc<FieldSpec>,
    coeffs: Vec<BigRational>,
}

impl Scalar {
    pub fn zero(field: &Arc<FieldSpec>) -> Self {
        Scalar {
            field: field.clone(),
            coeffs: vec![BigRational::zero(); field.degree],
        }
    }

    pub fn one(field: &Arc<FieldSpec>) -> Self {
        Scalar::from_integer(field, 1)
    }

    pub fn from_integer(field: &Arc<FieldSpec>, n: i64) -> Self {
        let mut s = Scalar::zero(field);
        s.coeffs[0] = BigRational::from(BigInt::from(n));
        s
    }

    pub fn from_ratio(field: &Arc<FieldSpec>, num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let mut s = Scalar::zero(field);
        s.coeffs[0] = BigRational::new(BigInt::from(num), BigInt::from(den));
        s
    }

    pub fn from_rational(field: &Arc<FieldSpec>, r: BigRational) -> Self {
        let mut s = Scalar::zero(field);
        s.coeffs[0] = r;
        s
    }

    /// zeta_L^k for any integer k (negative exponents wrap around).
    pub fn zeta_pow(field: &Arc<FieldSpec>, k: i64) -> Self {
        let l = field.order as i64;
        let m = k.rem_euclid(l) as usize;
        Scalar {
            field: field.clone(),
            coeffs: field.zeta_powers[m].clone(),
        }
    }

    /// The imaginary unit i = zeta_L^(L/4).
    pub fn i(field: &Arc<FieldSpec>) -> Self {
        Scalar::zeta_pow(field, field.order as i64 / 4)
    }

    /// zeta_q^p, requires q | L.
    pub fn root_of_unity(field: &Arc<FieldSpec>, q: u64, p: i64) -> Result<Self> {
        if q == 0 || field.order % q != 0 {
            return Err(Error::Shape(format!(
                "root order {q} does not divide the field order {}",
                field.order
            )));
        }
        Ok(Scalar::zeta_pow(field, (field.order / q) as i64 * p))
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    pub fn same_field(&self, other: &Scalar) -> bool {
        Arc::ptr_eq(&self.field, &other.field) || self.field == other.field
    }

    fn assert_same_field(&self, other: &Scalar) {
        assert!(
            self.same_field(other),
            "scalar field mismatch: Q(zeta_{}) vs Q(zeta_{})",
            self.field.order,
            other.field.order
        );
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        self.assert_same_field(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Scalar {
            field: self.field.clone(),
            coeffs,
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.assert_same_field(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Scalar {
            field: self.field.clone(),
            coeffs,
        }
    }

    pub fn neg(&self) -> Scalar {
        Scalar {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        self.assert_same_field(other);
        let deg = self.field.degree;
        let mut prod = vec![BigRational::zero(); 2 * deg - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                prod[i + j] += a * b;
            }
        }
        Scalar {
            field: self.field.clone(),
            coeffs: reduce_mod(prod, &self.field.reduction, deg),
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in Q[x];
    /// Phi_L is irreducible so every nonzero residue is invertible.
    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let deg = self.field.degree;
        let modulus: Vec<BigRational> = self
            .field
            .reduction
            .iter()
            .map(|c| BigRational::from(c.clone()))
            .collect();

        // Invariants: r0 = s0 * self (mod Phi), r1 = s1 * self (mod Phi).
        let mut r0 = modulus;
        let mut r1 = trim(self.coeffs.clone());
        let mut s0: Vec<BigRational> = vec![];
        let mut s1 = vec![BigRational::one()];
        while r1.len() > 1 {
            let (q, r) = poly_divmod(&r0, &r1);
            let s = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = r1;
            r1 = trim(r);
            s0 = s1;
            s1 = s;
        }
        assert!(
            r1.len() == 1,
            "cyclotomic polynomial must be irreducible over Q"
        );
        let c = r1[0].clone();
        let inv_coeffs: Vec<BigRational> = s1.iter().map(|x| x / &c).collect();
        Ok(Scalar {
            field: self.field.clone(),
            coeffs: reduce_mod(inv_coeffs, &self.field.reduction, deg),
        })
    }

    /// Complex conjugation, the automorphism zeta |-> zeta^(L-1) = zeta^(-1).
    pub fn conj(&self) -> Scalar {
        let l = self.field.order as i64;
        let mut out = Scalar::zero(&self.field);
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let pow = Scalar::zeta_pow(&self.field, -(k as i64) % l);
            for (idx, p) in pow.coeffs.iter().enumerate() {
                if !p.is_zero() {
                    out.coeffs[idx] += c * p;
                }
            }
        }
        out
    }

    pub fn scale(&self, r: &BigRational) -> Scalar {
        Scalar {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Parses the scalar literal grammar: a rational `p/q` or a sum
    /// `c0 + c1*z^1 + ...` where `z` denotes zeta_L. Whitespace-insensitive.
    pub fn parse(field: &Arc<FieldSpec>, input: &str) -> Result<Scalar> {
        let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse {
                line: None,
                msg: "empty scalar literal".into(),
            });
        }
        let mut out = Scalar::zero(field);
        let mut rest = compact.as_str();
        let mut sign = 1i64;
        // Leading sign.
        if let Some(r) = rest.strip_prefix('-') {
            sign = -1;
            rest = r;
        } else if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        }
        loop {
            // Split off one term: up to the next top-level '+' or '-' that is
            // not part of an exponent/coefficient (no unary signs occur after
            // the first character of a term except following '+'/'-'). Since
            // terms never contain '+' and '-' only as a leading sign, scan
            // from index 1.
            let mut split = rest.len();
            for (idx, ch) in rest.char_indices().skip(1) {
                if ch == '+' || ch == '-' {
                    split = idx;
                    break;
                }
            }
            let term = &rest[..split];
            parse_term(field, term, sign, &mut out)?;
            if split == rest.len() {
                break;
            }
            let sep = rest.as_bytes()[split];
            sign = if sep == b'-' { -1 } else { 1 };
            rest = &rest[split + 1..];
            // Allow `+ -3*z^1` style: a sign immediately after the separator.
            if let Some(r) = rest.strip_prefix('-') {
                sign = -sign;
                rest = r;
            } else if let Some(r) = rest.strip_prefix('+') {
                rest = r;
            }
            if rest.is_empty() {
                return Err(Error::Parse {
                    line: None,
                    msg: "dangling sign in scalar literal".into(),
                });
            }
        }
        Ok(out)
    }
}

fn parse_term(field: &Arc<FieldSpec>, term: &str, sign: i64, out: &mut Scalar) -> Result<()> {
    let bad = |msg: String| Error::Parse { line: None, msg };
    if term.is_empty() {
        return Err(bad("empty term in scalar literal".into()));
    }
    let (coeff_str, zexp) = if let Some(star) = term.find('*') {
        let (c, z) = term.split_at(star);
        (c, Some(&z[1..]))
    } else if term.starts_with('z') {
        ("1", Some(term))
    } else {
        (term, None)
    };
    let exp: i64 = match zexp {
        None => 0,
        Some(z) => {
            if z == "z" {
                1
            } else if let Some(e) = z.strip_prefix("z^") {
                e.parse()
                    .map_err(|_| bad(format!("invalid exponent `{z}`")))?
            } else {
                return Err(bad(format!("expected power of z, found `{z}`")));
            }
        }
    };
    let rat = parse_rational(coeff_str).ok_or_else(|| bad(format!("invalid coefficient `{coeff_str}`")))?;
    let rat = rat * BigRational::from(BigInt::from(sign));
    let term_scalar = Scalar::zeta_pow(field, exp).scale(&rat);
    *out = out.add(&term_scalar);
    Ok(())
}

fn parse_rational(s: &str) -> Option<BigRational> {
    if let Some(slash) = s.find('/') {
        let num: BigInt = s[..slash].parse().ok()?;
        let den: BigInt = s[slash + 1..].parse().ok()?;
        if den.is_zero() {
            return None;
        }
        Some(BigRational::new(num, den))
    } else {
        let num: BigInt = s.parse().ok()?;
        Some(BigRational::from(num))
    }
}

fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    /// Canonical printing per the literal grammar; round-trips through
    /// [`Scalar::parse`] exactly.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if k == 0 {
                terms.push(format_rational(c));
            } else {
                terms.push(format!("{}*z^{}", format_rational(c), k));
            }
        }
        if terms.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", terms.join(" + "))
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

// Small dense polynomial helpers over Q used by `inv`.

fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while let Some(last) = p.last() {
        if last.is_zero() {
            p.pop();
        } else {
            break;
        }
    }
    p
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(out)
}

fn poly_divmod(num: &[BigRational], den: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let den = trim(den.to_vec());
    assert!(!den.is_empty(), "division by the zero polynomial");
    let mut rem = trim(num.to_vec());
    let dd = den.len() - 1;
    if rem.len() <= dd {
        return (vec![], rem);
    }
    let lead = den[dd].clone();
    let mut quot = vec![BigRational::zero(); rem.len() - dd];
    for i in (dd..rem.len()).rev() {
        let c = &rem[i] / &lead;
        if c.is_zero() {
            continue;
        }
        quot[i - dd] = c.clone();
        for (j, dj) in den.iter().enumerate() {
            let delta = &c * dj;
            rem[i - dd + j] -= delta;
        }
    }
    (trim(quot), trim(rem))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f4() -> Arc<FieldSpec> {
        FieldSpec::new(4).unwrap()
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic(4), vec![BigInt::from(1), BigInt::from(0), BigInt::from(1)]);
        // Phi_12 = x^4 - x^2 + 1
        assert_eq!(
            cyclotomic(12),
            [1, 0, -1, 0, 1].iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>()
        );
        assert_eq!(totient(12), 4);
        assert_eq!(totient(20), 8);
    }

    #[test]
    fn i_squared_is_minus_one() {
        let f = f4();
        let i = Scalar::i(&f);
        assert_eq!(i.mul(&i), Scalar::from_integer(&f, -1));
    }

    #[test]
    fn inverse_of_one_plus_i() {
        // (1+i)^-1 = (1-i)/2
        let f = f4();
        let x = Scalar::one(&f).add(&Scalar::i(&f));
        let expected = Scalar::one(&f).sub(&Scalar::i(&f)).scale(&BigRational::new(
            BigInt::from(1),
            BigInt::from(2),
        ));
        assert_eq!(x.inv().unwrap(), expected);
        assert!(Scalar::zero(&f).inv().is_err());
    }

    #[test]
    fn zeta12_cubed_squared_is_minus_one() {
        let f = FieldSpec::new(12).unwrap();
        let z3 = Scalar::zeta_pow(&f, 3);
        assert_eq!(z3.mul(&z3), Scalar::from_integer(&f, -1));
    }

    #[test]
    fn conj_is_field_automorphism() {
        let f = FieldSpec::new(12).unwrap();
        let x = Scalar::zeta_pow(&f, 1).add(&Scalar::from_ratio(&f, 3, 2));
        let y = Scalar::zeta_pow(&f, 5).sub(&Scalar::i(&f));
        assert_eq!(x.mul(&y).conj(), x.conj().mul(&y.conj()));
        assert_eq!(x.add(&y).conj(), x.conj().add(&y.conj()));
        // conj(i) = -i
        assert_eq!(Scalar::i(&f).conj(), Scalar::i(&f).neg());
    }

    #[test]
    fn inverse_round_trip() {
        let f = FieldSpec::new(12).unwrap();
        let x = Scalar::zeta_pow(&f, 7)
            .add(&Scalar::from_ratio(&f, -2, 3))
            .add(&Scalar::i(&f));
        let inv = x.inv().unwrap();
        assert!(x.mul(&inv).is_one());
    }

    #[test]
    fn parse_print_round_trip() {
        let f = FieldSpec::new(12).unwrap();
        let samples = [
            "0",
            "3",
            "-7/2",
            "1 + 1*z^1",
            "1/2 + -3*z^2 + 5/7*z^3",
            "-1*z^3",
        ];
        for s in samples {
            let x = Scalar::parse(&f, s).unwrap();
            let printed = x.to_string();
            let reparsed = Scalar::parse(&f, &printed).unwrap();
            assert_eq!(x, reparsed, "round trip failed for `{s}`");
        }
        // Whitespace insensitivity and sign forms.
        let a = Scalar::parse(&f, " 1/2+-3 * z ^ 2 ".replace(' ', "").as_str()).unwrap();
        let b = Scalar::parse(&f, "1/2 - 3*z^2").unwrap();
        assert_eq!(a, b);
        // Bare z.
        assert_eq!(
            Scalar::parse(&f, "z").unwrap(),
            Scalar::zeta_pow(&f, 1)
        );
    }

    #[test]
    fn root_of_unity_has_right_order() {
        let f = FieldSpec::new(12).unwrap();
        let w = Scalar::root_of_unity(&f, 3, 1).unwrap();
        let mut acc = Scalar::one(&f);
        for _ in 0..3 {
            acc = acc.mul(&w);
        }
        assert!(acc.is_one());
        assert!(Scalar::root_of_unity(&f, 5, 1).is_err());
    }

    #[test]
    fn rejects_bad_field_orders() {
        assert!(FieldSpec::new(6).is_err());
        assert!(FieldSpec::new(0).is_err());
        assert_eq!(FieldSpec::containing_root(3).unwrap().order(), 12);
        assert_eq!(FieldSpec::containing_root(4).unwrap().order(), 4);
        assert_eq!(FieldSpec::containing_root(6).unwrap().order(), 12);
    }
}
