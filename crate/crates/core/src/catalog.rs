//! Built-in example triples.
//!
//! The catalog covers both sides of the `gamma in pi(A)` dichotomy:
//! `two_point` and `m2` have inner gradings, `scalar_gamma` and `m2_outer` do
//! not, and the `g_*` entries are their images under the doubling functor.
//! Every entry passes [`crate::triple::validate_triple`].

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::ExactMatrix;
use crate::scalar::{FieldSpec, Scalar};
use crate::triple::{gammafy, EvenTriple, FiniteAlgebra, Representation};

pub const NAMES: &[&str] = &[
    "unit",
    "two_point",
    "scalar_gamma",
    "m2",
    "m2_outer",
    "g_scalar_gamma",
    "g_two_point",
    "g_m2_outer",
];

/// Returns the named catalog triple over the default field Q(i).
pub fn example(name: &str) -> Result<EvenTriple> {
    let field = FieldSpec::new(4)?;
    example_over(name, &field)
}

/// Returns the named catalog triple over the given field.
pub fn example_over(name: &str, field: &Arc<FieldSpec>) -> Result<EvenTriple> {
    match name {
        "unit" => unit_triple(field),
        "two_point" => two_point_over(field),
        "scalar_gamma" => scalar_gamma_over(field),
        "m2" => m2_over(field),
        "m2_outer" => m2_outer_over(field),
        "g_scalar_gamma" => gammafy(&scalar_gamma_over(field)?),
        "g_two_point" => gammafy(&two_point_over(field)?),
        "g_m2_outer" => gammafy(&m2_outer_over(field)?),
        other => Err(Error::UnknownCatalogEntry(
            other.to_string(),
            NAMES.join(", "),
        )),
    }
}

/// The monoidal identity object (K, K, 0, 1).
pub fn unit_triple(field: &Arc<FieldSpec>) -> Result<EvenTriple> {
    let one = Scalar::one(field);
    let algebra = FiniteAlgebra::new(
        field.clone(),
        vec!["1".into()],
        vec![(0, 0, 0, one.clone())],
        vec![one],
    )?;
    let rep = Representation::new(vec![ExactMatrix::identity(field, 1)])?;
    let dirac = ExactMatrix::zeros(field, 1, 1);
    let gamma = ExactMatrix::identity(field, 1);
    EvenTriple::new(algebra, rep, dirac, gamma)
}

/// C (+) C acting diagonally on C^2 with off-diagonal D and gamma = rho(e-f).
///
/// Stated in the idempotent basis (e, f); construction normalizes it to
/// [1, f].
pub fn two_point_over(field: &Arc<FieldSpec>) -> Result<EvenTriple> {
    let one = Scalar::one(field);
    let algebra = FiniteAlgebra::new(
        field.clone(),
        vec!["e".into(), "f".into()],
        vec![(0, 0, 0, one.clone()), (1, 1, 1, one.clone())],
        vec![one.clone(), one],
    )?;
    let rep = Representation::new(vec![
        ExactMatrix::from_int_rows(field, &[&[1, 0], &[0, 0]]),
        ExactMatrix::from_int_rows(field, &[&[0, 0], &[0, 1]]),
    ])?;
    let dirac = ExactMatrix::from_int_rows(field, &[&[0, 1], &[1, 0]]);
    let gamma = ExactMatrix::from_int_rows(field, &[&[1, 0], &[0, -1]]);
    EvenTriple::new(algebra, rep, dirac, gamma)
}

/// C acting by scalars on C^2; gamma = diag(1,-1) is not in the image.
pub fn scalar_gamma_over(field: &Arc<FieldSpec>) -> Result<EvenTriple> {
    let one = Scalar::one(field);
    let algebra = FiniteAlgebra::new(
        field.clone(),
        vec!["1".into()],
        vec![(0, 0, 0, one.clone())],
        vec![one],
    )?;
    let rep = Representation::new(vec![ExactMatrix::identity(field, 2)])?;
    let dirac = ExactMatrix::from_int_rows(field, &[&[0, 1], &[1, 0]]);
    let gamma = ExactMatrix::from_int_rows(field, &[&[1, 0], &[0, -1]]);
    EvenTriple::new(algebra, rep, dirac, gamma)
}

/// Full 2x2 matrix algebra on C^2. A central grading inside a simple algebra
/// forces gamma = 1 and with it D = 0; the entry exercises the engine on a
/// noncommutative algebra with an inner (trivial) grading.
pub fn m2_over(field: &Arc<FieldSpec>) -> Result<EvenTriple> {
    let one = Scalar::one(field);
    let labels = vec!["e11".into(), "e12".into(), "e21".into(), "e22".into()];
    // E_ab E_cd = delta_bc E_ad with index a*2+b... basis order e11,e12,e21,e22.
    let idx = |a: usize, b: usize| a * 2 + b;
    let mut entries = Vec::new();
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for d in 0..2 {
                    if b == c {
                        entries.push((idx(a, b), idx(c, d), idx(a, d), one.clone()));
                    }
                }
            }
        }
    }
    let zero = Scalar::zero(field);
    let unit = vec![one.clone(), zero.clone(), zero.clone(), one.clone()];
    let algebra = FiniteAlgebra::new(field.clone(), labels, entries, unit)?;
    let rep = Representation::new(vec![
        ExactMatrix::from_int_rows(field, &[&[1, 0], &[0, 0]]),
        ExactMatrix::from_int_rows(field, &[&[0, 1], &[0, 0]]),
        ExactMatrix::from_int_rows(field, &[&[0, 0], &[1, 0]]),
        ExactMatrix::from_int_rows(field, &[&[0, 0], &[0, 1]]),
    ])?;
    let dirac = ExactMatrix::zeros(field, 2, 2);
    let gamma = ExactMatrix::identity(field, 2);
    EvenTriple::new(algebra, rep, dirac, gamma)
}

/// M_2 acting as a (+) a on C^4 with block grading diag(I,-I), which is not
/// in the image, and D = offdiag(T,T) for T = diag(1,2) so that D^2 is not
/// central.
pub fn m2_outer_over(field: &Arc<FieldSpec>) -> Result<EvenTriple> {
    let one = Scalar::one(field);
    let labels = vec!["e11".into(), "e12".into(), "e21".into(), "e22".into()];
    let idx = |a: usize, b: usize| a * 2 + b;
    let mut entries = Vec::new();
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for d in 0..2 {
                    if b == c {
                        entries.push((idx(a, b), idx(c, d), idx(a, d), one.clone()));
                    }
                }
            }
        }
    }
    let zero = Scalar::zero(field);
    let unit = vec![one.clone(), zero.clone(), zero.clone(), one.clone()];
    let algebra = FiniteAlgebra::new(field.clone(), labels, entries, unit)?;
    // rho(E_ab) = E_ab (+) E_ab on C^4.
    let unit_mats = [
        ExactMatrix::from_int_rows(field, &[&[1, 0], &[0, 0]]),
        ExactMatrix::from_int_rows(field, &[&[0, 1], &[0, 0]]),
        ExactMatrix::from_int_rows(field, &[&[0, 0], &[1, 0]]),
        ExactMatrix::from_int_rows(field, &[&[0, 0], &[0, 1]]),
    ];
    let id2 = ExactMatrix::identity(field, 2);
    let rep = Representation::new(unit_mats.iter().map(|m| id2.kron(m)).collect())?;
    let dirac = ExactMatrix::from_int_rows(
        field,
        &[&[0, 0, 1, 0], &[0, 0, 0, 2], &[1, 0, 0, 0], &[0, 2, 0, 0]],
    );
    let gamma = ExactMatrix::from_int_rows(
        field,
        &[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, -1, 0], &[0, 0, 0, -1]],
    );
    EvenTriple::new(algebra, rep, dirac, gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triple::{gamma_in_image, validate_triple};

    #[test]
    fn every_entry_validates() {
        for name in NAMES {
            let t = example(name).unwrap();
            let report = validate_triple(&t).unwrap();
            assert!(
                report.all_pass(),
                "{name} failed: {:?}",
                report.failed_names()
            );
        }
    }

    #[test]
    fn inner_grading_dichotomy() {
        for (name, expected) in [
            ("unit", true),
            ("two_point", true),
            ("m2", true),
            ("scalar_gamma", false),
            ("m2_outer", false),
            ("g_scalar_gamma", true),
            ("g_two_point", true),
            ("g_m2_outer", true),
        ] {
            let t = example(name).unwrap();
            assert_eq!(gamma_in_image(&t).is_present(), expected, "{name}");
        }
    }

    #[test]
    fn unknown_name_lists_catalog() {
        match example("nope") {
            Err(Error::UnknownCatalogEntry(name, list)) => {
                assert_eq!(name, "nope");
                assert!(list.contains("two_point"));
            }
            other => panic!("expected UnknownCatalogEntry, got {other:?}"),
        }
    }

    #[test]
    fn m2_outer_has_noncentral_d_squared() {
        let t = example("m2_outer").unwrap();
        let d2 = t.dirac().mul(t.dirac());
        let noncentral = (0..t.algebra().dim())
            .any(|i| !d2.commutator(t.rep().matrix(i)).is_zero());
        assert!(noncentral);
    }
}
