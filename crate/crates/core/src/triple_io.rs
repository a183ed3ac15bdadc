//! The triple-definition file format.
//!
//! Sections in order: `[field]` with the cyclotomic order, `[algebra]` with
//! dimension, labels, unit coordinates and structure constants, `[rep]` with
//! the representation matrices, `[operators]` with D and gamma. Scalars use
//! the literal grammar of [`crate::scalar::Scalar`]; matrices are
//! `[a, b; c, d]` with rows separated by `;`. Lines starting with `#` are
//! comments.
//!
//! Printing is canonical: a parsed file reprints byte-identically once the
//! triple has been normalized (unit first in the basis).

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::ExactMatrix;
use crate::scalar::{FieldSpec, Scalar};
use crate::triple::{validate_triple, EvenTriple, FiniteAlgebra, Representation};

/// Renders a triple in the canonical file format.
pub fn format_triple(t: &EvenTriple) -> String {
    let mut out = String::new();
    let alg = t.algebra();
    writeln!(out, "[field]").unwrap();
    writeln!(out, "L = {}", t.field().order()).unwrap();
    writeln!(out).unwrap();
    writeln!(out, "[algebra]").unwrap();
    writeln!(out, "dim = {}", alg.dim()).unwrap();
    writeln!(out, "labels = {}", alg.labels().join(", ")).unwrap();
    let unit: Vec<String> = alg.unit().iter().map(|c| c.to_string()).collect();
    writeln!(out, "unit = {}", unit.join(", ")).unwrap();
    for (i, j, k, c) in alg.sc_entries() {
        writeln!(out, "sc ({i},{j},{k}) = {c}").unwrap();
    }
    writeln!(out).unwrap();
    writeln!(out, "[rep]").unwrap();
    writeln!(out, "d = {}", t.space_dim()).unwrap();
    for (i, m) in t.rep().matrices().iter().enumerate() {
        writeln!(out, "matrix {i} = {}", format_matrix(m)).unwrap();
    }
    writeln!(out).unwrap();
    writeln!(out, "[operators]").unwrap();
    writeln!(out, "D = {}", format_matrix(t.dirac())).unwrap();
    writeln!(out, "gamma = {}", format_matrix(t.gamma())).unwrap();
    out
}

fn format_matrix(m: &ExactMatrix) -> String {
    let rows: Vec<String> = (0..m.nrows())
        .map(|r| {
            (0..m.ncols())
                .map(|c| m.get(r, c).to_string())
                .collect::<Vec<_>>()
                .join(", ")
        })
        .collect();
    format!("[{}]", rows.join("; "))
}

fn parse_matrix(field: &Arc<FieldSpec>, text: &str, line: usize) -> Result<ExactMatrix> {
    let bad = |msg: String| Error::Parse {
        line: Some(line),
        msg,
    };
    let inner = text
        .trim()
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| bad(format!("matrix must be bracketed: `{text}`")))?;
    let mut rows = Vec::new();
    for row_text in inner.split(';') {
        let mut row = Vec::new();
        for cell in row_text.split(',') {
            row.push(Scalar::parse(field, cell).map_err(|e| bad(e.to_string()))?);
        }
        rows.push(row);
    }
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(bad("ragged matrix rows".into()));
    }
    Ok(ExactMatrix::from_rows(field, rows))
}

/// Parses a triple-definition file; validation runs unless `skip_validation`.
pub fn parse_triple(text: &str, skip_validation: bool) -> Result<EvenTriple> {
    enum Section {
        None,
        Field,
        Algebra,
        Rep,
        Operators,
    }
    let mut section = Section::None;
    let mut field: Option<Arc<FieldSpec>> = None;
    let mut dim: Option<usize> = None;
    let mut labels: Option<Vec<String>> = None;
    let mut unit: Option<Vec<Scalar>> = None;
    let mut sc: Vec<(usize, usize, usize, Scalar)> = Vec::new();
    let mut rep_dim: Option<usize> = None;
    let mut matrices: Vec<(usize, ExactMatrix)> = Vec::new();
    let mut dirac: Option<ExactMatrix> = None;
    let mut gamma: Option<ExactMatrix> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim();
        let bad = |msg: String| Error::Parse {
            line: Some(lineno),
            msg,
        };
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line {
            "[field]" => {
                section = Section::Field;
                continue;
            }
            "[algebra]" => {
                section = Section::Algebra;
                continue;
            }
            "[rep]" => {
                section = Section::Rep;
                continue;
            }
            "[operators]" => {
                section = Section::Operators;
                continue;
            }
            _ => {}
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| bad(format!("expected `key = value`, found `{line}`")))?;
        match section {
            Section::None => return Err(bad("content before the first section header".into())),
            Section::Field => match key {
                "L" => {
                    let l: u64 = value.parse().map_err(|_| bad(format!("invalid L `{value}`")))?;
                    field = Some(FieldSpec::new(l)?);
                }
                other => return Err(bad(format!("unknown field key `{other}`"))),
            },
            Section::Algebra => {
                let f = field
                    .as_ref()
                    .ok_or_else(|| bad("[field] must precede [algebra]".into()))?;
                if key == "dim" {
                    dim = Some(value.parse().map_err(|_| bad(format!("invalid dim `{value}`")))?);
                } else if key == "labels" {
                    labels = Some(value.split(',').map(|s| s.trim().to_string()).collect());
                } else if key == "unit" {
                    let mut coords = Vec::new();
                    for cell in value.split(',') {
                        coords.push(Scalar::parse(f, cell).map_err(|e| bad(e.to_string()))?);
                    }
                    unit = Some(coords);
                } else if let Some(rest) = key.strip_prefix("sc") {
                    let idx = rest
                        .trim()
                        .strip_prefix('(')
                        .and_then(|s| s.strip_suffix(')'))
                        .ok_or_else(|| bad(format!("expected `sc (i,j,k)`, found `{key}`")))?;
                    let parts: Vec<&str> = idx.split(',').map(str::trim).collect();
                    if parts.len() != 3 {
                        return Err(bad(format!("expected three indices in `{key}`")));
                    }
                    let i: usize = parts[0].parse().map_err(|_| bad("bad index".into()))?;
                    let j: usize = parts[1].parse().map_err(|_| bad("bad index".into()))?;
                    let k: usize = parts[2].parse().map_err(|_| bad("bad index".into()))?;
                    let c = Scalar::parse(f, value).map_err(|e| bad(e.to_string()))?;
                    sc.push((i, j, k, c));
                } else {
                    return Err(bad(format!("unknown algebra key `{key}`")));
                }
            }
            Section::Rep => {
                let f = field
                    .as_ref()
                    .ok_or_else(|| bad("[field] must precede [rep]".into()))?;
                if key == "d" {
                    rep_dim = Some(value.parse().map_err(|_| bad(format!("invalid d `{value}`")))?);
                } else if let Some(rest) = key.strip_prefix("matrix") {
                    let i: usize = rest
                        .trim()
                        .parse()
                        .map_err(|_| bad(format!("expected `matrix <index>`, found `{key}`")))?;
                    matrices.push((i, parse_matrix(f, value, lineno)?));
                } else {
                    return Err(bad(format!("unknown rep key `{key}`")));
                }
            }
            Section::Operators => {
                let f = field
                    .as_ref()
                    .ok_or_else(|| bad("[field] must precede [operators]".into()))?;
                match key {
                    "D" => dirac = Some(parse_matrix(f, value, lineno)?),
                    "gamma" => gamma = Some(parse_matrix(f, value, lineno)?),
                    other => return Err(bad(format!("unknown operator key `{other}`"))),
                }
            }
        }
    }

    let missing = |what: &str| Error::Parse {
        line: None,
        msg: format!("missing {what}"),
    };
    let field = field.ok_or_else(|| missing("[field] section"))?;
    let dim = dim.ok_or_else(|| missing("algebra dim"))?;
    let labels = labels.unwrap_or_else(|| (0..dim).map(|i| format!("b{i}")).collect());
    if labels.len() != dim {
        return Err(Error::Parse {
            line: None,
            msg: format!("{} labels for dim {dim}", labels.len()),
        });
    }
    let unit = unit.ok_or_else(|| missing("algebra unit"))?;
    let rep_dim = rep_dim.ok_or_else(|| missing("rep dimension d"))?;
    matrices.sort_by_key(|(i, _)| *i);
    let expected: Vec<usize> = (0..dim).collect();
    if matrices.iter().map(|(i, _)| *i).collect::<Vec<_>>() != expected {
        return Err(Error::Parse {
            line: None,
            msg: "representation matrices must cover indices 0..dim".into(),
        });
    }
    let mats: Vec<ExactMatrix> = matrices.into_iter().map(|(_, m)| m).collect();
    if mats.iter().any(|m| m.nrows() != rep_dim || m.ncols() != rep_dim) {
        return Err(Error::Parse {
            line: None,
            msg: "matrix size disagrees with d".into(),
        });
    }
    let dirac = dirac.ok_or_else(|| missing("operator D"))?;
    let gamma = gamma.ok_or_else(|| missing("operator gamma"))?;

    let algebra = FiniteAlgebra::new(field, labels, sc, unit)?;
    let rep = Representation::new(mats)?;
    let triple = EvenTriple::new(algebra, rep, dirac, gamma)?;
    if !skip_validation {
        let report = validate_triple(&triple)?;
        if !report.all_pass() {
            return Err(Error::Validation {
                failed: report.failed_names(),
            });
        }
    }
    Ok(triple)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn catalog_export_reparses_identically() {
        for name in catalog::NAMES {
            let t = catalog::example(name).unwrap();
            let text = format_triple(&t);
            let back = parse_triple(&text, false).unwrap();
            assert_eq!(format_triple(&back), text, "round trip for {name}");
        }
    }

    #[test]
    fn anticommutation_failure_is_named() {
        let t = catalog::example("two_point").unwrap();
        let mut text = format_triple(&t);
        // Replace D by the identity, which breaks anticommutation.
        let d_line = text
            .lines()
            .find(|l| l.starts_with("D = "))
            .unwrap()
            .to_string();
        text = text.replace(&d_line, "D = [1, 0; 0, 1]");
        match parse_triple(&text, false) {
            Err(Error::Validation { failed }) => {
                assert!(failed.contains(&"anticommutation".to_string()));
            }
            other => panic!("expected validation failure, got {other:?}"),
        }
        // --no-validate admits the broken file.
        assert!(parse_triple(&text, true).is_ok());
    }

    #[test]
    fn parse_error_carries_line() {
        let text = "[field]\nL = twelve\n";
        match parse_triple(text, false) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, Some(2)),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn unnormalized_input_normalizes_on_load() {
        // two_point in the idempotent basis: the parser must produce the
        // unit-first normalized triple.
        let text = "\
[field]
L = 4

[algebra]
dim = 2
labels = e, f
unit = 1, 1
sc (0,0,0) = 1
sc (1,1,1) = 1

[rep]
d = 2
matrix 0 = [1, 0; 0, 0]
matrix 1 = [0, 0; 0, 1]

[operators]
D = [0, 1; 1, 0]
gamma = [1, 0; 0, -1]
";
        let t = parse_triple(text, false).unwrap();
        assert!(t.algebra().unit_is_first_basis_vector());
        let reference = catalog::example("two_point").unwrap();
        assert_eq!(format_triple(&t), format_triple(&reference));
    }
}
