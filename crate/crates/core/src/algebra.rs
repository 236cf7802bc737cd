//! Gauge algebras given by totally antisymmetric structure constants.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Rat, Scalar};

/// Index into the generators of a particular [`GaugeAlgebra`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GaugeIndex(u8);

impl GaugeIndex {
    pub fn get(self) -> usize {
        self.0 as usize
    }
}

/// Structure constants C_abc of a compact Lie algebra, all indices down.
///
/// Construction validates total antisymmetry and the Jacobi identity by
/// exhaustive loop; afterwards the value is immutable.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeAlgebra<S> {
    dim: usize,
    table: Vec<S>,
    nonzero: Vec<(usize, usize, usize, S)>,
}

impl<S: Scalar> GaugeAlgebra<S> {
    /// Validates a dense table indexed as `table[(a * dim + b) * dim + c]`.
    pub fn from_table(dim: usize, table: Vec<S>) -> Result<Self> {
        if dim == 0 || dim > 255 {
            return Err(Error::IndexOutOfRange {
                kind: "algebra dimension",
                value: dim,
                bound: 256,
            });
        }
        if table.len() != dim * dim * dim {
            return Err(Error::ShapeMismatch {
                expected: dim * dim * dim,
                found: table.len(),
            });
        }
        let at = |a: usize, b: usize, c: usize| &table[(a * dim + b) * dim + c];
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    let v = at(a, b, c);
                    if !v.add(at(b, a, c)).is_zero() || !v.add(at(a, c, b)).is_zero() {
                        return Err(Error::AntisymmetryViolation { a, b, c });
                    }
                }
            }
        }
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    for d in 0..dim {
                        let mut sum = S::zero();
                        for e in 0..dim {
                            sum = sum
                                .add(&at(a, d, e).mul(at(b, c, e)))
                                .add(&at(b, d, e).mul(at(c, a, e)))
                                .add(&at(c, d, e).mul(at(a, b, e)));
                        }
                        if !sum.is_zero() {
                            return Err(Error::JacobiViolation {
                                a,
                                b,
                                c,
                                d,
                                defect: sum.to_f64(),
                            });
                        }
                    }
                }
            }
        }
        let mut nonzero = Vec::new();
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    let v = at(a, b, c);
                    if !v.is_zero() {
                        nonzero.push((a, b, c, v.clone()));
                    }
                }
            }
        }
        Ok(GaugeAlgebra { dim, table, nonzero })
    }

    /// Builds the full table from a sparse list, filling every permutation by sign.
    ///
    /// Entries with a repeated index or permutations that disagree are
    /// antisymmetry violations.
    pub fn from_entries(dim: usize, entries: &[(usize, usize, usize, S)]) -> Result<Self> {
        let mut table: Vec<Option<S>> = vec![None; dim * dim * dim];
        for (a, b, c, v) in entries {
            for &i in &[*a, *b, *c] {
                if i >= dim {
                    return Err(Error::IndexOutOfRange {
                        kind: "gauge",
                        value: i,
                        bound: dim,
                    });
                }
            }
            if v.is_zero() {
                continue;
            }
            if a == b || b == c || a == c {
                return Err(Error::AntisymmetryViolation { a: *a, b: *b, c: *c });
            }
            let perms = [
                ([*a, *b, *c], false),
                ([*b, *c, *a], false),
                ([*c, *a, *b], false),
                ([*b, *a, *c], true),
                ([*a, *c, *b], true),
                ([*c, *b, *a], true),
            ];
            for (p, odd) in perms {
                let value = if odd { v.neg() } else { v.clone() };
                let slot = &mut table[(p[0] * dim + p[1]) * dim + p[2]];
                match slot {
                    Some(existing) if !existing.sub(&value).is_zero() => {
                        return Err(Error::AntisymmetryViolation { a: *a, b: *b, c: *c });
                    }
                    _ => *slot = Some(value),
                }
            }
        }
        let table = table.into_iter().map(|v| v.unwrap_or_else(S::zero)).collect();
        Self::from_table(dim, table)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn c(&self, a: usize, b: usize, c: usize) -> &S {
        &self.table[(a * self.dim + b) * self.dim + c]
    }

    /// All nonzero (a, b, c, C_abc), including every permutation.
    pub fn nonzero(&self) -> &[(usize, usize, usize, S)] {
        &self.nonzero
    }

    /// Nonzero C_abc for fixed a.
    pub fn with_first(&self, a: usize) -> impl Iterator<Item = &(usize, usize, usize, S)> {
        self.nonzero.iter().filter(move |e| e.0 == a)
    }

    pub fn index(&self, value: usize) -> Result<GaugeIndex> {
        if value < self.dim {
            Ok(GaugeIndex(value as u8))
        } else {
            Err(Error::IndexOutOfRange {
                kind: "gauge",
                value,
                bound: self.dim,
            })
        }
    }

    pub fn to_f64(&self) -> GaugeAlgebra<f64> {
        GaugeAlgebra::from_table(self.dim, self.table.iter().map(Scalar::to_f64).collect())
            .expect("conversion of a valid algebra")
    }

    /// Canonical file form: one entry per unordered triple, a < b < c.
    pub fn to_file(&self) -> AlgebraFile {
        let entries = self
            .nonzero
            .iter()
            .filter(|(a, b, c, _)| a < b && b < c)
            .map(|(a, b, c, v)| {
                let value = if S::EXACT {
                    Value::String(v.text())
                } else {
                    serde_json::Number::from_f64(v.to_f64())
                        .map(Value::Number)
                        .unwrap_or(Value::Null)
                };
                (*a, *b, *c, value)
            })
            .collect();
        AlgebraFile { dim: self.dim, entries }
    }
}

impl GaugeAlgebra<Rat> {
    /// su(2) with C_abc = ε_abc.
    pub fn su2() -> Self {
        Self::from_entries(3, &[(0, 1, 2, Rat::from_i64(1))]).expect("su(2) is valid")
    }
}

impl GaugeAlgebra<f64> {
    /// su(3) with the Gell-Mann f-constants.
    pub fn su3() -> Self {
        let h = 0.5;
        let s = 3f64.sqrt() / 2.0;
        let entries = [
            (0, 1, 2, 1.0),
            (0, 3, 6, h),
            (0, 4, 5, -h),
            (1, 3, 5, h),
            (1, 4, 6, h),
            (2, 3, 4, h),
            (2, 5, 6, -h),
            (3, 4, 7, s),
            (5, 6, 7, s),
        ];
        Self::from_entries(8, &entries).expect("su(3) is valid")
    }
}

/// JSON form: `{ "dim": N, "entries": [[a, b, c, value], ...] }`.
///
/// `value` is a string rational (`"p/q"`, integer or exact decimal) in exact
/// mode, or a JSON number in numeric mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub dim: usize,
    pub entries: Vec<(usize, usize, usize, Value)>,
}

/// An algebra as loaded from a file: exact when every value is a string.
#[derive(Clone, Debug)]
pub enum LoadedAlgebra {
    Exact(GaugeAlgebra<Rat>),
    Numeric(GaugeAlgebra<f64>),
}

impl LoadedAlgebra {
    pub fn dim(&self) -> usize {
        match self {
            LoadedAlgebra::Exact(g) => g.dim(),
            LoadedAlgebra::Numeric(g) => g.dim(),
        }
    }

    pub fn mode(&self) -> &'static str {
        match self {
            LoadedAlgebra::Exact(_) => "exact",
            LoadedAlgebra::Numeric(_) => "numeric",
        }
    }

    pub fn to_file(&self) -> AlgebraFile {
        match self {
            LoadedAlgebra::Exact(g) => g.to_file(),
            LoadedAlgebra::Numeric(g) => g.to_file(),
        }
    }
}

pub fn load_gauge_algebra(file: &AlgebraFile) -> Result<LoadedAlgebra> {
    let numeric = file.entries.iter().any(|e| e.3.is_number());
    if numeric {
        let mut entries = Vec::with_capacity(file.entries.len());
        for (a, b, c, v) in &file.entries {
            let x = match v {
                Value::Number(n) => n.as_f64(),
                Value::String(s) => parse_rational(s).ok().map(|r| Scalar::to_f64(&r)),
                _ => None,
            }
            .ok_or_else(|| Error::Parse(format!("bad structure constant {v}")))?;
            entries.push((*a, *b, *c, x));
        }
        GaugeAlgebra::from_entries(file.dim, &entries).map(LoadedAlgebra::Numeric)
    } else {
        let mut entries = Vec::with_capacity(file.entries.len());
        for (a, b, c, v) in &file.entries {
            let Value::String(s) = v else {
                return Err(Error::Parse(format!("bad structure constant {v}")));
            };
            entries.push((*a, *b, *c, parse_rational(s)?));
        }
        GaugeAlgebra::from_entries(file.dim, &entries).map(LoadedAlgebra::Exact)
    }
}

pub fn parse_gauge_algebra(json: &str) -> Result<LoadedAlgebra> {
    let file: AlgebraFile = serde_json::from_str(json)?;
    load_gauge_algebra(&file)
}

pub fn read_gauge_algebra(path: &std::path::Path) -> Result<LoadedAlgebra> {
    parse_gauge_algebra(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn su2_accepted() {
        let g = GaugeAlgebra::su2();
        assert_eq!(g.dim(), 3);
        assert_eq!(g.c(0, 1, 2), &Rat::from_i64(1));
        assert_eq!(g.c(1, 0, 2), &Rat::from_i64(-1));
        assert_eq!(g.c(2, 0, 1), &Rat::from_i64(1));
        assert_eq!(g.nonzero().len(), 6);
    }

    #[test]
    fn su3_accepted_in_numeric_mode() {
        let g = GaugeAlgebra::su3();
        assert_eq!(g.dim(), 8);
        assert_eq!(g.nonzero().len(), 54);
    }

    #[test]
    fn su3_jacobi_brute_force() {
        // independent of the constructor's validation loop: the standard
        // cyclic form Σ_e C_abe C_ecd + C_bce C_ead + C_cae C_ebd
        let g = GaugeAlgebra::su3();
        let mut worst: f64 = 0.0;
        for a in 0..8 {
            for b in 0..8 {
                for c in 0..8 {
                    for d in 0..8 {
                        let s: f64 = (0..8)
                            .map(|e| {
                                g.c(a, b, e) * g.c(e, c, d) + g.c(b, c, e) * g.c(e, a, d) + g.c(c, a, e) * g.c(e, b, d)
                            })
                            .sum();
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        assert!(worst < 1e-12, "{worst}");
    }

    #[test]
    fn repeated_index_rejected() {
        let err = GaugeAlgebra::from_entries(3, &[(0, 0, 1, Rat::from_i64(1))]).unwrap_err();
        assert!(matches!(err, Error::AntisymmetryViolation { a: 0, b: 0, c: 1 }));
    }

    #[test]
    fn dense_table_not_antisymmetric_rejected() {
        let mut t = vec![Rat::from_i64(0); 27];
        t[1 * 3 + 2] = Rat::from_i64(1); // C_012 only
        assert!(matches!(
            GaugeAlgebra::from_table(3, t),
            Err(Error::AntisymmetryViolation { .. })
        ));
    }

    #[test]
    fn jacobi_violation_rejected() {
        // two su(2)-like triples sharing one generator do not close
        let entries = [(0, 1, 2, Rat::from_i64(1)), (2, 3, 4, Rat::from_i64(1))];
        let err = GaugeAlgebra::from_entries(5, &entries).unwrap_err();
        assert!(matches!(err, Error::JacobiViolation { .. }), "{err}");
    }

    #[test]
    fn out_of_range_rejected() {
        let err = GaugeAlgebra::from_entries(3, &[(0, 1, 3, Rat::from_i64(1))]).unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { value: 3, .. }));
        assert!(GaugeAlgebra::su2().index(3).is_err());
    }

    #[test]
    fn file_round_trip() {
        let json = r#"{"dim": 3, "entries": [[0, 1, 2, "1"]]}"#;
        let LoadedAlgebra::Exact(g) = parse_gauge_algebra(json).unwrap() else {
            panic!("expected exact mode");
        };
        assert_eq!(g, GaugeAlgebra::su2());
        let text = serde_json::to_string(&g.to_file()).unwrap();
        let LoadedAlgebra::Exact(back) = parse_gauge_algebra(&text).unwrap() else {
            panic!()
        };
        assert_eq!(back, g);

        let su3 = LoadedAlgebra::Numeric(GaugeAlgebra::su3());
        let text = serde_json::to_string(&su3.to_file()).unwrap();
        let LoadedAlgebra::Numeric(back) = parse_gauge_algebra(&text).unwrap() else {
            panic!()
        };
        assert_eq!(back, GaugeAlgebra::su3());
    }

    #[test]
    fn numeric_mode_detected_from_numbers() {
        let json = r#"{"dim": 3, "entries": [[0, 1, 2, 1.0]]}"#;
        assert_eq!(parse_gauge_algebra(json).unwrap().mode(), "numeric");
    }
}
