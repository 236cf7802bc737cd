//! Verification of generators against the determining system, polynomial
//! ansatz solving, and bracket closure.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::GaugeAlgebra;
use crate::error::{Error, Result};
use crate::expr::{Expression, Monomial, Symbol};
use crate::generator::{bracket, x_monomials, Named, SymmetryGenerator, DEGREE_CAP};
use crate::linalg::{canonical_row, compare_spans, echelon, express_in_span, SpanComparison, SparseRow};
use crate::prolong::{DeterminingSystem, Group};
use crate::scalar::Scalar;

/// Residual tolerance for checked-numeric verification.
pub const NUMERIC_RESIDUAL_TOL: f64 = 1e-10;

/// Default cap on the number of ansatz unknowns.
pub const DEFAULT_UNKNOWN_CAP: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct Indices {
    pub mu: usize,
    pub nu: usize,
    pub a: usize,
    pub jet: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub group: Group,
    pub indices: Indices,
    pub residual_text: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub status: Status,
    pub conditions_checked: usize,
    /// Largest residual coefficient magnitude over all conditions.
    pub max_residual: f64,
    pub failures: Vec<Failure>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

fn residual_vanishes<S: Scalar>(e: &Expression<S>) -> bool {
    if S::EXACT {
        e.is_zero()
    } else {
        e.max_abs_coefficient() < NUMERIC_RESIDUAL_TOL
    }
}

/// Substitutes the generator's explicit H, Φ and partials into every condition.
pub fn verify_generator<S: Scalar>(gen: &SymmetryGenerator<S>, sys: &DeterminingSystem<S>) -> VerificationReport {
    let mut cache: HashMap<Symbol, Expression<S>> = HashMap::new();
    let conditions: Vec<_> = sys.conditions().collect();
    for c in &conditions {
        for s in c.expr.symbols() {
            if let std::collections::hash_map::Entry::Vacant(v) = cache.entry(s) {
                if let Some(val) = gen.unknown_value(s) {
                    v.insert(val);
                }
            }
        }
    }
    let residuals: Vec<Expression<S>> = conditions
        .par_iter()
        .map(|c| c.expr.substitute(|s| cache.get(&s).cloned()))
        .collect();
    let mut failures = Vec::new();
    let mut max_residual: f64 = 0.0;
    for (c, r) in conditions.iter().zip(&residuals) {
        max_residual = max_residual.max(r.max_abs_coefficient());
        if !residual_vanishes(r) {
            failures.push(Failure {
                group: c.group,
                indices: Indices {
                    mu: c.label.mu,
                    nu: c.label.nu,
                    a: c.label.a,
                    jet: c.label.jet.to_string(),
                },
                residual_text: r.text(),
            });
        }
    }
    VerificationReport {
        status: if failures.is_empty() {
            Status::Pass
        } else {
            Status::Fail
        },
        conditions_checked: conditions.len(),
        max_residual,
        failures,
    }
}

/// Column layout of the polynomial ansatz.
///
/// H_κ: x-polynomials of degree ≤ h_degree. Φ_aκ: Σ L_aκnα(x) A_nα + I_aκ(x) with
/// L of degree ≤ h_degree and I of degree ≤ chi_degree − 1 (absent for chi_degree 0).
#[derive(Clone, Debug)]
pub struct AnsatzLayout {
    pub dim: usize,
    pub h_degree: usize,
    pub chi_degree: usize,
    h_monos: Vec<Monomial>,
    inhom_monos: Vec<Monomial>,
    h_index: HashMap<Monomial, usize>,
    inhom_index: HashMap<Monomial, usize>,
}

impl AnsatzLayout {
    pub fn new(dim: usize, h_degree: usize, chi_degree: usize) -> Self {
        let h_monos = x_monomials(h_degree);
        let inhom_monos = if chi_degree == 0 {
            Vec::new()
        } else {
            x_monomials(chi_degree - 1)
        };
        let index = |v: &[Monomial]| v.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        AnsatzLayout {
            dim,
            h_degree,
            chi_degree,
            h_index: index(&h_monos),
            inhom_index: index(&inhom_monos),
            h_monos,
            inhom_monos,
        }
    }

    fn nh(&self) -> usize {
        self.h_monos.len()
    }

    pub fn unknowns(&self) -> usize {
        let n = self.nh();
        4 * n + 16 * self.dim * self.dim * n + 4 * self.dim * self.inhom_monos.len()
    }

    fn h_col(&self, k: usize, m: usize) -> usize {
        k * self.nh() + m
    }

    fn lin_col(&self, a: usize, k: usize, n: usize, al: usize, m: usize) -> usize {
        let d = self.dim;
        4 * self.nh() + ((((a * 4 + k) * d + n) * 4 + al) * self.nh()) + m
    }

    fn inhom_col(&self, a: usize, k: usize, m: usize) -> usize {
        4 * self.nh() + 16 * self.dim * self.dim * self.nh() + (a * 4 + k) * self.inhom_monos.len() + m
    }

    /// Entries (x·A monomial, column, factor) of one unknown-function symbol.
    fn expansion<S: Scalar>(&self, s: Symbol) -> Vec<(Monomial, usize, S)> {
        let u = |v: u8| v as usize;
        let mut out = Vec::new();
        let deriv = |m: &Monomial, l: Option<usize>| -> Option<(Monomial, i64)> {
            match l {
                None => Some((m.clone(), 1)),
                Some(l) => m.divide_by(Symbol::coord(l)).map(|(e, rest)| (rest, e as i64)),
            }
        };
        match s {
            Symbol::H(k) | Symbol::DH(k, _) => {
                let l = match s {
                    Symbol::DH(_, l) => Some(u(l)),
                    _ => None,
                };
                for (i, m) in self.h_monos.iter().enumerate() {
                    if let Some((dm, f)) = deriv(m, l) {
                        out.push((dm, self.h_col(u(k), i), S::from_i64(f)));
                    }
                }
            }
            Symbol::DHdA(..) => {}
            Symbol::Phi(a, k) | Symbol::DPhi(a, k, _) => {
                let l = match s {
                    Symbol::DPhi(_, _, l) => Some(u(l)),
                    _ => None,
                };
                let (a, k) = (u(a), u(k));
                for n in 0..self.dim {
                    for al in 0..4 {
                        let af = Monomial::var(Symbol::field(n, al));
                        for (i, m) in self.h_monos.iter().enumerate() {
                            if let Some((dm, f)) = deriv(m, l) {
                                out.push((dm.mul(&af), self.lin_col(a, k, n, al, i), S::from_i64(f)));
                            }
                        }
                    }
                }
                for (i, m) in self.inhom_monos.iter().enumerate() {
                    if let Some((dm, f)) = deriv(m, l) {
                        out.push((dm, self.inhom_col(a, k, i), S::from_i64(f)));
                    }
                }
            }
            Symbol::DPhidA(a, k, n, al) => {
                for (i, m) in self.h_monos.iter().enumerate() {
                    out.push((m.clone(), self.lin_col(u(a), u(k), u(n), u(al), i), S::one()));
                }
            }
            _ => unreachable!("{s} is not an unknown-function symbol"),
        }
        out
    }

    /// Generator with the given column values.
    pub fn generator<S: Scalar>(&self, v: &SparseRow<S>) -> SymmetryGenerator<S> {
        let d = self.dim;
        let nh = self.nh();
        let mut h = vec![Expression::zero(); 4];
        let mut phi = vec![Expression::zero(); 4 * d];
        for (col, val) in v {
            let col = *col;
            if col < 4 * nh {
                h[col / nh].add_term(self.h_monos[col % nh].clone(), val.clone());
            } else if col < 4 * nh + 16 * d * d * nh {
                let r = col - 4 * nh;
                let m = r % nh;
                let r = r / nh;
                let (al, r) = (r % 4, r / 4);
                let (n, r) = (r % d, r / d);
                let (k, a) = (r % 4, r / 4);
                let mono = self.h_monos[m].mul(&Monomial::var(Symbol::field(n, al)));
                phi[4 * a + k].add_term(mono, val.clone());
            } else {
                let r = col - 4 * nh - 16 * d * d * nh;
                let ni = self.inhom_monos.len();
                phi[r / ni].add_term(self.inhom_monos[r % ni].clone(), val.clone());
            }
        }
        SymmetryGenerator::new(d, h, phi).expect("layout generators stay within caps")
    }

    /// Column vector of a generator, or None when it lies outside the ansatz.
    pub fn vector<S: Scalar>(&self, gen: &SymmetryGenerator<S>) -> Option<SparseRow<S>> {
        let mut out = Vec::new();
        for k in 0..4 {
            for (m, c) in gen.h(k).terms() {
                out.push((self.h_col(k, *self.h_index.get(m)?), c.clone()));
            }
        }
        for a in 0..self.dim {
            for k in 0..4 {
                for (m, c) in gen.phi(a, k).terms() {
                    let (fm, xm) = m.split(Symbol::is_field);
                    if fm.is_one() {
                        out.push((self.inhom_col(a, k, *self.inhom_index.get(&xm)?), c.clone()));
                    } else {
                        let Symbol::Field(n, al) = fm.factors()[0].0 else {
                            unreachable!()
                        };
                        let i = *self.h_index.get(&xm)?;
                        out.push((self.lin_col(a, k, n as usize, al as usize, i), c.clone()));
                    }
                }
            }
        }
        Some(canonical_row(out))
    }
}

#[derive(Clone, Debug)]
pub struct AnsatzSolution<S> {
    pub layout: AnsatzLayout,
    pub unknowns: usize,
    pub equations: usize,
    pub rank: usize,
    /// Nullspace basis in layout columns.
    pub vectors: Vec<SparseRow<S>>,
    pub basis: Vec<SymmetryGenerator<S>>,
}

impl<S: Scalar> AnsatzSolution<S> {
    pub fn dimension(&self) -> usize {
        self.vectors.len()
    }

    /// Mutual rank comparison with a list of generators (e.g. the closed-form family).
    /// Generators outside the ansatz make the spans unequal.
    pub fn compare_with(&self, gens: &[SymmetryGenerator<S>]) -> (SpanComparison, usize) {
        let mut outside = 0;
        let rows: Vec<_> = gens
            .iter()
            .filter_map(|g| {
                let v = self.layout.vector(g);
                if v.is_none() {
                    outside += 1;
                }
                v
            })
            .collect();
        (compare_spans(&self.vectors, &rows, self.layout.unknowns()), outside)
    }

    /// Largest total x-degree appearing in any basis H.
    pub fn max_h_degree(&self) -> usize {
        self.basis
            .iter()
            .flat_map(|g| g.h_all().iter().map(|e| e.degree_in(Symbol::is_coord) as usize))
            .max()
            .unwrap_or(0)
    }
}

pub fn solve_ansatz<S: Scalar>(
    h_degree: usize,
    chi_degree: usize,
    g: &GaugeAlgebra<S>,
    sys: &DeterminingSystem<S>,
) -> Result<AnsatzSolution<S>> {
    solve_ansatz_with_cap(h_degree, chi_degree, g, sys, DEFAULT_UNKNOWN_CAP)
}

pub fn solve_ansatz_with_cap<S: Scalar>(
    h_degree: usize,
    chi_degree: usize,
    g: &GaugeAlgebra<S>,
    sys: &DeterminingSystem<S>,
    cap: usize,
) -> Result<AnsatzSolution<S>> {
    if h_degree > DEGREE_CAP {
        return Err(Error::DegreeOverflow {
            degree: h_degree,
            cap: DEGREE_CAP,
        });
    }
    if chi_degree > DEGREE_CAP {
        return Err(Error::DegreeOverflow {
            degree: chi_degree,
            cap: DEGREE_CAP,
        });
    }
    if sys.dim != g.dim() {
        return Err(Error::ShapeMismatch {
            expected: g.dim(),
            found: sys.dim,
        });
    }
    let layout = AnsatzLayout::new(g.dim(), h_degree, chi_degree);
    let unknowns = layout.unknowns();
    if unknowns > cap {
        return Err(Error::AnsatzTooLarge { unknowns, cap });
    }
    let conditions: Vec<_> = sys.conditions().collect();
    let symbols: BTreeSet<Symbol> = conditions
        .iter()
        .flat_map(|c| c.expr.symbols())
        .filter(|s| s.is_unknown())
        .collect();
    let expansions: HashMap<Symbol, Vec<(Monomial, usize, S)>> =
        symbols.into_iter().map(|s| (s, layout.expansion(s))).collect();

    let per_condition: Vec<Vec<SparseRow<S>>> = conditions
        .par_iter()
        .map(|c| {
            let mut rows: BTreeMap<Monomial, Vec<(usize, S)>> = BTreeMap::new();
            for (m, coeff) in c.expr.terms() {
                let (unk, rest) = m.split(Symbol::is_unknown);
                let s = unk.factors()[0].0;
                debug_assert_eq!(unk.degree(), 1, "conditions are linear in the unknowns");
                for (em, col, f) in &expansions[&s] {
                    rows.entry(rest.mul(em)).or_default().push((*col, coeff.mul(f)));
                }
            }
            rows.into_values()
                .map(canonical_row)
                .filter(|r| !r.is_empty())
                .collect()
        })
        .collect();
    let rows: Vec<SparseRow<S>> = per_condition.into_iter().flatten().collect();
    let equations = rows.len();
    let ech = echelon(rows, unknowns);
    let vectors = ech.nullspace();
    let basis = vectors.iter().map(|v| layout.generator(v)).collect();
    Ok(AnsatzSolution {
        layout,
        unknowns,
        equations,
        rank: ech.rank(),
        vectors,
        basis,
    })
}

/// Closed-form generators inside the (h_degree, chi_degree) ansatz.
pub fn closed_form_generators<S: Scalar>(
    g: &GaugeAlgebra<S>,
    h_degree: usize,
    chi_degree: usize,
) -> Vec<(Named, SymmetryGenerator<S>)> {
    crate::generator::closed_form_family(g.dim(), h_degree, chi_degree)
        .into_iter()
        .map(|n| {
            let gen = n.generator(g);
            (n, gen)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosureReport {
    pub size: usize,
    /// c[i][j] lists the nonzero (k, text) with [e_i, e_j] = Σ c_k e_k.
    pub table: Vec<Vec<Vec<(usize, String)>>>,
    /// Pairs whose bracket left the span of the basis.
    pub escapes: Vec<(usize, usize)>,
    pub antisymmetric: bool,
    pub jacobi: bool,
}

impl ClosureReport {
    pub fn closes(&self) -> bool {
        self.escapes.is_empty() && self.antisymmetric && self.jacobi
    }
}

/// Full structure-constant tensor c[i][j][k] when closure holds, plus the report.
pub fn closure_check<S: Scalar>(basis: &[SymmetryGenerator<S>]) -> Result<(ClosureReport, Vec<Vec<Vec<S>>>)> {
    let n = basis.len();
    let mut brackets = vec![vec![None; n]; n];
    for i in 0..n {
        for j in 0..n {
            brackets[i][j] = Some(bracket(&basis[i], &basis[j])?);
        }
    }
    let mut keys: BTreeMap<(usize, Monomial), usize> = BTreeMap::new();
    let mut to_row = |g: &SymmetryGenerator<S>| -> SparseRow<S> {
        let row = g
            .coefficients()
            .into_iter()
            .map(|(k, v)| {
                let next = keys.len();
                (*keys.entry(k).or_insert(next), v)
            })
            .collect();
        canonical_row(row)
    };
    let rows: Vec<_> = basis.iter().map(&mut to_row).collect();
    let targets: Vec<Vec<_>> = brackets
        .iter()
        .map(|r| r.iter().map(|b| to_row(b.as_ref().expect("filled above"))).collect())
        .collect();
    let ncols = keys.len();
    let mut c = vec![vec![vec![S::zero(); n]; n]; n];
    let mut escapes = Vec::new();
    for i in 0..n {
        for j in 0..n {
            match express_in_span(&rows, &targets[i][j], ncols) {
                Some(coeffs) => c[i][j] = coeffs,
                None => escapes.push((i, j)),
            }
        }
    }
    let mut antisymmetric = true;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if !c[i][j][k].add(&c[j][i][k]).is_zero() {
                    antisymmetric = false;
                }
            }
        }
    }
    let mut jacobi = true;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut s = S::zero();
                    for m in 0..n {
                        s = s
                            .add(&c[i][j][m].mul(&c[m][k][l]))
                            .add(&c[j][k][m].mul(&c[m][i][l]))
                            .add(&c[k][i][m].mul(&c[m][j][l]));
                    }
                    if !s.is_zero() {
                        jacobi = false;
                    }
                }
            }
        }
    }
    let table = c
        .iter()
        .map(|r| {
            r.iter()
                .map(|v| {
                    v.iter()
                        .enumerate()
                        .filter(|(_, x)| !x.is_zero())
                        .map(|(k, x)| (k, x.text()))
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok((
        ClosureReport {
            size: n,
            table,
            escapes,
            antisymmetric,
            jacobi,
        },
        c,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::generator::{conformal_names, instantiate_closed_form, ConformalGaugeParams};
    use crate::prolong::extract_determining_system;
    use crate::scalar::Rat;
    use once_cell::sync::Lazy;

    static SU2: Lazy<(GaugeAlgebra<Rat>, DeterminingSystem<Rat>)> = Lazy::new(|| {
        let g = GaugeAlgebra::su2();
        let sys = extract_determining_system(&g);
        (g, sys)
    });

    #[test]
    fn zero_generator_passes() {
        let (_, sys) = &*SU2;
        let r = verify_generator(&SymmetryGenerator::zero(3), sys);
        assert!(r.passed());
        assert!(r.conditions_checked > 0);
    }

    #[test]
    fn symbolic_closed_form_passes() {
        let (g, sys) = &*SU2;
        let gen = instantiate_closed_form(&ConformalGaugeParams::symbolic(3, 3), g).unwrap();
        let r = verify_generator(&gen, sys);
        assert!(r.passed(), "{:?}", r.failures.first());
    }

    #[test]
    fn non_antisymmetric_h_fails_in_linear_group() {
        let (_, sys) = &*SU2;
        let mut h = vec![Expr::zero(); 4];
        h[0] = Expr::var(Symbol::coord(1));
        let gen = SymmetryGenerator::new(3, h, vec![Expr::zero(); 12]).unwrap();
        let r = verify_generator(&gen, sys);
        assert!(!r.passed());
        assert!(r.failures.iter().any(|f| f.group == Group::Linear));
    }

    #[test]
    fn small_ansatz_dimension() {
        let (g, sys) = &*SU2;
        let sol = solve_ansatz(0, 0, g, sys).unwrap();
        assert_eq!(sol.dimension(), 7);
        let sol = solve_ansatz(1, 0, g, sys).unwrap();
        assert_eq!(sol.dimension(), 14);
        let fam: Vec<_> = closed_form_generators(g, 1, 0).into_iter().map(|(_, v)| v).collect();
        let (cmp, outside) = sol.compare_with(&fam);
        assert!(cmp.equal() && outside == 0);
        for b in &sol.basis {
            assert!(verify_generator(b, sys).passed());
        }
    }

    #[test]
    fn ansatz_cap_enforced() {
        let (g, sys) = &*SU2;
        assert!(matches!(
            solve_ansatz_with_cap(2, 0, g, sys, 100),
            Err(Error::AnsatzTooLarge { cap: 100, .. })
        ));
    }

    #[test]
    fn layout_round_trip() {
        let g = GaugeAlgebra::su2();
        let layout = AnsatzLayout::new(3, 2, 1);
        for n in conformal_names() {
            let gen = n.generator(&g);
            let v = layout.vector(&gen).unwrap();
            assert_eq!(layout.generator(&v), gen);
        }
    }

    #[test]
    fn conformal_closure() {
        let g = GaugeAlgebra::su2();
        let basis: Vec<_> = conformal_names().iter().map(|n| n.generator(&g)).collect();
        let (report, _) = closure_check(&basis).unwrap();
        assert!(report.closes(), "{report:?}");
    }

    #[test]
    fn non_symmetry_escapes() {
        let g = GaugeAlgebra::su2();
        let mut basis: Vec<_> = conformal_names().iter().map(|n| n.generator(&g)).collect();
        let mut h = vec![Expr::zero(); 4];
        h[0] = Expr::var(Symbol::coord(1));
        basis.push(SymmetryGenerator::new(3, h, vec![Expr::zero(); 12]).unwrap());
        let (report, _) = closure_check(&basis).unwrap();
        assert!(!report.escapes.is_empty());
    }
}
