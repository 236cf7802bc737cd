//! Finite replays of two steps of the solution: the algebraic system for
//! (h, G) and the first-order system for p, q, r.

use serde::Serialize;

use crate::algebra::GaugeAlgebra;
use crate::expr::{Expression, Monomial, Symbol};
use crate::generator::x_monomials;
use crate::linalg::{canonical_row, compare_spans, echelon, SpanComparison, SparseRow};
use crate::scalar::{Rat, Scalar};
use crate::tensor::levi_civita;

#[derive(Clone, Debug, Serialize)]
pub struct HSpaceReport {
    pub dimension: usize,
    /// Nullspace basis as (h_an row-major, G) text vectors.
    pub basis: Vec<Vec<String>>,
    /// Span of {h = −Gδ + C·χ} against the nullspace.
    pub family: SpanComparison,
}

impl HSpaceReport {
    pub fn matches_family(&self) -> bool {
        self.family.equal()
    }
}

/// Nullspace of C_abn h_nc − C_acn h_nb − C_nbc h_an + C_abc G = 0 over {h_an, G}.
pub fn replay_h_space<S: Scalar>(g: &GaugeAlgebra<S>) -> HSpaceReport {
    let dim = g.dim();
    let h = |a: usize, n: usize| a * dim + n;
    let gcol = dim * dim;
    let mut rows = Vec::new();
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                let mut r: SparseRow<S> = Vec::new();
                for n in 0..dim {
                    r.push((h(n, c), g.c(a, b, n).clone()));
                    r.push((h(n, b), g.c(a, c, n).neg()));
                    r.push((h(a, n), g.c(n, b, c).neg()));
                }
                r.push((gcol, g.c(a, b, c).clone()));
                let r = canonical_row(r);
                if !r.is_empty() {
                    rows.push(r);
                }
            }
        }
    }
    let ns = echelon(rows, gcol + 1).nullspace();
    let mut family: Vec<SparseRow<S>> = Vec::new();
    let mut dilation: SparseRow<S> = (0..dim).map(|a| (h(a, a), S::one().neg())).collect();
    dilation.push((gcol, S::one()));
    family.push(dilation);
    for c in 0..dim {
        let row: SparseRow<S> = (0..dim)
            .flat_map(|a| (0..dim).map(move |n| (a, n)))
            .map(|(a, n)| (h(a, n), g.c(a, n, c).clone()))
            .collect();
        family.push(canonical_row(row));
    }
    let cmp = compare_spans(&ns, &family, gcol + 1);
    let basis = ns
        .iter()
        .map(|v| {
            let mut dense = vec![S::zero().text(); gcol + 1];
            for (c, x) in v {
                dense[*c] = x.text();
            }
            dense
        })
        .collect();
    HSpaceReport {
        dimension: ns.len(),
        basis,
        family: cmp,
    }
}

/// Index of f_{lk} (l < k) among the six independent components.
fn f_slot(l: usize, k: usize) -> usize {
    const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    PAIRS.iter().position(|&p| p == (l, k)).expect("l < k")
}

/// Linear form over ∂_λ f (6·4 slots) and ∂_μ G (4 slots).
type Form = [Rat; 28];

fn zero_form() -> Form {
    std::array::from_fn(|_| Rat::from_i64(0))
}

/// Adds c·∂_d f_{lk} with f antisymmetric.
fn add_df(form: &mut Form, l: usize, k: usize, d: usize, c: i64) {
    if l == k || c == 0 {
        return;
    }
    let (s, lo, hi) = if l < k { (c, l, k) } else { (-c, k, l) };
    form[f_slot(lo, hi) * 4 + d] += Rat::from_i64(s);
}

/// The twelve equations ∂_ν f_μν + ε_μνλα ∂_λ f_αν + ∂_μ G = 0 for μ ≠ ν, keyed by (μ, ν).
fn f_g_system() -> Vec<((usize, usize), Form)> {
    let mut out = Vec::new();
    for mu in 0..4 {
        for nu in 0..4 {
            if mu == nu {
                continue;
            }
            let mut e = zero_form();
            add_df(&mut e, mu, nu, nu, 1);
            for l in 0..4 {
                for al in 0..4 {
                    add_df(&mut e, al, nu, l, levi_civita(mu, nu, l, al) as i64);
                }
            }
            e[24 + mu] += Rat::from_i64(1);
            out.push(((mu, nu), e));
        }
    }
    out
}

/// The pairs (λ, κ), (λ', κ') with p = f10 + f23, q = f20 + f31, r = f30 + f12.
const PQR: [[(usize, usize); 2]; 3] = [[(1, 0), (2, 3)], [(2, 0), (3, 1)], [(3, 0), (1, 2)]];

/// Rewrites a G-free form in ∂p, ∂q, ∂r and the complementary ∂p̄, ∂q̄, ∂r̄
/// (p̄ = f10 − f23 and so on); returns (self-dual part [3][4], remainder [3][4]).
fn to_pqr(form: &Form) -> ([[Rat; 4]; 3], [[Rat; 4]; 3]) {
    let half = Rat::new(1.into(), 2.into());
    let mut main: [[Rat; 4]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| Rat::from_i64(0)));
    let mut rest = main.clone();
    // coefficient of ∂f_{lk} as stored (l < k), with sign for the (λ, κ) orientation
    let coef = |l: usize, k: usize, d: usize| -> Rat {
        if l < k {
            form[f_slot(l, k) * 4 + d].clone()
        } else {
            -form[f_slot(k, l) * 4 + d].clone()
        }
    };
    for (i, [(l1, k1), (l2, k2)]) in PQR.iter().enumerate() {
        for d in 0..4 {
            // f1 = (P + P̄)/2, f2 = (P − P̄)/2
            let c1 = coef(*l1, *k1, d);
            let c2 = coef(*l2, *k2, d);
            main[i][d] = (&c1 + &c2) * &half;
            rest[i][d] = (&c1 - &c2) * &half;
        }
    }
    (main, rest)
}

#[derive(Clone, Debug, Serialize)]
pub struct PqrReport {
    pub degree: usize,
    pub dimension: usize,
    pub equations: usize,
    /// True when the G-free equations involve p, q, r only.
    pub only_pqr: bool,
    /// Nullspace against the printed closed forms truncated to `degree`.
    pub closed_form: SpanComparison,
    /// Basis as (p, q, r) polynomial texts.
    pub basis: Vec<[String; 3]>,
}

/// The 8 first-order equations on (p, q, r), as coefficients [eq][func][λ].
pub fn pqr_equations() -> (Vec<[[Rat; 4]; 3]>, bool) {
    let sys = f_g_system();
    let mut out = Vec::new();
    let mut only = true;
    for mu in 0..4 {
        let forms: Vec<&Form> = sys.iter().filter(|((m, _), _)| *m == mu).map(|(_, f)| f).collect();
        for w in forms.windows(2) {
            let diff: Form = std::array::from_fn(|i| &w[0][i] - &w[1][i]);
            debug_assert!(diff[24..].iter().all(num_traits::Zero::is_zero));
            let (main, rest) = to_pqr(&diff);
            if rest.iter().flatten().any(|c| !num_traits::Zero::is_zero(c)) {
                only = false;
            }
            out.push(main);
        }
    }
    (out, only)
}

fn coord(i: usize) -> Expression<Rat> {
    Expression::var(Symbol::coord(i))
}

/// The ten members (p, q, r) of the printed closed forms, each with one constant set to 1.
pub fn pqr_closed_forms() -> Vec<(&'static str, [Expression<Rat>; 3])> {
    let (t, x, y, z) = (coord(0), coord(1), coord(2), coord(3));
    let one = Expression::<Rat>::one;
    let zero = Expression::<Rat>::zero;
    let two = Rat::from_i64(2);
    let sq = |e: &Expression<Rat>| e * e;
    vec![
        ("e", [one(), zero(), zero()]),
        ("e'", [zero(), one(), zero()]),
        ("e''", [zero(), zero(), one()]),
        ("e0", [t.clone(), -z.clone(), y.clone()]),
        ("e1", [x.clone(), y.clone(), z.clone()]),
        ("e2", [y.clone(), -x.clone(), -t.clone()]),
        ("e3", [z.clone(), t.clone(), -x.clone()]),
        (
            "e00",
            [
                sq(&t) + sq(&x) - sq(&y) - sq(&z),
                (&x * &y - &t * &z).scale(&two),
                (&x * &z + &t * &y).scale(&two),
            ],
        ),
        (
            "e12",
            [
                (&x * &y + &t * &z).scale(&two),
                sq(&t) - sq(&x) + sq(&y) - sq(&z),
                (&y * &z - &t * &x).scale(&two),
            ],
        ),
        (
            "e13",
            [
                (&x * &z - &t * &y).scale(&two),
                (&t * &x + &y * &z).scale(&two),
                sq(&t) - sq(&x) - sq(&y) + sq(&z),
            ],
        ),
    ]
}

/// Solves the 8 equations on a polynomial ansatz of the given degree.
pub fn replay_pqr(degree: usize) -> PqrReport {
    let monos = x_monomials(degree);
    let nm = monos.len();
    let col = |f: usize, m: usize| f * nm + m;
    let (eqs, only_pqr) = pqr_equations();
    let mut rows = Vec::new();
    for eq in &eqs {
        let mut by_mono: std::collections::BTreeMap<Monomial, SparseRow<Rat>> = Default::default();
        for (f, coeffs) in eq.iter().enumerate() {
            for (d, c) in coeffs.iter().enumerate() {
                if num_traits::Zero::is_zero(c) {
                    continue;
                }
                for (i, m) in monos.iter().enumerate() {
                    if let Some((e, rest)) = m.divide_by(Symbol::coord(d)) {
                        by_mono
                            .entry(rest)
                            .or_default()
                            .push((col(f, i), c * Rat::from_i64(e as i64)));
                    }
                }
            }
        }
        rows.extend(by_mono.into_values().map(canonical_row).filter(|r| !r.is_empty()));
    }
    let ncols = 3 * nm;
    let ns = echelon(rows, ncols).nullspace();
    let index: std::collections::HashMap<&Monomial, usize> = monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let closed: Vec<SparseRow<Rat>> = pqr_closed_forms()
        .into_iter()
        .filter(|(_, fs)| fs.iter().all(|e| e.degree_in(Symbol::is_coord) as usize <= degree))
        .map(|(_, fs)| {
            let mut r = Vec::new();
            for (f, e) in fs.iter().enumerate() {
                for (m, c) in e.terms() {
                    r.push((col(f, index[m]), c.clone()));
                }
            }
            canonical_row(r)
        })
        .collect();
    let basis = ns
        .iter()
        .map(|v| {
            let mut fs: [Expression<Rat>; 3] = std::array::from_fn(|_| Expression::zero());
            for (c, x) in v {
                fs[c / nm].add_term(monos[c % nm].clone(), x.clone());
            }
            fs.map(|e| e.text())
        })
        .collect();
    PqrReport {
        degree,
        dimension: ns.len(),
        equations: eqs.len(),
        only_pqr,
        closed_form: compare_spans(&ns, &closed, ncols),
        basis,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_space_su2() {
        let r = replay_h_space(&GaugeAlgebra::su2());
        assert_eq!(r.dimension, 4);
        assert!(r.matches_family());
    }

    #[test]
    fn h_space_su3_numeric() {
        let r = replay_h_space(&GaugeAlgebra::su3());
        assert_eq!(r.dimension, 9);
        assert!(r.matches_family());
    }

    #[test]
    fn dilatation_member_satisfies_h_system() {
        // h = −δ, G = 1
        let g = GaugeAlgebra::su2();
        let h = |a: usize, n: usize| Rat::from_i64(-i64::from(a == n));
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let mut v = g.c(a, b, c).clone();
                    for n in 0..3 {
                        v += g.c(a, b, n) * h(n, c) - g.c(a, c, n) * h(n, b) - g.c(n, b, c) * h(a, n);
                    }
                    assert_eq!(v, Rat::from_i64(0));
                }
            }
        }
    }

    #[test]
    fn eight_equations_only_pqr() {
        let (eqs, only) = pqr_equations();
        assert_eq!(eqs.len(), 8);
        assert!(only);
    }

    #[test]
    fn pqr_dimensions() {
        for (deg, want) in [(1, 7), (2, 10), (3, 10)] {
            let r = replay_pqr(deg);
            assert_eq!(r.dimension, want, "degree {deg}");
            assert!(r.closed_form.equal(), "degree {deg}: {:?}", r.closed_form);
        }
    }
}
