//! Jet basis and on-shell substitution of the self-duality equations.
//!
//! For each gauge index n the sixteen first derivatives ∂_λ A_{nσ} split into
//! ten symmetric combinations S and six antisymmetric ones
//! W_{pq} = ∂_p A_{nq} − ∂_q A_{np}. Self-duality fixes three of the six W in
//! terms of the other three plus quadratic terms in A:
//!
//! W_{ij} = W_{0k} + Q_k with (i, j, k) cyclic in (1, 2, 3) and
//! Q_k = C_nbc (A_{b0} A_{ck} + A_{bj} A_{ci}).

use std::collections::BTreeMap;

use super::poly::{Expression, Monomial};
use super::symbol::Symbol;
use crate::algebra::GaugeAlgebra;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Which three antisymmetric combinations per gauge index are kept independent.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum IndependentPairs {
    /// (0,1), (0,2), (0,3)
    #[default]
    Temporal,
    /// (2,3), (3,1), (1,2)
    Spatial,
}

/// (i, j) such that (i, j, k) is a cyclic permutation of (1, 2, 3).
fn cyclic_pair(k: usize) -> (usize, usize) {
    match k {
        1 => (2, 3),
        2 => (3, 1),
        3 => (1, 2),
        _ => unreachable!("k in 1..=3"),
    }
}

impl IndependentPairs {
    pub fn pairs(self) -> [(usize, usize); 3] {
        match self {
            IndependentPairs::Temporal => [(0, 1), (0, 2), (0, 3)],
            IndependentPairs::Spatial => [cyclic_pair(1), cyclic_pair(2), cyclic_pair(3)],
        }
    }

    fn contains(self, p: usize, q: usize) -> bool {
        self.pairs().contains(&(p, q))
    }
}

/// Q_k for gauge index n.
pub fn sdym_quadratic<S: Scalar>(n: usize, k: usize, g: &GaugeAlgebra<S>) -> Expression<S> {
    let (i, j) = cyclic_pair(k);
    let mut out = Expression::zero();
    for (_, b, c, v) in g.with_first(n) {
        out.add_term(
            Monomial::from_factors([(Symbol::field(*b, 0), 1), (Symbol::field(*c, k), 1)]),
            v.clone(),
        );
        out.add_term(
            Monomial::from_factors([(Symbol::field(*b, j), 1), (Symbol::field(*c, i), 1)]),
            v.clone(),
        );
    }
    out
}

/// The 13·dim independent jet coordinates after on-shell reduction.
#[derive(Clone, Copy, Debug)]
pub struct JetBasis {
    pub dim: usize,
    pub choice: IndependentPairs,
}

impl JetBasis {
    pub fn new(dim: usize, choice: IndependentPairs) -> Self {
        JetBasis { dim, choice }
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out = Vec::with_capacity(13 * self.dim);
        for n in 0..self.dim {
            for l in 0..4 {
                for a in l..4 {
                    out.push(Symbol::JetSym(n as u8, l as u8, a as u8));
                }
            }
            for (p, q) in self.choice.pairs() {
                out.push(Symbol::JetAnti(n as u8, p as u8, q as u8));
            }
        }
        out
    }

    /// W_{n,pq} = ∂_p A_{nq} − ∂_q A_{np} in basis form.
    pub fn antisym<S: Scalar>(&self, n: usize, p: usize, q: usize, g: &GaugeAlgebra<S>) -> Expression<S> {
        if p == q {
            return Expression::zero();
        }
        if self.choice.contains(p, q) {
            return Expression::var(Symbol::JetAnti(n as u8, p as u8, q as u8));
        }
        if self.choice.contains(q, p) {
            return -Expression::var(Symbol::JetAnti(n as u8, q as u8, p as u8));
        }
        // dependent pair: orient as (0, k) or cyclic (i, j)
        let (sign, k) = if p == 0 {
            (1, q)
        } else if q == 0 {
            (-1, p)
        } else {
            let k = 6 - p - q;
            if cyclic_pair(k) == (p, q) {
                (1, k)
            } else {
                (-1, k)
            }
        };
        let quad = sdym_quadratic(n, k, g);
        let (i, j) = cyclic_pair(k);
        let oriented = match self.choice {
            // W_ij = T_0k + Q_k
            IndependentPairs::Temporal => {
                debug_assert!(p != 0 && q != 0);
                &Expression::var(Symbol::JetAnti(n as u8, 0, k as u8)) + &quad
            }
            // W_0k = T_ij − Q_k
            IndependentPairs::Spatial => {
                debug_assert!(p == 0 || q == 0);
                &Expression::var(Symbol::JetAnti(n as u8, i as u8, j as u8)) - &quad
            }
        };
        if sign > 0 {
            oriented
        } else {
            -oriented
        }
    }

    /// u_{nσλ} = ∂_λ A_{nσ} in basis form.
    pub fn express<S: Scalar>(&self, n: usize, sigma: usize, lambda: usize, g: &GaugeAlgebra<S>) -> Expression<S> {
        let half = S::ratio(1, 2);
        let (lo, hi) = (sigma.min(lambda), sigma.max(lambda));
        let sym = Expression::var(Symbol::JetSym(n as u8, lo as u8, hi as u8));
        if sigma == lambda {
            return sym.scale(&half);
        }
        (&sym + &self.antisym(n, lambda, sigma, g)).scale(&half)
    }
}

/// Rewrites every raw jet symbol on-shell in the basis of `choice`.
///
/// Basis symbols of the same choice pass through, so the map is idempotent.
pub fn substitute_sdym<S: Scalar>(
    e: &Expression<S>,
    g: &GaugeAlgebra<S>,
    choice: IndependentPairs,
) -> Result<Expression<S>> {
    if let Some(bad) = e.symbols().into_iter().find(|s| match *s {
        Symbol::JetAnti(_, p, q) => !choice.contains(p as usize, q as usize),
        Symbol::Jet(a, ..) | Symbol::JetSym(a, ..) => a as usize >= g.dim(),
        _ => false,
    }) {
        return Err(Error::UnknownSymbolKind(bad.to_string()));
    }
    let basis = JetBasis::new(g.dim(), choice);
    Ok(e.substitute(|s| match s {
        Symbol::Jet(a, sigma, lambda) => Some(basis.express(a as usize, sigma as usize, lambda as usize, g)),
        _ => None,
    }))
}

/// Groups an expression by its jet-variable monomial.
pub fn collect<S: Scalar>(e: &Expression<S>) -> BTreeMap<Monomial, Expression<S>> {
    e.collect_by(Symbol::is_jet_variable)
}
