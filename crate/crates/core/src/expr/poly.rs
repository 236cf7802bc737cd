//! Sparse multivariate polynomials with canonical form.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use smallvec::SmallVec;

use super::symbol::Symbol;
use crate::scalar::{Rat, Scalar};

/// Power product of symbols, sorted by symbol with merged positive exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(SmallVec<[(Symbol, u16); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(s: Symbol) -> Self {
        Monomial(smallvec::smallvec![(s, 1)])
    }

    pub fn from_factors(factors: impl IntoIterator<Item = (Symbol, u16)>) -> Self {
        let mut v: SmallVec<[(Symbol, u16); 4]> = factors.into_iter().filter(|f| f.1 > 0).collect();
        v.sort_by_key(|f| f.0);
        let mut out: SmallVec<[(Symbol, u16); 4]> = SmallVec::with_capacity(v.len());
        for (s, e) in v {
            match out.last_mut() {
                Some(last) if last.0 == s => last.1 += e,
                _ => out.push((s, e)),
            }
        }
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Symbol, u16)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|f| f.1 as u32).sum()
    }

    pub fn degree_in(&self, pred: impl Fn(Symbol) -> bool) -> u32 {
        self.0.iter().filter(|f| pred(f.0)).map(|f| f.1 as u32).sum()
    }

    pub fn exponent(&self, s: Symbol) -> u16 {
        self.0.iter().find(|f| f.0 == s).map_or(0, |f| f.1)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// Splits into (factors matching `pred`, the rest).
    pub fn split(&self, pred: impl Fn(Symbol) -> bool) -> (Monomial, Monomial) {
        let mut yes = SmallVec::new();
        let mut no = SmallVec::new();
        for &f in &self.0 {
            if pred(f.0) {
                yes.push(f);
            } else {
                no.push(f);
            }
        }
        (Monomial(yes), Monomial(no))
    }

    /// Removes one power of `s`, returning the exponent it had.
    pub fn divide_by(&self, s: Symbol) -> Option<(u16, Monomial)> {
        let pos = self.0.iter().position(|f| f.0 == s)?;
        let e = self.0[pos].1;
        let mut out = self.0.clone();
        if e == 1 {
            out.remove(pos);
        } else {
            out[pos].1 -= 1;
        }
        Some((e, Monomial(out)))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, (s, e)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "{s}")?;
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Polynomial with coefficients in `S`; no zero coefficients are stored, so
/// structural equality is mathematical equality.
#[derive(Clone, Debug, PartialEq)]
pub struct Expression<S> {
    terms: BTreeMap<Monomial, S>,
}

pub type Expr = Expression<Rat>;

impl<S: Scalar> Default for Expression<S> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<S: Scalar> Expression<S> {
    pub fn zero() -> Self {
        Expression { terms: BTreeMap::new() }
    }

    pub fn constant(c: S) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn int(n: i64) -> Self {
        Self::constant(S::from_i64(n))
    }

    pub fn one() -> Self {
        Self::constant(S::one())
    }

    pub fn var(s: Symbol) -> Self {
        Self::term(Monomial::var(s), S::one())
    }

    pub fn term(m: Monomial, c: S) -> Self {
        let mut e = Self::zero();
        e.add_term(m, c);
        e
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, S)>) -> Self {
        let mut e = Self::zero();
        for (m, c) in terms {
            e.add_term(m, c);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &S)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, S)> {
        self.terms.into_iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> S {
        self.terms.get(m).cloned().unwrap_or_else(S::zero)
    }

    /// Adds `c·m` in place.
    pub fn add_term(&mut self, m: Monomial, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().add(&c);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    /// `self += c · other`
    pub fn add_scaled(&mut self, other: &Self, c: &S) {
        for (m, v) in &other.terms {
            self.add_term(m.clone(), v.mul(c));
        }
    }

    /// `self += c · m · other`
    pub fn add_product(&mut self, other: &Self, m: &Monomial, c: &S) {
        for (om, v) in &other.terms {
            self.add_term(om.mul(m), v.mul(c));
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::from_terms(self.terms.iter().map(|(m, v)| (m.clone(), v.mul(c))))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Replaces symbols by expressions; `None` leaves the symbol in place.
    pub fn substitute(&self, f: impl Fn(Symbol) -> Option<Self>) -> Self {
        let mut cache: BTreeMap<Symbol, Option<Self>> = BTreeMap::new();
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut kept = Vec::new();
            let mut acc = Self::constant(c.clone());
            for &(s, e) in m.factors() {
                let sub = cache.entry(s).or_insert_with(|| f(s));
                match sub {
                    Some(r) => {
                        for _ in 0..e {
                            acc = &acc * r;
                        }
                    }
                    None => kept.push((s, e)),
                }
                if acc.is_zero() {
                    break;
                }
            }
            if acc.is_zero() {
                continue;
            }
            let km = Monomial::from_factors(kept);
            for (am, av) in acc.terms {
                out.add_term(am.mul(&km), av);
            }
        }
        out
    }

    pub fn derivative(&self, s: Symbol) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if let Some((e, rest)) = m.divide_by(s) {
                out.add_term(rest, c.mul(&S::from_i64(e as i64)));
            }
        }
        out
    }

    /// Total degree in the symbols matching `pred` (0 for the zero polynomial).
    pub fn degree_in(&self, pred: impl Fn(Symbol) -> bool + Copy) -> u32 {
        self.terms.keys().map(|m| m.degree_in(pred)).max().unwrap_or(0)
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        let mut v: Vec<Symbol> = self
            .terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|f| f.0))
            .collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn any_symbol(&self, pred: impl Fn(Symbol) -> bool) -> bool {
        self.terms.keys().any(|m| m.factors().iter().any(|f| pred(f.0)))
    }

    /// Groups by the factors matching `pred`: e = Σ key·value.
    pub fn collect_by(&self, pred: impl Fn(Symbol) -> bool + Copy) -> BTreeMap<Monomial, Self> {
        let mut out: BTreeMap<Monomial, Self> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (key, rest) = m.split(pred);
            out.entry(key).or_default().add_term(rest, c.clone());
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    pub fn eval_f64(&self, f: impl Fn(Symbol) -> f64) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                m.factors()
                    .iter()
                    .fold(c.to_f64(), |acc, &(s, e)| acc * f(s).powi(e as i32))
            })
            .sum()
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
    }

    /// Divides by the first coefficient in canonical order.
    pub fn normalized(&self) -> Self {
        match self.terms.values().next() {
            Some(lead) => {
                let inv = S::one().div(lead);
                self.scale(&inv)
            }
            None => Self::zero(),
        }
    }

    /// Some(r) with self = r·other, for a nonzero `other`.
    pub fn ratio_to(&self, other: &Self) -> Option<S> {
        if self.terms.len() != other.terms.len() {
            return None;
        }
        let (m0, o0) = other.terms.iter().next()?;
        let r = self.terms.get(m0)?.div(o0);
        for (m, o) in &other.terms {
            let v = self.terms.get(m)?;
            if !v.sub(&o.mul(&r)).is_zero() {
                return None;
            }
        }
        Some(r)
    }

    pub fn map_coefficients<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Expression<T> {
        Expression::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    pub fn retain_terms(&self, pred: impl Fn(&Monomial) -> bool) -> Self {
        Expression {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| pred(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn text(&self) -> String {
        self.to_string()
    }
}

impl<S: Scalar> fmt::Display for Expression<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let mag = if negative { c.neg() } else { c.clone() };
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write!(f, "{}", mag.text())?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", mag.text())?;
            }
        }
        Ok(())
    }
}

impl<S: Scalar> Add for &Expression<S> {
    type Output = Expression<S>;
    fn add(self, rhs: &Expression<S>) -> Expression<S> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<S: Scalar> Add for Expression<S> {
    type Output = Expression<S>;
    fn add(mut self, rhs: Expression<S>) -> Expression<S> {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl<S: Scalar> Sub for &Expression<S> {
    type Output = Expression<S>;
    fn sub(self, rhs: &Expression<S>) -> Expression<S> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.neg());
        }
        out
    }
}

impl<S: Scalar> Sub for Expression<S> {
    type Output = Expression<S>;
    fn sub(mut self, rhs: Expression<S>) -> Expression<S> {
        for (m, c) in rhs.terms {
            self.add_term(m, c.neg());
        }
        self
    }
}

impl<S: Scalar> Neg for &Expression<S> {
    type Output = Expression<S>;
    fn neg(self) -> Expression<S> {
        Expression {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }
}

impl<S: Scalar> Neg for Expression<S> {
    type Output = Expression<S>;
    fn neg(self) -> Expression<S> {
        -&self
    }
}

impl<S: Scalar> Mul for &Expression<S> {
    type Output = Expression<S>;
    fn mul(self, rhs: &Expression<S>) -> Expression<S> {
        let mut out = Expression::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1.mul(c2));
            }
        }
        out
    }
}

impl<S: Scalar> Mul for Expression<S> {
    type Output = Expression<S>;
    fn mul(self, rhs: Expression<S>) -> Expression<S> {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x(i: usize) -> Expr {
        Expr::var(Symbol::coord(i))
    }

    #[test]
    fn like_terms_merge() {
        assert_eq!(&x(0) + &x(0), x(0).scale(&Rat::from_i64(2)));
        assert_eq!((&x(0) + &x(0)).text(), "2*x0");
    }

    #[test]
    fn annihilation() {
        let e = Expr::var(Symbol::field(0, 1)) + Expr::var(Symbol::field(1, 0));
        let p = &e * &Expr::zero();
        assert!(p.is_zero());
        assert_eq!(p.text(), "0");
    }

    #[test]
    fn difference_of_squares() {
        let one = Expr::one();
        let p = &(&x(0) + &one) * &(&x(0) - &one);
        assert_eq!(p, &x(0).pow(2) - &one);
        assert_eq!(p.text(), "-1 + x0^2");
    }

    #[test]
    fn text_form_is_sorted_with_rationals() {
        let e = Expr::from_terms([
            (Monomial::var(Symbol::field(0, 2)), Rat::ratio(-3, 2)),
            (Monomial::var(Symbol::coord(1)), Rat::ratio(1, 4)),
            (Monomial::one(), Rat::from_i64(2)),
        ]);
        assert_eq!(e.text(), "2 + 1/4*x1 - 3/2*A[0,2]");
    }

    #[test]
    fn derivative_and_substitute() {
        let e = &x(0).pow(3) * &x(1);
        assert_eq!(
            e.derivative(Symbol::coord(0)),
            (&x(0).pow(2) * &x(1)).scale(&Rat::from_i64(3))
        );
        let s = e.substitute(|s| (s == Symbol::coord(1)).then(|| &x(0) + &Expr::one()));
        assert_eq!(s, &x(0).pow(4) + &x(0).pow(3));
    }

    #[test]
    fn ratio_detection() {
        let a = &x(0) - &x(1).scale(&Rat::from_i64(2));
        let b = a.scale(&Rat::ratio(-3, 5));
        assert_eq!(b.ratio_to(&a), Some(Rat::ratio(-3, 5)));
        assert_eq!((&b + &Expr::one()).ratio_to(&a), None);
        assert_eq!(b.normalized(), a.normalized());
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let term = (0usize..3, 0usize..3, 0u16..3, -4i64..5, 1i64..4).prop_map(|(i, j, e, n, d)| {
            Expr::term(
                Monomial::from_factors([(Symbol::coord(i), e), (Symbol::field(0, j), 1)]),
                Rat::ratio(n, d),
            )
        });
        proptest::collection::vec(term, 0..5).prop_map(|ts| ts.into_iter().fold(Expr::zero(), |acc, t| acc + t))
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_expr(), b in arb_expr(), c in arb_expr()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn canonical_form_independent_of_build_order(a in arb_expr(), b in arb_expr(), c in arb_expr()) {
            let left = (a.clone() + b.clone()) * c.clone();
            let right = (&c * &b) + (&a * &c);
            prop_assert_eq!(left.text(), right.text());
        }
    }
}
