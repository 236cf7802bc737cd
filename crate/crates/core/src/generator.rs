//! Point vector fields H_κ ∂/∂x_κ + Φ_aκ ∂/∂A_aκ with H polynomial in x and
//! Φ affine in A, the closed-form symmetry family, and generator spec files.

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::Value;

use crate::algebra::GaugeAlgebra;
use crate::error::{Error, Result};
use crate::expr::{Expression, Monomial, Symbol};
use crate::scalar::{parse_rational, Scalar};

/// Maximum total degree in x of any H or Φ coefficient.
pub const DEGREE_CAP: usize = 3;

/// x-monomials of total degree ≤ `max_degree`, ordered by degree then exponents.
pub fn x_monomials(max_degree: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    for d in 0..=max_degree {
        let mut exps = Vec::new();
        for e0 in (0..=d).rev() {
            for e1 in (0..=d - e0).rev() {
                for e2 in (0..=d - e0 - e1).rev() {
                    exps.push([e0, e1, e2, d - e0 - e1 - e2]);
                }
            }
        }
        out.extend(exps.into_iter().map(x_monomial));
    }
    out
}

pub fn x_monomial(exps: [usize; 4]) -> Monomial {
    Monomial::from_factors(
        exps.iter()
            .enumerate()
            .filter(|(_, e)| **e > 0)
            .map(|(i, e)| (Symbol::coord(i), *e as u16)),
    )
}

fn x<S: Scalar>(i: usize) -> Expression<S> {
    Expression::var(Symbol::coord(i))
}

fn a_field<S: Scalar>(a: usize, k: usize) -> Expression<S> {
    Expression::var(Symbol::field(a, k))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryGenerator<S> {
    dim: usize,
    h: Vec<Expression<S>>,
    /// Φ_aκ at index 4a + κ.
    phi: Vec<Expression<S>>,
}

impl<S: Scalar> SymmetryGenerator<S> {
    pub fn zero(dim: usize) -> Self {
        SymmetryGenerator {
            dim,
            h: vec![Expression::zero(); 4],
            phi: vec![Expression::zero(); 4 * dim],
        }
    }

    /// Validates shapes, A-independence of H, affinity of Φ in A and the x-degree cap.
    pub fn new(dim: usize, h: Vec<Expression<S>>, phi: Vec<Expression<S>>) -> Result<Self> {
        if h.len() != 4 {
            return Err(Error::ShapeMismatch {
                expected: 4,
                found: h.len(),
            });
        }
        if phi.len() != 4 * dim {
            return Err(Error::ShapeMismatch {
                expected: 4 * dim,
                found: phi.len(),
            });
        }
        let allowed = |s: Symbol| s.is_coord() || s.is_field() || s.is_param();
        for e in h.iter().chain(&phi) {
            if let Some(s) = e.symbols().into_iter().find(|s| !allowed(*s)) {
                return Err(Error::InvalidGenerator(format!("unexpected symbol {s}")));
            }
            if let Some(s) = e
                .symbols()
                .into_iter()
                .find(|s| matches!(s, Symbol::Field(a, _) if *a as usize >= dim))
            {
                return Err(Error::InvalidGenerator(format!("field {s} outside the algebra")));
            }
        }
        if h.iter().any(|e| e.any_symbol(Symbol::is_field)) {
            return Err(Error::InvalidGenerator("H depends on A".into()));
        }
        if phi.iter().any(|e| e.degree_in(Symbol::is_field) > 1) {
            return Err(Error::InvalidGenerator("Φ is not affine in A".into()));
        }
        let degree = h
            .iter()
            .chain(&phi)
            .map(|e| e.degree_in(Symbol::is_coord) as usize)
            .max()
            .unwrap_or(0);
        if degree > DEGREE_CAP {
            return Err(Error::DegreeOverflow {
                degree,
                cap: DEGREE_CAP,
            });
        }
        Ok(SymmetryGenerator { dim, h, phi })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self, k: usize) -> &Expression<S> {
        &self.h[k]
    }

    pub fn phi(&self, a: usize, k: usize) -> &Expression<S> {
        &self.phi[4 * a + k]
    }

    pub fn h_all(&self) -> &[Expression<S>] {
        &self.h
    }

    pub fn phi_all(&self) -> &[Expression<S>] {
        &self.phi
    }

    /// Coefficient of A_nα in Φ_aκ.
    pub fn phi_linear(&self, a: usize, k: usize, n: usize, alpha: usize) -> Expression<S> {
        self.phi(a, k).derivative(Symbol::field(n, alpha))
    }

    /// A-free part of Φ_aκ.
    pub fn phi_inhom(&self, a: usize, k: usize) -> Expression<S> {
        self.phi(a, k).retain_terms(|m| m.degree_in(Symbol::is_field) == 0)
    }

    pub fn is_zero(&self) -> bool {
        self.h.iter().chain(&self.phi).all(Expression::is_zero)
    }

    /// Value of an unknown-function symbol (H, Φ or a partial) for this generator.
    pub fn unknown_value(&self, s: Symbol) -> Option<Expression<S>> {
        let u = |v: u8| v as usize;
        Some(match s {
            Symbol::H(k) => self.h[u(k)].clone(),
            Symbol::Phi(a, k) => self.phi(u(a), u(k)).clone(),
            Symbol::DH(k, l) => self.h[u(k)].derivative(Symbol::coord(u(l))),
            Symbol::DPhi(a, k, l) => self.phi(u(a), u(k)).derivative(Symbol::coord(u(l))),
            Symbol::DHdA(b, n, al) => self.h[u(b)].derivative(Symbol::field(u(n), u(al))),
            Symbol::DPhidA(a, k, n, al) => self.phi_linear(u(a), u(k), u(n), u(al)),
            _ => return None,
        })
    }

    /// v(F) = H_β ∂F/∂x_β + Φ_aκ ∂F/∂A_aκ.
    pub fn apply(&self, f: &Expression<S>) -> Expression<S> {
        let mut out = Expression::zero();
        for (beta, h) in self.h.iter().enumerate() {
            if !h.is_zero() {
                let d = f.derivative(Symbol::coord(beta));
                if !d.is_zero() {
                    out = out + h * &d;
                }
            }
        }
        for a in 0..self.dim {
            for k in 0..4 {
                let p = self.phi(a, k);
                if !p.is_zero() {
                    let d = f.derivative(Symbol::field(a, k));
                    if !d.is_zero() {
                        out = out + p * &d;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &S) -> Self {
        SymmetryGenerator {
            dim: self.dim,
            h: self.h.iter().map(|e| e.scale(c)).collect(),
            phi: self.phi.iter().map(|e| e.scale(c)).collect(),
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(&Expression<S>, &Expression<S>) -> Expression<S>) -> Self {
        assert_eq!(self.dim, other.dim, "generators over different algebras");
        SymmetryGenerator {
            dim: self.dim,
            h: self.h.iter().zip(&other.h).map(|(a, b)| f(a, b)).collect(),
            phi: self.phi.iter().zip(&other.phi).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn substitute_params(&self, f: impl Fn(Symbol) -> Option<Expression<S>> + Copy) -> Self {
        SymmetryGenerator {
            dim: self.dim,
            h: self.h.iter().map(|e| e.substitute(f)).collect(),
            phi: self.phi.iter().map(|e| e.substitute(f)).collect(),
        }
    }

    /// Flattened coefficients keyed by (component, monomial); components are
    /// H_0..H_3 followed by Φ in (a, κ) order.
    pub fn coefficients(&self) -> BTreeMap<(usize, Monomial), S> {
        let mut out = BTreeMap::new();
        for (i, e) in self.h.iter().chain(&self.phi).enumerate() {
            for (m, c) in e.terms() {
                out.insert((i, m.clone()), c.clone());
            }
        }
        out
    }

    pub fn to_f64(&self) -> SymmetryGenerator<f64> {
        let conv = |e: &Expression<S>| e.map_coefficients(|c| c.to_f64());
        SymmetryGenerator {
            dim: self.dim,
            h: self.h.iter().map(conv).collect(),
            phi: self.phi.iter().map(conv).collect(),
        }
    }
}

/// [v₁, v₂] with H-part v₁(H₂) − v₂(H₁) and Φ-part v₁(Φ₂) − v₂(Φ₁).
pub fn bracket<S: Scalar>(g1: &SymmetryGenerator<S>, g2: &SymmetryGenerator<S>) -> Result<SymmetryGenerator<S>> {
    if g1.dim != g2.dim {
        return Err(Error::ShapeMismatch {
            expected: g1.dim,
            found: g2.dim,
        });
    }
    let part = |f1: &Expression<S>, f2: &Expression<S>| &g1.apply(f2) - &g2.apply(f1);
    let h: Vec<_> = g1.h.iter().zip(&g2.h).map(|(a, b)| part(a, b)).collect();
    let phi: Vec<_> = g1.phi.iter().zip(&g2.phi).map(|(a, b)| part(a, b)).collect();
    SymmetryGenerator::new(g1.dim, h, phi)
}

/// Parameters of the closed-form solution: translations a, rotations b,
/// accelerations c, dilatation d and gauge functions χ.
#[derive(Clone, Debug, PartialEq)]
pub struct ConformalGaugeParams<S> {
    pub a: [Expression<S>; 4],
    pub b: [[Expression<S>; 4]; 4],
    pub c: [Expression<S>; 4],
    pub d: Expression<S>,
    pub chi: Vec<Expression<S>>,
}

impl<S: Scalar> ConformalGaugeParams<S> {
    pub fn zero(dim: usize) -> Self {
        let z = Expression::zero;
        ConformalGaugeParams {
            a: [z(), z(), z(), z()],
            b: std::array::from_fn(|_| [z(), z(), z(), z()]),
            c: [z(), z(), z(), z()],
            d: z(),
            chi: vec![z(); dim],
        }
    }

    /// Every constant a named parameter; χ_a a general polynomial of the given degree.
    pub fn symbolic(dim: usize, chi_degree: usize) -> Self {
        let p = |name: String| Expression::var(Symbol::param(&name));
        let mut out = Self::zero(dim);
        for i in 0..4 {
            out.a[i] = p(format!("a{i}"));
            out.c[i] = p(format!("c{i}"));
        }
        for l in 0..4 {
            for al in (l + 1)..4 {
                let v = p(format!("b{l}{al}"));
                out.b[al][l] = -&v;
                out.b[l][al] = v;
            }
        }
        out.d = p("d".into());
        for (a, chi) in out.chi.iter_mut().enumerate() {
            for m in x_monomials(chi_degree) {
                let exps: Vec<String> = (0..4).map(|i| m.exponent(Symbol::coord(i)).to_string()).collect();
                let coeff = Symbol::param(&format!("chi{a}_{}", exps.join("")));
                *chi = &*chi + &Expression::term(m.mul(&Monomial::var(coeff)), S::one());
            }
        }
        out
    }

    pub fn check(&self) -> Result<()> {
        for l in 0..4 {
            for al in 0..4 {
                if !(&self.b[l][al] + &self.b[al][l]).is_zero() {
                    return Err(Error::InvalidGenerator(format!(
                        "b is not antisymmetric at ({l}, {al})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// H_λ = −½ c_λ x_α x_α + c_α x_λ x_α + b_λα x_α + d x_λ + a_λ,
/// Φ_aκ = (−c_κ x_α + c_α x_κ + b_κα) A_aα − (d + c_α x_α) A_aκ + C_abd χ_d A_bκ + ∂_κ χ_a.
pub fn instantiate_closed_form<S: Scalar>(
    p: &ConformalGaugeParams<S>,
    g: &GaugeAlgebra<S>,
) -> Result<SymmetryGenerator<S>> {
    let dim = g.dim();
    if p.chi.len() != dim {
        return Err(Error::ShapeMismatch {
            expected: dim,
            found: p.chi.len(),
        });
    }
    p.check()?;
    let xx = (0..4).fold(Expression::zero(), |acc, i| acc + &x::<S>(i) * &x(i));
    let cx = (0..4).fold(Expression::zero(), |acc, i| acc + &p.c[i] * &x(i));
    let half = S::ratio(1, 2);
    let h: Vec<_> = (0..4)
        .map(|l| {
            let mut e = -(&p.c[l] * &xx).scale(&half) + &x(l) * &cx + &p.d * &x(l) + p.a[l].clone();
            for al in 0..4 {
                e = e + &p.b[l][al] * &x(al);
            }
            e
        })
        .collect();
    let mut phi = Vec::with_capacity(4 * dim);
    for a in 0..dim {
        for k in 0..4 {
            let mut e = p.chi[a].derivative(Symbol::coord(k));
            for al in 0..4 {
                let coef = -(&p.c[k] * &x(al)) + &p.c[al] * &x(k) + p.b[k][al].clone();
                e = e + &coef * &a_field(a, al);
            }
            e = e - &(&p.d + &cx) * &a_field(a, k);
            for (_, b, dd, v) in g.with_first(a) {
                e = e + (&p.chi[*dd] * &a_field(*b, k)).scale(v);
            }
            phi.push(e);
        }
    }
    SymmetryGenerator::new(dim, h, phi)
}

/// Named members of the closed-form family.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Named {
    Translation(usize),
    Rotation(usize, usize),
    Dilatation,
    Acceleration(usize),
    /// χ_a = x^exps
    Gauge(usize, [usize; 4]),
}

impl std::fmt::Display for Named {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Named::Translation(m) => write!(f, "translation{m}"),
            Named::Rotation(l, a) => write!(f, "rotation{l}{a}"),
            Named::Dilatation => write!(f, "dilatation"),
            Named::Acceleration(m) => write!(f, "acceleration{m}"),
            Named::Gauge(a, e) => write!(f, "gauge{a}_{}{}{}{}", e[0], e[1], e[2], e[3]),
        }
    }
}

impl Named {
    pub fn params<S: Scalar>(&self, dim: usize) -> ConformalGaugeParams<S> {
        let mut p = ConformalGaugeParams::zero(dim);
        let one = Expression::one;
        match *self {
            Named::Translation(m) => p.a[m] = one(),
            Named::Rotation(l, a) => {
                p.b[l][a] = one();
                p.b[a][l] = -one();
            }
            Named::Dilatation => p.d = one(),
            Named::Acceleration(m) => p.c[m] = one(),
            Named::Gauge(a, e) => p.chi[a] = Expression::term(x_monomial(e), S::one()),
        }
        p
    }

    pub fn generator<S: Scalar>(&self, g: &GaugeAlgebra<S>) -> SymmetryGenerator<S> {
        instantiate_closed_form(&self.params(g.dim()), g).expect("catalog generators are well formed")
    }

    /// H has degree 0, 1, 1, 2 for translations, rotations, dilatation, accelerations.
    pub fn h_degree(&self) -> usize {
        match self {
            Named::Translation(_) | Named::Gauge(..) => 0,
            Named::Rotation(..) | Named::Dilatation => 1,
            Named::Acceleration(_) => 2,
        }
    }
}

/// The 15 conformal generators: 4 translations, 6 rotations, dilatation, 4 accelerations.
pub fn conformal_names() -> Vec<Named> {
    let mut out: Vec<Named> = (0..4).map(Named::Translation).collect();
    for l in 0..4 {
        for a in (l + 1)..4 {
            out.push(Named::Rotation(l, a));
        }
    }
    out.push(Named::Dilatation);
    out.extend((0..4).map(Named::Acceleration));
    out
}

/// Gauge generators χ_a = x^m for every monomial of degree ≤ `degree`.
pub fn gauge_names(dim: usize, degree: usize) -> Vec<Named> {
    let mut out = Vec::new();
    for a in 0..dim {
        for m in x_monomials(degree) {
            out.push(Named::Gauge(
                a,
                std::array::from_fn(|i| m.exponent(Symbol::coord(i)) as usize),
            ));
        }
    }
    out
}

/// The closed-form family inside an ansatz with H-degree ≤ `h_degree` and
/// χ-degree ≤ `chi_degree`.
pub fn closed_form_family(dim: usize, h_degree: usize, chi_degree: usize) -> Vec<Named> {
    let mut out: Vec<Named> = conformal_names()
        .into_iter()
        .filter(|n| n.h_degree() <= h_degree)
        .collect();
    out.extend(gauge_names(dim, chi_degree.min(h_degree)));
    out
}

/// Generator spec file: closed-form parameters with rational or symbolic values.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    #[serde(default)]
    pub a: Option<Vec<Value>>,
    #[serde(default)]
    pub b: Vec<(usize, usize, Value)>,
    #[serde(default)]
    pub c: Option<Vec<Value>>,
    #[serde(default)]
    pub d: Option<Value>,
    #[serde(default)]
    pub chi: BTreeMap<String, BTreeMap<String, Value>>,
}

/// A number, a rational string, or a parameter name with optional leading '-'.
pub fn parse_value<S: Scalar>(v: &Value) -> Result<Expression<S>> {
    match v {
        Value::Number(n) => Ok(Expression::constant(S::from_rat(&parse_rational(&n.to_string())?))),
        Value::String(s) => {
            let t = s.trim();
            if let Ok(r) = parse_rational(t) {
                return Ok(Expression::constant(S::from_rat(&r)));
            }
            let (neg, name) = match t.strip_prefix('-') {
                Some(rest) => (true, rest.trim()),
                None => (false, t),
            };
            let ident = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ident {
                return Err(Error::Parse(format!(
                    "value {s:?} is neither a rational nor a parameter name"
                )));
            }
            let e = Expression::var(Symbol::param(name));
            Ok(if neg { -e } else { e })
        }
        other => Err(Error::Parse(format!("unsupported value {other}"))),
    }
}

fn four<S: Scalar>(field: &str, v: &Option<Vec<Value>>) -> Result<[Expression<S>; 4]> {
    let mut out: [Expression<S>; 4] = std::array::from_fn(|_| Expression::zero());
    if let Some(vals) = v {
        if vals.len() != 4 {
            return Err(Error::InvalidGenerator(format!(
                "\"{field}\" needs 4 entries, found {}",
                vals.len()
            )));
        }
        for (o, v) in out.iter_mut().zip(vals) {
            *o = parse_value(v)?;
        }
    }
    Ok(out)
}

impl GeneratorSpec {
    pub fn parse(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    /// Builds validated parameters; b entries fill their transposes with the
    /// opposite sign, and any inconsistent pair is rejected.
    pub fn to_params<S: Scalar>(&self, dim: usize) -> Result<ConformalGaugeParams<S>> {
        let mut p = ConformalGaugeParams::zero(dim);
        p.a = four("a", &self.a)?;
        p.c = four("c", &self.c)?;
        if let Some(d) = &self.d {
            p.d = parse_value(d)?;
        }
        let mut given: BTreeMap<(usize, usize), Expression<S>> = BTreeMap::new();
        for (l, al, v) in &self.b {
            if *l >= 4 || *al >= 4 {
                return Err(Error::IndexOutOfRange {
                    kind: "spacetime",
                    value: (*l).max(*al),
                    bound: 4,
                });
            }
            if given.insert((*l, *al), parse_value(v)?).is_some() {
                return Err(Error::InvalidGenerator(format!("b entry ({l}, {al}) given twice")));
            }
        }
        for (&(l, al), v) in &given {
            if l == al && !v.is_zero() {
                return Err(Error::InvalidGenerator(format!(
                    "b is not antisymmetric: diagonal entry ({l}, {l}) is nonzero"
                )));
            }
            let t = given.get(&(al, l)).cloned().unwrap_or_else(|| -v);
            if !(v + &t).is_zero() {
                return Err(Error::InvalidGenerator(format!(
                    "b is not antisymmetric at ({l}, {al})"
                )));
            }
            p.b[l][al] = v.clone();
            p.b[al][l] = t;
        }
        for (idx, poly) in &self.chi {
            let a: usize = idx
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("chi key {idx:?} is not a gauge index")))?;
            if a >= dim {
                return Err(Error::IndexOutOfRange {
                    kind: "gauge",
                    value: a,
                    bound: dim,
                });
            }
            for (exps, v) in poly {
                let parts: Vec<usize> = exps
                    .split(',')
                    .map(|t| t.trim().parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::Parse(format!("exponent tuple {exps:?}")))?;
                let e: [usize; 4] = parts
                    .try_into()
                    .map_err(|_| Error::Parse(format!("exponent tuple {exps:?} needs 4 entries")))?;
                let degree: usize = e.iter().sum();
                if degree > DEGREE_CAP {
                    return Err(Error::DegreeOverflow {
                        degree,
                        cap: DEGREE_CAP,
                    });
                }
                p.chi[a] = &p.chi[a] + &(&parse_value::<S>(v)? * &Expression::term(x_monomial(e), S::one()));
            }
        }
        p.check()?;
        Ok(p)
    }
}
