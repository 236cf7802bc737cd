//! Prolonged action of a point vector field on the self-duality equations and
//! extraction of the determining system.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::GaugeAlgebra;
use crate::expr::{collect, substitute_sdym, Expression, IndependentPairs, Monomial, Symbol};
use crate::scalar::Scalar;
use crate::tensor::{kronecker, levi_civita, z_component, z_support};

fn jet<S: Scalar>(a: usize, sigma: usize, lambda: usize) -> Expression<S> {
    Expression::var(Symbol::jet(a, sigma, lambda))
}

/// F_{aρσ} = ∂_ρ A_{aσ} − ∂_σ A_{aρ} + C_abc A_{bρ} A_{cσ}
pub fn field_strength<S: Scalar>(a: usize, rho: usize, sigma: usize, g: &GaugeAlgebra<S>) -> Expression<S> {
    let mut e = &jet(a, sigma, rho) - &jet(a, rho, sigma);
    for (_, b, c, v) in g.with_first(a) {
        e.add_term(
            Monomial::from_factors([(Symbol::field(*b, rho), 1), (Symbol::field(*c, sigma), 1)]),
            v.clone(),
        );
    }
    e
}

/// (δ_μρ δ_νσ − ½ ε_μνρσ) F_{aρσ}
pub fn sdym_expr<S: Scalar>(mu: usize, nu: usize, a: usize, g: &GaugeAlgebra<S>) -> Expression<S> {
    let mut out = Expression::zero();
    for rho in 0..4 {
        for sigma in 0..4 {
            let w = S::from_i64(
                2 * (kronecker(mu, rho) * kronecker(nu, sigma)) as i64 - levi_civita(mu, nu, rho, sigma) as i64,
            )
            .mul(&S::ratio(1, 2));
            if !w.is_zero() {
                out.add_scaled(&field_strength(a, rho, sigma, g), &w);
            }
        }
    }
    out
}

/// Left side of the prolonged action pr⁽¹⁾v(SDYM_{μνa}) written with the Z tensor,
/// in terms of generic symbols for H, Φ and their partials.
pub fn prolonged_action_expr<S: Scalar>(mu: usize, nu: usize, a: usize, g: &GaugeAlgebra<S>) -> Expression<S> {
    let dim = g.dim();
    let z = z_support(mu, nu);
    let mut out = Expression::zero();
    let v = |s: Symbol| Monomial::var(s);
    let s8 = |x: usize| x as u8;

    // (∂_λ Φ_aκ + C_abc A_bλ Φ_cκ) Z_μλνκ
    for &(lambda, kappa, zv) in &z {
        let zs = S::from_i64(zv as i64);
        out.add_term(v(Symbol::DPhi(s8(a), s8(kappa), s8(lambda))), zs.clone());
        for (_, b, c, cv) in g.with_first(a) {
            out.add_term(
                Monomial::from_factors([(Symbol::field(*b, lambda), 1), (Symbol::Phi(s8(*c), s8(kappa)), 1)]),
                cv.mul(&zs),
            );
        }
    }
    // − (∂_λ A_nα)(∂_β A_aκ) ∂H_β/∂A_nα Z_μλνκ
    for &(lambda, kappa, zv) in &z {
        for n in 0..dim {
            for alpha in 0..4 {
                for beta in 0..4 {
                    out.add_term(
                        Monomial::from_factors([
                            (Symbol::jet(n, alpha, lambda), 1),
                            (Symbol::jet(a, kappa, beta), 1),
                            (Symbol::DHdA(s8(beta), s8(n), s8(alpha)), 1),
                        ]),
                        S::from_i64(-(zv as i64)),
                    );
                }
            }
        }
    }
    // (∂_λ A_nα) [∂Φ_aκ/∂A_nα Z_μλνκ − ∂_κ H_λ Z_μκνα δ_an]
    for &(lambda, kappa, zv) in &z {
        for n in 0..dim {
            for alpha in 0..4 {
                out.add_term(
                    Monomial::from_factors([
                        (Symbol::jet(n, alpha, lambda), 1),
                        (Symbol::DPhidA(s8(a), s8(kappa), s8(n), s8(alpha)), 1),
                    ]),
                    S::from_i64(zv as i64),
                );
            }
        }
    }
    // the H term carries Z_μκνα: relabel the support as (κ, α)
    for &(kappa, alpha, zv) in &z {
        for lambda in 0..4 {
            out.add_term(
                Monomial::from_factors([
                    (Symbol::jet(a, alpha, lambda), 1),
                    (Symbol::DH(s8(lambda), s8(kappa)), 1),
                ]),
                S::from_i64(-(zv as i64)),
            );
        }
    }
    out
}

/// Which coefficient group a condition came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Quadratic,
    Linear,
    Zeroth,
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Group::Quadratic => "quadratic",
            Group::Linear => "linear",
            Group::Zeroth => "zeroth",
        };
        f.write_str(s)
    }
}

/// Where a condition was first found: the equation instance and the jet monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Label {
    pub mu: usize,
    pub nu: usize,
    pub a: usize,
    pub jet: Monomial,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mu={} nu={} a={} jet={}", self.mu, self.nu, self.a, self.jet)
    }
}

#[derive(Clone, Debug)]
pub struct Condition<S> {
    pub group: Group,
    /// First occurrence in (μ, ν, a) order.
    pub label: Label,
    /// Later occurrences of the same condition up to a rational factor.
    pub duplicates: Vec<Label>,
    pub expr: Expression<S>,
}

impl<S> Condition<S> {
    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        std::iter::once(&self.label).chain(&self.duplicates)
    }
}

/// Coefficient conditions of the prolonged action, grouped by jet degree.
#[derive(Clone, Debug)]
pub struct DeterminingSystem<S> {
    pub dim: usize,
    pub choice: IndependentPairs,
    pub quadratic: Vec<Condition<S>>,
    pub linear: Vec<Condition<S>>,
    pub zeroth: Vec<Condition<S>>,
    /// Jet-free remainder of every instance μ < ν, before deduplication.
    pub zeroth_by_instance: Vec<((usize, usize, usize), Expression<S>)>,
}

impl<S: Scalar> DeterminingSystem<S> {
    pub fn group(&self, group: Group) -> &[Condition<S>] {
        match group {
            Group::Quadratic => &self.quadratic,
            Group::Linear => &self.linear,
            Group::Zeroth => &self.zeroth,
        }
    }

    pub fn conditions(&self) -> impl Iterator<Item = &Condition<S>> {
        self.quadratic.iter().chain(&self.linear).chain(&self.zeroth)
    }

    pub fn len(&self) -> usize {
        self.quadratic.len() + self.linear.len() + self.zeroth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Substituted and collected prolonged action for one (μ, ν, a).
pub fn instance_groups<S: Scalar>(
    mu: usize,
    nu: usize,
    a: usize,
    g: &GaugeAlgebra<S>,
    choice: IndependentPairs,
) -> Vec<(Monomial, Expression<S>)> {
    let action = prolonged_action_expr(mu, nu, a, g);
    let on_shell = substitute_sdym(&action, g, choice).expect("prolonged action holds only raw jets");
    collect(&on_shell).into_iter().collect()
}

fn dedup_key<S: Scalar>(e: &Expression<S>) -> String {
    e.normalized().text()
}

pub fn extract_determining_system<S: Scalar>(g: &GaugeAlgebra<S>) -> DeterminingSystem<S> {
    extract_determining_system_with(g, IndependentPairs::Temporal)
}

/// Collects every coefficient of every instance μ < ν (the action is
/// antisymmetric in μν) and deduplicates conditions equal up to a factor.
pub fn extract_determining_system_with<S: Scalar>(
    g: &GaugeAlgebra<S>,
    choice: IndependentPairs,
) -> DeterminingSystem<S> {
    let dim = g.dim();
    let mut instances = Vec::new();
    for mu in 0..4 {
        for nu in (mu + 1)..4 {
            for a in 0..dim {
                instances.push((mu, nu, a));
            }
        }
    }
    let per_instance: Vec<_> = instances
        .par_iter()
        .map(|&(mu, nu, a)| ((mu, nu, a), instance_groups(mu, nu, a, g, choice)))
        .collect();

    let mut seen: HashMap<(Group, String), (usize, usize)> = HashMap::new();
    let mut groups: [Vec<(String, Condition<S>)>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    let mut zeroth_by_instance = Vec::new();
    for ((mu, nu, a), entries) in per_instance {
        let mut zeroth = Expression::zero();
        for (jet, expr) in entries {
            let group = match jet.degree() {
                0 => Group::Zeroth,
                1 => Group::Linear,
                2 => Group::Quadratic,
                d => unreachable!("jet degree {d} in a first-order prolongation"),
            };
            if group == Group::Zeroth {
                zeroth = expr.clone();
            }
            let key = dedup_key(&expr);
            let slot = match group {
                Group::Quadratic => 0,
                Group::Linear => 1,
                Group::Zeroth => 2,
            };
            let label = Label { mu, nu, a, jet };
            if let Some(&(s, i)) = seen.get(&(group, key.clone())) {
                groups[s][i].1.duplicates.push(label);
                continue;
            }
            seen.insert((group, key.clone()), (slot, groups[slot].len()));
            groups[slot].push((
                key,
                Condition {
                    group,
                    label,
                    duplicates: Vec::new(),
                    expr,
                },
            ));
        }
        zeroth_by_instance.push(((mu, nu, a), zeroth));
    }
    let [quadratic, linear, zeroth] = groups.map(|mut v| {
        v.sort_by(|x, y| x.0.cmp(&y.0));
        v.into_iter().map(|(_, c)| c).collect::<Vec<_>>()
    });
    DeterminingSystem {
        dim,
        choice,
        quadratic,
        linear,
        zeroth,
        zeroth_by_instance,
    }
}

/// pr⁽¹⁾v applied to an arbitrary expression in A and u, built directly from
/// the prolongation formula for Φ_{dκλ}. Used as an independent route to the
/// Z-form of the prolonged action.
pub fn apply_first_prolongation<S: Scalar>(e: &Expression<S>, dim: usize) -> Expression<S> {
    let s8 = |x: usize| x as u8;
    let mut out = Expression::zero();
    for d in 0..dim {
        for kappa in 0..4 {
            let da = e.derivative(Symbol::field(d, kappa));
            if !da.is_zero() {
                out = out + &da * &Expression::var(Symbol::Phi(s8(d), s8(kappa)));
            }
            for lambda in 0..4 {
                let du = e.derivative(Symbol::jet(d, kappa, lambda));
                if du.is_zero() {
                    continue;
                }
                // Φ_dκλ = ∂_λΦ_dκ − ∂_λH_β u_dκβ + u_nαλ ∂Φ_dκ/∂A_nα − u_nαλ u_dκβ ∂H_β/∂A_nα
                let mut phi = Expression::var(Symbol::DPhi(s8(d), s8(kappa), s8(lambda)));
                for beta in 0..4 {
                    phi.add_term(
                        Monomial::from_factors([
                            (Symbol::DH(s8(beta), s8(lambda)), 1),
                            (Symbol::jet(d, kappa, beta), 1),
                        ]),
                        S::from_i64(-1),
                    );
                }
                for n in 0..dim {
                    for alpha in 0..4 {
                        phi.add_term(
                            Monomial::from_factors([
                                (Symbol::jet(n, alpha, lambda), 1),
                                (Symbol::DPhidA(s8(d), s8(kappa), s8(n), s8(alpha)), 1),
                            ]),
                            S::one(),
                        );
                        for beta in 0..4 {
                            phi.add_term(
                                Monomial::from_factors([
                                    (Symbol::jet(n, alpha, lambda), 1),
                                    (Symbol::jet(d, kappa, beta), 1),
                                    (Symbol::DHdA(s8(beta), s8(n), s8(alpha)), 1),
                                ]),
                                S::from_i64(-1),
                            );
                        }
                    }
                }
                out = out + &du * &phi;
            }
        }
    }
    out
}

/// Z-form of the self-duality expression: Z_μλνκ (u_aκλ + ½ C_abc A_bλ A_cκ).
pub fn sdym_expr_z_form<S: Scalar>(mu: usize, nu: usize, a: usize, g: &GaugeAlgebra<S>) -> Expression<S> {
    let mut out = Expression::zero();
    let half = S::ratio(1, 2);
    for lambda in 0..4 {
        for kappa in 0..4 {
            let zv = z_component(mu, lambda, nu, kappa);
            if zv == 0 {
                continue;
            }
            let zs = S::from_i64(zv as i64);
            out.add_term(Monomial::var(Symbol::jet(a, kappa, lambda)), zs.clone());
            for (_, b, c, cv) in g.with_first(a) {
                out.add_term(
                    Monomial::from_factors([(Symbol::field(*b, lambda), 1), (Symbol::field(*c, kappa), 1)]),
                    cv.mul(&zs).mul(&half),
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::scalar::Rat;

    fn su2() -> GaugeAlgebra<Rat> {
        GaugeAlgebra::su2()
    }

    #[test]
    fn sdym_diagonal_vanishes_and_is_antisymmetric() {
        let g = su2();
        for a in 0..3 {
            assert!(sdym_expr(0, 0, a, &g).is_zero());
            assert_eq!(sdym_expr(1, 0, a, &g), -sdym_expr(0, 1, a, &g));
        }
    }

    #[test]
    fn sdym_01_is_f01_minus_f23() {
        let g = su2();
        for a in 0..3 {
            let want = &field_strength(a, 0, 1, &g) - &field_strength(a, 2, 3, &g);
            assert_eq!(sdym_expr(0, 1, a, &g), want);
        }
    }

    #[test]
    fn z_form_matches_projector_form() {
        let g = su2();
        for mu in 0..4 {
            for nu in 0..4 {
                for a in 0..3 {
                    assert_eq!(sdym_expr(mu, nu, a, &g), sdym_expr_z_form(mu, nu, a, &g));
                }
            }
        }
    }

    #[test]
    fn prolonged_action_matches_direct_prolongation() {
        let g = su2();
        for mu in 0..4 {
            for nu in 0..4 {
                for a in 0..3 {
                    let direct = apply_first_prolongation(&sdym_expr(mu, nu, a, &g), 3);
                    assert_eq!(prolonged_action_expr(mu, nu, a, &g), direct, "({mu},{nu},{a})");
                }
            }
        }
    }

    #[test]
    fn prolonged_action_antisymmetric_in_mu_nu() {
        let g = su2();
        for mu in 0..4 {
            for nu in 0..4 {
                for a in 0..3 {
                    assert_eq!(
                        prolonged_action_expr(mu, nu, a, &g),
                        -prolonged_action_expr(nu, mu, a, &g)
                    );
                }
            }
        }
    }

    fn zero_generator(s: Symbol) -> Option<Expr> {
        s.is_unknown().then(Expr::zero)
    }

    #[test]
    fn empty_and_translation_generators_annihilate() {
        let g = su2();
        for (mu, nu, a) in [(0, 1, 2), (1, 3, 0), (2, 0, 1)] {
            let e = prolonged_action_expr(mu, nu, a, &g);
            assert!(e.substitute(zero_generator).is_zero());
            // H = (1, 2, 3, 4), Φ = 0
            let translation = |s: Symbol| match s {
                Symbol::H(k) => Some(Expr::int(i64::from(k) + 1)),
                s if s.is_unknown() => Some(Expr::zero()),
                _ => None,
            };
            assert!(e.substitute(translation).is_zero());
        }
    }

    /// Symbols of the dilatation generator H_λ = x_λ, Φ_aκ = −A_aκ.
    fn dilatation(s: Symbol) -> Option<Expr> {
        Some(match s {
            Symbol::H(l) => Expr::var(Symbol::coord(l as usize)),
            Symbol::Phi(a, k) => -Expr::var(Symbol::field(a as usize, k as usize)),
            Symbol::DH(k, l) => Expr::int(i64::from(k == l)),
            Symbol::DPhi(..) | Symbol::DHdA(..) => Expr::zero(),
            Symbol::DPhidA(a, k, n, al) => Expr::int(-i64::from(a == n && k == al)),
            _ => return None,
        })
    }

    #[test]
    fn dilatation_scales_the_equations() {
        // the dilatation acts with weight −2 on the field strength
        let g = su2();
        for (mu, nu) in [(0, 1), (0, 2), (1, 3), (2, 3)] {
            for a in 0..3 {
                let acted = prolonged_action_expr(mu, nu, a, &g).substitute(dilatation);
                let want = sdym_expr(mu, nu, a, &g).scale(&Rat::from_i64(-2));
                assert_eq!(acted, want);
                let on_shell = substitute_sdym(&acted, &g, IndependentPairs::Temporal).unwrap();
                let sdym_on_shell = substitute_sdym(&sdym_expr(mu, nu, a, &g), &g, IndependentPairs::Temporal).unwrap();
                assert!(sdym_on_shell.is_zero());
                assert!(on_shell.is_zero());
            }
        }
    }

    #[test]
    fn dilatation_numeric_cross_check() {
        // evaluate both sides at pseudo-random rational points
        let g = su2();
        let acted = prolonged_action_expr(0, 2, 1, &g).substitute(dilatation);
        let target = sdym_expr(0, 2, 1, &g);
        for k in 0..5 {
            let val = |s: Symbol| -> f64 {
                let h = match s {
                    Symbol::Field(a, sg) => (a as u64) * 7 + sg as u64,
                    Symbol::Jet(a, sg, l) => (a as u64) * 31 + (sg as u64) * 5 + l as u64 + 100,
                    _ => 0,
                };
                ((h * 2654435761 + k * 97) % 1000) as f64 / 500.0 - 1.0
            };
            let lhs = acted.eval_f64(val);
            let rhs = -2.0 * target.eval_f64(val);
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn determining_system_shape_su2() {
        let g = su2();
        let sys = extract_determining_system(&g);
        assert!(!sys.quadratic.is_empty() && !sys.linear.is_empty() && !sys.zeroth.is_empty());
        for c in sys.conditions() {
            assert!(!c.expr.any_symbol(Symbol::is_jet_variable));
        }
        for c in &sys.quadratic {
            assert!(!c.expr.any_symbol(|s| s.is_field() || s.is_coord()));
            for (m, _) in c.expr.terms() {
                assert_eq!(m.degree(), 1);
                assert!(matches!(m.factors()[0].0, Symbol::DHdA(..)));
            }
            // imposing ∂H/∂A = 0 kills the group
            assert!(c
                .expr
                .substitute(|s| matches!(s, Symbol::DHdA(..)).then(Expr::zero))
                .is_zero());
        }
        for c in &sys.zeroth {
            let reduced = c.expr.substitute(|s| matches!(s, Symbol::DHdA(..)).then(Expr::zero));
            for (m, _) in reduced.terms() {
                assert_eq!(m.degree_in(Symbol::is_unknown), 1);
                assert!(m.degree_in(Symbol::is_field) <= 2);
            }
        }
    }

    #[test]
    fn extraction_order_independent() {
        // merge in reverse instance order and compare canonical condition sets
        let g = su2();
        let sys = extract_determining_system(&g);
        let mut keys: Vec<String> = sys
            .conditions()
            .map(|c| format!("{}:{}", c.group, c.expr.normalized()))
            .collect();
        let mut reversed = Vec::new();
        for mu in (0..4).rev() {
            for nu in ((mu + 1)..4).rev() {
                for a in (0..3).rev() {
                    for (jet, e) in instance_groups(mu, nu, a, &g, IndependentPairs::Temporal) {
                        let group = match jet.degree() {
                            0 => Group::Zeroth,
                            1 => Group::Linear,
                            _ => Group::Quadratic,
                        };
                        reversed.push(format!("{group}:{}", e.normalized()));
                    }
                }
            }
        }
        reversed.sort();
        reversed.dedup();
        keys.sort();
        assert_eq!(keys, reversed);
    }
}
