//! Double-precision checks on an explicit instanton: pointwise residuals of
//! the self-duality equations and the ε² scaling of residuals along
//! symmetry directions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::GaugeAlgebra;
use crate::error::{Error, Result};
use crate::expr::{Expression, Symbol};
use crate::generator::SymmetryGenerator;
use crate::scalar::Scalar;
use crate::tensor::levi_civita;

pub type Point = [f64; 4];

/// Field values at a point. `a[4a+σ]`, `da[(4a+σ)·4+λ] = ∂_λ A_aσ`, and
/// optionally `dda[((4a+σ)·4+λ)·4+ρ] = ∂_ρ ∂_λ A_aσ`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSample {
    pub a: Vec<f64>,
    pub da: Vec<f64>,
    pub dda: Option<Vec<f64>>,
}

pub trait FieldEvaluator: Sync {
    fn dim(&self) -> usize;
    fn sample(&self, x: &Point) -> FieldSample;
}

/// Which 't Hooft symbol and overall sign the instanton uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct InstantonConvention {
    /// η (true) or η̄ (false)
    pub eta: bool,
    pub sign: i8,
}

/// The convention under which the instanton solves the equations with
/// ε_0123 = 1, C_abc = ε_abc and x_0 as the distinguished direction.
pub const INSTANTON_CONVENTION: InstantonConvention = InstantonConvention { eta: false, sign: 1 };

/// 't Hooft symbol with x_0 in the role of the fourth direction:
/// η_a,i,j = ε_a(i−1)(j−1), η_a,i,0 = ±δ_a(i−1), η_a,0,j = ∓δ_a(j−1).
pub fn thooft(eta: bool, a: usize, mu: usize, nu: usize) -> f64 {
    let mixed = if eta { 1.0 } else { -1.0 };
    match (mu, nu) {
        (0, 0) => 0.0,
        (i, 0) => mixed * f64::from(a + 1 == i),
        (0, j) => -mixed * f64::from(a + 1 == j),
        (i, j) => levi_civita(0, a + 1, i, j) as f64,
    }
}

/// A_aμ = 2 s η_aμν y_ν / (|y|² + ρ²), y = x − center.
#[derive(Clone, Debug)]
pub struct Instanton {
    pub rho: f64,
    pub center: Point,
    pub convention: InstantonConvention,
    eta: [[[f64; 4]; 4]; 3],
}

pub fn bpst_instanton(rho: f64, center: Point) -> Result<Instanton> {
    bpst_instanton_with(rho, center, INSTANTON_CONVENTION)
}

pub fn bpst_instanton_with(rho: f64, center: Point, convention: InstantonConvention) -> Result<Instanton> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidScale(rho));
    }
    let eta =
        std::array::from_fn(|a| std::array::from_fn(|m| std::array::from_fn(|n| thooft(convention.eta, a, m, n))));
    Ok(Instanton {
        rho,
        center,
        convention,
        eta,
    })
}

impl FieldEvaluator for Instanton {
    fn dim(&self) -> usize {
        3
    }

    fn sample(&self, x: &Point) -> FieldSample {
        let y: Point = std::array::from_fn(|i| x[i] - self.center[i]);
        let d = y.iter().map(|v| v * v).sum::<f64>() + self.rho * self.rho;
        let s = 2.0 * f64::from(self.convention.sign);
        let mut a = vec![0.0; 12];
        let mut da = vec![0.0; 48];
        let mut dda = vec![0.0; 192];
        for g in 0..3 {
            for m in 0..4 {
                let eta = &self.eta[g][m];
                let n: f64 = (0..4).map(|v| eta[v] * y[v]).sum();
                let i = 4 * g + m;
                a[i] = s * n / d;
                for l in 0..4 {
                    da[i * 4 + l] = s * (eta[l] / d - 2.0 * n * y[l] / (d * d));
                    for r in 0..4 {
                        let delta = f64::from(l == r);
                        dda[(i * 4 + l) * 4 + r] = s
                            * (-2.0 * (eta[l] * y[r] + eta[r] * y[l] + n * delta) / (d * d)
                                + 8.0 * n * y[l] * y[r] / (d * d * d));
                    }
                }
            }
        }
        FieldSample { a, da, dda: Some(dda) }
    }
}

/// The zero field.
#[derive(Clone, Copy, Debug)]
pub struct ZeroField(pub usize);

impl FieldEvaluator for ZeroField {
    fn dim(&self) -> usize {
        self.0
    }

    fn sample(&self, _: &Point) -> FieldSample {
        let d = self.0;
        FieldSample {
            a: vec![0.0; 4 * d],
            da: vec![0.0; 16 * d],
            dda: Some(vec![0.0; 64 * d]),
        }
    }
}

/// A field constant in x.
#[derive(Clone, Debug)]
pub struct ConstantField {
    pub dim: usize,
    pub a: Vec<f64>,
}

impl FieldEvaluator for ConstantField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn sample(&self, _: &Point) -> FieldSample {
        FieldSample {
            a: self.a.clone(),
            da: vec![0.0; 16 * self.dim],
            dda: Some(vec![0.0; 64 * self.dim]),
        }
    }
}

/// LHS − RHS of W_ij = W_0k + Q_k for (i, j, k) cyclic in (1, 2, 3), ordered
/// by k then gauge index, where W_pq = ∂_p A_q − ∂_q A_p.
pub fn sdym_residual(s: &FieldSample, g: &GaugeAlgebra<f64>) -> Vec<f64> {
    let dim = g.dim();
    let a = |b: usize, m: usize| s.a[4 * b + m];
    let du = |n: usize, sigma: usize, l: usize| s.da[(4 * n + sigma) * 4 + l];
    let w = |n: usize, p: usize, q: usize| du(n, q, p) - du(n, p, q);
    let mut out = Vec::with_capacity(3 * dim);
    for k in 1..4 {
        let (i, j) = match k {
            1 => (2, 3),
            2 => (3, 1),
            _ => (1, 2),
        };
        for n in 0..dim {
            let mut q = 0.0;
            for (_, b, c, v) in g.with_first(n) {
                q += v * (a(*b, 0) * a(*c, k) + a(*b, j) * a(*c, i));
            }
            out.push(w(n, i, j) - w(n, 0, k) - q);
        }
    }
    out
}

pub fn sdym_residual_numeric(f: &dyn FieldEvaluator, x: &Point, g: &GaugeAlgebra<f64>) -> Vec<f64> {
    sdym_residual(&f.sample(x), g)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[derive(Clone, Debug, Serialize)]
pub struct DerivativeCheck {
    pub points: usize,
    pub max_rel_error_first: f64,
    pub max_rel_error_second: f64,
}

impl DerivativeCheck {
    pub fn within(&self, tol: f64) -> bool {
        self.max_rel_error_first <= tol && self.max_rel_error_second <= tol
    }
}

/// Compares supplied derivatives with central differences of step `h`.
pub fn check_derivatives(f: &dyn FieldEvaluator, points: &[Point], h: f64) -> DerivativeCheck {
    let mut e1: f64 = 0.0;
    let mut e2: f64 = 0.0;
    let rel = |fd: f64, an: f64| (fd - an).abs() / an.abs().max(1.0);
    for x in points {
        let s = f.sample(x);
        for l in 0..4 {
            let mut xp = *x;
            let mut xm = *x;
            xp[l] += h;
            xm[l] -= h;
            let (sp, sm) = (f.sample(&xp), f.sample(&xm));
            for i in 0..s.a.len() {
                e1 = e1.max(rel((sp.a[i] - sm.a[i]) / (2.0 * h), s.da[i * 4 + l]));
            }
            if let Some(dda) = &s.dda {
                for i in 0..s.da.len() {
                    e2 = e2.max(rel((sp.da[i] - sm.da[i]) / (2.0 * h), dda[i * 4 + l]));
                }
            }
        }
    }
    DerivativeCheck {
        points: points.len(),
        max_rel_error_first: e1,
        max_rel_error_second: e2,
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    let step = inv;
    while i > 0 {
        out += (i % base) as f64 * inv;
        i /= base;
        inv *= step;
    }
    out
}

/// Halton points in [−2, 2]⁴ (bases 2, 3, 5, 7); the seed offsets the sequence.
pub fn halton_points(count: usize, seed: u64) -> Vec<Point> {
    (0..count as u64)
        .map(|i| {
            let k = seed + i + 1;
            std::array::from_fn(|d| 4.0 * radical_inverse(k, [2, 3, 5, 7][d]) - 2.0)
        })
        .collect()
}

/// Generator polynomials and their partials in f64, evaluated along a field.
#[derive(Clone, Debug)]
struct Compiled {
    dim: usize,
    h: Vec<Expression<f64>>,
    dh: Vec<Expression<f64>>,
    phi: Vec<Expression<f64>>,
    dphi: Vec<Expression<f64>>,
    /// ∂Φ_aκ/∂A_nα at index (4a+κ)·4dim + 4n+α
    dphida: Vec<Expression<f64>>,
}

fn compile<S: Scalar>(gen: &SymmetryGenerator<S>) -> Result<Compiled> {
    let g = gen.to_f64();
    let dim = g.dim();
    if let Some(p) = g
        .h_all()
        .iter()
        .chain(g.phi_all())
        .flat_map(|e| e.symbols())
        .find(|s| s.is_param())
    {
        return Err(Error::InvalidGenerator(format!(
            "numeric evaluation needs concrete values, found parameter {p}"
        )));
    }
    let h = g.h_all().to_vec();
    let phi = g.phi_all().to_vec();
    let dh = h
        .iter()
        .flat_map(|e| (0..4).map(move |l| e.derivative(Symbol::coord(l))))
        .collect();
    let dphi = phi
        .iter()
        .flat_map(|e| (0..4).map(move |l| e.derivative(Symbol::coord(l))))
        .collect();
    let dphida = phi
        .iter()
        .flat_map(|e| (0..dim).flat_map(move |n| (0..4).map(move |al| e.derivative(Symbol::field(n, al)))))
        .collect();
    Ok(Compiled {
        dim,
        h,
        dh,
        phi,
        dphi,
        dphida,
    })
}

/// Q_aκ = Φ_aκ(x, A) − H_β ∂_β A_aκ along a base field, with ∂_λ Q from the
/// chain rule. Needs second derivatives of the base field.
pub struct EvolutionaryRep<'a> {
    base: &'a dyn FieldEvaluator,
    gen: Compiled,
}

pub fn evolutionary_rep<'a, S: Scalar>(
    gen: &SymmetryGenerator<S>,
    base: &'a dyn FieldEvaluator,
) -> Result<EvolutionaryRep<'a>> {
    if gen.dim() != base.dim() {
        return Err(Error::ShapeMismatch {
            expected: base.dim(),
            found: gen.dim(),
        });
    }
    Ok(EvolutionaryRep {
        base,
        gen: compile(gen)?,
    })
}

impl FieldEvaluator for EvolutionaryRep<'_> {
    fn dim(&self) -> usize {
        self.gen.dim
    }

    fn sample(&self, x: &Point) -> FieldSample {
        let s = self.base.sample(x);
        let dda = s
            .dda
            .as_ref()
            .expect("evolutionary representative needs second derivatives of the field");
        let dim = self.gen.dim;
        let val = |sym: Symbol| match sym {
            Symbol::Coord(i) => x[i as usize],
            Symbol::Field(a, k) => s.a[4 * a as usize + k as usize],
            _ => unreachable!("compiled generators hold only x and A"),
        };
        let h: Vec<f64> = self.gen.h.iter().map(|e| e.eval_f64(val)).collect();
        let dh: Vec<f64> = self.gen.dh.iter().map(|e| e.eval_f64(val)).collect();
        let mut q = vec![0.0; 4 * dim];
        let mut dq = vec![0.0; 16 * dim];
        for i in 0..4 * dim {
            q[i] = self.gen.phi[i].eval_f64(val) - (0..4).map(|b| h[b] * s.da[i * 4 + b]).sum::<f64>();
            let dpa: Vec<f64> = (0..4 * dim)
                .map(|j| self.gen.dphida[i * 4 * dim + j].eval_f64(val))
                .collect();
            for l in 0..4 {
                let mut v = self.gen.dphi[i * 4 + l].eval_f64(val);
                for (j, c) in dpa.iter().enumerate() {
                    if *c != 0.0 {
                        v += c * s.da[j * 4 + l];
                    }
                }
                for b in 0..4 {
                    v -= dh[b * 4 + l] * s.da[i * 4 + b] + h[b] * dda[(i * 4 + b) * 4 + l];
                }
                dq[i * 4 + l] = v;
            }
        }
        FieldSample {
            a: q,
            da: dq,
            dda: None,
        }
    }
}

/// Q_aκ a random polynomial of degree ≤ 2 in x, independent of the field,
/// with coefficients in [−0.1, 0.1].
#[derive(Clone, Debug)]
pub struct RandomDirection {
    dim: usize,
    /// per component: constant, linear[4], quadratic[4][4] (symmetric use)
    coeffs: Vec<(f64, [f64; 4], [[f64; 4]; 4])>,
}

pub fn random_direction(dim: usize, seed: u64) -> RandomDirection {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = || rng.gen_range(-0.1..0.1);
    let coeffs = (0..4 * dim)
        .map(|_| {
            (
                u(),
                std::array::from_fn(|_| u()),
                std::array::from_fn(|_| std::array::from_fn(|_| u())),
            )
        })
        .collect();
    RandomDirection { dim, coeffs }
}

impl FieldEvaluator for RandomDirection {
    fn dim(&self) -> usize {
        self.dim
    }

    fn sample(&self, x: &Point) -> FieldSample {
        let mut a = Vec::with_capacity(4 * self.dim);
        let mut da = Vec::with_capacity(16 * self.dim);
        for (c0, c1, c2) in &self.coeffs {
            let mut v = *c0;
            for i in 0..4 {
                v += c1[i] * x[i];
                for j in 0..4 {
                    v += c2[i][j] * x[i] * x[j];
                }
            }
            a.push(v);
            for l in 0..4 {
                da.push(c1[l] + (0..4).map(|j| (c2[l][j] + c2[j][l]) * x[j]).sum::<f64>());
            }
        }
        FieldSample { a, da, dda: None }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowResult {
    pub eps_values: Vec<f64>,
    pub residual_norms: Vec<f64>,
    pub fitted_slope: f64,
}

/// Base residual above which a field is not accepted as a solution.
pub const SOLUTION_TOL: f64 = 1e-10;

pub fn validate_eps(eps: &[f64]) -> Result<()> {
    if eps.len() < 3 {
        return Err(Error::InvalidFlow(format!(
            "need at least 3 eps values, got {}",
            eps.len()
        )));
    }
    if let Some(e) = eps.iter().find(|e| !(**e > 1e-6 && **e < 1.0)) {
        return Err(Error::InvalidFlow(format!("eps {e:e} outside (1e-6, 1)")));
    }
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidFlow("eps values must be strictly decreasing".into()));
    }
    Ok(())
}

/// Least-squares slope of log r against log ε.
pub fn loglog_slope(eps: &[f64], res: &[f64]) -> f64 {
    let xs: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = res.iter().map(|r| r.max(f64::MIN_POSITIVE).ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Max-norm residual of A + εQ over the points for each ε, and the log-log slope.
pub fn flow_residual_scaling(
    f: &dyn FieldEvaluator,
    direction: &dyn FieldEvaluator,
    eps_list: &[f64],
    g: &GaugeAlgebra<f64>,
    points: &[Point],
) -> Result<FlowResult> {
    validate_eps(eps_list)?;
    if points.is_empty() {
        return Err(Error::InvalidFlow("no sample points".into()));
    }
    if f.dim() != g.dim() || direction.dim() != g.dim() {
        return Err(Error::ShapeMismatch {
            expected: g.dim(),
            found: f.dim().max(direction.dim()),
        });
    }
    let samples: Vec<(FieldSample, FieldSample)> = points.iter().map(|x| (f.sample(x), direction.sample(x))).collect();
    for (i, (s, _)) in samples.iter().enumerate() {
        let r = max_abs(&sdym_residual(s, g));
        if r >= SOLUTION_TOL {
            return Err(Error::NotASolution { residual: r, point: i });
        }
    }
    let residual_norms: Vec<f64> = eps_list
        .iter()
        .map(|&eps| {
            samples
                .iter()
                .map(|(s, q)| {
                    let moved = FieldSample {
                        a: s.a.iter().zip(&q.a).map(|(a, b)| a + eps * b).collect(),
                        da: s.da.iter().zip(&q.da).map(|(a, b)| a + eps * b).collect(),
                        dda: None,
                    };
                    max_abs(&sdym_residual(&moved, g))
                })
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(FlowResult {
        fitted_slope: loglog_slope(eps_list, &residual_norms),
        eps_values: eps_list.to_vec(),
        residual_norms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{conformal_names, Named};
    use crate::scalar::Rat;

    const CENTER: Point = [0.3, -0.2, 0.1, 0.4];

    fn su2() -> GaugeAlgebra<f64> {
        GaugeAlgebra::<Rat>::su2().to_f64()
    }

    #[test]
    fn exactly_one_convention_is_self_dual() {
        let g = su2();
        let pts = halton_points(20, 0);
        let mut good = Vec::new();
        for eta in [true, false] {
            for sign in [1, -1] {
                let c = InstantonConvention { eta, sign };
                let f = bpst_instanton_with(1.0, CENTER, c).unwrap();
                let r = pts
                    .iter()
                    .map(|x| max_abs(&sdym_residual_numeric(&f, x, &g)))
                    .fold(0.0, f64::max);
                if r < 1e-12 {
                    good.push(c);
                }
            }
        }
        assert_eq!(good, vec![INSTANTON_CONVENTION]);
    }

    #[test]
    fn instanton_basics() {
        let f = bpst_instanton(1.0, CENTER).unwrap();
        assert!(f.sample(&CENTER).a.iter().all(|v| *v == 0.0));
        assert!(matches!(bpst_instanton(0.0, CENTER), Err(Error::InvalidScale(_))));
        assert!(matches!(bpst_instanton(-1.0, CENTER), Err(Error::InvalidScale(_))));
        // |A| ~ 2/|x| along an axis
        let f0 = bpst_instanton(1.0, [0.0; 4]).unwrap();
        let r = 1e4;
        let m = max_abs(&f0.sample(&[r, 0.0, 0.0, 0.0]).a);
        assert!((m * r - 2.0).abs() < 1e-6);
    }

    #[test]
    fn residual_examples() {
        let g = su2();
        assert!(sdym_residual_numeric(&ZeroField(3), &[0.5; 4], &g)
            .iter()
            .all(|v| *v == 0.0));
        // A_{b0} = δ_b1, A_{c1} = δ_c2
        let mut a = vec![0.0; 12];
        a[4] = 1.0;
        a[4 * 2 + 1] = 1.0;
        let r = sdym_residual_numeric(&ConstantField { dim: 3, a }, &[0.0; 4], &g);
        assert_eq!(r, vec![-1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn derivative_consistency() {
        let f = bpst_instanton(1.0, CENTER).unwrap();
        let c = check_derivatives(&f, &halton_points(50, 7), 1e-4);
        assert!(c.within(1e-6), "{c:?}");
    }

    #[test]
    fn evolutionary_examples() {
        let g = GaugeAlgebra::<Rat>::su2();
        let f = bpst_instanton(1.0, CENTER).unwrap();
        let x = [0.7, -0.4, 1.1, 0.2];
        let s = f.sample(&x);
        let t = evolutionary_rep(&Named::Translation(0).generator(&g), &f)
            .unwrap()
            .sample(&x);
        for i in 0..12 {
            assert!((t.a[i] + s.da[i * 4]).abs() < 1e-15);
        }
        let d = evolutionary_rep(&Named::Dilatation.generator(&g), &f)
            .unwrap()
            .sample(&x);
        for i in 0..12 {
            let want = -s.a[i] - (0..4).map(|b| x[b] * s.da[i * 4 + b]).sum::<f64>();
            assert!((d.a[i] - want).abs() < 1e-14);
        }
        let z = ZeroField(3);
        let c = evolutionary_rep(&Named::Gauge(1, [0; 4]).generator(&g), &z)
            .unwrap()
            .sample(&x);
        assert!(c.a.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn evolutionary_derivative_consistency() {
        let g = GaugeAlgebra::<Rat>::su2();
        let f = bpst_instanton(1.0, CENTER).unwrap();
        for n in conformal_names() {
            let q = evolutionary_rep(&n.generator(&g), &f).unwrap();
            let c = check_derivatives(&q, &halton_points(5, 3), 1e-4);
            assert!(c.max_rel_error_first < 1e-6, "{n}: {c:?}");
        }
    }

    #[test]
    fn translation_flow_is_second_order() {
        let g = GaugeAlgebra::<Rat>::su2();
        let f = bpst_instanton(1.0, CENTER).unwrap();
        let q = evolutionary_rep(&Named::Translation(0).generator(&g), &f).unwrap();
        let r = flow_residual_scaling(&f, &q, &[1e-1, 1e-2, 1e-3], &g.to_f64(), &halton_points(30, 0)).unwrap();
        assert!((r.fitted_slope - 2.0).abs() < 0.1, "{r:?}");
    }

    #[test]
    fn random_direction_is_first_order() {
        let g = su2();
        let f = bpst_instanton(1.0, CENTER).unwrap();
        let q = random_direction(3, 11);
        let r = flow_residual_scaling(&f, &q, &[1e-1, 1e-2, 1e-3], &g, &halton_points(30, 0)).unwrap();
        assert!((r.fitted_slope - 1.0).abs() < 0.1, "{r:?}");
    }

    #[test]
    fn flow_preconditions() {
        let g = su2();
        let f = bpst_instanton(1.0, CENTER).unwrap();
        let q = random_direction(3, 1);
        let pts = halton_points(5, 0);
        for bad in [
            &[1e-1, 1e-2][..],
            &[1e-1, 1e-2, 1e-7],
            &[2.0, 1e-1, 1e-2],
            &[1e-2, 1e-1, 1e-3],
        ] {
            assert!(matches!(
                flow_residual_scaling(&f, &q, bad, &g, &pts),
                Err(Error::InvalidFlow(_))
            ));
        }
        let wrong = bpst_instanton_with(1.0, CENTER, InstantonConvention { eta: true, sign: 1 }).unwrap();
        assert!(matches!(
            flow_residual_scaling(&wrong, &q, &[1e-1, 1e-2, 1e-3], &g, &pts),
            Err(Error::NotASolution { .. })
        ));
    }

    #[test]
    fn halton_is_seeded_and_in_range() {
        let a = halton_points(100, 0);
        assert_eq!(a, halton_points(100, 0));
        assert_ne!(a, halton_points(100, 5));
        assert_eq!(halton_points(100, 5)[0], a[5]);
        assert!(a.iter().flatten().all(|v| (-2.0..=2.0).contains(v)));
    }
}
