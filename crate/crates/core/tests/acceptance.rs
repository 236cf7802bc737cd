//! Acceptance checks, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach stdout; exits nonzero on any failure.

use std::time::{Duration, Instant};

use once_cell::sync::Lazy;
use sdym_core::crosscheck::{check_equation, check_equation_with, EquationId, Fault};
use sdym_core::expr::IndependentPairs;
use sdym_core::generator::{conformal_names, instantiate_closed_form, ConformalGaugeParams, Named};
use sdym_core::numeric::{
    bpst_instanton, evolutionary_rep, flow_residual_scaling, halton_points, random_direction, sdym_residual_numeric,
};
use sdym_core::prolong::{extract_determining_system, extract_determining_system_with, DeterminingSystem};
use sdym_core::replay::{replay_h_space, replay_pqr};
use sdym_core::solver::{closed_form_generators, closure_check, solve_ansatz, verify_generator};
use sdym_core::{GaugeAlgebra, Rat};

static SU2: Lazy<GaugeAlgebra<Rat>> = Lazy::new(GaugeAlgebra::su2);
static SU3: Lazy<GaugeAlgebra<f64>> = Lazy::new(GaugeAlgebra::su3);
static SYS2: Lazy<DeterminingSystem<Rat>> = Lazy::new(|| extract_determining_system(&*SU2));
static SYS3: Lazy<DeterminingSystem<f64>> = Lazy::new(|| extract_determining_system(&*SU3));

const EPS: [f64; 3] = [1e-1, 1e-2, 1e-3];
const CENTER: [f64; 4] = [0.3, -0.2, 0.1, 0.4];
const DIMENSION_TABLE: [(usize, usize, usize); 4] = [(2, 0, 18), (2, 1, 30), (3, 0, 18), (0, 0, 7)];
const SU3_DIMENSION: usize = 23;

type Check = (bool, String);

fn criterion_1_determining_system_equivalence() -> Check {
    let t = Instant::now();
    let sys = extract_determining_system(&*SU2);
    let elapsed = t.elapsed();
    let mut failed = Vec::new();
    for id in EquationId::ALL {
        if !check_equation(id.name(), &sys, &*SU2).unwrap().verdict {
            failed.push(id.name());
        }
    }
    // sets that span only part of their group must notice any single flipped sign
    let mut missed = Vec::new();
    for id in [
        EquationId::Det2,
        EquationId::Det3,
        EquationId::Det4,
        EquationId::Det5,
        EquationId::Det6,
        EquationId::Red1,
        EquationId::Red2,
        EquationId::Red3,
        EquationId::Red4,
    ] {
        for term in 0..id.template_terms() {
            if check_equation_with(id, &sys, &*SU2, Some(Fault { term })).verdict {
                missed.push(format!("{}#{term}", id.name()));
            }
        }
    }
    let ok = failed.is_empty() && missed.is_empty() && elapsed < Duration::from_secs(30);
    (
        ok,
        format!("mismatched {failed:?}, undetected flips {missed:?}, extraction {elapsed:.2?}"),
    )
}

fn criterion_2_closed_form_verifies() -> Check {
    let t = Instant::now();
    let p2 = ConformalGaugeParams::<Rat>::symbolic(3, 3);
    let r2 = verify_generator(&instantiate_closed_form(&p2, &*SU2).unwrap(), &*SYS2);
    let p3 = ConformalGaugeParams::<f64>::symbolic(8, 2);
    let r3 = verify_generator(&instantiate_closed_form(&p3, &*SU3).unwrap(), &*SYS3);
    let elapsed = t.elapsed();
    let ok = r2.passed() && r3.passed() && r3.max_residual < 1e-10 && elapsed < Duration::from_secs(60);
    (
        ok,
        format!(
            "su2 exact {} conditions, su3 max residual {:e} over {} conditions, {elapsed:.2?}",
            r2.conditions_checked, r3.max_residual, r3.conditions_checked
        ),
    )
}

fn criterion_3_solution_space_dimensions() -> Check {
    let mut ok = true;
    let mut detail = Vec::new();
    for (h, c, want) in DIMENSION_TABLE {
        let t = Instant::now();
        let d = solve_ansatz(h, c, &*SU2, &*SYS2).unwrap().dimension();
        let e = t.elapsed();
        ok &= d == want && e < Duration::from_secs(300);
        detail.push(format!("su2({h},{c})={d} in {e:.2?}"));
    }
    let t = Instant::now();
    let d = solve_ansatz(2, 0, &*SU3, &*SYS3).unwrap().dimension();
    let e = t.elapsed();
    ok &= d == SU3_DIMENSION && e < Duration::from_secs(300);
    detail.push(format!("su3(2,0)={d} in {e:.2?}"));
    (ok, detail.join(", "))
}

fn criterion_4_span_equality() -> Check {
    let sol = solve_ansatz(2, 0, &*SU2, &*SYS2).unwrap();
    let gens: Vec<_> = closed_form_generators(&*SU2, 2, 0)
        .into_iter()
        .map(|(_, g)| g)
        .collect();
    let (cmp, outside) = sol.compare_with(&gens);
    let ok = cmp.equal() && outside == 0;
    (ok, format!("{cmp:?}, outside ansatz {outside}"))
}

fn criterion_5_replay() -> Check {
    let h2 = replay_h_space(&*SU2);
    let h3 = replay_h_space(&*SU3);
    let pqr: Vec<_> = [(1, 7), (2, 10), (3, 10)]
        .into_iter()
        .map(|(deg, want)| (replay_pqr(deg), want))
        .collect();
    let ok = h2.dimension == 4
        && h3.dimension == 9
        && h2.matches_family()
        && h3.matches_family()
        && pqr
            .iter()
            .all(|(r, want)| r.dimension == *want && r.closed_form.equal());
    let dims: Vec<_> = pqr.iter().map(|(r, _)| (r.degree, r.dimension)).collect();
    (
        ok,
        format!("h-space su2 {} su3 {}, pqr {dims:?}", h2.dimension, h3.dimension),
    )
}

fn criterion_6_conformal_closure() -> Check {
    let names = conformal_names();
    let gens: Vec<_> = names.iter().map(|n| n.generator(&*SU2)).collect();
    let (rep, c) = closure_check(&gens).unwrap();
    let d = names.iter().position(|n| *n == Named::Dilatation).unwrap();
    let mut dt_ok = true;
    for mu in 0..4 {
        let t = names.iter().position(|n| *n == Named::Translation(mu)).unwrap();
        for (k, v) in c[d][t].iter().enumerate() {
            let want = if k == t {
                Rat::from_integer((-1).into())
            } else {
                Rat::from_integer(0.into())
            };
            dt_ok &= *v == want;
        }
    }
    let ok = rep.closes() && dt_ok;
    (
        ok,
        format!(
            "size {}, escapes {}, antisymmetric {}, jacobi {}, [D,T]=-T {dt_ok}",
            rep.size,
            rep.escapes.len(),
            rep.antisymmetric,
            rep.jacobi
        ),
    )
}

fn criterion_7_numeric_validation() -> Check {
    let t = Instant::now();
    let g = SU2.to_f64();
    let f = bpst_instanton(1.0, CENTER).unwrap();
    let pts = halton_points(100, 0);
    let floor = pts
        .iter()
        .flat_map(|x| sdym_residual_numeric(&f, x, &g))
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let mut names: Vec<Named> = closed_form_generators(&*SU2, 2, 0)
        .into_iter()
        .map(|(n, _)| n)
        .collect();
    names.push(Named::Gauge(0, [1, 0, 0, 0]));
    let mut bad = Vec::new();
    let mut slopes = (f64::INFINITY, f64::NEG_INFINITY);
    for n in &names {
        let q = evolutionary_rep(&n.generator(&*SU2), &f).unwrap();
        let s = flow_residual_scaling(&f, &q, &EPS, &g, &pts).unwrap().fitted_slope;
        slopes = (slopes.0.min(s), slopes.1.max(s));
        if !(1.9..=2.1).contains(&s) {
            bad.push(format!("{n}: {s:.3}"));
        }
    }
    let control = flow_residual_scaling(&f, &random_direction(3, 0), &EPS, &g, &pts)
        .unwrap()
        .fitted_slope;
    let elapsed = t.elapsed();
    let ok = floor < 1e-12
        && names.len() == 19
        && bad.is_empty()
        && (0.9..=1.1).contains(&control)
        && elapsed < Duration::from_secs(30);
    (ok, format!(
            "residual floor {floor:e}, symmetry slopes in [{:.3}, {:.3}], off-range {bad:?}, control {control:.3}, {elapsed:.2?}",
            slopes.0, slopes.1
        ))
}

fn criterion_8_choice_invariance() -> Check {
    let s2 = extract_determining_system_with(&*SU2, IndependentPairs::Spatial);
    let mut ok = true;
    let mut detail = Vec::new();
    for (h, c, want) in DIMENSION_TABLE {
        let d = solve_ansatz(h, c, &*SU2, &s2).unwrap().dimension();
        ok &= d == want;
        detail.push(format!("su2({h},{c})={d}"));
    }
    let s3 = extract_determining_system_with(&*SU3, IndependentPairs::Spatial);
    let d = solve_ansatz(2, 0, &*SU3, &s3).unwrap().dimension();
    ok &= d == SU3_DIMENSION;
    detail.push(format!("su3(2,0)={d}"));
    (ok, detail.join(", "))
}

fn main() {
    let checks: [fn() -> Check; 8] = [
        criterion_1_determining_system_equivalence,
        criterion_2_closed_form_verifies,
        criterion_3_solution_space_dimensions,
        criterion_4_span_equality,
        criterion_5_replay,
        criterion_6_conformal_closure,
        criterion_7_numeric_validation,
        criterion_8_choice_invariance,
    ];
    let mut failed = 0;
    for (i, check) in checks.iter().enumerate() {
        let (ok, detail) = check();
        println!("criterion {}: {} ({detail})", i + 1, if ok { "PASS" } else { "FAIL" });
        failed += usize::from(!ok);
    }
    println!(
        "acceptance: {} of {} criteria passed",
        checks.len() - failed,
        checks.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
