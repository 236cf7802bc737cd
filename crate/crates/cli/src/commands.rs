use std::path::Path;

use sdym_core::algebra::read_gauge_algebra;
use sdym_core::crosscheck::{check_equation_with, EquationId};
use sdym_core::generator::{
    closed_form_family, conformal_names, gauge_names, instantiate_closed_form, GeneratorSpec, Named, SymmetryGenerator,
    DEGREE_CAP,
};
use sdym_core::numeric::{
    bpst_instanton, evolutionary_rep, flow_residual_scaling, halton_points, random_direction, sdym_residual_numeric,
    validate_eps, FieldEvaluator, Instanton, Point, INSTANTON_CONVENTION,
};
use sdym_core::prolong::extract_determining_system;
use sdym_core::solver::{closed_form_generators, solve_ansatz, verify_generator};
use sdym_core::{Error, GaugeAlgebra, LoadedAlgebra, Result, Scalar};
use serde_json::{json, Value};

use crate::{Common, Outcome, Status};

pub const RESIDUAL_FLOOR: f64 = 1e-12;
pub const SYMMETRY_BAND: (f64, f64) = (1.9, 2.1);
pub const CONTROL_BAND: (f64, f64) = (0.9, 1.1);
const RHO: f64 = 1.0;
const CENTER: Point = [0.3, -0.2, 0.1, 0.4];

fn status(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn load(path: &Path) -> Result<LoadedAlgebra> {
    read_gauge_algebra(path)
}

fn algebra_info(a: &LoadedAlgebra) -> Value {
    json!({ "dim": a.dim(), "mode": a.mode() })
}

fn generator_json<S: Scalar>(g: &SymmetryGenerator<S>) -> Value {
    let h: Vec<String> = g.h_all().iter().map(|e| e.text()).collect();
    let phi: Vec<Value> = (0..g.dim())
        .flat_map(|a| (0..4).map(move |k| (a, k)))
        .filter(|&(a, k)| !g.phi(a, k).is_zero())
        .map(|(a, k)| json!({ "a": a, "kappa": k, "text": g.phi(a, k).text() }))
        .collect();
    json!({ "h": h, "phi": phi })
}

pub fn derive(algebra: &Path) -> Result<Outcome> {
    let a = load(algebra)?;
    let mut out = match &a {
        LoadedAlgebra::Exact(g) => derive_with(g),
        LoadedAlgebra::Numeric(g) => derive_with(g),
    }?;
    out.data["algebra"] = algebra_info(&a);
    Ok(out)
}

fn derive_with<S: Scalar>(g: &GaugeAlgebra<S>) -> Result<Outcome> {
    let sys = extract_determining_system(g);
    let reports: Vec<_> = EquationId::ALL
        .iter()
        .map(|id| check_equation_with(*id, &sys, g, None))
        .collect();
    let verdicts: serde_json::Map<String, Value> = reports
        .iter()
        .map(|r| (r.id.name().to_string(), Value::Bool(r.verdict)))
        .collect();
    let conditions: Vec<Value> = sys
        .conditions()
        .map(|c| {
            json!({
                "group": c.group.to_string(),
                "label": c.label.to_string(),
                "duplicates": c.duplicates.len(),
                "text": c.expr.text(),
            })
        })
        .collect();
    Ok(Outcome {
        status: status(reports.iter().all(|r| r.verdict)),
        data: json!({
            "counts": {
                "quadratic": sys.quadratic.len(),
                "linear": sys.linear.len(),
                "zeroth": sys.zeroth.len(),
            },
            "conditions_checked": sys.len(),
            "verdicts": verdicts,
            "equations": serde_json::to_value(&reports)?,
            "conditions": conditions,
        }),
    })
}

pub fn verify(algebra: &Path, spec: &Path) -> Result<Outcome> {
    let a = load(algebra)?;
    let spec = GeneratorSpec::parse(&std::fs::read_to_string(spec)?)?;
    let mut out = match &a {
        LoadedAlgebra::Exact(g) => verify_with(g, &spec),
        LoadedAlgebra::Numeric(g) => verify_with(g, &spec),
    }?;
    out.data["algebra"] = algebra_info(&a);
    Ok(out)
}

fn verify_with<S: Scalar>(g: &GaugeAlgebra<S>, spec: &GeneratorSpec) -> Result<Outcome> {
    let gen = instantiate_closed_form(&spec.to_params::<S>(g.dim())?, g)?;
    let sys = extract_determining_system(g);
    let report = verify_generator(&gen, &sys);
    Ok(Outcome {
        status: status(report.passed()),
        data: json!({
            "generator": generator_json(&gen),
            "report": serde_json::to_value(&report)?,
        }),
    })
}

pub fn solve(c: &Common, algebra: &Path) -> Result<Outcome> {
    let a = load(algebra)?;
    let mut out = match &a {
        LoadedAlgebra::Exact(g) => solve_with(g, c.h_degree, c.chi_degree),
        LoadedAlgebra::Numeric(g) => solve_with(g, c.h_degree, c.chi_degree),
    }?;
    out.data["algebra"] = algebra_info(&a);
    Ok(out)
}

fn solve_with<S: Scalar>(g: &GaugeAlgebra<S>, h: usize, chi: usize) -> Result<Outcome> {
    let sys = extract_determining_system(g);
    let sol = solve_ansatz(h, chi, g, &sys)?;
    let family = closed_form_generators(g, h, chi);
    let gens: Vec<_> = family.iter().map(|(_, gen)| gen.clone()).collect();
    let (cmp, outside) = sol.compare_with(&gens);
    let equal = cmp.equal() && outside == 0;
    Ok(Outcome {
        status: status(equal),
        data: json!({
            "h_degree": h,
            "chi_degree": chi,
            "dimension": sol.dimension(),
            "unknowns": sol.unknowns,
            "equations": sol.equations,
            "rank": sol.rank,
            "max_h_degree": sol.max_h_degree(),
            "closed_form": {
                "size": family.len(),
                "names": family.iter().map(|(n, _)| n.to_string()).collect::<Vec<_>>(),
                "comparison": serde_json::to_value(cmp)?,
                "outside_ansatz": outside,
                "span_equal": equal,
            },
            "basis": sol.basis.iter().map(generator_json).collect::<Vec<_>>(),
        }),
    })
}

enum Selection {
    /// Closed-form generators with constant χ plus one degree-1 gauge direction, and the control
    All,
    Random,
    Named(Named),
    Spec(GeneratorSpec),
}

fn select(arg: Option<&str>) -> Result<Selection> {
    let Some(name) = arg else {
        return Ok(Selection::All);
    };
    match name {
        "all" => return Ok(Selection::All),
        "random" => return Ok(Selection::Random),
        _ => {}
    }
    if let Some(n) = conformal_names()
        .into_iter()
        .chain(gauge_names(3, DEGREE_CAP))
        .find(|n| n.to_string() == name)
    {
        return Ok(Selection::Named(n));
    }
    let path = Path::new(name);
    if path.is_file() {
        return Ok(Selection::Spec(GeneratorSpec::parse(&std::fs::read_to_string(path)?)?));
    }
    Err(Error::InvalidGenerator(format!(
        "{name:?} is neither a known generator name nor a spec file"
    )))
}

fn in_band(s: f64, band: (f64, f64)) -> bool {
    (band.0..=band.1).contains(&s)
}

struct Flow<'a> {
    f: &'a Instanton,
    eps: &'a [f64],
    g: &'a GaugeAlgebra<f64>,
    pts: &'a [Point],
}

impl Flow<'_> {
    fn row(&self, name: &str, role: &str, band: (f64, f64), q: &dyn FieldEvaluator) -> Result<(bool, Value)> {
        let vanishes = self.pts.iter().all(|x| {
            let s = q.sample(x);
            s.a.iter().chain(&s.da).all(|v| *v == 0.0)
        });
        if vanishes {
            // nothing moves, so there is no slope to fit
            return Ok((
                true,
                json!({ "name": name, "role": role, "degenerate": true, "slope": null }),
            ));
        }
        let r = flow_residual_scaling(self.f, q, self.eps, self.g, self.pts)?;
        let ok = in_band(r.fitted_slope, band);
        Ok((
            ok,
            json!({
                "name": name,
                "role": role,
                "slope": r.fitted_slope,
                "band": [band.0, band.1],
                "within_band": ok,
                "residual_norms": r.residual_norms,
            }),
        ))
    }
}

pub fn numeric(c: &Common) -> Result<Outcome> {
    validate_eps(&c.eps)?;
    if c.samples == 0 {
        return Err(Error::InvalidFlow("need at least one sample point".into()));
    }
    let selection = select(c.generator.as_deref())?;
    let g: GaugeAlgebra<f64> = match &c.algebra {
        None => GaugeAlgebra::<sdym_core::Rat>::su2().to_f64(),
        Some(p) => match load(p)? {
            LoadedAlgebra::Exact(g) => g.to_f64(),
            LoadedAlgebra::Numeric(g) => g,
        },
    };
    if g.dim() != 3 {
        return Err(Error::ShapeMismatch {
            expected: 3,
            found: g.dim(),
        });
    }
    let f = bpst_instanton(RHO, CENTER)?;
    let pts = halton_points(c.samples, c.seed);
    let floor = pts
        .iter()
        .flat_map(|x| sdym_residual_numeric(&f, x, &g))
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let mut data = json!({
        "instanton": {
            "rho": RHO,
            "center": CENTER,
            "symbol": if INSTANTON_CONVENTION.eta { "eta" } else { "eta_bar" },
            "sign": INSTANTON_CONVENTION.sign,
        },
        "samples": c.samples,
        "seed": c.seed,
        "eps": c.eps,
        "residual_floor": floor,
        "residual_floor_ok": floor < RESIDUAL_FLOOR,
    });
    if floor >= RESIDUAL_FLOOR {
        data["flows"] = json!([]);
        return Ok(Outcome {
            status: Status::Fail,
            data,
        });
    }

    let mut symmetric: Vec<(String, SymmetryGenerator<f64>)> = Vec::new();
    let mut control = false;
    match selection {
        Selection::All => {
            let mut names = closed_form_family(3, 2, 0);
            names.push(Named::Gauge(0, [1, 0, 0, 0]));
            symmetric.extend(names.into_iter().map(|n| (n.to_string(), n.generator(&g))));
            control = true;
        }
        Selection::Random => control = true,
        Selection::Named(n) => symmetric.push((n.to_string(), n.generator(&g))),
        Selection::Spec(spec) => {
            let gen = instantiate_closed_form(&spec.to_params::<f64>(3)?, &g)?;
            symmetric.push(("spec".to_string(), gen));
        }
    }

    let flow = Flow {
        f: &f,
        eps: &c.eps,
        g: &g,
        pts: &pts,
    };
    let mut ok = true;
    let mut rows = Vec::new();
    for (name, gen) in &symmetric {
        let q = evolutionary_rep(gen, &f)?;
        let (within, row) = flow.row(name, "symmetry", SYMMETRY_BAND, &q)?;
        ok &= within;
        rows.push(row);
    }
    if control {
        let q = random_direction(3, c.seed);
        let (_, row) = flow.row("random", "expected-fail control", CONTROL_BAND, &q)?;
        rows.push(row);
    }
    data["flows"] = Value::Array(rows);
    Ok(Outcome {
        status: status(ok),
        data,
    })
}
