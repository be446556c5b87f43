use serde_json::{json, Value};
use subeq::boundary::{default_lambda_grid, scan_boundary, DomainSpec};
use subeq::checks::{axiom_check, convexity_check, monotonicity_check, Axiom};
use subeq::expr::parse_field;
use subeq::garding::{garding_cone, garding_roots, hyperbolicity_check};
use subeq::registry::{polynomial, subequation};
use subeq::riesz::{pcone_inclusion_check, riesz_characteristic};
use subeq::sampling::{self, SampleBox};
use subeq::solver::{
    dual_bracket_solve, max_error, obstacle_solve, perron_solve, GridProblem, NodeKind, Ordering,
    Relaxation, SolveReport, SolverParams, StencilKind,
};
use subeq::{Error, Jet, SymMatrix};

use crate::args::*;
use crate::report;

/// What went wrong, and whether it is the caller's input (exit 3) or the
/// computation (exit 2).
#[derive(Debug)]
pub struct Failure {
    pub config: bool,
    pub message: String,
}

type Res<T> = std::result::Result<T, Failure>;

/// Bad names, expressions, parameters and dimensions are input errors.
fn core<T>(r: subeq::Result<T>) -> Res<T> {
    r.map_err(|e| Failure {
        config: matches!(
            e,
            Error::UnknownName(_)
                | Error::Expr { .. }
                | Error::InvalidParameter(_)
                | Error::Dimension { .. }
        ),
        message: e.to_string(),
    })
}

fn runtime<T, E: std::fmt::Display>(r: std::result::Result<T, E>) -> Res<T> {
    r.map_err(|e| Failure {
        config: false,
        message: e.to_string(),
    })
}

fn bad(msg: impl Into<String>) -> Failure {
    Failure {
        config: true,
        message: msg.into(),
    }
}

pub struct Outcome {
    pub ok: bool,
    pub report: Value,
    pub summary: Vec<String>,
}

fn value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn parse_list(s: &str) -> Res<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| bad(format!("not a number: {t:?}")))
        })
        .collect()
}

fn parse_matrix(s: &str) -> Res<SymMatrix> {
    let rows = s.split(';').map(parse_list).collect::<Res<Vec<_>>>()?;
    core(SymMatrix::from_rows(&rows))
}

pub fn run(cmd: &Command, threads: usize) -> Res<Outcome> {
    match cmd {
        Command::Check(a) => check(a),
        Command::DualTest(a) => dual_test(a),
        Command::MonoTest(a) => mono_test(a),
        Command::Riesz(a) => riesz(a),
        Command::Garding(a) => garding(a),
        Command::Convexity(a) => convexity(a),
        Command::Solve(a) => solve(a, threads),
        Command::Obstacle(a) => obstacle(a, threads),
        Command::Bracket(a) => bracket(a, threads),
    }
}

fn check(a: &CheckArgs) -> Res<Outcome> {
    let f = core(subequation(&a.subeq, a.sampling.n))?;
    let b = SampleBox::default();
    let mut summary = vec![];
    let mut reports = vec![];
    let mut ok = true;
    for (axiom, seed) in [
        (Axiom::P, a.common.seed),
        (Axiom::N, a.common.seed.wrapping_add(1)),
    ] {
        let r = core(axiom_check(&f, axiom, a.sampling.trials, seed, &b))?;
        summary.push(format!(
            "{} axiom {}: {} violations in {} trials",
            verdict(r.passed()),
            r.axiom,
            r.violations,
            r.trials
        ));
        ok &= r.passed();
        reports.push(value(&r));
    }
    Ok(Outcome {
        ok,
        report: json!({ "subequation": f.label(), "n": f.n(), "axioms": reports }),
        summary,
    })
}

/// branch[:kind]:k=K:n=N pairs with k = N − K + 1.
fn partner(name: &str) -> Option<String> {
    let parts: Vec<&str> = name.split(':').collect();
    if parts.first() != Some(&"branch") {
        return None;
    }
    let field = |key: &str| {
        parts
            .iter()
            .find_map(|p| p.strip_prefix(key)?.parse::<usize>().ok())
    };
    let (k, n) = (field("k=")?, field("n=")?);
    if k == 0 || k > n {
        return None;
    }
    let swapped: Vec<String> = parts
        .iter()
        .map(|p| {
            if p.starts_with("k=") {
                format!("k={}", n - k + 1)
            } else {
                p.to_string()
            }
        })
        .collect();
    Some(swapped.join(":"))
}

fn dual_test(a: &DualTestArgs) -> Res<Outcome> {
    let f = core(subequation(&a.subeq, a.sampling.n))?;
    let target = a.against.clone().or_else(|| partner(&a.subeq));
    let (g, against) = match &target {
        Some(name) => (core(subequation(name, Some(f.n())))?, name.clone()),
        // no partner: dual(dual F) must give back F
        None => (f.clone(), "dual(dual F)".to_string()),
    };
    if g.n() != f.n() {
        return Err(bad(format!("dimension mismatch: {} vs {}", f.n(), g.n())));
    }
    let lhs = if target.is_some() {
        f.dual()
    } else {
        f.dual().dual()
    };
    if a.sampling.trials == 0 {
        return Err(bad("trials must be ≥ 1"));
    }
    let b = SampleBox::default();
    let mut rng = sampling::rng(a.common.seed);
    let n = f.n();
    let (mut compared, mut disagreements) = (0usize, 0usize);
    let mut witness: Option<Value> = None;
    for _ in 0..a.sampling.trials {
        let j: Jet = sampling::random_jet(n, &b, &mut rng);
        let x = f
            .flags()
            .x_dependent
            .then(|| sampling::random_point(&vec![-1.0; n], &vec![1.0; n], &mut rng));
        let (u, v) = (lhs.rho(x.as_deref(), &j), g.rho(x.as_deref(), &j));
        if !(u.abs() > a.band && v.abs() > a.band) {
            continue;
        }
        compared += 1;
        if (u > 0.0) != (v > 0.0) {
            disagreements += 1;
            witness.get_or_insert_with(
                || json!({ "x": x, "jet": value(&j), "rho_dual": u, "rho_against": v }),
            );
        }
    }
    let ok = disagreements == 0;
    Ok(Outcome {
        ok,
        summary: vec![format!(
            "{} dual of {} vs {against}: {disagreements} disagreements in {compared} compared samples",
            verdict(ok),
            f.label()
        )],
        report: json!({
            "subequation": f.label(),
            "against": against,
            "n": n,
            "trials": a.sampling.trials,
            "band": a.band,
            "compared": compared,
            "disagreements": disagreements,
            "witness": witness,
        }),
    })
}

fn mono_test(a: &MonoTestArgs) -> Res<Outcome> {
    let f = core(subequation(&a.subeq, a.sampling.n))?;
    let m = core(subequation(&a.cone, Some(f.n())))?;
    let r = core(monotonicity_check(
        &f,
        &m,
        a.sampling.trials,
        a.common.seed,
        &SampleBox::default(),
    ))?;
    let ok = r.passed() && r.agree;
    Ok(Outcome {
        ok,
        summary: vec![
            format!(
                "{} {} + {} in F: {} violations in {} trials",
                verdict(r.primal.passed()),
                f.label(),
                m.label(),
                r.primal.violations,
                r.primal.trials
            ),
            format!(
                "{} dual form: {} violations, forms {}",
                verdict(r.dual_form.passed()),
                r.dual_form.violations,
                if r.agree { "agree" } else { "disagree" }
            ),
        ],
        report: json!({ "subequation": f.label(), "cone": m.label(), "n": f.n(), "result": value(&r) }),
    })
}

fn riesz(a: &RieszArgs) -> Res<Outcome> {
    let m = core(subequation(&a.cone, a.n))?;
    let r = core(riesz_characteristic(&m, a.tol, a.directions))?;
    let mut summary = vec![format!(
        "PASS riesz {}: p_M = {} over {} directions",
        m.label(),
        report::float(r.p_m),
        r.directions_tested
    )];
    let mut ok = true;
    let mut rep = json!({ "cone": m.label(), "n": m.n(), "tol": a.tol, "p_m": r.p_m, "bracket": [r.bracket.0, r.bracket.1], "directions_tested": r.directions_tested });
    if let Some(p) = a.p {
        let inc = core(pcone_inclusion_check(&m, p, a.trials, a.common.seed))?;
        ok = inc.consistent;
        summary.push(format!(
            "{} P({p}) in M: {} violations in {} trials, expected {}",
            verdict(inc.consistent),
            inc.violations,
            inc.trials,
            if inc.expected_inclusion {
                "inclusion"
            } else {
                "violations"
            }
        ));
        rep["inclusion"] = value(&inc);
    }
    Ok(Outcome {
        ok,
        report: rep,
        summary,
    })
}

fn garding(a: &GardingArgs) -> Res<Outcome> {
    let q = core(polynomial(&a.poly, a.n))?;
    let hyp = core(hyperbolicity_check(&q, a.trials, a.common.seed))?;
    let cone = garding_cone(&q);
    let conv = core(convexity_check(
        &cone,
        a.trials,
        a.common.seed.wrapping_add(1),
        &SampleBox::default(),
    ))?;
    let mut summary = vec![
        format!(
            "{} {} hyperbolic: {} failures in {} trials",
            verdict(hyp.passed()),
            q.label(),
            hyp.failures,
            hyp.trials
        ),
        format!(
            "{} Gårding cone convex: {} violations in {} trials",
            verdict(conv.passed()),
            conv.violations,
            conv.trials
        ),
    ];
    let mut ok = hyp.passed() && conv.passed();
    let mut rep = json!({
        "polynomial": q.label(),
        "n": q.n(),
        "degree": q.degree(),
        "hyperbolicity": value(&hyp),
        "cone_convexity": value(&conv),
    });
    if let Some(m) = &a.matrix {
        let mat = parse_matrix(m)?;
        if mat.n() != q.n() {
            return Err(bad(format!(
                "matrix is {}×{0}, polynomial has n = {}",
                mat.n(),
                q.n()
            )));
        }
        match garding_roots(&q, &mat) {
            Ok(r) => {
                summary.push(format!(
                    "PASS eigenvalues: {}",
                    r.eigenvalues
                        .iter()
                        .map(|v| report::float(*v))
                        .collect::<Vec<_>>()
                        .join(", ")
                ));
                rep["roots"] = value(&r);
            }
            Err(e) => {
                ok = false;
                summary.push(format!("FAIL eigenvalues: {e}"));
                rep["roots_error"] = json!(e.to_string());
            }
        }
    }
    Ok(Outcome {
        ok,
        report: rep,
        summary,
    })
}

fn convexity(a: &ConvexityArgs) -> Res<Outcome> {
    let f = core(subequation(&a.subeq, Some(a.n)))?;
    let n = f.n();
    let d = core(DomainSpec::from_expr(&a.domain, n))?;
    let center = match &a.center {
        Some(c) => parse_list(c)?,
        None => vec![0.0; n],
    };
    if center.len() != n {
        return Err(bad(format!(
            "center has {} coordinates, expected {n}",
            center.len()
        )));
    }
    let pts = core(d.star_boundary_points(&center, a.points))?;
    let verdicts = core(scan_boundary(
        &f,
        &d,
        &pts,
        &default_lambda_grid(a.lambda_scale),
        a.t_max,
    ))?;
    let failing = verdicts.iter().filter(|v| !v.overall).count();
    let ok = failing == 0;
    Ok(Outcome {
        ok,
        summary: vec![format!(
            "{} strict {}-convexity of {{{} < 0}}: {failing} of {} boundary points fail",
            verdict(ok),
            f.label(),
            a.domain,
            verdicts.len()
        )],
        report: json!({
            "subequation": f.label(),
            "domain": a.domain,
            "n": n,
            "t_max": a.t_max,
            "points": verdicts.len(),
            "failing": failing,
            "verdicts": value(&verdicts),
        }),
    })
}

/// Grid problem and parameters shared by solve, obstacle and bracket.
fn problem(a: &SolveArgs, threads: usize) -> Res<GridProblem> {
    let f = core(subequation(&a.subeq, Some(a.n)))?;
    let n = f.n();
    let domain = core(parse_field(&a.domain, n))?;
    let bc = core(parse_field(&a.bc, n))?;
    let relaxation = match a.omega.as_str() {
        "auto" => Relaxation::Auto,
        "none" => Relaxation::None,
        s => match s.parse::<f64>() {
            Ok(w) if w > 0.0 && w < 2.0 => Relaxation::Fixed(w),
            _ => {
                return Err(bad(format!(
                    "omega must be auto, none or a number in (0, 2), got {s:?}"
                )))
            }
        },
    };
    let params = SolverParams {
        max_sweeps: a.max_sweeps,
        sweep_tol: a.sweep_tol,
        stencil: match a.stencil {
            StencilArg::Standard => StencilKind::Standard,
            StencilArg::Wide => StencilKind::Wide,
        },
        ordering: match a.ordering {
            OrderingArg::Alternating => Ordering::Alternating,
            OrderingArg::Colored => Ordering::Colored,
        },
        relaxation,
        threads,
        ..SolverParams::default()
    };
    let bbox = match &a.bbox {
        Some(s) => {
            let (lo, hi) = s
                .split_once(':')
                .ok_or_else(|| bad("box must look like lo1,..:hi1,.."))?;
            let (lo, hi) = (parse_list(lo)?, parse_list(hi)?);
            if lo.len() != n || hi.len() != n {
                return Err(bad(format!("box needs {n} coordinates per corner")));
            }
            Some((lo, hi))
        }
        None => None,
    };
    core(GridProblem::new(
        f,
        &*domain,
        bbox.as_ref().map(|(l, h)| (l.as_slice(), h.as_slice())),
        a.h,
        &*bc,
        params,
    ))
}

fn grid_json(p: &GridProblem) -> Value {
    let g = p.grid();
    let count = |k| g.kinds().iter().filter(|&&x| x == k).count();
    json!({
        "h": g.h(),
        "dims": g.dims(),
        "interior_nodes": count(NodeKind::Interior),
        "boundary_nodes": count(NodeKind::Boundary),
    })
}

fn solve_json(r: &SolveReport) -> Value {
    json!({
        "converged": r.converged,
        "sweeps": r.sweeps,
        "final_update": r.final_update,
        "residual": r.residual,
        "sweep_tol": r.sweep_tol,
        "omega": r.omega,
    })
}

fn coords(p: &GridProblem) -> Vec<Vec<f64>> {
    (0..p.grid().len()).map(|i| p.grid().coords(i)).collect()
}

fn exact_error(a: &SolveArgs, p: &GridProblem, u: &[f64]) -> Res<Option<f64>> {
    let Some(src) = &a.exact else { return Ok(None) };
    let e = core(parse_field(src, p.grid().n()))?;
    Ok(Some(max_error(p.grid(), u, &*e)))
}

fn solve_summary(what: &str, p: &GridProblem, r: &SolveReport, err: Option<f64>) -> String {
    let mut s = format!(
        "{} {what} {}: {} sweeps, update {}, residual {}",
        verdict(r.converged),
        p.subequation().label(),
        r.sweeps,
        report::float(r.final_update),
        report::float(r.residual)
    );
    if let Some(e) = err {
        s.push_str(&format!(", max error {}", report::float(e)));
    }
    s
}

fn solve(a: &SolveArgs, threads: usize) -> Res<Outcome> {
    let p = problem(a, threads)?;
    let r = core(perron_solve(&p))?;
    let err = exact_error(a, &p, &r.u)?;
    runtime(report::write_field(
        &a.field,
        &coords(&p),
        p.grid().dims(),
        &[("u", &r.u)],
    ))?;
    Ok(Outcome {
        ok: r.converged,
        summary: vec![solve_summary("solve", &p, &r, err)],
        report: json!({
            "subequation": p.subequation().label(),
            "domain": a.domain,
            "bc": a.bc,
            "grid": grid_json(&p),
            "solve": solve_json(&r),
            "max_error": err,
            "field": a.field.display().to_string(),
        }),
    })
}

fn obstacle(a: &ObstacleArgs, threads: usize) -> Res<Outcome> {
    let s = &a.solve;
    let p = problem(s, threads)?;
    let g = core(parse_field(&a.obstacle, p.grid().n()))?;
    let r = core(obstacle_solve(&p, &g))?;
    let err = exact_error(s, &p, &r.u)?;
    let grid = p.grid();
    let gv: Vec<f64> = (0..grid.len())
        .map(|i| {
            if r.u[i].is_finite() {
                g(&grid.coords(i))
            } else {
                f64::NAN
            }
        })
        .collect();
    let above = grid
        .nodes_of(NodeKind::Interior)
        .iter()
        .map(|&i| r.u[i] - gv[i])
        .fold(f64::NEG_INFINITY, f64::max);
    let contact = grid
        .nodes_of(NodeKind::Interior)
        .iter()
        .filter(|&&i| (r.u[i] - gv[i]).abs() <= r.sweep_tol.max(1e-12))
        .count();
    runtime(report::write_field(
        &s.field,
        &coords(&p),
        grid.dims(),
        &[("u", &r.u), ("g", &gv)],
    ))?;
    Ok(Outcome {
        ok: r.converged,
        summary: vec![
            solve_summary("obstacle", &p, &r, err) + &format!(", {contact} contact nodes"),
        ],
        report: json!({
            "subequation": p.subequation().label(),
            "domain": s.domain,
            "bc": s.bc,
            "obstacle": a.obstacle,
            "grid": grid_json(&p),
            "solve": solve_json(&r),
            "max_above_obstacle": above,
            "contact_nodes": contact,
            "max_error": err,
            "field": s.field.display().to_string(),
        }),
    })
}

fn bracket(a: &SolveArgs, threads: usize) -> Res<Outcome> {
    let p = problem(a, threads)?;
    let r = core(dual_bracket_solve(&p))?;
    let err = exact_error(a, &p, &r.upper.u)?;
    runtime(report::write_field(
        &a.field,
        &coords(&p),
        p.grid().dims(),
        &[("upper", &r.upper.u), ("lower", &r.lower.u)],
    ))?;
    let ok = r.ordered && r.upper.converged && r.lower.converged;
    Ok(Outcome {
        ok,
        summary: vec![
            solve_summary("upper", &p, &r.upper, err),
            solve_summary("lower", &p, &r.lower, None),
            format!(
                "{} ordering: max excess {}, max gap {}",
                verdict(r.ordered),
                report::float(r.max_excess),
                report::float(r.max_gap)
            ),
        ],
        report: json!({
            "subequation": p.subequation().label(),
            "domain": a.domain,
            "bc": a.bc,
            "grid": grid_json(&p),
            "upper": solve_json(&r.upper),
            "lower": solve_json(&r.lower),
            "max_excess": r.max_excess,
            "max_gap": r.max_gap,
            "ordered": r.ordered,
            "max_error": err,
            "field": a.field.display().to_string(),
        }),
    })
}
