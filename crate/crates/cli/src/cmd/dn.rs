//! `dn solve`, `dn check`.

use std::path::{Path, PathBuf};

use ellipton_core::dn_ale::{
    cayley_system, es_residual, poncelet_correspondence, solve_legendre_relations, CorrespondenceReport, EsResidual,
    SolverOptions,
};
use ellipton_core::{c64, Complex64, MajoranaQuartic, MonopoleConfig, O2Multiplet};
use rand::Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use super::{Ctx, Output};
use crate::io::{
    cx, from_value, multiplet_json, num, pretty, read_input, CliError, CliResult, Cx, MultipletSpec, SCHEMA,
};
use crate::svg::{self, Item, Scene};

/// `{t, w}` or `{sigma, gamma}`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum MonopoleSpec {
    Linear { t: f64, w: Cx },
    Coherent { sigma: f64, gamma: Cx },
}

impl MonopoleSpec {
    fn build(self) -> CliResult<O2Multiplet> {
        Ok(match self {
            MonopoleSpec::Linear { t, w } => O2Multiplet::new(t, w.finite()?),
            MonopoleSpec::Coherent { sigma, gamma } => O2Multiplet::from_coherent(sigma, gamma.sphere()),
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolveInput {
    #[serde(alias = "multiplet")]
    seed: MultipletSpec,
    #[serde(default)]
    monopoles: Vec<MonopoleSpec>,
    z: Option<Cx>,
    u: Cx,
    tol: Option<f64>,
    max_iterations: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CheckInput {
    multiplet: MultipletSpec,
    #[serde(default)]
    monopoles: Vec<MonopoleSpec>,
}

fn config(monopoles: &[MonopoleSpec]) -> CliResult<MonopoleConfig> {
    Ok(MonopoleConfig::new(
        monopoles.iter().map(|m| m.build()).collect::<CliResult<Vec<_>>>()?,
    ))
}

fn es_json(es: &EsResidual) -> Value {
    json!({
        "sum": num(es.sum),
        "residual": num(es.residual),
        "nearest_multiple": es.nearest_multiple,
        "two_k": num(es.two_k),
    })
}

fn monopoles_json(cfg: &MonopoleConfig) -> Value {
    Value::Array(
        cfg.multiplets
            .iter()
            .map(|m| json!({ "t": num(m.t), "w": cx(m.w), "position": m.position().map(num) }))
            .collect(),
    )
}

/// Seeded Jacobian labels `s·2ω + t·2ω'` with `s, t ∈ [0, 1)`.
fn random_starts(ctx: &Ctx, m: &MajoranaQuartic, count: usize) -> CliResult<Vec<Complex64>> {
    let w = m.weierstrass()?;
    let mut rng = ctx.rng();
    Ok((0..count)
        .map(|_| {
            let (s, t): (f64, f64) = (rng.gen(), rng.gen());
            c64(2.0 * w.omega() * s, 0.0) + w.omega_prime() * (2.0 * t)
        })
        .collect())
}

fn correspondence_json(rep: &CorrespondenceReport, starts: &[Complex64], tol: f64) -> (Value, bool) {
    let closes = rep.residuals.iter().all(|&r| r < 10.0 * tol);
    let doc = json!({
        "starts": starts.iter().map(|&u| cx(u)).collect::<Vec<_>>(),
        "steps": rep.steps.iter().map(|&u| cx(u)).collect::<Vec<_>>(),
        "residuals": rep.residuals.iter().map(|&r| num(r)).collect::<Vec<_>>(),
        "closes": closes,
    });
    (doc, closes)
}

/// The correspondence polygon from the first start. `B` is the identity
/// conic, which has no real points, so only the real projection is drawn.
fn figure(m: &MajoranaQuartic, rep: &CorrespondenceReport, start: Complex64, tol: f64) -> CliResult<Vec<u8>> {
    let sys = cayley_system(m)?;
    let p = sys.point_of_u(start)?;
    let chain = sys.run_generalised(&p, &rep.steps)?;
    let mut scene = Scene::default();
    scene.push(Item::Comment("B = I has no real points; not drawn".into()));
    let cp = m.cayley_pair()?;
    match svg::Ellipse::from_conic(cp.a) {
        Some(shape) => scene.push(Item::Ellipse { shape, stroke: "green" }),
        None => scene.push(Item::Comment("A is not a real ellipse; not drawn".into())),
    }
    let pts: Vec<[f64; 2]> = chain
        .points
        .iter()
        .filter_map(|q| q.to_affine().map(|(x, y)| [x.re, y.re]))
        .collect();
    let closes = chain.residual < 10.0 * tol;
    svg::polygon(
        &mut scene,
        &pts,
        closes,
        chain.residual,
        chain.points.iter().any(|q| !q.is_real()),
    );
    Ok(svg::emit_svg(&scene))
}

pub fn solve(ctx: &Ctx, path: &Path, svg_path: Option<PathBuf>) -> CliResult<Output> {
    let (raw, value) = read_input(path)?;
    let input: SolveInput = from_value(value)?;
    let seed = input.seed.build()?;
    let cfg = config(&input.monopoles)?;
    let z = match input.z {
        Some(z) => z.finite()?,
        None => seed.z,
    };
    let defaults = SolverOptions::default();
    let opts = SolverOptions {
        tol: input.tol.unwrap_or(defaults.tol),
        max_iterations: input.max_iterations.unwrap_or(defaults.max_iterations),
    };
    let sol = solve_legendre_relations(&cfg, z, input.u.finite()?, &seed, opts)?;
    let starts = random_starts(ctx, &sol.multiplet, 1)?;
    let svg = match svg_path {
        Some(p) => {
            let rep = poncelet_correspondence(&sol.multiplet, &cfg, &starts)?;
            Some((p, figure(&sol.multiplet, &rep, starts[0], ctx.tol.closure)?))
        }
        None => None,
    };
    let doc = json!({
        "schema": SCHEMA,
        "multiplet": multiplet_json(&sol.multiplet),
        "v": cx(sol.multiplet.v),
        "x": num(sol.multiplet.x),
        "monopoles": monopoles_json(&cfg),
        "iterations": sol.iterations,
        "residuals": sol.residuals.map(num),
        "winding": { "m": sol.winding.m, "m_prime": sol.winding.m_prime },
        "es": es_json(&sol.es),
        "trace": sol.trace.iter().map(|&r| num(r)).collect::<Vec<_>>(),
    });
    Ok(Output {
        body: pretty(&doc),
        input: Some(raw),
        svg,
    })
}

pub fn check(ctx: &Ctx, path: &Path, starts: usize) -> CliResult<Output> {
    let (raw, value) = read_input(path)?;
    let input: CheckInput = from_value(value)?;
    let m = input.multiplet.build()?;
    let cfg = config(&input.monopoles)?;
    if starts == 0 {
        return Err(CliError::user("contract", "need at least one start"));
    }
    let es = es_residual(&m, &cfg)?;
    let us = random_starts(ctx, &m, starts)?;
    let rep = poncelet_correspondence(&m, &cfg, &us)?;
    let (geometric, geo) = correspondence_json(&rep, &us, ctx.tol.closure);
    let alg = es.residual < ctx.tol.closure;
    let doc = json!({
        "schema": SCHEMA,
        "multiplet": multiplet_json(&m),
        "residual": num(es.residual),
        "nearest_multiple": es.nearest_multiple,
        "sum": num(es.sum),
        "two_k": num(es.two_k),
        "closes": alg,
        "geometric": geometric,
        "agree": alg == geo,
    });
    Ok(Output {
        body: pretty(&doc),
        input: Some(raw),
        svg: None,
    })
}
