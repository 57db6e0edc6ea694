//! `poncelet run`.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use ellipton_core::conic_pencil::{
    closure_algebraic, closure_algebraic_chain, line_conic_intersections, run_chain, PonceletSystem,
};
use ellipton_core::{Complex64, IncidencePoint, Pencil, ProjLine, ProjPoint};
use rand::Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use super::{Ctx, Output};
use crate::io::{cx, from_value, num, pretty, read_input, CliError, CliResult, Cx, SCHEMA};
use crate::svg::{self, Ellipse, Item, Scene};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PonceletInput {
    #[serde(alias = "A")]
    a: [[f64; 3]; 3],
    #[serde(alias = "B")]
    b: [[f64; 3]; 3],
    #[serde(alias = "X0")]
    x0: Option<Cx>,
    n: Option<usize>,
    chain: Option<Vec<Cx>>,
    /// Affine point of `B`; drawn from the seed when absent.
    start: Option<[f64; 2]>,
    /// Which of the two tangents from the start point to follow.
    #[serde(default)]
    tangent: usize,
}

pub fn affine(p: &ProjPoint) -> Value {
    match p.to_affine() {
        Some((x, y)) => json!([cx(x), cx(y)]),
        None => json!("inf"),
    }
}

fn real_affine(p: &ProjPoint) -> Option<[f64; 2]> {
    p.to_affine().map(|(x, y)| [x.re, y.re])
}

/// A point of `B` on a seeded random line through the centre of `B` (the
/// origin when `B` is not a real ellipse).
fn random_start(ctx: &Ctx, b: [[f64; 3]; 3], pencil: &Pencil) -> CliResult<ProjPoint> {
    let theta: f64 = ctx.rng().gen_range(0.0..PI);
    let (cx0, cy0) = Ellipse::from_conic(b).map_or((0.0, 0.0), |e| (e.cx, e.cy));
    let (s, c) = theta.sin_cos();
    let line = ProjLine::real(s, -c, c * cy0 - s * cx0)?;
    Ok(line_conic_intersections(&line, &pencil.b)?[0])
}

fn start_point(ctx: &Ctx, input: &PonceletInput, pencil: &Pencil) -> CliResult<ProjPoint> {
    match input.start {
        Some([x, y]) => {
            let p = ProjPoint::from_affine(x, y);
            let r = pencil.b.residual(&p);
            if r > ctx.tol.incidence {
                return Err(CliError::user(
                    "contract",
                    format!("start ({x}, {y}) is not on B (residual {r:e})"),
                ));
            }
            Ok(p)
        }
        None => random_start(ctx, input.b, pencil),
    }
}

fn draw_conic(scene: &mut Scene, q: [[f64; 3]; 3], stroke: &'static str, name: &str) {
    match Ellipse::from_conic(q) {
        Some(shape) => scene.push(Item::Ellipse { shape, stroke }),
        None => scene.push(Item::Comment(format!("{name} is not a real ellipse; not drawn"))),
    }
}

fn real_member(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3], x: Complex64) -> Option<[[f64; 3]; 3]> {
    (x.im == 0.0).then(|| std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] + x.re * b[i][j])))
}

fn figure(input: &PonceletInput, params: &[Complex64], points: &[ProjPoint], closes: bool, gap: f64) -> Vec<u8> {
    let mut scene = Scene::default();
    draw_conic(&mut scene, input.b, "blue", "B");
    for (i, &x) in params.iter().enumerate() {
        match real_member(&input.a, &input.b, x) {
            Some(q) => draw_conic(&mut scene, q, "green", &format!("C_{i}")),
            None => scene.push(Item::Comment(format!("C_{i} has a complex parameter; not drawn"))),
        }
    }
    let pts: Vec<[f64; 2]> = points.iter().filter_map(real_affine).collect();
    let complex = points.iter().any(|p| !p.is_real());
    svg::polygon(&mut scene, &pts, closes, gap, complex);
    svg::emit_svg(&scene)
}

pub fn run(ctx: &Ctx, path: &Path, svg_path: Option<PathBuf>) -> CliResult<Output> {
    let (raw, value) = read_input(path)?;
    let input: PonceletInput = from_value(value)?;
    let pencil = Pencil::from_real(input.a, input.b)?;
    let start = start_point(ctx, &input, &pencil)?;
    let tol = ctx.tol.closure;
    let (doc, params, points, closes, gap) = match (&input.x0, &input.n, &input.chain) {
        (Some(x0), &Some(n), None) => {
            if n == 0 {
                return Err(CliError::user("contract", "n must be at least 1"));
            }
            let x0 = x0.finite()?;
            let s = IncidencePoint::start(&pencil, x0, start, input.tangent.min(1))?;
            let ch = run_chain(&pencil, s, n)?;
            let alg = closure_algebraic(&pencil, x0, n as u32, tol)?;
            let geo = ch.residual < tol;
            let points: Vec<ProjPoint> = ch.states.iter().map(|s| s.p).collect();
            let doc = json!({
                "schema": SCHEMA,
                "mode": "cyclic",
                "n": n,
                "x0": cx(x0),
                "algebraic": { "closes": alg.closes, "residual": num(alg.residual) },
                "geometric": {
                    "closes": geo,
                    "residual": num(ch.residual),
                    "real": ch.real,
                    "branch_points": ch.branch_points,
                },
                "agree": alg.closes == geo,
                "points": points.iter().map(affine).collect::<Vec<_>>(),
            });
            (doc, vec![x0], points, geo, ch.residual)
        }
        (None, None, Some(chain)) => {
            let xs = chain.iter().map(|x| x.finite()).collect::<CliResult<Vec<_>>>()?;
            if xs.is_empty() {
                return Err(CliError::user("contract", "chain must not be empty"));
            }
            let sys = PonceletSystem::new(pencil)?;
            let us = xs.iter().map(|&x| sys.u0(x)).collect::<Result<Vec<_>, _>>()?;
            let alg = closure_algebraic_chain(&pencil, &us, tol)?;
            let gc = sys.run_generalised(&start, &us)?;
            let geo = gc.residual < tol;
            let doc = json!({
                "schema": SCHEMA,
                "mode": "chain",
                "chain": xs.iter().map(|&x| cx(x)).collect::<Vec<_>>(),
                "u": us.iter().map(|&u| cx(u)).collect::<Vec<_>>(),
                "algebraic": { "closes": alg.closes, "residual": num(alg.residual) },
                "geometric": { "closes": geo, "residual": num(gc.residual) },
                "agree": alg.closes == geo,
                "points": gc.points.iter().map(affine).collect::<Vec<_>>(),
            });
            (doc, xs, gc.points, geo, gc.residual)
        }
        _ => {
            return Err(CliError::parse("give either {X0, n} or {chain}"));
        }
    };
    let svg = svg_path.map(|p| (p, figure(&input, &params, &points, closes, gap)));
    Ok(Output {
        body: pretty(&doc),
        input: Some(raw),
        svg,
    })
}
