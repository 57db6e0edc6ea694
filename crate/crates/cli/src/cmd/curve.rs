//! `curve report`, `integrals table`.

use std::path::Path;

use ellipton_core::o4_integrals::{ContourSpec, IntegralContext};
use serde_json::json;

use super::{par_map, Ctx, Output};
use crate::io::{
    cx, cxs, from_value, multiplet_json, num, pretty, read_input, sphere, CliResult, MultipletSpec, SCHEMA,
};

pub fn curve_report(path: &Path) -> CliResult<Output> {
    let (raw, value) = read_input(path)?;
    let m = from_value::<MultipletSpec>(value)?.build()?;
    let w = m.weierstrass()?;
    let (g2, g3) = m.g2_g3();
    let ci = m.chordal_invariants();
    let cp = m.cayley_pair()?;
    let (u_inf, u_plus, u_minus) = m.infinity_points()?;
    let mut doc = multiplet_json(&m);
    let extra = json!({
        "schema": SCHEMA,
        "rho": num(m.rho),
        "alpha": cx(m.alpha),
        "beta": cx(m.beta),
        "coefficients": cxs(&m.coefficients()),
        "roots": m.roots().iter().map(sphere).collect::<Vec<_>>(),
        "k": num(ci.modulus.k()),
        "k_prime": num(ci.modulus.k_prime()),
        "delta_ab": num(ci.delta_ab),
        "e": w.roots().map(num),
        "g2": num(g2),
        "g3": num(g3),
        "x_plus": num(cp.x_plus),
        "x_minus": num(cp.x_minus),
        "v_plus": num(cp.v_plus),
        "v_minus": num(cp.v_minus),
        "cayley_a": cp.a.map(|r| r.map(num)),
        "cayley_b": cp.b.map(|r| r.map(num)),
        "u_infinity": [cx(u_inf.u()), cx(u_plus.u()), cx(u_minus.u())],
    });
    let obj = doc.as_object_mut().expect("object");
    for (k, v) in extra.as_object().expect("object") {
        obj.insert(k.clone(), v.clone());
    }
    Ok(Output {
        body: pretty(&doc),
        input: Some(raw),
        svg: None,
    })
}

/// CSV of `I_m` over the cycles `Γ_1..Γ_3` for `m = −2..2`, optionally with
/// an adaptive-quadrature column.
pub fn integrals_table(ctx: &Ctx, path: &Path, quadrature: bool) -> CliResult<Output> {
    let (raw, value) = read_input(path)?;
    let m = from_value::<MultipletSpec>(value)?.build()?;
    let ic = IntegralContext::new(&m)?;
    let cells: Vec<(i32, usize)> = (-2..=2).flat_map(|m| (1..=3).map(move |i| (m, i))).collect();
    let rows = par_map(ctx.jobs, &cells, |&(mm, i)| -> CliResult<String> {
        let v = ic.complete(mm, i)?;
        let mut row = format!("{mm},{i},{},{}", v.re, v.im);
        if quadrature {
            let q = ic.quadrature(mm, &ContourSpec::Closed { cycle: i })?;
            row.push_str(&format!(",{},{},{:e}", q.re, q.im, (q - v).norm()));
        }
        row.push('\n');
        Ok(row)
    });
    let mut body = String::from("m,i,re,im");
    if quadrature {
        body.push_str(",quad_re,quad_im,abs_diff");
    }
    body.push('\n');
    for r in rows {
        body.push_str(&r?);
    }
    Ok(Output {
        body: body.into_bytes(),
        input: Some(raw),
        svg: None,
    })
}
