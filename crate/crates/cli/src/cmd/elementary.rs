//! `special eval`, `weier report`, `sphere legendre-check`.

use ellipton_core::coherent_sphere::{legendre_addition_check, SphericalTriangle};
use ellipton_core::special_functions::{complete_k, incomplete_f, jacobi_sn_cn_dn};
use ellipton_core::{Amplitude, EllipticModulus, WeierstrassModel};
use serde_json::json;

use super::{par_map, Ctx, Output};
use crate::io::{cx, cxs, num, pretty, sphere, CliError, CliResult, Cx, SCHEMA};

pub struct GridArgs {
    pub k: Vec<f64>,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

/// CSV `k,x,K,Kp,sn,cn,dn,F` with `F = F(φ = x | k)`.
pub fn special_eval(ctx: &Ctx, g: &GridArgs) -> CliResult<Output> {
    if g.steps == 0 || !(g.from.is_finite() && g.to.is_finite()) {
        return Err(CliError::user("contract", "the grid needs steps ≥ 1 and finite ends"));
    }
    let mut rows = Vec::new();
    for &k in &g.k {
        let m = EllipticModulus::new(k)?;
        for i in 0..=g.steps {
            rows.push((m, g.from + (g.to - g.from) * i as f64 / g.steps as f64));
        }
    }
    let lines = par_map(ctx.jobs, &rows, |&(m, x)| -> CliResult<String> {
        let kk = complete_k(&m)?;
        let kp = complete_k(&m.complement())?;
        let (sn, cn, dn) = jacobi_sn_cn_dn(x, &m)?;
        let f = incomplete_f(&Amplitude::from_phi(x), &m)?;
        Ok(format!("{},{x},{kk},{kp},{sn},{cn},{dn},{f}\n", m.k()))
    });
    let mut body = String::from("k,x,K,Kp,sn,cn,dn,F\n");
    for line in lines {
        body.push_str(&line?);
    }
    Ok(Output {
        body: body.into_bytes(),
        ..Default::default()
    })
}

pub enum WeierInput {
    RhoK(f64, f64),
    Invariants(f64, f64),
}

pub fn weier_report(input: WeierInput) -> CliResult<Output> {
    let w = match input {
        WeierInput::RhoK(rho, k) => WeierstrassModel::from_rho_k(rho, EllipticModulus::new(k)?)?,
        WeierInput::Invariants(g2, g3) => WeierstrassModel::from_invariants(g2, g3)?,
    };
    let m = w.modulus();
    let doc = json!({
        "schema": SCHEMA,
        "g2": num(w.g2()),
        "g3": num(w.g3()),
        "rho": num(w.rho()),
        "k": num(m.k()),
        "k_prime": num(m.k_prime()),
        "nome": num(w.nome()),
        "e": w.roots().map(num),
        "omega": num(w.omega()),
        "omega_prime": cx(w.omega_prime()),
        "half_periods": cxs(&w.half_periods()),
        "etas": cxs(&w.etas()),
    });
    Ok(Output {
        body: pretty(&doc),
        ..Default::default()
    })
}

pub fn legendre_check(vertices: [Cx; 3]) -> CliResult<Output> {
    let v = vertices.map(Cx::sphere);
    let t = SphericalTriangle::from_vertices(v)?;
    let check = legendre_addition_check(&t)?;
    let doc = json!({
        "schema": SCHEMA,
        "vertices": v.iter().map(sphere).collect::<Vec<_>>(),
        "sides": t.sides.map(num),
        "angles": t.angles.map(num),
        "excess": num(t.excess()),
        "k": num(check.k),
        "lhs": num(check.lhs),
        "two_k": num(check.two_k),
        "residual": num(check.residual),
    });
    Ok(Output {
        body: pretty(&doc),
        ..Default::default()
    })
}
