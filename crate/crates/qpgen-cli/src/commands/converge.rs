//! `qpgen converge`: re-runs one scenario point along truncation chains.

use std::f64::consts::PI;

use qpgen_core::scenarios::{convergence_audit, k_chain, m_chain, nc_chain, AuditScenario};
use serde::Serialize;

use super::tools::wrong;
use super::Ctx;
use crate::config::{AuditPointConfig, Scenario};
use crate::error::CliError;
use crate::output::num;

pub const CONVERGE_HEADER: &str = "chain,n_c,d,m_max,k_max,alpha,beta,gamma_per_s,error";

#[derive(Serialize)]
struct ConvergeDetails {
    gamma_drift: f64,
    energy_drift: f64,
    threshold: f64,
    pass: bool,
}

pub fn run(mut ctx: Ctx) -> Result<(std::path::PathBuf, bool), CliError> {
    let Scenario::Converge { point, m_max, n_c, k_max, threshold } = ctx.run.config.scenario.clone() else {
        return Err(wrong(&ctx, "converge"));
    };
    let scenario = match &point {
        AuditPointConfig::Transmon { circuit, omega_d_ghz, amplitude_ghz, ladder } => AuditScenario::Transmon {
            params: circuit.params()?,
            omega_d: *omega_d_ghz,
            phi_d: amplitude_ghz / omega_d_ghz,
            ladder: *ladder,
        },
        AuditPointConfig::Kapitza { circuit, omega_d_ghz, phi_ac_turns } => AuditScenario::Kapitza {
            params: circuit.params()?,
            omega_d: *omega_d_ghz,
            phi_ac: 2.0 * PI * phi_ac_turns,
        },
    };
    let base = ctx.run.numerics;
    let chains: Vec<(&str, Vec<_>)> = [("m_max", m_chain(base, &m_max)), ("n_c", nc_chain(base, &n_c)), ("k_max", k_chain(base, &k_max))]
        .into_iter()
        .filter(|(_, c)| !c.is_empty())
        .collect();
    let plain: Vec<_> = chains.iter().map(|(_, c)| c.clone()).collect();
    let report = convergence_audit(&scenario, &plain, threshold)?;

    let mut sink = ctx.sink(CONVERGE_HEADER)?;
    let names = chains.iter().flat_map(|(name, c)| std::iter::repeat_n(*name, c.len()));
    for (name, p) in names.zip(&report.points) {
        let n = p.numerics;
        let head = [name.to_string(), n.n_c.to_string(), n.d.to_string(), n.m_max.to_string(), n.k_max.to_string()];
        if let Some(e) = &p.error {
            let mut f = head.to_vec();
            f.extend([String::new(), String::new(), String::new(), e.replace(',', ";")]);
            sink.row(&f)?;
            continue;
        }
        for (&(a, b), &g) in &p.gammas {
            let mut f = head.to_vec();
            let beta = if b == usize::MAX { "total".to_string() } else { b.to_string() };
            f.extend([a.to_string(), beta, num(g), String::new()]);
            sink.row(&f)?;
        }
    }
    ctx.warnings.extend(report.warnings.iter().cloned());
    let details = ConvergeDetails {
        gamma_drift: report.gamma_drift,
        energy_drift: report.energy_drift,
        threshold: report.threshold,
        pass: report.pass,
    };
    let path = ctx.finish(sink, None, details)?;
    Ok((path, report.pass))
}
