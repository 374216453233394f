//! `structure-factors`, `potential` and `label-demo`.

use std::f64::consts::PI;

use qpgen_core::circuits::{effective_potential, kapitza_coefficients};
use qpgen_core::scenarios::{LabelDemo, EFFECTIVE_TERMS};
use qpgen_core::specfn::{s_ph_analytic, s_ph_quadrature, StructureFactorKind};
use rayon::prelude::*;
use serde::Serialize;

use super::Ctx;
use crate::config::Scenario;
use crate::error::CliError;
use crate::output::{count_flags, num};
use crate::svg::{LinePlot, Series};

pub const SF_HEADER: &str =
    "f_GHz,z,s_plus_analytic,s_plus_quadrature,s_minus_analytic,s_minus_quadrature,max_rel_diff";
pub const POTENTIAL_HEADER: &str = "grid_index,phi_ac_turns,phi,e1_GHz,e2_GHz,u_GHz,u_normalized";
pub const LABEL_HEADER: &str = "grid_index,amplitude_GHz,index,overlap,ref_overlap,energy_GHz,flags";

/// Overlap jump between neighbouring amplitudes reported as a discontinuity.
pub const JUMP: f64 = 0.1;

fn rel(a: f64, q: f64) -> f64 {
    if a == q { 0.0 } else { (a - q).abs() / q.abs().max(a.abs()) }
}

#[derive(Serialize)]
struct SfDetails {
    gap_ghz: f64,
    threshold_ghz: f64,
    quadrature_tol: f64,
    max_rel_diff: f64,
}

pub fn structure_factors(mut ctx: Ctx) -> Result<std::path::PathBuf, CliError> {
    let Scenario::StructureFactors { f_ghz, quadrature_tol } = ctx.run.config.scenario.clone() else {
        return Err(wrong(&ctx, "structure_factors"));
    };
    let fs = f_ghz.values("f_ghz")?;
    if fs[0] < 0.0 {
        return Err(CliError::validation("f_ghz must be nonnegative"));
    }
    let gap = ctx.run.env.gap;
    let rows: Vec<Result<[f64; 6], CliError>> = fs
        .par_iter()
        .map(|&f| {
            let pa = s_ph_analytic(StructureFactorKind::Plus, f, gap);
            let ma = s_ph_analytic(StructureFactorKind::Minus, f, gap);
            let pq = s_ph_quadrature(StructureFactorKind::Plus, f, gap, quadrature_tol)?;
            let mq = s_ph_quadrature(StructureFactorKind::Minus, f, gap, quadrature_tol)?;
            Ok([gap.reduced(f), pa, pq, ma, mq, rel(pa, pq).max(rel(ma, mq))])
        })
        .collect();
    let mut sink = ctx.sink(SF_HEADER)?;
    let mut worst = 0.0f64;
    let (mut plus, mut minus) = (Vec::new(), Vec::new());
    for (&f, r) in fs.iter().zip(rows) {
        let r = r?;
        worst = worst.max(r[5]);
        plus.push((f, r[1]));
        minus.push((f, r[3]));
        let mut fields = vec![num(f)];
        fields.extend(r.iter().map(|&x| num(x)));
        sink.row(&fields)?;
    }
    if worst > 1e-6 {
        ctx.warnings.push(format!("analytic and quadrature values differ by up to {worst:.3e} relative"));
    }
    let plot = LinePlot {
        title: "Pair-breaking structure factors".into(),
        x_label: "f (GHz)".into(),
        y_label: "S".into(),
        log_y: false,
        series: vec![Series { name: "S+".into(), points: plus }, Series { name: "S-".into(), points: minus }],
    };
    let details = SfDetails {
        gap_ghz: gap.delta(),
        threshold_ghz: gap.threshold(),
        quadrature_tol,
        max_rel_diff: worst,
    };
    ctx.finish(sink, Some(plot), details)
}

#[derive(Serialize)]
struct PotentialInfo {
    grid_index: usize,
    phi_ac_turns: f64,
    e1_ghz: f64,
    e2_ghz: f64,
    /// Phase of the lowest sample.
    global_minimum_phi: f64,
}

#[derive(Serialize)]
struct PotentialDetails {
    omega_d_ghz: f64,
    normalized: bool,
    points: Vec<PotentialInfo>,
}

pub fn potential(ctx: Ctx) -> Result<std::path::PathBuf, CliError> {
    let Scenario::Potential { circuit, omega_d_ghz, phi_ac_turns, phi_points, normalize } =
        ctx.run.config.scenario.clone()
    else {
        return Err(wrong(&ctx, "potential"));
    };
    let p = circuit.params()?;
    let turns = phi_ac_turns.values("phi_ac_turns")?;
    let phis: Vec<f64> = (0..phi_points).map(|i| -PI + 2.0 * PI * i as f64 / (phi_points - 1) as f64).collect();
    let mut sink = ctx.sink(POTENTIAL_HEADER)?;
    let mut series = Vec::new();
    let mut infos = Vec::new();
    for (i, &t) in turns.iter().enumerate() {
        let (e1, e2) = kapitza_coefficients(&p, 2.0 * PI * t, omega_d_ghz, EFFECTIVE_TERMS)?;
        let u = effective_potential(e1, e2, &phis);
        let (lo, hi) = u.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        let norm = |x: f64| if hi > lo { (x - lo) / (hi - lo) } else { 0.0 };
        let at_min = phis[u.iter().position(|&x| x == lo).unwrap_or(0)];
        for (&f, &x) in phis.iter().zip(&u) {
            sink.row(&[
                i.to_string(),
                num(t),
                num(f),
                num(e1),
                num(e2),
                num(x),
                if normalize { num(norm(x)) } else { String::new() },
            ])?;
        }
        series.push(Series {
            name: format!("phi_ac/2pi = {t}"),
            points: phis.iter().zip(&u).map(|(&f, &x)| (f, if normalize { norm(x) } else { x })).collect(),
        });
        infos.push(PotentialInfo { grid_index: i, phi_ac_turns: t, e1_ghz: e1, e2_ghz: e2, global_minimum_phi: at_min });
    }
    let plot = LinePlot {
        title: "Effective potential".into(),
        x_label: "phi".into(),
        y_label: if normalize { "U (normalized)".into() } else { "U (GHz)".into() },
        log_y: false,
        series,
    };
    ctx.finish(sink, Some(plot), PotentialDetails { omega_d_ghz, normalized: normalize, points: infos })
}

#[derive(Serialize)]
struct LabelDetails {
    omega_d_ghz: f64,
    /// Amplitudes (GHz) after which the overlap jumps by more than `JUMP`.
    discontinuities_ghz: Vec<f64>,
    jump_threshold: f64,
}

pub fn label_demo(mut ctx: Ctx) -> Result<std::path::PathBuf, CliError> {
    let Scenario::LabelDemo { circuit, omega_d_ghz, amplitude_ghz } = ctx.run.config.scenario.clone() else {
        return Err(wrong(&ctx, "label_demo"));
    };
    let amps = amplitude_ghz.values("amplitude_ghz")?;
    let mut demo = LabelDemo::new(circuit.params()?, ctx.run.numerics, omega_d_ghz)?;
    demo.opts = ctx.run.labels;
    let rows = demo.run(&amps)?;
    let mut sink = ctx.sink(LABEL_HEADER)?;
    let mut jumps = Vec::new();
    for (k, r) in rows.iter().enumerate() {
        let flags = r.flags.to_string();
        count_flags(&mut ctx.flag_counts, &flags);
        sink.row(&[
            r.grid_index.to_string(),
            num(r.amplitude),
            r.index.to_string(),
            num(r.overlap),
            num(r.ref_overlap),
            num(r.energy),
            flags,
        ])?;
        if k > 0 && (r.overlap - rows[k - 1].overlap).abs() > JUMP {
            jumps.push(rows[k - 1].amplitude);
        }
    }
    let plot = LinePlot {
        title: "Overlap of the labeled state with |g, 0>".into(),
        x_label: "Omega / 2pi (GHz)".into(),
        y_label: "|<lambda|g,0>|".into(),
        log_y: false,
        series: vec![Series { name: "(g, 0)".into(), points: rows.iter().map(|r| (r.amplitude, r.overlap)).collect() }],
    };
    ctx.finish(sink, Some(plot), LabelDetails { omega_d_ghz, discontinuities_ghz: jumps, jump_threshold: JUMP })
}

pub fn wrong(ctx: &Ctx, expected: &str) -> CliError {
    CliError::validation(format!(
        "command `{}` needs a {expected} scenario, config has {}",
        ctx.command,
        ctx.run.config.scenario.name()
    ))
}
