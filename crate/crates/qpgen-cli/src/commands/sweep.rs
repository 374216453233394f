//! `qpgen sweep`: rate tables for the transmon map, constant-Stark cut, readout and
//! flux-driven SQUID scenarios.
//!
//! Every grid point contributes one row per open channel `(alpha, beta, n, junction)`
//! plus one total row per initial state, which leaves `beta`, `n`, `junction` and
//! `omega_GHz` empty. `T_s` and `xqp_star` are derived from the row's own rate.

use std::f64::consts::PI;

use qpgen_core::rates::{steady_state_xqp, QpEnvironment, RateRow, RateTable};
use qpgen_core::scenarios::{
    charge_drive_map, constant_stark_cut, kapitza_point, readout_map_with, KapitzaSetup, StarkOptions, TransmonModel,
    WELL_STATES,
};
use serde::Serialize;

use super::Ctx;
use crate::config::Scenario;
use crate::error::CliError;
use crate::output::{count_flags, num, opt_num, CsvSink, RATE_HEADER};
use crate::svg::{LinePlot, Series};

fn xqp(gamma: f64, env: &QpEnvironment<f64>) -> Result<f64, CliError> {
    Ok(steady_state_xqp(gamma, env.n_cp, env.c_r)?)
}

fn lifetime(gamma: f64) -> f64 {
    if gamma > 0.0 { 1.0 / gamma } else { f64::INFINITY }
}

struct Writer<'a> {
    ctx: &'a mut Ctx,
    sink: CsvSink,
}

impl Writer<'_> {
    fn channel(&mut self, grid: usize, omega_d: f64, amp: f64, r: &RateRow<f64>) -> Result<(), CliError> {
        let flags = r.flags.to_string();
        count_flags(&mut self.ctx.flag_counts, &flags);
        let env = self.ctx.run.env;
        self.sink.row(&[
            grid.to_string(),
            num(omega_d),
            num(amp),
            r.alpha.to_string(),
            r.beta.to_string(),
            r.n.to_string(),
            r.junction.to_string(),
            num(r.omega),
            num(r.gamma),
            num(lifetime(r.gamma)),
            num(xqp(r.gamma, &env)?),
            flags,
        ])
    }

    fn total(&mut self, grid: usize, omega_d: f64, amp: Option<f64>, alpha: usize, gamma: Option<f64>, flags: String) -> Result<(), CliError> {
        count_flags(&mut self.ctx.flag_counts, &flags);
        let env = self.ctx.run.env;
        let (t, x) = match gamma {
            Some(g) => (Some(lifetime(g)), Some(xqp(g, &env)?)),
            None => (None, None),
        };
        self.sink.row(&[
            grid.to_string(),
            num(omega_d),
            opt_num(amp),
            alpha.to_string(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            opt_num(gamma),
            opt_num(t),
            opt_num(x),
            flags,
        ])
    }

    /// Channel rows of `alpha` followed by its total row.
    fn table(&mut self, grid: usize, omega_d: f64, amp: f64, table: &RateTable<f64>, alphas: &[usize]) -> Result<(), CliError> {
        for &a in alphas {
            let mut flags = Vec::new();
            for r in table.rows.iter().filter(|r| r.alpha == a) {
                self.channel(grid, omega_d, amp, r)?;
                for f in r.flags.to_string().split('|').filter(|f| !f.is_empty()) {
                    if !flags.contains(&f.to_string()) {
                        flags.push(f.to_string());
                    }
                }
            }
            self.total(grid, omega_d, Some(amp), a, Some(table.gamma_a(a)), flags.join("|"))?;
        }
        Ok(())
    }
}

fn chunk_size() -> usize {
    rayon::current_num_threads().max(1)
}

fn transmon_model(ctx: &Ctx, circuit: &crate::config::TransmonConfig, finals: Option<usize>) -> Result<TransmonModel, CliError> {
    let mut m = TransmonModel::new(circuit.params()?, ctx.run.numerics)?;
    m.env = ctx.run.env;
    m.label_opts = ctx.run.labels;
    if let Some(f) = finals {
        m = m.with_finals((0..f).collect())?;
    }
    Ok(m)
}

#[derive(Serialize)]
struct MapDetails {
    omega_d_ghz: Vec<f64>,
    amplitude_ghz: Vec<f64>,
    grid_index: &'static str,
    qubit_frequency_ghz: f64,
    initial_states: Vec<usize>,
}

#[derive(Serialize)]
struct StarkPointInfo {
    grid_index: usize,
    omega_d_ghz: f64,
    phi_d: Option<f64>,
    amplitude_ghz: Option<f64>,
    stark_shift_ghz: Option<f64>,
    diagnostic: Option<String>,
}

#[derive(Serialize)]
struct StarkDetails {
    omega_d_ghz: Vec<f64>,
    target_ghz: f64,
    qubit_frequency_ghz: f64,
    amplitude: &'static str,
    points: Vec<StarkPointInfo>,
}

#[derive(Serialize)]
struct ReadoutInfo {
    grid_index: usize,
    omega_r_ghz: f64,
    ng: f64,
    g_ghz: f64,
    nbar: f64,
    phi_d: f64,
}

#[derive(Serialize)]
struct ReadoutDetails {
    omega_r_ghz: Vec<f64>,
    ng: Vec<f64>,
    nbar: Vec<f64>,
    chi_ghz: f64,
    grid_index: &'static str,
    amplitude: &'static str,
    points: Vec<ReadoutInfo>,
}

#[derive(Serialize)]
struct WellInfo {
    name: &'static str,
    alpha: usize,
    present: bool,
    bound: bool,
    overlap: f64,
    energy_ghz: Option<f64>,
    gamma_per_s: f64,
    gamma_junction_per_s: [f64; 2],
    #[serde(rename = "T_s")]
    t_s: Option<f64>,
    flags: String,
}

#[derive(Serialize)]
struct KapitzaInfo {
    grid_index: usize,
    phi_ac_turns: f64,
    e1_ghz: f64,
    e2_ghz: f64,
    states: Vec<WellInfo>,
}

#[derive(Serialize)]
struct KapitzaDetails {
    omega_d_ghz: f64,
    phi_ac_turns: Vec<f64>,
    alpha: &'static str,
    points: Vec<KapitzaInfo>,
}

pub fn run(mut ctx: Ctx) -> Result<std::path::PathBuf, CliError> {
    let scenario = ctx.run.config.scenario.clone();
    if !matches!(
        scenario,
        Scenario::TransmonMap { .. } | Scenario::StarkCut { .. } | Scenario::Readout { .. } | Scenario::Kapitza { .. }
    ) {
        return Err(CliError::validation(format!(
            "scenario {} is not a sweep; use the `{}` command",
            scenario.name(),
            scenario.name().replace('_', "-")
        )));
    }
    let sink = ctx.sink(RATE_HEADER)?;
    match scenario {
        Scenario::TransmonMap { circuit, omega_d_ghz, amplitude_ghz, final_states } => {
            let omegas = omega_d_ghz.values("omega_d_ghz")?;
            let amps = amplitude_ghz.values("amplitude_ghz")?;
            let model = transmon_model(&ctx, &circuit, final_states)?;
            let mut w = Writer { ctx: &mut ctx, sink };
            let mut curves: Vec<Series> = Vec::new();
            let picks = plot_picks(amps.len(), 6);
            for &j in &picks {
                curves.push(Series { name: format!("Omega = {:.3} GHz", amps[j]), points: Vec::new() });
            }
            let na = amps.len();
            let mut start = 0;
            for chunk in omegas.chunks(chunk_size()) {
                let pts = charge_drive_map(&model, chunk, &amps)?;
                for p in &pts {
                    let g = start * na + p.grid_index;
                    w.table(g, p.omega_d, p.amplitude, &p.point.table, &model.initial)?;
                    if let Some(k) = picks.iter().position(|&j| j == g % na) {
                        curves[k].points.push((p.omega_d, p.point.table.gamma_a(0)));
                    }
                }
                w.sink.flush()?;
                start += chunk.len();
            }
            let plot = LinePlot {
                title: "Total pair-breaking rate of |g>".into(),
                x_label: "omega_d / 2pi (GHz)".into(),
                y_label: "Gamma_g (1/s)".into(),
                log_y: true,
                series: curves,
            };
            let details = MapDetails {
                omega_d_ghz: omegas,
                amplitude_ghz: amps,
                grid_index: "i_omega * len(amplitude_ghz) + i_amplitude",
                qubit_frequency_ghz: model.qubit_frequency(),
                initial_states: model.initial.clone(),
            };
            let sink = w.sink;
            ctx.finish(sink, Some(plot), details)
        }
        Scenario::StarkCut { circuit, omega_d_ghz, stark_shift_mhz, tolerance_khz, final_states } => {
            let omegas = omega_d_ghz.values("omega_d_ghz")?;
            let model = transmon_model(&ctx, &circuit, final_states)?;
            let target = stark_shift_mhz * 1e-3;
            let opts = StarkOptions { tol: tolerance_khz * 1e-6, ..StarkOptions::default() };
            let mut w = Writer { ctx: &mut ctx, sink };
            let names = ["Gamma_gg", "Gamma_ge", "Gamma_eg", "Gamma_ee"];
            let mut curves: Vec<Series> =
                names.iter().map(|n| Series { name: n.to_string(), points: Vec::new() }).collect();
            let mut infos = Vec::new();
            let mut start = 0;
            for chunk in omegas.chunks(chunk_size()) {
                for c in constant_stark_cut(&model, target, chunk, &opts)? {
                    let g = start + c.grid_index;
                    match &c.point {
                        Some(p) => {
                            let amp = p.phi_d * p.omega_d;
                            w.table(g, p.omega_d, amp, &p.table, &model.initial)?;
                            for (k, (a, b)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
                                curves[k].points.push((p.omega_d, p.table.gamma_ab(a, b)));
                            }
                            infos.push(StarkPointInfo {
                                grid_index: g,
                                omega_d_ghz: c.omega_d,
                                phi_d: Some(p.phi_d),
                                amplitude_ghz: Some(amp),
                                stark_shift_ghz: Some(p.stark),
                                diagnostic: None,
                            });
                        }
                        None => {
                            let msg = c.diagnostic.clone().unwrap_or_default();
                            w.ctx.warnings.push(format!("grid point {g} (omega_d = {} GHz): {msg}", c.omega_d));
                            for &a in &model.initial {
                                w.total(g, c.omega_d, None, a, None, "unsolved".into())?;
                            }
                            for s in curves.iter_mut() {
                                s.points.push((c.omega_d, f64::NAN));
                            }
                            infos.push(StarkPointInfo {
                                grid_index: g,
                                omega_d_ghz: c.omega_d,
                                phi_d: None,
                                amplitude_ghz: None,
                                stark_shift_ghz: None,
                                diagnostic: c.diagnostic.clone(),
                            });
                        }
                    }
                }
                w.sink.flush()?;
                start += chunk.len();
            }
            let plot = LinePlot {
                title: format!("Rates at constant |delta_ac| = {stark_shift_mhz} MHz"),
                x_label: "omega_d / 2pi (GHz)".into(),
                y_label: "Gamma (1/s)".into(),
                log_y: true,
                series: curves,
            };
            let details = StarkDetails {
                omega_d_ghz: omegas,
                target_ghz: target,
                qubit_frequency_ghz: model.qubit_frequency(),
                amplitude: "lab-frame Omega / 2pi in GHz (phi_d * omega_d)",
                points: infos,
            };
            let sink = w.sink;
            ctx.finish(sink, Some(plot), details)
        }
        Scenario::Readout { ej, ec, ng, omega_r_ghz, chi_mhz, nbar } => {
            let omegas = omega_r_ghz.values("omega_r_ghz")?;
            let ngs = ng.values("ng")?;
            let nbars = nbar.values("nbar")?;
            let base = qpgen_core::circuits::TransmonParams::new(ej, ec, ngs[0])?;
            let (env, labels) = (ctx.run.env, ctx.run.labels);
            let setup = move |m: &mut TransmonModel| {
                m.env = env;
                m.label_opts = labels;
            };
            let numerics = ctx.run.numerics;
            let mut w = Writer { ctx: &mut ctx, sink };
            let per = ngs.len() * nbars.len();
            let mut curves = Vec::new();
            let mut infos = Vec::new();
            let mut start = 0;
            for chunk in omegas.chunks(chunk_size().div_ceil(ngs.len()).max(1)) {
                let pts = readout_map_with(base, numerics, chunk, &ngs, chi_mhz * 1e-3, &nbars, &setup)?;
                for group in pts.chunks(nbars.len()) {
                    curves.push(Series {
                        name: format!("{} GHz, ng = {}", group[0].omega_r, group[0].ng),
                        points: group.iter().map(|p| (p.nbar, p.t_g.seconds().unwrap_or(f64::NAN))).collect(),
                    });
                }
                for p in &pts {
                    let g = start * per + p.grid_index;
                    w.table(g, p.omega_r, p.nbar, &p.point.table, &[0, 1])?;
                    infos.push(ReadoutInfo { grid_index: g, omega_r_ghz: p.omega_r, ng: p.ng, g_ghz: p.g, nbar: p.nbar, phi_d: p.phi_d });
                }
                w.sink.flush()?;
                start += chunk.len();
            }
            let plot = LinePlot {
                title: format!("Ground-state lifetime, chi = {chi_mhz} MHz"),
                x_label: "nbar".into(),
                y_label: "T_g (s)".into(),
                log_y: true,
                series: curves,
            };
            let details = ReadoutDetails {
                omega_r_ghz: omegas,
                ng: ngs,
                nbar: nbars,
                chi_ghz: chi_mhz * 1e-3,
                grid_index: "(i_omega_r * len(ng) + i_ng) * len(nbar) + i_nbar",
                amplitude: "mean resonator photon number nbar",
                points: infos,
            };
            let sink = w.sink;
            ctx.finish(sink, Some(plot), details)
        }
        Scenario::Kapitza { circuit, omega_d_ghz, phi_ac_turns } => {
            let turns = phi_ac_turns.values("phi_ac_turns")?;
            let mut setup = KapitzaSetup::new(circuit.params()?, ctx.run.numerics, omega_d_ghz)?;
            setup.env = ctx.run.env;
            let mut w = Writer { ctx: &mut ctx, sink };
            let mut curves: Vec<Series> =
                WELL_STATES.iter().map(|n| Series { name: format!("T_{n}"), points: Vec::new() }).collect();
            let mut infos = Vec::new();
            for (i, &t) in turns.iter().enumerate() {
                let p = kapitza_point(&setup, 2.0 * PI * t, i)?;
                let mut states = Vec::new();
                for (k, st) in p.states.iter().enumerate() {
                    let mut flags = st.flags.to_string();
                    if !st.present() {
                        flags = if flags.is_empty() { "absent".into() } else { format!("{flags}|absent") };
                        w.ctx.warnings.push(format!("grid point {i}: state {} absent", st.name));
                    }
                    for r in p.table.rows.iter().filter(|r| r.alpha == k) {
                        w.channel(i, omega_d_ghz, t, r)?;
                    }
                    let gamma = st.present().then_some(st.gamma);
                    w.total(i, omega_d_ghz, Some(t), k, gamma, flags.clone())?;
                    curves[k].points.push((t, st.lifetime.seconds().filter(|_| st.present()).unwrap_or(f64::NAN)));
                    states.push(WellInfo {
                        name: st.name,
                        alpha: k,
                        present: st.present(),
                        bound: st.bound,
                        overlap: st.overlap,
                        energy_ghz: st.energy.is_finite().then_some(st.energy),
                        gamma_per_s: st.gamma,
                        gamma_junction_per_s: st.gamma_junction,
                        t_s: st.lifetime.seconds(),
                        flags,
                    });
                }
                infos.push(KapitzaInfo { grid_index: i, phi_ac_turns: t, e1_ghz: p.e1, e2_ghz: p.e2, states });
                w.sink.flush()?;
            }
            let plot = LinePlot {
                title: "Well-state lifetimes".into(),
                x_label: "phi_ac / 2pi".into(),
                y_label: "T (s)".into(),
                log_y: true,
                series: curves,
            };
            let details = KapitzaDetails {
                omega_d_ghz,
                phi_ac_turns: turns,
                alpha: "well state index: 0 = g0, 1 = e0, 2 = gpi, 3 = epi",
                points: infos,
            };
            let sink = w.sink;
            ctx.finish(sink, Some(plot), details)
        }
        _ => unreachable!("checked above"),
    }
}

/// Up to `k` evenly spread indices of `0..n`.
fn plot_picks(n: usize, k: usize) -> Vec<usize> {
    if n <= k {
        return (0..n).collect();
    }
    let mut v: Vec<usize> = (0..k).map(|i| i * (n - 1) / (k - 1)).collect();
    v.dedup();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn picks() {
        assert_eq!(plot_picks(3, 6), vec![0, 1, 2]);
        assert_eq!(plot_picks(20, 6), vec![0, 3, 7, 11, 15, 19]);
    }
}
