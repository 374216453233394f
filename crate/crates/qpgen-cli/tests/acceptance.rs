//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! `QPGEN_PROFILE=full` selects the full truncation (slow); the default is the CI profile.
//! Failing criteria are reported but do not fail the test run unless `QPGEN_ACCEPT_STRICT=1`.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use qpgen_core::circuits::{kapitza_coefficients, SquidParams, TransmonParams};
use qpgen_core::floquet::diagonalize;
use qpgen_core::rates::steady_state_xqp;
use qpgen_core::scenarios::{
    charge_drive_map, constant_stark_cut, convergence_audit, kapitza_point, m_chain, readout_map, AuditScenario,
    KapitzaPoint, KapitzaSetup, Numerics, Profile, StarkOptions, TransmonModel, EFFECTIVE_TERMS,
};
use qpgen_core::specfn::{bessel_j, s_ph_analytic, s_ph_quadrature, Gap, StructureFactorKind};

type Check = Result<(bool, String), String>;

// Pinned tolerances.
const SF_REL: f64 = 1e-6;
const SF_THRESHOLD_ABS: f64 = 1e-3;
const SF_QUAD_TOL: f64 = 1e-10;
/// Distance above threshold `z = 2` used for the limiting values.
const SF_EDGE: f64 = 1e-6;
const REPLICA_ABS_GHZ: f64 = 1e-9;
const M0_ENERGY_REL: f64 = 1e-6;
const M0_GAMMA_REL: f64 = 1e-8;
/// Channels below this fraction of the largest one are limited by eigenvector roundoff
/// (relative error ~1e-13 / sqrt(fraction)); their drift is printed but not judged.
const M0_GAMMA_FLOOR: f64 = 1e-6;
const M0_GAMMA_REPORT_FLOOR: f64 = 1e-10;
const STEP_WINDOW: f64 = 0.005;
const EVEN_STEP_MIN: f64 = 10.0;
const ODD_STEP_MAX: f64 = 3.0;
const EXPONENT_REL: f64 = 0.02;
const STARK_TARGET_GHZ: f64 = 3e-3;
const STARK_TOL_GHZ: f64 = 1e-6;
const BESSEL_ZERO_TURNS: f64 = 0.76547;
const BESSEL_ZERO_TOL: f64 = 1e-5;
const EJ2PHI_GHZ: f64 = 0.5;
const EJ2PHI_REL: f64 = 0.02;
const LIFETIME_SCALE_S: f64 = 1e-7;
const LIFETIME_FACTOR: f64 = 3.0;
const JUNCTION_REL: f64 = 1e-6;
const XQP_REL: f64 = 1e-12;
const DRIFT_MAX: f64 = 1e-4;

const GAP_GHZ: f64 = 45.0;
const FIG2: (f64, f64) = (3.025, 0.056);
const FIG3: (f64, f64) = (12.85, 0.218);
const FIG4_EJ: f64 = 81.6;
const FIG4_EC: f64 = 0.010;
const FIG4_OMEGA: f64 = 10.0;
const COEXISTENCE_TURNS: [f64; 3] = [0.76, 0.765, 0.77];

fn rel(a: f64, b: f64) -> f64 {
    if a == b { 0.0 } else { (a - b).abs() / a.abs().max(b.abs()) }
}

fn sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(", ")
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn fig2_model(profile: Profile) -> Result<TransmonModel, String> {
    TransmonModel::new(TransmonParams::new(FIG2.0, FIG2.1, 0.0).map_err(err)?, Numerics::transmon(profile)).map_err(err)
}

fn fig4_params() -> Result<SquidParams<f64>, String> {
    SquidParams::new(FIG4_EJ, FIG4_EJ, FIG4_EC, 0.0, 0.5, 0.5).map_err(err)
}

/// First zero of `J_0(x / 2)` in turns of `2 pi`, by bisection.
fn bessel_zero_turns() -> f64 {
    let f = |t: f64| bessel_j(0, PI * t);
    let (mut lo, mut hi) = (0.7, 0.8);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 { hi = mid } else { lo = mid }
    }
    0.5 * (lo + hi)
}

fn structure_factors() -> Check {
    let gap = Gap::new(GAP_GHZ).map_err(err)?;
    let mut worst = 0.0f64;
    for z in [2.01, 2.1, 2.5, 3.0, 5.0, 10.0] {
        for kind in [StructureFactorKind::Plus, StructureFactorKind::Minus] {
            let a = s_ph_analytic(kind, z * GAP_GHZ, gap);
            let q = s_ph_quadrature(kind, z * GAP_GHZ, gap, SF_QUAD_TOL).map_err(err)?;
            worst = worst.max(rel(a, q));
        }
    }
    let f = (2.0 + SF_EDGE) * GAP_GHZ;
    let sp = s_ph_quadrature(StructureFactorKind::Plus, f, gap, SF_QUAD_TOL).map_err(err)?;
    let sm = s_ph_quadrature(StructureFactorKind::Minus, f, gap, SF_QUAD_TOL).map_err(err)?;
    let ok = worst < SF_REL && (sp - PI).abs() < SF_THRESHOLD_ABS && sm.abs() < SF_THRESHOLD_ABS;
    Ok((ok, format!("max rel diff {worst:.2e}; at z = 2+{SF_EDGE:.0e}: S+ - pi = {:.2e}, S- = {sm:.2e}", sp - PI)))
}

fn undriven_replicas(profile: Profile) -> Check {
    let omega = 5.059;
    let model = TransmonModel::new(TransmonParams::new(30.0, 0.15, 0.0).map_err(err)?, Numerics::transmon(profile))
        .map_err(err)?;
    let spec = diagonalize(&model.problem_even(0.0, omega).map_err(err)?).map_err(err)?;
    let n = model.numerics;
    let w = (n.m_max - n.guard) as i64;
    let mut worst = 0.0f64;
    for m in -w..=w {
        for &e in &model.eig.energies_even {
            let want = e + m as f64 * omega;
            let near = spec.energies.iter().fold(f64::INFINITY, |b, &x| b.min((x - want).abs()));
            worst = worst.max(near);
        }
    }
    Ok((worst < REPLICA_ABS_GHZ, format!("{} replicas, |m| <= {w}, max error {worst:.2e} GHz", (2 * w + 1) as usize * n.d)))
}

fn replica_invariance(profile: Profile) -> Check {
    let (omega, amp) = (50.0, 5.0);
    let base = fig2_model(profile)?;
    let m_max = base.numerics.m_max;
    let w = (m_max - base.numerics.guard) as i64;
    let default_m0 = base.rate_opts.initial_index(m_max);
    let mut tables = Vec::new();
    let mut e_worst = 0.0f64;
    for m0 in [default_m0, 0, -1] {
        let mut model = base.clone();
        model.rate_opts.m0 = Some(m0);
        let mut tr = model.start(omega).map_err(err)?;
        let (spec, _) = tr.advance_even(amp / omega).map_err(err)?;
        for (slot, &j) in tr.labels.index.iter().enumerate() {
            let e0 = tr.labels.energies[slot];
            let (k, _) = spec.replica(j, m0);
            let e = spec.energies[k] - m0 as f64 * omega;
            e_worst = e_worst.max((e - e0).abs() / e0.abs().max(omega));
        }
        tables.push((m0, tr.finish(&spec, 0.0).map_err(err)?.table));
    }
    // Photon numbers admissible for every m0 tried.
    let lo = tables.iter().map(|(m0, _)| m0 - w).max().unwrap_or(0).max(1);
    let hi = tables.iter().map(|(m0, _)| m0 + w).min().unwrap_or(0);
    let reference = &tables[0].1;
    let scale = reference.rows.iter().fold(0.0f64, |m, r| m.max(r.gamma));
    let mut g_worst = 0.0f64;
    let mut g_small = 0.0f64;
    let mut compared = 0;
    for a in [0usize, 1] {
        for b in 0..base.numerics.d {
            for n in lo..=hi {
                let x = reference.gamma_abn(a, b, n);
                for (_, t) in &tables[1..] {
                    let y = t.gamma_abn(a, b, n);
                    if x.max(y) > M0_GAMMA_FLOOR * scale {
                        g_worst = g_worst.max(rel(x, y));
                        compared += 1;
                    } else if x.max(y) > M0_GAMMA_REPORT_FLOOR * scale {
                        g_small = g_small.max(rel(x, y));
                    }
                }
            }
        }
    }
    let ok = e_worst < M0_ENERGY_REL && g_worst < M0_GAMMA_REL && compared > 0;
    Ok((
        ok,
        format!("m0 in {{{default_m0}, 0, -1}}, n in [{lo}, {hi}]: energy drift {e_worst:.2e}, rate drift {g_worst:.2e} over {compared} channels above {M0_GAMMA_FLOOR:.0e} of the largest ({g_small:.2e} below)"),
    ))
}

fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn step_structure(profile: Profile) -> Check {
    let model = fig2_model(profile)?;
    let opts = StarkOptions { tol: STARK_TOL_GHZ, ..StarkOptions::default() };
    let two_delta = 2.0 * GAP_GHZ;
    let wq = model.qubit_frequency() - STARK_TARGET_GHZ;
    let (lo, hi) = (1.0 - STEP_WINDOW, 1.0 + STEP_WINDOW);
    // (alpha, beta, n, step frequency)
    let mut edges = vec![(0usize, 0usize, 2i64, two_delta / 2.0), (0, 0, 3, two_delta / 3.0)];
    for n in [2i64, 3] {
        edges.push((0, 1, n, (two_delta + wq) / n as f64));
        edges.push((1, 0, n, (two_delta - wq) / n as f64));
    }
    let mut omegas: Vec<f64> = edges.iter().flat_map(|e| [e.3 * lo, e.3 * hi]).collect();
    // Bare-gap edge, which the ge and eg steps must not sit on.
    omegas.extend([two_delta / 2.0 * hi, two_delta / 2.0 * lo]);
    let cut = constant_stark_cut(&model, STARK_TARGET_GHZ, &omegas, &opts).map_err(err)?;
    let mut tables = Vec::new();
    for p in &cut {
        match &p.point {
            Some(pt) => tables.push(pt.table.clone()),
            None => return Ok((false, format!("no 3 MHz point at {} GHz: {:?}", p.omega_d, p.diagnostic))),
        }
    }
    let mut notes = Vec::new();
    let mut ok = true;
    let ratio = |i: usize, a: usize, b: usize| tables[2 * i + 1].gamma_ab(a, b) / tables[2 * i].gamma_ab(a, b);
    let r2 = ratio(0, 0, 0);
    let r3 = ratio(1, 0, 0);
    ok &= r2 > EVEN_STEP_MIN && r3 < ODD_STEP_MAX;
    notes.push(format!("gg jump n=2 {r2:.3e} (> {EVEN_STEP_MIN}), n=3 {r3:.3e} (< {ODD_STEP_MAX})"));
    let mut placed = true;
    for (i, &(a, b, n, _)) in edges.iter().enumerate() {
        let below = tables[2 * i].gamma_abn(a, b, n);
        let above = tables[2 * i + 1].gamma_abn(a, b, n);
        placed &= below == 0.0 && above > 0.0;
    }
    let k = edges.len();
    let ge_closed_above_gap = tables[2 * k].gamma_abn(0, 1, 2) == 0.0;
    let eg_open_below_gap = tables[2 * k + 1].gamma_abn(1, 0, 2) > 0.0;
    placed &= ge_closed_above_gap && eg_open_below_gap;
    ok &= placed;
    notes.push(format!("ge/eg steps at (2D +- wq)/n: {}", if placed { "yes" } else { "no" }));

    // Weak-drive power law of single channels at fixed frequency.
    let phis = [0.0025, 0.005, 0.01, 0.02];
    for (a, b, n, w) in [(0usize, 0usize, 2i64, 50.0), (0, 1, 3, 35.0)] {
        let amps: Vec<f64> = phis.iter().map(|p| p * w).collect();
        let g = charge_drive_map(&model, &[w], &amps).map_err(err)?;
        let ys: Vec<f64> = g.iter().map(|p| p.point.table.gamma_abn(a, b, n)).collect();
        let slope = log_slope(&phis, &ys);
        let good = rel(slope, 2.0 * n as f64) < EXPONENT_REL;
        ok &= good;
        notes.push(format!("exponent ({a}{b}, n={n}, {w} GHz) {slope:.4}"));
    }
    Ok((ok, notes.join("; ")))
}

fn bessel_zero() -> Check {
    let t = bessel_zero_turns();
    let (_, e2) = kapitza_coefficients(&fig4_params()?, 2.0 * PI * t, FIG4_OMEGA, EFFECTIVE_TERMS).map_err(err)?;
    let ok = (t - BESSEL_ZERO_TURNS).abs() < BESSEL_ZERO_TOL && rel(e2, EJ2PHI_GHZ) < EJ2PHI_REL;
    Ok((ok, format!("phi*/2pi = {t:.7}, E_J,2phi = {e2:.5} GHz")))
}

fn kapitza_points(profile: Profile) -> Result<Vec<KapitzaPoint>, String> {
    let setup = KapitzaSetup::new(fig4_params()?, Numerics::squid(profile), FIG4_OMEGA).map_err(err)?;
    let mut turns = COEXISTENCE_TURNS.to_vec();
    turns.push(bessel_zero_turns());
    turns.iter().enumerate().map(|(i, &t)| kapitza_point(&setup, 2.0 * PI * t, i).map_err(err)).collect()
}

fn seconds(p: &KapitzaPoint, name: &str) -> Option<f64> {
    p.state(name).filter(|s| s.present()).map(|s| s.lifetime.seconds().unwrap_or(f64::INFINITY))
}

fn zero_pi_lifetimes(profile: Profile, pts: &[KapitzaPoint]) -> Check {
    let mut ordered = true;
    let mut compared = 0;
    let mut notes = Vec::new();
    for p in &pts[..COEXISTENCE_TURNS.len()] {
        for (zero, pi) in [("g0", "gpi"), ("e0", "epi")] {
            if let (Some(a), Some(b)) = (seconds(p, zero), seconds(p, pi)) {
                ordered &= b < a;
                compared += 1;
            }
        }
        notes.push(format!(
            "{:.4}: T_g0 {:.2e} T_gpi {:.2e}",
            p.phi_ac / (2.0 * PI),
            seconds(p, "g0").unwrap_or(f64::NAN),
            seconds(p, "gpi").unwrap_or(f64::NAN)
        ));
    }
    let collisions = pts
        .iter()
        .flat_map(|p| p.states.iter())
        .filter(|s| s.present() && s.flags.conflict)
        .count();
    notes.push(format!("{collisions} well states share a Floquet state with another"));
    let mut ok = ordered && compared > 0;
    if profile == Profile::Full {
        let star = &pts[COEXISTENCE_TURNS.len()];
        let ts: Vec<f64> = ["g0", "e0", "gpi", "epi"].iter().filter_map(|n| seconds(star, n)).collect();
        let in_band = !ts.is_empty()
            && ts.iter().all(|&t| t > LIFETIME_SCALE_S / LIFETIME_FACTOR && t < LIFETIME_SCALE_S * LIFETIME_FACTOR);
        ok &= in_band;
        notes.push(format!("at phi*: T = [{}]", sci(&ts)));
    }
    Ok((ok, format!("pi below 0 in {compared} pairs: {}; {}", if ordered { "yes" } else { "no" }, notes.join(", "))))
}

fn readout(profile: Profile) -> Check {
    let params = TransmonParams::new(FIG3.0, FIG3.1, 0.0).map_err(err)?;
    let numerics = Numerics::readout(profile);
    let rs = [20.0, 25.0, 34.0, 46.0];
    let ladder: Vec<f64> = (0..=10).map(|k| 5.0 * k as f64).collect();
    let pts = readout_map(params, numerics, &rs, &[0.0], 1e-3, &ladder).map_err(err)?;
    let tg: Vec<f64> = rs
        .iter()
        .map(|&w| {
            let p = pts.iter().find(|p| p.omega_r == w && p.nbar == 50.0).expect("grid point");
            p.t_g.seconds().unwrap_or(f64::INFINITY)
        })
        .collect();
    // Ascending omega_r, so lifetimes must fall.
    let ordered = tg.windows(2).all(|w| w[0] > w[1]);

    let ngs = [0.0, 0.1, 0.25, 0.4, 0.5];
    let nbar: Vec<f64> = (0..=30).map(|k| 5.0 * k as f64).collect();
    let dip_pts = readout_map(params, numerics, &[25.0], &ngs, 1e-3, &nbar).map_err(err)?;
    let mut dips = Vec::new();
    for &ng in &ngs {
        let t: Vec<(f64, f64)> = dip_pts
            .iter()
            .filter(|p| p.ng == ng)
            .map(|p| (p.nbar, p.t_g.seconds().unwrap_or(f64::INFINITY)))
            .collect();
        for w in t.windows(3) {
            if (80.0..=120.0).contains(&w[1].0) && w[1].1 < w[0].1 && w[1].1 < w[2].1 {
                dips.push((ng, w[1].0));
            }
        }
    }

    let env = qpgen_core::rates::QpEnvironment::<f64>::default();
    let mut xqp_ok = true;
    for (gamma, frozen) in [(1.0, 2.449489742783178e-7), (1e3, 7.745966692414834e-6), (1e6, 2.449489742783178e-4)] {
        let x = steady_state_xqp(gamma, env.n_cp, env.c_r).map_err(err)?;
        xqp_ok &= rel(x, frozen) < XQP_REL && rel(x, (gamma / (env.n_cp * env.c_r)).sqrt()) < XQP_REL;
    }
    for p in pts.iter().filter(|p| p.nbar == 50.0) {
        let gamma = p.t_g.seconds().map(|t| 1.0 / t).unwrap_or(0.0);
        xqp_ok &= rel(p.xqp_g, (gamma / (env.n_cp * env.c_r)).sqrt()) < XQP_REL;
    }
    let ok = ordered && !dips.is_empty() && xqp_ok;
    Ok((
        ok,
        format!(
            "T_g(nbar=50) at 20/25/34/46 GHz = [{}] ({}); local minima in [80, 120] at 25 GHz: {dips:?}; x_qp closed form {}",
            sci(&tg),
            if ordered { "ordered" } else { "not ordered" },
            if xqp_ok { "ok" } else { "mismatch" }
        ),
    ))
}

fn junction_symmetry(pts: &[KapitzaPoint]) -> Check {
    let p = &pts[COEXISTENCE_TURNS.len()];
    let scale = p.table.rows.iter().fold(0.0f64, |m, r| m.max(r.gamma));
    let mut worst = 0.0f64;
    let mut pairs = std::collections::BTreeSet::new();
    for r in &p.table.rows {
        pairs.insert((r.alpha, r.beta));
    }
    for &(a, b) in &pairs {
        let g1 = p.table.gamma_ab_junction(a, b, 1);
        let g2 = p.table.gamma_ab_junction(a, b, 2);
        if g1.max(g2) > 1e-12 * scale {
            worst = worst.max(rel(g1, g2));
        }
    }
    for s in p.states.iter().filter(|s| s.present()) {
        worst = worst.max(rel(s.gamma_junction[0], s.gamma_junction[1]));
    }
    Ok((worst < JUNCTION_REL && !pairs.is_empty(), format!("{} (alpha, beta) pairs, max rel diff {worst:.2e}", pairs.len())))
}

fn convergence(profile: Profile) -> Check {
    let t2 = AuditScenario::Transmon {
        params: TransmonParams::new(FIG2.0, FIG2.1, 0.0).map_err(err)?,
        omega_d: 50.0,
        phi_d: 5.0 / 50.0,
        ladder: 4,
    };
    let r2 = convergence_audit(&t2, &[m_chain(Numerics::transmon(profile), &[15, 20])], DRIFT_MAX).map_err(err)?;
    let t4 = AuditScenario::Kapitza { params: fig4_params()?, omega_d: FIG4_OMEGA, phi_ac: 2.0 * PI * bessel_zero_turns() };
    let r4 = convergence_audit(&t4, &[m_chain(Numerics::squid(profile), &[35, 40])], DRIFT_MAX).map_err(err)?;
    let ok = r2.pass && r4.pass;
    Ok((
        ok,
        format!(
            "transmon M 15->20 drift {:.2e}/{:.2e}; SQUID M 35->40 drift {:.2e}/{:.2e} (rate/energy)",
            r2.gamma_drift, r2.energy_drift, r4.gamma_drift, r4.energy_drift
        ),
    ))
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(err)?;
    let cfg = dir.path().join("map.json");
    std::fs::write(
        &cfg,
        r#"{"scenario":{"transmon_map":{"circuit":{"ej":3.025,"ec":0.056},
            "omega_d_ghz":[31.0,46.0,95.0],"amplitude_ghz":[0.5,1.5,3.0]}},"output":{"stem":"map"}}"#,
    )
    .map_err(err)?;
    let run = |out: &Path| -> Result<Vec<u8>, String> {
        let o = Command::new(env!("CARGO_BIN_EXE_qpgen"))
            .args(["sweep", "--threads", "2", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .output()
            .map_err(err)?;
        if !o.status.success() {
            return Err(String::from_utf8_lossy(&o.stderr).into_owned());
        }
        std::fs::read(out.join("map.csv")).map_err(err)
    };
    let a = run(&dir.path().join("a"))?;
    let b = run(&dir.path().join("b"))?;
    Ok((a == b && !a.is_empty(), format!("two runs, {} bytes, identical: {}", a.len(), a == b)))
}

fn main() {
    let profile = match std::env::var("QPGEN_PROFILE").as_deref() {
        Ok("full") => Profile::Full,
        _ => Profile::Ci,
    };
    println!("acceptance run, profile {profile:?}");
    let mut failed = 0;
    let mut report = |id: u32, name: &str, t: Instant, c: Check| {
        let (ok, detail) = c.unwrap_or_else(|e| (false, format!("error: {e}")));
        if !ok {
            failed += 1;
        }
        let secs = t.elapsed().as_secs_f64();
        println!("{} [{id:>2}] {name} ({secs:.1} s): {detail}", if ok { "PASS" } else { "FAIL" });
    };

    let t = Instant::now();
    report(1, "structure factors", t, structure_factors());
    let t = Instant::now();
    report(2, "undriven Floquet replicas", t, undriven_replicas(profile));
    let t = Instant::now();
    report(3, "initial photon index invariance", t, replica_invariance(profile));
    let t = Instant::now();
    report(4, "step structure on the 3 MHz cut", t, step_structure(profile));
    let t = Instant::now();
    report(5, "Bessel-zero drive point", t, bessel_zero());
    let t = Instant::now();
    let kap = kapitza_points(profile);
    let shared = t.elapsed();
    let t = Instant::now();
    report(6, "0-pi lifetimes", t, kap.clone().and_then(|p| zero_pi_lifetimes(profile, &p)));
    let t = Instant::now();
    report(7, "readout ordering and dip", t, readout(profile));
    let t = Instant::now();
    report(8, "junction symmetry", t, kap.and_then(|p| junction_symmetry(&p)));
    let t = Instant::now();
    report(9, "convergence audits", t, convergence(profile));
    let t = Instant::now();
    report(10, "determinism", t, determinism());
    println!("SQUID points shared by 6 and 8: {:.1} s", shared.as_secs_f64());

    println!("{failed} of 10 criteria failed");
    if failed > 0 && std::env::var("QPGEN_ACCEPT_STRICT").as_deref() == Ok("1") {
        std::process::exit(1);
    }
}
