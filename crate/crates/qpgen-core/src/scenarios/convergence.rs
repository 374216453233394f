use std::collections::BTreeMap;

use crate::circuits::{SquidParams, TransmonParams};
use crate::error::{Error, Result};

use super::kapitza::{kapitza_point, KapitzaSetup};
use super::transmon::TransmonModel;
use super::Numerics;

/// Default pass threshold on relative drift.
pub const DRIFT_THRESHOLD: f64 = 1e-4;

/// A single scenario point re-run at several truncations.
#[derive(Debug, Clone)]
pub enum AuditScenario {
    /// Charge-driven transmon at `phi_d` (zero gives the static point).
    Transmon { params: TransmonParams<f64>, omega_d: f64, phi_d: f64, ladder: usize },
    /// Flux-driven SQUID at `phi_ac`.
    Kapitza { params: SquidParams<f64>, omega_d: f64, phi_ac: f64 },
}

#[derive(Debug, Clone)]
pub struct AuditPoint {
    pub numerics: Numerics,
    /// Rates keyed by `(alpha, beta)`; `beta = usize::MAX` holds per-state totals.
    pub gammas: BTreeMap<(usize, usize), f64>,
    /// Dressed energies of the initial states, folded to the `m = 0` replica.
    pub energies: Vec<f64>,
    pub truncation: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct AuditReport {
    pub points: Vec<AuditPoint>,
    /// Largest relative rate drift between the last two levels of each chain.
    pub gamma_drift: f64,
    pub energy_drift: f64,
    pub threshold: f64,
    pub pass: bool,
    pub warnings: Vec<String>,
}

const TOTAL: usize = usize::MAX;

fn run_level(s: &AuditScenario, n: Numerics) -> Result<AuditPoint> {
    let mut gammas = BTreeMap::new();
    let mut energies = Vec::new();
    let mut truncation = false;
    match s {
        AuditScenario::Transmon { params, omega_d, phi_d, ladder } => {
            let model = TransmonModel::new(*params, n)?;
            let mut tr = model.start(*omega_d)?;
            let steps = (*ladder).max(1);
            let mut point = None;
            for k in 1..=steps {
                point = Some(tr.advance(phi_d * k as f64 / steps as f64)?);
            }
            let p = point.expect("at least one step");
            for r in &p.table.rows {
                *gammas.entry((r.alpha, r.beta)).or_insert(0.0) += r.gamma;
                *gammas.entry((r.alpha, TOTAL)).or_insert(0.0) += r.gamma;
                truncation |= r.flags.truncation;
            }
            for &a in &model.initial {
                gammas.entry((a, TOTAL)).or_insert(0.0);
                energies.push(tr.labels.energies[tr.even.slot(a).expect("tracked")]);
            }
        }
        AuditScenario::Kapitza { params, omega_d, phi_ac } => {
            let setup = KapitzaSetup::new(*params, n, *omega_d)?;
            let p = kapitza_point(&setup, *phi_ac, 0)?;
            for (k, st) in p.states.iter().enumerate() {
                if st.present() {
                    gammas.insert((k, TOTAL), st.gamma);
                }
            }
            energies.extend(p.states.iter().filter(|s| s.present()).map(|s| s.energy));
        }
    }
    Ok(AuditPoint { numerics: n, gammas, energies, truncation, error: None })
}

fn drift(a: &AuditPoint, b: &AuditPoint, omega_d: f64) -> (f64, f64) {
    let scale = a.gammas.values().chain(b.gammas.values()).fold(0.0f64, |m, &x| m.max(x));
    let floor = 1e-12 * scale;
    let mut g = 0.0f64;
    for (k, &x) in &b.gammas {
        let y = a.gammas.get(k).copied().unwrap_or(0.0);
        let m = x.abs().max(y.abs());
        if m > floor {
            g = g.max((x - y).abs() / m);
        }
    }
    for k in a.gammas.keys().filter(|k| !b.gammas.contains_key(k)) {
        if a.gammas[k] > floor {
            g = g.max(1.0);
        }
    }
    let mut e = 0.0f64;
    if a.energies.len() != b.energies.len() {
        e = f64::INFINITY;
    } else {
        for (x, y) in a.energies.iter().zip(&b.energies) {
            e = e.max((x - y).abs() / x.abs().max(y.abs()).max(omega_d));
        }
    }
    (g, e)
}

/// Re-runs `scenario` along each chain of truncation levels and reports the drift between
/// the last two levels of every chain. Failed levels (for example a photon window that
/// does not fit) are recorded and make the audit fail.
pub fn convergence_audit(scenario: &AuditScenario, chains: &[Vec<Numerics>], threshold: f64) -> Result<AuditReport> {
    if chains.iter().all(|c| c.is_empty()) {
        return Err(Error::Argument("no truncation levels given".into()));
    }
    let omega_d = match scenario {
        AuditScenario::Transmon { omega_d, .. } | AuditScenario::Kapitza { omega_d, .. } => *omega_d,
    };
    let mut points = Vec::new();
    let mut warnings = Vec::new();
    let (mut gd, mut ed) = (0.0f64, 0.0f64);
    let mut ok = true;
    for chain in chains {
        let mut last: Vec<AuditPoint> = Vec::new();
        for &n in chain {
            let p = match run_level(scenario, n) {
                Ok(p) => p,
                Err(e) if e.is_validation() || matches!(e, Error::Resource(_)) => {
                    ok = false;
                    warnings.push(format!("truncation M_max = {} N_c = {}: {e}", n.m_max, n.n_c));
                    AuditPoint { numerics: n, gammas: BTreeMap::new(), energies: vec![], truncation: true, error: Some(e.to_string()) }
                }
                Err(e) => return Err(e),
            };
            if p.truncation {
                warnings.push(format!("truncation warning at M_max = {}", n.m_max));
            }
            last.push(p.clone());
            points.push(p);
        }
        if last.len() >= 2 {
            let (a, b) = (&last[last.len() - 2], &last[last.len() - 1]);
            if a.error.is_none() && b.error.is_none() {
                let (g, e) = drift(a, b, omega_d);
                gd = gd.max(g);
                ed = ed.max(e);
            }
        }
    }
    let pass = ok && gd < threshold && ed < threshold && !points.last().map(|p| p.truncation).unwrap_or(false);
    Ok(AuditReport { points, gamma_drift: gd, energy_drift: ed, threshold, pass, warnings })
}

/// Chain varying only `M_max` from a base truncation.
pub fn m_chain(base: Numerics, m_list: &[usize]) -> Vec<Numerics> {
    m_list.iter().map(|&m| Numerics { m_max: m, max_dim: base.max_dim.max(base.d * (2 * m + 1)), ..base }).collect()
}

/// Chain varying only the charge cutoff.
pub fn nc_chain(base: Numerics, nc_list: &[usize]) -> Vec<Numerics> {
    nc_list.iter().map(|&c| Numerics { n_c: c, ..base }).collect()
}

/// Chain varying only the harmonic cutoff.
pub fn k_chain(base: Numerics, k_list: &[usize]) -> Vec<Numerics> {
    k_list.iter().map(|&k| Numerics { k_max: k, ..base }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> Numerics {
        Numerics { n_c: 10, d: 8, m_max: 8, k_max: 8, guard: 3, max_dim: 4000 }
    }

    #[test]
    fn static_point_has_zero_drift() {
        let s = AuditScenario::Transmon {
            params: TransmonParams::new(3.025, 0.056, 0.0).unwrap(),
            omega_d: 50.0,
            phi_d: 0.0,
            ladder: 1,
        };
        let r = convergence_audit(&s, &[m_chain(base(), &[6, 8])], DRIFT_THRESHOLD).unwrap();
        assert_eq!(r.gamma_drift, 0.0);
        assert_eq!(r.energy_drift, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn starved_window_fails() {
        let s = AuditScenario::Transmon {
            params: TransmonParams::new(3.025, 0.056, 0.0).unwrap(),
            omega_d: 32.0,
            phi_d: 0.1,
            ladder: 2,
        };
        let r = convergence_audit(&s, &[m_chain(base(), &[2, 3])], DRIFT_THRESHOLD).unwrap();
        assert!(!r.pass);
        assert!(!r.warnings.is_empty());
    }
}
