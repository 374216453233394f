use rayon::prelude::*;

use crate::circuits::{
    build_charge_operators, to_eigenbasis, transmon_drive_fourier, transmon_hamiltonian, transmon_transition_series,
    ChargeBasis, ChargeBasisOperators, EigenbasisOperators, Sector, TransmonParams,
};
use crate::error::{Error, Result};
use crate::floquet::{
    diagonalize, stark_shift, track_to, FloquetProblem, FloquetSpectrum, LabelOptions, PointLabels, Tracker,
};
use crate::rates::{pair_breaking_rates, DressedStates, QpEnvironment, RateOptions, RateTable, TransitionOperators};

use super::{check_axis, Numerics};

/// Transmon in the charge-displaced frame, truncated to its static eigenbasis.
#[derive(Debug, Clone)]
pub struct TransmonModel {
    pub params: TransmonParams<f64>,
    pub numerics: Numerics,
    pub env: QpEnvironment<f64>,
    pub even: ChargeBasisOperators<f64>,
    pub odd: ChargeBasisOperators<f64>,
    pub eig: EigenbasisOperators<f64>,
    /// Initial (Even-sector) states.
    pub initial: Vec<usize>,
    /// Final (Odd-sector) states.
    pub finals: Vec<usize>,
    pub label_opts: LabelOptions<f64>,
    pub rate_opts: RateOptions,
}

impl TransmonModel {
    pub fn new(params: TransmonParams<f64>, numerics: Numerics) -> Result<Self> {
        numerics.validate()?;
        let be = ChargeBasis::new(Sector::Even, numerics.n_c)?;
        let even = build_charge_operators::<f64>(be);
        let odd = build_charge_operators::<f64>(be.partner());
        let he = transmon_hamiltonian(&params, be);
        let ho = transmon_hamiltonian(&params, be.partner());
        let eig = to_eigenbasis(he.view(), &even, ho.view(), numerics.d)?;
        Ok(TransmonModel {
            params,
            numerics,
            env: QpEnvironment::default(),
            even,
            odd,
            eig,
            initial: vec![0, 1],
            finals: (0..numerics.d).collect(),
            label_opts: LabelOptions::default(),
            rate_opts: RateOptions { m0: None, guard: numerics.guard },
        })
    }

    pub fn with_finals(mut self, finals: Vec<usize>) -> Result<Self> {
        if let Some(&b) = finals.iter().find(|&&b| b >= self.numerics.d) {
            return Err(Error::Argument(format!("final state {b} outside truncation d = {}", self.numerics.d)));
        }
        self.finals = finals;
        Ok(self)
    }

    fn kmax(&self) -> usize {
        self.numerics.k_max.min(2 * self.numerics.m_max)
    }

    /// Undriven qubit frequency `E_e - E_g` in GHz.
    pub fn qubit_frequency(&self) -> f64 {
        self.eig.energies_even[1] - self.eig.energies_even[0]
    }

    fn problem(&self, sector: Sector, phi_d: f64, omega_d: f64) -> Result<FloquetProblem<f64>> {
        let k = self.kmax();
        let s = match sector {
            Sector::Even => self.eig.rotate_even(&transmon_drive_fourier(&self.params, &self.even, phi_d, k)),
            Sector::Odd => self.eig.rotate_odd(&transmon_drive_fourier(&self.params, &self.odd, phi_d, k)),
        };
        Ok(FloquetProblem::new(s, omega_d, self.numerics.m_max)?.with_max_dim(self.numerics.max_dim))
    }

    pub fn problem_even(&self, phi_d: f64, omega_d: f64) -> Result<FloquetProblem<f64>> {
        self.problem(Sector::Even, phi_d, omega_d)
    }

    pub fn problem_odd(&self, phi_d: f64, omega_d: f64) -> Result<FloquetProblem<f64>> {
        self.problem(Sector::Odd, phi_d, omega_d)
    }

    pub fn transition_ops(&self, phi_d: f64) -> Vec<TransitionOperators<f64>> {
        let (c, s) = transmon_transition_series(&self.even, phi_d, self.kmax());
        vec![TransitionOperators {
            junction: 1,
            ej: self.params.ej,
            cos: self.eig.rotate_cross(&c),
            sin: self.eig.rotate_cross(&s),
        }]
    }

    /// Starts a labeled amplitude ladder at zero drive.
    pub fn start(&self, omega_d: f64) -> Result<AmplitudeTrack<'_>> {
        AmplitudeTrack::start(self, omega_d)
    }
}

/// Trackers for both parity sectors following the drive amplitude at fixed frequency.
#[derive(Debug, Clone)]
pub struct AmplitudeTrack<'a> {
    pub model: &'a TransmonModel,
    pub omega_d: f64,
    pub phi_d: f64,
    pub even: Tracker<f64>,
    pub odd: Tracker<f64>,
    /// Last even-sector labels.
    pub labels: PointLabels<f64>,
}

/// Labels and rates at one drive point.
#[derive(Debug, Clone)]
pub struct DrivePoint {
    pub omega_d: f64,
    /// Phase amplitude in the charge-displaced frame.
    pub phi_d: f64,
    /// `E~_e - E~_g - (E_e - E_g)` in GHz.
    pub stark: f64,
    pub table: RateTable<f64>,
}

impl DrivePoint {
    pub fn gamma(&self, alpha: usize) -> f64 {
        self.table.gamma_a(alpha)
    }
}

impl<'a> AmplitudeTrack<'a> {
    fn start(model: &'a TransmonModel, omega_d: f64) -> Result<Self> {
        let pe = model.problem_even(0.0, omega_d)?;
        let po = model.problem_odd(0.0, omega_d)?;
        let mut even = Tracker::new(&pe, &model.initial, model.label_opts)?;
        let odd = Tracker::new(&po, &model.finals, model.label_opts)?;
        let labels = even.step(&diagonalize(&pe)?);
        Ok(AmplitudeTrack { model, omega_d, phi_d: 0.0, even, odd, labels })
    }

    /// Tracks only the even sector to `phi_d`; returns `|stark|`-ready labels.
    pub fn advance_even(&mut self, phi_d: f64) -> Result<(FloquetSpectrum<f64>, f64)> {
        let m = self.model;
        let w = self.omega_d;
        let build = |p: f64| m.problem_even(p, w);
        let (spec, labels, _) = track_to(&mut self.even, self.phi_d, phi_d, &build, false)?;
        self.labels = labels;
        self.phi_d = phi_d;
        let st = stark_shift(&self.labels, &self.even, 0, 1)?;
        Ok((spec, st))
    }

    /// Tracks the odd sector from `from` to `to` and evaluates rates with the given
    /// even-sector spectrum at `to`.
    pub fn finish(&mut self, even_spec: &FloquetSpectrum<f64>, from: f64) -> Result<DrivePoint> {
        let m = self.model;
        let w = self.omega_d;
        let build = |p: f64| m.problem_odd(p, w);
        let (ospec, olabels, _) = track_to(&mut self.odd, from, self.phi_d, &build, false)?;
        let init = DressedStates { spectrum: even_spec, labels: &self.labels, tracker: &self.even };
        let fin = DressedStates { spectrum: &ospec, labels: &olabels, tracker: &self.odd };
        let ops = m.transition_ops(self.phi_d);
        let table = pair_breaking_rates(&init, &fin, &ops, &m.env, &m.initial, &m.finals, &m.rate_opts, None)?;
        Ok(DrivePoint {
            omega_d: self.omega_d,
            phi_d: self.phi_d,
            stark: stark_shift(&self.labels, &self.even, 0, 1)?,
            table,
        })
    }

    /// Tracks both sectors to `phi_d` and evaluates rates.
    pub fn advance(&mut self, phi_d: f64) -> Result<DrivePoint> {
        let from = self.phi_d;
        let (spec, _) = self.advance_even(phi_d)?;
        self.finish(&spec, from)
    }
}

/// One cell of the frequency/amplitude map.
#[derive(Debug, Clone)]
pub struct GridPoint {
    pub grid_index: usize,
    pub omega_d: f64,
    /// Charge-drive amplitude `Omega / 2 pi` in GHz.
    pub amplitude: f64,
    pub point: DrivePoint,
}

/// Rates on a grid of drive frequencies (GHz) and lab-frame amplitudes `Omega` (GHz),
/// with `phi_d = Omega / omega_d`. Columns run in parallel; grid index is
/// `i_omega * len(amplitudes) + i_amp`.
pub fn charge_drive_map(model: &TransmonModel, omegas: &[f64], amplitudes: &[f64]) -> Result<Vec<GridPoint>> {
    check_axis("omega_d", omegas)?;
    check_axis("amplitude", amplitudes)?;
    if omegas[0] <= 0.0 || amplitudes[0] < 0.0 {
        return Err(Error::Argument("drive frequencies must be positive and amplitudes nonnegative".into()));
    }
    let na = amplitudes.len();
    let cols: Vec<Result<Vec<GridPoint>>> = omegas
        .par_iter()
        .enumerate()
        .map(|(i, &w)| {
            let mut tr = model.start(w)?;
            amplitudes
                .iter()
                .enumerate()
                .map(|(j, &a)| {
                    let point = tr.advance(a / w)?;
                    Ok(GridPoint { grid_index: i * na + j, omega_d: w, amplitude: a, point })
                })
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(omegas.len() * na);
    for c in cols {
        out.extend(c?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarkOptions {
    /// Accepted `| |delta_ac| - target |` in GHz.
    pub tol: f64,
    pub max_iter: usize,
    /// Small amplitude used to estimate the quadratic Stark coefficient.
    pub probe_phi: f64,
    /// Ladder points per estimated amplitude while bracketing.
    pub ladder: usize,
    /// Give up bracketing beyond this multiple of the estimate.
    pub max_factor: f64,
}

impl Default for StarkOptions {
    fn default() -> Self {
        StarkOptions { tol: 1e-6, max_iter: 80, probe_phi: 1e-3, ladder: 4, max_factor: 8.0 }
    }
}

/// One frequency of a constant-Stark cut. `point` is `None` when no bracket was found or
/// a non-monotone `|delta_ac|` (resonance) was met; `diagnostic` says which.
#[derive(Debug, Clone)]
pub struct StarkCutPoint {
    pub grid_index: usize,
    pub omega_d: f64,
    pub point: Option<DrivePoint>,
    pub diagnostic: Option<String>,
}

/// Solves `|delta_ac|(phi_d) = target` by bracketing and bisection at each frequency, then
/// evaluates rates there. Frequencies run in parallel.
pub fn constant_stark_cut(
    model: &TransmonModel,
    target: f64,
    omegas: &[f64],
    opts: &StarkOptions,
) -> Result<Vec<StarkCutPoint>> {
    if !(target > 0.0) {
        return Err(Error::Argument("Stark target must be positive".into()));
    }
    if omegas.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::Argument("drive frequencies must be finite and positive".into()));
    }
    omegas
        .par_iter()
        .enumerate()
        .map(|(i, &w)| {
            let (point, diagnostic) = match stark_point(model, target, w, opts)? {
                Ok(p) => (Some(p), None),
                Err(msg) => (None, Some(msg)),
            };
            Ok(StarkCutPoint { grid_index: i, omega_d: w, point, diagnostic })
        })
        .collect()
}

fn stark_point(
    model: &TransmonModel,
    target: f64,
    omega_d: f64,
    opts: &StarkOptions,
) -> Result<std::result::Result<DrivePoint, String>> {
    let mut tr = model.start(omega_d)?;
    let (_, s0) = tr.advance_even(opts.probe_phi)?;
    let c = s0.abs() / (opts.probe_phi * opts.probe_phi);
    if !(c > 0.0) {
        return Ok(Err(format!("no Stark shift at probe amplitude (omega_d = {omega_d})")));
    }
    let est = (target / c).sqrt();
    let step = est / opts.ladder as f64;
    let mut lo = (tr.clone(), s0.abs());
    let mut ladder = vec![opts.probe_phi];
    let mut k = 1;
    let hi = loop {
        let phi = step * k as f64;
        k += 1;
        if phi <= lo.0.phi_d {
            continue;
        }
        if phi > est * opts.max_factor {
            return Ok(Err(format!("no bracket for |delta_ac| = {target} GHz below phi_d = {phi:.4e}")));
        }
        let mut t = lo.0.clone();
        let (_, s) = t.advance_even(phi)?;
        if s.abs() < lo.1 {
            return Ok(Err(format!("|delta_ac| not monotone near phi_d = {phi:.4e} (resonance)")));
        }
        if s.abs() >= target {
            break (phi, s.abs());
        }
        ladder.push(phi);
        lo = (t, s.abs());
    };
    let mut hi = hi;
    let mut found = None;
    for _ in 0..opts.max_iter {
        let mid = 0.5 * (lo.0.phi_d + hi.0);
        let mut t = lo.0.clone();
        let (spec, s) = t.advance_even(mid)?;
        let a = s.abs();
        if a < lo.1 || a > hi.1 {
            return Ok(Err(format!("|delta_ac| not monotone inside bracket near phi_d = {mid:.6e}")));
        }
        if (a - target).abs() <= opts.tol {
            found = Some((t, spec));
            break;
        }
        if a < target {
            lo = (t, a);
        } else {
            hi = (mid, a);
        }
    }
    let Some((mut t, spec)) = found else {
        return Ok(Err(format!("bisection did not reach tolerance at omega_d = {omega_d}")));
    };
    // Walk the odd sector up the same ladder before the final point.
    let mo = t.model;
    let build = |p: f64| mo.problem_odd(p, omega_d);
    let mut prev = 0.0;
    for &p in ladder.iter().filter(|&&p| p < t.phi_d) {
        track_to(&mut t.odd, prev, p, &build, false)?;
        prev = p;
    }
    Ok(Ok(t.finish(&spec, prev)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::Profile;

    fn small() -> TransmonModel {
        let p = TransmonParams::new(3.025, 0.056, 0.0).unwrap();
        let n = Numerics { n_c: 10, d: 8, m_max: 8, k_max: 8, guard: 3, max_dim: 2000 };
        TransmonModel::new(p, n).unwrap()
    }

    #[test]
    fn zero_drive_has_no_pair_breaking() {
        let m = small();
        let g = charge_drive_map(&m, &[50.0, 95.0], &[0.0]).unwrap();
        assert_eq!(g.len(), 2);
        for p in g {
            assert_eq!(p.point.gamma(0), 0.0);
            assert!(p.point.stark.abs() < 1e-12);
        }
    }

    #[test]
    fn single_photon_channel_opens_above_threshold() {
        let m = small();
        let g = charge_drive_map(&m, &[95.0], &[0.0, 2.0]).unwrap();
        assert!(g[1].point.gamma(0) > 0.0);
        assert!(g[1].point.table.gamma_abn(0, 0, 1) > 0.0);
    }

    #[test]
    fn stark_target_is_met() {
        let p = TransmonParams::new(3.025, 0.056, 0.0).unwrap();
        let m = TransmonModel::new(p, Numerics::transmon(Profile::Ci)).unwrap();
        let cut = constant_stark_cut(&m, 3e-3, &[50.0], &StarkOptions::default()).unwrap();
        let pt = cut[0].point.as_ref().expect("bracketed");
        assert!((pt.stark.abs() - 3e-3).abs() <= 1e-6);
    }
}
