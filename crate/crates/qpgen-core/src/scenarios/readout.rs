use rayon::prelude::*;

use crate::circuits::{transmon_hamiltonian, ChargeBasis, Sector, TransmonParams};
use crate::error::{Error, Result};
use crate::rates::{steady_state_xqp, Lifetime};
use crate::specfn::hermitian_eig;

use super::transmon::{DrivePoint, TransmonModel};
use super::{check_axis, Numerics};

/// Minimum distance (GHz) between the resonator and a qubit transition.
pub const POLE_GUARD: f64 = 1e-3;

/// Resonantly driven readout resonator, traced out into a charge drive.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutSpec {
    /// Resonator (and drive) frequency in GHz.
    pub omega_r: f64,
    /// Target `|chi|` in GHz.
    pub chi_target: f64,
    /// Mean photon numbers, ascending from zero or above.
    pub nbar: Vec<f64>,
}

/// `chi = -8 E_C g^2 w_r^2 / ((w_r^2 - E_ge^2)(w_r^2 - E_ef^2))`, all in GHz.
pub fn dispersive_shift(ec: f64, g: f64, omega_r: f64, e_ge: f64, e_ef: f64) -> f64 {
    let w2 = omega_r * omega_r;
    -8.0 * ec * g * g * w2 / ((w2 - e_ge * e_ge) * (w2 - e_ef * e_ef))
}

/// Coupling giving `|chi| = chi_target` for given bare transitions.
pub fn coupling_for_shift(ec: f64, omega_r: f64, chi_target: f64, e_ge: f64, e_ef: f64) -> Result<f64> {
    if !(chi_target >= 0.0) {
        return Err(Error::Argument("chi target must be nonnegative".into()));
    }
    if (omega_r - e_ge).abs() < POLE_GUARD || (omega_r - e_ef).abs() < POLE_GUARD {
        return Err(Error::Domain(format!(
            "resonator at {omega_r} GHz is within {POLE_GUARD} GHz of a qubit transition ({e_ge}, {e_ef})"
        )));
    }
    let w2 = omega_r * omega_r;
    let den = ((w2 - e_ge * e_ge) * (w2 - e_ef * e_ef)).abs();
    Ok((chi_target * den / (8.0 * ec * w2)).sqrt())
}

/// Solves for `g` using the static transmon spectrum in a charge basis of cutoff `n_c`.
pub fn solve_readout_coupling(params: &TransmonParams<f64>, n_c: usize, omega_r: f64, chi_target: f64) -> Result<f64> {
    let h = transmon_hamiltonian(params, ChargeBasis::new(Sector::Even, n_c)?);
    let e = hermitian_eig(h.view())?;
    if e.values.len() < 3 {
        return Err(Error::Argument("charge basis too small for three levels".into()));
    }
    coupling_for_shift(params.ec, omega_r, chi_target, e.values[1] - e.values[0], e.values[2] - e.values[1])
}

#[derive(Debug, Clone)]
pub struct ReadoutPoint {
    pub grid_index: usize,
    pub omega_r: f64,
    pub ng: f64,
    pub g: f64,
    pub nbar: f64,
    pub phi_d: f64,
    pub t_g: Lifetime<f64>,
    pub t_e: Lifetime<f64>,
    pub xqp_g: f64,
    pub xqp_e: f64,
    pub point: DrivePoint,
}

/// Summary quantities at one photon number.
pub fn readout_point(model: &TransmonModel, g: f64, nbar: f64, point: DrivePoint, grid_index: usize) -> Result<ReadoutPoint> {
    let gg = point.gamma(0);
    let ge = point.gamma(1);
    let env = &model.env;
    Ok(ReadoutPoint {
        grid_index,
        omega_r: point.omega_d,
        ng: model.params.ng,
        g,
        nbar,
        phi_d: point.phi_d,
        t_g: Lifetime::from_rate(gg),
        t_e: Lifetime::from_rate(ge),
        xqp_g: steady_state_xqp(gg, env.n_cp, env.c_r)?,
        xqp_e: steady_state_xqp(ge, env.n_cp, env.c_r)?,
        point,
    })
}

/// Lifetimes along `nbar` at `omega_d = omega_r`, `phi_d = 2 g sqrt(nbar) / omega_r`.
pub fn readout_sweep(model: &TransmonModel, spec: &ReadoutSpec) -> Result<Vec<ReadoutPoint>> {
    check_axis("nbar", &spec.nbar)?;
    if spec.nbar[0] < 0.0 {
        return Err(Error::Argument("photon numbers must be nonnegative".into()));
    }
    let e = &model.eig.energies_even;
    let g = coupling_for_shift(model.params.ec, spec.omega_r, spec.chi_target, e[1] - e[0], e[2] - e[1])?;
    let mut tr = model.start(spec.omega_r)?;
    spec.nbar
        .iter()
        .enumerate()
        .map(|(k, &nb)| {
            let p = tr.advance(2.0 * g * nb.sqrt() / spec.omega_r)?;
            readout_point(model, g, nb, p, k)
        })
        .collect()
}

/// Readout sweeps over every `(omega_r, n_g)` pair, in parallel. Grid index is
/// `(i_omega * len(ngs) + i_ng) * len(nbar) + k`.
pub fn readout_map(
    base: TransmonParams<f64>,
    numerics: Numerics,
    omega_rs: &[f64],
    ngs: &[f64],
    chi_target: f64,
    nbar: &[f64],
) -> Result<Vec<ReadoutPoint>> {
    readout_map_with(base, numerics, omega_rs, ngs, chi_target, nbar, &|_| {})
}

/// As [`readout_map`], with `setup` applied to every model before its sweep (bath,
/// labeling options).
pub fn readout_map_with(
    base: TransmonParams<f64>,
    numerics: Numerics,
    omega_rs: &[f64],
    ngs: &[f64],
    chi_target: f64,
    nbar: &[f64],
    setup: &(dyn Fn(&mut TransmonModel) + Sync),
) -> Result<Vec<ReadoutPoint>> {
    let combos: Vec<(usize, f64, f64)> = omega_rs
        .iter()
        .flat_map(|&w| ngs.iter().map(move |&n| (w, n)))
        .enumerate()
        .map(|(i, (w, n))| (i, w, n))
        .collect();
    let per = nbar.len();
    let parts: Vec<Result<Vec<ReadoutPoint>>> = combos
        .par_iter()
        .map(|&(i, w, ng)| {
            let params = TransmonParams::new(base.ej, base.ec, ng)?;
            let mut model = TransmonModel::new(params, numerics)?;
            setup(&mut model);
            let spec = ReadoutSpec { omega_r: w, chi_target, nbar: nbar.to_vec() };
            let mut pts = readout_sweep(&model, &spec)?;
            for p in pts.iter_mut() {
                p.grid_index += i * per;
            }
            Ok(pts)
        })
        .collect();
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}
