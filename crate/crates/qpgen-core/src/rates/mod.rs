//! Floquet golden-rule pair-breaking and quasiparticle-tunneling rates.
//!
//! For initial dressed state `(alpha, m0)` and final `(beta, m0 - n)` in the opposite
//! parity sector, junction `j` contributes
//! `Gamma = (16 E_Jj / h) [ |<f|C|i>|^2 S+(omega) + |<f|S|i>|^2 S-(omega) ]`
//! with `C`, `S` the dressed half-angle operators and
//! `h omega = n h omega_d + E~_{alpha,0} - E~_{beta,0}`.

use std::collections::BTreeMap;
use std::fmt;

use ndarray::Array1;
use num_complex::Complex;

use crate::circuits::JunctionSeries;
use crate::error::{Error, Result};
use crate::floquet::{apply_series, inner, FloquetSpectrum, FourierSeries, LabelFlags, PointLabels, Tracker};
use crate::num::{lit, Real};
use crate::specfn::{s_ph_analytic, Gap, StructureFactorKind};

/// Photon blocks kept clear of the truncation edge.
pub const DEFAULT_GUARD: usize = 5;

/// Quasiparticle bath and steady-state conversion constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QpEnvironment<T> {
    pub gap: Gap<T>,
    /// Cooper pairs in the island.
    pub n_cp: T,
    /// Recombination constant in 1/s.
    pub c_r: T,
}

impl<T: Real> Default for QpEnvironment<T> {
    fn default() -> Self {
        QpEnvironment { gap: Gap::aluminium(), n_cp: lit(2e6), c_r: lit(1.0 / 120e-9) }
    }
}

/// `Gamma_ph = 16 E_J / h` in 1/s for `E_J` in GHz.
pub fn gamma_ph<T: Real>(ej_ghz: T) -> T {
    lit::<T>(16e9) * ej_ghz
}

/// Half-angle transition operators of one junction.
#[derive(Debug, Clone)]
pub struct TransitionOperators<T: Real> {
    pub junction: usize,
    pub ej: T,
    pub cos: FourierSeries<T>,
    pub sin: FourierSeries<T>,
}

impl<T: Real> TransitionOperators<T> {
    pub fn from_junction(junction: usize, j: &JunctionSeries<T>) -> Self {
        TransitionOperators { junction, ej: j.ej, cos: j.cos.clone(), sin: j.sin.clone() }
    }
}

/// A Floquet spectrum together with the labels of `(alpha, 0)` states.
#[derive(Debug, Clone, Copy)]
pub struct DressedStates<'a, T: Real> {
    pub spectrum: &'a FloquetSpectrum<T>,
    pub labels: &'a PointLabels<T>,
    pub tracker: &'a Tracker<T>,
}

impl<'a, T: Real> DressedStates<'a, T> {
    fn lookup(&self, alpha: usize) -> Result<(usize, T, LabelFlags)> {
        let s = self
            .tracker
            .slot(alpha)
            .ok_or_else(|| Error::Label(format!("state {alpha} is not labeled")))?;
        Ok((self.labels.index[s], self.labels.energies[s], self.labels.flags[s]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateOptions {
    /// Initial photon index; `None` selects `ceil(M_max / 2)`.
    pub m0: Option<i64>,
    pub guard: usize,
}

impl Default for RateOptions {
    fn default() -> Self {
        RateOptions { m0: None, guard: DEFAULT_GUARD }
    }
}

impl RateOptions {
    pub fn initial_index(&self, m_max: usize) -> i64 {
        self.m0.unwrap_or(((m_max + 1) / 2) as i64)
    }

    /// Admissible `n` such that both `m0` and `m0 - n` lie in the interior window.
    pub fn n_range(&self, m_max: usize) -> Result<(i64, i64)> {
        let w = m_max as i64 - self.guard as i64;
        let m0 = self.initial_index(m_max);
        if w < 0 || m0.abs() > w {
            return Err(Error::Argument(format!(
                "initial photon index {m0} outside interior window |m| <= {w}"
            )));
        }
        Ok((m0 - w, m0 + w))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RateFlags {
    pub label: LabelFlags,
    /// Contributions near the largest admissible `n` are not negligible.
    pub truncation: bool,
}

impl fmt::Display for RateFlags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = self.label.to_string();
        match (l.is_empty(), self.truncation) {
            (true, false) => Ok(()),
            (true, true) => write!(f, "truncation"),
            (false, false) => write!(f, "{l}"),
            (false, true) => write!(f, "{l}|truncation"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateRow<T> {
    pub alpha: usize,
    pub beta: usize,
    pub n: i64,
    pub junction: usize,
    /// Transition frequency in GHz.
    pub omega: T,
    pub cos_elem2: T,
    pub sin_elem2: T,
    pub gamma: T,
    pub flags: RateFlags,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lifetime<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> Lifetime<T> {
    pub fn from_rate(gamma: T) -> Self {
        if gamma > T::zero() { Lifetime::Finite(T::one() / gamma) } else { Lifetime::Infinite }
    }

    pub fn seconds(&self) -> Option<T> {
        match self {
            Lifetime::Finite(t) => Some(*t),
            Lifetime::Infinite => None,
        }
    }

    /// Orders lifetimes with `Infinite` above every finite value.
    pub fn lt(&self, other: &Self) -> bool {
        match (self, other) {
            (Lifetime::Finite(a), Lifetime::Finite(b)) => a < b,
            (Lifetime::Finite(_), Lifetime::Infinite) => true,
            _ => false,
        }
    }
}

impl<T: Real> fmt::Display for Lifetime<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lifetime::Finite(t) => write!(f, "{t:.16e}"),
            Lifetime::Infinite => write!(f, "inf"),
        }
    }
}

/// Rows sorted by `(alpha, beta, n, junction)`; every sum runs in that order.
#[derive(Debug, Clone, Default)]
pub struct RateTable<T> {
    pub rows: Vec<RateRow<T>>,
}

impl<T: Real> RateTable<T> {
    fn sort(&mut self) {
        self.rows.sort_by_key(|r| (r.alpha, r.beta, r.n, r.junction));
    }

    pub fn extend(&mut self, other: RateTable<T>) {
        self.rows.extend(other.rows);
        self.sort();
    }

    pub fn alphas(&self) -> Vec<usize> {
        let mut a: Vec<usize> = self.rows.iter().map(|r| r.alpha).collect();
        a.dedup();
        a
    }

    pub fn gamma_ab(&self, alpha: usize, beta: usize) -> T {
        self.sum(|r| r.alpha == alpha && r.beta == beta)
    }

    pub fn gamma_ab_junction(&self, alpha: usize, beta: usize, junction: usize) -> T {
        self.sum(|r| r.alpha == alpha && r.beta == beta && r.junction == junction)
    }

    pub fn gamma_abn(&self, alpha: usize, beta: usize, n: i64) -> T {
        self.sum(|r| r.alpha == alpha && r.beta == beta && r.n == n)
    }

    pub fn gamma_a(&self, alpha: usize) -> T {
        self.sum(|r| r.alpha == alpha)
    }

    pub fn gamma_a_junction(&self, alpha: usize, junction: usize) -> T {
        self.sum(|r| r.alpha == alpha && r.junction == junction)
    }

    pub fn lifetime(&self, alpha: usize) -> Lifetime<T> {
        Lifetime::from_rate(self.gamma_a(alpha))
    }

    fn sum<F: Fn(&RateRow<T>) -> bool>(&self, keep: F) -> T {
        self.rows.iter().filter(|r| keep(r)).fold(T::zero(), |a, r| a + r.gamma)
    }

    /// Per-`beta` totals for one initial state, in ascending `beta`.
    pub fn by_final(&self, alpha: usize) -> BTreeMap<usize, T> {
        let mut m = BTreeMap::new();
        for r in self.rows.iter().filter(|r| r.alpha == alpha) {
            *m.entry(r.beta).or_insert(T::zero()) += r.gamma;
        }
        m
    }
}

/// `(Gamma_alpha, T_alpha)` per requested state.
pub fn parity_summary<T: Real>(table: &RateTable<T>, states: &[usize]) -> Vec<(usize, T, Lifetime<T>)> {
    states
        .iter()
        .map(|&a| {
            let g = table.by_final(a).values().fold(T::zero(), |x, &y| x + y);
            (a, g, Lifetime::from_rate(g))
        })
        .collect()
}

/// `x_qp* = sqrt(Gamma / (N_cp c_r))`.
pub fn steady_state_xqp<T: Real>(gamma: T, n_cp: T, c_r: T) -> Result<T> {
    if !(n_cp > T::zero()) || !(c_r > T::zero()) {
        return Err(Error::Argument("N_cp and c_r must be positive".into()));
    }
    if !(gamma >= T::zero()) {
        return Err(Error::Argument(format!("rate must be nonnegative, got {gamma}")));
    }
    Ok((gamma / (n_cp * c_r)).sqrt())
}

fn golden_rule<T: Real>(ej: T, c2: T, s2: T, omega: T, gap: Gap<T>) -> T {
    let sp = s_ph_analytic(StructureFactorKind::Plus, omega, gap);
    let sm = s_ph_analytic(StructureFactorKind::Minus, omega, gap);
    gamma_ph(ej) * (c2 * sp + s2 * sm)
}

struct Applied<T: Real> {
    junction: usize,
    ej: T,
    wc: Array1<Complex<T>>,
    ws: Array1<Complex<T>>,
}

fn apply_all<T: Real>(ops: &[TransitionOperators<T>], v: ndarray::ArrayView1<Complex<T>>) -> Vec<Applied<T>> {
    ops.iter()
        .map(|o| Applied { junction: o.junction, ej: o.ej, wc: apply_series(&o.cos, v), ws: apply_series(&o.sin, v) })
        .collect()
}

/// Pair-breaking rate for one `(alpha, beta, n)` and every junction.
pub fn pair_breaking_rate_n<T: Real>(
    init: &DressedStates<T>,
    fin: &DressedStates<T>,
    ops: &[TransitionOperators<T>],
    env: &QpEnvironment<T>,
    alpha: usize,
    beta: usize,
    n: i64,
    opts: &RateOptions,
) -> Result<T> {
    let t = pair_breaking_rates(init, fin, ops, env, &[alpha], &[beta], opts, Some((n, n)))?;
    Ok(t.gamma_abn(alpha, beta, n))
}

/// Pair-breaking rates for every `alpha`, `beta` and admissible photon number.
///
/// `n_window` restricts `n` (inclusive); by default every `n >= 1` inside the interior
/// window is used. Channels with `n <= 0` must stay below threshold, else an error is
/// returned.
pub fn pair_breaking_rates<T: Real>(
    init: &DressedStates<T>,
    fin: &DressedStates<T>,
    ops: &[TransitionOperators<T>],
    env: &QpEnvironment<T>,
    alphas: &[usize],
    betas: &[usize],
    opts: &RateOptions,
    n_window: Option<(i64, i64)>,
) -> Result<RateTable<T>> {
    let si = init.spectrum;
    let sf = fin.spectrum;
    let (n_lo, n_hi) = opts.n_range(si.m_max)?;
    let m0 = opts.initial_index(si.m_max);
    let (want_lo, want_hi) = n_window.unwrap_or((1, n_hi));
    if want_lo < n_lo || want_hi > n_hi {
        return Err(Error::Argument(format!(
            "photon window [{want_lo}, {want_hi}] leaves the interior range [{n_lo}, {n_hi}]"
        )));
    }
    let omega_d = si.omega_d;
    let threshold = env.gap.threshold();
    let mut table = RateTable::default();
    for &a in alphas {
        let (ja0, ea, fa) = init.lookup(a)?;
        let (ja, _) = si.replica(ja0, m0);
        let applied = apply_all(ops, si.vector(ja));
        for &b in betas {
            let (jb0, eb, fb) = fin.lookup(b)?;
            let mut lf = fa;
            lf.merge(fb);
            // Emission side must stay closed.
            for n in n_lo..=0 {
                let w = lit::<T>(n as f64) * omega_d + ea - eb;
                if w > threshold {
                    return Err(Error::Numeric(format!(
                        "emission channel n = {n} for {a} -> {b} is above threshold ({w} GHz)"
                    )));
                }
            }
            let mut rows = Vec::new();
            for n in want_lo.max(1)..=want_hi {
                let omega = lit::<T>(n as f64) * omega_d + ea - eb;
                if omega <= threshold {
                    continue;
                }
                let (jb, _) = sf.replica(jb0, m0 - n);
                let vf = sf.vector(jb);
                for ap in &applied {
                    let c2 = inner(vf, ap.wc.view()).norm_sqr();
                    let s2 = inner(vf, ap.ws.view()).norm_sqr();
                    let gamma = golden_rule(ap.ej, c2, s2, omega, env.gap);
                    rows.push(RateRow {
                        alpha: a,
                        beta: b,
                        n,
                        junction: ap.junction,
                        omega,
                        cos_elem2: c2,
                        sin_elem2: s2,
                        gamma,
                        flags: RateFlags { label: lf, truncation: false },
                    });
                }
            }
            let total = rows.iter().fold(T::zero(), |x, r| x + r.gamma);
            let edge = rows.iter().filter(|r| r.n >= n_hi - 2).fold(T::zero(), |x, r| x + r.gamma);
            let trunc = n_window.is_none() && total > T::zero() && edge > lit::<T>(1e-6) * total;
            for r in rows.iter_mut() {
                r.flags.truncation = trunc;
            }
            table.rows.extend(rows);
        }
    }
    table.sort();
    Ok(table)
}

/// Pair-breaking rates from one initial eigenvector into every final eigenvector whose
/// photon centroid lies in the interior window.
///
/// Each final eigenvector is reported with `beta` = the qubit level carrying most of its
/// weight and `n = m0 - round(centroid)`. Used when final states cannot be tracked from
/// zero drive.
pub fn pair_breaking_rates_all_final<T: Real>(
    alpha: usize,
    v_init: ndarray::ArrayView1<Complex<T>>,
    e_init: T,
    fin: &FloquetSpectrum<T>,
    ops: &[TransitionOperators<T>],
    env: &QpEnvironment<T>,
    opts: &RateOptions,
    flags: LabelFlags,
) -> Result<RateTable<T>> {
    let w = lit::<T>(fin.m_max as f64 - opts.guard as f64);
    let m0 = crate::floquet::centroid(v_init, fin.d, fin.m_max).round();
    if m0.abs() > w {
        return Err(Error::Argument("initial state outside interior window".into()));
    }
    let applied = apply_all(ops, v_init);
    let threshold = env.gap.threshold();
    let d = fin.d;
    let mut table = RateTable::default();
    for j in 0..fin.dim() {
        let omega = e_init - fin.energies[j];
        let v = fin.vector(j);
        let c = crate::floquet::centroid(v, d, fin.m_max);
        if c.abs() > w {
            continue;
        }
        if omega <= threshold {
            continue;
        }
        let mut level = vec![T::zero(); d];
        for (i, z) in v.iter().enumerate() {
            level[i % d] += z.norm_sqr();
        }
        let beta = (0..d)
            .max_by(|&x, &y| level[x].partial_cmp(&level[y]).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(0);
        let n = (m0 - c.round()).to_i64().unwrap_or(0);
        for ap in &applied {
            let c2 = inner(v, ap.wc.view()).norm_sqr();
            let s2 = inner(v, ap.ws.view()).norm_sqr();
            let gamma = golden_rule(ap.ej, c2, s2, omega, env.gap);
            table.rows.push(RateRow {
                alpha,
                beta,
                n,
                junction: ap.junction,
                omega,
                cos_elem2: c2,
                sin_elem2: s2,
                gamma,
                flags: RateFlags { label: flags, truncation: false },
            });
        }
    }
    // Sort key ties (same beta and n from distinct eigenvectors) keep eigen order.
    table.rows.sort_by(|x, y| {
        (x.alpha, x.beta, x.n, x.junction)
            .cmp(&(y.alpha, y.beta, y.n, y.junction))
            .then(x.omega.partial_cmp(&y.omega).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(table)
}

/// Drive-enhanced quasiparticle tunneling rate `alpha -> beta` with user structure factors.
///
/// Sums every `n` in the interior window with
/// `h omega = n h omega_d + E~_{beta,0} - E~_{alpha,0}`; note the pairing is cos with `S-`
/// and sin with `S+`.
pub fn qp_tunneling_rate<T, FP, FM>(
    init: &DressedStates<T>,
    fin: &DressedStates<T>,
    ops: &[TransitionOperators<T>],
    alpha: usize,
    beta: usize,
    s_plus: FP,
    s_minus: FM,
    opts: &RateOptions,
) -> Result<T>
where
    T: Real,
    FP: Fn(T) -> T,
    FM: Fn(T) -> T,
{
    let si = init.spectrum;
    let sf = fin.spectrum;
    let (n_lo, n_hi) = opts.n_range(si.m_max)?;
    let m0 = opts.initial_index(si.m_max);
    let (ja0, ea, _) = init.lookup(alpha)?;
    let (jb0, eb, _) = fin.lookup(beta)?;
    let (ja, _) = si.replica(ja0, m0);
    let applied = apply_all(ops, si.vector(ja));
    let mut total = T::zero();
    for n in n_lo..=n_hi {
        let omega = lit::<T>(n as f64) * si.omega_d + eb - ea;
        let (jb, _) = sf.replica(jb0, m0 - n);
        let vf = sf.vector(jb);
        for ap in &applied {
            let c2 = inner(vf, ap.wc.view()).norm_sqr();
            let s2 = inner(vf, ap.ws.view()).norm_sqr();
            total += gamma_ph(ap.ej) * (c2 * s_minus(omega) + s2 * s_plus(omega));
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xqp_identities() {
        assert_eq!(steady_state_xqp(0.0f64, 2e6, 1.0 / 120e-9).unwrap(), 0.0);
        let ncp = 2e6f64;
        let cr = 1.0f64 / 120e-9;
        assert!((steady_state_xqp(ncp * cr, ncp, cr).unwrap() - 1.0).abs() < 1e-15);
        assert!(steady_state_xqp(1.0f64, 0.0, 1.0).is_err());
        assert!(steady_state_xqp(-1.0f64, 1.0, 1.0).is_err());
    }

    #[test]
    fn lifetime_sentinel() {
        assert_eq!(Lifetime::from_rate(0.0f64), Lifetime::Infinite);
        assert_eq!(Lifetime::from_rate(4.0f64), Lifetime::Finite(0.25));
        assert!(Lifetime::Finite(1.0f64).lt(&Lifetime::Infinite));
        assert!(!Lifetime::<f64>::Infinite.lt(&Lifetime::Finite(1.0)));
        assert_eq!(Lifetime::<f64>::Infinite.to_string(), "inf");
    }

    #[test]
    fn window_bounds() {
        let o = RateOptions::default();
        assert_eq!(o.initial_index(15), 8);
        assert_eq!(o.n_range(15).unwrap(), (-2, 18));
        assert!(RateOptions { m0: Some(12), guard: 5 }.n_range(15).is_err());
    }

    #[test]
    fn prefactor() {
        assert_eq!(gamma_ph(1.0f64), 16e9);
    }
}
