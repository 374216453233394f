use ndarray::{Array1, Array2};
use num_complex::Complex;

use crate::circuits::{
    build_charge_operators, effective_hamiltonian_kapitza, effective_potential, kapitza_coefficients,
    squid_drive_fourier, to_eigenbasis, ChargeBasis, ChargeBasisOperators, EigenbasisOperators, Sector, SquidParams,
};
use crate::error::{Error, Result};
use crate::floquet::{diagonalize, project_mode, FloquetProblem, LabelFlags};
use crate::rates::{
    pair_breaking_rates_all_final, Lifetime, QpEnvironment, RateOptions, RateTable, TransitionOperators,
};
use crate::specfn::hermitian_eig;

use super::{check_axis, Numerics};

/// Ground and first excited state of each well, in rate-table `alpha` order.
pub const WELL_STATES: [&str; 4] = ["g0", "e0", "gpi", "epi"];

/// Terms kept in the effective `cos 2 phi` coefficient series.
pub const EFFECTIVE_TERMS: usize = 40;

/// Flux-driven symmetric SQUID at `phi_dc = 0`.
#[derive(Debug, Clone)]
pub struct KapitzaSetup {
    pub params: SquidParams<f64>,
    pub numerics: Numerics,
    pub omega_d: f64,
    pub env: QpEnvironment<f64>,
    pub even: ChargeBasisOperators<f64>,
    pub odd: ChargeBasisOperators<f64>,
    pub eig: EigenbasisOperators<f64>,
    pub rate_opts: RateOptions,
    /// Identification is flagged ambiguous below this overlap.
    pub min_overlap: f64,
}

#[derive(Debug, Clone)]
pub struct KapitzaState {
    pub name: &'static str,
    /// Index among effective-Hamiltonian eigenstates.
    pub eff_index: Option<usize>,
    /// Energy below the effective barrier.
    pub bound: bool,
    /// Floquet eigenvector index and its normalized projection overlap.
    pub index: Option<usize>,
    pub overlap: f64,
    /// Dressed energy shifted to the `m = 0` replica, GHz.
    pub energy: f64,
    pub flags: LabelFlags,
    pub gamma: f64,
    pub gamma_junction: [f64; 2],
    pub lifetime: Lifetime<f64>,
}

impl KapitzaState {
    pub fn present(&self) -> bool {
        self.bound && self.index.is_some()
    }
}

#[derive(Debug, Clone)]
pub struct KapitzaPoint {
    pub grid_index: usize,
    pub phi_ac: f64,
    pub e1: f64,
    pub e2: f64,
    pub states: Vec<KapitzaState>,
    /// `alpha` indexes [`WELL_STATES`].
    pub table: RateTable<f64>,
}

impl KapitzaPoint {
    pub fn state(&self, name: &str) -> Option<&KapitzaState> {
        self.states.iter().find(|s| s.name == name)
    }
}

impl KapitzaSetup {
    pub fn new(params: SquidParams<f64>, numerics: Numerics, omega_d: f64) -> Result<Self> {
        numerics.validate()?;
        if !params.is_symmetric() {
            return Err(Error::Argument("the flux-driven study needs identical junctions and c1 = c2".into()));
        }
        if !(omega_d > 0.0) {
            return Err(Error::Argument("drive frequency must be positive".into()));
        }
        let be = ChargeBasis::new(Sector::Even, numerics.n_c)?;
        let even = build_charge_operators::<f64>(be);
        let odd = build_charge_operators::<f64>(be.partner());
        let static_h = |ops: &ChargeBasisOperators<f64>| -> Result<Array2<Complex<f64>>> {
            let s = squid_drive_fourier(&params, ops, 0.0, 0.0, 0)?;
            Ok(s.hamiltonian.component(0).expect("k = 0").to_owned())
        };
        let he = static_h(&even)?;
        let ho = static_h(&odd)?;
        let eig = to_eigenbasis(he.view(), &even, ho.view(), numerics.d)?;
        Ok(KapitzaSetup {
            params,
            numerics,
            omega_d,
            env: QpEnvironment::default(),
            even,
            odd,
            eig,
            rate_opts: RateOptions { m0: None, guard: numerics.guard },
            min_overlap: 0.5,
        })
    }

    fn kmax(&self) -> usize {
        self.numerics.k_max.min(2 * self.numerics.m_max)
    }

    pub fn problem(&self, sector: Sector, phi_ac: f64) -> Result<FloquetProblem<f64>> {
        let k = self.kmax();
        let s = match sector {
            Sector::Even => self.eig.rotate_even(&squid_drive_fourier(&self.params, &self.even, 0.0, phi_ac, k)?.hamiltonian),
            Sector::Odd => self.eig.rotate_odd(&squid_drive_fourier(&self.params, &self.odd, 0.0, phi_ac, k)?.hamiltonian),
        };
        Ok(FloquetProblem::new(s, self.omega_d, self.numerics.m_max)?.with_max_dim(self.numerics.max_dim))
    }

    pub fn transition_ops(&self, phi_ac: f64) -> Result<Vec<TransitionOperators<f64>>> {
        let s = squid_drive_fourier(&self.params, &self.even, 0.0, phi_ac, self.kmax())?;
        Ok(s.junctions
            .iter()
            .enumerate()
            .map(|(i, j)| TransitionOperators {
                junction: i + 1,
                ej: j.ej,
                cos: self.eig.rotate_cross(&j.cos),
                sin: self.eig.rotate_cross(&j.sin),
            })
            .collect())
    }
}

/// Well assignment of effective-Hamiltonian eigenstates: `(g0, e0, gpi, epi)` indices and
/// whether each lies below the effective barrier.
fn well_states(
    setup: &KapitzaSetup,
    phi_ac: f64,
) -> Result<(f64, f64, Array1<f64>, Array2<Complex<f64>>, [(Option<usize>, bool); 4])> {
    let (e1, e2) = kapitza_coefficients(&setup.params, phi_ac, setup.omega_d, EFFECTIVE_TERMS)?;
    let h = effective_hamiltonian_kapitza(&setup.params, &setup.even, phi_ac, setup.omega_d, EFFECTIVE_TERMS)?;
    let e = hermitian_eig(h.view())?;
    let grid: Vec<f64> = (0..=2000).map(|i| std::f64::consts::PI * i as f64 / 1000.0).collect();
    let top = effective_potential(e1, e2, &grid).into_iter().fold(f64::NEG_INFINITY, f64::max);
    let n = e.values.len();
    let cos_exp: Vec<f64> = (0..n)
        .map(|a| {
            let v = e.vectors.column(a);
            let cv = setup.even.cos_phi.dot(&v);
            v.iter().zip(cv.iter()).map(|(x, y)| (x.conj() * y).re).sum()
        })
        .collect();
    let zero: Vec<usize> = (0..n).filter(|&a| cos_exp[a] > 0.0).take(2).collect();
    let pi: Vec<usize> = (0..n).filter(|&a| cos_exp[a] < 0.0).take(2).collect();
    let pick = |v: &Vec<usize>, k: usize| -> (Option<usize>, bool) {
        match v.get(k) {
            Some(&a) => (Some(a), e.values[a] < top),
            None => (None, false),
        }
    };
    let states = [pick(&zero, 0), pick(&zero, 1), pick(&pi, 0), pick(&pi, 1)];
    Ok((e1, e2, e.values, e.vectors, states))
}

/// Identifies the four well states among the Floquet states at `phi_ac` and evaluates
/// their pair-breaking rates into every interior odd-sector Floquet state.
pub fn kapitza_point(setup: &KapitzaSetup, phi_ac: f64, grid_index: usize) -> Result<KapitzaPoint> {
    let (e1, e2, _, eff_vecs, wells) = well_states(setup, phi_ac)?;
    let d = setup.numerics.d;
    let m_max = setup.numerics.m_max;
    let m0 = setup.rate_opts.initial_index(m_max) as f64;
    let vh = setup.eig.v_even.t().mapv(|z| z.conj());

    let spec = diagonalize(&setup.problem(Sector::Even, phi_ac)?)?;
    let cands: Vec<usize> = (0..spec.dim()).filter(|&j| (spec.centroid(j) - m0).abs() < 0.5).collect();
    let projected: Vec<(usize, Array1<Complex<f64>>, f64)> = cands
        .iter()
        .map(|&j| {
            let p = project_mode(spec.vector(j), d, m_max, 0.0);
            let norm = p.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            (j, p, norm)
        })
        .collect();

    let mut picks = Vec::with_capacity(4);
    for (k, &(eff, bound)) in wells.iter().enumerate() {
        let mut st = KapitzaState {
            name: WELL_STATES[k],
            eff_index: eff,
            bound,
            index: None,
            overlap: 0.0,
            energy: f64::NAN,
            flags: LabelFlags::default(),
            gamma: 0.0,
            gamma_junction: [0.0; 2],
            lifetime: Lifetime::Infinite,
        };
        if let Some(a) = eff {
            let target = vh.dot(&eff_vecs.column(a));
            let mut scores: Vec<(f64, usize)> = projected
                .iter()
                .map(|(j, p, norm)| {
                    let o: Complex<f64> = target.iter().zip(p.iter()).map(|(x, y)| x.conj() * y).sum();
                    (if *norm > 0.0 { o.norm() / norm } else { 0.0 }, *j)
                })
                .collect();
            scores.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(std::cmp::Ordering::Equal).then(x.1.cmp(&y.1)));
            if let Some(&(best, j)) = scores.first() {
                st.index = Some(j);
                st.overlap = best;
                st.energy = spec.energies[j] - m0 * setup.omega_d;
                let runner = scores.get(1).map(|s| s.0).unwrap_or(0.0);
                st.flags.ambiguous = best < setup.min_overlap || best - runner < 1e-3;
            }
        }
        picks.push(st);
    }
    // Two wells resolved to one Floquet state cannot both be right.
    for a in 0..picks.len() {
        for b in a + 1..picks.len() {
            if picks[a].index.is_some() && picks[a].index == picks[b].index {
                picks[a].flags.conflict = true;
                picks[b].flags.conflict = true;
            }
        }
    }
    // Keep only the initial vectors before the odd-sector diagonalization.
    let inits: Vec<Option<(Array1<Complex<f64>>, f64)>> = picks
        .iter()
        .map(|s| s.index.filter(|_| s.bound).map(|j| (spec.vector(j).to_owned(), spec.energies[j])))
        .collect();
    drop(spec);

    let ops = setup.transition_ops(phi_ac)?;
    let fin = diagonalize(&setup.problem(Sector::Odd, phi_ac)?)?;
    let mut table = RateTable::default();
    for (k, init) in inits.iter().enumerate() {
        let Some((v, e)) = init else { continue };
        let t = pair_breaking_rates_all_final(k, v.view(), *e, &fin, &ops, &setup.env, &setup.rate_opts, picks[k].flags)?;
        let st = &mut picks[k];
        st.gamma = t.gamma_a(k);
        st.gamma_junction = [t.gamma_a_junction(k, 1), t.gamma_a_junction(k, 2)];
        st.lifetime = Lifetime::from_rate(st.gamma);
        table.rows.extend(t.rows);
    }
    Ok(KapitzaPoint { grid_index, phi_ac, e1, e2, states: picks, table })
}

/// Sequential sweep over flux amplitudes (each point holds two large spectra).
pub fn kapitza_sweep(setup: &KapitzaSetup, phi_acs: &[f64]) -> Result<Vec<KapitzaPoint>> {
    check_axis("phi_ac", phi_acs)?;
    phi_acs.iter().enumerate().map(|(i, &p)| kapitza_point(setup, p, i)).collect()
}
