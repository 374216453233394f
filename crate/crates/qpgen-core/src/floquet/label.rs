//! Dressed-state labeling along a drive-amplitude sweep.
//!
//! Each tracked state `(alpha, 0)` starts as the undriven product state. At every sweep
//! point the eigenvector with the largest overlap against the current reference gets
//! the label; when that overlap drops below the restart threshold, the reference is
//! replaced by the dressed state labeled at the previous point. Resonances are thereby
//! crossed diabatically.

use std::fmt;

use ndarray::{s, Array1, Array2};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::num::{lit, Real};
use crate::specfn::hermitian_eig;

use super::matrix::{diagonalize, overlap, FloquetProblem, FloquetSpectrum};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelOptions<T> {
    pub restart_threshold: T,
    /// Two candidates closer than this in overlap are reported as ambiguous.
    pub ambiguity: T,
    /// Largest accepted per-step change of a tracked overlap before refinement.
    pub max_step_change: T,
    pub max_refine_depth: usize,
}

impl<T: Real> Default for LabelOptions<T> {
    fn default() -> Self {
        LabelOptions {
            restart_threshold: lit(0.5),
            ambiguity: lit(1e-3),
            max_step_change: lit(0.3),
            max_refine_depth: 6,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct LabelFlags {
    pub ambiguous: bool,
    pub conflict: bool,
    pub restarted: bool,
    pub large_step: bool,
}

impl LabelFlags {
    pub fn any(&self) -> bool {
        self.ambiguous || self.conflict || self.restarted || self.large_step
    }

    pub fn merge(&mut self, o: LabelFlags) {
        self.ambiguous |= o.ambiguous;
        self.conflict |= o.conflict;
        self.restarted |= o.restarted;
        self.large_step |= o.large_step;
    }
}

impl fmt::Display for LabelFlags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.ambiguous {
            parts.push("ambiguous");
        }
        if self.conflict {
            parts.push("conflict");
        }
        if self.restarted {
            parts.push("restart");
        }
        if self.large_step {
            parts.push("large_step");
        }
        write!(f, "{}", parts.join("|"))
    }
}

/// Labels of the tracked states at one sweep point.
#[derive(Debug, Clone)]
pub struct PointLabels<T> {
    /// Eigenvector index of `(alpha, 0)` per tracked state.
    pub index: Vec<usize>,
    /// `|<lambda|alpha, 0>|` against the undriven product state.
    pub bare_overlap: Vec<T>,
    /// Overlap against the reference used for the decision.
    pub ref_overlap: Vec<T>,
    /// Dressed energies `E~_{alpha, 0}`.
    pub energies: Vec<T>,
    pub flags: Vec<LabelFlags>,
}

#[derive(Debug, Clone)]
pub struct Tracker<T: Real> {
    pub tracked: Vec<usize>,
    pub opts: LabelOptions<T>,
    /// Undriven energies `E_alpha` of the tracked states.
    pub bare_energies: Vec<T>,
    bare: Vec<Array1<Complex<T>>>,
    refs: Vec<Array1<Complex<T>>>,
    prev: Vec<Option<Array1<Complex<T>>>>,
    prev_ref_overlap: Vec<Option<T>>,
}

fn embed<T: Real>(v: ndarray::ArrayView1<Complex<T>>, d: usize, m_max: usize) -> Array1<Complex<T>> {
    let mut out = Array1::from_elem(d * (2 * m_max + 1), Complex::new(T::zero(), T::zero()));
    out.slice_mut(s![m_max * d..(m_max + 1) * d]).assign(&v);
    out
}

impl<T: Real> Tracker<T> {
    /// Starts tracking from an undriven (or negligibly driven) problem.
    pub fn new(start: &FloquetProblem<T>, tracked: &[usize], opts: LabelOptions<T>) -> Result<Self> {
        let h0 = start.series.component(0).expect("k = 0 present");
        let scale = h0.iter().fold(T::zero(), |m, z| m.max(z.norm()));
        if start.series.drive_magnitude() > lit::<T>(1e-6) * scale {
            return Err(Error::Contract("labeling sweep must start at (near) zero drive".into()));
        }
        let d = start.d();
        if let Some(&a) = tracked.iter().find(|&&a| a >= d) {
            return Err(Error::Argument(format!("tracked state {a} outside qubit dimension {d}")));
        }
        let e = hermitian_eig(h0)?;
        let bare: Vec<_> = tracked.iter().map(|&a| embed(e.vectors.column(a), d, start.m_max)).collect();
        Ok(Tracker {
            tracked: tracked.to_vec(),
            opts,
            bare_energies: tracked.iter().map(|&a| e.values[a]).collect(),
            refs: bare.clone(),
            bare,
            prev: vec![None; tracked.len()],
            prev_ref_overlap: vec![None; tracked.len()],
        })
    }

    fn overlaps(refs: &[Array1<Complex<T>>], spec: &FloquetSpectrum<T>) -> Array2<T> {
        let n = spec.dim();
        let r = Array2::from_shape_fn((refs.len(), n), |(i, j)| refs[i][j].conj());
        T::cdot(r.view(), spec.vectors.view()).mapv(|z| z.norm())
    }

    /// Labels one sweep point and advances the references.
    pub fn step(&mut self, spec: &FloquetSpectrum<T>) -> PointLabels<T> {
        let t = self.tracked.len();
        let mut ov = Self::overlaps(&self.refs, spec);
        let mut flags = vec![LabelFlags::default(); t];
        for a in 0..t {
            let best = ov.row(a).iter().fold(T::zero(), |m, &x| m.max(x));
            if best < self.opts.restart_threshold {
                if let Some(p) = &self.prev[a] {
                    self.refs[a] = p.clone();
                    for j in 0..spec.dim() {
                        ov[[a, j]] = overlap(self.refs[a].view(), spec.vector(j));
                    }
                    flags[a].restarted = true;
                }
            }
        }
        // Candidate order per state, best first.
        let mut order: Vec<Vec<usize>> = Vec::with_capacity(t);
        for a in 0..t {
            let mut idx: Vec<usize> = (0..spec.dim()).collect();
            idx.sort_by(|&i, &j| ov[[a, j]].partial_cmp(&ov[[a, i]]).unwrap_or(std::cmp::Ordering::Equal));
            idx.truncate(8.min(idx.len()));
            let top = ov[[a, idx[0]]];
            let near: Vec<usize> = idx.iter().copied().filter(|&j| top - ov[[a, j]] < self.opts.ambiguity).collect();
            if near.len() > 1 {
                flags[a].ambiguous = true;
                // Prefer the candidate continuing the previous trajectory.
                if let Some(p) = &self.prev[a] {
                    let pick = *near
                        .iter()
                        .max_by(|&&i, &&j| {
                            overlap(p.view(), spec.vector(i))
                                .partial_cmp(&overlap(p.view(), spec.vector(j)))
                                .unwrap_or(std::cmp::Ordering::Equal)
                        })
                        .unwrap();
                    idx.retain(|&j| j != pick);
                    idx.insert(0, pick);
                }
            }
            order.push(idx);
        }
        // Greedy conflict resolution by decreasing overlap.
        let mut claim: Vec<Option<usize>> = vec![None; t];
        let mut taken = std::collections::HashSet::new();
        let mut pri: Vec<usize> = (0..t).collect();
        pri.sort_by(|&a, &b| ov[[b, order[b][0]]].partial_cmp(&ov[[a, order[a][0]]]).unwrap_or(std::cmp::Ordering::Equal));
        for &a in &pri {
            for (rank, &j) in order[a].iter().enumerate() {
                if taken.insert(j) {
                    claim[a] = Some(j);
                    if rank > 0 {
                        flags[a].conflict = true;
                    }
                    break;
                }
            }
            if claim[a].is_none() {
                flags[a].conflict = true;
                let j = order[a][0];
                claim[a] = Some(j);
            }
        }
        let mut out = PointLabels {
            index: Vec::with_capacity(t),
            bare_overlap: Vec::with_capacity(t),
            ref_overlap: Vec::with_capacity(t),
            energies: Vec::with_capacity(t),
            flags: Vec::with_capacity(t),
        };
        for a in 0..t {
            let j = claim[a].unwrap();
            let ro = ov[[a, j]];
            if let Some(p) = self.prev_ref_overlap[a] {
                if !flags[a].restarted && (ro - p).abs() > self.opts.max_step_change {
                    flags[a].large_step = true;
                }
            }
            self.prev_ref_overlap[a] = Some(ro);
            self.prev[a] = Some(spec.vector(j).to_owned());
            out.index.push(j);
            out.bare_overlap.push(overlap(self.bare[a].view(), spec.vector(j)));
            out.ref_overlap.push(ro);
            out.energies.push(spec.energies[j]);
            out.flags.push(flags[a]);
        }
        out
    }

    /// Position of a tracked qubit state in the label vectors.
    pub fn slot(&self, alpha: usize) -> Option<usize> {
        self.tracked.iter().position(|&a| a == alpha)
    }
}

/// `(E~_e - E~_g) - (E_e - E_g)` for tracked slots `g` and `e`.
pub fn stark_shift<T: Real>(labels: &PointLabels<T>, tracker: &Tracker<T>, g: usize, e: usize) -> Result<T> {
    let (sg, se) = match (tracker.slot(g), tracker.slot(e)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::Label(format!("states {g} and {e} must both be tracked"))),
    };
    Ok((labels.energies[se] - labels.energies[sg]) - (tracker.bare_energies[se] - tracker.bare_energies[sg]))
}

/// One point of a labeled sweep; eigenvectors are not retained.
#[derive(Debug, Clone)]
pub struct LabeledPoint<T> {
    pub amplitude: T,
    pub labels: PointLabels<T>,
}

#[derive(Debug, Clone)]
pub struct LabeledSpectrum<T: Real> {
    pub tracked: Vec<usize>,
    pub bare_energies: Vec<T>,
    pub points: Vec<LabeledPoint<T>>,
}

impl<T: Real> LabeledSpectrum<T> {
    /// Overlap trace `|<lambda(A)|alpha, 0>|` along the sweep.
    pub fn overlap_trace(&self, alpha: usize) -> Option<Vec<(T, T)>> {
        let s = self.tracked.iter().position(|&a| a == alpha)?;
        Some(self.points.iter().map(|p| (p.amplitude, p.labels.bare_overlap[s])).collect())
    }
}

/// Labels a fixed list of problems (no refinement).
pub fn label_sweep<T: Real>(
    amplitudes: &[T],
    problems: &[FloquetProblem<T>],
    tracked: &[usize],
    opts: LabelOptions<T>,
) -> Result<LabeledSpectrum<T>> {
    if problems.is_empty() || amplitudes.len() != problems.len() {
        return Err(Error::Argument("need one amplitude per problem".into()));
    }
    let mut tr = Tracker::new(&problems[0], tracked, opts)?;
    let mut points = Vec::with_capacity(problems.len());
    for (a, p) in amplitudes.iter().zip(problems) {
        let spec = diagonalize(p)?;
        points.push(LabeledPoint { amplitude: *a, labels: tr.step(&spec) });
    }
    Ok(LabeledSpectrum { tracked: tracked.to_vec(), bare_energies: tr.bare_energies.clone(), points })
}

/// Advances `tracker` from `from` to `to`, bisecting the step while any tracked overlap
/// changes by more than `max_step_change`. Returns the spectrum and labels at `to`, and
/// every accepted intermediate point when `keep` is set.
pub fn track_to<T, F>(
    tracker: &mut Tracker<T>,
    from: T,
    to: T,
    build: &F,
    keep: bool,
) -> Result<(FloquetSpectrum<T>, PointLabels<T>, Vec<LabeledPoint<T>>)>
where
    T: Real,
    F: Fn(T) -> Result<FloquetProblem<T>>,
{
    let mut extra = Vec::new();
    let (spec, labels) = refine(tracker, from, to, build, 0, keep, &mut extra)?;
    Ok((spec, labels, extra))
}

fn refine<T, F>(
    tracker: &mut Tracker<T>,
    from: T,
    to: T,
    build: &F,
    depth: usize,
    keep: bool,
    extra: &mut Vec<LabeledPoint<T>>,
) -> Result<(FloquetSpectrum<T>, PointLabels<T>)>
where
    T: Real,
    F: Fn(T) -> Result<FloquetProblem<T>>,
{
    let spec = diagonalize(&build(to)?)?;
    let mut trial = tracker.clone();
    let labels = trial.step(&spec);
    let jumped = labels.flags.iter().any(|f| f.large_step);
    if !jumped || depth >= tracker.opts.max_refine_depth {
        *tracker = trial;
        return Ok((spec, labels));
    }
    drop(spec);
    let mid = (from + to) * lit(0.5);
    let (_, ml) = refine(tracker, from, mid, build, depth + 1, keep, extra)?;
    if keep {
        extra.push(LabeledPoint { amplitude: mid, labels: ml });
    }
    refine(tracker, mid, to, build, depth + 1, keep, extra)
}

/// Sweep with adaptive refinement; the returned points include refinement points.
pub fn label_sweep_adaptive<T, F>(
    amplitudes: &[T],
    build: F,
    tracked: &[usize],
    opts: LabelOptions<T>,
) -> Result<LabeledSpectrum<T>>
where
    T: Real,
    F: Fn(T) -> Result<FloquetProblem<T>>,
{
    if amplitudes.is_empty() {
        return Err(Error::Argument("empty sweep".into()));
    }
    let first = build(amplitudes[0])?;
    let mut tr = Tracker::new(&first, tracked, opts)?;
    let spec = diagonalize(&first)?;
    let mut points = vec![LabeledPoint { amplitude: amplitudes[0], labels: tr.step(&spec) }];
    drop(spec);
    for w in amplitudes.windows(2) {
        let (_, labels, extra) = track_to(&mut tr, w[0], w[1], &build, true)?;
        points.extend(extra);
        points.push(LabeledPoint { amplitude: w[1], labels });
    }
    Ok(LabeledSpectrum { tracked: tracked.to_vec(), bare_energies: tr.bare_energies.clone(), points })
}
