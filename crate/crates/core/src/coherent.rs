//! Exact algebra of finite superpositions of multimode coherent states.
//!
//! A state is stored as a list of terms `c_t |a_t1⟩|a_t2⟩...|a_tk⟩`. The kets
//! are not orthogonal, so every norm and inner product goes through the Gram
//! matrix of coherent overlaps. Passive linear optics (phase shifters and beam
//! splitters) only relabel the kets, which makes the representation exact: no
//! photon-number truncation is ever involved.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::FockState;
use crate::measurement::{diagonal, MeasurementOutcome, DEFAULT_MAX_PHOTONS};

/// Labels closer than this (per real/imaginary component) are the same ket.
pub const LABEL_MERGE_TOL: f64 = 1e-12;
/// Terms whose coefficient falls below this after a transform are dropped.
pub const COEFF_DROP_TOL: f64 = 1e-15;
/// Squared norms below this cannot be normalized.
pub const NEAR_SINGULAR_NORM_SQR: f64 = 1e-14;
/// Tolerance on the self-overlap of a state treated as normalized.
pub const NORMALIZED_TOL: f64 = 1e-10;

/// `⟨a|b⟩` for single-mode coherent states.
pub fn coherent_overlap(a: Complex64, b: Complex64) -> Complex64 {
    (-0.5 * a.norm_sqr() - 0.5 * b.norm_sqr() + a.conj() * b).exp()
}

pub(crate) fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `⟨n|a⟩ = e^{-|a|²/2} aⁿ / √n!`, evaluated in log space.
pub fn fock_amplitude(a: Complex64, n: usize) -> Complex64 {
    let r2 = a.norm_sqr();
    if r2 == 0.0 {
        return if n == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
    }
    let nf = n as f64;
    let magnitude = (-0.5 * r2 + nf * a.norm().ln() - 0.5 * ln_factorial(n)).exp();
    if a.im == 0.0 {
        // keep real labels exactly real
        let sign = if a.re < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
        Complex64::new(sign * magnitude, 0.0)
    } else {
        Complex64::from_polar(magnitude, nf * a.arg())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherentTerm {
    pub coeff: Complex64,
    pub labels: Vec<Complex64>,
}

impl CoherentTerm {
    fn overlap(&self, other: &CoherentTerm) -> Complex64 {
        let kets: Complex64 = self
            .labels
            .iter()
            .zip(&other.labels)
            .map(|(&a, &b)| coherent_overlap(a, b))
            .product();
        self.coeff.conj() * other.coeff * kets
    }

    fn same_kets(&self, other: &CoherentTerm) -> bool {
        self.labels.iter().zip(&other.labels).all(|(a, b)| {
            (a.re - b.re).abs() <= LABEL_MERGE_TOL && (a.im - b.im).abs() <= LABEL_MERGE_TOL
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct SuperpositionRepr {
    modes: usize,
    terms: Vec<CoherentTerm>,
}

/// Finite superposition of multimode coherent-state products.
///
/// Serializes as `{"modes": k, "terms": [{"coeff": [re, im], "labels": [[re, im], ...]}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "SuperpositionRepr", try_from = "SuperpositionRepr")]
pub struct CoherentSuperposition {
    modes: usize,
    terms: Vec<CoherentTerm>,
    normalized: bool,
}

impl From<CoherentSuperposition> for SuperpositionRepr {
    fn from(s: CoherentSuperposition) -> Self {
        SuperpositionRepr { modes: s.modes, terms: s.terms }
    }
}

impl TryFrom<SuperpositionRepr> for CoherentSuperposition {
    type Error = Error;

    fn try_from(r: SuperpositionRepr) -> Result<Self> {
        let terms = r.terms.into_iter().map(|t| (t.coeff, t.labels)).collect();
        CoherentSuperposition::new(r.modes, terms)
    }
}

impl CoherentSuperposition {
    /// Builds an unnormalized state carrying `terms` verbatim.
    pub fn new(modes: usize, terms: Vec<(Complex64, Vec<Complex64>)>) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidSpec("a state needs at least one mode".into()));
        }
        if terms.is_empty() {
            return Err(Error::EmptyState);
        }
        let mut out = Vec::with_capacity(terms.len());
        for (coeff, labels) in terms {
            if labels.len() != modes {
                return Err(Error::MismatchedModeCount { expected: modes, found: labels.len() });
            }
            if !coeff.is_finite() {
                return Err(Error::NonFiniteLabel(format!("coefficient {coeff}")));
            }
            if let Some(bad) = labels.iter().find(|l| !l.is_finite()) {
                return Err(Error::NonFiniteLabel(bad.to_string()));
            }
            out.push(CoherentTerm { coeff, labels });
        }
        Ok(Self { modes, terms: out, normalized: false })
    }

    /// The product state `|labels[0]⟩|labels[1]⟩...`, which is already unit norm.
    pub fn product(labels: &[Complex64]) -> Result<Self> {
        let mut s = Self::new(labels.len(), vec![(Complex64::new(1.0, 0.0), labels.to_vec())])?;
        s.normalized = true;
        Ok(s)
    }

    pub fn vacuum(modes: usize) -> Result<Self> {
        Self::product(&vec![Complex64::new(0.0, 0.0); modes])
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn terms(&self) -> &[CoherentTerm] {
        &self.terms
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Gram-matrix inner product `⟨self|other⟩`.
    pub fn overlap(&self, other: &Self) -> Result<Complex64> {
        if self.modes != other.modes {
            return Err(Error::MismatchedModeCount { expected: self.modes, found: other.modes });
        }
        Ok(self.inner(other))
    }

    fn inner(&self, other: &Self) -> Complex64 {
        self.terms
            .iter()
            .flat_map(|a| other.terms.iter().map(move |b| a.overlap(b)))
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.inner(self).re
    }

    pub fn normalize(&self) -> Result<Self> {
        let norm_sqr = self.norm_sqr();
        if !(norm_sqr >= NEAR_SINGULAR_NORM_SQR) {
            return Err(Error::NearSingularState { norm_sqr, threshold: NEAR_SINGULAR_NORM_SQR });
        }
        let mut out = self.scaled(Complex64::new(1.0 / norm_sqr.sqrt(), 0.0));
        out.normalized = true;
        Ok(out)
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| CoherentTerm { coeff: t.coeff * factor, labels: t.labels.clone() })
            .collect();
        Self { modes: self.modes, terms, normalized: self.normalized && (factor.norm() - 1.0).abs() < 1e-15 }
    }

    /// `self ⊗ other`, modes of `other` appended after those of `self`.
    pub fn tensor(&self, other: &Self) -> Self {
        let terms = self
            .terms
            .iter()
            .flat_map(|a| {
                other.terms.iter().map(move |b| {
                    let mut labels = a.labels.clone();
                    labels.extend_from_slice(&b.labels);
                    CoherentTerm { coeff: a.coeff * b.coeff, labels }
                })
            })
            .collect();
        Self {
            modes: self.modes + other.modes,
            terms: compact(terms, COEFF_DROP_TOL),
            normalized: self.normalized && other.normalized,
        }
    }

    /// Largest `|label|²` over all terms and modes.
    pub fn max_label_norm_sqr(&self) -> f64 {
        self.terms
            .iter()
            .flat_map(|t| t.labels.iter())
            .map(|l| l.norm_sqr())
            .fold(0.0, f64::max)
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.modes {
            return Err(Error::BadModeIndex { mode, modes: self.modes });
        }
        Ok(())
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        self.check_mode(i)?;
        self.check_mode(j)?;
        if i == j {
            return Err(Error::SameMode(i));
        }
        Ok(())
    }

    fn map_labels(&self, f: impl Fn(&mut [Complex64])) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut labels = t.labels.clone();
                f(&mut labels);
                CoherentTerm { coeff: t.coeff, labels }
            })
            .collect();
        Self { modes: self.modes, terms: compact(terms, COEFF_DROP_TOL), normalized: self.normalized }
    }

    /// Phase shifter `e^{iφ a†a}` on `mode`: every label there picks up `e^{iφ}`.
    pub fn phase_shift(&self, mode: usize, phi: f64) -> Result<Self> {
        self.check_mode(mode)?;
        let rot = Complex64::from_polar(1.0, phi);
        Ok(self.map_labels(|l| l[mode] *= rot))
    }

    /// Phase-dressed 50/50 beam splitter ℬ_ij:
    /// `(a_i, a_j) → ((a_i + a_j)/√2, (a_i − a_j)/√2)`. It is its own inverse.
    pub fn balanced_bs(&self, i: usize, j: usize) -> Result<Self> {
        self.check_pair(i, j)?;
        Ok(self.map_labels(|l| {
            let (a, b) = (l[i], l[j]);
            l[i] = (a + b) * FRAC_1_SQRT_2;
            l[j] = (a - b) * FRAC_1_SQRT_2;
        }))
    }

    /// Bare 50/50 beam splitter `exp(iπ/4 (a_i†a_j + a_j†a_i))`:
    /// `(a_i, a_j) → ((a_i + i a_j)/√2, (a_j + i a_i)/√2)`.
    pub fn raw_bs(&self, i: usize, j: usize) -> Result<Self> {
        self.check_pair(i, j)?;
        let im = Complex64::i();
        Ok(self.map_labels(|l| {
            let (a, b) = (l[i], l[j]);
            l[i] = (a + im * b) * FRAC_1_SQRT_2;
            l[j] = (b + im * a) * FRAC_1_SQRT_2;
        }))
    }

    /// Contracts the listed modes with photon-number bras `⟨n|` and returns the
    /// unnormalized state of the remaining modes (original order kept). Projecting
    /// every mode leaves a zero-mode "state" whose single coefficient is the amplitude.
    pub fn project_numbers(&self, assignments: &[(usize, usize)]) -> Result<Self> {
        for (k, &(mode, _)) in assignments.iter().enumerate() {
            self.check_mode(mode)?;
            if assignments[..k].iter().any(|&(m, _)| m == mode) {
                return Err(Error::SameMode(mode));
            }
        }
        let keep: Vec<usize> =
            (0..self.modes).filter(|m| !assignments.iter().any(|&(a, _)| a == *m)).collect();
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let amp: Complex64 =
                    assignments.iter().map(|&(mode, n)| fock_amplitude(t.labels[mode], n)).product();
                CoherentTerm { coeff: t.coeff * amp, labels: keep.iter().map(|&m| t.labels[m]).collect() }
            })
            .collect();
        // only exact zeros are dropped: residual weights may legitimately be tiny
        Ok(Self { modes: keep.len(), terms: compact(terms, 0.0), normalized: false })
    }

    fn require_normalized(&self) -> Result<()> {
        let norm_sqr = self.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORMALIZED_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(())
    }

    /// Probability of finding `n` photons in mode `i` and `m` in mode `j`, with the
    /// unnormalized residual state of the other modes.
    pub fn project_two_mode_number(&self, i: usize, j: usize, n: usize, m: usize) -> Result<(f64, Self)> {
        self.check_pair(i, j)?;
        self.require_normalized()?;
        let residual = self.project_numbers(&[(i, n), (j, m)])?;
        Ok((residual.norm_sqr().max(0.0), residual))
    }

    /// Enumerates two-mode photon-number outcomes until the cumulative
    /// probability reaches `1 − mass_tolerance`. The diagonal on which the target
    /// is reached is always completed. Outcomes whose residual vanishes exactly
    /// are omitted.
    pub fn measurement_distribution(
        &self,
        i: usize,
        j: usize,
        mass_tolerance: f64,
    ) -> Result<Vec<MeasurementOutcome<Self>>> {
        self.measurement_distribution_capped(i, j, mass_tolerance, DEFAULT_MAX_PHOTONS)
    }

    pub fn measurement_distribution_capped(
        &self,
        i: usize,
        j: usize,
        mass_tolerance: f64,
        max_photons: usize,
    ) -> Result<Vec<MeasurementOutcome<Self>>> {
        if !(mass_tolerance > 0.0 && mass_tolerance < 1.0) {
            return Err(Error::InvalidSpec(format!("mass tolerance {mass_tolerance} outside (0, 1)")));
        }
        self.check_pair(i, j)?;
        self.require_normalized()?;
        let mut outcomes = Vec::new();
        let mut mass = 0.0;
        for total in 0..=max_photons {
            for (n, m) in diagonal(total) {
                let residual = self.project_numbers(&[(i, n), (j, m)])?;
                if residual.terms.is_empty() {
                    continue;
                }
                let probability = residual.norm_sqr().max(0.0);
                mass += probability;
                outcomes.push(MeasurementOutcome { n, m, probability, residual });
            }
            if mass >= 1.0 - mass_tolerance {
                return Ok(outcomes);
            }
        }
        Err(Error::NonConvergence { cap: max_photons, mass })
    }

    /// Expands onto a truncated Fock basis. Returns the tensor and the truncation
    /// error `1 − ‖fock‖²/⟨s|s⟩`; fails if less than `min_retained` survives.
    pub fn to_fock_with(&self, cutoffs: &[usize], min_retained: f64) -> Result<(FockState, f64)> {
        if cutoffs.len() != self.modes {
            return Err(Error::MismatchedModeCount { expected: self.modes, found: cutoffs.len() });
        }
        if cutoffs.contains(&0) {
            return Err(Error::CutoffTooSmall { retained: 0.0, required: min_retained });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); cutoffs.iter().product()];
        for t in &self.terms {
            let per_mode: Vec<Vec<Complex64>> = t
                .labels
                .iter()
                .zip(cutoffs)
                .map(|(&l, &c)| (0..c).map(|n| fock_amplitude(l, n)).collect())
                .collect();
            let mut idx = vec![0usize; self.modes];
            for amp in amps.iter_mut() {
                let v: Complex64 = per_mode.iter().zip(&idx).map(|(row, &k)| row[k]).product();
                *amp += t.coeff * v;
                advance(&mut idx, cutoffs);
            }
        }
        let state = FockState::new(cutoffs.to_vec(), amps)?;
        let total = self.norm_sqr();
        if total <= 0.0 {
            return Err(Error::ZeroState);
        }
        let retained = state.norm_sqr() / total;
        if retained < min_retained {
            return Err(Error::CutoffTooSmall { retained, required: min_retained });
        }
        Ok((state, 1.0 - retained))
    }

    pub fn to_fock(&self, cutoffs: &[usize]) -> Result<(FockState, f64)> {
        self.to_fock_with(cutoffs, 0.999)
    }
}

/// Row-major multi-index increment (last mode fastest).
pub(crate) fn advance(idx: &mut [usize], dims: &[usize]) {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < dims[k] {
            return;
        }
        idx[k] = 0;
    }
}

/// Snaps near-vacuum labels to zero, merges terms with matching kets and drops
/// coefficients below `drop_below` (exact zeros only when it is 0).
fn compact(terms: Vec<CoherentTerm>, drop_below: f64) -> Vec<CoherentTerm> {
    let mut out: Vec<CoherentTerm> = Vec::with_capacity(terms.len());
    for mut t in terms {
        for l in t.labels.iter_mut() {
            if l.re.abs() <= LABEL_MERGE_TOL && l.im.abs() <= LABEL_MERGE_TOL {
                *l = Complex64::new(0.0, 0.0);
            }
        }
        match out.iter_mut().find(|e| e.same_kets(&t)) {
            Some(e) => e.coeff += t.coeff,
            None => out.push(t),
        }
    }
    out.retain(|t| t.coeff.norm() > 0.0 && t.coeff.norm() >= drop_below);
    out
}
