//! The post-selected teleportation pipeline.
//!
//! Alice's input modes are first merged into her last mode by a cascade of
//! balanced splitters, which leaves all others in vacuum. The merged mode is
//! then mixed with the first channel mode and both are counted. Exactly one
//! of the two counts is nonzero; its parity decides whether Bob already holds
//! the input (up to a π phase on all his modes) or a non-unitarily distorted
//! copy.

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

use super::states::{build_channel, build_ecs, channel_source_amplitude, ChannelSpec, EcsSpec};
use crate::analysis::{success_prob_closed_form, ChannelSign};
use crate::coherent::CoherentSuperposition;
use crate::error::{Error, Result};
use crate::fock::{cutoff_for, fidelity, BeamSplitter, FockState};
use crate::measurement::{diagonal, DEFAULT_MASS_TOLERANCE, DEFAULT_MAX_PHOTONS};

/// Fock-engine outcomes below this probability are not reported.
pub const FOCK_PROBABILITY_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Analytic,
    Fock,
}

impl Engine {
    pub fn as_str(self) -> &'static str {
        match self {
            Engine::Analytic => "analytic",
            Engine::Fock => "fock",
        }
    }
}

impl std::str::FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Engine::Analytic),
            "fock" => Ok(Engine::Fock),
            other => Err(Error::InvalidSpec(format!("unknown engine {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeKind {
    PerfectSuccess,
    CorrectedSuccess,
    Failure,
}

impl OutcomeKind {
    pub fn is_success(self) -> bool {
        !matches!(self, OutcomeKind::Failure)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            OutcomeKind::PerfectSuccess => "perfect_success",
            OutcomeKind::CorrectedSuccess => "corrected_success",
            OutcomeKind::Failure => "failure",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutcomeClass {
    pub kind: OutcomeKind,
    pub n: usize,
    pub m: usize,
}

/// Classifies a two-mode count. The minus channel succeeds on an odd count in
/// exactly one mode, the plus channel on a nonzero even count.
pub fn classify(n: usize, m: usize, sign: ChannelSign) -> OutcomeClass {
    let good = |k: usize| {
        k > 0
            && match sign {
                ChannelSign::Minus => k % 2 == 1,
                ChannelSign::Plus => k.is_multiple_of(2),
            }
    };
    let kind = if m == 0 && good(n) {
        OutcomeKind::PerfectSuccess
    } else if n == 0 && good(m) {
        OutcomeKind::CorrectedSuccess
    } else {
        OutcomeKind::Failure
    };
    OutcomeClass { kind, n, m }
}

/// Bob's register, in either engine.
pub trait BobRegister: Sized {
    /// `(−1)^{Σ a_k†a_k}` over every mode.
    fn parity_flip(&self) -> Result<Self>;
}

impl BobRegister for CoherentSuperposition {
    fn parity_flip(&self) -> Result<Self> {
        (0..self.modes()).try_fold(self.clone(), |s, k| s.phase_shift(k, PI))
    }
}

impl BobRegister for FockState {
    fn parity_flip(&self) -> Result<Self> {
        (0..self.modes()).try_fold(self.clone(), |s, k| s.apply_phase(k, PI))
    }
}

/// Classifies the count and applies Bob's local correction. Only
/// `CorrectedSuccess` branches are modified; failures are returned as collapsed.
pub fn apply_correction_and_classify<S: BobRegister + Clone>(
    n: usize,
    m: usize,
    sign: ChannelSign,
    bob_state: &S,
) -> Result<(OutcomeClass, S)> {
    let class = classify(n, m, sign);
    let state = match class.kind {
        OutcomeKind::CorrectedSuccess => bob_state.parity_flip()?,
        _ => bob_state.clone(),
    };
    Ok((class, state))
}

#[derive(Debug, Clone)]
pub struct TeleportOptions {
    pub mass_tolerance: f64,
    pub max_photons: usize,
    /// Replaces the rule-selected Fock cutoff on every mode.
    pub cutoff_override: Option<usize>,
}

impl Default for TeleportOptions {
    fn default() -> Self {
        Self { mass_tolerance: DEFAULT_MASS_TOLERANCE, max_photons: DEFAULT_MAX_PHOTONS, cutoff_override: None }
    }
}

/// One post-selected branch with Bob's corrected state.
#[derive(Debug, Clone)]
pub struct Branch<S> {
    pub class: OutcomeClass,
    pub probability: f64,
    pub fidelity: f64,
    pub state: S,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum ReportParams {
    Ecs { input: EcsSpec, channel: ChannelSpec },
    SmallAlpha { a: Complex64, b: Complex64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct OutcomeRecord {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "class")]
    pub kind: OutcomeKind,
    pub probability: f64,
    pub fidelity: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleSummary {
    pub shots: usize,
    pub seed: u64,
    pub successes: usize,
    pub success_fraction: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TeleportReport {
    pub params: ReportParams,
    pub engine: Engine,
    pub outcomes: Vec<OutcomeRecord>,
    pub success_probability: f64,
    pub closed_form_reference: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampled: Option<SampleSummary>,
}

impl TeleportReport {
    pub(crate) fn from_branches<S>(
        params: ReportParams,
        engine: Engine,
        branches: &[Branch<S>],
        closed_form_reference: f64,
    ) -> Self {
        let outcomes: Vec<OutcomeRecord> = branches
            .iter()
            .map(|b| OutcomeRecord {
                n: b.class.n,
                m: b.class.m,
                kind: b.class.kind,
                probability: b.probability,
                fidelity: b.fidelity,
            })
            .collect();
        let success_probability =
            outcomes.iter().filter(|o| o.kind.is_success()).map(|o| o.probability).sum();
        Self { params, engine, outcomes, success_probability, closed_form_reference, sampled: None }
    }

    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }

    /// Draws `shots` outcomes from the enumerated distribution.
    pub fn with_samples(mut self, shots: usize, seed: u64) -> Result<Self> {
        let weights: Vec<f64> = self.outcomes.iter().map(|o| o.probability).collect();
        let dist = WeightedIndex::new(&weights).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let successes =
            (0..shots).filter(|_| self.outcomes[dist.sample(&mut rng)].kind.is_success()).count();
        let success_fraction = if shots == 0 { 0.0 } else { successes as f64 / shots as f64 };
        self.sampled = Some(SampleSummary { shots, seed, successes, success_fraction });
        Ok(self)
    }
}

/// Closed-form success probability for an input of `parties` parties: the
/// measured mode carries `2^{parties/2}α`, which is `2α` in the bipartite case.
pub fn closed_form_reference(sign: ChannelSign, alpha: Complex64, parties: usize) -> f64 {
    let measured = channel_source_amplitude(alpha, parties + 1).norm();
    success_prob_closed_form(sign, measured / 2.0)
}

/// Merges every input mode into the last one with ℬ_{N,k} for k = N−1, ..., 1
/// (rightmost operator first); for three parties this is ℬ₃₁ℬ₃₂.
pub fn disentangle_input(state: &CoherentSuperposition) -> Result<CoherentSuperposition> {
    let last = state.modes() - 1;
    (0..last).rev().try_fold(state.clone(), |s, k| s.balanced_bs(last, k))
}

fn check_compatible(input: &EcsSpec, channel: &ChannelSpec) -> Result<()> {
    if input.parties < 2 {
        return Err(Error::InvalidSpec("teleportation needs an entangled input of at least two parties".into()));
    }
    if (input.alpha - channel.alpha).norm() > 1e-12 {
        return Err(Error::AlphaMismatch { input: input.alpha.to_string(), channel: channel.alpha.to_string() });
    }
    if channel.parties != input.parties + 1 {
        return Err(Error::ParityMismatch(format!(
            "a {}-party input needs a {}-mode channel, got {}",
            input.parties,
            input.parties + 1,
            channel.parties
        )));
    }
    let matches = input
        .label_layout
        .iter()
        .zip(&channel.label_layout[1..])
        .all(|(a, b)| (a - b).norm() <= 1e-12);
    if !matches {
        return Err(Error::ParityMismatch("input labels differ from the channel's receiving modes".into()));
    }
    Ok(())
}

fn branch_fidelity(target: &CoherentSuperposition, state: &CoherentSuperposition) -> Result<f64> {
    let norm = state.norm_sqr();
    if !(norm > 0.0) {
        return Ok(0.0);
    }
    Ok((target.overlap(state)?.norm_sqr() / norm).min(1.0))
}

/// Runs the protocol on the exact engine and returns every enumerated branch.
pub fn teleport_branches(
    input: &EcsSpec,
    channel: &ChannelSpec,
    opts: &TeleportOptions,
) -> Result<Vec<Branch<CoherentSuperposition>>> {
    check_compatible(input, channel)?;
    let target = build_ecs(input)?;
    let separated = disentangle_input(&target)?;
    let spare: Vec<(usize, usize)> = (0..input.parties - 1).map(|m| (m, 0)).collect();
    if separated.terms().iter().any(|t| spare.iter().any(|&(m, _)| t.labels[m].norm() != 0.0)) {
        return Err(Error::ParityMismatch("input modes did not separate into vacuum".into()));
    }
    let merged = separated.project_numbers(&spare)?.normalize()?;
    let full = merged.tensor(&build_channel(channel)?).balanced_bs(0, 1)?;
    let outcomes = full.measurement_distribution_capped(0, 1, opts.mass_tolerance, opts.max_photons)?;
    outcomes
        .into_iter()
        .map(|o| {
            let (class, state) = apply_correction_and_classify(o.n, o.m, channel.sign, &o.residual)?;
            let fidelity = branch_fidelity(&target, &state)?;
            Ok(Branch { class, probability: o.probability, fidelity, state })
        })
        .collect()
}

/// Largest tensor the Fock engine will allocate during teleportation.
pub const FOCK_MAX_AMPLITUDES: usize = 1 << 24;

/// Rule-selected Fock cutoffs: one shared by every input mode and the two
/// measured modes, then one per receiving mode.
pub fn fock_cutoffs(channel: &ChannelSpec, opts: &TeleportOptions) -> (usize, Vec<usize>) {
    let receiving = &channel.label_layout[1..];
    match opts.cutoff_override {
        Some(c) => (c, vec![c; receiving.len()]),
        None => (
            cutoff_for(channel_source_amplitude(channel.alpha, channel.parties).norm_sqr()),
            receiving.iter().map(|l| cutoff_for(l.norm_sqr())).collect(),
        ),
    }
}

/// The protocol on the truncated Fock engine.
pub fn teleport_branches_fock(
    input: &EcsSpec,
    channel: &ChannelSpec,
    opts: &TeleportOptions,
) -> Result<Vec<Branch<FockState>>> {
    check_compatible(input, channel)?;
    let parties = input.parties;
    let (cm, bob) = fock_cutoffs(channel, opts);
    let bob_size: usize = bob.iter().product();
    let largest = cm.pow(parties as u32).max(cm * cm * bob_size);
    if largest > FOCK_MAX_AMPLITUDES {
        return Err(Error::EngineUnsupported(format!(
            "the Fock run would need {largest} amplitudes (limit {FOCK_MAX_AMPLITUDES})"
        )));
    }

    let input_state = build_ecs(input)?;
    let (input_f, _) = input_state.to_fock(&vec![cm; parties])?;
    let last = parties - 1;
    let separated = (0..last)
        .rev()
        .try_fold(input_f.normalize()?, |s, k| s.apply_two_mode_bs(last, k, BeamSplitter::Balanced))?;
    let spare: Vec<(usize, usize)> = (0..last).map(|m| (m, 0)).collect();
    let merged = separated.project(&spare)?;
    let weight = merged.norm_sqr();
    if weight < 1.0 - 1e-6 {
        return Err(Error::ParityMismatch(format!("spare input modes kept only {weight} in vacuum")));
    }

    let mut channel_cutoffs = vec![cm];
    channel_cutoffs.extend_from_slice(&bob);
    let (channel_f, _) = build_channel(channel)?.to_fock(&channel_cutoffs)?;
    let full = merged
        .normalize()?
        .tensor(&channel_f.normalize()?)
        .apply_two_mode_bs(0, 1, BeamSplitter::Balanced)?;
    let (target, _) = input_state.to_fock(&bob)?;
    let target = target.normalize()?;

    let mut branches = Vec::new();
    for total in 0..=2 * (cm - 1) {
        for (n, m) in diagonal(total).filter(|&(n, m)| n < cm && m < cm) {
            let offset = (n * cm + m) * bob_size;
            let residual = FockState::new(bob.clone(), full.amplitudes()[offset..offset + bob_size].to_vec())?;
            let probability = residual.norm_sqr();
            if probability < FOCK_PROBABILITY_FLOOR {
                continue;
            }
            let (class, state) = apply_correction_and_classify(n, m, channel.sign, &residual)?;
            let fidelity = fidelity(&target, &state)?;
            branches.push(Branch { class, probability, fidelity, state });
        }
    }
    Ok(branches)
}

/// Teleports `input` through `channel` and summarizes every branch.
pub fn teleport_ecs(
    input: &EcsSpec,
    channel: &ChannelSpec,
    engine: Engine,
    opts: &TeleportOptions,
) -> Result<TeleportReport> {
    let params = ReportParams::Ecs { input: input.clone(), channel: channel.clone() };
    let reference = closed_form_reference(channel.sign, input.alpha, input.parties);
    match engine {
        Engine::Analytic => {
            let branches = teleport_branches(input, channel, opts)?;
            Ok(TeleportReport::from_branches(params, engine, &branches, reference))
        }
        Engine::Fock => {
            let branches = teleport_branches_fock(input, channel, opts)?;
            Ok(TeleportReport::from_branches(params, engine, &branches, reference))
        }
    }
}

/// Largest per-outcome probability difference between two reports, outcomes
/// missing from one side counting as zero.
pub fn max_probability_gap(a: &TeleportReport, b: &TeleportReport) -> f64 {
    let lookup = |r: &TeleportReport, n: usize, m: usize| {
        r.outcomes.iter().find(|o| o.n == n && o.m == m).map_or(0.0, |o| o.probability)
    };
    a.outcomes
        .iter()
        .chain(&b.outcomes)
        .map(|o| (lookup(a, o.n, o.m) - lookup(b, o.n, o.m)).abs())
        .fold((a.success_probability - b.success_probability).abs(), f64::max)
}
