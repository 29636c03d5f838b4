use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::ChannelSign;
use crate::coherent::CoherentSuperposition;
use crate::error::{Error, Result};
use super::teleport::FOCK_MAX_AMPLITUDES;
use crate::fock::{BeamSplitter, FockState};

/// `2^{k/2}` with the √2 factor applied at most once.
fn half_power_of_two(k: usize) -> f64 {
    let whole = 2f64.powi((k / 2) as i32);
    if k % 2 == 1 {
        whole * SQRT_2
    } else {
        whole
    }
}

/// Labels of a `modes`-mode channel built by splitting one cat down a chain of
/// balanced beam splitters: `(2^{(modes−2)/2}α, ..., √2α, α, α)`.
pub fn channel_layout(alpha: Complex64, modes: usize) -> Vec<Complex64> {
    (0..modes)
        .map(|k| if k + 1 == modes { alpha } else { alpha * half_power_of_two(modes - 2 - k) })
        .collect()
}

/// Labels of an `parties`-party input: the channel layout without its first mode,
/// e.g. `(α, α)` for two parties and `(√2α, α, α)` for three.
pub fn input_layout(alpha: Complex64, parties: usize) -> Vec<Complex64> {
    channel_layout(alpha, parties + 1).split_off(1)
}

/// Amplitude of the odd cat that a `modes`-mode channel is split from.
pub fn channel_source_amplitude(alpha: Complex64, modes: usize) -> Complex64 {
    alpha * half_power_of_two(modes - 1)
}

fn finite(z: Complex64, what: &str) -> Result<()> {
    if !z.is_finite() {
        return Err(Error::InvalidSpec(format!("{what} is not finite")));
    }
    Ok(())
}

/// Parametric entangled coherent state `ε₊|labels⟩ + ε₋|−labels⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcsSpec {
    pub eps_plus: Complex64,
    pub eps_minus: Complex64,
    pub alpha: Complex64,
    pub parties: usize,
    pub label_layout: Vec<Complex64>,
}

impl EcsSpec {
    pub fn new(eps_plus: Complex64, eps_minus: Complex64, alpha: Complex64, parties: usize) -> Result<Self> {
        if parties == 0 {
            return Err(Error::InvalidSpec("an input state needs at least one party".into()));
        }
        Self { eps_plus, eps_minus, alpha, parties, label_layout: input_layout(alpha, parties) }.validated()
    }

    pub fn with_layout(mut self, layout: Vec<Complex64>) -> Result<Self> {
        self.label_layout = layout;
        self.validated()
    }

    fn validated(self) -> Result<Self> {
        finite(self.eps_plus, "eps_plus")?;
        finite(self.eps_minus, "eps_minus")?;
        finite(self.alpha, "alpha")?;
        if self.eps_plus.norm() == 0.0 && self.eps_minus.norm() == 0.0 {
            return Err(Error::InvalidSpec("eps_plus and eps_minus are both zero".into()));
        }
        if self.label_layout.len() != self.parties {
            return Err(Error::MismatchedModeCount { expected: self.parties, found: self.label_layout.len() });
        }
        Ok(self)
    }
}

/// Parametric channel `|labels⟩ ± |−labels⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub sign: ChannelSign,
    pub alpha: Complex64,
    pub parties: usize,
    pub label_layout: Vec<Complex64>,
}

impl ChannelSpec {
    pub fn new(sign: ChannelSign, alpha: Complex64, parties: usize) -> Result<Self> {
        if parties < 3 {
            return Err(Error::InvalidSpec(format!("a channel needs at least 3 modes, got {parties}")));
        }
        finite(alpha, "alpha")?;
        Ok(Self { sign, alpha, parties, label_layout: channel_layout(alpha, parties) })
    }

    /// The channel that carries an input of `spec.parties` parties.
    pub fn for_input(sign: ChannelSign, spec: &EcsSpec) -> Result<Self> {
        Self::new(sign, spec.alpha, spec.parties + 1)
    }

    pub fn with_layout(mut self, layout: Vec<Complex64>) -> Result<Self> {
        if layout.len() != self.parties {
            return Err(Error::MismatchedModeCount { expected: self.parties, found: layout.len() });
        }
        self.label_layout = layout;
        Ok(self)
    }
}

fn two_branch(plus: Complex64, minus: Complex64, labels: &[Complex64]) -> Result<CoherentSuperposition> {
    let negated = labels.iter().map(|l| -l).collect();
    CoherentSuperposition::new(labels.len(), vec![(plus, labels.to_vec()), (minus, negated)])?.normalize()
}

/// Normalized single-mode cat `𝒩(ε₊|α⟩ + ε₋|−α⟩)`.
pub fn build_cat(eps_plus: Complex64, eps_minus: Complex64, alpha: Complex64) -> Result<CoherentSuperposition> {
    two_branch(eps_plus, eps_minus, &[alpha])
}

/// Normalized `𝒩_Φ(ε₊|labels⟩ + ε₋|−labels⟩)`.
pub fn build_ecs(spec: &EcsSpec) -> Result<CoherentSuperposition> {
    two_branch(spec.eps_plus, spec.eps_minus, &spec.label_layout)
}

pub fn build_channel(spec: &ChannelSpec) -> Result<CoherentSuperposition> {
    let one = Complex64::new(1.0, 0.0);
    two_branch(one, one * spec.sign.factor(), &spec.label_layout)
}

/// Synthesizes the minus channel from an odd cat on the first mode and vacuum
/// elsewhere, splitting down the chain ℬ_{k,k+1} (first splitter applied first).
pub fn prepare_channel_via_bs(alpha: Complex64, modes: usize) -> Result<CoherentSuperposition> {
    if modes < 2 {
        return Err(Error::InvalidSpec(format!("channel preparation needs at least 2 modes, got {modes}")));
    }
    let source = build_cat(Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0), channel_source_amplitude(alpha, modes))?;
    let mut state = source.tensor(&CoherentSuperposition::vacuum(modes - 1)?);
    for k in 0..modes - 1 {
        state = state.balanced_bs(k, k + 1)?;
    }
    Ok(state)
}

/// The same cascade run on the Fock engine, every mode at `cutoff`.
pub fn prepare_channel_fock(alpha: Complex64, modes: usize, cutoff: usize) -> Result<FockState> {
    if modes < 2 {
        return Err(Error::InvalidSpec(format!("channel preparation needs at least 2 modes, got {modes}")));
    }
    let size = (cutoff as u128).pow(modes as u32);
    if size > FOCK_MAX_AMPLITUDES as u128 {
        return Err(Error::EngineUnsupported(format!(
            "{modes} modes at cutoff {cutoff} exceed {FOCK_MAX_AMPLITUDES} amplitudes"
        )));
    }
    let source = channel_source_amplitude(alpha, modes);
    let (plus, _) = FockState::coherent(source, cutoff)?;
    let (minus, _) = FockState::coherent(-source, cutoff)?;
    let cat = plus.add(&minus.scaled(Complex64::new(-1.0, 0.0)))?.normalize()?;
    let mut state = cat.tensor(&FockState::vacuum(&vec![cutoff; modes - 1])?);
    for k in 0..modes - 1 {
        state = state.apply_two_mode_bs(k, k + 1, BeamSplitter::Balanced)?;
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn layouts_follow_the_splitting_chain() {
        let a = Complex64::new(0.7, 0.2);
        assert_eq!(input_layout(a, 2), vec![a, a]);
        assert_eq!(input_layout(a, 3), vec![a * SQRT_2, a, a]);
        assert_eq!(channel_layout(a, 3), vec![a * SQRT_2, a, a]);
        assert_eq!(channel_layout(a, 4), vec![a * 2.0, a * SQRT_2, a, a]);
        assert_eq!(channel_source_amplitude(a, 3), a * 2.0);
        assert_eq!(channel_source_amplitude(a, 4), a * 2.0 * SQRT_2);
    }

    #[test]
    fn cat_cases() {
        let alpha = c(1.0);
        let even = build_cat(c(1.0), c(1.0), alpha).unwrap();
        let raw = CoherentSuperposition::new(1, vec![(c(1.0), vec![alpha]), (c(1.0), vec![-alpha])]).unwrap();
        let expected = 1.0 / (2.0 * (1.0 + (-2.0f64).exp())).sqrt();
        assert!((even.overlap(&raw).unwrap().re - 2.0 * expected * (1.0 + (-2.0f64).exp())).abs() < 1e-12);

        let odd = build_cat(c(1.0), c(-1.0), alpha).unwrap();
        assert!((odd.norm_sqr() - 1.0).abs() < 1e-12);

        let coherent = build_cat(c(1.0), c(0.0), alpha).unwrap();
        assert!((coherent.overlap(&CoherentSuperposition::product(&[alpha]).unwrap()).unwrap().norm() - 1.0).abs() < 1e-14);

        assert!(matches!(build_cat(c(1.0), c(-1.0), c(0.0)), Err(Error::NearSingularState { .. })));
    }

    #[test]
    fn ecs_cases() {
        let spec = EcsSpec::new(c(1.0), c(0.0), c(1.0), 2).unwrap();
        let s = build_ecs(&spec).unwrap();
        let product = CoherentSuperposition::product(&[c(1.0), c(1.0)]).unwrap();
        assert!((s.overlap(&product).unwrap().norm() - 1.0).abs() < 1e-14);

        let alpha = 0.6;
        let raw = CoherentSuperposition::new(2, vec![(c(1.0), vec![c(alpha); 2]), (c(1.0), vec![c(-alpha); 2])]).unwrap();
        assert!((raw.norm_sqr() - (2.0 + 2.0 * (-4.0 * alpha * alpha).exp())).abs() < 1e-14);

        let tri = build_ecs(&EcsSpec::new(c(1.0), c(-1.0), c(0.9), 3).unwrap()).unwrap();
        let chan = build_channel(&ChannelSpec::new(ChannelSign::Minus, c(0.9), 3).unwrap()).unwrap();
        assert!((tri.overlap(&chan).unwrap().norm() - 1.0).abs() < 1e-12);

        assert!(EcsSpec::new(c(0.0), c(0.0), c(1.0), 2).is_err());
        assert!(EcsSpec::new(c(1.0), c(0.0), c(1.0), 0).is_err());
        assert!(spec.with_layout(vec![c(1.0)]).is_err());
        assert!(ChannelSpec::new(ChannelSign::Plus, c(1.0), 2).is_err());
    }

    #[test]
    fn bs_chain_reproduces_channels() {
        for modes in [3, 4, 5] {
            for alpha in [0.5, 1.0, 2.0] {
                let built = build_channel(&ChannelSpec::new(ChannelSign::Minus, c(alpha), modes).unwrap()).unwrap();
                let made = prepare_channel_via_bs(c(alpha), modes).unwrap();
                assert!((made.overlap(&built).unwrap().norm() - 1.0).abs() < 1e-10);
            }
        }
        assert!(matches!(prepare_channel_via_bs(c(0.0), 3), Err(Error::NearSingularState { .. })));
    }

    #[test]
    fn channel_splits_into_cat_pairs() {
        let alpha = c(0.8);
        let one = c(1.0);
        let pair = |sign: f64| two_branch(one, c(sign), &[alpha, alpha]).unwrap();
        let first = build_cat(one, -one, alpha * SQRT_2).unwrap().tensor(&pair(1.0));
        let second = build_cat(one, one, alpha * SQRT_2).unwrap().tensor(&pair(-1.0));
        let terms = first
            .terms()
            .iter()
            .chain(second.terms())
            .map(|t| (t.coeff / SQRT_2, t.labels.clone()))
            .collect();
        let decomposed = CoherentSuperposition::new(3, terms).unwrap();
        let channel = build_channel(&ChannelSpec::new(ChannelSign::Minus, alpha, 3).unwrap()).unwrap();
        assert!((channel.overlap(&decomposed).unwrap().norm() - 1.0).abs() < 1e-10);
    }
}
