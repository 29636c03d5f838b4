//! Photon-number parity read out by a dispersively coupled two-level atom.
//!
//! Each Fock level `n` rotates the atom by `g·t·n` about σx. At `g·t = π/2`
//! the atom ends in its ground state exactly on even levels and in its
//! excited state exactly on odd ones. The deterministic field rotation
//! `e^{iπa†a/2}` that accompanies the readout is undone, so the posterior of
//! each branch is the plain parity projection of the input.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::coherent::CoherentSuperposition;
use crate::error::{Error, Result};
use crate::fock::FockState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParityModel {
    pub coupling: f64,
    pub time: f64,
}

impl ParityModel {
    /// Interaction time that makes the readout exact for `coupling`.
    pub fn canonical(coupling: f64) -> Result<Self> {
        Self::new(coupling, FRAC_PI_2 / coupling)
    }

    pub fn new(coupling: f64, time: f64) -> Result<Self> {
        if !(coupling.is_finite() && coupling > 0.0 && time.is_finite()) {
            return Err(Error::InvalidSpec(format!("coupling {coupling} and time {time} must be finite, coupling > 0")));
        }
        if ((coupling * time) - FRAC_PI_2).abs() > 1e-12 {
            return Err(Error::InvalidSpec(format!("g·t = {} is not π/2", coupling * time)));
        }
        Ok(Self { coupling, time })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AtomState {
    Ground,
    Excited,
}

#[derive(Debug, Clone)]
pub struct ParityBranch {
    pub parity: Parity,
    pub atom: AtomState,
    pub probability: f64,
    /// `None` when the branch has zero weight.
    pub posterior: Option<FockState>,
}

#[derive(Debug, Clone)]
pub struct ParityMeasurement {
    pub even: ParityBranch,
    pub odd: ParityBranch,
}

impl ParityMeasurement {
    /// The branch that occurs with certainty, if any.
    pub fn certain(&self) -> Option<&ParityBranch> {
        [&self.even, &self.odd].into_iter().find(|b| b.probability >= 1.0 - 1e-12)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &ParityBranch {
        if rng.random::<f64>() < self.even.probability {
            &self.even
        } else {
            &self.odd
        }
    }

    /// One reproducible draw from a ChaCha8 stream seeded with `seed`.
    pub fn sample_seeded(&self, seed: u64) -> &ParityBranch {
        self.sample(&mut ChaCha8Rng::seed_from_u64(seed))
    }
}

/// Couples the single-mode `field` to a ground-state atom and reads the atom.
pub fn parity_oracle(field: &FockState, model: &ParityModel) -> Result<ParityMeasurement> {
    if field.modes() != 1 {
        return Err(Error::MismatchedModeCount { expected: 1, found: field.modes() });
    }
    let cutoff = field.cutoffs()[0];
    if cutoff < 2 {
        return Err(Error::CutoffTooSmall { retained: cutoff as f64, required: 2.0 });
    }
    let field = field.normalize()?;
    let theta = model.coupling * model.time;
    let mut ground = Vec::with_capacity(cutoff);
    let mut excited = Vec::with_capacity(cutoff);
    for (n, &c) in field.amplitudes().iter().enumerate() {
        let angle = theta * n as f64;
        let undo = Complex64::from_polar(1.0, -angle);
        ground.push(undo * angle.cos() * c);
        excited.push(-undo * Complex64::new(0.0, -angle.sin()) * c);
    }
    let branch = |amps: Vec<Complex64>, parity, atom| -> Result<ParityBranch> {
        let state = FockState::new(vec![cutoff], amps)?;
        let probability = state.norm_sqr();
        let posterior = if probability > 0.0 { Some(state.normalize()?) } else { None };
        Ok(ParityBranch { parity, atom, probability, posterior })
    };
    Ok(ParityMeasurement {
        even: branch(ground, Parity::Even, AtomState::Ground)?,
        odd: branch(excited, Parity::Odd, AtomState::Excited)?,
    })
}

/// Even-parity probability `(1 + ⟨ψ|(−1)^{a†a}|ψ⟩)/2` of a single-mode
/// coherent superposition, without truncation.
pub fn even_parity_probability(state: &CoherentSuperposition) -> Result<f64> {
    if state.modes() != 1 {
        return Err(Error::MismatchedModeCount { expected: 1, found: state.modes() });
    }
    let state = state.normalize()?;
    let flipped = state.phase_shift(0, PI)?;
    Ok(((1.0 + state.overlap(&flipped)?.re) / 2.0).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> ParityModel {
        ParityModel::canonical(2.5).unwrap()
    }

    #[test]
    fn number_states_are_read_with_certainty() {
        for n in 0..8 {
            let m = parity_oracle(&FockState::basis(&[10], &[n]).unwrap(), &model()).unwrap();
            let b = m.certain().unwrap();
            let expected = if n % 2 == 0 { (Parity::Even, AtomState::Ground) } else { (Parity::Odd, AtomState::Excited) };
            assert_eq!((b.parity, b.atom), expected);
            assert!(b.probability == 1.0 || (b.probability - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn posteriors_are_parity_projections() {
        let (field, _) = FockState::coherent(Complex64::new(0.8, 0.5), 30).unwrap();
        let field = field.normalize().unwrap();
        let m = parity_oracle(&field, &model()).unwrap();
        assert!((m.even.probability + m.odd.probability - 1.0).abs() < 1e-12);
        let amps = field.amplitudes();
        let even_proj: Vec<Complex64> =
            amps.iter().enumerate().map(|(n, &c)| if n % 2 == 0 { c } else { Complex64::new(0.0, 0.0) }).collect();
        let expected = FockState::new(vec![30], even_proj).unwrap();
        assert!((m.even.probability - expected.norm_sqr()).abs() < 1e-12);
        let overlap = expected.normalize().unwrap().inner(m.even.posterior.as_ref().unwrap()).unwrap();
        assert!((overlap - Complex64::new(1.0, 0.0)).norm() < 1e-12);

        let odd_proj: Vec<Complex64> =
            amps.iter().enumerate().map(|(n, &c)| if n % 2 == 1 { c } else { Complex64::new(0.0, 0.0) }).collect();
        let expected = FockState::new(vec![30], odd_proj).unwrap().normalize().unwrap();
        let overlap = expected.inner(m.odd.posterior.as_ref().unwrap()).unwrap();
        assert!((overlap - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn sampling_follows_the_branch_weights() {
        let (field, _) = FockState::coherent(Complex64::new(0.6, 0.0), 20).unwrap();
        let m = parity_oracle(&field, &model()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let evens = (0..20000).filter(|_| m.sample(&mut rng).parity == Parity::Even).count();
        assert!((evens as f64 / 20000.0 - m.even.probability).abs() < 0.02);
    }

    #[test]
    fn exact_parity_matches_the_oracle() {
        let alpha = Complex64::new(0.9, -0.4);
        let cat = crate::protocols::states::build_cat(Complex64::new(1.0, 0.0), Complex64::new(0.3, 0.2), alpha).unwrap();
        let (field, _) = cat.to_fock(&[40]).unwrap();
        let m = parity_oracle(&field, &model()).unwrap();
        assert!((even_parity_probability(&cat).unwrap() - m.even.probability).abs() < 1e-12);

        let even = crate::protocols::states::build_cat(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), alpha).unwrap();
        assert!((even_parity_probability(&even).unwrap() - 1.0).abs() < 1e-12);
        let (field, _) = even.to_fock(&[40]).unwrap();
        let m = parity_oracle(&field, &model()).unwrap();
        let posterior = m.certain().unwrap().posterior.as_ref().unwrap();
        assert!((crate::fock::fidelity(posterior, &field.normalize().unwrap()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_inputs() {
        assert!(ParityModel::new(1.0, 1.0).is_err());
        assert!(ParityModel::canonical(0.0).is_err());
        let tiny = FockState::vacuum(&[1]).unwrap();
        assert!(matches!(parity_oracle(&tiny, &model()), Err(Error::CutoffTooSmall { .. })));
        let two = FockState::vacuum(&[3, 3]).unwrap();
        assert!(matches!(parity_oracle(&two, &model()), Err(Error::MismatchedModeCount { .. })));
    }
}
