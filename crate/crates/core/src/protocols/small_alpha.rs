//! The α → 0 limit, where the channel becomes a single delocalized photon and
//! the input is a superposition of vacuum and a symmetric single photon.

use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

use super::states::{build_channel, ChannelSpec};
use super::teleport::{
    apply_correction_and_classify, Branch, Engine, ReportParams, TeleportReport, FOCK_PROBABILITY_FLOOR,
};
use crate::analysis::ChannelSign;
use crate::coherent::fock_amplitude;
use crate::error::{Error, Result};
use crate::fock::{cutoff_for, fidelity, BeamSplitter, FockState};

/// Per-mode cutoff for the five-mode simulation; two photons never meet.
pub const SMALL_ALPHA_CUTOFF: usize = 3;

/// `(|1⟩|00⟩ + |0⟩(|10⟩ + |01⟩)/√2)/√2` on three modes.
pub fn limit_channel(cutoff: usize) -> Result<FockState> {
    let dims = [cutoff; 3];
    let head = FockState::basis(&dims, &[1, 0, 0])?;
    let tail = FockState::basis(&dims, &[0, 1, 0])?.add(&FockState::basis(&dims, &[0, 0, 1])?)?.scaled(FRAC_1_SQRT_2.into());
    Ok(head.add(&tail)?.scaled(FRAC_1_SQRT_2.into()))
}

/// Normalized `a|00⟩ + b(|10⟩ + |01⟩)/√2`.
pub fn limit_input(a: Complex64, b: Complex64, cutoff: usize) -> Result<FockState> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidSpec("input amplitudes must be finite".into()));
    }
    let dims = [cutoff; 2];
    let vac = FockState::basis(&dims, &[0, 0])?.scaled(a);
    let psi = FockState::basis(&dims, &[1, 0])?.add(&FockState::basis(&dims, &[0, 1])?)?.scaled(b * FRAC_1_SQRT_2);
    vac.add(&psi)?.normalize()
}

/// Teleports `a|00⟩ + bΨ⁺` through the single-photon channel on the Fock engine.
pub fn small_alpha_teleport(a: Complex64, b: Complex64) -> Result<TeleportReport> {
    let branches = small_alpha_branches(a, b)?;
    Ok(TeleportReport::from_branches(ReportParams::SmallAlpha { a, b }, Engine::Fock, &branches, 0.5))
}

/// Every nonzero branch of [`small_alpha_teleport`], with Bob's corrected state.
pub fn small_alpha_branches(a: Complex64, b: Complex64) -> Result<Vec<Branch<FockState>>> {
    let c = SMALL_ALPHA_CUTOFF;
    let input = limit_input(a, b, c)?;
    // modes: 0,1 input; 2 Alice's channel mode; 3,4 Bob
    let full = input
        .tensor(&limit_channel(c)?)
        .apply_two_mode_bs(0, 1, BeamSplitter::Balanced)?
        .apply_two_mode_bs(0, 2, BeamSplitter::Balanced)?;
    let rest = full.project(&[(1, 0)])?;
    let weight = rest.norm_sqr();
    if (weight - 1.0).abs() > 1e-12 {
        return Err(Error::ParityMismatch(format!("second input mode kept only {weight} in vacuum")));
    }

    let mut branches: Vec<Branch<FockState>> = Vec::new();
    for n in 0..c {
        for m in 0..c {
            let residual = rest.project(&[(0, n), (1, m)])?;
            let probability = residual.norm_sqr();
            if probability < FOCK_PROBABILITY_FLOOR {
                continue;
            }
            let (class, state) = apply_correction_and_classify(n, m, ChannelSign::Minus, &residual)?;
            let fidelity = fidelity(&input, &state)?;
            branches.push(Branch { class, probability, fidelity, state });
        }
    }
    branches.sort_by_key(|b| (b.class.n + b.class.m, b.class.n));
    Ok(branches)
}

/// Fidelity between the three-mode minus channel at `alpha` and its α → 0 limit.
pub fn channel_limit_fidelity(alpha: f64) -> Result<f64> {
    let spec = ChannelSpec::new(ChannelSign::Minus, Complex64::new(alpha, 0.0), 3)?;
    let largest = spec.label_layout.iter().map(|l| l.norm_sqr()).fold(0.0, f64::max);
    let cutoff = cutoff_for(largest);
    let (channel, _) = build_channel(&spec)?.to_fock(&[cutoff; 3])?;
    fidelity(&channel.normalize()?, &limit_channel(cutoff)?)
}

/// [`channel_limit_fidelity`] from exact coherent-state Fock amplitudes, with
/// no truncation. The norm `‖|L⟩ − |−L⟩‖² = −2 expm1(−2Σ|l|²)` avoids the
/// cancellation a Gram sum suffers at small α.
pub fn channel_limit_fidelity_exact(alpha: f64) -> Result<f64> {
    let labels = ChannelSpec::new(ChannelSign::Minus, Complex64::new(alpha, 0.0), 3)?.label_layout;
    let norm_sqr = -2.0 * (-2.0 * labels.iter().map(|l| l.norm_sqr()).sum::<f64>()).exp_m1();
    if !(norm_sqr > 0.0) {
        return Err(Error::NearSingularState { norm_sqr, threshold: 0.0 });
    }
    // odd total photon number: the |−L⟩ branch doubles the |L⟩ branch
    let amplitude = |occ: &[usize]| -> Complex64 {
        2.0 * labels.iter().zip(occ).map(|(&l, &n)| fock_amplitude(l, n)).product::<Complex64>()
    };
    let overlap = (amplitude(&[1, 0, 0]) + (amplitude(&[0, 1, 0]) + amplitude(&[0, 0, 1])) * FRAC_1_SQRT_2) * FRAC_1_SQRT_2;
    Ok((overlap.norm_sqr() / norm_sqr).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::teleport::OutcomeKind;

    #[test]
    fn half_of_the_runs_succeed_with_unit_fidelity() {
        for (a, b) in [(1.0, 0.0), (0.0, 1.0), (0.6, 0.8), (0.3, -0.2)] {
            let r = small_alpha_teleport(Complex64::new(a, 0.0), Complex64::new(b, 0.3)).unwrap();
            assert!((r.success_probability - 0.5).abs() < 1e-12);
            assert!((r.total_probability() - 1.0).abs() < 1e-12);
            for o in r.outcomes.iter().filter(|o| o.kind.is_success()) {
                assert!((o.fidelity - 1.0).abs() < 1e-12);
            }
            let kinds: Vec<_> = r.outcomes.iter().filter(|o| o.kind.is_success()).map(|o| (o.n, o.m, o.kind)).collect();
            assert!(kinds.contains(&(1, 0, OutcomeKind::PerfectSuccess)));
            assert!(kinds.contains(&(0, 1, OutcomeKind::CorrectedSuccess)));
        }
    }

    fn bob(branches: &[Branch<FockState>], n: usize, m: usize) -> FockState {
        branches.iter().find(|b| (b.class.n, b.class.m) == (n, m)).unwrap().state.normalize().unwrap()
    }

    #[test]
    fn failure_branches_carry_the_expected_states() {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let c = SMALL_ALPHA_CUTOFF;

        let branches = small_alpha_branches(one, zero).unwrap();
        let vac = &branches.iter().find(|b| (b.class.n, b.class.m) == (0, 0)).unwrap();
        assert_eq!(vac.class.kind, OutcomeKind::Failure);
        let psi = limit_input(zero, one, c).unwrap();
        assert!((fidelity(&bob(&branches, 0, 0), &psi).unwrap() - 1.0).abs() < 1e-12);

        let branches = small_alpha_branches(zero, one).unwrap();
        let vacuum = FockState::vacuum(&[c, c]).unwrap();
        for (n, m) in [(2, 0), (0, 2)] {
            let branch = branches.iter().find(|b| (b.class.n, b.class.m) == (n, m)).unwrap();
            assert_eq!(branch.class.kind, OutcomeKind::Failure);
            assert!((fidelity(&bob(&branches, n, m), &vacuum).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_input_is_rejected() {
        assert!(matches!(small_alpha_teleport(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)), Err(Error::ZeroState)));
    }

    #[test]
    fn channel_approaches_its_limit_at_fourth_order() {
        for alpha in [0.05, 0.02, 0.01] {
            let f = channel_limit_fidelity(alpha).unwrap();
            let ratio = (1.0 - f) / alpha.powi(4);
            assert!((ratio - 8.0 / 3.0).abs() < 0.02, "alpha {alpha}: {ratio}");
        }
        assert!(channel_limit_fidelity(1e-3).unwrap() >= 0.999999);
    }

    #[test]
    fn truncated_and_exact_limit_fidelities_agree() {
        for alpha in [0.5, 0.1, 1e-3] {
            let f = channel_limit_fidelity(alpha).unwrap();
            let g = channel_limit_fidelity_exact(alpha).unwrap();
            assert!((f - g).abs() < 1e-12, "{alpha}: {f} {g}");
        }
    }
}
