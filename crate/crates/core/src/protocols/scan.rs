//! Parameter sweeps over real α, evaluated in parallel with input order kept.

use num_complex::Complex64;
use rayon::prelude::*;

use super::states::{build_channel, ChannelSpec, EcsSpec};
use super::teleport::{teleport_ecs, Engine, TeleportOptions};
use crate::analysis::{concurrence_pure, Bipartition, ChannelSign, ClosedFormCurve, PartitionKind};
use crate::error::Result;
use crate::fock::cutoff_for;

/// Bipartite teleportation success probability at each α of `grid`.
pub fn scan_success(
    sign: ChannelSign,
    eps_plus: Complex64,
    eps_minus: Complex64,
    grid: &[f64],
    engine: Engine,
    opts: &TeleportOptions,
) -> Result<ClosedFormCurve> {
    let values = grid
        .par_iter()
        .map(|&alpha| {
            let input = EcsSpec::new(eps_plus, eps_minus, Complex64::new(alpha, 0.0), 2)?;
            let channel = ChannelSpec::for_input(sign, &input)?;
            Ok(teleport_ecs(&input, &channel, engine, opts)?.success_probability)
        })
        .collect::<Result<Vec<f64>>>()?;
    ClosedFormCurve::new(format!("success_{sign}"), grid.to_vec(), clamp_unit(values))
}

/// Concurrence of the three-mode channel across `kind` at each α of `grid`.
pub fn scan_concurrence(
    sign: ChannelSign,
    kind: PartitionKind,
    grid: &[f64],
    engine: Engine,
) -> Result<ClosedFormCurve> {
    let partition = Bipartition::new(&[kind.mode()], 3)?;
    let values = grid
        .par_iter()
        .map(|&alpha| {
            let spec = ChannelSpec::new(sign, Complex64::new(alpha, 0.0), 3)?;
            let channel = build_channel(&spec)?;
            match engine {
                Engine::Analytic => concurrence_pure(&channel, &partition),
                Engine::Fock => {
                    let cutoffs: Vec<usize> = spec.label_layout.iter().map(|l| cutoff_for(l.norm_sqr())).collect();
                    let (fock, _) = channel.to_fock(&cutoffs)?;
                    concurrence_pure(&fock.normalize()?, &partition)
                }
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    ClosedFormCurve::new(format!("concurrence_{sign}_{kind}"), grid.to_vec(), values)
}

/// Rounding can push a summed probability a few ulps past 1.
fn clamp_unit(values: Vec<f64>) -> Vec<f64> {
    values.into_iter().map(|v| v.clamp(0.0, 1.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{alpha_grid, concurrence_closed_form};

    #[test]
    fn scans_keep_grid_order_and_engines_agree() {
        let grid = alpha_grid(0.2, 1.4, 0.3).unwrap();
        let exact = scan_concurrence(ChannelSign::Plus, PartitionKind::Second, &grid, Engine::Analytic).unwrap();
        let fock = scan_concurrence(ChannelSign::Plus, PartitionKind::Second, &grid, Engine::Fock).unwrap();
        assert_eq!(exact.alpha, grid);
        for ((&a, &x), &f) in grid.iter().zip(&exact.values).zip(&fock.values) {
            assert!((x - concurrence_closed_form(ChannelSign::Plus, PartitionKind::Second, a)).abs() < 1e-9);
            assert!((x - f).abs() < 1e-6);
        }
    }
}
