//! One function per experiment. Each returns the rendered artifact.

use cat_teleport::analysis::AlphaGrid;
use cat_teleport::protocols::{
    build_cat, build_channel, channel_limit_fidelity, channel_limit_fidelity_exact, even_parity_probability,
    max_probability_gap, parity_oracle, prepare_channel_fock, prepare_channel_via_bs, scan_concurrence,
    scan_success, small_alpha_teleport, teleport_ecs, ChannelSpec, EcsSpec, Engine, ParityModel,
    TeleportOptions, TeleportReport,
};
use cat_teleport::protocols::parity::{AtomState, Parity};
use cat_teleport::report::{csv_float, curve_to_csv, reports_to_csv, to_json};
use cat_teleport::{
    concurrence_pure, cutoff_for, fidelity, Bipartition, ClosedFormCurve, CoherentSuperposition, Complex64,
    FockState,
};
use serde::Serialize;

use crate::config::{EngineChoice, Experiment, ExperimentConfig, Format};
use crate::Failure;

/// Largest difference the two engines may show in any compared quantity.
pub const AGREEMENT_TOL: f64 = 1e-6;

pub const MAX_PHOTONS_ENV: &str = "CAT_TELEPORT_MAX_PHOTONS";

const DEFAULT_GRID: &str = "0.1:3:0.1";

pub fn run(config: &ExperimentConfig) -> Result<String, Failure> {
    match config.experiment {
        Experiment::Teleport => teleport(config, config.parties.unwrap_or(2)),
        Experiment::TeleportTripartite => match config.parties {
            None | Some(3) => teleport(config, 3),
            Some(p) => Err(Failure::Usage(format!("teleport-tripartite has 3 parties, got --parties {p}"))),
        },
        Experiment::ChannelPrepare => channel_prepare(config),
        Experiment::ScanSuccess => scan(config, ScanKind::Success),
        Experiment::ScanConcurrence => scan(config, ScanKind::Concurrence),
        Experiment::LimitCheck => limit_check(config),
        Experiment::ParityDemo => parity_demo(config),
        Experiment::CrossValidate => cross_validate(config),
    }
}

fn engines(choice: EngineChoice) -> &'static [Engine] {
    match choice {
        EngineChoice::Analytic => &[Engine::Analytic],
        EngineChoice::Fock => &[Engine::Fock],
        EngineChoice::Both => &[Engine::Analytic, Engine::Fock],
    }
}

fn gate(what: &str, gap: f64) -> Result<(), Failure> {
    if gap > AGREEMENT_TOL {
        return Err(Failure::Numerical(format!(
            "engine disagreement: {what} differs by {gap:e} (tolerance {AGREEMENT_TOL:e})"
        )));
    }
    Ok(())
}

fn json_only(config: &ExperimentConfig) -> Result<(), Failure> {
    if config.format == Some(Format::Csv) {
        return Err(Failure::Usage(format!("{:?} has no CSV form", config.experiment)));
    }
    Ok(())
}

fn max_photons() -> Result<usize, Failure> {
    match std::env::var(MAX_PHOTONS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("{MAX_PHOTONS_ENV}={v:?} is not a photon count"))),
        Err(_) => Ok(cat_teleport::measurement::DEFAULT_MAX_PHOTONS),
    }
}

fn options(config: &ExperimentConfig) -> Result<TeleportOptions, Failure> {
    Ok(TeleportOptions {
        mass_tolerance: config.mass_tolerance,
        max_photons: max_photons()?,
        cutoff_override: config.cutoff_override,
    })
}

fn real_alpha(config: &ExperimentConfig, default: f64) -> Result<f64, Failure> {
    match config.alpha {
        None => Ok(default),
        Some(z) if z.im == 0.0 => Ok(z.re),
        Some(z) => Err(Failure::Usage(format!("{:?} takes a real alpha, got {z}", config.experiment))),
    }
}

fn alpha(config: &ExperimentConfig) -> Complex64 {
    config.alpha.unwrap_or(Complex64::new(1.0, 0.0))
}

#[derive(Serialize)]
struct EnginePair<'a, T: Serialize> {
    analytic: &'a T,
    fock: &'a T,
    max_gap: f64,
}

fn teleport(config: &ExperimentConfig, parties: usize) -> Result<String, Failure> {
    let input = EcsSpec::new(config.eps_plus, config.eps_minus, alpha(config), parties)?;
    let channel = ChannelSpec::for_input(config.channel_sign, &input)?;
    let opts = options(config)?;
    let mut reports: Vec<TeleportReport> = Vec::new();
    for &engine in engines(config.engine) {
        let report = teleport_ecs(&input, &channel, engine, &opts)?;
        reports.push(match (config.shots, config.seed) {
            (Some(shots), Some(seed)) => report.with_samples(shots, seed)?,
            _ => report,
        });
    }
    let gap = match reports.as_slice() {
        [a, f] => {
            let gap = max_probability_gap(a, f);
            gate("an outcome probability", gap)?;
            Some(gap)
        }
        _ => None,
    };
    Ok(match config.format.unwrap_or(Format::Json) {
        Format::Csv => reports_to_csv(&reports.iter().collect::<Vec<_>>()),
        Format::Json => match gap {
            Some(max_gap) => to_json(&EnginePair { analytic: &reports[0], fock: &reports[1], max_gap }, false)?,
            None => to_json(&reports[0], false)?,
        },
    })
}

#[derive(Serialize)]
struct ChannelRun {
    engine: Engine,
    /// Fidelity of the beam-splitter output to the target channel.
    fidelity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    cutoff: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    state: Option<CoherentSuperposition>,
}

#[derive(Serialize)]
struct ChannelReport {
    modes: usize,
    alpha: Complex64,
    runs: Vec<ChannelRun>,
}

fn channel_run(engine: Engine, alpha: Complex64, modes: usize, cutoff: Option<usize>) -> Result<ChannelRun, Failure> {
    let target = build_channel(&ChannelSpec::new(cat_teleport::ChannelSign::Minus, alpha, modes)?)?;
    match engine {
        Engine::Analytic => {
            let made = prepare_channel_via_bs(alpha, modes)?;
            let fidelity = made.overlap(&target)?.norm_sqr().min(1.0);
            Ok(ChannelRun { engine, fidelity, cutoff: None, state: Some(made) })
        }
        Engine::Fock => {
            let source = cat_teleport::protocols::states::channel_source_amplitude(alpha, modes);
            let cutoff = cutoff.unwrap_or_else(|| cutoff_for(source.norm_sqr()));
            let made = prepare_channel_fock(alpha, modes, cutoff)?;
            let (expected, _) = target.to_fock(&vec![cutoff; modes])?;
            let fidelity = fidelity(&made, &expected.normalize()?)?;
            Ok(ChannelRun { engine, fidelity, cutoff: Some(cutoff), state: None })
        }
    }
}

fn channel_prepare(config: &ExperimentConfig) -> Result<String, Failure> {
    json_only(config)?;
    let modes = config.parties.unwrap_or(3);
    let alpha = alpha(config);
    let runs = engines(config.engine)
        .iter()
        .map(|&e| channel_run(e, alpha, modes, config.cutoff_override))
        .collect::<Result<Vec<_>, _>>()?;
    if let [a, f] = runs.as_slice() {
        gate("the synthesis fidelity", (a.fidelity - f.fidelity).abs())?;
    }
    Ok(to_json(&ChannelReport { modes, alpha, runs }, false)?)
}

enum ScanKind {
    Success,
    Concurrence,
}

fn scan(config: &ExperimentConfig, kind: ScanKind) -> Result<String, Failure> {
    let AlphaGrid(grid) = config.alpha_grid.as_deref().unwrap_or(DEFAULT_GRID).parse()?;
    let opts = options(config)?;
    let curves = engines(config.engine)
        .iter()
        .map(|&engine| match kind {
            ScanKind::Success => {
                scan_success(config.channel_sign, config.eps_plus, config.eps_minus, &grid, engine, &opts)
            }
            ScanKind::Concurrence => scan_concurrence(config.channel_sign, config.partition, &grid, engine),
        })
        .collect::<Result<Vec<ClosedFormCurve>, _>>()?;
    let gap = match curves.as_slice() {
        [a, f] => {
            let gap = a.values.iter().zip(&f.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            gate("a curve value", gap)?;
            Some(gap)
        }
        _ => None,
    };
    Ok(match (config.format.unwrap_or(Format::Csv), gap) {
        (Format::Csv, None) => curve_to_csv(&curves[0]),
        (Format::Csv, Some(_)) => {
            let mut out = String::from("alpha,analytic,fock\n");
            for ((a, x), y) in grid.iter().zip(&curves[0].values).zip(&curves[1].values) {
                out.push_str(&format!("{},{},{}\n", csv_float(*a), csv_float(*x), csv_float(*y)));
            }
            out
        }
        (Format::Json, None) => to_json(&curves[0], false)?,
        (Format::Json, Some(max_gap)) => to_json(&EnginePair { analytic: &curves[0], fock: &curves[1], max_gap }, false)?,
    })
}

#[derive(Serialize)]
struct LimitReport {
    alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    channel_fidelity_analytic: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    channel_fidelity_fock: Option<f64>,
    teleport: TeleportReport,
}

fn limit_check(config: &ExperimentConfig) -> Result<String, Failure> {
    json_only(config)?;
    let alpha = real_alpha(config, 1e-3)?;
    let mut report = LimitReport {
        alpha,
        channel_fidelity_analytic: None,
        channel_fidelity_fock: None,
        teleport: small_alpha_teleport(config.a, config.b)?,
    };
    for &engine in engines(config.engine) {
        match engine {
            Engine::Analytic => report.channel_fidelity_analytic = Some(channel_limit_fidelity_exact(alpha)?),
            Engine::Fock => report.channel_fidelity_fock = Some(channel_limit_fidelity(alpha)?),
        }
    }
    if let (Some(a), Some(f)) = (report.channel_fidelity_analytic, report.channel_fidelity_fock) {
        gate("the limit-channel fidelity", (a - f).abs())?;
    }
    if let (Some(shots), Some(seed)) = (config.shots, config.seed) {
        report.teleport = report.teleport.with_samples(shots, seed)?;
    }
    Ok(to_json(&report, false)?)
}

#[derive(Serialize)]
struct Readout {
    parity: Parity,
    atom: AtomState,
}

#[derive(Serialize)]
struct ParityDistribution {
    alpha: Complex64,
    even_probability: f64,
    odd_probability: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    sampled: Option<Readout>,
}

fn readout(parity: Parity) -> Readout {
    let atom = match parity {
        Parity::Even => AtomState::Ground,
        Parity::Odd => AtomState::Excited,
    };
    Readout { parity, atom }
}

fn parity_demo(config: &ExperimentConfig) -> Result<String, Failure> {
    json_only(config)?;
    let model = ParityModel::canonical(1.0)?;
    if let Some(n) = config.n {
        let mut answers = Vec::new();
        for &engine in engines(config.engine) {
            answers.push(match engine {
                Engine::Analytic => if n % 2 == 0 { Parity::Even } else { Parity::Odd },
                Engine::Fock => {
                    let cutoff = config.cutoff_override.unwrap_or(n + 2);
                    if cutoff <= n {
                        return Err(Failure::Usage(format!("cutoff {cutoff} cannot hold {n} photons")));
                    }
                    let field = FockState::basis(&[cutoff], &[n])?;
                    let m = parity_oracle(&field, &model)?;
                    m.certain()
                        .map(|b| b.parity)
                        .ok_or_else(|| Failure::Numerical(format!("|{n}⟩ was not read with certainty")))?
                }
            });
        }
        if answers.windows(2).any(|w| w[0] != w[1]) {
            gate("the parity of a number state", 1.0)?;
        }
        return Ok(to_json(&readout(answers[0]), false)?);
    }

    let alpha = alpha(config);
    let cat = build_cat(config.eps_plus, config.eps_minus, alpha)?;
    let mut evens = Vec::new();
    let mut sampled = None;
    for &engine in engines(config.engine) {
        match engine {
            Engine::Analytic => evens.push(even_parity_probability(&cat)?),
            Engine::Fock => {
                let cutoff = config.cutoff_override.unwrap_or_else(|| cutoff_for(alpha.norm_sqr()));
                let (field, _) = cat.to_fock(&[cutoff])?;
                let m = parity_oracle(&field, &model)?;
                evens.push(m.even.probability);
                if let Some(seed) = config.seed {
                    sampled = Some(readout(m.sample_seeded(seed).parity));
                }
            }
        }
    }
    if let [a, f] = evens.as_slice() {
        gate("the even-parity probability", (a - f).abs())?;
    }
    let even_probability = evens[0];
    Ok(to_json(&ParityDistribution { alpha, even_probability, odd_probability: 1.0 - even_probability, sampled }, false)?)
}

#[derive(Serialize)]
struct CrossValidation {
    tolerance: f64,
    teleport_max_probability_gap: f64,
    channel_fidelity_gap: f64,
    concurrence_gap: f64,
}

fn cross_validate(config: &ExperimentConfig) -> Result<String, Failure> {
    json_only(config)?;
    let alpha = alpha(config);
    let parties = config.parties.unwrap_or(2);
    let input = EcsSpec::new(config.eps_plus, config.eps_minus, alpha, parties)?;
    let channel = ChannelSpec::for_input(config.channel_sign, &input)?;
    let opts = options(config)?;
    let exact = teleport_ecs(&input, &channel, Engine::Analytic, &opts)?;
    let fock = teleport_ecs(&input, &channel, Engine::Fock, &opts)?;
    let teleport_max_probability_gap = max_probability_gap(&exact, &fock);

    let a = channel_run(Engine::Analytic, alpha, 3, config.cutoff_override)?;
    let f = channel_run(Engine::Fock, alpha, 3, config.cutoff_override)?;
    let channel_fidelity_gap = (a.fidelity - f.fidelity).abs();

    let spec = ChannelSpec::new(config.channel_sign, alpha, 3)?;
    let state = build_channel(&spec)?;
    let partition = Bipartition::new(&[config.partition.mode()], 3)?;
    let cutoffs: Vec<usize> = spec.label_layout.iter().map(|l| cutoff_for(l.norm_sqr())).collect();
    let (fock_state, _) = state.to_fock(&cutoffs)?;
    let concurrence_gap =
        (concurrence_pure(&state, &partition)? - concurrence_pure(&fock_state.normalize()?, &partition)?).abs();

    gate("an outcome probability", teleport_max_probability_gap)?;
    gate("the synthesis fidelity", channel_fidelity_gap)?;
    gate("the channel concurrence", concurrence_gap)?;
    Ok(to_json(
        &CrossValidation { tolerance: AGREEMENT_TOL, teleport_max_probability_gap, channel_fidelity_gap, concurrence_gap },
        false,
    )?)
}
