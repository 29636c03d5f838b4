//! Entanglement of pure bipartitions and the closed-form probabilities and
//! concurrences of the teleportation channels.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coherent::{coherent_overlap, CoherentSuperposition, CoherentTerm, LABEL_MERGE_TOL};
use crate::error::{Error, Result};
use crate::fock::FockState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelSign {
    Plus,
    Minus,
}

impl ChannelSign {
    pub fn factor(self) -> f64 {
        match self {
            ChannelSign::Plus => 1.0,
            ChannelSign::Minus => -1.0,
        }
    }
}

impl fmt::Display for ChannelSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChannelSign::Plus => "plus",
            ChannelSign::Minus => "minus",
        })
    }
}

impl std::str::FromStr for ChannelSign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(ChannelSign::Plus),
            "minus" | "-" => Ok(ChannelSign::Minus),
            other => Err(Error::InvalidSpec(format!("unknown channel sign {other:?}"))),
        }
    }
}

/// Split of a state's modes into two complementary nonempty sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    side_a: Vec<usize>,
    side_b: Vec<usize>,
}

impl Bipartition {
    /// `side_a` against every other mode of a `modes`-mode state.
    pub fn new(side_a: &[usize], modes: usize) -> Result<Self> {
        let mut a = side_a.to_vec();
        a.sort_unstable();
        a.dedup();
        if let Some(&bad) = a.iter().find(|&&m| m >= modes) {
            return Err(Error::BadModeIndex { mode: bad, modes });
        }
        if a.is_empty() || a.len() == modes {
            return Err(Error::InvalidSpec("bipartition sides must both be nonempty".into()));
        }
        let b = (0..modes).filter(|m| !a.contains(m)).collect();
        Ok(Self { side_a: a, side_b: b })
    }

    pub fn side_a(&self) -> &[usize] {
        &self.side_a
    }

    pub fn side_b(&self) -> &[usize] {
        &self.side_b
    }

    pub fn swapped(&self) -> Self {
        Self { side_a: self.side_b.clone(), side_b: self.side_a.clone() }
    }

    pub fn modes(&self) -> usize {
        self.side_a.len() + self.side_b.len()
    }
}

/// Pure states whose reduced purity can be computed.
pub trait PureState {
    fn mode_count(&self) -> usize;
    fn squared_norm(&self) -> f64;
    /// `Tr ρ_A²` for the reduced state on `side`.
    fn reduced_purity(&self, side: &[usize]) -> Result<f64>;
}

impl PureState for FockState {
    fn mode_count(&self) -> usize {
        self.modes()
    }

    fn squared_norm(&self) -> f64 {
        self.norm_sqr()
    }

    fn reduced_purity(&self, side: &[usize]) -> Result<f64> {
        Ok(self.partial_trace(side)?.purity())
    }
}

impl PureState for CoherentSuperposition {
    fn mode_count(&self) -> usize {
        self.modes()
    }

    fn squared_norm(&self) -> f64 {
        self.norm_sqr()
    }

    /// Works directly in the nonorthogonal product bases of the two sides:
    /// with `|ψ⟩ = Σ C_ij |a_i⟩|b_j⟩` and Gram matrices `G_A`, `G_B`,
    /// `ρ_A = Σ M_ik |a_i⟩⟨a_k|` where `M = C G_Bᵀ C†`, and
    /// `Tr ρ_A² = Tr (M G_A)²` with `(G_A)_ki = ⟨a_k|a_i⟩`.
    fn reduced_purity(&self, side: &[usize]) -> Result<f64> {
        let part = Bipartition::new(side, self.modes())?;
        let (a_kets, b_kets, coeffs) = split_kets(self.terms(), part.side_a(), part.side_b());
        let gram = |kets: &[Vec<Complex64>]| {
            DMatrix::from_fn(kets.len(), kets.len(), |k, i| {
                kets[k].iter().zip(&kets[i]).map(|(&x, &y)| coherent_overlap(x, y)).product::<Complex64>()
            })
        };
        let ga = gram(&a_kets);
        let gb = gram(&b_kets);
        let m = &coeffs * gb.transpose() * coeffs.adjoint();
        let mg = m * ga;
        let trace = mg.trace().re;
        if trace <= 0.0 {
            return Err(Error::ZeroState);
        }
        Ok((&mg * &mg).trace().re / (trace * trace))
    }
}

fn find_or_push(kets: &mut Vec<Vec<Complex64>>, ket: Vec<Complex64>) -> usize {
    let same = |x: &Vec<Complex64>| {
        x.iter().zip(&ket).all(|(p, q)| (p.re - q.re).abs() <= LABEL_MERGE_TOL && (p.im - q.im).abs() <= LABEL_MERGE_TOL)
    };
    match kets.iter().position(same) {
        Some(i) => i,
        None => {
            kets.push(ket);
            kets.len() - 1
        }
    }
}

fn split_kets(
    terms: &[CoherentTerm],
    side_a: &[usize],
    side_b: &[usize],
) -> (Vec<Vec<Complex64>>, Vec<Vec<Complex64>>, DMatrix<Complex64>) {
    let mut a_kets = Vec::new();
    let mut b_kets = Vec::new();
    let mut entries = Vec::with_capacity(terms.len());
    for t in terms {
        let i = find_or_push(&mut a_kets, side_a.iter().map(|&m| t.labels[m]).collect());
        let j = find_or_push(&mut b_kets, side_b.iter().map(|&m| t.labels[m]).collect());
        entries.push((i, j, t.coeff));
    }
    let mut c = DMatrix::<Complex64>::zeros(a_kets.len(), b_kets.len());
    for (i, j, coeff) in entries {
        c[(i, j)] += coeff;
    }
    (a_kets, b_kets, c)
}

/// Pure-state concurrence `√(2(1 − Tr ρ_A²))` across `partition`.
pub fn concurrence_pure<S: PureState>(state: &S, partition: &Bipartition) -> Result<f64> {
    if partition.modes() != state.mode_count() {
        return Err(Error::MismatchedModeCount { expected: state.mode_count(), found: partition.modes() });
    }
    let norm_sqr = state.squared_norm();
    if (norm_sqr - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized { norm_sqr });
    }
    let purity = state.reduced_purity(partition.side_a())?;
    Ok((2.0 * (1.0 - purity)).max(0.0).sqrt().min(1.0))
}

/// Which mode of a tripartite channel `|√2α; α; α⟩±` is cut from the other two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartitionKind {
    /// 3 | (45)
    #[serde(rename = "3(45)")]
    First,
    /// 4 | (35)
    #[serde(rename = "4(35)")]
    Second,
    /// 5 | (34)
    #[serde(rename = "5(34)")]
    Third,
}

impl PartitionKind {
    pub fn mode(self) -> usize {
        match self {
            PartitionKind::First => 0,
            PartitionKind::Second => 1,
            PartitionKind::Third => 2,
        }
    }
}

impl fmt::Display for PartitionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PartitionKind::First => "3(45)",
            PartitionKind::Second => "4(35)",
            PartitionKind::Third => "5(34)",
        })
    }
}

impl std::str::FromStr for PartitionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "3(45)" | "3" => Ok(PartitionKind::First),
            "4(35)" | "4" => Ok(PartitionKind::Second),
            "5(34)" | "5" => Ok(PartitionKind::Third),
            other => Err(Error::InvalidSpec(format!("unknown partition {other:?}"))),
        }
    }
}

/// Closed-form concurrences of the tripartite channels.
pub fn concurrence_closed_form(sign: ChannelSign, kind: PartitionKind, alpha: f64) -> f64 {
    let a2 = alpha * alpha;
    match (sign, kind) {
        (ChannelSign::Minus, PartitionKind::First) => 1.0,
        (ChannelSign::Plus, PartitionKind::First) => (4.0 * a2).tanh(),
        // the minus channel tends to a single-photon W-like state with C = √3/2
        (ChannelSign::Minus, _) if a2 == 0.0 => 0.75f64.sqrt(),
        (_, _) => {
            let num = ((-4.0 * a2).exp_m1() * (-12.0 * a2).exp_m1()).sqrt();
            let den = match sign {
                ChannelSign::Plus => 1.0 + (-8.0 * a2).exp(),
                ChannelSign::Minus => -(-8.0 * a2).exp_m1(),
            };
            num / den
        }
    }
}

/// Success probability of the bipartite protocol: exactly 1/2 on the minus
/// channel, `(1 − e^{−4α²})² / (2(1 + e^{−8α²}))` on the plus channel.
pub fn success_prob_closed_form(sign: ChannelSign, alpha: f64) -> f64 {
    match sign {
        ChannelSign::Minus => 0.5,
        ChannelSign::Plus => {
            let a2 = alpha * alpha;
            let gap = -(-4.0 * a2).exp_m1();
            gap * gap / (2.0 * (1.0 + (-8.0 * a2).exp()))
        }
    }
}

/// A named curve over an α grid, written as CSV `alpha,value`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedFormCurve {
    pub name: String,
    pub alpha: Vec<f64>,
    pub values: Vec<f64>,
}

impl ClosedFormCurve {
    pub fn new(name: impl Into<String>, alpha: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if alpha.len() != values.len() {
            return Err(Error::InvalidSpec("curve grid and values differ in length".into()));
        }
        if let Some(v) = values.iter().find(|v| !(-1e-12..=1.0 + 1e-12).contains(*v)) {
            return Err(Error::InvalidSpec(format!("curve value {v} outside [0, 1]")));
        }
        Ok(Self { name: name.into(), alpha, values })
    }

    pub fn from_fn(name: impl Into<String>, alpha: &[f64], f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(name, alpha.to_vec(), alpha.iter().map(|&a| f(a)).collect())
    }
}

/// `start:stop:step` grid including `stop` when it lies within half a step of
/// the last point.
pub fn alpha_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(Error::InvalidSpec(format!("bad grid {start}:{stop}:{step}")));
    }
    let count = ((stop - start) / step + 0.5).floor() as usize;
    Ok((0..=count).map(|k| start + k as f64 * step).collect())
}

impl std::str::FromStr for AlphaGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let parse = |p: &str| p.trim().parse::<f64>().map_err(|_| Error::InvalidSpec(format!("bad grid {s:?}")));
        match parts.as_slice() {
            [a, b, c] => Ok(AlphaGrid(alpha_grid(parse(a)?, parse(b)?, parse(c)?)?)),
            _ => Err(Error::InvalidSpec(format!("grid must be start:stop:step, got {s:?}"))),
        }
    }
}

/// Parsed `start:stop:step` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaGrid(pub Vec<f64>);
