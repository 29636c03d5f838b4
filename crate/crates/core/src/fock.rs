//! Dense truncated Fock-space engine.
//!
//! Amplitudes are stored row-major over the per-mode photon-number cutoffs, the
//! last mode varying fastest. Beam splitters act block by block on the fixed
//! total photon number of the two modes involved, so they stay exactly unitary
//! whatever the cutoff.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::coherent::{advance, fock_amplitude};
use crate::error::{Error, Result};

/// Per-mode cutoff that keeps the Poisson tail of a coherent state with mean
/// photon number `mean` below ~1e-9 for the amplitudes used here.
pub fn cutoff_for(mean: f64) -> usize {
    let mu = mean.max(0.0);
    (mu + 6.0 * mu.sqrt() + 10.0).ceil() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeamSplitter {
    /// `exp(iπ/4 (a_i†a_j + a_j†a_i))`
    Raw,
    /// Raw splitter dressed with `e^{-iπ n_j/2}` on both sides.
    Balanced,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    cutoffs: Vec<usize>,
    amps: Vec<Complex64>,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl FockState {
    pub fn new(cutoffs: Vec<usize>, amps: Vec<Complex64>) -> Result<Self> {
        if cutoffs.contains(&0) {
            return Err(Error::CutoffTooSmall { retained: 0.0, required: 1.0 });
        }
        let size: usize = cutoffs.iter().product();
        if amps.len() != size {
            return Err(Error::CutoffMismatch(format!(
                "{} amplitudes for cutoffs {:?} (expected {size})",
                amps.len(),
                cutoffs
            )));
        }
        Ok(Self { cutoffs, amps })
    }

    /// Fock basis state with the given occupation numbers.
    pub fn basis(cutoffs: &[usize], occupation: &[usize]) -> Result<Self> {
        if occupation.len() != cutoffs.len() {
            return Err(Error::MismatchedModeCount { expected: cutoffs.len(), found: occupation.len() });
        }
        if let Some(k) = occupation.iter().zip(cutoffs).position(|(n, c)| n >= c) {
            return Err(Error::CutoffTooSmall { retained: 0.0, required: (occupation[k] + 1) as f64 });
        }
        let mut s = Self::new(cutoffs.to_vec(), vec![zero(); cutoffs.iter().product()])?;
        let flat = s.flat_index(occupation);
        s.amps[flat] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn vacuum(cutoffs: &[usize]) -> Result<Self> {
        Self::basis(cutoffs, &vec![0; cutoffs.len()])
    }

    /// Truncated single-mode coherent state, not renormalized. The second value
    /// is the squared-norm deficit `1 − Σ_{n<cutoff} |⟨n|a⟩|²`.
    pub fn coherent(label: Complex64, cutoff: usize) -> Result<(Self, f64)> {
        let amps: Vec<Complex64> = (0..cutoff).map(|n| fock_amplitude(label, n)).collect();
        let s = Self::new(vec![cutoff], amps)?;
        let deficit = 1.0 - s.norm_sqr();
        Ok((s, deficit))
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    pub fn modes(&self) -> usize {
        self.cutoffs.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, occupation: &[usize]) -> Complex64 {
        self.amps[self.flat_index(occupation)]
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.cutoffs.len()];
        for k in (0..self.cutoffs.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.cutoffs[k + 1];
        }
        strides
    }

    fn flat_index(&self, occupation: &[usize]) -> usize {
        occupation.iter().zip(self.strides()).map(|(n, s)| n * s).sum()
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.modes() {
            return Err(Error::BadModeIndex { mode, modes: self.modes() });
        }
        Ok(())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.cutoffs != other.cutoffs {
            return Err(Error::CutoffMismatch(format!("{:?} vs {:?}", self.cutoffs, other.cutoffs)));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn normalize(&self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroState);
        }
        Ok(Self { cutoffs: self.cutoffs.clone(), amps: self.amps.iter().map(|a| a / norm).collect() })
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self { cutoffs: self.cutoffs.clone(), amps: self.amps.iter().map(|a| a * factor).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.cutoffs != other.cutoffs {
            return Err(Error::CutoffMismatch(format!("{:?} vs {:?}", self.cutoffs, other.cutoffs)));
        }
        let amps = self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect();
        Ok(Self { cutoffs: self.cutoffs.clone(), amps })
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut cutoffs = self.cutoffs.clone();
        cutoffs.extend_from_slice(&other.cutoffs);
        let amps = self.amps.iter().flat_map(|a| other.amps.iter().map(move |b| a * b)).collect();
        Self { cutoffs, amps }
    }

    /// Keeps only occupations below the new (not larger) cutoffs.
    pub fn truncated(&self, cutoffs: &[usize]) -> Result<Self> {
        if cutoffs.len() != self.modes() {
            return Err(Error::MismatchedModeCount { expected: self.modes(), found: cutoffs.len() });
        }
        if cutoffs.iter().zip(&self.cutoffs).any(|(new, old)| new > old || *new == 0) {
            return Err(Error::CutoffMismatch(format!("cannot truncate {:?} to {:?}", self.cutoffs, cutoffs)));
        }
        let mut amps = Vec::with_capacity(cutoffs.iter().product());
        let mut idx = vec![0; cutoffs.len()];
        for _ in 0..cutoffs.iter().product::<usize>() {
            amps.push(self.amplitude(&idx));
            advance(&mut idx, cutoffs);
        }
        Self::new(cutoffs.to_vec(), amps)
    }

    /// Phase shifter `e^{iφ a†a}` on `mode`.
    pub fn apply_phase(&self, mode: usize, phi: f64) -> Result<Self> {
        self.check_mode(mode)?;
        let stride = self.strides()[mode];
        let c = self.cutoffs[mode];
        let phases: Vec<Complex64> = (0..c).map(|n| Complex64::from_polar(1.0, phi * n as f64)).collect();
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(flat, a)| a * phases[(flat / stride) % c])
            .collect();
        Ok(Self { cutoffs: self.cutoffs.clone(), amps })
    }

    /// 50/50 beam splitter on modes `i`, `j`. Both modes must share a cutoff.
    pub fn apply_two_mode_bs(&self, i: usize, j: usize, variant: BeamSplitter) -> Result<Self> {
        self.check_mode(i)?;
        self.check_mode(j)?;
        if i == j {
            return Err(Error::SameMode(i));
        }
        if self.cutoffs[i] != self.cutoffs[j] {
            return Err(Error::CutoffMismatch(format!(
                "beam splitter modes {i} and {j} have cutoffs {} and {}",
                self.cutoffs[i], self.cutoffs[j]
            )));
        }
        match variant {
            BeamSplitter::Raw => Ok(self.raw_bs(i, j)),
            BeamSplitter::Balanced => {
                let dressed = self.apply_phase(j, -FRAC_PI_2)?.raw_bs(i, j);
                dressed.apply_phase(j, -FRAC_PI_2)
            }
        }
    }

    fn raw_bs(&self, i: usize, j: usize) -> Self {
        let c = self.cutoffs[i];
        let strides = self.strides();
        let (si, sj) = (strides[i], strides[j]);
        let blocks: Vec<DMatrix<Complex64>> = (0..=2 * (c - 1)).map(|total| bs_block(total, c)).collect();
        let mut amps = self.amps.clone();
        let mut v = Vec::with_capacity(c);
        for base in 0..amps.len() {
            if (base / si) % c != 0 || (base / sj) % c != 0 {
                continue;
            }
            for (total, block) in blocks.iter().enumerate() {
                let lo = total.saturating_sub(c - 1);
                let hi = total.min(c - 1);
                v.clear();
                v.extend((lo..=hi).map(|k| amps[base + k * si + (total - k) * sj]));
                for (row, k) in (lo..=hi).enumerate() {
                    let w: Complex64 = (0..v.len()).map(|col| block[(row, col)] * v[col]).sum();
                    amps[base + k * si + (total - k) * sj] = w;
                }
            }
        }
        Self { cutoffs: self.cutoffs.clone(), amps }
    }

    /// Contracts the listed modes with `⟨n|` and returns the unnormalized state of
    /// the remaining modes. Occupations beyond a cutoff give the zero state.
    pub fn project(&self, assignments: &[(usize, usize)]) -> Result<Self> {
        for (k, &(mode, _)) in assignments.iter().enumerate() {
            self.check_mode(mode)?;
            if assignments[..k].iter().any(|&(m, _)| m == mode) {
                return Err(Error::SameMode(mode));
            }
        }
        let keep: Vec<usize> =
            (0..self.modes()).filter(|m| !assignments.iter().any(|&(a, _)| a == *m)).collect();
        let cutoffs: Vec<usize> = keep.iter().map(|&m| self.cutoffs[m]).collect();
        let size: usize = cutoffs.iter().product();
        if assignments.iter().any(|&(mode, n)| n >= self.cutoffs[mode]) {
            return Self::new(cutoffs, vec![zero(); size]);
        }
        let mut full = vec![0; self.modes()];
        for &(mode, n) in assignments {
            full[mode] = n;
        }
        let mut idx = vec![0; keep.len()];
        let mut amps = Vec::with_capacity(size);
        for _ in 0..size {
            for (slot, &m) in keep.iter().enumerate() {
                full[m] = idx[slot];
            }
            amps.push(self.amplitude(&full));
            advance(&mut idx, &cutoffs);
        }
        Self::new(cutoffs, amps)
    }

    /// `⟨a†a⟩` on `mode`, normalized by the state's squared norm.
    pub fn mean_photons(&self, mode: usize) -> Result<f64> {
        self.check_mode(mode)?;
        let stride = self.strides()[mode];
        let c = self.cutoffs[mode];
        let weighted: f64 =
            self.amps.iter().enumerate().map(|(flat, a)| ((flat / stride) % c) as f64 * a.norm_sqr()).sum();
        let norm = self.norm_sqr();
        if norm == 0.0 {
            return Err(Error::ZeroState);
        }
        Ok(weighted / norm)
    }

    /// Reduced density matrix of the `keep` modes, normalized to unit trace.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        for &m in keep {
            self.check_mode(m)?;
        }
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() || keep.len() == self.modes() {
            return Err(Error::InvalidSpec("partial trace needs a nonempty proper subset of modes".into()));
        }
        let traced: Vec<usize> = (0..self.modes()).filter(|m| !keep.contains(m)).collect();
        let keep_dims: Vec<usize> = keep.iter().map(|&m| self.cutoffs[m]).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|&m| self.cutoffs[m]).collect();
        let dk: usize = keep_dims.iter().product();
        let dt: usize = traced_dims.iter().product();
        let mut psi = DMatrix::<Complex64>::zeros(dk, dt);
        let mut idx = vec![0; self.modes()];
        for a in &self.amps {
            let row = keep.iter().fold(0, |acc, &m| acc * self.cutoffs[m] + idx[m]);
            let col = traced.iter().fold(0, |acc, &m| acc * self.cutoffs[m] + idx[m]);
            psi[(row, col)] = *a;
            advance(&mut idx, &self.cutoffs);
        }
        let rho = &psi * psi.adjoint();
        let trace = rho.trace().re;
        if trace == 0.0 {
            return Err(Error::ZeroState);
        }
        Ok(DensityMatrix { dims: keep_dims, matrix: rho.unscale(trace) })
    }

    /// Little-endian interleaved `re, im` doubles in storage order.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        self.amps
            .iter()
            .flat_map(|a| a.re.to_le_bytes().into_iter().chain(a.im.to_le_bytes()))
            .collect()
    }
}

/// `|⟨s1|s2⟩|² / (‖s1‖²‖s2‖²)`
pub fn fidelity(s1: &FockState, s2: &FockState) -> Result<f64> {
    let inner = s1.inner(s2)?;
    let (n1, n2) = (s1.norm_sqr(), s2.norm_sqr());
    if n1 == 0.0 || n2 == 0.0 {
        return Err(Error::ZeroState);
    }
    Ok((inner.norm_sqr() / (n1 * n2)).min(1.0))
}

/// Raw beam-splitter block for total photon number `total` in two modes of
/// cutoff `c`, in the basis `|k, total−k⟩` for the admissible `k`. Built as
/// `exp(iπ/4 H)` with `H` the hopping generator restricted to the block; for
/// blocks that fit entirely below the cutoff this is the exact splitter.
fn bs_block(total: usize, c: usize) -> DMatrix<Complex64> {
    let lo = total.saturating_sub(c - 1);
    let hi = total.min(c - 1);
    let d = hi - lo + 1;
    let mut h = DMatrix::<f64>::zeros(d, d);
    for r in 0..d.saturating_sub(1) {
        let k = (lo + r) as f64;
        let v = ((k + 1.0) * (total as f64 - k)).sqrt();
        h[(r, r + 1)] = v;
        h[(r + 1, r)] = v;
    }
    let eig = SymmetricEigen::new(h);
    let vecs = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
    let phases = DMatrix::from_diagonal(
        &eig.eigenvalues.map(|lambda| Complex64::from_polar(1.0, FRAC_PI_4 * lambda)),
    );
    &vecs * phases * vecs.transpose()
}

/// Reduced state of a subsystem.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub dims: Vec<usize>,
    pub matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `Tr ρ²`
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|x| x.norm_sqr()).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.matrix.clone()).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Hermitian within 1e-10, unit trace within 1e-10, eigenvalues ≥ −1e-9.
    pub fn check(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > 1e-10 {
            return Err(Error::InvalidSpec(format!("density matrix not Hermitian ({herm:e})")));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidSpec(format!("density matrix trace {tr}")));
        }
        let min = self.min_eigenvalue();
        if min < -1e-9 {
            return Err(Error::InvalidSpec(format!("density matrix eigenvalue {min:e}")));
        }
        Ok(())
    }
}
