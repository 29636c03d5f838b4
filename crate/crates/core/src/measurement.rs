use serde::Serialize;

/// Default hard cap on `n + m` when enumerating two-mode photon counts.
pub const DEFAULT_MAX_PHOTONS: usize = 512;

/// Default probability mass that may remain unenumerated.
pub const DEFAULT_MASS_TOLERANCE: f64 = 1e-10;

/// One two-mode photon-number result with its probability and the
/// (unnormalized) state left on the unmeasured modes.
#[derive(Debug, Clone, Serialize)]
pub struct MeasurementOutcome<S> {
    pub n: usize,
    pub m: usize,
    pub probability: f64,
    #[serde(skip)]
    pub residual: S,
}

/// Outcomes `(n, m)` swept by total photon number, ties broken by ascending `n`.
pub(crate) fn diagonal(total: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=total).map(move |n| (n, total - n))
}
