//! Fourier-transform surrogates.
//!
//! Each realization keeps every series' Fourier amplitudes and adds uniform
//! random phases to the positive frequencies below Nyquist, mirroring them so
//! the inverse transform stays real. In shared-phase mode a single phase
//! vector is applied to all series of the panel, which leaves cross-spectra
//! and therefore all Pearson correlations intact.

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::dependence::{bin_count, dependency_from_series, DependencyMatrix, Measure};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::panel::ReturnPanel;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurrogateMode {
    SharedPhase,
    IndependentPhase,
}

impl std::str::FromStr for SurrogateMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shared" | "shared-phase" => Ok(Self::SharedPhase),
            "independent" | "independent-phase" => Ok(Self::IndependentPhase),
            other => Err(Error::Validation(format!(
                "unknown surrogate mode {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateEnsemble<S> {
    pub mode: SurrogateMode,
    pub seed: u64,
    pub realizations: Vec<ReturnPanel<S>>,
}

impl<S> SurrogateEnsemble<S> {
    pub fn len(&self) -> usize {
        self.realizations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.realizations.is_empty()
    }
}

/// Highest frequency index whose phase is randomized: `T/2 − 1` for even `T`
/// (Nyquist excluded), `(T − 1)/2` for odd `T`.
fn last_random_frequency(t: usize) -> usize {
    if t % 2 == 0 {
        t / 2 - 1
    } else {
        (t - 1) / 2
    }
}

fn phase_rng(seed: u64, realization: usize, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((realization as u64 + 1) << 32) | stream);
    rng
}

fn draw_phases<S: Scalar>(rng: &mut ChaCha8Rng, count: usize) -> Vec<S> {
    let tau = std::f64::consts::TAU;
    (0..count)
        .map(|_| S::lit(rng.random::<f64>() * tau))
        .collect()
}

fn forward_spectra<S: Scalar>(
    planner: &mut FftPlanner<S>,
    panel: &ReturnPanel<S>,
) -> Vec<Vec<Complex<S>>> {
    let fft = planner.plan_fft_forward(panel.len());
    panel
        .rows()
        .iter()
        .map(|row| {
            let mut buf: Vec<Complex<S>> =
                row.iter().map(|&x| Complex::new(x, S::zero())).collect();
            fft.process(&mut buf);
            buf
        })
        .collect()
}

fn check_surrogate_input<S: Scalar>(panel: &ReturnPanel<S>) -> Result<()> {
    if panel.len() < 4 {
        return Err(Error::InsufficientData {
            what: "surrogate series length",
            needed: 4,
            got: panel.len(),
        });
    }
    Ok(())
}

fn realization_from_spectra<S: Scalar>(
    planner: &mut FftPlanner<S>,
    panel: &ReturnPanel<S>,
    spectra: &[Vec<Complex<S>>],
    mode: SurrogateMode,
    seed: u64,
    k: usize,
) -> Result<ReturnPanel<S>> {
    let t = panel.len();
    let last = last_random_frequency(t);
    let inverse = planner.plan_fft_inverse(t);
    let shared: Option<Vec<S>> = match mode {
        SurrogateMode::SharedPhase => Some(draw_phases(&mut phase_rng(seed, k, 0), last)),
        SurrogateMode::IndependentPhase => None,
    };
    let norm = S::from_usize_lossy(t);
    let rows = spectra
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let own;
            let phases = match &shared {
                Some(p) => p,
                None => {
                    own = draw_phases(&mut phase_rng(seed, k, i as u64 + 1), last);
                    &own
                }
            };
            let mut buf = spec.clone();
            for f in 1..=last {
                let rotated = buf[f] * Complex::from_polar(S::one(), phases[f - 1]);
                buf[f] = rotated;
                buf[t - f] = rotated.conj();
            }
            inverse.process(&mut buf);
            buf.into_iter().map(|c| c.re / norm).collect()
        })
        .collect();
    panel.with_returns(rows)
}

/// Realization `k` of the ensemble, a pure function of `(panel, mode, seed, k)`.
pub fn surrogate_realization<S: Scalar>(
    panel: &ReturnPanel<S>,
    mode: SurrogateMode,
    seed: u64,
    k: usize,
) -> Result<ReturnPanel<S>> {
    check_surrogate_input(panel)?;
    let mut planner = FftPlanner::new();
    let spectra = forward_spectra(&mut planner, panel);
    realization_from_spectra(&mut planner, panel, &spectra, mode, seed, k)
}

/// `k_count` phase-randomized copies of `panel`.
pub fn make_surrogates<S: Scalar>(
    panel: &ReturnPanel<S>,
    k_count: usize,
    mode: SurrogateMode,
    seed: u64,
) -> Result<SurrogateEnsemble<S>> {
    if k_count < 1 {
        return Err(Error::Validation(
            "surrogate ensemble needs at least one realization".into(),
        ));
    }
    check_surrogate_input(panel)?;
    let spectra = forward_spectra(&mut FftPlanner::new(), panel);
    let realizations = (0..k_count)
        .into_par_iter()
        .map_init(FftPlanner::new, |planner, k| {
            realization_from_spectra(planner, panel, &spectra, mode, seed, k)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SurrogateEnsemble {
        mode,
        seed,
        realizations,
    })
}

/// Fourier amplitudes `|X(f)|` of a real series.
pub fn amplitude_spectrum<S: Scalar>(x: &[S]) -> Vec<S> {
    let mut buf: Vec<Complex<S>> = x.iter().map(|&v| Complex::new(v, S::zero())).collect();
    FftPlanner::new()
        .plan_fft_forward(x.len())
        .process(&mut buf);
    buf.into_iter().map(|c| c.norm()).collect()
}

/// Scatter of neighbouring Fourier phases `(φ(l), φ(l + Δ))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseMap<S> {
    pub delay: usize,
    pub points: Vec<(S, S)>,
}

/// Phases in `(−π, π]` for modes `l = 1 … ⌊T/2⌋ − 1 − Δ`.
pub fn phase_map<S: Scalar>(x: &[S], delay: usize) -> Result<PhaseMap<S>> {
    let t = x.len();
    let half = t / 2;
    if delay == 0 || half < 1 || delay >= half - 1 {
        return Err(Error::Validation(format!(
            "phase-map delay {delay} must satisfy 1 ≤ Δ < ⌊T/2⌋ − 1 for T = {t}"
        )));
    }
    let mut buf: Vec<Complex<S>> = x.iter().map(|&v| Complex::new(v, S::zero())).collect();
    FftPlanner::new().plan_fft_forward(t).process(&mut buf);
    let phase = |l: usize| {
        let a = buf[l].arg();
        if a <= -S::PI() {
            S::PI()
        } else {
            a
        }
    };
    let points = (1..=(half - 1 - delay))
        .map(|l| (phase(l), phase(l + delay)))
        .collect();
    Ok(PhaseMap { delay, points })
}

/// Per-pair mean and population standard deviation of a dependency measure
/// across the ensemble.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsemblePairStats<S> {
    pub mean: Matrix<S>,
    pub std: Matrix<S>,
    pub k: usize,
}

/// One dependency matrix per realization over the columns in `range`.
pub fn ensemble_dependency<S: Scalar>(
    ensemble: &SurrogateEnsemble<S>,
    range: Range<usize>,
    measure: Measure,
    bins: Option<usize>,
) -> Result<Vec<DependencyMatrix<S>>> {
    if ensemble.is_empty() {
        return Err(Error::Validation("empty surrogate ensemble".into()));
    }
    let len = ensemble.realizations[0].len();
    if range.start >= range.end || range.end > len {
        return Err(Error::Validation(format!(
            "column range {range:?} outside realizations of length {len}"
        )));
    }
    ensemble
        .realizations
        .par_iter()
        .map(|panel| {
            let series: Vec<&[S]> = panel.rows().iter().map(|r| &r[range.clone()]).collect();
            dependency_from_series(panel.tickers(), &series, 0, measure, bins)
        })
        .collect()
}

/// Mean and population (divide-by-K) standard deviation per entry.
pub fn pair_stats<S: Scalar>(matrices: &[DependencyMatrix<S>]) -> Result<EnsemblePairStats<S>> {
    let first = matrices
        .first()
        .ok_or_else(|| Error::Validation("no matrices to aggregate".into()))?;
    let n = first.n();
    if let Some(m) = matrices.iter().find(|m| m.n() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: m.n(),
        });
    }
    let k = S::from_usize_lossy(matrices.len());
    let mean = Matrix::from_fn(n, n, |i, j| {
        matrices.iter().map(|m| m.values[(i, j)]).sum::<S>() / k
    });
    let std = Matrix::from_fn(n, n, |i, j| {
        let mu = mean[(i, j)];
        let var = matrices
            .iter()
            .map(|m| (m.values[(i, j)] - mu).powi(2))
            .sum::<S>()
            / k;
        var.sqrt()
    });
    Ok(EnsemblePairStats {
        mean,
        std,
        k: matrices.len(),
    })
}

/// Mutual-information statistics of the ensemble on `range`; bins default
/// to `⌈√(T/4)⌉` of the range length.
pub fn ensemble_mi_stats<S: Scalar>(
    ensemble: &SurrogateEnsemble<S>,
    range: Range<usize>,
    bins: Option<usize>,
) -> Result<EnsemblePairStats<S>> {
    let bins = match bins {
        Some(b) => b,
        None => bin_count(range.len())?,
    };
    pair_stats(&ensemble_dependency(
        ensemble,
        range,
        Measure::MutualInformation,
        Some(bins),
    )?)
}
