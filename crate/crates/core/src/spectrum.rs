//! Lyapunov-exponent estimation over model phases, zero-set scans, band-set
//! spectral approximants, and box-counting dimension fits.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generators::ContinuedFraction;
use crate::intervals::IntervalSet;
use crate::model::{ModelError, PotentialModel};
use crate::schrodinger::{least_squares_slope, transfer_product};
use crate::tracemap::{sigma_levels_for, FibonacciTraces, SturmianTraces, TraceMapError};

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error("need at least {need} scales spanning {decades} decades")]
    BadScales { need: usize, decades: f64 },
    #[error("grid must be sorted and non-empty")]
    BadGrid,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    TraceMap(#[from] TraceMapError),
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    pub energy: f64,
    /// Mean of (1/n) ln ||A_n|| over sampled phases, clamped at 0.
    pub gamma: f64,
    pub n: usize,
    /// Max - min over phases: the uniformity diagnostic.
    pub spread: f64,
    pub phase_samples: usize,
}

/// Estimates the Lyapunov exponent of the cocycle at energy `e` from `n`
/// transfer steps averaged over `phase_samples` phases of the model.
pub fn lyapunov(
    model: &PotentialModel,
    e: f64,
    n: usize,
    phase_samples: usize,
) -> Result<LyapunovEstimate, SpectrumError> {
    assert!(n >= 100, "need at least 100 steps");
    let phase_samples = phase_samples.max(1);
    let mut rates = Vec::with_capacity(phase_samples);
    for phase in 0..phase_samples {
        let pot = model.potential(phase, phase_samples, 0, n as i64)?;
        let tp = transfer_product(&pot, e, 0, n as i64).expect("range just built");
        rates.push(tp.ln_norm() / n as f64);
    }
    let mean = rates.iter().sum::<f64>() / rates.len() as f64;
    let spread = rates.iter().fold(f64::NEG_INFINITY, |m, &r| m.max(r))
        - rates.iter().fold(f64::INFINITY, |m, &r| m.min(r));
    Ok(LyapunovEstimate {
        energy: e,
        gamma: mean.max(0.0),
        n,
        spread: spread.max(0.0),
        phase_samples,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZsetScan {
    /// Energies with gamma below the tolerance, merged at grid resolution.
    pub set: IntervalSet,
    /// Per-grid-point estimates (energy, gamma, spread).
    pub samples: Vec<(f64, f64, f64)>,
    pub tol: f64,
}

/// Scans an energy grid for the set where the Lyapunov exponent vanishes
/// (i.e. stays below `tol` at the given horizon).
pub fn zset_scan(
    model: &PotentialModel,
    e_grid: &[f64],
    n: usize,
    phase_samples: usize,
    tol: f64,
) -> Result<ZsetScan, SpectrumError> {
    if e_grid.is_empty() || e_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SpectrumError::BadGrid);
    }
    let samples: Vec<(f64, f64, f64)> = e_grid
        .par_iter()
        .map(|&e| {
            let est = lyapunov(model, e, n, phase_samples)?;
            Ok((e, est.gamma, est.spread))
        })
        .collect::<Result<_, SpectrumError>>()?;
    // merge covered grid points into intervals at grid resolution
    let step = if e_grid.len() > 1 {
        e_grid
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0f64, f64::max)
    } else {
        0.0
    };
    let hits: Vec<(f64, f64)> = samples
        .iter()
        .filter(|&&(_, g, _)| g < tol)
        .map(|&(e, _, _)| (e - 0.5 * step, e + 0.5 * step))
        .collect();
    Ok(ZsetScan {
        set: IntervalSet::from_intervals(hits, step * 0.25),
        samples,
        tol,
    })
}

/// Which trace family backs a spectral approximant.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum ApproximantModel {
    Fibonacci,
    Sturmian { coefficients: Vec<u64> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumApprox {
    /// sigma_k union sigma_{k+1}.
    pub set: IntervalSet,
    pub k: usize,
    pub measure: f64,
    pub band_count: usize,
    /// measure(level k) <= measure(level k-1) within tolerance.
    pub monotone_vs_previous: bool,
}

/// Band-set approximant `sigma_k union sigma_{k+1}` of the spectrum.
pub fn spectrum_approx(
    model: &ApproximantModel,
    lambda: f64,
    k: usize,
    resolution: f64,
) -> Result<SpectrumApprox, SpectrumError> {
    assert!(k >= 1);
    let levels = match model {
        ApproximantModel::Fibonacci => {
            sigma_levels_for(&FibonacciTraces { lambda }, k + 1, resolution)?
        }
        ApproximantModel::Sturmian { coefficients } => {
            let cf = ContinuedFraction::from_coefficients(coefficients)
                .map_err(ModelError::Generators)?;
            sigma_levels_for(&SturmianTraces { lambda, cf }, k + 1, resolution)?
        }
    };
    let set = levels[k - 1].union(&levels[k]);
    let monotone_vs_previous = if k >= 2 {
        let prev = levels[k - 2].union(&levels[k - 1]);
        set.measure() <= prev.measure() + 16.0 * resolution * set.count() as f64
    } else {
        true
    };
    Ok(SpectrumApprox {
        k,
        measure: set.measure(),
        band_count: set.count(),
        monotone_vs_previous,
        set,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoxDimension {
    /// Least-squares slope of ln N(eps) against ln (1/eps).
    pub dimension: f64,
    pub residual: f64,
    /// (eps, N(eps)) pairs actually used.
    pub counts: Vec<(f64, usize)>,
    /// Set when the input set cannot support a dimension estimate.
    pub degenerate: bool,
}

/// Box-counting dimension of an interval set over the given scales.
pub fn box_dimension(set: &IntervalSet, scales: &[f64]) -> Result<BoxDimension, SpectrumError> {
    let need = 4usize;
    if scales.len() < need || scales.iter().any(|&s| s <= 0.0) {
        return Err(SpectrumError::BadScales { need, decades: 2.0 });
    }
    let lo = scales.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = scales.iter().cloned().fold(0.0f64, f64::max);
    if hi / lo < 100.0 {
        return Err(SpectrumError::BadScales { need, decades: 2.0 });
    }
    if set.is_empty() {
        return Ok(BoxDimension {
            dimension: 0.0,
            residual: 0.0,
            counts: vec![],
            degenerate: true,
        });
    }
    let origin = set.bounds().unwrap().0;
    let counts: Vec<(f64, usize)> = scales
        .iter()
        .map(|&eps| (eps, set.box_count(eps, origin)))
        .collect();
    let degenerate = counts.iter().all(|&(_, n)| n == counts[0].1);
    let pts: Vec<(f64, f64)> = counts
        .iter()
        .map(|&(eps, n)| ((1.0 / eps).ln(), (n as f64).ln()))
        .collect();
    let (dimension, residual) = least_squares_slope(&pts);
    Ok(BoxDimension {
        dimension,
        residual,
        counts,
        degenerate,
    })
}
