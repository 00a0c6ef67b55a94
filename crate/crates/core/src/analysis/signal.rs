//! RMS, harmonic content and sinusoid fitting of sampled signals.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::sim::{Channel, WaveformTrace};

/// Highest harmonic order included in THD unless told otherwise.
pub const DEFAULT_HARMONIC_CAP: usize = 50;

// Allowed mismatch between the window length and a whole number of periods,
// in periods.
const PERIOD_TOLERANCE: f64 = 1e-6;

pub fn rms(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let sum: f64 = samples.iter().map(|x| x * x).sum();
    Ok((sum / samples.len() as f64).sqrt())
}

/// RMS of one trace channel over `[start, start + duration)`.
pub fn trace_rms(trace: &WaveformTrace, channel: Channel, start: f64, duration: f64) -> Result<f64> {
    rms(trace.window(channel, start, duration)?)
}

/// RMS of every full window of `window` consecutive samples; element `k`
/// covers `samples[k..k + window]`.
pub fn sliding_rms(samples: &[f64], window: usize) -> Result<Vec<f64>> {
    if window == 0 || window > samples.len() {
        return Err(Error::EmptyWindow);
    }
    let mut prefix = Vec::with_capacity(samples.len() + 1);
    prefix.push(0.0f64);
    let mut acc = 0.0;
    for x in samples {
        acc += x * x;
        prefix.push(acc);
    }
    let n = window as f64;
    Ok((0..=samples.len() - window)
        .map(|k| ((prefix[k + window] - prefix[k]) / n).max(0.0).sqrt())
        .collect())
}

/// Harmonic decomposition of a window spanning whole fundamental periods.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSpectrum {
    pub fundamental: f64,
    pub dc: f64,
    /// RMS of harmonic `h` at index `h - 1`. Orders at or above Nyquist are
    /// left out.
    pub harmonic_rms: Vec<f64>,
    pub total_rms: f64,
}

impl HarmonicSpectrum {
    /// `sqrt(sum_{h>=2} V_h^2) / V_1`.
    pub fn thd(&self) -> Result<f64> {
        let v1 = self.harmonic_rms.first().copied().unwrap_or(0.0);
        if !(v1 > 1e-12 * self.total_rms) || v1 == 0.0 {
            return Err(Error::ZeroFundamental);
        }
        let distortion: f64 = self.harmonic_rms[1..].iter().map(|v| v * v).sum();
        Ok(distortion.sqrt() / v1)
    }

    /// Share of the signal energy not accounted for by DC and the listed
    /// harmonics, relative to the total.
    pub fn parseval_residual(&self) -> f64 {
        let total = self.total_rms * self.total_rms;
        if total == 0.0 {
            return 0.0;
        }
        let listed: f64 = self.dc * self.dc + self.harmonic_rms.iter().map(|v| v * v).sum::<f64>();
        (total - listed) / total
    }
}

/// Evaluates the DFT at the harmonic bins of `fundamental`, up to order
/// `cap`.
pub fn harmonic_spectrum(
    samples: &[f64],
    sample_period: f64,
    fundamental: f64,
    cap: usize,
) -> Result<HarmonicSpectrum> {
    let n = samples.len();
    if n == 0 {
        return Err(Error::EmptyWindow);
    }
    if !(sample_period > 0.0 && fundamental > 0.0) {
        return Err(Error::invalid("spectrum", "sample period and fundamental must be > 0"));
    }
    let periods = n as f64 * sample_period * fundamental;
    let whole = periods.round();
    if whole < 1.0 || (periods - whole).abs() > PERIOD_TOLERANCE * whole.max(1.0) {
        return Err(Error::NonIntegerPeriods { samples: n, periods });
    }
    let m = whole as usize;
    let nf = n as f64;
    let dc = samples.iter().sum::<f64>() / nf;
    let mut harmonic_rms = Vec::with_capacity(cap);
    for h in 1..=cap {
        let bin = h * m;
        if 2 * bin >= n {
            break;
        }
        let (mut re, mut im) = (0.0, 0.0);
        for (k, x) in samples.iter().enumerate() {
            // Reduce the phase index first so the angle stays accurate.
            let angle = 2.0 * PI * ((bin * k) % n) as f64 / nf;
            re += x * angle.cos();
            im -= x * angle.sin();
        }
        harmonic_rms.push(SQRT_2 * re.hypot(im) / nf);
    }
    Ok(HarmonicSpectrum {
        fundamental,
        dc,
        harmonic_rms,
        total_rms: rms(samples)?,
    })
}

/// THD of a window spanning whole periods of `fundamental`.
pub fn thd(samples: &[f64], sample_period: f64, fundamental: f64, cap: usize) -> Result<f64> {
    harmonic_spectrum(samples, sample_period, fundamental, cap)?.thd()
}

/// Least-squares fit of `offset + slope * (t - t_mid) + A sin(wt - phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalFit {
    pub offset: f64,
    pub slope: f64,
    pub amplitude: f64,
    /// Phase lag of the sinusoid behind `sin(wt)`.
    pub phase: f64,
    /// RMS of the fit residual.
    pub residual_rms: f64,
}

/// Fits samples taken at `t0 + k * dt`. The linear term absorbs a slowly
/// decaying offset.
pub fn fit_fundamental(samples: &[f64], t0: f64, dt: f64, omega: f64) -> Result<FundamentalFit> {
    let n = samples.len();
    if n < 4 {
        return Err(Error::EmptyWindow);
    }
    let t_mid = t0 + 0.5 * (n - 1) as f64 * dt;
    let basis = |k: usize| {
        let t = t0 + k as f64 * dt;
        [1.0, t - t_mid, (omega * t).sin(), (omega * t).cos()]
    };
    let mut a = [[0.0f64; 5]; 4];
    for (k, &y) in samples.iter().enumerate() {
        let phi = basis(k);
        for r in 0..4 {
            for c in 0..4 {
                a[r][c] += phi[r] * phi[c];
            }
            a[r][4] += phi[r] * y;
        }
    }
    let coef = solve4(a).ok_or_else(|| Error::invalid("fit", "window too short to separate the basis"))?;
    let residual: f64 = samples
        .iter()
        .enumerate()
        .map(|(k, &y)| {
            let phi = basis(k);
            let model: f64 = phi.iter().zip(&coef).map(|(p, c)| p * c).sum();
            (y - model).powi(2)
        })
        .sum();
    // a sin + b cos = A sin(wt - phase) with A cos(phase) = a, -A sin(phase) = b.
    Ok(FundamentalFit {
        offset: coef[0],
        slope: coef[1],
        amplitude: coef[2].hypot(coef[3]),
        phase: (-coef[3]).atan2(coef[2]),
        residual_rms: (residual / n as f64).sqrt(),
    })
}

fn solve4(mut a: [[f64; 5]; 4]) -> Option<[f64; 4]> {
    let scale = (0..4).map(|i| a[i][i].abs()).fold(0.0, f64::max);
    for col in 0..4 {
        let pivot = (col..4).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if !(a[pivot][col].abs() > 1e-14 * scale) {
            return None;
        }
        a.swap(col, pivot);
        let pivot_row = a[col];
        for row in a.iter_mut().skip(col + 1) {
            let f = row[col] / pivot_row[col];
            for (x, p) in row.iter_mut().zip(pivot_row).skip(col) {
                *x -= f * p;
            }
        }
    }
    let mut x = [0.0; 4];
    for row in (0..4).rev() {
        let tail: f64 = (row + 1..4).map(|c| a[row][c] * x[c]).sum();
        x[row] = (a[row][4] - tail) / a[row][row];
    }
    Some(x)
}
