use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::NumericError;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

/// Frequency of FFT slot `k` on a grid of size `n`, in `(-n/2, n/2]`.
pub fn frequency(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// FFT slot of `freq`, if it lies in `(-n/2, n/2]`.
pub fn slot(freq: i64, n: usize) -> Option<usize> {
    let half = (n / 2) as i64;
    if freq > half || freq <= -half {
        None
    } else {
        Some(freq.rem_euclid(n as i64) as usize)
    }
}

pub fn check_size(n: usize) -> Result<(), NumericError> {
    if n < 2 || !n.is_power_of_two() {
        Err(NumericError::GridSize(n))
    } else {
        Ok(())
    }
}

/// Forward transform normalized so that `f(x) = Σ f̂(ξ) e^{2πiξx}`.
pub fn forward(samples: &[Complex64]) -> Vec<Complex64> {
    let n = samples.len();
    let mut buf = samples.to_vec();
    plan(n, false).process(&mut buf);
    let s = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= s);
    buf
}

pub fn inverse(spectrum: &[Complex64]) -> Vec<Complex64> {
    let mut buf = spectrum.to_vec();
    plan(buf.len(), true).process(&mut buf);
    buf
}

/// Samples of a function on the periodic grid `x_m = m / N`, with its
/// spectrum on integer frequencies.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    samples: Vec<Complex64>,
    spectrum: Vec<Complex64>,
}

impl GridFunction {
    pub fn from_samples(samples: Vec<Complex64>) -> Result<Self, NumericError> {
        check_size(samples.len())?;
        let spectrum = forward(&samples);
        Ok(GridFunction { samples, spectrum })
    }

    pub fn from_real(samples: &[f64]) -> Result<Self, NumericError> {
        Self::from_samples(samples.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Spectrum in FFT slot order.
    pub fn from_spectrum(spectrum: Vec<Complex64>) -> Result<Self, NumericError> {
        check_size(spectrum.len())?;
        let samples = inverse(&spectrum);
        Ok(GridFunction { samples, spectrum })
    }

    pub fn zeros(n: usize) -> Result<Self, NumericError> {
        Self::from_samples(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn spectrum(&self) -> &[Complex64] {
        &self.spectrum
    }

    /// Coefficient at an integer frequency; zero outside the grid band.
    pub fn coefficient(&self, freq: i64) -> Complex64 {
        slot(freq, self.len()).map_or(Complex64::new(0.0, 0.0), |k| self.spectrum[k])
    }

    /// Integral over the unit period.
    pub fn integral(&self) -> Complex64 {
        mean(&self.samples)
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        lp_norm(&self.samples, p)
    }

    pub fn abs(&self) -> Vec<f64> {
        self.samples.iter().map(|c| c.norm()).collect()
    }

    pub fn scaled(&self, c: Complex64) -> GridFunction {
        GridFunction {
            samples: self.samples.iter().map(|x| x * c).collect(),
            spectrum: self.spectrum.iter().map(|x| x * c).collect(),
        }
    }

    pub fn conj(&self) -> GridFunction {
        GridFunction::from_samples(self.samples.iter().map(|x| x.conj()).collect()).expect("same size")
    }
}

pub fn mean(v: &[Complex64]) -> Complex64 {
    v.iter().sum::<Complex64>() / v.len() as f64
}

/// `(mean |f|^p)^{1/p}`, or the maximum for `p = ∞`.
pub fn lp_norm(v: &[Complex64], p: f64) -> f64 {
    if p.is_infinite() {
        return v.iter().map(|c| c.norm()).fold(0.0, f64::max);
    }
    let s: f64 = v.iter().map(|c| c.norm().powf(p)).sum::<f64>() / v.len() as f64;
    s.powf(1.0 / p)
}
