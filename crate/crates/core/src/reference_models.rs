//! Floating-point replica of the prototype generator: the continuous map on
//! the `[0, 65535]` scale, the exponential rolling average that is floored
//! only once at the end, and the closed-form normal density.
//!
//! These are the oracles for the distributional checks. Everything is generic
//! over [`Real`]; the prototype itself ran in double precision.

use crate::error::{Error, Result};
use crate::ewma_filter::EwmaWeights;
use crate::fixed_map::FixedSample;
use crate::scalar::Real;

const FULL_SCALE: f64 = 65_535.0;

/// `r * x * (65535 - x) / 65535`, unrounded.
pub fn poc_map_step<T: Real>(x: T, r: T) -> T {
    let scale = T::lit(FULL_SCALE);
    r * x * (scale - x) / scale
}

/// The prototype step evaluated in `f64` and floored back onto the 16-bit grid.
pub fn poc_floor_step(state: FixedSample, r: u32) -> FixedSample {
    let y = poc_map_step(f64::from(state.get()), f64::from(r));
    FixedSample::new(floor_to_sample(y))
}

/// `floor(v)` clamped into `[0, 65535]`.
pub fn floor_to_sample<T: Real>(v: T) -> u16 {
    let f = v.floor().as_f64();
    f.clamp(0.0, FULL_SCALE) as u16
}

/// `stored_x`: the seed followed by `n - 1` map iterates (length `n`).
pub fn poc_trajectory<T: Real>(x0: T, n: usize) -> Vec<T> {
    let r = T::lit(4.0);
    let mut out = Vec::with_capacity(n);
    let mut x = x0;
    for i in 0..n {
        if i > 0 {
            x = poc_map_step(x, r);
        }
        out.push(x);
    }
    out
}

/// Raw map states and the unfloored rolling average of one prototype run.
#[derive(Clone, Debug, PartialEq)]
pub struct PocRun<T> {
    pub raw: Vec<T>,
    pub smoothed: Vec<T>,
}

impl<T: Real> PocRun<T> {
    /// Runs the prototype for `n` elements from `x0` with the given weights.
    pub fn new(x0: T, n: usize, weights: &EwmaWeights) -> Self {
        let raw = poc_trajectory(x0, n);
        let old_w = T::lit(f64::from(weights.old_weight()));
        let new_w = T::lit(f64::from(weights.new_weight()));
        let denom = T::lit(f64::from(weights.denominator()));
        let mut smoothed = Vec::with_capacity(n);
        let mut prev = x0;
        for (i, &x) in raw.iter().enumerate() {
            let avg = if i == 0 {
                x
            } else {
                (old_w * prev + new_w * x) / denom
            };
            smoothed.push(avg);
            prev = avg;
        }
        PocRun { raw, smoothed }
    }

    /// The final floor pass over the rolling averages.
    pub fn floored(&self) -> Vec<u16> {
        self.smoothed.iter().copied().map(floor_to_sample).collect()
    }
}

/// The prototype output: `n` rolling averages, each floored after the loop.
pub fn poc_rolling_series<T: Real>(x0: T, n: usize) -> Vec<u16> {
    PocRun::new(x0, n, &EwmaWeights::HARDWARE).floored()
}

/// Mean and standard deviation of a normal density.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussParams<T> {
    mu: T,
    sigma: T,
}

impl<T: Real> GaussParams<T> {
    pub fn new(mu: T, sigma: T) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::InvalidParameter(format!("mean {mu} is not finite")));
        }
        if !(sigma > T::zero() && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "standard deviation {sigma} must be positive and finite"
            )));
        }
        Ok(GaussParams { mu, sigma })
    }

    pub fn mu(&self) -> T {
        self.mu
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn pdf(&self, x: T) -> T {
        normal_pdf(x, self)
    }

    /// Peak density `1 / (sigma * sqrt(2 pi))`.
    pub fn peak(&self) -> T {
        T::one() / (self.sigma * (T::lit(2.0) * T::PI()).sqrt())
    }
}

pub fn normal_pdf<T: Real>(x: T, p: &GaussParams<T>) -> T {
    let z = (x - p.mu) / p.sigma;
    p.peak() * (T::lit(-0.5) * z * z).exp()
}
