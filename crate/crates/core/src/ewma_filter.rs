//! Integer EWMA, bit-exact with the `EWMA_avg` Verilog module.
//!
//! `avg' = (old_w * avg + new_w * xt) / denom` with truncating division and
//! the default weights `(40, 10, 50)`, i.e. the new sample carries 1/5 of the
//! weight.

use crate::error::{Error, Result};
use crate::fixed_map::FixedSample;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EwmaWeights {
    old_w: u32,
    new_w: u32,
    denom: u32,
}

impl EwmaWeights {
    pub const HARDWARE: EwmaWeights = EwmaWeights {
        old_w: 40,
        new_w: 10,
        denom: 50,
    };

    pub fn new(old_w: u32, new_w: u32, denom: u32) -> Result<Self> {
        let valid = old_w > 0 && new_w > 0 && u64::from(old_w) + u64::from(new_w) == u64::from(denom);
        if valid {
            Ok(EwmaWeights { old_w, new_w, denom })
        } else {
            Err(Error::InvalidWeights { old_w, new_w, denom })
        }
    }

    pub const fn old_weight(&self) -> u32 {
        self.old_w
    }

    pub const fn new_weight(&self) -> u32 {
        self.new_w
    }

    pub const fn denominator(&self) -> u32 {
        self.denom
    }

    /// Smoothing factor applied to the incoming sample, `new_w / denom`.
    pub fn alpha(&self) -> f64 {
        f64::from(self.new_w) / f64::from(self.denom)
    }
}

impl Default for EwmaWeights {
    fn default() -> Self {
        Self::HARDWARE
    }
}

/// The running average register.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EwmaState {
    avg: u16,
}

impl EwmaState {
    pub const fn avg(&self) -> u16 {
        self.avg
    }
}

/// Reset branch: the register is loaded with the seed.
pub fn ewma_reset(seed: FixedSample) -> EwmaState {
    EwmaState { avg: seed.get() }
}

pub fn ewma_step(state: EwmaState, xt: FixedSample, w: &EwmaWeights) -> EwmaState {
    let num = u64::from(w.old_w) * u64::from(state.avg) + u64::from(w.new_w) * u64::from(xt.get());
    // old_w + new_w = denom keeps the quotient between the two inputs.
    EwmaState {
        avg: (num / u64::from(w.denom)) as u16,
    }
}

/// Stateful wrapper around [`ewma_step`].
#[derive(Clone, Debug)]
pub struct Ewma {
    state: EwmaState,
    weights: EwmaWeights,
}

impl Ewma {
    pub fn new(seed: FixedSample, weights: EwmaWeights) -> Self {
        Ewma {
            state: ewma_reset(seed),
            weights,
        }
    }

    pub fn update(&mut self, xt: FixedSample) -> u16 {
        self.state = ewma_step(self.state, xt, &self.weights);
        self.state.avg
    }

    pub fn state(&self) -> EwmaState {
        self.state
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(avg: u16, xt: u16) -> u16 {
        ewma_step(
            ewma_reset(FixedSample::new(avg)),
            FixedSample::new(xt),
            &EwmaWeights::HARDWARE,
        )
        .avg()
    }

    #[test]
    fn reset_loads_seed() {
        for s in [6000, 0, 65535] {
            assert_eq!(ewma_reset(FixedSample::new(s)).avg(), s);
        }
    }

    #[test]
    fn step_examples() {
        assert_eq!(step(65535, 65535), 65535);
        assert_eq!(step(0, 0), 0);
        assert_eq!(step(100, 200), 120);
        assert_eq!(step(1, 0), 0);
    }

    #[test]
    fn truncation_drags_constant_input_down_to_it() {
        // A constant zero input collapses any average to 0 in finitely many steps.
        let mut e = Ewma::new(FixedSample::MAX, EwmaWeights::HARDWARE);
        let mut steps = 0;
        while e.update(FixedSample::ZERO) != 0 {
            steps += 1;
            assert!(steps < 100);
        }
    }

    #[test]
    fn weight_validation() {
        assert!(EwmaWeights::new(40, 10, 50).is_ok());
        assert!(EwmaWeights::new(10, 40, 50).is_ok());
        assert!(EwmaWeights::new(40, 10, 49).is_err());
        assert!(EwmaWeights::new(0, 50, 50).is_err());
        assert!(EwmaWeights::new(50, 0, 50).is_err());
        assert!(EwmaWeights::new(u32::MAX, 1, 0).is_err());
        assert_eq!(EwmaWeights::default().alpha(), 0.2);
    }

    #[test]
    fn prose_weighting_is_expressible() {
        let prose = EwmaWeights::new(10, 40, 50).unwrap();
        let s = ewma_step(ewma_reset(FixedSample::new(100)), FixedSample::new(200), &prose);
        assert_eq!(s.avg(), 180);
    }
}
