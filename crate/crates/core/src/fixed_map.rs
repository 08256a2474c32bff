//! Fixed-point logistic map, bit-exact with the `chaotic_Lmap` Verilog module.
//!
//! The state `x` is the real map state scaled by 65,535 into a 16-bit word.
//! One step computes
//!
//! ```text
//! intermediate = r * x * (65535 - x)          (32-bit wire, wraps mod 2^32)
//! next         = (intermediate + 32767) / 65535
//! ```
//!
//! which is round-to-nearest division. Since 65,535 is odd a tie can never
//! occur. For `r = 4` the largest product is `4 * 32768 * 32767 =
//! 4_294_836_224`, which still fits in 32 bits.

use std::fmt;

use crate::error::{Error, Result};
use crate::reference_models;

/// Full-scale value of the 16-bit state.
pub const SCALE: u32 = 65_535;

/// Number of distinct 16-bit states.
pub const STATE_COUNT: usize = 1 << 16;

/// A map state in `[0, 65535]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FixedSample(u16);

impl FixedSample {
    pub const ZERO: FixedSample = FixedSample(0);
    pub const MAX: FixedSample = FixedSample(u16::MAX);

    pub const fn new(value: u16) -> Self {
        FixedSample(value)
    }

    pub const fn get(self) -> u16 {
        self.0
    }

    /// Mirror image about the parabola vertex, `65535 - x`.
    pub const fn reflect(self) -> Self {
        FixedSample(u16::MAX - self.0)
    }

    /// All 65,536 states in ascending order.
    pub fn all() -> impl Iterator<Item = FixedSample> + Clone {
        (0..=u16::MAX).map(FixedSample)
    }
}

impl From<u16> for FixedSample {
    fn from(v: u16) -> Self {
        FixedSample(v)
    }
}

impl From<FixedSample> for u16 {
    fn from(s: FixedSample) -> u16 {
        s.0
    }
}

impl TryFrom<i64> for FixedSample {
    type Error = Error;

    fn try_from(v: i64) -> Result<Self> {
        u16::try_from(v)
            .map(FixedSample)
            .map_err(|_| Error::SampleOutOfRange(v))
    }
}

impl fmt::Display for FixedSample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// How a step is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Rounding {
    /// The Verilog datapath: 32-bit product, `+32767`, truncating divide.
    #[default]
    HardwareRound,
    /// The floating-point prototype map, floored back to an integer.
    PocFloat,
}

/// Map parameter `r` and the rounding semantics.
///
/// The hardware `r` port is an 8-bit integer, so only integer values are
/// representable; of those only `r = 4` is chaotic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MapParams {
    r: u8,
    rounding: Rounding,
}

impl MapParams {
    pub fn new(r: u32, rounding: Rounding) -> Result<Self> {
        match r {
            1..=4 => Ok(MapParams {
                r: r as u8,
                rounding,
            }),
            _ => Err(Error::InvalidMapParameter(r)),
        }
    }

    /// `r = 4` with hardware rounding, the configuration the generator uses.
    pub const fn chaotic() -> Self {
        MapParams {
            r: 4,
            rounding: Rounding::HardwareRound,
        }
    }

    pub const fn r(&self) -> u32 {
        self.r as u32
    }

    pub const fn rounding(&self) -> Rounding {
        self.rounding
    }
}

impl Default for MapParams {
    fn default() -> Self {
        Self::chaotic()
    }
}

/// The 32-bit `intermediate` wire: `r * x * (65535 - x)` modulo 2^32.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WideProduct(u32);

impl WideProduct {
    pub fn of(x: FixedSample, r: u32) -> Self {
        let x = u64::from(x.get());
        let wide = u64::from(r) * x * (u64::from(SCALE) - x);
        WideProduct(wide as u32)
    }

    pub const fn get(self) -> u32 {
        self.0
    }
}

/// One hardware map step.
///
/// With [`Rounding::PocFloat`] the step is delegated to the floating-point
/// prototype and floored instead.
pub fn lmap_step(state: FixedSample, params: &MapParams) -> FixedSample {
    match params.rounding {
        Rounding::HardwareRound => hardware_step(state, params.r()),
        Rounding::PocFloat => reference_models::poc_floor_step(state, params.r()),
    }
}

#[inline]
fn hardware_step(state: FixedSample, r: u32) -> FixedSample {
    let intermediate = WideProduct::of(state, r).get();
    // The adder is 32 bits wide as well; the quotient lands in a 16-bit reg.
    let next = intermediate.wrapping_add(SCALE / 2) / SCALE;
    FixedSample(next as u16)
}

/// `[s_1, ..., s_n]` with `s_1 = lmap_step(seed)`.
pub fn lmap_trajectory(seed: FixedSample, params: &MapParams, n: usize) -> Vec<FixedSample> {
    orbit(seed, *params).take(n).collect()
}

/// Endless iterator over the successors of `seed` (the seed itself excluded).
pub fn orbit(seed: FixedSample, params: MapParams) -> Orbit {
    Orbit {
        state: seed,
        params,
    }
}

#[derive(Clone, Debug)]
pub struct Orbit {
    state: FixedSample,
    params: MapParams,
}

impl Iterator for Orbit {
    type Item = FixedSample;

    fn next(&mut self) -> Option<FixedSample> {
        self.state = lmap_step(self.state, &self.params);
        Some(self.state)
    }
}

/// Successor table for all 65,536 states.
pub fn step_table(params: &MapParams) -> Vec<FixedSample> {
    FixedSample::all().map(|x| lmap_step(x, params)).collect()
}
