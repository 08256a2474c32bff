//! Fixed-point logistic-map pseudo-random number generator.
//!
//! A bit-exact software model of an FPGA datapath that iterates the logistic
//! map `x' = 4 x (1 - x)` on a 16-bit integer state and smooths it with an
//! integer exponentially weighted moving average, together with a
//! double-precision reference of the same pipeline, a statistics harness for
//! checking the output distribution, and the two-byte serial frame format.
//!
//! The real-valued parts are generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix them to `f64`, which is what the CLI uses.

pub mod cli;
pub mod error;
pub mod ewma_filter;
pub mod fixed_map;
pub mod numfmt;
pub mod prng_pipeline;
pub mod reference_models;
pub mod scalar;
pub mod stats_analyzer;
pub mod wire_codec;

pub use error::{Error, Result};
pub use ewma_filter::{ewma_reset, ewma_step, Ewma, EwmaState, EwmaWeights};
pub use fixed_map::{lmap_step, lmap_trajectory, FixedSample, MapParams, Rounding, WideProduct};
pub use prng_pipeline::{
    cycle_census, find_cycle, generate, sanitize_seed, trace, Census, CycleReport, GeneratorConfig,
    HardwareStream, Semantics, ZeroPolicy,
};
pub use scalar::Real;
pub use stats_analyzer::GofResult;
pub use wire_codec::{decode_stream, dedupe_consecutive, encode_stream};

pub type GaussParams = reference_models::GaussParams<f64>;
pub type PocRun = reference_models::PocRun<f64>;
pub type HistogramReport = stats_analyzer::HistogramReport<f64>;
pub type Moments = stats_analyzer::Moments<f64>;

pub type GaussParams32 = reference_models::GaussParams<f32>;
pub type HistogramReport32 = stats_analyzer::HistogramReport<f32>;
pub type Moments32 = stats_analyzer::Moments<f32>;
