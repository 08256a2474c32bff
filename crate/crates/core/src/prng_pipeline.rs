//! The end-to-end generator and fixed-point cycle diagnostics.
//!
//! Hardware semantics follow the top module: the seed is sanitized (0 becomes
//! 1), the EWMA register is loaded with it, and on every tick the map state is
//! fed back through `lmap_step` and into `ewma_step`. The emitted stream
//! never contains the bare seed.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::ewma_filter::{Ewma, EwmaWeights};
use crate::fixed_map::{lmap_step, FixedSample, MapParams, STATE_COUNT};
use crate::reference_models::{floor_to_sample, poc_map_step, PocRun};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Semantics {
    /// Bit-exact fixed-point datapath.
    #[default]
    Hardware,
    /// Double-precision prototype.
    Poc,
}

/// What to do when the running map state reaches the absorbing state 0.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroPolicy {
    /// Keep iterating, as the hardware does.
    #[default]
    Faithful,
    /// Replace a zero state by 1 before the next step. Not bit-exact.
    PerturbToOne,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratorConfig {
    pub seed: u16,
    pub n: usize,
    pub semantics: Semantics,
    pub zero_policy: ZeroPolicy,
    #[serde(skip)]
    pub weights: EwmaWeights,
}

impl GeneratorConfig {
    pub fn new(seed: u16, n: usize) -> Self {
        GeneratorConfig {
            seed,
            n,
            semantics: Semantics::Hardware,
            zero_policy: ZeroPolicy::Faithful,
            weights: EwmaWeights::HARDWARE,
        }
    }

    pub fn semantics(mut self, semantics: Semantics) -> Self {
        self.semantics = semantics;
        self
    }

    pub fn zero_policy(mut self, zero_policy: ZeroPolicy) -> Self {
        self.zero_policy = zero_policy;
        self
    }

    pub fn weights(mut self, weights: EwmaWeights) -> Self {
        self.weights = weights;
        self
    }
}

/// A raw seed of 0 is replaced by 1 so the map never starts absorbed.
pub fn sanitize_seed(raw: u16) -> FixedSample {
    FixedSample::new(if raw == 0 { 1 } else { raw })
}

/// Everything a generator run produced.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    /// Map state after each tick. Exact integers for hardware semantics.
    pub map_states: Vec<f64>,
    /// Emitted EWMA values.
    pub outputs: Vec<u16>,
    /// Number of times the zero policy replaced a 0 state.
    pub perturbations: usize,
}

impl Trace {
    pub fn entered_zero(&self) -> bool {
        self.map_states.contains(&0.0)
    }
}

pub fn generate(config: &GeneratorConfig) -> Vec<u16> {
    if config.semantics == Semantics::Hardware && config.zero_policy == ZeroPolicy::Faithful {
        return HardwareStream::new(config.seed, config.weights)
            .take(config.n)
            .collect();
    }
    trace(config).outputs
}

pub fn trace(config: &GeneratorConfig) -> Trace {
    match config.semantics {
        Semantics::Hardware => hardware_trace(config),
        Semantics::Poc => poc_trace(config),
    }
}

fn hardware_trace(config: &GeneratorConfig) -> Trace {
    let params = MapParams::chaotic();
    let mut state = sanitize_seed(config.seed);
    let mut ewma = Ewma::new(state, config.weights);
    let mut out = Trace {
        map_states: Vec::with_capacity(config.n),
        outputs: Vec::with_capacity(config.n),
        perturbations: 0,
    };
    for _ in 0..config.n {
        state = lmap_step(state, &params);
        out.map_states.push(f64::from(state.get()));
        out.outputs.push(ewma.update(state));
        if state == FixedSample::ZERO && config.zero_policy == ZeroPolicy::PerturbToOne {
            state = FixedSample::new(1);
            out.perturbations += 1;
        }
    }
    out
}

fn poc_trace(config: &GeneratorConfig) -> Trace {
    let x0 = f64::from(sanitize_seed(config.seed).get());
    if config.zero_policy == ZeroPolicy::Faithful {
        let run = PocRun::new(x0, config.n + 1, &config.weights);
        let outputs = run.floored().split_off(1);
        let mut map_states = run.raw;
        map_states.remove(0);
        return Trace {
            map_states,
            outputs,
            perturbations: 0,
        };
    }

    let w = &config.weights;
    let (old_w, new_w, denom) = (
        f64::from(w.old_weight()),
        f64::from(w.new_weight()),
        f64::from(w.denominator()),
    );
    let mut x = x0;
    let mut avg = x0;
    let mut out = Trace {
        map_states: Vec::with_capacity(config.n),
        outputs: Vec::with_capacity(config.n),
        perturbations: 0,
    };
    for _ in 0..config.n {
        x = poc_map_step(x, 4.0);
        avg = (old_w * avg + new_w * x) / denom;
        out.map_states.push(x);
        out.outputs.push(floor_to_sample(avg));
        if x == 0.0 {
            x = 1.0;
            out.perturbations += 1;
        }
    }
    out
}

/// Endless hardware-semantics output stream with the faithful zero policy.
#[derive(Clone, Debug)]
pub struct HardwareStream {
    state: FixedSample,
    ewma: Ewma,
    params: MapParams,
}

impl HardwareStream {
    pub fn new(seed: u16, weights: EwmaWeights) -> Self {
        let state = sanitize_seed(seed);
        HardwareStream {
            state,
            ewma: Ewma::new(state, weights),
            params: MapParams::chaotic(),
        }
    }

    pub fn map_state(&self) -> FixedSample {
        self.state
    }
}

impl Iterator for HardwareStream {
    type Item = u16;

    fn next(&mut self) -> Option<u16> {
        self.state = lmap_step(self.state, &self.params);
        Some(self.ewma.update(self.state))
    }
}

/// Shape of the eventually periodic orbit of one seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CycleReport {
    pub seed: u16,
    /// Steps taken before the orbit first lands on its cycle.
    pub tail_len: usize,
    pub cycle_len: usize,
    /// Smallest state on the cycle, used as its canonical name.
    pub representative: u16,
    pub entered_zero: bool,
}

/// Brent's algorithm on the 16-bit map.
pub fn find_cycle(seed: FixedSample, params: &MapParams) -> CycleReport {
    let f = |x: FixedSample| lmap_step(x, params);

    let mut power = 1usize;
    let mut lam = 1usize;
    let mut tortoise = seed;
    let mut hare = f(seed);
    while tortoise != hare {
        if power == lam {
            tortoise = hare;
            power *= 2;
            lam = 0;
        }
        hare = f(hare);
        lam += 1;
    }

    let mut mu = 0usize;
    tortoise = seed;
    hare = (0..lam).fold(seed, |x, _| f(x));
    let mut entered_zero = tortoise == FixedSample::ZERO;
    while tortoise != hare {
        tortoise = f(tortoise);
        hare = f(hare);
        entered_zero |= tortoise == FixedSample::ZERO;
        mu += 1;
    }

    let mut representative = tortoise;
    let mut x = tortoise;
    for _ in 1..lam {
        x = f(x);
        representative = representative.min(x);
    }
    entered_zero |= representative == FixedSample::ZERO;

    CycleReport {
        seed: seed.get(),
        tail_len: mu,
        cycle_len: lam,
        representative: representative.get(),
        entered_zero,
    }
}

/// One distinct cycle of the map with its basin of attraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CycleSummary {
    pub representative: u16,
    pub cycle_len: usize,
    pub basin_size: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Census {
    pub reports: Vec<CycleReport>,
    /// Sorted by basin size descending, then representative ascending.
    pub cycles: Vec<CycleSummary>,
}

impl Census {
    pub fn seeds(&self) -> usize {
        self.reports.len()
    }

    pub fn zero_fraction(&self) -> f64 {
        let absorbed = self.reports.iter().filter(|r| r.entered_zero).count();
        absorbed as f64 / self.reports.len() as f64
    }

    pub fn cycle_of(&self, representative: u16) -> Option<&CycleSummary> {
        self.cycles.iter().find(|c| c.representative == representative)
    }

    pub fn max_tail(&self) -> usize {
        self.reports.iter().map(|r| r.tail_len).max().unwrap_or(0)
    }
}

/// Cycle report for every one of the 65,536 seeds.
pub fn cycle_census(params: &MapParams) -> Census {
    let reports: Vec<CycleReport> = (0..STATE_COUNT)
        .into_par_iter()
        .map(|s| find_cycle(FixedSample::new(s as u16), params))
        .collect();

    let mut by_cycle: BTreeMap<u16, CycleSummary> = BTreeMap::new();
    for r in &reports {
        by_cycle
            .entry(r.representative)
            .or_insert(CycleSummary {
                representative: r.representative,
                cycle_len: r.cycle_len,
                basin_size: 0,
            })
            .basin_size += 1;
    }
    let mut cycles: Vec<CycleSummary> = by_cycle.into_values().collect();
    cycles.sort_by(|a, b| {
        b.basin_size
            .cmp(&a.basin_size)
            .then(a.representative.cmp(&b.representative))
    });

    Census { reports, cycles }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ewma_filter::{ewma_reset, ewma_step};

    #[test]
    fn sanitize_examples() {
        assert_eq!(sanitize_seed(0).get(), 1);
        assert_eq!(sanitize_seed(6000).get(), 6000);
        assert_eq!(sanitize_seed(65535).get(), 65535);
    }

    #[test]
    fn empty_streams() {
        for sem in [Semantics::Hardware, Semantics::Poc] {
            for zp in [ZeroPolicy::Faithful, ZeroPolicy::PerturbToOne] {
                let c = GeneratorConfig::new(42, 0).semantics(sem).zero_policy(zp);
                assert!(generate(&c).is_empty());
            }
        }
    }

    #[test]
    fn zero_seed_runs_from_one() {
        // Map states 4, 16, 64; EWMA from reset value 1.
        let out = generate(&GeneratorConfig::new(0, 3));
        let w = EwmaWeights::HARDWARE;
        let mut e = ewma_reset(FixedSample::new(1));
        let mut expect = Vec::new();
        for s in [4, 16, 64] {
            e = ewma_step(e, FixedSample::new(s), &w);
            expect.push(e.avg());
        }
        assert_eq!(out, expect);
        // floor((40 + 40) / 50) = 1, floor((40 + 160) / 50) = 4, floor((160 + 640) / 50) = 16
        assert_eq!(out, vec![1, 4, 16]);
    }

    #[test]
    fn vertex_seed_collapses() {
        let t = trace(&GeneratorConfig::new(32768, 3));
        assert_eq!(t.map_states, vec![65535.0, 0.0, 0.0]);
        // (40 * 32768 + 10 * 65535) / 50 = 39321, then 31456, then 25164
        assert_eq!(t.outputs, vec![39321, 31456, 25164]);
        assert!(t.entered_zero());
    }

    #[test]
    fn perturb_policy_breaks_zero_runs() {
        let c = GeneratorConfig::new(32768, 50).zero_policy(ZeroPolicy::PerturbToOne);
        let t = trace(&c);
        assert_eq!(&t.map_states[..4], &[65535.0, 0.0, 4.0, 16.0]);
        assert!(t.perturbations >= 1);
        for w in t.map_states.windows(2) {
            assert!(!(w[0] == 0.0 && w[1] == 0.0));
        }
    }

    #[test]
    fn poc_semantics_drops_seed_element() {
        let c = GeneratorConfig::new(6000, 5).semantics(Semantics::Poc);
        let full = crate::reference_models::poc_rolling_series(6000.0f64, 6);
        assert_eq!(generate(&c), full[1..].to_vec());
        let p = trace(&c.zero_policy(ZeroPolicy::PerturbToOne));
        assert_eq!(p.outputs, full[1..].to_vec());
        assert_eq!(p.perturbations, 0);
    }

    #[test]
    fn stream_matches_trace() {
        let c = GeneratorConfig::new(777, 500);
        assert_eq!(generate(&c), trace(&c).outputs);
    }

    #[test]
    fn cycle_examples() {
        let p = MapParams::chaotic();
        let r = find_cycle(FixedSample::ZERO, &p);
        assert_eq!((r.tail_len, r.cycle_len, r.entered_zero), (0, 1, true));
        let r = find_cycle(FixedSample::new(32768), &p);
        assert_eq!((r.tail_len, r.cycle_len, r.entered_zero), (2, 1, true));
        assert_eq!(r.representative, 0);
        let r = find_cycle(FixedSample::new(65535), &p);
        assert_eq!((r.tail_len, r.cycle_len), (1, 1));
    }
}
