//! Independent oracles for the fixed-point kernels, the cycle detector and
//! the moment estimator.

use num_bigint::BigUint;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lmap_prng::prng_pipeline::{cycle_census, find_cycle};
use lmap_prng::stats_analyzer::moments;
use lmap_prng::{ewma_reset, ewma_step, lmap_step, EwmaWeights, FixedSample, MapParams};

/// Nearest integer to `4 x (65535 - x) / 65535`, by exact quotient and remainder.
fn nearest_oracle(x: u32) -> u32 {
    let num = BigUint::from(4u32) * BigUint::from(x) * BigUint::from(65535 - x);
    let d = BigUint::from(65535u32);
    let q = &num / &d;
    let rem = &num % &d;
    let q = if rem * 2u32 > d { q + 1u32 } else { q };
    q.try_into().unwrap()
}

fn floor_oracle(avg: u32, xt: u32) -> u32 {
    let num = BigUint::from(40u32) * avg + BigUint::from(10u32) * xt;
    (num / BigUint::from(50u32)).try_into().unwrap()
}

fn hw(x: u16) -> u16 {
    lmap_step(FixedSample::new(x), &MapParams::chaotic()).get()
}

fn ewma(avg: u16, xt: u16) -> u16 {
    ewma_step(ewma_reset(FixedSample::new(avg)), FixedSample::new(xt), &EwmaWeights::HARDWARE).avg()
}

#[test]
fn map_matches_nearest_integer_oracle_everywhere() {
    for x in 0..=65535u32 {
        assert_eq!(u32::from(hw(x as u16)), nearest_oracle(x), "x = {x}");
    }
}

#[test]
fn map_is_symmetric_and_closed() {
    for x in 0..=65535u16 {
        assert_eq!(hw(x), hw(65535 - x));
    }
    assert_eq!(hw(0), 0);
}

#[test]
fn ewma_matches_floor_oracle_on_grid() {
    for i in 0..256u32 {
        for j in 0..256u32 {
            // stride 257 covers both 0 and 65535
            let (a, x) = (i * 257, j * 257);
            assert_eq!(u32::from(ewma(a as u16, x as u16)), floor_oracle(a, x));
        }
    }
}

#[test]
fn ewma_matches_floor_oracle_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100_000 {
        let (a, x): (u16, u16) = (rng.gen(), rng.gen());
        assert_eq!(u32::from(ewma(a, x)), floor_oracle(a.into(), x.into()));
    }
}

/// Tail and cycle length by recording the first visit time of every state.
fn naive_cycle(seed: u16) -> (usize, usize, bool) {
    let mut first_seen = vec![usize::MAX; 65536];
    let mut x = seed;
    let mut t = 0;
    let mut zero = false;
    while first_seen[x as usize] == usize::MAX {
        first_seen[x as usize] = t;
        zero |= x == 0;
        x = hw(x);
        t += 1;
    }
    let tail = first_seen[x as usize];
    (tail, t - tail, zero)
}

#[test]
fn brent_agrees_with_visited_set() {
    let p = MapParams::chaotic();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let seeds = (0..256u16).chain((0..100).map(|_| rng.gen::<u16>()));
    for s in seeds {
        let r = find_cycle(FixedSample::new(s), &p);
        let (tail, cycle, zero) = naive_cycle(s);
        assert_eq!((r.tail_len, r.cycle_len, r.entered_zero), (tail, cycle, zero), "seed {s}");
        assert!(r.tail_len + r.cycle_len <= 65536);
        assert!(r.cycle_len >= 1);
    }
}

#[test]
fn seed_one_orbit() {
    let r = find_cycle(FixedSample::new(1), &MapParams::chaotic());
    let (tail, cycle, _) = naive_cycle(1);
    assert_eq!((r.tail_len, r.cycle_len), (tail, cycle));
    assert!(tail + cycle <= 65536);
}

#[test]
fn census_partitions_the_state_space() {
    let c = cycle_census(&MapParams::chaotic());
    assert_eq!(c.seeds(), 65536);
    assert_eq!(c.cycles.iter().map(|x| x.basin_size).sum::<usize>(), 65536);
    let zero = c.cycle_of(0).expect("zero fixed point");
    assert_eq!(zero.cycle_len, 1);
    assert!(zero.basin_size >= 2);
    for w in c.cycles.windows(2) {
        assert!(
            w[0].basin_size > w[1].basin_size
                || (w[0].basin_size == w[1].basin_size && w[0].representative < w[1].representative)
        );
    }
    for r in &c.reports {
        assert!(r.tail_len + r.cycle_len <= 65536);
    }
    // every report's representative must actually lie on a cycle of the stated length
    for cyc in &c.cycles {
        let mut x = cyc.representative;
        for _ in 0..cyc.cycle_len {
            x = hw(x);
        }
        assert_eq!(x, cyc.representative);
    }
    // zero fraction matches the zero cycle's basin
    assert_eq!(c.zero_fraction(), zero.basin_size as f64 / 65536.0);
    assert_eq!(c, cycle_census(&MapParams::chaotic()));
}

/// Central moments from exact integer power sums.
fn power_sum_moments(v: &[u16]) -> (f64, f64, f64, f64) {
    let n = v.len() as i128;
    let (mut s1, mut s2, mut s3, mut s4) = (0i128, 0i128, 0i128, 0i128);
    for &x in v {
        let x = i128::from(x);
        s1 += x;
        s2 += x * x;
        s3 += x * x * x;
        s4 += x * x * x * x;
    }
    let nf = n as f64;
    let m2 = (n * s2 - s1 * s1) as f64 / (nf * nf);
    let m3 = (n * n * s3 - 3 * n * s1 * s2 + 2 * s1 * s1 * s1) as f64 / (nf * nf * nf);
    let m4 = (n * n * n * s4 - 4 * n * n * s1 * s3 + 6 * n * s1 * s1 * s2 - 3 * s1 * s1 * s1 * s1) as f64
        / (nf * nf * nf * nf);
    (s1 as f64 / nf, m2, m3, m4)
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

#[test]
fn moments_agree_with_power_sum_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let len = rng.gen_range(4..200);
        let v: Vec<u16> = (0..len).map(|_| rng.gen()).collect();
        let reals: Vec<f64> = v.iter().map(|&x| f64::from(x)).collect();
        let m = moments(&reals).unwrap();
        let (mean, m2, m3, m4) = power_sum_moments(&v);
        assert!(rel_close(m.mean, mean, 1e-9));
        assert!(rel_close(m.std, m2.sqrt(), 1e-9));
        let skew = m3 / m2.powf(1.5);
        let kurt = m4 / (m2 * m2) - 3.0;
        // skewness can be near zero, so compare on the scale of the moment itself
        assert!((m.skewness().unwrap() - skew).abs() <= 1e-9 * (1.0 + skew.abs()));
        assert!((m.excess_kurtosis().unwrap() - kurt).abs() <= 1e-9 * (1.0 + kurt.abs()));
    }
}

proptest! {
    #[test]
    fn ewma_betweenness_and_monotonicity(a in any::<u16>(), b in any::<u16>(), x in any::<u16>()) {
        let y = ewma(a, x);
        prop_assert!(a.min(x) <= y && y <= a.max(x));
        let (lo, hi) = (a.min(b), a.max(b));
        prop_assert!(ewma(lo, x) <= ewma(hi, x));
        prop_assert!(ewma(x, lo) <= ewma(x, hi));
    }

    #[test]
    fn ewma_any_valid_weights_stays_between(old in 1u32..1000, new in 1u32..1000, a in any::<u16>(), x in any::<u16>()) {
        let w = EwmaWeights::new(old, new, old + new).unwrap();
        let y = ewma_step(ewma_reset(FixedSample::new(a)), FixedSample::new(x), &w).avg();
        prop_assert!(a.min(x) <= y && y <= a.max(x));
    }
}
