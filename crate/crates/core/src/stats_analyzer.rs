//! Histogram, moments, normal overlay, chi-square goodness of fit and lag
//! autocorrelation.
//!
//! Standard deviations are population (divide by `n`) throughout. Moments are
//! always computed from the raw values, never from binned counts.

use std::io::{self, Write};

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::numfmt::sig9;
use crate::reference_models::GaussParams;
use crate::scalar::Real;

/// Minimum expected count per bin for the chi-square test.
pub const MIN_EXPECTED: f64 = 5.0;

pub fn as_real<T: Real>(values: &[u16]) -> Vec<T> {
    values.iter().map(|&v| T::from_count(v as usize)).collect()
}

/// Mean, population standard deviation and the third and fourth central moments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moments<T> {
    pub n: usize,
    pub mean: T,
    pub std: T,
    m3: T,
    m4: T,
}

impl<T: Real> Moments<T> {
    /// `m3 / std^3`; undefined for constant input or fewer than 3 values.
    pub fn skewness(&self) -> Result<T> {
        if self.n < 3 || self.std <= T::zero() {
            return Err(Error::Undefined("skewness"));
        }
        Ok(self.m3 / self.std.powi(3))
    }

    /// `m4 / std^4 - 3`; undefined for constant input or fewer than 4 values.
    pub fn excess_kurtosis(&self) -> Result<T> {
        if self.n < 4 || self.std <= T::zero() {
            return Err(Error::Undefined("excess kurtosis"));
        }
        Ok(self.m4 / self.std.powi(4) - T::lit(3.0))
    }
}

pub fn moments<T: Real>(values: &[T]) -> Result<Moments<T>> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = T::from_count(values.len());
    let mean = values.iter().fold(T::zero(), |a, &v| a + v) / n;
    let (mut m2, mut m3, mut m4) = (T::zero(), T::zero(), T::zero());
    for &v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 = m2 + d2;
        m3 = m3 + d2 * d;
        m4 = m4 + d2 * d2;
    }
    Ok(Moments {
        n: values.len(),
        mean,
        std: (m2 / n).sqrt(),
        m3: m3 / n,
        m4: m4 / n,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct HistogramReport<T> {
    /// `bins + 1` strictly increasing edges.
    pub bin_edges: Vec<T>,
    pub counts: Vec<u64>,
    pub n: usize,
    /// Values below `lo`, folded into the first bin.
    pub below: usize,
    /// Values above `hi`, folded into the last bin.
    pub above: usize,
    pub mean: T,
    pub std: T,
    pub skewness: Option<T>,
    pub excess_kurtosis: Option<T>,
}

impl<T: Real> HistogramReport<T> {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn lo(&self) -> T {
        self.bin_edges[0]
    }

    pub fn hi(&self) -> T {
        self.bin_edges[self.bins()]
    }

    /// Normalized so that the bars integrate to 1.
    pub fn densities(&self) -> Vec<T> {
        let n = T::from_count(self.n);
        self.counts
            .iter()
            .zip(self.bin_edges.windows(2))
            .map(|(&c, e)| T::from_count(c as usize) / (n * (e[1] - e[0])))
            .collect()
    }

    /// Index of the fullest bin (lowest index on ties).
    pub fn modal_bin(&self) -> usize {
        let max = *self.counts.iter().max().expect("at least one bin");
        self.counts.iter().position(|&c| c == max).unwrap()
    }

    /// Index of the bin `x` falls in, clamped to the edge bins.
    pub fn bin_of(&self, x: T) -> usize {
        bin_index(x, self.lo(), self.hi(), self.bins())
    }

    pub fn gauss(&self) -> Result<GaussParams<T>> {
        if self.std <= T::zero() {
            return Err(Error::Undefined("normal fit"));
        }
        GaussParams::new(self.mean, self.std)
    }

    /// Bins as `lo,hi,count,density` rows followed by a `key,value` summary.
    pub fn write_csv<W: Write>(&self, mut w: W, gof: Option<&GofResult>) -> io::Result<()> {
        writeln!(w, "lo,hi,count,density")?;
        for ((e, &c), d) in self.bin_edges.windows(2).zip(&self.counts).zip(self.densities()) {
            writeln!(
                w,
                "{},{},{},{}",
                sig9(e[0].as_f64()),
                sig9(e[1].as_f64()),
                c,
                sig9(d.as_f64())
            )?;
        }
        writeln!(w)?;
        writeln!(w, "key,value")?;
        let opt = |v: Option<T>| v.map_or_else(|| "undefined".to_string(), |v| sig9(v.as_f64()));
        writeln!(w, "n,{}", self.n)?;
        writeln!(w, "below_range,{}", self.below)?;
        writeln!(w, "above_range,{}", self.above)?;
        writeln!(w, "mean,{}", sig9(self.mean.as_f64()))?;
        writeln!(w, "std,{}", sig9(self.std.as_f64()))?;
        writeln!(w, "skewness,{}", opt(self.skewness))?;
        writeln!(w, "excess_kurtosis,{}", opt(self.excess_kurtosis))?;
        writeln!(w, "modal_bin,{}", self.modal_bin())?;
        match gof {
            Some(g) => {
                writeln!(w, "chi2,{}", sig9(g.statistic))?;
                writeln!(w, "dof,{}", g.dof)?;
                writeln!(w, "reject_at_1pct,{}", g.reject_at_1pct)?;
            }
            None => {
                writeln!(w, "chi2,undefined")?;
                writeln!(w, "dof,undefined")?;
                writeln!(w, "reject_at_1pct,undefined")?;
            }
        }
        Ok(())
    }
}

fn bin_index<T: Real>(x: T, lo: T, hi: T, bins: usize) -> usize {
    if x <= lo {
        return 0;
    }
    if x >= hi {
        return bins - 1;
    }
    let pos = ((x - lo) / (hi - lo) * T::from_count(bins)).floor();
    pos.to_usize().unwrap_or(0).min(bins - 1)
}

pub fn histogram<T: Real>(values: &[T], bins: usize, lo: T, hi: T) -> Result<HistogramReport<T>> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if bins == 0 {
        return Err(Error::InvalidParameter("bin count must be at least 1".into()));
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidRange {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
        });
    }

    let width = (hi - lo) / T::from_count(bins);
    let mut bin_edges: Vec<T> = (0..bins).map(|i| lo + width * T::from_count(i)).collect();
    bin_edges.push(hi);

    let mut counts = vec![0u64; bins];
    let (mut below, mut above) = (0, 0);
    for &v in values {
        if v < lo {
            below += 1;
        } else if v > hi {
            above += 1;
        }
        counts[bin_index(v, lo, hi, bins)] += 1;
    }

    let m = moments(values)?;
    Ok(HistogramReport {
        bin_edges,
        counts,
        n: values.len(),
        below,
        above,
        mean: m.mean,
        std: m.std,
        skewness: m.skewness().ok(),
        excess_kurtosis: m.excess_kurtosis().ok(),
    })
}

/// The fitted normal density at `points` evenly spaced positions across the
/// histogram range.
pub fn fit_normal_overlay<T: Real>(report: &HistogramReport<T>, points: usize) -> Result<Vec<(T, T)>> {
    let g = report.gauss()?;
    if points < 2 {
        return Err(Error::InvalidParameter("overlay needs at least 2 points".into()));
    }
    let (lo, hi) = (report.lo(), report.hi());
    let step = (hi - lo) / T::from_count(points - 1);
    Ok((0..points)
        .map(|i| {
            let x = if i == points - 1 { hi } else { lo + step * T::from_count(i) };
            (x, g.pdf(x))
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct GofResult {
    pub statistic: f64,
    pub dof: usize,
    pub effective_bins: usize,
    /// Chi-square quantile at 0.99 for `dof`.
    pub critical_1pct: f64,
    pub reject_at_1pct: bool,
}

/// Pearson `sum (O - E)^2 / E` over paired bins.
pub fn pearson_statistic(observed: &[u64], expected: &[f64]) -> f64 {
    observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum()
}

/// Expected counts under the fitted normal. The edge bins absorb the tails
/// because out-of-range values are folded into them.
pub fn expected_counts<T: Real>(report: &HistogramReport<T>) -> Result<Vec<f64>> {
    let g = report.gauss()?;
    let normal = Normal::new(g.mu().as_f64(), g.sigma().as_f64())
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let bins = report.bins();
    let cdf = |i: usize| -> f64 {
        if i == 0 {
            0.0
        } else if i == bins {
            1.0
        } else {
            normal.cdf(report.bin_edges[i].as_f64())
        }
    };
    let n = report.n as f64;
    Ok((0..bins).map(|i| n * (cdf(i + 1) - cdf(i))).collect())
}

/// Folds the outermost bins inward until both edge bins expect at least
/// [`MIN_EXPECTED`] counts.
pub fn merge_sparse_tails(observed: &[u64], expected: &[f64]) -> (Vec<u64>, Vec<f64>) {
    let mut o = observed.to_vec();
    let mut e = expected.to_vec();
    while e.len() > 1 && e[0] < MIN_EXPECTED {
        let (o0, e0) = (o.remove(0), e.remove(0));
        o[0] += o0;
        e[0] += e0;
    }
    while e.len() > 1 && e[e.len() - 1] < MIN_EXPECTED {
        let (ol, el) = (o.pop().unwrap(), e.pop().unwrap());
        *o.last_mut().unwrap() += ol;
        *e.last_mut().unwrap() += el;
    }
    (o, e)
}

/// Chi-square test of the histogram against the normal fitted by its own
/// mean and standard deviation (two estimated parameters, so `dof = bins - 3`).
pub fn chi_square_gof<T: Real>(report: &HistogramReport<T>) -> Result<GofResult> {
    let expected = expected_counts(report)?;
    let (o, e) = merge_sparse_tails(&report.counts, &expected);
    if o.len() < 4 {
        return Err(Error::InsufficientBins { effective: o.len() });
    }
    let statistic = pearson_statistic(&o, &e);
    let dof = o.len() - 3;
    let critical_1pct = ChiSquared::new(dof as f64)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?
        .inverse_cdf(0.99);
    Ok(GofResult {
        statistic,
        dof,
        effective_bins: o.len(),
        critical_1pct,
        reject_at_1pct: statistic > critical_1pct,
    })
}

/// Pearson correlation between the series and itself shifted by `lag`.
pub fn autocorr<T: Real>(values: &[T], lag: usize) -> Result<T> {
    let n = values.len();
    if n <= lag + 1 {
        return Err(Error::Undefined("autocorrelation"));
    }
    let a = &values[..n - lag];
    let b = &values[lag..];
    let len = T::from_count(a.len());
    let ma = a.iter().fold(T::zero(), |s, &v| s + v) / len;
    let mb = b.iter().fold(T::zero(), |s, &v| s + v) / len;
    let (mut sab, mut saa, mut sbb) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab = sab + dx * dy;
        saa = saa + dx * dx;
        sbb = sbb + dy * dy;
    }
    if saa <= T::zero() || sbb <= T::zero() {
        return Err(Error::Undefined("autocorrelation"));
    }
    let r = sab / (saa * sbb).sqrt();
    Ok(r.max(-T::one()).min(T::one()))
}
