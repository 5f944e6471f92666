//! Empirical count laws and their distance to a Poisson law.
//!
//! Total variation and the 1-Wasserstein distance between integer laws are
//! computed over `0..=K` with `K = ceil(mean + 12√(mean + 1) + 30)` (or the
//! largest observed value, if larger). Beyond `K` the empirical law has no
//! mass, and the Poisson contribution is replaced by an analytic upper bound
//! on its tail, which is far below f64 resolution for that cutoff.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{require, Error, Result};
use crate::math;

/// Histogram of nonnegative integer observations.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EmpiricalPmf {
    counts: BTreeMap<u64, u64>,
    total: u64,
}

impl EmpiricalPmf {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_samples(samples: impl IntoIterator<Item = u64>) -> Self {
        let mut pmf = Self::new();
        for s in samples {
            pmf.record(s);
        }
        pmf
    }

    pub fn record(&mut self, value: u64) {
        *self.counts.entry(value).or_insert(0) += 1;
        self.total += 1;
    }

    /// Adds another histogram into this one. Commutative and associative,
    /// so per-worker histograms can be reduced in any order.
    pub fn merge(&mut self, other: &EmpiricalPmf) {
        for (k, c) in &other.counts {
            *self.counts.entry(*k).or_insert(0) += c;
        }
        self.total += other.total;
    }

    #[inline]
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, value: u64) -> u64 {
        self.counts.get(&value).copied().unwrap_or(0)
    }

    /// `(value, occurrences)` in increasing order of value.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(k, c)| (*k, *c))
    }

    pub fn probability(&self, value: u64) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count(value) as f64 / self.total as f64
        }
    }

    pub fn max_value(&self) -> Option<u64> {
        self.counts.keys().next_back().copied()
    }

    pub fn mean(&self) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.counts
            .iter()
            .map(|(k, c)| *k as f64 * *c as f64)
            .sum::<f64>()
            / self.total as f64
    }

    /// Probabilities indexed by value, `0..=max_value`.
    pub fn dense(&self) -> Vec<f64> {
        let Some(max) = self.max_value() else {
            return Vec::new();
        };
        let mut out = alloc::vec![0.0; max as usize + 1];
        for (k, c) in &self.counts {
            out[*k as usize] = *c as f64 / self.total as f64;
        }
        out
    }
}

/// `e^{-λ} λᵏ / k!`, evaluated in log space.
pub fn poisson_pmf(k: u64, mean: f64) -> f64 {
    if mean == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let k = k as f64;
    math::exp(k * math::ln(mean) - mean - math::lgamma(k + 1.0))
}

/// Upper bound on `P(X > k)` for `X ~ Poisson(mean)`, valid when
/// `k + 2 > mean`: the pmf ratio beyond `k + 1` is at most `mean/(k + 2)`.
pub fn poisson_tail_bound(k: u64, mean: f64) -> f64 {
    let ratio = mean / (k as f64 + 2.0);
    if ratio >= 1.0 {
        return 1.0;
    }
    (poisson_pmf(k + 1, mean) / (1.0 - ratio)).min(1.0)
}

/// `ceil(mean + 12√(mean + 1) + 30)`.
pub fn tail_cutoff(mean: f64) -> u64 {
    math::ceil(mean + 12.0 * math::sqrt(mean + 1.0) + 30.0) as u64
}

/// Total variation distance between the law given by `probs` (indexed by
/// value) and Poisson(`mean`).
pub fn tv_distance_probs(probs: &[f64], mean: f64) -> Result<f64> {
    require(
        mean >= 0.0 && mean.is_finite(),
        "Poisson mean",
        "non-negative and finite",
        mean,
    )?;
    let cutoff = tail_cutoff(mean).max(probs.len().saturating_sub(1) as u64);
    let mut sum = 0.0;
    for k in 0..=cutoff {
        let p = probs.get(k as usize).copied().unwrap_or(0.0);
        sum += math::abs(p - poisson_pmf(k, mean));
    }
    sum += poisson_tail_bound(cutoff, mean);
    Ok((0.5 * sum).min(1.0))
}

pub fn tv_distance_to_poisson(pmf: &EmpiricalPmf, mean: f64) -> Result<f64> {
    tv_distance_probs(&pmf.dense(), mean)
}

/// `Σₖ |F̂(k) − F(k)|` between the law given by `probs` and Poisson(`mean`).
pub fn wasserstein1_probs(probs: &[f64], mean: f64) -> Result<f64> {
    require(
        mean >= 0.0 && mean.is_finite(),
        "Poisson mean",
        "non-negative and finite",
        mean,
    )?;
    let cutoff = tail_cutoff(mean).max(probs.len().saturating_sub(1) as u64);
    let (mut f_emp, mut f_poi, mut sum) = (0.0, 0.0, 0.0);
    for k in 0..=cutoff {
        f_emp += probs.get(k as usize).copied().unwrap_or(0.0);
        f_poi += poisson_pmf(k, mean);
        sum += math::abs(f_emp - f_poi);
    }
    // Beyond the cutoff F̂ = 1, so each term is P(X > k). Bound the first
    // few hundred; the bounds decay geometrically and underflow long before.
    for k in cutoff + 1..cutoff + 256 {
        sum += poisson_tail_bound(k, mean);
    }
    Ok(sum)
}

pub fn wasserstein1_to_poisson(pmf: &EmpiricalPmf, mean: f64) -> Result<f64> {
    wasserstein1_probs(&pmf.dense(), mean)
}

/// `Σₖ |F_p(k) − F_q(k)|` between two finitely supported integer laws.
pub fn wasserstein1_between(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len().max(q.len());
    let (mut fp, mut fq, mut sum) = (0.0, 0.0, 0.0);
    for k in 0..n {
        fp += p.get(k).copied().unwrap_or(0.0);
        fq += q.get(k).copied().unwrap_or(0.0);
        sum += math::abs(fp - fq);
    }
    sum
}

/// Sample mean and a halfwidth of three standard errors.
pub fn mean_ci(samples: &[f64]) -> Result<(f64, f64)> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    Ok((mean, 3.0 * math::sqrt(var / n as f64)))
}

/// Unbiased sample covariance and a jackknife halfwidth of three standard
/// errors. With two pairs there is no jackknife spread and the halfwidth is
/// infinite.
pub fn covariance_ci(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    // Work with centered data; sums of centered values are ~0.
    let (mut sx, mut sy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (a, b) = (a - mx, b - my);
        sx += a;
        sy += b;
        sxy += a * b;
    }
    let cov = (sxy - sx * sy / nf) / (nf - 1.0);
    if n == 2 {
        return Ok((cov, f64::INFINITY));
    }
    // Leave-one-out covariances in closed form.
    let m = nf - 1.0;
    let mut loo = Vec::with_capacity(n);
    for (a, b) in x.iter().zip(y) {
        let (a, b) = (a - mx, b - my);
        let (sx_i, sy_i, sxy_i) = (sx - a, sy - b, sxy - a * b);
        loo.push((sxy_i - sx_i * sy_i / m) / (m - 1.0));
    }
    let mean_loo = loo.iter().sum::<f64>() / nf;
    let var_jk = (nf - 1.0) / nf
        * loo
            .iter()
            .map(|c| (c - mean_loo) * (c - mean_loo))
            .sum::<f64>();
    Ok((cov, 3.0 * math::sqrt(var_jk)))
}
