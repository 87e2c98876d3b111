//! Deterministic Monte Carlo means.
//!
//! Samples are grouped into fixed blocks. Each block is reduced with Welford's
//! update and blocks are merged in index order, so the floating-point result
//! does not depend on the number of worker threads.

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;

use crate::rng::SeedSequence;

const BLOCK: u64 = 1024;

/// Running mean and centred second moment of a vector-valued sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    count: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Moments {
    pub fn new(dim: usize) -> Self {
        Moments { count: 0, mean: vec![0.0; dim], m2: vec![0.0; dim] }
    }

    pub fn push(&mut self, x: &[f64]) {
        self.count += 1;
        let n = self.count as f64;
        for ((m, s), &v) in self.mean.iter_mut().zip(&mut self.m2).zip(x) {
            let d = v - *m;
            *m += d / n;
            *s += d * (v - *m);
        }
    }

    /// Chan et al. pairwise combination.
    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other.clone();
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        for i in 0..self.mean.len() {
            let d = other.mean[i] - self.mean[i];
            self.mean[i] += d * nb / n;
            self.m2[i] += other.m2[i] + d * d * na * nb / n;
        }
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self, i: usize) -> f64 {
        self.mean[i]
    }

    /// Standard error of the mean of component `i`.
    pub fn stderr(&self, i: usize) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        (self.m2[i] / (n - 1.0) / n).sqrt()
    }

    pub fn estimate(&self, i: usize) -> Estimate {
        Estimate { mean: self.mean(i), stderr: self.stderr(i), samples: self.count }
    }

    /// Components `i` and `i + 1` read as real and imaginary parts.
    pub fn complex_estimate(&self, i: usize) -> ComplexEstimate {
        ComplexEstimate {
            mean: Complex64::new(self.mean(i), self.mean(i + 1)),
            stderr_re: self.stderr(i),
            stderr_im: self.stderr(i + 1),
            samples: self.count,
        }
    }
}

/// A real Monte Carlo mean with its 1-sigma standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
}

impl Estimate {
    /// `|mean - target| / stderr`; zero when both the spread and the
    /// deviation vanish.
    pub fn z_score(&self, target: f64) -> f64 {
        z(self.mean - target, self.stderr)
    }
}

/// A complex Monte Carlo mean with componentwise standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexEstimate {
    pub mean: Complex64,
    pub stderr_re: f64,
    pub stderr_im: f64,
    pub samples: u64,
}

impl ComplexEstimate {
    /// Larger of the real and imaginary z-scores.
    pub fn z_score(&self, target: Complex64) -> f64 {
        let d = self.mean - target;
        z(d.re, self.stderr_re).max(z(d.im, self.stderr_im))
    }

    pub fn stderr(&self) -> f64 {
        self.stderr_re.hypot(self.stderr_im)
    }
}

fn z(deviation: f64, stderr: f64) -> f64 {
    if deviation == 0.0 {
        0.0
    } else if stderr == 0.0 {
        f64::INFINITY
    } else {
        deviation.abs() / stderr
    }
}

/// Mean of `f` over `samples` draws. `f(rng, i, out)` writes `dim` values for
/// sample `i`, with `rng` being substream `i` of `seq`.
pub fn sample_mean<F>(seq: &SeedSequence, samples: u64, dim: usize, f: F) -> Moments
where
    F: Fn(&mut ChaCha8Rng, u64, &mut [f64]) + Sync,
{
    let blocks = samples.div_ceil(BLOCK);
    let run_block = |b: u64| {
        let mut acc = Moments::new(dim);
        let mut out = vec![0.0; dim];
        for i in (b * BLOCK)..((b + 1) * BLOCK).min(samples) {
            let mut rng = seq.stream(i);
            f(&mut rng, i, &mut out);
            acc.push(&out);
        }
        acc
    };
    #[cfg(feature = "parallel")]
    let partial: Vec<Moments> = {
        use rayon::prelude::*;
        (0..blocks).into_par_iter().map(run_block).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let partial: Vec<Moments> = (0..blocks).map(run_block).collect();

    partial.iter().fold(Moments::new(dim), |mut acc, m| {
        acc.merge(m);
        acc
    })
}
