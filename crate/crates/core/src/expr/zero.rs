//! Probabilistic zero testing.
//!
//! An expression is first simplified; an exact constant zero is accepted
//! immediately. Otherwise it is evaluated at `samples` pseudo-random points
//! of the sampling box (ChaCha8 seeded with `seed`). The verdict is zero iff
//! at every usable sample `|value| < eps * (1 + scale)`, where `scale` is the
//! sum of the absolute values of the top-level terms at that point. Samples
//! that land on a singularity are skipped; if every sample is singular the
//! test is inconclusive.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Params, ScalarExpr};
use crate::error::{Error, Result};

/// Default number of random samples.
pub const DEFAULT_SAMPLES: usize = 64;
/// Default absolute zero threshold (scaled by the local magnitude).
pub const DEFAULT_EPS: f64 = 1e-9;
/// Default sampling seed.
pub const DEFAULT_SEED: u64 = 0x5eed_c0de;

/// A region excluded from sampling: the open ball of `radius` around
/// `center`, measured in the listed coordinates only.
#[derive(Debug, Clone, PartialEq)]
pub struct Exclusion {
    pub coords: Vec<usize>,
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Exclusion {
    /// Tube of `radius` around the axis where the listed coordinates vanish.
    pub fn around_axis(coords: Vec<usize>, radius: f64) -> Self {
        let center = vec![0.0; coords.len()];
        Self {
            coords,
            center,
            radius,
        }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        let d2: f64 = self
            .coords
            .iter()
            .zip(&self.center)
            .map(|(&k, c)| (p[k] - c).powi(2))
            .sum();
        d2 < self.radius * self.radius
    }
}

/// Sampling domain, parameter values, and zero-test settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub exclusions: Vec<Exclusion>,
    pub params: Params,
    pub test: ZeroTest,
}

/// Zero-test settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroTest {
    pub samples: usize,
    pub eps: f64,
    pub seed: u64,
}

impl Default for ZeroTest {
    fn default() -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            eps: DEFAULT_EPS,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ZeroVerdict {
    Zero,
    Nonzero { witness: Vec<f64>, value: f64 },
}

impl ZeroVerdict {
    pub fn is_zero(&self) -> bool {
        matches!(self, ZeroVerdict::Zero)
    }
}

impl SamplingBox {
    /// The cube `[lo, hi]^dim` with no exclusions and no parameters.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        Self {
            lo: vec![lo; dim],
            hi: vec![hi; dim],
            exclusions: Vec::new(),
            params: Params::new(),
            test: ZeroTest::default(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn with_params(mut self, params: Params) -> Self {
        self.params = params;
        self
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn excluding(mut self, ex: Exclusion) -> Self {
        self.exclusions.push(ex);
        self
    }

    pub fn with_test(mut self, test: ZeroTest) -> Self {
        self.test = test;
        self
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    /// Deterministic sample points avoiding the exclusions.
    pub fn sample_points(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0;
        while out.len() < count && attempts < 100 * count.max(1) {
            attempts += 1;
            let p: Vec<f64> = self
                .lo
                .iter()
                .zip(&self.hi)
                .map(|(&a, &b)| if a < b { rng.random_range(a..b) } else { a })
                .collect();
            if self.exclusions.iter().all(|e| !e.contains(&p)) {
                out.push(p);
            }
        }
        out
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        self.sample_points(self.test.samples, self.test.seed)
    }
}

impl ScalarExpr {
    /// Probabilistic zero test over a sampling box.
    pub fn is_zero(&self, domain: &SamplingBox) -> Result<ZeroVerdict> {
        let s = self.simplify();
        if s.is_zero_const() {
            return Ok(ZeroVerdict::Zero);
        }
        if let Some(c) = s.as_const() {
            return Ok(ZeroVerdict::Nonzero {
                witness: domain.center(),
                value: c.to_f64(),
            });
        }
        let terms: Vec<_> = s.terms().iter().map(ScalarExpr::compile).collect();
        let bound: Vec<Vec<f64>> = terms
            .iter()
            .map(|t| t.bind(&domain.params))
            .collect::<Result<_>>()?;
        let mut stack = Vec::new();
        let mut usable = 0usize;
        let points = domain.points();
        'points: for p in &points {
            let mut sum = 0.0;
            let mut scale = 0.0;
            for (t, b) in terms.iter().zip(&bound) {
                match t.eval_with(p, b, &mut stack) {
                    Ok(v) => {
                        sum += v;
                        scale += v.abs();
                    }
                    Err(Error::Singularity { .. } | Error::Domain { .. }) => continue 'points,
                    Err(e) => return Err(e),
                }
            }
            usable += 1;
            if sum.abs() >= domain.test.eps * (1.0 + scale) {
                return Ok(ZeroVerdict::Nonzero {
                    witness: p.clone(),
                    value: sum,
                });
            }
        }
        if usable == 0 {
            return Err(Error::Inconclusive(format!(
                "all {} samples of `{s}` hit singularities",
                points.len()
            )));
        }
        Ok(ZeroVerdict::Zero)
    }
}
