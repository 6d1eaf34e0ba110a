//! Points and sampled functions on the circle `R/Z`.
//!
//! All dynamics in this crate live on the unit circle with the doubling map
//! `T(x) = 2x mod 1`. Functions are represented on dyadic grids with
//! wrap-around linear interpolation; linear interpolation commutes with the
//! antipodal shift `x -> x + 1/2` exactly, which the transfer-operator layer
//! relies on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point on the circle, stored as its representative in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct CirclePoint(f64);

impl CirclePoint {
    /// Reduce an arbitrary finite real number mod 1.
    pub fn new(x: f64) -> Self {
        debug_assert!(x.is_finite());
        let mut v = x.rem_euclid(1.0);
        // rem_euclid can round up to exactly 1.0 for tiny negative inputs.
        if v >= 1.0 {
            v -= 1.0;
        }
        CirclePoint(v)
    }

    /// Representative in `[0, 1)`.
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn add(self, other: CirclePoint) -> CirclePoint {
        CirclePoint::new(self.0 + other.0)
    }

    pub fn sub(self, other: CirclePoint) -> CirclePoint {
        CirclePoint::new(self.0 - other.0)
    }

    /// Antipodal point `x + 1/2`.
    pub fn antipode(self) -> CirclePoint {
        CirclePoint::new(self.0 + 0.5)
    }

    /// Circle distance `min(|x - y|, 1 - |x - y|)`.
    pub fn dist(self, other: CirclePoint) -> f64 {
        let d = (self.0 - other.0).abs();
        d.min(1.0 - d)
    }
}

/// The doubling map `T(x) = 2x mod 1`.
pub fn doubling_map(x: CirclePoint) -> CirclePoint {
    CirclePoint::new(2.0 * x.value())
}

/// The two preimages of `y` under the doubling map: `y/2` and `y/2 + 1/2`.
pub fn preimages(y: CirclePoint) -> [CirclePoint; 2] {
    let half = CirclePoint::new(y.value() / 2.0);
    [half, half.antipode()]
}

/// A real function on the circle sampled at `N = 2^m` equispaced points,
/// evaluated in between by wrap-around linear interpolation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    samples: Vec<f64>,
}

impl GridFunction {
    /// Build from explicit samples. The length must be a power of two, at
    /// least 2, and every sample must be finite.
    pub fn from_samples(samples: Vec<f64>) -> Result<Self> {
        let n = samples.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::Validation(format!(
                "grid length must be a power of two >= 2, got {n}"
            )));
        }
        if let Some(bad) = samples.iter().find(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("non-finite sample {bad}")));
        }
        Ok(GridFunction { samples })
    }

    /// Sample `f` at `2^m` equispaced points.
    pub fn from_fn(m: u32, f: impl Fn(f64) -> f64) -> Result<Self> {
        let n = 1usize << m;
        let samples = (0..n).map(|i| f(i as f64 / n as f64)).collect();
        GridFunction::from_samples(samples)
    }

    /// Constant function on a `2^m` grid.
    pub fn constant(m: u32, c: f64) -> Result<Self> {
        GridFunction::from_samples(vec![c; 1usize << m])
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Grids always hold at least two samples.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// `m` such that the grid has `2^m` points.
    pub fn log2_size(&self) -> u32 {
        self.samples.len().trailing_zeros()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Evaluate by wrap-around linear interpolation.
    pub fn eval(&self, x: CirclePoint) -> f64 {
        let n = self.samples.len();
        let t = x.value() * n as f64;
        let i = t.floor() as usize;
        let frac = t - i as f64;
        let i = i & (n - 1);
        let j = (i + 1) & (n - 1);
        self.samples[i] * (1.0 - frac) + self.samples[j] * frac
    }

    /// Convenience wrapper: evaluate at a real number reduced mod 1.
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.eval(CirclePoint::new(x))
    }

    /// Apply `f` to every sample.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<GridFunction> {
        GridFunction::from_samples(self.samples.iter().map(|&v| f(v)).collect())
    }

    /// Combine samplewise with another function on the same grid.
    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<GridFunction> {
        if self.len() != other.len() {
            return Err(Error::Validation(format!(
                "grid size mismatch: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        GridFunction::from_samples(
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    /// Composition with the doubling map: sample `k` of the result is sample
    /// `2k mod N` of `self`, which is exact on the grid.
    pub fn compose_doubling(&self) -> GridFunction {
        let n = self.samples.len();
        let samples = (0..n).map(|k| self.samples[(2 * k) & (n - 1)]).collect();
        GridFunction { samples }
    }

    /// Average of the samples (the grid quadrature of the mean).
    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// Sup distance between the two interpolants, measured on the finer of
    /// the two grids (where the pointwise difference of piecewise-linear
    /// functions attains its maximum).
    pub fn sup_distance(&self, other: &GridFunction) -> f64 {
        let n = self.len().max(other.len());
        let mut worst = 0.0f64;
        for i in 0..n {
            let x = CirclePoint::new(i as f64 / n as f64);
            worst = worst.max((self.eval(x) - other.eval(x)).abs());
        }
        worst
    }

    /// Empirical Hölder constant of exponent `alpha`: the maximum of
    /// `|f(x_i) - f(x_j)| / d(x_i, x_j)^alpha` over grid pairs. For grids
    /// larger than `2^12` the first index is subsampled to a `2^9`-point
    /// base grid while the second index still ranges over all points.
    pub fn holder_constant(&self, alpha: f64) -> Result<f64> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Validation(format!(
                "Hölder exponent must lie in (0, 1], got {alpha}"
            )));
        }
        let n = self.samples.len();
        let stride = if n > (1 << 12) { n >> 9 } else { 1 };
        // d(x_i, x_j) depends only on |i - j|; precompute 1/d^alpha.
        let inv_pow: Vec<f64> = (0..n)
            .map(|k| {
                if k == 0 {
                    0.0
                } else {
                    let d = (k.min(n - k)) as f64 / n as f64;
                    d.powf(alpha).recip()
                }
            })
            .collect();
        let mut worst = 0.0f64;
        for i in (0..n).step_by(stride) {
            let fi = self.samples[i];
            for j in 0..n {
                let k = if i >= j { i - j } else { j - i };
                worst = worst.max((fi - self.samples[j]).abs() * inv_pow[k]);
            }
        }
        Ok(worst)
    }
}
