//! Atomic probability measures on the circle.
//!
//! Every measure in this crate is a finite convex combination of point
//! masses. Pushforwards, convolutions, and arc masses are all exact finite
//! operations on the atom list.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::circle::{doubling_map, CirclePoint, GridFunction};
use crate::error::{Error, Result};

/// Atoms closer than this (on the circle) are merged during canonicalization.
pub const MERGE_TOL: f64 = 1e-15;

/// Total-mass validation tolerance.
pub const MASS_TOL: f64 = 1e-10;

/// Hard cap on the number of atom pairs a convolution may touch.
pub const CONVOLVE_PAIR_GUARD: u64 = 1 << 26;

/// A probability measure given by finitely many weighted point masses,
/// kept sorted by position with nearby atoms merged.
#[derive(Clone, Debug)]
pub struct AtomicMeasure {
    atoms: Vec<(CirclePoint, f64)>,
}

#[derive(Serialize, Deserialize)]
struct AtomsJson {
    atoms: Vec<(f64, f64)>,
}

impl AtomicMeasure {
    /// Build from `(position, weight)` pairs. Weights must be positive and
    /// sum to 1 within `MASS_TOL`; positions are reduced mod 1, sorted, and
    /// atoms within `MERGE_TOL` of each other are merged.
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Validation("measure needs at least one atom".into()));
        }
        let mut pts = Vec::with_capacity(atoms.len());
        for (x, w) in atoms {
            if !x.is_finite() || !w.is_finite() {
                return Err(Error::Validation(format!("non-finite atom ({x}, {w})")));
            }
            if w <= 0.0 {
                return Err(Error::Validation(format!("non-positive weight {w}")));
            }
            pts.push((CirclePoint::new(x), w));
        }
        let mut m = AtomicMeasure { atoms: pts };
        m.canonicalize();
        let total = m.total_mass();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::Validation(format!(
                "weights sum to {total}, expected 1 within {MASS_TOL:e}"
            )));
        }
        Ok(m)
    }

    fn canonicalize(&mut self) {
        self.atoms
            .sort_by(|a, b| a.0.value().partial_cmp(&b.0.value()).unwrap());
        let mut merged: Vec<(CirclePoint, f64)> = Vec::with_capacity(self.atoms.len());
        for &(x, w) in &self.atoms {
            match merged.last_mut() {
                Some(last) if x.dist(last.0) <= MERGE_TOL => last.1 += w,
                _ => merged.push((x, w)),
            }
        }
        // The wrap-around pair (last, first) may also be mergeable.
        if merged.len() > 1 {
            let first = merged[0];
            let last = *merged.last().unwrap();
            if first.0.dist(last.0) <= MERGE_TOL {
                merged[0].1 += last.1;
                merged.pop();
            }
        }
        self.atoms = merged;
    }

    /// Point mass at `x`.
    pub fn dirac(x: f64) -> Result<Self> {
        AtomicMeasure::new(vec![(x, 1.0)])
    }

    /// Uniform measure on the `2^n` dyadic rationals, the level-`n` atomic
    /// stand-in for Lebesgue measure.
    pub fn lebesgue_level(n: u32) -> Result<Self> {
        let k = 1usize << n;
        let w = 1.0 / k as f64;
        AtomicMeasure::new((0..k).map(|j| (j as f64 / k as f64, w)).collect())
    }

    /// The invariant measure on the period-2 orbit `{1/3, 2/3}`.
    pub fn periodic_third() -> Result<Self> {
        AtomicMeasure::new(vec![(1.0 / 3.0, 0.5), (2.0 / 3.0, 0.5)])
    }

    pub fn atoms(&self) -> &[(CirclePoint, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|&(_, w)| w).sum()
    }

    /// `∫ f dμ` with `f` evaluated by interpolation.
    pub fn integrate(&self, f: &GridFunction) -> f64 {
        self.atoms.iter().map(|&(x, w)| w * f.eval(x)).sum()
    }

    /// `∫ f dμ` for a closure.
    pub fn integrate_fn(&self, f: impl Fn(CirclePoint) -> f64) -> f64 {
        self.atoms.iter().map(|&(x, w)| w * f(x)).sum()
    }

    /// Convolution `μ * ν`: atoms at all sums `x + y`, weights multiplied,
    /// coincident positions accumulated. Guarded by `CONVOLVE_PAIR_GUARD`.
    pub fn convolve(&self, other: &AtomicMeasure) -> Result<AtomicMeasure> {
        let pairs = self.len() as u64 * other.len() as u64;
        if pairs > CONVOLVE_PAIR_GUARD {
            return Err(Error::Resource(format!(
                "convolution would touch {pairs} atom pairs (guard {CONVOLVE_PAIR_GUARD})"
            )));
        }
        // Accumulate by exact position bits; the final canonicalize pass
        // still merges positions that differ below MERGE_TOL.
        let mut acc: HashMap<u64, (CirclePoint, f64)> = HashMap::with_capacity(self.len());
        for &(x, wx) in &self.atoms {
            for &(y, wy) in &other.atoms {
                let u = x.add(y);
                acc.entry(u.value().to_bits())
                    .and_modify(|e| e.1 += wx * wy)
                    .or_insert((u, wx * wy));
            }
        }
        let mut m = AtomicMeasure {
            atoms: acc.into_values().collect(),
        };
        m.canonicalize();
        Ok(m)
    }

    /// Pushforward under the doubling map.
    pub fn pushforward_doubling(&self) -> AtomicMeasure {
        let mut m = AtomicMeasure {
            atoms: self
                .atoms
                .iter()
                .map(|&(x, w)| (doubling_map(x), w))
                .collect(),
        };
        m.canonicalize();
        m
    }

    /// Mass of the half-open forward arc `[a, b)` (going counterclockwise
    /// from `a`; wraps around when `b < a`).
    pub fn arc_mass(&self, a: f64, b: f64) -> f64 {
        let a = CirclePoint::new(a).value();
        let b = CirclePoint::new(b).value();
        self.atoms
            .iter()
            .filter(|&&(x, _)| {
                let x = x.value();
                if a <= b {
                    a <= x && x < b
                } else {
                    x >= a || x < b
                }
            })
            .map(|&(_, w)| w)
            .sum()
    }

    /// Serialize as `{"atoms": [[x, w], ...]}`.
    pub fn to_json(&self) -> Result<String> {
        let j = AtomsJson {
            atoms: self.atoms.iter().map(|&(x, w)| (x.value(), w)).collect(),
        };
        Ok(serde_json::to_string(&j)?)
    }

    /// Parse and validate the JSON form produced by [`to_json`](Self::to_json).
    pub fn from_json(s: &str) -> Result<Self> {
        let j: AtomsJson = serde_json::from_str(s)?;
        AtomicMeasure::new(j.atoms)
    }
}
