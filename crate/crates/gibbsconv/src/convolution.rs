//! Convolution of Gibbs measures: the convolved Jacobian, the convolution
//! entropy, Hölder regularization, and iterated self-convolution.
//!
//! For an atomic measure `μ₂` the convolved Jacobian is the exact finite sum
//! `J̃(u) = Σ_i w_i J₁(u - x_i)`; the only discretization error is the grid
//! interpolation of `J₁`. The entropy of `ν = μ₁ * μ₂` is evaluated both as
//! the direct triple sum and through `J̃`, giving a built-in self-audit.

use rayon::prelude::*;

use crate::circle::{CirclePoint, GridFunction};
use crate::error::Result;
use crate::measures::AtomicMeasure;
use crate::transfer::{entropy_gibbs, gibbs_atoms, JacobianPotential};

/// `J̃(u) = Σ_i w_i J₁(u - x_i)` at one point, as an exact atom sum.
pub fn exact_convolved_value(j1: &JacobianPotential, mu2: &AtomicMeasure, u: CirclePoint) -> f64 {
    mu2.atoms()
        .iter()
        .map(|&(x, w)| w * j1.eval(u.sub(x)))
        .sum()
}

/// Convolve an arbitrary grid function with an atomic measure:
/// samples `Σ_i w_i g(u_k - x_i)` on the grid of `g`.
pub fn convolved_grid(g: &GridFunction, mu2: &AtomicMeasure) -> Result<GridFunction> {
    let n = g.len();
    let samples: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|k| {
            let u = CirclePoint::new(k as f64 / n as f64);
            mu2.atoms().iter().map(|&(x, w)| w * g.eval(u.sub(x))).sum()
        })
        .collect();
    GridFunction::from_samples(samples)
}

/// Jacobian of the convolution `μ₁ * μ₂`, sampled on the grid of `J₁`.
/// The pairing property is inherited exactly from each translate of `J₁`.
pub fn convolved_jacobian(j1: &JacobianPotential, mu2: &AtomicMeasure) -> Result<JacobianPotential> {
    JacobianPotential::with_floor(convolved_grid(j1.grid(), mu2)?, j1.floor_eps())
}

/// The convolution entropy together with its self-audit companion value.
#[derive(Clone, Copy, Debug)]
pub struct ConvolutionEntropy {
    /// Direct triple sum: `-Σ_u W(u) log(Σ_x w₂(x) J₁(u - x))` over the
    /// atoms `u` of `ν = μ₁ * μ₂`.
    pub triple_sum: f64,
    /// Alternative route: `-∫ log J̃ dν` with `J̃` sampled on the grid and
    /// interpolated at the atoms.
    pub via_jacobian: f64,
}

impl ConvolutionEntropy {
    /// The entropy value (the direct triple sum).
    pub fn value(&self) -> f64 {
        self.triple_sum
    }

    /// Disagreement between the two evaluation routes.
    pub fn audit_gap(&self) -> f64 {
        (self.triple_sum - self.via_jacobian).abs()
    }
}

/// Entropy of `ν = μ₁ * μ₂` for a Gibbs measure `μ₁` with Jacobian `J₁`.
///
/// Positions `s + r` that coincide are collapsed before taking logs, which
/// turns the quadratic triple sum into a sum over the atoms of `ν`.
pub fn convolution_entropy(
    j1: &JacobianPotential,
    mu1: &AtomicMeasure,
    mu2: &AtomicMeasure,
) -> Result<ConvolutionEntropy> {
    let nu = mu1.convolve(mu2)?;
    let jt = convolved_jacobian(j1, mu2)?;
    let parts: Vec<(f64, f64)> = nu
        .atoms()
        .par_iter()
        .map(|&(u, w)| {
            let den = exact_convolved_value(j1, mu2, u);
            (w * den.ln(), w * jt.eval(u).ln())
        })
        .collect();
    let triple_sum = -parts.iter().map(|p| p.0).sum::<f64>();
    let via_jacobian = -parts.iter().map(|p| p.1).sum::<f64>();
    Ok(ConvolutionEntropy {
        triple_sum,
        via_jacobian,
    })
}

/// Hölder constants before and after convolution.
#[derive(Clone, Copy, Debug)]
pub struct HolderReport {
    pub k1: f64,
    pub k_tilde: f64,
    pub pass: bool,
}

/// Checks that convolution does not increase the empirical Hölder constant.
pub fn holder_regularization_check(
    j1: &JacobianPotential,
    mu2: &AtomicMeasure,
    alpha: f64,
) -> Result<HolderReport> {
    let k1 = j1.grid().holder_constant(alpha)?;
    let jt = convolved_jacobian(j1, mu2)?;
    let k_tilde = jt.grid().holder_constant(alpha)?;
    Ok(HolderReport {
        k1,
        k_tilde,
        pass: k_tilde <= k1 + 1e-9,
    })
}

/// One row of the self-convolution iteration.
#[derive(Clone, Copy, Debug)]
pub struct IterationRow {
    pub k: u32,
    pub sup_dist_to_half: f64,
    pub entropy: f64,
}

/// Iterated convolution with the fixed base measure `μ = ρ_n(J)`:
/// `J_{k+1} = convolved_jacobian(J_k, μ)`, reporting at each step the sup
/// distance of `J_k` from the constant 1/2 and the entropy of its Gibbs
/// approximation. Rows run from `k = 0` (the input) through `k = k_max`.
pub fn iterate_self_convolution(
    j: &JacobianPotential,
    n_atoms: u32,
    k_max: u32,
) -> Result<Vec<IterationRow>> {
    let mu = gibbs_atoms(j, n_atoms)?;
    let half = GridFunction::constant(j.grid().log2_size(), 0.5)?;
    let mut rows = Vec::with_capacity(k_max as usize + 1);
    let mut current = j.clone();
    for k in 0..=k_max {
        rows.push(IterationRow {
            k,
            sup_dist_to_half: current.grid().sup_distance(&half),
            entropy: entropy_gibbs(&current, n_atoms)?,
        });
        if k < k_max {
            current = convolved_jacobian(&current, &mu)?;
        }
    }
    Ok(rows)
}

/// Re-evaluates the convolved Jacobian against `μ₂ = ρ_n(J₂)` by a second,
/// independently ordered atom sum (weights recomputed, summation reversed)
/// and returns the sup discrepancy over grid points.
pub fn dyadic_proof_crosscheck(
    j1: &JacobianPotential,
    j2: &JacobianPotential,
    n: u32,
) -> Result<f64> {
    let mu2 = gibbs_atoms(j2, n)?;
    let jt = convolved_jacobian(j1, &mu2)?;
    let k = 1usize << n;
    // Independent weight computation, per dyadic index.
    let weights: Vec<f64> = (0..k)
        .map(|idx| {
            let mut cur = idx;
            let mut w = 1.0f64;
            for _ in 0..n {
                w *= j2.eval(CirclePoint::new(cur as f64 / k as f64));
                cur = (2 * cur) & (k - 1);
            }
            w
        })
        .collect();
    let grid_n = j1.grid().len();
    let worst = (0..grid_n)
        .into_par_iter()
        .map(|g| {
            let u = CirclePoint::new(g as f64 / grid_n as f64);
            let direct: f64 = (0..k)
                .rev()
                .map(|idx| weights[idx] * j1.eval(u.sub(CirclePoint::new(idx as f64 / k as f64))))
                .sum();
            (direct - jt.eval(u)).abs()
        })
        .reduce(|| 0.0, f64::max);
    Ok(worst)
}
