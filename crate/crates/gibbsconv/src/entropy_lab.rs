//! Variational entropy machinery, entropy derivatives along curves of Gibbs
//! measures, and affine Jacobian blends.
//!
//! Entropy admits the dual characterization
//! `h(μ) = inf_{v>0} ∫ log(L₀v / v) dμ` with `L₀` the unweighted transfer
//! operator; the infimum is attained at `v = J`. This module realizes the
//! infimum by descent, builds the explicit near-optimal candidate for
//! convolutions, and differentiates entropy along one-parameter families of
//! Jacobians. Derivatives of Gibbs averages are computed with the full
//! linear-response series `Σ_{n≥0} ∫ ẇ · L^n(G - ∫G dμ) dμ`; truncating the
//! series at its first term reproduces the naive first-order formula, which
//! is reported separately where relevant.

use rayon::prelude::*;
use serde::Serialize;

use crate::circle::{CirclePoint, GridFunction};
use crate::convolution::{convolved_grid, convolved_jacobian, convolution_entropy};
use crate::error::{Error, Result};
use crate::measures::AtomicMeasure;
use crate::transfer::{
    gibbs_atoms, normalize_potential, power_iterate, ruelle_apply, JacobianPotential,
    DEFAULT_EIGEN_MAX_ITERS, DEFAULT_EIGEN_TOL,
};

/// A perturbation direction for a Gibbs family, mean-zero against the
/// reference measure supplied at construction.
#[derive(Clone, Debug)]
pub struct TangentVector {
    z3: GridFunction,
}

impl TangentVector {
    /// Wrap a direction, validating `|∫ z3 dμ₁| ≤ 1e-10`.
    pub fn new(z3: GridFunction, mu1: &AtomicMeasure) -> Result<Self> {
        let mean = mu1.integrate(&z3);
        if mean.abs() > 1e-10 {
            return Err(Error::Validation(format!(
                "tangent direction has mean {mean:e} against the reference measure"
            )));
        }
        Ok(TangentVector { z3 })
    }

    pub fn grid(&self) -> &GridFunction {
        &self.z3
    }
}

/// Project an arbitrary direction onto the tangent space by subtracting its
/// mean against `μ₁`.
pub fn tangent_project(eta: &GridFunction, mu1: &AtomicMeasure) -> Result<TangentVector> {
    let mean = mu1.integrate(eta);
    TangentVector::new(eta.map(|v| v - mean)?, mu1)
}

/// `F(v) = ∫ log((v(s/2) + v(s/2 + 1/2)) / v(s)) dμ(s)` for positive `v`.
pub fn variational_functional(v: &GridFunction, mu: &AtomicMeasure) -> Result<f64> {
    if let Some(bad) = v.samples().iter().find(|&&x| x <= 0.0) {
        return Err(Error::Validation(format!(
            "variational test function must be positive, found sample {bad}"
        )));
    }
    Ok(mu.integrate_fn(|s| {
        let x0 = CirclePoint::new(s.value() / 2.0);
        let l0 = v.eval(x0) + v.eval(x0.antipode());
        (l0 / v.eval(s)).ln()
    }))
}

/// The explicit near-optimal test function for a convolution:
/// `u(s) = exp(∫ log(Σ_x w₂(x) J₁(s + r - x)) dμ₁(r))`.
///
/// Validates the two structural facts it is built to satisfy: `L₀u ≤ 1`
/// at every grid point, and `-∫ log u dμ₂` equals the convolution entropy.
pub fn variational_candidate(
    j1: &JacobianPotential,
    mu1: &AtomicMeasure,
    mu2: &AtomicMeasure,
) -> Result<GridFunction> {
    let jt = convolved_jacobian(j1, mu2)?;
    let n = j1.grid().len();
    let samples: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|k| {
            let s = CirclePoint::new(k as f64 / n as f64);
            mu1.integrate_fn(|r| jt.eval(s.add(r)).ln()).exp()
        })
        .collect();
    let u = GridFunction::from_samples(samples)?;
    for k in 0..n {
        let x0 = CirclePoint::new(k as f64 / (2 * n) as f64);
        let l0 = u.eval(x0) + u.eval(x0.antipode());
        if l0 > 1.0 + 1e-9 {
            return Err(Error::Optimization(format!(
                "candidate violates L0 u <= 1 at grid point {k}: {l0}"
            )));
        }
    }
    let lhs = -mu2.integrate_fn(|s| u.eval(s).ln());
    let h = convolution_entropy(j1, mu1, mu2)?.value();
    if (lhs - h).abs() > 1e-6 {
        return Err(Error::Optimization(format!(
            "candidate entropy identity violated: {lhs} vs {h}"
        )));
    }
    Ok(u)
}

/// Result of a variational descent run.
#[derive(Clone, Debug)]
pub struct VariationalRun {
    pub v: GridFunction,
    pub value: f64,
    /// Objective after each accepted step (non-increasing).
    pub trace: Vec<f64>,
}

/// Descend the entropy functional over positive test functions.
///
/// The objective splits the functional across consecutive atom levels,
/// `∫ log L₀v dρ_n - ∫ log v dρ_{n+1}`, which is bounded below by the
/// level-`n+1` entropy for every positive `v` (pointwise log-sum inequality
/// plus the exact level-transfer identity) — so the descent cannot tunnel
/// below the entropy through quadrature artifacts of a single atom level.
/// `v` is parametrized by its log-samples, keeping it positive; steps are
/// halved on rejection and grown on acceptance.
pub fn minimize_variational(
    j: &JacobianPotential,
    level: u32,
    v0: &GridFunction,
    steps: usize,
    rate: f64,
) -> Result<VariationalRun> {
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::Validation(format!("rate must be positive, got {rate}")));
    }
    if let Some(bad) = v0.samples().iter().find(|&&x| x <= 0.0) {
        return Err(Error::Validation(format!(
            "initial test function must be positive, found sample {bad}"
        )));
    }
    let rho = gibbs_atoms(j, level)?;
    let rho_fine = gibbs_atoms(j, level + 1)?;
    let nv = v0.len();

    let objective = |theta: &[f64]| -> f64 {
        let v = GridFunction::from_samples(theta.iter().map(|t| t.exp()).collect())
            .expect("log-parametrized samples are positive");
        let coarse = rho.integrate_fn(|s| {
            let x0 = CirclePoint::new(s.value() / 2.0);
            (v.eval(x0) + v.eval(x0.antipode())).ln()
        });
        let fine = rho_fine.integrate_fn(|y| v.eval(y).ln());
        coarse - fine
    };

    // Accumulate d(obj)/d(theta_i) through the interpolation weights.
    let gradient = |theta: &[f64]| -> Vec<f64> {
        let v: Vec<f64> = theta.iter().map(|t| t.exp()).collect();
        let interp = |x: CirclePoint| -> (usize, usize, f64, f64) {
            let t = x.value() * nv as f64;
            let i = (t.floor() as usize) & (nv - 1);
            let frac = t - t.floor();
            (i, (i + 1) & (nv - 1), 1.0 - frac, frac)
        };
        let val = |x: CirclePoint| -> f64 {
            let (i, jx, a, b) = interp(x);
            v[i] * a + v[jx] * b
        };
        let mut grad = vec![0.0f64; nv];
        for &(s, w) in rho.atoms() {
            let x0 = CirclePoint::new(s.value() / 2.0);
            let x1 = x0.antipode();
            let l0 = val(x0) + val(x1);
            for x in [x0, x1] {
                let (i, jx, a, b) = interp(x);
                grad[i] += w * a * v[i] / l0;
                grad[jx] += w * b * v[jx] / l0;
            }
        }
        for &(y, w) in rho_fine.atoms() {
            let (i, jx, a, b) = interp(y);
            let vy = v[i] * a + v[jx] * b;
            grad[i] -= w * a * v[i] / vy;
            grad[jx] -= w * b * v[jx] / vy;
        }
        grad
    };

    let mut theta: Vec<f64> = v0.samples().iter().map(|&x| x.ln()).collect();
    let mut value = objective(&theta);
    if !value.is_finite() {
        return Err(Error::Optimization(format!(
            "objective is non-finite at the initial point: {value}"
        )));
    }
    let mut trace = vec![value];
    let mut step_size = rate;
    let rate_cap = rate * 1e3;
    'outer: for _ in 0..steps {
        let grad = gradient(&theta);
        let mut rejected = 0;
        loop {
            let cand: Vec<f64> = theta
                .iter()
                .zip(&grad)
                .map(|(t, g)| t - step_size * g)
                .collect();
            let cand_val = objective(&cand);
            if cand_val.is_finite() && cand_val <= value {
                theta = cand;
                value = cand_val;
                trace.push(value);
                step_size = (step_size * 1.3).min(rate_cap);
                break;
            }
            step_size *= 0.5;
            rejected += 1;
            if rejected >= 10 && !cand_val.is_finite() {
                return Err(Error::Optimization(
                    "objective stayed non-finite across 10 backtracking steps".into(),
                ));
            }
            if step_size < 1e-18 {
                break 'outer; // no further progress possible
            }
        }
    }
    let v = GridFunction::from_samples(theta.iter().map(|t| t.exp()).collect())?;
    Ok(VariationalRun { v, value, trace })
}

/// Derivative of the Gibbs average `t ↦ ∫ G dμ_t` at `t = 0`, where the
/// family has normalized Jacobian `J` and logarithmic derivative
/// `ẇ = d/dt log J_t`: the series `Σ_{n≥0} ∫ ẇ · L^n(G - ∫G dμ) dμ`.
pub fn gibbs_linear_response(
    j: &JacobianPotential,
    direction: &GridFunction,
    observable: &GridFunction,
    mu: &AtomicMeasure,
) -> Result<f64> {
    let scale = observable
        .samples()
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1.0);
    let mean = mu.integrate(observable);
    let mut cur = observable.map(|v| v - mean)?;
    let mut acc = 0.0;
    for _ in 0..512 {
        acc += mu.integrate(&direction.zip_with(&cur, |a, b| a * b)?);
        cur = ruelle_apply(j.grid(), &cur)?;
        // Keep the iterate mean-zero against μ to stop quadrature drift.
        let drift = mu.integrate(&cur);
        cur = cur.map(|v| v - drift)?;
        let sup = cur.samples().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if sup < 1e-14 * scale {
            return Ok(acc);
        }
    }
    Err(Error::Convergence {
        iters: 512,
        residual: cur.samples().iter().fold(0.0f64, |m, v| m.max(v.abs())),
        tol: 1e-14 * scale,
    })
}

/// Entropy derivative of a convolution family, computed two independent ways.
#[derive(Clone, Debug, Serialize)]
pub struct DerivativeReport {
    /// Assembled derivative: explicit integrand term plus the
    /// linear-response term for the moving measure.
    pub formula_value: f64,
    /// Central finite difference of the convolution entropy itself.
    pub finite_difference_value: f64,
    pub fd_step: f64,
    /// Central-difference derivative of the leading eigenvalue.
    pub lambda_prime: f64,
    /// Central-difference derivative of the leading eigenfunction.
    pub phi_prime: GridFunction,
}

impl DerivativeReport {
    /// `|formula - fd| / max(|fd|, 1e-6)`.
    pub fn relative_gap(&self) -> f64 {
        (self.formula_value - self.finite_difference_value).abs()
            / self.finite_difference_value.abs().max(1e-6)
    }
}

/// Differentiate `t ↦ h(μ₁ᵗ * μ₂)` at `t = 0`, where `μ₁ᵗ` is the Gibbs
/// measure of the normalized potential `log J₁ + t·z₃` and `μ₂` is held
/// fixed. `μ₁` is realized as its level-`level` atom approximation.
pub fn entropy_derivative_formula(
    j1: &JacobianPotential,
    mu2: &AtomicMeasure,
    z3: &TangentVector,
    level: u32,
    fd_step: f64,
) -> Result<DerivativeReport> {
    if !(fd_step > 0.0 && fd_step <= 1e-2) {
        return Err(Error::Validation(format!(
            "fd_step must lie in (0, 1e-2], got {fd_step}"
        )));
    }
    let h = fd_step;
    let logj = j1.log();
    let pot_plus = logj.zip_with(z3.grid(), |a, z| a + h * z)?;
    let pot_minus = logj.zip_with(z3.grid(), |a, z| a - h * z)?;
    let eig_plus = power_iterate(&pot_plus, DEFAULT_EIGEN_TOL, DEFAULT_EIGEN_MAX_ITERS)?;
    let eig_minus = power_iterate(&pot_minus, DEFAULT_EIGEN_TOL, DEFAULT_EIGEN_MAX_ITERS)?;

    let lambda_prime = (eig_plus.lambda - eig_minus.lambda) / (2.0 * h);
    let phi_prime = eig_plus
        .phi
        .zip_with(&eig_minus.phi, |p, m| (p - m) / (2.0 * h))?;
    let dlog_phi = eig_plus
        .phi
        .zip_with(&eig_minus.phi, |p, m| (p.ln() - m.ln()) / (2.0 * h))?;
    let dlog_lambda = (eig_plus.lambda.ln() - eig_minus.lambda.ln()) / (2.0 * h);
    let dlog_phi_t = dlog_phi.compose_doubling();
    // ẇ = d/dt log J₁ᵗ at t = 0 for the normalized family.
    let wdot = z3
        .grid()
        .zip_with(&dlog_phi, |z, p| z + p)?
        .zip_with(&dlog_phi_t, |v, pt| v - pt - dlog_lambda)?;

    let mu1 = gibbs_atoms(j1, level)?;
    let jt = convolved_jacobian(j1, mu2)?;
    let jdot = j1.grid().zip_with(&wdot, |a, b| a * b)?;
    let dd = convolved_grid(&jdot, mu2)?;
    let q = dd.zip_with(jt.grid(), |num, den| num / den)?;
    let nu = mu1.convolve(mu2)?;
    let term_integrand = -nu.integrate(&q);

    // Z(s) = ∫ log J̃(s + r) dμ₂(r), the observable whose Gibbs average moves.
    let n = jt.grid().len();
    let z_samples: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|k| {
            let s = CirclePoint::new(k as f64 / n as f64);
            mu2.integrate_fn(|r| jt.eval(s.add(r)).ln())
        })
        .collect();
    let z_obs = GridFunction::from_samples(z_samples)?;
    let term_measure = -gibbs_linear_response(j1, &wdot, &z_obs, &mu1)?;

    let entropy_at = |sign: f64| -> Result<f64> {
        let pot = logj.zip_with(z3.grid(), |a, z| a + sign * h * z)?;
        let jp = normalize_potential(&pot)?;
        let mup = gibbs_atoms(&jp, level)?;
        Ok(convolution_entropy(&jp, &mup, mu2)?.value())
    };
    let finite_difference_value = (entropy_at(1.0)? - entropy_at(-1.0)?) / (2.0 * h);

    Ok(DerivativeReport {
        formula_value: term_integrand + term_measure,
        finite_difference_value,
        fd_step,
        lambda_prime,
        phi_prime,
    })
}

/// Affine blend `J₁ + t(J₂ - J₁)` for `t ∈ [0, 1]`; the pairing property is
/// closed under affine combinations, so the blend is again a Jacobian.
pub fn jacobian_blend(
    j1: &JacobianPotential,
    j2: &JacobianPotential,
    t: f64,
) -> Result<JacobianPotential> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Validation(format!("blend parameter t={t} outside [0, 1]")));
    }
    let g = j1.grid().zip_with(j2.grid(), |a, b| a + t * (b - a))?;
    JacobianPotential::with_floor(g, j1.floor_eps())
}

/// `∫ (J₂ - J₁)/Jᵗ dμᵗ` along the blend path: vanishes identically because
/// the paired preimage values of `J₂ - J₁` cancel under the transfer
/// operator. Numerator and denominator are interpolated separately so the
/// cancellation survives discretization.
pub fn blend_tangent_integral(
    j1: &JacobianPotential,
    j2: &JacobianPotential,
    t: f64,
    n: u32,
) -> Result<f64> {
    let diff = j2.grid().zip_with(j1.grid(), |b, a| b - a)?;
    let jt = jacobian_blend(j1, j2, t)?;
    let mu_t = gibbs_atoms(&jt, n)?;
    Ok(mu_t.integrate_fn(|x| diff.eval(x) / jt.eval(x)))
}

/// Entropy behaviour along the blend path.
#[derive(Clone, Debug, Serialize)]
pub struct MonotoneReport {
    /// Pointwise sign condition `(J₂ - J₁)(J₁ - 1/2) ≥ 0` (with float slack).
    pub dominance: bool,
    pub ts: Vec<f64>,
    pub entropies: Vec<f64>,
    /// Entropies non-increasing along the path (within 1e-9 slack).
    pub monotone: bool,
    /// Entropy derivative at each node, via the full linear-response series.
    pub dh_dt: Vec<f64>,
    /// First-order (series truncated at n = 0) value at each node, for
    /// comparison; it misses the moving-measure tail.
    pub dh_dt_first_order: Vec<f64>,
}

/// Sweep the blend path, recording entropies and their derivatives, and
/// check the dominance condition under which entropy must decrease.
pub fn entropy_monotone_check(
    j1: &JacobianPotential,
    j2: &JacobianPotential,
    n: u32,
    t_steps: usize,
) -> Result<MonotoneReport> {
    if t_steps < 3 {
        return Err(Error::Validation(format!(
            "t_steps must be at least 3, got {t_steps}"
        )));
    }
    let dominance = j1
        .grid()
        .samples()
        .iter()
        .zip(j2.grid().samples())
        .all(|(&a, &b)| (b - a) * (a - 0.5) >= -1e-12);

    let diff = j2.grid().zip_with(j1.grid(), |b, a| b - a)?;
    let mut ts = Vec::with_capacity(t_steps);
    let mut entropies = Vec::with_capacity(t_steps);
    let mut dh_dt = Vec::with_capacity(t_steps);
    let mut dh_dt_first_order = Vec::with_capacity(t_steps);
    for i in 0..t_steps {
        let t = i as f64 / (t_steps - 1) as f64;
        let jt = jacobian_blend(j1, j2, t)?;
        let mu_t = gibbs_atoms(&jt, n)?;
        let log_jt = jt.log();
        let chi = diff.zip_with(jt.grid(), |d, den| d / den)?;
        let entropy = -mu_t.integrate_fn(|x| jt.eval(x).ln());
        let first_order = -mu_t.integrate(&chi.zip_with(&log_jt, |c, l| c * l)?);
        let full = -mu_t.integrate_fn(|x| diff.eval(x) / jt.eval(x))
            - gibbs_linear_response(&jt, &chi, &log_jt, &mu_t)?;
        ts.push(t);
        entropies.push(entropy);
        dh_dt.push(full);
        dh_dt_first_order.push(first_order);
    }
    let monotone = entropies.windows(2).all(|w| w[1] <= w[0] + 1e-9);
    Ok(MonotoneReport {
        dominance,
        ts,
        entropies,
        monotone,
        dh_dt,
        dh_dt_first_order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transfer::entropy_gibbs;
    use std::f64::consts::{LN_2, PI};

    fn cosine_jacobian(m: u32, a: f64) -> JacobianPotential {
        JacobianPotential::new(
            GridFunction::from_fn(m, |x| 0.5 + a * (2.0 * PI * x).cos()).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn tangent_projection_centers_directions() {
        let mu = AtomicMeasure::lebesgue_level(12).unwrap();
        let eta = GridFunction::constant(10, 3.7).unwrap();
        let z = tangent_project(&eta, &mu).unwrap();
        assert!(z.grid().samples().iter().all(|&v| v.abs() <= 1e-12));

        let cosine = GridFunction::from_fn(12, |x| (2.0 * PI * x).cos()).unwrap();
        let z = tangent_project(&cosine, &mu).unwrap();
        assert!(z.grid().sup_distance(&cosine) <= 1e-10);
        assert!(mu.integrate(z.grid()).abs() <= 1e-12);

        let skew = GridFunction::from_fn(10, |x| x * x).unwrap();
        assert!(TangentVector::new(skew.clone(), &mu).is_err());
        let z = tangent_project(&skew, &mu).unwrap();
        assert!(mu.integrate(z.grid()).abs() <= 1e-12);
    }

    #[test]
    fn functional_basics() {
        let mu = gibbs_atoms(&cosine_jacobian(10, 0.2), 10).unwrap();
        let c = GridFunction::constant(8, 2.5).unwrap();
        assert!((variational_functional(&c, &mu).unwrap() - LN_2).abs() <= 1e-12);

        let v = GridFunction::from_fn(8, |x| 1.0 + 0.4 * (2.0 * PI * x).sin()).unwrap();
        let base = variational_functional(&v, &mu).unwrap();
        for c in [1e-3, 1e3] {
            let scaled = v.map(|s| c * s).unwrap();
            assert!((variational_functional(&scaled, &mu).unwrap() - base).abs() <= 1e-12);
        }

        let bad = GridFunction::from_fn(8, |x| x - 0.5).unwrap();
        assert!(variational_functional(&bad, &mu).is_err());
    }

    #[test]
    fn functional_bounds_entropy_from_above() {
        let j = cosine_jacobian(10, 0.2);
        let mu = gibbs_atoms(&j, 10).unwrap();
        let h = entropy_gibbs(&j, 10).unwrap();
        // The Jacobian itself is the minimizer.
        let at_j = variational_functional(j.grid(), &mu).unwrap();
        assert!((at_j - h).abs() <= 1e-10);
        for k in 1..=4 {
            let v = GridFunction::from_fn(8, |x| 1.0 + 0.3 * (2.0 * PI * k as f64 * x).cos())
                .unwrap();
            assert!(variational_functional(&v, &mu).unwrap() >= h - 1e-6);
        }
    }

    #[test]
    fn candidate_for_constant_jacobian() {
        let j = cosine_jacobian(8, 0.0);
        let mu1 = gibbs_atoms(&j, 8).unwrap();
        let mu2 = AtomicMeasure::periodic_third().unwrap();
        let u = variational_candidate(&j, &mu1, &mu2).unwrap();
        assert!(u.samples().iter().all(|&v| (v - 0.5).abs() <= 1e-12));
    }

    #[test]
    fn candidate_is_strictly_subinvariant_for_nonconstant_jacobian() {
        let j = cosine_jacobian(10, 0.2);
        let mu1 = gibbs_atoms(&j, 10).unwrap();
        let mu2 = gibbs_atoms(&cosine_jacobian(10, 0.3), 10).unwrap();
        let u = variational_candidate(&j, &mu1, &mu2).unwrap();
        let n = u.len();
        let min_l0 = (0..n)
            .map(|k| {
                let x0 = CirclePoint::new(k as f64 / (2 * n) as f64);
                u.eval(x0) + u.eval(x0.antipode())
            })
            .fold(f64::INFINITY, f64::min);
        assert!(min_l0 < 1.0 - 1e-6, "L0 u should dip strictly below 1, min {min_l0}");
    }

    #[test]
    fn descent_reaches_log_two_on_flat_jacobian() {
        let j = cosine_jacobian(10, 0.0);
        let v0 = GridFunction::from_fn(6, |x| 1.0 + 0.3 * (2.0 * PI * x).sin()).unwrap();
        let run = minimize_variational(&j, 10, &v0, 400, 0.5).unwrap();
        assert!((run.value - LN_2).abs() <= 1e-6, "value {}", run.value);
        assert!(run.trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn descent_never_tunnels_below_entropy() {
        let j = cosine_jacobian(10, 0.3);
        let v0 = GridFunction::from_fn(8, |x| 1.0 + 0.4 * (4.0 * PI * x).cos()).unwrap();
        let run = minimize_variational(&j, 10, &v0, 400, 0.5).unwrap();
        let floor = entropy_gibbs(&j, 11).unwrap();
        assert!(run.value >= floor - 1e-12, "{} vs floor {floor}", run.value);
        assert!(run.value <= floor + 1e-3);
    }

    #[test]
    fn descent_rejects_bad_inputs() {
        let j = cosine_jacobian(8, 0.2);
        let bad = GridFunction::from_fn(6, |x| x - 0.5).unwrap();
        assert!(minimize_variational(&j, 8, &bad, 10, 0.5).is_err());
        let v0 = GridFunction::constant(6, 1.0).unwrap();
        assert!(minimize_variational(&j, 8, &v0, 10, -1.0).is_err());
    }

    #[test]
    fn linear_response_vanishes_for_flat_direction() {
        let j = cosine_jacobian(10, 0.2);
        let mu = gibbs_atoms(&j, 10).unwrap();
        let zero = GridFunction::constant(10, 0.0).unwrap();
        let obs = GridFunction::from_fn(10, |x| (2.0 * PI * x).cos()).unwrap();
        let r = gibbs_linear_response(&j, &zero, &obs, &mu).unwrap();
        assert!(r.abs() <= 1e-12);
    }

    #[test]
    fn linear_response_matches_finite_difference_of_average() {
        // d/dt ∫ G dμ_t for the normalized family log J + t·z, against FD.
        let j = cosine_jacobian(10, 0.2);
        let mu = gibbs_atoms(&j, 12).unwrap();
        let eta = GridFunction::from_fn(10, |x| (4.0 * PI * x).cos()).unwrap();
        let z = tangent_project(&eta, &mu).unwrap();
        let obs = GridFunction::from_fn(10, |x| (2.0 * PI * x).sin() + 0.3).unwrap();

        let h = 1e-4;
        let eig_p = power_iterate(
            &j.log().zip_with(z.grid(), |a, b| a + h * b).unwrap(),
            1e-12,
            100_000,
        )
        .unwrap();
        let eig_m = power_iterate(
            &j.log().zip_with(z.grid(), |a, b| a - h * b).unwrap(),
            1e-12,
            100_000,
        )
        .unwrap();
        let dlog_phi = eig_p
            .phi
            .zip_with(&eig_m.phi, |p, m| (p.ln() - m.ln()) / (2.0 * h))
            .unwrap();
        let dlog_lambda = (eig_p.lambda.ln() - eig_m.lambda.ln()) / (2.0 * h);
        let wdot = z
            .grid()
            .zip_with(&dlog_phi, |a, b| a + b)
            .unwrap()
            .zip_with(&dlog_phi.compose_doubling(), |v, pt| v - pt - dlog_lambda)
            .unwrap();
        let formula = gibbs_linear_response(&j, &wdot, &obs, &mu).unwrap();

        let avg_at = |sign: f64| {
            let pot = j.log().zip_with(z.grid(), |a, b| a + sign * h * b).unwrap();
            let jp = normalize_potential(&pot).unwrap();
            gibbs_atoms(&jp, 12).unwrap().integrate(&obs)
        };
        let fd = (avg_at(1.0) - avg_at(-1.0)) / (2.0 * h);
        assert!(
            (formula - fd).abs() <= 1e-5 * fd.abs().max(1e-3),
            "formula {formula} vs fd {fd}"
        );
    }

    #[test]
    fn derivative_is_zero_for_zero_direction() {
        let j = cosine_jacobian(8, 0.2);
        let mu2 = AtomicMeasure::periodic_third().unwrap();
        let mu1 = gibbs_atoms(&j, 8).unwrap();
        let z = TangentVector::new(GridFunction::constant(8, 0.0).unwrap(), &mu1).unwrap();
        let r = entropy_derivative_formula(&j, &mu2, &z, 8, 1e-4).unwrap();
        assert!(r.formula_value.abs() <= 1e-12);
        assert!(r.finite_difference_value.abs() <= 1e-9);
    }

    #[test]
    fn derivative_vanishes_at_entropy_maximum() {
        let j = cosine_jacobian(10, 0.0);
        let mu2 = gibbs_atoms(&cosine_jacobian(10, 0.3), 10).unwrap();
        let mu1 = gibbs_atoms(&j, 10).unwrap();
        let eta = GridFunction::from_fn(10, |x| (2.0 * PI * x).cos()).unwrap();
        let z = tangent_project(&eta, &mu1).unwrap();
        let r = entropy_derivative_formula(&j, &mu2, &z, 10, 1e-4).unwrap();
        assert!(r.formula_value.abs() <= 1e-3, "formula {}", r.formula_value);
        assert!(r.finite_difference_value.abs() <= 1e-3);
    }

    #[test]
    fn derivative_rejects_bad_step() {
        let j = cosine_jacobian(8, 0.2);
        let mu1 = gibbs_atoms(&j, 8).unwrap();
        let mu2 = AtomicMeasure::periodic_third().unwrap();
        let z = TangentVector::new(GridFunction::constant(8, 0.0).unwrap(), &mu1).unwrap();
        assert!(entropy_derivative_formula(&j, &mu2, &z, 8, 0.0).is_err());
        assert!(entropy_derivative_formula(&j, &mu2, &z, 8, 0.1).is_err());
    }

    #[test]
    fn blend_endpoints_and_midpoint() {
        let j1 = cosine_jacobian(10, 0.2);
        let j2 = cosine_jacobian(10, 0.4);
        assert!(jacobian_blend(&j1, &j2, 0.0)
            .unwrap()
            .grid()
            .sup_distance(j1.grid())
            <= 1e-15);
        assert!(jacobian_blend(&j1, &j2, 1.0)
            .unwrap()
            .grid()
            .sup_distance(j2.grid())
            <= 1e-15);
        let mid = jacobian_blend(&j1, &j2, 0.5).unwrap();
        assert!(mid.grid().sup_distance(cosine_jacobian(10, 0.3).grid()) <= 1e-14);
        assert!(jacobian_blend(&j1, &j2, 1.5).is_err());
        for i in 0..=20 {
            let jt = jacobian_blend(&j1, &j2, i as f64 / 20.0).unwrap();
            assert!(jt.pairing_residual() <= 1e-12);
        }
    }

    #[test]
    fn tangent_integral_vanishes_along_blend() {
        let j1 = cosine_jacobian(10, 0.2);
        let j2 = cosine_jacobian(10, 0.3);
        assert_eq!(blend_tangent_integral(&j1, &j1, 0.3, 8).unwrap(), 0.0);
        for &t in &[0.0, 0.7] {
            let v = blend_tangent_integral(&j1, &j2, t, 10).unwrap();
            assert!(v.abs() <= 1e-8, "t={t}: {v}");
        }
    }

    #[test]
    fn monotone_check_trivial_and_ordered_cases() {
        let j1 = cosine_jacobian(10, 0.2);
        let same = entropy_monotone_check(&j1, &j1, 8, 5).unwrap();
        assert!(same.dominance && same.monotone);
        assert!(same
            .entropies
            .windows(2)
            .all(|w| (w[0] - w[1]).abs() <= 1e-12));

        let j2 = cosine_jacobian(10, 0.3);
        let r = entropy_monotone_check(&j1, &j2, 10, 11).unwrap();
        assert!(r.dominance && r.monotone);
        assert!(r.entropies.last().unwrap() < r.entropies.first().unwrap());
        assert!(r.dh_dt.iter().all(|&d| d <= 1e-9));

        let shifted = JacobianPotential::new(
            GridFunction::from_fn(10, |x| 0.5 + 0.2 * (2.0 * PI * x).sin()).unwrap(),
        )
        .unwrap();
        let r = entropy_monotone_check(&j1, &shifted, 8, 5).unwrap();
        assert!(!r.dominance);

        assert!(entropy_monotone_check(&j1, &j2, 8, 2).is_err());
    }

    #[test]
    fn monotone_derivatives_match_entropy_differences() {
        let j1 = cosine_jacobian(10, 0.2);
        let j2 = cosine_jacobian(10, 0.3);
        let r = entropy_monotone_check(&j1, &j2, 12, 21).unwrap();
        let dt = r.ts[1] - r.ts[0];
        for i in 1..r.ts.len() - 1 {
            let fd = (r.entropies[i + 1] - r.entropies[i - 1]) / (2.0 * dt);
            let rel = (r.dh_dt[i] - fd).abs() / fd.abs().max(1e-6);
            assert!(rel <= 1e-3, "node {i}: formula {} vs fd {fd}", r.dh_dt[i]);
        }
    }
}
