//! Transfer (Ruelle) operator machinery for the doubling map.
//!
//! A `JacobianPotential` is a positive function `J` on the circle with the
//! pairing property `J(x) + J(x + 1/2) = 1`, so that the weighted transfer
//! operator `(L_J f)(y) = Σ_{T x = y} J(x) f(x)` fixes constants. The Gibbs
//! measure of `J` is approximated by atomic measures supported on dyadic
//! rationals, with weights given by Birkhoff products of `J` along orbits.

use rayon::prelude::*;

use crate::circle::{CirclePoint, GridFunction};
use crate::error::{Error, Result};
use crate::measures::AtomicMeasure;

/// Default lower bound enforced on Jacobian samples.
pub const DEFAULT_FLOOR_EPS: f64 = 1e-8;

/// Default power-iteration tolerance.
pub const DEFAULT_EIGEN_TOL: f64 = 1e-12;

/// Default power-iteration budget.
pub const DEFAULT_EIGEN_MAX_ITERS: usize = 100_000;

/// Largest dyadic level accepted by [`gibbs_atoms`].
pub const MAX_ATOM_LEVEL: u32 = 24;

/// A positive circle function with the exact pairing `J(x) + J(x+1/2) = 1`
/// enforced samplewise.
#[derive(Clone, Debug)]
pub struct JacobianPotential {
    grid: GridFunction,
    floor_eps: f64,
}

impl JacobianPotential {
    /// Build from a positive grid function. The samples are projected onto
    /// the pairing constraint by `a -> a / (a + b)` against the antipodal
    /// sample `b`; if any projected sample falls below `floor_eps` the input
    /// is rejected rather than clamped.
    pub fn new(grid: GridFunction) -> Result<Self> {
        Self::with_floor(grid, DEFAULT_FLOOR_EPS)
    }

    pub fn with_floor(grid: GridFunction, floor_eps: f64) -> Result<Self> {
        if !(floor_eps > 0.0 && floor_eps < 0.5) {
            return Err(Error::Validation(format!(
                "floor_eps must lie in (0, 0.5), got {floor_eps}"
            )));
        }
        let n = grid.len();
        if n < 2 {
            return Err(Error::Validation("Jacobian grid too small".into()));
        }
        let mut s = grid.samples().to_vec();
        let half = n / 2;
        for i in 0..half {
            let a = s[i];
            let b = s[i + half];
            if !(a > 0.0 && b > 0.0) {
                return Err(Error::Validation(format!(
                    "Jacobian samples must be positive (got {a} and {b} at antipodal pair {i})"
                )));
            }
            let sum = a + b;
            s[i] = a / sum;
            s[i + half] = b / sum;
        }
        if let Some(bad) = s.iter().find(|&&v| v < floor_eps) {
            return Err(Error::Validation(format!(
                "Jacobian sample {bad:e} below floor {floor_eps:e} after pairing projection"
            )));
        }
        Ok(JacobianPotential {
            grid: GridFunction::from_samples(s)?,
            floor_eps,
        })
    }

    pub fn grid(&self) -> &GridFunction {
        &self.grid
    }

    pub fn floor_eps(&self) -> f64 {
        self.floor_eps
    }

    pub fn eval(&self, x: CirclePoint) -> f64 {
        self.grid.eval(x)
    }

    /// `log J` as a grid function.
    pub fn log(&self) -> GridFunction {
        self.grid.map(f64::ln).expect("log of positive samples")
    }

    /// Worst samplewise violation of `J(x) + J(x+1/2) = 1`.
    pub fn pairing_residual(&self) -> f64 {
        let s = self.grid.samples();
        let half = s.len() / 2;
        (0..half)
            .map(|i| (s[i] + s[i + half] - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Perron eigendata of a weighted transfer operator.
#[derive(Clone, Debug)]
pub struct EigenData {
    /// Positive eigenfunction, normalized to unit grid mean.
    pub phi: GridFunction,
    /// Leading eigenvalue.
    pub lambda: f64,
    /// Sup-norm change of the normalized iterate at the final step.
    pub residual: f64,
    /// Iterations used.
    pub iters: usize,
}

/// Apply the weighted transfer operator `(L_w f)(y) = Σ_{Tx=y} w(x) f(x)`,
/// sampling the result on the grid of `f`.
pub fn ruelle_apply(weight: &GridFunction, f: &GridFunction) -> Result<GridFunction> {
    if weight.len() != f.len() {
        return Err(Error::Validation(format!(
            "weight and function grids differ: {} vs {}",
            weight.len(),
            f.len()
        )));
    }
    let n = f.len();
    let samples = (0..n)
        .map(|k| {
            let x0 = CirclePoint::new(k as f64 / (2 * n) as f64);
            let x1 = x0.antipode();
            weight.eval(x0) * f.eval(x0) + weight.eval(x1) * f.eval(x1)
        })
        .collect();
    GridFunction::from_samples(samples)
}

/// Unweighted transfer operator `(L_0 f)(y) = Σ_{Tx=y} f(x)`.
pub fn ruelle_apply_unweighted(f: &GridFunction) -> Result<GridFunction> {
    let n = f.len();
    let samples = (0..n)
        .map(|k| {
            let x0 = CirclePoint::new(k as f64 / (2 * n) as f64);
            f.eval(x0) + f.eval(x0.antipode())
        })
        .collect();
    GridFunction::from_samples(samples)
}

/// Power iteration for the leading eigenpair of `L_{exp(log_potential)}`.
///
/// The iterate is renormalized to unit mean each step; the eigenvalue
/// estimate is the mass ratio between consecutive iterates. Converges when
/// the sup-norm change of the normalized iterate drops below `tol`.
pub fn power_iterate(log_potential: &GridFunction, tol: f64, max_iters: usize) -> Result<EigenData> {
    if !(tol > 0.0) {
        return Err(Error::Validation(format!("tol must be positive, got {tol}")));
    }
    let weight = log_potential.map(f64::exp)?;
    let mut f = GridFunction::constant(log_potential.log2_size(), 1.0)?;
    for iter in 1..=max_iters {
        let g = ruelle_apply(&weight, &f)?;
        let mass = g.mean();
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::Optimization(format!(
                "power iteration produced non-positive mass {mass}"
            )));
        }
        let gnorm = g.map(|v| v / mass)?;
        let residual = gnorm.sup_distance(&f);
        f = gnorm;
        if residual < tol {
            return Ok(EigenData {
                phi: f,
                lambda: mass,
                residual,
                iters: iter,
            });
        }
    }
    let g = ruelle_apply(&weight, &f)?;
    let residual = g.map(|v| v / g.mean())?.sup_distance(&f);
    Err(Error::Convergence {
        iters: max_iters,
        residual,
        tol,
    })
}

/// Turn an arbitrary potential `A` into the Jacobian of its Gibbs measure:
/// `log J = A + log φ - log φ∘T - log λ`, followed by the exact pairing
/// projection.
pub fn normalize_potential(log_potential: &GridFunction) -> Result<JacobianPotential> {
    normalize_potential_with(log_potential, DEFAULT_EIGEN_TOL, DEFAULT_EIGEN_MAX_ITERS)
}

pub fn normalize_potential_with(
    log_potential: &GridFunction,
    tol: f64,
    max_iters: usize,
) -> Result<JacobianPotential> {
    let eigen = power_iterate(log_potential, tol, max_iters)?;
    let log_phi = eigen.phi.map(f64::ln)?;
    let log_phi_t = log_phi.compose_doubling();
    let log_lambda = eigen.lambda.ln();
    let log_j = log_potential
        .zip_with(&log_phi, |a, p| a + p)?
        .zip_with(&log_phi_t, |v, pt| v - pt - log_lambda)?;
    JacobianPotential::new(log_j.map(f64::exp)?)
}

/// Level-`n` atomic approximation of the Gibbs measure of `J`: an atom at
/// each dyadic rational `j / 2^n` with weight `Π_{k<n} J(T^k(j/2^n))`.
pub fn gibbs_atoms(j: &JacobianPotential, n: u32) -> Result<AtomicMeasure> {
    if n == 0 {
        return AtomicMeasure::dirac(0.0);
    }
    if n > MAX_ATOM_LEVEL {
        return Err(Error::Resource(format!(
            "atom level {n} exceeds maximum {MAX_ATOM_LEVEL}"
        )));
    }
    let k = 1usize << n;
    let atoms: Vec<(f64, f64)> = (0..k)
        .into_par_iter()
        .map(|idx| {
            let mut cur = idx;
            let mut w = 1.0f64;
            for _ in 0..n {
                w *= j.eval(CirclePoint::new(cur as f64 / k as f64));
                cur = (2 * cur) & (k - 1);
            }
            (idx as f64 / k as f64, w)
        })
        .collect();
    AtomicMeasure::new(atoms)
}

/// `(L_J^n f)(x0)`, the operator route to `∫ f dρ_n` when `x0 = 0`.
pub fn integrate_via_operator(
    j: &JacobianPotential,
    f: &GridFunction,
    n: u32,
    x0: CirclePoint,
) -> Result<f64> {
    let mut g = f.clone();
    for _ in 0..n {
        g = ruelle_apply(j.grid(), &g)?;
    }
    Ok(g.eval(x0))
}

/// Entropy of the level-`n` Gibbs approximation: `-∫ log J dρ_n`, with
/// `log J` evaluated as the log of the interpolated Jacobian.
pub fn entropy_gibbs(j: &JacobianPotential, n: u32) -> Result<f64> {
    let rho = gibbs_atoms(j, n)?;
    Ok(-rho.integrate_fn(|x| j.eval(x).ln()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{LN_2, PI};

    fn cosine_raw(m: u32, a: f64) -> GridFunction {
        GridFunction::from_fn(m, |x| 0.5 + a * (2.0 * PI * x).cos()).unwrap()
    }

    fn cosine_jacobian(m: u32, a: f64) -> JacobianPotential {
        JacobianPotential::new(cosine_raw(m, a)).unwrap()
    }

    #[test]
    fn pairing_projection_is_exact() {
        // A function violating the pairing gets projected onto it.
        let g = GridFunction::from_fn(8, |x| 0.6 + 0.2 * (2.0 * PI * x).sin()).unwrap();
        let j = JacobianPotential::new(g).unwrap();
        assert!(j.pairing_residual() <= 1e-15);
    }

    #[test]
    fn rejects_floor_violations_and_nonpositive() {
        let tiny = GridFunction::from_fn(8, |x| if x < 0.5 { 1e-12 } else { 1.0 }).unwrap();
        assert!(matches!(JacobianPotential::new(tiny), Err(Error::Validation(_))));
        let neg = GridFunction::from_fn(8, |x| x - 0.5).unwrap();
        assert!(JacobianPotential::new(neg).is_err());
        let g = cosine_raw(8, 0.2);
        assert!(JacobianPotential::with_floor(g, 0.7).is_err());
    }

    #[test]
    fn transfer_operator_fixes_constants() {
        let j = cosine_jacobian(10, 0.3);
        let one = GridFunction::constant(10, 1.0).unwrap();
        let lj = ruelle_apply(j.grid(), &one).unwrap();
        assert!(lj.sup_distance(&one) <= 1e-14);
        // Unweighted operator doubles constants.
        let l0 = ruelle_apply_unweighted(&one).unwrap();
        assert!(l0.sup_distance(&GridFunction::constant(10, 2.0).unwrap()) <= 1e-14);
    }

    #[test]
    fn power_iterate_on_normalized_jacobian_is_trivial() {
        let j = cosine_jacobian(10, 0.3);
        let e = power_iterate(&j.log(), 1e-12, 10_000).unwrap();
        assert!((e.lambda - 1.0).abs() <= 1e-12);
        assert!(e.phi.sup_distance(&GridFunction::constant(10, 1.0).unwrap()) <= 1e-10);
    }

    #[test]
    fn power_iterate_satisfies_eigen_relation() {
        let pot = GridFunction::from_fn(10, |x| 0.3 * (2.0 * PI * x).cos() - 0.1).unwrap();
        let e = power_iterate(&pot, 1e-12, 100_000).unwrap();
        let weight = pot.map(f64::exp).unwrap();
        let lphi = ruelle_apply(&weight, &e.phi).unwrap();
        let lam_phi = e.phi.map(|v| v * e.lambda).unwrap();
        assert!(lphi.sup_distance(&lam_phi) <= 1e-9);
        assert!((e.phi.mean() - 1.0).abs() <= 1e-13);
    }

    #[test]
    fn power_iterate_reports_convergence_failure() {
        let pot = GridFunction::from_fn(8, |x| (2.0 * PI * x).cos()).unwrap();
        match power_iterate(&pot, 1e-12, 2) {
            Err(Error::Convergence { iters, .. }) => assert_eq!(iters, 2),
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn normalize_potential_is_identity_on_jacobians() {
        let j = cosine_jacobian(10, 0.25);
        let renorm = normalize_potential(&j.log()).unwrap();
        assert!(renorm.grid().sup_distance(j.grid()) <= 1e-10);
    }

    #[test]
    fn normalized_potential_has_unit_eigenvalue() {
        let pot = GridFunction::from_fn(10, |x| 0.4 * (2.0 * PI * x).sin()).unwrap();
        let j = normalize_potential(&pot).unwrap();
        assert!(j.pairing_residual() <= 1e-15);
        let e = power_iterate(&j.log(), 1e-12, 100_000).unwrap();
        assert!((e.lambda - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn gibbs_atoms_level_transfer_identity() {
        // ∫ L_J g dρ_n = ∫ g dρ_{n+1} exactly when all points are grid points.
        let j = cosine_jacobian(10, 0.3);
        let g = GridFunction::from_fn(10, |x| (4.0 * PI * x).sin() + 0.2).unwrap();
        let rho_n = gibbs_atoms(&j, 6).unwrap();
        let rho_n1 = gibbs_atoms(&j, 7).unwrap();
        let lg = ruelle_apply(j.grid(), &g).unwrap();
        let lhs = rho_n.integrate(&lg);
        let rhs = rho_n1.integrate(&g);
        assert!((lhs - rhs).abs() <= 1e-13, "lhs {lhs} rhs {rhs}");
    }

    #[test]
    fn gibbs_atoms_edge_levels() {
        let j = cosine_jacobian(8, 0.2);
        let rho0 = gibbs_atoms(&j, 0).unwrap();
        assert_eq!(rho0.len(), 1);
        let rho1 = gibbs_atoms(&j, 1).unwrap();
        assert_eq!(rho1.len(), 2);
        assert!(gibbs_atoms(&j, MAX_ATOM_LEVEL + 1).is_err());
    }

    #[test]
    fn operator_route_matches_atom_route() {
        let j = cosine_jacobian(10, 0.3);
        let f = GridFunction::from_fn(10, |x| (2.0 * PI * x).cos() + 1.0).unwrap();
        let rho = gibbs_atoms(&j, 6).unwrap();
        let direct = rho.integrate(&f);
        let via_op = integrate_via_operator(&j, &f, 6, CirclePoint::new(0.0)).unwrap();
        assert!((direct - via_op).abs() <= 1e-12);
    }

    #[test]
    fn entropy_of_constant_half_is_log_two() {
        let j = cosine_jacobian(10, 0.0);
        let h = entropy_gibbs(&j, 10).unwrap();
        assert!((h - LN_2).abs() <= 1e-12);
    }

    #[test]
    fn entropy_of_two_level_jacobian_is_binary_entropy() {
        let p: f64 = 0.3;
        let j = JacobianPotential::new(
            GridFunction::from_fn(10, |x| if x < 0.5 { p } else { 1.0 - p }).unwrap(),
        )
        .unwrap();
        let expect = -(p * p.ln() + (1.0 - p) * (1.0 - p).ln());
        for n in [1u32, 4, 10] {
            let h = entropy_gibbs(&j, n).unwrap();
            assert!((h - expect).abs() <= 1e-12, "n={n}: {h} vs {expect}");
        }
    }
}
