//! Randomized invariants at small sizes: pairing survives every
//! construction, convolution conserves and commutes, and random candidates
//! never beat the entropy in the variational functional.

use proptest::prelude::*;

use gibbsconv::circle::{CirclePoint, GridFunction};
use gibbsconv::convolution::convolved_jacobian;
use gibbsconv::entropy_lab::variational_functional;
use gibbsconv::measures::AtomicMeasure;
use gibbsconv::transfer::{entropy_gibbs, gibbs_atoms, JacobianPotential};

fn positive_samples(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.1f64..10.0, len)
}

fn atoms(max_len: usize) -> impl Strategy<Value = AtomicMeasure> {
    prop::collection::vec((0.0f64..1.0, 0.05f64..1.0), 1..=max_len).prop_map(|raw| {
        let total: f64 = raw.iter().map(|&(_, w)| w).sum();
        AtomicMeasure::new(raw.into_iter().map(|(x, w)| (x, w / total)).collect())
            .expect("normalized positive atoms are valid")
    })
}

fn jacobian(samples: Vec<f64>) -> JacobianPotential {
    JacobianPotential::new(GridFunction::from_samples(samples).unwrap()).unwrap()
}

proptest! {
    #[test]
    fn circle_points_stay_reduced(x in -1e6f64..1e6, y in -1e6f64..1e6) {
        let a = CirclePoint::new(x);
        let b = CirclePoint::new(y);
        prop_assert!(a.value() >= 0.0 && a.value() < 1.0);
        prop_assert!(a.add(b).sub(b).dist(a) <= 1e-9);
    }

    #[test]
    fn pairing_projection_always_exact(samples in positive_samples(16)) {
        let j = jacobian(samples);
        prop_assert!(j.pairing_residual() <= 1e-12);
    }

    #[test]
    fn gibbs_atoms_conserve_mass_and_bound_entropy(samples in positive_samples(16)) {
        let j = jacobian(samples);
        let mu = gibbs_atoms(&j, 8).unwrap();
        prop_assert!((mu.total_mass() - 1.0).abs() <= 1e-10);
        let h = entropy_gibbs(&j, 8).unwrap();
        prop_assert!(h >= 0.0 && h <= std::f64::consts::LN_2 + 1e-12);
    }

    #[test]
    fn convolution_conserves_and_commutes(m1 in atoms(12), m2 in atoms(12)) {
        let ab = m1.convolve(&m2).unwrap();
        let ba = m2.convolve(&m1).unwrap();
        prop_assert!((ab.total_mass() - 1.0).abs() <= 1e-10);
        prop_assert_eq!(ab.len(), ba.len());
        for (&(x, w), &(y, v)) in ab.atoms().iter().zip(ba.atoms()) {
            prop_assert!(x.dist(y) <= 1e-12);
            prop_assert!((w - v).abs() <= 1e-12);
        }
    }

    #[test]
    fn pushforward_conserves_mass(m in atoms(12)) {
        prop_assert!((m.pushforward_doubling().total_mass() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn convolved_jacobian_keeps_pairing(samples in positive_samples(16), m in atoms(8)) {
        let jt = convolved_jacobian(&jacobian(samples), &m).unwrap();
        prop_assert!(jt.pairing_residual() <= 1e-12);
    }

    #[test]
    fn random_candidates_never_beat_entropy(
        samples in positive_samples(16),
        candidate in positive_samples(16),
    ) {
        // Two-level form of the variational bound: it holds exactly for any
        // positive candidate because the level transfer of the atoms is
        // exact and the pointwise log-sum inequality does the rest.
        let j = jacobian(samples);
        let mu9 = gibbs_atoms(&j, 9).unwrap();
        let mu10 = gibbs_atoms(&j, 10).unwrap();
        let h10 = entropy_gibbs(&j, 10).unwrap();
        let v = GridFunction::from_samples(candidate).unwrap();
        let lhs = mu9.integrate_fn(|s| {
            let [a, b] = gibbsconv::circle::preimages(s);
            (v.eval(a) + v.eval(b)).ln()
        }) - mu10.integrate_fn(|s| v.eval(s).ln());
        prop_assert!(lhs >= h10 - 1e-9);
    }

    #[test]
    fn smooth_candidates_never_beat_entropy_single_level(candidate in positive_samples(8)) {
        // Single-level form against a smooth Jacobian and coarse candidates;
        // small quadrature slack absorbs the interpolation error.
        let j = JacobianPotential::new(
            GridFunction::from_fn(10, |x| 0.5 + 0.2 * (2.0 * std::f64::consts::PI * x).cos())
                .unwrap(),
        )
        .unwrap();
        let mu = gibbs_atoms(&j, 10).unwrap();
        let h = entropy_gibbs(&j, 10).unwrap();
        let v = GridFunction::from_samples(candidate).unwrap();
        prop_assert!(variational_functional(&v, &mu).unwrap() >= h - 1e-4);
    }
}
