//! Property tests for the structural identities the rest of the crate
//! leans on: square decompositions, polarization, the two membership
//! routes for generated cones, and Hankel positivity of state moments.

use std::sync::Arc;

use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;
use proptest::collection::vec;
use proptest::prelude::*;

use ostar::algebra::StarAlgebra;
use ostar::cone::ConeModel;
use ostar::functional::Functional;
use ostar::gns::GnsData;
use ostar::moments;
use ostar::{C64, Element};

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn elem(pairs: &[(f64, f64)]) -> Element {
    let coeffs: Vec<C64> = pairs.iter().map(|&(re, im)| C64::new(re, im)).collect();
    Element::from_slice(&coeffs)
}

fn add(a: &Element, b: &Element) -> Element {
    Element::from_coeffs(a.coeffs() + b.coeffs())
}

fn sub(a: &Element, b: &Element) -> Element {
    Element::from_coeffs(a.coeffs() - b.coeffs())
}

fn scale_elem(a: &Element, z: C64) -> Element {
    Element::from_coeffs(a.coeffs() * z)
}

/// Small menu of algebras: commutative, simple matrix, and mixed-block.
fn algebra_menu() -> impl Strategy<Value = Arc<StarAlgebra>> {
    prop_oneof![
        (1..=5usize).prop_map(|n| Arc::new(StarAlgebra::pointwise(n))),
        Just(Arc::new(StarAlgebra::matrix_blocks(&[2]).unwrap())),
        Just(Arc::new(StarAlgebra::matrix_blocks(&[2, 1]).unwrap())),
        Just(Arc::new(StarAlgebra::matrix_blocks(&[3]).unwrap())),
    ]
}

/// An algebra together with `count` coordinate vectors of matching length.
fn algebra_with_coords(
    count: usize,
) -> impl Strategy<Value = (Arc<StarAlgebra>, Vec<Vec<(f64, f64)>>)> {
    algebra_menu().prop_flat_map(move |alg| {
        let dim = alg.dim();
        let coords = vec(vec((-2.0..2.0f64, -2.0..2.0f64), dim), count);
        (Just(alg), coords)
    })
}

proptest! {
    // every element is a difference of two squares of shifted copies,
    // which is what makes the cone span the whole algebra
    #[test]
    fn difference_of_squares_recovers_the_element(
        (alg, coords) in algebra_with_coords(1)
    ) {
        let a = elem(&coords[0]);
        let unit = alg.unit();
        let p = add(&a, &unit);
        let m = sub(&a, &unit);
        let squares = sub(
            &alg.multiply(&p, &p).unwrap(),
            &alg.multiply(&m, &m).unwrap(),
        );
        let residual = sub(&squares, &scale_elem(&a, c(4.0))).sup_norm();
        let tol = 1e-9 * (1.0 + a.sup_norm()).powi(2);
        assert_abs_diff_eq!(residual, 0.0, epsilon = tol);
    }

    // the sesquilinear form of any functional is recovered from its
    // diagonal, so positivity on squares pins down the whole functional
    #[test]
    fn polarization_recovers_cross_terms(
        (alg, coords) in algebra_with_coords(3)
    ) {
        let a = elem(&coords[0]);
        let b = elem(&coords[1]);
        let values: Vec<C64> = coords[2].iter().map(|&(re, im)| C64::new(re, im)).collect();
        let w = Functional::from_basis_values(&values);
        let direct = w
            .apply(&alg.multiply(&alg.star(&b).unwrap(), &a).unwrap())
            .unwrap();
        let i = C64::new(0.0, 1.0);
        let mut acc = C64::new(0.0, 0.0);
        let mut ik = c(1.0);
        for _ in 0..4 {
            let s = add(&a, &scale_elem(&b, ik));
            let square = alg.multiply(&alg.star(&s).unwrap(), &s).unwrap();
            acc += ik * w.apply(&square).unwrap();
            ik *= i;
        }
        let recovered = acc * c(0.25);
        let tol = 1e-8
            * (1.0 + w.norm())
            * (1.0 + a.sup_norm() + b.sup_norm()).powi(2);
        assert_abs_diff_eq!((recovered - direct).norm(), 0.0, epsilon = tol);
    }

    // primal membership in the generator cone and dual positivity on
    // the element cone must agree away from the boundary
    #[test]
    fn generator_membership_matches_dual_positivity(
        (n, scales, coeffs, probe) in (2..=5usize).prop_flat_map(|n| (
            Just(n),
            vec(0.2..3.0f64, n),
            vec(0.0..3.0f64, n),
            vec(-3.0..3.0f64, n),
        ))
    ) {
        let alg = Arc::new(StarAlgebra::pointwise(n));
        let gens: Vec<Functional> = scales
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let mut v = vec![0.0; n];
                v[i] = *s;
                Functional::from_real_basis_values(&v)
            })
            .collect();
        let cone = ConeModel::functional_generated(alg, gens.clone()).unwrap();

        // an explicit conic combination must pass both routes
        let mut w = gens[0].scale(c(coeffs[0]));
        for (g, x) in gens.iter().zip(&coeffs).skip(1) {
            w = w.add(&g.scale(c(*x)));
        }
        prop_assert!(cone.functional_report(&w).unwrap().positive);
        let cert = cone.in_generator_cone(&w).unwrap();
        prop_assert!(cert.is_some(), "no certificate for a conic combination");
        let x = cert.unwrap();
        let mut back = gens[0].scale(c(x[0]));
        for (g, xi) in gens.iter().zip(x.iter()).skip(1) {
            back = back.add(&g.scale(c(*xi)));
        }
        prop_assert!(
            back.distance(&w) <= 1e-6 * (1.0 + w.norm()),
            "certificate does not reproduce the functional"
        );

        // a random functional that is robustly inside or outside must
        // get the same answer from both routes
        let v = Functional::from_real_basis_values(&probe);
        let report = cone.functional_report(&v).unwrap();
        let scale = v.norm().max(1.0);
        if report.margin > 1e-3 * scale {
            prop_assert!(cone.in_generator_cone(&v).unwrap().is_some());
        } else if report.margin < -1e-3 * scale {
            prop_assert!(cone.in_generator_cone(&v).unwrap().is_none());
        }
    }

    // moment sequences of genuine states have positive Hankel forms
    #[test]
    fn hankel_of_a_commutative_state_is_positive(
        (weights, vals) in (1..=6usize).prop_flat_map(|n| (
            vec(0.05..1.0f64, n),
            vec(-3.0..3.0f64, n),
        ))
    ) {
        let alg = StarAlgebra::pointwise(weights.len());
        let mass: f64 = weights.iter().sum();
        let normalized: Vec<f64> = weights.iter().map(|x| x / mass).collect();
        let w = Functional::from_real_basis_values(&normalized);
        let a = Element::from_reals(&vals);
        let gns = GnsData::build(&alg, &w).unwrap();
        let seq = moments::moment_sequence(&gns, &a, 24).unwrap();
        let eig = seq.hankel_min_eig(13).unwrap();
        prop_assert!(eig >= -1e-10, "balanced Hankel min eig {eig:.3e}");
    }

    #[test]
    fn hankel_of_a_matrix_state_is_positive(
        (g, h) in (vec(-2.0..2.0f64, 8), vec(-2.0..2.0f64, 4))
    ) {
        let alg = StarAlgebra::matrix_blocks(&[2]).unwrap();
        let gm = DMatrix::<C64>::from_fn(2, 2, |r, q| {
            C64::new(g[2 * (r * 2 + q)], g[2 * (r * 2 + q) + 1])
        });
        let mut rho = gm.adjoint() * &gm;
        rho += DMatrix::<C64>::identity(2, 2) * c(0.05);
        let tr = (rho[(0, 0)] + rho[(1, 1)]).re;
        // covector entry for the (r, q) matrix unit is rho[(q, r)]
        let w = Functional::from_basis_values(&[
            rho[(0, 0)] / tr,
            rho[(1, 0)] / tr,
            rho[(0, 1)] / tr,
            rho[(1, 1)] / tr,
        ]);
        let a = Element::from_slice(&[
            c(h[0]),
            C64::new(h[1], h[2]),
            C64::new(h[1], -h[2]),
            c(h[3]),
        ]);
        let gns = GnsData::build(&alg, &w).unwrap();
        let seq = moments::moment_sequence(&gns, &a, 24).unwrap();
        let eig = seq.hankel_min_eig(13).unwrap();
        prop_assert!(eig >= -1e-10, "balanced Hankel min eig {eig:.3e}");
    }
}
