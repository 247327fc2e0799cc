use std::sync::Arc;

use hinge_core::algebra::{
    divide, groebner_basis, is_groebner_basis, normal_form, parse_poly, strip_positive_factors,
    sturm_roots, Monomial, MonomialOrder, Poly, PolyRing, PositivityContext, Rational, UniPoly,
};
use hinge_core::dynamics::presets::{kepler_pair, random_expanding_state};
use hinge_core::dynamics::{first_integrals, integrate, BodyState, DynamicsError};
use hinge_core::reduction::standard_coordinates;
use nalgebra::{DMatrix, Rotation3, Vector3};
use proptest::prelude::*;

fn ring() -> Arc<PolyRing> {
    PolyRing::with_vars(["a", "b", "c"], MonomialOrder::DegRevLex).unwrap()
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

prop_compose! {
    fn arb_poly(max_terms: usize, max_deg: u32)
        (terms in prop::collection::vec(
            ((0..=max_deg, 0..=max_deg, 0..=max_deg), -9i64..=9, 1i64..=4),
            0..=max_terms))
        -> Poly
    {
        let r = ring();
        Poly::from_terms(
            &r,
            terms.into_iter().map(|((x, y, z), n, d)| (Monomial::from_exponents(&[x, y, z]), q(n, d))),
        )
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ring_axioms(p in arb_poly(5, 3), s in arb_poly(5, 3), t in arb_poly(5, 3)) {
        prop_assert_eq!(&p + &s, &s + &p);
        prop_assert_eq!(&p * &s, &s * &p);
        prop_assert_eq!(&(&p + &s) + &t, &p + &(&s + &t));
        prop_assert_eq!(&(&p * &s) * &t, &p * &(&s * &t));
        prop_assert_eq!(&p * &(&s + &t), &(&p * &s) + &(&p * &t));
        prop_assert!((&p - &p).is_zero());
        prop_assert_eq!(&p * &Poly::one(&ring()), p.clone());
    }

    #[test]
    fn print_parse_round_trip(p in arb_poly(6, 4)) {
        let back = parse_poly(&p.to_string(), &ring()).unwrap();
        prop_assert_eq!(back.to_string(), p.to_string());
        prop_assert_eq!(back, p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn division_is_sound(p in arb_poly(6, 3), d in arb_poly(3, 2)) {
        prop_assume!(!d.is_zero());
        let (quo, rem) = divide(&p, &d).unwrap();
        prop_assert_eq!(&(&quo * &d) + &rem, p);
        if let Some(lm) = d.lead_monomial() {
            for (m, _) in rem.terms() {
                prop_assert!(!lm.divides(m));
            }
        }
    }

    #[test]
    fn strip_keeps_cofactor(p in arb_poly(4, 2), e1 in 0u32..3, e2 in 0u32..3) {
        prop_assume!(!p.is_zero());
        let r = ring();
        let a = Poly::var(&r, "a").unwrap();
        let bc = parse_poly("1 + b + c^2", &r).unwrap();
        let ctx = PositivityContext::with_atoms(["a", "b", "c"]);
        let wrapped = &(&p * &a.pow(e1)) * &bc.pow(e2);
        let stripped = strip_positive_factors(&wrapped, &ctx, &[a.clone(), bc.clone()]).unwrap();
        // Stripping removes only catalog factors: what is left times the
        // removed part is the input, and the left part has no catalog factor.
        let (_, rest) = divide(&wrapped, &stripped).unwrap();
        prop_assert!(rest.is_zero());
        let again = strip_positive_factors(&stripped, &ctx, &[a, bc]).unwrap();
        prop_assert_eq!(again, stripped);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn groebner_basis_is_idempotent(gens in prop::collection::vec(arb_poly(3, 2), 1..4)) {
        let g = groebner_basis(&gens);
        prop_assert!(is_groebner_basis(&g));
        prop_assert_eq!(groebner_basis(&g), g.clone());
        for f in &gens {
            prop_assert!(normal_form(f, &g).is_zero());
        }
    }

    #[test]
    fn sturm_count_matches_known_roots(roots in prop::collection::btree_set(-20i64..20, 0..6), extra in 0u32..2) {
        // prod (x - r_i/4) * (x^2 + 1)^extra has exactly the listed real roots.
        let mut coeffs = vec![q(1, 1)];
        for r in &roots {
            let mut next = vec![q(0, 1); coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i + 1] += c.clone();
                next[i] -= c.clone() * q(*r, 4);
            }
            coeffs = next;
        }
        let mut u = UniPoly::new(coeffs);
        for _ in 0..extra {
            let mut next = vec![q(0, 1); u.coeffs().len() + 2];
            for (i, c) in u.coeffs().iter().enumerate() {
                next[i] += c.clone();
                next[i + 2] += c.clone();
            }
            u = UniPoly::new(next);
        }
        let lo = q(-6, 1);
        let hi = q(6, 1);
        let rep = sturm_roots(&u, &lo, &hi, &q(1, 64)).unwrap();
        prop_assert_eq!(rep.count, roots.len());
        for ((a, b), r) in rep.intervals.iter().zip(&roots) {
            prop_assert!(a < &q(*r, 4) && &q(*r, 4) <= b);
        }
    }
}

fn rotate(s: &BodyState, rot: &Rotation3<f64>) -> BodyState {
    let m = rot.matrix();
    let big = DMatrix::from_fn(3, 3, |i, j| m[(i, j)]);
    BodyState::new(s.masses.clone(), &big * &s.x, &big * &s.v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn integrator_conserves_first_integrals(seed in 0u64..1000, n in 2usize..5) {
        let s = random_expanding_state(n, 3, seed);
        let t = match integrate(&s, 1.0, 1e-11) {
            Ok(t) => t,
            Err(DynamicsError::NearCollision { .. }) => return Ok(()),
            Err(e) => panic!("{e}"),
        };
        let end = &t.samples.last().unwrap().state;
        let (a, b) = (first_integrals(&s), first_integrals(end));
        prop_assert!((a.energy - b.energy).abs() <= 1e-7 * a.energy.abs().max(1.0));
        for (p, q) in a.momentum.iter().zip(&b.momentum) {
            prop_assert!((p - q).abs() <= 1e-9);
        }
        prop_assert!((&a.angular_momentum - &b.angular_momentum).amax() <= 1e-8);
    }

    #[test]
    fn standard_coordinates_are_rotation_invariant(
        seed in 0u64..1000,
        axis in (-1.0f64..1.0, -1.0f64..1.0, 0.1f64..1.0),
        angle in 0.0f64..std::f64::consts::TAU,
    ) {
        let s = random_expanding_state(4, 3, seed);
        let rot = Rotation3::from_axis_angle(
            &nalgebra::Unit::new_normalize(Vector3::new(axis.0, axis.1, axis.2)),
            angle,
        );
        let a = standard_coordinates(&s);
        let b = standard_coordinates(&rotate(&s, &rot));
        prop_assert!(a.max_abs_diff(&b) <= 1e-11);
    }

    #[test]
    fn integration_commutes_with_rotation(seed in 0u64..200, angle in 0.0f64..std::f64::consts::TAU) {
        let s = random_expanding_state(3, 3, seed);
        let rot = Rotation3::from_axis_angle(&Vector3::z_axis(), angle);
        let (Ok(t1), Ok(t2)) = (integrate(&s, 0.5, 1e-11), integrate(&rotate(&s, &rot), 0.5, 1e-11)) else {
            return Ok(());
        };
        let e1 = &t1.samples.last().unwrap().state;
        let e2 = &t2.samples.last().unwrap().state;
        let r1 = rotate(e1, &rot);
        prop_assert!((&r1.x - &e2.x).amax() <= 1e-8);
    }
}

#[test]
fn eccentric_kepler_orbit_closes_after_one_period() {
    // Relative orbit with semi-major axis a: pericentre r_p = a (1 - e),
    // speed sqrt(M (1 + e) / r_p), period 2 pi sqrt(a^3 / M).
    let (m1, m2, a, e): (f64, f64, f64, f64) = (1.0, 0.5, 1.0, 0.6);
    let m = m1 + m2;
    let rp = a * (1.0 - e);
    let vp = (m * (1.0 + e) / rp).sqrt();
    let x = DMatrix::from_column_slice(2, 2, &[-rp * m2 / m, 0.0, rp * m1 / m, 0.0]);
    let v = DMatrix::from_column_slice(2, 2, &[0.0, -vp * m2 / m, 0.0, vp * m1 / m]);
    let s = BodyState::new(vec![m1, m2], x, v).unwrap();
    let period = 2.0 * std::f64::consts::PI * (a.powi(3) / m).sqrt();
    let t = integrate(&s, period, 1e-12).unwrap();
    let end = &t.samples.last().unwrap().state;
    assert!((&end.x - &s.x).amax() < 1e-7, "{}", (&end.x - &s.x).amax());
    assert!((&end.v - &s.v).amax() < 1e-6);
}

#[test]
fn circular_pair_keeps_its_separation() {
    let (s, period) = kepler_pair(1.0, 3.0, 2.0);
    let t = integrate(&s, 2.0 * period, 1e-11).unwrap();
    for smp in &t.samples {
        assert!((smp.state.distances()[0] - 2.0).abs() < 1e-8);
    }
}

#[test]
fn head_on_free_fall_aborts() {
    let x = DMatrix::from_column_slice(2, 2, &[-0.5, 0.0, 0.5, 0.0]);
    let s = BodyState::new(vec![1.0, 1.0], x, DMatrix::zeros(2, 2)).unwrap();
    // Collision at t = pi / 4 for unit masses one apart.
    match integrate(&s, 2.0, 1e-10) {
        Err(DynamicsError::NearCollision { t, last_good, .. }) => {
            assert!((t - std::f64::consts::FRAC_PI_4).abs() < 1e-3);
            assert!(last_good.min_distance() < 1e-3);
        }
        other => panic!("expected abort, got {other:?}"),
    }
}
