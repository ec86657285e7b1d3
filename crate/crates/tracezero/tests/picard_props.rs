//! Group-theoretic properties of the Picard group arithmetic and the trace
//! zero subgroup.

mod common;

use std::collections::HashSet;

use common::params_from;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use tracezero::fields::FieldCtx;
use tracezero::picard::{
    add_divisors, divisor_neg, enumerate_reduced_divisors, frobenius_divisor,
    group_order_bruteforce, lpolynomial, picard_order_from_lpoly, scalar_mul, MumfordDivisor,
};
use tracezero::poly::{self, Poly};

#[test]
fn group_axioms_hold() {
    for (params, seed) in [
        (params_from(7, 3, &[1, 2, 0, 1], 41), 51u64),
        (params_from(5, 3, &[1, 2, 0, 0, 0, 1], 42), 52),
        (params_from(7, 3, &[2, 1, 0, 0, 1, 0, 0, 1], 43), 53),
    ] {
        let ext = &params.ext;
        let f = &params.f_ext;
        let id = MumfordDivisor::identity(ext);
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        for _ in 0..8 {
            let a = tracezero::picard::random_divisor(ext, f, &mut rng).unwrap();
            let b = tracezero::picard::random_divisor(ext, f, &mut rng).unwrap();
            let c = tracezero::picard::random_divisor(ext, f, &mut rng).unwrap();
            // Identity, inverses, commutativity, associativity.
            assert_eq!(add_divisors(ext, f, &a, &id), a);
            assert_eq!(add_divisors(ext, f, &a, &divisor_neg(ext, &a)), id);
            assert_eq!(add_divisors(ext, f, &a, &b), add_divisors(ext, f, &b, &a));
            let ab_c = add_divisors(ext, f, &add_divisors(ext, f, &a, &b), &c);
            let a_bc = add_divisors(ext, f, &a, &add_divisors(ext, f, &b, &c));
            assert_eq!(ab_c, a_bc);
        }
    }
}

#[test]
fn scalar_mul_is_linear_and_matches_repeated_addition() {
    let params = params_from(5, 3, &[1, 2, 0, 0, 0, 1], 44);
    let ext = &params.ext;
    let f = &params.f_ext;
    let mut rng = ChaCha12Rng::seed_from_u64(54);
    for _ in 0..5 {
        let d = tracezero::picard::random_divisor(ext, f, &mut rng).unwrap();
        let mut acc = MumfordDivisor::identity(ext);
        for k in 0u64..8 {
            assert_eq!(scalar_mul(ext, f, &d, &BigUint::from(k)), acc);
            acc = add_divisors(ext, f, &acc, &d);
        }
        // (a + b) D = a D + b D
        let (a, b) = (BigUint::from(37u32), BigUint::from(23u32));
        let lhs = scalar_mul(ext, f, &d, &(&a + &b));
        let rhs = add_divisors(
            ext,
            f,
            &scalar_mul(ext, f, &d, &a),
            &scalar_mul(ext, f, &d, &b),
        );
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn frobenius_is_a_group_homomorphism() {
    let params = params_from(7, 3, &[1, 2, 0, 1], 45);
    let ext = &params.ext;
    let f = &params.f_ext;
    let mut rng = ChaCha12Rng::seed_from_u64(55);
    for _ in 0..8 {
        let a = tracezero::picard::random_divisor(ext, f, &mut rng).unwrap();
        let b = tracezero::picard::random_divisor(ext, f, &mut rng).unwrap();
        let sum_then_phi = frobenius_divisor(ext, &add_divisors(ext, f, &a, &b), 1);
        let phi_then_sum = add_divisors(
            ext,
            f,
            &frobenius_divisor(ext, &a, 1),
            &frobenius_divisor(ext, &b, 1),
        );
        assert_eq!(sum_then_phi, phi_then_sum);
        // phi^n is the identity map on F_{q^n}-rational classes.
        assert_eq!(frobenius_divisor(ext, &a, params.n), a);
    }
}

#[test]
fn trace_lands_in_the_rational_subgroup_and_detects_membership() {
    let params = params_from(5, 3, &[1, 2, 0, 0, 0, 1], 46);
    let ext = &params.ext;
    let mut rng = ChaCha12Rng::seed_from_u64(56);
    for _ in 0..8 {
        let d = tracezero::picard::random_divisor(ext, &params.f_ext, &mut rng).unwrap();
        let t = params.trace(&d);
        assert_eq!(frobenius_divisor(ext, &t, 1), t, "trace must be rational");
        let z = params.random_trace_zero(&mut rng).unwrap();
        assert!(params.is_trace_zero(&z));
        assert!(params.trace(&z).is_identity());
        // Annihilated by the subgroup order.
        let order = params.tn_order().unwrap();
        assert!(scalar_mul(ext, &params.f_ext, &z, &order).is_identity());
    }
}

#[test]
fn sampling_covers_the_subgroup() {
    // Coupon-collector style: 10 |T_3| draws should reach at least 90% of
    // the subgroup if sampling is anywhere near uniform.
    let params = params_from(7, 3, &[1, 2, 0, 1], 47);
    let order = params.tn_order().unwrap().to_usize().unwrap();
    let mut rng = ChaCha12Rng::seed_from_u64(57);
    let mut seen: HashSet<String> = HashSet::new();
    for _ in 0..10 * order {
        let d = params.random_trace_zero(&mut rng).unwrap();
        seen.insert(format!("{:?}|{:?}", d.u, d.v));
    }
    assert!(
        seen.len() * 10 >= order * 9,
        "only {} of {} elements sampled",
        seen.len(),
        order
    );
}

#[test]
fn orders_match_brute_force_and_the_l_polynomial() {
    for (q, f_coeffs) in [
        (5u64, vec![1i64, 2, 0, 1]),
        (7, vec![1, 2, 0, 1]),
        (7, vec![1, 0, 3, 0, 0, 1]),
    ] {
        let base = FieldCtx::prime(BigUint::from(q)).unwrap();
        let f = Poly::from_coeffs(&base, f_coeffs.iter().map(|&c| base.from_i64(c)).collect());
        let a = lpolynomial(&base, &f).unwrap();
        let brute = group_order_bruteforce(&base, &f).unwrap();
        assert_eq!(picard_order_from_lpoly(&a, 1), brute);
        // Weil interval.
        let g = (f_coeffs.len() - 2) / 2;
        let sq = (q as f64).sqrt();
        let lo = ((sq - 1.0).powi(2 * g as i32)).floor() as u64;
        let hi = ((sq + 1.0).powi(2 * g as i32)).ceil() as u64;
        let b = brute.to_u64().unwrap();
        assert!(b >= lo && b <= hi, "order {b} outside Weil interval [{lo}, {hi}]");
    }
}

#[test]
fn enumeration_agrees_with_the_order_and_is_duplicate_free() {
    let base = FieldCtx::prime(BigUint::from(7u32)).unwrap();
    let f = Poly::from_coeffs(
        &base,
        [1i64, 2, 0, 1].iter().map(|&c| base.from_i64(c)).collect(),
    );
    let all = enumerate_reduced_divisors(&base, &f).unwrap();
    let mut keys: Vec<String> = all.iter().map(|d| format!("{:?}|{:?}", d.u, d.v)).collect();
    keys.sort();
    keys.dedup();
    assert_eq!(BigUint::from(keys.len()), group_order_bruteforce(&base, &f).unwrap());
    // Every enumerated divisor is reduced and on the curve.
    for d in &all {
        assert!(d.u.deg().unwrap_or(0) <= 1);
        assert!(d.u.is_monic(&base) || d.is_identity());
        let diff = poly::rem(
            &base,
            &poly::add(&base, &poly::mul(&base, &d.v, &d.v), &poly::neg(&base, &f)),
            &d.u,
        )
        .unwrap_or_else(|_| Poly::zero());
        assert!(diff.is_zero(), "u must divide v^2 - f");
    }
}

#[test]
fn subgroup_order_divides_the_extension_group_order() {
    for (params, _) in [
        (params_from(7, 3, &[1, 2, 0, 1], 48), 0u64),
        (params_from(11, 5, &[3, 1, 0, 1], 49), 0),
        (params_from(5, 3, &[1, 2, 0, 0, 0, 1], 50), 0),
    ] {
        let a = lpolynomial(&params.base, &params.f).unwrap();
        let pic_ext = picard_order_from_lpoly(&a, params.n);
        let pic_base = picard_order_from_lpoly(&a, 1);
        let tn = params.tn_order().unwrap();
        assert!((&pic_ext % &tn).is_zero());
        assert_eq!(&pic_base * &tn, pic_ext, "product formula");
        assert!(tn > BigUint::one());
    }
}
