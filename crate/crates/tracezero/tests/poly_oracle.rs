//! Polynomial arithmetic checked against naive reimplementations and
//! defining identities.

use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use tracezero::fields::FieldCtx;
use tracezero::poly::{self, Poly};

fn f7() -> FieldCtx {
    FieldCtx::prime(BigUint::from(7u32)).unwrap()
}

fn poly_from(ctx: &FieldCtx, coeffs: &[u64]) -> Poly {
    Poly::from_coeffs(ctx, coeffs.iter().map(|&c| ctx.from_u64(c)).collect())
}

/// Schoolbook product, written independently of the library's kernel
/// (which switches to Karatsuba above a threshold).
fn naive_mul(ctx: &FieldCtx, a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() || b.is_zero() {
        return Poly::zero();
    }
    let (da, db) = (a.deg().unwrap(), b.deg().unwrap());
    let mut out = vec![ctx.zero(); da + db + 1];
    for i in 0..=da {
        for j in 0..=db {
            let t = ctx.mul(&a.coeff(ctx, i), &b.coeff(ctx, j));
            out[i + j] = ctx.add(&out[i + j], &t);
        }
    }
    Poly::from_coeffs(ctx, out)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mul_matches_schoolbook(a in prop::collection::vec(0u64..7, 0..24),
                              b in prop::collection::vec(0u64..7, 0..24)) {
        let ctx = f7();
        let (pa, pb) = (poly_from(&ctx, &a), poly_from(&ctx, &b));
        prop_assert_eq!(poly::mul(&ctx, &pa, &pb), naive_mul(&ctx, &pa, &pb));
    }

    #[test]
    fn divrem_is_euclidean(a in prop::collection::vec(0u64..7, 0..16),
                           b in prop::collection::vec(0u64..7, 1..8)) {
        let ctx = f7();
        let pa = poly_from(&ctx, &a);
        let pb = poly_from(&ctx, &b);
        prop_assume!(!pb.is_zero());
        let (q, r) = poly::divrem(&ctx, &pa, &pb).unwrap();
        let back = poly::add(&ctx, &poly::mul(&ctx, &q, &pb), &r);
        prop_assert_eq!(back, pa);
        prop_assert!(r.deg().map_or(true, |dr| dr < pb.deg().unwrap()));
    }

    #[test]
    fn eval_is_a_ring_homomorphism(a in prop::collection::vec(0u64..7, 0..10),
                                   b in prop::collection::vec(0u64..7, 0..10),
                                   x in 0u64..7) {
        let ctx = f7();
        let (pa, pb) = (poly_from(&ctx, &a), poly_from(&ctx, &b));
        let ex = ctx.from_u64(x);
        let sum = poly::eval(&ctx, &poly::add(&ctx, &pa, &pb), &ex);
        prop_assert_eq!(sum, ctx.add(&poly::eval(&ctx, &pa, &ex), &poly::eval(&ctx, &pb, &ex)));
        let prod = poly::eval(&ctx, &poly::mul(&ctx, &pa, &pb), &ex);
        prop_assert_eq!(prod, ctx.mul(&poly::eval(&ctx, &pa, &ex), &poly::eval(&ctx, &pb, &ex)));
    }
}

#[test]
fn gcd_divides_and_is_monic() {
    let ctx = f7();
    let mut rng = ChaCha12Rng::seed_from_u64(31);
    for _ in 0..30 {
        let a = poly::mul(
            &ctx,
            &random_poly(&ctx, &mut rng, 4),
            &random_poly(&ctx, &mut rng, 3),
        );
        let b = poly::mul(
            &ctx,
            &random_poly(&ctx, &mut rng, 4),
            &random_poly(&ctx, &mut rng, 2),
        );
        let g = poly::gcd(&ctx, &a, &b);
        if g.is_zero() {
            assert!(a.is_zero() && b.is_zero());
            continue;
        }
        assert!(g.is_monic(&ctx));
        for p in [&a, &b] {
            if !p.is_zero() {
                let (_, r) = poly::divrem(&ctx, p, &g).unwrap();
                assert!(r.is_zero(), "gcd must divide both inputs");
            }
        }
    }
}

fn random_poly(ctx: &FieldCtx, rng: &mut ChaCha12Rng, max_deg: usize) -> Poly {
    let len = (rand::Rng::gen_range(rng, 0..=max_deg)) + 1;
    Poly::from_coeffs(ctx, (0..len).map(|_| ctx.rand_elem(rng)).collect())
}

#[test]
fn inv_mod_satisfies_bezout() {
    let ctx = f7();
    let m = poly_from(&ctx, &[1, 0, 1, 1]); // x^3 + x^2 + 1, no roots in F_7
    let mut rng = ChaCha12Rng::seed_from_u64(32);
    for _ in 0..20 {
        let a = random_poly(&ctx, &mut rng, 2);
        match poly::inv_mod(&ctx, &a, &m) {
            Ok(inv) => {
                let prod = poly::mulmod(&ctx, &a, &inv, &m);
                assert_eq!(prod, Poly::one(&ctx));
            }
            Err(_) => {
                // Only non-units fail: gcd(a, m) nontrivial or a = 0.
                let g = poly::gcd(&ctx, &a, &m);
                assert!(a.is_zero() || g.deg().unwrap_or(0) > 0);
            }
        }
    }
}

#[test]
fn factor_recovers_a_known_splitting() {
    let ctx = f7();
    // (x - 1)^2 (x - 3) (x^2 + x + 3), the quadratic irreducible over F_7
    // (its discriminant 1 - 12 = -11 = 3 is a non-residue mod 7).
    let lin1 = poly_from(&ctx, &[6, 1]);
    let lin3 = poly_from(&ctx, &[4, 1]);
    let quad = poly_from(&ctx, &[3, 1, 1]);
    let prod = poly::mul(
        &ctx,
        &poly::mul(&ctx, &poly::mul(&ctx, &lin1, &lin1), &lin3),
        &quad,
    );
    let mut factors = poly::factor(&ctx, &prod);
    factors.sort_by(|(a, _), (b, _)| poly::poly_cmp(a, b));
    let mut expected = vec![(lin1, 2usize), (lin3, 1), (quad, 1)];
    expected.sort_by(|(a, _), (b, _)| poly::poly_cmp(a, b));
    assert_eq!(factors, expected);
}

#[test]
fn factor_product_reassembles_random_inputs() {
    let ctx = f7();
    let mut rng = ChaCha12Rng::seed_from_u64(33);
    for _ in 0..20 {
        let p = random_poly(&ctx, &mut rng, 8);
        if p.deg().unwrap_or(0) == 0 {
            continue;
        }
        let factors = poly::factor(&ctx, &p);
        let mut acc = Poly::one(&ctx);
        for (g, e) in &factors {
            assert!(g.is_monic(&ctx));
            acc = poly::mul(&ctx, &acc, &poly::pow(&ctx, g, *e));
        }
        assert_eq!(poly::monic(&ctx, &p), acc);
        // Deterministic: a second run yields the same decomposition.
        assert_eq!(poly::factor(&ctx, &p), factors);
    }
}

#[test]
fn factor_treats_an_extension_modulus_as_irreducible() {
    let base = FieldCtx::prime(BigUint::from(13u32)).unwrap();
    let mut rng = ChaCha12Rng::seed_from_u64(34);
    let ext = base.extension(4, &mut rng).unwrap();
    let modulus = Poly::from_coeffs(&base, ext.modulus().unwrap().to_vec());
    let factors = poly::factor(&base, &modulus);
    assert_eq!(factors.len(), 1);
    assert_eq!(factors[0].1, 1);
    assert_eq!(factors[0].0, poly::monic(&base, &modulus));
}

#[test]
fn crt_matches_reduction() {
    let ctx = f7();
    let mut rng = ChaCha12Rng::seed_from_u64(35);
    for _ in 0..15 {
        // Coprime moduli: distinct irreducibles (x - 0), (x - 1)^2 shape
        // avoided; build from distinct linear and one irreducible quadratic.
        let m1 = poly_from(&ctx, &[1, 1]);
        let m2 = poly_from(&ctx, &[5, 1]);
        let m3 = poly_from(&ctx, &[3, 1, 1]);
        let target = random_poly(&ctx, &mut rng, 3);
        let parts: Vec<(Poly, Poly)> = [&m1, &m2, &m3]
            .iter()
            .map(|m| (poly::rem(&ctx, &target, m).unwrap(), (*m).clone()))
            .collect();
        let combined = poly::crt(&ctx, &parts).unwrap();
        let modulus = poly::mul(&ctx, &poly::mul(&ctx, &m1, &m2), &m3);
        assert_eq!(
            poly::rem(&ctx, &combined, &modulus).unwrap(),
            poly::rem(&ctx, &target, &modulus).unwrap()
        );
    }
}

#[test]
fn modular_and_hensel_sqrt_square_back() {
    let ctx = f7();
    let m = poly_from(&ctx, &[3, 1, 1]); // irreducible quadratic
    let mut rng = ChaCha12Rng::seed_from_u64(36);
    let mut some_root = 0;
    for _ in 0..20 {
        let a = random_poly(&ctx, &mut rng, 1);
        if a.is_zero() {
            continue;
        }
        let target = poly::mulmod(&ctx, &a, &a, &m);
        let r = poly::modular_sqrt(&ctx, &target, &m).unwrap();
        let r = r.expect("squares must have roots");
        assert_eq!(poly::mulmod(&ctx, &r, &r, &m), target);
        some_root += 1;
        // Hensel: lift to modulus m^4 of a target that is a square there.
        let lifted_target = poly::rem(
            &ctx,
            &naive_square(&ctx, &a),
            &poly::pow(&ctx, &m, 4),
        )
        .unwrap();
        let v = poly::hensel_sqrt(&ctx, &lifted_target, &r, &m, 4).unwrap();
        let check = poly::rem(&ctx, &naive_square(&ctx, &v), &poly::pow(&ctx, &m, 4)).unwrap();
        assert_eq!(check, lifted_target);
    }
    assert!(some_root > 0);
}

fn naive_square(ctx: &FieldCtx, a: &Poly) -> Poly {
    poly::mul(ctx, a, a)
}

#[test]
fn find_root_finds_a_root_or_proves_none() {
    let ctx = f7();
    let mut rng = ChaCha12Rng::seed_from_u64(37);
    let ext = ctx.extension(3, &mut rng).unwrap();
    // A polynomial with all roots in F_{7^3}: the norm-style product of
    // (x - a) over conjugates of a random element.
    for _ in 0..10 {
        let a = ext.rand_elem(&mut rng);
        let mut p = Poly::one(&ext);
        for j in 0..3 {
            let c = ext.frobenius(&a, j);
            p = poly::mul(&ext, &p, &Poly::from_coeffs(&ext, vec![ext.neg(&c), ext.one()]));
        }
        let r = poly::find_root(&ext, &p).unwrap();
        assert!(ext.is_zero(&poly::eval(&ext, &p, &r)));
        // Deterministic canonical root.
        assert_eq!(poly::find_root(&ext, &p).unwrap(), r);
    }
    // No roots: an irreducible quadratic over the extension.
    let irr = {
        let big = ext.extension(2, &mut rng).unwrap();
        Poly::from_coeffs(&ext, big.modulus().unwrap().to_vec())
    };
    assert!(poly::find_root(&ext, &irr).is_err());
}

#[test]
fn shift_composes_with_evaluation() {
    let ctx = f7();
    let mut rng = ChaCha12Rng::seed_from_u64(38);
    for _ in 0..20 {
        let p = random_poly(&ctx, &mut rng, 5);
        let c = ctx.rand_elem(&mut rng);
        let shifted = poly::shift(&ctx, &p, &c);
        for xv in 0..7u64 {
            let x = ctx.from_u64(xv);
            let want = poly::eval(&ctx, &p, &ctx.add(&x, &c));
            assert_eq!(poly::eval(&ctx, &shifted, &x), want);
        }
    }
}

#[test]
fn frobenius_map_commutes_with_evaluation() {
    let base = FieldCtx::prime(BigUint::from(5u32)).unwrap();
    let mut rng = ChaCha12Rng::seed_from_u64(39);
    let ext = base.extension(3, &mut rng).unwrap();
    for _ in 0..15 {
        let p = Poly::from_coeffs(&ext, (0..4).map(|_| ext.rand_elem(&mut rng)).collect());
        let x = ext.rand_elem(&mut rng);
        let lhs = ext.frobenius(&poly::eval(&ext, &p, &x), 1);
        let rhs = poly::eval(&ext, &poly::frobenius_map(&ext, &p, 1), &ext.frobenius(&x, 1));
        assert_eq!(lhs, rhs);
    }
}
