//! Round-trip and payload-space properties of the compression codec,
//! including inputs constructed to land in each decompression branch.

mod common;

use common::params_from;
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use tracezero::codec::{self, CompressedElement, DecompressTrace};
use tracezero::error::Error;
use tracezero::fields::{FieldCtx, FieldElem};
use tracezero::picard::{
    enumerate_reduced_divisors, frobenius_divisor, scalar_mul, CurveParams, MumfordDivisor,
};
use tracezero::poly::{self, Poly};

/// Interpolates `v` with `v(x_i) = y_i` through Chinese remaindering over
/// the linear moduli `x - x_i` (the `x_i` must be distinct).
fn interpolate(ctx: &FieldCtx, points: &[(FieldElem, FieldElem)]) -> Poly {
    let parts: Vec<(Poly, Poly)> = points
        .iter()
        .map(|(x, y)| {
            (
                Poly::constant(ctx, y.clone()),
                Poly::from_coeffs(ctx, vec![ctx.neg(x), ctx.one()]),
            )
        })
        .collect();
    poly::crt(ctx, &parts).unwrap()
}

#[test]
fn exhaustive_genus_two_walk_hits_the_weierstrass_branch() {
    // f = x^5 + x^2 + x has the rational Weierstrass point (0, 0) and a
    // subgroup in which some trace zero divisors contain it, forcing the
    // branch that rebuilds a ramified place from the curve equation alone.
    let params = params_from(5, 3, &[0, 1, 1, 0, 0, 1], 60);
    let ext = &params.ext;
    let all = enumerate_reduced_divisors(ext, &params.f_ext).unwrap();
    let mut merged = DecompressTrace::default();
    let mut total = 0usize;
    let mut images: Vec<(CompressedElement, usize)> = Vec::new();
    for d in all.into_iter().filter(|d| params.is_trace_zero(d)) {
        let c = codec::compress(&params, &d).unwrap();
        let (back, trace) = codec::decompress(&params, &c).unwrap();
        assert_eq!(codec::compress(&params, &back).unwrap(), c);
        merged.merge(&trace);
        total += 1;
        match images.iter_mut().find(|(img, _)| *img == c) {
            Some((_, k)) => *k += 1,
            None => images.push((c, 1)),
        }
    }
    assert_eq!(BigUint::from(total), params.tn_order().unwrap());
    assert!(merged.branch_b > 0, "ordinary branch never taken");
    assert!(merged.branch_c > 0, "Weierstrass branch never taken");
    assert!(merged.branch_d_sqrt > 0, "symmetric branch never taken");
    assert!(merged.rational_adjust > 0, "no rational orbit collapsed");
    // Fibers are Frobenius orbits: at most n^g = 9 preimages each.
    for (_, k) in &images {
        assert!(*k <= 9, "fiber of size {k} exceeds n^g");
    }
}

#[test]
fn constructed_divisor_hits_the_symmetric_square_branch() {
    // D = P + w(phi(P)) - 2O is always trace zero (its conjugate sum pairs
    // every point with its involution image), and its norm polynomial is a
    // perfect square, forcing the even-multiplicity square-root branch.
    let params = params_from(5, 3, &[1, 2, 0, 0, 0, 1], 61);
    let ext = &params.ext;
    let mut hits = 0usize;
    for idx in 0..ext.order().to_u64().unwrap() {
        let x = ext.elem_from_index(&BigUint::from(idx));
        if ext.project(&x).is_some() {
            continue; // need a coordinate of full degree
        }
        let fx = poly::eval(ext, &params.f_ext, &x);
        if ext.is_zero(&fx) {
            continue; // skip ramified coordinates
        }
        let Some(y) = ext.sqrt(&fx) else { continue };
        let xq = ext.frobenius(&x, 1);
        let yq_neg = ext.neg(&ext.frobenius(&y, 1));
        let u = poly::mul(
            ext,
            &Poly::from_coeffs(ext, vec![ext.neg(&x), ext.one()]),
            &Poly::from_coeffs(ext, vec![ext.neg(&xq), ext.one()]),
        );
        let v = interpolate(ext, &[(x.clone(), y.clone()), (xq, yq_neg)]);
        let d = MumfordDivisor::new(ext, &params.f_ext, u, v).unwrap();
        assert!(params.is_trace_zero(&d), "P + w(phi P) must be trace zero");
        let c = codec::compress(&params, &d).unwrap();
        let (back, trace) = codec::decompress(&params, &c).unwrap();
        assert_eq!(codec::compress(&params, &back).unwrap(), c);
        assert!(trace.branch_d_sqrt > 0, "square-root branch not taken");
        hits += 1;
        if hits >= 3 {
            break;
        }
    }
    assert!(hits > 0, "no suitable coordinate found");
}

#[test]
fn constructed_divisor_hits_the_split_branch() {
    // The unbalanced branch needs a place carrying different multiplicities
    // on the two sheets, e.g. D = P + phi(P) + w(phi^2(P)) - 3O. Such a D
    // is trace zero only when P itself is, and Tr(P - O) = 0 means the
    // conjugates of P are the zeros of a function with a pole of exact
    // order n at infinity. Pole orders 3 and 5 are Weierstrass gaps in
    // genus 3, so the smallest usable n is 2g + 1 = 7, where y - a(x) for
    // a cubic a works: whenever a^2 - f is irreducible, its roots are one
    // Frobenius orbit and P = (x0, a(x0)) is trace zero.
    let base = FieldCtx::prime(BigUint::from(3u32)).unwrap();
    let septics: &[[i64; 8]] = &[
        [1, 1, 0, 0, 0, 0, 0, 1],
        [2, 1, 0, 0, 0, 0, 0, 1],
        [1, 2, 0, 0, 0, 0, 0, 1],
        [1, 0, 1, 0, 0, 0, 0, 1],
        [2, 2, 1, 0, 0, 0, 0, 1],
    ];
    let mut split_seen = false;
    'curves: for f_coeffs in septics {
        let f = Poly::from_coeffs(
            &base,
            f_coeffs.iter().map(|&c| base.from_i64(c)).collect(),
        );
        let mut rng = ChaCha12Rng::seed_from_u64(62);
        let Ok(params) = CurveParams::new(base.clone(), 7, f.clone(), &mut rng) else {
            continue;
        };
        let ext = &params.ext;
        for a_idx in 0..81u64 {
            let digits = [a_idx % 3, a_idx / 3 % 3, a_idx / 9 % 3, a_idx / 27];
            let a = Poly::from_coeffs(
                &params.base,
                digits.iter().map(|&d| params.base.from_u64(d)).collect(),
            );
            let g = poly::add(
                &params.base,
                &poly::mul(&params.base, &a, &a),
                &poly::neg(&params.base, &params.f),
            );
            let factors = poly::factor(&params.base, &g);
            if factors.len() != 1 || factors[0].1 != 1 || factors[0].0.deg() != Some(7) {
                continue;
            }
            let x0 = poly::find_root(ext, &poly::embed(ext, &g))
                .expect("an irreducible septic splits in the degree 7 extension");
            let y0 = poly::eval(ext, &poly::embed(ext, &a), &x0);
            if ext.is_zero(&y0) {
                continue;
            }
            let p = MumfordDivisor::from_point(ext, &params.f_ext, &x0, &y0).unwrap();
            assert!(
                params.is_trace_zero(&p),
                "zeros of y - a(x) must form a trace zero orbit"
            );
            // Build P + phi(P) + w(phi^2(P)).
            let (x1, y1) = (ext.frobenius(&x0, 1), ext.frobenius(&y0, 1));
            let (x2, y2) = (ext.frobenius(&x0, 2), ext.neg(&ext.frobenius(&y0, 2)));
            let u = {
                let lin =
                    |xv: &FieldElem| Poly::from_coeffs(ext, vec![ext.neg(xv), ext.one()]);
                poly::mul(ext, &poly::mul(ext, &lin(&x0), &lin(&x1)), &lin(&x2))
            };
            let v = interpolate(ext, &[(x0.clone(), y0.clone()), (x1, y1), (x2, y2)]);
            let d = MumfordDivisor::new(ext, &params.f_ext, u, v).unwrap();
            assert!(params.is_trace_zero(&d));
            let c = codec::compress(&params, &d).unwrap();
            let (back, trace) = codec::decompress(&params, &c).unwrap();
            assert_eq!(codec::compress(&params, &back).unwrap(), c);
            assert!(trace.branch_d_split > 0, "expected the unbalanced branch");
            split_seen = true;
            break 'curves;
        }
    }
    assert!(split_seen, "no curve admitted the construction");
}

#[test]
fn rational_three_torsion_adjusts_multiplicity() {
    // (0, 1) on y^2 = x^3 + 1 over F_7 is rational 3-torsion, hence trace
    // zero for n = 3; its norm polynomial is x^3, whose rational place must
    // be recognized as one orbit-collapsed point.
    let params = params_from(7, 3, &[1, 0, 0, 1], 63);
    let ext = &params.ext;
    let d = MumfordDivisor::from_point(
        ext,
        &params.f_ext,
        &ext.embed(&params.base.zero()),
        &ext.embed(&params.base.one()),
    )
    .unwrap();
    assert!(params.is_trace_zero(&d));
    let c = codec::compress(&params, &d).unwrap();
    let (back, trace) = codec::decompress(&params, &c).unwrap();
    assert_eq!(back, d, "a rational point is its own Frobenius orbit");
    assert!(trace.rational_adjust > 0);
}

#[test]
fn quadratic_extension_payloads_count_exactly() {
    // n = 2, genus 1: walk every payload (u0, delta) and check that the
    // number of accepted ones matches the subgroup structure: the identity,
    // one payload per rational 2-torsion point, and one per involution pair.
    let params = params_from(7, 2, &[1, 2, 0, 1], 64);
    let ext = &params.ext;
    let mut accepted = 0usize;
    for u0 in 0..7u64 {
        for delta in [false, true] {
            let c = CompressedElement {
                coords: vec![params.base.from_u64(u0)],
                delta,
            };
            match codec::decompress(&params, &c) {
                Ok((back, _)) => {
                    assert_eq!(codec::compress(&params, &back).unwrap(), c);
                    accepted += 1;
                }
                Err(Error::NoAntiInvariantRoot | Error::MalformedInput(_)) => {}
                Err(e) => panic!("unexpected rejection: {e:?}"),
            }
        }
    }
    let all = enumerate_reduced_divisors(ext, &params.f_ext).unwrap();
    let t2: Vec<_> = all.into_iter().filter(|d| params.is_trace_zero(d)).collect();
    let fixed = t2
        .iter()
        .filter(|d| !d.is_identity() && frobenius_divisor(ext, d, 1) == **d)
        .count();
    let paired = t2.len() - 1 - fixed;
    assert_eq!(paired % 2, 0);
    assert_eq!(accepted, 1 + fixed + paired / 2);
    assert_eq!(BigUint::from(t2.len()), params.tn_order().unwrap());
}

#[test]
fn compression_respects_scalar_multiplication_on_classes() {
    // Equal payloads mean Frobenius-conjugate elements, and conjugation
    // commutes with scalar multiplication, so equal payloads stay equal
    // after multiplying by any k.
    for (params, seed) in [
        (params_from(7, 3, &[1, 2, 0, 1], 65), 70u64),
        (params_from(5, 3, &[1, 2, 0, 0, 0, 1], 66), 71),
    ] {
        let ext = &params.ext;
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        for _ in 0..6 {
            let d = params.random_trace_zero(&mut rng).unwrap();
            let c = codec::compress(&params, &d).unwrap();
            for j in 1..params.n {
                let conj = frobenius_divisor(ext, &d, j);
                assert_eq!(codec::compress(&params, &conj).unwrap(), c);
                for k in [2u64, 5, 11] {
                    let kd = scalar_mul(ext, &params.f_ext, &d, &BigUint::from(k));
                    let kconj = scalar_mul(ext, &params.f_ext, &conj, &BigUint::from(k));
                    assert_eq!(
                        codec::compress(&params, &kd).unwrap(),
                        codec::compress(&params, &kconj).unwrap()
                    );
                }
            }
        }
    }
}

#[test]
fn serialization_length_is_optimal_and_roundtrips_at_large_sizes() {
    // 79-bit prime 2^78 + 7: 2 coordinates of 10 bytes plus the parity byte.
    let base = FieldCtx::prime(BigUint::parse_bytes(b"302231454903657293676551", 10).unwrap())
        .unwrap();
    let f = Poly::from_coeffs(
        &base,
        [1i64, 2, 0, 1].iter().map(|&c| base.from_i64(c)).collect(),
    );
    let mut rng = ChaCha12Rng::seed_from_u64(72);
    let params = CurveParams::new(base, 3, f, &mut rng).unwrap();
    assert_eq!(params.base.prime_bit_len(), 79);
    for _ in 0..5 {
        let d = params.random_trace_zero(&mut rng).unwrap();
        let c = codec::compress(&params, &d).unwrap();
        let bytes = codec::serialize(&params, &c);
        assert_eq!(bytes.len(), 2 * 10 + 1);
        assert_eq!(codec::deserialize(&params, &bytes).unwrap(), c);
        let (back, _) = codec::decompress(&params, &c).unwrap();
        assert_eq!(codec::compress(&params, &back).unwrap(), c);
    }
}

#[test]
fn preimage_fibers_are_frobenius_orbits() {
    let params = params_from(7, 3, &[1, 2, 0, 1], 67);
    let ext = &params.ext;
    let all = enumerate_reduced_divisors(ext, &params.f_ext).unwrap();
    let t3: Vec<_> = all.into_iter().filter(|d| params.is_trace_zero(d)).collect();
    for d in t3.iter().filter(|d| !d.is_identity()) {
        let c = codec::compress(&params, d).unwrap();
        let fiber: Vec<_> = t3
            .iter()
            .filter(|e| codec::compress(&params, e).unwrap() == c)
            .collect();
        assert!(fiber.len() <= 3);
        // The fiber is exactly the Frobenius orbit of d.
        for e in &fiber {
            assert!(
                (0..params.n).any(|j| frobenius_divisor(ext, d, j) == **e),
                "fiber member is not a conjugate",
            );
        }
    }
}
