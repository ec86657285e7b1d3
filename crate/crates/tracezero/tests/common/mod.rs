//! Shared oracles for the integration tests.
//!
//! The centerpiece checks a claimed function `h = h1 + y h2` against the
//! divisor identity `div(h) = sum_j phi^j(D_affine) - (n deg u) O` place by
//! place: the vanishing order at each affine place is computed from first
//! principles (a truncated power-series expansion of `y` around the place,
//! or parity bookkeeping at Weierstrass points), and the pole order at
//! infinity from the degrees. This never calls the function-construction
//! code it is checking.
//!
//! Not every helper is used by every test binary that includes this module.
#![allow(dead_code)]

use tracezero::fields::{FieldCtx, FieldElem};
use tracezero::funcs::CurveFunction;
use tracezero::picard::{CurveParams, MumfordDivisor};
use tracezero::poly::{self, Poly};

/// `(x - a)`-adic valuation of `p` over `ctx`, capped at `cap`.
fn valuation_at(ctx: &FieldCtx, p: &Poly, m: &Poly, cap: usize) -> usize {
    if p.is_zero() {
        return cap;
    }
    let mut v = 0usize;
    let mut cur = p.clone();
    while v < cap {
        let (q, r) = poly::divrem(ctx, &cur, m).expect("linear divisor");
        if !r.is_zero() {
            break;
        }
        cur = q;
        v += 1;
    }
    v
}

/// Vanishing order of `h1 + y h2` at the affine point `(a, b)` of
/// `y^2 = f(x)` over `ctx`, exact as long as it is at most `cap`.
fn point_order(
    ctx: &FieldCtx,
    f: &Poly,
    a: &FieldElem,
    b: &FieldElem,
    h1: &Poly,
    h2: &Poly,
    cap: usize,
) -> usize {
    let m = Poly::from_coeffs(ctx, vec![ctx.neg(a), ctx.one()]);
    if ctx.is_zero(b) {
        // Weierstrass point: ord(x - a) = 2, ord(y) = 1, and the two parts
        // of h have orders of opposite parity, so the minimum is exact.
        assert!(
            ctx.is_zero(&poly::eval(ctx, f, a)),
            "claimed Weierstrass point is not on the curve"
        );
        let s1 = if h1.is_zero() { usize::MAX / 4 } else { valuation_at(ctx, h1, &m, cap) };
        let s2 = if h2.is_zero() { usize::MAX / 4 } else { valuation_at(ctx, h2, &m, cap) };
        return (2 * s1).min(2 * s2 + 1).min(cap);
    }
    // Ordinary point: x - a is a uniformizer; expand y as a power series
    // y(x) with y(a) = b via Hensel lifting and read off the valuation.
    let k = cap + 1;
    let b_poly = Poly::constant(ctx, b.clone());
    let y_series = poly::hensel_sqrt(ctx, f, &b_poly, &m, k).expect("series lift at ordinary point");
    let mk = poly::pow(ctx, &m, k);
    let h_series = poly::rem(
        ctx,
        &poly::add(ctx, h1, &poly::mul(ctx, &y_series, h2)),
        &mk,
    )
    .expect("series truncation");
    valuation_at(ctx, &h_series, &m, cap)
}

/// Checks `div(h1 + y h2) = sum_{j<n} phi^j(D_affine) - (n deg u) O`.
///
/// Affine places are aggregated over the conjugates (the same place can
/// occur in several `phi^j(D)`), keyed by the irreducible factor of `u` and
/// the value of `v` there, and the order of `h` is verified at one point of
/// each place in its residue field. The pole order at infinity is read off
/// the degrees of `h1`, `h2`; matching it against the total affine degree
/// pins every order exactly (zeros and poles have equal total degree).
pub fn check_princdiv(params: &CurveParams, d: &MumfordDivisor, h: &CurveFunction) {
    let ext = &params.ext;
    let n = params.n;
    let r = d.u.deg().unwrap_or(0);
    if d.is_identity() {
        assert!(h.h2.is_zero() && h.h1.deg() == Some(0), "identity must give a constant");
        return;
    }
    let total = n * r;
    // Pole order at infinity: ord_O(x) = -2, ord_O(y) = -(2g + 1); the two
    // parts have opposite parity so the max is exact.
    let pole = {
        let p1 = h.h1.deg().map(|dg| 2 * dg);
        let p2 = h.h2.deg().map(|dg| 2 * dg + 2 * params.genus + 1);
        match (p1, p2) {
            (Some(a), Some(b)) => a.max(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => panic!("zero function"),
        }
    };
    assert_eq!(pole, total, "pole order at infinity must equal n deg u");

    // Aggregate the affine places of sum_j phi^j(D).
    let mut places: Vec<(Poly, Poly, usize)> = Vec::new();
    for j in 0..n {
        let uj = poly::frobenius_map(ext, &d.u, j);
        let vj = poly::frobenius_map(ext, &d.v, j);
        for (g, e) in poly::factor(ext, &uj) {
            let b = poly::rem(ext, &vj, &g).expect("nonzero modulus");
            match places.iter_mut().find(|(pg, pb, _)| *pg == g && *pb == b) {
                Some((_, _, m)) => *m += e,
                None => places.push((g, b, e)),
            }
        }
    }
    let degree_sum: usize =
        places.iter().map(|(g, _, m)| g.deg().unwrap_or(0) * m).sum();
    assert_eq!(degree_sum, total, "affine places must account for n deg u");

    let h1e = poly::embed(ext, &h.h1);
    let h2e = poly::embed(ext, &h.h2);
    for (g, b, m) in places {
        let cap = m + 1;
        let ord = if g.deg() == Some(1) {
            // The place is rational over the extension field.
            let a = ext.neg(&g.coeff(ext, 0));
            let bv = b.coeff(ext, 0);
            point_order(ext, &params.f_ext, &a, &bv, &h1e, &h2e, cap)
        } else {
            // Pass to the residue field L = ext[x]/(g); the root of g is
            // the generator of L and all data embeds coefficientwise.
            let l = ext
                .extension_with_modulus(g.coeffs().to_vec())
                .expect("irreducible factor");
            let a = FieldElem::Ext({
                let mut c = vec![ext.zero(); l.degree()];
                c[1] = ext.one();
                c
            });
            let bv = poly::eval(&l, &poly::embed(&l, &b), &a);
            let f_l = poly::embed(&l, &params.f_ext);
            let h1l = poly::embed(&l, &h1e);
            let h2l = poly::embed(&l, &h2e);
            point_order(&l, &f_l, &a, &bv, &h1l, &h2l, cap)
        };
        assert_eq!(
            ord, m,
            "vanishing order mismatch at a place of multiplicity {m}"
        );
    }
}

/// The monic norm `prod_j phi^j(u)` projected to the base field.
pub fn norm_of_u(params: &CurveParams, u: &Poly) -> Poly {
    let ext = &params.ext;
    let mut acc = Poly::one(ext);
    for j in 0..params.n {
        acc = poly::mul(ext, &acc, &poly::frobenius_map(ext, u, j));
    }
    poly::project(ext, &acc).expect("norm is rational")
}

/// Builds curve parameters over `F_q` with a fixed seed for the extension
/// modulus, from low-to-high integer coefficients of `f`.
pub fn params_from(q: u64, n: usize, f_coeffs: &[i64], seed: u64) -> CurveParams {
    use rand::SeedableRng;
    let base = FieldCtx::prime(num_bigint::BigUint::from(q)).unwrap();
    let f = Poly::from_coeffs(&base, f_coeffs.iter().map(|&c| base.from_i64(c)).collect());
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    CurveParams::new(base, n, f, &mut rng).unwrap()
}

