//! Univariate polynomials over a [`FieldCtx`], with complete factorization.
//!
//! A [`Poly`] is a trailing-zero-free coefficient vector, low power first;
//! the zero polynomial is the empty vector. Polynomials do not carry their
//! field context — every operation takes it explicitly, which keeps values
//! small and lets the same machinery run over prime fields, extensions and
//! quotient work fields alike.
//!
//! Factoring is the classical chain: squarefree factorization (with the
//! characteristic-p branch extracting p-th roots), distinct-degree
//! factorization by `x^{Q^d} - x` gcds, then Cantor–Zassenhaus equal-degree
//! splitting. Output is canonically sorted so factor lists are deterministic
//! regardless of the randomness used for splitting.

use std::cmp::Ordering;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::fields::{elem_cmp, FieldCtx, FieldElem};

/// A univariate polynomial; `coeffs[i]` is the coefficient of `x^i` and the
/// last entry is nonzero (empty = zero polynomial).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<FieldElem>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    /// Builds a polynomial from coefficients (low power first), trimming
    /// trailing zeros.
    pub fn from_coeffs(ctx: &FieldCtx, mut coeffs: Vec<FieldElem>) -> Poly {
        while let Some(last) = coeffs.last() {
            if ctx.is_zero(last) {
                coeffs.pop();
            } else {
                break;
            }
        }
        Poly { coeffs }
    }

    pub fn constant(ctx: &FieldCtx, c: FieldElem) -> Poly {
        Poly::from_coeffs(ctx, vec![c])
    }

    pub fn one(ctx: &FieldCtx) -> Poly {
        Poly { coeffs: vec![ctx.one()] }
    }

    /// The monomial `x`.
    pub fn x(ctx: &FieldCtx) -> Poly {
        Poly { coeffs: vec![ctx.zero(), ctx.one()] }
    }

    /// `c * x^k`.
    pub fn monomial(ctx: &FieldCtx, c: FieldElem, k: usize) -> Poly {
        if ctx.is_zero(&c) {
            return Poly::zero();
        }
        let mut coeffs = vec![ctx.zero(); k];
        coeffs.push(c);
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    /// Coefficient of `x^i`, zero beyond the degree.
    pub fn coeff(&self, ctx: &FieldCtx, i: usize) -> FieldElem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| ctx.zero())
    }

    /// `None` for the zero polynomial.
    pub fn deg(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&FieldElem> {
        self.coeffs.last()
    }

    pub fn is_monic(&self, ctx: &FieldCtx) -> bool {
        self.leading().map(|c| ctx.is_one(c)).unwrap_or(false)
    }

    pub fn is_one(&self, ctx: &FieldCtx) -> bool {
        self.coeffs.len() == 1 && ctx.is_one(&self.coeffs[0])
    }
}

/// Total order used for canonical factor lists: by degree, then by
/// coefficients from the highest power down.
pub fn poly_cmp(a: &Poly, b: &Poly) -> Ordering {
    match a.coeffs.len().cmp(&b.coeffs.len()) {
        Ordering::Equal => {}
        o => return o,
    }
    for (x, y) in a.coeffs.iter().rev().zip(b.coeffs.iter().rev()) {
        let c = elem_cmp(x, y);
        if c != Ordering::Equal {
            return c;
        }
    }
    Ordering::Equal
}

pub fn add(ctx: &FieldCtx, a: &Poly, b: &Poly) -> Poly {
    let len = a.coeffs.len().max(b.coeffs.len());
    let mut out = Vec::with_capacity(len);
    for i in 0..len {
        out.push(ctx.add(&a.coeff(ctx, i), &b.coeff(ctx, i)));
    }
    Poly::from_coeffs(ctx, out)
}

pub fn sub(ctx: &FieldCtx, a: &Poly, b: &Poly) -> Poly {
    let len = a.coeffs.len().max(b.coeffs.len());
    let mut out = Vec::with_capacity(len);
    for i in 0..len {
        out.push(ctx.sub(&a.coeff(ctx, i), &b.coeff(ctx, i)));
    }
    Poly::from_coeffs(ctx, out)
}

pub fn neg(ctx: &FieldCtx, a: &Poly) -> Poly {
    Poly { coeffs: a.coeffs.iter().map(|c| ctx.neg(c)).collect() }
}

pub fn scale(ctx: &FieldCtx, a: &Poly, c: &FieldElem) -> Poly {
    if ctx.is_zero(c) {
        return Poly::zero();
    }
    Poly { coeffs: a.coeffs.iter().map(|x| ctx.mul(x, c)).collect() }
}

/// Degree cutoff below which multiplication stays schoolbook. Overridable
/// through the `TRACEZERO_KARATSUBA_THRESHOLD` environment variable (read
/// once per process).
fn karatsuba_threshold() -> usize {
    static T: OnceLock<usize> = OnceLock::new();
    *T.get_or_init(|| {
        std::env::var("TRACEZERO_KARATSUBA_THRESHOLD")
            .ok()
            .and_then(|s| s.parse().ok())
            .filter(|&t| t >= 2)
            .unwrap_or(32)
    })
}

pub fn mul(ctx: &FieldCtx, a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() || b.is_zero() {
        return Poly::zero();
    }
    let out = mul_slices(ctx, &a.coeffs, &b.coeffs);
    Poly::from_coeffs(ctx, out)
}

fn mul_slices(ctx: &FieldCtx, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    if a.len().min(b.len()) < karatsuba_threshold() {
        mul_schoolbook(ctx, a, b)
    } else {
        mul_karatsuba(ctx, a, b)
    }
}

fn mul_schoolbook(ctx: &FieldCtx, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    let mut out = vec![ctx.zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ctx.is_zero(ai) {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if !ctx.is_zero(bj) {
                out[i + j] = ctx.add(&out[i + j], &ctx.mul(ai, bj));
            }
        }
    }
    out
}

/// Three half-size products instead of four: with `a = a0 + x^m a1`,
/// `b = b0 + x^m b1`, the cross term is `(a0+a1)(b0+b1) - a0 b0 - a1 b1`.
fn mul_karatsuba(ctx: &FieldCtx, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    let m = a.len().max(b.len()).div_ceil(2);
    let (a0, a1) = a.split_at(m.min(a.len()));
    let (b0, b1) = b.split_at(m.min(b.len()));
    let z0 = mul_slices(ctx, a0, b0);
    let z2 = if a1.is_empty() || b1.is_empty() {
        Vec::new()
    } else {
        mul_slices(ctx, a1, b1)
    };
    let sa = slice_add(ctx, a0, a1);
    let sb = slice_add(ctx, b0, b1);
    let mut z1 = mul_slices(ctx, &sa, &sb);
    for (i, c) in z0.iter().enumerate() {
        z1[i] = ctx.sub(&z1[i], c);
    }
    for (i, c) in z2.iter().enumerate() {
        z1[i] = ctx.sub(&z1[i], c);
    }
    let mut out = vec![ctx.zero(); a.len() + b.len() - 1];
    for (i, c) in z0.into_iter().enumerate() {
        out[i] = c;
    }
    for (i, c) in z1.into_iter().enumerate() {
        if i + m < out.len() {
            out[i + m] = ctx.add(&out[i + m], &c);
        } else {
            debug_assert!(ctx.is_zero(&c));
        }
    }
    for (i, c) in z2.into_iter().enumerate() {
        out[i + 2 * m] = ctx.add(&out[i + 2 * m], &c);
    }
    out
}

fn slice_add(ctx: &FieldCtx, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    let len = a.len().max(b.len());
    (0..len)
        .map(|i| {
            let x = a.get(i);
            let y = b.get(i);
            match (x, y) {
                (Some(x), Some(y)) => ctx.add(x, y),
                (Some(x), None) => x.clone(),
                (None, Some(y)) => y.clone(),
                (None, None) => unreachable!(),
            }
        })
        .collect()
}

/// Euclidean division: `a = q b + r` with `deg r < deg b`.
pub fn divrem(ctx: &FieldCtx, a: &Poly, b: &Poly) -> Result<(Poly, Poly)> {
    let Some(db) = b.deg() else {
        return Err(Error::DivisionByZero);
    };
    let binv = ctx.inv(b.leading().unwrap())?;
    let mut rem = a.coeffs.clone();
    let mut quot = vec![ctx.zero(); rem.len().saturating_sub(db)];
    loop {
        while let Some(last) = rem.last() {
            if ctx.is_zero(last) {
                rem.pop();
            } else {
                break;
            }
        }
        if rem.len() <= db {
            break;
        }
        let da = rem.len() - 1;
        let c = ctx.mul(&rem[da], &binv);
        let shift = da - db;
        for (i, bi) in b.coeffs.iter().enumerate() {
            if !ctx.is_zero(bi) {
                let t = ctx.mul(&c, bi);
                rem[i + shift] = ctx.sub(&rem[i + shift], &t);
            }
        }
        quot[shift] = c;
    }
    Ok((Poly::from_coeffs(ctx, quot), Poly::from_coeffs(ctx, rem)))
}

pub fn rem(ctx: &FieldCtx, a: &Poly, b: &Poly) -> Result<Poly> {
    Ok(divrem(ctx, a, b)?.1)
}

/// Division known to be exact; errors with [`Error::InexactDivision`] if a
/// remainder appears.
pub fn div_exact(ctx: &FieldCtx, a: &Poly, b: &Poly) -> Result<Poly> {
    let (q, r) = divrem(ctx, a, b)?;
    if r.is_zero() {
        Ok(q)
    } else {
        Err(Error::InexactDivision)
    }
}

/// Scales to leading coefficient 1 (zero stays zero).
pub fn monic(ctx: &FieldCtx, a: &Poly) -> Poly {
    match a.leading() {
        None => Poly::zero(),
        Some(l) if ctx.is_one(l) => a.clone(),
        Some(l) => scale(ctx, a, &ctx.inv(l).expect("leading coefficient nonzero")),
    }
}

/// `a^e` for a machine-sized exponent.
pub fn pow(ctx: &FieldCtx, a: &Poly, e: usize) -> Poly {
    if e == 0 {
        return Poly::one(ctx);
    }
    let mut acc = Poly::one(ctx);
    for i in (0..usize::BITS - e.leading_zeros()).rev() {
        acc = mul(ctx, &acc, &acc);
        if (e >> i) & 1 == 1 {
            acc = mul(ctx, &acc, a);
        }
    }
    acc
}

pub fn mulmod(ctx: &FieldCtx, a: &Poly, b: &Poly, m: &Poly) -> Poly {
    rem(ctx, &mul(ctx, a, b), m).expect("nonzero modulus")
}

pub fn powmod(ctx: &FieldCtx, a: &Poly, e: &BigUint, m: &Poly) -> Poly {
    let mut acc = rem(ctx, &Poly::one(ctx), m).expect("nonzero modulus");
    if e.is_zero() {
        return acc;
    }
    let a = rem(ctx, a, m).expect("nonzero modulus");
    for i in (0..e.bits()).rev() {
        acc = mulmod(ctx, &acc, &acc, m);
        if e.bit(i) {
            acc = mulmod(ctx, &acc, &a, m);
        }
    }
    acc
}

/// Monic greatest common divisor.
pub fn gcd(ctx: &FieldCtx, a: &Poly, b: &Poly) -> Poly {
    let mut x = a.clone();
    let mut y = b.clone();
    while !y.is_zero() {
        let r = rem(ctx, &x, &y).expect("nonzero");
        x = std::mem::replace(&mut y, r);
    }
    monic(ctx, &x)
}

/// Extended gcd: `(g, s, t)` with `s a + t b = g` and `g` monic.
pub fn xgcd(ctx: &FieldCtx, a: &Poly, b: &Poly) -> (Poly, Poly, Poly) {
    let mut r0 = a.clone();
    let mut r1 = b.clone();
    let mut s0 = Poly::one(ctx);
    let mut s1 = Poly::zero();
    let mut t0 = Poly::zero();
    let mut t1 = Poly::one(ctx);
    while !r1.is_zero() {
        let (q, r) = divrem(ctx, &r0, &r1).expect("nonzero");
        r0 = std::mem::replace(&mut r1, r);
        let s = sub(ctx, &s0, &mul(ctx, &q, &s1));
        s0 = std::mem::replace(&mut s1, s);
        let t = sub(ctx, &t0, &mul(ctx, &q, &t1));
        t0 = std::mem::replace(&mut t1, t);
    }
    if let Some(l) = r0.leading() {
        if !ctx.is_one(l) {
            let inv = ctx.inv(l).expect("nonzero");
            return (
                scale(ctx, &r0, &inv),
                scale(ctx, &s0, &inv),
                scale(ctx, &t0, &inv),
            );
        }
    }
    (r0, s0, t0)
}

/// Inverse of `a` modulo `m`; errors with [`Error::NotInvertible`] (carrying
/// the gcd degree) when `gcd(a, m) != 1`.
pub fn inv_mod(ctx: &FieldCtx, a: &Poly, m: &Poly) -> Result<Poly> {
    let (g, s, _) = xgcd(ctx, a, m);
    if g.deg() != Some(0) {
        return Err(Error::NotInvertible(g.deg().unwrap_or(0)));
    }
    rem(ctx, &s, m)
}

/// Formal derivative (with exponents reduced modulo the characteristic).
pub fn derivative(ctx: &FieldCtx, a: &Poly) -> Poly {
    if a.coeffs.len() <= 1 {
        return Poly::zero();
    }
    let out = a.coeffs[1..]
        .iter()
        .enumerate()
        .map(|(i, c)| ctx.mul(c, &ctx.from_biguint(BigUint::from(i as u64 + 1))))
        .collect();
    Poly::from_coeffs(ctx, out)
}

/// Horner evaluation.
pub fn eval(ctx: &FieldCtx, a: &Poly, x: &FieldElem) -> FieldElem {
    let mut acc = ctx.zero();
    for c in a.coeffs.iter().rev() {
        acc = ctx.add(&ctx.mul(&acc, x), c);
    }
    acc
}

/// Taylor shift: the polynomial `a(x + c)`.
pub fn shift(ctx: &FieldCtx, a: &Poly, c: &FieldElem) -> Poly {
    // Horner on a(x) with x replaced by (x + c).
    let xc = Poly::from_coeffs(ctx, vec![c.clone(), ctx.one()]);
    let mut acc = Poly::zero();
    for coeff in a.coeffs.iter().rev() {
        acc = add(ctx, &mul(ctx, &acc, &xc), &Poly::constant(ctx, coeff.clone()));
    }
    acc
}

/// Lifts a base-field polynomial into the extension coefficientwise.
pub fn embed(ext: &FieldCtx, a: &Poly) -> Poly {
    Poly { coeffs: a.coeffs.iter().map(|c| ext.embed(c)).collect() }
}

/// Projects an extension polynomial to the base field, if every coefficient
/// is rational over it.
pub fn project(ext: &FieldCtx, a: &Poly) -> Option<Poly> {
    let mut out = Vec::with_capacity(a.coeffs.len());
    for c in &a.coeffs {
        out.push(ext.project(c)?);
    }
    Some(Poly { coeffs: out })
}

/// Applies the base-field Frobenius `x -> x^{q^j}` to every coefficient.
pub fn frobenius_map(ext: &FieldCtx, a: &Poly, j: usize) -> Poly {
    Poly { coeffs: a.coeffs.iter().map(|c| ext.frobenius(c, j)).collect() }
}

/// The norm of `a` from `F_{q^n}[x]` down to `F_q[x]`: the product of all
/// Frobenius conjugates. Errors with [`Error::NormNotRational`] if the
/// product fails to have base-field coefficients (which cannot happen for a
/// well-formed input but guards against misuse).
pub fn norm(ext: &FieldCtx, a: &Poly) -> Result<Poly> {
    let n = ext.degree();
    let mut acc = a.clone();
    for j in 1..n {
        acc = mul(ext, &acc, &frobenius_map(ext, a, j));
    }
    project(ext, &acc).ok_or(Error::NormNotRational)
}

/// Chinese remainder theorem for pairwise coprime moduli: the unique
/// polynomial of degree below the modulus product matching every residue.
pub fn crt(ctx: &FieldCtx, parts: &[(Poly, Poly)]) -> Result<Poly> {
    let mut r = Poly::zero();
    let mut m = Poly::one(ctx);
    for (ri, mi) in parts {
        // x = r (mod m), x = ri (mod mi): x = r + m * ((ri - r) / m mod mi).
        let (g, s, _) = xgcd(ctx, &m, mi);
        if !g.is_one(ctx) {
            return Err(Error::NoSolution("CRT moduli are not coprime".into()));
        }
        let diff = sub(ctx, ri, &r);
        let k = rem(ctx, &mul(ctx, &s, &diff), mi)?;
        r = add(ctx, &r, &mul(ctx, &m, &k));
        m = mul(ctx, &m, mi);
    }
    rem(ctx, &r, &m)
}

/// Squarefree test: `gcd(f, f') = 1` (a vanishing derivative means `f` is a
/// p-th power, which the gcd also catches).
pub fn is_squarefree(ctx: &FieldCtx, f: &Poly) -> bool {
    match f.deg() {
        None => false,
        Some(0) => true,
        Some(_) => gcd(ctx, f, &derivative(ctx, f)).deg() == Some(0),
    }
}

/// Irreducibility over the coefficient field: degree-`k` monic `f` is
/// irreducible iff `x^{Q^k} = x (mod f)` and `gcd(x^{Q^{k/p}} - x, f) = 1`
/// for every prime `p | k`.
pub fn is_irreducible(ctx: &FieldCtx, f: &Poly) -> bool {
    let Some(k) = f.deg() else { return false };
    if k == 0 {
        return false;
    }
    if k == 1 {
        return true;
    }
    let q = ctx.order();
    let x = Poly::x(ctx);
    let mut images = Vec::with_capacity(k + 1);
    images.push(rem(ctx, &x, f).expect("nonzero"));
    for _ in 0..k {
        images.push(powmod(ctx, images.last().unwrap(), &q, f));
    }
    if images[k] != images[0] {
        return false;
    }
    let mut rest = k;
    let mut p = 2;
    let mut primes = Vec::new();
    while p * p <= rest {
        if rest % p == 0 {
            primes.push(p);
            while rest % p == 0 {
                rest /= p;
            }
        }
        p += 1;
    }
    if rest > 1 {
        primes.push(rest);
    }
    for p in primes {
        let g = gcd(ctx, &sub(ctx, &images[k / p], &x), f);
        if g.deg() != Some(0) {
            return false;
        }
    }
    true
}

/// Whether a polynomial irreducible over `F_q` of degree `d` remains
/// irreducible over `F_{q^n}` for prime `n`: it splits into `gcd(d, n)`
/// factors, so it stays irreducible exactly when `n` does not divide `d`.
pub fn stays_irreducible_in_ext(d: usize, n: usize) -> bool {
    d % n != 0
}

// ----------------------------------------------------------------------
// Factorization
// ----------------------------------------------------------------------

/// Complete factorization into monic irreducibles with multiplicities,
/// canonically sorted; the leading coefficient is discarded. Deterministic
/// (fixed internal seed for the equal-degree splitting).
pub fn factor(ctx: &FieldCtx, f: &Poly) -> Vec<(Poly, usize)> {
    let mut rng = ChaCha12Rng::seed_from_u64(0x706f6c79);
    factor_with_rng(ctx, f, &mut rng)
}

/// Factorization with caller-supplied randomness for the splitting steps.
/// The output is sorted, hence identical for every randomness source.
pub fn factor_with_rng(
    ctx: &FieldCtx,
    f: &Poly,
    rng: &mut dyn RngCore,
) -> Vec<(Poly, usize)> {
    let f = monic(ctx, f);
    let Some(d) = f.deg() else {
        panic!("cannot factor the zero polynomial");
    };
    if d == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (part, mult) in squarefree_parts(ctx, &f) {
        for (prod, deg_each) in distinct_degree_parts(ctx, &part) {
            let mut irreducibles = Vec::new();
            equal_degree_split(ctx, &prod, deg_each, rng, &mut irreducibles);
            for u in irreducibles {
                out.push((u, mult));
            }
        }
    }
    out.sort_by(|(a, _), (b, _)| poly_cmp(a, b));
    out
}

/// Yun-style squarefree decomposition, monic input. Returns pairwise coprime
/// squarefree parts with their multiplicities. A vanishing derivative means
/// the polynomial is a p-th power `g(x)^p`; recurse on `g` (coefficient
/// p-th roots are `c^{Q/p}`).
fn squarefree_parts(ctx: &FieldCtx, f: &Poly) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    if f.deg() == Some(0) {
        return out;
    }
    let fp = derivative(ctx, f);
    if fp.is_zero() {
        let g = pth_root(ctx, f);
        let p: usize = char_as_usize(ctx);
        for (h, e) in squarefree_parts(ctx, &g) {
            out.push((h, e * p));
        }
        return out;
    }
    let mut c = gcd(ctx, f, &fp);
    let mut w = div_exact(ctx, f, &c).expect("gcd divides");
    let mut i = 1usize;
    while w.deg() != Some(0) {
        let y = gcd(ctx, &w, &c);
        let z = div_exact(ctx, &w, &y).expect("gcd divides");
        if z.deg() != Some(0) {
            out.push((z, i));
        }
        w = y;
        c = div_exact(ctx, &c, &w).expect("gcd divides");
        i += 1;
    }
    if c.deg() != Some(0) {
        let g = pth_root(ctx, &c);
        let p: usize = char_as_usize(ctx);
        for (h, e) in squarefree_parts(ctx, &g) {
            out.push((h, e * p));
        }
    }
    out
}

fn char_as_usize(ctx: &FieldCtx) -> usize {
    let p = ctx.characteristic();
    let digits = p.to_u64_digits();
    assert!(
        digits.len() == 1 && digits[0] <= usize::MAX as u64,
        "p-th power multiplicities only arise for small characteristics"
    );
    digits[0] as usize
}

/// The p-th root of a polynomial whose exponents are all multiples of p:
/// maps `c x^{pi}` to `c^{Q/p} x^i`.
fn pth_root(ctx: &FieldCtx, f: &Poly) -> Poly {
    let p = char_as_usize(ctx);
    let root_exp = ctx.order() / ctx.characteristic();
    let mut out = Vec::new();
    for (i, c) in f.coeffs.iter().enumerate() {
        if i % p == 0 {
            out.push(ctx.pow(c, &root_exp));
        } else {
            debug_assert!(ctx.is_zero(c), "input was not a p-th power");
        }
    }
    Poly::from_coeffs(ctx, out)
}

/// Distinct-degree factorization of a monic squarefree polynomial: returns
/// `(product of all irreducible factors of degree d, d)` pairs.
fn distinct_degree_parts(ctx: &FieldCtx, f: &Poly) -> Vec<(Poly, usize)> {
    let q = ctx.order();
    let x = Poly::x(ctx);
    let mut out = Vec::new();
    let mut v = f.clone();
    let mut h = rem(ctx, &x, f).expect("nonzero");
    let mut d = 0usize;
    while v.deg().map(|dv| dv >= 2 * (d + 1)).unwrap_or(false) {
        d += 1;
        h = powmod(ctx, &h, &q, &v);
        let g = gcd(ctx, &sub(ctx, &h, &x), &v);
        if g.deg() != Some(0) {
            out.push((g.clone(), d));
            v = div_exact(ctx, &v, &g).expect("gcd divides");
            h = rem(ctx, &h, &v).expect("nonzero");
        }
    }
    if v.deg().map(|dv| dv > 0).unwrap_or(false) {
        let dv = v.deg().unwrap();
        out.push((v, dv));
    }
    out
}

/// Cantor–Zassenhaus equal-degree splitting (odd field order): random
/// `a^{(Q^d - 1)/2} - 1` gcds split a product of degree-`d` irreducibles
/// with probability about one half per trial.
fn equal_degree_split(
    ctx: &FieldCtx,
    f: &Poly,
    d: usize,
    rng: &mut dyn RngCore,
    out: &mut Vec<Poly>,
) {
    let df = f.deg().expect("nonzero");
    if df == d {
        out.push(monic(ctx, f));
        return;
    }
    let exp = (ctx.order().pow(d as u32) - BigUint::one()) >> 1;
    for _ in 0..4096 {
        let a = Poly::from_coeffs(
            ctx,
            (0..df).map(|_| ctx.rand_elem(rng)).collect(),
        );
        if a.is_zero() {
            continue;
        }
        let g = gcd(ctx, &a, f);
        let g = if g.deg().map(|dg| dg > 0 && dg < df).unwrap_or(false) {
            g
        } else {
            let b = powmod(ctx, &a, &exp, f);
            let g = gcd(ctx, &sub(ctx, &b, &Poly::one(ctx)), f);
            match g.deg() {
                Some(dg) if dg > 0 && dg < df => g,
                _ => continue,
            }
        };
        let h = div_exact(ctx, f, &g).expect("gcd divides");
        equal_degree_split(ctx, &g, d, rng, out);
        equal_degree_split(ctx, &h, d, rng, out);
        return;
    }
    unreachable!("equal-degree splitting failed 4096 times; input invariant violated");
}

/// One root of `f` in the coefficient field — the canonically smallest —
/// found without a full factorization: the distinct linear part is split
/// off as `gcd(x^Q - x, f)` and then broken down by random translates of
/// the square-detecting power map. Deterministic (fixed internal seed).
pub fn find_root(ctx: &FieldCtx, f: &Poly) -> Result<FieldElem> {
    let mut rng = ChaCha12Rng::seed_from_u64(0x726f6f74);
    find_root_with_rng(ctx, f, &mut rng)
}

/// Root finding with caller-supplied randomness for the splitting steps;
/// the canonical-least choice makes the output source-independent.
pub fn find_root_with_rng(
    ctx: &FieldCtx,
    f: &Poly,
    rng: &mut dyn RngCore,
) -> Result<FieldElem> {
    if f.deg().unwrap_or(0) == 0 {
        return Err(Error::NoRoot);
    }
    let x = Poly::x(ctx);
    let xq = powmod(ctx, &x, &ctx.order(), f);
    let lin = gcd(ctx, &sub(ctx, &xq, &x), f);
    if lin.deg() == Some(0) {
        return Err(Error::NoRoot);
    }
    let mut found: Vec<FieldElem> = Vec::new();
    split_into_roots(ctx, &lin, rng, &mut found);
    found.sort_by(elem_cmp);
    Ok(found.swap_remove(0))
}

/// Splits a monic product of distinct linear factors into its roots by
/// gcds with `(x + delta)^{(Q-1)/2} - 1` for random `delta` (odd `Q`).
fn split_into_roots(ctx: &FieldCtx, f: &Poly, rng: &mut dyn RngCore, out: &mut Vec<FieldElem>) {
    if f.deg() == Some(1) {
        out.push(ctx.neg(&f.coeffs[0]));
        return;
    }
    let half = (ctx.order() - 1u32) >> 1;
    for _ in 0..4096 {
        let delta = ctx.rand_elem(rng);
        let base = Poly::from_coeffs(ctx, vec![delta, ctx.one()]);
        let w = powmod(ctx, &base, &half, f);
        let g = gcd(ctx, &sub(ctx, &w, &Poly::one(ctx)), f);
        match g.deg() {
            Some(dg) if dg > 0 && dg < f.deg().unwrap() => {
                let h = div_exact(ctx, f, &g).expect("gcd divides");
                split_into_roots(ctx, &g, rng, out);
                split_into_roots(ctx, &h, rng, out);
                return;
            }
            _ => continue,
        }
    }
    unreachable!("root splitting failed 4096 times; input invariant violated");
}

/// Roots in the coefficient field with multiplicities, canonically sorted.
pub fn roots(ctx: &FieldCtx, f: &Poly) -> Vec<(FieldElem, usize)> {
    let mut out: Vec<(FieldElem, usize)> = factor(ctx, f)
        .into_iter()
        .filter(|(u, _)| u.deg() == Some(1))
        .map(|(u, e)| (ctx.neg(&u.coeffs[0]), e))
        .collect();
    out.sort_by(|(a, _), (b, _)| elem_cmp(a, b));
    out
}

// ----------------------------------------------------------------------
// Quotient work fields
// ----------------------------------------------------------------------

/// The field `ctx[x] / (u)` for monic irreducible `u` of degree at least 2.
pub fn quotient_field(ctx: &FieldCtx, u: &Poly) -> Result<FieldCtx> {
    let Some(d) = u.deg() else {
        return Err(Error::DivisionByZero);
    };
    if d < 2 {
        return Err(Error::InvalidDegree(d));
    }
    ctx.extension_with_modulus(u.coeffs.clone())
}

/// Maps a polynomial to its residue class in the quotient field built from
/// a degree-`d` modulus over `ctx`.
pub fn to_quotient(ctx: &FieldCtx, quot: &FieldCtx, a: &Poly) -> FieldElem {
    let d = quot.degree();
    let m = Poly::from_coeffs(ctx, quot.modulus().expect("quotient is an extension").to_vec());
    let r = rem(ctx, a, &m).expect("nonzero modulus");
    let mut coeffs = r.coeffs;
    coeffs.resize(d, ctx.zero());
    FieldElem::Ext(coeffs)
}

/// Interprets a quotient-field element as a polynomial over `ctx` of degree
/// below the modulus degree.
pub fn from_quotient(ctx: &FieldCtx, e: &FieldElem) -> Poly {
    match e {
        FieldElem::Ext(coeffs) => Poly::from_coeffs(ctx, coeffs.clone()),
        FieldElem::Prime(_) => panic!("quotient element must be an extension element"),
    }
}

/// Newton lift of a square root: given `r^2 = target (mod m)` with
/// `gcd(r, m) = 1` (and odd characteristic), produces the unique lift of `r`
/// with `v^2 = target (mod m^e)` via `v <- v - (v^2 - target) / (2v)`.
pub fn hensel_sqrt(
    ctx: &FieldCtx,
    target: &Poly,
    r: &Poly,
    m: &Poly,
    e: usize,
) -> Result<Poly> {
    let mut k = 1usize;
    let mut v = rem(ctx, r, m)?;
    while k < e {
        k = (2 * k).min(e);
        let mk = pow(ctx, m, k);
        let two_v = scale(ctx, &v, &ctx.from_u64(2));
        let inv = inv_mod(ctx, &two_v, &mk)?;
        let err = sub(ctx, &mulmod(ctx, &v, &v, &mk), &rem(ctx, target, &mk)?);
        v = sub(ctx, &v, &mulmod(ctx, &err, &inv, &mk));
        v = rem(ctx, &v, &mk)?;
    }
    debug_assert!({
        let mk = pow(ctx, m, e);
        sub(ctx, &mulmod(ctx, &v, &v, &mk), &rem(ctx, target, &mk).unwrap()).is_zero()
    });
    Ok(v)
}

/// A square root of `a` modulo the monic irreducible `u`, i.e. in the field
/// `ctx[x]/(u)`; `None` when `a` is a non-residue there. The root returned
/// is the canonical (smaller) one.
pub fn modular_sqrt(ctx: &FieldCtx, a: &Poly, u: &Poly) -> Result<Option<Poly>> {
    let Some(d) = u.deg() else {
        return Err(Error::DivisionByZero);
    };
    if d == 0 {
        return Err(Error::InvalidDegree(0));
    }
    if d == 1 {
        let root = ctx.neg(&u.coeffs[0]);
        let val = eval(ctx, a, &root);
        return Ok(ctx.sqrt(&val).map(|r| Poly::constant(ctx, r)));
    }
    let quot = quotient_field(ctx, u)?;
    let e = to_quotient(ctx, &quot, a);
    Ok(quot.sqrt(&e).map(|r| from_quotient(ctx, &r)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn f7() -> FieldCtx {
        FieldCtx::prime(BigUint::from(7u32)).unwrap()
    }

    fn poly_u64(ctx: &FieldCtx, cs: &[i64]) -> Poly {
        Poly::from_coeffs(ctx, cs.iter().map(|&c| ctx.from_i64(c)).collect())
    }

    #[test]
    fn ring_axioms_smoke() {
        let f = f7();
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for _ in 0..30 {
            let a = Poly::from_coeffs(&f, (0..6).map(|_| f.rand_elem(&mut rng)).collect());
            let b = Poly::from_coeffs(&f, (0..4).map(|_| f.rand_elem(&mut rng)).collect());
            let c = Poly::from_coeffs(&f, (0..5).map(|_| f.rand_elem(&mut rng)).collect());
            assert_eq!(mul(&f, &a, &b), mul(&f, &b, &a));
            assert_eq!(
                mul(&f, &a, &add(&f, &b, &c)),
                add(&f, &mul(&f, &a, &b), &mul(&f, &a, &c))
            );
            if !b.is_zero() {
                let (q, r) = divrem(&f, &a, &b).unwrap();
                assert_eq!(add(&f, &mul(&f, &q, &b), &r), a);
                assert!(r.deg().unwrap_or(0) < b.deg().unwrap() || r.is_zero());
            }
        }
    }

    #[test]
    fn karatsuba_matches_schoolbook() {
        let f = f7();
        let mut rng = ChaCha12Rng::seed_from_u64(12);
        for (la, lb) in [(40, 40), (64, 33), (33, 80), (100, 37)] {
            let a: Vec<FieldElem> = (0..la).map(|_| f.rand_elem(&mut rng)).collect();
            let b: Vec<FieldElem> = (0..lb).map(|_| f.rand_elem(&mut rng)).collect();
            assert_eq!(mul_karatsuba(&f, &a, &b), mul_schoolbook(&f, &a, &b));
        }
    }

    #[test]
    fn factor_reassembles_and_is_sorted() {
        let f = f7();
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        for _ in 0..25 {
            let d = 1 + (rng.next_u32() % 9) as usize;
            let mut coeffs: Vec<FieldElem> = (0..d).map(|_| f.rand_elem(&mut rng)).collect();
            coeffs.push(f.one());
            let p = Poly::from_coeffs(&f, coeffs);
            let factors = factor(&f, &p);
            let mut prod = Poly::one(&f);
            for (u, e) in &factors {
                assert!(u.is_monic(&f));
                assert!(is_irreducible(&f, u));
                prod = mul(&f, &prod, &pow(&f, u, *e));
            }
            assert_eq!(prod, p);
            for w in factors.windows(2) {
                assert_ne!(poly_cmp(&w[0].0, &w[1].0), Ordering::Greater);
            }
        }
    }

    #[test]
    fn factor_known_shapes_over_f7() {
        let f = f7();
        // -1 is a non-square mod 7, so x^2 + 1 is irreducible.
        let p = poly_u64(&f, &[1, 0, 1]);
        let fs = factor(&f, &p);
        assert_eq!(fs.len(), 1);
        assert_eq!(fs[0], (p.clone(), 1));
        // x^2 - 2 = (x - 3)(x - 4).
        let p = poly_u64(&f, &[-2, 0, 1]);
        let fs = factor(&f, &p);
        assert_eq!(
            fs,
            vec![(poly_u64(&f, &[-4, 1]), 1), (poly_u64(&f, &[-3, 1]), 1)]
        );
        // (x - 1)^3 (x^2 + 1)^2.
        let p = mul(
            &f,
            &pow(&f, &poly_u64(&f, &[-1, 1]), 3),
            &pow(&f, &poly_u64(&f, &[1, 0, 1]), 2),
        );
        let fs = factor(&f, &p);
        assert_eq!(
            fs,
            vec![(poly_u64(&f, &[-1, 1]), 3), (poly_u64(&f, &[1, 0, 1]), 2)]
        );
        // x^7 - 1 = (x - 1)^7 in characteristic 7.
        let p = sub(&f, &pow(&f, &Poly::x(&f), 7), &Poly::one(&f));
        let fs = factor(&f, &p);
        assert_eq!(fs, vec![(poly_u64(&f, &[-1, 1]), 7)]);
    }

    #[test]
    fn factoring_over_extension_fields() {
        let f = f7();
        let mut rng = ChaCha12Rng::seed_from_u64(14);
        let ext = f.extension(3, &mut rng).unwrap();
        // x^3 - mu splits completely over F_{7^3} (it defines the field).
        let mu = ext.embed(f.extension(3, &mut rng).unwrap().kummer_mu().unwrap());
        let p = Poly::from_coeffs(
            &ext,
            vec![ext.neg(&mu), ext.zero(), ext.zero(), ext.one()],
        );
        let fs = factor(&ext, &p);
        assert_eq!(fs.len(), 3);
        assert!(fs.iter().all(|(u, e)| u.deg() == Some(1) && *e == 1));
        // And the roots are Frobenius conjugates of each other.
        let r0 = ext.neg(&fs[0].0.coeffs()[0]);
        let conj: Vec<FieldElem> = (0..3).map(|j| ext.frobenius(&r0, j)).collect();
        for (u, _) in &fs {
            assert!(conj.contains(&ext.neg(&u.coeffs()[0])));
        }
    }

    #[test]
    fn gcd_xgcd_and_inverse() {
        let f = f7();
        let mut rng = ChaCha12Rng::seed_from_u64(15);
        for _ in 0..25 {
            let a = Poly::from_coeffs(&f, (0..5).map(|_| f.rand_elem(&mut rng)).collect());
            let b = Poly::from_coeffs(&f, (0..4).map(|_| f.rand_elem(&mut rng)).collect());
            if a.is_zero() || b.is_zero() {
                continue;
            }
            let (g, s, t) = xgcd(&f, &a, &b);
            assert_eq!(add(&f, &mul(&f, &s, &a), &mul(&f, &t, &b)), g);
            assert_eq!(g, gcd(&f, &a, &b));
            assert!(rem(&f, &a, &g).unwrap().is_zero());
            assert!(rem(&f, &b, &g).unwrap().is_zero());
        }
        // Inverse mod an irreducible.
        let m = poly_u64(&f, &[1, 0, 1]);
        let a = poly_u64(&f, &[3, 5]);
        let ai = inv_mod(&f, &a, &m).unwrap();
        assert!(mulmod(&f, &a, &ai, &m).is_one(&f));
        // Non-coprime input is rejected.
        let a = mul(&f, &m, &poly_u64(&f, &[2]));
        assert!(inv_mod(&f, &a, &m).is_err());
    }

    #[test]
    fn crt_reconstructs() {
        let f = f7();
        let m1 = poly_u64(&f, &[1, 0, 1]); // irreducible
        let m2 = poly_u64(&f, &[-2, 0, 1]); // coprime to m1
        let target = poly_u64(&f, &[4, 3, 2, 1]);
        let r1 = rem(&f, &target, &m1).unwrap();
        let r2 = rem(&f, &target, &m2).unwrap();
        let combined = crt(&f, &[(r1, m1.clone()), (r2, m2.clone())]).unwrap();
        assert_eq!(combined, rem(&f, &target, &mul(&f, &m1, &m2)).unwrap());
        // Non-coprime moduli error out.
        assert!(crt(&f, &[(Poly::zero(), m1.clone()), (Poly::one(&f), m1)]).is_err());
    }

    #[test]
    fn norm_is_rational_and_multiplicative() {
        let f = f7();
        let mut rng = ChaCha12Rng::seed_from_u64(16);
        let ext = f.extension(3, &mut rng).unwrap();
        let a = Poly::from_coeffs(&ext, (0..3).map(|_| ext.rand_elem(&mut rng)).collect());
        let b = Poly::from_coeffs(&ext, (0..2).map(|_| ext.rand_elem(&mut rng)).collect());
        let na = norm(&ext, &a).unwrap();
        let nb = norm(&ext, &b).unwrap();
        let nab = norm(&ext, &mul(&ext, &a, &b)).unwrap();
        assert_eq!(nab, mul(&f, &na, &nb));
        // The norm of a rational polynomial is its n-th power.
        let r = poly_u64(&f, &[2, 1]);
        assert_eq!(norm(&ext, &embed(&ext, &r)).unwrap(), pow(&f, &r, 3));
    }

    #[test]
    fn shift_and_eval_agree() {
        let f = f7();
        let p = poly_u64(&f, &[1, 2, 3, 4]);
        let c = f.from_u64(5);
        let shifted = shift(&f, &p, &c);
        for x in 0..7u64 {
            let xe = f.from_u64(x);
            assert_eq!(eval(&f, &shifted, &xe), eval(&f, &p, &f.add(&xe, &c)));
        }
    }

    #[test]
    fn modular_sqrt_in_quotient_fields() {
        let f = f7();
        let u = poly_u64(&f, &[1, 0, 1]); // irreducible, quotient F_49
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        for _ in 0..20 {
            let a = Poly::from_coeffs(&f, (0..2).map(|_| f.rand_elem(&mut rng)).collect());
            let sq = mulmod(&f, &a, &a, &u);
            let r = modular_sqrt(&f, &sq, &u).unwrap().expect("square");
            assert_eq!(mulmod(&f, &r, &r, &u), sq);
        }
        // Degree-1 modulus: plain field square root. 3 is not a QR mod 7.
        let u1 = poly_u64(&f, &[-2, 1]);
        let a = poly_u64(&f, &[1, 1]); // evaluates to 3 at x = 2
        assert!(modular_sqrt(&f, &a, &u1).unwrap().is_none());
        let b = poly_u64(&f, &[0, 1]); // evaluates to 2, a QR
        let r = modular_sqrt(&f, &b, &u1).unwrap().unwrap();
        assert_eq!(eval(&f, &mul(&f, &r, &r), &f.from_u64(2)), f.from_u64(2));
    }

    #[test]
    fn squarefree_and_irreducibility_checks() {
        let f = f7();
        assert!(is_squarefree(&f, &poly_u64(&f, &[-2, 0, 1])));
        assert!(!is_squarefree(
            &f,
            &pow(&f, &poly_u64(&f, &[1, 1]), 2)
        ));
        // x^7 - 2 has zero derivative (7th power in disguise).
        let p = sub(&f, &pow(&f, &Poly::x(&f), 7), &poly_u64(&f, &[2]));
        assert!(!is_squarefree(&f, &p));
        assert!(is_irreducible(&f, &poly_u64(&f, &[1, 0, 1])));
        assert!(!is_irreducible(&f, &poly_u64(&f, &[-2, 0, 1])));
        assert!(is_irreducible(&f, &poly_u64(&f, &[3, 1])));
        // Degrees: 6 splits over a cubic extension, 5 does not.
        assert!(!stays_irreducible_in_ext(6, 3));
        assert!(stays_irreducible_in_ext(5, 3));
    }
}
