//! Divisor class arithmetic on hyperelliptic Jacobians in Mumford form.
//!
//! A curve is `y^2 = f(x)` with `f` monic, squarefree, of odd degree
//! `2g + 1` over a field of odd characteristic; it has a single point `O` at
//! infinity. A divisor class is represented by its unique reduced Mumford
//! pair `[u, v]`: `u` monic of degree at most `g`, `deg v < deg u`, and
//! `u | v^2 - f`. The class is `sum of (x_i, v(x_i)) - deg(u) * O` over the
//! roots of `u` with multiplicity.
//!
//! [`cantor_add`] returns, along with the reduced sum, the function whose
//! divisor witnesses the reduction: `D_1 + D_2 = D_3 + div(a)` with
//! `a = d(x) prod_i (y - v_i) / prod_i u_i'`. Tracking these functions is
//! what lets the Frobenius-trace function `h_D` be assembled from group
//! operations.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::fields::{FieldCtx, FieldElem};
use crate::funcs::{func_mul, CurveFunction, FunctionQuotient};
use crate::poly::{self, Poly};

/// A curve `y^2 = f(x)` over `F_q` together with the extension `F_{q^n}`
/// the trace zero subgroup lives over.
#[derive(Clone, Debug)]
pub struct CurveParams {
    pub base: FieldCtx,
    pub ext: FieldCtx,
    pub genus: usize,
    pub n: usize,
    /// Curve polynomial over the base field.
    pub f: Poly,
    /// The same polynomial with coefficients lifted into the extension.
    pub f_ext: Poly,
}

impl CurveParams {
    /// Validates the curve equation and builds `F_{q^n}` with the supplied
    /// randomness (used only when no Kummer binomial modulus exists).
    pub fn new(base: FieldCtx, n: usize, f: Poly, rng: &mut dyn RngCore) -> Result<CurveParams> {
        let genus = validate_curve(&base, &f)?;
        if !is_prime_usize(n) {
            return Err(Error::InvalidCurve(format!(
                "extension degree {n} must be prime"
            )));
        }
        let ext = base.extension(n, rng)?;
        let f_ext = poly::embed(&ext, &f);
        Ok(CurveParams { base, ext, genus, n, f, f_ext })
    }

    /// Same, but with a pre-built extension context (so serialized
    /// parameters reproduce the exact field).
    pub fn with_ext(base: FieldCtx, ext: FieldCtx, f: Poly) -> Result<CurveParams> {
        let genus = validate_curve(&base, &f)?;
        let n = ext.degree();
        if !is_prime_usize(n) {
            return Err(Error::InvalidCurve(format!(
                "extension degree {n} must be prime"
            )));
        }
        if ext.base() != Some(&base) {
            return Err(Error::ContextMismatch("extension is not built on the base field"));
        }
        let f_ext = poly::embed(&ext, &f);
        Ok(CurveParams { base, ext, genus, n, f, f_ext })
    }

    /// Sum of the Frobenius conjugates `D + phi(D) + ... + phi^{n-1}(D)`.
    pub fn trace(&self, d: &MumfordDivisor) -> MumfordDivisor {
        let mut acc = d.clone();
        let mut cur = d.clone();
        for _ in 1..self.n {
            cur = frobenius_divisor(&self.ext, &cur, 1);
            acc = add_divisors(&self.ext, &self.f_ext, &acc, &cur);
        }
        acc
    }

    pub fn is_trace_zero(&self, d: &MumfordDivisor) -> bool {
        self.trace(d).is_identity()
    }

    /// Uniform-ish sample of the trace zero subgroup: `phi(D'') - D''` for a
    /// random divisor class `D''` over the extension. Every trace zero
    /// element arises this way (the map has kernel `Pic^0(F_q)`).
    pub fn random_trace_zero(&self, rng: &mut dyn RngCore) -> Result<MumfordDivisor> {
        let dpp = random_divisor(&self.ext, &self.f_ext, rng)?;
        let phid = frobenius_divisor(&self.ext, &dpp, 1);
        let (res, _) = cantor_add(&self.ext, &self.f_ext, &phid, &divisor_neg(&self.ext, &dpp));
        Ok(res)
    }

    /// Exact order of the trace zero subgroup via the zeta function:
    /// `|Pic^0(F_{q^n})| / |Pic^0(F_q)|`.
    pub fn tn_order(&self) -> Result<BigUint> {
        let lp = lpolynomial(&self.base, &self.f)?;
        let over_n = picard_order_from_lpoly(&lp, self.n);
        let over_1 = picard_order_from_lpoly(&lp, 1);
        let (quot, rem) = over_n.div_rem(&over_1);
        if !rem.is_zero() {
            return Err(Error::NoSolution(
                "Picard order over the base field does not divide the extension order".into(),
            ));
        }
        Ok(quot)
    }
}

fn validate_curve(ctx: &FieldCtx, f: &Poly) -> Result<usize> {
    let Some(d) = f.deg() else {
        return Err(Error::InvalidCurve("curve polynomial is zero".into()));
    };
    if d < 3 || d % 2 == 0 {
        return Err(Error::InvalidCurve(format!(
            "curve polynomial degree {d} is not an odd number >= 3"
        )));
    }
    if !f.is_monic(ctx) {
        return Err(Error::InvalidCurve("curve polynomial must be monic".into()));
    }
    if !poly::is_squarefree(ctx, f) {
        return Err(Error::InvalidCurve("curve polynomial must be squarefree".into()));
    }
    Ok((d - 1) / 2)
}

fn is_prime_usize(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            return false;
        }
        p += 1;
    }
    true
}

/// A reduced Mumford pair. Construct through [`MumfordDivisor::new`] (which
/// validates) or the arithmetic in this module (which preserves validity).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MumfordDivisor {
    pub u: Poly,
    pub v: Poly,
}

impl MumfordDivisor {
    /// Validates reducedness: `u` monic with `deg u <= g`, `deg v < deg u`,
    /// and `u | v^2 - f`.
    pub fn new(ctx: &FieldCtx, f: &Poly, u: Poly, v: Poly) -> Result<MumfordDivisor> {
        let g = (f.deg().ok_or_else(|| Error::InvalidCurve("zero curve".into()))? - 1) / 2;
        let Some(du) = u.deg() else {
            return Err(Error::InvalidDivisor("u must be nonzero".into()));
        };
        if !u.is_monic(ctx) {
            return Err(Error::InvalidDivisor("u must be monic".into()));
        }
        if du > g {
            return Err(Error::InvalidDivisor(format!(
                "deg u = {du} exceeds the genus {g}"
            )));
        }
        if !v.is_zero() && v.deg().unwrap() >= du {
            return Err(Error::InvalidDivisor("v must have degree below u".into()));
        }
        let check = poly::sub(ctx, &poly::mul(ctx, &v, &v), f);
        if !poly::rem(ctx, &check, &u)?.is_zero() {
            return Err(Error::InvalidDivisor("u does not divide v^2 - f".into()));
        }
        Ok(MumfordDivisor { u, v })
    }

    /// The neutral class `[1, 0]`.
    pub fn identity(ctx: &FieldCtx) -> MumfordDivisor {
        MumfordDivisor { u: Poly::one(ctx), v: Poly::zero() }
    }

    pub fn is_identity(&self) -> bool {
        self.u.deg() == Some(0)
    }

    /// The class of `(x0, y0) - O` for a point on the curve.
    pub fn from_point(
        ctx: &FieldCtx,
        f: &Poly,
        x0: &FieldElem,
        y0: &FieldElem,
    ) -> Result<MumfordDivisor> {
        let u = Poly::from_coeffs(ctx, vec![ctx.neg(x0), ctx.one()]);
        let v = Poly::constant(ctx, y0.clone());
        MumfordDivisor::new(ctx, f, u, v)
    }
}

/// The hyperelliptic involution `[u, v] -> [u, -v]` (the group inverse).
pub fn divisor_neg(ctx: &FieldCtx, d: &MumfordDivisor) -> MumfordDivisor {
    MumfordDivisor { u: d.u.clone(), v: poly::neg(ctx, &d.v) }
}

/// Coefficientwise `q^j`-power Frobenius; a Galois action, so validity is
/// preserved (the curve has rational coefficients).
pub fn frobenius_divisor(ext: &FieldCtx, d: &MumfordDivisor, j: usize) -> MumfordDivisor {
    MumfordDivisor {
        u: poly::frobenius_map(ext, &d.u, j),
        v: poly::frobenius_map(ext, &d.v, j),
    }
}

/// Gauss composition of semi-reduced ideals: `(u1, y - v1)(u2, y - v2) =
/// d * (u3, y - v3)` with `d = gcd(u1, u2, v1 + v2)`, valid for arbitrary
/// (not necessarily coprime or squarefree) semi-reduced pairs. On divisors:
/// the sum of the two inputs equals `d`'s full fiber divisor plus the
/// semi-reduced divisor `[u3, v3]`.
pub fn compose(
    ctx: &FieldCtx,
    f: &Poly,
    u1: &Poly,
    v1: &Poly,
    u2: &Poly,
    v2: &Poly,
) -> (Poly, Poly, Poly) {
    // d = gcd(u1, u2, v1 + v2) = s1 u1 + s2 u2 + s3 (v1 + v2).
    let (d_part, e1, e2) = poly::xgcd(ctx, u1, u2);
    let vsum = poly::add(ctx, v1, v2);
    let (d, c1, c2) = poly::xgcd(ctx, &d_part, &vsum);
    let s1 = poly::mul(ctx, &c1, &e1);
    let s2 = poly::mul(ctx, &c1, &e2);
    let s3 = c2;
    let dd = poly::mul(ctx, &d, &d);
    let u = poly::div_exact(ctx, &poly::mul(ctx, u1, u2), &dd)
        .expect("gcd^2 divides u1 u2");
    let t1 = poly::mul(ctx, &poly::mul(ctx, &s1, u1), v2);
    let t2 = poly::mul(ctx, &poly::mul(ctx, &s2, u2), v1);
    let t3 = poly::mul(ctx, &s3, &poly::add(ctx, &poly::mul(ctx, v1, v2), f));
    let num = poly::add(ctx, &poly::add(ctx, &t1, &t2), &t3);
    let vnum = poly::div_exact(ctx, &num, &d).expect("gcd divides the v numerator");
    let v = poly::rem(ctx, &vnum, &u).expect("u nonzero");
    debug_assert!(poly::rem(
        ctx,
        &poly::sub(ctx, &poly::mul(ctx, &v, &v), f),
        &u
    )
    .unwrap()
    .is_zero());
    (d, u, v)
}

/// Cantor's algorithm: composition then reduction, returning the reduced
/// sum and the witnessing function `a` with `D_1 + D_2 = D_3 + div(a)`.
///
/// The witness is `d(x) * prod_i (y - v_i) / prod_i u_{i+1}`: the gcd
/// cancelled during composition times one line per reduction step, over the
/// `u`-polynomials divided out. It is accumulated as an unreduced
/// [`FunctionQuotient`]; only `funcs::func_divide_exact` simplifies it,
/// where exactness is guaranteed.
pub fn cantor_add(
    ctx: &FieldCtx,
    f: &Poly,
    a: &MumfordDivisor,
    b: &MumfordDivisor,
) -> (MumfordDivisor, FunctionQuotient) {
    let g = (f.deg().expect("valid curve") - 1) / 2;
    let (d, mut u, mut v) = compose(ctx, f, &a.u, &a.v, &b.u, &b.v);
    // Reduction: replace [u, v] by [(f - v^2)/u monic, -v mod new u] until
    // the degree drops to g; each step divides by div((y - v) / u').
    let mut num = CurveFunction::from_poly(d);
    let mut den = CurveFunction::one(ctx);
    while u.deg().unwrap_or(0) > g {
        let fv2 = poly::sub(ctx, f, &poly::mul(ctx, &v, &v));
        let unext = poly::monic(
            ctx,
            &poly::div_exact(ctx, &fv2, &u).expect("u divides f - v^2"),
        );
        let vnext = poly::rem(ctx, &poly::neg(ctx, &v), &unext).expect("nonzero");
        num = func_mul(ctx, f, &num, &CurveFunction::y_minus(ctx, &v));
        den = func_mul(ctx, f, &den, &CurveFunction::from_poly(unext.clone()));
        u = unext;
        v = vnext;
    }
    (MumfordDivisor { u, v }, FunctionQuotient { num, den })
}

/// Cantor addition discarding the witness function.
pub fn add_divisors(
    ctx: &FieldCtx,
    f: &Poly,
    a: &MumfordDivisor,
    b: &MumfordDivisor,
) -> MumfordDivisor {
    cantor_add(ctx, f, a, b).0
}

/// `k * D` by double-and-add.
pub fn scalar_mul(
    ctx: &FieldCtx,
    f: &Poly,
    d: &MumfordDivisor,
    k: &BigUint,
) -> MumfordDivisor {
    let mut acc = MumfordDivisor::identity(ctx);
    if k.is_zero() {
        return acc;
    }
    for i in (0..k.bits()).rev() {
        acc = add_divisors(ctx, f, &acc, &acc);
        if k.bit(i) {
            acc = add_divisors(ctx, f, &acc, d);
        }
    }
    acc
}

/// Random divisor class: a random monic `u` of degree `g`, with `v` built
/// per irreducible factor (field square root, random sign, Newton lift for
/// repeated factors) and recombined; resamples when no `v` exists.
pub fn random_divisor(ctx: &FieldCtx, f: &Poly, rng: &mut dyn RngCore) -> Result<MumfordDivisor> {
    let g = (f.deg().expect("valid curve") - 1) / 2;
    'resample: for _ in 0..4096 {
        let mut coeffs: Vec<FieldElem> = (0..g).map(|_| ctx.rand_elem(rng)).collect();
        coeffs.push(ctx.one());
        let u = Poly::from_coeffs(ctx, coeffs);
        let factors = poly::factor(ctx, &u);
        let mut parts = Vec::with_capacity(factors.len());
        for (w, e) in &factors {
            let m = poly::pow(ctx, w, *e);
            let fw = poly::rem(ctx, f, w)?;
            if fw.is_zero() {
                // Ramified: v = 0 works only at multiplicity one (f is
                // squarefree, so no lift past the first power exists).
                if *e == 1 {
                    parts.push((Poly::zero(), m));
                    continue;
                }
                continue 'resample;
            }
            let Some(mut r) = poly::modular_sqrt(ctx, f, w)? else {
                continue 'resample;
            };
            if rng.next_u32() & 1 == 1 {
                r = poly::neg(ctx, &r);
            }
            let lifted = if *e > 1 { poly::hensel_sqrt(ctx, f, &r, w, *e)? } else { r };
            parts.push((lifted, m));
        }
        let v = poly::crt(ctx, &parts)?;
        return MumfordDivisor::new(ctx, f, u, v);
    }
    Err(Error::SamplingExhausted)
}

/// Every reduced divisor over a small field, identity included. Guarded to
/// `|F|^g <= 2^24` candidates.
pub fn enumerate_reduced_divisors(ctx: &FieldCtx, f: &Poly) -> Result<Vec<MumfordDivisor>> {
    let g = (f.deg().expect("valid curve") - 1) / 2;
    let q = ctx.order();
    if q.pow(g as u32) > BigUint::from(1u64 << 24) {
        return Err(Error::TooLarge(format!(
            "enumeration over a field of order {q} and genus {g}"
        )));
    }
    let mut out = vec![MumfordDivisor::identity(ctx)];
    for d in 1..=g {
        let total = q.pow(d as u32).to_u64().expect("guarded");
        for idx in 0..total {
            let mut rest = BigUint::from(idx);
            let mut coeffs = Vec::with_capacity(d + 1);
            for _ in 0..d {
                let (quo, r) = rest.div_rem(&q);
                coeffs.push(ctx.elem_from_index(&r));
                rest = quo;
            }
            coeffs.push(ctx.one());
            let u = Poly::from_coeffs(ctx, coeffs);
            let Some(parts) = v_options(ctx, f, &u)? else { continue };
            // Cartesian product of the per-factor sign choices.
            let mut combos: Vec<Vec<(Poly, Poly)>> = vec![Vec::new()];
            for (opts, m) in &parts {
                let mut next = Vec::with_capacity(combos.len() * opts.len());
                for c in &combos {
                    for o in opts {
                        let mut c2 = c.clone();
                        c2.push((o.clone(), m.clone()));
                        next.push(c2);
                    }
                }
                combos = next;
            }
            for combo in combos {
                let v = poly::crt(ctx, &combo)?;
                out.push(MumfordDivisor::new(ctx, f, u.clone(), v)?);
            }
        }
    }
    Ok(out)
}

/// Per-irreducible-factor `v` choices for a given `u`; `None` when some
/// factor admits no `v` at all.
#[allow(clippy::type_complexity)]
fn v_options(
    ctx: &FieldCtx,
    f: &Poly,
    u: &Poly,
) -> Result<Option<Vec<(Vec<Poly>, Poly)>>> {
    let mut parts = Vec::new();
    for (w, e) in poly::factor(ctx, u) {
        let m = poly::pow(ctx, &w, e);
        let fw = poly::rem(ctx, f, &w)?;
        if fw.is_zero() {
            if e == 1 {
                parts.push((vec![Poly::zero()], m));
                continue;
            }
            return Ok(None);
        }
        let Some(r) = poly::modular_sqrt(ctx, f, &w)? else {
            return Ok(None);
        };
        let rn = poly::neg(ctx, &r);
        let opts = if e > 1 {
            vec![
                poly::hensel_sqrt(ctx, f, &r, &w, e)?,
                poly::hensel_sqrt(ctx, f, &rn, &w, e)?,
            ]
        } else {
            vec![r, rn]
        };
        parts.push((opts, m));
    }
    Ok(Some(parts))
}

/// `|Pic^0|` by counting reduced divisors directly (the same walk as
/// [`enumerate_reduced_divisors`] but only tallying the number of `v`
/// choices per `u`). Guarded to `|F|^g <= 2^24`.
pub fn group_order_bruteforce(ctx: &FieldCtx, f: &Poly) -> Result<BigUint> {
    let g = (f.deg().expect("valid curve") - 1) / 2;
    let q = ctx.order();
    if q.pow(g as u32) > BigUint::from(1u64 << 24) {
        return Err(Error::TooLarge(format!(
            "brute-force order over a field of order {q} and genus {g}"
        )));
    }
    let mut count = BigUint::one(); // identity
    for d in 1..=g {
        let total = q.pow(d as u32).to_u64().expect("guarded");
        for idx in 0..total {
            let mut rest = BigUint::from(idx);
            let mut coeffs = Vec::with_capacity(d + 1);
            for _ in 0..d {
                let (quo, r) = rest.div_rem(&q);
                coeffs.push(ctx.elem_from_index(&r));
                rest = quo;
            }
            coeffs.push(ctx.one());
            let u = Poly::from_coeffs(ctx, coeffs);
            let mut options = 1u64;
            for (w, e) in poly::factor(ctx, &u) {
                let fw = poly::rem(ctx, f, &w)?;
                let per = if fw.is_zero() {
                    if e == 1 {
                        1
                    } else {
                        0
                    }
                } else {
                    let chi = if w.deg() == Some(1) {
                        let root = ctx.neg(&w.coeffs()[0]);
                        ctx.legendre(&poly::eval(ctx, f, &root))
                    } else {
                        let quot = poly::quotient_field(ctx, &w)?;
                        quot.legendre(&poly::to_quotient(ctx, &quot, f))
                    };
                    if chi == 1 {
                        2
                    } else {
                        0
                    }
                };
                options *= per;
                if options == 0 {
                    break;
                }
            }
            count += BigUint::from(options);
        }
    }
    Ok(count)
}

// ----------------------------------------------------------------------
// Orders via the zeta function
// ----------------------------------------------------------------------

/// Numerator of the zeta function as the integer coefficient vector
/// `a_0 = 1, a_1, ..., a_{2g}` of `L(T) = prod (1 - alpha_i T)`, computed
/// from point counts over `F_{q^k}` for `k = 1..g` plus the functional
/// equation `a_{2g-i} = q^{g-i} a_i`. Guarded to `q^g <= 2^24` points.
pub fn lpolynomial(base: &FieldCtx, f: &Poly) -> Result<Vec<BigInt>> {
    let g = (f.deg().expect("valid curve") - 1) / 2;
    let q = base.order();
    if q.pow(g as u32) > BigUint::from(1u64 << 24) {
        return Err(Error::TooLarge(format!(
            "point counting over fields up to order {q}^{g}"
        )));
    }
    // Power sums p_k = q^k + 1 - N_k = -(sum over x of chi(f(x))).
    let mut p = Vec::with_capacity(g);
    for k in 1..=g {
        let ctx = if k == 1 {
            base.clone()
        } else {
            let mut rng = ChaCha12Rng::seed_from_u64(0x636f756e74 + k as u64);
            base.extension(k, &mut rng)?
        };
        let fk = if k == 1 { f.clone() } else { poly::embed(&ctx, f) };
        let total = ctx.order().to_u64().expect("guarded");
        let mut chi_sum = BigInt::zero();
        for idx in 0..total {
            let x = ctx.elem_from_index(&BigUint::from(idx));
            let val = poly::eval(&ctx, &fk, &x);
            chi_sum += BigInt::from(ctx.legendre(&val));
        }
        p.push(-chi_sum);
    }
    // Newton's identities: e_k = (sum_{i=1..k} (-1)^{i-1} e_{k-i} p_i) / k.
    let mut e = vec![BigInt::one()];
    for k in 1..=g {
        let mut acc = BigInt::zero();
        for i in 1..=k {
            let term = &e[k - i] * &p[i - 1];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        let (quo, rem) = acc.div_rem(&BigInt::from(k));
        debug_assert!(rem.is_zero());
        e.push(quo);
    }
    // a_i = (-1)^i e_i for i <= g, then the functional equation.
    let qi = BigInt::from(q);
    let mut a = vec![BigInt::zero(); 2 * g + 1];
    for (i, ei) in e.iter().enumerate() {
        a[i] = if i % 2 == 0 { ei.clone() } else { -ei };
    }
    for j in 1..=g {
        a[g + j] = qi.pow(j as u32) * &a[g - j];
    }
    Ok(a)
}

/// `|Pic^0(F_{q^m})| = prod (1 - alpha_i^m)`, evaluated from the
/// L-polynomial through power-sum recurrences (all integer arithmetic).
pub fn picard_order_from_lpoly(a: &[BigInt], m: usize) -> BigUint {
    let twog = a.len() - 1;
    // chi(T) = T^{2g} + a_1 T^{2g-1} + ... + a_{2g} has the alpha_i as roots.
    // Power sums s_k of the alpha_i by Newton's recurrence.
    let kmax = twog * m;
    let mut s = vec![BigInt::zero(); kmax + 1];
    for k in 1..=kmax {
        let mut acc = BigInt::zero();
        let lim = k.min(twog);
        for i in 1..=lim {
            if i < k {
                acc -= &a[i] * &s[k - i];
            }
        }
        if k <= twog {
            acc -= BigInt::from(k as u64) * &a[k];
        }
        s[k] = acc;
    }
    // The alpha_i^m have power sums sigma_j = s_{jm}; Newton back to their
    // elementary symmetric functions and evaluate prod (1 - alpha_i^m).
    let mut big_e = vec![BigInt::one()];
    for j in 1..=twog {
        let mut acc = BigInt::zero();
        for i in 1..=j {
            let term = &big_e[j - i] * &s[i * m];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        let (quo, rem) = acc.div_rem(&BigInt::from(j as u64));
        debug_assert!(rem.is_zero());
        big_e.push(quo);
    }
    let mut order = BigInt::zero();
    for (j, ej) in big_e.iter().enumerate() {
        if j % 2 == 0 {
            order += ej;
        } else {
            order -= ej;
        }
    }
    assert!(order.is_positive(), "Picard group order must be positive");
    order.to_biguint().expect("positive")
}
