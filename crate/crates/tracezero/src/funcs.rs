//! Functions on the curve of the form `h1(x) + y h2(x)` and the algorithms
//! computing the trace function `h_D`.
//!
//! Every function with poles only at infinity is a polynomial in the
//! coordinate ring `F[x, y] / (y^2 - f)`, hence of the shape `h1 + y h2`.
//! For a trace zero divisor class `D`, the divisor `D + phi(D) + ... +
//! phi^{n-1}(D)` is principal and its function `h_D` — unique up to a
//! constant — is the object compressed in the codec. This module computes
//! `h_D` several independent ways:
//!
//! - [`compute_hd_miller`]: a Miller-style double-and-add over the binary
//!   expansion of `n - 1`, multiplying Frobenius-shifted partial functions
//!   and dividing out the Cantor correction exactly at every step.
//! - [`compute_hd_linear`]: direct linear algebra — the vanishing
//!   conditions `h1 + v^{phi^j} h2 = 0 (mod u^{phi^j})` flatten to an
//!   `F_q`-linear system whose kernel is one-dimensional.
//! - [`compute_hp_elliptic`]: for genus 1, the product of chord lines
//!   through partial sums of the conjugates of `P`, divided by verticals;
//!   in iterative, divide-and-conquer, and Miller variants.
//!
//! All entry points return `h_D` normalized (per the parity of `r = deg u`:
//! `r` even makes `h1` monic, `r` odd makes `h2` monic) with coefficients
//! projected down to `F_q`, so different strategies agree exactly.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::fields::{FieldCtx, FieldElem};
use crate::picard::{cantor_add, frobenius_divisor, CurveParams, MumfordDivisor};
use crate::poly::{self, Poly};

/// `h1(x) + y h2(x)` in the coordinate ring of the curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveFunction {
    pub h1: Poly,
    pub h2: Poly,
}

impl CurveFunction {
    pub fn zero() -> CurveFunction {
        CurveFunction { h1: Poly::zero(), h2: Poly::zero() }
    }

    pub fn one(ctx: &FieldCtx) -> CurveFunction {
        CurveFunction { h1: Poly::one(ctx), h2: Poly::zero() }
    }

    /// A function of `x` alone.
    pub fn from_poly(p: Poly) -> CurveFunction {
        CurveFunction { h1: p, h2: Poly::zero() }
    }

    /// The function `y - v(x)`.
    pub fn y_minus(ctx: &FieldCtx, v: &Poly) -> CurveFunction {
        CurveFunction { h1: poly::neg(ctx, v), h2: Poly::one(ctx) }
    }

    pub fn is_zero(&self) -> bool {
        self.h1.is_zero() && self.h2.is_zero()
    }

    /// The hyperelliptic conjugate `h1 - y h2` (composition with the
    /// involution).
    pub fn conjugate(&self, ctx: &FieldCtx) -> CurveFunction {
        CurveFunction { h1: self.h1.clone(), h2: poly::neg(ctx, &self.h2) }
    }

    /// Value at an affine point `(x, y)`.
    pub fn eval(&self, ctx: &FieldCtx, x: &FieldElem, y: &FieldElem) -> FieldElem {
        ctx.add(
            &poly::eval(ctx, &self.h1, x),
            &ctx.mul(y, &poly::eval(ctx, &self.h2, x)),
        )
    }

    /// Applies the `q^j`-power Frobenius to every coefficient.
    pub fn frobenius(&self, ext: &FieldCtx, j: usize) -> CurveFunction {
        CurveFunction {
            h1: poly::frobenius_map(ext, &self.h1, j),
            h2: poly::frobenius_map(ext, &self.h2, j),
        }
    }
}

/// Product in the coordinate ring: `y^2` reduces to `f`.
pub fn func_mul(ctx: &FieldCtx, f: &Poly, a: &CurveFunction, b: &CurveFunction) -> CurveFunction {
    let h1 = poly::add(
        ctx,
        &poly::mul(ctx, &a.h1, &b.h1),
        &poly::mul(ctx, f, &poly::mul(ctx, &a.h2, &b.h2)),
    );
    let h2 = poly::add(
        ctx,
        &poly::mul(ctx, &a.h1, &b.h2),
        &poly::mul(ctx, &a.h2, &b.h1),
    );
    CurveFunction { h1, h2 }
}

/// The norm-like polynomial `H(x) = h1^2 - f h2^2` (the product of the
/// function with its hyperelliptic conjugate; a polynomial in `x` whose
/// roots are the x-coordinates of the function's affine zeros).
pub fn big_h(ctx: &FieldCtx, f: &Poly, h: &CurveFunction) -> Poly {
    poly::sub(
        ctx,
        &poly::mul(ctx, &h.h1, &h.h1),
        &poly::mul(ctx, f, &poly::mul(ctx, &h.h2, &h.h2)),
    )
}

/// A quotient of two curve functions, kept unreduced.
#[derive(Clone, Debug)]
pub struct FunctionQuotient {
    pub num: CurveFunction,
    pub den: CurveFunction,
}

impl FunctionQuotient {
    pub fn one(ctx: &FieldCtx) -> FunctionQuotient {
        FunctionQuotient { num: CurveFunction::one(ctx), den: CurveFunction::one(ctx) }
    }
}

/// Computes `hh / a = hh * den(a) / num(a)`, which the divisor arithmetic
/// guarantees to be a polynomial function. With `num = b + y c` and
/// `hh * den = h1' + y h2'`, the result `(w1, w2)` satisfies
/// `w1 = (b h1' - f c h2') / (b^2 - f c^2)` and `w2 = (h2' - c w1) / b`;
/// every division is checked exact ([`Error::InexactDivision`] otherwise
/// signals an upstream bug).
pub fn func_divide_exact(
    ctx: &FieldCtx,
    f: &Poly,
    hh: &CurveFunction,
    a: &FunctionQuotient,
) -> Result<CurveFunction> {
    if a.num.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let lifted = func_mul(ctx, f, hh, &a.den);
    let b = &a.num.h1;
    let c = &a.num.h2;
    if c.is_zero() {
        return Ok(CurveFunction {
            h1: poly::div_exact(ctx, &lifted.h1, b)?,
            h2: poly::div_exact(ctx, &lifted.h2, b)?,
        });
    }
    if b.is_zero() {
        // num = y c: multiply through by y, using y^2 = f.
        let w1 = poly::div_exact(ctx, &lifted.h2, c)?;
        let w2 = poly::div_exact(ctx, &lifted.h1, &poly::mul(ctx, f, c))?;
        return Ok(CurveFunction { h1: w1, h2: w2 });
    }
    // b^2 - f c^2 is nonzero: f is squarefree of odd degree, never a square.
    let denom = poly::sub(
        ctx,
        &poly::mul(ctx, b, b),
        &poly::mul(ctx, f, &poly::mul(ctx, c, c)),
    );
    let num1 = poly::sub(
        ctx,
        &poly::mul(ctx, b, &lifted.h1),
        &poly::mul(ctx, f, &poly::mul(ctx, c, &lifted.h2)),
    );
    let w1 = poly::div_exact(ctx, &num1, &denom)?;
    let w2 = poly::div_exact(ctx, &poly::sub(ctx, &lifted.h2, &poly::mul(ctx, c, &w1)), b)?;
    Ok(CurveFunction { h1: w1, h2: w2 })
}

/// Strategy selector for `h_D` computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Pick per genus and `n`: genus 1 uses the line-product strategies with
    /// the empirical thresholds (iterative for `n <= 10`, divide-and-conquer
    /// for `n <= 20`, Miller beyond); higher genus uses Miller unless the
    /// genus is so large relative to `n` that the linear system wins.
    Auto,
    Iterative,
    DivideConquer,
    Miller,
    Linear,
}

/// Computes the normalized `h_D` over `F_q` with the requested strategy.
pub fn compute_hd(
    params: &CurveParams,
    d: &MumfordDivisor,
    strategy: Strategy,
) -> Result<CurveFunction> {
    if d.is_identity() {
        return Ok(CurveFunction::one(&params.base));
    }
    match strategy {
        Strategy::Linear => compute_hd_linear(params, d),
        Strategy::Miller => compute_hd_miller(params, d),
        Strategy::Iterative | Strategy::DivideConquer => {
            let p = ec_point_from_divisor(&params.ext, d)?;
            compute_hp_elliptic(params, &p, strategy)
        }
        Strategy::Auto => {
            if params.genus == 1 {
                let p = ec_point_from_divisor(&params.ext, d)?;
                compute_hp_elliptic(params, &p, Strategy::Auto)
            } else {
                // The linear system beats the Miller loop only when the
                // genus dominates n^3 / log2(n).
                let n = params.n as f64;
                if (params.genus as f64) >= n * n * n / n.log2() {
                    compute_hd_linear(params, d)
                } else {
                    compute_hd_miller(params, d)
                }
            }
        }
    }
}

/// Scales so the parity-appropriate polynomial is monic: `h1` for even
/// `r = deg u`, `h2` for odd `r`.
fn normalize_parity(ctx: &FieldCtx, h: &CurveFunction, r: usize) -> Result<CurveFunction> {
    let lead = if r % 2 == 0 { h.h1.leading() } else { h.h2.leading() };
    let Some(lead) = lead else {
        return Err(Error::NoSolution(
            "parity-designated polynomial of h_D is zero".into(),
        ));
    };
    let inv = ctx.inv(lead)?;
    Ok(CurveFunction {
        h1: poly::scale(ctx, &h.h1, &inv),
        h2: poly::scale(ctx, &h.h2, &inv),
    })
}

/// Projects a normalized extension-field function down to `F_q`; failure
/// means the input divisor was not trace zero.
fn project_to_base(ext: &FieldCtx, h: &CurveFunction) -> Result<CurveFunction> {
    let h1 = poly::project(ext, &h.h1).ok_or(Error::NotTraceZero)?;
    let h2 = poly::project(ext, &h.h2).ok_or(Error::NotTraceZero)?;
    Ok(CurveFunction { h1, h2 })
}

/// Mid-loop rescaling: make the highest available polynomial monic so the
/// running function stays canonical (the final parity normalization still
/// applies at the end).
fn rescale(ctx: &FieldCtx, h: &CurveFunction) -> CurveFunction {
    let lead = if h.h2.is_zero() { h.h1.leading() } else { h.h2.leading() };
    let Some(lead) = lead else { return h.clone() };
    let inv = ctx.inv(lead).expect("leading coefficient nonzero");
    CurveFunction {
        h1: poly::scale(ctx, &h.h1, &inv),
        h2: poly::scale(ctx, &h.h2, &inv),
    }
}

/// Miller-style computation of `h_D` for any genus.
///
/// Invariant: after reaching index `i`, `h` has divisor
/// `D + phi(D) + ... + phi^{i-1}(D) + R_i - (deg) O` where `R_i` is the
/// reduced representative of the *negative* of the partial sum. The base
/// case is `h^{(1)} = u` with `R_1 = [u, -v]`; indices combine by
/// `h^{(i+j)} = h^{(i)} (h^{(j)})^{phi^i} / a` with `a` the Cantor witness
/// of `R_i + phi^i(R_j)`. Trace zero makes `R_{n-1} = phi^{n-1}(D)`, so
/// `h^{(n-1)}` is already `h_D`; the binary expansion of `n - 1` drives the
/// loop.
pub fn compute_hd_miller(params: &CurveParams, d: &MumfordDivisor) -> Result<CurveFunction> {
    if d.is_identity() {
        return Ok(CurveFunction::one(&params.base));
    }
    let ext = &params.ext;
    let f = &params.f_ext;
    let r = d.u.deg().unwrap();
    let w_d = crate::picard::divisor_neg(ext, d);
    let mut h = CurveFunction::from_poly(d.u.clone());
    let mut r_cur = w_d.clone();
    let mut i = 1usize;
    let m = params.n - 1;
    let top = usize::BITS - m.leading_zeros();
    for bit_idx in (0..top.saturating_sub(1)).rev() {
        // Double: i -> 2i.
        let phi_r = frobenius_divisor(ext, &r_cur, i);
        let (r_next, a) = cantor_add(ext, f, &r_cur, &phi_r);
        let h_conj = h.frobenius(ext, i);
        h = func_divide_exact(ext, f, &func_mul(ext, f, &h, &h_conj), &a)?;
        h = rescale(ext, &h);
        r_cur = r_next;
        i *= 2;
        if (m >> bit_idx) & 1 == 1 {
            // Add: i -> i + 1, multiplying in phi^i of h^{(1)} = u.
            let phi_w = frobenius_divisor(ext, &w_d, i);
            let (r_next, a) = cantor_add(ext, f, &r_cur, &phi_w);
            let u_conj = CurveFunction::from_poly(poly::frobenius_map(ext, &d.u, i));
            h = func_divide_exact(ext, f, &func_mul(ext, f, &h, &u_conj), &a)?;
            h = rescale(ext, &h);
            r_cur = r_next;
            i += 1;
        }
    }
    debug_assert_eq!(i, m);
    // Trace zero iff -(D + ... + phi^{n-2}(D)) = phi^{n-1}(D).
    if r_cur != frobenius_divisor(ext, d, params.n - 1) {
        return Err(Error::NotTraceZero);
    }
    let h = normalize_parity(ext, &h, r)?;
    project_to_base(ext, &h)
}

/// `h_D` by linear algebra: unknown coefficients of `h1` (degree up to
/// `floor(nr/2)`) and `h2` (degree up to `floor((nr-2g-1)/2)`) over `F_q`,
/// constrained to vanish on the full conjugate divisor; the kernel must be
/// exactly one-dimensional.
///
/// The ideal of `D + phi(D) + ... + phi^{n-1}(D)` is assembled by repeated
/// Gauss composition as `Z(x) * (U, y - V)` — the content `Z` collects the
/// involution-cancelling overlap between conjugates — so membership of
/// `h1 + y h2` is the pair of linear conditions `h1 + V h2 = 0 (mod Z U)`
/// and `h2 = 0 (mod Z)`. For conjugates with disjoint support (`Z = 1`)
/// this is the usual system of per-conjugate congruences.
pub fn compute_hd_linear(params: &CurveParams, d: &MumfordDivisor) -> Result<CurveFunction> {
    if d.is_identity() {
        return Ok(CurveFunction::one(&params.base));
    }
    let base = &params.base;
    let ext = &params.ext;
    let n = params.n;
    let g = params.genus;
    let r = d.u.deg().unwrap();
    let d1r = n * r / 2;
    let n_gamma = d1r + 1;
    let n_beta = if n * r >= 2 * g + 1 { (n * r - 2 * g - 1) / 2 + 1 } else { 0 };
    let ncols = n_gamma + n_beta;
    // Ideal of the conjugate sum: content z and primitive part [u_acc, v_acc].
    let mut z = Poly::one(ext);
    let mut u_acc = d.u.clone();
    let mut v_acc = d.v.clone();
    for j in 1..n {
        let uj = poly::frobenius_map(ext, &d.u, j);
        let vj = poly::frobenius_map(ext, &d.v, j);
        let (dj, u3, v3) = crate::picard::compose(ext, &params.f_ext, &u_acc, &v_acc, &uj, &vj);
        z = poly::mul(ext, &z, &dj);
        u_acc = u3;
        v_acc = v3;
    }
    let zu = poly::mul(ext, &z, &u_acc);
    let deg_zu = zu.deg().unwrap();
    let deg_z = z.deg().unwrap();
    let mut rows: Vec<Vec<FieldElem>> = Vec::new();
    let mut push_rows = |residues: Vec<Option<Poly>>, deg_m: usize| {
        for ci in 0..deg_m {
            for coord in 0..n {
                let mut row = Vec::with_capacity(ncols);
                for res in &residues {
                    match res {
                        None => row.push(base.zero()),
                        Some(p) => {
                            let c = p.coeff(ext, ci);
                            let FieldElem::Ext(coords) = &c else {
                                unreachable!("extension element expected");
                            };
                            row.push(coords[coord].clone());
                        }
                    }
                }
                rows.push(row);
            }
        }
    };
    // h1 + V h2 = 0 (mod Z U).
    let mut residues: Vec<Option<Poly>> = Vec::with_capacity(ncols);
    for k in 0..n_gamma {
        let xk = Poly::monomial(ext, ext.one(), k);
        residues.push(Some(poly::rem(ext, &xk, &zu)?));
    }
    for k in 0..n_beta {
        let xkv = poly::mul(ext, &Poly::monomial(ext, ext.one(), k), &v_acc);
        residues.push(Some(poly::rem(ext, &xkv, &zu)?));
    }
    push_rows(residues, deg_zu);
    // h2 = 0 (mod Z).
    if deg_z > 0 {
        let mut residues: Vec<Option<Poly>> = vec![None; n_gamma];
        for k in 0..n_beta {
            let xk = Poly::monomial(ext, ext.one(), k);
            residues.push(Some(poly::rem(ext, &xk, &z)?));
        }
        push_rows(residues, deg_z);
    }
    let sol = solve_kernel_dim1(base, rows, ncols)?;
    let h1 = Poly::from_coeffs(base, sol[..n_gamma].to_vec());
    let h2 = Poly::from_coeffs(base, sol[n_gamma..].to_vec());
    normalize_parity(base, &CurveFunction { h1, h2 }, r)
}

/// Gaussian elimination for a homogeneous system whose kernel must be
/// one-dimensional; returns the kernel vector with its free coordinate 1.
fn solve_kernel_dim1(
    ctx: &FieldCtx,
    mut rows: Vec<Vec<FieldElem>>,
    ncols: usize,
) -> Result<Vec<FieldElem>> {
    let mut pivots: Vec<usize> = Vec::new();
    let mut row_i = 0usize;
    for col in 0..ncols {
        let Some(p) = (row_i..rows.len()).find(|&ri| !ctx.is_zero(&rows[ri][col])) else {
            continue;
        };
        rows.swap(row_i, p);
        let inv = ctx.inv(&rows[row_i][col])?;
        for c in col..ncols {
            rows[row_i][c] = ctx.mul(&rows[row_i][c], &inv);
        }
        for ri in 0..rows.len() {
            if ri != row_i && !ctx.is_zero(&rows[ri][col]) {
                let factor = rows[ri][col].clone();
                for c in col..ncols {
                    let t = ctx.mul(&factor, &rows[row_i][c]);
                    rows[ri][c] = ctx.sub(&rows[ri][c], &t);
                }
            }
        }
        pivots.push(col);
        row_i += 1;
        if row_i == rows.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    match free.len() {
        0 => Err(Error::NoSolution(
            "only the zero function satisfies the vanishing constraints".into(),
        )),
        1 => {
            let fc = free[0];
            let mut sol = vec![ctx.zero(); ncols];
            sol[fc] = ctx.one();
            for (pi, &pc) in pivots.iter().enumerate() {
                sol[pc] = ctx.neg(&rows[pi][fc]);
            }
            Ok(sol)
        }
        k => Err(Error::NoSolution(format!(
            "solution space has dimension {k}, expected 1"
        ))),
    }
}

// ----------------------------------------------------------------------
// Elliptic (genus 1) line products
// ----------------------------------------------------------------------

/// A point on an elliptic curve `y^2 = x^3 + a2 x^2 + a4 x + a6`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EcPoint {
    Infinity,
    Affine(FieldElem, FieldElem),
}

/// Converts a genus-1 Mumford divisor to a point.
pub fn ec_point_from_divisor(ctx: &FieldCtx, d: &MumfordDivisor) -> Result<EcPoint> {
    match d.u.deg() {
        Some(0) => Ok(EcPoint::Infinity),
        Some(1) => {
            let x = ctx.neg(&d.u.coeffs()[0]);
            let y = d.v.coeff(ctx, 0);
            Ok(EcPoint::Affine(x, y))
        }
        _ => Err(Error::NotElliptic),
    }
}

pub fn ec_neg(ctx: &FieldCtx, p: &EcPoint) -> EcPoint {
    match p {
        EcPoint::Infinity => EcPoint::Infinity,
        EcPoint::Affine(x, y) => EcPoint::Affine(x.clone(), ctx.neg(y)),
    }
}

pub fn ec_frobenius(ext: &FieldCtx, p: &EcPoint, j: usize) -> EcPoint {
    match p {
        EcPoint::Infinity => EcPoint::Infinity,
        EcPoint::Affine(x, y) => EcPoint::Affine(ext.frobenius(x, j), ext.frobenius(y, j)),
    }
}

/// Chord-and-tangent slope of the line through `p` and `q`, `None` when the
/// line is vertical (or a point is at infinity).
fn ec_slope(ctx: &FieldCtx, f: &Poly, p: &EcPoint, q: &EcPoint) -> Option<FieldElem> {
    let (EcPoint::Affine(x1, y1), EcPoint::Affine(x2, y2)) = (p, q) else {
        return None;
    };
    if x1 == x2 {
        if *y1 == ctx.neg(y2) {
            return None; // vertical (includes the 2-torsion tangent)
        }
        // Tangent: (3x^2 + 2 a2 x + a4) / (2y).
        let a2 = f.coeff(ctx, 2);
        let a4 = f.coeff(ctx, 1);
        let num = ctx.add(
            &ctx.add(
                &ctx.mul(&ctx.from_u64(3), &ctx.sqr(x1)),
                &ctx.mul(&ctx.mul(&ctx.from_u64(2), &a2), x1),
            ),
            &a4,
        );
        let den = ctx.mul(&ctx.from_u64(2), y1);
        Some(ctx.div(&num, &den).expect("y nonzero off 2-torsion"))
    } else {
        let num = ctx.sub(y2, y1);
        let den = ctx.sub(x2, x1);
        Some(ctx.div(&num, &den).expect("x1 != x2"))
    }
}

pub fn ec_add(ctx: &FieldCtx, f: &Poly, p: &EcPoint, q: &EcPoint) -> EcPoint {
    match (p, q) {
        (EcPoint::Infinity, _) => q.clone(),
        (_, EcPoint::Infinity) => p.clone(),
        (EcPoint::Affine(x1, y1), EcPoint::Affine(x2, _)) => {
            let Some(lambda) = ec_slope(ctx, f, p, q) else {
                return EcPoint::Infinity;
            };
            let a2 = f.coeff(ctx, 2);
            let x3 = ctx.sub(&ctx.sub(&ctx.sub(&ctx.sqr(&lambda), &a2), x1), x2);
            let y3 = ctx.sub(&ctx.mul(&lambda, &ctx.sub(x1, &x3)), y1);
            EcPoint::Affine(x3, y3)
        }
    }
}

/// The line function with divisor `p + q + w(p + q) - 3 O`: the chord (or
/// tangent) through the points, degenerating to a vertical when `p = w(q)`,
/// to the vertical of the other point when one is at infinity, and to the
/// constant 1 when both are.
pub fn line(ctx: &FieldCtx, f: &Poly, p: &EcPoint, q: &EcPoint) -> CurveFunction {
    match (p, q) {
        (EcPoint::Infinity, EcPoint::Infinity) => CurveFunction::one(ctx),
        (EcPoint::Infinity, _) => CurveFunction::from_poly(vertical(ctx, q)),
        (_, EcPoint::Infinity) => CurveFunction::from_poly(vertical(ctx, p)),
        (EcPoint::Affine(x1, y1), EcPoint::Affine(_, _)) => match ec_slope(ctx, f, p, q) {
            None => CurveFunction::from_poly(vertical(ctx, p)),
            Some(lambda) => {
                // y - (lambda (x - x1) + y1).
                let nu = ctx.sub(&ctx.mul(&lambda, x1), y1);
                let h1 = Poly::from_coeffs(ctx, vec![nu, ctx.neg(&lambda)]);
                CurveFunction { h1, h2: Poly::one(ctx) }
            }
        },
    }
}

/// The vertical line `x - x_p` (constant 1 at infinity), with divisor
/// `p + w(p) - 2 O`.
pub fn vertical(ctx: &FieldCtx, p: &EcPoint) -> Poly {
    match p {
        EcPoint::Infinity => Poly::one(ctx),
        EcPoint::Affine(x, _) => Poly::from_coeffs(ctx, vec![ctx.neg(x), ctx.one()]),
    }
}

/// Exact componentwise division of a curve function by a polynomial in `x`
/// (valid whenever `div(h)` contains the full fiber divisor of the poly).
fn divide_by_x_poly(ctx: &FieldCtx, h: &CurveFunction, p: &Poly) -> Result<CurveFunction> {
    Ok(CurveFunction {
        h1: poly::div_exact(ctx, &h.h1, p)?,
        h2: poly::div_exact(ctx, &h.h2, p)?,
    })
}

/// Genus-1 `h_P` by line products, normalized and projected to `F_q`.
///
/// All strategies maintain `div(h_k) = P + phi(P) + ... + phi^{k-1}(P) +
/// w(R_k) - (k+1) O` with `R_k` the honest partial sum; `h_1` is the
/// vertical at `P`, and trace zero gives `h_P = h_{n-1}`.
pub fn compute_hp_elliptic(
    params: &CurveParams,
    p: &EcPoint,
    strategy: Strategy,
) -> Result<CurveFunction> {
    if params.genus != 1 {
        return Err(Error::NotElliptic);
    }
    let EcPoint::Affine(_, _) = p else {
        return Err(Error::PointAtInfinity);
    };
    let n = params.n;
    let ext = &params.ext;
    let f = &params.f_ext;
    let strategy = match strategy {
        Strategy::Auto => {
            if n <= 10 {
                Strategy::Iterative
            } else if n <= 20 {
                Strategy::DivideConquer
            } else {
                Strategy::Miller
            }
        }
        Strategy::Linear => return Err(Error::NotElliptic),
        s => s,
    };
    let (h, r_final) = match strategy {
        Strategy::Iterative => hp_iterative(ext, f, p, n)?,
        Strategy::DivideConquer => {
            let mut memo = HashMap::new();
            hp_segment(ext, f, p, n - 1, &mut memo)?
        }
        Strategy::Miller => hp_miller(ext, f, p, n)?,
        _ => unreachable!(),
    };
    // Trace zero iff the partial sum of n-1 conjugates is -phi^{n-1}(P).
    if ec_add(ext, f, &r_final, &ec_frobenius(ext, p, n - 1)) != EcPoint::Infinity {
        return Err(Error::NotTraceZero);
    }
    let h = normalize_parity(ext, &h, 1)?;
    project_to_base(ext, &h)
}

/// One chord per conjugate: `h_{k+1} = h_k * line(R_k, phi^k P) / v_{R_k}`.
fn hp_iterative(
    ext: &FieldCtx,
    f: &Poly,
    p: &EcPoint,
    n: usize,
) -> Result<(CurveFunction, EcPoint)> {
    let mut h = CurveFunction::from_poly(vertical(ext, p));
    let mut r = p.clone();
    for k in 1..=n - 2 {
        let pk = ec_frobenius(ext, p, k);
        let l = line(ext, f, &r, &pk);
        let vr = vertical(ext, &r);
        let rn = ec_add(ext, f, &r, &pk);
        h = func_mul(ext, f, &h, &l);
        h = divide_by_x_poly(ext, &h, &vr)?;
        r = rn;
    }
    Ok((h, r))
}

/// Binary splitting with memoized unshifted segments: the function for a
/// run of `len` conjugates starting at shift 0; parents Frobenius-shift the
/// right half and stitch with
/// `h_{a+b} = h_a * phi^a(h_b) * v_{R_{a+b}} / line(w(R_a), w(phi^a R_b))`.
fn hp_segment(
    ext: &FieldCtx,
    f: &Poly,
    p: &EcPoint,
    len: usize,
    memo: &mut HashMap<usize, (CurveFunction, EcPoint)>,
) -> Result<(CurveFunction, EcPoint)> {
    if let Some(hit) = memo.get(&len) {
        return Ok(hit.clone());
    }
    let result = if len == 1 {
        (CurveFunction::from_poly(vertical(ext, p)), p.clone())
    } else {
        let a = len / 2;
        let b = len - a;
        let (ha, ra) = hp_segment(ext, f, p, a, memo)?;
        let (hb, rb) = hp_segment(ext, f, p, b, memo)?;
        let hb_shift = hb.frobenius(ext, a);
        let rb_shift = ec_frobenius(ext, &rb, a);
        combine_segments(ext, f, &ha, &ra, &hb_shift, &rb_shift)?
    };
    memo.insert(len, result.clone());
    Ok(result)
}

/// Stitches two adjacent segment functions (the right one already shifted).
fn combine_segments(
    ext: &FieldCtx,
    f: &Poly,
    ha: &CurveFunction,
    ra: &EcPoint,
    hb: &CurveFunction,
    rb: &EcPoint,
) -> Result<(CurveFunction, EcPoint)> {
    let rab = ec_add(ext, f, ra, rb);
    let l = line(ext, f, &ec_neg(ext, ra), &ec_neg(ext, rb));
    let vab = vertical(ext, &rab);
    let mut h = func_mul(ext, f, ha, hb);
    h = func_mul(ext, f, &h, &CurveFunction::from_poly(vab));
    h = func_divide_exact(
        ext,
        f,
        &h,
        &FunctionQuotient { num: l, den: CurveFunction::one(ext) },
    )?;
    Ok((h, rab))
}

/// Double-and-add over the bits of `n - 1` using the same stitching rule.
fn hp_miller(
    ext: &FieldCtx,
    f: &Poly,
    p: &EcPoint,
    n: usize,
) -> Result<(CurveFunction, EcPoint)> {
    let mut h = CurveFunction::from_poly(vertical(ext, p));
    let mut r = p.clone();
    let mut i = 1usize;
    let m = n - 1;
    let top = usize::BITS - m.leading_zeros();
    for bit_idx in (0..top.saturating_sub(1)).rev() {
        let h_shift = h.frobenius(ext, i);
        let r_shift = ec_frobenius(ext, &r, i);
        let (hn, rn) = combine_segments(ext, f, &h, &r, &h_shift, &r_shift)?;
        h = rescale(ext, &hn);
        r = rn;
        i *= 2;
        if (m >> bit_idx) & 1 == 1 {
            let p_shift = ec_frobenius(ext, p, i);
            let hp_shift = CurveFunction::from_poly(vertical(ext, &p_shift));
            let (hn, rn) = combine_segments(ext, f, &h, &r, &hp_shift, &p_shift)?;
            h = rescale(ext, &hn);
            r = rn;
            i += 1;
        }
    }
    debug_assert_eq!(i, m);
    Ok((h, r))
}
