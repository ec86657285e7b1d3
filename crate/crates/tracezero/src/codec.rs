//! The optimal-size representation of trace zero elements.
//!
//! A class `[D] ∈ T_n` with reduced Mumford pair `[u, v]` is represented by
//! the coefficients of its normalized trace function `h_D = h1 + y h2`:
//! `(n-1)g` base-field coordinates plus one bit. With `d1 = floor(ng/2)`
//! and `d2 = floor(((n-2)g - 1)/2)`, the layout is
//!
//! - `g` even: `(beta_0 .. beta_{d2}, gamma_0 .. gamma_{d1-1}, delta)`,
//! - `g` odd:  `(gamma_0 .. gamma_{d1}, beta_0 .. beta_{d2-1}, delta)`,
//!
//! where `gamma_i, beta_i` are the coefficients of `h1, h2` and `delta` is
//! the one dropped top coefficient, provably 0 or 1 (it is 1 exactly when
//! `deg u = g`). The identity is the all-zero vector with `delta = 0`.
//!
//! Decompression recovers the x-support from `H = h1^2 - f h2^2` (which
//! equals the norm of `u` up to a constant), then reads the y-data of one
//! class representative off `h_D` factor by factor. The map is injective up
//! to Frobenius conjugation of the prime constituents — at most `n^g`
//! reduced divisors share an image — so round-trips compare compressed
//! forms, never raw divisors.
//!
//! `n = 2` uses a simpler scheme: there `u` is rational and `v` is
//! anti-invariant (`v^phi = -v`), so `u`'s low coefficients alone suffice.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::fields::FieldElem;
use crate::funcs::{self, big_h, CurveFunction, EcPoint, Strategy};
use crate::picard::{CurveParams, MumfordDivisor};
use crate::poly::{self, Poly};

/// A compressed trace zero element: `(n-1)g` base-field coordinates and the
/// delta bit. Which curve parameters it belongs to is context the caller
/// carries (the CLI pairs payloads with a parameter-file digest).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressedElement {
    pub coords: Vec<FieldElem>,
    pub delta: bool,
}

/// Branch tally from one generic decompression, used by the test suite and
/// the self-test command to prove every reconstruction path is exercised.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DecompressTrace {
    /// Factors of `H` that stay irreducible over the extension (their
    /// multiplicity is divided by `n`).
    pub rational_adjust: usize,
    /// Factors resolved through `v = -h1/h2`.
    pub branch_b: usize,
    /// Two-torsion factors (`h2 = 0 = f` modulo the factor).
    pub branch_c: usize,
    /// Vertical-content factors with a leftover one-sheet part.
    pub branch_d_split: usize,
    /// Vertical-content factors resolved by a modular square root.
    pub branch_d_sqrt: usize,
}

impl DecompressTrace {
    /// Accumulates another trace into this one.
    pub fn merge(&mut self, other: &DecompressTrace) {
        self.rational_adjust += other.rational_adjust;
        self.branch_b += other.branch_b;
        self.branch_c += other.branch_c;
        self.branch_d_split += other.branch_d_split;
        self.branch_d_sqrt += other.branch_d_sqrt;
    }
}

/// Number of field coordinates in a compressed element: `(n-1)g`.
pub fn expected_coords(params: &CurveParams) -> usize {
    (params.n - 1) * params.genus
}

/// The layout degree caps `(d1, d2)` for `n >= 3`.
fn layout_dims(params: &CurveParams) -> (usize, usize) {
    let (g, n) = (params.genus, params.n);
    (n * g / 2, ((n - 2) * g - 1) / 2)
}

/// Packs a normalized `h_D` into the coordinate layout.
fn encode_layout(params: &CurveParams, h: &CurveFunction) -> CompressedElement {
    let base = &params.base;
    let (d1, d2) = layout_dims(params);
    debug_assert!(h.h1.deg().map(|d| d <= d1).unwrap_or(true));
    debug_assert!(h.h2.deg().map(|d| d <= d2).unwrap_or(true));
    let gamma: Vec<FieldElem> = (0..=d1).map(|i| h.h1.coeff(base, i)).collect();
    let beta: Vec<FieldElem> = (0..=d2).map(|i| h.h2.coeff(base, i)).collect();
    let (coords, top) = if params.genus % 2 == 0 {
        let mut cs = beta;
        cs.extend_from_slice(&gamma[..d1]);
        (cs, gamma[d1].clone())
    } else {
        let mut cs = gamma;
        cs.extend_from_slice(&beta[..d2]);
        (cs, beta[d2].clone())
    };
    let delta = if base.is_zero(&top) {
        false
    } else {
        assert!(
            base.is_one(&top),
            "dropped top coefficient of a normalized h_D must be 0 or 1"
        );
        true
    };
    debug_assert_eq!(coords.len(), expected_coords(params));
    CompressedElement { coords, delta }
}

/// Parses the coordinate layout back into `(h1, h2)`.
fn decode_layout(params: &CurveParams, c: &CompressedElement) -> (Poly, Poly) {
    let base = &params.base;
    let (d1, d2) = layout_dims(params);
    let top = if c.delta { base.one() } else { base.zero() };
    if params.genus % 2 == 0 {
        let mut beta = c.coords[..=d2].to_vec();
        let mut gamma = c.coords[d2 + 1..].to_vec();
        gamma.push(top);
        beta.truncate(d2 + 1);
        (Poly::from_coeffs(base, gamma), Poly::from_coeffs(base, beta))
    } else {
        let gamma = c.coords[..=d1].to_vec();
        let mut beta = c.coords[d1 + 1..].to_vec();
        beta.push(top);
        (Poly::from_coeffs(base, gamma), Poly::from_coeffs(base, beta))
    }
}

/// Compresses a trace zero divisor class (strategy chosen automatically).
pub fn compress(params: &CurveParams, d: &MumfordDivisor) -> Result<CompressedElement> {
    compress_with_strategy(params, d, Strategy::Auto)
}

/// Compression with an explicit `h_D` strategy. The output is independent
/// of the strategy; the identity maps to the all-zero vector with
/// `delta = 0`, and `n = 2` dispatches to the rational-`u` codec.
pub fn compress_with_strategy(
    params: &CurveParams,
    d: &MumfordDivisor,
    strategy: Strategy,
) -> Result<CompressedElement> {
    if params.n == 2 {
        return compress_n2(params, d);
    }
    if d.is_identity() {
        return Ok(CompressedElement {
            coords: vec![params.base.zero(); expected_coords(params)],
            delta: false,
        });
    }
    let h = funcs::compute_hd(params, d, strategy)?;
    let c = encode_layout(params, &h);
    debug_assert_eq!(c.delta, d.u.deg() == Some(params.genus));
    Ok(c)
}

/// Decompresses into one reduced divisor of the class, together with the
/// branch tally of the reconstruction.
///
/// The factor analysis of `H = h1^2 - f h2^2` over `F_q` runs per
/// irreducible factor `U_i` of multiplicity `e_i`:
///
/// (a) if `U_i` stays irreducible over `F_{q^n}` (n prime: `n` does not
///     divide its degree), all conjugates coincide, so `e_i` must be a
///     multiple of `n` and is divided by it; otherwise one canonical
///     extension factor `U` is chosen.
/// (b) `h2` invertible mod `U`: the sheet is `V = -h1 h2^{-1} (mod U^e)`.
/// (c) `h2 = 0 = f (mod U)`: two-torsion points, one per conjugate.
/// (d) `h2 = 0 (mod U)`, `f` not: strip the vertical content `U_i^s` off
///     `(h1, h2)`; a leftover sheet gives `[U, V]` with multiplicity
///     `e - s` and `[U^phi, -V^phi]` with multiplicity `s` (split case,
///     `2s < e`); pure verticals (`2s = e`) read `V` from a modular square
///     root of `f`. Higher multiplicities Hensel-lift `V`.
///
/// The constituents are CRT-combined into one Mumford pair, and the result
/// must compress back to the input — the round-trip is what rejects
/// payloads outside the image of compression.
pub fn decompress(
    params: &CurveParams,
    c: &CompressedElement,
) -> Result<(MumfordDivisor, DecompressTrace)> {
    if params.n == 2 {
        return decompress_n2(params, c).map(|d| (d, DecompressTrace::default()));
    }
    let base = &params.base;
    let ext = &params.ext;
    let n = params.n;
    if c.coords.len() != expected_coords(params) {
        return Err(Error::MalformedInput(format!(
            "expected {} coordinates, got {}",
            expected_coords(params),
            c.coords.len()
        )));
    }
    let mut trace = DecompressTrace::default();
    if c.coords.iter().all(|e| base.is_zero(e)) && !c.delta {
        return Ok((MumfordDivisor::identity(ext), trace));
    }
    let (h1, h2) = decode_layout(params, c);
    let h = CurveFunction { h1: h1.clone(), h2: h2.clone() };
    let h_big = big_h(base, &params.f, &h);
    if h_big.is_zero() {
        return Err(Error::MalformedInput(
            "h1^2 - f h2^2 vanishes identically".into(),
        ));
    }
    let h1e = poly::embed(ext, &h1);
    let h2e = poly::embed(ext, &h2);
    let mut constituents: Vec<(Poly, Poly, usize)> = Vec::new();
    for (ui, ei) in poly::factor(base, &h_big) {
        let deg_ui = ui.deg().unwrap();
        let (u_ext, e) = if deg_ui % n != 0 {
            trace.rational_adjust += 1;
            if ei % n != 0 {
                return Err(Error::MalformedInput(
                    "rational factor multiplicity not divisible by n".into(),
                ));
            }
            (poly::embed(ext, &ui), ei / n)
        } else {
            let split = poly::factor(ext, &poly::embed(ext, &ui));
            (split[0].0.clone(), ei)
        };
        if !poly::rem(ext, &h2e, &u_ext)?.is_zero() {
            // (b) one sheet, read off h_D directly.
            trace.branch_b += 1;
            let um = poly::pow(ext, &u_ext, e);
            let inv = poly::inv_mod(ext, &poly::rem(ext, &h2e, &um)?, &um)
                .map_err(|_| Error::MalformedInput("h2 not invertible at a factor".into()))?;
            let v = poly::neg(ext, &poly::mulmod(ext, &poly::rem(ext, &h1e, &um)?, &inv, &um));
            constituents.push((u_ext, v, e));
        } else if poly::rem(ext, &params.f_ext, &u_ext)?.is_zero() {
            // (c) two-torsion: spread over conjugates, multiplicity one each.
            trace.branch_c += 1;
            for j in 0..e {
                constituents.push((poly::frobenius_map(ext, &u_ext, j), Poly::zero(), 1));
            }
        } else {
            // (d) vertical content.
            let mut s = 0usize;
            let mut h1s = h1.clone();
            let mut h2s = h2.clone();
            loop {
                let (q1, r1) = poly::divrem(base, &h1s, &ui)?;
                let (q2, r2) = poly::divrem(base, &h2s, &ui)?;
                if r1.is_zero() && r2.is_zero() {
                    h1s = q1;
                    h2s = q2;
                    s += 1;
                } else {
                    break;
                }
            }
            if 2 * s > e {
                return Err(Error::MalformedInput(
                    "vertical content exceeds factor multiplicity".into(),
                ));
            }
            if 2 * s == e {
                trace.branch_d_sqrt += 1;
                let v0 = poly::modular_sqrt(ext, &params.f_ext, &u_ext)?
                    .ok_or(Error::NotASquare)?;
                let v = if s > 1 {
                    poly::hensel_sqrt(ext, &params.f_ext, &v0, &u_ext, s)
                        .map_err(|_| Error::MalformedInput("square root does not lift".into()))?
                } else {
                    v0
                };
                let uphi = poly::frobenius_map(ext, &u_ext, 1);
                let vphi = poly::rem(
                    ext,
                    &poly::neg(ext, &poly::frobenius_map(ext, &v, 1)),
                    &poly::pow(ext, &uphi, s),
                )?;
                constituents.push((u_ext, v, s));
                constituents.push((uphi, vphi, s));
            } else {
                trace.branch_d_split += 1;
                let m_major = e - s;
                let h1d = poly::rem(ext, &poly::embed(ext, &h1s), &u_ext)?;
                let h2d = poly::rem(ext, &poly::embed(ext, &h2s), &u_ext)?;
                let inv = poly::inv_mod(ext, &h2d, &u_ext).map_err(|_| {
                    Error::MalformedInput("residual h2 not invertible at a factor".into())
                })?;
                let v0 = poly::neg(ext, &poly::mulmod(ext, &h1d, &inv, &u_ext));
                let v = if m_major > 1 {
                    poly::hensel_sqrt(ext, &params.f_ext, &v0, &u_ext, m_major)
                        .map_err(|_| Error::MalformedInput("sheet does not lift".into()))?
                } else {
                    v0
                };
                constituents.push((u_ext.clone(), v.clone(), m_major));
                if s > 0 {
                    let uphi = poly::frobenius_map(ext, &u_ext, 1);
                    let vphi = poly::rem(
                        ext,
                        &poly::neg(ext, &poly::frobenius_map(ext, &v, 1)),
                        &poly::pow(ext, &uphi, s),
                    )?;
                    constituents.push((uphi, vphi, s));
                }
            }
        }
    }
    // Assemble: moduli must be pairwise distinct (hence coprime).
    let mut keys: Vec<&Poly> = constituents.iter().map(|(u, _, _)| u).collect();
    keys.sort_by(|a, b| poly::poly_cmp(a, b));
    if keys.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::MalformedInput(
            "conflicting constituents at one place".into(),
        ));
    }
    let mut u = Poly::one(ext);
    let mut parts: Vec<(Poly, Poly)> = Vec::new();
    for (ue, ve, m) in &constituents {
        let um = poly::pow(ext, ue, *m);
        u = poly::mul(ext, &u, &um);
        parts.push((ve.clone(), um));
    }
    let v = poly::crt(ext, &parts)
        .map_err(|_| Error::MalformedInput("constituents do not combine".into()))?;
    let dd = MumfordDivisor::new(ext, &params.f_ext, u, v)
        .map_err(|e| Error::MalformedInput(format!("reassembled divisor invalid: {e}")))?;
    match compress(params, &dd) {
        Ok(rt) if rt == *c => Ok((dd, trace)),
        Ok(_) => Err(Error::MalformedInput(
            "payload is not in the image of compression".into(),
        )),
        Err(_) => Err(Error::MalformedInput(
            "reassembled divisor is not trace zero".into(),
        )),
    }
}

/// Genus-1 compression: identical layout to the generic path (`delta` is
/// always 1 for an affine point and is kept for format uniformity).
pub fn compress_elliptic(params: &CurveParams, p: &EcPoint) -> Result<CompressedElement> {
    if params.genus != 1 {
        return Err(Error::NotElliptic);
    }
    if params.n < 3 {
        return Err(Error::InvalidCurve(
            "elliptic codec requires extension degree at least 3".into(),
        ));
    }
    let EcPoint::Affine(_, _) = p else {
        return Err(Error::PointAtInfinity);
    };
    let h = funcs::compute_hp_elliptic(params, p, Strategy::Auto)?;
    Ok(encode_layout(params, &h))
}

/// Genus-1 decompression by root finding: one root `X` of
/// `H_P = h1^2 - f h2^2` over `F_{q^n}` (no full factorization), then
/// `Y = -h1(X)/h2(X)`; `h2(X)` is nonzero for every payload in the image.
/// The all-zero identity encoding returns the point at infinity.
pub fn decompress_elliptic(params: &CurveParams, c: &CompressedElement) -> Result<EcPoint> {
    if params.genus != 1 {
        return Err(Error::NotElliptic);
    }
    if params.n < 3 {
        return Err(Error::InvalidCurve(
            "elliptic codec requires extension degree at least 3".into(),
        ));
    }
    let base = &params.base;
    let ext = &params.ext;
    if c.coords.len() != expected_coords(params) {
        return Err(Error::MalformedInput(format!(
            "expected {} coordinates, got {}",
            expected_coords(params),
            c.coords.len()
        )));
    }
    if c.coords.iter().all(|e| base.is_zero(e)) && !c.delta {
        return Ok(EcPoint::Infinity);
    }
    if !c.delta {
        return Err(Error::MalformedInput(
            "delta must be 1 for a compressed point".into(),
        ));
    }
    let (h1, h2) = decode_layout(params, c);
    let h = CurveFunction { h1: h1.clone(), h2: h2.clone() };
    let h_big = big_h(base, &params.f, &h);
    let x = poly::find_root(ext, &poly::embed(ext, &h_big))?;
    let h2x = poly::eval(ext, &poly::embed(ext, &h2), &x);
    if ext.is_zero(&h2x) {
        return Err(Error::MalformedInput(
            "h2 vanishes at the recovered coordinate".into(),
        ));
    }
    let h1x = poly::eval(ext, &poly::embed(ext, &h1), &x);
    let y = ext.neg(&ext.div(&h1x, &h2x)?);
    let p = EcPoint::Affine(x, y);
    match compress_elliptic(params, &p) {
        Ok(rt) if rt == *c => Ok(p),
        Ok(_) => Err(Error::MalformedInput(
            "payload is not in the image of compression".into(),
        )),
        Err(_) => Err(Error::MalformedInput(
            "recovered point is not trace zero".into(),
        )),
    }
}

/// `n = 2` compression: `u` is rational and `v` anti-invariant for trace
/// zero classes, so the `g` low coefficients of `u` (plus
/// `delta = [deg u = g]`) determine the class. Identity is all-zero.
pub fn compress_n2(params: &CurveParams, d: &MumfordDivisor) -> Result<CompressedElement> {
    if params.n != 2 {
        return Err(Error::InvalidCurve("this codec requires n = 2".into()));
    }
    let base = &params.base;
    let ext = &params.ext;
    let g = params.genus;
    if d.is_identity() {
        return Ok(CompressedElement { coords: vec![base.zero(); g], delta: false });
    }
    let u = poly::project(ext, &d.u).ok_or(Error::NotTraceZero)?;
    let minus_v = poly::neg(ext, &d.v);
    if poly::frobenius_map(ext, &d.v, 1) != minus_v {
        return Err(Error::NotTraceZero);
    }
    let r = u.deg().unwrap();
    let coords = (0..g).map(|i| u.coeff(base, i)).collect();
    Ok(CompressedElement { coords, delta: r == g })
}

/// `n = 2` decompression: rebuild `u`, factor it over `F_{q^2}`, give each
/// factor the square-root sheet that makes `v` anti-invariant (conjugate
/// factor pairs get `V` and `-V^phi`; self-conjugate factors test both
/// signs), and CRT-combine.
pub fn decompress_n2(params: &CurveParams, c: &CompressedElement) -> Result<MumfordDivisor> {
    if params.n != 2 {
        return Err(Error::InvalidCurve("this codec requires n = 2".into()));
    }
    let base = &params.base;
    let ext = &params.ext;
    let g = params.genus;
    if c.coords.len() != g {
        return Err(Error::MalformedInput(format!(
            "expected {} coordinates, got {}",
            g,
            c.coords.len()
        )));
    }
    if c.coords.iter().all(|e| base.is_zero(e)) && !c.delta {
        return Ok(MumfordDivisor::identity(ext));
    }
    let mut coeffs = c.coords.clone();
    if c.delta {
        coeffs.push(base.one());
    }
    let u = Poly::from_coeffs(base, coeffs);
    if !u.is_monic(base) || u.deg() == Some(0) {
        return Err(Error::MalformedInput("u must be monic nonconstant".into()));
    }
    let u_ext = poly::embed(ext, &u);
    let factors = poly::factor(ext, &u_ext);
    let mut parts: Vec<(Poly, Poly)> = Vec::new();
    let mut done: HashSet<usize> = HashSet::new();
    for (idx, (gf, m)) in factors.iter().enumerate() {
        if done.contains(&idx) {
            continue;
        }
        done.insert(idx);
        let gphi = poly::frobenius_map(ext, gf, 1);
        let v0 = poly::modular_sqrt(ext, &params.f_ext, gf)?
            .ok_or(Error::NoAntiInvariantRoot)?;
        if v0.is_zero() && *m > 1 {
            // Ramified factor with multiplicity: u cannot divide v^2 - f.
            return Err(Error::NoAntiInvariantRoot);
        }
        let v = if *m > 1 {
            poly::hensel_sqrt(ext, &params.f_ext, &v0, gf, *m)
                .map_err(|_| Error::NoAntiInvariantRoot)?
        } else {
            v0
        };
        let gm = poly::pow(ext, gf, *m);
        if gphi == *gf {
            // Self-conjugate: one of the two signs must be anti-invariant.
            let chosen = [v.clone(), poly::neg(ext, &v)].into_iter().find(|cand| {
                let sum = poly::add(ext, &poly::frobenius_map(ext, cand, 1), cand);
                poly::rem(ext, &sum, &gm).map(|r| r.is_zero()).unwrap_or(false)
            });
            let Some(v) = chosen else {
                return Err(Error::NoAntiInvariantRoot);
            };
            parts.push((v, gm));
        } else {
            let pidx = factors
                .iter()
                .position(|(h, mh)| *h == gphi && *mh == *m)
                .ok_or_else(|| Error::MalformedInput("factor orbit is not closed".into()))?;
            done.insert(pidx);
            let gphim = poly::pow(ext, &gphi, *m);
            let vphi = poly::rem(
                ext,
                &poly::neg(ext, &poly::frobenius_map(ext, &v, 1)),
                &gphim,
            )?;
            parts.push((v, gm));
            parts.push((vphi, gphim));
        }
    }
    let v = poly::crt(ext, &parts)
        .map_err(|_| Error::MalformedInput("constituents do not combine".into()))?;
    if poly::frobenius_map(ext, &v, 1) != poly::neg(ext, &v) {
        return Err(Error::NoAntiInvariantRoot);
    }
    let dd = MumfordDivisor::new(ext, &params.f_ext, u_ext, v)
        .map_err(|e| Error::MalformedInput(format!("reassembled divisor invalid: {e}")))?;
    match compress_n2(params, &dd) {
        Ok(rt) if rt == *c => Ok(dd),
        _ => Err(Error::MalformedInput(
            "payload is not in the image of compression".into(),
        )),
    }
}

/// Byte encoding: each coordinate big-endian in `ceil(bitlen(q)/8)` bytes,
/// in layout order, then one `0x00`/`0x01` byte for delta. Total size is
/// `(n-1) g ceil(bitlen(q)/8) + 1`.
pub fn serialize(params: &CurveParams, c: &CompressedElement) -> Vec<u8> {
    let base = &params.base;
    let w = base.coord_byte_width();
    let mut out = Vec::with_capacity(c.coords.len() * w + 1);
    for e in &c.coords {
        out.extend_from_slice(&base.elem_to_bytes(e));
    }
    out.push(u8::from(c.delta));
    out
}

/// Inverse of [`serialize`], validating length, coordinate range, and the
/// delta byte.
pub fn deserialize(params: &CurveParams, bytes: &[u8]) -> Result<CompressedElement> {
    let base = &params.base;
    let w = base.coord_byte_width();
    let total = expected_coords(params);
    if bytes.len() != total * w + 1 {
        return Err(Error::MalformedInput(format!(
            "payload must be {} bytes, got {}",
            total * w + 1,
            bytes.len()
        )));
    }
    let mut coords = Vec::with_capacity(total);
    for chunk in bytes[..total * w].chunks_exact(w) {
        let e = base
            .elem_from_bytes(chunk)
            .map_err(|_| Error::MalformedInput("coordinate out of range".into()))?;
        coords.push(e);
    }
    let delta = match bytes[total * w] {
        0 => false,
        1 => true,
        b => {
            return Err(Error::MalformedInput(format!(
                "delta byte must be 0x00 or 0x01, got 0x{b:02x}"
            )))
        }
    };
    Ok(CompressedElement { coords, delta })
}
