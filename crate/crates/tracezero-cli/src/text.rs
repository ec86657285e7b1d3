//! Plain-text forms used on the command line: comma-separated integer
//! lists for curve coefficients, and Mumford pairs written `u;v` where each
//! polynomial lists its coefficients low to high separated by `|` and each
//! extension-field coefficient is a comma-separated list of base-field
//! coordinates (low basis power first, trailing zeros optional).

use num_bigint::BigInt;
use tracezero::error::{Error, Result};
use tracezero::fields::{elem_to_string, FieldCtx, FieldElem};
use tracezero::picard::{CurveParams, MumfordDivisor};
use tracezero::poly::Poly;

use crate::params_file::reduce;

/// Parses `"1,2,0,1"` into signed integers, low degree first.
pub fn parse_int_list(s: &str) -> Result<Vec<BigInt>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::MalformedInput(format!("not an integer: {:?}", t.trim())))
        })
        .collect()
}

fn parse_elem(ext: &FieldCtx, s: &str) -> Result<FieldElem> {
    let q = ext.characteristic();
    let n = ext.degree();
    let mut coords = Vec::with_capacity(n);
    for t in s.split(',') {
        let v: BigInt = t
            .trim()
            .parse()
            .map_err(|_| Error::MalformedInput(format!("not an integer: {:?}", t.trim())))?;
        coords.push(FieldElem::Prime(reduce(&v, &q)));
    }
    if coords.len() > n {
        return Err(Error::MalformedInput(format!(
            "coefficient has {} coordinates; the extension degree is {n}",
            coords.len()
        )));
    }
    coords.resize(n, FieldElem::Prime(0u32.into()));
    Ok(FieldElem::Ext(coords))
}

fn parse_poly(ext: &FieldCtx, s: &str) -> Result<Poly> {
    let coeffs = s
        .trim()
        .split('|')
        .map(|c| parse_elem(ext, c))
        .collect::<Result<Vec<_>>>()?;
    Ok(Poly::from_coeffs(ext, coeffs))
}

/// Parses `u;v` and validates the pair as a reduced divisor on the curve.
pub fn parse_divisor(params: &CurveParams, s: &str) -> Result<MumfordDivisor> {
    let parts: Vec<&str> = s.split(';').collect();
    if parts.len() != 2 {
        return Err(Error::MalformedInput(
            "divisor text must be two polynomials separated by one ';'".into(),
        ));
    }
    let u = parse_poly(&params.ext, parts[0])?;
    let v = parse_poly(&params.ext, parts[1])?;
    MumfordDivisor::new(&params.ext, &params.f_ext, u, v)
}

fn elem_to_text(e: &FieldElem) -> String {
    match e {
        FieldElem::Prime(v) => v.to_string(),
        FieldElem::Ext(coords) => {
            let mut parts: Vec<String> = coords.iter().map(elem_to_string).collect();
            while parts.len() > 1 && parts.last().map(|p| p == "0").unwrap_or(false) {
                parts.pop();
            }
            parts.join(",")
        }
    }
}

fn poly_to_text(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    p.coeffs()
        .iter()
        .map(elem_to_text)
        .collect::<Vec<_>>()
        .join("|")
}

/// Renders a divisor in the same grammar [`parse_divisor`] accepts; the
/// identity prints as `1;0`.
pub fn divisor_to_text(d: &MumfordDivisor) -> String {
    format!("{};{}", poly_to_text(&d.u), poly_to_text(&d.v))
}

/// Human-readable polynomial in `x` for display (not machine-parsed).
pub fn poly_to_display(ctx: &FieldCtx, p: &Poly) -> String {
    let mut terms: Vec<String> = Vec::new();
    for (i, c) in p.coeffs().iter().enumerate().rev() {
        if ctx.is_zero(c) {
            continue;
        }
        let cs = elem_to_string(c);
        terms.push(match i {
            0 => cs,
            1 if cs == "1" => "x".into(),
            1 => format!("{cs}*x"),
            _ if cs == "1" => format!("x^{i}"),
            _ => format!("{cs}*x^{i}"),
        });
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

/// Modulus coefficients joined with `|`, matching the polynomial grammar.
pub fn poly_coeffs_to_text(coeffs: &[FieldElem]) -> String {
    coeffs
        .iter()
        .map(elem_to_string)
        .collect::<Vec<_>>()
        .join("|")
}
