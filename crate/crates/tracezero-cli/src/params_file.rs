//! JSON parameter files: the prime, genus, extension degree, curve and
//! extension-modulus coefficients, and a content hash that pins the file
//! against accidental edits. All coefficients are canonical decimal strings
//! (low to high, each reduced modulo q), so files diff cleanly.

use num_bigint::{BigInt, BigUint, Sign};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tracezero::error::{Error, Result};
use tracezero::fields::{elem_to_string, is_probable_prime, FieldCtx, FieldElem};
use tracezero::picard::CurveParams;
use tracezero::poly::Poly;

#[derive(Serialize, Deserialize, Clone)]
pub struct ParamsFile {
    /// Field characteristic, decimal.
    pub q: String,
    /// Genus.
    pub g: usize,
    /// Extension degree, a prime or 2.
    pub n: usize,
    /// Coefficients of f, low to high; length 2g+2 with leading "1".
    pub f: Vec<String>,
    /// Extension modulus coefficients, low to high; length n+1, monic.
    pub ext_modulus: Vec<String>,
    /// Present when the modulus is the binomial z^n - mu.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kummer_mu: Option<String>,
    /// Content hash over all fields above.
    pub params_id: String,
}

fn content_hash(
    q: &str,
    g: usize,
    n: usize,
    f: &[String],
    modulus: &[String],
    mu: Option<&str>,
) -> String {
    let mut hasher = Sha256::new();
    hasher.update(
        format!(
            "q={q};g={g};n={n};f={};m={};mu={}",
            f.join(","),
            modulus.join(","),
            mu.unwrap_or("-")
        )
        .as_bytes(),
    );
    hex::encode(hasher.finalize())
}

fn require_prime_q(q: &str) -> Result<BigUint> {
    let q: BigUint = q
        .parse()
        .map_err(|_| Error::MalformedInput(format!("q is not a decimal integer: {q}")))?;
    if !is_probable_prime(&q) {
        return Err(Error::InvalidCurve(format!("q = {q} is not prime")));
    }
    Ok(q)
}

fn require_valid_n(n: usize) -> Result<()> {
    let prime = n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
    if n == 2 || prime {
        Ok(())
    } else {
        Err(Error::InvalidCurve(format!("n = {n} must be a prime or 2")))
    }
}

/// Reduces a signed integer into the canonical range [0, q).
pub(crate) fn reduce(v: &BigInt, q: &BigUint) -> BigUint {
    let m = BigInt::from_biguint(Sign::Plus, q.clone());
    let r = ((v % &m) + &m) % &m;
    r.to_biguint().expect("nonnegative after reduction")
}

fn parse_canonical(s: &str, q: &BigUint, what: &str) -> Result<BigUint> {
    let v: BigUint = s
        .parse()
        .map_err(|_| Error::MalformedInput(format!("{what} coefficient is not decimal: {s}")))?;
    if &v >= q {
        return Err(Error::MalformedInput(format!(
            "{what} coefficient {s} is not reduced modulo q"
        )));
    }
    Ok(v)
}

impl ParamsFile {
    /// Describes validated parameters, computing the content hash.
    fn from_params(params: &CurveParams) -> ParamsFile {
        let q = params.base.order().to_string();
        let f: Vec<String> = params.f.coeffs().iter().map(elem_to_string).collect();
        let modulus: Vec<String> = params
            .ext
            .modulus()
            .expect("extension context")
            .iter()
            .map(elem_to_string)
            .collect();
        let mu = params.ext.kummer_mu().map(elem_to_string);
        let params_id = content_hash(&q, params.genus, params.n, &f, &modulus, mu.as_deref());
        ParamsFile {
            q,
            g: params.genus,
            n: params.n,
            f,
            ext_modulus: modulus,
            kummer_mu: mu,
            params_id,
        }
    }

    /// Validates explicit curve data and produces a file.
    pub fn build(q: &str, g: usize, n: usize, f_ints: &[BigInt]) -> Result<ParamsFile> {
        let q = require_prime_q(q)?;
        require_valid_n(n)?;
        if f_ints.len() != 2 * g + 2 {
            return Err(Error::InvalidCurve(format!(
                "genus {g} needs {} coefficients, got {}",
                2 * g + 2,
                f_ints.len()
            )));
        }
        let base = FieldCtx::prime(q.clone())?;
        let coeffs: Vec<FieldElem> = f_ints
            .iter()
            .map(|v| base.from_biguint(reduce(v, &q)))
            .collect();
        if coeffs.last().map(|c| !base.is_one(c)).unwrap_or(true) {
            return Err(Error::InvalidCurve("f must be monic (leading 1)".into()));
        }
        let f = Poly::from_coeffs(&base, coeffs);
        let mut rng = ChaCha12Rng::seed_from_u64(0x9a7a);
        let params = CurveParams::new(base, n, f, &mut rng)?;
        Ok(ParamsFile::from_params(&params))
    }

    /// Searches for a random squarefree curve of the requested genus.
    pub fn search(q: &str, g: usize, n: usize, seed: u64) -> Result<ParamsFile> {
        let q = require_prime_q(q)?;
        require_valid_n(n)?;
        let base = FieldCtx::prime(q)?;
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        for _ in 0..200 {
            let mut coeffs: Vec<FieldElem> =
                (0..2 * g + 1).map(|_| base.rand_elem(&mut rng)).collect();
            coeffs.push(base.one());
            let f = Poly::from_coeffs(&base, coeffs);
            if let Ok(params) = CurveParams::new(base.clone(), n, f, &mut rng) {
                return Ok(ParamsFile::from_params(&params));
            }
        }
        Err(Error::InvalidCurve(
            "no squarefree curve found in 200 attempts".into(),
        ))
    }

    /// Reconstructs and re-validates the full parameter set.
    pub fn to_params(&self) -> Result<CurveParams> {
        let q = require_prime_q(&self.q)?;
        require_valid_n(self.n)?;
        if self.f.len() != 2 * self.g + 2 {
            return Err(Error::MalformedInput(format!(
                "f has {} coefficients; genus {} needs {}",
                self.f.len(),
                self.g,
                2 * self.g + 2
            )));
        }
        if self.ext_modulus.len() != self.n + 1 {
            return Err(Error::MalformedInput(format!(
                "extension modulus has {} coefficients; degree {} needs {}",
                self.ext_modulus.len(),
                self.n,
                self.n + 1
            )));
        }
        let expected = content_hash(
            &self.q,
            self.g,
            self.n,
            &self.f,
            &self.ext_modulus,
            self.kummer_mu.as_deref(),
        );
        if expected != self.params_id {
            return Err(Error::MalformedInput(
                "params_id does not match the file contents".into(),
            ));
        }
        let base = FieldCtx::prime(q.clone())?;
        let modulus: Vec<FieldElem> = self
            .ext_modulus
            .iter()
            .map(|s| Ok(base.from_biguint(parse_canonical(s, &q, "modulus")?)))
            .collect::<Result<_>>()?;
        let ext = base.extension_with_modulus(modulus)?;
        match (&self.kummer_mu, ext.kummer_mu()) {
            (Some(stated), Some(actual)) if *stated != elem_to_string(actual) => {
                return Err(Error::MalformedInput(
                    "kummer_mu does not match the modulus".into(),
                ));
            }
            (Some(_), None) => {
                return Err(Error::MalformedInput(
                    "kummer_mu stated but the modulus is not a binomial".into(),
                ));
            }
            _ => {}
        }
        let f_coeffs: Vec<FieldElem> = self
            .f
            .iter()
            .map(|s| Ok(base.from_biguint(parse_canonical(s, &q, "f")?)))
            .collect::<Result<_>>()?;
        if f_coeffs.last().map(|c| !base.is_one(c)).unwrap_or(true) {
            return Err(Error::MalformedInput("f must be monic (leading 1)".into()));
        }
        let f = Poly::from_coeffs(&base, f_coeffs);
        let params = CurveParams::with_ext(base, ext, f)?;
        if params.genus != self.g {
            return Err(Error::MalformedInput(format!(
                "deg f implies genus {}, file says {}",
                params.genus, self.g
            )));
        }
        Ok(params)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes") + "\n"
    }
}
