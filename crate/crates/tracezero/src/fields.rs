//! Prime fields `F_q` (q an odd prime) and extension towers built on them.
//!
//! A [`FieldCtx`] describes a field; a [`FieldElem`] is a plain value whose
//! meaning is given by the context it is used with. Extensions are
//! represented in the power basis of a monic irreducible modulus, so an
//! element of `F_{q^n}` is the coefficient vector `(a_0, ..., a_{n-1})` of
//! `a_0 + a_1 z + ... + a_{n-1} z^{n-1}`. Extensions of extensions are
//! allowed; they serve as work fields `F_{q^{n k}} = F_{q^n}[x]/U(x)` during
//! decompression.
//!
//! Contexts are immutable after construction and cheap to clone (shared via
//! `Arc`); elements are immutable values. Mixing elements across contexts is
//! a programming error and panics; data-dependent failures (inverting zero,
//! taking the root of a non-residue) are reported through return values.

use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};

/// An element of a field described by some [`FieldCtx`].
///
/// `Prime` holds a canonical residue in `[0, q)`. `Ext` holds exactly
/// `degree` coefficients over the base field, low power first (so the vector
/// is always full length, never trimmed).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldElem {
    Prime(BigUint),
    Ext(Vec<FieldElem>),
}

enum Kind {
    Prime {
        q: BigUint,
    },
    Ext {
        base: FieldCtx,
        degree: usize,
        /// Monic modulus, `degree + 1` coefficients over the base field,
        /// low power first.
        modulus: Vec<FieldElem>,
        /// `Some(mu)` iff the modulus is `z^degree - mu` and
        /// `degree | |base| - 1` (a Kummer extension).
        kummer_mu: Option<FieldElem>,
        /// Matrix of the map `x -> x^p` on the power basis, where `p` is the
        /// order of the *base* field; computed lazily. Column `j` holds the
        /// coordinates of `frobenius(basis_j)`.
        frobenius: OnceLock<Vec<Vec<FieldElem>>>,
        order: BigUint,
        characteristic: BigUint,
    },
}

/// A field: either a prime field or an extension of another field context.
#[derive(Clone)]
pub struct FieldCtx(Arc<Kind>);

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Kind::Prime { q } => write!(f, "F_{q}"),
            Kind::Ext { base, degree, .. } => write!(f, "({base:?})^{degree}"),
        }
    }
}

impl PartialEq for FieldCtx {
    /// Structural equality: same order and same modulus chain. Contexts
    /// built independently with identical moduli compare equal.
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        match (&*self.0, &*other.0) {
            (Kind::Prime { q: a }, Kind::Prime { q: b }) => a == b,
            (
                Kind::Ext { base: b1, degree: d1, modulus: m1, .. },
                Kind::Ext { base: b2, degree: d2, modulus: m2, .. },
            ) => d1 == d2 && m1 == m2 && b1 == b2,
            _ => false,
        }
    }
}
impl Eq for FieldCtx {}

impl FieldCtx {
    // ------------------------------------------------------------------
    // Construction
    // ------------------------------------------------------------------

    /// Builds the prime field `F_q`. `q` must be an odd prime.
    pub fn prime(q: BigUint) -> Result<FieldCtx> {
        if q < BigUint::from(3u32) || q.is_even() {
            return Err(Error::InvalidCurve(format!("{q} is not an odd prime")));
        }
        if !is_probable_prime(&q) {
            return Err(Error::InvalidCurve(format!("{q} is not prime")));
        }
        Ok(FieldCtx(Arc::new(Kind::Prime { q })))
    }

    /// Builds a degree-`n` extension of `self`.
    ///
    /// When `n` divides `|self| - 1` the modulus is the Kummer binomial
    /// `z^n - mu` with `mu` the smallest n-th non-residue (scanning small
    /// integers first, then random elements, so prime-field constructions
    /// are reproducible). Otherwise random monic polynomials are sampled
    /// from `rng` and tested for irreducibility.
    pub fn extension(&self, n: usize, rng: &mut dyn RngCore) -> Result<FieldCtx> {
        if n < 2 {
            return Err(Error::InvalidDegree(n));
        }
        let order = self.order();
        let t = order - BigUint::one();
        if (&t % BigUint::from(n)).is_zero() {
            let exp = &t / BigUint::from(n);
            // Smallest-first scan over small integers, then random elements.
            for c in 2u64..=256 {
                let cand = self.from_u64(c);
                if self.is_zero(&cand) {
                    continue;
                }
                if !self.is_one(&self.pow(&cand, &exp)) {
                    let mut modulus = vec![self.neg(&cand)];
                    modulus.extend(std::iter::repeat(self.zero()).take(n - 1));
                    modulus.push(self.one());
                    return self.extension_with_modulus(modulus);
                }
            }
            for _ in 0..4096 {
                let cand = self.rand_elem(rng);
                if self.is_zero(&cand) {
                    continue;
                }
                if !self.is_one(&self.pow(&cand, &exp)) {
                    let mut modulus = vec![self.neg(&cand)];
                    modulus.extend(std::iter::repeat(self.zero()).take(n - 1));
                    modulus.push(self.one());
                    return self.extension_with_modulus(modulus);
                }
            }
            return Err(Error::SamplingExhausted);
        }
        // Random monic irreducible of degree n.
        for _ in 0..4096 {
            let mut modulus: Vec<FieldElem> =
                (0..n).map(|_| self.rand_elem(rng)).collect();
            modulus.push(self.one());
            if vp_is_irreducible(self, &modulus) {
                return self.extension_with_modulus(modulus);
            }
        }
        Err(Error::SamplingExhausted)
    }

    /// Builds an extension with an explicitly given monic irreducible
    /// modulus (`degree + 1` coefficients over `self`, low power first).
    pub fn extension_with_modulus(&self, modulus: Vec<FieldElem>) -> Result<FieldCtx> {
        let n = modulus.len().saturating_sub(1);
        if n < 2 {
            return Err(Error::InvalidDegree(n));
        }
        if !self.is_one(&modulus[n]) {
            return Err(Error::InvalidCurve("extension modulus must be monic".into()));
        }
        if !vp_is_irreducible(self, &modulus) {
            return Err(Error::InvalidCurve("extension modulus is reducible".into()));
        }
        let order = self.order().pow(n as u32);
        // Kummer shape: z^n - mu with n | |base| - 1.
        let binomial = modulus[1..n].iter().all(|c| self.is_zero(c));
        let n_divides = ((self.order() - BigUint::one()) % BigUint::from(n)).is_zero();
        let kummer_mu = if binomial && n_divides {
            Some(self.neg(&modulus[0]))
        } else {
            None
        };
        Ok(FieldCtx(Arc::new(Kind::Ext {
            base: self.clone(),
            degree: n,
            modulus,
            kummer_mu,
            frobenius: OnceLock::new(),
            order,
            characteristic: self.characteristic(),
        })))
    }

    // ------------------------------------------------------------------
    // Introspection
    // ------------------------------------------------------------------

    /// Number of elements of the field.
    pub fn order(&self) -> BigUint {
        match &*self.0 {
            Kind::Prime { q } => q.clone(),
            Kind::Ext { order, .. } => order.clone(),
        }
    }

    /// The characteristic `p` of the field.
    pub fn characteristic(&self) -> BigUint {
        match &*self.0 {
            Kind::Prime { q } => q.clone(),
            Kind::Ext { characteristic, .. } => characteristic.clone(),
        }
    }

    /// Extension degree over the immediate base field (1 for prime fields).
    pub fn degree(&self) -> usize {
        match &*self.0 {
            Kind::Prime { .. } => 1,
            Kind::Ext { degree, .. } => *degree,
        }
    }

    /// The immediate base field, if this is an extension.
    pub fn base(&self) -> Option<&FieldCtx> {
        match &*self.0 {
            Kind::Prime { .. } => None,
            Kind::Ext { base, .. } => Some(base),
        }
    }

    /// The prime field at the bottom of the tower.
    pub fn prime_subfield(&self) -> FieldCtx {
        match &*self.0 {
            Kind::Prime { .. } => self.clone(),
            Kind::Ext { base, .. } => base.prime_subfield(),
        }
    }

    /// The modulus of this extension (low power first), if any.
    pub fn modulus(&self) -> Option<&[FieldElem]> {
        match &*self.0 {
            Kind::Prime { .. } => None,
            Kind::Ext { modulus, .. } => Some(modulus),
        }
    }

    /// The Kummer constant `mu` when the modulus is `z^n - mu`.
    pub fn kummer_mu(&self) -> Option<&FieldElem> {
        match &*self.0 {
            Kind::Prime { .. } => None,
            Kind::Ext { kummer_mu, .. } => kummer_mu.as_ref(),
        }
    }

    /// Bit length of the prime `q` at the bottom of the tower.
    pub fn prime_bit_len(&self) -> u64 {
        self.prime_subfield().order().bits()
    }

    /// Fixed serialization width in bytes of one prime-field coordinate.
    pub fn coord_byte_width(&self) -> usize {
        ((self.prime_bit_len() + 7) / 8) as usize
    }

    // ------------------------------------------------------------------
    // Element constructors
    // ------------------------------------------------------------------

    pub fn zero(&self) -> FieldElem {
        match &*self.0 {
            Kind::Prime { .. } => FieldElem::Prime(BigUint::zero()),
            Kind::Ext { base, degree, .. } => {
                FieldElem::Ext(vec![base.zero(); *degree])
            }
        }
    }

    pub fn one(&self) -> FieldElem {
        self.from_u64(1)
    }

    /// The image of the integer `v` under the canonical map `Z -> F`.
    pub fn from_u64(&self, v: u64) -> FieldElem {
        self.from_biguint(BigUint::from(v))
    }

    /// The image of the non-negative integer `v` under `Z -> F`.
    pub fn from_biguint(&self, v: BigUint) -> FieldElem {
        match &*self.0 {
            Kind::Prime { q } => FieldElem::Prime(v % q),
            Kind::Ext { base, .. } => self.embed(&base.from_biguint(v)),
        }
    }

    /// The image of a possibly negative integer under `Z -> F`.
    pub fn from_i64(&self, v: i64) -> FieldElem {
        if v >= 0 {
            self.from_u64(v as u64)
        } else {
            self.neg(&self.from_u64(v.unsigned_abs()))
        }
    }

    /// Lifts an element of the immediate base field into this extension.
    pub fn embed(&self, e: &FieldElem) -> FieldElem {
        match &*self.0 {
            Kind::Prime { .. } => panic!("embed called on prime context"),
            Kind::Ext { base, degree, .. } => {
                let mut coeffs = vec![base.zero(); *degree];
                coeffs[0] = e.clone();
                FieldElem::Ext(coeffs)
            }
        }
    }

    /// Projects an extension element back to the immediate base field, if
    /// all higher coordinates vanish.
    pub fn project(&self, e: &FieldElem) -> Option<FieldElem> {
        match (&*self.0, e) {
            (Kind::Ext { base, .. }, FieldElem::Ext(coeffs)) => {
                if coeffs[1..].iter().all(|c| base.is_zero(c)) {
                    Some(coeffs[0].clone())
                } else {
                    None
                }
            }
            _ => panic!("project called on prime context"),
        }
    }

    /// Uniform random element.
    pub fn rand_elem(&self, rng: &mut dyn RngCore) -> FieldElem {
        match &*self.0 {
            Kind::Prime { q } => FieldElem::Prime(rng.gen_biguint_below(q)),
            Kind::Ext { base, degree, .. } => {
                FieldElem::Ext((0..*degree).map(|_| base.rand_elem(rng)).collect())
            }
        }
    }

    /// The element with mixed-radix index `idx` (for exhaustive small-field
    /// enumeration); `idx` must be below the field order.
    pub fn elem_from_index(&self, idx: &BigUint) -> FieldElem {
        match &*self.0 {
            Kind::Prime { .. } => FieldElem::Prime(idx.clone()),
            Kind::Ext { base, degree, .. } => {
                let b = base.order();
                let mut rest = idx.clone();
                let mut coeffs = Vec::with_capacity(*degree);
                for _ in 0..*degree {
                    let (q, r) = rest.div_rem(&b);
                    coeffs.push(base.elem_from_index(&r));
                    rest = q;
                }
                FieldElem::Ext(coeffs)
            }
        }
    }

    // ------------------------------------------------------------------
    // Arithmetic
    // ------------------------------------------------------------------

    pub fn is_zero(&self, a: &FieldElem) -> bool {
        match a {
            FieldElem::Prime(v) => v.is_zero(),
            FieldElem::Ext(coeffs) => {
                let base = self.base().expect("ext element in prime context");
                coeffs.iter().all(|c| base.is_zero(c))
            }
        }
    }

    pub fn is_one(&self, a: &FieldElem) -> bool {
        *a == self.one()
    }

    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        match (&*self.0, a, b) {
            (Kind::Prime { q }, FieldElem::Prime(x), FieldElem::Prime(y)) => {
                let mut s = x + y;
                if s >= *q {
                    s -= q;
                }
                FieldElem::Prime(s)
            }
            (Kind::Ext { base, .. }, FieldElem::Ext(x), FieldElem::Ext(y)) => {
                FieldElem::Ext(
                    x.iter().zip(y.iter()).map(|(p, r)| base.add(p, r)).collect(),
                )
            }
            _ => panic!("element shape does not match field context"),
        }
    }

    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        self.add(a, &self.neg(b))
    }

    pub fn neg(&self, a: &FieldElem) -> FieldElem {
        match (&*self.0, a) {
            (Kind::Prime { q }, FieldElem::Prime(x)) => {
                if x.is_zero() {
                    FieldElem::Prime(BigUint::zero())
                } else {
                    FieldElem::Prime(q - x)
                }
            }
            (Kind::Ext { base, .. }, FieldElem::Ext(x)) => {
                FieldElem::Ext(x.iter().map(|c| base.neg(c)).collect())
            }
            _ => panic!("element shape does not match field context"),
        }
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        match (&*self.0, a, b) {
            (Kind::Prime { q }, FieldElem::Prime(x), FieldElem::Prime(y)) => {
                FieldElem::Prime((x * y) % q)
            }
            (Kind::Ext { base, degree, modulus, kummer_mu, .. }, FieldElem::Ext(x), FieldElem::Ext(y)) => {
                let n = *degree;
                // Schoolbook convolution; degrees in play are tiny.
                let mut prod = vec![base.zero(); 2 * n - 1];
                for (i, xi) in x.iter().enumerate() {
                    if base.is_zero(xi) {
                        continue;
                    }
                    for (j, yj) in y.iter().enumerate() {
                        if base.is_zero(yj) {
                            continue;
                        }
                        prod[i + j] = base.add(&prod[i + j], &base.mul(xi, yj));
                    }
                }
                if let Some(mu) = kummer_mu {
                    // z^n = mu: fold the top half down with one mu-multiply.
                    for i in (n..2 * n - 1).rev() {
                        if !base.is_zero(&prod[i]) {
                            let folded = base.mul(&prod[i], mu);
                            prod[i - n] = base.add(&prod[i - n], &folded);
                        }
                    }
                    prod.truncate(n);
                    FieldElem::Ext(prod)
                } else {
                    vp_rem_in_place(base, &mut prod, modulus);
                    prod.resize(n, base.zero());
                    FieldElem::Ext(prod)
                }
            }
            _ => panic!("element shape does not match field context"),
        }
    }

    pub fn sqr(&self, a: &FieldElem) -> FieldElem {
        self.mul(a, a)
    }

    /// Multiplicative inverse. Errors with [`Error::DivisionByZero`] on 0.
    pub fn inv(&self, a: &FieldElem) -> Result<FieldElem> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        match (&*self.0, a) {
            (Kind::Prime { q }, FieldElem::Prime(x)) => {
                let e = BigInt::from(x.clone()).extended_gcd(&BigInt::from(q.clone()));
                debug_assert!(e.gcd.is_one());
                let qi = BigInt::from(q.clone());
                let r = ((e.x % &qi) + &qi) % &qi;
                Ok(FieldElem::Prime(r.to_biguint().expect("reduced residue")))
            }
            (Kind::Ext { base, degree, modulus, .. }, FieldElem::Ext(x)) => {
                let (g, s, _) = vp_xgcd(base, x, modulus);
                // The modulus is irreducible, so gcd(a, modulus) = 1.
                if vp_deg(base, &g) != Some(0) {
                    return Err(Error::DivisionByZero);
                }
                let ginv = base.inv(&g[0])?;
                let mut out: Vec<FieldElem> =
                    s.iter().map(|c| base.mul(c, &ginv)).collect();
                out.resize(*degree, base.zero());
                Ok(FieldElem::Ext(out))
            }
            _ => panic!("element shape does not match field context"),
        }
    }

    pub fn div(&self, a: &FieldElem, b: &FieldElem) -> Result<FieldElem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// `a^e` by square-and-multiply over the bits of `e`.
    pub fn pow(&self, a: &FieldElem, e: &BigUint) -> FieldElem {
        if e.is_zero() {
            return self.one();
        }
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.sqr(&acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    // ------------------------------------------------------------------
    // Frobenius
    // ------------------------------------------------------------------

    /// Applies `x -> x^{p^j}` where `p = |base|` (so for `F_{q^n}` over the
    /// prime field this is the q-power Frobenius iterated `j` times).
    /// Realized by a precomputed matrix on the power basis; this requires
    /// the base-field coefficients to be Frobenius-fixed, so it is only
    /// available on extensions whose base is the prime field.
    pub fn frobenius(&self, a: &FieldElem, j: usize) -> FieldElem {
        let n = self.degree();
        let j = j % n;
        if j == 0 {
            return a.clone();
        }
        let m = self.frobenius_matrix();
        let mut out = a.clone();
        for _ in 0..j {
            out = self.apply_matrix(m, &out);
        }
        out
    }

    /// Frobenius by direct exponentiation `a^{p^j}`; used to cross-check the
    /// matrix implementation.
    pub fn frobenius_pow(&self, a: &FieldElem, j: usize) -> FieldElem {
        let base = self.base().expect("frobenius on prime context is identity");
        let p = base.order();
        let mut out = a.clone();
        for _ in 0..(j % self.degree()) {
            out = self.pow(&out, &p);
        }
        out
    }

    fn frobenius_matrix(&self) -> &Vec<Vec<FieldElem>> {
        match &*self.0 {
            Kind::Ext { base, degree, modulus, frobenius, .. } => {
                assert!(
                    base.degree() == 1,
                    "frobenius matrix requires a prime base field"
                );
                frobenius.get_or_init(|| {
                    let n = *degree;
                    // z^p mod modulus, then its powers give the basis images.
                    let x = vec![base.zero(), base.one()];
                    let zp = vp_powmod(base, &x, &base.order(), modulus);
                    let mut cols: Vec<Vec<FieldElem>> = Vec::with_capacity(n);
                    let mut cur = vec![base.one()];
                    for _ in 0..n {
                        let mut padded = cur.clone();
                        padded.resize(n, base.zero());
                        cols.push(padded);
                        cur = vp_mulmod(base, &cur, &zp, modulus);
                    }
                    // Transpose columns into row-major form.
                    (0..n)
                        .map(|i| (0..n).map(|j| cols[j][i].clone()).collect())
                        .collect()
                })
            }
            Kind::Prime { .. } => panic!("frobenius matrix on prime context"),
        }
    }

    fn apply_matrix(&self, m: &[Vec<FieldElem>], a: &FieldElem) -> FieldElem {
        match (&*self.0, a) {
            (Kind::Ext { base, degree, .. }, FieldElem::Ext(coeffs)) => {
                let mut out = Vec::with_capacity(*degree);
                for row in m.iter() {
                    let mut acc = base.zero();
                    for (mij, aj) in row.iter().zip(coeffs.iter()) {
                        if !base.is_zero(mij) && !base.is_zero(aj) {
                            acc = base.add(&acc, &base.mul(mij, aj));
                        }
                    }
                    out.push(acc);
                }
                FieldElem::Ext(out)
            }
            _ => panic!("element shape does not match field context"),
        }
    }

    // ------------------------------------------------------------------
    // Roots
    // ------------------------------------------------------------------

    /// `a^{(|F|-1)/2}` collapsed to {-1, 0, 1}: 1 for nonzero squares, -1
    /// for non-squares, 0 for zero.
    pub fn legendre(&self, a: &FieldElem) -> i8 {
        if self.is_zero(a) {
            return 0;
        }
        let e = (self.order() - BigUint::one()) >> 1;
        let p = self.pow(a, &e);
        if self.is_one(&p) {
            1
        } else {
            -1
        }
    }

    /// Canonical square root: the smaller of the two roots in the canonical
    /// element order, or `None` for non-residues. Deterministic.
    pub fn sqrt(&self, a: &FieldElem) -> Option<FieldElem> {
        let mut rng = self.derived_rng(b"sqrt");
        self.sqrt_with_rng(a, &mut rng)
    }

    /// Square root using the supplied randomness source for the
    /// non-residue search. The returned root is still canonical (the
    /// smaller of the pair), so the result does not depend on `rng`.
    pub fn sqrt_with_rng(&self, a: &FieldElem, rng: &mut dyn RngCore) -> Option<FieldElem> {
        let r = self.root_r(a, 2, rng)?;
        let neg = self.neg(&r);
        Some(if elem_cmp(&r, &neg) == Ordering::Greater { neg } else { r })
    }

    /// All cube roots of `a`, canonically sorted. The set has size 1 when
    /// cubing is a bijection (`3` coprime to `|F| - 1`), otherwise 0 or 3.
    pub fn cube_roots(&self, a: &FieldElem) -> Vec<FieldElem> {
        let mut rng = self.derived_rng(b"cbrt");
        self.cube_roots_with_rng(a, &mut rng)
    }

    /// Cube roots using the supplied randomness source; output is sorted
    /// canonically and therefore independent of `rng`.
    pub fn cube_roots_with_rng(&self, a: &FieldElem, rng: &mut dyn RngCore) -> Vec<FieldElem> {
        let Some(r) = self.root_r(a, 3, rng) else {
            return Vec::new();
        };
        if self.is_zero(a) {
            return vec![r];
        }
        let t = self.order() - BigUint::one();
        if (&t % BigUint::from(3u32)).is_zero() {
            let omega = self.unity_root_3(rng);
            let mut roots = vec![
                r.clone(),
                self.mul(&r, &omega),
                self.mul(&r, &self.sqr(&omega)),
            ];
            roots.sort_by(elem_cmp);
            roots
        } else {
            vec![r]
        }
    }

    /// A fixed primitive cube root of unity (requires `3 | |F| - 1`).
    fn unity_root_3(&self, rng: &mut dyn RngCore) -> FieldElem {
        let t = self.order() - BigUint::one();
        let exp = &t / BigUint::from(3u32);
        let eta = self.find_nonresidue(3, rng);
        self.pow(&eta, &exp)
    }

    /// Unified r-th root for prime r (Adleman–Manders–Miller). Returns one
    /// root or `None` if `a` is not an r-th power. The root choice is a
    /// deterministic function of `a` (not of `rng`): when several roots
    /// exist they differ by roots of unity and the caller canonicalizes.
    fn root_r(&self, a: &FieldElem, r: u32, rng: &mut dyn RngCore) -> Option<FieldElem> {
        if self.is_zero(a) {
            return Some(self.zero());
        }
        let order = self.order();
        let rb = BigUint::from(r);
        if self.characteristic() == rb {
            // x -> x^r is the absolute Frobenius, a bijection.
            return Some(self.pow(a, &(&order / &rb)));
        }
        let t = &order - BigUint::one();
        if !(&t % &rb).is_zero() {
            // r-th powering is a bijection: invert the exponent.
            let d = mod_inverse_u(&rb, &t).expect("gcd(r, t) = 1");
            return Some(self.pow(a, &d));
        }
        // Residue test.
        if !self.is_one(&self.pow(a, &(&t / &rb))) {
            return None;
        }
        // Fast path: square roots with q = 3 mod 4.
        if r == 2 && (&order % BigUint::from(4u32)) == BigUint::from(3u32) {
            let x = self.pow(a, &((&order + BigUint::one()) >> 2));
            debug_assert_eq!(self.sqr(&x), *a);
            return Some(x);
        }
        // Write |F| - 1 = r^s * m with r not dividing m.
        let mut s = 0u32;
        let mut m = t.clone();
        while (&m % &rb).is_zero() {
            m /= &rb;
            s += 1;
        }
        let eta = self.find_nonresidue(r, rng);
        let g = self.pow(&eta, &m); // order r^s
        let ginv = self.inv(&g).expect("nonzero");
        // Pohlig-Hellman digits of e where a^m = g^e.
        let b = self.pow(a, &m);
        let step = self.pow(&g, &rb.pow(s - 1)); // order r
        let mut table = Vec::with_capacity(r as usize);
        let mut acc = self.one();
        for _ in 0..r {
            table.push(acc.clone());
            acc = self.mul(&acc, &step);
        }
        let mut e = BigUint::zero();
        let mut cur = b;
        for i in 0..s {
            let c = self.pow(&cur, &rb.pow(s - 1 - i));
            let digit = table
                .iter()
                .position(|x| *x == c)
                .expect("element lies in the cyclic r-group") as u32;
            if digit != 0 {
                let delta = BigUint::from(digit) * rb.pow(i);
                cur = self.mul(&cur, &self.pow(&ginv, &delta));
                e += delta;
            }
        }
        if !(&e % &rb).is_zero() {
            return None;
        }
        let y = self.pow(&g, &(&e / &rb));
        if m.is_one() {
            debug_assert_eq!(self.pow(&y, &rb.into()), *a);
            return Some(y);
        }
        // rd = 1 + km over the integers; x = a^d * y^{-k}.
        let d = mod_inverse_u(&rb, &m).expect("gcd(r, m) = 1");
        let k = (&d * &rb - BigUint::one()) / &m;
        let x = self.mul(
            &self.pow(a, &d),
            &self.inv(&self.pow(&y, &k)).expect("nonzero"),
        );
        debug_assert_eq!(self.pow(&x, &rb.into()), *a);
        Some(x)
    }

    /// Finds an r-th non-residue: small integers first (reproducible in
    /// prime fields), then random elements (required in extensions, where
    /// every base-field element may be an r-th power).
    fn find_nonresidue(&self, r: u32, rng: &mut dyn RngCore) -> FieldElem {
        let t = self.order() - BigUint::one();
        let exp = &t / BigUint::from(r);
        for c in 2u64..=64 {
            let cand = self.from_u64(c);
            if !self.is_zero(&cand) && !self.is_one(&self.pow(&cand, &exp)) {
                return cand;
            }
        }
        loop {
            let cand = self.rand_elem(rng);
            if !self.is_zero(&cand) && !self.is_one(&self.pow(&cand, &exp)) {
                return cand;
            }
        }
    }

    /// Deterministic per-field randomness for the convenience entry points.
    fn derived_rng(&self, label: &[u8]) -> ChaCha12Rng {
        let mut seed = [0u8; 32];
        let bytes = self.order().to_bytes_be();
        for (i, b) in bytes.iter().chain(label.iter()).enumerate() {
            seed[i % 32] ^= b.rotate_left((i / 32) as u32 % 8);
        }
        ChaCha12Rng::from_seed(seed)
    }

    // ------------------------------------------------------------------
    // Serialization
    // ------------------------------------------------------------------

    /// Fixed-width big-endian encoding: each prime-field coordinate uses
    /// [`FieldCtx::coord_byte_width`] bytes; extension coordinates appear
    /// in ascending power order.
    pub fn elem_to_bytes(&self, a: &FieldElem) -> Vec<u8> {
        let w = self.coord_byte_width();
        let mut out = Vec::new();
        fn rec(a: &FieldElem, w: usize, out: &mut Vec<u8>) {
            match a {
                FieldElem::Prime(v) => {
                    let b = v.to_bytes_be();
                    assert!(b.len() <= w || v.is_zero());
                    out.extend(std::iter::repeat(0u8).take(w - b.len().min(w)));
                    out.extend_from_slice(&b[..]);
                }
                FieldElem::Ext(coeffs) => {
                    for c in coeffs {
                        rec(c, w, out);
                    }
                }
            }
        }
        rec(a, w, &mut out);
        out
    }

    /// Inverse of [`FieldCtx::elem_to_bytes`]; validates every coordinate
    /// against the prime modulus.
    pub fn elem_from_bytes(&self, bytes: &[u8]) -> Result<FieldElem> {
        let w = self.coord_byte_width();
        let n_coords = self.coords_per_elem();
        if bytes.len() != w * n_coords {
            return Err(Error::MalformedInput(format!(
                "expected {} bytes for one field element, got {}",
                w * n_coords,
                bytes.len()
            )));
        }
        let q = self.prime_subfield().order();
        let mut coords = Vec::with_capacity(n_coords);
        for chunk in bytes.chunks(w) {
            let v = BigUint::from_bytes_be(chunk);
            if v >= q {
                return Err(Error::MalformedInput(
                    "coordinate out of range (not a canonical residue)".into(),
                ));
            }
            coords.push(FieldElem::Prime(v));
        }
        Ok(self.elem_from_coords(&mut coords.into_iter()))
    }

    /// Number of prime-field coordinates of one element of this field.
    pub fn coords_per_elem(&self) -> usize {
        match &*self.0 {
            Kind::Prime { .. } => 1,
            Kind::Ext { base, degree, .. } => degree * base.coords_per_elem(),
        }
    }

    fn elem_from_coords(&self, it: &mut impl Iterator<Item = FieldElem>) -> FieldElem {
        match &*self.0 {
            Kind::Prime { .. } => it.next().expect("length checked"),
            Kind::Ext { base, degree, .. } => {
                FieldElem::Ext((0..*degree).map(|_| base.elem_from_coords(it)).collect())
            }
        }
    }
}

/// Total order on canonical elements: prime residues by value, extension
/// elements lexicographically from the highest coordinate down (so "small"
/// constants embed as small elements).
pub fn elem_cmp(a: &FieldElem, b: &FieldElem) -> Ordering {
    match (a, b) {
        (FieldElem::Prime(x), FieldElem::Prime(y)) => x.cmp(y),
        (FieldElem::Ext(x), FieldElem::Ext(y)) => {
            for (p, r) in x.iter().rev().zip(y.iter().rev()) {
                let c = elem_cmp(p, r);
                if c != Ordering::Equal {
                    return c;
                }
            }
            Ordering::Equal
        }
        _ => panic!("cannot compare elements of different shapes"),
    }
}

/// Human-readable form: prime residues in decimal, extension elements as
/// comma-separated coordinates in ascending power order.
pub fn elem_to_string(a: &FieldElem) -> String {
    match a {
        FieldElem::Prime(v) => v.to_string(),
        FieldElem::Ext(coeffs) => coeffs
            .iter()
            .map(elem_to_string)
            .collect::<Vec<_>>()
            .join(","),
    }
}

/// `r^{-1} mod m` for unsigned inputs, `None` if not coprime.
fn mod_inverse_u(r: &BigUint, m: &BigUint) -> Option<BigUint> {
    if m.is_one() {
        return Some(BigUint::zero());
    }
    let e = BigInt::from(r.clone()).extended_gcd(&BigInt::from(m.clone()));
    if !e.gcd.is_one() {
        return None;
    }
    let mi = BigInt::from(m.clone());
    let x = ((e.x % &mi) + &mi) % &mi;
    Some(x.to_biguint().expect("reduced"))
}

// ----------------------------------------------------------------------
// Miller-Rabin primality
// ----------------------------------------------------------------------

/// Deterministic for n below 3.3 * 10^24 (fixed witness set), probabilistic
/// with additional derived witnesses above.
pub fn is_probable_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let pb = BigUint::from(p);
        if *n == pb {
            return true;
        }
        if (n % pb).is_zero() {
            return false;
        }
    }
    let n_minus_1 = n - BigUint::one();
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let mut witnesses: Vec<BigUint> = [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]
        .iter()
        .map(|&w| BigUint::from(w))
        .collect();
    if n.bits() > 81 {
        let mut seed = [0u8; 32];
        for (i, b) in n.to_bytes_be().iter().enumerate() {
            seed[i % 32] ^= b;
        }
        let mut rng = ChaCha12Rng::from_seed(seed);
        for _ in 0..16 {
            witnesses.push(rng.gen_biguint_range(&two, &n_minus_1));
        }
    }
    'next_witness: for a in witnesses {
        let a = a % n;
        if a.is_zero() || a.is_one() {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'next_witness;
            }
        }
        return false;
    }
    true
}

// ----------------------------------------------------------------------
// Minimal polynomial arithmetic over coefficient vectors.
//
// Used only for extension construction (irreducibility, Frobenius matrix)
// and extension-element inversion; the full polynomial toolkit lives in the
// `poly` module, which depends on this one.
// ----------------------------------------------------------------------

fn vp_deg(base: &FieldCtx, a: &[FieldElem]) -> Option<usize> {
    a.iter().rposition(|c| !base.is_zero(c))
}

fn vp_trim(base: &FieldCtx, a: &mut Vec<FieldElem>) {
    while let Some(last) = a.last() {
        if base.is_zero(last) {
            a.pop();
        } else {
            break;
        }
    }
}

/// Reduces `a` modulo the monic polynomial `m` in place.
fn vp_rem_in_place(base: &FieldCtx, a: &mut Vec<FieldElem>, m: &[FieldElem]) {
    let dm = vp_deg(base, m).expect("nonzero modulus");
    loop {
        vp_trim(base, a);
        let Some(da) = vp_deg(base, a) else { return };
        if da < dm {
            return;
        }
        let lead = a[da].clone();
        let shift = da - dm;
        for (i, mi) in m.iter().enumerate().take(dm + 1) {
            if !base.is_zero(mi) {
                let t = base.mul(&lead, mi);
                a[i + shift] = base.sub(&a[i + shift], &t);
            }
        }
    }
}

fn vp_mulmod(
    base: &FieldCtx,
    a: &[FieldElem],
    b: &[FieldElem],
    m: &[FieldElem],
) -> Vec<FieldElem> {
    let (Some(da), Some(db)) = (vp_deg(base, a), vp_deg(base, b)) else {
        return Vec::new();
    };
    let mut prod = vec![base.zero(); da + db + 1];
    for (i, ai) in a.iter().enumerate().take(da + 1) {
        if base.is_zero(ai) {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(db + 1) {
            if !base.is_zero(bj) {
                prod[i + j] = base.add(&prod[i + j], &base.mul(ai, bj));
            }
        }
    }
    vp_rem_in_place(base, &mut prod, m);
    prod
}

fn vp_powmod(
    base: &FieldCtx,
    a: &[FieldElem],
    e: &BigUint,
    m: &[FieldElem],
) -> Vec<FieldElem> {
    let mut acc = vec![base.one()];
    if e.is_zero() {
        return acc;
    }
    for i in (0..e.bits()).rev() {
        acc = vp_mulmod(base, &acc, &acc, m);
        if e.bit(i) {
            acc = vp_mulmod(base, &acc, a, m);
        }
    }
    acc
}

fn vp_monic(base: &FieldCtx, a: &mut Vec<FieldElem>) {
    vp_trim(base, a);
    if let Some(d) = vp_deg(base, a) {
        if !base.is_one(&a[d]) {
            let inv = base.inv(&a[d]).expect("leading coefficient nonzero");
            for c in a.iter_mut() {
                *c = base.mul(c, &inv);
            }
        }
    }
}

fn vp_gcd(base: &FieldCtx, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    vp_trim(base, &mut x);
    vp_trim(base, &mut y);
    while !y.is_empty() {
        let m = {
            let mut t = y.clone();
            vp_monic(base, &mut t);
            t
        };
        vp_rem_in_place(base, &mut x, &m);
        vp_trim(base, &mut x);
        std::mem::swap(&mut x, &mut y);
    }
    vp_monic(base, &mut x);
    x
}

/// Extended gcd: returns `(g, s, t)` with `s a + t b = g`.
fn vp_xgcd(
    base: &FieldCtx,
    a: &[FieldElem],
    b: &[FieldElem],
) -> (Vec<FieldElem>, Vec<FieldElem>, Vec<FieldElem>) {
    let mut r0 = a.to_vec();
    let mut r1 = b.to_vec();
    vp_trim(base, &mut r0);
    vp_trim(base, &mut r1);
    let mut s0 = vec![base.one()];
    let mut s1 = Vec::new();
    let mut t0 = Vec::new();
    let mut t1 = vec![base.one()];
    while !r1.is_empty() {
        let (q, r) = vp_divrem(base, &r0, &r1);
        r0 = std::mem::replace(&mut r1, r);
        let qs = vp_mul(base, &q, &s1);
        let s_new = vp_sub(base, &s0, &qs);
        s0 = std::mem::replace(&mut s1, s_new);
        let qt = vp_mul(base, &q, &t1);
        let t_new = vp_sub(base, &t0, &qt);
        t0 = std::mem::replace(&mut t1, t_new);
    }
    (r0, s0, t0)
}

fn vp_mul(base: &FieldCtx, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    let (Some(da), Some(db)) = (vp_deg(base, a), vp_deg(base, b)) else {
        return Vec::new();
    };
    let mut prod = vec![base.zero(); da + db + 1];
    for (i, ai) in a.iter().enumerate().take(da + 1) {
        if base.is_zero(ai) {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(db + 1) {
            if !base.is_zero(bj) {
                prod[i + j] = base.add(&prod[i + j], &base.mul(ai, bj));
            }
        }
    }
    prod
}

fn vp_sub(base: &FieldCtx, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    let len = a.len().max(b.len());
    let mut out = Vec::with_capacity(len);
    for i in 0..len {
        let x = a.get(i).cloned().unwrap_or_else(|| base.zero());
        let y = b.get(i).cloned().unwrap_or_else(|| base.zero());
        out.push(base.sub(&x, &y));
    }
    vp_trim(base, &mut out);
    out
}

fn vp_divrem(
    base: &FieldCtx,
    a: &[FieldElem],
    b: &[FieldElem],
) -> (Vec<FieldElem>, Vec<FieldElem>) {
    let db = vp_deg(base, b).expect("division by zero polynomial");
    let binv = base.inv(&b[db]).expect("nonzero leading coefficient");
    let mut rem = a.to_vec();
    vp_trim(base, &mut rem);
    let mut quot = vec![base.zero(); rem.len().saturating_sub(db)];
    loop {
        let Some(da) = vp_deg(base, &rem) else { break };
        if da < db {
            break;
        }
        let c = base.mul(&rem[da], &binv);
        let shift = da - db;
        quot[shift] = c.clone();
        for (i, bi) in b.iter().enumerate().take(db + 1) {
            if !base.is_zero(bi) {
                let t = base.mul(&c, bi);
                rem[i + shift] = base.sub(&rem[i + shift], &t);
            }
        }
        vp_trim(base, &mut rem);
    }
    vp_trim(base, &mut quot);
    (quot, rem)
}

/// Irreducibility of a monic polynomial over any field context: `f` of
/// degree `k` is irreducible iff `x^{Q^k} = x mod f` and, for every prime
/// `p | k`, `gcd(x^{Q^{k/p}} - x, f) = 1`.
fn vp_is_irreducible(base: &FieldCtx, f: &[FieldElem]) -> bool {
    let Some(k) = vp_deg(base, f) else { return false };
    if k == 0 {
        return false;
    }
    if k == 1 {
        return true;
    }
    let q = base.order();
    let x = vec![base.zero(), base.one()];
    // Iterated q-power images of x modulo f.
    let mut pow_images = Vec::with_capacity(k + 1);
    pow_images.push(x.clone());
    for _ in 0..k {
        let prev = pow_images.last().unwrap();
        pow_images.push(vp_powmod(base, prev, &q, f));
    }
    // x^{Q^k} = x mod f.
    let mut top = pow_images[k].clone();
    vp_trim(base, &mut top);
    let mut xx = x.clone();
    vp_trim(base, &mut xx);
    if top != xx {
        return false;
    }
    // No factors of degree k/p for prime p | k.
    let mut rem = k;
    let mut p = 2;
    let mut primes = Vec::new();
    while p * p <= rem {
        if rem % p == 0 {
            primes.push(p);
            while rem % p == 0 {
                rem /= p;
            }
        }
        p += 1;
    }
    if rem > 1 {
        primes.push(rem);
    }
    for p in primes {
        let diff = vp_sub(base, &pow_images[k / p], &x);
        let g = vp_gcd(base, &diff, f);
        if vp_deg(base, &g) != Some(0) {
            return false;
        }
    }
    true
}
