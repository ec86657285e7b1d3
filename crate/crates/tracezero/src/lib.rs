//! Optimal-size representation for the trace zero subgroup of the Picard
//! group of an elliptic or hyperelliptic curve over an odd-characteristic
//! prime field.
//!
//! Given a curve `C: y^2 = f(x)` of genus `g` over `F_q` (with `f` monic of
//! degree `2g + 1` and squarefree) and an odd prime extension degree `n`,
//! the trace zero subgroup `T_n` consists of the degree-zero divisor classes
//! `D` over `F_{q^n}` with `D + phi(D) + ... + phi^{n-1}(D) = 0`, where
//! `phi` is the q-power Frobenius. `T_n` has roughly `q^{(n-1)g}` elements,
//! and this crate represents each one in exactly `(n-1) g` coordinates of
//! `F_q` plus one extra bit — the information-theoretic optimum — instead of
//! the `n g` coordinates a Mumford representation costs.
//!
//! The construction: for `D` in `T_n`, the trace relation makes
//! `phi^0(D) + ... + phi^{n-1}(D)` a principal divisor, so it is cut out by
//! a function `h_D = h1(x) + y h2(x)` with *rational* (F_q) coefficients.
//! The compressed form is the coefficient vector of a normalization of
//! `h_D`; decompression recovers `D` up to Frobenius conjugacy by factoring
//! the norm-like polynomial `h1^2 - f h2^2` and matching roots of `y`-values
//! back onto the curve.
//!
//! Modules:
//! - [`fields`]: prime fields and extension towers with Frobenius and roots.
//! - [`poly`]: univariate polynomial arithmetic and factoring over those fields.
//! - [`picard`]: Mumford divisors, Cantor composition, group orders.
//! - [`funcs`]: the functions `h_D` (several evaluation strategies).
//! - [`codec`]: compression and decompression between divisors and coordinates.
//! - [`explicit`]: closed-form formulas for small `(g, n)` with operation counts.

pub mod error;
pub mod fields;
pub mod poly;
pub mod picard;
pub mod funcs;
pub mod codec;
pub mod explicit;

pub use error::{Error, Result};
