//! Ramanujan's two-variable theta function and its false variant at
//! monomial arguments.
//!
//!   f(a,b)   = sum_{i>=0} a^(i(i+1)/2) b^(i(i-1)/2)
//!            + sum_{i>=1} a^(i(i-1)/2) b^(i(i+1)/2)
//!   Psi(a,b) = the same two sums joined by a minus sign.
//!
//! Arguments are restricted to signed monomials +-q^(e/2): every use in the
//! tail identities is such a specialization, and monomial arguments keep the
//! exponent bookkeeping exact.

use thiserror::Error;

use crate::qfun::SignedMonomial;
use crate::series::TruncatedSeries;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThetaError {
    #[error("term exponents do not tend to +infinity for a = {0:?}, b = {1:?}")]
    NonConvergent(SignedMonomial, SignedMonomial),
}

fn check_convergent(a: SignedMonomial, b: SignedMonomial) -> Result<(), ThetaError> {
    // both sub-sums have exponent ~ (ha + hb) i^2 / 2; they escape to
    // +infinity exactly when ha + hb > 0
    if a.halfexp + b.halfexp > 0 {
        Ok(())
    } else {
        Err(ThetaError::NonConvergent(a, b))
    }
}

fn sign_pow(s: i8, e: i64) -> i8 {
    if s == 1 || e % 2 == 0 {
        1
    } else {
        -1
    }
}

/// One of the two sub-sums: sum over i of a^T(i) b^U(i) with T, U triangular
/// exponents, added into `acc` while the term exponent stays below trunc.
fn half_sum(
    a: SignedMonomial,
    b: SignedMonomial,
    start: i64,
    swap: bool,
    trunc_half: i64,
    flip: bool,
    acc: &mut TruncatedSeries,
) {
    let mut i = start;
    loop {
        let (ta, tb) = if swap {
            (i * (i - 1) / 2, i * (i + 1) / 2)
        } else {
            (i * (i + 1) / 2, i * (i - 1) / 2)
        };
        let e_half = a.halfexp * ta + b.halfexp * tb;
        // exponent increments by a.halfexp*(i+1) + b.halfexp*i (or swapped),
        // which is eventually positive since ha + hb > 0; stop once the term
        // is out of window and the increments can only grow
        let growing = a.halfexp * (i + 1) + b.halfexp * i > 0
            && a.halfexp * i + b.halfexp * (i + 1) > 0;
        if e_half >= trunc_half && growing {
            break;
        }
        if e_half < trunc_half {
            let mut s = sign_pow(a.sign, ta) * sign_pow(b.sign, tb);
            if flip {
                s = -s;
            }
            *acc = acc.add(&TruncatedSeries::monomial(2, s, e_half));
        }
        i += 1;
    }
}

/// The general two-variable Ramanujan false theta function Psi(a,b),
/// expanded to `trunc_q` (integer q units).
pub fn false_theta(
    a: SignedMonomial,
    b: SignedMonomial,
    trunc_q: i64,
) -> Result<TruncatedSeries, ThetaError> {
    check_convergent(a, b)?;
    let trunc_half = 2 * trunc_q;
    let mut acc = TruncatedSeries::zero(2, trunc_half);
    half_sum(a, b, 0, false, trunc_half, false, &mut acc);
    half_sum(a, b, 1, true, trunc_half, true, &mut acc);
    Ok(acc.demote_minimal())
}

/// The general two-variable Ramanujan theta function f(a,b), expanded to
/// `trunc_q` (integer q units).
pub fn ramanujan_theta(
    a: SignedMonomial,
    b: SignedMonomial,
    trunc_q: i64,
) -> Result<TruncatedSeries, ThetaError> {
    check_convergent(a, b)?;
    let trunc_half = 2 * trunc_q;
    let mut acc = TruncatedSeries::zero(2, trunc_half);
    half_sum(a, b, 0, false, trunc_half, false, &mut acc);
    half_sum(a, b, 1, true, trunc_half, false, &mut acc);
    Ok(acc.demote_minimal())
}
