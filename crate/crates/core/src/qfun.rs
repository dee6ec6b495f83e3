//! q-Pochhammer symbols, the Euler function, balanced quantum integers and
//! factorials, and Gaussian binomial coefficients.
//!
//! Conventions:
//!   (a;q)_n   = prod_{j=0}^{n-1} (1 - a q^j)
//!   [m]       = (q^(m/2) - q^(-m/2)) / (q^(1/2) - q^(-1/2))
//!   [l; i]_q  = (q;q)_l / ((q;q)_i (q;q)_{l-i})
//!
//! The balanced quantities live on the q^(1/2) grid; Pochhammer symbols in
//! the plain variable live on the integer grid.

use thiserror::Error;

use crate::series::{SeriesError, TruncatedSeries, TRUNC_EXACT};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QfunError {
    #[error("(1;q)_inf is the zero product and is rejected")]
    DivergentInfiniteProduct,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// A monomial +-q^(halfexp/2): the admissible argument of Pochhammer symbols
/// and the two-variable theta functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignedMonomial {
    pub sign: i8,
    /// Exponent in q^(1/2) units.
    pub halfexp: i64,
}

impl SignedMonomial {
    pub fn new(sign: i8, halfexp: i64) -> Self {
        assert!(sign == 1 || sign == -1);
        Self { sign, halfexp }
    }

    /// +q^k for integer k.
    pub fn q_pow(k: i64) -> Self {
        Self::new(1, 2 * k)
    }

    /// -q^k for integer k.
    pub fn neg_q_pow(k: i64) -> Self {
        Self::new(-1, 2 * k)
    }
}

/// Length argument of [`pochhammer`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PochLength {
    Finite(u64),
    Infinite,
}

/// (a;q)_n for a = +-q^(halfexp/2). Finite lengths produce an exact Laurent
/// polynomial; the infinite product is expanded to `trunc_q` (truncation in
/// integer q units, so coefficients of q^e are exact for e < trunc_q).
pub fn pochhammer(
    a: SignedMonomial,
    n: PochLength,
    trunc_q: i64,
) -> Result<TruncatedSeries, QfunError> {
    let grid: u8 = if a.halfexp % 2 == 0 { 1 } else { 2 };
    let unit = |j: i64| -> (i64, i8) {
        // exponent of -a*q^j in 1/grid units, and its sign
        let half = a.halfexp + 2 * j;
        let e = if grid == 1 { half / 2 } else { half };
        (e, -a.sign)
    };
    match n {
        PochLength::Finite(n) => {
            let mut acc = TruncatedSeries::one(grid);
            for j in 0..n as i64 {
                let (e, s) = unit(j);
                let factor =
                    TruncatedSeries::one(grid).add(&TruncatedSeries::monomial(grid, s, e));
                acc = acc.mul(&factor);
            }
            Ok(acc)
        }
        PochLength::Infinite => {
            if a.sign == 1 && a.halfexp == 0 {
                return Err(QfunError::DivergentInfiniteProduct);
            }
            let trunc = trunc_q * grid as i64;
            let mut acc = TruncatedSeries::one(grid).truncate_to(trunc);
            let mut j = 0i64;
            loop {
                let (e, s) = unit(j);
                if e >= trunc && e > 0 {
                    break;
                }
                if e > 0 {
                    acc = acc.mul_binomial(s, e);
                } else {
                    let factor =
                        TruncatedSeries::one(grid).add(&TruncatedSeries::monomial(grid, s, e));
                    acc = acc.mul(&factor);
                }
                j += 1;
            }
            Ok(acc.truncate_to(trunc))
        }
    }
}

/// (q;q)_n as an exact polynomial on the integer grid.
pub fn pochhammer_q(n: u64) -> TruncatedSeries {
    pochhammer(SignedMonomial::q_pow(1), PochLength::Finite(n), 0)
        .expect("finite product cannot diverge")
}

/// (q;q)_inf expanded to `trunc_q`.
pub fn euler_function(trunc_q: i64) -> TruncatedSeries {
    pochhammer(SignedMonomial::q_pow(1), PochLength::Infinite, trunc_q)
        .expect("a = q converges")
}

/// Independent expansion of (q;q)_inf by the pentagonal number theorem:
/// sum over k of (-1)^k q^(k(3k-1)/2), both signs of k. Serves as the
/// cross-check oracle for [`euler_function`].
pub fn pentagonal_euler(trunc_q: i64) -> TruncatedSeries {
    let mut acc = TruncatedSeries::zero(1, trunc_q);
    let mut k = 1i64;
    acc = acc.add(&TruncatedSeries::one(1).truncate_to(trunc_q));
    loop {
        let g1 = k * (3 * k - 1) / 2;
        let g2 = k * (3 * k + 1) / 2;
        if g1 >= trunc_q && g2 >= trunc_q {
            break;
        }
        let sign: i8 = if k % 2 == 1 { -1 } else { 1 };
        for g in [g1, g2] {
            if g < trunc_q {
                acc = acc.add(&TruncatedSeries::monomial(1, sign, g));
            }
        }
        k += 1;
    }
    acc
}

/// Balanced quantum integer [m] as an exact symmetric Laurent polynomial on
/// the q^(1/2) grid; [0] = 0, [1] = 1.
pub fn quantum_int(m: u64) -> TruncatedSeries {
    if m == 0 {
        return TruncatedSeries::zero(2, TRUNC_EXACT);
    }
    let m = m as i64;
    let coeffs: Vec<i64> = (0..2 * m - 1).map(|i| if i % 2 == 0 { 1 } else { 0 }).collect();
    TruncatedSeries::from_i64(2, -(m - 1), TRUNC_EXACT, &coeffs)
}

/// [m]! = [1][2]...[m], exact on the q^(1/2) grid.
pub fn quantum_factorial(m: u64) -> TruncatedSeries {
    let mut acc = TruncatedSeries::one(2);
    for j in 1..=m {
        acc = acc.mul(&quantum_int(j));
    }
    acc
}

/// Gaussian binomial [l; i]_q = (q;q)_l / ((q;q)_i (q;q)_{l-i}) as an exact
/// polynomial, computed by the division definition (the Pascal recurrence is
/// the test oracle). Out-of-range i returns zero, matching the summation
/// convention used by the bubble expansion reindexings.
pub fn gauss_binom(l: i64, i: i64) -> TruncatedSeries {
    if i < 0 || i > l {
        return TruncatedSeries::zero(1, TRUNC_EXACT);
    }
    let num = pochhammer_q(l as u64);
    let den = pochhammer_q(i as u64).mul(&pochhammer_q((l - i) as u64));
    num.div(&den).expect("Gaussian binomial division is exact")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::agree_up_to;

    fn q() -> SignedMonomial {
        SignedMonomial::q_pow(1)
    }

    #[test]
    fn pochhammer_finite() {
        // (q;q)_2 = (1-q)(1-q^2) = 1 - q - q^2 + q^3
        assert_eq!(
            pochhammer(q(), PochLength::Finite(2), 0).unwrap(),
            TruncatedSeries::from_i64(1, 0, TRUNC_EXACT, &[1, -1, -1, 1])
        );
        // empty product
        assert_eq!(pochhammer(q(), PochLength::Finite(0), 0).unwrap(), TruncatedSeries::one(1));
    }

    #[test]
    fn pochhammer_infinite_pentagonal_window() {
        // 1 - q - q^2 + q^5 + q^7 - q^12 - q^15, frozen from the pentagonal
        // number theorem (exponents k(3k-1)/2 for k = 0, 1, -1, 2, -2, 3, -3)
        let e = euler_function(16);
        let mut expected = TruncatedSeries::zero(1, 16);
        for (c, g) in [(1, 0), (-1, 1), (-1, 2), (1, 5), (1, 7), (-1, 12), (-1, 15)] {
            expected = expected.add(&TruncatedSeries::monomial(1, c, g));
        }
        assert_eq!(e, expected);
        assert_eq!(e, pentagonal_euler(16));
    }

    #[test]
    fn pochhammer_rejects_unit_argument_infinite() {
        assert!(matches!(
            pochhammer(SignedMonomial::q_pow(0), PochLength::Infinite, 10),
            Err(QfunError::DivergentInfiniteProduct)
        ));
        // -q^0 = -1 converges: (-1;q)_inf = 2(-q;q)_inf
        let m = pochhammer(SignedMonomial::new(-1, 0), PochLength::Infinite, 10).unwrap();
        assert_eq!(m.known_coeff(0).unwrap(), 2.into());
    }

    #[test]
    fn quantum_int_small() {
        assert_eq!(quantum_int(0), TruncatedSeries::zero(2, TRUNC_EXACT));
        assert_eq!(quantum_int(1), TruncatedSeries::one(2));
        // [2] = q^{-1/2} + q^{1/2}
        assert_eq!(quantum_int(2), TruncatedSeries::from_i64(2, -1, TRUNC_EXACT, &[1, 0, 1]));
        // [3] = q^{-1} + 1 + q
        assert_eq!(
            quantum_int(3),
            TruncatedSeries::from_i64(2, -2, TRUNC_EXACT, &[1, 0, 1, 0, 1])
        );
    }

    #[test]
    fn gauss_binom_small() {
        assert_eq!(gauss_binom(2, 1), TruncatedSeries::from_i64(1, 0, TRUNC_EXACT, &[1, 1]));
        assert_eq!(gauss_binom(3, 1), TruncatedSeries::from_i64(1, 0, TRUNC_EXACT, &[1, 1, 1]));
        assert_eq!(gauss_binom(5, 0), TruncatedSeries::one(1));
        assert!(gauss_binom(3, 4).is_zero());
        assert!(gauss_binom(3, -1).is_zero());
    }

    #[test]
    fn gauss_binom_pascal_recurrence_and_symmetry() {
        // [l; i] = [l-1; i-1] + q^i [l-1; i], and [l; i] = [l; l-i]
        for l in 1..=30i64 {
            for i in 0..=l {
                let b = gauss_binom(l, i);
                assert_eq!(b, gauss_binom(l, l - i), "symmetry l={l} i={i}");
                if i >= 1 && i <= l - 1 {
                    let rec =
                        gauss_binom(l - 1, i - 1).add(&gauss_binom(l - 1, i).mul_monomial(1, i));
                    assert_eq!(b, rec, "Pascal l={l} i={i}");
                }
                // coefficients of a Gaussian binomial are nonnegative
                assert!(b.coeffs().iter().all(|c| c.sign() != num_bigint::Sign::Minus));
            }
        }
    }

    #[test]
    fn euler_agrees_with_truncated_pentagonal_window() {
        // agree_up_to((q;q)_inf, 1 - q - q^2 + q^5, 4) sees four agreeing
        // coefficients: the next pentagonal exponent is 5
        let window = TruncatedSeries::from_i64(1, 0, 6, &[1, -1, -1, 0, 0, 1]);
        let r = agree_up_to(&euler_function(20), &window, 4).unwrap();
        assert!(r.agreed() && r.agreed_terms >= 4);
    }

    #[test]
    fn quantum_factorial_matches_pochhammer_up_to_monomial() {
        // [m]! = q^{-m(m-1)/4} (q;q)_m / (1-q)^m
        for m in 0..=20u64 {
            let f = quantum_factorial(m);
            let den = pochhammer_q(1).pow(m as u32);
            let p = pochhammer_q(m).div(&den).unwrap();
            if m == 0 {
                assert_eq!(f, TruncatedSeries::one(2));
                continue;
            }
            let r = agree_up_to(&f, &p, 1 + f.coeffs().len() / 2).unwrap();
            assert!(r.agreed(), "m={m}");
            assert!(!r.sign_flip);
        }
    }
}
