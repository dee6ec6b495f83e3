//! Exact truncated Laurent series in q on a fractional exponent grid.
//!
//! A [`TruncatedSeries`] stores arbitrary-precision integer coefficients of
//! q^(e/grid) for consecutive e starting at `offset`, and is known exactly
//! for every exponent strictly below `trunc` (both in 1/grid units, with
//! grid in {1, 2, 4}: the q, q^(1/2) and q^(1/4) grids). Exact Laurent
//! polynomials carry the sentinel truncation [`TRUNC_EXACT`].
//!
//! Arithmetic always propagates the tightest sound truncation: the product
//! rule is trunc = min(trunc_a + val_b, trunc_b + val_a), so an unknown
//! term can never contaminate a known coefficient. Division requires a
//! denominator whose lowest coefficient is a unit; every denominator
//! appearing in the formulas served by this crate (Pochhammer symbols,
//! quantum-integer products, 1 - q) has that property, so a
//! [`SeriesError::DenominatorNotUnit`] signals a transcription error
//! upstream rather than a numeric condition.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Sentinel truncation for series that are known exactly at every exponent
/// (Laurent polynomials).
pub const TRUNC_EXACT: i64 = i64::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("grids {0} and {1} cannot be unified")]
    GridMismatch(u8, u8),
    #[error("series cannot be demoted to grid {0}: exponent {1} not divisible")]
    GridNotDivisible(u8, i64),
    #[error("division by zero series")]
    DivisionByZero,
    #[error("denominator lowest coefficient {0} is not a unit")]
    DenominatorNotUnit(BigInt),
    #[error("exact quotient is not a Laurent polynomial; use div_to with an explicit truncation")]
    QuotientNotPolynomial,
    #[error("cannot normalize the zero series")]
    ZeroSeries,
    #[error("series known only below {have} but {need} coefficients requested")]
    InsufficientTruncation { have: i64, need: i64 },
    #[error("exponent {0} (in 1/{1} units) is not integral after normalization")]
    NonIntegerGridAfterNormalization(i64, u8),
    #[error("invalid serialized series: {0}")]
    BadSerialization(String),
}

/// Exact Laurent series in q, known strictly below `trunc`/grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    grid: u8,
    offset: i64,
    coeffs: Vec<BigInt>,
    trunc: i64,
}

fn sat_add(a: i64, b: i64) -> i64 {
    if a == TRUNC_EXACT || b == TRUNC_EXACT {
        TRUNC_EXACT
    } else {
        a.saturating_add(b)
    }
}

impl TruncatedSeries {
    /// The zero series, known below `trunc`.
    pub fn zero(grid: u8, trunc: i64) -> Self {
        assert!(matches!(grid, 1 | 2 | 4), "grid must be 1, 2 or 4");
        Self { grid, offset: 0, coeffs: Vec::new(), trunc }
    }

    /// The exact constant 1.
    pub fn one(grid: u8) -> Self {
        Self::monomial(grid, 1, 0)
    }

    /// The exact monomial sign * q^(exp/grid), sign in {+1, -1}.
    pub fn monomial(grid: u8, sign: i8, exp: i64) -> Self {
        assert!(matches!(grid, 1 | 2 | 4), "grid must be 1, 2 or 4");
        assert!(sign == 1 || sign == -1);
        Self { grid, offset: exp, coeffs: vec![BigInt::from(sign)], trunc: TRUNC_EXACT }
    }

    /// Build from a dense coefficient run starting at `offset`; canonicalizes.
    pub fn from_coeffs(grid: u8, offset: i64, trunc: i64, coeffs: Vec<BigInt>) -> Self {
        assert!(matches!(grid, 1 | 2 | 4), "grid must be 1, 2 or 4");
        let mut s = Self { grid, offset, coeffs, trunc };
        s.canonicalize();
        s
    }

    /// Convenience constructor from i64 coefficients.
    pub fn from_i64(grid: u8, offset: i64, trunc: i64, coeffs: &[i64]) -> Self {
        Self::from_coeffs(grid, offset, trunc, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    fn canonicalize(&mut self) {
        if self.trunc != TRUNC_EXACT {
            // drop anything stored at or above the truncation
            if self.offset >= self.trunc {
                self.coeffs.clear();
            } else {
                let keep = (self.trunc - self.offset) as usize;
                self.coeffs.truncate(keep);
            }
        }
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.offset += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.offset = 0;
        }
    }

    pub fn grid(&self) -> u8 {
        self.grid
    }

    /// Exponent of the first stored coefficient, in 1/grid units.
    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// Known strictly below this exponent (1/grid units); [`TRUNC_EXACT`] = exact.
    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    pub fn is_exact(&self) -> bool {
        self.trunc == TRUNC_EXACT
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Valuation lower bound used for truncation propagation: the offset for
    /// a nonzero series, the truncation for a zero one.
    fn val(&self) -> i64 {
        if self.coeffs.is_empty() {
            self.trunc
        } else {
            self.offset
        }
    }

    /// Coefficient of q^(e/grid) if that exponent is known, else None.
    pub fn known_coeff(&self, e: i64) -> Option<BigInt> {
        if self.trunc != TRUNC_EXACT && e >= self.trunc {
            return None;
        }
        if e < self.offset || e - self.offset >= self.coeffs.len() as i64 {
            Some(BigInt::zero())
        } else {
            Some(self.coeffs[(e - self.offset) as usize].clone())
        }
    }

    /// Known coefficients of the integer-grid exponents q^0..q^(n-1).
    /// Requires grid-1 content (use after [`Self::demote`]).
    pub fn int_coeff_window(&self, n: usize) -> Result<Vec<BigInt>, SeriesError> {
        let s = self.demote(1)?;
        (0..n as i64)
            .map(|e| {
                s.known_coeff(e).ok_or(SeriesError::InsufficientTruncation {
                    have: s.trunc,
                    need: n as i64,
                })
            })
            .collect()
    }

    /// Forget everything at or above `t` (1/grid units).
    pub fn truncate_to(&self, t: i64) -> Self {
        let mut s = self.clone();
        s.trunc = s.trunc.min(t);
        s.canonicalize();
        s
    }

    /// Lossless promotion to a finer grid (1 -> 2 -> 4).
    pub fn promote(&self, grid: u8) -> Result<Self, SeriesError> {
        assert!(matches!(grid, 1 | 2 | 4));
        if grid == self.grid {
            return Ok(self.clone());
        }
        if grid % self.grid != 0 {
            return Err(SeriesError::GridMismatch(self.grid, grid));
        }
        let r = (grid / self.grid) as i64;
        let mut coeffs = Vec::with_capacity(self.coeffs.len() * r as usize);
        for c in &self.coeffs {
            coeffs.push(c.clone());
            for _ in 1..r {
                coeffs.push(BigInt::zero());
            }
        }
        let trunc = if self.trunc == TRUNC_EXACT { TRUNC_EXACT } else { self.trunc * r };
        Ok(Self::from_coeffs(grid, self.offset * r, trunc, coeffs))
    }

    /// Lossless demotion to a coarser grid; errors if any stored exponent or
    /// the offset is not divisible by the grid ratio.
    pub fn demote(&self, grid: u8) -> Result<Self, SeriesError> {
        assert!(matches!(grid, 1 | 2 | 4));
        if grid == self.grid {
            return Ok(self.clone());
        }
        if self.grid % grid != 0 {
            return Err(SeriesError::GridMismatch(self.grid, grid));
        }
        let r = (self.grid / grid) as i64;
        let mut coeffs = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            let e = self.offset + i as i64;
            if e % r != 0 {
                if !c.is_zero() {
                    return Err(SeriesError::GridNotDivisible(grid, e));
                }
                continue;
            }
            if c.is_zero() && coeffs.is_empty() && e == self.offset {
                // leading zero cannot occur in canonical form
            }
            coeffs.push(c.clone());
        }
        if !self.coeffs.is_empty() && self.offset % r != 0 {
            return Err(SeriesError::GridNotDivisible(grid, self.offset));
        }
        let offset = if self.coeffs.is_empty() { 0 } else { self.offset / r };
        let trunc = if self.trunc == TRUNC_EXACT {
            TRUNC_EXACT
        } else {
            // integer exponent k is known iff k*r < trunc
            self.trunc.div_euclid(r) + if self.trunc.rem_euclid(r) > 0 { 1 } else { 0 }
        };
        Ok(Self::from_coeffs(grid, offset, trunc, coeffs))
    }

    /// Demote to the coarsest grid that represents the series losslessly.
    pub fn demote_minimal(&self) -> Self {
        let mut s = self.clone();
        while s.grid > 1 {
            match s.demote(s.grid / 2) {
                Ok(d) => s = d,
                Err(_) => break,
            }
        }
        s
    }

    fn unified(&self, other: &Self) -> (Self, Self) {
        let g = self.grid.max(other.grid);
        (
            self.promote(g).expect("grids in {1,2,4} always promote"),
            other.promote(g).expect("grids in {1,2,4} always promote"),
        )
    }

    pub fn neg(&self) -> Self {
        Self {
            grid: self.grid,
            offset: self.offset,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            trunc: self.trunc,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = self.unified(other);
        let trunc = a.trunc.min(b.trunc);
        if a.coeffs.is_empty() {
            return b.truncate_to(trunc);
        }
        if b.coeffs.is_empty() {
            return a.truncate_to(trunc);
        }
        let lo = a.offset.min(b.offset);
        let hi = (a.offset + a.coeffs.len() as i64).max(b.offset + b.coeffs.len() as i64);
        let mut coeffs = vec![BigInt::zero(); (hi - lo) as usize];
        for (i, c) in a.coeffs.iter().enumerate() {
            coeffs[(a.offset - lo) as usize + i] += c;
        }
        for (i, c) in b.coeffs.iter().enumerate() {
            coeffs[(b.offset - lo) as usize + i] += c;
        }
        Self::from_coeffs(a.grid, lo, trunc, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.unified(other);
        let trunc = sat_add(a.trunc, b.val()).min(sat_add(b.trunc, a.val()));
        if a.coeffs.is_empty() || b.coeffs.is_empty() {
            return Self::zero(a.grid, trunc);
        }
        let lo = a.offset + b.offset;
        let full = a.coeffs.len() + b.coeffs.len() - 1;
        let keep = if trunc == TRUNC_EXACT {
            full
        } else {
            (full as i64).min(trunc - lo).max(0) as usize
        };
        let mut coeffs = vec![BigInt::zero(); keep];
        for (i, ca) in a.coeffs.iter().enumerate() {
            if ca.is_zero() || i >= keep {
                continue;
            }
            let jmax = (keep - i).min(b.coeffs.len());
            for (j, cb) in b.coeffs.iter().enumerate().take(jmax) {
                if !cb.is_zero() {
                    coeffs[i + j] += ca * cb;
                }
            }
        }
        Self::from_coeffs(a.grid, lo, trunc, coeffs)
    }

    /// Multiply by the exact monomial sign * q^(e/grid); exponent in 1/grid
    /// units of this series' grid.
    pub fn mul_monomial(&self, sign: i8, e: i64) -> Self {
        assert!(sign == 1 || sign == -1);
        let mut s = if sign == 1 { self.clone() } else { self.neg() };
        s.offset += e;
        s.trunc = sat_add(s.trunc, e);
        s
    }

    /// Multiply by (1 + sign * q^(e/grid)) in O(len); e > 0.
    pub fn mul_binomial(&self, sign: i8, e: i64) -> Self {
        assert!(e > 0 && (sign == 1 || sign == -1));
        self.add(&self.mul_monomial(sign, e))
    }

    /// Divide by (1 + sign * q^(e/grid)) in O(len); e > 0.
    /// Exact inputs stay exact only when the division terminates; otherwise
    /// the caller's truncation (this series' trunc) bounds the result, so
    /// exact inputs must be truncated first.
    pub fn div_binomial(&self, sign: i8, e: i64) -> Result<Self, SeriesError> {
        assert!(e > 0 && (sign == 1 || sign == -1));
        self.div(&Self::one(self.grid).add(&Self::monomial(self.grid, sign, e)))
    }

    /// Nonnegative integer power.
    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(self.grid);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Quotient with the truncation implied by the operands. If both operands
    /// are exact the division must terminate (polynomial quotient); use
    /// [`Self::div_to`] for exact operands with a transcendental quotient.
    pub fn div(&self, den: &Self) -> Result<Self, SeriesError> {
        self.div_impl(den, None)
    }

    /// Quotient computed to at most `t` (1/grid units of the unified grid).
    pub fn div_to(&self, den: &Self, t: i64) -> Result<Self, SeriesError> {
        self.div_impl(den, Some(t))
    }

    fn div_impl(&self, den: &Self, t: Option<i64>) -> Result<Self, SeriesError> {
        let (num, den) = self.unified(den);
        if den.coeffs.is_empty() {
            return Err(SeriesError::DivisionByZero);
        }
        let u = &den.coeffs[0];
        if !(u.is_one() || (-u).is_one()) {
            return Err(SeriesError::DenominatorNotUnit(u.clone()));
        }
        let upos = u.is_one();
        let od = den.offset;
        if num.coeffs.is_empty() {
            let t_q = sat_add(num.trunc, -od).min(t.unwrap_or(TRUNC_EXACT));
            return Ok(Self::zero(num.grid, t_q));
        }
        let oq = num.offset - od;
        // q known below min(t_num - o_den, t_den + o_q - o_den)
        let mut t_q = sat_add(num.trunc, -od).min(sat_add(den.trunc, oq - od));
        if let Some(t) = t {
            t_q = t_q.min(t);
        }
        if t_q == TRUNC_EXACT {
            // polynomial long division from the low end; remainder must vanish
            let deg_bound = num.offset + num.coeffs.len() as i64 - den.offset
                - den.coeffs.len() as i64;
            let mut rem = num.coeffs.clone();
            let mut q = Vec::new();
            let mut lead = 0usize;
            loop {
                while lead < rem.len() && rem[lead].is_zero() {
                    lead += 1;
                }
                if lead >= rem.len() {
                    break;
                }
                if (lead as i64) > deg_bound - oq {
                    return Err(SeriesError::QuotientNotPolynomial);
                }
                while q.len() < lead {
                    q.push(BigInt::zero());
                }
                let c = if upos { rem[lead].clone() } else { -&rem[lead] };
                for (j, d) in den.coeffs.iter().enumerate() {
                    if !d.is_zero() {
                        if lead + j >= rem.len() {
                            rem.resize(lead + j + 1, BigInt::zero());
                        }
                        rem[lead + j] -= &c * d;
                    }
                }
                q.push(c);
                debug_assert!(rem[lead].is_zero());
            }
            return Ok(Self::from_coeffs(num.grid, oq, TRUNC_EXACT, q));
        }
        let len = (t_q - oq).max(0) as usize;
        let mut q: Vec<BigInt> = Vec::with_capacity(len);
        for k in 0..len {
            // numerator coefficient at exponent oq + k + od
            let e = num.offset + k as i64;
            let mut acc = if e >= num.offset && ((e - num.offset) as usize) < num.coeffs.len() {
                num.coeffs[(e - num.offset) as usize].clone()
            } else {
                BigInt::zero()
            };
            let jmax = den.coeffs.len().min(k + 1);
            for j in 1..jmax {
                let d = &den.coeffs[j];
                if !d.is_zero() {
                    acc -= d * &q[k - j];
                }
            }
            q.push(if upos { acc } else { -acc });
        }
        Ok(Self::from_coeffs(num.grid, oq, t_q, q))
    }

    /// Strip the leading sign and monomial: returns (series with offset 0 and
    /// leading coefficient +1 after dividing by leading_coeff's sign only if
    /// it is a unit; otherwise the sign of the leading coefficient), the
    /// stripped sign, and the stripped exponent in 1/grid units.
    ///
    /// The result satisfies offset = 0 and a positive leading coefficient;
    /// per the usual tail convention the leading coefficient of every series
    /// compared here is a unit, so "positive leading" means "+1".
    pub fn normalize_tail(&self) -> Result<(Self, i8, i64), SeriesError> {
        if self.coeffs.is_empty() {
            return Err(SeriesError::ZeroSeries);
        }
        let sign: i8 = if self.coeffs[0].is_negative() { -1 } else { 1 };
        let shift = self.offset;
        Ok((self.mul_monomial(sign, -shift), sign, shift))
    }
}

impl std::ops::Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        TruncatedSeries::add(self, rhs)
    }
}
impl std::ops::Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        TruncatedSeries::sub(self, rhs)
    }
}
impl std::ops::Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        TruncatedSeries::mul(self, rhs)
    }
}
impl std::ops::Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries::neg(self)
    }
}

/// Outcome of the first-n-coefficients comparison of two normalized series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonReport {
    /// Count of agreeing normalized coefficients from q^0 up.
    pub agreed_terms: usize,
    /// Integer exponent of the first disagreement inside the window, if any.
    pub first_mismatch: Option<i64>,
    /// True when the two leading signs stripped by normalization differ.
    pub sign_flip: bool,
    /// Relative monomial stripped by normalization, lhs minus rhs, in
    /// 1/`monomial_shift_grid` units.
    pub monomial_shift: i64,
    pub monomial_shift_grid: u8,
}

impl ComparisonReport {
    pub fn agreed(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

/// Compare the first `n` integer-grid coefficients of `a` and `b` after
/// sign-and-monomial normalization. Both series must normalize onto the
/// integer grid and be known through q^(n-1).
pub fn agree_up_to(
    a: &TruncatedSeries,
    b: &TruncatedSeries,
    n: usize,
) -> Result<ComparisonReport, SeriesError> {
    let (na, sa, sha) = a.normalize_tail()?;
    let (nb, sb, shb) = b.normalize_tail()?;
    let g = na.grid.max(nb.grid);
    let na = na.promote(g)?;
    let nb = nb.promote(g)?;
    let da = na.demote(1).map_err(|e| match e {
        SeriesError::GridNotDivisible(_, e) => SeriesError::NonIntegerGridAfterNormalization(e, g),
        e => e,
    })?;
    let db = nb.demote(1).map_err(|e| match e {
        SeriesError::GridNotDivisible(_, e) => SeriesError::NonIntegerGridAfterNormalization(e, g),
        e => e,
    })?;
    for s in [&da, &db] {
        if s.trunc != TRUNC_EXACT && s.trunc < n as i64 {
            return Err(SeriesError::InsufficientTruncation { have: s.trunc, need: n as i64 });
        }
    }
    let mut agreed = 0usize;
    let mut first_mismatch = None;
    for e in 0..n as i64 {
        let ca = da.known_coeff(e).expect("window checked");
        let cb = db.known_coeff(e).expect("window checked");
        if ca == cb {
            if first_mismatch.is_none() {
                agreed += 1;
            }
        } else if first_mismatch.is_none() {
            first_mismatch = Some(e);
        }
    }
    // report the stripped monomials on the common grid
    let ra = (g / a.grid) as i64;
    let rb = (g / b.grid) as i64;
    Ok(ComparisonReport {
        agreed_terms: agreed,
        first_mismatch,
        sign_flip: sa != sb,
        monomial_shift: sha * ra - shb * rb,
        monomial_shift_grid: g,
    })
}

// ---------------------------------------------------------------------------
// serialization: {"grid": d, "offset": int, "trunc": int, "coeffs": [dec str]}
// ---------------------------------------------------------------------------

impl TruncatedSeries {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "grid": self.grid,
            "offset": self.offset,
            "trunc": self.trunc,
            "coeffs": self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, SeriesError> {
        let bad = |m: &str| SeriesError::BadSerialization(m.to_string());
        let grid = v.get("grid").and_then(|g| g.as_u64()).ok_or_else(|| bad("grid"))? as u8;
        if !matches!(grid, 1 | 2 | 4) {
            return Err(bad("grid must be 1, 2 or 4"));
        }
        let offset = v.get("offset").and_then(|o| o.as_i64()).ok_or_else(|| bad("offset"))?;
        let trunc = v.get("trunc").and_then(|t| t.as_i64()).ok_or_else(|| bad("trunc"))?;
        let coeffs = v
            .get("coeffs")
            .and_then(|c| c.as_array())
            .ok_or_else(|| bad("coeffs"))?
            .iter()
            .map(|c| {
                c.as_str()
                    .and_then(|s| s.parse::<BigInt>().ok())
                    .ok_or_else(|| bad("coeffs must be decimal strings"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_coeffs(grid, offset, trunc, coeffs))
    }
}

impl std::fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0 (mod q^{})", fmt_exp(self.trunc, self.grid));
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = self.offset + i as i64;
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if e == 0 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "q^{}", fmt_exp(e, self.grid))?;
            } else {
                write!(f, "{mag}*q^{}", fmt_exp(e, self.grid))?;
            }
        }
        if self.trunc != TRUNC_EXACT {
            write!(f, " + O(q^{})", fmt_exp(self.trunc, self.grid))?;
        }
        Ok(())
    }
}

fn fmt_exp(e: i64, grid: u8) -> String {
    if e == TRUNC_EXACT {
        return "inf".into();
    }
    let g = grid as i64;
    if e % g == 0 {
        format!("{}", e / g)
    } else if (2 * e) % g == 0 {
        format!("{}/2", 2 * e / g)
    } else {
        format!("{e}/{g}")
    }
}
