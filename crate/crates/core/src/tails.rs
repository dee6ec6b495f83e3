//! Infinite-sum tail formulas for the knot/graph families, evaluated
//! exactly to a requested truncation.
//!
//! Every summand in these families is a monomial q^E over a product of
//! Pochhammer symbols with constant term 1, so its valuation is exactly E,
//! and E grows quadratically in every summation index. Each nesting level
//! is therefore cut off as soon as the running exponent reaches the
//! truncation: the first discarded summand of every index already has
//! valuation >= trunc, which makes the cutoff sound rather than heuristic.
//!
//! All tails live on the integer q grid; `trunc` counts q coefficients.
//! The `jobs` argument partitions the outermost summation index across
//! worker threads; the arithmetic is exact, so any partition reduces to a
//! bit-identical result.

use thiserror::Error;

use crate::qfun::{euler_function, pochhammer_q};
use crate::series::{SeriesError, TruncatedSeries};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TailsError {
    #[error("invalid family parameter: {0}")]
    BadParameter(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Knot/graph family whose tail is computed.
///
/// Indexing note, documented rather than silently unified: `LkProduct(k)`
/// and `LkMultisum(k)` compute T_(L_k) = (q;q)_inf^(k+1) sum_i
/// q^i/(q;q)_i^(k+1) with exponent k+1, while the pretzel-numbered statement
/// of the same family carries exponent k for P(2,..,2); the two agree under
/// an index shift between the graph and pretzel namings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailFamily {
    /// (2,2k)-torus links; requires k >= 2.
    TorusEven { k: u64 },
    /// (2,2k+1)-torus knots; requires k >= 1, k = 1 is the Euler function.
    TorusOdd { k: u64 },
    /// Pretzel knots P(2k+1, 2, 2u+1); requires k, u >= 1. Phi(1,1) is the
    /// tail of 8_5.
    Phi { k: u64, u: u64 },
    LkProduct { k: u64 },
    LkMultisum { k: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TailSpec {
    pub family: TailFamily,
    pub trunc: i64,
}

impl TailSpec {
    pub fn eval(&self, jobs: usize) -> Result<TruncatedSeries, TailsError> {
        match self.family {
            TailFamily::TorusEven { k } => tail_torus_even(k, self.trunc, jobs),
            TailFamily::TorusOdd { k } => tail_torus_odd(k, self.trunc, jobs),
            TailFamily::Phi { k, u } => tail_phi(k, u, self.trunc, jobs),
            TailFamily::LkProduct { k } => tail_lk_product(k, self.trunc, jobs),
            TailFamily::LkMultisum { k } => tail_lk_multisum(k, self.trunc, jobs),
        }
    }
}

/// Run `f` over chunks of `0..hi` on up to `jobs` threads and add the
/// partial sums in chunk order.
fn partition_sum<F>(jobs: usize, hi: i64, trunc: i64, f: F) -> TruncatedSeries
where
    F: Fn(std::ops::Range<i64>) -> TruncatedSeries + Sync,
{
    let jobs = jobs.max(1).min(hi.max(1) as usize);
    if jobs == 1 {
        return f(0..hi);
    }
    let chunk = (hi as usize).div_ceil(jobs) as i64;
    let ranges: Vec<_> = (0..jobs as i64)
        .map(|w| (w * chunk).min(hi)..((w + 1) * chunk).min(hi))
        .collect();
    let partials = std::thread::scope(|scope| {
        let handles: Vec<_> = ranges.into_iter().map(|r| scope.spawn(|| f(r))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("tail worker panicked"))
            .collect::<Vec<_>>()
    });
    partials
        .into_iter()
        .fold(TruncatedSeries::zero(1, trunc), |acc, p| acc.add(&p))
}

/// Divide by (q;q)_m, one binomial step per factor. Factors with exponent
/// at or above the truncation act as 1 on the known window and are skipped.
fn div_poch(series: &TruncatedSeries, m: i64) -> Result<TruncatedSeries, SeriesError> {
    let mut s = series.clone();
    for j in 1..=m {
        if j >= s.trunc() {
            break;
        }
        s = s.div_binomial(-1, j)?;
    }
    Ok(s)
}

/// Largest v with v(v+1) < trunc, plus one (exclusive range end for the
/// outermost summation index).
fn outer_bound(trunc: i64) -> i64 {
    let mut v = 0i64;
    while v * (v + 1) < trunc {
        v += 1;
    }
    v
}

/// Enumerator for the cyclic-family summands
///
///   q^(sum_j i_j (i_j + 1)) / ((q;q)_(l_inner)^e_inner prod_(outer j) (q;q)_(l_j))
///
/// with i_j = l_j + ... + l_depth. The recursion runs from the innermost
/// index outward, so the running value v at each level is the partial sum
/// i_j itself (non-decreasing outward) and l = v - prev. Partial sums are
/// accumulated into `sink(innermost_value, summand)`; only outermost values
/// inside `outer_range` are emitted, which is the parallel partition seam.
fn cyclic_sum(
    level: usize,
    depth: usize,
    e_inner: u32,
    prev: i64,
    expo: i64,
    d: &TruncatedSeries,
    trunc: i64,
    outer_range: &std::ops::Range<i64>,
    inner_v: i64,
    sink: &mut dyn FnMut(i64, TruncatedSeries),
) -> Result<(), SeriesError> {
    if level > depth {
        sink(inner_v, d.mul_monomial(1, expo));
        return Ok(());
    }
    let mut cur = d.clone();
    let mut v = prev;
    loop {
        let e = expo + v * (v + 1);
        if e >= trunc {
            break;
        }
        if v > prev {
            // one more factor (1 - q^(v-prev)) in this level's Pochhammer
            let reps = if level == 1 { e_inner } else { 1 };
            for _ in 0..reps {
                cur = cur.div_binomial(-1, v - prev)?;
            }
        }
        let emit = level != depth || outer_range.contains(&v);
        if emit {
            cyclic_sum(
                level + 1,
                depth,
                e_inner,
                v,
                e,
                &cur,
                trunc,
                outer_range,
                if level == 1 { v } else { inner_v },
                sink,
            )?;
        }
        v += 1;
    }
    Ok(())
}

fn cyclic_family(
    depth: usize,
    e_inner: u32,
    trunc: i64,
    jobs: usize,
) -> Result<TruncatedSeries, TailsError> {
    if depth == 0 {
        return Ok(TruncatedSeries::one(1).truncate_to(trunc));
    }
    let hi = outer_bound(trunc);
    Ok(partition_sum(jobs, hi, trunc, |range| {
        let mut acc = TruncatedSeries::zero(1, trunc);
        let mut sink = |_v: i64, s: TruncatedSeries| acc = acc.add(&s);
        cyclic_sum(
            1,
            depth,
            e_inner,
            0,
            0,
            &TruncatedSeries::one(1).truncate_to(trunc),
            trunc,
            &range,
            0,
            &mut sink,
        )
        .expect("unit denominators below truncation");
        acc
    }))
}

/// Tail of the (2,2k+1)-torus knots, the theta-function side of the
/// Rogers-Ramanujan identity:
///   (q;q)_inf sum_(l_1..l_(k-1)) q^(sum_j i_j(i_j+1)) / prod_j (q;q)_(l_j),
/// i_j = l_j + ... + l_(k-1); k = 1 is the bare Euler function.
pub fn tail_torus_odd(k: u64, trunc: i64, jobs: usize) -> Result<TruncatedSeries, TailsError> {
    if k < 1 {
        return Err(TailsError::BadParameter("torus-odd needs k >= 1".into()));
    }
    let sum = cyclic_family((k - 1) as usize, 1, trunc, jobs)?;
    Ok(sum.mul(&euler_function(trunc)).truncate_to(trunc))
}

/// Tail of the (2,2k)-torus links, the false-theta side:
///   (q;q)_inf sum q^(sum_j i_j(i_j+1)) / ((q;q)_(l_(k-1))^2 prod_(j<k-1) (q;q)_(l_j)).
pub fn tail_torus_even(k: u64, trunc: i64, jobs: usize) -> Result<TruncatedSeries, TailsError> {
    if k < 2 {
        return Err(TailsError::BadParameter("torus-even needs k >= 2".into()));
    }
    let sum = cyclic_family((k - 1) as usize, 2, trunc, jobs)?;
    Ok(sum.mul(&euler_function(trunc)).truncate_to(trunc))
}

/// Tail of the graph Phi(k,u) (pretzel knots P(2k+1, 2, 2u+1)):
///   (q;q)_inf^2 sum_l sum_p g(l_1..l_k) g(p_1..p_u) (q;q)_(l_k + p_u)
/// where g carries the squared Pochhammer on its innermost index. The final
/// Pochhammer binds to l_k + p_u, the reindexed form of the proof's
/// (q;q)_(i_k + j_u); the k = u = 1 case then reproduces the published 8_5
/// tail display exactly.
pub fn tail_phi(k: u64, u: u64, trunc: i64, jobs: usize) -> Result<TruncatedSeries, TailsError> {
    tail_phi_impl(k, u, trunc, jobs, true)
}

/// Test hook: the Phi double sum without the final (q;q)_(l_k+p_u) factor,
/// which at k = u = 1 must reproduce Psi(q^3,q)^2.
pub fn tail_phi_no_final_factor(
    k: u64,
    u: u64,
    trunc: i64,
    jobs: usize,
) -> Result<TruncatedSeries, TailsError> {
    tail_phi_impl(k, u, trunc, jobs, false)
}

fn tail_phi_impl(
    k: u64,
    u: u64,
    trunc: i64,
    jobs: usize,
    final_factor: bool,
) -> Result<TruncatedSeries, TailsError> {
    if k < 1 || u < 1 {
        return Err(TailsError::BadParameter("phi needs k, u >= 1".into()));
    }
    let hi = outer_bound(trunc);
    // partial sums of g grouped by the innermost index value
    let grouped = |depth: usize| -> Result<Vec<TruncatedSeries>, TailsError> {
        let mut groups: Vec<TruncatedSeries> = Vec::new();
        let mut sink = |v: i64, s: TruncatedSeries| {
            let slot = v as usize;
            while groups.len() <= slot {
                groups.push(TruncatedSeries::zero(1, trunc));
            }
            groups[slot] = groups[slot].add(&s);
        };
        cyclic_sum(
            1,
            depth,
            2,
            0,
            0,
            &TruncatedSeries::one(1).truncate_to(trunc),
            trunc,
            &(0..hi),
            0,
            &mut sink,
        )
        .map_err(TailsError::from)?;
        Ok(groups)
    };
    let gk = grouped(k as usize)?;
    let gu = if u == k { gk.clone() } else { grouped(u as usize)? };
    let res = partition_sum(jobs, gk.len() as i64, trunc, |range| {
        let mut acc = TruncatedSeries::zero(1, trunc);
        for v in range {
            let sv = &gk[v as usize];
            if sv.is_zero() {
                continue;
            }
            for (w, sw) in gu.iter().enumerate() {
                if sw.is_zero() {
                    continue;
                }
                let mut term = sv.mul(sw);
                if final_factor {
                    term = term.mul(&pochhammer_q(v as u64 + w as u64));
                }
                acc = acc.add(&term.truncate_to(trunc));
            }
        }
        acc
    });
    let e = euler_function(trunc);
    Ok(res.mul(&e).mul(&e).truncate_to(trunc))
}

/// Product form of the ladder-family tail:
///   T_(L_k) = (q;q)_inf^(k+1) sum_i q^i / (q;q)_i^(k+1).
pub fn tail_lk_product(k: u64, trunc: i64, jobs: usize) -> Result<TruncatedSeries, TailsError> {
    if k < 1 {
        return Err(TailsError::BadParameter("lk-product needs k >= 1".into()));
    }
    let e = k as u32 + 1;
    let sum = partition_sum(jobs, trunc.max(0), trunc, |range| {
        let mut acc = TruncatedSeries::zero(1, trunc);
        let mut inv = TruncatedSeries::one(1).truncate_to(trunc);
        for _ in 0..e {
            inv = div_poch(&inv, range.start).expect("unit denominators");
        }
        let start = range.start;
        for i in range {
            if i > start && i < trunc {
                // extend 1/(q;q)_(i-1)^(k+1) to 1/(q;q)_i^(k+1)
                for _ in 0..e {
                    inv = inv.div_binomial(-1, i).expect("unit denominators");
                }
            }
            acc = acc.add(&inv.mul_monomial(1, i));
        }
        acc
    });
    let eul = euler_function(trunc);
    let mut r = sum;
    for _ in 0..e {
        r = r.mul(&eul).truncate_to(trunc);
    }
    Ok(r)
}

/// Multi-sum form of the ladder-family tail:
///   T_(L_k) = (q;q)_inf^k sum_(i_1..i_k)
///     q^(sum_j (i_j + i_j^2) + sum_(s=2)^k sum_(j=s)^k i_(s-1) i_j)
///     / prod_j ((q;q)_(i_j) (q;q)_(i_1+...+i_j)).
pub fn tail_lk_multisum(k: u64, trunc: i64, jobs: usize) -> Result<TruncatedSeries, TailsError> {
    if k < 1 {
        return Err(TailsError::BadParameter("lk-multisum needs k >= 1".into()));
    }
    let k = k as usize;
    fn rec(
        level: usize,
        k: usize,
        sigma: i64,
        expo: i64,
        d: &TruncatedSeries,
        trunc: i64,
        outer_range: &std::ops::Range<i64>,
        acc: &mut TruncatedSeries,
    ) -> Result<(), SeriesError> {
        if level > k {
            *acc = acc.add(&d.mul_monomial(1, expo));
            return Ok(());
        }
        // this level contributes 1/((q;q)_v (q;q)_(sigma+v)); the running-sum
        // symbol starts at (q;q)_sigma, divided out up front, and both
        // symbols then extend by one binomial per v-increment
        let mut cur = div_poch(d, sigma)?;
        let mut v = 0i64;
        loop {
            let add = v + v * v + v * sigma;
            if expo + add >= trunc {
                break;
            }
            if v > 0 {
                cur = cur.div_binomial(-1, v)?;
                if sigma + v < trunc {
                    cur = cur.div_binomial(-1, sigma + v)?;
                }
            }
            if level != 1 || outer_range.contains(&v) {
                rec(level + 1, k, sigma + v, expo + add, &cur, trunc, outer_range, acc)?;
            }
            v += 1;
        }
        Ok(())
    }
    let hi = outer_bound(trunc);
    let sum = partition_sum(jobs, hi, trunc, |range| {
        let mut acc = TruncatedSeries::zero(1, trunc);
        rec(
            1,
            k,
            0,
            0,
            &TruncatedSeries::one(1).truncate_to(trunc),
            trunc,
            &range,
            &mut acc,
        )
        .expect("unit denominators");
        acc
    });
    let eul = euler_function(trunc);
    let mut r = sum;
    for _ in 0..k {
        r = r.mul(&eul).truncate_to(trunc);
    }
    Ok(r)
}
