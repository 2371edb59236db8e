//! Young ranking tables and the interval-to-table bijection.
//!
//! For a slope `xi = p/q > 0` the ranking table of size `(m, n)` sends
//! `(i, j)` to the rank of `i + j*xi` among all `s + t*xi`, which is
//! compared exactly as `q*s + p*t <= q*i + p*j`. The table is injective
//! iff `xi` is not a term of `G_{m-1,n-1}`; every open interval of
//! `G_{m-1,n-1}` thus yields one table, and its corner pair
//! `(tau(m,1), tau(1,n), (m,n))` is a Young terminal pair.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::farey::{farey_intervals, next_term, prev_term, v_map, FareyVertex};
use crate::rational::ExtendedRational;
use crate::terminal::TerminalPair;

type Q = ExtendedRational;

/// Corner pairs of Young ranking tables share the shape of terminal pairs.
pub type YoungTerminalPair = TerminalPair;

/// A ranking table stored bottom-up: `rows[j-1][i-1]` is the entry at `(i, j)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankingTable {
    pub m: u32,
    pub n: u32,
    pub xi: Q,
    pub rows: Vec<Vec<u64>>,
}

impl RankingTable {
    /// Entry at 1-based `(i, j)`.
    pub fn entry(&self, i: u32, j: u32) -> u64 {
        self.rows[j as usize - 1][i as usize - 1]
    }

    pub fn terminal_pair(&self) -> YoungTerminalPair {
        TerminalPair {
            s: self.entry(self.m, 1),
            t: self.entry(1, self.n),
            m: self.m,
            n: self.n,
        }
    }

    pub fn is_young(&self) -> bool {
        is_young(&self.rows)
    }

    /// Index transpose: `(i, j) -> (j, i)`, slope inverted.
    pub fn transpose(&self) -> Self {
        let rows = (0..self.m as usize)
            .map(|i| self.rows.iter().map(|row| row[i]).collect())
            .collect();
        Self {
            m: self.n,
            n: self.m,
            xi: self.xi.recip(),
            rows,
        }
    }
}

/// Rows and columns nondecreasing.
pub fn is_young(rows: &[Vec<u64>]) -> bool {
    let rows_ok = rows.iter().all(|row| row.windows(2).all(|w| w[0] <= w[1]));
    rows_ok && rows.windows(2).all(|w| w[0].iter().zip(&w[1]).all(|(lo, hi)| lo <= hi))
}

fn check_slope(xi: Q) -> Result<(u64, u64)> {
    if xi.is_positive_finite() {
        Ok((xi.num(), xi.den()))
    } else {
        Err(Error::SlopeDomain(xi.to_string()))
    }
}

/// Whether `xi` is a term of `G_{m-1,n-1}`, where two cells tie.
pub fn is_breakpoint(xi: Q, m: u32, n: u32) -> bool {
    m >= 2 && n >= 2 && xi.num() < m as u64 && xi.den() < n as u64
}

/// The full ranking table for slope `xi`.
pub fn ranking_table(m: u32, n: u32, xi: Q) -> Result<RankingTable> {
    let (p, q) = check_slope(xi)?;
    if m == 0 || n == 0 {
        return Err(Error::InvalidPair(format!("table size ({m},{n})")));
    }
    if is_breakpoint(xi, m, n) {
        return Err(Error::Breakpoint {
            xi: xi.to_string(),
            m,
            n,
        });
    }
    let key = |i: u64, j: u64| q as u128 * i as u128 + p as u128 * j as u128;
    let mut keys: Vec<u128> = (1..=n as u64)
        .flat_map(|j| (1..=m as u64).map(move |i| key(i, j)))
        .collect();
    keys.sort_unstable();
    let rows = (1..=n as u64)
        .map(|j| {
            (1..=m as u64)
                .map(|i| keys.partition_point(|k| *k <= key(i, j)) as u64)
                .collect()
        })
        .collect();
    Ok(RankingTable { m, n, xi, rows })
}

/// `sum_{i=0}^{count-1} floor((a*i + b) / d)`, `None` on overflow.
fn floor_sum(mut count: u64, mut d: u64, mut a: u64, mut b: u64) -> Option<u64> {
    let mut acc = 0u64;
    loop {
        if count == 0 {
            return Some(acc);
        }
        if a >= d {
            let tri = (count as u128 * (count as u128 - 1) / 2) as u64;
            acc = acc.checked_add(tri.checked_mul(a / d)?)?;
            a %= d;
        }
        if b >= d {
            acc = acc.checked_add(count.checked_mul(b / d)?)?;
            b %= d;
        }
        let y_max = a.checked_mul(count)?.checked_add(b)?;
        if y_max < d {
            return Some(acc);
        }
        count = y_max / d;
        b = y_max % d;
        (d, a) = (a, d);
    }
}

/// `(tau(m,1), tau(1,n))` for slope `xi`, in `O(log)` via floor sums.
///
/// Shifting indices gives `tau(m,1) = sum_t max(0, m - ceil(t*xi))` and
/// `tau(1,n) = sum_t min(m, floor(t*xi) + 1)` over `t = 0..n-1`; both hold
/// for every positive slope, breakpoints included.
pub fn corner_ranks(m: u32, n: u32, xi: Q) -> Result<(u64, u64)> {
    let (p, q) = check_slope(xi)?;
    if m == 0 || n == 0 {
        return Err(Error::InvalidPair(format!("table size ({m},{n})")));
    }
    let overflow = || Error::Overflow("corner rank");
    let (m, n) = (m as u64, n as u64);
    // t*p <= (m-1)*q  <=>  ceil(t*xi) <= m-1
    let live = n.min((m - 1).checked_mul(q).ok_or_else(overflow)? / p + 1);
    let bottom = live * m - floor_sum(live, q, p, q - 1).ok_or_else(overflow)?;
    // t*p < m*q  <=>  floor(t*xi) + 1 <= m
    let unclamped = n.min((m.checked_mul(q).ok_or_else(overflow)? - 1) / p + 1);
    let left = floor_sum(unclamped, q, p, 0)
        .and_then(|f| f.checked_add(unclamped))
        .and_then(|f| f.checked_add((n - unclamped) * m))
        .ok_or_else(overflow)?;
    Ok((bottom, left))
}

/// `tau(m,1) - tau(1,n)`, evaluated from the shifted double sum
/// `#{t*xi <= s} - #{t*xi >= s}` over `0 <= s < m`, `0 <= t < n`.
///
/// Defined at breakpoints too.
pub fn delta(m: u32, n: u32, xi: Q) -> Result<i64> {
    let (p, q) = check_slope(xi)?;
    if m == 0 || n == 0 {
        return Err(Error::InvalidPair(format!("table size ({m},{n})")));
    }
    let mut total = 0i64;
    for t in 0..n as u128 {
        let tp = t * p as u128;
        let q = q as u128;
        let ceil = tp.div_ceil(q);
        let floor = tp / q;
        let at_least = (m as u128).saturating_sub(ceil);
        let at_most = (floor + 1).min(m as u128);
        total += at_least as i64 - at_most as i64;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Exact one-sided limit of [`delta`] at `x`.
///
/// Every jump of `delta` sits at some `s/t` with `s < m`, `t < n`, which is
/// a term of `G_{m,n}`; the mediant of `x` with its neighbor in `G_{m,n}`
/// on the chosen side therefore lies on the constant piece next to `x`.
pub fn delta_one_sided(m: u32, n: u32, x: Q, side: Side) -> Result<i64> {
    check_slope(x)?;
    let probe = match side {
        Side::Left => prev_term(x, m, n).expect("x > 0").mediant(x)?,
        Side::Right => x.mediant(next_term(x, m, n).expect("x finite"))?,
    };
    delta(m, n, probe)
}

/// The table of an interval `v` of `G_{m-1,n-1}`, sized `(m, n)`, taken at
/// the mediant of the endpoints.
pub fn suranyi_table(v: &FareyVertex) -> Result<RankingTable> {
    let xi = v.a.mediant(v.b)?;
    ranking_table(v.m + 1, v.n + 1, xi)
}

/// The corner pair of [`suranyi_table`], computed without the table.
pub fn suranyi_terminal(v: &FareyVertex) -> Result<YoungTerminalPair> {
    let xi = v.a.mediant(v.b)?;
    let (m, n) = (v.m + 1, v.n + 1);
    let (s, t) = corner_ranks(m, n, xi)?;
    Ok(TerminalPair { s, t, m, n })
}

/// All Young terminal pairs of size `(m, n)`, one per interval of
/// `G_{m-1,n-1}`, in canonical order.
pub fn young_terminal_pairs(m: u32, n: u32) -> Result<Vec<YoungTerminalPair>> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidPair(format!("size ({m},{n})")));
    }
    let mut pairs = farey_intervals(m - 1, n - 1)
        .iter()
        .map(suranyi_terminal)
        .collect::<Result<Vec<_>>>()?;
    pairs.sort_unstable();
    Ok(pairs)
}

/// Inverse lookup from Young terminal pairs back to intervals, built from
/// any collection of intervals. Stored as a sorted vector.
#[derive(Debug, Clone, Default)]
pub struct SuranyiIndex {
    entries: Vec<(YoungTerminalPair, FareyVertex)>,
}

impl SuranyiIndex {
    /// Fails with the two colliding intervals if the images are not distinct.
    pub fn build<'a, I>(intervals: I) -> Result<Self, (FareyVertex, FareyVertex)>
    where
        I: IntoIterator<Item = &'a FareyVertex>,
    {
        let mut entries: Vec<_> = intervals
            .into_iter()
            .map(|v| (suranyi_terminal(v).expect("interval endpoints are ordered"), *v))
            .collect();
        entries.sort_unstable();
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err((w[0].1, w[1].1));
        }
        Ok(Self { entries })
    }

    /// Builds from pairs already computed, in any order.
    pub fn from_pairs(mut entries: Vec<(YoungTerminalPair, FareyVertex)>) -> Result<Self, (FareyVertex, FareyVertex)> {
        entries.sort_unstable();
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err((w[0].1, w[1].1));
        }
        Ok(Self { entries })
    }

    pub fn get(&self, p: &YoungTerminalPair) -> Option<FareyVertex> {
        self.entries
            .binary_search_by(|(k, _)| k.cmp(p))
            .ok()
            .map(|i| self.entries[i].1)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = &YoungTerminalPair> {
        self.entries.iter().map(|(p, _)| p)
    }
}

type IndexCache = RwLock<HashMap<(u32, u32), Arc<SuranyiIndex>>>;

fn index_for(m: u32, n: u32) -> Arc<SuranyiIndex> {
    static CACHE: OnceLock<IndexCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(index) = cache.read().unwrap().get(&(m, n)) {
        return index.clone();
    }
    let intervals = farey_intervals(m - 1, n - 1);
    let index = Arc::new(SuranyiIndex::build(&intervals).expect("distinct intervals have distinct tables"));
    cache.write().unwrap().entry((m, n)).or_insert(index).clone()
}

/// The interval whose corner pair is `p`, by exhaustive matching over
/// `G_{m-1,n-1}` (indexes are cached per size).
pub fn suranyi_inverse(p: &YoungTerminalPair) -> Result<FareyVertex> {
    if p.m == 0 || p.n == 0 {
        return Err(Error::NotYoung(p.to_string()));
    }
    index_for(p.m, p.n).get(p).ok_or_else(|| Error::NotYoung(p.to_string()))
}

/// Parent map of the Young tree: map back to an interval, take its
/// parent there, and map forward again.
pub fn phi_map(p: &YoungTerminalPair) -> Result<YoungTerminalPair> {
    phi_map_with(p, suranyi_inverse)
}

/// [`phi_map`] with a caller-supplied inverse.
pub fn phi_map_with<F>(p: &YoungTerminalPair, inverse: F) -> Result<YoungTerminalPair>
where
    F: FnOnce(&YoungTerminalPair) -> Result<FareyVertex>,
{
    if p.m + p.n < 3 {
        return Err(Error::Root);
    }
    let v = inverse(p)?;
    suranyi_terminal(&v_map(&v)?)
}
