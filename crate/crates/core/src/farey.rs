//! Generalized Farey sequences `G_{m,n}` and their tagged open intervals.
//!
//! `G_{m,n}` holds `0`, `inf` and, when `mn >= 1`, every `p/q` with
//! `1 <= p <= m` and `1 <= q <= n`. A [`FareyVertex`] is an open interval
//! between two adjacent terms, tagged with `(m, n)`; its level is `m + n`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::ExtendedRational;

type Q = ExtendedRational;

/// The sorted, duplicate-free terms of `G_{m,n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FareySequence {
    pub m: u32,
    pub n: u32,
    terms: Vec<Q>,
}

impl FareySequence {
    pub fn terms(&self) -> &[Q] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, x: Q) -> bool {
        self.terms.binary_search(&x).is_ok()
    }

    /// Least term strictly greater than `x`.
    pub fn successor(&self, x: Q) -> Option<Q> {
        let i = self.terms.partition_point(|t| *t <= x);
        self.terms.get(i).copied()
    }

    /// Greatest term strictly less than `x`.
    pub fn predecessor(&self, x: Q) -> Option<Q> {
        let i = self.terms.partition_point(|t| *t < x);
        i.checked_sub(1).map(|i| self.terms[i])
    }

    pub fn intervals(&self) -> Vec<FareyVertex> {
        self.terms
            .windows(2)
            .map(|w| FareyVertex {
                a: w[0],
                b: w[1],
                m: self.m,
                n: self.n,
            })
            .collect()
    }
}

/// Enumerates every `p/q`, reduces, sorts and deduplicates.
pub fn farey_sequence(m: u32, n: u32) -> FareySequence {
    let mut terms = vec![Q::ZERO, Q::INFINITY];
    if m > 0 && n > 0 {
        terms.reserve(m as usize * n as usize);
        for p in 1..=m as u64 {
            for q in 1..=n as u64 {
                terms.push(Q::from_parts(p, q).expect("p >= 1"));
            }
        }
    }
    terms.sort_unstable();
    terms.dedup();
    FareySequence { m, n, terms }
}

pub fn farey_intervals(m: u32, n: u32) -> Vec<FareyVertex> {
    farey_sequence(m, n).intervals()
}

/// Whether `x` is a term of `G_{m,n}`.
pub fn in_sequence(x: Q, m: u32, n: u32) -> bool {
    x.is_zero() || x.is_infinite() || (m > 0 && n > 0 && x.num() <= m as u64 && x.den() <= n as u64)
}

/// `min{c in G_{m,n} : c > x}` by a scan over denominators, `O(n)`.
///
/// Returns `None` only for `x = inf`.
pub fn next_term(x: Q, m: u32, n: u32) -> Option<Q> {
    if x.is_infinite() {
        return None;
    }
    let mut best = Q::INFINITY;
    if m == 0 || n == 0 {
        return Some(best);
    }
    let (xn, xd) = (x.num() as u128, x.den() as u128);
    for q in 1..=n as u128 {
        // least p with p/q > x
        let p = xn * q / xd + 1;
        if p <= m as u128 && best.cmp_ratio(p as u64, q as u64) == Ordering::Greater {
            best = Q::from_parts(p as u64, q as u64).expect("q >= 1");
        }
    }
    Some(best)
}

/// `max{c in G_{m,n} : c < x}` by a scan over denominators, `O(n)`.
///
/// Returns `None` only for `x = 0`.
pub fn prev_term(x: Q, m: u32, n: u32) -> Option<Q> {
    if x.is_zero() {
        return None;
    }
    let mut best = Q::ZERO;
    if m == 0 || n == 0 {
        return Some(best);
    }
    if x.is_infinite() {
        return Some(Q::integer(m as u64));
    }
    let (xn, xd) = (x.num() as u128, x.den() as u128);
    for q in 1..=n as u128 {
        // greatest p with p/q < x, i.e. ceil(x q) - 1
        let p = ((xn * q).div_ceil(xd) - 1).min(m as u128);
        if p >= 1 && best.cmp_ratio(p as u64, q as u64) == Ordering::Less {
            best = Q::from_parts(p as u64, q as u64).expect("q >= 1");
        }
    }
    Some(best)
}

/// Up to two children of a vertex: the horizontal one grows `m`, the
/// vertical one grows `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Children<V> {
    pub horizontal: Option<V>,
    pub vertical: Option<V>,
}

impl<V> Children<V> {
    pub fn count(&self) -> usize {
        self.horizontal.is_some() as usize + self.vertical.is_some() as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = &V> {
        self.horizontal.iter().chain(self.vertical.iter())
    }
}

/// An open interval `(a, b)` of adjacent terms of `G_{m,n}`, tagged `(m, n)`.
///
/// Ordered canonically by `(m, n, a, b)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawFareyVertex")]
pub struct FareyVertex {
    pub a: Q,
    pub b: Q,
    pub m: u32,
    pub n: u32,
}

#[derive(Deserialize)]
struct RawFareyVertex {
    a: Q,
    b: Q,
    m: u32,
    n: u32,
}

impl TryFrom<RawFareyVertex> for FareyVertex {
    type Error = Error;

    fn try_from(raw: RawFareyVertex) -> Result<Self> {
        FareyVertex::new(raw.a, raw.b, raw.m, raw.n)
    }
}

impl FareyVertex {
    pub const ROOT: Self = Self {
        a: Q::ZERO,
        b: Q::INFINITY,
        m: 0,
        n: 0,
    };

    /// Checks that `a < b` are adjacent terms of `G_{m,n}`.
    pub fn new(a: Q, b: Q, m: u32, n: u32) -> Result<Self> {
        let v = Self { a, b, m, n };
        if a < b && in_sequence(a, m, n) && next_term(a, m, n) == Some(b) {
            Ok(v)
        } else {
            Err(Error::InvalidInterval(v.to_string()))
        }
    }

    #[inline]
    pub fn level(&self) -> u32 {
        self.m + self.n
    }

    /// `((a, b), (m, n)) -> ((1/b, 1/a), (n, m))`.
    #[inline]
    pub fn transpose(&self) -> Self {
        Self {
            a: self.b.recip(),
            b: self.a.recip(),
            m: self.n,
            n: self.m,
        }
    }

    /// The parent map `V_{m,n}`.
    pub fn parent(&self) -> Result<Self> {
        v_map(self)
    }

    pub fn children(&self) -> Children<Self> {
        children(self)
    }
}

/// The inter-level map `V_{m,n}` into `G_{m-1,n}` or `G_{m,n-1}`.
///
/// For `mn >= 1` exactly one of `b < m/n`, `b = m/n`, `a = m/n`,
/// `a > m/n` holds; only the two middle cases move an endpoint.
pub fn v_map(v: &FareyVertex) -> Result<FareyVertex> {
    let (m, n) = (v.m, v.n);
    match (m, n) {
        (0, 0) => Err(Error::Root),
        (0, _) => Ok(FareyVertex { n: n - 1, ..*v }),
        (_, 0) => Ok(FareyVertex { m: m - 1, ..*v }),
        _ => {
            let (mm, nn) = (m as u64, n as u64);
            let vertex = |a, b, m, n| FareyVertex { a, b, m, n };
            Ok(match v.b.cmp_ratio(mm, nn) {
                Ordering::Less => vertex(v.a, v.b, m - 1, n),
                Ordering::Equal => {
                    let c = next_term(v.a, m - 1, n).ok_or_else(|| invalid(v))?;
                    vertex(v.a, c, m - 1, n)
                }
                Ordering::Greater => match v.a.cmp_ratio(mm, nn) {
                    Ordering::Equal => {
                        let c = prev_term(v.b, m, n - 1).ok_or_else(|| invalid(v))?;
                        vertex(c, v.b, m, n - 1)
                    }
                    Ordering::Greater => vertex(v.a, v.b, m, n - 1),
                    // m/n strictly inside (a, b): not an interval of G_{m,n}
                    Ordering::Less => return Err(invalid(v)),
                },
            })
        }
    }
}

fn invalid(v: &FareyVertex) -> Error {
    Error::InvalidInterval(v.to_string())
}

/// The preimage of `v` under the parent map, in closed form.
pub fn children(v: &FareyVertex) -> Children<FareyVertex> {
    let (m, n) = (v.m, v.n);
    let r = |p: u32, q: u32| Q::from_parts(p as u64, q as u64).expect("nonzero");
    let vertex = |a, b, m, n| FareyVertex { a, b, m, n };
    match (m, n) {
        (0, 0) => Children {
            horizontal: Some(vertex(Q::ZERO, Q::INFINITY, 1, 0)),
            vertical: Some(vertex(Q::ZERO, Q::INFINITY, 0, 1)),
        },
        (0, _) => Children {
            horizontal: Some(vertex(Q::ZERO, r(1, n), 1, n)),
            vertical: Some(vertex(Q::ZERO, Q::INFINITY, 0, n + 1)),
        },
        (_, 0) => Children {
            horizontal: Some(vertex(Q::ZERO, Q::INFINITY, m + 1, 0)),
            vertical: Some(vertex(Q::integer(m as u64), Q::INFINITY, m, 1)),
        },
        _ => {
            let (mm, nn) = (m as u64, n as u64);
            // a < (m+1)/n
            let horizontal = (v.a.cmp_ratio(mm + 1, nn) == Ordering::Less).then(|| {
                let b = if v.b.cmp_ratio(mm + 1, nn) == Ordering::Less {
                    v.b
                } else {
                    r(m + 1, n)
                };
                vertex(v.a, b, m + 1, n)
            });
            // b > m/(n+1)
            let vertical = (v.b.cmp_ratio(mm, nn + 1) == Ordering::Greater).then(|| {
                let a = if v.a.cmp_ratio(mm, nn + 1) == Ordering::Greater {
                    v.a
                } else {
                    r(m, n + 1)
                };
                vertex(a, v.b, m, n + 1)
            });
            Children { horizontal, vertical }
        }
    }
}

impl Ord for FareyVertex {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.m, self.n, self.a, self.b).cmp(&(other.m, other.n, other.a, other.b))
    }
}

impl PartialOrd for FareyVertex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FareyVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(({},{}),({},{}))", self.a, self.b, self.m, self.n)
    }
}

impl fmt::Debug for FareyVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Q {
        s.parse().unwrap()
    }

    fn fv(a: &str, b: &str, m: u32, n: u32) -> FareyVertex {
        FareyVertex::new(q(a), q(b), m, n).unwrap()
    }

    fn strs(seq: &FareySequence) -> Vec<String> {
        seq.terms().iter().map(|t| t.to_string()).collect()
    }

    #[test]
    fn sequences() {
        assert_eq!(
            strs(&farey_sequence(3, 2)),
            ["0/1", "1/2", "1/1", "3/2", "2/1", "3/1", "1/0"]
        );
        assert_eq!(strs(&farey_sequence(0, 5)), ["0/1", "1/0"]);
        assert_eq!(strs(&farey_sequence(2, 2)), ["0/1", "1/2", "1/1", "2/1", "1/0"]);
    }

    #[test]
    fn intervals() {
        let iv = farey_intervals(3, 2);
        assert_eq!(iv.len(), 6);
        assert_eq!(iv[0], fv("0/1", "1/2", 3, 2));
        assert_eq!(iv[5], fv("3/1", "1/0", 3, 2));
        assert_eq!(farey_intervals(0, 0), [FareyVertex::ROOT]);
        assert_eq!(farey_intervals(1, 1), [fv("0/1", "1/1", 1, 1), fv("1/1", "1/0", 1, 1)]);
    }

    #[test]
    fn constructor_rejects_non_adjacent() {
        assert!(FareyVertex::new(q("0/1"), q("1/1"), 3, 2).is_err());
        assert!(FareyVertex::new(q("1/1"), q("1/2"), 3, 2).is_err());
        assert!(FareyVertex::new(q("1/3"), q("1/2"), 3, 2).is_err());
    }

    #[test]
    fn parent_examples() {
        assert_eq!(v_map(&fv("0/1", "1/0", 3, 0)).unwrap(), fv("0/1", "1/0", 2, 0));
        assert_eq!(v_map(&fv("1/3", "1/2", 1, 3)).unwrap(), fv("0/1", "1/2", 1, 2));
        assert_eq!(v_map(&FareyVertex::ROOT), Err(Error::Root));
    }

    /// Evaluates the four cases of the parent formula against every
    /// candidate interval of the two possible parent blocks.
    fn brute_force_parent(v: &FareyVertex) -> FareyVertex {
        let (m, n) = (v.m, v.n);
        let ratio = Q::from_parts(m as u64, n as u64).unwrap();
        let left = farey_sequence(m - 1, n);
        let down = farey_sequence(m, n - 1);
        let mut hits = vec![];
        for c in farey_intervals(m - 1, n).into_iter().chain(farey_intervals(m, n - 1)) {
            let ok = if v.b < ratio {
                c.m == m - 1 && c.a == v.a && c.b == v.b
            } else if v.b == ratio {
                let min_above = *left.terms().iter().find(|t| **t > v.a).unwrap();
                c.m == m - 1 && c.a == v.a && c.b == min_above
            } else if v.a == ratio {
                let max_below = *down.terms().iter().rev().find(|t| **t < v.b).unwrap();
                c.n == n - 1 && c.a == max_below && c.b == v.b
            } else {
                c.n == n - 1 && c.a == v.a && c.b == v.b
            };
            if ok {
                hits.push(c);
            }
        }
        assert_eq!(hits.len(), 1, "{v}");
        hits[0]
    }

    #[test]
    fn parent_matches_case_oracle() {
        let v = fv("1/1", "3/2", 3, 2);
        let expected = brute_force_parent(&v);
        // 3/2 = m/n, so the right endpoint moves to the next term of G_{2,2}
        assert_eq!(expected, fv("1/1", "2/1", 2, 2));
        assert_eq!(v_map(&v).unwrap(), expected);
        for m in 1..=7 {
            for n in 1..=7 {
                for v in farey_intervals(m, n) {
                    assert_eq!(v_map(&v).unwrap(), brute_force_parent(&v));
                }
            }
        }
    }

    #[test]
    fn scans_agree_with_materialized_sequences() {
        for m in 0..=9 {
            for n in 0..=9 {
                let seq = farey_sequence(m, n);
                let probes = farey_sequence(m + 1, n + 2);
                for &x in probes.terms() {
                    assert_eq!(next_term(x, m, n), seq.successor(x), "{x} in ({m},{n})");
                    assert_eq!(prev_term(x, m, n), seq.predecessor(x), "{x} in ({m},{n})");
                    assert_eq!(in_sequence(x, m, n), seq.contains(x));
                }
            }
        }
    }

    #[test]
    fn children_examples() {
        let c = children(&FareyVertex::ROOT);
        assert_eq!(c.horizontal, Some(fv("0/1", "1/0", 1, 0)));
        assert_eq!(c.vertical, Some(fv("0/1", "1/0", 0, 1)));

        let c = children(&fv("0/1", "1/2", 1, 2));
        assert_eq!(c.horizontal, Some(fv("0/1", "1/2", 2, 2)));
        assert_eq!(c.vertical, Some(fv("1/3", "1/2", 1, 3)));

        let c = children(&fv("1/1", "1/0", 1, 2));
        assert_eq!(c.horizontal, None);
        assert_eq!(c.vertical, Some(fv("1/1", "1/0", 1, 3)));
    }

    #[test]
    fn transposition() {
        assert_eq!(fv("0/1", "1/0", 0, 3).transpose(), fv("0/1", "1/0", 3, 0));
        assert_eq!(fv("1/1", "3/2", 3, 2).transpose(), fv("2/3", "1/1", 2, 3));
        for v in farey_intervals(3, 2) {
            let t = v.transpose();
            assert!(FareyVertex::new(t.a, t.b, t.m, t.n).is_ok());
            assert_eq!(t.transpose(), v);
        }
    }

    #[test]
    fn round_trip_and_commutation_small_levels() {
        for k in 1..=14u32 {
            for m in 0..=k {
                let n = k - m;
                for v in farey_intervals(m, n) {
                    let p = v_map(&v).unwrap();
                    assert_eq!(p.level(), k - 1);
                    assert!(FareyVertex::new(p.a, p.b, p.m, p.n).is_ok());
                    assert!(children(&p).iter().any(|c| *c == v), "{v}");
                    assert_eq!(v_map(&v.transpose()).unwrap(), p.transpose());
                }
            }
        }
    }

    #[test]
    fn children_structure() {
        for k in 0..=12u32 {
            for m in 0..=k {
                let n = k - m;
                for v in farey_intervals(m, n) {
                    let c = children(&v);
                    assert!((1..=2).contains(&c.count()));
                    if let Some(h) = c.horizontal {
                        assert_eq!((h.m, h.n, h.a), (m + 1, n, v.a));
                        assert!(h.b <= v.b);
                        assert_eq!(v_map(&h).unwrap(), v);
                    }
                    if let Some(w) = c.vertical {
                        assert_eq!((w.m, w.n, w.b), (m, n + 1, v.b));
                        assert!(w.a >= v.a);
                        assert_eq!(v_map(&w).unwrap(), v);
                    }
                    if m > 0 && n > 0 {
                        // a <= m/(n+1) < (m+1)/n <= b never happens
                        let lo = v.a.cmp_ratio(m as u64, n as u64 + 1) != Ordering::Greater;
                        let hi = v.b.cmp_ratio(m as u64 + 1, n as u64) != Ordering::Less;
                        assert!(!(lo && hi), "{v}");
                    }
                }
            }
        }
    }

    #[test]
    fn json_payload() {
        let v = fv("1/1", "3/2", 3, 2);
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, r#"{"a":"1/1","b":"3/2","m":3,"n":2}"#);
        assert_eq!(serde_json::from_str::<FareyVertex>(&json).unwrap(), v);
        assert!(serde_json::from_str::<FareyVertex>(r#"{"a":"0/1","b":"1/1","m":3,"n":2}"#).is_err());
        assert_eq!(v.to_string(), "((1/1,3/2),(3,2))");
    }
}
