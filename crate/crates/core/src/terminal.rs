//! Terminal pairs of difference equation type and the L-shapes they compress.
//!
//! An L-shape of size `(m, n)` is a map on the bottom row `(i, 1)` and the
//! left column `(1, j)` of an `m x n` table into `[mn]`. Condition `E_{m,n}`
//! asks every step along the row (column) to equal the number of column
//! (row) values not exceeding the new value. Such an L-shape is determined
//! by its terminal pair `(f(m,1), f(1,n), (m,n))`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::farey::Children;

/// Default bound on `m + n` for [`enumerate_e_lshapes`].
pub const DEFAULT_ENUMERATION_GUARD: u32 = 9;

/// `(s, t, (m, n))` with `s, t` in `[mn]`.
///
/// Membership in the terminal-pair set of size `(m, n)` is not a stored
/// flag: a pair is known to be a member when it was produced from the root
/// by [`TerminalPair::children`], or when [`decompress`] succeeds.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPair")]
pub struct TerminalPair {
    pub s: u64,
    pub t: u64,
    pub m: u32,
    pub n: u32,
}

#[derive(Deserialize)]
struct RawPair {
    s: u64,
    t: u64,
    m: u32,
    n: u32,
}

impl TryFrom<RawPair> for TerminalPair {
    type Error = Error;

    fn try_from(raw: RawPair) -> Result<Self> {
        TerminalPair::new(raw.s, raw.t, raw.m, raw.n)
    }
}

impl TerminalPair {
    pub const ROOT: Self = Self { s: 1, t: 1, m: 1, n: 1 };

    /// Checks `m, n >= 1` and `s, t` in `[mn]`.
    pub fn new(s: u64, t: u64, m: u32, n: u32) -> Result<Self> {
        let p = Self { s, t, m, n };
        let size = m as u64 * n as u64;
        if m == 0 || n == 0 || !(1..=size).contains(&s) || !(1..=size).contains(&t) {
            return Err(Error::InvalidPair(p.to_string()));
        }
        Ok(p)
    }

    /// Level in the tree: `m + n - 2`.
    #[inline]
    pub fn level(&self) -> u32 {
        self.m + self.n - 2
    }

    #[inline]
    pub fn difference(&self) -> i64 {
        self.s as i64 - self.t as i64
    }

    #[inline]
    pub fn transpose(&self) -> Self {
        Self {
            s: self.t,
            t: self.s,
            m: self.n,
            n: self.m,
        }
    }

    pub fn parent(&self) -> Result<Self> {
        u_map(self)
    }

    pub fn children(&self) -> Children<Self> {
        children(self)
    }
}

/// The inter-level map `u_{m,n}`: drop the last column when `s > t`,
/// the last row when `s < t`.
pub fn u_map(p: &TerminalPair) -> Result<TerminalPair> {
    let TerminalPair { s, t, m, n } = *p;
    if (m, n) == (1, 1) {
        return Err(Error::Root);
    }
    let invalid = || Error::InvalidPair(p.to_string());
    if s > t {
        if m < 2 || s <= n as u64 {
            return Err(invalid());
        }
        TerminalPair::new(s - n as u64, t, m - 1, n).map_err(|_| invalid())
    } else if s < t {
        if n < 2 || t <= m as u64 {
            return Err(invalid());
        }
        TerminalPair::new(s, t - m as u64, m, n - 1).map_err(|_| invalid())
    } else {
        Err(invalid())
    }
}

/// Horizontal child `(s+n, t, (m+1, n))` when `s - t > -n`, vertical child
/// `(s, t+m, (m, n+1))` when `s - t < m`.
pub fn children(p: &TerminalPair) -> Children<TerminalPair> {
    let TerminalPair { s, t, m, n } = *p;
    let (mm, nn) = (m as u64, n as u64);
    Children {
        horizontal: (s + nn > t).then(|| TerminalPair {
            s: s + nn,
            t,
            m: m + 1,
            n,
        }),
        vertical: (s < t + mm).then(|| TerminalPair {
            s,
            t: t + mm,
            m,
            n: n + 1,
        }),
    }
}

/// Values of an L-shape: `bottom[i-1] = f(i,1)` and `left[j-1] = f(1,j)`.
///
/// The constructor enforces lengths, the shared corner `f(1,1) = 1` and the
/// range `[mn]`. Injectivity is part of [`check_e`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawLShape")]
pub struct LShape {
    bottom: Vec<u64>,
    left: Vec<u64>,
}

#[derive(Deserialize)]
struct RawLShape {
    bottom: Vec<u64>,
    left: Vec<u64>,
}

impl TryFrom<RawLShape> for LShape {
    type Error = Error;

    fn try_from(raw: RawLShape) -> Result<Self> {
        LShape::new(raw.bottom, raw.left)
    }
}

impl LShape {
    pub fn new(bottom: Vec<u64>, left: Vec<u64>) -> Result<Self> {
        let bad = |why: String| Err(Error::MalformedLShape(why));
        if bottom.is_empty() || left.is_empty() {
            return bad("empty row or column".into());
        }
        if bottom[0] != 1 || left[0] != 1 {
            return bad(format!("corner values {} and {}, expected 1", bottom[0], left[0]));
        }
        let size = bottom.len() as u64 * left.len() as u64;
        if let Some(x) = bottom.iter().chain(&left).find(|x| !(1..=size).contains(*x)) {
            return bad(format!("value {x} outside [1, {size}]"));
        }
        Ok(Self { bottom, left })
    }

    pub fn m(&self) -> u32 {
        self.bottom.len() as u32
    }

    pub fn n(&self) -> u32 {
        self.left.len() as u32
    }

    pub fn bottom(&self) -> &[u64] {
        &self.bottom
    }

    pub fn left(&self) -> &[u64] {
        &self.left
    }

    pub fn terminal_pair(&self) -> TerminalPair {
        TerminalPair {
            s: *self.bottom.last().unwrap(),
            t: *self.left.last().unwrap(),
            m: self.m(),
            n: self.n(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            bottom: self.left.clone(),
            left: self.bottom.clone(),
        }
    }

    /// Keeps the first `m` columns and `n` rows. Values are not revalidated
    /// against the smaller range.
    pub fn restrict(&self, m: u32, n: u32) -> Self {
        Self {
            bottom: self.bottom[..m as usize].to_vec(),
            left: self.left[..n as usize].to_vec(),
        }
    }

    fn is_injective(&self) -> bool {
        let mut all: Vec<u64> = self.bottom.iter().chain(&self.left[1..]).copied().collect();
        all.sort_unstable();
        all.windows(2).all(|w| w[0] != w[1])
    }
}

impl fmt::Display for LShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bottom={:?} left={:?}", self.bottom, self.left)
    }
}

fn count_le(values: &[u64], x: u64) -> u64 {
    values.iter().filter(|v| **v <= x).count() as u64
}

/// Both halves of `E_{m,n}`, with values also required to be distinct.
pub fn check_e(shape: &LShape) -> bool {
    if !shape.is_injective() {
        return false;
    }
    let (bottom, left) = (&shape.bottom, &shape.left);
    let rows_ok = bottom
        .windows(2)
        .all(|w| w[1].checked_sub(w[0]) == Some(count_le(left, w[1])));
    rows_ok
        && left
            .windows(2)
            .all(|w| w[1].checked_sub(w[0]) == Some(count_le(bottom, w[1])))
}

/// Rebuilds the L-shape of a terminal pair by walking `u` up to the root.
///
/// Each pair `(s, t, (m', n'))` met on the way fixes `f(m',1) = s` and
/// `f(1,n') = t`. Any failure of the walk, or of `E_{m,n}` on the result,
/// means `p` is not a terminal pair of difference equation type.
pub fn decompress(p: &TerminalPair) -> Result<LShape> {
    let not_terminal = || Error::NotTerminal(p.to_string());
    let p = TerminalPair::new(p.s, p.t, p.m, p.n).map_err(|_| not_terminal())?;
    let mut bottom = vec![0u64; p.m as usize];
    let mut left = vec![0u64; p.n as usize];
    let mut cur = p;
    loop {
        bottom[cur.m as usize - 1] = cur.s;
        left[cur.n as usize - 1] = cur.t;
        if (cur.m, cur.n) == (1, 1) {
            if (cur.s, cur.t) != (1, 1) {
                return Err(not_terminal());
            }
            break;
        }
        cur = u_map(&cur).map_err(|_| not_terminal())?;
    }
    let shape = LShape::new(bottom, left).map_err(|_| not_terminal())?;
    if check_e(&shape) {
        Ok(shape)
    } else {
        Err(not_terminal())
    }
}

/// Exhaustive search for every injective L-shape of size `(m, n)` with
/// `f(1,1) = 1` satisfying `E_{m,n}`, in canonical order.
///
/// The column values are tried in every order; each row value is checked
/// against its equation as soon as it is placed.
pub fn enumerate_e_lshapes(m: u32, n: u32, guard: u32) -> Result<Vec<LShape>> {
    if m == 0 || n == 0 || m + n > guard {
        return Err(Error::Guard { m, n, guard });
    }
    let size = m as u64 * n as u64;
    let mut search = Search {
        size,
        used: vec![false; size as usize + 1],
        bottom: vec![1],
        left: vec![1],
        m: m as usize,
        n: n as usize,
        found: vec![],
    };
    search.used[1] = true;
    search.place_left();
    search.found.sort();
    Ok(search.found)
}

struct Search {
    size: u64,
    used: Vec<bool>,
    bottom: Vec<u64>,
    left: Vec<u64>,
    m: usize,
    n: usize,
    found: Vec<LShape>,
}

impl Search {
    fn place_left(&mut self) {
        if self.left.len() == self.n {
            return self.place_bottom();
        }
        for x in 2..=self.size {
            if !self.used[x as usize] {
                self.used[x as usize] = true;
                self.left.push(x);
                self.place_left();
                self.left.pop();
                self.used[x as usize] = false;
            }
        }
    }

    fn place_bottom(&mut self) {
        if self.bottom.len() == self.m {
            let shape = LShape {
                bottom: self.bottom.clone(),
                left: self.left.clone(),
            };
            if check_e(&shape) {
                self.found.push(shape);
            }
            return;
        }
        let prev = *self.bottom.last().unwrap();
        for x in 2..=self.size {
            if self.used[x as usize] || x.checked_sub(prev) != Some(count_le(&self.left, x)) {
                continue;
            }
            self.used[x as usize] = true;
            self.bottom.push(x);
            self.place_bottom();
            self.bottom.pop();
            self.used[x as usize] = false;
        }
    }
}

impl Ord for TerminalPair {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.m, self.n, self.s, self.t).cmp(&(other.m, other.n, other.s, other.t))
    }
}

impl PartialOrd for TerminalPair {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for TerminalPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},({},{}))", self.s, self.t, self.m, self.n)
    }
}

impl fmt::Debug for TerminalPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tp(s: u64, t: u64, m: u32, n: u32) -> TerminalPair {
        TerminalPair::new(s, t, m, n).unwrap()
    }

    fn shape(bottom: &[u64], left: &[u64]) -> LShape {
        LShape::new(bottom.to_vec(), left.to_vec()).unwrap()
    }

    #[test]
    fn condition_e_examples() {
        assert!(check_e(&shape(&[1, 2, 4, 7], &[1, 3, 6])));
        assert!(check_e(&shape(&[1, 2, 4], &[1, 3, 6])));
        assert!(!check_e(&shape(&[1, 2], &[1, 2])));
        // distinct, but 5 - 2 != #{1, 3}
        assert!(!check_e(&shape(&[1, 2, 5], &[1, 3, 6])));
    }

    #[test]
    fn structural_errors_are_not_false() {
        assert!(LShape::new(vec![], vec![1]).is_err());
        assert!(LShape::new(vec![2, 1], vec![2]).is_err());
        assert!(LShape::new(vec![1, 2], vec![1, 5]).is_err());
        assert!(LShape::new(vec![1, 0], vec![1, 2]).is_err());
    }

    #[test]
    fn parent_examples() {
        assert_eq!(u_map(&tp(7, 6, 4, 3)).unwrap(), tp(4, 6, 3, 3));
        for m in 2..10 {
            assert_eq!(u_map(&tp(m, 1, m as u32, 1)).unwrap(), tp(m - 1, 1, m as u32 - 1, 1));
        }
        assert_eq!(u_map(&tp(1, 2, 1, 2)).unwrap(), TerminalPair::ROOT);
        assert_eq!(u_map(&TerminalPair::ROOT), Err(Error::Root));
        assert!(u_map(&tp(3, 3, 2, 2)).is_err());
    }

    #[test]
    fn children_examples() {
        let c = children(&TerminalPair::ROOT);
        assert_eq!(c.horizontal, Some(tp(2, 1, 2, 1)));
        assert_eq!(c.vertical, Some(tp(1, 2, 1, 2)));

        let c = children(&tp(4, 3, 2, 3));
        assert_eq!(c.horizontal, Some(tp(7, 3, 3, 3)));
        assert_eq!(c.vertical, Some(tp(4, 5, 2, 4)));

        let c = children(&tp(2, 5, 2, 3));
        assert_eq!(c.horizontal, None);
        assert_eq!(c.vertical, Some(tp(2, 7, 2, 4)));
    }

    #[test]
    fn transposition() {
        assert_eq!(tp(7, 6, 4, 3).transpose(), tp(6, 7, 3, 4));
        assert_eq!(TerminalPair::ROOT.transpose(), TerminalPair::ROOT);
        assert_eq!(tp(7, 6, 4, 3).transpose().transpose(), tp(7, 6, 4, 3));
        let s = shape(&[1, 2, 4, 7], &[1, 3, 6]);
        assert_eq!(s.transpose(), shape(&[1, 3, 6], &[1, 2, 4, 7]));
        assert_eq!(s.transpose().terminal_pair(), tp(6, 7, 3, 4));
    }

    #[test]
    fn decompress_examples() {
        assert_eq!(decompress(&tp(7, 6, 4, 3)).unwrap(), shape(&[1, 2, 4, 7], &[1, 3, 6]));
        assert_eq!(decompress(&TerminalPair::ROOT).unwrap(), shape(&[1], &[1]));
        for m in 1..12u64 {
            let expected: Vec<u64> = (1..=m).collect();
            assert_eq!(decompress(&tp(m, 1, m as u32, 1)).unwrap(), shape(&expected, &[1]));
        }
    }

    #[test]
    fn decompress_rejects_non_members() {
        // (2,2,(2,2)) has s = t away from the root
        assert!(matches!(decompress(&tp(2, 2, 2, 2)), Err(Error::NotTerminal(_))));
        // (1,4,(2,2)) -> (1,2,(2,1)) -> t must be 1 at n = 1
        assert!(decompress(&tp(1, 4, 2, 2)).is_err());
        // (4,1,(2,2)) -> (2,1,(1,2)) -> s > t at m = 1
        assert!(decompress(&tp(4, 1, 2, 2)).is_err());
        assert!(decompress(&TerminalPair { s: 9, t: 1, m: 2, n: 2 }).is_err());
    }

    #[test]
    fn enumeration_small_sizes() {
        assert_eq!(enumerate_e_lshapes(1, 1, 9).unwrap(), [shape(&[1], &[1])]);
        // |G_{1,1}| - 1 = 2
        assert_eq!(enumerate_e_lshapes(2, 2, 9).unwrap().len(), 2);
        let found = enumerate_e_lshapes(4, 3, 9).unwrap();
        assert_eq!(found.len(), 6);
        assert!(found.contains(&shape(&[1, 2, 4, 7], &[1, 3, 6])));
        assert!(matches!(enumerate_e_lshapes(5, 5, 9), Err(Error::Guard { .. })));
        assert!(enumerate_e_lshapes(0, 3, 9).is_err());
    }

    /// Every pair reachable from the root within `levels` levels.
    fn generated(levels: u32) -> Vec<TerminalPair> {
        let mut all = vec![TerminalPair::ROOT];
        let mut level = vec![TerminalPair::ROOT];
        for _ in 0..levels {
            level = level
                .iter()
                .flat_map(|p| children(p).iter().copied().collect::<Vec<_>>())
                .collect();
            all.extend(&level);
        }
        all
    }

    #[test]
    fn generated_pairs_round_trip() {
        for p in generated(12) {
            for c in children(&p).iter() {
                assert_eq!(u_map(c).unwrap(), p);
            }
            assert!((1..=2).contains(&children(&p).count()));
            let shape = decompress(&p).unwrap();
            assert!(check_e(&shape));
            assert_eq!(shape.terminal_pair(), p);
            if p != TerminalPair::ROOT {
                assert_eq!(u_map(&p.transpose()).unwrap(), u_map(&p).unwrap().transpose());
            }
        }
    }

    #[test]
    fn restriction_inherits_condition_e() {
        for m in 1..=5 {
            for n in 1..=(8 - m) {
                for f in enumerate_e_lshapes(m, n, 9).unwrap() {
                    let TerminalPair { s, t, .. } = f.terminal_pair();
                    if s > t {
                        assert!(m >= 2);
                        assert_eq!(s, f.bottom()[m as usize - 2] + n as u64);
                        assert!(check_e(&f.restrict(m - 1, n)));
                    } else if s < t {
                        assert!(n >= 2);
                        assert_eq!(t, f.left()[n as usize - 2] + m as u64);
                        assert!(check_e(&f.restrict(m, n - 1)));
                    }
                }
            }
        }
    }

    #[test]
    fn json_payloads() {
        let p = tp(7, 6, 4, 3);
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"{"s":7,"t":6,"m":4,"n":3}"#);
        assert!(serde_json::from_str::<TerminalPair>(r#"{"s":13,"t":6,"m":4,"n":3}"#).is_err());
        let s = shape(&[1, 2, 4, 7], &[1, 3, 6]);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"bottom":[1,2,4,7],"left":[1,3,6]}"#);
        assert_eq!(serde_json::from_str::<LShape>(&json).unwrap(), s);
    }
}
