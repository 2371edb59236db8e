//! Leveled trees built from the root by their children rules.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::farey::{v_map, Children, FareyVertex};
use crate::terminal::TerminalPair;
use crate::young::suranyi_terminal;

/// Default cap on the total number of vertices a resident build may hold.
pub const DEFAULT_MAX_VERTICES: usize = 60_000_000;

/// Levels smaller than this are expanded on the calling thread.
const PARALLEL_THRESHOLD: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeKind {
    Farey,
    Terminal,
    Young,
}

impl TreeKind {
    pub fn name(&self) -> &'static str {
        match self {
            TreeKind::Farey => "farey",
            TreeKind::Terminal => "terminal",
            TreeKind::Young => "young",
        }
    }
}

impl fmt::Display for TreeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TreeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "farey" => Ok(TreeKind::Farey),
            "terminal" => Ok(TreeKind::Terminal),
            "young" => Ok(TreeKind::Young),
            _ => Err(Error::Document(format!("unknown tree kind {s:?}"))),
        }
    }
}

/// What the tree machinery needs from a vertex type.
pub trait TreeVertex: Copy + Ord + Send + Sync + fmt::Display + fmt::Debug + Serialize + DeserializeOwned {
    const ROOT: Self;

    /// The size indices `(m, n)`.
    fn indices(&self) -> (u32, u32);

    /// Depth of the vertex below the root.
    fn depth(&self) -> u32;

    fn transposed(&self) -> Self;

    fn dot_label(&self) -> String;
}

impl TreeVertex for FareyVertex {
    const ROOT: Self = FareyVertex::ROOT;

    fn indices(&self) -> (u32, u32) {
        (self.m, self.n)
    }

    fn depth(&self) -> u32 {
        self.level()
    }

    fn transposed(&self) -> Self {
        self.transpose()
    }

    fn dot_label(&self) -> String {
        format!("({},{})|{},{}", self.a, self.b, self.m, self.n)
    }
}

impl TreeVertex for TerminalPair {
    const ROOT: Self = TerminalPair::ROOT;

    fn indices(&self) -> (u32, u32) {
        (self.m, self.n)
    }

    fn depth(&self) -> u32 {
        self.level()
    }

    fn transposed(&self) -> Self {
        self.transpose()
    }

    fn dot_label(&self) -> String {
        format!("{},{}|{},{}", self.s, self.t, self.m, self.n)
    }
}

/// A rooted binary tree stored level by level.
///
/// Each level is strictly sorted; `parent(k, i)` is an index into level
/// `k - 1`. Values of this type always satisfy [`LeveledTree::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeveledTree<V> {
    kind: TreeKind,
    levels: Vec<Vec<V>>,
    parents: Vec<Vec<u32>>,
}

impl<V: TreeVertex> LeveledTree<V> {
    /// Assembles a tree from raw levels, checking every structural invariant.
    pub fn from_levels(kind: TreeKind, levels: Vec<Vec<V>>, parents: Vec<Vec<u32>>) -> Result<Self> {
        let tree = Self { kind, levels, parents };
        tree.validate()?;
        Ok(tree)
    }

    pub fn kind(&self) -> TreeKind {
        self.kind
    }

    pub fn height(&self) -> u32 {
        self.levels.len() as u32 - 1
    }

    pub fn levels(&self) -> &[Vec<V>] {
        &self.levels
    }

    pub fn level(&self, k: u32) -> &[V] {
        &self.levels[k as usize]
    }

    /// Parent indices of level `k`; empty for the root level.
    pub fn parent_indices(&self, k: u32) -> &[u32] {
        &self.parents[k as usize]
    }

    pub fn parent(&self, k: u32, i: usize) -> Option<&V> {
        let k = k as usize;
        (k > 0).then(|| &self.levels[k - 1][self.parents[k][i] as usize])
    }

    /// Indices in level `k + 1` of the children of vertex `i` of level `k`.
    pub fn children_of(&self, k: u32, i: usize) -> Children<usize> {
        let mut out = Children {
            horizontal: None,
            vertical: None,
        };
        let Some(next) = self.levels.get(k as usize + 1) else {
            return out;
        };
        let (m, _) = self.levels[k as usize][i].indices();
        for (j, &p) in self.parents[k as usize + 1].iter().enumerate() {
            if p as usize == i {
                if next[j].indices().0 == m + 1 {
                    out.horizontal = Some(j);
                } else {
                    out.vertical = Some(j);
                }
            }
        }
        out
    }

    pub fn vertex_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    /// Vertex counts per `(m, n)` block of level `k`, in canonical order.
    pub fn block_sizes(&self, k: u32) -> Vec<((u32, u32), usize)> {
        block_sizes(self.level(k))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Structure(msg));
        if self.levels.is_empty() || self.levels.len() != self.parents.len() {
            return bad("level and parent tables disagree".into());
        }
        if self.levels[0] != [V::ROOT] || !self.parents[0].is_empty() {
            return bad(format!("level 0 must be the single root {}", V::ROOT));
        }
        let height = self.levels.len() - 1;
        for k in 1..=height {
            let (level, parents, above) = (&self.levels[k], &self.parents[k], &self.levels[k - 1]);
            if parents.len() != level.len() {
                return bad(format!(
                    "level {k} has {} parents for {} vertices",
                    parents.len(),
                    level.len()
                ));
            }
            if let Some(w) = level.windows(2).find(|w| w[0] >= w[1]) {
                return bad(format!("level {k} is not strictly sorted at {}", w[1]));
            }
            let mut seen = vec![0u8; above.len()];
            for (v, &p) in level.iter().zip(parents) {
                if v.depth() as usize != k {
                    return bad(format!("{v} listed at level {k}"));
                }
                let Some(parent) = above.get(p as usize) else {
                    return bad(format!("{v} has no parent at index {p}"));
                };
                let ((m, n), (pm, pn)) = (v.indices(), parent.indices());
                let bit = if (pm + 1, pn) == (m, n) {
                    1
                } else if (pm, pn + 1) == (m, n) {
                    2
                } else {
                    return bad(format!("{v} cannot be a child of {parent}"));
                };
                if seen[p as usize] & bit != 0 {
                    return bad(format!("{parent} has two children in block ({m},{n})"));
                }
                seen[p as usize] |= bit;
            }
            if let Some(i) = seen.iter().position(|&s| s == 0) {
                return bad(format!("{} at level {} is a leaf below the top level", above[i], k - 1));
            }
        }
        Ok(())
    }
}

/// A built tree of any kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyTree {
    Farey(LeveledTree<FareyVertex>),
    Pairs(LeveledTree<TerminalPair>),
}

impl AnyTree {
    pub fn kind(&self) -> TreeKind {
        match self {
            AnyTree::Farey(t) => t.kind(),
            AnyTree::Pairs(t) => t.kind(),
        }
    }

    pub fn height(&self) -> u32 {
        match self {
            AnyTree::Farey(t) => t.height(),
            AnyTree::Pairs(t) => t.height(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            AnyTree::Farey(t) => t.vertex_count(),
            AnyTree::Pairs(t) => t.vertex_count(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    /// Total vertex cap; `None` disables it.
    pub max_vertices: Option<usize>,
    /// Worker threads for per-level work.
    pub jobs: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            max_vertices: Some(DEFAULT_MAX_VERTICES),
            jobs: 1,
        }
    }
}

pub fn build_tree(kind: TreeKind, height: u32, options: &BuildOptions) -> Result<AnyTree> {
    Ok(match kind {
        TreeKind::Farey => AnyTree::Farey(build_farey_tree(height, options)?),
        TreeKind::Terminal => AnyTree::Pairs(build_terminal_tree(height, options)?),
        TreeKind::Young => AnyTree::Pairs(build_young_tree(height, options)?),
    })
}

/// The interval tree, generated by the closed-form children and checked
/// against the parent map on every edge.
pub fn build_farey_tree(height: u32, options: &BuildOptions) -> Result<LeveledTree<FareyVertex>> {
    with_jobs(options.jobs, || {
        grow(TreeKind::Farey, height, options, |prev, level, parents| {
            check_parent_map(prev, level, parents, v_map)
        })
    })
}

pub fn build_terminal_tree(height: u32, options: &BuildOptions) -> Result<LeveledTree<TerminalPair>> {
    with_jobs(options.jobs, || {
        grow(TreeKind::Terminal, height, options, |_, _, _| Ok(()))
    })
}

/// The image of the interval tree under the corner-pair map, re-sorted
/// canonically level by level.
pub fn build_young_tree(height: u32, options: &BuildOptions) -> Result<LeveledTree<TerminalPair>> {
    let farey = build_farey_tree(height, options)?;
    with_jobs(options.jobs, || {
        let mut levels = Vec::with_capacity(farey.levels.len());
        let mut parents = Vec::with_capacity(farey.levels.len());
        let mut rank_above: Vec<u32> = Vec::new();
        for (k, level) in farey.levels.iter().enumerate() {
            let images = map_level(level, suranyi_terminal)?;
            let (sorted, order) = sort_with_order(&images);
            if let Some(j) = sorted.windows(2).position(|w| w[0] == w[1]) {
                return Err(Error::Structure(format!(
                    "{} and {} share the corner pair {}",
                    level[order[j] as usize],
                    level[order[j + 1] as usize],
                    sorted[j]
                )));
            }
            let mut rank = vec![0u32; order.len()];
            for (j, &i) in order.iter().enumerate() {
                rank[i as usize] = j as u32;
            }
            let remapped = if k == 0 {
                Vec::new()
            } else {
                order
                    .iter()
                    .map(|&i| rank_above[farey.parents[k][i as usize] as usize])
                    .collect()
            };
            levels.push(sorted);
            parents.push(remapped);
            rank_above = rank;
        }
        LeveledTree::from_levels(TreeKind::Young, levels, parents)
    })
}

fn grow<V, F>(kind: TreeKind, height: u32, options: &BuildOptions, check: F) -> Result<LeveledTree<V>>
where
    V: ChildRule,
    F: Fn(&[V], &[V], &[u32]) -> Result<()>,
{
    let mut levels = vec![vec![V::ROOT]];
    let mut parents = vec![Vec::new()];
    let mut total = 1usize;
    for _ in 0..height {
        let prev = levels.last().expect("root level");
        let (level, up) = expand(prev)?;
        check(prev, &level, &up)?;
        total += level.len();
        if options.max_vertices.is_some_and(|cap| total > cap) {
            return Err(Error::Budget(options.max_vertices.unwrap()));
        }
        levels.push(level);
        parents.push(up);
    }
    LeveledTree::from_levels(kind, levels, parents)
}

/// Vertex types that carry their own children rule.
pub(crate) trait ChildRule: TreeVertex {
    fn child_set(&self) -> Children<Self>;
}

impl ChildRule for FareyVertex {
    fn child_set(&self) -> Children<Self> {
        self.children()
    }
}

impl ChildRule for TerminalPair {
    fn child_set(&self) -> Children<Self> {
        self.children()
    }
}

/// Children of a sorted level in canonical order, with the index of each
/// child's parent. Fails if two parents share a child.
pub(crate) fn expand<V: ChildRule>(level: &[V]) -> Result<(Vec<V>, Vec<u32>)> {
    let spawn = |(i, v): (usize, &V)| {
        let c = v.child_set();
        c.horizontal.into_iter().chain(c.vertical).map(move |w| (w, i as u32))
    };
    let mut out: Vec<(V, u32)>;
    if level.len() >= PARALLEL_THRESHOLD && rayon::current_num_threads() > 1 {
        out = level.par_iter().enumerate().flat_map_iter(spawn).collect();
        out.par_sort_by(|x, y| x.0.cmp(&y.0));
    } else {
        out = level.iter().enumerate().flat_map(spawn).collect();
        // children of one block arrive as sorted runs; the stable sort merges them
        out.sort_by_key(|x| x.0);
    }
    if let Some(w) = out.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::Structure(format!(
            "{} is a child of both {} and {}",
            w[0].0, level[w[0].1 as usize], level[w[1].1 as usize]
        )));
    }
    Ok(out.into_iter().unzip())
}

/// Checks that `map(level[i]) == prev[parents[i]]` for every vertex.
pub(crate) fn check_parent_map<V, F>(prev: &[V], level: &[V], parents: &[u32], map: F) -> Result<()>
where
    V: TreeVertex,
    F: Fn(&V) -> Result<V> + Sync + Send,
{
    let agrees = |(v, &p): (&V, &u32)| map(v).ok() == Some(prev[p as usize]);
    let bad = if level.len() >= PARALLEL_THRESHOLD && rayon::current_num_threads() > 1 {
        level.par_iter().zip(parents).position_first(|x| !agrees(x))
    } else {
        level.iter().zip(parents).position(|x| !agrees(x))
    };
    match bad {
        None => Ok(()),
        Some(i) => Err(Error::Structure(format!(
            "children rule gives {} under {}, parent map disagrees",
            level[i], prev[parents[i] as usize]
        ))),
    }
}

/// Applies `f` to every vertex, in parallel for large levels.
pub(crate) fn map_level<V, W, F>(level: &[V], f: F) -> Result<Vec<W>>
where
    V: Sync,
    W: Send,
    F: Fn(&V) -> Result<W> + Sync + Send,
{
    if level.len() >= PARALLEL_THRESHOLD && rayon::current_num_threads() > 1 {
        level.par_iter().map(f).collect()
    } else {
        level.iter().map(f).collect()
    }
}

/// Sorted copy of `items` and the permutation that produced it.
pub(crate) fn sort_with_order<V: Ord + Copy + Send + Sync>(items: &[V]) -> (Vec<V>, Vec<u32>) {
    let mut order: Vec<u32> = (0..items.len() as u32).collect();
    if items.len() >= PARALLEL_THRESHOLD && rayon::current_num_threads() > 1 {
        order.par_sort_unstable_by_key(|&i| items[i as usize]);
    } else {
        order.sort_unstable_by_key(|&i| items[i as usize]);
    }
    (order.iter().map(|&i| items[i as usize]).collect(), order)
}

pub(crate) fn block_sizes<V: TreeVertex>(level: &[V]) -> Vec<((u32, u32), usize)> {
    let mut out: Vec<((u32, u32), usize)> = Vec::new();
    for v in level {
        match out.last_mut() {
            Some((block, count)) if *block == v.indices() => *count += 1,
            _ => out.push((v.indices(), 1)),
        }
    }
    out
}

/// Runs `f` on a pool of `jobs` threads, or on the caller for one job.
pub(crate) fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    if jobs <= 1 {
        return f();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Structure(format!("thread pool: {e}")))?
        .install(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::farey::farey_intervals;
    use crate::young::young_terminal_pairs;

    fn pair(s: u64, t: u64, m: u32, n: u32) -> TerminalPair {
        TerminalPair::new(s, t, m, n).unwrap()
    }

    #[test]
    fn terminal_level_one() {
        let tree = build_terminal_tree(1, &BuildOptions::default()).unwrap();
        assert_eq!(tree.level(0), [TerminalPair::ROOT]);
        assert_eq!(tree.level(1), [pair(1, 2, 1, 2), pair(2, 1, 2, 1)]);
        assert_eq!(tree.parent_indices(1), [0, 0]);
    }

    #[test]
    fn farey_height_zero_is_the_root() {
        let tree = build_farey_tree(0, &BuildOptions::default()).unwrap();
        assert_eq!(tree.height(), 0);
        assert_eq!(tree.levels(), [vec![FareyVertex::ROOT]]);
    }

    #[test]
    fn young_block_two_two() {
        let tree = build_young_tree(2, &BuildOptions::default()).unwrap();
        let blocks = tree.block_sizes(2);
        assert!(blocks.contains(&((2, 2), 2)));
        assert_eq!(farey_intervals(1, 1).len(), 2);
    }

    #[test]
    fn blocks_match_across_kinds() {
        let options = BuildOptions::default();
        let farey = build_farey_tree(12, &options).unwrap();
        let terminal = build_terminal_tree(12, &options).unwrap();
        let young = build_young_tree(12, &options).unwrap();
        for k in 0..=12 {
            let shifted: Vec<_> = farey
                .block_sizes(k)
                .into_iter()
                .map(|((m, n), c)| ((m + 1, n + 1), c))
                .collect();
            assert_eq!(shifted, terminal.block_sizes(k), "level {k}");
            assert_eq!(young.level(k), terminal.level(k), "level {k}");
        }
    }

    #[test]
    fn young_blocks_are_the_young_pairs() {
        let young = build_young_tree(7, &BuildOptions::default()).unwrap();
        for k in 0..=7u32 {
            for m in 1..=k + 1 {
                let n = k + 2 - m;
                let block: Vec<_> = young
                    .level(k)
                    .iter()
                    .filter(|p| (p.m, p.n) == (m, n))
                    .copied()
                    .collect();
                assert_eq!(block, young_terminal_pairs(m, n).unwrap());
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let options = BuildOptions {
            max_vertices: Some(10),
            jobs: 1,
        };
        assert_eq!(build_terminal_tree(6, &options), Err(Error::Budget(10)));
        assert!(build_terminal_tree(2, &options).is_ok());
    }

    #[test]
    fn jobs_do_not_change_the_result() {
        let one = build_farey_tree(30, &BuildOptions::default()).unwrap();
        let four = build_farey_tree(
            30,
            &BuildOptions {
                jobs: 4,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn children_of_matches_rule() {
        let tree = build_terminal_tree(8, &BuildOptions::default()).unwrap();
        for k in 0..8 {
            for (i, v) in tree.level(k).iter().enumerate() {
                let rule = v.children();
                let found = tree.children_of(k, i);
                assert_eq!(found.horizontal.map(|j| tree.level(k + 1)[j]), rule.horizontal);
                assert_eq!(found.vertical.map(|j| tree.level(k + 1)[j]), rule.vertical);
            }
        }
    }

    #[test]
    fn validation_rejects_damage() {
        let tree = build_terminal_tree(3, &BuildOptions::default()).unwrap();
        let (levels, parents) = (tree.levels.clone(), tree.parents.clone());

        let mut l = levels.clone();
        l[2].swap(0, 1);
        assert!(LeveledTree::from_levels(TreeKind::Terminal, l, parents.clone()).is_err());

        // an empty top level leaves every vertex of level 2 childless
        let mut l = levels.clone();
        let mut p = parents.clone();
        l[3].clear();
        p[3].clear();
        assert!(LeveledTree::from_levels(TreeKind::Terminal, l, p).is_err());

        let mut p = parents.clone();
        p[1][0] = 7;
        assert!(LeveledTree::from_levels(TreeKind::Terminal, levels.clone(), p).is_err());

        let mut l = levels;
        l[0][0] = pair(2, 1, 2, 1);
        assert!(LeveledTree::from_levels(TreeKind::Terminal, l, parents).is_err());
    }
}
