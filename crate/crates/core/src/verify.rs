//! Level-by-level checks that the interval tree, the terminal tree and the
//! Young tree are the same tree.
//!
//! Every check compares adjacent levels only, so the streaming walker and
//! the resident one run the same code on the same data.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::farey::{farey_intervals, v_map, FareyVertex};
use crate::terminal::{decompress, enumerate_e_lshapes, u_map, TerminalPair};
use crate::tree::{
    block_sizes, build_farey_tree, build_terminal_tree, check_parent_map, expand, map_level, sort_with_order,
    with_jobs, BuildOptions, LeveledTree,
};
use crate::young::{suranyi_terminal, young_terminal_pairs};

/// Largest height verified by an earlier computer search.
pub const PUBLISHED_CHECK_HEIGHT: u32 = 1000;

/// Heights up to this one default to resident memory.
pub const RESIDENT_MAX_HEIGHT: u32 = 120;

pub const DEFAULT_LSHAPE_MAX_SUM: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VerifyMode {
    /// Young level sets equal terminal level sets, and the Young parent
    /// map equals the terminal one.
    #[serde(rename = "theorem1")]
    LevelSets,
    /// The corner-pair map is a level-wise bijection carrying parent edges
    /// to parent edges.
    #[serde(rename = "isomorphism")]
    Isomorphism,
    /// Brute-force L-shape enumeration agrees with the Young pairs.
    #[serde(rename = "corollary2")]
    LShapes,
    #[serde(rename = "all")]
    All,
}

impl VerifyMode {
    pub fn name(&self) -> &'static str {
        match self {
            VerifyMode::LevelSets => "theorem1",
            VerifyMode::Isomorphism => "isomorphism",
            VerifyMode::LShapes => "corollary2",
            VerifyMode::All => "all",
        }
    }

    fn walks_trees(&self) -> bool {
        !matches!(self, VerifyMode::LShapes)
    }

    fn enumerates(&self) -> bool {
        matches!(self, VerifyMode::LShapes | VerifyMode::All)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MemoryMode {
    /// Build the whole trees first.
    Resident,
    /// Keep two adjacent levels at a time.
    Streaming,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub mode: VerifyMode,
    /// `None` picks resident memory up to [`RESIDENT_MAX_HEIGHT`].
    pub memory: Option<MemoryMode>,
    pub jobs: usize,
    /// L-shapes are enumerated for every size with `m + n` up to this.
    pub lshape_max_sum: u32,
    pub guard: u32,
    /// Vertex cap for resident builds.
    pub max_vertices: Option<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            mode: VerifyMode::All,
            memory: None,
            jobs: 1,
            lshape_max_sum: DEFAULT_LSHAPE_MAX_SUM,
            guard: crate::terminal::DEFAULT_ENUMERATION_GUARD,
            max_vertices: BuildOptions::default().max_vertices,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
}

/// Vertex count of one `(m, n)` block, indexed by the terminal size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockCount {
    pub m: u32,
    pub n: u32,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelStats {
    pub level: u32,
    pub blocks: Vec<BlockCount>,
}

impl LevelStats {
    pub fn vertices(&self) -> usize {
        self.blocks.iter().map(|b| b.count).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub height: u32,
    pub mode: VerifyMode,
    /// `None` when no tree was walked.
    pub memory: Option<MemoryMode>,
    /// Tree levels that passed, root first.
    pub levels: Vec<LevelStats>,
    /// Sizes whose L-shapes were enumerated.
    pub lshape_blocks: Vec<BlockCount>,
    pub published_check_height: u32,
    pub outcome: Outcome,
    pub counterexample: Option<String>,
}

impl VerificationReport {
    fn new(height: u32, mode: VerifyMode) -> Self {
        Self {
            height,
            mode,
            memory: None,
            levels: Vec::new(),
            lshape_blocks: Vec::new(),
            published_check_height: PUBLISHED_CHECK_HEIGHT,
            outcome: Outcome::Pass,
            counterexample: None,
        }
    }

    fn fail(&mut self, why: String) {
        self.outcome = Outcome::Fail;
        self.counterexample = Some(why);
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    pub fn vertices_checked(&self) -> usize {
        self.levels.iter().map(LevelStats::vertices).sum()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let outcome = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{outcome} mode={} height={}", self.mode.name(), self.height)?;
        if let Some(memory) = self.memory {
            let memory = match memory {
                MemoryMode::Resident => "resident",
                MemoryMode::Streaming => "streaming",
            };
            write!(
                f,
                " memory={memory} levels={} vertices={}",
                self.levels.len(),
                self.vertices_checked()
            )?;
        }
        if !self.lshape_blocks.is_empty() {
            let shapes: usize = self.lshape_blocks.iter().map(|b| b.count).sum();
            write!(f, " lshape-sizes={} lshapes={shapes}", self.lshape_blocks.len())?;
        }
        write!(
            f,
            " (earlier computer check: up to height {})",
            self.published_check_height
        )?;
        if let Some(why) = &self.counterexample {
            write!(f, "\ncounterexample: {why}")?;
        }
        Ok(())
    }
}

/// Runs the checks selected by `options.mode` up to `height`.
///
/// Mismatches land in the report; errors are reserved for bad arguments
/// and exhausted budgets.
pub fn verify(height: u32, options: &VerifyOptions) -> Result<VerificationReport> {
    let mut report = VerificationReport::new(height, options.mode);
    if options.mode.walks_trees() {
        let memory = options.memory.unwrap_or(if height <= RESIDENT_MAX_HEIGHT {
            MemoryMode::Resident
        } else {
            MemoryMode::Streaming
        });
        report.memory = Some(memory);
        with_jobs(options.jobs, || match memory {
            MemoryMode::Resident => walk_resident(height, options, &mut report),
            MemoryMode::Streaming => walk_streaming(height, &mut report),
        })?;
    }
    if options.mode.enumerates() && report.passed() {
        check_lshapes(options.lshape_max_sum, options.guard, &mut report)?;
    }
    Ok(report)
}

pub fn verify_level_sets(height: u32) -> Result<VerificationReport> {
    verify(
        height,
        &VerifyOptions {
            mode: VerifyMode::LevelSets,
            ..Default::default()
        },
    )
}

pub fn verify_isomorphism(height: u32) -> Result<VerificationReport> {
    verify(
        height,
        &VerifyOptions {
            mode: VerifyMode::Isomorphism,
            ..Default::default()
        },
    )
}

/// Compares enumerated L-shapes with Young pairs for all `m + n <= max_sum`.
pub fn verify_lshapes(max_sum: u32, guard: u32) -> Result<VerificationReport> {
    verify(
        max_sum,
        &VerifyOptions {
            mode: VerifyMode::LShapes,
            lshape_max_sum: max_sum,
            guard,
            ..Default::default()
        },
    )
}

/// One level of all three trees, with the corner pairs of the intervals
/// kept in interval order.
struct Level {
    farey: Vec<FareyVertex>,
    farey_up: Vec<u32>,
    corners: Vec<TerminalPair>,
    terminal: Vec<TerminalPair>,
    terminal_up: Vec<u32>,
}

impl Level {
    fn root() -> Self {
        Self {
            farey: vec![FareyVertex::ROOT],
            farey_up: Vec::new(),
            corners: vec![TerminalPair::ROOT],
            terminal: vec![TerminalPair::ROOT],
            terminal_up: Vec::new(),
        }
    }
}

fn walk_streaming(height: u32, report: &mut VerificationReport) -> Result<()> {
    let mut prev = Level::root();
    if !check_root(&prev, report) {
        return Ok(());
    }
    for k in 1..=height {
        let (farey, farey_up) = match expand(&prev.farey) {
            Ok(x) => x,
            Err(e) => return fail(report, e),
        };
        let (terminal, terminal_up) = match expand(&prev.terminal) {
            Ok(x) => x,
            Err(e) => return fail(report, e),
        };
        let mut level = Level {
            farey,
            farey_up,
            corners: Vec::new(),
            terminal,
            terminal_up,
        };
        if !check_level(k, &prev, &mut level, report)? {
            return Ok(());
        }
        prev = level;
    }
    Ok(())
}

fn walk_resident(height: u32, options: &VerifyOptions, report: &mut VerificationReport) -> Result<()> {
    let build = BuildOptions {
        max_vertices: options.max_vertices,
        jobs: options.jobs,
    };
    let farey = match build_farey_tree(height, &build) {
        Err(e @ Error::Structure(_)) => return fail(report, e),
        other => other?,
    };
    let terminal = match build_terminal_tree(height, &build) {
        Err(e @ Error::Structure(_)) => return fail(report, e),
        other => other?,
    };
    let level_of = |k: u32, farey: &LeveledTree<FareyVertex>, terminal: &LeveledTree<TerminalPair>| Level {
        farey: farey.level(k).to_vec(),
        farey_up: farey.parent_indices(k).to_vec(),
        corners: Vec::new(),
        terminal: terminal.level(k).to_vec(),
        terminal_up: terminal.parent_indices(k).to_vec(),
    };
    let mut prev = Level::root();
    if !check_root(&prev, report) {
        return Ok(());
    }
    for k in 1..=height {
        let mut level = level_of(k, &farey, &terminal);
        if !check_level(k, &prev, &mut level, report)? {
            return Ok(());
        }
        prev = level;
    }
    Ok(())
}

fn fail(report: &mut VerificationReport, e: Error) -> Result<()> {
    report.fail(e.to_string());
    Ok(())
}

fn check_root(root: &Level, report: &mut VerificationReport) -> bool {
    match suranyi_terminal(&FareyVertex::ROOT) {
        Ok(p) if p == TerminalPair::ROOT => {
            report.levels.push(stats(0, &root.terminal));
            true
        }
        other => {
            report.fail(format!("root interval maps to {other:?}, not {}", TerminalPair::ROOT));
            false
        }
    }
}

fn stats(level: u32, terminal: &[TerminalPair]) -> LevelStats {
    LevelStats {
        level,
        blocks: block_sizes(terminal)
            .into_iter()
            .map(|((m, n), count)| BlockCount { m, n, count })
            .collect(),
    }
}

/// Checks level `k` against level `k - 1`, filling in `level.corners`.
/// Returns false after recording a counterexample.
fn check_level(k: u32, prev: &Level, level: &mut Level, report: &mut VerificationReport) -> Result<bool> {
    // both trees must agree with their own parent maps
    if let Err(e) = check_parent_map(&prev.farey, &level.farey, &level.farey_up, v_map) {
        report.fail(format!("level {k}: {e}"));
        return Ok(false);
    }
    if let Err(e) = check_parent_map(&prev.terminal, &level.terminal, &level.terminal_up, u_map) {
        report.fail(format!("level {k}: {e}"));
        return Ok(false);
    }

    level.corners = map_level(&level.farey, suranyi_terminal)?;
    let (young, order) = sort_with_order(&level.corners);
    if let Some(j) = young.windows(2).position(|w| w[0] == w[1]) {
        report.fail(format!(
            "level {k}: {} and {} have the same corner pair {}",
            level.farey[order[j] as usize],
            level.farey[order[j + 1] as usize],
            young[j]
        ));
        return Ok(false);
    }
    if young != level.terminal {
        let why = match young.iter().zip(&level.terminal).position(|(y, t)| y != t) {
            Some(j) => format!(
                "level {k}: Young vertex {} (from {}) against terminal vertex {}",
                young[j], level.farey[order[j] as usize], level.terminal[j]
            ),
            None => format!(
                "level {k}: {} Young vertices against {} terminal vertices",
                young.len(),
                level.terminal.len()
            ),
        };
        report.fail(why);
        return Ok(false);
    }

    // Both sorted sequences are equal, so walking `order` alongside the
    // terminal level is the inverse lookup. The interval's parent is known
    // to be `prev.farey[farey_up[i]]`, whose corner pair is cached.
    for (j, p) in level.terminal.iter().enumerate() {
        let i = order[j] as usize;
        let via_interval = prev.corners[level.farey_up[i] as usize];
        let via_terminal = prev.terminal[level.terminal_up[j] as usize];
        if via_interval != via_terminal {
            report.fail(format!(
                "level {k}: {p} comes from {}; the interval's parent gives {via_interval}, \
                 the terminal parent is {via_terminal}",
                level.farey[i]
            ));
            return Ok(false);
        }
    }
    report.levels.push(stats(k, &level.terminal));
    Ok(true)
}

fn check_lshapes(max_sum: u32, guard: u32, report: &mut VerificationReport) -> Result<()> {
    if max_sum > guard {
        return Err(Error::Guard {
            m: max_sum - 1,
            n: 1,
            guard,
        });
    }
    for sum in 2..=max_sum {
        for m in 1..sum {
            let n = sum - m;
            let shapes = enumerate_e_lshapes(m, n, guard)?;
            let mut from_shapes: Vec<TerminalPair> = Vec::with_capacity(shapes.len());
            for shape in &shapes {
                let p = shape.terminal_pair();
                match decompress(&p) {
                    Ok(back) if back == *shape => from_shapes.push(p),
                    _ => {
                        report.fail(format!("L-shape {shape} is not recovered from its corner pair {p}"));
                        return Ok(());
                    }
                }
            }
            from_shapes.sort_unstable();
            let young = young_terminal_pairs(m, n)?;
            let intervals = farey_intervals(m - 1, n - 1).len();
            if from_shapes != young || young.len() != intervals {
                report.fail(format!(
                    "size ({m},{n}): {} L-shapes, {} Young pairs, {intervals} intervals",
                    from_shapes.len(),
                    young.len()
                ));
                return Ok(());
            }
            report.lshape_blocks.push(BlockCount {
                m,
                n,
                count: young.len(),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(height: u32, mode: VerifyMode, memory: MemoryMode) -> VerificationReport {
        let options = VerifyOptions {
            mode,
            memory: Some(memory),
            lshape_max_sum: 6,
            ..Default::default()
        };
        verify(height, &options).unwrap()
    }

    #[test]
    fn small_heights_pass() {
        for mode in [VerifyMode::LevelSets, VerifyMode::Isomorphism, VerifyMode::All] {
            for height in [0, 1, 4, 20] {
                let report = run(height, mode, MemoryMode::Streaming);
                assert!(report.passed(), "{report}");
                assert_eq!(report.counterexample, None);
                assert_eq!(report.levels.len() as u32, height + 1);
            }
        }
    }

    #[test]
    fn memory_modes_agree() {
        let a = run(24, VerifyMode::All, MemoryMode::Streaming);
        let b = run(24, VerifyMode::All, MemoryMode::Resident);
        assert_eq!(a.levels, b.levels);
        assert_eq!(a.outcome, b.outcome);
    }

    #[test]
    fn height_four_blocks() {
        let report = run(4, VerifyMode::Isomorphism, MemoryMode::Resident);
        let counts: Vec<Vec<usize>> = report
            .levels
            .iter()
            .map(|l| l.blocks.iter().map(|b| b.count).collect())
            .collect();
        assert_eq!(counts[1], [1, 1]);
        assert_eq!(counts[2], [1, 2, 1]);
        assert_eq!(counts[3], [1, 3, 3, 1]);
        assert_eq!(counts[4], [1, 4, 4, 4, 1]);
    }

    #[test]
    fn lshape_counts() {
        let report = verify_lshapes(7, 9).unwrap();
        assert!(report.passed(), "{report}");
        assert!(report.memory.is_none());
        let find = |m, n| {
            report
                .lshape_blocks
                .iter()
                .find(|b| (b.m, b.n) == (m, n))
                .unwrap()
                .count
        };
        assert_eq!(find(1, 1), 1);
        assert_eq!(find(2, 2), 2);
        assert_eq!(find(4, 3), 6);
    }

    #[test]
    fn lshape_guard() {
        assert!(matches!(verify_lshapes(10, 9), Err(Error::Guard { .. })));
    }

    #[test]
    fn broken_level_is_reported() {
        let mut report = VerificationReport::new(1, VerifyMode::All);
        let prev = Level::root();
        let mut level = Level {
            farey: vec![
                FareyVertex::ROOT.children().horizontal.unwrap(),
                FareyVertex::ROOT.children().vertical.unwrap(),
            ],
            farey_up: vec![0, 0],
            corners: Vec::new(),
            terminal: vec![TerminalPair::new(1, 2, 1, 2).unwrap()],
            terminal_up: vec![0],
        };
        level.farey.sort();
        assert!(!check_level(1, &prev, &mut level, &mut report).unwrap());
        assert_eq!(report.outcome, Outcome::Fail);
        assert!(report.counterexample.is_some());
    }
}
