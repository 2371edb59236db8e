//! Generalized Farey intervals, terminal pairs of difference equation type
//! and Young ranking tables, with the three rooted binary trees they span
//! and a verifier for the isomorphisms between them.
//!
//! All arithmetic is exact: slopes are [`ExtendedRational`] values and
//! ranking comparisons are done by cross multiplication.

pub mod error;
pub mod export;
pub mod farey;
pub mod rational;
pub mod terminal;
pub mod tree;
pub mod verify;
pub mod young;

pub use error::{Error, Result};
pub use farey::{
    children as farey_children, farey_intervals, farey_sequence, v_map, Children, FareySequence, FareyVertex,
};
pub use rational::ExtendedRational;
pub use terminal::{check_e, decompress, enumerate_e_lshapes, u_map, LShape, TerminalPair};
pub use tree::{
    build_farey_tree, build_terminal_tree, build_tree, build_young_tree, AnyTree, BuildOptions, LeveledTree, TreeKind,
    TreeVertex,
};
pub use verify::{
    verify, verify_isomorphism, verify_level_sets, verify_lshapes, MemoryMode, Outcome, VerificationReport, VerifyMode,
    VerifyOptions,
};
pub use young::{
    delta, delta_one_sided, phi_map, ranking_table, suranyi_inverse, suranyi_table, suranyi_terminal,
    young_terminal_pairs, RankingTable, Side, YoungTerminalPair,
};
