//! JSON and DOT renderings of leveled trees, and JSON parsing back.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::farey::FareyVertex;
use crate::terminal::TerminalPair;
use crate::tree::{AnyTree, LeveledTree, TreeKind, TreeVertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Dot,
}

#[derive(Serialize, Deserialize)]
struct Document<V> {
    kind: TreeKind,
    height: u32,
    levels: Vec<LevelDocument<V>>,
}

#[derive(Serialize, Deserialize)]
struct LevelDocument<V> {
    level: u32,
    vertices: Vec<VertexDocument<V>>,
}

#[derive(Serialize, Deserialize)]
struct VertexDocument<V> {
    id: usize,
    parent: Option<u32>,
    payload: V,
}

#[derive(Deserialize)]
struct Header {
    kind: TreeKind,
}

pub fn write_tree<W: Write>(tree: &AnyTree, format: Format, out: W) -> io::Result<()> {
    match (tree, format) {
        (AnyTree::Farey(t), Format::Json) => write_json(t, out),
        (AnyTree::Pairs(t), Format::Json) => write_json(t, out),
        (AnyTree::Farey(t), Format::Dot) => write_dot(t, out),
        (AnyTree::Pairs(t), Format::Dot) => write_dot(t, out),
    }
}

pub fn write_json<V: TreeVertex, W: Write>(tree: &LeveledTree<V>, mut out: W) -> io::Result<()> {
    // Vertices are copied one level at a time to keep peak memory near the tree's own.
    write!(
        out,
        "{{\"kind\":\"{}\",\"height\":{},\"levels\":[",
        tree.kind(),
        tree.height()
    )?;
    for (k, level) in tree.levels().iter().enumerate() {
        if k > 0 {
            out.write_all(b",")?;
        }
        let up = tree.parent_indices(k as u32);
        let doc = LevelDocument {
            level: k as u32,
            vertices: level
                .iter()
                .enumerate()
                .map(|(id, v)| VertexDocument {
                    id,
                    parent: up.get(id).copied(),
                    payload: *v,
                })
                .collect(),
        };
        serde_json::to_writer(&mut out, &doc)?;
    }
    out.write_all(b"]}\n")
}

pub fn write_dot<V: TreeVertex, W: Write>(tree: &LeveledTree<V>, mut out: W) -> io::Result<()> {
    writeln!(out, "digraph {} {{", tree.kind())?;
    writeln!(out, "  node [shape=box];")?;
    for (k, level) in tree.levels().iter().enumerate() {
        for (i, v) in level.iter().enumerate() {
            writeln!(out, "  \"{k}_{i}\" [label=\"{}\"];", v.dot_label())?;
        }
    }
    for k in 1..tree.levels().len() {
        for (i, p) in tree.parent_indices(k as u32).iter().enumerate() {
            writeln!(out, "  \"{}_{p}\" -> \"{k}_{i}\";", k - 1)?;
        }
    }
    writeln!(out, "}}")
}

pub fn tree_to_json(tree: &AnyTree) -> String {
    let mut buf = Vec::new();
    write_tree(tree, Format::Json, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// Parses a JSON document back into a validated tree.
pub fn read_json(bytes: &[u8]) -> Result<AnyTree> {
    let header: Header = serde_json::from_slice(bytes).map_err(doc_error)?;
    Ok(match header.kind {
        TreeKind::Farey => AnyTree::Farey(parse_levels::<FareyVertex>(bytes)?),
        TreeKind::Terminal | TreeKind::Young => AnyTree::Pairs(parse_levels::<TerminalPair>(bytes)?),
    })
}

fn parse_levels<V: TreeVertex>(bytes: &[u8]) -> Result<LeveledTree<V>> {
    let doc: Document<V> = serde_json::from_slice(bytes).map_err(doc_error)?;
    if doc.levels.len() != doc.height as usize + 1 {
        return Err(Error::Document(format!(
            "height {} with {} levels",
            doc.height,
            doc.levels.len()
        )));
    }
    let mut levels = Vec::with_capacity(doc.levels.len());
    let mut parents = Vec::with_capacity(doc.levels.len());
    for (k, level) in doc.levels.into_iter().enumerate() {
        if level.level as usize != k {
            return Err(Error::Document(format!("level {} found in position {k}", level.level)));
        }
        let mut vertices = Vec::with_capacity(level.vertices.len());
        let mut up = Vec::with_capacity(level.vertices.len());
        for (i, v) in level.vertices.into_iter().enumerate() {
            if v.id != i {
                return Err(Error::Document(format!("level {k}: id {} in position {i}", v.id)));
            }
            match (k, v.parent) {
                (0, None) => {}
                (0, Some(_)) => return Err(Error::Document("the root has a parent".into())),
                (_, Some(p)) => up.push(p),
                (_, None) => return Err(Error::Document(format!("level {k}: vertex {i} has no parent"))),
            }
            vertices.push(v.payload);
        }
        levels.push(vertices);
        parents.push(up);
    }
    LeveledTree::from_levels(doc.kind, levels, parents)
}

fn doc_error(e: serde_json::Error) -> Error {
    Error::Document(e.to_string())
}
