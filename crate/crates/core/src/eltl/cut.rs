//! Cut graphs and enumeration of topological orderings.

use std::fmt;

use super::canon::{NodeId, NodeKind, SyntaxTree};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CutVertex {
    Node(NodeId),
    LoopStart,
    LoopEnd,
}

impl fmt::Display for CutVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CutVertex::Node(id) => write!(f, "{id}"),
            CutVertex::LoopStart => write!(f, "loop_start"),
            CutVertex::LoopEnd => write!(f, "loop_end"),
        }
    }
}

/// Directed graph over cut points; edges are index pairs into `vertices`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutGraph {
    pub vertices: Vec<CutVertex>,
    pub edges: Vec<(usize, usize)>,
    /// Per vertex: is it an F-node below some G-node.
    pub covered: Vec<bool>,
}

impl CutGraph {
    pub fn index(&self, v: &CutVertex) -> Option<usize> {
        self.vertices.iter().position(|x| x == v)
    }

    pub fn loop_start(&self) -> usize {
        self.index(&CutVertex::LoopStart).expect("cut graph has loop_start")
    }

    pub fn loop_end(&self) -> usize {
        self.index(&CutVertex::LoopEnd).expect("cut graph has loop_end")
    }

    /// Edges rendered with vertex names, for assertions and display.
    pub fn named_edges(&self) -> Vec<(String, String)> {
        self.edges.iter().map(|&(a, b)| (self.vertices[a].to_string(), self.vertices[b].to_string())).collect()
    }

    pub fn orderings(&self) -> Orderings {
        Orderings::new(self.vertices.len(), &self.edges)
    }
}

/// F-nodes in tree order, then `loop_start` and `loop_end`. Edges:
/// uncovered F-nodes precede `loop_start`; covered ones lie between
/// `loop_start` and `loop_end`; an uncovered F-node precedes its uncovered
/// F-children; covered F-nodes are chained in lexicographic id order; and
/// `loop_start` precedes `loop_end`.
pub fn cut_graph(tree: &SyntaxTree) -> CutGraph {
    let fnodes: Vec<_> = tree.f_nodes().collect();
    let mut vertices: Vec<CutVertex> = fnodes.iter().map(|n| CutVertex::Node(n.id.clone())).collect();
    let mut covered: Vec<bool> = fnodes.iter().map(|n| n.covered).collect();
    let ls = vertices.len();
    let le = ls + 1;
    vertices.push(CutVertex::LoopStart);
    vertices.push(CutVertex::LoopEnd);
    covered.extend([false, false]);

    let mut edges = Vec::new();
    for (i, n) in fnodes.iter().enumerate() {
        if !n.covered {
            for (j, m) in fnodes.iter().enumerate() {
                let direct_child = m.id.0.len() == n.id.0.len() + 1 && m.id.0.starts_with(&n.id.0);
                if !m.covered && direct_child {
                    edges.push((i, j));
                }
            }
            edges.push((i, ls));
        }
    }
    let mut cov: Vec<usize> = (0..fnodes.len()).filter(|&i| fnodes[i].covered).collect();
    cov.sort_by(|&a, &b| fnodes[a].id.cmp(&fnodes[b].id));
    for &i in &cov {
        edges.push((ls, i));
        edges.push((i, le));
    }
    for w in cov.windows(2) {
        edges.push((w[0], w[1]));
    }
    edges.push((ls, le));
    debug_assert!(fnodes.iter().all(|n| n.kind == NodeKind::F));
    CutGraph { vertices, edges, covered }
}

/// Iterator over all topological orderings of a DAG, in lexicographic order
/// of vertex indices.
///
/// Optionally, a set of vertices can be marked droppable with respect to a
/// pivot: once the pivot is placed, unplaced droppable vertices are removed
/// instead of being ordered.
#[derive(Debug, Clone)]
pub struct Orderings {
    n: usize,
    succ: Vec<Vec<usize>>,
    indeg: Vec<usize>,
    placed: Vec<bool>,
    order: Vec<usize>,
    stack: Vec<Frame>,
    drop: Option<(usize, Vec<bool>)>,
    started: bool,
}

#[derive(Debug, Clone)]
struct Frame {
    cands: Vec<usize>,
    next: usize,
    chosen: Option<usize>,
}

impl Orderings {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut succ = vec![Vec::new(); n];
        let mut indeg = vec![0; n];
        for &(a, b) in edges {
            succ[a].push(b);
            indeg[b] += 1;
        }
        Orderings {
            n,
            succ,
            indeg,
            placed: vec![false; n],
            order: Vec::new(),
            stack: Vec::new(),
            drop: None,
            started: false,
        }
    }

    pub fn with_drop_after(mut self, pivot: usize, droppable: Vec<bool>) -> Self {
        self.drop = Some((pivot, droppable));
        self
    }

    fn pivot_placed(&self) -> bool {
        self.drop.as_ref().is_some_and(|(p, _)| self.placed[*p])
    }

    fn dropped(&self, v: usize) -> bool {
        self.pivot_placed() && self.drop.as_ref().is_some_and(|(_, d)| d[v]) && !self.placed[v]
    }

    fn ready(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| !self.placed[v] && self.indeg[v] == 0 && !self.dropped(v)).collect()
    }

    fn complete(&self) -> bool {
        (0..self.n).all(|v| self.placed[v] || self.dropped(v))
    }

    fn place(&mut self, v: usize) {
        self.placed[v] = true;
        self.order.push(v);
        for &w in &self.succ[v] {
            self.indeg[w] -= 1;
        }
    }

    fn unplace(&mut self, v: usize) {
        self.placed[v] = false;
        self.order.pop();
        for &w in &self.succ[v] {
            self.indeg[w] += 1;
        }
    }
}

impl Iterator for Orderings {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if !self.started {
            self.started = true;
            if self.complete() {
                return Some(Vec::new());
            }
            let cands = self.ready();
            self.stack.push(Frame { cands, next: 0, chosen: None });
        }
        loop {
            let depth = self.stack.len().checked_sub(1)?;
            if let Some(v) = self.stack[depth].chosen.take() {
                self.unplace(v);
            }
            let frame = &mut self.stack[depth];
            if frame.next >= frame.cands.len() {
                self.stack.pop();
                continue;
            }
            let v = frame.cands[frame.next];
            frame.next += 1;
            frame.chosen = Some(v);
            self.place(v);
            if self.complete() {
                return Some(self.order.clone());
            }
            let cands = self.ready();
            self.stack.push(Frame { cands, next: 0, chosen: None });
        }
    }
}

/// Shorthand for [`Orderings::new`].
pub fn topological_orderings(n: usize, edges: &[(usize, usize)]) -> Orderings {
    Orderings::new(n, edges)
}
