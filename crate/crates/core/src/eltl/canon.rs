//! Canonical formulas `p ∧ F ψ1 ∧ … ∧ F ψk ∧ G ψ` and their syntax trees.

use std::fmt;

use super::ast::{show, Formula, Prop};
use crate::ta::ThresholdAutomaton;

/// `prop ∧ F fs[0] ∧ … ∧ G g`, where a missing `g` stands for `G true`.
///
/// Under a `G`, the body's own `g` is always `None`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Canonical {
    pub prop: Prop,
    pub fs: Vec<Canonical>,
    pub g: Option<Box<Canonical>>,
}

impl Canonical {
    pub fn prop_only(prop: Prop) -> Self {
        Canonical { prop, fs: Vec::new(), g: None }
    }

    /// Propositional part of the `G` child (`true` when absent).
    pub fn g_prop(&self) -> Prop {
        self.g.as_ref().map(|g| g.prop.clone()).unwrap_or_default()
    }

    fn conj(mut self, other: Canonical) -> Canonical {
        self.prop.extend(other.prop);
        self.fs.extend(other.fs);
        self.g = match (self.g, other.g) {
            (None, x) | (x, None) => x,
            (Some(a), Some(b)) => Some(Box::new(a.conj(*b))),
        };
        self
    }

    pub fn to_formula(&self) -> Formula {
        let mut parts = vec![Formula::Prop(self.prop.clone())];
        parts.extend(self.fs.iter().map(|f| Formula::f(f.to_formula())));
        parts.push(Formula::g(match &self.g {
            Some(g) => g.to_formula(),
            None => Formula::tt(),
        }));
        Formula::And(parts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RootKind {
    /// The root is the conjunction itself.
    Plain,
    /// The root is `F body`.
    F,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalFormula {
    pub kind: RootKind,
    pub body: Canonical,
}

impl CanonicalFormula {
    pub fn to_formula(&self) -> Formula {
        match self.kind {
            RootKind::Plain => self.body.to_formula(),
            RootKind::F => Formula::f(self.body.to_formula()),
        }
    }
}

/// Canonical form. `F`-children keep their source order and `true`
/// conjuncts are dropped. A top-level `F ψ` stays an `F` root.
pub fn canonicalize(phi: &Formula) -> CanonicalFormula {
    match phi {
        Formula::F(x) => CanonicalFormula { kind: RootKind::F, body: can(x) },
        _ => CanonicalFormula { kind: RootKind::Plain, body: can(phi) },
    }
}

fn can(phi: &Formula) -> Canonical {
    match phi {
        Formula::Prop(p) => Canonical::prop_only(p.clone()),
        Formula::And(xs) => xs.iter().map(can).fold(Canonical::prop_only(Vec::new()), Canonical::conj),
        Formula::F(x) => Canonical { prop: Vec::new(), fs: vec![can(x)], g: None },
        Formula::G(x) => Canonical { prop: Vec::new(), fs: Vec::new(), g: Some(Box::new(flat_g(x))) },
    }
}

/// Body of `G phi` with nested `G`s merged into it (`G G ψ ≡ G ψ`).
fn flat_g(phi: &Formula) -> Canonical {
    match phi {
        Formula::Prop(p) => Canonical::prop_only(p.clone()),
        Formula::And(xs) => xs.iter().map(flat_g).fold(Canonical::prop_only(Vec::new()), Canonical::conj),
        Formula::F(x) => Canonical { prop: Vec::new(), fs: vec![can(x)], g: None },
        Formula::G(x) => flat_g(x),
    }
}

/// Tree identifier such as `0.3.1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub Vec<usize>);

impl NodeId {
    pub fn child(&self, i: usize) -> NodeId {
        let mut v = self.0.clone();
        v.push(i);
        NodeId(v)
    }

    pub fn parse(s: &str) -> Option<NodeId> {
        s.split('.').map(|p| p.parse().ok()).collect::<Option<Vec<_>>>().map(NodeId)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    /// Root labelled by a plain conjunction.
    Root,
    Prop,
    F,
    G,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub id: NodeId,
    pub kind: NodeKind,
    /// Some proper ancestor is a `G` node.
    pub covered: bool,
    /// For root, F and G nodes: the body below the operator.
    pub body: Option<Canonical>,
    /// For proposition nodes: the proposition.
    pub prop: Option<Prop>,
}

impl TreeNode {
    /// Formula labelling the node, for display.
    pub fn label(&self, ta: &ThresholdAutomaton) -> String {
        match (&self.kind, &self.body, &self.prop) {
            (NodeKind::Prop, _, Some(p)) => show(ta, p.as_slice()).to_string(),
            (NodeKind::G, None, _) => "G true".into(),
            (NodeKind::Root, Some(b), _) => show(ta, &b.to_formula()).to_string(),
            (NodeKind::F, Some(b), _) => format!("F ({})", show(ta, &b.to_formula())),
            (NodeKind::G, Some(b), _) => format!("G ({})", show(ta, &b.to_formula())),
            _ => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxTree {
    pub nodes: Vec<TreeNode>,
}

impl SyntaxTree {
    pub fn node(&self, id: &NodeId) -> Option<&TreeNode> {
        self.nodes.iter().find(|n| n.id == *id)
    }

    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    /// F-nodes in tree pre-order.
    pub fn f_nodes(&self) -> impl Iterator<Item = &TreeNode> {
        self.nodes.iter().filter(|n| n.kind == NodeKind::F)
    }
}

/// Builds the syntax tree: each root, `F` and `G` node has the children
/// `p` (id `w.0`), one node per `F`-conjunct, and a final `G` node (`G true`
/// when the body has no `G` part, except below a `G true` leaf).
pub fn syntax_tree(c: &CanonicalFormula) -> SyntaxTree {
    let mut nodes = Vec::new();
    let root = NodeId(vec![0]);
    let kind = match c.kind {
        RootKind::Plain => NodeKind::Root,
        RootKind::F => NodeKind::F,
    };
    nodes.push(TreeNode { id: root.clone(), kind, covered: false, body: Some(c.body.clone()), prop: None });
    expand(&c.body, &root, false, &mut nodes);
    SyntaxTree { nodes }
}

fn expand(body: &Canonical, id: &NodeId, covered: bool, out: &mut Vec<TreeNode>) {
    out.push(TreeNode { id: id.child(0), kind: NodeKind::Prop, covered, body: None, prop: Some(body.prop.clone()) });
    for (i, f) in body.fs.iter().enumerate() {
        let fid = id.child(i + 1);
        out.push(TreeNode { id: fid.clone(), kind: NodeKind::F, covered, body: Some(f.clone()), prop: None });
        expand(f, &fid, covered, out);
    }
    let gid = id.child(body.fs.len() + 1);
    match &body.g {
        Some(g) => {
            out.push(TreeNode { id: gid.clone(), kind: NodeKind::G, covered, body: Some((**g).clone()), prop: None });
            expand(g, &gid, true, out);
        }
        None => out.push(TreeNode { id: gid, kind: NodeKind::G, covered, body: None, prop: None }),
    }
}
