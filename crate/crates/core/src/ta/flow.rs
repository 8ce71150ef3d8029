//! Rule classes: strongly connected components of the "may directly follow"
//! relation on rules (`r1` then `r2` when `r1.to == r2.from`), listed in a
//! fixed topological order.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::ThresholdAutomaton;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowClasses {
    /// Classes in linear order; members sorted by rule index.
    pub classes: Vec<Vec<usize>>,
    /// Class index of each rule.
    pub class_of: Vec<usize>,
    /// Whether the class lies on a cycle (self-loops included).
    pub is_loop: Vec<bool>,
}

impl FlowClasses {
    /// Position of each rule in the class order (ties inside a class broken
    /// by rule index).
    pub fn linear_index(&self, rule: usize) -> usize {
        self.class_of[rule]
    }

    /// Non-self-loop rules of a loop class in cycle order, starting from the
    /// smallest rule index. For a class that is not a simple cycle the members
    /// are returned in index order.
    pub fn cycle_order(&self, ta: &ThresholdAutomaton, class: usize) -> Vec<usize> {
        let members: Vec<usize> =
            self.classes[class].iter().copied().filter(|&r| !ta.rules[r].is_self_loop()).collect();
        let Some(&first) = members.first() else { return Vec::new() };
        let mut out = vec![first];
        let mut cur = first;
        while out.len() < members.len() {
            let next = members.iter().copied().find(|&r| ta.rules[r].from == ta.rules[cur].to && !out.contains(&r));
            match next {
                Some(r) => {
                    out.push(r);
                    cur = r;
                }
                None => return members,
            }
        }
        out
    }
}

pub fn flow_classes(ta: &ThresholdAutomaton) -> FlowClasses {
    let n = ta.rules.len();
    let succ: Vec<Vec<usize>> =
        (0..n).map(|a| (0..n).filter(|&b| ta.rules[a].to == ta.rules[b].from).collect()).collect();
    let comp = tarjan(&succ);
    let ncomp = comp.iter().copied().max().map_or(0, |m| m + 1);

    let mut members = vec![Vec::new(); ncomp];
    for (r, &c) in comp.iter().enumerate() {
        members[c].push(r);
    }
    let mut indeg = vec![0usize; ncomp];
    let mut cedges = vec![Vec::new(); ncomp];
    for a in 0..n {
        for &b in &succ[a] {
            let (ca, cb) = (comp[a], comp[b]);
            if ca != cb && !cedges[ca].contains(&cb) {
                cedges[ca].push(cb);
                indeg[cb] += 1;
            }
        }
    }
    // Kahn's algorithm; among ready classes take the one with the smallest rule.
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> =
        (0..ncomp).filter(|&c| indeg[c] == 0).map(|c| Reverse((members[c][0], c))).collect();
    let mut order = Vec::with_capacity(ncomp);
    while let Some(Reverse((_, c))) = heap.pop() {
        order.push(c);
        for &d in &cedges[c] {
            indeg[d] -= 1;
            if indeg[d] == 0 {
                heap.push(Reverse((members[d][0], d)));
            }
        }
    }
    let mut rank = vec![0; ncomp];
    for (i, &c) in order.iter().enumerate() {
        rank[c] = i;
    }
    let classes: Vec<Vec<usize>> = order.iter().map(|&c| members[c].clone()).collect();
    let is_loop = classes.iter().map(|m| m.len() > 1 || ta.rules[m[0]].is_self_loop()).collect();
    FlowClasses { classes, class_of: comp.iter().map(|&c| rank[c]).collect(), is_loop }
}

/// Tarjan's SCC algorithm; returns a component id per node.
pub(crate) fn tarjan(succ: &[Vec<usize>]) -> Vec<usize> {
    struct St<'a> {
        succ: &'a [Vec<usize>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        comp: Vec<usize>,
        next_index: usize,
        next_comp: usize,
    }
    fn visit(s: &mut St<'_>, v: usize) {
        s.index[v] = Some(s.next_index);
        s.low[v] = s.next_index;
        s.next_index += 1;
        s.stack.push(v);
        s.on_stack[v] = true;
        for &w in &s.succ[v] {
            match s.index[w] {
                None => {
                    visit(s, w);
                    s.low[v] = s.low[v].min(s.low[w]);
                }
                Some(iw) if s.on_stack[w] => s.low[v] = s.low[v].min(iw),
                Some(_) => {}
            }
        }
        if Some(s.low[v]) == s.index[v] {
            loop {
                let w = s.stack.pop().unwrap();
                s.on_stack[w] = false;
                s.comp[w] = s.next_comp;
                if w == v {
                    break;
                }
            }
            s.next_comp += 1;
        }
    }
    let n = succ.len();
    let mut s = St {
        succ,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        comp: vec![0; n],
        next_index: 0,
        next_comp: 0,
    };
    for v in 0..n {
        if s.index[v].is_none() {
            visit(&mut s, v);
        }
    }
    s.comp
}
