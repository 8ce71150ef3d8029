use super::*;
use crate::counter::{Configuration, Transition};
use crate::ta::{parse_ta, ThresholdAutomaton};

fn strb() -> ThresholdAutomaton {
    parse_ta(include_str!("../../../../benchmarks/strb.ta")).unwrap()
}

/// Five locations standing for the atoms a..e; no rules.
fn letters() -> ThresholdAutomaton {
    parse_ta("ta letters\nsize 1\nlocations a b c d e\ninitial a\n").unwrap()
}

fn nested(ta: &ThresholdAutomaton) -> Formula {
    parse_formula("F([a]!=0 & F [d]!=0 & F [e]!=0 & G [b]!=0 & G F [c]!=0)", ta, &[]).unwrap()
}

fn ids(tree: &SyntaxTree) -> Vec<String> {
    tree.nodes.iter().map(|n| n.id.to_string()).collect()
}

#[test]
fn parse_liveness_negation() {
    let ta = strb();
    let src = "guard g1 := x >= t + 1\nguard g2 := x >= n - t\n\
               define fair := [l1]=0 & (!g1 | ([l0]=0 & [l1]=0)) & (!g2 | ([l0]=0 & [l2]=0))\n\
               spec corr := E([l0]=0 & G([l3]=0) & G F fair)\n";
    let file = parse_spec(src, &ta).unwrap();
    let f = file.get("corr").unwrap();
    match f {
        Formula::And(xs) => {
            assert_eq!(xs.len(), 3);
            assert_eq!(xs[0], Formula::Prop(vec![PForm::C(CForm::AllZero(vec![0]))]));
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(file.get("nope"), Err(SpecError::NoSuchSpec(_))));
}

#[test]
fn parse_true_and_rejections() {
    let ta = strb();
    assert_eq!(parse_formula("E(true)", &ta, &[]).unwrap(), Formula::Prop(vec![]));
    let e = parse_formula("E([l0]=0 | [l1]=0)", &ta, &[]).unwrap_err();
    assert!(matches!(e, SpecError::OutOfGrammar { .. }), "{e}");
    let e = parse_formula("[l0]=0 & [l1]=0 | [l2]!=0", &ta, &[]).unwrap_err();
    assert!(e.to_string().contains("parentheses"), "{e}");
    let e = parse_formula("![l0]=0", &ta, &[]).unwrap_err();
    assert!(matches!(e, SpecError::OutOfGrammar { .. }), "{e}");
    let e = parse_formula("[l7]=0", &ta, &[]).unwrap_err();
    assert!(matches!(e, SpecError::UnknownName { .. }), "{e}");
    let e = parse_formula("[l0]=1", &ta, &[]).unwrap_err();
    assert!(matches!(e, SpecError::OutOfGrammar { .. }), "{e}");
    let e = parse_formula("F [l0]!=0 | [l1]!=0", &ta, &[]).unwrap_err();
    assert!(matches!(e, SpecError::OutOfGrammar { .. }), "{e}");
}

#[test]
fn nonzero_disjunction_merges() {
    let ta = strb();
    let f = parse_formula("[l0]!=0 | [l1]!=0 | [l2]!=0", &ta, &[]).unwrap();
    assert_eq!(f, Formula::Prop(vec![PForm::C(CForm::AnyNonZero(vec![0, 1, 2]))]));
}

#[test]
fn rendering_reparses() {
    let ta = strb();
    let src = "guard g1 := x >= t + 1\n\
               spec s := E(G F ([l1]=0 & (!g1 | ([l0]=0 & [l1]=0))) & F([l3]!=0 & G([l0]!=0 | [l2]!=0)))\n";
    let file = parse_spec(src, &ta).unwrap();
    let f = file.get("s").unwrap();
    let text = show(&ta, f).to_string();
    assert_eq!(&parse_formula(&text, &ta, &file.guards).unwrap(), f);
}

#[test]
fn canonical_nested() {
    let ta = letters();
    let c = canonicalize(&nested(&ta));
    assert_eq!(c.kind, RootKind::F);
    let nz = |l| vec![PForm::C(CForm::AnyNonZero(vec![l]))];
    let leaf = |l| Canonical::prop_only(nz(l));
    let expected = Canonical {
        prop: nz(0),
        fs: vec![leaf(3), leaf(4)],
        g: Some(Box::new(Canonical { prop: nz(1), fs: vec![leaf(2)], g: None })),
    };
    assert_eq!(c.body, expected);
}

#[test]
fn canonical_small_cases() {
    let ta = strb();
    let p = parse_formula("[l0]=0", &ta, &[]).unwrap();
    let c = canonicalize(&p);
    assert_eq!(c.kind, RootKind::Plain);
    assert_eq!(c.body, Canonical::prop_only(vec![PForm::C(CForm::AllZero(vec![0]))]));
    let gp = parse_formula("G [l0]=0", &ta, &[]).unwrap();
    let c = canonicalize(&gp);
    assert!(c.body.prop.is_empty() && c.body.fs.is_empty());
    assert_eq!(*c.body.g.unwrap(), Canonical::prop_only(vec![PForm::C(CForm::AllZero(vec![0]))]));
    // nested G collapses
    let ggp = parse_formula("G (G [l0]=0 & [l1]=0)", &ta, &[]).unwrap();
    let c = canonicalize(&ggp);
    assert_eq!(c.body.g.unwrap().prop.len(), 2);
}

#[test]
fn nested_tree() {
    let ta = letters();
    let tree = syntax_tree(&canonicalize(&nested(&ta)));
    assert_eq!(
        ids(&tree),
        vec![
            "0", "0.0", "0.1", "0.1.0", "0.1.1", "0.2", "0.2.0", "0.2.1", "0.3", "0.3.0", "0.3.1", "0.3.1.0",
            "0.3.1.1", "0.3.2"
        ]
    );
    let fs: Vec<String> = tree.f_nodes().map(|n| n.id.to_string()).collect();
    assert_eq!(fs, vec!["0", "0.1", "0.2", "0.3.1"]);
    let g = tree.node(&NodeId::parse("0.3").unwrap()).unwrap();
    assert_eq!(g.kind, NodeKind::G);
    assert!(tree.node(&NodeId::parse("0.3.1").unwrap()).unwrap().covered);
    assert!(!tree.node(&NodeId::parse("0.2").unwrap()).unwrap().covered);
}

#[test]
fn rank0_tree() {
    let ta = strb();
    let tree = syntax_tree(&canonicalize(&parse_formula("[l0]=0", &ta, &[]).unwrap()));
    assert_eq!(ids(&tree), vec!["0", "0.0", "0.1"]);
    assert_eq!(tree.nodes[2].kind, NodeKind::G);
    assert!(tree.nodes[2].body.is_none());
}

#[test]
fn liveness_tree_has_one_covered_f_node() {
    let ta = strb();
    let f = parse_formula("E(G F [l1]=0 & [l0]=0 & G [l3]=0)", &ta, &[]).unwrap();
    let tree = syntax_tree(&canonicalize(&f));
    let fs: Vec<&TreeNode> = tree.f_nodes().collect();
    assert_eq!(fs.len(), 1);
    assert!(fs[0].covered);
    assert_eq!(fs[0].id.to_string(), "0.1.1");
}

#[test]
fn fig6_cut_graph() {
    let ta = letters();
    let tree = syntax_tree(&canonicalize(&nested(&ta)));
    let g = cut_graph(&tree);
    let names: Vec<String> = g.vertices.iter().map(|v| v.to_string()).collect();
    assert_eq!(names, vec!["0", "0.1", "0.2", "0.3.1", "loop_start", "loop_end"]);
    let mut edges = g.named_edges();
    edges.sort();
    let mut expected: Vec<(String, String)> = [
        ("0", "0.1"),
        ("0", "0.2"),
        ("0", "loop_start"),
        ("0.1", "loop_start"),
        ("0.2", "loop_start"),
        ("loop_start", "0.3.1"),
        ("0.3.1", "loop_end"),
        ("loop_start", "loop_end"),
    ]
    .iter()
    .map(|(a, b)| (a.to_string(), b.to_string()))
    .collect();
    expected.sort();
    assert_eq!(edges, expected);
    let orders: Vec<Vec<usize>> = g.orderings().collect();
    assert_eq!(orders, vec![vec![0, 1, 2, 4, 3, 5], vec![0, 2, 1, 4, 3, 5]]);
}

#[test]
fn no_f_nodes_cut_graph() {
    let ta = strb();
    let tree = syntax_tree(&canonicalize(&parse_formula("G [l0]=0", &ta, &[]).unwrap()));
    let g = cut_graph(&tree);
    assert_eq!(g.vertices, vec![CutVertex::LoopStart, CutVertex::LoopEnd]);
    assert_eq!(g.edges, vec![(0, 1)]);
    assert_eq!(g.orderings().count(), 1);
}

#[test]
fn covered_pairs_get_one_direction() {
    let ta = strb();
    let f = parse_formula("G(F [l0]=0 & F [l1]=0)", &ta, &[]).unwrap();
    let g = cut_graph(&syntax_tree(&canonicalize(&f)));
    let (a, b) = (0, 1);
    assert!(g.edges.contains(&(a, b)) ^ g.edges.contains(&(b, a)));
}

#[test]
fn three_free_nodes_give_six_orders() {
    let edges = [(0, 3), (1, 3), (2, 3), (3, 4)];
    assert_eq!(topological_orderings(5, &edges).count(), 6);
    assert_eq!(topological_orderings(2, &[(0, 1)]).collect::<Vec<_>>(), vec![vec![0, 1]]);
    assert_eq!(topological_orderings(0, &[]).collect::<Vec<_>>(), vec![Vec::<usize>::new()]);
    assert_eq!(topological_orderings(2, &[(0, 1), (1, 0)]).count(), 0);
}

#[test]
fn dropping_after_pivot() {
    // 0 -> 1 guards, 2 pivot, 3 after pivot
    let o = topological_orderings(4, &[(0, 1), (2, 3)]).with_drop_after(2, vec![true, true, false, false]);
    let all: Vec<Vec<usize>> = o.collect();
    assert_eq!(all, vec![vec![0, 1, 2, 3], vec![0, 2, 3], vec![2, 3]]);
}

fn config(kappa: &[i64]) -> Configuration {
    Configuration { kappa: kappa.to_vec(), g: vec![], p: vec![] }
}

/// Two locations, a 2-cycle and self-loops.
fn ping() -> ThresholdAutomaton {
    parse_ta("ta p\nsize 1\nlocations a b\ninitial a\nrule ab a -> b\nrule ba b -> a\nrule aa a -> a\n").unwrap()
}

#[test]
fn lasso_construction_and_eval() {
    let ta = ping();
    let start = config(&[1, 0]);
    let l = Lasso::new(&ta, &start, vec![Transition::new(2, 1)], vec![Transition::new(0, 1), Transition::new(1, 1)])
        .unwrap();
    assert_eq!(l.len(), 3);
    assert_eq!(l.loop_start(), 1);
    let gf_b = parse_formula("G F [b]!=0", &ta, &[]).unwrap();
    let fg_b = parse_formula("F G [b]!=0", &ta, &[]).unwrap();
    assert!(eval_on_lasso(&l, &gf_b));
    assert!(!eval_on_lasso(&l, &fg_b));
    assert!(eval_on_lasso(&l, &Formula::tt()));
    let open = Lasso::new(&ta, &start, vec![], vec![Transition::new(0, 1)]);
    assert_eq!(open.unwrap_err(), LassoError::NotClosed);
}

#[test]
fn witness_for_nested_shape() {
    let ta = letters();
    // a and b at 0; d at 1; e at 2; loop over 3..: b and c together.
    let states: Vec<Configuration> =
        vec![config(&[1, 1, 0, 0, 0]), config(&[0, 1, 0, 1, 0]), config(&[0, 1, 0, 0, 1]), config(&[0, 1, 1, 0, 0])];
    // Build the lasso directly from a TA whose rules walk through the states.
    let ta2 = parse_ta(
        "ta walk\nsize 2\nlocations a b c d e\ninitial a b\n\
         rule ad a -> d\nrule de d -> e\nrule ec e -> c\nrule cc c -> c\n",
    )
    .unwrap();
    let start = states[0].clone();
    let l = Lasso::new(
        &ta2,
        &start,
        vec![Transition::new(0, 1), Transition::new(1, 1), Transition::new(2, 1)],
        vec![Transition::new(3, 1)],
    )
    .unwrap();
    assert_eq!(l.states(), states.as_slice());
    let c = canonicalize(&nested(&ta));
    let tree = syntax_tree(&c);
    let g = cut_graph(&tree);
    // vertices: 0, 0.1, 0.2, 0.3.1, loop_start, loop_end
    let zeta = CutFunction::new(&g, &l, vec![0, 1, 2, 3, 3, 3]).unwrap();
    assert_eq!(check_witness(&l, &c, &tree, &g, &zeta), Ok(()));
    assert!(eval_on_lasso(&l, &nested(&ta)));
    // 0.2 before 0.1 is a valid order, but e does not hold at position 1
    let bad = CutFunction::new(&g, &l, vec![0, 2, 1, 3, 3, 3]).unwrap();
    assert!(check_witness(&l, &c, &tree, &g, &bad).is_err());
    // edge 0.1 -> loop_start violated
    assert!(CutFunction::new(&g, &l, vec![0, 3, 2, 3, 1, 3]).is_err());
    let (l2, z2) = unwinding(&l, &c, &tree, &g).unwrap();
    assert_eq!(check_witness(&l2, &c, &tree, &g, &z2), Ok(()));
}
