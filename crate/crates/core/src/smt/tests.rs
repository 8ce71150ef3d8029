use super::*;
use crate::eltl::{CForm, PForm};
use crate::guards::Context;
use crate::ta::{flow_classes, parse_ta, ThresholdAutomaton};

fn strb() -> ThresholdAutomaton {
    parse_ta(include_str!("../../../../benchmarks/strb.ta")).unwrap()
}

fn z3() -> Solver {
    Solver::default()
}

#[test]
fn init_for_strb() {
    let ta = strb();
    assert_eq!(
        encode_init(&ta),
        vec![
            "(= (+ k_0_l0 k_0_l1) (+ p_n (* (- 1) p_f)))",
            "(= k_0_l2 0)",
            "(= k_0_l3 0)",
            "(= g_0_x 0)",
            "(and (> p_n (* 3 p_t)) (>= p_t p_f) (>= p_f 0))",
        ]
    );
}

#[test]
fn init_when_all_locations_initial() {
    let ta = parse_ta("ta A\nparams n\nsize n\nshared x\nlocations a b\ninitial a b\n").unwrap();
    let init = encode_init(&ta);
    assert_eq!(init, vec!["(= (+ k_0_a k_0_b) p_n)", "(= g_0_x 0)", "true"]);
}

#[test]
fn init_alone_is_admissible() {
    let ta = strb();
    let q = SmtQuery::new(&ta);
    let QueryResult::Sat(m) = run_solver(&q, &z3()).unwrap() else { panic!("init must be sat") };
    assert!(ta.admissible(&m.params));
    assert_eq!(m.frames[0].total(), m.params[0] - m.params[2]);
}

#[test]
fn step_assertions() {
    let ta = strb();
    let r1 = ta.rule("r1").unwrap();
    assert_eq!(
        encode_step(&ta, 4, r1),
        vec![
            "(= k_5_l0 k_4_l0)",
            "(= (- k_4_l1 k_5_l1) d_5)",
            "(= (- k_5_l2 k_4_l2) d_5)",
            "(= k_5_l3 k_4_l3)",
            "(= g_5_x (+ g_4_x d_5))",
        ]
    );
    let r6 = ta.rule("r6").unwrap();
    let s = encode_step(&ta, 0, r6);
    assert!(s[..4].iter().all(|a| a.starts_with("(= k_1_")));
    assert!(s.contains(&"(>= k_0_l0 d_1)".to_string()));
    assert!(s.contains(&"(= g_1_x g_0_x)".to_string()));
}

#[test]
fn upper_guard_step_checks_last_copy() {
    let ta = parse_ta("ta C\nparams f\nsize 5\nshared x\nlocations a b\ninitial a\nrule r a -> b when x < f do x+=1\n")
        .unwrap();
    let s = encode_step(&ta, 0, 0);
    assert!(s.contains(&"(or (= d_1 0) (< (+ g_0_x (* 1 (- d_1 1))) p_f))".to_string()));
    // with f = 3 at most three processes move at once
    for (k, expect) in [(3, "sat"), (4, "unsat")] {
        let mut q = SmtQuery::new(&ta);
        q.assert("(= p_f 3)".into());
        q.push_step(0);
        q.assert(format!("(= d_1 {k})"));
        assert_eq!(run_solver(&q, &z3()).unwrap().status(), expect, "factor {k}");
    }
}

#[test]
fn contradiction_is_unsat() {
    let ta = strb();
    let mut q = SmtQuery::bare(&ta);
    q.assert("(= k_0_l0 0)".into());
    q.assert("(= k_0_l0 1)".into());
    assert_eq!(run_solver(&q, &z3()).unwrap(), QueryResult::Unsat);
}

#[test]
fn invariant_frame_counts() {
    let ta = strb();
    let zero = vec![PForm::C(CForm::AllZero(vec![0, 2]))];
    assert_eq!(encode_invariant_frames(&ta, 3..6, &zero).len(), 3 * 2);
    assert!(encode_invariant_frames(&ta, 0..10, &Vec::new()).is_empty());
}

#[test]
fn chained_steps_match_concrete_path() {
    let ta = strb();
    let (r1, r4) = (ta.rule("r1").unwrap(), ta.rule("r4").unwrap());
    let mut q = SmtQuery::new(&ta);
    q.assert_all(["(= p_n 4)", "(= p_t 1)", "(= p_f 1)", "(= k_0_l1 3)"].map(String::from));
    q.push_step(r1);
    q.push_step(r4);
    q.assert_guards(1, &[ta.rules[r4].lower[0].clone()], true);
    q.assert_all(["(= d_1 2)", "(= d_2 2)"].map(String::from));
    let QueryResult::Sat(m) = run_solver(&q, &z3()).unwrap() else { panic!() };
    assert_eq!(m.frames[2].kappa, vec![0, 1, 0, 2]);
    assert_eq!(m.frames[2].g, vec![2]);
}

#[test]
fn loop_closure_equates_frames() {
    let ta = strb();
    assert_eq!(
        encode_loop_closure(&ta, 2, 7),
        vec!["(= k_2_l0 k_7_l0)", "(= k_2_l1 k_7_l1)", "(= k_2_l2 k_7_l2)", "(= k_2_l3 k_7_l3)", "(= g_2_x g_7_x)"]
    );
}

#[test]
fn segments_follow_class_order() {
    let ta = strb();
    let classes = flow_classes(&ta);
    let guards = ta.guards();
    let names = |rs: Vec<usize>| rs.iter().map(|&r| ta.rules[r].name.clone()).collect::<Vec<_>>();
    let mut ctx = Context::default();
    assert_eq!(names(segment_rules(&ta, &classes, &ctx, &guards)), ["r1"]);
    ctx.toggle(0, &guards);
    ctx.toggle(1, &guards);
    assert_eq!(names(segment_rules(&ta, &classes, &ctx, &guards)), ["r1", "r5", "r2", "r3", "r4"]);
    let mut q = SmtQuery::new(&ta);
    assert_eq!(push_segment(&mut q, &classes, &ctx, &guards, 3), 15);
    assert_eq!(q.last_frame(), 15);
}

#[test]
fn dump_replays_with_same_status() {
    let ta = strb();
    let mut q = SmtQuery::new(&ta);
    q.push_step(ta.rule("r1").unwrap());
    q.assert("(> k_1_l3 0)".into());
    let text = q.dump();
    assert!(text.ends_with("(check-sat)\n(exit)\n"));
    assert_eq!(z3().run_script(&text).unwrap(), SatResult::Unsat);
    assert_eq!(run_solver(&q, &z3()).unwrap(), QueryResult::Unsat);
}

#[test]
fn missing_solver_is_reported() {
    let bad = Solver::from_command_line("/nonexistent/solver -in", std::time::Duration::from_secs(1));
    let ta = strb();
    assert!(matches!(run_solver(&SmtQuery::new(&ta), &bad), Err(SmtError::Spawn(_))));
}

#[test]
fn timeout_gives_unknown() {
    let slow = Solver::from_command_line("sleep 5", std::time::Duration::from_millis(200));
    assert_eq!(slow.check("", &[]).unwrap(), SatResult::Unknown);
}
