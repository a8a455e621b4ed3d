use worksworld::benchgen;
use worksworld::grounding::ground;
use worksworld::pddl::{emit_domain, emit_problem, read_pddl, read_problem, PddlError};
use worksworld::validator::{parse_plan, validate};
use worksworld::Q;

const GOLDEN_DOMAIN: &str = include_str!("golden/domain.pddl");
const HAND_PLAN: &str = include_str!("golden/minimal_chain.timestamped.plan");

#[test]
fn domain_matches_golden_file() {
    assert_eq!(emit_domain(), GOLDEN_DOMAIN);
}

#[test]
fn problem_emission_is_byte_stable() {
    for inst in [benchgen::table4_instance(4, 3), benchgen::gen_complex(2, 1).unwrap()] {
        let a = emit_problem(&inst);
        assert_eq!(a, emit_problem(&inst));
        let back = read_problem(&emit_domain(), &a).unwrap();
        assert_eq!(emit_problem(&back), a);
    }
}

#[test]
fn read_grounding_matches_direct_grounding() {
    let inst = benchgen::table4_instance(2, 3);
    let direct = ground(&inst);
    let read = read_pddl(&emit_domain(), &emit_problem(&inst)).unwrap();
    assert_eq!(read.stats(), direct.stats());
    let texts = |g: &worksworld::grounding::GroundProblem| {
        let mut v: Vec<String> = g.actions.iter().map(|a| g.action_text(a)).collect();
        v.sort();
        v
    };
    assert_eq!(texts(&read), texts(&direct));
}

#[test]
fn hand_written_timestamped_plan_validates() {
    let inst = benchgen::minimal_chain();
    let plan = parse_plan(HAND_PLAN).unwrap();
    assert_eq!(plan.steps.len(), 6);
    let r = validate(&inst, &plan);
    assert!(r.valid, "{:?}", r.diagnostics);
    // two schedules at 10 msg/s, two intrasite connects at 0.5 ms
    assert_eq!(r.latency, Q::new(1, 10) * Q::int(4) + Q::new(5, 10_000) * Q::int(2));
    // 1 of 16 cores, 100 of 10240 MB, two connects of 10 MB/s over 1000 MB/s
    assert_eq!(r.cost, Q::new(1, 16) + Q::new(100, 10240) + Q::new(20, 1000));
    assert_eq!(r.workflow.nodes.len(), 3);
    assert!(r.dag.ok());
}

#[test]
fn unsupported_constructs_are_named() {
    let domain = emit_domain().replacen("(:action", "(:durative-action", 1);
    let e = read_pddl(&domain, &emit_problem(&benchgen::minimal_chain())).unwrap_err();
    assert!(matches!(e, PddlError::Unsupported { .. }), "{e}");
}

#[test]
fn truncated_problem_is_a_syntax_error() {
    let text = emit_problem(&benchgen::minimal_chain());
    let e = read_pddl(&emit_domain(), &text[..text.len() / 2]).unwrap_err();
    assert!(matches!(e, PddlError::Syntax { .. }), "{e}");
}
