use ips_tree::{
    accepts, build_tree, build_tree_with_cap, evaluate, evaluate_traced, IpsError, IpsVerifierSpec, NodeKind, TreeValue,
};

fn spec(text: &str) -> IpsVerifierSpec {
    IpsVerifierSpec::parse(text).unwrap()
}

#[test]
fn golden_three_config_tree() {
    let s = spec(include_str!("golden/three_config.ips"));
    let tree = build_tree(&s);
    assert_eq!(tree.render(&s), include_str!("golden/three_config.tree"));
    assert_eq!(evaluate(&tree), TreeValue::True);
}

#[test]
fn accepting_start_is_a_single_leaf() {
    let s = spec("initial: a\na acc\n");
    let tree = build_tree(&s);
    assert_eq!(tree.kind, NodeKind::Acc);
    assert!(tree.children.is_empty());
    assert_eq!(evaluate(&tree), TreeValue::True);
    assert!(!accepts(&spec("initial: r\nr rej\n")));
}

#[test]
fn self_loop_read_leaf_sits_at_depth_one() {
    let s = spec("initial: r\nr read r\n");
    let tree = build_tree(&s);
    assert_eq!(tree.children.len(), 1);
    let leaf = &tree.children[0];
    assert_eq!((leaf.kind, leaf.depth), (NodeKind::Loop(0), 1));
    assert_eq!(evaluate(&tree), TreeValue::False);
}

#[test]
fn cycle_without_exit_is_false() {
    let s = spec("initial: p\np read q\nq read p\n");
    let (v, trace) = evaluate_traced(&build_tree(&s), &s);
    assert_eq!(v, TreeValue::False);
    // q only sees a loop back to p; p turns its own loop into false.
    assert!(
        trace.contains(&"  READ-COMM {q} d=1 = loop[0]".to_string()),
        "{trace:?}"
    );
    assert_eq!(trace.last().unwrap(), "READ-COMM {p} d=0 = false");
}

#[test]
fn cycle_with_exit_is_true() {
    assert!(accepts(&spec("initial: p\np read q a\nq read p p\na acc\n")));
    assert!(!accepts(&spec("initial: p\np read q a\nq read p x\na acc\nx rej\n")));
}

#[test]
fn prover_choice_of_the_accepting_answer() {
    assert!(accepts(&spec("initial: c\nc comm0 a r\na acc\nr rej\n")));
    assert!(accepts(&spec("initial: c\nc comm1 r a\na acc\nr rej\n")));
    assert!(!accepts(&spec("initial: c\nc comm1 r r\na acc\nr rej\n")));
}

#[test]
fn one_answer_serves_every_configuration_of_a_node() {
    // Both branches of the coin ask the same question; each needs a different answer.
    let s = spec("initial: s\ns read c d\nc comm0 a r\nd comm0 r a\na acc\nr rej\n");
    assert!(!accepts(&s));
    // Different questions can be answered separately.
    let s = spec("initial: s\ns read c d\nc comm0 a r\nd comm1 r a\na acc\nr rej\n");
    assert!(accepts(&s));
    assert_eq!(build_tree(&s).children.last().unwrap().kind, NodeKind::Comm01);
}

#[test]
fn stuck_read_cycle_is_not_hidden_by_a_sibling() {
    // After the first coin, one half loops in u forever while the other half
    // can be steered to acceptance.
    let s = spec("initial: s\ns read u c\nu read u\nc comm0 a a\na acc\n");
    assert!(!accepts(&s));
}

#[test]
fn parse_errors() {
    let cases = [
        ("s read s\n", "missing"),
        ("initial: s\ns read t\n", "unknown configuration `t`"),
        ("initial: s\ns write s\n", "unknown class"),
        ("initial: s\ns comm0 s\n", "1 children"),
        ("initial: s\ns acc s\n", "1 children"),
        ("initial: s\ns read a a a\na acc\n", "3 children"),
        ("initial: s\ns acc\ns rej\n", "twice"),
    ];
    for (text, needle) in cases {
        let err = IpsVerifierSpec::parse(text).unwrap_err();
        assert!(err.to_string().contains(needle), "{text:?}: {err}");
    }
    assert!(matches!(
        IpsVerifierSpec::parse("initial: s\ninitial: s\ns acc\n"),
        Err(IpsError::Parse { line: 2, .. })
    ));
}

#[test]
fn text_round_trip() {
    let s = spec(include_str!("golden/three_config.ips"));
    assert_eq!(IpsVerifierSpec::parse(&s.to_text()).unwrap(), s);
    assert!(!s.communication_is_acyclic());
    assert!(spec("initial: s\ns read c\nc comm1 a a\na acc\n").communication_is_acyclic());
}

#[test]
fn tight_cap_cuts_long_chains() {
    let s = spec("initial: p0\np0 read p1\np1 read p2\np2 read p3\np3 read a\na acc\n");
    assert_eq!(build_tree(&s).height(), 4);
    assert!(accepts(&s));
    let short = build_tree_with_cap(&s, 2);
    assert_eq!(short.height(), 3);
    assert_eq!(evaluate(&short), TreeValue::False);
}
