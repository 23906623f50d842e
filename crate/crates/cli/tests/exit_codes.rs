mod common;

use common::run;
use proptest::prelude::*;

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["no-such-command"]).code, 2);
    assert_eq!(run(&["homology"]).code, 2);
    assert_eq!(run(&["maslov-scan", "--n", "1"]).code, 2);
}

#[test]
fn report_block_is_closed_with_status() {
    let r = run(&["check-d2", "s1.cx"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout.matches("---report---").count(), 2);
    assert_eq!(r.report().get("status").map(String::as_str), Some("ok"));
}

#[test]
fn flipped_consistency_is_a_mathematical_failure() {
    let r = run(&["trees", "consistency", "koszul.cx", "--flipped"]);
    assert_eq!(r.code, 1, "{}", r.stdout);
    assert_eq!(r.report().get("status").map(String::as_str), Some("fail"));
    assert_eq!(run(&["trees", "consistency", "koszul.cx"]).code, 0);
}

#[test]
fn invalid_tree_fails_validation() {
    let r = run(&["trees", "validate", "trees/unstable.tree"]);
    assert_eq!(r.code, 1);
    assert_eq!(run(&["trees", "validate", "trees/cluster.tree"]).code, 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Corrupting one line of a valid spec never crashes the binary.
    #[test]
    fn corrupted_specs_never_panic(line in 0usize..20, junk in "[a-z=*+\\[\\]0-9 /.-]{0,12}") {
        let text = std::fs::read_to_string(common::specs_dir().join("s1.cx")).unwrap();
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        let i = line % lines.len();
        lines[i] = junk;
        let dir = std::env::temp_dir().join(format!("clusterhom-corrupt-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(format!("case{i}.cx"));
        std::fs::write(&path, lines.join("\n")).unwrap();
        let r = run(&["homology", path.to_str().unwrap()]);
        prop_assert!((0..=2).contains(&r.code), "exit {}: {}", r.code, r.stderr);
    }
}
