use jacobi_selftest::{criterion_ids, run_one};

#[test]
fn ids_are_one_through_fourteen() {
    assert_eq!(criterion_ids(), (1..=14).collect::<Vec<_>>());
    assert!(run_one(0, true).is_none());
    assert!(run_one(15, true).is_none());
}

#[test]
fn fast_criteria_pass_and_format() {
    for id in [1, 2, 12, 13] {
        let o = run_one(id, true).unwrap();
        assert_eq!(o.id, id);
        assert!(o.passed, "{o}");
        let line = o.to_string();
        assert!(line.starts_with("PASS ["), "{line}");
    }
}

#[test]
fn expansion_order_reports_its_slopes() {
    let o = run_one(4, true).unwrap();
    assert!(o.detail.contains("t-slope") && o.detail.contains("λ-envelope"), "{}", o.detail);
}
