use mott1d::config::parse_config;
use mott1d::report::{run_experiment, write_csv, SignChoice};

#[test]
fn zero_coupling_gives_zero_probability() {
    let cfg = parse_config(
        r#"
        oracle.n_points = 4096
        [experiment]
        lambda_sweep = [10]
        a2_sign = "plus"
        lambda0 = 0.0
        "#,
    )
    .unwrap();
    let rows = run_experiment(&cfg.spec()).unwrap();
    assert_eq!(rows.len(), 1);
    let r = &rows[0];
    assert_eq!(r.p_oracle, Some(0.0));
    assert_eq!(r.p_leading, Some(0.0));
    assert_eq!(r.ratio, None);
    assert!(r.error.is_none());
}

#[test]
fn small_sweep_is_ordered_and_serializes() {
    let cfg = parse_config(
        r#"
        oracle.n_points = 4096
        [experiment]
        lambda_sweep = [10, 12]
        a2_sign = "both"
        workers = 2
        "#,
    )
    .unwrap();
    assert_eq!(cfg.experiment.a2_sign, SignChoice::Both);
    let rows = run_experiment(&cfg.spec()).unwrap();
    let order: Vec<(f64, i32)> = rows.iter().map(|r| (r.lambda1, r.a2_sign)).collect();
    assert_eq!(order, vec![(10.0, 1), (10.0, -1), (12.0, 1), (12.0, -1)]);
    for r in &rows {
        assert!(r.error.is_none(), "{:?}", r.error);
        assert!(r.p_oracle.unwrap() >= 0.0);
    }
    let minus = &rows[1];
    assert!(minus.p_oracle.unwrap() <= minus.p_bound.unwrap());
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 5);
}
