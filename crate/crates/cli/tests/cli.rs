//! End-to-end tests of the `bstriangle` binary: exit codes, JSON round
//! trips, and the sweep file outputs.

use std::process::{Command, Output};

use bstriangle_cli::report::{Payload, ReportFile};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bstriangle"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn parse_report(out: &Output) -> ReportFile {
    let text = stdout_of(out);
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("bad report JSON ({e}): {text}"))
}

#[test]
fn decide_exit_codes_follow_the_verdict() {
    assert_eq!(run(&["decide", "3,-3;5,-5;7,-7"]).status.code(), Some(0));
    assert_eq!(run(&["decide", "1,2;1,2;1,2"]).status.code(), Some(1));
    assert_eq!(run(&["decide", "2,3;2,3;2,3"]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(run(&["decide", "1,2;1,2"]).status.code(), Some(3));
    assert_eq!(run(&["decide", "1,2;1,x;1,2"]).status.code(), Some(3));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(3));
    assert_eq!(run(&["quotient", "1,2;1,2;1,3", "--prime", "nope"]).status.code(), Some(3));
    assert_eq!(run(&["quotient", "1,2;1,2;1,3", "--prime", "6"]).status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn refusals_exit_four_with_structured_output() {
    let out = run(&["quotient", "1,1;1,2;1,2", "--json"]);
    assert_eq!(out.status.code(), Some(4));
    let report = parse_report(&out);
    match report.payload {
        Payload::Refusal(r) => assert!(r.reason.contains("units"), "{}", r.reason),
        other => panic!("expected refusal payload, got {other:?}"),
    }

    assert_eq!(run(&["killer", "2,1;1,2;1,2", "1", "1", "1"]).status.code(), Some(4));
    assert_eq!(run(&["quotient", "2,4;1,2;1,2"]).status.code(), Some(4));
}

#[test]
fn incomplete_enumeration_exits_five_with_partial_data() {
    let out = run(&["quotient", "1,4;1,4;1,4", "--json", "--limits-cosets", "10"]);
    assert_eq!(out.status.code(), Some(5));
    let report = parse_report(&out);
    match report.payload {
        Payload::Quotient(q) => {
            assert_eq!(q.order, None);
            assert_eq!(q.order_source, "incomplete");
            // The diagonal invariants never need enumeration.
            assert_eq!(q.abelian_display, "Z/3 x Z/3 x Z/3");
        }
        other => panic!("expected quotient payload, got {other:?}"),
    }
}

#[test]
fn oversized_exponents_exit_five_under_a_small_guard() {
    let out = Command::new(env!("CARGO_BIN_EXE_bstriangle"))
        .args(["quotient", "1,2;1,9;1,100", "--json"])
        .env("BS_TRIANGLE_MAX_BITS", "64")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(5));
    let report = parse_report(&out);
    assert!(matches!(report.payload, Payload::Refusal(_)));

    let out = Command::new(env!("CARGO_BIN_EXE_bstriangle"))
        .args(["decide", "1,2;1,2;1,2"])
        .env("BS_TRIANGLE_MAX_BITS", "not-a-number")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn json_reports_round_trip_and_carry_the_schema() {
    for args in [
        vec!["decide", "1,2;1,2;1,2", "--json"],
        vec!["decide", "2,3;2,3;2,3", "--json", "--depth", "2"],
        vec!["quotient", "1,2;1,2;1,3", "--json"],
        vec!["quotient", "1,4;1,4;1,4", "--prime", "3", "--json"],
        vec!["killer", "1,2;1,2;1,3", "1", "1", "1", "--json"],
        vec!["canon", "2,-3;-5,7;1,2", "--json"],
        vec!["abelianize", "1,2;1,2;1,3", "--json"],
        vec!["bounds", "1,2;1,2;1,3", "--json"],
        vec!["reduce", "2,4;3,9;5,25", "--json"],
        vec!["reduce", "1,2;1,2;1,3", "--json", "--pair", "0", "--factor", "1"],
        vec!["affine-check", "--json"],
    ] {
        let out = run(&args);
        let report = parse_report(&out);
        assert_eq!(report.schema_version, "1", "args {args:?}");
        let text = serde_json::to_string(&report).expect("serializes");
        let back: ReportFile = serde_json::from_str(&text).expect("parses back");
        assert_eq!(back, report, "round trip for {args:?}");
    }
}

#[test]
fn killer_relation_matches_the_documented_examples() {
    let out = run(&["killer", "1,2;1,2;1,2", "1", "1", "1", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    match parse_report(&out).payload {
        Payload::Killer(k) => {
            assert_eq!(k.relation, "x^2 = z^-4 y^-1 z^2 y^2");
            assert_eq!(k.verified, Some(true));
        }
        other => panic!("expected killer payload, got {other:?}"),
    }

    let out = run(&["killer", "1,2;1,2;1,3", "1", "1", "1", "--json"]);
    match parse_report(&out).payload {
        Payload::Killer(k) => {
            assert_eq!(k.relation, "x^2 = z^-9 y^-1 z^3 y^2");
            assert_eq!(k.verified, Some(true));
        }
        other => panic!("expected killer payload, got {other:?}"),
    }
}

#[test]
fn quotient_respects_the_strategy_flag() {
    for strategy in ["hlt", "felsch"] {
        let out = run(&["quotient", "1,2;1,2;1,3", "--json", "--strategy", strategy]);
        assert_eq!(out.status.code(), Some(0));
        match parse_report(&out).payload {
            Payload::Quotient(q) => assert_eq!(q.order.as_deref(), Some("6")),
            other => panic!("expected quotient payload, got {other:?}"),
        }
    }
    assert_eq!(
        run(&["quotient", "1,2;1,2;1,3", "--strategy", "guess"]).status.code(),
        Some(3)
    );
}

#[test]
fn sweep_writes_per_tuple_reports_and_exact_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let spec_path = dir.path().join("spec.json");
    std::fs::write(
        &spec_path,
        r#"{
            "a": {"min": 1, "max": 1},
            "b": {"min": 2, "max": 3},
            "c": {"min": 1, "max": 1},
            "d": {"min": 2, "max": 2},
            "e": {"min": 1, "max": 1},
            "f": {"min": 2, "max": 2},
            "workers": 2
        }"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = run(&[
        "sweep",
        spec_path.to_str().unwrap(),
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout_of(&out));

    let csv = std::fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("params,verdict,order,ratio,bound_ok"));
    assert_eq!(lines.clone().count(), 2);
    assert!(csv.contains("\"1,2;1,2;1,2\",not developable,1,1,true"));

    for stem in ["1_2__1_2__1_2", "1_3__1_2__1_2"] {
        let report: ReportFile = serde_json::from_str(
            &std::fs::read_to_string(out_dir.join(format!("{stem}.json"))).unwrap(),
        )
        .unwrap();
        assert_eq!(report.command, "sweep");
        assert!(matches!(report.payload, Payload::SweepRow(_)));
        assert_eq!(report.timing, None);
    }

    let jsonl = std::fs::read_to_string(out_dir.join("reports.jsonl")).unwrap();
    assert_eq!(jsonl.lines().count(), 2);

    let bad_spec = dir.path().join("bad.json");
    std::fs::write(&bad_spec, r#"{"a": {"min": 2, "max": 1}}"#).unwrap();
    assert_eq!(
        run(&["sweep", bad_spec.to_str().unwrap(), out_dir.to_str().unwrap()]).status.code(),
        Some(3)
    );
}

#[test]
fn canon_bounds_and_reduce_report_consistent_data() {
    let out = run(&["canon", "1,2;1,2;1,3", "--json"]);
    match parse_report(&out).payload {
        Payload::Canon(c) => {
            let canon_again = run(&["canon", &c.canonical, "--json"]);
            match parse_report(&canon_again).payload {
                Payload::Canon(c2) => assert_eq!(c2.canonical, c.canonical),
                other => panic!("expected canon payload, got {other:?}"),
            }
        }
        other => panic!("expected canon payload, got {other:?}"),
    }

    let out = run(&["bounds", "1,2;1,2;1,3", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    match parse_report(&out).payload {
        Payload::Bounds(b) => {
            assert_eq!(b.lower, "6");
            assert_eq!(b.modulus, "4");
            assert_eq!((b.exponents.x.as_str(), b.exponents.y.as_str(), b.exponents.z.as_str()), ("1", "3", "8"));
        }
        other => panic!("expected bounds payload, got {other:?}"),
    }

    let out = run(&["reduce", "2,4;3,9;5,25", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    match parse_report(&out).payload {
        Payload::Reduce(r) => {
            assert_eq!(r.coprime, "1,2;1,3;1,5");
            assert_eq!((r.l.as_str(), r.m.as_str(), r.n.as_str()), ("2", "3", "5"));
        }
        other => panic!("expected reduce payload, got {other:?}"),
    }

    let out = run(&["affine-check"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).contains("passes: true"));
}
