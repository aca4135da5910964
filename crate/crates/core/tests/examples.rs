mod common;

use supersurf::crosscheck::{verify_example, ExampleReport, PaperTables, Table, Verdict};
use supersurf::dsl::{elaborate_symbolic, ErrorKind, SurfaceSpec};

use common::{example, fixture, rows, FIXTURES};

fn report(k: u32) -> (ExampleReport, PaperTables) {
    let (spec, paper) = example(k);
    let r = verify_example(&format!("example{k}.surf"), &spec, &paper, &[1, 2, 3]).unwrap();
    (r, paper)
}

fn labels(rows: &[&supersurf::crosscheck::ComparisonRow]) -> Vec<String> {
    rows.iter().map(|r| r.label.clone()).collect()
}

#[test]
fn example1_reproduces_christoffel_and_printed_curvature() {
    let (r, paper) = report(1);
    let stated = rows::stated(1, &r, &paper);
    assert_eq!(r.rows_in(Table::ChristoffelLower).filter(|r| r.backend_value != "0").count(), 6);
    assert_eq!(stated.iter().filter(|r| r.tensor == Table::Curvature).count(), 4);
    assert!(rows::mismatches(&stated).is_empty(), "{:?}", labels(&rows::mismatches(&stated)));
    assert_eq!(r.summary.inconsistent, 0);
}

#[test]
fn example1_ricci_differs_from_print_only_where_flagged() {
    let (r, _) = report(1);
    let differs: Vec<&str> = r
        .rows
        .iter()
        .filter(|r| r.verdict == Verdict::EngineConsistentPaperDiffers)
        .map(|r| r.label.as_str())
        .collect();
    assert_eq!(differs, ["R11", "S"]);
    assert!(r.rows.iter().filter(|r| r.verdict == Verdict::EngineConsistentPaperDiffers).all(|r| r.low_confidence));
    assert!(r.rows.iter().all(|r| r.verdict != Verdict::EngineConsistentPaperDiffers || r.paper_matches_oracle == Some(false)));
}

#[test]
fn example2_reproduces_inverse_and_christoffel() {
    let (r, paper) = report(2);
    let stated = rows::stated(2, &r, &paper);
    assert_eq!(stated.len(), 4 + 8 + 8);
    assert!(rows::mismatches(&stated).is_empty(), "{:?}", labels(&rows::mismatches(&stated)));
    assert_eq!(r.summary.inconsistent, 0);
}

#[test]
fn example3_reproduces_christoffel() {
    let (r, paper) = report(3);
    let stated = rows::stated(3, &r, &paper);
    assert_eq!(stated.len(), 27 + 27);
    assert!(rows::mismatches(&stated).is_empty(), "{:?}", labels(&rows::mismatches(&stated)));
    assert_eq!(r.summary.inconsistent, 0);
}

#[test]
fn example4_christoffel_differs_only_in_g31_3() {
    let (r, paper) = report(4);
    let stated = rows::stated(4, &r, &paper);
    let bad = rows::mismatches(&stated);
    assert_eq!(labels(&bad), ["G31^3"]);
    assert_eq!(bad[0].backend_value, "1/2 eps");
    assert_eq!(bad[0].paper_matches_oracle, Some(false));
    assert_eq!(r.summary.inconsistent, 0);
}

#[test]
fn curvature_tables_are_engine_consistent() {
    for k in 1..=4 {
        let (r, _) = report(k);
        for t in [Table::Curvature, Table::Ricci, Table::Scalar] {
            assert!(r.rows_in(t).all(|row| row.verdict != Verdict::EngineInconsistent), "example {k} {t:?}");
        }
    }
}

#[test]
fn report_serializes_round_trip() {
    let (r, _) = report(1);
    let json = serde_json::to_string(&r).unwrap();
    assert!(json.contains("\"schema\":\"supersurf-report/1\""));
    assert!(json.contains("\"verdict\":\"engine-consistent-paper-differs\""));
    let back: ExampleReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, r);
}

#[test]
fn fixtures_round_trip_through_the_printer() {
    for name in FIXTURES.iter().filter(|n| n.ends_with(".surf")) {
        let spec = SurfaceSpec::parse(&fixture(name)).unwrap();
        let text = spec.to_string();
        let again = SurfaceSpec::parse(&text).unwrap();
        assert_eq!(again, spec, "{name}");
        assert_eq!(again.to_string(), text, "{name}");
    }
    for k in 1..=4 {
        let (spec, paper) = example(k);
        let text = paper.to_string();
        let again = PaperTables::parse(&text, &spec).unwrap();
        assert_eq!(again, paper, "example{k}.paper");
        assert_eq!(again.to_string(), text);
    }
}

#[test]
fn example_fixtures_satisfy_the_parity_law() {
    for k in 1..=4 {
        let (spec, _) = example(k);
        elaborate_symbolic(&spec).unwrap();
    }
}

#[test]
fn odd_eps_is_a_parity_error() {
    let src = fixture("example3.surf").replace("eps = \"even\"", "eps = \"odd\"");
    let spec = SurfaceSpec::parse(&src).unwrap();
    let err = elaborate_symbolic(&spec).unwrap_err();
    assert_eq!(err.kind, ErrorKind::Parity);
    let line = src.lines().position(|l| l.starts_with("g13")).unwrap() + 1;
    assert_eq!(err.pos.line, line);
    assert!(err.to_string().contains("parity error"), "{err}");
}
