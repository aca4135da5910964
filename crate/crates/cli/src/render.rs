//! Plain-text renderings of the reports and of random metric files.

use std::fmt::Write;

use supersurf::crosscheck::{CheckReport, ComputeReport, ExampleReport, Verdict};
use supersurf::dsl::SurfaceSpec;
use supersurf::{ExactScalar, Metric, ScalarAlgebra, Status};

fn header(out: &mut String, source: &str, backend: &str, order: u32, graded_symmetric: bool) {
    let sym = if graded_symmetric { "graded-symmetric" } else { "not graded-symmetric" };
    writeln!(out, "{source}: {backend} backend, order {order}, {sym}").unwrap();
}

pub fn compute(r: &ComputeReport) -> String {
    let mut out = String::new();
    header(&mut out, &r.source, &r.backend, r.order, r.graded_symmetric);
    for t in &r.tables {
        writeln!(out, "\n[{}]", t.tensor.name()).unwrap();
        let mut zero = true;
        for c in t.components.iter().filter(|c| c.value != "0") {
            writeln!(out, "{} = {}  ({})", c.label, c.value, c.parity).unwrap();
            zero = false;
        }
        if zero {
            writeln!(out, "all components vanish").unwrap();
        }
    }
    out
}

pub fn check(r: &CheckReport) -> String {
    let mut out = String::new();
    header(&mut out, &r.source, &r.backend, r.order, r.graded_symmetric);
    let width = r.identities.iter().map(|i| i.identity.name().len()).max().unwrap_or(0);
    let count = |s: Status| r.identities.iter().filter(|i| i.status == s).count();
    for row in &r.identities {
        let name = row.identity.name();
        match row.status {
            Status::Pass => writeln!(out, "{name:width$}  pass  {} components", row.components),
            Status::NotApplicable => writeln!(
                out,
                "{name:width$}  not applicable  {}",
                row.reason.as_deref().unwrap_or("")
            ),
            Status::Fail => writeln!(out, "{name:width$}  FAIL  {} nonzero residuals", row.residuals.len()),
        }
        .unwrap();
        for res in row.residuals.iter().take(5) {
            writeln!(out, "    {:?} = {}", res.indices, res.value).unwrap();
        }
    }
    writeln!(
        out,
        "{} pass, {} fail, {} not applicable",
        count(Status::Pass),
        count(Status::Fail),
        count(Status::NotApplicable)
    )
    .unwrap();
    out
}

pub fn example(r: &ExampleReport, all: bool) -> String {
    let mut out = String::new();
    let sets: Vec<String> = r.bindings.iter().map(u32::to_string).collect();
    writeln!(out, "{}: order {}, binding sets {}", r.source, r.order, sets.join(", ")).unwrap();
    let s = &r.summary;
    writeln!(
        out,
        "{} match, {} paper differs, {} engine-inconsistent, {} unlisted",
        s.matched, s.paper_differs, s.inconsistent, s.unlisted
    )
    .unwrap();
    for row in r.rows.iter().filter(|row| all || row.verdict != Verdict::Match) {
        let low = if row.low_confidence { " (low-confidence transcription)" } else { "" };
        writeln!(out, "\n{} {}{low}", row.label, row.verdict.name()).unwrap();
        writeln!(out, "  engine: {}", row.backend_value).unwrap();
        if let Some(p) = &row.paper_value {
            writeln!(out, "  paper:  {p}").unwrap();
        }
        if row.verdict != Verdict::Match {
            if let Some(agrees) = row.paper_matches_oracle {
                let word = if agrees { "agrees" } else { "disagrees" };
                writeln!(out, "  paper value {word} with the exact oracle").unwrap();
            }
        }
    }
    out
}

/// A metric file for a random metric, in canonical form.
pub fn surf(m: &Metric<ExactScalar>, seed: u64) -> String {
    let odd: Vec<String> = (1..=m.surface().odd).map(|a| format!("xi{a}")).collect();
    let mut text = format!(
        "[surface]\neven = \"t1, t2\"\nodd = \"{}\"\norder = {}\ndegree = even\nbackend = exact\n\n[metric]\n",
        odd.join(", "),
        m.order()
    );
    for i in 0..m.dim() {
        for j in 0..m.dim() {
            if !m.g(i, j).is_zero() {
                writeln!(text, "g{}{} = \"{}\"", i + 1, j + 1, m.g(i, j)).unwrap();
            }
        }
    }
    let spec = SurfaceSpec::parse(&text).expect("random metrics print in the file grammar");
    format!("# random metric, seed {seed}\n{spec}")
}
