//! Substitution oracle: evaluates symbolic results on concrete bindings and
//! compares them against the exact pipeline and the transcribed tables.

mod paper;
pub mod report;

use std::collections::HashMap;

use thiserror::Error;

use crate::algebra::{ExactScalar, FrameIndex, Grading, Parity, RationalCoeff, ScalarAlgebra};
use crate::dsl::{bindings, elaborate_exact, elaborate_symbolic, Bindings, DslError, SurfaceSpec};
use crate::geometry::{
    check_identities, christoffel, curvature_closed_form, ricci, scalar_curvature, sign,
    ChristoffelTable, IdentityCheck, IdentityKind, Metric, Probes, Tensor,
};
use crate::symbolic::{FuncAtom, Printer, SymScalar};

pub use paper::{PaperEntry, PaperTables, Table};
pub use report::{
    CheckReport, ComparisonRow, ComponentValue, ComputeReport, ExampleReport, IdentityRow,
    Residual, Summary, TensorTable, Verdict, SCHEMA,
};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CrosscheckError {
    #[error("atom `{0}` has no binding")]
    Unbound(String),
    #[error("binding for `{0}` cannot be inverted: {1}")]
    NotInvertible(String, String),
    #[error("binding for `{name}` has order {found}, expected {expected}")]
    Order { name: String, found: u32, expected: u32 },
}

/// Evaluates symbolic elements under one binding set, caching atom powers.
pub struct Substituter<'a> {
    bindings: &'a Bindings,
    cache: HashMap<(FuncAtom, i32), ExactScalar>,
}

impl<'a> Substituter<'a> {
    pub fn new(bindings: &'a Bindings) -> Self {
        Substituter {
            bindings,
            cache: HashMap::new(),
        }
    }

    fn atom(&self, atom: &FuncAtom, order: u32) -> Result<ExactScalar, CrosscheckError> {
        let base = if atom.coordinate {
            ExactScalar::coordinate(order, atom.var.coordinate().unwrap_or(1))
        } else {
            let v = self
                .bindings
                .values
                .get(atom.name.as_ref())
                .ok_or_else(|| CrosscheckError::Unbound(atom.name.to_string()))?;
            if v.order() != order {
                return Err(CrosscheckError::Order {
                    name: atom.name.to_string(),
                    found: v.order(),
                    expected: order,
                });
            }
            v.clone()
        };
        let mut out = base;
        if let Some(k) = atom.var.coordinate() {
            for _ in 0..atom.deriv {
                out = out.derive(FrameIndex::Even(k));
            }
        }
        Ok(out)
    }

    fn power(&mut self, atom: &FuncAtom, e: i32, order: u32) -> Result<ExactScalar, CrosscheckError> {
        let key = (atom.clone(), e);
        if let Some(v) = self.cache.get(&key) {
            return Ok(v.clone());
        }
        let mut base = self.atom(atom, order)?;
        if e < 0 {
            base = base
                .invert()
                .map_err(|x| CrosscheckError::NotInvertible(atom.name.to_string(), x.to_string()))?;
        }
        let mut out = ExactScalar::one(order);
        for _ in 0..e.unsigned_abs() {
            out = out.star(&base);
        }
        self.cache.insert(key, out.clone());
        Ok(out)
    }

    /// Star-words evaluate left to right under the exact product.
    pub fn substitute(&mut self, sym: &SymScalar) -> Result<ExactScalar, CrosscheckError> {
        let order = sym.order();
        let mut out = ExactScalar::zero(order);
        for ((n, mono, word), c) in sym.terms() {
            let mut t = ExactScalar::monomial(order, *n, *mono, RationalCoeff::constant(c.clone()));
            for (atom, e) in word.factors() {
                let p = self.power(atom, e, order)?;
                t = t.star(&p);
            }
            out = out.add(&t);
        }
        Ok(out)
    }
}

/// One-shot substitution.
pub fn substitute(sym: &SymScalar, b: &Bindings) -> Result<ExactScalar, CrosscheckError> {
    Substituter::new(b).substitute(sym)
}

/// Inverse metric, Christoffel symbols, closed-form curvature, Ricci and scalar.
#[derive(Clone, Debug)]
pub struct Pipeline<A> {
    pub metric: Metric<A>,
    pub christoffel: ChristoffelTable<A>,
    /// `R_IJK^L` indexed `[I, J, K, L]`.
    pub curvature: Tensor<A>,
    pub ricci: Tensor<A>,
    pub scalar: A,
}

impl<A: ScalarAlgebra> Pipeline<A> {
    pub fn run(metric: Metric<A>) -> Self {
        let christoffel = christoffel(&metric);
        let curvature = curvature_closed_form(&metric, &christoffel).left;
        let ricci = ricci(&metric, &curvature);
        let scalar = scalar_curvature(&metric, &ricci);
        Pipeline {
            metric,
            christoffel,
            curvature,
            ricci,
            scalar,
        }
    }

    pub fn component(&self, t: Table, idx: &[usize]) -> &A {
        match t {
            Table::Inverse => self.metric.inv(idx[0], idx[1]),
            Table::ChristoffelLower => self.christoffel.lower.get(idx),
            Table::Christoffel => self.christoffel.upper.get(idx),
            Table::Curvature => self.curvature.get(idx),
            Table::Ricci => self.ricci.get(idx),
            Table::Scalar => &self.scalar,
        }
    }
}

/// Index and contraction conventions recorded in every report.
pub fn conventions() -> Vec<String> {
    [
        "christoffel: G_IJ^L = sum_K G_IJK * g^KL (right inverse)",
        "curvature: closed form in the Christoffel symbols, R_IJK^L indexed [I,J,K,L]",
        "ricci: contraction L = I, graded-symmetrized in J, K",
        "scalar: S = sum_IJ (-1)^((|I|+1)|J|) R_JI * g^IJ",
    ]
    .map(String::from)
    .to_vec()
}

fn parity_name(g: Grading) -> &'static str {
    match g {
        Grading::Zero => "zero",
        Grading::Homogeneous(Parity::Even) => "even",
        Grading::Homogeneous(Parity::Odd) => "odd",
        Grading::Mixed => "mixed",
    }
}

fn one_based(idx: &[usize]) -> Vec<usize> {
    idx.iter().map(|i| i + 1).collect()
}

/// The transcribed value of a component, if stated or implied. Curvature with
/// `I > J` is implied by antisymmetry; tables marked complete imply zero.
fn paper_value(
    paper: &PaperTables,
    spec: &SurfaceSpec,
    t: Table,
    idx: &[usize],
) -> Option<(SymScalar, bool)> {
    if let Some(e) = paper.get(t, idx) {
        return Some((e.value.clone(), e.low_confidence));
    }
    let s = spec.surface();
    if t == Table::Curvature && idx[0] > idx[1] {
        let swapped = [idx[1], idx[0], idx[2], idx[3]];
        if let Some(e) = paper.get(t, &swapped) {
            let sgn = -sign(s.p(idx[0]) * s.p(idx[1]));
            return Some((e.value.signed(sgn), e.low_confidence));
        }
    }
    paper
        .complete
        .contains(&t)
        .then(|| (SymScalar::zero(spec.order), false))
}

/// Three-way comparison of one example: symbolic pipeline, exact pipeline on
/// each binding set, and the transcribed tables.
pub fn verify_example(
    source: &str,
    spec: &SurfaceSpec,
    paper: &PaperTables,
    binding_sets: &[u32],
) -> Result<ExampleReport, DslError> {
    let sym = Pipeline::run(elaborate_symbolic(spec)?);
    let mut oracles = Vec::new();
    for &i in binding_sets {
        let b = bindings(spec, i)?;
        let exact = Pipeline::run(elaborate_exact(spec, i)?);
        oracles.push((b, exact));
    }
    let mut substituters: Vec<Substituter> = oracles.iter().map(|(b, _)| Substituter::new(b)).collect();
    let printer = Printer {
        generator_names: spec.generator_names(),
    };
    let mut rows = Vec::new();
    let mut summary = Summary::default();
    for t in Table::ALL.into_iter().filter(|t| paper.has_table(*t)) {
        for idx in t.indices(spec.dim()) {
            let s = sym.component(t, &idx);
            let mut consistent = true;
            for (sub, (_, exact)) in substituters.iter_mut().zip(&oracles) {
                match sub.substitute(s) {
                    Ok(v) if &v == exact.component(t, &idx) => {}
                    _ => consistent = false,
                }
            }
            let stated = paper_value(paper, spec, t, &idx);
            let paper_matches_oracle = stated.as_ref().and_then(|(p, _)| {
                let mut all = true;
                for (sub, (_, exact)) in substituters.iter_mut().zip(&oracles) {
                    match sub.substitute(p) {
                        Ok(v) => all &= &v == exact.component(t, &idx),
                        Err(_) => return None,
                    }
                }
                Some(all)
            });
            let backend_value = printer.print(s);
            let paper_value = stated.as_ref().map(|(p, _)| printer.print(p));
            let verdict = if !consistent {
                Verdict::EngineInconsistent
            } else {
                match &paper_value {
                    None => Verdict::Unlisted,
                    Some(p) if *p == backend_value => Verdict::Match,
                    Some(_) => Verdict::EngineConsistentPaperDiffers,
                }
            };
            match verdict {
                Verdict::Match => summary.matched += 1,
                Verdict::EngineConsistentPaperDiffers => summary.paper_differs += 1,
                Verdict::EngineInconsistent => summary.inconsistent += 1,
                Verdict::Unlisted => summary.unlisted += 1,
            }
            rows.push(ComparisonRow {
                tensor: t,
                indices: one_based(&idx),
                label: t.label(&idx),
                backend_value,
                paper_value,
                oracle_value: oracles
                    .first()
                    .map_or_else(String::new, |(_, e)| e.component(t, &idx).to_string()),
                verdict,
                low_confidence: stated.is_some_and(|(_, low)| low),
                paper_matches_oracle,
            });
        }
    }
    Ok(ExampleReport {
        schema: SCHEMA.into(),
        source: source.into(),
        order: spec.order,
        bindings: binding_sets.to_vec(),
        conventions: conventions(),
        rows,
        summary,
    })
}

/// Tables of a pipeline run, rendered with `render`.
pub fn compute_report<A: ScalarAlgebra>(
    source: &str,
    backend: &str,
    pipeline: &Pipeline<A>,
    render: &dyn Fn(&A) -> String,
) -> ComputeReport {
    let d = pipeline.metric.dim();
    let mut tables = Vec::new();
    for t in Table::ALL {
        let components = t
            .indices(d)
            .into_iter()
            .map(|idx| {
                let v = pipeline.component(t, &idx);
                ComponentValue {
                    indices: one_based(&idx),
                    label: t.label(&idx),
                    value: render(v),
                    parity: parity_name(v.grading()).into(),
                }
            })
            .collect();
        tables.push(TensorTable { tensor: t, components });
    }
    ComputeReport {
        schema: SCHEMA.into(),
        source: source.into(),
        backend: backend.into(),
        order: pipeline.metric.order(),
        graded_symmetric: pipeline.metric.is_graded_symmetric(),
        conventions: conventions(),
        tables,
    }
}

/// Identity verdicts for a metric.
pub fn check_report<A: ScalarAlgebra>(
    source: &str,
    backend: &str,
    metric: &Metric<A>,
    only: &[IdentityKind],
    render: &dyn Fn(&A) -> String,
) -> CheckReport {
    let probes = Probes::standard(metric.surface());
    let checks: Vec<IdentityCheck<A>> = check_identities(metric, &probes, only);
    CheckReport {
        schema: SCHEMA.into(),
        source: source.into(),
        backend: backend.into(),
        order: metric.order(),
        graded_symmetric: metric.is_graded_symmetric(),
        identities: checks
            .into_iter()
            .map(|c| IdentityRow {
                identity: c.kind,
                status: c.status,
                reason: c.reason,
                components: c.components,
                residuals: c
                    .residuals
                    .iter()
                    .map(|(ix, v)| Residual {
                        indices: ix.clone(),
                        value: render(v),
                    })
                    .collect(),
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{eval_exact, eval_symbolic, parse_expr, Pos};

    const SRC: &str = "\
[surface]
odd = \"xi\"
order = 2

[functions]
f = \"t2, positive\"
phi = \"hbar, positive\"

[params]
eps = \"even\"

[metric]
g11 = \"f\"
g22 = \"phi\"
g33 = \"1\"

[bindings.1]
f = \"2 + t2^2\"
phi = \"1 - hbar\"
eps = \"-2/3\"
";

    fn expr(src: &str) -> crate::dsl::Expr {
        parse_expr(src, Pos { line: 1, col: 1 }).unwrap()
    }

    #[test]
    fn substitution_agrees_with_direct_evaluation() {
        let spec = SurfaceSpec::parse(SRC).unwrap();
        let b = bindings(&spec, 1).unwrap();
        let mut sub = Substituter::new(&b);
        for src in ["f * phi^-2 * t1", "d(f, t2, 2) * f^-1 - eps * xi", "t2 * f * t1 * xi + hbar * phi"] {
            let e = expr(src);
            let sym = eval_symbolic(&spec, &e).unwrap();
            assert_eq!(sub.substitute(&sym).unwrap(), eval_exact(&spec, &b, &e).unwrap(), "{src}");
        }
    }

    #[test]
    fn substitution_errors() {
        let spec = SurfaceSpec::parse(SRC).unwrap();
        let sym = eval_symbolic(&spec, &expr("f^-1 * eps")).unwrap();
        let mut b = bindings(&spec, 1).unwrap();
        b.values.remove("eps");
        assert_eq!(substitute(&sym, &b), Err(CrosscheckError::Unbound("eps".into())));

        let mut b = bindings(&spec, 1).unwrap();
        b.values.insert("f".into(), ExactScalar::zero(2));
        assert!(matches!(substitute(&sym, &b), Err(CrosscheckError::NotInvertible(n, _)) if n == "f"));

        let mut b = bindings(&spec, 1).unwrap();
        b.values.insert("eps".into(), ExactScalar::one(3));
        assert!(matches!(substitute(&sym, &b), Err(CrosscheckError::Order { found: 3, expected: 2, .. })));
    }

    #[test]
    fn compute_report_lists_every_component() {
        let spec = SurfaceSpec::parse(SRC).unwrap();
        let pipe = Pipeline::run(elaborate_exact(&spec, 1).unwrap());
        let r = compute_report("t.surf", "exact", &pipe, &|v| v.to_string());
        let sizes: Vec<usize> = r.tables.iter().map(|t| t.components.len()).collect();
        assert_eq!(sizes, vec![9, 27, 27, 81, 9, 1]);
        assert_eq!(r.tables[0].components[0].parity, "even");
        assert_eq!(r.tables[0].components[1].parity, "zero");
        assert_eq!(r.schema, SCHEMA);
    }

    #[test]
    fn check_report_respects_the_selection() {
        let spec = SurfaceSpec::parse(SRC).unwrap();
        let m = elaborate_exact(&spec, 1).unwrap();
        let r = check_report("t.surf", "exact", &m, &[IdentityKind::Torsion], &|v| v.to_string());
        assert_eq!(r.identities.len(), 1);
        assert_eq!(r.identities[0].status, crate::Status::NotApplicable);
        assert!(r.all_pass());
    }
}
