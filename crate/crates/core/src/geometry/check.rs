use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{Parity, ScalarAlgebra};

use super::connection::{christoffel, connect_left, connect_right, torsion, ChristoffelTable};
use super::curvature::{
    covariant_derivative_r, curvature_closed_form, curvature_commutator, lower_curvature,
    Curvature,
};
use super::{sign, Metric, Side, SuperSurface, VectorField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityKind {
    RightInverse,
    MetricCompatibility,
    Torsion,
    ClosedFormLeft,
    ClosedFormRight,
    HomomorphismLeft,
    HomomorphismRight,
    LoweredRelation,
    FirstBianchi,
    SecondBianchi,
}

impl IdentityKind {
    pub const ALL: [IdentityKind; 10] = [
        IdentityKind::RightInverse,
        IdentityKind::MetricCompatibility,
        IdentityKind::Torsion,
        IdentityKind::ClosedFormLeft,
        IdentityKind::ClosedFormRight,
        IdentityKind::HomomorphismLeft,
        IdentityKind::HomomorphismRight,
        IdentityKind::LoweredRelation,
        IdentityKind::FirstBianchi,
        IdentityKind::SecondBianchi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdentityKind::RightInverse => "right_inverse",
            IdentityKind::MetricCompatibility => "metric_compatibility",
            IdentityKind::Torsion => "torsion",
            IdentityKind::ClosedFormLeft => "closed_form_left",
            IdentityKind::ClosedFormRight => "closed_form_right",
            IdentityKind::HomomorphismLeft => "homomorphism_left",
            IdentityKind::HomomorphismRight => "homomorphism_right",
            IdentityKind::LoweredRelation => "lowered_relation",
            IdentityKind::FirstBianchi => "first_bianchi",
            IdentityKind::SecondBianchi => "second_bianchi",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    /// `(needs |g| = 0, needs graded symmetry)`.
    pub fn hypotheses(self) -> (bool, bool) {
        match self {
            IdentityKind::RightInverse
            | IdentityKind::HomomorphismLeft
            | IdentityKind::HomomorphismRight => (false, false),
            IdentityKind::ClosedFormLeft | IdentityKind::ClosedFormRight => (true, false),
            IdentityKind::Torsion => (false, true),
            IdentityKind::MetricCompatibility
            | IdentityKind::LoweredRelation
            | IdentityKind::FirstBianchi
            | IdentityKind::SecondBianchi => (true, true),
        }
    }
}

impl fmt::Display for IdentityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::NotApplicable => "not_applicable",
        })
    }
}

/// Verdict for one identity. `residuals` holds the nonzero left-minus-right
/// components with their indices (1-based frame slots).
#[derive(Clone, Debug)]
pub struct IdentityCheck<A> {
    pub kind: IdentityKind,
    pub status: Status,
    pub reason: Option<String>,
    pub components: usize,
    pub residuals: Vec<(Vec<usize>, A)>,
}

impl<A: ScalarAlgebra> IdentityCheck<A> {
    fn not_applicable(kind: IdentityKind, reason: String) -> Self {
        IdentityCheck {
            kind,
            status: Status::NotApplicable,
            reason: Some(reason),
            components: 0,
            residuals: Vec::new(),
        }
    }

    fn from_residuals(kind: IdentityKind, all: impl IntoIterator<Item = (Vec<usize>, A)>) -> Self {
        let mut components = 0;
        let mut residuals = Vec::new();
        for (ix, r) in all {
            components += 1;
            if !r.is_zero() {
                residuals.push((ix.iter().map(|i| i + 1).collect(), r));
            }
        }
        IdentityCheck {
            kind,
            status: if residuals.is_empty() { Status::Pass } else { Status::Fail },
            reason: None,
            components,
            residuals,
        }
    }
}

/// Test functions `f` for the homomorphism checks.
#[derive(Clone, Debug)]
pub struct Probes<A> {
    pub functions: Vec<A>,
}

impl<A: ScalarAlgebra> Probes<A> {
    /// An even and, when generators exist, an odd element built from the
    /// coordinates.
    pub fn standard(surface: &SuperSurface) -> Self {
        let n = surface.order;
        let t1 = A::coordinate(n, 1);
        let t2 = A::coordinate(n, 2);
        let mut even = A::one(n).add(&t1.star(&t2)).add(&t2.star(&t2).star(&t1));
        let mut functions = Vec::new();
        if surface.odd >= 2 {
            even = even.add(&A::generator(n, 1).star(&A::generator(n, 2)).star(&t1));
        }
        functions.push(even);
        if surface.odd >= 1 {
            let xi = A::generator(n, 1);
            functions.push(t2.star(&xi).add(&t1.star(&t1).star(&xi)));
        }
        Probes { functions }
    }
}

/// Everything the checks need, computed once.
struct Pipeline<'a, A> {
    metric: &'a Metric<A>,
    table: ChristoffelTable<A>,
    commutator: Option<Curvature<A>>,
    closed: Curvature<A>,
}

/// Runs the requested identity checks (all when `only` is empty).
pub fn check_identities<A: ScalarAlgebra>(
    metric: &Metric<A>,
    probes: &Probes<A>,
    only: &[IdentityKind],
) -> Vec<IdentityCheck<A>> {
    let table = christoffel(metric);
    let commutator = curvature_commutator(metric, &table).ok();
    let closed = curvature_closed_form(metric, &table);
    let pipe = Pipeline {
        metric,
        table,
        commutator,
        closed,
    };
    let kinds: Vec<IdentityKind> = if only.is_empty() {
        IdentityKind::ALL.to_vec()
    } else {
        only.to_vec()
    };
    kinds.into_iter().map(|k| run(&pipe, probes, k)).collect()
}

fn run<A: ScalarAlgebra>(
    pipe: &Pipeline<'_, A>,
    probes: &Probes<A>,
    kind: IdentityKind,
) -> IdentityCheck<A> {
    let metric = pipe.metric;
    let (needs_even, needs_sym) = kind.hypotheses();
    if needs_even && metric.degree() != Parity::Even {
        return IdentityCheck::not_applicable(kind, "metric is odd".into());
    }
    if needs_sym && !metric.is_graded_symmetric() {
        return IdentityCheck::not_applicable(kind, "metric is not graded-symmetric".into());
    }
    let s = metric.surface();
    let d = s.dim();
    let n = s.order;
    let p = |i: usize| s.p(i);
    let table = &pipe.table;
    let frame = s.frame();
    let cube = || (0..d).flat_map(move |i| (0..d).flat_map(move |j| (0..d).map(move |k| (i, j, k))));
    let quad = || cube().flat_map(move |(i, j, k)| (0..d).map(move |l| (i, j, k, l)));
    let r = &pipe.closed.left;
    match kind {
        IdentityKind::RightInverse => {
            let res = metric.right_inverse_residual();
            IdentityCheck::from_residuals(
                kind,
                (0..d).flat_map(|i| (0..d).map(move |k| (i, k))).map(|(i, k)| (vec![i, k], res[i][k].clone())),
            )
        }
        IdentityKind::MetricCompatibility => IdentityCheck::from_residuals(
            kind,
            cube().map(|(i, j, k)| {
                let mut lhs = A::zero(n);
                for l in 0..d {
                    lhs = lhs
                        .add(&table.gamma(i, j, l).star(metric.g(l, k)))
                        .add(&metric.g(j, l).star(table.gamma_tilde(i, k, l)).signed(sign(p(i) * p(j))));
                }
                (vec![i, j, k], lhs.sub(&metric.g(j, k).derive(frame[i])))
            }),
        ),
        IdentityKind::Torsion => {
            let t = torsion(metric, table);
            IdentityCheck::from_residuals(kind, t.entries().map(|(ix, v)| (ix, v.clone())))
        }
        IdentityKind::ClosedFormLeft | IdentityKind::ClosedFormRight => {
            let Some(comm) = &pipe.commutator else {
                return IdentityCheck::not_applicable(kind, "connection components lack definite parity".into());
            };
            let (a, b) = if kind == IdentityKind::ClosedFormLeft {
                (&comm.left, &pipe.closed.left)
            } else {
                (&comm.right, &pipe.closed.right)
            };
            IdentityCheck::from_residuals(
                kind,
                a.entries().map(|(ix, v)| {
                    let w = b.get(&ix);
                    (ix, v.sub(w))
                }),
            )
        }
        IdentityKind::HomomorphismLeft => {
            let mut rows = Vec::new();
            for (fi, f) in probes.functions.iter().enumerate() {
                let Ok(fp) = f.grading().sign_parity() else {
                    return IdentityCheck::not_applicable(kind, "probe lacks definite parity".into());
                };
                for (i, j, k) in cube() {
                    let z = VectorField::frame(Side::Left, s, k);
                    let lhs = match commutator_left(metric, table, i, j, &z.scale_left(f)) {
                        Some(v) => v,
                        None => return IdentityCheck::not_applicable(kind, "component lacks definite parity".into()),
                    };
                    let Some(base) = commutator_left(metric, table, i, j, &z) else {
                        return IdentityCheck::not_applicable(kind, "component lacks definite parity".into());
                    };
                    let rhs = base.scale_left(f).signed(sign(fp.bit() as usize * (p(i) + p(j))));
                    for (l, c) in lhs.sub(&rhs).components.into_iter().enumerate() {
                        rows.push((vec![fi, i, j, k, l], c));
                    }
                }
            }
            IdentityCheck::from_residuals(kind, rows)
        }
        IdentityKind::HomomorphismRight => {
            let mut rows = Vec::new();
            for (fi, f) in probes.functions.iter().enumerate() {
                for (i, j, k) in cube() {
                    let w = VectorField::frame(Side::Right, s, k);
                    let lhs = commutator_right(metric, table, i, j, &w.scale_right(f));
                    let rhs = commutator_right(metric, table, i, j, &w).scale_right(f);
                    for (l, c) in lhs.sub(&rhs).components.into_iter().enumerate() {
                        rows.push((vec![fi, i, j, k, l], c));
                    }
                }
            }
            IdentityCheck::from_residuals(kind, rows)
        }
        IdentityKind::LoweredRelation => {
            let low = lower_curvature(metric, &pipe.closed);
            IdentityCheck::from_residuals(
                kind,
                quad().map(|(i, j, k, l)| {
                    let rhs = low.right.get(&[i, j, l, k]).signed(-sign((p(i) + p(j)) * p(k)));
                    (vec![i, j, k, l], low.left.get(&[i, j, k, l]).sub(&rhs))
                }),
            )
        }
        IdentityKind::FirstBianchi => IdentityCheck::from_residuals(
            kind,
            quad().map(|(i, j, k, l)| {
                let v = r
                    .get(&[i, j, k, l])
                    .signed(sign(p(i) * p(k)))
                    .add(&r.get(&[j, k, i, l]).signed(sign(p(i) * p(j))))
                    .add(&r.get(&[k, i, j, l]).signed(sign(p(j) * p(k))));
                (vec![i, j, k, l], v)
            }),
        ),
        IdentityKind::SecondBianchi => {
            let dr = covariant_derivative_r(metric, table, r);
            let rows = quad().flat_map(|(i, j, k, l)| (0..d).map(move |q| (i, j, k, l, q))).map(
                |(i, j, k, l, q)| {
                    let v = dr
                        .get(&[i, j, k, l, q])
                        .signed(sign(p(q) * p(j)))
                        .add(&dr.get(&[q, i, k, l, j]).signed(sign(p(i) * p(j))))
                        .add(&dr.get(&[j, q, k, l, i]).signed(sign(p(q) * p(i))));
                    (vec![i, j, k, l, q], v)
                },
            );
            IdentityCheck::from_residuals(kind, rows.collect::<Vec<_>>())
        }
    }
}

fn commutator_left<A: ScalarAlgebra>(
    metric: &Metric<A>,
    table: &ChristoffelTable<A>,
    i: usize,
    j: usize,
    z: &VectorField<A>,
) -> Option<VectorField<A>> {
    let s = metric.surface();
    let a = connect_left(metric, table, i, &connect_left(metric, table, j, z).ok()?).ok()?;
    let b = connect_left(metric, table, j, &connect_left(metric, table, i, z).ok()?).ok()?;
    Some(a.sub(&b.signed(sign(s.p(i) * s.p(j)))))
}

fn commutator_right<A: ScalarAlgebra>(
    metric: &Metric<A>,
    table: &ChristoffelTable<A>,
    i: usize,
    j: usize,
    w: &VectorField<A>,
) -> VectorField<A> {
    let s = metric.surface();
    let a = connect_right(metric, table, i, &connect_right(metric, table, j, w));
    let b = connect_right(metric, table, j, &connect_right(metric, table, i, w));
    a.sub(&b.signed(sign(s.p(i) * s.p(j))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for k in IdentityKind::ALL {
            assert_eq!(IdentityKind::parse(k.name()), Some(k));
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{}\"", k.name()));
        }
        assert_eq!(IdentityKind::parse("torsion_free"), None);
    }

    #[test]
    fn hypothesis_free_identities() {
        let free: Vec<_> = IdentityKind::ALL
            .into_iter()
            .filter(|k| k.hypotheses() == (false, false))
            .collect();
        assert_eq!(
            free,
            [IdentityKind::RightInverse, IdentityKind::HomomorphismLeft, IdentityKind::HomomorphismRight]
        );
    }
}
