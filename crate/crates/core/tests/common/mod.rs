#![allow(dead_code)]

use std::path::PathBuf;

use supersurf::algebra::{qf, RationalCoeff};
use supersurf::crosscheck::PaperTables;
use supersurf::dsl::SurfaceSpec;
use supersurf::{ExactScalar, Metric};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn example(k: u32) -> (SurfaceSpec, PaperTables) {
    let spec = SurfaceSpec::parse(&fixture(&format!("example{k}.surf"))).unwrap();
    let paper = PaperTables::parse(&fixture(&format!("example{k}.paper")), &spec).unwrap();
    (spec, paper)
}

pub const FIXTURES: [&str; 9] = [
    "example1.surf",
    "example2.surf",
    "example3.surf",
    "example4.surf",
    "flat.surf",
    "example1.paper",
    "example2.paper",
    "example3.paper",
    "example4.paper",
];

/// Classical Levi-Civita data of a 2x2 metric over rational functions of
/// `t1, t2`, by the textbook formulas.
pub struct Classical {
    pub inv: [[RationalCoeff; 2]; 2],
    /// `Γ_ijk`
    pub lower: [[[RationalCoeff; 2]; 2]; 2],
    /// `Γ_ij^l`
    pub upper: [[[RationalCoeff; 2]; 2]; 2],
    /// `R^l_kij` stored at `[i][j][k][l]`.
    pub riemann: [[[[RationalCoeff; 2]; 2]; 2]; 2],
    pub ricci: [[RationalCoeff; 2]; 2],
    pub scalar: RationalCoeff,
}

fn zero() -> RationalCoeff {
    RationalCoeff::zero()
}

pub fn classical(g: &[[RationalCoeff; 2]; 2]) -> Classical {
    let det = g[0][0].mul(&g[1][1]).sub(&g[0][1].mul(&g[1][0]));
    let r = det.recip().expect("degenerate metric");
    let inv = [
        [g[1][1].mul(&r), g[0][1].neg().mul(&r)],
        [g[1][0].neg().mul(&r), g[0][0].mul(&r)],
    ];
    let d = |f: &RationalCoeff, k: usize| f.derive(k as u8 + 1);
    let half = qf(1, 2);
    let lower: [[[RationalCoeff; 2]; 2]; 2] = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            std::array::from_fn(|k| {
                d(&g[j][k], i).add(&d(&g[i][k], j)).sub(&d(&g[i][j], k)).scale(&half)
            })
        })
    });
    let upper: [[[RationalCoeff; 2]; 2]; 2] = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            std::array::from_fn(|l| {
                (0..2).fold(zero(), |acc, k| acc.add(&lower[i][j][k].mul(&inv[k][l])))
            })
        })
    });
    let riemann: [[[[RationalCoeff; 2]; 2]; 2]; 2] = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            std::array::from_fn(|k| {
                std::array::from_fn(|l| {
                    let mut acc = d(&upper[j][k][l], i).sub(&d(&upper[i][k][l], j));
                    for m in 0..2 {
                        acc = acc
                            .add(&upper[j][k][m].mul(&upper[i][m][l]))
                            .sub(&upper[i][k][m].mul(&upper[j][m][l]));
                    }
                    acc
                })
            })
        })
    });
    let ricci: [[RationalCoeff; 2]; 2] = std::array::from_fn(|j| {
        std::array::from_fn(|k| (0..2).fold(zero(), |acc, i| acc.add(&riemann[i][j][k][i])))
    });
    let mut scalar = zero();
    for i in 0..2 {
        for j in 0..2 {
            scalar = scalar.add(&ricci[j][i].mul(&inv[i][j]));
        }
    }
    Classical {
        inv,
        lower,
        upper,
        riemann,
        ricci,
        scalar,
    }
}

/// Gaussian curvature of `E du² + 2F du dv + G dv²` by Brioschi's formula.
pub fn brioschi(e: &RationalCoeff, f: &RationalCoeff, g: &RationalCoeff) -> RationalCoeff {
    let h = qf(1, 2);
    let du = |x: &RationalCoeff| x.derive(1);
    let dv = |x: &RationalCoeff| x.derive(2);
    let det3 = |m: [[RationalCoeff; 3]; 3]| {
        let minor = |a: usize, b: usize, c: usize, dd: usize| m[1][a].mul(&m[2][b]).sub(&m[1][c].mul(&m[2][dd]));
        m[0][0]
            .mul(&minor(1, 2, 2, 1))
            .sub(&m[0][1].mul(&minor(0, 2, 2, 0)))
            .add(&m[0][2].mul(&minor(0, 1, 1, 0)))
    };
    let m1 = [
        [
            dv(&dv(e)).scale(&h).neg().add(&du(&dv(f))).sub(&du(&du(g)).scale(&h)),
            du(e).scale(&h),
            du(f).sub(&dv(e).scale(&h)),
        ],
        [dv(f).sub(&du(g).scale(&h)), e.clone(), f.clone()],
        [dv(g).scale(&h), f.clone(), g.clone()],
    ];
    let m2 = [
        [zero(), dv(e).scale(&h), du(g).scale(&h)],
        [dv(e).scale(&h), e.clone(), f.clone()],
        [du(g).scale(&h), f.clone(), g.clone()],
    ];
    let w = e.mul(g).sub(&f.mul(f));
    det3(m1).sub(&det3(m2)).div(&w.mul(&w)).expect("degenerate metric")
}

/// The `ℏ^0` body of each entry of a `P = 0` metric.
pub fn bodies(m: &Metric<ExactScalar>) -> [[RationalCoeff; 2]; 2] {
    std::array::from_fn(|i| std::array::from_fn(|j| m.g(i, j).body()))
}

pub mod sym {
    use std::collections::BTreeMap;

    use rand::Rng;
    use supersurf::algebra::{q, qf, GrassmannMono, Poly, RationalCoeff, ScalarAlgebra};
    use supersurf::dsl::Bindings;
    use supersurf::symbolic::{AtomVar, FuncAtom, StarWord, SymScalar};
    use supersurf::ExactScalar;

    pub const ODD: u8 = 2;

    fn atoms() -> Vec<FuncAtom> {
        let f = FuncAtom::function("f", AtomVar::T1, true);
        let h = FuncAtom::function("h", AtomVar::T2, true);
        vec![
            f.clone(),
            f.derived(1),
            h.clone(),
            h.derived(2),
            FuncAtom::function("k", AtomVar::Hbar, true),
            FuncAtom::function("c", AtomVar::Param, true),
            FuncAtom::coordinate(1),
            FuncAtom::coordinate(2),
        ]
    }

    /// A sum of up to four terms `c ℏ^n ξ^A w` with words of up to three atom powers.
    pub fn element(rng: &mut impl Rng, order: u32) -> SymScalar {
        let atoms = atoms();
        let mut out = SymScalar::zero(order);
        for _ in 0..rng.gen_range(1..=4) {
            let mut word = StarWord::one();
            for _ in 0..rng.gen_range(0..=3) {
                let a = atoms[rng.gen_range(0..atoms.len())].clone();
                let e = if a.invertible() {
                    [-2, -1, 1, 2][rng.gen_range(0..4)]
                } else {
                    rng.gen_range(1..=2)
                };
                word = word.mul(&StarWord::atom(a, e));
            }
            let c = qf(rng.gen_range(-4..=4), rng.gen_range(1..=3));
            let mono = GrassmannMono::from_mask(rng.gen_range(0..1u32 << ODD));
            let n = rng.gen_range(0..=order.min(2));
            out = out.add(&SymScalar::term(order, c, n, mono, word));
        }
        out
    }

    pub fn bindings(order: u32) -> Bindings {
        let poly = |terms: &[(i64, usize, usize)]| {
            terms.iter().fold(Poly::zero(), |p, &(c, i, j)| p.add(&Poly::monomial(q(c), i, j)))
        };
        let hbar = ExactScalar::hbar(order);
        let k = ExactScalar::one(order)
            .add(&hbar)
            .add(&hbar.star(&hbar).scale(&q(2)));
        let mut values = BTreeMap::new();
        values.insert("f".to_string(), ExactScalar::from_poly(order, poly(&[(1, 0, 0), (1, 2, 0)])));
        values.insert(
            "h".to_string(),
            ExactScalar::from_coeff(
                order,
                RationalCoeff::new(poly(&[(2, 0, 0), (1, 0, 1), (1, 0, 3)]), poly(&[(3, 0, 0), (1, 0, 2)])).unwrap(),
            ),
        );
        values.insert("k".to_string(), k);
        values.insert("c".to_string(), ExactScalar::from_rational(order, &qf(3, 2)));
        Bindings { index: 0, values }
    }
}

pub mod rows {
    use supersurf::crosscheck::{ComparisonRow, ExampleReport, PaperTables, Table, Verdict};

    /// Tables checked for exact reproduction, and whether only explicitly
    /// printed entries count (as opposed to implied ones).
    pub fn reproduced(k: u32) -> Vec<(Table, bool)> {
        match k {
            1 => vec![(Table::ChristoffelLower, false), (Table::Christoffel, false), (Table::Curvature, true)],
            2 => vec![(Table::Inverse, false), (Table::ChristoffelLower, false), (Table::Christoffel, false)],
            _ => vec![(Table::ChristoffelLower, false), (Table::Christoffel, false)],
        }
    }

    /// Rows the transcription states for the reproduced tables of example `k`.
    pub fn stated<'a>(k: u32, report: &'a ExampleReport, paper: &PaperTables) -> Vec<&'a ComparisonRow> {
        let mut out = Vec::new();
        for (t, explicit) in reproduced(k) {
            for r in report.rows_in(t) {
                let idx: Vec<usize> = r.indices.iter().map(|i| i - 1).collect();
                let listed = if explicit { paper.get(t, &idx).is_some() } else { r.paper_value.is_some() };
                if listed {
                    out.push(r);
                }
            }
        }
        out
    }

    pub fn mismatches<'a>(rows: &[&'a ComparisonRow]) -> Vec<&'a ComparisonRow> {
        rows.iter().copied().filter(|r| r.verdict != Verdict::Match).collect()
    }
}
