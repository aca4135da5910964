//! Seeded random elements and metrics for property checks and the CLI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{q, ExactScalar, GrassmannMono, Parity, Poly, RationalCoeff, ScalarAlgebra};
use crate::geometry::{GeometryError, Metric, SuperSurface};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Polynomial in `t1, t2` of total degree at most `degree`, small integer
/// coefficients, roughly half of them zero.
pub fn poly(rng: &mut impl Rng, degree: usize) -> Poly {
    let mut p = Poly::zero();
    for i in 0..=degree {
        for j in 0..=(degree - i) {
            if rng.gen_bool(0.5) {
                let c = rng.gen_range(-3i64..=3);
                p = p.add(&Poly::monomial(q(c), i, j));
            }
        }
    }
    p
}

fn term(order: u32, n: u32, mono: GrassmannMono, p: Poly) -> ExactScalar {
    if n > order {
        return ExactScalar::zero(order);
    }
    ExactScalar::monomial(order, n, mono, RationalCoeff::from_poly(p))
}

/// Homogeneous element of the requested parity over `odd` generators, with
/// components up to `ℏ^order` (at most `ℏ^2`).
pub fn element(rng: &mut impl Rng, odd: u8, order: u32, parity: Parity, degree: usize) -> ExactScalar {
    let mut out = ExactScalar::zero(order);
    for mask in 0u32..(1 << odd) {
        let mono = GrassmannMono::from_mask(mask);
        if mono.parity() != parity {
            continue;
        }
        for n in 0..=order.min(2) {
            if rng.gen_bool(0.6) {
                out = out.add(&term(order, n, mono, poly(rng, degree)));
            }
        }
    }
    out
}

/// `e` minus its body (`ℏ^0`, soul-free part).
fn nilpotent(rng: &mut impl Rng, odd: u8, order: u32, parity: Parity, degree: usize) -> ExactScalar {
    let e = element(rng, odd, order, parity, degree);
    let body = e.body();
    e.sub(&ExactScalar::from_coeff(order, body))
}

fn nonzero(rng: &mut impl Rng) -> i64 {
    let c = rng.gen_range(1i64..=3);
    if rng.gen_bool(0.5) {
        c
    } else {
        -c
    }
}

fn constant(order: u32, c: i64) -> ExactScalar {
    ExactScalar::from_poly(order, Poly::constant(q(c)))
}

/// Shape of a random metric.
#[derive(Clone, Copy, Debug)]
pub struct MetricShape {
    pub odd: u8,
    pub order: u32,
    pub graded_symmetric: bool,
    pub degree: usize,
}

/// A random even metric whose body has constant nonzero determinant, so the
/// inverse has polynomial entries. The even block's body is
/// `[[d1 + d2 l m, d2 l], [d2 m, d2]]` with `m = l` in the symmetric case.
/// Graded-symmetric metrics need an even number of odd coordinates for an
/// invertible body; for odd counts construction fails.
pub fn metric(rng: &mut impl Rng, shape: MetricShape) -> Result<Metric<ExactScalar>, GeometryError> {
    let s = SuperSurface::new(shape.odd, shape.order);
    let d = s.dim();
    let n = shape.order;
    let parity = |i: usize, j: usize| Parity::from_bit((s.p(i) + s.p(j)) % 2 == 1);
    let mut g = vec![vec![ExactScalar::zero(n); d]; d];
    let (d1, d2) = (nonzero(rng), nonzero(rng));
    let l = poly(rng, shape.degree);
    let m = if shape.graded_symmetric { l.clone() } else { poly(rng, shape.degree) };
    let lift = |p: Poly| ExactScalar::from_poly(n, p);
    let body = [
        [lift(Poly::constant(q(d1)).add(&l.mul(&m).scale(&q(d2)))), lift(l.scale(&q(d2)))],
        [lift(m.scale(&q(d2))), constant(n, d2)],
    ];
    for i in 0..d {
        let lo = if shape.graded_symmetric { i } else { 0 };
        for j in lo..d {
            let mut v = nilpotent(rng, shape.odd, n, parity(i, j), shape.degree);
            if i < 2 && j < 2 {
                v = v.add(&body[i][j]);
            } else if i >= 2 && j >= 2 {
                let paired = if shape.graded_symmetric {
                    (i - 2) % 2 == 0 && j == i + 1
                } else {
                    i == j
                };
                if shape.graded_symmetric && i == j {
                    v = ExactScalar::zero(n);
                } else if paired {
                    v = v.add(&constant(n, nonzero(rng)));
                }
            }
            if shape.graded_symmetric {
                let sign = if s.p(i) * s.p(j) == 1 { -1 } else { 1 };
                g[j][i] = v.signed(sign);
            }
            g[i][j] = v;
        }
    }
    Metric::new(s, Parity::Even, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Grading;

    fn shape(odd: u8, graded_symmetric: bool) -> MetricShape {
        MetricShape { odd, order: 1, graded_symmetric, degree: 1 }
    }

    #[test]
    fn seeded_and_well_formed() {
        let a = metric(&mut rng(4), shape(2, true)).unwrap();
        let b = metric(&mut rng(4), shape(2, true)).unwrap();
        assert_eq!(a.g(0, 2), b.g(0, 2));
        assert!(a.is_graded_symmetric());
        assert!(!metric(&mut rng(4), shape(2, false)).unwrap().is_graded_symmetric());
        let e = element(&mut rng(9), 2, 2, Parity::Odd, 2);
        assert!(matches!(e.grading(), Grading::Homogeneous(Parity::Odd) | Grading::Zero));
    }

    #[test]
    fn odd_symmetric_metrics_do_not_exist() {
        assert!(matches!(metric(&mut rng(1), shape(1, true)), Err(GeometryError::NotInvertible(_))));
        assert!(metric(&mut rng(1), shape(1, false)).is_ok());
    }
}
