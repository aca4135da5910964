use crate::algebra::{qf, ScalarAlgebra};

use super::connection::{connect_left, connect_right, ChristoffelTable};
use super::{sign, GeometryError, Metric, Side, Tensor, VectorField};

/// `R_IJK^L` and `R̃_IJK^L`, both indexed `[I, J, K, L]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Curvature<A> {
    pub left: Tensor<A>,
    pub right: Tensor<A>,
}

/// `R_IJKL` and `R̃_IJKL`.
#[derive(Clone, Debug, PartialEq)]
pub struct LoweredCurvature<A> {
    pub left: Tensor<A>,
    pub right: Tensor<A>,
}

fn sum<A: ScalarAlgebra>(order: u32, terms: impl Iterator<Item = A>) -> A {
    terms.fold(A::zero(order), |acc, t| acc.add(&t))
}

fn star_nz<A: ScalarAlgebra>(order: u32, a: &A, b: &A) -> A {
    if a.is_zero() || b.is_zero() {
        A::zero(order)
    } else {
        a.star(b)
    }
}

/// Curvature from `[∇_I, ∇_J] ∂_K` and `[∇̃_I, ∇̃_J] ∂_K` directly.
pub fn curvature_commutator<A: ScalarAlgebra>(
    metric: &Metric<A>,
    table: &ChristoffelTable<A>,
) -> Result<Curvature<A>, GeometryError> {
    let s = metric.surface();
    let d = s.dim();
    let column = |side: Side, j: usize, k: usize| VectorField {
        side,
        components: (0..d)
            .map(|l| match side {
                Side::Left => table.gamma(j, k, l).clone(),
                Side::Right => table.gamma_tilde(j, k, l).clone(),
            })
            .collect(),
    };
    let mut nabla_left = Vec::with_capacity(d * d * d);
    let mut nabla_right = Vec::with_capacity(d * d * d);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                nabla_left.push(connect_left(metric, table, i, &column(Side::Left, j, k))?);
                nabla_right.push(connect_right(metric, table, i, &column(Side::Right, j, k)));
            }
        }
    }
    let at = |v: &Vec<VectorField<A>>, i: usize, j: usize, k: usize, l: usize| {
        v[(i * d + j) * d + k].components[l].clone()
    };
    let left = Tensor::from_fn(d, 4, |ix| {
        let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
        at(&nabla_left, i, j, k, l).sub(&at(&nabla_left, j, i, k, l).signed(sign(s.p(i) * s.p(j))))
    });
    let right = Tensor::from_fn(d, 4, |ix| {
        let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
        at(&nabla_right, i, j, k, l)
            .sub(&at(&nabla_right, j, i, k, l).signed(sign(s.p(i) * s.p(j))))
    });
    Ok(Curvature { left, right })
}

/// Curvature from the closed expressions in the Christoffel symbols, valid for
/// even metrics.
pub fn curvature_closed_form<A: ScalarAlgebra>(
    metric: &Metric<A>,
    table: &ChristoffelTable<A>,
) -> Curvature<A> {
    let s = metric.surface();
    let d = s.dim();
    let order = s.order;
    let frame = s.frame();
    let p = |i: usize| s.p(i);
    let left = Tensor::from_fn(d, 4, |ix| {
        let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
        let mut acc = table
            .gamma(j, k, l)
            .derive(frame[i])
            .sub(&table.gamma(i, k, l).derive(frame[j]).signed(sign(p(i) * p(j))));
        for m in 0..d {
            let a = star_nz(order, table.gamma(j, k, m), table.gamma(i, m, l));
            let b = star_nz(order, table.gamma(i, k, m), table.gamma(j, m, l));
            acc = acc
                .add(&a.signed(sign(p(i) * (p(j) + p(k) + p(m)))))
                .sub(&b.signed(sign(p(j) * (p(k) + p(m)))));
        }
        acc
    });
    let right = Tensor::from_fn(d, 4, |ix| {
        let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
        let mut acc = table
            .gamma_tilde(j, k, l)
            .derive(frame[i])
            .signed(sign(p(i) * p(l)))
            .sub(&table.gamma_tilde(i, k, l).derive(frame[j]).signed(sign(p(j) * (p(i) + p(l)))));
        for m in 0..d {
            let a = star_nz(order, table.gamma_tilde(i, m, l), table.gamma_tilde(j, k, m));
            let b = star_nz(order, table.gamma_tilde(j, m, l), table.gamma_tilde(i, k, m));
            acc = acc.add(&a).sub(&b.signed(sign(p(i) * p(j))));
        }
        acc
    });
    Curvature { left, right }
}

/// `R_IJKL = R_IJK^M ⋆ g_ML` and `R̃_IJKL = g_LM ⋆ R̃_IJK^M`.
pub fn lower_curvature<A: ScalarAlgebra>(
    metric: &Metric<A>,
    curvature: &Curvature<A>,
) -> LoweredCurvature<A> {
    let d = metric.dim();
    let order = metric.order();
    let left = Tensor::from_fn(d, 4, |ix| {
        let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
        sum(order, (0..d).map(|m| star_nz(order, curvature.left.get(&[i, j, k, m]), metric.g(m, l))))
    });
    let right = Tensor::from_fn(d, 4, |ix| {
        let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
        sum(order, (0..d).map(|m| star_nz(order, metric.g(l, m), curvature.right.get(&[i, j, k, m]))))
    });
    LoweredCurvature { left, right }
}

/// `R_IJK^L;P`, indexed `[I, J, K, L, P]`.
pub fn covariant_derivative_r<A: ScalarAlgebra>(
    metric: &Metric<A>,
    table: &ChristoffelTable<A>,
    r: &Tensor<A>,
) -> Tensor<A> {
    let s = metric.surface();
    let d = s.dim();
    let order = s.order;
    let frame = s.frame();
    let p = |i: usize| s.p(i);
    Tensor::from_fn(d, 5, |ix| {
        let (i, j, k, l, q) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
        let mut acc = r.get(&[i, j, k, l]).derive(frame[q]);
        for m in 0..d {
            let t1 = star_nz(order, r.get(&[i, j, k, m]), table.gamma(q, m, l))
                .signed(sign(p(q) * (p(i) + p(j) + p(k) + p(m))));
            let t2 = star_nz(order, table.gamma(q, i, m), r.get(&[m, j, k, l]));
            let t3 = star_nz(order, table.gamma(q, j, m), r.get(&[i, m, k, l]))
                .signed(sign(p(i) * (p(m) + p(j))));
            let t4 = star_nz(order, table.gamma(q, k, m), r.get(&[i, j, m, l]))
                .signed(sign((p(i) + p(j)) * (p(k) + p(m))));
            acc = acc.add(&t1).sub(&t2).sub(&t3).sub(&t4);
        }
        acc
    })
}

/// `Ric_JK` by contracting the upper index with the first lower one,
/// graded-symmetrized in `J, K`.
pub fn ricci<A: ScalarAlgebra>(metric: &Metric<A>, r: &Tensor<A>) -> Tensor<A> {
    let s = metric.surface();
    let d = s.dim();
    let order = s.order;
    let p = |i: usize| s.p(i);
    let half = qf(1, 2);
    Tensor::from_fn(d, 2, |ix| {
        let (j, k) = (ix[0], ix[1]);
        sum(
            order,
            (0..d).map(|i| {
                r.get(&[i, j, k, i])
                    .add(&r.get(&[i, k, j, i]).signed(sign(p(j) * p(k))))
                    .signed(sign(p(i) * (p(i) + p(j) + p(k))))
                    .scale(&half)
            }),
        )
    })
}

/// `S = Σ (−1)^{(p_I+1) p_J} Ric_JI ⋆ g^IJ`.
pub fn scalar_curvature<A: ScalarAlgebra>(metric: &Metric<A>, ric: &Tensor<A>) -> A {
    let s = metric.surface();
    let d = s.dim();
    let order = s.order;
    let mut acc = A::zero(order);
    for i in 0..d {
        for j in 0..d {
            let t = star_nz(order, ric.get(&[j, i]), metric.inv(i, j));
            acc = acc.add(&t.signed(sign((s.p(i) + 1) * s.p(j))));
        }
    }
    acc
}
