use crate::algebra::ScalarAlgebra;

use super::{sign, GeometryError, Metric, Side, Tensor, VectorField};

/// Christoffel symbols of both connections. Upper tables are indexed
/// `[I, J, L]` for `Γ_IJ^L`.
#[derive(Clone, Debug)]
pub struct ChristoffelTable<A> {
    pub lower: Tensor<A>,
    pub upper: Tensor<A>,
    pub tilde_lower: Tensor<A>,
    pub tilde_upper: Tensor<A>,
}

impl<A: ScalarAlgebra> ChristoffelTable<A> {
    /// `Γ_IJ^L`
    pub fn gamma(&self, i: usize, j: usize, l: usize) -> &A {
        self.upper.get(&[i, j, l])
    }

    /// `Γ̃_IJ^L`
    pub fn gamma_tilde(&self, i: usize, j: usize, l: usize) -> &A {
        self.tilde_upper.get(&[i, j, l])
    }
}

fn sum<A: ScalarAlgebra>(order: u32, terms: impl Iterator<Item = A>) -> A {
    terms.fold(A::zero(order), |acc, t| acc.add(&t))
}

pub fn christoffel<A: ScalarAlgebra>(metric: &Metric<A>) -> ChristoffelTable<A> {
    let s = metric.surface();
    let d = s.dim();
    let order = s.order;
    let frame = s.frame();
    let dg = Tensor::from_fn(d, 3, |ix| metric.g(ix[1], ix[2]).derive(frame[ix[0]]));
    let p = |i: usize| s.p(i);

    let lower = Tensor::from_fn(d, 3, |ix| {
        let (i, j, k) = (ix[0], ix[1], ix[2]);
        dg.get(&[i, j, k])
            .add(&dg.get(&[j, i, k]).signed(sign(p(i) * p(j))))
            .sub(&dg.get(&[k, i, j]).signed(sign(p(k) * (p(i) + p(j)))))
            .scale(&crate::algebra::qf(1, 2))
    });
    let tilde_lower = Tensor::from_fn(d, 3, |ix| {
        let (i, j, l) = (ix[0], ix[1], ix[2]);
        lower.get(ix).signed(sign(p(l) * (p(i) + p(j))))
    });
    let upper = Tensor::from_fn(d, 3, |ix| {
        let (i, j, l) = (ix[0], ix[1], ix[2]);
        sum(order, (0..d).map(|k| lower.get(&[i, j, k]).star(metric.inv(k, l))))
    });
    let tilde_upper = Tensor::from_fn(d, 3, |ix| {
        let (i, j, l) = (ix[0], ix[1], ix[2]);
        sum(order, (0..d).map(|k| metric.inv(l, k).star(tilde_lower.get(&[i, j, k]))))
    });
    ChristoffelTable {
        lower,
        upper,
        tilde_lower,
        tilde_upper,
    }
}

/// `∇_I Z` for a left field with homogeneous components.
pub fn connect_left<A: ScalarAlgebra>(
    metric: &Metric<A>,
    table: &ChristoffelTable<A>,
    i: usize,
    z: &VectorField<A>,
) -> Result<VectorField<A>, GeometryError> {
    assert_eq!(z.side, Side::Left);
    let s = metric.surface();
    let d = s.dim();
    let di = s.frame()[i];
    let signs = z
        .components
        .iter()
        .map(|c| {
            if s.p(i) == 0 {
                Ok(1)
            } else {
                c.grading().sign_parity().map(|p| sign(p.bit() as usize))
            }
        })
        .collect::<Result<Vec<i8>, _>>()?;
    let components = (0..d)
        .map(|l| {
            let mut acc = z.components[l].derive(di);
            for (j, zj) in z.components.iter().enumerate() {
                let g = table.gamma(i, j, l);
                if zj.is_zero() || g.is_zero() {
                    continue;
                }
                acc = acc.add(&zj.star(g).signed(signs[j]));
            }
            acc
        })
        .collect();
    Ok(VectorField {
        side: Side::Left,
        components,
    })
}

/// `∇̃_I W` for a right field.
pub fn connect_right<A: ScalarAlgebra>(
    metric: &Metric<A>,
    table: &ChristoffelTable<A>,
    i: usize,
    w: &VectorField<A>,
) -> VectorField<A> {
    assert_eq!(w.side, Side::Right);
    let s = metric.surface();
    let d = s.dim();
    let di = s.frame()[i];
    let components = (0..d)
        .map(|l| {
            let mut acc = w.components[l].derive(di).signed(sign(s.p(l) * s.p(i)));
            for (j, wj) in w.components.iter().enumerate() {
                let g = table.gamma_tilde(i, j, l);
                if wj.is_zero() || g.is_zero() {
                    continue;
                }
                acc = acc.add(&g.star(wj));
            }
            acc
        })
        .collect();
    VectorField {
        side: Side::Right,
        components,
    }
}

/// `T_IJ^L = Γ_IJ^L − (−1)^{p_I p_J} Γ_JI^L`, indexed `[I, J, L]`.
pub fn torsion<A: ScalarAlgebra>(metric: &Metric<A>, table: &ChristoffelTable<A>) -> Tensor<A> {
    let s = metric.surface();
    Tensor::from_fn(s.dim(), 3, |ix| {
        let (i, j, l) = (ix[0], ix[1], ix[2]);
        table
            .gamma(i, j, l)
            .sub(&table.gamma(j, i, l).signed(sign(s.p(i) * s.p(j))))
    })
}
