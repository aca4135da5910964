//! Metric, connections and curvature of a deformed super surface, generic
//! over the scalar backend.

mod check;
mod connection;
mod curvature;

use std::fmt;

use thiserror::Error;

use crate::algebra::{AlgebraError, FrameIndex, Grading, Parity, ScalarAlgebra};

pub use check::{check_identities, IdentityCheck, IdentityKind, Probes, Status};
pub use connection::{christoffel, connect_left, connect_right, torsion, ChristoffelTable};
pub use curvature::{
    covariant_derivative_r, curvature_closed_form, curvature_commutator, lower_curvature,
    ricci, scalar_curvature, Curvature, LoweredCurvature,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("entry g{row}{col} has parity {found}, expected {expected}")]
    Parity {
        row: usize,
        col: usize,
        expected: Parity,
        found: String,
    },
    #[error("metric not invertible: {0}")]
    NotInvertible(String),
    #[error("metric must be {dim}x{dim}")]
    Shape { dim: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Frame `(t1, t2, ξ1, …, ξP)` and truncation order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuperSurface {
    pub odd: u8,
    pub order: u32,
}

impl SuperSurface {
    pub fn new(odd: u8, order: u32) -> Self {
        SuperSurface { odd, order }
    }

    pub fn dim(&self) -> usize {
        2 + self.odd as usize
    }

    pub fn frame(&self) -> Vec<FrameIndex> {
        (0..self.dim()).map(FrameIndex::from_slot).collect()
    }

    /// Parity bit of frame slot `i`.
    pub fn p(&self, i: usize) -> usize {
        usize::from(i >= 2)
    }
}

/// `(-1)^e` as ±1.
pub(crate) fn sign(e: usize) -> i8 {
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

/// A dense `dim^rank` table.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<A> {
    dim: usize,
    rank: usize,
    data: Vec<A>,
}

impl<A: Clone> Tensor<A> {
    pub fn from_fn(dim: usize, rank: usize, mut f: impl FnMut(&[usize]) -> A) -> Self {
        let total = dim.pow(rank as u32);
        let mut idx = vec![0; rank];
        let mut data = Vec::with_capacity(total);
        for flat in 0..total {
            let mut r = flat;
            for slot in idx.iter_mut().rev() {
                *slot = r % dim;
                r /= dim;
            }
            data.push(f(&idx));
        }
        Tensor { dim, rank, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> &A {
        &self.data[self.offset(idx)]
    }

    /// All `(index tuple, value)` pairs in lexicographic index order.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<usize>, &A)> {
        let dim = self.dim;
        let rank = self.rank;
        self.data.iter().enumerate().map(move |(flat, v)| {
            let mut idx = vec![0; rank];
            let mut r = flat;
            for slot in idx.iter_mut().rev() {
                *slot = r % dim;
                r /= dim;
            }
            (idx, v)
        })
    }
}

/// Which module a vector field lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `Z = Z^I ⋆ ∂_I`
    Left,
    /// `Z = ∂_I ⋆ Z^I`
    Right,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VectorField<A> {
    pub side: Side,
    pub components: Vec<A>,
}

impl<A: ScalarAlgebra> VectorField<A> {
    /// The frame field `∂_I`.
    pub fn frame(side: Side, surface: &SuperSurface, i: usize) -> Self {
        let order = surface.order;
        VectorField {
            side,
            components: (0..surface.dim())
                .map(|j| if i == j { A::one(order) } else { A::zero(order) })
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    /// `f ⋆ Z` for left fields.
    pub fn scale_left(&self, f: &A) -> Self {
        VectorField {
            side: self.side,
            components: self.components.iter().map(|c| f.star(c)).collect(),
        }
    }

    /// `Z ⋆ f` for right fields.
    pub fn scale_right(&self, f: &A) -> Self {
        VectorField {
            side: self.side,
            components: self.components.iter().map(|c| c.star(f)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        VectorField {
            side: self.side,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn signed(&self, s: i8) -> Self {
        VectorField {
            side: self.side,
            components: self.components.iter().map(|c| c.signed(s)).collect(),
        }
    }
}

/// A metric `g_IJ` with its computed star right inverse.
#[derive(Clone, Debug)]
pub struct Metric<A> {
    surface: SuperSurface,
    degree: Parity,
    entries: Vec<Vec<A>>,
    inverse: Vec<Vec<A>>,
    graded_symmetric: bool,
}

impl<A: ScalarAlgebra> Metric<A> {
    /// Validates the parity law `|g_IJ| = |g| + |I| + |J|` and computes the
    /// right inverse.
    pub fn new(
        surface: SuperSurface,
        degree: Parity,
        entries: Vec<Vec<A>>,
    ) -> Result<Self, GeometryError> {
        let d = surface.dim();
        if entries.len() != d || entries.iter().any(|r| r.len() != d) {
            return Err(GeometryError::Shape { dim: d });
        }
        validate_parity(&surface, degree, &entries)?;
        let inverse = A::invert_matrix(&entries).map_err(|e| match e {
            AlgebraError::NotInvertible(m) => GeometryError::NotInvertible(m),
            other => GeometryError::Algebra(other),
        })?;
        let graded_symmetric = (0..d).all(|i| {
            (0..d).all(|j| {
                entries[i][j] == entries[j][i].signed(sign(surface.p(i) * surface.p(j)))
            })
        });
        Ok(Metric {
            surface,
            degree,
            entries,
            inverse,
            graded_symmetric,
        })
    }

    pub fn surface(&self) -> &SuperSurface {
        &self.surface
    }

    pub fn degree(&self) -> Parity {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.surface.dim()
    }

    pub fn order(&self) -> u32 {
        self.surface.order
    }

    pub fn g(&self, i: usize, j: usize) -> &A {
        &self.entries[i][j]
    }

    /// `g^{IJ}`.
    pub fn inv(&self, i: usize, j: usize) -> &A {
        &self.inverse[i][j]
    }

    pub fn entries(&self) -> &[Vec<A>] {
        &self.entries
    }

    pub fn inverse(&self) -> &[Vec<A>] {
        &self.inverse
    }

    pub fn is_graded_symmetric(&self) -> bool {
        self.graded_symmetric
    }

    /// `g_IJ ⋆ g^JK − δ_I^K`.
    pub fn right_inverse_residual(&self) -> Vec<Vec<A>> {
        let d = self.dim();
        let order = self.order();
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|k| {
                        let mut acc = if i == k { A::one(order).neg() } else { A::zero(order) };
                        for j in 0..d {
                            acc = acc.add(&self.entries[i][j].star(&self.inverse[j][k]));
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    }

    /// `⟨Z, W⟩ = Z^I ⋆ g_IJ ⋆ W^J`.
    pub fn pairing(&self, z: &VectorField<A>, w: &VectorField<A>) -> A {
        assert_eq!(z.side, Side::Left, "first argument must be a left field");
        assert_eq!(w.side, Side::Right, "second argument must be a right field");
        let d = self.dim();
        let mut acc = A::zero(self.order());
        for i in 0..d {
            if z.components[i].is_zero() {
                continue;
            }
            for j in 0..d {
                if self.entries[i][j].is_zero() || w.components[j].is_zero() {
                    continue;
                }
                acc = acc.add(&z.components[i].star(&self.entries[i][j]).star(&w.components[j]));
            }
        }
        acc
    }
}

fn validate_parity<A: ScalarAlgebra>(
    surface: &SuperSurface,
    degree: Parity,
    entries: &[Vec<A>],
) -> Result<(), GeometryError> {
    for (i, row) in entries.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            let expected = Parity::from_bit((degree.bit() as usize + surface.p(i) + surface.p(j)) % 2 == 1);
            match e.grading() {
                Grading::Zero => {}
                Grading::Homogeneous(p) if p == expected => {}
                other => {
                    return Err(GeometryError::Parity {
                        row: i + 1,
                        col: j + 1,
                        expected,
                        found: match other {
                            Grading::Homogeneous(p) => p.to_string(),
                            _ => "mixed".into(),
                        },
                    })
                }
            }
        }
    }
    Ok(())
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}
