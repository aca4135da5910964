//! The graded scalar algebra: parities, frame indices, Grassmann monomials,
//! rational coefficients, and the exact ℏ-truncated backend.
//!
//! [`ScalarAlgebra`] is the interface the geometry pipeline is written against;
//! both [`ExactScalar`] and [`crate::symbolic::SymScalar`] implement it.

mod exact;
mod grassmann;
mod coef;
mod modp;
mod poly;
mod ratfunc;

use std::fmt;
use std::ops::Add;

use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use exact::{invert_matrix_neumann, ExactScalar};
pub use grassmann::{GrassmannMono, MAX_GENERATORS};
pub use poly::{Poly, Q};
pub use ratfunc::RationalCoeff;

pub(crate) use poly::fmt_q_abs;

/// A ℤ₂ degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_bit(odd: bool) -> Self {
        if odd {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    /// `(-1)^{self · other}`
    pub fn koszul(self, other: Parity) -> i8 {
        if self.is_odd() && other.is_odd() {
            -1
        } else {
            1
        }
    }
}

impl Add for Parity {
    type Output = Parity;

    fn add(self, rhs: Parity) -> Parity {
        Parity::from_bit(self.is_odd() ^ rhs.is_odd())
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// `(-1)^{sum of parities}` as ±1.
pub fn sign_of(parities: impl IntoIterator<Item = Parity>) -> i8 {
    let odd = parities.into_iter().filter(|p| p.is_odd()).count();
    if odd % 2 == 0 {
        1
    } else {
        -1
    }
}

/// A coordinate frame direction: `∂_{t_k}` or `∂_{ξ_α}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FrameIndex {
    Even(u8),
    Odd(u8),
}

impl FrameIndex {
    pub fn parity(self) -> Parity {
        match self {
            FrameIndex::Even(_) => Parity::Even,
            FrameIndex::Odd(_) => Parity::Odd,
        }
    }

    /// Zero-based slot in the frame `(t1, t2, ξ1, …, ξP)`.
    pub fn slot(self) -> usize {
        match self {
            FrameIndex::Even(k) => k as usize - 1,
            FrameIndex::Odd(a) => a as usize + 1,
        }
    }

    pub fn from_slot(slot: usize) -> Self {
        match slot {
            0 | 1 => FrameIndex::Even(slot as u8 + 1),
            s => FrameIndex::Odd((s - 1) as u8),
        }
    }
}

impl fmt::Display for FrameIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameIndex::Even(k) => write!(f, "t{k}"),
            FrameIndex::Odd(a) => write!(f, "xi{a}"),
        }
    }
}

/// The parity content of an element.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grading {
    Zero,
    Homogeneous(Parity),
    Mixed,
}

impl Grading {
    /// The parity used in sign rules. Zero is treated as even since its terms vanish.
    pub fn sign_parity(self) -> Result<Parity, AlgebraError> {
        match self {
            Grading::Zero => Ok(Parity::Even),
            Grading::Homogeneous(p) => Ok(p),
            Grading::Mixed => Err(AlgebraError::Inhomogeneous),
        }
    }

    /// Combines the gradings of two summands.
    pub fn join(self, other: Grading) -> Grading {
        match (self, other) {
            (Grading::Zero, g) | (g, Grading::Zero) => g,
            (Grading::Homogeneous(a), Grading::Homogeneous(b)) if a == b => self,
            _ => Grading::Mixed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("mismatched truncation orders: {0} vs {1}")]
    OrderMismatch(u32, u32),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("element has no definite parity")]
    Inhomogeneous,
}

/// Operations shared by the exact and symbolic backends.
///
/// Every element carries its ℏ-truncation order; binary operations require
/// equal orders and panic otherwise (`try_*` variants on the concrete types
/// return errors instead).
pub trait ScalarAlgebra: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn zero(order: u32) -> Self;
    fn from_rational(order: u32, c: &Q) -> Self;
    /// The coordinate function `t_k`.
    fn coordinate(order: u32, k: u8) -> Self;
    /// The odd generator `ξ_α`.
    fn generator(order: u32, alpha: u8) -> Self;
    /// The deformation parameter ℏ (zero when `order` is 0).
    fn hbar(order: u32) -> Self;

    fn order(&self) -> u32;
    fn is_zero(&self) -> bool;
    fn grading(&self) -> Grading;

    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, c: &Q) -> Self;
    fn star(&self, other: &Self) -> Self;
    fn derive(&self, index: FrameIndex) -> Self;
    /// Two-sided ⋆-inverse.
    fn invert(&self) -> Result<Self, AlgebraError>;

    fn one(order: u32) -> Self {
        Self::from_rational(order, &Q::one())
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Multiplies by ±1.
    fn signed(&self, sign: i8) -> Self {
        if sign < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Right inverse `X` of a square matrix, `M ⋆ X = 1`.
    ///
    /// Default: Gauss–Jordan by column operations (right multiplication),
    /// pivoting on the first ⋆-invertible entry of each row.
    fn invert_matrix(m: &[Vec<Self>]) -> Result<Vec<Vec<Self>>, AlgebraError> {
        invert_matrix_columns(m)
    }
}

/// Column-operation Gauss–Jordan right inverse over a noncommutative ring.
pub fn invert_matrix_columns<A: ScalarAlgebra>(m: &[Vec<A>]) -> Result<Vec<Vec<A>>, AlgebraError> {
    let n = m.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let order = m[0][0].order();
    let mut a: Vec<Vec<A>> = m.to_vec();
    let mut e: Vec<Vec<A>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { A::one(order) } else { A::zero(order) })
                .collect()
        })
        .collect();
    for r in 0..n {
        let mut pivot = None;
        for c in r..n {
            if a[r][c].is_zero() {
                continue;
            }
            if let Ok(inv) = a[r][c].invert() {
                pivot = Some((c, inv));
                break;
            }
        }
        let (c, inv) = pivot.ok_or_else(|| {
            AlgebraError::NotInvertible(format!("no invertible pivot in row {}", r + 1))
        })?;
        if c != r {
            for row in a.iter_mut().chain(e.iter_mut()) {
                row.swap(c, r);
            }
        }
        for row in a.iter_mut().chain(e.iter_mut()) {
            row[r] = row[r].star(&inv);
        }
        for j in 0..n {
            if j == r || a[r][j].is_zero() {
                continue;
            }
            let factor = a[r][j].clone();
            for row in a.iter_mut().chain(e.iter_mut()) {
                if !row[r].is_zero() {
                    let d = row[r].star(&factor);
                    row[j] = row[j].sub(&d);
                }
            }
        }
    }
    Ok(e)
}

/// `Q` from a small integer.
pub fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

/// `Q` from a small fraction.
pub fn qf(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

