pub mod algebra;

pub use algebra::{
    AlgebraError, ExactScalar, FrameIndex, Grading, GrassmannMono, Parity, Poly, RationalCoeff,
    ScalarAlgebra, Q,
};
pub mod symbolic;

pub use symbolic::SymScalar;
pub mod geometry;

pub use geometry::{
    Curvature, GeometryError, IdentityCheck, IdentityKind, Metric, Side, Status, SuperSurface,
    Tensor, VectorField,
};
pub mod crosscheck;
pub mod dsl;
pub mod random;
