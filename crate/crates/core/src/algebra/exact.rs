//! Exact backend: truncated ℏ-series with Grassmann-monomial-indexed
//! rational-function coefficients, multiplied by the Moyal product.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::{
    q, AlgebraError, FrameIndex, Grading, GrassmannMono, Parity, Poly, RationalCoeff,
    ScalarAlgebra, Q,
};

/// An element of the deformed graded algebra, truncated after `ℏ^order`.
///
/// Stored sparsely as `(ℏ-degree, monomial) → coefficient` with no zero
/// coefficients and no degrees above the order, so structural equality is
/// equality in the truncated algebra.
#[derive(Clone, PartialEq, Eq)]
pub struct ExactScalar {
    order: u32,
    terms: BTreeMap<(u32, GrassmannMono), RationalCoeff>,
}

fn binomial(n: usize, k: usize) -> i64 {
    let mut r = 1i64;
    for i in 0..k {
        r = r * (n - i) as i64 / (i + 1) as i64;
    }
    r
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

/// All mixed partials `∂_{t1}^i ∂_{t2}^j f` with `i + j ≤ max`, indexed `[i][j]`.
fn derivative_table(f: &RationalCoeff, max: usize) -> Vec<Vec<RationalCoeff>> {
    let mut table: Vec<Vec<RationalCoeff>> = Vec::with_capacity(max + 1);
    for i in 0..=max {
        let mut row = Vec::with_capacity(max + 1 - i);
        for j in 0..=(max - i) {
            let entry = if i == 0 && j == 0 {
                f.clone()
            } else if j == 0 {
                let prev: &RationalCoeff = &table[i - 1][0];
                if prev.is_zero() {
                    RationalCoeff::zero()
                } else {
                    prev.derive(1)
                }
            } else {
                let prev: &RationalCoeff = &row[j - 1];
                if prev.is_zero() {
                    RationalCoeff::zero()
                } else {
                    prev.derive(2)
                }
            };
            row.push(entry);
        }
        table.push(row);
    }
    table
}

/// The ℏ^m coefficient of the Moyal product of two commutative coefficients:
/// `(1/m!) Σ_k (-1)^k C(m,k) (∂1^{m-k} ∂2^k f)(∂1^k ∂2^{m-k} g)`.
fn moyal_term(df: &[Vec<RationalCoeff>], dg: &[Vec<RationalCoeff>], m: usize) -> RationalCoeff {
    let mut acc = RationalCoeff::zero();
    for k in 0..=m {
        let a = &df[m - k][k];
        let b = &dg[k][m - k];
        if a.is_zero() || b.is_zero() {
            continue;
        }
        let c = binomial(m, k) * if k % 2 == 0 { 1 } else { -1 };
        acc = acc.add(&a.mul(b).scale(&q(c)));
    }
    if m > 1 {
        acc = acc.scale(&Q::new(1.into(), factorial(m).into()));
    }
    acc
}

impl ExactScalar {
    pub fn zero(order: u32) -> Self {
        ExactScalar {
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_coeff(order: u32, c: RationalCoeff) -> Self {
        Self::monomial(order, 0, GrassmannMono::ONE, c)
    }

    pub fn from_poly(order: u32, p: Poly) -> Self {
        Self::from_coeff(order, RationalCoeff::from_poly(p))
    }

    /// `c · ℏ^n · mono`, zero if `n` exceeds the order.
    pub fn monomial(order: u32, n: u32, mono: GrassmannMono, c: RationalCoeff) -> Self {
        let mut s = Self::zero(order);
        s.accumulate(n, mono, c);
        s
    }

    fn accumulate(&mut self, n: u32, mono: GrassmannMono, c: RationalCoeff) {
        if n > self.order || c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((n, mono)) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().add(&c);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    /// Nonzero terms `(ℏ-degree, monomial, coefficient)` in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (u32, GrassmannMono, &RationalCoeff)> {
        self.terms.iter().map(|((n, m), c)| (*n, *m, c))
    }

    pub fn coeff(&self, n: u32, mono: GrassmannMono) -> RationalCoeff {
        self.terms
            .get(&(n, mono))
            .cloned()
            .unwrap_or_else(RationalCoeff::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The ℏ⁰, soul-free part.
    pub fn body(&self) -> RationalCoeff {
        self.coeff(0, GrassmannMono::ONE)
    }

    /// Reduction modulo ℏ: keeps only degree-0 terms.
    pub fn classical(&self) -> ExactScalar {
        self.truncate(0).with_order(self.order)
    }

    /// Drops all terms above `ℏ^n` and sets the order to `n`.
    pub fn truncate(&self, n: u32) -> ExactScalar {
        ExactScalar {
            order: n,
            terms: self
                .terms
                .iter()
                .filter(|((d, _), _)| *d <= n)
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }

    fn with_order(mut self, order: u32) -> ExactScalar {
        self.order = order;
        self.terms.retain(|(d, _), _| *d <= order);
        self
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.order != other.order {
            return Err(AlgebraError::OrderMismatch(self.order, other.order));
        }
        let mut out = self.clone();
        for ((n, m), c) in &other.terms {
            out.accumulate(*n, *m, c.clone());
        }
        Ok(out)
    }

    /// The Moyal product extended to the Grassmann factors.
    pub fn try_star(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.order != other.order {
            return Err(AlgebraError::OrderMismatch(self.order, other.order));
        }
        let order = self.order;
        let mut out = ExactScalar::zero(order);
        if self.is_empty() || other.is_empty() {
            return Ok(out);
        }
        let left_tables: Vec<_> = self
            .terms
            .iter()
            .map(|(&(n, _), c)| derivative_table(c, (order - n) as usize))
            .collect();
        let right_tables: Vec<_> = other
            .terms
            .iter()
            .map(|(&(n, _), c)| derivative_table(c, (order - n) as usize))
            .collect();
        for ((&(n1, m1), _), df) in self.terms.iter().zip(&left_tables) {
            for ((&(n2, m2), _), dg) in other.terms.iter().zip(&right_tables) {
                if n1 + n2 > order {
                    continue;
                }
                let Some((sign, mono)) = m1.mul(m2) else {
                    continue;
                };
                for m in 0..=(order - n1 - n2) {
                    let c = moyal_term(df, dg, m as usize);
                    if c.is_zero() {
                        continue;
                    }
                    let c = if sign < 0 { c.neg() } else { c };
                    out.accumulate(n1 + n2 + m, mono, c);
                }
            }
        }
        Ok(out)
    }

    /// Sum of the ±1-signed Koszul parity parts: returns `(even part, odd part)`.
    pub fn split_parity(&self) -> (ExactScalar, ExactScalar) {
        let mut even = ExactScalar::zero(self.order);
        let mut odd = ExactScalar::zero(self.order);
        for ((n, m), c) in &self.terms {
            let target = if m.parity() == Parity::Odd { &mut odd } else { &mut even };
            target.terms.insert((*n, *m), c.clone());
        }
        (even, odd)
    }

    /// Largest Grassmann degree present.
    fn max_soul_degree(&self) -> u32 {
        self.terms.keys().map(|(_, m)| m.degree()).max().unwrap_or(0)
    }
}

impl ScalarAlgebra for ExactScalar {
    fn zero(order: u32) -> Self {
        ExactScalar::zero(order)
    }

    fn from_rational(order: u32, c: &Q) -> Self {
        ExactScalar::from_coeff(order, RationalCoeff::constant(c.clone()))
    }

    fn coordinate(order: u32, k: u8) -> Self {
        ExactScalar::from_poly(order, Poly::coordinate(k))
    }

    fn generator(order: u32, alpha: u8) -> Self {
        ExactScalar::monomial(order, 0, GrassmannMono::generator(alpha), RationalCoeff::one())
    }

    fn hbar(order: u32) -> Self {
        ExactScalar::monomial(order, 1, GrassmannMono::ONE, RationalCoeff::one())
    }

    fn order(&self) -> u32 {
        self.order
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn grading(&self) -> Grading {
        self.terms
            .keys()
            .fold(Grading::Zero, |g, (_, m)| g.join(Grading::Homogeneous(m.parity())))
    }

    fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("ExactScalar::add")
    }

    fn neg(&self) -> Self {
        ExactScalar {
            order: self.order,
            terms: self.terms.iter().map(|(k, c)| (*k, c.neg())).collect(),
        }
    }

    fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return ExactScalar::zero(self.order);
        }
        ExactScalar {
            order: self.order,
            terms: self.terms.iter().map(|(k, v)| (*k, v.scale(c))).collect(),
        }
    }

    fn star(&self, other: &Self) -> Self {
        self.try_star(other).expect("ExactScalar::star")
    }

    fn derive(&self, index: FrameIndex) -> Self {
        let mut out = ExactScalar::zero(self.order);
        match index {
            FrameIndex::Even(k) => {
                for ((n, m), c) in &self.terms {
                    out.accumulate(*n, *m, c.derive(k));
                }
            }
            FrameIndex::Odd(alpha) => {
                for ((n, m), c) in &self.terms {
                    if let Some((sign, rest)) = m.derive(alpha) {
                        out.accumulate(*n, rest, if sign < 0 { c.neg() } else { c.clone() });
                    }
                }
            }
        }
        out
    }

    /// Inverts the body pointwise, then sums the terminating Neumann series
    /// in `E = 1 - a ⋆ b⁻¹`, which is nilpotent (every term carries ℏ or a
    /// Grassmann generator).
    fn invert(&self) -> Result<Self, AlgebraError> {
        let body = self.body();
        let binv = body
            .recip()
            .ok_or_else(|| AlgebraError::NotInvertible(format!("zero body in {self}")))?;
        let u = ExactScalar::from_coeff(self.order, binv);
        let one = ExactScalar::one(self.order);
        let e = one.sub(&self.star(&u));
        let mut sum = one;
        let mut power = e.clone();
        let bound = self.order + self.max_soul_degree() + 2;
        for _ in 0..bound {
            if power.is_zero() {
                break;
            }
            sum = sum.add(&power);
            power = power.star(&e);
        }
        debug_assert!(power.is_zero(), "Neumann series did not terminate");
        Ok(u.star(&sum))
    }

    fn invert_matrix(m: &[Vec<Self>]) -> Result<Vec<Vec<Self>>, AlgebraError> {
        invert_matrix_neumann(m)
    }
}

/// Right inverse of a matrix over the exact algebra: invert the body matrix
/// over the rational-function field, then sum the terminating Neumann series
/// in the nilpotent remainder `E = 1 - M ⋆ B⁻¹`.
pub fn invert_matrix_neumann(m: &[Vec<ExactScalar>]) -> Result<Vec<Vec<ExactScalar>>, AlgebraError> {
    let n = m.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let order = m[0][0].order;
    let body: Vec<Vec<RationalCoeff>> = m.iter().map(|r| r.iter().map(|x| x.body()).collect()).collect();
    let body_inv = invert_field_matrix(&body)
        .ok_or_else(|| AlgebraError::NotInvertible("singular body matrix".into()))?;
    let x0: Vec<Vec<ExactScalar>> = body_inv
        .into_iter()
        .map(|r| r.into_iter().map(|c| ExactScalar::from_coeff(order, c)).collect())
        .collect();
    let identity: Vec<Vec<ExactScalar>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        ExactScalar::one(order)
                    } else {
                        ExactScalar::zero(order)
                    }
                })
                .collect()
        })
        .collect();
    let mx0 = mat_star(m, &x0);
    let e = mat_sub(&identity, &mx0);
    let soul = m
        .iter()
        .flat_map(|r| r.iter().map(|x| x.max_soul_degree()))
        .max()
        .unwrap_or(0);
    let mut sum = identity.clone();
    let mut power = e.clone();
    for _ in 0..(order + soul + 2) {
        if power.iter().all(|r| r.iter().all(|x| x.is_zero())) {
            break;
        }
        sum = mat_add(&sum, &power);
        power = mat_star(&power, &e);
    }
    Ok(mat_star(&x0, &sum))
}

fn mat_star(a: &[Vec<ExactScalar>], b: &[Vec<ExactScalar>]) -> Vec<Vec<ExactScalar>> {
    let n = a.len();
    let order = a[0][0].order;
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc = ExactScalar::zero(order);
                    for k in 0..n {
                        if a[i][k].is_zero() || b[k][j].is_zero() {
                            continue;
                        }
                        acc = acc.add(&a[i][k].star(&b[k][j]));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn mat_add(a: &[Vec<ExactScalar>], b: &[Vec<ExactScalar>]) -> Vec<Vec<ExactScalar>> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p.add(q)).collect())
        .collect()
}

fn mat_sub(a: &[Vec<ExactScalar>], b: &[Vec<ExactScalar>]) -> Vec<Vec<ExactScalar>> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p.sub(q)).collect())
        .collect()
}

/// Gauss–Jordan inverse over the (commutative) rational-function field.
fn invert_field_matrix(m: &[Vec<RationalCoeff>]) -> Option<Vec<Vec<RationalCoeff>>> {
    let n = m.len();
    let mut a: Vec<Vec<RationalCoeff>> = m.to_vec();
    let mut inv: Vec<Vec<RationalCoeff>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        RationalCoeff::one()
                    } else {
                        RationalCoeff::zero()
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].recip()?;
        for j in 0..n {
            a[col][j] = a[col][j].mul(&p);
            inv[col][j] = inv[col][j].mul(&p);
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let da = a[col][j].mul(&f);
                a[r][j] = a[r][j].sub(&da);
                let di = inv[col][j].mul(&f);
                inv[r][j] = inv[r][j].sub(&di);
            }
        }
    }
    Some(inv)
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ExactScalar {
    /// Prints in the metric-file expression grammar, e.g.
    /// `t1 * t2 + hbar - 2 * hbar^2 * xi1 * xi2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, ((n, m), c)) in self.terms.iter().enumerate() {
            let mut tail = Vec::new();
            match n {
                0 => {}
                1 => tail.push("hbar".to_string()),
                _ => tail.push(format!("hbar^{n}")),
            }
            tail.extend(m.generators().map(|a| format!("xi{a}")));
            // single-term polynomial coefficients print inline with their sign
            let (neg, coeff) = match c.as_constant() {
                Some(k) => (
                    k.is_negative(),
                    if k.abs().is_one() && !tail.is_empty() {
                        None
                    } else {
                        Some(super::fmt_q_abs(&k))
                    },
                ),
                None if c.is_polynomial() && c.numerator().terms().count() == 1 => {
                    let lead = c.numerator().leading_coeff();
                    if lead.is_negative() {
                        (true, Some(c.numerator().neg().to_string()))
                    } else {
                        (false, Some(c.numerator().to_string()))
                    }
                }
                None => (false, Some(format!("({c})"))),
            };
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let mut factors: Vec<String> = coeff.into_iter().collect();
            factors.extend(tail);
            write!(f, "{}", factors.join(" * "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const N: u32 = 4;

    fn t(k: u8) -> ExactScalar {
        ExactScalar::coordinate(N, k)
    }

    fn xi(a: u8) -> ExactScalar {
        ExactScalar::generator(N, a)
    }

    fn hbar() -> ExactScalar {
        ExactScalar::hbar(N)
    }

    fn c(n: i64) -> ExactScalar {
        ExactScalar::from_rational(N, &q(n))
    }

    #[test]
    fn add_examples() {
        assert!(t(1).add(&t(1).neg()).is_zero());
        assert_eq!(xi(1).add(&xi(1)), xi(1).scale(&q(2)));
        let lhs = hbar().star(&t(2)).add(&xi(1).star(&xi(2))).add(&t(2));
        assert_eq!(lhs.len(), 3);
        assert_eq!(lhs.coeff(1, GrassmannMono::ONE), RationalCoeff::from_poly(Poly::coordinate(2)));
    }

    #[test]
    fn add_rejects_mismatched_orders() {
        let a = ExactScalar::coordinate(2, 1);
        let b = ExactScalar::coordinate(3, 1);
        assert_eq!(a.try_add(&b), Err(AlgebraError::OrderMismatch(2, 3)));
        assert_eq!(a.try_star(&b), Err(AlgebraError::OrderMismatch(2, 3)));
    }

    #[test]
    fn star_examples() {
        // t1 ⋆ t2 = t1 t2 + ℏ, t2 ⋆ t1 = t1 t2 − ℏ
        let t1t2 = ExactScalar::from_poly(N, Poly::coordinate(1).mul(&Poly::coordinate(2)));
        assert_eq!(t(1).star(&t(2)), t1t2.add(&hbar()));
        assert_eq!(t(2).star(&t(1)), t1t2.sub(&hbar()));
        assert!(xi(1).star(&xi(1)).is_zero());
        let t2sq = t(2).star(&t(2));
        let t2cu = t2sq.star(&t(2));
        assert_eq!(
            t2sq.star(&t2cu),
            ExactScalar::from_poly(N, Poly::monomial(q(1), 0, 5))
        );
        assert_eq!(xi(2).star(&xi(1)), xi(1).star(&xi(2)).neg());
    }

    #[test]
    fn star_second_order_term() {
        // t1^2 ⋆ t2^2 = t1^2 t2^2 + 4ℏ t1 t2 + 2ℏ^2
        let a = ExactScalar::from_poly(N, Poly::monomial(q(1), 2, 0));
        let b = ExactScalar::from_poly(N, Poly::monomial(q(1), 0, 2));
        let expected = ExactScalar::from_poly(N, Poly::monomial(q(1), 2, 2))
            .add(&ExactScalar::monomial(N, 1, GrassmannMono::ONE, Poly::monomial(q(4), 1, 1).into()))
            .add(&ExactScalar::monomial(N, 2, GrassmannMono::ONE, RationalCoeff::constant(q(2))));
        assert_eq!(a.star(&b), expected);
    }

    #[test]
    fn derive_examples() {
        let x12 = xi(1).star(&xi(2));
        assert_eq!(x12.derive(FrameIndex::Odd(1)), xi(2));
        assert_eq!(x12.derive(FrameIndex::Odd(2)), xi(1).neg());
        let p = ExactScalar::from_poly(N, Poly::monomial(q(1), 2, 1));
        assert_eq!(
            p.derive(FrameIndex::Even(1)),
            ExactScalar::from_poly(N, Poly::monomial(q(2), 1, 1))
        );
    }

    #[test]
    fn invert_examples() {
        let a = c(1).add(&xi(1).star(&xi(2)));
        assert_eq!(a.invert().unwrap(), c(1).sub(&xi(1).star(&xi(2))));
        let inv = t(2).invert().unwrap();
        assert_eq!(
            inv,
            ExactScalar::from_coeff(N, RationalCoeff::new(Poly::one(), Poly::coordinate(2)).unwrap())
        );
        assert!(matches!(xi(1).invert(), Err(AlgebraError::NotInvertible(_))));
    }

    #[test]
    fn invert_is_two_sided_with_noncommuting_body() {
        let a = c(2).add(&t(1).star(&t(2))).add(&hbar().star(&t(1))).add(&xi(1).star(&xi(2)));
        let b = a.invert().unwrap();
        assert_eq!(a.star(&b), c(1));
        assert_eq!(b.star(&a), c(1));
    }

    #[test]
    fn grading_and_display() {
        assert_eq!(xi(1).grading(), Grading::Homogeneous(Parity::Odd));
        assert_eq!(t(1).add(&xi(1)).grading(), Grading::Mixed);
        assert_eq!(ExactScalar::zero(N).grading(), Grading::Zero);
        let s = t(1).star(&t(2)).sub(&hbar().star(&xi(1)).scale(&q(3)));
        assert_eq!(s.to_string(), "t1 * t2 + hbar - 3 * hbar * xi1");
    }
}
