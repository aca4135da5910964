//! Polynomial coefficients: machine-word fractions, promoted to big
//! rationals on overflow. Values that fit are always stored small, so
//! structural equality is value equality.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, ToPrimitive, Zero};

type Small = Ratio<i64>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Coef {
    Small(Small),
    Big(BigRational),
}

impl Coef {
    pub fn zero() -> Self {
        Coef::Small(Small::zero())
    }

    pub fn one() -> Self {
        Coef::Small(Small::one())
    }

    pub fn int(n: i64) -> Self {
        Coef::Small(Small::from_integer(n))
    }

    pub fn from_q(q: &BigRational) -> Self {
        match (q.numer().to_i64(), q.denom().to_i64()) {
            (Some(n), Some(d)) => Coef::Small(Small::new_raw(n, d)),
            _ => Coef::Big(q.clone()),
        }
    }

    pub fn to_q(&self) -> BigRational {
        match self {
            Coef::Small(r) => BigRational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom())),
            Coef::Big(b) => b.clone(),
        }
    }

    /// Numerator and denominator as machine words, if small.
    pub fn small_parts(&self) -> Option<(i64, i64)> {
        match self {
            Coef::Small(r) => Some((*r.numer(), *r.denom())),
            Coef::Big(_) => None,
        }
    }

    fn big(b: BigRational) -> Self {
        Coef::from_q(&b)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coef::Small(r) => r.is_zero(),
            Coef::Big(b) => b.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Coef::Small(r) if r.is_one())
    }

    pub fn add(&self, o: &Self) -> Self {
        if let (Coef::Small(a), Coef::Small(b)) = (self, o) {
            if let Some(r) = a.checked_add(b) {
                return Coef::Small(r);
            }
        }
        Coef::big(self.to_q() + o.to_q())
    }

    pub fn sub(&self, o: &Self) -> Self {
        if let (Coef::Small(a), Coef::Small(b)) = (self, o) {
            if let Some(r) = a.checked_sub(b) {
                return Coef::Small(r);
            }
        }
        Coef::big(self.to_q() - o.to_q())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if let (Coef::Small(a), Coef::Small(b)) = (self, o) {
            if let Some(r) = a.checked_mul(b) {
                return Coef::Small(r);
            }
        }
        Coef::big(self.to_q() * o.to_q())
    }

    pub fn div(&self, o: &Self) -> Self {
        if let (Coef::Small(a), Coef::Small(b)) = (self, o) {
            if let Some(r) = a.checked_div(b) {
                return Coef::Small(r);
            }
        }
        Coef::big(self.to_q() / o.to_q())
    }

    pub fn neg(&self) -> Self {
        match self {
            Coef::Small(r) if *r.numer() != i64::MIN => Coef::Small(-r),
            _ => Coef::big(-self.to_q()),
        }
    }

    pub fn recip(&self) -> Self {
        Coef::one().div(self)
    }
}

impl PartialOrd for Coef {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Coef {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Coef::Small(a), Coef::Small(b)) => a.cmp(b),
            _ => self.to_q().cmp(&other.to_q()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overflow_promotes_and_demotes() {
        let big = Coef::int(i64::MAX);
        let sum = big.add(&Coef::one());
        assert!(matches!(sum, Coef::Big(_)));
        let back = sum.sub(&Coef::one());
        assert_eq!(back, Coef::int(i64::MAX));
        assert!(matches!(Coef::int(i64::MIN).neg(), Coef::Big(_)));
        assert_eq!(Coef::int(3).recip().mul(&Coef::int(6)), Coef::int(2));
    }
}
