//! Rational functions in `(t1, t2)` over ℚ with factored denominators.
//!
//! Denominators in this setting are products of powers of a handful of
//! polynomials (metric determinants, binding denominators), so they are kept
//! as a list of pairwise coprime squarefree monic factors with multiplicities.
//! Sums take the maximum exponent per factor instead of a polynomial lcm,
//! and cancellation is trial division by the known factors.

use std::fmt;

use num_traits::{One, Zero};

use super::modp::certainly_not_divides;
use super::poly::{Poly, Q};

type Factors = Vec<(Poly, u32)>;

/// `numerator / Π factor^exponent`.
///
/// Invariants: factors are nonconstant, monic, squarefree, pairwise coprime,
/// sorted, with positive exponents, and none divides the numerator. Zero has
/// no factors. Equality is equality of rational functions.
#[derive(Clone)]
pub struct RationalCoeff {
    num: Poly,
    den: Factors,
}

fn expand(den: &[(Poly, u32)]) -> Poly {
    den.iter().fold(Poly::one(), |acc, (f, e)| acc.mul(&f.pow(*e)))
}

/// Squarefree decomposition (Yun) with respect to `t_var`, for a polynomial
/// whose irreducible factors all have positive degree in `t_var`.
fn squarefree(f: &Poly, var: u8) -> Factors {
    let mut out = Vec::new();
    if f.as_constant().is_some() {
        return out;
    }
    let df = f.derive(var);
    let a0 = f.gcd(&df);
    let mut b = f.div_exact(&a0).expect("gcd divides");
    let c = df.div_exact(&a0).expect("gcd divides");
    let mut d = c.sub(&b.derive(var));
    let mut i = 1;
    while b.as_constant().is_none() {
        let a = b.gcd(&d);
        if a.as_constant().is_none() {
            out.push((a.monic(), i));
        }
        let nb = b.div_exact(&a).expect("gcd divides");
        let nc = d.div_exact(&a).expect("gcd divides");
        d = nc.sub(&nb.derive(var));
        b = nb;
        i += 1;
    }
    out
}

/// Writes a nonzero polynomial as `lc · Π f^e` with a valid factor list.
fn factor_basis(p: &Poly) -> (Q, Factors) {
    let lc = p.leading_coeff();
    if p.as_constant().is_some() {
        return (lc, Vec::new());
    }
    let (u, v, w) = p.split_contents();
    let mut fs = squarefree(&u, 2);
    fs.extend(squarefree(&v, 1));
    if w.as_constant().is_none() {
        fs.extend(squarefree(&w.monic(), 1));
    }
    fs.sort();
    (lc, fs)
}

/// Refines two factor lists into one coprime basis, returning each factor
/// with its exponent in the first and second list.
fn merge(a: &[(Poly, u32)], b: &[(Poly, u32)]) -> Vec<(Poly, u32, u32)> {
    let mut items: Vec<(Poly, u32, u32)> = a.iter().map(|(f, e)| (f.clone(), *e, 0)).collect();
    items.extend(b.iter().map(|(f, e)| (f.clone(), 0, *e)));
    'refine: loop {
        for i in 0..items.len() {
            for j in (i + 1)..items.len() {
                if items[i].0 == items[j].0 {
                    let (_, ea, eb) = items.remove(j);
                    items[i].1 += ea;
                    items[i].2 += eb;
                    continue 'refine;
                }
                // factors from the same list are already coprime
                let same_side = (items[i].1 == 0) == (items[j].1 == 0)
                    && (items[i].2 == 0) == (items[j].2 == 0);
                if same_side {
                    continue;
                }
                let h = items[i].0.gcd(&items[j].0);
                if h.as_constant().is_some() {
                    continue;
                }
                let (fj, aj, bj) = items.remove(j);
                let (fi, ai, bi) = items.remove(i);
                for (f, ea, eb) in [(fi.div_exact(&h), ai, bi), (fj.div_exact(&h), aj, bj)] {
                    let f = f.expect("gcd divides");
                    if f.as_constant().is_none() {
                        items.push((f.monic(), ea, eb));
                    }
                }
                items.push((h, ai + aj, bi + bj));
                continue 'refine;
            }
        }
        break;
    }
    items.sort_by(|x, y| x.0.cmp(&y.0));
    items
}

impl RationalCoeff {
    pub fn zero() -> Self {
        RationalCoeff {
            num: Poly::zero(),
            den: Vec::new(),
        }
    }

    pub fn one() -> Self {
        RationalCoeff::from_poly(Poly::one())
    }

    pub fn constant(c: Q) -> Self {
        RationalCoeff::from_poly(Poly::constant(c))
    }

    pub fn from_poly(p: Poly) -> Self {
        RationalCoeff {
            num: p,
            den: Vec::new(),
        }
    }

    /// Builds `num / den`. Returns `None` if `den` is zero.
    pub fn new(num: Poly, den: Poly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        let (lc, fs) = factor_basis(&den);
        Some(Self::cancel(num.scale(&lc.recip()), fs))
    }

    fn cancel(mut num: Poly, den: Factors) -> Self {
        if num.is_zero() {
            return RationalCoeff::zero();
        }
        let mut out = Vec::with_capacity(den.len());
        for (f, mut e) in den {
            while e > 0 && !certainly_not_divides(&f, &num) {
                match num.div_exact(&f) {
                    Some(q) => {
                        num = q;
                        e -= 1;
                    }
                    None => break,
                }
            }
            if e > 0 {
                out.push((f, e));
            }
        }
        RationalCoeff { num, den: out }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    /// The expanded (monic) denominator.
    pub fn denominator(&self) -> Poly {
        expand(&self.den)
    }

    /// Denominator factors with multiplicities.
    pub fn denominator_factors(&self) -> &[(Poly, u32)] {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_empty() && self.num.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn as_constant(&self) -> Option<Q> {
        if self.den.is_empty() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn depends_on_t1(&self) -> bool {
        self.num.depends_on_t1() || self.den.iter().any(|(f, _)| f.depends_on_t1())
    }

    pub fn depends_on_t2(&self) -> bool {
        self.num.depends_on_t2() || self.den.iter().any(|(f, _)| f.depends_on_t2())
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            let num = self.num.add(&other.num);
            if self.den.is_empty() {
                return RationalCoeff::from_poly(num);
            }
            return Self::cancel(num, self.den.clone());
        }
        let mut na = self.num.clone();
        let mut nb = other.num.clone();
        let mut den = Vec::new();
        for (f, ea, eb) in merge(&self.den, &other.den) {
            let m = ea.max(eb);
            if m > ea {
                na = na.mul(&f.pow(m - ea));
            }
            if m > eb {
                nb = nb.mul(&f.pow(m - eb));
            }
            den.push((f, m));
        }
        Self::cancel(na.add(&nb), den)
    }

    pub fn neg(&self) -> Self {
        RationalCoeff {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return RationalCoeff::zero();
        }
        RationalCoeff {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return RationalCoeff::zero();
        }
        let num = self.num.mul(&other.num);
        match (self.den.is_empty(), other.den.is_empty()) {
            (true, true) => RationalCoeff::from_poly(num),
            (false, true) => Self::cancel(num, self.den.clone()),
            (true, false) => Self::cancel(num, other.den.clone()),
            (false, false) => {
                let den = merge(&self.den, &other.den)
                    .into_iter()
                    .map(|(f, ea, eb)| (f, ea + eb))
                    .collect();
                Self::cancel(num, den)
            }
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let (lc, fs) = factor_basis(&self.num);
        Some(Self::cancel(expand(&self.den).scale(&lc.recip()), fs))
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        other.recip().map(|r| self.mul(&r))
    }

    /// `∂/∂t_k`.
    pub fn derive(&self, k: u8) -> Self {
        let dn = self.num.derive(k);
        if self.den.is_empty() {
            return RationalCoeff::from_poly(dn);
        }
        let derivs: Vec<Poly> = self.den.iter().map(|(f, _)| f.derive(k)).collect();
        let moving: Vec<usize> = (0..self.den.len()).filter(|&i| !derivs[i].is_zero()).collect();
        if moving.is_empty() {
            return Self::cancel(dn, self.den.clone());
        }
        // (n/D)' = (n' Π f − n Σ e_i f_i' Π_{j≠i} f_j) / (D Π f), over moving factors f
        let mut num = moving
            .iter()
            .fold(dn, |acc, &i| acc.mul(&self.den[i].0));
        for &i in &moving {
            let mut term = derivs[i].scale(&Q::from_integer(self.den[i].1.into()));
            for &j in &moving {
                if j != i {
                    term = term.mul(&self.den[j].0);
                }
            }
            num = num.sub(&self.num.mul(&term));
        }
        let mut den = self.den.clone();
        for &i in &moving {
            den[i].1 += 1;
        }
        Self::cancel(num, den)
    }

    pub fn derive_n(&self, a: usize, b: usize) -> Self {
        let mut r = self.clone();
        for _ in 0..a {
            r = r.derive(1);
        }
        for _ in 0..b {
            r = r.derive(2);
        }
        r
    }

    /// Evaluates at a rational point; `None` where the denominator vanishes.
    pub fn eval(&self, t1: &Q, t2: &Q) -> Option<Q> {
        let mut d = Q::one();
        for (f, e) in &self.den {
            let v = f.eval(t1, t2);
            if v.is_zero() {
                return None;
            }
            for _ in 0..*e {
                d *= &v;
            }
        }
        Some(self.num.eval(t1, t2) / d)
    }
}

impl PartialEq for RationalCoeff {
    fn eq(&self, other: &Self) -> bool {
        if self.den == other.den {
            self.num == other.num
        } else {
            self.sub(other).is_zero()
        }
    }
}

impl Eq for RationalCoeff {}

impl From<Poly> for RationalCoeff {
    fn from(p: Poly) -> Self {
        RationalCoeff::from_poly(p)
    }
}

impl fmt::Debug for RationalCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RationalCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        if self.num.terms().count() > 1 {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        let parts: Vec<String> = self
            .den
            .iter()
            .map(|(p, e)| {
                let base = if p.terms().count() > 1 {
                    format!("({p})")
                } else {
                    p.to_string()
                };
                if *e > 1 {
                    format!("{base}^{e}")
                } else {
                    base
                }
            })
            .collect();
        write!(f, " * inv({})", parts.join(" * "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    fn t(k: u8) -> Poly {
        Poly::coordinate(k)
    }

    #[test]
    fn reduces_common_factors() {
        let a = t(1).add(&t(2));
        let num = a.mul(&t(1));
        let den = a.mul(&t(2)).scale(&q(3));
        let r = RationalCoeff::new(num, den).unwrap();
        assert_eq!(r.numerator(), &t(1).scale(&Q::new(1.into(), 3.into())));
        assert_eq!(r.denominator(), t(2));
    }

    #[test]
    fn field_operations() {
        let x = RationalCoeff::new(Poly::one(), t(1).add(&Poly::one())).unwrap();
        let y = RationalCoeff::new(t(2), t(1)).unwrap();
        let s = x.add(&y);
        assert_eq!(s.sub(&y), x);
        assert_eq!(x.mul(&x.recip().unwrap()), RationalCoeff::one());
        assert_eq!(s.mul(&y).div(&y).unwrap(), s);
    }

    #[test]
    fn quotient_rule() {
        // d/dt2 of 1/(1 + t2^2) = -2 t2 / (1 + t2^2)^2
        let d = Poly::one().add(&t(2).mul(&t(2)));
        let r = RationalCoeff::new(Poly::one(), d.clone()).unwrap();
        let expected = RationalCoeff::new(t(2).scale(&q(-2)), d.mul(&d)).unwrap();
        assert_eq!(r.derive(2), expected);
        assert!(r.derive(1).is_zero());
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(RationalCoeff::new(Poly::one(), Poly::zero()).is_none());
        assert!(RationalCoeff::zero().recip().is_none());
    }

    #[test]
    fn denominator_is_factored() {
        // (1 + t1^2)(1 + t2^2)^2 splits into its coordinate contents
        let f1 = Poly::one().add(&t(1).pow(2));
        let f2 = Poly::one().add(&t(2).pow(2));
        let r = RationalCoeff::new(Poly::one(), f1.mul(&f2.pow(2))).unwrap();
        assert_eq!(r.denominator_factors().len(), 2);
        // a sum that cancels a factor reduces
        let a = RationalCoeff::new(t(1).pow(2), f1.clone()).unwrap();
        let b = RationalCoeff::new(Poly::one(), f1).unwrap();
        assert_eq!(a.add(&b), RationalCoeff::one());
        assert!(a.add(&b).is_polynomial());
    }

    #[test]
    fn overlapping_factors_are_refined() {
        let g = t(1).mul(&t(2)).add(&Poly::constant(q(2)));
        let h = t(1).add(&t(2));
        let x = RationalCoeff::new(Poly::one(), g.mul(&h)).unwrap();
        let y = RationalCoeff::new(Poly::one(), g.pow(2)).unwrap();
        let s = x.add(&y);
        assert_eq!(s.mul(&RationalCoeff::from_poly(g.pow(2).mul(&h))), RationalCoeff::from_poly(g.add(&h)));
    }
}
