//! Cheap one-sided tests by reduction modulo a prime and specialization of
//! one coordinate. Each test answers "certainly" or "unknown"; callers fall
//! back to exact arithmetic on "unknown".

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::coef::Coef;
use super::poly::Poly;

const P: u64 = (1 << 61) - 1;

/// Specialization points tried before giving up.
const POINTS: [u64; 4] = [7, 1_000_003, 271_828_182, 3];

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn addmod(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= P {
        s - P
    } else {
        s
    }
}

fn submod(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + P - b
    }
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn invmod(a: u64) -> u64 {
    powmod(a, P - 2)
}

fn big_mod(n: &BigInt) -> u64 {
    n.mod_floor(&BigInt::from(P)).to_u64().expect("reduced residue fits")
}

fn small_mod(n: i64) -> u64 {
    (n as i128).rem_euclid(P as i128) as u64
}

/// Image of a coefficient in 𝔽_p, `None` if its denominator vanishes mod p.
fn image(c: &Coef) -> Option<u64> {
    let (n, d) = match c.small_parts() {
        Some((n, d)) => (small_mod(n), small_mod(d)),
        None => {
            let q = c.to_q();
            (big_mod(q.numer()), big_mod(q.denom()))
        }
    };
    if d == 0 {
        return None;
    }
    Some(mulmod(n, invmod(d)))
}

/// `p(t1, t2)` with one coordinate fixed to `value`, as a dense univariate
/// polynomial in the other (`keep`), lowest degree first and trimmed.
fn specialize(p: &Poly, keep: u8, value: u64) -> Option<Vec<u64>> {
    let rows = p.rows();
    let mut out: Vec<u64>;
    if keep == 1 {
        out = Vec::with_capacity(rows.len());
        for row in rows {
            let mut acc = 0;
            for c in row.iter().rev() {
                acc = addmod(mulmod(acc, value), image(c)?);
            }
            out.push(acc);
        }
    } else {
        let width = rows.iter().map(|r| r.len()).max().unwrap_or(0);
        out = vec![0; width];
        let mut power = 1;
        for row in rows {
            for (j, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    out[j] = addmod(out[j], mulmod(image(c)?, power));
                }
            }
            power = mulmod(power, value);
        }
    }
    while out.last() == Some(&0) {
        out.pop();
    }
    Some(out)
}

fn degree_in(p: &Poly, var: u8) -> usize {
    if var == 1 {
        p.degree_t1().unwrap_or(0)
    } else {
        p.degree_t2().unwrap_or(0)
    }
}

/// Specializes `a` and `b` at a point where `a` keeps its full degree in `keep`.
fn specialize_pair(a: &Poly, b: &Poly, keep: u8) -> Option<(Vec<u64>, Vec<u64>)> {
    let full = degree_in(a, keep);
    for &v in &POINTS {
        let (Some(sa), Some(sb)) = (specialize(a, keep, v), specialize(b, keep, v)) else {
            continue;
        };
        if sa.len() == full + 1 {
            return Some((sa, sb));
        }
    }
    None
}

fn rem(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut r = a.to_vec();
    let inv = invmod(*b.last().expect("nonzero divisor"));
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let c = mulmod(*r.last().unwrap(), inv);
        for (j, y) in b.iter().enumerate() {
            r[shift + j] = submod(r[shift + j], mulmod(c, *y));
        }
        r.pop();
        while r.last() == Some(&0) {
            r.pop();
        }
    }
    r
}

fn gcd_degree(a: &[u64], b: &[u64]) -> usize {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    while !y.is_empty() {
        let r = rem(&x, &y);
        x = y;
        y = r;
    }
    x.len().saturating_sub(1)
}

/// `true` only if `gcd(a, b)` is certainly constant.
///
/// For each coordinate, a common factor of positive degree in it survives
/// specialization of the other coordinate at a point where `a` keeps its
/// leading coefficient, so a trivial gcd of the images rules it out.
pub fn certainly_coprime(a: &Poly, b: &Poly) -> bool {
    if a.is_zero() || b.is_zero() {
        return false;
    }
    for var in [1u8, 2] {
        if degree_in(a, var) == 0 || degree_in(b, var) == 0 {
            continue;
        }
        match specialize_pair(a, b, var) {
            Some((sa, sb)) if gcd_degree(&sa, &sb) == 0 => {}
            _ => return false,
        }
    }
    true
}

/// `true` only if `f` certainly does not divide `n`.
pub fn certainly_not_divides(f: &Poly, n: &Poly) -> bool {
    if n.is_zero() || f.as_constant().is_some() {
        return false;
    }
    if degree_in(f, 1) > degree_in(n, 1) || degree_in(f, 2) > degree_in(n, 2) {
        return true;
    }
    let var = if degree_in(f, 1) > 0 { 1 } else { 2 };
    match specialize_pair(f, n, var) {
        Some((sf, sn)) => !rem(&sn, &sf).is_empty(),
        None => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::q;

    fn t(k: u8) -> Poly {
        Poly::coordinate(k)
    }

    #[test]
    fn coprime_certificates() {
        let a = t(1).mul(&t(2)).add(&Poly::constant(q(2)));
        let b = t(1).add(&t(2));
        assert!(certainly_coprime(&a, &b));
        assert!(!certainly_coprime(&a.mul(&b), &b.pow(2)));
        let f = t(2).mul(&t(2)).add(&Poly::one());
        assert!(!certainly_coprime(&f.mul(&t(1)), &f));
        assert!(certainly_coprime(&f, &t(1).add(&Poly::one())));
    }

    #[test]
    fn divisibility_rejection() {
        let a = t(1).mul(&t(2)).add(&Poly::constant(q(2)));
        let b = t(1).add(&t(2));
        assert!(!certainly_not_divides(&a, &a.mul(&b)));
        assert!(certainly_not_divides(&a, &b.pow(3)));
        assert!(certainly_not_divides(&a.pow(2), &a.mul(&b)));
    }
}
