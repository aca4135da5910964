//! Dense bivariate polynomials over ℚ in the coordinates `(t1, t2)`.
//!
//! A polynomial is stored as a list of rows indexed by the power of `t1`;
//! each row is a univariate polynomial in `t2` (dense, lowest degree first).
//! Trailing zero coefficients and trailing zero rows are always trimmed, so
//! structural equality is polynomial equality.
//!
//! GCDs are computed with a primitive pseudo-remainder sequence over
//! `ℚ[t2][t1]`, with contents taken by univariate Euclid in `ℚ[t2]`.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::coef::Coef;

pub type Q = BigRational;

/// Univariate polynomial in `t2`, lowest degree first, trimmed.
pub(crate) type Row = Vec<Coef>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly {
    rows: Vec<Row>,
}

fn trim_row(r: &mut Row) {
    while r.last().map_or(false, Coef::is_zero) {
        r.pop();
    }
}

fn row_add(a: &Row, b: &Row) -> Row {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out = long.clone();
    for (o, s) in out.iter_mut().zip(short) {
        *o = o.add(s);
    }
    trim_row(&mut out);
    out
}

fn row_sub(a: &Row, b: &Row) -> Row {
    let n = a.len().max(b.len());
    let zero = Coef::zero();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        out.push(a.get(i).unwrap_or(&zero).sub(b.get(i).unwrap_or(&zero)));
    }
    trim_row(&mut out);
    out
}

fn row_mul(a: &Row, b: &Row) -> Row {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Coef::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] = out[i + j].add(&x.mul(y));
            }
        }
    }
    trim_row(&mut out);
    out
}

fn row_scale(a: &Row, c: &Coef) -> Row {
    if c.is_zero() {
        return Vec::new();
    }
    if c.is_one() {
        return a.clone();
    }
    a.iter().map(|x| x.mul(c)).collect()
}

/// Division with remainder in `ℚ[t2]`.
fn row_divrem(a: &Row, b: &Row) -> (Row, Row) {
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut rem = a.clone();
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let lead = b.last().unwrap();
    let mut quot = vec![Coef::zero(); rem.len() - b.len() + 1];
    while rem.len() >= b.len() && !rem.is_empty() {
        let shift = rem.len() - b.len();
        let c = rem.last().unwrap().div(lead);
        for (j, y) in b.iter().enumerate() {
            rem[shift + j] = rem[shift + j].sub(&c.mul(y));
        }
        quot[shift] = c;
        rem.pop();
        trim_row(&mut rem);
    }
    trim_row(&mut quot);
    (quot, rem)
}

fn row_monic(a: &Row) -> Row {
    match a.last() {
        None => Vec::new(),
        Some(l) => row_scale(a, &l.recip()),
    }
}

/// Monic gcd in `ℚ[t2]`; `gcd(0, 0) = 0`.
fn row_gcd(a: &Row, b: &Row) -> Row {
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_empty() {
        let (_, r) = row_divrem(&x, &y);
        x = y;
        y = r;
    }
    row_monic(&x)
}

fn row_is_one(r: &Row) -> bool {
    r.len() == 1 && r[0].is_one()
}

/// Coefficients over a common denominator as machine integers, when they fit.
fn small_form(p: &Poly) -> Option<(i128, Vec<Vec<i128>>)> {
    const LIMIT: i128 = 1 << 40;
    let mut den: i128 = 1;
    for c in p.rows.iter().flatten() {
        let (_, d) = c.small_parts()?;
        let d = d as i128;
        den = den / num_integer::gcd(den, d) * d;
        if den > LIMIT {
            return None;
        }
    }
    let mut rows = Vec::with_capacity(p.rows.len());
    for r in &p.rows {
        let mut out = Vec::with_capacity(r.len());
        for c in r {
            let (n, d) = c.small_parts()?;
            out.push((n as i128).checked_mul(den / d as i128)?);
        }
        rows.push(out);
    }
    Some((den, rows))
}

/// `n / den` as a coefficient, `None` if it does not fit a machine fraction.
fn small_coef(n: i128, den: i128) -> Option<Coef> {
    let g = num_integer::gcd(n, den);
    let (n, d) = (n / g, den / g);
    Some(Coef::Small(num_rational::Ratio::new_raw(
        i64::try_from(n).ok()?,
        i64::try_from(d).ok()?,
    )))
}

/// Product by integer convolution; `None` on overflow.
fn small_mul(a: &Poly, b: &Poly) -> Option<Poly> {
    let (da, ra) = small_form(a)?;
    let (db, rb) = small_form(b)?;
    let width = ra.iter().map(Vec::len).max()? + rb.iter().map(Vec::len).max()?;
    let mut acc = vec![vec![0i128; width]; ra.len() + rb.len() - 1];
    for (i, x) in ra.iter().enumerate() {
        for (j, y) in rb.iter().enumerate() {
            let row = &mut acc[i + j];
            for (k, u) in x.iter().enumerate() {
                if *u == 0 {
                    continue;
                }
                for (l, v) in y.iter().enumerate() {
                    row[k + l] = row[k + l].checked_add(u.checked_mul(*v)?)?;
                }
            }
        }
    }
    let den = da.checked_mul(db)?;
    let mut rows = Vec::with_capacity(acc.len());
    for r in acc {
        let mut out = Vec::with_capacity(r.len());
        for n in r {
            out.push(if n == 0 { Coef::zero() } else { small_coef(n, den)? });
        }
        rows.push(out);
    }
    Some(Poly::from_rows(rows))
}

impl Poly {
    pub fn zero() -> Self {
        Poly { rows: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { rows: vec![vec![Coef::from_q(&c)]] }
        }
    }

    /// The monomial `c · t1^i · t2^j`.
    pub fn monomial(c: Q, i: usize, j: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut rows = vec![Vec::new(); i + 1];
        let mut row = vec![Coef::zero(); j + 1];
        row[j] = Coef::from_q(&c);
        rows[i] = row;
        Poly { rows }
    }

    /// `t1` for `k = 1`, `t2` for `k = 2`.
    pub fn coordinate(k: u8) -> Self {
        match k {
            1 => Poly::monomial(Q::one(), 1, 0),
            2 => Poly::monomial(Q::one(), 0, 1),
            _ => panic!("coordinate index must be 1 or 2, got {k}"),
        }
    }

    fn from_rows(mut rows: Vec<Row>) -> Self {
        for r in rows.iter_mut() {
            trim_row(r);
        }
        while rows.last().map_or(false, |r| r.is_empty()) {
            rows.pop();
        }
        Poly { rows }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.rows.len() == 1 && row_is_one(&self.rows[0])
    }

    /// Returns the constant value if the polynomial has degree 0.
    pub fn as_constant(&self) -> Option<Q> {
        match self.rows.len() {
            0 => Some(Q::zero()),
            1 if self.rows[0].len() == 1 => Some(self.rows[0][0].to_q()),
            _ => None,
        }
    }

    pub fn degree_t1(&self) -> Option<usize> {
        self.rows.len().checked_sub(1)
    }

    pub fn degree_t2(&self) -> Option<usize> {
        self.rows.iter().map(|r| r.len()).max().and_then(|n| n.checked_sub(1))
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<usize> {
        self.terms().map(|(i, j, _)| i + j).max()
    }

    /// Coefficient of `t1^i t2^j`.
    pub fn coeff(&self, i: usize, j: usize) -> Q {
        self.rows
            .get(i)
            .and_then(|r| r.get(j))
            .map_or_else(Q::zero, Coef::to_q)
    }

    /// Nonzero terms as `(i, j, coefficient)`, ordered by `i` then `j`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, Q)> + '_ {
        self.rows.iter().enumerate().flat_map(|(i, r)| {
            r.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(move |(j, c)| (i, j, c.to_q()))
        })
    }

    /// Number of nonzero terms.
    pub fn term_count(&self) -> usize {
        self.rows.iter().flatten().filter(|c| !c.is_zero()).count()
    }

    /// Leading coefficient in lexicographic order with `t1 > t2`.
    pub fn leading_coeff(&self) -> Q {
        self.rows
            .last()
            .and_then(|r| r.last())
            .map_or_else(Q::zero, Coef::to_q)
    }

    pub fn depends_on_t1(&self) -> bool {
        self.rows.len() > 1
    }

    pub fn depends_on_t2(&self) -> bool {
        self.rows.iter().any(|r| r.len() > 1)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.rows.len().max(other.rows.len());
        let empty = Vec::new();
        let rows = (0..n)
            .map(|i| {
                row_add(
                    self.rows.get(i).unwrap_or(&empty),
                    other.rows.get(i).unwrap_or(&empty),
                )
            })
            .collect();
        Poly::from_rows(rows)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.rows.len().max(other.rows.len());
        let empty = Vec::new();
        let rows = (0..n)
            .map(|i| {
                row_sub(
                    self.rows.get(i).unwrap_or(&empty),
                    other.rows.get(i).unwrap_or(&empty),
                )
            })
            .collect();
        Poly::from_rows(rows)
    }

    pub fn neg(&self) -> Poly {
        Poly {
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(Coef::neg).collect())
                .collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        let c = Coef::from_q(c);
        Poly {
            rows: self.rows.iter().map(|r| row_scale(r, &c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        if let Some(p) = small_mul(self, other) {
            return p;
        }
        let mut rows: Vec<Row> = vec![Vec::new(); self.rows.len() + other.rows.len() - 1];
        for (i, a) in self.rows.iter().enumerate() {
            if a.is_empty() {
                continue;
            }
            for (j, b) in other.rows.iter().enumerate() {
                if b.is_empty() {
                    continue;
                }
                let prod = row_mul(a, b);
                rows[i + j] = row_add(&rows[i + j], &prod);
            }
        }
        Poly::from_rows(rows)
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Partial derivative `∂/∂t_k`.
    pub fn derive(&self, k: u8) -> Poly {
        match k {
            1 => {
                if self.rows.len() <= 1 {
                    return Poly::zero();
                }
                let rows = self.rows[1..]
                    .iter()
                    .enumerate()
                    .map(|(i, r)| row_scale(r, &Coef::int((i + 1) as i64)))
                    .collect();
                Poly::from_rows(rows)
            }
            2 => {
                let rows = self
                    .rows
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .skip(1)
                            .map(|(j, c)| c.mul(&Coef::int(j as i64)))
                            .collect()
                    })
                    .collect();
                Poly::from_rows(rows)
            }
            _ => panic!("coordinate index must be 1 or 2, got {k}"),
        }
    }

    /// Mixed partial `∂_{t1}^a ∂_{t2}^b`.
    pub fn derive_n(&self, a: usize, b: usize) -> Poly {
        let mut p = self.clone();
        for _ in 0..a {
            if p.is_zero() {
                return p;
            }
            p = p.derive(1);
        }
        for _ in 0..b {
            if p.is_zero() {
                return p;
            }
            p = p.derive(2);
        }
        p
    }

    /// Evaluates at a rational point.
    pub fn eval(&self, t1: &Q, t2: &Q) -> Q {
        let mut acc = Q::zero();
        for row in self.rows.iter().rev() {
            let mut inner = Q::zero();
            for c in row.iter().rev() {
                inner = inner * t2 + c.to_q();
            }
            acc = acc * t1 + inner;
        }
        acc
    }

    pub(crate) fn rows(&self) -> &[Row] {
        &self.rows
    }

    /// `p(t2, t1)`.
    pub fn swap_coordinates(&self) -> Poly {
        let width = self.rows.iter().map(|r| r.len()).max().unwrap_or(0);
        let rows = (0..width)
            .map(|j| {
                self.rows
                    .iter()
                    .map(|r| r.get(j).cloned().unwrap_or_else(Coef::zero))
                    .collect()
            })
            .collect();
        Poly::from_rows(rows)
    }

    /// Splits a nonzero polynomial as `u · v · w` with `u ∈ ℚ[t2]` and
    /// `v ∈ ℚ[t1]` monic, and `w` primitive in both directions.
    pub fn split_contents(&self) -> (Poly, Poly, Poly) {
        let c2 = self.content_t1();
        let rest = self.div_rows_by(&c2);
        let swapped = rest.swap_coordinates();
        let c1 = swapped.content_t1();
        let w = swapped.div_rows_by(&c1).swap_coordinates();
        let u = Poly::from_rows(vec![c2]);
        let v = Poly::from_rows(vec![c1]).swap_coordinates();
        (u, v, w)
    }

    fn leading_row(&self) -> &Row {
        self.rows.last().expect("leading row of zero polynomial")
    }

    /// Content with respect to `t1`: the monic gcd of all rows in `ℚ[t2]`.
    fn content_t1(&self) -> Row {
        let mut g: Row = Vec::new();
        for r in &self.rows {
            if r.is_empty() {
                continue;
            }
            g = if g.is_empty() { row_monic(r) } else { row_gcd(&g, r) };
            if g.len() == 1 {
                break;
            }
        }
        g
    }

    fn div_rows_by(&self, c: &Row) -> Poly {
        if row_is_one(c) {
            return self.clone();
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                if r.is_empty() {
                    Vec::new()
                } else {
                    let (q, rem) = row_divrem(r, c);
                    debug_assert!(rem.is_empty(), "content does not divide row");
                    q
                }
            })
            .collect();
        Poly::from_rows(rows)
    }

    fn mul_rows_by(&self, c: &Row) -> Poly {
        Poly::from_rows(self.rows.iter().map(|r| row_mul(r, c)).collect())
    }

    /// Pseudo-remainder with respect to `t1`.
    fn prem(&self, b: &Poly) -> Poly {
        let db = b.rows.len() - 1;
        let lc = b.leading_row();
        let mut r = self.clone();
        while !r.is_zero() && r.rows.len() > db {
            let dr = r.rows.len() - 1;
            let lr = r.leading_row().clone();
            let shift = dr - db;
            let mut rows: Vec<Row> = r.rows.iter().map(|row| row_mul(row, lc)).collect();
            for (i, brow) in b.rows.iter().enumerate() {
                let sub = row_mul(brow, &lr);
                rows[i + shift] = row_sub(&rows[i + shift], &sub);
            }
            r = Poly::from_rows(rows);
        }
        r
    }

    /// Scales so the leading coefficient is 1. Zero stays zero.
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&self.leading_coeff().recip())
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        if self.as_constant().is_some() || other.as_constant().is_some() {
            return Poly::one();
        }
        if self == other {
            return self.monic();
        }
        if super::modp::certainly_coprime(self, other) {
            return Poly::one();
        }
        let ca = self.content_t1();
        let cb = other.content_t1();
        let c = row_gcd(&ca, &cb);
        let mut a = self.div_rows_by(&ca);
        let mut b = other.div_rows_by(&cb);
        if a.rows.len() < b.rows.len() {
            std::mem::swap(&mut a, &mut b);
        }
        while b.rows.len() > 1 {
            let r = a.prem(&b);
            a = b;
            if r.is_zero() {
                b = Poly::zero();
                break;
            }
            let cr = r.content_t1();
            b = r.div_rows_by(&cr);
        }
        // `b` is zero (a is the gcd) or a nonzero element of ℚ[t2] (gcd is trivial in t1).
        let prim = if b.is_zero() {
            let ct = a.content_t1();
            a.div_rows_by(&ct)
        } else {
            Poly::one()
        };
        prim.mul_rows_by(&c).monic()
    }

    /// Exact division; returns `None` if `other` does not divide `self`.
    pub fn div_exact(&self, other: &Poly) -> Option<Poly> {
        assert!(!other.is_zero(), "division by zero polynomial");
        if let Some(c) = other.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let db = other.rows.len() - 1;
        let lc = other.leading_row();
        let mut rem = self.clone();
        let mut quot: Vec<Row> = vec![Vec::new(); self.rows.len().saturating_sub(db)];
        while !rem.is_zero() {
            if rem.rows.len() <= db {
                return None;
            }
            let shift = rem.rows.len() - 1 - db;
            let (q, r) = row_divrem(rem.leading_row(), lc);
            if !r.is_empty() {
                return None;
            }
            let rows: Vec<Row> = other.rows.iter().map(|b| row_mul(b, &q)).collect();
            let mut rr = rem.rows.clone();
            for (i, row) in rows.iter().enumerate() {
                rr[i + shift] = row_sub(&rr[i + shift], row);
            }
            quot[shift] = row_add(&quot[shift], &q);
            rem = Poly::from_rows(rr);
        }
        Some(Poly::from_rows(quot))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Writes `c` as a DSL literal magnitude (`3`, `1/2`).
pub(crate) fn fmt_q_abs(c: &Q) -> String {
    let a = c.abs();
    if a.is_integer() {
        a.numer().to_string()
    } else {
        format!("{}/{}", a.numer(), a.denom())
    }
}

impl fmt::Display for Poly {
    /// Prints in the expression grammar: `2 * t1^2 * t2 - 1/3 * t2 + 1`,
    /// highest total degree first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut terms: Vec<_> = self.terms().collect();
        terms.sort_by(|a, b| (b.0 + b.1, b.0).cmp(&(a.0 + a.1, a.0)));
        for (n, (i, j, c)) in terms.into_iter().enumerate() {
            let c = &c;
            let neg = c.is_negative();
            if n == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let mut factors = Vec::new();
            if !c.abs().is_one() || (i == 0 && j == 0) {
                factors.push(fmt_q_abs(c));
            }
            for (name, e) in [("t1", i), ("t2", j)] {
                match e {
                    0 => {}
                    1 => factors.push(name.to_string()),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
            write!(f, "{}", factors.join(" * "))?;
        }
        Ok(())
    }
}
