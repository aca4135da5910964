//! Symbolic backend: abstract function atoms kept as unexpanded star-words.
//!
//! A [`StarWord`] is a central part (parameters and functions of ℏ, which
//! commute with everything) times an ordered chain of groups, each group a
//! pointwise product of atoms in one coordinate. Adjacent groups in the same
//! coordinate merge because the star product of two functions of one
//! coordinate is their pointwise product.

mod print;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{
    AlgebraError, FrameIndex, Grading, GrassmannMono, ScalarAlgebra, Q,
};

pub use print::{pretty, Printer};

/// What an atom depends on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AtomVar {
    T1,
    T2,
    Hbar,
    Param,
}

impl AtomVar {
    /// Coordinate index for `t1`/`t2` atoms.
    pub fn coordinate(self) -> Option<u8> {
        match self {
            AtomVar::T1 => Some(1),
            AtomVar::T2 => Some(2),
            _ => None,
        }
    }

    pub fn from_coordinate(k: u8) -> Self {
        match k {
            1 => AtomVar::T1,
            2 => AtomVar::T2,
            _ => panic!("coordinate index must be 1 or 2, got {k}"),
        }
    }

    pub fn is_central(self) -> bool {
        matches!(self, AtomVar::Hbar | AtomVar::Param)
    }
}

impl fmt::Display for AtomVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AtomVar::T1 => "t1",
            AtomVar::T2 => "t2",
            AtomVar::Hbar => "hbar",
            AtomVar::Param => "param",
        })
    }
}

/// A function symbol, possibly differentiated. Field order gives the
/// in-group ordering: by name, then derivative order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FuncAtom {
    pub name: Arc<str>,
    pub deriv: u32,
    pub var: AtomVar,
    /// Declared nonvanishing, so negative exponents are allowed.
    pub positive: bool,
    /// The coordinate function itself (`t1` or `t2`).
    pub coordinate: bool,
}

impl FuncAtom {
    pub fn function(name: &str, var: AtomVar, positive: bool) -> Self {
        FuncAtom {
            name: name.into(),
            deriv: 0,
            var,
            positive,
            coordinate: false,
        }
    }

    pub fn coordinate(k: u8) -> Self {
        FuncAtom {
            name: format!("t{k}").into(),
            deriv: 0,
            var: AtomVar::from_coordinate(k),
            positive: false,
            coordinate: true,
        }
    }

    pub fn derived(&self, times: u32) -> Self {
        assert!(
            times == 0 || self.var.coordinate().is_some(),
            "only coordinate functions can be differentiated"
        );
        FuncAtom {
            name: self.name.clone(),
            deriv: self.deriv + times,
            var: self.var,
            positive: self.positive && times == 0,
            coordinate: self.coordinate,
        }
    }

    /// Whether a negative exponent is representable.
    pub fn invertible(&self) -> bool {
        self.positive && self.deriv == 0
    }
}

type AtomPowers = BTreeMap<FuncAtom, i32>;

fn mul_powers(into: &mut AtomPowers, from: &AtomPowers) {
    for (a, e) in from {
        let slot = into.entry(a.clone()).or_insert(0);
        *slot += e;
        if *slot == 0 {
            into.remove(a);
        }
    }
}

/// A pointwise product of atoms in one coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Group {
    var: AtomVar,
    atoms: AtomPowers,
}

impl Group {
    pub fn var(&self) -> AtomVar {
        self.var
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&FuncAtom, i32)> {
        self.atoms.iter().map(|(a, e)| (a, *e))
    }

    /// `∂/∂t_k` by the product rule, as a sum of scaled groups.
    fn derive(&self) -> Vec<(Q, Group)> {
        let mut out = Vec::new();
        for (atom, &e) in &self.atoms {
            let mut rest = self.atoms.clone();
            let c = Q::from_integer(e.into());
            if e == 1 {
                rest.remove(atom);
            } else {
                rest.insert(atom.clone(), e - 1);
            }
            if !atom.coordinate {
                let d = atom.derived(1);
                let slot = rest.entry(d.clone()).or_insert(0);
                *slot += 1;
                if *slot == 0 {
                    rest.remove(&d);
                }
            }
            out.push((
                c,
                Group {
                    var: self.var,
                    atoms: rest,
                },
            ));
        }
        out
    }
}

/// Canonical ordered star product of atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct StarWord {
    central: AtomPowers,
    groups: Vec<Group>,
}

impl StarWord {
    pub fn one() -> Self {
        StarWord::default()
    }

    pub fn is_one(&self) -> bool {
        self.central.is_empty() && self.groups.is_empty()
    }

    /// The word for a single atom power.
    pub fn atom(atom: FuncAtom, exp: i32) -> Self {
        let mut w = StarWord::one();
        w.push_factor(atom, exp);
        w
    }

    pub fn central(&self) -> impl Iterator<Item = (&FuncAtom, i32)> {
        self.central.iter().map(|(a, e)| (a, *e))
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    /// Appends `atom^exp` on the right.
    pub fn push_factor(&mut self, atom: FuncAtom, exp: i32) {
        if exp == 0 {
            return;
        }
        if atom.var.is_central() {
            let mut p = AtomPowers::new();
            p.insert(atom, exp);
            mul_powers(&mut self.central, &p);
        } else {
            let var = atom.var;
            let mut atoms = AtomPowers::new();
            atoms.insert(atom, exp);
            self.push_group(Group { var, atoms });
        }
    }

    /// Appends a group, merging with the last group and cascading when a
    /// merge cancels to the identity.
    fn push_group(&mut self, g: Group) {
        if g.atoms.is_empty() {
            return;
        }
        match self.groups.last_mut() {
            Some(last) if last.var == g.var => {
                mul_powers(&mut last.atoms, &g.atoms);
                if last.atoms.is_empty() {
                    self.groups.pop();
                }
            }
            _ => self.groups.push(g),
        }
    }

    pub fn mul(&self, other: &StarWord) -> StarWord {
        let mut out = self.clone();
        mul_powers(&mut out.central, &other.central);
        for g in &other.groups {
            out.push_group(g.clone());
        }
        out
    }

    /// The star-inverse word, if every atom is invertible.
    pub fn inverse(&self) -> Option<StarWord> {
        let all = self
            .central
            .keys()
            .chain(self.groups.iter().flat_map(|g| g.atoms.keys()));
        for a in all {
            if !a.invertible() {
                return None;
            }
        }
        Some(StarWord {
            central: self.central.iter().map(|(a, e)| (a.clone(), -e)).collect(),
            groups: self
                .groups
                .iter()
                .rev()
                .map(|g| Group {
                    var: g.var,
                    atoms: g.atoms.iter().map(|(a, e)| (a.clone(), -e)).collect(),
                })
                .collect(),
        })
    }

    /// `∂/∂t_k` by the Leibniz rule over groups.
    fn derive(&self, k: u8) -> Vec<(Q, StarWord)> {
        let var = AtomVar::from_coordinate(k);
        let mut out = Vec::new();
        for (i, g) in self.groups.iter().enumerate() {
            if g.var != var {
                continue;
            }
            for (c, dg) in g.derive() {
                let mut w = StarWord {
                    central: self.central.clone(),
                    groups: self.groups[..i].to_vec(),
                };
                w.push_group(dg);
                for rest in &self.groups[i + 1..] {
                    w.push_group(rest.clone());
                }
                out.push((c, w));
            }
        }
        out
    }

    /// All atoms with their exponents, central part first.
    pub fn factors(&self) -> impl Iterator<Item = (&FuncAtom, i32)> {
        self.central().chain(self.groups.iter().flat_map(|g| g.atoms()))
    }
}

/// Key of a symbolic term: ℏ-power, Grassmann monomial, word.
pub type TermKey = (u32, GrassmannMono, StarWord);

/// A sum of rational multiples of `ℏ^n · ξ^A · word`, truncated after `ℏ^order`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymScalar {
    order: u32,
    terms: BTreeMap<TermKey, Q>,
}

/// An unnormalized term, as produced from source text.
#[derive(Clone, Debug)]
pub struct RawTerm {
    pub coeff: Q,
    pub hbar: u32,
    /// Generators in product order (not necessarily sorted or distinct).
    pub generators: Vec<u8>,
    /// Atom powers in star-product order.
    pub factors: Vec<(FuncAtom, i32)>,
}

impl SymScalar {
    pub fn zero(order: u32) -> Self {
        SymScalar {
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn term(order: u32, coeff: Q, hbar: u32, mono: GrassmannMono, word: StarWord) -> Self {
        let mut s = SymScalar::zero(order);
        s.accumulate((hbar, mono, word), coeff);
        s
    }

    /// `atom^exp` as an element.
    pub fn atom(order: u32, atom: FuncAtom, exp: i32) -> Self {
        SymScalar::term(order, Q::one(), 0, GrassmannMono::ONE, StarWord::atom(atom, exp))
    }

    fn accumulate(&mut self, key: TermKey, c: Q) {
        if key.0 > self.order || c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Builds the canonical form of a sum of raw terms.
    pub fn canonicalize(order: u32, raw: &[RawTerm]) -> Self {
        let mut s = SymScalar::zero(order);
        for t in raw {
            let Some((sign, mono)) = GrassmannMono::from_product(&t.generators) else {
                continue;
            };
            let mut w = StarWord::one();
            for (a, e) in &t.factors {
                w.push_factor(a.clone(), *e);
            }
            let c = if sign < 0 { -t.coeff.clone() } else { t.coeff.clone() };
            s.accumulate((t.hbar, mono, w), c);
        }
        s
    }

    /// Re-normalizes; the identity on values built through this API.
    pub fn canonical(&self) -> Self {
        let raw: Vec<RawTerm> = self
            .terms
            .iter()
            .map(|((n, m, w), c)| RawTerm {
                coeff: c.clone(),
                hbar: *n,
                generators: m.generators().collect(),
                factors: w.factors().map(|(a, e)| (a.clone(), e)).collect(),
            })
            .collect();
        SymScalar::canonicalize(self.order, &raw)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Names of all atoms appearing in the element (coordinates excluded).
    pub fn atom_names(&self) -> std::collections::BTreeSet<Arc<str>> {
        self.terms
            .keys()
            .flat_map(|(_, _, w)| w.factors().map(|(a, _)| a))
            .filter(|a| !a.coordinate)
            .map(|a| a.name.clone())
            .collect()
    }

    /// Sets a new truncation order, dropping terms above it.
    pub fn with_order(&self, order: u32) -> Self {
        SymScalar {
            order,
            terms: self
                .terms
                .iter()
                .filter(|((n, _, _), _)| *n <= order)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    fn max_soul_degree(&self) -> u32 {
        self.terms.keys().map(|(_, m, _)| m.degree()).max().unwrap_or(0)
    }
}

impl ScalarAlgebra for SymScalar {
    fn zero(order: u32) -> Self {
        SymScalar::zero(order)
    }

    fn from_rational(order: u32, c: &Q) -> Self {
        SymScalar::term(order, c.clone(), 0, GrassmannMono::ONE, StarWord::one())
    }

    fn coordinate(order: u32, k: u8) -> Self {
        SymScalar::atom(order, FuncAtom::coordinate(k), 1)
    }

    fn generator(order: u32, alpha: u8) -> Self {
        SymScalar::term(order, Q::one(), 0, GrassmannMono::generator(alpha), StarWord::one())
    }

    fn hbar(order: u32) -> Self {
        SymScalar::term(order, Q::one(), 1, GrassmannMono::ONE, StarWord::one())
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
            .fold(Grading::Zero, |g, (_, m, _)| g.join(Grading::Homogeneous(m.parity())))
    }

    fn add(&self, other: &Self) -> Self {
        assert_eq!(self.order, other.order, "mismatched truncation orders");
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.accumulate(k.clone(), c.clone());
        }
        out
    }

    fn neg(&self) -> Self {
        SymScalar {
            order: self.order,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect(),
        }
    }

    fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return SymScalar::zero(self.order);
        }
        SymScalar {
            order: self.order,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    fn star(&self, other: &Self) -> Self {
        assert_eq!(self.order, other.order, "mismatched truncation orders");
        let mut out = SymScalar::zero(self.order);
        for ((n1, m1, w1), c1) in &self.terms {
            for ((n2, m2, w2), c2) in &other.terms {
                if n1 + n2 > self.order {
                    continue;
                }
                let Some((sign, mono)) = m1.mul(*m2) else {
                    continue;
                };
                let c = c1 * c2;
                let c = if sign < 0 { -c } else { c };
                out.accumulate((n1 + n2, mono, w1.mul(w2)), c);
            }
        }
        out
    }

    fn derive(&self, index: FrameIndex) -> Self {
        let mut out = SymScalar::zero(self.order);
        match index {
            FrameIndex::Even(k) => {
                for ((n, m, w), c) in &self.terms {
                    for (d, dw) in w.derive(k) {
                        out.accumulate((*n, *m, dw), c * d);
                    }
                }
            }
            FrameIndex::Odd(alpha) => {
                for ((n, m, w), c) in &self.terms {
                    if let Some((sign, rest)) = m.derive(alpha) {
                        let c = if sign < 0 { -c.clone() } else { c.clone() };
                        out.accumulate((*n, rest, w.clone()), c);
                    }
                }
            }
        }
        out
    }

    /// Inverts a single-word body `u` directly and the nilpotent remainder
    /// by a terminating Neumann series: `a⁻¹ = Σ (−u⁻¹ ⋆ r)^k ⋆ u⁻¹`.
    fn invert(&self) -> Result<Self, AlgebraError> {
        let body: Vec<(&TermKey, &Q)> = self
            .terms
            .iter()
            .filter(|((n, m, _), _)| *n == 0 && m.is_one())
            .collect();
        let (key, c) = match body.as_slice() {
            [] => return Err(AlgebraError::NotInvertible(format!("zero body in {self}"))),
            [one] => *one,
            _ => {
                return Err(AlgebraError::NotInvertible(format!(
                    "body of {self} is a sum; composite reciprocals are not representable"
                )))
            }
        };
        let winv = key.2.inverse().ok_or_else(|| {
            AlgebraError::NotInvertible(format!(
                "body of {self} contains an atom not declared positive"
            ))
        })?;
        let order = self.order;
        let u = SymScalar::term(order, c.clone(), 0, GrassmannMono::ONE, key.2.clone());
        let uinv = SymScalar::term(order, c.recip(), 0, GrassmannMono::ONE, winv);
        let x = uinv.star(&self.sub(&u)).neg();
        let mut sum = SymScalar::one(order);
        let mut power = x.clone();
        for _ in 0..(order + self.max_soul_degree() + 2) {
            if power.is_zero() {
                break;
            }
            sum = sum.add(&power);
            power = power.star(&x);
        }
        Ok(sum.star(&uinv))
    }
}

impl fmt::Debug for SymScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for SymScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty(self))
    }
}

/// Coefficient helper used by the printer.
pub(crate) fn is_unit(c: &Q) -> bool {
    c.abs().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{q, qf};

    const N: u32 = 3;

    fn f() -> FuncAtom {
        FuncAtom::function("f", AtomVar::T2, true)
    }

    fn h() -> FuncAtom {
        FuncAtom::function("h", AtomVar::T1, true)
    }

    fn f1() -> FuncAtom {
        FuncAtom::function("f1", AtomVar::Hbar, true)
    }

    fn at(a: FuncAtom, e: i32) -> SymScalar {
        SymScalar::atom(N, a, e)
    }

    #[test]
    fn same_variable_cancellation() {
        assert_eq!(at(f(), 1).star(&at(f(), -1)), SymScalar::one(N));
        let w = at(f(), 1).star(&at(h(), 1)).star(&at(h(), -1)).star(&at(f(), -1));
        assert_eq!(w, SymScalar::one(N));
    }

    #[test]
    fn cross_variable_order_is_kept() {
        let fp = at(f().derived(1), 1);
        let hi = at(h(), -1);
        assert_ne!(fp.star(&hi), hi.star(&fp));
        assert_eq!(fp.star(&hi).to_string(), "f'(t2) * 1/h(t1)");
    }

    #[test]
    fn central_atoms_commute() {
        let a = at(f1(), 1).scale(&qf(1, 2)).star(&at(f().derived(1), 1));
        let lhs = a.star(&at(h(), -1));
        let rhs = at(f().derived(1), 1).star(&at(h(), -1)).star(&at(f1(), 1)).scale(&qf(1, 2));
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.to_string(), "1/2 f1(hbar) f'(t2) * 1/h(t1)");
    }

    #[test]
    fn derive_examples() {
        assert_eq!(at(f(), 1).derive(FrameIndex::Even(2)), at(f().derived(1), 1));
        let expected = at(f().derived(1), 1).star(&at(f(), -2)).neg();
        assert_eq!(at(f(), -1).derive(FrameIndex::Even(2)), expected);
        let fh = at(f(), 1).star(&at(h(), 1));
        assert_eq!(fh.derive(FrameIndex::Even(1)), at(f(), 1).star(&at(h().derived(1), 1)));
        let t1sq = SymScalar::coordinate(N, 1).star(&SymScalar::coordinate(N, 1));
        assert_eq!(t1sq.derive(FrameIndex::Even(1)), SymScalar::coordinate(N, 1).scale(&q(2)));
    }

    #[test]
    fn canonicalize_examples() {
        let raw = |coeff: Q, generators: Vec<u8>, factors: Vec<(FuncAtom, i32)>| RawTerm {
            coeff,
            hbar: 0,
            generators,
            factors,
        };
        let x = vec![(f(), 1), (h(), -1)];
        let s = SymScalar::canonicalize(N, &[raw(qf(1, 4), vec![], x.clone()), raw(qf(1, 4), vec![], x.clone())]);
        assert_eq!(s, SymScalar::canonicalize(N, &[raw(qf(1, 2), vec![], x)]));
        let s = SymScalar::canonicalize(N, &[raw(q(1), vec![2, 1], vec![])]);
        assert_eq!(s, SymScalar::generator(N, 1).star(&SymScalar::generator(N, 2)).neg());
        let g = FuncAtom::function("g", AtomVar::T2, false);
        let s = SymScalar::canonicalize(N, &[raw(q(1), vec![], vec![(f(), 1), (g.clone(), 1)])]);
        assert_eq!(s.terms().next().unwrap().0 .2.groups().len(), 1);
        assert_eq!(s.canonical(), s);
    }

    #[test]
    fn invert_examples() {
        let a = at(f1(), 1).star(&at(f(), 1));
        let inv = a.invert().unwrap();
        assert_eq!(inv.to_string(), "1/f1(hbar) 1/f(t2)");
        let xi = SymScalar::generator(N, 1);
        let b = at(h(), 1).add(&xi.star(&at(f(), 1)));
        let binv = b.invert().unwrap();
        assert_eq!(b.star(&binv), SymScalar::one(N));
        assert_eq!(binv.star(&b), SymScalar::one(N));
        assert!(xi.invert().is_err());
        assert!(at(f().derived(1), 1).invert().is_err());
        assert!(at(f(), 1).add(&at(h(), 1)).invert().is_err());
    }
}
