use std::fmt;

use super::Parity;

/// A Grassmann monomial `ξ_{i1} ξ_{i2} ⋯ ξ_{ik}` with `i1 < i2 < ⋯ < ik`,
/// stored as a bit mask (bit `α - 1` for `ξ_α`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GrassmannMono(u32);

/// Upper bound on the number of odd generators.
pub const MAX_GENERATORS: u8 = 16;

impl GrassmannMono {
    pub const ONE: GrassmannMono = GrassmannMono(0);

    pub fn generator(alpha: u8) -> Self {
        assert!(
            (1..=MAX_GENERATORS).contains(&alpha),
            "generator index {alpha} out of range"
        );
        GrassmannMono(1 << (alpha - 1))
    }

    /// Builds the sorted monomial from a product of generators in the given
    /// order, returning the reordering sign, or `None` if a generator repeats.
    pub fn from_product(gens: &[u8]) -> Option<(i8, Self)> {
        let mut acc = GrassmannMono::ONE;
        let mut sign = 1i8;
        for &g in gens {
            let (s, m) = acc.mul(GrassmannMono::generator(g))?;
            sign *= s;
            acc = m;
        }
        Some((sign, acc))
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn from_mask(mask: u32) -> Self {
        GrassmannMono(mask)
    }

    pub fn degree(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_one(self) -> bool {
        self.0 == 0
    }

    pub fn parity(self) -> Parity {
        Parity::from_bit(self.degree() % 2 == 1)
    }

    pub fn contains(self, alpha: u8) -> bool {
        self.0 & (1 << (alpha - 1)) != 0
    }

    /// Generator indices in ascending order.
    pub fn generators(self) -> impl Iterator<Item = u8> {
        (1..=32u8).filter(move |&a| a <= 32 && self.0 & (1u32 << (a - 1)) != 0)
    }

    /// Wedge product `self ∧ other` as `(sign, monomial)`; `None` when the
    /// masks overlap. The sign is `(-1)^{#inversions}` of the concatenation.
    pub fn mul(self, other: GrassmannMono) -> Option<(i8, GrassmannMono)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        let mut inversions = 0u32;
        let mut rest = other.0;
        while rest != 0 {
            let low = rest.trailing_zeros();
            // generators of `self` above this generator of `other`
            inversions += (self.0 >> low).count_ones();
            rest &= rest - 1;
        }
        let sign = if inversions % 2 == 0 { 1 } else { -1 };
        Some((sign, GrassmannMono(self.0 | other.0)))
    }

    /// Left derivative `∂/∂ξ_α`: removes `ξ_α` with sign
    /// `(-1)^{#generators preceding α}`.
    pub fn derive(self, alpha: u8) -> Option<(i8, GrassmannMono)> {
        if !self.contains(alpha) {
            return None;
        }
        let below = self.0 & ((1u32 << (alpha - 1)) - 1);
        let sign = if below.count_ones() % 2 == 0 { 1 } else { -1 };
        Some((sign, GrassmannMono(self.0 & !(1 << (alpha - 1)))))
    }
}

impl fmt::Debug for GrassmannMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for GrassmannMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let names: Vec<String> = self.generators().map(|a| format!("xi{a}")).collect();
        write!(f, "{}", names.join(" * "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anticommutation_sign() {
        let x1 = GrassmannMono::generator(1);
        let x2 = GrassmannMono::generator(2);
        assert_eq!(x1.mul(x2), Some((1, GrassmannMono::from_mask(0b11))));
        assert_eq!(x2.mul(x1), Some((-1, GrassmannMono::from_mask(0b11))));
        assert_eq!(x1.mul(x1), None);
    }

    #[test]
    fn reorder_sign_counts_inversions() {
        // ξ3 ξ1 ξ2 has two inversions
        assert_eq!(
            GrassmannMono::from_product(&[3, 1, 2]),
            Some((1, GrassmannMono::from_mask(0b111)))
        );
        assert_eq!(
            GrassmannMono::from_product(&[2, 1, 3]),
            Some((-1, GrassmannMono::from_mask(0b111)))
        );
        assert_eq!(GrassmannMono::from_product(&[2, 2]), None);
    }

    #[test]
    fn left_derivative() {
        let m = GrassmannMono::from_mask(0b11); // ξ1 ξ2
        assert_eq!(m.derive(1), Some((1, GrassmannMono::generator(2))));
        assert_eq!(m.derive(2), Some((-1, GrassmannMono::generator(1))));
        assert_eq!(GrassmannMono::generator(1).derive(2), None);
    }

    #[test]
    fn parity_is_degree_mod_two() {
        assert_eq!(GrassmannMono::ONE.parity(), Parity::Even);
        assert_eq!(GrassmannMono::from_mask(0b101).parity(), Parity::Even);
        assert_eq!(GrassmannMono::from_mask(0b111).parity(), Parity::Odd);
    }
}
