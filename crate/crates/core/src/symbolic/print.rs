//! Paper-style rendering: `*` between star-factors in different coordinates,
//! primes for derivatives, and one fraction per group.

use crate::algebra::fmt_q_abs;
use num_traits::Signed;

use super::{is_unit, AtomVar, FuncAtom, StarWord, SymScalar};

/// Renders symbolic elements. Generator `ξ_α` prints as `generator_names[α-1]`
/// when given, `xiα` otherwise.
#[derive(Clone, Debug, Default)]
pub struct Printer {
    pub generator_names: Vec<String>,
}

/// Renders with default generator names.
pub fn pretty(s: &SymScalar) -> String {
    Printer::default().print(s)
}

fn atom(a: &FuncAtom, e: i32) -> String {
    let mut s = a.name.to_string();
    for _ in 0..a.deriv {
        s.push('\'');
    }
    if !a.coordinate && a.var != AtomVar::Param {
        s.push_str(&format!("({})", a.var));
    }
    if e.abs() > 1 {
        s.push_str(&format!("^{}", e.abs()));
    }
    s
}

fn fraction<'a>(factors: impl Iterator<Item = (&'a FuncAtom, i32)>) -> String {
    let (mut num, mut den) = (Vec::new(), Vec::new());
    for (a, e) in factors {
        if e > 0 {
            num.push(atom(a, e));
        } else {
            den.push(atom(a, e));
        }
    }
    let num = if num.is_empty() { "1".to_string() } else { num.join(" ") };
    match den.len() {
        0 => num,
        1 => format!("{num}/{}", den[0]),
        _ => format!("{num}/({})", den.join(" ")),
    }
}

impl Printer {
    fn generator(&self, alpha: u8) -> String {
        self.generator_names
            .get(alpha as usize - 1)
            .cloned()
            .unwrap_or_else(|| format!("xi{alpha}"))
    }

    fn word(&self, w: &StarWord) -> Vec<String> {
        let mut parts = Vec::new();
        if w.central().next().is_some() {
            parts.push(fraction(w.central()));
        }
        let groups: Vec<String> = w.groups().iter().map(|g| fraction(g.atoms())).collect();
        if !groups.is_empty() {
            parts.push(groups.join(" * "));
        }
        parts
    }

    pub fn print(&self, s: &SymScalar) -> String {
        if s.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, ((n, m, w), c)) in s.terms().enumerate() {
            let mut parts = Vec::new();
            match n {
                0 => {}
                1 => parts.push("hbar".to_string()),
                _ => parts.push(format!("hbar^{n}")),
            }
            parts.extend(m.generators().map(|a| self.generator(a)));
            parts.extend(self.word(w));
            if parts.is_empty() || !is_unit(c) {
                parts.insert(0, fmt_q_abs(c));
            }
            let neg = c.is_negative();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&parts.join(" "));
        }
        out
    }
}
