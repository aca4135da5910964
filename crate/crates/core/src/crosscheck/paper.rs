//! Transcribed tables from the example section, in the DSL's sectioned syntax.
//!
//! Sections: `[declare]` (extra function atoms that appear only in the
//! transcription), `[inverse]`, `[christoffel_lower]`, `[christoffel]`,
//! `[curvature]`, `[ricci]`, `[scalar]`. Keys follow the printed labels:
//! `g12`, `G112`, `G11^2`, `R121^1`, `R12`, `S`. A trailing `low` marks a
//! low-confidence transcription. `complete = yes` asserts that unlisted
//! components are zero.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dsl::{
    eval_symbolic, DslError, Document, ErrorKind, Expr, FunctionDecl, Name, SurfaceSpec,
};
use crate::symbolic::SymScalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Table {
    Inverse,
    ChristoffelLower,
    Christoffel,
    Curvature,
    Ricci,
    Scalar,
}

impl Table {
    pub const ALL: [Table; 6] = [
        Table::Inverse,
        Table::ChristoffelLower,
        Table::Christoffel,
        Table::Curvature,
        Table::Ricci,
        Table::Scalar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Table::Inverse => "inverse",
            Table::ChristoffelLower => "christoffel_lower",
            Table::Christoffel => "christoffel",
            Table::Curvature => "curvature",
            Table::Ricci => "ricci",
            Table::Scalar => "scalar",
        }
    }

    pub fn parse(s: &str) -> Option<Table> {
        Table::ALL.into_iter().find(|t| t.name() == s)
    }

    pub fn rank(self) -> usize {
        match self {
            Table::Scalar => 0,
            Table::Inverse | Table::Ricci => 2,
            Table::ChristoffelLower | Table::Christoffel => 3,
            Table::Curvature => 4,
        }
    }

    /// Printed label for 0-based storage indices (`[I,J,L]` for `Γ_IJ^L`,
    /// `[I,J,K,L]` for `R_IJK^L`).
    pub fn label(self, idx: &[usize]) -> String {
        let s: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
        match self {
            Table::Inverse => format!("g^{}{}", s[0], s[1]),
            Table::ChristoffelLower => format!("G{}{}{}", s[0], s[1], s[2]),
            Table::Christoffel => format!("G{}{}^{}", s[0], s[1], s[2]),
            Table::Curvature => format!("R{}{}{}^{}", s[0], s[1], s[2], s[3]),
            Table::Ricci => format!("R{}{}", s[0], s[1]),
            Table::Scalar => "S".into(),
        }
    }

    /// Key as written in a transcription file (`g12`, `G112`, `G11^2`).
    pub fn key(self, idx: &[usize]) -> String {
        match self {
            Table::Inverse => self.label(idx).replace('^', ""),
            _ => self.label(idx),
        }
    }

    /// Every storage index of the table in lexicographic order.
    pub fn indices(self, dim: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..self.rank() {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (0..dim).map(move |i| {
                        let mut q = p.clone();
                        q.push(i);
                        q
                    })
                })
                .collect();
        }
        out
    }
}

/// Parses a key into 0-based storage indices.
fn key_indices(table: Table, key: &str) -> Option<Vec<usize>> {
    let digits = |s: &str| -> Option<Vec<usize>> {
        s.chars()
            .map(|c| c.to_digit(10).filter(|d| *d >= 1).map(|d| d as usize - 1))
            .collect()
    };
    let (head, upper) = match key.split_once('^') {
        Some((h, u)) => (h, Some(digits(u)?)),
        None => (key, None),
    };
    let (prefix, lower) = head.split_at(1);
    let lower = digits(lower)?;
    let idx = match (table, prefix, upper) {
        (Table::Inverse, "g", None) if lower.len() == 2 => lower,
        (Table::ChristoffelLower, "G", None) if lower.len() == 3 => lower,
        (Table::Christoffel, "G", Some(u)) if lower.len() == 2 && u.len() == 1 => [lower, u].concat(),
        (Table::Curvature, "R", Some(u)) if lower.len() == 3 && u.len() == 1 => [lower, u].concat(),
        (Table::Ricci, "R", None) if lower.len() == 2 => lower,
        (Table::Scalar, "S", None) if lower.is_empty() => lower,
        _ => return None,
    };
    Some(idx)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PaperEntry {
    pub table: Table,
    pub indices: Vec<usize>,
    pub expr: Expr,
    pub value: SymScalar,
    pub low_confidence: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PaperTables {
    pub entries: BTreeMap<(Table, Vec<usize>), PaperEntry>,
    pub complete: BTreeSet<Table>,
    /// Atoms from `[declare]`.
    pub declared: Vec<FunctionDecl>,
    /// The example spec extended by `[declare]`.
    pub scope: SurfaceSpec,
}

impl PaperTables {
    pub fn parse(src: &str, spec: &SurfaceSpec) -> Result<Self, DslError> {
        let doc = Document::parse(src)?;
        let mut scope = spec.clone();
        let mut tables = PaperTables {
            entries: BTreeMap::new(),
            complete: BTreeSet::new(),
            declared: Vec::new(),
            scope: spec.clone(),
        };
        if let Some(s) = doc.section("declare") {
            for e in &s.entries {
                let words: Vec<&str> = e.value.split(|c: char| c == ',' || c.is_whitespace()).filter(|w| !w.is_empty()).collect();
                let (var, attrs) = words.split_first().ok_or_else(|| {
                    DslError::new(ErrorKind::Syntax, e.value_pos, "expected a variable")
                })?;
                if scope.resolve(&e.key).is_some() {
                    return Err(DslError::new(
                        ErrorKind::Declaration,
                        e.key_pos,
                        format!("`{}` is already declared", e.key),
                    ));
                }
                if *var != "hbar" && !scope.even.iter().any(|n| n.text == *var) {
                    return Err(DslError::new(
                        ErrorKind::Declaration,
                        e.value_pos,
                        format!("`{var}` is not an even coordinate or `hbar`"),
                    ));
                }
                let decl = FunctionDecl {
                    name: Name {
                        text: e.key.clone(),
                        pos: e.key_pos,
                    },
                    var: var.to_string(),
                    positive: attrs.contains(&"positive"),
                };
                scope.functions.push(decl.clone());
                tables.declared.push(decl);
            }
        }
        for s in &doc.sections {
            if s.name == "declare" {
                continue;
            }
            let table = Table::parse(&s.name).ok_or_else(|| {
                DslError::new(ErrorKind::Declaration, s.pos, format!("unknown table `{}`", s.name))
            })?;
            for e in &s.entries {
                if e.key == "complete" {
                    if e.value != "yes" {
                        return Err(DslError::new(ErrorKind::Syntax, e.value_pos, "expected `complete = yes`"));
                    }
                    tables.complete.insert(table);
                    continue;
                }
                let indices = key_indices(table, &e.key)
                    .filter(|ix| ix.iter().all(|i| *i < scope.dim()))
                    .ok_or_else(|| {
                        DslError::new(
                            ErrorKind::Declaration,
                            e.key_pos,
                            format!("`{}` is not a component of [{}]", e.key, s.name),
                        )
                    })?;
                let low_confidence = match e.flags.as_slice() {
                    [] => false,
                    [f] if f == "low" => true,
                    _ => {
                        return Err(DslError::new(
                            ErrorKind::Syntax,
                            e.key_pos,
                            "only the flag `low` may follow a value",
                        ))
                    }
                };
                let expr = crate::dsl::parse_expr(&e.value, e.value_pos)?;
                scope.check_scope(&expr, &|_| true)?;
                let value = eval_symbolic(&scope, &expr)?;
                let key = (table, indices.clone());
                if tables.entries.contains_key(&key) {
                    return Err(DslError::new(
                        ErrorKind::Declaration,
                        e.key_pos,
                        format!("duplicate entry `{}`", e.key),
                    ));
                }
                tables.entries.insert(
                    key,
                    PaperEntry {
                        table,
                        indices,
                        expr,
                        value,
                        low_confidence,
                    },
                );
            }
        }
        tables.scope = scope;
        Ok(tables)
    }

    pub fn has_table(&self, t: Table) -> bool {
        self.complete.contains(&t) || self.entries.keys().any(|(table, _)| *table == t)
    }

    pub fn get(&self, t: Table, idx: &[usize]) -> Option<&PaperEntry> {
        self.entries.get(&(t, idx.to_vec()))
    }
}

/// Canonical text; parsing it against the same spec gives back equal tables.
impl fmt::Display for PaperTables {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut header = |f: &mut fmt::Formatter<'_>, name: &str| {
            if !std::mem::take(&mut first) {
                writeln!(f)?;
            }
            writeln!(f, "[{name}]")
        };
        if !self.declared.is_empty() {
            header(f, "declare")?;
            for d in &self.declared {
                let attr = if d.positive { ", positive" } else { "" };
                writeln!(f, "{} = \"{}{attr}\"", d.name.text, d.var)?;
            }
        }
        for t in Table::ALL.into_iter().filter(|t| self.has_table(*t)) {
            header(f, t.name())?;
            if self.complete.contains(&t) {
                writeln!(f, "complete = yes")?;
            }
            for ((_, idx), e) in self.entries.range((t, vec![])..).take_while(|((u, _), _)| *u == t) {
                let flag = if e.low_confidence { " low" } else { "" };
                writeln!(f, "{} = \"{}\"{flag}", t.key(idx), e.expr)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPEC: &str = "[surface]\neven = \"t1, t2\"\nodd = \"\"\norder = 1\n\n[functions]\nf = \"t1, positive\"\n\n[metric]\ng11 = \"f\"\ng22 = \"1\"\n";

    fn spec() -> SurfaceSpec {
        SurfaceSpec::parse(SPEC).unwrap()
    }

    #[test]
    fn keys_and_labels() {
        assert_eq!(key_indices(Table::Christoffel, "G12^1"), Some(vec![0, 1, 0]));
        assert_eq!(key_indices(Table::Curvature, "R121^2"), Some(vec![0, 1, 0, 1]));
        assert_eq!(key_indices(Table::Scalar, "S"), Some(vec![]));
        assert_eq!(key_indices(Table::Ricci, "R1"), None);
        assert_eq!(key_indices(Table::Inverse, "g^12"), None);
        assert_eq!(key_indices(Table::ChristoffelLower, "G102"), None);
        assert_eq!(Table::Inverse.key(&[0, 1]), "g12");
        assert_eq!(Table::Inverse.label(&[0, 1]), "g^12");
        assert_eq!(Table::Christoffel.key(&[1, 0, 1]), "G21^2");
        assert_eq!(Table::Curvature.indices(2).len(), 16);
    }

    #[test]
    fn parse_and_print() {
        let src = "[declare]\nk = \"hbar, positive\"\n\n[inverse]\ncomplete = yes\ng11 = \"f^-1\"\n\n[scalar]\nS = \"k * d(f, t1, 1)\" low\n";
        let t = PaperTables::parse(src, &spec()).unwrap();
        assert!(t.complete.contains(&Table::Inverse));
        assert!(t.has_table(Table::Scalar) && !t.has_table(Table::Ricci));
        assert!(t.get(Table::Scalar, &[]).unwrap().low_confidence);
        assert_eq!(t.declared.len(), 1);
        assert_eq!(t.to_string(), src);
        assert_eq!(PaperTables::parse(&t.to_string(), &spec()).unwrap(), t);
    }

    #[test]
    fn rejects_bad_input() {
        let s = spec();
        let err = |src: &str| PaperTables::parse(src, &s).unwrap_err();
        assert_eq!(err("[torsion]\n").kind, ErrorKind::Declaration);
        assert_eq!(err("[ricci]\nR13 = \"0\"\n").kind, ErrorKind::Declaration);
        assert_eq!(err("[ricci]\nR11 = \"0\" high\n").kind, ErrorKind::Syntax);
        assert_eq!(err("[ricci]\nR11 = \"0\"\nR11 = \"1\"\n").kind, ErrorKind::Declaration);
        assert_eq!(err("[ricci]\nR11 = \"q\"\n").kind, ErrorKind::Declaration);
        assert_eq!(err("[declare]\nf = \"t1\"\n").kind, ErrorKind::Declaration);
        assert_eq!(err("[declare]\nk = \"xi\"\n").kind, ErrorKind::Declaration);
        assert_eq!(err("[inverse]\ncomplete = no\n").kind, ErrorKind::Syntax);
    }
}
