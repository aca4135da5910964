use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{Parity, MAX_GENERATORS};
use crate::geometry::SuperSurface;

use super::ast::{Expr, ExprKind};
use super::document::{Document, Entry, Section};
use super::parser::parse_expr;
use super::{DslError, ErrorKind, Pos, KEYWORDS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Symbolic,
    Exact,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Symbolic => "symbolic",
            Backend::Exact => "exact",
        })
    }
}

impl std::str::FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "symbolic" => Ok(Backend::Symbolic),
            "exact" => Ok(Backend::Exact),
            _ => Err(format!("unknown backend `{s}` (expected symbolic or exact)")),
        }
    }
}

/// A declared name; equality ignores the position.
#[derive(Clone, Debug)]
pub struct Name {
    pub text: String,
    pub pos: Pos,
}

impl PartialEq for Name {
    fn eq(&self, other: &Self) -> bool {
        self.text == other.text
    }
}

impl Name {
    fn new(text: &str, pos: Pos) -> Self {
        Name {
            text: text.to_string(),
            pos,
        }
    }
}

/// `f = "t2, positive"`: a function of one even coordinate or of `hbar`.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionDecl {
    pub name: Name,
    pub var: String,
    pub positive: bool,
}

/// `eps = "even, nonzero"`: a central constant.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamDecl {
    pub name: Name,
    pub parity: Parity,
    pub nonzero: bool,
}

/// `g_IJ`, 1-based.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricEntry {
    pub row: usize,
    pub col: usize,
    pub expr: Expr,
}

/// Concrete values for the declared functions and parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct BindingSet {
    pub index: u32,
    pub entries: Vec<(Name, Expr)>,
}

impl BindingSet {
    pub fn get(&self, name: &str) -> Option<&Expr> {
        self.entries.iter().find(|(n, _)| n.text == name).map(|(_, e)| e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Resolved {
    Even(u8),
    Odd(u8),
    Function(usize),
    Param(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceSpec {
    pub even: [Name; 2],
    pub odd: Vec<Name>,
    pub order: u32,
    pub degree: Parity,
    pub backend: Backend,
    pub functions: Vec<FunctionDecl>,
    pub params: Vec<ParamDecl>,
    pub metric: Vec<MetricEntry>,
    pub bindings: Vec<BindingSet>,
}

fn err(kind: ErrorKind, pos: Pos, msg: impl Into<String>) -> DslError {
    DslError::new(kind, pos, msg)
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
}

/// Splits `"a, b c"` into words with their columns.
fn words(e: &Entry) -> Vec<(String, Pos)> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut start = 0;
    for (i, c) in e.value.chars().chain(std::iter::once(',')).enumerate() {
        if c == ',' || c.is_whitespace() {
            if !cur.is_empty() {
                out.push((
                    std::mem::take(&mut cur),
                    Pos {
                        line: e.value_pos.line,
                        col: e.value_pos.col + start,
                    },
                ));
            }
        } else {
            if cur.is_empty() {
                start = i;
            }
            cur.push(c);
        }
    }
    out
}

fn no_flags(e: &Entry) -> Result<(), DslError> {
    match e.flags.first() {
        Some(f) => Err(err(ErrorKind::Syntax, e.key_pos, format!("unexpected `{f}` after value"))),
        None => Ok(()),
    }
}

fn parity_word(w: &str, pos: Pos) -> Result<Parity, DslError> {
    match w {
        "even" => Ok(Parity::Even),
        "odd" => Ok(Parity::Odd),
        _ => Err(err(ErrorKind::Syntax, pos, format!("expected `even` or `odd`, found `{w}`"))),
    }
}

/// Parses `g11`, `g23` or `g_10_2` into 1-based indices.
fn metric_key(key: &str) -> Option<(usize, usize)> {
    let rest = key.strip_prefix('g')?;
    if let Some(rest) = rest.strip_prefix('_') {
        let (a, b) = rest.split_once('_')?;
        return Some((a.parse().ok()?, b.parse().ok()?));
    }
    let digits: Vec<u32> = rest.chars().map(|c| c.to_digit(10)).collect::<Option<_>>()?;
    match digits.as_slice() {
        [a, b] => Some((*a as usize, *b as usize)),
        _ => None,
    }
}

impl SurfaceSpec {
    pub fn parse(src: &str) -> Result<Self, DslError> {
        SurfaceSpec::from_document(&Document::parse(src)?)
    }

    pub fn from_document(doc: &Document) -> Result<Self, DslError> {
        let mut seen = BTreeSet::new();
        for s in &doc.sections {
            let known = matches!(s.name.as_str(), "surface" | "functions" | "params" | "metric")
                || s.name.starts_with("bindings.");
            if !known {
                return Err(err(ErrorKind::Declaration, s.pos, format!("unknown section `{}`", s.name)));
            }
            if !seen.insert(s.name.as_str()) {
                return Err(err(ErrorKind::Declaration, s.pos, format!("duplicate section `{}`", s.name)));
            }
        }
        let origin = Pos { line: 1, col: 1 };
        let surface = doc
            .section("surface")
            .ok_or_else(|| err(ErrorKind::Declaration, origin, "missing [surface] section"))?;
        let mut spec = SurfaceSpec::surface_section(surface)?;
        let mut names: BTreeSet<String> = spec.even.iter().chain(&spec.odd).map(|n| n.text.clone()).collect();
        if let Some(s) = doc.section("functions") {
            for e in &s.entries {
                no_flags(e)?;
                let name = spec.declare(&mut names, e)?;
                let ws = words(e);
                let Some((var, vpos)) = ws.first() else {
                    return Err(err(ErrorKind::Syntax, e.value_pos, "expected a variable"));
                };
                if var != "hbar" && !spec.even.iter().any(|n| &n.text == var) {
                    return Err(err(
                        ErrorKind::Declaration,
                        *vpos,
                        format!("`{var}` is not an even coordinate or `hbar`"),
                    ));
                }
                let mut positive = false;
                for (w, p) in &ws[1..] {
                    match w.as_str() {
                        "positive" => positive = true,
                        _ => return Err(err(ErrorKind::Syntax, *p, format!("unknown attribute `{w}`"))),
                    }
                }
                spec.functions.push(FunctionDecl {
                    name,
                    var: var.clone(),
                    positive,
                });
            }
        }
        if let Some(s) = doc.section("params") {
            for e in &s.entries {
                no_flags(e)?;
                let name = spec.declare(&mut names, e)?;
                let ws = words(e);
                let Some((p, ppos)) = ws.first() else {
                    return Err(err(ErrorKind::Syntax, e.value_pos, "expected `even` or `odd`"));
                };
                let parity = parity_word(p, *ppos)?;
                let mut nonzero = false;
                for (w, p) in &ws[1..] {
                    match w.as_str() {
                        "nonzero" => nonzero = true,
                        _ => return Err(err(ErrorKind::Syntax, *p, format!("unknown attribute `{w}`"))),
                    }
                }
                spec.params.push(ParamDecl { name, parity, nonzero });
            }
        }
        let metric = doc
            .section("metric")
            .ok_or_else(|| err(ErrorKind::Declaration, origin, "missing [metric] section"))?;
        spec.metric_section(metric)?;
        for s in doc.sections.iter().filter(|s| s.name.starts_with("bindings.")) {
            spec.binding_section(s)?;
        }
        spec.bindings.sort_by_key(|b| b.index);
        Ok(spec)
    }

    fn surface_section(s: &Section) -> Result<Self, DslError> {
        let mut spec = SurfaceSpec {
            even: [Name::new("t1", s.pos), Name::new("t2", s.pos)],
            odd: Vec::new(),
            order: 0,
            degree: Parity::Even,
            backend: Backend::Symbolic,
            functions: Vec::new(),
            params: Vec::new(),
            metric: Vec::new(),
            bindings: Vec::new(),
        };
        let mut order = None;
        let mut keys = BTreeSet::new();
        for e in &s.entries {
            no_flags(e)?;
            if !keys.insert(e.key.as_str()) {
                return Err(err(ErrorKind::Declaration, e.key_pos, format!("duplicate key `{}`", e.key)));
            }
            let ws = words(e);
            let single = || -> Result<(String, Pos), DslError> {
                match ws.as_slice() {
                    [one] => Ok(one.clone()),
                    _ => Err(err(ErrorKind::Syntax, e.value_pos, format!("`{}` takes one value", e.key))),
                }
            };
            match e.key.as_str() {
                "even" => match ws.as_slice() {
                    [(a, pa), (b, pb)] => spec.even = [Name::new(a, *pa), Name::new(b, *pb)],
                    _ => {
                        return Err(err(
                            ErrorKind::Syntax,
                            e.value_pos,
                            "exactly two even coordinate names are required",
                        ))
                    }
                },
                "odd" => spec.odd = ws.iter().map(|(w, p)| Name::new(w, *p)).collect(),
                "order" => {
                    let (w, p) = single()?;
                    order = Some(w.parse().map_err(|_| {
                        err(ErrorKind::Syntax, p, format!("order must be a nonnegative integer, found `{w}`"))
                    })?);
                }
                "degree" => {
                    let (w, p) = single()?;
                    spec.degree = parity_word(&w, p)?;
                }
                "backend" => {
                    let (w, p) = single()?;
                    spec.backend = w.parse().map_err(|m: String| err(ErrorKind::Syntax, p, m))?;
                }
                other => {
                    return Err(err(ErrorKind::Declaration, e.key_pos, format!("unknown surface key `{other}`")))
                }
            }
        }
        spec.order = order.ok_or_else(|| err(ErrorKind::Declaration, s.pos, "[surface] needs `order`"))?;
        if spec.odd.len() > MAX_GENERATORS as usize {
            return Err(err(
                ErrorKind::Declaration,
                s.pos,
                format!("at most {MAX_GENERATORS} odd coordinates are supported"),
            ));
        }
        let mut names = BTreeSet::new();
        for n in spec.even.iter().chain(&spec.odd) {
            check_name(&n.text, n.pos)?;
            if !names.insert(n.text.clone()) {
                return Err(err(ErrorKind::Declaration, n.pos, format!("duplicate coordinate `{}`", n.text)));
            }
        }
        Ok(spec)
    }

    fn declare(&self, names: &mut BTreeSet<String>, e: &Entry) -> Result<Name, DslError> {
        check_name(&e.key, e.key_pos)?;
        if !names.insert(e.key.clone()) {
            return Err(err(ErrorKind::Declaration, e.key_pos, format!("`{}` is already declared", e.key)));
        }
        Ok(Name::new(&e.key, e.key_pos))
    }

    fn metric_section(&mut self, s: &Section) -> Result<(), DslError> {
        let d = self.dim();
        for e in &s.entries {
            no_flags(e)?;
            let (row, col) = metric_key(&e.key)
                .filter(|(r, c)| (1..=d).contains(r) && (1..=d).contains(c))
                .ok_or_else(|| {
                    err(
                        ErrorKind::Declaration,
                        e.key_pos,
                        format!("`{}` is not a metric entry g<I><J> with 1 <= I, J <= {d}", e.key),
                    )
                })?;
            if self.metric.iter().any(|m| m.row == row && m.col == col) {
                return Err(err(ErrorKind::Declaration, e.key_pos, format!("duplicate entry `{}`", e.key)));
            }
            let expr = parse_expr(&e.value, e.value_pos)?;
            self.check_scope(&expr, &|_| true)?;
            self.metric.push(MetricEntry { row, col, expr });
        }
        self.metric.sort_by_key(|m| (m.row, m.col));
        Ok(())
    }

    fn binding_section(&mut self, s: &Section) -> Result<(), DslError> {
        let index: u32 = s.name["bindings.".len()..]
            .parse()
            .map_err(|_| err(ErrorKind::Syntax, s.pos, format!("bad binding set name `{}`", s.name)))?;
        let mut set = BindingSet {
            index,
            entries: Vec::new(),
        };
        for e in &s.entries {
            no_flags(e)?;
            let var = match self.resolve(&e.key) {
                Some(Resolved::Function(i)) => Some(self.functions[i].var.clone()),
                Some(Resolved::Param(_)) => None,
                _ => {
                    return Err(err(
                        ErrorKind::Declaration,
                        e.key_pos,
                        format!("`{}` is not a declared function or parameter", e.key),
                    ))
                }
            };
            if set.get(&e.key).is_some() {
                return Err(err(ErrorKind::Declaration, e.key_pos, format!("`{}` bound twice", e.key)));
            }
            let expr = parse_expr(&e.value, e.value_pos)?;
            self.check_binding(&e.key, var.as_deref(), &expr)?;
            set.entries.push((Name::new(&e.key, e.key_pos), expr));
        }
        self.bindings.push(set);
        Ok(())
    }

    /// A binding may mention only its own variable.
    fn check_binding(&self, name: &str, var: Option<&str>, expr: &Expr) -> Result<(), DslError> {
        let allowed = |n: &str| Some(n) == var && n != "hbar";
        self.check_scope(expr, &allowed).map_err(|mut e| {
            e.message = format!("in binding for `{name}`: {}", e.message);
            e
        })?;
        if var != Some("hbar") && contains_hbar(expr) {
            return Err(err(
                ErrorKind::Declaration,
                expr.pos,
                format!("binding for `{name}` may not depend on hbar"),
            ));
        }
        Ok(())
    }

    /// Every identifier must be declared and accepted by `allowed`;
    /// derivative variables must be coordinates.
    pub fn check_scope(&self, expr: &Expr, allowed: &dyn Fn(&str) -> bool) -> Result<(), DslError> {
        check_derivatives(self, expr)?;
        for (name, pos) in expr.identifiers() {
            if self.resolve(name).is_none() {
                return Err(err(ErrorKind::Declaration, pos, format!("undeclared identifier `{name}`")));
            }
            if !allowed(name) {
                return Err(err(ErrorKind::Declaration, pos, format!("`{name}` is not allowed here")));
            }
        }
        Ok(())
    }

    pub fn resolve(&self, name: &str) -> Option<Resolved> {
        if let Some(k) = self.even.iter().position(|n| n.text == name) {
            return Some(Resolved::Even(k as u8 + 1));
        }
        if let Some(a) = self.odd.iter().position(|n| n.text == name) {
            return Some(Resolved::Odd(a as u8 + 1));
        }
        if let Some(i) = self.functions.iter().position(|f| f.name.text == name) {
            return Some(Resolved::Function(i));
        }
        self.params
            .iter()
            .position(|p| p.name.text == name)
            .map(Resolved::Param)
    }

    pub fn surface(&self) -> SuperSurface {
        SuperSurface::new(self.odd.len() as u8, self.order)
    }

    pub fn dim(&self) -> usize {
        2 + self.odd.len()
    }

    pub fn generator_names(&self) -> Vec<String> {
        self.odd.iter().map(|n| n.text.clone()).collect()
    }

    pub fn binding_set(&self, index: u32) -> Option<&BindingSet> {
        self.bindings.iter().find(|b| b.index == index)
    }

    pub fn function(&self, name: &str) -> Option<&FunctionDecl> {
        self.functions.iter().find(|f| f.name.text == name)
    }

    pub fn param(&self, name: &str) -> Option<&ParamDecl> {
        self.params.iter().find(|p| p.name.text == name)
    }

    /// The metric entry expression, if written.
    pub fn entry(&self, row: usize, col: usize) -> Option<&MetricEntry> {
        self.metric.iter().find(|m| m.row == row && m.col == col)
    }
}

fn check_name(name: &str, pos: Pos) -> Result<(), DslError> {
    if !is_identifier(name) {
        return Err(err(ErrorKind::Syntax, pos, format!("`{name}` is not an identifier")));
    }
    if KEYWORDS.contains(&name) {
        return Err(err(ErrorKind::Declaration, pos, format!("`{name}` is reserved")));
    }
    Ok(())
}

fn contains_hbar(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Hbar => true,
        ExprKind::Number(_) | ExprKind::Ident(_) => false,
        ExprKind::Derivative(a, _, _) | ExprKind::Inv(a) | ExprKind::Neg(a) | ExprKind::Pow(a, _) => {
            contains_hbar(a)
        }
        ExprKind::Add(a, b) | ExprKind::Sub(a, b) | ExprKind::Mul(a, b) => {
            contains_hbar(a) || contains_hbar(b)
        }
    }
}

fn check_derivatives(spec: &SurfaceSpec, e: &Expr) -> Result<(), DslError> {
    match &e.kind {
        ExprKind::Derivative(a, var, _) => {
            if !matches!(spec.resolve(var), Some(Resolved::Even(_) | Resolved::Odd(_))) {
                return Err(err(
                    ErrorKind::Declaration,
                    e.pos,
                    format!("`{var}` is not a coordinate"),
                ));
            }
            check_derivatives(spec, a)
        }
        ExprKind::Inv(a) | ExprKind::Neg(a) | ExprKind::Pow(a, _) => check_derivatives(spec, a),
        ExprKind::Add(a, b) | ExprKind::Sub(a, b) | ExprKind::Mul(a, b) => {
            check_derivatives(spec, a)?;
            check_derivatives(spec, b)
        }
        ExprKind::Number(_) | ExprKind::Hbar | ExprKind::Ident(_) => Ok(()),
    }
}

fn parity_name(p: Parity) -> &'static str {
    match p {
        Parity::Even => "even",
        Parity::Odd => "odd",
    }
}

/// Canonical text; parsing it gives back an equal spec.
impl fmt::Display for SurfaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[surface]")?;
        writeln!(f, "even = \"{}, {}\"", self.even[0].text, self.even[1].text)?;
        let odd: Vec<&str> = self.odd.iter().map(|n| n.text.as_str()).collect();
        writeln!(f, "odd = \"{}\"", odd.join(", "))?;
        writeln!(f, "order = {}", self.order)?;
        writeln!(f, "degree = {}", parity_name(self.degree))?;
        writeln!(f, "backend = {}", self.backend)?;
        if !self.functions.is_empty() {
            writeln!(f, "\n[functions]")?;
            for d in &self.functions {
                let attr = if d.positive { ", positive" } else { "" };
                writeln!(f, "{} = \"{}{attr}\"", d.name.text, d.var)?;
            }
        }
        if !self.params.is_empty() {
            writeln!(f, "\n[params]")?;
            for p in &self.params {
                let attr = if p.nonzero { ", nonzero" } else { "" };
                writeln!(f, "{} = \"{}{attr}\"", p.name.text, parity_name(p.parity))?;
            }
        }
        writeln!(f, "\n[metric]")?;
        let wide = self.dim() > 9;
        for m in &self.metric {
            if wide {
                writeln!(f, "g_{}_{} = \"{}\"", m.row, m.col, m.expr)?;
            } else {
                writeln!(f, "g{}{} = \"{}\"", m.row, m.col, m.expr)?;
            }
        }
        for b in &self.bindings {
            writeln!(f, "\n[bindings.{}]", b.index)?;
            for (n, e) in &b.entries {
                writeln!(f, "{} = \"{e}\"", n.text)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEAD: &str = "[surface]\neven = \"u, v\"\nodd = \"a b\"\norder = 1\n";

    fn fails(src: &str) -> DslError {
        SurfaceSpec::parse(src).unwrap_err()
    }

    #[test]
    fn declared_names_resolve() {
        let src = format!("{HEAD}\n[functions]\nf = \"v\"\n\n[params]\nc = \"odd nonzero\"\n\n[metric]\ng11 = \"f\"\ng14 = \"c * a\"\n");
        let spec = SurfaceSpec::parse(&src).unwrap();
        assert_eq!(spec.dim(), 4);
        assert_eq!(spec.generator_names(), ["a", "b"]);
        assert_eq!(spec.resolve("u"), Some(Resolved::Even(1)));
        assert_eq!(spec.resolve("b"), Some(Resolved::Odd(2)));
        assert!(spec.param("c").is_some_and(|p| p.nonzero && p.parity == Parity::Odd));
        assert_eq!(spec.backend, Backend::Symbolic);
        assert_eq!(SurfaceSpec::parse(&spec.to_string()).unwrap(), spec);
    }

    #[test]
    fn positioned_errors() {
        let e = fails(&format!("{HEAD}[metric]\ng15 = \"1\"\n"));
        assert_eq!((e.kind, e.pos), (ErrorKind::Declaration, Pos { line: 6, col: 1 }));

        let e = fails(&format!("{HEAD}[metric]\ng11 = \"w\"\n"));
        assert_eq!((e.kind, e.pos), (ErrorKind::Declaration, Pos { line: 6, col: 8 }));

        let e = fails("[surface]\nodd = \"\"\n[metric]\n");
        assert!(e.message.contains("order"), "{e}");

        let e = fails("[surface]\neven = \"t1, t1\"\norder = 1\n[metric]\n");
        assert!(e.message.contains("duplicate coordinate"), "{e}");

        let e = fails(&format!("{HEAD}[metric]\n[extra]\n"));
        assert!(e.message.contains("unknown section"), "{e}");

        let e = fails(&format!("{HEAD}[functions]\nd = \"u\"\n[metric]\n"));
        assert_eq!(e.kind, ErrorKind::Declaration);
    }

    #[test]
    fn bindings_stay_in_their_variable() {
        let base = format!("{HEAD}\n[functions]\nf = \"v\"\n\n[metric]\ng11 = \"f\"\n\n[bindings.1]\n");
        assert!(SurfaceSpec::parse(&format!("{base}f = \"1 + v^2\"\n")).is_ok());
        let e = SurfaceSpec::parse(&format!("{base}f = \"1 + u\"\n")).unwrap_err();
        assert!(e.message.contains("binding for `f`"), "{e}");
        let e = SurfaceSpec::parse(&format!("{base}f = \"1 + hbar\"\n")).unwrap_err();
        assert!(e.message.contains("hbar"), "{e}");
        let e = SurfaceSpec::parse(&format!("{base}g = \"1\"\n")).unwrap_err();
        assert_eq!(e.pos, Pos { line: 13, col: 1 });
    }
}
