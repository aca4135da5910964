use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::algebra::{ExactScalar, FrameIndex, Parity, ScalarAlgebra, Q};
use crate::geometry::{GeometryError, Metric};
use crate::symbolic::{AtomVar, FuncAtom, SymScalar};

use super::ast::{Expr, ExprKind};
use super::spec::{Resolved, SurfaceSpec};
use super::{DslError, ErrorKind, Pos};

/// Statically known parity; `Any` for the literal zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Static {
    Any,
    Is(Parity),
}

fn add_parity(a: Parity, b: Parity) -> Parity {
    Parity::from_bit((a.bit() + b.bit()) % 2 == 1)
}

fn infer(spec: &SurfaceSpec, e: &Expr) -> Result<Static, DslError> {
    let even = Static::Is(Parity::Even);
    Ok(match &e.kind {
        ExprKind::Number(q) if q.is_zero() => Static::Any,
        ExprKind::Number(_) | ExprKind::Hbar => even,
        ExprKind::Ident(name) => match spec.resolve(name) {
            Some(Resolved::Odd(_)) => Static::Is(Parity::Odd),
            Some(Resolved::Param(i)) => Static::Is(spec.params[i].parity),
            Some(_) => even,
            None => {
                return Err(DslError::new(
                    ErrorKind::Declaration,
                    e.pos,
                    format!("undeclared identifier `{name}`"),
                ))
            }
        },
        ExprKind::Derivative(a, var, k) => match infer(spec, a)? {
            Static::Any => Static::Any,
            Static::Is(p) => {
                let odd_var = matches!(spec.resolve(var), Some(Resolved::Odd(_)));
                Static::Is(if odd_var && k % 2 == 1 { add_parity(p, Parity::Odd) } else { p })
            }
        },
        ExprKind::Inv(a) => match infer(spec, a)? {
            Static::Is(Parity::Odd) => {
                return Err(DslError::new(ErrorKind::Parity, e.pos, "cannot invert an odd element"))
            }
            _ => even,
        },
        ExprKind::Neg(a) => infer(spec, a)?,
        ExprKind::Pow(a, n) => match infer(spec, a)? {
            Static::Is(Parity::Odd) if *n < 0 => {
                return Err(DslError::new(ErrorKind::Parity, e.pos, "cannot invert an odd element"))
            }
            Static::Is(_) if n % 2 == 0 => even,
            s => s,
        },
        ExprKind::Add(a, b) | ExprKind::Sub(a, b) => match (infer(spec, a)?, infer(spec, b)?) {
            (Static::Any, s) | (s, Static::Any) => s,
            (Static::Is(x), Static::Is(y)) if x == y => Static::Is(x),
            _ => {
                return Err(DslError::new(
                    ErrorKind::Parity,
                    e.pos,
                    "sum of an even and an odd term has no definite parity",
                ))
            }
        },
        ExprKind::Mul(a, b) => match (infer(spec, a)?, infer(spec, b)?) {
            (Static::Is(x), Static::Is(y)) => Static::Is(add_parity(x, y)),
            _ => Static::Any,
        },
    })
}

/// The parity an expression has in every model, or `None` for a literal zero.
pub fn infer_parity(spec: &SurfaceSpec, e: &Expr) -> Result<Option<Parity>, DslError> {
    Ok(match infer(spec, e)? {
        Static::Any => None,
        Static::Is(p) => Some(p),
    })
}

fn check_metric(spec: &SurfaceSpec) -> Result<(), DslError> {
    for m in &spec.metric {
        let expected = add_parity(
            spec.degree,
            Parity::from_bit((usize::from(m.row > 2) + usize::from(m.col > 2)) % 2 == 1),
        );
        if let Some(found) = infer_parity(spec, &m.expr)? {
            if found != expected {
                return Err(DslError::new(
                    ErrorKind::Parity,
                    m.expr.pos,
                    format!(
                        "g{}{} is {found} but the metric parity law requires {expected} (|g| + |{}| + |{}|)",
                        m.row, m.col, m.row, m.col
                    ),
                ));
            }
        }
    }
    if let Some(p) = spec.params.iter().find(|p| p.parity == Parity::Odd) {
        return Err(DslError::new(
            ErrorKind::Parity,
            p.name.pos,
            format!("odd parameter `{}` is not supported; parameters are even central constants", p.name.text),
        ));
    }
    Ok(())
}

fn algebra_error(pos: Pos, e: impl std::fmt::Display) -> DslError {
    DslError::new(ErrorKind::Evaluation, pos, e.to_string())
}

fn eval<A: ScalarAlgebra>(
    spec: &SurfaceSpec,
    e: &Expr,
    atom: &mut dyn FnMut(&str, Resolved, Pos) -> Result<A, DslError>,
) -> Result<A, DslError> {
    let order = spec.order;
    Ok(match &e.kind {
        ExprKind::Number(q) => A::from_rational(order, q),
        ExprKind::Hbar => A::hbar(order),
        ExprKind::Ident(name) => match spec.resolve(name) {
            Some(Resolved::Even(k)) => A::coordinate(order, k),
            Some(Resolved::Odd(a)) => A::generator(order, a),
            Some(r) => atom(name, r, e.pos)?,
            None => {
                return Err(DslError::new(
                    ErrorKind::Declaration,
                    e.pos,
                    format!("undeclared identifier `{name}`"),
                ))
            }
        },
        ExprKind::Derivative(a, var, k) => {
            let index = match spec.resolve(var) {
                Some(Resolved::Even(i)) => FrameIndex::Even(i),
                Some(Resolved::Odd(i)) => FrameIndex::Odd(i),
                _ => {
                    return Err(DslError::new(
                        ErrorKind::Declaration,
                        e.pos,
                        format!("`{var}` is not a coordinate"),
                    ))
                }
            };
            let mut v = eval(spec, a, atom)?;
            for _ in 0..*k {
                v = v.derive(index);
            }
            v
        }
        ExprKind::Inv(a) => eval(spec, a, atom)?.invert().map_err(|x| algebra_error(e.pos, x))?,
        ExprKind::Neg(a) => eval(spec, a, atom)?.neg(),
        ExprKind::Add(a, b) => eval(spec, a, atom)?.add(&eval(spec, b, atom)?),
        ExprKind::Sub(a, b) => eval(spec, a, atom)?.sub(&eval(spec, b, atom)?),
        ExprKind::Mul(a, b) => eval(spec, a, atom)?.star(&eval(spec, b, atom)?),
        ExprKind::Pow(a, n) => {
            let mut base = eval(spec, a, atom)?;
            if *n < 0 {
                base = base.invert().map_err(|x| algebra_error(e.pos, x))?;
            }
            let mut out = A::one(order);
            for _ in 0..n.unsigned_abs() {
                out = out.star(&base);
            }
            out
        }
    })
}

fn atom_var(spec: &SurfaceSpec, var: &str) -> AtomVar {
    if var == "hbar" {
        AtomVar::Hbar
    } else if var == spec.even[0].text {
        AtomVar::T1
    } else {
        AtomVar::T2
    }
}

fn symbolic_atom(spec: &SurfaceSpec, r: Resolved) -> FuncAtom {
    match r {
        Resolved::Function(i) => {
            let f = &spec.functions[i];
            FuncAtom::function(&f.name.text, atom_var(spec, &f.var), f.positive)
        }
        Resolved::Param(i) => {
            let p = &spec.params[i];
            FuncAtom::function(&p.name.text, AtomVar::Param, p.nonzero)
        }
        Resolved::Even(k) => FuncAtom::coordinate(k),
        Resolved::Odd(_) => unreachable!("generators are not atoms"),
    }
}

/// Evaluates an expression with functions and parameters kept abstract.
pub fn eval_symbolic(spec: &SurfaceSpec, e: &Expr) -> Result<SymScalar, DslError> {
    let order = spec.order;
    eval(spec, e, &mut |_, r, _| Ok(SymScalar::atom(order, symbolic_atom(spec, r), 1)))
}

fn build_metric<A: ScalarAlgebra>(
    spec: &SurfaceSpec,
    mut entry: impl FnMut(&Expr) -> Result<A, DslError>,
) -> Result<Metric<A>, DslError> {
    check_metric(spec)?;
    let d = spec.dim();
    let mut g = vec![vec![A::zero(spec.order); d]; d];
    for m in &spec.metric {
        g[m.row - 1][m.col - 1] = entry(&m.expr)?;
    }
    let pos = spec.metric.first().map_or(Pos { line: 1, col: 1 }, |m| m.expr.pos);
    Metric::new(spec.surface(), spec.degree, g).map_err(|e| match e {
        GeometryError::Parity { row, col, .. } => {
            let pos = spec.entry(row, col).map_or(pos, |m| m.expr.pos);
            DslError::new(ErrorKind::Parity, pos, e.to_string())
        }
        GeometryError::NotInvertible(_) => DslError::new(ErrorKind::Singular, pos, e.to_string()),
        other => DslError::new(ErrorKind::Evaluation, pos, other.to_string()),
    })
}

/// The metric with abstract function atoms.
pub fn elaborate_symbolic(spec: &SurfaceSpec) -> Result<Metric<SymScalar>, DslError> {
    build_metric(spec, |e| eval_symbolic(spec, e))
}

/// Concrete values of the declared functions and parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Bindings {
    pub index: u32,
    pub values: BTreeMap<String, ExactScalar>,
}

/// Evaluates binding set `index`; every declared name must be bound. A spec
/// that declares nothing needs no binding set.
pub fn bindings(spec: &SurfaceSpec, index: u32) -> Result<Bindings, DslError> {
    let origin = Pos { line: 1, col: 1 };
    if spec.functions.is_empty() && spec.params.is_empty() && spec.binding_set(index).is_none() {
        return Ok(Bindings { index, values: BTreeMap::new() });
    }
    let set = spec.binding_set(index).ok_or_else(|| {
        DslError::new(ErrorKind::Declaration, origin, format!("no [bindings.{index}] section"))
    })?;
    let mut values = BTreeMap::new();
    for (name, expr) in &set.entries {
        let v = eval::<ExactScalar>(spec, expr, &mut |n, _, p| {
            Err(DslError::new(ErrorKind::Declaration, p, format!("`{n}` cannot appear in a binding")))
        })?;
        let positive = spec.function(&name.text).is_some_and(|f| f.positive)
            || spec.param(&name.text).is_some_and(|p| p.nonzero);
        if positive && v.body().is_zero() {
            return Err(DslError::new(
                ErrorKind::Evaluation,
                expr.pos,
                format!("`{}` is declared nonvanishing but bound to a function with zero body", name.text),
            ));
        }
        values.insert(name.text.clone(), v);
    }
    let declared = spec
        .functions
        .iter()
        .map(|f| &f.name)
        .chain(spec.params.iter().map(|p| &p.name));
    for n in declared {
        if !values.contains_key(&n.text) {
            return Err(DslError::new(
                ErrorKind::Declaration,
                n.pos,
                format!("[bindings.{index}] does not bind `{}`", n.text),
            ));
        }
    }
    Ok(Bindings { index, values })
}

/// Evaluates an expression with functions replaced by their bound values.
pub fn eval_exact(spec: &SurfaceSpec, b: &Bindings, e: &Expr) -> Result<ExactScalar, DslError> {
    eval(spec, e, &mut |n, _, p| {
        b.values.get(n).cloned().ok_or_else(|| {
            DslError::new(ErrorKind::Declaration, p, format!("`{n}` has no binding"))
        })
    })
}

/// The metric under binding set `index`.
pub fn elaborate_exact(spec: &SurfaceSpec, index: u32) -> Result<Metric<ExactScalar>, DslError> {
    let b = bindings(spec, index)?;
    build_metric(spec, |e| eval_exact(spec, &b, e))
}

fn node(kind: ExprKind) -> Expr {
    Expr::new(kind, Pos::default())
}

fn mul(a: Option<Expr>, b: Expr) -> Expr {
    match a {
        None => b,
        Some(a) => node(ExprKind::Mul(Box::new(a), Box::new(b))),
    }
}

fn pow(base: Expr, e: i32) -> Expr {
    if e == 1 {
        base
    } else {
        node(ExprKind::Pow(Box::new(base), e))
    }
}

/// Writes a symbolic element back as an expression over the spec's names.
pub fn to_expr(spec: &SurfaceSpec, s: &SymScalar) -> Expr {
    let mut sum: Option<Expr> = None;
    for ((n, m, w), c) in s.terms() {
        let mut prod: Option<Expr> = None;
        let unit = c.abs().is_one();
        if !unit {
            prod = Some(node(ExprKind::Number(c.abs())));
        }
        if *n > 0 {
            prod = Some(mul(prod, pow(node(ExprKind::Hbar), *n as i32)));
        }
        for a in m.generators() {
            prod = Some(mul(prod, node(ExprKind::Ident(spec.odd[a as usize - 1].text.clone()))));
        }
        for (atom, e) in w.factors() {
            let base = if atom.coordinate {
                let k = atom.var.coordinate().unwrap_or(1) as usize;
                node(ExprKind::Ident(spec.even[k - 1].text.clone()))
            } else {
                node(ExprKind::Ident(atom.name.to_string()))
            };
            let base = if atom.deriv > 0 {
                let k = atom.var.coordinate().unwrap_or(1) as usize;
                node(ExprKind::Derivative(Box::new(base), spec.even[k - 1].text.clone(), atom.deriv))
            } else {
                base
            };
            prod = Some(mul(prod, pow(base, e)));
        }
        let prod = prod.unwrap_or_else(|| node(ExprKind::Number(Q::from_integer(BigInt::one()))));
        sum = Some(match (sum, c.is_negative()) {
            (None, false) => prod,
            (None, true) => negate_first(prod),
            (Some(acc), false) => node(ExprKind::Add(Box::new(acc), Box::new(prod))),
            (Some(acc), true) => node(ExprKind::Sub(Box::new(acc), Box::new(prod))),
        });
    }
    sum.unwrap_or_else(|| node(ExprKind::Number(Q::zero())))
}

/// `-a * b` parses as `(-a) * b`, so the sign goes on the leading factor.
fn negate_first(e: Expr) -> Expr {
    match e.kind {
        ExprKind::Mul(a, b) => node(ExprKind::Mul(Box::new(negate_first(*a)), b)),
        other => node(ExprKind::Neg(Box::new(node(other)))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_expr, ErrorKind};

    const SRC: &str = "\
[surface]
odd = \"xi\"
order = 2

[functions]
f = \"t2, positive\"
h = \"t1, positive\"
phi = \"hbar, positive\"

[params]
eps = \"even\"

[metric]
g11 = \"phi * f\"
g13 = \"eps * xi\"
g22 = \"h\"
g31 = \"eps * xi\"
g33 = \"1\"

[bindings.1]
f = \"1 + t2^2\"
h = \"2 + t1\"
phi = \"1 + hbar\"
eps = \"3\"
";

    #[test]
    fn symbolic_and_exact_agree_on_entries() {
        let spec = SurfaceSpec::parse(SRC).unwrap();
        let g = elaborate_symbolic(&spec).unwrap();
        assert!(!g.is_graded_symmetric());
        let x = elaborate_exact(&spec, 1).unwrap();
        assert!(x.right_inverse_residual().iter().flatten().all(|r| r.is_zero()));
    }

    #[test]
    fn odd_parameter_is_a_parity_error_on_g13() {
        let src = SRC.replace("eps = \"even\"", "eps = \"odd\"");
        let spec = SurfaceSpec::parse(&src).unwrap();
        let e = elaborate_symbolic(&spec).unwrap_err();
        assert_eq!(e.kind, ErrorKind::Parity);
        assert!(e.message.starts_with("g13"), "{e}");
        assert_eq!(e.pos.line, 15);
    }

    #[test]
    fn to_expr_round_trips() {
        let spec = SurfaceSpec::parse(SRC).unwrap();
        for text in [
            "-1/2 * phi * d(f, t2, 1) * inv(h) + hbar * xi * f^2 - 3",
            "d(f, t2, 2) * h - eps * phi^-1",
            "0",
        ] {
            let e = parse_expr(text, Pos { line: 1, col: 1 }).unwrap();
            let s = eval_symbolic(&spec, &e).unwrap();
            let back = to_expr(&spec, &s);
            let reparsed = parse_expr(&back.to_string(), Pos { line: 1, col: 1 }).unwrap();
            assert_eq!(reparsed, back);
            assert_eq!(eval_symbolic(&spec, &back).unwrap(), s, "{back}");
        }
    }

    #[test]
    fn missing_binding_is_reported() {
        let src = SRC.replace("eps = \"3\"\n", "");
        let spec = SurfaceSpec::parse(&src).unwrap();
        let e = elaborate_exact(&spec, 1).unwrap_err();
        assert_eq!(e.kind, ErrorKind::Declaration);
        assert!(e.message.contains("eps"));
    }
}
