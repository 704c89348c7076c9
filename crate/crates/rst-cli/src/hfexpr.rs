//! Small prefix expression language over hereditarily finite sets.
//!
//! ```text
//! expr := {expr ...} | (expr) | NUMBER | OP expr...
//! ```
//!
//! Unary: `tc un pw splus sminus sigma succ ordinals-in stage ord
//! transitive? ordinal? card rank`. Binary: `pair opair cup cap diff
//! prod mem sub eq`. `stage` and `ord` take a number.

use std::fmt;

use rst::hfset::{self, HfError, HfSet};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Set(HfSet),
    Bool(bool),
    Nat(usize),
}

impl Value {
    #[must_use]
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Set(_) => "set",
            Value::Bool(_) => "bool",
            Value::Nat(_) => "number",
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Set(s) => write!(f, "{s}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Nat(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("syntax: {0}")]
    Syntax(String),
    #[error("type: {0}")]
    Type(String),
    #[error("{0}")]
    Hf(#[from] HfError),
}

impl ExprError {
    /// Input errors, as opposed to evaluation limits.
    #[must_use]
    pub fn is_input(&self) -> bool {
        !matches!(self, ExprError::Hf(HfError::CapExceeded { .. }))
    }
}

fn lex(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in s.chars() {
        if "{}()".contains(c) || c.is_whitespace() {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            if !c.is_whitespace() {
                out.push(c.to_string());
            }
        } else {
            cur.push(c);
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

struct Parser {
    toks: Vec<String>,
    at: usize,
    cap: usize,
}

fn arity(op: &str) -> Option<usize> {
    Some(match op {
        "tc" | "un" | "pw" | "splus" | "sminus" | "sigma" | "succ" | "ordinals-in" | "stage" | "ord" | "transitive?"
        | "ordinal?" | "card" | "rank" => 1,
        "pair" | "opair" | "cup" | "cap" | "diff" | "prod" | "mem" | "sub" | "eq" => 2,
        _ => return None,
    })
}

impl Parser {
    fn next(&mut self) -> Result<String, ExprError> {
        let t = self.toks.get(self.at).cloned().ok_or_else(|| ExprError::Syntax("unexpected end of input".into()))?;
        self.at += 1;
        Ok(t)
    }

    fn set(v: Value) -> Result<HfSet, ExprError> {
        match v {
            Value::Set(s) => Ok(s),
            other => Err(ExprError::Type(format!("expected a set, got {other}"))),
        }
    }

    fn nat(v: Value) -> Result<usize, ExprError> {
        match v {
            Value::Nat(n) => Ok(n),
            other => Err(ExprError::Type(format!("expected a number, got {other}"))),
        }
    }

    fn expr(&mut self) -> Result<Value, ExprError> {
        let t = self.next()?;
        match t.as_str() {
            "{" => {
                let mut elems = Vec::new();
                while self.toks.get(self.at).map(String::as_str) != Some("}") {
                    let v = self.expr()?;
                    elems.push(Self::set(v)?);
                }
                self.at += 1;
                Ok(Value::Set(hfset::make_set(elems)))
            }
            "(" => {
                let v = self.expr()?;
                match self.next()?.as_str() {
                    ")" => Ok(v),
                    other => Err(ExprError::Syntax(format!("expected `)`, got `{other}`"))),
                }
            }
            "}" | ")" => Err(ExprError::Syntax(format!("unexpected `{t}`"))),
            _ if t.bytes().all(|b| b.is_ascii_digit()) => {
                t.parse().map(Value::Nat).map_err(|_| ExprError::Syntax(format!("bad number `{t}`")))
            }
            op => {
                let n = arity(op).ok_or_else(|| ExprError::Syntax(format!("unknown operation `{op}`")))?;
                let args = (0..n).map(|_| self.expr()).collect::<Result<Vec<_>, _>>()?;
                self.apply(op, args)
            }
        }
    }

    fn apply(&self, op: &str, mut args: Vec<Value>) -> Result<Value, ExprError> {
        let cap = self.cap;
        if matches!(op, "stage" | "ord") {
            let k = Self::nat(args.remove(0))?;
            return Ok(Value::Set(match op {
                "stage" => hfset::iterated_power(&hfset::empty(), k, cap)?,
                _ => hfset::von_neumann_ordinal(k),
            }));
        }
        let sets = args.into_iter().map(Self::set).collect::<Result<Vec<_>, _>>()?;
        let s = |r: HfSet| Ok(Value::Set(r));
        match (op, sets.as_slice()) {
            ("tc", [a]) => s(hfset::tc(a)),
            ("un", [a]) => s(hfset::union_of(a)),
            ("pw", [a]) => s(hfset::power_set_capped(a, cap)?),
            ("splus", [a]) => s(hfset::s_plus(a)),
            ("sminus", [a]) => s(hfset::s_minus(a)),
            ("sigma", [a]) => s(hfset::sigma(a)),
            ("succ", [a]) => s(hfset::successor(a)),
            ("ordinals-in", [a]) => s(hfset::ordinals_in(a)?),
            ("transitive?", [a]) => Ok(Value::Bool(hfset::is_transitive(a))),
            ("ordinal?", [a]) => Ok(Value::Bool(hfset::is_ordinal(a))),
            ("card", [a]) => Ok(Value::Nat(a.len())),
            ("rank", [a]) => Ok(Value::Nat(a.rank() as usize)),
            ("pair", [a, b]) => s(hfset::sigma2(a, b)),
            ("opair", [a, b]) => s(hfset::ordered_pair(a, b)),
            ("cup", [a, b]) => s(hfset::binary_union(a, b)),
            ("cap", [a, b]) => s(hfset::binary_intersection(a, b)),
            ("diff", [a, b]) => s(hfset::difference(a, b)),
            ("prod", [a, b]) => s(hfset::cartesian_product(a, b)),
            ("mem", [a, b]) => Ok(Value::Bool(hfset::member(a, b))),
            ("sub", [a, b]) => Ok(Value::Bool(hfset::subset(a, b))),
            ("eq", [a, b]) => Ok(Value::Bool(a == b)),
            _ => Err(ExprError::Syntax(format!("bad use of `{op}`"))),
        }
    }
}

/// Evaluate an expression; power sets are capped at `cap` elements.
///
/// # Errors
/// Syntax and type errors, or a cap overflow.
pub fn evaluate(text: &str, cap: usize) -> Result<Value, ExprError> {
    let mut p = Parser { toks: lex(text), at: 0, cap };
    let v = p.expr()?;
    if p.at != p.toks.len() {
        return Err(ExprError::Syntax(format!("trailing input `{}`", p.toks[p.at..].join(" "))));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str) -> String {
        evaluate(s, hfset::DEFAULT_CAP).unwrap().to_string()
    }

    #[test]
    fn literals_and_operations() {
        assert_eq!(ev("{}"), "{}");
        assert_eq!(ev("tc {{{}}}"), "{{} {{}}}");
        assert_eq!(ev("sminus (splus {{}})"), "{{}}");
        assert_eq!(ev("card stage(4)"), "16");
        assert_eq!(ev("ordinals-in stage(4)"), ev("ord 4"));
        assert_eq!(ev("mem {} {{}}"), "true");
        assert_eq!(ev("sub {{}} {}"), "false");
        assert_eq!(ev("pair {} {{}}"), "{{} {{}}}");
        assert_eq!(ev("{(un {{{}}}) {}}"), "{{} {{}}}");
    }

    #[test]
    fn errors() {
        assert!(matches!(evaluate("tc", 10), Err(ExprError::Syntax(_))));
        assert!(matches!(evaluate("frob {}", 10), Err(ExprError::Syntax(_))));
        assert!(matches!(evaluate("card 3", 10), Err(ExprError::Type(_))));
        assert!(matches!(evaluate("{} {}", 10), Err(ExprError::Syntax(_))));
        let e = evaluate("stage 6", 1 << 17).unwrap_err();
        assert!(!e.is_input());
    }
}
