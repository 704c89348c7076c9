//! Text formats for theories and proofs.
//!
//! Theory files have four optional sections:
//!
//! ```text
//! [extends]
//! rst_ext
//! [signature]
//! const c
//! func lam 1
//! pred phi 2
//! [schemas]
//! +A5ext
//! -A6
//! [axioms]
//! name: <formula>
//! hyp name: <formula>
//! ```
//!
//! `const` and `func` add symbols without definitions; `pred` adds an
//! uninterpreted predicate. Proof files hold one step per line,
//! `N. <formula> ; <justification>`. `#` starts a comment.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::kernel::{match_instance, Justification, Proof, Step, DERIVED_RULES};
use crate::schemas::{SchemaId, Theory};
use crate::syntax::{parse_formula, parse_term, parse_variable, render_formula, Formula};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScriptError {
    /// 1-based line number; 0 for whole-file errors.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ScriptError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl core::error::Error for ScriptError {}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ScriptError> {
    Err(ScriptError { line, message: message.into() })
}

fn strip_comment(l: &str) -> &str {
    l.split('#').next().unwrap_or("").trim()
}

/// Built-in theory by name: `empty`, `rst`, `rst_ext` (or `rst-ext`).
#[must_use]
pub fn builtin_theory(name: &str) -> Option<Theory> {
    match name {
        "empty" => Some(Theory::empty()),
        "rst" => Some(Theory::rst()),
        "rst_ext" | "rst-ext" => Some(Theory::rst_ext()),
        _ => None,
    }
}

/// Parse a theory file.
///
/// # Errors
/// Unknown section, base theory or schema; malformed lines; formulas
/// outside the signature.
pub fn parse_theory(text: &str) -> Result<Theory, ScriptError> {
    let mut th: Option<Theory> = None;
    let mut section = "";
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let l = strip_comment(raw);
        if l.is_empty() {
            continue;
        }
        if let Some(s) = l.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = match s {
                "extends" | "signature" | "schemas" | "axioms" => s,
                _ => return err(line, format!("unknown section [{s}]")),
            };
            if section != "extends" && th.is_none() {
                th = Some(Theory::empty());
            }
            continue;
        }
        match section {
            "extends" => {
                if th.is_some() {
                    return err(line, "[extends] must come first and name one theory");
                }
                th = Some(builtin_theory(l).ok_or(()).or_else(|()| err(line, format!("unknown theory `{l}`")))?);
            }
            "signature" => {
                let t = th.as_mut().expect("set");
                let w: Vec<&str> = l.split_whitespace().collect();
                let arity = |s: &str| s.parse::<usize>().ok();
                let r = match w.as_slice() {
                    ["const", c] => t.extend_with_constant(c),
                    ["func", f, a] => match arity(a) {
                        Some(a) => t.extend_with_function(f, a),
                        None => return err(line, format!("bad arity `{a}`")),
                    },
                    ["pred", p, a] => match arity(a) {
                        Some(a) => {
                            let mut t2 = t.clone();
                            t2.signature.add_predicate(p, a).map(|()| t2).map_err(Into::into)
                        }
                        None => return err(line, format!("bad arity `{a}`")),
                    },
                    _ => return err(line, format!("bad signature line `{l}`")),
                };
                *t = r.or_else(|e| err(line, e.to_string()))?;
            }
            "schemas" => {
                let t = th.as_mut().expect("set");
                match l.split_whitespace().collect::<Vec<_>>().as_slice() {
                    ["sf", "on"] => t.sf = true,
                    ["sf", "off"] => t.sf = false,
                    [s] if s.starts_with('+') || s.starts_with('-') => {
                        let id = SchemaId::parse(&s[1..])
                            .filter(|i| !matches!(i, SchemaId::Def(_)))
                            .ok_or(())
                            .or_else(|()| err(line, format!("unknown schema `{}`", &s[1..])))?;
                        *t = t.with_schema(id, s.starts_with('+'));
                    }
                    _ => return err(line, format!("bad schema line `{l}`")),
                }
            }
            "axioms" => {
                let t = th.as_mut().expect("set");
                let (head, body) = l.split_once(':').ok_or(()).or_else(|()| err(line, "expected `name: formula`"))?;
                let (hyp, name) = match head.split_whitespace().collect::<Vec<_>>().as_slice() {
                    ["hyp", name] => (true, *name),
                    [name] => (false, *name),
                    _ => return err(line, format!("bad axiom name `{head}`")),
                };
                let f = parse_formula(body.trim(), &t.signature).or_else(|e| err(line, e.to_string()))?;
                let r = if hyp { t.extend_with_hypothesis(name, f) } else { t.extend_with_axiom(name, f) };
                *t = r.or_else(|e| err(line, e.to_string()))?;
            }
            _ => return err(line, "text before the first section"),
        }
    }
    th.ok_or(()).or_else(|()| err(0, "empty theory file"))
}

/// Render a theory relative to `rst_ext`, `rst` or `empty`, whichever it extends.
#[must_use]
pub fn render_theory(th: &Theory) -> String {
    let base = ["rst_ext", "rst", "empty"]
        .into_iter()
        .find(|b| {
            let t = builtin_theory(b).expect("builtin");
            th.chain.starts_with(&t.chain) && th.chain.len() == t.chain.len()
        })
        .unwrap_or("empty");
    let bt = builtin_theory(base).expect("builtin");
    let mut out = format!("[extends]\n{base}\n[signature]\n");
    for c in &th.signature.constants {
        if !bt.signature.constants.contains(c) {
            out.push_str(&format!("const {c}\n"));
        }
    }
    for (f, a) in &th.signature.functions {
        if !bt.signature.functions.contains_key(f) {
            out.push_str(&format!("func {f} {a}\n"));
        }
    }
    for (p, a) in &th.signature.predicates {
        if !bt.signature.predicates.contains_key(p) {
            out.push_str(&format!("pred {p} {a}\n"));
        }
    }
    out.push_str("[schemas]\n");
    for id in th.active.difference(&bt.active) {
        out.push_str(&format!("+{id}\n"));
    }
    for id in bt.active.difference(&th.active) {
        out.push_str(&format!("-{id}\n"));
    }
    if th.sf != bt.sf {
        out.push_str(if th.sf { "sf on\n" } else { "sf off\n" });
    }
    out.push_str("[axioms]\n");
    for a in &th.basis {
        let h = if a.hypothesis { "hyp " } else { "" };
        out.push_str(&format!("{h}{}: {}\n", a.name, render_formula(&a.formula)));
    }
    out
}

/// Split on whitespace, keeping parenthesized groups together.
fn tokens(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0usize;
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            _ => {}
        }
        if c.is_whitespace() && depth == 0 {
            if !cur.is_empty() {
                out.push(core::mem::take(&mut cur));
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

/// Parse a justification for `formula`.
///
/// # Errors
/// Unknown keyword or rule, or malformed arguments.
pub fn parse_justification(text: &str, formula: &Formula, th: &Theory) -> Result<Justification, String> {
    let w = tokens(text);
    let num = |s: &str| s.parse::<usize>().map_err(|_| format!("`{s}` is not a step number"));
    let var = |s: &str| parse_variable(s).ok_or_else(|| format!("`{s}` is not a variable"));
    let term = |s: &str| parse_term(s, &th.signature).map_err(|e| e.to_string());
    let ws: Vec<&str> = w.iter().map(String::as_str).collect();
    Ok(match ws.as_slice() {
        ["taut"] => Justification::Taut,
        ["ax-subst"] => {
            let Formula::Imp(a, r) = formula else { return Err("not an implication".into()) };
            let Formula::All(x, g) = &**a else { return Err("antecedent is not universal".into()) };
            let t = match_instance(g, *x, r).ok_or("consequent is not an instance")?;
            Justification::AxSubst(*x, t)
        }
        ["ax-subst", x, t] => Justification::AxSubst(var(x)?, term(t)?),
        ["ax-qdist"] => Justification::AxQDist,
        ["ax-exdef"] => Justification::AxExDef,
        ["ax-eqrefl"] => Justification::AxEqRefl,
        ["ax-eqcongr"] => Justification::AxEqCongr,
        ["schema"] => Justification::Schema(None),
        ["schema", id] => Justification::Schema(Some(SchemaId::parse(id).ok_or_else(|| format!("unknown schema `{id}`"))?)),
        ["basis", n] => Justification::Basis((*n).to_string()),
        ["mp", i, j] => Justification::MP(num(i)?, num(j)?),
        ["gen", x, i] => Justification::Gen(var(x)?, num(i)?),
        ["subst", i, x, t] => Justification::Subst(num(i)?, var(x)?, term(t)?),
        ["rename", i, a, b] => Justification::Rename(num(i)?, var(a)?, var(b)?),
        [rule, rest @ ..] if DERIVED_RULES.iter().any(|(n, _)| n == rule) => {
            let k = rest.iter().rposition(|s| s.parse::<usize>().is_err()).map_or(0, |p| p + 1);
            let args = rest[..k].iter().map(|s| (*s).to_string()).collect();
            let premises = rest[k..].iter().map(|s| num(s)).collect::<Result<_, _>>()?;
            Justification::Derived { rule: (*rule).to_string(), args, premises }
        }
        [] => return Err("missing justification".into()),
        [k, ..] => return Err(format!("unknown justification `{k}`")),
    })
}

/// Parse a proof file against a theory.
///
/// # Errors
/// Malformed lines, misnumbered steps, bad formulas or justifications.
pub fn parse_proof(text: &str, th: &Theory) -> Result<Proof, ScriptError> {
    let mut p = Proof::new(th.clone());
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let l = strip_comment(raw);
        if l.is_empty() {
            continue;
        }
        let (num, rest) = l.split_once('.').ok_or(()).or_else(|()| err(line, "expected `N. formula ; justification`"))?;
        let k: usize = num.trim().parse().or_else(|_| err(line, format!("bad step number `{num}`")))?;
        if k != p.steps.len() + 1 {
            return err(line, format!("step {k} out of sequence"));
        }
        let (ftext, jtext) = rest.split_once(';').ok_or(()).or_else(|()| err(line, "missing `;`"))?;
        let f = parse_formula(ftext.trim(), &th.signature).or_else(|e| err(line, e.to_string()))?;
        let j = parse_justification(jtext.trim(), &f, th).or_else(|e| err(line, e))?;
        p.steps.push(Step::new(f, j));
    }
    Ok(p)
}

/// Render a proof in the proof-file format.
#[must_use]
pub fn render_proof(p: &Proof) -> String {
    let mut out = String::new();
    for (n, s) in p.steps.iter().enumerate() {
        out.push_str(&format!("{}. {} ; {}\n", n + 1, render_formula(&s.formula), s.just));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::check_proof;
    use crate::syntax::Variable;

    #[test]
    fn theory_sections() {
        let t = parse_theory(
            "# scratch\n[extends]\nrst_ext\n[signature]\nconst c\nfunc lam 1\npred phi 2\n[schemas]\n+A5ext\n-A6\n[axioms]\nk: mem c O\nhyp h: ex x1 mem x1 c\n",
        )
        .unwrap();
        assert!(t.signature.constants.contains("c"));
        assert!(t.scratch.contains("lam"));
        assert!(!t.scratch.contains("phi"));
        assert!(t.is_active(&SchemaId::A5Ext));
        assert!(!t.is_active(&SchemaId::A6));
        assert!(t.axiom("h").unwrap().hypothesis);
        assert!(!t.axiom("k").unwrap().hypothesis);
        let again = parse_theory(&render_theory(&t)).unwrap();
        assert_eq!(again, t);
    }

    #[test]
    fn theory_errors() {
        assert_eq!(parse_theory("[extends]\nzf\n").unwrap_err().line, 2);
        assert_eq!(parse_theory("[axioms]\nk: mem c x1\n").unwrap_err().line, 2);
        assert_eq!(parse_theory("[sig]\n").unwrap_err().line, 1);
        assert!(parse_theory("[schemas]\n+A9\n").is_err());
        assert!(parse_theory("").is_err());
    }

    #[test]
    fn proof_round_trip() {
        let th = Theory::rst_ext();
        let text = "1. all x1 mem x1 pr(x2 x3) ; basis k\n2. imp all x1 mem x1 pr(x2 x3) mem pw(O) pr(x2 x3) ; ax-subst\n3. mem pw(O) pr(x2 x3) ; mp 1 2\n4. mem pw(O) pr(x4 x3) ; subst 3 x2 x4\n";
        let th = th.extend_with_axiom("k", parse_formula("all x1 mem x1 pr(x2 x3)", &th.signature).unwrap()).unwrap();
        let p = parse_proof(text, &th).unwrap();
        assert_eq!(p.steps[1].just, Justification::AxSubst(Variable::new(1), parse_term("pw(O)", &th.signature).unwrap()));
        assert!(check_proof(&p).ok);
        let q = parse_proof(&render_proof(&p), &th).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn derived_arguments() {
        let th = Theory::rst_ext();
        let f = parse_formula("eq x1 x1", &th.signature).unwrap();
        let j = parse_justification("generalize c x5 12", &f, &th).unwrap();
        assert_eq!(
            j,
            Justification::Derived { rule: "generalize".into(), args: alloc::vec!["c".into(), "x5".into()], premises: alloc::vec![12] }
        );
        let j = parse_justification("ex_intro pr(x1 x2)", &f, &th).unwrap();
        assert!(matches!(j, Justification::Derived { ref args, ref premises, .. } if args == &["pr(x1 x2)"] && premises.is_empty()));
        assert!(parse_justification("frobnicate 1", &f, &th).is_err());
        assert!(parse_justification("mp 1", &f, &th).is_err());
    }

    #[test]
    fn proof_errors() {
        let th = Theory::empty();
        assert_eq!(parse_proof("1. eq x1 x1 ; ax-eqrefl\n3. eq x1 x1 ; taut\n", &th).unwrap_err().line, 2);
        assert_eq!(parse_proof("1. eq x1 ; ax-eqrefl\n", &th).unwrap_err().line, 1);
        assert_eq!(parse_proof("1. eq x1 x1 ax-eqrefl\n", &th).unwrap_err().line, 1);
    }
}
