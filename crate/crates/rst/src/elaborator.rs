//! Elimination of defined symbols.
//!
//! A term symbol is removed innermost-first: an atom `A` containing
//! `f(a…)` becomes `ex u' and G(u', a…) A[u'/f(a…)]` with `u'` fresh. A
//! defined predicate atom is replaced by its instantiated definiens.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::schemas::{DefKind, Definition, Theory};
use crate::syntax::{fresh_var, substitute, Formula, SyntaxError, Term, Variable};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ElabError {
    Syntax(SyntaxError),
    UnknownSymbol(String),
}

impl fmt::Display for ElabError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElabError::Syntax(e) => write!(f, "{e}"),
            ElabError::UnknownSymbol(s) => write!(f, "symbol `{s}` has no definition"),
        }
    }
}

impl core::error::Error for ElabError {}

impl From<SyntaxError> for ElabError {
    fn from(e: SyntaxError) -> Self {
        ElabError::Syntax(e)
    }
}

/// Rename every variable of `d`'s defining formula apart from `avoid`:
/// parameters first, then `u`, then bound variables in binder order.
fn fresh_copy(d: &Definition, avoid: &mut BTreeSet<Variable>) -> (Vec<Variable>, Option<Variable>, Formula) {
    let mut map: BTreeMap<Variable, Variable> = BTreeMap::new();
    let mut take = |v: Variable, map: &mut BTreeMap<Variable, Variable>| {
        let f = fresh_var(avoid);
        avoid.insert(f);
        map.insert(v, f);
        f
    };
    let params: Vec<Variable> = d.params.iter().map(|p| take(*p, &mut map)).collect();
    let u = d.u.map(|u| take(u, &mut map));
    for b in binders(&d.body) {
        if !map.contains_key(&b) {
            take(b, &mut map);
        }
    }
    (params, u, rename_all(&d.body, &map))
}

fn binders(f: &Formula) -> Vec<Variable> {
    let mut out = Vec::new();
    fn go(f: &Formula, out: &mut Vec<Variable>) {
        if let Formula::All(x, _) | Formula::Ex(x, _) = f {
            out.push(*x);
        }
        f.children().into_iter().for_each(|c| go(c, out));
    }
    go(f, &mut out);
    out
}

fn rename_term(t: &Term, map: &BTreeMap<Variable, Variable>) -> Term {
    match t {
        Term::Var(v) => Term::Var(*map.get(v).unwrap_or(v)),
        Term::Const(_) => t.clone(),
        Term::App(g, args) => Term::App(g.clone(), args.iter().map(|a| rename_term(a, map)).collect()),
    }
}

fn rename_all(f: &Formula, map: &BTreeMap<Variable, Variable>) -> Formula {
    match f {
        Formula::Eq(a, b) => Formula::Eq(rename_term(a, map), rename_term(b, map)),
        Formula::Mem(a, b) => Formula::Mem(rename_term(a, map), rename_term(b, map)),
        Formula::Pred(p, args) => Formula::Pred(p.clone(), args.iter().map(|a| rename_term(a, map)).collect()),
        Formula::All(x, a) => Formula::all(*map.get(x).unwrap_or(x), rename_all(a, map)),
        Formula::Ex(x, a) => Formula::ex(*map.get(x).unwrap_or(x), rename_all(a, map)),
        _ => f.with_children(f.children().into_iter().map(|c| rename_all(c, map)).collect()),
    }
}

/// Instantiate `body` with parameters replaced by `args`, simultaneously.
fn instantiate(params: &[Variable], body: &Formula, args: &[Term]) -> Result<Formula, SyntaxError> {
    params.iter().zip(args).try_fold(body.clone(), |acc, (p, a)| substitute(&acc, *p, a))
}

/// An innermost occurrence of `sym` in `t`: an application whose arguments
/// do not mention `sym`.
fn innermost(t: &Term, sym: &str) -> Option<Term> {
    match t {
        Term::Var(_) => None,
        Term::Const(c) => (c == sym).then(|| t.clone()),
        Term::App(g, args) => args
            .iter()
            .find_map(|a| innermost(a, sym))
            .or_else(|| (g == sym).then(|| t.clone())),
    }
}

fn replace_term(t: &Term, target: &Term, by: &Term) -> Term {
    if t == target {
        return by.clone();
    }
    match t {
        Term::App(g, args) => Term::App(g.clone(), args.iter().map(|a| replace_term(a, target, by)).collect()),
        _ => t.clone(),
    }
}

fn replace_in_atom(a: &Formula, target: &Term, by: &Term) -> Formula {
    let r = |t: &Term| replace_term(t, target, by);
    match a {
        Formula::Eq(x, y) => Formula::Eq(r(x), r(y)),
        Formula::Mem(x, y) => Formula::Mem(r(x), r(y)),
        Formula::Pred(p, args) => Formula::Pred(p.clone(), args.iter().map(r).collect()),
        _ => a.clone(),
    }
}

fn atom_innermost(a: &Formula, sym: &str) -> Option<Term> {
    a.atom_args()?.into_iter().find_map(|t| innermost(t, sym))
}

/// Eliminate a defined constant or function symbol.
///
/// # Errors
/// Malformed input.
pub fn eliminate_term_symbol(f: &Formula, d: &Definition) -> Result<Formula, ElabError> {
    let mut work = f.clone();
    loop {
        let Some(pos) = find_atom(&work, &|a| atom_innermost(a, &d.symbol).is_some()) else {
            return Ok(work);
        };
        let atom = work.subformula_at(&pos).expect("position").clone();
        let occ = atom_innermost(&atom, &d.symbol).expect("occurrence");
        let mut avoid = work.all_vars();
        let (params, u, body) = fresh_copy(d, &mut avoid);
        let u = u.ok_or_else(|| ElabError::UnknownSymbol(d.symbol.clone()))?;
        let args: Vec<Term> = match &occ {
            Term::App(_, args) => args.clone(),
            _ => Vec::new(),
        };
        let g = instantiate(&params, &body, &args)?;
        let replaced = replace_in_atom(&atom, &occ, &Term::Var(u));
        let new = Formula::ex(u, Formula::and(g, replaced));
        work = work.replace_at(&pos, new).expect("position");
    }
}

/// Eliminate a defined predicate.
///
/// # Errors
/// Malformed input.
pub fn eliminate_predicate(f: &Formula, d: &Definition) -> Result<Formula, ElabError> {
    let mut work = f.clone();
    loop {
        let pos = find_atom(&work, &|a| matches!(a, Formula::Pred(p, _) if *p == d.symbol));
        let Some(pos) = pos else {
            return Ok(work);
        };
        let Some(Formula::Pred(_, args)) = work.subformula_at(&pos).cloned() else {
            unreachable!()
        };
        let mut avoid = work.all_vars();
        // Bound variables of the definiens must avoid the arguments' variables.
        let mut map = BTreeMap::new();
        for b in binders(&d.body) {
            map.entry(b).or_insert_with(|| {
                let v = fresh_var(&avoid);
                avoid.insert(v);
                v
            });
        }
        let args: BTreeMap<Variable, Term> = d.params.iter().copied().zip(args).collect();
        let g = subst_simultaneous(&d.body, &map, &args);
        work = work.replace_at(&pos, g).expect("position");
    }
}

fn subst_term(t: &Term, bound: &BTreeMap<Variable, Variable>, args: &BTreeMap<Variable, Term>) -> Term {
    match t {
        Term::Var(v) => args.get(v).cloned().unwrap_or_else(|| Term::Var(*bound.get(v).unwrap_or(v))),
        Term::Const(_) => t.clone(),
        Term::App(g, a) => Term::App(g.clone(), a.iter().map(|x| subst_term(x, bound, args)).collect()),
    }
}

/// Rename binders by `bound` and replace free parameters by `args` in one
/// pass. The renamed binders must avoid every variable of `args`.
fn subst_simultaneous(f: &Formula, bound: &BTreeMap<Variable, Variable>, args: &BTreeMap<Variable, Term>) -> Formula {
    let r = |t: &Term| subst_term(t, bound, args);
    match f {
        Formula::Eq(a, b) => Formula::Eq(r(a), r(b)),
        Formula::Mem(a, b) => Formula::Mem(r(a), r(b)),
        Formula::Pred(p, a) => Formula::Pred(p.clone(), a.iter().map(r).collect()),
        Formula::All(x, a) | Formula::Ex(x, a) => {
            let mut inner = args.clone();
            inner.remove(x);
            let nx = *bound.get(x).unwrap_or(x);
            let body = subst_simultaneous(a, bound, &inner);
            if matches!(f, Formula::All(..)) {
                Formula::all(nx, body)
            } else {
                Formula::ex(nx, body)
            }
        }
        _ => f.with_children(f.children().into_iter().map(|c| subst_simultaneous(c, bound, args)).collect()),
    }
}

fn find_atom(f: &Formula, pred: &dyn Fn(&Formula) -> bool) -> Option<Vec<usize>> {
    if f.is_atomic() {
        return pred(f).then(Vec::new);
    }
    for (i, c) in f.children().into_iter().enumerate() {
        if let Some(mut p) = find_atom(c, pred) {
            p.insert(0, i);
            return Some(p);
        }
    }
    None
}

/// Remove every defined symbol of `theory`'s chain: term symbols in reverse
/// chain order, then predicates.
///
/// # Errors
/// Symbols outside the chain, or malformed input.
pub fn elaborate_to_base(theory: &Theory, f: &Formula) -> Result<Formula, ElabError> {
    if let Some(s) = f.symbols().into_iter().find(|s| theory.definition(s).is_none()) {
        return Err(ElabError::UnknownSymbol(s));
    }
    let mut work = f.clone();
    for d in theory.chain.iter().rev().filter(|d| d.kind != DefKind::Predicate) {
        work = eliminate_term_symbol(&work, d)?;
    }
    for d in theory.chain.iter().rev().filter(|d| d.kind == DefKind::Predicate) {
        work = eliminate_predicate(&work, d)?;
    }
    Ok(work)
}

/// Name of the symbol table entry for diagnostics.
#[must_use]
pub fn describe(d: &Definition) -> String {
    let kind = match d.kind {
        DefKind::Predicate => "predicate",
        DefKind::Constant => "constant",
        DefKind::Function => "function",
    };
    let mut s = String::from(kind);
    s.push(' ');
    s.push_str(&d.symbol);
    s.push_str(&d.arity().to_string());
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, Signature};

    fn p(s: &str) -> Formula {
        parse_formula(s, &Signature::rst_ext()).unwrap()
    }

    fn elab(s: &str) -> String {
        elaborate_to_base(&Theory::rst_ext(), &p(s)).unwrap().to_string()
    }

    #[test]
    fn goldens() {
        assert_eq!(elab("mem O x1"), "ex x2 and all x3 not mem x3 x2 mem x2 x1");
        assert_eq!(
            elab("eq x1 pw(x2)"),
            "ex x4 and all x5 iff mem x5 x4 all x6 imp mem x6 x5 mem x6 x2 eq x1 x4"
        );
        assert_eq!(elab("sub x1 x2"), "all x3 imp mem x3 x1 mem x3 x2");
    }

    #[test]
    fn base_is_identity() {
        for s in ["mem x1 x2", "all x3 imp mem x3 x1 mem x3 x2", "ex x1 not eq x1 x1"] {
            assert_eq!(elab(s), s);
        }
    }

    #[test]
    fn nested_terms_are_removed() {
        for s in ["mem x1 un(pr(x1 sg(x1)))", "sub pr(x1 x2) pw(O)", "eq pw(pw(x1)) un(x1)"] {
            let out = elaborate_to_base(&Theory::rst_ext(), &p(s)).unwrap();
            assert!(out.is_base(), "{out}");
            assert!(out.free_vars().is_subset(&p(s).free_vars()));
        }
    }

    #[test]
    fn unknown_symbol() {
        let mut sig = Signature::rst_ext();
        sig.add_constant("c").unwrap();
        let f = parse_formula("mem c x1", &sig).unwrap();
        assert_eq!(elaborate_to_base(&Theory::rst_ext(), &f), Err(ElabError::UnknownSymbol("c".into())));
    }
}
