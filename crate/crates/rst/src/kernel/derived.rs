//! Derived rules: each expands into primitive steps on the trace.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::logic::{match_instance, R};
use super::{check_step, Prim, Proof, Trace};
use crate::schemas::{match_schema, template, SchemaId, Theory};
use crate::syntax::{fresh_var, parse_term, parse_variable, Formula, Term, Variable};

/// Name and summary of every derived rule.
pub const DERIVED_RULES: &[(&str, &str)] = &[
    ("prop", "tautological consequence of the premises"),
    ("all_mono", "from imp A B: imp all y A all y B"),
    ("ex_mono", "from imp A B: imp ex y A ex y B"),
    ("ex_all_mono", "from imp A B: imp ex u all y A ex u all y B"),
    ("all_imp", "imp all y imp A B imp all y A all y B"),
    ("all_imp_ex", "imp all y imp A B imp ex y A ex y B"),
    ("all_and", "iff all y and A B and all y A all y B"),
    ("ex_elim", "from all x imp A B, x not free in B: imp ex x A B"),
    ("all_intro", "from all y imp A B, y not free in A: imp A all y B"),
    ("ex_pull", "from ex u imp A B, u not free in A: imp A ex u B"),
    ("ex_intro", "imp F[t/u] ex u F"),
    ("inst", "from imp A all z B: imp A B[t/z]"),
    ("spec", "from all x G: G[t/x]"),
    ("equiv", "from iff F F': iff C C' with F replaced by F'"),
    ("replace", "from iff F F' and C: C with F replaced by F'"),
    ("alpha", "iff A A' for alpha-equivalent formulas, or A' from A"),
    ("ext_iff", "iff all y iff mem y u mem y v eq u v"),
    ("subset", "subset axiom with only u not free in F"),
    ("const_erw", "subset axiom whose payload mentions new constants"),
    ("comprehend", "from ex u all y imp F mem y u: ex u all y iff mem y u F"),
    ("stronger_exists", "from ex u F and all u imp F G: ex u and F G"),
    ("deduction", "deduction NAME i: discharge hypothesis NAME from step i"),
    ("generalize", "generalize c x i: replace constant c by variable x in step i"),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonotoneMode {
    All,
    Ex,
    ExAll,
}

/// Mnemonic re-export of the rule table row type.
pub type DerivedRule = (&'static str, &'static str);

fn want(prem: &[usize], n: usize, rule: &str) -> Result<(), String> {
    if prem.len() == n {
        Ok(())
    } else {
        Err(format!("rule `{rule}` takes {n} premise(s), found {}", prem.len()))
    }
}

fn want_args(args: &[String], n: usize, rule: &str) -> Result<(), String> {
    if args.len() == n {
        Ok(())
    } else {
        Err(format!("rule `{rule}` takes {n} argument(s), found {}", args.len()))
    }
}

fn imp_parts(f: &Formula) -> Result<(&Formula, &Formula), String> {
    match f {
        Formula::Imp(a, b) => Ok((a, b)),
        _ => Err("stated formula is not an implication".into()),
    }
}

fn iff_parts(f: &Formula) -> Result<(&Formula, &Formula), String> {
    match f {
        Formula::Iff(a, b) => Ok((a, b)),
        _ => Err("stated formula is not a biconditional".into()),
    }
}

fn binder(f: &Formula) -> Result<(Variable, &Formula), String> {
    match f {
        Formula::All(x, a) | Formula::Ex(x, a) => Ok((*x, a)),
        _ => Err(format!("expected a quantified formula, found {f}")),
    }
}

fn variable(s: &str) -> Result<Variable, String> {
    parse_variable(s).ok_or_else(|| format!("`{s}` is not a variable"))
}

/// Positions where `c` has `f` and `c2` has `f2`, such that replacing all
/// of them turns `c` into `c2`.
fn replacement_positions(c: &Formula, c2: &Formula, f: &Formula, f2: &Formula) -> Option<Vec<Vec<usize>>> {
    fn go(c: &Formula, c2: &Formula, f: &Formula, f2: &Formula, at: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) -> bool {
        if c == c2 {
            return true;
        }
        if c == f && c2 == f2 {
            out.push(at.clone());
            return true;
        }
        if core::mem::discriminant(c) != core::mem::discriminant(c2) || c.is_atomic() {
            return false;
        }
        if let (Formula::All(x, _) | Formula::Ex(x, _), Formula::All(y, _) | Formula::Ex(y, _)) = (c, c2) {
            if x != y {
                return false;
            }
        }
        for (k, (p, q)) in c.children().into_iter().zip(c2.children()).enumerate() {
            at.push(k);
            let ok = go(p, q, f, f2, at, out);
            at.pop();
            if !ok {
                return false;
            }
        }
        true
    }
    let mut out = Vec::new();
    go(c, c2, f, f2, &mut Vec::new(), &mut out).then_some(out)
}

/// Chain of replacements turning the formula at `j` into `target`.
fn replace_into(tr: &mut Trace<'_>, i: usize, j: usize, target: &Formula) -> R {
    let (f, f2) = iff_parts(tr.formula(i)).map(|(a, b)| (a.clone(), b.clone()))?;
    let c = tr.formula(j).clone();
    let (e, ps) = if let Some(ps) = replacement_positions(&c, target, &f, &f2) {
        (i, ps)
    } else if let Some(ps) = replacement_positions(&c, target, &f2, &f) {
        (tr.prop(&[i], Formula::iff(f2.clone(), f.clone()))?, ps)
    } else {
        return Err("target is not the context with the equivalence applied".into());
    };
    let mut cur = j;
    for p in ps {
        cur = tr.replace_at_pos(e, cur, &p)?;
    }
    Ok(cur)
}

/// Expand a derived rule on the trace; returns the index of its conclusion.
pub(crate) fn apply(tr: &mut Trace<'_>, rule: &str, args: &[String], prem: &[usize], stated: &Formula) -> R {
    let sig = tr.theory.signature.clone();
    match rule {
        "prop" => tr.prop(prem, stated.clone()),
        "all_mono" | "ex_mono" | "ex_all_mono" => {
            want(prem, 1, rule)?;
            let (l, _) = imp_parts(stated)?;
            let mode = match rule {
                "all_mono" => MonotoneMode::All,
                "ex_mono" => MonotoneMode::Ex,
                _ => MonotoneMode::ExAll,
            };
            let (u, inner) = binder(l)?;
            let vars = match mode {
                MonotoneMode::ExAll => alloc::vec![u, binder(inner)?.0],
                _ => alloc::vec![u],
            };
            monotone(tr, prem[0], mode, &vars)
        }
        "all_imp" | "all_imp_ex" => {
            want(prem, 0, rule)?;
            let (l, _) = imp_parts(stated)?;
            let (x, body) = binder(l)?;
            let (a, b) = imp_parts(body)?;
            let (a, b) = (a.clone(), b.clone());
            if rule == "all_imp" {
                tr.all_imp(x, &a, &b)
            } else {
                tr.all_imp_ex(x, &a, &b)
            }
        }
        "all_and" => {
            want(prem, 0, rule)?;
            let (l, _) = iff_parts(stated)?;
            let (x, body) = binder(l)?;
            match body {
                Formula::And(a, b) => {
                    let (a, b) = ((**a).clone(), (**b).clone());
                    tr.all_and(x, &a, &b)
                }
                _ => Err("expected a conjunction under the quantifier".into()),
            }
        }
        "ex_elim" => {
            want(prem, 1, rule)?;
            tr.ex_elim(prem[0])
        }
        "all_intro" => {
            want(prem, 1, rule)?;
            tr.all_intro(prem[0])
        }
        "ex_pull" => {
            want(prem, 1, rule)?;
            tr.ex_pull(prem[0])
        }
        "ex_intro" => {
            want(prem, 0, rule)?;
            let (r, e) = imp_parts(stated)?;
            let Formula::Ex(x, f) = e else { return Err("expected an existential consequent".into()) };
            let t = match args {
                [] => match_instance(f, *x, r).ok_or("antecedent is not an instance of the body")?,
                [t] => parse_term(t, &sig).map_err(|e| e.to_string())?,
                _ => return Err("rule `ex_intro` takes at most one term".into()),
            };
            let f = (**f).clone();
            tr.ex_intro(*x, &f, &t)
        }
        "inst" => {
            want(prem, 1, rule)?;
            let (_, r) = imp_parts(stated)?;
            let pf = tr.formula(prem[0]).clone();
            let (_, all) = imp_parts(&pf).map_err(|_| "premise is not an implication".to_string())?;
            let Formula::All(z, b) = all else { return Err("premise consequent is not universal".into()) };
            let t = match_instance(b, *z, r).ok_or("stated consequent is not an instance")?;
            tr.inst_under(prem[0], &t)
        }
        "spec" => {
            want(prem, 1, rule)?;
            let pf = tr.formula(prem[0]).clone();
            let Formula::All(x, g) = &pf else { return Err("premise is not universal".into()) };
            let t = match args {
                [] => match_instance(g, *x, stated).ok_or("stated formula is not an instance")?,
                [t] => parse_term(t, &sig).map_err(|e| e.to_string())?,
                _ => return Err("rule `spec` takes at most one term".into()),
            };
            tr.spec(prem[0], &t)
        }
        "equiv" => {
            want(prem, 1, rule)?;
            let (c, c2) = iff_parts(stated)?;
            let (c, c2) = (c.clone(), c2.clone());
            let r = tr.taut(Formula::iff(c.clone(), c.clone()))?;
            let done = replace_into(tr, prem[0], r, &Formula::iff(c.clone(), c2))?;
            Ok(done)
        }
        "replace" => {
            want(prem, 2, rule)?;
            replace_into(tr, prem[0], prem[1], stated)
        }
        "alpha" => match prem {
            [] => {
                let (a, b) = iff_parts(stated)?;
                let (a, b) = (a.clone(), b.clone());
                tr.alpha_iff(&a, &b)
            }
            [i] => {
                let a = tr.formula(*i).clone();
                let j = tr.alpha_iff(&a, stated)?;
                tr.prop(&[*i, j], stated.clone())
            }
            _ => Err("rule `alpha` takes at most one premise".into()),
        },
        "ext_iff" => {
            want(prem, 0, rule)?;
            let (l, _) = iff_parts(stated)?;
            let (y, body) = binder(l)?;
            match body {
                Formula::Iff(a, b) => match (&**a, &**b) {
                    (Formula::Mem(_, Term::Var(u)), Formula::Mem(_, Term::Var(v))) => tr.ext_iff(y, *u, *v),
                    _ => Err("unexpected shape".into()),
                },
                _ => Err("unexpected shape".into()),
            }
        }
        "subset" => {
            want(prem, 0, rule)?;
            let (x, y, u, f) = a2_parts(stated)?;
            tr.subset_instance(x, y, u, &f)
        }
        "const_erw" => {
            want(prem, 0, rule)?;
            const_erw(tr, stated)
        }
        "comprehend" => {
            want(prem, 1, rule)?;
            tr.comprehend(prem[0])
        }
        "stronger_exists" => {
            want(prem, 2, rule)?;
            tr.stronger_exists(prem[0], prem[1])
        }
        "deduction" => {
            want(prem, 1, rule)?;
            want_args(args, 1, rule)?;
            deduction(tr, &args[0], prem[0])
        }
        "generalize" => {
            want(prem, 1, rule)?;
            want_args(args, 2, rule)?;
            generalize(tr, &args[0], variable(&args[1])?, prem[0])
        }
        _ => Err(format!("unknown rule `{rule}`")),
    }
}

/// The tuple and payload of a formula shaped like the subset axiom.
fn a2_parts(f: &Formula) -> Result<(Variable, Variable, Variable, Formula), String> {
    let t = template(&SchemaId::A2).expect("A2");
    let m = match_schema(&SchemaId::A2, &t, f).ok_or("not shaped like the subset axiom")?;
    let [u, x, y] = m.tuple[..] else { return Err("unexpected tuple".into()) };
    Ok((x, y, u, m.payload.expect("payload")))
}

fn monotone(tr: &mut Trace<'_>, i: usize, mode: MonotoneMode, vars: &[Variable]) -> R {
    match (mode, vars) {
        (MonotoneMode::All, [y]) => tr.mono_all(i, *y),
        (MonotoneMode::Ex, [y]) => tr.mono_ex(i, *y),
        (MonotoneMode::ExAll, [u, y]) => {
            if u == y {
                return Err("variables must be distinct".into());
            }
            let a = tr.mono_all(i, *y)?;
            tr.mono_ex(a, *u)
        }
        _ => Err("wrong number of variables".into()),
    }
}

fn const_erw(tr: &mut Trace<'_>, goal: &Formula) -> R {
    let t = template(&SchemaId::A2).expect("A2");
    let m = match_schema(&SchemaId::A2, &t, goal).ok_or("not a subset axiom")?;
    if m.relaxed {
        return Err("payload violates the variable condition".into());
    }
    let payload = m.payload.expect("payload");
    let consts: Vec<String> = payload
        .symbols()
        .into_iter()
        .filter(|s| tr.theory.scratch.contains(s) && tr.theory.signature.constants.contains(s))
        .collect();
    if consts.is_empty() {
        return Err("payload mentions no new constant".into());
    }
    let mut avoid = goal.all_vars();
    let mut f = payload.clone();
    let mut fresh = Vec::new();
    for c in &consts {
        let v = fresh_var(&avoid);
        avoid.insert(v);
        f = f.replace_const_raw(c, &Term::Var(v));
        fresh.push((v, c.clone()));
    }
    let inst = tr.theory.instantiate(&SchemaId::A2, &m.tuple, Some(&f)).map_err(|e| e.to_string())?;
    let mut i = tr.push(inst, Prim::Schema(SchemaId::A2))?;
    for (v, c) in fresh {
        i = tr.subst(i, v, &Term::Const(c))?;
    }
    Ok(i)
}

fn deduction(tr: &mut Trace<'_>, name: &str, g: usize) -> R {
    let h = tr.theory.axiom(name).ok_or_else(|| format!("no basis axiom `{name}`"))?.formula.clone();
    if !h.is_closed() {
        return Err(format!("`{name}` is not closed"));
    }
    let cone = tr.cone(g);
    let hsteps: BTreeSet<usize> =
        cone.iter().copied().filter(|k| matches!(&tr.steps[*k].rule, Prim::Basis(n) if n == name)).collect();
    let dependent = |tr: &Trace<'_>, k: usize| tr.steps[k].deps.iter().any(|d| hsteps.contains(d));
    let mut lifted: BTreeMap<usize, usize> = BTreeMap::new();
    let imp_h = |a: &Formula| Formula::imp(h.clone(), a.clone());
    fn lift(
        tr: &mut Trace<'_>,
        lifted: &mut BTreeMap<usize, usize>,
        k: usize,
        h: &Formula,
    ) -> R {
        if let Some(i) = lifted.get(&k) {
            return Ok(*i);
        }
        let a = tr.formula(k).clone();
        let i = tr.prop(&[k], Formula::imp(h.clone(), a))?;
        lifted.insert(k, i);
        Ok(i)
    }
    for &k in &cone {
        if !dependent(tr, k) {
            continue;
        }
        let a = tr.formula(k).clone();
        let rule = tr.steps[k].rule.clone();
        let new = match rule {
            Prim::Basis(_) => tr.taut(imp_h(&a))?,
            Prim::MP(i, j) => {
                let hi = lift(tr, &mut lifted, i, &h)?;
                let hj = lift(tr, &mut lifted, j, &h)?;
                tr.prop(&[hi, hj], imp_h(&a))?
            }
            Prim::Gen(x, i) => {
                let hi = lift(tr, &mut lifted, i, &h)?;
                let s = tr.gen(x, hi)?;
                let ai = tr.formula(i).clone();
                let q = tr.qdist(x, &h, &ai)?;
                tr.mp(s, q)?
            }
            Prim::Subst(i, x, t) => {
                let hi = lift(tr, &mut lifted, i, &h)?;
                tr.subst(hi, x, &t)?
            }
            Prim::Rename(i, ..) => {
                let hi = lift(tr, &mut lifted, i, &h)?;
                let ai = tr.formula(i).clone();
                let e = tr.alpha_iff(&ai, &a)?;
                tr.prop(&[hi, e], imp_h(&a))?
            }
            _ => return Err("axiom step depends on a hypothesis".into()),
        };
        lifted.insert(k, new);
    }
    lift(tr, &mut lifted, g, &h)
}

fn generalize(tr: &mut Trace<'_>, c: &str, x: Variable, g: usize) -> R {
    if !(tr.theory.scratch.contains(c) && tr.theory.signature.constants.contains(c)) {
        return Err(format!("`{c}` is not a new constant"));
    }
    let cone = tr.cone(g);
    for &k in &cone {
        let s = &tr.steps[k];
        if let Prim::Basis(n) = &s.rule {
            if s.formula.mentions(c) {
                return Err(format!("basis axiom `{n}` mentions `{c}`"));
            }
        }
        if s.formula.all_vars().contains(&x) {
            return Err(format!("{x} occurs in step formula {}", s.formula));
        }
    }
    let xt = Term::Var(x);
    let mut new: BTreeMap<usize, usize> = BTreeMap::new();
    for &k in &cone {
        let s = tr.steps[k].clone();
        let changed = s.formula.mentions(c) || s.rule.refs().iter().any(|r| new.get(r) != Some(r));
        if !changed {
            new.insert(k, k);
            continue;
        }
        let f = s.formula.replace_const_raw(c, &xt);
        let m = |r: usize| new[&r];
        let rule = match s.rule.map_refs(&m) {
            Prim::AxSubst(y, t) => Prim::AxSubst(y, t.replace_const(c, &xt)),
            Prim::Subst(i, y, t) => Prim::Subst(i, y, t.replace_const(c, &xt)),
            r => r,
        };
        let i = tr.push(f, rule)?;
        new.insert(k, i);
    }
    Ok(new[&g])
}

fn run<'t>(theory: &'t Theory, steps: &[super::Step]) -> Result<(Trace<'t>, Vec<usize>), String> {
    let mut tr = Trace::new(theory);
    let mut at = Vec::new();
    for (n, s) in steps.iter().enumerate() {
        let i = check_step(&mut tr, &at, n, s).map_err(|e| format!("step {}: {e}", n + 1))?;
        at.push(i);
    }
    Ok((tr, at))
}

fn last(at: &[usize]) -> Result<usize, String> {
    at.last().copied().ok_or_else(|| "empty proof".to_string())
}

/// A proof of `imp H G` over the theory without the hypothesis `hyp`, from
/// a proof whose step `i` (1-based) is `G`.
///
/// # Errors
/// `hyp` missing or open, or `p` fails.
pub fn deduction_transform(p: &Proof, hyp: &str, i: usize) -> Result<Proof, String> {
    let (mut tr, at) = run(&p.theory, &p.steps)?;
    let g = *at.get(i.wrapping_sub(1)).ok_or("step out of range")?;
    let r = deduction(&mut tr, hyp, g)?;
    let mut out = tr.extract(r);
    out.theory.basis.retain(|a| a.name != hyp);
    Ok(out)
}

/// Replace constant `c` by the fresh variable `x` throughout the proof of
/// the last step.
///
/// # Errors
/// `c` occurs in a used basis axiom, `x` is not fresh, or `p` fails.
pub fn generalize_constant(p: &Proof, c: &str, x: Variable) -> Result<Proof, String> {
    let (mut tr, at) = run(&p.theory, &p.steps)?;
    let r = generalize(&mut tr, c, x, last(&at)?)?;
    Ok(tr.extract(r))
}

/// A proof of `iff C C'` where `C'` replaces the subformula of `context` at
/// `pos` by `F'`, from a proof of `iff F F'`.
///
/// # Errors
/// Invalid position, a different subformula there, or a failing proof.
pub fn equivalence_replace(p_equiv: &Proof, context: &Formula, pos: &[usize]) -> Result<Proof, String> {
    let (mut tr, at) = run(&p_equiv.theory, &p_equiv.steps)?;
    if context.subformula_at(pos).is_none() {
        return Err("invalid position".into());
    }
    let r = tr.equiv_at(last(&at)?, context, pos)?;
    Ok(tr.extract(r))
}

/// Quantifier monotonicity applied to a proof of `imp F1 F2`.
///
/// # Errors
/// Variable clash or a failing proof.
pub fn quantifier_monotone(p: &Proof, mode: MonotoneMode, vars: &[Variable]) -> Result<Proof, String> {
    let (mut tr, at) = run(&p.theory, &p.steps)?;
    let r = monotone(&mut tr, last(&at)?, mode, vars)?;
    Ok(tr.extract(r))
}

/// A proof of `ex u all y iff mem y u and mem y x F` for `u ∉ free(F)`.
///
/// # Errors
/// `u` free in `F`, variables not distinct, or a theory that is not
/// subset-friendly.
pub fn subset_instance(theory: &Theory, f: &Formula, x: Variable, y: Variable, u: Variable) -> Result<Proof, String> {
    let mut tr = Trace::new(theory);
    let r = tr.subset_instance(x, y, u, f)?;
    Ok(tr.extract(r))
}
