//! Proof-producing lemmas of first-order logic over a [`Trace`].

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{Prim, Trace};
use crate::schemas::SchemaId;
use crate::syntax::{fresh_var, rename_apart, substitute, Formula, Term, Variable};

pub(crate) type R = Result<usize, String>;

fn tv(x: Variable) -> Term {
    Term::Var(x)
}

/// `imp eq a b imp A A'` with `A` atomic and `A'` obtained by replacing one
/// occurrence of `a` by `b`.
pub(crate) fn is_congruence(f: &Formula) -> bool {
    let Formula::Imp(e, rest) = f else { return false };
    let (Formula::Eq(a, b), Formula::Imp(x, y)) = (&**e, &**rest) else { return false };
    if !x.is_atomic() {
        return false;
    }
    let (Some(xs), Some(ys)) = (x.atom_args(), y.atom_args()) else { return false };
    let same_head = match (&**x, &**y) {
        (Formula::Eq(..), Formula::Eq(..)) | (Formula::Mem(..), Formula::Mem(..)) => true,
        (Formula::Pred(p, _), Formula::Pred(q, _)) => p == q,
        _ => false,
    };
    if !same_head || xs.len() != ys.len() {
        return false;
    }
    let diffs: Vec<usize> = (0..xs.len()).filter(|i| xs[*i] != ys[*i]).collect();
    match diffs.as_slice() {
        [] => one_replacement(xs[0], a, b).iter().any(|t| t == ys[0]) || a == b,
        [i] => one_replacement(xs[*i], a, b).iter().any(|t| t == ys[*i]),
        _ => false,
    }
}

/// All terms obtained from `t` by replacing exactly one occurrence of `a` by `b`.
fn one_replacement(t: &Term, a: &Term, b: &Term) -> Vec<Term> {
    let mut out = Vec::new();
    if t == a {
        out.push(b.clone());
    }
    if let Term::App(g, args) = t {
        for (i, s) in args.iter().enumerate() {
            for r in one_replacement(s, a, b) {
                let mut args2 = args.clone();
                args2[i] = r;
                out.push(Term::App(g.clone(), args2));
            }
        }
    }
    out
}

/// The term `t` with `substitute(g, x, t) == r`, if any.
#[must_use]
pub fn match_instance(g: &Formula, x: Variable, r: &Formula) -> Option<Term> {
    fn term(a: &Term, b: &Term, x: Variable, out: &mut Option<Term>) -> bool {
        match (a, b) {
            (Term::Var(v), _) if *v == x => match out {
                Some(t) => t == b,
                None => {
                    *out = Some(b.clone());
                    true
                }
            },
            (Term::App(f, xs), Term::App(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(p, q)| term(p, q, x, out))
            }
            _ => a == b,
        }
    }
    fn go(a: &Formula, b: &Formula, x: Variable, out: &mut Option<Term>) -> bool {
        match (a, b) {
            (Formula::All(y, p), Formula::All(z, q)) | (Formula::Ex(y, p), Formula::Ex(z, q)) => {
                if core::mem::discriminant(a) != core::mem::discriminant(b) || y != z {
                    return false;
                }
                if *y == x {
                    p == q
                } else {
                    go(p, q, x, out)
                }
            }
            _ if a.is_atomic() && b.is_atomic() => {
                let same_head = match (a, b) {
                    (Formula::Eq(..), Formula::Eq(..)) | (Formula::Mem(..), Formula::Mem(..)) => true,
                    (Formula::Pred(p, _), Formula::Pred(q, _)) => p == q,
                    _ => false,
                };
                let (xs, ys) = (a.atom_args().unwrap_or_default(), b.atom_args().unwrap_or_default());
                same_head && xs.len() == ys.len() && xs.iter().zip(&ys).all(|(p, q)| term(p, q, x, out))
            }
            _ => {
                core::mem::discriminant(a) == core::mem::discriminant(b)
                    && !a.is_atomic()
                    && a.children().into_iter().zip(b.children()).all(|(p, q)| go(p, q, x, out))
            }
        }
    }
    let mut out = None;
    if !go(g, r, x, &mut out) {
        return None;
    }
    let t = out.unwrap_or(Term::Var(x));
    (substitute(g, x, &t).ok()? == *r).then_some(t)
}

/// Equality up to renaming of bound variables.
#[must_use]
pub fn alpha_equivalent(a: &Formula, b: &Formula) -> bool {
    fn var_ok(x: Variable, y: Variable, env: &[(Variable, Variable)]) -> bool {
        let l = env.iter().rposition(|p| p.0 == x);
        let r = env.iter().rposition(|p| p.1 == y);
        match (l, r) {
            (None, None) => x == y,
            (Some(i), Some(j)) => i == j,
            _ => false,
        }
    }
    fn term(a: &Term, b: &Term, env: &[(Variable, Variable)]) -> bool {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => var_ok(*x, *y, env),
            (Term::Const(c), Term::Const(d)) => c == d,
            (Term::App(f, xs), Term::App(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(p, q)| term(p, q, env))
            }
            _ => false,
        }
    }
    fn go(a: &Formula, b: &Formula, env: &mut Vec<(Variable, Variable)>) -> bool {
        if core::mem::discriminant(a) != core::mem::discriminant(b) {
            return false;
        }
        match (a, b) {
            (Formula::All(x, p), Formula::All(y, q)) | (Formula::Ex(x, p), Formula::Ex(y, q)) => {
                env.push((*x, *y));
                let r = go(p, q, env);
                env.pop();
                r
            }
            (Formula::Pred(p, _), Formula::Pred(q, _)) if p != q => false,
            _ if a.is_atomic() => {
                let (xs, ys) = (a.atom_args().unwrap_or_default(), b.atom_args().unwrap_or_default());
                xs.len() == ys.len() && xs.iter().zip(&ys).all(|(p, q)| term(p, q, env))
            }
            _ => a.children().into_iter().zip(b.children()).all(|(p, q)| go(p, q, env)),
        }
    }
    go(a, b, &mut Vec::new())
}

/// Variables bound somewhere in `f`.
pub(crate) fn bound_vars(f: &Formula) -> BTreeSet<Variable> {
    let mut out = BTreeSet::new();
    fn go(f: &Formula, out: &mut BTreeSet<Variable>) {
        if let Formula::All(x, _) | Formula::Ex(x, _) = f {
            out.insert(*x);
        }
        f.children().into_iter().for_each(|c| go(c, out));
    }
    go(f, &mut out);
    out
}

fn split_imp(f: &Formula) -> Result<(&Formula, &Formula), String> {
    match f {
        Formula::Imp(a, b) => Ok((a, b)),
        _ => Err(format!("expected an implication, found {f}")),
    }
}

fn split_iff(f: &Formula) -> Result<(&Formula, &Formula), String> {
    match f {
        Formula::Iff(a, b) => Ok((a, b)),
        _ => Err(format!("expected a biconditional, found {f}")),
    }
}

fn split_all(f: &Formula) -> Result<(Variable, &Formula), String> {
    match f {
        Formula::All(x, a) => Ok((*x, a)),
        _ => Err(format!("expected a universal formula, found {f}")),
    }
}

fn split_ex(f: &Formula) -> Result<(Variable, &Formula), String> {
    match f {
        Formula::Ex(x, a) => Ok((*x, a)),
        _ => Err(format!("expected an existential formula, found {f}")),
    }
}

impl Trace<'_> {
    fn f(&self, i: usize) -> Formula {
        self.formula(i).clone()
    }

    pub(crate) fn taut(&mut self, f: Formula) -> R {
        self.push(f, Prim::Taut)
    }

    pub(crate) fn mp(&mut self, a: usize, ab: usize) -> R {
        let (_, b) = split_imp(self.formula(ab))?;
        let b = b.clone();
        self.push(b, Prim::MP(a, ab))
    }

    pub(crate) fn gen(&mut self, x: Variable, i: usize) -> R {
        let f = Formula::all(x, self.f(i));
        self.push(f, Prim::Gen(x, i))
    }

    pub(crate) fn subst(&mut self, i: usize, x: Variable, t: &Term) -> R {
        let f = substitute(self.formula(i), x, t).map_err(|e| e.to_string())?;
        self.push(f, Prim::Subst(i, x, t.clone()))
    }

    pub(crate) fn ax_subst(&mut self, x: Variable, g: &Formula, t: &Term) -> R {
        let r = substitute(g, x, t).map_err(|e| e.to_string())?;
        self.push(Formula::imp(Formula::all(x, g.clone()), r), Prim::AxSubst(x, t.clone()))
    }

    pub(crate) fn qdist(&mut self, x: Variable, g: &Formula, h: &Formula) -> R {
        let f = Formula::imp(
            Formula::all(x, Formula::imp(g.clone(), h.clone())),
            Formula::imp(g.clone(), Formula::all(x, h.clone())),
        );
        self.push(f, Prim::AxQDist)
    }

    pub(crate) fn exdef(&mut self, x: Variable, g: &Formula) -> R {
        let f = Formula::iff(
            Formula::ex(x, g.clone()),
            Formula::not(Formula::all(x, Formula::not(g.clone()))),
        );
        self.push(f, Prim::AxExDef)
    }

    /// Tautological consequence of the premises.
    pub(crate) fn prop(&mut self, prem: &[usize], goal: Formula) -> R {
        let t = prem.iter().rev().fold(goal, |acc, p| Formula::imp(self.f(*p), acc));
        let mut i = self.taut(t)?;
        for p in prem {
            i = self.mp(*p, i)?;
        }
        Ok(i)
    }

    /// From `all x G`: `G[t/x]`.
    pub(crate) fn spec(&mut self, i: usize, t: &Term) -> R {
        let (x, g) = split_all(self.formula(i))?;
        let g = g.clone();
        let s = self.ax_subst(x, &g, t)?;
        self.mp(i, s)
    }

    /// `imp all x imp A B imp all x A all x B`.
    pub(crate) fn all_imp(&mut self, x: Variable, a: &Formula, b: &Formula) -> R {
        let ab = Formula::imp(a.clone(), b.clone());
        let p = Formula::all(x, ab.clone());
        let q = Formula::all(x, a.clone());
        let s1 = self.ax_subst(x, &ab, &tv(x))?;
        let s2 = self.ax_subst(x, a, &tv(x))?;
        let pq = Formula::and(p.clone(), q.clone());
        let s3 = self.prop(&[s1, s2], Formula::imp(pq.clone(), b.clone()))?;
        let s4 = self.gen(x, s3)?;
        let s5 = self.qdist(x, &pq, b)?;
        let s6 = self.mp(s4, s5)?;
        self.prop(&[s6], Formula::imp(p, Formula::imp(q, Formula::all(x, b.clone()))))
    }

    /// `imp all x imp A B imp ex x A ex x B`.
    pub(crate) fn all_imp_ex(&mut self, x: Variable, a: &Formula, b: &Formula) -> R {
        let ab = Formula::imp(a.clone(), b.clone());
        let p = Formula::all(x, ab.clone());
        let (na, nb) = (Formula::not(a.clone()), Formula::not(b.clone()));
        let s1 = self.ax_subst(x, &ab, &tv(x))?;
        let nbna = Formula::imp(nb.clone(), na.clone());
        let s2 = self.prop(&[s1], Formula::imp(p.clone(), nbna.clone()))?;
        let s3 = self.gen(x, s2)?;
        let s4 = self.qdist(x, &p, &nbna)?;
        let s5 = self.mp(s3, s4)?;
        let s6 = self.all_imp(x, &nb, &na)?;
        let s7 = self.exdef(x, a)?;
        let s8 = self.exdef(x, b)?;
        let goal = Formula::imp(p, Formula::imp(Formula::ex(x, a.clone()), Formula::ex(x, b.clone())));
        self.prop(&[s5, s6, s7, s8], goal)
    }

    /// `iff all x and A B and all x A all x B`.
    pub(crate) fn all_and(&mut self, x: Variable, a: &Formula, b: &Formula) -> R {
        let ab = Formula::and(a.clone(), b.clone());
        let p = Formula::all(x, ab.clone());
        let q = Formula::and(Formula::all(x, a.clone()), Formula::all(x, b.clone()));
        let s1 = self.ax_subst(x, &ab, &tv(x))?;
        let mut halves = Vec::new();
        for c in [a, b] {
            let s = self.prop(&[s1], Formula::imp(p.clone(), c.clone()))?;
            let g = self.gen(x, s)?;
            let d = self.qdist(x, &p, c)?;
            halves.push(self.mp(g, d)?);
        }
        let t1 = self.ax_subst(x, a, &tv(x))?;
        let t2 = self.ax_subst(x, b, &tv(x))?;
        let s = self.prop(&[t1, t2], Formula::imp(q.clone(), ab.clone()))?;
        let g = self.gen(x, s)?;
        let d = self.qdist(x, &q, &ab)?;
        let back = self.mp(g, d)?;
        self.prop(&[halves[0], halves[1], back], Formula::iff(p, q))
    }

    /// From `imp A B`: `imp all x A all x B`.
    pub(crate) fn mono_all(&mut self, i: usize, x: Variable) -> R {
        let f = self.f(i);
        let (a, b) = split_imp(&f)?;
        let g = self.gen(x, i)?;
        let l = self.all_imp(x, a, b)?;
        self.mp(g, l)
    }

    /// From `imp A B`: `imp ex x A ex x B`.
    pub(crate) fn mono_ex(&mut self, i: usize, x: Variable) -> R {
        let f = self.f(i);
        let (a, b) = split_imp(&f)?;
        let g = self.gen(x, i)?;
        let l = self.all_imp_ex(x, a, b)?;
        self.mp(g, l)
    }

    fn iff_quant(&mut self, i: usize, x: Variable, ex: bool) -> R {
        let f = self.f(i);
        let (a, b) = split_iff(&f)?;
        let ab = self.prop(&[i], Formula::imp(a.clone(), b.clone()))?;
        let ba = self.prop(&[i], Formula::imp(b.clone(), a.clone()))?;
        let (m1, m2) = if ex {
            (self.mono_ex(ab, x)?, self.mono_ex(ba, x)?)
        } else {
            (self.mono_all(ab, x)?, self.mono_all(ba, x)?)
        };
        let q = |g: &Formula| if ex { Formula::ex(x, g.clone()) } else { Formula::all(x, g.clone()) };
        self.prop(&[m1, m2], Formula::iff(q(a), q(b)))
    }

    /// From `iff A B`: `iff all x A all x B`.
    pub(crate) fn iff_all(&mut self, i: usize, x: Variable) -> R {
        self.iff_quant(i, x, false)
    }

    /// From `iff A B`: `iff ex x A ex x B`.
    pub(crate) fn iff_ex(&mut self, i: usize, x: Variable) -> R {
        self.iff_quant(i, x, true)
    }

    /// From `all x imp A B` with `x ∉ free(B)`: `imp ex x A B`.
    pub(crate) fn ex_elim(&mut self, i: usize) -> R {
        let f = self.f(i);
        let (x, body) = split_all(&f)?;
        let (a, b) = split_imp(body)?;
        if b.is_free(x) {
            return Err(format!("{x} is free in the consequent"));
        }
        let s1 = self.spec(i, &tv(x))?;
        let (na, nb) = (Formula::not(a.clone()), Formula::not(b.clone()));
        let s2 = self.prop(&[s1], Formula::imp(nb.clone(), na.clone()))?;
        let s3 = self.gen(x, s2)?;
        let s4 = self.qdist(x, &nb, &na)?;
        let s5 = self.mp(s3, s4)?;
        let s6 = self.exdef(x, a)?;
        self.prop(&[s5, s6], Formula::imp(Formula::ex(x, a.clone()), b.clone()))
    }

    /// From `all y imp A B` with `y ∉ free(A)`: `imp A all y B`.
    pub(crate) fn all_intro(&mut self, i: usize) -> R {
        let f = self.f(i);
        let (y, body) = split_all(&f)?;
        let (a, b) = split_imp(body)?;
        if a.is_free(y) {
            return Err(format!("{y} is free in the antecedent"));
        }
        let d = self.qdist(y, a, b)?;
        self.mp(i, d)
    }

    /// From `ex u imp A B` with `u ∉ free(A)`: `imp A ex u B`.
    pub(crate) fn ex_pull(&mut self, i: usize) -> R {
        let f = self.f(i);
        let (u, body) = split_ex(&f)?;
        let (a, b) = split_imp(body)?;
        if a.is_free(u) {
            return Err(format!("{u} is free in the antecedent"));
        }
        let nb = Formula::not(b.clone());
        let s1 = self.ax_subst(u, &nb, &tv(u))?;
        let m = Formula::and(a.clone(), Formula::all(u, nb.clone()));
        let nab = Formula::not(body.clone());
        let s2 = self.prop(&[s1], Formula::imp(m.clone(), nab.clone()))?;
        let s3 = self.gen(u, s2)?;
        let s4 = self.qdist(u, &m, &nab)?;
        let s5 = self.mp(s3, s4)?;
        let s6 = self.exdef(u, body)?;
        let s7 = self.exdef(u, b)?;
        self.prop(&[i, s5, s6, s7], Formula::imp(a.clone(), Formula::ex(u, b.clone())))
    }

    /// `imp F[t/x] ex x F`.
    pub(crate) fn ex_intro(&mut self, x: Variable, f: &Formula, t: &Term) -> R {
        let s1 = self.ax_subst(x, &Formula::not(f.clone()), t)?;
        let s2 = self.exdef(x, f)?;
        let r = substitute(f, x, t).map_err(|e| e.to_string())?;
        self.prop(&[s1, s2], Formula::imp(r, Formula::ex(x, f.clone())))
    }

    /// From `imp A all z B`: `imp A B[t/z]`.
    pub(crate) fn inst_under(&mut self, i: usize, t: &Term) -> R {
        let f = self.f(i);
        let (a, all) = split_imp(&f)?;
        let (z, b) = split_all(all)?;
        let s = self.ax_subst(z, b, t)?;
        let r = substitute(b, z, t).map_err(|e| e.to_string())?;
        self.prop(&[i, s], Formula::imp(a.clone(), r))
    }

    /// `iff all x P all z P[z/x]` for `z` not occurring in `P`.
    fn rename_all_iff(&mut self, x: Variable, p: &Formula, z: Variable) -> R {
        let pz = substitute(p, x, &tv(z)).map_err(|e| e.to_string())?;
        let ax = Formula::all(x, p.clone());
        let az = Formula::all(z, pz.clone());
        let s1 = self.ax_subst(x, p, &tv(z))?;
        let s2 = self.gen(z, s1)?;
        let s3 = self.qdist(z, &ax, &pz)?;
        let s4 = self.mp(s2, s3)?;
        let s5 = self.ax_subst(z, &pz, &tv(x))?;
        if *self.formula(s5) != Formula::imp(az.clone(), p.clone()) {
            return Err("renaming does not invert".into());
        }
        let s6 = self.gen(x, s5)?;
        let s7 = self.qdist(x, &az, p)?;
        let s8 = self.mp(s6, s7)?;
        self.prop(&[s4, s8], Formula::iff(ax, az))
    }

    fn rename_quant_iff(&mut self, ex: bool, x: Variable, p: &Formula, z: Variable) -> R {
        if !ex {
            return self.rename_all_iff(x, p, z);
        }
        let pz = substitute(p, x, &tv(z)).map_err(|e| e.to_string())?;
        let s1 = self.exdef(x, p)?;
        let s2 = self.exdef(z, &pz)?;
        let s3 = self.rename_all_iff(x, &Formula::not(p.clone()), z)?;
        self.prop(&[s1, s2, s3], Formula::iff(Formula::ex(x, p.clone()), Formula::ex(z, pz)))
    }

    /// `iff A B` for alpha-equivalent `A`, `B`.
    pub(crate) fn alpha_iff(&mut self, a: &Formula, b: &Formula) -> R {
        if a == b {
            return self.taut(Formula::iff(a.clone(), a.clone()));
        }
        if !alpha_equivalent(a, b) {
            return Err(format!("{a} and {b} are not alpha-equivalent"));
        }
        let goal = Formula::iff(a.clone(), b.clone());
        match (a, b) {
            (Formula::All(x, p), Formula::All(y, q)) | (Formula::Ex(x, p), Formula::Ex(y, q)) => {
                let ex = matches!(a, Formula::Ex(..));
                if x == y {
                    let j = self.alpha_iff(p, q)?;
                    return if ex { self.iff_ex(j, *x) } else { self.iff_all(j, *x) };
                }
                let mut avoid = a.all_vars();
                avoid.extend(b.all_vars());
                let z = fresh_var(&avoid);
                let pz = substitute(p, *x, &tv(z)).map_err(|e| e.to_string())?;
                let qz = substitute(q, *y, &tv(z)).map_err(|e| e.to_string())?;
                let j1 = self.rename_quant_iff(ex, *x, p, z)?;
                let j2 = self.rename_quant_iff(ex, *y, q, z)?;
                let inner = self.alpha_iff(&pz, &qz)?;
                let j3 = if ex { self.iff_ex(inner, z)? } else { self.iff_all(inner, z)? };
                self.prop(&[j1, j2, j3], goal)
            }
            _ => {
                let kids: Vec<(Formula, Formula)> =
                    a.children().into_iter().cloned().zip(b.children().into_iter().cloned()).collect();
                let mut js = Vec::new();
                for (p, q) in kids {
                    js.push(self.alpha_iff(&p, &q)?);
                }
                self.prop(&js, goal)
            }
        }
    }

    /// From `iff F F'` at `i`: `iff C C'` where `C'` is `ctx` with the
    /// subformula at `pos` (which must be `F`) replaced by `F'`.
    pub(crate) fn equiv_at(&mut self, i: usize, ctx: &Formula, pos: &[usize]) -> R {
        let Some((&k, rest)) = pos.split_first() else {
            let (f, _) = split_iff(self.formula(i))?;
            if f != ctx {
                return Err(format!("subformula {ctx} differs from {f}"));
            }
            return Ok(i);
        };
        let child = ctx.children().get(k).copied().cloned().ok_or("invalid position")?;
        let j = self.equiv_at(i, &child, rest)?;
        let (_, child2) = split_iff(self.formula(j))?;
        let child2 = child2.clone();
        match ctx {
            Formula::All(x, _) => self.iff_all(j, *x),
            Formula::Ex(x, _) => self.iff_ex(j, *x),
            _ => {
                let ctx2 = ctx.replace_at(&[k], child2).ok_or("invalid position")?;
                self.prop(&[j], Formula::iff(ctx.clone(), ctx2))
            }
        }
    }

    /// From `iff F F'` at `i` and `C` at `j`: `C` with the subformula at `pos` replaced.
    pub(crate) fn replace_at_pos(&mut self, i: usize, j: usize, pos: &[usize]) -> R {
        let ctx = self.f(j);
        let e = self.equiv_at(i, &ctx, pos)?;
        let (_, c2) = split_iff(self.formula(e))?;
        let c2 = c2.clone();
        self.prop(&[j, e], c2)
    }

    /// `iff all y iff mem y u mem y v eq u v`.
    pub(crate) fn ext_iff(&mut self, y: Variable, u: Variable, v: Variable) -> R {
        if y == u || y == v || u == v {
            return Err("variables must be distinct".into());
        }
        let a1 = self.theory.instantiate(&SchemaId::A1, &[u, v, y], None).map_err(|e| e.to_string())?;
        let s_a1 = self.push(a1, Prim::Schema(SchemaId::A1))?;
        let (tu, tvv, ty) = (tv(u), tv(v), tv(y));
        let euv = Formula::eq(tu.clone(), tvv.clone());
        let evu = Formula::eq(tvv.clone(), tu.clone());
        let (myu, myv) = (Formula::mem(ty.clone(), tu.clone()), Formula::mem(ty.clone(), tvv.clone()));
        let refl = self.push(Formula::eq(tu.clone(), tu.clone()), Prim::AxEqRefl)?;
        let c1 = self.push(
            Formula::imp(euv.clone(), Formula::imp(Formula::eq(tu.clone(), tu.clone()), evu.clone())),
            Prim::AxEqCongr,
        )?;
        let sym = self.prop(&[refl, c1], Formula::imp(euv.clone(), evu.clone()))?;
        let c2 = self.push(Formula::imp(euv.clone(), Formula::imp(myu.clone(), myv.clone())), Prim::AxEqCongr)?;
        let c3 = self.push(Formula::imp(evu.clone(), Formula::imp(myv.clone(), myu.clone())), Prim::AxEqCongr)?;
        let body = Formula::iff(myu, myv);
        let s = self.prop(&[sym, c2, c3], Formula::imp(euv.clone(), body.clone()))?;
        let g = self.gen(y, s)?;
        let back = self.all_intro(g)?;
        self.prop(&[s_a1, back], Formula::iff(Formula::all(y, body), euv))
    }

    /// `ex u all y iff mem y u and mem y x F` for `u ∉ free(F)`.
    pub(crate) fn subset_instance(&mut self, x: Variable, y: Variable, u: Variable, f: &Formula) -> R {
        if x == y || y == u || x == u {
            return Err("variables must be distinct".into());
        }
        if f.is_free(u) {
            return Err(format!("{u} is free in the payload"));
        }
        if !self.theory.sf || !self.theory.is_active(&SchemaId::A2) {
            return Err("the theory is not subset-friendly".into());
        }
        let vars = f.all_vars();
        if !vars.contains(&u) && !vars.contains(&x) {
            let g = self.theory.instantiate(&SchemaId::A2, &[u, x, y], Some(f)).map_err(|e| e.to_string())?;
            return self.push(g, Prim::Schema(SchemaId::A2));
        }
        let mut avoid = vars.clone();
        avoid.extend([x, y, u]);
        let x1 = fresh_var(&avoid);
        avoid.insert(x1);
        let f1 = substitute(f, x, &tv(x1)).map_err(|e| e.to_string())?;
        let mut rename: BTreeSet<Variable> = bound_vars(&f1);
        rename.extend([x, y, u, x1]);
        let f2 = rename_apart(&f1, &rename);
        let j1 = self.alpha_iff(&f1, &f2)?;
        let inst = self.theory.instantiate(&SchemaId::A2, &[u, x, y], Some(&f2)).map_err(|e| e.to_string())?;
        let j2 = self.push(inst, Prim::Schema(SchemaId::A2))?;
        let j3 = self.subst(j2, x1, &tv(x))?;
        let j4 = self.subst(j1, x1, &tv(x))?;
        let (back, f2x) = split_iff(self.formula(j4))?;
        if back != f {
            return Err("payload renaming does not invert".into());
        }
        let swap = Formula::iff(f2x.clone(), f.clone());
        let j5 = self.prop(&[j4], swap)?;
        self.replace_at_pos(j5, j3, &[0, 0, 1, 1])
    }

    /// From `ex u all y imp F mem y u` with `u ∉ free(F)`: `ex u all y iff mem y u F`.
    pub(crate) fn comprehend(&mut self, i: usize) -> R {
        let fi = self.f(i);
        let (u, body) = split_ex(&fi)?;
        let (y, inner) = split_all(body)?;
        let (f, m) = split_imp(inner)?;
        if *m != Formula::mem(tv(y), tv(u)) {
            return Err("premise is not shaped like `ex u all y imp F mem y u`".into());
        }
        if f.is_free(u) {
            return Err(format!("{u} is free in the condition"));
        }
        let mut avoid = fi.all_vars();
        avoid.extend([u, y]);
        let v = fresh_var(&avoid);
        let (my, mv) = (Formula::mem(tv(y), tv(u)), Formula::mem(tv(y), tv(v)));
        let sep = Formula::iff(my.clone(), Formula::and(mv.clone(), f.clone()));
        let fv = Formula::imp(f.clone(), mv.clone());
        let want = Formula::iff(my.clone(), f.clone());
        let s1 = self.taut(Formula::imp(sep.clone(), Formula::imp(fv.clone(), want.clone())))?;
        let s2 = self.mono_all(s1, y)?;
        let s3 = self.all_imp(y, &fv, &want)?;
        let goal4 = Formula::imp(
            Formula::all(y, sep.clone()),
            Formula::imp(Formula::all(y, fv.clone()), Formula::all(y, want.clone())),
        );
        let s4 = self.prop(&[s2, s3], goal4)?;
        let s5 = self.mono_ex(s4, u)?;
        let s6 = self.subset_instance(v, y, u, f)?;
        let s7 = self.mp(s6, s5)?;
        let s8 = self.ex_pull(s7)?;
        let s9 = self.subst(s8, v, &tv(u))?;
        let s10 = self.gen(u, s9)?;
        let s11 = self.ex_elim(s10)?;
        self.mp(i, s11)
    }

    /// From `ex u F` and `all u imp F G`: `ex u and F G`.
    pub(crate) fn stronger_exists(&mut self, i_ex: usize, i_all: usize) -> R {
        let fe = self.f(i_ex);
        let (u, f) = split_ex(&fe)?;
        let fa = self.f(i_all);
        let (u2, body) = split_all(&fa)?;
        let (f2, g) = split_imp(body)?;
        if u != u2 || f != f2 {
            return Err("premises do not fit".into());
        }
        let s1 = self.spec(i_all, &tv(u))?;
        let s2 = self.prop(&[s1], Formula::imp(f.clone(), Formula::and(f.clone(), g.clone())))?;
        let s3 = self.mono_ex(s2, u)?;
        self.mp(i_ex, s3)
    }
}
