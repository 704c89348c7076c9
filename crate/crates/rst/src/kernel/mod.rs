//! Hilbert-style proof checking.
//!
//! Primitive steps are logical axioms, schema instances, basis axioms and
//! the rules modus ponens, generalization, substitution and bound renaming.
//! A derived step names a rule that expands into primitive steps; the
//! expansion is checked like any other proof and must end in the stated
//! formula.

mod derived;
mod logic;
pub mod taut;

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::schemas::{match_schema, SchemaId, Theory};
use crate::syntax::{rename_bound, substitute, Formula, Term, Variable};

pub use derived::{
    deduction_transform, equivalence_replace, generalize_constant, quantifier_monotone, subset_instance,
    DerivedRule, MonotoneMode, DERIVED_RULES,
};
pub use logic::{alpha_equivalent, match_instance};

/// Why a step holds. Step references are 1-based and must point backwards.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    Taut,
    AxSubst(Variable, Term),
    AxQDist,
    AxExDef,
    AxEqRefl,
    AxEqCongr,
    /// An instance of an active schema; `None` classifies the formula.
    Schema(Option<SchemaId>),
    Basis(String),
    /// `MP(i, j)`: step `j` is `imp A B` where `A` is step `i`.
    MP(usize, usize),
    Gen(Variable, usize),
    Subst(usize, Variable, Term),
    Rename(usize, Variable, Variable),
    Derived { rule: String, args: Vec<String>, premises: Vec<usize> },
}

impl Justification {
    /// Step numbers this justification refers to.
    #[must_use]
    pub fn premises(&self) -> Vec<usize> {
        match self {
            Justification::MP(i, j) => alloc::vec![*i, *j],
            Justification::Gen(_, i) | Justification::Subst(i, ..) | Justification::Rename(i, ..) => alloc::vec![*i],
            Justification::Derived { premises, .. } => premises.clone(),
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Justification::Taut => f.write_str("taut"),
            Justification::AxSubst(x, t) => write!(f, "ax-subst {x} {t}"),
            Justification::AxQDist => f.write_str("ax-qdist"),
            Justification::AxExDef => f.write_str("ax-exdef"),
            Justification::AxEqRefl => f.write_str("ax-eqrefl"),
            Justification::AxEqCongr => f.write_str("ax-eqcongr"),
            Justification::Schema(None) => f.write_str("schema"),
            Justification::Schema(Some(id)) => write!(f, "schema {id}"),
            Justification::Basis(n) => write!(f, "basis {n}"),
            Justification::MP(i, j) => write!(f, "mp {i} {j}"),
            Justification::Gen(x, i) => write!(f, "gen {x} {i}"),
            Justification::Subst(i, x, t) => write!(f, "subst {i} {x} {t}"),
            Justification::Rename(i, a, b) => write!(f, "rename {i} {a} {b}"),
            Justification::Derived { rule, args, premises } => {
                f.write_str(rule)?;
                for a in args {
                    write!(f, " {a}")?;
                }
                for p in premises {
                    write!(f, " {p}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub formula: Formula,
    pub just: Justification,
}

impl Step {
    #[must_use]
    pub fn new(formula: Formula, just: Justification) -> Self {
        Step { formula, just }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proof {
    pub theory: Theory,
    pub steps: Vec<Step>,
}

impl Proof {
    #[must_use]
    pub fn new(theory: Theory) -> Self {
        Proof { theory, steps: Vec::new() }
    }

    #[must_use]
    pub fn conclusion(&self) -> Option<&Formula> {
        self.steps.last().map(|s| &s.formula)
    }

    #[must_use]
    pub fn is_primitive(&self) -> bool {
        self.steps.iter().all(|s| !matches!(s.just, Justification::Derived { .. }))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    /// 1-based step number.
    pub step: usize,
    pub reason: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {}: {}", self.step, self.reason)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub ok: bool,
    pub first_failure: Option<Failure>,
}

/// Primitive justification over trace indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Prim {
    Taut,
    AxSubst(Variable, Term),
    AxQDist,
    AxExDef,
    AxEqRefl,
    AxEqCongr,
    Schema(SchemaId),
    Basis(String),
    MP(usize, usize),
    Gen(Variable, usize),
    Subst(usize, Variable, Term),
    Rename(usize, Variable, Variable),
}

impl Prim {
    fn refs(&self) -> Vec<usize> {
        match self {
            Prim::MP(i, j) => alloc::vec![*i, *j],
            Prim::Gen(_, i) | Prim::Subst(i, ..) | Prim::Rename(i, ..) => alloc::vec![*i],
            _ => Vec::new(),
        }
    }

    fn map_refs(&self, f: &dyn Fn(usize) -> usize) -> Prim {
        match self {
            Prim::MP(i, j) => Prim::MP(f(*i), f(*j)),
            Prim::Gen(x, i) => Prim::Gen(*x, f(*i)),
            Prim::Subst(i, x, t) => Prim::Subst(f(*i), *x, t.clone()),
            Prim::Rename(i, a, b) => Prim::Rename(f(*i), *a, *b),
            p => p.clone(),
        }
    }

    fn to_justification(&self, f: &dyn Fn(usize) -> usize) -> Justification {
        match self.map_refs(f) {
            Prim::Taut => Justification::Taut,
            Prim::AxSubst(x, t) => Justification::AxSubst(x, t),
            Prim::AxQDist => Justification::AxQDist,
            Prim::AxExDef => Justification::AxExDef,
            Prim::AxEqRefl => Justification::AxEqRefl,
            Prim::AxEqCongr => Justification::AxEqCongr,
            Prim::Schema(id) => Justification::Schema(Some(id)),
            Prim::Basis(n) => Justification::Basis(n),
            Prim::MP(i, j) => Justification::MP(i, j),
            Prim::Gen(x, i) => Justification::Gen(x, i),
            Prim::Subst(i, x, t) => Justification::Subst(i, x, t),
            Prim::Rename(i, a, b) => Justification::Rename(i, a, b),
        }
    }
}

/// A checked primitive step with the axiom steps it rests on.
#[derive(Clone, Debug)]
pub(crate) struct TStep {
    pub formula: Formula,
    pub rule: Prim,
    pub deps: Arc<BTreeSet<usize>>,
}

/// Every primitive step checked so far, derived expansions included.
#[derive(Debug)]
pub(crate) struct Trace<'t> {
    pub theory: &'t Theory,
    pub steps: Vec<TStep>,
}

impl<'t> Trace<'t> {
    pub fn new(theory: &'t Theory) -> Self {
        Trace { theory, steps: Vec::new() }
    }

    pub fn formula(&self, i: usize) -> &Formula {
        &self.steps[i].formula
    }

    /// Check and append a primitive step.
    pub fn push(&mut self, formula: Formula, rule: Prim) -> Result<usize, String> {
        check_prim(self, &formula, &rule)?;
        let refs = rule.refs();
        let deps = match (&rule, refs.as_slice()) {
            (Prim::Schema(_) | Prim::Basis(_), _) => Arc::new(BTreeSet::from([self.steps.len()])),
            (_, []) => Arc::new(BTreeSet::new()),
            (_, [i]) => self.steps[*i].deps.clone(),
            (_, [i, j]) => {
                let (a, b) = (&self.steps[*i].deps, &self.steps[*j].deps);
                if b.is_subset(a) {
                    a.clone()
                } else if a.is_subset(b) {
                    b.clone()
                } else {
                    Arc::new(a.union(b).copied().collect())
                }
            }
            _ => unreachable!(),
        };
        self.steps.push(TStep { formula, rule, deps });
        Ok(self.steps.len() - 1)
    }

    /// Hypothesis names the step rests on.
    pub fn hypotheses(&self, i: usize) -> BTreeSet<String> {
        self.steps[i]
            .deps
            .iter()
            .filter_map(|d| match &self.steps[*d].rule {
                Prim::Basis(n) if self.theory.axiom(n).is_some_and(|a| a.hypothesis) => Some(n.clone()),
                _ => None,
            })
            .collect()
    }

    /// Indices of the steps step `i` rests on, in order, `i` included.
    pub fn cone(&self, i: usize) -> Vec<usize> {
        let mut seen = BTreeSet::new();
        let mut stack = alloc::vec![i];
        while let Some(k) = stack.pop() {
            if seen.insert(k) {
                stack.extend(self.steps[k].rule.refs());
            }
        }
        seen.into_iter().collect()
    }

    /// The cone of `i` as a stand-alone primitive proof.
    pub fn extract(&self, i: usize) -> Proof {
        let cone = self.cone(i);
        let pos = |k: usize| cone.binary_search(&k).expect("in cone") + 1;
        Proof {
            theory: self.theory.clone(),
            steps: cone
                .iter()
                .map(|k| Step::new(self.steps[*k].formula.clone(), self.steps[*k].rule.to_justification(&pos)))
                .collect(),
        }
    }
}

fn check_prim(tr: &Trace<'_>, f: &Formula, rule: &Prim) -> Result<(), String> {
    let th = tr.theory;
    th.signature.check_formula(f).map_err(|e| e.to_string())?;
    for r in rule.refs() {
        if r >= tr.steps.len() {
            return Err(format!("reference to a later step {}", r + 1));
        }
    }
    let bad = |what: &str| Err(format!("not an instance of {what}"));
    match rule {
        Prim::Taut => match taut::is_tautology(f) {
            Ok(true) => Ok(()),
            Ok(false) => Err("not a tautology".into()),
            Err(taut::TautError::TooManyLetters(n)) => {
                Err(format!("skeleton has {n} letters, limit {}", taut::MAX_LETTERS))
            }
        },
        Prim::AxSubst(x, t) => {
            th.signature.check_term(t).map_err(|e| e.to_string())?;
            match f {
                Formula::Imp(a, r) => match &**a {
                    Formula::All(y, g) if y == x => {
                        let s = substitute(g, *x, t).map_err(|e| e.to_string())?;
                        if s == **r {
                            Ok(())
                        } else {
                            bad("the substitution axiom")
                        }
                    }
                    _ => bad("the substitution axiom"),
                },
                _ => bad("the substitution axiom"),
            }
        }
        Prim::AxQDist => match f {
            Formula::Imp(a, b) => match (&**a, &**b) {
                (Formula::All(x, gh), Formula::Imp(g2, xh)) => match (&**gh, &**xh) {
                    (Formula::Imp(g, h), Formula::All(x2, h2))
                        if x == x2 && g == g2 && h == h2 && !g.is_free(*x) =>
                    {
                        Ok(())
                    }
                    _ => bad("quantifier distribution"),
                },
                _ => bad("quantifier distribution"),
            },
            _ => bad("quantifier distribution"),
        },
        Prim::AxExDef => match f {
            Formula::Iff(a, b) => match (&**a, &**b) {
                (Formula::Ex(x, g), Formula::Not(n)) => match &**n {
                    Formula::All(x2, ng) if x == x2 && **ng == Formula::not((**g).clone()) => Ok(()),
                    _ => bad("the existential definition"),
                },
                _ => bad("the existential definition"),
            },
            _ => bad("the existential definition"),
        },
        Prim::AxEqRefl => match f {
            Formula::Eq(a, b) if a == b => Ok(()),
            _ => bad("reflexivity"),
        },
        Prim::AxEqCongr => {
            if logic::is_congruence(f) {
                Ok(())
            } else {
                bad("congruence")
            }
        }
        Prim::Schema(id) => check_schema(th, id, f),
        Prim::Basis(name) => match th.axiom(name) {
            Some(a) if a.formula == *f => Ok(()),
            Some(_) => Err(format!("formula differs from basis axiom `{name}`")),
            None => Err(format!("no basis axiom `{name}`")),
        },
        Prim::MP(i, j) => match tr.formula(*j) {
            Formula::Imp(a, b) if **a == *tr.formula(*i) && **b == *f => Ok(()),
            Formula::Imp(a, _) if **a == *tr.formula(*i) => Err("consequent differs from the stated formula".into()),
            _ => Err(format!("step {} is not an implication from step {}", j + 1, i + 1)),
        },
        Prim::Gen(x, i) => {
            if *f == Formula::all(*x, tr.formula(*i).clone()) {
                Ok(())
            } else {
                Err("not the generalization of the premise".into())
            }
        }
        Prim::Subst(i, x, t) => {
            th.signature.check_term(t).map_err(|e| e.to_string())?;
            let s = substitute(tr.formula(*i), *x, t).map_err(|e| e.to_string())?;
            if s == *f {
                Ok(())
            } else {
                Err("not the substitution instance of the premise".into())
            }
        }
        Prim::Rename(i, a, b) => {
            let s = rename_bound(tr.formula(*i), *a, *b).map_err(|e| e.to_string())?;
            if s == *f {
                Ok(())
            } else {
                Err("not the renaming of the premise".into())
            }
        }
    }
}

fn check_schema(th: &Theory, id: &SchemaId, f: &Formula) -> Result<(), String> {
    if !th.is_active(id) {
        return Err(format!("schema {id} is not active"));
    }
    let t = th.template(id).ok_or_else(|| format!("schema {id} is not active"))?;
    let m = match_schema(id, &t, f).ok_or_else(|| format!("not an instance of {id}"))?;
    if let Some(p) = &m.payload {
        if m.relaxed {
            return Err(format!("payload of {id} violates the variable condition"));
        }
        if let Some(s) = p.symbols().into_iter().find(|s| th.scratch.contains(s)) {
            return Err(format!("payload mentions the scratch symbol `{s}`"));
        }
    }
    Ok(())
}

/// Result of checking a whole proof, with per-step information.
#[derive(Debug)]
pub struct Report {
    pub verdict: Verdict,
    /// Per checked step: hypothesis names it rests on.
    pub hypotheses: Vec<BTreeSet<String>>,
    /// Per checked step: the schema and basis formulas it rests on.
    pub axioms: Vec<Vec<Formula>>,
    /// Primitive steps checked, expansions included.
    pub primitive_steps: usize,
}

/// Check a proof.
#[must_use]
pub fn check_proof(p: &Proof) -> Verdict {
    check_proof_report(p).verdict
}

/// Check a proof and report the dependencies of each step.
#[must_use]
pub fn check_proof_report(p: &Proof) -> Report {
    let mut tr = Trace::new(&p.theory);
    let mut at: Vec<usize> = Vec::new();
    let mut hypotheses = Vec::new();
    let mut axioms = Vec::new();
    let fail = |step: usize, reason: String| Verdict { ok: false, first_failure: Some(Failure { step, reason }) };
    let mut verdict = Verdict { ok: true, first_failure: None };
    for (n, s) in p.steps.iter().enumerate() {
        match check_step(&mut tr, &at, n, s) {
            Ok(i) => {
                at.push(i);
                hypotheses.push(tr.hypotheses(i));
                axioms.push(tr.steps[i].deps.iter().map(|d| tr.steps[*d].formula.clone()).collect());
            }
            Err(reason) => {
                verdict = fail(n + 1, reason);
                break;
            }
        }
    }
    if verdict.ok {
        match hypotheses.last() {
            None => verdict = fail(0, "empty proof".into()),
            Some(h) if !h.is_empty() => {
                let names: Vec<String> = h.iter().cloned().collect();
                verdict = fail(p.steps.len(), format!("undischarged hypotheses: {}", names.join(", ")));
            }
            Some(_) => {}
        }
    }
    Report { verdict, hypotheses, axioms, primitive_steps: tr.steps.len() }
}

fn check_step(tr: &mut Trace<'_>, at: &[usize], n: usize, s: &Step) -> Result<usize, String> {
    let refs = s.just.premises();
    for r in &refs {
        if *r == 0 || *r > n {
            return Err(format!("premise {r} is not an earlier step"));
        }
    }
    let ix = |r: usize| at[r - 1];
    let prim = match &s.just {
        Justification::Taut => Prim::Taut,
        Justification::AxSubst(x, t) => Prim::AxSubst(*x, t.clone()),
        Justification::AxQDist => Prim::AxQDist,
        Justification::AxExDef => Prim::AxExDef,
        Justification::AxEqRefl => Prim::AxEqRefl,
        Justification::AxEqCongr => Prim::AxEqCongr,
        Justification::Schema(Some(id)) => Prim::Schema(id.clone()),
        Justification::Schema(None) => {
            let m = tr.theory.classify(&s.formula).ok_or("not an instance of an active schema")?;
            Prim::Schema(m.id)
        }
        Justification::Basis(name) => Prim::Basis(name.clone()),
        Justification::MP(i, j) => Prim::MP(ix(*i), ix(*j)),
        Justification::Gen(x, i) => Prim::Gen(*x, ix(*i)),
        Justification::Subst(i, x, t) => Prim::Subst(ix(*i), *x, t.clone()),
        Justification::Rename(i, a, b) => Prim::Rename(ix(*i), *a, *b),
        Justification::Derived { rule, args, premises } => {
            let prem: Vec<usize> = premises.iter().map(|r| ix(*r)).collect();
            let i = derived::apply(tr, rule, args, &prem, &s.formula)?;
            if *tr.formula(i) != s.formula {
                return Err(format!("rule `{rule}` derives {} instead", tr.formula(i)));
            }
            return Ok(i);
        }
    };
    tr.push(s.formula.clone(), prim)
}

/// Replace every derived step by its primitive expansion.
///
/// # Errors
/// The first failing step.
pub fn expand(p: &Proof) -> Result<Proof, Failure> {
    let mut tr = Trace::new(&p.theory);
    let mut at = Vec::new();
    for (n, s) in p.steps.iter().enumerate() {
        let i = check_step(&mut tr, &at, n, s).map_err(|reason| Failure { step: n + 1, reason })?;
        at.push(i);
    }
    let last = *at.last().ok_or(Failure { step: 0, reason: "empty proof".into() })?;
    Ok(tr.extract(last))
}

#[cfg(test)]
mod tests;
