//! Finite models: universes of hereditarily finite sets with true membership.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashSet;

use crate::hfset::{self, HfError, HfSet};
use crate::schemas::{instantiate_schema, SchemaId};
use crate::syntax::{Formula, Term, Variable};

/// Default number of assignments [`check_valid`] may enumerate.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug)]
pub struct Universe {
    individuals: Vec<HfSet>,
    members: HashSet<HfSet>,
    transitive: bool,
}

impl Universe {
    /// Individuals are deduplicated and sorted canonically.
    #[must_use]
    pub fn new(individuals: impl IntoIterator<Item = HfSet>) -> Self {
        let mut v: Vec<HfSet> = individuals.into_iter().collect();
        v.sort();
        v.dedup();
        let members: HashSet<HfSet> = v.iter().cloned().collect();
        let transitive = v.iter().all(|a| a.elements().iter().all(|e| members.contains(e)));
        Universe { individuals: v, members, transitive }
    }

    /// `V_k = 𝒫ᵏ[∅]`.
    ///
    /// # Errors
    /// Stage cap.
    pub fn stage(k: usize) -> Result<Self, HfError> {
        Ok(Self::new(hfset::von_neumann_stage(k)?.elements().iter().cloned()))
    }

    #[must_use]
    pub fn individuals(&self) -> &[HfSet] {
        &self.individuals
    }

    #[must_use]
    pub fn contains(&self, a: &HfSet) -> bool {
        self.members.contains(a)
    }

    #[must_use]
    pub fn is_transitive(&self) -> bool {
        self.transitive
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }
}

/// Variable assignment.
pub type Env = BTreeMap<Variable, HfSet>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelError {
    Unbound(Variable),
    /// A term or predicate outside the base language reached [`eval`].
    NotBase(String),
    UnknownSymbol(String),
    Budget { needed: Option<u64>, budget: u64 },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::Unbound(v) => write!(f, "variable {v} is unbound"),
            ModelError::NotBase(s) => write!(f, "`{s}` is not a base formula"),
            ModelError::UnknownSymbol(s) => write!(f, "no semantics for symbol `{s}`"),
            ModelError::Budget { needed: Some(n), budget } => {
                write!(f, "{n} assignments exceed the budget of {budget}")
            }
            ModelError::Budget { needed: None, budget } => write!(f, "assignments exceed the budget of {budget}"),
        }
    }
}

impl core::error::Error for ModelError {}

struct Frame<'a> {
    u: &'a Universe,
    slots: Vec<Option<HfSet>>,
}

impl Frame<'_> {
    fn get(&self, v: Variable) -> Result<&HfSet, ModelError> {
        self.slots.get(v.index() as usize).and_then(Option::as_ref).ok_or(ModelError::Unbound(v))
    }

    fn var_term(&self, t: &Term) -> Result<&HfSet, ModelError> {
        match t {
            Term::Var(v) => self.get(*v),
            _ => Err(ModelError::NotBase(format!("{t}"))),
        }
    }

    fn base(&mut self, f: &Formula) -> Result<bool, ModelError> {
        Ok(match f {
            Formula::Eq(a, b) => self.var_term(a)? == self.var_term(b)?,
            Formula::Mem(a, b) => {
                let a = self.var_term(a)?;
                self.var_term(b)?.contains(a)
            }
            Formula::Pred(p, _) => return Err(ModelError::NotBase(p.clone())),
            Formula::Not(a) => !self.base(a)?,
            Formula::Imp(a, b) => !self.base(a)? || self.base(b)?,
            Formula::And(a, b) => self.base(a)? && self.base(b)?,
            Formula::Or(a, b) => self.base(a)? || self.base(b)?,
            Formula::Iff(a, b) => self.base(a)? == self.base(b)?,
            Formula::All(x, a) => self.quant(*x, a, true)?,
            Formula::Ex(x, a) => self.quant(*x, a, false)?,
        })
    }

    fn quant(&mut self, x: Variable, body: &Formula, all: bool) -> Result<bool, ModelError> {
        let i = x.index() as usize;
        if self.slots.len() <= i {
            self.slots.resize(i + 1, None);
        }
        let saved = self.slots[i].take();
        let mut result = all;
        for ind in self.u.individuals() {
            self.slots[i] = Some(ind.clone());
            match self.base(body) {
                Ok(b) if b != all => {
                    result = !all;
                    break;
                }
                Ok(_) => {}
                Err(e) => {
                    self.slots[i] = saved;
                    return Err(e);
                }
            }
        }
        self.slots[i] = saved;
        Ok(result)
    }
}

fn frame<'a>(u: &'a Universe, f: &Formula, e: &Env) -> Frame<'a> {
    let n = f.max_var().max(e.keys().next_back().map_or(0, |v| v.index())) as usize + 1;
    let mut slots = vec![None; n];
    for (v, a) in e {
        slots[v.index() as usize] = Some(a.clone());
    }
    Frame { u, slots }
}

/// Truth of a base formula under `e`, quantifiers ranging over `u`.
///
/// # Errors
/// Unbound free variable or a non-base formula.
pub fn eval(u: &Universe, f: &Formula, e: &Env) -> Result<bool, ModelError> {
    frame(u, f, e).base(f)
}

/// Three-valued outcome of [`eval_extended`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truth {
    True,
    False,
    /// Some term, under some assignment met during evaluation, denotes a set
    /// outside the universe.
    Undefined,
}

impl Truth {
    fn from_bool(b: bool) -> Self {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }

    #[must_use]
    pub fn as_bool(self) -> Option<bool> {
        match self {
            Truth::True => Some(true),
            Truth::False => Some(false),
            Truth::Undefined => None,
        }
    }
}

struct ExtFrame<'a> {
    inner: Frame<'a>,
    undefined: bool,
}

impl ExtFrame<'_> {
    fn term(&mut self, t: &Term) -> Result<HfSet, ModelError> {
        let v = match t {
            Term::Var(v) => return self.inner.get(*v).cloned(),
            Term::Const(c) if c == "O" => hfset::empty(),
            Term::Const(c) => return Err(ModelError::UnknownSymbol(c.clone())),
            Term::App(g, args) => {
                let xs = args.iter().map(|a| self.term(a)).collect::<Result<Vec<_>, _>>()?;
                match (g.as_str(), xs.as_slice()) {
                    ("un", [a]) => hfset::union_of(a),
                    ("sg", [a]) => hfset::sigma(a),
                    ("pr", [a, b]) => hfset::sigma2(a, b),
                    ("pw", [a]) => match hfset::power_set(a) {
                        Ok(p) => p,
                        Err(_) => {
                            self.undefined = true;
                            return Ok(hfset::empty());
                        }
                    },
                    _ => return Err(ModelError::UnknownSymbol(g.clone())),
                }
            }
        };
        if !self.inner.u.contains(&v) {
            self.undefined = true;
        }
        Ok(v)
    }

    // No short-circuiting: every term occurrence is evaluated under every
    // assignment so that definedness does not depend on evaluation order.
    fn eval(&mut self, f: &Formula) -> Result<bool, ModelError> {
        Ok(match f {
            Formula::Eq(a, b) => self.term(a)? == self.term(b)?,
            Formula::Mem(a, b) => {
                let (x, y) = (self.term(a)?, self.term(b)?);
                y.contains(&x)
            }
            Formula::Pred(p, args) if p == "sub" && args.len() == 2 => {
                let (x, y) = (self.term(&args[0])?, self.term(&args[1])?);
                hfset::subset(&x, &y)
            }
            Formula::Pred(p, _) => return Err(ModelError::UnknownSymbol(p.clone())),
            Formula::Not(a) => !self.eval(a)?,
            Formula::Imp(a, b) => {
                let (x, y) = (self.eval(a)?, self.eval(b)?);
                !x || y
            }
            Formula::And(a, b) => {
                let (x, y) = (self.eval(a)?, self.eval(b)?);
                x && y
            }
            Formula::Or(a, b) => {
                let (x, y) = (self.eval(a)?, self.eval(b)?);
                x || y
            }
            Formula::Iff(a, b) => {
                let (x, y) = (self.eval(a)?, self.eval(b)?);
                x == y
            }
            Formula::All(x, a) | Formula::Ex(x, a) => {
                let all = matches!(f, Formula::All(..));
                let i = x.index() as usize;
                if self.inner.slots.len() <= i {
                    self.inner.slots.resize(i + 1, None);
                }
                let saved = self.inner.slots[i].take();
                let mut result = all;
                for ind in self.inner.u.individuals().to_vec() {
                    self.inner.slots[i] = Some(ind);
                    let b = self.eval(a);
                    match b {
                        Ok(b) if b != all => result = !all,
                        Ok(_) => {}
                        Err(e) => {
                            self.inner.slots[i] = saved;
                            return Err(e);
                        }
                    }
                }
                self.inner.slots[i] = saved;
                result
            }
        })
    }
}

/// Evaluate a formula of the extended language under the intended meanings
/// of `O`, `un`, `sg`, `pr`, `pw` and `sub`.
///
/// # Errors
/// Unbound variable or a symbol without semantics.
pub fn eval_extended(u: &Universe, f: &Formula, e: &Env) -> Result<Truth, ModelError> {
    let mut fr = ExtFrame { inner: frame(u, f, e), undefined: false };
    let b = fr.eval(f)?;
    Ok(if fr.undefined { Truth::Undefined } else { Truth::from_bool(b) })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Counterexample(Env),
}

impl Validity {
    #[must_use]
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

/// Assignments in descending canonical order, so counterexamples found
/// first are rank-maximal.
fn assignments<'a>(u: &'a Universe, vars: &'a [Variable]) -> impl Iterator<Item = Env> + 'a {
    let n = u.len();
    let k = vars.len();
    let total = if n == 0 && k > 0 { 0 } else { n.checked_pow(k as u32).unwrap_or(usize::MAX) };
    (0..total).map(move |mut code| {
        let mut env = Env::new();
        for v in vars.iter().rev() {
            env.insert(*v, u.individuals()[n - 1 - code % n].clone());
            code /= n;
        }
        env
    })
}

/// Exhaustive validity of a base formula: true under every assignment of its
/// free variables.
///
/// # Errors
/// Budget exceeded, or evaluation errors.
pub fn check_valid(u: &Universe, f: &Formula, budget: u64) -> Result<Validity, ModelError> {
    check_valid_with(u, f, budget, |env| eval(u, f, env))
}

/// As [`check_valid`] for extended formulas; undefined instances count as
/// neither valid nor invalid and are skipped.
///
/// # Errors
/// As [`check_valid`].
pub fn check_valid_extended(u: &Universe, f: &Formula, budget: u64) -> Result<Validity, ModelError> {
    check_valid_with(u, f, budget, |env| Ok(eval_extended(u, f, env)? != Truth::False))
}

fn check_valid_with(
    u: &Universe,
    f: &Formula,
    budget: u64,
    mut holds: impl FnMut(&Env) -> Result<bool, ModelError>,
) -> Result<Validity, ModelError> {
    let vars: Vec<Variable> = f.free_vars().into_iter().collect();
    let needed = (u.len() as u64).checked_pow(vars.len() as u32);
    match needed {
        Some(n) if n <= budget => {}
        _ => return Err(ModelError::Budget { needed, budget }),
    }
    for env in assignments(u, &vars) {
        if !holds(&env)? {
            return Ok(Validity::Counterexample(env));
        }
    }
    Ok(Validity::Valid)
}

/// Render an environment as `x1={} x2={{}}`.
#[must_use]
pub fn render_env(e: &Env) -> String {
    let parts: Vec<String> = e.iter().map(|(v, a)| format!("{v}={a}")).collect();
    parts.join(" ")
}

/// Verdict for one schema in one universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportRow {
    pub schema: SchemaId,
    pub predicted: bool,
    pub observed: Result<bool, ModelError>,
    /// Instances checked (payloads for A2).
    pub instances: usize,
    /// Counterexample or witness description.
    pub witness: Option<String>,
}

impl ReportRow {
    #[must_use]
    pub fn matches(&self) -> bool {
        self.observed.as_ref().is_ok_and(|o| *o == self.predicted)
    }
}

/// Expected validity of a schema in a finite stage: the infinite-model
/// argument carries over except where it needs a set of higher rank.
#[must_use]
pub fn predicted(id: &SchemaId) -> bool {
    !matches!(id, SchemaId::A4 | SchemaId::A5 | SchemaId::A5Ext)
}

/// Standard variable tuple `(t,u,v,w,x,y,z) = (x1..x7)` restricted to the
/// schema's placeholders.
#[must_use]
pub fn standard_tuple(id: &SchemaId) -> Vec<Variable> {
    crate::schemas::template(id).map(|t| crate::schemas::placeholders(&t)).unwrap_or_default()
}

/// Validity table for the given schemas. A2 is checked once per payload;
/// payload variables must avoid `x2` (u) and `x5` (x).
#[must_use]
pub fn axiom_report(u: &Universe, ids: &[SchemaId], payloads: &[Formula], budget: u64) -> Vec<ReportRow> {
    ids.iter()
        .map(|id| {
            let tuple = standard_tuple(id);
            let instances: Vec<Formula> = if id.has_payload() {
                payloads.iter().filter_map(|p| instantiate_schema(id, &tuple, Some(p)).ok()).collect()
            } else {
                instantiate_schema(id, &tuple, None).into_iter().collect()
            };
            let mut observed = Ok(true);
            let mut witness = None;
            for f in &instances {
                match check_valid(u, f, budget) {
                    Ok(Validity::Valid) => {}
                    Ok(Validity::Counterexample(env)) => {
                        observed = Ok(false);
                        witness = Some(render_env(&env));
                        break;
                    }
                    Err(e) => {
                        observed = Err(e);
                        break;
                    }
                }
            }
            if *id == SchemaId::A6 && observed == Ok(true) {
                witness = choice_witness_summary(u);
            }
            ReportRow { schema: id.clone(), predicted: predicted(id), observed, instances: instances.len(), witness }
        })
        .collect()
}

/// Families in `u` of nonempty pairwise disjoint sets, with a choice set
/// found by brute force inside `u`.
#[must_use]
pub fn choice_sets(u: &Universe) -> Vec<(HfSet, Option<HfSet>)> {
    u.individuals()
        .iter()
        .filter(|fam| {
            let es = fam.elements();
            es.iter().all(|a| !a.is_empty())
                && es.iter().enumerate().all(|(i, a)| {
                    es[i + 1..].iter().all(|b| hfset::binary_intersection(a, b).is_empty())
                })
        })
        .map(|fam| {
            let choice = u.individuals().iter().find(|y| {
                fam.elements().iter().all(|a| hfset::binary_intersection(a, y).len() == 1)
            });
            (fam.clone(), choice.cloned())
        })
        .collect()
}

fn choice_witness_summary(u: &Universe) -> Option<String> {
    let sets = choice_sets(u);
    let found = sets.iter().filter(|(_, c)| c.is_some()).count();
    Some(format!("choice sets found for {found}/{} disjoint families", sets.len()))
}

/// Free variables of `f` in ascending order.
#[must_use]
pub fn free_list(f: &Formula) -> Vec<Variable> {
    f.free_vars().into_iter().collect()
}

/// Individuals occurring as values of `e`.
#[must_use]
pub fn env_values(e: &Env) -> BTreeSet<HfSet> {
    e.values().cloned().collect()
}
