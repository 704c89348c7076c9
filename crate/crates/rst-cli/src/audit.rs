//! Semantic soundness audit of checked proofs in the finite stages `V_k`.
//!
//! Function symbols are read as total functions on the stage: a value that
//! would leave the stage is replaced by `∅`. This keeps every stage a genuine
//! first-order structure, so a sound kernel never derives a step that fails
//! where all of its schema and basis dependencies hold. Scratch constants
//! range over the stage, scratch functions and uninterpreted predicates over
//! all (or sampled) tables.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rst::hfset::{self, HfSet};
use rst::kernel::check_proof_report;
use rst::model::Universe;
use rst::syntax::{render_formula, Formula, Term};
use rst::{Proof, Theory};

#[derive(Clone, Debug)]
pub struct AuditConfig {
    /// Formula-node evaluations allowed per validity check.
    pub budget: u64,
    /// Interpretations of the non-logical symbols tried per stage.
    pub max_interpretations: usize,
    pub seed: u64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self { budget: 2_000_000, max_interpretations: 16, seed: 7 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// 1-based proof step.
    pub step: usize,
    pub formula: String,
    pub interpretation: usize,
}

#[derive(Clone, Debug, Default)]
pub struct AuditReport {
    pub stage: usize,
    pub interpretations: usize,
    /// (step, interpretation) pairs whose dependencies held and whose
    /// formula was then evaluated.
    pub checked: usize,
    /// Pairs skipped because a dependency fails in the interpretation.
    pub skipped_dependency: usize,
    /// Pairs skipped because evaluation exceeded the budget.
    pub skipped_budget: usize,
    pub violations: Vec<Violation>,
}

impl AuditReport {
    #[must_use]
    pub fn summary(&self) -> String {
        format!(
            "interpretations={} checked={} skipped_dependency={} skipped_budget={} violations={}",
            self.interpretations,
            self.checked,
            self.skipped_dependency,
            self.skipped_budget,
            self.violations.len()
        )
    }
}

/// A stage with its structure precomputed on individual indices.
struct Stage {
    elems: Vec<HfSet>,
    index: BTreeMap<HfSet, usize>,
    mem: Vec<Vec<bool>>,
    empty: usize,
}

impl Stage {
    fn new(u: &Universe) -> Self {
        let elems = u.individuals().to_vec();
        let index: BTreeMap<HfSet, usize> = elems.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        let mem = elems.iter().map(|a| elems.iter().map(|b| b.contains(a)).collect()).collect();
        let empty = index[&hfset::empty()];
        Stage { elems, index, mem, empty }
    }

    fn n(&self) -> usize {
        self.elems.len()
    }

    fn truncate(&self, a: &HfSet) -> usize {
        self.index.get(a).copied().unwrap_or(self.empty)
    }
}

/// Symbol tables of one interpretation, all on individual indices.
#[derive(Clone, Debug, Default)]
struct Interp {
    consts: HashMap<String, usize>,
    funcs: HashMap<String, (usize, Vec<usize>)>,
    preds: HashMap<String, (usize, Vec<bool>)>,
}

fn code(args: &[usize], n: usize) -> usize {
    args.iter().fold(0, |acc, a| acc * n + a)
}

fn tuples(n: usize, arity: usize) -> Vec<Vec<usize>> {
    let total = n.pow(arity as u32);
    (0..total)
        .map(|mut c| {
            let mut t = vec![0; arity];
            for slot in t.iter_mut().rev() {
                *slot = c % n;
                c /= n;
            }
            t
        })
        .collect()
}

fn standard_interp(st: &Stage) -> Interp {
    let n = st.n();
    let mut it = Interp::default();
    it.consts.insert("O".into(), st.empty);
    let unary = |f: &dyn Fn(&HfSet) -> Option<HfSet>| -> Vec<usize> {
        st.elems.iter().map(|a| f(a).map_or(st.empty, |v| st.truncate(&v))).collect()
    };
    it.funcs.insert("un".into(), (1, unary(&|a| Some(hfset::union_of(a)))));
    it.funcs.insert("sg".into(), (1, unary(&|a| Some(hfset::sigma(a)))));
    it.funcs.insert("pw".into(), (1, unary(&|a| hfset::power_set(a).ok())));
    let pr = tuples(n, 2).iter().map(|t| st.truncate(&hfset::sigma2(&st.elems[t[0]], &st.elems[t[1]]))).collect();
    it.funcs.insert("pr".into(), (2, pr));
    let sub = tuples(n, 2).iter().map(|t| hfset::subset(&st.elems[t[0]], &st.elems[t[1]])).collect();
    it.preds.insert("sub".into(), (2, sub));
    it
}

/// One dimension of the interpretation space.
enum Dim {
    Const(String),
    Func(String, usize),
    Pred(String, usize),
}

impl Dim {
    /// Number of choices, if it fits in a `u64`.
    fn size(&self, n: usize) -> Option<u64> {
        let n = n as u64;
        match self {
            Dim::Const(_) => Some(n),
            Dim::Func(_, a) => n.checked_pow(u32::try_from(n.checked_pow(*a as u32)?).ok()?),
            Dim::Pred(_, a) => 2u64.checked_pow(u32::try_from(n.checked_pow(*a as u32)?).ok()?),
        }
    }

    /// Choice number `c`, or a random one when `c` is `None`.
    fn apply(&self, it: &mut Interp, n: usize, c: Option<u64>, rng: &mut ChaCha8Rng) {
        let digit = |c: &mut u64, base: u64| {
            let d = *c % base;
            *c /= base;
            d as usize
        };
        match self {
            Dim::Const(s) => {
                let v = c.map_or_else(|| rng.gen_range(0..n), |c| c as usize);
                it.consts.insert(s.clone(), v);
            }
            Dim::Func(s, a) => {
                let len = n.pow(*a as u32);
                let mut c = c;
                let table = (0..len)
                    .map(|_| match c.as_mut() {
                        Some(c) => digit(c, n as u64),
                        None => rng.gen_range(0..n),
                    })
                    .collect();
                it.funcs.insert(s.clone(), (*a, table));
            }
            Dim::Pred(s, a) => {
                let len = n.pow(*a as u32);
                let mut c = c;
                let table = (0..len)
                    .map(|_| match c.as_mut() {
                        Some(c) => digit(c, 2) == 1,
                        None => rng.gen_bool(0.5),
                    })
                    .collect();
                it.preds.insert(s.clone(), (*a, table));
            }
        }
    }
}

fn interpretations(theory: &Theory, st: &Stage, cfg: &AuditConfig) -> Vec<Interp> {
    let base = standard_interp(st);
    let sig = &theory.signature;
    let mut dims = Vec::new();
    for c in &sig.constants {
        if !base.consts.contains_key(c) {
            dims.push(Dim::Const(c.clone()));
        }
    }
    for (f, a) in &sig.functions {
        if !base.funcs.contains_key(f) {
            dims.push(Dim::Func(f.clone(), *a));
        }
    }
    for (q, a) in &sig.predicates {
        if !base.preds.contains_key(q) {
            dims.push(Dim::Pred(q.clone(), *a));
        }
    }
    let n = st.n();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let sizes: Option<Vec<u64>> = dims.iter().map(|d| d.size(n)).collect();
    let total = sizes.as_ref().and_then(|s| s.iter().try_fold(1u64, |acc, x| acc.checked_mul(*x)));
    let cap = cfg.max_interpretations.max(1) as u64;
    match (total, sizes) {
        (Some(t), Some(sizes)) if t <= cap => (0..t)
            .map(|mut c| {
                let mut it = base.clone();
                for (d, s) in dims.iter().zip(&sizes) {
                    let choice = c % s;
                    c /= s;
                    d.apply(&mut it, n, Some(choice), &mut rng);
                }
                it
            })
            .collect(),
        _ => (0..cap)
            .map(|_| {
                let mut it = base.clone();
                for d in &dims {
                    d.apply(&mut it, n, None, &mut rng);
                }
                it
            })
            .collect(),
    }
}

struct Eval<'a> {
    st: &'a Stage,
    it: &'a Interp,
    slots: Vec<usize>,
    fuel: u64,
}

impl Eval<'_> {
    fn term(&self, t: &Term) -> Option<usize> {
        match t {
            Term::Var(v) => Some(self.slots[v.index() as usize]),
            Term::Const(c) => self.it.consts.get(c).copied(),
            Term::App(f, args) => {
                let xs = args.iter().map(|a| self.term(a)).collect::<Option<Vec<_>>>()?;
                let (_, table) = self.it.funcs.get(f)?;
                Some(table[code(&xs, self.st.n())])
            }
        }
    }

    /// `None` when out of fuel or on an unknown symbol.
    fn eval(&mut self, f: &Formula) -> Option<bool> {
        self.fuel = self.fuel.checked_sub(1)?;
        Some(match f {
            Formula::Eq(a, b) => self.term(a)? == self.term(b)?,
            Formula::Mem(a, b) => self.st.mem[self.term(a)?][self.term(b)?],
            Formula::Pred(q, args) => {
                let xs = args.iter().map(|a| self.term(a)).collect::<Option<Vec<_>>>()?;
                let (_, table) = self.it.preds.get(q)?;
                table[code(&xs, self.st.n())]
            }
            Formula::Not(a) => !self.eval(a)?,
            Formula::Imp(a, b) => !self.eval(a)? || self.eval(b)?,
            Formula::And(a, b) => self.eval(a)? && self.eval(b)?,
            Formula::Or(a, b) => self.eval(a)? || self.eval(b)?,
            Formula::Iff(a, b) => self.eval(a)? == self.eval(b)?,
            Formula::All(x, a) | Formula::Ex(x, a) => {
                let all = matches!(f, Formula::All(..));
                let i = x.index() as usize;
                let saved = self.slots[i];
                let mut result = all;
                for v in 0..self.st.n() {
                    self.slots[i] = v;
                    if self.eval(a)? != all {
                        result = !all;
                        break;
                    }
                }
                self.slots[i] = saved;
                result
            }
        })
    }

    /// Truth under every assignment of the free variables.
    fn valid(&mut self, f: &Formula) -> Option<bool> {
        let free: Vec<usize> = f.free_vars().iter().map(|v| v.index() as usize).collect();
        for t in tuples(self.st.n(), free.len()) {
            for (v, a) in free.iter().zip(&t) {
                self.slots[*v] = *a;
            }
            if !self.eval(f)? {
                return Some(false);
            }
        }
        Some(true)
    }
}

/// Audit every checked step of `p` in `V_k`.
#[must_use]
pub fn audit_proof(p: &Proof, k: usize, cfg: &AuditConfig) -> AuditReport {
    let report = check_proof_report(p);
    let items: Vec<(&Formula, &[Formula])> =
        report.axioms.iter().enumerate().map(|(i, deps)| (&p.steps[i].formula, deps.as_slice())).collect();
    audit_steps(&p.theory, &items, k, cfg)
}

/// Audit `(formula, dependencies)` pairs: whenever every dependency is
/// valid in an interpretation, the formula must be too.
#[must_use]
pub fn audit_steps(theory: &Theory, items: &[(&Formula, &[Formula])], k: usize, cfg: &AuditConfig) -> AuditReport {
    let mut rep = AuditReport { stage: k, ..AuditReport::default() };
    let Ok(u) = Universe::stage(k) else { return rep };
    let st = Stage::new(&u);
    let width = items
        .iter()
        .flat_map(|(f, deps)| std::iter::once(*f).chain(deps.iter()))
        .map(Formula::max_var)
        .max()
        .unwrap_or(0) as usize
        + 1;
    let its = interpretations(theory, &st, cfg);
    rep.interpretations = its.len();
    for (n, it) in its.iter().enumerate() {
        let mut cache: HashMap<&Formula, Option<bool>> = HashMap::new();
        let valid = |f: &Formula| {
            let mut ev = Eval { st: &st, it, slots: vec![0; width], fuel: cfg.budget };
            ev.valid(f)
        };
        for (i, (f, deps)) in items.iter().enumerate() {
            let mut dep_state = Some(true);
            for d in *deps {
                match *cache.entry(d).or_insert_with(|| valid(d)) {
                    Some(true) => {}
                    Some(false) => {
                        dep_state = Some(false);
                        break;
                    }
                    None => dep_state = None,
                }
            }
            match dep_state {
                Some(false) => rep.skipped_dependency += 1,
                None => rep.skipped_budget += 1,
                Some(true) => match valid(f) {
                    None => rep.skipped_budget += 1,
                    Some(ok) => {
                        rep.checked += 1;
                        if !ok {
                            rep.violations.push(Violation { step: i + 1, formula: render_formula(f), interpretation: n });
                        }
                    }
                },
            }
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use rst::script::{parse_proof, parse_theory};

    fn proof(th: &str, pf: &str) -> Proof {
        let t = parse_theory(th).unwrap();
        parse_proof(pf, &t).unwrap()
    }

    #[test]
    fn valid_steps_pass() {
        let p = proof("[extends]\nrst\n", "1. imp all x6 iff mem x6 x2 mem x6 x3 eq x2 x3 ; schema A1\n2. imp mem x1 x2 mem x1 x2 ; taut\n");
        let r = audit_proof(&p, 3, &AuditConfig::default());
        assert_eq!(r.checked, 2);
        assert!(r.violations.is_empty());
    }

    #[test]
    fn failing_dependency_skips() {
        let p = proof("[extends]\nrst\n", "1. ex x2 and mem x5 x2 mem x6 x2 ; schema A4\n");
        let r = audit_proof(&p, 2, &AuditConfig::default());
        assert_eq!(r.checked, 0);
        assert_eq!(r.skipped_dependency, 1);
    }

    #[test]
    fn hypotheses_are_dependencies() {
        let p = proof("[extends]\nempty\n[signature]\nconst c\npred q 1\n[axioms]\nk: q c\n", "1. q c ; basis k\n2. ex x1 q x1 ; prop 1\n");
        let r = audit_proof(&p, 2, &AuditConfig::default());
        assert!(r.interpretations > 1);
        assert!(r.violations.is_empty());
        assert!(r.skipped_dependency > 0);
    }

    #[test]
    fn unsound_step_is_caught() {
        let t = parse_theory("[extends]\nempty\n[signature]\npred a 1\n").unwrap();
        let bad = rst::syntax::parse_formula("ex x1 a x1", &t.signature).unwrap();
        let good = rst::syntax::parse_formula("imp a x1 a x1", &t.signature).unwrap();
        let r = audit_steps(&t, &[(&good, &[]), (&bad, &[])], 2, &AuditConfig::default());
        assert!(!r.violations.is_empty());
        assert!(r.violations.iter().all(|v| v.step == 2));
    }

    #[test]
    fn truncated_functions_are_total() {
        let st = Stage::new(&Universe::stage(2).unwrap());
        let it = standard_interp(&st);
        let (_, pw) = &it.funcs["pw"];
        assert_eq!(pw.len(), 2);
        assert!(pw.iter().all(|v| *v < 2));
    }
}
