//! Axiom schemas, definitional axioms and theories.
//!
//! Every schema is a template formula whose variables are placeholders; an
//! instance maps the placeholders injectively to variables. A2 and the
//! replacement schema carry a payload formula in place of the marker atom.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::syntax::{parse_formula, Formula, Signature, SyntaxError, Term, Variable};

const PAYLOAD: &str = "$F";

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum SchemaId {
    A1,
    A2,
    A3,
    A4,
    A5,
    /// A5 written with `sub`, `pw` and `pr`.
    A5Ext,
    A6,
    Repl,
    /// The defining axioms of a symbol in the extension chain.
    Def(String),
}

/// Symbols of the standard chain, in order.
pub const STANDARD_SYMBOLS: [&str; 6] = ["O", "sub", "un", "sg", "pr", "pw"];

impl SchemaId {
    /// The `n`-th standard definition, `1 ≤ n ≤ 6`.
    ///
    /// # Panics
    /// If `n` is out of range.
    #[must_use]
    pub fn e(n: usize) -> Self {
        SchemaId::Def(STANDARD_SYMBOLS[n - 1].to_string())
    }

    #[must_use]
    pub fn axioms() -> [SchemaId; 6] {
        [SchemaId::A1, SchemaId::A2, SchemaId::A3, SchemaId::A4, SchemaId::A5, SchemaId::A6]
    }

    #[must_use]
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "A1" => SchemaId::A1,
            "A2" => SchemaId::A2,
            "A3" => SchemaId::A3,
            "A4" => SchemaId::A4,
            "A5" => SchemaId::A5,
            "A5ext" | "A5-ext" => SchemaId::A5Ext,
            "A6" => SchemaId::A6,
            "Repl" => SchemaId::Repl,
            _ => {
                if let Some(n) = s.strip_prefix('E').and_then(|n| n.parse::<usize>().ok()) {
                    if (1..=6).contains(&n) {
                        return Some(SchemaId::e(n));
                    }
                    return None;
                }
                return s.strip_prefix("def:").map(|sym| SchemaId::Def(sym.to_string()));
            }
        })
    }

    #[must_use]
    pub fn has_payload(&self) -> bool {
        matches!(self, SchemaId::A2 | SchemaId::Repl)
    }
}

impl fmt::Display for SchemaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemaId::A1 => f.write_str("A1"),
            SchemaId::A2 => f.write_str("A2"),
            SchemaId::A3 => f.write_str("A3"),
            SchemaId::A4 => f.write_str("A4"),
            SchemaId::A5 => f.write_str("A5"),
            SchemaId::A5Ext => f.write_str("A5ext"),
            SchemaId::A6 => f.write_str("A6"),
            SchemaId::Repl => f.write_str("Repl"),
            SchemaId::Def(s) => match STANDARD_SYMBOLS.iter().position(|x| x == s) {
                Some(i) => write!(f, "E{}", i + 1),
                None => write!(f, "def:{s}"),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SchemaError {
    NotDistinct,
    WrongArity { expected: usize, found: usize },
    PayloadRequired,
    PayloadForbidden,
    /// A variable of the tuple occurs in the payload where it may not.
    Condition(String),
    UnknownSchema(String),
    Syntax(SyntaxError),
    DuplicateName(String),
    Definition(String),
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemaError::NotDistinct => write!(f, "schema variables must be distinct"),
            SchemaError::WrongArity { expected, found } => {
                write!(f, "schema takes {expected} variables, found {found}")
            }
            SchemaError::PayloadRequired => write!(f, "schema needs a payload formula"),
            SchemaError::PayloadForbidden => write!(f, "schema takes no payload formula"),
            SchemaError::Condition(m) => write!(f, "variable condition violated: {m}"),
            SchemaError::UnknownSchema(s) => write!(f, "unknown schema `{s}`"),
            SchemaError::Syntax(e) => write!(f, "{e}"),
            SchemaError::DuplicateName(n) => write!(f, "duplicate name `{n}`"),
            SchemaError::Definition(m) => write!(f, "bad definition: {m}"),
        }
    }
}

impl core::error::Error for SchemaError {}

impl From<SyntaxError> for SchemaError {
    fn from(e: SyntaxError) -> Self {
        SchemaError::Syntax(e)
    }
}

/// Placeholder letters: `t u v w x y z` are `x1 … x7` in templates.
fn tpl(text: &str) -> Formula {
    let mut s = String::new();
    for w in text.split_whitespace() {
        if !s.is_empty() {
            s.push(' ');
        }
        s.push_str(&letters(w));
    }
    let mut sig = Signature::rst_ext();
    sig.predicates.insert("F".to_string(), 0);
    let f = parse_formula(&s, &sig).expect("template parses");
    rename_payload(&f)
}

fn letters(w: &str) -> String {
    let mut out = String::new();
    let mut cur = String::new();
    let flush = |cur: &mut String, out: &mut String| {
        if !cur.is_empty() {
            let idx = match cur.as_str() {
                "t" => Some(1),
                "u" => Some(2),
                "v" => Some(3),
                "w" => Some(4),
                "x" => Some(5),
                "y" => Some(6),
                "z" => Some(7),
                _ => None,
            };
            match idx {
                Some(i) => out.push_str(&format!("x{i}")),
                None => out.push_str(cur),
            }
            cur.clear();
        }
    };
    for c in w.chars() {
        if c.is_ascii_alphanumeric() {
            cur.push(c);
        } else {
            flush(&mut cur, &mut out);
            out.push(c);
        }
    }
    flush(&mut cur, &mut out);
    out
}

fn rename_payload(f: &Formula) -> Formula {
    match f {
        Formula::Pred(p, args) if p == "F" && args.is_empty() => payload_marker(),
        _ if f.is_atomic() => f.clone(),
        _ => f.with_children(f.children().into_iter().map(rename_payload).collect()),
    }
}

fn payload_marker() -> Formula {
    Formula::Pred(PAYLOAD.to_string(), Vec::new())
}

/// Template formula of a fixed schema.
#[must_use]
pub fn template(id: &SchemaId) -> Option<Formula> {
    let text = match id {
        SchemaId::A1 => "imp all y iff mem y u mem y v eq u v",
        SchemaId::A2 => "ex u all y iff mem y u and mem y x F",
        SchemaId::A3 => "imp ex y mem y u ex y and mem y u not ex z and mem z u mem z y",
        SchemaId::A4 => "ex u and mem x u mem y u",
        SchemaId::A5 => concat!(
            "ex u and and and mem x u ",
            "all y imp mem y u all z imp mem z y mem z u ",
            "all y imp mem y u ex z and mem z u all v iff mem v z all w imp mem w v mem w y ",
            "all y imp mem y u all z imp mem z u ex v and and mem v u and mem y v mem z v ",
            "all w imp mem w v all t imp mem t w mem t v"
        ),
        SchemaId::A5Ext => concat!(
            "ex u and and and mem x u ",
            "all y imp mem y u sub y u ",
            "all y imp mem y u mem pw(y) u ",
            "all y imp mem y u all z imp mem z u ex v and and mem v u sub pr(y z) v ",
            "all w imp mem w v sub w v"
        ),
        SchemaId::A6 => concat!(
            "imp all x imp mem x u ex w mem w x ",
            "imp all x all y imp mem x u imp mem y u imp ex w and mem w x mem w y eq x y ",
            "ex y all x imp mem x u ex v and and mem v x mem v y ",
            "all w imp and mem w x mem w y eq v w"
        ),
        SchemaId::Repl => "imp all x ex z all y iff F mem y z ex u all y imp ex x and mem x v F mem y u",
        SchemaId::Def(s) => return Definition::standard(s).map(|d| d.axiom_template()),
    };
    Some(tpl(text))
}

/// Placeholders of a template in ascending order.
#[must_use]
pub fn placeholders(t: &Formula) -> Vec<Variable> {
    t.all_vars().into_iter().collect()
}

fn apply(t: &Formula, map: &BTreeMap<Variable, Variable>, payload: Option<&Formula>) -> Formula {
    match t {
        Formula::Pred(p, _) if p == PAYLOAD => payload.cloned().unwrap_or_else(payload_marker),
        Formula::All(x, a) => Formula::all(map[x], apply(a, map, payload)),
        Formula::Ex(x, a) => Formula::ex(map[x], apply(a, map, payload)),
        _ if t.is_atomic() => {
            let sub = |term: &Term| rename_term(term, map);
            match t {
                Formula::Eq(a, b) => Formula::Eq(sub(a), sub(b)),
                Formula::Mem(a, b) => Formula::Mem(sub(a), sub(b)),
                Formula::Pred(p, args) => Formula::Pred(p.clone(), args.iter().map(sub).collect()),
                _ => unreachable!(),
            }
        }
        _ => t.with_children(t.children().into_iter().map(|c| apply(c, map, payload)).collect()),
    }
}

fn rename_term(t: &Term, map: &BTreeMap<Variable, Variable>) -> Term {
    match t {
        Term::Var(v) => Term::Var(*map.get(v).unwrap_or(v)),
        Term::Const(_) => t.clone(),
        Term::App(g, args) => Term::App(g.clone(), args.iter().map(|a| rename_term(a, map)).collect()),
    }
}

/// Instantiate a template with `tuple` (one variable per placeholder, ascending).
///
/// # Errors
/// Wrong tuple length or non-distinct variables.
pub fn instantiate_template(
    t: &Formula,
    tuple: &[Variable],
    payload: Option<&Formula>,
) -> Result<Formula, SchemaError> {
    let ph = placeholders(t);
    if ph.len() != tuple.len() {
        return Err(SchemaError::WrongArity { expected: ph.len(), found: tuple.len() });
    }
    let distinct: BTreeSet<Variable> = tuple.iter().copied().collect();
    if distinct.len() != tuple.len() {
        return Err(SchemaError::NotDistinct);
    }
    let map: BTreeMap<Variable, Variable> = ph.into_iter().zip(tuple.iter().copied()).collect();
    Ok(apply(t, &map, payload))
}

struct Matcher {
    map: BTreeMap<Variable, Variable>,
    image: BTreeSet<Variable>,
    payload: Option<Formula>,
}

impl Matcher {
    fn bind(&mut self, p: Variable, a: Variable) -> bool {
        match self.map.get(&p) {
            Some(b) => *b == a,
            None => {
                if !self.image.insert(a) {
                    return false;
                }
                self.map.insert(p, a);
                true
            }
        }
    }

    fn term(&mut self, p: &Term, a: &Term) -> bool {
        match (p, a) {
            (Term::Var(x), Term::Var(y)) => self.bind(*x, *y),
            (Term::Const(c), Term::Const(d)) => c == d,
            (Term::App(g, xs), Term::App(h, ys)) => {
                g == h && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.term(x, y))
            }
            _ => false,
        }
    }

    fn formula(&mut self, p: &Formula, a: &Formula) -> bool {
        match (p, a) {
            (Formula::Pred(m, _), _) if m == PAYLOAD => match &self.payload {
                Some(f) => f == a,
                None => {
                    self.payload = Some(a.clone());
                    true
                }
            },
            (Formula::Eq(p1, p2), Formula::Eq(a1, a2)) | (Formula::Mem(p1, p2), Formula::Mem(a1, a2)) => {
                self.term(p1, a1) && self.term(p2, a2)
            }
            (Formula::Pred(q, xs), Formula::Pred(r, ys)) => {
                q == r && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.term(x, y))
            }
            (Formula::Not(x), Formula::Not(y)) => self.formula(x, y),
            (Formula::Imp(p1, p2), Formula::Imp(a1, a2))
            | (Formula::And(p1, p2), Formula::And(a1, a2))
            | (Formula::Or(p1, p2), Formula::Or(a1, a2))
            | (Formula::Iff(p1, p2), Formula::Iff(a1, a2)) => self.formula(p1, a1) && self.formula(p2, a2),
            (Formula::All(x, p1), Formula::All(y, a1)) | (Formula::Ex(x, p1), Formula::Ex(y, a1)) => {
                self.bind(*x, *y) && self.formula(p1, a1)
            }
            _ => false,
        }
    }
}

/// Match `f` against a template; returns the tuple and payload.
#[must_use]
pub fn match_template(t: &Formula, f: &Formula) -> Option<(Vec<Variable>, Option<Formula>)> {
    let mut m = Matcher { map: BTreeMap::new(), image: BTreeSet::new(), payload: None };
    if !m.formula(t, f) {
        return None;
    }
    let tuple = placeholders(t).into_iter().map(|p| m.map[&p]).collect();
    Some((tuple, m.payload))
}

fn tuple_var(id: &SchemaId, tuple: &[Variable], letter: char) -> Variable {
    let t = template(id).expect("fixed schema");
    let ph = placeholders(&t);
    let idx = match letter {
        't' => 1,
        'u' => 2,
        'v' => 3,
        'w' => 4,
        'x' => 5,
        'y' => 6,
        _ => 7,
    };
    let pos = ph.iter().position(|v| v.index() == idx).expect("letter in template");
    tuple[pos]
}

/// Side conditions of the payload schemas. Returns `Ok(true)` when the strict
/// condition holds and `Ok(false)` when only the relaxed A2 condition holds.
fn payload_condition(id: &SchemaId, tuple: &[Variable], payload: &Formula) -> Result<bool, SchemaError> {
    let vars = payload.all_vars();
    match id {
        SchemaId::A2 => {
            let u = tuple_var(id, tuple, 'u');
            let x = tuple_var(id, tuple, 'x');
            if !vars.contains(&u) && !vars.contains(&x) {
                Ok(true)
            } else if !payload.is_free(u) {
                Ok(false)
            } else {
                Err(SchemaError::Condition(format!("{u} is free in the payload")))
            }
        }
        SchemaId::Repl => {
            for l in ['u', 'v', 'z'] {
                let v = tuple_var(id, tuple, l);
                if vars.contains(&v) {
                    return Err(SchemaError::Condition(format!("{v} occurs in the payload")));
                }
            }
            Ok(true)
        }
        _ => Ok(true),
    }
}

/// Instantiate a fixed schema or a standard definition.
///
/// For A2 the strict condition `u, x ∉ var(F)` is enforced; see
/// [`instantiate_schema_relaxed`] for the sf form.
///
/// # Errors
/// See [`SchemaError`].
pub fn instantiate_schema(id: &SchemaId, tuple: &[Variable], payload: Option<&Formula>) -> Result<Formula, SchemaError> {
    instantiate_inner(id, tuple, payload, false)
}

/// As [`instantiate_schema`] but accepts A2 payloads with only `u ∉ free(F)`.
///
/// # Errors
/// See [`SchemaError`].
pub fn instantiate_schema_relaxed(
    id: &SchemaId,
    tuple: &[Variable],
    payload: Option<&Formula>,
) -> Result<Formula, SchemaError> {
    instantiate_inner(id, tuple, payload, true)
}

fn instantiate_inner(
    id: &SchemaId,
    tuple: &[Variable],
    payload: Option<&Formula>,
    relaxed: bool,
) -> Result<Formula, SchemaError> {
    let t = template(id).ok_or_else(|| SchemaError::UnknownSchema(id.to_string()))?;
    match (id.has_payload(), payload) {
        (true, None) => return Err(SchemaError::PayloadRequired),
        (false, Some(_)) => return Err(SchemaError::PayloadForbidden),
        _ => {}
    }
    let f = instantiate_template(&t, tuple, payload)?;
    if let Some(p) = payload {
        let strict = payload_condition(id, tuple, p)?;
        if !strict && !relaxed {
            return Err(SchemaError::Condition("u or x occurs in the payload".into()));
        }
    }
    Ok(f)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaMatch {
    pub id: SchemaId,
    pub tuple: Vec<Variable>,
    pub payload: Option<Formula>,
    /// A2 matched only under `u ∉ free(F)`.
    pub relaxed: bool,
}

/// Match `f` against one schema.
#[must_use]
pub fn match_schema(id: &SchemaId, template: &Formula, f: &Formula) -> Option<SchemaMatch> {
    let (tuple, payload) = match_template(template, f)?;
    let relaxed = match &payload {
        Some(p) => !payload_condition(id, &tuple, p).ok()?,
        None => false,
    };
    Some(SchemaMatch { id: id.clone(), tuple, payload, relaxed })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DefKind {
    Predicate,
    Constant,
    Function,
}

/// A definitional extension by a new symbol.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Definition {
    pub kind: DefKind,
    pub symbol: String,
    /// The defined value for constants and functions.
    pub u: Option<Variable>,
    pub params: Vec<Variable>,
    pub body: Formula,
}

impl Definition {
    /// # Errors
    /// Free-variable or distinctness conditions fail.
    pub fn new(
        kind: DefKind,
        symbol: &str,
        u: Option<Variable>,
        params: Vec<Variable>,
        body: Formula,
    ) -> Result<Self, SchemaError> {
        let d = Definition { kind, symbol: symbol.to_string(), u, params, body };
        d.validate()?;
        Ok(d)
    }

    fn validate(&self) -> Result<(), SchemaError> {
        let mut allowed: BTreeSet<Variable> = self.params.iter().copied().collect();
        if allowed.len() != self.params.len() {
            return Err(SchemaError::NotDistinct);
        }
        match (self.kind, self.u) {
            (DefKind::Predicate, None) => {
                if self.params.is_empty() {
                    return Err(SchemaError::Definition("predicates need arguments".into()));
                }
            }
            (DefKind::Constant, Some(u)) if self.params.is_empty() => {
                allowed.insert(u);
            }
            (DefKind::Function, Some(u)) if !self.params.is_empty() && !allowed.contains(&u) => {
                allowed.insert(u);
            }
            _ => return Err(SchemaError::Definition("designated variables do not fit the kind".into())),
        }
        if let Some(stray) = self.body.free_vars().into_iter().find(|v| !allowed.contains(v)) {
            return Err(SchemaError::Definition(format!("{stray} is free in the defining formula")));
        }
        let bound: BTreeSet<Variable> = self.body.all_vars().difference(&self.body.free_vars()).copied().collect();
        if let Some(v) = allowed.iter().find(|v| bound.contains(v)) {
            return Err(SchemaError::Definition(format!("{v} occurs bound in the defining formula")));
        }
        Ok(())
    }

    /// One of the six standard definitions, by symbol.
    #[must_use]
    pub fn standard(symbol: &str) -> Option<Definition> {
        let v = |c: char| Variable::new(match c {
            't' => 1,
            'u' => 2,
            'v' => 3,
            'w' => 4,
            'x' => 5,
            'y' => 6,
            _ => 7,
        });
        let (kind, u, params, body) = match symbol {
            "O" => (DefKind::Constant, Some(v('u')), vec![], "all y not mem y u"),
            "sub" => (DefKind::Predicate, None, vec![v('u'), v('v')], "all y imp mem y u mem y v"),
            "un" => (DefKind::Function, Some(v('u')), vec![v('x')], "all z iff mem z u ex y and mem z y mem y x"),
            "sg" => (DefKind::Function, Some(v('u')), vec![v('x')], "all y iff mem y u eq y x"),
            "pr" => (DefKind::Function, Some(v('u')), vec![v('x'), v('y')], "all z iff mem z u or eq z x eq z y"),
            "pw" => (DefKind::Function, Some(v('z')), vec![v('x')], "all v iff mem v z all w imp mem w v mem w x"),
            _ => return None,
        };
        Some(Definition { kind, symbol: symbol.to_string(), u, params, body: tpl(body) })
    }

    /// The defined atom or term equation: `P x…`, `eq u c` or `eq u f(x…)`.
    #[must_use]
    pub fn head(&self) -> Formula {
        let args: Vec<Term> = self.params.iter().map(|p| Term::Var(*p)).collect();
        match self.kind {
            DefKind::Predicate => Formula::Pred(self.symbol.clone(), args),
            DefKind::Constant => Formula::Eq(Term::Var(self.u.expect("u")), Term::Const(self.symbol.clone())),
            DefKind::Function => Formula::Eq(Term::Var(self.u.expect("u")), Term::App(self.symbol.clone(), args)),
        }
    }

    /// `iff head G`, the defining axiom family as a template.
    #[must_use]
    pub fn axiom_template(&self) -> Formula {
        Formula::iff(self.head(), self.body.clone())
    }

    /// `ex u G`.
    #[must_use]
    pub fn existence(&self) -> Option<Formula> {
        self.u.map(|u| Formula::ex(u, self.body.clone()))
    }

    /// `imp G imp G[v/u] eq u v` for the smallest fresh `v`.
    #[must_use]
    pub fn uniqueness(&self) -> Option<Formula> {
        let u = self.u?;
        let mut avoid = self.body.all_vars();
        avoid.insert(u);
        avoid.extend(self.params.iter().copied());
        let v = crate::syntax::fresh_var(&avoid);
        let g2 = crate::syntax::substitute(&self.body, u, &Term::Var(v)).ok()?;
        Some(Formula::imp(self.body.clone(), Formula::imp(g2, Formula::eq(u, v))))
    }

    #[must_use]
    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Axiom {
    pub name: String,
    pub formula: Formula,
    /// A hypothesis must be discharged before a proof may end.
    pub hypothesis: bool,
}

/// A named formula that should be proved by a corpus script.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Obligation {
    pub name: String,
    pub formula: Formula,
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Theory {
    pub signature: Signature,
    pub basis: Vec<Axiom>,
    pub active: BTreeSet<SchemaId>,
    pub sf: bool,
    pub chain: Vec<Definition>,
    /// Constants and functions added without a definition.
    pub scratch: BTreeSet<String>,
    pub obligations: Vec<Obligation>,
}

impl Theory {
    /// Pure logic: no schemas, no axioms.
    #[must_use]
    pub fn empty() -> Self {
        Self::default()
    }

    /// RST: A1–A6, subset-friendly.
    #[must_use]
    pub fn rst() -> Self {
        let mut t = Self::empty();
        t.active.extend(SchemaId::axioms());
        t.sf = true;
        t
    }

    /// RST with the six standard definitions.
    #[must_use]
    pub fn rst_ext() -> Self {
        let mut t = Self::rst();
        for s in STANDARD_SYMBOLS {
            t = t.extend_by_definition(Definition::standard(s).expect("standard")).expect("fresh symbol");
        }
        t
    }

    #[must_use]
    pub fn axiom(&self, name: &str) -> Option<&Axiom> {
        self.basis.iter().find(|a| a.name == name)
    }

    #[must_use]
    pub fn definition(&self, symbol: &str) -> Option<&Definition> {
        self.chain.iter().find(|d| d.symbol == symbol)
    }

    /// Whether a schema id can be used in this theory.
    #[must_use]
    pub fn is_active(&self, id: &SchemaId) -> bool {
        match id {
            SchemaId::Def(s) => self.definition(s).is_some(),
            _ => self.active.contains(id),
        }
    }

    /// Template of an active schema.
    #[must_use]
    pub fn template(&self, id: &SchemaId) -> Option<Formula> {
        match id {
            SchemaId::Def(s) => self.definition(s).map(Definition::axiom_template),
            _ => template(id),
        }
    }

    fn active_ids(&self) -> Vec<SchemaId> {
        let mut ids: Vec<SchemaId> = self.active.iter().filter(|i| !matches!(i, SchemaId::Def(_))).cloned().collect();
        ids.extend(self.chain.iter().map(|d| SchemaId::Def(d.symbol.clone())));
        ids
    }

    /// Instantiate an active schema in this theory. A2 follows the theory's sf flag.
    ///
    /// # Errors
    /// Inactive schema or a failed side condition.
    pub fn instantiate(&self, id: &SchemaId, tuple: &[Variable], payload: Option<&Formula>) -> Result<Formula, SchemaError> {
        if !self.is_active(id) {
            return Err(SchemaError::UnknownSchema(id.to_string()));
        }
        let t = self.template(id).ok_or_else(|| SchemaError::UnknownSchema(id.to_string()))?;
        match (id.has_payload(), payload) {
            (true, None) => return Err(SchemaError::PayloadRequired),
            (false, Some(_)) => return Err(SchemaError::PayloadForbidden),
            _ => {}
        }
        let f = instantiate_template(&t, tuple, payload)?;
        if let Some(p) = payload {
            self.signature.check_formula(p)?;
            if !payload_condition(id, tuple, p)? && !self.sf {
                return Err(SchemaError::Condition("u or x occurs in the payload".into()));
            }
        }
        Ok(f)
    }

    /// The exact schema instance `f` is, if any. Relaxed A2 matches are
    /// returned only for sf theories.
    #[must_use]
    pub fn classify(&self, f: &Formula) -> Option<SchemaMatch> {
        self.active_ids().into_iter().find_map(|id| {
            let t = self.template(&id)?;
            let m = match_schema(&id, &t, f)?;
            if m.relaxed && !self.sf {
                return None;
            }
            if let Some(p) = &m.payload {
                self.signature.check_formula(p).ok()?;
            }
            Some(m)
        })
    }

    /// # Errors
    /// Duplicate name or a formula outside the signature.
    pub fn extend_with_axiom(&self, name: &str, f: Formula) -> Result<Theory, SchemaError> {
        self.push_axiom(name, f, false)
    }

    /// Add an axiom that proofs must discharge.
    ///
    /// # Errors
    /// As [`Theory::extend_with_axiom`]; hypotheses must be closed.
    pub fn extend_with_hypothesis(&self, name: &str, f: Formula) -> Result<Theory, SchemaError> {
        if !f.is_closed() {
            return Err(SchemaError::Condition(format!("hypothesis `{name}` is not closed")));
        }
        self.push_axiom(name, f, true)
    }

    fn push_axiom(&self, name: &str, f: Formula, hypothesis: bool) -> Result<Theory, SchemaError> {
        if self.axiom(name).is_some() {
            return Err(SchemaError::DuplicateName(name.to_string()));
        }
        self.signature.check_formula(&f)?;
        let mut t = self.clone();
        t.basis.push(Axiom { name: name.to_string(), formula: f, hypothesis });
        Ok(t)
    }

    /// # Errors
    /// Name clash.
    pub fn extend_with_constant(&self, c: &str) -> Result<Theory, SchemaError> {
        let mut t = self.clone();
        t.signature.add_constant(c)?;
        t.scratch.insert(c.to_string());
        Ok(t)
    }

    /// A new function symbol without defining axioms.
    ///
    /// # Errors
    /// Name clash.
    pub fn extend_with_function(&self, f: &str, arity: usize) -> Result<Theory, SchemaError> {
        let mut t = self.clone();
        t.signature.add_function(f, arity)?;
        t.scratch.insert(f.to_string());
        Ok(t)
    }

    /// # Errors
    /// Invalid definition, symbol clash, or a body outside the signature.
    pub fn extend_by_definition(&self, d: Definition) -> Result<Theory, SchemaError> {
        d.validate()?;
        self.signature.check_formula(&d.body)?;
        let mut t = self.clone();
        match d.kind {
            DefKind::Predicate => t.signature.add_predicate(&d.symbol, d.arity())?,
            DefKind::Constant => t.signature.add_constant(&d.symbol)?,
            DefKind::Function => t.signature.add_function(&d.symbol, d.arity())?,
        }
        let label = SchemaId::Def(d.symbol.clone()).to_string();
        if let Some(e) = d.existence() {
            t.obligations.push(Obligation { name: format!("{label}-exists"), formula: e });
        }
        if let Some(u) = d.uniqueness() {
            t.obligations.push(Obligation { name: format!("{label}-unique"), formula: u });
        }
        t.chain.push(d);
        Ok(t)
    }

    /// Activate or deactivate a schema.
    #[must_use]
    pub fn with_schema(&self, id: SchemaId, on: bool) -> Theory {
        let mut t = self.clone();
        if on {
            t.active.insert(id);
        } else {
            t.active.remove(&id);
        }
        t
    }
}
