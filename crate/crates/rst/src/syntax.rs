//! Terms and formulas in prefix notation.
//!
//! Concrete grammar, tokens separated by whitespace:
//!
//! ```text
//! formula := eq t t | mem t t | P t.. | not f | imp f f | and f f
//!          | or f f | iff f f | all xN f | ex xN f
//! term    := xN | c | g(t ..)
//! ```

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// A variable `xN`, `N >= 1`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Variable(u32);

impl Variable {
    /// # Panics
    /// If `index` is zero.
    #[must_use]
    pub fn new(index: u32) -> Self {
        assert!(index >= 1, "variable index must be positive");
        Self(index)
    }

    #[must_use]
    pub fn index(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// Shorthand for `Variable::new`.
#[must_use]
pub fn var(index: u32) -> Variable {
    Variable::new(index)
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Term {
    Var(Variable),
    Const(String),
    App(String, Vec<Term>),
}

impl Term {
    #[must_use]
    pub fn var(index: u32) -> Self {
        Term::Var(Variable::new(index))
    }

    #[must_use]
    pub fn as_var(&self) -> Option<Variable> {
        match self {
            Term::Var(v) => Some(*v),
            _ => None,
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Variable>) {
        match self {
            Term::Var(v) => {
                out.insert(*v);
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    #[must_use]
    pub fn vars(&self) -> BTreeSet<Variable> {
        let mut s = BTreeSet::new();
        self.collect_vars(&mut s);
        s
    }

    #[must_use]
    pub fn contains_var(&self, x: Variable) -> bool {
        match self {
            Term::Var(v) => *v == x,
            Term::Const(_) => false,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(x)),
        }
    }

    /// Whether the symbol `name` occurs in the term.
    #[must_use]
    pub fn mentions(&self, name: &str) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(c) => c == name,
            Term::App(g, args) => g == name || args.iter().any(|a| a.mentions(name)),
        }
    }

    #[must_use]
    pub fn subst_var(&self, x: Variable, t: &Term) -> Term {
        match self {
            Term::Var(v) if *v == x => t.clone(),
            Term::Var(_) | Term::Const(_) => self.clone(),
            Term::App(g, args) => Term::App(g.clone(), args.iter().map(|a| a.subst_var(x, t)).collect()),
        }
    }

    #[must_use]
    pub fn replace_const(&self, c: &str, t: &Term) -> Term {
        match self {
            Term::Const(d) if d == c => t.clone(),
            Term::Var(_) | Term::Const(_) => self.clone(),
            Term::App(g, args) => Term::App(g.clone(), args.iter().map(|a| a.replace_const(c, t)).collect()),
        }
    }

    /// Max variable index, 0 if none.
    #[must_use]
    pub fn max_var(&self) -> u32 {
        match self {
            Term::Var(v) => v.0,
            Term::Const(_) => 0,
            Term::App(_, args) => args.iter().map(Term::max_var).max().unwrap_or(0),
        }
    }
}

impl From<Variable> for Term {
    fn from(v: Variable) -> Self {
        Term::Var(v)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Formula {
    Eq(Term, Term),
    Mem(Term, Term),
    /// A defined predicate such as `sub`.
    Pred(String, Vec<Term>),
    Not(Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    All(Variable, Box<Formula>),
    Ex(Variable, Box<Formula>),
}

/// Path of child indices from the root of a formula.
pub type Position = [usize];

#[allow(clippy::should_implement_trait)]
impl Formula {
    pub fn eq(a: impl Into<Term>, b: impl Into<Term>) -> Self {
        Formula::Eq(a.into(), b.into())
    }
    pub fn mem(a: impl Into<Term>, b: impl Into<Term>) -> Self {
        Formula::Mem(a.into(), b.into())
    }
    #[must_use]
    pub fn not(a: Formula) -> Self {
        Formula::Not(Box::new(a))
    }
    #[must_use]
    pub fn imp(a: Formula, b: Formula) -> Self {
        Formula::Imp(Box::new(a), Box::new(b))
    }
    #[must_use]
    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }
    #[must_use]
    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }
    #[must_use]
    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }
    #[must_use]
    pub fn all(x: Variable, a: Formula) -> Self {
        Formula::All(x, Box::new(a))
    }
    #[must_use]
    pub fn ex(x: Variable, a: Formula) -> Self {
        Formula::Ex(x, Box::new(a))
    }

    #[must_use]
    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Eq(..) | Formula::Mem(..) | Formula::Pred(..))
    }

    /// Atom arguments, if atomic.
    #[must_use]
    pub fn atom_args(&self) -> Option<Vec<&Term>> {
        match self {
            Formula::Eq(a, b) | Formula::Mem(a, b) => Some(alloc::vec![a, b]),
            Formula::Pred(_, args) => Some(args.iter().collect()),
            _ => None,
        }
    }

    /// Immediate subformulas, in order.
    #[must_use]
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Eq(..) | Formula::Mem(..) | Formula::Pred(..) => Vec::new(),
            Formula::Not(a) | Formula::All(_, a) | Formula::Ex(_, a) => alloc::vec![&**a],
            Formula::Imp(a, b) | Formula::And(a, b) | Formula::Or(a, b) | Formula::Iff(a, b) => {
                alloc::vec![&**a, &**b]
            }
        }
    }

    fn collect_free(&self, bound: &mut Vec<Variable>, out: &mut BTreeSet<Variable>) {
        match self {
            Formula::Eq(..) | Formula::Mem(..) | Formula::Pred(..) => {
                for t in self.atom_args().unwrap_or_default() {
                    for v in t.vars() {
                        if !bound.contains(&v) {
                            out.insert(v);
                        }
                    }
                }
            }
            Formula::All(x, a) | Formula::Ex(x, a) => {
                bound.push(*x);
                a.collect_free(bound, out);
                bound.pop();
            }
            _ => self.children().into_iter().for_each(|c| c.collect_free(bound, out)),
        }
    }

    #[must_use]
    pub fn free_vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    #[must_use]
    pub fn is_free(&self, x: Variable) -> bool {
        match self {
            Formula::Eq(a, b) | Formula::Mem(a, b) => a.contains_var(x) || b.contains_var(x),
            Formula::Pred(_, args) => args.iter().any(|a| a.contains_var(x)),
            Formula::All(y, a) | Formula::Ex(y, a) => *y != x && a.is_free(x),
            _ => self.children().into_iter().any(|c| c.is_free(x)),
        }
    }

    #[must_use]
    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    fn collect_all(&self, out: &mut BTreeSet<Variable>) {
        match self {
            Formula::Eq(..) | Formula::Mem(..) | Formula::Pred(..) => {
                for t in self.atom_args().unwrap_or_default() {
                    t.collect_vars(out);
                }
            }
            Formula::All(x, a) | Formula::Ex(x, a) => {
                out.insert(*x);
                a.collect_all(out);
            }
            _ => self.children().into_iter().for_each(|c| c.collect_all(out)),
        }
    }

    /// Free, bound and binder variables.
    #[must_use]
    pub fn all_vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.collect_all(&mut out);
        out
    }

    /// Max variable index occurring anywhere, 0 if none.
    #[must_use]
    pub fn max_var(&self) -> u32 {
        self.all_vars().iter().next_back().map_or(0, |v| v.0)
    }

    /// Symbols (constants, functions, defined predicates) occurring in the formula.
    #[must_use]
    pub fn symbols(&self) -> BTreeSet<String> {
        fn term(t: &Term, out: &mut BTreeSet<String>) {
            match t {
                Term::Var(_) => {}
                Term::Const(c) => {
                    out.insert(c.clone());
                }
                Term::App(g, args) => {
                    out.insert(g.clone());
                    args.iter().for_each(|a| term(a, out));
                }
            }
        }
        fn go(f: &Formula, out: &mut BTreeSet<String>) {
            if let Formula::Pred(p, _) = f {
                out.insert(p.clone());
            }
            if let Some(args) = f.atom_args() {
                args.into_iter().for_each(|a| term(a, out));
            }
            f.children().into_iter().for_each(|c| go(c, out));
        }
        let mut out = BTreeSet::new();
        go(self, &mut out);
        out
    }

    #[must_use]
    pub fn mentions(&self, name: &str) -> bool {
        self.symbols().contains(name)
    }

    /// Base language: only `eq`/`mem` atoms over variables.
    #[must_use]
    pub fn is_base(&self) -> bool {
        match self {
            Formula::Eq(a, b) | Formula::Mem(a, b) => a.as_var().is_some() && b.as_var().is_some(),
            Formula::Pred(..) => false,
            _ => self.children().into_iter().all(Formula::is_base),
        }
    }

    fn map_atoms(&self, f: &impl Fn(&Term) -> Term) -> Formula {
        match self {
            Formula::Eq(a, b) => Formula::Eq(f(a), f(b)),
            Formula::Mem(a, b) => Formula::Mem(f(a), f(b)),
            Formula::Pred(p, args) => Formula::Pred(p.clone(), args.iter().map(f).collect()),
            Formula::Not(a) => Formula::not(a.map_atoms(f)),
            Formula::Imp(a, b) => Formula::imp(a.map_atoms(f), b.map_atoms(f)),
            Formula::And(a, b) => Formula::and(a.map_atoms(f), b.map_atoms(f)),
            Formula::Or(a, b) => Formula::or(a.map_atoms(f), b.map_atoms(f)),
            Formula::Iff(a, b) => Formula::iff(a.map_atoms(f), b.map_atoms(f)),
            Formula::All(x, a) => Formula::all(*x, a.map_atoms(f)),
            Formula::Ex(x, a) => Formula::ex(*x, a.map_atoms(f)),
        }
    }

    /// Rebuild a node with new children (same arity).
    #[must_use]
    pub fn with_children(&self, mut kids: Vec<Formula>) -> Formula {
        let mut next = || kids.remove(0);
        match self {
            Formula::Eq(..) | Formula::Mem(..) | Formula::Pred(..) => self.clone(),
            Formula::Not(_) => Formula::not(next()),
            Formula::Imp(..) => {
                let a = next();
                Formula::imp(a, next())
            }
            Formula::And(..) => {
                let a = next();
                Formula::and(a, next())
            }
            Formula::Or(..) => {
                let a = next();
                Formula::or(a, next())
            }
            Formula::Iff(..) => {
                let a = next();
                Formula::iff(a, next())
            }
            Formula::All(x, _) => Formula::all(*x, next()),
            Formula::Ex(x, _) => Formula::ex(*x, next()),
        }
    }

    #[must_use]
    pub fn subformula_at(&self, pos: &Position) -> Option<&Formula> {
        match pos.split_first() {
            None => Some(self),
            Some((i, rest)) => self.children().get(*i).and_then(|c| c.subformula_at(rest)),
        }
    }

    /// Replace the subformula at `pos`; `None` if the position is invalid.
    #[must_use]
    pub fn replace_at(&self, pos: &Position, g: Formula) -> Option<Formula> {
        match pos.split_first() {
            None => Some(g),
            Some((i, rest)) => {
                let kids = self.children();
                let child = kids.get(*i)?;
                let new = child.replace_at(rest, g)?;
                let mut owned: Vec<Formula> = kids.into_iter().cloned().collect();
                owned[*i] = new;
                Some(self.with_children(owned))
            }
        }
    }

    /// Variables bound by quantifiers enclosing `pos`.
    #[must_use]
    pub fn binders_above(&self, pos: &Position) -> Vec<Variable> {
        let mut out = Vec::new();
        let mut cur = self;
        for i in pos {
            if let Formula::All(x, _) | Formula::Ex(x, _) = cur {
                out.push(*x);
            }
            match cur.children().get(*i) {
                Some(c) => cur = c,
                None => break,
            }
        }
        out
    }

    /// Replace every occurrence of constant `c` by `t` (no variable checks).
    #[must_use]
    pub fn replace_const_raw(&self, c: &str, t: &Term) -> Formula {
        self.map_atoms(&|a| a.replace_const(c, t))
    }

    /// Number of nodes.
    #[must_use]
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Formula::size).sum::<usize>()
    }
}

/// Universal closure over the free variables in ascending order.
#[must_use]
pub fn closure(f: &Formula) -> Formula {
    f.free_vars().into_iter().rev().fold(f.clone(), |acc, x| Formula::all(x, acc))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SyntaxError {
    Empty,
    UnexpectedEnd,
    UnknownSymbol(String),
    Arity { symbol: String, expected: usize, found: usize },
    Trailing(String),
    BadBinder(String),
    Unexpected(String),
    /// A binder that would capture a variable of the substituted term.
    Collision { binder: Variable },
    NotFresh(Variable),
    NameClash(String),
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SyntaxError::Empty => write!(f, "empty input"),
            SyntaxError::UnexpectedEnd => write!(f, "unexpected end of input"),
            SyntaxError::UnknownSymbol(s) => write!(f, "unknown symbol `{s}`"),
            SyntaxError::Arity { symbol, expected, found } => {
                write!(f, "`{symbol}` takes {expected} argument(s), found {found}")
            }
            SyntaxError::Trailing(s) => write!(f, "trailing input starting at `{s}`"),
            SyntaxError::BadBinder(s) => write!(f, "quantifier binder must be a variable, found `{s}`"),
            SyntaxError::Unexpected(s) => write!(f, "unexpected token `{s}`"),
            SyntaxError::Collision { binder } => write!(f, "substitution captured by binder {binder}"),
            SyntaxError::NotFresh(v) => write!(f, "variable {v} is not fresh"),
            SyntaxError::NameClash(s) => write!(f, "symbol `{s}` already declared"),
        }
    }
}

impl core::error::Error for SyntaxError {}

const KEYWORDS: [&str; 9] = ["eq", "mem", "not", "imp", "and", "or", "iff", "all", "ex"];

/// Parse `xN` with `N >= 1` and no leading zeros.
#[must_use]
pub fn parse_variable(tok: &str) -> Option<Variable> {
    let digits = tok.strip_prefix('x')?;
    if digits.is_empty() || digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse::<u32>().ok().map(Variable)
}

/// Constants, function symbols and defined predicates. `eq` and `mem` are implicit.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub constants: BTreeSet<String>,
    pub functions: BTreeMap<String, usize>,
    pub predicates: BTreeMap<String, usize>,
}

impl Signature {
    #[must_use]
    pub fn new() -> Self {
        Self::default()
    }

    /// `O`, `un`, `sg`, `pr`, `pw` and `sub`.
    #[must_use]
    pub fn rst_ext() -> Self {
        let mut s = Self::new();
        s.add_constant("O").expect("fresh");
        s.add_function("un", 1).expect("fresh");
        s.add_function("sg", 1).expect("fresh");
        s.add_function("pr", 2).expect("fresh");
        s.add_function("pw", 1).expect("fresh");
        s.add_predicate("sub", 2).expect("fresh");
        s
    }

    #[must_use]
    pub fn contains(&self, name: &str) -> bool {
        self.constants.contains(name) || self.functions.contains_key(name) || self.predicates.contains_key(name)
    }

    fn check_name(&self, name: &str) -> Result<(), SyntaxError> {
        let ok = !name.is_empty()
            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
            && !KEYWORDS.contains(&name)
            && parse_variable(name).is_none()
            && !name.starts_with(|c: char| c.is_ascii_digit());
        if !ok {
            return Err(SyntaxError::Unexpected(name.to_string()));
        }
        if self.contains(name) {
            return Err(SyntaxError::NameClash(name.to_string()));
        }
        Ok(())
    }

    /// # Errors
    /// Invalid or clashing name.
    pub fn add_constant(&mut self, name: &str) -> Result<(), SyntaxError> {
        self.check_name(name)?;
        self.constants.insert(name.to_string());
        Ok(())
    }

    /// # Errors
    /// Invalid or clashing name, or zero arity.
    pub fn add_function(&mut self, name: &str, arity: usize) -> Result<(), SyntaxError> {
        self.check_name(name)?;
        if arity == 0 {
            return Err(SyntaxError::Arity { symbol: name.to_string(), expected: 1, found: 0 });
        }
        self.functions.insert(name.to_string(), arity);
        Ok(())
    }

    /// # Errors
    /// Invalid or clashing name, or zero arity.
    pub fn add_predicate(&mut self, name: &str, arity: usize) -> Result<(), SyntaxError> {
        self.check_name(name)?;
        if arity == 0 {
            return Err(SyntaxError::Arity { symbol: name.to_string(), expected: 1, found: 0 });
        }
        self.predicates.insert(name.to_string(), arity);
        Ok(())
    }

    /// Every symbol of `f` is declared with the right arity.
    ///
    /// # Errors
    /// The first undeclared or misapplied symbol.
    pub fn check_formula(&self, f: &Formula) -> Result<(), SyntaxError> {
        if let Formula::Pred(p, args) = f {
            match self.predicates.get(p) {
                None => return Err(SyntaxError::UnknownSymbol(p.clone())),
                Some(&n) if n != args.len() => {
                    return Err(SyntaxError::Arity { symbol: p.clone(), expected: n, found: args.len() })
                }
                _ => {}
            }
        }
        if let Some(args) = f.atom_args() {
            for t in args {
                self.check_term(t)?;
            }
        }
        f.children().into_iter().try_for_each(|c| self.check_formula(c))
    }

    /// # Errors
    /// The first undeclared or misapplied symbol.
    pub fn check_term(&self, t: &Term) -> Result<(), SyntaxError> {
        match t {
            Term::Var(_) => Ok(()),
            Term::Const(c) if self.constants.contains(c) => Ok(()),
            Term::Const(c) => Err(SyntaxError::UnknownSymbol(c.clone())),
            Term::App(g, args) => match self.functions.get(g) {
                None => Err(SyntaxError::UnknownSymbol(g.clone())),
                Some(&n) if n != args.len() => Err(SyntaxError::Arity { symbol: g.clone(), expected: n, found: args.len() }),
                Some(_) => args.iter().try_for_each(|a| self.check_term(a)),
            },
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Tok<'a> {
    Word(&'a str),
    Open,
    Close,
}

impl fmt::Display for Tok<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => f.write_str(w),
            Tok::Open => f.write_str("("),
            Tok::Close => f.write_str(")"),
        }
    }
}

fn tokenize(text: &str) -> Vec<Tok<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        if c.is_whitespace() || c == '(' || c == ')' {
            if let Some(s) = start.take() {
                out.push(Tok::Word(&text[s..i]));
            }
            if c == '(' {
                out.push(Tok::Open);
            } else if c == ')' {
                out.push(Tok::Close);
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Tok::Word(&text[s..]));
    }
    out
}

struct Parser<'a, 's> {
    toks: Vec<Tok<'a>>,
    pos: usize,
    sig: &'s Signature,
}

impl<'a> Parser<'a, '_> {
    fn next(&mut self) -> Result<Tok<'a>, SyntaxError> {
        let t = self.toks.get(self.pos).copied().ok_or(SyntaxError::UnexpectedEnd)?;
        self.pos += 1;
        Ok(t)
    }

    fn peek(&self) -> Option<Tok<'a>> {
        self.toks.get(self.pos).copied()
    }

    fn term(&mut self) -> Result<Term, SyntaxError> {
        let w = match self.next()? {
            Tok::Word(w) => w,
            t => return Err(SyntaxError::Unexpected(t.to_string())),
        };
        if let Some(v) = parse_variable(w) {
            return Ok(Term::Var(v));
        }
        if self.sig.constants.contains(w) {
            return Ok(Term::Const(w.to_string()));
        }
        let Some(&arity) = self.sig.functions.get(w) else {
            return Err(SyntaxError::UnknownSymbol(w.to_string()));
        };
        match self.next()? {
            Tok::Open => {}
            t => return Err(SyntaxError::Unexpected(t.to_string())),
        }
        let mut args = Vec::new();
        loop {
            match self.peek() {
                None => return Err(SyntaxError::UnexpectedEnd),
                Some(Tok::Close) => {
                    self.pos += 1;
                    break;
                }
                Some(_) => args.push(self.term()?),
            }
        }
        if args.len() != arity {
            return Err(SyntaxError::Arity { symbol: w.to_string(), expected: arity, found: args.len() });
        }
        Ok(Term::App(w.to_string(), args))
    }

    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        let w = match self.next()? {
            Tok::Word(w) => w,
            t => return Err(SyntaxError::Unexpected(t.to_string())),
        };
        Ok(match w {
            "eq" => Formula::Eq(self.term()?, self.term()?),
            "mem" => Formula::Mem(self.term()?, self.term()?),
            "not" => Formula::not(self.formula()?),
            "imp" => Formula::imp(self.formula()?, self.formula()?),
            "and" => Formula::and(self.formula()?, self.formula()?),
            "or" => Formula::or(self.formula()?, self.formula()?),
            "iff" => Formula::iff(self.formula()?, self.formula()?),
            "all" | "ex" => {
                let b = match self.next()? {
                    Tok::Word(b) => parse_variable(b).ok_or_else(|| SyntaxError::BadBinder(b.to_string()))?,
                    t => return Err(SyntaxError::BadBinder(t.to_string())),
                };
                let body = self.formula()?;
                if w == "all" {
                    Formula::all(b, body)
                } else {
                    Formula::ex(b, body)
                }
            }
            p => {
                let Some(&arity) = self.sig.predicates.get(p) else {
                    return Err(SyntaxError::UnknownSymbol(p.to_string()));
                };
                let args = (0..arity).map(|_| self.term()).collect::<Result<Vec<_>, _>>()?;
                Formula::Pred(p.to_string(), args)
            }
        })
    }

    fn finish(&self) -> Result<(), SyntaxError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(SyntaxError::Trailing(t.to_string())),
        }
    }
}

fn parser<'a, 's>(text: &'a str, sig: &'s Signature) -> Result<Parser<'a, 's>, SyntaxError> {
    let toks = tokenize(text);
    if toks.is_empty() {
        return Err(SyntaxError::Empty);
    }
    Ok(Parser { toks, pos: 0, sig })
}

/// # Errors
/// Unknown symbol, arity mismatch, trailing tokens or empty input.
pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, SyntaxError> {
    let mut p = parser(text, sig)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

/// # Errors
/// As [`parse_term`], plus malformed quantifiers.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, SyntaxError> {
    let mut p = parser(text, sig)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => f.write_str(c),
            Term::App(g, args) => {
                write!(f, "{g}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Eq(a, b) => write!(f, "eq {a} {b}"),
            Formula::Mem(a, b) => write!(f, "mem {a} {b}"),
            Formula::Pred(p, args) => {
                f.write_str(p)?;
                args.iter().try_for_each(|a| write!(f, " {a}"))
            }
            Formula::Not(a) => write!(f, "not {a}"),
            Formula::Imp(a, b) => write!(f, "imp {a} {b}"),
            Formula::And(a, b) => write!(f, "and {a} {b}"),
            Formula::Or(a, b) => write!(f, "or {a} {b}"),
            Formula::Iff(a, b) => write!(f, "iff {a} {b}"),
            Formula::All(x, a) => write!(f, "all {x} {a}"),
            Formula::Ex(x, a) => write!(f, "ex {x} {a}"),
        }
    }
}

#[must_use]
pub fn render_formula(f: &Formula) -> String {
    f.to_string()
}

#[must_use]
pub fn render_term(t: &Term) -> String {
    t.to_string()
}

fn subst(f: &Formula, x: Variable, t: &Term, tv: &BTreeSet<Variable>) -> Result<Formula, SyntaxError> {
    Ok(match f {
        Formula::Eq(..) | Formula::Mem(..) | Formula::Pred(..) => f.map_atoms(&|a| a.subst_var(x, t)),
        Formula::All(y, a) | Formula::Ex(y, a) => {
            if *y == x || !a.is_free(x) {
                return Ok(f.clone());
            }
            if tv.contains(y) {
                return Err(SyntaxError::Collision { binder: *y });
            }
            let body = subst(a, x, t, tv)?;
            if matches!(f, Formula::All(..)) {
                Formula::all(*y, body)
            } else {
                Formula::ex(*y, body)
            }
        }
        _ => {
            let kids = f.children().into_iter().map(|c| subst(c, x, t, tv)).collect::<Result<Vec<_>, _>>()?;
            f.with_children(kids)
        }
    })
}

/// Replace the free occurrences of `x` by `t`.
///
/// # Errors
/// [`SyntaxError::Collision`] naming the outermost capturing binder.
pub fn substitute(f: &Formula, x: Variable, t: &Term) -> Result<Formula, SyntaxError> {
    subst(f, x, t, &t.vars())
}

/// Replace constant `c` by `t`, checking that no variable of `t` is captured.
///
/// # Errors
/// [`SyntaxError::Collision`].
pub fn substitute_const(f: &Formula, c: &str, t: &Term) -> Result<Formula, SyntaxError> {
    fn go(f: &Formula, c: &str, t: &Term, tv: &BTreeSet<Variable>) -> Result<Formula, SyntaxError> {
        match f {
            Formula::All(y, a) | Formula::Ex(y, a) => {
                if tv.contains(y) && a.mentions(c) {
                    return Err(SyntaxError::Collision { binder: *y });
                }
                let body = go(a, c, t, tv)?;
                Ok(f.with_children(alloc::vec![body]))
            }
            _ if f.is_atomic() => Ok(f.replace_const_raw(c, t)),
            _ => {
                let kids = f.children().into_iter().map(|k| go(k, c, t, tv)).collect::<Result<Vec<_>, _>>()?;
                Ok(f.with_children(kids))
            }
        }
    }
    go(f, c, t, &t.vars())
}

/// Rename every binder on `old` and the occurrences it binds to `fresh`.
///
/// # Errors
/// [`SyntaxError::NotFresh`] if `fresh` occurs in `f`.
pub fn rename_bound(f: &Formula, old: Variable, fresh: Variable) -> Result<Formula, SyntaxError> {
    fn go(f: &Formula, old: Variable, fresh: Variable) -> Formula {
        match f {
            Formula::All(y, a) if *y == old => {
                Formula::all(fresh, go(a, old, fresh).map_atoms(&|t| t.subst_var(old, &Term::Var(fresh))))
            }
            Formula::Ex(y, a) if *y == old => {
                Formula::ex(fresh, go(a, old, fresh).map_atoms(&|t| t.subst_var(old, &Term::Var(fresh))))
            }
            _ if f.is_atomic() => f.clone(),
            _ => f.with_children(f.children().into_iter().map(|c| go(c, old, fresh)).collect()),
        }
    }
    if f.all_vars().contains(&fresh) {
        return Err(SyntaxError::NotFresh(fresh));
    }
    Ok(go(f, old, fresh))
}

/// Smallest variable not in `avoid`.
#[must_use]
pub fn fresh_var(avoid: &BTreeSet<Variable>) -> Variable {
    let mut i = 1;
    while avoid.contains(&Variable(i)) {
        i += 1;
    }
    Variable(i)
}

/// Rename the binders of `f` whose variable lies in `avoid` to fresh
/// variables, so that substituting terms over `avoid` cannot be captured.
#[must_use]
pub fn rename_apart(f: &Formula, avoid: &BTreeSet<Variable>) -> Formula {
    // Bottom-up: inner binders on `y` are renamed first, so every remaining
    // occurrence of `y` in a body is bound by the enclosing binder.
    fn go(f: &Formula, avoid: &BTreeSet<Variable>, used: &mut BTreeSet<Variable>) -> Formula {
        match f {
            Formula::All(y, a) | Formula::Ex(y, a) => {
                let body = go(a, avoid, used);
                if avoid.contains(y) {
                    let z = fresh_var(used);
                    used.insert(z);
                    let body = body.map_atoms(&|t| t.subst_var(*y, &Term::Var(z)));
                    if matches!(f, Formula::All(..)) {
                        Formula::all(z, body)
                    } else {
                        Formula::ex(z, body)
                    }
                } else {
                    f.with_children(alloc::vec![body])
                }
            }
            _ if f.is_atomic() => f.clone(),
            _ => f.with_children(f.children().into_iter().map(|c| go(c, avoid, used)).collect()),
        }
    }
    let mut used = f.all_vars();
    used.extend(avoid.iter().copied());
    go(f, avoid, &mut used)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::rst_ext()
    }

    fn p(s: &str) -> Formula {
        parse_formula(s, &sig()).unwrap()
    }

    fn v(i: u32) -> Term {
        Term::var(i)
    }

    #[test]
    fn terms() {
        assert_eq!(parse_term("x3", &sig()).unwrap(), v(3));
        assert_eq!(
            parse_term("pr(x1 sg(x2))", &sig()).unwrap(),
            Term::App("pr".into(), alloc::vec![v(1), Term::App("sg".into(), alloc::vec![v(2)])])
        );
        assert!(matches!(parse_term("un(x1 x2)", &sig()), Err(SyntaxError::Arity { .. })));
        assert!(matches!(parse_term("", &sig()), Err(SyntaxError::Empty)));
        assert!(matches!(parse_term("x1 x2", &sig()), Err(SyntaxError::Trailing(_))));
        assert!(matches!(parse_term("foo", &sig()), Err(SyntaxError::UnknownSymbol(_))));
        assert_eq!(render_term(&parse_term("pr(x1 sg(O))", &sig()).unwrap()), "pr(x1 sg(O))");
    }

    #[test]
    fn formulas() {
        assert_eq!(p("mem x1 x2"), Formula::mem(var(1), var(2)));
        let a1 = p("imp all x3 iff mem x3 x1 mem x3 x2 eq x1 x2");
        assert_eq!(
            a1,
            Formula::imp(
                Formula::all(var(3), Formula::iff(Formula::mem(var(3), var(1)), Formula::mem(var(3), var(2)))),
                Formula::eq(var(1), var(2))
            )
        );
        assert!(parse_formula("imp mem x1", &sig()).is_err());
        assert!(matches!(parse_formula("all O mem x1 x1", &sig()), Err(SyntaxError::BadBinder(_))));
        assert_eq!(render_formula(&Formula::mem(var(1), var(2))), "mem x1 x2");
        assert_eq!(render_formula(&p("iff eq x1 O all x2 not mem x2 x1")), "iff eq x1 O all x2 not mem x2 x1");
        assert_eq!(render_formula(&p("sub  x1\tpw(x2)")), "sub x1 pw(x2)");
    }

    #[test]
    fn variables() {
        assert_eq!(parse_variable("x12"), Some(var(12)));
        assert_eq!(parse_variable("x0"), None);
        assert_eq!(parse_variable("x01"), None);
        assert_eq!(parse_variable("y1"), None);
        let f = p("all x2 mem x1 x2");
        assert_eq!(f.free_vars(), BTreeSet::from([var(1)]));
        assert_eq!(f.all_vars(), BTreeSet::from([var(1), var(2)]));
        assert_eq!(p("ex x1 and mem x1 x2 mem x1 x3").free_vars(), BTreeSet::from([var(2), var(3)]));
        assert!(p("all x1 ex x2 mem x1 x2").is_closed());
    }

    #[test]
    fn substitution() {
        assert_eq!(substitute(&p("mem x1 x2"), var(1), &v(3)).unwrap(), p("mem x3 x2"));
        assert_eq!(
            substitute(&p("all x2 mem x1 x2"), var(1), &v(2)),
            Err(SyntaxError::Collision { binder: var(2) })
        );
        // bound occurrences are untouched
        assert_eq!(substitute(&p("and mem x1 x2 all x1 mem x1 x2"), var(1), &v(4)).unwrap(), p("and mem x4 x2 all x1 mem x1 x2"));
        // no capture when x is not free under the binder
        assert_eq!(substitute(&p("and mem x1 x1 all x2 mem x2 x2"), var(1), &v(2)).unwrap(), p("and mem x2 x2 all x2 mem x2 x2"));
        let c = Term::Const("O".into());
        assert_eq!(substitute_const(&p("all x2 mem x2 O"), "O", &v(1)).unwrap(), p("all x2 mem x2 x1"));
        assert!(substitute_const(&p("all x2 mem x2 O"), "O", &v(2)).is_err());
        assert_eq!(substitute(&p("mem x1 x2"), var(1), &c).unwrap(), p("mem O x2"));
    }

    #[test]
    fn renaming() {
        assert_eq!(rename_bound(&p("all x2 mem x1 x2"), var(2), var(5)).unwrap(), p("all x5 mem x1 x5"));
        assert_eq!(
            rename_bound(&p("and mem x2 x1 all x2 mem x2 x1"), var(2), var(7)).unwrap(),
            p("and mem x2 x1 all x7 mem x7 x1")
        );
        let r = rename_bound(&p("all x2 mem x1 x2"), var(2), var(9)).unwrap();
        assert_eq!(substitute(&r, var(1), &v(2)).unwrap(), p("all x9 mem x2 x9"));
        assert_eq!(rename_bound(&p("all x2 mem x1 x2"), var(2), var(1)), Err(SyntaxError::NotFresh(var(1))));
    }

    #[test]
    fn rename_apart_frees_binders() {
        let f = p("all x2 ex x3 and mem x2 x3 mem x1 x3");
        let g = rename_apart(&f, &BTreeSet::from([var(2), var(3)]));
        assert!(!g.all_vars().contains(&var(2)) && !g.all_vars().contains(&var(3)));
        assert_eq!(g.free_vars(), f.free_vars());
        assert!(substitute(&g, var(1), &v(3)).is_ok());
    }

    #[test]
    fn positions() {
        let f = p("all x1 and mem x1 x2 not eq x1 x2");
        assert_eq!(f.subformula_at(&[0, 1, 0]), Some(&p("eq x1 x2")));
        assert_eq!(f.subformula_at(&[1]), None);
        assert_eq!(f.replace_at(&[0, 0], p("eq x2 x2")), Some(p("all x1 and eq x2 x2 not eq x1 x2")));
        assert_eq!(f.binders_above(&[0, 1]), alloc::vec![var(1)]);
    }

    #[test]
    fn signature_names() {
        let mut s = sig();
        assert!(matches!(s.add_constant("O"), Err(SyntaxError::NameClash(_))));
        assert!(s.add_constant("mem").is_err());
        assert!(s.add_constant("x3").is_err());
        assert!(s.add_function("f", 0).is_err());
        s.add_predicate("phi", 1).unwrap();
        assert!(s.check_formula(&p("sub x1 x2")).is_ok());
        assert!(Signature::new().check_formula(&p("mem O x1")).is_err());
    }

    #[test]
    fn base_language() {
        assert!(p("all x1 mem x1 x2").is_base());
        assert!(!p("mem x1 O").is_base());
        assert!(!p("sub x1 x2").is_base());
    }
}
