//! Hereditarily finite sets, hash-consed.
//!
//! Every set is interned: two values are equal iff they share a node, so
//! equality, hashing and membership tests work on ids.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::hash::{Hash, Hasher};

use hashbrown::HashMap;

use crate::sync::RwLock;

/// Default cardinality cap for power sets.
pub const DEFAULT_CAP: usize = 1 << 17;

/// Largest stage index accepted by [`von_neumann_stage`].
pub const MAX_STAGE: usize = 5;

struct Node {
    id: u32,
    rank: u32,
    elems: Box<[HfSet]>,
}

/// An interned hereditarily finite set.
#[derive(Clone)]
pub struct HfSet(Arc<Node>);

struct Table {
    map: HashMap<Box<[u32]>, HfSet>,
    next: u32,
}

static TABLE: RwLock<Option<Table>> = RwLock::new(None);

fn intern(mut elems: Vec<HfSet>) -> HfSet {
    elems.sort_unstable_by_key(HfSet::id);
    elems.dedup_by_key(|e| e.id());
    let key: Box<[u32]> = elems.iter().map(HfSet::id).collect();
    if let Some(t) = TABLE.read().as_ref() {
        if let Some(s) = t.map.get(&key) {
            return s.clone();
        }
    }
    let mut guard = TABLE.write();
    let t = guard.get_or_insert_with(|| Table { map: HashMap::new(), next: 0 });
    if let Some(s) = t.map.get(&key) {
        return s.clone();
    }
    let rank = elems.iter().map(|e| e.rank() + 1).max().unwrap_or(0);
    let s = HfSet(Arc::new(Node { id: t.next, rank, elems: elems.into_boxed_slice() }));
    t.next = t.next.checked_add(1).expect("intern table overflow");
    t.map.insert(key, s.clone());
    s
}

/// Number of distinct sets interned so far.
#[must_use]
pub fn interned_count() -> usize {
    TABLE.read().as_ref().map_or(0, |t| t.map.len())
}

impl PartialEq for HfSet {
    fn eq(&self, other: &Self) -> bool {
        self.0.id == other.0.id
    }
}

impl Eq for HfSet {}

impl Hash for HfSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.id.hash(state);
    }
}

/// Sets are ordered canonically: `A < B` iff the largest element in the
/// symmetric difference lies in `B`. This is the Ackermann order, so
/// `∅ < {∅} < {{∅}} < {∅,{∅}} < …`, independent of interning order.
impl Ord for HfSet {
    fn cmp(&self, other: &Self) -> Ordering {
        canonical_cmp(self, other)
    }
}

impl PartialOrd for HfSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn canonical_cmp(a: &HfSet, b: &HfSet) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    if a.rank() != b.rank() {
        return a.rank().cmp(&b.rank());
    }
    let mut xs: Vec<&HfSet> = a.elements().iter().filter(|e| !b.contains(e)).collect();
    let mut ys: Vec<&HfSet> = b.elements().iter().filter(|e| !a.contains(e)).collect();
    xs.sort_unstable_by(|p, q| canonical_cmp(q, p));
    ys.sort_unstable_by(|p, q| canonical_cmp(q, p));
    match (xs.first(), ys.first()) {
        (Some(x), Some(y)) => canonical_cmp(x, y),
        (Some(_), None) => Ordering::Greater,
        (None, Some(_)) => Ordering::Less,
        (None, None) => Ordering::Equal,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HfError {
    /// The result would have more elements than the cap.
    CapExceeded { predicted: Option<usize>, cap: usize },
    IntersectionOfEmpty,
    NotTransitive,
    TupleTooShort,
    Parse(String),
}

impl fmt::Display for HfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HfError::CapExceeded { predicted: Some(n), cap } => {
                write!(f, "cardinality {n} exceeds cap {cap}")
            }
            HfError::CapExceeded { predicted: None, cap } => write!(f, "cardinality exceeds cap {cap}"),
            HfError::IntersectionOfEmpty => write!(f, "intersection of the empty set is undefined"),
            HfError::NotTransitive => write!(f, "set is not transitive"),
            HfError::TupleTooShort => write!(f, "tuples need at least two components"),
            HfError::Parse(m) => write!(f, "set literal: {m}"),
        }
    }
}

impl core::error::Error for HfError {}

impl HfSet {
    #[must_use]
    pub fn id(&self) -> u32 {
        self.0.id
    }

    #[must_use]
    pub fn rank(&self) -> u32 {
        self.0.rank
    }

    /// Elements, sorted by interning id.
    #[must_use]
    pub fn elements(&self) -> &[HfSet] {
        &self.0.elems
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.0.elems.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.0.elems.is_empty()
    }

    /// `x ∈ self`.
    #[must_use]
    pub fn contains(&self, x: &HfSet) -> bool {
        self.0.elems.binary_search_by_key(&x.id(), HfSet::id).is_ok()
    }

    /// Elements in canonical order.
    #[must_use]
    pub fn sorted_elements(&self) -> Vec<HfSet> {
        let mut v = self.0.elems.to_vec();
        v.sort();
        v
    }
}

#[must_use]
pub fn empty() -> HfSet {
    intern(Vec::new())
}

#[must_use]
pub fn make_set(elems: impl IntoIterator<Item = HfSet>) -> HfSet {
    intern(elems.into_iter().collect())
}

/// `a ∈ b`.
#[must_use]
pub fn member(a: &HfSet, b: &HfSet) -> bool {
    b.contains(a)
}

/// `a ⊆ b`.
#[must_use]
pub fn subset(a: &HfSet, b: &HfSet) -> bool {
    a.len() <= b.len() && a.elements().iter().all(|x| b.contains(x))
}

/// `∪[a]`.
#[must_use]
pub fn union_of(a: &HfSet) -> HfSet {
    make_set(a.elements().iter().flat_map(|x| x.elements().iter().cloned()))
}

#[must_use]
pub fn binary_union(a: &HfSet, b: &HfSet) -> HfSet {
    make_set(a.elements().iter().chain(b.elements()).cloned())
}

#[must_use]
pub fn binary_intersection(a: &HfSet, b: &HfSet) -> HfSet {
    make_set(a.elements().iter().filter(|x| b.contains(x)).cloned())
}

/// `a \ b`.
#[must_use]
pub fn difference(a: &HfSet, b: &HfSet) -> HfSet {
    make_set(a.elements().iter().filter(|x| !b.contains(x)).cloned())
}

/// `∩[a]` for nonempty `a`.
///
/// # Errors
/// [`HfError::IntersectionOfEmpty`].
pub fn intersection_of(a: &HfSet) -> Result<HfSet, HfError> {
    let (first, rest) = a.elements().split_first().ok_or(HfError::IntersectionOfEmpty)?;
    Ok(make_set(first.elements().iter().filter(|x| rest.iter().all(|r| r.contains(x))).cloned()))
}

/// `𝒫[a]` under [`DEFAULT_CAP`].
///
/// # Errors
/// [`HfError::CapExceeded`].
pub fn power_set(a: &HfSet) -> Result<HfSet, HfError> {
    power_set_capped(a, DEFAULT_CAP)
}

/// # Errors
/// [`HfError::CapExceeded`] when `2^|a| > cap`.
pub fn power_set_capped(a: &HfSet, cap: usize) -> Result<HfSet, HfError> {
    let n = a.len();
    let predicted = u32::try_from(n).ok().and_then(|n| 1usize.checked_shl(n));
    match predicted {
        Some(p) if p <= cap => {}
        _ => return Err(HfError::CapExceeded { predicted, cap }),
    }
    let elems = a.elements();
    let subsets = (0..predicted.unwrap_or(0)).map(|mask| {
        make_set(elems.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, e)| e.clone()))
    });
    Ok(make_set(subsets))
}

/// `𝒫ⁿ[a]`.
///
/// # Errors
/// [`HfError::CapExceeded`] at the first oversize step.
pub fn iterated_power(a: &HfSet, n: usize, cap: usize) -> Result<HfSet, HfError> {
    (0..n).try_fold(a.clone(), |acc, _| power_set_capped(&acc, cap))
}

/// `∪ⁿ[a]`.
#[must_use]
pub fn iterated_union(a: &HfSet, n: usize) -> HfSet {
    let mut acc = a.clone();
    for _ in 0..n {
        if acc.is_empty() {
            break;
        }
        acc = union_of(&acc);
    }
    acc
}

/// `𝒯𝒞[a]`, all sets reachable from `a` through membership.
#[must_use]
pub fn tc(a: &HfSet) -> HfSet {
    let mut seen: BTreeSet<u32> = BTreeSet::new();
    let mut out = Vec::new();
    let mut stack: Vec<HfSet> = a.elements().to_vec();
    while let Some(x) = stack.pop() {
        if seen.insert(x.id()) {
            stack.extend(x.elements().iter().cloned());
            out.push(x);
        }
    }
    make_set(out)
}

/// `{a}`.
#[must_use]
pub fn sigma(a: &HfSet) -> HfSet {
    make_set([a.clone()])
}

/// `{a, b}`.
#[must_use]
pub fn sigma2(a: &HfSet, b: &HfSet) -> HfSet {
    make_set([a.clone(), b.clone()])
}

/// `a⁺ = {a} ∪ a`.
#[must_use]
pub fn successor(a: &HfSet) -> HfSet {
    make_set(a.elements().iter().cloned().chain([a.clone()]))
}

/// `𝒮₊[a] = 𝒯𝒞[{a}]`.
#[must_use]
pub fn s_plus(a: &HfSet) -> HfSet {
    tc(&sigma(a))
}

/// `𝒮₋[t] = ∪[t \ ∪[t]]`.
#[must_use]
pub fn s_minus(t: &HfSet) -> HfSet {
    union_of(&difference(t, &union_of(t)))
}

/// `⟨a, b⟩ = {{a}, {a, b}}`.
#[must_use]
pub fn ordered_pair(a: &HfSet, b: &HfSet) -> HfSet {
    sigma2(&sigma(a), &sigma2(a, b))
}

#[must_use]
pub fn finite_set(elems: &[HfSet]) -> HfSet {
    make_set(elems.iter().cloned())
}

/// `⟨x₁ … xₙ⟩ = ⟨⟨x₁ … xₙ₋₁⟩ xₙ⟩`.
///
/// # Errors
/// [`HfError::TupleTooShort`] for fewer than two components.
pub fn tuple(elems: &[HfSet]) -> Result<HfSet, HfError> {
    let (first, rest) = elems.split_first().ok_or(HfError::TupleTooShort)?;
    if rest.is_empty() {
        return Err(HfError::TupleTooShort);
    }
    Ok(rest.iter().fold(first.clone(), |acc, x| ordered_pair(&acc, x)))
}

#[must_use]
pub fn cartesian_product(a: &HfSet, b: &HfSet) -> HfSet {
    make_set(a.elements().iter().flat_map(|x| b.elements().iter().map(move |y| ordered_pair(x, y))))
}

/// Every element is a subset.
#[must_use]
pub fn is_transitive(a: &HfSet) -> bool {
    a.elements().iter().all(|y| subset(y, a))
}

/// Transitive with transitive elements.
#[must_use]
pub fn is_ordinal(a: &HfSet) -> bool {
    is_transitive(a) && a.elements().iter().all(is_transitive)
}

/// Whether `z = 𝒫[y]`, without building the power set.
#[must_use]
pub fn is_power_set_of(z: &HfSet, y: &HfSet) -> bool {
    let Some(expected) = u32::try_from(y.len()).ok().and_then(|n| 1usize.checked_shl(n)) else {
        return false;
    };
    z.len() == expected && z.elements().iter().all(|s| subset(s, y))
}

/// The four subset-friendliness conditions, evaluated on `u`:
/// `∅ ∈ u`; `u` transitive; `𝒫[y] ∈ u` for `y ∈ u`; any `y, z ∈ u` lie in
/// a transitive member of `u`.
#[must_use]
pub fn sf_conditions(u: &HfSet) -> [bool; 4] {
    let elems = u.elements();
    let c1 = u.contains(&empty());
    let c2 = is_transitive(u);
    let c3 = elems.iter().all(|y| elems.iter().any(|z| is_power_set_of(z, y)));
    let transitive: Vec<&HfSet> = elems.iter().filter(|v| is_transitive(v)).collect();
    let c4 = elems
        .iter()
        .all(|y| elems.iter().all(|z| transitive.iter().any(|v| v.contains(y) && v.contains(z))));
    [c1, c2, c3, c4]
}

/// `{β ∈ t : β ordinal}` for transitive `t`.
///
/// # Errors
/// [`HfError::NotTransitive`].
pub fn ordinals_in(t: &HfSet) -> Result<HfSet, HfError> {
    if !is_transitive(t) {
        return Err(HfError::NotTransitive);
    }
    Ok(make_set(t.elements().iter().filter(|b| is_ordinal(b)).cloned()))
}

/// The von Neumann ordinal `k`.
#[must_use]
pub fn von_neumann_ordinal(k: usize) -> HfSet {
    (0..k).fold(empty(), |acc, _| successor(&acc))
}

/// `V_k = 𝒫ᵏ[∅]`, `k ≤ 5`.
///
/// # Errors
/// [`HfError::CapExceeded`] for `k > 5`.
pub fn von_neumann_stage(k: usize) -> Result<HfSet, HfError> {
    if k > MAX_STAGE {
        return Err(HfError::CapExceeded { predicted: None, cap: DEFAULT_CAP });
    }
    iterated_power(&empty(), k, DEFAULT_CAP)
}

/// `𝒫ⁿ[𝒯𝒞[a]]`.
///
/// # Errors
/// [`HfError::CapExceeded`].
pub fn sp_stage(a: &HfSet, n: usize, cap: usize) -> Result<HfSet, HfError> {
    iterated_power(&tc(a), n, cap)
}

impl fmt::Display for HfSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.sorted_elements().iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for HfSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parse a braces literal such as `{{} {{}}}`; element order is irrelevant.
///
/// # Errors
/// [`HfError::Parse`].
pub fn parse_set(text: &str) -> Result<HfSet, HfError> {
    let bytes: Vec<u8> = text.bytes().filter(|b| !b.is_ascii_whitespace()).collect();
    let mut stack: Vec<Vec<HfSet>> = Vec::new();
    let mut result = None;
    for (i, b) in bytes.iter().enumerate() {
        if result.is_some() {
            return Err(HfError::Parse(alloc::format!("trailing input at byte {i}")));
        }
        match b {
            b'{' => stack.push(Vec::new()),
            b'}' => {
                let elems = stack.pop().ok_or_else(|| HfError::Parse("unbalanced `}`".into()))?;
                let s = intern(elems);
                match stack.last_mut() {
                    Some(parent) => parent.push(s),
                    None => result = Some(s),
                }
            }
            other => return Err(HfError::Parse(alloc::format!("unexpected `{}`", char::from(*other)))),
        }
    }
    if !stack.is_empty() {
        return Err(HfError::Parse("unbalanced `{`".into()));
    }
    result.ok_or_else(|| HfError::Parse("empty input".into()))
}

impl core::str::FromStr for HfSet {
    type Err = HfError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_set(s)
    }
}
