#![allow(dead_code)]

use proptest::prelude::*;
use rst::syntax::{var, Formula, Term};

pub fn base_term(nvars: u32) -> impl Strategy<Value = Term> {
    (1..=nvars).prop_map(Term::var)
}

pub fn ext_term(nvars: u32) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![4 => base_term(nvars), 1 => Just(Term::Const("O".into()))];
    leaf.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::App("un".into(), vec![t])),
            inner.clone().prop_map(|t| Term::App("sg".into(), vec![t])),
            inner.clone().prop_map(|t| Term::App("pw".into(), vec![t])),
            (inner.clone(), inner).prop_map(|(a, b)| Term::App("pr".into(), vec![a, b])),
        ]
    })
}

fn formula_with(atom: BoxedStrategy<Formula>, nvars: u32, depth: u32) -> impl Strategy<Value = Formula> {
    atom.prop_recursive(depth, 24, 2, move |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::imp(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::iff(a, b)),
            (1..=nvars, inner.clone()).prop_map(|(x, a)| Formula::all(var(x), a)),
            (1..=nvars, inner).prop_map(|(x, a)| Formula::ex(var(x), a)),
        ]
    })
}

/// Base-language formulas over `x1 … xn`.
pub fn base_formula(nvars: u32, depth: u32) -> impl Strategy<Value = Formula> {
    let atom = prop_oneof![
        (base_term(nvars), base_term(nvars)).prop_map(|(a, b)| Formula::mem(a, b)),
        (base_term(nvars), base_term(nvars)).prop_map(|(a, b)| Formula::eq(a, b)),
    ]
    .boxed();
    formula_with(atom, nvars, depth)
}

/// Formulas over the extended signature.
pub fn ext_formula(nvars: u32, depth: u32) -> impl Strategy<Value = Formula> {
    let atom = prop_oneof![
        (ext_term(nvars), ext_term(nvars)).prop_map(|(a, b)| Formula::mem(a, b)),
        (ext_term(nvars), ext_term(nvars)).prop_map(|(a, b)| Formula::eq(a, b)),
        (ext_term(nvars), ext_term(nvars)).prop_map(|(a, b)| Formula::Pred("sub".into(), vec![a, b])),
    ]
    .boxed();
    formula_with(atom, nvars, depth)
}
