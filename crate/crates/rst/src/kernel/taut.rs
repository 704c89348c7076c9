//! Truth-table check of the propositional skeleton.

use alloc::vec;
use alloc::vec::Vec;

use crate::syntax::Formula;

/// Largest number of skeleton letters accepted.
pub const MAX_LETTERS: usize = 24;

/// Atoms and quantified subformulas, in order of first occurrence.
#[must_use]
pub fn letters(f: &Formula) -> Vec<&Formula> {
    fn go<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
        match f {
            Formula::Not(a) => go(a, out),
            Formula::Imp(a, b) | Formula::And(a, b) | Formula::Or(a, b) | Formula::Iff(a, b) => {
                go(a, out);
                go(b, out);
            }
            _ => {
                if !out.contains(&f) {
                    out.push(f);
                }
            }
        }
    }
    let mut out = Vec::new();
    go(f, &mut out);
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TautError {
    TooManyLetters(usize),
}

/// Whether the skeleton of `f` is true under every assignment.
///
/// # Errors
/// More than [`MAX_LETTERS`] letters.
pub fn is_tautology(f: &Formula) -> Result<bool, TautError> {
    let ls = letters(f);
    let n = ls.len();
    if n > MAX_LETTERS {
        return Err(TautError::TooManyLetters(n));
    }
    let rows = 1usize << n;
    let words = rows.div_ceil(64);
    let column = |i: usize| -> Vec<u64> {
        let mut v = vec![0u64; words];
        for (w, word) in v.iter_mut().enumerate() {
            if i < 6 {
                let mut pat = 0u64;
                for b in 0..64 {
                    if (b >> i) & 1 == 1 {
                        pat |= 1 << b;
                    }
                }
                *word = pat;
            } else if (w >> (i - 6)) & 1 == 1 {
                *word = u64::MAX;
            }
        }
        v
    };
    let table = eval(f, &ls, &column);
    let mask = if rows >= 64 { u64::MAX } else { (1u64 << rows) - 1 };
    Ok(table.iter().enumerate().all(|(w, x)| {
        let m = if w + 1 == words { mask } else { u64::MAX };
        x & m == m
    }))
}

fn eval(f: &Formula, ls: &[&Formula], column: &dyn Fn(usize) -> Vec<u64>) -> Vec<u64> {
    let bin = |a: &Formula, b: &Formula, op: fn(u64, u64) -> u64| {
        let x = eval(a, ls, column);
        let y = eval(b, ls, column);
        x.into_iter().zip(y).map(|(p, q)| op(p, q)).collect()
    };
    match f {
        Formula::Not(a) => eval(a, ls, column).into_iter().map(|x| !x).collect(),
        Formula::Imp(a, b) => bin(a, b, |p, q| !p | q),
        Formula::And(a, b) => bin(a, b, |p, q| p & q),
        Formula::Or(a, b) => bin(a, b, |p, q| p | q),
        Formula::Iff(a, b) => bin(a, b, |p, q| !(p ^ q)),
        _ => column(ls.iter().position(|l| *l == f).expect("letter")),
    }
}
