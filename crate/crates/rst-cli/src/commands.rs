//! One function per subcommand; each returns an [`Outcome`].

use std::fs;
use std::path::Path;

use rst::elaborator::elaborate_to_base;
use rst::hfset::MAX_STAGE;
use rst::kernel::{check_proof_report, expand, DERIVED_RULES};
use rst::model::{axiom_report, check_valid, check_valid_extended, render_env, Universe, Validity};
use rst::script::{builtin_theory, parse_proof, parse_theory, render_proof};
use rst::syntax::{parse_formula, render_formula, Formula};
use rst::{SchemaId, Theory};

use crate::audit;
use crate::corpus::{self, CorpusError};
use crate::hfexpr;
use crate::{Outcome, Status};

/// A built-in theory name or a theory file path.
///
/// # Errors
/// Unreadable or malformed file.
pub fn load_theory(arg: &str) -> Result<Theory, String> {
    if let Some(t) = builtin_theory(arg) {
        return Ok(t);
    }
    let text = fs::read_to_string(arg).map_err(|e| format!("{arg}: {e}"))?;
    parse_theory(&text).map_err(|e| format!("{arg}: {e}"))
}

fn load_proof(th: &Theory, path: &str) -> Result<rst::Proof, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
    parse_proof(&text, th).map_err(|e| format!("{path}: {e}"))
}

#[must_use]
pub fn check(theory: &str, proof: &str) -> Outcome {
    let th = match load_theory(theory) {
        Ok(t) => t,
        Err(e) => return Outcome::input_error(e),
    };
    let p = match load_proof(&th, proof) {
        Ok(p) => p,
        Err(e) => return Outcome::input_error(e),
    };
    let r = check_proof_report(&p);
    let mut o = Outcome::new(if r.verdict.ok { Status::Ok } else { Status::Failed });
    o.kv("ok", r.verdict.ok).kv("steps", p.steps.len()).kv("primitive_steps", r.primitive_steps);
    match &r.verdict.first_failure {
        Some(f) => {
            o.kv("failed_step", f.step).kv("reason", &f.reason);
        }
        None => {
            o.kv("conclusion", render_formula(p.conclusion().expect("nonempty")));
        }
    }
    o
}

/// Primitive expansion of a proof, as a proof script.
#[must_use]
pub fn expand_proof(theory: &str, proof: &str) -> Outcome {
    let th = match load_theory(theory) {
        Ok(t) => t,
        Err(e) => return Outcome::input_error(e),
    };
    let p = match load_proof(&th, proof) {
        Ok(p) => p,
        Err(e) => return Outcome::input_error(e),
    };
    match expand(&p) {
        Ok(q) => {
            let mut o = Outcome::new(Status::Ok);
            o.lines = render_proof(&q).lines().map(str::to_string).collect();
            o
        }
        Err(f) => {
            let mut o = Outcome::new(Status::Failed);
            o.kv("ok", false).kv("failed_step", f.step).kv("reason", f.reason);
            o
        }
    }
}

#[must_use]
pub fn rules() -> Outcome {
    let mut o = Outcome::new(Status::Ok);
    for (name, summary) in DERIVED_RULES {
        o.lines.push(format!("rule={name} summary={summary}"));
    }
    o
}

#[must_use]
pub fn elaborate(theory: &str, formula: &str) -> Outcome {
    let th = match load_theory(theory) {
        Ok(t) => t,
        Err(e) => return Outcome::input_error(e),
    };
    let f = match parse_formula(formula, &th.signature) {
        Ok(f) => f,
        Err(e) => return Outcome::input_error(e),
    };
    match elaborate_to_base(&th, &f) {
        Ok(b) => {
            let mut o = Outcome::new(Status::Ok);
            o.kv("base", render_formula(&b));
            o
        }
        Err(e) => Outcome::input_error(e),
    }
}

/// A2 payloads used by `model --axioms` unless others are given; none
/// mentions `x2` or `x5`.
pub const DEFAULT_PAYLOADS: [&str; 5] =
    ["mem x6 x6", "not mem x6 x6", "eq x6 x3", "ex x7 mem x7 x6", "all x7 imp mem x7 x6 mem x7 x3"];

/// What `model` should check.
#[derive(Clone, Debug)]
pub enum ModelTarget {
    Axioms { schemas: Vec<String>, payloads: Vec<String> },
    Formula(String),
}

#[must_use]
pub fn model(k: usize, target: &ModelTarget, budget: u64) -> Outcome {
    if k > MAX_STAGE {
        return Outcome::input_error(format!("stage {k} exceeds the cap of {MAX_STAGE}"));
    }
    let u = match Universe::stage(k) {
        Ok(u) => u,
        Err(e) => return Outcome::input_error(e),
    };
    let sig = Theory::rst_ext().signature;
    let mut o = Outcome::new(Status::Ok);
    o.kv("stage", k).kv("individuals", u.len());
    match target {
        ModelTarget::Axioms { schemas, payloads } => {
            let ids: Vec<SchemaId> = if schemas.is_empty() {
                SchemaId::axioms().to_vec()
            } else {
                match schemas.iter().map(|s| SchemaId::parse(s).ok_or(s)).collect::<Result<Vec<_>, _>>() {
                    Ok(v) => v,
                    Err(s) => return Outcome::input_error(format!("unknown schema `{s}`")),
                }
            };
            let texts: Vec<&str> =
                if payloads.is_empty() { DEFAULT_PAYLOADS.to_vec() } else { payloads.iter().map(String::as_str).collect() };
            let ps = match texts.iter().map(|t| parse_formula(t, &sig)).collect::<Result<Vec<Formula>, _>>() {
                Ok(v) => v,
                Err(e) => return Outcome::input_error(e),
            };
            for row in axiom_report(&u, &ids, &ps, budget) {
                let word = |b: bool| if b { "valid" } else { "invalid" };
                let observed = match &row.observed {
                    Ok(b) => word(*b).to_string(),
                    Err(e) => format!("error({e})"),
                };
                let mut line = format!(
                    "schema={} predicted={} observed={observed} match={} instances={}",
                    row.schema,
                    word(row.predicted),
                    row.matches(),
                    row.instances
                );
                if let Some(w) = &row.witness {
                    line.push_str(&format!(" witness={w}"));
                }
                o.lines.push(line);
                if !row.matches() {
                    o.status = Status::Failed;
                }
            }
        }
        ModelTarget::Formula(text) => {
            let f = match parse_formula(text, &sig) {
                Ok(f) => f,
                Err(e) => return Outcome::input_error(e),
            };
            let r = if f.is_base() { check_valid(&u, &f, budget) } else { check_valid_extended(&u, &f, budget) };
            match r {
                Ok(Validity::Valid) => {
                    o.kv("valid", true);
                }
                Ok(Validity::Counterexample(env)) => {
                    o.kv("valid", false).kv("counterexample", render_env(&env));
                    o.status = Status::Failed;
                }
                Err(e) => return Outcome::input_error(e),
            }
        }
    }
    o
}

#[must_use]
pub fn hf(expr: &str, cap: usize) -> Outcome {
    match hfexpr::evaluate(expr, cap) {
        Ok(v) => {
            let mut o = Outcome::new(Status::Ok);
            o.kv("kind", v.kind()).kv("value", v);
            o
        }
        Err(e) if e.is_input() => Outcome::input_error(e),
        Err(e) => {
            let mut o = Outcome::new(Status::Failed);
            o.kv("error", e);
            o
        }
    }
}

#[must_use]
pub fn corpus(root: &Path, filter: Option<&str>, with_audit: bool) -> Outcome {
    let summary = match corpus::run_corpus(root, filter) {
        Ok(s) => s,
        Err(e @ (CorpusError::NoMatch(_) | CorpusError::Io { .. } | CorpusError::Script { .. } | CorpusError::Expect { .. })) => {
            return Outcome::input_error(e)
        }
    };
    let mut o = Outcome::new(if summary.all_passed() { Status::Ok } else { Status::Failed });
    for r in &summary.results {
        let mut line = format!(
            "entry={} result={} steps={} key_steps={} primitive_steps={}",
            r.name,
            if r.passed { "pass" } else { "fail" },
            r.steps,
            r.key_steps,
            r.primitive_steps
        );
        if !r.detail.is_empty() {
            line.push_str(&format!(" detail={}", r.detail));
        }
        o.lines.push(line);
    }
    o.kv("passed", summary.passed()).kv("total", summary.results.len());
    if with_audit {
        let dirs = corpus::select(&corpus::entry_dirs(root).unwrap_or_default(), filter);
        let mut violations = 0;
        for d in dirs {
            let Ok(e) = corpus::load_entry(&d) else { continue };
            for k in [2, 3] {
                let a = audit::audit_proof(&e.proof, k, &audit::AuditConfig::default());
                violations += a.violations.len();
                o.lines.push(format!("audit={} stage={k} {}", e.name, a.summary()));
            }
        }
        o.kv("audit_violations", violations);
        if violations > 0 {
            o.status = Status::Failed;
        }
    }
    o
}

#[cfg(test)]
mod tests {
    use super::*;
    use rst::hfset;

    #[test]
    fn hf_statuses() {
        assert_eq!(hf("tc {{{}}}", hfset::DEFAULT_CAP).get("value"), Some("{{} {{}}}"));
        assert_eq!(hf("tc", hfset::DEFAULT_CAP).status, Status::Input);
        assert_eq!(hf("stage 6", hfset::DEFAULT_CAP).status, Status::Failed);
    }

    #[test]
    fn model_cap() {
        let o = model(6, &ModelTarget::Axioms { schemas: vec![], payloads: vec![] }, 1000);
        assert_eq!(o.status, Status::Input);
    }

    #[test]
    fn elaborate_identity_and_errors() {
        assert_eq!(elaborate("rst", "mem x1 x2").get("base"), Some("mem x1 x2"));
        assert_eq!(elaborate("rst-ext", "mem x1 frob").status, Status::Input);
        assert_eq!(elaborate("rst", "mem O x1").status, Status::Input);
    }
}
