//! Corpus of proof scripts: `corpus/<entry>/{theory,proof,expect}`.
//!
//! `expect` holds `key=value` lines:
//!
//! ```text
//! ok=true
//! steps=12
//! key_steps=6
//! conclusion=<formula>
//! discharges=E3-exists
//! ```
//!
//! Key steps are proof lines with a trailing `# n` comment.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rst::kernel::{alpha_equivalent, check_proof, check_proof_report, expand, Report};
use rst::script::{parse_proof, parse_theory, ScriptError};
use rst::syntax::{parse_formula, render_formula, Formula};
use rst::{Proof, Theory};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Script { path: PathBuf, source: ScriptError },
    #[error("{path}: {message}")]
    Expect { path: PathBuf, message: String },
    #[error("no corpus entry matches `{0}`")]
    NoMatch(String),
}

fn read(path: &Path) -> Result<String, CorpusError> {
    fs::read_to_string(path).map_err(|source| CorpusError::Io { path: path.to_path_buf(), source })
}

/// Expected outcome of one entry.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Expect {
    pub ok: bool,
    pub steps: Option<usize>,
    pub key_steps: Option<usize>,
    pub conclusion: Option<Formula>,
    pub fail_step: Option<usize>,
    pub discharges: Vec<String>,
}

/// A loaded entry.
#[derive(Clone, Debug)]
pub struct Entry {
    pub name: String,
    pub theory: Theory,
    pub proof: Proof,
    pub expect: Expect,
    pub key_steps: usize,
}

/// Outcome of checking one entry.
#[derive(Clone, Debug)]
pub struct EntryResult {
    pub name: String,
    pub passed: bool,
    pub ok: bool,
    pub steps: usize,
    pub key_steps: usize,
    pub primitive_steps: usize,
    pub detail: String,
}

/// Results sorted by entry name.
#[derive(Clone, Debug, Default)]
pub struct Summary {
    pub results: Vec<EntryResult>,
}

impl Summary {
    #[must_use]
    pub fn passed(&self) -> usize {
        self.results.iter().filter(|r| r.passed).count()
    }

    #[must_use]
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }
}

/// Number of proof lines carrying a trailing `# n` marker.
#[must_use]
pub fn count_key_steps(proof_text: &str) -> usize {
    proof_text
        .lines()
        .filter(|l| {
            l.split_once('#').is_some_and(|(step, c)| !step.trim().is_empty() && c.trim().parse::<usize>().is_ok())
        })
        .count()
}

/// Parse an `expect` file.
///
/// # Errors
/// Unknown keys or malformed values.
pub fn parse_expect(text: &str, th: &Theory) -> Result<Expect, String> {
    let mut e = Expect::default();
    let mut seen_ok = false;
    for l in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let (k, v) = l.split_once('=').ok_or_else(|| format!("expected key=value, got `{l}`"))?;
        let num = |v: &str| v.parse::<usize>().map_err(|_| format!("bad number `{v}`"));
        match k {
            "ok" => {
                e.ok = v.parse().map_err(|_| format!("bad boolean `{v}`"))?;
                seen_ok = true;
            }
            "steps" => e.steps = Some(num(v)?),
            "key_steps" => e.key_steps = Some(num(v)?),
            "fail_step" => e.fail_step = Some(num(v)?),
            "conclusion" => e.conclusion = Some(parse_formula(v, &th.signature).map_err(|e| e.to_string())?),
            "discharges" => e.discharges.extend(v.split(',').map(|s| s.trim().to_string())),
            _ => return Err(format!("unknown key `{k}`")),
        }
    }
    if !seen_ok {
        return Err("missing `ok`".into());
    }
    Ok(e)
}

/// Load one entry directory.
///
/// # Errors
/// Missing or malformed files.
pub fn load_entry(dir: &Path) -> Result<Entry, CorpusError> {
    let name = dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tp = dir.join("theory");
    let pp = dir.join("proof");
    let ep = dir.join("expect");
    let theory = parse_theory(&read(&tp)?).map_err(|source| CorpusError::Script { path: tp, source })?;
    let ptext = read(&pp)?;
    let proof = parse_proof(&ptext, &theory).map_err(|source| CorpusError::Script { path: pp, source })?;
    let expect = parse_expect(&read(&ep)?, &theory).map_err(|message| CorpusError::Expect { path: ep, message })?;
    Ok(Entry { name, key_steps: count_key_steps(&ptext), theory, proof, expect })
}

/// Obligation formulas of the standard definitions, by name.
#[must_use]
pub fn standard_obligations() -> BTreeMap<String, Formula> {
    Theory::rst_ext().obligations.into_iter().map(|o| (o.name, o.formula)).collect()
}

/// Compare a checked entry with its expectation.
#[must_use]
pub fn judge(entry: &Entry, report: &Report) -> EntryResult {
    let e = &entry.expect;
    let v = &report.verdict;
    let mut problems = Vec::new();
    if v.ok != e.ok {
        match &v.first_failure {
            Some(f) => problems.push(format!("unexpected failure at {f}")),
            None => problems.push("expected a failure".to_string()),
        }
    }
    if let (Some(want), Some(f)) = (e.fail_step, &v.first_failure) {
        if want != f.step {
            problems.push(format!("failed at step {} instead of {want}", f.step));
        }
    }
    if let Some(n) = e.steps {
        if n != entry.proof.steps.len() {
            problems.push(format!("{} steps, expected {n}", entry.proof.steps.len()));
        }
    }
    if let Some(n) = e.key_steps {
        if n != entry.key_steps {
            problems.push(format!("{} key steps, expected {n}", entry.key_steps));
        }
    }
    let last = entry.proof.conclusion();
    if let Some(c) = &e.conclusion {
        if last != Some(c) {
            problems.push(format!("conclusion is {}", last.map(render_formula).unwrap_or_default()));
        }
    }
    let obligations = standard_obligations();
    for d in &e.discharges {
        match (obligations.get(d), last) {
            (Some(o), Some(l)) if alpha_equivalent(o, l) => {}
            (Some(_), _) => problems.push(format!("conclusion does not match obligation {d}")),
            (None, _) => problems.push(format!("unknown obligation {d}")),
        }
    }
    EntryResult {
        name: entry.name.clone(),
        passed: problems.is_empty(),
        ok: v.ok,
        steps: entry.proof.steps.len(),
        key_steps: entry.key_steps,
        primitive_steps: report.primitive_steps,
        detail: problems.join("; "),
    }
}

/// Check one loaded entry. A proof that checks must also check after
/// expansion into primitive steps, with the same conclusion.
#[must_use]
pub fn run_entry(entry: &Entry) -> EntryResult {
    let report = check_proof_report(&entry.proof);
    let mut r = judge(entry, &report);
    if report.verdict.ok {
        let problem = match expand(&entry.proof) {
            Ok(q) if !q.is_primitive() => Some("expansion is not primitive".to_string()),
            Ok(q) if q.conclusion() != entry.proof.conclusion() => Some("expansion changes the conclusion".to_string()),
            Ok(q) => check_proof(&q).first_failure.map(|f| format!("expansion fails at {f}")),
            Err(f) => Some(format!("expansion fails at {f}")),
        };
        if let Some(m) = problem {
            r.passed = false;
            r.detail = if r.detail.is_empty() { m } else { format!("{}; {m}", r.detail) };
        }
    }
    r
}

/// Entry directories under `root`, sorted by name.
///
/// # Errors
/// Unreadable directory.
pub fn entry_dirs(root: &Path) -> Result<Vec<PathBuf>, CorpusError> {
    let rd = fs::read_dir(root).map_err(|source| CorpusError::Io { path: root.to_path_buf(), source })?;
    let mut dirs: Vec<PathBuf> = rd.filter_map(Result::ok).map(|d| d.path()).filter(|p| p.is_dir()).collect();
    dirs.sort();
    Ok(dirs)
}

/// Select entries: an exact name match wins, otherwise every name containing `filter`.
#[must_use]
pub fn select(dirs: &[PathBuf], filter: Option<&str>) -> Vec<PathBuf> {
    let name = |p: &PathBuf| p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    match filter {
        None => dirs.to_vec(),
        Some(f) => {
            let exact: Vec<PathBuf> = dirs.iter().filter(|d| name(d) == f).cloned().collect();
            if exact.is_empty() {
                dirs.iter().filter(|d| name(d).contains(f)).cloned().collect()
            } else {
                exact
            }
        }
    }
}

/// Check every selected entry.
///
/// # Errors
/// Missing files, or a filter that selects nothing.
pub fn run_corpus(root: &Path, filter: Option<&str>) -> Result<Summary, CorpusError> {
    let dirs = select(&entry_dirs(root)?, filter);
    if dirs.is_empty() {
        return Err(CorpusError::NoMatch(filter.unwrap_or("").to_string()));
    }
    let entries = dirs.iter().map(|d| load_entry(d)).collect::<Result<Vec<_>, _>>()?;
    let results = std::thread::scope(|s| {
        let hs: Vec<_> = entries.iter().map(|e| s.spawn(move || run_entry(e))).collect();
        hs.into_iter().map(|h| h.join().expect("entry check panicked")).collect()
    });
    Ok(Summary { results })
}

/// Default corpus location: `corpus/` at the workspace root.
#[must_use]
pub fn default_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}
