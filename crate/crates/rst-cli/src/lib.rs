//! Front end for the `rst` kernel: file loading, reports, the proof corpus
//! and the semantic soundness audit.

pub mod audit;
pub mod commands;
pub mod corpus;
pub mod hfexpr;

use std::fmt;

/// Exit status of a command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    Failed = 1,
    Input = 2,
}

/// Lines of `key=value` output plus an exit status.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub status: Status,
    pub lines: Vec<String>,
}

impl Outcome {
    #[must_use]
    pub fn new(status: Status) -> Self {
        Self { status, lines: Vec::new() }
    }

    pub fn kv(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.lines.push(format!("{key}={value}"));
        self
    }

    #[must_use]
    pub fn input_error(message: impl fmt::Display) -> Self {
        let mut o = Self::new(Status::Input);
        o.kv("error", message);
        o
    }

    /// Value of the first line with `key`.
    #[must_use]
    pub fn get(&self, key: &str) -> Option<&str> {
        self.lines.iter().find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lines {
            writeln!(f, "{l}")?;
        }
        Ok(())
    }
}
