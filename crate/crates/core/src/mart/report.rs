use std::fmt;

use serde::Serialize;

/// Where a law failed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Level {
        n: usize,
    },
    Pair {
        n: usize,
        m: usize,
    },
    Term {
        n: usize,
    },
    Probe {
        n: usize,
        probe: String,
    },
    /// `coordinate` of `E_n x_m - x_n` (or of the relevant difference).
    Coordinate {
        n: usize,
        m: usize,
        coordinate: usize,
    },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Level { n } => write!(f, "level {n}"),
            Witness::Pair { n, m } => write!(f, "levels ({n}, {m})"),
            Witness::Term { n } => write!(f, "term {n}"),
            Witness::Probe { n, probe } => write!(f, "level {n} on {probe}"),
            Witness::Coordinate { n, m, coordinate } => {
                write!(f, "(n={n}, m={m}) at coordinate {coordinate}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LawCheck {
    pub law: String,
    pub passed: bool,
    pub witness: Option<Witness>,
    pub note: Option<String>,
}

/// Pass or fail per law, with a witness for each failure.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<LawCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LawCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn first_witness(&self) -> Option<&Witness> {
        self.failures().find_map(|c| c.witness.as_ref())
    }

    pub fn law(&self, name: &str) -> Option<&LawCheck> {
        self.checks.iter().find(|c| c.law == name)
    }

    pub(crate) fn record(&mut self, law: &str, witness: Option<Witness>) {
        self.checks.push(LawCheck {
            law: law.to_string(),
            passed: witness.is_none(),
            witness,
            note: None,
        });
    }

    pub(crate) fn note(&mut self, law: &str, note: String) {
        self.checks.push(LawCheck {
            law: law.to_string(),
            passed: true,
            witness: None,
            note: Some(note),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.passed { "pass" } else { "FAIL" };
            write!(f, "{status} {}", c.law)?;
            if let Some(w) = &c.witness {
                write!(f, " [{w}]")?;
            }
            if let Some(n) = &c.note {
                write!(f, " ({n})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
