//! Independent oracles and the pass/fail bookkeeping of the acceptance
//! suite.

pub mod oracles;

use std::fmt;

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(id: u32, name: &'static str, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            id,
            name,
            pass,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.pass { "PASS" } else { "FAIL" };
        write!(
            f,
            "criterion {} {status} [{}] {}",
            self.id, self.name, self.detail
        )
    }
}

/// Collects sub-checks of one criterion; the criterion passes only if every
/// check does, and the detail lists all of them.
#[derive(Debug, Default)]
pub struct Checks {
    parts: Vec<(bool, String)>,
}

impl Checks {
    pub fn check(&mut self, ok: bool, text: impl Into<String>) {
        self.parts.push((ok, text.into()));
    }

    pub fn verdict(self, id: u32, name: &'static str) -> Verdict {
        let pass = !self.parts.is_empty() && self.parts.iter().all(|(ok, _)| *ok);
        let detail = self
            .parts
            .iter()
            .map(|(ok, t)| {
                if *ok {
                    t.clone()
                } else {
                    format!("{t} (out of tolerance)")
                }
            })
            .collect::<Vec<_>>()
            .join("; ");
        Verdict::new(id, name, pass, detail)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_failed_check_fails_the_criterion() {
        let mut c = Checks::default();
        c.check(true, "a");
        c.check(false, "b");
        let v = c.verdict(3, "x");
        assert!(!v.pass);
        assert_eq!(
            v.to_string(),
            "criterion 3 FAIL [x] a; b (out of tolerance)"
        );
    }

    #[test]
    fn empty_checks_do_not_pass() {
        assert!(!Checks::default().verdict(1, "x").pass);
    }
}
