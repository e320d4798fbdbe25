// Copyright 2026 The squeezecool Authors
// SPDX-License-Identifier: Apache-2.0

//! Bookkeeping for the acceptance run: bounded measurements grouped into
//! criteria, one report line per criterion.

use std::fmt;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bound {
    Below(f64),
    Above(f64),
    Within { target: f64, tol: f64 },
    Range(f64, f64),
    /// A yes/no property; the value is 1 or 0.
    Holds,
}

impl Bound {
    pub fn admits(&self, v: f64) -> bool {
        match *self {
            Bound::Below(b) => v < b,
            Bound::Above(b) => v > b,
            Bound::Within { target, tol } => (v - target).abs() <= tol,
            Bound::Range(lo, hi) => v >= lo && v <= hi,
            Bound::Holds => v == 1.0,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Bound::Below(b) => write!(f, "< {b:e}"),
            Bound::Above(b) => write!(f, "> {b:e}"),
            Bound::Within { target, tol } => write!(f, "{target} ± {tol:e}"),
            Bound::Range(lo, hi) => write!(f, "in [{lo}, {hi}]"),
            Bound::Holds => write!(f, "holds"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Measure {
    pub label: String,
    pub value: f64,
    pub bound: Bound,
}

impl Measure {
    pub fn new(label: impl Into<String>, value: f64, bound: Bound) -> Self {
        Self { label: label.into(), value, bound }
    }

    pub fn holds(label: impl Into<String>, ok: bool) -> Self {
        Self::new(label, if ok { 1.0 } else { 0.0 }, Bound::Holds)
    }

    pub fn passed(&self) -> bool {
        self.bound.admits(self.value)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed() { "" } else { " !" };
        match self.bound {
            Bound::Holds => write!(f, "{}={}{mark}", self.label, self.passed()),
            b => write!(f, "{}={:.6e} ({b}){mark}", self.label, self.value),
        }
    }
}

/// Outcome of one criterion.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub id: String,
    pub title: String,
    pub measures: Vec<Measure>,
    /// Set when the computation itself failed.
    pub error: Option<String>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.measures.iter().all(Measure::passed)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}:", if self.passed() { "PASS" } else { "FAIL" }, self.id, self.title)?;
        for m in &self.measures {
            write!(f, " {m}")?;
        }
        if let Some(e) = &self.error {
            write!(f, " error={e}")?;
        }
        Ok(())
    }
}

/// Runs `body`, appends its wall time as a `runtime_s` measure bounded by
/// `budget_s`, and turns an error into a failed verdict.
pub fn run<E: fmt::Display>(
    id: &str,
    title: &str,
    budget_s: f64,
    body: impl FnOnce() -> Result<Vec<Measure>, E>,
) -> Verdict {
    let t0 = Instant::now();
    let outcome = body();
    let seconds = t0.elapsed().as_secs_f64();
    let (mut measures, error) = match outcome {
        Ok(m) => (m, None),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    measures.push(Measure::new("runtime_s", seconds, Bound::Below(budget_s)));
    Verdict { id: id.into(), title: title.into(), measures, error }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_admit_as_documented() {
        assert!(Bound::Below(1.0).admits(0.5) && !Bound::Below(1.0).admits(1.0));
        assert!(Bound::Within { target: 0.25, tol: 1e-6 }.admits(0.2500005));
        assert!(!Bound::Range(5.5, 6.1).admits(5.38));
        assert!(Measure::holds("x", true).passed() && !Measure::holds("x", false).passed());
    }

    #[test]
    fn verdict_line_reports_failures() {
        let v = run("c0", "demo", 10.0, || Ok::<_, String>(vec![Measure::new("a", 2.0, Bound::Below(1.0))]));
        assert!(!v.passed());
        let line = v.to_string();
        assert!(line.starts_with("FAIL c0 demo: a=2.000000e0 (< 1e0) !"));
        let e = run("c1", "err", 10.0, || Err::<Vec<Measure>, _>("boom"));
        assert!(!e.passed() && e.to_string().contains("error=boom"));
    }
}
