use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::config::ExperimentConfig;
use crate::UsageError;

/// A single checked claim: what was expected, what was seen, and how close
/// it had to be.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub tolerance: String,
    pub pass: bool,
}

impl Assertion {
    pub fn new(name: &str, expected: impl ToString, observed: impl ToString, tolerance: impl ToString, pass: bool) -> Self {
        Assertion {
            name: name.to_string(),
            expected: expected.to_string(),
            observed: observed.to_string(),
            tolerance: tolerance.to_string(),
            pass,
        }
    }

    /// |observed − expected| ≤ tol·|expected|.
    pub fn relative(name: &str, expected: f64, observed: f64, tol: f64) -> Self {
        let pass = (observed - expected).abs() <= tol * expected.abs();
        Assertion::new(name, expected, observed, format!("rel {tol:e}"), pass)
    }

    /// |observed − expected| ≤ tol.
    pub fn absolute(name: &str, expected: f64, observed: f64, tol: f64) -> Self {
        let pass = (observed - expected).abs() <= tol;
        Assertion::new(name, expected, observed, format!("abs {tol:e}"), pass)
    }

    /// |observed − expected| ≤ k·se.
    pub fn within_se(name: &str, expected: f64, observed: f64, se: f64, k: f64) -> Self {
        let pass = (observed - expected).abs() <= k * se;
        Assertion::new(name, expected, format!("{observed} (se {se:.3e})"), format!("{k} se"), pass)
    }

    pub fn at_most(name: &str, bound: f64, observed: f64) -> Self {
        Assertion::new(name, format!("<= {bound}"), observed, "0", observed <= bound)
    }

    pub fn at_least(name: &str, bound: f64, observed: f64) -> Self {
        Assertion::new(name, format!(">= {bound}"), observed, "0", observed >= bound)
    }
}

/// The results table of an experiment. Everything here is a deterministic
/// function of the config.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub assertions: Vec<Assertion>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), ..Default::default() }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn check(&mut self, a: Assertion) {
        self.assertions.push(a);
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(vec![]);
        w.write_record(&self.columns).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }

    pub fn assertions_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(vec![]);
        for a in &self.assertions {
            w.serialize(a).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub version: String,
    pub git_describe: Option<String>,
    pub wall_time_s: f64,
    pub results: Table,
    pub passed: bool,
}

impl RunReport {
    pub fn new(config: ExperimentConfig, results: Table, wall_time_s: f64) -> Self {
        let passed = results.assertions.iter().all(|a| a.pass);
        RunReport {
            config,
            version: env!("CARGO_PKG_VERSION").to_string(),
            git_describe: git_describe(),
            wall_time_s,
            results,
            passed,
        }
    }

    /// Writes `results.csv`, `assertions.csv` and `report.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(), UsageError> {
        let unwritable = |e: std::io::Error| UsageError(format!("cannot write to {}: {e}", dir.display()));
        std::fs::create_dir_all(dir).map_err(unwritable)?;
        std::fs::write(dir.join("results.csv"), self.results.to_csv()).map_err(unwritable)?;
        std::fs::write(dir.join("assertions.csv"), self.results.assertions_csv()).map_err(unwritable)?;
        let json = serde_json::to_string_pretty(self).expect("report serializes");
        std::fs::write(dir.join("report.json"), json).map_err(unwritable)
    }

    pub fn render(&self) -> String {
        let mut s = format!("{} (seed {}) in {:.2}s\n", self.config.experiment, self.config.seed, self.wall_time_s);
        s.push_str(&render_grid(&self.results.columns, &self.results.rows));
        if !self.results.assertions.is_empty() {
            s.push('\n');
            let cols = ["assertion", "expected", "observed", "tolerance", "pass"].map(String::from);
            let rows: Vec<Vec<String>> = self
                .results
                .assertions
                .iter()
                .map(|a| vec![a.name.clone(), a.expected.clone(), a.observed.clone(), a.tolerance.clone(), pass_word(a.pass).into()])
                .collect();
            s.push_str(&render_grid(&cols, &rows));
        }
        s.push_str(if self.passed { "PASS\n" } else { "FAIL\n" });
        s
    }
}

pub fn pass_word(p: bool) -> &'static str {
    if p { "pass" } else { "FAIL" }
}

/// Left-aligned plain-text table.
pub fn render_grid(columns: &[String], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = columns.iter().map(|c| c.chars().count()).collect();
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let mut out: Vec<String> = cells.iter().zip(&width).map(|(c, w)| format!("{c:<w$}")).collect();
        if let Some(last) = out.last_mut() {
            *last = last.trim_end().to_string();
        }
        out.join("  ") + "\n"
    };
    let mut s = line(columns);
    for r in rows {
        s.push_str(&line(r));
    }
    s
}

fn git_describe() -> Option<String> {
    let out = std::process::Command::new("git").args(["describe", "--always", "--dirty"]).output().ok()?;
    out.status.success().then(|| String::from_utf8_lossy(&out.stdout).trim().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_is_plain() {
        let mut t = Table::new(&["x", "y"]);
        t.row(vec!["1".into(), "0.5".into()]);
        assert_eq!(String::from_utf8(t.to_csv()).unwrap(), "x,y\n1,0.5\n");
    }

    #[test]
    fn passed_needs_every_assertion() {
        let mut t = Table::new(&["x"]);
        t.check(Assertion::relative("a", 1.0, 1.0 + 1e-9, 1e-6));
        assert!(RunReport::new(ExperimentConfig::new("e"), t.clone(), 0.0).passed);
        t.check(Assertion::at_most("b", 1.0, 2.0));
        assert!(!RunReport::new(ExperimentConfig::new("e"), t, 0.0).passed);
    }

    #[test]
    fn grid_alignment() {
        let g = render_grid(&["a".into(), "bb".into()], &[vec!["ccc".into(), "d".into()]]);
        assert_eq!(g, "a    bb\nccc  d\n");
    }
}
