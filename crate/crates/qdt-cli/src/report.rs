//! Report documents and their two renderings: a human summary and a
//! line-delimited record stream for scripts.
//!
//! The record stream is the stable surface: no timestamps, fixed row
//! order, reals printed with 12 significant digits and a normalized
//! negative zero, so identical runs emit identical bytes.

use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Human,
    Records,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Real(f64),
    Int(u64),
    Text(String),
    Flag(bool),
}

impl Value {
    fn records(&self) -> String {
        match self {
            Value::Real(v) => format_real(*v),
            Value::Int(v) => v.to_string(),
            Value::Text(v) => format!("{v:?}"),
            Value::Flag(v) => v.to_string(),
        }
    }

    fn human(&self) -> String {
        match self {
            Value::Real(v) => format!("{v}"),
            Value::Int(v) => v.to_string(),
            Value::Text(v) => v.clone(),
            Value::Flag(v) => v.to_string(),
        }
    }
}

/// 12 significant digits; negative zero collapses to zero so that equal
/// numbers always print as equal bytes.
pub fn format_real(value: f64) -> String {
    let normalized = if value == 0.0 { 0.0 } else { value };
    format!("{normalized:.11e}")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Row {
    /// Measured values with no pass/fail meaning.
    Info {
        key: String,
        fields: Vec<(&'static str, Value)>,
    },
    /// An invariant with a verdict.
    Check {
        key: String,
        passed: bool,
        fields: Vec<(&'static str, Value)>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub title: &'static str,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportDocument {
    pub command: &'static str,
    pub version: &'static str,
    pub tolerance: f64,
    pub seed: Option<u64>,
    pub theta: Option<f64>,
    pub sections: Vec<Section>,
}

impl ReportDocument {
    pub fn new(command: &'static str, tolerance: f64) -> Self {
        Self {
            command,
            version: env!("CARGO_PKG_VERSION"),
            tolerance,
            seed: None,
            theta: None,
            sections: Vec::new(),
        }
    }

    pub fn section(&mut self, title: &'static str) -> &mut Section {
        self.sections.push(Section {
            title,
            rows: Vec::new(),
        });
        self.sections.last_mut().expect("just pushed")
    }

    pub fn all_checks_pass(&self) -> bool {
        self.sections.iter().all(|s| {
            s.rows.iter().all(|r| match r {
                Row::Check { passed, .. } => *passed,
                Row::Info { .. } => true,
            })
        })
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.sections
            .iter()
            .flat_map(|s| &s.rows)
            .filter_map(|r| match r {
                Row::Check { passed: false, key, .. } => Some(key.as_str()),
                _ => None,
            })
            .collect()
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Human => self.render_human(),
            Format::Records => self.render_records(),
        }
    }

    fn render_human(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "qdt {} v{}", self.command, self.version);
        let mut meta = format!("tolerance {}", self.tolerance);
        if let Some(theta) = self.theta {
            let _ = write!(meta, ", theta {theta}");
        }
        if let Some(seed) = self.seed {
            let _ = write!(meta, ", seed {seed}");
        }
        let _ = writeln!(out, "{meta}");
        for section in &self.sections {
            let _ = writeln!(out);
            let _ = writeln!(out, "== {} ==", section.title);
            for row in &section.rows {
                match row {
                    Row::Info { key, fields } => {
                        let rendered: Vec<String> = fields
                            .iter()
                            .map(|(name, value)| format!("{name} {}", value.human()))
                            .collect();
                        let _ = writeln!(out, "{key}: {}", rendered.join(", "));
                    }
                    Row::Check {
                        key,
                        passed,
                        fields,
                    } => {
                        let verdict = if *passed { "pass" } else { "FAIL" };
                        let rendered: Vec<String> = fields
                            .iter()
                            .map(|(name, value)| format!("{name} {}", value.human()))
                            .collect();
                        let _ = writeln!(out, "[{verdict}] {key}: {}", rendered.join(", "));
                    }
                }
            }
        }
        out
    }

    fn render_records(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "schema qdt-report/1");
        let _ = writeln!(out, "command {}", self.command);
        let _ = writeln!(out, "version {}", self.version);
        let _ = writeln!(out, "tolerance {}", format_real(self.tolerance));
        if let Some(theta) = self.theta {
            let _ = writeln!(out, "theta {}", format_real(theta));
        }
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "seed {seed}");
        }
        for section in &self.sections {
            for row in &section.rows {
                match row {
                    Row::Info { key, fields } => {
                        let _ = write!(out, "record section={} key={}", section.title, key);
                        for (name, value) in fields {
                            let _ = write!(out, " {name}={}", value.records());
                        }
                        let _ = writeln!(out);
                    }
                    Row::Check {
                        key,
                        passed,
                        fields,
                    } => {
                        let _ = write!(
                            out,
                            "check section={} key={} passed={}",
                            section.title, key, passed
                        );
                        for (name, value) in fields {
                            let _ = write!(out, " {name}={}", value.records());
                        }
                        let _ = writeln!(out);
                    }
                }
            }
        }
        out
    }
}
