//! Versioned CSV/JSON artifacts. Every file starts with a schema comment and
//! embeds the resolved configuration.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliResult;

pub const SIMULATE_SCHEMA: &str = "stvflow-simulate-v1";
pub const NODES_SCHEMA: &str = "stvflow-nodes-v1";
pub const LEMMA_SCHEMA: &str = "stvflow-lemma-v1";
pub const SVI_SCHEMA: &str = "stvflow-svi-v1";
pub const CONVERGE_SCHEMA: &str = "stvflow-converge-v1";
pub const DENOISE_SCHEMA: &str = "stvflow-denoise-v1";

/// Shortest round-trip representation in scientific notation.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(schema: &str, cfg: &RunConfig) -> Self {
        let mut text = String::new();
        writeln!(text, "# schema: {schema}").unwrap();
        writeln!(text, "# config: {}", cfg.echo()).unwrap();
        Self { text }
    }

    pub fn comment(&mut self, key: &str, value: impl std::fmt::Display) {
        writeln!(self.text, "# {key}: {value}").unwrap();
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut first = true;
        for f in fields {
            if !first {
                self.text.push(',');
            }
            self.text.push_str(f.as_ref());
            first = false;
        }
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    schema: &'a str,
    config: serde_json::Value,
    report: &'a T,
}

pub fn json_report<T: Serialize>(schema: &str, cfg: &RunConfig, report: &T) -> String {
    let env = Envelope {
        schema,
        config: cfg.echo(),
        report,
    };
    let mut s = serde_json::to_string_pretty(&env).expect("report serializes");
    s.push('\n');
    s
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
