use std::io::Write;

use anyhow::{bail, Result};
use serde::Serialize;
use serde_json::Value;
use sg_harmonic::suites::SuiteReport;
use sg_harmonic::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Human,
    Json,
    Csv,
}

/// One run's output. `human` and `table` are alternative renderings of
/// `results`; only the JSON form carries everything.
#[derive(Debug, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub inputs: Value,
    pub results: Value,
    pub suites: Vec<SuiteReport>,
    #[serde(skip)]
    pub human: Vec<String>,
    #[serde(skip)]
    pub table: Option<Table>,
}

#[derive(Debug)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new(command: &'static str, inputs: Value) -> Self {
        Report {
            command,
            inputs,
            results: Value::Null,
            suites: Vec::new(),
            human: Vec::new(),
            table: None,
        }
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<()> {
        match format {
            Format::Human => {
                for line in &self.human {
                    writeln!(out, "{line}")?;
                }
            }
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, self)?;
                writeln!(out)?;
            }
            Format::Csv => {
                let Some(table) = &self.table else {
                    bail!("{} has no CSV rendering", self.command);
                };
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&table.header)?;
                for row in &table.rows {
                    w.write_record(row)?;
                }
                w.flush()?;
            }
        }
        Ok(())
    }
}

/// `2/5 (0.4)`
pub fn exact_and_float(x: &Rational) -> String {
    format!("{x} ({})", x.to_f64())
}

pub fn rational_json(x: &Rational) -> Value {
    Value::String(x.to_string())
}
