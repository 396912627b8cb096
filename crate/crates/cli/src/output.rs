use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            other => Err(CliError::Usage(format!("unknown format '{other}' (json|csv|text)"))),
        }
    }
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "text",
        }
    }
}

/// Result of one subcommand in all three renderings.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    pub result: Value,
    pub csv: String,
    pub text: String,
}

impl Report {
    pub fn new<T: Serialize>(command: &str, config: RunConfig, result: &T) -> Result<Self, CliError> {
        Ok(Self {
            command: command.to_string(),
            config,
            result: serde_json::to_value(result)?,
            csv: String::new(),
            text: String::new(),
        })
    }

    pub fn json_value(&self) -> Result<Value, CliError> {
        Ok(json!({
            "command": self.command,
            "config": serde_json::to_value(&self.config)?,
            "result": self.result,
        }))
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        let config = serde_json::to_string(&self.config)?;
        Ok(match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json_value()?)?;
                s.push('\n');
                s
            }
            Format::Csv => format!("# edgegas {} config={}\n{}", self.command, config, self.csv),
            Format::Text => format!("edgegas {}\nconfig: {}\n\n{}", self.command, config, self.text),
        })
    }

    pub fn emit(&self, format: Format, out: Option<&Path>) -> Result<(), CliError> {
        let s = self.render(format)?;
        match out {
            Some(p) => std::fs::write(p, s)?,
            None => print!("{s}"),
        }
        Ok(())
    }
}

/// Human-rounded number for text output.
pub fn num(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let a = x.abs();
    if (1e-4..1e7).contains(&a) {
        let s = format!("{x:.10}");
        let s = s.trim_end_matches('0');
        s.trim_end_matches('.').to_string()
    } else {
        format!("{x:.9e}")
    }
}

/// Aligned two-column `key value` block.
pub fn kv_text(rows: &[(&str, String)]) -> String {
    let w = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
    let mut s = String::new();
    for (k, v) in rows {
        let _ = writeln!(s, "{k:<w$}  {v}");
    }
    s
}

/// Aligned table with a header row.
pub fn table_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let mut s = String::new();
    let line = |cells: Vec<&str>, s: &mut String| {
        let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        let _ = writeln!(s, "{}", parts.join("  ").trim_end());
    };
    line(header.to_vec(), &mut s);
    for r in rows {
        line(r.iter().map(String::as_str).collect(), &mut s);
    }
    s
}

pub fn csv_rows(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}
