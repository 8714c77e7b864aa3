use std::fmt::Write as _;

use erdos::{BistochasticMatrix, Rational};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Serialize)]
pub struct Envelope<'a, P: Serialize> {
    pub command: &'a str,
    pub n: usize,
    pub payload: P,
    pub tool_version: &'static str,
}

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn json<P: Serialize>(command: &str, n: usize, payload: P) -> String {
    let env = Envelope { command, n, payload, tool_version: TOOL_VERSION };
    serde_json::to_string_pretty(&env).expect("payloads serialize")
}

/// Table output: `#` metadata lines around plain matrix blocks, so any block
/// can be cut out and fed back in as a matrix file.
pub struct Table {
    out: String,
    approx: bool,
}

impl Table {
    pub fn new(approx: bool) -> Self {
        Table { out: String::new(), approx }
    }

    pub fn meta(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        writeln!(self.out, "# {key}: {value}").unwrap();
        self
    }

    pub fn value(&mut self, key: &str, q: &Rational) -> &mut Self {
        if self.approx {
            writeln!(self.out, "# {key}: {q}  (~{})", q.to_f64()).unwrap();
        } else {
            writeln!(self.out, "# {key}: {q}").unwrap();
        }
        self
    }

    pub fn matrix(&mut self, m: &BistochasticMatrix) -> &mut Self {
        self.out.push_str(&m.to_string());
        if !self.out.ends_with('\n') {
            self.out.push('\n');
        }
        if self.approx {
            for i in 0..m.n() {
                let row: Vec<String> = (0..m.n()).map(|j| format!("{:.6}", m.get(i, j).to_f64())).collect();
                writeln!(self.out, "#   ~ {}", row.join(" ")).unwrap();
            }
        }
        self
    }

    pub fn blank(&mut self) -> &mut Self {
        self.out.push('\n');
        self
    }

    pub fn finish(self) -> String {
        self.out
    }
}

/// Joins displayable items with single spaces.
pub fn spaced<T: std::fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}
