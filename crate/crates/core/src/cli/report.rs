use std::fmt::Write as _;

use serde_json::json;

use super::config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Int(i64),
    Real(f64),
}

impl Value {
    /// CSV cell: integers verbatim, reals with 17 significant digits.
    pub fn to_csv(&self) -> String {
        match self {
            Value::Int(i) => i.to_string(),
            Value::Real(x) => format!("{x:.16e}"),
        }
    }

    fn to_json(self) -> serde_json::Value {
        match self {
            Value::Int(i) => json!(i),
            Value::Real(x) => json!(x),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// Pass when the measured value is at most the threshold.
    AtMost,
    /// Pass when the measured value exceeds the threshold.
    Above,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Suite {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub relation: Relation,
}

impl Suite {
    pub fn at_most(name: &str, worst: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value: worst,
            threshold: tolerance,
            relation: Relation::AtMost,
        }
    }

    pub fn above(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            relation: Relation::Above,
        }
    }

    pub fn passed(&self) -> bool {
        match self.relation {
            Relation::AtMost => self.value <= self.threshold,
            Relation::Above => self.value > self.threshold,
        }
    }

    fn line(&self) -> String {
        let verdict = if self.passed() { "pass" } else { "FAIL" };
        let (label, op) = match self.relation {
            Relation::AtMost => ("worst", "<="),
            Relation::Above => ("value", ">"),
        };
        format!(
            "{}: {verdict} {label}={:e} {op} {:e}",
            self.name, self.value, self.threshold
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    pub timestamp: u64,
    pub extra: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub suites: Vec<Suite>,
}

impl Report {
    pub fn new(command: &str, config: &RunConfig, columns: &[&str]) -> Self {
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            command: command.into(),
            config: config.clone(),
            timestamp,
            extra: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            suites: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(Suite::passed)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "# wellspring {} {}",
            env!("CARGO_PKG_VERSION"),
            self.command
        )
        .unwrap();
        writeln!(out, "# timestamp: {}", self.timestamp).unwrap();
        writeln!(out, "# config: {}", self.config.to_json()).unwrap();
        for (k, v) in &self.extra {
            writeln!(out, "# {k}: {v}").unwrap();
        }
        for s in &self.suites {
            writeln!(out, "# suite {}", s.line()).unwrap();
        }
        writeln!(out, "{}", self.columns.join(",")).unwrap();
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Value::to_csv).collect();
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        out
    }

    pub fn to_json(&self) -> String {
        let suites: Vec<_> = self
            .suites
            .iter()
            .map(|s| {
                json!({
                    "name": s.name,
                    "passed": s.passed(),
                    "value": s.value,
                    "threshold": s.threshold,
                    "relation": match s.relation { Relation::AtMost => "<=", Relation::Above => ">" },
                })
            })
            .collect();
        let rows: Vec<Vec<serde_json::Value>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|v| v.to_json()).collect())
            .collect();
        let extra: serde_json::Map<String, serde_json::Value> = self
            .extra
            .iter()
            .map(|(k, v)| (k.clone(), json!(v)))
            .collect();
        let doc = json!({
            "metadata": {
                "tool": "wellspring",
                "version": env!("CARGO_PKG_VERSION"),
                "command": self.command,
                "timestamp": self.timestamp,
                "config": self.config,
                "extra": extra,
            },
            "columns": self.columns,
            "rows": rows,
            "suites": suites,
            "passed": self.all_passed(),
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
        text.push('\n');
        text
    }
}
