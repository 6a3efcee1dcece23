use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Indeterminate,
    Fail,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Indeterminate | Status::Fail => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Indeterminate => "indeterminate",
            Status::Fail => "fail",
        }
    }
}

/// A number with either an error estimate or an `exact` tag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quantity {
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<f64>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub exact: bool,
}

impl Quantity {
    pub fn estimate(value: f64, error: f64) -> Self {
        Quantity {
            value,
            error: Some(error),
            exact: false,
        }
    }

    pub fn exact(value: f64) -> Self {
        Quantity {
            value,
            error: None,
            exact: true,
        }
    }

    pub fn count(n: usize) -> Self {
        Self::exact(n as f64)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub label: String,
    pub values: BTreeMap<String, Quantity>,
}

impl Row {
    pub fn new(label: impl Into<String>) -> Self {
        Row {
            label: label.into(),
            values: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, q: Quantity) -> Self {
        self.values.insert(key.to_string(), q);
        self
    }
}

/// One asserted tolerance or property.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub outputs: BTreeMap<String, Quantity>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rows: Vec<Row>,
    pub checks: Vec<Check>,
    pub status: Status,
    pub wall_time: f64,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            schema: SCHEMA,
            command: command.to_string(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            rows: Vec::new(),
            checks: Vec::new(),
            status: Status::Pass,
            wall_time: 0.0,
        }
    }

    pub fn input(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.inputs.insert(key.to_string(), v);
    }

    pub fn output(&mut self, key: &str, q: Quantity) {
        self.outputs.insert(key.to_string(), q);
    }

    pub fn check(&mut self, name: impl Into<String>, status: Status, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            status,
            detail: detail.into(),
        });
    }

    pub fn assert(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        let status = if ok { Status::Pass } else { Status::Fail };
        self.check(name, status, detail);
    }

    /// Worst status over all checks.
    pub fn finish(&mut self) {
        self.status = self
            .checks
            .iter()
            .map(|c| c.status)
            .max()
            .unwrap_or(Status::Pass);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values are finite")
    }

    /// JSON with `wall_time` zeroed, for comparing runs.
    pub fn canonical_json(&self) -> String {
        let mut copy = self.clone();
        copy.wall_time = 0.0;
        copy.to_json()
    }

    /// Rows as a table, or the outputs when there are no rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if self.rows.is_empty() {
            out.push_str("name,value,error\n");
            for (k, q) in &self.outputs {
                let _ = writeln!(out, "{k},{},{}", q.value, error_cell(q));
            }
            return out;
        }
        let mut keys: Vec<&String> = self.rows.iter().flat_map(|r| r.values.keys()).collect();
        keys.sort();
        keys.dedup();
        out.push_str("label");
        for k in &keys {
            let _ = write!(out, ",{k},{k}_error");
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&csv_escape(&row.label));
            for k in &keys {
                match row.values.get(*k) {
                    Some(q) => {
                        let _ = write!(out, ",{},{}", q.value, error_cell(q));
                    }
                    None => out.push_str(",,"),
                }
            }
            out.push('\n');
        }
        out
    }
}

fn error_cell(q: &Quantity) -> String {
    match q.error {
        Some(e) => e.to_string(),
        None => "exact".to_string(),
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_is_worst_check() {
        let mut r = RunReport::new("x");
        r.assert("a", true, "");
        r.finish();
        assert_eq!(r.status, Status::Pass);
        r.check("b", Status::Indeterminate, "");
        r.finish();
        assert_eq!(r.status, Status::Indeterminate);
        r.assert("c", false, "");
        r.finish();
        assert_eq!(r.status, Status::Fail);
    }

    #[test]
    fn quantity_tags() {
        let j = serde_json::to_string(&Quantity::exact(2.0)).unwrap();
        assert_eq!(j, r#"{"value":2.0,"exact":true}"#);
        let j = serde_json::to_string(&Quantity::estimate(1.0, 1e-9)).unwrap();
        assert_eq!(j, r#"{"value":1.0,"error":1e-9}"#);
    }

    #[test]
    fn csv_layout() {
        let mut r = RunReport::new("x");
        r.rows.push(Row::new("a,b").with("v", Quantity::exact(1.0)));
        r.rows.push(Row::new("c").with("w", Quantity::estimate(2.0, 0.5)));
        assert_eq!(r.to_csv(), "label,v,v_error,w,w_error\n\"a,b\",1,exact,,\nc,,,2,0.5\n");
    }
}
