//! Run reports and their JSON, CSV and plain-text renderings.

use crate::config::{Format, Settings};
use hypconf::{Mat2, Params, C64};
use serde_json::{json, Map, Value as Json};
use std::fmt::Write;

pub const SCHEMA: u64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Matrix(Mat2),
    Complex(C64),
    Real(f64),
    Text(String),
    /// `(|α|, error)` pairs of a sweep.
    Series(Vec<(f64, f64)>),
    Params(Params),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Item {
    pub name: String,
    pub value: Value,
}

/// A checked quantity: passes when `value <= tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub name: String,
    /// What is measured, in words.
    pub check: String,
    pub value: f64,
    pub tol: f64,
}

impl Residual {
    pub fn passed(&self) -> bool {
        self.value <= self.tol
    }

    pub fn failure_text(&self) -> String {
        format!("{} {:.3e} > {:.0e}", self.check, self.value, self.tol)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub command: String,
    pub params: Option<Params>,
    pub config: Settings,
    pub results: Vec<Item>,
    pub residuals: Vec<Residual>,
}

fn pair(z: C64) -> Json {
    json!([z.re, z.im])
}

fn matrix(m: &Mat2) -> Json {
    Json::Array(m.entries().iter().map(|z| pair(*z)).collect())
}

fn params_json(p: &Params) -> Json {
    json!({"alpha": pair(p.alpha), "beta": pair(p.beta), "gamma": pair(p.gamma_)})
}

impl Report {
    pub fn new(command: &str, params: Option<Params>, config: Settings) -> Self {
        Report { command: command.to_string(), params, config, ..Default::default() }
    }

    pub fn push(&mut self, name: impl Into<String>, value: Value) {
        self.results.push(Item { name: name.into(), value });
    }

    pub fn check(&mut self, name: impl Into<String>, check: impl Into<String>, value: f64, tol: f64) {
        self.residuals.push(Residual { name: name.into(), check: check.into(), value, tol });
    }

    pub fn passed(&self) -> bool {
        self.residuals.iter().all(Residual::passed)
    }

    pub fn failures(&self) -> Vec<String> {
        self.residuals.iter().filter(|r| !r.passed()).map(Residual::failure_text).collect()
    }

    pub fn to_json(&self) -> Json {
        let results: Vec<Json> = self
            .results
            .iter()
            .map(|it| {
                let (kind, v) = match &it.value {
                    Value::Matrix(m) => ("matrix", matrix(m)),
                    Value::Complex(z) => ("complex", pair(*z)),
                    Value::Real(x) => ("real", json!(x)),
                    Value::Text(s) => ("text", json!(s)),
                    Value::Series(s) => ("series", Json::Array(s.iter().map(|(a, e)| json!([a, e])).collect())),
                    Value::Params(p) => ("params", params_json(p)),
                };
                json!({"name": it.name, "kind": kind, "value": v})
            })
            .collect();
        let residuals: Vec<Json> = self
            .residuals
            .iter()
            .map(|r| json!({"name": r.name, "check": r.check, "value": r.value, "tol": r.tol, "passed": r.passed()}))
            .collect();
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "params": self.params.as_ref().map(params_json),
            "config": Json::Object(self.config.iter().map(|(k, v)| (k.clone(), json!(v))).collect::<Map<_, _>>()),
            "results": results,
            "residuals": residuals,
            "passed": self.passed(),
        })
    }

    /// Sweeps become `magnitude,error` rows; everything else `name,row,col,re,im` rows.
    /// Residuals follow in their own block.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let series: Vec<_> = self.results.iter().filter_map(|it| if let Value::Series(s) = &it.value { Some(s) } else { None }).collect();
        if let [s] = series[..] {
            out.push_str("magnitude,error\n");
            for (m, e) in s {
                let _ = writeln!(out, "{m:e},{e:e}");
            }
            for it in &self.results {
                if let Value::Real(x) = it.value {
                    let _ = writeln!(out, "# {},{x}", it.name);
                }
            }
        } else {
            out.push_str("name,row,col,re,im\n");
            for it in &self.results {
                match &it.value {
                    Value::Matrix(m) => {
                        for i in 0..2 {
                            for j in 0..2 {
                                let _ = writeln!(out, "{},{i},{j},{:e},{:e}", it.name, m[(i, j)].re, m[(i, j)].im);
                            }
                        }
                    }
                    Value::Complex(z) => {
                        let _ = writeln!(out, "{},,,{:e},{:e}", it.name, z.re, z.im);
                    }
                    Value::Real(x) => {
                        let _ = writeln!(out, "{},,,{x:e},", it.name);
                    }
                    Value::Params(p) => {
                        for (n, z) in [("alpha", p.alpha), ("beta", p.beta), ("gamma", p.gamma_)] {
                            let _ = writeln!(out, "{}.{n},,,{:e},{:e}", it.name, z.re, z.im);
                        }
                    }
                    Value::Text(_) | Value::Series(_) => {}
                }
            }
        }
        out.push_str("\ncheck,value,tol,passed\n");
        for r in &self.residuals {
            let _ = writeln!(out, "{},{:e},{:e},{}", r.name, r.value, r.tol, r.passed());
        }
        out
    }

    pub fn to_pretty(&self) -> String {
        let mut out = format!("{}\n", self.command);
        if let Some(p) = &self.params {
            let _ = writeln!(out, "  alpha = {}, beta = {}, gamma = {}", p.alpha, p.beta, p.gamma_);
        }
        for it in &self.results {
            match &it.value {
                Value::Matrix(m) => {
                    let _ = writeln!(out, "  {} =", it.name);
                    for i in 0..2 {
                        let (a, b) = (format!("{:.15e}", m[(i, 0)]), format!("{:.15e}", m[(i, 1)]));
                        let _ = writeln!(out, "    [{a:>46}  {b:>46}]");
                    }
                }
                Value::Complex(z) => {
                    let _ = writeln!(out, "  {} = {z:.15e}", it.name);
                }
                Value::Real(x) => {
                    let _ = writeln!(out, "  {} = {x:.6e}", it.name);
                }
                Value::Text(s) => {
                    let _ = writeln!(out, "  {} = {s}", it.name);
                }
                Value::Series(s) => {
                    let _ = writeln!(out, "  {}:", it.name);
                    for (m, e) in s {
                        let _ = writeln!(out, "    |alpha| = {m:>10.3e}  error = {e:.3e}");
                    }
                }
                Value::Params(p) => {
                    let _ = writeln!(out, "  {} = ({}, {}, {})", it.name, p.alpha, p.beta, p.gamma_);
                }
            }
        }
        for r in &self.residuals {
            let mark = if r.passed() { "ok  " } else { "FAIL" };
            let _ = writeln!(out, "  {mark} {:<28} {:.3e} (tol {:.0e})", r.name, r.value, r.tol);
        }
        let _ = writeln!(out, "{}", if self.passed() { "all checks passed" } else { "some checks failed" });
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serialises");
                s.push('\n');
                s
            }
            Format::Csv => self.to_csv(),
            Format::Pretty => self.to_pretty(),
        }
    }
}

/// Residual values and configuration recorded in a JSON report.
#[derive(Debug, Clone, PartialEq)]
pub struct Recorded {
    pub command: String,
    pub config: Settings,
    pub residuals: Vec<(String, Option<f64>)>,
}

pub fn read_recorded(text: &str) -> Result<Recorded, String> {
    let v: Json = serde_json::from_str(text).map_err(|e| format!("report is not valid JSON: {e}"))?;
    if v.get("schema").and_then(Json::as_u64) != Some(SCHEMA) {
        return Err(format!("unsupported report schema (expected {SCHEMA})"));
    }
    let command = v.get("command").and_then(Json::as_str).ok_or("report has no command")?.to_string();
    let config = v
        .get("config")
        .and_then(Json::as_object)
        .ok_or("report has no config")?
        .iter()
        .map(|(k, v)| v.as_str().map(|s| (k.clone(), s.to_string())).ok_or(format!("config entry '{k}' is not a string")))
        .collect::<Result<Settings, String>>()?;
    let residuals = v
        .get("residuals")
        .and_then(Json::as_array)
        .ok_or("report has no residuals")?
        .iter()
        .map(|r| {
            let name = r.get("name").and_then(Json::as_str).ok_or("residual without name")?;
            // non-finite values are written as null
            Ok((name.to_string(), r.get("value").and_then(Json::as_f64)))
        })
        .collect::<Result<_, String>>()?;
    Ok(Recorded { command, config, residuals })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("monodromy", Some(Params::new(C64::new(0.5, 0.1), C64::new(1.0 / 3.0, 0.0), C64::new(0.25, 0.0))), Settings::new());
        r.push("M0", Value::Matrix(Mat2::new(C64::new(1.0, 2.0), C64::new(3.0, 4.0), C64::new(5.0, 6.0), C64::new(7.0, 8.0))));
        r.push("rate", Value::Real(-1.0));
        r.check("cyclic", "cyclic relation residual", 0.1 + 0.2, 1e-10);
        r.check("oracle", "oracle distance", 1e-12, 1e-7);
        r
    }

    #[test]
    fn json_layout() {
        let j = sample().to_json();
        assert_eq!(j["schema"], 1);
        assert_eq!(j["results"][0]["value"], json!([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0], [7.0, 8.0]]));
        assert_eq!(j["residuals"][0]["passed"], false);
        assert_eq!(j["passed"], false);
        assert_eq!(j["params"]["gamma"], json!([0.25, 0.0]));
    }

    #[test]
    fn residuals_round_trip_exactly() {
        let r = sample();
        let back = read_recorded(&r.render(Format::Json)).unwrap();
        assert_eq!(back.residuals[0], ("cyclic".to_string(), Some(0.1 + 0.2)));
        assert_eq!(back.residuals[1].1.unwrap().to_bits(), 1e-12f64.to_bits());
        assert_eq!(back.command, "monodromy");
    }

    #[test]
    fn failure_text_names_the_check() {
        let r = sample();
        assert_eq!(r.failures(), vec!["cyclic relation residual 3.000e-1 > 1e-10".to_string()]);
    }

    #[test]
    fn csv_blocks() {
        let csv = sample().to_csv();
        assert!(csv.starts_with("name,row,col,re,im\nM0,0,0,1e0,2e0\n"));
        assert!(csv.contains("\ncheck,value,tol,passed\ncyclic,"));
        let mut s = Report::new("confluence-sweep", None, Settings::new());
        s.push("errors", Value::Series(vec![(100.0, 0.01), (1000.0, 0.001)]));
        s.push("fitted_rate", Value::Real(-1.0));
        let csv = s.to_csv();
        assert!(csv.starts_with("magnitude,error\n1e2,1e-2\n1e3,1e-3\n# fitted_rate,-1\n"), "{csv}");
    }

    #[test]
    fn rejects_foreign_reports() {
        assert!(read_recorded("{}").is_err());
        assert!(read_recorded("not json").is_err());
        assert!(read_recorded(r#"{"schema": 2, "command": "x", "config": {}, "residuals": []}"#).is_err());
    }
}
