//! On-disk formats: the signal spec document, sampled data as
//! two-column CSV per dimension, and row-major matrix CSV.

use std::fs::File;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::signal::{Anchor, Signal, TrigTerm};

/// Declarative signal description: `{kind, params, children}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SignalSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub params: serde_json::Map<String, Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<SignalSpec>,
}

impl SignalSpec {
    pub fn leaf(kind: &str) -> SignalSpec {
        SignalSpec {
            kind: kind.into(),
            params: serde_json::Map::new(),
            children: Vec::new(),
        }
    }

    fn param_f64(&self, name: &str) -> Result<f64> {
        self.params
            .get(name)
            .and_then(Value::as_f64)
            .ok_or_else(|| Error::InvalidParameter(format!("{} spec needs numeric param '{name}'", self.kind)))
    }

    fn only_child(&self) -> Result<&SignalSpec> {
        if self.children.len() != 1 {
            return Err(Error::InvalidParameter(format!(
                "{} spec needs exactly one child (got {})",
                self.kind,
                self.children.len()
            )));
        }
        Ok(&self.children[0])
    }

    /// Builds the signal the document describes. Relative `file` params of
    /// sampled specs are resolved against `base_dir`.
    pub fn build(&self, base_dir: &Path) -> Result<Signal> {
        match self.kind.as_str() {
            "constant" => {
                let values: Vec<f64> = match self.params.get("values") {
                    Some(v) => serde_json::from_value(v.clone())
                        .map_err(|e| Error::InvalidParameter(format!("constant values: {e}")))?,
                    None => vec![self.param_f64("value")?],
                };
                if values.is_empty() {
                    return Err(Error::InvalidParameter("constant spec needs nonempty values".into()));
                }
                Ok(Signal::constant(values))
            }
            "paper_step" => Ok(Signal::paper_step()),
            "pulse_train" => Signal::pulse_train(self.param_f64("period")?, self.param_f64("width")?),
            "trig_sum" => {
                let terms: Vec<TrigTerm> = self
                    .params
                    .get("terms")
                    .cloned()
                    .map(serde_json::from_value)
                    .transpose()
                    .map_err(|e| Error::InvalidParameter(format!("trig_sum terms: {e}")))?
                    .ok_or_else(|| Error::InvalidParameter("trig_sum spec needs 'terms'".into()))?;
                Ok(Signal::trig_sum(terms))
            }
            "exp_decay" => Signal::exp_decay(self.param_f64("amplitude")?, self.param_f64("rate")?),
            "primitive" => {
                let anchor = match self.params.get("anchor") {
                    None => Anchor::MinusInfinity,
                    Some(Value::String(s)) if s == "minus_infinity" => Anchor::MinusInfinity,
                    Some(v) => Anchor::Time(v.as_f64().ok_or_else(|| {
                        Error::InvalidParameter("primitive anchor must be 'minus_infinity' or a number".into())
                    })?),
                };
                Signal::primitive(self.only_child()?.build(base_dir)?, anchor)
            }
            "sum" => {
                let parts = self
                    .children
                    .iter()
                    .map(|c| c.build(base_dir))
                    .collect::<Result<Vec<_>>>()?;
                Signal::sum(parts)
            }
            "scale" => Ok(Signal::scale(
                self.param_f64("factor")?,
                self.only_child()?.build(base_dir)?,
            )),
            "shift" => Ok(Signal::shift(
                self.only_child()?.build(base_dir)?,
                self.param_f64("tau")?,
            )),
            "sampled" => {
                if let Some(files) = self.params.get("files") {
                    let files: Vec<String> = serde_json::from_value(files.clone())
                        .map_err(|e| Error::InvalidParameter(format!("sampled files: {e}")))?;
                    let paths: Vec<_> = files.iter().map(|f| base_dir.join(f)).collect();
                    load_sampled_csv(&paths)
                } else {
                    let t0 = self.param_f64("t0")?;
                    let dt = self.param_f64("dt")?;
                    let values: Vec<Vec<f64>> = self
                        .params
                        .get("values")
                        .cloned()
                        .map(serde_json::from_value)
                        .transpose()
                        .map_err(|e| Error::InvalidParameter(format!("sampled values: {e}")))?
                        .ok_or_else(|| {
                            Error::InvalidParameter("sampled spec needs 'files' or inline 'values'".into())
                        })?;
                    Signal::sampled(t0, dt, values)
                }
            }
            other => Err(Error::InvalidParameter(format!("unknown signal kind '{other}'"))),
        }
    }
}

/// Reads a signal spec document and builds the signal; sampled file
/// references resolve relative to the document's directory.
pub fn load_signal(path: &Path) -> Result<Signal> {
    let file = File::open(path)?;
    let spec: SignalSpec = serde_json::from_reader(file)
        .map_err(|e| Error::InvalidParameter(format!("signal spec {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    spec.build(base)
}

/// Loads a uniformly sampled signal from one two-column CSV `(t, value)`
/// per dimension. All files must share the same time grid.
pub fn load_sampled_csv(paths: &[std::path::PathBuf]) -> Result<Signal> {
    if paths.is_empty() {
        return Err(Error::InvalidParameter("sampled signal needs at least one CSV file".into()));
    }
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut times: Option<Vec<f64>> = None;
    for p in paths {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(false)
            .trim(csv::Trim::All)
            .from_path(p)?;
        let mut ts = Vec::new();
        let mut vs = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            if rec.len() != 2 {
                return Err(Error::InvalidParameter(format!(
                    "{}: expected two columns (t, value), got {}",
                    p.display(),
                    rec.len()
                )));
            }
            // skip a header row if present
            let t: f64 = match rec[0].parse() {
                Ok(t) => t,
                Err(_) if ts.is_empty() => continue,
                Err(e) => return Err(Error::InvalidParameter(format!("{}: bad time '{}': {e}", p.display(), &rec[0]))),
            };
            let v: f64 = rec[1]
                .parse()
                .map_err(|e| Error::InvalidParameter(format!("{}: bad value '{}': {e}", p.display(), &rec[1])))?;
            ts.push(t);
            vs.push(v);
        }
        match &times {
            None => times = Some(ts),
            Some(prev) => {
                if prev.len() != ts.len() || prev.iter().zip(&ts).any(|(a, b)| (a - b).abs() > 1e-9) {
                    return Err(Error::InvalidParameter(
                        "sampled CSV files disagree on the time grid".into(),
                    ));
                }
            }
        }
        columns.push(vs);
    }
    let times = times.unwrap();
    if times.len() < 2 {
        return Err(Error::InvalidParameter("sampled CSV needs at least two rows".into()));
    }
    let dt = times[1] - times[0];
    if !(dt > 0.0) || times.windows(2).any(|w| (w[1] - w[0] - dt).abs() > 1e-9 * dt.max(1.0)) {
        return Err(Error::InvalidParameter("sampled CSV time grid must be uniform and increasing".into()));
    }
    let n = times.len();
    let dim = columns.len();
    let mut values = vec![vec![0.0; dim]; n];
    for (d, col) in columns.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            values[i][d] = v;
        }
    }
    Signal::sampled(times[0], dt, values)
}

/// Writes sampled values as `(t, u_1, .., u_n)` CSV rows.
pub fn write_solution_csv(path: &Path, t0: f64, dt: f64, values: &[Vec<f64>]) -> Result<()> {
    let mut wtr = csv::Writer::from_path(path)?;
    for (i, row) in values.iter().enumerate() {
        let mut rec = vec![format!("{:.12e}", t0 + i as f64 * dt)];
        rec.extend(row.iter().map(|v| format!("{v:.12e}")));
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads a row-major matrix from CSV; every row must have the same width.
pub fn load_matrix_csv(path: &Path) -> Result<DMatrix<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|e| Error::InvalidParameter(format!("{}: bad entry '{s}': {e}", path.display())))
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::InvalidParameter(format!(
                    "{}: ragged rows ({} vs {})",
                    path.display(),
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::InvalidParameter(format!("{}: empty matrix", path.display())));
    }
    let nr = rows.len();
    let nc = rows[0].len();
    Ok(DMatrix::from_fn(nr, nc, |i, j| rows[i][j]))
}
