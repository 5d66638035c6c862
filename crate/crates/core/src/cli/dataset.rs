//! Experimental datasets and model-versus-data residuals.
//!
//! ```text
//! # quantity: pressure-factor
//! # normalization: normalized-pressure
//! # separation_unit: um
//! # value_unit: 1
//! # source: digitized figure
//! 0.20  0.86  0.02
//! ```
//! Rows are `d value error`, whitespace or comma separated. `quantity`,
//! `separation_unit` and `value_unit` are required.

use super::config::per_metre;
use crate::error::{validation, Error, Result};
use crate::interp::Pchip;
use crate::lifshitz::{QuantityKind, ResultTable};
use std::fmt::Write as _;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    Raw,
    CorrectionFactor,
    NormalizedPressure,
}

impl Normalization {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(Normalization::Raw),
            "correction-factor" => Ok(Normalization::CorrectionFactor),
            "normalized-pressure" => Ok(Normalization::NormalizedPressure),
            other => Err(validation(format!(
                "unknown normalization '{other}' (raw, correction-factor, normalized-pressure)"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Normalization::Raw => "raw",
            Normalization::CorrectionFactor => "correction-factor",
            Normalization::NormalizedPressure => "normalized-pressure",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DataPoint {
    /// m.
    pub separation: f64,
    /// SI unit of the quantity.
    pub value: f64,
    /// One standard deviation, SI, > 0.
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentDataset {
    pub quantity: QuantityKind,
    pub normalization: Normalization,
    pub source: String,
    pub rows: Vec<DataPoint>,
}

/// SI scale of a value unit, checked against the quantity.
fn value_scale(quantity: QuantityKind, unit: &str) -> Result<f64> {
    let si = quantity.unit();
    let scale = match (si, unit) {
        (a, b) if a == b => 1.0,
        ("Pa", "mPa") => 1e-3,
        ("N", "nN") => 1e-9,
        ("N", "pN") => 1e-12,
        ("N", "fN") => 1e-15,
        ("J/m^2", "nJ/m^2") => 1e-9,
        _ => {
            return Err(validation(format!(
                "value unit '{unit}' does not fit quantity '{}' (SI unit {si})",
                quantity.as_str()
            )))
        }
    };
    Ok(scale)
}

impl ExperimentDataset {
    pub fn new(quantity: QuantityKind, normalization: Normalization, source: String, rows: Vec<DataPoint>) -> Result<Self> {
        let ds = Self {
            quantity,
            normalization,
            source,
            rows,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        let expected = match self.normalization {
            Normalization::Raw => None,
            Normalization::CorrectionFactor => Some(QuantityKind::EnergyFactor),
            Normalization::NormalizedPressure => Some(QuantityKind::PressureFactor),
        };
        match expected {
            Some(q) if q != self.quantity => {
                return Err(validation(format!(
                    "normalization '{}' needs quantity '{}'",
                    self.normalization.as_str(),
                    q.as_str()
                )))
            }
            None if self.quantity.unit() == "1" && !matches!(self.quantity, QuantityKind::GammaX) => {
                return Err(validation("a dimensionless factor needs a factor normalization"))
            }
            _ => {}
        }
        if self.rows.is_empty() {
            return Err(validation("dataset has no rows"));
        }
        for (i, r) in self.rows.iter().enumerate() {
            if !(r.error > 0.0 && r.error.is_finite()) {
                return Err(validation(format!("row {}: error must be > 0, got {}", i + 1, r.error)));
            }
            if !(r.separation > 0.0 && r.value.is_finite()) {
                return Err(validation(format!("row {}: separation must be > 0 and value finite", i + 1)));
            }
        }
        if self.rows.windows(2).any(|w| !(w[1].separation > w[0].separation)) {
            return Err(validation("dataset separations must be strictly increasing"));
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut quantity = None;
        let mut normalization = Normalization::Raw;
        let mut source = String::new();
        let mut d_unit = None;
        let mut v_unit: Option<String> = None;
        let mut rows = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let n = i + 1;
            if line.is_empty() {
                continue;
            }
            if let Some(c) = line.strip_prefix('#') {
                if let Some((k, v)) = c.split_once(':') {
                    let v = v.trim();
                    match k.trim() {
                        "quantity" => quantity = Some(QuantityKind::parse(v)?),
                        "normalization" => normalization = Normalization::parse(v)?,
                        "source" => source = v.to_string(),
                        "separation_unit" => d_unit = Some(per_metre(v)?),
                        "value_unit" => v_unit = Some(v.to_string()),
                        _ => {}
                    }
                }
                continue;
            }
            let (Some(q), Some(ds), Some(vu)) = (quantity, d_unit, v_unit.as_deref()) else {
                return Err(Error::Parse(format!(
                    "line {n}: data before the quantity, separation_unit and value_unit directives (missing units)"
                )));
            };
            let vs = value_scale(q, vu)?;
            let f: Vec<f64> = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<f64>().map_err(|e| Error::Parse(format!("line {n}: '{s}': {e}"))))
                .collect::<Result<_>>()?;
            let [d, v, e] = f[..] else {
                return Err(Error::Parse(format!("line {n}: expected 3 columns, found {}", f.len())));
            };
            rows.push(DataPoint {
                separation: d / ds,
                value: v * vs,
                error: e * vs,
            });
        }
        let quantity = quantity.ok_or_else(|| Error::Parse("missing '# quantity:' directive".into()))?;
        if d_unit.is_none() || v_unit.is_none() {
            return Err(Error::Parse("missing separation_unit or value_unit directive".into()));
        }
        Self::new(quantity, normalization, source, rows)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text).map_err(|e| e.context(path.display().to_string()))
    }

    /// The file format in SI units.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# quantity: {}", self.quantity.as_str());
        let _ = writeln!(s, "# normalization: {}", self.normalization.as_str());
        let _ = writeln!(s, "# source: {}", self.source);
        let _ = writeln!(s, "# separation_unit: m");
        let _ = writeln!(s, "# value_unit: {}", self.quantity.unit());
        for r in &self.rows {
            let _ = writeln!(s, "{:e} {:e} {:e}", r.separation, r.value, r.error);
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub separation: f64,
    pub data: f64,
    pub error: f64,
    pub model: f64,
    /// (data - model) / error.
    pub normalized: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    pub quantity: QuantityKind,
    pub setting: String,
    pub residuals: Vec<Residual>,
    pub chi_squared: f64,
    pub within_error: usize,
    /// Largest |data - model| / |model|.
    pub max_relative_deviation: f64,
}

/// Relative deviation above which a comparison is flagged.
pub const DEVIATION_FLAG: f64 = 0.2;

impl ComparisonReport {
    pub fn flagged(&self) -> bool {
        self.max_relative_deviation > DEVIATION_FLAG
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# quantity = {}", self.quantity.as_str());
        let _ = writeln!(s, "# setting = {}", self.setting);
        let _ = writeln!(s, "# points = {}", self.residuals.len());
        let _ = writeln!(s, "# chi_squared = {:e}", self.chi_squared);
        let _ = writeln!(s, "# within_error = {}", self.within_error);
        let _ = writeln!(s, "# max_relative_deviation = {:e}", self.max_relative_deviation);
        let _ = writeln!(s, "# flagged = {}", self.flagged());
        s.push_str("d_m,data,error,model,residual_over_sigma\n");
        for r in &self.residuals {
            let _ = writeln!(s, "{:e},{:e},{:e},{:e},{:e}", r.separation, r.data, r.error, r.model, r.normalized);
        }
        s
    }
}

/// Residuals of every setting of the dataset's quantity in the result table.
pub fn compare(result: &ResultTable, dataset: &ExperimentDataset) -> Result<Vec<ComparisonReport>> {
    let mut settings: Vec<&str> = Vec::new();
    for r in result.select(dataset.quantity, None) {
        if !settings.contains(&r.setting.as_str()) {
            settings.push(&r.setting);
        }
    }
    if settings.is_empty() {
        return Err(validation(format!(
            "quantity mismatch: result table has no '{}' rows",
            dataset.quantity.as_str()
        )));
    }
    settings
        .into_iter()
        .map(|setting| {
            let rows: Vec<_> = result.select(dataset.quantity, Some(setting)).collect();
            let x: Vec<f64> = rows.iter().map(|r| r.separation).collect();
            let y: Vec<f64> = rows.iter().map(|r| r.value).collect();
            let model = |d: f64| -> Result<f64> {
                if x.len() == 1 {
                    return if d == x[0] {
                        Ok(y[0])
                    } else {
                        Err(validation(format!("model has a single separation; cannot interpolate to {d:e} m")))
                    };
                }
                Pchip::new(x.clone(), y.clone())?.eval(d).ok_or_else(|| {
                    validation(format!(
                        "dataset separation {d:e} m outside model range [{:e}, {:e}] m",
                        x[0],
                        x[x.len() - 1]
                    ))
                })
            };
            let mut residuals = Vec::with_capacity(dataset.rows.len());
            for p in &dataset.rows {
                let m = model(p.separation)?;
                residuals.push(Residual {
                    separation: p.separation,
                    data: p.value,
                    error: p.error,
                    model: m,
                    normalized: (p.value - m) / p.error,
                });
            }
            let chi_squared = residuals.iter().map(|r| r.normalized * r.normalized).sum();
            let within_error = residuals.iter().filter(|r| r.normalized.abs() <= 1.0).count();
            let max_relative_deviation = residuals
                .iter()
                .map(|r| ((r.data - r.model) / r.model).abs())
                .fold(0.0, f64::max);
            Ok(ComparisonReport {
                quantity: dataset.quantity,
                setting: setting.to_string(),
                residuals,
                chi_squared,
                within_error,
                max_relative_deviation,
            })
        })
        .collect()
}
