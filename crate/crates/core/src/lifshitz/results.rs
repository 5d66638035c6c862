//! Result tables: one row per (separation, quantity, setting), CSV and JSON forms.

use super::ModeParts;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuantityKind {
    /// Plate-plate energy per area, J/m^2.
    Energy,
    /// Plate-plate pressure, Pa, positive = attraction.
    Pressure,
    /// V(T) - V(0) per area, J/m^2.
    ThermalCorrection,
    /// Energy over the ideal-plate T = 0 energy.
    EnergyFactor,
    /// Pressure over the ideal-plate T = 0 pressure.
    PressureFactor,
    /// Sphere-plate force, N, positive = attraction.
    SphereForce,
    /// Difference of two sphere-plate forces, N.
    SphereForceDifference,
    /// Atom-wall potential, J.
    AtomPotential,
    /// Atom-wall force, N, negative = attraction.
    AtomForce,
    /// Relative trap frequency shift.
    GammaX,
}

impl QuantityKind {
    pub const ALL: [QuantityKind; 10] = [
        QuantityKind::Energy,
        QuantityKind::Pressure,
        QuantityKind::ThermalCorrection,
        QuantityKind::EnergyFactor,
        QuantityKind::PressureFactor,
        QuantityKind::SphereForce,
        QuantityKind::SphereForceDifference,
        QuantityKind::AtomPotential,
        QuantityKind::AtomForce,
        QuantityKind::GammaX,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            QuantityKind::Energy => "energy",
            QuantityKind::Pressure => "pressure",
            QuantityKind::ThermalCorrection => "thermal-correction",
            QuantityKind::EnergyFactor => "energy-factor",
            QuantityKind::PressureFactor => "pressure-factor",
            QuantityKind::SphereForce => "sphere-force",
            QuantityKind::SphereForceDifference => "sphere-force-difference",
            QuantityKind::AtomPotential => "atom-potential",
            QuantityKind::AtomForce => "atom-force",
            QuantityKind::GammaX => "gamma-x",
        }
    }

    pub fn unit(&self) -> &'static str {
        match self {
            QuantityKind::Energy | QuantityKind::ThermalCorrection => "J/m^2",
            QuantityKind::Pressure => "Pa",
            QuantityKind::SphereForce | QuantityKind::SphereForceDifference | QuantityKind::AtomForce => "N",
            QuantityKind::AtomPotential => "J",
            QuantityKind::EnergyFactor | QuantityKind::PressureFactor | QuantityKind::GammaX => "1",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown quantity kind '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    /// Separation, m.
    pub separation: f64,
    pub quantity: QuantityKind,
    /// Saturation or material setting label.
    pub setting: String,
    pub value: f64,
    pub tm: Option<f64>,
    pub te: Option<f64>,
    pub parts: Option<ModeParts>,
    /// Absolute error estimate in the unit of `value`.
    pub error: Option<f64>,
}

impl ResultRow {
    pub fn new(separation: f64, quantity: QuantityKind, setting: impl Into<String>, value: f64) -> Self {
        Self {
            separation,
            quantity,
            setting: setting.into(),
            value,
            tm: None,
            te: None,
            parts: None,
            error: None,
        }
    }
}

/// Rows plus provenance metadata; metadata keys are kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub metadata: BTreeMap<String, String>,
    pub rows: Vec<ResultRow>,
}

const COLUMNS: [&str; 11] = [
    "d_m",
    "quantity",
    "setting",
    "value",
    "tm",
    "te",
    "tm_propagating",
    "tm_evanescent",
    "te_propagating",
    "te_evanescent",
    "error",
];

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

fn parse_cell(s: &str, line: usize) -> Result<Option<f64>> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse::<f64>()
        .map(Some)
        .map_err(|_| Error::Parse(format!("line {line}: bad number '{s}'")))
}

impl ResultTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set_meta(&mut self, key: impl Into<String>, value: impl ToString) {
        self.metadata.insert(key.into(), value.to_string());
    }

    /// Appends a row; settings must not contain separators.
    pub fn push(&mut self, row: ResultRow) -> Result<()> {
        if row.setting.contains([',', '\n', '\r', '"']) {
            return Err(Error::Validation(format!("setting label '{}' contains a separator", row.setting)));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Rows of one quantity, in table order.
    pub fn select<'a>(&'a self, quantity: QuantityKind, setting: Option<&'a str>) -> impl Iterator<Item = &'a ResultRow> {
        self.rows
            .iter()
            .filter(move |r| r.quantity == quantity && setting.is_none_or(|s| r.setting == s))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            let v = v.replace('\n', " ");
            let _ = writeln!(out, "# {k} = {v}");
        }
        out.push_str(&COLUMNS.join(","));
        out.push('\n');
        for r in &self.rows {
            let p = r.parts;
            let cells = [
                format!("{:e}", r.separation),
                r.quantity.as_str().to_string(),
                r.setting.clone(),
                format!("{:e}", r.value),
                cell(r.tm),
                cell(r.te),
                cell(p.map(|p| p.tm_propagating)),
                cell(p.map(|p| p.tm_evanescent)),
                cell(p.map(|p| p.te_propagating)),
                cell(p.map(|p| p.te_evanescent)),
                cell(r.error),
            ];
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut table = ResultTable::new();
        let mut header_seen = false;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            if let Some(meta) = raw.strip_prefix('#') {
                if let Some((k, v)) = meta.split_once('=') {
                    table.metadata.insert(k.trim().to_string(), v.trim().to_string());
                }
                continue;
            }
            if raw.trim().is_empty() {
                continue;
            }
            let cells: Vec<&str> = raw.split(',').collect();
            if !header_seen {
                if cells != COLUMNS {
                    return Err(Error::Parse(format!("line {line}: unexpected column header")));
                }
                header_seen = true;
                continue;
            }
            if cells.len() != COLUMNS.len() {
                return Err(Error::Parse(format!(
                    "line {line}: expected {} cells, found {}",
                    COLUMNS.len(),
                    cells.len()
                )));
            }
            let num = |j: usize| parse_cell(cells[j], line);
            let required = |j: usize| {
                num(j)?.ok_or_else(|| Error::Parse(format!("line {line}: missing {}", COLUMNS[j])))
            };
            let parts = match (num(6)?, num(7)?, num(8)?, num(9)?) {
                (Some(a), Some(b), Some(c), Some(d)) => Some(ModeParts::from_array([a, b, c, d])),
                (None, None, None, None) => None,
                _ => return Err(Error::Parse(format!("line {line}: incomplete decomposition"))),
            };
            table.rows.push(ResultRow {
                separation: required(0)?,
                quantity: QuantityKind::parse(cells[1])?,
                setting: cells[2].to_string(),
                value: required(3)?,
                tm: num(4)?,
                te: num(5)?,
                parts,
                error: num(10)?,
            });
        }
        if !header_seen {
            return Err(Error::Parse("result table has no column header".into()));
        }
        Ok(table)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Largest |sum of parts - total| over rows that carry a decomposition.
    pub fn closure_defect(&self) -> f64 {
        self.rows
            .iter()
            .filter_map(|r| r.parts.map(|p| (p.total() - r.value).abs()))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ResultTable {
        let mut t = ResultTable::new();
        t.set_meta("config_hash", "abc123");
        t.set_meta("temperature_K", 300.0);
        let mut r = ResultRow::new(1e-6, QuantityKind::Energy, "shifted(D=1e-2;zero-term)", -4.1234567890123e-10);
        r.tm = Some(-3.0e-10);
        r.te = Some(-1.1234567890123e-10);
        r.parts = Some(ModeParts::from_array([0.1, -0.2, 0.3, 1.0 / 3.0]));
        r.error = Some(1e-17);
        t.push(r).unwrap();
        t.push(ResultRow::new(2e-6, QuantityKind::GammaX, "none", 0.1 + 0.2)).unwrap();
        t
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let t = sample();
        let csv = t.to_csv();
        assert!(csv.starts_with("# config_hash = abc123\n"));
        assert_eq!(ResultTable::from_csv(&csv).unwrap(), t);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let t = sample();
        assert_eq!(ResultTable::from_json(&t.to_json().unwrap()).unwrap(), t);
    }

    #[test]
    fn separators_in_labels_are_rejected() {
        let mut t = ResultTable::new();
        assert!(t.push(ResultRow::new(1.0, QuantityKind::Energy, "a,b", 0.0)).is_err());
    }

    #[test]
    fn malformed_csv_is_rejected() {
        assert!(ResultTable::from_csv("d_m,value\n1,2\n").is_err());
        let mut csv = sample().to_csv();
        csv.push_str("1e-6,energy,none\n");
        assert!(ResultTable::from_csv(&csv).is_err());
        assert!(QuantityKind::parse("torque").is_err());
    }
}
