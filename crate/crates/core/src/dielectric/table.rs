//! Optical data tables and their plain-text file format.
//!
//! ```text
//! # material: gold
//! # source: handbook tabulation
//! # class: metal
//! # columns: eV eps2
//! 0.10  1.3e4
//! ```
//! `columns` is required and is one of `eV eps2`, `eV n k`, `rad/s eps2`, `rad/s n k`.
//! Photon energies in eV are converted with [`crate::constants::EV_TO_RAD_PER_S`].

use crate::constants::EV_TO_RAD_PER_S;
use crate::error::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaterialClass {
    Metal,
    Insulator,
}

#[derive(Clone, Debug, PartialEq)]
pub enum OpticalColumns {
    ImEps(Vec<f64>),
    NK { n: Vec<f64>, k: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct OpticalDataTable {
    /// Angular frequency, rad/s, strictly increasing.
    pub omega: Vec<f64>,
    pub columns: OpticalColumns,
    pub material: String,
    pub source: String,
    pub class: MaterialClass,
}

fn parse_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("line {line}: {msg}"))
}

impl OpticalDataTable {
    pub fn new(
        omega: Vec<f64>,
        columns: OpticalColumns,
        material: impl Into<String>,
        source: impl Into<String>,
        class: MaterialClass,
    ) -> Result<Self> {
        let t = Self {
            omega,
            columns,
            material: material.into(),
            source: source.into(),
            class,
        };
        t.check()?;
        Ok(t)
    }

    fn check(&self) -> Result<()> {
        let n = self.omega.len();
        if n == 0 {
            return Err(Error::Validation("optical table is empty".into()));
        }
        if self.omega[0] <= 0.0 || self.omega.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Validation(
                "optical table frequencies must be positive and strictly increasing".into(),
            ));
        }
        let len_ok = match &self.columns {
            OpticalColumns::ImEps(v) => v.len() == n,
            OpticalColumns::NK { n: nn, k } => nn.len() == n && k.len() == n,
        };
        if !len_ok {
            return Err(Error::Validation("optical table column lengths differ".into()));
        }
        if self.im_eps().iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::Validation("optical table violates passivity (Im eps < 0)".into()));
        }
        Ok(())
    }

    /// Im eps at the table nodes (2nk for optical constants).
    pub fn im_eps(&self) -> Vec<f64> {
        match &self.columns {
            OpticalColumns::ImEps(v) => v.clone(),
            OpticalColumns::NK { n, k } => n.iter().zip(k).map(|(a, b)| 2.0 * a * b).collect(),
        }
    }

    /// Measured frequency range, rad/s.
    pub fn range(&self) -> (f64, f64) {
        (self.omega[0], self.omega[self.omega.len() - 1])
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut material = String::new();
        let mut source = String::new();
        let mut class = MaterialClass::Metal;
        let mut layout: Option<(f64, bool)> = None;
        let mut omega = Vec::new();
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = i + 1;
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((key, value)) = comment.split_once(':') {
                    let value = value.trim();
                    match key.trim().to_ascii_lowercase().as_str() {
                        "material" => material = value.to_string(),
                        "source" => source = value.to_string(),
                        "class" => {
                            class = match value.to_ascii_lowercase().as_str() {
                                "metal" => MaterialClass::Metal,
                                "insulator" | "dielectric" => MaterialClass::Insulator,
                                other => return Err(parse_err(lineno, format!("unknown class '{other}'"))),
                            }
                        }
                        "columns" => {
                            let cols: Vec<String> =
                                value.split_whitespace().map(|s| s.to_ascii_lowercase()).collect();
                            let scale = match cols.first().map(String::as_str) {
                                Some("ev") => EV_TO_RAD_PER_S,
                                Some("rad/s") => 1.0,
                                _ => return Err(parse_err(lineno, "frequency column must be 'eV' or 'rad/s'")),
                            };
                            let nk = match &cols[1..] {
                                [e] if e == "eps2" => false,
                                [n, k] if n == "n" && k == "k" => true,
                                _ => return Err(parse_err(lineno, "columns must be 'eps2' or 'n k'")),
                            };
                            layout = Some((scale, nk));
                        }
                        _ => {}
                    }
                }
                continue;
            }
            let Some((scale, nk)) = layout else {
                return Err(parse_err(lineno, "data before '# columns:' directive (missing units)"));
            };
            let fields: Vec<f64> = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<f64>().map_err(|e| parse_err(lineno, format!("'{s}': {e}"))))
                .collect::<Result<_>>()?;
            let want = if nk { 3 } else { 2 };
            if fields.len() != want {
                return Err(parse_err(lineno, format!("expected {want} columns, found {}", fields.len())));
            }
            omega.push(fields[0] * scale);
            a.push(fields[1]);
            if nk {
                b.push(fields[2]);
            }
        }
        let Some((_, nk)) = layout else {
            return Err(Error::Parse("missing '# columns:' directive (units undeclared)".into()));
        };
        let columns = if nk {
            OpticalColumns::NK { n: a, k: b }
        } else {
            OpticalColumns::ImEps(a)
        };
        Self::new(omega, columns, material, source, class)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Writes the table in the file format with frequencies in eV.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# material: {}", self.material);
        let _ = writeln!(s, "# source: {}", self.source);
        let class = match self.class {
            MaterialClass::Metal => "metal",
            MaterialClass::Insulator => "insulator",
        };
        let _ = writeln!(s, "# class: {class}");
        match &self.columns {
            OpticalColumns::ImEps(v) => {
                let _ = writeln!(s, "# columns: eV eps2");
                for (w, e) in self.omega.iter().zip(v) {
                    let _ = writeln!(s, "{:e} {e:e}", w / EV_TO_RAD_PER_S);
                }
            }
            OpticalColumns::NK { n, k } => {
                let _ = writeln!(s, "# columns: eV n k");
                for ((w, a), b) in self.omega.iter().zip(n).zip(k) {
                    let _ = writeln!(s, "{:e} {a:e} {b:e}", w / EV_TO_RAD_PER_S);
                }
            }
        }
        s
    }
}
