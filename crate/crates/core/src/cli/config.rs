//! Declarative run configuration (TOML).
//!
//! Relative paths (optical tables, datasets, outputs) resolve against the
//! directory that holds the config file.

use crate::atomwall::{AtomModel, TrapConfig};
use crate::dielectric::{Composite, DielectricModel, DrudeTerm, Oscillator, OpticalDataTable, TabulatedDielectric, TailPolicy};
use crate::error::{validation, Error, Result};
use crate::lifshitz::{EvaluationRoute, QuadratureSpec, QuantityKind, ThermalState};
use crate::saturation::{SaturationModel, Scope};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Geometry {
    PlatePlate,
    AtomWall,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorSpec {
    pub strength: f64,
    /// rad/s.
    pub resonance: f64,
    /// rad/s.
    #[serde(default)]
    pub damping: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarrierSpec {
    /// rad/s.
    pub plasma_frequency: f64,
    /// rad/s.
    pub relaxation_rate: f64,
}

/// One entry of the materials registry. Frequencies in rad/s, conductivity in s^-1 (Gaussian).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MaterialSpec {
    Drude {
        plasma_frequency: f64,
        relaxation_rate: f64,
    },
    Plasma {
        plasma_frequency: f64,
    },
    Perfect,
    Oscillators {
        oscillators: Vec<OscillatorSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        carriers: Option<CarrierSpec>,
        #[serde(default)]
        conductivity: f64,
    },
    Table {
        path: PathBuf,
        /// Drude relaxation rate used when the low-frequency metal fit fails;
        /// zero means the fit must succeed.
        #[serde(default)]
        fallback_relaxation: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        carriers: Option<CarrierSpec>,
        #[serde(default)]
        conductivity: f64,
    },
}

impl MaterialSpec {
    pub fn build(&self, base_dir: &Path) -> Result<DielectricModel> {
        let wrap = |base: DielectricModel, carriers: Option<CarrierSpec>, conductivity: f64| {
            if carriers.is_none() && conductivity == 0.0 {
                base
            } else {
                DielectricModel::Composite(Box::new(Composite {
                    base,
                    carriers: carriers.map(|c| DrudeTerm {
                        plasma_frequency: c.plasma_frequency,
                        relaxation_rate: c.relaxation_rate,
                    }),
                    conductivity,
                }))
            }
        };
        let model = match self {
            MaterialSpec::Drude {
                plasma_frequency,
                relaxation_rate,
            } => DielectricModel::Drude {
                plasma_frequency: *plasma_frequency,
                relaxation_rate: *relaxation_rate,
            },
            MaterialSpec::Plasma { plasma_frequency } => DielectricModel::Plasma {
                plasma_frequency: *plasma_frequency,
            },
            MaterialSpec::Perfect => DielectricModel::PerfectReflector,
            MaterialSpec::Oscillators {
                oscillators,
                carriers,
                conductivity,
            } => wrap(
                DielectricModel::OscillatorSet(
                    oscillators
                        .iter()
                        .map(|o| Oscillator {
                            strength: o.strength,
                            resonance: o.resonance,
                            damping: o.damping,
                        })
                        .collect(),
                ),
                *carriers,
                *conductivity,
            ),
            MaterialSpec::Table {
                path,
                fallback_relaxation,
                carriers,
                conductivity,
            } => {
                let table = OpticalDataTable::from_file(&base_dir.join(path))?;
                let tails = TailPolicy::for_class(table.class, *fallback_relaxation);
                wrap(
                    DielectricModel::Tabulated(Arc::new(TabulatedDielectric::new(table, Some(tails))?)),
                    *carriers,
                    *conductivity,
                )
            }
        };
        model.validate()?;
        Ok(model)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantKind {
    None,
    Shifted,
    Cutoff,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SaturationSpec {
    pub variant: VariantKind,
    /// D, for the shifted variant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub damping: Option<f64>,
    /// M, for the cutoff variant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_occupation: Option<f64>,
    /// all-modes, te-evanescent or zero-term.
    #[serde(default = "default_scope")]
    pub scope: String,
}

fn default_scope() -> String {
    "all-modes".into()
}

impl SaturationSpec {
    pub fn build(&self) -> Result<SaturationModel> {
        let scope = Scope::parse(&self.scope)?;
        match (self.variant, self.damping, self.max_occupation) {
            (VariantKind::None, None, None) => Ok(SaturationModel::NONE),
            (VariantKind::Shifted, Some(d), None) => SaturationModel::shifted(d, scope),
            (VariantKind::Cutoff, None, Some(m)) => SaturationModel::cutoff(m, scope),
            _ => Err(validation(
                "saturation entry: 'none' takes no parameter, 'shifted' needs only damping, 'cutoff' needs only max_occupation",
            )),
        }
    }
}

/// Cartesian product of damping / cap lists with scopes, for the sweep subcommand.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub damping: Vec<f64>,
    #[serde(default)]
    pub max_occupation: Vec<f64>,
    #[serde(default = "default_scopes")]
    pub scopes: Vec<String>,
}

fn default_scopes() -> Vec<String> {
    vec![default_scope()]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    Linear,
    Log,
}

/// Either explicit values or start/stop/count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default = "default_spacing")]
    pub spacing: Spacing,
    /// Length unit of the entries: m, um or nm (ignored for wavevector grids, which are in 1/m).
    #[serde(default = "default_unit")]
    pub unit: String,
}

fn default_spacing() -> Spacing {
    Spacing::Linear
}

fn default_unit() -> String {
    "m".into()
}

/// Number of `unit`s per metre; values are divided by it so that 100 nm is exactly 1e-7 m.
pub(crate) fn per_metre(unit: &str) -> Result<f64> {
    match unit {
        "m" => Ok(1.0),
        "mm" => Ok(1e3),
        "um" => Ok(1e6),
        "nm" => Ok(1e9),
        other => Err(validation(format!("unknown length unit '{other}' (m, mm, um, nm)"))),
    }
}

impl GridSpec {
    /// Grid values divided by `per_unit` (units per SI unit).
    pub fn points(&self, per_unit: f64) -> Result<Vec<f64>> {
        let raw = match (&self.values, self.start, self.stop, self.count) {
            (Some(v), None, None, None) => v.clone(),
            (None, Some(a), Some(b), Some(n)) if n >= 1 => {
                if n == 1 {
                    vec![a]
                } else {
                    (0..n)
                        .map(|i| {
                            let t = i as f64 / (n - 1) as f64;
                            match self.spacing {
                                Spacing::Linear => a + t * (b - a),
                                Spacing::Log => (a.ln() + t * (b.ln() - a.ln())).exp(),
                            }
                        })
                        .collect()
                }
            }
            _ => return Err(validation("grid needs either 'values' or 'start', 'stop' and 'count' >= 1")),
        };
        let pts: Vec<f64> = raw.iter().map(|v| v / per_unit).collect();
        if pts.is_empty() {
            return Err(validation("grid is empty"));
        }
        if pts.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(validation("grid values must be finite and > 0"));
        }
        if pts.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(validation("grid must be strictly increasing"));
        }
        Ok(pts)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub csv: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalSpec {
    /// K; 0 selects the zero-temperature theory.
    pub temperature: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersionSpec {
    /// Plate separation, m.
    pub separation: f64,
    /// In-plane wavevectors, 1/m.
    pub k: GridSpec,
    #[serde(default = "default_polarizations")]
    pub polarizations: Vec<String>,
    #[serde(default = "default_ppd")]
    pub points_per_decade: usize,
}

fn default_polarizations() -> Vec<String> {
    vec!["tm".into(), "te".into()]
}

fn default_ppd() -> usize {
    1000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: Geometry,
    /// Result quantity; one row per (separation, saturation setting).
    pub quantity: QuantityKind,
    /// Evaluation route for plate-plate quantities; defaults to matsubara (T > 0) or zero-temperature.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub route: Option<EvaluationRoute>,
    pub materials: BTreeMap<String, MaterialSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plate1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plate2: Option<String>,
    /// Second medium of the reference pair for sphere-force-difference (result = pair - reference).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_plate2: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atom: Option<AtomModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trap: Option<TrapConfig>,
    /// Sphere radius for the proximity force approximation, m.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sphere_radius: Option<f64>,
    pub thermal: ThermalSpec,
    #[serde(default)]
    pub saturation: Vec<SaturationSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    pub separations: GridSpec,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    pub output: OutputSpec,
    /// Experimental dataset compared against the result after a run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dispersion: Option<DispersionSpec>,
}

/// A parsed config together with the directory its relative paths refer to.
#[derive(Clone, Debug)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub base_dir: PathBuf,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<LoadedConfig> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let config = Self::parse(&text)?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(LoadedConfig { config, base_dir })
    }

    /// Canonical TOML with every default filled in.
    pub fn canonical(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(format!("config serialization: {e}")))
    }

    /// SHA-256 of the canonical form, hex.
    pub fn hash(&self) -> Result<String> {
        let digest = Sha256::digest(self.canonical()?.as_bytes());
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }

    /// Flattened `config.<path> = value` pairs for the output header.
    pub fn metadata(&self) -> Result<BTreeMap<String, String>> {
        let value = toml::Value::try_from(self).map_err(|e| Error::Parse(e.to_string()))?;
        let mut out = BTreeMap::new();
        flatten("config", &value, &mut out);
        Ok(out)
    }

    pub fn material(&self, name: &Option<String>, role: &str, base_dir: &Path) -> Result<DielectricModel> {
        let name = name
            .as_ref()
            .ok_or_else(|| validation(format!("config needs '{role}' for this geometry")))?;
        self.materials
            .get(name)
            .ok_or_else(|| validation(format!("{role} refers to unknown material '{name}'")))?
            .build(base_dir)
            .map_err(|e| e.context(format!("material '{name}'")))
    }

    pub fn thermal_state(&self) -> Result<ThermalState> {
        ThermalState::new(self.thermal.temperature)
    }

    pub fn separations(&self) -> Result<Vec<f64>> {
        self.separations.points(per_metre(&self.separations.unit)?)
    }

    /// The saturation list; an empty list gives one unsaturated run.
    pub fn saturation_models(&self) -> Result<Vec<SaturationModel>> {
        if self.saturation.is_empty() {
            return Ok(vec![SaturationModel::NONE]);
        }
        self.saturation.iter().map(SaturationSpec::build).collect()
    }

    /// Unsaturated baseline followed by the cartesian product of the sweep lists.
    pub fn sweep_models(&self) -> Result<Vec<SaturationModel>> {
        let s = self
            .sweep
            .as_ref()
            .ok_or_else(|| validation("the sweep subcommand needs a [sweep] table"))?;
        if s.damping.is_empty() && s.max_occupation.is_empty() {
            return Err(validation("[sweep] needs a nonempty 'damping' or 'max_occupation' list"));
        }
        let mut out = vec![SaturationModel::NONE];
        for scope in &s.scopes {
            let scope = Scope::parse(scope)?;
            for &d in &s.damping {
                out.push(SaturationModel::shifted(d, scope)?);
            }
            for &m in &s.max_occupation {
                out.push(SaturationModel::cutoff(m, scope)?);
            }
        }
        Ok(out)
    }

    pub fn route(&self) -> Result<EvaluationRoute> {
        Ok(self.route.unwrap_or(if self.thermal_state()?.beta().is_some() {
            EvaluationRoute::Matsubara
        } else {
            EvaluationRoute::ZeroTemperature
        }))
    }

    /// Checks everything that can be checked without computing.
    pub fn validate(&self, base_dir: &Path) -> Result<()> {
        self.quadrature.validate()?;
        self.thermal_state()?;
        self.separations()?;
        self.saturation_models()?;
        if let Some(s) = &self.sweep {
            for sc in &s.scopes {
                Scope::parse(sc)?;
            }
        }
        use QuantityKind as Q;
        let plate = matches!(
            self.quantity,
            Q::Energy | Q::Pressure | Q::ThermalCorrection | Q::EnergyFactor | Q::PressureFactor | Q::SphereForce | Q::SphereForceDifference
        );
        match (self.geometry, plate) {
            (Geometry::PlatePlate, true) => {
                self.material(&self.plate1, "plate1", base_dir)?;
                self.material(&self.plate2, "plate2", base_dir)?;
                if matches!(self.quantity, Q::SphereForce | Q::SphereForceDifference) && self.sphere_radius.is_none() {
                    return Err(validation("sphere forces need 'sphere_radius'"));
                }
                if self.quantity == Q::SphereForceDifference {
                    self.material(&self.reference_plate2, "reference_plate2", base_dir)?;
                }
            }
            (Geometry::AtomWall, false) => {
                self.material(&self.wall, "wall", base_dir)?;
                if self.atom.is_none() {
                    return Err(validation("atom-wall runs need an [atom] table"));
                }
                if self.quantity == Q::GammaX && self.trap.is_none() {
                    return Err(validation("gamma-x needs a [trap] table"));
                }
            }
            (g, _) => {
                return Err(validation(format!(
                    "quantity '{}' does not belong to geometry {g:?}",
                    self.quantity.as_str()
                )))
            }
        }
        if let Some(ds) = &self.dataset {
            let p = base_dir.join(ds);
            if !p.is_file() {
                return Err(validation(format!("dataset '{}' does not exist", p.display())));
            }
        }
        Ok(())
    }
}

fn flatten(prefix: &str, v: &toml::Value, out: &mut BTreeMap<String, String>) {
    match v {
        toml::Value::Table(t) => {
            for (k, x) in t {
                flatten(&format!("{prefix}.{k}"), x, out);
            }
        }
        toml::Value::Array(a) if a.iter().any(|x| x.is_table()) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), x, out);
            }
        }
        toml::Value::Float(f) => {
            out.insert(prefix.to_string(), format!("{f:e}"));
        }
        toml::Value::String(s) => {
            out.insert(prefix.to_string(), s.clone());
        }
        other => {
            out.insert(prefix.to_string(), other.to_string());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const MINIMAL: &str = r#"
geometry = "plate-plate"
quantity = "energy-factor"
plate1 = "gold"
plate2 = "gold"
[materials.gold]
model = "drude"
plasma_frequency = 1.37e16
relaxation_rate = 5.32e13
[thermal]
temperature = 300.0
[separations]
values = [0.5, 1.0]
unit = "um"
[output]
csv = "out.csv"
"#;

    #[test]
    fn parses_minimal_and_fills_defaults() {
        let c = RunConfig::parse(MINIMAL).unwrap();
        c.validate(Path::new(".")).unwrap();
        assert_eq!(c.separations().unwrap(), vec![0.5e-6, 1.0e-6]);
        assert_eq!(c.saturation_models().unwrap(), vec![SaturationModel::NONE]);
        assert_eq!(c.route().unwrap(), EvaluationRoute::Matsubara);
        let m = c.metadata().unwrap();
        assert_eq!(m["config.materials.gold.plasma_frequency"], "1.37e16");
        assert!(m.contains_key("config.quadrature.rel_tol"));
    }

    #[test]
    fn hash_ignores_formatting() {
        let a = RunConfig::parse(MINIMAL).unwrap();
        let b = RunConfig::parse(&MINIMAL.replace("temperature = 300.0", "temperature    =   3e2 # K")).unwrap();
        assert_eq!(a.hash().unwrap(), b.hash().unwrap());
        let c = RunConfig::parse(&MINIMAL.replace("300.0", "301.0")).unwrap();
        assert_ne!(a.hash().unwrap(), c.hash().unwrap());
    }

    #[test]
    fn rejects_bad_grids_and_references() {
        let bad = MINIMAL.replace("[0.5, 1.0]", "[1.0, 0.5]");
        assert!(RunConfig::parse(&bad).unwrap().validate(Path::new(".")).is_err());
        let bad = MINIMAL.replace("[0.5, 1.0]", "[]");
        assert!(RunConfig::parse(&bad).unwrap().validate(Path::new(".")).is_err());
        let bad = MINIMAL.replace("plate2 = \"gold\"", "plate2 = \"silver\"");
        assert!(RunConfig::parse(&bad).unwrap().validate(Path::new(".")).is_err());
        let bad = format!("dataset = \"missing.txt\"\n{MINIMAL}");
        assert!(RunConfig::parse(&bad).unwrap().validate(Path::new(".")).is_err());
        assert!(RunConfig::parse(&MINIMAL.replace("geometry", "geometri")).is_err());
    }

    #[test]
    fn log_grid_and_sweep_product() {
        let g = GridSpec {
            values: None,
            start: Some(1.0),
            stop: Some(100.0),
            count: Some(3),
            spacing: Spacing::Log,
            unit: "m".into(),
        };
        let p = g.points(1.0).unwrap();
        assert!((p[1] - 10.0).abs() < 1e-12);
        let mut c = RunConfig::parse(MINIMAL).unwrap();
        assert!(c.sweep_models().is_err());
        c.sweep = Some(SweepSpec {
            damping: vec![0.01, 0.1],
            max_occupation: vec![],
            scopes: vec!["zero-term".into(), "all-modes".into()],
        });
        let m = c.sweep_models().unwrap();
        assert_eq!(m.len(), 5);
        assert!(m[0].is_none());
    }

    #[test]
    fn composite_materials() {
        let spec = MaterialSpec::Oscillators {
            oscillators: vec![OscillatorSpec {
                strength: 1.0,
                resonance: 1e16,
                damping: 0.0,
            }],
            carriers: None,
            conductivity: 100.0,
        };
        let m = spec.build(Path::new(".")).unwrap();
        assert!(matches!(m, DielectricModel::Composite(_)));
        let e = m.eps_imag(1.0).unwrap();
        assert!((e - (2.0 + 400.0 * std::f64::consts::PI)).abs() < 1e-9);
    }
}
