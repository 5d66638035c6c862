//! Grid evaluation: (separation, saturation) cells on a worker pool, reduced
//! and written in grid order on the calling thread.

use super::config::{Geometry, LoadedConfig, RunConfig};
use super::dataset::{compare, ExperimentDataset};
use crate::atomwall;
use crate::constants;
use crate::dielectric::DielectricModel;
use crate::error::{validation, Error, Result};
use crate::lifshitz::{
    self, correction_factor, pfa_sphere, CorrectionKind, Evaluation, EvaluationRoute, QuantityKind, ResultRow, ResultTable,
};
use crate::modecond::{dispersion_csv, dispersion_solve, DispersionOptions, HalfSpacePair, Polarization};
use crate::saturation::SaturationModel;
use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Files written by a run.
#[derive(Clone, Debug, Default)]
pub struct RunOutputs {
    pub csv: PathBuf,
    pub json: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub comparison: Option<PathBuf>,
    pub table: ResultTable,
}

struct Media {
    plate1: Option<DielectricModel>,
    plate2: Option<DielectricModel>,
    reference: Option<DielectricModel>,
    wall: Option<DielectricModel>,
}

fn row_from(d: f64, quantity: QuantityKind, setting: &str, e: &Evaluation, scale: f64) -> ResultRow {
    let mut r = ResultRow::new(d, quantity, setting, scale * e.total);
    r.tm = Some(scale * e.tm);
    r.te = Some(scale * e.te);
    r.parts = e.parts.map(|p| p.scaled(scale));
    r
}

fn plate_cell(c: &RunConfig, m: &Media, d: f64, sat: &SaturationModel) -> Result<ResultRow> {
    let thermal = c.thermal_state()?;
    let route = c.route()?;
    let quad = &c.quadrature;
    let (Some(m1), Some(m2)) = (&m.plate1, &m.plate2) else {
        return Err(validation("plate-plate runs need plate1 and plate2"));
    };
    let pair = HalfSpacePair::new(m1.clone(), m2.clone(), d)?;
    let label = sat.label();
    let q = c.quantity;
    let energy = |pair: &HalfSpacePair| lifshitz::energy(pair, &thermal, sat, route, quad);
    let mut row = match q {
        QuantityKind::Energy => row_from(d, q, &label, &energy(&pair)?, 1.0),
        QuantityKind::EnergyFactor => {
            let s = correction_factor(CorrectionKind::Energy, 1.0, d)?;
            row_from(d, q, &label, &energy(&pair)?, s)
        }
        QuantityKind::Pressure => row_from(d, q, &label, &lifshitz::pressure(&pair, &thermal, sat, route, quad)?, 1.0),
        QuantityKind::PressureFactor => {
            let s = correction_factor(CorrectionKind::Pressure, 1.0, d)?;
            row_from(d, q, &label, &lifshitz::pressure(&pair, &thermal, sat, route, quad)?, s)
        }
        QuantityKind::ThermalCorrection => row_from(
            d,
            q,
            &label,
            &lifshitz::thermal_correction_by_mode(&pair, &thermal, sat, quad)?,
            1.0,
        ),
        QuantityKind::SphereForce => {
            let r = c.sphere_radius.ok_or_else(|| validation("sphere_radius missing"))?;
            row_from(d, q, &label, &energy(&pair)?, pfa_sphere(1.0, r)?)
        }
        QuantityKind::SphereForceDifference => {
            let r = c.sphere_radius.ok_or_else(|| validation("sphere_radius missing"))?;
            let reference = m
                .reference
                .as_ref()
                .ok_or_else(|| validation("reference_plate2 missing"))?;
            let a = energy(&pair)?;
            let b = energy(&HalfSpacePair::new(m1.clone(), reference.clone(), d)?)?;
            let s = pfa_sphere(1.0, r)?;
            let mut row = ResultRow::new(d, q, &label, s * (a.total - b.total));
            row.tm = Some(s * (a.tm - b.tm));
            row.te = Some(s * (a.te - b.te));
            row
        }
        other => return Err(validation(format!("'{}' is not a plate-plate quantity", other.as_str()))),
    };
    // hybrid parts cover only the thermal term, so they would not sum to the value
    if route == EvaluationRoute::Hybrid && q != QuantityKind::ThermalCorrection {
        row.parts = None;
    }
    Ok(row)
}

fn atom_cell(c: &RunConfig, m: &Media, d: f64, sat: &SaturationModel) -> Result<ResultRow> {
    let thermal = c.thermal_state()?;
    let quad = &c.quadrature;
    let wall = m.wall.as_ref().ok_or_else(|| validation("atom-wall runs need a wall"))?;
    let atom = c.atom.as_ref().ok_or_else(|| validation("atom-wall runs need [atom]"))?;
    let label = sat.label();
    let q = c.quantity;
    Ok(match q {
        QuantityKind::AtomPotential => {
            let [te, tm] = atomwall::potential_parts(d, wall, atom, &thermal, sat, quad)?;
            let mut r = ResultRow::new(d, q, &label, te + tm);
            r.te = Some(te);
            r.tm = Some(tm);
            r
        }
        QuantityKind::AtomForce => ResultRow::new(d, q, &label, atomwall::force(d, wall, atom, &thermal, sat, quad)?),
        QuantityKind::GammaX => {
            let trap = c.trap.as_ref().ok_or_else(|| validation("gamma-x needs [trap]"))?;
            ResultRow::new(d, q, &label, atomwall::gamma_x(d, wall, atom, trap, &thermal, sat, quad)?)
        }
        other => return Err(validation(format!("'{}' is not an atom-wall quantity", other.as_str()))),
    })
}

fn media(lc: &LoadedConfig) -> Result<Media> {
    let c = &lc.config;
    let b = &lc.base_dir;
    Ok(match c.geometry {
        Geometry::PlatePlate => Media {
            plate1: Some(c.material(&c.plate1, "plate1", b)?),
            plate2: Some(c.material(&c.plate2, "plate2", b)?),
            reference: match c.quantity {
                QuantityKind::SphereForceDifference => Some(c.material(&c.reference_plate2, "reference_plate2", b)?),
                _ => None,
            },
            wall: None,
        },
        Geometry::AtomWall => Media {
            plate1: None,
            plate2: None,
            reference: None,
            wall: Some(c.material(&c.wall, "wall", b)?),
        },
    })
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| validation(format!("worker pool: {e}")))
}

/// Evaluates every (separation, setting) cell. Row order is separation-major,
/// then settings in config order, independent of the worker count.
pub fn evaluate(lc: &LoadedConfig, settings: &[SaturationModel], workers: usize) -> Result<ResultTable> {
    let c = &lc.config;
    c.validate(&lc.base_dir)?;
    let media = media(lc)?;
    let grid = c.separations()?;
    let cells: Vec<(f64, &SaturationModel)> = grid.iter().flat_map(|&d| settings.iter().map(move |s| (d, s))).collect();
    let rows: Vec<Result<ResultRow>> = pool(workers)?.install(|| {
        cells
            .par_iter()
            .map(|&(d, sat)| {
                let r = match c.geometry {
                    Geometry::PlatePlate => plate_cell(c, &media, d, sat),
                    Geometry::AtomWall => atom_cell(c, &media, d, sat),
                };
                r.map_err(|e| e.context(format!("d = {d:e} m, setting {}", sat.label())))
            })
            .collect()
    });
    let mut table = ResultTable::new();
    table.metadata = c.metadata()?;
    table.set_meta("config_hash", c.hash()?);
    table.set_meta("crate_version", env!("CARGO_PKG_VERSION"));
    table.set_meta("route", c.route()?.as_str());
    table.set_meta("quantity_unit", c.quantity.unit());
    for (k, v) in constants::table() {
        table.set_meta(format!("constant.{k}"), format!("{v:e}"));
    }
    for (i, s) in settings.iter().enumerate() {
        table.set_meta(format!("setting.{i}"), s.label());
    }
    for r in rows {
        table.push(r?)?;
    }
    Ok(table)
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.display().to_string(),
            source,
        })?;
    }
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn finish(lc: &LoadedConfig, table: ResultTable, elapsed: std::time::Duration) -> Result<RunOutputs> {
    let c = &lc.config;
    let csv = lc.base_dir.join(&c.output.csv);
    write(&csv, &table.to_csv())?;
    let json = c.output.json.as_ref().map(|p| lc.base_dir.join(p));
    if let Some(p) = &json {
        write(p, &table.to_json()?)?;
    }
    let mut comparison = None;
    let mut summary = String::new();
    if let Some(ds) = &c.dataset {
        let dataset = ExperimentDataset::from_file(&lc.base_dir.join(ds))?;
        let reports = compare(&table, &dataset)?;
        let text: String = reports.iter().map(|r| r.to_text()).collect::<Vec<_>>().join("\n");
        let p = csv.with_extension("compare.csv");
        write(&p, &text)?;
        for r in &reports {
            let _ = writeln!(
                summary,
                "compare {}: chi2 = {:.4e} over {} points, {} within error, max rel. deviation {:.3}{}",
                r.setting,
                r.chi_squared,
                r.residuals.len(),
                r.within_error,
                r.max_relative_deviation,
                if r.flagged() { " (flagged)" } else { "" }
            );
        }
        comparison = Some(p);
    }
    let report = c.output.report.as_ref().map(|p| lc.base_dir.join(p));
    if let Some(p) = &report {
        let mut s = String::new();
        let _ = writeln!(s, "config_hash = {}", table.metadata["config_hash"]);
        let _ = writeln!(s, "rows = {}", table.rows.len());
        let _ = writeln!(s, "closure_defect = {:e}", table.closure_defect());
        let _ = writeln!(s, "elapsed_s = {:.3}", elapsed.as_secs_f64());
        let _ = writeln!(s, "csv = {}", csv.display());
        s.push_str(&summary);
        write(p, &s)?;
    }
    eprint!("{summary}");
    Ok(RunOutputs {
        csv,
        json,
        report,
        comparison,
        table,
    })
}

/// The `run` subcommand: one row per (separation, configured saturation setting).
pub fn run(lc: &LoadedConfig, workers: usize) -> Result<RunOutputs> {
    let t = std::time::Instant::now();
    let table = evaluate(lc, &lc.config.saturation_models()?, workers)?;
    finish(lc, table, t.elapsed())
}

/// The `sweep` subcommand: unsaturated baseline plus the [sweep] product.
pub fn sweep(lc: &LoadedConfig, workers: usize) -> Result<RunOutputs> {
    let t = std::time::Instant::now();
    let table = evaluate(lc, &lc.config.sweep_models()?, workers)?;
    finish(lc, table, t.elapsed())
}

/// The `dispersion` subcommand: real mode frequencies on the [dispersion] k grid.
pub fn dispersion(lc: &LoadedConfig, workers: usize) -> Result<PathBuf> {
    let c = &lc.config;
    let spec = c
        .dispersion
        .as_ref()
        .ok_or_else(|| validation("the dispersion subcommand needs a [dispersion] table"))?;
    let m1 = c.material(&c.plate1, "plate1", &lc.base_dir)?;
    let m2 = c.material(&c.plate2, "plate2", &lc.base_dir)?;
    let pair = HalfSpacePair::new(m1, m2, spec.separation)?;
    let ks = spec.k.points(1.0)?;
    let pols = spec
        .polarizations
        .iter()
        .map(|p| match p.as_str() {
            "tm" => Ok(Polarization::TM),
            "te" => Ok(Polarization::TE),
            o => Err(validation(format!("unknown polarization '{o}' (tm, te)"))),
        })
        .collect::<Result<Vec<_>>>()?;
    let opts = DispersionOptions {
        points_per_decade: spec.points_per_decade,
        ..DispersionOptions::default()
    };
    let cells: Vec<(Polarization, f64)> = pols.iter().flat_map(|&p| ks.iter().map(move |&k| (p, k))).collect();
    let roots: Vec<Result<Vec<_>>> = pool(workers)?.install(|| {
        cells
            .par_iter()
            .map(|&(p, k)| dispersion_solve(&pair, p, k, &opts).map_err(|e| e.context(format!("k = {k:e} 1/m"))))
            .collect()
    });
    let mut all = Vec::new();
    for r in roots {
        all.extend(r?);
    }
    let mut text = String::new();
    for (k, v) in c.metadata()? {
        let _ = writeln!(text, "# {k} = {v}");
    }
    let _ = writeln!(text, "# config_hash = {}", c.hash()?);
    text.push_str(&dispersion_csv(&all));
    let out = lc.base_dir.join(&c.output.csv);
    write(&out, &text)?;
    Ok(out)
}
