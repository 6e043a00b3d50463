//! Implementations behind the `scatter-entangle` subcommands.

use rayon::prelude::*;
use serde::Serialize;

use super::config::{Config, LoadedConfig, MomentumUnit, Point};
use super::output::{Cell, CsvTable, VERSION};
use crate::amplitudes::AmplitudeModel;
use crate::analytic::{approx_c, approx_cr, reflected_gaussian_purity, reflected_gaussian_purity_ratio, UNITARITY_TOL};
use crate::error::{Error, Result};
use crate::purity::{purity_out, EngineSettings, PurityReport};

fn unit_comment(cfg: &Config, scale: f64) -> Result<String> {
    let name = match cfg.unit()? {
        MomentumUnit::Absolute => "absolute (hbar = 1)",
        MomentumUnit::TotalMass => "total_mass (M * alpha)",
        MomentumUnit::ReducedMass => "reduced_mass (mu_red * alpha)",
    };
    Ok(format!("momentum_unit: {name}, one unit = {} natural units", super::output::fmt_f64(scale)))
}

/// Tabulates `t(q)`, `r(q)` over `q_range`.
pub fn cmd_amplitudes(loaded: &LoadedConfig) -> Result<String> {
    let cfg = &loaded.config;
    let masses = cfg.masses()?;
    let model = cfg.model(masses)?;
    let scale = cfg.momentum_scale(&masses)?;
    let qs = cfg.q_values(&masses)?;
    let mut table = CsvTable::new(
        "amplitudes",
        &loaded.hash,
        vec![
            ("q", "relative momentum in momentum_unit"),
            ("re_t", "Re t(q)"),
            ("im_t", "Im t(q)"),
            ("re_r", "Re r(q)"),
            ("im_r", "Im r(q)"),
            ("abs_t2", "|t(q)|^2"),
            ("abs_r2", "|r(q)|^2"),
            ("unitarity_residual", "|t|^2 + |r|^2 - 1"),
        ],
    );
    table.comment(unit_comment(cfg, scale)?);
    for q in qs {
        let p = model.evaluate(q)?;
        table.push(vec![
            Cell::Float(q / scale),
            Cell::Float(p.t.re),
            Cell::Float(p.t.im),
            Cell::Float(p.r.re),
            Cell::Float(p.r.im),
            Cell::Float(p.transmission()),
            Cell::Float(p.reflection()),
            Cell::Float(p.unitarity_residual()),
        ]);
    }
    Ok(table.render())
}

/// Constant-amplitude approximations at one parameter point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Approximations {
    pub transmission: f64,
    pub reflection: f64,
    pub reflected_purity: f64,
    pub approx_c: f64,
    pub approx_cr: f64,
}

pub fn approximations(point: &Point, model: &AmplitudeModel) -> Result<Approximations> {
    // central relative momentum of the in-state is q = k
    let amp = model.evaluate(point.k)?;
    let (tt, rr) = (amp.transmission(), amp.reflection());
    if (tt + rr - 1.0).abs() > UNITARITY_TOL {
        return Err(Error::NonUnitary(tt + rr - 1.0));
    }
    let rp = reflected_gaussian_purity(&point.masses, point.sigma1, point.sigma2)?;
    Ok(Approximations {
        transmission: tt,
        reflection: rr,
        reflected_purity: rp,
        approx_c: approx_c(tt, rr)?,
        approx_cr: approx_cr(amp.t, amp.r, rp)?,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Parameters {
    pub k: f64,
    pub k_natural: f64,
    pub mu1: f64,
    pub m1: f64,
    pub m2: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub momentum_scale: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PurityOutput {
    pub tool: String,
    pub version: String,
    pub config_sha256: String,
    pub parameters: Parameters,
    #[serde(flatten)]
    pub approximations: Approximations,
    pub report: PurityReport,
    pub warnings: Vec<String>,
}

/// Full purity report at the configured single point.
pub fn cmd_purity(loaded: &LoadedConfig, settings: &EngineSettings) -> Result<PurityOutput> {
    let cfg = &loaded.config;
    let point = cfg.single_point()?;
    let model = cfg.model(point.masses)?;
    let scale = cfg.momentum_scale(&point.masses)?;
    let state = point.state()?;
    let approximations = approximations(&point, &model)?;
    let report = purity_out(&state, &model, settings)?;
    let mut warnings: Vec<String> = state.incoming_warning().into_iter().collect();
    if !report.converged {
        warnings.push(format!("purity did not converge to rel_tol {} by N = {}", settings.rel_tol, report.grid_n));
    }
    Ok(PurityOutput {
        tool: "scatter-entangle".into(),
        version: VERSION.into(),
        config_sha256: loaded.hash.clone(),
        parameters: Parameters {
            k: point.k / scale,
            k_natural: point.k,
            mu1: point.masses.mu1(),
            m1: point.masses.m1(),
            m2: point.masses.m2(),
            sigma1: point.sigma1 / scale,
            sigma2: point.sigma2 / scale,
            momentum_scale: scale,
        },
        approximations,
        report,
        warnings,
    })
}

/// One row of a sweep. Momenta are in the configured momentum unit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub k: f64,
    pub mu1: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub transmission: f64,
    pub reflection: f64,
    pub purity_c: f64,
    pub purity_cr: f64,
    pub purity_exact: f64,
    pub purity_tra: f64,
    pub purity_ref: f64,
    pub overlap: f64,
    pub grid_n: usize,
    pub est_error: f64,
    pub converged: bool,
    pub error: Option<String>,
}

pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub csv: String,
}

impl SweepOutput {
    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged && r.error.is_none())
    }
}

fn sweep_row(cfg: &Config, point: &Point, settings: &EngineSettings) -> Result<SweepRow> {
    let scale = cfg.momentum_scale(&point.masses)?;
    let model = cfg.model(point.masses)?;
    // unitarity violations abort the run
    let approx = approximations(point, &model)?;
    let mut row = SweepRow {
        k: point.k / scale,
        mu1: point.masses.mu1(),
        sigma1: point.sigma1 / scale,
        sigma2: point.sigma2 / scale,
        transmission: approx.transmission,
        reflection: approx.reflection,
        purity_c: approx.approx_c,
        purity_cr: approx.approx_cr,
        purity_exact: f64::NAN,
        purity_tra: f64::NAN,
        purity_ref: f64::NAN,
        overlap: f64::NAN,
        grid_n: 0,
        est_error: f64::NAN,
        converged: false,
        error: None,
    };
    match point.state().and_then(|s| purity_out(&s, &model, settings)) {
        Ok(rep) => {
            row.purity_exact = rep.purity;
            row.purity_tra = rep.purity_tra.unwrap_or(f64::NAN);
            row.purity_ref = rep.purity_ref.unwrap_or(f64::NAN);
            row.overlap = rep.overlap_diagnostic.unwrap_or(f64::NAN);
            row.grid_n = rep.grid_n;
            row.est_error = rep.refinement_error;
            row.converged = rep.converged;
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    Ok(row)
}

/// Exact purity and both approximations at every point of the sweep axis.
///
/// Points run in parallel on the current rayon pool; rows come back in axis
/// order and each point's arithmetic is independent of the others, so the
/// output bytes do not depend on the worker count.
pub fn cmd_sweep(loaded: &LoadedConfig, settings: &EngineSettings) -> Result<SweepOutput> {
    let cfg = &loaded.config;
    let points = cfg.sweep_points()?;
    let settings = EngineSettings { spectrum: false, ..*settings };
    let rows = points
        .par_iter()
        .map(|p| sweep_row(cfg, p, &settings))
        .collect::<Result<Vec<_>>>()?;

    let mut table = CsvTable::new(
        "sweep",
        &loaded.hash,
        vec![
            ("k", "central momentum in momentum_unit"),
            ("mu1", "mass fraction m1/(m1+m2)"),
            ("sigma1", "momentum spread of particle 1 in momentum_unit"),
            ("sigma2", "momentum spread of particle 2 in momentum_unit"),
            ("T", "|t(k)|^2"),
            ("R", "|r(k)|^2"),
            ("purity_C", "approximation T^2 + R^2"),
            ("purity_CR", "approximation |t(k)|^4 + |r(k)|^4 p(reflected Gaussian)"),
            ("purity_exact", "quadrature purity of the out-state"),
            ("purity_tra", "transmitted-mode contribution"),
            ("purity_ref", "reflected-mode contribution"),
            ("overlap", "|<tra|ref>| on the joint grid"),
            ("grid_N", "nodes per panel at the final level"),
            ("est_error", "last change under node doubling"),
            ("converged", "1 if refinement met rel_tol"),
            ("errors", "per-point failure message, empty on success"),
        ],
    );
    table.comment(unit_comment(cfg, cfg.momentum_scale(&cfg.masses().unwrap_or(points[0].masses))?)?);
    table.comment(format!(
        "engine: rel_tol = {}, n_base = {}, n_cap = {}, window = +-{} sd",
        settings.rel_tol, settings.n_base, settings.n_cap, settings.window_sds
    ));
    for r in &rows {
        table.push(vec![
            Cell::Float(r.k),
            Cell::Float(r.mu1),
            Cell::Float(r.sigma1),
            Cell::Float(r.sigma2),
            Cell::Float(r.transmission),
            Cell::Float(r.reflection),
            Cell::Float(r.purity_c),
            Cell::Float(r.purity_cr),
            Cell::Float(r.purity_exact),
            Cell::Float(r.purity_tra),
            Cell::Float(r.purity_ref),
            Cell::Float(r.overlap),
            Cell::Int(r.grid_n as u64),
            Cell::Float(r.est_error),
            Cell::Int(r.converged as u64),
            Cell::Text(r.error.clone().unwrap_or_default()),
        ]);
    }
    Ok(SweepOutput { csv: table.render(), rows })
}

/// Closed-form reflected-Gaussian purity over a `(mu1, c)` grid.
pub fn cmd_reflectmap(loaded: &LoadedConfig) -> Result<String> {
    let grid = loaded.config.reflectmap_grid()?;
    let mut table = CsvTable::new(
        "reflectmap",
        &loaded.hash,
        vec![
            ("mu1", "mass fraction m1/(m1+m2)"),
            ("c", "width ratio sigma2/sigma1"),
            ("purity", "purity of the reflected Gaussian in-state"),
        ],
    );
    for (mu1, c) in grid {
        table.push(vec![Cell::Float(mu1), Cell::Float(c), Cell::Float(reflected_gaussian_purity_ratio(mu1, c)?)]);
    }
    Ok(table.render())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(s: &str) -> LoadedConfig {
        LoadedConfig::parse(s).unwrap()
    }

    #[test]
    fn amplitudes_table() {
        let l = load(
            r#"{"potential": {"kind": "delta", "alpha": 1.0}, "masses": {"mu1": 0.5},
                "k_unit": "reduced_mass", "q_range": {"values": [0.5, 1.0, 2.0]}}"#,
        );
        let csv = cmd_amplitudes(&l).unwrap();
        let row = csv.lines().find(|l| l.starts_with("1.0000000000000000e0,")).unwrap();
        let cells: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        assert!((cells[5] - 0.5).abs() < 1e-15 && (cells[6] - 0.5).abs() < 1e-15);

        let l = load(r#"{"potential": {"kind": "hard_core"}, "masses": {"mu1": 0.2}, "q_range": {"min": 0.1, "max": 2.0, "points": 4}}"#);
        let csv = cmd_amplitudes(&l).unwrap();
        for row in csv.lines().filter(|l| !l.starts_with('#')).skip(1) {
            let cells: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
            assert_eq!(&cells[1..5], &[0.0, 0.0, -1.0, 0.0]);
        }
    }

    #[test]
    fn reflectmap_rows() {
        let l = load(r#"{"sweep": {"axis": "mu1_c", "mu1": {"values": [0.2, 0.5]}, "c": {"values": [1.0, 2.0, 3.7]}}}"#);
        let csv = cmd_reflectmap(&l).unwrap();
        let rows: Vec<Vec<f64>> = csv
            .lines()
            .filter(|l| !l.starts_with('#'))
            .skip(1)
            .map(|r| r.split(',').map(|c| c.parse().unwrap()).collect())
            .collect();
        assert_eq!(rows.len(), 6);
        assert!((rows[0][2] - 0.8115343414514942).abs() < 1e-12);
        assert!((rows[1][2] - 1.0).abs() < 1e-15);
        assert_eq!(rows[5][2], 1.0);
    }

    #[test]
    fn purity_without_potential_is_one() {
        let l = load(
            r#"{"potential": {"kind": "none"}, "masses": {"mu1": 0.2}, "k": 1.0,
                "sigmas": {"sigma1_over_k": 0.1, "sigma2_over_k": 0.2}}"#,
        );
        let out = cmd_purity(&l, &EngineSettings::default()).unwrap();
        assert!((out.report.purity - 1.0).abs() < 1e-6);
        assert_eq!(out.approximations.approx_c, 1.0);
        assert!(out.warnings.is_empty());
    }
}
