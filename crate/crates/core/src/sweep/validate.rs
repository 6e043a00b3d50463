//! Built-in invariant suite run by `scatter-entangle validate`.

use std::fmt::Write;

use serde::Serialize;

use crate::amplitudes::{find_resonances, AmplitudeModel};
use crate::analytic::reflected_gaussian_purity;
use crate::error::Result;
use crate::kinematics::{jacobi_to_pair, pair_to_jacobi, reflect_momenta, MassPartition, PairMomentum};
use crate::purity::{purity_out, purity_out_joint, purity_pq_in_out, EngineSettings};
use crate::wavefunction::GaussianInState;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// Measured deviation.
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, passed: value <= tolerance }
    }
}

/// Renders checks as a fixed-width table.
pub fn render_checks(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0).max(5);
    let mut out = String::new();
    writeln!(out, "{:<width$}  {:>12}  {:>9}  result", "check", "deviation", "tolerance").unwrap();
    for c in checks {
        let result = if c.passed { "PASS" } else { "FAIL" };
        writeln!(out, "{:<width$}  {:>12.3e}  {:>9.0e}  {result}", c.name, c.value, c.tolerance).unwrap();
    }
    out
}

fn potentials(mp: MassPartition, alpha: f64) -> Result<Vec<(&'static str, AmplitudeModel)>> {
    let b = mp.reduced() * alpha;
    Ok(vec![
        ("hard_core", AmplitudeModel::hard_core(mp)),
        ("delta", AmplitudeModel::delta(alpha, mp)?),
        ("double_delta", AmplitudeModel::double_delta(alpha, 10.0 / b, mp)?),
    ])
}

/// Runs the suite on canned parameters: `m2 = 4 m1`, `k = 1`,
/// `sigma1 = k/10`, `sigma2 = k/5`, delta strength chosen so that
/// `k = mu_red * alpha`.
pub fn cmd_validate(settings: &EngineSettings) -> Result<Vec<Check>> {
    settings.validate()?;
    let settings = EngineSettings { spectrum: false, ..*settings };
    let mp = MassPartition::from_fraction(0.2, 1.0)?;
    let alpha = 1.0 / mp.reduced();
    let k = 1.0;
    let mut checks = Vec::new();

    let models = potentials(mp, alpha)?;
    for (name, model) in &models {
        let worst = (0..10_000)
            .map(|i| 1e-3 * 1e5f64.powf(i as f64 / 9_999.0))
            .map(|q| model.evaluate(q).map(|a| a.unitarity_residual().abs()))
            .try_fold(0.0f64, |m, r| r.map(|r| m.max(r)))?;
        checks.push(Check::new(format!("unitarity/{name}"), worst, 1e-12));
    }

    let mut inv: f64 = 0.0;
    let mut round: f64 = 0.0;
    for mu1 in [0.1, 0.2, 0.5, 0.7] {
        let m = MassPartition::from_fraction(mu1, 1.0)?;
        for i in 0..250 {
            let t = i as f64;
            let pm = PairMomentum::new(3.0 * (0.37 * t).sin(), 2.0 * (1.13 * t + 0.5).cos());
            let scale = pm.p1.abs().max(pm.p2.abs()).max(1.0);
            let back = reflect_momenta(reflect_momenta(pm, &m), &m);
            inv = inv.max((back.p1 - pm.p1).abs().max((back.p2 - pm.p2).abs()) / scale);
            let rt = jacobi_to_pair(pair_to_jacobi(pm, &m), &m);
            round = round.max((rt.p1 - pm.p1).abs().max((rt.p2 - pm.p2).abs()) / scale);
        }
    }
    checks.push(Check::new("reflection involution", inv, 1e-14));
    checks.push(Check::new("jacobi round trip", round, 1e-14));

    let hard = AmplitudeModel::hard_core(mp);
    let sym = GaussianInState::new(k, 0.1 * k, 0.1 * k, mp)?;
    let exact = reflected_gaussian_purity(&mp, sym.sigma1(), sym.sigma2())?;
    let rep = purity_out(&sym, &hard, &settings)?;
    checks.push(Check::new("hard core vs closed form", (rep.purity - exact).abs(), 1e-4));

    let eq = MassPartition::equal();
    let eq_state = GaussianInState::new(k, 0.1 * k, 0.25 * k, eq)?;
    let rep = purity_out(&eq_state, &AmplitudeModel::hard_core(eq), &settings)?;
    checks.push(Check::new("equal-mass hard core", (rep.purity - 1.0).abs(), 1e-6));

    let state = GaussianInState::new(k, 0.1 * k, 0.2 * k, mp)?;
    for (name, model) in &models {
        let (pin, pout) = purity_pq_in_out(&state, model, &settings)?;
        checks.push(Check::new(format!("p_pq invariance/{name}"), (pin.purity - pout.purity).abs(), 1e-4));
    }

    let delta = &models[1].1;
    let split = purity_out(&state, delta, &settings)?;
    let joint = purity_out_joint(&state, delta, &settings)?;
    checks.push(Check::new("mode overlap", split.overlap_diagnostic.unwrap_or(f64::INFINITY), 1e-8));
    checks.push(Check::new("mode additivity", (split.purity - joint.purity).abs(), 1e-5));

    let dd = &models[2].1;
    let b = mp.reduced() * alpha;
    let res = find_resonances(dd, 1e-3 * b, 2.0 * b, 1)?;
    let dev = match res.first() {
        Some(&q) => (dd.evaluate(q)?.transmission() - 1.0).abs(),
        None => f64::INFINITY,
    };
    checks.push(Check::new("first resonance transmits fully", dev, 1e-10));

    Ok(checks)
}
