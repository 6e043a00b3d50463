//! Transmission and reflection amplitudes `t(q)`, `r(q)` of the relative
//! motion.
//!
//! Phase convention: a single delta of strength `alpha` at the origin has
//! `r = i / (x - i)` and `t = 1 + r` with `x = q / (mu_red alpha)`. Multi-delta
//! potentials are built by composing point-scatterer transfer matrices in
//! that same convention, which keeps every model unitary by construction.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kinematics::MassPartition;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmplitudePair {
    pub t: Complex64,
    pub r: Complex64,
}

impl AmplitudePair {
    pub fn transmission(&self) -> f64 {
        self.t.norm_sqr()
    }

    pub fn reflection(&self) -> f64 {
        self.r.norm_sqr()
    }

    /// `|t|^2 + |r|^2 - 1`
    pub fn unitarity_residual(&self) -> f64 {
        self.t.norm_sqr() + self.r.norm_sqr() - 1.0
    }
}

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveMomentum(q))
    }
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be positive and finite, got {v}")))
    }
}

pub fn hardcore_amplitudes(q: f64) -> Result<AmplitudePair> {
    check_q(q)?;
    Ok(AmplitudePair { t: ZERO, r: -ONE })
}

pub fn delta_amplitudes(q: f64, alpha: f64, mp: &MassPartition) -> Result<AmplitudePair> {
    check_q(q)?;
    check_positive("alpha", alpha)?;
    Ok(delta_unchecked(q, alpha * mp.reduced()))
}

fn delta_unchecked(q: f64, strength: f64) -> AmplitudePair {
    let x = q / strength;
    let r = I / (x - I);
    AmplitudePair { t: ONE + r, r }
}

/// 2x2 transfer matrix mapping plane-wave coefficients on the left of a
/// scatterer to those on its right, at one relative momentum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransferMatrix {
    m: [[Complex64; 2]; 2],
    q: f64,
}

impl TransferMatrix {
    pub fn identity(q: f64) -> Self {
        Self { m: [[ONE, ZERO], [ZERO, ONE]], q }
    }

    /// Delta scatterer of strength `alpha` centred at `position`.
    pub fn point_scatterer(q: f64, alpha: f64, position: f64, mp: &MassPartition) -> Result<Self> {
        check_q(q)?;
        if !alpha.is_finite() || !position.is_finite() {
            return Err(Error::invalid("scatterer", "strength and position must be finite"));
        }
        Ok(Self::point_unchecked(q, alpha.abs() * mp.reduced(), position))
    }

    fn point_unchecked(q: f64, strength: f64, position: f64) -> Self {
        let beta = strength / q;
        let phase = Complex64::from_polar(1.0, 2.0 * q * position);
        Self {
            m: [
                [ONE + I * beta, I * beta * phase],
                [-I * beta * phase.conj(), ONE - I * beta],
            ],
            q,
        }
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn entries(&self) -> [[Complex64; 2]; 2] {
        self.m
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// `self` followed by `right` in space (i.e. the product `right * self`).
    pub fn then(&self, right: &TransferMatrix) -> Result<Self> {
        if self.q != right.q {
            return Err(Error::MomentumMismatch(self.q, right.q));
        }
        Ok(self.then_unchecked(right))
    }

    fn then_unchecked(&self, right: &TransferMatrix) -> Self {
        let (a, b) = (&right.m, &self.m);
        let mut m = [[ZERO; 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self { m, q: self.q }
    }

    /// Amplitudes for a wave incident from the left.
    pub fn amplitudes(&self) -> AmplitudePair {
        let m22 = self.m[1][1];
        AmplitudePair {
            t: self.det() / m22,
            r: -self.m[1][0] / m22,
        }
    }
}

/// Product of transfer matrices listed from left to right in space.
pub fn compose(tms: &[TransferMatrix]) -> Result<TransferMatrix> {
    let (first, rest) = tms
        .split_first()
        .ok_or_else(|| Error::invalid("transfer matrices", "empty list"))?;
    rest.iter().try_fold(*first, |acc, tm| acc.then(tm))
}

pub fn double_delta_amplitudes(
    q: f64,
    alpha: f64,
    half_separation: f64,
    mp: &MassPartition,
) -> Result<AmplitudePair> {
    check_q(q)?;
    check_positive("alpha", alpha)?;
    check_positive("a", half_separation)?;
    Ok(double_delta_unchecked(q, alpha * mp.reduced(), half_separation))
}

fn double_delta_unchecked(q: f64, strength: f64, a: f64) -> AmplitudePair {
    let left = TransferMatrix::point_unchecked(q, strength, -a);
    let right = TransferMatrix::point_unchecked(q, strength, a);
    left.then_unchecked(&right).amplitudes()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PotentialKind {
    /// No interaction: `t = 1`, `r = 0`.
    Free,
    HardCore,
    DiracDelta,
    DoubleDiracDelta,
    Composite,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scatterer {
    pub position: f64,
    pub alpha: f64,
}

#[derive(Clone, Debug, PartialEq)]
enum Potential {
    Free,
    HardCore,
    Delta { alpha: f64 },
    DoubleDelta { alpha: f64, half_separation: f64 },
    Composite(Vec<Scatterer>),
}

/// A potential together with the masses that set its momentum scale.
///
/// Strengths are stored as `|alpha|`: the sign only affects a bound state,
/// which plays no part in elastic scattering.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeModel {
    potential: Potential,
    masses: MassPartition,
}

impl AmplitudeModel {
    pub fn free(masses: MassPartition) -> Self {
        Self { potential: Potential::Free, masses }
    }

    pub fn hard_core(masses: MassPartition) -> Self {
        Self { potential: Potential::HardCore, masses }
    }

    pub fn delta(alpha: f64, masses: MassPartition) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::invalid("alpha", "must be finite"));
        }
        Ok(Self { potential: Potential::Delta { alpha: alpha.abs() }, masses })
    }

    pub fn double_delta(alpha: f64, half_separation: f64, masses: MassPartition) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::invalid("alpha", "must be finite"));
        }
        check_positive("a", half_separation)?;
        Ok(Self {
            potential: Potential::DoubleDelta { alpha: alpha.abs(), half_separation },
            masses,
        })
    }

    pub fn composite(scatterers: Vec<Scatterer>, masses: MassPartition) -> Result<Self> {
        if scatterers.is_empty() {
            return Err(Error::invalid("scatterers", "need at least one"));
        }
        let mut scatterers = scatterers;
        for s in &mut scatterers {
            if !s.alpha.is_finite() || !s.position.is_finite() {
                return Err(Error::invalid("scatterers", "strength and position must be finite"));
            }
            s.alpha = s.alpha.abs();
        }
        scatterers.sort_by(|a, b| a.position.total_cmp(&b.position));
        Ok(Self { potential: Potential::Composite(scatterers), masses })
    }

    pub fn kind(&self) -> PotentialKind {
        match self.potential {
            Potential::Free => PotentialKind::Free,
            Potential::HardCore => PotentialKind::HardCore,
            Potential::Delta { .. } => PotentialKind::DiracDelta,
            Potential::DoubleDelta { .. } => PotentialKind::DoubleDiracDelta,
            Potential::Composite(_) => PotentialKind::Composite,
        }
    }

    pub fn masses(&self) -> &MassPartition {
        &self.masses
    }

    /// Strength `alpha` (zero for the free and hard-core models, `None` for
    /// composites).
    pub fn alpha(&self) -> Option<f64> {
        match self.potential {
            Potential::Free | Potential::HardCore => Some(0.0),
            Potential::Delta { alpha } | Potential::DoubleDelta { alpha, .. } => Some(alpha),
            Potential::Composite(_) => None,
        }
    }

    pub fn half_separation(&self) -> Option<f64> {
        match self.potential {
            Potential::DoubleDelta { half_separation, .. } => Some(half_separation),
            _ => None,
        }
    }

    /// Momentum scale `mu_red * alpha` of the delta models.
    pub fn strength_scale(&self) -> Option<f64> {
        self.alpha().map(|a| a * self.masses.reduced())
    }

    pub fn evaluate(&self, q: f64) -> Result<AmplitudePair> {
        check_q(q)?;
        Ok(self.evaluate_unchecked(q))
    }

    /// Same as [`evaluate`](Self::evaluate) without the domain check; the
    /// caller guarantees `q > 0`.
    pub(crate) fn evaluate_unchecked(&self, q: f64) -> AmplitudePair {
        let mu_red = self.masses.reduced();
        match &self.potential {
            Potential::Free => AmplitudePair { t: ONE, r: ZERO },
            Potential::HardCore => AmplitudePair { t: ZERO, r: -ONE },
            Potential::Delta { alpha } if *alpha == 0.0 => AmplitudePair { t: ONE, r: ZERO },
            Potential::Delta { alpha } => delta_unchecked(q, alpha * mu_red),
            Potential::DoubleDelta { alpha, half_separation } => {
                double_delta_unchecked(q, alpha * mu_red, *half_separation)
            }
            Potential::Composite(list) => list
                .iter()
                .map(|s| TransferMatrix::point_unchecked(q, s.alpha * mu_red, s.position))
                .fold(TransferMatrix::identity(q), |acc, tm| acc.then_unchecked(&tm))
                .amplitudes(),
        }
    }
}

/// Relative momenta of perfect transmission of a double delta inside
/// `[q_lo, q_hi]`, in increasing order, at most `count` of them.
///
/// Resonances are the roots of `tan(2 a q) = -q / b` with `b = mu_red alpha`.
/// Each branch of the tangent between consecutive poles holds exactly one
/// root. The root is bracketed there and bisected on the pole-free form
/// `q cos(2aq) + b sin(2aq)`, then polished by a secant step. A root is only
/// reported if direct evaluation of the model confirms `|t|^2 = 1` to 1e-10.
pub fn find_resonances(model: &AmplitudeModel, q_lo: f64, q_hi: f64, count: usize) -> Result<Vec<f64>> {
    let (alpha, a) = match model.potential {
        Potential::DoubleDelta { alpha, half_separation } => (alpha, half_separation),
        _ => return Err(Error::WrongPotential("resonance search")),
    };
    if !(q_lo > 0.0 && q_hi > q_lo && q_hi.is_finite()) {
        return Err(Error::invalid("q_range", format!("need 0 < lo < hi, got [{q_lo}, {q_hi}]")));
    }
    let b = alpha * model.masses.reduced();
    if b == 0.0 {
        // every momentum transmits perfectly; no isolated resonances
        return Ok(Vec::new());
    }
    let g = |q: f64| q * (2.0 * a * q).cos() + b * (2.0 * a * q).sin();

    let mut found = Vec::new();
    let first_branch = ((2.0 * a * q_lo / PI) - 0.5).floor().max(1.0) as u64;
    let mut n = first_branch;
    while found.len() < count {
        let lo = (n as f64 - 0.5) * PI / (2.0 * a);
        let hi = (n as f64 + 0.5) * PI / (2.0 * a);
        if lo >= q_hi {
            break;
        }
        n += 1;
        let (lo, hi) = (lo.max(q_lo), hi.min(q_hi));
        if lo >= hi {
            continue;
        }
        let Some(root) = bracketed_root(&g, lo, hi) else { continue };
        let pair = model.evaluate_unchecked(root);
        if (pair.transmission() - 1.0).abs() <= 1e-10 {
            found.push(root);
        }
    }
    Ok(found)
}

fn bracketed_root(g: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Option<f64> {
    let (mut glo, ghi) = (g(lo), g(hi));
    if glo == 0.0 {
        return Some(lo);
    }
    if ghi == 0.0 {
        return Some(hi);
    }
    if glo.signum() == ghi.signum() {
        return None;
    }
    let mut ghi = ghi;
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm == 0.0 {
            return Some(mid);
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
            ghi = gm;
        }
    }
    let secant = lo - glo * (hi - lo) / (ghi - glo);
    Some(if secant > lo && secant < hi { secant } else { 0.5 * (lo + hi) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn mp(mu1: f64) -> MassPartition {
        MassPartition::from_fraction(mu1, 1.0).unwrap()
    }

    #[test]
    fn hard_core_is_total_reflection() {
        for q in [0.1, 5.0] {
            let p = hardcore_amplitudes(q).unwrap();
            assert_eq!(p.t, ZERO);
            assert_eq!(p.r, -ONE);
            assert_eq!(p.unitarity_residual(), 0.0);
        }
        assert!(hardcore_amplitudes(0.0).is_err());
        assert!(hardcore_amplitudes(-1.0).is_err());
    }

    #[test]
    fn delta_half_transmission_at_unit_x() {
        let m = mp(0.2);
        let alpha = 3.0;
        let q = alpha * m.reduced();
        let p = delta_amplitudes(q, alpha, &m).unwrap();
        assert_abs_diff_eq!(p.transmission(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.reflection(), 0.5, epsilon = 1e-15);
        // |r|^2 = 1 / (1 + x^2)
        for x in [0.01, 0.3, 2.0, 40.0] {
            let p = delta_amplitudes(x * alpha * m.reduced(), alpha, &m).unwrap();
            assert_abs_diff_eq!(p.reflection(), 1.0 / (1.0 + x * x), epsilon = 1e-14);
            assert_eq!(p.t, ONE + p.r);
        }
    }

    #[test]
    fn delta_limits() {
        let m = mp(0.5);
        let hi = delta_amplitudes(1e9, 1.0, &m).unwrap();
        assert!((hi.t - ONE).norm() < 1e-8 && hi.r.norm() < 1e-8);
        let lo = delta_amplitudes(1e-9, 1.0, &m).unwrap();
        assert!(lo.t.norm() < 1e-8 && (lo.r + ONE).norm() < 1e-8);
        assert!(delta_amplitudes(1.0, 0.0, &m).is_err());
        assert!(delta_amplitudes(1.0, -1.0, &m).is_err());
        assert!(delta_amplitudes(0.0, 1.0, &m).is_err());
    }

    #[test]
    fn single_scatterer_matches_delta() {
        let m = mp(0.3);
        for (q, alpha) in [(0.1, 1.0), (2.5, 0.3), (0.7, 9.0)] {
            let tm = TransferMatrix::point_scatterer(q, alpha, 0.0, &m).unwrap();
            let a = tm.amplitudes();
            let b = delta_amplitudes(q, alpha, &m).unwrap();
            assert!((a.t - b.t).norm() < 1e-14);
            assert!((a.r - b.r).norm() < 1e-14);
        }
        let free = TransferMatrix::point_scatterer(1.0, 0.0, 3.0, &m).unwrap();
        assert_eq!(free, TransferMatrix::identity(1.0));
    }

    #[test]
    fn compose_rules() {
        let m = mp(0.2);
        let x = TransferMatrix::point_scatterer(0.4, 2.0, 1.3, &m).unwrap();
        assert_eq!(compose(&[TransferMatrix::identity(0.4), x]).unwrap(), x);

        let half = TransferMatrix::point_scatterer(0.4, 1.0, 1.3, &m).unwrap();
        let joined = compose(&[half, half]).unwrap().amplitudes();
        let whole = x.amplitudes();
        assert!((joined.t - whole.t).norm() < 1e-12);
        assert!((joined.r - whole.r).norm() < 1e-12);

        let other = TransferMatrix::point_scatterer(0.5, 1.0, 0.0, &m).unwrap();
        assert!(matches!(compose(&[x, other]), Err(Error::MomentumMismatch(..))));
        assert!(compose(&[]).is_err());
    }

    #[test]
    fn double_delta_matches_closed_form_modulus() {
        // |t| from (q^2/b^2) / ((e^{4iaq} - 1) + 2iq/b + q^2/b^2), b = mu_red alpha
        let m = mp(0.2);
        let alpha = 1.7;
        let b = alpha * m.reduced();
        let a = 10.0 / b;
        for i in 1..=400 {
            let q = b * i as f64 * 0.005;
            let u = q / b;
            let den = Complex64::from_polar(1.0, 4.0 * a * q) - ONE + I * (2.0 * u) + u * u;
            let closed = (u * u) / den;
            let ours = double_delta_amplitudes(q, alpha, a, &m).unwrap();
            assert!((ours.t.norm() - closed.norm()).abs() < 1e-10, "q = {q}");
            assert!(ours.unitarity_residual().abs() < 1e-12);
        }
    }

    #[test]
    fn double_delta_coalesces_to_single() {
        let m = mp(0.4);
        for q in [0.05, 0.3, 1.0, 4.0] {
            let dd = double_delta_amplitudes(q, 0.8, 1e-12, &m).unwrap();
            let single = delta_amplitudes(q, 1.6, &m).unwrap();
            assert!((dd.t - single.t).norm() < 1e-10);
            assert!((dd.r - single.r).norm() < 1e-10);
        }
    }

    #[test]
    fn double_delta_high_energy() {
        let m = mp(0.5);
        let p = double_delta_amplitudes(1e7, 1.0, 2.0, &m).unwrap();
        assert!((p.t.norm() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn resonance_search_requires_double_delta() {
        let m = mp(0.5);
        let model = AmplitudeModel::delta(1.0, m).unwrap();
        assert!(matches!(find_resonances(&model, 0.1, 1.0, 3), Err(Error::WrongPotential(_))));
    }

    #[test]
    fn first_resonance() {
        let m = mp(0.2);
        let alpha = 1.0;
        let b = alpha * m.reduced();
        let model = AmplitudeModel::double_delta(alpha, 10.0 / b, m).unwrap();
        let roots = find_resonances(&model, 1e-3 * b, 2.0 * b, 4).unwrap();
        assert_eq!(roots.len(), 4);
        // root of tan(20u) = -u just below 20u = pi
        assert!((roots[0] / b - 0.1496521461353511).abs() < 1e-10);
        for w in roots.windows(2) {
            assert!(w[0] < w[1]);
        }
        for &q in &roots {
            let p = model.evaluate(q).unwrap();
            assert!((p.transmission() - 1.0).abs() < 1e-10);
            assert!(p.reflection() < 1e-10);
        }
        // transmission dips between neighbouring resonances
        for w in roots.windows(2) {
            let min = (1..200)
                .map(|i| w[0] + (w[1] - w[0]) * i as f64 / 200.0)
                .map(|q| model.evaluate(q).unwrap().transmission())
                .fold(f64::INFINITY, f64::min);
            assert!(min < 0.5);
        }
        assert!(find_resonances(&model, 1e-3 * b, 0.1 * b, 5).unwrap().is_empty());
    }

    #[test]
    fn models_depend_on_reduced_mass_only() {
        let a = MassPartition::from_fraction(0.2, 1.0).unwrap();
        let b = MassPartition::from_fraction(0.5, 0.64).unwrap();
        assert_abs_diff_eq!(a.reduced(), b.reduced(), epsilon = 1e-15);
        let ma = AmplitudeModel::double_delta(1.0, 3.0, a).unwrap();
        let mb = AmplitudeModel::double_delta(1.0, 3.0, b).unwrap();
        for q in [0.01, 0.2, 1.1] {
            let (x, y) = (ma.evaluate(q).unwrap(), mb.evaluate(q).unwrap());
            assert!((x.t - y.t).norm() < 1e-12 && (x.r - y.r).norm() < 1e-12, "{q}: {x:?} {y:?}");
        }
    }

    #[test]
    fn negative_strength_is_normalized() {
        let m = mp(0.3);
        let neg = AmplitudeModel::delta(-2.0, m).unwrap();
        let pos = AmplitudeModel::delta(2.0, m).unwrap();
        assert_eq!(neg, pos);
    }

    #[test]
    fn composite_of_two_equals_double_delta() {
        let m = mp(0.3);
        let comp = AmplitudeModel::composite(
            vec![Scatterer { position: 2.0, alpha: 0.7 }, Scatterer { position: -2.0, alpha: 0.7 }],
            m,
        )
        .unwrap();
        let dd = AmplitudeModel::double_delta(0.7, 2.0, m).unwrap();
        for q in [0.03, 0.4, 2.2] {
            let (x, y) = (comp.evaluate(q).unwrap(), dd.evaluate(q).unwrap());
            assert!((x.t - y.t).norm() < 1e-13 && (x.r - y.r).norm() < 1e-13);
        }
    }
}
