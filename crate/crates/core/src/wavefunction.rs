//! Bi-momentum wave functions of the incoming Gaussian product state and of
//! the scattered modes.
//!
//! All states are taken in the centre-of-mass frame: particle 1 arrives
//! with momentum `+k`, particle 2 with `-k`.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;

use crate::amplitudes::AmplitudeModel;
use crate::error::{Error, Result};
use crate::kinematics::{jacobi_to_pair, pair_to_jacobi, reflect_momenta, reflection_matrix};
use crate::kinematics::{JacobiMomentum, MassPartition, PairMomentum};

/// Anything that can be sampled as `phi(x, y)` on a momentum grid.
pub trait BiMomentum: Sync {
    fn eval(&self, x: f64, y: f64) -> Complex64;
}

impl<F> BiMomentum for F
where
    F: Fn(f64, f64) -> Complex64 + Sync,
{
    fn eval(&self, x: f64, y: f64) -> Complex64 {
        self(x, y)
    }
}

/// Spread-to-momentum ratio above which [`GaussianInState::incoming_warning`]
/// fires.
pub const INCOMING_WARN_RATIO: f64 = 1.0 / 3.0;

/// Product of two Gaussian momentum packets centred at `+k` and `-k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianInState {
    k: f64,
    sigma1: f64,
    sigma2: f64,
    a1: f64,
    a2: f64,
    masses: MassPartition,
    norm: f64,
}

impl GaussianInState {
    /// In-state with both packets centred at the origin in position space.
    ///
    /// Errors when `max(sigma_i) / k >= 1`: such a state has a sizeable
    /// component moving away from the collision.
    pub fn new(k: f64, sigma1: f64, sigma2: f64, masses: MassPartition) -> Result<Self> {
        Self::with_positions(k, sigma1, sigma2, 0.0, 0.0, masses)
    }

    pub fn with_positions(
        k: f64,
        sigma1: f64,
        sigma2: f64,
        a1: f64,
        a2: f64,
        masses: MassPartition,
    ) -> Result<Self> {
        for (name, v) in [("k", k), ("sigma1", sigma1), ("sigma2", sigma2)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be positive and finite, got {v}")));
            }
        }
        if !(a1.is_finite() && a2.is_finite()) {
            return Err(Error::invalid("a1/a2", "positions must be finite"));
        }
        let ratio = sigma1.max(sigma2) / k;
        if ratio >= 1.0 {
            return Err(Error::invalid(
                "sigma",
                format!("max(sigma1, sigma2)/k = {ratio} >= 1: state is not incoming"),
            ));
        }
        let norm = (2.0 * PI * sigma1 * sigma1).powf(-0.25) * (2.0 * PI * sigma2 * sigma2).powf(-0.25);
        Ok(Self { k, sigma1, sigma2, a1, a2, masses, norm })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn sigma1(&self) -> f64 {
        self.sigma1
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn positions(&self) -> (f64, f64) {
        (self.a1, self.a2)
    }

    pub fn masses(&self) -> &MassPartition {
        &self.masses
    }

    /// `N1 * N2`, the modulus at the peak.
    pub fn peak(&self) -> f64 {
        self.norm
    }

    pub fn incoming_warning(&self) -> Option<String> {
        let ratio = self.sigma1.max(self.sigma2) / self.k;
        (ratio > INCOMING_WARN_RATIO).then(|| {
            format!("max(sigma1, sigma2)/k = {ratio:.3} exceeds {INCOMING_WARN_RATIO:.3}; the in-state is only marginally incoming")
        })
    }

    pub fn eval_in(&self, pm: PairMomentum) -> Complex64 {
        self.eval_in_xy(pm.p1, pm.p2)
    }

    fn eval_in_xy(&self, p1: f64, p2: f64) -> Complex64 {
        let d1 = p1 - self.k;
        let d2 = p2 + self.k;
        let exponent = -d1 * d1 / (4.0 * self.sigma1 * self.sigma1) - d2 * d2 / (4.0 * self.sigma2 * self.sigma2);
        let modulus = self.norm * exponent.exp();
        if self.a1 == 0.0 && self.a2 == 0.0 {
            Complex64::new(modulus, 0.0)
        } else {
            Complex64::from_polar(modulus, p1 * self.a1 + p2 * self.a2)
        }
    }

    /// In-state with the relative momentum reversed, `phi_in(reflect(p))`.
    pub fn eval_reflected_in(&self, pm: PairMomentum) -> Complex64 {
        self.eval_in(reflect_momenta(pm, &self.masses))
    }

    /// Mean and covariance of `|phi_in|^2` in `(p1, p2)`.
    pub fn in_moments(&self) -> ([f64; 2], [[f64; 2]; 2]) {
        let (s1, s2) = (self.sigma1 * self.sigma1, self.sigma2 * self.sigma2);
        ([self.k, -self.k], [[s1, 0.0], [0.0, s2]])
    }

    /// Mean and covariance of `|phi_in(reflect(p))|^2`. The reflection is
    /// its own inverse, so the covariance is `R diag(s1^2, s2^2) R^T`.
    pub fn reflected_moments(&self) -> ([f64; 2], [[f64; 2]; 2]) {
        let r = reflection_matrix(&self.masses);
        let (s1, s2) = (self.sigma1 * self.sigma1, self.sigma2 * self.sigma2);
        let c = |i: usize, j: usize| r[i][0] * r[j][0] * s1 + r[i][1] * r[j][1] * s2;
        let mean = reflect_momenta(PairMomentum::new(self.k, -self.k), &self.masses);
        ([mean.p1, mean.p2], [[c(0, 0), c(0, 1)], [c(1, 0), c(1, 1)]])
    }

    /// Mean and covariance of `|phi_in|^2` in Jacobi coordinates `(p, q)`.
    pub fn jacobi_moments(&self) -> ([f64; 2], [[f64; 2]; 2]) {
        let (mu1, mu2) = (self.masses.mu1(), self.masses.mu2());
        let (s1, s2) = (self.sigma1 * self.sigma1, self.sigma2 * self.sigma2);
        let j = [[1.0, 1.0], [mu2, -mu1]];
        let c = |i: usize, k: usize| j[i][0] * j[k][0] * s1 + j[i][1] * j[k][1] * s2;
        ([0.0, self.k], [[c(0, 0), c(0, 1)], [c(1, 0), c(1, 1)]])
    }
}

impl BiMomentum for GaussianInState {
    fn eval(&self, p1: f64, p2: f64) -> Complex64 {
        self.eval_in_xy(p1, p2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    In,
    ReflectedIn,
    Transmitted,
    Reflected,
    Out,
}

impl Mode {
    fn needs_amplitudes(self) -> bool {
        matches!(self, Mode::Transmitted | Mode::Reflected | Mode::Out)
    }
}

/// One component of the scattering problem, evaluable in `(p1, p2)`.
///
/// Amplitudes are only defined for `q > 0`. Points with `q <= 0` (far in
/// the tail of any incoming state) are evaluated at `|q|` and tallied in
/// [`out_of_convention_count`](Self::out_of_convention_count).
#[derive(Debug)]
pub struct ModeWavefunction {
    mode: Mode,
    state: GaussianInState,
    model: Option<AmplitudeModel>,
    q_floor: f64,
    out_of_convention: AtomicU64,
}

impl Clone for ModeWavefunction {
    fn clone(&self) -> Self {
        Self {
            mode: self.mode,
            state: self.state,
            model: self.model.clone(),
            q_floor: self.q_floor,
            out_of_convention: AtomicU64::new(0),
        }
    }
}

impl ModeWavefunction {
    pub fn new(mode: Mode, state: GaussianInState, model: Option<AmplitudeModel>) -> Result<Self> {
        if mode.needs_amplitudes() && model.is_none() {
            return Err(Error::invalid("model", format!("{mode:?} mode needs an amplitude model")));
        }
        Ok(Self {
            mode,
            state,
            model,
            q_floor: 1e-12 * state.k(),
            out_of_convention: AtomicU64::new(0),
        })
    }

    pub fn in_state(state: GaussianInState) -> Self {
        Self::new(Mode::In, state, None).expect("in-state needs no model")
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn state(&self) -> &GaussianInState {
        &self.state
    }

    pub fn model(&self) -> Option<&AmplitudeModel> {
        self.model.as_ref()
    }

    pub fn with_mode(&self, mode: Mode) -> Result<Self> {
        Self::new(mode, self.state, self.model.clone())
    }

    /// Number of evaluations so far that landed at `q <= 0`.
    pub fn out_of_convention_count(&self) -> u64 {
        self.out_of_convention.load(Ordering::Relaxed)
    }

    pub fn eval_mode(&self, pm: PairMomentum) -> Complex64 {
        self.eval(pm.p1, pm.p2)
    }

    /// Evaluates at the pair momenta of `jm`; the map has unit Jacobian so
    /// no measure factor is needed.
    pub fn eval_jacobi(&self, jm: JacobiMomentum) -> Complex64 {
        self.eval_mode(jacobi_to_pair(jm, self.state.masses()))
    }

    fn amplitudes_at(&self, pm: PairMomentum) -> crate::amplitudes::AmplitudePair {
        let model = self.model.as_ref().expect("checked in constructor");
        let q = pair_to_jacobi(pm, self.state.masses()).q;
        if q <= 0.0 {
            self.out_of_convention.fetch_add(1, Ordering::Relaxed);
        }
        model.evaluate_unchecked(q.abs().max(self.q_floor))
    }
}

impl BiMomentum for ModeWavefunction {
    fn eval(&self, p1: f64, p2: f64) -> Complex64 {
        let pm = PairMomentum::new(p1, p2);
        match self.mode {
            Mode::In => self.state.eval_in(pm),
            Mode::ReflectedIn => self.state.eval_reflected_in(pm),
            Mode::Transmitted => self.amplitudes_at(pm).t * self.state.eval_in(pm),
            Mode::Reflected => self.amplitudes_at(pm).r * self.state.eval_reflected_in(pm),
            Mode::Out => {
                let amp = self.amplitudes_at(pm);
                amp.t * self.state.eval_in(pm) + amp.r * self.state.eval_reflected_in(pm)
            }
        }
    }
}

/// View of a pair-momentum wave function in Jacobi coordinates: `eval(p, q)`.
pub struct InJacobi<'a, W: ?Sized> {
    inner: &'a W,
    masses: MassPartition,
}

impl<'a, W: BiMomentum + ?Sized> InJacobi<'a, W> {
    pub fn new(inner: &'a W, masses: MassPartition) -> Self {
        Self { inner, masses }
    }
}

impl<W: BiMomentum + ?Sized> BiMomentum for InJacobi<'_, W> {
    fn eval(&self, p: f64, q: f64) -> Complex64 {
        let pm = jacobi_to_pair(JacobiMomentum::new(p, q), &self.masses);
        self.inner.eval(pm.p1, pm.p2)
    }
}
