//! Interparticle purity `Tr(rho_1^2)` of bi-momentum wave functions.
//!
//! A wave function sampled on a tensor Gauss-Legendre grid becomes the
//! matrix `A[i][j] = sqrt(w1_i w2_j) phi(x_i, y_j)`. The four-fold purity
//! integral then collapses to `||A^H A||_F^2 / ||A||_F^4`, and the
//! eigenvalues of `A^H A` are the squared Schmidt coefficients.

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, Par, Side};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::amplitudes::AmplitudeModel;
use crate::error::{Error, Result};
use crate::quadrature::{Axis, GridSpec};
use crate::wavefunction::{BiMomentum, GaussianInState, InJacobi, Mode, ModeWavefunction};

/// Quadrature-weighted samples of a wave function.
#[derive(Clone, Debug)]
pub struct WeightedAmplitudeMatrix {
    pub nodes1: Vec<f64>,
    pub nodes2: Vec<f64>,
    pub weights1: Vec<f64>,
    pub weights2: Vec<f64>,
    matrix: Mat<Complex64>,
}

impl WeightedAmplitudeMatrix {
    pub fn matrix(&self) -> &Mat<Complex64> {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.matrix.nrows(), self.matrix.ncols())
    }

    /// `sum |A_ij|^2`, which approximates `||phi||^2`. Column-major
    /// summation order, independent of thread count.
    pub fn norm_sqr(&self) -> f64 {
        let mut total = 0.0;
        for j in 0..self.matrix.ncols() {
            total += self.matrix.col(j).iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
        total
    }

    /// `sum |A_ij|^2` over nodes where `mask(x_i, y_j)` holds.
    pub fn masked_norm_sqr(&self, mask: impl Fn(f64, f64) -> bool) -> f64 {
        let mut total = 0.0;
        for (j, &y) in self.nodes2.iter().enumerate() {
            for (i, &x) in self.nodes1.iter().enumerate() {
                if mask(x, y) {
                    total += self.matrix[(i, j)].norm_sqr();
                }
            }
        }
        total
    }

    /// `<self|other>` for two matrices sampled on the same grid.
    pub fn inner(&self, other: &WeightedAmplitudeMatrix) -> Complex64 {
        assert_eq!(self.shape(), other.shape(), "inner product needs a shared grid");
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..self.matrix.ncols() {
            for i in 0..self.matrix.nrows() {
                acc += self.matrix[(i, j)].conj() * other.matrix[(i, j)];
            }
        }
        acc
    }

    /// Gram matrix over the smaller of the two dimensions.
    fn gram(&self) -> Mat<Complex64> {
        let a = self.matrix.as_ref();
        let (m, n) = (a.nrows(), a.ncols());
        let one = Complex64::new(1.0, 0.0);
        if n <= m {
            let mut g = Mat::<Complex64>::zeros(n, n);
            matmul(g.as_mut(), Accum::Replace, a.adjoint(), a, one, Par::Seq);
            g
        } else {
            let mut g = Mat::<Complex64>::zeros(m, m);
            matmul(g.as_mut(), Accum::Replace, a, a.adjoint(), one, Par::Seq);
            g
        }
    }
}

/// Samples `wavefn` on `grid`. Columns are filled in parallel; each entry
/// is computed independently so the result does not depend on scheduling.
pub fn discretize<W: BiMomentum + ?Sized>(wavefn: &W, grid: &GridSpec) -> Result<WeightedAmplitudeMatrix> {
    let (nodes1, weights1) = grid.axis1.nodes(grid.n);
    let (nodes2, weights2) = grid.axis2.nodes(grid.n);
    let sw1: Vec<f64> = weights1.iter().map(|w| w.sqrt()).collect();
    let columns: Vec<Vec<Complex64>> = nodes2
        .par_iter()
        .zip(weights2.par_iter())
        .map(|(&y, &w2)| {
            let sw2 = w2.sqrt();
            nodes1
                .iter()
                .zip(&sw1)
                .map(|(&x, &sw)| wavefn.eval(x, y) * (sw * sw2))
                .collect()
        })
        .collect();
    for (j, col) in columns.iter().enumerate() {
        if let Some(i) = col.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFiniteSample { p1: nodes1[i], p2: nodes2[j] });
        }
    }
    let matrix = Mat::from_fn(nodes1.len(), nodes2.len(), |i, j| columns[j][i]);
    Ok(WeightedAmplitudeMatrix { nodes1, nodes2, weights1, weights2, matrix })
}

/// Purity through the trace of the squared Gram matrix; no eigensolver.
pub fn gram_purity(wam: &WeightedAmplitudeMatrix) -> Result<f64> {
    let norm = wam.norm_sqr();
    if norm == 0.0 {
        return Err(Error::ZeroWavefunction);
    }
    let g = wam.gram();
    let mut frob = 0.0;
    for j in 0..g.ncols() {
        frob += g.col(j).iter().map(|z| z.norm_sqr()).sum::<f64>();
    }
    Ok(frob / (norm * norm))
}

/// Purity and Schmidt spectrum (descending, summing to one) of the
/// normalized discretized wave function.
pub fn purity_from_matrix(wam: &WeightedAmplitudeMatrix) -> Result<(f64, Vec<f64>)> {
    if wam.norm_sqr() == 0.0 {
        return Err(Error::ZeroWavefunction);
    }
    let g = wam.gram();
    let eig = g
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Spectral(format!("{e:?}")))?;
    let mut weights: Vec<f64> = eig.into_iter().map(|l| l.max(0.0)).collect();
    weights.sort_by(|a, b| b.total_cmp(a));
    let total: f64 = weights.iter().sum();
    if total == 0.0 {
        return Err(Error::ZeroWavefunction);
    }
    weights.iter_mut().for_each(|w| *w /= total);
    let purity = weights.iter().map(|w| w * w).sum();
    Ok((purity, weights))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EngineSettings {
    /// Stop once successive purities differ by less than `rel_tol * purity`.
    pub rel_tol: f64,
    pub n_base: usize,
    pub n_cap: usize,
    /// Window half-width in standard deviations of each mode's density.
    pub window_sds: f64,
    /// Compute the Schmidt spectrum at the final level.
    pub spectrum: bool,
}

impl Default for EngineSettings {
    fn default() -> Self {
        Self { rel_tol: 1e-6, n_base: 64, n_cap: 1024, window_sds: 8.0, spectrum: true }
    }
}

impl EngineSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol >= 1e-10 && self.rel_tol < 1.0) {
            return Err(Error::invalid("rel_tol", format!("must lie in [1e-10, 1), got {}", self.rel_tol)));
        }
        if self.n_base < crate::quadrature::MIN_NODES || self.n_cap < self.n_base {
            return Err(Error::invalid(
                "n_base/n_cap",
                format!("need {} <= n_base <= n_cap, got {} and {}", crate::quadrature::MIN_NODES, self.n_base, self.n_cap),
            ));
        }
        if !(self.window_sds >= 6.0 && self.window_sds.is_finite()) {
            return Err(Error::invalid("window_sds", "windows must span at least 6 standard deviations"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PurityReport {
    pub purity: f64,
    /// Contribution of the transmitted mode (out-states only).
    pub purity_tra: Option<f64>,
    /// Contribution of the reflected mode (out-states only).
    pub purity_ref: Option<f64>,
    pub schmidt_spectrum: Vec<f64>,
    /// Nodes per panel at the final refinement level.
    pub grid_n: usize,
    pub refinement_error: f64,
    pub overlap_diagnostic: Option<f64>,
    pub converged: bool,
    /// Nodes per panel at every level visited.
    pub n_trace: Vec<usize>,
    /// Squared norm of the sampled wave function.
    pub norm: f64,
    /// Integrated weight sitting at `q <= 0`, where amplitudes are
    /// evaluated at `|q|`.
    pub out_of_convention_weight: f64,
}

struct Refined {
    purity: f64,
    norm: f64,
    change: f64,
    converged: bool,
    n_trace: Vec<usize>,
    last: WeightedAmplitudeMatrix,
    spectrum: Vec<f64>,
}

fn refine<W: BiMomentum + ?Sized>(wavefn: &W, base: &GridSpec, settings: &EngineSettings) -> Result<Refined> {
    settings.validate()?;
    let mut n = base.n;
    let mut previous: Option<f64> = None;
    let mut n_trace = Vec::new();
    loop {
        let grid = base.with_n(n)?;
        let wam = discretize(wavefn, &grid)?;
        let purity = gram_purity(&wam)?;
        n_trace.push(n);
        let change = previous.map_or(f64::INFINITY, |p: f64| (purity - p).abs());
        let converged = change <= settings.rel_tol * purity;
        if converged || 2 * n > settings.n_cap {
            let norm = wam.norm_sqr();
            let spectrum = if settings.spectrum { purity_from_matrix(&wam)?.1 } else { Vec::new() };
            return Ok(Refined { purity, norm, change, converged, n_trace, last: wam, spectrum });
        }
        previous = Some(purity);
        n *= 2;
    }
}

/// Doubles the node count from `base_grid.n` until successive purities
/// agree to `settings.rel_tol`, or the cap is hit (reported as
/// `converged: false`).
pub fn purity_adaptive<W: BiMomentum + ?Sized>(
    wavefn: &W,
    base_grid: &GridSpec,
    settings: &EngineSettings,
) -> Result<PurityReport> {
    let r = refine(wavefn, base_grid, settings)?;
    Ok(PurityReport {
        purity: r.purity,
        purity_tra: None,
        purity_ref: None,
        schmidt_spectrum: r.spectrum,
        grid_n: *r.n_trace.last().unwrap(),
        refinement_error: r.change,
        overlap_diagnostic: None,
        converged: r.converged,
        n_trace: r.n_trace,
        norm: r.norm,
        out_of_convention_weight: 0.0,
    })
}

/// Axis-aligned box spanning `sds` standard deviations of a Gaussian density
/// with the given moments.
pub fn moment_grid(moments: ([f64; 2], [[f64; 2]; 2]), sds: f64, n: usize) -> Result<GridSpec> {
    let (mean, cov) = moments;
    GridSpec::rect(mean[0], sds * cov[0][0].sqrt(), mean[1], sds * cov[1][1].sqrt(), n)
}

pub fn transmitted_grid(state: &GaussianInState, settings: &EngineSettings) -> Result<GridSpec> {
    moment_grid(state.in_moments(), settings.window_sds, settings.n_base)
}

pub fn reflected_grid(state: &GaussianInState, settings: &EngineSettings) -> Result<GridSpec> {
    moment_grid(state.reflected_moments(), settings.window_sds, settings.n_base)
}

/// Grid covering both the transmitted and reflected supports.
pub fn joint_grid(state: &GaussianInState, settings: &EngineSettings) -> Result<GridSpec> {
    Ok(transmitted_grid(state, settings)?.union(&reflected_grid(state, settings)?))
}

struct ModePurity {
    refined: Option<Refined>,
    oob: f64,
}

fn mode_purity(mw: &ModeWavefunction, grid: &GridSpec, settings: &EngineSettings) -> Result<ModePurity> {
    // Modes that vanish identically (t = 0 or r = 0) drop out.
    let probe = discretize(mw, grid)?;
    if probe.norm_sqr() == 0.0 {
        return Ok(ModePurity { refined: None, oob: 0.0 });
    }
    let refined = refine(mw, grid, settings)?;
    let masses = *mw.state().masses();
    // the reflected mode sees the incoming relative momentum -q
    let sign = if mw.mode() == Mode::Reflected { -1.0 } else { 1.0 };
    let oob = refined.last.masked_norm_sqr(|p1, p2| sign * (masses.mu2() * p1 - masses.mu1() * p2) <= 0.0);
    Ok(ModePurity { refined: Some(refined), oob })
}

/// Purity of the scattered state, computed mode by mode.
///
/// The transmitted mode lives near `(k, -k)` and the reflected one near
/// `(-k, k)`; with disjoint supports the reduced density matrix is block
/// diagonal, so the out-state purity is the sum of the two mode purities.
/// Each mode gets its own grid, the results are recombined with the mode
/// norms, and the overlap `|<tra|ref>|` is measured on the joint grid.
pub fn purity_out(state: &GaussianInState, model: &AmplitudeModel, settings: &EngineSettings) -> Result<PurityReport> {
    settings.validate()?;
    let tra = ModeWavefunction::new(Mode::Transmitted, *state, Some(model.clone()))?;
    let refl = ModeWavefunction::new(Mode::Reflected, *state, Some(model.clone()))?;
    let t = mode_purity(&tra, &transmitted_grid(state, settings)?, settings)?;
    let r = mode_purity(&refl, &reflected_grid(state, settings)?, settings)?;

    let norm_of = |m: &ModePurity| m.refined.as_ref().map_or(0.0, |x| x.norm);
    let (nt, nr) = (norm_of(&t), norm_of(&r));
    let total = nt + nr;
    if total == 0.0 {
        return Err(Error::ZeroWavefunction);
    }
    let contribution = |m: &ModePurity, n: f64| m.refined.as_ref().map_or(0.0, |x| (n / total).powi(2) * x.purity);
    let purity_tra = contribution(&t, nt);
    let purity_ref = contribution(&r, nr);

    let mut spectrum: Vec<f64> = Vec::new();
    for (m, n) in [(&t, nt), (&r, nr)] {
        if let Some(x) = &m.refined {
            spectrum.extend(x.spectrum.iter().map(|s| s * n / total));
        }
    }
    spectrum.sort_by(|a, b| b.total_cmp(a));

    let modes = [&t, &r];
    let grid_n = modes.iter().filter_map(|m| m.refined.as_ref()).map(|x| x.n_trace.last().copied().unwrap()).max().unwrap();
    let refinement_error = [(&t, nt), (&r, nr)]
        .iter()
        .filter_map(|(m, n)| m.refined.as_ref().map(|x| (n / total).powi(2) * x.change))
        .sum();
    let converged = modes.iter().all(|m| m.refined.as_ref().is_none_or(|x| x.converged));
    let mut n_trace: Vec<usize> = modes.iter().filter_map(|m| m.refined.as_ref()).flat_map(|x| x.n_trace.clone()).collect();
    n_trace.sort_unstable();
    n_trace.dedup();

    let overlap = mode_overlap(&tra, &refl, &joint_grid(state, settings)?.with_n(grid_n)?)?;

    Ok(PurityReport {
        purity: purity_tra + purity_ref,
        purity_tra: Some(purity_tra),
        purity_ref: Some(purity_ref),
        schmidt_spectrum: spectrum,
        grid_n,
        refinement_error,
        overlap_diagnostic: Some(overlap),
        converged,
        n_trace,
        norm: total,
        out_of_convention_weight: t.oob + r.oob,
    })
}

/// `|<tra|ref>|` on a grid covering both supports.
pub fn mode_overlap(tra: &ModeWavefunction, refl: &ModeWavefunction, grid: &GridSpec) -> Result<f64> {
    let a = discretize(tra, grid)?;
    let b = discretize(refl, grid)?;
    Ok(a.inner(&b).norm())
}

/// Purity of the full out-state sampled directly on the joint grid, without
/// the mode split. Used to check mode additivity.
pub fn purity_out_joint(state: &GaussianInState, model: &AmplitudeModel, settings: &EngineSettings) -> Result<PurityReport> {
    let out = ModeWavefunction::new(Mode::Out, *state, Some(model.clone()))?;
    purity_adaptive(&out, &joint_grid(state, settings)?, settings)
}

/// Purity with respect to the total/relative split `(p, q)`, on a grid whose
/// axes are `p` and `q`.
pub fn purity_pq<W: BiMomentum + ?Sized>(
    wavefn: &W,
    masses: crate::kinematics::MassPartition,
    grid: &GridSpec,
) -> Result<f64> {
    gram_purity(&discretize(&InJacobi::new(wavefn, masses), grid)?)
}

/// `(p, q)` grid for the in-state: one window around `(0, k)`.
pub fn pq_grid_in(state: &GaussianInState, settings: &EngineSettings) -> Result<GridSpec> {
    moment_grid(state.jacobi_moments(), settings.window_sds, settings.n_base)
}

/// `(p, q)` grid for an out-state: the in-state window plus its mirror at
/// `q -> -q`.
pub fn pq_grid_out(state: &GaussianInState, settings: &EngineSettings) -> Result<GridSpec> {
    let g = pq_grid_in(state, settings)?;
    let mirrored: Vec<Axis> = g
        .axis2
        .panels()
        .iter()
        .map(|p| Axis::window(-p.center, p.half_width))
        .collect::<Result<_>>()?;
    let axis2 = mirrored.iter().fold(g.axis2.clone(), |acc, a| acc.union(a));
    GridSpec::new(g.axis1, axis2, g.n)
}

/// `(p_pq(in), p_pq(out))`, each refined to `settings.rel_tol`.
pub fn purity_pq_in_out(
    state: &GaussianInState,
    model: &AmplitudeModel,
    settings: &EngineSettings,
) -> Result<(PurityReport, PurityReport)> {
    let masses = *state.masses();
    let settings = EngineSettings { spectrum: false, ..*settings };
    let pin = purity_adaptive(&InJacobi::new(state, masses), &pq_grid_in(state, &settings)?, &settings)?;
    let out = ModeWavefunction::new(Mode::Out, *state, Some(model.clone()))?;
    let pout = purity_adaptive(&InJacobi::new(&out, masses), &pq_grid_out(state, &settings)?, &settings)?;
    Ok((pin, pout))
}
