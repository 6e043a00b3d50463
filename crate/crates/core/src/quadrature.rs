//! Gauss-Legendre rules on finite momentum windows.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Smallest node count per panel accepted by [`GridSpec`].
pub const MIN_NODES: usize = 32;

/// Shared `(nodes, weights)` pair.
pub type Rule = Arc<(Vec<f64>, Vec<f64>)>;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// nodes in increasing order.
pub fn gauss_legendre(n: usize) -> Rule {
    static CACHE: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(rule) = cache.lock().unwrap().get(&n) {
        return rule.clone();
    }
    let rule = Arc::new(compute_rule(n));
    cache.lock().unwrap().insert(n, rule.clone());
    rule
}

fn compute_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    // roots are symmetric; Newton on the upper half
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// `P_n(x)` and `P_n'(x)` from the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Closed interval `[center - half_width, center + half_width]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Panel {
    pub center: f64,
    pub half_width: f64,
}

impl Panel {
    pub fn lo(&self) -> f64 {
        self.center - self.half_width
    }

    pub fn hi(&self) -> f64 {
        self.center + self.half_width
    }

    fn from_bounds(lo: f64, hi: f64) -> Self {
        Self { center: 0.5 * (lo + hi), half_width: 0.5 * (hi - lo) }
    }
}

/// One grid axis: disjoint panels in increasing order, each carrying its own
/// Gauss-Legendre rule.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    panels: Vec<Panel>,
}

impl Axis {
    pub fn window(center: f64, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite() && center.is_finite()) {
            return Err(Error::invalid("window", format!("{center} +- {half_width} is not a finite interval")));
        }
        Ok(Self { panels: vec![Panel { center, half_width }] })
    }

    /// Union of both axes; overlapping panels are merged into one.
    pub fn union(&self, other: &Axis) -> Axis {
        let mut all: Vec<Panel> = self.panels.iter().chain(&other.panels).copied().collect();
        all.sort_by(|a, b| a.lo().total_cmp(&b.lo()));
        let mut merged: Vec<Panel> = Vec::with_capacity(all.len());
        for p in all {
            match merged.last_mut() {
                Some(last) if p.lo() <= last.hi() => {
                    let hi = last.hi().max(p.hi());
                    *last = Panel::from_bounds(last.lo(), hi);
                }
                _ => merged.push(p),
            }
        }
        Axis { panels: merged }
    }

    pub fn panels(&self) -> &[Panel] {
        &self.panels
    }

    pub fn nodes(&self, n_per_panel: usize) -> (Vec<f64>, Vec<f64>) {
        let rule = gauss_legendre(n_per_panel);
        let (x, w) = (&rule.0, &rule.1);
        let mut nodes = Vec::with_capacity(n_per_panel * self.panels.len());
        let mut weights = Vec::with_capacity(nodes.capacity());
        for p in &self.panels {
            nodes.extend(x.iter().map(|xi| p.center + p.half_width * xi));
            weights.extend(w.iter().map(|wi| p.half_width * wi));
        }
        (nodes, weights)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadratureRule {
    GaussLegendre,
}

/// Tensor-product grid: `n` nodes on every panel of both axes.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub axis1: Axis,
    pub axis2: Axis,
    pub n: usize,
    pub rule: QuadratureRule,
}

impl GridSpec {
    pub fn new(axis1: Axis, axis2: Axis, n: usize) -> Result<Self> {
        if n < MIN_NODES {
            return Err(Error::invalid("n", format!("need at least {MIN_NODES} nodes per panel, got {n}")));
        }
        Ok(Self { axis1, axis2, n, rule: QuadratureRule::GaussLegendre })
    }

    /// Rectangle `[c1 +- w1] x [c2 +- w2]`.
    pub fn rect(c1: f64, w1: f64, c2: f64, w2: f64, n: usize) -> Result<Self> {
        Self::new(Axis::window(c1, w1)?, Axis::window(c2, w2)?, n)
    }

    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(self.axis1.clone(), self.axis2.clone(), n)
    }

    pub fn union(&self, other: &GridSpec) -> GridSpec {
        GridSpec {
            axis1: self.axis1.union(&other.axis1),
            axis2: self.axis2.union(&other.axis2),
            n: self.n.max(other.n),
            rule: self.rule,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        for n in [1, 2, 5, 32, 33] {
            let rule = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let got: f64 = rule.0.iter().zip(&rule.1).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - exact).abs() < 1e-13, "n={n} deg={deg}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn large_rules_are_sane() {
        for n in [256, 1024] {
            let rule = gauss_legendre(n);
            let sum: f64 = rule.1.iter().sum();
            assert!((sum - 2.0).abs() < 1e-13);
            assert!(rule.0.windows(2).all(|w| w[0] < w[1]));
            // integral of exp over [-1, 1]
            let e: f64 = rule.0.iter().zip(&rule.1).map(|(x, w)| w * x.exp()).sum();
            assert!((e - (1f64.exp() - (-1f64).exp())).abs() < 1e-13);
        }
    }

    #[test]
    fn axis_union_merges_overlaps() {
        let a = Axis::window(0.0, 1.0).unwrap();
        let b = Axis::window(1.5, 1.0).unwrap();
        let c = Axis::window(10.0, 1.0).unwrap();
        let u = a.union(&b).union(&c);
        assert_eq!(u.panels().len(), 2);
        assert!((u.panels()[0].lo() + 1.0).abs() < 1e-15);
        assert!((u.panels()[0].hi() - 2.5).abs() < 1e-15);
        let (x, w) = u.nodes(40);
        assert_eq!(x.len(), 80);
        assert!((w.iter().sum::<f64>() - 5.5).abs() < 1e-12);
    }

    #[test]
    fn grid_rejects_small_n() {
        assert!(GridSpec::rect(0.0, 1.0, 0.0, 1.0, 16).is_err());
        assert!(GridSpec::rect(0.0, 0.0, 0.0, 1.0, 64).is_err());
        assert!(GridSpec::rect(0.0, 1.0, 0.0, 1.0, 64).is_ok());
    }
}
