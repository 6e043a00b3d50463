//! Masses and momentum coordinate maps.
//!
//! Total and relative momenta are `p = p1 + p2` and `q = mu2 p1 - mu1 p2`.
//! Both maps below have unit-modulus Jacobian, so integrals move between
//! `(p1, p2)` and `(p, q)` without a measure factor.


use crate::error::{Error, Result};

/// Two particle masses with derived mass fractions.
///
/// Only `mu1` is stored; `mu2` is always `1 - mu1` so that `mu1 + mu2 == 1`
/// holds exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MassPartition {
    total: f64,
    mu1: f64,
}

impl MassPartition {
    pub fn from_masses(m1: f64, m2: f64) -> Result<Self> {
        if !(m1 > 0.0 && m1.is_finite()) {
            return Err(Error::invalid("m1", format!("must be positive and finite, got {m1}")));
        }
        if !(m2 > 0.0 && m2.is_finite()) {
            return Err(Error::invalid("m2", format!("must be positive and finite, got {m2}")));
        }
        let total = m1 + m2;
        Self::from_fraction(m1 / total, total)
    }

    pub fn from_fraction(mu1: f64, total: f64) -> Result<Self> {
        if !(mu1 > 0.0 && mu1 < 1.0) {
            return Err(Error::invalid("mu1", format!("must lie in (0, 1), got {mu1}")));
        }
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::invalid("total mass", format!("must be positive and finite, got {total}")));
        }
        Ok(Self { total, mu1 })
    }

    /// Equal masses with unit total mass.
    pub fn equal() -> Self {
        Self { total: 1.0, mu1: 0.5 }
    }

    pub fn m1(&self) -> f64 {
        self.mu1 * self.total
    }

    pub fn m2(&self) -> f64 {
        self.mu2() * self.total
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn mu1(&self) -> f64 {
        self.mu1
    }

    pub fn mu2(&self) -> f64 {
        1.0 - self.mu1
    }

    pub fn reduced(&self) -> f64 {
        self.mu1 * self.mu2() * self.total
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairMomentum {
    pub p1: f64,
    pub p2: f64,
}

impl PairMomentum {
    pub fn new(p1: f64, p2: f64) -> Self {
        Self { p1, p2 }
    }
}

/// Total momentum `p` and relative momentum `q`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JacobiMomentum {
    pub p: f64,
    pub q: f64,
}

impl JacobiMomentum {
    pub fn new(p: f64, q: f64) -> Self {
        Self { p, q }
    }
}

pub fn pair_to_jacobi(pm: PairMomentum, mp: &MassPartition) -> JacobiMomentum {
    JacobiMomentum {
        p: pm.p1 + pm.p2,
        q: mp.mu2() * pm.p1 - mp.mu1() * pm.p2,
    }
}

pub fn jacobi_to_pair(jm: JacobiMomentum, mp: &MassPartition) -> PairMomentum {
    PairMomentum {
        p1: mp.mu1() * jm.p + jm.q,
        p2: mp.mu2() * jm.p - jm.q,
    }
}

/// Image of `(p1, p2)` under `q -> -q` at fixed total momentum.
///
/// Reduces to the swap `(p2, p1)` for equal masses. The map is an
/// involution with Jacobian determinant -1.
pub fn reflect_momenta(pm: PairMomentum, mp: &MassPartition) -> PairMomentum {
    let (mu1, mu2) = (mp.mu1(), mp.mu2());
    PairMomentum {
        p1: (mu1 - mu2) * pm.p1 + 2.0 * mu1 * pm.p2,
        p2: 2.0 * mu2 * pm.p1 + (mu2 - mu1) * pm.p2,
    }
}

/// Row-major matrix of [`reflect_momenta`].
pub fn reflection_matrix(mp: &MassPartition) -> [[f64; 2]; 2] {
    let (mu1, mu2) = (mp.mu1(), mp.mu2());
    [[mu1 - mu2, 2.0 * mu1], [2.0 * mu2, mu2 - mu1]]
}

/// Row-major matrix of [`pair_to_jacobi`].
pub fn jacobi_matrix(mp: &MassPartition) -> [[f64; 2]; 2] {
    [[1.0, 1.0], [mp.mu2(), -mp.mu1()]]
}
