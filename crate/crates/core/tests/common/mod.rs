#![allow(dead_code)]

use scatter_entangle_core::purity::WeightedAmplitudeMatrix;
use scatter_entangle_core::wavefunction::BiMomentum;
use scatter_entangle_core::Complex64;

/// Samples `f` on the nodes and weights of `wam` without going through the
/// library's discretization.
pub fn resample<W: BiMomentum + ?Sized>(f: &W, wam: &WeightedAmplitudeMatrix) -> Vec<Vec<Complex64>> {
    wam.nodes1
        .iter()
        .zip(&wam.weights1)
        .map(|(&x, &wx)| wam.nodes2.iter().zip(&wam.weights2).map(|(&y, &wy)| (wx * wy).sqrt() * f.eval(x, y)).collect())
        .collect()
}

/// Tr(rho1^2) / Tr(rho)^2 as the plain four-index sum
/// `sum A_ij A*_kj A_kl A*_il`.
pub fn four_index_purity(a: &[Vec<Complex64>]) -> f64 {
    let n1 = a.len();
    let n2 = a[0].len();
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..n1 {
        for k in 0..n1 {
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n2 {
                for l in 0..n2 {
                    s += a[i][j] * a[k][j].conj() * a[k][l] * a[i][l].conj();
                }
            }
            total += s;
        }
    }
    let norm: f64 = a.iter().flatten().map(|z| z.norm_sqr()).sum();
    total.re / (norm * norm)
}
