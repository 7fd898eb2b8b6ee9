//! Fixed composite Gauss–Legendre rules for Gaussian-weighted integrals.

use std::f64::consts::PI;

use crate::scalar::Real;

/// Integration window in units of the standard normal variable.
const HALF_WIDTH: f64 = 13.0;
/// Panel width; breakpoints sit on integers.
const PANEL: f64 = 1.0;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, computed in `f64`.
pub(crate) fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let m = order;
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut pp;
        loop {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 1..=m {
                let p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j as f64 - 1.0) * z * p2 - (j as f64 - 1.0) * p3) / j as f64;
            }
            pp = m as f64 * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[m - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * pp * pp);
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

/// Nodes `z_j` and weights `w_j` such that `Σ w_j f(z_j) ≈ E[f(Z)]`, `Z ~ N(0,1)`.
///
/// `order` Legendre nodes are placed on each unit panel of `[-13, 13]`; the
/// Gaussian density is folded into the weights.
#[derive(Clone, Debug)]
pub struct GaussianRule<T> {
    order: usize,
    pub(crate) nodes: Vec<T>,
    pub(crate) weights: Vec<T>,
}

impl<T: Real> GaussianRule<T> {
    pub fn new(order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let panels = (2.0 * HALF_WIDTH / PANEL).round() as usize;
        let norm = 1.0 / (2.0 * PI).sqrt();
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let a = -HALF_WIDTH + p as f64 * PANEL;
            let mid = a + 0.5 * PANEL;
            for (xi, wi) in x.iter().zip(&w) {
                let z = mid + 0.5 * PANEL * xi;
                nodes.push(T::lit(z));
                weights.push(T::lit(0.5 * PANEL * wi * norm * (-0.5 * z * z).exp()));
            }
        }
        Self {
            order,
            nodes,
            weights,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `E[f(Z)]`.
    pub fn expect(&self, mut f: impl FnMut(T) -> T) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&z, &w)| w * f(z))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(16);
        // degree 30 is within 2·16 − 1
        let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((approx - 2.0 / 31.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gaussian_rule_moments() {
        let rule = GaussianRule::<f64>::new(16);
        assert!((rule.expect(|_| 1.0) - 1.0).abs() < 1e-14);
        assert!(rule.expect(|z| z).abs() < 1e-14);
        assert!((rule.expect(|z| z * z) - 1.0).abs() < 1e-13);
        assert!((rule.expect(|z| z.powi(4)) - 3.0).abs() < 1e-12);
    }
}
