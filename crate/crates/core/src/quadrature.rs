//! Gauss–Hermite quadrature for transverse integrals.

use crate::landau::eval_oscillator;

/// Nodes and weights for `∫ e^{-ξ²} f(ξ) dξ ≈ Σ wᵢ f(ξᵢ)`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Roots of `H_order` by Newton iteration on the normalised recurrence.
    /// Exact for polynomials of degree `2·order − 1`.
    pub fn new(order: usize) -> Self {
        assert!(
            (1..=180).contains(&order),
            "unsupported quadrature order {order}"
        );
        let n = order;
        let nf = n as f64;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        let mut z = 0.0f64;
        for i in 0..m {
            // initial guesses for the largest roots first
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[0],
                3 => 1.91 * z - 0.91 * nodes[1],
                _ => 2.0 * z - nodes[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..100 {
                // normalised Hermite polynomials (without the Gaussian factor)
                let mut p1 = std::f64::consts::PI.powf(-0.25);
                let mut p2 = 0.0;
                for j in 0..n {
                    let jf = j as f64;
                    let p3 = p2;
                    p2 = p1;
                    p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
                }
                pp = (2.0 * nf).sqrt() * p2;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= 3e-16 * z.abs().max(1.0) {
                    break;
                }
            }
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            weights[i] = 2.0 / (pp * pp);
            weights[n - 1 - i] = weights[i];
        }
        Self { nodes, weights }
    }

    /// `∫ f(ξ) dξ` for integrands already carrying their Gaussian decay,
    /// such as products of oscillator functions.
    pub fn integrate_plain<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * (x * x).exp() * f(x))
            .sum()
    }
}

/// Overlap `∫ Φ_m Φ_n dξ` by quadrature.
pub fn oscillator_overlap(rule: &GaussHermite, m: i64, n: i64) -> f64 {
    rule.integrate_plain(|x| {
        eval_oscillator(m, x).unwrap_or(0.0) * eval_oscillator(n, x).unwrap_or(0.0)
    })
}
