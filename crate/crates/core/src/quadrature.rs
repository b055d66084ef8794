//! Gauss–Hermite quadrature for expectations over Gaussian noise.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Node count used by all capacity integrals.
pub const CAPACITY_NODES: usize = 64;

/// Nodes and weights for `∫ exp(-t²) f(t) dt ≈ Σ w_k f(t_k)`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Roots of the physicists' Hermite polynomial H_n by Newton iteration on
    /// the orthonormal recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let pim4 = PI.powf(-0.25);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let half = n.div_ceil(2);
        let mut z = 0.0f64;
        for i in 0..half {
            z = match i {
                0 => (2.0 * n as f64 + 1.0).sqrt() - 1.85575 * (2.0 * n as f64 + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * (n as f64).powf(0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[0],
                3 => 1.91 * z - 0.91 * nodes[1],
                _ => 2.0 * z - nodes[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..100 {
                let mut p1 = pim4;
                let mut p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
                }
                pp = (2.0 * n as f64).sqrt() * p2;
                let step = p1 / pp;
                z -= step;
                if step.abs() <= 1e-15 * z.abs().max(1.0) {
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

    /// `E[f(Z)]` for `Z ~ N(0, 1)`.
    pub fn expect_standard_normal(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        let s2 = std::f64::consts::SQRT_2;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(s2 * t))
            .sum::<f64>()
            / PI.sqrt()
    }
}

/// Shared 64-node rule.
pub fn capacity_rule() -> &'static GaussHermite {
    static RULE: OnceLock<GaussHermite> = OnceLock::new();
    RULE.get_or_init(|| GaussHermite::new(CAPACITY_NODES))
}
