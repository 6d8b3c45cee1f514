//! Composite Gauss-Legendre quadrature.
//!
//! Everything in the crate that integrates a density (moments, characteristic
//! functions of non-Gaussian laws) goes through [`Panels`], which splits an
//! interval at user breakpoints and then subdivides every piece so that no
//! panel is wider than a requested width. For oscillatory integrands the width
//! is tied to the period `2π/s`.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Nodes and weights of an `order`-point Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let m = order.div_ceil(2);
        for i in 0..m {
            // Chebyshev-like initial guess, then Newton on P_order.
            let mut z = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(order, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(order, z);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[order - 1 - i] = z;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// The 10-point rule, shared.
    pub fn ten() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(10))
    }

    /// The 20-point rule, shared.
    pub fn twenty() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(20))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

fn legendre_with_derivative(order: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=order {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let n = order as f64;
    let d = n * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// A partition of an interval into panels no wider than `max_width`, honoring breakpoints.
#[derive(Debug, Clone)]
pub struct Panels {
    pub edges: Vec<f64>,
}

impl Panels {
    pub fn new(breakpoints: &[f64], max_width: f64) -> Self {
        assert!(breakpoints.len() >= 2);
        assert!(max_width > 0.0);
        let mut edges = vec![breakpoints[0]];
        for pair in breakpoints.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let width = b - a;
            if width <= 0.0 {
                continue;
            }
            let pieces = (width / max_width).ceil().max(1.0) as usize;
            for p in 1..=pieces {
                edges.push(if p == pieces {
                    b
                } else {
                    a + width * p as f64 / pieces as f64
                });
            }
        }
        Self { edges }
    }

    pub fn len(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flattened (node, weight) pairs of the composite rule.
    pub fn nodes(&self, rule: &GaussLegendre) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.len() * rule.nodes.len());
        for pair in self.edges.windows(2) {
            let half = 0.5 * (pair[1] - pair[0]);
            let mid = 0.5 * (pair[1] + pair[0]);
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                out.push((mid + half * x, w * half));
            }
        }
        out
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, rule: &GaussLegendre, mut f: F) -> f64 {
        self.edges
            .windows(2)
            .map(|pair| rule.integrate(pair[0], pair[1], &mut f))
            .sum()
    }
}
