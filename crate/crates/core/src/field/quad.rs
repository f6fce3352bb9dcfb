//! High-accuracy quadrature for explicit radial profiles on [0, ∞).
//!
//! Used where a closed-form profile is available and grid quadrature would
//! be limited by slowly decaying tails (algebraic ground states) or by
//! features narrower than any practical grid (concentrating bumps).

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton on P_n).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Composite Gauss-Legendre rule on [a, b] with `panels` equal panels of
/// `order` nodes each.
#[derive(Debug, Clone)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    pub fn new(a: f64, b: f64, panels: usize, order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let lo = a + p as f64 * h;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(lo + 0.5 * h * (xi + 1.0));
                weights.push(0.5 * h * wi);
            }
        }
        Self { nodes, weights }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * g(x)).sum()
    }
}

/// ∫_0^∞ g(r) dr through the map r = a s / (1 - s), s ∈ (0, 1).
///
/// Suitable for integrands decaying at least like r^{-2}.
pub fn half_line_algebraic<F: Fn(f64) -> f64>(g: F, a: f64, panels: usize) -> f64 {
    let rule = CompositeRule::new(0.0, 1.0, panels, 16);
    rule.integrate(|s| {
        let one = 1.0 - s;
        let r = a * s / one;
        g(r) * a / (one * one)
    })
}

/// ∫_0^∞ g(r) dr through the map r = a tan(θ), θ ∈ (0, π/2).
pub fn half_line_tangent<F: Fn(f64) -> f64>(g: F, a: f64, panels: usize) -> f64 {
    let rule = CompositeRule::new(0.0, std::f64::consts::FRAC_PI_2, panels, 12);
    rule.integrate(|t| {
        let c = t.cos();
        g(a * t.tan()) * a / (c * c)
    })
}
