//! Quadrature engines: Gauss-Legendre rules for smooth tensor-product
//! integrals and a double-exponential (tanh-sinh) rule for the singular
//! self-term integrals, plus the pair-distance densities that reduce
//! same-domain kernel means to one dimension.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on the Legendre polynomial, seeded with the
    /// Chebyshev-based asymptotic estimate of the k-th root.
    fn compute(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for k in 0..m {
            let mut x = (PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_and_deriv(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre_and_deriv(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[k] = -x;
            weights[k] = w;
            nodes[n - 1 - k] = x;
            weights[n - 1 - k] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Cached rule for the given order.
    pub fn order(n: usize) -> &'static GaussLegendre {
        static CACHE: OnceLock<Mutex<HashMap<usize, &'static GaussLegendre>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().unwrap();
        map.entry(n)
            .or_insert_with(|| Box::leak(Box::new(GaussLegendre::compute(n))))
    }

    /// Nodes/weights mapped to [lo, hi].
    pub fn mapped(&self, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
        let c = 0.5 * (hi + lo);
        let h = 0.5 * (hi - lo);
        let nodes = self.nodes.iter().map(|&x| c + h * x).collect();
        let weights = self.weights.iter().map(|&w| h * w).collect();
        (nodes, weights)
    }
}

fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    if n == 1 {
        return (x, 1.0);
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Tanh-sinh (double-exponential) quadrature over (lo, hi).
///
/// Endpoint singularities (log, inverse square root) are integrated to
/// near machine precision; the node positions are computed as stable
/// offsets from the endpoints so the integrand may blow up there.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> f64 {
    let h = 1.0 / 64.0;
    let t_max = 4.0;
    let half = 0.5 * (hi - lo);
    let mut total = 0.0;
    let steps = (t_max / h) as i64;
    for i in -steps..=steps {
        let t = i as f64 * h;
        let u = 0.5 * PI * t.sinh();
        // p = (1+x)/2 evaluated without cancellation near either endpoint
        let e = (-2.0 * u).exp();
        let p = 1.0 / (1.0 + e);
        let w = h * 0.5 * PI * t.cosh() / u.cosh().powi(2);
        let s = lo + (hi - lo) * p;
        let v = f(s);
        if v.is_finite() {
            total += v * w;
        }
    }
    half * total
}

/// Probability density of |x - y| for x, y independent and uniform on a
/// disk of radius `rho`; supported on [0, 2 rho].
pub fn disk_pair_distance_pdf(s: f64, rho: f64) -> f64 {
    if s <= 0.0 || s >= 2.0 * rho {
        return 0.0;
    }
    let u = s / (2.0 * rho);
    (2.0 * s / (rho * rho)) * (2.0 / PI) * (u.acos() - u * (1.0 - u * u).sqrt())
}

/// Same density for a ball of radius `rho` in three dimensions.
pub fn ball_pair_distance_pdf(s: f64, rho: f64) -> f64 {
    if s <= 0.0 || s >= 2.0 * rho {
        return 0.0;
    }
    let u = s / (2.0 * rho);
    (3.0 * s * s / (rho * rho * rho)) * (1.0 - 1.5 * u + 0.5 * u * u * u)
}

/// E[g(|x - y|)] for two independent uniform points of one disk.
pub fn disk_self_mean<F: Fn(f64) -> f64>(g: F, rho: f64) -> f64 {
    tanh_sinh(|s| g(s) * disk_pair_distance_pdf(s, rho), 0.0, 2.0 * rho)
}

/// E[g(|x - y|)] for two independent uniform points of one ball.
pub fn ball_self_mean<F: Fn(f64) -> f64>(g: F, rho: f64) -> f64 {
    tanh_sinh(|s| g(s) * ball_pair_distance_pdf(s, rho), 0.0, 2.0 * rho)
}
