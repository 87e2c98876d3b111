//! One-dimensional Gaussian quadrature rules.

use std::f64::consts::PI;

/// Nodes and weights of an `n`-point rule on an interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Sum of `w_i f(x_i)`.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Legendre polynomial `P_n(x)` and its derivative.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}

/// Gauss–Legendre rule on `[-1, 1]`, exact for polynomials of degree `< 2n`.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1, "quadrature needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Rule { nodes, weights }
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Rule {
    let base = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    Rule {
        nodes: base.nodes.iter().map(|x| mid + half * x).collect(),
        weights: base.weights.iter().map(|w| w * half).collect(),
    }
}

/// Gauss–Chebyshev rule of the second kind: integrates `sqrt(1 - u^2) f(u)` on
/// `[-1, 1]`, exact for `f` of degree `< 2n`.
pub fn gauss_chebyshev_second(n: usize) -> Rule {
    let np1 = n as f64 + 1.0;
    let (nodes, weights) = (1..=n)
        .map(|i| {
            let a = i as f64 * PI / np1;
            (a.cos(), PI / np1 * a.sin().powi(2))
        })
        .unzip();
    Rule { nodes, weights }
}

/// Gauss–Hermite rule for the standard normal distribution (Golub–Welsch):
/// `E[f(xi)]` is exact for polynomials of degree `< 2n`, weights sum to 1.
pub fn gauss_hermite_normal(n: usize) -> Rule {
    assert!(n >= 1, "quadrature needs at least one node");
    let mut jacobi = nalgebra::DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = (k as f64).sqrt();
        jacobi[(k - 1, k)] = b;
        jacobi[(k, k - 1)] = b;
    }
    let eig = nalgebra::SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n).map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2))).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (nodes, weights) = pairs.into_iter().unzip();
    Rule { nodes, weights }
}

/// Periodic trapezoid rule with `n` nodes on `[0, period)`; exact for
/// trigonometric polynomials of degree `< n`.
pub fn periodic(n: usize, period: f64) -> Rule {
    let h = period / n as f64;
    Rule { nodes: (0..n).map(|i| i as f64 * h).collect(), weights: vec![h; n] }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_exact_on_monomials() {
        for n in [1, 2, 5, 12, 40] {
            let rule = gauss_legendre(n);
            for k in 0..(2 * n) {
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                let v = rule.integrate(|x| x.powi(k as i32));
                assert!((v - exact).abs() < 1e-13, "n={n} k={k}: {v} vs {exact}");
            }
        }
    }

    #[test]
    fn five_point_nodes_match_closed_form() {
        let rule = gauss_legendre(5);
        let outer = (5.0 + 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0;
        assert_relative_eq!(rule.nodes[4], outer, epsilon = 1e-15);
        assert_relative_eq!(rule.weights[2], 128.0 / 225.0, epsilon = 1e-15);
    }

    #[test]
    fn mapped_rule_integrates_exponential() {
        let rule = gauss_legendre_on(20, 0.0, 2.0);
        assert_relative_eq!(rule.integrate(f64::exp), 2f64.exp() - 1.0, epsilon = 1e-14);
    }

    #[test]
    fn chebyshev_weight() {
        let rule = gauss_chebyshev_second(8);
        assert_relative_eq!(rule.integrate(|_| 1.0), PI / 2.0, epsilon = 1e-14);
        assert_relative_eq!(rule.integrate(|u| u * u), PI / 8.0, epsilon = 1e-14);
    }

    #[test]
    fn hermite_moments() {
        let rule = gauss_hermite_normal(10);
        // E xi^{2k} = (2k - 1)!!
        let mut double_factorial = 1.0;
        for k in 0..10 {
            if k > 0 {
                double_factorial *= (2 * k - 1) as f64;
            }
            let v = rule.integrate(|x| x.powi(2 * k));
            assert_relative_eq!(v, double_factorial, max_relative = 1e-11);
            assert!(rule.integrate(|x| x.powi(2 * k + 1)).abs() < 1e-9 * double_factorial);
        }
    }

    #[test]
    fn periodic_rule_kills_low_harmonics() {
        let rule = periodic(7, 2.0 * PI);
        for k in 1..7 {
            assert!(rule.integrate(|x| (k as f64 * x).cos()).abs() < 1e-13);
        }
    }
}
