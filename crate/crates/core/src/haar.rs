//! Normalised Haar measure on `SU(2)`: an exact sampler and two quadrature
//! rules, a product rule in Euler angles for arbitrary integrands and a Weyl
//! rule for class functions.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::group::{exp_group, AlgebraVector, GroupElement};
use crate::quadrature::{gauss_legendre, gauss_legendre_on};

/// Quadrature node: a group element and its weight. Weights sum to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HaarNode {
    pub element: GroupElement,
    pub weight: f64,
}

/// Uniform draw from `SU(2)`: a normalised 4-vector of standard normals is
/// uniform on `S^3`, which is `SU(2)` with its Haar measure.
pub fn haar_sample<R: Rng + ?Sized>(rng: &mut R) -> GroupElement {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let norm = q.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-150 {
            return GroupElement::from_quaternion(q.map(|c| c / norm));
        }
    }
}

/// Product rule `g = exp(a e_3) exp(b e_2) exp(c e_3)` with `a` in `[0, 2 pi)`,
/// `c` in `[0, 4 pi)` and Gauss–Legendre in `cos b`; `resolution^3` nodes.
///
/// Exact for products of matrix coefficients whose dimensions `n_i` satisfy
/// `sum (n_i - 1) < resolution`.
pub fn haar_quadrature(resolution: usize) -> Vec<HaarNode> {
    assert!(resolution >= 1);
    let m = resolution;
    let legendre = gauss_legendre(m);
    let e3_outer: Vec<GroupElement> =
        (0..m).map(|i| exp_group(&AlgebraVector::basis(2, 2.0 * PI * i as f64 / m as f64))).collect();
    let e3_inner: Vec<GroupElement> =
        (0..m).map(|i| exp_group(&AlgebraVector::basis(2, 4.0 * PI * i as f64 / m as f64))).collect();
    let mut nodes = Vec::with_capacity(m * m * m);
    for (&u, &wu) in legendre.nodes.iter().zip(&legendre.weights) {
        let middle = exp_group(&AlgebraVector::basis(1, u.clamp(-1.0, 1.0).acos()));
        // Angular weights: (2 pi / m) (4 pi / m) w_u / (16 pi^2) = w_u / (2 m^2).
        let weight = wu / (2.0 * (m * m) as f64);
        for a in &e3_outer {
            let am = a * &middle;
            for c in &e3_inner {
                nodes.push(HaarNode { element: &am * c, weight });
            }
        }
    }
    nodes
}

/// Rule for class functions, `int f = (2/pi) int_0^pi f(theta) sin^2(theta) d theta`
/// where `theta` is the eigen-angle. Returns `(theta, weight)` pairs.
pub fn weyl_quadrature(n: usize) -> Vec<(f64, f64)> {
    let rule = gauss_legendre_on(n, 0.0, PI);
    rule.nodes.iter().zip(&rule.weights).map(|(&th, &w)| (th, w * 2.0 / PI * th.sin().powi(2))).collect()
}

/// Representative of the conjugacy class with eigen-angle `theta`.
pub fn class_representative(theta: f64) -> GroupElement {
    exp_group(&AlgebraVector::basis(2, 2.0 * theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedSequence;

    #[test]
    fn weights_sum_to_one() {
        let total: f64 = haar_quadrature(5).iter().map(|n| n.weight).sum();
        assert!((total - 1.0).abs() < 1e-14);
        let total: f64 = weyl_quadrature(30).iter().map(|(_, w)| w).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn defining_trace_integrates_to_zero_and_square_to_one() {
        let nodes = haar_quadrature(4);
        let chi: f64 = nodes.iter().map(|n| n.weight * n.element.trace().re).sum();
        let sq: f64 = nodes.iter().map(|n| n.weight * n.element.trace().norm_sqr()).sum();
        assert!(chi.abs() < 1e-14);
        assert!((sq - 1.0).abs() < 1e-14);
    }

    #[test]
    fn samples_are_in_su2() {
        let mut rng = SeedSequence::new(3, "haar").stream(0);
        for _ in 0..100 {
            let g = haar_sample(&mut rng);
            assert!(g.unitarity_defect() < 1e-14);
            assert!((g.matrix().determinant().re - 1.0).abs() < 1e-14);
        }
    }
}
