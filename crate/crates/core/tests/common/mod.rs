//! Independent oracles for the property tests: representations from angular
//! momentum matrices and a dense matrix exponential, the heat kernel from its
//! character series in `cos theta`.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Eigenvalue of `-Delta` on the irrep of dimension `n` for `<X, Y> = -2 tr(XY)`.
pub fn casimir(n: usize) -> f64 {
    ((n * n) as f64 - 1.0) / 4.0
}

/// `chi_n` at eigen-angle `theta`, as the Chebyshev polynomial `U_{n-1}(cos theta)`.
pub fn character_cos(n: usize, c: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for _ in 1..n {
        let next = 2.0 * c * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `rho_t` as a function of `cos theta`: the character series summed until the
/// remaining terms, each bounded by `n^2 e^{-t c(n)/2}`, are below `1e-17`.
pub fn heat_kernel_cos(t: f64, c: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    let mut sum = 0.0;
    let mut n = 1usize;
    loop {
        let weight = n as f64 * (-t * casimir(n) / 2.0).exp();
        sum += weight * cur;
        if n > 2 && weight * n as f64 <= 1e-17 {
            return sum;
        }
        let next = 2.0 * c * cur - prev;
        prev = cur;
        cur = next;
        n += 1;
    }
}

/// `d pi^n (e_a) = -i J_a` with `J_a` the spin-`(n-1)/2` angular momentum matrices.
pub fn rep_generators(n: usize) -> [CMat; 3] {
    let j = (n as f64 - 1.0) / 2.0;
    let m = |k: usize| j - k as f64;
    let mut raise = CMat::zeros(n, n);
    for k in 1..n {
        let mk = m(k);
        raise[(k - 1, k)] = Complex64::new((j * (j + 1.0) - mk * (mk + 1.0)).sqrt(), 0.0);
    }
    let lower = raise.adjoint();
    let jx = (&raise + &lower) * Complex64::new(0.5, 0.0);
    let jy = (&raise - &lower) * Complex64::new(0.0, -0.5);
    let jz = CMat::from_diagonal(&nalgebra::DVector::from_fn(n, |k, _| Complex64::new(m(k), 0.0)));
    [jx * -I, jy * -I, jz * -I]
}

pub fn generator_combination(gens: &[CMat; 3], z: [Complex64; 3]) -> CMat {
    &gens[0] * z[0] + &gens[1] * z[1] + &gens[2] * z[2]
}

/// `pi^n(exp(sum z_a e_a))`.
pub fn rep_exp(gens: &[CMat; 3], z: [Complex64; 3]) -> CMat {
    generator_combination(gens, z).exp()
}
