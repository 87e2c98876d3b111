//! Oracles for the integration tests.
//!
//! Every value here is reached by a route that shares nothing with the
//! library beyond 2x2 group multiplication and the one-dimensional quadrature
//! rules: representations come from angular momentum matrices and a dense
//! matrix exponential, expectations over Gaussian links from tensor
//! Gauss–Hermite rules, and class-function integrals from the Weyl reduction.

#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use ymsb_core::lattice::{ComplexLatticeConnection, LatticeConnection};
use ymsb_core::quadrature::{gauss_hermite_normal, gauss_legendre_on, Rule};

pub type CMat = DMatrix<Complex64>;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Seed shared by the acceptance runs.
pub const SEED: u64 = 1;

/// Eigenvalue of `-Delta` on the irrep of dimension `n` for `<X, Y> = -2 tr(XY)`.
pub fn casimir(n: usize) -> f64 {
    ((n * n) as f64 - 1.0) / 4.0
}

/// `n e^{-s c(n) / 2}`: the `chi_n` coefficient of `rho_s`, equal to `int chi_n rho_s`.
pub fn heat_moment(n: usize, s: f64) -> f64 {
    n as f64 * (-s * casimir(n) / 2.0).exp()
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

/// `int_K f(x) dx` for a class function given through `cos theta`.
pub fn weyl_integral(nodes: usize, f: impl Fn(f64) -> f64) -> f64 {
    gauss_legendre_on(nodes, 0.0, PI).integrate(|th| 2.0 / PI * th.sin().powi(2) * f(th.cos()))
}

/// `(rho_t * rho_s)(x)` at eigen-angle `alpha`.
///
/// With `x` on the `e_3` axis and `y` of angle `beta` about a uniformly
/// distributed axis, `cos angle(y^{-1} x) = cos beta cos alpha + sin beta sin alpha u`
/// with `u` uniform on `[-1, 1]`, so the integral over `SU(2)` is two-dimensional.
pub fn heat_convolution(t: f64, s: f64, alpha: f64, nodes: usize) -> f64 {
    let axis = gauss_legendre_on(nodes, -1.0, 1.0);
    weyl_integral(nodes, |cb| {
        let sb = (1.0 - cb * cb).max(0.0).sqrt();
        let inner = axis.integrate(|u| 0.5 * heat_kernel_cos(s, cb * alpha.cos() + sb * alpha.sin() * u));
        heat_kernel_cos(t, cb) * inner
    })
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

fn hermite_grid(order: usize, dims: usize) -> Vec<(Vec<f64>, f64)> {
    let rule: Rule = gauss_hermite_normal(order);
    let mut grid = vec![(Vec::new(), 1.0)];
    for _ in 0..dims {
        grid = grid
            .into_iter()
            .flat_map(|(x, w)| {
                rule.nodes.iter().zip(&rule.weights).map(move |(&xi, &wi)| {
                    let mut y = x.clone();
                    y.push(xi);
                    (y, w * wi)
                })
            })
            .collect();
    }
    grid
}

/// `E pi^n(exp(center + sd xi))` for `xi` standard normal in `R^3`.
pub fn link_rep_mean(gens: &[CMat; 3], center: [Complex64; 3], sd: f64, order: usize) -> CMat {
    let n = gens[0].nrows();
    hermite_grid(order, 3).into_iter().fold(CMat::zeros(n, n), |acc, (x, w)| {
        let z = [0, 1, 2].map(|a| center[a] + sd * x[a]);
        acc + rep_exp(gens, z) * Complex64::new(w, 0.0)
    })
}

/// `E chi_n(h(A))` for `A ~ P_s` on `links` links: links are independent and
/// their mean representation matrices are scalar, so the value is `n m^N`.
pub fn pushforward_moment(n: usize, s: f64, links: usize, order: usize) -> f64 {
    let gens = rep_generators(n);
    let zero = Complex64::new(0.0, 0.0);
    let mean = link_rep_mean(&gens, [zero; 3], (s / links as f64).sqrt(), order);
    let m = mean.trace().re / n as f64;
    n as f64 * m.powi(links as i32)
}

/// `E chi_n(h_C(Z + W))` with `W_k ~ N(0, N hbar)` per coordinate: the product
/// of the per-link means, later links on the left.
pub fn shifted_character_mean(n: usize, z: &ComplexLatticeConnection, hbar: f64, order: usize) -> Complex64 {
    let gens = rep_generators(n);
    let links = z.n() as f64;
    let sd = (hbar / links).sqrt();
    z.links()
        .iter()
        .fold(CMat::identity(n, n), |acc, l| link_rep_mean(&gens, l.0.map(|c| c / links), sd, order) * acc)
        .trace()
}

/// `e^{-hbar c(n)/2} chi_n(h_C(Z))`, the transform of `chi_n` at the complex holonomy.
pub fn transformed_character(n: usize, z: &ComplexLatticeConnection, hbar: f64) -> Complex64 {
    let gens = rep_generators(n);
    let links = z.n() as f64;
    let h = z.links().iter().fold(CMat::identity(n, n), |acc, l| rep_exp(&gens, l.0.map(|c| c / links)) * acc);
    h.trace() * (-hbar * casimir(n) / 2.0).exp()
}

/// `E_mu[Phi_i conj Phi_j]` on `links` links with `Phi_n = e^{-hbar c(n)/2} chi_n`
/// and `Z ~ M_{s,hbar}` link by link: `c_i c_j tr(M^N)` with
/// `M = E[pi^i(U) (x) conj pi^j(U)]` for one link `U = exp(Z_k / N)`.
pub fn lattice_gram_entry(ni: usize, nj: usize, s: f64, hbar: f64, links: usize, order: usize) -> Complex64 {
    let (gi, gj) = (rep_generators(ni), rep_generators(nj));
    let nf = links as f64;
    let sd_re = ((2.0 * s - hbar) / (2.0 * nf)).sqrt();
    let sd_im = (hbar / (2.0 * nf)).sqrt();
    let dim = ni * nj;
    let m = hermite_grid(order, 6).into_iter().fold(CMat::zeros(dim, dim), |acc, (x, w)| {
        let z = [0, 1, 2].map(|a| Complex64::new(sd_re * x[a], sd_im * x[a + 3]));
        let left = rep_exp(&gi, z);
        let right = rep_exp(&gj, z).map(|c| c.conj());
        acc + left.kronecker(&right) * Complex64::new(w, 0.0)
    });
    let power = (0..links).fold(CMat::identity(dim, dim), |acc, _| &m * acc);
    let scale = (-hbar * (casimir(ni) + casimir(nj)) / 2.0).exp();
    power.trace() * scale
}

/// `<chi_i, chi_j>` in `L^2(K, rho_s dx)`.
pub fn rho_s_character_pairing(ni: usize, nj: usize, s: f64) -> f64 {
    weyl_integral(400, |c| character_cos(ni, c) * character_cos(nj, c) * heat_kernel_cos(s, c))
}

/// The lattice Laplacian of `Re chi_n o h` in the orthonormal coordinates
/// `x_{k,a} = A_{k,a} / sqrt(N)`, with exact second derivatives: for one link,
/// `d^2/du^2 exp(X + uE)` at `u = 0` is twice the corner block of the
/// exponential of `[[X, E, 0], [0, X, E], [0, 0, X]]`.
pub fn lattice_laplacian_exact(n: usize, a: &LatticeConnection) -> f64 {
    let gens = rep_generators(n);
    let links = a.n();
    let nf = links as f64;
    let x: Vec<CMat> =
        a.links().iter().map(|l| generator_combination(&gens, l.0.map(|c| Complex64::new(c / nf, 0.0)))).collect();
    let u: Vec<CMat> = x.iter().map(|m| m.exp()).collect();
    // before[k] = U_{k-1} ... U_0, after[k] = U_{N-1} ... U_{k+1}.
    let mut before = vec![CMat::identity(n, n); links];
    for k in 1..links {
        before[k] = &u[k - 1] * &before[k - 1];
    }
    let mut after = vec![CMat::identity(n, n); links];
    for k in (0..links - 1).rev() {
        after[k] = &after[k + 1] * &u[k + 1];
    }
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..links {
        for e in &gens {
            let mut block = CMat::zeros(3 * n, 3 * n);
            for d in 0..3 {
                block.view_mut((d * n, d * n), (n, n)).copy_from(&x[k]);
            }
            block.view_mut((0, n), (n, n)).copy_from(e);
            block.view_mut((n, 2 * n), (n, n)).copy_from(e);
            let corner = block.exp().view((0, 2 * n), (n, n)).into_owned();
            // d^2/dA^2 of exp((A + tE) / N) is (1/N^2) times 2 * corner.
            total += (&after[k] * corner * &before[k]).trace() * 2.0;
        }
    }
    // Coordinates scale A by sqrt(N): one factor N, against 1/N^2 above.
    total.re / nf
}

/// `Re chi_n(h(A))` through the oracle representation.
pub fn holonomy_character(n: usize, a: &LatticeConnection) -> f64 {
    let gens = rep_generators(n);
    let nf = a.n() as f64;
    a.links()
        .iter()
        .fold(CMat::identity(n, n), |acc, l| rep_exp(&gens, l.0.map(|c| Complex64::new(c / nf, 0.0))) * acc)
        .trace()
        .re
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    num / den
}

pub fn one() -> Complex64 {
    ONE
}
