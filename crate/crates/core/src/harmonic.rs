//! Harmonic analysis on `SU(2)` and its holomorphic continuation to `SL(2, C)`.
//!
//! Irreps are labelled by their dimension `n = 2j + 1` and realised on
//! homogeneous polynomials of degree `n - 1` in two variables,
//! `(pi(g) f)(v) = f(g^T v)`, with orthonormal basis
//! `e_r = z1^{n-1-r} z2^r / sqrt((n-1-r)! r!)`. The formula is polynomial in
//! the entries of `g`, so it continues holomorphically to `SL(2, C)` with no
//! branch choices.

use std::f64::consts::PI;
use std::sync::{OnceLock, RwLock};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{basis, AsMatrix, CMatrix2, GroupElement};
use crate::haar::{haar_quadrature, HaarNode};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest cutoff accepted when choosing a truncation automatically.
pub const MAX_CUTOFF: usize = 512;

/// Irrep of `SU(2)` of dimension `n >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IrrepLabel(usize);

impl IrrepLabel {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("irrep dimension must be at least 1".into()));
        }
        Ok(IrrepLabel(n))
    }

    pub fn dim(self) -> usize {
        self.0
    }

    /// Spin `j = (n - 1) / 2`.
    pub fn spin(self) -> f64 {
        (self.0 as f64 - 1.0) / 2.0
    }
}

fn binomial_table(m: usize) -> Vec<f64> {
    let mut row = vec![1.0; m + 1];
    for k in 1..m {
        row[k] = row[k - 1] * (m - k + 1) as f64 / k as f64;
    }
    row
}

fn powers(x: Complex64, m: usize) -> Vec<Complex64> {
    let mut p = Vec::with_capacity(m + 1);
    let mut acc = ONE;
    for _ in 0..=m {
        p.push(acc);
        acc *= x;
    }
    p
}

/// Matrix of `g` in the irrep of dimension `n`, as an `n x n` matrix.
pub fn irrep_matrix<G: AsMatrix>(n: usize, g: &G) -> DMatrix<Complex64> {
    irrep_of_matrix(n, g.as_matrix())
}

pub(crate) fn irrep_of_matrix(n: usize, g: &CMatrix2) -> DMatrix<Complex64> {
    assert!(n >= 1, "irrep dimension must be at least 1");
    let m = n - 1;
    let (g11, g12, g21, g22) = (g[(0, 0)], g[(0, 1)], g[(1, 0)], g[(1, 1)]);
    let (p11, p12, p21, p22) = (powers(g11, m), powers(g12, m), powers(g21, m), powers(g22, m));
    let binom: Vec<Vec<f64>> = (0..=m).map(binomial_table).collect();
    let mut out = DMatrix::from_element(n, n, ZERO);
    for c in 0..=m {
        // (g11 z1 + g21 z2)^{m-c} (g12 z1 + g22 z2)^c
        for i in 0..=(m - c) {
            let left = p11[m - c - i] * p21[i] * binom[m - c][i];
            for l in 0..=c {
                out[(i + l, c)] += left * p12[c - l] * p22[l] * binom[c][l];
            }
        }
    }
    let full = &binom[m];
    for r in 0..=m {
        for c in 0..=m {
            out[(r, c)] *= (full[c] / full[r]).sqrt();
        }
    }
    out
}

/// Characters `chi_1, ..., chi_cutoff` at a matrix of trace `tau`, via the
/// recurrence `chi_{k+1} = tau chi_k - chi_{k-1}` valid on all of `SL(2, C)`.
pub fn characters_from_trace(tau: Complex64, cutoff: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(cutoff);
    let (mut prev, mut cur) = (ZERO, ONE);
    for _ in 0..cutoff {
        out.push(cur);
        let next = tau * cur - prev;
        prev = cur;
        cur = next;
    }
    out
}

/// `chi_n(g) = tr pi_n(g)`.
pub fn character<G: AsMatrix>(n: usize, g: &G) -> Complex64 {
    assert!(n >= 1);
    characters_from_trace(g.as_matrix().trace(), n)[n - 1]
}

/// Action of `X` in `sl(2, C)` on the unnormalised monomial basis
/// `z1^{m-r} z2^r` of the irrep of dimension `m + 1`.
pub fn generator_matrix(n: usize, x: &CMatrix2) -> DMatrix<Complex64> {
    let m = n - 1;
    let mut d = DMatrix::from_element(n, n, ZERO);
    for r in 0..=m {
        let (a, b) = ((m - r) as f64, r as f64);
        d[(r, r)] = x[(0, 0)] * a + x[(1, 1)] * b;
        if r < m {
            d[(r + 1, r)] = x[(1, 0)] * a;
        }
        if r > 0 {
            d[(r - 1, r)] = x[(0, 1)] * b;
        }
    }
    d
}

fn casimir_from_generators(n: usize) -> f64 {
    let sum = basis()
        .iter()
        .map(|e| {
            let d = generator_matrix(n, e);
            &d * &d
        })
        .fold(DMatrix::from_element(n, n, ZERO), |acc, d2| acc + d2);
    -sum[(0, 0)].re
}

static CASIMIR_CACHE: OnceLock<RwLock<Vec<f64>>> = OnceLock::new();

/// Eigenvalue of `-Delta_K` on the irrep of dimension `n`, computed from the
/// generators on first use and cached.
pub fn casimir(n: usize) -> f64 {
    assert!(n >= 1, "irrep dimension must be at least 1");
    let cache = CASIMIR_CACHE.get_or_init(|| RwLock::new(vec![0.0]));
    if let Some(&c) = cache.read().expect("casimir cache poisoned").get(n - 1) {
        return c;
    }
    let mut table = cache.write().expect("casimir cache poisoned");
    while table.len() < n {
        let k = table.len() + 1;
        table.push(casimir_from_generators(k));
    }
    table[n - 1]
}

/// `n^2 e^{-t(n^2-1)/8 + (n-1) lambda}`, the bound on the `n`-th term of the
/// heat kernel series at an argument of log spectral radius `lambda`.
fn term_bound(t: f64, lambda: f64, n: usize) -> f64 {
    let nf = n as f64;
    nf * nf * (-t * (nf * nf - 1.0) / 8.0 + (nf - 1.0) * lambda).exp()
}

/// Certified bound on `sum_{n > cutoff}` of the term bounds. The ratio of
/// consecutive terms decreases in `n`, so once it drops below one the tail is
/// dominated by a geometric series.
pub fn tail_bound(t: f64, lambda: f64, cutoff: usize) -> f64 {
    let k = cutoff + 1;
    let kf = k as f64;
    let ratio = ((kf + 1.0) / kf).powi(2) * (-t * (2.0 * kf + 1.0) / 8.0 + lambda).exp();
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    term_bound(t, lambda, k) / (1.0 - ratio)
}

/// Log spectral radius of a `det = 1` matrix; zero on `SU(2)`.
pub fn log_spectral_radius<G: AsMatrix>(g: &G) -> f64 {
    let half = g.as_matrix().trace() * 0.5;
    let disc = (half * half - ONE).sqrt();
    (half + disc).norm().max((half - disc).norm()).ln().max(0.0)
}

/// The heat kernel at the identity, `rho_t = sum n e^{-t c(n)/2} chi_n`,
/// truncated at `cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatKernelSeries {
    time: f64,
    coefficients: Vec<f64>,
}

impl HeatKernelSeries {
    pub fn new(time: f64, cutoff: usize) -> Result<Self> {
        if !(time > 0.0) || cutoff == 0 {
            return Err(Error::InvalidParams(format!(
                "heat kernel needs t > 0 and cutoff >= 1 (t = {time}, cutoff = {cutoff})"
            )));
        }
        let coefficients = (1..=cutoff).map(|n| n as f64 * (-time * casimir(n) / 2.0).exp()).collect();
        Ok(HeatKernelSeries { time, coefficients })
    }

    /// Smallest cutoff whose tail bound at log spectral radius up to
    /// `lambda` is below `tolerance`.
    pub fn certified(time: f64, lambda: f64, tolerance: f64) -> Result<Self> {
        if !(time > 0.0) {
            return Err(Error::InvalidParams(format!("heat kernel needs t > 0, got {time}")));
        }
        let cutoff = (1..=MAX_CUTOFF).find(|&c| tail_bound(time, lambda, c) <= tolerance).ok_or(Error::Truncation {
            time,
            cutoff: MAX_CUTOFF,
            bound: tail_bound(time, lambda, MAX_CUTOFF),
            tolerance,
        })?;
        Self::new(time, cutoff)
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn cutoff(&self) -> usize {
        self.coefficients.len()
    }

    /// Coefficient of `chi_n`.
    pub fn coefficient(&self, n: usize) -> f64 {
        self.coefficients.get(n - 1).copied().unwrap_or(0.0)
    }

    /// Haar integral of the truncated series: the trivial coefficient.
    pub fn integral(&self) -> f64 {
        self.coefficients[0]
    }

    pub fn tail_bound(&self, lambda: f64) -> f64 {
        tail_bound(self.time, lambda, self.cutoff())
    }

    /// Truncated sum, with no certification.
    pub fn sum_at<G: AsMatrix>(&self, g: &G) -> Complex64 {
        let chi = characters_from_trace(g.as_matrix().trace(), self.cutoff());
        self.coefficients.iter().zip(&chi).map(|(a, c)| c * *a).sum()
    }

    /// Truncated sum, failing if the tail at `g` may exceed `tolerance`.
    pub fn evaluate<G: AsMatrix>(&self, g: &G, tolerance: f64) -> Result<Complex64> {
        let bound = self.tail_bound(log_spectral_radius(g));
        if bound > tolerance {
            return Err(Error::Truncation { time: self.time, cutoff: self.cutoff(), bound, tolerance });
        }
        Ok(self.sum_at(g))
    }

    /// As a band-limited class function.
    pub fn to_function(&self) -> BandLimitedFunction {
        let mut f = BandLimitedFunction::zero(self.cutoff());
        for (i, &a) in self.coefficients.iter().enumerate() {
            f = f + BandLimitedFunction::character(i + 1).scale(Complex64::new(a, 0.0));
        }
        f
    }
}

/// `rho_t(g)` with `cutoff` terms; errors if the tail bound exceeds `tolerance`.
pub fn heat_kernel<G: AsMatrix>(t: f64, g: &G, cutoff: usize, tolerance: f64) -> Result<Complex64> {
    HeatKernelSeries::new(t, cutoff)?.evaluate(g, tolerance)
}

/// `rho_t` on `SU(2)` by the method of images on the 3-sphere of radius 2.
/// Accurate for all `t > 0` including small times, where the character series
/// loses all relative accuracy away from the identity.
pub fn heat_kernel_images(t: f64, x: &GroupElement) -> f64 {
    heat_kernel_images_angle(t, x.eigen_angle())
}

/// [`heat_kernel_images`] as a function of the eigen-angle in `[0, pi]`.
pub fn heat_kernel_images_angle(t: f64, theta: f64) -> f64 {
    let prefactor = (t / 8.0).exp() * (8.0 * PI / t).sqrt() * (2.0 / t);
    let reach = (2.0 * t).sqrt() * 10.0 / (2.0 * PI);
    let k_max = reach.ceil() as i64 + 1;
    let s = theta.sin();
    if s.abs() > 1e-5 {
        let f: f64 = (-k_max..=k_max)
            .map(|k| {
                let a = theta + 2.0 * PI * k as f64;
                a * (-2.0 * a * a / t).exp()
            })
            .sum();
        prefactor * f / s
    } else {
        // f(theta) vanishes where sin does; use f'/cos.
        let df: f64 = (-k_max..=k_max)
            .map(|k| {
                let a = theta + 2.0 * PI * k as f64;
                (1.0 - 4.0 * a * a / t) * (-2.0 * a * a / t).exp()
            })
            .sum();
        prefactor * df / theta.cos()
    }
}

/// A function on `SU(2)` with finitely many Peter–Weyl coefficients.
///
/// Block `n - 1` holds the coefficients of `sqrt(n) pi^n_{rc}`, an orthonormal
/// family in `L^2(K, dx)`. Evaluation at any `g` in `SL(2, C)` gives the
/// holomorphic continuation.
#[derive(Debug, Clone, PartialEq)]
pub struct BandLimitedFunction {
    blocks: Vec<DMatrix<Complex64>>,
}

/// Evaluation path for one block.
enum BlockKind {
    Zero,
    Scalar(Complex64),
    General,
}

fn classify(block: &DMatrix<Complex64>) -> BlockKind {
    let n = block.nrows();
    let d = block[(0, 0)];
    let mut scalar = true;
    for r in 0..n {
        for c in 0..n {
            let expected = if r == c { d } else { ZERO };
            if block[(r, c)] != expected {
                scalar = false;
            }
        }
    }
    match (scalar, d == ZERO) {
        (true, true) => BlockKind::Zero,
        (true, false) => BlockKind::Scalar(d),
        _ => BlockKind::General,
    }
}

impl BandLimitedFunction {
    /// The zero function with room for irreps up to `cutoff`.
    pub fn zero(cutoff: usize) -> Self {
        BandLimitedFunction { blocks: (1..=cutoff).map(|n| DMatrix::from_element(n, n, ZERO)).collect() }
    }

    pub fn constant(c: Complex64) -> Self {
        BandLimitedFunction { blocks: vec![DMatrix::from_element(1, 1, c)] }
    }

    /// The character `chi_n`, whose block is `I / sqrt(n)`.
    pub fn character(n: usize) -> Self {
        let mut f = Self::zero(n);
        f.blocks[n - 1] = DMatrix::identity(n, n) * Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        f
    }

    /// The matrix coefficient `pi^n_{rc}`.
    pub fn matrix_coefficient(n: usize, r: usize, c: usize) -> Self {
        let mut f = Self::zero(n);
        f.blocks[n - 1][(r, c)] = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        f
    }

    /// From blocks; block `i` must be square of size `i + 1`.
    pub fn from_blocks(blocks: Vec<DMatrix<Complex64>>) -> Result<Self> {
        for (i, b) in blocks.iter().enumerate() {
            if b.nrows() != i + 1 || b.ncols() != i + 1 {
                return Err(Error::ShapeMismatch { expected: i + 1, found: b.nrows().max(b.ncols()) });
            }
        }
        Ok(BandLimitedFunction { blocks })
    }

    pub fn blocks(&self) -> &[DMatrix<Complex64>] {
        &self.blocks
    }

    /// Largest dimension with storage.
    pub fn cutoff(&self) -> usize {
        self.blocks.len()
    }

    /// Largest dimension with a nonzero coefficient, or 0 for the zero function.
    pub fn degree(&self) -> usize {
        self.blocks.iter().rposition(|b| b.iter().any(|z| *z != ZERO)).map_or(0, |i| i + 1)
    }

    pub fn coefficient(&self, n: usize, r: usize, c: usize) -> Complex64 {
        self.blocks.get(n - 1).map_or(ZERO, |b| b[(r, c)])
    }

    pub fn scale(&self, a: Complex64) -> Self {
        BandLimitedFunction { blocks: self.blocks.iter().map(|b| b * a).collect() }
    }

    fn map_blocks(&self, f: impl Fn(usize) -> Complex64) -> Self {
        BandLimitedFunction { blocks: self.blocks.iter().enumerate().map(|(i, b)| b * f(i + 1)).collect() }
    }

    /// `e^{t Delta_K / 2}`: block `n` scaled by `e^{-t c(n) / 2}`.
    pub fn heat_semigroup(&self, t: f64) -> Self {
        self.map_blocks(|n| Complex64::new((-t * casimir(n) / 2.0).exp(), 0.0))
    }

    /// `Delta_K`: block `n` scaled by `-c(n)`.
    pub fn laplacian(&self) -> Self {
        self.map_blocks(|n| Complex64::new(-casimir(n), 0.0))
    }

    /// `L^2(K, dx)` norm, the Euclidean norm of the coefficients.
    pub fn l2_norm(&self) -> f64 {
        self.blocks.iter().map(|b| b.norm_squared()).sum::<f64>().sqrt()
    }

    /// `int phi conj(psi) dx` from coefficients.
    pub fn haar_inner_product(&self, other: &Self) -> Complex64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum::<Complex64>())
            .sum()
    }

    /// Bound on `sup |phi|` over `SU(2)`: `|sqrt(n) tr(a^T pi)| <= n |a|_F`.
    pub fn sup_bound(&self) -> f64 {
        self.blocks.iter().enumerate().map(|(i, b)| (i + 1) as f64 * b.norm()).sum()
    }

    /// `phi(g)`, holomorphic in `g`.
    pub fn evaluate<G: AsMatrix>(&self, g: &G) -> Complex64 {
        let m = g.as_matrix();
        let chi = characters_from_trace(m.trace(), self.cutoff());
        let mut total = ZERO;
        for (i, block) in self.blocks.iter().enumerate() {
            let n = i + 1;
            let sqrt_n = (n as f64).sqrt();
            total += match classify(block) {
                BlockKind::Zero => ZERO,
                BlockKind::Scalar(d) => d * chi[i] * sqrt_n,
                BlockKind::General => {
                    let p = irrep_of_matrix(n, m);
                    block.iter().zip(p.iter()).map(|(a, b)| a * b).sum::<Complex64>() * sqrt_n
                }
            };
        }
        total
    }

    /// True when every block is a multiple of the identity.
    pub fn is_class_function(&self) -> bool {
        self.blocks.iter().all(|b| !matches!(classify(b), BlockKind::General))
    }
}

impl std::ops::Add for BandLimitedFunction {
    type Output = BandLimitedFunction;
    fn add(self, rhs: Self) -> Self {
        let cutoff = self.cutoff().max(rhs.cutoff());
        let mut out = Self::zero(cutoff);
        for (i, b) in self.blocks.iter().enumerate() {
            out.blocks[i] += b;
        }
        for (i, b) in rhs.blocks.iter().enumerate() {
            out.blocks[i] += b;
        }
        out
    }
}

/// Haar nodes exact for `phi conj(psi) rho` with the given degrees.
pub(crate) fn quadrature_for(total_spin_degree: usize) -> Vec<HaarNode> {
    haar_quadrature(total_spin_degree + 1)
}

/// `int phi conj(psi) rho_s dx` by Haar quadrature, with `rho_s` truncated at
/// `cutoff`. Returns the value and a bound on the error from truncation; the
/// quadrature itself is exact for the truncated integrand.
pub fn inner_product_rho_s(
    phi: &BandLimitedFunction,
    psi: &BandLimitedFunction,
    s: f64,
    cutoff: usize,
) -> Result<(Complex64, f64)> {
    let rho = HeatKernelSeries::new(s, cutoff)?;
    let degree = phi.degree().saturating_sub(1) + psi.degree().saturating_sub(1) + cutoff - 1;
    let nodes = quadrature_for(degree);
    let value = nodes
        .iter()
        .map(|node| {
            let x = &node.element;
            phi.evaluate(x) * psi.evaluate(x).conj() * rho.sum_at(x).re * node.weight
        })
        .sum();
    let bound = phi.sup_bound() * psi.sup_bound() * rho.tail_bound(0.0);
    Ok((value, bound))
}
