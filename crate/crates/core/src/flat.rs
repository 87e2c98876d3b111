//! Segal–Bargmann transforms on `R^d`.
//!
//! The transform is heat evolution for time `hbar` followed by analytic
//! continuation, `S f = (e^{hbar Delta / 2} f)` continued to `C^d`. It is the
//! same map for the Lebesgue version (onto `nu_hbar`) and for the
//! Gaussian-measure version (`P_s` onto `M_{s,hbar}`); only the measures change.
//!
//! Measures, with `z = x + i p` and `r = 2s - hbar`:
//!
//! * `P_s`: `x ~ N(0, s I)`.
//! * `M_{s,hbar}`: `x ~ N(0, r/2 I)` and independently `p ~ N(0, hbar/2 I)`.
//! * `nu_hbar`: Lebesgue in `x`, `p ~ N(0, hbar/2 I)`.
//!
//! Functions come from closed-form families on which heat evolution is exact.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::mc::{sample_mean, Estimate};
use crate::quadrature::{gauss_hermite_normal, Rule};
use crate::report::{CheckRow, VerificationReport};
use crate::rng::SeedSequence;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dimension, Gaussian time `s` and Planck-like parameter `hbar` with `s > hbar/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureParams {
    dim: usize,
    s: f64,
    hbar: f64,
}

impl MeasureParams {
    pub fn new(dim: usize, s: f64, hbar: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParams("dimension must be positive".into()));
        }
        if !(hbar > 0.0 && s.is_finite() && 2.0 * s > hbar) {
            return Err(Error::InvalidParams(format!("need hbar > 0 and s > hbar/2, got s = {s}, hbar = {hbar}")));
        }
        Ok(MeasureParams { dim, s, hbar })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// `r = 2s - hbar`.
    pub fn r(&self) -> f64 {
        2.0 * self.s - self.hbar
    }
}

/// A measure on `R^d` or `C^d = R^d + i R^d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Measure {
    /// `dx` on `R^d`.
    Lebesgue,
    /// `P_s` on `R^d`.
    Gaussian { s: f64 },
    /// `M_{s,hbar}` on `C^d`.
    Phase { s: f64, hbar: f64 },
    /// `nu_hbar` on `C^d`.
    Nu { hbar: f64 },
}

impl Measure {
    fn name(&self) -> String {
        match self {
            Measure::Lebesgue => "Lebesgue measure".into(),
            Measure::Gaussian { s } => format!("P_s (s = {s})"),
            Measure::Phase { s, hbar } => format!("M_(s,hbar) (s = {s}, hbar = {hbar})"),
            Measure::Nu { hbar } => format!("nu_hbar (hbar = {hbar})"),
        }
    }

    /// Per-axis measures for the real and imaginary parts.
    fn axes(&self) -> (Axis, Axis) {
        match *self {
            Measure::Lebesgue => (Axis::Lebesgue, Axis::Origin),
            Measure::Gaussian { s } => (Axis::Normal(s), Axis::Origin),
            Measure::Phase { s, hbar } => (Axis::Normal(s - hbar / 2.0), Axis::Normal(hbar / 2.0)),
            Measure::Nu { hbar } => (Axis::Lebesgue, Axis::Normal(hbar / 2.0)),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Axis {
    Origin,
    Normal(f64),
    Lebesgue,
}

/// `int exp(-a y^2 + b y) d mu(y)` on one axis.
fn axis_integral(axis: Axis, a: f64, b: f64) -> Option<f64> {
    match axis {
        Axis::Origin => Some(1.0),
        Axis::Normal(var) => {
            let eff = a + 0.5 / var;
            (eff > 0.0).then(|| (b * b / (4.0 * eff)).exp() / (2.0 * var * eff).sqrt())
        }
        Axis::Lebesgue => (a > 0.0).then(|| (PI / a).sqrt() * (b * b / (4.0 * a)).exp()),
    }
}

/// `c exp(-alpha z.z / 2 + b.z)`, the common shape of the exponential and
/// Gaussian families.
#[derive(Debug, Clone, PartialEq)]
struct GaussExp {
    c: Complex64,
    alpha: f64,
    b: Vec<Complex64>,
}

impl GaussExp {
    fn norm_sq(&self, measure: Measure) -> Result<f64> {
        let (x_axis, p_axis) = measure.axes();
        // |exp(-alpha z^2/2 + b z)|^2 = exp(-alpha x^2 + alpha p^2 + 2 Re b x - 2 Im b p)
        let mut total = self.c.norm_sqr();
        if total == 0.0 {
            return Ok(0.0);
        }
        let fail = || Error::NonIntegrable { measure: measure.name() };
        for bj in &self.b {
            total *= axis_integral(x_axis, self.alpha, 2.0 * bj.re).ok_or_else(fail)?;
            total *= axis_integral(p_axis, -self.alpha, -2.0 * bj.im).ok_or_else(fail)?;
        }
        Ok(total)
    }
}

/// `prefactor * exp(a . x)` with real `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentialFunction {
    pub a: Vec<f64>,
    pub prefactor: Complex64,
}

impl ExponentialFunction {
    pub fn new(a: Vec<f64>, prefactor: Complex64) -> Self {
        ExponentialFunction { a, prefactor }
    }

    fn shape(&self) -> GaussExp {
        GaussExp { c: self.prefactor, alpha: 0.0, b: self.a.iter().map(|&a| Complex64::new(a, 0.0)).collect() }
    }
}

/// `prefactor * exp(-|x - center|^2 / (2 width))`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianFunction {
    pub center: Vec<f64>,
    pub width: f64,
    pub prefactor: Complex64,
}

impl GaussianFunction {
    pub fn new(center: Vec<f64>, width: f64, prefactor: Complex64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::InvalidParams(format!("Gaussian width must be positive, got {width}")));
        }
        Ok(GaussianFunction { center, width, prefactor })
    }

    fn shape(&self) -> GaussExp {
        let m2: f64 = self.center.iter().map(|m| m * m).sum();
        GaussExp {
            c: self.prefactor * (-m2 / (2.0 * self.width)).exp(),
            alpha: 1.0 / self.width,
            b: self.center.iter().map(|&m| Complex64::new(m / self.width, 0.0)).collect(),
        }
    }
}

/// Polynomial `sum c_m z^m` over multi-indices `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialFunction {
    dim: usize,
    terms: BTreeMap<Vec<u32>, Complex64>,
}

impl PolynomialFunction {
    pub fn zero(dim: usize) -> Self {
        PolynomialFunction { dim, terms: BTreeMap::new() }
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Vec<u32>, Complex64)>) -> Result<Self> {
        let mut p = Self::zero(dim);
        for (m, c) in terms {
            if m.len() != dim {
                return Err(Error::ShapeMismatch { expected: dim, found: m.len() });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    /// The coordinate function `x_k`.
    pub fn coordinate(dim: usize, k: usize) -> Self {
        let mut m = vec![0; dim];
        m[k] = 1;
        let mut p = Self::zero(dim);
        p.add_term(m, ONE);
        p
    }

    fn add_term(&mut self, m: Vec<u32>, c: Complex64) {
        let entry = self.terms.entry(m).or_insert(ZERO);
        *entry += c;
        if *entry == ZERO {
            // keep the table free of explicit zeros
            self.terms.retain(|_, v| *v != ZERO);
        }
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Complex64> {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().sum()).max().unwrap_or(0)
    }

    /// Largest exponent of any single variable.
    fn axis_degree(&self) -> u32 {
        self.terms.keys().flat_map(|m| m.iter().copied()).max().unwrap_or(0)
    }

    pub fn laplacian(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for (m, &c) in &self.terms {
            for k in 0..self.dim {
                if m[k] >= 2 {
                    let mut m2 = m.clone();
                    m2[k] -= 2;
                    out.add_term(m2, c * f64::from(m[k] * (m[k] - 1)));
                }
            }
        }
        out
    }

    /// `e^{t Delta / 2}`, a finite sum on polynomials.
    pub fn heat_evolve(&self, t: f64) -> Self {
        let mut out = self.clone();
        let mut term = self.clone();
        let mut k = 1.0;
        while !term.terms.is_empty() {
            term = term.laplacian().scale(Complex64::new(t / (2.0 * k), 0.0));
            for (m, &c) in &term.terms {
                out.add_term(m.clone(), c);
            }
            k += 1.0;
        }
        out
    }

    pub fn scale(&self, a: Complex64) -> Self {
        let mut out = Self::zero(self.dim);
        for (m, &c) in &self.terms {
            out.add_term(m.clone(), c * a);
        }
        out
    }

    pub fn evaluate(&self, z: &[Complex64]) -> Complex64 {
        self.terms.iter().map(|(m, &c)| m.iter().zip(z).fold(c, |acc, (&e, &zk)| acc * zk.powu(e))).sum()
    }

    /// Gauss–Hermite product rule, exact because `|P|^2` has degree at most
    /// `2 axis_degree` in each real variable.
    fn norm_sq(&self, measure: Measure) -> Result<f64> {
        if self.terms.is_empty() {
            return Ok(0.0);
        }
        let (x_axis, p_axis) = measure.axes();
        let sd = |axis: Axis| match axis {
            Axis::Origin => Ok(None),
            Axis::Normal(v) => Ok(Some(v.sqrt())),
            Axis::Lebesgue => Err(Error::NonIntegrable { measure: measure.name() }),
        };
        let (sx, sp) = (sd(x_axis)?, sd(p_axis)?);
        let rule = gauss_hermite_normal(self.axis_degree() as usize + 1);
        let q = rule.len();
        let mut axes: Vec<(f64, bool)> = Vec::new();
        for _ in 0..self.dim {
            if let Some(s) = sx {
                axes.push((s, false));
            }
        }
        for _ in 0..self.dim {
            if let Some(s) = sp {
                axes.push((s, true));
            }
        }
        let total_nodes = q.pow(axes.len() as u32);
        let mut sum = 0.0;
        let mut z = vec![ZERO; self.dim];
        for idx in 0..total_nodes {
            let mut rest = idx;
            let mut w = 1.0;
            z.iter_mut().for_each(|v| *v = ZERO);
            let mut x_count = 0;
            let mut p_count = 0;
            for &(s, imaginary) in &axes {
                let j = rest % q;
                rest /= q;
                w *= rule.weights[j];
                let v = s * rule.nodes[j];
                if imaginary {
                    z[p_count].im = v;
                    p_count += 1;
                } else {
                    z[x_count].re = v;
                    x_count += 1;
                }
            }
            sum += w * self.evaluate(&z).norm_sqr();
        }
        Ok(sum)
    }
}

/// A function in one of the closed-form families.
#[derive(Debug, Clone, PartialEq)]
pub enum FlatFunction {
    Exponential(ExponentialFunction),
    Gaussian(GaussianFunction),
    Polynomial(PolynomialFunction),
}

impl FlatFunction {
    pub fn constant(dim: usize, c: Complex64) -> Self {
        FlatFunction::Exponential(ExponentialFunction::new(vec![0.0; dim], c))
    }

    pub fn dim(&self) -> usize {
        match self {
            FlatFunction::Exponential(f) => f.a.len(),
            FlatFunction::Gaussian(f) => f.center.len(),
            FlatFunction::Polynomial(p) => p.dim,
        }
    }

    /// Value at a complex point; on real points this is the function itself.
    pub fn evaluate(&self, z: &[Complex64]) -> Complex64 {
        match self {
            FlatFunction::Exponential(f) => {
                let az: Complex64 = f.a.iter().zip(z).map(|(a, z)| z * *a).sum();
                f.prefactor * az.exp()
            }
            FlatFunction::Gaussian(f) => {
                let q: Complex64 = f.center.iter().zip(z).map(|(m, z)| (z - m) * (z - m)).sum();
                f.prefactor * (-q / (2.0 * f.width)).exp()
            }
            FlatFunction::Polynomial(p) => p.evaluate(z),
        }
    }

    pub fn evaluate_real(&self, x: &[f64]) -> Complex64 {
        let z: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.evaluate(&z)
    }

    /// `e^{t Delta / 2}` in closed form.
    pub fn heat_evolve(&self, t: f64) -> Self {
        match self {
            FlatFunction::Exponential(f) => {
                let a2: f64 = f.a.iter().map(|a| a * a).sum();
                FlatFunction::Exponential(ExponentialFunction::new(f.a.clone(), f.prefactor * (t * a2 / 2.0).exp()))
            }
            FlatFunction::Gaussian(f) => {
                let d = f.center.len() as f64;
                let w = f.width + t;
                FlatFunction::Gaussian(GaussianFunction {
                    center: f.center.clone(),
                    width: w,
                    prefactor: f.prefactor * (f.width / w).powf(d / 2.0),
                })
            }
            FlatFunction::Polynomial(p) => FlatFunction::Polynomial(p.heat_evolve(t)),
        }
    }

    /// `|F|^2` integrated against `measure`, where `F` is this function
    /// evaluated at `x + i p`.
    pub fn norm_sq(&self, measure: Measure) -> Result<f64> {
        match self {
            FlatFunction::Exponential(f) => f.shape().norm_sq(measure),
            FlatFunction::Gaussian(f) => f.shape().norm_sq(measure),
            FlatFunction::Polynomial(p) => p.norm_sq(measure),
        }
    }

    /// `x -> f(R x + b)` for the exponential and Gaussian families.
    pub fn compose_affine(&self, rotation: &DMatrix<f64>, shift: &[f64]) -> Result<Self> {
        let d = self.dim();
        if rotation.nrows() != d || rotation.ncols() != d || shift.len() != d {
            return Err(Error::ShapeMismatch { expected: d, found: rotation.nrows() });
        }
        match self {
            FlatFunction::Exponential(f) => {
                // a.(Rx + b) = (R^T a).x + a.b
                let rt_a: Vec<f64> = (0..d).map(|j| (0..d).map(|i| rotation[(i, j)] * f.a[i]).sum()).collect();
                let ab: f64 = f.a.iter().zip(shift).map(|(a, b)| a * b).sum();
                Ok(FlatFunction::Exponential(ExponentialFunction::new(rt_a, f.prefactor * ab.exp())))
            }
            FlatFunction::Gaussian(f) => {
                // |Rx + b - m| = |x - R^T (m - b)|
                let center =
                    (0..d).map(|j| (0..d).map(|i| rotation[(i, j)] * (f.center[i] - shift[i])).sum()).collect();
                Ok(FlatFunction::Gaussian(GaussianFunction { center, width: f.width, prefactor: f.prefactor }))
            }
            FlatFunction::Polynomial(_) => Err(Error::InvalidParams(
                "affine composition is implemented for exponential and Gaussian functions".into(),
            )),
        }
    }
}

/// `C_hbar f(z)`: heat evolution for time `hbar`, then continuation to `z`.
pub fn c_transform(f: &FlatFunction, hbar: f64, z: &[Complex64]) -> Complex64 {
    f.heat_evolve(hbar).evaluate(z)
}

/// `S_{s,hbar} f(z)`; the same map as [`c_transform`], independent of `s`.
pub fn s_transform(f: &FlatFunction, params: &MeasureParams, z: &[Complex64]) -> Complex64 {
    c_transform(f, params.hbar(), z)
}

/// The transformed function as an element of its family.
pub fn s_transform_function(f: &FlatFunction, params: &MeasureParams) -> FlatFunction {
    f.heat_evolve(params.hbar())
}

/// `||f||^2` in `L^2(R^d, P_s)`.
pub fn norm_sq_ps(f: &FlatFunction, params: &MeasureParams) -> Result<f64> {
    f.norm_sq(Measure::Gaussian { s: params.s() })
}

/// `||F||^2` in `L^2(C^d, M_{s,hbar})`.
pub fn norm_sq_msh(big_f: &FlatFunction, params: &MeasureParams) -> Result<f64> {
    big_f.norm_sq(Measure::Phase { s: params.s(), hbar: params.hbar() })
}

/// `||F||^2` in `L^2(C^d, nu_hbar)`.
pub fn norm_sq_nu(big_f: &FlatFunction, hbar: f64) -> Result<f64> {
    big_f.norm_sq(Measure::Nu { hbar })
}

/// `||f||^2` in `L^2(R^d, dx)`.
pub fn norm_sq_lebesgue(f: &FlatFunction) -> Result<f64> {
    f.norm_sq(Measure::Lebesgue)
}

fn dot(z: &[Complex64]) -> Complex64 {
    z.iter().map(|v| v * v).sum()
}

/// Bargmann's transform `A f(w)` obtained from `C_1`:
/// `A f(w) = (4 pi)^{d/4} e^{w.w/2} C_1 f(sqrt(2) w)`.
pub fn bargmann_convert(f: &FlatFunction, w: &[Complex64]) -> Complex64 {
    let d = w.len() as f64;
    let scaled: Vec<Complex64> = w.iter().map(|v| v * 2f64.sqrt()).collect();
    (4.0 * PI).powf(d / 4.0) * (dot(w) / 2.0).exp() * c_transform(f, 1.0, &scaled)
}

/// `C_1 f(z) = (4 pi)^{-d/4} e^{-z.z/4} A f(z / sqrt(2))` for any evaluator of `A f`.
pub fn c1_from_bargmann(bargmann: impl Fn(&[Complex64]) -> Complex64, z: &[Complex64]) -> Complex64 {
    let d = z.len() as f64;
    let scaled: Vec<Complex64> = z.iter().map(|v| v / 2f64.sqrt()).collect();
    (4.0 * PI).powf(-d / 4.0) * (-dot(z) / 4.0).exp() * bargmann(&scaled)
}

/// `(e^{t Delta/2} f)(z) = E f(z + sqrt(t) xi)` for an entire `f`, by a
/// Gauss–Hermite product rule of the given order per axis.
pub fn heat_evolve_entire(f: &dyn Fn(&[Complex64]) -> Complex64, t: f64, z: &[Complex64], order: usize) -> Complex64 {
    heat_evolve_with_rule(f, t, z, &gauss_hermite_normal(order))
}

/// [`heat_evolve_entire`] with a prebuilt standard-normal rule.
pub fn heat_evolve_with_rule(f: &dyn Fn(&[Complex64]) -> Complex64, t: f64, z: &[Complex64], rule: &Rule) -> Complex64 {
    let d = z.len();
    let q = rule.len();
    let scale = t.sqrt();
    let mut shifted = z.to_vec();
    let mut sum = ZERO;
    let mut total_weight = 0.0;
    for idx in 0..q.pow(d as u32) {
        let mut rest = idx;
        let mut w = 1.0;
        for k in 0..d {
            let j = rest % q;
            rest /= q;
            w *= rule.weights[j];
            shifted[k] = z[k] + scale * rule.nodes[j];
        }
        sum += f(&shifted) * w;
        total_weight += w;
    }
    // Dividing by the realised weight sum keeps constants exactly fixed.
    sum / total_weight
}

/// Monte Carlo `E_{P_s} |f|^2` for a black-box `f`.
pub fn mc_norm_sq_ps(
    f: &(dyn Fn(&[f64]) -> Complex64 + Sync),
    params: &MeasureParams,
    samples: u64,
    seq: &SeedSequence,
) -> Estimate {
    let sd = params.s().sqrt();
    let d = params.dim();
    sample_mean(seq, samples, 1, |rng, _, out| {
        let x: Vec<f64> = (0..d)
            .map(|_| {
                let v: f64 = StandardNormal.sample(rng);
                sd * v
            })
            .collect();
        out[0] = f(&x).norm_sqr();
    })
    .estimate(0)
}

/// Monte Carlo `E_{M_{s,hbar}} |F|^2` for a black-box holomorphic `F`.
pub fn mc_norm_sq_msh(
    big_f: &(dyn Fn(&[Complex64]) -> Complex64 + Sync),
    params: &MeasureParams,
    samples: u64,
    seq: &SeedSequence,
) -> Estimate {
    let (sx, sp) = ((params.r() / 2.0).sqrt(), (params.hbar() / 2.0).sqrt());
    let d = params.dim();
    sample_mean(seq, samples, 1, |rng, _, out| {
        let z: Vec<Complex64> = (0..d)
            .map(|_| {
                let x: f64 = StandardNormal.sample(rng);
                let p: f64 = StandardNormal.sample(rng);
                Complex64::new(sx * x, sp * p)
            })
            .collect();
        out[0] = big_f(&z).norm_sqr();
    })
    .estimate(0)
}

/// Gauss–Hermite order used to transform black-box functions.
pub const BLACK_BOX_ORDER: usize = 32;

/// Monte Carlo isometry check for an entire black-box `f`: estimates
/// `||f||^2_{P_s}` and `||S f||^2_{M_{s,hbar}}` from independent streams,
/// where `S f` is computed from `f` by Gauss–Hermite heat evolution, and
/// reports the z-score of their difference. With `oracle`, each side is also
/// compared against the exact value.
pub fn mc_isometry_check(
    name: &str,
    f: &(dyn Fn(&[Complex64]) -> Complex64 + Sync),
    params: &MeasureParams,
    samples: u64,
    seed: u64,
    oracle: Option<f64>,
) -> VerificationReport {
    let seq = SeedSequence::new(seed, "flat-isometry").child(name);
    let real_f = |x: &[f64]| {
        let z: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        f(&z)
    };
    let hbar = params.hbar();
    let rule = gauss_hermite_normal(BLACK_BOX_ORDER);
    let transformed = |z: &[Complex64]| heat_evolve_with_rule(f, hbar, z, &rule);
    let lhs = mc_norm_sq_ps(&real_f, params, samples, &seq.child("position"));
    let rhs = mc_norm_sq_msh(&transformed, params, samples, &seq.child("phase"));

    let mut report = VerificationReport::new("flat-isometry", seed);
    report
        .input("function", name)
        .input("dim", params.dim())
        .input("s", params.s())
        .input("hbar", params.hbar())
        .input("samples", samples);
    let spread = lhs.stderr.hypot(rhs.stderr);
    report.push(CheckRow::z_score(format!("{name}: norm_sq_Ps - norm_sq_Msh"), lhs.mean - rhs.mean, 0.0, spread, 4.0));
    if let Some(target) = oracle {
        report.push(CheckRow::from_estimate(format!("{name}: norm_sq_Ps"), &lhs, target, 4.0));
        report.push(CheckRow::from_estimate(format!("{name}: norm_sq_Msh"), &rhs, target, 4.0));
    }
    report
}
