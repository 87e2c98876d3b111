//! Lattice connections on the spatial circle.
//!
//! The circle `[0, 1]` is cut into `N` links; link `k` joins site `k` to site
//! `k + 1` and carries a value `A_k` in `su(2)`, with parallel transporter
//! `U_k = exp(A_k / N)`. The norm is the Riemann sum
//! `||A||^2 = (1/N) sum_k |A_k|^2`, so the orthonormal coordinates are the
//! components of `A_k / sqrt(N)`.
//!
//! Conventions, locked by tests:
//!
//! * Holonomy multiplies later links on the left, `h = U_{N-1} ... U_0`, so it
//!   solves `h' = A h` in the continuum.
//! * A gauge transform with site values `g_0, ..., g_N` acts on links by
//!   `U_k -> g_{k+1} U_k g_k^{-1}`, giving `h -> g_N h g_0^{-1}`. Based loops
//!   leave `h` unchanged and a path with `g_0 = e` sends `h` to `g_N h`. The
//!   continuum limit of the link action is `A -> g A g^{-1} + g' g^{-1}`.
//!
//! Gaussian measures. `P_s` has density proportional to `exp(-||A||^2 / 2s)`,
//! so each orthonormal coordinate is `N(0, s)` and each link component is
//! `N(0, N s)`. The increments `A_k / N` are then `N(0, s/N)`, the holonomy is
//! a random walk whose law tends to the heat kernel at time `s`, and
//! `E ||A||^2 = 3 N s` while the quadratic variation
//! `sum_k |A_k / N|^2` has mean `3 s` for every `N`. Likewise under
//! `M_{s,hbar}` the real parts of the link components are `N(0, N r / 2)` and
//! the imaginary parts `N(0, N hbar / 2)`.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::group::{
    exp_complex, exp_group, log_complex, log_group, AlgebraVector, AsMatrix, ComplexAlgebraVector, ComplexGroupElement,
    GroupElement,
};
use crate::haar::haar_sample;
use crate::harmonic::{casimir, characters_from_trace};
use crate::mc::{sample_mean, ComplexEstimate, Moments};
use crate::quadrature::gauss_legendre_on;
use crate::report::{CheckRow, VerificationReport};
use crate::rng::SeedSequence;

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

fn normal_vector<R: Rng + ?Sized>(rng: &mut R, sd: f64) -> AlgebraVector {
    AlgebraVector([sd * normal(rng), sd * normal(rng), sd * normal(rng)])
}

/// `N` link values in `su(2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeConnection {
    links: Vec<AlgebraVector>,
}

impl LatticeConnection {
    pub fn new(links: Vec<AlgebraVector>) -> Result<Self> {
        if links.is_empty() {
            return Err(Error::InvalidParams("a lattice connection needs at least one link".into()));
        }
        Ok(LatticeConnection { links })
    }

    pub fn zero(n: usize) -> Self {
        Self::constant(n, AlgebraVector::ZERO)
    }

    pub fn constant(n: usize, x: AlgebraVector) -> Self {
        assert!(n >= 1, "a lattice connection needs at least one link");
        LatticeConnection { links: vec![x; n] }
    }

    /// Connection with `U_k = exp(A_k / N)` equal to the given transporters,
    /// using the principal logarithm.
    pub fn from_transporters(transporters: &[GroupElement]) -> Result<Self> {
        let n = transporters.len() as f64;
        let links = transporters.iter().map(|u| log_group(u).map(|x| x * n)).collect::<Result<Vec<_>>>()?;
        Self::new(links)
    }

    pub fn n(&self) -> usize {
        self.links.len()
    }

    pub fn links(&self) -> &[AlgebraVector] {
        &self.links
    }

    /// `||A||^2 = (1/N) sum_k |A_k|^2`.
    pub fn norm_sq(&self) -> f64 {
        self.links.iter().map(AlgebraVector::norm_sq).sum::<f64>() / self.n() as f64
    }

    /// `sum_k |A_k / N|^2`.
    pub fn quadratic_variation(&self) -> f64 {
        let n = self.n() as f64;
        self.links.iter().map(AlgebraVector::norm_sq).sum::<f64>() / (n * n)
    }

    /// `||A - B||` in the Riemann-sum norm.
    pub fn l2_distance(&self, other: &Self) -> Result<f64> {
        check_shape(self.n(), other.n())?;
        let n = self.n() as f64;
        Ok((self.links.iter().zip(&other.links).map(|(a, b)| (*a - *b).norm_sq()).sum::<f64>() / n).sqrt())
    }

    /// Distance between the transporter configurations,
    /// `d^2 = N sum_k |log(U_k^{-1} V_k)|^2`, invariant under gauge and path
    /// transforms and equal to `||A - B||` to leading order when the links
    /// are close.
    pub fn link_distance(&self, other: &Self) -> Result<f64> {
        check_shape(self.n(), other.n())?;
        let (u, v) = (self.transporters(), other.transporters());
        let sum: f64 = u.iter().zip(&v).map(|(a, b)| (a.inverse() * *b).distance_from_identity().powi(2)).sum();
        Ok((self.n() as f64 * sum).sqrt())
    }

    /// `U_k = exp(A_k / N)`.
    pub fn transporters(&self) -> Vec<GroupElement> {
        let inv = 1.0 / self.n() as f64;
        self.links.iter().map(|a| exp_group(&(*a * inv))).collect()
    }

    /// Orthonormal coordinates `A_{k,a} / sqrt(N)`, link-major.
    pub fn coordinates(&self) -> Vec<f64> {
        let scale = 1.0 / (self.n() as f64).sqrt();
        self.links.iter().flat_map(|a| a.0.map(|c| c * scale)).collect()
    }

    pub fn from_coordinates(coords: &[f64]) -> Result<Self> {
        if coords.is_empty() || !coords.len().is_multiple_of(3) {
            return Err(Error::ShapeMismatch { expected: 3 * (coords.len() / 3).max(1), found: coords.len() });
        }
        let n = coords.len() / 3;
        let scale = (n as f64).sqrt();
        Self::new(coords.chunks_exact(3).map(|c| AlgebraVector([c[0] * scale, c[1] * scale, c[2] * scale])).collect())
    }

    pub fn complexify(&self) -> ComplexLatticeConnection {
        ComplexLatticeConnection { links: self.links.iter().map(AlgebraVector::complexify).collect() }
    }

    pub fn add_scaled(&self, other: &Self, t: f64) -> Result<Self> {
        check_shape(self.n(), other.n())?;
        Ok(LatticeConnection { links: self.links.iter().zip(&other.links).map(|(a, b)| *a + *b * t).collect() })
    }

    /// Each link split into `factor` equal links. The link values are unchanged
    /// because `exp(A / (f N))^f = exp(A / N)`, so the holonomy is preserved.
    pub fn split_links(&self, factor: usize) -> Self {
        assert!(factor >= 1);
        LatticeConnection { links: self.links.iter().flat_map(|a| std::iter::repeat_n(*a, factor)).collect() }
    }
}

/// `N` link values in `sl(2, C)`, `Z_k = A_k + i P_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexLatticeConnection {
    links: Vec<ComplexAlgebraVector>,
}

impl ComplexLatticeConnection {
    pub fn new(links: Vec<ComplexAlgebraVector>) -> Result<Self> {
        if links.is_empty() {
            return Err(Error::InvalidParams("a lattice connection needs at least one link".into()));
        }
        Ok(ComplexLatticeConnection { links })
    }

    pub fn zero(n: usize) -> Self {
        Self::constant(n, ComplexAlgebraVector::ZERO)
    }

    pub fn constant(n: usize, z: ComplexAlgebraVector) -> Self {
        assert!(n >= 1, "a lattice connection needs at least one link");
        ComplexLatticeConnection { links: vec![z; n] }
    }

    pub fn from_parts(re: &LatticeConnection, im: &LatticeConnection) -> Result<Self> {
        check_shape(re.n(), im.n())?;
        Ok(ComplexLatticeConnection {
            links: re.links.iter().zip(&im.links).map(|(a, p)| ComplexAlgebraVector::from_parts(a, p)).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.links.len()
    }

    pub fn links(&self) -> &[ComplexAlgebraVector] {
        &self.links
    }

    pub fn re(&self) -> LatticeConnection {
        LatticeConnection { links: self.links.iter().map(ComplexAlgebraVector::re).collect() }
    }

    pub fn im(&self) -> LatticeConnection {
        LatticeConnection { links: self.links.iter().map(ComplexAlgebraVector::im).collect() }
    }

    pub fn transporters(&self) -> Vec<ComplexGroupElement> {
        let inv = 1.0 / self.n() as f64;
        self.links.iter().map(|z| exp_complex(&(*z * inv))).collect()
    }

    /// `Z + W` for a real connection `W`.
    pub fn shift_real(&self, w: &LatticeConnection) -> Result<Self> {
        check_shape(self.n(), w.n())?;
        Ok(ComplexLatticeConnection {
            links: self.links.iter().zip(&w.links).map(|(z, a)| *z + a.complexify()).collect(),
        })
    }

    pub fn from_transporters(transporters: &[ComplexGroupElement]) -> Result<Self> {
        let n = transporters.len() as f64;
        let links = transporters.iter().map(|u| log_complex(u).map(|z| z * n)).collect::<Result<Vec<_>>>()?;
        Self::new(links)
    }
}

fn check_shape(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::ShapeMismatch { expected, found });
    }
    Ok(())
}

fn ordered_product<M: Copy + std::ops::Mul<Output = M>>(items: &[M], identity: M) -> M {
    items.iter().fold(identity, |h, u| *u * h)
}

/// `h(A) = U_{N-1} ... U_1 U_0`.
pub fn holonomy(a: &LatticeConnection) -> GroupElement {
    ordered_product(&a.transporters(), GroupElement::identity())
}

/// Holonomy of a complex connection, in `SL(2, C)`.
pub fn holonomy_complex(z: &ComplexLatticeConnection) -> ComplexGroupElement {
    ordered_product(&z.transporters(), ComplexGroupElement::identity())
}

/// Whether a transform is required to return to the identity at the end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaugeKind {
    /// `g_0 = g_N = e`.
    BasedLoop,
    /// `g_0 = e`, `g_N` free.
    Path,
}

/// Site values `g_0, ..., g_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeGaugeTransform<G = GroupElement> {
    sites: Vec<G>,
    kind: GaugeKind,
}

/// Tolerance for the endpoint constraints of a gauge transform.
pub const ENDPOINT_TOLERANCE: f64 = 1e-12;

fn endpoint_defect<G: AsMatrix>(g: &G) -> f64 {
    (g.as_matrix() - crate::group::CMatrix2::identity()).norm()
}

impl<G: AsMatrix + Copy> LatticeGaugeTransform<G> {
    fn checked(sites: Vec<G>, kind: GaugeKind) -> Result<Self> {
        if sites.len() < 2 {
            return Err(Error::InvalidParams("a gauge transform needs at least two sites".into()));
        }
        let first = endpoint_defect(&sites[0]);
        if first > ENDPOINT_TOLERANCE {
            return Err(Error::InvalidParams(format!("g_0 must be the identity (defect {first:e})")));
        }
        if kind == GaugeKind::BasedLoop {
            let last = endpoint_defect(sites.last().expect("nonempty"));
            if last > ENDPOINT_TOLERANCE {
                return Err(Error::InvalidParams(format!("based loop must end at the identity (defect {last:e})")));
            }
        }
        Ok(LatticeGaugeTransform { sites, kind })
    }

    /// Based loop from `N + 1` site values.
    pub fn based_loop(sites: Vec<G>) -> Result<Self> {
        Self::checked(sites, GaugeKind::BasedLoop)
    }

    /// Path-group element from `N + 1` site values.
    pub fn path(sites: Vec<G>) -> Result<Self> {
        Self::checked(sites, GaugeKind::Path)
    }

    pub fn sites(&self) -> &[G] {
        &self.sites
    }

    pub fn kind(&self) -> GaugeKind {
        self.kind
    }

    /// Number of links it acts on.
    pub fn n(&self) -> usize {
        self.sites.len() - 1
    }

    pub fn endpoint(&self) -> G {
        *self.sites.last().expect("nonempty")
    }
}

impl LatticeGaugeTransform<GroupElement> {
    pub fn identity(n: usize) -> Self {
        LatticeGaugeTransform { sites: vec![GroupElement::identity(); n + 1], kind: GaugeKind::BasedLoop }
    }

    /// Based loop with independent Haar-random interior sites.
    pub fn random_based_loop<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut sites: Vec<GroupElement> = (0..=n).map(|_| haar_sample(rng)).collect();
        sites[0] = GroupElement::identity();
        sites[n] = GroupElement::identity();
        LatticeGaugeTransform { sites, kind: GaugeKind::BasedLoop }
    }

    /// Path with Haar-random sites after the first.
    pub fn random_path<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut sites: Vec<GroupElement> = (0..=n).map(|_| haar_sample(rng)).collect();
        sites[0] = GroupElement::identity();
        LatticeGaugeTransform { sites, kind: GaugeKind::Path }
    }

    /// Sites `g(k/N)` of a smooth map `tau -> g(tau)`.
    pub fn sample_smooth(n: usize, kind: GaugeKind, g: impl Fn(f64) -> GroupElement) -> Result<Self> {
        Self::checked((0..=n).map(|k| g(k as f64 / n as f64)).collect(), kind)
    }

    pub fn complexify(&self) -> LatticeGaugeTransform<ComplexGroupElement> {
        LatticeGaugeTransform { sites: self.sites.iter().map(GroupElement::complexify).collect(), kind: self.kind }
    }
}

fn act_real(g: &LatticeGaugeTransform<GroupElement>, a: &LatticeConnection) -> Result<LatticeConnection> {
    check_shape(g.n(), a.n())?;
    let u = a.transporters();
    let moved: Vec<GroupElement> = (0..a.n()).map(|k| g.sites[k + 1] * u[k] * g.sites[k].inverse()).collect();
    LatticeConnection::from_transporters(&moved)
}

/// Action of a based loop: `U_k -> g_{k+1} U_k g_k^{-1}`. Holonomy is preserved.
pub fn gauge_act(g: &LatticeGaugeTransform, a: &LatticeConnection) -> Result<LatticeConnection> {
    if g.kind != GaugeKind::BasedLoop {
        return Err(Error::InvalidParams("gauge_act needs a based loop; use path_group_act for paths".into()));
    }
    act_real(g, a)
}

/// Action of a path (`g_0 = e`, `g_N` free) by the same formula. The holonomy
/// changes to `g_N h(A)`.
pub fn path_group_act(g: &LatticeGaugeTransform, a: &LatticeConnection) -> Result<LatticeConnection> {
    act_real(g, a)
}

/// Action of a `K`- or `K_C`-valued transform on a complex connection,
/// `U_k -> g_{k+1} U_k g_k^{-1}` with the principal complex logarithm.
pub fn complex_gauge_act<G: AsMatrix + Copy>(
    g: &LatticeGaugeTransform<G>,
    z: &ComplexLatticeConnection,
) -> Result<ComplexLatticeConnection> {
    check_shape(g.n(), z.n())?;
    let u = z.transporters();
    let site = |k: usize| ComplexGroupElement::from_matrix_unchecked(*g.sites[k].as_matrix());
    let moved: Vec<ComplexGroupElement> = (0..z.n()).map(|k| site(k + 1) * u[k] * site(k).inverse()).collect();
    ComplexLatticeConnection::from_transporters(&moved)
}

/// Phase-space point `(A, P)` of the free theory, stored as a base point,
/// a momentum and the elapsed time so that flows compose exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalState {
    base: LatticeConnection,
    momentum: LatticeConnection,
    elapsed: f64,
}

impl ClassicalState {
    pub fn new(a: LatticeConnection, p: LatticeConnection) -> Result<Self> {
        check_shape(a.n(), p.n())?;
        Ok(ClassicalState { base: a, momentum: p, elapsed: 0.0 })
    }

    /// `A(t) = A_0 + t P_0`.
    pub fn position(&self) -> LatticeConnection {
        self.base.add_scaled(&self.momentum, self.elapsed).expect("shapes fixed at construction")
    }

    pub fn momentum(&self) -> &LatticeConnection {
        &self.momentum
    }

    pub fn elapsed(&self) -> f64 {
        self.elapsed
    }

    /// `H = ||P||^2 / 2`.
    pub fn energy(&self) -> f64 {
        0.5 * self.momentum.norm_sq()
    }

    /// `Z = A + i P`.
    pub fn complex_point(&self) -> ComplexLatticeConnection {
        ComplexLatticeConnection::from_parts(&self.position(), &self.momentum).expect("shapes fixed at construction")
    }
}

/// Free flow `(A, P) -> (A + t P, P)`.
pub fn free_flow(state: &ClassicalState, t: f64) -> ClassicalState {
    ClassicalState { base: state.base.clone(), momentum: state.momentum.clone(), elapsed: state.elapsed + t }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::InvalidParams(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

/// A draw from `P_s` on `N` links.
pub fn sample_ps<R: Rng + ?Sized>(n: usize, s: f64, rng: &mut R) -> Result<LatticeConnection> {
    check_positive("s", s)?;
    if n == 0 {
        return Err(Error::InvalidParams("N must be at least 1".into()));
    }
    let sd = (n as f64 * s).sqrt();
    LatticeConnection::new((0..n).map(|_| normal_vector(rng, sd)).collect())
}

/// A draw from `M_{s,hbar}` on `N` links.
pub fn sample_msh<R: Rng + ?Sized>(n: usize, s: f64, hbar: f64, rng: &mut R) -> Result<ComplexLatticeConnection> {
    check_positive("hbar", hbar)?;
    check_positive("s", s)?;
    if 2.0 * s <= hbar {
        return Err(Error::InvalidParams(format!("need s > hbar/2, got s = {s}, hbar = {hbar}")));
    }
    if n == 0 {
        return Err(Error::InvalidParams("N must be at least 1".into()));
    }
    let nf = n as f64;
    let (sx, sp) = ((nf * (2.0 * s - hbar) / 2.0).sqrt(), (nf * hbar / 2.0).sqrt());
    ComplexLatticeConnection::new(
        (0..n)
            .map(|_| {
                let re = normal_vector(rng, sx);
                let im = normal_vector(rng, sp);
                ComplexAlgebraVector::from_parts(&re, &im)
            })
            .collect(),
    )
}

/// Sample `i` of a seeded `P_s` ensemble, drawn from substream `i`.
pub fn sample_ps_seeded(n: usize, s: f64, seed: u64, index: u64) -> Result<LatticeConnection> {
    sample_ps(n, s, &mut SeedSequence::new(seed, "lattice-ps").stream(index))
}

/// Sample `i` of a seeded `M_{s,hbar}` ensemble.
pub fn sample_msh_seeded(n: usize, s: f64, hbar: f64, seed: u64, index: u64) -> Result<ComplexLatticeConnection> {
    sample_msh(n, s, hbar, &mut SeedSequence::new(seed, "lattice-msh").stream(index))
}

fn write_csv_err(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

/// One CSV row per connection: index, the `3N` link components, then the
/// real and imaginary parts of the four holonomy entries.
pub fn write_ensemble_csv<W: Write>(out: W, ensemble: &[(u64, LatticeConnection)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let n = ensemble.first().map_or(0, |(_, a)| a.n());
    let mut header = vec!["index".to_string()];
    for k in 0..n {
        for a in 1..=3 {
            header.push(format!("link{k}_{a}"));
        }
    }
    for e in ["h11", "h12", "h21", "h22"] {
        header.push(format!("{e}_re"));
        header.push(format!("{e}_im"));
    }
    w.write_record(&header).map_err(write_csv_err)?;
    for (i, a) in ensemble {
        check_shape(n, a.n())?;
        let h = holonomy(a);
        let mut row = vec![i.to_string()];
        row.extend(a.links.iter().flat_map(|v| v.0).map(|c| c.to_string()));
        for z in h.matrix().iter_rows() {
            row.push(z.re.to_string());
            row.push(z.im.to_string());
        }
        w.write_record(&row).map_err(write_csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// As [`write_ensemble_csv`] for complex connections: `6N` link columns
/// (real and imaginary parts) and the complex holonomy.
pub fn write_complex_ensemble_csv<W: Write>(out: W, ensemble: &[(u64, ComplexLatticeConnection)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let n = ensemble.first().map_or(0, |(_, z)| z.n());
    let mut header = vec!["index".to_string()];
    for k in 0..n {
        for a in 1..=3 {
            header.push(format!("link{k}_{a}_re"));
            header.push(format!("link{k}_{a}_im"));
        }
    }
    for e in ["h11", "h12", "h21", "h22"] {
        header.push(format!("{e}_re"));
        header.push(format!("{e}_im"));
    }
    w.write_record(&header).map_err(write_csv_err)?;
    for (i, z) in ensemble {
        check_shape(n, z.n())?;
        let h = holonomy_complex(z);
        let mut row = vec![i.to_string()];
        for v in &z.links {
            for c in v.0 {
                row.push(c.re.to_string());
                row.push(c.im.to_string());
            }
        }
        for e in h.matrix().iter_rows() {
            row.push(e.re.to_string());
            row.push(e.im.to_string());
        }
        w.write_record(&row).map_err(write_csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Row-major iteration over a 2x2 matrix.
trait RowMajor {
    fn iter_rows(&self) -> [Complex64; 4];
}

impl RowMajor for crate::group::CMatrix2 {
    fn iter_rows(&self) -> [Complex64; 4] {
        [self[(0, 0)], self[(0, 1)], self[(1, 0)], self[(1, 1)]]
    }
}

/// `E[chi_n(exp X)] / n` for `X ~ N(0, var I_3)` in algebra coordinates, by
/// quadrature over the Maxwell-distributed length `|X|`; the eigen-angle of
/// `exp X` is `|X| / 2`.
pub fn link_character_mean(n: usize, var: f64) -> f64 {
    let sd = var.sqrt();
    let rule = gauss_legendre_on(200, 0.0, 14.0 * sd);
    let norm = (2.0 / PI).sqrt() / (sd * sd * sd);
    rule.integrate(|rho| {
        let theta = 0.5 * rho;
        let chi = if theta.sin().abs() < 1e-12 { n as f64 } else { (n as f64 * theta).sin() / theta.sin() };
        norm * rho * rho * (-rho * rho / (2.0 * var)).exp() * chi
    }) / n as f64
}

/// Exact lattice value of `E_{P_s}[chi_n(h(A))]` on `N` links,
/// `n m^N` with `m` from [`link_character_mean`]; tends to `n e^{-s c(n)/2}`.
pub fn pushforward_moment_exact(n: usize, s: f64, links: usize) -> f64 {
    n as f64 * link_character_mean(n, s / links as f64).powi(links as i32)
}

/// Empirical `E_{P_s}[chi_n(h(A))]` for `n = 1..=max_dim` from one ensemble.
pub fn pushforward_moments(links: usize, s: f64, max_dim: usize, samples: u64, seed: u64) -> Result<Moments> {
    check_positive("s", s)?;
    let seq = SeedSequence::new(seed, "pushforward").child(&format!("N={links},s={s}"));
    Ok(sample_mean(&seq, samples, max_dim, |rng, _, out| {
        let a = sample_ps(links, s, rng).expect("validated parameters");
        let chi = characters_from_trace(holonomy(&a).trace(), max_dim);
        for (o, c) in out.iter_mut().zip(chi) {
            *o = c.re;
        }
    }))
}

/// Central-difference Laplacian over all `3N` orthonormal coordinates:
/// coordinate `x_{k,a}` moves by `eta`, i.e. `A_{k,a}` by `sqrt(N) eta`.
pub fn lattice_laplacian(f: &dyn Fn(&LatticeConnection) -> f64, a: &LatticeConnection, eta: f64) -> f64 {
    let step = (a.n() as f64).sqrt() * eta;
    let f0 = f(a);
    let mut work = a.clone();
    let mut sum = 0.0;
    for k in 0..a.n() {
        for c in 0..3 {
            let orig = work.links[k].0[c];
            work.links[k].0[c] = orig + step;
            let plus = f(&work);
            work.links[k].0[c] = orig - step;
            let minus = f(&work);
            work.links[k].0[c] = orig;
            sum += plus + minus - 2.0 * f0;
        }
    }
    sum / (eta * eta)
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Relative deviations of the lattice Laplacian of `chi_n o h` from
/// `(Delta_K chi_n)(h)`, for each connection (outer) and each `N` (inner).
/// Deviations are normalised by `c(n) n`, the supremum of `|Delta_K chi_n|`,
/// because `chi_n(h)` itself may vanish.
pub fn laplacian_deviations(
    n: usize,
    connections: &[FourierConnection],
    lattice_sizes: &[usize],
    eta: f64,
) -> Vec<Vec<f64>> {
    let c = casimir(n);
    let f = move |b: &LatticeConnection| characters_from_trace(holonomy(b).trace(), n)[n - 1].re;
    connections
        .iter()
        .map(|conn| {
            lattice_sizes
                .iter()
                .map(|&links| {
                    let a = conn.discretize(links);
                    let exact = -c * f(&a);
                    (lattice_laplacian(&f, &a, eta) - exact).abs() / (c * n as f64)
                })
                .collect()
        })
        .collect()
}

/// Convergence of the lattice Laplacian on functions of the holonomy to the
/// group Laplacian. Reports, per character: the empirical order (slope of the
/// mean deviation in `1/N`), the mean relative deviation at the finest `N`,
/// and how many connections end up worse at the finest `N` than at the coarsest.
#[allow(clippy::too_many_arguments)]
pub fn laplacian_reduction_study(
    dims: &[usize],
    connections: usize,
    amplitude: f64,
    modes: usize,
    lattice_sizes: &[usize],
    eta: f64,
    seed: u64,
    min_order: f64,
    max_relative: f64,
) -> Result<VerificationReport> {
    check_positive("eta", eta)?;
    if lattice_sizes.len() < 2 || lattice_sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParams("need at least two increasing lattice sizes".into()));
    }
    let seq = SeedSequence::new(seed, "laplacian-connections");
    let conns: Vec<FourierConnection> =
        (0..connections as u64).map(|i| FourierConnection::random(&mut seq.stream(i), modes, amplitude)).collect();
    let mut report = VerificationReport::new("laplacian-reduction", seed);
    report
        .input("dims", dims.iter().map(usize::to_string).collect::<Vec<_>>().join(" "))
        .input("connections", connections)
        .input("amplitude", amplitude)
        .input("modes", modes)
        .input("N", lattice_sizes.iter().map(usize::to_string).collect::<Vec<_>>().join(" "))
        .input("eta", eta);
    let sizes: Vec<f64> = lattice_sizes.iter().map(|&n| n as f64).collect();
    for &n in dims {
        let dev = laplacian_deviations(n, &conns, lattice_sizes, eta);
        let mean: Vec<f64> =
            (0..lattice_sizes.len()).map(|j| dev.iter().map(|d| d[j]).sum::<f64>() / dev.len() as f64).collect();
        let order = -log_log_slope(&sizes, &mean);
        report.push(CheckRow::at_least(format!("chi{n}: empirical order in 1/N"), order, min_order));
        let finest = *lattice_sizes.last().expect("nonempty");
        report.push(CheckRow::at_most(
            format!("chi{n}: mean relative deviation at N={finest}"),
            *mean.last().expect("nonempty"),
            max_relative,
        ));
        let worst = dev.iter().map(|d| *d.last().expect("nonempty")).fold(0.0, f64::max);
        report.push(CheckRow::at_most(format!("chi{n}: max relative deviation at N={finest}"), worst, max_relative));
        let coarsest = lattice_sizes[0];
        let not_improving = dev.iter().filter(|d| d.last() > d.first()).count();
        report.push(CheckRow::at_most(
            format!("chi{n}: connections worse at N={finest} than at N={coarsest}"),
            not_improving as f64,
            0.0,
        ));
    }
    Ok(report)
}

/// Default finite-difference step for [`lattice_laplacian`].
pub const DEFAULT_LAPLACIAN_STEP: f64 = 1e-3;

/// Monte Carlo `e^{hbar Delta / 2}` followed by continuation: the mean of
/// `F(Z + W)` with each orthonormal coordinate of `W` distributed `N(0, hbar)`.
/// With `antithetic`, each sample averages `W` and `-W`.
pub fn heat_evolve_mc(
    f: &(dyn Fn(&ComplexLatticeConnection) -> Complex64 + Sync),
    z: &ComplexLatticeConnection,
    hbar: f64,
    samples: u64,
    seed: u64,
    antithetic: bool,
) -> Result<ComplexEstimate> {
    check_positive("hbar", hbar)?;
    let seq = SeedSequence::new(seed, "heat-evolve");
    Ok(heat_evolve_mc_with(f, z, hbar, samples, &seq, antithetic))
}

/// Real shift with every link component `N(0, sd^2)`.
pub(crate) fn sample_shift<R: Rng + ?Sized>(n: usize, sd: f64, rng: &mut R) -> LatticeConnection {
    LatticeConnection { links: (0..n).map(|_| normal_vector(rng, sd)).collect() }
}

fn heat_evolve_mc_with(
    f: &(dyn Fn(&ComplexLatticeConnection) -> Complex64 + Sync),
    z: &ComplexLatticeConnection,
    hbar: f64,
    samples: u64,
    seq: &SeedSequence,
    antithetic: bool,
) -> ComplexEstimate {
    let n = z.n();
    let sd = (n as f64 * hbar).sqrt();
    sample_mean(seq, samples, 2, |rng, _, out| {
        let w = sample_shift(n, sd, rng);
        let mut v = f(&z.shift_real(&w).expect("same N"));
        if antithetic {
            let minus = LatticeConnection { links: w.links.iter().map(|x| -*x).collect() };
            v = 0.5 * (v + f(&z.shift_real(&minus).expect("same N")));
        }
        out[0] = v.re;
        out[1] = v.im;
    })
    .complex_estimate(0)
}

/// A smooth connection `A(tau) = c_0 + sum_m (a_m cos 2 pi m tau + b_m sin 2 pi m tau)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierConnection {
    pub constant: AlgebraVector,
    pub modes: Vec<(AlgebraVector, AlgebraVector)>,
}

impl FourierConnection {
    /// Coefficients `N(0, amplitude^2 / (1 + m)^2)`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, modes: usize, amplitude: f64) -> Self {
        FourierConnection {
            constant: normal_vector(rng, amplitude),
            modes: (1..=modes)
                .map(|m| {
                    let sd = amplitude / (1.0 + m as f64);
                    (normal_vector(rng, sd), normal_vector(rng, sd))
                })
                .collect(),
        }
    }

    pub fn value(&self, tau: f64) -> AlgebraVector {
        self.modes.iter().enumerate().fold(self.constant, |acc, (i, (a, b))| {
            let w = 2.0 * PI * (i + 1) as f64 * tau;
            acc + *a * w.cos() + *b * w.sin()
        })
    }

    /// Midpoint samples on `N` links.
    pub fn discretize(&self, n: usize) -> LatticeConnection {
        LatticeConnection { links: (0..n).map(|k| self.value((k as f64 + 0.5) / n as f64)).collect() }
    }
}

/// Radial test profile for [`submersion_demo`]: `f`, and optionally the exact
/// 2D Laplacian of `f(|x|)` at a radius.
pub struct RadialProfile<'a> {
    pub name: &'a str,
    pub f: &'a dyn Fn(f64) -> f64,
    pub exact_laplacian: Option<&'a dyn Fn(f64) -> f64>,
}

/// Built-in radial profiles by name: `r2`, `r3`, `log`, `gauss`.
pub fn radial_profile(name: &str) -> Option<RadialProfile<'static>> {
    fn r2(r: f64) -> f64 {
        r * r
    }
    fn r2_lap(_: f64) -> f64 {
        4.0
    }
    fn r3(r: f64) -> f64 {
        r * r * r
    }
    fn r3_lap(r: f64) -> f64 {
        9.0 * r
    }
    fn log(r: f64) -> f64 {
        r.ln()
    }
    fn log_lap(_: f64) -> f64 {
        0.0
    }
    fn gauss(r: f64) -> f64 {
        (-r * r / 2.0).exp()
    }
    fn gauss_lap(r: f64) -> f64 {
        (r * r - 2.0) * (-r * r / 2.0).exp()
    }
    type Radial = &'static dyn Fn(f64) -> f64;
    let (name, f, lap): (&'static str, Radial, Radial) = match name {
        "r2" => ("r2", &r2, &r2_lap),
        "r3" => ("r3", &r3, &r3_lap),
        "log" => ("log", &log, &log_lap),
        "gauss" => ("gauss", &gauss, &gauss_lap),
        _ => return None,
    };
    Some(RadialProfile { name, f, exact_laplacian: Some(lap) })
}

/// Central-difference step for [`submersion_demo`]: truncation `O(h^2)` and
/// rounding `O(eps / h^2)` balance near `eps^(1/4)`.
pub const DEFAULT_SUBMERSION_STEP: f64 = 1e-4;

/// Finite-difference comparison of three expressions for the Laplacian of a
/// radial function on the plane at radius `r0`: the Cartesian 5-point stencil,
/// `f'' + f'/r`, and `f''` plus the orbit-volume correction
/// `(d/dr log(2 pi r)) f'`.
pub fn submersion_demo(profile: &RadialProfile, r0: f64, step: f64, tolerance: f64) -> Result<VerificationReport> {
    check_positive("r0", r0)?;
    check_positive("step", step)?;
    let f = profile.f;
    let h = step;
    let radial = |x: f64, y: f64| f(x.hypot(y));
    let cartesian =
        (radial(r0 + h, 0.0) + radial(r0 - h, 0.0) + radial(r0, h) + radial(r0, -h) - 4.0 * radial(r0, 0.0)) / (h * h);
    let second = (f(r0 + h) - 2.0 * f(r0) + f(r0 - h)) / (h * h);
    let first = (f(r0 + h) - f(r0 - h)) / (2.0 * h);
    let polar = second + first / r0;
    let orbit_volume = |r: f64| 2.0 * PI * r;
    let log_volume_slope = (orbit_volume(r0 + h).ln() - orbit_volume(r0 - h).ln()) / (2.0 * h);
    let reduced = second + log_volume_slope * first;

    let mut report = VerificationReport::new("submersion-demo", 0);
    report.input("profile", profile.name).input("r0", r0).input("step", step).input("tolerance", tolerance);
    report.push(CheckRow::absolute("cartesian vs f''+f'/r", cartesian, polar, 0.0, tolerance));
    report.push(CheckRow::absolute("cartesian vs orbit-volume form", cartesian, reduced, 0.0, tolerance));
    report.push(CheckRow::absolute("f''+f'/r vs orbit-volume form", polar, reduced, 0.0, tolerance));
    if let Some(exact) = profile.exact_laplacian {
        let target = exact(r0);
        report.push(CheckRow::absolute("cartesian vs exact", cartesian, target, 0.0, tolerance));
        report.push(CheckRow::absolute("f''+f'/r vs exact", polar, target, 0.0, tolerance));
        report.push(CheckRow::absolute("orbit-volume form vs exact", reduced, target, 0.0, tolerance));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic::character;

    fn rng(i: u64) -> rand_chacha::ChaCha8Rng {
        SeedSequence::new(11, "lattice-unit").stream(i)
    }

    #[test]
    fn zero_and_constant_holonomy() {
        assert_eq!(holonomy(&LatticeConnection::zero(5)), GroupElement::identity());
        let x = AlgebraVector::new(0.4, -1.1, 2.3);
        for n in [1, 3, 16] {
            let h = holonomy(&LatticeConnection::constant(n, x));
            assert!(h.matrix_distance(&exp_group(&x)) < 1e-14);
        }
        let z = ComplexAlgebraVector::from_parts(&x, &AlgebraVector::new(0.2, 0.0, -0.3));
        let hz = holonomy_complex(&ComplexLatticeConnection::constant(8, z));
        assert!(hz.matrix_distance(&exp_complex(&z)) < 1e-13);
    }

    #[test]
    fn real_connections_agree_with_complex_holonomy() {
        let a = sample_ps(6, 1.0, &mut rng(0)).unwrap();
        let h = holonomy(&a);
        let hc = holonomy_complex(&a.complexify());
        assert!((h.matrix() - hc.matrix()).norm() < 1e-14);
    }

    #[test]
    fn norm_is_riemann_sum() {
        let x = AlgebraVector::new(1.0, 2.0, 2.0);
        assert_eq!(LatticeConnection::constant(7, x).norm_sq(), 9.0);
        let a = sample_ps(5, 1.0, &mut rng(1)).unwrap();
        let coords = a.coordinates();
        assert!((coords.iter().map(|c| c * c).sum::<f64>() - a.norm_sq()).abs() < 1e-12);
        let back = LatticeConnection::from_coordinates(&coords).unwrap();
        assert!(back.l2_distance(&a).unwrap() < 1e-12);
    }

    #[test]
    fn identity_gauge_is_trivial() {
        let a = sample_ps(4, 0.5, &mut rng(2)).unwrap();
        let b = gauge_act(&LatticeGaugeTransform::identity(4), &a).unwrap();
        assert!(b.l2_distance(&a).unwrap() < 1e-12);
    }

    #[test]
    fn based_loop_constraint_enforced() {
        let g = exp_group(&AlgebraVector::new(0.1, 0.0, 0.0));
        let sites = vec![GroupElement::identity(), g, g];
        assert!(LatticeGaugeTransform::based_loop(sites.clone()).is_err());
        assert!(LatticeGaugeTransform::path(sites).is_ok());
        let a = LatticeConnection::zero(3);
        assert!(matches!(gauge_act(&LatticeGaugeTransform::identity(2), &a), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn path_acts_on_left_of_holonomy() {
        let g = LatticeGaugeTransform::random_path(5, &mut rng(3));
        let w = g.endpoint();
        let moved = path_group_act(&g, &LatticeConnection::zero(5)).unwrap();
        assert!(holonomy(&moved).matrix_distance(&w) < 1e-12);
    }

    #[test]
    fn free_flow_properties() {
        let a = sample_ps(4, 1.0, &mut rng(4)).unwrap();
        let p = sample_ps(4, 1.0, &mut rng(5)).unwrap();
        let s = ClassicalState::new(a.clone(), p).unwrap();
        assert_eq!(free_flow(&s, 0.0).position(), a);
        let later = free_flow(&s, 7.3);
        assert_eq!(later.energy(), s.energy());
        assert_eq!(free_flow(&free_flow(&s, 1.25), 2.5), free_flow(&s, 3.75));
    }

    #[test]
    fn link_mean_small_variance_limit() {
        // m_n(var) = 1 - var c(n) / 2 + O(var^2) with c(n) = (n^2 - 1)/4.
        for n in 2..=4 {
            let var = 1e-4;
            let c = (n * n - 1) as f64 / 4.0;
            assert!((link_character_mean(n, var) - (1.0 - var * c / 2.0)).abs() < 1e-7);
        }
        // N -> infinity recovers the heat kernel moment.
        let exact = pushforward_moment_exact(3, 1.0, 4096);
        assert!((exact - 3.0 * (-1.0f64).exp()).abs() < 1e-3);
    }

    #[test]
    fn laplacian_of_constant_and_of_character_at_zero() {
        let a = LatticeConnection::zero(8);
        let one = |_: &LatticeConnection| 1.0;
        assert_eq!(lattice_laplacian(&one, &a, 1e-3), 0.0);
        let chi2 = |b: &LatticeConnection| character(2, &holonomy(b)).re;
        let v = lattice_laplacian(&chi2, &a, 1e-3);
        assert!((v + 1.5).abs() < 1e-5, "{v}");
    }

    #[test]
    fn submersion_r2_is_four() {
        let p = radial_profile("r2").unwrap();
        let r = submersion_demo(&p, 1.5, 1e-4, 1e-6).unwrap();
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn ensemble_csv_has_one_row_per_sample() {
        let ens: Vec<(u64, LatticeConnection)> = (0..3).map(|i| (i, sample_ps_seeded(2, 1.0, 5, i).unwrap())).collect();
        let mut buf = Vec::new();
        write_ensemble_csv(&mut buf, &ens).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0].split(',').count(), 1 + 6 + 8);
    }
}
