//! The reduced theory on `K` and `K_C`.
//!
//! After reduction the transform acts on `L^2(K)`: heat evolution for time
//! `hbar` followed by holomorphic continuation to `K_C`. This module computes
//! it spectrally, builds the reduced coherent states whose pairings reproduce
//! it, and checks the resolution of the identity and the commutativity of the
//! lattice transform with holonomy by Monte Carlo.
//!
//! The measure `mu_{s,hbar}` on `K_C` is only ever sampled, as the complex
//! holonomy of a lattice draw from `M_{s,hbar}`; its large-`s` limit is probed
//! the same way.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{AsMatrix, ComplexAlgebraVector, ComplexGroupElement, GroupElement};
use crate::haar::haar_quadrature;
use crate::harmonic::{
    characters_from_trace, heat_kernel_images, inner_product_rho_s, BandLimitedFunction, HeatKernelSeries,
};
use crate::lattice::{
    complex_gauge_act, holonomy, holonomy_complex, pushforward_moment_exact, sample_msh, sample_shift,
    ComplexLatticeConnection, LatticeGaugeTransform,
};
use crate::mc::{sample_mean, ComplexEstimate};
use crate::report::{CheckRow, VerificationReport};
use crate::rng::SeedSequence;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `Phi(g) = (e^{hbar Delta / 2} phi)(g)` continued holomorphically to `g` in `K_C`.
pub fn c_transform_k<G: AsMatrix>(phi: &BandLimitedFunction, hbar: f64, g: &G) -> Complex64 {
    phi.heat_semigroup(hbar).evaluate(g)
}

/// Log of the largest singular value of a `det = 1` matrix. Bounds the log
/// spectral radius of `g x` and `g x^{-1}` for every unitary `x`.
pub fn log_operator_norm<G: AsMatrix>(g: &G) -> f64 {
    let m = g.as_matrix();
    let t = (m.adjoint() * m).trace().re;
    let disc = (t * t - 4.0).max(0.0).sqrt();
    (0.5 * (t + disc)).sqrt().ln().max(0.0)
}

/// The `s` parameter of a reduced coherent state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scale {
    Finite(f64),
    /// The `s -> infinity` limit, paired in `L^2(K, dx)`.
    Infinite,
}

/// `psi_g(x) = conj(rho_hbar(g x^{-1})) / rho_s(x)` in `L^2(K, rho_s dx)`, or
/// at `s = infinity` `chi_g(x) = conj(rho_hbar(g x^{-1}))` in `L^2(K, dx)`.
#[derive(Debug, Clone)]
pub struct ReducedCoherentState {
    g: ComplexGroupElement,
    scale: Scale,
    hbar: f64,
    kernel: HeatKernelSeries,
}

impl ReducedCoherentState {
    /// State with the heat kernel series cut off where its tail, uniformly
    /// over `x` in `K`, is below `tolerance`.
    pub fn new(g: ComplexGroupElement, scale: Scale, hbar: f64, tolerance: f64) -> Result<Self> {
        let kernel = HeatKernelSeries::certified(hbar, log_operator_norm(&g), tolerance)?;
        Self::build(g, scale, hbar, kernel)
    }

    pub fn with_cutoff(g: ComplexGroupElement, scale: Scale, hbar: f64, cutoff: usize) -> Result<Self> {
        Self::build(g, scale, hbar, HeatKernelSeries::new(hbar, cutoff)?)
    }

    fn build(g: ComplexGroupElement, scale: Scale, hbar: f64, kernel: HeatKernelSeries) -> Result<Self> {
        if let Scale::Finite(s) = scale {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::InvalidParams(format!("s must be positive, got {s}")));
            }
        }
        Ok(ReducedCoherentState { g, scale, hbar, kernel })
    }

    pub fn g(&self) -> &ComplexGroupElement {
        &self.g
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn cutoff(&self) -> usize {
        self.kernel.cutoff()
    }

    /// Bound on `sup_x |rho_hbar(g x^{-1}) - truncated series|`.
    pub fn truncation_bound(&self) -> f64 {
        self.kernel.tail_bound(log_operator_norm(&self.g))
    }

    /// The state as a function on `K`.
    pub fn density(&self, x: &GroupElement) -> Complex64 {
        let arg = self.g * x.complexify().inverse();
        let value = self.kernel.sum_at(&arg).conj();
        match self.scale {
            Scale::Finite(s) => value / heat_kernel_images(s, x),
            Scale::Infinite => value,
        }
    }

    /// Weight of the Hilbert space the state lives in.
    fn weight(&self, x: &GroupElement) -> f64 {
        match self.scale {
            Scale::Finite(s) => heat_kernel_images(s, x),
            Scale::Infinite => 1.0,
        }
    }
}

/// `<psi_g, phi>`, the pairing being conjugate-linear in the state, computed
/// by Haar quadrature that is exact for the truncated kernel. Equals
/// [`c_transform_k`] up to the truncation bound times `sup |phi|`.
pub fn coherent_overlap(state: &ReducedCoherentState, phi: &BandLimitedFunction) -> Complex64 {
    let degree = state.cutoff() - 1 + phi.degree().saturating_sub(1);
    haar_quadrature(degree + 1)
        .iter()
        .map(|node| {
            let x = &node.element;
            state.density(x).conj() * phi.evaluate(x) * state.weight(x) * node.weight
        })
        .sum()
}

/// Largest `|d/dzbar|` of `Z -> <chi_{exp Z}, phi>` over the three complex
/// coordinates at `z0`, by central differences of step `h`.
pub fn cauchy_riemann_residual(
    phi: &BandLimitedFunction,
    hbar: f64,
    z0: &ComplexAlgebraVector,
    h: f64,
    tolerance: f64,
) -> Result<f64> {
    let f = |z: &ComplexAlgebraVector| -> Result<Complex64> {
        let state = ReducedCoherentState::new(crate::group::exp_complex(z), Scale::Infinite, hbar, tolerance)?;
        Ok(coherent_overlap(&state, phi))
    };
    let mut worst: f64 = 0.0;
    for a in 0..3 {
        let shifted = |d: Complex64| {
            let mut z = *z0;
            z.0[a] += d;
            z
        };
        let dx = (f(&shifted(Complex64::new(h, 0.0)))? - f(&shifted(Complex64::new(-h, 0.0)))?) / (2.0 * h);
        let dy = (f(&shifted(Complex64::new(0.0, h)))? - f(&shifted(Complex64::new(0.0, -h)))?) / (2.0 * h);
        worst = worst.max((0.5 * (dx + Complex64::i() * dy)).norm());
    }
    Ok(worst)
}

/// A point of `K_C` drawn from the lattice approximation of `mu_{s,hbar}`,
/// with everything needed to regenerate it.
#[derive(Debug, Clone, PartialEq)]
pub struct MuSample {
    pub g: ComplexGroupElement,
    pub links: usize,
    pub s: f64,
    pub hbar: f64,
    pub seed: u64,
    pub index: u64,
}

fn mu_sequence(seed: u64, links: usize, s: f64, hbar: f64) -> SeedSequence {
    SeedSequence::new(seed, "mu").child(&format!("N={links},s={s},hbar={hbar}"))
}

/// Sample `index` of the seeded `mu_{s,hbar}` ensemble on `links` links.
pub fn sample_mu(links: usize, s: f64, hbar: f64, seed: u64, index: u64) -> Result<MuSample> {
    let mut rng = mu_sequence(seed, links, s, hbar).stream(index);
    let z = sample_msh(links, s, hbar, &mut rng)?;
    Ok(MuSample { g: holonomy_complex(&z), links, s, hbar, seed, index })
}

/// Monte Carlo Gram matrix `G_ij = E_mu[Phi_i(g) conj(Phi_j(g))]`, the
/// reconstruction of `<phi_i, phi_j>` through the coherent states.
#[derive(Debug, Clone, PartialEq)]
pub struct GramEstimate {
    pub mean: Vec<Vec<Complex64>>,
    pub stderr_re: Vec<Vec<f64>>,
    pub stderr_im: Vec<Vec<f64>>,
    pub samples: u64,
}

impl GramEstimate {
    /// Exactly Hermitian: the lower triangle is the conjugate of the upper.
    pub fn is_hermitian(&self) -> bool {
        let k = self.mean.len();
        (0..k).all(|i| (0..k).all(|j| self.mean[i][j] == self.mean[j][i].conj()))
    }

    pub fn entry(&self, i: usize, j: usize) -> ComplexEstimate {
        ComplexEstimate {
            mean: self.mean[i][j],
            stderr_re: self.stderr_re[i][j],
            stderr_im: self.stderr_im[i][j],
            samples: self.samples,
        }
    }
}

fn upper_pairs(k: usize) -> Vec<(usize, usize)> {
    (0..k).flat_map(|i| (i..k).map(move |j| (i, j))).collect()
}

/// The value of `<psi_g, phi>` at a sample is `Phi(g)`; the spectral form is
/// used since the quadrature form agrees with it to the reproducing tolerance.
pub fn reconstruct_gram(
    tests: &[BandLimitedFunction],
    s: f64,
    hbar: f64,
    links: usize,
    samples: u64,
    seed: u64,
) -> Result<GramEstimate> {
    // Validates the parameters before the parallel loop.
    sample_mu(links, s, hbar, seed, 0)?;
    let evolved: Vec<BandLimitedFunction> = tests.iter().map(|f| f.heat_semigroup(hbar)).collect();
    let pairs = upper_pairs(tests.len());
    let seq = mu_sequence(seed, links, s, hbar);
    let moments = sample_mean(&seq, samples, 2 * pairs.len(), |rng, _, out| {
        let z = sample_msh(links, s, hbar, rng).expect("validated parameters");
        let g = holonomy_complex(&z);
        let values: Vec<Complex64> = evolved.iter().map(|f| f.evaluate(&g)).collect();
        for (p, &(i, j)) in pairs.iter().enumerate() {
            let v = values[i] * values[j].conj();
            out[2 * p] = v.re;
            out[2 * p + 1] = v.im;
        }
    });
    let k = tests.len();
    let mut mean = vec![vec![ZERO; k]; k];
    let mut stderr_re = vec![vec![0.0; k]; k];
    let mut stderr_im = vec![vec![0.0; k]; k];
    for (p, &(i, j)) in pairs.iter().enumerate() {
        let e = moments.complex_estimate(2 * p);
        mean[i][j] = e.mean;
        mean[j][i] = e.mean.conj();
        stderr_re[i][j] = e.stderr_re;
        stderr_re[j][i] = e.stderr_re;
        stderr_im[i][j] = e.stderr_im;
        stderr_im[j][i] = e.stderr_im;
    }
    Ok(GramEstimate { mean, stderr_re, stderr_im, samples })
}

/// Cutoff for `rho_s` with tail below `1e-13` on `K`.
fn rho_cutoff(s: f64) -> Result<usize> {
    Ok(HeatKernelSeries::certified(s, 0.0, 1e-13)?.cutoff())
}

/// `<phi_i, phi_j>` in `L^2(K, rho_s)` by exact quadrature.
pub fn rho_s_gram(tests: &[BandLimitedFunction], s: f64) -> Result<Vec<Vec<Complex64>>> {
    let cutoff = rho_cutoff(s)?;
    let k = tests.len();
    let mut out = vec![vec![ZERO; k]; k];
    for (i, j) in upper_pairs(k) {
        let (v, _) = inner_product_rho_s(&tests[i], &tests[j], s, cutoff)?;
        out[i][j] = v;
        out[j][i] = v.conj();
    }
    Ok(out)
}

/// Named test function for reports.
pub type TestFunction = (String, BandLimitedFunction);

/// Characters `chi_n` for the given dimensions, named `chi1`, `chi2`, ...
pub fn character_tests(dims: &[usize]) -> Vec<TestFunction> {
    dims.iter().map(|&n| (format!("chi{n}"), BandLimitedFunction::character(n))).collect()
}

/// Tolerance for Gram entries whose Monte Carlo integrand is constant.
const DETERMINISTIC_ENTRY_TOLERANCE: f64 = 1e-12;

fn gram_rows(
    report: &mut VerificationReport,
    prefix: &str,
    names: &[String],
    gram: &GramEstimate,
    target: &[Vec<Complex64>],
    threshold: f64,
) {
    for (i, j) in upper_pairs(names.len()) {
        let label = format!("{prefix}<{},{}>", names[i], names[j]);
        let e = gram.entry(i, j);
        if e.stderr() == 0.0 {
            // Constant integrand, e.g. <1,1>: no noise, so only rounding separates it from the target.
            report.push(CheckRow::absolute(
                label,
                (e.mean - target[i][j]).norm(),
                0.0,
                0.0,
                DETERMINISTIC_ENTRY_TOLERANCE,
            ));
        } else {
            report.extend(CheckRow::from_complex_estimate(&label, &e, target[i][j], threshold));
        }
    }
}

/// Resolution of the identity at finite `s`: the reconstructed Gram matrix
/// against the exact `L^2(K, rho_s)` pairings.
pub fn resolution_check(
    tests: &[TestFunction],
    s: f64,
    hbar: f64,
    links: usize,
    samples: u64,
    seed: u64,
    threshold: f64,
) -> Result<VerificationReport> {
    let functions: Vec<BandLimitedFunction> = tests.iter().map(|t| t.1.clone()).collect();
    let names: Vec<String> = tests.iter().map(|t| t.0.clone()).collect();
    let gram = reconstruct_gram(&functions, s, hbar, links, samples, seed)?;
    let target = rho_s_gram(&functions, s)?;
    let mut report = VerificationReport::new("resolution", seed);
    report
        .input("s", s)
        .input("hbar", hbar)
        .input("N", links)
        .input("samples", samples)
        .input("tests", names.join(" "));
    gram_rows(&mut report, "", &names, &gram, &target, threshold);
    report.push(CheckRow::flag("gram hermitian", gram.is_hermitian()));
    Ok(report)
}

/// `mu_{s,hbar}` along an increasing `s` schedule, sampled on `lattice_sizes[k]`
/// links at `schedule[k]`. At each `s` the Gram
/// matrix is compared with its exact finite-`s` value; its deviation from the
/// Haar pairing (the `s = infinity` target) is reported and must shrink along
/// the schedule, both exactly and within noise for the estimates. Also tracks
/// `E[chi_2]` of the holonomy of the real part, which tends to its Haar value 0.
pub fn nu_limit_study(
    tests: &[TestFunction],
    hbar: f64,
    schedule: &[f64],
    lattice_sizes: &[usize],
    samples: u64,
    seed: u64,
    threshold: f64,
) -> Result<VerificationReport> {
    if schedule.is_empty() || schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParams("s schedule must be nonempty and strictly increasing".into()));
    }
    if lattice_sizes.len() != schedule.len() {
        return Err(Error::ShapeMismatch { expected: schedule.len(), found: lattice_sizes.len() });
    }
    let functions: Vec<BandLimitedFunction> = tests.iter().map(|t| t.1.clone()).collect();
    let names: Vec<String> = tests.iter().map(|t| t.0.clone()).collect();
    let k = functions.len();
    let haar: Vec<Vec<Complex64>> =
        (0..k).map(|i| (0..k).map(|j| functions[i].haar_inner_product(&functions[j])).collect()).collect();

    let mut report = VerificationReport::new("nu-limit", seed);
    report
        .input("hbar", hbar)
        .input("schedule", schedule.iter().map(f64::to_string).collect::<Vec<_>>().join(" "))
        .input("N", lattice_sizes.iter().map(usize::to_string).collect::<Vec<_>>().join(" "))
        .input("samples", samples)
        .input("tests", names.join(" "));

    // Per (i, j): previous exact deviation, previous estimated deviation and its stderr.
    let mut previous: Vec<Option<(f64, f64, f64)>> = vec![None; k * k];
    let mut previous_real_moment: Option<f64> = None;
    for (&s, &links) in schedule.iter().zip(lattice_sizes) {
        let gram = reconstruct_gram(&functions, s, hbar, links, samples, seed)?;
        let exact = rho_s_gram(&functions, s)?;
        gram_rows(&mut report, &format!("s={s}: "), &names, &gram, &exact, threshold);
        for (i, j) in upper_pairs(k) {
            let label = format!("s={s}: <{},{}>", names[i], names[j]);
            let oracle = (exact[i][j] - haar[i][j]).norm();
            let e = gram.entry(i, j);
            let estimated = (e.mean - haar[i][j]).norm();
            let err = e.stderr();
            report.push(CheckRow::at_most(
                format!("{label} deviation from Haar within oracle + {threshold} stderr"),
                estimated,
                oracle + threshold * err,
            ));
            if let Some((prev_oracle, prev_est, prev_err)) = previous[i * k + j] {
                report.push(CheckRow::flag(
                    format!("{label} exact deviation not above previous s"),
                    oracle <= prev_oracle,
                ));
                report.push(CheckRow::at_most(
                    format!("{label} estimated deviation not above previous s within noise"),
                    estimated,
                    prev_est + threshold * prev_err.hypot(err),
                ));
            }
            previous[i * k + j] = Some((oracle, estimated, err));
        }

        // The real part of a draw from M_{s,hbar} is a draw from P_r with r = 2s - hbar.
        let r = 2.0 * s - hbar;
        let seq = mu_sequence(seed, links, s, hbar).child("real-holonomy");
        let m = sample_mean(&seq, samples, 1, |rng, _, out| {
            let z = sample_msh(links, s, hbar, rng).expect("validated parameters");
            out[0] = characters_from_trace(holonomy(&z.re()).trace(), 2)[1].re;
        });
        let target = pushforward_moment_exact(2, r / 2.0, links);
        report.push(CheckRow::from_estimate(format!("s={s}: E chi2(h(Re Z))"), &m.estimate(0), target, threshold));
        if let Some(prev) = previous_real_moment {
            report
                .push(CheckRow::flag(format!("s={s}: |E chi2(h(Re Z))| target decreasing"), target.abs() < prev.abs()));
        }
        previous_real_moment = Some(target);
    }
    Ok(report)
}

/// Both sides of the commutativity check at one complex connection.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutativityValues {
    /// Lattice heat evolution of `phi o h_C`, continued to `Z`.
    pub left: ComplexEstimate,
    /// `C_hbar phi` at the complex holonomy of `Z`.
    pub right: Complex64,
    pub holonomy: ComplexGroupElement,
}

/// Both sides for several functions from one set of Gaussian shifts. The
/// noise is seeded by `(seed, N)` only, so connections with the same `N` share
/// their shifts.
pub fn commutativity_values(
    phis: &[BandLimitedFunction],
    hbar: f64,
    z: &ComplexLatticeConnection,
    samples: u64,
    seed: u64,
) -> Result<Vec<CommutativityValues>> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::InvalidParams(format!("hbar must be positive, got {hbar}")));
    }
    let seq = SeedSequence::new(seed, "commutativity").child(&format!("N={}", z.n()));
    let n = z.n();
    let sd = (n as f64 * hbar).sqrt();
    let moments = sample_mean(&seq, samples, 2 * phis.len(), |rng, _, out| {
        let w = sample_shift(n, sd, rng);
        let h = holonomy_complex(&z.shift_real(&w).expect("same N"));
        for (k, phi) in phis.iter().enumerate() {
            let v = phi.evaluate(&h);
            out[2 * k] = v.re;
            out[2 * k + 1] = v.im;
        }
    });
    let h = holonomy_complex(z);
    Ok(phis
        .iter()
        .enumerate()
        .map(|(k, phi)| CommutativityValues {
            left: moments.complex_estimate(2 * k),
            right: c_transform_k(phi, hbar, &h),
            holonomy: h,
        })
        .collect())
}

fn validate_s_hbar(s: f64, hbar: f64) -> Result<()> {
    if !(hbar > 0.0 && s.is_finite() && 2.0 * s > hbar) {
        return Err(Error::InvalidParams(format!("need hbar > 0 and s > hbar/2, got s = {s}, hbar = {hbar}")));
    }
    Ok(())
}

/// Lattice transform against the group transform: LEFT is the Monte Carlo
/// heat evolution of `phi o h_C` continued to `Z`, RIGHT is
/// `c_transform_k(phi, hbar, h_C(Z))`. The transform does not depend on `s`,
/// which is validated and echoed.
///
/// `lattices` holds the same complex connection at increasing `N`; for each
/// consecutive pair the residual `|LEFT - RIGHT|` may not grow beyond noise.
#[allow(clippy::too_many_arguments)]
pub fn theorem4_check(
    phis: &[TestFunction],
    s: f64,
    hbar: f64,
    lattices: &[ComplexLatticeConnection],
    samples: u64,
    seed: u64,
    threshold: f64,
) -> Result<VerificationReport> {
    validate_s_hbar(s, hbar)?;
    if lattices.is_empty() {
        return Err(Error::InvalidParams("theorem4_check needs at least one lattice".into()));
    }
    let functions: Vec<BandLimitedFunction> = phis.iter().map(|p| p.1.clone()).collect();
    let mut report = VerificationReport::new("theorem4", seed);
    report
        .input("phi", phis.iter().map(|p| p.0.as_str()).collect::<Vec<_>>().join(" "))
        .input("s", s)
        .input("hbar", hbar)
        .input("N", lattices.iter().map(|z| z.n().to_string()).collect::<Vec<_>>().join(" "))
        .input("samples", samples);
    let mut previous: Vec<Option<(usize, f64, f64)>> = vec![None; phis.len()];
    for z in lattices {
        let values = commutativity_values(&functions, hbar, z, samples, seed)?;
        let tag = format!("N={}", z.n());
        for ((name, _), (v, prev)) in phis.iter().zip(values.iter().zip(previous.iter_mut())) {
            commutativity_rows(&mut report, &tag, name, v, threshold);
            let residual = (v.left.mean - v.right).norm();
            let err = v.left.stderr();
            if let Some((coarse, prev_residual, prev_err)) = *prev {
                report.push(CheckRow::at_most(
                    format!("{tag}: {name} residual not above N={coarse} within noise"),
                    residual,
                    prev_residual + threshold * prev_err.hypot(err),
                ));
            }
            *prev = Some((z.n(), residual, err));
        }
    }
    Ok(report)
}

/// `Z` with every link split into `factor` links: a finer lattice with the
/// same complex holonomy.
pub fn split_complex(z: &ComplexLatticeConnection, factor: usize) -> ComplexLatticeConnection {
    let links = z.links().iter().flat_map(|l| std::iter::repeat_n(*l, factor)).collect();
    ComplexLatticeConnection::new(links).expect("nonempty")
}

/// Rows comparing LEFT with RIGHT at one lattice.
pub fn commutativity_rows(
    report: &mut VerificationReport,
    tag: &str,
    name: &str,
    v: &CommutativityValues,
    threshold: f64,
) {
    report.extend(CheckRow::from_complex_estimate(
        &format!("{tag}: LEFT vs RIGHT for {name}"),
        &v.left,
        v.right,
        threshold,
    ));
}

/// A based loop of unipotent upper-triangular matrices with dyadic entries,
/// and a nilpotent complex connection with dyadic entries. For power-of-two
/// `N`, every operation in the exponential, the holonomy product, the gauge
/// action and the logarithm is exact in floating point, so the two complex
/// holonomies are bitwise equal.
pub fn dyadic_collapse_pair(
    links: usize,
    seed: u64,
) -> Result<(ComplexLatticeConnection, LatticeGaugeTransform<ComplexGroupElement>)> {
    use rand::Rng;
    if !links.is_power_of_two() {
        return Err(Error::InvalidParams(format!("dyadic collapse needs N a power of two, got {links}")));
    }
    let mut rng = SeedSequence::new(seed, "dyadic-collapse").stream(0);
    let mut dyadic = |scale: f64| Complex64::new(rng.random_range(-16i32..=16) as f64 / 16.0 * scale, 0.0);
    let nf = links as f64;
    let nilpotent = |x: Complex64| {
        let mut m = crate::group::CMatrix2::zeros();
        m[(0, 1)] = x;
        m
    };
    let z_links: Vec<ComplexAlgebraVector> =
        (0..links).map(|_| ComplexAlgebraVector::from_matrix(&nilpotent(dyadic(1.0) * nf))).collect();
    let mut sites = vec![ComplexGroupElement::identity(); links + 1];
    for site in sites.iter_mut().take(links).skip(1) {
        *site = ComplexGroupElement::from_matrix_unchecked(crate::group::CMatrix2::identity() + nilpotent(dyadic(0.5)));
    }
    Ok((ComplexLatticeConnection::new(z_links)?, LatticeGaugeTransform::based_loop(sites)?))
}

/// Collapse of the parameter space: `Z` and `g Z` for a complexified based
/// loop `g` have the same complex holonomy, so RIGHT must agree (bitwise when
/// `bitwise` is set, otherwise to `right_tolerance` relative) and LEFT must
/// agree within Monte Carlo error. Both LEFT values use the same Gaussian
/// shifts; the combined stderr ignores the positive correlation, which makes
/// the test conservative.
#[allow(clippy::too_many_arguments)]
pub fn collapse_check<G: AsMatrix + Copy>(
    family: &str,
    phis: &[TestFunction],
    hbar: f64,
    z: &ComplexLatticeConnection,
    g: &LatticeGaugeTransform<G>,
    samples: u64,
    seed: u64,
    threshold: f64,
    bitwise: bool,
    right_tolerance: f64,
) -> Result<VerificationReport> {
    let w = complex_gauge_act(g, z)?;
    let functions: Vec<BandLimitedFunction> = phis.iter().map(|p| p.1.clone()).collect();
    let a = commutativity_values(&functions, hbar, z, samples, seed)?;
    let b = commutativity_values(&functions, hbar, &w, samples, seed)?;
    let mut report = VerificationReport::new("collapse", seed);
    report
        .input("family", family)
        .input("phi", phis.iter().map(|p| p.0.as_str()).collect::<Vec<_>>().join(" "))
        .input("hbar", hbar)
        .input("N", z.n())
        .input("samples", samples);
    let (ha, hb) = (&a[0].holonomy, &b[0].holonomy);
    report.push(CheckRow::absolute(
        format!("{family}: complex holonomy preserved"),
        ha.matrix_distance(hb),
        0.0,
        0.0,
        right_tolerance * ha.matrix().norm(),
    ));
    report.push(CheckRow::flag(format!("{family}: connection actually moved"), w != *z));
    for ((name, _), (va, vb)) in phis.iter().zip(a.iter().zip(&b)) {
        if bitwise {
            let same = va.right.re.to_bits() == vb.right.re.to_bits() && va.right.im.to_bits() == vb.right.im.to_bits();
            report.push(CheckRow::flag(format!("{family}: RIGHT bitwise equal for {name}"), same));
        } else {
            report.push(CheckRow::absolute(
                format!("{family}: RIGHT equal for {name}"),
                (va.right - vb.right).norm(),
                0.0,
                0.0,
                right_tolerance * va.right.norm().max(1.0),
            ));
        }
        let combined = ComplexEstimate {
            mean: vb.left.mean,
            stderr_re: va.left.stderr_re.hypot(vb.left.stderr_re),
            stderr_im: va.left.stderr_im.hypot(vb.left.stderr_im),
            samples,
        };
        report.extend(CheckRow::from_complex_estimate(
            &format!("{family}: LEFT(gZ) vs LEFT(Z) for {name}"),
            &combined,
            va.left.mean,
            threshold,
        ));
    }
    Ok(report)
}
