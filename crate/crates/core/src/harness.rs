//! Named experiments: configuration, dispatch and report assembly.
//!
//! A configuration is a plain `key = value` file; flags applied afterwards
//! through [`ExperimentConfig::set`] win over file values. Every experiment is
//! a pure function of its configuration, so a fixed seed fixes the report
//! down to the byte.
//!
//! Keys shared by all experiments: `experiment`, `seed`, `out`, `format`,
//! `timing`. The core parameters `s`, `hbar`, `N`, `cutoff` and `samples` are
//! accepted only by experiments that use them; `tol.<name>` overrides a named
//! tolerance and any other key is an experiment option (see
//! [`Experiment::options`]).

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::flat::{
    mc_isometry_check, norm_sq_lebesgue, norm_sq_msh, norm_sq_nu, norm_sq_ps, s_transform_function,
    ExponentialFunction, FlatFunction, GaussianFunction, MeasureParams, PolynomialFunction,
};
use crate::group::{
    exp_complex, exp_group, geodesic, polar_compose, AlgebraVector, ComplexAlgebraVector, ComplexGroupElement,
    GroupElement,
};
use crate::haar::{haar_quadrature, haar_sample, weyl_quadrature};
use crate::harmonic::{
    characters_from_trace, heat_kernel_images, heat_kernel_images_angle, tail_bound, BandLimitedFunction,
    HeatKernelSeries,
};
use crate::lattice::{
    free_flow, holonomy, holonomy_complex, laplacian_reduction_study, pushforward_moment_exact, pushforward_moments,
    radial_profile, sample_ps, submersion_demo, ClassicalState, ComplexLatticeConnection, FourierConnection, GaugeKind,
    LatticeConnection, LatticeGaugeTransform, DEFAULT_LAPLACIAN_STEP, DEFAULT_SUBMERSION_STEP,
};
use crate::reduced::{
    c_transform_k, cauchy_riemann_residual, character_tests, coherent_overlap, collapse_check, dyadic_collapse_pair,
    nu_limit_study, resolution_check, theorem4_check, ReducedCoherentState, Scale, TestFunction,
};
use crate::report::{CheckRow, ReportFormat, VerificationReport};
use crate::rng::SeedSequence;

/// Tolerance at which heat kernel series are certified when no cutoff is given.
const SERIES_TOLERANCE: f64 = 1e-14;

/// Default statistical threshold in standard errors.
pub const DEFAULT_Z_THRESHOLD: f64 = 4.0;

/// The experiments, one per verification operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Experiment {
    HeatSemigroup,
    FlatIsometry,
    Pushforward,
    LaplacianReduction,
    CoherentOverlap,
    Resolution,
    NuLimit,
    Theorem4,
    SubmersionDemo,
    ClassicalFlow,
}

/// Core numeric parameters, each used by a subset of the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Param {
    S,
    Hbar,
    Links,
    Cutoff,
    Samples,
}

impl Param {
    fn key(self) -> &'static str {
        match self {
            Param::S => "s",
            Param::Hbar => "hbar",
            Param::Links => "N",
            Param::Cutoff => "cutoff",
            Param::Samples => "samples",
        }
    }
}

impl Experiment {
    pub const ALL: [Experiment; 10] = [
        Experiment::HeatSemigroup,
        Experiment::FlatIsometry,
        Experiment::Pushforward,
        Experiment::LaplacianReduction,
        Experiment::CoherentOverlap,
        Experiment::Resolution,
        Experiment::NuLimit,
        Experiment::Theorem4,
        Experiment::SubmersionDemo,
        Experiment::ClassicalFlow,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::HeatSemigroup => "heat-semigroup",
            Experiment::FlatIsometry => "flat-isometry",
            Experiment::Pushforward => "pushforward",
            Experiment::LaplacianReduction => "laplacian-reduction",
            Experiment::CoherentOverlap => "coherent-overlap",
            Experiment::Resolution => "resolution",
            Experiment::NuLimit => "nu-limit",
            Experiment::Theorem4 => "theorem4",
            Experiment::SubmersionDemo => "submersion-demo",
            Experiment::ClassicalFlow => "classical-flow",
        }
    }

    /// The verification operation this experiment drives, as `module::operation`.
    pub fn operation(self) -> &'static str {
        match self {
            Experiment::HeatSemigroup => "sb_group::c_transform_K",
            Experiment::FlatIsometry => "sb_flat::mc_isometry_check",
            Experiment::Pushforward => "lattice_cylinder::sample_Ps",
            Experiment::LaplacianReduction => "lattice_cylinder::lattice_laplacian",
            Experiment::CoherentOverlap => "sb_group::coherent_overlap",
            Experiment::Resolution => "sb_group::resolution_check",
            Experiment::NuLimit => "sb_group::nu_limit_study",
            Experiment::Theorem4 => "sb_group::theorem4_check",
            Experiment::SubmersionDemo => "lattice_cylinder::submersion_demo",
            Experiment::ClassicalFlow => "lattice_cylinder::free_flow",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            Experiment::HeatSemigroup => {
                "heat kernel semigroup, normalisation and eigenfunctions; transform of real points vs convolution"
            }
            Experiment::FlatIsometry => "flat transform isometry: closed forms and Monte Carlo on black boxes",
            Experiment::Pushforward => "E chi_n(h(A)) under P_s against the heat kernel moments",
            Experiment::LaplacianReduction => "lattice Laplacian of chi_n o h against Delta_K chi_n as N grows",
            Experiment::CoherentOverlap => "reproducing identity <psi_g, phi> = Phi(g) and holomorphy in g",
            Experiment::Resolution => "Gram matrix reconstructed from mu_(s,hbar) against L^2(rho_s)",
            Experiment::NuLimit => "mu_(s,hbar) along growing s against the Haar pairing",
            Experiment::Theorem4 => "lattice transform vs group transform of the holonomy, and collapse",
            Experiment::SubmersionDemo => "radial Laplacian on the plane: Cartesian, polar and orbit-volume forms",
            Experiment::ClassicalFlow => "free classical flow on lattice connections and its reduction",
        }
    }

    fn params(self) -> &'static [Param] {
        use Param::*;
        match self {
            Experiment::HeatSemigroup => &[Hbar, Cutoff],
            Experiment::FlatIsometry => &[S, Hbar, Samples],
            Experiment::Pushforward => &[S, Links, Samples],
            Experiment::LaplacianReduction => &[Links],
            Experiment::CoherentOverlap => &[S, Hbar, Cutoff],
            Experiment::Resolution => &[S, Hbar, Links, Samples],
            Experiment::NuLimit => &[Hbar, Links, Samples],
            Experiment::Theorem4 => &[S, Hbar, Links, Samples],
            Experiment::SubmersionDemo => &[],
            Experiment::ClassicalFlow => &[Links],
        }
    }

    /// Experiment-specific option keys.
    pub fn options(self) -> &'static [&'static str] {
        match self {
            Experiment::HeatSemigroup => &["times", "grid", "draws"],
            Experiment::FlatIsometry => &["dim", "draws"],
            Experiment::Pushforward => &["dims"],
            Experiment::LaplacianReduction => &["dims", "connections", "amplitude", "modes", "eta"],
            Experiment::CoherentOverlap => &["draws", "max_norm"],
            Experiment::Resolution => &["dims"],
            Experiment::NuLimit => &["dims", "schedule"],
            Experiment::Theorem4 => &["dims", "amplitude", "modes", "imaginary", "collapse_samples"],
            Experiment::SubmersionDemo => &["profile", "r0", "step"],
            Experiment::ClassicalFlow => &["t"],
        }
    }

    /// Named tolerances accepted as `tol.<name>`; every experiment also accepts `z`.
    pub fn tolerances(self) -> &'static [&'static str] {
        match self {
            Experiment::HeatSemigroup => &["semigroup", "transform", "eigen"],
            Experiment::FlatIsometry => &["closed_form"],
            Experiment::Pushforward => &[],
            Experiment::LaplacianReduction => &["order", "relative"],
            Experiment::CoherentOverlap => &["reproducing", "holomorphy"],
            Experiment::Resolution => &[],
            Experiment::NuLimit => &[],
            Experiment::Theorem4 => &["collapse"],
            Experiment::SubmersionDemo => &["fd"],
            Experiment::ClassicalFlow => &["flow"],
        }
    }

    /// Whether `s > hbar/2` is required of the effective parameters.
    fn needs_s_above_half_hbar(self) -> bool {
        matches!(self, Experiment::FlatIsometry | Experiment::Resolution | Experiment::NuLimit | Experiment::Theorem4)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
            Error::config("experiment", format!("unknown experiment `{s}`; expected one of {}", names.join(", ")))
        })
    }
}

/// Everything needed to reproduce one experiment run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub s: Option<f64>,
    pub hbar: Option<f64>,
    /// Lattice size `N`.
    pub links: Option<usize>,
    /// Heat kernel cutoff `Lambda`: irreps of dimension up to `cutoff`.
    pub cutoff: Option<usize>,
    pub samples: Option<u64>,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub options: BTreeMap<String, String>,
    pub output: Option<PathBuf>,
    pub format: ReportFormat,
    /// Record wall-clock time in the report; off by default so reports stay byte-stable.
    pub timing: bool,
}

fn parse_value<T: FromStr>(field: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::config(field, format!("cannot parse `{value}`")))
}

fn parse_positive(field: &str, value: &str) -> Result<f64> {
    let v: f64 = parse_value(field, value)?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::config(field, format!("must be positive and finite, got {value}")));
    }
    Ok(v)
}

fn parse_at_least_one<T: FromStr + PartialOrd + From<u8>>(field: &str, value: &str) -> Result<T> {
    let v: T = parse_value(field, value)?;
    if v < T::from(1) {
        return Err(Error::config(field, format!("must be at least 1, got {value}")));
    }
    Ok(v)
}

fn parse_list<T: FromStr>(field: &str, value: &str) -> Result<Vec<T>> {
    let items: Vec<T> = value
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| parse_value(field, t))
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(Error::config(field, "list is empty"));
    }
    Ok(items)
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        ExperimentConfig {
            experiment,
            s: None,
            hbar: None,
            links: None,
            cutoff: None,
            samples: None,
            seed: 0,
            tolerances: BTreeMap::new(),
            options: BTreeMap::new(),
            output: None,
            format: ReportFormat::Json,
            timing: false,
        }
    }

    /// Parses `key = value` lines; `#` starts a comment. The `experiment`
    /// key is required.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(format!("line {}", lineno + 1), format!("expected `key = value`, got `{line}`"))
            })?;
            pairs.push((key.trim().to_string(), value.trim().to_string()));
        }
        let experiment = pairs
            .iter()
            .rev()
            .find(|(k, _)| k == "experiment")
            .ok_or_else(|| Error::config("experiment", "missing"))?
            .1
            .parse()?;
        let mut config = ExperimentConfig::new(experiment);
        for (k, v) in &pairs {
            config.set(k, v)?;
        }
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Sets one key; later calls override earlier ones.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "experiment" => self.experiment = value.parse()?,
            "s" => self.s = Some(parse_positive(key, value)?),
            "hbar" => self.hbar = Some(parse_positive(key, value)?),
            "N" => {
                self.links = Some(
                    parse_at_least_one::<usize>(key, value)
                        .map_err(|_| Error::config(key, format!("N must be an integer >= 1, got `{value}`")))?,
                )
            }
            "cutoff" => self.cutoff = Some(parse_at_least_one::<usize>(key, value)?),
            "samples" => self.samples = Some(parse_at_least_one::<u64>(key, value)?),
            "seed" => self.seed = parse_value(key, value)?,
            "out" => self.output = Some(PathBuf::from(value)),
            "format" => {
                self.format =
                    value.parse().map_err(|_| Error::config(key, format!("expected csv or json, got `{value}`")))?
            }
            "timing" => self.timing = parse_value(key, value)?,
            _ => {
                if let Some(name) = key.strip_prefix("tol.") {
                    let v: f64 = parse_value(key, value)?;
                    if !(v >= 0.0 && v.is_finite()) {
                        return Err(Error::config(
                            key,
                            format!("tolerance must be finite and non-negative, got {value}"),
                        ));
                    }
                    self.tolerances.insert(name.to_string(), v);
                } else {
                    self.options.insert(key.to_string(), value.to_string());
                }
            }
        }
        Ok(())
    }

    /// Re-checks every constraint of the target experiment.
    pub fn validate(&self) -> Result<()> {
        let e = self.experiment;
        let given = [
            (Param::S, self.s.is_some()),
            (Param::Hbar, self.hbar.is_some()),
            (Param::Links, self.links.is_some()),
            (Param::Cutoff, self.cutoff.is_some()),
            (Param::Samples, self.samples.is_some()),
        ];
        for (p, set) in given {
            if set && !e.params().contains(&p) {
                return Err(Error::config(p.key(), format!("not used by experiment {e}")));
            }
        }
        for key in self.options.keys() {
            if !e.options().contains(&key.as_str()) {
                return Err(Error::config(
                    key,
                    format!("unknown key for experiment {e}; options are [{}]", e.options().join(", ")),
                ));
            }
        }
        for key in self.tolerances.keys() {
            if key != "z" && !e.tolerances().contains(&key.as_str()) {
                return Err(Error::config(format!("tol.{key}"), format!("unknown tolerance for experiment {e}")));
            }
        }
        if self.links == Some(0) {
            return Err(Error::config("N", "must be at least 1"));
        }
        if self.cutoff == Some(0) {
            return Err(Error::config("cutoff", "must be at least 1"));
        }
        if e.needs_s_above_half_hbar() {
            let hbar = self.hbar_or(DEFAULT_HBAR);
            let schedule = if e == Experiment::NuLimit {
                self.list_f64("schedule", &DEFAULT_NU_SCHEDULE)?
            } else {
                vec![self.s_or(1.0)]
            };
            for s in schedule {
                if 2.0 * s <= hbar {
                    let field = if e == Experiment::NuLimit { "schedule" } else { "s" };
                    return Err(Error::config(field, format!("need s > hbar/2, got s = {s} with hbar = {hbar}")));
                }
            }
        }
        match e {
            Experiment::LaplacianReduction => {
                let n = self.links_or(64);
                if n < 8 || !n.is_multiple_of(8) {
                    return Err(Error::config(
                        "N",
                        format!("the study uses N/8, N/4, N/2, N; need a multiple of 8, got {n}"),
                    ));
                }
            }
            Experiment::Theorem4 => {
                let n = self.links_or(64);
                if n < 2 || !n.is_power_of_two() {
                    return Err(Error::config(
                        "N",
                        format!("the N/2 vs N study and dyadic collapse need a power of two >= 2, got {n}"),
                    ));
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn s_or(&self, default: f64) -> f64 {
        self.s.unwrap_or(default)
    }

    fn hbar_or(&self, default: f64) -> f64 {
        self.hbar.unwrap_or(default)
    }

    fn links_or(&self, default: usize) -> usize {
        self.links.unwrap_or(default)
    }

    fn samples_or(&self, default: u64) -> u64 {
        self.samples.unwrap_or(default)
    }

    /// Named tolerance, or its default.
    pub fn tolerance(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }

    fn z(&self) -> f64 {
        self.tolerance("z", DEFAULT_Z_THRESHOLD)
    }

    fn option_parsed<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        self.options.get(key).map_or(Ok(default), |v| parse_value(key, v))
    }

    fn option_positive(&self, key: &str, default: f64) -> Result<f64> {
        self.options.get(key).map_or(Ok(default), |v| parse_positive(key, v))
    }

    fn option_count(&self, key: &str, default: usize) -> Result<usize> {
        self.options.get(key).map_or(Ok(default), |v| parse_at_least_one(key, v))
    }

    fn list_f64(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        let list = self.options.get(key).map_or(Ok(default.to_vec()), |v| parse_list(key, v))?;
        if list.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            return Err(Error::config(key, "entries must be positive and finite"));
        }
        Ok(list)
    }

    fn dims(&self, default: &[usize]) -> Result<Vec<usize>> {
        let list = self.options.get("dims").map_or(Ok(default.to_vec()), |v| parse_list("dims", v))?;
        if list.contains(&0) {
            return Err(Error::config("dims", "irrep dimensions start at 1"));
        }
        Ok(list)
    }
}

const DEFAULT_HBAR: f64 = 0.5;
const DEFAULT_NU_SCHEDULE: [f64; 3] = [2.0, 8.0, 32.0];

/// Runs the configured experiment.
pub fn run(config: &ExperimentConfig) -> Result<VerificationReport> {
    config.validate()?;
    #[cfg(not(target_arch = "wasm32"))]
    let start = config.timing.then(std::time::Instant::now);
    let mut report = match config.experiment {
        Experiment::HeatSemigroup => heat_semigroup(config),
        Experiment::FlatIsometry => flat_isometry(config),
        Experiment::Pushforward => pushforward(config),
        Experiment::LaplacianReduction => laplacian_reduction(config),
        Experiment::CoherentOverlap => coherent_overlap_grid(config),
        Experiment::Resolution => resolution(config),
        Experiment::NuLimit => nu_limit(config),
        Experiment::Theorem4 => theorem4(config),
        Experiment::SubmersionDemo => submersion(config),
        Experiment::ClassicalFlow => classical_flow(config),
    }?;
    report.experiment = config.experiment.name().to_string();
    report.seed = config.seed;
    report.input("operation", config.experiment.operation());
    for (k, v) in &config.options {
        report.input(k, v);
    }
    for (k, v) in &config.tolerances {
        report.input(&format!("tol.{k}"), v);
    }
    #[cfg(not(target_arch = "wasm32"))]
    if let Some(start) = start {
        report.wall_clock_seconds = Some(start.elapsed().as_secs_f64());
    }
    Ok(report)
}

/// Runs the experiment and writes the report to the configured output, if any.
pub fn run_and_emit(config: &ExperimentConfig) -> Result<VerificationReport> {
    let report = run(config)?;
    if let Some(path) = &config.output {
        report.emit(config.format, path)?;
    }
    Ok(report)
}

/// Appends `rows` of `other` with `prefix` prepended to their names.
fn absorb(report: &mut VerificationReport, prefix: &str, other: VerificationReport) {
    report.extend(other.rows.into_iter().map(|mut r| {
        r.name = format!("{prefix}{}", r.name);
        r
    }));
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn series(time: f64, cutoff: Option<usize>) -> Result<HeatKernelSeries> {
    match cutoff {
        Some(c) => HeatKernelSeries::new(time, c),
        None => HeatKernelSeries::certified(time, 0.0, SERIES_TOLERANCE),
    }
}

/// Coefficients of `chi_n` of a class function.
fn character_coefficients(f: &BandLimitedFunction) -> Vec<Complex64> {
    f.blocks().iter().enumerate().map(|(i, b)| b[(0, 0)] * ((i + 1) as f64).sqrt()).collect()
}

fn evaluate_class(coefficients: &[Complex64], g: &GroupElement) -> Complex64 {
    let chi = characters_from_trace(g.trace(), coefficients.len());
    coefficients.iter().zip(&chi).map(|(a, c)| a * c).sum()
}

/// For `after = T phi` with `T` diagonal in the Peter-Weyl basis: `None` if
/// `T` moved weight onto a zero coefficient, else the ratio at the first
/// nonzero coefficient and the largest relative spread of the other ratios.
fn block_eigenvalue(before: &BandLimitedFunction, after: &BandLimitedFunction) -> Option<(Complex64, f64)> {
    let zero = Complex64::new(0.0, 0.0);
    let mut first: Option<Complex64> = None;
    let mut spread: f64 = 0.0;
    for (a, b) in before.blocks().iter().zip(after.blocks()) {
        for (x, y) in a.iter().zip(b.iter()) {
            if *x == zero {
                if *y != zero {
                    return None;
                }
                continue;
            }
            let r = y / x;
            match first {
                None => first = Some(r),
                Some(r0) => spread = spread.max((r - r0).norm() / r0.norm()),
            }
        }
    }
    first.map(|r| (r, spread))
}

/// A band-limited function supported on block `n` with seeded entries.
fn random_block(n: usize, seq: &SeedSequence) -> Result<BandLimitedFunction> {
    let mut rng = seq.child(&format!("block{n}")).stream(0);
    let mut blocks: Vec<_> = (1..=n).map(|k| nalgebra::DMatrix::from_element(k, k, Complex64::new(0.0, 0.0))).collect();
    for v in blocks[n - 1].iter_mut() {
        *v = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    }
    BandLimitedFunction::from_blocks(blocks)
}

fn eigen_rows(
    report: &mut VerificationReport,
    label: &str,
    found: Option<(Complex64, f64)>,
    expected: f64,
    tolerance: f64,
) {
    report.push(CheckRow::flag(format!("{label}: no weight leaks into other coefficients"), found.is_some()));
    let (ratio, spread) = found.unwrap_or((Complex64::new(f64::NAN, f64::NAN), f64::NAN));
    report.push(CheckRow::at_most(format!("{label}: spread of coefficient ratios"), spread, tolerance));
    report.push(CheckRow::relative(
        format!("{label}: eigenvalue vs (n^2-1)/4 closed form"),
        ratio.re,
        expected,
        tolerance,
    ));
    report.push(CheckRow::at_most(
        format!("{label}: imaginary part of eigenvalue"),
        ratio.im.abs(),
        tolerance * expected.abs(),
    ));
}

fn heat_semigroup(cfg: &ExperimentConfig) -> Result<VerificationReport> {
    let times = cfg.list_f64("times", &[0.25, 0.5, 1.0])?;
    let grid = cfg.option_count("grid", 32)?;
    let draws = cfg.option_count("draws", 4)?;
    let hbar = cfg.hbar_or(DEFAULT_HBAR);
    let semigroup_tol = cfg.tolerance("semigroup", 1e-8);
    let transform_tol = cfg.tolerance("transform", 1e-8);
    let eigen_tol = cfg.tolerance("eigen", 1e-14);
    let seq = SeedSequence::new(cfg.seed, "heat-semigroup");

    let mut report = VerificationReport::new("heat-semigroup", cfg.seed);
    report.input("times", join(&times)).input("grid", grid).input("hbar", hbar);
    if let Some(c) = cfg.cutoff {
        report.input("cutoff", c);
    }

    // rho_t evolved for time s is rho_{t+s}: spectral series against the image sum.
    let nodes = haar_quadrature(grid);
    for &t in &times {
        let rho_t = series(t, cfg.cutoff)?;
        for &s in &times {
            let bound = tail_bound(t + s, 0.0, rho_t.cutoff());
            if bound > semigroup_tol {
                return Err(Error::Truncation { time: t + s, cutoff: rho_t.cutoff(), bound, tolerance: semigroup_tol });
            }
            let evolved = character_coefficients(&rho_t.to_function().heat_semigroup(s));
            let residual = nodes
                .iter()
                .map(|node| (evaluate_class(&evolved, &node.element) - heat_kernel_images(t + s, &node.element)).norm())
                .fold(0.0, f64::max);
            report.push(CheckRow::absolute(
                format!("semigroup t={t} s={s}: max residual on {grid}^3 grid"),
                residual,
                0.0,
                bound,
                semigroup_tol,
            ));
        }
    }

    let weyl = weyl_quadrature(200);
    for &t in &times {
        let rho = series(t, cfg.cutoff)?;
        report.push(CheckRow::flag(format!("rho_{t}: trivial coefficient is exactly 1"), rho.integral() == 1.0));
        let f = rho.to_function();
        report.push(CheckRow::flag(
            format!("rho_{t}: Haar pairing with 1 is exactly 1"),
            f.haar_inner_product(&BandLimitedFunction::constant(Complex64::new(1.0, 0.0))) == Complex64::new(1.0, 0.0),
        ));
        let image_mass: f64 = weyl.iter().map(|&(th, w)| w * heat_kernel_images_angle(t, th)).sum();
        report.push(CheckRow::absolute(format!("rho_{t}: image sum integrates to 1"), image_mass, 1.0, 0.0, 1e-12));
    }

    for n in 1..=6 {
        let closed_casimir = (n * n - 1) as f64 / 4.0;
        let tests =
            [(format!("chi{n}"), BandLimitedFunction::character(n)), (format!("block{n}"), random_block(n, &seq)?)];
        for (name, phi) in &tests {
            for &t in &times {
                let evolved = phi.heat_semigroup(t);
                let expected = (-t * closed_casimir / 2.0).exp();
                eigen_rows(
                    &mut report,
                    &format!("{name}: e^({t} Delta/2)"),
                    block_eigenvalue(phi, &evolved),
                    expected,
                    eigen_tol,
                );
            }
            if n > 1 {
                let lap = block_eigenvalue(phi, &phi.laplacian());
                eigen_rows(&mut report, &format!("{name}: Delta"), lap, -closed_casimir, eigen_tol);
            } else {
                let killed = phi.laplacian().blocks().iter().all(|b| b.iter().all(|v| v.norm() == 0.0));
                report.push(CheckRow::flag(format!("{name}: Delta annihilates constants"), killed));
            }
        }
    }

    // The transform at real points is heat convolution; at complex points
    // characters pick up e^{-hbar c(n)/2}.
    let rho = series(hbar, cfg.cutoff)?;
    let rho_bound = rho.tail_bound(0.0);
    let mut rng = seq.child("points").stream(0);
    let phis = [
        ("chi2", BandLimitedFunction::character(2)),
        ("chi3", BandLimitedFunction::character(3)),
        ("block3", random_block(3, &seq)?),
    ];
    let one = BandLimitedFunction::constant(Complex64::new(1.0, 0.0));
    for i in 0..draws {
        let x = haar_sample(&mut rng);
        for (name, phi) in &phis {
            let quad = haar_quadrature(rho.cutoff() + phi.degree());
            let conv: Complex64 = quad
                .iter()
                .map(|node| {
                    let y = &node.element;
                    rho.sum_at(&(x * y.inverse())) * phi.evaluate(y) * node.weight
                })
                .sum();
            let spectral = c_transform_k(phi, hbar, &x);
            report.push(CheckRow::absolute(
                format!("x{i}: transform of {name} vs heat convolution"),
                (spectral - conv).norm(),
                0.0,
                rho_bound * phi.sup_bound(),
                transform_tol,
            ));
        }
        let y = AlgebraVector::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal));
        let g = polar_compose(&x, &y);
        report.push(CheckRow::flag(
            format!("g{i}: transform of 1 is exactly 1"),
            c_transform_k(&one, hbar, &g) == Complex64::new(1.0, 0.0),
        ));
        for n in 2..=4 {
            let got = c_transform_k(&BandLimitedFunction::character(n), hbar, &g);
            let expected = characters_from_trace(g.trace(), n)[n - 1] * (-hbar * (n * n - 1) as f64 / 8.0).exp();
            report.push(CheckRow::absolute(
                format!("g{i}: transform of chi{n} vs e^(-hbar c/2) chi{n}"),
                (got - expected).norm(),
                0.0,
                0.0,
                1e-12 * expected.norm().max(1.0),
            ));
        }
    }
    Ok(report)
}

/// The black-box test functions on `R^dim` and their closed forms.
fn flat_black_boxes(dim: usize) -> Result<Vec<(&'static str, FlatFunction)>> {
    let one = Complex64::new(1.0, 0.0);
    let mut a = vec![0.0; dim];
    a[0] = 0.7;
    if dim > 1 {
        a[1] = -0.4;
    }
    let exponential = FlatFunction::Exponential(ExponentialFunction::new(a, Complex64::new(-0.3, 0.0).exp() * one));
    // x_1^3 - 2 x_1 + 1
    let mut cubic = vec![0; dim];
    cubic[0] = 3;
    let mut linear = vec![0; dim];
    linear[0] = 1;
    let polynomial = FlatFunction::Polynomial(PolynomialFunction::from_terms(
        dim,
        [(cubic, one), (linear, Complex64::new(-2.0, 0.0)), (vec![0; dim], one)],
    )?);
    let mut center = vec![0.0; dim];
    center[0] = 0.5;
    let gaussian = FlatFunction::Gaussian(GaussianFunction::new(center, 1.5, Complex64::new(2.0, 0.0))?);
    Ok(vec![("exponential", exponential), ("cubic", polynomial), ("gaussian", gaussian)])
}

fn flat_isometry(cfg: &ExperimentConfig) -> Result<VerificationReport> {
    let s = cfg.s_or(1.0);
    let hbar = cfg.hbar_or(DEFAULT_HBAR);
    let samples = cfg.samples_or(1_000_000);
    let dim = cfg.option_count("dim", 1)?;
    let draws = cfg.option_count("draws", 50)?;
    let closed_tol = cfg.tolerance("closed_form", 1e-12);
    let params = MeasureParams::new(dim, s, hbar).map_err(|e| Error::config("s", e.to_string()))?;

    let mut report = VerificationReport::new("flat-isometry", cfg.seed);
    report.input("s", s).input("hbar", hbar).input("dim", dim).input("samples", samples).input("draws", draws);

    // Closed forms on random members of the exponential family (P_s onto
    // M_{s,hbar}) and of the Gaussian family (dx onto nu_hbar), in dimension 3.
    let seq = SeedSequence::new(cfg.seed, "flat-closed-form");
    let family_params = MeasureParams::new(3, s, hbar)?;
    let mut worst_exp: f64 = 0.0;
    let mut worst_gauss: f64 = 0.0;
    for i in 0..draws as u64 {
        let mut rng = seq.stream(i);
        let mut normal = || -> f64 { rng.sample(StandardNormal) };
        let a: Vec<f64> = (0..3).map(|_| normal()).collect();
        let c = Complex64::new(normal(), normal());
        let f = FlatFunction::Exponential(ExponentialFunction::new(a, c));
        let lhs = norm_sq_ps(&f, &family_params)?;
        let rhs = norm_sq_msh(&s_transform_function(&f, &family_params), &family_params)?;
        worst_exp = worst_exp.max((lhs - rhs).abs() / lhs);

        let center: Vec<f64> = (0..3).map(|_| normal()).collect();
        let width = 0.2 + normal().abs();
        let g = FlatFunction::Gaussian(GaussianFunction::new(center, width, c)?);
        let lhs = norm_sq_lebesgue(&g)?;
        let rhs = norm_sq_nu(&g.heat_evolve(hbar), hbar)?;
        worst_gauss = worst_gauss.max((lhs - rhs).abs() / lhs);
    }
    report.push(CheckRow::at_most(
        format!("exponential family: max relative |norm_Ps - norm_Msh| over {draws} draws"),
        worst_exp,
        closed_tol,
    ));
    report.push(CheckRow::at_most(
        format!("gaussian family: max relative |norm_dx - norm_nu| over {draws} draws"),
        worst_gauss,
        closed_tol,
    ));

    for (name, f) in flat_black_boxes(dim)? {
        let oracle = norm_sq_ps(&f, &params)?;
        let black_box = move |z: &[Complex64]| f.evaluate(z);
        absorb(&mut report, "", mc_isometry_check(name, &black_box, &params, samples, cfg.seed, Some(oracle)));
    }
    Ok(report)
}

fn pushforward(cfg: &ExperimentConfig) -> Result<VerificationReport> {
    let links = cfg.links_or(64);
    let samples = cfg.samples_or(1_000_000);
    let s_values = match cfg.s {
        Some(s) => vec![s],
        None => vec![0.5, 1.0],
    };
    let dims = cfg.dims(&[2, 3, 4])?;
    let max_dim = *dims.iter().max().expect("nonempty");
    let z = cfg.z();

    let mut report = VerificationReport::new("pushforward", cfg.seed);
    report.input("N", links).input("s", join(&s_values)).input("samples", samples).input("dims", join(&dims));
    for &s in &s_values {
        let moments = pushforward_moments(links, s, max_dim, samples, cfg.seed)?;
        let kernel = HeatKernelSeries::new(s, max_dim)?;
        for &n in &dims {
            let est = moments.estimate(n - 1);
            // E chi_n under rho_s dx is the chi_n coefficient n e^{-s c(n)/2}.
            report.push(CheckRow::from_estimate(
                format!("s={s}: E chi{n}(h) vs heat kernel moment"),
                &est,
                kernel.coefficient(n),
                z,
            ));
            let exact = pushforward_moment_exact(n, s, links);
            report.push(CheckRow::from_estimate(
                format!("s={s}: E chi{n}(h) vs exact N={links} moment"),
                &est,
                exact,
                z,
            ));
            // Order of the finite-N deviation, from the exact moments.
            let sizes: Vec<usize> = (0..4).map(|k| (links >> (3 - k)).max(1)).collect();
            if sizes.windows(2).all(|w| w[1] > w[0]) {
                let dev: Vec<f64> =
                    sizes.iter().map(|&m| (pushforward_moment_exact(n, s, m) - kernel.coefficient(n)).abs()).collect();
                let x: Vec<f64> = sizes.iter().map(|&m| m as f64).collect();
                let order = -crate::lattice::log_log_slope(&x, &dev);
                report.push(CheckRow::at_least(
                    format!("s={s}: chi{n} finite-N deviation vanishes (order over N={})", join(&sizes)),
                    order,
                    0.0,
                ));
            }
        }
    }
    Ok(report)
}

fn laplacian_reduction(cfg: &ExperimentConfig) -> Result<VerificationReport> {
    let finest = cfg.links_or(64);
    let sizes = [finest / 8, finest / 4, finest / 2, finest];
    laplacian_reduction_study(
        &cfg.dims(&[2, 3])?,
        cfg.option_count("connections", 20)?,
        cfg.option_positive("amplitude", 1.0)?,
        cfg.option_count("modes", 3)?,
        &sizes,
        cfg.option_positive("eta", DEFAULT_LAPLACIAN_STEP)?,
        cfg.seed,
        cfg.tolerance("order", 1.0),
        cfg.tolerance("relative", 0.05),
    )
}

/// `polar_compose(x, Y)` with `x` Haar and `|Y|` uniform on `[0, max_norm]`.
fn random_complex_point<R: Rng + ?Sized>(rng: &mut R, max_norm: f64) -> ComplexGroupElement {
    let x = haar_sample(rng);
    let dir = AlgebraVector::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal));
    let r = max_norm * rng.random::<f64>();
    polar_compose(&x, &(dir * (r / dir.norm().max(f64::MIN_POSITIVE))))
}

fn coherent_overlap_grid(cfg: &ExperimentConfig) -> Result<VerificationReport> {
    let draws = cfg.option_count("draws", 20)?;
    let max_norm = cfg.option_positive("max_norm", 1.5)?;
    let scales = [Scale::Finite(cfg.s_or(1.0)), Scale::Infinite];
    let hbars = match cfg.hbar {
        Some(h) => vec![h],
        None => vec![0.25, 0.5],
    };
    let tol = cfg.tolerance("reproducing", 1e-8);
    let holo_tol = cfg.tolerance("holomorphy", 1e-6);
    let phis = {
        let mut v = vec![("1".to_string(), BandLimitedFunction::constant(Complex64::new(1.0, 0.0)))];
        v.extend(character_tests(&[2, 3]));
        v
    };
    let seq = SeedSequence::new(cfg.seed, "coherent-overlap");
    let points: Vec<ComplexGroupElement> =
        (0..draws as u64).map(|i| random_complex_point(&mut seq.stream(i), max_norm)).collect();

    let mut report = VerificationReport::new("coherent-overlap", cfg.seed);
    report.input("draws", draws).input("max_norm", max_norm).input("s", cfg.s_or(1.0)).input("hbar", join(&hbars));
    for &hbar in &hbars {
        for scale in scales {
            let tag = match scale {
                Scale::Finite(s) => format!("s={s}"),
                Scale::Infinite => "s=inf".to_string(),
            };
            let mut worst = vec![0.0f64; phis.len()];
            let mut bound = vec![0.0f64; phis.len()];
            for g in &points {
                let state = match cfg.cutoff {
                    Some(c) => ReducedCoherentState::with_cutoff(*g, scale, hbar, c)?,
                    None => ReducedCoherentState::new(*g, scale, hbar, 1e-12)?,
                };
                for (k, (_, phi)) in phis.iter().enumerate() {
                    let d = (coherent_overlap(&state, phi) - c_transform_k(phi, hbar, g)).norm();
                    worst[k] = worst[k].max(d);
                    // The truncation error of the density, weighted by |phi|.
                    bound[k] = bound[k].max(state.truncation_bound() * phi.sup_bound());
                }
            }
            for (k, (name, _)) in phis.iter().enumerate() {
                if bound[k] > tol {
                    return Err(Error::Truncation {
                        time: hbar,
                        cutoff: cfg.cutoff.unwrap_or(0),
                        bound: bound[k],
                        tolerance: tol,
                    });
                }
                report.push(CheckRow::absolute(
                    format!("hbar={hbar} {tag}: max |<psi_g, {name}> - Phi(g)| over {draws} points"),
                    worst[k],
                    0.0,
                    bound[k],
                    tol,
                ));
            }
        }
    }
    let mut rng = seq.child("holomorphy").stream(0);
    let hbar = hbars[0];
    for i in 0..2 {
        let mut coord =
            || Complex64::new(0.4 * rng.sample::<f64, _>(StandardNormal), 0.4 * rng.sample::<f64, _>(StandardNormal));
        let z0 = ComplexAlgebraVector([coord(), coord(), coord()]);
        for (name, phi) in phis.iter().skip(1) {
            let r = cauchy_riemann_residual(phi, hbar, &z0, 1e-4, 1e-13)?;
            report.push(CheckRow::at_most(
                format!("z{i}: Cauchy-Riemann residual of g -> <chi_g, {name}>"),
                r,
                holo_tol,
            ));
        }
    }
    Ok(report)
}

fn resolution_tests(cfg: &ExperimentConfig, default: &[usize]) -> Result<Vec<TestFunction>> {
    Ok(character_tests(&cfg.dims(default)?)
        .into_iter()
        .map(|(name, f)| if name == "chi1" { ("1".to_string(), f) } else { (name, f) })
        .collect())
}

fn resolution(cfg: &ExperimentConfig) -> Result<VerificationReport> {
    resolution_check(
        &resolution_tests(cfg, &[1, 2, 3])?,
        cfg.s_or(1.0),
        cfg.hbar_or(DEFAULT_HBAR),
        cfg.links_or(64),
        cfg.samples_or(200_000),
        cfg.seed,
        cfg.z(),
    )
}

/// `N` is the lattice size at the first `s`; later entries keep `s/N` fixed,
/// since a link carrying variance of order `s/N` is far from the continuum
/// once `s/N` is not small.
fn nu_limit(cfg: &ExperimentConfig) -> Result<VerificationReport> {
    let schedule = cfg.list_f64("schedule", &DEFAULT_NU_SCHEDULE)?;
    let first = cfg.links_or(64);
    let sizes: Vec<usize> =
        schedule.iter().map(|s| ((first as f64 * s / schedule[0]).round() as usize).max(1)).collect();
    nu_limit_study(
        &resolution_tests(cfg, &[1, 2])?,
        cfg.hbar_or(DEFAULT_HBAR),
        &schedule,
        &sizes,
        cfg.samples_or(100_000),
        cfg.seed,
        cfg.z(),
    )
}

/// The smooth complex connection of the commutativity grid: a seeded real
/// Fourier connection plus, when `imaginary > 0`, the imaginary part
/// `imaginary (e_1 cos 2 pi tau + e_2 sin 2 pi tau)` of constant norm.
pub fn theorem4_connection(
    seed: u64,
    modes: usize,
    amplitude: f64,
    imaginary: f64,
    links: usize,
) -> Result<ComplexLatticeConnection> {
    let real =
        FourierConnection::random(&mut SeedSequence::new(seed, "theorem4-connection").stream(0), modes, amplitude);
    let imag = FourierConnection {
        constant: AlgebraVector::new(0.0, 0.0, 0.0),
        modes: vec![(AlgebraVector::basis(0, imaginary), AlgebraVector::basis(1, imaginary))],
    };
    ComplexLatticeConnection::from_parts(&real.discretize(links), &imag.discretize(links))
}

fn theorem4(cfg: &ExperimentConfig) -> Result<VerificationReport> {
    let s = cfg.s_or(1.0);
    let hbar = cfg.hbar_or(DEFAULT_HBAR);
    let finest = cfg.links_or(64);
    let samples = cfg.samples_or(300_000);
    let collapse_samples = cfg.option_parsed("collapse_samples", 100_000u64)?;
    let modes = cfg.option_count("modes", 3)?;
    let amplitude = cfg.option_positive("amplitude", 0.5)?;
    let imaginary = cfg.option_positive("imaginary", 0.5)?;
    let z = cfg.z();
    let collapse_tol = cfg.tolerance("collapse", 1e-12);
    let mut phis = vec![("1".to_string(), BandLimitedFunction::constant(Complex64::new(1.0, 0.0)))];
    phis.extend(character_tests(&cfg.dims(&[2, 3])?));

    let mut report = VerificationReport::new("theorem4", cfg.seed);
    report
        .input("s", s)
        .input("hbar", hbar)
        .input("N", format!("{} {finest}", finest / 2))
        .input("samples", samples)
        .input("collapse_samples", collapse_samples)
        .input("phi", phis.iter().map(|p| p.0.as_str()).collect::<Vec<_>>().join(" "));

    for (family, im) in [("real Z", 0.0), ("complex Z", imaginary)] {
        let lattices = [finest / 2, finest]
            .iter()
            .map(|&n| {
                let zc = theorem4_connection(cfg.seed, modes, amplitude, im.max(0.0), n)?;
                Ok(if im == 0.0 { zc.re().complexify() } else { zc })
            })
            .collect::<Result<Vec<_>>>()?;
        absorb(&mut report, &format!("{family} "), theorem4_check(&phis, s, hbar, &lattices, samples, cfg.seed, z)?);
    }

    // Collapse: complex connections with equal complex holonomy.
    let characters = &phis[1..];
    let zc = theorem4_connection(cfg.seed, modes, amplitude, imaginary, finest)?;
    let gseq = SeedSequence::new(cfg.seed, "collapse-gauge");
    let mut rng = gseq.stream(0);
    let xi = AlgebraVector::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal));
    let real_loop = LatticeGaugeTransform::sample_smooth(finest, GaugeKind::BasedLoop, |tau| {
        exp_group(&(xi * (std::f64::consts::PI * tau).sin()))
    })?;
    absorb(
        &mut report,
        "",
        collapse_check(
            "real loop",
            characters,
            hbar,
            &zc,
            &real_loop,
            collapse_samples,
            cfg.seed,
            z,
            false,
            collapse_tol,
        )?,
    );
    let eta =
        AlgebraVector::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)) * 0.5;
    let complex_sites: Vec<ComplexGroupElement> = (0..=finest)
        .map(|k| {
            let bump = (std::f64::consts::PI * k as f64 / finest as f64).sin();
            if k == 0 || k == finest {
                ComplexGroupElement::identity()
            } else {
                exp_complex(&ComplexAlgebraVector::from_parts(&(xi * (0.5 * bump)), &(eta * bump)))
            }
        })
        .collect();
    let complex_loop = LatticeGaugeTransform::based_loop(complex_sites)?;
    absorb(
        &mut report,
        "",
        collapse_check(
            "complex loop",
            characters,
            hbar,
            &zc,
            &complex_loop,
            collapse_samples,
            cfg.seed,
            z,
            false,
            collapse_tol,
        )?,
    );
    let (dz, dg) = dyadic_collapse_pair(finest, cfg.seed)?;
    absorb(
        &mut report,
        "",
        collapse_check("dyadic", characters, hbar, &dz, &dg, collapse_samples, cfg.seed, z, true, collapse_tol)?,
    );
    Ok(report)
}

fn submersion(cfg: &ExperimentConfig) -> Result<VerificationReport> {
    let name = cfg.options.get("profile").map_or("r2", String::as_str);
    let profile = radial_profile(name)
        .ok_or_else(|| Error::config("profile", format!("unknown profile `{name}`; expected r2, r3, log or gauss")))?;
    submersion_demo(
        &profile,
        cfg.option_positive("r0", 1.5)?,
        cfg.option_positive("step", DEFAULT_SUBMERSION_STEP)?,
        cfg.tolerance("fd", 1e-6),
    )
}

fn classical_flow(cfg: &ExperimentConfig) -> Result<VerificationReport> {
    let links = cfg.links_or(16);
    let t: f64 = cfg.option_parsed("t", 0.75)?;
    if !t.is_finite() {
        return Err(Error::config("t", "must be finite"));
    }
    let tol = cfg.tolerance("flow", 1e-12);
    let seq = SeedSequence::new(cfg.seed, "classical-flow");
    let a = sample_ps(links, 1.0, &mut seq.stream(0))?;
    let p = sample_ps(links, 1.0, &mut seq.stream(1))?;
    let state = ClassicalState::new(a.clone(), p)?;

    let mut report = VerificationReport::new("classical-flow", cfg.seed);
    report.input("N", links).input("t", t);

    let composed = free_flow(&free_flow(&state, t), t / 3.0);
    let direct = free_flow(&state, t + t / 3.0);
    report.push(CheckRow::absolute(
        "flow(t) then flow(t/3) vs flow(4t/3)",
        composed.position().l2_distance(&direct.position())?,
        0.0,
        0.0,
        tol,
    ));
    let back = free_flow(&free_flow(&state, t), -t);
    report.push(CheckRow::absolute("flow(t) then flow(-t) returns", back.position().l2_distance(&a)?, 0.0, 0.0, tol));
    report.push(CheckRow::flag("energy conserved exactly", free_flow(&state, t).energy() == state.energy()));
    let moved = free_flow(&state, t).position();
    let straight = a.add_scaled(state.momentum(), t)?;
    report.push(CheckRow::absolute("position is A + tP", moved.l2_distance(&straight)?, 0.0, 0.0, tol));

    // Constant commuting data reduce to a geodesic of K and, complexified, to
    // the polar point x e^{iY}.
    let mut rng = seq.stream(2);
    let x = AlgebraVector::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal));
    let y = x * 0.6;
    let constant = ClassicalState::new(LatticeConnection::constant(links, x), LatticeConnection::constant(links, y))?;
    let flowed = free_flow(&constant, t);
    let h = holonomy(&flowed.position());
    let expected = geodesic(&exp_group(&x), &y, t);
    report.push(CheckRow::absolute(
        "constant data: holonomy follows the geodesic",
        h.matrix_distance(&expected),
        0.0,
        0.0,
        tol,
    ));
    let hz = holonomy_complex(&constant.complex_point());
    let polar = polar_compose(&exp_group(&x), &y);
    report.push(CheckRow::absolute(
        "constant data: complex holonomy is x e^(iY)",
        hz.matrix_distance(&polar),
        0.0,
        0.0,
        tol * polar.matrix().norm(),
    ));
    Ok(report)
}
