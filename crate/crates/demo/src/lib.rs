//! Browser bindings for three views of `SU(2)`:
//!
//! * the heat kernel as a function of the eigen-angle,
//! * `|C_hbar chi_n|` over a slice of the complexified maximal torus,
//! * a histogram of lattice holonomy angles under `P_s` next to the heat kernel density.
//!
//! Each export is a thin wrapper over a plain function so the numerics are
//! testable off the browser.

// `!(x > 0.0)` is deliberate: it rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::PI;

use wasm_bindgen::prelude::*;
use ymsb_core::group::{exp_complex, AlgebraVector, ComplexAlgebraVector};
use ymsb_core::harmonic::{heat_kernel_images_angle, BandLimitedFunction};
use ymsb_core::lattice::{holonomy, sample_ps_seeded};
use ymsb_core::reduced::c_transform_k;
use ymsb_core::Result;

/// Angles `theta_k = pi k / (points - 1)`.
fn angle_grid(points: usize) -> impl Iterator<Item = f64> {
    let step = if points > 1 { PI / (points - 1) as f64 } else { 0.0 };
    (0..points).map(move |k| k as f64 * step)
}

/// Weyl density of the eigen-angle of a Haar-random element on `[0, pi]`.
pub fn haar_angle_density(theta: f64) -> f64 {
    2.0 / PI * theta.sin().powi(2)
}

/// `rho_t(theta)` at evenly spaced angles, followed by the angle density
/// `rho_t(theta) * 2/pi sin^2 theta` at the same angles.
pub fn heat_profile(t: f64, points: usize) -> Vec<f64> {
    let kernel: Vec<f64> = angle_grid(points).map(|th| heat_kernel_images_angle(t, th)).collect();
    let density = angle_grid(points).zip(&kernel).map(|(th, k)| k * haar_angle_density(th));
    kernel.iter().copied().chain(density).collect()
}

/// `|C_hbar chi_n|` at `exp((x + i y) H)` with `H = diag(-i, i)`, row-major with
/// `x` across `[0, pi]` and `y` down `[extent, -extent]`.
pub fn transform_grid(n: usize, hbar: f64, size: usize, extent: f64) -> Vec<f64> {
    let chi = BandLimitedFunction::character(n);
    let xs: Vec<f64> = angle_grid(size).collect();
    let mut out = Vec::with_capacity(size * size);
    for row in 0..size {
        let y = if size > 1 { extent * (1.0 - 2.0 * row as f64 / (size - 1) as f64) } else { 0.0 };
        for &x in &xs {
            // H = 2 e_3; eigenvalues e^{-/+ i (x + i y)}.
            let z =
                ComplexAlgebraVector::from_parts(&AlgebraVector::basis(2, 2.0 * x), &AlgebraVector::basis(2, 2.0 * y));
            out.push(c_transform_k(&chi, hbar, &exp_complex(&z)).norm());
        }
    }
    out
}

/// Normalised histogram of holonomy eigen-angles of `samples` seeded `P_s`
/// draws on `links` links, followed by the heat kernel angle density at the
/// bin centres. Both halves integrate to one over `[0, pi]`.
pub fn holonomy_histogram(links: usize, s: f64, samples: u32, bins: usize, seed: u64) -> Result<Vec<f64>> {
    let width = PI / bins as f64;
    let mut counts = vec![0u64; bins];
    for i in 0..samples {
        let theta = holonomy(&sample_ps_seeded(links, s, seed, u64::from(i))?).eigen_angle();
        counts[((theta / width) as usize).min(bins - 1)] += 1;
    }
    let scale = 1.0 / (f64::from(samples.max(1)) * width);
    let histogram = counts.iter().map(|&c| c as f64 * scale);
    let theory = (0..bins).map(|b| {
        let th = (b as f64 + 0.5) * width;
        heat_kernel_images_angle(s, th) * haar_angle_density(th)
    });
    Ok(histogram.chain(theory).collect())
}

#[wasm_bindgen(js_name = heatProfile)]
pub fn heat_profile_js(t: f64, points: usize) -> std::result::Result<Vec<f64>, JsError> {
    if !(t > 0.0 && t.is_finite()) || points < 2 {
        return Err(JsError::new("need t > 0 and at least two points"));
    }
    Ok(heat_profile(t, points))
}

#[wasm_bindgen(js_name = transformGrid)]
pub fn transform_grid_js(n: usize, hbar: f64, size: usize, extent: f64) -> std::result::Result<Vec<f64>, JsError> {
    if n == 0 || !(hbar > 0.0) || size < 2 || !(extent >= 0.0) {
        return Err(JsError::new("need n >= 1, hbar > 0, size >= 2, extent >= 0"));
    }
    Ok(transform_grid(n, hbar, size, extent))
}

#[wasm_bindgen(js_name = holonomyHistogram)]
pub fn holonomy_histogram_js(
    links: usize,
    s: f64,
    samples: u32,
    bins: usize,
    seed: u32,
) -> std::result::Result<Vec<f64>, JsError> {
    if bins == 0 || samples == 0 {
        return Err(JsError::new("need at least one bin and one sample"));
    }
    holonomy_histogram(links, s, samples, bins, u64::from(seed)).map_err(|e| JsError::new(&e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trapezoid(values: &[f64]) -> f64 {
        let h = PI / (values.len() - 1) as f64;
        h * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[values.len() - 1]))
    }

    #[test]
    fn heat_density_is_a_probability_density() {
        for t in [0.2, 1.0, 3.0] {
            let profile = heat_profile(t, 2001);
            let (kernel, density) = profile.split_at(2001);
            assert!(kernel.iter().all(|&k| k > 0.0));
            assert!((trapezoid(density) - 1.0).abs() < 1e-6, "t={t}");
        }
    }

    #[test]
    fn transform_on_the_real_torus_is_the_damped_character() {
        let (n, hbar) = (3, 0.7);
        let grid = transform_grid(n, hbar, 5, 1.0);
        let damping = (-hbar * (n * n - 1) as f64 / 8.0).exp();
        // Middle row has y = 0: |chi_3(theta)| = |1 + 2 cos 2 theta|.
        for (k, theta) in angle_grid(5).enumerate() {
            let expected = damping * (1.0 + 2.0 * (2.0 * theta).cos()).abs();
            assert!((grid[2 * 5 + k] - expected).abs() < 1e-12);
        }
        // |chi_n| grows off the real slice.
        assert!(grid[0] > grid[2 * 5]);
        assert_eq!(grid[0], grid[4 * 5]);
    }

    #[test]
    fn holonomy_histogram_tracks_heat_density() {
        let bins = 12;
        let out = holonomy_histogram(16, 1.0, 20_000, bins, 7).unwrap();
        let (hist, theory) = out.split_at(bins);
        let width = PI / bins as f64;
        assert!((hist.iter().sum::<f64>() * width - 1.0).abs() < 1e-12);
        // Bin counts are binomial; 5 standard deviations plus the midpoint rule error.
        for (h, p) in hist.iter().zip(theory) {
            let prob = p * width;
            let sd = (prob * (1.0 - prob) / 20_000.0).sqrt() / width;
            assert!((h - p).abs() < 5.0 * sd + 0.02, "{h} vs {p}");
        }
        assert_eq!(out, holonomy_histogram(16, 1.0, 20_000, bins, 7).unwrap());
    }
}
