//! Thin wrappers around the FFT with the continuous-transform normalization
//! used throughout: forward kernels carry e^{-ik·x} with no prefactor, inverses
//! carry 1/(2π) per axis.
//!
//! Grids are centered: x_j = -L/2 + j·h and k_m = (2π/L)(m - N/2), both
//! ascending. The shift between the FFT's index convention and the centered
//! grids is absorbed into (-1)^j / (-1)^m phase factors.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

type C64 = Complex64;

enum Direction {
    Forward,
    Inverse,
}

fn plan(n: usize, dir: Direction) -> Arc<dyn rustfft::Fft<f64>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn rustfft::Fft<f64>>>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let fwd = matches!(dir, Direction::Forward);
    let mut guard = cache.lock().unwrap();
    guard
        .entry((n, fwd))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if fwd {
                planner.plan_fft_forward(n)
            } else {
                planner.plan_fft_inverse(n)
            }
        })
        .clone()
}

/// Unnormalized DFT, kernel e^{-2πi jm/N}.
pub fn fft_forward(buf: &mut [C64]) {
    plan(buf.len(), Direction::Forward).process(buf);
}

/// Unnormalized inverse DFT, kernel e^{+2πi jm/N}.
pub fn fft_inverse(buf: &mut [C64]) {
    plan(buf.len(), Direction::Inverse).process(buf);
}

/// Trapezoid-on-periodic-grid approximation of ĝ(k) = ∫ e^{-ikx} g(x) dx for
/// g sampled on x_j = -L/2 + j·dx, returned on k_m = (2π/L)(m - N/2).
pub fn fourier_centered_forward(values: &[C64], dx: f64) -> Vec<C64> {
    let n = values.len();
    let half_sign = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let mut buf: Vec<C64> = values
        .iter()
        .enumerate()
        .map(|(j, &v)| if j % 2 == 0 { v } else { -v })
        .collect();
    fft_forward(&mut buf);
    for (m, v) in buf.iter_mut().enumerate() {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        *v *= dx * sign * half_sign;
    }
    buf
}

/// Inverse of `fourier_centered_forward`: g(x) = (1/2π) ∫ e^{ikx} ĝ(k) dk.
pub fn fourier_centered_inverse(spectrum: &[C64], length: f64) -> Vec<C64> {
    let n = spectrum.len();
    let half_sign = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let mut buf: Vec<C64> = spectrum
        .iter()
        .enumerate()
        .map(|(m, &v)| if m % 2 == 0 { v } else { -v })
        .collect();
    fft_inverse(&mut buf);
    for (j, v) in buf.iter_mut().enumerate() {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        *v *= sign * half_sign / length;
    }
    buf
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn centered_nodes(n: usize, l: f64) -> Vec<f64> {
        (0..n).map(|j| -0.5 * l + j as f64 * l / n as f64).collect()
    }

    #[test]
    fn forward_matches_direct_sum() {
        let (n, l) = (16, 7.0);
        let dx = l / n as f64;
        let xs = centered_nodes(n, l);
        let g: Vec<C64> = xs
            .iter()
            .map(|&x| C64::new((0.3 * x).sin(), (-x * x / 9.0).exp()))
            .collect();
        let spec = fourier_centered_forward(&g, dx);
        let dk = 2.0 * std::f64::consts::PI / l;
        for m in 0..n {
            let k = (m as f64 - n as f64 / 2.0) * dk;
            let direct: C64 = xs
                .iter()
                .zip(g.iter())
                .map(|(&x, &v)| v * C64::new(0.0, -k * x).exp() * dx)
                .sum();
            assert_relative_eq!(spec[m].re, direct.re, max_relative = 1e-12, epsilon = 1e-13);
            assert_relative_eq!(spec[m].im, direct.im, max_relative = 1e-12, epsilon = 1e-13);
        }
    }

    #[test]
    fn roundtrip_identity() {
        let (n, l) = (32, 11.0);
        let dx = l / n as f64;
        let g: Vec<C64> = (0..n)
            .map(|j| C64::new((j as f64 * 0.7).sin(), (j as f64 * 1.3).cos()))
            .collect();
        let back = fourier_centered_inverse(&fourier_centered_forward(&g, dx), l);
        for (a, b) in g.iter().zip(back.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn gaussian_closed_form() {
        // F[e^{-x^2}](k) = sqrt(pi) e^{-k^2/4}
        let (n, l) = (128, 30.0);
        let dx = l / n as f64;
        let xs = centered_nodes(n, l);
        let g: Vec<C64> = xs.iter().map(|&x| C64::new((-x * x).exp(), 0.0)).collect();
        let spec = fourier_centered_forward(&g, dx);
        let dk = 2.0 * std::f64::consts::PI / l;
        for m in 0..n {
            let k = (m as f64 - n as f64 / 2.0) * dk;
            let expect = std::f64::consts::PI.sqrt() * (-k * k / 4.0).exp();
            if expect > 1e-12 {
                assert_relative_eq!(spec[m].re, expect, max_relative = 1e-10);
                assert!(spec[m].im.abs() < 1e-12);
            }
        }
    }
}
