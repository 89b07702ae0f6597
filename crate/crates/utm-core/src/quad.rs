//! Quadrature building blocks: Gauss-Legendre panels, trapezoid rules, an
//! oscillation-robust Filon rule for ∫ e^{iωt} y(t) dt on uniform grids, and a
//! small adaptive Simpson used by oracle cross-checks.
//!
//! The Filon rule interpolates y quadratically on node pairs and integrates
//! the quadratic against the exact e^{iωt} moments, so its accuracy is uniform
//! in ω. At ω = 0 it reduces exactly to composite Simpson.

use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::error::{Result, UtmError};

type C64 = Complex64;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1], by Newton
/// iteration on the Legendre recurrence. Cached per n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<Mutex<HashMap<usize, (Vec<f64>, Vec<f64>)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&n) {
        return hit.clone();
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-based initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and derivative by recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    cache
        .lock()
        .unwrap()
        .insert(n, (nodes.clone(), weights.clone()));
    (nodes, weights)
}

/// Gauss-Legendre rule mapped to the real interval [a, b].
pub fn gl_panel(a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (t, w) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    (
        t.iter().map(|&ti| mid + half * ti).collect(),
        w.iter().map(|&wi| half * wi).collect(),
    )
}

/// Trapezoid weights on a uniform n-node grid of spacing h.
pub fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    w[0] = 0.5 * h;
    w[n - 1] = 0.5 * h;
    w
}

/// G_p(θ) = ∫₀¹ τ^p e^{iθτ} dτ for p = 0, 1, 2.
fn osc_moments_right(theta: C64) -> [C64; 3] {
    if theta.norm() < 0.5 {
        // series Σ_m (iθ)^m / (m! (m+p+1)); 22 terms reach round-off at |θ| = 1/2
        let z = C64::new(0.0, 1.0) * theta;
        let mut out = [C64::new(0.0, 0.0); 3];
        for p in 0..3 {
            let mut term = C64::new(1.0, 0.0);
            let mut sum = C64::new(0.0, 0.0);
            for m in 0..22u32 {
                sum += term / (m + p + 1) as f64;
                term *= z / (m + 1) as f64;
            }
            out[p as usize] = sum;
        }
        out
    } else {
        let z = C64::new(0.0, 1.0) * theta;
        let ez = z.exp();
        let g0 = (ez - 1.0) / z;
        let g1 = (ez * (z - 1.0) + 1.0) / (z * z);
        let g2 = (ez * (z * z - 2.0 * z + 2.0) - 2.0) / (z * z * z);
        [g0, g1, g2]
    }
}

/// Pair moments over τ ∈ [-1, 1] (full) and τ ∈ [-1, 0] (first half).
fn pair_moments(theta: C64) -> ([C64; 3], [C64; 3]) {
    let g = osc_moments_right(theta);
    let gm = osc_moments_right(-theta);
    // H_p(θ) = ∫_{-1}^0 τ^p e^{iθτ} dτ = (-1)^p G_p(-θ)
    let h = [gm[0], -gm[1], gm[2]];
    let full = [h[0] + g[0], h[1] + g[1], h[2] + g[2]];
    (full, h)
}

fn check_exponent(omega: C64, t_span: f64) -> Result<()> {
    let growth = (-omega.im).max(0.0) * t_span;
    if growth > 700.0 {
        return Err(UtmError::Overflow(growth));
    }
    Ok(())
}

/// ∫_{t0}^{t0+(n-1)dt} e^{iωt} y(t) dt for y sampled on the uniform grid,
/// n odd. Exact for quadratics times the oscillatory kernel.
pub fn filon_integral(y: &[C64], t0: f64, dt: f64, omega: C64) -> Result<C64> {
    let n = y.len();
    if n < 3 || n % 2 == 0 {
        return Err(UtmError::Grid(format!(
            "Filon rule needs an odd node count >= 3, got {n}"
        )));
    }
    let t_end = (t0 + (n - 1) as f64 * dt).abs().max(t0.abs());
    check_exponent(omega, t_end)?;
    let theta = omega * dt;
    let (full, _) = pair_moments(theta);
    let mut sum = C64::new(0.0, 0.0);
    let i = C64::new(0.0, 1.0);
    for p in 0..(n - 1) / 2 {
        let (y0, y1, y2) = (y[2 * p], y[2 * p + 1], y[2 * p + 2]);
        let a = y1;
        let b = (y2 - y0) * 0.5;
        let c = (y2 - 2.0 * y1 + y0) * 0.5;
        let t_mid = t0 + (2 * p + 1) as f64 * dt;
        let phase = (i * omega * t_mid).exp();
        sum += phase * (a * full[0] + b * full[1] + c * full[2]) * dt;
    }
    Ok(sum)
}

/// Cumulative variant: returns ∫_{t0}^{t_j} e^{iωt} y dt at every node t_j.
/// Mid-pair nodes use the exact half-pair moments of the same quadratic.
pub fn filon_cumulative(y: &[C64], t0: f64, dt: f64, omega: C64) -> Result<Vec<C64>> {
    let n = y.len();
    if n < 3 || n % 2 == 0 {
        return Err(UtmError::Grid(format!(
            "Filon rule needs an odd node count >= 3, got {n}"
        )));
    }
    let t_end = (t0 + (n - 1) as f64 * dt).abs().max(t0.abs());
    check_exponent(omega, t_end)?;
    let theta = omega * dt;
    let (full, half) = pair_moments(theta);
    let mut out = vec![C64::new(0.0, 0.0); n];
    let mut acc = C64::new(0.0, 0.0);
    let i = C64::new(0.0, 1.0);
    for p in 0..(n - 1) / 2 {
        let (y0, y1, y2) = (y[2 * p], y[2 * p + 1], y[2 * p + 2]);
        let a = y1;
        let b = (y2 - y0) * 0.5;
        let c = (y2 - 2.0 * y1 + y0) * 0.5;
        let t_mid = t0 + (2 * p + 1) as f64 * dt;
        let phase = (i * omega * t_mid).exp();
        out[2 * p + 1] = acc + phase * (a * half[0] + b * half[1] + c * half[2]) * dt;
        acc += phase * (a * full[0] + b * full[1] + c * full[2]) * dt;
        out[2 * p + 2] = acc;
    }
    Ok(out)
}

/// Effective node weights of the Filon rule: ∫ e^{iωt} y dt = Σ_j w_j y_j.
/// Useful when many integrands share one frequency.
pub fn filon_weights(n: usize, t0: f64, dt: f64, omega: C64) -> Result<Vec<C64>> {
    if n < 3 || n % 2 == 0 {
        return Err(UtmError::Grid(format!(
            "Filon rule needs an odd node count >= 3, got {n}"
        )));
    }
    let t_end = (t0 + (n - 1) as f64 * dt).abs().max(t0.abs());
    check_exponent(omega, t_end)?;
    let theta = omega * dt;
    let (full, _) = pair_moments(theta);
    let i = C64::new(0.0, 1.0);
    let mut w = vec![C64::new(0.0, 0.0); n];
    for p in 0..(n - 1) / 2 {
        let t_mid = t0 + (2 * p + 1) as f64 * dt;
        let phase = (i * omega * t_mid).exp() * dt;
        w[2 * p] += phase * (full[2] - full[1]) * 0.5;
        w[2 * p + 1] += phase * (full[0] - full[2]);
        w[2 * p + 2] += phase * (full[1] + full[2]) * 0.5;
    }
    Ok(w)
}

/// Adaptive Simpson for complex integrands, used only as an independent check
/// against the fixed-grid rules.
pub fn adaptive_simpson<F>(f: &F, a: f64, b: f64, tol: f64) -> Result<C64>
where
    F: Fn(f64) -> C64,
{
    fn simpson(a: f64, b: f64, fa: C64, fm: C64, fb: C64) -> C64 {
        (fa + 4.0 * fm + fb) * ((b - a) / 6.0)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> C64>(
        f: &F,
        a: f64,
        b: f64,
        fa: C64,
        fm: C64,
        fb: C64,
        whole: C64,
        tol: f64,
        depth: u32,
    ) -> Result<C64> {
        if depth > 50 {
            return Err(UtmError::NonConvergent(format!(
                "adaptive Simpson on [{a}, {b}]"
            )));
        }
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        let delta = left + right - whole;
        if delta.norm() <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        Ok(recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)?
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)?)
    }
    let fa = f(a);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(a, b, fa, fm, fb);
    recurse(&f, a, b, fa, fm, fb, whole, tol, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gl_polynomial_exactness() {
        // 10 panels on [0, 1], k^2 integrates to 1/3
        let mut total = 0.0;
        for p in 0..10 {
            let (x, w) = gl_panel(p as f64 / 10.0, (p + 1) as f64 / 10.0, 4);
            total += x.iter().zip(w.iter()).map(|(&xi, &wi)| wi * xi * xi).sum::<f64>();
        }
        assert_relative_eq!(total, 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn gl_high_order_oscillatory() {
        let (x, w) = gl_panel(0.0, 1.0, 40);
        let val: f64 = x.iter().zip(w.iter()).map(|(&xi, &wi)| wi * (10.0 * xi).cos()).sum();
        assert_relative_eq!(val, 10f64.sin() / 10.0, epsilon = 1e-13);
    }

    #[test]
    fn filon_reduces_to_simpson_at_zero_frequency() {
        let n = 9;
        let dt = 0.25;
        let y: Vec<C64> = (0..n)
            .map(|j| C64::new((j as f64 * dt).powi(3) + 1.0, (j as f64 * dt).powi(2)))
            .collect();
        let filon = filon_integral(&y, 0.0, dt, C64::new(0.0, 0.0)).unwrap();
        let mut simpson = C64::new(0.0, 0.0);
        for p in 0..(n - 1) / 2 {
            simpson += (y[2 * p] + 4.0 * y[2 * p + 1] + y[2 * p + 2]) * (dt / 3.0);
        }
        assert!((filon - simpson).norm() < 1e-14);
    }

    #[test]
    fn filon_exact_on_oscillatory_quadratic() {
        // y = t^2, omega = 37.0: rule is exact up to round-off even though
        // the grid badly undersamples the oscillation
        let n = 5;
        let dt = 0.5;
        let omega = C64::new(37.0, 0.0);
        let y: Vec<C64> = (0..n).map(|j| C64::new((j as f64 * dt).powi(2), 0.0)).collect();
        let got = filon_integral(&y, 0.0, dt, omega).unwrap();
        let expect = adaptive_simpson(
            &|t| C64::new(t * t, 0.0) * (C64::new(0.0, 1.0) * omega * t).exp(),
            0.0,
            2.0,
            1e-13,
        )
        .unwrap();
        assert!((got - expect).norm() < 1e-11, "got {got}, expect {expect}");
    }

    #[test]
    fn filon_accuracy_uniform_in_frequency() {
        // y = e^{-t}: fixed grid, errors stay small from omega = 0 to 200
        let n = 33;
        let dt = 1.0 / (n - 1) as f64;
        let y: Vec<C64> = (0..n).map(|j| C64::new((-(j as f64) * dt).exp(), 0.0)).collect();
        for &om in &[0.0, 3.0, 20.0, 80.0, 200.0] {
            let omega = C64::new(om, 0.0);
            let got = filon_integral(&y, 0.0, dt, omega).unwrap();
            let z = C64::new(-1.0, om);
            let expect = (z.exp() - 1.0) / z;
            assert!(
                (got - expect).norm() < 3e-7,
                "omega {om}: got {got}, expect {expect}"
            );
        }
    }

    #[test]
    fn cumulative_endpoint_matches_full_integral() {
        let n = 17;
        let dt = 0.1;
        let omega = C64::new(12.0, 0.3);
        let y: Vec<C64> = (0..n)
            .map(|j| C64::new((j as f64 * dt).sin(), (j as f64 * dt * 0.5).cos()))
            .collect();
        let cum = filon_cumulative(&y, 0.0, dt, omega).unwrap();
        let full = filon_integral(&y, 0.0, dt, omega).unwrap();
        assert!((cum[n - 1] - full).norm() < 1e-13);
        assert!(cum[0].norm() == 0.0);
    }

    #[test]
    fn cumulative_midpair_matches_adaptive() {
        let n = 9;
        let dt = 0.125;
        let omega = C64::new(5.0, 0.0);
        let y: Vec<C64> = (0..n).map(|j| C64::new((j as f64 * dt).exp(), 0.0)).collect();
        let cum = filon_cumulative(&y, 0.0, dt, omega).unwrap();
        for j in [1, 3, 5] {
            let t_j = j as f64 * dt;
            let expect = adaptive_simpson(
                &|t| C64::new(t.exp(), 0.0) * (C64::new(0.0, 1.0) * omega * t).exp(),
                0.0,
                t_j,
                1e-13,
            )
            .unwrap();
            // mid-pair values carry the local O(h^4) interpolation error with
            // no composite cancellation
            assert!((cum[j] - expect).norm() < 1e-4, "node {j}");
        }
    }

    #[test]
    fn overflow_is_loud() {
        let y = vec![C64::new(1.0, 0.0); 3];
        let err = filon_integral(&y, 0.0, 500.0, C64::new(0.0, -10.0));
        assert!(matches!(err, Err(UtmError::Overflow(_))));
    }
}
