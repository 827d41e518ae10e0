//! Independent reference computations used to check the main code paths.
//!
//! Nothing in the simulator calls into this module; it exists for the test
//! suites and the `selftest` command.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;

use crate::fields::WAVENUMBER;

/// Exact on-axis field behind a circular aperture of radius `a`:
/// `e^{ikz} - z/√(z²+a²) · e^{ik√(z²+a²)}`.
pub fn on_axis_amplitude(z: f64, a: f64) -> Complex64 {
    let k = WAVENUMBER;
    let rim = (z * z + a * a).sqrt();
    Complex64::from_polar(1.0, k * z) - Complex64::from_polar(z / rim, k * rim)
}

/// Grid argmin of `f` over `n` uniformly spaced points of `[lo, hi)`.
pub fn dense_scan_argmin<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> f64 {
    let step = (hi - lo) / n as f64;
    let mut best = (lo, f64::INFINITY);
    for i in 0..n {
        let x = lo + step * i as f64;
        let v = f(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    best.0
}

/// Distance between `a` and `b` modulo `period`.
pub fn periodic_distance(a: f64, b: f64, period: f64) -> f64 {
    let d = (a - b).rem_euclid(period);
    d.min(period - d)
}

/// `exp(-iHt)` by scaling and squaring a 30-term Taylor series.
pub fn expm_taylor(h: &Matrix2<Complex64>, t: f64) -> Matrix2<Complex64> {
    let a = h * Complex64::new(0.0, -t);
    let norm = a.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = a / Complex64::new(2f64.powi(squarings as i32), 0.0);
    let mut term = Matrix2::<Complex64>::identity();
    let mut sum = term;
    for n in 1..30 {
        term = term * scaled / Complex64::new(n as f64, 0.0);
        sum += term;
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// `n` steps of `exp(-iH t/n)`, each from [`expm_taylor`].
pub fn trotter_product(h: &Matrix2<Complex64>, t: f64, steps: usize) -> Matrix2<Complex64> {
    let step = expm_taylor(h, t / steps as f64);
    (0..steps).fold(Matrix2::identity(), |acc, _| step * acc)
}

/// Rabi transition probability `sin²(Ω0 Ω1 t / (4Δ))` for a resonant
/// (`ε = 0`) Raman drive.
pub fn rabi_probability(omega0: f64, omega1: f64, delta: f64, t: f64) -> f64 {
    (omega0 * omega1 * t / (4.0 * delta)).sin().powi(2)
}

/// Pure-state concurrence via the reduced purity, `√(2(1 - tr ρ_A²))`.
pub fn concurrence_from_purity(amps: &[Complex64; 4]) -> f64 {
    let [a00, a01, a10, a11] = *amps;
    let r00 = a00.norm_sqr() + a01.norm_sqr();
    let r11 = a10.norm_sqr() + a11.norm_sqr();
    let r01 = a00 * a10.conj() + a01 * a11.conj();
    let purity = r00 * r00 + r11 * r11 + 2.0 * r01.norm_sqr();
    (2.0 * (1.0 - purity)).max(0.0).sqrt()
}

/// Dense 4×4 product `M · v`.
pub fn apply4(m: &Matrix4<Complex64>, v: &[Complex64; 4]) -> [Complex64; 4] {
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for (r, o) in out.iter_mut().enumerate() {
        for (c, x) in v.iter().enumerate() {
            *o += m[(r, c)] * x;
        }
    }
    out
}

/// Walsh–Hadamard written out entry by entry.
pub fn hadamard_matrix() -> Matrix2<Complex64> {
    let s = Complex64::new(1.0 / 2f64.sqrt(), 0.0);
    Matrix2::new(s, s, s, -s)
}

/// Matrix for the Hadamard-then-collision sequence on a pair:
/// `diag(1, e^{-iφ}, 1, 1) · (H ⊗ H)`.
pub fn hadamard_collision_matrix(phase_angle: f64) -> Matrix4<Complex64> {
    let h = hadamard_matrix();
    let hh = Matrix4::from_fn(|r, c| h[(r / 2, c / 2)] * h[(r % 2, c % 2)]);
    let mut p = Matrix4::identity();
    p[(1, 1)] = Complex64::from_polar(1.0, -phase_angle);
    p * hh
}

/// `|sin(x/2)|`, the concurrence of the gate output as a function of `U t_hold`.
pub fn expected_concurrence(x: f64) -> f64 {
    (0.5 * x).sin().abs()
}

/// Uniformly spaced angles in `[0, 2π)`.
pub fn phase_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect()
}
