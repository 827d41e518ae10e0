//! Optical potentials: the near-field Fresnel diffraction (NFFD) trap behind a
//! circular aperture, the scalar optical lattice and the AC Stark shift.
//!
//! Lengths are measured in units of the trap-laser wavelength (so `k = 2 pi`),
//! `hbar = 1`, and the NFFD potential is reported either as an energy (when
//! laser parameters are supplied) or in units of `U0`.
//!
//! The diffracted field is the Rayleigh–Sommerfeld integral over the aperture
//!
//! ```text
//! E(p) / E0 = 1/(2 pi) ∬_{ρ <= a} e^{ikr}/r · z/r · (1/r - ik) dA
//! ```
//!
//! evaluated in polar coordinates centred on the aperture: composite
//! Gauss–Legendre panels in `ρ` (with a break at the radial coordinate of the
//! field point when it lies over the opening) and the periodic trapezoid rule
//! in the azimuth. Both node counts double until successive estimates agree.

use std::f64::consts::PI;

use nalgebra::Vector3;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::{golden_section, GaussLegendre};

/// Trap-laser wavenumber under the `lambda = 1` convention.
pub const WAVENUMBER: f64 = 2.0 * PI;

/// Search window used by [`locate_trap_minimum`].
pub const MINIMUM_SEARCH_WINDOW: (f64, f64) = (0.1, 12.0);
const MINIMUM_SCAN_POINTS: usize = 600;
const MINIMUM_XTOL: f64 = 1e-5;

const PANEL_ORDER: usize = 12;
const PANELS_PER_WAVELENGTH: f64 = 4.0;
const BASE_AZIMUTHAL_NODES: usize = 32;
// Relative convergence is measured against max(|I|, this floor) so that the
// test stays meaningful near field nodes.
const AMPLITUDE_FLOOR: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error(
        "quadrature did not converge within {evaluations} evaluations \
         (error estimate {estimate:e})"
    )]
    Accuracy { estimate: f64, evaluations: usize },
    #[error("no interior potential minimum in z ∈ [{lo}, {hi}]")]
    NotFound { lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, FieldError>;

/// Circular aperture in the screen plane `z = 0`, radius in wavelengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ApertureSpec {
    radius: f64,
}

impl ApertureSpec {
    pub fn new(radius: f64) -> Result<Self> {
        if !radius.is_finite() || radius < 1.0 {
            return Err(FieldError::Domain(format!(
                "aperture radius must be at least one wavelength, got {radius}"
            )));
        }
        Ok(Self { radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn wavelength(&self) -> f64 {
        1.0
    }

    pub fn wavenumber(&self) -> f64 {
        WAVENUMBER
    }

    /// `a / lambda`.
    pub fn fresnel_number(&self) -> f64 {
        self.radius / self.wavelength()
    }
}

impl TryFrom<f64> for ApertureSpec {
    type Error = FieldError;

    fn try_from(radius: f64) -> Result<Self> {
        Self::new(radius)
    }
}

impl From<ApertureSpec> for f64 {
    fn from(ap: ApertureSpec) -> f64 {
        ap.radius
    }
}

/// Incident trap-laser parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapLaserParams {
    /// Incident field amplitude.
    pub e0: f64,
    /// Natural linewidth of the excited state (angular frequency).
    pub gamma_e: f64,
    /// Laser detuning from the atomic transition; negative (red) for a trap.
    pub detuning: f64,
}

impl TrapLaserParams {
    pub fn new(e0: f64, gamma_e: f64, detuning: f64) -> Result<Self> {
        let tl = Self { e0, gamma_e, detuning };
        tl.validate()?;
        Ok(tl)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.detuning < 0.0) || !self.detuning.is_finite() {
            return Err(FieldError::Domain(format!(
                "trap laser must be red detuned (detuning < 0), got {}",
                self.detuning
            )));
        }
        if !(self.gamma_e > 0.0) || !self.gamma_e.is_finite() {
            return Err(FieldError::Domain(format!(
                "linewidth must be positive, got {}",
                self.gamma_e
            )));
        }
        if !(self.e0 > 0.0) || !self.e0.is_finite() {
            return Err(FieldError::Domain(format!(
                "field amplitude must be positive, got {}",
                self.e0
            )));
        }
        Ok(())
    }

    /// Trap depth scale `U0 = 3/8 · Γ/|Δ| · E0² / k³`.
    pub fn u0(&self) -> f64 {
        3.0 / 8.0 * self.gamma_e / self.detuning.abs() * self.e0 * self.e0 / WAVENUMBER.powi(3)
    }
}

impl Default for TrapLaserParams {
    fn default() -> Self {
        Self {
            e0: 1.0,
            gamma_e: 1.0,
            detuning: -1.0,
        }
    }
}

/// Controls for the adaptive aperture quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    /// Relative change between refinement levels at which to stop.
    pub rel_tol: f64,
    /// Hard cap on integrand evaluations per field point.
    pub max_evaluations: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            max_evaluations: 1 << 20,
        }
    }
}

impl QuadratureOptions {
    pub fn with_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

/// Normalized diffracted amplitude `E(p)/E0` with its convergence record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitude {
    pub value: Complex64,
    /// Magnitude of the change produced by the last refinement.
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// `E(p)/E0` with the default quadrature tolerance.
pub fn rs_amplitude(p: &Vector3<f64>, ap: &ApertureSpec) -> Result<Amplitude> {
    rs_amplitude_with(p, ap, &QuadratureOptions::default())
}

pub fn rs_amplitude_with(
    p: &Vector3<f64>,
    ap: &ApertureSpec,
    opts: &QuadratureOptions,
) -> Result<Amplitude> {
    let z = p.z;
    if !(z > 0.0) || !z.is_finite() {
        return Err(FieldError::Domain(format!(
            "field point must lie behind the screen (z > 0), got z = {z}"
        )));
    }
    if !(opts.rel_tol > 0.0) {
        return Err(FieldError::Domain(format!(
            "quadrature tolerance must be positive, got {}",
            opts.rel_tol
        )));
    }
    let a = ap.radius();
    let rho_p = p.x.hypot(p.y);
    let k = ap.wavenumber();

    let mut segments = vec![0.0];
    if rho_p > 0.0 && rho_p < a {
        segments.push(rho_p);
    }
    segments.push(a);

    let rule = GaussLegendre::new(PANEL_ORDER);
    // On the axis the integrand does not depend on the azimuth.
    let on_axis = rho_p == 0.0;

    let mut evaluations = 0usize;
    let mut previous: Option<Complex64> = None;
    let mut last_err = f64::INFINITY;
    for level in 0u32.. {
        let scale = 1usize << level;
        let n_az = if on_axis { 1 } else { BASE_AZIMUTHAL_NODES * scale };
        let az_nodes = if on_axis { 1 } else { n_az / 2 + 1 };
        let radial_nodes: usize = segments
            .windows(2)
            .map(|s| panels_for(s[1] - s[0]) * scale * PANEL_ORDER)
            .sum();
        let cost = radial_nodes * az_nodes;
        if evaluations + cost > opts.max_evaluations {
            return Err(FieldError::Accuracy {
                estimate: last_err,
                evaluations,
            });
        }

        // Trapezoid in the azimuth relative to the field point; the integrand
        // is even in that angle so only half the nodes are evaluated.
        let az: Vec<(f64, f64)> = if on_axis {
            vec![(1.0, 2.0 * PI)]
        } else {
            let h = 2.0 * PI / n_az as f64;
            (0..az_nodes)
                .map(|j| {
                    let w = if j == 0 || j == n_az / 2 { h } else { 2.0 * h };
                    ((j as f64 * h).cos(), w)
                })
                .collect()
        };

        let mut sum = Complex64::new(0.0, 0.0);
        for seg in segments.windows(2) {
            let (lo, hi) = (seg[0], seg[1]);
            let panels = panels_for(hi - lo) * scale;
            let width = (hi - lo) / panels as f64;
            for panel in 0..panels {
                let plo = lo + panel as f64 * width;
                for (rho, wr) in rule.mapped(plo, plo + width) {
                    let base = rho * rho + rho_p * rho_p + z * z;
                    let cross = 2.0 * rho * rho_p;
                    let mut inner = Complex64::new(0.0, 0.0);
                    for &(cos_phi, wa) in &az {
                        let r = (base - cross * cos_phi).sqrt();
                        let inv_r = 1.0 / r;
                        let phase = Complex64::from_polar(1.0, k * r);
                        inner += phase * Complex64::new(inv_r, -k) * (wa * z * inv_r * inv_r);
                    }
                    sum += inner * (wr * rho);
                }
            }
        }
        evaluations += cost;
        let value = sum / (2.0 * PI);

        if let Some(prev) = previous {
            let err = (value - prev).norm();
            last_err = err;
            if err <= opts.rel_tol * value.norm().max(AMPLITUDE_FLOOR) {
                return Ok(Amplitude {
                    value,
                    error_estimate: err.max(f64::EPSILON * value.norm()),
                    evaluations,
                });
            }
        }
        previous = Some(value);
    }
    unreachable!("refinement loop exits through convergence or budget")
}

fn panels_for(len: f64) -> usize {
    ((len * PANELS_PER_WAVELENGTH).ceil() as usize).max(1)
}

/// NFFD trap potential `-U0 |E/E0|²` as an energy.
pub fn nffd_potential(p: &Vector3<f64>, ap: &ApertureSpec, tl: &TrapLaserParams) -> Result<f64> {
    nffd_potential_with(p, ap, tl, &QuadratureOptions::default())
}

pub fn nffd_potential_with(
    p: &Vector3<f64>,
    ap: &ApertureSpec,
    tl: &TrapLaserParams,
    opts: &QuadratureOptions,
) -> Result<f64> {
    tl.validate()?;
    Ok(tl.u0() * potential_in_u0(p, ap, opts)?)
}

/// `U/U0 = -|E/E0|²`.
fn potential_in_u0(p: &Vector3<f64>, ap: &ApertureSpec, opts: &QuadratureOptions) -> Result<f64> {
    let amp = rs_amplitude_with(p, ap, opts)?;
    Ok(-amp.value.norm_sqr())
}

/// Samples of the NFFD potential along the optical axis, in units of `U0`.
#[derive(Debug, Clone, PartialEq)]
pub struct AxialProfile {
    pub aperture: ApertureSpec,
    /// `(z, U/U0)` with `z` strictly increasing.
    pub samples: Vec<(f64, f64)>,
}

impl AxialProfile {
    pub fn z(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.0)
    }

    /// Indices of strict interior local minima.
    pub fn interior_minima(&self) -> Vec<usize> {
        let s = &self.samples;
        (1..s.len().saturating_sub(1))
            .filter(|&i| s[i].1 < s[i - 1].1 && s[i].1 <= s[i + 1].1)
            .collect()
    }

    /// CSV with header `z,u_over_u0`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("z,u_over_u0\n");
        for (z, u) in &self.samples {
            out.push_str(&format!("{z},{u}\n"));
        }
        out
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

pub fn axial_profile(ap: &ApertureSpec, z_lo: f64, z_hi: f64, n: usize) -> Result<AxialProfile> {
    axial_profile_with(ap, z_lo, z_hi, n, &QuadratureOptions::default())
}

pub fn axial_profile_with(
    ap: &ApertureSpec,
    z_lo: f64,
    z_hi: f64,
    n: usize,
    opts: &QuadratureOptions,
) -> Result<AxialProfile> {
    if !(z_lo > 0.0 && z_lo < z_hi && z_hi.is_finite()) {
        return Err(FieldError::Domain(format!(
            "axial range must satisfy 0 < z_lo < z_hi, got [{z_lo}, {z_hi}]"
        )));
    }
    if n < 2 {
        return Err(FieldError::Domain(format!(
            "axial profile needs at least two samples, got {n}"
        )));
    }
    axial_samples(ap, &linspace(z_lo, z_hi, n), opts)
}

fn axial_samples(ap: &ApertureSpec, zs: &[f64], opts: &QuadratureOptions) -> Result<AxialProfile> {
    let samples = zs
        .par_iter()
        .map(|&z| potential_in_u0(&Vector3::new(0.0, 0.0, z), ap, opts).map(|u| (z, u)))
        .collect::<Result<Vec<_>>>()?;
    Ok(AxialProfile {
        aperture: *ap,
        samples,
    })
}

/// Axial position and depth of the trap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrapMinimum {
    pub z_min: f64,
    /// Potential at `z_min` in units of `U0` (negative).
    pub depth: f64,
}

/// Deepest interior axial minimum in [`MINIMUM_SEARCH_WINDOW`]: a 600-point
/// scan picks the well, golden-section search refines it.
pub fn locate_trap_minimum(ap: &ApertureSpec) -> Result<TrapMinimum> {
    locate_trap_minimum_with(ap, &QuadratureOptions::default())
}

pub fn locate_trap_minimum_with(ap: &ApertureSpec, opts: &QuadratureOptions) -> Result<TrapMinimum> {
    let (lo, hi) = MINIMUM_SEARCH_WINDOW;
    let coarse = axial_profile_with(ap, lo, hi, MINIMUM_SCAN_POINTS, opts)?;
    let best = coarse
        .interior_minima()
        .into_iter()
        .min_by(|&i, &j| coarse.samples[i].1.total_cmp(&coarse.samples[j].1))
        .ok_or(FieldError::NotFound { lo, hi })?;

    // Quadrature noise must sit well below the curvature scale of the well.
    let fine = QuadratureOptions {
        rel_tol: opts.rel_tol.min(1e-12),
        ..*opts
    };
    let mut failure = None;
    let result = golden_section(
        |z| match potential_in_u0(&Vector3::new(0.0, 0.0, z), ap, &fine) {
            Ok(u) => u,
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        },
        coarse.samples[best - 1].0,
        coarse.samples[best + 1].0,
        MINIMUM_XTOL,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(TrapMinimum {
        z_min: result.xmin,
        depth: result.fmin,
    })
}

/// Radial/axial sampling grid for [`potential_map`]. The radial coordinate is
/// signed and measured along `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub r: Vec<f64>,
    pub z: Vec<f64>,
}

impl GridSpec {
    pub fn uniform(r: (f64, f64, usize), z: (f64, f64, usize)) -> Self {
        Self {
            r: linspace(r.0, r.1, r.2),
            z: linspace(z.0, z.1, z.2),
        }
    }
}

/// Potential sampled on a [`GridSpec`], row-major with one row per `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialMap {
    pub r: Vec<f64>,
    pub z: Vec<f64>,
    pub u0: f64,
    /// Energies, `values[i * z.len() + j]` at `(r[i], z[j])`.
    pub values: Vec<f64>,
}

impl PotentialMap {
    pub fn get(&self, ir: usize, iz: usize) -> f64 {
        self.values[ir * self.z.len() + iz]
    }

    pub fn row(&self, ir: usize) -> &[f64] {
        let n = self.z.len();
        &self.values[ir * n..(ir + 1) * n]
    }

    /// CSV with header `r,z,u_over_u0`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,z,u_over_u0\n");
        for (ir, r) in self.r.iter().enumerate() {
            for (iz, z) in self.z.iter().enumerate() {
                out.push_str(&format!("{r},{z},{}\n", self.get(ir, iz) / self.u0));
            }
        }
        out
    }
}

pub fn potential_map(ap: &ApertureSpec, tl: &TrapLaserParams, grid: &GridSpec) -> Result<PotentialMap> {
    potential_map_with(ap, tl, grid, &QuadratureOptions::default())
}

pub fn potential_map_with(
    ap: &ApertureSpec,
    tl: &TrapLaserParams,
    grid: &GridSpec,
    opts: &QuadratureOptions,
) -> Result<PotentialMap> {
    tl.validate()?;
    if grid.r.is_empty() || grid.z.is_empty() {
        return Err(FieldError::Domain("potential map grid is empty".into()));
    }
    if let Some(z) = grid.z.iter().find(|z| !(**z > 0.0)) {
        return Err(FieldError::Domain(format!(
            "grid z values must be positive, got {z}"
        )));
    }
    let u0 = tl.u0();
    let nz = grid.z.len();
    let values = (0..grid.r.len() * nz)
        .into_par_iter()
        .map(|idx| {
            let p = Vector3::new(grid.r[idx / nz], 0.0, grid.z[idx % nz]);
            potential_in_u0(&p, ap, opts).map(|u| u * u0)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PotentialMap {
        r: grid.r.clone(),
        z: grid.z.clone(),
        u0,
        values,
    })
}

/// AC Stark shift `|Ω|² / (4Δ)` of the ground state (ħ = 1, linewidth
/// neglected). Red detuning gives a negative, attractive shift.
pub fn stark_shift(omega_eg: f64, delta_eg: f64) -> Result<f64> {
    if delta_eg == 0.0 || !delta_eg.is_finite() {
        return Err(FieldError::Domain(format!(
            "Stark shift needs a finite non-zero detuning, got {delta_eg}"
        )));
    }
    Ok(omega_eg * omega_eg / (4.0 * delta_eg))
}

/// Standing-wave lattice `Σ V0_i cos²(k x_i)` over the active axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub k_lat: f64,
    /// Depth per axis `(x, y, z)`; `None` marks an inactive axis.
    pub depths: [Option<f64>; 3],
}

impl LatticeConfig {
    pub fn new(k_lat: f64, depths: [Option<f64>; 3]) -> Result<Self> {
        if !(k_lat > 0.0) || !k_lat.is_finite() {
            return Err(FieldError::Domain(format!(
                "lattice wavenumber must be positive, got {k_lat}"
            )));
        }
        if let Some(d) = depths.iter().flatten().find(|d| !(**d >= 0.0)) {
            return Err(FieldError::Domain(format!(
                "lattice depths must be non-negative, got {d}"
            )));
        }
        Ok(Self { k_lat, depths })
    }

    /// Isotropic three-axis lattice.
    pub fn cubic(k_lat: f64, depth: f64) -> Result<Self> {
        Self::new(k_lat, [Some(depth); 3])
    }

    /// Lattice period `π / k` (half the lattice-laser wavelength).
    pub fn period(&self) -> f64 {
        PI / self.k_lat
    }
}

pub fn lattice_potential(x: &Vector3<f64>, cfg: &LatticeConfig) -> f64 {
    cfg.depths
        .iter()
        .zip(x.iter())
        .filter_map(|(d, xi)| d.map(|v| v * (cfg.k_lat * xi).cos().powi(2)))
        .sum()
}
