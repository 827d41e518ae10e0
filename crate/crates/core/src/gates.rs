//! Single-qubit gates from the effective two-photon Raman Hamiltonian and the
//! two-qubit collisional phase gate.
//!
//! Adiabatic elimination of the excited level leaves
//! `H = ε/2 σz - Ω0 Ω1 / (4Δ) σx` with `ε = E1 - E0 + (Ω1² - Ω0²)/(4Δ)`,
//! valid for `|Δ| ≫ E1 - E0, Ωi²/|Δ|`. Two-qubit operators use the basis
//! order `(|00⟩, |01⟩, |10⟩, |11⟩)`, first factor = first qubit of the pair.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::ops::Mul;

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::TwoQubitPureState;

/// Unitarity tolerance on `‖U†U - I‖`.
pub const UNITARY_TOL: f64 = 1e-12;
/// Factor by which `|Δ|` must exceed the other scales before the effective
/// Hamiltonian is considered trustworthy.
pub const VALIDITY_MARGIN: f64 = 10.0;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GateError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("matrix is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
}

pub type Result<T> = std::result::Result<T, GateError>;

pub fn sigma_x() -> Matrix2<Complex64> {
    Matrix2::new(ZERO, ONE, ONE, ZERO)
}

pub fn sigma_y() -> Matrix2<Complex64> {
    Matrix2::new(ZERO, -I, I, ZERO)
}

pub fn sigma_z() -> Matrix2<Complex64> {
    Matrix2::new(ONE, ZERO, ZERO, -ONE)
}

/// Two-photon Raman drive through an auxiliary excited level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RamanParams {
    pub omega0: f64,
    pub omega1: f64,
    /// Detuning from the `|0⟩ - |e⟩` transition.
    pub delta: f64,
    /// `E1 - E0`.
    pub e_split: f64,
}

impl RamanParams {
    pub fn new(omega0: f64, omega1: f64, delta: f64, e_split: f64) -> Result<Self> {
        let rp = Self {
            omega0,
            omega1,
            delta,
            e_split,
        };
        rp.validate()?;
        Ok(rp)
    }

    pub fn validate(&self) -> Result<()> {
        if self.delta == 0.0 || !self.delta.is_finite() {
            return Err(GateError::Domain(format!(
                "Raman detuning must be finite and non-zero, got {}",
                self.delta
            )));
        }
        if ![self.omega0, self.omega1, self.e_split].iter().all(|v| v.is_finite()) {
            return Err(GateError::Domain("Raman parameters must be finite".into()));
        }
        Ok(())
    }

    /// Light-shifted splitting `ε`.
    pub fn epsilon(&self) -> f64 {
        self.e_split + (self.omega1 * self.omega1 - self.omega0 * self.omega0) / (4.0 * self.delta)
    }

    /// Effective Rabi coupling `Ω0 Ω1 / (4Δ)`.
    pub fn coupling(&self) -> f64 {
        self.omega0 * self.omega1 / (4.0 * self.delta)
    }

    /// Conditions under which adiabatic elimination is marginal. Empty when
    /// `|Δ|` exceeds every other scale by [`VALIDITY_MARGIN`].
    pub fn validity_warnings(&self) -> Vec<String> {
        let d = self.delta.abs();
        let mut out = Vec::new();
        if d < VALIDITY_MARGIN * self.e_split.abs() {
            out.push(format!("|Δ| = {d} is not ≫ E1 - E0 = {}", self.e_split));
        }
        for (name, om) in [("Ω0", self.omega0), ("Ω1", self.omega1)] {
            let shift = om * om / d;
            if d < VALIDITY_MARGIN * shift {
                out.push(format!("|Δ| = {d} is not ≫ {name}²/|Δ| = {shift}"));
            }
        }
        out
    }
}

/// `ε/2 σz - Ω0 Ω1/(4Δ) σx`.
pub fn effective_hamiltonian(rp: &RamanParams) -> Result<Matrix2<Complex64>> {
    rp.validate()?;
    let half_eps = Complex64::new(0.5 * rp.epsilon(), 0.0);
    let off = Complex64::new(-rp.coupling(), 0.0);
    Ok(Matrix2::new(half_eps, off, off, -half_eps))
}

/// Largest entry of `U†U - I`.
pub fn unitarity_deviation<const N: usize>(
    m: &nalgebra::SMatrix<Complex64, N, N>,
) -> f64 {
    let prod = m.adjoint() * m;
    let mut worst: f64 = 0.0;
    for r in 0..N {
        for c in 0..N {
            let want = if r == c { ONE } else { ZERO };
            worst = worst.max((prod[(r, c)] - want).norm());
        }
    }
    worst
}

/// `|tr(A†B)| / N`: one when the operators agree up to a global phase.
pub fn phase_insensitive_overlap<const N: usize>(
    a: &nalgebra::SMatrix<Complex64, N, N>,
    b: &nalgebra::SMatrix<Complex64, N, N>,
) -> f64 {
    (a.adjoint() * b).trace().norm() / N as f64
}

/// A 2×2 unitary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelUnitary(Matrix2<Complex64>);

impl TwoLevelUnitary {
    pub fn new(m: Matrix2<Complex64>) -> Result<Self> {
        let deviation = unitarity_deviation(&m);
        if !(deviation <= UNITARY_TOL) {
            return Err(GateError::NotUnitary { deviation });
        }
        Ok(Self(m))
    }

    pub fn identity() -> Self {
        Self(Matrix2::identity())
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.0
    }

    pub fn det(&self) -> Complex64 {
        self.0[(0, 0)] * self.0[(1, 1)] - self.0[(0, 1)] * self.0[(1, 0)]
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.0;
        [
            m[(0, 0)] * v[0] + m[(0, 1)] * v[1],
            m[(1, 0)] * v[0] + m[(1, 1)] * v[1],
        ]
    }

    pub fn to_json(&self) -> GateJson {
        GateJson::from_matrix(&self.0)
    }
}

impl Mul for TwoLevelUnitary {
    type Output = TwoLevelUnitary;

    fn mul(self, rhs: Self) -> Self {
        Self(self.0 * rhs.0)
    }
}

/// `exp(-iHt)` in closed form. Writing `H = c I + h·σ`,
/// `U = e^{-ict} (cos(|h|t) I - i sin(|h|t) ĥ·σ)`.
pub fn evolve(h: &Matrix2<Complex64>, t: f64) -> TwoLevelUnitary {
    debug_assert!(t >= 0.0, "evolution time must be non-negative");
    let c = 0.5 * (h[(0, 0)].re + h[(1, 1)].re);
    let hz = 0.5 * (h[(0, 0)].re - h[(1, 1)].re);
    let hx = h[(1, 0)].re;
    let hy = h[(1, 0)].im;
    let norm = (hx * hx + hy * hy + hz * hz).sqrt();
    let (cos, sinc) = if norm == 0.0 {
        (1.0, t)
    } else {
        ((norm * t).cos(), (norm * t).sin() / norm)
    };
    let global = Complex64::from_polar(1.0, -c * t);
    let n = Complex64::new(0.0, -sinc);
    let m = Matrix2::new(
        Complex64::new(cos, 0.0) + n * hz,
        n * Complex64::new(hx, -hy),
        n * Complex64::new(hx, hy),
        Complex64::new(cos, 0.0) - n * hz,
    );
    TwoLevelUnitary(m * global)
}

/// `exp(-i angle σz / 2)`.
pub fn rz(angle: f64) -> TwoLevelUnitary {
    evolve(&(sigma_z() * Complex64::new(0.5 * angle, 0.0)), 1.0)
}

/// `exp(-i angle σx / 2)`.
pub fn rx(angle: f64) -> TwoLevelUnitary {
    evolve(&(sigma_x() * Complex64::new(0.5 * angle, 0.0)), 1.0)
}

/// Walsh–Hadamard gate.
pub fn hadamard() -> TwoLevelUnitary {
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    TwoLevelUnitary(Matrix2::new(s, s, s, -s))
}

/// Laser settings available for synthesizing pulses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSettings {
    /// Rabi frequency of the `|0⟩` leg during coupling pulses.
    pub omega: f64,
    pub delta: f64,
    pub e_split: f64,
}

impl Default for PulseSettings {
    fn default() -> Self {
        Self {
            omega: 1.0,
            delta: -20.0,
            e_split: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PulseAxis {
    X,
    Z,
}

/// One constant-parameter Raman pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RamanPulse {
    pub axis: PulseAxis,
    pub params: RamanParams,
    pub duration: f64,
}

impl RamanPulse {
    pub fn unitary(&self) -> TwoLevelUnitary {
        let h = effective_hamiltonian(&self.params).expect("pulse parameters are validated");
        evolve(&h, self.duration)
    }
}

/// Euler decomposition `U = e^{iγ} Rz(α) Rx(β) Rz(δ)` realized as three
/// Raman pulses, applied in time order `Rz(δ)`, `Rx(β)`, `Rz(α)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PulseRecipe {
    pub global_phase: f64,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    /// Pulses in the order they are applied.
    pub pulses: Vec<RamanPulse>,
}

impl PulseRecipe {
    /// Product of the pulse propagators (no global phase).
    pub fn unitary(&self) -> TwoLevelUnitary {
        self.pulses
            .iter()
            .fold(TwoLevelUnitary::identity(), |acc, p| p.unitary() * acc)
    }
}

/// ZXZ Euler angles `(γ, α, β, δ)` of a unitary.
pub fn zxz_angles(u: &TwoLevelUnitary) -> (f64, f64, f64, f64) {
    let gamma = 0.5 * u.det().arg();
    let v = u.0 * Complex64::from_polar(1.0, -gamma);
    // v = [[c e^{-i(α+δ)/2}, -i s e^{-i(α-δ)/2}], [-i s e^{i(α-δ)/2}, c e^{i(α+δ)/2}]]
    let c = v[(0, 0)].norm();
    let s = v[(1, 0)].norm();
    let beta = 2.0 * s.atan2(c);
    let sum = if c > 1e-14 { -2.0 * v[(0, 0)].arg() } else { 0.0 };
    let diff = if s > 1e-14 {
        2.0 * (v[(1, 0)] * I).arg()
    } else {
        0.0
    };
    let alpha = 0.5 * (sum + diff);
    let delta = 0.5 * (sum - diff);
    (gamma, alpha, beta, delta)
}

/// Pulse recipe reproducing `u` up to global phase.
pub fn synthesize_zxz(u: &TwoLevelUnitary, settings: &PulseSettings) -> Result<PulseRecipe> {
    let (gamma, alpha, beta, delta) = zxz_angles(u);
    let pulses = vec![
        z_pulse(delta, settings)?,
        x_pulse(beta, settings)?,
        z_pulse(alpha, settings)?,
    ];
    Ok(PulseRecipe {
        global_phase: gamma,
        alpha,
        beta,
        delta,
        pulses,
    })
}

/// Walsh–Hadamard as a Raman pulse sequence.
pub fn hadamard_recipe(settings: &PulseSettings) -> Result<PulseRecipe> {
    synthesize_zxz(&hadamard(), settings)
}

/// Angle reduced into `[0, 4π)` (or `(-4π, 0]` when the rate is negative);
/// rotations are 4π-periodic so this preserves the operator exactly.
fn duration_for(angle: f64, rate: f64) -> f64 {
    let period = 4.0 * PI;
    let mut a = angle.rem_euclid(period);
    if rate < 0.0 && a != 0.0 {
        a -= period;
    }
    a / rate
}

/// Free precession at the bare splitting with both Raman beams off.
fn z_pulse(angle: f64, s: &PulseSettings) -> Result<RamanPulse> {
    let params = RamanParams::new(0.0, 0.0, s.delta, s.e_split)?;
    let rate = params.epsilon();
    if rate == 0.0 {
        return Err(GateError::Domain("z rotations need a non-zero splitting".into()));
    }
    Ok(RamanPulse {
        axis: PulseAxis::Z,
        params,
        duration: duration_for(angle, rate),
    })
}

/// Coupling pulse with `Ω1` chosen so the differential light shift cancels
/// the bare splitting (`ε = 0`).
fn x_pulse(angle: f64, s: &PulseSettings) -> Result<RamanPulse> {
    let omega1_sq = s.omega * s.omega - 4.0 * s.delta * s.e_split;
    if !(omega1_sq > 0.0) {
        return Err(GateError::Domain(format!(
            "no Ω1 cancels the splitting for Ω0 = {}, Δ = {}, E1 - E0 = {}",
            s.omega, s.delta, s.e_split
        )));
    }
    let params = RamanParams::new(s.omega, omega1_sq.sqrt(), s.delta, s.e_split)?;
    // exp(i Ω0Ω1/(4Δ) t σx) = Rx(-Ω0Ω1 t / (2Δ))
    let rate = -2.0 * params.coupling();
    Ok(RamanPulse {
        axis: PulseAxis::X,
        params,
        duration: duration_for(angle, rate),
    })
}

/// Contact interaction held for `t_hold`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollisionParams {
    /// On-site interaction energy `U`.
    pub u_int: f64,
    pub t_hold: f64,
}

impl CollisionParams {
    pub fn new(u_int: f64, t_hold: f64) -> Result<Self> {
        let cp = Self { u_int, t_hold };
        cp.validate()?;
        Ok(cp)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_hold >= 0.0) || !self.t_hold.is_finite() || !self.u_int.is_finite() {
            return Err(GateError::Domain(format!(
                "collision needs finite U and t_hold >= 0, got U = {}, t_hold = {}",
                self.u_int, self.t_hold
            )));
        }
        Ok(())
    }

    /// Phase factor `e^{-i U t_hold}`.
    pub fn phase(&self) -> Complex64 {
        Complex64::from_polar(1.0, -self.u_int * self.t_hold)
    }
}

/// `diag(1, e^{-iU t_hold}, 1, 1)`: only `|0⟩|1⟩` picks up the phase.
pub fn collision_phase_gate(cp: &CollisionParams) -> Matrix4<Complex64> {
    let mut m = Matrix4::identity();
    m[(1, 1)] = cp.phase();
    m
}

/// `A ⊗ B` with the first factor as the more significant qubit.
pub fn kron(a: &TwoLevelUnitary, b: &TwoLevelUnitary) -> Matrix4<Complex64> {
    Matrix4::from_fn(|r, c| a.0[(r / 2, c / 2)] * b.0[(r % 2, c % 2)])
}

/// Output of the Walsh–Hadamard plus collision sequence on `|00⟩`:
/// `½(|00⟩ + e^{-iU t_hold}|01⟩ + |10⟩ + |11⟩)`.
pub fn mandel_output(cp: &CollisionParams) -> TwoQubitPureState {
    let h = Complex64::new(0.5, 0.0);
    TwoQubitPureState::new_unchecked([h, h * cp.phase(), h, h])
}

/// Local gates `(before_i, after_i)` turning the `|0⟩|1⟩` phase gate at
/// `U t_hold = π` into a standard controlled-Z: `CZ = (X⊗I) P (X⊗I)`.
///
/// This completion is a convention of this crate; the collision itself only
/// fixes the phase on `|0⟩|1⟩`.
pub fn controlled_z_completion() -> (TwoLevelUnitary, TwoLevelUnitary) {
    let x = TwoLevelUnitary(sigma_x());
    (x, x)
}

/// Row-major `[re, im]` serialization of a square gate matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateJson {
    pub dim: usize,
    pub data: Vec<[f64; 2]>,
}

impl GateJson {
    pub fn from_matrix<const N: usize>(m: &nalgebra::SMatrix<Complex64, N, N>) -> Self {
        let data = (0..N)
            .flat_map(|r| (0..N).map(move |c| (r, c)))
            .map(|(r, c)| [m[(r, c)].re, m[(r, c)].im])
            .collect();
        Self { dim: N, data }
    }
}
