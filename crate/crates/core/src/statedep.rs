//! Polarization-controlled, hyperfine-state-dependent optical lattices.
//!
//! Two counterpropagating beams with polarizations tilted by `±θ` superpose
//! into σ⁺ and σ⁻ standing waves `cos(kx - θ)` and `-cos(kx + θ)`. Their light
//! shifts `V± = -V_L cos²(kx ∓ θ)` are mixed with scheme-dependent weights into
//! the potentials seen by the qubit states `|0⟩` and `|1⟩`. Changing `θ`
//! drags the two components in opposite directions, which is what brings
//! `|0⟩` of one atom into the well holding `|1⟩` of its partner.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Samples per π/2 of polarization-angle change in generated ramps.
pub const SAMPLES_PER_QUARTER_TURN: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransportError {
    #[error("degenerate lattice: equal weights give zero modulation at θ = {theta}")]
    Degenerate { theta: f64 },
    #[error("branch jump of {jump} at ramp sample {index} (limit π/(2k) = {limit})")]
    Tracking { index: usize, jump: f64, limit: f64 },
    #[error("start position {x_start} is not a lattice minimum (nearest {nearest})")]
    NotOnMinimum { x_start: f64, nearest: f64 },
    #[error("invalid ramp: {0}")]
    InvalidRamp(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("scheduling error: {0}")]
    Scheduling(String),
}

pub type Result<T> = std::result::Result<T, TransportError>;

/// Which internal state a lattice weight row applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Component {
    Zero,
    One,
}

/// Weights of `V+` and `V-` in one component's potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentWeights {
    pub plus: f64,
    pub minus: f64,
}

impl ComponentWeights {
    pub const fn new(plus: f64, minus: f64) -> Self {
        Self { plus, minus }
    }

    /// Well velocity `dx_min/dθ` at `θ = 0`: `(w+ - w-) / (k (w+ + w-))`.
    /// Its sign is the direction the component moves as θ increases.
    pub fn drift_rate(&self, k: f64) -> f64 {
        (self.plus - self.minus) / (k * (self.plus + self.minus))
    }
}

/// Decomposition of the qubit states onto the σ± light shifts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum WeightScheme {
    /// `V0 = 3/4 V+ + 1/4 V-`, `V1 = V-`.
    Mandel,
    /// `V0 = 1/4 V+ + 3/4 V-`, `V1 = 3/4 V+ + 1/4 V-`.
    RamanBasis,
}

impl WeightScheme {
    pub fn weights(self, c: Component) -> ComponentWeights {
        match (self, c) {
            (Self::Mandel, Component::Zero) => ComponentWeights::new(0.75, 0.25),
            (Self::Mandel, Component::One) => ComponentWeights::new(0.0, 1.0),
            (Self::RamanBasis, Component::Zero) => ComponentWeights::new(0.25, 0.75),
            (Self::RamanBasis, Component::One) => ComponentWeights::new(0.75, 0.25),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Mandel => "MANDEL",
            Self::RamanBasis => "RAMAN_BASIS",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDepConfig {
    /// Well depth `V_L >= 0`.
    pub depth: f64,
    pub k_lat: f64,
    pub scheme: WeightScheme,
}

impl StateDepConfig {
    pub fn new(depth: f64, k_lat: f64, scheme: WeightScheme) -> Result<Self> {
        let cfg = Self { depth, k_lat, scheme };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.depth >= 0.0) || !self.depth.is_finite() {
            return Err(TransportError::Geometry(format!(
                "lattice depth must be non-negative, got {}",
                self.depth
            )));
        }
        if !(self.k_lat > 0.0) || !self.k_lat.is_finite() {
            return Err(TransportError::Geometry(format!(
                "lattice wavenumber must be positive, got {}",
                self.k_lat
            )));
        }
        Ok(())
    }

    /// Lattice period `π/k`.
    pub fn period(&self) -> f64 {
        PI / self.k_lat
    }
}

/// Piecewise-linear polarization-angle schedule `θ(t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaRamp {
    samples: Vec<(f64, f64)>,
}

impl ThetaRamp {
    /// Validates strictly increasing times and `|Δθ| < π/2` between samples.
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.is_empty() {
            return Err(TransportError::InvalidRamp("ramp has no samples".into()));
        }
        if samples.iter().any(|(t, th)| !t.is_finite() || !th.is_finite()) {
            return Err(TransportError::InvalidRamp("non-finite sample".into()));
        }
        for (i, w) in samples.windows(2).enumerate() {
            if !(w[1].0 > w[0].0) {
                return Err(TransportError::InvalidRamp(format!(
                    "times must increase strictly (sample {})",
                    i + 1
                )));
            }
            if (w[1].1 - w[0].1).abs() >= FRAC_PI_2 {
                return Err(TransportError::InvalidRamp(format!(
                    "θ jumps by {} at sample {}",
                    w[1].1 - w[0].1,
                    i + 1
                )));
            }
        }
        Ok(Self { samples })
    }

    /// Linear ramp from `theta0` to `theta1` over `[t0, t1]`, with at least
    /// [`SAMPLES_PER_QUARTER_TURN`] segments per π/2 of angle (and never fewer
    /// than that in total).
    pub fn linear(t0: f64, t1: f64, theta0: f64, theta1: f64) -> Result<Self> {
        if !(t1 > t0) {
            return Err(TransportError::InvalidRamp(format!(
                "ramp duration must be positive, got [{t0}, {t1}]"
            )));
        }
        let quarter_turns = (theta1 - theta0).abs() / FRAC_PI_2;
        let segments = ((quarter_turns * SAMPLES_PER_QUARTER_TURN as f64).ceil() as usize)
            .max(SAMPLES_PER_QUARTER_TURN);
        let samples = (0..=segments)
            .map(|m| {
                let s = m as f64 / segments as f64;
                let t = if m == segments { t1 } else { t0 + (t1 - t0) * s };
                let th = if m == segments {
                    theta1
                } else {
                    theta0 + (theta1 - theta0) * s
                };
                (t, th)
            })
            .collect();
        Self::new(samples)
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn thetas(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.1)
    }

    pub fn start_time(&self) -> f64 {
        self.samples[0].0
    }

    pub fn end_time(&self) -> f64 {
        self.samples[self.samples.len() - 1].0
    }

    /// The same angles visited backwards, starting at `t_start` and keeping
    /// the original time steps.
    pub fn reversed_from(&self, t_start: f64) -> Self {
        let t_end = self.end_time();
        let samples = self
            .samples
            .iter()
            .rev()
            .map(|&(t, th)| (t_start + (t_end - t), th))
            .collect();
        Self { samples }
    }

    /// Joins `other` onto `self`; the first sample of `other` must repeat the
    /// last sample of `self`.
    pub fn concat(&self, other: &ThetaRamp) -> Result<Self> {
        let last = self.samples[self.samples.len() - 1];
        let first = other.samples[0];
        if last != first {
            return Err(TransportError::InvalidRamp(
                "concatenated ramps must share their junction sample".into(),
            ));
        }
        let mut samples = self.samples.clone();
        samples.extend_from_slice(&other.samples[1..]);
        Self::new(samples)
    }
}

/// σ± field envelopes `(cos(kx - θ), -cos(kx + θ))`.
pub fn sigma_components(x: f64, theta: f64, k: f64) -> (f64, f64) {
    ((k * x - theta).cos(), -(k * x + theta).cos())
}

/// Light shifts `(V+, V-) = (-V_L cos²(kx - θ), -V_L cos²(kx + θ))`.
pub fn v_plus_minus(x: f64, theta: f64, cfg: &StateDepConfig) -> (f64, f64) {
    let (p, m) = sigma_components(x, theta, cfg.k_lat);
    (-cfg.depth * p * p, -cfg.depth * m * m)
}

/// Weighted light shift felt by one component.
pub fn component_potential(x: f64, theta: f64, w: ComponentWeights, cfg: &StateDepConfig) -> f64 {
    let (vp, vm) = v_plus_minus(x, theta, cfg);
    w.plus * vp + w.minus * vm
}

/// `(V_|0⟩, V_|1⟩)` under the configured weight scheme.
pub fn qubit_potential(x: f64, theta: f64, cfg: &StateDepConfig) -> (f64, f64) {
    let (vp, vm) = v_plus_minus(x, theta, cfg);
    let w0 = cfg.scheme.weights(Component::Zero);
    let w1 = cfg.scheme.weights(Component::One);
    (w0.plus * vp + w0.minus * vm, w1.plus * vp + w1.minus * vm)
}

/// Location of the well of `w+ V+ + w- V-` nearest to `branch_hint`.
///
/// With `A = w+ e^{-2iθ} + w- e^{2iθ} = |A| e^{iφ}` the weighted potential is
/// `-V_L/2 (w+ + w- + |A| cos(2kx + φ))`, so the minima sit at
/// `x = -φ/(2k) + nπ/k`.
pub fn component_minimum(theta: f64, w: ComponentWeights, k: f64, branch_hint: f64) -> Result<f64> {
    let total = w.plus + w.minus;
    if !(total > 0.0) {
        return Err(TransportError::Geometry(format!(
            "component weights must have a positive sum, got {} + {}",
            w.plus, w.minus
        )));
    }
    let a = w.plus * Complex64::from_polar(1.0, -2.0 * theta)
        + w.minus * Complex64::from_polar(1.0, 2.0 * theta);
    if a.norm() <= 1e-12 * total {
        return Err(TransportError::Degenerate { theta });
    }
    let period = PI / k;
    let base = -a.arg() / (2.0 * k);
    let n = ((branch_hint - base) / period).round();
    Ok(base + n * period)
}

/// Branch-tracked well position along a ramp, as `(t, x_min)`.
pub fn transport_trajectory(
    ramp: &ThetaRamp,
    w: ComponentWeights,
    k: f64,
    x_start: f64,
) -> Result<Vec<(f64, f64)>> {
    let limit = PI / (2.0 * k);
    let (t0, th0) = ramp.samples[0];
    let x0 = component_minimum(th0, w, k, x_start)?;
    if (x0 - x_start).abs() > 1e-9 * (PI / k) {
        return Err(TransportError::NotOnMinimum {
            x_start,
            nearest: x0,
        });
    }
    let mut out = Vec::with_capacity(ramp.len());
    out.push((t0, x_start));
    let mut x = x_start;
    for (index, &(t, th)) in ramp.samples.iter().enumerate().skip(1) {
        let next = component_minimum(th, w, k, x)?;
        let jump = (next - x).abs();
        if jump >= limit {
            return Err(TransportError::Tracking { index, jump, limit });
        }
        x = next;
        out.push((t, x));
    }
    Ok(out)
}

/// A forward ramp that brings two wells together followed by its exact
/// reverse.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollisionRamp {
    pub forward: ThetaRamp,
    pub reverse: ThetaRamp,
    /// Polarization angle at which the wells coincide.
    pub theta_meet: f64,
    /// Common well position at `theta_meet`.
    pub meeting_point: f64,
}

impl CollisionRamp {
    /// Forward and reverse ramps joined at the turning point.
    pub fn full(&self) -> ThetaRamp {
        self.forward
            .concat(&self.reverse)
            .expect("reverse ramp starts where the forward ramp ends")
    }
}

/// Tracks several wells, each with its own weights and start, as θ moves
/// away from zero.
struct WellSet<'a> {
    weights: &'a [ComponentWeights],
    k: f64,
}

impl WellSet<'_> {
    fn advance(&self, theta: f64, hints: &[f64]) -> Result<Vec<f64>> {
        self.weights
            .iter()
            .zip(hints)
            .map(|(&w, &h)| component_minimum(theta, w, self.k, h))
            .collect()
    }

    /// Smallest `|θ|` (searching both signs up to `theta_limit`) at which
    /// `gap(positions)` crosses zero, refined by bisection.
    fn solve<G: Fn(&[f64]) -> f64>(
        &self,
        starts: &[f64],
        gap: G,
        theta_limit: f64,
    ) -> Result<Option<(f64, Vec<f64>)>> {
        let step = FRAC_PI_2 / (2 * SAMPLES_PER_QUARTER_TURN) as f64;
        if gap(starts).abs() == 0.0 {
            return Ok(Some((0.0, starts.to_vec())));
        }
        let mut best: Option<(f64, Vec<f64>)> = None;
        for dir in [1.0, -1.0] {
            let mut th: f64 = 0.0;
            let mut pos = starts.to_vec();
            let mut g = gap(&pos);
            while th.abs() < theta_limit {
                let th_next = th + dir * step;
                let pos_next = self.advance(th_next, &pos)?;
                let g_next = gap(&pos_next);
                if g_next == 0.0 || g_next.signum() != g.signum() {
                    let found = self.bisect(th, &pos, g, th_next, &gap)?;
                    if best.as_ref().is_none_or(|b| found.0.abs() < b.0.abs()) {
                        best = Some(found);
                    }
                    break;
                }
                th = th_next;
                pos = pos_next;
                g = g_next;
            }
        }
        Ok(best)
    }

    fn bisect<G: Fn(&[f64]) -> f64>(
        &self,
        mut lo: f64,
        lo_pos: &[f64],
        mut g_lo: f64,
        mut hi: f64,
        gap: &G,
    ) -> Result<(f64, Vec<f64>)> {
        // hints stay anchored at the bracket start; the bracket is far
        // narrower than a branch spacing
        let mut pos = self.advance(hi, lo_pos)?;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            let pm = self.advance(mid, lo_pos)?;
            let gm = gap(&pm);
            if gm == 0.0 {
                return Ok((mid, pm));
            }
            if gm.signum() == g_lo.signum() {
                lo = mid;
                g_lo = gm;
            } else {
                hi = mid;
                pos = pm;
            }
        }
        Ok((hi, pos))
    }
}

fn ramp_pair(theta_meet: f64) -> Result<(ThetaRamp, ThetaRamp)> {
    let forward = ThetaRamp::linear(0.0, 1.0, 0.0, theta_meet)?;
    let reverse = forward.reversed_from(forward.end_time());
    Ok((forward, reverse))
}

/// Lattice sites are at `site · pitch`; `pitch` must be a whole number of
/// lattice periods.
fn check_pitch(pitch: f64, k: f64) -> Result<()> {
    let period = PI / k;
    let ratio = pitch / period;
    if !(pitch > 0.0) || (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) || ratio.round() < 1.0 {
        return Err(TransportError::Geometry(format!(
            "pitch {pitch} is not a positive integer multiple of the lattice period {period}"
        )));
    }
    Ok(())
}

/// Ramp that makes `|0⟩` starting at `site_i` and `|1⟩` starting at `site_j`
/// share a well, followed by the reversal that returns them.
pub fn collision_schedule(
    site_i: i64,
    site_j: i64,
    pitch: f64,
    k: f64,
    cfg: &StateDepConfig,
) -> Result<CollisionRamp> {
    cfg.validate()?;
    if site_i == site_j {
        return Err(TransportError::Geometry(format!(
            "collision needs two distinct sites, got {site_i} twice"
        )));
    }
    check_pitch(pitch, k)?;
    let xi = site_i as f64 * pitch;
    let xj = site_j as f64 * pitch;
    let weights = [
        cfg.scheme.weights(Component::Zero),
        cfg.scheme.weights(Component::One),
    ];
    let wells = WellSet { weights: &weights, k };
    let separation_periods = ((xi - xj).abs() * k / PI).round();
    let limit = (separation_periods + 1.0) * 2.0 * PI;
    let (theta_meet, pos) = wells
        .solve(&[xi, xj], |p| p[0] - p[1], limit)?
        .ok_or_else(|| {
            TransportError::Scheduling(format!(
                "{} wells from sites {site_i} and {site_j} never meet",
                cfg.scheme.name()
            ))
        })?;
    let (forward, reverse) = ramp_pair(theta_meet)?;
    Ok(CollisionRamp {
        forward,
        reverse,
        theta_meet,
        meeting_point: 0.5 * (pos[0] + pos[1]),
    })
}

/// Ramp that carries one component from `x_start` to `x_target` along its own
/// lattice, followed by the reversal.
pub fn displacement_schedule(
    w: ComponentWeights,
    k: f64,
    x_start: f64,
    x_target: f64,
) -> Result<CollisionRamp> {
    let distance = x_target - x_start;
    if distance != 0.0 {
        check_pitch(distance.abs(), k)?;
    }
    let weights = [w];
    let wells = WellSet { weights: &weights, k };
    let limit = (distance.abs() * k / PI + 1.0) * 4.0 * PI;
    let (theta_meet, pos) = wells
        .solve(&[x_start], |p| p[0] - x_target, limit)?
        .ok_or_else(|| {
            TransportError::Scheduling(format!(
                "component cannot be carried from {x_start} to {x_target}"
            ))
        })?;
    let (forward, reverse) = ramp_pair(theta_meet)?;
    Ok(CollisionRamp {
        forward,
        reverse,
        theta_meet,
        meeting_point: pos[0],
    })
}
