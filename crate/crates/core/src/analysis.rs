//! Entanglement and fidelity diagnostics for pure states.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

/// Normalization tolerance on `Σ|a|²`.
pub const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("state is not normalized (norm² = {norm_sqr})")]
    Unnormalized { norm_sqr: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
}

fn check_norm(amps: &[Complex64]) -> Result<(), AnalysisError> {
    let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if (norm_sqr - 1.0).abs() > NORM_TOL || !norm_sqr.is_finite() {
        return Err(AnalysisError::Unnormalized { norm_sqr });
    }
    Ok(())
}

/// Two-qubit pure state in the basis `(|00⟩, |01⟩, |10⟩, |11⟩)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoQubitPureState {
    amps: [Complex64; 4],
}

impl TwoQubitPureState {
    pub fn new(amps: [Complex64; 4]) -> Result<Self, AnalysisError> {
        check_norm(&amps)?;
        Ok(Self { amps })
    }

    pub(crate) fn new_unchecked(amps: [Complex64; 4]) -> Self {
        Self { amps }
    }

    pub fn amplitudes(&self) -> &[Complex64; 4] {
        &self.amps
    }

    pub fn concurrence(&self) -> f64 {
        let [a00, a01, a10, a11] = self.amps;
        (2.0 * (a00 * a11 - a01 * a10).norm()).min(1.0)
    }
}

/// `C = 2|a00 a11 - a01 a10|`.
pub fn concurrence(amps: &[Complex64; 4]) -> Result<f64, AnalysisError> {
    Ok(TwoQubitPureState::new(*amps)?.concurrence())
}

/// `|⟨t|s⟩|²` for normalized states of equal dimension.
pub fn state_fidelity(s: &[Complex64], t: &[Complex64]) -> Result<f64, AnalysisError> {
    if s.len() != t.len() {
        return Err(AnalysisError::DimensionMismatch {
            left: s.len(),
            right: t.len(),
        });
    }
    check_norm(s)?;
    check_norm(t)?;
    let overlap: Complex64 = t.iter().zip(s).map(|(a, b)| a.conj() * b).sum();
    Ok(overlap.norm_sqr().min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn product_and_bell_states() {
        assert!(concurrence(&[c(0.5); 4]).unwrap().abs() < 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((concurrence(&[c(s), c(0.0), c(0.0), c(s)]).unwrap() - 1.0).abs() < 1e-15);
        let gate_out = [c(0.5), c(-0.5), c(0.5), c(0.5)];
        assert_eq!(concurrence(&gate_out).unwrap(), 1.0);
    }

    #[test]
    fn unnormalized_input_is_rejected() {
        assert!(matches!(
            concurrence(&[c(1.0), c(1.0), c(0.0), c(0.0)]),
            Err(AnalysisError::Unnormalized { .. })
        ));
    }

    #[test]
    fn fidelity_cases() {
        let a = [c(1.0), c(0.0)];
        let b = [c(0.0), c(1.0)];
        assert_eq!(state_fidelity(&a, &a).unwrap(), 1.0);
        assert_eq!(state_fidelity(&a, &b).unwrap(), 0.0);
        assert!(matches!(
            state_fidelity(&a, &[c(1.0), c(0.0), c(0.0)]),
            Err(AnalysisError::DimensionMismatch { .. })
        ));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = [c(s), Complex64::new(0.0, s)];
        let f1 = state_fidelity(&plus, &a).unwrap();
        let f2 = state_fidelity(&a, &plus).unwrap();
        assert!((f1 - 0.5).abs() < 1e-15 && f1 == f2);
    }
}
