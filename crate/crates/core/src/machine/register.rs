use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;
use serde::Serialize;

use super::{MachineError, Result};
use crate::analysis::{TwoQubitPureState, NORM_TOL};
use crate::gates::TwoLevelUnitary;

/// State-vector size limit.
pub const MAX_QUBITS: usize = 20;

/// Joint state of all trapped qubits. Qubit 0 is the most significant bit of
/// the basis index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Register {
    n: usize,
    amplitudes: Vec<Complex64>,
    site_of: Vec<usize>,
}

impl Register {
    /// All qubits in `|0⟩`; qubit `q` sits at `site_of[q]`.
    pub fn new(site_of: Vec<usize>) -> Result<Self> {
        let bits = vec![false; site_of.len()];
        Self::from_bits(&bits, site_of)
    }

    pub fn from_bits(bits: &[bool], site_of: Vec<usize>) -> Result<Self> {
        let n = site_of.len();
        check_size(n)?;
        if bits.len() != n {
            return Err(MachineError::Validation(format!(
                "{} bits given for {n} qubits",
                bits.len()
            )));
        }
        check_sites(&site_of)?;
        let index = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            n,
            amplitudes,
            site_of,
        })
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>, site_of: Vec<usize>) -> Result<Self> {
        let n = site_of.len();
        check_size(n)?;
        check_sites(&site_of)?;
        if amplitudes.len() != 1 << n {
            return Err(MachineError::Validation(format!(
                "{} amplitudes given for {n} qubits",
                amplitudes.len()
            )));
        }
        let reg = Self {
            n,
            amplitudes,
            site_of,
        };
        let norm_sqr = reg.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(MachineError::Unnormalized { norm_sqr });
        }
        Ok(reg)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn site_of(&self, q: usize) -> Result<usize> {
        self.check_qubit(q)?;
        Ok(self.site_of[q])
    }

    pub fn sites(&self) -> &[usize] {
        &self.site_of
    }

    pub fn qubit_at(&self, site: usize) -> Option<usize> {
        self.site_of.iter().position(|&s| s == site)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(MachineError::IndexOutOfRange {
                index: q,
                len: self.n,
            });
        }
        Ok(())
    }

    fn mask(&self, q: usize) -> usize {
        1 << (self.n - 1 - q)
    }

    pub fn apply_one_qubit(&mut self, q: usize, u: &TwoLevelUnitary) -> Result<()> {
        self.check_qubit(q)?;
        let m = u.matrix();
        let bit = self.mask(q);
        for idx in 0..self.amplitudes.len() {
            if idx & bit != 0 {
                continue;
            }
            let (a, b) = (self.amplitudes[idx], self.amplitudes[idx | bit]);
            self.amplitudes[idx] = m[(0, 0)] * a + m[(0, 1)] * b;
            self.amplitudes[idx | bit] = m[(1, 0)] * a + m[(1, 1)] * b;
        }
        Ok(())
    }

    /// Applies a 4×4 operator with `first` as the more significant factor.
    pub fn apply_two_qubit(&mut self, first: usize, second: usize, m: &Matrix4<Complex64>) -> Result<()> {
        self.check_qubit(first)?;
        self.check_qubit(second)?;
        if first == second {
            return Err(MachineError::Validation(format!(
                "two-qubit gate needs distinct qubits, got {first} twice"
            )));
        }
        let (bf, bs) = (self.mask(first), self.mask(second));
        for base in 0..self.amplitudes.len() {
            if base & (bf | bs) != 0 {
                continue;
            }
            let idx = [base, base | bs, base | bf, base | bf | bs];
            let v = idx.map(|i| self.amplitudes[i]);
            for (r, &i) in idx.iter().enumerate() {
                self.amplitudes[i] = (0..4).map(|c| m[(r, c)] * v[c]).sum();
            }
        }
        Ok(())
    }

    /// Reduced density matrix of `keep` (in the given order, first = most
    /// significant).
    pub fn reduced_density(&self, keep: &[usize]) -> Result<DMatrix<Complex64>> {
        for &q in keep {
            self.check_qubit(q)?;
        }
        let masks: Vec<usize> = keep.iter().map(|&q| self.mask(q)).collect();
        let keep_mask: usize = masks.iter().sum();
        let dim = 1 << keep.len();
        let split = |idx: usize| -> (usize, usize) {
            let sub = masks
                .iter()
                .fold(0usize, |acc, &m| (acc << 1) | (idx & m != 0) as usize);
            (sub, idx & !keep_mask)
        };
        let mut rho = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for (i, ai) in self.amplitudes.iter().enumerate() {
            if ai.norm_sqr() == 0.0 {
                continue;
            }
            let (si, ri) = split(i);
            for (j, aj) in self.amplitudes.iter().enumerate() {
                let (sj, rj) = split(j);
                if ri == rj {
                    rho[(si, sj)] += ai * aj.conj();
                }
            }
        }
        Ok(rho)
    }

    /// The pure state of `(first, second)` when it factors out of the rest of
    /// the register. The amplitude on the first basis state carrying at least
    /// half the largest population is made real and positive.
    pub fn pair_state(&self, first: usize, second: usize) -> Result<TwoQubitPureState> {
        let rho = self.reduced_density(&[first, second])?;
        let purity = (&rho * &rho).trace().re;
        if (purity - 1.0).abs() > 1e-10 {
            return Err(MachineError::NotProduct { purity });
        }
        let max = (0..4).map(|k| rho[(k, k)].re).fold(0.0, f64::max);
        let k = (0..4).find(|&k| rho[(k, k)].re >= 0.5 * max).expect("non-empty");
        let scale = rho[(k, k)].re.sqrt();
        let amps = [0, 1, 2, 3].map(|r| rho[(r, k)] / scale);
        Ok(TwoQubitPureState::new(amps)?)
    }
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(MachineError::RegisterSize(n));
    }
    Ok(())
}

fn check_sites(site_of: &[usize]) -> Result<()> {
    for (q, s) in site_of.iter().enumerate() {
        if site_of[..q].contains(s) {
            return Err(MachineError::Validation(format!(
                "site {s} holds more than one qubit"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{hadamard, rx, rz};

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn size_limits() {
        assert!(Register::new(vec![]).is_err());
        assert!(Register::new((0..21).collect()).is_err());
        assert!(Register::new(vec![0, 0]).is_err());
        assert_eq!(Register::new((0..3).collect()).unwrap().amplitudes().len(), 8);
    }

    #[test]
    fn bit_order_is_big_endian() {
        let r = Register::from_bits(&[false, true, true], vec![0, 1, 2]).unwrap();
        assert_eq!(r.amplitudes()[0b011], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn one_qubit_gates() {
        let mut r = Register::new(vec![4, 9]).unwrap();
        let before = r.clone();
        r.apply_one_qubit(0, &TwoLevelUnitary::identity()).unwrap();
        assert_eq!(r, before);
        r.apply_one_qubit(1, &hadamard()).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((r.amplitudes()[0].re - s).abs() < 1e-15);
        assert!((r.amplitudes()[1].re - s).abs() < 1e-15);
        assert!(r.apply_one_qubit(2, &hadamard()).is_err());

        let mut a = Register::from_bits(&[true, false, true], vec![0, 1, 2]).unwrap();
        let mut b = a.clone();
        a.apply_one_qubit(0, &rx(0.4)).unwrap();
        a.apply_one_qubit(2, &rz(1.1)).unwrap();
        b.apply_one_qubit(2, &rz(1.1)).unwrap();
        b.apply_one_qubit(0, &rx(0.4)).unwrap();
        assert!(close(a.amplitudes(), b.amplitudes(), 1e-12));
        assert!((a.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pair_state_extraction() {
        let mut r = Register::from_bits(&[false, true, false], vec![0, 1, 2]).unwrap();
        r.apply_one_qubit(0, &hadamard()).unwrap();
        let s = r.pair_state(0, 2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitudes()[0].re - h).abs() < 1e-15);
        assert!((s.amplitudes()[2].re - h).abs() < 1e-15);
        // reversed order swaps the roles
        let s = r.pair_state(2, 0).unwrap();
        assert!((s.amplitudes()[1].re - h).abs() < 1e-15);
    }

    #[test]
    fn entangled_pair_is_not_a_product_with_spectator() {
        let mut amps = vec![Complex64::new(0.0, 0.0); 8];
        let h = std::f64::consts::FRAC_1_SQRT_2;
        amps[0b000] = Complex64::new(h, 0.0);
        amps[0b101] = Complex64::new(h, 0.0);
        let r = Register::from_amplitudes(amps, vec![0, 1, 2]).unwrap();
        assert!(matches!(r.pair_state(0, 1), Err(MachineError::NotProduct { .. })));
        assert!(r.pair_state(0, 2).is_ok());
    }

    #[test]
    fn reduced_density_traces_to_one() {
        let mut r = Register::new(vec![0, 1, 2, 3]).unwrap();
        for q in 0..4 {
            r.apply_one_qubit(q, &rx(0.3 * (q + 1) as f64)).unwrap();
        }
        for keep in [vec![0], vec![1, 3], vec![2, 0, 1]] {
            let rho = r.reduced_density(&keep).unwrap();
            assert!((rho.trace().re - 1.0).abs() < 1e-12);
        }
    }
}
