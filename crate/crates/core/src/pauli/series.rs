use num_complex::Complex64;

use super::sum::PauliSum;
use crate::error::{Result, ScuError};

/// Cached powers `H^0 ..= H^max_order` of a Hermitian Pauli sum.
///
/// Every Taylor-type expansion in `t` is a linear combination of these powers,
/// so a single expansion serves any number of step sizes.
#[derive(Clone, Debug)]
pub struct PowerSeries {
    powers: Vec<PauliSum>,
}

impl PowerSeries {
    pub fn new(h: &PauliSum, max_order: u32) -> Result<Self> {
        h.require_hermitian()?;
        let mut powers = Vec::with_capacity(max_order as usize + 1);
        powers.push(PauliSum::identity(h.n_qubits()));
        for k in 1..=max_order as usize {
            let next = powers[k - 1].mul(h)?;
            powers.push(next);
        }
        Ok(PowerSeries { powers })
    }

    pub fn max_order(&self) -> u32 {
        (self.powers.len() - 1) as u32
    }

    pub fn power(&self, k: u32) -> &PauliSum {
        &self.powers[k as usize]
    }

    pub fn n_qubits(&self) -> usize {
        self.powers[0].n_qubits()
    }

    /// Even and odd parts of `exp(-iHt) = I + even + i·odd`, truncated at order `m`.
    ///
    /// `even = Σ_{k≥1, 2k≤m} (−1)^k (tH)^{2k}/(2k)!`,
    /// `odd  = Σ_{k≥0, 2k+1≤m} (−1)^{k+1} (tH)^{2k+1}/(2k+1)!`.
    pub fn even_odd(&self, t: f64, m: u32) -> Result<(PauliSum, PauliSum)> {
        if m < 1 {
            return Err(ScuError::InvalidOrder { min: 1, got: m });
        }
        if m > self.max_order() {
            return Err(ScuError::InvalidOrder {
                min: m,
                got: self.max_order(),
            });
        }
        let n = self.n_qubits();
        let mut even = PauliSum::zero(n);
        let mut odd = PauliSum::zero(n);
        let mut factor = 1.0; // t^l / l!
        for l in 1..=m {
            factor *= t / l as f64;
            let k = l / 2;
            if l % 2 == 0 {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                even.axpy_raw(Complex64::new(sign * factor, 0.0), self.power(l));
            } else {
                let sign = if (k + 1) % 2 == 0 { 1.0 } else { -1.0 };
                odd.axpy_raw(Complex64::new(sign * factor, 0.0), self.power(l));
            }
        }
        even.prune();
        odd.prune();
        Ok((even, odd))
    }

    /// Order-`m` Taylor truncation of `exp(-iHt)`.
    pub fn taylor(&self, t: f64, m: u32) -> Result<PauliSum> {
        let (even, odd) = self.even_odd(t, m)?;
        let mut out = PauliSum::identity(self.n_qubits());
        out.axpy_raw(Complex64::new(1.0, 0.0), &even);
        out.axpy_raw(Complex64::new(0.0, 1.0), &odd);
        out.prune();
        Ok(out)
    }
}

/// Even/odd split of the order-`m` Taylor series of `exp(-iHt)`; see [`PowerSeries::even_odd`].
pub fn taylor_even_odd(h: &PauliSum, t: f64, m: u32) -> Result<(PauliSum, PauliSum)> {
    if m < 1 {
        return Err(ScuError::InvalidOrder { min: 1, got: m });
    }
    PowerSeries::new(h, m)?.even_odd(t, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliString;

    #[test]
    fn single_x_collapses_to_cos_sin() {
        let h = PauliSum::from_real(&[(1.0, "X")]);
        let t = 0.7_f64;
        let (even, odd) = taylor_even_odd(&h, t, 7).unwrap();
        let cos_m1 = -t.powi(2) / 2.0 + t.powi(4) / 24.0 - t.powi(6) / 720.0;
        let sin = t - t.powi(3) / 6.0 + t.powi(5) / 120.0 - t.powi(7) / 5040.0;
        assert_eq!(even.len(), 1);
        assert_eq!(odd.len(), 1);
        assert!((even.identity_coeff().re - cos_m1).abs() < 1e-15);
        let x: PauliString = "X".parse().unwrap();
        assert!((odd.coeff(&x).re + sin).abs() < 1e-15);
    }

    #[test]
    fn zero_time_is_empty() {
        let h = PauliSum::from_real(&[(1.0, "XZ"), (0.5, "ZI")]);
        let (even, odd) = taylor_even_odd(&h, 0.0, 4).unwrap();
        assert!(even.is_empty() && odd.is_empty());
    }

    #[test]
    fn rejects_bad_input() {
        let h = PauliSum::from_real(&[(1.0, "X")]);
        assert!(matches!(taylor_even_odd(&h, 0.1, 0), Err(ScuError::InvalidOrder { .. })));
        let nh = PauliSum::from_terms(1, [(Complex64::new(0.0, 1.0), "X".parse().unwrap())]).unwrap();
        assert!(matches!(taylor_even_odd(&nh, 0.1, 2), Err(ScuError::NotHermitian { .. })));
    }
}
