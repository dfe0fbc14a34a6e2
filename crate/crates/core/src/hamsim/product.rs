//! First- and second-order product formulas and their Taylor remainders.

use num_complex::Complex64;

use crate::error::{Result, ScuError};
use crate::pauli::{i_pow, PauliString, PauliSum, PowerSeries, DROP_TOLERANCE};
use crate::sim::{Gate, GateSequence};

/// `S_p(τ) = ∏_f exp(−i w_f τ P_f)` as an operator product, leftmost factor first.
///
/// Factors follow the Hamiltonian's term order. `S₂` is `S₁(τ/2)` followed by its
/// reverse, with the two middle exponentials merged.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductFormula {
    order: u32,
    n_qubits: usize,
    factors: Vec<(PauliString, f64)>,
}

impl ProductFormula {
    pub fn new(h: &PauliSum, order: u32) -> Result<Self> {
        if !(1..=2).contains(&order) {
            return Err(ScuError::UnsupportedOrder(order));
        }
        h.require_hermitian()?;
        let terms: Vec<(PauliString, f64)> = h.iter().map(|(p, c)| (p.clone(), c.re)).collect();
        let factors = if order == 1 || terms.is_empty() {
            terms
        } else {
            let m = terms.len();
            let mut f: Vec<(PauliString, f64)> = terms[..m - 1].iter().map(|(p, w)| (p.clone(), w / 2.0)).collect();
            f.push(terms[m - 1].clone());
            f.extend(terms[..m - 1].iter().rev().map(|(p, w)| (p.clone(), w / 2.0)));
            f
        };
        Ok(ProductFormula {
            order,
            n_qubits: h.n_qubits(),
            factors,
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn factors(&self) -> &[(PauliString, f64)] {
        &self.factors
    }

    /// `Σ_f |w_f|`; equals `|H|₁` for both orders.
    pub fn l1_weight(&self) -> f64 {
        self.factors.iter().map(|(_, w)| w.abs()).sum()
    }

    /// Gates in application order (the rightmost operator factor first).
    pub fn gates(&self, t: f64) -> GateSequence {
        GateSequence::from(
            self.factors
                .iter()
                .rev()
                .map(|(p, w)| Gate::PauliRotation {
                    pauli: p.clone(),
                    angle: 2.0 * w * t,
                })
                .collect::<Vec<_>>(),
        )
    }

    /// Taylor coefficients `S_k` of `S_p(τ) = Σ_k S_k τ^k` for `k = 0..=max_order`.
    pub fn series(&self, max_order: u32) -> Vec<PauliSum> {
        let m = max_order as usize;
        let mut s: Vec<PauliSum> = (0..=m).map(|_| PauliSum::zero(self.n_qubits)).collect();
        s[0] = PauliSum::identity(self.n_qubits);
        // a_k = (−i w)^k / k!
        for (p, w) in &self.factors {
            let mut a = vec![Complex64::new(1.0, 0.0); m + 1];
            for k in 1..=m {
                a[k] = a[k - 1] * Complex64::new(0.0, -w) / k as f64;
            }
            let sp: Vec<PauliSum> = s.iter().map(|x| x.mul_string(p).expect("same register")).collect();
            let mut next: Vec<PauliSum> = (0..=m).map(|_| PauliSum::zero(self.n_qubits)).collect();
            for o in 0..=m {
                for k in 0..=o {
                    let src = if k % 2 == 0 { &s[o - k] } else { &sp[o - k] };
                    next[o].axpy_raw(a[k], src);
                }
                next[o].prune();
            }
            s = next;
        }
        s
    }
}

pub fn product_formula(h: &PauliSum, t: f64, order: u32) -> Result<GateSequence> {
    Ok(ProductFormula::new(h, order)?.gates(t))
}

/// Taylor coefficients `R_k` of `exp(−iHτ) − S_p(τ)` for `k = p+1..=M`.
#[derive(Clone, Debug)]
pub struct RemainderSeries {
    formula: ProductFormula,
    max_order: u32,
    h_l1: f64,
    orders: Vec<PauliSum>,
}

/// `a − b`, dropping terms below `DROP_TOLERANCE` relative to the larger operand.
fn difference(a: &PauliSum, b: &PauliSum) -> PauliSum {
    let scale = a.max_abs().max(b.max_abs());
    let mut out = a.clone();
    out.axpy_raw(Complex64::new(-1.0, 0.0), b);
    out.retain_above(DROP_TOLERANCE * scale);
    out
}

impl RemainderSeries {
    pub fn new(h: &PauliSum, order: u32, max_order: u32) -> Result<Self> {
        let formula = ProductFormula::new(h, order)?;
        if max_order <= order {
            return Err(ScuError::InvalidOrder {
                min: order + 1,
                got: max_order,
            });
        }
        let powers = PowerSeries::new(h, max_order)?;
        let s = formula.series(max_order);
        let mut orders = Vec::with_capacity((max_order - order) as usize);
        let mut fact = 1.0;
        for k in 1..=max_order {
            fact *= k as f64;
            if k <= order {
                continue;
            }
            let exp_k = powers.power(k).scaled(i_pow(-(k as i64)) / fact);
            orders.push(difference(&exp_k, &s[k as usize]));
        }
        Ok(RemainderSeries {
            formula,
            max_order,
            h_l1: h.l1_norm(),
            orders,
        })
    }

    pub fn formula(&self) -> &ProductFormula {
        &self.formula
    }

    pub fn order(&self) -> u32 {
        self.formula.order
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn h_l1(&self) -> f64 {
        self.h_l1
    }

    /// `R_k` for `p < k ≤ M`.
    pub fn coefficient(&self, k: u32) -> &PauliSum {
        &self.orders[(k - self.formula.order - 1) as usize]
    }

    /// `Σ_k τ^k R_k`.
    pub fn evaluate(&self, tau: f64) -> PauliSum {
        let mut out = PauliSum::zero(self.formula.n_qubits);
        for k in self.formula.order + 1..=self.max_order {
            out.axpy_raw(Complex64::new(tau.powi(k as i32), 0.0), self.coefficient(k));
        }
        out.prune();
        out
    }

    /// `Σ_k |R_k|₁ |τ|^k`, an upper bound on `|R(τ)|₁`.
    pub fn l1_bound(&self, tau: f64) -> f64 {
        (self.formula.order + 1..=self.max_order)
            .map(|k| self.coefficient(k).l1_norm() * tau.abs().powi(k as i32))
            .sum()
    }
}

/// Pauli expansion of `exp(−iHt) − S_p(t)`, both truncated at total order `M` in `t`.
pub fn pf_remainder(h: &PauliSum, t: f64, order: u32, max_order: u32) -> Result<PauliSum> {
    Ok(RemainderSeries::new(h, order, max_order)?.evaluate(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_order_layout() {
        let h = PauliSum::from_real(&[(1.0, "ZZ"), (0.5, "XI"), (0.25, "IX")]);
        let f = ProductFormula::new(&h, 2).unwrap();
        let w: Vec<f64> = f.factors().iter().map(|(_, w)| *w).collect();
        assert_eq!(w, vec![0.5, 0.25, 0.25, 0.25, 0.5]);
        assert_eq!(f.l1_weight(), h.l1_norm());
        assert!(matches!(ProductFormula::new(&h, 3), Err(ScuError::UnsupportedOrder(3))));
    }

    #[test]
    fn commuting_hamiltonian_has_no_remainder() {
        let h = PauliSum::from_real(&[(1.0, "ZZI"), (0.5, "IZZ"), (-0.3, "ZIZ")]);
        for p in [1, 2] {
            let r = pf_remainder(&h, 0.4, p, 4).unwrap();
            assert!(r.is_empty(), "{r:?}");
        }
    }

    #[test]
    fn first_order_leading_term_is_a_commutator() {
        let (a, b, t) = (0.8, -0.6, 0.1);
        let h = PauliSum::from_real(&[(a, "X"), (b, "Z")]);
        let rs = RemainderSeries::new(&h, 1, 2).unwrap();
        let ax = PauliSum::from_real(&[(a, "X")]).scaled(Complex64::new(0.0, -1.0));
        let bz = PauliSum::from_real(&[(b, "Z")]).scaled(Complex64::new(0.0, -1.0));
        // Order-2 remainder of e^{A+B} − e^A e^B is −½[A, B].
        let want = ax.commutator(&bz).unwrap().scaled_real(-0.5);
        assert!(rs.coefficient(2).sub(&want).unwrap().l1_norm() < 1e-14);
        let r = rs.evaluate(t);
        assert!(r.sub(&want.scaled_real(t * t)).unwrap().l1_norm() < 1e-14);
        // Closed form: −i t² a b Y.
        let y: PauliString = "Y".parse().unwrap();
        assert_eq!(r.len(), 1);
        assert!((r.coeff(&y) - Complex64::new(0.0, -t * t * a * b)).norm() < 1e-15);
    }
}
