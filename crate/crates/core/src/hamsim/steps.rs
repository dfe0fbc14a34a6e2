//! Step-count solvers over integer `r` for monotone error and overhead criteria.

use crate::error::{Result, ScuError};

/// Largest step count the solvers will consider.
pub const MAX_STEPS: u64 = 1 << 48;

/// `Σ_{l>M} x^l/l!`, summed term by term until the terms stop mattering.
pub fn taylor_tail(x: f64, m: u32) -> f64 {
    let x = x.abs();
    if x == 0.0 {
        return 0.0;
    }
    if x > 700.0 {
        return f64::INFINITY;
    }
    let mut term = 1.0;
    for l in 1..=m + 1 {
        term *= x / l as f64;
    }
    let mut sum = 0.0;
    let mut l = m + 1;
    loop {
        sum += term;
        l += 1;
        term *= x / l as f64;
        if (l as f64) > x && term <= sum * 1e-17 {
            break;
        }
    }
    sum
}

/// Smallest `r ≥ 1` with `ok(r)`, assuming `ok` is monotone in `r`.
pub fn smallest_steps<F: Fn(u64) -> bool>(ok: F) -> Result<u64> {
    if ok(1) {
        return Ok(1);
    }
    let mut hi = 2u64;
    while !ok(hi) {
        if hi >= MAX_STEPS {
            return Err(ScuError::InvalidParameter(format!(
                "step solver did not converge below r = {MAX_STEPS}"
            )));
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Smallest `r` with `r · tail(x/r, M) ≤ ε`, `x = |H|₁ t`.
pub fn steps_for_tail_error(x: f64, m: u32, epsilon: f64, factor: f64) -> Result<u64> {
    if epsilon <= 0.0 || !epsilon.is_finite() {
        return Err(ScuError::InvalidParameter(format!("error target must be positive, got {epsilon}")));
    }
    smallest_steps(|r| {
        let rf = r as f64;
        factor * rf * taylor_tail(x / rf, m) <= epsilon
    })
}
