//! Hermite polynomials and the normalized harmonic-oscillator eigenfunctions.

use crate::model::{System, SystemSpec};
use crate::{Error, Real, Result};

/// Highest oscillator level [`oscillator_psi`] accepts.
pub const MAX_OSCILLATOR_LEVEL: i64 = 200;

/// Physicists' Hermite polynomial `H_n(x)` by forward recurrence
/// `H_{k+1} = 2x H_k − 2k H_{k−1}`.
pub fn hermite<T: Real>(n: u32, x: T) -> Result<T> {
    let two = T::lit(2.0);
    let mut prev = T::one();
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = two * x;
    for k in 1..n {
        let next = two * x * cur - two * T::from_count(k as usize) * prev;
        prev = cur;
        cur = next;
        if !cur.is_finite() {
            return Err(Error::Overflow(format!("H_{n}({x}) exceeds the floating-point range at degree {}", k + 1)));
        }
    }
    Ok(cur)
}

/// `H_n(x)` as `(mantissa, log_scale)` with `H_n(x) = mantissa · exp(log_scale)`.
///
/// The recurrence is rescaled whenever the iterate grows past `√max`, so the
/// result is finite for any degree and argument.
pub fn hermite_scaled<T: Real>(n: u32, x: T) -> (T, T) {
    let two = T::lit(2.0);
    let limit = T::max_value().sqrt();
    let mut log_scale = T::zero();
    let mut prev = T::one();
    if n == 0 {
        return (prev, log_scale);
    }
    let mut cur = two * x;
    for k in 1..n {
        let next = two * x * cur - two * T::from_count(k as usize) * prev;
        prev = cur;
        cur = next;
        if cur.abs() > limit {
            let s = cur.abs();
            cur = cur / s;
            prev = prev / s;
            log_scale = log_scale + s.ln();
        }
    }
    (cur, log_scale)
}

/// `ln(n!)` by summing logarithms.
pub fn ln_factorial<T: Real>(n: u32) -> T {
    (2..=n).fold(T::zero(), |acc, k| acc + T::from_count(k as usize).ln())
}

/// Dimensionless eigenfunction `φ_n(ξ) = π^{−1/4} (2ⁿ n!)^{−1/2} H_n(ξ) e^{−ξ²/2}`,
/// with the normalization assembled in log space.
pub fn oscillator_eigenfunction<T: Real>(n: u32, xi: T) -> T {
    let (mantissa, log_scale) = hermite_scaled(n, xi);
    if mantissa == T::zero() {
        return T::zero();
    }
    let half = T::lit(0.5);
    let log_norm = -T::lit(0.25) * T::PI().ln() - half * (T::from_count(n as usize) * T::LN_2() + ln_factorial::<T>(n));
    let log_mag = mantissa.abs().ln() + log_scale - half * xi * xi + log_norm;
    mantissa.signum() * log_mag.exp()
}

/// Normalized oscillator eigenfunction `ψ_n(x)` for `spec`, supported for
/// `0 ≤ n ≤ 200`.
pub fn oscillator_psi<T: Real>(spec: &SystemSpec<T>, n: i64, x: T) -> Result<T> {
    let System::Oscillator { mass, omega } = spec.system() else {
        return Err(Error::Domain(format!("oscillator_psi called for a {} system", spec.kind())));
    };
    if n < 0 {
        return Err(Error::Domain(format!("oscillator quantum number must be >= 0, got {n}")));
    }
    if n > MAX_OSCILLATOR_LEVEL {
        return Err(Error::Overflow(format!("oscillator level {n} beyond supported range n <= {MAX_OSCILLATOR_LEVEL}")));
    }
    let inv_len = (mass * omega / spec.hbar()).sqrt();
    Ok(inv_len.sqrt() * oscillator_eigenfunction(n as u32, x * inv_len))
}
