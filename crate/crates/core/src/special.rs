//! Gamma function via the Lanczos approximation (g = 7, nine coefficients).

use crate::real::Real;

const LANCZOS_G: f64 = 7.0;

#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) for real `x`. Uses the reflection formula below 1/2.
///
/// Returns NaN at the poles (zero and the negative integers); callers that
/// need an error at a pole check with [`is_gamma_pole`] first.
pub fn gamma<T: Real>(x: T) -> T {
    if is_gamma_pole(x) {
        return T::nan();
    }
    let half = T::lit(0.5);
    if x < half {
        let pi = T::PI();
        return pi / ((pi * x).sin() * gamma(T::one() - x));
    }
    let z = x - T::one();
    let mut acc = T::lit(LANCZOS_COEFFS[0]);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc = acc + T::lit(c) / (z + T::from_count(i));
    }
    let w = z + T::lit(LANCZOS_G) + half;
    (T::lit(2.0) * T::PI()).sqrt() * w.powf(z + half) * (-w).exp() * acc
}

/// True at x = 0, −1, −2, …
pub fn is_gamma_pole<T: Real>(x: T) -> bool {
    x <= T::zero() && x == x.floor()
}
