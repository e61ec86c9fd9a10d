//! Scalar machinery: arbitrary precision values, exact Bernoulli numbers and
//! zeta evaluations.

mod bernoulli;
mod precision;
mod sum;
mod zeta;

pub use bernoulli::{bernoulli, Rational};
pub use precision::{bits_for_tol, PrecisionComplex, PrecisionReal, MIN_BITS};
pub use sum::{ComplexSum, NeumaierSum};
pub use zeta::{hurwitz_zeta, hurwitz_zeta_real, zeta_complex, zeta_even, zeta_real, POLE_EXCLUSION};

/// `ln k!`, exact summation for small `k` and Stirling's series beyond.
pub fn ln_factorial(k: u64) -> f64 {
    if k < 64 {
        return (2..=k).map(|j| (j as f64).ln()).sum();
    }
    let x = k as f64;
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + 1.0 / (12.0 * x) - 1.0 / (360.0 * x * x * x)
}

#[cfg(test)]
mod tests {
    use super::ln_factorial;

    #[test]
    fn ln_factorial_is_continuous_across_the_switch() {
        let exact: f64 = (2..=64u64).map(|j| (j as f64).ln()).sum();
        assert!((ln_factorial(64) - exact).abs() < 1e-12 * exact);
        assert_eq!(ln_factorial(0), 0.0);
        assert!((ln_factorial(5) - 120f64.ln()).abs() < 1e-14);
    }
}
