//! Exact Bernoulli numbers (convention `B_1 = -1/2`).

use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Rational = BigRational;

fn cache() -> &'static RwLock<Vec<Rational>> {
    static CACHE: OnceLock<RwLock<Vec<Rational>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(vec![Rational::one()]))
}

/// `B_m` from `sum_{j=0}^{m} C(m+1, j) B_j = 0`, memoized up to the largest
/// index requested so far.
pub fn bernoulli(m: usize) -> Rational {
    {
        let table = cache().read().expect("bernoulli cache poisoned");
        if let Some(b) = table.get(m) {
            return b.clone();
        }
    }
    let mut table = cache().write().expect("bernoulli cache poisoned");
    while table.len() <= m {
        let next = next_bernoulli(&table);
        table.push(next);
    }
    table[m].clone()
}

fn next_bernoulli(known: &[Rational]) -> Rational {
    let m = known.len();
    if m >= 3 && m % 2 == 1 {
        return Rational::zero();
    }
    // binom = C(m+1, j), updated in place
    let mut binom = BigInt::one();
    let mut acc = Rational::zero();
    for (j, b) in known.iter().enumerate() {
        if !b.is_zero() {
            acc += b * Rational::from_integer(binom.clone());
        }
        binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
    }
    -acc / Rational::from_integer(BigInt::from(m + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn small_values() {
        assert_eq!(bernoulli(0), q(1, 1));
        assert_eq!(bernoulli(1), q(-1, 2));
        assert_eq!(bernoulli(2), q(1, 6));
        assert_eq!(bernoulli(4), q(-1, 30));
        assert_eq!(bernoulli(6), q(1, 42));
        assert_eq!(bernoulli(12), q(-691, 2730));
    }

    #[test]
    fn odd_indices_vanish() {
        for m in 1..40 {
            assert!(bernoulli(2 * m + 1).is_zero());
        }
    }

    #[test]
    fn cached_values_match_fresh_recurrence() {
        let high = bernoulli(30);
        let mut table = vec![Rational::one()];
        while table.len() <= 30 {
            let next = next_bernoulli(&table);
            table.push(next);
        }
        assert_eq!(table[30], high);
    }

    #[test]
    fn concurrent_readers_agree() {
        let handles: Vec<_> = (0..4)
            .map(|i| std::thread::spawn(move || bernoulli(20 + 2 * i)))
            .collect();
        let got: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        for (i, b) in got.iter().enumerate() {
            assert_eq!(*b, bernoulli(20 + 2 * i));
        }
    }
}
