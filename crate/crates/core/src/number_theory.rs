//! Exact integer helpers: gcd, trial-division factorization, congruences.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Prime factorization as `(prime, multiplicity)` pairs sorted by prime.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Factorization {
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn value(&self) -> u64 {
        self.factors.iter().map(|&(p, k)| p.pow(k)).product()
    }

    pub fn odd_primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p).filter(|&p| p != 2)
    }

    /// Every prime power `p^α` dividing the factored value, `α = 1..=k`, sorted.
    pub fn prime_powers(&self) -> Vec<u64> {
        let mut out: Vec<u64> = self
            .factors
            .iter()
            .flat_map(|&(p, k)| (1..=k).map(move |a| p.pow(a)))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn odd_prime_powers(&self) -> Vec<u64> {
        self.prime_powers()
            .into_iter()
            .filter(|q| q % 2 == 1)
            .collect()
    }
}

pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::InvalidInput("cannot factorize 0".into()));
    }
    let mut rest = n;
    let mut factors = Vec::new();
    let mut p = 2u64;
    while p * p <= rest {
        if rest.is_multiple_of(p) {
            let mut k = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                k += 1;
            }
            factors.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(Factorization { factors })
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n).is_ok_and(|f| f.factors == [(n, 1)])
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn gcd_list(values: &[u64]) -> Result<u64> {
    if values.is_empty() {
        return Err(Error::InvalidInput("gcd of an empty list".into()));
    }
    if values.contains(&0) {
        return Err(Error::InvalidInput(
            "gcd_list expects positive integers".into(),
        ));
    }
    Ok(values.iter().fold(0, |acc, &v| gcd(acc, v)))
}

/// `a ≡ b (mod m)`, valid for negative operands.
pub fn congruent(a: i64, b: i64, m: i64) -> Result<bool> {
    if m < 2 {
        return Err(Error::InvalidInput(format!(
            "modulus must be >= 2, got {m}"
        )));
    }
    Ok((a - b).rem_euclid(m) == 0)
}

/// Largest odd divisor.
pub fn odd_part(mut n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    while n.is_multiple_of(2) {
        n /= 2;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(6).unwrap().factors, vec![(2, 1), (3, 1)]);
        assert_eq!(factorize(9).unwrap().factors, vec![(3, 2)]);
        assert_eq!(factorize(15).unwrap().factors, vec![(3, 1), (5, 1)]);
        assert!(factorize(1).unwrap().factors.is_empty());
        assert!(factorize(0).is_err());
        assert_eq!(
            factorize(360).unwrap().prime_powers(),
            vec![2, 3, 4, 5, 8, 9]
        );
        assert_eq!(factorize(360).unwrap().odd_prime_powers(), vec![3, 5, 9]);
    }

    #[test]
    fn factorize_reconstructs_up_to_a_million() {
        for n in 1..=1_000_000u64 {
            let f = factorize(n).unwrap();
            assert_eq!(f.value(), n);
        }
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd_list(&[9, 6]).unwrap(), 3);
        assert_eq!(gcd_list(&[11, 4]).unwrap(), 1);
        assert_eq!(gcd_list(&[7]).unwrap(), 7);
        assert!(gcd_list(&[]).is_err());
        assert!(gcd_list(&[4, 0]).is_err());
    }

    #[test]
    fn congruence_examples() {
        assert!(congruent(4, 1, 3).unwrap());
        assert!(congruent(7, 7, 5).unwrap());
        assert!(congruent(-2, 1, 3).unwrap());
        assert!(!congruent(2, 1, 3).unwrap());
        assert!(congruent(1, 1, 1).is_err());
    }

    #[test]
    fn factors_are_prime() {
        for n in 2..5_000u64 {
            for &(p, _) in &factorize(n).unwrap().factors {
                assert!((2..p).take_while(|d| d * d <= p).all(|d| p % d != 0));
            }
        }
    }

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(odd_part(48), 3);
    }

    proptest! {
        #[test]
        fn gcd_list_permutation_and_append(mut v in prop::collection::vec(1u64..10_000, 1..8), seed in any::<u64>()) {
            let g = gcd_list(&v).unwrap();
            let k = v.len();
            v.rotate_left((seed as usize) % k);
            prop_assert_eq!(gcd_list(&v).unwrap(), g);
            v.push(g);
            prop_assert_eq!(gcd_list(&v).unwrap(), g);
            prop_assert!(v.iter().all(|x| x % g == 0));
        }

        #[test]
        fn congruence_symmetry(a in -10_000i64..10_000, b in -10_000i64..10_000, m in 2i64..500) {
            let ab = congruent(a, b, m).unwrap();
            prop_assert_eq!(ab, congruent(b, a, m).unwrap());
            prop_assert_eq!(ab, congruent(a + m, b, m).unwrap());
        }
    }
}
