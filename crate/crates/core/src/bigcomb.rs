//! Arbitrary-precision factorials, binomials and multinomials.

use num_bigint::BigInt;
use num_traits::One;

pub fn factorial(n: usize) -> BigInt {
    let mut f = BigInt::one();
    for k in 2..=n {
        f *= k;
    }
    f
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut b = BigInt::one();
    for i in 0..k {
        b = b * (n - i) / (i + 1);
    }
    b
}

/// `(Σ parts)! / ∏ parts!`.
pub fn multinomial(parts: &[usize]) -> BigInt {
    let mut total = 0;
    let mut out = BigInt::one();
    for &p in parts {
        total += p;
        out *= binomial(total, p);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(factorial(0), BigInt::from(1));
        assert_eq!(factorial(10), BigInt::from(3_628_800));
        assert_eq!(binomial(5, 3), BigInt::from(10));
        assert_eq!(binomial(3, 5), BigInt::from(0));
        assert_eq!(multinomial(&[2, 2, 2]), BigInt::from(90));
        assert_eq!(multinomial(&[]), BigInt::from(1));
    }

    #[test]
    fn multinomial_is_factorial_ratio() {
        let parts = [3, 1, 4, 2];
        let denom: BigInt = parts.iter().map(|&p| factorial(p)).product();
        assert_eq!(multinomial(&parts), factorial(10) / denom);
    }
}
