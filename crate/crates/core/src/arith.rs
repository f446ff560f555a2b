//! Small integer helpers shared by the field modules.

/// Deterministic trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    if n.is_multiple_of(3) {
        return n == 3;
    }
    let mut f = 5u64;
    while f.saturating_mul(f) <= n {
        if n.is_multiple_of(f) || n.is_multiple_of(f + 2) {
            return false;
        }
        f += 6;
    }
    true
}

/// Odd primes in `[3, bound]`, ascending.
pub fn odd_primes_up_to(bound: u64) -> Vec<u64> {
    (3..=bound).step_by(2).filter(|&n| is_prime(n)).collect()
}

/// True iff no square of a prime divides `n`. Zero is not squarefree.
pub fn is_squarefree(n: i64) -> bool {
    n != 0 && squarefree_kernel(n).1 == 1
}

/// Splits `n = sign * kernel * s^2` with `kernel` squarefree and positive.
/// Returns `(sign * kernel, s)`.
pub fn squarefree_kernel(n: i64) -> (i64, i64) {
    assert!(n != 0, "squarefree kernel of zero");
    let sign = n.signum();
    let mut rest = n.unsigned_abs();
    let mut kernel = 1u64;
    let mut root = 1u64;
    let mut f = 2u64;
    while f * f <= rest {
        let mut e = 0;
        while rest.is_multiple_of(f) {
            rest /= f;
            e += 1;
        }
        root *= f.pow(e / 2);
        if e % 2 == 1 {
            kernel *= f;
        }
        f += 1;
    }
    kernel *= rest;
    (sign * kernel as i64, root as i64)
}

/// Floor of the square root of a non-negative integer.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x.saturating_mul(x) > n {
        x -= 1;
    }
    while (x + 1).saturating_mul(x + 1) <= n {
        x += 1;
    }
    x
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i64
}

/// Positive divisors of `n > 0`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut f = 1u64;
    while f * f <= n {
        if n.is_multiple_of(f) {
            small.push(f);
            if f * f != n {
                large.push(n / f);
            }
        }
        f += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        let ps: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(odd_primes_up_to(20), vec![3, 5, 7, 11, 13, 17, 19]);
        assert!(is_prime(999_983));
        assert!(!is_prime(999_981));
    }

    #[test]
    fn kernels() {
        assert_eq!(squarefree_kernel(12), (3, 2));
        assert_eq!(squarefree_kernel(-50), (-2, 5));
        assert_eq!(squarefree_kernel(30), (30, 1));
        assert!(is_squarefree(1));
        assert!(!is_squarefree(4));
        assert!(!is_squarefree(0));
        assert!(is_squarefree(-15));
    }

    #[test]
    fn roots_and_divisors() {
        for n in 0..2000u64 {
            let r = isqrt(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n);
        }
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(9), vec![1, 3, 9]);
        assert_eq!(gcd(-6, 10), 2);
    }
}
