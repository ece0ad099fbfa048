//! Small-integer number theory: primality, trial factorization, multiplicative
//! orders. Everything here works on `u64` and is exact.

use thiserror::Error;

/// Trial division stops at this divisor. Any cofactor left over must be prime
/// for the factorization to be accepted.
pub const TRIAL_DIVISION_LIMIT: u64 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumberTheoryError {
    #[error("gcd({base}, {modulus}) != 1, order undefined")]
    NotCoprime { base: u64, modulus: u64 },
    #[error("modulus {0} is below 2")]
    ModulusTooSmall(u64),
    #[error("cannot factor {0} within the trial-division budget")]
    FactorizationBudget(u64),
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for the whole `u64` range.
pub fn is_prime(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &sp in &SMALL {
        if m % sp == 0 {
            return m == sp;
        }
    }
    let s = (m - 1).trailing_zeros();
    let t = (m - 1) >> s;
    // these twelve bases are sufficient below 3.3 * 10^24
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, t, m);
        if x == 1 || x == m - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, m);
            if x == m - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization as `(prime, exponent)` pairs, ascending.
pub fn factorize(mut m: u64) -> Result<Vec<(u64, u32)>, NumberTheoryError> {
    let original = m;
    let mut out = Vec::new();
    if m < 2 {
        return Ok(out);
    }
    let mut push = |f: u64, m: &mut u64| {
        let mut e = 0;
        while *m % f == 0 {
            *m /= f;
            e += 1;
        }
        if e > 0 {
            out.push((f, e));
        }
    };
    push(2, &mut m);
    let mut f = 3u64;
    while f <= TRIAL_DIVISION_LIMIT && f.saturating_mul(f) <= m {
        push(f, &mut m);
        f += 2;
    }
    if m > 1 {
        if !is_prime(m) {
            return Err(NumberTheoryError::FactorizationBudget(original));
        }
        out.push((m, 1));
    }
    Ok(out)
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

/// Euler's totient from a factorization.
fn totient(factors: &[(u64, u32)]) -> u64 {
    factors
        .iter()
        .map(|&(q, e)| (q - 1) * q.pow(e - 1))
        .product()
}

/// Smallest `e >= 1` with `base^e = 1 (mod modulus)`.
///
/// Computed from the factorization of `phi(modulus)`: start at `phi` and strip
/// prime factors while the power stays at one.
pub fn mult_order(base: u64, modulus: u64) -> Result<u64, NumberTheoryError> {
    if modulus < 2 {
        return Err(NumberTheoryError::ModulusTooSmall(modulus));
    }
    if gcd(base % modulus, modulus) != 1 {
        return Err(NumberTheoryError::NotCoprime { base, modulus });
    }
    let phi = totient(&factorize(modulus)?);
    let mut order = phi;
    for (q, _) in factorize(phi)? {
        while order % q == 0 && pow_mod(base, order / q, modulus) == 1 {
            order /= q;
        }
    }
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order_by_iteration(base: u64, m: u64) -> u64 {
        let mut x = base % m;
        let mut e = 1;
        while x != 1 {
            x = mul_mod(x, base, m);
            e += 1;
        }
        e
    }

    #[test]
    fn orders_from_the_worked_examples() {
        assert_eq!(mult_order(2, 151), Ok(15));
        assert_eq!(mult_order(2, 401), Ok(200));
        assert_eq!(mult_order(2, 409), Ok(204));
    }

    #[test]
    fn order_errors() {
        assert_eq!(mult_order(2, 1), Err(NumberTheoryError::ModulusTooSmall(1)));
        assert_eq!(
            mult_order(3, 9),
            Err(NumberTheoryError::NotCoprime { base: 3, modulus: 9 })
        );
    }

    #[test]
    fn order_matches_direct_iteration() {
        for m in 2..2000u64 {
            for base in [2u64, 3, 5, 7] {
                if gcd(base, m) == 1 {
                    assert_eq!(mult_order(base, m).unwrap(), order_by_iteration(base, m), "{base} mod {m}");
                }
            }
        }
    }

    #[test]
    fn primality() {
        assert!(is_prime(151));
        assert!(is_prime(409));
        assert!(!is_prime(1025));
        assert!(!is_prime(9));
        assert!(!is_prime(0) && !is_prime(1));
        assert!(is_prime(2) && is_prime(3));
        assert!(!is_prime(561));
        assert!(!is_prime(3_215_031_751));
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(999_381_247_093_216_751));
        let sieve_bound = 10_000usize;
        let mut composite = vec![false; sieve_bound];
        for i in 2..sieve_bound {
            if !composite[i] {
                for j in (i * i..sieve_bound).step_by(i) {
                    composite[j] = true;
                }
            }
            assert_eq!(is_prime(i as u64), !composite[i], "{i}");
        }
    }

    #[test]
    fn factorization() {
        assert_eq!(factorize(1025).unwrap(), vec![(5, 2), (41, 1)]);
        assert_eq!(factorize(255).unwrap(), vec![(3, 1), (5, 1), (17, 1)]);
        assert_eq!(factorize(1).unwrap(), vec![]);
        assert_eq!(factorize((1 << 61) - 1).unwrap(), vec![((1 << 61) - 1, 1)]);
    }
}
