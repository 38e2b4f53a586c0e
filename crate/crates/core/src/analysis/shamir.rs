//! Classical (N, k) threshold sharing over the prime field mod P, kept as a
//! baseline next to the quantum relay. Shares are points `(i, p(i))` of a
//! random polynomial of degree `k - 1` whose constant term is the secret.

use rand::Rng;

use crate::error::{Error, Result};
use crate::mub::is_prime;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShamirParams {
    n: u64,
    k: usize,
    prime: u64,
    coefficients: Vec<u64>,
}

impl ShamirParams {
    /// `coefficients[0]` is the secret. Values are taken mod `prime`.
    pub fn new(n: u64, k: usize, prime: u64, coefficients: Vec<u64>) -> Result<Self> {
        if !is_prime(prime) {
            return Err(Error::NotPrime(prime));
        }
        if prime > u32::MAX as u64 {
            return Err(Error::Domain(format!("modulus {prime} too large")));
        }
        if k == 0 || k as u64 > n || n >= prime {
            return Err(Error::Domain(format!(
                "need 1 <= k <= N < P, got k={k}, N={n}, P={prime}"
            )));
        }
        if coefficients.len() != k {
            return Err(Error::Domain(format!(
                "threshold {k} needs {k} coefficients, got {}",
                coefficients.len()
            )));
        }
        Ok(ShamirParams { n, k, prime, coefficients })
    }

    /// Secret and padding coefficients drawn uniformly from `1..=P`.
    pub fn random<R: Rng + ?Sized>(n: u64, k: usize, prime: u64, rng: &mut R) -> Result<Self> {
        let coefficients = (0..k).map(|_| rng.random_range(1..=prime)).collect();
        ShamirParams::new(n, k, prime, coefficients)
    }

    pub fn secret(&self) -> u64 {
        self.coefficients[0] % self.prime
    }

    pub fn threshold(&self) -> usize {
        self.k
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn evaluate(&self, x: u64) -> u64 {
        let p = self.prime;
        self.coefficients
            .iter()
            .rev()
            .fold(0, |acc, &c| (mul_mod(acc, x % p, p) + c % p) % p)
    }
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Shares `(i, p(i))` for `i = 1..=N`.
pub fn shamir_share(params: &ShamirParams) -> Vec<(u64, u64)> {
    (1..=params.n).map(|i| (i, params.evaluate(i))).collect()
}

/// Lagrange interpolation of the shares at zero.
pub fn shamir_reconstruct(shares: &[(u64, u64)], prime: u64) -> Result<u64> {
    if !is_prime(prime) {
        return Err(Error::NotPrime(prime));
    }
    if shares.is_empty() {
        return Err(Error::ShareCount { expected: 1, got: 0 });
    }
    let p = prime;
    let xs: Vec<u64> = shares.iter().map(|&(x, _)| x % p).collect();
    for (i, &xi) in xs.iter().enumerate() {
        if xi == 0 {
            return Err(Error::Domain("share abscissa 0 would reveal the secret".into()));
        }
        if xs[..i].contains(&xi) {
            return Err(Error::RepeatedAbscissa(shares[i].0));
        }
    }
    let mut secret = 0u64;
    for (i, &(_, yi)) in shares.iter().enumerate() {
        // basis polynomial at 0: Π x_m / (x_m - x_i)
        let mut num = 1u64;
        let mut den = 1u64;
        for (m, &xm) in xs.iter().enumerate() {
            if m == i {
                continue;
            }
            num = mul_mod(num, xm, p);
            den = mul_mod(den, (xm + p - xs[i]) % p, p);
        }
        let basis = mul_mod(num, pow_mod(den, p - 2, p), p);
        secret = (secret + mul_mod(yi % p, basis, p)) % p;
    }
    Ok(secret)
}
