//! Modular arithmetic and prime-number utilities shared across the engine.
//!
//! Everything here is exact and deterministic: primality of `u64` values is
//! decided by Miller-Rabin with a base set that is known to be correct for
//! the full 64-bit range, and factorization falls back to Pollard's rho only
//! after trial division.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Bases sufficient for deterministic Miller-Rabin on all `u64` inputs.
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

pub fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Least common multiple, `None` on overflow.
pub fn lcm_checked(a: u64, b: u64) -> Option<u64> {
    if a == 0 || b == 0 {
        return Some(0);
    }
    (a / gcd(a, b)).checked_mul(b)
}

pub fn mod_mul(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, base, m);
        }
        base = mod_mul(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn mod_inv(a: u64, m: u64) -> Option<u64> {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    if t < 0 {
        t += m as i128;
    }
    Some(t as u64)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'base: for &a in &MR_BASES {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mod_mul(x, x, n);
            if x == n - 1 {
                continue 'base;
            }
        }
        return false;
    }
    true
}

/// All primes `<= bound`, ascending.
pub fn primes_upto(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2usize;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| if b { Some(i as u64) } else { None })
        .collect()
}

fn pollard_rho(n: u64) -> u64 {
    // n odd, composite, not a prime power of interest; returns a nontrivial factor
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mod_mul(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Prime factorization of `n >= 1` as ascending `(prime, multiplicity)` pairs.
pub fn factor(n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    let mut n = n;
    for p in [2u64, 3, 5] {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    let mut d = 7u64;
    while d * d <= n && d < 100_000 {
        let mut e = 0;
        while n.is_multiple_of(d) {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 2;
    }
    // remaining cofactor: prime, or split by rho
    let mut stack = vec![n];
    let mut extra: Vec<u64> = Vec::new();
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            extra.push(m);
        } else {
            let f = pollard_rho(m);
            stack.push(f);
            stack.push(m / f);
        }
    }
    extra.sort_unstable();
    for m in extra {
        match out.iter_mut().find(|(p, _)| *p == m) {
            Some((_, e)) => *e += 1,
            None => out.push((m, 1)),
        }
    }
    out.sort_unstable();
    out
}

/// Divisors of `n >= 1`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factor(n) {
        let prev = out.clone();
        let mut pe = 1u64;
        for _ in 0..e {
            pe *= p;
            out.extend(prev.iter().map(|d| d * pe));
        }
    }
    out.sort_unstable();
    out
}

/// Residues `0 <= a < m` with `gcd(a, m) = 1`. For `m = 1` this is `{0}`.
pub fn units(m: u64) -> Vec<u64> {
    if m == 1 {
        return vec![0];
    }
    (0..m).filter(|&a| gcd(a, m) == 1).collect()
}

/// Carmichael function: least `e` with `a^e = 1 (mod n)` for all units `a`.
pub fn carmichael_lambda(n: u64) -> u64 {
    let mut lam = 1u64;
    for (p, e) in factor(n) {
        let l = if p == 2 {
            match e {
                1 => 1,
                2 => 2,
                _ => 1u64 << (e - 2),
            }
        } else {
            p.pow(e - 1) * (p - 1)
        };
        lam = lcm_checked(lam, l).expect("carmichael overflow");
    }
    lam
}

/// Default search bound for Dirichlet witnesses; override with
/// `ULTRAPROD_DIRICHLET_BOUND`.
pub fn dirichlet_witness_bound() -> u64 {
    static BOUND: OnceLock<u64> = OnceLock::new();
    *BOUND.get_or_init(|| {
        std::env::var("ULTRAPROD_DIRICHLET_BOUND")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(1_000_000)
    })
}

/// Smallest prime `p = a (mod m)` with `p <= bound`, scanning the progression.
pub fn dirichlet_witness(a: u64, m: u64, bound: u64) -> Option<u64> {
    let mut x = a % m;
    if x == 0 {
        x = m;
    }
    while x <= bound {
        if is_prime(x) {
            return Some(x);
        }
        x = x.checked_add(m)?;
    }
    None
}

/// Miller-Rabin on arbitrary-precision integers. Deterministic below
/// 3.3 * 10^24 with this base set, strong-probable-prime beyond.
pub fn is_prime_bigint(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime(small);
    }
    let one = BigUint::one();
    let two = &one + &one;
    if n.is_even() {
        return false;
    }
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'base: for &a in &MR_BASES {
        let a = BigUint::from(a);
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 0..s.saturating_sub(1) {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'base;
            }
        }
        return false;
    }
    true
}

/// Complete prime factorization of `|n|`, or `None` when a cofactor resists
/// trial division and is not provably prime. Callers treat `None` as
/// "decline and fall back to empirical evidence".
pub fn factor_bigint(n: &BigInt) -> Option<Vec<(u64, u32)>> {
    let mut m = n.abs().to_biguint().expect("abs is nonneg");
    if m.is_zero() {
        return None;
    }
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes_upto(100_000) {
        if m.is_one() {
            break;
        }
        let bp = BigUint::from(p);
        let mut e = 0u32;
        while (&m % &bp).is_zero() {
            m /= &bp;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    if m.is_one() {
        return Some(out);
    }
    if let Some(small) = m.to_u64() {
        for (p, e) in factor(small) {
            out.push((p, e));
        }
        return Some(out);
    }
    if is_prime_bigint(&m) {
        // prime cofactor too large for u64 bookkeeping
        return None;
    }
    None
}

/// Candidate primes stored in correction sets must fit in u64; values above
/// this are rejected at the API boundary.
pub fn biguint_to_u64(n: &BigUint) -> Option<u64> {
    n.to_u64()
}
