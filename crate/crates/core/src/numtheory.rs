//! Primes, Jacobi symbols, the family of odd squarefree `d` in `[X, 2X]`,
//! the split `μ²(d) = M_Z(d) + R_Z(d)`, and the quadratic Gauss-type sums
//! `τ_m(k)` and `G_m(k)`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest X accepted by [`enumerate_family`]; the member list is materialised.
pub const MAX_FAMILY_X: u64 = 200_000_000;
/// Largest modulus accepted by [`gauss_tau_bruteforce`].
pub const MAX_TAU_K: u64 = 100_000;

/// All primes up to `limit`, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    /// Sieve of Eratosthenes over odd numbers.
    pub fn new(limit: u64) -> Self {
        let mut primes = Vec::new();
        if limit >= 2 {
            primes.push(2);
        }
        if limit >= 3 {
            // index i stands for 2i + 1
            let len = ((limit - 1) / 2 + 1) as usize;
            let mut composite = vec![false; len];
            let mut i = 1;
            while (2 * i + 1) * (2 * i + 1) <= limit as usize {
                if !composite[i] {
                    let p = 2 * i + 1;
                    let mut j = p * p / 2;
                    while j < len {
                        composite[j] = true;
                        j += p;
                    }
                }
                i += 1;
            }
            primes.extend((1..len).filter(|&i| !composite[i]).map(|i| 2 * i as u64 + 1));
        }
        Self { limit, primes }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Primes `≤ bound` (bound may exceed the table limit only up to it).
    pub fn up_to(&self, bound: u64) -> &[u64] {
        let end = self.primes.partition_point(|&p| p <= bound);
        &self.primes[..end]
    }

    pub fn is_prime(&self, n: u64) -> bool {
        if n <= self.limit {
            self.primes.binary_search(&n).is_ok()
        } else {
            factorize_with(n, &self.primes) == [(n, 1)]
        }
    }

    /// Prime factorisation `[(p, e)]`, ascending in p.
    pub fn factor(&self, n: u64) -> Vec<(u64, u32)> {
        factorize_with(n, &self.primes)
    }
}

/// Trial division by `primes`, continuing with odd candidates past the table.
fn factorize_with(mut n: u64, primes: &[u64]) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut push = |n: &mut u64, p: u64| {
        let mut e = 0;
        while *n % p == 0 {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    let mut last = 1;
    for &p in primes {
        if p.saturating_mul(p) > n {
            break;
        }
        push(&mut n, p);
        last = p;
    }
    let mut q = if last < 3 { 3 } else { last + 2 };
    if last < 2 {
        push(&mut n, 2);
    }
    while q.saturating_mul(q) <= n {
        push(&mut n, q);
        q += 2;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Prime factorisation by trial division.
pub fn factorize(n: u64) -> Vec<(u64, u32)> {
    factorize_with(n, &[])
}

/// Jacobi symbol `(a/n)` for odd `n ≥ 1`.
pub fn jacobi(a: i64, n: i64) -> Result<i32> {
    if n <= 0 || n % 2 == 0 {
        return Err(Error::EvenModulus(n));
    }
    Ok(jacobi_u(a.rem_euclid(n) as u64, n as u64))
}

/// Jacobi symbol for `0 ≤ a` and odd `n ≥ 1`; no validation.
pub(crate) fn jacobi_u(mut a: u64, mut n: u64) -> i32 {
    a %= n;
    let mut sign = 1;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            sign = -sign;
        }
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// Möbius function.
pub fn mobius(n: u64) -> i32 {
    if n == 0 {
        return 0;
    }
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Odd squarefree d with X ≤ d ≤ 2X.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyD {
    x: u64,
    members: Vec<u64>,
}

impl FamilyD {
    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Segment length of the squarefree sieve.
const SEGMENT: u64 = 1 << 16;

/// Odd squarefree numbers in `[lo, hi]`, using `primes` (which must contain
/// every odd prime `p` with `p² ≤ hi`).
pub fn odd_squarefree_in(lo: u64, hi: u64, primes: &[u64]) -> Vec<u64> {
    if hi < lo {
        return Vec::new();
    }
    let len = (hi - lo + 1) as usize;
    let mut keep = vec![true; len];
    for &p in primes {
        if p == 2 {
            continue;
        }
        let q = p * p;
        if q > hi {
            break;
        }
        let mut m = lo.div_ceil(q) * q;
        while m <= hi {
            keep[(m - lo) as usize] = false;
            m += q;
        }
    }
    (lo..=hi)
        .filter(|&d| d % 2 == 1 && keep[(d - lo) as usize])
        .collect()
}

/// Calls `visit` on each segment of odd squarefree numbers in `[X, 2X]`,
/// in ascending order.
pub fn for_each_family_segment<F: FnMut(&[u64])>(x: u64, mut visit: F) -> Result<()> {
    if x < 3 {
        return Err(Error::InvalidParameter(format!("family needs X ≥ 3, got {x}")));
    }
    let hi = x.checked_mul(2).ok_or_else(|| {
        Error::InvalidParameter(format!("X = {x} overflows the index type"))
    })?;
    let table = PrimeTable::new(hi.isqrt() + 1);
    let mut lo = x;
    while lo <= hi {
        let top = (lo + SEGMENT - 1).min(hi);
        visit(&odd_squarefree_in(lo, top, table.primes()));
        lo = top + 1;
    }
    Ok(())
}

/// The family D(X) by a segmented squarefree sieve.
pub fn enumerate_family(x: u64) -> Result<FamilyD> {
    if x > MAX_FAMILY_X {
        return Err(Error::SizeGuard {
            what: "X",
            value: x,
            min: 3,
            max: MAX_FAMILY_X,
        });
    }
    let mut members = Vec::new();
    for_each_family_segment(x, |seg| members.extend_from_slice(seg))?;
    Ok(FamilyD { x, members })
}

/// M_Z(d) = Σ_{l² | d, l ≤ Z} μ(l).
pub fn m_z(d: u64, z: u64) -> i64 {
    let square_primes: Vec<u64> = factorize(d)
        .into_iter()
        .filter(|&(_, e)| e >= 2)
        .map(|(p, _)| p)
        .collect();
    // squarefree l with l² | d are products of distinct primes from the list
    fn walk(ps: &[u64], l: u64, sign: i64, z: u64) -> i64 {
        let mut total = sign;
        for (i, &p) in ps.iter().enumerate() {
            match l.checked_mul(p) {
                Some(next) if next <= z => total += walk(&ps[i + 1..], next, -sign, z),
                _ => {}
            }
        }
        total
    }
    if z == 0 {
        return 0;
    }
    walk(&square_primes, 1, 1, z)
}

/// R_Z(d) = μ²(d) − M_Z(d).
pub fn r_z(d: u64, z: u64) -> i64 {
    let mu = mobius(d) as i64;
    mu * mu - m_z(d, z)
}

/// G_m(k) from multiplicativity and the prime-power table.
pub fn gauss_g(m: i64, k: i64) -> Result<f64> {
    if k <= 0 || k % 2 == 0 {
        return Err(Error::EvenModulus(k));
    }
    let mut g = 1.0;
    for (p, b) in factorize(k as u64) {
        g *= gauss_g_prime_power(m, p, b);
        if g == 0.0 {
            break;
        }
    }
    Ok(g)
}

/// G_m(p^b) for an odd prime p and b ≥ 1.
pub fn gauss_g_prime_power(m: i64, p: u64, b: u32) -> f64 {
    // a = v_p(m), with a = ∞ for m = 0
    let (a, unit) = if m == 0 {
        (u32::MAX, 0)
    } else {
        let mut a = 0;
        let mut r = m;
        while r % p as i64 == 0 {
            r /= p as i64;
            a += 1;
        }
        (a, r)
    };
    let pf = p as f64;
    if b <= a {
        if b % 2 == 1 {
            0.0
        } else {
            pf.powi(b as i32) - pf.powi(b as i32 - 1)
        }
    } else if b == a + 1 {
        let pa = pf.powi(a as i32);
        if b % 2 == 0 {
            -pa
        } else {
            jacobi_u(unit.rem_euclid(p as i64) as u64, p) as f64 * pa * pf.sqrt()
        }
    } else {
        0.0
    }
}

/// τ_m(k) = Σ_{a mod k} (a/k) e(am/k), summed directly.
pub fn gauss_tau_bruteforce(m: i64, k: i64) -> Result<Complex64> {
    if k <= 0 || k % 2 == 0 {
        return Err(Error::EvenModulus(k));
    }
    if k as u64 > MAX_TAU_K {
        return Err(Error::SizeGuard {
            what: "k",
            value: k as u64,
            min: 1,
            max: MAX_TAU_K,
        });
    }
    let ku = k as u64;
    let mr = m.rem_euclid(k) as u64;
    let mut re = 0.0;
    let mut im = 0.0;
    for a in 0..ku {
        let chi = jacobi_u(a, ku);
        if chi == 0 {
            continue;
        }
        // reduce a·m mod k exactly before forming the angle
        let r = (a * mr) % ku;
        let theta = std::f64::consts::TAU * r as f64 / k as f64;
        re += chi as f64 * theta.cos();
        im += chi as f64 * theta.sin();
    }
    Ok(Complex64::new(re, im))
}

/// The factor `(1+i)/2 + (−1/k)(1−i)/2` relating τ_m(k) and G_m(k).
pub fn tau_epsilon(k: i64) -> Result<Complex64> {
    let s = jacobi(-1, k)? as f64;
    Ok(Complex64::new(0.5 + 0.5 * s, 0.5 - 0.5 * s))
}
