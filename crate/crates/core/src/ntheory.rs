//! Prime sieves, factorization, classical arithmetic functions and Dirichlet
//! convolution.
//!
//! A [`PrimeTable`] comes in two flavours:
//!
//! * [`SieveMode::PrimesOnly`] stores the primes up to the limit, produced by a
//!   segmented odd-only sieve of Eratosthenes. Ceiling: [`PRIMES_ONLY_MAX`].
//! * [`SieveMode::SmallestFactor`] additionally stores the smallest prime
//!   factor of every integer, produced by a linear sieve. Ceiling:
//!   [`SPF_MAX`] (four bytes per integer).
//!
//! Both flavours can factor any `n <= limit`; the smallest-factor table does
//! it in `O(Ω(n))`, the primes-only table by trial division.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest limit accepted in primes-only mode (about 400 MB of primes).
pub const PRIMES_ONLY_MAX: u64 = 2_000_000_000;
/// Largest limit accepted in smallest-prime-factor mode (about 400 MB).
pub const SPF_MAX: u64 = 100_000_000;

const SEGMENT: usize = 1 << 18;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SieveMode {
    PrimesOnly,
    SmallestFactor,
}

/// Primes up to `limit`, optionally with a smallest-prime-factor map.
///
/// Immutable once built; share it behind a reference or an `Arc`.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u32>,
    spf: Option<Vec<u32>>,
}

/// Sieves the primes up to `limit` in the requested mode.
pub fn build_prime_table(limit: u64, mode: SieveMode) -> Result<PrimeTable> {
    PrimeTable::new(limit, mode)
}

impl PrimeTable {
    pub fn new(limit: u64, mode: SieveMode) -> Result<Self> {
        let ceiling = match mode {
            SieveMode::PrimesOnly => PRIMES_ONLY_MAX,
            SieveMode::SmallestFactor => SPF_MAX,
        };
        if limit < 2 {
            return Err(Error::Capacity {
                what: "sieve limit below minimum 2",
                value: limit,
                limit: 2,
            });
        }
        if limit > ceiling {
            return Err(Error::Capacity {
                what: "sieve limit",
                value: limit,
                limit: ceiling,
            });
        }
        Ok(match mode {
            SieveMode::PrimesOnly => PrimeTable {
                limit,
                primes: segmented_sieve(limit),
                spf: None,
            },
            SieveMode::SmallestFactor => {
                let (primes, spf) = linear_sieve(limit as usize);
                PrimeTable {
                    limit,
                    primes,
                    spf: Some(spf),
                }
            }
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn mode(&self) -> SieveMode {
        if self.spf.is_some() {
            SieveMode::SmallestFactor
        } else {
            SieveMode::PrimesOnly
        }
    }

    /// Smallest-prime-factor map indexed by `n`, when built in that mode.
    pub fn spf(&self) -> Option<&[u32]> {
        self.spf.as_deref()
    }

    /// All primes up to the limit, ascending.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// The primes `p <= x` (clamped at the table limit).
    pub fn primes_up_to(&self, x: u64) -> &[u32] {
        let end = self.primes.partition_point(|&p| (p as u64) <= x);
        &self.primes[..end]
    }

    /// π(x) for `x <= limit`.
    pub fn prime_count(&self, x: u64) -> Result<usize> {
        self.check(x, "prime count argument")?;
        Ok(self.primes_up_to(x).len())
    }

    pub fn is_prime(&self, n: u64) -> Result<bool> {
        self.check(n, "primality argument")?;
        Ok(match &self.spf {
            Some(spf) => n >= 2 && spf[n as usize] as u64 == n,
            None => n <= u32::MAX as u64 && self.primes.binary_search(&(n as u32)).is_ok(),
        })
    }

    /// Smallest prime factor of `2 <= n <= limit`.
    pub fn smallest_factor(&self, n: u64) -> Result<u64> {
        self.check(n, "factorization argument")?;
        if n < 2 {
            return Err(crate::error::domain("smallest factor of n < 2"));
        }
        if let Some(spf) = &self.spf {
            return Ok(spf[n as usize] as u64);
        }
        for &p in &self.primes {
            let p = p as u64;
            if p * p > n {
                break;
            }
            if n % p == 0 {
                return Ok(p);
            }
        }
        Ok(n)
    }

    pub fn factorize(&self, n: u64) -> Result<Factorization> {
        factorize(n, self)
    }

    /// Prime powers `q = p^k <= cutoff`, ascending in `q`.
    pub fn prime_powers(&self, cutoff: u64) -> Result<Vec<PrimePower>> {
        self.check(cutoff, "prime power cutoff")?;
        let mut out = Vec::new();
        for &p in self.primes_up_to(cutoff) {
            let p = p as u64;
            let mut q = p;
            let mut k = 1;
            loop {
                out.push(PrimePower { q, p, k });
                match q.checked_mul(p) {
                    Some(next) if next <= cutoff => {
                        q = next;
                        k += 1;
                    }
                    _ => break,
                }
            }
        }
        out.sort_unstable_by_key(|pp| pp.q);
        Ok(out)
    }

    /// Chebyshev ψ(x) = Σ_{n≤x} Λ(n).
    pub fn chebyshev_psi(&self, x: u64) -> Result<f64> {
        Ok(self
            .prime_powers(x)?
            .iter()
            .map(|pp| (pp.p as f64).ln())
            .sum())
    }

    fn check(&self, n: u64, what: &'static str) -> Result<()> {
        if n > self.limit {
            Err(Error::Capacity {
                what,
                value: n,
                limit: self.limit,
            })
        } else {
            Ok(())
        }
    }
}

/// A prime power `q = p^k` with `k >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimePower {
    pub q: u64,
    pub p: u64,
    pub k: u32,
}

/// `n` as an ascending list of `(prime, exponent)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub n: u64,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Ω(n), the number of prime factors counted with multiplicity.
    pub fn big_omega(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    pub fn product(&self) -> u64 {
        self.factors.iter().map(|&(p, e)| p.pow(e)).product()
    }
}

pub fn factorize(n: u64, table: &PrimeTable) -> Result<Factorization> {
    table.check(n, "factorization argument")?;
    if n == 0 {
        return Err(crate::error::domain("cannot factor 0"));
    }
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let mut m = n;
    match &table.spf {
        Some(spf) => {
            while m > 1 {
                let p = spf[m as usize] as u64;
                let mut e = 0;
                while m % p == 0 {
                    m /= p;
                    e += 1;
                }
                factors.push((p, e));
            }
        }
        None => {
            for &p in &table.primes {
                let p = p as u64;
                if p * p > m {
                    break;
                }
                if m % p == 0 {
                    let mut e = 0;
                    while m % p == 0 {
                        m /= p;
                        e += 1;
                    }
                    factors.push((p, e));
                }
            }
            if m > 1 {
                factors.push((m, 1));
            }
        }
    }
    Ok(Factorization { n, factors })
}

/// Λ(n): `log p` when `n = p^k`, else 0.
pub fn von_mangoldt(n: u64, table: &PrimeTable) -> Result<f64> {
    let f = factorize(n, table)?;
    Ok(match f.factors.as_slice() {
        [(p, _)] => (*p as f64).ln(),
        _ => 0.0,
    })
}

/// d_k(n): the number of ordered k-tuples of positive integers with product n.
pub fn divisor_count_k(n: u64, k: u32, table: &PrimeTable) -> Result<u64> {
    if k == 0 {
        return Err(crate::error::domain("divisor_count_k needs k >= 1"));
    }
    let f = factorize(n, table)?;
    Ok(f.factors
        .iter()
        .map(|&(_, e)| binomial(e as u64 + k as u64 - 1, k as u64 - 1))
        .product())
}

/// d_k(n) for `1 <= n <= n_max`; entry `i` holds the value at `n = i + 1`.
pub fn divisor_count_table(n_max: usize, k: u32) -> Vec<u64> {
    let mut acc = vec![0u64; n_max];
    if n_max == 0 {
        return acc;
    }
    acc[0] = 1;
    for _ in 0..k {
        // acc <- acc * 1
        let mut next = vec![0u64; n_max];
        for a in 1..=n_max {
            let v = acc[a - 1];
            if v == 0 {
                continue;
            }
            let mut m = a;
            while m <= n_max {
                next[m - 1] += v;
                m += a;
            }
        }
        acc = next;
    }
    acc
}

pub fn binomial(n: u64, k: u64) -> u64 {
    debug_assert!(k <= n);
    let k = k.min(n - k);
    let mut r: u64 = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Commutative ring operations needed by Dirichlet convolution.
pub trait ConvolutionRing: Clone {
    fn zero_like(&self) -> Self;
    fn is_one(&self) -> bool;
    /// `self += a * b`
    fn add_product(&mut self, a: &Self, b: &Self);
    /// `self -= a * b`
    fn sub_product(&mut self, a: &Self, b: &Self);
}

impl ConvolutionRing for Complex64 {
    fn zero_like(&self) -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn is_one(&self) -> bool {
        *self == Complex64::new(1.0, 0.0)
    }
    fn add_product(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
    fn sub_product(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }
}

impl ConvolutionRing for i64 {
    fn zero_like(&self) -> Self {
        0
    }
    fn is_one(&self) -> bool {
        *self == 1
    }
    fn add_product(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
    fn sub_product(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }
}

/// Dirichlet convolution `(a * b)(n) = Σ_{ℓ m = n} a(ℓ) b(m)`.
///
/// Sequences are 1-indexed arithmetic functions stored from `n = 1`: entry
/// `i` holds the value at `n = i + 1`. The output has the length of the
/// shorter input.
pub fn dirichlet_convolve<T: ConvolutionRing>(a: &[T], b: &[T]) -> Vec<T> {
    let n = a.len().min(b.len());
    if n == 0 {
        return Vec::new();
    }
    let mut out = vec![a[0].zero_like(); n];
    for l in 1..=n {
        let al = &a[l - 1];
        for m in 1..=n / l {
            out[l * m - 1].add_product(al, &b[m - 1]);
        }
    }
    out
}

/// Solves `g * h = d` for `h` by the triangular recursion
/// `h(n) = d(n) − Σ_{ℓ | n, ℓ < n} h(ℓ) g(n/ℓ)`.
///
/// Same indexing as [`dirichlet_convolve`]. Requires `g(1) = 1`; for complex
/// inputs the accumulated round-off is at most about `N·ε` per term.
pub fn dirichlet_deconvolve<T: ConvolutionRing>(d: &[T], g: &[T]) -> Result<Vec<T>> {
    let n = d.len().min(g.len());
    if n == 0 {
        return Ok(Vec::new());
    }
    if !g[0].is_one() {
        return Err(Error::NonInvertible);
    }
    let mut h: Vec<T> = d[..n].to_vec();
    for l in 1..=n {
        // h(l) is final here: every proper divisor of l has already pushed.
        let hl = h[l - 1].clone();
        for m in 2..=n / l {
            h[l * m - 1].sub_product(&hl, &g[m - 1]);
        }
    }
    Ok(h)
}

fn segmented_sieve(limit: u64) -> Vec<u32> {
    let mut primes = vec![2u32];
    if limit < 3 {
        return primes;
    }
    let root = limit.isqrt();
    let base: Vec<u64> = small_sieve(root as usize)
        .into_iter()
        .filter(|&p| p > 2)
        .map(|p| p as u64)
        .collect();
    // Odd n is stored at index (n - 1) / 2; index 0 (n = 1) is skipped.
    let last = (limit - 1) / 2;
    let mut seg = vec![true; SEGMENT];
    let mut lo: u64 = 1;
    while lo <= last {
        let hi = (lo + SEGMENT as u64).min(last + 1);
        let len = (hi - lo) as usize;
        seg[..len].fill(true);
        let n_lo = 2 * lo + 1;
        let n_hi = 2 * (hi - 1) + 1;
        for &p in &base {
            if p * p > n_hi {
                break;
            }
            let mut m = n_lo.div_ceil(p) * p;
            if m % 2 == 0 {
                m += p;
            }
            m = m.max(p * p);
            let mut idx = (m - 1) / 2;
            while idx < hi {
                seg[(idx - lo) as usize] = false;
                idx += p;
            }
        }
        for (i, &is_p) in seg[..len].iter().enumerate() {
            if is_p {
                primes.push((2 * (lo + i as u64) + 1) as u32);
            }
        }
        lo = hi;
    }
    primes
}

fn small_sieve(n: usize) -> Vec<u32> {
    if n < 2 {
        return Vec::new();
    }
    let mut is = vec![true; n + 1];
    is[0] = false;
    is[1] = false;
    let mut i = 2;
    while i * i <= n {
        if is[i] {
            let mut j = i * i;
            while j <= n {
                is[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    is.iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u32)
        .collect()
}

fn linear_sieve(n: usize) -> (Vec<u32>, Vec<u32>) {
    let mut spf = vec![0u32; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
        }
        let si = spf[i];
        for &p in &primes {
            let ip = i * p as usize;
            if p > si || ip > n {
                break;
            }
            spf[ip] = p;
        }
    }
    (primes, spf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spf_table(n: u64) -> PrimeTable {
        PrimeTable::new(n, SieveMode::SmallestFactor).unwrap()
    }

    #[test]
    fn small_limits() {
        let t = PrimeTable::new(10, SieveMode::PrimesOnly).unwrap();
        assert_eq!(t.primes(), &[2, 3, 5, 7]);
        let t = spf_table(10);
        assert_eq!(t.primes(), &[2, 3, 5, 7]);
        let t = PrimeTable::new(2, SieveMode::PrimesOnly).unwrap();
        assert_eq!(t.primes(), &[2]);
        assert!(matches!(
            PrimeTable::new(1, SieveMode::PrimesOnly),
            Err(Error::Capacity { .. })
        ));
        assert!(matches!(
            PrimeTable::new(SPF_MAX + 1, SieveMode::SmallestFactor),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn modes_agree_across_segment_boundaries() {
        let n = 3 * SEGMENT as u64 + 17;
        let a = PrimeTable::new(n, SieveMode::PrimesOnly).unwrap();
        let b = spf_table(n);
        assert_eq!(a.primes(), b.primes());
    }

    #[test]
    fn factorization_examples() {
        for t in [spf_table(100), PrimeTable::new(100, SieveMode::PrimesOnly).unwrap()] {
            let f = t.factorize(12).unwrap();
            assert_eq!(f.factors, vec![(2, 2), (3, 1)]);
            assert_eq!(f.big_omega(), 3);
            let f = t.factorize(1).unwrap();
            assert!(f.factors.is_empty());
            assert_eq!(f.big_omega(), 0);
            assert_eq!(t.factorize(97).unwrap().factors, vec![(97, 1)]);
            assert!(matches!(t.factorize(101), Err(Error::Capacity { .. })));
        }
    }

    #[test]
    fn mangoldt_examples() {
        let t = spf_table(100);
        assert_eq!(von_mangoldt(8, &t).unwrap(), 2f64.ln());
        assert_eq!(von_mangoldt(6, &t).unwrap(), 0.0);
        assert_eq!(von_mangoldt(5, &t).unwrap(), 5f64.ln());
        assert_eq!(von_mangoldt(1, &t).unwrap(), 0.0);
    }

    #[test]
    fn divisor_counts() {
        let t = spf_table(1000);
        assert_eq!(divisor_count_k(6, 2, &t).unwrap(), 4);
        assert_eq!(divisor_count_k(1, 4, &t).unwrap(), 1);
        // ordered 4-tuples with product 8, by enumeration
        let mut count = 0;
        for a in 1..=8u64 {
            for b in 1..=8u64 {
                for c in 1..=8u64 {
                    if 8 % (a * b * c) == 0 {
                        count += 1;
                    }
                }
            }
        }
        assert_eq!(count, 20);
        assert_eq!(divisor_count_k(8, 4, &t).unwrap(), count);
        let table = divisor_count_table(1000, 4);
        for n in 1..=1000u64 {
            assert_eq!(table[n as usize - 1], divisor_count_k(n, 4, &t).unwrap());
        }
    }

    #[test]
    fn deconvolution_identity_and_ones() {
        let ones = vec![Complex64::new(1.0, 0.0); 200];
        let h = dirichlet_deconvolve(&ones, &ones).unwrap();
        assert_eq!(h[0], Complex64::new(1.0, 0.0));
        assert!(h[1..].iter().all(|z| *z == Complex64::new(0.0, 0.0)));

        let d2: Vec<i64> = divisor_count_table(500, 2).into_iter().map(|v| v as i64).collect();
        let ones = vec![1i64; 500];
        let h = dirichlet_deconvolve(&d2, &ones).unwrap();
        assert!(h.iter().all(|&v| v == 1));
        assert_eq!(dirichlet_convolve(&ones, &ones), d2);
    }

    #[test]
    fn deconvolution_requires_unit() {
        let g = vec![2i64, 1, 1];
        assert_eq!(dirichlet_deconvolve(&g, &g), Err(Error::NonInvertible));
    }

    #[test]
    fn d2_over_dchi_mod4() {
        // χ mod 4: χ(1)=1, χ(3)=−1, 0 on evens.
        let n = 100;
        let chi = |k: usize| -> i64 {
            match k % 4 {
                1 => 1,
                3 => -1,
                _ => 0,
            }
        };
        let u: Vec<i64> = (1..=n).map(chi).collect();
        let d_chi = dirichlet_convolve(&u, &u); // χ real so χ̄ = χ
        let d2: Vec<i64> = divisor_count_table(n, 2).into_iter().map(|v| v as i64).collect();
        let h = dirichlet_deconvolve(&d2, &d_chi).unwrap();
        assert_eq!(h[1], 2); // h(2) = 2 − 2·0
        assert_eq!(h[2], 4); // h(3) = 2 − 2·(−1)
        assert_eq!(h[4], 0); // h(5) = 2 − 2·1
        assert_eq!(dirichlet_convolve(&d_chi, &h), d2);
    }
}
