//! Exact arithmetic with integer combinations of m-th roots of unity.
//!
//! A [`CyclotomicInt`] stores `Σ_k c_k ζ^k` for `0 <= k < m` as an element of
//! the group ring ℤ[C_m]. Equality of complex values (equality in ℤ[ζ_m]) is
//! decided by reducing modulo the cyclotomic polynomial Φ_m.

use std::f64::consts::TAU;

use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclotomicInt {
    coeffs: Vec<i64>,
}

impl CyclotomicInt {
    pub fn zero(m: usize) -> Self {
        assert!(m >= 1, "cyclotomic order must be positive");
        CyclotomicInt {
            coeffs: vec![0; m],
        }
    }

    pub fn from_int(m: usize, v: i64) -> Self {
        let mut z = Self::zero(m);
        z.coeffs[0] = v;
        z
    }

    /// ζ_m^k
    pub fn root(m: usize, k: u64) -> Self {
        let mut z = Self::zero(m);
        z.coeffs[(k % m as u64) as usize] = 1;
        z
    }

    pub fn from_coeffs(coeffs: Vec<i64>) -> Self {
        assert!(!coeffs.is_empty());
        CyclotomicInt { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [i64] {
        &mut self.coeffs
    }

    /// Nonzero `(exponent, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(k, &c)| (k, c))
    }

    pub fn is_zero_in_group_ring(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Canonical representative modulo Φ_m (length φ(m)).
    pub fn reduced(&self) -> Vec<i64> {
        reduce_mod_cyclotomic(&self.coeffs, &cyclotomic_polynomial(self.order()))
    }

    /// Equality as complex numbers, decided exactly.
    pub fn exact_eq(&self, other: &Self) -> bool {
        assert_eq!(self.order(), other.order());
        let diff = self.clone() - other.clone();
        diff.is_zero_in_group_ring() || diff.reduced().iter().all(|&c| c == 0)
    }

    pub fn to_complex(&self) -> Complex64 {
        let m = self.order();
        let roots = root_table(m as u64);
        self.terms()
            .map(|(k, c)| roots[k] * c as f64)
            .fold(Complex64::new(0.0, 0.0), |a, b| a + b)
    }

    pub fn conj(&self) -> Self {
        let m = self.order();
        let mut out = Self::zero(m);
        for (k, c) in self.terms() {
            out.coeffs[(m - k) % m] += c;
        }
        out
    }

    /// `self += a * b` using only the nonzero terms of `a` and `b`.
    pub fn add_product(&mut self, a: &Self, b: &Self) {
        let m = self.order();
        for (i, ca) in a.terms() {
            for (j, cb) in b.terms() {
                self.coeffs[(i + j) % m] += ca * cb;
            }
        }
    }

    pub fn sub_product(&mut self, a: &Self, b: &Self) {
        let m = self.order();
        for (i, ca) in a.terms() {
            for (j, cb) in b.terms() {
                self.coeffs[(i + j) % m] -= ca * cb;
            }
        }
    }
}

impl std::ops::Add for CyclotomicInt {
    type Output = CyclotomicInt;
    fn add(mut self, rhs: Self) -> Self {
        assert_eq!(self.order(), rhs.order());
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs) {
            *a += b;
        }
        self
    }
}

impl std::ops::Sub for CyclotomicInt {
    type Output = CyclotomicInt;
    fn sub(mut self, rhs: Self) -> Self {
        assert_eq!(self.order(), rhs.order());
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs) {
            *a -= b;
        }
        self
    }
}

impl std::ops::Mul for &CyclotomicInt {
    type Output = CyclotomicInt;
    fn mul(self, rhs: &CyclotomicInt) -> CyclotomicInt {
        let mut out = CyclotomicInt::zero(self.order());
        out.add_product(self, rhs);
        out
    }
}

impl crate::ntheory::ConvolutionRing for CyclotomicInt {
    fn zero_like(&self) -> Self {
        CyclotomicInt::zero(self.order())
    }
    fn is_one(&self) -> bool {
        self.exact_eq(&CyclotomicInt::from_int(self.order(), 1))
    }
    fn add_product(&mut self, a: &Self, b: &Self) {
        CyclotomicInt::add_product(self, a, b)
    }
    fn sub_product(&mut self, a: &Self, b: &Self) {
        CyclotomicInt::sub_product(self, a, b)
    }
}

/// e^{2πik/m} for `0 <= k < m`, exact at multiples of a quarter turn.
pub fn root_table(m: u64) -> Vec<Complex64> {
    (0..m).map(|k| unit_root(k, m)).collect()
}

/// e^{2πi num/den}, exact at multiples of a quarter turn.
pub fn unit_root(num: u64, den: u64) -> Complex64 {
    let num = num % den;
    if (4 * num) % den == 0 {
        return match 4 * num / den {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    // reduce to (-1/2, 1/2] turns before scaling
    let frac = if 2 * num > den {
        -((den - num) as f64) / den as f64
    } else {
        num as f64 / den as f64
    };
    let (s, c) = (TAU * frac).sin_cos();
    Complex64::new(c, s)
}

/// Coefficients of Φ_m, constant term first.
pub fn cyclotomic_polynomial(m: usize) -> Vec<i64> {
    // x^m - 1 divided by Φ_d for every proper divisor d of m
    let mut num = vec![0i64; m + 1];
    num[0] = -1;
    num[m] = 1;
    for d in 1..m {
        if m % d == 0 {
            num = exact_div_monic(&num, &cyclotomic_polynomial(d));
        }
    }
    num
}

fn exact_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut quot = vec![0i64; qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn];
        quot[i] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[i + j] -= c * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

fn reduce_mod_cyclotomic(poly: &[i64], phi: &[i64]) -> Vec<i64> {
    let deg = phi.len() - 1;
    let mut a = poly.to_vec();
    for i in (deg..a.len()).rev() {
        let c = a[i];
        if c != 0 {
            for (j, &pj) in phi.iter().enumerate() {
                a[i - deg + j] -= c * pj;
            }
        }
    }
    a.truncate(deg);
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(42).len() - 1, 12);
    }

    #[test]
    fn sum_of_all_roots_vanishes() {
        for m in [2usize, 3, 5, 6, 12, 30] {
            let all = CyclotomicInt::from_coeffs(vec![1; m]);
            assert!(all.exact_eq(&CyclotomicInt::zero(m)));
            assert!(!all.is_zero_in_group_ring());
            assert!(all.to_complex().norm() < 1e-12);
        }
    }

    #[test]
    fn root_multiplication_and_conjugation() {
        let a = CyclotomicInt::root(12, 5);
        let b = CyclotomicInt::root(12, 9);
        assert_eq!(&a * &b, CyclotomicInt::root(12, 2));
        let one = &a * &a.conj();
        assert!(one.exact_eq(&CyclotomicInt::from_int(12, 1)));
    }

    #[test]
    fn quarter_turns_are_exact() {
        assert_eq!(unit_root(1, 2), Complex64::new(-1.0, 0.0));
        assert_eq!(unit_root(3, 4), Complex64::new(0.0, -1.0));
        assert_eq!(unit_root(6, 8), Complex64::new(0.0, -1.0));
        let z = unit_root(1, 3);
        assert!((z - Complex64::new(-0.5, 3f64.sqrt() / 2.0)).norm() < 1e-15);
    }
}
