//! Certified evaluation of ζ(s), Dirichlet L-functions and Dirichlet series
//! of completely multiplicative functions on `Re s > 1`.
//!
//! Hurwitz zeta values come from Euler–Maclaurin summation with an explicit
//! remainder bound. L-functions are finite combinations of Hurwitz values.
//! A function of the form `λ(n)^ε χ(n) n^{iτ}` has a Dirichlet series that is
//! a shifted L-function (or a quotient of two), so it is evaluated through
//! that route; any other function is evaluated by its Euler product over the
//! primes of a table, with the tail over larger primes bounded analytically.
//!
//! Every [`CertifiedValue`] carries a rigorous truncation radius and, kept
//! separately, an estimate of floating-point round-off.

use num_complex::Complex64;

use crate::characters::DirichletCharacter;
use crate::error::{domain, Error, Result};
use crate::multfunc::{AnalyticForm, MultiplicativeFunction};
use crate::ntheory::PrimeTable;
use crate::par;

/// Smallest admissible `σ − 1`.
pub const DELTA_MIN: f64 = 0.01;

/// Largest Euler–Maclaurin cutoff tried before giving up.
pub const HURWITZ_N_MAX: u64 = 1 << 24;

/// Radius used when the caller asks for best effort (`target = ∞`).
const BEST_EFFORT: f64 = 1e-13;

const EPS: f64 = f64::EPSILON;

/// `B_2, B_4, …, B_30`.
const BERNOULLI: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

/// A complex value with a rigorous truncation radius and a separate
/// round-off estimate: `|true − value| <= radius + roundoff`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifiedValue {
    pub value: Complex64,
    pub radius: f64,
    pub roundoff: f64,
}

impl CertifiedValue {
    pub fn new(value: Complex64, radius: f64, roundoff: f64) -> Self {
        CertifiedValue {
            value,
            radius,
            roundoff,
        }
    }

    pub fn exact(value: Complex64) -> Self {
        Self::new(value, 0.0, 0.0)
    }

    /// Total error budget `radius + roundoff`.
    pub fn error(&self) -> f64 {
        self.radius + self.roundoff
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.value).norm() <= self.error()
    }

    /// Do the two enclosures intersect?
    pub fn overlaps(&self, other: &CertifiedValue) -> bool {
        (self.value - other.value).norm() <= self.error() + other.error()
    }

    /// `log |value|` with error `e / (|v| − e)`.
    pub fn ln_abs(&self) -> Result<(f64, f64)> {
        let m = self.value.norm();
        let e = self.error();
        if m <= e {
            return Err(domain("log of a value whose enclosure contains 0"));
        }
        Ok((m.ln(), e / (m - e) + 2.0 * EPS * m.ln().abs()))
    }

    pub fn mul(&self, other: &CertifiedValue) -> CertifiedValue {
        let (a, b) = (self.value.norm(), other.value.norm());
        let v = self.value * other.value;
        CertifiedValue {
            value: v,
            radius: a * other.radius + b * self.radius + self.radius * other.radius,
            roundoff: a * other.roundoff
                + b * self.roundoff
                + self.roundoff * other.roundoff
                + self.radius * other.roundoff
                + self.roundoff * other.radius
                + 4.0 * EPS * v.norm(),
        }
    }

    /// `self / other`, error `(a + |A/B| b) / (|B| − b)` split by source.
    pub fn div(&self, other: &CertifiedValue) -> Result<CertifiedValue> {
        let bm = other.value.norm();
        let b = other.error();
        if bm <= b {
            return Err(domain("division by a value whose enclosure contains 0"));
        }
        let q = self.value / other.value;
        let qm = q.norm();
        Ok(CertifiedValue {
            value: q,
            radius: (self.radius + qm * other.radius) / (bm - b),
            roundoff: (self.roundoff + qm * other.roundoff) / (bm - b) + 4.0 * EPS * qm,
        })
    }

    pub fn scale(&self, c: Complex64) -> CertifiedValue {
        let m = c.norm();
        CertifiedValue {
            value: self.value * c,
            radius: self.radius * m,
            roundoff: self.roundoff * m + 2.0 * EPS * (self.value * c).norm(),
        }
    }

    pub fn add(&self, other: &CertifiedValue) -> CertifiedValue {
        let v = self.value + other.value;
        CertifiedValue {
            value: v,
            radius: self.radius + other.radius,
            roundoff: self.roundoff + other.roundoff + EPS * v.norm(),
        }
    }

    pub fn sub(&self, other: &CertifiedValue) -> CertifiedValue {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }
}

fn check_half_plane(s: Complex64) -> Result<()> {
    if !(s.re >= 1.0 + DELTA_MIN) {
        return Err(domain(format!(
            "Re s = {} is below the supported half-plane Re s >= 1 + {DELTA_MIN}",
            s.re
        )));
    }
    Ok(())
}

fn effective_target(target: f64) -> Result<f64> {
    if target.is_infinite() {
        Ok(BEST_EFFORT)
    } else if target > 0.0 {
        Ok(target)
    } else {
        Err(domain(format!("target radius must be positive, got {target}")))
    }
}

/// Rising factorial `(s)_m = s (s+1) ⋯ (s+m−1)`.
fn rising(s: Complex64, m: usize) -> Complex64 {
    (0..m).fold(Complex64::new(1.0, 0.0), |acc, j| acc * (s + j as f64))
}

/// Euler–Maclaurin remainder bounds after `N` terms and `M` correction
/// terms, for the value and for the s-derivative.
fn em_bounds(s: Complex64, x: f64, m: usize) -> (f64, f64) {
    let sigma = s.re;
    let c = sigma + 2.0 * m as f64 - 1.0;
    let pm = rising(s, 2 * m).norm();
    let lead = 4.0 * pm / std::f64::consts::TAU.powi(2 * m as i32);
    let xp = x.powf(-c);
    let value = lead * xp / c;
    let h: f64 = (0..2 * m).map(|j| 1.0 / (s + j as f64).norm()).sum();
    let deriv = lead * (h * xp / c + xp * (x.ln() / c + 1.0 / (c * c)));
    (value, deriv)
}

/// Smallest `N` (then `M`) from a doubling search whose remainder bound is
/// at most `target`.
fn choose_em(s: Complex64, a: f64, target: f64, with_derivative: bool) -> Result<(u64, usize)> {
    let mut n = 8u64;
    let mut best = f64::INFINITY;
    while n <= HURWITZ_N_MAX {
        let x = a + n as f64;
        for m in 1..=BERNOULLI.len() {
            let (bv, bd) = em_bounds(s, x, m);
            let b = if with_derivative { bv.max(bd) } else { bv };
            if b <= target {
                return Ok((n, m));
            }
            best = best.min(b);
        }
        n *= 2;
    }
    Err(Error::PrecisionUnreachable {
        target,
        achievable: best,
    })
}

/// ζ(s, a) and, optionally, ∂ζ(s, a)/∂s for `0 < a <= 1`.
fn hurwitz_impl(
    s: Complex64,
    a: f64,
    target: f64,
    with_derivative: bool,
) -> Result<(CertifiedValue, Option<CertifiedValue>)> {
    check_half_plane(s)?;
    if !(a > 0.0 && a <= 1.0) {
        return Err(domain(format!("Hurwitz parameter must lie in (0, 1], got {a}")));
    }
    let target = effective_target(target)?;
    let (n, m) = choose_em(s, a, target, with_derivative)?;
    let t_abs = s.im.abs();
    let phase_err = |lnu: f64| EPS * (8.0 + (t_abs + s.re) * lnu);

    // direct part, smallest terms first
    let mut v = Complex64::new(0.0, 0.0);
    let mut d = Complex64::new(0.0, 0.0);
    let mut rv = 0.0;
    let mut rd = 0.0;
    for k in (0..n).rev() {
        let u = a + k as f64;
        let lu = u.ln();
        let term = (-s * lu).exp();
        v += term;
        rv += term.norm() * phase_err(lu.abs());
        if with_derivative {
            let dt = -term * lu;
            d += dt;
            rd += dt.norm() * phase_err(lu.abs());
        }
    }
    let x = a + n as f64;
    let lx = x.ln();
    let xs = (-s * lx).exp(); // X^{−s}
    let one = Complex64::new(1.0, 0.0);
    let sm1 = s - one;
    let integral = xs * x / sm1;
    let half = xs * 0.5;
    let mut corr = Complex64::new(0.0, 0.0);
    let mut dcorr = Complex64::new(0.0, 0.0);
    let mut fact = 1.0f64; // (2j)!
    let mut poch = s; // (s)_{2j−1}
    let mut dpoch_ratio = one / s; // Σ_{i<2j−1} 1/(s+i)
    let mut xpow = xs / x; // X^{−s−2j+1}
    for j in 1..=m {
        fact *= (2 * j - 1) as f64 * (2 * j) as f64;
        if j > 1 {
            let a1 = s + (2 * j - 3) as f64;
            let a2 = s + (2 * j - 2) as f64;
            poch = poch * a1 * a2;
            dpoch_ratio += one / a1 + one / a2;
            xpow /= x * x;
        }
        let c = BERNOULLI[j - 1] / fact;
        let term = poch * xpow * c;
        corr += term;
        if with_derivative {
            dcorr += term * (dpoch_ratio - lx);
        }
    }
    let tail = integral + half + corr;
    let value = v + tail;
    let tail_round = (integral.norm() + half.norm() + corr.norm()) * phase_err(lx) + 16.0 * EPS * value.norm();
    let (bv, bd) = em_bounds(s, x, m);
    let val = CertifiedValue::new(value, bv, rv + tail_round);
    let der = if with_derivative {
        let dint = -integral * lx - integral / sm1;
        let dhalf = -half * lx;
        let dtail = dint + dhalf + dcorr;
        let dv = d + dtail;
        let dround = (dint.norm() + dhalf.norm() + dcorr.norm()) * phase_err(lx) * (1.0 + lx)
            + 16.0 * EPS * dv.norm();
        Some(CertifiedValue::new(dv, bd, rd + dround))
    } else {
        None
    };
    Ok((val, der))
}

/// Hurwitz zeta ζ(s, a) for `0 < a <= 1`, `Re s >= 1 + δ_min`.
pub fn hurwitz(s: Complex64, a: f64, target_radius: f64) -> Result<CertifiedValue> {
    Ok(hurwitz_impl(s, a, target_radius, false)?.0)
}

/// `(ζ(s, a), ∂ζ(s, a)/∂s)`.
pub fn hurwitz_with_derivative(
    s: Complex64,
    a: f64,
    target_radius: f64,
) -> Result<(CertifiedValue, CertifiedValue)> {
    let (v, d) = hurwitz_impl(s, a, target_radius, true)?;
    Ok((v, d.expect("derivative requested")))
}

/// ζ(s) with truncation radius at most `target_radius` (`∞` for best effort).
pub fn zeta(s: Complex64, target_radius: f64) -> Result<CertifiedValue> {
    hurwitz(s, 1.0, target_radius)
}

/// `(ζ(s), ζ'(s))`.
pub fn zeta_with_derivative(
    s: Complex64,
    target_radius: f64,
) -> Result<(CertifiedValue, CertifiedValue)> {
    hurwitz_with_derivative(s, 1.0, target_radius)
}

/// `L(s, χ) = q^{−s} Σ_{a=1}^{q} χ(a) ζ(s, a/q)` and optionally `L'(s, χ)`.
fn l_impl(
    chi: &DirichletCharacter,
    s: Complex64,
    target: f64,
    with_derivative: bool,
) -> Result<(CertifiedValue, Option<CertifiedValue>)> {
    check_half_plane(s)?;
    let target = effective_target(target)?;
    let q = chi.modulus();
    let lq = (q as f64).ln();
    let qs = (-s * lq).exp();
    let units: Vec<u64> = (1..=q).filter(|&a| chi.value_index(a).is_some()).collect();
    // each Hurwitz radius is scaled by |q^{−s}| = q^{−σ} and summed over φ(q) terms
    let per = target * (q as f64).powf(s.re) / units.len() as f64 / 2.0;
    let parts = par::map(&units, |&a| hurwitz_impl(s, a as f64 / q as f64, per, with_derivative));
    let mut v = CertifiedValue::exact(Complex64::new(0.0, 0.0));
    let mut d = CertifiedValue::exact(Complex64::new(0.0, 0.0));
    for (&a, part) in units.iter().zip(parts) {
        let (hv, hd) = part?;
        let c = chi.value(a);
        v = v.add(&hv.scale(c));
        if let Some(hd) = hd {
            d = d.add(&hd.scale(c));
        }
    }
    let l = v.scale(qs);
    let dl = if with_derivative {
        // L' = −log q · L + q^{−s} Σ χ(a) ζ'(s, a/q)
        Some(l.scale(Complex64::new(-lq, 0.0)).add(&d.scale(qs)))
    } else {
        None
    };
    Ok((l, dl))
}

/// Dirichlet L-function `L(s, χ)` on `Re s >= 1 + δ_min`.
pub fn l_function(chi: &DirichletCharacter, s: Complex64, target_radius: f64) -> Result<CertifiedValue> {
    Ok(l_impl(chi, s, target_radius, false)?.0)
}

/// `(L(s, χ), L'(s, χ))`.
pub fn l_function_with_derivative(
    chi: &DirichletCharacter,
    s: Complex64,
    target_radius: f64,
) -> Result<(CertifiedValue, CertifiedValue)> {
    let (v, d) = l_impl(chi, s, target_radius, true)?;
    Ok((v, d.expect("derivative requested")))
}

/// Rigorous lower bound for `|L(s, χ)|` and upper bound for `|L(s, ·)|` on
/// `Re s = σ > 1`: `1/ζ(σ) <= |L| <= ζ(σ) <= σ/(σ−1)`.
fn l_bounds(sigma: f64) -> (f64, f64) {
    let z = sigma / (sigma - 1.0);
    (1.0 / z, z)
}

/// Dirichlet series of `λ^ε χ n^{iτ}` at s: `L(s − iτ, χ)`, or
/// `L(2(s − iτ), χ²) / L(s − iτ, χ)` when ε = 1.
pub fn dirichlet_f_analytic(form: &AnalyticForm, s: Complex64, target_radius: f64) -> Result<CertifiedValue> {
    check_half_plane(s)?;
    let target = effective_target(target_radius)?;
    let sp = s - Complex64::new(0.0, form.tau);
    if !form.liouville {
        return l_function(&form.chi, sp, target);
    }
    let (lo, hi) = l_bounds(sp.re);
    let eps = target * lo / 4.0 / (1.0 + hi / lo);
    let num = l_function(&form.chi.pow(2), sp * 2.0, eps)?;
    let den = l_function(&form.chi, sp, eps.min(lo / 2.0))?;
    num.div(&den)
}

/// Best achievable radius of the Euler product over primes `<= p_max`.
fn euler_tail(sigma: f64, p_max: f64) -> f64 {
    p_max.powf(1.0 - sigma) / ((sigma - 1.0) * (1.0 - p_max.powf(-sigma)))
}

/// `−log(1 − w)` for `|w| < 1`, accurate for small `|w|`.
fn neg_log1m(w: Complex64) -> Complex64 {
    let m = w.norm();
    if m < 0.25 {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut pw = w;
        let mut k = 1.0;
        loop {
            let term = pw / k;
            sum += term;
            if term.norm() <= EPS * 0.25 * sum.norm() || k > 60.0 {
                break;
            }
            pw *= w;
            k += 1.0;
        }
        sum
    } else {
        -(Complex64::new(1.0, 0.0) - w).ln()
    }
}

/// Number of leading primes of `table` whose log-tail bound meets `target`
/// (all of them for an infinite target).
fn euler_prime_count(sigma: f64, target: f64, table: &PrimeTable) -> Result<usize> {
    let primes = table.primes();
    let p_last = *primes.last().expect("tables hold at least the prime 2") as f64;
    if target.is_infinite() {
        return Ok(primes.len());
    }
    if !(target > 0.0) {
        return Err(domain(format!("target radius must be positive, got {target}")));
    }
    if euler_tail(sigma, p_last) > target {
        return Err(Error::PrecisionUnreachable {
            target,
            achievable: euler_tail(sigma, p_last),
        });
    }
    Ok(primes.partition_point(|&p| euler_tail(sigma, p as f64) > target) + 1)
}

/// `Σ_{p <= P} −log(1 − f(p) p^{−s})` over the first `count` primes, with
/// the tail bound and accumulated round-off.
fn euler_log(
    f: &MultiplicativeFunction,
    s: Complex64,
    count: usize,
    table: &PrimeTable,
) -> Result<(Complex64, f64, f64)> {
    let sigma = s.re;
    let primes = &table.primes()[..count.min(table.primes().len())];
    let fv = f.prime_values(primes)?;
    let t_abs = s.im.abs();
    let blocks = par::map_blocks(primes.len(), |r| {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut round = 0.0;
        for i in r.rev() {
            let lp = (primes[i] as f64).ln();
            let w = fv[i] * (-s * lp).exp();
            let term = neg_log1m(w);
            acc += term;
            round += term.norm() * EPS * (8.0 + (t_abs + sigma) * lp);
        }
        (acc, round)
    });
    let (log_f, log_round) = blocks
        .iter()
        .rev()
        .fold((Complex64::new(0.0, 0.0), 0.0), |(a, r), (b, rb)| (a + b, r + rb + EPS * (a + b).norm()));
    let eps_tail = euler_tail(sigma, *primes.last().unwrap() as f64);
    Ok((log_f, eps_tail, log_round))
}

/// `F(s) = Π_{p <= P} (1 − f(p) p^{−s})^{−1}` over the primes of `table`,
/// with the smallest P from the table that meets the target.
pub fn dirichlet_f_euler(
    f: &MultiplicativeFunction,
    s: Complex64,
    target_radius: f64,
    table: &PrimeTable,
) -> Result<CertifiedValue> {
    check_half_plane(s)?;
    let sigma = s.re;
    // |F| <= ζ(σ) <= σ/(σ−1), so a log-tail ε gives radius <= |F| (e^ε − 1)
    let fmax = sigma / (sigma - 1.0);
    let log_target = if target_radius.is_infinite() {
        target_radius
    } else {
        if !(target_radius > 0.0) {
            return Err(domain(format!("target radius must be positive, got {target_radius}")));
        }
        (target_radius / fmax).ln_1p()
    };
    let count = match euler_prime_count(sigma, log_target, table) {
        Err(Error::PrecisionUnreachable { achievable, .. }) => {
            return Err(Error::PrecisionUnreachable {
                target: target_radius,
                achievable: fmax * achievable.exp_m1(),
            })
        }
        r => r?,
    };
    let (log_f, eps_tail, log_round) = euler_log(f, s, count, table)?;
    let value = log_f.exp();
    let m = value.norm();
    Ok(CertifiedValue::new(
        value,
        m * eps_tail.exp_m1(),
        m * (log_round.exp_m1() + 4.0 * EPS * (1.0 + log_f.norm())),
    ))
}

/// `log |F(s)|` with an error bound. On the Euler-product route the log is
/// summed directly, so its error is the log-tail bound plus round-off even
/// when that bound is too large to certify `F(s)` itself.
pub fn log_abs_dirichlet_f(
    f: &MultiplicativeFunction,
    s: Complex64,
    target_error: f64,
    table: &PrimeTable,
) -> Result<(f64, f64)> {
    if let Some(form) = f.analytic_form() {
        return dirichlet_f_analytic(&form, s, target_error)?.ln_abs();
    }
    check_half_plane(s)?;
    let count = euler_prime_count(s.re, target_error, table)?;
    let (log_f, eps_tail, log_round) = euler_log(f, s, count, table)?;
    Ok((log_f.re, eps_tail + log_round + EPS * log_f.re.abs()))
}

/// `F(s) = Σ f(n) n^{−s}`: through L-functions when f has the structured
/// form `λ^ε χ n^{iτ}`, otherwise by its Euler product over `table`.
pub fn dirichlet_f(
    f: &MultiplicativeFunction,
    s: Complex64,
    target_radius: f64,
    table: &PrimeTable,
) -> Result<CertifiedValue> {
    match f.analytic_form() {
        Some(form) => dirichlet_f_analytic(&form, s, target_radius),
        None => dirichlet_f_euler(f, s, target_radius, table),
    }
}

/// `F'/F(s)` for the structured form.
pub fn log_derivative_analytic(form: &AnalyticForm, s: Complex64, target_radius: f64) -> Result<CertifiedValue> {
    check_half_plane(s)?;
    let target = effective_target(target_radius)?;
    let sp = s - Complex64::new(0.0, form.tau);
    // error of L'/L is (a' + |L'/L| a)/(|L| − a) with |L'/L| <= −ζ'/ζ(σ) < 1/(σ−1)
    let ratio = |chi: &DirichletCharacter, z: Complex64, goal: f64| -> Result<CertifiedValue> {
        let (lo, _) = l_bounds(z.re);
        let eps = goal * lo / (4.0 * (2.0 + 1.0 / (z.re - 1.0)));
        let (l, dl) = l_function_with_derivative(chi, z, eps)?;
        dl.div(&l)
    };
    if !form.liouville {
        return ratio(&form.chi, sp, target);
    }
    let a = ratio(&form.chi.pow(2), sp * 2.0, target / 4.0)?;
    let b = ratio(&form.chi, sp, target / 2.0)?;
    Ok(a.scale(Complex64::new(2.0, 0.0)).sub(&b))
}

/// Tail `Σ_{n > N} log n · n^{−σ} <= N^{1−σ} (log N/(σ−1) + 1/(σ−1)²)`.
fn log_tail(sigma: f64, n: f64) -> f64 {
    let d = sigma - 1.0;
    n.powf(-d) * (n.ln() / d + 1.0 / (d * d))
}

/// `F'/F(s) = −Σ_{n <= N} Λ(n) f(n) n^{−s}` over the prime powers of `table`.
pub fn log_derivative_direct(
    f: &MultiplicativeFunction,
    s: Complex64,
    target_radius: f64,
    table: &PrimeTable,
) -> Result<CertifiedValue> {
    check_half_plane(s)?;
    let sigma = s.re;
    let limit = table.limit();
    let n_cut = if target_radius.is_infinite() {
        limit
    } else {
        if !(target_radius > 0.0) {
            return Err(domain(format!("target radius must be positive, got {target_radius}")));
        }
        if log_tail(sigma, limit as f64) > target_radius {
            return Err(Error::PrecisionUnreachable {
                target: target_radius,
                achievable: log_tail(sigma, limit as f64),
            });
        }
        let mut n = 16u64.min(limit);
        while n < limit && log_tail(sigma, n as f64) > target_radius {
            n = (n * 2).min(limit);
        }
        n
    };
    let primes = table.primes_up_to(n_cut);
    let fv = f.prime_values(primes)?;
    let t_abs = s.im.abs();
    let blocks = par::map_blocks(primes.len(), |r| {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut round = 0.0;
        for i in r.rev() {
            let p = primes[i] as u64;
            let lp = (p as f64).ln();
            let w = fv[i] * (-s * lp).exp();
            let mut q = p;
            let mut wk = w;
            let mut sum = Complex64::new(0.0, 0.0);
            loop {
                sum += wk;
                match q.checked_mul(p) {
                    Some(next) if next <= n_cut => {
                        q = next;
                        wk *= w;
                    }
                    _ => break,
                }
            }
            let term = sum * lp;
            acc += term;
            round += term.norm() * EPS * (8.0 + (t_abs + sigma) * (q as f64).ln());
        }
        (acc, round)
    });
    let (sum, round) = blocks
        .iter()
        .rev()
        .fold((Complex64::new(0.0, 0.0), 0.0), |(a, r), (b, rb)| (a + b, r + rb + EPS * (a + b).norm()));
    Ok(CertifiedValue::new(-sum, log_tail(sigma, n_cut as f64), round))
}

/// `F'(s)/F(s)`: structured functions through L-functions, others by the
/// direct von Mangoldt sum over `table`.
pub fn log_derivative(
    f: &MultiplicativeFunction,
    s: Complex64,
    target_radius: f64,
    table: &PrimeTable,
) -> Result<CertifiedValue> {
    match f.analytic_form() {
        Some(form) => log_derivative_analytic(&form, s, target_radius),
        None => log_derivative_direct(f, s, target_radius, table),
    }
}
