//! Mean values of multiplicative functions and the quantities that bound
//! them: the heuristic `exp(−Σ (1 − f(p))/p)`, Hall's variant with the
//! constant κ, and Halász's bound through M(x, T).
//!
//! The implied constants of these bounds are not known explicitly, so each
//! report carries ratios rather than verdicts.

use num_complex::Complex64;
use num_integer::Integer;

use crate::distance::{halasz_m, GridConfig, HalaszM};
use crate::error::{domain, Error, Result};
use crate::multfunc::{random_function, MultiplicativeFunction, RandomMode};
use crate::ntheory::PrimeTable;
use crate::par;

/// Hall's constant κ, truncated to four digits.
pub const HALL_KAPPA: f64 = 0.3286;

fn check_limit(x: u64, table: &PrimeTable) -> Result<()> {
    if x > table.limit() {
        return Err(Error::Capacity {
            what: "x",
            value: x,
            limit: table.limit(),
        });
    }
    Ok(())
}

/// Sum over fixed blocks, each block summed in ascending order and the
/// block sums folded in ascending order.
fn block_sum(values: &[Complex64], keep: impl Fn(usize) -> bool + Sync + Send) -> Complex64 {
    let zero = Complex64::new(0.0, 0.0);
    par::map_blocks(values.len(), |r| {
        r.filter(|&i| keep(i)).fold(zero, |acc, i| acc + values[i])
    })
    .into_iter()
    .fold(zero, |a, b| a + b)
}

/// `(1/x) Σ_{n <= x} f(n)`.
pub fn mean_value(f: &MultiplicativeFunction, x: u64, table: &PrimeTable) -> Result<Complex64> {
    check_limit(x, table)?;
    if x == 0 {
        return Err(domain("mean value needs x >= 1"));
    }
    let v = f.values_upto(x, table)?;
    Ok(block_sum(&v, |_| true) / x as f64)
}

/// `Σ_{p <= x} (1 − Re f(p)) / p`, summed over descending p.
fn prime_deficit(f: &MultiplicativeFunction, x: u64, table: &PrimeTable) -> Result<f64> {
    check_limit(x, table)?;
    let primes = table.primes_up_to(x);
    let vals = f.prime_values(primes)?;
    Ok(primes
        .iter()
        .zip(vals.iter())
        .rev()
        .fold(0.0, |acc, (&p, v)| acc + (1.0 - v.re) / p as f64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeuristicValue {
    /// `exp(−Σ_{p <= x} (1 − Re f(p)) / p)`
    pub value: f64,
    /// f takes non-real values at some prime, so only Re f(p) was used
    pub real_part_used: bool,
}

pub fn heuristic_value(f: &MultiplicativeFunction, x: u64, table: &PrimeTable) -> Result<HeuristicValue> {
    Ok(HeuristicValue {
        value: (-prime_deficit(f, x, table)?).exp(),
        real_part_used: !f.is_real_on_primes(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HallReport {
    pub f: String,
    pub x: u64,
    pub mean: Complex64,
    /// `exp(−κ Σ_{p <= x} (1 − f(p)) / p)`
    pub bound: f64,
    /// `|mean| / bound`
    pub ratio: f64,
}

/// Mean value of a real f against Hall's bound.
pub fn hall_real_diagnostic(f: &MultiplicativeFunction, x: u64, table: &PrimeTable) -> Result<HallReport> {
    if !f.is_real_on_primes() {
        return Err(domain(format!("{f} is not real-valued on primes")));
    }
    let mean = mean_value(f, x, table)?;
    let bound = (-HALL_KAPPA * prime_deficit(f, x, table)?).exp();
    Ok(HallReport {
        f: f.to_string(),
        x,
        mean,
        bound,
        ratio: mean.norm() / bound,
    })
}

/// Hall reports for the seeded random functions `seeds` of one mode.
pub fn hall_family(
    seeds: std::ops::Range<u64>,
    mode: RandomMode,
    x: u64,
    table: &PrimeTable,
) -> Result<Vec<HallReport>> {
    let seeds: Vec<u64> = seeds.collect();
    par::map(&seeds, |&s| hall_real_diagnostic(&random_function(s, mode, table), x, table))
        .into_iter()
        .collect()
}

/// Mean value, heuristic and Halász's bound for one f.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanValueReport {
    pub f: String,
    pub x: u64,
    pub t_max: f64,
    pub mean: Complex64,
    pub heuristic: HeuristicValue,
    pub m: HalaszM,
    /// `(1 + M) e^{−M} + 1/√T`
    pub halasz_rhs: f64,
    pub ratio_heuristic: f64,
    pub ratio_halasz: f64,
}

/// Column names of the report CSV.
pub const CSV_HEADER: [&str; 11] = [
    "f", "x", "T", "mean_re", "mean_im", "heuristic", "M", "t_star", "halasz_rhs", "ratio_heur",
    "ratio_halasz",
];

impl MeanValueReport {
    pub fn csv_fields(&self) -> [String; 11] {
        [
            self.f.clone(),
            self.x.to_string(),
            self.t_max.to_string(),
            self.mean.re.to_string(),
            self.mean.im.to_string(),
            self.heuristic.value.to_string(),
            self.m.m.to_string(),
            self.m.t_star.to_string(),
            self.halasz_rhs.to_string(),
            self.ratio_heuristic.to_string(),
            self.ratio_halasz.to_string(),
        ]
    }
}

pub fn halasz_report(
    f: &MultiplicativeFunction,
    x: u64,
    t_max: f64,
    table: &PrimeTable,
    grid: GridConfig,
) -> Result<MeanValueReport> {
    let mean = mean_value(f, x, table)?;
    let heuristic = heuristic_value(f, x, table)?;
    let m = halasz_m(f, x, t_max, table, grid)?;
    let halasz_rhs = (1.0 + m.m) * (-m.m).exp() + 1.0 / t_max.sqrt();
    let a = mean.norm();
    Ok(MeanValueReport {
        f: f.to_string(),
        x,
        t_max,
        mean,
        heuristic,
        m,
        halasz_rhs,
        ratio_heuristic: a / heuristic.value,
        ratio_halasz: a / halasz_rhs,
    })
}

/// `(q/x) Σ_{n <= x, n ≡ a (mod q)} f(n)`.
pub fn progression_mean(
    f: &MultiplicativeFunction,
    x: u64,
    q: u64,
    a: u64,
    table: &PrimeTable,
) -> Result<Complex64> {
    if q == 0 {
        return Err(domain("modulus must be positive"));
    }
    if a.gcd(&q) != 1 {
        return Err(domain(format!("gcd({a}, {q}) != 1")));
    }
    if q >= x {
        return Err(domain(format!("need q < x, got q = {q}, x = {x}")));
    }
    check_limit(x, table)?;
    let v = f.values_upto(x, table)?;
    let r = a % q;
    let s = block_sum(&v, |i| (i as u64 + 1) % q == r);
    Ok(s * (q as f64 / x as f64))
}
