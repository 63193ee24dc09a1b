//! Norms and distances on sequences of unit-disc values indexed by prime
//! powers.
//!
//! With nonnegative weights `a_q` and `η_q(z)² = a_q (1 − Re z)` the quantity
//! `‖z‖² = Σ a_q (1 − Re z_q)` satisfies `‖z ⊗ w‖ ≤ ‖z‖ + ‖w‖`. Two weight
//! schemes are provided: `a_q = Λ(q) / (q^σ log q)`, for which the norm of a
//! completely multiplicative f is `log(ζ(σ) / |F(σ)|)`, and `a_p = 1/p` on the
//! primes up to x, which gives the distance 𝔻(f, g; x).
//!
//! Sums of nonnegative terms run over primes in descending order within
//! fixed blocks, and the block sums are again folded in descending order.
//! Rounding is monotone, so extending the range of primes can only increase
//! the result: 𝔻(f, g; x)² is exactly non-decreasing in x.

use num_complex::Complex64;

use crate::characters::DirichletCharacter;
use crate::error::{domain, Error, Result};
use crate::multfunc::{MultiplicativeFunction, UNIT_TOLERANCE};
use crate::ntheory::PrimeTable;
use crate::par;
use crate::series;

/// Default prime-power cutoff for the σ-norm.
pub const DEFAULT_NORM_CUTOFF: u64 = 1_000_000;

/// `√(a (1 − Re z))` for `|z| <= 1` (with round-off slack) and `a >= 0`.
pub fn eta(z: Complex64, a: f64) -> Result<f64> {
    if !(a >= 0.0) {
        return Err(domain(format!("eta weight must be nonnegative, got {a}")));
    }
    if !(z.norm() <= 1.0 + UNIT_TOLERANCE) {
        return Err(domain(format!("eta argument outside the unit disc: |z| = {}", z.norm())));
    }
    Ok((a * (1.0 - z.re)).max(0.0).sqrt())
}

/// Weights `a_q` on prime powers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightScheme {
    /// `a_q = Λ(q) / (q^σ log q) = 1 / (k q^σ)` for `q = p^k <= cutoff`
    Sigma { sigma: f64, cutoff: u64 },
    /// `a_p = 1/p` for primes `p <= x`, zero on higher prime powers
    Prime { x: u64 },
}

impl WeightScheme {
    fn validate(&self) -> Result<()> {
        match *self {
            WeightScheme::Sigma { sigma, .. } if !(sigma > 1.0) => {
                Err(domain(format!("σ-weights need σ > 1, got {sigma}")))
            }
            _ => Ok(()),
        }
    }

    fn range(&self) -> u64 {
        match *self {
            WeightScheme::Sigma { cutoff, .. } => cutoff,
            WeightScheme::Prime { x } => x,
        }
    }
}

/// `(q, a_q, f(q))` for every prime power with a nonzero weight, ascending q.
fn weighted_values(
    f: &MultiplicativeFunction,
    scheme: WeightScheme,
    table: &PrimeTable,
) -> Result<Vec<(u64, f64, Complex64)>> {
    scheme.validate()?;
    let range = scheme.range();
    check_limit(range, table)?;
    let primes = table.primes_up_to(range);
    let pv = f.prime_values(primes)?;
    let mut out = Vec::new();
    match scheme {
        WeightScheme::Prime { .. } => {
            for (&p, &v) in primes.iter().zip(pv.iter()) {
                out.push((p as u64, 1.0 / p as f64, v));
            }
        }
        WeightScheme::Sigma { sigma, cutoff } => {
            for (&p, &v) in primes.iter().zip(pv.iter()) {
                let p = p as u64;
                let (mut q, mut k, mut fq) = (p, 1u32, v);
                loop {
                    out.push((q, 1.0 / (k as f64 * (q as f64).powf(sigma)), fq));
                    match q.checked_mul(p) {
                        Some(n) if n <= cutoff => {
                            q = n;
                            k += 1;
                            fq *= v;
                        }
                        _ => break,
                    }
                }
            }
            out.sort_unstable_by_key(|e| e.0);
        }
    }
    Ok(out)
}

fn check_limit(x: u64, table: &PrimeTable) -> Result<()> {
    if x > table.limit() {
        Err(Error::Capacity {
            what: "prime range beyond sieve limit",
            value: x,
            limit: table.limit(),
        })
    } else {
        Ok(())
    }
}

/// Sum of nonnegative `term(i)` for `i in 0..len`, in the canonical order:
/// descending `i` inside fixed blocks, block sums folded descending.
pub fn descending_sum(len: usize, term: impl Fn(usize) -> f64 + Sync + Send) -> f64 {
    let blocks = par::map_blocks(len, |r| r.rev().fold(0.0, |acc, i| acc + term(i)));
    blocks.iter().rev().fold(0.0, |acc, b| acc + b)
}

/// `‖f‖² = Σ a_q (1 − Re f(q))` under `scheme`.
pub fn weighted_norm_squared(
    f: &MultiplicativeFunction,
    scheme: WeightScheme,
    table: &PrimeTable,
) -> Result<f64> {
    let vals = weighted_values(f, scheme, table)?;
    Ok(descending_sum(vals.len(), |i| {
        let (_, a, z) = vals[i];
        a * (1.0 - z.re).max(0.0)
    }))
}

/// Truncated σ-norm with a bound on the omitted prime powers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaNorm {
    /// `√(Σ_{q <= cutoff} a_q (1 − Re f(q)))`
    pub norm: f64,
    pub squared: f64,
    /// bound on `Σ_{q > cutoff} a_q (1 − Re f(q))`
    pub tail_bound: f64,
    pub cutoff: u64,
    pub terms: usize,
}

/// The σ-norm of f over prime powers up to `cutoff`.
///
/// The omitted mass is at most `2 Σ_{q > cutoff} a_q`, and `Σ_q a_q = log ζ(σ)`;
/// the bound uses the smaller of `2(log(ζ̂ + r) − Σ_{q <= cutoff} a_q)` with
/// a certified ζ̂ and `2 cutoff^{1−σ}/(σ − 1)`.
pub fn sigma_norm(
    f: &MultiplicativeFunction,
    sigma: f64,
    cutoff: u64,
    table: &PrimeTable,
) -> Result<SigmaNorm> {
    let scheme = WeightScheme::Sigma { sigma, cutoff };
    let vals = weighted_values(f, scheme, table)?;
    let squared = descending_sum(vals.len(), |i| {
        let (_, a, z) = vals[i];
        a * (1.0 - z.re).max(0.0)
    });
    let mass = descending_sum(vals.len(), |i| vals[i].1);
    let analytic = 2.0 * (cutoff as f64).powf(1.0 - sigma) / (sigma - 1.0);
    let tail_bound = match series::zeta(Complex64::new(sigma, 0.0), 1e-13) {
        Ok(z) => {
            let upper = (z.value.re + z.error()).ln();
            // mass carries at most ~terms·ε relative round-off
            let slack = vals.len() as f64 * f64::EPSILON * mass;
            (2.0 * (upper - mass + slack)).max(0.0).min(analytic)
        }
        Err(_) => analytic,
    };
    Ok(SigmaNorm {
        norm: squared.sqrt(),
        squared,
        tail_bound,
        cutoff,
        terms: vals.len(),
    })
}

/// The truncated σ-norm squared against `log(ζ(σ) / |F(σ)|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormIdentity {
    pub sigma: f64,
    pub norm: SigmaNorm,
    pub log_ratio: f64,
    /// error of `log_ratio` from the two series evaluations
    pub series_error: f64,
    pub difference: f64,
    /// `tail_bound + series_error + 1e−9`
    pub tolerance: f64,
}

impl NormIdentity {
    pub fn holds(&self) -> bool {
        self.difference.abs() <= self.tolerance
    }
}

pub fn norm_identity(
    f: &MultiplicativeFunction,
    sigma: f64,
    cutoff: u64,
    precision: f64,
    table: &PrimeTable,
) -> Result<NormIdentity> {
    let norm = sigma_norm(f, sigma, cutoff, table)?;
    let s = Complex64::new(sigma, 0.0);
    let (lz, ez) = series::zeta(s, precision)?.ln_abs()?;
    let (lf, ef) = series::log_abs_dirichlet_f(f, s, precision, table)?;
    let log_ratio = lz - lf;
    let series_error = ez + ef;
    let difference = norm.squared - log_ratio;
    Ok(NormIdentity {
        sigma,
        norm,
        log_ratio,
        series_error,
        difference,
        tolerance: norm.tail_bound + series_error + 1e-9,
    })
}

/// 𝔻(f, g; x)² with the number of primes used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceResult {
    pub squared: f64,
    pub x: u64,
    pub terms: usize,
}

impl DistanceResult {
    pub fn distance(&self) -> f64 {
        self.squared.sqrt()
    }
}

/// `𝔻(f, g; x)² = Σ_{p <= x} (1 − Re f(p) conj g(p)) / p`.
pub fn distance(
    f: &MultiplicativeFunction,
    g: &MultiplicativeFunction,
    x: u64,
    table: &PrimeTable,
) -> Result<DistanceResult> {
    if x < 2 {
        return Err(domain("distance needs x >= 2"));
    }
    check_limit(x, table)?;
    let primes = table.primes_up_to(x);
    let pf = polar_values(f, primes)?;
    let pg = polar_values(g, primes)?;
    let squared = descending_sum(primes.len(), |i| {
        let ((rf, tf), (rg, tg)) = (pf[i], pg[i]);
        (1.0 - rf * rg * (tf - tg).cos()).max(0.0) / primes[i] as f64
    });
    Ok(DistanceResult {
        squared,
        x,
        terms: primes.len(),
    })
}

/// `(r_p, θ_p)` for the given primes; archetypes give `r_p = 1` exactly, so
/// `𝔻(f, f; x)` vanishes exactly for them.
fn polar_values(f: &MultiplicativeFunction, primes: &[u32]) -> Result<Vec<(f64, f64)>> {
    let blocks = par::map_blocks(primes.len(), |r| {
        primes[r]
            .iter()
            .map(|&p| f.polar_at_prime(p as u64, (p as f64).ln()))
            .collect::<Result<Vec<_>>>()
    });
    let mut out = Vec::with_capacity(primes.len());
    for b in blocks {
        out.extend(b?);
    }
    Ok(out)
}

/// `W_r = Σ_{p <= x, p ≡ r (mod L)} 1/p` for every residue r, each summed
/// over descending p. Distances between characters whose moduli divide L
/// are then finite sums over residues.
#[derive(Debug, Clone)]
pub struct ResiduePrimeSums {
    modulus: u64,
    x: u64,
    sums: Vec<f64>,
}

impl ResiduePrimeSums {
    pub fn new(table: &PrimeTable, x: u64, modulus: u64) -> Result<Self> {
        check_limit(x, table)?;
        if modulus == 0 {
            return Err(domain("residue sums need a positive modulus"));
        }
        let mut sums = vec![0.0f64; modulus as usize];
        for &p in table.primes_up_to(x).iter().rev() {
            sums[(p as u64 % modulus) as usize] += 1.0 / p as f64;
        }
        Ok(ResiduePrimeSums { modulus, x, sums })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn sums(&self) -> &[f64] {
        &self.sums
    }

    /// `Σ_{p <= x} (1 − Re w(p mod L)) / p` for a weight `w` on residues,
    /// `|w| <= 1`; residues are visited in ascending order.
    pub fn weighted(&self, w: impl Fn(u64) -> Complex64) -> f64 {
        self.sums
            .iter()
            .enumerate()
            .filter(|(_, &s)| s != 0.0)
            .fold(0.0, |acc, (r, &s)| acc + s * (1.0 - w(r as u64).re).max(0.0))
    }

    /// 𝔻(χ, ψ; x)²; both moduli must divide L.
    pub fn character_distance(
        &self,
        chi: &DirichletCharacter,
        psi: &DirichletCharacter,
    ) -> Result<f64> {
        for m in [chi.modulus(), psi.modulus()] {
            if self.modulus % m != 0 {
                return Err(domain(format!(
                    "character modulus {m} does not divide residue modulus {}",
                    self.modulus
                )));
            }
        }
        let (a, b) = (chi.values_table(), psi.values_table());
        let (qa, qb) = (chi.modulus(), psi.modulus());
        Ok(self.weighted(|r| a[(r % qa) as usize] * b[(r % qb) as usize].conj()))
    }
}

/// Output of the minimisation defining M(x, T).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalaszM {
    /// smallest value of D(t) found; an upper bound on the true minimum
    pub m: f64,
    pub t_star: f64,
    /// `(h/2)·L`: the true minimum is at least `m − slack`
    pub slack: f64,
    /// `L = Σ_{p <= x} |f(p)| log p / p`, a Lipschitz constant of D
    pub lipschitz: f64,
    pub grid_step: f64,
    pub grid_points: usize,
}

/// Grid resolution for [`halasz_m`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    /// spacing; `None` means the largest power of two not above
    /// `min(0.01, 1/log x)`, so grid points are exact binary fractions
    pub step: Option<f64>,
    /// ternary refinement iterations in the best cell
    pub refine_iterations: u32,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            step: None,
            refine_iterations: 60,
        }
    }
}

/// Precomputed prime data for evaluating
/// `D(t) = Σ_{p <= x} (1 − r_p cos(θ_p − t log p)) / p`, where `f(p) = r_p e^{iθ_p}`.
pub struct HalaszProfile {
    ln_p: Vec<f64>,
    inv_p: Vec<f64>,
    r: Vec<f64>,
    theta: Vec<f64>,
}

impl HalaszProfile {
    pub fn new(f: &MultiplicativeFunction, x: u64, table: &PrimeTable) -> Result<Self> {
        check_limit(x, table)?;
        let primes = table.primes_up_to(x);
        let mut prof = HalaszProfile {
            ln_p: Vec::with_capacity(primes.len()),
            inv_p: Vec::with_capacity(primes.len()),
            r: Vec::with_capacity(primes.len()),
            theta: Vec::with_capacity(primes.len()),
        };
        for &p in primes {
            let lp = (p as f64).ln();
            let (r, th) = f.polar_at_prime(p as u64, lp)?;
            prof.ln_p.push(lp);
            prof.inv_p.push(1.0 / p as f64);
            prof.r.push(r);
            prof.theta.push(th);
        }
        Ok(prof)
    }

    pub fn len(&self) -> usize {
        self.ln_p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ln_p.is_empty()
    }

    /// D(t), summed over descending p.
    pub fn eval(&self, t: f64) -> f64 {
        (0..self.len()).rev().fold(0.0, |acc, i| {
            let c = (self.theta[i] - t * self.ln_p[i]).cos();
            acc + (1.0 - self.r[i] * c).max(0.0) * self.inv_p[i]
        })
    }

    pub fn lipschitz(&self) -> f64 {
        (0..self.len())
            .rev()
            .fold(0.0, |acc, i| acc + self.r[i] * self.ln_p[i] * self.inv_p[i])
    }
}

fn default_step(x: u64) -> f64 {
    let h = 0.01f64.min(1.0 / (x.max(3) as f64).ln());
    2f64.powi(h.log2().floor() as i32)
}

/// `t_k = −2T + k h` for `k = 0..=K` with `t_K <= 2T`.
pub fn halasz_grid(t_max: f64, step: f64) -> Vec<f64> {
    let count = ((4.0 * t_max / step) + 1e-9).floor() as usize;
    (0..=count).map(|k| -2.0 * t_max + k as f64 * step).collect()
}

/// Is `(v, t)` a strictly better candidate than `(best_v, best_t)`?
/// Ties on the value prefer smaller `|t|`, then smaller `t`.
fn better(v: f64, t: f64, best_v: f64, best_t: f64) -> bool {
    v < best_v || (v == best_v && (t.abs() < best_t.abs() || (t.abs() == best_t.abs() && t < best_t)))
}

/// `M(x, T) = min_{|t| <= 2T} Σ_{p <= x} (1 − Re f(p) p^{−it}) / p`.
///
/// D is evaluated on a uniform grid over `[−2T, 2T]`, then refined by
/// ternary search inside the cell around the best grid point. The returned
/// value is the smallest D actually evaluated.
pub fn halasz_m(
    f: &MultiplicativeFunction,
    x: u64,
    t_max: f64,
    table: &PrimeTable,
    grid: GridConfig,
) -> Result<HalaszM> {
    if !(t_max > 0.0) {
        return Err(domain(format!("T must be positive, got {t_max}")));
    }
    let prof = HalaszProfile::new(f, x, table)?;
    let step = grid
        .step
        .unwrap_or_else(|| default_step(x));
    if !(step > 0.0) {
        return Err(domain("grid step must be positive"));
    }
    let ts = halasz_grid(t_max, step);
    let vals = par::map(&ts, |&t| prof.eval(t));
    let (mut best_t, mut best_v) = (ts[0], vals[0]);
    for (&t, &v) in ts.iter().zip(&vals) {
        if better(v, t, best_v, best_t) {
            best_v = v;
            best_t = t;
        }
    }
    if best_v > 0.0 {
        let (mut lo, mut hi) = ((best_t - step).max(-2.0 * t_max), (best_t + step).min(2.0 * t_max));
        for _ in 0..grid.refine_iterations {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            let (v1, v2) = (prof.eval(m1), prof.eval(m2));
            for (t, v) in [(m1, v1), (m2, v2)] {
                if v < best_v {
                    best_v = v;
                    best_t = t;
                }
            }
            if v1 <= v2 {
                hi = m2;
            } else {
                lo = m1;
            }
        }
    }
    let lipschitz = prof.lipschitz();
    Ok(HalaszM {
        m: best_v,
        t_star: best_t,
        slack: 0.5 * step * lipschitz,
        lipschitz,
        grid_step: step,
        grid_points: ts.len(),
    })
}
