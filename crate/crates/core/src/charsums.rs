//! Character sums: partial-sum maxima, divisor-type sums twisted by a
//! character, the deconvolution `d = d_χ * h`, and scans of lower bounds
//! for distances between characters.
//!
//! Scans are diagnostics. The absolute constants in the bounds are never
//! asserted; each scan reports the constant that would make its rows tight.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;

use crate::characters::{build_character_group, multiply_characters, primitive_inducing, DirichletCharacter};
use crate::cyclotomic::CyclotomicInt;
use crate::distance::{ResiduePrimeSums, distance as pretentious_distance};
use crate::error::{domain, Error, Result};
use crate::multfunc::MultiplicativeFunction;
use crate::ntheory::{dirichlet_convolve, dirichlet_deconvolve, divisor_count_table, PrimeTable};
use crate::par;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

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

/// `n^{it}`, exactly 1 at `t = 0`.
fn n_it(n: u64, t: f64) -> Complex64 {
    if t == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::from_polar(1.0, t * (n as f64).ln())
    }
}

/// Primitive nonprincipal characters mod q in index order.
pub fn primitive_characters(q: u64) -> Result<Vec<DirichletCharacter>> {
    let group = build_character_group(q)?;
    Ok(group
        .characters()
        .filter(|c| !c.is_principal() && c.is_primitive())
        .collect())
}

/// Every primitive character with conductor at most `bound`, the trivial
/// character mod 1 included, ordered by (modulus, index).
pub fn primitive_characters_up_to(bound: u64) -> Result<Vec<DirichletCharacter>> {
    let mut out = vec![build_character_group(1)?.principal()];
    for m in 3..=bound {
        out.extend(primitive_characters(m)?);
    }
    Ok(out)
}

/// Largest partial sum of a nonprincipal character over one period.
#[derive(Debug, Clone, PartialEq)]
pub struct CharSumProfile {
    pub chi: DirichletCharacter,
    pub max_abs: f64,
    pub argmax_n: u64,
    /// `√q log q`
    pub pv_bound: f64,
    pub ratio: f64,
}

fn profile_from_values(chi: &DirichletCharacter, values: &[Complex64]) -> CharSumProfile {
    let q = chi.modulus();
    let mut s = zero();
    let (mut max_abs, mut argmax_n) = (0.0f64, 1u64);
    for n in 1..=q {
        s += values[(n % q) as usize];
        let a = s.norm();
        if a > max_abs {
            max_abs = a;
            argmax_n = n;
        }
    }
    let pv_bound = (q as f64).sqrt() * (q as f64).ln();
    CharSumProfile {
        chi: chi.clone(),
        max_abs,
        argmax_n,
        pv_bound,
        ratio: max_abs / pv_bound,
    }
}

/// `max_N |Σ_{n <= N} χ(n)|`. A full period sums to 0, so one period
/// covers every N.
pub fn pv_profile(chi: &DirichletCharacter) -> Result<CharSumProfile> {
    if chi.is_principal() {
        return Err(domain("partial sums of a principal character grow linearly"));
    }
    Ok(profile_from_values(chi, &chi.values_table()))
}

/// Profiles of every primitive nonprincipal character with modulus in
/// `moduli`, ordered by (q, index).
pub fn pv_scan(moduli: &[u64]) -> Result<Vec<CharSumProfile>> {
    let per_q = par::map(moduli, |&q| -> Result<Vec<CharSumProfile>> {
        let group = build_character_group(q)?;
        let dl = group.dlog_table();
        Ok(group
            .characters()
            .filter(|c| !c.is_principal() && c.is_primitive())
            .map(|c| profile_from_values(&c, &dl.values(&c)))
            .collect())
    });
    let mut out = Vec::new();
    for r in per_q {
        out.extend(r?);
    }
    Ok(out)
}

/// `max_{N <= x} |Σ_{n <= N} χ(n) n^{it}|` against `√q log q (1 + |t| log x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwistedSumProfile {
    pub max_abs: f64,
    pub argmax_n: u64,
    pub bound: f64,
    pub ratio: f64,
}

pub fn twisted_sum_profile(chi: &DirichletCharacter, t: f64, x: u64) -> Result<TwistedSumProfile> {
    if chi.is_principal() {
        return Err(domain("twisted sums need a nonprincipal character"));
    }
    let q = chi.modulus();
    let vals = chi.values_table();
    let mut s = zero();
    let (mut max_abs, mut argmax_n) = (0.0f64, 1u64);
    for n in 1..=x {
        let v = vals[(n % q) as usize];
        if v != zero() {
            s += v * n_it(n, t);
        }
        let a = s.norm();
        if a > max_abs {
            max_abs = a;
            argmax_n = n;
        }
    }
    let qf = q as f64;
    let bound = qf.sqrt() * qf.ln() * (1.0 + t.abs() * (x.max(1) as f64).ln());
    Ok(TwistedSumProfile {
        max_abs,
        argmax_n,
        bound,
        ratio: max_abs / bound,
    })
}

/// `u(n) = χ(n) n^{it}` for `n = 0..=x` (entry 0 unused).
fn twisted_values(chi: &DirichletCharacter, t: f64, x: u64) -> Vec<Complex64> {
    let q = chi.modulus();
    let vals = chi.values_table();
    (0..=x)
        .map(|n| {
            let v = vals[(n % q) as usize];
            if n == 0 || v == zero() {
                zero()
            } else {
                v * n_it(n, t)
            }
        })
        .collect()
}

/// `Σ_{n <= x} d_{χ,t}(n)` with `d_{χ,t}(n) = Σ_{ab=n} χ(a)a^{it} χ̄(b)b^{−it}`,
/// by the hyperbola split at `y = ⌊√x⌋`:
/// `Σ_{a <= y} u(a) V(x/a) + Σ_{b <= y} v(b) U(x/b) − U(y) V(y)`.
pub fn d_chi_sum(chi: &DirichletCharacter, x: u64, t: f64, table: &PrimeTable) -> Result<Complex64> {
    check_limit(x, table)?;
    if x == 0 {
        return Ok(zero());
    }
    let u = twisted_values(chi, t, x);
    let v: Vec<Complex64> = u.iter().map(|z| z.conj()).collect();
    let prefix = |w: &[Complex64]| {
        let mut p = vec![zero(); w.len()];
        for n in 1..w.len() {
            p[n] = p[n - 1] + w[n];
        }
        p
    };
    let (cu, cv) = (prefix(&u), prefix(&v));
    let y = x.isqrt();
    let mut first = zero();
    let mut mirror = zero();
    for a in 1..=y {
        let k = (x / a) as usize;
        first += u[a as usize] * cv[k];
        mirror += v[a as usize] * cu[k];
    }
    Ok(first + mirror - cu[y as usize] * cv[y as usize])
}

/// The same sum by the double loop over all `ab <= x`; the test oracle for
/// [`d_chi_sum`].
pub fn d_chi_sum_direct(chi: &DirichletCharacter, x: u64, t: f64) -> Complex64 {
    let u = twisted_values(chi, t, x);
    let mut total = zero();
    for a in 1..=x {
        if u[a as usize] == zero() {
            continue;
        }
        let mut inner = zero();
        for b in 1..=x / a {
            inner += u[b as usize].conj();
        }
        total += u[a as usize] * inner;
    }
    total
}

/// `|Σ_{n <= x} d_χ(n)| / (√(qx) log q + q log² q)`.
pub fn estimate6_ratio(chi: &DirichletCharacter, x: u64, table: &PrimeTable) -> Result<f64> {
    let s = d_chi_sum(chi, x, 0.0, table)?;
    let q = chi.modulus() as f64;
    let lq = q.ln();
    Ok(s.norm() / ((q * x as f64).sqrt() * lq + q * lq * lq))
}

/// h(1..=n) with `d_χ * h = d`, in floating point.
pub fn h_sequence(chi: &DirichletCharacter, n: u64, table: &PrimeTable) -> Result<Vec<Complex64>> {
    check_limit(n, table)?;
    let q = chi.modulus();
    let vals = chi.values_table();
    let c: Vec<Complex64> = (1..=n).map(|k| vals[(k % q) as usize]).collect();
    let cbar: Vec<Complex64> = c.iter().map(|z| z.conj()).collect();
    let d_chi = dirichlet_convolve(&c, &cbar);
    let d: Vec<Complex64> = divisor_count_table(n as usize, 2)
        .into_iter()
        .map(|v| Complex64::new(v as f64, 0.0))
        .collect();
    dirichlet_deconvolve(&d, &d_chi)
}

type Sparse = Vec<(usize, i64)>;

fn sparse(coeffs: &[i64]) -> Sparse {
    coeffs
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(k, &c)| (k, c))
        .collect()
}

/// Exponents `e(n)` with `χ(n) = ζ_o^{e(n)}`, `o` the order of χ, for
/// `n = 1..=n_max`.
fn exact_exponents(chi: &DirichletCharacter, n_max: u64) -> (usize, Vec<Option<usize>>) {
    let o = chi.order();
    let lambda = chi.group().exponent();
    let q = chi.modulus();
    let per: Vec<Option<usize>> = (0..q)
        .map(|r| chi.value_index(r).map(|k| (k * o / lambda) as usize))
        .collect();
    let exps = (1..=n_max).map(|n| per[(n % q) as usize]).collect();
    (o as usize, exps)
}

/// `d_χ(1..=n)` exactly in ℤ[C_o].
pub fn d_chi_exact(chi: &DirichletCharacter, n: u64) -> Vec<CyclotomicInt> {
    let (o, e) = exact_exponents(chi, n);
    let n = n as usize;
    let mut out = vec![vec![0i64; o]; n];
    for a in 1..=n {
        let Some(ea) = e[a - 1] else { continue };
        for b in 1..=n / a {
            if let Some(eb) = e[b - 1] {
                out[a * b - 1][(ea + o - eb) % o] += 1;
            }
        }
    }
    out.into_iter().map(CyclotomicInt::from_coeffs).collect()
}

/// h(1..=n) with `d_χ * h = d`, exactly in ℤ[C_o].
pub fn h_sequence_exact(chi: &DirichletCharacter, n: u64) -> Vec<CyclotomicInt> {
    let g = d_chi_exact(chi, n);
    let o = chi.order() as usize;
    let g_sparse: Vec<Sparse> = g.iter().map(|v| sparse(v.coeffs())).collect();
    let n = n as usize;
    let d = divisor_count_table(n, 2);
    let mut h: Vec<Vec<i64>> = d
        .iter()
        .map(|&v| {
            let mut c = vec![0i64; o];
            c[0] = v as i64;
            c
        })
        .collect();
    for l in 1..=n {
        let hl = sparse(&h[l - 1]);
        if hl.is_empty() {
            continue;
        }
        for m in 2..=n / l {
            let gm = &g_sparse[m - 1];
            let target = &mut h[l * m - 1];
            for &(i, ci) in &hl {
                for &(j, cj) in gm {
                    target[(i + j) % o] -= ci * cj;
                }
            }
        }
    }
    h.into_iter().map(CyclotomicInt::from_coeffs).collect()
}

/// Outcome of the exact checks on h for one character.
#[derive(Debug, Clone, PartialEq)]
pub struct HIdentityCheck {
    pub chi: String,
    pub n_max: u64,
    /// `(d_χ * h)(n) = d(n)` for every n
    pub identity: bool,
    /// `h(p) = 2 − χ(p) − χ̄(p)` for every prime p
    pub prime_values: bool,
    /// `|h(n)| <= d₄(n)` for every n
    pub d4_bound: bool,
    pub max_ratio_to_d4: f64,
}

impl HIdentityCheck {
    pub fn all_hold(&self) -> bool {
        self.identity && self.prime_values && self.d4_bound
    }
}

pub fn verify_h_identity(chi: &DirichletCharacter, n: u64, table: &PrimeTable) -> Result<HIdentityCheck> {
    check_limit(n, table)?;
    let h = h_sequence_exact(chi, n);
    let g = d_chi_exact(chi, n);
    let o = chi.order() as usize;
    let nn = n as usize;
    let d = divisor_count_table(nn, 2);
    let d4 = divisor_count_table(nn, 4);

    let g_sparse: Vec<Sparse> = g.iter().map(|v| sparse(v.coeffs())).collect();
    let mut conv = vec![vec![0i64; o]; nn];
    for l in 1..=nn {
        let hl = sparse(h[l - 1].coeffs());
        for m in 1..=nn / l {
            let target = &mut conv[l * m - 1];
            for &(i, ci) in &hl {
                for &(j, cj) in &g_sparse[m - 1] {
                    target[(i + j) % o] += ci * cj;
                }
            }
        }
    }
    let identity = conv.into_iter().zip(&d).all(|(c, &dn)| {
        let c = CyclotomicInt::from_coeffs(c);
        c.exact_eq(&CyclotomicInt::from_int(o, dn as i64))
    });

    let (_, e) = exact_exponents(chi, n);
    let prime_values = table.primes_up_to(n).iter().all(|&p| {
        let p = p as usize;
        let expected = match e[p - 1] {
            Some(k) => {
                CyclotomicInt::from_int(o, 2) - CyclotomicInt::root(o, k as u64) - CyclotomicInt::root(o, ((o - k) % o) as u64)
            }
            None => CyclotomicInt::from_int(o, 2),
        };
        h[p - 1].exact_eq(&expected)
    });

    let mut max_ratio = 0.0f64;
    let mut d4_bound = true;
    for (hn, &b) in h.iter().zip(&d4) {
        let a = hn.to_complex().norm();
        max_ratio = max_ratio.max(a / b as f64);
        if a > b as f64 * (1.0 + 1e-12) + 1e-9 {
            d4_bound = false;
        }
    }
    Ok(HIdentityCheck {
        chi: chi.to_string(),
        n_max: n,
        identity,
        prime_values,
        d4_bound,
        max_ratio_to_d4: max_ratio,
    })
}

/// One row of a distance scan against a lower bound `½ log(c log x / log Q)`
/// taken with `c = 1`, where `Q = q(1 + |t|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub q: u64,
    pub chi_index: u64,
    pub t: f64,
    pub x: u64,
    pub distance_squared: f64,
    pub bound_value: f64,
    /// the c making the row tight: `(log Q / log x)·exp(2 D²)`
    pub implied_c: f64,
}

fn scan_row(q: u64, chi_index: u64, t: f64, x: u64, d2: f64) -> ScanRow {
    let lq = (q as f64 * (1.0 + t.abs())).ln();
    let lx = (x as f64).ln();
    ScanRow {
        q,
        chi_index,
        t,
        x,
        distance_squared: d2,
        bound_value: 0.5 * (lx / lq).ln(),
        implied_c: lq / lx * (2.0 * d2).exp(),
    }
}

fn sorted_x(x_values: &[u64], table: &PrimeTable) -> Result<Vec<u64>> {
    let mut xs = x_values.to_vec();
    xs.sort_unstable();
    xs.dedup();
    if let Some(&m) = xs.last() {
        check_limit(m, table)?;
    }
    Ok(xs)
}

/// `𝔻(1, χ; x)²` for every primitive nonprincipal χ with modulus in
/// `moduli` and every `x >= q` in `x_values`. Rows are ordered by
/// (q, index, x). Each value is a sum over residues of per-residue prime
/// sums taken in descending order, so it is non-decreasing in x exactly.
pub fn prop6_scan(moduli: &[u64], x_values: &[u64], table: &PrimeTable) -> Result<Vec<ScanRow>> {
    let xs = sorted_x(x_values, table)?;
    let per_q = par::map(moduli, |&q| -> Result<Vec<ScanRow>> {
        let chars = primitive_characters(q)?;
        if chars.is_empty() {
            return Ok(Vec::new());
        }
        let tables: Vec<Vec<Complex64>> = chars.iter().map(|c| c.values_table()).collect();
        let sums: Vec<(u64, ResiduePrimeSums)> = xs
            .iter()
            .filter(|&&x| x >= q)
            .map(|&x| ResiduePrimeSums::new(table, x, q).map(|s| (x, s)))
            .collect::<Result<_>>()?;
        let mut rows = Vec::with_capacity(chars.len() * sums.len());
        for (c, vals) in chars.iter().zip(&tables) {
            for (x, s) in &sums {
                let d2 = s.weighted(|r| vals[r as usize]);
                rows.push(scan_row(q, c.index(), 0.0, *x, d2));
            }
        }
        Ok(rows)
    });
    let mut out = Vec::new();
    for r in per_q {
        out.extend(r?);
    }
    Ok(out)
}

/// `𝔻(1, χ(n)n^{it}; x)²` over primitive nonprincipal χ, t and `x >= q`.
/// Rows are ordered by (q, index, t, x).
pub fn prop7_scan(
    moduli: &[u64],
    t_values: &[f64],
    x_values: &[u64],
    table: &PrimeTable,
) -> Result<Vec<ScanRow>> {
    let xs = sorted_x(x_values, table)?;
    let x_max = xs.last().copied().unwrap_or(0);
    let primes = table.primes_up_to(x_max);
    // p^{it}/p and 1/p for every prime and t
    let weights: Vec<Vec<Complex64>> = t_values
        .iter()
        .map(|&t| {
            par::map(primes, |&p| n_it(p as u64, t) / p as f64)
        })
        .collect();
    let per_q = par::map(moduli, |&q| -> Result<Vec<ScanRow>> {
        let chars = primitive_characters(q)?;
        if chars.is_empty() {
            return Ok(Vec::new());
        }
        let tables: Vec<Vec<Complex64>> = chars.iter().map(|c| c.values_table()).collect();
        let xs_q: Vec<u64> = xs.iter().copied().filter(|&x| x >= q).collect();
        // residue sums for each (t, x): inverse weights and twisted weights
        let mut sums: Vec<Vec<(Vec<f64>, Vec<Complex64>)>> = Vec::with_capacity(t_values.len());
        for w in &weights {
            let mut per_x = Vec::with_capacity(xs_q.len());
            for &x in &xs_q {
                let k = table.primes_up_to(x).len();
                let mut inv = vec![0.0f64; q as usize];
                let mut tw = vec![zero(); q as usize];
                for i in (0..k).rev() {
                    let p = primes[i] as u64;
                    let r = (p % q) as usize;
                    inv[r] += 1.0 / p as f64;
                    tw[r] += w[i];
                }
                per_x.push((inv, tw));
            }
            sums.push(per_x);
        }
        let mut rows = Vec::new();
        for (c, vals) in chars.iter().zip(&tables) {
            for (ti, &t) in t_values.iter().enumerate() {
                for (xi, &x) in xs_q.iter().enumerate() {
                    let (inv, tw) = &sums[ti][xi];
                    let d2 = (0..q as usize)
                        .fold(0.0, |acc, r| acc + inv[r] - (vals[r] * tw[r]).re)
                        .max(0.0);
                    rows.push(scan_row(q, c.index(), t, x, d2));
                }
            }
        }
        Ok(rows)
    });
    let mut out = Vec::new();
    for r in per_q {
        out.extend(r?);
    }
    Ok(out)
}

/// Smallest implied constant over a scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSummary {
    pub rows: usize,
    pub min_implied_c: f64,
    pub argmin: ScanRow,
}

pub fn scan_summary(rows: &[ScanRow]) -> Option<ScanSummary> {
    let first = *rows.first()?;
    let argmin = rows.iter().fold(first, |best, r| {
        if r.implied_c < best.implied_c {
            *r
        } else {
            best
        }
    });
    Some(ScanSummary {
        rows: rows.len(),
        min_implied_c: argmin.implied_c,
        argmin,
    })
}

/// `𝔻(f, χ n^{it}; x)² + 𝔻(f, ψ n^{iu}; x)²` against
/// `⅛ log(c log x / (2 log(Q(1 + |t − u|))))`. Reported, not asserted.
#[derive(Debug, Clone, PartialEq)]
pub struct PairRow {
    pub chi: String,
    pub psi: String,
    pub x: u64,
    pub lhs: f64,
    pub rhs: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn pair_distance_report(
    f: &MultiplicativeFunction,
    chi: &DirichletCharacter,
    t: f64,
    psi: &DirichletCharacter,
    u: f64,
    x: u64,
    c: f64,
    big_q: u64,
    table: &PrimeTable,
) -> Result<PairRow> {
    let fc = MultiplicativeFunction::twisted_character(chi.clone(), t);
    let fp = MultiplicativeFunction::twisted_character(psi.clone(), u);
    let a = pretentious_distance(f, &fc, x, table)?.squared;
    let b = pretentious_distance(f, &fp, x, table)?.squared;
    let lq = (big_q as f64 * (1.0 + (t - u).abs())).ln();
    Ok(PairRow {
        chi: chi.to_string(),
        psi: psi.to_string(),
        x,
        lhs: a + b,
        rhs: 0.125 * (c * (x as f64).ln() / (2.0 * lq)).ln(),
    })
}

/// Which lower bound a lemma scan probes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LemmaFamily {
    /// χ of odd order `g >= 3` against primitive ξ mod `m <= (log y)^a_exp`
    /// of opposite parity; reports the nearest ξ
    OddOrder { a_exp: f64 },
    /// `(χ, …, χ, χ̄^{g−1})` against ξ-tuples of conductors `<= log y` with
    /// nontrivial product; reports the smallest total distance
    TrivialProduct { g: u32 },
    /// the `ranks` nearest primitive ψ with conductor below `log y`
    NearestNeighbours { ranks: u32 },
}

/// One diagnostic row: `lhs` is the distance quantity, `ratio = lhs / log log y`
/// is compared with the main-term coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaRow {
    pub lemma: &'static str,
    /// `key=value` pairs joined by `;`
    pub params: String,
    pub lhs: f64,
    pub loglogy: f64,
    pub ratio: f64,
    pub main_coeff: f64,
}

pub fn odd_order_coefficient(g: u64) -> f64 {
    let g = g as f64;
    1.0 - g / PI * (PI / g).sin()
}

/// Residue sums mod lcm(q, m) for every candidate modulus m.
struct PairSums {
    by_modulus: HashMap<u64, ResiduePrimeSums>,
}

impl PairSums {
    fn new(q: u64, candidate_moduli: &[u64], y: u64, table: &PrimeTable) -> Result<Self> {
        let mut by_modulus = HashMap::new();
        for &m in candidate_moduli {
            let l = q.lcm(&m);
            if !by_modulus.contains_key(&l) {
                by_modulus.insert(l, ResiduePrimeSums::new(table, y, l)?);
            }
        }
        Ok(PairSums { by_modulus })
    }

    /// 𝔻(a, b; y)² from value tables of a mod `qa` and b mod `qb`.
    fn distance(&self, qa: u64, a: &[Complex64], qb: u64, b: &[Complex64]) -> f64 {
        let s = &self.by_modulus[&qa.lcm(&qb)];
        s.weighted(|r| a[(r % qa) as usize] * b[(r % qb) as usize].conj())
    }
}

/// Distance diagnostics for one lemma family over characters with modulus
/// in `moduli`, at `y`. Rows are ordered by (q, index, rank).
pub fn lemma_distance_scan(
    family: LemmaFamily,
    moduli: &[u64],
    y: u64,
    table: &PrimeTable,
) -> Result<Vec<LemmaRow>> {
    check_limit(y, table)?;
    if y < 16 {
        return Err(domain("lemma scans need y >= 16 so that log log y > 0"));
    }
    let log_y = (y as f64).ln();
    let loglogy = log_y.ln();
    let cand_bound = match family {
        LemmaFamily::OddOrder { a_exp } => log_y.powf(a_exp).floor() as u64,
        LemmaFamily::TrivialProduct { .. } => log_y.floor() as u64,
        LemmaFamily::NearestNeighbours { .. } => {
            let b = log_y.floor() as u64;
            if b as f64 == log_y { b - 1 } else { b }
        }
    };
    let candidates = primitive_characters_up_to(cand_bound)?;
    let cand_tables: Vec<Vec<Complex64>> = candidates.iter().map(|c| c.values_table()).collect();
    let mut cand_moduli: Vec<u64> = candidates.iter().map(|c| c.modulus()).collect();
    cand_moduli.dedup();

    let per_q = par::map(moduli, |&q| -> Result<Vec<LemmaRow>> {
        let chars = primitive_characters(q)?;
        let chars: Vec<DirichletCharacter> = match family {
            LemmaFamily::OddOrder { .. } => chars
                .into_iter()
                .filter(|c| c.order() % 2 == 1 && c.order() >= 3)
                .collect(),
            _ => chars,
        };
        if chars.is_empty() {
            return Ok(Vec::new());
        }
        let sums = PairSums::new(q, &cand_moduli, y, table)?;
        let mut last_sums: HashMap<u64, PairSums> = HashMap::new();
        let mut rows = Vec::new();
        for chi in &chars {
            let vals = chi.values_table();
            let dist_to = |k: usize| sums.distance(q, &vals, candidates[k].modulus(), &cand_tables[k]);
            match family {
                LemmaFamily::OddOrder { a_exp } => {
                    let parity = chi.parity();
                    let best = (0..candidates.len())
                        .filter(|&k| candidates[k].parity() * parity == -1)
                        .map(|k| (dist_to(k), k))
                        .fold(None, |acc: Option<(f64, usize)>, (d, k)| match acc {
                            Some((bd, _)) if bd <= d => acc,
                            _ => Some((d, k)),
                        });
                    if let Some((d, k)) = best {
                        let g = chi.order();
                        let coeff = odd_order_coefficient(g);
                        rows.push(LemmaRow {
                            lemma: "L3",
                            params: format!("chi={chi};g={g};xi={};A={a_exp}", candidates[k]),
                            lhs: d,
                            loglogy,
                            ratio: d / loglogy,
                            main_coeff: coeff,
                        });
                    }
                }
                LemmaFamily::TrivialProduct { g } => {
                    if g < 2 {
                        return Err(domain("tuple size must be at least 2"));
                    }
                    let last = primitive_inducing(&chi.conj().pow(g as u64 - 1))?;
                    let last_vals = last.values_table();
                    let lq = last.modulus();
                    // the two nearest candidates for each coordinate
                    let top2 = |s: &PairSums, qa: u64, a: &[Complex64]| {
                        let mut ds: Vec<(f64, usize)> = (0..candidates.len())
                            .map(|k| (s.distance(qa, a, candidates[k].modulus(), &cand_tables[k]), k))
                            .collect();
                        ds.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
                        ds.truncate(2);
                        ds
                    };
                    let near_chi = top2(&sums, q, &vals);
                    // the primitive last entry may have a smaller modulus
                    let near_last = if lq == q {
                        top2(&sums, lq, &last_vals)
                    } else {
                        if !last_sums.contains_key(&lq) {
                            last_sums.insert(lq, PairSums::new(lq, &cand_moduli, y, table)?);
                        }
                        top2(&last_sums[&lq], lq, &last_vals)
                    };
                    let mut coords = vec![near_chi; g as usize - 1];
                    coords.push(near_last);
                    if let Some((total, picks)) = min_nontrivial_tuple(&coords, &candidates)? {
                        let xis: Vec<String> = picks.iter().map(|&k| candidates[k].to_string()).collect();
                        rows.push(LemmaRow {
                            lemma: "L4",
                            params: format!("chi={chi};g={g};last={last};xi={}", xis.join("|")),
                            lhs: total,
                            loglogy,
                            ratio: total / loglogy,
                            main_coeff: 1.0 / g as f64,
                        });
                    }
                }
                LemmaFamily::NearestNeighbours { ranks } => {
                    let mut ds: Vec<(f64, usize)> = (0..candidates.len()).map(|k| (dist_to(k), k)).collect();
                    ds.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
                    for (j, &(d, k)) in ds.iter().take(ranks as usize).enumerate() {
                        let j = j + 1;
                        rows.push(LemmaRow {
                            lemma: "L5",
                            params: format!("chi={chi};j={j};psi={}", candidates[k]),
                            lhs: d,
                            loglogy,
                            ratio: d / loglogy,
                            main_coeff: 1.0 - 1.0 / (j as f64).sqrt(),
                        });
                    }
                }
            }
        }
        Ok(rows)
    });
    let mut out = Vec::new();
    for r in per_q {
        out.extend(r?);
    }
    Ok(out)
}

/// Smallest total over tuples drawn from each coordinate's candidates whose
/// character product is nontrivial. With the two nearest candidates per
/// coordinate this is the exact minimum: if the all-nearest tuple has
/// trivial product, replacing any single entry makes it nontrivial.
fn min_nontrivial_tuple(
    coords: &[Vec<(f64, usize)>],
    candidates: &[DirichletCharacter],
) -> Result<Option<(f64, Vec<usize>)>> {
    let sizes: Vec<usize> = coords.iter().map(Vec::len).collect();
    if sizes.contains(&0) {
        return Ok(None);
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut idx = vec![0usize; coords.len()];
    loop {
        let total = idx.iter().zip(coords).fold(0.0, |acc, (&i, c)| acc + c[i].0);
        if best.as_ref().is_none_or(|(b, _)| total < *b) {
            let picks: Vec<usize> = idx.iter().zip(coords).map(|(&i, c)| c[i].1).collect();
            let mut prod = candidates[picks[0]].clone();
            for &k in &picks[1..] {
                prod = multiply_characters(&prod, &candidates[k])?;
            }
            if !prod.is_principal() {
                best = Some((total, picks));
            }
        }
        // odometer over the tuple indices
        let mut j = 0;
        loop {
            if j == idx.len() {
                return Ok(best);
            }
            idx[j] += 1;
            if idx[j] < sizes[j] {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}
