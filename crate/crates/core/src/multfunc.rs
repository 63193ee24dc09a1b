//! Completely multiplicative functions with values in the closed unit disc.
//!
//! A function is described structurally (archetypes, products, conjugates)
//! or by an explicit table of prime values. Values at primes are computed on
//! demand and the prefix of prime values used by sweeps is memoized.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::characters::{multiply_characters, DirichletCharacter};
use crate::error::{domain, Error, Result};
use crate::ntheory::{PrimeTable, SieveMode};
use crate::par;

/// Slack allowed above modulus 1 for values produced in floating point.
pub const UNIT_TOLERANCE: f64 = 1e-12;

/// Explicit prime values `f(p)` for the primes of a table, ascending.
#[derive(Debug, Clone)]
pub struct PrimeValues {
    pub name: String,
    primes: Vec<u32>,
    values: Vec<Complex64>,
}

impl PrimeValues {
    pub fn new(name: impl Into<String>, primes: Vec<u32>, values: Vec<Complex64>) -> Result<Self> {
        if primes.len() != values.len() {
            return Err(domain("prime value table: lengths differ"));
        }
        if let Some((p, v)) = primes
            .iter()
            .zip(&values)
            .find(|(_, v)| !(v.norm() <= 1.0 + UNIT_TOLERANCE))
        {
            return Err(domain(format!("|f({p})| = {} exceeds 1", v.norm())));
        }
        Ok(PrimeValues {
            name: name.into(),
            primes,
            values,
        })
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    fn lookup(&self, p: u64) -> Result<Complex64> {
        let last = self.primes.last().copied().unwrap_or(0) as u64;
        if p > last {
            return Err(Error::Capacity {
                what: "prime beyond value table",
                value: p,
                limit: last,
            });
        }
        self.primes
            .binary_search(&(p as u32))
            .map(|i| self.values[i])
            .map_err(|_| domain(format!("{p} is not a prime of the value table")))
    }
}

#[derive(Debug, Clone)]
pub enum Kind {
    One,
    Liouville,
    /// n ↦ n^{it}
    Archimedean(f64),
    Character(DirichletCharacter),
    /// n ↦ χ(n) n^{it}
    TwistedCharacter(DirichletCharacter, f64),
    Product(Arc<MultiplicativeFunction>, Arc<MultiplicativeFunction>),
    Conjugate(Arc<MultiplicativeFunction>),
    Table(Arc<PrimeValues>),
}

/// `f(n) = λ(n)^ε χ(n) n^{iτ}`, the shape whose Dirichlet series is a
/// quotient of shifted L-functions.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticForm {
    pub chi: DirichletCharacter,
    pub tau: f64,
    pub liouville: bool,
}

pub struct MultiplicativeFunction {
    kind: Kind,
    cache: RwLock<Arc<Vec<Complex64>>>,
}

impl Clone for MultiplicativeFunction {
    fn clone(&self) -> Self {
        MultiplicativeFunction::new(self.kind.clone())
    }
}

impl fmt::Debug for MultiplicativeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiplicativeFunction({self})")
    }
}

impl fmt::Display for MultiplicativeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::One => write!(f, "one"),
            Kind::Liouville => write!(f, "liouville"),
            Kind::Archimedean(t) => write!(f, "nit:{t}"),
            Kind::Character(chi) => write!(f, "chi:{chi}"),
            Kind::TwistedCharacter(chi, t) => write!(f, "chit:{chi}:{t}"),
            Kind::Product(a, b) => write!(f, "({a})*({b})"),
            Kind::Conjugate(a) => write!(f, "conj({a})"),
            Kind::Table(t) => write!(f, "{}", t.name),
        }
    }
}

impl MultiplicativeFunction {
    pub fn new(kind: Kind) -> Self {
        MultiplicativeFunction {
            kind,
            cache: RwLock::new(Arc::new(Vec::new())),
        }
    }

    pub fn one() -> Self {
        Self::new(Kind::One)
    }

    pub fn liouville() -> Self {
        Self::new(Kind::Liouville)
    }

    pub fn archimedean(t: f64) -> Self {
        Self::new(Kind::Archimedean(t))
    }

    pub fn character(chi: DirichletCharacter) -> Self {
        Self::new(Kind::Character(chi))
    }

    pub fn twisted_character(chi: DirichletCharacter, t: f64) -> Self {
        Self::new(Kind::TwistedCharacter(chi, t))
    }

    pub fn product(f: &MultiplicativeFunction, g: &MultiplicativeFunction) -> Self {
        Self::new(Kind::Product(Arc::new(f.clone()), Arc::new(g.clone())))
    }

    pub fn conjugate(f: &MultiplicativeFunction) -> Self {
        Self::new(Kind::Conjugate(Arc::new(f.clone())))
    }

    /// Table kind; every value must lie in the closed unit disc.
    pub fn from_prime_values(
        name: impl Into<String>,
        primes: Vec<u32>,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        Ok(Self::new(Kind::Table(Arc::new(PrimeValues::new(
            name, primes, values,
        )?))))
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    /// `f(p)` for a prime `p` (not checked for primality except in table kind).
    pub fn value_at_prime(&self, p: u64) -> Result<Complex64> {
        Ok(match &self.kind {
            Kind::One => Complex64::new(1.0, 0.0),
            Kind::Liouville => Complex64::new(-1.0, 0.0),
            Kind::Archimedean(t) => Complex64::from_polar(1.0, t * (p as f64).ln()),
            Kind::Character(chi) => chi.value(p),
            Kind::TwistedCharacter(chi, t) => {
                chi.value(p) * Complex64::from_polar(1.0, t * (p as f64).ln())
            }
            Kind::Product(a, b) => a.value_at_prime(p)? * b.value_at_prime(p)?,
            Kind::Conjugate(a) => a.value_at_prime(p)?.conj(),
            Kind::Table(t) => t.lookup(p)?,
        })
    }

    /// `(r, θ)` with `f(p) = r e^{iθ}`. For the archimedean part θ is exactly
    /// `t * ln_p`, so subtracting `t * ln_p` again cancels to zero.
    pub fn polar_at_prime(&self, p: u64, ln_p: f64) -> Result<(f64, f64)> {
        Ok(match &self.kind {
            Kind::One => (1.0, 0.0),
            Kind::Liouville => (1.0, std::f64::consts::PI),
            Kind::Archimedean(t) => (1.0, t * ln_p),
            Kind::Character(chi) => match chi.value_index(p) {
                Some(k) => (1.0, TAU * k as f64 / chi.group().exponent() as f64),
                None => (0.0, 0.0),
            },
            Kind::TwistedCharacter(chi, t) => match chi.value_index(p) {
                Some(k) => (1.0, TAU * k as f64 / chi.group().exponent() as f64 + t * ln_p),
                None => (0.0, 0.0),
            },
            Kind::Product(a, b) => {
                let (ra, ta) = a.polar_at_prime(p, ln_p)?;
                let (rb, tb) = b.polar_at_prime(p, ln_p)?;
                (ra * rb, ta + tb)
            }
            Kind::Conjugate(a) => {
                let (r, t) = a.polar_at_prime(p, ln_p)?;
                (r, -t)
            }
            Kind::Table(t) => {
                let v = t.lookup(p)?;
                (v.norm(), v.arg())
            }
        })
    }

    /// `f(p)` for every prime in `primes`, which must be a prefix of the
    /// ascending sequence of primes. Memoized across calls.
    pub fn prime_values(&self, primes: &[u32]) -> Result<Arc<Vec<Complex64>>> {
        {
            let cache = self.cache.read().expect("prime value cache poisoned");
            if cache.len() == primes.len() {
                return Ok(Arc::clone(&cache));
            }
            if cache.len() > primes.len() {
                return Ok(Arc::new(cache[..primes.len()].to_vec()));
            }
        }
        let values: Vec<Complex64> = match &self.kind {
            Kind::Table(t) => {
                if primes.len() > t.values.len() {
                    let p = primes[t.values.len()] as u64;
                    return Err(Error::Capacity {
                        what: "prime beyond value table",
                        value: p,
                        limit: t.primes.last().copied().unwrap_or(0) as u64,
                    });
                }
                t.values[..primes.len()].to_vec()
            }
            _ => {
                let chunks = par::map_blocks(primes.len(), |r| {
                    primes[r]
                        .iter()
                        .map(|&p| self.value_at_prime(p as u64))
                        .collect::<Result<Vec<_>>>()
                });
                let mut out = Vec::with_capacity(primes.len());
                for c in chunks {
                    out.extend(c?);
                }
                out
            }
        };
        let values = Arc::new(values);
        let mut cache = self.cache.write().expect("prime value cache poisoned");
        if cache.len() < values.len() {
            *cache = Arc::clone(&values);
        }
        Ok(values)
    }

    /// `f(n) = Π f(p)^e` over the factorization of `n`.
    pub fn evaluate(&self, n: u64, table: &PrimeTable) -> Result<Complex64> {
        if n == 0 {
            return Err(domain("multiplicative functions are evaluated at n >= 1"));
        }
        let fac = table.factorize(n)?;
        let mut acc = Complex64::new(1.0, 0.0);
        for (p, e) in fac.factors {
            let v = self.value_at_prime(p)?;
            for _ in 0..e {
                acc *= v;
            }
        }
        Ok(acc)
    }

    /// `f(1), …, f(x)`: entry `i` holds `f(i + 1)`.
    pub fn values_upto(&self, x: u64, table: &PrimeTable) -> Result<Vec<Complex64>> {
        if x > table.limit() {
            return Err(Error::Capacity {
                what: "evaluation range",
                value: x,
                limit: table.limit(),
            });
        }
        let local;
        let spf = match table.spf() {
            Some(s) => s,
            None => {
                local = PrimeTable::new(x.max(2), SieveMode::SmallestFactor)?;
                local.spf().expect("built in smallest-factor mode")
            }
        };
        let pv = self.prime_values(table.primes_up_to(x))?;
        let n = x as usize;
        let mut v = vec![Complex64::new(0.0, 0.0); n + 1];
        if n >= 1 {
            v[1] = Complex64::new(1.0, 0.0);
        }
        let mut next_prime = 0usize;
        for m in 2..=n {
            let p = spf[m] as usize;
            if p == m {
                v[m] = pv[next_prime];
                next_prime += 1;
            } else {
                v[m] = v[m / p] * v[p];
            }
        }
        v.remove(0);
        Ok(v)
    }

    /// True when `|f(p)| = 1` at every prime.
    pub fn is_unimodular(&self) -> bool {
        match &self.kind {
            Kind::One | Kind::Liouville | Kind::Archimedean(_) => true,
            Kind::Character(chi) | Kind::TwistedCharacter(chi, _) => chi.modulus() == 1,
            Kind::Product(a, b) => a.is_unimodular() && b.is_unimodular(),
            Kind::Conjugate(a) => a.is_unimodular(),
            Kind::Table(t) => t.values.iter().all(|v| (v.norm() - 1.0).abs() <= UNIT_TOLERANCE),
        }
    }

    /// True when every `f(p)` is real.
    pub fn is_real_on_primes(&self) -> bool {
        match &self.kind {
            Kind::One | Kind::Liouville => true,
            Kind::Archimedean(t) => *t == 0.0,
            Kind::Character(chi) => chi.order() <= 2,
            Kind::TwistedCharacter(chi, t) => *t == 0.0 && chi.order() <= 2,
            Kind::Product(..) | Kind::Conjugate(_) => match self.analytic_form() {
                Some(form) => form.tau == 0.0 && form.chi.order() <= 2,
                None => {
                    let (a, b) = match &self.kind {
                        Kind::Product(a, b) => (a.is_real_on_primes(), b.is_real_on_primes()),
                        Kind::Conjugate(a) => (a.is_real_on_primes(), true),
                        _ => unreachable!(),
                    };
                    a && b
                }
            },
            Kind::Table(t) => t.values.iter().all(|v| v.im == 0.0),
        }
    }

    /// The structured form `λ^ε χ n^{iτ}` when the function has one.
    pub fn analytic_form(&self) -> Option<AnalyticForm> {
        let trivial = || {
            crate::characters::build_character_group(1)
                .expect("modulus 1")
                .principal()
        };
        match &self.kind {
            Kind::One => Some(AnalyticForm {
                chi: trivial(),
                tau: 0.0,
                liouville: false,
            }),
            Kind::Liouville => Some(AnalyticForm {
                chi: trivial(),
                tau: 0.0,
                liouville: true,
            }),
            Kind::Archimedean(t) => Some(AnalyticForm {
                chi: trivial(),
                tau: *t,
                liouville: false,
            }),
            Kind::Character(chi) => Some(AnalyticForm {
                chi: chi.clone(),
                tau: 0.0,
                liouville: false,
            }),
            Kind::TwistedCharacter(chi, t) => Some(AnalyticForm {
                chi: chi.clone(),
                tau: *t,
                liouville: false,
            }),
            Kind::Product(a, b) => {
                let (fa, fb) = (a.analytic_form()?, b.analytic_form()?);
                Some(AnalyticForm {
                    chi: multiply_characters(&fa.chi, &fb.chi).ok()?,
                    tau: fa.tau + fb.tau,
                    liouville: fa.liouville != fb.liouville,
                })
            }
            Kind::Conjugate(a) => {
                let fa = a.analytic_form()?;
                Some(AnalyticForm {
                    chi: fa.chi.conj(),
                    tau: -fa.tau,
                    liouville: fa.liouville,
                })
            }
            Kind::Table(_) => None,
        }
    }
}

/// Builds a function from its textual description.
pub fn make_function(spec: &str, table: &PrimeTable) -> Result<MultiplicativeFunction> {
    spec.parse::<FunctionSpec>()?.build(table)
}

/// Distribution of the prime values of a random function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomMode {
    /// uniform on the unit circle
    Unimodular,
    /// uniform on [−1, 1]
    RealSigned,
    /// uniform on [0, 1]
    NonNegative,
}

impl RandomMode {
    pub fn name(&self) -> &'static str {
        match self {
            RandomMode::Unimodular => "unimodular",
            RandomMode::RealSigned => "real",
            RandomMode::NonNegative => "nonneg",
        }
    }
}

impl std::str::FromStr for RandomMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unimodular" | "unit" | "u" => Ok(RandomMode::Unimodular),
            "real" | "real-signed" | "signed" | "r" => Ok(RandomMode::RealSigned),
            "nonneg" | "n" => Ok(RandomMode::NonNegative),
            _ => Err(Error::Parse(format!(
                "unknown random mode '{s}' (unimodular, real, nonneg)"
            ))),
        }
    }
}

/// Table function with i.i.d. prime values for every prime of `table`,
/// drawn in ascending order of p from a ChaCha8 stream seeded by `seed`.
/// Tables of different sizes built from one seed agree on common primes.
pub fn random_function(seed: u64, mode: RandomMode, table: &PrimeTable) -> MultiplicativeFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let primes = table.primes().to_vec();
    let values = primes
        .iter()
        .map(|_| {
            let u: f64 = rng.random();
            match mode {
                RandomMode::Unimodular => {
                    let (s, c) = (TAU * u).sin_cos();
                    Complex64::new(c, s)
                }
                RandomMode::RealSigned => Complex64::new(2.0 * u - 1.0, 0.0),
                RandomMode::NonNegative => Complex64::new(u, 0.0),
            }
        })
        .collect();
    MultiplicativeFunction::new(Kind::Table(Arc::new(PrimeValues {
        name: format!("rand:{}:{seed}", mode.name()),
        primes,
        values,
    })))
}

/// Textual function description:
/// `one | liouville | nit:<t> | chi:<q>:<e,...> | chit:<q>:<e,...>:<t> | rand:<mode>:<seed>`.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    One,
    Liouville,
    Archimedean(f64),
    Character(String),
    TwistedCharacter(String, f64),
    Random(RandomMode, u64),
}

impl std::str::FromStr for FunctionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("malformed function '{s}'"));
        let float = |v: &str| v.trim().parse::<f64>().map_err(|_| bad());
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["one"] => Ok(FunctionSpec::One),
            ["liouville"] => Ok(FunctionSpec::Liouville),
            ["nit", t] => Ok(FunctionSpec::Archimedean(float(t)?)),
            ["chi", q, e] => {
                let c = format!("{q}:{e}");
                c.parse::<DirichletCharacter>()?;
                Ok(FunctionSpec::Character(c))
            }
            ["chit", q, e, t] => {
                let c = format!("{q}:{e}");
                c.parse::<DirichletCharacter>()?;
                Ok(FunctionSpec::TwistedCharacter(c, float(t)?))
            }
            ["rand", mode, seed] => Ok(FunctionSpec::Random(
                mode.parse()?,
                seed.trim().parse().map_err(|_| bad())?,
            )),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSpec::One => write!(f, "one"),
            FunctionSpec::Liouville => write!(f, "liouville"),
            FunctionSpec::Archimedean(t) => write!(f, "nit:{t}"),
            FunctionSpec::Character(c) => write!(f, "chi:{c}"),
            FunctionSpec::TwistedCharacter(c, t) => write!(f, "chit:{c}:{t}"),
            FunctionSpec::Random(m, seed) => write!(f, "rand:{}:{seed}", m.name()),
        }
    }
}

impl FunctionSpec {
    /// Random functions draw their values over the primes of `table`.
    pub fn build(&self, table: &PrimeTable) -> Result<MultiplicativeFunction> {
        Ok(match self {
            FunctionSpec::One => MultiplicativeFunction::one(),
            FunctionSpec::Liouville => MultiplicativeFunction::liouville(),
            FunctionSpec::Archimedean(t) => MultiplicativeFunction::archimedean(*t),
            FunctionSpec::Character(c) => MultiplicativeFunction::character(c.parse()?),
            FunctionSpec::TwistedCharacter(c, t) => {
                MultiplicativeFunction::twisted_character(c.parse()?, *t)
            }
            FunctionSpec::Random(mode, seed) => random_function(*seed, *mode, table),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> PrimeTable {
        PrimeTable::new(10_000, SieveMode::SmallestFactor).unwrap()
    }

    #[test]
    fn archetype_values() {
        let t = table();
        assert_eq!(
            MultiplicativeFunction::liouville().evaluate(12, &t).unwrap(),
            Complex64::new(-1.0, 0.0)
        );
        let a = MultiplicativeFunction::archimedean(1.0).evaluate(2, &t).unwrap();
        assert!((a - Complex64::from_polar(1.0, 2f64.ln())).norm() < 1e-15);
        for f in [
            MultiplicativeFunction::one(),
            MultiplicativeFunction::liouville(),
            MultiplicativeFunction::archimedean(3.0),
        ] {
            assert_eq!(f.evaluate(1, &t).unwrap(), Complex64::new(1.0, 0.0));
        }
        let ll = MultiplicativeFunction::product(
            &MultiplicativeFunction::liouville(),
            &MultiplicativeFunction::liouville(),
        );
        for n in 1..200 {
            assert_eq!(ll.evaluate(n, &t).unwrap(), Complex64::new(1.0, 0.0));
        }
        let tw = MultiplicativeFunction::twisted_character("4:1".parse().unwrap(), 0.0);
        assert_eq!(tw.evaluate(3, &t).unwrap(), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn table_kind_rejects_values_outside_disc() {
        let err = MultiplicativeFunction::from_prime_values(
            "bad",
            vec![2, 3],
            vec![Complex64::new(0.5, 0.0), Complex64::new(1.1, 0.0)],
        );
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    #[test]
    fn random_functions_are_deterministic_and_in_range() {
        let t = table();
        let a = random_function(7, RandomMode::NonNegative, &t);
        let b = random_function(7, RandomMode::NonNegative, &t);
        let pa = a.prime_values(t.primes()).unwrap();
        let pb = b.prime_values(t.primes()).unwrap();
        assert_eq!(pa, pb);
        assert!(pa.iter().all(|v| v.im == 0.0 && (0.0..=1.0).contains(&v.re)));
        let u = random_function(7, RandomMode::Unimodular, &t);
        assert!(u.is_unimodular());
        let small = PrimeTable::new(100, SieveMode::PrimesOnly).unwrap();
        let us = random_function(7, RandomMode::Unimodular, &small);
        let head = u.prime_values(small.primes()).unwrap();
        assert_eq!(*us.prime_values(small.primes()).unwrap(), *head);
        assert!(matches!(
            us.value_at_prime(101),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn values_upto_matches_evaluate() {
        let t = table();
        let f = random_function(3, RandomMode::Unimodular, &t);
        let v = f.values_upto(2000, &t).unwrap();
        for n in 1..=2000u64 {
            let e = f.evaluate(n, &t).unwrap();
            assert!((v[n as usize - 1] - e).norm() < 1e-13, "n={n}");
        }
        let p = PrimeTable::new(3000, SieveMode::PrimesOnly).unwrap();
        let w = MultiplicativeFunction::liouville().values_upto(12, &p).unwrap();
        assert_eq!(w[11], Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn analytic_forms_compose() {
        let chi: DirichletCharacter = "4:1".parse().unwrap();
        let f = MultiplicativeFunction::product(
            &MultiplicativeFunction::twisted_character(chi.clone(), 2.0),
            &MultiplicativeFunction::conjugate(&MultiplicativeFunction::archimedean(0.5)),
        );
        let form = f.analytic_form().unwrap();
        assert_eq!(form.chi, chi);
        assert_eq!(form.tau, 1.5);
        assert!(!form.liouville);
        let psi: DirichletCharacter = "3:1".parse().unwrap();
        let g = MultiplicativeFunction::product(
            &MultiplicativeFunction::character(chi),
            &MultiplicativeFunction::product(
                &MultiplicativeFunction::character(psi),
                &MultiplicativeFunction::liouville(),
            ),
        );
        let form = g.analytic_form().unwrap();
        assert_eq!(form.chi.modulus(), 12);
        assert!(form.liouville);
        assert!(g.is_real_on_primes());
    }

    #[test]
    fn spec_round_trip() {
        for s in ["one", "liouville", "nit:1.5", "chi:12:1,1", "chit:5:2:-0.5", "rand:real:42"] {
            let spec: FunctionSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        for s in ["", "nit", "nit:x", "chi:4", "chi:4:2", "rand:weird:1", "zeta"] {
            assert!(s.parse::<FunctionSpec>().is_err(), "{s}");
        }
    }

    #[test]
    fn polar_cancels_archimedean_exactly() {
        let f = MultiplicativeFunction::archimedean(0.37);
        for p in [2u64, 3, 5, 7919] {
            let lp = (p as f64).ln();
            let (r, th) = f.polar_at_prime(p, lp).unwrap();
            assert_eq!(r, 1.0);
            assert_eq!(th - 0.37 * lp, 0.0);
        }
    }
}
