//! Dirichlet characters modulo q with exact root-of-unity values.
//!
//! (ℤ/qℤ)* is decomposed by CRT over the prime powers of q, in ascending
//! order of the prime. Each odd prime power contributes one cyclic component
//! generated by its smallest primitive root; `4` contributes ⟨−1⟩; `2^k` with
//! `k >= 3` contributes ⟨−1⟩ × ⟨5⟩ in that order. Generators are lifted to
//! residues mod q that are `1` modulo the other prime-power factors.
//!
//! A character is an exponent vector `(e_1, …, e_r)` with `0 <= e_i < o_i`:
//! `χ(g_i) = e^{2πi e_i / o_i}`. Externally a character is written
//! `q:e1,e2,...` (for instance `12:1,1`; `1:` and `2:` are the trivial
//! characters). The index of a character is the mixed-radix number with the
//! first component least significant.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_integer::Integer;

use crate::cyclotomic::{root_table, unit_root};
use crate::error::{domain, Error, Result};

/// Largest modulus for which a character group (with its dlog tables) is built.
pub const CHARACTER_MODULUS_MAX: u64 = 1_000_000;

/// A root of unity `e^{2πi num/den}` in lowest terms, or zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnitValue {
    Zero,
    Root { num: u64, den: u64 },
}

impl UnitValue {
    pub fn one() -> Self {
        UnitValue::Root { num: 0, den: 1 }
    }

    pub fn from_fraction(num: u64, den: u64) -> Self {
        let num = num % den;
        let g = num.gcd(&den);
        UnitValue::Root {
            num: num / g,
            den: den / g,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, UnitValue::Zero)
    }

    pub fn to_complex(&self) -> Complex64 {
        match *self {
            UnitValue::Zero => Complex64::new(0.0, 0.0),
            UnitValue::Root { num, den } => unit_root(num, den),
        }
    }

    pub fn mul(self, other: UnitValue) -> UnitValue {
        match (self, other) {
            (UnitValue::Root { num: a, den: b }, UnitValue::Root { num: c, den: d }) => {
                let l = b.lcm(&d);
                UnitValue::from_fraction(a * (l / b) + c * (l / d), l)
            }
            _ => UnitValue::Zero,
        }
    }
}

#[derive(Debug, Clone)]
enum LocalKind {
    /// `p^k = 2`: trivial unit group.
    Trivial,
    /// cyclic unit group: one component, dlog table indexed by residue mod p^k
    Cyclic { dlog: Vec<u32> },
    /// `2^k`, `k >= 3`: components (−1, 5)
    TwoAdic { sign: Vec<u8>, five: Vec<u32> },
}

#[derive(Debug, Clone)]
struct LocalFactor {
    p: u64,
    k: u32,
    pk: u64,
    first_component: usize,
    kind: LocalKind,
}

/// One cyclic factor of (ℤ/qℤ)*.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Component {
    /// generator as a residue mod q
    pub generator: u64,
    pub order: u64,
}

/// (ℤ/qℤ)* as a product of cyclic groups, with discrete-log tables.
#[derive(Debug, Clone)]
pub struct CharacterGroup {
    q: u64,
    components: Vec<Component>,
    locals: Vec<LocalFactor>,
    exponent: u64,
}

pub fn build_character_group(q: u64) -> Result<Arc<CharacterGroup>> {
    CharacterGroup::new(q).map(Arc::new)
}

impl CharacterGroup {
    pub fn new(q: u64) -> Result<Self> {
        if q == 0 || q > CHARACTER_MODULUS_MAX {
            return Err(Error::Capacity {
                what: "character modulus",
                value: q,
                limit: CHARACTER_MODULUS_MAX,
            });
        }
        let mut locals = Vec::new();
        let mut components = Vec::new();
        for (p, k) in factor_small(q) {
            let pk = p.pow(k);
            let first_component = components.len();
            let kind = if pk == 2 {
                LocalKind::Trivial
            } else if p == 2 && k >= 3 {
                let order5 = pk / 4;
                let mut sign = vec![u8::MAX; pk as usize];
                let mut five = vec![u32::MAX; pk as usize];
                let mut x = 1u64;
                for j in 0..order5 {
                    sign[x as usize] = 0;
                    five[x as usize] = j as u32;
                    sign[(pk - x) as usize] = 1;
                    five[(pk - x) as usize] = j as u32;
                    x = x * 5 % pk;
                }
                components.push(Component {
                    generator: crt_lift(pk - 1, pk, q),
                    order: 2,
                });
                components.push(Component {
                    generator: crt_lift(5, pk, q),
                    order: order5,
                });
                LocalKind::TwoAdic { sign, five }
            } else {
                let phi = pk / p * (p - 1);
                let g = smallest_primitive_root(p, pk, phi);
                let mut dlog = vec![u32::MAX; pk as usize];
                let mut x = 1u64;
                for i in 0..phi {
                    dlog[x as usize] = i as u32;
                    x = x * g % pk;
                }
                components.push(Component {
                    generator: crt_lift(g, pk, q),
                    order: phi,
                });
                LocalKind::Cyclic { dlog }
            };
            locals.push(LocalFactor {
                p,
                k,
                pk,
                first_component,
                kind,
            });
        }
        let exponent = components.iter().fold(1u64, |acc, c| acc.lcm(&c.order));
        Ok(CharacterGroup {
            q,
            components,
            locals,
            exponent,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// φ(q), the number of units and of characters.
    pub fn order(&self) -> u64 {
        self.components.iter().map(|c| c.order).product()
    }

    /// lcm of the component orders: every character value is a power of
    /// `e^{2πi/exponent}`.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Exponent vector of the unit `n` mod q, or `None` when `gcd(n, q) > 1`.
    pub fn dlog(&self, n: u64) -> Option<Vec<u64>> {
        let mut out = vec![0u64; self.components.len()];
        self.dlog_into(n, &mut out).then_some(out)
    }

    pub fn dlog_into(&self, n: u64, out: &mut [u64]) -> bool {
        for local in &self.locals {
            let r = (n % local.pk) as usize;
            let c = local.first_component;
            match &local.kind {
                LocalKind::Trivial => {
                    if r % 2 == 0 {
                        return false;
                    }
                }
                LocalKind::Cyclic { dlog } => {
                    let v = dlog[r];
                    if v == u32::MAX {
                        return false;
                    }
                    out[c] = v as u64;
                }
                LocalKind::TwoAdic { sign, five } => {
                    if sign[r] == u8::MAX {
                        return false;
                    }
                    out[c] = sign[r] as u64;
                    out[c + 1] = five[r] as u64;
                }
            }
        }
        true
    }

    /// Recombines generators: `Π g_i^{x_i} mod q`.
    pub fn compose(&self, exps: &[u64]) -> u64 {
        let q = self.q;
        self.components
            .iter()
            .zip(exps)
            .fold(1 % q, |acc, (c, &x)| acc * pow_mod(c.generator, x, q) % q)
    }

    pub fn character(self: &Arc<Self>, exponents: Vec<u64>) -> Result<DirichletCharacter> {
        if exponents.len() != self.components.len() {
            return Err(Error::Parse(format!(
                "modulus {} needs {} exponents, got {}",
                self.q,
                self.components.len(),
                exponents.len()
            )));
        }
        for (e, c) in exponents.iter().zip(&self.components) {
            if *e >= c.order {
                return Err(domain(format!(
                    "exponent {e} out of range for component of order {}",
                    c.order
                )));
            }
        }
        Ok(DirichletCharacter {
            group: Arc::clone(self),
            exponents,
        })
    }

    pub fn principal(self: &Arc<Self>) -> DirichletCharacter {
        DirichletCharacter {
            group: Arc::clone(self),
            exponents: vec![0; self.components.len()],
        }
    }

    /// The character with the given mixed-radix index.
    pub fn from_index(self: &Arc<Self>, mut index: u64) -> DirichletCharacter {
        let exponents = self
            .components
            .iter()
            .map(|c| {
                let e = index % c.order;
                index /= c.order;
                e
            })
            .collect();
        DirichletCharacter {
            group: Arc::clone(self),
            exponents,
        }
    }

    /// All φ(q) characters in index order.
    pub fn characters(self: &Arc<Self>) -> impl Iterator<Item = DirichletCharacter> + '_ {
        (0..self.order()).map(move |i| self.from_index(i))
    }

    /// Per-residue dlog weights scaled to the group exponent, for evaluating
    /// many characters of this group over a full period.
    pub fn dlog_table(&self) -> DlogTable {
        let r = self.components.len();
        let scale: Vec<u64> = self
            .components
            .iter()
            .map(|c| self.exponent / c.order)
            .collect();
        let mut weights = vec![0u64; self.q as usize * r];
        let mut unit = vec![false; self.q as usize];
        let mut buf = vec![0u64; r];
        for n in 0..self.q {
            if self.dlog_into(n, &mut buf) && (self.q > 1 || n == 0) {
                unit[n as usize] = true;
                for i in 0..r {
                    weights[n as usize * r + i] = buf[i] * scale[i];
                }
            }
        }
        if self.q == 1 {
            unit[0] = true;
        }
        DlogTable {
            q: self.q,
            stride: r,
            exponent: self.exponent,
            unit,
            weights,
        }
    }
}

/// Precomputed `x_i(n)·(λ/o_i)` for every residue `n` mod q.
#[derive(Debug, Clone)]
pub struct DlogTable {
    q: u64,
    stride: usize,
    exponent: u64,
    unit: Vec<bool>,
    weights: Vec<u64>,
}

impl DlogTable {
    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// `k` with `χ(n) = e^{2πik/λ}`, or `None` off the units.
    #[inline]
    pub fn value_index(&self, exponents: &[u64], n: u64) -> Option<u64> {
        let n = (n % self.q) as usize;
        if !self.unit[n] {
            return None;
        }
        let w = &self.weights[n * self.stride..(n + 1) * self.stride];
        let k = w
            .iter()
            .zip(exponents)
            .fold(0u64, |acc, (&w, &e)| (acc + w * e) % self.exponent);
        Some(k)
    }

    /// χ(n) for `n = 0..q`.
    pub fn values(&self, chi: &DirichletCharacter) -> Vec<Complex64> {
        let roots = root_table(self.exponent);
        (0..self.q)
            .map(|n| match self.value_index(&chi.exponents, n) {
                Some(k) => roots[k as usize],
                None => Complex64::new(0.0, 0.0),
            })
            .collect()
    }
}

/// (conductor, order, parity)
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CharacterInvariants {
    pub conductor: u64,
    pub order: u64,
    pub parity: i8,
}

#[derive(Clone)]
pub struct DirichletCharacter {
    group: Arc<CharacterGroup>,
    exponents: Vec<u64>,
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.group.q == other.group.q && self.exponents == other.exponents
    }
}

impl Eq for DirichletCharacter {}

impl fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DirichletCharacter({self})")
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.group.q)?;
        for (i, e) in self.exponents.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for DirichletCharacter {
    type Err = Error;

    /// Parses `q:e1,e2,...`.
    fn from_str(s: &str) -> Result<Self> {
        let (q, exps) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("character '{s}' must look like q:e1,e2,...")))?;
        let q: u64 = q
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad modulus in character '{s}'")))?;
        let exponents = if exps.trim().is_empty() {
            Vec::new()
        } else {
            exps.split(',')
                .map(|e| {
                    e.trim()
                        .parse::<u64>()
                        .map_err(|_| Error::Parse(format!("bad exponent '{e}' in character '{s}'")))
                })
                .collect::<Result<Vec<_>>>()?
        };
        build_character_group(q)?.character(exponents)
    }
}

impl DirichletCharacter {
    pub fn group(&self) -> &Arc<CharacterGroup> {
        &self.group
    }

    pub fn modulus(&self) -> u64 {
        self.group.q
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn index(&self) -> u64 {
        self.exponents
            .iter()
            .zip(&self.group.components)
            .rev()
            .fold(0, |acc, (&e, c)| acc * c.order + e)
    }

    pub fn is_principal(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    /// `k` with `χ(n) = e^{2πik/λ}`, λ the group exponent.
    pub fn value_index(&self, n: u64) -> Option<u64> {
        let g = &*self.group;
        let mut buf = [0u64; 16];
        let r = g.components.len();
        let x = &mut buf[..r];
        if !g.dlog_into(n, x) {
            return None;
        }
        let lambda = g.exponent;
        Some(
            x.iter()
                .zip(&self.exponents)
                .zip(&g.components)
                .fold(0u64, |acc, ((&xi, &ei), c)| {
                    (acc + (xi * ei % c.order) * (lambda / c.order)) % lambda
                }),
        )
    }

    pub fn evaluate(&self, n: u64) -> UnitValue {
        match self.value_index(n) {
            Some(k) => UnitValue::from_fraction(k, self.group.exponent),
            None => UnitValue::Zero,
        }
    }

    pub fn value(&self, n: u64) -> Complex64 {
        match self.value_index(n) {
            Some(k) => unit_root(k, self.group.exponent),
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn order(&self) -> u64 {
        self.exponents
            .iter()
            .zip(&self.group.components)
            .fold(1u64, |acc, (&e, c)| acc.lcm(&(c.order / e.gcd(&c.order))))
    }

    /// χ(−1) as ±1.
    pub fn parity(&self) -> i8 {
        let q = self.group.q;
        if q <= 2 {
            return 1;
        }
        match self.evaluate(q - 1) {
            UnitValue::Root { num: 0, .. } => 1,
            _ => -1,
        }
    }

    /// Conductor from the local components: for an odd prime power `p^k`
    /// with exponent `e != 0` the local conductor is `p^j`, `j` least with
    /// `p^{k−j} | e`; the 2-part is analysed on ⟨−1⟩ × ⟨5⟩ the same way.
    pub fn conductor(&self) -> u64 {
        let mut f = 1u64;
        for local in &self.group.locals {
            let c = local.first_component;
            match local.kind {
                LocalKind::Trivial => {}
                LocalKind::Cyclic { .. } => {
                    let e = self.exponents[c];
                    if e != 0 {
                        if local.pk == 4 {
                            f *= 4;
                        } else {
                            f *= local.p.pow(local_level(e, local.p, local.k, 1));
                        }
                    }
                }
                LocalKind::TwoAdic { .. } => {
                    let (a, b) = (self.exponents[c], self.exponents[c + 1]);
                    if b != 0 {
                        f *= 2u64.pow(local_level(b, 2, local.k, 3));
                    } else if a != 0 {
                        f *= 4;
                    }
                }
            }
        }
        f
    }

    /// Smallest divisor `f | q` such that χ is trivial on every unit
    /// `n ≡ 1 (mod f)`. Quadratic in q; kept as an independent check.
    pub fn conductor_by_divisor_search(&self) -> u64 {
        let q = self.group.q;
        for f in 1..=q {
            if q % f != 0 {
                continue;
            }
            let mut trivial = true;
            let mut n = 1;
            while n < q.max(2) {
                if n.gcd(&q) == 1 && self.evaluate(n) != UnitValue::one() {
                    trivial = false;
                    break;
                }
                n += f;
            }
            if trivial {
                return f;
            }
        }
        q
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.group.q
    }

    pub fn invariants(&self) -> CharacterInvariants {
        CharacterInvariants {
            conductor: self.conductor(),
            order: self.order(),
            parity: self.parity(),
        }
    }

    pub fn conj(&self) -> DirichletCharacter {
        let exponents = self
            .exponents
            .iter()
            .zip(&self.group.components)
            .map(|(&e, c)| (c.order - e) % c.order)
            .collect();
        DirichletCharacter {
            group: Arc::clone(&self.group),
            exponents,
        }
    }

    /// χ^k
    pub fn pow(&self, k: u64) -> DirichletCharacter {
        let exponents = self
            .exponents
            .iter()
            .zip(&self.group.components)
            .map(|(&e, c)| (e * (k % c.order)) % c.order)
            .collect();
        DirichletCharacter {
            group: Arc::clone(&self.group),
            exponents,
        }
    }

    /// χ(n) for `n = 0..q`.
    pub fn values_table(&self) -> Vec<Complex64> {
        let roots = root_table(self.group.exponent);
        (0..self.group.q)
            .map(|n| match self.value_index(n) {
                Some(k) => roots[k as usize],
                None => Complex64::new(0.0, 0.0),
            })
            .collect()
    }

    pub fn multiply(&self, other: &DirichletCharacter) -> Result<DirichletCharacter> {
        multiply_characters(self, other)
    }

    pub fn primitive_inducing(&self) -> Result<DirichletCharacter> {
        primitive_inducing(self)
    }

    /// Character of `group` whose value on each generator is `value(g)`,
    /// where `value` returns `k/λ` as `(k, λ)`.
    fn from_generator_values(
        group: &Arc<CharacterGroup>,
        value: impl Fn(u64) -> (u64, u64),
    ) -> DirichletCharacter {
        let exponents = group
            .components
            .iter()
            .map(|c| {
                let (k, lambda) = value(c.generator);
                // χ(g)^order = 1 forces k·order ≡ 0 (mod λ)
                let num = k as u128 * c.order as u128;
                debug_assert_eq!(num % lambda as u128, 0);
                ((num / lambda as u128) % c.order as u128) as u64
            })
            .collect();
        DirichletCharacter {
            group: Arc::clone(group),
            exponents,
        }
    }
}

pub fn evaluate_character(chi: &DirichletCharacter, n: u64) -> UnitValue {
    chi.evaluate(n)
}

pub fn character_invariants(chi: &DirichletCharacter) -> CharacterInvariants {
    chi.invariants()
}

/// The character mod lcm(q₁, q₂) agreeing with χ(n)ψ(n) on its units.
pub fn multiply_characters(
    chi: &DirichletCharacter,
    psi: &DirichletCharacter,
) -> Result<DirichletCharacter> {
    if Arc::ptr_eq(&chi.group, &psi.group) || chi.modulus() == psi.modulus() {
        let exponents = chi
            .exponents
            .iter()
            .zip(&psi.exponents)
            .zip(&chi.group.components)
            .map(|((&a, &b), c)| (a + b) % c.order)
            .collect();
        return Ok(DirichletCharacter {
            group: Arc::clone(&chi.group),
            exponents,
        });
    }
    let l = chi.modulus().lcm(&psi.modulus());
    if l > CHARACTER_MODULUS_MAX {
        return Err(Error::Capacity {
            what: "modulus of product character",
            value: l,
            limit: CHARACTER_MODULUS_MAX,
        });
    }
    let group = build_character_group(l)?;
    let (la, lb) = (chi.group.exponent, psi.group.exponent);
    Ok(DirichletCharacter::from_generator_values(&group, |g| {
        let ka = chi.value_index(g).expect("generator is a unit");
        let kb = psi.value_index(g).expect("generator is a unit");
        let lam = la.lcm(&lb);
        ((ka * (lam / la) + kb * (lam / lb)) % lam, lam)
    }))
}

/// The primitive character mod conductor(χ) that induces χ.
pub fn primitive_inducing(chi: &DirichletCharacter) -> Result<DirichletCharacter> {
    let f = chi.conductor();
    if f == chi.modulus() {
        return Ok(chi.clone());
    }
    let group = build_character_group(f)?;
    let q = chi.modulus();
    let lambda = chi.group.exponent;
    Ok(DirichletCharacter::from_generator_values(&group, |g| {
        let mut n = g;
        while n.gcd(&q) != 1 {
            n += f;
        }
        (chi.value_index(n).expect("lift is a unit"), lambda)
    }))
}

/// Smallest `j >= min_level` with `p^{k−j} | e`.
fn local_level(e: u64, p: u64, k: u32, min_level: u32) -> u32 {
    let mut j = min_level;
    while j < k && e % p.pow(k - j) != 0 {
        j += 1;
    }
    j
}

fn factor_small(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut k = 0;
            while n % p == 0 {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

fn smallest_primitive_root(p: u64, pk: u64, phi: u64) -> u64 {
    let prime_divisors: Vec<u64> = factor_small(phi).into_iter().map(|(r, _)| r).collect();
    (2..pk)
        .find(|&g| g % p != 0 && prime_divisors.iter().all(|&r| pow_mod(g, phi / r, pk) != 1))
        .unwrap_or(1)
}

/// `n ≡ g (mod pk)`, `n ≡ 1 (mod q/pk)`.
fn crt_lift(g: u64, pk: u64, q: u64) -> u64 {
    let m = q / pk;
    if m == 1 {
        return g % q;
    }
    // n = g + pk·t with pk·t ≡ 1 − g (mod m)
    let inv = mod_inverse(pk % m, m);
    let rhs = (1 + m - g % m) % m;
    let t = (rhs as u128 * inv as u128 % m as u128) as u64;
    (g + pk * t) % q
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    let e = (a as i128).extended_gcd(&(m as i128));
    debug_assert_eq!(e.gcd, 1);
    e.x.rem_euclid(m as i128) as u64
}
