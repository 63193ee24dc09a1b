//! Verifiers for the triangle-type inequalities between Dirichlet series.
//!
//! Each check evaluates both sides from certified series values and returns
//! an [`InequalityReport`] with the margin `lhs − rhs` (nonnegative when the
//! inequality holds) and an error budget assembled from the radii and
//! round-off of every ingredient. The verdict is three-valued: a margin
//! within the budget of zero is reported as indeterminate.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::characters::{multiply_characters, primitive_inducing, DirichletCharacter};
use crate::error::{Error, Result};
use crate::multfunc::MultiplicativeFunction;
use crate::ntheory::PrimeTable;
use crate::series::{self, CertifiedValue};

const EPS: f64 = f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Holds,
    Fails,
    Indeterminate,
}

impl Verdict {
    pub fn from_margin(margin: f64, budget: f64) -> Verdict {
        if margin > budget {
            Verdict::Holds
        } else if margin < -budget {
            Verdict::Fails
        } else {
            Verdict::Indeterminate
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Indeterminate => "indeterminate",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub name: String,
    /// parameter name → value, rendered as text
    pub params: BTreeMap<String, String>,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs − rhs`, nonnegative when the inequality holds
    pub margin: f64,
    pub error_budget: f64,
    pub verdict: Verdict,
    /// a square-root argument was slightly negative and was clamped to 0
    pub clamped: bool,
}

/// Column names of the sweep CSV.
pub const CSV_HEADER: [&str; 9] = [
    "name", "sigma", "t1", "t2", "lhs", "rhs", "margin", "budget", "verdict",
];

impl InequalityReport {
    fn new(name: &str, params: BTreeMap<String, String>, lhs: Enclosure, rhs: Enclosure, clamped: bool, invalid: bool) -> Self {
        let margin = lhs.value - rhs.value;
        let budget = lhs.error + rhs.error + 4.0 * EPS * (lhs.value.abs() + rhs.value.abs());
        let verdict = if invalid {
            Verdict::Fails
        } else {
            Verdict::from_margin(margin, budget)
        };
        InequalityReport {
            name: name.to_string(),
            params,
            lhs: lhs.value,
            rhs: rhs.value,
            margin,
            error_budget: budget,
            verdict,
            clamped,
        }
    }

    pub fn param(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    /// Fields in [`CSV_HEADER`] order; absent parameters are empty.
    pub fn csv_fields(&self) -> [String; 9] {
        let p = |k: &str| self.param(k).unwrap_or("").to_string();
        [
            self.name.clone(),
            p("sigma"),
            p("t1"),
            p("t2"),
            self.lhs.to_string(),
            self.rhs.to_string(),
            self.margin.to_string(),
            self.error_budget.to_string(),
            self.verdict.to_string(),
        ]
    }
}

/// A real number with an error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Enclosure {
    pub value: f64,
    pub error: f64,
}

impl Enclosure {
    pub fn new(value: f64, error: f64) -> Self {
        Enclosure { value, error }
    }

    fn ln_abs(v: &CertifiedValue) -> Result<Enclosure> {
        let (value, error) = v.ln_abs()?;
        Ok(Enclosure { value, error })
    }

    fn re(v: &CertifiedValue) -> Enclosure {
        Enclosure::new(v.value.re, v.error())
    }

    fn plus(self, o: Enclosure) -> Enclosure {
        let v = self.value + o.value;
        Enclosure::new(v, self.error + o.error + EPS * v.abs())
    }

    fn minus(self, o: Enclosure) -> Enclosure {
        self.plus(o.times(-1.0))
    }

    fn times(self, c: f64) -> Enclosure {
        Enclosure::new(self.value * c, self.error * c.abs())
    }

    /// `√x` with error `min(√δ, δ/√x̂)`. A negative argument within its
    /// error is clamped to 0 (second flag); beyond it the argument is
    /// certified negative (third flag).
    fn sqrt(self) -> (Enclosure, bool, bool) {
        let d = self.error + EPS * self.value.abs();
        if self.value < 0.0 {
            let invalid = self.value < -d;
            return (Enclosure::new(0.0, d.sqrt()), true, invalid);
        }
        let r = self.value.sqrt();
        let err = if r > 0.0 { d.sqrt().min(d / r) } else { d.sqrt() };
        (Enclosure::new(r, err + EPS * r), false, false)
    }
}

/// Square roots of several enclosures, tracking clamping.
struct Roots {
    clamped: bool,
    invalid: bool,
}

impl Roots {
    fn new() -> Self {
        Roots {
            clamped: false,
            invalid: false,
        }
    }

    fn sqrt(&mut self, e: Enclosure) -> Enclosure {
        let (r, c, i) = e.sqrt();
        self.clamped |= c;
        self.invalid |= i;
        r
    }
}

fn params(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn real(sigma: f64) -> Complex64 {
    Complex64::new(sigma, 0.0)
}

/// `log |F(σ)|` at `precision`, falling back to the best the prime table
/// allows when a table-defined function cannot reach it.
fn log_abs_value(
    f: &MultiplicativeFunction,
    s: Complex64,
    precision: f64,
    table: &PrimeTable,
) -> Result<Enclosure> {
    let r = match series::log_abs_dirichlet_f(f, s, precision, table) {
        Err(Error::PrecisionUnreachable { .. }) => {
            series::log_abs_dirichlet_f(f, s, f64::INFINITY, table)
        }
        r => r,
    }?;
    Ok(Enclosure::new(r.0, r.1))
}

fn log_derivative_value(
    f: &MultiplicativeFunction,
    s: Complex64,
    precision: f64,
    table: &PrimeTable,
) -> Result<CertifiedValue> {
    match series::log_derivative(f, s, precision, table) {
        Err(Error::PrecisionUnreachable { .. }) => {
            series::log_derivative(f, s, f64::INFINITY, table)
        }
        r => r,
    }
}

/// The two triangle inequalities built from `log ζ(σ)` and `log|F(σ)|`,
/// `log|G(σ)|`, `log|F⊗G(σ)|`:
///
/// * `√(log ζ/|F|) + √(log ζ/|G|) ≥ √(log ζ/|F⊗G|)`
/// * `√(log |ζF|) + √(log |ζG|) ≥ √(log ζ/|F⊗G|)`
fn triangle_pair(
    names: [&str; 2],
    p: BTreeMap<String, String>,
    ln_z: Enclosure,
    ln_f: Enclosure,
    ln_g: Enclosure,
    ln_fg: Enclosure,
) -> [InequalityReport; 2] {
    let mut roots = Roots::new();
    let rhs = roots.sqrt(ln_z.minus(ln_fg));
    let base = (roots.clamped, roots.invalid);
    let a = roots.sqrt(ln_z.minus(ln_f));
    let b = roots.sqrt(ln_z.minus(ln_g));
    let first = InequalityReport::new(names[0], p.clone(), a.plus(b), rhs, roots.clamped, roots.invalid);
    let mut roots2 = Roots {
        clamped: base.0,
        invalid: base.1,
    };
    let a2 = roots2.sqrt(ln_z.plus(ln_f));
    let b2 = roots2.sqrt(ln_z.plus(ln_g));
    let second = InequalityReport::new(names[1], p, a2.plus(b2), rhs, roots2.clamped, roots2.invalid);
    [first, second]
}

/// Both inequalities for completely multiplicative f, g at real `σ`.
pub fn check_prop1(
    f: &MultiplicativeFunction,
    g: &MultiplicativeFunction,
    sigma: f64,
    precision: f64,
    table: &PrimeTable,
) -> Result<[InequalityReport; 2]> {
    let s = real(sigma);
    let z = series::zeta(s, precision)?;
    let fv = log_abs_value(f, s, precision, table)?;
    let gv = log_abs_value(g, s, precision, table)?;
    let fg = MultiplicativeFunction::product(f, g);
    let fgv = log_abs_value(&fg, s, precision, table)?;
    let p = params(&[
        ("sigma", sigma.to_string()),
        ("f", f.to_string()),
        ("g", g.to_string()),
    ]);
    Ok(triangle_pair(
        ["prop1.first", "prop1.second"],
        p,
        Enclosure::ln_abs(&z)?,
        fv,
        gv,
        fgv,
    ))
}

/// The two zeta inequalities obtained from `f = n^{−it₁}`, `g = n^{−it₂}`.
pub fn check_cor2(sigma: f64, t1: f64, t2: f64, precision: f64) -> Result<[InequalityReport; 2]> {
    let z = series::zeta(real(sigma), precision)?;
    let a = series::zeta(Complex64::new(sigma, t1), precision)?;
    let b = series::zeta(Complex64::new(sigma, t2), precision)?;
    let c = series::zeta(Complex64::new(sigma, t1 + t2), precision)?;
    let p = params(&[
        ("sigma", sigma.to_string()),
        ("t1", t1.to_string()),
        ("t2", t2.to_string()),
    ]);
    Ok(triangle_pair(
        ["cor2.first", "cor2.second"],
        p,
        Enclosure::ln_abs(&z)?,
        Enclosure::ln_abs(&a)?,
        Enclosure::ln_abs(&b)?,
        Enclosure::ln_abs(&c)?,
    ))
}

/// `3 log ζ(σ) + 4 log|ζ(σ+it)| + log|ζ(σ+2it)| ≥ 0`.
pub fn check_341(sigma: f64, t: f64, precision: f64) -> Result<InequalityReport> {
    let z = Enclosure::ln_abs(&series::zeta(real(sigma), precision)?)?;
    let a = Enclosure::ln_abs(&series::zeta(Complex64::new(sigma, t), precision)?)?;
    let c = Enclosure::ln_abs(&series::zeta(Complex64::new(sigma, 2.0 * t), precision)?)?;
    let lhs = z.times(3.0).plus(a.times(4.0)).plus(c);
    let p = params(&[
        ("sigma", sigma.to_string()),
        ("t1", t.to_string()),
        ("t2", t.to_string()),
    ]);
    Ok(InequalityReport::new(
        "three_four_one",
        p,
        lhs,
        Enclosure::new(0.0, 0.0),
        false,
        false,
    ))
}

/// Agreement between the 3-4-1 margin and the squared second zeta
/// inequality at `t₁ = t₂ = t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyCheck {
    /// `lhs² − rhs²` of the second report
    pub squared_margin: f64,
    pub margin_341: f64,
    pub difference: f64,
    /// ten times the combined error budgets
    pub tolerance: f64,
    pub consistent: bool,
}

pub fn three_four_one_consistency(sigma: f64, t: f64, precision: f64) -> Result<ConsistencyCheck> {
    let [_, second] = check_cor2(sigma, t, t, precision)?;
    let r = check_341(sigma, t, precision)?;
    let squared_margin = second.lhs * second.lhs - second.rhs * second.rhs;
    let difference = (squared_margin - r.margin).abs();
    // d(L² − R²) <= 2|L| e_L + 2|R| e_R + e²
    let e2 = second.error_budget;
    let sq_budget = 2.0 * (second.lhs.abs() + second.rhs.abs()) * e2 + e2 * e2;
    let tolerance = 10.0 * (sq_budget + r.error_budget);
    Ok(ConsistencyCheck {
        squared_margin,
        margin_341: r.margin,
        difference,
        tolerance,
        consistent: difference <= tolerance,
    })
}

/// `√(log ζ(σ)/|L(σ+it₁,χ)|) + √(log ζ(σ)/|L(σ+it₂,ψ)|) ≥ √(log ζ(σ)/|L(σ+it₁+it₂,χψ)|)`.
///
/// χψ is the product character modulo lcm of the moduli, evaluated as it
/// is; with `primitive` it is replaced by the primitive character inducing it.
pub fn check_lfun_triangle(
    chi: &DirichletCharacter,
    psi: &DirichletCharacter,
    sigma: f64,
    t1: f64,
    t2: f64,
    primitive: bool,
    precision: f64,
) -> Result<InequalityReport> {
    let mut prod = multiply_characters(chi, psi)?;
    if primitive {
        prod = primitive_inducing(&prod)?;
    }
    let z = Enclosure::ln_abs(&series::zeta(real(sigma), precision)?)?;
    let a = Enclosure::ln_abs(&series::l_function(chi, Complex64::new(sigma, t1), precision)?)?;
    let b = Enclosure::ln_abs(&series::l_function(psi, Complex64::new(sigma, t2), precision)?)?;
    let c = Enclosure::ln_abs(&series::l_function(&prod, Complex64::new(sigma, t1 + t2), precision)?)?;
    let mut roots = Roots::new();
    let lhs = roots.sqrt(z.minus(a)).plus(roots.sqrt(z.minus(b)));
    let rhs = roots.sqrt(z.minus(c));
    let p = params(&[
        ("sigma", sigma.to_string()),
        ("t1", t1.to_string()),
        ("t2", t2.to_string()),
        ("chi", chi.to_string()),
        ("psi", psi.to_string()),
        ("product", prod.to_string()),
        ("primitive", primitive.to_string()),
    ]);
    Ok(InequalityReport::new(
        "lfun_triangle",
        p,
        lhs,
        rhs,
        roots.clamped,
        roots.invalid,
    ))
}

/// `3 ζ'/ζ(σ) + sign·4 Re F'/F(σ) + Re (F⊗F)'/(F⊗F)(σ) ≤ 0` (first report),
/// and the triangle form it comes from (second report):
/// `2 √(s' Re F'/F − ζ'/ζ) ≥ √(Re (F⊗F)'/(F⊗F) − ζ'/ζ)` with `s' = −sign`.
pub fn check_derivative_ineq(
    f: &MultiplicativeFunction,
    sigma: f64,
    sign: i8,
    precision: f64,
    table: &PrimeTable,
) -> Result<[InequalityReport; 2]> {
    if sign != 1 && sign != -1 {
        return Err(crate::error::domain("sign must be +1 or -1"));
    }
    let s = real(sigma);
    let (z, dz) = series::zeta_with_derivative(s, precision)?;
    let zeta_ld = Enclosure::re(&dz.div(&z)?);
    let f_ld = Enclosure::re(&log_derivative_value(f, s, precision, table)?);
    let ff = MultiplicativeFunction::product(f, f);
    let ff_ld = Enclosure::re(&log_derivative_value(&ff, s, precision, table)?);
    let sg = sign as f64;
    let expr = zeta_ld.times(3.0).plus(f_ld.times(4.0 * sg)).plus(ff_ld);
    let p = params(&[
        ("sigma", sigma.to_string()),
        ("sign", sign.to_string()),
        ("f", f.to_string()),
    ]);
    let main = InequalityReport::new(
        "deriv_ineq",
        p.clone(),
        Enclosure::new(0.0, 0.0),
        expr,
        false,
        false,
    );
    let mut roots = Roots::new();
    let lhs = roots.sqrt(f_ld.times(-sg).minus(zeta_ld)).times(2.0);
    let rhs = roots.sqrt(ff_ld.minus(zeta_ld));
    let companion = InequalityReport::new(
        "deriv_triangle",
        p,
        lhs,
        rhs,
        roots.clamped,
        roots.invalid,
    );
    Ok([main, companion])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ntheory::SieveMode;

    fn table() -> PrimeTable {
        PrimeTable::new(100_000, SieveMode::PrimesOnly).unwrap()
    }

    #[test]
    fn verdict_thresholds() {
        assert_eq!(Verdict::from_margin(1.0, 0.5), Verdict::Holds);
        assert_eq!(Verdict::from_margin(-1.0, 0.5), Verdict::Fails);
        assert_eq!(Verdict::from_margin(0.5, 0.5), Verdict::Indeterminate);
        assert_eq!(Verdict::from_margin(0.0, 0.0), Verdict::Indeterminate);
    }

    #[test]
    fn prop1_trivial_and_liouville() {
        let t = table();
        let one = MultiplicativeFunction::one();
        let [r1, _] = check_prop1(&one, &one, 2.0, 1e-10, &t).unwrap();
        assert_eq!(r1.margin, 0.0);
        assert_eq!(r1.verdict, Verdict::Indeterminate);
        let l = MultiplicativeFunction::liouville();
        let [a, b] = check_prop1(&l, &l, 2.0, 1e-10, &t).unwrap();
        assert!((a.lhs - 2.0 * 2.5f64.ln().sqrt()).abs() < 1e-8);
        assert!(a.rhs.abs() < 1e-4);
        assert_eq!(a.verdict, Verdict::Holds);
        assert_ne!(b.verdict, Verdict::Fails);
    }

    #[test]
    fn cor2_examples() {
        let [a, b] = check_cor2(1.5, 1.0, 2.0, 1e-8).unwrap();
        assert_eq!(a.verdict, Verdict::Holds);
        assert_eq!(b.verdict, Verdict::Holds);
        let [z, _] = check_cor2(1.5, 0.0, 0.0, 1e-8).unwrap();
        assert_ne!(z.verdict, Verdict::Fails);
        assert!(z.margin.abs() <= z.error_budget);
        let [c, d] = check_cor2(1.3, 4.0, -4.0, 1e-8).unwrap();
        assert!(c.rhs.abs() <= c.error_budget);
        assert_ne!(c.verdict, Verdict::Fails);
        assert_ne!(d.verdict, Verdict::Fails);
    }

    #[test]
    fn three_four_one_examples() {
        let r = check_341(1.5, 1.0, 1e-8).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        let r0 = check_341(1.5, 0.0, 1e-8).unwrap();
        let z = crate::series::zeta(real(1.5), 1e-12).unwrap().value.re;
        assert!((r0.lhs - 8.0 * z.ln()).abs() < 1e-7);
        let small = check_341(1.1, 0.1, 1e-8).unwrap();
        assert!(small.margin > 0.0);
        let c = three_four_one_consistency(1.25, 3.5, 1e-8).unwrap();
        assert!(c.consistent, "{c:?}");
    }

    #[test]
    fn lfun_triangle_examples() {
        let triv: DirichletCharacter = "1:".parse().unwrap();
        let r = check_lfun_triangle(&triv, &triv, 1.5, 1.0, 2.0, false, 1e-8).unwrap();
        let [c, _] = check_cor2(1.5, 1.0, 2.0, 1e-8).unwrap();
        assert!((r.margin - c.margin).abs() < 1e-12);
        let c3: DirichletCharacter = "3:1".parse().unwrap();
        let c4: DirichletCharacter = "4:1".parse().unwrap();
        let r = check_lfun_triangle(&c3, &c4, 1.5, 0.0, 0.0, false, 1e-8).unwrap();
        assert!(r.margin >= 0.0);
        let r = check_lfun_triangle(&c4, &c4.conj(), 1.5, 2.0, -2.0, false, 1e-8).unwrap();
        assert_ne!(r.verdict, Verdict::Fails);
    }

    #[test]
    fn derivative_inequality_examples() {
        let t = table();
        let one = MultiplicativeFunction::one();
        let [m, _] = check_derivative_ineq(&one, 2.0, 1, 1e-10, &t).unwrap();
        let (z, dz) = crate::series::zeta_with_derivative(real(2.0), 1e-13).unwrap();
        assert!((m.rhs - 8.0 * (dz.value / z.value).re).abs() < 1e-9);
        assert_eq!(m.verdict, Verdict::Holds);
        for sign in [1, -1] {
            let [a, b] = check_derivative_ineq(&MultiplicativeFunction::liouville(), 2.0, sign, 1e-10, &t).unwrap();
            assert_ne!(a.verdict, Verdict::Fails);
            assert_ne!(b.verdict, Verdict::Fails);
            // the companion squares to the main form
            let sq = b.lhs * b.lhs - b.rhs * b.rhs;
            assert!((sq - a.margin).abs() < 1e-8, "{sq} vs {}", a.margin);
        }
    }
}
