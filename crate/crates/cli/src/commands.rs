//! One function per command. Each returns a [`Table`]; rows come out in a
//! fixed order that does not depend on the number of worker threads.

use std::collections::HashMap;

use anyhow::{anyhow, bail, Context, Result};

use pretentious::characters::build_character_group;
use pretentious::charsums::{
    d_chi_sum, estimate6_ratio, lemma_distance_scan, prop6_scan, prop7_scan, pv_scan, twisted_sum_profile,
    LemmaFamily, ScanRow,
};
use pretentious::distance::{self, GridConfig, DEFAULT_NORM_CUTOFF};
use pretentious::halasz::{self, hall_family, hall_real_diagnostic, halasz_report, mean_value, progression_mean};
use pretentious::inequalities::{self, InequalityReport, Verdict};
use pretentious::multfunc::{FunctionSpec, RandomMode};
use pretentious::{par, DirichletCharacter, MultiplicativeFunction, PrimeTable, SieveMode};

use crate::config::RunConfig;
use crate::grid::{self, int_values, values, Axis};
use crate::output::{num, Table};

pub const COMMANDS: &[&str] = &[
    "sieve-info",
    "char-list",
    "distance",
    "norm-identity",
    "prop1",
    "cor2",
    "three-four-one",
    "lfun-triangle",
    "deriv-ineq",
    "pv-scan",
    "dchi",
    "prop6-scan",
    "lemma-scan",
    "halasz",
    "hall",
    "mean",
    "progression",
];

/// Sieve limit for commands whose inputs do not bound it: Euler products
/// of table functions run over every prime of the table.
const DEFAULT_SIEVE_LIMIT: u64 = 100_000;

pub fn run(cfg: &mut RunConfig) -> Result<Table> {
    let command = cfg.command()?.to_string();
    match command.as_str() {
        "sieve-info" => sieve_info(cfg),
        "char-list" => char_list(cfg),
        "distance" => distance_cmd(cfg),
        "norm-identity" => norm_identity(cfg),
        "prop1" => prop1(cfg),
        "cor2" => cor2(cfg),
        "three-four-one" => three_four_one(cfg),
        "lfun-triangle" => lfun_triangle(cfg),
        "deriv-ineq" => deriv_ineq(cfg),
        "pv-scan" => pv(cfg),
        "dchi" => dchi(cfg),
        "prop6-scan" => prop6(cfg),
        "lemma-scan" => lemma(cfg),
        "halasz" => halasz_cmd(cfg),
        "hall" => hall(cfg),
        "mean" => mean(cfg),
        "progression" => progression(cfg),
        other => bail!("unknown command '{other}' (expected one of: {})", COMMANDS.join(", ")),
    }
}

/// Builds the prime table, defaulting the limit to `need`, and records the
/// limit used so the manifest reproduces the run.
fn table(cfg: &mut RunConfig, need: u64, mode: SieveMode) -> Result<PrimeTable> {
    let limit = cfg.get_or("sieve-limit", need.max(2))?;
    cfg.set("sieve-limit", &limit.to_string())?;
    Ok(PrimeTable::new(limit, mode)?)
}

fn x_list(cfg: &RunConfig) -> Result<Vec<u64>> {
    int_values(cfg.require_raw("x")?)
}

fn x_single(cfg: &RunConfig) -> Result<u64> {
    match x_list(cfg)?.as_slice() {
        [x] => Ok(*x),
        _ => bail!("--x takes a single value for this command"),
    }
}

/// `rand:<mode>` without a seed takes `--seed` (default 0).
fn function(cfg: &RunConfig, key: &str, table: &PrimeTable) -> Result<MultiplicativeFunction> {
    let raw = cfg.require_raw(key)?;
    let text = if raw.starts_with("rand:") && raw.matches(':').count() == 1 {
        format!("{raw}:{}", cfg.get_or::<u64>("seed", 0)?)
    } else {
        raw.to_string()
    };
    let spec: FunctionSpec = text.parse().with_context(|| format!("--{key}"))?;
    Ok(spec.build(table)?)
}

fn character(cfg: &RunConfig, key: &str) -> Result<DirichletCharacter> {
    let raw = cfg.require_raw(key)?;
    raw.parse().with_context(|| format!("--{key}"))
}

/// Parameter points for a sweep over `names`. Axes given in `--grid` come
/// first, in grid order (first outermost); the remaining names take their
/// flag value lists. A grid axis `t` stands for both `t1` and `t2` when the
/// command has those. Points are returned in `names` order.
fn sweep(cfg: &RunConfig, names: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut axes: Vec<Axis> = Vec::new();
    if let Some(spec) = cfg.raw("grid") {
        for axis in grid::parse_grid(spec)? {
            if axis.name == "t" && names.contains(&"t1") && names.contains(&"t2") {
                for n in ["t1", "t2"] {
                    axes.push(Axis {
                        name: n.to_string(),
                        values: axis.values.clone(),
                    });
                }
            } else if names.contains(&axis.name.as_str()) {
                axes.push(axis);
            } else {
                bail!("grid axis '{}' is not a parameter of this command ({})", axis.name, names.join(", "));
            }
        }
    }
    for &n in names {
        if axes.iter().any(|a| a.name == n) {
            if cfg.has(n) {
                bail!("--{n} is given both as a flag and as a grid axis");
            }
            continue;
        }
        axes.push(Axis {
            name: n.to_string(),
            values: values(cfg.require_raw(n)?)?,
        });
    }
    let order: Vec<usize> = names.iter().map(|n| axes.iter().position(|a| a.name == *n).unwrap()).collect();
    Ok(grid::cartesian(&axes)
        .into_iter()
        .map(|p| order.iter().map(|&i| p[i]).collect())
        .collect())
}

fn inequality_table(reports: impl IntoIterator<Item = InequalityReport>) -> Table {
    let mut t = Table::new(&inequalities::CSV_HEADER);
    for r in reports {
        t.push(r.csv_fields());
    }
    t
}

/// Evaluates `f` at every point in parallel and flattens in point order.
fn per_point<R: Send>(
    points: &[Vec<f64>],
    f: impl Fn(&[f64]) -> pretentious::Result<Vec<R>> + Sync + Send,
) -> Result<Vec<R>> {
    let mut out = Vec::new();
    for r in par::map(points, |p| f(p)) {
        out.extend(r?);
    }
    Ok(out)
}

fn sieve_info(cfg: &mut RunConfig) -> Result<Table> {
    let xs = x_list(cfg)?;
    let need = xs.iter().copied().max().unwrap_or(2);
    let tab = table(cfg, need, SieveMode::PrimesOnly)?;
    let mut t = Table::new(&["x", "pi", "psi"]);
    for x in xs {
        t.push([x.to_string(), tab.prime_count(x)?.to_string(), num(tab.chebyshev_psi(x)?)]);
    }
    Ok(t)
}

fn char_list(cfg: &mut RunConfig) -> Result<Table> {
    let mut t = Table::new(&["chi", "q", "index", "order", "parity", "conductor", "primitive"]);
    for q in int_values(cfg.require_raw("q")?)? {
        let group = build_character_group(q)?;
        for chi in group.characters() {
            let inv = chi.invariants();
            t.push([
                chi.to_string(),
                q.to_string(),
                chi.index().to_string(),
                inv.order.to_string(),
                inv.parity.to_string(),
                inv.conductor.to_string(),
                (inv.conductor == q).to_string(),
            ]);
        }
    }
    Ok(t)
}

fn distance_cmd(cfg: &mut RunConfig) -> Result<Table> {
    let xs = x_list(cfg)?;
    let need = xs.iter().copied().max().unwrap_or(2);
    let tab = table(cfg, need, SieveMode::PrimesOnly)?;
    let (f, g) = (function(cfg, "f", &tab)?, function(cfg, "g", &tab)?);
    let mut t = Table::new(&["f", "g", "x", "D2", "D", "terms"]);
    for x in xs {
        let d = distance::distance(&f, &g, x, &tab)?;
        t.push([
            f.to_string(),
            g.to_string(),
            x.to_string(),
            num(d.squared),
            num(d.distance()),
            d.terms.to_string(),
        ]);
    }
    Ok(t)
}

fn norm_identity(cfg: &mut RunConfig) -> Result<Table> {
    let cutoff = match cfg.raw("x") {
        Some(_) => x_single(cfg)?,
        None => DEFAULT_NORM_CUTOFF,
    };
    let tab = table(cfg, cutoff, SieveMode::PrimesOnly)?;
    let f = function(cfg, "f", &tab)?;
    let precision = cfg.precision()?;
    let sigmas = values(cfg.require_raw("sigma")?)?;
    let rows = par::map(&sigmas, |&s| distance::norm_identity(&f, s, cutoff, precision, &tab));
    let mut t = Table::new(&["f", "sigma", "cutoff", "norm2", "log_ratio", "difference", "tolerance", "verdict"]);
    for r in rows {
        let r = r?;
        let verdict = if r.holds() { Verdict::Holds } else { Verdict::Fails };
        t.push([
            f.to_string(),
            num(r.sigma),
            cutoff.to_string(),
            num(r.norm.squared),
            num(r.log_ratio),
            num(r.difference),
            num(r.tolerance),
            verdict.to_string(),
        ]);
    }
    Ok(t)
}

fn prop1(cfg: &mut RunConfig) -> Result<Table> {
    let tab = table(cfg, DEFAULT_SIEVE_LIMIT, SieveMode::PrimesOnly)?;
    let (f, g) = (function(cfg, "f", &tab)?, function(cfg, "g", &tab)?);
    let precision = cfg.precision()?;
    let points = sweep(cfg, &["sigma"])?;
    let rows = per_point(&points, |p| Ok(inequalities::check_prop1(&f, &g, p[0], precision, &tab)?.to_vec()))?;
    Ok(inequality_table(rows))
}

fn cor2(cfg: &mut RunConfig) -> Result<Table> {
    let precision = cfg.precision()?;
    let points = sweep(cfg, &["sigma", "t1", "t2"])?;
    let rows = per_point(&points, |p| Ok(inequalities::check_cor2(p[0], p[1], p[2], precision)?.to_vec()))?;
    Ok(inequality_table(rows))
}

/// The 3-4-1 row, then a consistency row whose margin is
/// `tolerance − |squared second zeta-triangle margin − 3-4-1 margin|`.
fn three_four_one(cfg: &mut RunConfig) -> Result<Table> {
    let precision = cfg.precision()?;
    let points = sweep(cfg, &["sigma", "t"])?;
    let rows = per_point(&points, |p| {
        let (sigma, t) = (p[0], p[1]);
        let main = inequalities::check_341(sigma, t, precision)?;
        let c = inequalities::three_four_one_consistency(sigma, t, precision)?;
        let consistency = [
            "three_four_one.consistency".to_string(),
            num(sigma),
            num(t),
            num(t),
            num(c.squared_margin),
            num(c.margin_341),
            num(c.tolerance - c.difference),
            num(c.tolerance),
            if c.consistent { Verdict::Holds } else { Verdict::Fails }.to_string(),
        ];
        Ok(vec![main.csv_fields(), consistency])
    })?;
    let mut t = Table::new(&inequalities::CSV_HEADER);
    for r in rows {
        t.push(r);
    }
    Ok(t)
}

fn lfun_triangle(cfg: &mut RunConfig) -> Result<Table> {
    let (chi, psi) = (character(cfg, "chi")?, character(cfg, "psi")?);
    let primitive = cfg.get_or("primitive", false)?;
    let precision = cfg.precision()?;
    let points = sweep(cfg, &["sigma", "t1", "t2"])?;
    let rows = per_point(&points, |p| {
        Ok(vec![inequalities::check_lfun_triangle(&chi, &psi, p[0], p[1], p[2], primitive, precision)?])
    })?;
    Ok(inequality_table(rows))
}

/// With no `--sign`, both signs: for each σ the `+1` pair of rows, then `−1`.
fn deriv_ineq(cfg: &mut RunConfig) -> Result<Table> {
    let tab = table(cfg, DEFAULT_SIEVE_LIMIT, SieveMode::PrimesOnly)?;
    let f = function(cfg, "f", &tab)?;
    let signs: Vec<i8> = match cfg.get::<i8>("sign")? {
        None => vec![1, -1],
        Some(s @ (1 | -1)) => vec![s],
        Some(s) => bail!("--sign must be 1 or -1, got {s}"),
    };
    let precision = cfg.precision()?;
    let points = sweep(cfg, &["sigma"])?;
    let rows = per_point(&points, |p| {
        let mut out = Vec::new();
        for &s in &signs {
            out.extend(inequalities::check_derivative_ineq(&f, p[0], s, precision, &tab)?);
        }
        Ok(out)
    })?;
    Ok(inequality_table(rows))
}

fn pv(cfg: &mut RunConfig) -> Result<Table> {
    let moduli = int_values(cfg.require_raw("q")?)?;
    let mut t = Table::new(&["q", "chi", "max_abs", "argmax", "pv_bound", "ratio"]);
    for p in pv_scan(&moduli)? {
        t.push([
            p.chi.modulus().to_string(),
            p.chi.to_string(),
            num(p.max_abs),
            p.argmax_n.to_string(),
            num(p.pv_bound),
            num(p.ratio),
        ]);
    }
    Ok(t)
}

fn dchi(cfg: &mut RunConfig) -> Result<Table> {
    let chi = character(cfg, "chi")?;
    let xs = x_list(cfg)?;
    let ts = match cfg.raw("t") {
        Some(raw) => values(raw)?,
        None => vec![0.0],
    };
    let need = xs.iter().copied().max().unwrap_or(2);
    let tab = table(cfg, need, SieveMode::PrimesOnly)?;
    let points: Vec<(u64, f64)> = xs.iter().flat_map(|&x| ts.iter().map(move |&t| (x, t))).collect();
    let rows = par::map(&points, |&(x, t)| -> pretentious::Result<[String; 8]> {
        let s = d_chi_sum(&chi, x, t, &tab)?;
        let e6 = estimate6_ratio(&chi, x, &tab)?;
        let tw = twisted_sum_profile(&chi, t, x)?;
        Ok([
            chi.to_string(),
            x.to_string(),
            num(t),
            num(s.re),
            num(s.im),
            num(e6),
            num(tw.max_abs),
            num(tw.ratio),
        ])
    });
    let mut t = Table::new(&[
        "chi",
        "x",
        "t",
        "sum_re",
        "sum_im",
        "estimate6_ratio",
        "twisted_max",
        "twisted_ratio",
    ]);
    for r in rows {
        t.push(r?);
    }
    Ok(t)
}

/// With `--t`, the twisted scan, with a trailing `t` column.
fn prop6(cfg: &mut RunConfig) -> Result<Table> {
    let moduli = int_values(cfg.require_raw("q")?)?;
    let xs = x_list(cfg)?;
    let need = xs.iter().copied().max().unwrap_or(2);
    let tab = table(cfg, need, SieveMode::PrimesOnly)?;
    let groups = moduli
        .iter()
        .map(|&q| Ok((q, build_character_group(q)?)))
        .collect::<Result<HashMap<_, _>>>()?;
    let row = |r: &ScanRow| {
        vec![
            r.q.to_string(),
            groups[&r.q].from_index(r.chi_index).to_string(),
            r.x.to_string(),
            num(r.distance_squared),
            num(r.bound_value),
            num(r.implied_c),
        ]
    };
    let mut t;
    match cfg.raw("t") {
        None => {
            t = Table::new(&["q", "chi", "x", "D2", "bound", "implied_c"]);
            for r in prop6_scan(&moduli, &xs, &tab)? {
                t.push(row(&r));
            }
        }
        Some(raw) => {
            let ts = values(raw)?;
            t = Table::new(&["q", "chi", "x", "D2", "bound", "implied_c", "t"]);
            for r in prop7_scan(&moduli, &ts, &xs, &tab)? {
                let mut fields = row(&r);
                fields.push(num(r.t));
                t.push(fields);
            }
        }
    }
    Ok(t)
}

fn lemma(cfg: &mut RunConfig) -> Result<Table> {
    let moduli = int_values(cfg.require_raw("q")?)?;
    let y = x_single(cfg)?;
    let family = match cfg.require::<u32>("lemma")? {
        3 => LemmaFamily::OddOrder {
            a_exp: cfg.get_or("a-exp", 1.0)?,
        },
        4 => LemmaFamily::TrivialProduct {
            g: cfg.get_or("tuple-size", 3)?,
        },
        5 => LemmaFamily::NearestNeighbours {
            ranks: cfg.get_or("ranks", 3)?,
        },
        other => bail!("--lemma must be 3, 4 or 5, got {other}"),
    };
    let tab = table(cfg, y, SieveMode::PrimesOnly)?;
    let mut t = Table::new(&["lemma", "params", "lhs", "loglogy", "ratio", "main_coeff"]);
    for r in lemma_distance_scan(family, &moduli, y, &tab)? {
        t.push([
            r.lemma.to_string(),
            r.params,
            num(r.lhs),
            num(r.loglogy),
            num(r.ratio),
            num(r.main_coeff),
        ]);
    }
    Ok(t)
}

fn halasz_cmd(cfg: &mut RunConfig) -> Result<Table> {
    let xs = x_list(cfg)?;
    let need = xs.iter().copied().max().unwrap_or(2);
    let tab = table(cfg, need, SieveMode::SmallestFactor)?;
    let f = function(cfg, "f", &tab)?;
    let t_max: f64 = cfg.require("T")?;
    let grid = GridConfig {
        step: cfg.get("step")?,
        ..GridConfig::default()
    };
    let mut t = Table::new(&halasz::CSV_HEADER);
    for x in xs {
        t.push(halasz_report(&f, x, t_max, &tab, grid)?.csv_fields());
    }
    Ok(t)
}

fn hall(cfg: &mut RunConfig) -> Result<Table> {
    let xs = x_list(cfg)?;
    let need = xs.iter().copied().max().unwrap_or(2);
    let tab = table(cfg, need, SieveMode::SmallestFactor)?;
    let mut reports = Vec::new();
    for &x in &xs {
        match (cfg.raw("f"), cfg.raw("seeds")) {
            (Some(_), None) => reports.push(hall_real_diagnostic(&function(cfg, "f", &tab)?, x, &tab)?),
            (None, Some(raw)) => {
                let (a, b) = raw
                    .split_once(':')
                    .ok_or_else(|| anyhow!("--seeds takes start:end (end exclusive)"))?;
                let (a, b): (u64, u64) = (a.trim().parse()?, b.trim().parse()?);
                let mode: RandomMode = cfg.get_or("mode", RandomMode::RealSigned)?;
                reports.extend(hall_family(a..b, mode, x, &tab)?);
            }
            _ => bail!("hall takes exactly one of --f and --seeds"),
        }
    }
    let mut t = Table::new(&["f", "x", "mean_re", "mean_im", "bound", "ratio"]);
    for r in reports {
        t.push([r.f, r.x.to_string(), num(r.mean.re), num(r.mean.im), num(r.bound), num(r.ratio)]);
    }
    Ok(t)
}

fn mean(cfg: &mut RunConfig) -> Result<Table> {
    let xs = x_list(cfg)?;
    let need = xs.iter().copied().max().unwrap_or(2);
    let tab = table(cfg, need, SieveMode::SmallestFactor)?;
    let f = function(cfg, "f", &tab)?;
    let mut t = Table::new(&["f", "x", "mean_re", "mean_im", "abs"]);
    for x in xs {
        let m = mean_value(&f, x, &tab)?;
        t.push([f.to_string(), x.to_string(), num(m.re), num(m.im), num(m.norm())]);
    }
    Ok(t)
}

fn progression(cfg: &mut RunConfig) -> Result<Table> {
    let x = x_single(cfg)?;
    let q: u64 = cfg.require("q")?;
    let tab = table(cfg, x, SieveMode::SmallestFactor)?;
    let f = function(cfg, "f", &tab)?;
    let residues = match cfg.raw("a") {
        Some(raw) => int_values(raw)?,
        None => (0..q).filter(|a| gcd(*a, q) == 1).collect(),
    };
    let mut t = Table::new(&["f", "x", "q", "a", "mean_re", "mean_im"]);
    for a in residues {
        let m = progression_mean(&f, x, q, a, &tab)?;
        t.push([f.to_string(), x.to_string(), q.to_string(), a.to_string(), num(m.re), num(m.im)]);
    }
    Ok(t)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
