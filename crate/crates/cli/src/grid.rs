//! Parameter grids: `name=start:stop:step` axes joined by commas, and value
//! lists for single flags (`v`, `v1,v2,...` or `start:stop[:step]`).

use anyhow::{anyhow, bail, Result};

/// Digits after the decimal point of a plain decimal literal; `None` when
/// the literal uses an exponent.
fn decimals(s: &str) -> Option<u32> {
    if s.contains(['e', 'E']) {
        return None;
    }
    Some(s.split_once('.').map_or(0, |(_, frac)| frac.len() as u32))
}

fn parse_f64(s: &str) -> Result<f64> {
    let v: f64 = s.trim().parse().map_err(|_| anyhow!("not a number: '{s}'"))?;
    if !v.is_finite() {
        bail!("not a finite number: '{s}'");
    }
    Ok(v)
}

/// `start, start + step, …` up to `stop` inclusive. Points are rounded to the
/// number of decimals written in the inputs, so `1.1:1.3:0.1` gives exactly
/// the literals 1.1, 1.2, 1.3.
pub fn range(start: &str, stop: &str, step: &str) -> Result<Vec<f64>> {
    let (a, b, h) = (parse_f64(start)?, parse_f64(stop)?, parse_f64(step)?);
    if !(h > 0.0) {
        bail!("grid step must be positive, got {step}");
    }
    if b < a {
        bail!("grid stop {stop} is below start {start}");
    }
    let count = ((b - a) / h + 1e-9).floor() as u64;
    if count > 10_000_000 {
        bail!("grid with {count} points is too large");
    }
    let digits = [start, stop, step].iter().map(|s| decimals(s.trim())).try_fold(0u32, |m, d| d.map(|d| m.max(d)));
    Ok((0..=count)
        .map(|k| {
            let v = a + k as f64 * h;
            match digits {
                Some(d) if d <= 15 => {
                    let scale = 10f64.powi(d as i32);
                    let r = (v * scale).round() / scale;
                    // print-and-parse gives the literal the user would write
                    format!("{r:.*}", d as usize).parse().unwrap_or(r)
                }
                _ => v,
            }
        })
        .collect())
}

/// A flag value: a number, a comma list, or `start:stop[:step]` (step 1).
pub fn values(raw: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for part in raw.split(',') {
        let part = part.trim();
        let pieces: Vec<&str> = part.split(':').collect();
        match pieces.as_slice() {
            [v] => out.push(parse_f64(v)?),
            [a, b] => out.extend(range(a, b, "1")?),
            [a, b, h] => out.extend(range(a, b, h)?),
            _ => bail!("malformed value list '{raw}'"),
        }
    }
    if out.is_empty() {
        bail!("empty value list");
    }
    Ok(out)
}

/// Like [`values`], for nonnegative integers.
pub fn int_values(raw: &str) -> Result<Vec<u64>> {
    values(raw)?
        .into_iter()
        .map(|v| {
            if v < 0.0 || v.fract() != 0.0 || v > u64::MAX as f64 {
                Err(anyhow!("expected a nonnegative integer, got {v}"))
            } else {
                Ok(v as u64)
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

/// `name=start:stop:step,name=v,...`
pub fn parse_grid(spec: &str) -> Result<Vec<Axis>> {
    let mut axes: Vec<Axis> = Vec::new();
    for part in spec.split(',') {
        let (name, val) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("grid axis '{part}' is not name=start:stop:step"))?;
        let name = name.trim().to_string();
        if axes.iter().any(|a| a.name == name) {
            bail!("grid axis '{name}' given twice");
        }
        let pieces: Vec<&str> = val.split(':').collect();
        let values = match pieces.as_slice() {
            [v] => vec![parse_f64(v)?],
            [a, b, h] => range(a, b, h)?,
            _ => bail!("grid axis '{part}' is not name=start:stop:step"),
        };
        axes.push(Axis { name, values });
    }
    Ok(axes)
}

/// Every combination of axis values, first axis outermost.
pub fn cartesian(axes: &[Axis]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.into_iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_ranges_are_exact_literals() {
        assert_eq!(range("1.1", "1.5", "0.1").unwrap(), vec![1.1, 1.2, 1.3, 1.4, 1.5]);
        assert_eq!(range("-10", "10", "0.5").unwrap().len(), 41);
        assert_eq!(range("1.1", "3", "0.1").unwrap().last(), Some(&3.0));
    }

    #[test]
    fn value_lists() {
        assert_eq!(values("1000,1e4").unwrap(), vec![1000.0, 10000.0]);
        assert_eq!(int_values("3:6").unwrap(), vec![3, 4, 5, 6]);
        assert!(int_values("1.5").is_err());
        assert!(values("1:2:3:4").is_err());
    }

    #[test]
    fn grid_product_order() {
        let axes = parse_grid("sigma=1.5:2:0.5,t=0:1:1").unwrap();
        assert_eq!(
            cartesian(&axes),
            vec![vec![1.5, 0.0], vec![1.5, 1.0], vec![2.0, 0.0], vec![2.0, 1.0]]
        );
        assert!(parse_grid("sigma").is_err());
        assert!(parse_grid("s=1,s=2").is_err());
    }
}
