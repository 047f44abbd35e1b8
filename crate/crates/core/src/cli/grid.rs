//! `--theta-db` / `--gamma` value syntax: `x`, `a,b,c` or `start:stop:step`.

/// Parse a list or an inclusive range.
pub fn parse_values(s: &str) -> Result<Vec<f64>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty value list".into());
    }
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad number {t:?}: {e}"));
    let out = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("range {s:?} must be start:stop:step"));
        }
        let (a, b, h) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(h > 0.0) || b < a {
            return Err(format!("range {s:?} needs step > 0 and stop ≥ start"));
        }
        let n = ((b - a) / h + 1e-9).floor() as usize + 1;
        if n > 1_000_000 {
            return Err(format!("range {s:?} has too many points"));
        }
        // Snap so that 0.1:0.9:0.1 prints as 0.3, not 0.30000000000000004.
        (0..n).map(|i| ((a + i as f64 * h) * 1e12).round() / 1e12).collect()
    } else {
        s.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    if out.iter().any(|v| !v.is_finite()) {
        return Err("values must be finite".into());
    }
    Ok(out)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// `λ:p,λ:p,...`
pub fn parse_tiers(s: &str) -> Result<Vec<crate::geometry::Tier>, String> {
    s.split(',')
        .map(|t| {
            let (l, p) = t.split_once(':').ok_or_else(|| format!("tier {t:?} must be lambda:power"))?;
            let lambda = l.trim().parse().map_err(|e| format!("bad tier density {l:?}: {e}"))?;
            let pt = p.trim().parse().map_err(|e| format!("bad tier power {p:?}: {e}"))?;
            Ok(crate::geometry::Tier { lambda, pt })
        })
        .collect()
}
