//! Text grid-file format for externally sampled immersions.
//!
//! Header lines `domain=<kind>`, `n=<dim>`, `rows=<R>`, `cols=<C>` and,
//! for periodic domains, `period=<sx>,<sy>`; then R×C whitespace-
//! separated data lines `s t x1 … xn`, rows-major (s varies slowest).
//! Periodic directions must not repeat the wrap-around line.

use confsurf::grid::{DomainKind, ParamGrid};
use confsurf::immersion::SampledImmersion;
use confsurf::ConfsurfError;

pub fn write_grid_file(imm: &SampledImmersion) -> Result<String, ConfsurfError> {
    let (xs, ys, px, py) = match &imm.grid.layout {
        confsurf::grid::GridLayout::Rect {
            xs,
            ys,
            period_x,
            period_y,
            ..
        } => (xs, ys, period_x, period_y),
        confsurf::grid::GridLayout::Polar { .. } => {
            return Err(ConfsurfError::WrongLayout {
                required: "rectangular",
            })
        }
    };
    let domain = match imm.grid.kind {
        DomainKind::FlatTorus => "flat-torus",
        DomainKind::CollarCylinder => "collar-cylinder",
        DomainKind::Annulus => "annulus",
        DomainKind::Disk => "disk",
    };
    let mut out = String::new();
    out.push_str(&format!("domain={domain}\n"));
    out.push_str(&format!("n={}\n", imm.n));
    out.push_str(&format!("rows={}\n", xs.len()));
    out.push_str(&format!("cols={}\n", ys.len()));
    if px.is_some() || py.is_some() {
        out.push_str(&format!(
            "period={},{}\n",
            px.unwrap_or(0.0),
            py.unwrap_or(0.0)
        ));
    }
    for (i, &s) in xs.iter().enumerate() {
        for (j, &t) in ys.iter().enumerate() {
            let node = i * ys.len() + j;
            let mut line = format!("{s:.17e} {t:.17e}");
            for k in 0..imm.n {
                line.push_str(&format!(" {:.17e}", imm.f[node * imm.n + k]));
            }
            out.push_str(&line);
            out.push('\n');
        }
    }
    Ok(out)
}

fn bad(line: usize, message: impl Into<String>) -> ConfsurfError {
    ConfsurfError::GridFile {
        line,
        message: message.into(),
    }
}

/// Parses the format and rebuilds derivatives by finite differences.
pub fn read_grid_file(text: &str) -> Result<SampledImmersion, ConfsurfError> {
    let mut domain: Option<DomainKind> = None;
    let mut dim: Option<usize> = None;
    let mut rows: Option<usize> = None;
    let mut cols: Option<usize> = None;
    let mut period: Option<(f64, f64)> = None;

    let mut lines = text.lines().enumerate().peekable();
    while let Some(&(lineno, line)) = lines.peek() {
        let line = line.trim();
        if line.is_empty() {
            lines.next();
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            break; // data section
        };
        let lineno = lineno + 1;
        match key.trim() {
            "domain" => {
                domain = Some(match value.trim() {
                    "disk" => DomainKind::Disk,
                    "annulus" => DomainKind::Annulus,
                    "flat-torus" => DomainKind::FlatTorus,
                    "collar-cylinder" => DomainKind::CollarCylinder,
                    other => return Err(bad(lineno, format!("unknown domain '{other}'"))),
                })
            }
            "n" => {
                let v: usize = value
                    .trim()
                    .parse()
                    .map_err(|_| bad(lineno, "n must be an integer"))?;
                if v < 3 {
                    return Err(bad(lineno, format!("ambient dimension {v} < 3")));
                }
                dim = Some(v);
            }
            "rows" => {
                rows = Some(
                    value
                        .trim()
                        .parse()
                        .map_err(|_| bad(lineno, "rows must be an integer"))?,
                )
            }
            "cols" => {
                cols = Some(
                    value
                        .trim()
                        .parse()
                        .map_err(|_| bad(lineno, "cols must be an integer"))?,
                )
            }
            "period" => {
                let (a, b) = value
                    .trim()
                    .split_once(',')
                    .ok_or_else(|| bad(lineno, "period needs two comma-separated values"))?;
                period = Some((
                    a.trim().parse().map_err(|_| bad(lineno, "bad period"))?,
                    b.trim().parse().map_err(|_| bad(lineno, "bad period"))?,
                ));
            }
            other => return Err(bad(lineno, format!("unknown header key '{other}'"))),
        }
        lines.next();
    }

    let header_end = lines
        .peek()
        .map(|&(l, _)| l)
        .unwrap_or(text.lines().count());
    let domain = domain.ok_or_else(|| bad(header_end, "missing domain= header"))?;
    let n = dim.ok_or_else(|| bad(header_end, "missing n= header"))?;
    let rows = rows.ok_or_else(|| bad(header_end, "missing rows= header"))?;
    let cols = cols.ok_or_else(|| bad(header_end, "missing cols= header"))?;
    if rows < 4 || cols < 4 {
        return Err(bad(header_end, "need at least 4 rows and 4 cols"));
    }
    if domain == DomainKind::FlatTorus && period.is_none() {
        return Err(bad(header_end, "flat-torus files need a period= header"));
    }

    let mut xs = vec![0.0; rows];
    let mut ys = vec![0.0; cols];
    let mut f = vec![0.0; rows * cols * n];
    let mut count = 0usize;
    for (lineno, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let lineno = lineno + 1;
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad(lineno, "non-numeric data"))?;
        if vals.len() != n + 2 {
            return Err(bad(
                lineno,
                format!("expected {} values, found {}", n + 2, vals.len()),
            ));
        }
        if count >= rows * cols {
            return Err(bad(lineno, "more data lines than rows×cols"));
        }
        let (i, j) = (count / cols, count % cols);
        if j == 0 {
            xs[i] = vals[0];
        } else if (vals[0] - xs[i]).abs() > 1e-12 * (1.0 + xs[i].abs()) {
            return Err(bad(lineno, "non-rectangular data: s changed mid-row"));
        }
        if i == 0 {
            ys[j] = vals[1];
        } else if (vals[1] - ys[j]).abs() > 1e-12 * (1.0 + ys[j].abs()) {
            return Err(bad(lineno, "non-rectangular data: t lattice mismatch"));
        }
        f[count * n..count * n + n].copy_from_slice(&vals[2..]);
        count += 1;
    }
    if count == 0 {
        return Err(bad(1, "no data lines"));
    }
    if count != rows * cols {
        return Err(bad(
            text.lines().count(),
            format!("expected {} data lines, found {count}", rows * cols),
        ));
    }

    // periodic lattices must be uniform and must not duplicate the seam
    let (px, py) = match (domain, period) {
        (DomainKind::FlatTorus, Some((a, b))) => (Some(a), Some(b)),
        (DomainKind::CollarCylinder, Some((a, _))) => (Some(a), None),
        _ => (None, None),
    };
    let header_lines = text.lines().count() - count;
    if let Some(p) = px {
        let h = p / rows as f64;
        for (i, &x) in xs.iter().enumerate() {
            if ((x - xs[0]) - i as f64 * h).abs() > 1e-9 * (1.0 + p) {
                return Err(bad(
                    header_lines + i * cols + 1,
                    format!("row {i}: s = {x} mismatches the declared period lattice"),
                ));
            }
        }
    }
    if let Some(p) = py {
        let h = p / cols as f64;
        for (j, &y) in ys.iter().enumerate() {
            if ((y - ys[0]) - j as f64 * h).abs() > 1e-9 * (1.0 + p) {
                return Err(bad(
                    header_lines + j + 1,
                    format!("col {j}: t = {y} mismatches the declared period lattice"),
                ));
            }
        }
    }

    let grid = ParamGrid::rect(domain, xs, ys, px, py);
    grid.validate()?;
    Ok(SampledImmersion::from_positions(grid, n, f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_rejected() {
        assert!(matches!(
            read_grid_file(""),
            Err(ConfsurfError::GridFile { .. })
        ));
    }

    #[test]
    fn torus_round_trip_preserves_positions() {
        let s = confsurf::catalog::instantiate(confsurf::catalog::SurfaceSpec::CliffordTorus, 32)
            .unwrap();
        let text = write_grid_file(&s.charts[0]).unwrap();
        let imm = read_grid_file(&text).unwrap();
        assert_eq!(imm.n, 4);
        assert_eq!(imm.f.len(), s.charts[0].f.len());
        for (a, b) in imm.f.iter().zip(&s.charts[0].f) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn mismatched_period_row_is_named() {
        let s = confsurf::catalog::instantiate(confsurf::catalog::SurfaceSpec::CliffordTorus, 32)
            .unwrap();
        let mut text = write_grid_file(&s.charts[0]).unwrap();
        // corrupt the s value of data row 3 (first line of grid row 0 is
        // header+1); pick a line in the middle of the first row block
        let lines: Vec<&str> = text.lines().collect();
        let header = 5;
        let mut corrupted: Vec<String> = lines.iter().map(|s| s.to_string()).collect();
        let target = header + 2 * 32; // start of row i=2
        let mut parts: Vec<String> = corrupted[target]
            .split_whitespace()
            .map(|s| s.to_string())
            .collect();
        parts[0] = "0.123456".into();
        corrupted[target] = parts.join(" ");
        text = corrupted.join("\n");
        match read_grid_file(&text) {
            Err(ConfsurfError::GridFile { message, .. }) => {
                assert!(
                    message.contains("mismatch") || message.contains("s changed"),
                    "{message}"
                );
            }
            other => panic!("expected grid-file error, got {other:?}"),
        }
    }
}
