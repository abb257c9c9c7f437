//! Matrix Market adjacency files and CSV output.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{KuramotoError, Result};
use crate::graph::CouplingGraph;
use crate::model::Trajectory;
use crate::scalar::Real;

/// Reals are written with 17 significant digits in scientific notation,
/// enough for exact f64 round trips and byte-diffable outputs.
pub fn fmt_real<T: Real>(x: T) -> String {
    format!("{x:.16e}")
}

fn mm_err(line: usize, msg: impl Into<String>) -> KuramotoError {
    KuramotoError::MatrixMarket {
        line,
        msg: msg.into(),
    }
}

/// Reads a coordinate-pattern Matrix Market file into a coupling graph.
///
/// Accepted headers: `%%MatrixMarket matrix coordinate pattern general` and
/// the `symmetric` variant, case-insensitively; symmetric files expand to
/// both triangles. Value formats (real/integer/complex) are rejected, the
/// matrix must be square, and indices are 1-based in the file.
pub fn read_matrix_market<R: BufRead>(reader: R) -> Result<CouplingGraph> {
    let mut lines = reader.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| mm_err(1, "empty file"))
        .and_then(|(i, l)| Ok((i, l?)))?;
    let fields: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" {
        return Err(mm_err(1, "expected '%%MatrixMarket matrix coordinate pattern general|symmetric'"));
    }
    if fields[1] != "matrix" || fields[2] != "coordinate" {
        return Err(mm_err(1, "only coordinate matrices are supported"));
    }
    if fields[3] != "pattern" {
        return Err(mm_err(
            1,
            format!("unsupported field '{}': only pattern matrices are supported", fields[3]),
        ));
    }
    let symmetric = match fields[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => {
            return Err(mm_err(
                1,
                format!("unsupported symmetry '{other}': expected general or symmetric"),
            ))
        }
    };

    let mut dims: Option<(usize, usize)> = None;
    let mut rows: Vec<Vec<usize>> = Vec::new();
    let mut seen = 0usize;
    let mut expected = 0usize;
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        if dims.is_none() {
            let m: usize = parse_field(&mut parts, line_no, "row count")?;
            let n: usize = parse_field(&mut parts, line_no, "column count")?;
            expected = parse_field(&mut parts, line_no, "entry count")?;
            if m != n {
                return Err(mm_err(line_no, format!("adjacency must be square, got {m}x{n}")));
            }
            if m == 0 {
                return Err(mm_err(line_no, "matrix size must be at least 1"));
            }
            dims = Some((m, n));
            rows = vec![Vec::new(); m];
            continue;
        }
        let (m, _) = dims.unwrap();
        let i: usize = parse_field(&mut parts, line_no, "row index")?;
        let j: usize = parse_field(&mut parts, line_no, "column index")?;
        if parts.next().is_some() {
            return Err(mm_err(line_no, "pattern entries carry no values"));
        }
        if i == 0 || j == 0 || i > m || j > m {
            return Err(mm_err(line_no, format!("entry ({i}, {j}) out of range for size {m}")));
        }
        seen += 1;
        rows[i - 1].push(j - 1);
        if symmetric && i != j {
            rows[j - 1].push(i - 1);
        }
    }
    let (m, _) = dims.ok_or_else(|| mm_err(0, "missing size line"))?;
    if seen != expected {
        return Err(mm_err(0, format!("header promises {expected} entries, found {seen}")));
    }
    CouplingGraph::from_nonzero_rows(m, rows)
}

fn parse_field<'a>(
    parts: &mut impl Iterator<Item = &'a str>,
    line: usize,
    what: &str,
) -> Result<usize> {
    parts
        .next()
        .ok_or_else(|| mm_err(line, format!("missing {what}")))?
        .parse()
        .map_err(|e| mm_err(line, format!("bad {what}: {e}")))
}

pub fn read_matrix_market_file(path: &Path) -> Result<CouplingGraph> {
    read_matrix_market(BufReader::new(File::open(path)?))
}

/// Writes the graph as a general coordinate-pattern Matrix Market file with
/// 1-based indices, one `%` comment line per entry of `comments`.
pub fn write_matrix_market<W: Write>(
    mut w: W,
    graph: &CouplingGraph,
    comments: &[String],
) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate pattern general")?;
    for c in comments {
        writeln!(w, "% {c}")?;
    }
    writeln!(w, "{} {} {}", graph.size(), graph.size(), graph.total_ones())?;
    for m in 0..graph.size() {
        for l in graph.row_nonzeros(m) {
            writeln!(w, "{} {}", m + 1, l + 1)?;
        }
    }
    Ok(())
}

pub fn write_matrix_market_file(
    path: &Path,
    graph: &CouplingGraph,
    comments: &[String],
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_matrix_market(&mut w, graph, comments)?;
    w.flush()?;
    Ok(())
}

/// Writes a trajectory as CSV: `# `-prefixed comment lines, then columns
/// t, r, psi, V, conserved_residual and, when `with_phases`, theta_1..theta_M
/// (wrapped phases are not used; the unwrapped lift is written).
pub fn write_trajectory_csv<W: Write, T: Real>(
    mut w: W,
    trajectory: &Trajectory<T>,
    comments: &[String],
    with_phases: bool,
) -> Result<()> {
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    let m = trajectory.states().first().map_or(0, |s| s.len());
    write!(w, "t,r,psi,V,conserved_residual")?;
    if with_phases {
        for i in 1..=m {
            write!(w, ",theta_{i}")?;
        }
    }
    writeln!(w)?;
    for i in 0..trajectory.len() {
        write!(
            w,
            "{},{},{},{},{}",
            fmt_real(trajectory.sample_times()[i]),
            fmt_real(trajectory.order_modulus()[i]),
            fmt_real(trajectory.order_angle()[i]),
            fmt_real(trajectory.potential()[i]),
            fmt_real(trajectory.conserved_residual()[i]),
        )?;
        if with_phases {
            for &p in trajectory.states()[i].phases() {
                write!(w, ",{}", fmt_real(p))?;
            }
        }
        writeln!(w)?;
    }
    Ok(())
}

/// One row of the strategy-comparison benchmark output.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub strategy: String,
    pub m: usize,
    pub density: f64,
    pub sin_evals: u64,
    pub cos_evals: u64,
    pub wall_seconds: f64,
}

/// Writes benchmark rows as CSV with the fixed column set
/// strategy, M, density, sin_evals, cos_evals, wall_seconds.
pub fn write_bench_csv<W: Write>(mut w: W, rows: &[BenchRow], comments: &[String]) -> Result<()> {
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    writeln!(w, "strategy,M,density,sin_evals,cos_evals,wall_seconds")?;
    for row in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            row.strategy,
            row.m,
            fmt_real(row.density),
            row.sin_evals,
            row.cos_evals,
            fmt_real(row.wall_seconds),
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::random_threshold_matrix;
    use proptest::prelude::*;
    use std::io::Cursor;

    fn round_trip(graph: &CouplingGraph) -> CouplingGraph {
        let mut buf = Vec::new();
        write_matrix_market(&mut buf, graph, &["written by a test".into()]).unwrap();
        read_matrix_market(Cursor::new(buf)).unwrap()
    }

    #[test]
    fn complete_pattern_round_trips() {
        let g = CouplingGraph::complete(3);
        assert_eq!(round_trip(&g), g);
    }

    #[test]
    fn symmetric_header_expands_lower_triangle() {
        let text = "%%MatrixMarket matrix coordinate pattern symmetric\n\
                    % lower triangle only\n\
                    3 3 3\n2 1\n3 1\n3 3\n";
        let g = read_matrix_market(Cursor::new(text)).unwrap();
        assert!(g.contains(0, 1) && g.contains(1, 0));
        assert!(g.contains(0, 2) && g.contains(2, 0));
        assert!(g.contains(2, 2));
        assert_eq!(g.total_ones(), 5);
        assert!(g.is_symmetric());
    }

    #[test]
    fn value_formats_are_rejected() {
        let text = "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 3.5\n";
        let err = read_matrix_market(Cursor::new(text)).unwrap_err();
        assert!(matches!(err, KuramotoError::MatrixMarket { line: 1, .. }));
    }

    #[test]
    fn rectangular_and_bad_entries_are_rejected() {
        let rect = "%%MatrixMarket matrix coordinate pattern general\n2 3 1\n1 1\n";
        assert!(read_matrix_market(Cursor::new(rect)).is_err());
        let oob = "%%MatrixMarket matrix coordinate pattern general\n2 2 1\n3 1\n";
        assert!(read_matrix_market(Cursor::new(oob)).is_err());
        let short = "%%MatrixMarket matrix coordinate pattern general\n2 2 5\n1 1\n";
        assert!(read_matrix_market(Cursor::new(short)).is_err());
    }

    #[test]
    fn fmt_real_round_trips_doubles() {
        for &x in &[0.1, -3.25e-17, std::f64::consts::PI, 1e300] {
            let s = fmt_real(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn random_graphs_round_trip(m in 1usize..40, p in 0.0f64..1.0, seed in any::<u64>()) {
            let g = random_threshold_matrix(m, p, seed).unwrap();
            prop_assert_eq!(round_trip(&g), g);
        }
    }
}
