//! The matrix file format: a `rows`/`cols` header followed by one
//! row-major `re im` pair per line, printed with 17 significant digits so
//! that doubles round-trip exactly.
//!
//! ```text
//! rows 2
//! cols 2
//! 1.0000000000000000e0 0.0000000000000000e0
//! 0.0000000000000000e0 0.0000000000000000e0
//! 1.0000000000000000e0 0.0000000000000000e0
//! 0.0000000000000000e0 0.0000000000000000e0
//! ```

use std::fmt::Write as _;
use std::path::Path;

use csym_core::matrix::{c, ensure_finite, CMatrix};

#[derive(Debug, thiserror::Error)]
pub enum MatFileError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
}

/// Serializes with 17 significant digits (exact double round trip).
pub fn render_matrix(m: &CMatrix) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "rows {}", m.nrows());
    let _ = writeln!(out, "cols {}", m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            let _ = writeln!(out, "{:.16e} {:.16e}", z.re, z.im);
        }
    }
    out
}

pub fn write_matrix(path: &Path, m: &CMatrix) -> Result<(), MatFileError> {
    std::fs::write(path, render_matrix(m)).map_err(|source| MatFileError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn parse_matrix(text: &str, path: &str) -> Result<CMatrix, MatFileError> {
    let parse_err = |message: String| MatFileError::Parse {
        path: path.to_string(),
        message,
    };
    let mut tokens = text.split_whitespace();
    let expect_keyword = |tok: Option<&str>, want: &str| -> Result<(), MatFileError> {
        match tok {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(parse_err(format!("expected '{want}', found '{t}'"))),
            None => Err(parse_err(format!("expected '{want}', found end of file"))),
        }
    };
    expect_keyword(tokens.next(), "rows")?;
    let rows: usize = tokens
        .next()
        .ok_or_else(|| parse_err("missing row count".into()))?
        .parse()
        .map_err(|e| parse_err(format!("bad row count: {e}")))?;
    expect_keyword(tokens.next(), "cols")?;
    let cols: usize = tokens
        .next()
        .ok_or_else(|| parse_err("missing column count".into()))?
        .parse()
        .map_err(|e| parse_err(format!("bad column count: {e}")))?;

    let mut entries = Vec::with_capacity(rows * cols);
    for k in 0..rows * cols {
        let re: f64 = tokens
            .next()
            .ok_or_else(|| parse_err(format!("missing real part of entry {k}")))?
            .parse()
            .map_err(|e| parse_err(format!("bad real part of entry {k}: {e}")))?;
        let im: f64 = tokens
            .next()
            .ok_or_else(|| parse_err(format!("missing imaginary part of entry {k}")))?
            .parse()
            .map_err(|e| parse_err(format!("bad imaginary part of entry {k}: {e}")))?;
        entries.push(c(re, im));
    }
    if let Some(extra) = tokens.next() {
        return Err(parse_err(format!("trailing data '{extra}'")));
    }
    let m = CMatrix::from_row_slice(rows, cols, &entries);
    ensure_finite(&m).map_err(|e| parse_err(e.to_string()))?;
    Ok(m)
}

pub fn read_matrix(path: &Path) -> Result<CMatrix, MatFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| MatFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_matrix(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use csym_core::seeding::{complex_gaussian_matrix, rng_from_seed};

    #[test]
    fn roundtrip_is_exact() {
        let m = complex_gaussian_matrix(&mut rng_from_seed(3), 4, 3);
        let text = render_matrix(&m);
        let back = parse_matrix(&text, "test").unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn empty_matrix_roundtrip() {
        let m = CMatrix::zeros(0, 3);
        let back = parse_matrix(&render_matrix(&m), "test").unwrap();
        assert_eq!(back.nrows(), 0);
        assert_eq!(back.ncols(), 3);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_matrix("rows x\ncols 2\n", "t").is_err());
        assert!(parse_matrix("cols 2\nrows 2\n", "t").is_err());
        assert!(parse_matrix("rows 1\ncols 1\n1.0\n", "t").is_err());
        assert!(parse_matrix("rows 1\ncols 1\n1.0 0.0\n7\n", "t").is_err());
        assert!(parse_matrix("rows 1\ncols 1\nNaN 0.0\n", "t").is_err());
    }
}
