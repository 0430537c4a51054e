//! Machine-readable run reports: ordered `key = value` lines with stable
//! field names. Re-running an identical command line reproduces the report
//! byte-for-byte except for `timing.*` lines.

use std::fmt::Display;

use csym_core::matrix::CMatrix;
use csym_core::ToleranceConfig;

#[derive(Debug, Clone, Default)]
pub struct Report {
    lines: Vec<(String, String)>,
}

pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.16e}")
    }
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut r = Self::default();
        r.push("command", command);
        r
    }

    pub fn push(&mut self, key: &str, value: impl Display) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    pub fn push_f64(&mut self, key: &str, value: f64) {
        self.lines.push((key.to_string(), fmt_f64(value)));
    }

    pub fn push_config(&mut self, cfg: &ToleranceConfig) {
        self.push_f64("config.eps_rank", cfg.eps_rank);
        self.push_f64("config.eps_res", cfg.eps_res);
        self.push("config.restarts", cfg.restarts);
        self.push("config.max_iter", cfg.max_iter);
        self.push("config.seed", cfg.seed);
    }

    /// Embeds a matrix as `prefix.rows`, `prefix.cols`, and one
    /// `prefix.row.N` line per row of row-major `re im` pairs.
    pub fn push_matrix(&mut self, prefix: &str, m: &CMatrix) {
        self.push(&format!("{prefix}.rows"), m.nrows());
        self.push(&format!("{prefix}.cols"), m.ncols());
        for i in 0..m.nrows() {
            let mut row = String::new();
            for j in 0..m.ncols() {
                if j > 0 {
                    row.push(' ');
                }
                let z = m[(i, j)];
                row.push_str(&fmt_f64(z.re));
                row.push(' ');
                row.push_str(&fmt_f64(z.im));
            }
            self.push(&format!("{prefix}.row.{i}"), row);
        }
    }

    pub fn push_timing(&mut self, key: &str, millis: f64) {
        self.push(&format!("timing.{key}"), format!("{millis:.3}"));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.lines
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.lines {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }

    /// Rendering with the `timing.*` lines removed; this is the
    /// reproducible portion of the report.
    pub fn render_deterministic(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.lines {
            if k.starts_with("timing.") {
                continue;
            }
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use csym_core::matrix::flip;

    #[test]
    fn rendering_preserves_order_and_strips_timing() {
        let mut r = Report::new("demo");
        r.push("alpha", 1);
        r.push_timing("wall_ms", 12.5);
        r.push("beta", "two");
        let full = r.render();
        assert!(full.contains("command = demo\n"));
        assert!(full.contains("timing.wall_ms = 12.500\n"));
        let det = r.render_deterministic();
        assert!(!det.contains("timing."));
        let alpha_pos = det.find("alpha").unwrap();
        let beta_pos = det.find("beta").unwrap();
        assert!(alpha_pos < beta_pos);
    }

    #[test]
    fn matrix_embedding_has_row_lines() {
        let mut r = Report::new("demo");
        r.push_matrix("w", &flip(2));
        let text = r.render();
        assert!(text.contains("w.rows = 2"));
        assert!(text.contains("w.row.0 = 0.0000000000000000e0 0.0000000000000000e0 1.0000000000000000e0 0.0000000000000000e0"));
    }
}
