//! TAP-style report lines: `ok N - description` / `not ok N - description`.

use std::fmt;

#[derive(Clone, Debug, Default)]
pub struct TapReport {
    lines: Vec<(bool, String)>,
}

impl TapReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, ok: bool, description: impl Into<String>) {
        self.lines.push((ok, description.into()));
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn failures(&self) -> usize {
        self.lines.iter().filter(|(ok, _)| !ok).count()
    }
}

impl fmt::Display for TapReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "1..{}", self.lines.len())?;
        for (i, (ok, d)) in self.lines.iter().enumerate() {
            let status = if *ok { "ok" } else { "not ok" };
            writeln!(f, "{status} {} - {d}", i + 1)?;
        }
        Ok(())
    }
}
