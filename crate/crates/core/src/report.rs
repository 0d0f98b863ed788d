//! Line-oriented `key=value` run reports.

use std::fmt;

/// Ordered `key=value` pairs. Keys keep insertion order so output is
/// byte-stable for identical runs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunReport {
    fields: Vec<(String, String)>,
}

impl RunReport {
    pub fn new(algorithm: &str) -> Self {
        let mut r = Self::default();
        r.push("algorithm", algorithm);
        r
    }

    /// Appends a field, or replaces its value if the key is already present.
    pub fn push(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        let value = value.to_string();
        debug_assert!(!key.contains('=') && !key.contains('\n') && !value.contains('\n'));
        match self.fields.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value,
            None => self.fields.push((key.to_string(), value)),
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn fields(&self) -> &[(String, String)] {
        &self.fields
    }

    /// Parses text produced by `Display`. Blank lines are skipped.
    pub fn parse(text: &str) -> Option<Self> {
        let mut r = Self::default();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let (k, v) = line.split_once('=')?;
            r.fields.push((k.to_string(), v.to_string()));
        }
        Some(r)
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.fields {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_replace() {
        let mut r = RunReport::new("smooth");
        r.push("n", 4).push("regret", 0.125).push("n", 5);
        assert_eq!(r.to_string(), "algorithm=smooth\nn=5\nregret=0.125\n");
        assert_eq!(RunReport::parse(&r.to_string()).unwrap(), r);
        assert_eq!(r.get("regret"), Some("0.125"));
        assert!(RunReport::parse("no equals sign").is_none());
    }
}
