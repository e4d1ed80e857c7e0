//! Machine-readable verification reports.

use std::io::Write;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    /// Strict: `lhs < rhs` with no slack.
    #[serde(rename = "<")]
    Lt,
    /// Strict: `lhs > rhs` with no slack.
    #[serde(rename = ">")]
    Gt,
    /// `|lhs - rhs| <= tolerance`
    #[serde(rename = "==")]
    Eq,
}

impl Relation {
    pub fn holds(self, lhs: f64, rhs: f64, tolerance: f64) -> bool {
        match self {
            Relation::Le => lhs <= rhs + tolerance,
            Relation::Ge => lhs >= rhs - tolerance,
            Relation::Lt => lhs < rhs,
            Relation::Gt => lhs > rhs,
            Relation::Eq => (lhs - rhs).abs() <= tolerance,
        }
    }
}

/// One checked inequality. `pass` is always `relation.holds(lhs, rhs, tolerance)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_id: String,
    pub instance: String,
    pub pass: bool,
    pub lhs: f64,
    pub relation: Relation,
    pub rhs: f64,
    pub tolerance: f64,
    pub seed: Option<u64>,
    pub runtime_ms: u64,
}

impl VerificationReport {
    pub fn new(check_id: &str, instance: &str, lhs: f64, relation: Relation, rhs: f64, tolerance: f64) -> Self {
        Self {
            check_id: check_id.into(),
            instance: instance.into(),
            pass: relation.holds(lhs, rhs, tolerance),
            lhs,
            relation,
            rhs,
            tolerance,
            seed: None,
            runtime_ms: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// Canonical order: by `check_id`, then `instance`; stable otherwise.
pub fn sort_reports(reports: &mut [VerificationReport]) {
    reports.sort_by(|a, b| (&a.check_id, &a.instance).cmp(&(&b.check_id, &b.instance)));
}

pub fn all_pass(reports: &[VerificationReport]) -> bool {
    reports.iter().all(|r| r.pass)
}

/// One JSON object per line.
pub fn write_json_lines(reports: &[VerificationReport], mut out: impl Write) -> std::io::Result<()> {
    for r in reports {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations() {
        assert!(Relation::Le.holds(1.0 + 1e-12, 1.0, 1e-10));
        assert!(!Relation::Le.holds(1.1, 1.0, 1e-10));
        assert!(Relation::Ge.holds(0.25, 7.0 / 27.0, 0.1));
        assert!(!Relation::Gt.holds(0.0, 0.0, 1.0));
        assert!(Relation::Eq.holds(0.5, 0.5 + 1e-13, 1e-12));
    }

    #[test]
    fn canonical_order_and_lines() {
        let mut v = vec![
            VerificationReport::new("b", "x", 0.0, Relation::Le, 1.0, 0.0),
            VerificationReport::new("a", "z", 0.0, Relation::Le, 1.0, 0.0),
            VerificationReport::new("a", "y", 2.0, Relation::Le, 1.0, 0.0).with_seed(3),
        ];
        sort_reports(&mut v);
        let ids: Vec<_> = v.iter().map(|r| format!("{}/{}", r.check_id, r.instance)).collect();
        assert_eq!(ids, ["a/y", "a/z", "b/x"]);
        assert!(!all_pass(&v));
        let mut buf = Vec::new();
        write_json_lines(&v, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        let back: VerificationReport = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(back, v[0]);
        assert!(text.contains("\"relation\":\"<=\""));
    }
}
