//! Pass/fail reports shared by every verification routine.

use serde::Serialize;

use crate::numeric::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub location: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    #[serde(rename = "N")]
    pub n: u32,
    pub pass: bool,
    pub checked: usize,
    pub max_residual: f64,
    pub failures: Vec<Failure>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(check: impl Into<String>, n: u32) -> Self {
        Self {
            check: check.into(),
            n,
            pass: true,
            checked: 0,
            max_residual: 0.0,
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Compares `lhs` with `rhs` and records a failure at `location` if they
    /// differ. Returns whether they agreed.
    pub fn compare<S: Scalar>(
        &mut self,
        location: impl FnOnce() -> String,
        lhs: &S,
        rhs: &S,
        eps: f64,
    ) -> bool {
        self.checked += 1;
        let diff = lhs.clone() - rhs;
        self.max_residual = self.max_residual.max(diff.magnitude());
        if diff.is_negligible(eps) {
            true
        } else {
            self.fail(
                location(),
                format!(
                    "lhs {} rhs {} residual {}",
                    lhs.to_canonical(),
                    rhs.to_canonical(),
                    diff.to_canonical()
                ),
            );
            false
        }
    }

    /// Records a boolean condition.
    pub fn require(&mut self, ok: bool, location: impl FnOnce() -> String, detail: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.fail(location(), detail());
        }
    }

    pub fn fail(&mut self, location: String, detail: String) {
        self.pass = false;
        self.failures.push(Failure { location, detail });
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Folds a sub-report into this one, prefixing its failure locations.
    pub fn absorb(&mut self, other: CheckReport) {
        self.pass &= other.pass;
        self.checked += other.checked;
        self.max_residual = self.max_residual.max(other.max_residual);
        for f in other.failures {
            self.failures.push(Failure {
                location: format!("{}: {}", other.check, f.location),
                detail: f.detail,
            });
        }
        self.notes.extend(other.notes);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{Approx, Exact};

    #[test]
    fn compare_tracks_failures_and_residuals() {
        let mut r = CheckReport::new("demo", 2);
        assert!(r.compare(|| "a".into(), &Exact::from_i64(1), &Exact::from_i64(1), 0.0));
        assert!(!r.compare(|| "b".into(), &Exact::from_i64(1), &Exact::from_ratio(1, 2), 0.0));
        assert!(!r.pass);
        assert_eq!(r.checked, 2);
        assert_eq!(r.failures[0].location, "b");
        assert_eq!(r.max_residual, 0.5);

        let mut r = CheckReport::new("float", 2);
        assert!(r.compare(|| "c".into(), &Approx::new(1.0, 0.0), &Approx::new(1.0 + 1e-13, 0.0), 1e-10));
        assert!(r.pass);
    }

    #[test]
    fn absorb_prefixes_locations() {
        let mut outer = CheckReport::new("outer", 1);
        let mut inner = CheckReport::new("inner", 1);
        inner.fail("x".into(), "bad".into());
        outer.absorb(inner);
        assert!(!outer.pass);
        assert_eq!(outer.failures[0].location, "inner: x");
    }
}
