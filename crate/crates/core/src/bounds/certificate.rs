use std::collections::BTreeMap;
use std::fmt;

use crate::geometry::Vec2;

/// Which lower bound produced a certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Boggio,
    Hardy,
    RadialHardy,
    Mixed,
    Box,
    Annulus,
    Convex,
    Monotonicity,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Boggio,
        Method::Hardy,
        Method::RadialHardy,
        Method::Mixed,
        Method::Box,
        Method::Annulus,
        Method::Convex,
        Method::Monotonicity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Boggio => "Boggio",
            Method::Hardy => "Hardy",
            Method::RadialHardy => "RadialHardy",
            Method::Mixed => "Mixed",
            Method::Box => "Box",
            Method::Annulus => "Annulus",
            Method::Convex => "Convex",
            Method::Monotonicity => "Monotonicity",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One named hypothesis check.
#[derive(Clone, Debug, PartialEq)]
pub struct Hypothesis {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Evidence gathered for the hypotheses of a bound. All checks are sampled.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Admissibility {
    /// Largest positive part of the sampled boundary condition.
    pub max_boundary_violation: f64,
    pub n_samples: usize,
    pub tolerance: f64,
    pub hypotheses: Vec<Hypothesis>,
}

/// A computed lower bound with the record of how it was justified.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundCertificate {
    pub method: Method,
    /// Variant or configuration, e.g. the vector field used.
    pub detail: String,
    /// Present only when every hypothesis passed.
    pub value: Option<f64>,
    pub parameters: BTreeMap<String, f64>,
    pub admissibility: Admissibility,
    pub infimum_witness: Option<Vec2>,
    pub notes: Vec<String>,
}

impl BoundCertificate {
    pub fn new(method: Method, detail: impl Into<String>) -> Self {
        BoundCertificate {
            method,
            detail: detail.into(),
            value: None,
            parameters: BTreeMap::new(),
            admissibility: Admissibility::default(),
            infimum_witness: None,
            notes: Vec::new(),
        }
    }

    pub fn hypothesis(&mut self, name: &str, passed: bool, detail: impl Into<String>) -> bool {
        self.admissibility.hypotheses.push(Hypothesis {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
        passed
    }

    pub fn param(&mut self, name: &str, value: f64) {
        self.parameters.insert(name.to_string(), value);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn all_passed(&self) -> bool {
        self.admissibility.hypotheses.iter().all(|h| h.passed)
    }

    /// Records `value` if every hypothesis passed.
    pub fn conclude(mut self, value: f64) -> Self {
        if self.all_passed() {
            self.value = Some(value);
        }
        self
    }

    pub fn is_applicable(&self) -> bool {
        self.value.is_some()
    }

    /// First failed hypothesis, rendered for reports.
    pub fn failure_reason(&self) -> Option<String> {
        self.admissibility
            .hypotheses
            .iter()
            .find(|h| !h.passed)
            .map(|h| format!("{}: {}", h.name, h.detail))
    }

    /// Multiplies the value; used by the self-test that corrupts certificates.
    pub fn corrupted(mut self, factor: f64) -> Self {
        self.value = self.value.map(|v| v * factor);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_requires_every_hypothesis() {
        let mut c = BoundCertificate::new(Method::Box, "axis");
        c.hypothesis("a", true, "");
        assert_eq!(c.clone().conclude(1.0).value, Some(1.0));
        c.hypothesis("b", false, "bad sign");
        let c = c.conclude(1.0);
        assert!(!c.is_applicable());
        assert_eq!(c.failure_reason().unwrap(), "b: bad sign");
    }
}
