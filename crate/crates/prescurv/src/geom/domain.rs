//! Parameter domains: closed intervals and topological circles.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    Interval,
    Circle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub kind: DomainKind,
    pub a: f64,
    pub b: f64,
}

impl Domain {
    pub fn interval(a: f64, b: f64) -> Self {
        assert!(b > a, "domain needs b > a");
        Self {
            kind: DomainKind::Interval,
            a,
            b,
        }
    }

    pub fn circle(a: f64, b: f64) -> Self {
        assert!(b > a, "domain needs b > a");
        Self {
            kind: DomainKind::Circle,
            a,
            b,
        }
    }

    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    pub fn is_circle(&self) -> bool {
        self.kind == DomainKind::Circle
    }

    /// Map t into the fundamental range ([a, b] for intervals, [a, b) for
    /// circles).
    pub fn wrap(&self, t: f64) -> f64 {
        match self.kind {
            DomainKind::Interval => t.clamp(self.a, self.b),
            DomainKind::Circle => {
                let mut u = (t - self.a) % self.len();
                if u < 0.0 {
                    u += self.len();
                }
                self.a + u
            }
        }
    }

    /// Uniform sample parameters: n values, endpoint included for intervals
    /// and excluded for circles.
    pub fn sample_params(&self, n: usize) -> Vec<f64> {
        match self.kind {
            DomainKind::Interval => {
                let h = self.len() / (n - 1) as f64;
                (0..n).map(|i| self.a + h * i as f64).collect()
            }
            DomainKind::Circle => {
                let h = self.len() / n as f64;
                (0..n).map(|i| self.a + h * i as f64).collect()
            }
        }
    }

    /// Spacing between consecutive samples for n uniform samples.
    pub fn step(&self, n: usize) -> f64 {
        match self.kind {
            DomainKind::Interval => self.len() / (n - 1) as f64,
            DomainKind::Circle => self.len() / n as f64,
        }
    }

    pub fn same_extent(&self, other: &Domain, tol: f64) -> bool {
        self.kind == other.kind && (self.a - other.a).abs() <= tol && (self.b - other.b).abs() <= tol
    }
}
