use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::circuit::BaseGate;
use super::controlled::SLACK;
use crate::canonical::weyl_normalize;
use crate::error::{Error, Result};

/// `coeffs · (h1, h2, h3) ≤ bound`, or `= bound` when `equality` is set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub label: String,
    pub coeffs: [f64; 3],
    pub bound: f64,
    pub equality: bool,
}

impl Constraint {
    fn le(label: &str, coeffs: [f64; 3], bound: f64) -> Self {
        Self {
            label: label.to_string(),
            coeffs,
            bound,
            equality: false,
        }
    }

    fn eq(label: &str, coeffs: [f64; 3], bound: f64) -> Self {
        Self {
            equality: true,
            ..Self::le(label, coeffs, bound)
        }
    }

    /// Amount by which `h` violates the constraint, `0` when satisfied.
    pub fn violation(&self, h: [f64; 3]) -> f64 {
        let lhs: f64 = self.coeffs.iter().zip(&h).map(|(a, x)| a * x).sum();
        if self.equality {
            (lhs - self.bound).abs()
        } else {
            (lhs - self.bound).max(0.0)
        }
    }

    /// `bound − lhs`; negative when violated.
    pub fn slack(&self, h: [f64; 3]) -> f64 {
        let lhs: f64 = self.coeffs.iter().zip(&h).map(|(a, x)| a * x).sum();
        if self.equality {
            -(lhs - self.bound).abs()
        } else {
            self.bound - lhs
        }
    }
}

/// What the constraints guarantee beyond necessity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sufficiency {
    /// Necessary and sufficient.
    Exact,
    /// Every point in the region has a construction.
    Full,
    /// Only the subregion covered by the three-application construction
    /// is known to be reachable.
    ThreeApplicationSubregion,
}

/// Doubled coordinates `(h1, h2, h3)` reachable with `n` applications of a
/// controlled gate, for targets `U_d(h1/2, h2/2, h3/2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub n: usize,
    pub gamma: f64,
    pub constraints: Vec<Constraint>,
    pub sufficiency: Sufficiency,
}

/// Membership of a point, with the tightest constraint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub point: [f64; 3],
    pub inside: bool,
    pub binding: String,
    pub slack: f64,
    pub constructive: bool,
}

pub fn reachable_region(base: &BaseGate, n: usize) -> Result<Region> {
    let BaseGate::Controlled { gamma } = *base else {
        return Err(Error::UnsupportedBase(format!(
            "regions are defined for controlled gates, got {}",
            base.label()
        )));
    };
    base.validate()?;
    if n < 2 {
        return Err(Error::DomainError(format!("n = {n}, need at least 2")));
    }
    let budget = n as f64 * gamma;
    let mut constraints = vec![
        Constraint::le("h2 ≥ 0", [0.0, -1.0, 0.0], 0.0),
        Constraint::le("h1 ≥ h2", [-1.0, 1.0, 0.0], 0.0),
        Constraint::le("h1 ≤ π/2", [1.0, 0.0, 0.0], FRAC_PI_2),
    ];
    let sufficiency = if n == 2 {
        constraints.push(Constraint::eq("h3 = 0", [0.0, 0.0, 1.0], 0.0));
        constraints.push(Constraint::le("h1+h2 ≤ nγ", [1.0, 1.0, 0.0], budget));
        Sufficiency::Exact
    } else {
        constraints.push(Constraint::le("h1+h2+|h3| ≤ nγ", [1.0, 1.0, 1.0], budget));
        constraints.push(Constraint::le("h1+h2+|h3| ≤ nγ", [1.0, 1.0, -1.0], budget));
        if n == 3 {
            Sufficiency::ThreeApplicationSubregion
        } else {
            Sufficiency::Full
        }
    };
    Ok(Region {
        n,
        gamma,
        constraints,
        sufficiency,
    })
}

impl Region {
    /// Largest constraint violation at `h`, after normalizing the point.
    pub fn violation(&self, h: [f64; 3]) -> f64 {
        let h = normalize_doubled(h);
        self.constraints
            .iter()
            .map(|c| c.violation(h))
            .fold(0.0, f64::max)
    }

    pub fn contains(&self, h: [f64; 3]) -> bool {
        self.violation(h) <= SLACK
    }

    pub fn membership(&self, h: [f64; 3]) -> Membership {
        let point = normalize_doubled(h);
        let (binding, slack) = self
            .constraints
            .iter()
            .map(|c| (c, c.slack(point)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(c, s)| (c.label.clone(), s))
            .unwrap_or_default();
        let inside = self.contains(point);
        let constructive = inside
            && match self.sufficiency {
                Sufficiency::Exact | Sufficiency::Full => true,
                Sufficiency::ThreeApplicationSubregion => three_application_covers(point, self.gamma),
            };
        Membership {
            point,
            inside,
            binding,
            slack,
            constructive,
        }
    }
}

fn normalize_doubled(h: [f64; 3]) -> [f64; 3] {
    weyl_normalize([h[0] / 2.0, h[1] / 2.0, h[2] / 2.0]).coords.doubled()
}

/// Preconditions of the three-application construction.
pub(crate) fn three_application_covers(h: [f64; 3], gamma: f64) -> bool {
    let cap = (3.0 * gamma - h[2].abs()).min(PI) + SLACK;
    (-SLACK..=cap).contains(&(h[0] - h[1]))
        && (-SLACK..=cap).contains(&(h[0] + h[1]))
        && h[1].abs() <= gamma + SLACK
        && h[2].abs() <= h[1] + SLACK
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn two_cnot_region() {
        let r = reachable_region(&BaseGate::Controlled { gamma: FRAC_PI_2 }, 2).unwrap();
        assert_eq!(r.sufficiency, Sufficiency::Exact);
        assert!(r.contains([FRAC_PI_2, FRAC_PI_2, 0.0]));
        assert!(!r.contains([FRAC_PI_2, FRAC_PI_2, 0.3]));
        let m = r.membership([FRAC_PI_2, FRAC_PI_2, 0.0]);
        assert!(m.inside && m.constructive);
    }

    #[test]
    fn over_budget_point_names_the_sum_constraint() {
        let r = reachable_region(&BaseGate::Controlled { gamma: 0.5 }, 2).unwrap();
        let m = r.membership([0.8, 0.6, 0.0]);
        assert!(!m.inside);
        assert_eq!(m.binding, "h1+h2 ≤ nγ");
    }

    #[test]
    fn three_application_necessity() {
        let g = 0.3;
        let r = reachable_region(&BaseGate::Controlled { gamma: g }, 3).unwrap();
        assert_eq!(r.sufficiency, Sufficiency::ThreeApplicationSubregion);
        assert!(!r.contains([0.5, 0.3, 0.2]));
        assert!(r.contains([0.4, 0.3, 0.2]));
        assert!(r.contains([0.4, 0.3, -0.2]));
        assert!(!r.contains([0.5, 0.3, -0.2]));
    }

    #[test]
    fn origin_always_included() {
        for g in [0.1, 0.5, FRAC_PI_4, FRAC_PI_2] {
            for n in 2..7 {
                let r = reachable_region(&BaseGate::Controlled { gamma: g }, n).unwrap();
                assert!(r.contains([0.0; 3]));
            }
        }
    }

    #[test]
    fn four_or_more_is_full() {
        let r = reachable_region(&BaseGate::Controlled { gamma: 0.4 }, 5).unwrap();
        assert_eq!(r.sufficiency, Sufficiency::Full);
    }

    #[test]
    fn non_controlled_bases_unsupported() {
        let e = reachable_region(&BaseGate::SuperControlled { alpha2: 0.1 }, 3).unwrap_err();
        assert!(matches!(e, Error::UnsupportedBase(_)));
        assert!(matches!(reachable_region(&BaseGate::Controlled { gamma: 0.4 }, 1), Err(Error::DomainError(_))));
    }

    #[test]
    fn points_are_normalized_before_testing() {
        let r = reachable_region(&BaseGate::Controlled { gamma: 0.5 }, 2).unwrap();
        // (−0.6, 0, 0) is the class of (0.6, 0, 0)
        assert!(r.contains([-0.6, 0.0, 0.0]));
    }
}
