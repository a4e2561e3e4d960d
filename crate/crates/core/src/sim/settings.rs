use serde::{Deserialize, Serialize};

use super::dist::Distribution;
use crate::error::{param, Result};
use crate::evalue::SupportBounds;

/// Ordering of the mean of `P` relative to that of `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Lower,
    Equal,
}

/// A pair of laws with declared support bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingSpec {
    pub name: String,
    pub dist_p: Distribution,
    pub dist_q: Distribution,
    pub bounds_p: SupportBounds,
    pub bounds_q: SupportBounds,
    pub true_relation: Relation,
}

impl SettingSpec {
    pub fn new(
        name: impl Into<String>,
        dist_p: Distribution,
        dist_q: Distribution,
        bounds_p: SupportBounds,
        bounds_q: SupportBounds,
    ) -> Result<Self> {
        let name = name.into();
        for (d, bounds) in [(dist_p, bounds_p), (dist_q, bounds_q)] {
            d.validate()?;
            let (lo, hi) = d.support();
            if lo < bounds.lower() || hi > bounds.upper() {
                return param(format!("setting {name}: support [{lo}, {hi}] exceeds bounds {bounds}"));
            }
        }
        let true_relation = if dist_p.mean() == dist_q.mean() {
            Relation::Equal
        } else if dist_p.mean() < dist_q.mean() {
            Relation::Lower
        } else {
            return param(format!("setting {name}: the mean of P must not exceed that of Q"));
        };
        Ok(SettingSpec {
            name,
            dist_p,
            dist_q,
            bounds_p,
            bounds_q,
            true_relation,
        })
    }
}

pub const BUILTIN_NAMES: [&str; 6] = [
    "ber-equal",
    "ber-lower",
    "unif-vs-ber-equal",
    "unif-vs-ber-lower",
    "beta-equal",
    "beta-lower",
];

/// The six reference settings, in the order of [`BUILTIN_NAMES`].
pub fn builtin_settings() -> Vec<SettingSpec> {
    BUILTIN_NAMES.iter().map(|name| builtin(name).expect("built-in")).collect()
}

pub fn builtin(name: &str) -> Option<SettingSpec> {
    use Distribution::*;
    let unit = SupportBounds::unit();
    let wide = |hi: f64| SupportBounds::new(0.0, hi).expect("positive width");
    let (p, q, bounds_q) = match name {
        "ber-equal" => (Bernoulli { p: 0.5 }, Bernoulli { p: 0.5 }, unit),
        "ber-lower" => (Bernoulli { p: 0.5 }, Bernoulli { p: 0.6 }, unit),
        "unif-vs-ber-equal" => (Bernoulli { p: 0.6 }, Uniform { lo: 0.0, hi: 1.2 }, wide(1.2)),
        "unif-vs-ber-lower" => (Bernoulli { p: 0.6 }, Uniform { lo: 0.0, hi: 1.4 }, wide(1.4)),
        "beta-equal" => (Beta { a: 10.0, b: 30.0 }, Beta { a: 1.0, b: 3.0 }, unit),
        "beta-lower" => (Beta { a: 10.0, b: 30.0 }, Beta { a: 10.0, b: 15.0 }, unit),
        _ => return None,
    };
    Some(SettingSpec::new(name, p, q, unit, bounds_q).expect("valid built-in"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_are_consistent() {
        let all = builtin_settings();
        assert_eq!(all.len(), 6);
        for s in &all {
            let expected = if s.name.ends_with("equal") { Relation::Equal } else { Relation::Lower };
            assert_eq!(s.true_relation, expected, "{}", s.name);
        }
        let beta = builtin("beta-equal").unwrap();
        assert_eq!(beta.dist_p.mean(), 0.25);
        assert_eq!(beta.dist_q.mean(), 0.25);
        assert_eq!(builtin("unif-vs-ber-lower").unwrap().bounds_q.upper(), 1.4);
        assert!(builtin("gaussian").is_none());
    }

    #[test]
    fn bounds_must_cover_the_support() {
        let narrow = SupportBounds::new(0.0, 1.0).unwrap();
        let r = SettingSpec::new(
            "bad",
            Distribution::Bernoulli { p: 0.5 },
            Distribution::Uniform { lo: 0.0, hi: 1.2 },
            narrow,
            narrow,
        );
        assert!(r.is_err());
    }
}
