//! Threshold checks from the `[assert]` block.

use std::collections::BTreeMap;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    Max,
    Min,
}

/// `final_error_max` → `("final_error", Max)`.
pub fn split_key(key: &str) -> Option<(&str, Bound)> {
    if let Some(m) = key.strip_suffix("_max") {
        Some((m, Bound::Max))
    } else {
        key.strip_suffix("_min").map(|m| (m, Bound::Min))
    }
    .filter(|(m, _)| !m.is_empty())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub assertion: String,
    pub metric: String,
    /// `None` when the metric was not produced by the run.
    pub value: Option<f64>,
    pub bound: f64,
}

impl Failure {
    pub fn describe(&self) -> String {
        let op = if self.assertion.ends_with("_max") { "<=" } else { ">=" };
        match self.value {
            Some(v) => format!("{}: {v:e} is not {op} {:e}", self.assertion, self.bound),
            None => format!("{}: metric `{}` was not produced", self.assertion, self.metric),
        }
    }
}

/// Every assertion that does not hold. NaN never passes.
pub fn check(assertions: &BTreeMap<String, f64>, metrics: &BTreeMap<String, f64>) -> Vec<Failure> {
    let mut out = Vec::new();
    for (key, &bound) in assertions {
        let Some((metric, kind)) = split_key(key) else {
            continue;
        };
        let value = metrics.get(metric).copied();
        let ok = match (value, kind) {
            (Some(v), Bound::Max) => v <= bound,
            (Some(v), Bound::Min) => v >= bound,
            (None, _) => false,
        };
        if !ok {
            out.push(Failure { assertion: key.clone(), metric: metric.to_string(), value, bound });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys() {
        assert_eq!(split_key("final_error_max"), Some(("final_error", Bound::Max)));
        assert_eq!(split_key("slope_min"), Some(("slope", Bound::Min)));
        assert_eq!(split_key("_max"), None);
        assert_eq!(split_key("final_error"), None);
    }

    #[test]
    fn checks() {
        let metrics = BTreeMap::from([("a".to_string(), 1.0), ("nan".to_string(), f64::NAN)]);
        let asserts = BTreeMap::from([
            ("a_max".to_string(), 1.0),
            ("a_min".to_string(), 1.5),
            ("nan_max".to_string(), 1e300),
            ("missing_min".to_string(), 0.0),
        ]);
        let f = check(&asserts, &metrics);
        let names: Vec<&str> = f.iter().map(|x| x.assertion.as_str()).collect();
        assert_eq!(names, ["a_min", "missing_min", "nan_max"]);
        assert!(f[0].describe().contains(">="));
        assert!(f[1].describe().contains("not produced"));
    }
}
