//! Cohort means per label, as used for referee and group comparisons.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ScoreError, ScoreReport};

/// One child's (or one referee's) per-action points and time score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortEntry {
    pub label: String,
    pub actions: [f64; 7],
    pub time_score: f64,
}

impl CohortEntry {
    pub fn from_report(label: impl Into<String>, r: &ScoreReport) -> Self {
        Self {
            label: label.into(),
            actions: r.action_scores().map(f64::from),
            time_score: f64::from(r.time_score),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub label: String,
    pub count: usize,
    pub action_means: [f64; 7],
    pub time_mean: f64,
    /// Action means plus time mean.
    pub sum: f64,
    /// A1 + A2 + A5 + A6.
    pub movement: f64,
    /// A3 + A4 + A7.
    pub object_control: f64,
    /// Time mean.
    pub dexterity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortReport {
    pub groups: Vec<GroupSummary>,
}

impl CohortReport {
    pub fn group(&self, label: &str) -> Option<&GroupSummary> {
        self.groups.iter().find(|g| g.label == label)
    }
}

/// Mean that does not depend on input order.
fn mean(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn aggregate_cohort(entries: &[CohortEntry]) -> Result<CohortReport, ScoreError> {
    if entries.is_empty() {
        return Err(ScoreError::EmptyCohort);
    }
    let mut by_label: BTreeMap<&str, Vec<&CohortEntry>> = BTreeMap::new();
    for e in entries {
        by_label.entry(e.label.as_str()).or_default().push(e);
    }
    let groups = by_label
        .into_iter()
        .map(|(label, rows)| {
            let action_means: [f64; 7] =
                std::array::from_fn(|a| mean(rows.iter().map(|r| r.actions[a]).collect()));
            let time_mean = mean(rows.iter().map(|r| r.time_score).collect());
            let m = &action_means;
            GroupSummary {
                label: label.to_string(),
                count: rows.len(),
                action_means,
                time_mean,
                sum: m.iter().sum::<f64>() + time_mean,
                movement: m[0] + m[1] + m[4] + m[5],
                object_control: m[2] + m[3] + m[6],
                dexterity: time_mean,
            }
        })
        .collect();
    Ok(CohortReport { groups })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(label: &str, actions: [f64; 7], t: f64) -> CohortEntry {
        CohortEntry {
            label: label.into(),
            actions,
            time_score: t,
        }
    }

    #[test]
    fn empty_rejected() {
        assert_eq!(aggregate_cohort(&[]), Err(ScoreError::EmptyCohort));
    }

    #[test]
    fn single_entry_means_equal_it() {
        let e = entry("g", [2.0, 3.0, 1.0, 2.0, 1.0, 0.0, 2.0], 9.0);
        let r = aggregate_cohort(std::slice::from_ref(&e)).unwrap();
        let g = r.group("g").unwrap();
        assert_eq!(g.action_means, e.actions);
        assert_eq!(g.time_mean, 9.0);
        assert_eq!(g.sum, 20.0);
        assert_eq!(g.movement, 6.0);
        assert_eq!(g.object_control, 5.0);
        assert_eq!(g.dexterity, 9.0);
    }

    #[test]
    fn labels_split_groups() {
        let r = aggregate_cohort(&[
            entry("b", [1.0; 7], 2.0),
            entry("a", [0.0; 7], 4.0),
            entry("b", [0.0; 7], 4.0),
        ])
        .unwrap();
        assert_eq!(r.groups.len(), 2);
        assert_eq!(r.groups[0].label, "a");
        assert_eq!(r.group("b").unwrap().action_means, [0.5; 7]);
        assert_eq!(r.group("b").unwrap().time_mean, 3.0);
    }
}
