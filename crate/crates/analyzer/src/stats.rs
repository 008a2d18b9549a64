use std::collections::BTreeMap;

use codetrail_core::SurveyInfo;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;

/// Distribution of participant measures. A participant is a distinct user id;
/// their survey is taken from their most recent submission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ParticipantStats {
    pub participants: usize,
    pub submissions: usize,
    pub mean_age: Option<f64>,
    pub min_age: Option<i32>,
    pub max_age: Option<i32>,
    pub age: BTreeMap<i32, usize>,
    pub experience: BTreeMap<String, usize>,
    pub country: BTreeMap<String, usize>,
    pub gender: BTreeMap<String, usize>,
    /// Participants per programming language; someone using two languages
    /// counts once in each.
    pub language: BTreeMap<String, usize>,
    pub corrupt_submissions: Vec<String>,
}

pub fn participant_stats(dataset: &Dataset) -> ParticipantStats {
    let mut latest: BTreeMap<&str, (i64, &SurveyInfo)> = BTreeMap::new();
    let mut languages: BTreeMap<&str, std::collections::BTreeSet<&str>> = BTreeMap::new();
    for s in &dataset.submissions {
        let user = s.session.user_id.as_str();
        let entry = latest.entry(user).or_insert((s.received_at_millis, &s.session.survey));
        if s.received_at_millis >= entry.0 {
            *entry = (s.received_at_millis, &s.session.survey);
        }
        languages
            .entry(s.session.language.as_str())
            .or_default()
            .insert(user);
    }

    let mut stats = ParticipantStats {
        participants: latest.len(),
        submissions: dataset.submissions.len(),
        mean_age: None,
        min_age: None,
        max_age: None,
        age: BTreeMap::new(),
        experience: BTreeMap::new(),
        country: BTreeMap::new(),
        gender: BTreeMap::new(),
        language: languages
            .into_iter()
            .map(|(lang, users)| (lang.to_string(), users.len()))
            .collect(),
        corrupt_submissions: dataset
            .corrupt
            .iter()
            .map(|c| c.to_string())
            .collect(),
    };
    for (_, survey) in latest.values() {
        *stats.age.entry(survey.age).or_default() += 1;
        *stats.experience.entry(survey.experience.to_string()).or_default() += 1;
        *stats.country.entry(survey.country.clone()).or_default() += 1;
        *stats.gender.entry(survey.gender.clone()).or_default() += 1;
    }
    if !latest.is_empty() {
        let total: i64 = latest.values().map(|(_, s)| s.age as i64).sum();
        stats.mean_age = Some(total as f64 / latest.len() as f64);
        stats.min_age = stats.age.keys().next().copied();
        stats.max_age = stats.age.keys().next_back().copied();
    }
    stats
}
