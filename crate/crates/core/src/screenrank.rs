//! The drop-then-score pipeline: education gate, per-axis scores,
//! majority-rule aggregation, and the report/ranking types.
//!
//! Filtering uses the education axis only; survivors are scored on four
//! axes (general skills, domain skills, culture, required skills) and
//! ranked by the normalized weighted sum reported as `MRValues`. The
//! category-style majority-rule assignment is also available as
//! [`mr_assign`].

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::culture::{self, CultureGraph, CultureProfile};
use crate::docstore::{DocKind, DocStore, Document};
use crate::embeddings::VectorStore;
use crate::error::{Error, Result};
use crate::graphsim::{self, EditCostModel};
use crate::ontology::Ontology;
use crate::skillgraph::{self, ConceptGraph};
use crate::textkit::TextAnalyzer;

/// Sections feeding the skill-graph axes.
pub const SKILL_SECTIONS: [&str; 2] = ["experience", "skills"];

const DEFAULT_LADDER: &str = include_str!("../data/degree_ladder.csv");

/// Ordered education levels; comparison is the gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeLevel {
    None,
    Secondary,
    Bachelor,
    Master,
    Doctorate,
}

impl fmt::Display for DegreeLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DegreeLevel::None => "none",
            DegreeLevel::Secondary => "secondary",
            DegreeLevel::Bachelor => "bachelor",
            DegreeLevel::Master => "master",
            DegreeLevel::Doctorate => "doctorate",
        };
        f.write_str(s)
    }
}

impl DegreeLevel {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "none" => Some(DegreeLevel::None),
            "secondary" => Some(DegreeLevel::Secondary),
            "bachelor" => Some(DegreeLevel::Bachelor),
            "master" => Some(DegreeLevel::Master),
            "doctorate" => Some(DegreeLevel::Doctorate),
            _ => None,
        }
    }
}

/// Raw degree string -> level equivalence table ("MSc", "master" and
/// "BAC+5" all map to master). Lookup is case-insensitive.
#[derive(Debug, Clone)]
pub struct DegreeLadder {
    map: std::collections::HashMap<String, DegreeLevel>,
}

impl Default for DegreeLadder {
    fn default() -> Self {
        Self::from_csv_str(DEFAULT_LADDER, Path::new("data/degree_ladder.csv"))
            .expect("bundled ladder is valid")
    }
}

impl DegreeLadder {
    pub fn load(path: &Path) -> Result<Self> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_str(&content, path)
    }

    pub fn from_csv_str(content: &str, path: &Path) -> Result<Self> {
        let mut map = std::collections::HashMap::new();
        for (idx, line) in content.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (raw, level) = line.rsplit_once(',').ok_or_else(|| {
                Error::parse(path, idx + 1, "expected `raw degree,level`")
            })?;
            let level = DegreeLevel::parse(level.trim()).ok_or_else(|| {
                Error::parse(path, idx + 1, format!("unknown level `{}`", level.trim()))
            })?;
            map.insert(raw.trim().to_lowercase(), level);
        }
        if map.is_empty() {
            return Err(Error::parse(path, 0, "ladder file is empty"));
        }
        Ok(DegreeLadder { map })
    }

    pub fn lookup(&self, raw: &str) -> Option<DegreeLevel> {
        self.map.get(raw.trim().to_lowercase().as_str()).copied()
    }
}

/// The four per-axis scores, each in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisScores {
    pub skills: f64,
    pub domain_skills: f64,
    pub culture: f64,
    pub required_skills: f64,
}

impl AxisScores {
    pub fn as_array(&self) -> [f64; 4] {
        [
            self.skills,
            self.domain_skills,
            self.culture,
            self.required_skills,
        ]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        AxisScores {
            skills: a[0],
            domain_skills: a[1],
            culture: a[2],
            required_skills: a[3],
        }
    }
}

/// Recruiter interest per axis: integers 0..=3 meaning not / poorly /
/// interested / very interested. At least one axis must be positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterestWeights {
    pub skills: u8,
    pub domain_skills: u8,
    pub culture: u8,
    pub required_skills: u8,
}

impl InterestWeights {
    pub fn new(skills: u8, domain_skills: u8, culture: u8, required_skills: u8) -> Result<Self> {
        let w = InterestWeights {
            skills,
            domain_skills,
            culture,
            required_skills,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let arr = self.as_array();
        if arr.iter().any(|&w| w > 3) {
            return Err(Error::Validation(
                "interest weights must be integers in 0..=3".into(),
            ));
        }
        if arr.iter().all(|&w| w == 0) {
            return Err(Error::AllZeroWeights);
        }
        Ok(())
    }

    /// Parse `skills=2,domain=2,culture=2,required=0`; omitted axes get 0.
    /// `domain_skills` / `required_skills` are accepted as long forms.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut w = InterestWeights {
            skills: 0,
            domain_skills: 0,
            culture: 0,
            required_skills: 0,
        };
        for part in spec.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (axis, value) = part.split_once('=').ok_or_else(|| {
                Error::Validation(format!("weight `{part}` is not of the form axis=int"))
            })?;
            let value: u8 = value.trim().parse().map_err(|_| {
                Error::Validation(format!("weight value `{value}` is not an integer"))
            })?;
            match axis.trim() {
                "skills" => w.skills = value,
                "domain" | "domain_skills" => w.domain_skills = value,
                "culture" => w.culture = value,
                "required" | "required_skills" => w.required_skills = value,
                other => {
                    return Err(Error::Validation(format!("unknown axis `{other}`")));
                }
            }
        }
        w.validate()?;
        Ok(w)
    }

    pub fn as_array(&self) -> [u8; 4] {
        [
            self.skills,
            self.domain_skills,
            self.culture,
            self.required_skills,
        ]
    }

    pub fn total(&self) -> u32 {
        self.as_array().iter().map(|&w| w as u32).sum()
    }
}

/// Education gate result. Unmappable degree strings are flagged, not fatal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GateOutcome {
    Pass { unmapped_degrees: Vec<String> },
    Reject { reason: String, unmapped_degrees: Vec<String> },
}

impl GateOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, GateOutcome::Pass { .. })
    }
}

/// Compare the candidate's best degree level against the job's stated
/// requirement. No stated requirement passes everyone; an unmappable
/// degree string counts as level `none` and is flagged.
pub fn education_gate(cv: &Document, job: &Document, ladder: &DegreeLadder) -> GateOutcome {
    let mut unmapped = Vec::new();
    let mut level_of = |doc: &Document, side: &str| -> DegreeLevel {
        let mut best = DegreeLevel::None;
        for entry in &doc.education {
            match ladder.lookup(&entry.degree_raw) {
                Some(level) => best = best.max(level),
                None => unmapped.push(format!("{side}:{}", entry.degree_raw)),
            }
        }
        best
    };
    let required = if job.education.is_empty() {
        DegreeLevel::None
    } else {
        level_of(job, "job")
    };
    let candidate = level_of(cv, "cv");
    if candidate >= required {
        GateOutcome::Pass {
            unmapped_degrees: unmapped,
        }
    } else {
        GateOutcome::Reject {
            reason: format!(
                "not qualified, reason: education level {candidate} below required {required}"
            ),
            unmapped_degrees: unmapped,
        }
    }
}

/// Required-skill coverage plus the lists the report shows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequiredSkillOutcome {
    pub score: f64,
    pub matched: Vec<String>,
    pub missing: Vec<String>,
}

/// Fraction of the job's required skills whose ontology concept (or an
/// equivalent) appears in the CV's graph; an empty requirement list scores
/// a vacuous 1.0.
pub fn required_skill_score(
    job: &Document,
    cv_graph: &ConceptGraph,
    ontology: &Ontology,
) -> RequiredSkillOutcome {
    if job.required_skills.is_empty() {
        return RequiredSkillOutcome {
            score: 1.0,
            matched: Vec::new(),
            missing: Vec::new(),
        };
    }
    let mut matched = Vec::new();
    let mut missing = Vec::new();
    for skill in &job.required_skills {
        let hit = ontology
            .find_by_label(skill, skillgraph::LABEL_SIMILARITY_THRESHOLD)
            .iter()
            .any(|(concept, _)| cv_graph.contains(ontology.class_rep(&concept.id)));
        if hit {
            matched.push(skill.clone());
        } else {
            missing.push(skill.clone());
        }
    }
    RequiredSkillOutcome {
        score: matched.len() as f64 / job.required_skills.len() as f64,
        matched,
        missing,
    }
}

/// Everything the scorer needs besides the two documents.
pub struct MatchContext<'a> {
    pub general: &'a Ontology,
    pub domain: &'a Ontology,
    pub vectors: &'a VectorStore,
    pub culture: &'a CultureGraph,
    pub ladder: &'a DegreeLadder,
    pub analyzer: &'a TextAnalyzer,
    pub cost_model: EditCostModel,
}

/// Concept-level evidence for one graph axis.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AxisConcepts {
    pub matched: Vec<String>,
    pub cv_only: Vec<String>,
    pub job_only: Vec<String>,
}

fn axis_concepts(cv: &ConceptGraph, job: &ConceptGraph) -> AxisConcepts {
    let cv_ids: BTreeSet<&str> = cv.node_ids().collect();
    let job_ids: BTreeSet<&str> = job.node_ids().collect();
    AxisConcepts {
        matched: cv_ids.intersection(&job_ids).map(|s| s.to_string()).collect(),
        cv_only: cv_ids.difference(&job_ids).map(|s| s.to_string()).collect(),
        job_only: job_ids.difference(&cv_ids).map(|s| s.to_string()).collect(),
    }
}

/// Per-pole comparison of the two culture profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleDelta {
    pub pole: String,
    pub cv: f64,
    pub job: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Explanations {
    pub skills: AxisConcepts,
    pub domain_skills: AxisConcepts,
    pub required_skills: RequiredSkillOutcome,
    pub culture_poles: Vec<PoleDelta>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub culture_note: Option<String>,
}

impl Default for RequiredSkillOutcome {
    fn default() -> Self {
        RequiredSkillOutcome {
            score: 1.0,
            matched: Vec::new(),
            missing: Vec::new(),
        }
    }
}

/// Axis scores plus the evidence behind them.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredAxes {
    pub axes: AxisScores,
    pub explanations: Explanations,
}

fn profile_or_note(
    doc: &Document,
    ctx: &MatchContext<'_>,
) -> std::result::Result<CultureProfile, String> {
    culture::profile(&doc.full_text(), ctx.culture, ctx.vectors, ctx.analyzer)
        .map_err(|e| format!("{}: {e}", doc.id))
}

/// Score all four axes for a gate-surviving CV against a job.
///
/// Graph axes compare per-section concept graphs by normalized edit
/// similarity; the culture axis compares 12-pole profiles over the whole
/// text (an unprofilable side scores 0 and the reason is recorded);
/// required skills are matched within the general-ontology graph.
pub fn score_axes(cv: &Document, job: &Document, ctx: &MatchContext<'_>) -> ScoredAxes {
    let cv_general = skillgraph::extract_sections(
        &cv.sections,
        &SKILL_SECTIONS,
        ctx.general,
        ctx.vectors,
        ctx.analyzer,
    );
    let job_general = skillgraph::extract_sections(
        &job.sections,
        &SKILL_SECTIONS,
        ctx.general,
        ctx.vectors,
        ctx.analyzer,
    );
    let cv_domain = skillgraph::extract_sections(
        &cv.sections,
        &SKILL_SECTIONS,
        ctx.domain,
        ctx.vectors,
        ctx.analyzer,
    );
    let job_domain = skillgraph::extract_sections(
        &job.sections,
        &SKILL_SECTIONS,
        ctx.domain,
        ctx.vectors,
        ctx.analyzer,
    );

    let skills = graphsim::similarity(
        &cv_general.to_sim_graph(),
        &job_general.to_sim_graph(),
        &ctx.cost_model,
    )
    .similarity;
    let domain_skills = graphsim::similarity(
        &cv_domain.to_sim_graph(),
        &job_domain.to_sim_graph(),
        &ctx.cost_model,
    )
    .similarity;

    let mut culture_note = None;
    let mut culture_poles = Vec::new();
    let culture_score = match (profile_or_note(cv, ctx), profile_or_note(job, ctx)) {
        (Ok(cv_profile), Ok(job_profile)) => {
            let names = ctx.culture.pole_names();
            culture_poles = names
                .iter()
                .enumerate()
                .map(|(i, name)| PoleDelta {
                    pole: name.to_string(),
                    cv: cv_profile.pole_values[i],
                    job: job_profile.pole_values[i],
                    delta: cv_profile.pole_values[i] - job_profile.pole_values[i],
                })
                .collect();
            culture::culture_match(&cv_profile, &job_profile).unwrap_or(0.0)
        }
        (cv_res, job_res) => {
            let mut notes = Vec::new();
            if let Err(n) = cv_res {
                notes.push(n);
            }
            if let Err(n) = job_res {
                notes.push(n);
            }
            culture_note = Some(format!("culture unprofiled ({})", notes.join("; ")));
            0.0
        }
    };

    let required = required_skill_score(job, &cv_general, ctx.general);

    ScoredAxes {
        axes: AxisScores {
            skills,
            domain_skills,
            culture: culture_score,
            required_skills: required.score,
        },
        explanations: Explanations {
            skills: axis_concepts(&cv_general, &job_general),
            domain_skills: axis_concepts(&cv_domain, &job_domain),
            required_skills: required,
            culture_poles,
            culture_note,
        },
    }
}

/// Normalized weighted sum `sum((w_i / sum(w)) * axis_i)`; the continuous
/// value reported as `MRValues`.
///
/// Normalizing each weight first makes scaling all weights by one integer
/// a bit-exact no-op: `(k*w_i) / (k*total)` is the same division of exact
/// integers.
pub fn mr_aggregate(axes: &AxisScores, weights: &InterestWeights) -> Result<f64> {
    let total = weights.total();
    if total == 0 {
        return Err(Error::AllZeroWeights);
    }
    let total = total as f64;
    Ok(axes
        .as_array()
        .iter()
        .zip(weights.as_array())
        .map(|(axis, w)| (w as f64 / total) * axis)
        .sum())
}

/// Majority-rule category assignment.
///
/// `profiles` are category boundary vectors, strictly ascending per axis;
/// the result is the highest boundary index + 1 such that the weights of
/// axes meeting the boundary reach `lambda` (0 when no boundary is met).
/// Coalition weight is compared as integer weight sums against
/// `lambda * total`, all in f64.
pub fn mr_assign(
    axes: &AxisScores,
    weights: &InterestWeights,
    profiles: &[[f64; 4]],
    lambda: f64,
) -> Result<usize> {
    if weights.total() == 0 {
        return Err(Error::AllZeroWeights);
    }
    if !(0.5..=1.0).contains(&lambda) {
        return Err(Error::Validation(format!(
            "lambda must be in [0.5, 1], got {lambda}"
        )));
    }
    if profiles.is_empty() {
        return Err(Error::Validation("at least one profile is required".into()));
    }
    for pair in profiles.windows(2) {
        for axis in 0..4 {
            if pair[1][axis] <= pair[0][axis] {
                return Err(Error::Validation(
                    "profiles must be strictly ascending per axis".into(),
                ));
            }
        }
    }
    let total = weights.total() as f64;
    let values = axes.as_array();
    let w = weights.as_array();
    for (h, profile) in profiles.iter().enumerate().rev() {
        let coalition: u32 = (0..4)
            .filter(|&i| values[i] >= profile[i])
            .map(|i| w[i] as u32)
            .sum();
        if coalition as f64 >= lambda * total {
            return Ok(h + 1);
        }
    }
    Ok(0)
}

/// Default category boundary: 0.5 on every axis, majority 0.6.
pub const DEFAULT_PROFILE: [f64; 4] = [0.5, 0.5, 0.5, 0.5];
pub const DEFAULT_LAMBDA: f64 = 0.6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    RejectedEducation,
    Scored,
}

/// One-to-one match result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub cv_id: String,
    pub job_id: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rejection_reason: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub unmapped_degrees: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axes: Option<AxisScores>,
    /// The MRValues aggregate; absent on rejected candidates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aggregate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub explanations: Option<Explanations>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub cv_id: String,
    pub axes: AxisScores,
    pub aggregate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub cv_id: String,
    pub reason: String,
}

/// Many-to-one ranking: survivors sorted by aggregate descending (ties by
/// cv id), rejected candidates listed separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    pub job_id: String,
    pub weights: InterestWeights,
    pub ranking: Vec<RankedEntry>,
    pub rejected: Vec<Rejection>,
}

pub fn match_one(
    store: &DocStore,
    ctx: &MatchContext<'_>,
    cv_id: &str,
    job_id: &str,
    weights: &InterestWeights,
    explain: bool,
) -> Result<MatchReport> {
    let cv = store.get(cv_id)?;
    let job = store.get(job_id)?;
    expect_kind(&cv, DocKind::Cv)?;
    expect_kind(&job, DocKind::JobPost)?;
    Ok(match_documents(&cv, &job, ctx, weights, explain)?)
}

fn expect_kind(doc: &Document, kind: DocKind) -> Result<()> {
    if doc.kind != kind {
        return Err(Error::Validation(format!(
            "document `{}` has the wrong kind for this role",
            doc.id
        )));
    }
    Ok(())
}

pub fn match_documents(
    cv: &Document,
    job: &Document,
    ctx: &MatchContext<'_>,
    weights: &InterestWeights,
    explain: bool,
) -> Result<MatchReport> {
    weights.validate()?;
    match education_gate(cv, job, ctx.ladder) {
        GateOutcome::Reject {
            reason,
            unmapped_degrees,
        } => Ok(MatchReport {
            cv_id: cv.id.clone(),
            job_id: job.id.clone(),
            verdict: Verdict::RejectedEducation,
            rejection_reason: Some(reason),
            unmapped_degrees,
            axes: None,
            aggregate: None,
            explanations: None,
        }),
        GateOutcome::Pass { unmapped_degrees } => {
            let scored = score_axes(cv, job, ctx);
            let aggregate = mr_aggregate(&scored.axes, weights)?;
            Ok(MatchReport {
                cv_id: cv.id.clone(),
                job_id: job.id.clone(),
                verdict: Verdict::Scored,
                rejection_reason: None,
                unmapped_degrees,
                axes: Some(scored.axes),
                aggregate: Some(aggregate),
                explanations: explain.then_some(scored.explanations),
            })
        }
    }
}

/// Filter on education, score survivors (in parallel), rank.
pub fn match_many(
    store: &DocStore,
    ctx: &MatchContext<'_>,
    cv_ids: &[String],
    job_id: &str,
    weights: &InterestWeights,
) -> Result<RankedList> {
    weights.validate()?;
    let job = store.get(job_id)?;
    expect_kind(&job, DocKind::JobPost)?;
    let cvs: Vec<Document> = cv_ids
        .iter()
        .map(|id| {
            let doc = store.get(id)?;
            expect_kind(&doc, DocKind::Cv)?;
            Ok(doc)
        })
        .collect::<Result<_>>()?;

    let mut rejected = Vec::new();
    let mut survivors = Vec::new();
    for cv in cvs {
        match education_gate(&cv, &job, ctx.ladder) {
            GateOutcome::Reject { reason, .. } => rejected.push(Rejection {
                cv_id: cv.id.clone(),
                reason,
            }),
            GateOutcome::Pass { .. } => survivors.push(cv),
        }
    }

    let mut ranking: Vec<RankedEntry> = survivors
        .par_iter()
        .map(|cv| {
            let scored = score_axes(cv, &job, ctx);
            let aggregate = mr_aggregate(&scored.axes, weights)?;
            Ok(RankedEntry {
                cv_id: cv.id.clone(),
                axes: scored.axes,
                aggregate,
            })
        })
        .collect::<Result<_>>()?;
    sort_ranking(&mut ranking);

    Ok(RankedList {
        job_id: job_id.to_string(),
        weights: *weights,
        ranking,
        rejected,
    })
}

/// Aggregate descending, ties by cv id ascending.
pub fn sort_ranking(entries: &mut [RankedEntry]) {
    entries.sort_by(|a, b| {
        b.aggregate
            .total_cmp(&a.aggregate)
            .then_with(|| a.cv_id.cmp(&b.cv_id))
    });
}

impl RankedList {
    /// CSV mirror of the ranking table: one row per survivor with the four
    /// axis columns and MRValues, rejected candidates appended with the
    /// reason in the note column.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "ID,DomainSkillsMatch,SkillsMatch,CultureMatch,RequiredSkillsMatch,MRValues,Note\n",
        );
        for e in &self.ranking {
            out.push_str(&format!(
                "{},{:.3},{:.3},{:.3},{:.3},{:.3},\n",
                e.cv_id,
                e.axes.domain_skills,
                e.axes.skills,
                e.axes.culture,
                e.axes.required_skills,
                e.aggregate
            ));
        }
        for r in &self.rejected {
            out.push_str(&format!("{},,,,,,{}\n", r.cv_id, csv_escape(&r.reason)));
        }
        out
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
