//! Entailment datasets, phrase composition per model, and AUC reports.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::composition::{compose_elementwise, ElementwiseOp};
use crate::error::{Error, Result};
use crate::measures::{Measure, MeasureConfig};
use crate::tensor::{
    compose_copy_object, compose_copy_subject, compose_frobenius_additive, compose_frobenius_multiplicative,
    compose_least_squares, compose_projective_sv, compose_projective_svo, compose_projective_vo,
    compose_relational_sv, compose_relational_svo, compose_relational_vo, ArgumentSlot, VerbStore,
};
use crate::vector::{l1_normalize, DistVector, VectorSpace};

/// Word order of a phrase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pattern {
    /// subject verb
    Sv,
    /// verb object
    Vo,
    /// subject verb object
    Svo,
}

impl Pattern {
    pub fn name(self) -> &'static str {
        match self {
            Pattern::Sv => "sv",
            Pattern::Vo => "vo",
            Pattern::Svo => "svo",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Pattern::Sv | Pattern::Vo => 2,
            Pattern::Svo => 3,
        }
    }

    fn verb_index(self) -> usize {
        match self {
            Pattern::Vo => 0,
            Pattern::Sv | Pattern::Svo => 1,
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sv" => Ok(Pattern::Sv),
            "vo" => Ok(Pattern::Vo),
            "svo" => Ok(Pattern::Svo),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntailmentPair {
    pub left: Vec<String>,
    pub right: Vec<String>,
    pub entails: bool,
    /// One-based line in the dataset file.
    pub line: usize,
}

/// Parses `left words<TAB>right words<TAB>1|0` lines.
pub fn parse_dataset<R: BufRead>(input: R, pattern: Pattern) -> Result<Vec<EntailmentPair>> {
    let mut pairs = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        let n = n + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [left, right, label] = fields.as_slice() else {
            return Err(Error::parse(n, "expected `left<TAB>right<TAB>label`"));
        };
        let words = |s: &str| -> Vec<String> { s.split_whitespace().map(str::to_lowercase).collect() };
        let (left, right) = (words(left), words(right));
        for side in [&left, &right] {
            if side.len() != pattern.arity() {
                return Err(Error::parse(
                    n,
                    format!("`{}` has {} words, {pattern} needs {}", side.join(" "), side.len(), pattern.arity()),
                ));
            }
        }
        let entails = match label.trim() {
            "1" => true,
            "0" => false,
            other => return Err(Error::parse(n, format!("label must be 1 or 0, got `{other}`"))),
        };
        pairs.push(EntailmentPair {
            left,
            right,
            entails,
            line: n,
        });
    }
    Ok(pairs)
}

pub fn load_dataset(path: &Path, pattern: Pattern) -> Result<Vec<EntailmentPair>> {
    parse_dataset(BufReader::new(File::open(path)?), pattern)
}

/// A way of turning a phrase into a single vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    Elementwise(ElementwiseOp),
    /// The head verb's vector (its relational matrix for transitive phrases).
    VerbOnly,
    Relational,
    CopySubject,
    CopyObject,
    FrobeniusAdd,
    FrobeniusMul,
    Projective,
    LeastSquares,
}

impl Model {
    pub const ALL: [Model; 12] = [
        Model::Elementwise(ElementwiseOp::Add),
        Model::Elementwise(ElementwiseOp::Mul),
        Model::Elementwise(ElementwiseOp::Min),
        Model::Elementwise(ElementwiseOp::Max),
        Model::VerbOnly,
        Model::Relational,
        Model::CopySubject,
        Model::CopyObject,
        Model::FrobeniusAdd,
        Model::FrobeniusMul,
        Model::Projective,
        Model::LeastSquares,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Model::Elementwise(op) => op.name(),
            Model::VerbOnly => "verb-only",
            Model::Relational => "relational",
            Model::CopySubject => "copy-subject",
            Model::CopyObject => "copy-object",
            Model::FrobeniusAdd => "frobenius-add",
            Model::FrobeniusMul => "frobenius-mul",
            Model::Projective => "projective",
            Model::LeastSquares => "least-squares",
        }
    }

    /// Whether the model reads verb tensors for phrases of `pattern`.
    pub fn needs_verbs(self, pattern: Pattern) -> bool {
        match self {
            Model::Elementwise(_) => false,
            Model::VerbOnly => pattern == Pattern::Svo,
            _ => true,
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Model::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

/// Why a pair was left out of a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "detail", rename_all = "kebab-case")]
pub enum SkipReason {
    UnknownWord(String),
    MissingTensor(String),
    Unsupported(String),
    Composition(String),
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SkipReason::UnknownWord(w) => write!(f, "unknown word `{w}`"),
            SkipReason::MissingTensor(v) => write!(f, "no tensor for verb `{v}`"),
            SkipReason::Unsupported(m) => write!(f, "unsupported: {m}"),
            SkipReason::Composition(e) => write!(f, "composition failed: {e}"),
        }
    }
}

fn lookup<'a>(space: &'a VectorSpace, word: &str) -> std::result::Result<&'a DistVector, SkipReason> {
    space.get(word).ok_or_else(|| SkipReason::UnknownWord(word.to_string()))
}

/// Composes one phrase with `model`. The result is not normalized.
pub fn compose_phrase(
    words: &[String],
    pattern: Pattern,
    model: Model,
    space: &VectorSpace,
    verbs: Option<&VerbStore>,
) -> std::result::Result<DistVector, SkipReason> {
    if words.len() != pattern.arity() {
        return Err(SkipReason::Unsupported(format!("{} words for pattern {pattern}", words.len())));
    }
    let vectors = words
        .iter()
        .map(|w| lookup(space, w))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let verb = words[pattern.verb_index()].as_str();
    let failed = |e: Error| SkipReason::Composition(e.to_string());

    if let Model::Elementwise(op) = model {
        return compose_elementwise(op, &vectors).map_err(failed);
    }
    if model == Model::VerbOnly && pattern != Pattern::Svo {
        return Ok(vectors[pattern.verb_index()].clone());
    }
    let store = verbs.ok_or_else(|| SkipReason::MissingTensor(verb.to_string()))?;
    if model == Model::LeastSquares {
        let (slot, arg) = match pattern {
            Pattern::Sv => (ArgumentSlot::Subject, vectors[0]),
            Pattern::Vo => (ArgumentSlot::Object, vectors[1]),
            Pattern::Svo => return Err(SkipReason::Unsupported("least-squares on svo".into())),
        };
        let m = store
            .least_squares(verb, slot)
            .ok_or_else(|| SkipReason::MissingTensor(verb.to_string()))?;
        return compose_least_squares(m, arg).map_err(failed);
    }
    let t = store.tensor(verb).ok_or_else(|| SkipReason::MissingTensor(verb.to_string()))?;
    let composed = match (pattern, model) {
        (Pattern::Svo, Model::VerbOnly) => t.relational_matrix().map(|m| m.flatten()),
        (Pattern::Sv, Model::Projective) => compose_projective_sv(t, vectors[0]),
        (Pattern::Vo, Model::Projective) => compose_projective_vo(t, vectors[1]),
        // Frobenius variants coincide with the relational model on two-word phrases
        (Pattern::Sv, _) => compose_relational_sv(t, vectors[0]),
        (Pattern::Vo, _) => compose_relational_vo(t, vectors[1]),
        (Pattern::Svo, m) => {
            let (s, o) = (vectors[0], vectors[2]);
            match m {
                Model::Relational => compose_relational_svo(t, s, o).map(|m| m.flatten()),
                Model::CopySubject => compose_copy_subject(t, s, o),
                Model::CopyObject => compose_copy_object(t, s, o),
                Model::FrobeniusAdd => compose_frobenius_additive(t, s, o),
                Model::FrobeniusMul => compose_frobenius_multiplicative(t, s, o),
                Model::Projective => compose_projective_svo(t, s, o),
                Model::Elementwise(_) | Model::VerbOnly | Model::LeastSquares => unreachable!("handled above"),
            }
        }
    };
    composed.map_err(failed)
}

/// L1-normalizes a composite, leaving an all-zero vector as it is.
pub fn normalize_composite(v: DistVector) -> DistVector {
    l1_normalize(&v).unwrap_or(v)
}

/// Evaluation settings shared by every pair.
#[derive(Debug, Clone, Copy)]
pub struct ScoringContext<'a> {
    pub pattern: Pattern,
    pub space: &'a VectorSpace,
    pub verbs: Option<&'a VerbStore>,
    pub config: MeasureConfig,
}

/// Composes both sides, L1-normalizes them and applies `measure`, oriented
/// so that larger scores mean stronger entailment from left to right.
pub fn score_pair(
    pair: &EntailmentPair,
    model: Model,
    measure: Measure,
    ctx: &ScoringContext<'_>,
) -> std::result::Result<f64, SkipReason> {
    let (left, right) = compose_pair(pair, model, ctx)?;
    score_composites(&left, &right, measure, &ctx.config)
}

fn compose_pair(
    pair: &EntailmentPair,
    model: Model,
    ctx: &ScoringContext<'_>,
) -> std::result::Result<(DistVector, DistVector), SkipReason> {
    let left = compose_phrase(&pair.left, ctx.pattern, model, ctx.space, ctx.verbs)?;
    let right = compose_phrase(&pair.right, ctx.pattern, model, ctx.space, ctx.verbs)?;
    Ok((normalize_composite(left), normalize_composite(right)))
}

fn score_composites(
    left: &DistVector,
    right: &DistVector,
    measure: Measure,
    config: &MeasureConfig,
) -> std::result::Result<f64, SkipReason> {
    measure
        .entailment_score(left, right, config)
        .map_err(|e| SkipReason::Composition(e.to_string()))
}

/// Mann-Whitney AUC: the fraction of (positive, negative) pairs ranked
/// correctly, ties counting one half.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::Shape(format!("{} scores but {} labels", scores.len(), labels.len())));
    }
    if let Some((index, &value)) = scores.iter().enumerate().find(|(_, s)| !s.is_finite()) {
        return Err(Error::InvalidWeight { index, value });
    }
    let positives = labels.iter().filter(|l| **l).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::DegenerateLabels);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // sum of (doubled) mid-ranks of the positives, kept integral
    let mut doubled_rank_sum: u64 = 0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        let doubled_mid = (start + 1 + end) as u64;
        let pos_in_group = order[start..end].iter().filter(|&&i| labels[i]).count() as u64;
        doubled_rank_sum += doubled_mid * pos_in_group;
        start = end;
    }
    let p = positives as u64;
    let doubled_u = doubled_rank_sum - p * (p + 1);
    Ok(doubled_u as f64 / 2.0 / (positives as f64 * negatives as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairScore {
    pub line: usize,
    pub entails: bool,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedPair {
    pub line: usize,
    pub reason: SkipReason,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub dataset: String,
    pub model: String,
    pub measure: String,
    pub auc: f64,
    pub n_scored: usize,
    pub n_skipped: usize,
    pub scores: Vec<PairScore>,
    pub skipped: Vec<SkippedPair>,
}

/// Scores every pair under every (model, measure) combination. Each
/// phrase is composed once per model.
pub fn run_experiment(
    dataset: &str,
    pairs: &[EntailmentPair],
    models: &[Model],
    measures: &[Measure],
    ctx: &ScoringContext<'_>,
) -> Result<Vec<ExperimentReport>> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    ctx.config.validate()?;
    let mut reports = Vec::with_capacity(models.len() * measures.len());
    for &model in models {
        let composed: Vec<_> = pairs.par_iter().map(|p| compose_pair(p, model, ctx)).collect();
        for &measure in measures {
            let outcomes: Vec<std::result::Result<f64, SkipReason>> = composed
                .par_iter()
                .map(|c| match c {
                    Ok((l, r)) => score_composites(l, r, measure, &ctx.config),
                    Err(reason) => Err(reason.clone()),
                })
                .collect();
            let mut scores = Vec::new();
            let mut skipped = Vec::new();
            for (pair, outcome) in pairs.iter().zip(outcomes) {
                match outcome {
                    Ok(score) => scores.push(PairScore {
                        line: pair.line,
                        entails: pair.entails,
                        score,
                    }),
                    Err(reason) => skipped.push(SkippedPair { line: pair.line, reason }),
                }
            }
            let values: Vec<f64> = scores.iter().map(|s| s.score).collect();
            let labels: Vec<bool> = scores.iter().map(|s| s.entails).collect();
            let auc = auc(&values, &labels)?;
            reports.push(ExperimentReport {
                dataset: dataset.to_string(),
                model: model.name().to_string(),
                measure: measure.name().to_string(),
                auc,
                n_scored: scores.len(),
                n_skipped: skipped.len(),
                scores,
                skipped,
            });
        }
    }
    Ok(reports)
}

#[derive(Debug, Serialize)]
struct ReportEntry<'a> {
    auc: f64,
    n_scored: usize,
    n_skipped: usize,
    skipped: &'a [SkippedPair],
}

/// JSON document keyed by dataset, then model, then measure.
pub fn reports_to_json(reports: &[ExperimentReport]) -> Result<String> {
    let mut doc: BTreeMap<&str, BTreeMap<&str, BTreeMap<&str, ReportEntry<'_>>>> = BTreeMap::new();
    for r in reports {
        doc.entry(&r.dataset).or_default().entry(&r.model).or_default().insert(
            &r.measure,
            ReportEntry {
                auc: r.auc,
                n_scored: r.n_scored,
                n_skipped: r.n_skipped,
                skipped: &r.skipped,
            },
        );
    }
    serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.into()))
}

/// Per-pair scores as `dataset model measure line label score` rows.
pub fn write_scores_tsv<W: Write>(reports: &[ExperimentReport], mut out: W) -> Result<()> {
    writeln!(out, "dataset\tmodel\tmeasure\tline\tlabel\tscore")?;
    for r in reports {
        for s in &r.scores {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}",
                r.dataset,
                r.model,
                r.measure,
                s.line,
                u8::from(s.entails),
                s.score
            )?;
        }
    }
    out.flush()?;
    Ok(())
}
