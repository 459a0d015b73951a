//! Corpus pipeline: windowed co-occurrence counting, PPMI weighting,
//! dimension selection, verb-argument triples and holistic phrase vectors.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::vector::{DistVector, VectorSpace, Vocabulary};

/// Lowercases and splits on runs of non-alphanumeric characters.
pub fn tokenize(line: &str) -> Vec<String> {
    line.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Half-width of the context window, in tokens.
    pub window: usize,
    pub dims: usize,
    pub min_word_count: u64,
    pub epsilon: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            window: 5,
            dims: 300,
            min_word_count: 1,
            epsilon: 1e-8,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window < 1 {
            return Err(Error::InvalidConfig("window must be at least 1".into()));
        }
        if self.dims < 1 {
            return Err(Error::InvalidConfig("dims must be at least 1".into()));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::InvalidConfig("epsilon must be positive".into()));
        }
        Ok(())
    }
}

type CountMap = HashMap<(u32, u32), u64>;

/// Sparse co-occurrence counts keyed by (target token, context token).
///
/// Targets and contexts share one token table, so with symmetric windows
/// `count(a, b) == count(b, a)`.
#[derive(Debug, Clone, Default)]
pub struct CooccurrenceMatrix {
    tokens: Vec<String>,
    token_index: HashMap<String, u32>,
    frequencies: Vec<u64>,
    counts: CountMap,
    word_totals: Vec<u64>,
    context_totals: Vec<u64>,
    grand_total: u64,
}

impl CooccurrenceMatrix {
    fn intern(&mut self, token: &str) -> u32 {
        if let Some(&id) = self.token_index.get(token) {
            return id;
        }
        let id = self.tokens.len() as u32;
        self.tokens.push(token.to_string());
        self.token_index.insert(token.to_string(), id);
        self.frequencies.push(0);
        self.word_totals.push(0);
        self.context_totals.push(0);
        id
    }

    /// Tokenizes and counts a batch of lines. Lines are counted in parallel
    /// shards whose partial maps are merged afterwards.
    pub fn add_lines<S: AsRef<str> + Sync>(&mut self, lines: &[S], window: usize) {
        let encoded: Vec<Vec<u32>> = lines
            .iter()
            .map(|line| {
                tokenize(line.as_ref())
                    .iter()
                    .map(|t| self.intern(t))
                    .collect()
            })
            .collect();
        for line in &encoded {
            for &t in line {
                self.frequencies[t as usize] += 1;
            }
        }
        let partial = encoded
            .par_chunks(256)
            .map(|chunk| {
                let mut local = CountMap::new();
                for line in chunk {
                    count_line(line, window, &mut local);
                }
                local
            })
            .reduce(CountMap::new, merge_counts);
        for ((w, c), n) in partial {
            *self.counts.entry((w, c)).or_insert(0) += n;
            self.word_totals[w as usize] += n;
            self.context_totals[c as usize] += n;
            self.grand_total += n;
        }
    }

    pub fn token_count(&self) -> usize {
        self.tokens.len()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn token_id(&self, token: &str) -> Option<u32> {
        self.token_index.get(token).copied()
    }

    /// Number of times `token` occurred in the corpus.
    pub fn frequency(&self, token: &str) -> u64 {
        self.token_id(token).map_or(0, |i| self.frequencies[i as usize])
    }

    pub fn count(&self, word: &str, context: &str) -> u64 {
        match (self.token_id(word), self.token_id(context)) {
            (Some(w), Some(c)) => self.counts.get(&(w, c)).copied().unwrap_or(0),
            _ => 0,
        }
    }

    pub fn word_total(&self, word: &str) -> u64 {
        self.token_id(word).map_or(0, |i| self.word_totals[i as usize])
    }

    pub fn context_total(&self, context: &str) -> u64 {
        self.token_id(context).map_or(0, |i| self.context_totals[i as usize])
    }

    pub fn grand_total(&self) -> u64 {
        self.grand_total
    }

    /// Iterates non-zero cells as `(word, context, count)`.
    pub fn cells(&self) -> impl Iterator<Item = (&str, &str, u64)> {
        self.counts.iter().map(|(&(w, c), &n)| {
            (
                self.tokens[w as usize].as_str(),
                self.tokens[c as usize].as_str(),
                n,
            )
        })
    }

    /// Vocabulary of every token seen at least `min_word_count` times, over
    /// the `dims` most frequent contexts.
    pub fn vocabulary(&self, dims: usize, min_word_count: u64) -> Result<Vocabulary> {
        let mut contexts: Vec<u32> = (0..self.tokens.len() as u32)
            .filter(|&c| self.context_totals[c as usize] > 0)
            .collect();
        if contexts.len() < dims {
            return Err(Error::InsufficientContexts {
                available: contexts.len(),
                requested: dims,
            });
        }
        contexts.sort_by(|&a, &b| {
            self.context_totals[b as usize]
                .cmp(&self.context_totals[a as usize])
                .then_with(|| self.tokens[a as usize].cmp(&self.tokens[b as usize]))
        });
        let dim_words = contexts[..dims]
            .iter()
            .map(|&c| self.tokens[c as usize].clone())
            .collect();
        let mut words: Vec<String> = self
            .tokens
            .iter()
            .zip(&self.frequencies)
            .filter(|(_, &f)| f >= min_word_count.max(1))
            .map(|(t, _)| t.clone())
            .collect();
        words.sort();
        Vocabulary::new(words, dim_words)
    }
}

fn count_line(line: &[u32], window: usize, counts: &mut CountMap) {
    for (i, &w) in line.iter().enumerate() {
        let lo = i.saturating_sub(window);
        let hi = (i + window).min(line.len() - 1);
        for (j, &c) in line.iter().enumerate().take(hi + 1).skip(lo) {
            if j != i {
                *counts.entry((w, c)).or_insert(0) += 1;
            }
        }
    }
}

fn merge_counts(mut a: CountMap, b: CountMap) -> CountMap {
    if a.len() < b.len() {
        return merge_counts(b, a);
    }
    for (k, n) in b {
        *a.entry(k).or_insert(0) += n;
    }
    a
}

const BATCH_LINES: usize = 16_384;

/// Counts symmetric window co-occurrences over a line-oriented corpus.
/// Windows never cross line boundaries.
pub fn count_cooccurrences<I, S>(lines: I, config: &PipelineConfig) -> Result<CooccurrenceMatrix>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str> + Sync,
{
    config.validate()?;
    let mut matrix = CooccurrenceMatrix::default();
    let mut batch = Vec::with_capacity(BATCH_LINES);
    for line in lines {
        batch.push(line);
        if batch.len() == BATCH_LINES {
            matrix.add_lines(&batch, config.window);
            batch.clear();
        }
    }
    matrix.add_lines(&batch, config.window);
    if matrix.frequencies.iter().all(|&f| f == 0) {
        return Err(Error::EmptyCorpus);
    }
    Ok(matrix)
}

/// Reads and counts a corpus file, one sentence per line.
pub fn count_file(path: &Path, config: &PipelineConfig) -> Result<CooccurrenceMatrix> {
    config.validate()?;
    let reader = BufReader::new(File::open(path)?);
    let mut matrix = CooccurrenceMatrix::default();
    let mut batch = Vec::with_capacity(BATCH_LINES);
    for line in reader.lines() {
        batch.push(line?);
        if batch.len() == BATCH_LINES {
            matrix.add_lines(&batch, config.window);
            batch.clear();
        }
    }
    matrix.add_lines(&batch, config.window);
    if matrix.frequencies.iter().all(|&f| f == 0) {
        return Err(Error::EmptyCorpus);
    }
    Ok(matrix)
}

/// The `dims` context words with the highest totals, ties lexicographic.
pub fn select_dimensions(m: &CooccurrenceMatrix, dims: usize) -> Result<Vocabulary> {
    m.vocabulary(dims, 1)
}

fn pmi_weight(count: u64, grand: u64, row_total: u64, col_total: u64) -> f64 {
    if count == 0 || row_total == 0 || col_total == 0 {
        return 0.0;
    }
    let pmi = ((count as f64) * (grand as f64) / ((row_total as f64) * (col_total as f64))).ln();
    pmi.max(0.0)
}

/// PPMI vectors for every word of `vocab`, using the marginals of `m`.
pub fn ppmi_transform(m: &CooccurrenceMatrix, vocab: &Vocabulary) -> Result<VectorSpace> {
    if m.grand_total == 0 {
        return Err(Error::EmptyCorpus);
    }
    let dim_ids: Vec<Option<u32>> = vocab.dims().iter().map(|d| m.token_id(d)).collect();
    let vectors = vocab
        .words()
        .par_iter()
        .map(|word| {
            let Some(w) = m.token_id(word) else {
                return DistVector::zeros(dim_ids.len());
            };
            let row_total = m.word_totals[w as usize];
            let weights = dim_ids
                .iter()
                .map(|c| match c {
                    Some(c) => pmi_weight(
                        m.counts.get(&(w, *c)).copied().unwrap_or(0),
                        m.grand_total,
                        row_total,
                        m.context_totals[*c as usize],
                    ),
                    None => 0.0,
                })
                .collect();
            DistVector::from_nonneg(weights)
        })
        .collect();
    VectorSpace::new(vocab.clone(), vectors)
}

/// Counts, selects dimensions and applies PPMI in one pass.
pub fn build_space<I, S>(lines: I, config: &PipelineConfig) -> Result<(VectorSpace, CooccurrenceMatrix)>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str> + Sync,
{
    let matrix = count_cooccurrences(lines, config)?;
    let vocab = matrix.vocabulary(config.dims, config.min_word_count)?;
    let space = ppmi_transform(&matrix, &vocab)?;
    Ok((space, matrix))
}

/// One observed use of a verb; at least one argument is present.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ArgumentOccurrence {
    pub subject: Option<String>,
    pub object: Option<String>,
}

/// Per-verb argument occurrences, kept with multiplicity.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerbArgumentTable {
    verbs: BTreeMap<String, Vec<ArgumentOccurrence>>,
    dropped: usize,
}

const ABSENT: &str = "_";

impl VerbArgumentTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an occurrence; returns false (and counts a drop) when both
    /// arguments are absent.
    pub fn push(&mut self, verb: &str, subject: Option<&str>, object: Option<&str>) -> bool {
        if subject.is_none() && object.is_none() {
            self.dropped += 1;
            return false;
        }
        self.verbs
            .entry(verb.to_string())
            .or_default()
            .push(ArgumentOccurrence {
                subject: subject.map(str::to_string),
                object: object.map(str::to_string),
            });
        true
    }

    pub fn occurrences(&self, verb: &str) -> Option<&[ArgumentOccurrence]> {
        self.verbs.get(verb).map(Vec::as_slice)
    }

    pub fn verbs(&self) -> impl Iterator<Item = (&str, &[ArgumentOccurrence])> {
        self.verbs.iter().map(|(v, o)| (v.as_str(), o.as_slice()))
    }

    /// Number of distinct verbs.
    pub fn len(&self) -> usize {
        self.verbs.len()
    }

    pub fn occurrence_count(&self) -> usize {
        self.verbs.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.verbs.is_empty()
    }

    /// Lines or occurrences discarded so far.
    pub fn dropped(&self) -> usize {
        self.dropped
    }

    /// Keeps only occurrences whose present arguments all have vectors in
    /// `space`; discarded occurrences add to the drop count.
    pub fn restrict_to(&self, space: &VectorSpace) -> VerbArgumentTable {
        let known = |w: &Option<String>| w.as_ref().is_none_or(|w| space.get(w).is_some());
        let mut out = VerbArgumentTable {
            verbs: BTreeMap::new(),
            dropped: self.dropped,
        };
        for (verb, occs) in &self.verbs {
            let kept: Vec<_> = occs
                .iter()
                .filter(|o| known(&o.subject) && known(&o.object))
                .cloned()
                .collect();
            out.dropped += occs.len() - kept.len();
            if !kept.is_empty() {
                out.verbs.insert(verb.clone(), kept);
            }
        }
        out
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let mut table = Self::new();
        for (n, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            if fields.len() != 3 || fields.iter().any(|f| f.is_empty()) {
                return Err(Error::parse(
                    n + 1,
                    "expected `verb<TAB>subject<TAB>object`",
                ));
            }
            let arg = |f: &str| (f != ABSENT).then(|| f.to_lowercase());
            let subject = arg(fields[1]);
            let object = arg(fields[2]);
            table.push(&fields[0].to_lowercase(), subject.as_deref(), object.as_deref());
        }
        Ok(table)
    }
}

/// Loads a `verb<TAB>subject<TAB>object` file; `_` marks an absent argument.
pub fn load_triples(path: &Path) -> Result<VerbArgumentTable> {
    VerbArgumentTable::read_from(BufReader::new(File::open(path)?))
}

/// `(verb, argument)` key of a holistic phrase.
pub type PhraseKey = (String, String);

/// Distributional vectors for whole phrases.
///
/// An occurrence is the verb and the argument adjacent in either order; it is
/// treated as one token and its window contexts are counted. Weights are PPMI
/// against the marginals of `m`. Phrases seen fewer than
/// `config.min_word_count` times are omitted.
pub fn collect_holistic_vectors<S: AsRef<str>>(
    lines: &[S],
    phrases: &[PhraseKey],
    config: &PipelineConfig,
    m: &CooccurrenceMatrix,
    vocab: &Vocabulary,
) -> Result<BTreeMap<PhraseKey, DistVector>> {
    config.validate()?;
    let mut lookup: HashMap<(&str, &str), usize> = HashMap::new();
    for (k, (verb, arg)) in phrases.iter().enumerate() {
        lookup.insert((verb.as_str(), arg.as_str()), k);
        lookup.insert((arg.as_str(), verb.as_str()), k);
    }
    let dim = vocab.dim_count();
    let mut occurrences = vec![0u64; phrases.len()];
    let mut totals = vec![0u64; phrases.len()];
    let mut counts = vec![HashMap::<usize, u64>::new(); phrases.len()];
    for line in lines {
        let tokens = tokenize(line.as_ref());
        let mut i = 0;
        while i + 1 < tokens.len() {
            let Some(&k) = lookup.get(&(tokens[i].as_str(), tokens[i + 1].as_str())) else {
                i += 1;
                continue;
            };
            occurrences[k] += 1;
            let lo = i.saturating_sub(config.window);
            let hi = (i + 1 + config.window).min(tokens.len() - 1);
            for (j, ctx) in tokens.iter().enumerate().take(hi + 1).skip(lo) {
                if j == i || j == i + 1 {
                    continue;
                }
                totals[k] += 1;
                if let Some(d) = vocab.dim_id(ctx) {
                    *counts[k].entry(d).or_insert(0) += 1;
                }
            }
            i += 2;
        }
    }
    let min = config.min_word_count.max(1);
    let mut out = BTreeMap::new();
    for (k, phrase) in phrases.iter().enumerate() {
        if occurrences[k] < min {
            continue;
        }
        let mut weights = vec![0.0; dim];
        for (&d, &n) in &counts[k] {
            weights[d] = pmi_weight(n, m.grand_total, totals[k], m.context_total(&vocab.dims()[d]));
        }
        out.insert(phrase.clone(), DistVector::from_nonneg(weights));
    }
    Ok(out)
}

/// Verb/argument phrase keys implied by a triples table, deduplicated.
pub fn phrase_keys(table: &VerbArgumentTable) -> Vec<PhraseKey> {
    let mut seen = HashSet::new();
    let mut keys = Vec::new();
    for (verb, occs) in table.verbs() {
        for occ in occs {
            for arg in [&occ.subject, &occ.object].into_iter().flatten() {
                let key = (verb.to_string(), arg.clone());
                if seen.insert(key.clone()) {
                    keys.push(key);
                }
            }
        }
    }
    keys
}
