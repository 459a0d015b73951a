//! Vocabulary, distributional vectors and their feature views.
//!
//! A [`DistVector`] is a dense, non-negative weight vector over the context
//! dimensions of a [`Vocabulary`]. Its features are the non-zero dimensions
//! ([`support`]); inclusion measures work on [`FeatureRanking`]s, which order
//! dimensions by descending weight with ties resolved by ascending index.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::ops::Deref;

use crate::error::{Error, Result};

/// Ordered target words and ordered context dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    words: Vec<String>,
    dims: Vec<String>,
    word_index: HashMap<String, usize>,
    dim_index: HashMap<String, usize>,
}

fn index_unique(items: &[String], what: &str) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        if index.insert(item.clone(), i).is_some() {
            return Err(Error::InvalidConfig(format!("duplicate {what} `{item}`")));
        }
    }
    Ok(index)
}

impl Vocabulary {
    pub fn new(words: Vec<String>, dims: Vec<String>) -> Result<Self> {
        let word_index = index_unique(&words, "word")?;
        let dim_index = index_unique(&dims, "dimension")?;
        Ok(Self {
            words,
            dims,
            word_index,
            dim_index,
        })
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn dims(&self) -> &[String] {
        &self.dims
    }

    pub fn dim_count(&self) -> usize {
        self.dims.len()
    }

    pub fn word_id(&self, word: &str) -> Option<usize> {
        self.word_index.get(word).copied()
    }

    pub fn dim_id(&self, dim: &str) -> Option<usize> {
        self.dim_index.get(dim).copied()
    }
}

/// Dense non-negative weight vector.
#[derive(Debug, Clone, PartialEq)]
pub struct DistVector(Vec<f64>);

impl DistVector {
    /// Wraps `weights`, rejecting negative and non-finite entries.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w >= 0.0))
        {
            return Err(Error::InvalidWeight { index, value });
        }
        Ok(Self(weights))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    /// For operators that preserve non-negativity by construction.
    pub(crate) fn from_nonneg(weights: Vec<f64>) -> Self {
        debug_assert!(weights.iter().all(|w| *w >= 0.0 && w.is_finite()));
        Self(weights)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|w| *w == 0.0)
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

impl Deref for DistVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Set of feature (dimension) indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeatureSet(BTreeSet<usize>);

impl FeatureSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.contains(&index)
    }

    pub fn insert(&mut self, index: usize) -> bool {
        self.0.insert(index)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn union(&self, other: &FeatureSet) -> FeatureSet {
        FeatureSet(self.0.union(&other.0).copied().collect())
    }

    pub fn intersection(&self, other: &FeatureSet) -> FeatureSet {
        FeatureSet(self.0.intersection(&other.0).copied().collect())
    }

    pub fn is_subset(&self, other: &FeatureSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn intersects(&self, other: &FeatureSet) -> bool {
        self.0.intersection(&other.0).next().is_some()
    }
}

impl FromIterator<usize> for FeatureSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        FeatureSet(iter.into_iter().collect())
    }
}

/// `(dimension, weight)` pairs in descending weight order, ties by index.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRanking(Vec<(usize, f64)>);

impl FeatureRanking {
    pub fn entries(&self) -> &[(usize, f64)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// One-based rank of every ranked dimension, indexed by dimension.
    pub(crate) fn rank_table(&self, dim: usize) -> Vec<Option<usize>> {
        let mut table = vec![None; dim];
        for (rank, &(index, _)) in self.0.iter().enumerate() {
            table[index] = Some(rank + 1);
        }
        table
    }
}

/// Indices with strictly positive weight.
pub fn support(v: &[f64]) -> FeatureSet {
    v.iter()
        .enumerate()
        .filter(|(_, w)| **w > 0.0)
        .map(|(i, _)| i)
        .collect()
}

/// Orders dimensions by descending weight. With `restrict_to_support` only
/// non-zero dimensions are ranked.
pub fn rank_features(v: &[f64], restrict_to_support: bool) -> FeatureRanking {
    let mut entries: Vec<(usize, f64)> = v
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, w)| !restrict_to_support || *w > 0.0)
        .collect();
    entries.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    FeatureRanking(entries)
}

pub fn l1_normalize(v: &DistVector) -> Result<DistVector> {
    let total = v.sum();
    if total <= 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(DistVector(v.iter().map(|w| w / total).collect()))
}

/// Words with their distributional vectors over a shared set of dimensions.
#[derive(Debug, Clone)]
pub struct VectorSpace {
    vocab: Vocabulary,
    vectors: Vec<DistVector>,
}

impl VectorSpace {
    pub fn new(vocab: Vocabulary, vectors: Vec<DistVector>) -> Result<Self> {
        if vectors.len() != vocab.words().len() {
            return Err(Error::Shape(format!(
                "{} words but {} vectors",
                vocab.words().len(),
                vectors.len()
            )));
        }
        for v in &vectors {
            crate::error::check_dims(v.dim(), vocab.dim_count())?;
        }
        Ok(Self { vocab, vectors })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn dim(&self) -> usize {
        self.vocab.dim_count()
    }

    pub fn get(&self, word: &str) -> Option<&DistVector> {
        self.vocab.word_id(word).map(|i| &self.vectors[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &DistVector)> {
        self.vocab
            .words()
            .iter()
            .map(String::as_str)
            .zip(self.vectors.iter())
    }

    /// Writes the tab-separated space format: a `dims<TAB>D` header, the D
    /// dimension words, then one sparse `word<TAB>i:w…` line per word.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "dims\t{}", self.dim())?;
        for d in self.vocab.dims() {
            writeln!(out, "{d}")?;
        }
        for (word, v) in self.iter() {
            writeln!(out, "{word}{}", sparse_fields(v))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines().enumerate();
        let dim = match lines.next() {
            Some((_, line)) => {
                let line = line?;
                let count = line
                    .strip_prefix("dims\t")
                    .and_then(|n| n.trim().parse::<usize>().ok())
                    .ok_or_else(|| Error::parse(1, "expected `dims<TAB>D` header"))?;
                count
            }
            None => return Err(Error::parse(1, "empty space file")),
        };
        let mut dims = Vec::with_capacity(dim);
        for _ in 0..dim {
            match lines.next() {
                Some((_, line)) => dims.push(line?),
                None => return Err(Error::parse(dim + 1, "truncated dimension list")),
            }
        }
        let mut words = Vec::new();
        let mut vectors = Vec::new();
        for (n, line) in lines {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let word = fields.next().unwrap_or_default().to_string();
            let mut weights = vec![0.0; dim];
            for field in fields {
                let (i, w) = parse_sparse_entry(field, dim).map_err(|m| Error::parse(n + 1, m))?;
                weights[i] = w;
            }
            words.push(word);
            vectors.push(DistVector::new(weights).map_err(|e| Error::parse(n + 1, e.to_string()))?);
        }
        VectorSpace::new(Vocabulary::new(words, dims)?, vectors)
    }
}

fn parse_sparse_entry(field: &str, dim: usize) -> std::result::Result<(usize, f64), String> {
    let (i, w) = field
        .split_once(':')
        .ok_or_else(|| format!("expected index:weight, got `{field}`"))?;
    let i: usize = i.parse().map_err(|_| format!("bad index `{i}`"))?;
    let w: f64 = w.parse().map_err(|_| format!("bad weight `{w}`"))?;
    if i >= dim {
        return Err(format!("index {i} out of range for {dim} dimensions"));
    }
    Ok((i, w))
}

/// `<TAB>i:w` for every non-zero entry.
pub fn sparse_fields(v: &[f64]) -> String {
    let mut s = String::new();
    for (i, w) in v.iter().enumerate().filter(|(_, w)| **w != 0.0) {
        let _ = write!(s, "\t{i}:{}", format_sig6(*w));
    }
    s
}

/// Formats like C's `%g`: six significant digits, trailing zeros trimmed.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa.to_string()), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
