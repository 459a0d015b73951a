//! Collection of verb tensors and its text file format.
//!
//! ```text
//! verbs<TAB>augment=<0|1>
//! occ<TAB>verb<TAB>subject|_<TAB>object|_
//! lsq<TAB>verb<TAB>subject|object<TAB>row<TAB>w_0 w_1 … w_{D-1}
//! ```
//!
//! Occurrence lines hold words, not vectors; loading resolves them against a
//! vector space.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use rayon::prelude::*;

use super::least_squares::{train_least_squares, ArgumentSlot, LeastSquaresVerbMatrix};
use super::{build_verb, FactoredVerbTensor};
use crate::corpus::{collect_holistic_vectors, CooccurrenceMatrix, PhraseKey, PipelineConfig, VerbArgumentTable};
use crate::error::{Error, Result};
use crate::vector::VectorSpace;

/// Parsed least-squares rows, keyed by verb and slot: `(row index, weights)`.
type MatrixRows = BTreeMap<(String, ArgumentSlot), Vec<(usize, Vec<f64>)>>;

/// Least-squares models need at least this many distinct training phrases.
pub const MIN_TRAINING_PHRASES: usize = 3;

#[derive(Debug, Clone, Default)]
pub struct VerbStore {
    augment: bool,
    table: VerbArgumentTable,
    tensors: BTreeMap<String, FactoredVerbTensor>,
    least_squares: BTreeMap<(String, ArgumentSlot), LeastSquaresVerbMatrix>,
}

impl VerbStore {
    /// Builds a factored tensor for every verb of `table` that has usable
    /// occurrences in `space`.
    pub fn build(table: &VerbArgumentTable, space: &VectorSpace, augment: bool) -> Self {
        let table = table.restrict_to(space);
        let tensors = table
            .verbs()
            .filter_map(|(verb, _)| {
                build_verb(&table, verb, space, augment)
                    .ok()
                    .map(|t| (verb.to_string(), t))
            })
            .collect();
        Self {
            augment,
            table,
            tensors,
            least_squares: BTreeMap::new(),
        }
    }

    pub fn augment(&self) -> bool {
        self.augment
    }

    pub fn table(&self) -> &VerbArgumentTable {
        &self.table
    }

    pub fn tensor(&self, verb: &str) -> Option<&FactoredVerbTensor> {
        self.tensors.get(verb)
    }

    pub fn tensor_count(&self) -> usize {
        self.tensors.len()
    }

    pub fn least_squares(&self, verb: &str, slot: ArgumentSlot) -> Option<&LeastSquaresVerbMatrix> {
        self.least_squares.get(&(verb.to_string(), slot))
    }

    pub fn least_squares_count(&self) -> usize {
        self.least_squares.len()
    }

    pub fn insert_least_squares(&mut self, m: LeastSquaresVerbMatrix) {
        self.least_squares.insert((m.verb().to_string(), m.slot()), m);
    }

    /// Fits a least-squares matrix per verb and argument slot against
    /// holistic phrase vectors counted from `lines`. Verbs with fewer than
    /// [`MIN_TRAINING_PHRASES`] observed phrases are left without a model.
    pub fn train_least_squares<S: AsRef<str>>(
        &mut self,
        space: &VectorSpace,
        lines: &[S],
        matrix: &CooccurrenceMatrix,
        config: &PipelineConfig,
        ridge: f64,
    ) -> Result<usize> {
        let mut jobs: Vec<(String, ArgumentSlot, Vec<String>)> = Vec::new();
        for (verb, occs) in self.table.verbs() {
            for slot in [ArgumentSlot::Subject, ArgumentSlot::Object] {
                let mut args: Vec<String> = occs
                    .iter()
                    .filter_map(|o| match slot {
                        ArgumentSlot::Subject => o.subject.clone(),
                        ArgumentSlot::Object => o.object.clone(),
                    })
                    .collect();
                args.sort();
                args.dedup();
                if args.len() >= MIN_TRAINING_PHRASES {
                    jobs.push((verb.to_string(), slot, args));
                }
            }
        }
        let phrases: Vec<PhraseKey> = {
            let mut all: Vec<PhraseKey> = jobs
                .iter()
                .flat_map(|(v, _, args)| args.iter().map(move |a| (v.clone(), a.clone())))
                .collect();
            all.sort();
            all.dedup();
            all
        };
        let holistic = collect_holistic_vectors(lines, &phrases, config, matrix, space.vocab())?;

        let trained: Vec<LeastSquaresVerbMatrix> = jobs
            .par_iter()
            .filter_map(|(verb, slot, args)| {
                let mut xs = Vec::new();
                let mut ys = Vec::new();
                for arg in args {
                    if let (Some(x), Some(y)) = (space.get(arg), holistic.get(&(verb.clone(), arg.clone()))) {
                        xs.push(x.weights());
                        ys.push(y.weights());
                    }
                }
                if xs.len() < MIN_TRAINING_PHRASES {
                    return None;
                }
                train_least_squares(verb, *slot, &xs, &ys, ridge).ok()
            })
            .collect();
        let n = trained.len();
        for m in trained {
            self.insert_least_squares(m);
        }
        Ok(n)
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "verbs\taugment={}", u8::from(self.augment))?;
        let word = |w: &Option<String>| w.clone().unwrap_or_else(|| "_".to_string());
        for (verb, occs) in self.table.verbs() {
            for o in occs {
                writeln!(out, "occ\t{verb}\t{}\t{}", word(&o.subject), word(&o.object))?;
            }
        }
        for ((verb, slot), m) in &self.least_squares {
            for i in 0..m.output_dim() {
                let row: Vec<String> = m.row(i).iter().map(|w| w.to_string()).collect();
                writeln!(out, "lsq\t{verb}\t{slot}\t{i}\t{}", row.join(" "))?;
            }
        }
        out.flush()?;
        Ok(())
    }

    /// Reads a verbs file and rebuilds its tensors over `space`.
    pub fn read_from<R: BufRead>(input: R, space: &VectorSpace) -> Result<Self> {
        let mut lines = input.lines().enumerate();
        let augment = match lines.next() {
            Some((_, line)) => match line?.as_str() {
                "verbs\taugment=1" => true,
                "verbs\taugment=0" => false,
                _ => return Err(Error::parse(1, "expected `verbs<TAB>augment=0|1` header")),
            },
            None => return Err(Error::parse(1, "empty verbs file")),
        };
        let mut table = VerbArgumentTable::new();
        let mut lsq_rows: MatrixRows = BTreeMap::new();
        for (n, line) in lines {
            let line = line?;
            let n = n + 1;
            let fields: Vec<&str> = line.split('\t').collect();
            match fields.as_slice() {
                [] | [""] => {}
                ["occ", verb, subject, object] => {
                    let arg = |f: &str| (f != "_").then(|| f.to_string());
                    if !table.push(verb, arg(subject).as_deref(), arg(object).as_deref()) {
                        return Err(Error::parse(n, "occurrence without arguments"));
                    }
                }
                ["lsq", verb, slot, row, weights] => {
                    let slot: ArgumentSlot = slot.parse().map_err(|e: Error| Error::parse(n, e.to_string()))?;
                    let row: usize = row.parse().map_err(|_| Error::parse(n, format!("bad row index `{row}`")))?;
                    let weights = weights
                        .split(' ')
                        .map(|w| w.parse::<f64>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|e| Error::parse(n, e.to_string()))?;
                    lsq_rows.entry((verb.to_string(), slot)).or_default().push((row, weights));
                }
                _ => return Err(Error::parse(n, "unrecognized record")),
            }
        }
        let mut store = VerbStore::build(&table, space, augment);
        for ((verb, slot), mut rows) in lsq_rows {
            rows.sort_by_key(|(i, _)| *i);
            if rows.iter().enumerate().any(|(k, (i, _))| k != *i) {
                return Err(Error::Shape(format!("least-squares rows of `{verb}` are not contiguous")));
            }
            let m = LeastSquaresVerbMatrix::new(&verb, slot, rows.into_iter().map(|(_, r)| r).collect())?;
            if m.input_dim() != space.dim() || m.output_dim() != space.dim() {
                return Err(Error::Shape(format!(
                    "least-squares matrix of `{verb}` is {}x{}, space has {} dimensions",
                    m.output_dim(),
                    m.input_dim(),
                    space.dim()
                )));
            }
            store.insert_least_squares(m);
        }
        Ok(store)
    }
}
