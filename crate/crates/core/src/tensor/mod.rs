//! Verb tensors built from argument occurrences, and their composition with
//! subject and object vectors.
//!
//! A [`FactoredVerbTensor`] keeps the argument vectors of every occurrence
//! instead of a dense matrix or cube. The relational transitive matrix is
//! `Σ_i Sbj_i ⊗ Obj_i`, the projective ones are sums of projectors
//! `Σ_i Sbj_i ⊗ Sbj_i`, and the projective cube is
//! `Σ_i Sbj_i ⊗ (Sbj_i + Obj_i)/2 ⊗ Obj_i`; by linearity each contraction
//! becomes a weighted sum over occurrences, O(occurrences · D).
//!
//! Relational and Frobenius models use raw argument vectors. Projective
//! models L2-normalize each argument vector first.
//!
//! When a tensor carries the verb's own distributional vector, every
//! vector-valued composite is multiplied element-wise by it. Relational
//! sentence matrices are scaled by `sqrt(v_i * v_j)` at entry `(i, j)`.

mod least_squares;
mod store;

pub use least_squares::{compose_least_squares, train_least_squares, ArgumentSlot, LeastSquaresVerbMatrix};
pub use store::VerbStore;

use crate::corpus::VerbArgumentTable;
use crate::error::{check_dims, Error, Result};
use crate::vector::{DistVector, VectorSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TensorKind {
    Relational,
    Projective,
    LeastSquares,
}

/// Argument vectors of one verb occurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorOccurrence {
    pub subject: Option<DistVector>,
    pub object: Option<DistVector>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactoredVerbTensor {
    verb: String,
    kind: TensorKind,
    dim: usize,
    occurrences: Vec<FactorOccurrence>,
    verb_vector: Option<DistVector>,
}

/// Builds the factored tensor of `verb` from its resolvable occurrences.
///
/// Occurrences with an argument missing from `space` are skipped. With
/// `augment`, the verb's own vector from `space` is attached.
pub fn build_verb(
    table: &VerbArgumentTable,
    verb: &str,
    space: &VectorSpace,
    augment: bool,
) -> Result<FactoredVerbTensor> {
    let occs = table
        .occurrences(verb)
        .ok_or_else(|| Error::UnknownVerb(verb.to_string()))?;
    let lookup = |w: &Option<String>| -> Option<Option<DistVector>> {
        match w {
            None => Some(None),
            Some(w) => space.get(w).map(|v| Some(v.clone())),
        }
    };
    let occurrences: Vec<FactorOccurrence> = occs
        .iter()
        .filter_map(|o| {
            Some(FactorOccurrence {
                subject: lookup(&o.subject)?,
                object: lookup(&o.object)?,
            })
        })
        .collect();
    let verb_vector = if augment {
        Some(
            space
                .get(verb)
                .cloned()
                .ok_or_else(|| Error::UnknownVerb(verb.to_string()))?,
        )
    } else {
        None
    };
    FactoredVerbTensor::new(verb, space.dim(), occurrences, verb_vector)
}

impl FactoredVerbTensor {
    pub fn new(
        verb: &str,
        dim: usize,
        occurrences: Vec<FactorOccurrence>,
        verb_vector: Option<DistVector>,
    ) -> Result<Self> {
        if occurrences.is_empty() {
            return Err(Error::EmptyArguments(verb.to_string()));
        }
        for o in &occurrences {
            if o.subject.is_none() && o.object.is_none() {
                return Err(Error::EmptyArguments(verb.to_string()));
            }
            for v in o.subject.iter().chain(&o.object).chain(&verb_vector) {
                check_dims(v.dim(), dim)?;
            }
        }
        if let Some(v) = &verb_vector {
            check_dims(v.dim(), dim)?;
        }
        Ok(Self {
            verb: verb.to_string(),
            kind: TensorKind::Relational,
            dim,
            occurrences,
            verb_vector,
        })
    }

    pub fn with_kind(mut self, kind: TensorKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn verb(&self) -> &str {
        &self.verb
    }

    pub fn kind(&self) -> TensorKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn occurrences(&self) -> &[FactorOccurrence] {
        &self.occurrences
    }

    pub fn verb_vector(&self) -> Option<&DistVector> {
        self.verb_vector.as_ref()
    }

    pub fn subjects(&self) -> impl Iterator<Item = &DistVector> {
        self.occurrences.iter().filter_map(|o| o.subject.as_ref())
    }

    pub fn objects(&self) -> impl Iterator<Item = &DistVector> {
        self.occurrences.iter().filter_map(|o| o.object.as_ref())
    }

    /// Occurrences with both a subject and an object.
    pub fn pairs(&self) -> impl Iterator<Item = (&DistVector, &DistVector)> {
        self.occurrences
            .iter()
            .filter_map(|o| Some((o.subject.as_ref()?, o.object.as_ref()?)))
    }

    fn require<I: Iterator>(&self, it: I) -> Result<std::iter::Peekable<I>> {
        let mut it = it.peekable();
        if it.peek().is_none() {
            return Err(Error::EmptyArguments(self.verb.clone()));
        }
        Ok(it)
    }

    fn check_arg(&self, v: &DistVector) -> Result<()> {
        check_dims(v.dim(), self.dim)
    }

    fn augment(&self, composite: Vec<f64>) -> DistVector {
        match &self.verb_vector {
            Some(v) => DistVector::from_nonneg(composite.iter().zip(v.iter()).map(|(a, b)| a * b).collect()),
            None => DistVector::from_nonneg(composite),
        }
    }

    /// Dense `Σ_i Sbj_i ⊗ Obj_i`, row-major. Only for small dimensions,
    /// e.g. the verb-only baseline.
    pub fn relational_matrix(&self) -> Result<SentenceMatrix> {
        let pairs = self.require(self.pairs())?;
        let d = self.dim;
        let mut data = vec![0.0; d * d];
        for (sbj, obj) in pairs {
            add_outer(&mut data, d, sbj, obj);
        }
        Ok(SentenceMatrix { dim: d, data })
    }
}

/// Dense D×D sentence representation of the relational transitive model.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SentenceMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.dim + col]
    }

    /// Row-major D²-dimensional vector.
    pub fn flatten(self) -> DistVector {
        DistVector::from_nonneg(self.data)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(acc: &mut [f64], alpha: f64, x: &[f64]) {
    if alpha == 0.0 {
        return;
    }
    for (a, b) in acc.iter_mut().zip(x) {
        *a += alpha * b;
    }
}

fn hadamard(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

fn add_outer(data: &mut [f64], d: usize, a: &[f64], b: &[f64]) {
    let cols: Vec<(usize, f64)> = b.iter().copied().enumerate().filter(|(_, w)| *w != 0.0).collect();
    for (i, &ai) in a.iter().enumerate().filter(|(_, w)| **w != 0.0) {
        let row = &mut data[i * d..(i + 1) * d];
        for &(j, bj) in &cols {
            row[j] += ai * bj;
        }
    }
}

fn l2_normalized(v: &[f64]) -> Vec<f64> {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        v.iter().map(|x| x / norm).collect()
    } else {
        v.to_vec()
    }
}

fn sum_of<'a>(dim: usize, vs: impl Iterator<Item = &'a DistVector>) -> Vec<f64> {
    let mut acc = vec![0.0; dim];
    for v in vs {
        axpy(&mut acc, 1.0, v);
    }
    acc
}

/// `s ⊙ Σ_i Sbj_i`.
pub fn compose_relational_sv(t: &FactoredVerbTensor, s: &DistVector) -> Result<DistVector> {
    t.check_arg(s)?;
    let subjects = t.require(t.subjects())?;
    Ok(t.augment(hadamard(s, &sum_of(t.dim, subjects))))
}

/// `o ⊙ Σ_i Obj_i`.
pub fn compose_relational_vo(t: &FactoredVerbTensor, o: &DistVector) -> Result<DistVector> {
    t.check_arg(o)?;
    let objects = t.require(t.objects())?;
    Ok(t.augment(hadamard(o, &sum_of(t.dim, objects))))
}

/// `(Σ_i Sbj_i ⊗ Obj_i) ⊙ (s ⊗ o)`.
pub fn compose_relational_svo(t: &FactoredVerbTensor, s: &DistVector, o: &DistVector) -> Result<SentenceMatrix> {
    t.check_arg(s)?;
    t.check_arg(o)?;
    let pairs = t.require(t.pairs())?;
    let d = t.dim;
    let mut data = vec![0.0; d * d];
    for (sbj, obj) in pairs {
        add_outer(&mut data, d, &hadamard(sbj, s), &hadamard(obj, o));
    }
    if let Some(v) = &t.verb_vector {
        let root: Vec<f64> = v.iter().map(|x| x.sqrt()).collect();
        for i in 0..d {
            for j in 0..d {
                data[i * d + j] *= root[i] * root[j];
            }
        }
    }
    Ok(SentenceMatrix { dim: d, data })
}

fn copy_subject_raw(t: &FactoredVerbTensor, s: &DistVector, o: &DistVector) -> Result<Vec<f64>> {
    t.check_arg(s)?;
    t.check_arg(o)?;
    let mut acc = vec![0.0; t.dim];
    for (sbj, obj) in t.require(t.pairs())? {
        axpy(&mut acc, dot(obj, o), sbj);
    }
    Ok(hadamard(s, &acc))
}

fn copy_object_raw(t: &FactoredVerbTensor, s: &DistVector, o: &DistVector) -> Result<Vec<f64>> {
    t.check_arg(s)?;
    t.check_arg(o)?;
    let mut acc = vec![0.0; t.dim];
    for (sbj, obj) in t.require(t.pairs())? {
        axpy(&mut acc, dot(sbj, s), obj);
    }
    Ok(hadamard(o, &acc))
}

/// Copy-Subject: `s ⊙ Σ_i Sbj_i ⟨Obj_i, o⟩`.
pub fn compose_copy_subject(t: &FactoredVerbTensor, s: &DistVector, o: &DistVector) -> Result<DistVector> {
    Ok(t.augment(copy_subject_raw(t, s, o)?))
}

/// Copy-Object: `o ⊙ Σ_i Obj_i ⟨Sbj_i, s⟩`.
pub fn compose_copy_object(t: &FactoredVerbTensor, s: &DistVector, o: &DistVector) -> Result<DistVector> {
    Ok(t.augment(copy_object_raw(t, s, o)?))
}

/// Copy-Subject + Copy-Object.
pub fn compose_frobenius_additive(t: &FactoredVerbTensor, s: &DistVector, o: &DistVector) -> Result<DistVector> {
    let a = copy_subject_raw(t, s, o)?;
    let b = copy_object_raw(t, s, o)?;
    Ok(t.augment(a.iter().zip(&b).map(|(x, y)| x + y).collect()))
}

/// Copy-Subject ⊙ Copy-Object.
pub fn compose_frobenius_multiplicative(
    t: &FactoredVerbTensor,
    s: &DistVector,
    o: &DistVector,
) -> Result<DistVector> {
    let a = copy_subject_raw(t, s, o)?;
    let b = copy_object_raw(t, s, o)?;
    Ok(t.augment(hadamard(&a, &b)))
}

fn project<'a>(dim: usize, args: impl Iterator<Item = &'a DistVector>, x: &[f64]) -> Vec<f64> {
    let mut acc = vec![0.0; dim];
    for a in args {
        let a = l2_normalized(a);
        axpy(&mut acc, dot(&a, x), &a);
    }
    acc
}

/// `Σ_i ⟨Sbj_i, s⟩ Sbj_i` over L2-normalized subjects.
pub fn compose_projective_sv(t: &FactoredVerbTensor, s: &DistVector) -> Result<DistVector> {
    t.check_arg(s)?;
    let subjects = t.require(t.subjects())?;
    Ok(t.augment(project(t.dim, subjects, s)))
}

/// `Σ_i ⟨Obj_i, o⟩ Obj_i` over L2-normalized objects.
pub fn compose_projective_vo(t: &FactoredVerbTensor, o: &DistVector) -> Result<DistVector> {
    t.check_arg(o)?;
    let objects = t.require(t.objects())?;
    Ok(t.augment(project(t.dim, objects, o)))
}

/// `Σ_i ⟨s, Sbj_i⟩ ⟨Obj_i, o⟩ (Sbj_i + Obj_i) / 2` over L2-normalized
/// arguments.
pub fn compose_projective_svo(t: &FactoredVerbTensor, s: &DistVector, o: &DistVector) -> Result<DistVector> {
    t.check_arg(s)?;
    t.check_arg(o)?;
    let mut acc = vec![0.0; t.dim];
    for (sbj, obj) in t.require(t.pairs())? {
        let sbj = l2_normalized(sbj);
        let obj = l2_normalized(obj);
        let weight = dot(s, &sbj) * dot(&obj, o) / 2.0;
        axpy(&mut acc, weight, &sbj);
        axpy(&mut acc, weight, &obj);
    }
    Ok(t.augment(acc))
}

/// Element-wise product of a composite with the verb's own vector.
pub fn augment_with_verb_vector(composite: &DistVector, verb_vector: &DistVector) -> Result<DistVector> {
    check_dims(composite.dim(), verb_vector.dim())?;
    Ok(DistVector::from_nonneg(hadamard(composite, verb_vector)))
}
