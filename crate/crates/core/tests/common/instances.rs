//! Random non-negative verb instances with dense and set-algebra references.
//!
//! The dense references materialize the verb matrix or cube and contract it
//! index by index. The set references work on `BTreeSet<usize>` supports.

#![allow(dead_code)]

use std::collections::BTreeSet;

use entail_core::tensor::{FactorOccurrence, FactoredVerbTensor};
use entail_core::DistVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Set = BTreeSet<usize>;

pub struct Instance {
    pub dim: usize,
    /// (subject, object) of transitive occurrences.
    pub pairs: Vec<(Vec<f64>, Vec<f64>)>,
    /// Subject-only and object-only occurrences.
    pub lone_subjects: Vec<Vec<f64>>,
    pub lone_objects: Vec<Vec<f64>>,
    pub s: Vec<f64>,
    pub o: Vec<f64>,
    pub verb: Option<Vec<f64>>,
}

/// About 40% zeros, the rest in [0.05, 3).
pub fn sparse_vec(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim)
        .map(|_| if rng.gen_bool(0.4) { 0.0 } else { rng.gen_range(0.05..3.0) })
        .collect()
}

pub fn random_instance(rng: &mut ChaCha8Rng, max_dim: usize, max_occurrences: usize) -> Instance {
    let dim = rng.gen_range(1..=max_dim);
    let n_pairs = rng.gen_range(1..=max_occurrences);
    let pairs = (0..n_pairs)
        .map(|_| (sparse_vec(rng, dim), sparse_vec(rng, dim)))
        .collect();
    let lone_subjects = (0..rng.gen_range(0..=2)).map(|_| sparse_vec(rng, dim)).collect();
    let lone_objects = (0..rng.gen_range(0..=2)).map(|_| sparse_vec(rng, dim)).collect();
    let s = sparse_vec(rng, dim);
    let o = sparse_vec(rng, dim);
    let verb = rng.gen_bool(0.5).then(|| sparse_vec(rng, dim));
    Instance {
        dim,
        pairs,
        lone_subjects,
        lone_objects,
        s,
        o,
        verb,
    }
}

fn dv(v: &[f64]) -> DistVector {
    DistVector::new(v.to_vec()).unwrap()
}

impl Instance {
    pub fn tensor(&self) -> FactoredVerbTensor {
        let mut occs: Vec<FactorOccurrence> = self
            .pairs
            .iter()
            .map(|(s, o)| FactorOccurrence {
                subject: Some(dv(s)),
                object: Some(dv(o)),
            })
            .collect();
        occs.extend(self.lone_subjects.iter().map(|s| FactorOccurrence {
            subject: Some(dv(s)),
            object: None,
        }));
        occs.extend(self.lone_objects.iter().map(|o| FactorOccurrence {
            subject: None,
            object: Some(dv(o)),
        }));
        FactoredVerbTensor::new("v", self.dim, occs, self.verb.as_deref().map(dv)).unwrap()
    }

    pub fn s_vec(&self) -> DistVector {
        dv(&self.s)
    }

    pub fn o_vec(&self) -> DistVector {
        dv(&self.o)
    }

    pub fn all_subjects(&self) -> Vec<&Vec<f64>> {
        self.pairs.iter().map(|(s, _)| s).chain(&self.lone_subjects).collect()
    }

    pub fn all_objects(&self) -> Vec<&Vec<f64>> {
        self.pairs.iter().map(|(_, o)| o).chain(&self.lone_objects).collect()
    }
}

// ---- dense references ----

fn l2n(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter().map(|x| x / n).collect()
    } else {
        v.to_vec()
    }
}

fn augment(inst: &Instance, x: Vec<f64>) -> Vec<f64> {
    match &inst.verb {
        Some(v) => x.iter().zip(v).map(|(a, b)| a * b).collect(),
        None => x,
    }
}

/// `Σ_k Sbj_k ⊗ Obj_k` as `m[i][j]`.
pub fn dense_matrix(inst: &Instance) -> Vec<Vec<f64>> {
    let d = inst.dim;
    let mut m = vec![vec![0.0; d]; d];
    for (s, o) in &inst.pairs {
        for i in 0..d {
            for j in 0..d {
                m[i][j] += s[i] * o[j];
            }
        }
    }
    m
}

fn summed(vs: &[&Vec<f64>], d: usize) -> Vec<f64> {
    let mut acc = vec![0.0; d];
    for v in vs {
        for i in 0..d {
            acc[i] += v[i];
        }
    }
    acc
}

pub fn dense_relational_sv(inst: &Instance) -> Vec<f64> {
    let verb = summed(&inst.all_subjects(), inst.dim);
    augment(inst, (0..inst.dim).map(|i| verb[i] * inst.s[i]).collect())
}

pub fn dense_relational_vo(inst: &Instance) -> Vec<f64> {
    let verb = summed(&inst.all_objects(), inst.dim);
    augment(inst, (0..inst.dim).map(|i| verb[i] * inst.o[i]).collect())
}

/// Row-major flattening of `M ⊙ (s ⊗ o)`, augmented entry-wise by
/// `sqrt(v_i v_j)`.
pub fn dense_relational_svo(inst: &Instance) -> Vec<f64> {
    let m = dense_matrix(inst);
    let d = inst.dim;
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let mut x = m[i][j] * inst.s[i] * inst.o[j];
            if let Some(v) = &inst.verb {
                x *= (v[i] * v[j]).sqrt();
            }
            out.push(x);
        }
    }
    out
}

fn copy_subject_raw(inst: &Instance) -> Vec<f64> {
    let m = dense_matrix(inst);
    (0..inst.dim)
        .map(|i| inst.s[i] * (0..inst.dim).map(|j| m[i][j] * inst.o[j]).sum::<f64>())
        .collect()
}

fn copy_object_raw(inst: &Instance) -> Vec<f64> {
    let m = dense_matrix(inst);
    (0..inst.dim)
        .map(|j| inst.o[j] * (0..inst.dim).map(|i| inst.s[i] * m[i][j]).sum::<f64>())
        .collect()
}

pub fn dense_copy_subject(inst: &Instance) -> Vec<f64> {
    augment(inst, copy_subject_raw(inst))
}

pub fn dense_copy_object(inst: &Instance) -> Vec<f64> {
    augment(inst, copy_object_raw(inst))
}

pub fn dense_frobenius_additive(inst: &Instance) -> Vec<f64> {
    let (a, b) = (copy_subject_raw(inst), copy_object_raw(inst));
    augment(inst, a.iter().zip(&b).map(|(x, y)| x + y).collect())
}

pub fn dense_frobenius_multiplicative(inst: &Instance) -> Vec<f64> {
    let (a, b) = (copy_subject_raw(inst), copy_object_raw(inst));
    augment(inst, a.iter().zip(&b).map(|(x, y)| x * y).collect())
}

fn projector_apply(args: &[&Vec<f64>], x: &[f64], d: usize) -> Vec<f64> {
    let mut p = vec![vec![0.0; d]; d];
    for a in args {
        let a = l2n(a);
        for i in 0..d {
            for j in 0..d {
                p[i][j] += a[i] * a[j];
            }
        }
    }
    (0..d).map(|i| (0..d).map(|j| p[i][j] * x[j]).sum()).collect()
}

pub fn dense_projective_sv(inst: &Instance) -> Vec<f64> {
    augment(inst, projector_apply(&inst.all_subjects(), &inst.s, inst.dim))
}

pub fn dense_projective_vo(inst: &Instance) -> Vec<f64> {
    augment(inst, projector_apply(&inst.all_objects(), &inst.o, inst.dim))
}

/// Cube `C[a][b][c] = Σ_k Ŝ_a (Ŝ+Ô)_b / 2 Ô_c`, contracted with `s` on `a`
/// and `o` on `c`.
pub fn dense_projective_svo(inst: &Instance) -> Vec<f64> {
    let d = inst.dim;
    let mut cube = vec![vec![vec![0.0; d]; d]; d];
    for (s, o) in &inst.pairs {
        let (s, o) = (l2n(s), l2n(o));
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    cube[a][b][c] += s[a] * (s[b] + o[b]) / 2.0 * o[c];
                }
            }
        }
    }
    let out = (0..d)
        .map(|b| {
            let mut x = 0.0;
            for a in 0..d {
                for c in 0..d {
                    x += inst.s[a] * cube[a][b][c] * inst.o[c];
                }
            }
            x
        })
        .collect();
    augment(inst, out)
}

/// `‖a − b‖ / ‖b‖`, or `‖a‖` when `b` is zero.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let norm = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    if norm > 0.0 {
        diff / norm
    } else {
        diff
    }
}

// ---- set references ----

pub fn supp(v: &[f64]) -> Set {
    v.iter().enumerate().filter(|(_, w)| **w > 0.0).map(|(i, _)| i).collect()
}

fn union_all(sets: impl Iterator<Item = Set>) -> Set {
    sets.fold(Set::new(), |acc, s| acc.union(&s).copied().collect())
}

fn meet(a: &Set, b: &Set) -> Set {
    a.intersection(b).copied().collect()
}

fn join(a: &Set, b: &Set) -> Set {
    a.union(b).copied().collect()
}

fn overlaps(a: &Set, b: &Set) -> bool {
    a.intersection(b).next().is_some()
}

fn with_verb(inst: &Instance, f: Set) -> Set {
    match &inst.verb {
        Some(v) => meet(&f, &supp(v)),
        None => f,
    }
}

pub fn predict_relational_sv(inst: &Instance) -> Set {
    let f = union_all(inst.all_subjects().into_iter().map(|v| supp(v)));
    with_verb(inst, meet(&f, &supp(&inst.s)))
}

pub fn predict_relational_vo(inst: &Instance) -> Set {
    let f = union_all(inst.all_objects().into_iter().map(|v| supp(v)));
    with_verb(inst, meet(&f, &supp(&inst.o)))
}

/// Flattened indices `i·D + j` of `⋃_k F(Sbj_k)×F(Obj_k) ∩ F(s)×F(o)`,
/// further restricted to `F(v)×F(v)` when augmented.
pub fn predict_relational_svo(inst: &Instance) -> Set {
    let d = inst.dim;
    let (fs, fo) = (supp(&inst.s), supp(&inst.o));
    let fv = inst.verb.as_ref().map(|v| supp(v));
    let mut out = Set::new();
    for (s, o) in &inst.pairs {
        for i in meet(&supp(s), &fs) {
            for j in meet(&supp(o), &fo) {
                if fv.as_ref().is_none_or(|fv| fv.contains(&i) && fv.contains(&j)) {
                    out.insert(i * d + j);
                }
            }
        }
    }
    out
}

fn predict_copy_subject_raw(inst: &Instance) -> Set {
    let fo = supp(&inst.o);
    let f = union_all(inst.pairs.iter().filter(|(_, o)| overlaps(&supp(o), &fo)).map(|(s, _)| supp(s)));
    meet(&f, &supp(&inst.s))
}

fn predict_copy_object_raw(inst: &Instance) -> Set {
    let fs = supp(&inst.s);
    let f = union_all(inst.pairs.iter().filter(|(s, _)| overlaps(&supp(s), &fs)).map(|(_, o)| supp(o)));
    meet(&f, &supp(&inst.o))
}

pub fn predict_copy_subject(inst: &Instance) -> Set {
    with_verb(inst, predict_copy_subject_raw(inst))
}

pub fn predict_copy_object(inst: &Instance) -> Set {
    with_verb(inst, predict_copy_object_raw(inst))
}

pub fn predict_frobenius_additive(inst: &Instance) -> Set {
    with_verb(inst, join(&predict_copy_subject_raw(inst), &predict_copy_object_raw(inst)))
}

pub fn predict_frobenius_multiplicative(inst: &Instance) -> Set {
    with_verb(inst, meet(&predict_copy_subject_raw(inst), &predict_copy_object_raw(inst)))
}

pub fn predict_projective_sv(inst: &Instance) -> Set {
    let fs = supp(&inst.s);
    let f = union_all(inst.all_subjects().into_iter().map(|v| supp(v)).filter(|f| overlaps(f, &fs)));
    with_verb(inst, f)
}

pub fn predict_projective_vo(inst: &Instance) -> Set {
    let fo = supp(&inst.o);
    let f = union_all(inst.all_objects().into_iter().map(|v| supp(v)).filter(|f| overlaps(f, &fo)));
    with_verb(inst, f)
}

pub fn predict_projective_svo(inst: &Instance) -> Set {
    let (fs, fo) = (supp(&inst.s), supp(&inst.o));
    let f = union_all(
        inst.pairs
            .iter()
            .map(|(s, o)| (supp(s), supp(o)))
            .filter(|(s, o)| overlaps(s, &fs) && overlaps(o, &fo))
            .map(|(s, o)| join(&s, &o)),
    );
    with_verb(inst, f)
}

/// One tensor composition evaluated three ways.
pub struct Case {
    pub name: &'static str,
    pub factored: Vec<f64>,
    pub dense: Vec<f64>,
    pub predicted: Set,
}

pub fn cases(inst: &Instance) -> Vec<Case> {
    use entail_core::tensor::*;
    let t = inst.tensor();
    let (s, o) = (inst.s_vec(), inst.o_vec());
    let vec = |r: entail_core::Result<DistVector>| r.unwrap().into_inner();
    let case = |name, factored, dense, predicted| Case {
        name,
        factored,
        dense,
        predicted,
    };
    vec![
        case("relational-sv", vec(compose_relational_sv(&t, &s)), dense_relational_sv(inst), predict_relational_sv(inst)),
        case("relational-vo", vec(compose_relational_vo(&t, &o)), dense_relational_vo(inst), predict_relational_vo(inst)),
        case(
            "relational-svo",
            compose_relational_svo(&t, &s, &o).unwrap().flatten().into_inner(),
            dense_relational_svo(inst),
            predict_relational_svo(inst),
        ),
        case("copy-subject", vec(compose_copy_subject(&t, &s, &o)), dense_copy_subject(inst), predict_copy_subject(inst)),
        case("copy-object", vec(compose_copy_object(&t, &s, &o)), dense_copy_object(inst), predict_copy_object(inst)),
        case(
            "frobenius-add",
            vec(compose_frobenius_additive(&t, &s, &o)),
            dense_frobenius_additive(inst),
            predict_frobenius_additive(inst),
        ),
        case(
            "frobenius-mul",
            vec(compose_frobenius_multiplicative(&t, &s, &o)),
            dense_frobenius_multiplicative(inst),
            predict_frobenius_multiplicative(inst),
        ),
        case("projective-sv", vec(compose_projective_sv(&t, &s)), dense_projective_sv(inst), predict_projective_sv(inst)),
        case("projective-vo", vec(compose_projective_vo(&t, &o)), dense_projective_vo(inst), predict_projective_vo(inst)),
        case(
            "projective-svo",
            vec(compose_projective_svo(&t, &s, &o)),
            dense_projective_svo(inst),
            predict_projective_svo(inst),
        ),
    ]
}
