//! Brute-force reference evaluations used to check the library.
//!
//! Nothing here calls into `entail_core`; ranks are found by repeated
//! arg-max selection and ranks within the broader vector by counting
//! dominating entries, so the code paths differ from the library's sort.

#![allow(dead_code)]

/// Indices in rank order: repeatedly take the largest remaining weight,
/// lowest index on ties. `only_positive` skips zero weights.
pub fn selection_order(v: &[f64], only_positive: bool) -> Vec<usize> {
    let mut taken = vec![false; v.len()];
    let mut order = Vec::new();
    loop {
        let mut best: Option<usize> = None;
        for i in 0..v.len() {
            if taken[i] || (only_positive && v[i] <= 0.0) {
                continue;
            }
            match best {
                None => best = Some(i),
                Some(b) if v[i] > v[b] => best = Some(i),
                _ => {}
            }
        }
        match best {
            Some(b) => {
                taken[b] = true;
                order.push(b);
            }
            None => return order,
        }
    }
}

/// One-based rank of `f` among the positive entries of `v`.
fn rank_in_support(f: usize, v: &[f64]) -> usize {
    1 + (0..v.len())
        .filter(|&g| v[g] > 0.0 && (v[g] > v[f] || (v[g] == v[f] && g < f)))
        .count()
}

pub fn apinc(u: &[f64], v: &[f64]) -> f64 {
    let order = selection_order(u, true);
    let fv = v.iter().filter(|w| **w > 0.0).count() as f64;
    let mut total = 0.0;
    for r in 1..=order.len() {
        let f = order[r - 1];
        let rel = if v[f] > 0.0 {
            1.0 - rank_in_support(f, v) as f64 / (fv + 1.0)
        } else {
            0.0
        };
        let included = order[..r].iter().filter(|&&g| v[g] > 0.0).count();
        total += included as f64 / r as f64 * rel;
    }
    total / order.len() as f64
}

pub fn lin(u: &[f64], v: &[f64]) -> f64 {
    let mut shared = 0.0;
    for i in 0..u.len() {
        if u[i] > 0.0 && v[i] > 0.0 {
            shared += u[i] + v[i];
        }
    }
    shared / (u.iter().sum::<f64>() + v.iter().sum::<f64>())
}

pub fn bal_apinc(u: &[f64], v: &[f64]) -> f64 {
    (lin(u, v) * apinc(u, v)).sqrt()
}

pub fn sapinc(u: &[f64], v: &[f64]) -> f64 {
    let order = selection_order(u, false);
    let mut total = 0.0;
    for r in 1..=order.len() {
        let f = order[r - 1];
        let rel = if u[f] <= v[f] { 1.0 } else { 0.0 };
        let included = order[..r].iter().filter(|&&g| u[g] <= v[g]).count();
        total += included as f64 / r as f64 * rel;
    }
    total / u.len() as f64
}

fn smoothed(p: &[f64], eps: f64) -> Vec<f64> {
    let s: f64 = p.iter().sum();
    let base: Vec<f64> = if s > 0.0 { p.iter().map(|x| x / s).collect() } else { p.to_vec() };
    let t: f64 = base.iter().map(|x| x + eps).sum();
    base.iter().map(|x| (x + eps) / t).collect()
}

pub fn kl(p: &[f64], q: &[f64], eps: f64) -> f64 {
    let p = smoothed(p, eps);
    let q = smoothed(q, eps);
    p.iter().zip(&q).map(|(a, b)| a * (a.ln() - b.ln())).sum()
}

pub fn representativeness(u: &[f64], v: &[f64], eps: f64) -> f64 {
    1.0 / (1.0 + kl(u, v, eps))
}

pub fn sbal_apinc(u: &[f64], v: &[f64], eps: f64) -> f64 {
    (representativeness(u, v, eps) * sapinc(u, v)).sqrt()
}

/// Pairwise Mann-Whitney count.
pub fn auc(scores: &[f64], labels: &[bool]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for i in 0..scores.len() {
        for j in 0..scores.len() {
            if labels[i] && !labels[j] {
                pairs += 1.0;
                if scores[i] > scores[j] {
                    wins += 1.0;
                } else if scores[i] == scores[j] {
                    wins += 0.5;
                }
            }
        }
    }
    wins / pairs
}
