//! Directional entailment measures.
//!
//! Every measure takes `(u, v)` where `u` is the candidate entailing
//! (narrower) side and `v` the entailed (broader) side.
//!
//! Word-level inclusion measures (`weeds_prec`, `clarke_de`, `apinc`,
//! `bal_apinc`) only consider non-zero dimensions as features. The
//! sentence-level measures (`sapinc`, `sbal_apinc`) rank every dimension and
//! count a feature as included when `u_f <= v_f`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};
use crate::vector::{rank_features, support};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureConfig {
    /// Mixing weight of the skew divergence, in (0, 1].
    pub alpha: f64,
    /// Added to every coordinate before KL-family measures.
    pub epsilon: f64,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        Self {
            alpha: 0.99,
            epsilon: 1e-8,
        }
    }
}

impl MeasureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidConfig(format!("alpha {} not in (0, 1]", self.alpha)));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::InvalidConfig("epsilon must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Measure {
    #[serde(rename = "inclusion")]
    Inclusion,
    #[serde(rename = "kl")]
    Kl,
    #[serde(rename = "representativeness")]
    Representativeness,
    #[serde(rename = "alpha-skew")]
    AlphaSkew,
    #[serde(rename = "weedsprec")]
    WeedsPrec,
    #[serde(rename = "clarkede")]
    ClarkeDe,
    #[serde(rename = "lin")]
    Lin,
    #[serde(rename = "apinc")]
    Apinc,
    #[serde(rename = "balapinc")]
    BalApinc,
    #[serde(rename = "sapinc")]
    Sapinc,
    #[serde(rename = "sbalapinc")]
    SbalApinc,
}

impl Measure {
    pub const ALL: [Measure; 11] = [
        Measure::Inclusion,
        Measure::Kl,
        Measure::Representativeness,
        Measure::AlphaSkew,
        Measure::WeedsPrec,
        Measure::ClarkeDe,
        Measure::Lin,
        Measure::Apinc,
        Measure::BalApinc,
        Measure::Sapinc,
        Measure::SbalApinc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Inclusion => "inclusion",
            Measure::Kl => "kl",
            Measure::Representativeness => "representativeness",
            Measure::AlphaSkew => "alpha-skew",
            Measure::WeedsPrec => "weedsprec",
            Measure::ClarkeDe => "clarkede",
            Measure::Lin => "lin",
            Measure::Apinc => "apinc",
            Measure::BalApinc => "balapinc",
            Measure::Sapinc => "sapinc",
            Measure::SbalApinc => "sbalapinc",
        }
    }

    /// True for measures whose value lies in [0, 1].
    pub fn is_bounded(self) -> bool {
        !matches!(self, Measure::Kl | Measure::AlphaSkew)
    }

    /// Raw value of the measure on `(u, v)`.
    pub fn score(self, u: &[f64], v: &[f64], config: &MeasureConfig) -> Result<MeasureScore> {
        let value = match self {
            Measure::Inclusion => strict_inclusion(u, v)?,
            Measure::Kl => kl_divergence(u, v, config)?,
            Measure::Representativeness => representativeness(u, v, config)?,
            Measure::AlphaSkew => alpha_skew(u, v, config)?,
            Measure::WeedsPrec => weeds_prec(u, v)?,
            Measure::ClarkeDe => clarke_de(u, v)?,
            Measure::Lin => lin_similarity(u, v)?,
            Measure::Apinc => apinc(u, v)?,
            Measure::BalApinc => bal_apinc(u, v)?,
            Measure::Sapinc => sapinc(u, v)?,
            Measure::SbalApinc => sbal_apinc(u, v, config)?,
        };
        Ok(MeasureScore {
            measure: self,
            value,
        })
    }

    /// Score oriented so that larger means "u entails v" more strongly.
    ///
    /// Divergences are negated. The skew divergence is taken of `u` from the
    /// mixture `alpha * v + (1 - alpha) * u`, i.e. `-alpha_skew(v, u)`. A zero
    /// `u` scores 0 on the bounded inclusion measures instead of failing.
    pub fn entailment_score(self, u: &[f64], v: &[f64], config: &MeasureConfig) -> Result<f64> {
        let raw = match self {
            Measure::Kl => return Ok(-kl_divergence(u, v, config)?),
            Measure::AlphaSkew => return Ok(-alpha_skew(v, u, config)?),
            _ => self.score(u, v, config),
        };
        match raw {
            Ok(s) => Ok(s.value),
            Err(Error::ZeroVector) => Ok(0.0),
            Err(e) => Err(e),
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureScore {
    pub measure: Measure,
    pub value: f64,
}

fn nonzero_sum(u: &[f64]) -> Result<f64> {
    let s: f64 = u.iter().sum();
    if s > 0.0 {
        Ok(s)
    } else {
        Err(Error::ZeroVector)
    }
}

/// 1 if the support of `u` is contained in the support of `v`, else 0.
pub fn strict_inclusion(u: &[f64], v: &[f64]) -> Result<f64> {
    check_dims(u.len(), v.len())?;
    Ok(if support(u).is_subset(&support(v)) { 1.0 } else { 0.0 })
}

/// L1-normalize (when possible), add `epsilon` everywhere, renormalize.
fn smooth(p: &[f64], epsilon: f64) -> Vec<f64> {
    let s: f64 = p.iter().sum();
    let scale = if s > 0.0 { 1.0 / s } else { 1.0 };
    let total = 1.0 + p.len() as f64 * epsilon;
    let total = if s > 0.0 { total } else { p.len() as f64 * epsilon };
    p.iter().map(|x| (x * scale + epsilon) / total).collect()
}

fn kl_of(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(a, _)| **a > 0.0)
        .map(|(a, b)| a * (a.ln() - b.ln()))
        .sum::<f64>()
        .max(0.0)
}

/// `D_KL(p || q)` over add-epsilon smoothed distributions.
pub fn kl_divergence(p: &[f64], q: &[f64], config: &MeasureConfig) -> Result<f64> {
    check_dims(p.len(), q.len())?;
    if p.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(kl_of(&smooth(p, config.epsilon), &smooth(q, config.epsilon)))
}

/// `1 / (1 + D_KL(u || v))`: how well the broader `v` represents `u`.
pub fn representativeness(u: &[f64], v: &[f64], config: &MeasureConfig) -> Result<f64> {
    Ok(1.0 / (1.0 + kl_divergence(u, v, config)?))
}

/// `D_KL(v || alpha * u + (1 - alpha) * v)` over smoothed distributions.
pub fn alpha_skew(u: &[f64], v: &[f64], config: &MeasureConfig) -> Result<f64> {
    check_dims(u.len(), v.len())?;
    if u.is_empty() {
        return Err(Error::EmptyInput);
    }
    let a = config.alpha;
    let su = smooth(u, config.epsilon);
    let sv = smooth(v, config.epsilon);
    let mix: Vec<f64> = su.iter().zip(&sv).map(|(x, y)| a * x + (1.0 - a) * y).collect();
    Ok(kl_of(&sv, &mix))
}

/// Share of `u`'s weight that falls on features shared with `v`.
pub fn weeds_prec(u: &[f64], v: &[f64]) -> Result<f64> {
    check_dims(u.len(), v.len())?;
    let total = nonzero_sum(u)?;
    let shared: f64 = u
        .iter()
        .zip(v)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, _)| a)
        .sum();
    Ok(shared / total)
}

pub fn clarke_de(u: &[f64], v: &[f64]) -> Result<f64> {
    check_dims(u.len(), v.len())?;
    let total = nonzero_sum(u)?;
    let overlap: f64 = u.iter().zip(v).map(|(a, b)| a.min(*b)).sum();
    Ok(overlap / total)
}

/// Lin's similarity: weight on shared features over total weight. Symmetric.
pub fn lin_similarity(u: &[f64], v: &[f64]) -> Result<f64> {
    check_dims(u.len(), v.len())?;
    let total: f64 = u.iter().chain(v).sum();
    if total <= 0.0 {
        return Err(Error::ZeroVector);
    }
    let shared: f64 = u
        .iter()
        .zip(v)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| a + b)
        .sum();
    Ok(shared / total)
}

/// Average inclusion precision over the ranked features of `u`, each
/// weighted by the relevance of its rank in `v`.
pub fn apinc(u: &[f64], v: &[f64]) -> Result<f64> {
    check_dims(u.len(), v.len())?;
    nonzero_sum(u)?;
    let ranked_u = rank_features(u, true);
    let ranked_v = rank_features(v, true);
    let v_ranks = ranked_v.rank_table(v.len());
    let v_features = ranked_v.len() as f64;

    let mut included = 0usize;
    let mut total = 0.0;
    for (r, &(f, _)) in ranked_u.entries().iter().enumerate() {
        let rel = match v_ranks[f] {
            Some(rank) => {
                included += 1;
                1.0 - rank as f64 / (v_features + 1.0)
            }
            None => 0.0,
        };
        total += included as f64 / (r + 1) as f64 * rel;
    }
    Ok(total / ranked_u.len() as f64)
}

/// Geometric mean of [`lin_similarity`] and [`apinc`]; 0 when `u` is zero.
pub fn bal_apinc(u: &[f64], v: &[f64]) -> Result<f64> {
    check_dims(u.len(), v.len())?;
    if u.iter().all(|x| *x == 0.0) {
        return Ok(0.0);
    }
    Ok((lin_similarity(u, v)? * apinc(u, v)?).sqrt())
}

/// Sentence-level APinc: every dimension is a feature, included at its rank
/// when `u_f <= v_f`. The denominator is the full dimensionality.
pub fn sapinc(u: &[f64], v: &[f64]) -> Result<f64> {
    check_dims(u.len(), v.len())?;
    if u.is_empty() {
        return Err(Error::EmptyInput);
    }
    let ranked = rank_features(u, false);
    let mut included = 0usize;
    let mut total = 0.0;
    for (r, &(f, w)) in ranked.entries().iter().enumerate() {
        if w <= v[f] {
            included += 1;
            total += included as f64 / (r + 1) as f64;
        }
    }
    Ok(total / u.len() as f64)
}

/// Geometric mean of [`representativeness`] and [`sapinc`].
pub fn sbal_apinc(u: &[f64], v: &[f64], config: &MeasureConfig) -> Result<f64> {
    Ok((representativeness(u, v, config)? * sapinc(u, v)?).sqrt())
}
