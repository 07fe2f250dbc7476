//! Structured counting through the witness functions `t_2, .., t_n`.
//!
//! With `s` an instance vector representation and `R` the support of `F_I`,
//! the `t` functions make every conditional sum a closed-form product:
//!
//! ```text
//! Σ_{x_{i+1..n}} F(u_1..u_i, x_{i+1..n}) = s_1(u_1)···s_i(u_i) · Π_{j>i} s_j(u_j)/t_j(u_j)
//! ```
//!
//! for every `u ∈ R`, so `Z(I)` needs one member tuple per element of
//! `pr_1 R`.

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::dichotomy::{classify, ClassifyConfig, Verdict};
use crate::error::{Error, Result};
use crate::model::{Instance, Language, RelationTable};
use crate::oracle::{self, Oracle};
use crate::vecrep::{LanguageVecreps, VectorRepresentation};
use crate::weight::Weight;

/// `t_j` for the zero-based coordinates `1..n`; coordinate 0 has none.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TFunctions {
    functions: Vec<Vec<Weight>>,
}

impl TFunctions {
    /// `t_j` for zero-based coordinate `j >= 1`.
    pub fn get(&self, j: usize) -> Option<&[Weight]> {
        j.checked_sub(1).and_then(|k| self.functions.get(k)).map(Vec::as_slice)
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    /// Number of coordinates carrying a `t` function (`n - 1`).
    pub fn len(&self) -> usize {
        self.functions.len()
    }

    fn t(&self, j: usize, a: usize) -> &Weight {
        &self.functions[j - 1][a]
    }

    /// `Π_{j >= from} s_j(u_j)/t_j(u_j)`.
    fn tail_ratio(&self, s: &VectorRepresentation, u: &[usize], from: usize) -> Weight {
        (from.max(1)..u.len()).fold(Weight::one(), |acc, j| acc * s.value(j, u[j]) / self.t(j, u[j]))
    }

    /// The closed form of the conditional sum with the first `prefix`
    /// coordinates of `u` fixed (`1 <= prefix < n`). Only meaningful for
    /// `u ∈ R`.
    pub fn closed_form(&self, s: &VectorRepresentation, u: &[usize], prefix: usize) -> Weight {
        let head = (0..prefix).fold(Weight::one(), |acc, j| acc * s.value(j, u[j]));
        head * self.tail_ratio(s, u, prefix)
    }
}

fn not_applicable(e: impl std::fmt::Display) -> Error {
    Error::NotApplicable(e.to_string())
}

/// Builds `t_n` down to `t_2` from the witnesses of `rel = R_I`.
pub fn t_functions(rel: &RelationTable, s: &VectorRepresentation) -> Result<TFunctions> {
    let n = rel.arity();
    let d = rel.domain().size();
    if s.arity() != n {
        return Err(Error::invalid(format!("representation arity {} != {n}", s.arity())));
    }
    let mut t = TFunctions {
        functions: vec![vec![Weight::zero(); d]; n.saturating_sub(1)],
    };
    for i in (1..n).rev() {
        let bundle = oracle::witnesses(rel, i)?.map_err(not_applicable)?;
        for class in &bundle.classes {
            let weights: Vec<Weight> = class
                .members
                .iter()
                .zip(&class.suffixes)
                .map(|(&a, v)| {
                    // The shared prefix contributes the same factor to every
                    // member, so only the suffix ratios matter.
                    let tail = v.iter().enumerate().fold(Weight::one(), |acc, (k, &x)| {
                        acc * s.value(i + 1 + k, x) / t.t(i + 1 + k, x)
                    });
                    s.value(i, a) * tail
                })
                .collect();
            let total = weights.iter().fold(Weight::zero(), |acc, w| acc + w);
            if total.is_zero() {
                return Err(Error::Contract(format!(
                    "class {:?} at coordinate {} has zero weight",
                    class.members, i
                )));
            }
            for (&a, w) in class.members.iter().zip(weights) {
                t.functions[i - 1][a] = w / &total;
            }
        }
    }
    Ok(t)
}

/// `Z(I) = Σ_{a ∈ pr_1 R} s_1(a) Π_{j>=2} s_j(u_{a,j})/t_j(u_{a,j})`.
pub fn partition_sum(rel: &RelationTable, s: &VectorRepresentation, t: &TFunctions) -> Result<Weight> {
    Ok(oracle::projection(rel, 0)?.iter().fold(Weight::zero(), |acc, (a, u)| {
        acc + s.value(0, *a) * t.tail_ratio(s, u, 1)
    }))
}

/// Structured counter for one language, available only once the language
/// has been certified tractable.
#[derive(Clone, Debug)]
pub struct Counter {
    language: Arc<Language>,
    reps: LanguageVecreps,
    oracle: Oracle,
}

impl Counter {
    /// Classifies `language` and builds a counter if it is tractable.
    pub fn new(language: Arc<Language>, config: &ClassifyConfig) -> Result<Self> {
        let verdict = classify(&language, config)?;
        Self::with_verdict(language, &verdict, config.oracle)
    }

    /// Builds a counter from an existing verdict for `language`.
    pub fn with_verdict(language: Arc<Language>, verdict: &Verdict, oracle: Oracle) -> Result<Self> {
        if let Verdict::SharpPHard(reason) = verdict {
            return Err(Error::NotApplicable(format!("language is #P-hard: {reason}")));
        }
        let reps = LanguageVecreps::new(&language);
        if let Some(e) = reps.first_failure(&language) {
            return Err(Error::Contract(format!(
                "certified language lacks a vector representation: {e}"
            )));
        }
        Ok(Self { language, reps, oracle })
    }

    pub fn language(&self) -> &Arc<Language> {
        &self.language
    }

    fn check(&self, inst: &Instance) -> Result<()> {
        if inst.language() != &self.language && **inst.language() != *self.language {
            return Err(Error::invalid("instance is over a different language"));
        }
        Ok(())
    }

    pub fn vecrep(&self, inst: &Instance) -> Result<VectorRepresentation> {
        self.check(inst)?;
        self.reps
            .instance_vecrep(inst)
            .map_err(|e| Error::Contract(e.to_string()))
    }

    /// The support `R_I`, its vector representation and the `t` functions.
    pub fn prepare(&self, inst: &Instance) -> Result<(RelationTable, VectorRepresentation, TFunctions)> {
        let s = self.vecrep(inst)?;
        let rel = self.oracle.relation_of(inst)?;
        let t = t_functions(&rel, &s)?;
        Ok((rel, s, t))
    }

    pub fn count(&self, inst: &Instance) -> Result<Weight> {
        let (rel, s, t) = self.prepare(inst)?;
        partition_sum(&rel, &s, &t)
    }
}
