//! The tractability classifier.
//!
//! A language is tractable when its support language has a Mal'tsev
//! polymorphism and, for every quadruple `(α, β, κ, λ)`, the 6th power has an
//! automorphism fixing `𝔞` and sending `𝔟` to `𝔠`. Either failure yields
//! #P-hardness.

pub mod automorphism;
pub mod maltsev;
pub mod power;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_traits::One;
use rayon::prelude::*;

use crate::corpus;
use crate::error::{Error, Result};
use crate::model::{Instance, Language};
use crate::oracle::{BalanceVerdict, BalanceViolation, Oracle};
use crate::weight::{self, Weight};

pub use automorphism::find_automorphism;
pub use maltsev::{find_maltsev, ClosureCounterexample, TernaryOperation};
pub use power::{PowerInstance, PowerLanguage, Quadruple, SpecialElements};

/// Limits for the searches behind [`classify`].
#[derive(Clone, Copy, Debug)]
pub struct ClassifyConfig {
    /// Largest domain for the Mal'tsev search.
    pub max_maltsev_domain: usize,
    /// Largest power domain `d^6` for the automorphism search.
    pub max_power_elements: usize,
    /// Node limit per automorphism search.
    pub max_search_nodes: u64,
    /// Bounds for the fallback imbalance search when an automorphism search
    /// is out of bounds.
    pub witness_bounds: WitnessBounds,
    /// Enumeration bound, also used for power function tables.
    pub oracle: Oracle,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            max_maltsev_domain: 3,
            max_power_elements: 64,
            max_search_nodes: 1 << 16,
            witness_bounds: WitnessBounds::default(),
            oracle: Oracle::default(),
        }
    }
}

impl ClassifyConfig {
    /// Bounds large enough for three-element domains with binary functions.
    pub fn for_domain_three() -> Self {
        Self {
            max_power_elements: 729,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WitnessBounds {
    pub max_vars: usize,
    pub max_apps: usize,
}

impl Default for WitnessBounds {
    fn default() -> Self {
        Self {
            max_vars: 3,
            max_apps: 3,
        }
    }
}

/// Automorphisms found for each quadruple, in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub maltsev: TernaryOperation,
    pub automorphisms: Vec<(Quadruple, Vec<usize>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reason {
    /// No Mal'tsev polymorphism; the counterexample refutes the
    /// lexicographically first candidate on the support of `function`.
    NoMaltsev {
        function: String,
        counterexample: ClosureCounterexample,
    },
    NoAutomorphism(Quadruple),
    UnbalancedInstance {
        instance: Instance,
        violation: BalanceViolation,
    },
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reason::NoMaltsev {
                function,
                counterexample,
            } => {
                write!(f, "NoMaltsev({function}: {counterexample})")
            }
            Reason::NoAutomorphism(q) => write!(f, "NoAutomorphism{q}"),
            Reason::UnbalancedInstance { instance, violation } => write!(
                f,
                "UnbalancedInstance({instance}; split {}; {})",
                violation.split, violation.witness
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Tractable(Certificate),
    SharpPHard(Reason),
}

impl Verdict {
    pub fn is_tractable(&self) -> bool {
        matches!(self, Verdict::Tractable(_))
    }
}

/// The first relation (by function order) refuting `candidate`.
fn refutation(language: &Language, candidate: &TernaryOperation) -> Option<Reason> {
    language.functions().iter().find_map(|f| {
        candidate
            .is_polymorphism(&f.support())
            .err()
            .map(|counterexample| Reason::NoMaltsev {
                function: f.name().to_string(),
                counterexample,
            })
    })
}

pub fn classify(language: &Arc<Language>, config: &ClassifyConfig) -> Result<Verdict> {
    let support = language.support_language();
    let d = language.domain().size();
    let Some(maltsev) = find_maltsev(&support, config.max_maltsev_domain)? else {
        let reason = refutation(language, &maltsev::first_candidate(d))
            .ok_or_else(|| Error::Contract("no Mal'tsev polymorphism but no refutation".into()))?;
        return Ok(Verdict::SharpPHard(reason));
    };

    let searched = PowerLanguage::new(language.clone(), config.oracle.bound).map(|power| {
        let quads = Quadruple::all(d);
        let found: Vec<Result<Option<Vec<usize>>>> = quads
            .par_iter()
            .map(|&q| {
                let sp = power.special_elements(q)?;
                find_automorphism(&power, sp, config.max_power_elements, config.max_search_nodes)
            })
            .collect();
        quads.into_iter().zip(found).collect::<Vec<_>>()
    });
    let results = match searched {
        Ok(r) => r,
        Err(e @ Error::BoundExceeded { .. }) => return fallback(language, config, e),
        Err(e) => return Err(e),
    };
    if let Some((q, _)) = results.iter().find(|(_, r)| matches!(r, Ok(None))) {
        return Ok(Verdict::SharpPHard(Reason::NoAutomorphism(*q)));
    }
    let mut automorphisms = Vec::with_capacity(results.len());
    for (q, r) in results {
        match r {
            Ok(Some(pi)) => automorphisms.push((q, pi)),
            Ok(None) => unreachable!("handled above"),
            Err(e @ Error::BoundExceeded { .. }) => return fallback(language, config, e),
            Err(e) => return Err(e),
        }
    }
    Ok(Verdict::Tractable(Certificate { maltsev, automorphisms }))
}

/// When the automorphism search is out of bounds, a concrete unbalanced
/// instance still proves hardness; otherwise the resource error stands.
fn fallback(language: &Arc<Language>, config: &ClassifyConfig, err: Error) -> Result<Verdict> {
    match find_unbalanced_witness(language, config.witness_bounds, &config.oracle)? {
        Some((instance, violation)) => Ok(Verdict::SharpPHard(Reason::UnbalancedInstance { instance, violation })),
        None => Err(err),
    }
}

/// Multiplicities `N_1, .., N_k` such that `Π q_i^{N_i} = Π q'_i^{N_i}`
/// over `Q` forces `q_i = q'_i`. Each `N_{i+1}` starts at the least integer
/// with `c_min^{N_{i+1}} > c_max^{N_1 + .. + N_i}` and is raised until the
/// property checks out by brute force.
pub fn multiplicity_sequence(q: &[Weight], k: usize) -> Result<Vec<u64>> {
    let mut values: Vec<Weight> = q.to_vec();
    values.sort();
    values.dedup();
    if values.is_empty() || !values.iter().all(weight::is_positive) {
        return Err(Error::invalid("multiplicities need a nonempty set of positive values"));
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    if values.len() == 1 {
        return Ok(vec![1; k]);
    }
    let ratios: Vec<Weight> = values
        .iter()
        .enumerate()
        .flat_map(|(i, hi)| values[..i].iter().map(move |lo| hi / lo))
        .collect();
    let c_min = ratios.iter().min().expect("two values").clone();
    let c_max = ratios.iter().max().expect("two values").clone();
    let mut seq = vec![1u64];
    while seq.len() < k {
        let sum: u64 = seq.iter().sum();
        let bound = weight::pow(&c_max, sum as usize);
        let mut n = 1u64;
        let mut power = c_min.clone();
        while power <= bound {
            n += 1;
            power *= &c_min;
        }
        seq.push(n);
        while !products_unique(&values, &seq) {
            *seq.last_mut().expect("nonempty") += 1;
        }
    }
    Ok(seq)
}

/// Whether `Π q_i^{N_i}` determines `(q_1, .., q_k)` over `Q^k`.
pub fn products_unique(values: &[Weight], seq: &[u64]) -> bool {
    let k = seq.len();
    let mut seen: HashMap<Weight, ()> = HashMap::new();
    let total = values.len().pow(k as u32);
    (0..total).all(|mut idx| {
        let mut prod = Weight::one();
        for &n in seq.iter().rev() {
            prod *= weight::pow(&values[idx % values.len()], n as usize);
            idx /= values.len();
        }
        seen.insert(prod, ()).is_none()
    })
}

/// Scans instances by increasing variable count, then application count,
/// for one whose marginal matrices are not all block-rank-1. `None` is
/// inconclusive.
pub fn find_unbalanced_witness(
    language: &Arc<Language>,
    bounds: WitnessBounds,
    oracle: &Oracle,
) -> Result<Option<(Instance, BalanceViolation)>> {
    for n in 2..=bounds.max_vars {
        let apps = corpus::all_applications(language, n);
        for m in 0..=bounds.max_apps {
            let mut chosen = Vec::with_capacity(m);
            if let Some(found) = scan(language, n, &apps, 0, m, &mut chosen, oracle)? {
                return Ok(Some(found));
            }
        }
    }
    Ok(None)
}

fn scan(
    language: &Arc<Language>,
    n: usize,
    apps: &[crate::model::Application],
    start: usize,
    left: usize,
    chosen: &mut Vec<usize>,
    oracle: &Oracle,
) -> Result<Option<(Instance, BalanceViolation)>> {
    if left == 0 {
        let inst = Instance::with_applications(language.clone(), n, chosen.iter().map(|&k| apps[k].clone()).collect())?;
        return Ok(match oracle.test_balance(&inst)? {
            BalanceVerdict::Violated(v) => Some((inst, v)),
            BalanceVerdict::Balanced => None,
        });
    }
    for k in start..apps.len() {
        chosen.push(k);
        let found = scan(language, n, apps, k, left - 1, chosen, oracle)?;
        chosen.pop();
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Domain, FunctionTable};
    use crate::oracle::Split;
    use crate::weight::int;

    #[test]
    fn classify_examples() {
        let cfg = ClassifyConfig::default();
        let v = classify(&corpus::eqw_language(), &cfg).unwrap();
        match v {
            Verdict::Tractable(cert) => assert_eq!(cert.automorphisms.len(), 4),
            other => panic!("expected tractable, got {other:?}"),
        }
        assert_eq!(
            classify(&corpus::one2_language(), &cfg).unwrap(),
            Verdict::SharpPHard(Reason::NoAutomorphism(Quadruple {
                alpha: 0,
                beta: 1,
                kappa: 0,
                lambda: 1
            }))
        );
        match classify(&corpus::nand_language(), &cfg).unwrap() {
            Verdict::SharpPHard(Reason::NoMaltsev { function, .. }) => assert_eq!(function, "NAND"),
            other => panic!("expected NoMaltsev, got {other:?}"),
        }
    }

    #[test]
    fn fallback_reports_unbalanced_instance() {
        let cfg = ClassifyConfig {
            max_power_elements: 10,
            ..ClassifyConfig::default()
        };
        match classify(&corpus::one2_language(), &cfg).unwrap() {
            Verdict::SharpPHard(Reason::UnbalancedInstance { violation, .. }) => {
                assert_eq!(violation.split, Split { a: 1, b: 2, c: None })
            }
            other => panic!("expected an unbalanced instance, got {other:?}"),
        }
        assert!(matches!(
            classify(&corpus::eqw_language(), &cfg),
            Err(Error::BoundExceeded { .. })
        ));
    }

    #[test]
    fn multiplicity_examples() {
        assert_eq!(multiplicity_sequence(&[int(2), int(3)], 2).unwrap(), vec![1, 2]);
        assert_eq!(multiplicity_sequence(&[int(5)], 3).unwrap(), vec![1, 1, 1]);
        let seq = multiplicity_sequence(&[int(2), int(4)], 2).unwrap();
        assert_eq!(seq, vec![1, 2]);
        assert!(products_unique(&[int(2), int(4)], &seq));
        assert!(!products_unique(&[int(2), int(4)], &[1, 1]));
        assert!(multiplicity_sequence(&[], 2).is_err());
    }

    #[test]
    fn unbalanced_witness_examples() {
        let oracle = Oracle::default();
        let (inst, v) = find_unbalanced_witness(&corpus::one2_language(), WitnessBounds::default(), &oracle)
            .unwrap()
            .unwrap();
        assert_eq!(inst, corpus::single_constraint(&corpus::one2_language(), "ONE2"));
        assert_eq!(v.split, Split { a: 1, b: 2, c: None });
        assert_eq!(
            find_unbalanced_witness(&corpus::eqw_language(), WitnessBounds::default(), &oracle).unwrap(),
            None
        );
        let d = Domain::new(2).unwrap();
        let zero = FunctionTable::from_ints("Z", d, 2, &[0, 0, 0, 0]).unwrap();
        let lang = Arc::new(Language::new(d, vec![zero]).unwrap());
        assert_eq!(
            find_unbalanced_witness(&lang, WitnessBounds::default(), &oracle).unwrap(),
            None
        );
    }
}
