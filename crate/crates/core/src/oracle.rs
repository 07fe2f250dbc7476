//! Brute-force ground truth.
//!
//! Everything here enumerates `D^n` explicitly, so every entry point checks
//! the configured bound first. The enumeration of `F_I` runs in parallel on
//! the current rayon pool.

use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactmat::{is_block_rank_1, RankWitness, RationalMatrix};
use crate::model::{Domain, FunctionTable, Instance, RelationTable, Tuple};
use crate::weight::{self, Weight};

pub const DEFAULT_BOUND: u64 = 10_000_000;

const PAR_MIN_LEN: usize = 2048;

/// Enumeration engine with a bound on `d^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Oracle {
    pub bound: u64,
}

impl Default for Oracle {
    fn default() -> Self {
        Self { bound: DEFAULT_BOUND }
    }
}

/// A split of the coordinates into `u = [0, a)`, `v = [a, b)`, then
/// `w = [b, c)` and `z = [c, n)` (`c` only for the existential matrices).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Split {
    pub a: usize,
    pub b: usize,
    pub c: Option<usize>,
}

impl std::fmt::Display for Split {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.c {
            Some(c) => write!(f, "({},{},{})", self.a, self.b, c),
            None => write!(f, "({},{})", self.a, self.b),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalanceViolation {
    pub split: Split,
    pub matrix: RationalMatrix,
    pub witness: RankWitness,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BalanceVerdict {
    Balanced,
    Violated(BalanceViolation),
}

impl BalanceVerdict {
    pub fn is_balanced(&self) -> bool {
        matches!(self, BalanceVerdict::Balanced)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BalanceMode {
    /// Every split `1 <= a < b <= n`.
    Full,
    /// Only `b = a + 1`.
    Weak,
    /// Only `(a, b) = (1, 2)`.
    Primitive,
    /// Existential matrices for every `1 <= a < b <= c <= n`.
    Strong,
}

/// `a ~ b` and `b ~ c` but not `a ~ c` at one coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NotEquivalence {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum StructureError {
    #[error("~ is not transitive at coordinate {coordinate}: {} ~ {} ~ {} but not {} ~ {}",
        .witness.a + 1, .witness.b + 1, .witness.c + 1, .witness.a + 1, .witness.c + 1)]
    NotEquivalence { coordinate: usize, witness: NotEquivalence },
    #[error("no single prefix extends every element of class {class:?} at coordinate {coordinate}")]
    NoCommonPrefix { coordinate: usize, class: Vec<usize> },
}

/// The witnesses for one class `E_{i,k}`: a shared prefix and one suffix per
/// member with `(prefix, a, suffix) ∈ R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassWitness {
    pub members: Vec<usize>,
    pub prefix: Tuple,
    pub suffixes: Vec<Tuple>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessBundle {
    pub coordinate: usize,
    pub classes: Vec<ClassWitness>,
}

impl WitnessBundle {
    /// Index of the class containing `a`.
    pub fn class_of(&self, a: usize) -> Option<usize> {
        self.classes.iter().position(|c| c.members.contains(&a))
    }
}

impl Oracle {
    pub fn new(bound: u64) -> Self {
        Self { bound }
    }

    /// `d^n`, or a resource error when it exceeds the bound.
    pub fn space(&self, domain: Domain, n: usize) -> Result<usize> {
        let required = (domain.size() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if required > self.bound as u128 {
            return Err(Error::BoundExceeded {
                what: "assignment enumeration",
                required,
                bound: self.bound as u128,
            });
        }
        Ok(required as usize)
    }

    /// `F_I` tabulated over `D^n` in row-major order.
    pub fn function_values(&self, inst: &Instance) -> Result<Vec<Weight>> {
        let total = self.space(inst.domain(), inst.num_vars())?;
        let (d, n) = (inst.domain(), inst.num_vars());
        Ok((0..total)
            .into_par_iter()
            .with_min_len(PAR_MIN_LEN)
            .map(|idx| inst.evaluate_unchecked(&d.tuple_of(idx, n)))
            .collect())
    }

    /// `F_I` as an `n`-ary function table.
    pub fn instance_function(&self, inst: &Instance) -> Result<FunctionTable> {
        FunctionTable::new("F", inst.domain(), inst.num_vars(), self.function_values(inst)?)
    }

    /// `Z(I) = Σ_x F_I(x)`.
    pub fn partition_function(&self, inst: &Instance) -> Result<Weight> {
        let total = self.space(inst.domain(), inst.num_vars())?;
        let (d, n) = (inst.domain(), inst.num_vars());
        Ok((0..total)
            .into_par_iter()
            .with_min_len(PAR_MIN_LEN)
            .map(|idx| inst.evaluate_unchecked(&d.tuple_of(idx, n)))
            .reduce(Weight::zero, |a, b| a + b))
    }

    /// `R_I = {x : F_I(x) > 0}`.
    pub fn relation_of(&self, inst: &Instance) -> Result<RelationTable> {
        let total = self.space(inst.domain(), inst.num_vars())?;
        let (d, n) = (inst.domain(), inst.num_vars());
        let members = (0..total)
            .into_par_iter()
            .with_min_len(PAR_MIN_LEN)
            .map(|idx| inst.is_supported(&d.tuple_of(idx, n)))
            .collect();
        Ok(RelationTable::from_membership(d, n, members))
    }

    /// `M(u, v) = Σ_w F(u, v, w)` with `u ∈ D^a`, `v ∈ D^(b-a)`.
    pub fn marginal_matrix(&self, inst: &Instance, a: usize, b: usize) -> Result<RationalMatrix> {
        check_split(inst.num_vars(), a, b, None)?;
        let values = self.function_values(inst)?;
        marginal_from_values(inst.domain(), inst.num_vars(), &values, a, b)
    }

    /// `M(u, v) = |{w ∈ D^(c-b) : ∃ z, (u, v, w, z) ∈ R_I}|`.
    pub fn existential_matrix(&self, inst: &Instance, a: usize, b: usize, c: usize) -> Result<RationalMatrix> {
        check_split(inst.num_vars(), a, b, Some(c))?;
        existential_matrix_of(&self.relation_of(inst)?, a, b, c)
    }

    /// Runs one of the balance batteries on a single instance, reporting the
    /// first failing split in scan order (`a` ascending, then `b`, then `c`).
    pub fn test_balance_mode(&self, inst: &Instance, mode: BalanceMode) -> Result<BalanceVerdict> {
        let n = inst.num_vars();
        let d = inst.domain();
        match mode {
            BalanceMode::Strong => {
                let rel = self.relation_of(inst)?;
                for a in 1..n {
                    for b in a + 1..=n {
                        for c in b..=n {
                            let m = existential_matrix_of(&rel, a, b, c)?;
                            if let Err(witness) = is_block_rank_1(&m) {
                                return Ok(BalanceVerdict::Violated(BalanceViolation {
                                    split: Split { a, b, c: Some(c) },
                                    matrix: m,
                                    witness,
                                }));
                            }
                        }
                    }
                }
                Ok(BalanceVerdict::Balanced)
            }
            _ => {
                let values = self.function_values(inst)?;
                let splits: Vec<(usize, usize)> = match mode {
                    BalanceMode::Full => (1..n).flat_map(|a| (a + 1..=n).map(move |b| (a, b))).collect(),
                    BalanceMode::Weak => (1..n).map(|a| (a, a + 1)).collect(),
                    BalanceMode::Primitive if n >= 2 => vec![(1, 2)],
                    _ => vec![],
                };
                for (a, b) in splits {
                    let m = marginal_from_values(d, n, &values, a, b)?;
                    if let Err(witness) = is_block_rank_1(&m) {
                        return Ok(BalanceVerdict::Violated(BalanceViolation {
                            split: Split { a, b, c: None },
                            matrix: m,
                            witness,
                        }));
                    }
                }
                Ok(BalanceVerdict::Balanced)
            }
        }
    }

    pub fn test_balance(&self, inst: &Instance) -> Result<BalanceVerdict> {
        self.test_balance_mode(inst, BalanceMode::Full)
    }

    pub fn test_weak_balance(&self, inst: &Instance) -> Result<BalanceVerdict> {
        self.test_balance_mode(inst, BalanceMode::Weak)
    }

    pub fn test_primitive_balance(&self, inst: &Instance) -> Result<BalanceVerdict> {
        self.test_balance_mode(inst, BalanceMode::Primitive)
    }

    pub fn test_strong_balance(&self, inst: &Instance) -> Result<BalanceVerdict> {
        self.test_balance_mode(inst, BalanceMode::Strong)
    }
}

fn check_split(n: usize, a: usize, b: usize, c: Option<usize>) -> Result<()> {
    let ok = 1 <= a && a < b && b <= n && c.is_none_or(|c| b <= c && c <= n);
    if !ok {
        return Err(Error::invalid(format!(
            "split a={a} b={b}{} invalid for n={n}",
            c.map(|c| format!(" c={c}")).unwrap_or_default()
        )));
    }
    Ok(())
}

fn split_labels(domain: Domain, a: usize, b: usize) -> (Vec<Tuple>, Vec<Tuple>) {
    (domain.tuples(a).collect(), domain.tuples(b - a).collect())
}

/// Marginal matrix from a tabulated `F`.
pub fn marginal_from_values(domain: Domain, n: usize, values: &[Weight], a: usize, b: usize) -> Result<RationalMatrix> {
    check_split(n, a, b, None)?;
    let tail = domain.count(n - b).expect("within enumerated space");
    let entries = values
        .chunks(tail)
        .map(|chunk| chunk.iter().fold(Weight::zero(), |acc, w| acc + w))
        .collect();
    let (rows, cols) = split_labels(domain, a, b);
    RationalMatrix::new(rows, cols, entries)
}

/// Existential counting matrix of an explicit relation.
pub fn existential_matrix_of(rel: &RelationTable, a: usize, b: usize, c: usize) -> Result<RationalMatrix> {
    let (domain, n) = (rel.domain(), rel.arity());
    check_split(n, a, b, Some(c))?;
    let z_len = domain.count(n - c).expect("within relation");
    let w_len = domain.count(c - b).expect("within relation");
    let cells = domain.count(c).expect("within relation");
    let exists: Vec<bool> = (0..cells)
        .map(|p| (p * z_len..(p + 1) * z_len).any(|idx| rel.contains_index(idx)))
        .collect();
    let entries = exists
        .chunks(w_len)
        .map(|chunk| weight::int(chunk.iter().filter(|&&e| e).count() as i64))
        .collect();
    let (rows, cols) = split_labels(domain, a, b);
    RationalMatrix::new(rows, cols, entries)
}

/// `pr_i R` with the lexicographically least member tuple for each element.
pub fn projection(rel: &RelationTable, i: usize) -> Result<Vec<(usize, Tuple)>> {
    if i >= rel.arity() {
        return Err(Error::invalid(format!("coordinate {i} outside arity {}", rel.arity())));
    }
    let d = rel.domain().size();
    let mut first: Vec<Option<Tuple>> = vec![None; d];
    for t in rel.iter() {
        let slot = &mut first[t[i]];
        if slot.is_none() {
            *slot = Some(t);
        }
    }
    Ok(first
        .into_iter()
        .enumerate()
        .filter_map(|(a, t)| t.map(|t| (a, t)))
        .collect())
}

/// For coordinate `i`: the lexicographically least suffix index extending
/// `(prefix, a)`, indexed by `prefix_index * d + a`.
struct Extensions {
    d: usize,
    prefixes: usize,
    least_suffix: Vec<Option<usize>>,
}

impl Extensions {
    fn new(rel: &RelationTable, i: usize) -> Self {
        let dom = rel.domain();
        let d = dom.size();
        let n = rel.arity();
        let prefixes = dom.count(i).expect("within relation");
        let suffixes = dom.count(n - i - 1).expect("within relation");
        let mut least_suffix = vec![None; prefixes * d];
        // Row-major order visits suffixes in ascending order for each (prefix, a).
        for (idx, slot) in least_suffix.iter_mut().enumerate() {
            let base = idx * suffixes;
            *slot = (0..suffixes).find(|s| rel.contains_index(base + s));
        }
        Self {
            d,
            prefixes,
            least_suffix,
        }
    }

    fn extends(&self, prefix: usize, a: usize) -> bool {
        self.least_suffix[prefix * self.d + a].is_some()
    }
}

/// The classes of `~_i` on `pr_i R`, ordered by least element, or a
/// transitivity counterexample.
pub fn equivalence_classes(rel: &RelationTable, i: usize) -> Result<Result<Vec<Vec<usize>>, NotEquivalence>> {
    if i >= rel.arity() {
        return Err(Error::invalid(format!("coordinate {i} outside arity {}", rel.arity())));
    }
    Ok(classes_from(&Extensions::new(rel, i)))
}

fn classes_from(ext: &Extensions) -> Result<Vec<Vec<usize>>, NotEquivalence> {
    let d = ext.d;
    let mut related = vec![false; d * d];
    for p in 0..ext.prefixes {
        let present: Vec<usize> = (0..d).filter(|&a| ext.extends(p, a)).collect();
        for &x in &present {
            for &y in &present {
                related[x * d + y] = true;
            }
        }
    }
    let rel = |x: usize, y: usize| related[x * d + y];
    let support: Vec<usize> = (0..d).filter(|&x| rel(x, x)).collect();
    for &a in &support {
        for &b in &support {
            if !rel(a, b) || a == b {
                continue;
            }
            for &c in &support {
                if rel(b, c) && !rel(a, c) {
                    return Err(NotEquivalence { a, b, c });
                }
            }
        }
    }
    let mut seen = vec![false; d];
    let mut classes = Vec::new();
    for &a in &support {
        if seen[a] {
            continue;
        }
        let class: Vec<usize> = support.iter().copied().filter(|&b| rel(a, b)).collect();
        class.iter().for_each(|&b| seen[b] = true);
        classes.push(class);
    }
    Ok(classes)
}

/// Prefix and suffix witnesses for every class of `~_i`, chosen
/// lexicographically least.
pub fn witnesses(rel: &RelationTable, i: usize) -> Result<Result<WitnessBundle, StructureError>> {
    if i >= rel.arity() {
        return Err(Error::invalid(format!("coordinate {i} outside arity {}", rel.arity())));
    }
    let dom = rel.domain();
    let ext = Extensions::new(rel, i);
    let classes = match classes_from(&ext) {
        Ok(c) => c,
        Err(witness) => return Ok(Err(StructureError::NotEquivalence { coordinate: i, witness })),
    };
    let suffix_len = rel.arity() - i - 1;
    let mut out = Vec::with_capacity(classes.len());
    for members in classes {
        let Some(p) = (0..ext.prefixes).find(|&p| members.iter().all(|&a| ext.extends(p, a))) else {
            return Ok(Err(StructureError::NoCommonPrefix {
                coordinate: i,
                class: members,
            }));
        };
        let suffixes = members
            .iter()
            .map(|&a| dom.tuple_of(ext.least_suffix[p * ext.d + a].expect("extends"), suffix_len))
            .collect();
        out.push(ClassWitness {
            members,
            prefix: dom.tuple_of(p, i),
            suffixes,
        });
    }
    Ok(Ok(WitnessBundle {
        coordinate: i,
        classes: out,
    }))
}
