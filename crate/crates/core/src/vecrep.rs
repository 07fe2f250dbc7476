//! Vector representations: unary factors `s_1, .., s_r` with
//! `f(x) = s_1(x_1)···s_r(x_r)` wherever `f(x) > 0`.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::Result;
use crate::exactmat::{is_block_rank_1, Block, RationalMatrix};
use crate::model::{FunctionTable, Instance, Language};
use crate::oracle::Oracle;
use crate::weight::{self, Weight};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorRepresentation {
    factors: Vec<Vec<Weight>>,
}

/// `f^[level]` (1-based) is not block-rank-1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("marginal of level {level} is not block-rank-1")]
pub struct NotBlockRank1 {
    pub level: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("function {function}: {cause}")]
pub struct FunctionNotRepresentable {
    pub function: String,
    pub cause: NotBlockRank1,
}

impl VectorRepresentation {
    pub fn new(factors: Vec<Vec<Weight>>) -> Self {
        Self { factors }
    }

    /// All-ones factors for `arity` positions over a domain of size `d`.
    pub fn ones(arity: usize, d: usize) -> Self {
        Self {
            factors: vec![vec![Weight::one(); d]; arity],
        }
    }

    pub fn arity(&self) -> usize {
        self.factors.len()
    }

    /// `s_j` for the zero-based position `j`.
    pub fn factor(&self, j: usize) -> &[Weight] {
        &self.factors[j]
    }

    pub fn factors(&self) -> &[Vec<Weight>] {
        &self.factors
    }

    pub fn value(&self, j: usize, a: usize) -> &Weight {
        &self.factors[j][a]
    }

    /// `s_1(x_1)···s_r(x_r)`.
    pub fn product(&self, x: &[usize]) -> Weight {
        x.iter()
            .zip(&self.factors)
            .fold(Weight::one(), |acc, (&a, s)| acc * &s[a])
    }
}

impl fmt::Display for VectorRepresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, s) in self.factors.iter().enumerate() {
            if j > 0 {
                writeln!(f)?;
            }
            write!(f, "s{}=", j + 1)?;
            for (a, w) in s.iter().enumerate() {
                if a > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", weight::format(w, false))?;
            }
        }
        Ok(())
    }
}

/// `f^[level]` as a `d^(level-1) x d` matrix.
fn level_matrix(f: &FunctionTable, level: usize) -> Result<RationalMatrix> {
    let g = f.marginalize(level)?;
    let d = f.domain();
    RationalMatrix::new(
        d.tuples(level - 1).collect(),
        d.tuples(1).collect(),
        g.values().to_vec(),
    )
}

/// Vector representation built from the lexicographically least row of
/// each block.
pub fn function_vecrep(f: &FunctionTable) -> Result<VectorRepresentation, NotBlockRank1> {
    function_vecrep_with(f, |block| block.rows[0])
}

/// Same construction, with `choose` picking the reference row of each block.
pub fn function_vecrep_with(
    f: &FunctionTable,
    mut choose: impl FnMut(&Block) -> usize,
) -> Result<VectorRepresentation, NotBlockRank1> {
    let d = f.domain().size();
    let mut factors = vec![f.marginalize(1).expect("level 1 exists").values().to_vec()];
    for level in 2..=f.arity() {
        let m = level_matrix(f, level).expect("valid level");
        let blocks = is_block_rank_1(&m).map_err(|_| NotBlockRank1 { level })?;
        let mut s = vec![Weight::zero(); d];
        for block in &blocks.blocks {
            let u = choose(block);
            debug_assert!(block.rows.contains(&u));
            let total = block.cols.iter().fold(Weight::zero(), |acc, &v| acc + m.get(u, v));
            for &v in &block.cols {
                s[v] = m.get(u, v) / &total;
            }
        }
        factors.push(s);
    }
    Ok(VectorRepresentation { factors })
}

/// Representations of every function of a language, computed once.
#[derive(Clone, Debug)]
pub struct LanguageVecreps {
    reps: Vec<Result<VectorRepresentation, NotBlockRank1>>,
}

impl LanguageVecreps {
    pub fn new(language: &Language) -> Self {
        Self {
            reps: language.functions().iter().map(function_vecrep).collect(),
        }
    }

    pub fn get(&self, function: usize) -> &Result<VectorRepresentation, NotBlockRank1> {
        &self.reps[function]
    }

    /// The first function without a representation, if any.
    pub fn first_failure(&self, language: &Language) -> Option<FunctionNotRepresentable> {
        self.reps.iter().enumerate().find_map(|(i, r)| {
            r.as_ref().err().map(|&cause| FunctionNotRepresentable {
                function: language.function(i).name().to_string(),
                cause,
            })
        })
    }

    /// Multiplies the per-function factors into per-variable factors.
    pub fn instance_vecrep(&self, inst: &Instance) -> Result<VectorRepresentation, FunctionNotRepresentable> {
        let mut out = VectorRepresentation::ones(inst.num_vars(), inst.domain().size());
        for app in inst.applications() {
            let rep = self.reps[app.function]
                .as_ref()
                .map_err(|&cause| FunctionNotRepresentable {
                    function: inst.language().function(app.function).name().to_string(),
                    cause,
                })?;
            for (j, &var) in app.vars.iter().enumerate() {
                for (a, w) in out.factors[var].iter_mut().enumerate() {
                    *w *= &rep.factors[j][a];
                }
            }
        }
        Ok(out)
    }
}

/// Instance vector representation, computing the language's representations
/// on the fly.
pub fn instance_vecrep(inst: &Instance) -> Result<VectorRepresentation, FunctionNotRepresentable> {
    LanguageVecreps::new(inst.language()).instance_vecrep(inst)
}

/// Whether `s` represents `f` at every support point.
pub fn verify_function_vecrep(f: &FunctionTable, s: &VectorRepresentation) -> bool {
    s.arity() == f.arity()
        && f.domain()
            .tuples(f.arity())
            .zip(f.values())
            .all(|(x, v)| v.is_zero() || s.product(&x) == *v)
}

/// Whether `s` represents `F_I` at every support point, by enumeration.
pub fn verify_instance_vecrep(oracle: &Oracle, inst: &Instance, s: &VectorRepresentation) -> Result<bool> {
    let f = oracle.instance_function(inst)?;
    Ok(verify_function_vecrep(&f, s))
}
