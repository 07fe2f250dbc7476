//! Named fixtures and seeded random generators for languages, instances and
//! graphs.
//!
//! The random "block" languages are tractable by construction: the domain is
//! split into a partition, and every non-unary function has the form
//! `s_1(x_1)···s_r(x_r)·[all x_j lie in the same part]`. Instances over such
//! languages factor per connected component of their variables, which keeps
//! every marginal and existential matrix block-rank-1.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Application, Domain, FunctionTable, Instance, Language};
use crate::reductions::Graph;

pub type CorpusRng = ChaCha8Rng;

pub fn rng(seed: u64) -> CorpusRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn d2() -> Domain {
    Domain::new(2).expect("nonzero")
}

/// `EQW(1,1)=2, EQW(2,2)=3`, zero off the diagonal.
pub fn eqw() -> FunctionTable {
    FunctionTable::from_ints("EQW", d2(), 2, &[2, 0, 0, 3]).expect("valid table")
}

/// `[[1,1],[1,2]]`: full support, rank two.
pub fn one2() -> FunctionTable {
    FunctionTable::from_ints("ONE2", d2(), 2, &[1, 1, 1, 2]).expect("valid table")
}

/// `[[1,2],[2,4]]`: full support, rank one.
pub fn rank1() -> FunctionTable {
    FunctionTable::from_ints("R1", d2(), 2, &[1, 2, 2, 4]).expect("valid table")
}

/// 0/1 function with support `{(1,1),(1,2),(2,1)}`; its support admits no
/// Mal'tsev polymorphism.
pub fn nand() -> FunctionTable {
    FunctionTable::from_ints("NAND", d2(), 2, &[1, 1, 1, 0]).expect("valid table")
}

fn single(f: FunctionTable) -> Arc<Language> {
    Arc::new(Language::new(f.domain(), vec![f]).expect("valid language"))
}

pub fn eqw_language() -> Arc<Language> {
    single(eqw())
}

pub fn one2_language() -> Arc<Language> {
    single(one2())
}

pub fn rank1_language() -> Arc<Language> {
    single(rank1())
}

pub fn nand_language() -> Arc<Language> {
    single(nand())
}

/// `EQW(x1,x2)·EQW(x2,x3)` over three variables.
pub fn eqw_chain(lang: &Arc<Language>) -> Instance {
    Instance::new(lang.clone(), 3)
        .and_then(|i| i.with("EQW", &[0, 1]))
        .and_then(|i| i.with("EQW", &[1, 2]))
        .expect("EQW chain")
}

/// A single application of function `name` to `(x1, .., xr)`.
pub fn single_constraint(lang: &Arc<Language>, name: &str) -> Instance {
    let idx = lang.index_of(name).expect("function in language");
    let r = lang.function(idx).arity();
    Instance::new(lang.clone(), r)
        .and_then(|i| i.with(name, &(0..r).collect::<Vec<_>>()))
        .expect("single constraint")
}

/// Shape of a random block language.
#[derive(Clone, Copy, Debug)]
pub struct BlockLanguageShape {
    pub domain: usize,
    pub unary: usize,
    pub binary: usize,
    pub ternary: usize,
    /// Weights are drawn from `0..=max_weight` for unary tables and from
    /// `1..=max_weight` (with occasional zeros) for the factors.
    pub max_weight: i64,
}

impl Default for BlockLanguageShape {
    fn default() -> Self {
        Self {
            domain: 2,
            unary: 1,
            binary: 2,
            ternary: 0,
            max_weight: 4,
        }
    }
}

/// A random language of block-diagonal tables with rank-1 blocks over a
/// common partition of the domain.
pub fn random_block_language(rng: &mut impl Rng, shape: BlockLanguageShape) -> Arc<Language> {
    let domain = Domain::new(shape.domain).expect("positive domain");
    let d = shape.domain;
    let parts = rng.gen_range(1..=d);
    let mut label: Vec<usize> = (0..d)
        .map(|x| if x < parts { x } else { rng.gen_range(0..parts) })
        .collect();
    label.shuffle(rng);

    let mut functions = Vec::new();
    for k in 0..shape.unary {
        let values = (0..d).map(|_| rng.gen_range(0..=shape.max_weight)).collect::<Vec<_>>();
        functions.push(FunctionTable::from_ints(&format!("U{k}"), domain, 1, &values).expect("unary"));
    }
    for (arity, count, prefix) in [(2, shape.binary, "B"), (3, shape.ternary, "T")] {
        for k in 0..count {
            let factors: Vec<Vec<i64>> = (0..arity)
                .map(|_| {
                    (0..d)
                        .map(|_| {
                            if rng.gen_bool(0.15) {
                                0
                            } else {
                                rng.gen_range(1..=shape.max_weight)
                            }
                        })
                        .collect()
                })
                .collect();
            let values: Vec<i64> = domain
                .tuples(arity)
                .map(|t| {
                    if t.iter().all(|&x| label[x] == label[t[0]]) {
                        t.iter().enumerate().map(|(j, &x)| factors[j][x]).product()
                    } else {
                        0
                    }
                })
                .collect();
            functions.push(FunctionTable::from_ints(&format!("{prefix}{k}"), domain, arity, &values).expect("table"));
        }
    }
    Arc::new(Language::new(domain, functions).expect("language"))
}

/// Every application `(f, vars)` over `n` variables, in a fixed order.
pub fn all_applications(lang: &Language, n: usize) -> Vec<Application> {
    let vars = Domain::new(n).expect("n > 0");
    let mut apps = Vec::new();
    for (function, f) in lang.functions().iter().enumerate() {
        for t in vars.tuples(f.arity()) {
            apps.push(Application { function, vars: t });
        }
    }
    apps
}

/// Every instance over exactly `n` variables with at most `max_apps`
/// applications, counting each multiset of applications once.
pub fn all_instances(lang: &Arc<Language>, n: usize, max_apps: usize) -> Vec<Instance> {
    let apps = all_applications(lang, n);
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    fn rec(
        lang: &Arc<Language>,
        n: usize,
        apps: &[Application],
        start: usize,
        left: usize,
        chosen: &mut Vec<usize>,
        out: &mut Vec<Instance>,
    ) {
        out.push(
            Instance::with_applications(lang.clone(), n, chosen.iter().map(|&k| apps[k].clone()).collect())
                .expect("valid applications"),
        );
        if left == 0 {
            return;
        }
        for k in start..apps.len() {
            chosen.push(k);
            rec(lang, n, apps, k, left - 1, chosen, out);
            chosen.pop();
        }
    }
    rec(lang, n, &apps, 0, max_apps, &mut chosen, &mut out);
    out
}

/// A random instance with `1..=max_vars` variables and `0..=max_apps`
/// applications.
pub fn random_instance(rng: &mut impl Rng, lang: &Arc<Language>, max_vars: usize, max_apps: usize) -> Instance {
    let n = rng.gen_range(1..=max_vars);
    let m = rng.gen_range(0..=max_apps);
    let mut inst = Instance::new(lang.clone(), n).expect("n > 0");
    for _ in 0..m {
        let function = rng.gen_range(0..lang.functions().len());
        let r = lang.function(function).arity();
        let vars = (0..r).map(|_| rng.gen_range(0..n)).collect();
        inst.push_index(function, vars).expect("in range");
    }
    inst
}

/// A random multigraph with `1..=max_vertices` vertices and
/// `0..=max_edges` edges; self-loops allowed.
pub fn random_graph(rng: &mut impl Rng, max_vertices: usize, max_edges: usize) -> Graph {
    let v = rng.gen_range(1..=max_vertices);
    let e = rng.gen_range(0..=max_edges);
    let edges = (0..e).map(|_| (rng.gen_range(0..v), rng.gen_range(0..v))).collect();
    Graph::new(v, edges).expect("endpoints in range")
}
