//! Instance transformers: replication, support counting through a weighted
//! partition-function oracle, the graph-homomorphism gadget and the two
//! prefix constructions.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactmat::RationalMatrix;
use crate::model::Instance;
use crate::oracle::Oracle;
use crate::weight::{self, Weight};

/// An undirected multigraph; self-loops allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if vertices == 0 {
            return Err(Error::invalid("graph needs at least one vertex"));
        }
        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= vertices || v >= vertices) {
            return Err(Error::invalid(format!(
                "edge ({}, {}) outside {vertices} vertices",
                u + 1,
                v + 1
            )));
        }
        Ok(Self { vertices, edges })
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

/// Every application repeated `k` times, so `F' = F^k`.
pub fn replicate(inst: &Instance, k: usize) -> Result<Instance> {
    if k == 0 {
        return Err(Error::invalid("replication factor must be positive"));
    }
    let apps = inst
        .applications()
        .iter()
        .flat_map(|a| std::iter::repeat_n(a.clone(), k))
        .collect();
    Instance::with_applications(inst.language().clone(), inst.num_vars(), apps)
}

/// The distinct positive values `F_I` can take: products of one positive
/// entry per application.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueSet {
    pub m: usize,
    pub values: Vec<Weight>,
}

pub fn value_set(inst: &Instance) -> ValueSet {
    let lang = inst.language();
    let mut reach: BTreeSet<Weight> = BTreeSet::from([Weight::one()]);
    for app in inst.applications() {
        let entries: BTreeSet<&Weight> = lang
            .function(app.function)
            .values()
            .iter()
            .filter(|w| weight::is_positive(w))
            .collect();
        reach = reach.iter().flat_map(|p| entries.iter().map(move |&e| p * e)).collect();
    }
    ValueSet {
        m: inst.applications().len(),
        values: reach.into_iter().collect(),
    }
}

/// Solves `V x = rhs` exactly, with `V` square and invertible.
fn solve(mut rows: Vec<Vec<Weight>>, mut rhs: Vec<Weight>) -> Result<Vec<Weight>> {
    let n = rows.len();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !rows[r][col].is_zero())
            .ok_or_else(|| Error::Contract("singular Vandermonde system".into()))?;
        rows.swap(col, pivot);
        rhs.swap(col, pivot);
        for r in 0..n {
            if r == col || rows[r][col].is_zero() {
                continue;
            }
            let factor = &rows[r][col] / &rows[col][col];
            let (pivot_row, target) = if r < col {
                let (head, tail) = rows.split_at_mut(col);
                (&tail[0], &mut head[r])
            } else {
                let (head, tail) = rows.split_at_mut(r);
                (&head[col], &mut tail[0])
            };
            for (t, p) in target[col..].iter_mut().zip(&pivot_row[col..]) {
                *t -= &factor * p;
            }
            let delta = &factor * &rhs[col];
            rhs[r] -= delta;
        }
    }
    Ok((0..n).map(|i| &rhs[i] / &rows[i][i]).collect())
}

/// `|R_I|` from the weighted partition functions of `I_1, .., I_K`, where
/// `I_k` repeats every application `k` times and `K = |Value_m|`.
///
/// Writing `N_c` for the number of assignments with `F_I(x) = c`, the
/// queries give `Z(I_k) = Σ_c N_c c^k`, a Vandermonde system in the `N_c`.
pub fn count_support<Z>(inst: &Instance, z: Z) -> Result<BigUint>
where
    Z: Fn(&Instance) -> Result<Weight> + Sync,
{
    let values = value_set(inst).values;
    if values.is_empty() {
        return Ok(BigUint::zero());
    }
    let queries: Vec<Weight> = (1..=values.len())
        .into_par_iter()
        .map(|k| replicate(inst, k).and_then(|ik| z(&ik)))
        .collect::<Result<_>>()?;
    let rows = (1..=values.len())
        .map(|k| values.iter().map(|c| weight::pow(c, k)).collect())
        .collect();
    let counts = solve(rows, queries)?;
    let mut total = BigUint::zero();
    for (c, n) in values.iter().zip(counts) {
        if !n.is_integer() || n.is_negative() {
            return Err(Error::Contract(format!("non-integral count {n} for value {c}")));
        }
        total += n.to_integer().to_biguint().expect("non-negative");
    }
    Ok(total)
}

/// `count_support` with the brute-force oracle answering the queries.
pub fn count_support_brute(oracle: &Oracle, inst: &Instance) -> Result<BigUint> {
    count_support(inst, |ik| oracle.partition_function(ik))
}

fn check_gadget_split(inst: &Instance, a: usize, b: usize) -> Result<()> {
    if !(1 <= a && a < b && b <= inst.num_vars()) {
        return Err(Error::invalid(format!(
            "split a={a} b={b} invalid for n={}",
            inst.num_vars()
        )));
    }
    Ok(())
}

/// `A = M Mᵀ` with `M` the `(a, b)` marginal matrix of `I`.
pub fn gadget_matrix(oracle: &Oracle, inst: &Instance, a: usize, b: usize) -> Result<RationalMatrix> {
    let m = oracle.marginal_matrix(inst, a, b)?;
    m.mul(&m.transpose())
}

/// The instance `I_G` with `Z(I_G) = Z_A(G)` for `A = M Mᵀ`.
///
/// Variables: `x_{v,1..a}` for every vertex in order, then for every edge
/// `y_{e,a+1..b}`, `z_{e,b+1..n}` and `z'_{e,b+1..n}`. Edge `e = (v, v')`
/// carries one copy of `I` on `(x_v, y_e, z_e)` and one on `(x_v', y_e, z'_e)`.
pub fn hardness_gadget(inst: &Instance, a: usize, b: usize, graph: &Graph) -> Result<Instance> {
    check_gadget_split(inst, a, b)?;
    let n = inst.num_vars();
    let per_edge = (b - a) + 2 * (n - b);
    let base = graph.vertices() * a;
    let total = base + graph.edges().len() * per_edge;
    let mut out = Instance::new(inst.language().clone(), total)?;
    for (e, &(v, w)) in graph.edges().iter().enumerate() {
        let y = base + e * per_edge;
        let z = y + (b - a);
        let z2 = z + (n - b);
        for (x, tail) in [(v, z), (w, z2)] {
            let map = |i: usize| {
                if i < a {
                    x * a + i
                } else if i < b {
                    y + (i - a)
                } else {
                    tail + (i - b)
                }
            };
            for app in inst.applications() {
                out.push_index(app.function, app.vars.iter().map(|&i| map(i)).collect())?;
            }
        }
    }
    Ok(out)
}

/// `Z_A(G) = Σ_{σ: V -> [d]} Π_{(u,v) ∈ E} A(σ(u), σ(v))`, by enumeration.
pub fn graph_partition_function(oracle: &Oracle, a: &RationalMatrix, graph: &Graph) -> Result<Weight> {
    if a.nrows() != a.ncols() || !a.is_symmetric() {
        return Err(Error::invalid(
            "graph partition functions need a symmetric square matrix",
        ));
    }
    let d = a.nrows();
    let v = graph.vertices();
    let required = (d as u128).checked_pow(v as u32).unwrap_or(u128::MAX);
    if required > oracle.bound as u128 {
        return Err(Error::BoundExceeded {
            what: "vertex map enumeration",
            required,
            bound: oracle.bound as u128,
        });
    }
    let total = required.to_usize().expect("within bound");
    Ok((0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut sigma = vec![0; v];
            for s in sigma.iter_mut().rev() {
                *s = idx % d;
                idx /= d;
            }
            graph
                .edges()
                .iter()
                .fold(Weight::one(), |acc, &(x, y)| acc * a.get(sigma[x], sigma[y]))
        })
        .reduce(Weight::zero, |p, q| p + q))
}

/// `k` copies of `I` sharing `x_1..x_c`; copy `i` has its own tail
/// `y_{i,c+1..n}`, laid out after the shared prefix in copy order.
pub fn shared_prefix_power(inst: &Instance, c: usize, k: usize) -> Result<Instance> {
    let n = inst.num_vars();
    if !(1 <= c && c <= n) || k == 0 {
        return Err(Error::invalid(format!("invalid shared prefix c={c}, k={k} for n={n}")));
    }
    let mut out = Instance::new(inst.language().clone(), c + k * (n - c))?;
    for copy in 0..k {
        let map = |v: usize| if v < c { v } else { c + copy * (n - c) + (v - c) };
        for app in inst.applications() {
            out.push_index(app.function, app.vars.iter().map(|&v| map(v)).collect())?;
        }
    }
    Ok(out)
}

/// The doubled instance on `x_1, x_2, y_1..y_a, z_1..z_{n-a-1}, w_1..w_{n-a-1}`:
/// one copy of `I` on `(y, x_1, z)` and one on `(y, x_2, w)`. Its `(1, 2)`
/// marginal matrix is `MᵀM` for `M` the `(a, a+1)` marginal matrix of `I`.
pub fn prefix_doubling(inst: &Instance, a: usize) -> Result<Instance> {
    let n = inst.num_vars();
    if !(1 <= a && a < n) {
        return Err(Error::invalid(format!("prefix a={a} invalid for n={n}")));
    }
    let tail = n - a - 1;
    let mut out = Instance::new(inst.language().clone(), 2 * n - a)?;
    for (x, start) in [(0, 2 + a), (1, 2 + a + tail)] {
        let map = |v: usize| {
            if v < a {
                2 + v
            } else if v == a {
                x
            } else {
                start + (v - a - 1)
            }
        };
        for app in inst.applications() {
            out.push_index(app.function, app.vars.iter().map(|&v| map(v)).collect())?;
        }
    }
    Ok(out)
}
