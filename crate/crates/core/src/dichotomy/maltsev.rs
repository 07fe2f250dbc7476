//! Mal'tsev polymorphisms: `m(a,b,b) = m(b,b,a) = a`, preserving every
//! relation coordinatewise.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{RelationTable, Tuple};

/// A ternary operation on `D`, stored as `table[(a*d + b)*d + c]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TernaryOperation {
    d: usize,
    table: Vec<usize>,
}

/// Three member tuples whose coordinatewise image leaves the relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureCounterexample {
    pub tuples: [Tuple; 3],
    pub image: Tuple,
}

impl fmt::Display for ClosureCounterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |t: &Tuple| t.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(",");
        write!(
            f,
            "({}) ({}) ({}) -> ({})",
            show(&self.tuples[0]),
            show(&self.tuples[1]),
            show(&self.tuples[2]),
            show(&self.image)
        )
    }
}

impl TernaryOperation {
    pub fn new(d: usize, table: Vec<usize>) -> Result<Self> {
        if table.len() != d * d * d || table.iter().any(|&v| v >= d) {
            return Err(Error::invalid("ternary operation table has the wrong shape"));
        }
        Ok(Self { d, table })
    }

    /// `a ⊕ b ⊕ c` on a domain of size 2.
    pub fn minority() -> Self {
        let table = (0..8).map(|i| (i >> 2 ^ i >> 1 ^ i) & 1).collect();
        Self { d: 2, table }
    }

    pub fn domain_size(&self) -> usize {
        self.d
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, a: usize, b: usize, c: usize) -> usize {
        self.table[(a * self.d + b) * self.d + c]
    }

    pub fn is_maltsev(&self) -> bool {
        (0..self.d).all(|a| (0..self.d).all(|b| self.apply(a, b, b) == a && self.apply(b, b, a) == a))
    }

    fn image(&self, t1: &[usize], t2: &[usize], t3: &[usize]) -> Tuple {
        (0..t1.len()).map(|j| self.apply(t1[j], t2[j], t3[j])).collect()
    }

    /// `Ok(())` if `rel` is closed under this operation, else the first
    /// violating triple in lexicographic order.
    pub fn is_polymorphism(&self, rel: &RelationTable) -> Result<(), ClosureCounterexample> {
        let members: Vec<Tuple> = rel.iter().collect();
        for t1 in &members {
            for t2 in &members {
                for t3 in &members {
                    let image = self.image(t1, t2, t3);
                    if !rel.contains(&image) {
                        return Err(ClosureCounterexample {
                            tuples: [t1.clone(), t2.clone(), t3.clone()],
                            image,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for TernaryOperation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vals: Vec<String> = self.table.iter().map(|v| (v + 1).to_string()).collect();
        write!(f, "{}", vals.join(" "))
    }
}

/// An argument slot of a closure constraint: either pinned by the Mal'tsev
/// identities or one of the free entries.
#[derive(Clone, Copy)]
enum Slot {
    Fixed(usize),
    Free(usize),
}

struct Constraint {
    relation: usize,
    slots: Vec<Slot>,
}

/// Cells `(a,b,c)` not determined by the identities, i.e. `a != b` and
/// `b != c`, in lexicographic order.
fn free_cells(d: usize) -> Vec<usize> {
    (0..d * d * d)
        .filter(|&i| {
            let (a, b, c) = (i / (d * d), i / d % d, i % d);
            a != b && b != c
        })
        .collect()
}

/// The operation with every free entry set to `fill(k)` for the `k`-th free
/// cell.
fn build(d: usize, free: &[usize], fill: impl Fn(usize) -> usize) -> TernaryOperation {
    let mut table = vec![0; d * d * d];
    for (i, cell) in table.iter_mut().enumerate() {
        let (a, b, c) = (i / (d * d), i / d % d, i % d);
        if b == c {
            *cell = a;
        } else if a == b {
            *cell = c;
        }
    }
    for (k, &cell) in free.iter().enumerate() {
        table[cell] = fill(k);
    }
    TernaryOperation { d, table }
}

/// The Mal'tsev candidate with every free entry equal to the first element.
pub fn first_candidate(d: usize) -> TernaryOperation {
    build(d, &free_cells(d), |_| 0)
}

/// Lexicographically first Mal'tsev polymorphism of every relation in
/// `relations`, by backtracking over the free entries with incremental
/// closure checks.
pub fn find_maltsev(relations: &[RelationTable], max_domain: usize) -> Result<Option<TernaryOperation>> {
    let Some(first) = relations.first() else {
        return Err(Error::invalid("no relations given"));
    };
    let d = first.domain().size();
    if d > max_domain {
        return Err(Error::BoundExceeded {
            what: "Mal'tsev search domain",
            required: d as u128,
            bound: max_domain as u128,
        });
    }
    let free = free_cells(d);
    let mut free_index = vec![usize::MAX; d * d * d];
    for (k, &cell) in free.iter().enumerate() {
        free_index[cell] = k;
    }
    let slot = |a: usize, b: usize, c: usize| {
        if b == c {
            Slot::Fixed(a)
        } else if a == b {
            Slot::Fixed(c)
        } else {
            Slot::Free(free_index[(a * d + b) * d + c])
        }
    };

    // Constraints keyed by the largest free entry they mention; constraints
    // with none are decided up front.
    let mut by_last: Vec<Vec<Constraint>> = (0..free.len()).map(|_| Vec::new()).collect();
    for (ri, rel) in relations.iter().enumerate() {
        let members: Vec<Tuple> = rel.iter().collect();
        let mut seen = std::collections::HashSet::new();
        for t1 in &members {
            for t2 in &members {
                for t3 in &members {
                    let cells: Vec<(usize, usize, usize)> = (0..rel.arity()).map(|j| (t1[j], t2[j], t3[j])).collect();
                    if !seen.insert(cells.clone()) {
                        continue;
                    }
                    let slots: Vec<Slot> = cells.iter().map(|&(a, b, c)| slot(a, b, c)).collect();
                    let last = slots
                        .iter()
                        .filter_map(|s| match s {
                            Slot::Free(k) => Some(*k),
                            Slot::Fixed(_) => None,
                        })
                        .max();
                    match last {
                        Some(k) => by_last[k].push(Constraint { relation: ri, slots }),
                        None => {
                            let image: Vec<usize> = slots
                                .iter()
                                .map(|s| match s {
                                    Slot::Fixed(v) => *v,
                                    Slot::Free(_) => unreachable!(),
                                })
                                .collect();
                            if !rel.contains(&image) {
                                return Ok(None);
                            }
                        }
                    }
                }
            }
        }
    }

    let holds = |assign: &[usize], c: &Constraint| {
        let rel = &relations[c.relation];
        let idx = c.slots.iter().fold(0, |acc, s| {
            acc * d
                + match s {
                    Slot::Fixed(v) => *v,
                    Slot::Free(k) => assign[*k],
                }
        });
        rel.contains_index(idx)
    };

    fn search(
        k: usize,
        d: usize,
        assign: &mut Vec<usize>,
        by_last: &[Vec<Constraint>],
        holds: &dyn Fn(&[usize], &Constraint) -> bool,
    ) -> bool {
        if k == assign.len() {
            return true;
        }
        for v in 0..d {
            assign[k] = v;
            if by_last[k].iter().all(|c| holds(assign, c)) && search(k + 1, d, assign, by_last, holds) {
                return true;
            }
        }
        false
    }

    let mut assign = vec![0usize; free.len()];
    Ok(search(0, d, &mut assign, &by_last, &holds).then(|| build(d, &free, |i| assign[i])))
}
