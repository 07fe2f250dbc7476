//! The 6th power of a language: domain `D^6`, with
//! `g(s_1, .., s_r) = Π_{j<6} f(s_{1,j}, .., s_{r,j})`.
//!
//! Power-domain elements are indices into `D^6` in row-major order. Each
//! `g` is stored as a table of value ids into a shared table of distinct
//! weights, so value comparisons are integer comparisons.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::model::{Domain, Instance, Language};
use crate::weight::Weight;

pub const POWER: usize = 6;

#[derive(Clone, Debug)]
pub struct PowerFunction {
    pub arity: usize,
    /// Value ids in row-major order over `𝔇^arity`.
    pub ids: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct PowerLanguage {
    base: Arc<Language>,
    size: usize,
    functions: Vec<PowerFunction>,
    values: Vec<Weight>,
    zero_id: Option<u32>,
}

/// The distinguished elements for one quadruple `(α, β, κ, λ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpecialElements {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

/// `(α, β, κ, λ)` with `α != β`, `κ != λ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Quadruple {
    pub alpha: usize,
    pub beta: usize,
    pub kappa: usize,
    pub lambda: usize,
}

impl std::fmt::Display for Quadruple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "({},{},{},{})",
            self.alpha + 1,
            self.beta + 1,
            self.kappa + 1,
            self.lambda + 1
        )
    }
}

impl Quadruple {
    /// Every quadruple over a domain of size `d`, in lexicographic order.
    pub fn all(d: usize) -> Vec<Quadruple> {
        let mut out = Vec::new();
        for alpha in 0..d {
            for beta in (0..d).filter(|&b| b != alpha) {
                for kappa in 0..d {
                    for lambda in (0..d).filter(|&l| l != kappa) {
                        out.push(Quadruple {
                            alpha,
                            beta,
                            kappa,
                            lambda,
                        });
                    }
                }
            }
        }
        out
    }
}

impl PowerLanguage {
    /// Builds every `g` table; refuses when some table would exceed
    /// `max_table` entries.
    pub fn new(base: Arc<Language>, max_table: u64) -> Result<Self> {
        let dom = base.domain();
        let d = dom.size();
        let size = dom
            .count(POWER)
            .ok_or_else(|| Error::invalid("power domain too large"))?;
        let mut values: Vec<Weight> = Vec::new();
        let mut by_value: HashMap<Weight, u32> = HashMap::new();
        let mut functions = Vec::with_capacity(base.functions().len());
        for f in base.functions() {
            let r = f.arity();
            let required = (size as u128).checked_pow(r as u32).unwrap_or(u128::MAX);
            if required > max_table as u128 {
                return Err(Error::BoundExceeded {
                    what: "power function table",
                    required,
                    bound: max_table as u128,
                });
            }
            let total = required as usize;
            // The value only depends on the multiset of base-table cells hit by
            // the six coordinates.
            let mut by_cells: HashMap<[u32; POWER], u32> = HashMap::new();
            let mut ids = Vec::with_capacity(total);
            let mut elems = vec![0usize; r];
            let d_pows: Vec<usize> = (0..POWER).map(|j| d.pow((POWER - 1 - j) as u32)).collect();
            for idx in 0..total {
                let mut rest = idx;
                for e in elems.iter_mut().rev() {
                    *e = rest % size;
                    rest /= size;
                }
                let mut cells = [0u32; POWER];
                for (j, cell) in cells.iter_mut().enumerate() {
                    let mut c = 0usize;
                    for &e in &elems {
                        c = c * d + e / d_pows[j] % d;
                    }
                    *cell = c as u32;
                }
                cells.sort_unstable();
                let id = *by_cells.entry(cells).or_insert_with(|| {
                    let w = cells
                        .iter()
                        .fold(Weight::one(), |acc, &c| acc * &f.values()[c as usize]);
                    *by_value.entry(w.clone()).or_insert_with(|| {
                        values.push(w);
                        (values.len() - 1) as u32
                    })
                });
                ids.push(id);
            }
            functions.push(PowerFunction { arity: r, ids });
        }
        let zero_id = values.iter().position(Weight::is_zero).map(|p| p as u32);
        Ok(Self {
            base,
            size,
            functions,
            values,
            zero_id,
        })
    }

    pub fn base(&self) -> &Arc<Language> {
        &self.base
    }

    /// `|𝔇| = d^6`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn functions(&self) -> &[PowerFunction] {
        &self.functions
    }

    pub fn values(&self) -> &[Weight] {
        &self.values
    }

    pub fn is_zero_id(&self, id: u32) -> bool {
        Some(id) == self.zero_id
    }

    /// The id of the value zero, if any `g` takes it.
    pub fn zero_id(&self) -> Option<u32> {
        self.zero_id
    }

    pub fn element(&self, coords: [usize; POWER]) -> usize {
        self.base.domain().index_of(&coords)
    }

    pub fn coords(&self, e: usize) -> Vec<usize> {
        self.base.domain().tuple_of(e, POWER)
    }

    /// `𝔞 = (α,α,α,β,β,β)`, `𝔟 = (κ,κ,λ,λ,λ,κ)`, `𝔠 = (λ,λ,κ,κ,κ,λ)`.
    pub fn special_elements(&self, q: Quadruple) -> Result<SpecialElements> {
        let d = self.base.domain().size();
        if q.alpha == q.beta || q.kappa == q.lambda || [q.alpha, q.beta, q.kappa, q.lambda].iter().any(|&x| x >= d) {
            return Err(Error::invalid(format!("invalid quadruple {q}")));
        }
        let (al, be, ka, la) = (q.alpha, q.beta, q.kappa, q.lambda);
        Ok(SpecialElements {
            a: self.element([al, al, al, be, be, be]),
            b: self.element([ka, ka, la, la, la, ka]),
            c: self.element([la, la, ka, ka, ka, la]),
        })
    }

    /// Value id of `g_i(elems)`.
    pub fn id(&self, function: usize, elems: &[usize]) -> u32 {
        let idx = elems.iter().fold(0, |acc, &e| acc * self.size + e);
        self.functions[function].ids[idx]
    }

    pub fn value(&self, function: usize, elems: &[usize]) -> &Weight {
        &self.values[self.id(function, elems) as usize]
    }

    /// Whether `π` preserves every `g`: `g(y) = g(π(y))` for all `y`.
    pub fn is_automorphism(&self, pi: &[usize]) -> bool {
        if pi.len() != self.size {
            return false;
        }
        let mut seen = vec![false; self.size];
        for &p in pi {
            if p >= self.size || std::mem::replace(&mut seen[p], true) {
                return false;
            }
        }
        self.functions.iter().all(|g| {
            let mut elems = vec![0usize; g.arity];
            g.ids.iter().enumerate().all(|(idx, &id)| {
                let mut rest = idx;
                for e in elems.iter_mut().rev() {
                    *e = rest % self.size;
                    rest /= self.size;
                }
                let image = elems.iter().fold(0, |acc, &e| acc * self.size + pi[e]);
                g.ids[image] == id
            })
        })
    }
}

/// An instance over the power language: the base instance's applications,
/// with each `f` replaced by its `g`.
#[derive(Clone, Debug)]
pub struct PowerInstance<'a> {
    power: &'a PowerLanguage,
    num_vars: usize,
    applications: Vec<(usize, Vec<usize>)>,
}

impl<'a> PowerInstance<'a> {
    pub fn from_base(power: &'a PowerLanguage, inst: &Instance) -> Result<Self> {
        if **inst.language() != **power.base() {
            return Err(Error::invalid("instance is over a different language"));
        }
        Ok(Self {
            power,
            num_vars: inst.num_vars(),
            applications: inst
                .applications()
                .iter()
                .map(|a| (a.function, a.vars.clone()))
                .collect(),
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// `G(y)`.
    pub fn evaluate(&self, y: &[usize]) -> Weight {
        let mut acc = Weight::one();
        for (f, vars) in &self.applications {
            let elems: Vec<usize> = vars.iter().map(|&v| y[v]).collect();
            let w = self.power.value(*f, &elems);
            if w.is_zero() {
                return Weight::zero();
            }
            acc *= w;
        }
        acc
    }

    fn pinned_sum(&self, s: usize, q: Quadruple, bound: u64, injective: bool) -> Result<Weight> {
        if self.num_vars < 2 {
            return Err(Error::invalid("power instance needs at least two variables"));
        }
        let sp = self.power.special_elements(q)?;
        let free = self.num_vars - 2;
        let size = Domain::new(self.power.size())?;
        let required = (size.size() as u128).checked_pow(free as u32).unwrap_or(u128::MAX);
        if required > bound as u128 {
            return Err(Error::BoundExceeded {
                what: "power instance enumeration",
                required,
                bound: bound as u128,
            });
        }
        let mut total = Weight::zero();
        let mut y = vec![sp.a, s];
        for rest in size.tuples(free) {
            y.truncate(2);
            y.extend(rest);
            if injective {
                let mut sorted = y.clone();
                sorted.sort_unstable();
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    continue;
                }
            }
            total += self.evaluate(&y);
        }
        Ok(total)
    }

    /// `hom_s = Σ_{y_3..y_n} G(𝔞, s, y_3, .., y_n)`.
    pub fn hom(&self, s: usize, q: Quadruple, bound: u64) -> Result<Weight> {
        self.pinned_sum(s, q, bound, false)
    }

    /// `mon_s`: the same sum restricted to injective tuples.
    pub fn mon(&self, s: usize, q: Quadruple, bound: u64) -> Result<Weight> {
        self.pinned_sum(s, q, bound, true)
    }
}
