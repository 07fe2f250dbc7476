//! Domains, weighted languages, instances and assignments.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::weight::{self, Weight};

/// A tuple of zero-based domain elements. Used for assignments, table
/// coordinates and matrix labels alike.
pub type Tuple = Vec<usize>;

/// The domain `{0, .., d-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Domain {
    size: usize,
}

impl Domain {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::invalid("domain size must be positive"));
        }
        Ok(Self { size })
    }

    pub fn size(self) -> usize {
        self.size
    }

    /// `d^len`, or `None` on overflow.
    pub fn count(self, len: usize) -> Option<usize> {
        u32::try_from(len).ok().and_then(|e| self.size.checked_pow(e))
    }

    /// Row-major index of `t` (first coordinate most significant).
    pub fn index_of(self, t: &[usize]) -> usize {
        t.iter().fold(0, |acc, &x| acc * self.size + x)
    }

    pub fn tuple_of(self, mut index: usize, len: usize) -> Tuple {
        let mut t = vec![0; len];
        for slot in t.iter_mut().rev() {
            *slot = index % self.size;
            index /= self.size;
        }
        t
    }

    /// All tuples of length `len` in lexicographic order.
    pub fn tuples(self, len: usize) -> impl Iterator<Item = Tuple> {
        let total = self.count(len).expect("tuple space overflows usize");
        (0..total).map(move |i| self.tuple_of(i, len))
    }

    pub fn contains(self, t: &[usize]) -> bool {
        t.iter().all(|&x| x < self.size)
    }
}

/// A named non-negative function `f: D^r -> Q>=0`, stored densely in
/// row-major order (last coordinate fastest).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionTable {
    name: String,
    domain: Domain,
    arity: usize,
    values: Vec<Weight>,
}

impl FunctionTable {
    pub fn new(name: impl Into<String>, domain: Domain, arity: usize, values: Vec<Weight>) -> Result<Self> {
        let name = name.into();
        if arity == 0 {
            return Err(Error::invalid(format!("function {name}: arity must be positive")));
        }
        let expected = domain
            .count(arity)
            .ok_or_else(|| Error::invalid(format!("function {name}: table too large")))?;
        if values.len() != expected {
            return Err(Error::invalid(format!(
                "function {name}: expected {expected} values, got {}",
                values.len()
            )));
        }
        if let Some(w) = values.iter().find(|w| *w < &Weight::zero()) {
            return Err(Error::invalid(format!("function {name}: negative value {w}")));
        }
        Ok(Self {
            name,
            domain,
            arity,
            values,
        })
    }

    /// Convenience constructor from integer entries.
    pub fn from_ints(name: &str, domain: Domain, arity: usize, values: &[i64]) -> Result<Self> {
        Self::new(name, domain, arity, values.iter().map(|&v| weight::int(v)).collect())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn values(&self) -> &[Weight] {
        &self.values
    }

    pub fn value(&self, x: &[usize]) -> &Weight {
        debug_assert_eq!(x.len(), self.arity);
        &self.values[self.domain.index_of(x)]
    }

    /// The support relation `{x : f(x) > 0}`.
    pub fn support(&self) -> RelationTable {
        RelationTable {
            domain: self.domain,
            arity: self.arity,
            members: self.values.iter().map(weight::is_positive).collect(),
        }
    }

    /// `f^[l]`: sums out the trailing `r - l` coordinates.
    pub fn marginalize(&self, level: usize) -> Result<FunctionTable> {
        if level == 0 || level > self.arity {
            return Err(Error::invalid(format!(
                "marginal level {level} outside 1..={}",
                self.arity
            )));
        }
        let block = self.domain.count(self.arity - level).expect("fits: sub-table");
        let values = self
            .values
            .chunks(block)
            .map(|chunk| chunk.iter().fold(Weight::zero(), |acc, w| acc + w))
            .collect();
        Ok(FunctionTable {
            name: format!("{}^[{level}]", self.name),
            domain: self.domain,
            arity: level,
            values,
        })
    }

    /// Sum of every entry.
    pub fn total(&self) -> Weight {
        self.values.iter().fold(Weight::zero(), |acc, w| acc + w)
    }
}

/// A relation over `D`, stored as a dense membership table in row-major
/// order, so iteration is lexicographic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RelationTable {
    domain: Domain,
    arity: usize,
    members: Vec<bool>,
}

impl RelationTable {
    pub fn empty(domain: Domain, arity: usize) -> Result<Self> {
        let size = domain
            .count(arity)
            .ok_or_else(|| Error::invalid("relation table too large"))?;
        Ok(Self {
            domain,
            arity,
            members: vec![false; size],
        })
    }

    pub fn full(domain: Domain, arity: usize) -> Result<Self> {
        let mut r = Self::empty(domain, arity)?;
        r.members.iter_mut().for_each(|m| *m = true);
        Ok(r)
    }

    pub fn from_tuples<I, T>(domain: Domain, arity: usize, tuples: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[usize]>,
    {
        let mut r = Self::empty(domain, arity)?;
        for t in tuples {
            let t = t.as_ref();
            if t.len() != arity || !domain.contains(t) {
                return Err(Error::invalid(format!("tuple {t:?} does not fit relation")));
            }
            r.members[domain.index_of(t)] = true;
        }
        Ok(r)
    }

    pub(crate) fn from_membership(domain: Domain, arity: usize, members: Vec<bool>) -> Self {
        debug_assert_eq!(Some(members.len()), domain.count(arity));
        Self { domain, arity, members }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn contains(&self, t: &[usize]) -> bool {
        t.len() == self.arity && self.domain.contains(t) && self.members[self.domain.index_of(t)]
    }

    pub(crate) fn contains_index(&self, index: usize) -> bool {
        self.members[index]
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&m| m)
    }

    /// Member tuples in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = Tuple> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(move |(i, _)| self.domain.tuple_of(i, self.arity))
    }

    /// The relation as a 0/1 function table.
    pub fn indicator(&self, name: impl Into<String>) -> FunctionTable {
        FunctionTable {
            name: name.into(),
            domain: self.domain,
            arity: self.arity,
            values: self
                .members
                .iter()
                .map(|&m| if m { Weight::one() } else { Weight::zero() })
                .collect(),
        }
    }
}

/// A finite set of named functions over one domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Language {
    domain: Domain,
    functions: Vec<FunctionTable>,
}

impl Language {
    pub fn new(domain: Domain, functions: Vec<FunctionTable>) -> Result<Self> {
        if functions.is_empty() {
            return Err(Error::invalid("language has no functions"));
        }
        let mut seen = HashSet::new();
        for f in &functions {
            if f.domain != domain {
                return Err(Error::invalid(format!("function {} has a different domain", f.name)));
            }
            if !seen.insert(f.name.as_str()) {
                return Err(Error::invalid(format!("duplicate function name {}", f.name)));
            }
        }
        Ok(Self { domain, functions })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn functions(&self) -> &[FunctionTable] {
        &self.functions
    }

    pub fn function(&self, index: usize) -> &FunctionTable {
        &self.functions[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.functions.iter().position(|f| f.name == name)
    }

    /// The unweighted language of supports, in function order.
    pub fn support_language(&self) -> Vec<RelationTable> {
        self.functions.iter().map(FunctionTable::support).collect()
    }
}

/// One constraint application `(f, i_1, .., i_r)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Application {
    pub function: usize,
    pub vars: Vec<usize>,
}

/// An instance: `n` variables and a sequence of applications. Duplicate
/// applications are kept; they multiply the weight.
#[derive(Clone, Debug)]
pub struct Instance {
    language: Arc<Language>,
    num_vars: usize,
    applications: Vec<Application>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.language, &other.language) || self.language == other.language)
            && self.num_vars == other.num_vars
            && self.applications == other.applications
    }
}

impl Eq for Instance {}

impl Instance {
    pub fn new(language: Arc<Language>, num_vars: usize) -> Result<Self> {
        if num_vars == 0 {
            return Err(Error::invalid("instance needs at least one variable"));
        }
        Ok(Self {
            language,
            num_vars,
            applications: Vec::new(),
        })
    }

    pub fn with_applications(language: Arc<Language>, num_vars: usize, applications: Vec<Application>) -> Result<Self> {
        let mut inst = Self::new(language, num_vars)?;
        for app in applications {
            inst.push_index(app.function, app.vars)?;
        }
        Ok(inst)
    }

    /// Appends `(name, vars)`.
    pub fn push(&mut self, name: &str, vars: &[usize]) -> Result<()> {
        let function = self
            .language
            .index_of(name)
            .ok_or_else(|| Error::invalid(format!("unknown function {name}")))?;
        self.push_index(function, vars.to_vec())
    }

    pub fn push_index(&mut self, function: usize, vars: Vec<usize>) -> Result<()> {
        let f = self
            .language
            .functions
            .get(function)
            .ok_or_else(|| Error::invalid(format!("function index {function} out of range")))?;
        if vars.len() != f.arity {
            return Err(Error::invalid(format!(
                "{} has arity {} but was applied to {} variables",
                f.name,
                f.arity,
                vars.len()
            )));
        }
        if let Some(&v) = vars.iter().find(|&&v| v >= self.num_vars) {
            return Err(Error::invalid(format!(
                "variable {v} out of range for {} variables",
                self.num_vars
            )));
        }
        self.applications.push(Application { function, vars });
        Ok(())
    }

    /// Builder-style [`Instance::push`].
    pub fn with(mut self, name: &str, vars: &[usize]) -> Result<Self> {
        self.push(name, vars)?;
        Ok(self)
    }

    pub fn language(&self) -> &Arc<Language> {
        &self.language
    }

    pub fn domain(&self) -> Domain {
        self.language.domain
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn applications(&self) -> &[Application] {
        &self.applications
    }

    /// `n + m`.
    pub fn size(&self) -> usize {
        self.num_vars + self.applications.len()
    }

    /// `F_I(x)`: the product of every application's value at `x`.
    pub fn evaluate(&self, x: &[usize]) -> Result<Weight> {
        if x.len() != self.num_vars {
            return Err(Error::invalid(format!(
                "assignment has length {}, instance has {} variables",
                x.len(),
                self.num_vars
            )));
        }
        if !self.domain().contains(x) {
            return Err(Error::invalid(format!("assignment {x:?} leaves the domain")));
        }
        Ok(self.evaluate_unchecked(x))
    }

    pub(crate) fn evaluate_unchecked(&self, x: &[usize]) -> Weight {
        let d = self.domain();
        let mut acc = Weight::one();
        for app in &self.applications {
            let f = &self.language.functions[app.function];
            let idx = app.vars.iter().fold(0, |acc, &v| acc * d.size + x[v]);
            let w = &f.values[idx];
            if w.is_zero() {
                return Weight::zero();
            }
            if !w.is_one() {
                acc *= w;
            }
        }
        acc
    }

    /// Whether `F_I(x) > 0`, without forming the product.
    pub(crate) fn is_supported(&self, x: &[usize]) -> bool {
        let d = self.domain();
        self.applications.iter().all(|app| {
            let f = &self.language.functions[app.function];
            let idx = app.vars.iter().fold(0, |acc, &v| acc * d.size + x[v]);
            !f.values[idx].is_zero()
        })
    }

    /// Rebuilds this instance over another language with the same function
    /// names (used for the support language and the 0/1 counterpart).
    pub fn relabel(&self, language: Arc<Language>) -> Result<Instance> {
        let mut out = Instance::new(language, self.num_vars)?;
        for app in &self.applications {
            out.push(self.language.functions[app.function].name(), &app.vars)?;
        }
        Ok(out)
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} [", self.num_vars)?;
        for (k, app) in self.applications.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", self.language.functions[app.function].name)?;
            for v in &app.vars {
                write!(f, " {}", v + 1)?;
            }
        }
        write!(f, "]")
    }
}
