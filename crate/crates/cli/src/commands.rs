//! The subcommands, as functions from parsed input to report lines.

use std::fmt;

use wcsp_core::corpus::{self, BlockLanguageShape};
use wcsp_core::dichotomy::Certificate;
use wcsp_core::oracle::{BalanceMode, BalanceVerdict};
use wcsp_core::reductions::{self, Graph};
use wcsp_core::vecrep::function_vecrep;
use wcsp_core::weight::{self, Weight};
use wcsp_core::{classify, ClassifyConfig, Counter, Instance, Oracle, Reason, Verdict};

use crate::format::{self, ParseError, ProblemFile};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Bound(String),
    #[error("{0}")]
    Refused(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) | CliError::Input(_) => 2,
            CliError::Bound(_) => 3,
            CliError::Refused(_) => 4,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<wcsp_core::Error> for CliError {
    fn from(e: wcsp_core::Error) -> Self {
        match e {
            wcsp_core::Error::Invalid(_) => CliError::Input(e.to_string()),
            wcsp_core::Error::BoundExceeded { .. } => CliError::Bound(e.to_string()),
            wcsp_core::Error::NotApplicable(_) => CliError::Refused(e.to_string()),
            wcsp_core::Error::Contract(_) => CliError::Internal(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Options shared by every command.
#[derive(Clone, Copy, Debug)]
pub struct Settings {
    pub bound: u64,
    pub explicit_denominator: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            bound: wcsp_core::oracle::DEFAULT_BOUND,
            explicit_denominator: false,
        }
    }
}

impl Settings {
    fn oracle(&self) -> Oracle {
        Oracle::new(self.bound)
    }

    fn weight(&self, w: &Weight) -> String {
        weight::format(w, self.explicit_denominator)
    }

    /// Search limits scaled to the domain size.
    pub fn classify_config(&self, domain_size: usize) -> ClassifyConfig {
        let base = if domain_size >= 3 {
            ClassifyConfig::for_domain_three()
        } else {
            ClassifyConfig::default()
        };
        ClassifyConfig {
            oracle: self.oracle(),
            ..base
        }
    }
}

/// Report lines in `key=value` form; `passed` is false when a check failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub lines: Vec<String>,
    pub passed: bool,
}

impl Output {
    fn new() -> Self {
        Self {
            lines: Vec::new(),
            passed: true,
        }
    }

    fn kv(&mut self, key: &str, value: impl fmt::Display) {
        self.lines.push(format!("{key}={value}"));
    }
}

impl fmt::Display for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.lines {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Brute,
    Structured,
    Both,
}

/// The named instance, or the only one if no name is given.
pub fn select_instance<'a>(file: &'a ProblemFile, name: Option<&str>) -> CliResult<(&'a str, &'a Instance)> {
    match name {
        Some(n) => file
            .instances
            .iter()
            .find(|(m, _)| m == n)
            .map(|(m, i)| (m.as_str(), i))
            .ok_or_else(|| CliError::Input(format!("no instance named '{n}'"))),
        None => match file.instances.as_slice() {
            [(m, i)] => Ok((m.as_str(), i)),
            [] => Err(CliError::Input("file defines no instance".into())),
            _ => Err(CliError::Input(
                "file defines several instances; pass --instance".into(),
            )),
        },
    }
}

fn select_graph<'a>(file: &'a ProblemFile, name: Option<&str>) -> CliResult<(&'a str, &'a Graph)> {
    match name {
        Some(n) => file
            .graphs
            .iter()
            .find(|(m, _)| m == n)
            .map(|(m, g)| (m.as_str(), g))
            .ok_or_else(|| CliError::Input(format!("no graph named '{n}'"))),
        None => match file.graphs.as_slice() {
            [(m, g)] => Ok((m.as_str(), g)),
            [] => Err(CliError::Input("file defines no graph".into())),
            _ => Err(CliError::Input("file defines several graphs; pass --graph".into())),
        },
    }
}

pub fn count(file: &ProblemFile, instance: Option<&str>, method: Method, settings: &Settings) -> CliResult<Output> {
    let (name, inst) = select_instance(file, instance)?;
    let mut out = Output::new();
    out.kv("instance", name);
    let structured = match method {
        Method::Brute => None,
        Method::Structured | Method::Both => {
            let config = settings.classify_config(file.language.domain().size());
            let counter = Counter::new(file.language.clone(), &config)?;
            Some(counter.count(inst)?)
        }
    };
    let brute = match method {
        Method::Structured => None,
        Method::Brute | Method::Both => Some(settings.oracle().partition_function(inst)?),
    };
    match (brute, structured) {
        (Some(b), Some(s)) => {
            out.passed = b == s;
            out.kv("brute", settings.weight(&b));
            out.kv("structured", settings.weight(&s));
            out.kv("Z", settings.weight(&s));
            out.kv("check", if out.passed { "PASS" } else { "FAIL" });
        }
        (Some(z), None) | (None, Some(z)) => out.kv("Z", settings.weight(&z)),
        (None, None) => unreachable!("some method runs"),
    }
    Ok(out)
}

fn one_based(xs: &[usize]) -> String {
    xs.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(" ")
}

fn certificate_lines(out: &mut Output, cert: &Certificate) {
    out.kv("maltsev", one_based(cert.maltsev.table()));
    out.kv("automorphisms", cert.automorphisms.len());
    for (q, pi) in &cert.automorphisms {
        out.kv(&format!("automorphism{q}"), one_based(pi));
    }
}

pub fn classify_cmd(file: &ProblemFile, settings: &Settings) -> CliResult<Output> {
    let config = settings.classify_config(file.language.domain().size());
    let verdict = classify(&file.language, &config)?;
    let mut out = Output::new();
    match &verdict {
        Verdict::Tractable(cert) => {
            out.kv("verdict", "TRACTABLE");
            certificate_lines(&mut out, cert);
        }
        Verdict::SharpPHard(reason) => {
            out.kv("verdict", "SHARP_P_HARD");
            out.kv("reason", reason);
            if let Reason::UnbalancedInstance { violation, .. } = reason {
                out.kv("matrix", &violation.matrix);
            }
        }
    }
    Ok(out)
}

pub fn vecrep(file: &ProblemFile, function: &str, settings: &Settings) -> CliResult<Output> {
    let idx = file
        .language
        .index_of(function)
        .ok_or_else(|| CliError::Input(format!("no function named '{function}'")))?;
    let f = file.language.function(idx);
    let mut out = Output::new();
    out.kv("function", function);
    match function_vecrep(f) {
        Ok(s) => {
            out.kv("status", "OK");
            for (j, factor) in s.factors().iter().enumerate() {
                out.kv(
                    &format!("s{}", j + 1),
                    format::weights(factor, settings.explicit_denominator),
                );
            }
        }
        Err(e) => {
            out.kv("status", "NOT_BLOCK_RANK_1");
            out.kv("level", e.level);
        }
    }
    Ok(out)
}

pub fn check_balance(
    file: &ProblemFile,
    instance: Option<&str>,
    mode: BalanceMode,
    settings: &Settings,
) -> CliResult<Output> {
    let (name, inst) = select_instance(file, instance)?;
    let verdict = settings.oracle().test_balance_mode(inst, mode)?;
    let mut out = Output::new();
    out.kv("instance", name);
    out.kv("mode", format!("{mode:?}").to_lowercase());
    match verdict {
        BalanceVerdict::Balanced => out.kv("verdict", "BALANCED"),
        BalanceVerdict::Violated(v) => {
            out.kv("verdict", "VIOLATED");
            out.kv("split", v.split);
            out.kv("matrix", v.matrix);
            out.kv("witness", v.witness);
        }
    }
    Ok(out)
}

/// The gadget instance over `graph`, as a problem file whose header
/// comments record the matrix and `Z_A(G)`.
pub fn gadget(
    file: &ProblemFile,
    instance: Option<&str>,
    a: usize,
    b: usize,
    graph: Option<&str>,
    settings: &Settings,
) -> CliResult<String> {
    let (name, inst) = select_instance(file, instance)?;
    let (gname, g) = select_graph(file, graph)?;
    let oracle = settings.oracle();
    let matrix = reductions::gadget_matrix(&oracle, inst, a, b)?;
    let z = reductions::graph_partition_function(&oracle, &matrix, g)?;
    let gadget = reductions::hardness_gadget(inst, a, b, g)?;
    let out = ProblemFile {
        language: file.language.clone(),
        instances: vec![("gadget".to_string(), gadget)],
        graphs: Vec::new(),
    };
    let mut text = format!(
        "# gadget of {name} at split ({a},{b}) over graph {gname}\n# matrix={matrix}\n# graph_partition_function={}\n",
        settings.weight(&z)
    );
    text.push_str(&format::write(&out, settings.explicit_denominator));
    Ok(text)
}

pub fn reduce_unweighted(
    file: &ProblemFile,
    instance: Option<&str>,
    verify: bool,
    settings: &Settings,
) -> CliResult<Output> {
    let (name, inst) = select_instance(file, instance)?;
    let oracle = settings.oracle();
    let values = reductions::value_set(inst).values;
    let count = reductions::count_support_brute(&oracle, inst)?;
    let mut out = Output::new();
    out.kv("instance", name);
    out.kv("values", format::weights(&values, settings.explicit_denominator));
    out.kv("support", &count);
    if verify {
        let size = oracle.relation_of(inst)?.len();
        out.passed = count == size.into();
        out.kv("relation", size);
        out.kv("check", if out.passed { "PASS" } else { "FAIL" });
    }
    Ok(out)
}

/// Shape of a generated corpus file.
#[derive(Clone, Copy, Debug)]
pub struct GenerateOptions {
    pub shape: BlockLanguageShape,
    pub instances: usize,
    pub max_vars: usize,
    pub max_apps: usize,
    pub graph_vertices: usize,
    pub graph_edges: usize,
}

/// A random block language with random instances and, if requested, one
/// random graph. The output depends only on `seed` and `opts`.
pub fn generate(opts: &GenerateOptions, seed: u64, settings: &Settings) -> CliResult<String> {
    if opts.shape.domain == 0 || opts.max_vars == 0 {
        return Err(CliError::Input(
            "domain size and variable count must be positive".into(),
        ));
    }
    if opts.shape.unary + opts.shape.binary + opts.shape.ternary == 0 {
        return Err(CliError::Input("the language needs at least one function".into()));
    }
    let mut rng = corpus::rng(seed);
    let language = corpus::random_block_language(&mut rng, opts.shape);
    let instances = (1..=opts.instances)
        .map(|k| {
            (
                format!("i{k}"),
                corpus::random_instance(&mut rng, &language, opts.max_vars, opts.max_apps),
            )
        })
        .collect();
    let graphs = if opts.graph_vertices > 0 {
        vec![(
            "g1".to_string(),
            corpus::random_graph(&mut rng, opts.graph_vertices, opts.graph_edges),
        )]
    } else {
        Vec::new()
    };
    let file = ProblemFile {
        language,
        instances,
        graphs,
    };
    Ok(format!(
        "# generated with seed {seed}\n{}",
        format::write(&file, settings.explicit_denominator)
    ))
}
