use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use wcsp_cli::commands::{self, CliError, CliResult, GenerateOptions, Method, Settings};
use wcsp_cli::format::{self, ProblemFile};
use wcsp_core::corpus::BlockLanguageShape;
use wcsp_core::oracle::{BalanceMode, DEFAULT_BOUND};

#[derive(Parser)]
#[command(
    name = "wcsp",
    version,
    about = "Exact counting and classification for weighted constraint problems"
)]
struct Cli {
    /// Largest assignment space any enumeration may visit.
    #[arg(long, global = true, default_value_t = DEFAULT_BOUND)]
    bound: u64,
    /// Worker threads for enumeration (0 picks one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Seed for generated corpora.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print integers as `p/1`.
    #[arg(long, global = true)]
    explicit_denominator: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Brute,
    Structured,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Full,
    Weak,
    Primitive,
    Strong,
}

#[derive(Subcommand)]
enum Command {
    /// Partition function of an instance.
    Count {
        file: PathBuf,
        #[arg(long)]
        instance: Option<String>,
        #[arg(long, value_enum, default_value = "brute")]
        method: MethodArg,
    },
    /// Tractability verdict for the file's language.
    Classify { file: PathBuf },
    /// Vector representation of one function.
    Vecrep {
        file: PathBuf,
        #[arg(long)]
        function: String,
    },
    /// Balance test on the marginal or existential matrices of an instance.
    CheckBalance {
        file: PathBuf,
        #[arg(long)]
        instance: Option<String>,
        #[arg(long, value_enum, default_value = "full")]
        mode: ModeArg,
    },
    /// Emits the graph gadget for an instance and split as a problem file.
    Gadget {
        file: PathBuf,
        #[arg(long)]
        instance: Option<String>,
        #[arg(short)]
        a: usize,
        #[arg(short)]
        b: usize,
        #[arg(long)]
        graph: Option<String>,
        /// Write to this path instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Support size of an instance from weighted partition functions.
    ReduceUnweighted {
        file: PathBuf,
        #[arg(long)]
        instance: Option<String>,
        /// Also count the support directly and compare.
        #[arg(long)]
        verify: bool,
    },
    /// Random tractable language with instances, driven by --seed.
    Generate {
        #[arg(long, default_value_t = 2)]
        domain: usize,
        #[arg(long, default_value_t = 1)]
        unary: usize,
        #[arg(long, default_value_t = 2)]
        binary: usize,
        #[arg(long, default_value_t = 0)]
        ternary: usize,
        #[arg(long, default_value_t = 4)]
        max_weight: i64,
        #[arg(long, default_value_t = 3)]
        instances: usize,
        #[arg(long, default_value_t = 4)]
        max_vars: usize,
        #[arg(long, default_value_t = 4)]
        max_apps: usize,
        /// Vertices of the generated graph; 0 omits it.
        #[arg(long, default_value_t = 0)]
        graph_vertices: usize,
        #[arg(long, default_value_t = 3)]
        graph_edges: usize,
    },
}

fn load(path: &Path) -> CliResult<ProblemFile> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(format::parse(&text)?)
}

fn run(cli: Cli) -> CliResult<bool> {
    let settings = Settings {
        bound: cli.bound,
        explicit_denominator: cli.explicit_denominator,
    };
    let output = match cli.command {
        Command::Count { file, instance, method } => {
            let method = match method {
                MethodArg::Brute => Method::Brute,
                MethodArg::Structured => Method::Structured,
                MethodArg::Both => Method::Both,
            };
            commands::count(&load(&file)?, instance.as_deref(), method, &settings)?
        }
        Command::Classify { file } => commands::classify_cmd(&load(&file)?, &settings)?,
        Command::Vecrep { file, function } => commands::vecrep(&load(&file)?, &function, &settings)?,
        Command::CheckBalance { file, instance, mode } => {
            let mode = match mode {
                ModeArg::Full => BalanceMode::Full,
                ModeArg::Weak => BalanceMode::Weak,
                ModeArg::Primitive => BalanceMode::Primitive,
                ModeArg::Strong => BalanceMode::Strong,
            };
            commands::check_balance(&load(&file)?, instance.as_deref(), mode, &settings)?
        }
        Command::Gadget {
            file,
            instance,
            a,
            b,
            graph,
            output,
        } => {
            let text = commands::gadget(&load(&file)?, instance.as_deref(), a, b, graph.as_deref(), &settings)?;
            return emit(&text, output.as_deref()).map(|()| true);
        }
        Command::ReduceUnweighted { file, instance, verify } => {
            commands::reduce_unweighted(&load(&file)?, instance.as_deref(), verify, &settings)?
        }
        Command::Generate {
            domain,
            unary,
            binary,
            ternary,
            max_weight,
            instances,
            max_vars,
            max_apps,
            graph_vertices,
            graph_edges,
        } => {
            let opts = GenerateOptions {
                shape: BlockLanguageShape {
                    domain,
                    unary,
                    binary,
                    ternary,
                    max_weight,
                },
                instances,
                max_vars,
                max_apps,
                graph_vertices,
                graph_edges,
            };
            let text = commands::generate(&opts, cli.seed, &settings)?;
            return emit(&text, None).map(|()| true);
        }
    };
    print!("{output}");
    Ok(output.passed)
}

fn emit(text: &str, path: Option<&Path>) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
