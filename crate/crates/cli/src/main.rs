use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use jetlie::claims::InterpChoice;
use jetlie::engine::DEFAULT_BASIS_LIMIT;
use jetlie::jet::DEFAULT_MAX_ORDER;
use jetlie_cli::{commands, CliError, Format, ParamValue, Report, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "jetlie",
    version,
    about = "Exact symmetry analysis of u_xt = a u + (b/3)(u^3)_xx"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Value of a: a nonzero rational, or `sym`.
    #[arg(long, global = true, default_value = "sym", allow_hyphen_values = true)]
    alpha: ParamValue,
    /// Value of b: a nonzero rational, or `sym`.
    #[arg(long, global = true, default_value = "sym", allow_hyphen_values = true)]
    beta: ParamValue,
    /// Highest jet order the engine may reach.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_ORDER)]
    max_order: u32,
    /// Reading of u_{x^3}: third derivative, cube of u_x, or both.
    #[arg(long, global = true, default_value = "third")]
    interp: InterpChoice,
    #[arg(long, global = true, default_value = "text")]
    format: Format,
    /// Seed of the numeric spot checks.
    #[arg(long, global = true, default_value_t = 11)]
    seed: u64,
    /// Largest ansatz basis accepted by `solve`.
    #[arg(long, global = true, default_value_t = DEFAULT_BASIS_LIMIT)]
    basis_limit: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether characteristics are symmetries. Aliases: v4, v5,
    /// v5-time, c1..c5, scaling. Put `--` before a characteristic that
    /// starts with `-`.
    Verify {
        #[arg(required = true)]
        targets: Vec<String>,
    },
    /// Solve the symmetry condition over an ansatz: point-affine, order-1..4
    /// or a list of monomials separated by spaces or `;`.
    Solve {
        #[arg(required = true)]
        basis: Vec<String>,
        /// Jet degree bound for order-N bases.
        #[arg(long)]
        degree: Option<u32>,
    },
    /// Determining system of an opaque characteristic Q.
    Determining {
        /// Comma-separated arguments of Q.
        #[arg(long)]
        arity: Option<String>,
        /// Comma-separated coordinates to collect in.
        #[arg(long)]
        collect: Option<String>,
    },
    /// Commutator table of the point symmetry algebra.
    Table,
    /// Adjoint action closed forms.
    Adjoint,
    /// Optimal-system representative of c1 c2 c3 (one element) or of
    /// h1 h2 (six numbers, a two-dimensional subalgebra).
    Normalize {
        #[arg(required = true, allow_negative_numbers = true)]
        numbers: Vec<String>,
    },
    /// Reduce by an element such as "v1+2v2", "v1+A*v2", "B*v1+v2" or "v3".
    Reduce {
        #[arg(long, allow_hyphen_values = true)]
        rep: String,
    },
    /// One-parameter groups of the point symmetries, or of --field "xi, tau, eta".
    Flow {
        #[arg(long, allow_hyphen_values = true)]
        field: Option<String>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Verify { .. } => "verify",
            Command::Solve { .. } => "solve",
            Command::Determining { .. } => "determining",
            Command::Table => "table",
            Command::Adjoint => "adjoint",
            Command::Normalize { .. } => "normalize",
            Command::Reduce { .. } => "reduce",
            Command::Flow { .. } => "flow",
        }
    }
}

fn run(cli: &Cli, cfg: &RunConfig) -> Result<Report, CliError> {
    match &cli.command {
        Command::Verify { targets } => commands::verify(cfg, targets),
        Command::Solve { basis, degree } => commands::solve(cfg, basis, *degree),
        Command::Determining { arity, collect } => {
            commands::determining(cfg, arity.as_deref(), collect.as_deref())
        }
        Command::Table => commands::table(cfg),
        Command::Adjoint => commands::adjoint(cfg),
        Command::Normalize { numbers } => commands::normalize(cfg, numbers),
        Command::Reduce { rep } => commands::reduce(cfg, rep),
        Command::Flow { field } => commands::flow_cmd(cfg, field.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let cfg = RunConfig {
        alpha: g.alpha.clone(),
        beta: g.beta.clone(),
        max_order: g.max_order,
        interp: g.interp,
        format: g.format,
        seed: g.seed,
        basis_limit: g.basis_limit,
    };
    match run(&cli, &cfg) {
        Ok(report) => {
            match cfg.format {
                Format::Text => print!("{}", report.render_text()),
                Format::Json => print!("{}", report.render_json()),
            }
            ExitCode::from(report.exit_code as u8)
        }
        Err(e) => {
            if cfg.format == Format::Json {
                let v =
                    serde_json::json!({ "command": cli.command.name(), "error": e.to_string() });
                println!("{}", serde_json::to_string_pretty(&v).expect("serializes"));
            }
            eprintln!("jetlie: {e}");
            ExitCode::from(CliError::EXIT_CODE as u8)
        }
    }
}
