//! Command-line front end. Every subcommand prints to stdout in one of
//! three formats (`--format text|csv|json`) and reports failures on stderr
//! with a stable exit code: 2 for argument or expression problems (syntax
//! errors carry byte positions), 1 for mathematical errors raised by the
//! library, 3 when a positivity check refuses to run within its minor
//! budget, 0 otherwise.

use clap::{Args, Parser, Subcommand, ValueEnum};
use mrd::compress::{
    self, compress_spec, compress_type, pf_check, tp_check, tp_check_with_budget,
    CompressedSpec, TPReport, TPVerdict,
};
use mrd::gfexpr::{self, eval_str, GfError};
use mrd::identities::{fuss_identity_check, grunert_check, riosum_check, umbral_check, IdentityReport};
use mrd::matrix::RationalMatrix;
use mrd::multiriordan::MultiRiordanSpec;
use mrd::rational::{rat_from_str, rat_to_string};
use mrd::riordan::{RiordanKind, RiordanSpec};
use mrd::series::Series;
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "mrd", version, about = "Exact Riordan-array calculator")]
struct Cli {
    /// Output format for results on stdout.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Csv,
    Json,
}

/// Flags that describe one array spec. A classical spec is a single `--f`;
/// two or more (or `--ell`) select the multiple-array layout; `--type`
/// switches from the triangular to the square reading; `--compressed`
/// interprets the functions as the hat-components of an already-compressed
/// array (no residue grading is imposed). `--spec` loads the same fields
/// from a JSON file instead.
#[derive(Args, Clone, Default)]
struct SpecArgs {
    /// Generating function of column zero.
    #[arg(long)]
    g: Option<String>,
    /// Column multiplier; repeat the flag for a multiple array.
    #[arg(long)]
    f: Vec<String>,
    /// Number of multipliers; must match the count of --f flags.
    #[arg(long)]
    ell: Option<usize>,
    /// Square ("type") layout: multipliers keep a nonzero constant term.
    #[arg(long = "type")]
    type_kind: bool,
    /// Treat the functions as hat-components of a compressed array.
    #[arg(long)]
    compressed: bool,
    /// JSON file holding {"g": EXPR, "f": [EXPR, ...], "kind"?, "ell"?, "order"?}.
    #[arg(long, conflicts_with_all = ["g", "f", "ell", "type_kind"])]
    spec: Option<PathBuf>,
    /// Truncation order for every series; defaults to a per-command bound.
    #[arg(long)]
    order: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a generating-function expression to a coefficient list.
    Eval {
        expr: String,
        #[arg(long, default_value_t = 10)]
        order: usize,
    },
    /// Print the leading block of the array described by a spec.
    Build {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 10)]
        rows: usize,
        #[arg(long, default_value_t = 10)]
        cols: usize,
    },
    /// Multiply two specs in the group and print the product spec.
    Mul {
        #[command(flatten)]
        spec: SpecArgs,
        /// Column-zero function of the right factor.
        #[arg(long)]
        g2: Option<String>,
        /// Multiplier of the right factor; repeat for a multiple array.
        #[arg(long)]
        f2: Vec<String>,
        /// JSON spec file for the right factor.
        #[arg(long, conflicts_with_all = ["g2", "f2"])]
        spec2: Option<PathBuf>,
    },
    /// Invert a spec in the group and print the inverse spec.
    Inv {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Print a characterizing sequence (A, Z0, Z1, ...) of a spec.
    Seq {
        #[command(flatten)]
        spec: SpecArgs,
        /// Which sequence: A, Z or Z0, Z1, ... up to the multiplier count,
        /// or "all" for the whole characterization in strided form.
        #[arg(long)]
        which: String,
        #[arg(long, default_value_t = 8)]
        terms: usize,
    },
    /// Print the production matrix of a multiple spec.
    Prodmat {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 8)]
        size: usize,
    },
    /// Compress a multiple array; prints the hat-spec and the block
    /// (or the sampled block alone for a --type source).
    Compress {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 10)]
        rows: usize,
        #[arg(long, default_value_t = 10)]
        cols: usize,
    },
    /// Exhaustive total-positivity check on the leading square block.
    Tp {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 2)]
        max_order: usize,
        #[arg(long, default_value_t = 10)]
        rows: usize,
        /// Minor budget override (default 2000000).
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Polya-frequency check on the coefficients of an expression.
    Pf {
        expr: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 12)]
        terms: usize,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Exact identity checks over parameter grids.
    Identity {
        #[command(subcommand)]
        which: IdentityCommand,
    },
    /// Print the expression grammar and built-in functions.
    Grammar,
}

#[derive(Subcommand)]
enum IdentityCommand {
    /// Binomial power-sum identities at one (m, n, x).
    Umbral {
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Rational evaluation point, e.g. "1" or "-3/2".
        #[arg(long, default_value = "1")]
        x: String,
    },
    /// Array-weighted umbral sums for a proper array (g, f).
    Riosum {
        #[arg(long)]
        g: String,
        #[arg(long)]
        f: String,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        s: usize,
        #[arg(long)]
        order: Option<usize>,
    },
    /// Euler-operator expansion and power-sum series for one function.
    Grunert {
        #[arg(long)]
        f: String,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 12)]
        order: usize,
    },
    /// Fuss-Catalan instantiation of the array sums.
    Fuss {
        #[arg(long, default_value_t = 2)]
        ell: usize,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        s: usize,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn math(err: impl std::fmt::Display) -> Self {
        Failure { code: 1, message: err.to_string() }
    }
}

fn gf_fail(err: GfError) -> Failure {
    // Series-level failures inside an expression (bad reversion, division)
    // are mathematical; everything else is a parse problem.
    match err {
        GfError::Series(_) => Failure::math(err),
        _ => Failure::validation(err.to_string()),
    }
}

fn main() {
    // Die quietly when a downstream pager closes the pipe, like cat does.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            std::process::exit(failure.code);
        }
    }
}

enum ResolvedSpec {
    Classical(RiordanSpec),
    Multi(MultiRiordanSpec),
    Compressed(CompressedSpec),
}

#[derive(serde::Deserialize)]
struct SpecFile {
    g: String,
    f: Vec<String>,
    #[serde(default)]
    kind: Option<String>,
    #[serde(default)]
    ell: Option<usize>,
    #[serde(default)]
    order: Option<usize>,
}

struct SpecInputs {
    g: String,
    f: Vec<String>,
    ell: Option<usize>,
    square: bool,
    compressed: bool,
    order: Option<usize>,
}

fn gather(args: &SpecArgs) -> Result<SpecInputs, Failure> {
    if let Some(path) = &args.spec {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| Failure::validation(format!("cannot read {}: {e}", path.display())))?;
        let file: SpecFile = serde_json::from_str(&raw)
            .map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?;
        let square = match file.kind.as_deref() {
            None | Some("proper") => false,
            Some("square") => true,
            Some(other) => {
                return Err(Failure::validation(format!(
                    "{}: kind must be \"proper\" or \"square\", got \"{other}\"",
                    path.display()
                )))
            }
        };
        return Ok(SpecInputs {
            g: file.g,
            f: file.f,
            ell: file.ell,
            square,
            compressed: args.compressed,
            order: args.order.or(file.order),
        });
    }
    let g = args
        .g
        .clone()
        .ok_or_else(|| Failure::validation("missing --g (or --spec FILE)"))?;
    Ok(SpecInputs {
        g,
        f: args.f.clone(),
        ell: args.ell,
        square: args.type_kind,
        compressed: args.compressed,
        order: args.order,
    })
}

fn resolve(args: &SpecArgs, default_order: impl Fn(usize) -> usize) -> Result<ResolvedSpec, Failure> {
    let inputs = gather(args)?;
    if inputs.f.is_empty() {
        return Err(Failure::validation("at least one --f is required"));
    }
    let ell = match inputs.ell {
        Some(e) if e != inputs.f.len() => {
            return Err(Failure::validation(format!(
                "--ell {e} does not match the {} --f flag(s) given",
                inputs.f.len()
            )))
        }
        Some(e) => e,
        None => inputs.f.len(),
    };
    let order = inputs.order.unwrap_or_else(|| default_order(ell));
    let g = eval_str(&inputs.g, order).map_err(gf_fail)?;
    let f = inputs
        .f
        .iter()
        .map(|src| eval_str(src, order))
        .collect::<Result<Vec<_>, _>>()
        .map_err(gf_fail)?;
    if inputs.compressed {
        if inputs.square {
            return Err(Failure::validation("--compressed only applies to triangular arrays"));
        }
        if ell < 2 {
            return Err(Failure::validation("--compressed needs at least two multipliers"));
        }
        return CompressedSpec::new(ell, g, f).map(ResolvedSpec::Compressed).map_err(Failure::math);
    }
    if ell == 1 {
        let spec = if inputs.square {
            RiordanSpec::square(g, f.into_iter().next().unwrap())
        } else {
            RiordanSpec::proper(g, f.into_iter().next().unwrap())
        };
        return spec.map(ResolvedSpec::Classical).map_err(Failure::math);
    }
    let spec = if inputs.square {
        MultiRiordanSpec::square(ell, g, f)
    } else {
        MultiRiordanSpec::proper(ell, g, f)
    };
    spec.map(ResolvedSpec::Multi).map_err(Failure::math)
}

fn run(cli: Cli) -> Result<i32, Failure> {
    let format = cli.format;
    match cli.command {
        Command::Eval { expr, order } => {
            let series = eval_str(&expr, order).map_err(gf_fail)?;
            print_series(&series, format);
            Ok(0)
        }
        Command::Build { spec, rows, cols } => {
            let resolved = resolve(&spec, |_| rows + cols)?;
            let block = match &resolved {
                ResolvedSpec::Classical(s) => s.build(rows, cols).map_err(Failure::math)?,
                ResolvedSpec::Multi(s) => s.mbuild(rows, cols).map_err(Failure::math)?,
                ResolvedSpec::Compressed(s) => s.build(rows, cols).map_err(Failure::math)?,
            };
            print_matrix(&block, format);
            Ok(0)
        }
        Command::Mul { spec, g2, f2, spec2 } => {
            let right_args = SpecArgs {
                g: g2,
                f: f2,
                ell: spec.ell,
                type_kind: spec.type_kind,
                compressed: spec.compressed,
                spec: spec2,
                order: spec.order,
            };
            let left = resolve(&spec, |_| 24)?;
            let right = resolve(&right_args, |_| 24)?;
            match (left, right) {
                (ResolvedSpec::Classical(a), ResolvedSpec::Classical(b)) => {
                    let product = a.mul(&b).map_err(Failure::math)?;
                    print_classical_spec(&product, format);
                }
                (ResolvedSpec::Multi(a), ResolvedSpec::Multi(b)) => {
                    let product = a.mmul(&b).map_err(Failure::math)?;
                    print_multi_spec(&product, format);
                }
                _ => {
                    return Err(Failure::validation(
                        "both factors must have the same number of multipliers",
                    ))
                }
            }
            Ok(0)
        }
        Command::Inv { spec } => {
            match resolve(&spec, |_| 24)? {
                ResolvedSpec::Classical(a) => {
                    print_classical_spec(&a.inv().map_err(Failure::math)?, format)
                }
                ResolvedSpec::Multi(a) => {
                    print_multi_spec(&a.minv().map_err(Failure::math)?, format)
                }
                ResolvedSpec::Compressed(_) => {
                    return Err(Failure::validation(
                        "inversion acts on array specs, not compressed specs",
                    ))
                }
            }
            Ok(0)
        }
        Command::Seq { spec, which, terms } => {
            let resolved = resolve(&spec, |ell| ell * (terms + 4))?;
            if which.eq_ignore_ascii_case("all") {
                return print_seq_char(resolved, terms, format);
            }
            let selector = parse_which(&which)?;
            let (label, coeffs) = match resolved {
                ResolvedSpec::Classical(s) => {
                    let series = match selector {
                        Selector::A => s.a_sequence(terms).map_err(Failure::math)?,
                        Selector::Z(0) => s.z_sequence(terms).map_err(Failure::math)?,
                        Selector::Z(m) => {
                            return Err(Failure::validation(format!(
                                "Z{m} needs a spec with more than {m} multiplier(s)"
                            )))
                        }
                    };
                    (selector.label(), series.coeffs().to_vec())
                }
                ResolvedSpec::Multi(s) => {
                    let seq = s.mseq().map_err(Failure::math)?;
                    let series = match selector {
                        Selector::A => seq.a(),
                        Selector::Z(m) if m < s.ell() => seq.z(m),
                        Selector::Z(m) => {
                            return Err(Failure::validation(format!(
                                "Z{m} is out of range for {} multipliers",
                                s.ell()
                            )))
                        }
                    };
                    if series.order() + 1 < terms {
                        return Err(Failure::math(format!(
                            "sequence computed to {} term(s); raise --order",
                            series.order() + 1
                        )));
                    }
                    (selector.label(), series.coeffs()[..terms].to_vec())
                }
                ResolvedSpec::Compressed(_) => {
                    return Err(Failure::validation(
                        "sequences are read off array specs, not compressed specs",
                    ))
                }
            };
            let rendered: Vec<String> = coeffs.iter().map(rat_to_string).collect();
            match format {
                OutputFormat::Text => println!("{}", rendered.join(", ")),
                OutputFormat::Csv => println!("{}", rendered.join(",")),
                OutputFormat::Json => println!(
                    "{}",
                    serde_json::json!({ "which": label, "coeffs": rendered })
                ),
            }
            Ok(0)
        }
        Command::Prodmat { spec, size } => {
            let resolved = resolve(&spec, |ell| ell * (size + 4))?;
            let ResolvedSpec::Multi(s) = resolved else {
                return Err(Failure::validation(
                    "the production matrix needs a multiple spec (two or more --f flags)",
                ));
            };
            let production = s.production_matrix(size).map_err(Failure::math)?;
            print_matrix(production.entries(), format);
            Ok(0)
        }
        Command::Compress { spec, rows, cols } => {
            let resolved = resolve(&spec, |ell| (rows + cols) * ell)?;
            let ResolvedSpec::Multi(s) = resolved else {
                return Err(Failure::validation(
                    "compression needs a multiple spec (two or more --f flags)",
                ));
            };
            if s.kind() == RiordanKind::Square {
                let block = compress_type(&s, rows, cols).map_err(Failure::math)?;
                print_matrix(&block, format);
                return Ok(0);
            }
            let block = compress::compress(&s, rows, cols).map_err(Failure::math)?;
            let chat = compress_spec(&s).map_err(Failure::math)?;
            match format {
                OutputFormat::Json => {
                    let value = serde_json::json!({
                        "spec": chat,
                        "matrix": block,
                    });
                    println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
                }
                _ => {
                    print_compressed_spec(&chat, format);
                    println!();
                    print_matrix(&block, format);
                }
            }
            Ok(0)
        }
        Command::Tp { spec, max_order, rows, budget } => {
            let resolved = resolve(&spec, |ell| 2 * rows * ell)?;
            let block = match &resolved {
                ResolvedSpec::Classical(s) => s.build(rows, rows).map_err(Failure::math)?,
                ResolvedSpec::Multi(s) => s.mbuild(rows, rows).map_err(Failure::math)?,
                ResolvedSpec::Compressed(s) => s.build(rows, rows).map_err(Failure::math)?,
            };
            let report = match budget {
                Some(limit) => tp_check_with_budget(&block, max_order, limit),
                None => tp_check(&block, max_order),
            };
            print_tp_report(&report, format);
            Ok(if report.budget_exceeded() { 3 } else { 0 })
        }
        Command::Pf { expr, depth, terms, budget } => {
            if terms == 0 {
                return Err(Failure::validation("--terms must be positive"));
            }
            let series = eval_str(&expr, terms - 1).map_err(gf_fail)?;
            let report = match budget {
                Some(limit) => {
                    let toeplitz = RationalMatrix::from_fn(terms, terms, |i, j| {
                        if i >= j {
                            series.coeffs()[i - j].clone()
                        } else {
                            mrd::Rational::from_integer(0.into())
                        }
                    });
                    tp_check_with_budget(&toeplitz, depth, limit)
                }
                None => pf_check(series.coeffs(), depth, terms),
            };
            print_tp_report(&report, format);
            Ok(if report.budget_exceeded() { 3 } else { 0 })
        }
        Command::Identity { which } => {
            let report = match which {
                IdentityCommand::Umbral { m, n, x } => {
                    let x = rat_from_str(&x)
                        .map_err(|e| Failure::validation(format!("--x: {e}")))?;
                    umbral_check(m, n, &x)
                }
                IdentityCommand::Riosum { g, f, m, n, s, order } => {
                    let order = order.unwrap_or(n + s + 2);
                    let g = eval_str(&g, order).map_err(gf_fail)?;
                    let f = eval_str(&f, order).map_err(gf_fail)?;
                    let spec = RiordanSpec::proper(g, f).map_err(Failure::math)?;
                    riosum_check(&spec, m, n, s).map_err(Failure::math)?
                }
                IdentityCommand::Grunert { f, m, order } => {
                    let f = eval_str(&f, order).map_err(gf_fail)?;
                    grunert_check(&f, m, order)
                }
                IdentityCommand::Fuss { ell, p, m, n, s } => {
                    if ell == 0 || p == 0 {
                        return Err(Failure::validation("--ell and --p must be positive"));
                    }
                    fuss_identity_check(ell, p, m, n, s)
                }
            };
            print_identity_report(&report, format);
            Ok(0)
        }
        Command::Grammar => {
            println!("{}", gfexpr::GRAMMAR.trim_end());
            println!();
            println!("built-in functions:");
            for (name, arity, summary) in gfexpr::BUILTINS {
                println!("  {name}/{arity}: {summary}");
            }
            Ok(0)
        }
    }
}

enum Selector {
    A,
    Z(usize),
}

impl Selector {
    fn label(&self) -> String {
        match self {
            Selector::A => "A".into(),
            Selector::Z(m) => format!("Z{m}"),
        }
    }
}

fn parse_which(which: &str) -> Result<Selector, Failure> {
    if which.eq_ignore_ascii_case("a") {
        return Ok(Selector::A);
    }
    if let Some(rest) = which.strip_prefix(['z', 'Z']) {
        if rest.is_empty() {
            return Ok(Selector::Z(0));
        }
        if let Ok(m) = rest.parse::<usize>() {
            return Ok(Selector::Z(m));
        }
    }
    Err(Failure::validation(format!(
        "--which must be A, Z, Z<index>, or all, got \"{which}\""
    )))
}

/// The `--which all` form: every sequence at once, in strided form (one
/// entry per stride step, so the numbers line up with hand tables).
fn print_seq_char(
    resolved: ResolvedSpec,
    terms: usize,
    format: OutputFormat,
) -> Result<i32, Failure> {
    let (ell, a, zs): (usize, Vec<String>, Vec<Vec<String>>) = match resolved {
        ResolvedSpec::Classical(s) => {
            let a = s.a_sequence(terms).map_err(Failure::math)?;
            let z = s.z_sequence(terms).map_err(Failure::math)?;
            (1, series_cells(&a), vec![series_cells(&z)])
        }
        ResolvedSpec::Multi(s) => {
            let seq = s.mseq().map_err(Failure::math)?;
            let have = seq.a().order() / s.ell() + 1;
            if have < terms {
                return Err(Failure::math(format!(
                    "only {have} strided term(s) available; raise --order"
                )));
            }
            let strided = |series: &Series| -> Vec<String> {
                (0..terms)
                    .map(|j| rat_to_string(&series.coeffs()[j * s.ell()]))
                    .collect()
            };
            (s.ell(), strided(seq.a()), seq.z_all().iter().map(strided).collect())
        }
        ResolvedSpec::Compressed(_) => {
            return Err(Failure::validation(
                "sequences are read off array specs, not compressed specs",
            ))
        }
    };
    match format {
        OutputFormat::Text => {
            println!("stride: {ell}");
            println!("A: {}", a.join(", "));
            for (m, z) in zs.iter().enumerate() {
                println!("Z{m}: {}", z.join(", "));
            }
        }
        OutputFormat::Csv => {
            println!("stride,{ell}");
            println!("A,{}", a.join(","));
            for (m, z) in zs.iter().enumerate() {
                println!("Z{m},{}", z.join(","));
            }
        }
        OutputFormat::Json => println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::json!({
                "ell": ell,
                "stride": ell,
                "A": a,
                "Z": zs,
            }))
            .expect("string arrays always serialize")
        ),
    }
    Ok(0)
}

fn series_cells(series: &Series) -> Vec<String> {
    series.coeffs().iter().map(rat_to_string).collect()
}

fn print_series(series: &Series, format: OutputFormat) {
    match format {
        OutputFormat::Text => println!("{}", series_cells(series).join(", ")),
        OutputFormat::Csv => println!("{}", series_cells(series).join(",")),
        OutputFormat::Json => {
            println!("{}", serde_json::to_string_pretty(series).expect("serializable"))
        }
    }
}

fn print_matrix(matrix: &RationalMatrix, format: OutputFormat) {
    match format {
        OutputFormat::Text => {
            let cells: Vec<Vec<String>> = (0..matrix.rows())
                .map(|i| matrix.row(i).iter().map(rat_to_string).collect())
                .collect();
            let mut widths = vec![0usize; matrix.cols()];
            for row in &cells {
                for (j, cell) in row.iter().enumerate() {
                    widths[j] = widths[j].max(cell.len());
                }
            }
            for row in &cells {
                let mut line = String::new();
                for (j, cell) in row.iter().enumerate() {
                    if j > 0 {
                        line.push(' ');
                    }
                    write!(line, "{cell:>width$}", width = widths[j]).expect("string write");
                }
                println!("{line}");
            }
        }
        OutputFormat::Csv => {
            for i in 0..matrix.rows() {
                let row: Vec<String> = matrix.row(i).iter().map(rat_to_string).collect();
                println!("{}", row.join(","));
            }
        }
        OutputFormat::Json => {
            println!("{}", serde_json::to_string_pretty(matrix).expect("serializable"))
        }
    }
}

fn print_labeled_series(label: &str, series: &Series, format: OutputFormat) {
    match format {
        OutputFormat::Text => println!("{label}: {}", series_cells(series).join(", ")),
        OutputFormat::Csv => println!("{label},{}", series_cells(series).join(",")),
        OutputFormat::Json => unreachable!("json specs are printed whole"),
    }
}

fn print_classical_spec(spec: &RiordanSpec, format: OutputFormat) {
    if format == OutputFormat::Json {
        let value = serde_json::json!({
            "ell": 1,
            "kind": kind_name(spec.kind()),
            "g": spec.g(),
            "f": [spec.f()],
        });
        println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
        return;
    }
    print_labeled_series("g", spec.g(), format);
    print_labeled_series("f", spec.f(), format);
}

fn print_multi_spec(spec: &MultiRiordanSpec, format: OutputFormat) {
    if format == OutputFormat::Json {
        let f: Vec<&Series> = spec.multipliers().collect();
        let value = serde_json::json!({
            "ell": spec.ell(),
            "kind": kind_name(spec.kind()),
            "g": spec.g(),
            "f": f,
        });
        println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
        return;
    }
    print_labeled_series("g", spec.g(), format);
    for (i, f) in spec.multipliers().enumerate() {
        print_labeled_series(&format!("f{}", i + 1), f, format);
    }
}

fn print_compressed_spec(spec: &CompressedSpec, format: OutputFormat) {
    if format == OutputFormat::Json {
        println!("{}", serde_json::to_string_pretty(spec).expect("serializable"));
        return;
    }
    print_labeled_series("ghat", spec.ghat(), format);
    for (i, f) in spec.fhats().enumerate() {
        print_labeled_series(&format!("fhat{}", i + 1), f, format);
    }
}

fn kind_name(kind: RiordanKind) -> &'static str {
    match kind {
        RiordanKind::Proper => "proper",
        RiordanKind::Square => "square",
    }
}

fn print_tp_report(report: &TPReport, format: OutputFormat) {
    match format {
        OutputFormat::Json => {
            println!("{}", serde_json::to_string_pretty(report).expect("serializable"))
        }
        OutputFormat::Text => match &report.verdict {
            TPVerdict::AllNonnegative => println!(
                "ok: every minor of order <= {} on the {}x{} block is nonnegative",
                report.max_order, report.block, report.block
            ),
            TPVerdict::Violation(w) => println!(
                "violation: minor rows={:?} cols={:?} value={}",
                w.rows,
                w.cols,
                rat_to_string(&w.value)
            ),
            TPVerdict::BudgetExceeded { required, budget } => println!(
                "budget exceeded: {required} minors required, limit {budget}"
            ),
        },
        OutputFormat::Csv => match &report.verdict {
            TPVerdict::AllNonnegative => {
                println!("ok,{},{}", report.max_order, report.block)
            }
            TPVerdict::Violation(w) => println!(
                "violation,{},{},{}",
                join_indices(&w.rows),
                join_indices(&w.cols),
                rat_to_string(&w.value)
            ),
            TPVerdict::BudgetExceeded { required, budget } => {
                println!("budget,{required},{budget}")
            }
        },
    }
}

fn join_indices(indices: &[usize]) -> String {
    indices.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
}

fn print_identity_report(report: &IdentityReport, format: OutputFormat) {
    match format {
        OutputFormat::Json => {
            println!("{}", serde_json::to_string_pretty(report).expect("serializable"))
        }
        OutputFormat::Text => {
            let failures: Vec<_> = report.failures().collect();
            if failures.is_empty() {
                println!("{}: holds ({} point(s))", report.name, report.points.len());
            } else {
                println!(
                    "{}: fails ({} of {} point(s))",
                    report.name,
                    failures.len(),
                    report.points.len()
                );
                for point in failures {
                    let params: Vec<String> =
                        point.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    println!(
                        "  {}: left {} != right {}",
                        params.join(" "),
                        rat_to_string(&point.left),
                        rat_to_string(&point.right)
                    );
                }
            }
        }
        OutputFormat::Csv => {
            for point in &report.points {
                let params: Vec<String> =
                    point.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                println!(
                    "{},{},{},{},{}",
                    report.name,
                    params.join(" "),
                    rat_to_string(&point.left),
                    rat_to_string(&point.right),
                    point.holds()
                );
            }
        }
    }
}
