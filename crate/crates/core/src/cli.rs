//! Command-line front end.
//!
//! Exit codes: 0 success, 1 bad arguments or malformed input, 2 a
//! construction or verification failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::clifford_rep::Signature;
use crate::htype::{self, bracket_lines, csv_entries, verify_htype, HTypeAlgebra, HTypeError, MAX_GENERATORS};
use crate::tensor_periodicity::{is_doubled, minimal_dimension, plan, ConstructionPlan, Step};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILED: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "htype", version, about = "Integral structure constants for H-type Lie algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build and verify the algebra of a minimal admissible Cl_{r,s}-module.
    Build(BuildArgs),
    /// Re-verify a serialized algebra.
    Verify {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Minimal admissible dimensions and construction paths.
    Table {
        #[arg(long, default_value_t = 8)]
        max_sum: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print the construction plan for a signature.
    Explain(SigArgs),
}

#[derive(Args, Debug)]
struct SigArgs {
    #[arg(long = "r")]
    r: usize,
    #[arg(long = "s")]
    s: usize,
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[command(flatten)]
    sig: SigArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Also print the construction plan (to stderr).
    #[arg(long)]
    explain: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

fn signature(args: &SigArgs) -> Result<Signature, String> {
    let sig = Signature::new(args.r, args.s);
    if sig.n() == 0 {
        return Err("need r+s >= 1".into());
    }
    if sig.n() > MAX_GENERATORS {
        return Err(format!("r+s = {} exceeds {MAX_GENERATORS}", sig.n()));
    }
    Ok(sig)
}

pub fn step_label(step: &Step) -> String {
    match step {
        Step::Base { r, s } => format!("base({r},{s})"),
        Step::TransferPhi => "phi".into(),
        Step::ExtendS8 => "extend_s8".into(),
        Step::ExtendR8 => "extend_r8".into(),
        Step::Extend44 => "extend_44".into(),
        Step::Twist0n2 => "twist_0n2".into(),
        Step::Twist11 => "twist_11".into(),
        Step::Double => "double".into(),
    }
}

pub fn path_label(plan: &ConstructionPlan) -> String {
    plan.steps.iter().map(step_label).collect::<Vec<_>>().join(" -> ")
}

fn render(alg: &HTypeAlgebra, format: Format) -> String {
    match format {
        Format::Json => alg.to_json() + "\n",
        Format::Csv => csv_entries(alg),
        Format::Text => bracket_lines(alg).join("\n") + "\n",
    }
}

fn cmd_build(args: &BuildArgs, out: &mut dyn Write, err: &mut dyn Write) -> std::io::Result<i32> {
    let sig = match signature(&args.sig) {
        Ok(s) => s,
        Err(e) => {
            writeln!(err, "error: {e}")?;
            return Ok(EXIT_USAGE);
        }
    };
    let built = match htype::build(sig) {
        Ok(b) => b,
        Err(e @ (HTypeError::Empty(_) | HTypeError::TooLarge { .. })) => {
            writeln!(err, "error: {e}")?;
            return Ok(EXIT_USAGE);
        }
        Err(e) => {
            writeln!(err, "construction failed for {sig}: {e}")?;
            return Ok(EXIT_FAILED);
        }
    };
    if args.explain {
        writeln!(err, "{}", serde_json::to_string_pretty(&built.plan).expect("plan serializes"))?;
    }
    let report = verify_htype(&built.algebra, Some(&built.rep));
    if !report.is_ok() {
        write!(err, "verification failed for {sig}\n{report}")?;
        return Ok(EXIT_FAILED);
    }
    let body = render(&built.algebra, args.format);
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &body) {
                writeln!(err, "error: cannot write {}: {e}", path.display())?;
                return Ok(EXIT_USAGE);
            }
            if args.format != Format::Text {
                write!(out, "{}", render(&built.algebra, Format::Text))?;
            }
        }
        None => write!(out, "{body}")?,
    }
    writeln!(
        err,
        "{sig}: dim V = {}, dim Z = {}, minimal: {}, path: {}",
        built.algebra.m,
        built.algebra.n,
        built.plan.minimal,
        path_label(&built.plan)
    )?;
    Ok(EXIT_OK)
}

fn cmd_verify(file: &PathBuf, format: Format, out: &mut dyn Write, err: &mut dyn Write) -> std::io::Result<i32> {
    let text = match std::fs::read_to_string(file) {
        Ok(t) => t,
        Err(e) => {
            writeln!(err, "error: cannot read {}: {e}", file.display())?;
            return Ok(EXIT_USAGE);
        }
    };
    let alg = match HTypeAlgebra::from_json(&text) {
        Ok(a) => a,
        Err(json_err) => {
            // non-integer but rational constants are still worth a rationality verdict
            return match htype::parse_constants(&text) {
                Ok(c) => {
                    let r = c.report();
                    writeln!(out, "{r}")?;
                    if r.integer {
                        writeln!(err, "error: not a complete algebra: {json_err}")?;
                        Ok(EXIT_USAGE)
                    } else {
                        writeln!(err, "integrality: FAIL")?;
                        Ok(EXIT_FAILED)
                    }
                }
                Err(_) => {
                    writeln!(err, "error: {}: {json_err}", file.display())?;
                    Ok(EXIT_USAGE)
                }
            };
        }
    };
    let report = verify_htype(&alg, None);
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("report serializes"))?,
        _ => {
            write!(out, "{report}")?;
            if report.is_ok() {
                writeln!(out, "{}", htype::rationality_report(&alg))?;
            }
        }
    }
    Ok(if report.is_ok() { EXIT_OK } else { EXIT_FAILED })
}

#[derive(Serialize)]
struct TableRow {
    r: usize,
    s: usize,
    dim: usize,
    doubled: bool,
    minimal: bool,
    path: String,
}

pub fn table_rows(max_sum: usize) -> Vec<(Signature, usize, bool, ConstructionPlan)> {
    let mut rows = Vec::new();
    for n in 1..=max_sum {
        for r in (0..=n).rev() {
            let sig = Signature::new(r, n - r);
            rows.push((sig, minimal_dimension(sig), is_doubled(sig), plan(sig)));
        }
    }
    rows
}

fn cmd_table(max_sum: usize, format: Format, out: &mut dyn Write, err: &mut dyn Write) -> std::io::Result<i32> {
    if max_sum == 0 || max_sum > MAX_GENERATORS {
        writeln!(err, "error: --max-sum must be in 1..={MAX_GENERATORS}")?;
        return Ok(EXIT_USAGE);
    }
    let rows: Vec<TableRow> = table_rows(max_sum)
        .into_iter()
        .map(|(sig, dim, doubled, p)| TableRow { r: sig.r, s: sig.s, dim, doubled, minimal: p.minimal, path: path_label(&p) })
        .collect();
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&rows).expect("rows serialize"))?,
        Format::Csv => {
            writeln!(out, "r,s,dim,doubled,minimal,path")?;
            for t in &rows {
                writeln!(out, "{},{},{},{},{},{}", t.r, t.s, t.dim, t.doubled, t.minimal, t.path)?;
            }
        }
        Format::Text => {
            writeln!(out, "{:<8} {:>5}  {:<7}  {:<7}  path", "(r,s)", "dim", "doubled", "minimal")?;
            for t in &rows {
                let sig = format!("({},{})", t.r, t.s);
                let yn = |b: bool| if b { "yes" } else { "no" };
                writeln!(out, "{sig:<8} {:>5}  {:<7}  {:<7}  {}", t.dim, yn(t.doubled), yn(t.minimal), t.path)?;
            }
        }
    }
    Ok(EXIT_OK)
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let sink: &mut dyn Write = if code == EXIT_OK { out } else { err };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let result = match &cli.command {
        Command::Build(args) => cmd_build(args, out, err),
        Command::Verify { file, format } => cmd_verify(file, *format, out, err),
        Command::Table { max_sum, format } => cmd_table(*max_sum, *format, out, err),
        Command::Explain(sig) => match signature(sig) {
            Ok(sig) => writeln!(out, "{}", serde_json::to_string_pretty(&plan(sig)).expect("plan serializes")).map(|_| EXIT_OK),
            Err(e) => writeln!(err, "error: {e}").map(|_| EXIT_USAGE),
        },
    };
    result.unwrap_or_else(|e| {
        let _ = writeln!(err, "error: {e}");
        EXIT_USAGE
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("htype").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn build_text_for_one_generator() {
        let (code, out, _) = run_args(&["build", "--r", "0", "--s", "1", "--format", "text"]);
        assert_eq!(code, 0);
        assert_eq!(out, "[v_1,v_2]=z_1\n");
    }

    #[test]
    fn empty_and_oversized_signatures() {
        assert_eq!(run_args(&["build", "--r", "0", "--s", "0"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["build", "--r", "9", "--s", "8"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["build", "--r", "1"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["build", "--r", "1", "--s", "0", "--format", "xml"]).0, EXIT_USAGE);
    }

    #[test]
    fn build_reports_minimality() {
        let (code, _, err) = run_args(&["build", "--r", "4", "--s", "4", "--format", "csv"]);
        assert_eq!(code, 0);
        assert!(err.contains("dim V = 16") && err.contains("minimal: true"), "{err}");
    }

    #[test]
    fn table_rows_match_known_entries() {
        let (code, out, _) = run_args(&["table", "--max-sum", "9", "--format", "csv"]);
        assert_eq!(code, 0);
        assert!(out.contains("\n0,1,2,true,true,base(0,1)\n"));
        assert!(out.contains("\n6,0,8,false,true,base(6,0)\n"));
        assert!(out.contains("\n9,0,32,false,true,base(1,0) -> extend_r8\n"), "{out}");
    }

    #[test]
    fn explain_prints_steps() {
        let (code, out, _) = run_args(&["explain", "--r", "6", "--s", "3"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["minimal"], true);
        assert_eq!(v["dimension"], 64);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("build"));
    }
}
