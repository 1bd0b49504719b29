use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use rise_core::codegen::c_eval::Grid;
use rise_core::codegen::Target;
use rise_core::driver::{self, Config, Diagnostic, InputForm, Stage};
use rise_core::interp::{parse_values, NatEnv};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DiagFormat {
    Text,
    JsonLines,
}

/// Compiles RISE programs to C, OpenMP or OpenCL.
#[derive(Parser, Debug)]
#[command(name = "risec", version)]
struct Args {
    /// Source file: RISE text, or DPIA text together with `--from`.
    input: Option<PathBuf>,
    /// Rewrite strategy applied before translation.
    #[arg(long)]
    strategy: Option<PathBuf>,
    #[arg(long, default_value = "opencl", value_parser = parse_target)]
    target: Target,
    /// Last stage to run: rise, rise-typed, rise-lowered, dpia-fun, dpia-imp or code.
    #[arg(long, default_value = "code", value_parser = parse_stage)]
    emit: Stage,
    /// Form of the input file: rise, dpia-fun or dpia-imp.
    #[arg(long, default_value = "rise", value_parser = parse_from)]
    from: InputForm,
    /// Write the artifact here and the report next to it as `<path>.report`.
    #[arg(short = 'o')]
    output: Option<PathBuf>,
    /// Name of the generated unit; the kernel is called `<name>Kernel`.
    #[arg(long)]
    name: Option<String>,
    /// Evaluate the artifact of the emitted stage.
    #[arg(long)]
    run: bool,
    /// File of input values, one per program parameter.
    #[arg(long, requires = "run")]
    inputs: Option<PathBuf>,
    /// Nat parameter values such as `n=4,m=8,s=2`.
    #[arg(long, value_parser = parse_nats, default_value = "")]
    nat: NatEnv,
    /// Work-group count and size for running code, as `G,L`.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<Grid>,
    /// Print every rule application to stderr.
    #[arg(long)]
    trace: bool,
    /// Print the accT/conT translation steps to stderr.
    #[arg(long)]
    trace_translation: bool,
    /// Print the rule catalogue and exit.
    #[arg(long)]
    list_rules: bool,
    #[arg(long, value_enum, default_value = "text")]
    diag_format: DiagFormat,
}

fn parse_target(s: &str) -> Result<Target, String> {
    s.parse()
}

fn parse_stage(s: &str) -> Result<Stage, String> {
    s.parse()
}

fn parse_from(s: &str) -> Result<InputForm, String> {
    s.parse()
}

fn parse_nats(s: &str) -> Result<NatEnv, String> {
    let mut env = NatEnv::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| format!("expected name=value, found `{part}`"))?;
        let v: i64 = v
            .trim()
            .parse()
            .map_err(|_| format!("`{v}` is not an integer"))?;
        env.insert(k.trim().to_string(), v);
    }
    Ok(env)
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let (g, l) = s.split_once(',').ok_or("expected G,L")?;
    let num = |x: &str| {
        x.trim()
            .parse::<usize>()
            .ok()
            .filter(|v| *v > 0)
            .ok_or(format!("bad grid size `{x}`"))
    };
    Ok(Grid {
        groups: num(g)?,
        local: num(l)?,
    })
}

fn print_diag(d: &Diagnostic, format: DiagFormat) {
    match format {
        DiagFormat::Text => eprintln!("{d}"),
        DiagFormat::JsonLines => {
            let obj = serde_json::json!({
                "stage": d.stage,
                "severity": d.severity,
                "file": d.file,
                "line": d.line,
                "column": d.column,
                "code": d.code,
                "message": d.message,
            });
            eprintln!("{obj}");
        }
    }
}

fn io_diag(file: &str, e: std::io::Error) -> Diagnostic {
    Diagnostic {
        stage: "driver",
        severity: "error",
        file: file.to_string(),
        line: 0,
        column: 0,
        code: "Io".into(),
        message: e.to_string(),
    }
}

fn read(path: &std::path::Path) -> Result<String, Diagnostic> {
    std::fs::read_to_string(path).map_err(|e| io_diag(&path.display().to_string(), e))
}

fn write(path: &std::path::Path, text: &str) -> Result<(), Diagnostic> {
    std::fs::write(path, text).map_err(|e| io_diag(&path.display().to_string(), e))
}

fn usage(message: String) -> Diagnostic {
    Diagnostic {
        stage: "driver",
        severity: "error",
        file: "<args>".into(),
        line: 0,
        column: 0,
        code: "Usage".into(),
        message,
    }
}

fn execute(args: &Args) -> Result<(), Diagnostic> {
    if args.list_rules {
        for line in rise_core::rules::describe() {
            println!("{line}");
        }
        return Ok(());
    }
    let input = args
        .input
        .as_ref()
        .ok_or_else(|| usage("no input file given".into()))?;
    let src = read(input)?;
    let mut cfg = Config::new(input.display().to_string());
    cfg.target = args.target;
    cfg.emit = args.emit;
    cfg.from = args.from;
    cfg.name = args.name.clone();
    cfg.trace_translation = args.trace_translation;
    if let Some(s) = &args.strategy {
        cfg.strategy = Some((s.display().to_string(), read(s)?));
    }
    let out = driver::compile(&src, &cfg)?;
    if args.trace {
        for t in &out.rewrite_trace {
            eprintln!("rewrite {t}");
        }
    }
    if args.trace_translation {
        for t in &out.translation_trace {
            eprintln!("{t}");
        }
    }
    match &args.output {
        Some(path) => {
            write(path, &out.text)?;
            let mut report = path.clone().into_os_string();
            report.push(".report");
            write(std::path::Path::new(&report), &out.report())?;
        }
        None if !args.run => print!("{}", with_newline(&out.text)),
        None => {}
    }
    if args.run {
        let inputs = match &args.inputs {
            Some(p) => {
                parse_values(&read(p)?).map_err(|m| usage(format!("{}: {m}", p.display())))?
            }
            None => Vec::new(),
        };
        let v = driver::run(&out, &args.nat, &inputs, args.grid)?;
        println!("{v}");
    }
    Ok(())
}

fn with_newline(s: &str) -> String {
    if s.ends_with('\n') {
        s.to_string()
    } else {
        format!("{s}\n")
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(d) => {
            print_diag(&d, args.diag_format);
            ExitCode::FAILURE
        }
    }
}
