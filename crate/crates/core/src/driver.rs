//! The compilation pipeline behind the command-line tool.
//!
//! Source text flows through parsing, type inference, rewriting, the
//! functional and imperative DPIA forms and code emission. Every stage has
//! a printable form, and DPIA text can be fed back in with
//! [`InputForm::DpiaFun`] or [`InputForm::DpiaImp`].

use std::fmt;
use std::str::FromStr;

use crate::codegen::{self, c_eval::Grid, Target};
use crate::dpia::{check_phrase, check_phrase_in, DpiaError, Phrase};
use crate::elv::parse_strategy;
use crate::expr::{print_expr, Expr, PrintOptions, Span};
use crate::interp::{self, EvalOptions, NatEnv, Value};
use crate::lowering::{self, parse_dpia_file, print_dpia_file, LowerError, Unit};
use crate::nat::Assumptions;
use crate::parse::{parse_rise, ParseError};
use crate::primitives::Registry;
use crate::strategy::{apply, RewriteCtx, StrategyError, TraceEntry};
use crate::typecheck::{infer, TypeError, TypeErrorKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Rise,
    RiseTyped,
    RiseLowered,
    DpiaFun,
    DpiaImp,
    Code,
}

impl Stage {
    pub const ALL: [Stage; 6] = [
        Stage::Rise,
        Stage::RiseTyped,
        Stage::RiseLowered,
        Stage::DpiaFun,
        Stage::DpiaImp,
        Stage::Code,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Rise => "rise",
            Stage::RiseTyped => "rise-typed",
            Stage::RiseLowered => "rise-lowered",
            Stage::DpiaFun => "dpia-fun",
            Stage::DpiaImp => "dpia-imp",
            Stage::Code => "code",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Stage::ALL.iter().map(|s| s.name()).collect();
                format!("unknown stage `{s}` (expected one of {})", names.join(", "))
            })
    }
}

/// The printed form a compilation starts from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum InputForm {
    #[default]
    Rise,
    DpiaFun,
    DpiaImp,
}

impl FromStr for InputForm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rise" | "rise-typed" | "rise-lowered" => Ok(InputForm::Rise),
            "dpia-fun" => Ok(InputForm::DpiaFun),
            "dpia-imp" => Ok(InputForm::DpiaImp),
            other => Err(format!(
                "cannot start from `{other}` (expected rise, dpia-fun or dpia-imp)"
            )),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Config {
    /// Shown in diagnostics; its stem names the unit when nothing else does.
    pub file: String,
    /// Path and contents of the strategy.
    pub strategy: Option<(String, String)>,
    pub target: Target,
    pub emit: Stage,
    pub from: InputForm,
    pub name: Option<String>,
    pub trace_translation: bool,
}

impl Config {
    pub fn new(file: impl Into<String>) -> Config {
        Config {
            file: file.into(),
            strategy: None,
            target: Target::OpenCL,
            emit: Stage::Code,
            from: InputForm::Rise,
            name: None,
            trace_translation: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostic {
    pub stage: &'static str,
    pub severity: &'static str,
    pub file: String,
    pub line: u32,
    pub column: u32,
    pub code: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}: {}[{}] in {}: {}",
            self.file, self.line, self.column, self.severity, self.code, self.stage, self.message
        )
    }
}

impl std::error::Error for Diagnostic {}

fn diag(
    stage: &'static str,
    file: &str,
    span: Option<Span>,
    code: &str,
    message: String,
) -> Diagnostic {
    let span = span.unwrap_or(Span { line: 0, column: 0 });
    Diagnostic {
        stage,
        severity: "error",
        file: file.to_string(),
        line: span.line,
        column: span.column,
        code: code.to_string(),
        message,
    }
}

fn parse_diag(stage: &'static str, file: &str, e: ParseError) -> Diagnostic {
    diag(
        stage,
        file,
        Some(Span {
            line: e.line,
            column: e.column,
        }),
        "ParseError",
        e.message,
    )
}

fn type_code(k: &TypeErrorKind) -> &'static str {
    match k {
        TypeErrorKind::Mismatch { .. } => "TypeMismatch",
        TypeErrorKind::NatMismatch { .. } => "NatMismatch",
        TypeErrorKind::UnboundIdentifier(_) => "UnboundIdentifier",
        TypeErrorKind::UnknownPrimitive(_) => "UnknownPrimitive",
        TypeErrorKind::UnsolvedImplicit(_) => "UnsolvedImplicit",
        TypeErrorKind::StoringFunction(_) => "StoringFunction",
        TypeErrorKind::NotAFunction(_) => "NotAFunction",
        TypeErrorKind::MissingTypeArgument(_) => "MissingTypeArgument",
        TypeErrorKind::KindMismatch { .. } => "KindMismatch",
        TypeErrorKind::Inconsistent(_) => "Inconsistent",
    }
}

fn type_diag(stage: &'static str, file: &str, e: TypeError) -> Diagnostic {
    let message = match e.span {
        Some(_) => {
            let s = e.to_string();
            s.split_once(": ").map_or(s.clone(), |(_, m)| m.to_string())
        }
        None => e.to_string(),
    };
    diag(stage, file, e.span, type_code(&e.kind), message)
}

fn dpia_diag(file: &str, e: DpiaError) -> Diagnostic {
    diag("dpia-typecheck", file, e.span, e.code(), e.to_string())
}

fn lower_diag(stage: &'static str, file: &str, e: LowerError) -> Diagnostic {
    match e {
        LowerError::Dpia(d) => dpia_diag(file, d),
        e => diag(stage, file, e.span(), e.code(), e.to_string()),
    }
}

/// Everything one compilation produced.
#[derive(Clone, Debug)]
pub struct Output {
    pub name: String,
    /// The printed form of the requested stage.
    pub text: String,
    pub stage: Stage,
    pub typed: Option<Expr>,
    pub functional: Option<Phrase>,
    pub unit: Option<Unit>,
    pub rewrite_trace: Vec<TraceEntry>,
    pub translation_trace: Vec<String>,
    pub assumptions: Assumptions,
    pub target: Target,
    pub strategy_file: Option<String>,
}

impl Output {
    /// The sidecar report: rule applications, assumptions and, when
    /// requested, the translation trace.
    pub fn report(&self) -> String {
        let mut out = format!(
            "unit: {}\nstage: {}\ntarget: {}\n",
            self.name, self.stage, self.target
        );
        if let Some(s) = &self.strategy_file {
            out.push_str(&format!("strategy: {s}\n"));
        }
        out.push_str("rules:\n");
        for t in &self.rewrite_trace {
            out.push_str(&format!("  {t}\n"));
        }
        out.push_str("assumptions:\n");
        for (d, n) in self.assumptions.iter() {
            out.push_str(&format!("  ({n}) % ({d}) = 0\n"));
        }
        if !self.translation_trace.is_empty() {
            out.push_str("translation:\n");
            for t in &self.translation_trace {
                out.push_str(&format!("  {t}\n"));
            }
        }
        out
    }
}

fn file_stem(file: &str) -> String {
    std::path::Path::new(file)
        .file_stem()
        .and_then(|s| s.to_str())
        .map(|s| {
            s.chars()
                .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
                .collect()
        })
        .unwrap_or_else(|| "program".into())
}

/// Runs the pipeline up to `cfg.emit`.
pub fn compile(src: &str, cfg: &Config) -> Result<Output, Diagnostic> {
    let reg = Registry::standard();
    let file = cfg.file.as_str();
    let first = match cfg.from {
        InputForm::Rise => Stage::Rise,
        InputForm::DpiaFun => Stage::DpiaFun,
        InputForm::DpiaImp => Stage::DpiaImp,
    };
    if cfg.emit < first {
        return Err(diag(
            "driver",
            file,
            None,
            "StageOrder",
            format!("cannot emit {} from {} input", cfg.emit, first),
        ));
    }
    let mut out = Output {
        name: String::new(),
        text: String::new(),
        stage: cfg.emit,
        typed: None,
        functional: None,
        unit: None,
        rewrite_trace: Vec::new(),
        translation_trace: Vec::new(),
        assumptions: Assumptions::new(),
        target: cfg.target,
        strategy_file: cfg.strategy.as_ref().map(|(p, _)| p.clone()),
    };
    let mut functional = None;
    let mut unit = None;
    match cfg.from {
        InputForm::Rise => {
            let program = parse_rise(src, &reg).map_err(|e| parse_diag("parse", file, e))?;
            let base = program.name.clone().unwrap_or_else(|| file_stem(file));
            out.name = match (&cfg.name, &cfg.strategy) {
                (Some(n), _) => n.clone(),
                (None, Some(_)) => format!("{base}Opt"),
                (None, None) => base,
            };
            if cfg.emit == Stage::Rise {
                out.text = print_expr(&program.body, PrintOptions::default());
                return Ok(out);
            }
            let mut asm = Assumptions::new();
            let typed = infer(&program.body, &reg, &mut asm)
                .map_err(|e| type_diag("typecheck", file, e))?;
            let mut e = typed;
            if let Some((spath, ssrc)) = &cfg.strategy {
                let strategy =
                    parse_strategy(ssrc).map_err(|e| parse_diag("strategy", spath, e))?;
                let mut ctx = RewriteCtx::new(&reg);
                ctx.assumptions = asm.clone();
                e = apply(&strategy, &e, &mut ctx).map_err(|err| match err {
                    StrategyError::Type(t) => type_diag("rewrite", file, t),
                    StrategyError::FuelExhausted(..) => {
                        diag("rewrite", spath, None, "FuelExhausted", err.to_string())
                    }
                    StrategyError::Failure(_) => {
                        diag("rewrite", spath, None, "StrategyFailure", err.to_string())
                    }
                })?;
                asm = ctx.assumptions;
                out.rewrite_trace = ctx.trace;
            }
            out.assumptions = asm.clone();
            out.typed = Some(e.clone());
            if cfg.emit <= Stage::RiseLowered {
                let annotate = cfg.emit == Stage::RiseTyped;
                out.text = print_expr(
                    &e,
                    PrintOptions {
                        annotate_params: annotate,
                    },
                );
                return Ok(out);
            }
            functional = Some(
                lowering::rise_to_dpia(&e, &asm)
                    .map_err(|err| lower_diag("translate", file, err))?,
            );
        }
        InputForm::DpiaFun => {
            let (asm, p) = parse_dpia_file(src).map_err(|e| parse_diag("parse", file, e))?;
            out.name = cfg.name.clone().unwrap_or_else(|| file_stem(file));
            out.assumptions = asm.clone();
            functional = Some(check_phrase(&p, &asm).map_err(|e| dpia_diag(file, e))?);
        }
        InputForm::DpiaImp => {
            let (asm, p) = parse_dpia_file(src).map_err(|e| parse_diag("parse", file, e))?;
            out.name = cfg.name.clone().unwrap_or_else(|| file_stem(file));
            out.assumptions = asm.clone();
            let mut u = Unit::from_phrase(&out.name, &p, asm.clone())
                .map_err(|m| diag("parse", file, None, "NotAUnit", m))?;
            u.body = check_phrase_in(&u.body, &u.env(), &asm).map_err(|e| dpia_diag(file, e))?;
            unit = Some(u);
        }
    }
    if let Some(f) = functional {
        out.functional = Some(f.clone());
        if cfg.emit == Stage::DpiaFun {
            out.text = print_dpia_file(&out.assumptions, &f);
            return Ok(out);
        }
        let (u, trace) =
            lowering::translate_unit(&out.name, &f, &out.assumptions, cfg.trace_translation)
                .map_err(|e| lower_diag("translate", file, e))?;
        out.translation_trace = trace.unwrap_or_default();
        unit = Some(u);
    }
    let unit = unit.expect("every input form reaches a unit");
    out.unit = Some(unit.clone());
    if cfg.emit == Stage::DpiaImp {
        out.text = print_dpia_file(&out.assumptions, &unit.to_phrase());
        return Ok(out);
    }
    out.text = codegen::emit_text(&unit, cfg.target)
        .map_err(|e| diag("codegen", file, None, e.code(), e.to_string()))?;
    Ok(out)
}

/// Evaluates the artifact of the requested stage on concrete inputs:
/// RISE stages with the functional evaluator, DPIA stages with the store
/// evaluator in strict mode and code with the C-subset evaluator. A
/// functional DPIA artifact is translated before it runs.
pub fn run(
    out: &Output,
    nats: &NatEnv,
    inputs: &[Value],
    grid: Option<Grid>,
) -> Result<Value, Diagnostic> {
    let fail = |stage: &'static str, code: &str, m: String| diag(stage, "<run>", None, code, m);
    let eval_err = |e: interp::EvalError| fail("run", e.code(), e.to_string());
    match (out.stage, &out.typed, &out.unit) {
        (Stage::Rise, _, _) => Err(fail(
            "run",
            "NotTyped",
            "running needs at least the rise-typed stage".into(),
        )),
        (Stage::RiseTyped | Stage::RiseLowered, Some(e), _) => {
            let prog = interp::eval_rise(e, nats).map_err(eval_err)?;
            interp::apply_program(&prog, nats, inputs).map_err(eval_err)
        }
        (Stage::DpiaFun, _, None) if out.functional.is_some() => {
            let f = out.functional.as_ref().expect("checked");
            let (u, _) = lowering::translate_unit(&out.name, f, &out.assumptions, false)
                .map_err(|e| lower_diag("translate", "<run>", e))?;
            interp::eval_unit(&u, nats, inputs, EvalOptions { strict: true }).map_err(eval_err)
        }
        (Stage::DpiaFun | Stage::DpiaImp, _, Some(u)) => {
            interp::eval_unit(u, nats, inputs, EvalOptions { strict: true }).map_err(eval_err)
        }
        (Stage::Code, _, Some(u)) => {
            let grid = grid.unwrap_or_else(|| codegen::default_grid(&out.text));
            codegen::run_text(u, &out.text, nats, inputs, grid)
                .map_err(|m| fail("run", "CodeEvaluation", m))
        }
        _ => Err(fail(
            "run",
            "NothingToRun",
            format!("no runnable artifact for stage {}", out.stage),
        )),
    }
}
