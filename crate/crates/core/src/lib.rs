//! A two-level compiler for a functional data-parallel array language.
//!
//! Programs written in RISE are type checked, optimized by rewrite
//! strategies, translated to DPIA, turned imperative by the acceptor and
//! continuation translations and printed as C, OpenMP or OpenCL text.
//! The [`interp`] module evaluates every intermediate form and serves as
//! the semantic reference for the test suite.

pub mod codegen;
pub mod dpia;
pub mod driver;
pub mod elv;
pub mod expr;
pub mod interp;
pub mod lowering;
pub mod nat;
pub mod parse;
pub mod primitives;
pub mod rules;
pub mod strategy;
pub mod typecheck;
pub mod types;

pub use expr::{alpha_eq, Expr, ExprKind, Ident, Literal};
pub use nat::{nat_equal, Assumptions, Nat};
pub use parse::{parse_expr, parse_rise, ParseError, Program};
pub use primitives::{PrimitiveSignature, Registry};
pub use typecheck::{check_annotated, infer, infer_in, TypeEnv, TypeError, TypeErrorKind};
pub use types::{AddressSpace, DataType, Kind, ScalarType, Type, TypeArg};
