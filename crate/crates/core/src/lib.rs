//! Canonical heights, v-adic distances and certified lower bounds for
//! elliptic curves over abelian number fields.

#![allow(clippy::needless_range_loop)]

pub mod arith;
pub mod canonical;
pub mod certifier;
pub mod cli;
pub mod corpus;
pub mod ellcurve;
pub mod heights;
pub mod interval;
pub mod numfield;
pub mod par;
pub mod parse;
