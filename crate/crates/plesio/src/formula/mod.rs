//! The trigonometric expression language: syntax trees, parsing, exact
//! differentiation, the surface catalog and the block composer.

mod ast;
mod blocks;
mod catalog;
mod field;
mod parse;

pub use ast::{Axis, EvalError, Expr};
pub use blocks::{block, blocks, compose_blocks, superblock, Block, SuperblockArity};
pub use catalog::{catalog, catalog_lookup, CatalogEntry, CatalogError};
pub use field::PeriodicField;
pub use parse::{parse, ParseError};
