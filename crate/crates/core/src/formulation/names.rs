//! Deterministic variable and constraint names.
//!
//! Operational quantities are named `<var>__rp001__k0001__<entity>`,
//! per-representative-period ones `<var>__rp001__<entity>`, checkpoint
//! quantities `<var>__p00024__<entity>` and investments `x__<entity>`.
//! Identifiers never contain `__`, so every name splits unambiguously.

use crate::system::{Compressor, Line, Pipeline};

pub fn slot(var: &str, rp: usize, k: usize, entity: &str) -> String {
    format!("{var}__rp{rp:03}__k{k:04}__{entity}")
}

pub fn per_rp(var: &str, rp: usize, entity: &str) -> String {
    format!("{var}__rp{rp:03}__{entity}")
}

pub fn period(var: &str, p: usize, entity: &str) -> String {
    format!("{var}__p{p:05}__{entity}")
}

/// Name of a constraint imposed once per entity.
pub fn global_at(family: &str, entity: &str) -> String {
    format!("{family}__{entity}")
}

pub fn invest(entity: &str) -> String {
    format!("x__{entity}")
}

pub fn pipeline(p: &Pipeline) -> String {
    format!("pl__{}__{}__{}", p.from_node, p.to_node, p.circuit)
}

pub fn compressor(c: &Compressor) -> String {
    format!("cp__{}__{}__{}", c.from_node, c.to_node, c.circuit)
}

pub fn line(l: &Line) -> String {
    format!("ln__{}__{}__{}", l.from_bus, l.to_bus, l.circuit)
}

/// Entity of a `(node, class)` demand pair.
pub fn demand(node: &str, class: &str) -> String {
    format!("{node}__{class}")
}

/// Entity of the `i`-th increment (1-based) of a pipeline.
pub fn increment(pipe: &str, i: usize) -> String {
    format!("{pipe}__inc{i:02}")
}
