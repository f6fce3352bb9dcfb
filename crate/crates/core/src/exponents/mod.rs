//! Exact exponent algebra for the Strichartz-type estimates: triples
//! (b, c, σ), their regularity, Strichartz and decay numbers, and the
//! named catalog with its relations.

mod catalog;
mod triple;

pub use catalog::{
    choose_nu, h_triple, k_triple, range_p1, range_p2, standard_grid, verify_relations, w_triple, x_triple,
    ExponentCatalog, Op, Relation, RelationReport, MAX_DENOMINATOR,
};
pub use triple::{fmt_rational, int, parse_rational, rat, to_f64, ExpTriple, Indices, Rational, Transform};
