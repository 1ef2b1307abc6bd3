//! Exact rational algebra for operads, cobar complexes, homotopy algebras
//! and stratification spectral sequences of moduli spaces of curves.

pub mod cobar;
pub mod filtration;
pub mod hoalg;
pub mod operads;
pub mod perm;
pub mod qlinalg;
pub mod strata;
pub mod treegraph;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/linear-algebra.md")]
    mod linear_algebra {}
    #[doc = include_str!("../../../book/src/trees-and-graphs.md")]
    mod trees_and_graphs {}
    #[doc = include_str!("../../../book/src/operads.md")]
    mod operads {}
    #[doc = include_str!("../../../book/src/cobar.md")]
    mod cobar {}
    #[doc = include_str!("../../../book/src/homotopy-algebras.md")]
    mod homotopy_algebras {}
    #[doc = include_str!("../../../book/src/stratification.md")]
    mod stratification {}
    #[doc = include_str!("../../../book/src/filtrations.md")]
    mod filtrations {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
