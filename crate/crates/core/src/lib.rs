//! Polar spaces, Veldkamp quadrangles and their flat quotients over small
//! finite fields.

pub mod algebra;
pub mod correspondence;
pub mod d3;
pub mod error;
pub mod field;
pub mod moufang;
pub mod polar;
pub mod presets;
pub mod propositions;
pub mod quotient;
pub mod spaces;
pub mod union_find;
pub mod veldkamp;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/spaces.md")]
    mod spaces {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/correspondence.md")]
    mod correspondence {}
    #[doc = include_str!("../../../book/src/quotients.md")]
    mod quotients {}
    #[doc = include_str!("../../../book/src/root-groups.md")]
    mod root_groups {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
