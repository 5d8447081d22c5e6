//! Exact homological algebra over the integers: chain complexes of free
//! abelian groups, multicomplexes with higher differentials, homological
//! resolutions, lifting through quasi-isomorphisms and derived tensor products.

pub mod complex;
pub mod derived;
pub mod format;
pub mod lifting;
pub mod linalg;
pub mod multicomplex;
pub mod random;
pub mod resolution;

mod error;

pub use error::{Error, Result};
pub use linalg::{FgAbGroup, GroupMorphism, IntMatrix};
