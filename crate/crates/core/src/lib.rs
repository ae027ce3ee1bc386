//! Holomorphically invariant distances and metrics on model domains.

pub mod bounds;
pub mod closed_forms;
pub mod domains;
pub mod error;
pub mod extremal;
pub mod geodesics;
pub mod optim;
pub mod point;

pub use domains::{DomainGeometry, DomainKind, Window};
pub use error::{Error, Result};
pub use point::{Point, Tangent, C64};
