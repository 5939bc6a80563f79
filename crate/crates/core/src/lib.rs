//! Blaschke products on the Riemann sphere: evaluation, critical points,
//! fundamental domains, covering groups, pre-images and domain coloring.

pub mod cli;
pub mod complex_plane;
pub mod config;
pub mod continuation;
pub mod covering;
pub mod critical;
pub mod curve;
pub mod domains;
pub mod error;
pub mod infinite;
pub mod poly;
pub mod preimage;
pub mod product;
pub mod render;
pub mod verify;

pub use complex_plane::{Complex, ExtComplex, Mobius, INF};
pub use error::{Error, Result};
pub use product::{BlaschkeProduct, FamilySpec, Zero, ZeroSequence};
