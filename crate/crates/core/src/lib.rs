//! Planar convex-geometry laboratory for quantitative isoperimetric
//! functionals: deficit, Hausdorff deviation from the disk, Fraenkel
//! asymmetry and the shape functional `F = D / λ_H²`, together with the
//! interior-cone class, the rectangle family and a shape search.


pub mod cli;
pub mod cone;
pub mod error;
pub mod families;
pub mod functionals;
pub mod geometry;
pub mod json;
pub mod optimizer;


pub mod point;
pub mod search;
pub mod verification;


pub use error::{Error, Result};
pub use geometry::{ConvexPolygon, Disk, Tolerances};
pub use point::Point2;
