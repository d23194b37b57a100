//! Convex hulls, distances, random frames and simplex shape classes.

mod distance;
mod dump;
mod frame;
mod hull;
pub(crate) mod linalg;
mod shape;

pub use distance::{distance_to_hull, hausdorff_nested};
pub use dump::{parse_hull_dump, write_hull_dump};
pub use frame::{project, random_orthonormal_frame, Frame};
pub use hull::{convex_hull, convex_hull_of, hull_surface_area, hull_volume, Facet, Hull, MAX_DIM};
pub use linalg::simplex_measure;
pub use shape::{shape_class_member, ShapeClass, MAX_MATCHED_VERTICES};
