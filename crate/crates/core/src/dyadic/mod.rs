//! Dyadic grids on the circle, Carleson boxes and top halves, and
//! depth-truncated quadrature over them.

pub mod approx;
pub mod gauss;
pub mod interval;
pub mod mesh;
pub mod region;

pub use approx::{approximating_pair, ApproximatingPair};
pub use gauss::GaussRule;
pub use interval::{build_grid, cell_count, Arc, DyadicInterval, GridId, MAX_DEPTH};
pub use mesh::{box_max, box_sums, DiskMesh, MeshSet, Node, Panel, QuadOrder};
pub use region::{box_area, box_contains, top_area, top_contains, CarlesonBox, TopHalf};
