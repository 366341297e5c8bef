//! Exact one-dimensional and Grothendieck residues, plus a floating-point
//! contour oracle for cross-checks.

pub mod grothendieck;
pub mod numeric;
pub mod oned;
pub mod roots;

pub use grothendieck::{grothendieck_residue, grothendieck_residue_rf, n_cap, GrothendieckData, DEFAULT_N_CAP};
pub use numeric::{contour_grothendieck, contour_residue_1d, ContourParams, NumericResidue};
pub use oned::{residue_at_point_1d, residue_total_1d, OneForm1D};
pub use roots::{gaussian_roots, RootSplit};
