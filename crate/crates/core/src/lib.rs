//! Khovanov homology and Jones superpolynomials of link diagrams, computed
//! exactly from the cube of resolutions.

pub mod complex;
pub mod diagram;
pub mod gradedalg;
pub mod homology;
pub mod hypercube;

pub use complex::{ChainComplex, Reduction};
pub use diagram::{parse_braid_word, parse_pd_code, CrossingSign, EdgeLabel, KnotDiagram};
pub use gradedalg::{Field, IntMatrix, LaurentPoly1, LaurentPoly2};
pub use homology::{HomologyTable, Superpolynomial};
pub use hypercube::Hypercube;
