//! Surjectivity of cubic rational maps of the projective plane.
//!
//! A plane `Π` of cubics inside a linear system `Λ` defines a rational map
//! `f: P^2 --> P^2`. The map fails to be surjective exactly when some pencil
//! `ℓ ⊂ Π` is *unruly*: its geometric base locus equals that of `Π`. Over a
//! finite field this is decided by scanning base points level by level over
//! the extensions GF(p^d).
//!
//! Module map:
//! - [`finitefield`]: GF(p^k) arithmetic and points of P^2.
//! - [`forms`], [`rational`]: cubic forms and exact symbolic polynomials.
//! - [`linsys`]: linear systems of cubics, planes, pencils and base loci.
//! - [`surjectivity`]: the unruly-pencil criterion and a forward-image oracle.
//! - [`dataset`]: enumeration of `(v, u, t)` triples and the `output.txt` format.
//! - [`certify`]: exact verification of the two explicit surjective maps.

pub mod certify;
pub mod dataset;
pub mod finitefield;
pub mod forms;
pub mod linalg;
pub mod linsys;
pub(crate) mod poly;
pub mod rational;
pub mod roots;
mod scan;
pub mod surjectivity;

pub use finitefield::{build_field, enumerate_p2, minimal_degree, FieldDesc, FieldError, ProjPoint, Scalar};
pub use forms::{combine, common_factor_all, eval_form, has_common_factor, IntegerCubic, TernaryForm};
pub use linsys::{BaseLocus, Case, CubicSystem, Plane, PointConfig};
pub use surjectivity::{label_plane, test_pencil, SurjectivityLabel, UnrulyVerdict};
