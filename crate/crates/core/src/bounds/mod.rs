//! Lower bounds for the fundamental eigenvalue, each returned as a
//! certificate recording the hypotheses it checked.

mod annulus;
mod best;
mod boggio;
mod box_bound;
mod certificate;
mod convex;
mod field;
mod hardy;
mod monotonicity;
mod radial;

pub use annulus::annulus_bound;
pub use best::{best_bound, sort_certificates, BoundConfig};
pub use boggio::{boggio_bound, directional_boggio_bound, optimize_scale};
pub use box_bound::{best_box_bound, box_bound, AXES};
pub use certificate::{Admissibility, BoundCertificate, Hypothesis, Method};
pub use convex::{convex_bound, sphere_measure};
pub use field::{field_eval, node_terms, standard_form_q, LatticeField, NodeTerms, Profile, VectorFieldSpec};
pub use hardy::{hardy_bound, hardy_constant, m_function};
pub use monotonicity::monotonicity_bound;
pub use radial::{mixed_bound, radial_constant, radial_field, radial_hardy_bound};
