//! Heegaard Floer homology of positive integer surgeries on knots via the
//! dual-knot mapping cone, knot Floer homology of the dual knot, the
//! top-grading injectivity criterion, and contact surgery combinatorics
//! producing tightness certificates for negative rational surgeries.
//!
//! Everything is computed over GF(2) with exact rational gradings. Knot
//! complexes are supplied as finite data in a line-oriented schema (see
//! [`knot`]); surgery cones, flavored homologies, and dual-knot invariants
//! live in [`cone`]; contact surgery planning and certificates in
//! [`contact`]; bundled model complexes in [`data`].

pub mod bifilt;
pub mod cli;
pub mod cone;
pub mod contact;
pub mod data;
pub mod gf2;
pub mod knot;
pub mod rat;
pub mod report;

pub use bifilt::{BifiltComplex, BifiltGen};
pub use cone::{
    build_cone, check_top_injectivity, hf_hat_surgery, hfk_dual, top_alexander, ConeParams, Flavor,
    MappingCone,
};
pub use contact::{
    certify_tight, dgs_negative, dgs_positive, loss_alexander, neg_cf, pushoff_after_surgery,
    smooth_roundtrip, spinc_label, stabilize, LegendrianData, SurgeryPlan, TightnessCertificate,
};
pub use knot::{parse_knot_complex, KnotComplex, ValidationReport};
pub use rat::Rat;
pub use report::GradedDims;
