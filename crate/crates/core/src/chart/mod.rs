//! Structure functions, Möbius maps, the Bäcklund map `B2` with its
//! auto-Bäcklund certificate, and the functional-equation toolkit.

mod backlund;
mod domain;
mod functional;
mod linear;
mod moebius;
mod solution;
mod structure;

pub use backlund::{
    backlund_b2, backlund_b2_within, fde_residual, fde_terms, lemma1_residuals, schwarzian_form_residual, FdeTerms,
    Lemma1Residuals,
};
pub use domain::{admissible_subinterval, Interval, DOMAIN_SAMPLES};
pub use functional::{
    fe2_moebius, functional_residuals, g_from_w, periodic_extension_g, translation_residual, w_from_g,
};
pub use linear::{ratio_schwarzian_check, wronskian_g_prime, LinearPair, LINEAR_CHECK_POINTS, LINEAR_TOLERANCE};
pub use moebius::{moebius_apply, moebius_compose, MoebiusMap, MIN_DETERMINANT};
pub use solution::SolutionEvaluator;
pub use structure::{build_structure_f, PowerTerm, StructureF, StructureFunction, TransportedF};
