//! Hiding, the axiom hierarchy, stable families and limits.

mod hiding;
mod limits;
mod stable;

pub use hiding::{
    check_ax, factor_partial_map, forget_equiv, hide, restrict_to_ax, with_identity_equiv,
    AxReport, PartialFactorisation,
};
pub use limits::{
    product_ef, pseudo_pullback_edc, pseudo_pullback_ef, pullback_edc, pullback_ef, stable_pairs,
    EdcSpan, PairEvent, PairFamily,
};
pub use stable::{
    is_stable_ef, is_unambiguous, pr, prime_configuration, stable_part, unamb, PrResult,
    StabilityReport, StabilityWitness,
};
