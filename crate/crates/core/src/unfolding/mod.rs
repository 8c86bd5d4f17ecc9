//! Causal unfolding of equivalence families and the collapse adjunction.

mod axioms;
mod collapse;
pub(crate) mod er;

pub use axioms::{check_structural_axioms, Axiom, StructuralAxioms};
pub use collapse::{
    causal_unfolding, col, col_unit, collapse_counit, factor_through_unit, is_general_iso, Collapse,
};
pub use er::{
    counit_check, er, factor_through_counit, is_ese_iso, prime_names, rebuild_iso, unit_iso_ese,
    UnfoldResult, UnitIso,
};
