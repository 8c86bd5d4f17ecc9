//! Realisations of a family of configurations: labelled partial orders whose
//! down-closed subsets image to configurations, their maps, extremality and
//! the prime extremals that become the events of an unfolding.

mod canonical;
mod extremal;
mod maps;
mod primes;
mod realisation;

pub use canonical::{canonical_code, canonical_form, canonical_order, CanonicalPosetCode};
pub use extremal::{
    coarsen_to_extremal, coarsen_with_map, is_extremal, is_extremal_by_definition, Coarsening,
};
pub use maps::{
    factor_realisation_map, is_realisation_map, swap_factorisation, Factorisation, RealisationMap,
    Swap,
};
pub use primes::{
    enumerate_prime_extremals, extremal_order, map_between_extremals, prime_set, ExtremalOrder,
    PrimeSet,
};
pub use realisation::{is_realisation, Realisation};
