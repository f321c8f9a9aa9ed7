//! Cone functions on finite spaces and maps that preserve norms of means.

pub mod gallery;
pub mod limits;
pub mod peak;
pub mod preserve;
pub mod reconstruct;
pub mod space;

pub use gallery::{build as gallery, verify as verify_gallery, GalleryId, GalleryInstance, GalleryOptions};
pub use limits::{am_limit_sequence, gm_limit_sequence, hm_limit_sequence, LimitSequence};
pub use peak::{check_peak_richness, pk, pkat, psupp, supp, Psupp, RichnessMode, RichnessReport};
pub use preserve::{
    check_mean_preservation, check_mean_preservation_with, power_reduce, reduced_kind, PreservationOptions,
    PreservationReport, Violation,
};
pub use reconstruct::{check_homeomorphism_case, reconstruct, HomeomorphismReport, ReconstructionResult};
pub use space::{ConeFunction, EqualityTolerance, FiniteSpace, FunctionFamily, InstanceJson, PreserverMap};
