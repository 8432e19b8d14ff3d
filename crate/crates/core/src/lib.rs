//! Exact-arithmetic toolkit around rank-2 Picard lattices of polarized K3
//! surfaces.
//!
//! Given a polarization degree `H² = 2rs` and a rank-2 lattice model `N ∋ H`
//! with `H·N = ℤ`, the crate decides the a-/b-series criteria for the moduli
//! space of sheaves with Mukai vector `(r, H, s)` to be isomorphic to the
//! surface itself, and emits a replayable certificate: the explicit chain of
//! universal moves (reflection, scaling, tensor twist, Tyurin target) at the
//! Mukai-vector level. An independent verifier replays certificates, and a
//! period checker re-executes the scaling isomorphism's lattice computation
//! in the rank-4 model `U ⊕ U`.
//!
//! All arithmetic is arbitrary-precision and exact; there is no floating
//! point anywhere in the crate.

pub mod certificate;
pub mod lattice;
pub mod mukai;
pub mod periods;
pub mod picard;
pub mod selfcheck;
pub mod series;

mod arith;
mod bigser;

pub use certificate::{
    build, decide_and_certify, decide_and_certify_filtered, verify, CertificateError, ChainStep,
    Diagnostic, IsomorphismCertificate, MoveName, MukaiTriple, VerificationReport,
};
pub use lattice::{
    find_marked_isometry, smith_normal_form, GramLattice, IntMat, IsotropicQuotient, LatVec,
    LatticeError, SmithForm,
};
pub use mukai::{MukaiError, MukaiVector, Sign};
pub use periods::{
    compute_period_data, embed_vector, period_sweep, periods_isomorphic, DivisorChecks,
    MukaiModel, PeriodData, PeriodError, PeriodSweepRecord,
};
pub use picard::{NVector, PicardError, PicardParams};
pub use series::{
    check_refined, equivalence_sweep, pell_solutions, refined_flags, solve_series, RefinedFlags,
    Series, SeriesError, SeriesSolution, SweepRange, SweepReport,
};
