//! Tsallis-entropy coherence, discord, and correlation measures for
//! finite-dimensional quantum states.
//!
//! The crate is organized around a small set of validated state types
//! ([`DensityMatrix`], [`PureState`], [`Channel`]) and the measures built on
//! top of them:
//!
//! * [`tsallis`] — Tsallis entropy and relative entropy with explicit
//!   support handling,
//! * [`coherence`] — five basis-dependent coherence measures (two closed
//!   forms, three convex-roof extensions),
//! * [`measures`] — discord and correlation measures on bipartite states,
//!   their pure-state closed forms, and lower/upper bounds,
//! * [`roof`] and [`basis`] — the derivative-free optimizers behind the
//!   convex-roof and local-basis minimizations, including a brute-force
//!   grid oracle for two-qubit cross-checks,
//! * [`random`] — seeded generators for states, unitaries, and channels.
//!
//! All operations are pure functions of their inputs (plus explicit seeds),
//! so everything here is safe to call from multiple threads.

pub mod basis;
pub mod channel;
pub mod coherence;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod optim;
pub mod random;
pub mod roof;
pub mod state;
pub mod tsallis;

pub use basis::{grid_oracle_one_sided, grid_oracle_two_qubit, minimize_over_bases, minimize_over_bases_warm};
pub use basis::{BasisOptConfig, BasisOptResult, BasisSet, LocalBases};
pub use channel::{Channel, ChannelOutcome};
pub use coherence::{closest_incoherent, coherence_i, coherence_ii, coherence_pure, coherence_roof};
pub use coherence::PureCoherenceVariant;
pub use error::{QError, Result};
pub use linalg::{matrix_power, CMat, CVec};
pub use measures::{correlation, correlation_objective, discord, discord_objective, lower_bound, lower_bound_from_spectral, n_d, n_q_direct, n_q_lemma2, n_q_lemma2_from_spectral, pure_closed_form, upper_bound};
pub use measures::{CorrelationVariant, DiscordVariant, MeasureConfig, MeasureEvaluation, PureFormVariant};
pub use random::{derive_seed, haar_unitary, random_cptp, random_density, random_incoherent_channel, random_pure};
pub use roof::{ensemble_from_isometry, minimize_roof, Ensemble, RoofConfig, RoofResult};
pub use state::{conditional_operator, eigh, schmidt_decompose};
pub use state::{DensityMatrix, PureState, SchmidtDecomposition, SpectralDecomposition};
pub use tsallis::{tsallis_entropy, tsallis_relative_entropy, ExtendedReal, TsallisQ};
