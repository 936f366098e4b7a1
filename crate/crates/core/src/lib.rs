//! Joint long-term power control and distributed beamforming for the uplink of
//! user-centric cell-free massive MIMO networks.
//!
//! The crate is organized bottom-up:
//!
//! - [`scenario`]: geometry, large-scale gains with correlated shadowing, and
//!   user-centric clusters.
//! - [`channel`]: the Monte Carlo channel ensemble and per-AP local CSI views.
//! - [`uatf`]: use-and-then-forget (UatF) statistics, SINR, rate and MSE.
//! - [`teammse`]: team-MMSE distributed beamformers and the matched-filter
//!   baseline.
//! - [`powerctl`]: standard interference mappings, the normalized fixed-point
//!   iteration and the two joint max-min algorithms.
//! - [`oracle`]: exact brute-force references on finite probability spaces.
//! - [`runner`]: end-to-end runs, weight sweeps and artifact files.
//!
//! # Conventions
//!
//! All channel gains are normalized by the receiver noise power, so every
//! SINR expression uses unit noise and powers are in milliwatts.
//!
//! The inner product `h^H v` always means the conjugate transpose of the
//! *channel* times the *beamformer*. Channel realizations are stored as
//! `NL x K` matrices whose column `k` stacks the per-AP blocks `h_{l,k}`
//! (rows `l*N .. (l+1)*N`). In nalgebra terms, `h.dotc(&v)` and
//! `h.ad_mul(&v)` compute `h^H v`.

pub mod channel;
pub mod error;
pub mod oracle;
pub mod powerctl;
pub mod runner;
pub mod scenario;
pub mod teammse;
pub mod uatf;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = nalgebra::Complex<f64>;
/// Dynamically sized complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dynamically sized complex column vector.
pub type CVector = nalgebra::DVector<C64>;

/// Converts a power in dBm (or any dB quantity) to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power to dB(m).
pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

/// Splits a sample index range into fixed-size chunks; reductions sum the
/// chunk partials in index order so results do not depend on thread count.
pub(crate) const REDUCTION_CHUNK: usize = 16;
