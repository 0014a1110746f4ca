//! Simulator and analysis library for an all-continuous quantum key
//! distribution protocol: Gaussian-distributed key values are encoded into
//! one of two conjugate quadratures of squeezed states, an eavesdropper is
//! detected through the noise she must add, and the sifted continuous data
//! is distilled into a shared discrete secret key.
//!
//! Module map:
//! * [`rng`], [`gaussian`] — deterministic sampling and Shannon primitives.
//! * [`protocol`] — parameter derivation, encoding, measurement, sifting,
//!   disturbance estimation.
//! * [`attacks`] — intercept-and-resend and the asymmetric Gaussian cloner.
//! * [`infotheory`] — closed-form rates, photon budgets, security
//!   thresholds.
//! * [`estimation`] — Monte Carlo cross-checks of the closed forms.
//! * [`keypipeline`] — quantization, reconciliation, privacy amplification
//!   and the end-to-end run.

pub mod attacks;
pub mod error;
pub mod estimation;
pub mod gaussian;
pub mod infotheory;
pub mod keypipeline;
pub mod protocol;
pub mod rng;

pub use error::{Error, Result};
pub use gaussian::Bits;
pub use protocol::{Basis, ProtocolParams};
