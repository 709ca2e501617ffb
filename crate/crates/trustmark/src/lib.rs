//! Anonymous trust-marking toolkit.
//!
//! Token admitters anonymously mark blockchain addresses as trustworthy or
//! untrustworthy by signing structured messages with accountable ring
//! signatures; token submitters validate and embed the signed tokens into
//! transactions; anyone can verify them; and only the auditor a token
//! designates can identify its admitter, with a publicly checkable proof.
//! Issued tokens can later be revoked by their (still anonymous) admitter via
//! a commitment link.
//!
//! The crate covers the full lifecycle at desk scale: group arithmetic and
//! commitments, parameter generation, the signature scheme, the token
//! protocol, per-chain embedding codecs with fee estimation, and a simulated
//! ledger plus storage for end-to-end runs.

pub mod ars;
pub mod bench;
pub mod embed;
pub mod crs;
pub mod error;
pub mod group;
pub mod pedersen;
pub mod scenario;
pub mod sim;
pub mod token;

pub use error::Error;
