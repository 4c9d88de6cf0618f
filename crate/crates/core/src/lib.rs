//! Stealth addresses over pairing-friendly curves.
//!
//! Five protocols share one key/announcement/scan pipeline:
//!
//! * `p1`, `p2`, `p3`: dual-key pairing protocols. The spending key lives in
//!   G2 (P1, P2) or on secp256k1 (P3), the viewing key in G1.
//! * `sk`: single-key pairing protocol.
//! * `dksap`: the classic dual-key protocol on secp256k1, as a baseline.
//!
//! Everything is generic over a [`CurveSuite`]; [`Bn254`] is the default.

pub mod bench;
pub mod curve;
mod error;
pub mod keys;
pub mod protocols;
pub mod registry;
pub mod scanner;

pub use curve::{compiled_curves, dispatch, Bls12_381, Bn254, CurveId, CurveSuite, SuiteVisitor};
#[cfg(feature = "bls12-377")]
pub use curve::Bls12_377;
#[cfg(feature = "bw6-761")]
pub use curve::Bw6_761;
pub use error::{Error, Result};
pub use keys::{gen_keys, KeyFile, MetaAddress, ProtocolId, RecipientKeys, SpendingKey, ViewingKey};
pub use protocols::{
    priv_to_pub, recipient_derive_priv, send, sender_derive, tag_policy_check, viewer_derive_pub,
    Announcement, AnnouncementRecord, EphemeralKey, SenderOutput, StealthAddress, StealthPrivKey,
    StealthPubKey, TagPolicy, TagVariant, ViewTag, ViewTagConfig,
};
pub use registry::Registry;
pub use scanner::{ScanContext, ScanMode, ScanReport, ScanResult};

pub type Bn254MetaAddress = MetaAddress<Bn254>;
pub type Bn254Keys = RecipientKeys<Bn254>;
pub type Bn254Announcement = Announcement<Bn254>;
