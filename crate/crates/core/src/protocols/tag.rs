//! View tags and the tag-width security policy.

use std::fmt;
use std::str::FromStr;

use ark_ec::AffineRepr;
use serde::{Deserialize, Serialize};

use crate::curve::{field_elements_be, CurveSuite};
use crate::error::{Error, Result};
use crate::keys::ProtocolId;

use super::{SharedSecret, SharedValue};

pub const MAX_TAG_BITS: u8 = 64;

/// Security level of the shared-secret hash before any tag is disclosed.
pub const BASE_SECURITY_BITS: u32 = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TagVariant {
    /// Bits of the shared point's x-coordinate.
    XCoord,
    /// Bits of `keccak256(serialize(shared))`.
    Hash,
}

impl fmt::Display for TagVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TagVariant::XCoord => "xcoord",
            TagVariant::Hash => "hash",
        })
    }
}

impl FromStr for TagVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "xcoord" => Ok(TagVariant::XCoord),
            "hash" => Ok(TagVariant::Hash),
            _ => Err(Error::decode(format!("unknown tag variant {s:?}"))),
        }
    }
}

/// Tag variant plus width in bits (a multiple of 4, at most 64).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTagConfig")]
pub struct ViewTagConfig {
    variant: TagVariant,
    bits: u8,
}

#[derive(Deserialize)]
struct RawTagConfig {
    variant: TagVariant,
    bits: u32,
}

impl TryFrom<RawTagConfig> for ViewTagConfig {
    type Error = Error;

    fn try_from(raw: RawTagConfig) -> Result<Self> {
        ViewTagConfig::new(raw.variant, raw.bits)
    }
}

impl ViewTagConfig {
    pub fn new(variant: TagVariant, bits: u32) -> Result<Self> {
        check_width(bits)?;
        Ok(ViewTagConfig {
            variant,
            bits: bits as u8,
        })
    }

    pub fn hash(bits: u32) -> Result<Self> {
        Self::new(TagVariant::Hash, bits)
    }

    pub fn xcoord(bits: u32) -> Result<Self> {
        Self::new(TagVariant::XCoord, bits)
    }

    pub fn variant(&self) -> TagVariant {
        self.variant
    }

    pub fn bits(&self) -> u32 {
        self.bits as u32
    }
}

fn check_width(bits: u32) -> Result<()> {
    if bits % 4 != 0 || bits > MAX_TAG_BITS as u32 {
        Err(Error::InvalidTagWidth(bits))
    } else {
        Ok(())
    }
}

/// The leading `bits` bits of some byte string, right-aligned in `value`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ViewTag {
    bits: u8,
    value: u64,
}

impl ViewTag {
    pub fn new(bits: u32, value: u64) -> Result<Self> {
        check_width(bits)?;
        if bits < 64 && value >> bits != 0 {
            return Err(Error::decode(format!("tag value wider than {bits} bits")));
        }
        Ok(ViewTag {
            bits: bits as u8,
            value,
        })
    }

    /// Leading `bits` bits of `bytes`, which must hold at least `bits` bits.
    pub fn from_leading_bits(bytes: &[u8], bits: u32) -> Self {
        debug_assert!(bits % 4 == 0 && bits <= 64 && bytes.len() * 8 >= bits as usize);
        ViewTag {
            bits: bits as u8,
            value: leading_bits(bytes, bits),
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits as u32
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    /// Keeps the leading `bits` bits. Tags of both variants are prefixes of a
    /// fixed byte string, so truncation equals recomputation at the smaller
    /// width.
    pub fn truncate(&self, bits: u32) -> Result<Self> {
        check_width(bits)?;
        if bits > self.bits() {
            return Err(Error::InvalidTagWidth(bits));
        }
        let value = if bits == 0 {
            0
        } else {
            self.value >> (self.bits() - bits)
        };
        Ok(ViewTag {
            bits: bits as u8,
            value,
        })
    }

    /// Whether `bytes` carries this tag.
    #[inline]
    pub fn matches(&self, bytes: &[u8]) -> bool {
        leading_bits(bytes, self.bits()) == self.value
    }

    /// `0x` followed by exactly `bits / 4` hex digits.
    pub fn to_hex(&self) -> String {
        let nibbles = self.bits() as usize / 4;
        if nibbles == 0 {
            return "0x".to_string();
        }
        format!("0x{:0width$x}", self.value, width = nibbles)
    }

    pub fn from_hex(s: &str, bits: u32) -> Result<Self> {
        check_width(bits)?;
        let body = s
            .strip_prefix("0x")
            .ok_or_else(|| Error::decode(format!("tag {s:?} lacks 0x prefix")))?;
        if body.len() != bits as usize / 4 {
            return Err(Error::decode(format!(
                "tag {s:?} does not have {} hex digits",
                bits / 4
            )));
        }
        let value = if body.is_empty() {
            0
        } else {
            u64::from_str_radix(body, 16).map_err(|e| Error::decode(format!("tag {s:?}: {e}")))?
        };
        Self::new(bits, value)
    }
}

#[inline]
fn leading_bits(bytes: &[u8], bits: u32) -> u64 {
    if bits == 0 {
        return 0;
    }
    let mut word = [0u8; 8];
    let n = bytes.len().min(8);
    word[..n].copy_from_slice(&bytes[..n]);
    u64::from_be_bytes(word) >> (64 - bits)
}

/// Bytes a view tag is read from for `variant`.
///
/// `Hash` uses the Keccak-256 digest of the shared secret's canonical
/// encoding. `XCoord` uses the x-coordinate in little-endian byte order, so
/// the tag comes from the low-order bytes: the top bytes of a field element
/// are biased (a BN254 coordinate never exceeds `0x30..` in its leading byte).
pub(crate) fn tag_source<S: CurveSuite>(
    protocol: ProtocolId,
    shared: &SharedSecret<S>,
    variant: TagVariant,
) -> Result<TagBytes> {
    match variant {
        TagVariant::Hash => Ok(TagBytes::Digest(shared.digest())),
        TagVariant::XCoord => match shared.value() {
            SharedValue::G1(p) => Ok(TagBytes::Coordinate(x_le(p))),
            SharedValue::Secp(p) => Ok(TagBytes::Coordinate(x_le(p))),
            SharedValue::Gt(_) => Err(Error::UnsupportedVariant { protocol, variant }),
        },
    }
}

pub(crate) fn x_le<P: AffineRepr>(p: &P) -> Vec<u8> {
    match p.xy() {
        Some((x, _)) => {
            let mut b = field_elements_be(&x);
            b.reverse();
            b
        }
        None => vec![0u8; 8],
    }
}

/// Byte string a tag is read from.
#[derive(Clone, Debug)]
pub(crate) enum TagBytes {
    Digest(crate::curve::Digest32),
    Coordinate(Vec<u8>),
}

impl TagBytes {
    pub(crate) fn as_slice(&self) -> &[u8] {
        match self {
            TagBytes::Digest(d) => d.as_ref(),
            TagBytes::Coordinate(c) => c,
        }
    }
}

/// Computes the view tag of a shared secret.
///
/// SK has no point-valued shared secret, so only the hash variant exists for
/// it.
pub fn compute_view_tag<S: CurveSuite>(
    protocol: ProtocolId,
    shared: &SharedSecret<S>,
    cfg: ViewTagConfig,
) -> Result<ViewTag> {
    shared.check_protocol(protocol)?;
    let src = tag_source(protocol, shared, cfg.variant())?;
    Ok(ViewTag::from_leading_bits(src.as_slice(), cfg.bits()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TagPolicy {
    Ok,
    /// The tag leaks bits of the value the stealth key is derived from.
    Warning { effective_security_bits: u32 },
}

/// Security policy for a tag configuration. Never an error: callers may
/// proceed after a warning.
///
/// Hash tags are free for P1 and P3 because their stealth keys use the shared
/// point itself rather than its hash. Everywhere else each disclosed byte
/// costs 4 bits of the 128-bit base level.
pub fn tag_policy_check(protocol: ProtocolId, cfg: ViewTagConfig) -> TagPolicy {
    let free = matches!(protocol, ProtocolId::P1 | ProtocolId::P3) && cfg.variant() == TagVariant::Hash;
    if free || cfg.bits() == 0 {
        return TagPolicy::Ok;
    }
    let bytes = cfg.bits().div_ceil(8);
    TagPolicy::Warning {
        effective_security_bits: BASE_SECURITY_BITS - 4 * bytes,
    }
}
