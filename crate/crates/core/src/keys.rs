//! Recipient key material and stealth meta-addresses.
//!
//! | protocol | spending key `k` | viewing key       | meta-address `M`        |
//! |----------|------------------|-------------------|-------------------------|
//! | P1, P2   | Fr               | `v` in Fr         | `K = k*g2`, `V = v*g1`  |
//! | P3       | secp scalar      | `v` in Fr         | `K = k*g_e`, `V = v*g1` |
//! | SK       | Fr               | `V = k*g2`        | `K = k*g1`              |
//! | DKSAP    | secp scalar      | `v` secp scalar   | `K = k*g_e`, `V = v*g_e`|

use std::fmt;
use std::str::FromStr;

use ark_ec::{AffineRepr, CurveGroup};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::curve::{
    self, field_from_be_bytes, field_to_be_bytes, from_hex, g1, g1_from_bytes, g1_to_bytes, g2,
    g2_from_bytes, g2_to_bytes, secp_from_bytes, secp_generator, secp_to_bytes, to_hex, CurveId,
    CurveSuite, Fr, G1Affine, G2Affine, SecpAffine, SecpScalar,
};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolId {
    P1,
    P2,
    P3,
    Sk,
    Dksap,
}

impl ProtocolId {
    pub const ALL: [ProtocolId; 5] = [
        ProtocolId::P1,
        ProtocolId::P2,
        ProtocolId::P3,
        ProtocolId::Sk,
        ProtocolId::Dksap,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProtocolId::P1 => "p1",
            ProtocolId::P2 => "p2",
            ProtocolId::P3 => "p3",
            ProtocolId::Sk => "sk",
            ProtocolId::Dksap => "dksap",
        }
    }

    /// Whether the meta-address carries a separate viewing public key.
    pub fn is_dual_key(self) -> bool {
        self != ProtocolId::Sk
    }

    pub(crate) fn expect(self, found: ProtocolId) -> Result<()> {
        if self == found {
            Ok(())
        } else {
            Err(Error::ProtocolMismatch {
                expected: self,
                found,
            })
        }
    }
}

impl fmt::Display for ProtocolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProtocolId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProtocolId::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::decode(format!("unknown protocol {s:?}")))
    }
}

/// Private key of the meta-address. Never written to a registry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpendingKey<S: CurveSuite> {
    P1(Fr<S>),
    P2(Fr<S>),
    P3(SecpScalar),
    Sk(Fr<S>),
    Dksap(SecpScalar),
}

impl<S: CurveSuite> SpendingKey<S> {
    pub fn protocol(&self) -> ProtocolId {
        match self {
            SpendingKey::P1(_) => ProtocolId::P1,
            SpendingKey::P2(_) => ProtocolId::P2,
            SpendingKey::P3(_) => ProtocolId::P3,
            SpendingKey::Sk(_) => ProtocolId::Sk,
            SpendingKey::Dksap(_) => ProtocolId::Dksap,
        }
    }
}

/// Key that detects payments without being able to spend them.
///
/// For SK the viewing key is the G2 point `V = k*g2`, fully determined by the
/// spending key.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViewingKey<S: CurveSuite> {
    P1(Fr<S>),
    P2(Fr<S>),
    P3(Fr<S>),
    Sk(G2Affine<S>),
    Dksap(SecpScalar),
}

impl<S: CurveSuite> ViewingKey<S> {
    pub fn protocol(&self) -> ProtocolId {
        match self {
            ViewingKey::P1(_) => ProtocolId::P1,
            ViewingKey::P2(_) => ProtocolId::P2,
            ViewingKey::P3(_) => ProtocolId::P3,
            ViewingKey::Sk(_) => ProtocolId::Sk,
            ViewingKey::Dksap(_) => ProtocolId::Dksap,
        }
    }
}

/// Published stealth meta-address.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetaAddress<S: CurveSuite> {
    P1 {
        spend: G2Affine<S>,
        view: G1Affine<S>,
    },
    P2 {
        spend: G2Affine<S>,
        view: G1Affine<S>,
    },
    P3 {
        spend: SecpAffine,
        view: G1Affine<S>,
    },
    Sk {
        spend: G1Affine<S>,
    },
    Dksap {
        spend: SecpAffine,
        view: SecpAffine,
    },
}

impl<S: CurveSuite> MetaAddress<S> {
    pub fn protocol(&self) -> ProtocolId {
        match self {
            MetaAddress::P1 { .. } => ProtocolId::P1,
            MetaAddress::P2 { .. } => ProtocolId::P2,
            MetaAddress::P3 { .. } => ProtocolId::P3,
            MetaAddress::Sk { .. } => ProtocolId::Sk,
            MetaAddress::Dksap { .. } => ProtocolId::Dksap,
        }
    }

    /// Canonical encodings of `K` and, for dual-key protocols, `V`.
    pub fn encoded_parts(&self) -> (Vec<u8>, Option<Vec<u8>>) {
        match self {
            MetaAddress::P1 { spend, view } | MetaAddress::P2 { spend, view } => {
                (g2_to_bytes::<S>(spend), Some(g1_to_bytes::<S>(view)))
            }
            MetaAddress::P3 { spend, view } => {
                (secp_to_bytes(spend), Some(g1_to_bytes::<S>(view)))
            }
            MetaAddress::Sk { spend } => (g1_to_bytes::<S>(spend), None),
            MetaAddress::Dksap { spend, view } => (secp_to_bytes(spend), Some(secp_to_bytes(view))),
        }
    }

    /// Rebuilds a meta-address from its protocol tag and encoded parts.
    pub fn from_parts(protocol: ProtocolId, spend: &[u8], view: Option<&[u8]>) -> Result<Self> {
        let need_view = || {
            view.ok_or_else(|| {
                Error::decode(format!("{protocol} meta-address requires a viewing key"))
            })
        };
        if !protocol.is_dual_key() && view.is_some() {
            return Err(Error::decode("sk meta-address carries a single key"));
        }
        let meta = match protocol {
            ProtocolId::P1 => MetaAddress::P1 {
                spend: nonzero(g2_from_bytes::<S>(spend)?)?,
                view: nonzero(g1_from_bytes::<S>(need_view()?)?)?,
            },
            ProtocolId::P2 => MetaAddress::P2 {
                spend: nonzero(g2_from_bytes::<S>(spend)?)?,
                view: nonzero(g1_from_bytes::<S>(need_view()?)?)?,
            },
            ProtocolId::P3 => MetaAddress::P3 {
                spend: nonzero(secp_from_bytes(spend)?)?,
                view: nonzero(g1_from_bytes::<S>(need_view()?)?)?,
            },
            ProtocolId::Sk => MetaAddress::Sk {
                spend: nonzero(g1_from_bytes::<S>(spend)?)?,
            },
            ProtocolId::Dksap => MetaAddress::Dksap {
                spend: nonzero(secp_from_bytes(spend)?)?,
                view: nonzero(secp_from_bytes(need_view()?)?)?,
            },
        };
        Ok(meta)
    }

    /// `sma:<proto>:<curve>:<hexK>[:<hexV>]`
    pub fn encode(&self) -> String {
        let (k, v) = self.encoded_parts();
        let mut out = format!("sma:{}:{}:{}", self.protocol(), S::ID, to_hex(&k));
        if let Some(v) = v {
            out.push(':');
            out.push_str(&to_hex(&v));
        }
        out
    }

    pub fn decode(s: &str) -> Result<Self> {
        let header = MetaHeader::parse(s)?;
        if header.curve != S::ID {
            return Err(Error::CurveMismatch {
                expected: S::ID,
                found: header.curve,
            });
        }
        let mut fields = s.split(':').skip(3);
        let k = from_hex(fields.next().unwrap_or_default())?;
        let v = fields.next().map(from_hex).transpose()?;
        if fields.next().is_some() {
            return Err(Error::decode("too many meta-address fields"));
        }
        Self::from_parts(header.protocol, &k, v.as_deref())
    }
}

fn nonzero<P: AffineRepr>(p: P) -> Result<P> {
    if p.is_zero() {
        Err(Error::decode("meta-address key is the identity"))
    } else {
        Ok(p)
    }
}

/// Protocol and curve of an encoded meta-address, readable without knowing
/// the curve at compile time.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MetaHeader {
    pub protocol: ProtocolId,
    pub curve: CurveId,
}

impl MetaHeader {
    pub fn parse(s: &str) -> Result<Self> {
        let mut fields = s.split(':');
        if fields.next() != Some("sma") {
            return Err(Error::decode(format!("meta-address {s:?} lacks the sma: prefix")));
        }
        let protocol = fields
            .next()
            .ok_or_else(|| Error::decode("missing protocol"))?
            .parse()?;
        let curve = fields
            .next()
            .ok_or_else(|| Error::decode("missing curve"))?
            .parse()?;
        Ok(MetaHeader { protocol, curve })
    }
}

/// Everything `gen_keys` produces for one recipient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RecipientKeys<S: CurveSuite> {
    pub spending: SpendingKey<S>,
    pub viewing: ViewingKey<S>,
    pub meta: MetaAddress<S>,
}

impl<S: CurveSuite> RecipientKeys<S> {
    pub fn protocol(&self) -> ProtocolId {
        self.meta.protocol()
    }
}

/// Draws fresh spending and viewing keys for `protocol` and derives the
/// meta-address. The spending key is drawn first, then the viewing key.
pub fn gen_keys<S: CurveSuite, R: Rng + ?Sized>(protocol: ProtocolId, rng: &mut R) -> RecipientKeys<S> {
    match protocol {
        ProtocolId::P1 | ProtocolId::P2 => {
            let k = curve::random_fr::<S, _>(rng);
            let v = curve::random_fr::<S, _>(rng);
            let spend = (g2::<S>() * k).into_affine();
            let view = (g1::<S>() * v).into_affine();
            if protocol == ProtocolId::P1 {
                RecipientKeys {
                    spending: SpendingKey::P1(k),
                    viewing: ViewingKey::P1(v),
                    meta: MetaAddress::P1 { spend, view },
                }
            } else {
                RecipientKeys {
                    spending: SpendingKey::P2(k),
                    viewing: ViewingKey::P2(v),
                    meta: MetaAddress::P2 { spend, view },
                }
            }
        }
        ProtocolId::P3 => {
            let k = curve::random_secp_scalar(rng);
            let v = curve::random_fr::<S, _>(rng);
            RecipientKeys {
                spending: SpendingKey::P3(k),
                viewing: ViewingKey::P3(v),
                meta: MetaAddress::P3 {
                    spend: (secp_generator() * k).into_affine(),
                    view: (g1::<S>() * v).into_affine(),
                },
            }
        }
        ProtocolId::Sk => {
            let k = curve::random_fr::<S, _>(rng);
            RecipientKeys {
                spending: SpendingKey::Sk(k),
                viewing: ViewingKey::Sk((g2::<S>() * k).into_affine()),
                meta: MetaAddress::Sk {
                    spend: (g1::<S>() * k).into_affine(),
                },
            }
        }
        ProtocolId::Dksap => {
            let k = curve::random_secp_scalar(rng);
            let v = curve::random_secp_scalar(rng);
            RecipientKeys {
                spending: SpendingKey::Dksap(k),
                viewing: ViewingKey::Dksap(v),
                meta: MetaAddress::Dksap {
                    spend: (secp_generator() * k).into_affine(),
                    view: (secp_generator() * v).into_affine(),
                },
            }
        }
    }
}

/// On-disk form of a recipient's keys, as written by `keygen`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyFile {
    pub proto: ProtocolId,
    pub curve: CurveId,
    /// Spending key, big-endian hex.
    pub k: String,
    /// Viewing key: a big-endian scalar, or for SK the compressed G2 point.
    pub v: String,
    pub meta: String,
}

impl KeyFile {
    pub fn from_keys<S: CurveSuite>(keys: &RecipientKeys<S>) -> Self {
        let k = match keys.spending {
            SpendingKey::P1(k) | SpendingKey::P2(k) | SpendingKey::Sk(k) => field_to_be_bytes(&k),
            SpendingKey::P3(k) | SpendingKey::Dksap(k) => field_to_be_bytes(&k),
        };
        let v = match keys.viewing {
            ViewingKey::P1(v) | ViewingKey::P2(v) | ViewingKey::P3(v) => field_to_be_bytes(&v),
            ViewingKey::Sk(v) => g2_to_bytes::<S>(&v),
            ViewingKey::Dksap(v) => field_to_be_bytes(&v),
        };
        KeyFile {
            proto: keys.protocol(),
            curve: S::ID,
            k: to_hex(&k),
            v: to_hex(&v),
            meta: keys.meta.encode(),
        }
    }

    /// Parses the keys and checks that the public parts recompute from the
    /// private ones.
    pub fn to_keys<S: CurveSuite>(&self) -> Result<RecipientKeys<S>> {
        if self.curve != S::ID {
            return Err(Error::CurveMismatch {
                expected: S::ID,
                found: self.curve,
            });
        }
        let meta = MetaAddress::<S>::decode(&self.meta)?;
        self.proto.expect(meta.protocol())?;
        let k = from_hex(&self.k)?;
        let v = from_hex(&self.v)?;
        let fr = |b: &[u8]| field_from_be_bytes::<Fr<S>>(b);
        let secp = |b: &[u8]| field_from_be_bytes::<SecpScalar>(b);
        let (spending, viewing) = match self.proto {
            ProtocolId::P1 => (SpendingKey::P1(fr(&k)?), ViewingKey::P1(fr(&v)?)),
            ProtocolId::P2 => (SpendingKey::P2(fr(&k)?), ViewingKey::P2(fr(&v)?)),
            ProtocolId::P3 => (SpendingKey::P3(secp(&k)?), ViewingKey::P3(fr(&v)?)),
            ProtocolId::Sk => (SpendingKey::Sk(fr(&k)?), ViewingKey::Sk(g2_from_bytes::<S>(&v)?)),
            ProtocolId::Dksap => (SpendingKey::Dksap(secp(&k)?), ViewingKey::Dksap(secp(&v)?)),
        };
        let keys = RecipientKeys {
            spending,
            viewing,
            meta,
        };
        if public_parts(&spending, &viewing)? != meta {
            return Err(Error::decode("key file: meta-address does not match the private keys"));
        }
        Ok(keys)
    }
}

/// Recomputes the meta-address from private key material.
pub fn public_parts<S: CurveSuite>(
    spending: &SpendingKey<S>,
    viewing: &ViewingKey<S>,
) -> Result<MetaAddress<S>> {
    spending.protocol().expect(viewing.protocol())?;
    Ok(match (spending, viewing) {
        (SpendingKey::P1(k), ViewingKey::P1(v)) => MetaAddress::P1 {
            spend: (g2::<S>() * k).into_affine(),
            view: (g1::<S>() * v).into_affine(),
        },
        (SpendingKey::P2(k), ViewingKey::P2(v)) => MetaAddress::P2 {
            spend: (g2::<S>() * k).into_affine(),
            view: (g1::<S>() * v).into_affine(),
        },
        (SpendingKey::P3(k), ViewingKey::P3(v)) => MetaAddress::P3 {
            spend: (secp_generator() * k).into_affine(),
            view: (g1::<S>() * v).into_affine(),
        },
        (SpendingKey::Sk(k), ViewingKey::Sk(v)) => {
            if (g2::<S>() * k).into_affine() != *v {
                return Err(Error::decode("sk viewing key is not k*g2"));
            }
            MetaAddress::Sk {
                spend: (g1::<S>() * k).into_affine(),
            }
        }
        (SpendingKey::Dksap(k), ViewingKey::Dksap(v)) => MetaAddress::Dksap {
            spend: (secp_generator() * k).into_affine(),
            view: (secp_generator() * v).into_affine(),
        },
        _ => unreachable!("protocols checked equal above"),
    })
}
