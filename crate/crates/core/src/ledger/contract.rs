//! Identities, signed contracts and their canonical byte encoding.
//!
//! Fields are serialized in declaration order, each length-prefixed with a
//! little-endian `u64`. Signatures are Ed25519 over that encoding minus the
//! signature itself; digests are SHA-256.

use std::fmt;

use ed25519_dalek::{Signer, SigningKey, Verifier, VerifyingKey};
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest as _, Sha256};

/// SHA-256 output.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Digest(#[serde(with = "hex::serde")] pub [u8; 32]);

impl Digest {
    pub const ZERO: Digest = Digest([0; 32]);

    pub fn of(bytes: &[u8]) -> Self {
        Digest(Sha256::digest(bytes).into())
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", hex::encode(&self.0[..8]))
    }
}

/// 20-byte account address: the trailing bytes of the SHA-256 of the public key.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Address(#[serde(with = "hex::serde")] pub [u8; 20]);

impl Address {
    pub fn of_key(key: &PublicKey) -> Self {
        let h = Sha256::digest(key.0);
        let mut a = [0; 20];
        a.copy_from_slice(&h[12..]);
        Address(a)
    }
}

impl fmt::Debug for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{}", hex::encode(self.0))
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{}", hex::encode(self.0))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PublicKey(#[serde(with = "hex::serde")] pub [u8; 32]);

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Signature(#[serde(with = "hex::serde")] pub [u8; 64]);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Sensor,
    Mec,
    Validator,
}

/// A network participant holding its signing key.
#[derive(Clone)]
pub struct NodeIdentity {
    key: SigningKey,
    address: Address,
    role: Role,
}

impl fmt::Debug for NodeIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NodeIdentity")
            .field("address", &self.address)
            .field("role", &self.role)
            .finish_non_exhaustive()
    }
}

impl NodeIdentity {
    pub fn from_secret(secret: [u8; 32], role: Role) -> Self {
        let key = SigningKey::from_bytes(&secret);
        let address = Address::of_key(&PublicKey(key.verifying_key().to_bytes()));
        Self { key, address, role }
    }

    pub fn generate<R: Rng + ?Sized>(rng: &mut R, role: Role) -> Self {
        let mut secret = [0u8; 32];
        rng.fill(&mut secret);
        Self::from_secret(secret, role)
    }

    pub fn address(&self) -> Address {
        self.address
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn public_key(&self) -> PublicKey {
        PublicKey(self.key.verifying_key().to_bytes())
    }

    pub(crate) fn sign(&self, message: &[u8]) -> Signature {
        Signature(self.key.sign(message).to_bytes())
    }
}

/// Compute resources granted to a task, recorded verbatim.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResourceDescriptor {
    pub cpu_hz: f64,
    pub cycles_per_bit: f64,
}

#[derive(Default)]
struct Canonical(Vec<u8>);

impl Canonical {
    fn tagged(tag: &str) -> Self {
        let mut c = Canonical::default();
        c.field(tag.as_bytes());
        c
    }

    fn field(&mut self, bytes: &[u8]) -> &mut Self {
        self.0
            .extend_from_slice(&(bytes.len() as u64).to_le_bytes());
        self.0.extend_from_slice(bytes);
        self
    }

    fn u64(&mut self, v: u64) -> &mut Self {
        self.field(&v.to_le_bytes())
    }

    fn f64(&mut self, v: f64) -> &mut Self {
        self.field(&v.to_bits().to_le_bytes())
    }
}

/// `task_publish_contract(Z_i)`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskPublishContract {
    pub task_id: u64,
    pub payload_digest: Digest,
    pub publisher: Address,
    pub publisher_key: PublicKey,
    pub gas: u64,
    pub gas_price: u64,
    pub signature: Signature,
}

impl TaskPublishContract {
    pub(crate) fn signed(
        sensor: &NodeIdentity,
        task_id: u64,
        payload: &[u8],
        gas: u64,
        gas_price: u64,
    ) -> Self {
        let mut c = Self {
            task_id,
            payload_digest: Digest::of(payload),
            publisher: sensor.address(),
            publisher_key: sensor.public_key(),
            gas,
            gas_price,
            signature: Signature([0; 64]),
        };
        c.signature = sensor.sign(&c.signing_bytes());
        c
    }

    pub fn signing_bytes(&self) -> Vec<u8> {
        let mut c = Canonical::tagged("task_publish");
        c.u64(self.task_id)
            .field(&self.payload_digest.0)
            .field(&self.publisher.0)
            .field(&self.publisher_key.0)
            .u64(self.gas)
            .u64(self.gas_price);
        c.0
    }
}

/// `result_record_contract(Z_i)`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecordContract {
    pub task_id: u64,
    pub result_digest: Digest,
    pub server: Address,
    pub server_key: PublicKey,
    pub resources: ResourceDescriptor,
    pub gas: u64,
    pub gas_price: u64,
    pub signature: Signature,
}

impl ResultRecordContract {
    pub(crate) fn signed(
        server: &NodeIdentity,
        task_id: u64,
        result: &[u8],
        resources: ResourceDescriptor,
        gas: u64,
        gas_price: u64,
    ) -> Self {
        let mut c = Self {
            task_id,
            result_digest: Digest::of(result),
            server: server.address(),
            server_key: server.public_key(),
            resources,
            gas,
            gas_price,
            signature: Signature([0; 64]),
        };
        c.signature = server.sign(&c.signing_bytes());
        c
    }

    pub fn signing_bytes(&self) -> Vec<u8> {
        let mut c = Canonical::tagged("result_record");
        c.u64(self.task_id)
            .field(&self.result_digest.0)
            .field(&self.server.0)
            .field(&self.server_key.0)
            .f64(self.resources.cpu_hz)
            .f64(self.resources.cycles_per_bit)
            .u64(self.gas)
            .u64(self.gas_price);
        c.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ContractRecord {
    TaskPublish(TaskPublishContract),
    ResultRecord(ResultRecordContract),
}

impl ContractRecord {
    pub fn task_id(&self) -> u64 {
        match self {
            ContractRecord::TaskPublish(c) => c.task_id,
            ContractRecord::ResultRecord(c) => c.task_id,
        }
    }

    /// Declared signer.
    pub fn signer(&self) -> Address {
        match self {
            ContractRecord::TaskPublish(c) => c.publisher,
            ContractRecord::ResultRecord(c) => c.server,
        }
    }

    fn parts(&self) -> (Vec<u8>, &PublicKey, &Address, &Signature) {
        match self {
            ContractRecord::TaskPublish(c) => (
                c.signing_bytes(),
                &c.publisher_key,
                &c.publisher,
                &c.signature,
            ),
            ContractRecord::ResultRecord(c) => {
                (c.signing_bytes(), &c.server_key, &c.server, &c.signature)
            }
        }
    }

    /// SHA-256 over the canonical encoding including the signature.
    pub fn digest(&self) -> Digest {
        let (bytes, _, _, sig) = self.parts();
        let mut c = Canonical(bytes);
        c.field(&sig.0);
        Digest::of(&c.0)
    }

    /// Checks that the key belongs to the declared address and the signature
    /// covers every other field.
    pub fn verify_signature(&self) -> Result<(), String> {
        let (bytes, key, address, sig) = self.parts();
        if Address::of_key(key) != *address {
            return Err(format!("key does not belong to {address}"));
        }
        let vk = VerifyingKey::from_bytes(&key.0).map_err(|e| format!("bad public key: {e}"))?;
        vk.verify(&bytes, &ed25519_dalek::Signature::from_bytes(&sig.0))
            .map_err(|_| format!("signature by {address} does not verify"))
    }
}
