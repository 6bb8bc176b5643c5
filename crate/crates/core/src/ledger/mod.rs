//! Hash-chained ledger of task-publish and result-record contracts.
//!
//! The account-charging competition is a seeded uniform draw over the
//! registered identities; no work function is modeled. Gas is recorded but
//! never spent.

mod contract;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{BufRead, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use contract::{
    Address, ContractRecord, Digest, NodeIdentity, PublicKey, ResourceDescriptor,
    ResultRecordContract, Role, Signature, TaskPublishContract,
};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub height: u64,
    pub previous: Digest,
    pub contract_digests: Vec<Digest>,
    pub contracts: Vec<ContractRecord>,
    /// Winner of the account-charging competition.
    pub winner: Address,
    pub digest: Digest,
}

impl Block {
    /// `H(height ∥ previous ∥ contract digests ∥ winner)`
    pub fn compute_digest(
        height: u64,
        previous: &Digest,
        contracts: &[Digest],
        winner: &Address,
    ) -> Digest {
        let mut bytes = Vec::with_capacity(8 + 32 + 8 + 32 * contracts.len() + 20);
        bytes.extend_from_slice(&height.to_le_bytes());
        bytes.extend_from_slice(&previous.0);
        bytes.extend_from_slice(&(contracts.len() as u64).to_le_bytes());
        for d in contracts {
            bytes.extend_from_slice(&d.0);
        }
        bytes.extend_from_slice(&winner.0);
        Digest::of(&bytes)
    }
}

/// First integrity violation found by [`Ledger::verify_chain`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainViolation {
    pub height: u64,
    pub reason: String,
}

impl fmt::Display for ChainViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "block {}: {}", self.height, self.reason)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceKind {
    Published,
    ResultRecorded,
}

/// One step of a task's history.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEvent {
    pub kind: TraceKind,
    pub height: u64,
    /// Publisher for `Published`, server for `ResultRecorded`.
    pub actor: Address,
    pub winner: Address,
    pub digest: Digest,
}

#[derive(Debug, Clone)]
struct Registration {
    role: Role,
}

#[derive(Debug, Default, Clone)]
pub struct Ledger {
    registry: BTreeMap<Address, Registration>,
    pending: Vec<ContractRecord>,
    blocks: Vec<Block>,
    /// task id → sealing height of its publish contract
    sealed_tasks: HashMap<u64, u64>,
}

impl Ledger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, node: &NodeIdentity) -> Result<()> {
        if self.registry.contains_key(&node.address()) {
            return Err(Error::Ledger(format!(
                "address {} already registered",
                node.address()
            )));
        }
        self.registry
            .insert(node.address(), Registration { role: node.role() });
        Ok(())
    }

    pub fn role_of(&self, address: &Address) -> Option<Role> {
        self.registry.get(address).map(|r| r.role)
    }

    fn require_registered(&self, node: &NodeIdentity) -> Result<()> {
        if self.registry.contains_key(&node.address()) {
            Ok(())
        } else {
            Err(Error::Ledger(format!(
                "address {} is not registered",
                node.address()
            )))
        }
    }

    fn task_known(&self, task_id: u64) -> bool {
        self.sealed_tasks.contains_key(&task_id)
            || self
                .pending
                .iter()
                .any(|c| matches!(c, ContractRecord::TaskPublish(p) if p.task_id == task_id))
    }

    /// Step 2: sign and queue a task-publish contract.
    pub fn publish_task(
        &mut self,
        sensor: &NodeIdentity,
        task_id: u64,
        payload: &[u8],
        gas: u64,
        gas_price: u64,
    ) -> Result<TaskPublishContract> {
        self.require_registered(sensor)?;
        if self.task_known(task_id) {
            return Err(Error::Ledger(format!("task {task_id} already published")));
        }
        let c = TaskPublishContract::signed(sensor, task_id, payload, gas, gas_price);
        self.pending.push(ContractRecord::TaskPublish(c.clone()));
        Ok(c)
    }

    /// Step 5: sign and queue a result-record contract for a sealed task.
    pub fn record_result(
        &mut self,
        server: &NodeIdentity,
        task_id: u64,
        result: &[u8],
        resources: ResourceDescriptor,
        gas: u64,
        gas_price: u64,
    ) -> Result<ResultRecordContract> {
        self.require_registered(server)?;
        if !self.sealed_tasks.contains_key(&task_id) {
            return Err(Error::Ledger(format!(
                "task {task_id} is not in a sealed block"
            )));
        }
        let c = ResultRecordContract::signed(server, task_id, result, resources, gas, gas_price);
        self.pending.push(ContractRecord::ResultRecord(c.clone()));
        Ok(c)
    }

    pub fn pending(&self) -> &[ContractRecord] {
        &self.pending
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn into_blocks(self) -> Vec<Block> {
        self.blocks
    }

    pub fn head_digest(&self) -> Digest {
        self.blocks.last().map_or(Digest::ZERO, |b| b.digest)
    }

    /// Steps 4 and 6: seal the pending pool in submission order.
    pub fn mine_block<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<&Block> {
        if self.pending.is_empty() {
            return Err(Error::Ledger("no pending contracts to seal".into()));
        }
        if self.registry.is_empty() {
            return Err(Error::Ledger("no registered identities to compete".into()));
        }
        let pick = rng.random_range(0..self.registry.len());
        let winner = *self.registry.keys().nth(pick).expect("index in range");
        let height = self.blocks.len() as u64;
        let previous = self.head_digest();
        let contracts = std::mem::take(&mut self.pending);
        let contract_digests: Vec<Digest> = contracts.iter().map(ContractRecord::digest).collect();
        for c in &contracts {
            if let ContractRecord::TaskPublish(p) = c {
                self.sealed_tasks.insert(p.task_id, height);
            }
        }
        let digest = Block::compute_digest(height, &previous, &contract_digests, &winner);
        self.blocks.push(Block {
            height,
            previous,
            contract_digests,
            contracts,
            winner,
            digest,
        });
        Ok(self.blocks.last().expect("just pushed"))
    }

    /// Rebuilds a ledger from exported blocks. The result carries no registry,
    /// so it can be verified and traced but not extended by unregistered nodes.
    pub fn from_blocks(blocks: Vec<Block>) -> Self {
        let mut sealed_tasks = HashMap::new();
        for b in &blocks {
            for c in &b.contracts {
                if let ContractRecord::TaskPublish(p) = c {
                    sealed_tasks.entry(p.task_id).or_insert(b.height);
                }
            }
        }
        Self {
            blocks,
            sealed_tasks,
            ..Self::default()
        }
    }

    /// Recomputes every digest, height link and signature, and checks that
    /// each result follows its task's block.
    pub fn verify_chain(&self) -> Result<(), ChainViolation> {
        verify_blocks(&self.blocks)
    }

    /// Ordered publish/result history of a task; empty when unknown.
    pub fn trace_task(&self, task_id: u64) -> Vec<TraceEvent> {
        let mut events = Vec::new();
        for b in &self.blocks {
            for (c, d) in b.contracts.iter().zip(&b.contract_digests) {
                if c.task_id() != task_id {
                    continue;
                }
                let kind = match c {
                    ContractRecord::TaskPublish(_) => TraceKind::Published,
                    ContractRecord::ResultRecord(_) => TraceKind::ResultRecorded,
                };
                events.push(TraceEvent {
                    kind,
                    height: b.height,
                    actor: c.signer(),
                    winner: b.winner,
                    digest: *d,
                });
            }
        }
        events
    }

    /// One JSON object per block per line.
    pub fn export_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for b in &self.blocks {
            serde_json::to_writer(&mut out, b)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn import_jsonl<R: BufRead>(input: R) -> Result<Self> {
        let mut blocks = Vec::new();
        for line in input.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            blocks.push(serde_json::from_str(&line)?);
        }
        Ok(Self::from_blocks(blocks))
    }
}

fn verify_blocks(blocks: &[Block]) -> Result<(), ChainViolation> {
    let mut previous = Digest::ZERO;
    let mut sealed: HashMap<u64, u64> = HashMap::new();
    for (i, b) in blocks.iter().enumerate() {
        let fail = |reason: String| ChainViolation {
            height: b.height,
            reason,
        };
        if b.height != i as u64 {
            return Err(fail(format!("height {} at position {i}", b.height)));
        }
        if b.previous != previous {
            return Err(fail("previous digest does not match parent".into()));
        }
        if b.contracts.len() != b.contract_digests.len() {
            return Err(fail("contract count does not match digest list".into()));
        }
        for (k, (c, d)) in b.contracts.iter().zip(&b.contract_digests).enumerate() {
            if c.digest() != *d {
                return Err(fail(format!("contract {k} digest mismatch")));
            }
            c.verify_signature()
                .map_err(|e| fail(format!("contract {k}: {e}")))?;
        }
        if Block::compute_digest(b.height, &b.previous, &b.contract_digests, &b.winner) != b.digest
        {
            return Err(fail("block digest mismatch".into()));
        }
        for (k, c) in b.contracts.iter().enumerate() {
            match c {
                ContractRecord::TaskPublish(p) => {
                    if sealed.insert(p.task_id, b.height).is_some() {
                        return Err(fail(format!("task {} published twice", p.task_id)));
                    }
                }
                ContractRecord::ResultRecord(r) => match sealed.get(&r.task_id) {
                    Some(&h) if h < b.height => {}
                    _ => {
                        return Err(fail(format!(
                            "contract {k}: result for task {} precedes its sealed publication",
                            r.task_id
                        )))
                    }
                },
            }
        }
        previous = b.digest;
    }
    Ok(())
}
