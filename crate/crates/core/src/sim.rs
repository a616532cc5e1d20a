//! Byte-level execution of a scheme: place packets in node caches, send one
//! XOR per label and round, and rebuild every user's file.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::arrays::{DeliveryArray, DeliveryEntry, Label, StarMap};
use crate::error::{Error, Result};
use crate::io::RationalJson;
use crate::mds::ReedSolomon;
use crate::scheme::{derive_user_retrieve, CodedCachingScheme, Layout, Topology};
use crate::Rational;

pub const DEFAULT_PACKET_SIZE: usize = 64;

/// `N` files of `packets * packet_size` pseudo-random bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileLibrary {
    packets: usize,
    packet_size: usize,
    files: Vec<Vec<u8>>,
}

impl FileLibrary {
    pub fn generate(n: usize, packets: usize, packet_size: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let files = (0..n)
            .map(|_| {
                let mut f = vec![0u8; packets * packet_size];
                rng.fill_bytes(&mut f);
                f
            })
            .collect();
        Self {
            packets,
            packet_size,
            files,
        }
    }

    /// Library sized for `scheme` with `n` files.
    pub fn for_scheme<S: CodedCachingScheme + ?Sized>(scheme: &S, n: usize, packet_size: usize, seed: u64) -> Self {
        Self::generate(n, scheme.packets_per_file(), packet_size, seed)
    }

    pub fn n(&self) -> usize {
        self.files.len()
    }

    pub fn packets(&self) -> usize {
        self.packets
    }

    pub fn packet_size(&self) -> usize {
        self.packet_size
    }

    pub fn file(&self, n: usize) -> &[u8] {
        &self.files[n]
    }

    pub fn packet(&self, n: usize, p: usize) -> &[u8] {
        &self.files[n][p * self.packet_size..(p + 1) * self.packet_size]
    }
}

/// File requested by every user.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DemandVector(pub Vec<usize>);

impl DemandVector {
    /// User `u` requests file `u`.
    pub fn all_distinct(users: usize, n: usize) -> Result<Self> {
        if n < users {
            return Err(Error::Infeasible(format!(
                "all-distinct demand needs N >= {users} files, got N={n}"
            )));
        }
        Ok(Self((0..users).collect()))
    }

    pub fn seeded(users: usize, n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self((0..users).map(|_| rng.gen_range(0..n)).collect())
    }

    pub fn users(&self) -> usize {
        self.0.len()
    }
}

/// Segments `round * rows + row` held by every node, with their bytes for
/// every file.
#[derive(Debug, Clone)]
pub struct CacheContents {
    nodes: Vec<BTreeMap<usize, Vec<Vec<u8>>>>,
}

impl CacheContents {
    pub fn nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Sorted segments cached by `node`.
    pub fn segments(&self, node: usize) -> Vec<usize> {
        self.nodes[node].keys().copied().collect()
    }

    /// Packets stored per file at `node`.
    pub fn packets_per_file(&self, node: usize) -> usize {
        self.nodes[node].len()
    }

    pub fn bytes(&self, node: usize, segment: usize, file: usize) -> Option<&[u8]> {
        self.nodes[node].get(&segment).map(|v| v[file].as_slice())
    }
}

/// One requested packet inside a multicast.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Component {
    pub user: usize,
    pub file: usize,
    pub segment: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MulticastMessage {
    pub round: usize,
    pub label: Label,
    /// XOR terms, one per cell of the label.
    pub components: Vec<Component>,
    /// Cells of later labels with the same terms, served by this message
    /// when redundant messages are eliminated.
    pub merged: Vec<Component>,
    pub payload: Vec<u8>,
}

impl MulticastMessage {
    pub fn beneficiaries(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.components.iter().chain(&self.merged).map(|c| c.user).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn payload_sha256(&self) -> String {
        Sha256::digest(&self.payload)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeliveryLog {
    pub messages: Vec<MulticastMessage>,
    pub per_round: Vec<usize>,
    pub packets_per_file: usize,
}

impl DeliveryLog {
    pub fn total(&self) -> usize {
        self.messages.len()
    }

    /// Messages sent divided by packets per file.
    pub fn load(&self) -> Rational {
        Rational::new(self.total() as i64, self.packets_per_file as i64)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DeliveryOptions {
    /// Drop a message when an earlier one has the same components; off by
    /// default.
    pub eliminate_redundant: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecodeVerdict {
    pub user: usize,
    pub file: usize,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Placement of a scheme over a library, ready to serve demands.
pub struct Simulator<'a, S: CodedCachingScheme + ?Sized> {
    scheme: &'a S,
    library: &'a FileLibrary,
    mds: Option<ReedSolomon>,
    deliveries: Vec<DeliveryArray>,
    caches: CacheContents,
    /// For every user: retrievable segment -> a node holding it.
    reach: Vec<HashMap<usize, usize>>,
}

impl<'a, S: CodedCachingScheme + ?Sized> Simulator<'a, S> {
    /// Place the library. Fails if the library size does not match the
    /// scheme, if any node exceeds or undershoots its memory, or if the
    /// scheme's user-retrieve arrays disagree with what the topology
    /// actually lets users read.
    pub fn new(scheme: &'a S, library: &'a FileLibrary) -> Result<Self> {
        let f = scheme.packets_per_file();
        if library.packets() != f {
            return Err(Error::Format(format!(
                "library has {} packets per file, scheme needs {f}",
                library.packets()
            )));
        }
        let mds = match scheme.layout() {
            Layout::Uncoded => None,
            Layout::Mds {
                source_blocks,
                coded_blocks,
                ..
            } => Some(ReedSolomon::new(source_blocks, coded_blocks)?),
        };
        let topology = scheme.topology();
        let rows = scheme.rows();
        let mut sim = Self {
            scheme,
            library,
            mds,
            deliveries: Vec::with_capacity(scheme.rounds()),
            caches: CacheContents {
                nodes: vec![BTreeMap::new(); topology.nodes()],
            },
            reach: vec![HashMap::new(); topology.users()],
        };

        let mut placements: Vec<StarMap> = Vec::with_capacity(scheme.rounds());
        for r in 0..scheme.rounds() {
            let c = scheme.node_placement(r);
            for j in 0..rows {
                let seg = r * rows + j;
                for &node in c.row(j) {
                    let bytes = (0..library.n()).map(|n| sim.segment_bytes(n, seg)).collect();
                    sim.caches.nodes[node].insert(seg, bytes);
                }
            }
            placements.push(c);
            sim.deliveries.push(scheme.user_delivery(r));
        }

        let expected = scheme.memory_ratio() * Rational::from_integer(f as i64);
        for node in 0..topology.nodes() {
            let found = sim.caches.packets_per_file(node);
            if Rational::from_integer(found as i64) != expected {
                return Err(Error::MemoryConstraint {
                    node,
                    expected: expected.to_string(),
                    found,
                });
            }
        }

        for user in 0..topology.users() {
            for node in topology.accessible(user) {
                for seg in sim.caches.segments(node) {
                    sim.reach[user].entry(seg).or_insert(node);
                }
            }
        }
        for (r, c) in placements.iter().enumerate() {
            let derived = derive_user_retrieve(c, topology);
            if derived != scheme.user_retrieve(r) {
                return Err(Error::Construction(format!(
                    "round {r}: user-retrieve array differs from the union of accessible node caches"
                )));
            }
        }
        Ok(sim)
    }

    pub fn scheme(&self) -> &S {
        self.scheme
    }

    pub fn topology(&self) -> Topology {
        self.scheme.topology()
    }

    pub fn caches(&self) -> &CacheContents {
        &self.caches
    }

    /// Segments user `u` reads from its nodes, ascending.
    pub fn retrievable(&self, user: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.reach[user].keys().copied().collect();
        v.sort_unstable();
        v
    }

    /// Bytes of segment `seg` of file `n`: a packet, or a coded packet under
    /// an MDS layout.
    fn segment_bytes(&self, n: usize, seg: usize) -> Vec<u8> {
        match self.scheme.layout() {
            Layout::Uncoded => self.library.packet(n, seg).to_vec(),
            Layout::Mds {
                source_blocks,
                rows_per_block,
                ..
            } => {
                let rows = self.scheme.rows();
                let positions = self.scheme.rounds() * rows_per_block;
                let (r, row) = (seg / rows, seg % rows);
                let block = row / rows_per_block;
                let pos = r * rows_per_block + row % rows_per_block;
                let sources: Vec<&[u8]> = (0..source_blocks)
                    .map(|b| self.library.packet(n, b * positions + pos))
                    .collect();
                self.mds
                    .as_ref()
                    .expect("MDS layout has a code")
                    .encode_block(block, &sources)
            }
        }
    }

    fn user_bytes(&self, user: usize, file: usize, seg: usize) -> Option<&[u8]> {
        let node = *self.reach[user].get(&seg)?;
        self.caches.bytes(node, seg, file)
    }

    /// One XOR message per distinct label per round.
    pub fn deliver(&self, demand: &DemandVector, opts: DeliveryOptions) -> Result<DeliveryLog> {
        let users = self.topology().users();
        if demand.users() != users {
            return Err(Error::Format(format!(
                "demand covers {} users, scheme has {users}",
                demand.users()
            )));
        }
        if let Some(&bad) = demand.0.iter().find(|&&d| d >= self.library.n()) {
            return Err(Error::Format(format!(
                "demand requests file {bad} but the library has {}",
                self.library.n()
            )));
        }
        let rows = self.scheme.rows();
        let mut messages = Vec::new();
        let mut per_round = Vec::with_capacity(self.deliveries.len());
        let mut seen: HashMap<Vec<(usize, usize)>, usize> = HashMap::new();
        for (r, q) in self.deliveries.iter().enumerate() {
            let mut count = 0;
            for (label, cells) in q.label_cells() {
                let components: Vec<Component> = cells
                    .iter()
                    .map(|&(row, user)| Component {
                        user,
                        file: demand.0[user],
                        segment: r * rows + row,
                    })
                    .collect();
                if opts.eliminate_redundant {
                    let mut key: Vec<(usize, usize)> =
                        components.iter().map(|c| (c.file, c.segment)).collect();
                    key.sort_unstable();
                    if let Some(&earlier) = seen.get(&key) {
                        let msg: &mut MulticastMessage = &mut messages[earlier];
                        msg.merged.extend(components);
                        continue;
                    }
                    seen.insert(key, messages.len());
                }
                let mut payload = vec![0u8; self.library.packet_size()];
                for c in &components {
                    for (p, b) in payload.iter_mut().zip(self.segment_bytes(c.file, c.segment)) {
                        *p ^= b;
                    }
                }
                messages.push(MulticastMessage {
                    round: r,
                    label: label.clone(),
                    components,
                    merged: Vec::new(),
                    payload,
                });
                count += 1;
            }
            per_round.push(count);
        }
        Ok(DeliveryLog {
            messages,
            per_round,
            packets_per_file: self.scheme.packets_per_file(),
        })
    }

    /// Rebuild the file requested by `user` from its node reads and the
    /// messages addressed to it.
    pub fn decode(&self, user: usize, demand: &DemandVector, log: &DeliveryLog) -> Result<Vec<u8>> {
        let file = demand.0[user];
        let fail = |reason: String| Error::Decode { user, reason };
        let mut known: HashMap<usize, Vec<u8>> = HashMap::new();
        for m in &log.messages {
            for own in m.components.iter().chain(&m.merged).filter(|c| c.user == user) {
                let mut bytes = m.payload.clone();
                for other in &m.components {
                    if other.file == own.file && other.segment == own.segment {
                        continue;
                    }
                    let side = self.user_bytes(user, other.file, other.segment).ok_or_else(|| {
                        fail(format!(
                            "round {} label {:?}: lacks side information (file {}, segment {})",
                            m.round, m.label, other.file, other.segment
                        ))
                    })?;
                    xor_into(&mut bytes, side);
                }
                known.insert(own.segment, bytes);
            }
        }
        let mut get = |seg: usize| -> Option<Vec<u8>> {
            if let Some(b) = self.user_bytes(user, file, seg) {
                return Some(b.to_vec());
            }
            known.remove(&seg)
        };

        let ps = self.library.packet_size();
        let f = self.scheme.packets_per_file();
        let rows = self.scheme.rows();
        let mut out = vec![0u8; f * ps];
        match self.scheme.layout() {
            Layout::Uncoded => {
                for seg in 0..f {
                    let bytes = get(seg).ok_or_else(|| fail(format!("packet {seg} neither read nor delivered")))?;
                    out[seg * ps..(seg + 1) * ps].copy_from_slice(&bytes);
                }
            }
            Layout::Mds {
                source_blocks,
                coded_blocks,
                rows_per_block,
            } => {
                let rs = self.mds.as_ref().expect("MDS layout has a code");
                let positions = self.scheme.rounds() * rows_per_block;
                for pos in 0..positions {
                    let (r, offset) = (pos / rows_per_block, pos % rows_per_block);
                    let shares: Vec<(usize, Vec<u8>)> = (0..coded_blocks)
                        .filter_map(|b| get(r * rows + b * rows_per_block + offset).map(|x| (b, x)))
                        .collect();
                    let refs: Vec<(usize, &[u8])> = shares.iter().map(|(b, x)| (*b, x.as_slice())).collect();
                    let sources = rs
                        .decode(&refs)
                        .map_err(|e| fail(format!("position {pos}: {e}")))?;
                    for (b, src) in sources.iter().enumerate().take(source_blocks) {
                        let p = b * positions + pos;
                        out[p * ps..(p + 1) * ps].copy_from_slice(src);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Decode every user and compare with the library byte for byte.
    pub fn verify_all(&self, demand: &DemandVector, log: &DeliveryLog) -> Vec<DecodeVerdict> {
        (0..demand.users())
            .map(|user| {
                let file = demand.0[user];
                match self.decode(user, demand, log) {
                    Ok(bytes) if bytes == self.library.file(file) => DecodeVerdict {
                        user,
                        file,
                        ok: true,
                        error: None,
                    },
                    Ok(bytes) => {
                        let ps = self.library.packet_size();
                        let first = bytes
                            .iter()
                            .zip(self.library.file(file))
                            .position(|(a, b)| a != b)
                            .unwrap_or(0);
                        DecodeVerdict {
                            user,
                            file,
                            ok: false,
                            error: Some(format!("mismatch in packet {}", first / ps)),
                        }
                    }
                    Err(e) => DecodeVerdict {
                        user,
                        file,
                        ok: false,
                        error: Some(e.to_string()),
                    },
                }
            })
            .collect()
    }

    /// Deliver and decode one demand.
    pub fn run(&self, demand: &DemandVector, opts: DeliveryOptions) -> Result<(DeliveryLog, Vec<DecodeVerdict>)> {
        let log = self.deliver(demand, opts)?;
        let verdicts = self.verify_all(demand, &log);
        Ok((log, verdicts))
    }
}

fn xor_into(dst: &mut [u8], src: &[u8]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

/// Load of the all-distinct demand, after checking that no sampled demand
/// needs more.
pub fn measure_worst_case<S: CodedCachingScheme + ?Sized>(
    sim: &Simulator<'_, S>,
    samples: &[DemandVector],
    opts: DeliveryOptions,
) -> Result<Rational> {
    let users = sim.topology().users();
    let worst = sim
        .deliver(&DemandVector::all_distinct(users, sim.library.n())?, opts)?
        .load();
    for d in samples {
        let load = sim.deliver(d, opts)?.load();
        if load > worst {
            return Err(Error::Construction(format!(
                "demand {:?} needs load {load}, above the all-distinct load {worst}",
                d.0
            )));
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Serialize)]
pub struct TranscriptEntry {
    pub round: usize,
    pub label: DeliveryEntry,
    pub beneficiaries: Vec<usize>,
    pub payload_sha256: String,
}

/// Outcome of one simulated demand, as written by the command-line tool.
#[derive(Debug, Clone, Serialize)]
pub struct SimReport {
    pub params: serde_json::Value,
    pub topology: Topology,
    pub packets_per_file: usize,
    pub packet_size: usize,
    pub demand: DemandVector,
    pub per_round: Vec<usize>,
    pub total_messages: usize,
    pub load: RationalJson,
    pub closed_form_load: RationalJson,
    pub all_decoded: bool,
    pub decode: Vec<DecodeVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transcript: Option<Vec<TranscriptEntry>>,
}

impl SimReport {
    pub fn new<S: CodedCachingScheme + ?Sized>(
        sim: &Simulator<'_, S>,
        params: serde_json::Value,
        demand: DemandVector,
        log: &DeliveryLog,
        verdicts: Vec<DecodeVerdict>,
        transcript: bool,
    ) -> Self {
        let transcript = transcript.then(|| {
            log.messages
                .iter()
                .map(|m| TranscriptEntry {
                    round: m.round,
                    label: DeliveryEntry::Label(m.label.clone()),
                    beneficiaries: m.beneficiaries(),
                    payload_sha256: m.payload_sha256(),
                })
                .collect()
        });
        Self {
            params,
            topology: sim.topology(),
            packets_per_file: log.packets_per_file,
            packet_size: sim.library.packet_size(),
            demand,
            per_round: log.per_round.clone(),
            total_messages: log.total(),
            load: log.load().into(),
            closed_form_load: sim.scheme.closed_form_load().into(),
            all_decoded: verdicts.iter().all(|v| v.ok),
            decode: verdicts,
            transcript,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::macc1d::cwlzc_scheme;
    use crate::pda::construct_mn_pda;
    use crate::scheme::SharedLinkScheme;

    #[test]
    fn shared_link_example_message() {
        let s = SharedLinkScheme::new(construct_mn_pda(3, 2).unwrap());
        let lib = FileLibrary::for_scheme(&s, 3, 8, 1);
        let sim = Simulator::new(&s, &lib).unwrap();
        // User 0 caches packets 0 and 1 of every file.
        assert_eq!(sim.caches().segments(0), vec![0, 1]);
        let d = DemandVector::all_distinct(3, 3).unwrap();
        let (log, verdicts) = sim.run(&d, DeliveryOptions::default()).unwrap();
        assert_eq!(log.total(), 1);
        let mut want = lib.packet(0, 2).to_vec();
        xor_into(&mut want, lib.packet(1, 1));
        xor_into(&mut want, lib.packet(2, 0));
        assert_eq!(log.messages[0].payload, want);
        assert!(verdicts.iter().all(|v| v.ok));
    }

    #[test]
    fn line_example_first_round() {
        let s = cwlzc_scheme(5, 2, 2, 15).unwrap();
        let lib = FileLibrary::for_scheme(&s, 15, 16, 2);
        let sim = Simulator::new(&s, &lib).unwrap();
        let d = DemandVector::all_distinct(5, 15).unwrap();
        let (log, verdicts) = sim.run(&d, DeliveryOptions::default()).unwrap();
        let first = &log.messages[0];
        let got: Vec<(usize, usize)> = first.components.iter().map(|c| (c.user, c.segment)).collect();
        // W_{1,3} ⊕ W_{3,2} ⊕ W_{5,1} in 1-based notation.
        let mut want = vec![(0, 2), (2, 1), (4, 0)];
        want.sort_unstable();
        let mut got_sorted = got.clone();
        got_sorted.sort_unstable();
        assert_eq!(got_sorted, want);
        assert_eq!(log.load(), Rational::new(1, 3));
        assert!(verdicts.iter().all(|v| v.ok));
    }

    #[test]
    fn same_demand_never_exceeds_worst_case() {
        let s = cwlzc_scheme(5, 2, 1, 5).unwrap();
        let lib = FileLibrary::for_scheme(&s, 5, 8, 3);
        let sim = Simulator::new(&s, &lib).unwrap();
        let same = DemandVector(vec![2; 5]);
        let opts = DeliveryOptions { eliminate_redundant: true };
        let worst = measure_worst_case(&sim, &[same.clone()], opts).unwrap();
        assert_eq!(worst, s.load());
        let (_, verdicts) = sim.run(&same, opts).unwrap();
        assert!(verdicts.iter().all(|v| v.ok));
    }

    #[test]
    fn zero_memory_has_empty_caches() {
        let s = cwlzc_scheme(4, 2, 0, 4).unwrap();
        let lib = FileLibrary::for_scheme(&s, 4, 8, 4);
        let sim = Simulator::new(&s, &lib).unwrap();
        assert!((0..4).all(|n| sim.caches().packets_per_file(n) == 0));
    }

    #[test]
    fn wrong_library_size_rejected() {
        let s = cwlzc_scheme(5, 2, 2, 15).unwrap();
        let lib = FileLibrary::generate(15, 7, 8, 0);
        assert!(Simulator::new(&s, &lib).is_err());
    }
}
