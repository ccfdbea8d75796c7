//! Universal homomorphism targets: random and quadratic-residue
//! tournaments, random orientations of complete k-partite graphs, and the
//! seeded search loops that certify them.

use std::collections::HashMap;
use std::fs;
use std::io;
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::graph::{OrientedGraph, Vertex};
use crate::verify::{check_comprehensive, check_full, Certificate, VerifyError, Witness};

#[derive(Debug, Error)]
pub enum TargetError {
    #[error("BadModulus: {0} is not a prime congruent to 3 mod 4")]
    BadModulus(usize),
    #[error("NotATournament")]
    NotATournament,
    #[error("MalformedTarget: {0}")]
    Malformed(String),
    #[error("BadParameters: {0}")]
    BadParameters(String),
    #[error("NotFound after {attempts} attempts")]
    NotFound {
        attempts: usize,
        last_witness: Option<Witness>,
    },
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error("cache i/o: {0}")]
    Io(#[from] io::Error),
}

/// A complete oriented graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tournament(OrientedGraph);

impl Tournament {
    pub fn graph(&self) -> &OrientedGraph {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0.n()
    }

    pub fn into_graph(self) -> OrientedGraph {
        self.0
    }
}

impl TryFrom<OrientedGraph> for Tournament {
    type Error = TargetError;

    fn try_from(g: OrientedGraph) -> Result<Self, Self::Error> {
        if g.is_tournament() {
            Ok(Tournament(g))
        } else {
            Err(TargetError::NotATournament)
        }
    }
}

/// An orientation of the complete k-partite graph `K_{N,...,N}`. Part `i`
/// consists of the vertices `i*N .. (i+1)*N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FullKPartite {
    parts: usize,
    part_size: usize,
    graph: OrientedGraph,
}

impl FullKPartite {
    /// Validates `graph` as an orientation of `K_{N,...,N}` with `parts`
    /// contiguous parts.
    pub fn new(parts: usize, graph: OrientedGraph) -> Result<Self, TargetError> {
        if parts < 2 || !graph.n().is_multiple_of(parts) || graph.n() == 0 {
            return Err(TargetError::Malformed(format!(
                "{} vertices do not split into {parts} equal parts (k >= 2)",
                graph.n()
            )));
        }
        let part_size = graph.n() / parts;
        if let Some(&(u, v)) = graph
            .arcs()
            .iter()
            .find(|&&(u, v)| u / part_size == v / part_size)
        {
            return Err(TargetError::Malformed(format!(
                "arc ({u}, {v}) inside a part"
            )));
        }
        let expected = parts * (parts - 1) / 2 * part_size * part_size;
        if graph.arc_count() != expected {
            return Err(TargetError::Malformed(format!(
                "{} arcs, a complete {parts}-partite orientation has {expected}",
                graph.arc_count()
            )));
        }
        Ok(FullKPartite {
            parts,
            part_size,
            graph,
        })
    }

    pub fn graph(&self) -> &OrientedGraph {
        &self.graph
    }

    pub fn parts(&self) -> usize {
        self.parts
    }

    pub fn part_size(&self) -> usize {
        self.part_size
    }

    #[inline]
    pub fn part_of(&self, v: Vertex) -> usize {
        v / self.part_size
    }

    pub fn part_members(&self, i: usize) -> Range<Vertex> {
        i * self.part_size..(i + 1) * self.part_size
    }

    /// Vertices outside part `i`, ascending.
    pub fn outside(&self, i: usize) -> impl Iterator<Item = Vertex> {
        let r = self.part_members(i);
        (0..r.start).chain(r.end..self.parts * self.part_size)
    }
}

/// SplitMix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `i` under `master`: `splitmix64(master ^ splitmix64(i))`.
pub fn trial_seed(master: u64, i: u64) -> u64 {
    splitmix64(master ^ splitmix64(i))
}

/// Fair coins drawn 64 at a time from ChaCha8.
struct Coins {
    rng: ChaCha8Rng,
    word: u64,
    left: u32,
}

impl Coins {
    fn new(seed: u64) -> Self {
        Coins {
            rng: ChaCha8Rng::seed_from_u64(seed),
            word: 0,
            left: 0,
        }
    }

    fn flip(&mut self) -> bool {
        if self.left == 0 {
            self.word = self.rng.next_u64();
            self.left = 64;
        }
        let b = self.word & 1 == 1;
        self.word >>= 1;
        self.left -= 1;
        b
    }
}

/// Orients every pair `i < j` (in lexicographic order) by an independent
/// fair coin: heads gives `i -> j`.
pub fn random_tournament(n: usize, seed: u64) -> Tournament {
    let mut coins = Coins::new(seed);
    let mut arcs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            arcs.push(if coins.flip() { (i, j) } else { (j, i) });
        }
    }
    arcs.sort_unstable();
    Tournament(OrientedGraph::from_sorted_unchecked(n, arcs))
}

pub fn is_prime(p: usize) -> bool {
    if p < 2 {
        return false;
    }
    (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// The Paley tournament on `Z_p`: `i -> j` iff `j - i` is a non-zero
/// square mod `p`.
pub fn qr_tournament(p: usize) -> Result<Tournament, TargetError> {
    if !is_prime(p) || p % 4 != 3 {
        return Err(TargetError::BadModulus(p));
    }
    let mut square = vec![false; p];
    for x in 1..p {
        square[x * x % p] = true;
    }
    let mut arcs = Vec::with_capacity(p * (p - 1) / 2);
    for i in 0..p {
        for j in 0..p {
            if i != j && square[(j + p - i) % p] {
                arcs.push((i, j));
            }
        }
    }
    Ok(Tournament(OrientedGraph::from_sorted_unchecked(p, arcs)))
}

/// Orients every cross-part pair `u < v` by a fair coin.
pub fn random_full(parts: usize, part_size: usize, seed: u64) -> Result<FullKPartite, TargetError> {
    if parts < 2 || part_size == 0 {
        return Err(TargetError::BadParameters(format!(
            "need k >= 2 and N >= 1, got k = {parts}, N = {part_size}"
        )));
    }
    let n = parts * part_size;
    let mut coins = Coins::new(seed);
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in (u / part_size + 1) * part_size..n {
            arcs.push(if coins.flip() { (u, v) } else { (v, u) });
        }
    }
    arcs.sort_unstable();
    Ok(FullKPartite {
        parts,
        part_size,
        graph: OrientedGraph::from_sorted_unchecked(n, arcs),
    })
}

/// SHA-256 of the canonical edge list, hex encoded.
pub fn graph_digest(g: &OrientedGraph) -> String {
    hex::encode(Sha256::digest(g.to_edge_list().as_bytes()))
}

pub fn certificate_digest(c: &Certificate) -> String {
    hex::encode(Sha256::digest(c.to_json().as_bytes()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Candidate {
    Random { trial: usize, seed: u64 },
    QuadraticResidue { p: usize },
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub max_trials: usize,
    pub seed: u64,
    pub jobs: usize,
    /// Try the quadratic-residue tournament on the largest admissible prime
    /// `p <= n` before any random candidate.
    pub qr_first: bool,
}

impl SearchOptions {
    pub fn new(seed: u64, max_trials: usize) -> Self {
        SearchOptions {
            max_trials,
            seed,
            jobs: 1,
            qr_first: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchReport<T> {
    pub attempts: usize,
    pub seed: u64,
    pub origin: Candidate,
    pub found: T,
    pub certificate: Certificate,
    pub wall_time_ms: u128,
}

/// Random (and optionally algebraic) candidates certified with
/// [`check_comprehensive`]; the first passing candidate is returned.
pub fn find_comprehensive(
    k: usize,
    t: usize,
    n: usize,
    opts: &SearchOptions,
) -> Result<SearchReport<Tournament>, TargetError> {
    if n <= k {
        return Err(TargetError::BadParameters(format!(
            "need n > k, got n = {n}, k = {k}"
        )));
    }
    let start = Instant::now();
    let mut attempts = 0;
    let mut last_witness = None;

    let mut candidates: Vec<Candidate> = Vec::new();
    if opts.qr_first {
        if let Some(p) = (k + 1..=n).rev().find(|&p| is_prime(p) && p % 4 == 3) {
            candidates.push(Candidate::QuadraticResidue { p });
        }
    }
    candidates.extend((0..opts.max_trials).map(|trial| Candidate::Random {
        trial,
        seed: trial_seed(opts.seed, trial as u64),
    }));

    for origin in candidates {
        let tour = match origin {
            Candidate::QuadraticResidue { p } => qr_tournament(p)?,
            Candidate::Random { seed, .. } => random_tournament(n, seed),
        };
        attempts += 1;
        let certificate = check_comprehensive(tour.graph(), k, t, opts.jobs)?;
        if certificate.passed() {
            return Ok(SearchReport {
                attempts,
                seed: opts.seed,
                origin,
                found: tour,
                certificate,
                wall_time_ms: start.elapsed().as_millis(),
            });
        }
        last_witness = certificate.witness;
    }
    Err(TargetError::NotFound {
        attempts,
        last_witness,
    })
}

/// Random k-partite orientations with parts of size `part_size`, certified
/// `(k, t)`-full with [`check_full`].
pub fn find_full(
    k: usize,
    t: usize,
    part_size: usize,
    opts: &SearchOptions,
) -> Result<SearchReport<FullKPartite>, TargetError> {
    let start = Instant::now();
    let mut last_witness = None;
    for trial in 0..opts.max_trials {
        let seed = trial_seed(opts.seed, trial as u64);
        let kp = random_full(k, part_size, seed)?;
        let certificate = check_full(&kp, t, opts.jobs)?;
        if certificate.passed() {
            return Ok(SearchReport {
                attempts: trial + 1,
                seed: opts.seed,
                origin: Candidate::Random { trial, seed },
                found: kp,
                certificate,
                wall_time_ms: start.elapsed().as_millis(),
            });
        }
        last_witness = certificate.witness;
    }
    Err(TargetError::NotFound {
        attempts: opts.max_trials,
        last_witness,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetProperty {
    Comprehensive,
    Full,
}

impl TargetProperty {
    pub fn as_str(self) -> &'static str {
        match self {
            TargetProperty::Comprehensive => "comprehensive",
            TargetProperty::Full => "full",
        }
    }
}

/// Identifies a certified target. For `Full`, `n` is the part size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TargetKey {
    pub property: TargetProperty,
    pub k: usize,
    pub t: usize,
    pub n: usize,
    pub seed: u64,
}

impl TargetKey {
    fn stem(&self) -> String {
        format!(
            "{}-k{}-t{}-n{}-s{}",
            self.property.as_str(),
            self.k,
            self.t,
            self.n,
            self.seed
        )
    }
}

/// JSON sidecar stored next to a cached edge list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sidecar {
    pub schema: u32,
    pub property: TargetProperty,
    pub k: usize,
    pub t: usize,
    pub n: usize,
    pub seed: u64,
    pub origin: Candidate,
    pub target_digest: String,
    pub certificate_digest: String,
}

/// A target together with the certificate that admitted it.
#[derive(Clone, Debug)]
pub struct CertifiedTarget {
    pub key: TargetKey,
    pub graph: OrientedGraph,
    pub sidecar: Sidecar,
}

impl CertifiedTarget {
    pub fn digest(&self) -> &str {
        &self.sidecar.target_digest
    }

    pub fn tournament(&self) -> Result<Tournament, TargetError> {
        Tournament::try_from(self.graph.clone())
    }

    pub fn full(&self) -> Result<FullKPartite, TargetError> {
        FullKPartite::new(self.key.k, self.graph.clone())
    }
}

/// Edge list plus sidecar per target, in one directory.
#[derive(Clone, Debug)]
pub struct TargetCache {
    dir: PathBuf,
}

impl TargetCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        TargetCache { dir: dir.into() }
    }

    /// `$ORIKIT_CACHE`, or `./.orikit-cache`.
    pub fn from_env() -> Self {
        Self::new(
            std::env::var_os("ORIKIT_CACHE")
                .map_or_else(|| PathBuf::from(".orikit-cache"), PathBuf::from),
        )
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn paths(&self, key: &TargetKey) -> (PathBuf, PathBuf) {
        let stem = key.stem();
        (
            self.dir.join(format!("{stem}.arcs")),
            self.dir.join(format!("{stem}.json")),
        )
    }

    /// Returns the cached target if both files exist and the edge list
    /// still matches the recorded digest.
    pub fn load(&self, key: &TargetKey) -> Option<CertifiedTarget> {
        let (arcs, side) = self.paths(key);
        let sidecar: Sidecar = serde_json::from_str(&fs::read_to_string(side).ok()?).ok()?;
        let graph = OrientedGraph::parse(&fs::read_to_string(arcs).ok()?).ok()?;
        if graph_digest(&graph) != sidecar.target_digest {
            return None;
        }
        Some(CertifiedTarget {
            key: *key,
            graph,
            sidecar,
        })
    }

    pub fn store(&self, target: &CertifiedTarget) -> io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let (arcs, side) = self.paths(&target.key);
        fs::write(arcs, target.graph.to_edge_list())?;
        let json = serde_json::to_string_pretty(&target.sidecar).map_err(io::Error::other)?;
        fs::write(side, json + "\n")
    }
}

/// Supplies certified targets to the colouring pipelines: memory first,
/// then the disk cache, then a fresh seeded search.
pub struct TargetProvider {
    pub options: SearchOptions,
    cache: Option<TargetCache>,
    memo: Mutex<HashMap<TargetKey, Arc<CertifiedTarget>>>,
}

impl TargetProvider {
    pub fn new(options: SearchOptions, cache: Option<TargetCache>) -> Self {
        TargetProvider {
            options,
            cache,
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn comprehensive(
        &self,
        k: usize,
        t: usize,
        n: usize,
    ) -> Result<Arc<CertifiedTarget>, TargetError> {
        let key = TargetKey {
            property: TargetProperty::Comprehensive,
            k,
            t,
            n,
            seed: self.options.seed,
        };
        self.obtain(key, || {
            let r = find_comprehensive(k, t, n, &self.options)?;
            Ok((r.found.into_graph(), r.origin, r.certificate))
        })
    }

    pub fn full(
        &self,
        k: usize,
        t: usize,
        part_size: usize,
    ) -> Result<Arc<CertifiedTarget>, TargetError> {
        let key = TargetKey {
            property: TargetProperty::Full,
            k,
            t,
            n: part_size,
            seed: self.options.seed,
        };
        self.obtain(key, || {
            let r = find_full(k, t, part_size, &self.options)?;
            Ok((r.found.graph, r.origin, r.certificate))
        })
    }

    fn obtain<F>(&self, key: TargetKey, search: F) -> Result<Arc<CertifiedTarget>, TargetError>
    where
        F: FnOnce() -> Result<(OrientedGraph, Candidate, Certificate), TargetError>,
    {
        if let Some(hit) = self.memo.lock().expect("memo lock").get(&key) {
            return Ok(hit.clone());
        }
        let target = match self.cache.as_ref().and_then(|c| c.load(&key)) {
            Some(t) => t,
            None => {
                let (graph, origin, certificate) = search()?;
                let target = CertifiedTarget {
                    key,
                    sidecar: Sidecar {
                        schema: 1,
                        property: key.property,
                        k: key.k,
                        t: key.t,
                        n: key.n,
                        seed: key.seed,
                        origin,
                        target_digest: graph_digest(&graph),
                        certificate_digest: certificate_digest(&certificate),
                    },
                    graph,
                };
                if let Some(c) = &self.cache {
                    c.store(&target)?;
                }
                target
            }
        };
        let target = Arc::new(target);
        self.memo
            .lock()
            .expect("memo lock")
            .insert(key, target.clone());
        Ok(target)
    }
}
