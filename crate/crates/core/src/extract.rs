//! End-to-end witness extraction and machine-checkable certificates.
//!
//! The direct strategy backtracks over candidate sequences ordered by total,
//! so the first hit has the smallest maximal subset sum. The trace strategy
//! replays the layered construction instead: color every nonempty subset `B`
//! by the class of its alternating sum, find a set `K` whose multiple-of-4
//! layers are each monochromatic, read those layer classes as a coloring of
//! a quotient interval, solve the shorter problem there, and realize the
//! resulting sequence as alternating sums of blocks laid out inside `K`.
//! Every claim the pipeline relies on is recorded in the certificate and can
//! be re-derived from the coloring alone by [`check_certificate`].

use crate::altsum::{alt_sum, build_blocks, combine, BlockError};
use crate::coloring::{scale_witness, verify_witness, ClassId, GroundColoring, SumsetWitness};
use crate::comb::for_each_combination_of;
use crate::numbers::{compute_number, SearchError, SearchProblem};
use crate::search::{find_witness, WitnessQuery};
use crate::set::FiniteSet;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::ops::ControlFlow;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExtractError {
    #[error("subset is empty")]
    EmptySubset,
    #[error("subset reaches {max}, outside the ground interval 1..={n_max}")]
    SubsetOutOfRange { max: u64, n_max: u64 },
    #[error("layer {0} is zero or exceeds the requested set size")]
    BadLayer(u64),
    #[error("layer {0} has subsets of more than one class")]
    LayerNotMonochromatic(u64),
}

/// Failure report from [`extract_witness`], naming the stage that failed.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExtractFailure {
    #[error("no witness with total <= {total_cap} exists for length {n}")]
    NoWitnessWithinCaps { n: usize, total_cap: u64 },
    #[error("layered set search {}", if *.exhausted { "proved no candidate exists" } else { "hit the candidate cap" })]
    LayeredKNotFound { exhausted: bool },
    #[error("inner exact number exceeded its cap {cap}")]
    InnerBoundExceedsCap { cap: u64 },
    #[error("inner exact number search failed: {0}")]
    InnerBound(SearchError),
    #[error("inner witness search failed on the quotient interval")]
    InnerWitnessNotFound,
    #[error("layer scan after the set search failed: {0}")]
    LayerScan(ExtractError),
    #[error("block layout failed: {0}")]
    Blocks(BlockError),
}

/// Resource limits for extraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractCaps {
    /// Largest total tried by the direct strategy (defaults to `n_max`).
    pub direct_total: Option<u64>,
    /// Candidate sets examined by the layered search before giving up.
    pub k_candidates: u64,
    /// Cap handed to the inner exact-number computation.
    pub inner_cap: u64,
    /// Node budget handed to the inner exact-number computation.
    pub inner_budget: u64,
    /// Seed for the randomized candidate passes of the layered search.
    pub seed: u64,
    /// Override for the constrained layer set of the layered search.
    pub layer_override: Option<Vec<u64>>,
}

impl Default for ExtractCaps {
    fn default() -> Self {
        ExtractCaps {
            direct_total: None,
            k_candidates: 1_000_000,
            inner_cap: 64,
            inner_budget: 100_000_000,
            seed: 0,
            layer_override: None,
        }
    }
}

/// Extraction strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Direct,
    ProofTrace,
}

#[derive(Serialize, Deserialize)]
struct LayerColoringRepr {
    size: u64,
    class: ClassId,
}

/// Classes of the multiple-of-4 layers `4, 8, .., 4*inner_bound`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<LayerColoringRepr>", into = "Vec<LayerColoringRepr>")]
pub struct LayerColoring {
    classes: Vec<ClassId>,
}

impl LayerColoring {
    /// Builds from `(size, class)` pairs, which must be exactly the multiples
    /// of 4 up to the largest one given.
    pub fn new(mut pairs: Vec<(u64, ClassId)>) -> Result<Self, ExtractError> {
        pairs.sort_unstable();
        for (i, &(size, _)) in pairs.iter().enumerate() {
            if size != 4 * (i as u64 + 1) {
                return Err(ExtractError::BadLayer(size));
            }
        }
        if pairs.is_empty() {
            return Err(ExtractError::BadLayer(0));
        }
        Ok(LayerColoring {
            classes: pairs.into_iter().map(|(_, c)| c).collect(),
        })
    }

    pub fn class_of_layer(&self, size: u64) -> Option<ClassId> {
        if size == 0 || !size.is_multiple_of(4) {
            return None;
        }
        let idx = (size / 4 - 1) as usize;
        self.classes.get(idx).copied()
    }

    pub fn max_layer(&self) -> u64 {
        4 * self.classes.len() as u64
    }

    /// The quotient bound: the number of layers.
    pub fn inner_bound(&self) -> u64 {
        self.classes.len() as u64
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, ClassId)> + '_ {
        self.classes
            .iter()
            .enumerate()
            .map(|(i, &c)| (4 * (i as u64 + 1), c))
    }
}

impl TryFrom<Vec<LayerColoringRepr>> for LayerColoring {
    type Error = ExtractError;

    fn try_from(reprs: Vec<LayerColoringRepr>) -> Result<Self, ExtractError> {
        LayerColoring::new(reprs.into_iter().map(|r| (r.size, r.class)).collect())
    }
}

impl From<LayerColoring> for Vec<LayerColoringRepr> {
    fn from(lc: LayerColoring) -> Vec<LayerColoringRepr> {
        lc.iter()
            .map(|(size, class)| LayerColoringRepr { size, class })
            .collect()
    }
}

/// One recorded fact per nonempty index subset of the witness entries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditEntry {
    /// Selected 1-based entry indices.
    #[serde(rename = "I")]
    pub indices: Vec<u32>,
    /// The combined set realizing this selection (trace strategy only).
    #[serde(rename = "M", skip_serializing_if = "Option::is_none", default)]
    pub set: Option<FiniteSet>,
    /// The selection's subset sum; for the trace strategy this equals the
    /// alternating sum of `set`.
    #[serde(rename = "f")]
    pub sum: u64,
    /// Class of `sum` under the ground coloring.
    pub class: ClassId,
}

/// Block layout summary recorded in trace certificates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSummary {
    pub b: Vec<u64>,
    pub a: Vec<u64>,
    #[serde(rename = "P1")]
    pub p1: FiniteSet,
    #[serde(rename = "P2")]
    pub p2: FiniteSet,
}

/// A witness with enough recorded facts to re-check the extraction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub strategy: Strategy,
    pub witness: SumsetWitness,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k_set: Option<FiniteSet>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub layer_classes: Option<LayerColoring>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub inner_witness: Option<SumsetWitness>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub blocks: Option<BlockSummary>,
    pub audits: Vec<AuditEntry>,
}

/// First violated record of a certificate check.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum CertViolation {
    #[error("witness does not verify against the coloring")]
    WitnessFails,
    #[error("expected {expected} audit entries, found {found}")]
    AuditCount { expected: u64, found: usize },
    #[error("audit {0}: duplicate or out-of-range index set")]
    AuditIndices(usize),
    #[error("audit {0}: recorded sum differs from the selected entries")]
    AuditSum(usize),
    #[error("audit {0}: recorded class differs from the coloring")]
    AuditClass(usize),
    #[error("audit {0}: recorded set is not inside the layered set")]
    AuditSetOutside(usize),
    #[error("audit {0}: alternating sum of the recorded set differs")]
    AuditAltSum(usize),
    #[error("audit {0}: order of the recorded set is not a layer of class ell")]
    AuditLayerMembership(usize),
    #[error("audit {0}: missing recorded set")]
    AuditSetMissing(usize),
    #[error("trace field {0} is missing")]
    MissingTraceField(&'static str),
    #[error("layered set leaves the ground interval")]
    KSetOutOfRange,
    #[error("layer {0}: subsets of the layered set are not monochromatic in the recorded class")]
    LayerClassWrong(u64),
    #[error("inner witness length must be one less than the witness length")]
    InnerWitnessLength,
    #[error("inner witness class differs from the witness class")]
    InnerWitnessClass,
    #[error("inner witness subset sum {0} is not a recorded layer of class ell")]
    InnerWitnessSum(u64),
    #[error("block part sizes differ from the inner witness entries")]
    BlockSizesMismatch,
    #[error("block base is not inside the layered set")]
    BlockBaseOutside,
    #[error("block layout does not rebuild: {0}")]
    BlockRebuild(String),
    #[error("witness entry {0} differs from its block value")]
    WitnessEntryNotBlockValue(usize),
    #[error("certificate too large to re-check exhaustively")]
    CheckInfeasible,
}

/// Class of the alternating sum of `subset` under the coloring; total on
/// nonempty subsets of the ground interval.
pub fn induced_subset_class(
    gc: &GroundColoring,
    subset: &FiniteSet,
) -> Result<ClassId, ExtractError> {
    if subset.is_empty() {
        return Err(ExtractError::EmptySubset);
    }
    let max = subset.max_elem().unwrap();
    if max > gc.n_max() {
        return Err(ExtractError::SubsetOutOfRange {
            max,
            n_max: gc.n_max(),
        });
    }
    let value = alt_sum(subset).expect("nonempty subset");
    Ok(gc.class_of(value).expect("value stays in range"))
}

/// Outcome of the layered-set search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KSearchOutcome {
    Found {
        k_set: FiniteSet,
        /// Classes of the constrained layers, in layer order.
        classes: Vec<(u64, ClassId)>,
    },
    /// `exhausted` distinguishes a full enumeration (no candidate exists)
    /// from giving up at the candidate cap.
    NotFound { exhausted: bool },
}

/// Searches for a `size`-subset of the ground interval whose `layers`-sized
/// subsets are each monochromatic under the induced coloring. A few seeded
/// greedy passes (skipping conflicting elements) run first, then systematic
/// backtracking, counting candidates against `cap`.
pub fn find_layered_k(
    gc: &GroundColoring,
    size: u64,
    layers: &[u64],
    cap: u64,
    seed: u64,
) -> Result<KSearchOutcome, ExtractError> {
    let mut layers = layers.to_vec();
    layers.sort_unstable();
    layers.dedup();
    if let Some(&bad) = layers.iter().find(|&&j| j == 0 || j > size) {
        return Err(ExtractError::BadLayer(bad));
    }
    if size > gc.n_max() || size == 0 {
        // No candidate sets at all, so exhaustion is immediate.
        return Ok(KSearchOutcome::NotFound { exhausted: true });
    }

    // Greedy passes: scan the elements in seeded order, keep an element when
    // every newly completed layer subset agrees with the layer class seen so
    // far, and skip it otherwise. The first pass uses increasing order.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all: Vec<u64> = (1..=gc.n_max()).collect();
    for pass in 0..4 {
        let mut order = all.clone();
        if pass > 0 {
            order.shuffle(&mut rng);
        }
        let mut chosen: Vec<u64> = Vec::with_capacity(size as usize);
        let mut classes: Vec<Option<ClassId>> = vec![None; layers.len()];
        for &candidate in &order {
            let mut trial = chosen.clone();
            let pos = trial.partition_point(|&e| e < candidate);
            trial.insert(pos, candidate);
            let mut trial_classes = classes.clone();
            if layers_consistent(gc, &trial, candidate, &layers, &mut trial_classes) {
                chosen = trial;
                classes = trial_classes;
                if chosen.len() as u64 == size {
                    break;
                }
            }
        }
        if chosen.len() as u64 == size {
            let k_set = FiniteSet::new(chosen).expect("chosen is sorted");
            let found = layer_classes_for(gc, &k_set, &layers)?;
            return Ok(KSearchOutcome::Found {
                k_set,
                classes: found,
            });
        }
    }

    // Systematic backtracking over increasing element choices.
    let mut chosen: Vec<u64> = Vec::with_capacity(size as usize);
    let mut classes: Vec<Option<ClassId>> = vec![None; layers.len()];
    let mut candidates = 0u64;
    match backtrack(
        gc,
        size,
        &layers,
        &mut chosen,
        &mut classes,
        1,
        cap,
        &mut candidates,
    ) {
        BacktrackResult::Found => {
            let k_set = FiniteSet::new(chosen).expect("chosen is sorted");
            let found = layer_classes_for(gc, &k_set, &layers)?;
            Ok(KSearchOutcome::Found {
                k_set,
                classes: found,
            })
        }
        BacktrackResult::Exhausted => Ok(KSearchOutcome::NotFound { exhausted: true }),
        BacktrackResult::CapReached => Ok(KSearchOutcome::NotFound { exhausted: false }),
    }
}

enum BacktrackResult {
    Found,
    Exhausted,
    CapReached,
}

#[allow(clippy::too_many_arguments)]
fn backtrack(
    gc: &GroundColoring,
    size: u64,
    layers: &[u64],
    chosen: &mut Vec<u64>,
    classes: &mut [Option<ClassId>],
    next: u64,
    cap: u64,
    candidates: &mut u64,
) -> BacktrackResult {
    if chosen.len() as u64 == size {
        return BacktrackResult::Found;
    }
    let still_needed = size - chosen.len() as u64;
    let mut e = next;
    while e <= gc.n_max() && gc.n_max() - e + 1 >= still_needed {
        *candidates += 1;
        if *candidates > cap {
            return BacktrackResult::CapReached;
        }
        chosen.push(e);
        let mut trial_classes = classes.to_vec();
        if layers_consistent(gc, chosen, e, layers, &mut trial_classes) {
            let before = classes.to_vec();
            classes.copy_from_slice(&trial_classes);
            match backtrack(gc, size, layers, chosen, classes, e + 1, cap, candidates) {
                BacktrackResult::Exhausted => {}
                done => return done,
            }
            classes.copy_from_slice(&before);
        }
        chosen.pop();
        e += 1;
    }
    BacktrackResult::Exhausted
}

/// Checks every layer subset completed by `newest` against the layer classes,
/// filling in classes seen for the first time.
fn layers_consistent(
    gc: &GroundColoring,
    chosen: &[u64],
    newest: u64,
    layers: &[u64],
    classes: &mut [Option<ClassId>],
) -> bool {
    let others: Vec<u64> = chosen.iter().copied().filter(|&e| e != newest).collect();
    for (li, &layer) in layers.iter().enumerate() {
        let j = layer as usize;
        if chosen.len() < j {
            continue;
        }
        // New j-subsets are exactly those containing the newest element.
        let mut ok = true;
        let _ = for_each_combination_of(&others, j - 1, |rest| {
            let mut subset: Vec<u64> = rest.to_vec();
            let pos = subset.partition_point(|&e| e < newest);
            subset.insert(pos, newest);
            let set = FiniteSet::new(subset).expect("sorted subset");
            let class = induced_subset_class(gc, &set).expect("subset of the ground interval");
            match classes[li] {
                None => {
                    classes[li] = Some(class);
                    ControlFlow::Continue(())
                }
                Some(prev) if prev == class => ControlFlow::Continue(()),
                Some(_) => {
                    ok = false;
                    ControlFlow::Break(())
                }
            }
        });
        if !ok {
            return false;
        }
    }
    true
}

/// Scans every `layers` subset of `k_set`, returning the class per layer or
/// an error if some layer is not monochromatic.
fn layer_classes_for(
    gc: &GroundColoring,
    k_set: &FiniteSet,
    layers: &[u64],
) -> Result<Vec<(u64, ClassId)>, ExtractError> {
    let mut out = Vec::with_capacity(layers.len());
    for &layer in layers {
        let mut class: Option<ClassId> = None;
        let mut conflict = false;
        let _ = for_each_combination_of(k_set.elems(), layer as usize, |subset| {
            let set = FiniteSet::new(subset.to_vec()).expect("sorted subset");
            let c = induced_subset_class(gc, &set).expect("inside ground interval");
            match class {
                None => {
                    class = Some(c);
                    ControlFlow::Continue(())
                }
                Some(prev) if prev == c => ControlFlow::Continue(()),
                Some(_) => {
                    conflict = true;
                    ControlFlow::Break(())
                }
            }
        });
        if conflict {
            return Err(ExtractError::LayerNotMonochromatic(layer));
        }
        out.push((layer, class.ok_or(ExtractError::BadLayer(layer))?));
    }
    Ok(out)
}

fn audit_entries(
    gc: &GroundColoring,
    witness: &SumsetWitness,
    sets: Option<&[FiniteSet]>,
) -> Vec<AuditEntry> {
    let n = witness.len();
    let mut audits = Vec::with_capacity((1usize << n) - 1);
    for mask in 1u32..1 << n {
        let indices: Vec<u32> = (1..=n as u32).filter(|i| mask >> (i - 1) & 1 == 1).collect();
        let sum: u64 = indices
            .iter()
            .map(|&i| witness.entries()[i as usize - 1])
            .sum();
        audits.push(AuditEntry {
            indices,
            set: sets.map(|s| s[mask as usize - 1].clone()),
            sum,
            class: gc.class_of(sum).expect("verified witness sums stay in range"),
        });
    }
    audits
}

/// Extracts a verified witness of length `n` from the coloring, emitting a
/// certificate. The trace strategy needs `n >= 3`; shorter lengths fall back
/// to the direct search (which is also its recursion base).
pub fn extract_witness(
    gc: &GroundColoring,
    n: usize,
    strategy: Strategy,
    caps: &ExtractCaps,
) -> Result<Certificate, ExtractFailure> {
    assert!(n >= 1, "witness length must be positive");
    assert!(n <= MAX_WITNESS_LEN, "certificate audits materialize 2^n entries");
    match strategy {
        Strategy::Direct => direct_extract(gc, n, caps),
        Strategy::ProofTrace if n < 3 => direct_extract(gc, n, caps),
        Strategy::ProofTrace => trace_extract(gc, n, caps),
    }
}

fn direct_witness(
    gc: &GroundColoring,
    n: usize,
    total_cap: u64,
) -> Result<SumsetWitness, ExtractFailure> {
    // Ascending totals, so the first hit has the least maximal subset sum.
    for total in n as u64..=total_cap {
        let found = find_witness(&WitnessQuery {
            assign: gc.assign(),
            n,
            distinct: false,
            exact_total: Some(total),
            total_cap,
        });
        if let Some(entries) = found {
            let ell = gc.class_of(total).expect("total is in range");
            return Ok(SumsetWitness::new(entries, ell).expect("entries are positive"));
        }
    }
    Err(ExtractFailure::NoWitnessWithinCaps { n, total_cap })
}

fn direct_extract(
    gc: &GroundColoring,
    n: usize,
    caps: &ExtractCaps,
) -> Result<Certificate, ExtractFailure> {
    let total_cap = caps.direct_total.unwrap_or(gc.n_max()).min(gc.n_max());
    let witness = direct_witness(gc, n, total_cap)?;
    debug_assert!(verify_witness(gc, &witness));
    let audits = audit_entries(gc, &witness, None);
    Ok(Certificate {
        strategy: Strategy::Direct,
        witness,
        k_set: None,
        layer_classes: None,
        inner_witness: None,
        blocks: None,
        audits,
    })
}

fn trace_extract(
    gc: &GroundColoring,
    n: usize,
    caps: &ExtractCaps,
) -> Result<Certificate, ExtractFailure> {
    // Inner bound: the exact number for length n - 1, so the quotient
    // interval below is guaranteed to contain an inner witness.
    let inner_outcome = compute_number(&SearchProblem {
        t: gc.t(),
        n: n - 1,
        distinct: false,
        cap: caps.inner_cap,
        budget: caps.inner_budget,
    })
    .map_err(ExtractFailure::InnerBound)?;
    let inner_bound = inner_outcome
        .value
        .ok_or(ExtractFailure::InnerBoundExceedsCap { cap: caps.inner_cap })?;

    let size = 4 * inner_bound;
    let full_layers: Vec<u64> = (1..=inner_bound).map(|i| 4 * i).collect();
    let search_layers = caps.layer_override.as_deref().unwrap_or(&full_layers);
    let k_set = match find_layered_k(gc, size, search_layers, caps.k_candidates, caps.seed)
        .map_err(ExtractFailure::LayerScan)?
    {
        KSearchOutcome::Found { k_set, .. } => k_set,
        KSearchOutcome::NotFound { exhausted } => {
            return Err(ExtractFailure::LayeredKNotFound { exhausted })
        }
    };

    // Classes of every multiple-of-4 layer, re-derived by full scan.
    let pairs = layer_classes_for(gc, &k_set, &full_layers).map_err(ExtractFailure::LayerScan)?;
    let layer_classes = LayerColoring::new(pairs).expect("full_layers are multiples of 4");

    // The layer classes, read at 4, 8, .., 4*inner_bound, color the quotient
    // interval {1..=inner_bound}; solve the shorter problem there.
    let inner_assign: Vec<ClassId> = full_layers
        .iter()
        .map(|&s| layer_classes.class_of_layer(s).expect("layer present"))
        .collect();
    let inner_gc = GroundColoring::new(gc.t(), inner_assign).expect("valid classes");
    let quotient_witness =
        direct_witness(&inner_gc, n - 1, inner_gc.n_max()).map_err(|_| {
            ExtractFailure::InnerWitnessNotFound
        })?;
    debug_assert!(verify_witness(&inner_gc, &quotient_witness));
    let inner_witness =
        scale_witness(&quotient_witness, 4).expect("scaled entries stay within u64");

    let bs = build_blocks(k_set.elems(), inner_witness.entries())
        .map_err(ExtractFailure::Blocks)?;
    let values = bs.block_values();
    let witness = SumsetWitness::new(values, inner_witness.class()).expect("positive values");
    debug_assert!(verify_witness(gc, &witness));

    // Materialize each combined set for the audit trail.
    let n_blocks = bs.n_blocks();
    let mut sets = Vec::with_capacity((1usize << n_blocks) - 1);
    for mask in 1u32..1 << n_blocks {
        let indices: BTreeSet<usize> =
            (1..=n_blocks).filter(|i| mask >> (i - 1) & 1 == 1).collect();
        sets.push(combine(&bs, &indices).expect("valid index set"));
    }
    let audits = audit_entries(gc, &witness, Some(&sets));

    Ok(Certificate {
        strategy: Strategy::ProofTrace,
        witness,
        k_set: Some(k_set),
        layer_classes: Some(layer_classes),
        inner_witness: Some(inner_witness),
        blocks: Some(BlockSummary {
            b: bs.base().to_vec(),
            a: bs.part_sizes().to_vec(),
            p1: bs.p1().clone(),
            p2: bs.p2().clone(),
        }),
        audits,
    })
}

/// Longest witness whose audit trail (2^n - 1 entries) is materialized.
pub const MAX_WITNESS_LEN: usize = 20;

/// Cost guard for the layer rescans of [`check_certificate`].
const CHECK_SCAN_LIMIT: u64 = 20_000_000;

/// Recomputes every recorded fact of the certificate from the coloring
/// alone. `Ok(())` means all records check out; the error names the first
/// violated record.
pub fn check_certificate(gc: &GroundColoring, cert: &Certificate) -> Result<(), CertViolation> {
    if !verify_witness(gc, &cert.witness) {
        return Err(CertViolation::WitnessFails);
    }
    let n = cert.witness.len();
    if n > MAX_WITNESS_LEN {
        return Err(CertViolation::CheckInfeasible);
    }
    let expected = (1u64 << n) - 1;
    if cert.audits.len() as u64 != expected {
        return Err(CertViolation::AuditCount {
            expected,
            found: cert.audits.len(),
        });
    }
    let mut seen = vec![false; expected as usize];
    for (i, audit) in cert.audits.iter().enumerate() {
        let mut mask = 0u64;
        for &idx in &audit.indices {
            if idx == 0 || idx as usize > n {
                return Err(CertViolation::AuditIndices(i));
            }
            mask |= 1 << (idx - 1);
        }
        if mask == 0 || mask.count_ones() as usize != audit.indices.len() {
            return Err(CertViolation::AuditIndices(i));
        }
        if std::mem::replace(&mut seen[mask as usize - 1], true) {
            return Err(CertViolation::AuditIndices(i));
        }
        let sum: u64 = audit
            .indices
            .iter()
            .map(|&idx| cert.witness.entries()[idx as usize - 1])
            .sum();
        if sum != audit.sum {
            return Err(CertViolation::AuditSum(i));
        }
        if gc.class_of(sum) != Some(audit.class) || audit.class != cert.witness.class() {
            return Err(CertViolation::AuditClass(i));
        }
    }

    match cert.strategy {
        Strategy::Direct => Ok(()),
        Strategy::ProofTrace => check_trace(gc, cert),
    }
}

fn check_trace(gc: &GroundColoring, cert: &Certificate) -> Result<(), CertViolation> {
    let k_set = cert
        .k_set
        .as_ref()
        .ok_or(CertViolation::MissingTraceField("k_set"))?;
    let layer_classes = cert
        .layer_classes
        .as_ref()
        .ok_or(CertViolation::MissingTraceField("layer_classes"))?;
    let inner_witness = cert
        .inner_witness
        .as_ref()
        .ok_or(CertViolation::MissingTraceField("inner_witness"))?;
    let blocks = cert
        .blocks
        .as_ref()
        .ok_or(CertViolation::MissingTraceField("blocks"))?;
    let ell = cert.witness.class();

    if k_set.is_empty() || k_set.max_elem().is_some_and(|m| m > gc.n_max()) {
        return Err(CertViolation::KSetOutOfRange);
    }

    // Every recorded layer class, re-derived by full scan of the set.
    let mut scan_cost = 0u64;
    for (size, _) in layer_classes.iter() {
        scan_cost = scan_cost.saturating_add(
            crate::comb::binomial(k_set.len() as u64, size).unwrap_or(u64::MAX),
        );
    }
    if scan_cost > CHECK_SCAN_LIMIT {
        return Err(CertViolation::CheckInfeasible);
    }
    for (size, class) in layer_classes.iter() {
        if size > k_set.len() as u64 {
            return Err(CertViolation::LayerClassWrong(size));
        }
        let pairs = layer_classes_for(gc, k_set, &[size])
            .map_err(|_| CertViolation::LayerClassWrong(size))?;
        if pairs[0].1 != class {
            return Err(CertViolation::LayerClassWrong(size));
        }
    }

    // The inner witness lives on the multiple-of-4 layers: every subset sum
    // of its entries must be a recorded layer of class ell.
    if inner_witness.len() + 1 != cert.witness.len() {
        return Err(CertViolation::InnerWitnessLength);
    }
    if inner_witness.class() != ell {
        return Err(CertViolation::InnerWitnessClass);
    }
    let entries = inner_witness.entries();
    for mask in 1u32..1 << entries.len() {
        let sum: u64 = entries
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .sum();
        if layer_classes.class_of_layer(sum) != Some(ell) {
            return Err(CertViolation::InnerWitnessSum(sum));
        }
    }

    // Rebuild the block layout from the recorded base and part sizes.
    if blocks.a != *inner_witness.entries() {
        return Err(CertViolation::BlockSizesMismatch);
    }
    let base_set = FiniteSet::new(blocks.b.clone())
        .map_err(|e| CertViolation::BlockRebuild(e.to_string()))?;
    if !base_set.is_subset_of(k_set) {
        return Err(CertViolation::BlockBaseOutside);
    }
    let bs = build_blocks(&blocks.b, &blocks.a)
        .map_err(|e| CertViolation::BlockRebuild(e.to_string()))?;
    if bs.p1() != &blocks.p1 || bs.p2() != &blocks.p2 {
        return Err(CertViolation::BlockRebuild("P1/P2 differ".to_string()));
    }
    let values = bs.block_values();
    if values.len() != cert.witness.len() {
        return Err(CertViolation::BlockRebuild(format!(
            "{} blocks for {} witness entries",
            values.len(),
            cert.witness.len()
        )));
    }
    for (i, (&v, &w)) in values.iter().zip(cert.witness.entries()).enumerate() {
        if v != w {
            return Err(CertViolation::WitnessEntryNotBlockValue(i + 1));
        }
    }

    // Per-selection records: the recorded set realizes the selection's sum as
    // an alternating sum, inside the layered set, at an order whose layer
    // carries class ell.
    for (i, audit) in cert.audits.iter().enumerate() {
        let set = audit.set.as_ref().ok_or(CertViolation::AuditSetMissing(i))?;
        if !set.is_subset_of(k_set) {
            return Err(CertViolation::AuditSetOutside(i));
        }
        if alt_sum(set) != Ok(audit.sum) {
            return Err(CertViolation::AuditAltSum(i));
        }
        if layer_classes.class_of_layer(set.len() as u64) != Some(ell) {
            return Err(CertViolation::AuditLayerMembership(i));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fset;

    fn gc(t: u32, assign: &[ClassId]) -> GroundColoring {
        GroundColoring::new(t, assign.to_vec()).unwrap()
    }

    #[test]
    fn induced_class_examples() {
        let c = gc(2, &[1, 2, 2, 1]);
        assert_eq!(induced_subset_class(&c, &fset![2, 3]).unwrap(), 1);
        assert_eq!(induced_subset_class(&c, &fset![3]).unwrap(), 2);
        let one = GroundColoring::constant(6, 1, 1).unwrap();
        assert_eq!(induced_subset_class(&one, &fset![1, 5]).unwrap(), 1);
        assert_eq!(
            induced_subset_class(&c, &fset![2, 5]),
            Err(ExtractError::SubsetOutOfRange { max: 5, n_max: 4 })
        );
        assert_eq!(
            induced_subset_class(&c, &FiniteSet::empty()),
            Err(ExtractError::EmptySubset)
        );
    }

    #[test]
    fn layered_search_single_class() {
        let c = GroundColoring::constant(12, 1, 1).unwrap();
        match find_layered_k(&c, 8, &[4, 8], 10_000, 0).unwrap() {
            KSearchOutcome::Found { k_set, classes } => {
                assert_eq!(k_set, fset![1, 2, 3, 4, 5, 6, 7, 8]);
                assert_eq!(classes, vec![(4, 1), (8, 1)]);
            }
            other => panic!("expected a hit, got {other:?}"),
        }
    }

    #[test]
    fn layered_search_size_too_large() {
        let c = GroundColoring::constant(6, 1, 1).unwrap();
        assert_eq!(
            find_layered_k(&c, 8, &[4, 8], 10_000, 0).unwrap(),
            KSearchOutcome::NotFound { exhausted: true }
        );
    }

    /// Test-only oracle: classes of every `layer`-subset of `k`.
    fn scan_layer(gc: &GroundColoring, k: &FiniteSet, layer: usize) -> BTreeSet<ClassId> {
        let mut classes = BTreeSet::new();
        let _ = for_each_combination_of(k.elems(), layer, |subset| {
            let set = FiniteSet::new(subset.to_vec()).unwrap();
            classes.insert(induced_subset_class(gc, &set).unwrap());
            ControlFlow::Continue(())
        });
        classes
    }

    #[test]
    fn layered_search_with_one_exceptional_class() {
        // Only the top element is colored differently; alternating sums of
        // sets with at least two elements never reach the maximum, so every
        // candidate works. The returned set is re-checked by direct scan.
        let mut assign = vec![1; 12];
        assign[11] = 2;
        let c = GroundColoring::new(2, assign).unwrap();
        match find_layered_k(&c, 8, &[4, 8], 100_000, 0).unwrap() {
            KSearchOutcome::Found { k_set, classes } => {
                assert_eq!(scan_layer(&c, &k_set, 4), BTreeSet::from([1]));
                assert_eq!(scan_layer(&c, &k_set, 8), BTreeSet::from([1]));
                assert_eq!(classes, vec![(4, 1), (8, 1)]);
            }
            other => panic!("expected a hit, got {other:?}"),
        }
    }

    #[test]
    fn layered_search_exhaustion_matches_oracle() {
        // Element 2 is exceptional on {1..=9}: every 8-subset has layer-4
        // subsets of both classes. The oracle enumerates all nine candidates
        // by direct scan; the search must agree and report exhaustion.
        let mut assign = vec![1; 9];
        assign[1] = 2;
        let c = GroundColoring::new(2, assign).unwrap();
        let mut oracle_found = false;
        for skip in 1..=9u64 {
            let elems: Vec<u64> = (1..=9).filter(|&e| e != skip).collect();
            let k = FiniteSet::new(elems).unwrap();
            if scan_layer(&c, &k, 4).len() == 1 && scan_layer(&c, &k, 8).len() == 1 {
                oracle_found = true;
            }
        }
        assert!(!oracle_found);
        assert_eq!(
            find_layered_k(&c, 8, &[4, 8], 100_000, 0).unwrap(),
            KSearchOutcome::NotFound { exhausted: true }
        );
    }

    #[test]
    fn direct_extract_minimal_total() {
        let c = GroundColoring::constant(6, 1, 1).unwrap();
        let cert = extract_witness(&c, 2, Strategy::Direct, &ExtractCaps::default()).unwrap();
        assert_eq!(cert.witness.entries(), &[1, 1]);
        assert_eq!(cert.audits.len(), 3);
        assert!(check_certificate(&c, &cert).is_ok());
    }

    #[test]
    fn direct_extract_failure_report() {
        let c = gc(2, &[1, 2, 2, 1]);
        let err = extract_witness(&c, 2, Strategy::Direct, &ExtractCaps::default()).unwrap_err();
        assert_eq!(
            err,
            ExtractFailure::NoWitnessWithinCaps { n: 2, total_cap: 4 }
        );
    }

    #[test]
    fn length_one_is_trivial() {
        let c = gc(2, &[2, 1, 1]);
        for strategy in [Strategy::Direct, Strategy::ProofTrace] {
            let cert = extract_witness(&c, 1, strategy, &ExtractCaps::default()).unwrap();
            assert_eq!(cert.witness.entries(), &[1]);
            assert_eq!(cert.witness.class(), 2);
            assert!(check_certificate(&c, &cert).is_ok());
        }
    }

    #[test]
    fn trace_extract_single_class() {
        let c = GroundColoring::constant(12, 1, 1).unwrap();
        let cert = extract_witness(&c, 3, Strategy::ProofTrace, &ExtractCaps::default()).unwrap();
        assert_eq!(cert.strategy, Strategy::ProofTrace);
        assert_eq!(cert.witness.entries(), &[2, 2, 2]);
        assert_eq!(cert.k_set.as_ref().unwrap(), &fset![1, 2, 3, 4, 5, 6, 7, 8]);
        assert_eq!(cert.inner_witness.as_ref().unwrap().entries(), &[4, 4]);
        assert_eq!(cert.audits.len(), 7);
        assert!(verify_witness(&c, &cert.witness));
        assert!(check_certificate(&c, &cert).is_ok());
        // Only the multiple-of-4 layers up to the inner bound are recorded.
        let layers: Vec<u64> = cert
            .layer_classes
            .as_ref()
            .unwrap()
            .iter()
            .map(|(s, _)| s)
            .collect();
        assert_eq!(layers, vec![4, 8]);
    }

    #[test]
    fn trace_extract_four_entries() {
        // One more level: the inner problem has length 3, three proper
        // blocks plus the merged one, and all five combine cases appear.
        let c = GroundColoring::constant(16, 1, 1).unwrap();
        let cert = extract_witness(&c, 4, Strategy::ProofTrace, &ExtractCaps::default()).unwrap();
        assert_eq!(cert.witness.len(), 4);
        assert_eq!(cert.audits.len(), 15);
        assert!(verify_witness(&c, &cert.witness));
        assert_eq!(check_certificate(&c, &cert), Ok(()));

        use crate::altsum::{combine_case, CombineCase};
        let mut counts = std::collections::BTreeMap::new();
        for audit in &cert.audits {
            let indices: BTreeSet<usize> =
                audit.indices.iter().map(|&i| i as usize).collect();
            let case = combine_case(4, &indices);
            *counts.entry(format!("{case:?}")).or_insert(0u32) += 1;
        }
        assert_eq!(counts[&format!("{:?}", CombineCase::Blocks)], 7);
        assert_eq!(counts[&format!("{:?}", CombineCase::MergedDisjoint)], 2);
        assert_eq!(counts[&format!("{:?}", CombineCase::MergedWithFirst)], 2);
        assert_eq!(counts[&format!("{:?}", CombineCase::MergedWithSecond)], 2);
        assert_eq!(counts[&format!("{:?}", CombineCase::MergedWithBoth)], 2);
    }

    #[test]
    fn tampered_certificates_fail() {
        let c = GroundColoring::constant(12, 1, 1).unwrap();
        let cert = extract_witness(&c, 3, Strategy::ProofTrace, &ExtractCaps::default()).unwrap();

        let mut bumped = cert.clone();
        bumped.audits[0].sum += 1;
        assert_eq!(check_certificate(&c, &bumped), Err(CertViolation::AuditSum(0)));

        // Swap a recorded set for one of equal alternating sum but wrong
        // order: {2} has alternating sum 2 like block 1, but order 1 is not
        // a recorded layer.
        let mut swapped = cert.clone();
        let target = swapped
            .audits
            .iter()
            .position(|a| a.indices == vec![1])
            .unwrap();
        swapped.audits[target].set = Some(fset![2]);
        assert_eq!(
            check_certificate(&c, &swapped),
            Err(CertViolation::AuditLayerMembership(target))
        );
    }

    #[test]
    fn certificate_json_round_trip() {
        let c = GroundColoring::constant(12, 1, 1).unwrap();
        let cert = extract_witness(&c, 3, Strategy::ProofTrace, &ExtractCaps::default()).unwrap();
        let js = serde_json::to_string_pretty(&cert).unwrap();
        let back: Certificate = serde_json::from_str(&js).unwrap();
        assert_eq!(back, cert);
        assert_eq!(serde_json::to_string_pretty(&back).unwrap(), js);
    }
}
