//! Exhaustive and randomized generation of small optiongraphs.
//!
//! Labeled graphs on `n` positions are the `2^(n*n)` adjacency bitmasks,
//! swept in increasing order. The sweep counts the simple ones and, via
//! canonical codes, the simple ones up to isomorphism. The inner loop is
//! data-parallel when the `parallel` feature is on; a sequential twin stays
//! available for comparison, and both produce identical reports.

use std::collections::HashSet;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

use crate::congruence::{all_congruences, Congruence, EnumerationBound};
use crate::graph::Optiongraph;
use crate::morphism::PermTables;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Largest `n` the plain sweep accepts: 33 million masks.
pub const ENUMERATION_BOUND: usize = 5;

/// Largest `n` the checkpointed long-running sweep accepts: 69 billion
/// masks, hours of work.
pub const LONG_RUN_BOUND: usize = 6;

/// Size guard for enumeration entry points.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("enumeration over {positions} positions exceeds the bound {bound}")]
pub struct EnumerationLimit {
    pub positions: usize,
    pub bound: usize,
}

/// What a sweep found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationReport {
    pub positions: usize,
    pub labeled_total: u64,
    pub simple_labeled: u64,
    pub simple_up_to_iso: u64,
    pub elapsed: Duration,
}

fn position_labels(n: usize) -> Vec<String> {
    assert!(n <= 26, "letter labels cover at most 26 positions");
    (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
}

/// The graph encoded by a row-major adjacency bitmask: bit `i*n + j` set
/// means position `i` has option `j`. Positions are labelled `a`, `b`, ...
pub fn graph_from_mask(n: usize, mask: u64) -> Optiongraph {
    assert!((1..=8).contains(&n));
    assert!(n * n == 64 || mask < 1u64 << (n * n));
    let options: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| mask >> (i * n + j) & 1 == 1)
                .collect()
        })
        .collect();
    Optiongraph::new(position_labels(n), options).expect("mask graphs are valid")
}

/// Simplicity straight off the bitmask: partition refinement with classes
/// kept in registers. Equivalent to checking that the maximum congruence
/// is discrete.
pub fn is_simple_mask(n: usize, mask: u64) -> bool {
    debug_assert!((1..=8).contains(&n));
    let full_row = if n == 8 { 0xffu64 } else { (1u64 << n) - 1 };
    let mut row = [0u8; 8];
    for (p, r) in row.iter_mut().enumerate().take(n) {
        *r = (mask >> (p * n) & full_row) as u8;
    }
    let mut class_of = [0u8; 8];
    let mut count = 1usize;
    loop {
        let mut members = [0u8; 8];
        for p in 0..n {
            members[class_of[p] as usize] |= 1 << p;
        }
        let mut sig = [0u8; 8];
        for p in 0..n {
            for c in 0..count {
                if row[p] & members[c] != 0 {
                    sig[p] |= 1 << c;
                }
            }
        }
        let mut seen: [(u8, u8); 8] = [(0, 0); 8];
        let mut new_count = 0usize;
        let mut next = [0u8; 8];
        for p in 0..n {
            let key = (class_of[p], sig[p]);
            let id = match seen[..new_count].iter().position(|&k| k == key) {
                Some(id) => id,
                None => {
                    seen[new_count] = key;
                    new_count += 1;
                    new_count - 1
                }
            };
            next[p] = id as u8;
        }
        if new_count == n {
            return true;
        }
        if new_count == count {
            return false;
        }
        class_of = next;
        count = new_count;
    }
}

fn sweep_range(n: usize, lo: u64, hi: u64, tables: &PermTables) -> (u64, HashSet<u64>) {
    let mut simple = 0u64;
    let mut codes = HashSet::new();
    for mask in lo..hi {
        if is_simple_mask(n, mask) {
            simple += 1;
            codes.insert(tables.min_code(mask));
        }
    }
    (simple, codes)
}

fn merge(mut a: (u64, HashSet<u64>), b: (u64, HashSet<u64>)) -> (u64, HashSet<u64>) {
    a.0 += b.0;
    if a.1.len() < b.1.len() {
        let (small, mut big) = (a.1, b.1);
        big.extend(small);
        return (a.0, big);
    }
    a.1.extend(b.1);
    a
}

#[cfg(feature = "parallel")]
fn sweep_block(n: usize, lo: u64, hi: u64, tables: &PermTables, parallel: bool) -> (u64, HashSet<u64>) {
    if !parallel {
        return sweep_range(n, lo, hi, tables);
    }
    const CHUNK: u64 = 1 << 16;
    let chunks = (hi - lo).div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|i| {
            let start = lo + i * CHUNK;
            sweep_range(n, start, hi.min(start + CHUNK), tables)
        })
        .reduce(|| (0, HashSet::new()), merge)
}

#[cfg(not(feature = "parallel"))]
fn sweep_block(n: usize, lo: u64, hi: u64, tables: &PermTables, _parallel: bool) -> (u64, HashSet<u64>) {
    sweep_range(n, lo, hi, tables)
}

fn labeled_total(n: usize) -> u64 {
    1u64 << (n * n)
}

fn count_all(n: usize, parallel: bool) -> EnumerationReport {
    let start = Instant::now();
    let tables = PermTables::new(n);
    let (simple, codes) = sweep_block(n, 0, labeled_total(n), &tables, parallel);
    EnumerationReport {
        positions: n,
        labeled_total: labeled_total(n),
        simple_labeled: simple,
        simple_up_to_iso: codes.len() as u64,
        elapsed: start.elapsed(),
    }
}

fn check_limit(n: usize, bound: usize) -> Result<(), EnumerationLimit> {
    if n == 0 || n > bound {
        return Err(EnumerationLimit { positions: n, bound });
    }
    Ok(())
}

/// Counts simple graphs on `n` positions, labeled and up to isomorphism.
/// Data-parallel when the `parallel` feature is enabled.
pub fn count_simple(n: usize) -> Result<EnumerationReport, EnumerationLimit> {
    check_limit(n, ENUMERATION_BOUND)?;
    Ok(count_all(n, true))
}

/// The sequential twin of [`count_simple`]; identical results, one thread.
pub fn count_simple_sequential(n: usize) -> Result<EnumerationReport, EnumerationLimit> {
    check_limit(n, ENUMERATION_BOUND)?;
    Ok(count_all(n, false))
}

/// Every labeled graph on `n` positions, streamed in increasing mask order.
pub fn enumerate_labeled(
    n: usize,
) -> Result<impl Iterator<Item = Optiongraph>, EnumerationLimit> {
    check_limit(n, ENUMERATION_BOUND)?;
    Ok((0..labeled_total(n)).map(move |mask| graph_from_mask(n, mask)))
}

/// One representative per isomorphism class of simple graphs, ordered by
/// canonical code.
pub fn simple_representatives(n: usize) -> Result<Vec<Optiongraph>, EnumerationLimit> {
    check_limit(n, ENUMERATION_BOUND)?;
    let tables = PermTables::new(n);
    let (_, codes) = sweep_block(n, 0, labeled_total(n), &tables, cfg!(feature = "parallel"));
    let mut codes: Vec<u64> = codes.into_iter().collect();
    codes.sort_unstable();
    Ok(codes.into_iter().map(|code| graph_from_mask(n, mask_from_code(n, code))).collect())
}

/// Inverts the MSB-first packing of canonical codes back to a mask.
fn mask_from_code(n: usize, code: u64) -> u64 {
    let cells = n * n;
    let mut mask = 0u64;
    for k in 0..cells {
        if code >> (cells - 1 - k) & 1 == 1 {
            mask |= 1 << k;
        }
    }
    mask
}

/// Options for the checkpointed long-running sweep.
#[derive(Clone, Debug)]
pub struct RunOptions {
    /// Where to persist progress; resumed from when the file exists.
    pub checkpoint: Option<PathBuf>,
    /// Masks per block between checkpoints.
    pub checkpoint_every: u64,
    /// Print a progress line to stderr after each block.
    pub progress: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { checkpoint: None, checkpoint_every: 1 << 22, progress: false }
    }
}

/// Errors from the long-running sweep.
#[derive(Error, Debug)]
pub enum LongRunError {
    #[error(transparent)]
    Limit(#[from] EnumerationLimit),
    #[error("checkpoint file: {0}")]
    Io(#[from] std::io::Error),
    #[error("checkpoint file is corrupt: {0}")]
    Corrupt(String),
}

const CHECKPOINT_MAGIC: &[u8; 8] = b"OGSWEEP1";

struct SweepState {
    next_mask: u64,
    simple: u64,
    prior_elapsed: Duration,
    codes: HashSet<u64>,
}

fn load_checkpoint(path: &PathBuf, n: usize) -> Result<Option<SweepState>, LongRunError> {
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let corrupt = |msg: &str| LongRunError::Corrupt(msg.to_string());
    if bytes.len() < 8 + 1 + 32 || &bytes[..8] != CHECKPOINT_MAGIC {
        return Err(corrupt("bad header"));
    }
    if bytes[8] as usize != n {
        return Err(corrupt("written for a different position count"));
    }
    let word = |i: usize| {
        u64::from_le_bytes(bytes[9 + 8 * i..17 + 8 * i].try_into().expect("bounds checked"))
    };
    let (next_mask, simple, elapsed_ms, count) = (word(0), word(1), word(2), word(3));
    if next_mask > labeled_total(n) || count > next_mask {
        return Err(corrupt("inconsistent counters"));
    }
    let body = &bytes[9 + 32..];
    if body.len() != count as usize * 8 {
        return Err(corrupt("truncated code table"));
    }
    let codes: HashSet<u64> = body
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().expect("exact chunks")))
        .collect();
    if codes.len() != count as usize {
        return Err(corrupt("duplicate codes"));
    }
    Ok(Some(SweepState {
        next_mask,
        simple,
        prior_elapsed: Duration::from_millis(elapsed_ms),
        codes,
    }))
}

fn write_checkpoint(path: &PathBuf, n: usize, state: &SweepState) -> Result<(), LongRunError> {
    let mut bytes = Vec::with_capacity(8 + 1 + 32 + state.codes.len() * 8);
    bytes.extend_from_slice(CHECKPOINT_MAGIC);
    bytes.push(n as u8);
    for word in [
        state.next_mask,
        state.simple,
        state.prior_elapsed.as_millis() as u64,
        state.codes.len() as u64,
    ] {
        bytes.extend_from_slice(&word.to_le_bytes());
    }
    let mut codes: Vec<u64> = state.codes.iter().copied().collect();
    codes.sort_unstable();
    for code in codes {
        bytes.extend_from_slice(&code.to_le_bytes());
    }
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// The sweep without the [`ENUMERATION_BOUND`] cap, up to
/// [`LONG_RUN_BOUND`] positions: block by block, optionally checkpointed
/// after each block so an interrupted run resumes where it stopped.
pub fn count_simple_unbounded(
    n: usize,
    options: &RunOptions,
) -> Result<EnumerationReport, LongRunError> {
    check_limit(n, LONG_RUN_BOUND)?;
    let started = Instant::now();
    let total = labeled_total(n);
    let mut state = match &options.checkpoint {
        Some(path) => load_checkpoint(path, n)?.unwrap_or_else(|| SweepState {
            next_mask: 0,
            simple: 0,
            prior_elapsed: Duration::ZERO,
            codes: HashSet::new(),
        }),
        None => SweepState {
            next_mask: 0,
            simple: 0,
            prior_elapsed: Duration::ZERO,
            codes: HashSet::new(),
        },
    };
    let tables = PermTables::new(n);
    let every = options.checkpoint_every.max(1);
    while state.next_mask < total {
        let hi = total.min(state.next_mask + every);
        let (simple, codes) =
            sweep_block(n, state.next_mask, hi, &tables, cfg!(feature = "parallel"));
        state.simple += simple;
        state.codes.extend(codes);
        state.next_mask = hi;
        let elapsed = state.prior_elapsed + started.elapsed();
        if let Some(path) = &options.checkpoint {
            let snapshot = SweepState {
                next_mask: state.next_mask,
                simple: state.simple,
                prior_elapsed: elapsed,
                codes: std::mem::take(&mut state.codes),
            };
            write_checkpoint(path, n, &snapshot)?;
            state.codes = snapshot.codes;
        }
        if options.progress {
            eprintln!(
                "progress: {}/{} masks, {} simple, {} classes, {:.0?} elapsed",
                state.next_mask,
                total,
                state.simple,
                state.codes.len(),
                elapsed,
            );
        }
    }
    Ok(EnumerationReport {
        positions: n,
        labeled_total: total,
        simple_labeled: state.simple,
        simple_up_to_iso: state.codes.len() as u64,
        elapsed: state.prior_elapsed + started.elapsed(),
    })
}

fn unit_interval(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// A graph drawn arrow by arrow: each of the `n*n` possible arrows is
/// included independently with the given probability. Same seed, same
/// graph.
pub fn random_optiongraph(n: usize, arrow_probability: f64, seed: u64) -> Optiongraph {
    assert!((1..=26).contains(&n), "letter labels cover 1 to 26 positions");
    assert!(
        (0.0..=1.0).contains(&arrow_probability),
        "a probability lies in [0, 1]"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let options: Vec<Vec<usize>> = (0..n)
        .map(|_| (0..n).filter(|_| unit_interval(&mut rng) < arrow_probability).collect())
        .collect();
    Optiongraph::new(position_labels(n), options).expect("generated graphs are valid")
}

/// A congruence drawn uniformly from `all_congruences(g)`. Same seed, same
/// congruence.
pub fn random_congruence(g: &Optiongraph, seed: u64) -> Result<Congruence, EnumerationBound> {
    let all = all_congruences(g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let index = ((rng.next_u64() as u128 * all.len() as u128) >> 64) as usize;
    Ok(all[index].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congruence::is_simple;
    use crate::fixtures;
    use crate::morphism::{adjacency_mask, canonical_form};

    #[test]
    fn tiny_counts_are_exact() {
        let r1 = count_simple(1).unwrap();
        assert_eq!(r1.labeled_total, 2);
        assert_eq!(r1.simple_labeled, 2);
        assert_eq!(r1.simple_up_to_iso, 2);
        let r2 = count_simple(2).unwrap();
        assert_eq!(r2.labeled_total, 16);
        assert_eq!(r2.simple_up_to_iso, 3);
        let r3 = count_simple(3).unwrap();
        assert_eq!(r3.labeled_total, 512);
        assert_eq!(r3.simple_up_to_iso, 15);
    }

    #[test]
    fn mask_simplicity_agrees_with_the_graph_level_check() {
        for n in 1..=3usize {
            for mask in 0..labeled_total(n) {
                let g = graph_from_mask(n, mask);
                assert_eq!(
                    is_simple_mask(n, mask),
                    is_simple(&g),
                    "disagree at n={n} mask={mask:#b}"
                );
            }
        }
    }

    #[test]
    fn graph_level_recount_of_two_positions() {
        // independent route: enumerate graphs, test simplicity on the graph,
        // deduplicate by canonical code
        let mut labeled = 0u64;
        let mut codes = HashSet::new();
        for g in enumerate_labeled(2).unwrap() {
            if is_simple(&g) {
                labeled += 1;
                codes.insert(canonical_form(&g).unwrap());
            }
        }
        let report = count_simple(2).unwrap();
        assert_eq!(report.simple_labeled, labeled);
        assert_eq!(report.simple_up_to_iso, codes.len() as u64);
    }

    #[test]
    fn parallel_and_sequential_sweeps_agree() {
        for n in 1..=3 {
            let a = count_simple(n).unwrap();
            let b = count_simple_sequential(n).unwrap();
            assert_eq!(a.simple_labeled, b.simple_labeled);
            assert_eq!(a.simple_up_to_iso, b.simple_up_to_iso);
        }
    }

    #[test]
    fn representatives_match_the_handwritten_three_position_list() {
        let reps = simple_representatives(3).unwrap();
        assert_eq!(reps.len(), 15);
        let swept: HashSet<u64> =
            reps.iter().map(|g| canonical_form(g).unwrap().bits()).collect();
        let listed: HashSet<u64> = fixtures::simple_three_position()
            .iter()
            .map(|g| canonical_form(g).unwrap().bits())
            .collect();
        assert_eq!(swept, listed);
        for g in &reps {
            assert!(is_simple(g));
        }
    }

    #[test]
    fn masks_round_trip_through_graphs_and_codes() {
        for n in 1..=3usize {
            for mask in 0..labeled_total(n) {
                let g = graph_from_mask(n, mask);
                assert_eq!(adjacency_mask(&g), mask);
            }
        }
        for code in [0u64, 0b0010, 0b100110000] {
            let n = 3;
            let mask = mask_from_code(n, code);
            let back: u64 = (0..n * n)
                .filter(|&k| mask >> k & 1 == 1)
                .map(|k| 1u64 << (n * n - 1 - k))
                .sum();
            assert_eq!(back, code);
        }
    }

    #[test]
    fn enumerate_labeled_streams_every_mask_once() {
        let graphs: Vec<Optiongraph> = enumerate_labeled(2).unwrap().collect();
        assert_eq!(graphs.len(), 16);
        assert_eq!(graphs[0].serialize(), "a:\nb:\n");
        assert_eq!(graphs[1].serialize(), "a: a\nb:\n");
        let distinct: HashSet<String> = graphs.iter().map(Optiongraph::serialize).collect();
        assert_eq!(distinct.len(), 16);
        assert!(enumerate_labeled(6).is_err());
        assert!(enumerate_labeled(0).is_err());
    }

    #[test]
    fn long_running_sweep_checkpoints_and_resumes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.ck");
        let opts = RunOptions {
            checkpoint: Some(path.clone()),
            checkpoint_every: 64,
            progress: false,
        };
        let fresh = count_simple_unbounded(3, &opts).unwrap();
        let plain = count_simple(3).unwrap();
        assert_eq!(fresh.simple_labeled, plain.simple_labeled);
        assert_eq!(fresh.simple_up_to_iso, plain.simple_up_to_iso);

        // hand-build a half-finished checkpoint and let the sweep finish it
        let tables = PermTables::new(3);
        let mid = 200u64;
        let (simple, codes) = sweep_range(3, 0, mid, &tables);
        write_checkpoint(
            &path,
            3,
            &SweepState {
                next_mask: mid,
                simple,
                prior_elapsed: Duration::from_millis(5),
                codes,
            },
        )
        .unwrap();
        let resumed = count_simple_unbounded(3, &opts).unwrap();
        assert_eq!(resumed.simple_labeled, plain.simple_labeled);
        assert_eq!(resumed.simple_up_to_iso, plain.simple_up_to_iso);
        assert!(resumed.elapsed >= Duration::from_millis(5));

        // a checkpoint for the wrong size is refused
        let wrong = count_simple_unbounded(2, &opts);
        assert!(matches!(wrong, Err(LongRunError::Corrupt(_))));
    }

    #[test]
    fn random_graphs_are_deterministic_per_seed() {
        let a = random_optiongraph(6, 0.4, 11);
        let b = random_optiongraph(6, 0.4, 11);
        let c = random_optiongraph(6, 0.4, 12);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(random_optiongraph(4, 0.0, 5).arrow_count(), 0);
        assert_eq!(random_optiongraph(4, 1.0, 5).arrow_count(), 16);
    }

    #[test]
    fn random_congruences_are_valid_and_cover_the_lattice() {
        let g = fixtures::lattice_demo();
        let all = all_congruences(&g).unwrap();
        let mut seen = HashSet::new();
        for seed in 0..200 {
            let c = random_congruence(&g, seed).unwrap();
            assert!(all.contains(&c));
            seen.insert(c.display(&g));
        }
        assert_eq!(seen.len(), all.len(), "every congruence should be drawn");
    }
}
