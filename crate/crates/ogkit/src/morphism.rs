//! Maps between optiongraphs that commute with taking options:
//! `Opt(f(p)) = f(Opt(p))` as sets, for every position `p`.
//!
//! Such maps transport game structure: their kernels are congruences, their
//! images are option-closed, and the bijective ones are exactly the digraph
//! isomorphisms. Isomorphism itself is decided either by direct search or by
//! comparing canonical codes.

#[cfg(test)]
use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::congruence::{Congruence, Partition};
use crate::graph::{Optiongraph, Suboptiongraph};

/// Largest position count [`canonical_form`] accepts: the packed adjacency
/// relation must fit in 64 bits.
pub const CANONICAL_FORM_BOUND: usize = 8;

/// Errors constructing, reading or querying maps.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("assignment covers {got} positions, source has {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("assignment sends position {position} to {target}, outside the target graph")]
    TargetOutOfRange { position: usize, target: usize },
    #[error("map must be verified option-preserving before this operation")]
    Unverified,
    #[error("composition needs the first map's target to equal the second map's source")]
    ComposeMismatch,
    #[error("line {line}: expected `source -> target`")]
    MissingArrow { line: usize },
    #[error("line {line}: {label:?} is not a position of the source graph")]
    UnknownSource { line: usize, label: String },
    #[error("line {line}: {label:?} is not a position of the target graph")]
    UnknownTarget { line: usize, label: String },
    #[error("line {line}: source position {label:?} is mapped twice")]
    DuplicateSource { line: usize, label: String },
    #[error("map is not total; missing source positions: {}", .labels.join(" "))]
    MissingSources { labels: Vec<String> },
}

/// Witness that a map fails to preserve options at `position`: the target
/// options of its image differ from the image of its options. Both sides
/// are sorted target indices.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error(
    "position {position}: target options of the image are {expected:?}, image of the options is {actual:?}"
)]
pub struct PreservationViolation {
    pub position: usize,
    pub expected: Vec<usize>,
    pub actual: Vec<usize>,
}

/// A total function between the position sets of two graphs, with a record
/// of whether option preservation has been checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptionMap {
    source: Optiongraph,
    target: Optiongraph,
    assignment: Vec<usize>,
    verified: bool,
}

impl OptionMap {
    /// Wraps a raw assignment, unverified.
    pub fn new(
        source: Optiongraph,
        target: Optiongraph,
        assignment: Vec<usize>,
    ) -> Result<Self, MapError> {
        if assignment.len() != source.position_count() {
            return Err(MapError::LengthMismatch {
                expected: source.position_count(),
                got: assignment.len(),
            });
        }
        for (p, &t) in assignment.iter().enumerate() {
            if t >= target.position_count() {
                return Err(MapError::TargetOutOfRange { position: p, target: t });
            }
        }
        Ok(OptionMap { source, target, assignment, verified: false })
    }

    /// Reads `source -> target` lines; `#` comments and blank lines are
    /// ignored. The map must mention every source position exactly once.
    pub fn parse(source: Optiongraph, target: Optiongraph, text: &str) -> Result<Self, MapError> {
        let mut assignment: Vec<Option<usize>> = vec![None; source.position_count()];
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((lhs, rhs)) = content.split_once("->") else {
                return Err(MapError::MissingArrow { line });
            };
            let (lhs, rhs) = (lhs.trim(), rhs.trim());
            let Some(src) = source.position(lhs) else {
                return Err(MapError::UnknownSource { line, label: lhs.to_string() });
            };
            let Some(dst) = target.position(rhs) else {
                return Err(MapError::UnknownTarget { line, label: rhs.to_string() });
            };
            if assignment[src].is_some() {
                return Err(MapError::DuplicateSource { line, label: lhs.to_string() });
            }
            assignment[src] = Some(dst);
        }
        let missing: Vec<String> = assignment
            .iter()
            .enumerate()
            .filter(|(_, a)| a.is_none())
            .map(|(p, _)| source.label(p).to_string())
            .collect();
        if !missing.is_empty() {
            return Err(MapError::MissingSources { labels: missing });
        }
        let assignment = assignment.into_iter().map(Option::unwrap).collect();
        Self::new(source, target, assignment)
    }

    /// The identity on `g`, trivially verified.
    pub fn identity(g: &Optiongraph) -> Self {
        OptionMap {
            source: g.clone(),
            target: g.clone(),
            assignment: (0..g.position_count()).collect(),
            verified: true,
        }
    }

    pub fn source(&self) -> &Optiongraph {
        &self.source
    }

    pub fn target(&self) -> &Optiongraph {
        &self.target
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn apply(&self, p: usize) -> usize {
        self.assignment[p]
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    fn image_of_options(&self, p: usize) -> Vec<usize> {
        let mut v: Vec<usize> =
            self.source.options(p).iter().map(|&o| self.assignment[o]).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Checks option preservation without recording the result.
    pub fn check(&self) -> Result<(), PreservationViolation> {
        for p in 0..self.source.position_count() {
            let mut expected: Vec<usize> = self.target.options(self.assignment[p]).to_vec();
            expected.sort_unstable();
            expected.dedup();
            let actual = self.image_of_options(p);
            if expected != actual {
                return Err(PreservationViolation { position: p, expected, actual });
            }
        }
        Ok(())
    }

    /// Checks option preservation and records success.
    pub fn verify(&mut self) -> Result<(), PreservationViolation> {
        self.check()?;
        self.verified = true;
        Ok(())
    }

    /// Renders a violation with labels instead of indices.
    pub fn explain_violation(&self, v: &PreservationViolation) -> String {
        let labels = |ids: &[usize]| {
            ids.iter().map(|&t| self.target.label(t)).collect::<Vec<_>>().join(" ")
        };
        format!(
            "not option-preserving at {:?}: target options of its image are [{}], image of its options is [{}]",
            self.source.label(v.position),
            labels(&v.expected),
            labels(&v.actual),
        )
    }

    /// The equality kernel: positions are equivalent when their images
    /// coincide. A congruence whenever the map preserves options.
    pub fn kernel(&self) -> Result<Congruence, MapError> {
        if !self.verified {
            return Err(MapError::Unverified);
        }
        let partition = Partition::from_class_assignment(&self.assignment);
        Ok(Congruence::new(&self.source, partition)
            .expect("the kernel of an option-preserving map is a congruence"))
    }

    /// The image as a suboptiongraph of the target; option-closed whenever
    /// the map preserves options.
    pub fn image(&self) -> Result<Suboptiongraph, MapError> {
        if !self.verified {
            return Err(MapError::Unverified);
        }
        let mut members = self.assignment.clone();
        members.sort_unstable();
        members.dedup();
        Ok(Suboptiongraph::new(&self.target, &members)
            .expect("the image of an option-preserving map is option-closed"))
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.target.position_count()];
        self.assignment.iter().all(|&t| !std::mem::replace(&mut seen[t], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.target.position_count()];
        for &t in &self.assignment {
            seen[t] = true;
        }
        seen.into_iter().all(|s| s)
    }

    pub fn is_bijective(&self) -> bool {
        self.source.position_count() == self.target.position_count() && self.is_injective()
    }

    /// The inverse of a bijection, freshly verified; `None` otherwise.
    pub fn inverse(&self) -> Option<OptionMap> {
        if !self.is_bijective() {
            return None;
        }
        let mut back = vec![0usize; self.target.position_count()];
        for (p, &t) in self.assignment.iter().enumerate() {
            back[t] = p;
        }
        let mut inv = OptionMap {
            source: self.target.clone(),
            target: self.source.clone(),
            assignment: back,
            verified: false,
        };
        if self.verified {
            inv.verify().expect("the inverse of an option-preserving bijection preserves options");
        }
        Some(inv)
    }

    /// Bijective and option-preserving in both directions, checked afresh.
    pub fn is_isomorphism(&self) -> bool {
        if !self.is_bijective() || self.check().is_err() {
            return false;
        }
        let mut unchecked = self.clone();
        unchecked.verified = true;
        unchecked.inverse().is_some_and(|inv| inv.check().is_ok())
    }
}

/// `second` after `first`: the usual composite, option-preserving when both
/// factors are. Requires `first`'s target to equal `second`'s source.
pub fn compose(first: &OptionMap, second: &OptionMap) -> Result<OptionMap, MapError> {
    if first.target != second.source {
        return Err(MapError::ComposeMismatch);
    }
    let assignment: Vec<usize> =
        first.assignment.iter().map(|&t| second.assignment[t]).collect();
    let composite = OptionMap {
        source: first.source.clone(),
        target: second.target.clone(),
        assignment,
        verified: first.verified && second.verified,
    };
    debug_assert!(!composite.verified || composite.check().is_ok());
    Ok(composite)
}

/// Searches for an isomorphism by backtracking, matching positions with the
/// same out-degree, in-degree and self-loop flag first. Deterministic: the
/// first assignment in source declaration order wins.
pub fn find_isomorphism(c: &Optiongraph, d: &Optiongraph) -> Option<OptionMap> {
    let n = c.position_count();
    if n != d.position_count() || c.arrow_count() != d.arrow_count() {
        return None;
    }
    fn profile(g: &Optiongraph) -> Vec<(usize, usize, bool)> {
        let preds = g.predecessors();
        (0..g.position_count())
            .map(|p| (g.options(p).len(), preds[p].len(), g.options(p).contains(&p)))
            .collect()
    }
    let (cp, dp) = (profile(c), profile(d));
    {
        let mut cs = cp.clone();
        let mut ds = dp.clone();
        cs.sort_unstable();
        ds.sort_unstable();
        if cs != ds {
            return None;
        }
    }
    let adj = |g: &Optiongraph, p: usize, q: usize| g.options(p).contains(&q);
    let mut assignment = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn backtrack(
        c: &Optiongraph,
        d: &Optiongraph,
        cp: &[(usize, usize, bool)],
        dp: &[(usize, usize, bool)],
        adj: &dyn Fn(&Optiongraph, usize, usize) -> bool,
        assignment: &mut Vec<usize>,
        used: &mut Vec<bool>,
        at: usize,
    ) -> bool {
        let n = assignment.len();
        if at == n {
            return true;
        }
        for t in 0..n {
            if used[t] || cp[at] != dp[t] {
                continue;
            }
            let consistent = (0..at).all(|q| {
                adj(c, at, q) == adj(d, t, assignment[q])
                    && adj(c, q, at) == adj(d, assignment[q], t)
            });
            if !consistent {
                continue;
            }
            assignment[at] = t;
            used[t] = true;
            if backtrack(c, d, cp, dp, adj, assignment, used, at + 1) {
                return true;
            }
            used[t] = false;
            assignment[at] = usize::MAX;
        }
        false
    }
    if !backtrack(c, d, &cp, &dp, &adj, &mut assignment, &mut used, 0) {
        return None;
    }
    let mut map = OptionMap::new(c.clone(), d.clone(), assignment).expect("assignment is total");
    map.verify().expect("an adjacency-preserving bijection preserves options");
    debug_assert!(map.is_isomorphism());
    Some(map)
}

/// An isomorphism-invariant fingerprint: the lexicographically least packed
/// adjacency relation over all vertex orderings. Two graphs within the size
/// bound are isomorphic exactly when their codes are equal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalCode {
    n: usize,
    bits: u64,
}

impl CanonicalCode {
    pub fn position_count(&self) -> usize {
        self.n
    }

    /// The packed relation, row-major, first cell in the highest used bit.
    pub fn bits(&self) -> u64 {
        self.bits
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{:0width$b}", self.n, self.bits, width = self.n * self.n)
    }
}

/// Size guard for [`canonical_form`].
#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("graph has {positions} positions, above the canonical-form bound {bound}")]
pub struct CanonicalBound {
    pub positions: usize,
    pub bound: usize,
}

/// Adjacency as a row-major bitmask: bit `i*n + j` set when `i` has option
/// `j`. Requires at most 8 positions.
pub(crate) fn adjacency_mask(g: &Optiongraph) -> u64 {
    let n = g.position_count();
    assert!(n <= 8, "mask packing needs at most 8 positions");
    let mut mask = 0u64;
    for p in 0..n {
        for &o in g.options(p) {
            mask |= 1 << (p * n + o);
        }
    }
    mask
}

/// All permutations of `0..n` in lexicographic order.
pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    let mut used = vec![false; n];
    fn recurse(
        n: usize,
        current: &mut Vec<usize>,
        used: &mut Vec<bool>,
        at: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if at == n {
            out.push(current.clone());
            return;
        }
        for v in 0..n {
            if used[v] {
                continue;
            }
            used[v] = true;
            current[at] = v;
            recurse(n, current, used, at + 1, out);
            used[v] = false;
        }
    }
    recurse(n, &mut current, &mut used, 0, &mut out);
    out
}

/// Precomputed shift tables: one row per permutation, mapping each source
/// cell of the adjacency mask to its packed destination bit.
pub(crate) struct PermTables {
    shifts: Vec<Vec<u8>>,
}

impl PermTables {
    pub(crate) fn new(n: usize) -> Self {
        assert!(n <= 8);
        let cells = n * n;
        let shifts = permutations(n)
            .into_iter()
            .map(|sigma| {
                // sigma[a] is the slot vertex a moves to; an arrow (a, b)
                // lands at cell sigma[a]*n + sigma[b], packed MSB-first.
                let mut row = vec![0u8; cells];
                for a in 0..n {
                    for b in 0..n {
                        row[a * n + b] = (cells - 1 - (sigma[a] * n + sigma[b])) as u8;
                    }
                }
                row
            })
            .collect();
        PermTables { shifts }
    }

    /// The least packed code of `mask` over every vertex ordering.
    pub(crate) fn min_code(&self, mask: u64) -> u64 {
        let mut best = u64::MAX;
        for row in &self.shifts {
            let mut code = 0u64;
            let mut m = mask;
            while m != 0 {
                let s = m.trailing_zeros() as usize;
                code |= 1 << row[s];
                m &= m - 1;
            }
            if code < best {
                best = code;
            }
        }
        best
    }
}

/// Canonical code of a graph with at most [`CANONICAL_FORM_BOUND`]
/// positions. Equal codes characterise isomorphic graphs of equal size.
pub fn canonical_form(g: &Optiongraph) -> Result<CanonicalCode, CanonicalBound> {
    let n = g.position_count();
    if n > CANONICAL_FORM_BOUND {
        return Err(CanonicalBound { positions: n, bound: CANONICAL_FORM_BOUND });
    }
    let tables = PermTables::new(n);
    Ok(CanonicalCode { n, bits: tables.min_code(adjacency_mask(g)) })
}

/// Deduplicates same-size graphs up to isomorphism via canonical codes.
#[cfg(test)]
pub(crate) fn distinct_codes<'a, I>(graphs: I) -> Vec<u64>
where
    I: IntoIterator<Item = &'a Optiongraph>,
{
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for g in graphs {
        let code = canonical_form(g).expect("codes requested within bound").bits();
        if seen.insert(code) {
            out.push(code);
        }
    }
    out
}
