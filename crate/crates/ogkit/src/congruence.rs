//! Congruence relations: equivalences on positions that options respect.
//!
//! A partition is a congruence when any two equivalent positions have the
//! same options *up to the partition itself*. Congruences are exactly the
//! relations one can quotient by without changing how the game plays, and
//! they form a complete lattice under refinement. The maximum congruence is
//! computed by partition refinement; exhaustive enumeration stays within its
//! classes, which keeps the candidate space small on graphs that matter.

use std::collections::HashMap;

use thiserror::Error;

use crate::graph::Optiongraph;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Largest position count `all_congruences` and friends accept by default.
pub const DEFAULT_CONGRUENCE_BOUND: usize = 10;

/// A partition of `0..n` into disjoint classes. Classes are numbered by
/// first occurrence and members kept sorted, so equal partitions compare
/// equal structurally.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

/// Errors building a partition from explicit classes.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("member index {position} out of range for {positions} positions")]
    OutOfRange { position: usize, positions: usize },
    #[error("position {position} appears in two classes")]
    Overlap { position: usize },
}

/// Errors reading the textual partition format.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PartitionParseError {
    #[error("token {0:?} is neither a label nor a string of single-character labels")]
    UnknownToken(String),
    #[error("position {0:?} appears in two classes")]
    DuplicateMember(String),
}

impl Partition {
    /// Every position in its own class.
    pub fn discrete(n: usize) -> Self {
        Self::from_class_assignment(&(0..n).collect::<Vec<_>>())
    }

    /// All positions in one class.
    pub fn single_class(n: usize) -> Self {
        Self::from_class_assignment(&vec![0; n])
    }

    /// Builds from an arbitrary class assignment, renumbering classes by
    /// first occurrence.
    pub fn from_class_assignment(raw: &[usize]) -> Self {
        let mut renumber: HashMap<usize, usize> = HashMap::new();
        let mut class_of = Vec::with_capacity(raw.len());
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for (p, &c) in raw.iter().enumerate() {
            let next = renumber.len();
            let id = *renumber.entry(c).or_insert(next);
            if id == classes.len() {
                classes.push(Vec::new());
            }
            classes[id].push(p);
            class_of.push(id);
        }
        Partition { class_of, classes }
    }

    /// Builds from explicit classes over `0..n`; positions not listed become
    /// singletons. Empty classes are ignored.
    pub fn from_classes(n: usize, classes: &[Vec<usize>]) -> Result<Self, PartitionError> {
        let mut raw: Vec<usize> = (0..n).collect();
        let mut taken = vec![false; n];
        for (c, members) in classes.iter().enumerate() {
            for &m in members {
                if m >= n {
                    return Err(PartitionError::OutOfRange { position: m, positions: n });
                }
                if taken[m] {
                    return Err(PartitionError::Overlap { position: m });
                }
                taken[m] = true;
                raw[m] = n + c;
            }
        }
        Ok(Self::from_class_assignment(&raw))
    }

    /// Reads the textual format: classes separated by `|`, members given as
    /// whitespace-separated labels. A token that is not itself a label is
    /// read as a string of single-character labels, so `ab|st` and
    /// `a b | s t` both work. Unlisted positions stay singletons; `-` or an
    /// empty string is the discrete partition.
    pub fn parse(g: &Optiongraph, text: &str) -> Result<Self, PartitionParseError> {
        let n = g.position_count();
        let text = text.trim();
        if text.is_empty() || text == "-" {
            return Ok(Self::discrete(n));
        }
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut taken = vec![false; n];
        for chunk in text.split('|') {
            let mut members = Vec::new();
            for token in chunk.split_whitespace() {
                let ids = if let Some(id) = g.position(token) {
                    vec![id]
                } else {
                    let mut ids = Vec::new();
                    for ch in token.chars() {
                        match g.position(&ch.to_string()) {
                            Some(id) => ids.push(id),
                            None => {
                                return Err(PartitionParseError::UnknownToken(token.to_string()))
                            }
                        }
                    }
                    ids
                };
                for id in ids {
                    if taken[id] {
                        return Err(PartitionParseError::DuplicateMember(
                            g.label(id).to_string(),
                        ));
                    }
                    taken[id] = true;
                    members.push(id);
                }
            }
            if !members.is_empty() {
                classes.push(members);
            }
        }
        Ok(Self::from_classes(n, &classes).expect("membership was checked while reading"))
    }

    /// Renders nontrivial classes, ordered by their lexicographically least
    /// member label, members in label order. All-single-character labels use
    /// the compact form `ab|st`; otherwise members are space-separated. The
    /// discrete partition renders as `-`.
    pub fn display(&self, g: &Optiongraph) -> String {
        let mut rendered: Vec<Vec<&str>> = self
            .classes
            .iter()
            .filter(|c| c.len() > 1)
            .map(|c| {
                let mut labels: Vec<&str> = c.iter().map(|&p| g.label(p)).collect();
                labels.sort_unstable();
                labels
            })
            .collect();
        rendered.sort();
        if rendered.is_empty() {
            return "-".to_string();
        }
        let compact = rendered
            .iter()
            .flatten()
            .all(|l| l.chars().count() == 1);
        if compact {
            rendered
                .iter()
                .map(|c| c.concat())
                .collect::<Vec<_>>()
                .join("|")
        } else {
            rendered
                .iter()
                .map(|c| c.join(" "))
                .collect::<Vec<_>>()
                .join(" | ")
        }
    }

    pub fn position_count(&self) -> usize {
        self.class_of.len()
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, p: usize) -> usize {
        self.class_of[p]
    }

    /// Classes in first-occurrence order; members sorted ascending.
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_members(&self, c: usize) -> &[usize] {
        &self.classes[c]
    }

    pub fn same_class(&self, p: usize, q: usize) -> bool {
        self.class_of[p] == self.class_of[q]
    }

    pub fn is_discrete(&self) -> bool {
        self.class_count() == self.position_count()
    }

    /// Whether every class of `self` lies inside a class of `other`; the
    /// partial order of the congruence lattice.
    pub fn refines(&self, other: &Partition) -> bool {
        assert_eq!(
            self.position_count(),
            other.position_count(),
            "partitions of the same position set"
        );
        let mut image = vec![usize::MAX; self.class_count()];
        for p in 0..self.class_of.len() {
            let c = self.class_of[p];
            if image[c] == usize::MAX {
                image[c] = other.class_of[p];
            } else if image[c] != other.class_of[p] {
                return false;
            }
        }
        true
    }
}

/// Witness that a partition is not a congruence: two equivalent positions
/// whose options land in different class sets.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error(
    "positions {} and {} share a class but their options fall into classes {:?} versus {:?}",
    .pair.0, .pair.1, .left_option_classes, .right_option_classes
)]
pub struct CongruenceViolation {
    pub pair: (usize, usize),
    pub left_option_classes: Vec<usize>,
    pub right_option_classes: Vec<usize>,
}

/// Checks the congruence condition, reporting the first offending pair in
/// declaration order. Panics if partition and graph sizes differ.
pub fn is_congruence(g: &Optiongraph, p: &Partition) -> Result<(), CongruenceViolation> {
    assert_eq!(
        p.position_count(),
        g.position_count(),
        "partition of this graph's positions"
    );
    for class in p.classes() {
        let reference = class[0];
        let mut ref_classes: Vec<usize> =
            g.options(reference).iter().map(|&o| p.class_of(o)).collect();
        ref_classes.sort_unstable();
        ref_classes.dedup();
        for &member in &class[1..] {
            let mut mem_classes: Vec<usize> =
                g.options(member).iter().map(|&o| p.class_of(o)).collect();
            mem_classes.sort_unstable();
            mem_classes.dedup();
            if mem_classes != ref_classes {
                return Err(CongruenceViolation {
                    pair: (reference, member),
                    left_option_classes: ref_classes,
                    right_option_classes: mem_classes,
                });
            }
        }
    }
    Ok(())
}

/// A partition that passed [`is_congruence`] for the graph it was built
/// against.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Congruence {
    partition: Partition,
}

impl Congruence {
    /// Validates `partition` against `g`.
    pub fn new(g: &Optiongraph, partition: Partition) -> Result<Self, CongruenceViolation> {
        is_congruence(g, &partition)?;
        Ok(Congruence { partition })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn into_partition(self) -> Partition {
        self.partition
    }

    pub fn class_of(&self, p: usize) -> usize {
        self.partition.class_of(p)
    }

    pub fn same_class(&self, p: usize, q: usize) -> bool {
        self.partition.same_class(p, q)
    }

    pub fn class_count(&self) -> usize {
        self.partition.class_count()
    }

    pub fn refines(&self, other: &Congruence) -> bool {
        self.partition.refines(&other.partition)
    }

    pub fn display(&self, g: &Optiongraph) -> String {
        self.partition.display(g)
    }
}

/// Coarsest stable refinement of a class assignment: split classes by the
/// set of classes a position's options reach until nothing splits. Any
/// congruence refining the start also refines the result.
fn stabilize(g: &Optiongraph, mut class_of: Vec<usize>, mut count: usize) -> Vec<usize> {
    let n = g.position_count();
    loop {
        let mut next_id: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let mut next = Vec::with_capacity(n);
        for p in 0..n {
            let mut sig: Vec<usize> = g.options(p).iter().map(|&o| class_of[o]).collect();
            sig.sort_unstable();
            sig.dedup();
            let fresh = next_id.len();
            next.push(*next_id.entry((class_of[p], sig)).or_insert(fresh));
        }
        let new_count = next_id.len();
        class_of = next;
        if new_count == count {
            return class_of;
        }
        count = new_count;
    }
}

/// The coarsest congruence, by partition refinement starting from a single
/// class.
pub fn max_congruence(g: &Optiongraph) -> Congruence {
    let n = g.position_count();
    let class_of = stabilize(g, vec![0; n], n.min(1));
    let partition = Partition::from_class_assignment(&class_of);
    debug_assert!(is_congruence(g, &partition).is_ok());
    Congruence { partition }
}

/// Whether the only congruence is the discrete one.
pub fn is_simple(g: &Optiongraph) -> bool {
    max_congruence(g).partition().is_discrete()
}

/// Position-count guard for the exhaustive congruence operations.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("graph has {positions} positions, above the enumeration bound {bound}")]
pub struct EnumerationBound {
    pub positions: usize,
    pub bound: usize,
}

/// All set partitions of `members`, classes in first-occurrence order.
fn set_partitions(members: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut assignment = vec![0usize; members.len()];
    fn recurse(
        members: &[usize],
        assignment: &mut Vec<usize>,
        at: usize,
        used: usize,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        if at == members.len() {
            let mut classes = vec![Vec::new(); used];
            for (i, &c) in assignment.iter().enumerate() {
                classes[c].push(members[i]);
            }
            out.push(classes);
            return;
        }
        for c in 0..=used.min(assignment.len() - 1) {
            assignment[at] = c;
            recurse(members, assignment, at + 1, used.max(c + 1), out);
        }
    }
    if members.is_empty() {
        return vec![Vec::new()];
    }
    recurse(members, &mut assignment, 0, 0, &mut out);
    out
}

fn congruence_candidates(g: &Optiongraph) -> Vec<Partition> {
    let top = max_congruence(g);
    let per_block: Vec<Vec<Vec<Vec<usize>>>> = top
        .partition()
        .classes()
        .iter()
        .map(|b| set_partitions(b))
        .collect();
    let n = g.position_count();
    let mut out = Vec::new();
    let mut choice = vec![0usize; per_block.len()];
    loop {
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for (b, &c) in choice.iter().enumerate() {
            classes.extend(per_block[b][c].iter().cloned());
        }
        out.push(Partition::from_classes(n, &classes).expect("blocks are disjoint"));
        let mut at = per_block.len();
        loop {
            if at == 0 {
                return out;
            }
            at -= 1;
            choice[at] += 1;
            if choice[at] < per_block[at].len() {
                break;
            }
            choice[at] = 0;
        }
    }
}

fn filter_and_sort(g: &Optiongraph, candidates: Vec<Partition>, parallel: bool) -> Vec<Congruence> {
    let keep = |p: Partition| -> Option<Congruence> { Congruence::new(g, p).ok() };
    #[cfg(feature = "parallel")]
    let mut found: Vec<Congruence> = if parallel {
        candidates.into_par_iter().filter_map(keep).collect()
    } else {
        candidates.into_iter().filter_map(keep).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let mut found: Vec<Congruence> = {
        let _ = parallel;
        candidates.into_iter().filter_map(keep).collect()
    };
    found.sort_unstable();
    found
}

/// Every congruence of `g`, duplicate-free, in a deterministic order.
/// Candidates are limited to refinements of the maximum congruence, since
/// every congruence refines it.
pub fn all_congruences_bounded(
    g: &Optiongraph,
    bound: usize,
) -> Result<Vec<Congruence>, EnumerationBound> {
    if g.position_count() > bound {
        return Err(EnumerationBound { positions: g.position_count(), bound });
    }
    Ok(filter_and_sort(g, congruence_candidates(g), true))
}

/// [`all_congruences_bounded`] with the default bound.
pub fn all_congruences(g: &Optiongraph) -> Result<Vec<Congruence>, EnumerationBound> {
    all_congruences_bounded(g, DEFAULT_CONGRUENCE_BOUND)
}

/// Sequential twin of [`all_congruences_bounded`], kept callable with the
/// `parallel` feature enabled so the two can be compared directly.
pub fn all_congruences_sequential(
    g: &Optiongraph,
    bound: usize,
) -> Result<Vec<Congruence>, EnumerationBound> {
    if g.position_count() > bound {
        return Err(EnumerationBound { positions: g.position_count(), bound });
    }
    Ok(filter_and_sort(g, congruence_candidates(g), false))
}

/// Greatest lower bound: the coarsest congruence refining both.
///
/// The pairwise intersection of the classes is not always enough. Two
/// congruences can relate positions through incompatible pairings of their
/// options (`p: x y` and `q: z w` are related by both `pq|xz|yw` and
/// `pq|xw|yz`, whose intersection `pq` leaves mismatched option classes),
/// so the intersection is split further until it stabilizes. Every common
/// refinement that is a congruence survives the splitting, which makes the
/// result the meet.
pub fn meet(g: &Optiongraph, a: &Congruence, b: &Congruence) -> Congruence {
    let n = g.position_count();
    assert_eq!(a.partition().position_count(), n, "congruence of this graph");
    assert_eq!(b.partition().position_count(), n, "congruence of this graph");
    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut raw = Vec::with_capacity(n);
    for p in 0..n {
        let key = (a.class_of(p), b.class_of(p));
        let fresh = ids.len();
        raw.push(*ids.entry(key).or_insert(fresh));
    }
    let count = ids.len();
    let class_of = stabilize(g, raw, count);
    let partition = Partition::from_class_assignment(&class_of);
    debug_assert!(is_congruence(g, &partition).is_ok());
    Congruence { partition }
}

/// Least upper bound: the transitive closure of the union, via union-find.
pub fn join(g: &Optiongraph, a: &Congruence, b: &Congruence) -> Congruence {
    let n = g.position_count();
    assert_eq!(a.partition().position_count(), n, "congruence of this graph");
    assert_eq!(b.partition().position_count(), n, "congruence of this graph");
    let mut root: Vec<usize> = (0..n).collect();
    fn find(root: &mut Vec<usize>, mut p: usize) -> usize {
        while root[p] != p {
            root[p] = root[root[p]];
            p = root[p];
        }
        p
    }
    for part in [a.partition(), b.partition()] {
        for class in part.classes() {
            for &m in &class[1..] {
                let (x, y) = (find(&mut root, class[0]), find(&mut root, m));
                if x != y {
                    root[x] = y;
                }
            }
        }
    }
    let raw: Vec<usize> = (0..n).map(|p| find(&mut root, p)).collect();
    let partition = Partition::from_class_assignment(&raw);
    Congruence::new(g, partition)
        .expect("the join of two congruences is a congruence")
}

/// Errors for [`principal_congruence`].
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PrincipalError {
    #[error("no congruence merges positions {p} and {q}")]
    NotMergeable { p: usize, q: usize },
    #[error("no least congruence merges positions {p} and {q}: the minimal ones are incomparable")]
    NoLeastMerger { p: usize, q: usize },
    #[error(transparent)]
    Bound(#[from] EnumerationBound),
}

/// The least congruence merging `p` and `q`, when one exists.
///
/// Some congruence merges them exactly when the maximum congruence does,
/// but a least one can still be missing: two minimal mergers can be
/// incomparable, and their meet then separates `p` and `q` again. The
/// meet over every merger is the least merger precisely when it still
/// merges the pair, so that is checked rather than assumed.
pub fn principal_congruence(
    g: &Optiongraph,
    p: usize,
    q: usize,
) -> Result<Congruence, PrincipalError> {
    let n = g.position_count();
    assert!(p < n && q < n, "positions of this graph");
    let merging: Vec<Congruence> = all_congruences(g)?
        .into_iter()
        .filter(|c| c.same_class(p, q))
        .collect();
    let Some(first) = merging.first().cloned() else {
        return Err(PrincipalError::NotMergeable { p, q });
    };
    let low = merging.iter().skip(1).fold(first, |acc, c| meet(g, &acc, c));
    if low.same_class(p, q) {
        Ok(low)
    } else {
        Err(PrincipalError::NoLeastMerger { p, q })
    }
}

/// The congruence lattice: all congruences with their refinement order,
/// cover relation, top and bottom.
#[derive(Clone, Debug)]
pub struct CongruenceLattice {
    elements: Vec<Congruence>,
    leq: Vec<Vec<bool>>,
    covers: Vec<(usize, usize)>,
    bottom: usize,
    top: usize,
}

impl CongruenceLattice {
    pub fn elements(&self) -> &[Congruence] {
        &self.elements
    }

    /// Whether `elements()[i]` refines `elements()[j]`.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    /// Cover pairs `(i, j)`: `i < j` with nothing strictly between.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    /// Index of the discrete congruence.
    pub fn bottom(&self) -> usize {
        self.bottom
    }

    /// Index of the maximum congruence.
    pub fn top(&self) -> usize {
        self.top
    }

    pub fn element_index(&self, c: &Congruence) -> Option<usize> {
        self.elements.iter().position(|e| e == c)
    }
}

/// Builds the full congruence lattice of `g`, subject to the same bound as
/// [`all_congruences`].
pub fn congruence_lattice(g: &Optiongraph) -> Result<CongruenceLattice, EnumerationBound> {
    congruence_lattice_bounded(g, DEFAULT_CONGRUENCE_BOUND)
}

/// [`congruence_lattice`] with an explicit enumeration bound.
pub fn congruence_lattice_bounded(
    g: &Optiongraph,
    bound: usize,
) -> Result<CongruenceLattice, EnumerationBound> {
    let elements = all_congruences_bounded(g, bound)?;
    let k = elements.len();
    let mut leq = vec![vec![false; k]; k];
    for i in 0..k {
        for j in 0..k {
            leq[i][j] = elements[i].partition().refines(elements[j].partition());
        }
    }
    let mut covers = Vec::new();
    for i in 0..k {
        for j in 0..k {
            if i == j || !leq[i][j] {
                continue;
            }
            let strictly_between =
                (0..k).any(|m| m != i && m != j && leq[i][m] && leq[m][j]);
            if !strictly_between {
                covers.push((i, j));
            }
        }
    }
    let bottom = (0..k).find(|&i| (0..k).all(|j| leq[i][j])).expect("discrete refines all");
    let top = (0..k).find(|&i| (0..k).all(|j| leq[j][i])).expect("the maximum is above all");
    Ok(CongruenceLattice { elements, leq, covers, bottom, top })
}
