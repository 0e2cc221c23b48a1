//! Disjunctive sums: positions are pairs, and a move plays in exactly one
//! component.
//!
//! The sum of graphs is again a graph, maps and congruences of the parts
//! combine to maps and congruences of the sum, and the familiar additivity
//! facts about values become testable statements about these constructions.

use thiserror::Error;

use crate::congruence::{Congruence, Partition};
use crate::graph::Optiongraph;
use crate::morphism::OptionMap;

/// Errors forming pair labels.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SumError {
    #[error("separator {0:?} must be a single non-reserved, non-whitespace character")]
    BadSeparator(char),
    #[error("label {label:?} contains the separator {separator:?}")]
    SeparatorCollision { label: String, separator: char },
}

/// A sum graph plus the pairing that built it: position `(i, j)` of the
/// parts lives at index `i * right_count + j` and is labelled
/// `left,right`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameSum {
    pub graph: Optiongraph,
    left_count: usize,
    right_count: usize,
    separator: char,
}

impl GameSum {
    pub fn left_count(&self) -> usize {
        self.left_count
    }

    pub fn right_count(&self) -> usize {
        self.right_count
    }

    pub fn separator(&self) -> char {
        self.separator
    }

    /// Index of the pair `(left, right)` in the sum graph.
    pub fn pair_id(&self, left: usize, right: usize) -> usize {
        assert!(left < self.left_count && right < self.right_count);
        left * self.right_count + right
    }

    /// The component positions of a sum position.
    pub fn unpair(&self, id: usize) -> (usize, usize) {
        assert!(id < self.left_count * self.right_count);
        (id / self.right_count, id % self.right_count)
    }
}

/// The sum with an explicit pair-label separator, rejected if any label
/// already contains it.
pub fn sum_with_separator(
    c: &Optiongraph,
    d: &Optiongraph,
    separator: char,
) -> Result<GameSum, SumError> {
    if separator.is_whitespace() || separator == ':' || separator == '#' {
        return Err(SumError::BadSeparator(separator));
    }
    for g in [c, d] {
        for label in g.labels() {
            if label.contains(separator) {
                return Err(SumError::SeparatorCollision {
                    label: label.to_string(),
                    separator,
                });
            }
        }
    }
    let (nc, nd) = (c.position_count(), d.position_count());
    let mut labels = Vec::with_capacity(nc * nd);
    let mut options = Vec::with_capacity(nc * nd);
    for p in 0..nc {
        for q in 0..nd {
            labels.push(format!("{}{}{}", c.label(p), separator, d.label(q)));
            let mut opts: Vec<usize> = c
                .options(p)
                .iter()
                .map(|&o| o * nd + q)
                .chain(d.options(q).iter().map(|&o| p * nd + o))
                .collect();
            opts.sort_unstable();
            // a loop in each component reaches the same pair twice
            opts.dedup();
            options.push(opts);
        }
    }
    let graph = Optiongraph::new(labels, options)
        .expect("pair labels are valid and distinct without the separator");
    Ok(GameSum { graph, left_count: nc, right_count: nd, separator })
}

/// The sum with the default `,` separator: a move is a move in the left
/// part or a move in the right part.
pub fn sum(c: &Optiongraph, d: &Optiongraph) -> Result<GameSum, SumError> {
    sum_with_separator(c, d, ',')
}

/// Combines maps componentwise into a map between sums:
/// `(p, q) -> (f(p), g(q))`. Verified when both inputs are.
pub fn product_map(f: &OptionMap, g: &OptionMap) -> Result<OptionMap, SumError> {
    let src = sum(f.source(), g.source())?;
    let dst = sum(f.target(), g.target())?;
    let assignment: Vec<usize> = (0..src.left_count * src.right_count)
        .map(|id| {
            let (p, q) = src.unpair(id);
            dst.pair_id(f.apply(p), g.apply(q))
        })
        .collect();
    let mut map = OptionMap::new(src.graph, dst.graph, assignment)
        .expect("pairing is total");
    if f.is_verified() && g.is_verified() {
        map.verify()
            .expect("the product of option-preserving maps preserves options");
    }
    Ok(map)
}

/// Combines congruences componentwise: pairs are equivalent when both
/// coordinates are.
pub fn sum_congruence(
    c: &Optiongraph,
    d: &Optiongraph,
    phi: &Congruence,
    psi: &Congruence,
) -> Result<Congruence, SumError> {
    assert_eq!(phi.partition().position_count(), c.position_count());
    assert_eq!(psi.partition().position_count(), d.position_count());
    let s = sum(c, d)?;
    let nd = d.position_count();
    let raw: Vec<usize> = (0..c.position_count() * nd)
        .map(|id| phi.class_of(id / nd) * nd + psi.class_of(id % nd))
        .collect();
    let partition = Partition::from_class_assignment(&raw);
    Ok(Congruence::new(&s.graph, partition)
        .expect("componentwise congruences combine to a congruence of the sum"))
}
