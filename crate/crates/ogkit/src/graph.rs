//! Core optiongraph representation and the `.og` text format.
//!
//! A position is identified by a dense index in declaration order; labels are
//! kept alongside for I/O. Option lists preserve the order they were written
//! in, and structural equality compares that order too, so parse/serialize is
//! an exact round trip.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// A finite impartial game: positions plus, for each position, the set of
/// positions reachable in one move (its options).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Optiongraph {
    labels: Vec<String>,
    options: Vec<Vec<usize>>,
}

/// Construction errors for graphs assembled in memory.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("an optiongraph needs at least one position")]
    Empty,
    #[error("invalid label {0:?}: labels are nonempty and contain no whitespace, ':' or '#'")]
    BadLabel(String),
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("option index {option} out of range for {positions} positions")]
    OptionOutOfRange { option: usize, positions: usize },
    #[error("position {0:?} lists the same option twice")]
    DuplicateOption(String),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("position index {position} out of range for {positions} positions")]
    PositionOutOfRange { position: usize, positions: usize },
}

/// Errors reading the `.og` text format, with 1-based line numbers.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("no positions declared")]
    EmptyDocument,
    #[error("line {line}: missing ':' after the position label")]
    MissingColon { line: usize },
    #[error("line {line}: {0}", .error)]
    BadLabel { line: usize, error: GraphError },
    #[error("line {line}: duplicate declaration of {label:?}")]
    DuplicateLabel { line: usize, label: String },
    #[error("line {line}: option {token:?} is not a declared position")]
    UndeclaredOption { line: usize, token: String },
    #[error("line {line}: option {token:?} is not a valid label")]
    BadOptionToken { line: usize, token: String },
    #[error("line {line}: position {label:?} lists option {token:?} twice")]
    DuplicateOption { line: usize, label: String, token: String },
}

fn validate_label(label: &str) -> Result<(), GraphError> {
    if label.is_empty() || label.chars().any(|c| c.is_whitespace() || c == ':' || c == '#') {
        return Err(GraphError::BadLabel(label.to_string()));
    }
    Ok(())
}

impl Optiongraph {
    /// Builds a graph from labels and per-position option lists, validating
    /// every structural invariant.
    pub fn new(labels: Vec<String>, options: Vec<Vec<usize>>) -> Result<Self, GraphError> {
        if labels.is_empty() {
            return Err(GraphError::Empty);
        }
        assert_eq!(labels.len(), options.len(), "one option list per position");
        let mut seen = HashMap::new();
        for (id, label) in labels.iter().enumerate() {
            validate_label(label)?;
            if seen.insert(label.clone(), id).is_some() {
                return Err(GraphError::DuplicateLabel(label.clone()));
            }
        }
        for (id, opts) in options.iter().enumerate() {
            let mut seen_opt = vec![false; labels.len()];
            for &o in opts {
                if o >= labels.len() {
                    return Err(GraphError::OptionOutOfRange {
                        option: o,
                        positions: labels.len(),
                    });
                }
                if seen_opt[o] {
                    return Err(GraphError::DuplicateOption(labels[id].clone()));
                }
                seen_opt[o] = true;
            }
        }
        Ok(Optiongraph { labels, options })
    }

    /// Convenience constructor from `(label, options-by-label)` rows.
    /// Options may reference positions declared later.
    pub fn from_adjacency(rows: &[(&str, &[&str])]) -> Result<Self, GraphError> {
        let labels: Vec<String> = rows.iter().map(|(l, _)| l.to_string()).collect();
        let mut index = HashMap::new();
        for (id, label) in labels.iter().enumerate() {
            index.insert(label.as_str(), id);
        }
        let mut options = Vec::with_capacity(rows.len());
        for (_, opts) in rows {
            let row = opts
                .iter()
                .map(|o| {
                    index
                        .get(o)
                        .copied()
                        .ok_or_else(|| GraphError::UnknownLabel(o.to_string()))
                })
                .collect::<Result<Vec<usize>, _>>()?;
            options.push(row);
        }
        Self::new(labels, options)
    }

    /// Reads the `.og` format: one `label: option option ...` line per
    /// position, `#` comments, blank lines ignored, CRLF tolerated.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        struct Line<'a> {
            number: usize,
            label: &'a str,
            rest: &'a str,
        }
        let mut lines = Vec::new();
        let mut index: HashMap<&str, usize> = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let number = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((label, rest)) = content.split_once(':') else {
                return Err(ParseError::MissingColon { line: number });
            };
            let label = label.trim();
            validate_label(label).map_err(|error| ParseError::BadLabel { line: number, error })?;
            if index.insert(label, lines.len()).is_some() {
                return Err(ParseError::DuplicateLabel {
                    line: number,
                    label: label.to_string(),
                });
            }
            lines.push(Line { number, label, rest });
        }
        if lines.is_empty() {
            return Err(ParseError::EmptyDocument);
        }
        let labels: Vec<String> = lines.iter().map(|l| l.label.to_string()).collect();
        let mut options = Vec::with_capacity(lines.len());
        for line in &lines {
            let mut row = Vec::new();
            for token in line.rest.split_whitespace() {
                if validate_label(token).is_err() {
                    return Err(ParseError::BadOptionToken {
                        line: line.number,
                        token: token.to_string(),
                    });
                }
                let Some(&id) = index.get(token) else {
                    return Err(ParseError::UndeclaredOption {
                        line: line.number,
                        token: token.to_string(),
                    });
                };
                if row.contains(&id) {
                    return Err(ParseError::DuplicateOption {
                        line: line.number,
                        label: line.label.to_string(),
                        token: token.to_string(),
                    });
                }
                row.push(id);
            }
            options.push(row);
        }
        Ok(Optiongraph { labels, options })
    }

    /// Writes the `.og` format with LF line endings, positions in
    /// declaration order. `parse(serialize(g))` reproduces `g` exactly.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (id, opts) in self.options.iter().enumerate() {
            out.push_str(&self.labels[id]);
            out.push(':');
            for &o in opts {
                out.push(' ');
                out.push_str(&self.labels[o]);
            }
            out.push('\n');
        }
        out
    }

    pub fn position_count(&self) -> usize {
        self.labels.len()
    }

    /// Total number of arrows, counting multiplicity across positions.
    pub fn arrow_count(&self) -> usize {
        self.options.iter().map(Vec::len).sum()
    }

    pub fn label(&self, id: usize) -> &str {
        &self.labels[id]
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(String::as_str)
    }

    /// Looks a position up by label.
    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn options(&self, id: usize) -> &[usize] {
        &self.options[id]
    }

    pub fn is_terminal(&self, id: usize) -> bool {
        self.options[id].is_empty()
    }

    /// Terminal positions in declaration order.
    pub fn terminals(&self) -> Vec<usize> {
        (0..self.position_count()).filter(|&p| self.is_terminal(p)).collect()
    }

    /// Reverse adjacency: for each position, the positions that list it as
    /// an option, in declaration order.
    pub fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut preds = vec![Vec::new(); self.position_count()];
        for (p, opts) in self.options.iter().enumerate() {
            for &o in opts {
                preds[o].push(p);
            }
        }
        preds
    }

    /// Graphviz rendering. `annotations`, when given, replaces node display
    /// labels (one entry per position); node identifiers stay the position
    /// labels either way.
    pub fn to_dot(&self, annotations: Option<&[String]>) -> String {
        if let Some(a) = annotations {
            assert_eq!(a.len(), self.position_count(), "one annotation per position");
        }
        fn quote(s: &str) -> String {
            let escaped: String = s
                .chars()
                .flat_map(|c| match c {
                    '"' | '\\' => vec!['\\', c],
                    _ => vec![c],
                })
                .collect();
            format!("\"{escaped}\"")
        }
        let mut out = String::from("digraph {\n");
        for id in 0..self.position_count() {
            let display = annotations.map_or(self.label(id), |a| a[id].as_str());
            out.push_str(&format!(
                "  {} [label={}];\n",
                quote(self.label(id)),
                quote(display)
            ));
        }
        for (p, opts) in self.options.iter().enumerate() {
            for &o in opts {
                out.push_str(&format!(
                    "  {} -> {};\n",
                    quote(self.label(p)),
                    quote(self.label(o))
                ));
            }
        }
        out.push_str("}\n");
        out
    }
}

impl fmt::Display for Optiongraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

/// Membership errors for option-closed position sets.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SubgraphError {
    #[error("a suboptiongraph needs at least one position")]
    Empty,
    #[error("member index {position} out of range for {positions} positions")]
    OutOfRange { position: usize, positions: usize },
    #[error("not option-closed: member {member:?} has option {option:?} outside the set")]
    NotClosed { member: String, option: String },
}

/// An option-closed, nonempty set of positions of a parent graph. Closure
/// means every option of a member is again a member, so the induced graph is
/// itself an optiongraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Suboptiongraph {
    parent: Optiongraph,
    members: Vec<usize>,
}

impl Suboptiongraph {
    /// Validates that `members` is nonempty and option-closed in `parent`.
    /// The witness in the error names the first member whose option escapes.
    pub fn new(parent: &Optiongraph, members: &[usize]) -> Result<Self, SubgraphError> {
        if members.is_empty() {
            return Err(SubgraphError::Empty);
        }
        let n = parent.position_count();
        let mut included = vec![false; n];
        for &m in members {
            if m >= n {
                return Err(SubgraphError::OutOfRange { position: m, positions: n });
            }
            included[m] = true;
        }
        let mut sorted: Vec<usize> = (0..n).filter(|&p| included[p]).collect();
        for &m in &sorted {
            for &o in parent.options(m) {
                if !included[o] {
                    return Err(SubgraphError::NotClosed {
                        member: parent.label(m).to_string(),
                        option: parent.label(o).to_string(),
                    });
                }
            }
        }
        sorted.shrink_to_fit();
        Ok(Suboptiongraph { parent: parent.clone(), members: sorted })
    }

    pub fn parent(&self) -> &Optiongraph {
        &self.parent
    }

    /// Member positions as parent indices, in declaration order.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, parent_id: usize) -> bool {
        self.members.binary_search(&parent_id).is_ok()
    }

    /// Parent index of the `local`-th member.
    pub fn parent_id(&self, local: usize) -> usize {
        self.members[local]
    }

    /// Member index of a parent position, if it belongs to the set.
    pub fn local_id(&self, parent_id: usize) -> Option<usize> {
        self.members.binary_search(&parent_id).ok()
    }

    /// The induced optiongraph on the members, reindexed densely with labels
    /// carried over.
    pub fn extract(&self) -> Optiongraph {
        let labels: Vec<String> =
            self.members.iter().map(|&m| self.parent.label(m).to_string()).collect();
        let options: Vec<Vec<usize>> = self
            .members
            .iter()
            .map(|&m| {
                self.parent
                    .options(m)
                    .iter()
                    .map(|&o| self.local_id(o).expect("members are option-closed"))
                    .collect()
            })
            .collect();
        Optiongraph::new(labels, options).expect("induced graph inherits validity")
    }
}

/// The least option-closed set containing `seeds`: everything reachable by
/// following options, the seeds included.
pub fn reachable_closure(g: &Optiongraph, seeds: &[usize]) -> Result<Suboptiongraph, GraphError> {
    let n = g.position_count();
    let mut included = vec![false; n];
    let mut stack = Vec::new();
    for &s in seeds {
        if s >= n {
            return Err(GraphError::PositionOutOfRange { position: s, positions: n });
        }
        if !included[s] {
            included[s] = true;
            stack.push(s);
        }
    }
    if stack.is_empty() {
        return Err(GraphError::Empty);
    }
    while let Some(p) = stack.pop() {
        for &o in g.options(p) {
            if !included[o] {
                included[o] = true;
                stack.push(o);
            }
        }
    }
    let members: Vec<usize> = (0..n).filter(|&p| included[p]).collect();
    Ok(Suboptiongraph::new(g, &members).expect("closure is option-closed"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trips_exactly() {
        let src = "w: w z\nz: z\na: a b s z\nb: a t z\ns:\nt:\nr: s t\n";
        let g = Optiongraph::parse(src).unwrap();
        assert_eq!(g.position_count(), 7);
        assert_eq!(g.arrow_count(), 12);
        assert_eq!(g.serialize(), src);
        assert_eq!(Optiongraph::parse(&g.serialize()).unwrap(), g);
    }

    #[test]
    fn parse_tolerates_comments_blank_lines_and_crlf() {
        let src = "# a two position game\r\n\r\na: b  # the only move\r\nb:\r\n";
        let g = Optiongraph::parse(src).unwrap();
        assert_eq!(g.serialize(), "a: b\nb:\n");
    }

    #[test]
    fn forward_references_resolve() {
        let g = Optiongraph::parse("a: b\nb:\n").unwrap();
        assert_eq!(g.options(0), &[1]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert_eq!(
            Optiongraph::parse("a: b\nb\n"),
            Err(ParseError::MissingColon { line: 2 })
        );
        assert_eq!(
            Optiongraph::parse("a: b\n"),
            Err(ParseError::UndeclaredOption { line: 1, token: "b".into() })
        );
        assert_eq!(
            Optiongraph::parse("a:\n\na:\n"),
            Err(ParseError::DuplicateLabel { line: 3, label: "a".into() })
        );
        assert_eq!(
            Optiongraph::parse("a: a a\n"),
            Err(ParseError::DuplicateOption { line: 1, label: "a".into(), token: "a".into() })
        );
        assert_eq!(Optiongraph::parse("# nothing\n"), Err(ParseError::EmptyDocument));
        assert!(matches!(
            Optiongraph::parse(":\n"),
            Err(ParseError::BadLabel { line: 1, .. })
        ));
    }

    #[test]
    fn labels_reject_reserved_characters() {
        assert!(matches!(
            Optiongraph::from_adjacency(&[("a:b", &[])]),
            Err(GraphError::BadLabel(_))
        ));
        assert!(matches!(
            Optiongraph::from_adjacency(&[("", &[])]),
            Err(GraphError::BadLabel(_))
        ));
        assert!(Optiongraph::from_adjacency(&[("{a,b}", &[])]).is_ok());
    }

    #[test]
    fn terminals_and_lookup() {
        let g = Optiongraph::parse("a: b\nb:\nc:\n").unwrap();
        assert_eq!(g.terminals(), vec![1, 2]);
        assert_eq!(g.position("b"), Some(1));
        assert_eq!(g.position("x"), None);
        assert!(g.is_terminal(2));
        assert!(!g.is_terminal(0));
    }

    #[test]
    fn closure_follows_options_only_forward() {
        let g = Optiongraph::parse("a: b\nb: c\nc:\nd: a\n").unwrap();
        let sub = reachable_closure(&g, &[1]).unwrap();
        assert_eq!(sub.members(), &[1, 2]);
        let sub = reachable_closure(&g, &[3]).unwrap();
        assert_eq!(sub.members(), &[0, 1, 2, 3]);
    }

    #[test]
    fn closure_is_idempotent_and_monotone() {
        let g = Optiongraph::parse("a: b\nb: c\nc: a\nd:\n").unwrap();
        let once = reachable_closure(&g, &[0]).unwrap();
        let twice = reachable_closure(&g, once.members()).unwrap();
        assert_eq!(once.members(), twice.members());
        let bigger = reachable_closure(&g, &[0, 3]).unwrap();
        assert!(once.members().iter().all(|m| bigger.contains(*m)));
    }

    #[test]
    fn suboptiongraph_requires_closure() {
        let g = Optiongraph::parse("a: b\nb: c\nc:\n").unwrap();
        assert_eq!(
            Suboptiongraph::new(&g, &[0]),
            Err(SubgraphError::NotClosed { member: "a".into(), option: "b".into() })
        );
        assert_eq!(Suboptiongraph::new(&g, &[]), Err(SubgraphError::Empty));
        let sub = Suboptiongraph::new(&g, &[2, 1]).unwrap();
        assert_eq!(sub.members(), &[1, 2]);
    }

    #[test]
    fn extraction_keeps_labels_and_structure() {
        let g = Optiongraph::parse("a: b\nb: c\nc:\nd: a\n").unwrap();
        let sub = reachable_closure(&g, &[0]).unwrap();
        let e = sub.extract();
        assert_eq!(e.serialize(), "a: b\nb: c\nc:\n");
    }

    #[test]
    fn dot_output_quotes_and_annotates() {
        let g = Optiongraph::parse("a: b\nb:\n").unwrap();
        let plain = g.to_dot(None);
        assert!(plain.contains("\"a\" [label=\"a\"];"));
        assert!(plain.contains("\"a\" -> \"b\";"));
        let annotated = g.to_dot(Some(&["inf{0,1}".to_string(), "0".to_string()]));
        assert!(annotated.contains("\"a\" [label=\"inf{0,1}\"];"));
    }
}
