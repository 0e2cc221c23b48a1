//! Game values on optiongraphs: who wins, how fast, and the loopy
//! generalisation of nim-values.
//!
//! Everything here is a least fixed point computed by retrograde analysis
//! from the terminals. Positions that never settle are the drawn or
//! infinite-valued ones; on graphs where play always ends the values agree
//! with the classical theory.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::graph::Optiongraph;

/// Who wins with both players playing optimally, by the normal rule
/// (a player with no move loses), draws allowed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    NextWins,
    PreviousWins,
    Draw,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::NextWins => "N",
            Outcome::PreviousWins => "P",
            Outcome::Draw => "D",
        })
    }
}

/// Moves needed to finish under optimal play: the winner hurries, the loser
/// stalls. Infinite when neither can force an end.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Remoteness {
    Finite(u32),
    Infinite,
}

impl fmt::Display for Remoteness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Remoteness::Finite(v) => write!(f, "{v}"),
            Remoteness::Infinite => f.write_str("inf"),
        }
    }
}

/// Nim-value extended to loopy play: either a settled finite value or
/// infinite with the set of settled finite values among the options as a
/// subscript.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NimValue {
    Finite(u32),
    Infinite(BTreeSet<u32>),
}

impl fmt::Display for NimValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NimValue::Finite(v) => write!(f, "{v}"),
            NimValue::Infinite(s) if s.is_empty() => f.write_str("inf"),
            NimValue::Infinite(s) => {
                let inner: Vec<String> = s.iter().map(u32::to_string).collect();
                write!(f, "inf{{{}}}", inner.join(","))
            }
        }
    }
}

/// How a position relates to infinite play.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FimClass {
    /// Every play from here ends.
    Finite,
    /// No play from here ends.
    Infinite,
    /// Some plays end, some need not.
    Mixed,
}

/// The three-way split of positions by [`FimClass`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FimPartition {
    classes: Vec<FimClass>,
}

impl FimPartition {
    pub fn class_of(&self, p: usize) -> FimClass {
        self.classes[p]
    }

    fn select(&self, want: FimClass) -> Vec<usize> {
        (0..self.classes.len()).filter(|&p| self.classes[p] == want).collect()
    }

    /// Positions from which every play ends, in declaration order.
    pub fn finite(&self) -> Vec<usize> {
        self.select(FimClass::Finite)
    }

    /// Positions from which no play ends, in declaration order.
    pub fn infinite(&self) -> Vec<usize> {
        self.select(FimClass::Infinite)
    }

    /// Positions with both kinds of play, in declaration order.
    pub fn mixed(&self) -> Vec<usize> {
        self.select(FimClass::Mixed)
    }
}

/// Splits positions by whether play from them must end, cannot end, or may
/// do either. A position is `Finite` when it cannot reach a cycle, and
/// `Infinite` when it cannot reach a terminal.
pub fn fim_partition(g: &Optiongraph) -> FimPartition {
    let n = g.position_count();
    let preds = g.predecessors();
    // positions from which some terminal is reachable
    let mut reaches_end = vec![false; n];
    let mut queue: Vec<usize> = g.terminals();
    for &t in &queue {
        reaches_end[t] = true;
    }
    let mut qi = 0;
    while qi < queue.len() {
        let p = queue[qi];
        qi += 1;
        for &q in &preds[p] {
            if !reaches_end[q] {
                reaches_end[q] = true;
                queue.push(q);
            }
        }
    }
    // positions from which every play ends: settle once all options settled
    let mut all_end = vec![false; n];
    let mut remaining: Vec<usize> = (0..n).map(|p| g.options(p).len()).collect();
    let mut queue: Vec<usize> = g.terminals();
    for &t in &queue {
        all_end[t] = true;
    }
    let mut qi = 0;
    while qi < queue.len() {
        let p = queue[qi];
        qi += 1;
        for &q in &preds[p] {
            if all_end[q] {
                continue;
            }
            remaining[q] -= 1;
            if remaining[q] == 0 {
                all_end[q] = true;
                queue.push(q);
            }
        }
    }
    let classes = (0..n)
        .map(|p| {
            if all_end[p] {
                FimClass::Finite
            } else if !reaches_end[p] {
                FimClass::Infinite
            } else {
                FimClass::Mixed
            }
        })
        .collect();
    FimPartition { classes }
}

/// Whether play always ends from every position.
pub fn is_rulegraph(g: &Optiongraph) -> bool {
    fim_partition(g).classes.iter().all(|&c| c == FimClass::Finite)
}

/// Normal-play outcomes by retrograde analysis: terminals lose for the
/// mover, a position wins when some option loses, loses when all options
/// win, and draws when the fixed point never decides it.
pub fn outcomes_normal(g: &Optiongraph) -> Vec<Outcome> {
    let n = g.position_count();
    let preds = g.predecessors();
    let mut settled: Vec<Option<Outcome>> = vec![None; n];
    let mut losing_options: Vec<usize> = (0..n).map(|p| g.options(p).len()).collect();
    let mut queue: Vec<usize> = g.terminals();
    for &t in &queue {
        settled[t] = Some(Outcome::PreviousWins);
    }
    let mut qi = 0;
    while qi < queue.len() {
        let p = queue[qi];
        qi += 1;
        let o = settled[p].expect("queued positions are settled");
        for &q in &preds[p] {
            if settled[q].is_some() {
                continue;
            }
            match o {
                Outcome::PreviousWins => {
                    settled[q] = Some(Outcome::NextWins);
                    queue.push(q);
                }
                Outcome::NextWins => {
                    losing_options[q] -= 1;
                    if losing_options[q] == 0 {
                        settled[q] = Some(Outcome::PreviousWins);
                        queue.push(q);
                    }
                }
                Outcome::Draw => unreachable!("draws are never queued"),
            }
        }
    }
    settled.into_iter().map(|s| s.unwrap_or(Outcome::Draw)).collect()
}

/// Remoteness in the style of Smith: terminals are 0; a position is odd
/// `v` when it can move to an even value `v - 1` and no smaller even value,
/// and even `v` when all its options are odd with largest `v - 1`.
/// Positions the rules never settle are infinite.
pub fn remoteness(g: &Optiongraph) -> Vec<Remoteness> {
    let n = g.position_count();
    let preds = g.predecessors();
    let mut value: Vec<Option<u32>> = vec![None; n];
    let mut remaining: Vec<usize> = (0..n).map(|p| g.options(p).len()).collect();
    let mut even_seen = vec![false; n];
    let mut max_settled = vec![0u32; n];
    // bucket v holds candidates that may settle at v; stale entries skipped
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); n + 2];
    for t in g.terminals() {
        buckets[0].push(t);
    }
    for v in 0..buckets.len() {
        let mut bi = 0;
        while bi < buckets[v].len() {
            let p = buckets[v][bi];
            bi += 1;
            if value[p].is_some() {
                continue;
            }
            let v = v as u32;
            value[p] = Some(v);
            for &q in &preds[p] {
                if value[q].is_some() {
                    continue;
                }
                remaining[q] -= 1;
                max_settled[q] = max_settled[q].max(v);
                if v % 2 == 0 {
                    if !even_seen[q] {
                        even_seen[q] = true;
                        buckets[v as usize + 1].push(q);
                    }
                } else if remaining[q] == 0 && !even_seen[q] {
                    buckets[max_settled[q] as usize + 1].push(q);
                }
            }
        }
    }
    value
        .into_iter()
        .map(|v| v.map_or(Remoteness::Infinite, Remoteness::Finite))
        .collect()
}

fn mex(values: &BTreeSet<u32>) -> u32 {
    let mut v = 0;
    while values.contains(&v) {
        v += 1;
    }
    v
}

/// Extended nim-values by round-based fixed point. A position settles at
/// `v`, the mex of its settled options, once each of its unsettled options
/// can answer by moving to a settled `v`; otherwise it stays infinite,
/// subscripted by the settled values among its options.
pub fn extended_nim(g: &Optiongraph) -> Vec<NimValue> {
    let n = g.position_count();
    let mut value: Vec<Option<u32>> = vec![None; n];
    loop {
        let mut settle: Vec<(usize, u32)> = Vec::new();
        for p in 0..n {
            if value[p].is_some() {
                continue;
            }
            let settled_vals: BTreeSet<u32> =
                g.options(p).iter().filter_map(|&o| value[o]).collect();
            let v = mex(&settled_vals);
            let reachable_everywhere = g.options(p).iter().all(|&o| {
                value[o].is_some()
                    || g.options(o).iter().any(|&oo| value[oo] == Some(v))
            });
            if reachable_everywhere {
                settle.push((p, v));
            }
        }
        if settle.is_empty() {
            break;
        }
        for (p, v) in settle {
            value[p] = Some(v);
        }
    }
    (0..n)
        .map(|p| match value[p] {
            Some(v) => NimValue::Finite(v),
            None => NimValue::Infinite(
                g.options(p).iter().filter_map(|&o| value[o]).collect(),
            ),
        })
        .collect()
}

/// Raised when an operation needs play to end from every position.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("not a rulegraph: position {position} can start infinite play")]
pub struct NotRulegraph {
    pub position: usize,
}

fn require_rulegraph(g: &Optiongraph) -> Result<Vec<usize>, NotRulegraph> {
    // settle order doubles as a topological order, options before users
    let n = g.position_count();
    let preds = g.predecessors();
    let mut order: Vec<usize> = g.terminals();
    let mut remaining: Vec<usize> = (0..n).map(|p| g.options(p).len()).collect();
    let mut done = vec![false; n];
    for &t in &order {
        done[t] = true;
    }
    let mut qi = 0;
    while qi < order.len() {
        let p = order[qi];
        qi += 1;
        for &q in &preds[p] {
            if done[q] {
                continue;
            }
            remaining[q] -= 1;
            if remaining[q] == 0 {
                done[q] = true;
                order.push(q);
            }
        }
    }
    match (0..n).find(|&p| !done[p]) {
        Some(position) => Err(NotRulegraph { position }),
        None => Ok(order),
    }
}

/// Misère-play outcomes, defined only when play always ends: the player
/// who cannot move wins, so terminals favour the mover.
pub fn misere_outcomes(g: &Optiongraph) -> Result<Vec<Outcome>, NotRulegraph> {
    let order = require_rulegraph(g)?;
    let mut out = vec![Outcome::NextWins; g.position_count()];
    for &p in &order {
        if g.is_terminal(p) {
            out[p] = Outcome::NextWins;
        } else if g.options(p).iter().any(|&o| out[o] == Outcome::PreviousWins) {
            out[p] = Outcome::NextWins;
        } else {
            out[p] = Outcome::PreviousWins;
        }
    }
    Ok(out)
}

/// Length of the longest play from each position; defined only when play
/// always ends.
pub fn formal_birthday(g: &Optiongraph) -> Result<Vec<u32>, NotRulegraph> {
    let order = require_rulegraph(g)?;
    let mut day = vec![0u32; g.position_count()];
    for &p in &order {
        day[p] = g.options(p).iter().map(|&o| day[o] + 1).max().unwrap_or(0);
    }
    Ok(day)
}

/// The three classical values side by side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Valuation {
    pub outcomes: Vec<Outcome>,
    pub remoteness: Vec<Remoteness>,
    pub nim: Vec<NimValue>,
}

/// Computes outcomes, remoteness and extended nim-values together.
pub fn valuation(g: &Optiongraph) -> Valuation {
    Valuation {
        outcomes: outcomes_normal(g),
        remoteness: remoteness(g),
        nim: extended_nim(g),
    }
}
