//! Seeded corpus and independent oracles shared by the integration suites.
//!
//! The oracles re-derive everything from definitions: partitions by direct
//! enumeration, outcomes by bounded game-tree iteration, nim-values and
//! remoteness by textbook recursion over acyclic graphs. None of them share
//! a code path with the library internals they cross-check.

// Each integration target compiles this module separately and uses a
// different subset of it.
#![allow(dead_code)]

use std::collections::BTreeSet;

use ogkit::{
    all_congruences, find_isomorphism, fim_partition, first_iso_witness, formal_birthday,
    fourth_iso_alpha, is_rulegraph, join, max_congruence, meet, misere_outcomes, quotient,
    random_optiongraph, reachable_closure, second_iso_witness, third_iso_witness, valuation,
    Congruence, FimClass, NimValue, OptionMap, Optiongraph, Outcome, Remoteness,
};

/// 500 seeded graphs with 1 to 7 positions across a spread of densities.
pub fn corpus() -> Vec<Optiongraph> {
    (0..500u64)
        .map(|seed| {
            let n = 1 + (seed % 7) as usize;
            let p = [0.15, 0.3, 0.45, 0.65][(seed / 7 % 4) as usize];
            random_optiongraph(n, p, seed)
        })
        .collect()
}

/// Every set partition of `{0, .., n-1}` as a canonical class-assignment
/// vector (restricted growth: each class id first appears in order).
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, n: usize, next: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for c in 0..=next {
            cur.push(c);
            go(i + 1, n, next.max(c + 1), cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, 0, &mut Vec::with_capacity(n), &mut out);
    out
}

/// The congruence condition read straight off the definition: positions in
/// one class must see the same set of option classes.
pub fn congruence_holds(g: &Optiongraph, class_of: &[usize]) -> bool {
    let n = g.position_count();
    let seen = |p: usize| -> BTreeSet<usize> {
        g.options(p).iter().map(|&o| class_of[o]).collect()
    };
    (0..n).all(|p| {
        (0..n).all(|q| class_of[p] != class_of[q] || seen(p) == seen(q))
    })
}

/// All congruences by brute force over every set partition.
pub fn oracle_congruences(g: &Optiongraph) -> Vec<Vec<usize>> {
    all_partitions(g.position_count())
        .into_iter()
        .filter(|c| congruence_holds(g, c))
        .collect()
}

pub fn class_vector(c: &Congruence) -> Vec<usize> {
    (0..c.partition().position_count()).map(|p| c.class_of(p)).collect()
}

/// `a` refines `b` on class-assignment vectors.
pub fn vector_refines(a: &[usize], b: &[usize]) -> bool {
    let n = a.len();
    (0..n).all(|p| (0..n).all(|q| a[p] != a[q] || b[p] == b[q]))
}

/// Outcomes by iterating the monotone win/lose operator on the game tree.
/// Both labellings are stable after `2n` rounds; whatever is still
/// unlabelled is a draw.
pub fn oracle_outcomes(g: &Optiongraph) -> Vec<Outcome> {
    let n = g.position_count();
    let mut win = vec![false; n];
    let mut lose = vec![false; n];
    for _ in 0..2 * n + 2 {
        let (prev_win, prev_lose) = (win.clone(), lose.clone());
        for p in 0..n {
            win[p] = g.options(p).iter().any(|&o| prev_lose[o]);
            lose[p] =
                g.is_terminal(p) || g.options(p).iter().all(|&o| prev_win[o]);
        }
    }
    (0..n)
        .map(|p| {
            if win[p] {
                Outcome::NextWins
            } else if lose[p] {
                Outcome::PreviousWins
            } else {
                Outcome::Draw
            }
        })
        .collect()
}

/// Classical nim-values by memoized mex recursion. Rulegraphs only.
pub fn oracle_grundy(g: &Optiongraph) -> Vec<u32> {
    fn go(g: &Optiongraph, p: usize, memo: &mut Vec<Option<u32>>) -> u32 {
        if let Some(v) = memo[p] {
            return v;
        }
        let below: BTreeSet<u32> =
            g.options(p).iter().map(|&o| go(g, o, memo)).collect();
        let mut m = 0;
        while below.contains(&m) {
            m += 1;
        }
        memo[p] = Some(m);
        m
    }
    let mut memo = vec![None; g.position_count()];
    (0..g.position_count()).map(|p| go(g, p, &mut memo)).collect()
}

/// Remoteness by the defining recursion: reach for the least even option,
/// stall on the greatest odd one. Rulegraphs only.
pub fn oracle_remoteness(g: &Optiongraph) -> Vec<u32> {
    fn go(g: &Optiongraph, p: usize, memo: &mut Vec<Option<u32>>) -> u32 {
        if let Some(v) = memo[p] {
            return v;
        }
        let below: Vec<u32> = g.options(p).iter().map(|&o| go(g, o, memo)).collect();
        let v = match below.iter().filter(|&&r| r % 2 == 0).min() {
            Some(&even) => even + 1,
            None => below.iter().max().map_or(0, |&odd| odd + 1),
        };
        memo[p] = Some(v);
        v
    }
    let mut memo = vec![None; g.position_count()];
    (0..g.position_count()).map(|p| go(g, p, &mut memo)).collect()
}

fn pick<'a, T>(items: &'a [T], seed: u64) -> &'a T {
    &items[(seed as u128 * items.len() as u128 >> 64) as usize]
}

/// Splits a seed into independent draws.
fn mix(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Game values must agree across an option-preserving map.
pub fn valuation_preserved(f: &OptionMap) -> Result<(), String> {
    let (src, tgt) = (f.source(), f.target());
    let (vs, vt) = (valuation(src), valuation(tgt));
    let (fs, ft) = (fim_partition(src), fim_partition(tgt));
    for p in 0..src.position_count() {
        let q = f.apply(p);
        if vs.outcomes[p] != vt.outcomes[q]
            || vs.remoteness[p] != vt.remoteness[q]
            || vs.nim[p] != vt.nim[q]
            || fs.class_of(p) != ft.class_of(q)
        {
            return Err(format!("values differ across the map at {}", src.label(p)));
        }
    }
    if is_rulegraph(src) && is_rulegraph(tgt) {
        let (ms, mt) = (misere_outcomes(src).unwrap(), misere_outcomes(tgt).unwrap());
        let (bs, bt) = (formal_birthday(src).unwrap(), formal_birthday(tgt).unwrap());
        for p in 0..src.position_count() {
            if ms[p] != mt[f.apply(p)] || bs[p] != bt[f.apply(p)] {
                return Err(format!(
                    "ending-play values differ across the map at {}",
                    src.label(p)
                ));
            }
        }
    }
    Ok(())
}

/// The full per-graph check battery used by the acceptance suite: brute
/// force congruence cross-checks, lattice bounds, all four isomorphism
/// witnesses on sampled configurations, and value preservation through
/// quotients.
pub fn battery(g: &Optiongraph, seed: u64) -> Result<(), String> {
    let n = g.position_count();

    // enumeration agrees with brute force, element by element
    let enumerated = all_congruences(g).map_err(|e| e.to_string())?;
    let lib: BTreeSet<Vec<usize>> = enumerated.iter().map(class_vector).collect();
    let oracle: BTreeSet<Vec<usize>> = oracle_congruences(g).into_iter().collect();
    if lib != oracle {
        return Err(format!(
            "congruence sets differ: {} enumerated, {} by brute force",
            lib.len(),
            oracle.len()
        ));
    }

    // the refinement maximum of the brute-force set is the library's max
    let top = class_vector(&max_congruence(g));
    if !oracle.iter().all(|c| vector_refines(c, &top)) || !oracle.contains(&top) {
        return Err("maximum congruence is not the brute-force maximum".into());
    }

    // meet and join are the lattice bounds within the enumerated set
    for pair_salt in 0..8u64 {
        let a = pick(&enumerated, mix(seed, 100 + pair_salt));
        let b = pick(&enumerated, mix(seed, 200 + pair_salt));
        let lo = class_vector(&meet(g, a, b));
        let hi = class_vector(&join(g, a, b));
        let (va, vb) = (class_vector(a), class_vector(b));
        if !oracle.contains(&lo) || !oracle.contains(&hi) {
            return Err("meet or join left the congruence set".into());
        }
        if !vector_refines(&lo, &va) || !vector_refines(&lo, &vb) {
            return Err("meet is not a lower bound".into());
        }
        if !vector_refines(&va, &hi) || !vector_refines(&vb, &hi) {
            return Err("join is not an upper bound".into());
        }
        let greatest_lower = oracle
            .iter()
            .all(|c| !(vector_refines(c, &va) && vector_refines(c, &vb)) || vector_refines(c, &lo));
        let least_upper = oracle
            .iter()
            .all(|c| !(vector_refines(&va, c) && vector_refines(&vb, c)) || vector_refines(&hi, c));
        if !greatest_lower || !least_upper {
            return Err("meet or join is not the tightest bound".into());
        }
    }

    // sampled theorem witnesses
    let theta = pick(&enumerated, mix(seed, 1));
    let refining: Vec<&Congruence> =
        enumerated.iter().filter(|c| c.refines(theta)).collect();
    let eta = *pick(&refining, mix(seed, 2));
    let sub = reachable_closure(g, &[(mix(seed, 3) % n as u64) as usize])
        .expect("seed position is in range");

    let q = quotient(g, theta).map_err(|v| format!("quotient refused: {v}"))?;
    let first = first_iso_witness(&q.map).map_err(|e| e.to_string())?;
    if !first.iso.is_isomorphism() {
        return Err("first witness is not an isomorphism".into());
    }
    let second = second_iso_witness(&sub, theta).map_err(|v| v.to_string())?;
    if !second.iso.is_isomorphism() {
        return Err("second witness is not an isomorphism".into());
    }
    let third = third_iso_witness(g, theta, eta).map_err(|e| e.to_string())?;
    if !third.iso.is_isomorphism() {
        return Err("third witness is not an isomorphism".into());
    }
    let fourth = fourth_iso_alpha(g, theta).map_err(|e| e.to_string())?;
    let below = all_congruences(&fourth.quotient.graph).map_err(|e| e.to_string())?;
    if fourth.image.len() != below.len() {
        return Err("fourth witness misses congruences of the quotient".into());
    }

    // values survive the quotient map, and F/I/M lands onto
    valuation_preserved(&q.map)?;
    let (fs, ft) = (fim_partition(g), fim_partition(q.map.target()));
    for class in [FimClass::Finite, FimClass::Infinite, FimClass::Mixed] {
        let mapped: BTreeSet<usize> = (0..n)
            .filter(|&p| fs.class_of(p) == class)
            .map(|p| q.map.apply(p))
            .collect();
        let there: BTreeSet<usize> = (0..q.graph.position_count())
            .filter(|&p| ft.class_of(p) == class)
            .collect();
        if mapped != there {
            return Err(format!("{class:?} does not map onto {class:?}"));
        }
    }

    // positions that cannot reach an end are one class of the maximum
    // congruence
    let never_ending: BTreeSet<usize> = (0..n)
        .filter(|&p| fs.class_of(p) == FimClass::Infinite)
        .collect();
    if !never_ending.is_empty() {
        let top = max_congruence(g);
        let sample = *never_ending.iter().next().unwrap();
        let class: BTreeSet<usize> = (0..n)
            .filter(|&p| top.class_of(p) == top.class_of(sample))
            .collect();
        if class != never_ending {
            return Err("never-ending positions are not a single class".into());
        }
    }
    Ok(())
}

pub fn isomorphic(a: &Optiongraph, b: &Optiongraph) -> bool {
    find_isomorphism(a, b).is_some()
}

/// Relabels positions by rotation: position `p` takes the role of
/// `p + shift`. Labels stay in place, so the result is a different labeled
/// graph of the same shape.
pub fn rotate(g: &Optiongraph, shift: usize) -> Optiongraph {
    let n = g.position_count();
    let sigma = |p: usize| (p + shift) % n;
    let mut options = vec![Vec::new(); n];
    for p in 0..n {
        let mut row: Vec<usize> = g.options(p).iter().map(|&o| sigma(o)).collect();
        row.sort_unstable();
        options[sigma(p)] = row;
    }
    let labels: Vec<String> = (0..n).map(|p| g.label(p).to_string()).collect();
    Optiongraph::new(labels, options).expect("a relabelling is a valid graph")
}

/// Settled nim-values and outcomes have to cohere; these implications hold
/// on every graph, loopy or not.
pub fn nim_outcome_consistent(g: &Optiongraph) -> Result<(), String> {
    let v = valuation(g);
    for p in 0..g.position_count() {
        let bad = match (&v.nim[p], v.outcomes[p]) {
            (NimValue::Finite(0), o) => o != Outcome::PreviousWins,
            (NimValue::Finite(_), o) => o != Outcome::NextWins,
            (NimValue::Infinite(s), o) if s.contains(&0) => o != Outcome::NextWins,
            (NimValue::Infinite(_), _) => false,
        };
        if bad {
            return Err(format!(
                "nim {} with outcome {} at {}",
                v.nim[p],
                v.outcomes[p],
                g.label(p)
            ));
        }
        let parity_ok = match (v.remoteness[p], v.outcomes[p]) {
            (Remoteness::Finite(r), Outcome::NextWins) => r % 2 == 1,
            (Remoteness::Finite(r), Outcome::PreviousWins) => r % 2 == 0,
            (Remoteness::Infinite, Outcome::Draw) => true,
            _ => false,
        };
        if !parity_ok {
            return Err(format!(
                "remoteness {} with outcome {} at {}",
                v.remoteness[p],
                v.outcomes[p],
                g.label(p)
            ));
        }
    }
    Ok(())
}
