//! Randomized battery behind `verify-theorems`: samples congruences and
//! subgraphs of one graph, runs every isomorphism-theorem witness, and
//! checks that quotient maps preserve game values.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use ogkit::{
    all_congruences_bounded, fim_partition, first_iso_witness, formal_birthday, fourth_iso_alpha,
    is_rulegraph, misere_outcomes, quotient, reachable_closure, second_iso_witness,
    third_iso_witness, valuation, Congruence, OptionMap, Optiongraph,
};

pub const THEOREMS: [&str; 5] = [
    "first-isomorphism",
    "second-isomorphism",
    "third-isomorphism",
    "fourth-isomorphism",
    "valuation-preservation",
];

/// Pass/fail tallies per entry of [`THEOREMS`].
pub struct TheoremReport {
    pub trials: u32,
    pub passes: [u32; 5],
}

impl TheoremReport {
    pub fn failures(&self) -> u32 {
        self.passes.iter().map(|&p| self.trials - p).sum()
    }
}

fn pick_index(rng: &mut ChaCha8Rng, len: usize) -> usize {
    debug_assert!(len > 0);
    ((rng.next_u64() as u128 * len as u128) >> 64) as usize
}

/// Game values must agree across an option-preserving map: the target
/// position plays the same game.
fn preserves_valuation(f: &OptionMap) -> bool {
    let (src, tgt) = (f.source(), f.target());
    let (vs, vt) = (valuation(src), valuation(tgt));
    let (fs, ft) = (fim_partition(src), fim_partition(tgt));
    let pointwise = (0..src.position_count()).all(|p| {
        let q = f.apply(p);
        vs.outcomes[p] == vt.outcomes[q]
            && vs.remoteness[p] == vt.remoteness[q]
            && vs.nim[p] == vt.nim[q]
            && fs.class_of(p) == ft.class_of(q)
    });
    if !pointwise {
        return false;
    }
    if is_rulegraph(src) && is_rulegraph(tgt) {
        let (ms, mt) = (misere_outcomes(src).unwrap(), misere_outcomes(tgt).unwrap());
        let (bs, bt) = (formal_birthday(src).unwrap(), formal_birthday(tgt).unwrap());
        return (0..src.position_count())
            .all(|p| ms[p] == mt[f.apply(p)] && bs[p] == bt[f.apply(p)]);
    }
    true
}

/// Runs `trials` sampled configurations against every theorem. Fails with a
/// message when the congruence enumeration bound is exceeded.
pub fn run(
    g: &Optiongraph,
    trials: u32,
    seed: u64,
    bound: usize,
) -> Result<TheoremReport, String> {
    let all = all_congruences_bounded(g, bound).map_err(|e| e.to_string())?;
    let n = g.position_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passes = [0u32; 5];
    for _ in 0..trials {
        let theta = &all[pick_index(&mut rng, all.len())];
        let refining: Vec<&Congruence> =
            all.iter().filter(|c| c.refines(theta)).collect();
        let eta = refining[pick_index(&mut rng, refining.len())];
        let mut seeds: Vec<usize> = (0..n).filter(|_| rng.next_u64() & 1 == 1).collect();
        if seeds.is_empty() {
            seeds.push(pick_index(&mut rng, n));
        }
        let sub = reachable_closure(g, &seeds).expect("in-range seeds");

        let q = quotient(g, theta).expect("sampled congruences are valid for their graph");
        if first_iso_witness(&q.map).is_ok_and(|w| w.iso.is_isomorphism()) {
            passes[0] += 1;
        }
        if second_iso_witness(&sub, theta).is_ok_and(|w| w.iso.is_isomorphism()) {
            passes[1] += 1;
        }
        if third_iso_witness(g, theta, eta).is_ok_and(|w| w.iso.is_isomorphism()) {
            passes[2] += 1;
        }
        let fourth = fourth_iso_alpha(g, theta).map_err(|e| e.to_string())?;
        let con_quotient =
            all_congruences_bounded(&fourth.quotient.graph, bound).map_err(|e| e.to_string())?;
        if fourth.interval.len() == con_quotient.len()
            && fourth.image.len() == con_quotient.len()
        {
            passes[3] += 1;
        }
        if preserves_valuation(&q.map) {
            passes[4] += 1;
        }
    }
    Ok(TheoremReport { trials, passes })
}
