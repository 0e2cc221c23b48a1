//! Worked examples shared by the documentation, the test suites, and the
//! CLI examples. The same graphs ship as `.og` files under `fixtures/`.

use crate::graph::Optiongraph;
use crate::morphism::OptionMap;

fn parse(src: &str) -> Optiongraph {
    Optiongraph::parse(src).expect("fixture sources are valid")
}

/// One position, no moves. The smallest game.
pub fn single_terminal() -> Optiongraph {
    parse(include_str!("../fixtures/terminal.og"))
}

/// One position whose only move is itself: play never ends.
pub fn single_loop() -> Optiongraph {
    parse(include_str!("../fixtures/loop.og"))
}

/// Two positions, one move. The game `*` in disguise.
pub fn arrow() -> Optiongraph {
    parse(include_str!("../fixtures/arrow.og"))
}

/// Seven positions whose congruence lattice has six elements; the running
/// example for congruence computations.
pub fn lattice_demo() -> Optiongraph {
    parse(include_str!("../fixtures/lattice-demo.og"))
}

/// A loopy game exercising every valuation: draws, infinite remoteness and
/// all three shapes of extended nim-value.
pub fn loopy_demo() -> Optiongraph {
    parse(include_str!("../fixtures/loopy-demo.og"))
}

/// Source of the worked option-preserving map; see [`first_iso_map`].
pub fn first_iso_source() -> Optiongraph {
    parse(include_str!("../fixtures/first-iso-source.og"))
}

/// Target of the worked option-preserving map. Positions `x` and `w` lie
/// outside the image, so image and target differ.
pub fn first_iso_target() -> Optiongraph {
    parse(include_str!("../fixtures/first-iso-target.og"))
}

/// The worked non-injective, non-surjective option-preserving map, already
/// verified.
pub fn first_iso_map() -> OptionMap {
    let mut f = OptionMap::parse(
        first_iso_source(),
        first_iso_target(),
        include_str!("../fixtures/first-iso.map"),
    )
    .expect("fixture map is well formed");
    f.verify().expect("fixture map is option-preserving");
    f
}

/// Nine positions used to demonstrate restricting a congruence to a
/// reachable closure.
pub fn second_iso_demo() -> Optiongraph {
    parse(include_str!("../fixtures/second-iso.og"))
}

/// A rulegraph whose quotients by nested congruences collapse to the same
/// three-chain.
pub fn third_iso_rulegraph() -> Optiongraph {
    parse(include_str!("../fixtures/third-iso-rulegraph.og"))
}

/// A cyclic companion to [`third_iso_rulegraph`] with the same quotient
/// behaviour despite infinite play.
pub fn third_iso_cyclic() -> Optiongraph {
    parse(include_str!("../fixtures/third-iso-cyclic.og"))
}

/// Five positions around a three-cycle; its nine congruences illustrate the
/// interval-versus-quotient correspondence.
pub fn fourth_iso_demo() -> Optiongraph {
    parse(include_str!("../fixtures/fourth-iso.og"))
}

/// All simple optiongraphs on three positions, one representative per
/// isomorphism class, fifteen in total.
pub fn simple_three_position() -> Vec<Optiongraph> {
    let rows: &[&[(&str, &[&str])]] = &[
        &[("a", &["b"]), ("b", &["c"]), ("c", &[])],
        &[("a", &["b", "c"]), ("b", &["c"]), ("c", &[])],
        &[("a", &["b"]), ("b", &["a", "c"]), ("c", &[])],
        &[("a", &["a", "b"]), ("b", &["a", "c"]), ("c", &[])],
        &[("a", &["b"]), ("b", &["a", "b", "c"]), ("c", &[])],
        &[("a", &["a", "b"]), ("b", &["a", "b", "c"]), ("c", &[])],
        &[("a", &["a", "b"]), ("b", &["c"]), ("c", &[])],
        &[("a", &["b"]), ("b", &["b", "c"]), ("c", &[])],
        &[("a", &["a", "b"]), ("b", &["b", "c"]), ("c", &[])],
        &[("a", &["a"]), ("b", &["a", "c"]), ("c", &[])],
        &[("a", &["a"]), ("b", &["a", "b", "c"]), ("c", &[])],
        &[("a", &["a", "b"]), ("b", &[]), ("c", &["b"])],
        &[("a", &["a", "b", "c"]), ("b", &["c"]), ("c", &[])],
        &[("a", &["a"]), ("b", &["c"]), ("c", &[])],
        &[("a", &["a"]), ("b", &["b", "c"]), ("c", &[])],
    ];
    rows.iter()
        .map(|r| Optiongraph::from_adjacency(r).expect("fixture rows are valid"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_shapes() {
        assert_eq!(single_terminal().position_count(), 1);
        assert_eq!(single_loop().arrow_count(), 1);
        assert_eq!(arrow().serialize(), "a: b\nb:\n");
        let lat = lattice_demo();
        assert_eq!(lat.position_count(), 7);
        assert_eq!(lat.arrow_count(), 12);
        assert_eq!(loopy_demo().position_count(), 5);
        assert_eq!(second_iso_demo().position_count(), 9);
        assert_eq!(fourth_iso_demo().position_count(), 5);
        assert_eq!(simple_three_position().len(), 15);
    }
}
