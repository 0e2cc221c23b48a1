//! Quotients of optiongraphs by congruences, and executable witnesses for
//! the four isomorphism theorems.
//!
//! Each witness constructor builds the maps the corresponding theorem
//! promises and re-verifies them at runtime, so a witness in hand is a
//! checked proof for its inputs. Theorem-guaranteed steps that cannot fail
//! on valid inputs are enforced with panics rather than error values.

use thiserror::Error;

use crate::congruence::{
    all_congruences, is_congruence, Congruence, CongruenceViolation, EnumerationBound, Partition,
};
use crate::graph::{Optiongraph, Suboptiongraph};
use crate::morphism::{MapError, OptionMap};

/// A quotient graph together with the canonical projection onto it and the
/// congruence that produced it.
#[derive(Clone, Debug)]
pub struct QuotientResult {
    pub graph: Optiongraph,
    /// The canonical map `p -> [p]`, verified.
    pub map: OptionMap,
    pub congruence: Congruence,
}

fn class_label(g: &Optiongraph, members: &[usize]) -> String {
    let mut labels: Vec<&str> = members.iter().map(|&m| g.label(m)).collect();
    labels.sort_unstable();
    format!("{{{}}}", labels.join(","))
}

/// The quotient graph: one position per class, labelled `{member,member}`
/// with members sorted, classes ordered by their least member. The
/// congruence is re-checked defensively before building anything.
pub fn quotient(g: &Optiongraph, theta: &Congruence) -> Result<QuotientResult, CongruenceViolation> {
    is_congruence(g, theta.partition())?;
    let part = theta.partition();
    let labels: Vec<String> =
        part.classes().iter().map(|c| class_label(g, c)).collect();
    let options: Vec<Vec<usize>> = part
        .classes()
        .iter()
        .map(|c| {
            let mut opts: Vec<usize> =
                g.options(c[0]).iter().map(|&o| part.class_of(o)).collect();
            opts.sort_unstable();
            opts.dedup();
            opts
        })
        .collect();
    let graph = Optiongraph::new(labels, options)
        .expect("class labels are distinct and well formed");
    let assignment: Vec<usize> = (0..g.position_count()).map(|p| part.class_of(p)).collect();
    let mut map = OptionMap::new(g.clone(), graph.clone(), assignment)
        .expect("the projection is total");
    map.verify().expect("the canonical map of a congruence preserves options");
    Ok(QuotientResult { graph, map, congruence: theta.clone() })
}

/// The quotient by the maximum congruence: the least simple image.
pub fn minimize(g: &Optiongraph) -> QuotientResult {
    let top = crate::congruence::max_congruence(g);
    quotient(g, &top).expect("the maximum congruence is a congruence")
}

/// Witness that a verified map's source, modulo its kernel, is isomorphic
/// to its image.
#[derive(Clone, Debug)]
pub struct FirstIsoWitness {
    /// Source modulo the kernel.
    pub quotient: QuotientResult,
    /// The image inside the target.
    pub image: Suboptiongraph,
    /// The isomorphism `[p] -> f(p)` from quotient graph to extracted image.
    pub iso: OptionMap,
}

/// Builds the first-isomorphism witness for a verified map.
pub fn first_iso_witness(f: &OptionMap) -> Result<FirstIsoWitness, MapError> {
    let kernel = f.kernel()?;
    let image = f.image()?;
    let q = quotient(f.source(), &kernel).expect("kernels are congruences");
    let extracted = image.extract();
    let assignment: Vec<usize> = kernel
        .partition()
        .classes()
        .iter()
        .map(|c| {
            image
                .local_id(f.apply(c[0]))
                .expect("images of source positions lie in the image")
        })
        .collect();
    let mut iso = OptionMap::new(q.graph.clone(), extracted, assignment)
        .expect("one image per class");
    iso.verify().expect("the induced map on the kernel quotient preserves options");
    assert!(iso.is_isomorphism(), "source/kernel and image must be isomorphic");
    Ok(FirstIsoWitness { quotient: q, image, iso })
}

/// Restricts a congruence of the parent graph to an option-closed subset.
/// The result lives on `sub.extract()` and is always a congruence there.
pub fn restrict_congruence(theta: &Congruence, sub: &Suboptiongraph) -> Congruence {
    let parent = sub.parent();
    assert_eq!(
        theta.partition().position_count(),
        parent.position_count(),
        "congruence of the parent graph"
    );
    let raw: Vec<usize> =
        sub.members().iter().map(|&m| theta.class_of(m)).collect();
    let partition = Partition::from_class_assignment(&raw);
    Congruence::new(&sub.extract(), partition)
        .expect("restricting to an option-closed subset keeps the congruence property")
}

/// Extends a congruence of `sub.extract()` to the parent graph, all other
/// positions becoming singletons. Re-checked defensively.
pub fn extend_congruence(
    theta: &Congruence,
    sub: &Suboptiongraph,
) -> Result<Congruence, CongruenceViolation> {
    let parent = sub.parent();
    assert_eq!(
        theta.partition().position_count(),
        sub.members().len(),
        "congruence of the extracted subgraph"
    );
    let classes: Vec<Vec<usize>> = theta
        .partition()
        .classes()
        .iter()
        .map(|c| c.iter().map(|&local| sub.parent_id(local)).collect())
        .collect();
    let partition = Partition::from_classes(parent.position_count(), &classes)
        .expect("members map injectively into the parent");
    Congruence::new(parent, partition)
}

/// Witness that an option-closed subset, modulo the restricted congruence,
/// is isomorphic to the set of classes it meets in the full quotient.
#[derive(Clone, Debug)]
pub struct SecondIsoWitness {
    /// The whole graph modulo the congruence.
    pub parent_quotient: QuotientResult,
    /// The restriction to the subset, on its extracted graph.
    pub restricted: Congruence,
    /// The subset modulo the restriction.
    pub sub_quotient: QuotientResult,
    /// The classes meeting the subset, as a suboptiongraph of the quotient.
    pub image_in_quotient: Suboptiongraph,
    /// The isomorphism from `sub_quotient.graph` to the extracted classes.
    pub iso: OptionMap,
}

/// Builds the second-isomorphism witness: the congruence is re-checked
/// against the parent defensively.
pub fn second_iso_witness(
    sub: &Suboptiongraph,
    theta: &Congruence,
) -> Result<SecondIsoWitness, CongruenceViolation> {
    let parent = sub.parent();
    let parent_quotient = quotient(parent, theta)?;
    let mut met: Vec<usize> = sub.members().iter().map(|&m| theta.class_of(m)).collect();
    met.sort_unstable();
    met.dedup();
    let image_in_quotient = Suboptiongraph::new(&parent_quotient.graph, &met)
        .expect("classes meeting an option-closed subset are option-closed");
    let restricted = restrict_congruence(theta, sub);
    let sub_quotient =
        quotient(&sub.extract(), &restricted).expect("restrictions are congruences");
    let assignment: Vec<usize> = restricted
        .partition()
        .classes()
        .iter()
        .map(|c| {
            let parent_pos = sub.parent_id(c[0]);
            image_in_quotient
                .local_id(theta.class_of(parent_pos))
                .expect("classes of members are met classes")
        })
        .collect();
    let mut iso = OptionMap::new(
        sub_quotient.graph.clone(),
        image_in_quotient.extract(),
        assignment,
    )
    .expect("one met class per restricted class");
    iso.verify().expect("the induced map on the restricted quotient preserves options");
    assert!(iso.is_isomorphism(), "subset quotient and met classes must be isomorphic");
    Ok(SecondIsoWitness { parent_quotient, restricted, sub_quotient, image_in_quotient, iso })
}

/// Errors for the relation-quotient constructions.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum RelationQuotientError {
    #[error("the finer congruence must refine the coarser one")]
    NotARefinement,
    #[error(transparent)]
    NotACongruence(#[from] CongruenceViolation),
}

/// The congruence `theta/eta` on the quotient by `eta`, defined when `eta`
/// refines `theta`: classes of the quotient are equivalent when their
/// members were. Lives on `quotient(g, eta).graph`.
pub fn relation_quotient(
    g: &Optiongraph,
    theta: &Congruence,
    eta: &Congruence,
) -> Result<Congruence, RelationQuotientError> {
    if !eta.partition().refines(theta.partition()) {
        return Err(RelationQuotientError::NotARefinement);
    }
    let eta_quotient = quotient(g, eta)?;
    let raw: Vec<usize> = eta
        .partition()
        .classes()
        .iter()
        .map(|c| theta.class_of(c[0]))
        .collect();
    let partition = Partition::from_class_assignment(&raw);
    Ok(Congruence::new(&eta_quotient.graph, partition)
        .expect("a coarser congruence descends to the quotient"))
}

/// Witness that quotienting in two stages lands in the same place:
/// `(D/eta)/(theta/eta)` is isomorphic to `D/theta`.
#[derive(Clone, Debug)]
pub struct ThirdIsoWitness {
    /// The first stage, `D/eta`.
    pub eta_quotient: QuotientResult,
    /// `theta/eta` on the first stage.
    pub relation: Congruence,
    /// The second stage, `(D/eta)/(theta/eta)`.
    pub double_quotient: QuotientResult,
    /// The single stage, `D/theta`.
    pub theta_quotient: QuotientResult,
    /// The isomorphism from the double quotient to the single one.
    pub iso: OptionMap,
}

/// Builds the third-isomorphism witness; requires `eta` to refine `theta`.
pub fn third_iso_witness(
    g: &Optiongraph,
    theta: &Congruence,
    eta: &Congruence,
) -> Result<ThirdIsoWitness, RelationQuotientError> {
    let relation = relation_quotient(g, theta, eta)?;
    let eta_quotient = quotient(g, eta)?;
    let theta_quotient = quotient(g, theta)?;
    let double_quotient =
        quotient(&eta_quotient.graph, &relation).expect("relation quotients are congruences");
    let assignment: Vec<usize> = relation
        .partition()
        .classes()
        .iter()
        .map(|c| {
            // representative eta-class, then any original member of it
            let eta_class = c[0];
            let original = eta.partition().class_members(eta_class)[0];
            theta.class_of(original)
        })
        .collect();
    let mut iso = OptionMap::new(
        double_quotient.graph.clone(),
        theta_quotient.graph.clone(),
        assignment,
    )
    .expect("one theta class per relation class");
    iso.verify().expect("collapsing stages preserves options");
    assert!(iso.is_isomorphism(), "double and single quotients must be isomorphic");
    Ok(ThirdIsoWitness { eta_quotient, relation, double_quotient, theta_quotient, iso })
}

/// Witness that the congruences above `theta` correspond one-to-one, with
/// order, to the congruences of the quotient by `theta`.
#[derive(Clone, Debug)]
pub struct FourthIsoWitness {
    /// The quotient everything is compared against.
    pub quotient: QuotientResult,
    /// Congruences of the original graph lying above `theta`, in
    /// enumeration order.
    pub interval: Vec<Congruence>,
    /// Their images on the quotient graph, parallel to `interval`.
    pub image: Vec<Congruence>,
}

/// Builds the fourth-isomorphism witness, checking bijectivity and order
/// preservation in both directions. Subject to the enumeration bound.
pub fn fourth_iso_alpha(
    g: &Optiongraph,
    theta: &Congruence,
) -> Result<FourthIsoWitness, EnumerationBound> {
    let q = quotient(g, theta).expect("validated congruence");
    let interval: Vec<Congruence> = all_congruences(g)?
        .into_iter()
        .filter(|phi| theta.partition().refines(phi.partition()))
        .collect();
    let image: Vec<Congruence> = interval
        .iter()
        .map(|phi| {
            relation_quotient(g, phi, theta)
                .expect("interval members are refined by theta")
        })
        .collect();
    let mut target = all_congruences(&q.graph)?;
    target.sort_unstable();
    let mut sorted_image = image.clone();
    sorted_image.sort_unstable();
    sorted_image.dedup();
    assert_eq!(sorted_image.len(), image.len(), "images must be pairwise distinct");
    assert_eq!(sorted_image, target, "images must exhaust the quotient's congruences");
    for (i, phi) in interval.iter().enumerate() {
        for (j, psi) in interval.iter().enumerate() {
            assert_eq!(
                phi.partition().refines(psi.partition()),
                image[i].partition().refines(image[j].partition()),
                "the correspondence must preserve and reflect order"
            );
        }
    }
    Ok(FourthIsoWitness { quotient: q, interval, image })
}
