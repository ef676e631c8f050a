//! Parabolic subgroups as (conjugator, support) pairs, with membership,
//! containment, common-support reduction, and transport into induced
//! subgraphs.

use crate::error::{Error, Result};
use crate::graph::{ArtinGraph, VertexSet};
use crate::solve::in_standard_parabolic;
use crate::word::Word;

/// The parabolic subgroup `g G_S g^{-1}`.
///
/// The conjugator is canonicalized so that its retraction to `S` is the
/// empty word; this makes representations deterministic without needing
/// a normalizer algorithm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParabolicSubgroup {
    conjugator: Word,
    support: VertexSet,
}

impl ParabolicSubgroup {
    pub fn new(conjugator: Word, support: VertexSet) -> Result<Self> {
        let graph = conjugator.graph();
        for s in &support {
            if !graph.contains(s) {
                return Err(Error::UnknownVertex(s.to_string()));
            }
        }
        let tail = conjugator.retraction_image(&support)?.inverse();
        let conjugator = conjugator.concat(&tail)?;
        Ok(ParabolicSubgroup {
            conjugator,
            support,
        })
    }

    /// The standard parabolic `G_S`.
    pub fn standard(graph: &ArtinGraph, support: VertexSet) -> Result<Self> {
        Self::new(Word::identity(graph), support)
    }

    pub fn graph(&self) -> &ArtinGraph {
        self.conjugator.graph()
    }

    pub fn conjugator(&self) -> &Word {
        &self.conjugator
    }

    pub fn support(&self) -> &VertexSet {
        &self.support
    }

    pub fn is_standard(&self) -> bool {
        self.conjugator.is_empty()
    }

    pub fn is_trivial_subgroup(&self) -> bool {
        self.support.is_empty()
    }

    /// `w ∈ g G_S g^{-1}`, via the retraction criterion applied to
    /// `g^{-1} w g`.
    pub fn member(&self, w: &Word) -> Result<bool> {
        if w.graph() != self.graph() {
            return Err(Error::GraphMismatch);
        }
        let moved = self
            .conjugator
            .inverse()
            .concat(w)?
            .concat(&self.conjugator)?;
        in_standard_parabolic(&moved, &self.support)
    }

    /// Subgroup containment `Q ⊆ P`, by membership of `Q`'s conjugated
    /// generators.
    pub fn contains(&self, other: &ParabolicSubgroup) -> Result<bool> {
        if other.graph() != self.graph() {
            return Err(Error::GraphMismatch);
        }
        for s in &other.support {
            let gen = Word::generator(other.graph(), s, 1)?;
            let conj = gen.conjugate(&other.conjugator)?;
            if !self.member(&conj)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Subgroup equality. Equal parabolics have equal supports, and with
    /// equal supports one containment suffices.
    pub fn equal(&self, other: &ParabolicSubgroup) -> Result<bool> {
        if self.support != other.support {
            return Ok(false);
        }
        self.contains(other)
    }

    /// The parabolic `w P w^{-1}`.
    pub fn conjugated_by(&self, w: &Word) -> Result<Self> {
        if w.graph() != self.graph() {
            return Err(Error::GraphMismatch);
        }
        Self::new(w.concat(&self.conjugator)?, self.support.clone())
    }
}

impl std::fmt::Display for ParabolicSubgroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let names: Vec<String> = self.support.iter().map(|v| v.to_string()).collect();
        write!(f, "({}, {{{}}})", self.conjugator, names.join(","))
    }
}

/// `G_A ∩ G_B = G_{A ∩ B}`.
pub fn standard_intersection(a: &VertexSet, b: &VertexSet) -> VertexSet {
    a.intersection(b).cloned().collect()
}

/// Replaces the conjugators of `f G_A f^{-1}` and `g G_B g^{-1}` so both
/// supports become `C = A ∩ B` without changing the intersection:
/// returns `(f', g', C)` with
/// `f G_A f^{-1} ∩ g G_B g^{-1} = f' G_C f'^{-1} ∩ g' G_C g'^{-1}`.
pub fn common_support_reduction(
    f: &Word,
    a_set: &VertexSet,
    g: &Word,
    b_set: &VertexSet,
) -> Result<(Word, Word, VertexSet)> {
    if f.graph() != g.graph() {
        return Err(Error::GraphMismatch);
    }
    let h = f.inverse().concat(g)?;
    let a = h.retraction_image(a_set)?;
    let k = h.inverse().concat(&a)?;
    let b = k.retraction_image(b_set)?;
    let f_new = f.concat(&a)?;
    let g_new = g.concat(&b)?;
    Ok((f_new, g_new, standard_intersection(a_set, b_set)))
}

/// Re-poses a conjugation problem inside `t G_Δ t^{-1}`: given that
/// `G_A ∪ g G_A g^{-1} ⊆ t G_Δ t^{-1}` (checked on generators), returns
/// `h = ρ_Δ(t^{-1})^{-1} · ρ_Δ(t^{-1} g)` over `delta`, so that
/// `h G_A h^{-1}` relates to `G_A` inside `G_Δ` exactly as
/// `g G_A g^{-1}` relates to `G_A` in the ambient group.
pub fn subgraph_transport(
    delta: &ArtinGraph,
    t: &Word,
    a_set: &VertexSet,
    g: &Word,
) -> Result<Word> {
    let graph = t.graph();
    if g.graph() != graph {
        return Err(Error::GraphMismatch);
    }
    let dv = delta.vertices();
    for s in dv {
        if !graph.contains(s) {
            return Err(Error::UnknownVertex(s.to_string()));
        }
    }
    for s in a_set {
        if !dv.contains(s) {
            return Err(Error::PreconditionFailed(format!(
                "support vertex `{s}` not in the subgraph"
            )));
        }
        let gen = Word::generator(graph, s, 1)?;
        for w in [gen.clone(), gen.conjugate(g)?] {
            let moved = t.inverse().concat(&w)?.concat(t)?;
            if !in_standard_parabolic(&moved, dv)? {
                return Err(Error::PreconditionFailed(format!(
                    "`{w}` does not lie in the conjugated subgraph group"
                )));
            }
        }
    }
    let f1 = t.inverse().retraction_image(dv)?;
    let f2 = t.inverse().concat(g)?.retraction_image(dv)?;
    f1.inverse().concat(&f2)?.transport(delta)
}
