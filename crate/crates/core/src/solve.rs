//! The word problem for even FC-type Artin groups.
//!
//! Equality is decided by recursive decomposition: project through the
//! finest direct-product splitting, decide two-generator (dihedral)
//! pieces by a central normal form, and otherwise Britton-reduce in the
//! amalgam `G_{st(x)} *_{G_{lk(x)}} G_{V-{x}}` at a vertex whose star is
//! proper, recursing into the strictly smaller factors.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::graph::{ArtinGraph, VertexId, VertexSet};
use crate::word::Word;

/// Which side of the amalgam a block lives in.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BlockTag {
    /// word over `star(x)`
    InX,
    /// word over `V - {x}`
    InY,
    /// the whole word lies in `G_{lk(x)}` (single-block convention)
    InZ,
}

/// A reduced alternating factorization `w = p_1 ... p_n` with no interior
/// block in the amalgamated subgroup. The partial products are the
/// vertices of the geodesic the element traces in the Bass-Serre tree.
#[derive(Clone, Debug)]
pub struct AmalgamFactorization {
    pub split: VertexId,
    /// Each block is a word over the induced factor subgraph.
    pub blocks: Vec<(BlockTag, Word)>,
}

impl AmalgamFactorization {
    /// Multiplies the blocks back into a word over `ambient`.
    pub fn product_in(&self, ambient: &ArtinGraph) -> Result<Word> {
        let mut out = Word::identity(ambient);
        for (_, b) in &self.blocks {
            out = out.concat(&b.transport(ambient)?)?;
        }
        Ok(out)
    }

    /// The partial products `p_1 ... p_i` for `i = 1..n`, over `ambient`.
    pub fn prefixes_in(&self, ambient: &ArtinGraph) -> Result<Vec<Word>> {
        let mut out = Vec::new();
        let mut acc = Word::identity(ambient);
        for (_, b) in &self.blocks {
            acc = acc.concat(&b.transport(ambient)?)?;
            out.push(acc.clone());
        }
        Ok(out)
    }
}

/// Slots of the dihedral normal form: `A` is the name-least generator,
/// `C` the product of the two generators.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DihedralSlot {
    A,
    C,
}

/// Normal form in `⟨a,c | a c^k a^{-1} = c^k⟩` (the dihedral Artin group
/// of label `2k` after the substitution `c = ab`): a central power
/// `c^{k·central}` followed by an alternating body whose `C`-exponents
/// lie in `(0,k)`. Unique by the normal form theorem for the amalgam
/// `⟨c⟩ *_{c^k = d} (⟨a⟩×⟨d⟩)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DihedralNormalForm {
    pub k: i64,
    pub central: i64,
    pub body: Vec<(DihedralSlot, i64)>,
}

impl DihedralNormalForm {
    pub fn is_identity(&self) -> bool {
        self.central == 0 && self.body.is_empty()
    }
}

fn dihedral_push(
    body: &mut Vec<(DihedralSlot, i64)>,
    central: &mut i64,
    slot: DihedralSlot,
    mut exp: i64,
    k: i64,
) {
    loop {
        if slot == DihedralSlot::C {
            *central += exp.div_euclid(k);
            exp = exp.rem_euclid(k);
        }
        if exp == 0 {
            return;
        }
        match body.last() {
            Some(&(top, top_exp)) if top == slot => {
                body.pop();
                exp += top_exp;
            }
            _ => {
                body.push((slot, exp));
                return;
            }
        }
    }
}

/// Canonical form of a word in the dihedral Artin group
/// `⟨a,b | prod(a,b,2k) = prod(b,a,2k)⟩`. Two words get equal forms iff
/// they are equal in the group.
pub fn dihedral_reduce(k: i64, w: &Word) -> Result<DihedralNormalForm> {
    if k < 1 {
        return Err(Error::PreconditionFailed(format!("dihedral k = {k} < 1")));
    }
    let graph = w.graph();
    if graph.vertex_count() != 2 {
        return Err(Error::PreconditionFailed(
            "dihedral_reduce needs a two-generator word".to_string(),
        ));
    }
    let mut it = graph.vertices().iter();
    let a = it.next().expect("two vertices").clone();
    let b = it.next().expect("two vertices").clone();
    // substitute c = ab, i.e. b = a^{-1} c
    let mut body = Vec::new();
    let mut central = 0i64;
    for s in w.syllables() {
        if s.gen == a {
            dihedral_push(&mut body, &mut central, DihedralSlot::A, s.exp, k);
        } else if s.gen == b {
            let steps = s.exp.unsigned_abs();
            for _ in 0..steps {
                if s.exp > 0 {
                    dihedral_push(&mut body, &mut central, DihedralSlot::A, -1, k);
                    dihedral_push(&mut body, &mut central, DihedralSlot::C, 1, k);
                } else {
                    dihedral_push(&mut body, &mut central, DihedralSlot::C, -1, k);
                    dihedral_push(&mut body, &mut central, DihedralSlot::A, 1, k);
                }
            }
        } else {
            return Err(Error::UnknownVertex(s.gen.to_string()));
        }
    }
    Ok(DihedralNormalForm { k, central, body })
}

static TRIVIALITY_CACHE: Mutex<Option<HashMap<(Arc<str>, String), bool>>> = Mutex::new(None);

/// Decides `w = 1` in the Artin group of `w`'s graph.
pub fn is_trivial(w: &Word) -> Result<bool> {
    if w.is_empty() {
        return Ok(true);
    }
    let key = (w.graph().key().clone(), w.to_string());
    if let Some(hit) = TRIVIALITY_CACHE
        .lock()
        .expect("cache lock")
        .get_or_insert_with(HashMap::new)
        .get(&key)
        .copied()
    {
        return Ok(hit);
    }
    let result = is_trivial_uncached(w)?;
    {
        let mut guard = TRIVIALITY_CACHE.lock().expect("cache lock");
        let cache = guard.get_or_insert_with(HashMap::new);
        if cache.len() > 4_000_000 {
            cache.clear();
        }
        cache.insert(key, result);
    }
    Ok(result)
}

fn is_trivial_uncached(w: &Word) -> Result<bool> {
    let graph = w.graph().clone();
    let n = graph.vertex_count();
    debug_assert!(!w.is_empty());
    if n <= 1 {
        // freely reduced word over at most one generator
        return Ok(w.is_empty());
    }
    let components = graph.direct_product_split();
    if components.len() > 1 {
        for comp in components {
            let sub = graph.induced_subgraph(&comp)?;
            let image = w.retraction_image(&comp)?.transport(&sub)?;
            if !is_trivial(&image)? {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    if n == 2 {
        let mut it = graph.vertices().iter();
        let a = it.next().expect("two vertices");
        let b = it.next().expect("two vertices");
        return match graph.label(a, b) {
            Some(m) => Ok(dihedral_reduce(m / 2, w)?.is_identity()),
            // free product of two copies of Z: reduced nonempty words are nontrivial
            None => Ok(false),
        };
    }
    let split = graph.amalgam_split().ok_or_else(|| {
        Error::Internal("indecomposable graph with every star full".to_string())
    })?;
    let fact = amalgam_reduce(&graph, &split.vertex, w)?;
    match fact.blocks.as_slice() {
        [] => Ok(true),
        [(_, block)] => is_trivial(block),
        _ => Ok(false),
    }
}

/// `u = v` in the group.
pub fn is_equal(u: &Word, v: &Word) -> Result<bool> {
    if u.graph() != v.graph() {
        return Err(Error::GraphMismatch);
    }
    is_trivial(&u.concat(&v.inverse())?)
}

/// `w ∈ G_S`, via the retraction criterion `g ∈ G_S ⟺ g = ρ_S(g)`.
pub fn in_standard_parabolic(w: &Word, s: &VertexSet) -> Result<bool> {
    is_equal(w, &w.retraction_image(s)?)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Category {
    OnlyX,
    OnlyY,
    Amalgam,
}

/// Britton-style reduced factorization of `w` in the splitting
/// `G = G_{st(x)} *_{G_{lk(x)}} G_{V-{x}}`.
pub fn amalgam_reduce(graph: &ArtinGraph, x: &VertexId, w: &Word) -> Result<AmalgamFactorization> {
    if w.graph() != graph {
        return Err(Error::GraphMismatch);
    }
    let star = graph.star(x)?;
    if star == *graph.vertices() {
        return Err(Error::StarIsFull(x.to_string()));
    }
    let link = graph.link(x)?;
    let mut y_side = graph.vertices().clone();
    y_side.remove(x);
    let x_graph = graph.induced_subgraph(&star)?;
    let y_graph = graph.induced_subgraph(&y_side)?;
    let z_graph = graph.induced_subgraph(&link)?;

    let category = |gen: &VertexId| {
        if gen == x {
            Category::OnlyX
        } else if link.contains(gen) {
            Category::Amalgam
        } else {
            Category::OnlyY
        }
    };

    // initial blocking; amalgam letters attach leftward
    let mut raw_blocks: Vec<(Option<BlockTag>, Vec<(VertexId, i64)>)> = Vec::new();
    for s in w.syllables() {
        let syl = (s.gen.clone(), s.exp);
        match category(&s.gen) {
            Category::Amalgam => match raw_blocks.last_mut() {
                Some(last) => last.1.push(syl),
                None => raw_blocks.push((None, vec![syl])),
            },
            cat => {
                let tag = if cat == Category::OnlyX {
                    BlockTag::InX
                } else {
                    BlockTag::InY
                };
                match raw_blocks.last_mut() {
                    Some(last) if last.0.is_none() => {
                        last.0 = Some(tag);
                        last.1.push(syl);
                    }
                    Some(last) if last.0 == Some(tag) => last.1.push(syl),
                    _ => raw_blocks.push((Some(tag), vec![syl])),
                }
            }
        }
    }

    let factor_graph = |tag: BlockTag| match tag {
        BlockTag::InX => &x_graph,
        BlockTag::InY => &y_graph,
        BlockTag::InZ => &z_graph,
    };

    let mut blocks: Vec<(BlockTag, Word)> = Vec::new();
    for (tag, syls) in raw_blocks {
        match tag {
            Some(tag) => blocks.push((tag, Word::from_syllables(factor_graph(tag), syls)?)),
            // only possible when the whole word is over the link
            None => blocks.push((BlockTag::InZ, Word::from_syllables(&z_graph, syls)?)),
        }
    }

    // Britton reduction: eliminate any block lying in G_{lk(x)} within its
    // factor, replacing it by its retraction image and merging neighbors.
    'outer: loop {
        for i in 0..blocks.len() {
            let (tag, block) = &blocks[i];
            if *tag == BlockTag::InZ {
                break 'outer;
            }
            if !in_standard_parabolic(block, &link)? {
                continue;
            }
            let zword = block.retraction_image(&link)?;
            if blocks.len() == 1 {
                blocks[0] = (BlockTag::InZ, zword.transport(&z_graph)?);
                break 'outer;
            }
            if i == 0 {
                let (next_tag, next) = blocks[1].clone();
                blocks[1] = (
                    next_tag,
                    zword.transport(factor_graph(next_tag))?.concat(&next)?,
                );
                blocks.remove(0);
            } else if i == blocks.len() - 1 {
                let (prev_tag, prev) = blocks[i - 1].clone();
                blocks[i - 1] = (
                    prev_tag,
                    prev.concat(&zword.transport(factor_graph(prev_tag))?)?,
                );
                blocks.remove(i);
            } else {
                let (prev_tag, prev) = blocks[i - 1].clone();
                let (next_tag, next) = blocks[i + 1].clone();
                debug_assert_eq!(prev_tag, next_tag);
                let merged = prev
                    .concat(&zword.transport(factor_graph(prev_tag))?)?
                    .concat(&next.transport(factor_graph(prev_tag))?)?;
                blocks[i - 1] = (prev_tag, merged);
                blocks.remove(i + 1);
                blocks.remove(i);
            }
            continue 'outer;
        }
        break;
    }

    Ok(AmalgamFactorization {
        split: x.clone(),
        blocks,
    })
}
