//! Presentations of retraction kernels.
//!
//! For a vertex `x` whose star is the whole graph, or all of whose
//! labels equal 2, the kernel of `ρ_{{x}}` is itself an even FC Artin
//! group on an indexed graph Δ: one vertex `u.i` per conjugate
//! `x^i u x^{-i}`, with `0 ≤ i < k_u = m_{u,x}/2` for `u` adjacent to
//! `x`, and `i ∈ Z` for `u` outside the star (materialized lazily).
//! Separately, the kernel of `ρ_{V-{z}}` is free when every label at
//! `z` is 2, with basis the conjugates of `z` by kernel elements of
//! the link retraction.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{ArtinGraph, RawGraph, VertexId, VertexSet};
use crate::solve::{is_equal, is_trivial};
use crate::word::{GeneratorMap, Word};

/// The kernel of `ρ_{{x}}` presented on an indexed graph.
///
/// The realized window for Z-indexed vertex types grows as rewriting
/// touches new indices; callers needing shared access must serialize
/// (operations that can grow the window take `&mut self`).
#[derive(Clone, Debug)]
pub struct KernelContext {
    base: ArtinGraph,
    x: VertexId,
    link: VertexSet,
    outside: VertexSet,
    k: BTreeMap<VertexId, i64>,
    window: (i64, i64),
    delta: ArtinGraph,
}

impl KernelContext {
    pub fn base(&self) -> &ArtinGraph {
        &self.base
    }

    pub fn x(&self) -> &VertexId {
        &self.x
    }

    pub fn delta(&self) -> &ArtinGraph {
        &self.delta
    }

    pub fn link(&self) -> &VertexSet {
        &self.link
    }

    /// `k_u = m_{u,x}/2` for `u` adjacent to `x`.
    pub fn k_of(&self, u: &VertexId) -> Option<i64> {
        self.k.get(u).copied()
    }

    /// `σ_u = u_0 u_1 ⋯ u_{k_u-1}`, over Δ.
    pub fn sigma(&self, u: &VertexId) -> Result<Word> {
        let k = self
            .k
            .get(u)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(u.to_string()))?;
        let syls = (0..k).map(|i| (u.indexed(i), 1));
        Word::from_syllables(&self.delta, syls)
    }

    fn rebuild_delta(&mut self) -> Result<()> {
        let mut raw = RawGraph::default();
        let mut copies: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        for u in &self.link {
            let k = self.k[u];
            copies.insert(u.clone(), (0..k).map(|i| u.indexed(i)).collect());
        }
        for u in &self.outside {
            let (lo, hi) = self.window;
            copies.insert(u.clone(), (lo..=hi).map(|i| u.indexed(i)).collect());
        }
        for list in copies.values() {
            for name in list {
                raw.vertex(name.as_str())?;
            }
        }
        for (u, v, m) in self.base.edges() {
            if u == &self.x || v == &self.x {
                continue;
            }
            for ui in &copies[u] {
                for vj in &copies[v] {
                    raw.edge(ui.as_str(), vj.as_str(), m)?;
                }
            }
        }
        self.delta = ArtinGraph::build(&raw)?;
        Ok(())
    }

    fn ensure_window(&mut self, lo: i64, hi: i64) -> Result<()> {
        if self.outside.is_empty() {
            return Ok(());
        }
        let (cur_lo, cur_hi) = self.window;
        if lo >= cur_lo && hi <= cur_hi {
            return Ok(());
        }
        self.window = (lo.min(cur_lo), hi.max(cur_hi));
        self.rebuild_delta()
    }
}

/// Builds the kernel presentation at `x`. Requires either `st(x) = V`
/// or every label at `x` equal to 2.
pub fn vertex_kernel_graph(graph: &ArtinGraph, x: &VertexId) -> Result<KernelContext> {
    let star = graph.star(x)?;
    let link = graph.link(x)?;
    if star != *graph.vertices() && link.iter().any(|u| graph.label(u, x) != Some(2)) {
        let bad = link
            .iter()
            .find(|u| graph.label(u, x) != Some(2))
            .expect("witness exists");
        return Err(Error::HypothesisViolated(
            x.to_string(),
            format!(
                "star is proper but the label of {{{bad},{x}}} is {} ≠ 2",
                graph.label(bad, x).unwrap_or(0)
            ),
        ));
    }
    let outside: VertexSet = graph
        .vertices()
        .iter()
        .filter(|v| !star.contains(v))
        .cloned()
        .collect();
    let k: BTreeMap<VertexId, i64> = link
        .iter()
        .map(|u| (u.clone(), graph.label(u, x).expect("link edge") / 2))
        .collect();
    let mut ctx = KernelContext {
        base: graph.clone(),
        x: x.clone(),
        link,
        outside,
        k,
        window: (0, 0),
        delta: graph.clone(), // placeholder, rebuilt below
    };
    ctx.rebuild_delta()?;
    Ok(ctx)
}

/// The Δ-word equal to `x^l u x^{-l}` for `u` adjacent to `x`: with
/// `l = k_u·q + r`, `0 ≤ r < k_u`, this is `σ_u^{-q} u_r σ_u^{q}`.
///
/// The orientation (which side carries the inverse) is fixed by the
/// regression test `conjugate_formula_orientation` below; with
/// `c = σ_u x^{-k_u}` central in the dihedral piece one checks
/// `x^l u x^{-l} = σ^{-q} (x^r u x^{-r}) σ^{q}` directly.
pub fn conjugate_power_formula(ctx: &KernelContext, u: &VertexId, l: i64) -> Result<Word> {
    let k = ctx
        .k_of(u)
        .ok_or_else(|| Error::UnknownVertex(u.to_string()))?;
    let q = l.div_euclid(k);
    let r = l.rem_euclid(k);
    let mid = Word::generator(&ctx.delta, &u.indexed(r), 1)?;
    let sigma = ctx.sigma(u)?;
    mid.conjugate(&sigma.pow(-q)?)
}

/// Rewrites `w ∈ ker ρ_{{x}}` into a word over Δ.
pub fn kernel_rewrite(ctx: &mut KernelContext, w: &Word) -> Result<Word> {
    if w.graph() != &ctx.base {
        return Err(Error::GraphMismatch);
    }
    if w.exponent_sum(&ctx.x) != 0 {
        return Err(Error::NotInKernel);
    }
    // realize every index the scan will touch before building the result
    let mut i = 0i64;
    let mut lo = 0i64;
    let mut hi = 0i64;
    for s in w.syllables() {
        if s.gen == ctx.x {
            i += s.exp;
            lo = lo.min(i);
            hi = hi.max(i);
        }
    }
    ctx.ensure_window(lo, hi)?;

    let mut out = Word::identity(&ctx.delta);
    let mut i = 0i64;
    for s in w.syllables() {
        if s.gen == ctx.x {
            i += s.exp;
        } else if ctx.link.contains(&s.gen) {
            let base = conjugate_power_formula(ctx, &s.gen, i)?;
            out = out.concat(&base.pow(s.exp)?)?;
        } else {
            out = out.concat(&Word::generator(&ctx.delta, &s.gen.indexed(i), 1)?.pow(s.exp)?)?;
        }
    }
    Ok(out)
}

/// Substitutes `u.n ↦ x^n u x^{-n}`, landing in the base group of `ctx`.
/// Accepts any word whose generator names carry an index suffix, so
/// words over a nested kernel graph can be pushed down level by level.
pub fn kernel_embed(ctx: &KernelContext, u: &Word) -> Result<Word> {
    let mut out = Word::identity(&ctx.base);
    let x = Word::generator(&ctx.base, &ctx.x, 1)?;
    for s in u.syllables() {
        let (ty, n) = s
            .gen
            .split_index()
            .ok_or_else(|| Error::UnknownVertex(s.gen.to_string()))?;
        let core = Word::generator(&ctx.base, &ty, s.exp)?;
        out = out.concat(&core.conjugate(&x.pow(n)?)?)?;
    }
    Ok(out)
}

/// The automorphism of `G_Δ` sending `a_1 ↦ σ_a` and fixing every other
/// generator, or its inverse. Requires `k_a > 1` and that every
/// Δ-neighbor of `a.1` commutes with every `a.i`.
pub fn phi_map(ctx: &KernelContext, a: &VertexId, inverse: bool) -> Result<GeneratorMap> {
    let k = ctx
        .k_of(a)
        .ok_or_else(|| Error::UnknownVertex(a.to_string()))?;
    if k < 2 {
        return Err(Error::PreconditionFailed(format!(
            "phi needs k_{a} > 1, got {k}"
        )));
    }
    let delta = &ctx.delta;
    let a1 = a.indexed(1);
    for z in delta.link(&a1)? {
        for i in 0..k {
            if delta.label(&z, &a.indexed(i)) != Some(2) {
                return Err(Error::NotAnAutomorphism(format!(
                    "neighbor {z} of {a1} does not commute with {}",
                    a.indexed(i)
                )));
            }
        }
    }
    let mut fwd_images: BTreeMap<VertexId, Word> = BTreeMap::new();
    let mut inv_images: BTreeMap<VertexId, Word> = BTreeMap::new();
    for v in delta.vertices() {
        fwd_images.insert(v.clone(), Word::generator(delta, v, 1)?);
        inv_images.insert(v.clone(), Word::generator(delta, v, 1)?);
    }
    fwd_images.insert(a1.clone(), ctx.sigma(a)?);
    // solve σ_a = a_0 a_1 ⋯ a_{k-1} for the middle letter
    let head = Word::generator(delta, &a.indexed(0), -1)?;
    let mut tail = Word::identity(delta);
    for i in 2..k {
        tail = tail.concat(&Word::generator(delta, &a.indexed(i), 1)?)?;
    }
    inv_images.insert(
        a1.clone(),
        head.concat(&Word::generator(delta, &a1, 1)?)?
            .concat(&tail.inverse())?,
    );
    let fwd = GeneratorMap::new(delta, delta, fwd_images)?;
    let inv = GeneratorMap::new(delta, delta, inv_images)?;
    for v in delta.vertices() {
        let gen = Word::generator(delta, v, 1)?;
        if !is_equal(&inv.apply(&fwd.apply(&gen)?)?, &gen)? {
            return Err(Error::Internal(format!(
                "phi inverse does not undo phi on {v}"
            )));
        }
    }
    Ok(if inverse { inv } else { fwd })
}

/// One letter `(t z t^{-1})^{exponent}` of the free basis of
/// `ker ρ_{V-{z}}`; the conjugator satisfies `ρ_{lk(z)}(t) = 1` and is
/// supported in `V-{z}`.
#[derive(Clone, Debug)]
pub struct CovertexBasisLetter {
    pub conjugator: Word,
    pub exponent: i64,
}

fn covertex_hypothesis(graph: &ArtinGraph, z: &VertexId) -> Result<VertexSet> {
    let link = graph.link(z)?;
    for u in &link {
        let m = graph.label(u, z).expect("link edge");
        if m != 2 {
            return Err(Error::HypothesisViolated(
                z.to_string(),
                format!("label of {{{u},{z}}} is {m} ≠ 2"),
            ));
        }
    }
    Ok(link)
}

/// Rewrites `w ∈ ker ρ_{V-{z}}` over the free basis `{z} × T`.
pub fn covertex_rewrite(
    graph: &ArtinGraph,
    z: &VertexId,
    w: &Word,
) -> Result<Vec<CovertexBasisLetter>> {
    if w.graph() != graph {
        return Err(Error::GraphMismatch);
    }
    let link = covertex_hypothesis(graph, z)?;
    let mut others = graph.vertices().clone();
    others.remove(z);
    if !is_trivial(&w.retraction_image(&others)?)? {
        return Err(Error::NotInKernel);
    }
    let mut letters: Vec<CovertexBasisLetter> = Vec::new();
    let mut prefix = Word::identity(graph);
    for s in w.syllables() {
        if &s.gen != z {
            prefix = prefix.concat(&Word::generator(graph, &s.gen, s.exp)?)?;
            continue;
        }
        let t = prefix.concat(&prefix.retraction_image(&link)?.inverse())?;
        match letters.last_mut() {
            Some(last) if is_equal(&last.conjugator, &t)? => {
                last.exponent += s.exp;
                if last.exponent == 0 {
                    letters.pop();
                }
            }
            _ => letters.push(CovertexBasisLetter {
                conjugator: t,
                exponent: s.exp,
            }),
        }
    }
    Ok(letters)
}

/// Multiplies basis letters back out: the product of `t z^e t^{-1}`.
pub fn covertex_expand(
    graph: &ArtinGraph,
    z: &VertexId,
    letters: &[CovertexBasisLetter],
) -> Result<Word> {
    covertex_hypothesis(graph, z)?;
    let mut out = Word::identity(graph);
    for l in letters {
        let core = Word::generator(graph, z, l.exponent)?;
        out = out.concat(&core.conjugate(&l.conjugator)?)?;
    }
    Ok(out)
}
