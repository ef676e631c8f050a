//! Constructive intersection of parabolic subgroups.
//!
//! The driver reduces a pair of parabolics to a single conjugation
//! problem `G_A ∩ g G_A g^{-1}` and then applies, in order: transport
//! into proper subgraphs, the link-exterior containment, the
//! full-stars base case (decided through retraction-kernel
//! presentations), and the amalgam geodesic decomposition. Every
//! containment step produces an explicit witness, so results can be
//! checked by membership sampling.

use crate::error::{Error, Result};
use crate::graph::{ArtinGraph, VertexId, VertexSet};
use crate::kernel::{
    conjugate_power_formula, kernel_embed, kernel_rewrite, phi_map, vertex_kernel_graph,
};
use crate::parabolic::{common_support_reduction, ParabolicSubgroup};
use crate::solve::{amalgam_reduce, in_standard_parabolic, BlockTag};
use crate::word::Word;

/// Reduction log: which reduction fired at each step, with witnesses.
#[derive(Clone, Debug, Default)]
pub struct Trace {
    pub steps: Vec<String>,
}

impl Trace {
    fn log(&mut self, msg: String) {
        self.steps.push(msg);
    }
}

/// Outcome of the full-stars base case for `G_A` vs `g G_A g^{-1}`.
#[derive(Clone, Debug)]
pub enum IntersectionOutcome {
    /// `G_A = g G_A g^{-1}`.
    Equal,
    /// `G_A ∩ g G_A g^{-1} ≤ d G_B d^{-1}` with `B ⊊ A`.
    ContainedIn(Word, VertexSet),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DihedralIntersection {
    Full,
    Trivial,
}

/// Decides `⟨a⟩ ∩ g⟨a⟩g^{-1}` in the dihedral Artin group with
/// `m_{a,x} = 2k`: the intersection is either all of `⟨a⟩` or trivial.
pub fn dihedral_cyclic_intersection(
    k: i64,
    a: &VertexId,
    g: &Word,
) -> Result<DihedralIntersection> {
    let graph = g.graph();
    if graph.vertex_count() != 2 || !graph.contains(a) {
        return Err(Error::PreconditionFailed(
            "dihedral intersection needs a two-vertex graph containing `a`".to_string(),
        ));
    }
    let x = graph
        .vertices()
        .iter()
        .find(|v| *v != a)
        .expect("two vertices")
        .clone();
    if graph.label(a, &x) != Some(2 * k) {
        return Err(Error::PreconditionFailed(format!(
            "expected label {} on the dihedral edge",
            2 * k
        )));
    }
    let s = g.exponent_sum(&x);
    if s.rem_euclid(k) != 0 {
        return Ok(DihedralIntersection::Trivial);
    }
    let q = s.div_euclid(k);
    // g⟨a⟩g^{-1} = h σ^{-q} ⟨a_0⟩ σ^{q} h^{-1} with h = g x^{-s} in the
    // free kernel of ρ_x; by malnormality of the free factor the
    // intersection is full exactly when h σ^{-q} is a power of a_0.
    let h = g.concat(&Word::generator(graph, &x, 1)?.pow(-s)?)?;
    let mut ctx = vertex_kernel_graph(graph, &x)?;
    let h_delta = kernel_rewrite(&mut ctx, &h)?;
    let sigma = ctx.sigma(a)?;
    let u = h_delta.concat(&sigma.pow(-q)?)?;
    let a0 = a.indexed(0);
    if u.syllables().iter().all(|s| s.gen == a0) {
        Ok(DihedralIntersection::Full)
    } else {
        Ok(DihedralIntersection::Trivial)
    }
}

/// When `A ⊄ lk(x)` and `g ∉ G_{V-{x}}`, returns `(h, lk(x))` such that
/// `G_A ∩ g G_A g^{-1} ≤ h G_{lk(x)} h^{-1}` (the stabilizer of the
/// first edge on the Bass-Serre geodesic between `G_{V-{x}}` and
/// `g G_{V-{x}}`).
pub fn link_exterior_reduce(
    graph: &ArtinGraph,
    a_set: &VertexSet,
    g: &Word,
    x: &VertexId,
) -> Result<(Word, VertexSet)> {
    if a_set.contains(x) {
        return Err(Error::PreconditionFailed(format!("`{x}` lies in A")));
    }
    let link = graph.link(x)?;
    if a_set.iter().all(|v| link.contains(v)) {
        return Err(Error::PreconditionFailed(format!(
            "A is contained in the link of `{x}`"
        )));
    }
    let mut others = graph.vertices().clone();
    others.remove(x);
    if in_standard_parabolic(g, &others)? {
        return Err(Error::PreconditionFailed(format!(
            "g lies in the subgraph group avoiding `{x}`; transport instead"
        )));
    }
    let fact = amalgam_reduce(graph, x, g)?;
    let h = match fact.blocks.first() {
        Some((BlockTag::InY, block)) => block.transport(graph)?,
        Some((BlockTag::InX, _)) => Word::identity(graph),
        _ => {
            return Err(Error::Internal(
                "unreachable: g outside G_{V-{x}} reduced to an amalgam word".to_string(),
            ))
        }
    };
    Ok((h, link))
}

fn n_big_edges(graph: &ArtinGraph, a_set: &VertexSet) -> usize {
    graph
        .edges()
        .filter(|(u, v, m)| *m > 2 && (a_set.contains(u) != a_set.contains(v)))
        .count()
}

fn display_set(s: &VertexSet) -> String {
    let names: Vec<String> = s.iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", names.join(","))
}

/// The base case: all vertices outside `A` have full stars. Decides
/// whether `G_A = g G_A g^{-1}` or produces a containment witness over
/// a strictly smaller support.
pub fn same_support_full_stars(
    graph: &ArtinGraph,
    a_set: &VertexSet,
    g: &Word,
    trace: &mut Trace,
) -> Result<IntersectionOutcome> {
    if g.graph() != graph {
        return Err(Error::GraphMismatch);
    }
    for x in graph.vertices() {
        if !a_set.contains(x) && graph.star(x)? != *graph.vertices() {
            return Err(Error::PreconditionFailed(format!(
                "star of `{x}` is not the whole graph"
            )));
        }
    }
    if a_set.is_empty() || in_standard_parabolic(g, a_set)? {
        return Ok(IntersectionOutcome::Equal);
    }
    let n = n_big_edges(graph, a_set);
    if n == 0 {
        trace.log("full-stars: no label>2 edges across A, direct product".to_string());
        return Ok(IntersectionOutcome::Equal);
    }
    // candidate pairs (x, a) with a big label; prefer one with A ⊆ st(a)
    let mut pairs: Vec<(VertexId, VertexId, i64)> = Vec::new();
    for x in graph.vertices() {
        if a_set.contains(x) {
            continue;
        }
        for a in a_set {
            if let Some(m) = graph.label(x, a) {
                if m > 2 {
                    pairs.push((x.clone(), a.clone(), m));
                }
            }
        }
    }
    debug_assert!(!pairs.is_empty());
    let product_pair = pairs.iter().find(|(_, a, _)| {
        let star = graph.star(a).expect("vertex in graph");
        a_set.iter().all(|v| star.contains(v))
    });

    if let Some((x, a, m)) = product_pair.cloned() {
        // G = G_{{x,a}} × G_Z: decide the dihedral factor and recurse on Z
        trace.log(format!("full-stars: direct product split at ({x},{a})"));
        let ax: VertexSet = [a.clone(), x.clone()].into_iter().collect();
        let mut z_set = graph.vertices().clone();
        z_set.remove(&a);
        z_set.remove(&x);
        let sub_ax = graph.induced_subgraph(&ax)?;
        let sub_z = graph.induced_subgraph(&z_set)?;
        let g1 = g.retraction_image(&ax)?.transport(&sub_ax)?;
        let g2 = g.retraction_image(&z_set)?.transport(&sub_z)?;
        let verdict = dihedral_cyclic_intersection(m / 2, &a, &g1)?;
        let mut a_rest = a_set.clone();
        a_rest.remove(&a);
        debug_assert!(n_big_edges(&sub_z, &a_rest) < n);
        let rec = same_support_full_stars(&sub_z, &a_rest, &g2, trace)?;
        return Ok(match (verdict, rec) {
            (DihedralIntersection::Full, IntersectionOutcome::Equal) => IntersectionOutcome::Equal,
            (DihedralIntersection::Trivial, IntersectionOutcome::Equal) => {
                IntersectionOutcome::ContainedIn(Word::identity(graph), a_rest)
            }
            (DihedralIntersection::Trivial, IntersectionOutcome::ContainedIn(d, b)) => {
                IntersectionOutcome::ContainedIn(d.transport(graph)?, b)
            }
            (DihedralIntersection::Full, IntersectionOutcome::ContainedIn(d, mut b)) => {
                // d ∈ G_Z commutes with a, so ⟨a⟩ can ride along
                b.insert(a.clone());
                IntersectionOutcome::ContainedIn(d.transport(graph)?, b)
            }
        });
    }

    // kernel branch: (x, a) with a big label and A ⊄ st(a)
    let (x, a, m) = pairs[0].clone();
    let k_a = m / 2;
    trace.log(format!("full-stars: kernel branch at ({x},{a})"));
    let mut ctx = vertex_kernel_graph(graph, &x)?;
    let s = g.exponent_sum(&x);
    let h = g.concat(&Word::generator(graph, &x, 1)?.pow(-s)?)?;
    let h_delta = kernel_rewrite(&mut ctx, &h)?;
    let a0_set: VertexSet = a_set.iter().map(|b| b.indexed(0)).collect();
    let types_of = |set: &VertexSet| -> VertexSet {
        set.iter()
            .map(|v| v.split_index().expect("indexed vertex").0)
            .collect()
    };

    if s == 0 {
        // Case 1: strip vertices the element avoids, then either the
        // link-exterior lemma applies inside Δ' or we recurse with
        // strictly fewer big edges.
        let mut cur_graph = ctx.delta().clone();
        let mut cur_h = h_delta;
        'strip: loop {
            for v in cur_graph.vertices() {
                if a0_set.contains(v) {
                    continue;
                }
                let mut rest = cur_graph.vertices().clone();
                rest.remove(v);
                if in_standard_parabolic(&cur_h, &rest)? {
                    let sub = cur_graph.induced_subgraph(&rest)?;
                    cur_h = cur_h.retraction_image(&rest)?.transport(&sub)?;
                    cur_graph = sub;
                    continue 'strip;
                }
            }
            break;
        }
        let offender = cur_graph.vertices().iter().find(|v| {
            if a0_set.contains(*v) {
                return false;
            }
            match v.split_index() {
                Some((ty, i)) => i != 0 && a_set.contains(&ty),
                None => false,
            }
        });
        if let Some(b_i) = offender.cloned() {
            trace.log(format!("full-stars case 1: link-exterior at {b_i} in Δ'"));
            let (w, z) = link_exterior_reduce(&cur_graph, &a0_set, &cur_h, &b_i)?;
            let (f_new, _, c) =
                common_support_reduction(&Word::identity(&cur_graph), &a0_set, &w, &z)?;
            debug_assert!(c.len() < a0_set.len());
            let d = kernel_embed(&ctx, &f_new.transport(ctx.delta())?)?;
            return Ok(IntersectionOutcome::ContainedIn(d, types_of(&c)));
        }
        debug_assert!(n_big_edges(&cur_graph, &a0_set) < n);
        trace.log("full-stars case 1: recurse inside Δ'".to_string());
        return Ok(
            match same_support_full_stars(&cur_graph, &a0_set, &cur_h, trace)? {
                IntersectionOutcome::Equal => IntersectionOutcome::Equal,
                IntersectionOutcome::ContainedIn(d, b) => {
                    let d = kernel_embed(&ctx, &d.transport(ctx.delta())?)?;
                    IntersectionOutcome::ContainedIn(d, types_of(&b))
                }
            },
        );
    }

    // Case 2: some generator type is carried off its index-0 copy
    let bad = a_set.iter().find(|b| {
        let k_b = ctx.k_of(b).expect("A is adjacent to x");
        s.rem_euclid(k_b) != 0
    });
    if let Some(b) = bad.cloned() {
        // ρ_{A_0}(h Q h^{-1}) lands in ρ(h)·G_{A_0-{b_0}}·ρ(h)^{-1}
        trace.log(format!("full-stars case 2: index shift kills {b}"));
        let d = kernel_embed(&ctx, &h_delta.retraction_image(&a0_set)?)?;
        let mut b_rest = a_set.clone();
        b_rest.remove(&b);
        return Ok(IntersectionOutcome::ContainedIn(d, b_rest));
    }

    // Case 3: s ≠ 0, every index i(s,b) = 0; untwist with φ
    let l = -s / k_a;
    debug_assert!({
        let direct = conjugate_power_formula(&ctx, &a, s)?;
        let via_l = ctx.sigma(&a)?.pow(l)?.concat(
            &Word::generator(ctx.delta(), &a.indexed(0), 1)?
                .concat(&ctx.sigma(&a)?.pow(-l)?)?,
        )?;
        crate::solve::is_equal(&direct, &via_l)?
    });
    let phi_inv = phi_map(&ctx, &a, true)?;
    let f = phi_inv.apply(&h_delta)?;
    let a1 = a.indexed(1);
    let alpha = f.exponent_sum(&a1);
    if alpha + l != 0 {
        // Case 3.1: the two free bases of ker ρ_D are disjoint
        trace.log(format!("full-stars case 3.1 at ({x},{a})"));
        let mut b_rest = a_set.clone();
        b_rest.remove(&a);
        return Ok(IntersectionOutcome::ContainedIn(
            Word::identity(graph),
            b_rest,
        ));
    }
    // Case 3.2: descend one more kernel level at a_1
    trace.log(format!("full-stars case 3.2 at ({x},{a})"));
    let b = a_set
        .iter()
        .find(|b| {
            graph
                .link(&a)
                .map(|lk| !lk.contains(*b) && **b != a)
                .unwrap_or(false)
        })
        .cloned()
        .ok_or_else(|| Error::Internal("case 3.2 requires A ⊄ st(a)".to_string()))?;
    let f_prime = f.concat(&Word::generator(ctx.delta(), &a1, 1)?.pow(-alpha)?)?;
    let mut lambda = vertex_kernel_graph(ctx.delta(), &a1)?;
    let f_lambda = kernel_rewrite(&mut lambda, &f_prime)?;
    let a00_set: VertexSet = a0_set.iter().map(|v| v.indexed(0)).collect();
    let delta_witness = kernel_embed(&lambda, &f_lambda.retraction_image(&a00_set)?)?;
    let phi_fwd = phi_map(&ctx, &a, false)?;
    let d = kernel_embed(&ctx, &phi_fwd.apply(&delta_witness)?)?;
    let mut b_rest = a_set.clone();
    b_rest.remove(&b);
    Ok(IntersectionOutcome::ContainedIn(d, b_rest))
}

/// Representation `(c, B)` of `G_A ∩ g G_A g^{-1} = c G_B c^{-1}`.
fn conjugate_core(
    graph: &ArtinGraph,
    a_set: &VertexSet,
    g: &Word,
    trace: &mut Trace,
) -> Result<(Word, VertexSet)> {
    debug_assert!(g.graph() == graph);
    if a_set.is_empty() {
        return Ok((Word::identity(graph), VertexSet::new()));
    }
    if in_standard_parabolic(g, a_set)? {
        return Ok((Word::identity(graph), a_set.clone()));
    }
    // (1) transport into a proper subgraph the element already lives in
    for x in graph.vertices() {
        if a_set.contains(x) {
            continue;
        }
        let mut rest = graph.vertices().clone();
        rest.remove(x);
        if in_standard_parabolic(g, &rest)? {
            trace.log(format!("transport: g avoids `{x}`"));
            let sub = graph.induced_subgraph(&rest)?;
            let h = g.retraction_image(&rest)?.transport(&sub)?;
            let (c, b) = conjugate_core(&sub, a_set, &h, trace)?;
            return Ok((c.transport(graph)?, b));
        }
    }
    // (2) link-exterior containment
    for x in graph.vertices() {
        if a_set.contains(x) {
            continue;
        }
        let link = graph.link(x)?;
        if !a_set.iter().all(|v| link.contains(v)) {
            trace.log(format!("link-exterior at `{x}`"));
            let (d, z) = link_exterior_reduce(graph, a_set, g, x)?;
            return four_parabolic_descent(graph, a_set, g, &d, &z, trace);
        }
    }
    // (3) all stars full: the base case decides
    let all_full = graph
        .vertices()
        .iter()
        .filter(|v| !a_set.contains(v))
        .try_fold(true, |acc, v| {
            Ok::<_, Error>(acc && graph.star(v)? == *graph.vertices())
        })?;
    if all_full {
        trace.log("full-stars base case".to_string());
        return match same_support_full_stars(graph, a_set, g, trace)? {
            IntersectionOutcome::Equal => Ok((Word::identity(graph), a_set.clone())),
            IntersectionOutcome::ContainedIn(d, b) => {
                debug_assert!(b.len() < a_set.len());
                four_parabolic_descent(graph, a_set, g, &d, &b, trace)
            }
        };
    }
    // (4) amalgam decomposition at a proper-star vertex outside A
    let x = graph
        .vertices()
        .iter()
        .find(|v| {
            !a_set.contains(v) && graph.star(v).map(|s| s != *graph.vertices()).unwrap_or(false)
        })
        .expect("step 3 ruled out the all-full case")
        .clone();
    trace.log(format!("amalgam decomposition at `{x}`"));
    let star = graph.star(&x)?;
    let link = graph.link(&x)?;
    let mut y_side = graph.vertices().clone();
    y_side.remove(&x);
    let fact = amalgam_reduce(graph, &x, g)?;
    if fact.blocks.len() == 1 {
        // the only reachable single-block shape here is an X block:
        // g ∈ G_{st(x)}, a proper subgraph; transport there
        let sub = graph.induced_subgraph(&star)?;
        let h = g.retraction_image(&star)?.transport(&sub)?;
        let (c, b) = conjugate_core(&sub, a_set, &h, trace)?;
        return Ok((c.transport(graph)?, b));
    }
    // geodesic conjugators 1 = q_0, q_1, …, q_n, q_{n+1} = g with the
    // interior ones z-adjusted so all stabilizers are A-parabolics
    let prefixes = fact.prefixes_in(graph)?;
    let m = prefixes.len();
    let mut qs: Vec<Word> = Vec::with_capacity(m + 1);
    qs.push(Word::identity(graph));
    for p in prefixes.iter().take(m - 1) {
        let z_fix = p
            .inverse()
            .concat(&p.retraction_image(a_set)?)?
            .retraction_image(&link)?;
        qs.push(p.concat(&z_fix)?);
    }
    qs.push(prefixes[m - 1].clone());
    let mut outcomes: Vec<(Word, VertexSet)> = Vec::with_capacity(m);
    for i in 0..m {
        let r = qs[i].inverse().concat(&qs[i + 1])?;
        let (factor_set, tag) = match fact.blocks[i].0 {
            BlockTag::InX => (&star, "X"),
            BlockTag::InY | BlockTag::InZ => (&y_side, "Y"),
        };
        debug_assert!(in_standard_parabolic(&r, factor_set)?);
        let sub = graph.induced_subgraph(factor_set)?;
        let h = r.retraction_image(factor_set)?.transport(&sub)?;
        trace.log(format!("geodesic segment {i} in the {tag} factor"));
        let (c, b) = conjugate_core(&sub, a_set, &h, trace)?;
        outcomes.push((c.transport(graph)?, b));
    }
    if outcomes.iter().all(|(_, b)| *b == *a_set) {
        return Ok((Word::identity(graph), a_set.clone()));
    }
    let (i, (c, b)) = outcomes
        .iter()
        .enumerate()
        .find(|(_, (_, b))| b.len() < a_set.len())
        .expect("some segment descended");
    let d = qs[i].concat(c)?;
    trace.log(format!("descend through segment {i}"));
    four_parabolic_descent(graph, a_set, g, &d, b, trace)
}

/// Given `G_A ∩ gG_Ag^{-1} ≤ dG_Bd^{-1}`, re-expresses the intersection
/// as `(G_A ∩ dG_Bd^{-1}) ∩ (gG_Ag^{-1} ∩ dG_Bd^{-1})` and intersects
/// the two results, all over supports strictly smaller than `A`.
fn four_parabolic_descent(
    graph: &ArtinGraph,
    a_set: &VertexSet,
    g: &Word,
    d: &Word,
    b_set: &VertexSet,
    trace: &mut Trace,
) -> Result<(Word, VertexSet)> {
    let one = Word::identity(graph);
    let r1 = pair_core(&one, a_set, d, b_set, trace)?;
    let r2 = pair_core(g, a_set, d, b_set, trace)?;
    pair_core(&r1.0, &r1.1, &r2.0, &r2.1, trace)
}

/// Representation of `f G_A f^{-1} ∩ g G_B g^{-1}` as a parabolic.
fn pair_core(
    f: &Word,
    a_set: &VertexSet,
    g: &Word,
    b_set: &VertexSet,
    trace: &mut Trace,
) -> Result<(Word, VertexSet)> {
    let (f2, g2, c) = common_support_reduction(f, a_set, g, b_set)?;
    if c.is_empty() {
        return Ok((Word::identity(f.graph()), VertexSet::new()));
    }
    let rel = f2.inverse().concat(&g2)?;
    let (core, b) = conjugate_core(f.graph(), &c, &rel, trace)?;
    Ok((f2.concat(&core)?, b))
}

/// The parabolic subgroup equal to `P ∩ Q`.
pub fn intersect(p: &ParabolicSubgroup, q: &ParabolicSubgroup) -> Result<ParabolicSubgroup> {
    intersect_traced(p, q).map(|(r, _)| r)
}

/// As [`intersect`], also returning the reduction trace.
pub fn intersect_traced(
    p: &ParabolicSubgroup,
    q: &ParabolicSubgroup,
) -> Result<(ParabolicSubgroup, Trace)> {
    if p.graph() != q.graph() {
        return Err(Error::GraphMismatch);
    }
    let mut trace = Trace::default();
    trace.log(format!(
        "intersect {} with {}",
        display_set(p.support()),
        display_set(q.support())
    ));
    let (c, b) = pair_core(
        p.conjugator(),
        p.support(),
        q.conjugator(),
        q.support(),
        &mut trace,
    )?;
    Ok((ParabolicSubgroup::new(c, b)?, trace))
}

/// Intersection of a nonempty family. The partial intersections form a
/// descending chain with at most `|V| + 1` distinct values; computation
/// stops as soon as the chain stabilizes.
pub fn intersect_many(parabolics: &[ParabolicSubgroup]) -> Result<ParabolicSubgroup> {
    let first = parabolics
        .first()
        .ok_or_else(|| Error::PreconditionFailed("empty intersection family".to_string()))?;
    let mut acc = first.clone();
    let mut distinct = 1usize;
    let cap = first.graph().vertex_count() + 1;
    for p in &parabolics[1..] {
        if acc.is_trivial_subgroup() {
            break;
        }
        let next = intersect(&acc, p)?;
        if !next.equal(&acc)? {
            distinct += 1;
            debug_assert!(distinct <= cap, "chain exceeds |V|+1 distinct parabolics");
            acc = next;
        }
    }
    Ok(acc)
}
