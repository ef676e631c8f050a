//! Acceptance gate: one test per criterion, each printing a PASS line.
//!
//! Tolerances (case counts, length bounds, time budgets) are pinned as
//! constants next to each test.

use std::time::Instant;

use evenfc::intersect::{dihedral_cyclic_intersection, intersect, DihedralIntersection};
use evenfc::kernel::{
    conjugate_power_formula, covertex_expand, covertex_rewrite, kernel_embed, kernel_rewrite,
    vertex_kernel_graph, CovertexBasisLetter,
};
use evenfc::oracle::{oracle_equal, random_graph, random_parabolic, random_word, OracleAnswer};
use evenfc::parabolic::{common_support_reduction, ParabolicSubgroup};
use evenfc::solve::{in_standard_parabolic, is_equal, is_trivial};
use evenfc::{ArtinGraph, RawGraph, VertexId, VertexSet, Word};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn v(name: &str) -> VertexId {
    VertexId::new(name).unwrap()
}

/// Triangle a-x(4), b-x(2), a-b(2).
fn gamma1() -> ArtinGraph {
    let mut raw = RawGraph::default();
    for name in ["a", "b", "x"] {
        raw.vertex(name).unwrap();
    }
    raw.edge("a", "x", 4).unwrap();
    raw.edge("b", "x", 2).unwrap();
    raw.edge("a", "b", 2).unwrap();
    ArtinGraph::build(&raw).unwrap()
}

fn random_subset(rng: &mut ChaCha8Rng, graph: &ArtinGraph) -> VertexSet {
    graph
        .vertices()
        .iter()
        .filter(|_| rng.gen_bool(0.5))
        .cloned()
        .collect()
}

/// All freely reduced words of length ≤ `max_len` over the graph.
fn all_words(graph: &ArtinGraph, max_len: usize) -> Vec<Word> {
    let gens: Vec<VertexId> = graph.vertices().iter().cloned().collect();
    let mut frontier = vec![Word::identity(graph)];
    let mut out = frontier.clone();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for g in &gens {
                for e in [1i64, -1] {
                    let cand = w.concat(&Word::generator(graph, g, e).unwrap()).unwrap();
                    if cand.letter_len() == w.letter_len() + 1 {
                        next.push(cand);
                    }
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[test]
fn acceptance_01_word_problem_oracle_agreement() {
    const MIN_DECISIVE: usize = 2_000;
    const MAX_ATTEMPTS: usize = 8_000;
    const MAX_SECONDS: u64 = 300;
    const RADIUS: usize = 6;
    let start = Instant::now();
    let mut decisive = 0usize;
    let mut attempts = 0usize;
    while decisive < MIN_DECISIVE && attempts < MAX_ATTEMPTS {
        let seed = attempts as u64;
        attempts += 1;
        let graph = random_graph(seed, 3, &[2, 4, 6]).unwrap();
        let u = random_word(seed ^ 0x1111, &graph, RADIUS).unwrap();
        let w = random_word(seed ^ 0x2222, &graph, RADIUS).unwrap();
        let oracle = oracle_equal(&graph, &u, &w, RADIUS).unwrap();
        if oracle == OracleAnswer::Unknown {
            continue;
        }
        decisive += 1;
        let solver = is_equal(&u, &w).unwrap();
        assert_eq!(
            oracle == OracleAnswer::True,
            solver,
            "oracle/solver disagreement at seed {seed}: {u} vs {w}"
        );
    }
    assert!(decisive >= MIN_DECISIVE, "only {decisive} decisive cases");
    let elapsed = start.elapsed().as_secs();
    assert!(elapsed < MAX_SECONDS, "took {elapsed}s");
    println!("ACCEPTANCE 1 word-problem oracle agreement ({decisive} decisive cases): PASS");
}

#[test]
fn acceptance_02_standard_intersection() {
    const CASES: usize = 500;
    for i in 0..CASES {
        let seed = 9_000 + i as u64;
        let graph = random_graph(seed, 5, &[2, 4, 6, 8]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
        let a_set = random_subset(&mut rng, &graph);
        let b_set = random_subset(&mut rng, &graph);
        let c_set: VertexSet = a_set.intersection(&b_set).cloned().collect();
        let w = random_word(seed ^ 0x3333, &graph, 8).unwrap();
        let in_both = in_standard_parabolic(&w, &a_set).unwrap()
            && in_standard_parabolic(&w, &b_set).unwrap();
        let in_meet = in_standard_parabolic(&w, &c_set).unwrap();
        assert_eq!(in_both, in_meet, "seed {seed}: {w}");
    }
    println!("ACCEPTANCE 2 standard parabolic intersection ({CASES} cases): PASS");
}

#[test]
fn acceptance_03_common_support_certificate() {
    const CASES: usize = 300;
    const SAMPLES: usize = 100;
    for i in 0..CASES {
        let seed = 20_000 + i as u64;
        let graph = random_graph(seed, 4, &[2, 4]).unwrap();
        let p = random_parabolic(seed ^ 0x10, &graph).unwrap();
        let q = random_parabolic(seed ^ 0x20, &graph).unwrap();
        let (f2, g2, c) =
            common_support_reduction(p.conjugator(), p.support(), q.conjugator(), q.support())
                .unwrap();
        let p2 = ParabolicSubgroup::new(f2, c.clone()).unwrap();
        let q2 = ParabolicSubgroup::new(g2, c).unwrap();
        for j in 0..SAMPLES {
            let w = random_word(seed ^ ((j as u64) << 16), &graph, 6).unwrap();
            let before = p.member(&w).unwrap() && q.member(&w).unwrap();
            let after = p2.member(&w).unwrap() && q2.member(&w).unwrap();
            assert_eq!(before, after, "seed {seed} sample {j}: {w}");
        }
    }
    println!("ACCEPTANCE 3 common-support certificate ({CASES}x{SAMPLES} samples): PASS");
}

#[test]
fn acceptance_04_dihedral_cyclic_exhaustive() {
    const MAX_LEN: usize = 5;
    const ORACLE_LEN: usize = 3;
    const MAX_SECONDS: u64 = 120;
    let start = Instant::now();
    let mut checked = 0usize;
    for m in [4i64, 6] {
        let mut raw = RawGraph::default();
        raw.vertex("a").unwrap();
        raw.vertex("x").unwrap();
        raw.edge("a", "x", m).unwrap();
        let graph = ArtinGraph::build(&raw).unwrap();
        let a = v("a");
        let a_word = Word::generator(&graph, &a, 1).unwrap();
        let support: VertexSet = [a.clone()].into_iter().collect();
        for g in all_words(&graph, MAX_LEN) {
            let verdict = dihedral_cyclic_intersection(m / 2, &a, &g).unwrap();
            let sub = ParabolicSubgroup::new(g.clone(), support.clone()).unwrap();
            // a lies in ⟨a⟩ ∩ g⟨a⟩g^{-1} exactly when the verdict is Full
            let member = sub.member(&a_word).unwrap();
            assert_eq!(
                verdict == DihedralIntersection::Full,
                member,
                "m={m} g={g}"
            );
            // oracle cross-check on short conjugators
            if g.letter_len() <= ORACLE_LEN {
                for e in [-2i64, -1, 1, 2] {
                    let conj = a_word.pow(e).unwrap().conjugate(&g).unwrap();
                    if oracle_equal(&graph, &a_word, &conj, 8).unwrap() == OracleAnswer::True {
                        assert_eq!(verdict, DihedralIntersection::Full, "m={m} g={g} e={e}");
                    }
                }
            }
            checked += 1;
        }
    }
    let elapsed = start.elapsed().as_secs();
    assert!(elapsed < MAX_SECONDS, "took {elapsed}s");
    println!("ACCEPTANCE 4 dihedral cyclic intersection ({checked} words): PASS");
}

#[test]
fn acceptance_05_kernel_round_trip() {
    const CASES: usize = 500;
    // Γ1 plus a four-vertex graph with star(x) = V
    let g4 = {
        let mut raw = RawGraph::default();
        for name in ["a", "b", "c", "x"] {
            raw.vertex(name).unwrap();
        }
        raw.edge("a", "x", 4).unwrap();
        raw.edge("b", "x", 2).unwrap();
        raw.edge("c", "x", 2).unwrap();
        raw.edge("a", "b", 2).unwrap();
        raw.edge("b", "c", 4).unwrap();
        ArtinGraph::build(&raw).unwrap()
    };
    let graphs = [gamma1(), g4];
    let mut done = 0usize;
    let mut i = 0u64;
    while done < CASES {
        let graph = &graphs[(i % 2) as usize];
        let x = v("x");
        let w = random_word(40_000 + i, graph, 7).unwrap();
        i += 1;
        let h = w
            .concat(&Word::generator(graph, &x, 1).unwrap().pow(-w.exponent_sum(&x)).unwrap())
            .unwrap();
        let mut ctx = vertex_kernel_graph(graph, &x).unwrap();
        let rewritten = kernel_rewrite(&mut ctx, &h).unwrap();
        let back = kernel_embed(&ctx, &rewritten).unwrap();
        assert!(is_equal(&back, &h).unwrap(), "round trip failed for {h}");
        done += 1;
    }
    // every Δ-relator embeds to a trivial word
    for graph in &graphs {
        let ctx = vertex_kernel_graph(graph, &v("x")).unwrap();
        let delta = ctx.delta().clone();
        for (u, w2, m) in delta.edges() {
            let lhs = Word::alternating(&delta, u, w2, m).unwrap();
            let rhs = Word::alternating(&delta, w2, u, m).unwrap();
            let relator = lhs.concat(&rhs.inverse()).unwrap();
            let image = kernel_embed(&ctx, &relator).unwrap();
            assert!(is_trivial(&image).unwrap(), "relator {u}-{w2} survives");
        }
    }
    // orientation regression: k = 2, l = 2 against x^2 a x^-2
    let g1 = gamma1();
    let ctx = vertex_kernel_graph(&g1, &v("x")).unwrap();
    let formula = conjugate_power_formula(&ctx, &v("a"), 2).unwrap();
    let direct = Word::parse(&g1, "x^2 a x^-2").unwrap();
    assert!(is_equal(&kernel_embed(&ctx, &formula).unwrap(), &direct).unwrap());
    println!("ACCEPTANCE 5 kernel round trip ({done} words + relators + orientation): PASS");
}

#[test]
fn acceptance_06_covertex_basis() {
    const ROUND_TRIPS: usize = 300;
    const SEQUENCES: usize = 200;
    // paths c - a - z - b with all labels at z equal 2
    let path = {
        let mut raw = RawGraph::default();
        for name in ["a", "b", "c", "z"] {
            raw.vertex(name).unwrap();
        }
        raw.edge("c", "a", 4).unwrap();
        raw.edge("a", "z", 2).unwrap();
        raw.edge("z", "b", 2).unwrap();
        ArtinGraph::build(&raw).unwrap()
    };
    let z = v("z");
    let mut others = path.vertices().clone();
    others.remove(&z);
    let mut done = 0usize;
    let mut i = 0u64;
    while done < ROUND_TRIPS {
        let w = random_word(50_000 + i, &path, 7).unwrap();
        i += 1;
        // project into the kernel of ρ_{V−{z}}
        let outside = w.retraction_image(&others).unwrap();
        let h = w.concat(&outside.inverse()).unwrap();
        let letters = covertex_rewrite(&path, &z, &h).unwrap();
        let back = covertex_expand(&path, &z, &letters).unwrap();
        assert!(is_equal(&back, &h).unwrap(), "round trip failed for {h}");
        done += 1;
    }
    // random nonempty reduced basis sequences expand to nontrivial words
    let link = path.link(&z).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0ffee);
    let mut tested = 0usize;
    while tested < SEQUENCES {
        let len = rng.gen_range(1..=3usize);
        let mut letters: Vec<CovertexBasisLetter> = Vec::new();
        for _ in 0..len {
            let p = random_word(rng.gen(), &path, 4).unwrap();
            let p = p.retraction_image(&others).unwrap();
            let t = p.concat(&p.retraction_image(&link).unwrap().inverse()).unwrap();
            let exponent = *[-2i64, -1, 1, 2].iter().nth(rng.gen_range(0..4)).unwrap();
            letters.push(CovertexBasisLetter { conjugator: t, exponent });
        }
        // keep the sequence reduced: merge adjacent equal conjugators
        let mut reduced: Vec<CovertexBasisLetter> = Vec::new();
        for l in letters {
            match reduced.last_mut() {
                Some(prev) if is_equal(&prev.conjugator, &l.conjugator).unwrap() => {
                    prev.exponent += l.exponent;
                    if prev.exponent == 0 {
                        reduced.pop();
                    }
                }
                _ => reduced.push(l),
            }
        }
        if reduced.is_empty() {
            continue;
        }
        let word = covertex_expand(&path, &z, &reduced).unwrap();
        assert!(!is_trivial(&word).unwrap(), "basis sequence collapsed");
        tested += 1;
    }
    println!("ACCEPTANCE 6 covertex free basis ({ROUND_TRIPS}+{SEQUENCES} cases): PASS");
}

#[test]
fn acceptance_07_main_theorem_soundness() {
    const CASES: usize = 200;
    const SAMPLES: usize = 200;
    const MAX_SECONDS: u64 = 1_800;
    let start = Instant::now();
    for i in 0..CASES {
        let seed = 60_000 + i as u64;
        let graph = random_graph(seed, 4, &[2, 4]).unwrap();
        let p = random_parabolic(seed ^ 0x100, &graph).unwrap();
        let q = random_parabolic(seed ^ 0x200, &graph).unwrap();
        let r = intersect(&p, &q).unwrap();
        // R ⊆ P ∩ Q exactly on generators
        for s in r.support() {
            let w = Word::generator(&graph, s, 1)
                .unwrap()
                .conjugate(r.conjugator())
                .unwrap();
            assert!(p.member(&w).unwrap() && q.member(&w).unwrap(), "seed {seed}: {s}");
        }
        // bidirectional membership sampling
        for j in 0..SAMPLES {
            let w = random_word(seed ^ ((j as u64) << 20), &graph, 8).unwrap();
            let in_both = p.member(&w).unwrap() && q.member(&w).unwrap();
            assert_eq!(in_both, r.member(&w).unwrap(), "seed {seed} sample {j}: {w}");
        }
    }
    let elapsed = start.elapsed().as_secs();
    assert!(elapsed < MAX_SECONDS, "took {elapsed}s");
    println!("ACCEPTANCE 7 intersection soundness ({CASES}x{SAMPLES} samples, {elapsed}s): PASS");
}

/// Independent right-angled reducer: repeatedly deletes a cancelling
/// pair whose in-between letters all commute with it. The support of
/// the fully reduced word is the support of the element.
fn raag_reduce(graph: &ArtinGraph, w: &Word) -> Vec<(VertexId, i64)> {
    let mut letters: Vec<(VertexId, i64)> = Vec::new();
    for s in w.syllables() {
        let step = if s.exp > 0 { 1 } else { -1 };
        for _ in 0..s.exp.abs() {
            letters.push((s.gen.clone(), step));
        }
    }
    let commutes = |u: &VertexId, v: &VertexId| u == v || graph.label(u, v) == Some(2);
    'outer: loop {
        for i in 0..letters.len() {
            for j in (i + 1)..letters.len() {
                if letters[j].0 == letters[i].0 {
                    if letters[j].1 == -letters[i].1
                        && letters[i + 1..j].iter().all(|(g, _)| commutes(g, &letters[i].0))
                    {
                        letters.remove(j);
                        letters.remove(i);
                        continue 'outer;
                    }
                    if !letters[i + 1..j].iter().all(|(g, _)| commutes(g, &letters[i].0)) {
                        break;
                    }
                }
            }
        }
        return letters;
    }
}

fn raag_member(graph: &ArtinGraph, p: &ParabolicSubgroup, w: &Word) -> bool {
    let inner = w.conjugate(&p.conjugator().inverse()).unwrap();
    raag_reduce(graph, &inner)
        .iter()
        .all(|(g, _)| p.support().contains(g))
}

#[test]
fn acceptance_08_raag_specialization() {
    const CASES: usize = 40;
    const SAMPLES: usize = 100;
    for i in 0..CASES {
        let seed = 70_000 + i as u64;
        let graph = random_graph(seed, 4, &[2]).unwrap();
        let p = random_parabolic(seed ^ 0x31, &graph).unwrap();
        let q = random_parabolic(seed ^ 0x42, &graph).unwrap();
        let r = intersect(&p, &q).unwrap();
        // the result's generators are common members per the independent reducer
        for s in r.support() {
            let w = Word::generator(&graph, s, 1)
                .unwrap()
                .conjugate(r.conjugator())
                .unwrap();
            assert!(raag_member(&graph, &p, &w), "seed {seed}: {s} not in P");
            assert!(raag_member(&graph, &q, &w), "seed {seed}: {s} not in Q");
        }
        // brute-force sample agreement
        for j in 0..SAMPLES {
            let w = random_word(seed ^ ((j as u64) << 24), &graph, 6).unwrap();
            let in_both = raag_member(&graph, &p, &w) && raag_member(&graph, &q, &w);
            assert_eq!(in_both, raag_member(&graph, &r, &w), "seed {seed} sample {j}: {w}");
        }
    }
    println!("ACCEPTANCE 8 raag specialization ({CASES}x{SAMPLES} samples): PASS");
}

#[test]
fn acceptance_09_chain_length() {
    const FAMILIES: usize = 100;
    for i in 0..FAMILIES {
        let seed = 80_000 + i as u64;
        let graph = random_graph(seed, 3, &[2, 4]).unwrap();
        let n = graph.vertex_count();
        let family: Vec<ParabolicSubgroup> = (0..n + 3)
            .map(|j| random_parabolic(seed ^ ((j as u64) << 12), &graph).unwrap())
            .collect();
        let mut acc = family[0].clone();
        let mut distinct = 1usize;
        for p in &family[1..] {
            let next = intersect(&acc, p).unwrap();
            if !next.equal(&acc).unwrap() {
                distinct += 1;
                acc = next;
            }
        }
        assert!(distinct <= n + 1, "seed {seed}: chain has {distinct} values");
    }
    println!("ACCEPTANCE 9 chain length bound ({FAMILIES} families): PASS");
}

#[test]
fn acceptance_10_schreier_letter_disjointness() {
    const F_LEN: usize = 4;
    // Work in the kernel graph Δ of Γ1 at x: vertices a.0, a.1, b.0.
    // Basis letters of ker ρ_{V_Δ-{a_0}} are indexed by Schreier
    // representatives t ∈ ker ρ_L with L = lk(a_0) = {b_0}; the two
    // letter sets are {t a_0 t^{-1} : t ∈ ker ρ_L ∩ G_{A_0}} and
    // {t a_0 t^{-1} : t ∈ f' P a_1^l ∩ ker ρ_L}.
    let g1 = gamma1();
    let ctx = vertex_kernel_graph(&g1, &v("x")).unwrap();
    let delta = ctx.delta().clone();
    let (a0, a1, b0) = (v("a.0"), v("a.1"), v("b.0"));
    let link: VertexSet = [b0.clone()].into_iter().collect();
    let gen = |u: &VertexId, e: i64| Word::generator(&delta, u, e).unwrap();
    let schreier = |w: &Word| -> Word {
        w.concat(&w.retraction_image(&link).unwrap().inverse()).unwrap()
    };
    // representatives from G_{A_0} all have zero a_1-exponent
    let t_a: Vec<Word> = ["1", "a.0", "b.0", "a.0 b.0", "a.0^-1", "b.0^-1 a.0"]
        .iter()
        .map(|t| schreier(&Word::parse(&delta, t).unwrap()))
        .collect();
    let mut combos = 0usize;
    for f in all_words(&delta, F_LEN) {
        for l in [-2i64, -1, 1, 2] {
            if f.exponent_sum(&a1) + l == 0 {
                continue;
            }
            combos += 1;
            let f_prime = schreier(&f);
            // samples of P ∩ ker ρ_L: products of conjugates of a_1^l a_0 a_1^{-l}
            let big_a = gen(&a0, 1).conjugate(&gen(&a1, l)).unwrap();
            let p_samples: Vec<Word> = vec![
                Word::identity(&delta),
                big_a.clone(),
                big_a.inverse(),
                big_a.conjugate(&gen(&b0, 1)).unwrap(),
            ];
            for p in &p_samples {
                let t_p = f_prime.concat(p).unwrap().concat(&gen(&a1, l)).unwrap();
                for t in &t_a {
                    assert!(
                        !is_equal(&t_p, t).unwrap(),
                        "letter sets intersect for f={f}, l={l}: t={t_p}"
                    );
                }
            }
        }
    }
    println!("ACCEPTANCE 10 Schreier letter disjointness ({combos} (f,l) pairs): PASS");
}
