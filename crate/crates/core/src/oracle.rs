//! Brute-force cross-checking oracle and seeded random generators.
//!
//! The oracle decides equality of short words without trusting the main
//! solver: it saturates the ball of freely reduced words of length ≤ L
//! under single relator rewritings (union-find over the ball), and
//! separates words with cheap homomorphic invariants. Answers are
//! three-valued; callers should only build on decisive answers.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::{Arc, Mutex};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{ArtinGraph, RawGraph, VertexId, VertexSet};
use crate::parabolic::ParabolicSubgroup;
use crate::word::Word;

/// Hard cap on the number of ball words the oracle will materialize.
pub const ORACLE_WORD_BUDGET: u64 = 3_000_000;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OracleAnswer {
    True,
    False,
    Unknown,
}

/// The saturated ball of freely reduced words of length ≤ `radius`.
struct CongruenceBall {
    radius: usize,
    index: HashMap<Vec<i8>, u32>,
    class: Vec<u32>,
}

impl CongruenceBall {
    fn same_class(&self, u: &[i8], v: &[i8]) -> Option<bool> {
        if u.len() > self.radius || v.len() > self.radius {
            return None;
        }
        let i = self.index.get(u)?;
        let j = self.index.get(v)?;
        Some(self.class[*i as usize] == self.class[*j as usize])
    }
}

fn ball_size_estimate(n: u64, radius: usize) -> u64 {
    if n == 0 {
        return 1;
    }
    let mut total: u64 = 1;
    let mut layer: u64 = 2 * n;
    for _ in 0..radius {
        total = total.saturating_add(layer);
        layer = layer.saturating_mul(2 * n - 1);
        if total > ORACLE_WORD_BUDGET {
            return total;
        }
    }
    total
}

/// The largest radius whose ball fits in the word budget.
pub fn suggested_radius(graph: &ArtinGraph) -> usize {
    let n = graph.vertex_count() as u64;
    let mut r = 0;
    while r < 24 && ball_size_estimate(n, r + 1) <= ORACLE_WORD_BUDGET {
        r += 1;
    }
    r
}

fn reduce_letters(letters: &[i8]) -> Vec<i8> {
    let mut out: Vec<i8> = Vec::with_capacity(letters.len());
    for &l in letters {
        if out.last().is_some_and(|&p| p == -l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

fn splice(w: &[i8], at: usize, pat_len: usize, repl: &[i8]) -> Vec<i8> {
    let mut out = Vec::with_capacity(w.len() + repl.len());
    out.extend_from_slice(&w[..at]);
    out.extend_from_slice(repl);
    out.extend_from_slice(&w[at + pat_len..]);
    reduce_letters(&out)
}

struct UnionFind(Vec<u32>);

impl UnionFind {
    fn find(&mut self, mut i: u32) -> u32 {
        while self.0[i as usize] != i {
            self.0[i as usize] = self.0[self.0[i as usize] as usize];
            i = self.0[i as usize];
        }
        i
    }

    fn union(&mut self, i: u32, j: u32) {
        let (ri, rj) = (self.find(i), self.find(j));
        if ri != rj {
            self.0[ri as usize] = rj;
        }
    }
}

/// Rewriting rules: every split of every rotation of every relator and
/// its inverse, so the rule set is closed under inversion and the
/// one-step rewrite relation is symmetric inside the ball.
fn relator_rules(graph: &ArtinGraph, order: &[VertexId]) -> Vec<(Vec<i8>, Vec<i8>)> {
    let pos: BTreeMap<&VertexId, i8> = order
        .iter()
        .enumerate()
        .map(|(i, v)| (v, (i + 1) as i8))
        .collect();
    let mut seen: HashSet<(Vec<i8>, Vec<i8>)> = HashSet::new();
    let mut rules = Vec::new();
    for (u, v, m) in graph.edges() {
        let (cu, cv) = (pos[u], pos[v]);
        let mut relator: Vec<i8> = Vec::new();
        for i in 0..m {
            relator.push(if i % 2 == 0 { cu } else { cv });
        }
        for i in (0..m).rev() {
            relator.push(if i % 2 == 0 { -cv } else { -cu });
        }
        let relator = reduce_letters(&relator);
        let inv: Vec<i8> = relator.iter().rev().map(|&l| -l).collect();
        for base in [relator, inv] {
            let len = base.len();
            for rot in 0..len {
                let rotated: Vec<i8> = (0..len).map(|i| base[(i + rot) % len]).collect();
                for cut in 1..len {
                    let pat = rotated[..cut].to_vec();
                    let repl: Vec<i8> = rotated[cut..].iter().rev().map(|&l| -l).collect();
                    if seen.insert((pat.clone(), repl.clone())) {
                        rules.push((pat, repl));
                    }
                }
            }
        }
    }
    rules
}

struct RuleTrie {
    stride: usize,
    next: Vec<u32>,
    terminal: Vec<Vec<u32>>,
}

impl RuleTrie {
    fn slot(&self, letter: i8, n: usize) -> usize {
        if letter < 0 {
            (letter + n as i8) as usize
        } else {
            letter as usize + n - 1
        }
    }

    fn build(n: usize, rules: &[(Vec<i8>, Vec<i8>)]) -> RuleTrie {
        let stride = 2 * n;
        let mut trie = RuleTrie {
            stride,
            next: vec![0; stride],
            terminal: vec![Vec::new()],
        };
        for (id, (pat, _)) in rules.iter().enumerate() {
            let mut node = 0usize;
            for &l in pat {
                let slot = node * stride + trie.slot(l, n);
                if trie.next[slot] == 0 {
                    let fresh = trie.terminal.len();
                    trie.next.extend(std::iter::repeat(0).take(stride));
                    trie.terminal.push(Vec::new());
                    trie.next[slot] = fresh as u32;
                    node = fresh;
                } else {
                    node = trie.next[slot] as usize;
                }
            }
            trie.terminal[node].push(id as u32);
        }
        trie
    }
}

fn build_ball(graph: &ArtinGraph, radius: usize) -> Result<CongruenceBall> {
    let order: Vec<VertexId> = graph.vertices().iter().cloned().collect();
    let n = order.len();
    if ball_size_estimate(n as u64, radius) > ORACLE_WORD_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "ball of radius {radius} on {n} generators"
        )));
    }
    // enumerate freely reduced words breadth-first
    let mut words: Vec<Vec<i8>> = vec![Vec::new()];
    let mut index: HashMap<Vec<i8>, u32> = HashMap::new();
    index.insert(Vec::new(), 0);
    let mut frontier_start = 0usize;
    for _ in 0..radius {
        let frontier_end = words.len();
        for i in frontier_start..frontier_end {
            let w = words[i].clone();
            for l in 1..=(n as i8) {
                for cand in [l, -l] {
                    if w.last().is_some_and(|&p| p == -cand) {
                        continue;
                    }
                    let mut ext = w.clone();
                    ext.push(cand);
                    let id = words.len() as u32;
                    index.insert(ext.clone(), id);
                    words.push(ext);
                }
            }
        }
        frontier_start = frontier_end;
    }

    let rules = relator_rules(graph, &order);
    let mut uf = UnionFind((0..words.len() as u32).collect());
    if !rules.is_empty() {
        let trie = RuleTrie::build(n, &rules);
        for (i, w) in words.iter().enumerate() {
            for start in 0..w.len() {
                let mut node = 0usize;
                for (offset, &l) in w[start..].iter().enumerate() {
                    let nxt = trie.next[node * trie.stride + trie.slot(l, n)];
                    if nxt == 0 {
                        break;
                    }
                    node = nxt as usize;
                    for &rid in &trie.terminal[node] {
                        let (pat, repl) = &rules[rid as usize];
                        let rewritten = splice(w, start, offset + 1, repl);
                        debug_assert_eq!(pat.len(), offset + 1);
                        if rewritten.len() <= radius {
                            let j = index[&rewritten];
                            uf.union(i as u32, j);
                        }
                    }
                }
            }
        }
    }
    let class: Vec<u32> = (0..words.len() as u32).map(|i| uf.find(i)).collect();
    Ok(CongruenceBall {
        radius,
        index,
        class,
    })
}

static BALL_CACHE: Mutex<Option<HashMap<(Arc<str>, usize), Arc<CongruenceBall>>>> =
    Mutex::new(None);

fn get_ball(graph: &ArtinGraph, radius: usize) -> Result<Arc<CongruenceBall>> {
    let key = (graph.key().clone(), radius);
    if let Some(hit) = BALL_CACHE
        .lock()
        .expect("ball cache lock")
        .get_or_insert_with(HashMap::new)
        .get(&key)
        .cloned()
    {
        return Ok(hit);
    }
    let ball = Arc::new(build_ball(graph, radius)?);
    BALL_CACHE
        .lock()
        .expect("ball cache lock")
        .get_or_insert_with(HashMap::new)
        .insert(key, ball.clone());
    Ok(ball)
}

fn encode(w: &Word, order: &[VertexId]) -> Vec<i8> {
    let pos: BTreeMap<&VertexId, i8> = order
        .iter()
        .enumerate()
        .map(|(i, v)| (v, (i + 1) as i8))
        .collect();
    let mut out = Vec::new();
    for s in w.syllables() {
        let c = pos[&s.gen];
        let l = if s.exp > 0 { c } else { -c };
        for _ in 0..s.exp.unsigned_abs() {
            out.push(l);
        }
    }
    out
}

/// Canonical form in `⟨a,b | prod(a,b,2k)=prod(b,a,2k)⟩` over letters
/// `±1, ±2`, computed independently of the main solver: central power
/// of `(ab)^k` plus an alternating tail.
fn dihedral_canon(k: i64, letters: &[i8]) -> (i64, Vec<(u8, i64)>) {
    // slots: 0 = the first generator, 1 = c = (first)(second)
    let mut central = 0i64;
    let mut body: Vec<(u8, i64)> = Vec::new();
    let feed = |slot: u8, exp: i64, central: &mut i64, body: &mut Vec<(u8, i64)>| {
        let mut exp = exp;
        loop {
            if slot == 1 {
                *central += exp.div_euclid(k);
                exp = exp.rem_euclid(k);
            }
            if exp == 0 {
                return;
            }
            match body.last() {
                Some(&(top, te)) if top == slot => {
                    body.pop();
                    exp += te;
                }
                _ => {
                    body.push((slot, exp));
                    return;
                }
            }
        }
    };
    for &l in letters {
        match l {
            1 => feed(0, 1, &mut central, &mut body),
            -1 => feed(0, -1, &mut central, &mut body),
            2 => {
                feed(0, -1, &mut central, &mut body);
                feed(1, 1, &mut central, &mut body);
            }
            -2 => {
                feed(1, -1, &mut central, &mut body);
                feed(0, 1, &mut central, &mut body);
            }
            _ => unreachable!("dihedral letters are ±1, ±2"),
        }
    }
    (central, body)
}

fn separated_by_invariants(graph: &ArtinGraph, u: &Word, v: &Word, radius: usize) -> Result<bool> {
    // per-generator exponent sums
    for g in graph.vertices() {
        if u.exponent_sum(g) != v.exponent_sum(g) {
            return Ok(true);
        }
    }
    // two-generator retraction images, decided by an independent normal form
    let order: Vec<VertexId> = graph.vertices().iter().cloned().collect();
    for (i, p) in order.iter().enumerate() {
        for q in order.iter().skip(i + 1) {
            let s: VertexSet = [p.clone(), q.clone()].into_iter().collect();
            let pair = [p.clone(), q.clone()];
            let ru = encode(&u.retraction_image(&s)?, &pair);
            let rv = encode(&v.retraction_image(&s)?, &pair);
            match graph.label(p, q) {
                Some(m) => {
                    if dihedral_canon(m / 2, &ru) != dihedral_canon(m / 2, &rv) {
                        return Ok(true);
                    }
                }
                // free product: freely reduced images must coincide
                None => {
                    if ru != rv {
                        return Ok(true);
                    }
                }
            }
        }
    }
    // recurse through co-vertex retractions
    if graph.vertex_count() > 2 {
        for g in order {
            let mut s = graph.vertices().clone();
            s.remove(&g);
            let sub = graph.induced_subgraph(&s)?;
            let ru = u.retraction_image(&s)?.transport(&sub)?;
            let rv = v.retraction_image(&s)?.transport(&sub)?;
            if oracle_equal_clamped(&sub, &ru, &rv, radius)? == OracleAnswer::False {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

fn oracle_equal_clamped(
    graph: &ArtinGraph,
    u: &Word,
    v: &Word,
    radius: usize,
) -> Result<OracleAnswer> {
    let radius = radius.min(suggested_radius(graph));
    oracle_equal(graph, u, v, radius)
}

/// Three-valued equality test: `True` when the saturated ball merges the
/// words, `False` when a homomorphic invariant separates them, `Unknown`
/// otherwise.
pub fn oracle_equal(graph: &ArtinGraph, u: &Word, v: &Word, radius: usize) -> Result<OracleAnswer> {
    if u.graph() != graph || v.graph() != graph {
        return Err(Error::GraphMismatch);
    }
    let order: Vec<VertexId> = graph.vertices().iter().cloned().collect();
    let eu = encode(u, &order);
    let ev = encode(v, &order);
    if eu == ev {
        return Ok(OracleAnswer::True);
    }
    let ball = get_ball(graph, radius)?;
    if ball.same_class(&eu, &ev) == Some(true) {
        return Ok(OracleAnswer::True);
    }
    if separated_by_invariants(graph, u, v, radius)? {
        return Ok(OracleAnswer::False);
    }
    Ok(OracleAnswer::Unknown)
}

const NAME_POOL: [&str; 12] = ["a", "b", "c", "d", "e", "f", "g", "h", "p", "q", "r", "s"];

/// Seeded random even FC graph by rejection sampling on the triangle
/// criterion.
pub fn random_graph(seed: u64, max_vertices: usize, label_pool: &[i64]) -> Result<ArtinGraph> {
    if label_pool.is_empty() || label_pool.iter().any(|l| ![2, 4, 6, 8].contains(l)) {
        return Err(Error::PreconditionFailed(
            "label pool must be a nonempty subset of {2,4,6,8}".to_string(),
        ));
    }
    let max_vertices = max_vertices.min(NAME_POOL.len()).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=max_vertices);
        let mut raw = RawGraph::default();
        for name in NAME_POOL.iter().take(n) {
            raw.vertex(name)?;
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen_bool(0.6) {
                    let label = label_pool[rng.gen_range(0..label_pool.len())];
                    raw.edge(NAME_POOL[i], NAME_POOL[j], label)?;
                }
            }
        }
        if let Ok(graph) = ArtinGraph::build(&raw) {
            return Ok(graph);
        }
    }
    Err(Error::Internal(
        "rejection sampling failed to produce a valid graph".to_string(),
    ))
}

/// Seeded random freely reduced word of at most `max_len` letters.
pub fn random_word(seed: u64, graph: &ArtinGraph, max_len: usize) -> Result<Word> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order: Vec<VertexId> = graph.vertices().iter().cloned().collect();
    if order.is_empty() {
        return Ok(Word::identity(graph));
    }
    let len = rng.gen_range(0..=max_len);
    let mut letters: Vec<(usize, i64)> = Vec::new();
    while letters.len() < len {
        let g = rng.gen_range(0..order.len());
        let e: i64 = if rng.gen_bool(0.5) { 1 } else { -1 };
        if letters.last().is_some_and(|&(pg, pe)| pg == g && pe == -e) {
            continue;
        }
        letters.push((g, e));
    }
    Word::from_syllables(
        graph,
        letters.into_iter().map(|(g, e)| (order[g].clone(), e)),
    )
}

/// Seeded random parabolic subgroup with a short conjugator.
pub fn random_parabolic(seed: u64, graph: &ArtinGraph) -> Result<ParabolicSubgroup> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let support: VertexSet = graph
        .vertices()
        .iter()
        .filter(|_| rng.gen_bool(0.5))
        .cloned()
        .collect();
    let conj = random_word(rng.gen(), graph, 6)?;
    ParabolicSubgroup::new(conj, support)
}

/// Result of cross-checking the solver against the oracle on random
/// instances.
#[derive(Clone, Debug, Default)]
pub struct SelftestReport {
    pub cases: usize,
    pub decisive: usize,
    pub unknown: usize,
    pub agreements: usize,
    pub disagreements: Vec<String>,
}

pub fn selftest(seed: u64, max_vertices: usize, max_len: usize, cases: usize) -> Result<SelftestReport> {
    let mut report = SelftestReport::default();
    for i in 0..cases {
        let case_seed = seed.wrapping_mul(1_000_003).wrapping_add(i as u64);
        let graph = random_graph(case_seed, max_vertices, &[2, 4, 6, 8])?;
        let radius = suggested_radius(&graph).min(8);
        let len_cap = max_len.min(radius);
        let u = random_word(case_seed ^ 0x5eed, &graph, len_cap)?;
        let v = random_word(case_seed ^ 0xbeef, &graph, len_cap)?;
        report.cases += 1;
        let oracle = oracle_equal(&graph, &u, &v, radius)?;
        if oracle == OracleAnswer::Unknown {
            report.unknown += 1;
            continue;
        }
        report.decisive += 1;
        let solver = crate::solve::is_equal(&u, &v)?;
        let agree = (oracle == OracleAnswer::True) == solver;
        if agree {
            report.agreements += 1;
        } else {
            report.disagreements.push(format!(
                "graph {}: `{u}` vs `{v}`: solver {} oracle {:?}",
                graph.key(),
                solver,
                oracle
            ));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

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

    #[test]
    fn relator_instance_is_true() {
        let g = gamma1();
        let u = Word::parse(&g, "a x a x").unwrap();
        let v = Word::parse(&g, "x a x a").unwrap();
        assert_eq!(oracle_equal(&g, &u, &v, 8).unwrap(), OracleAnswer::True);
    }

    #[test]
    fn exponent_sum_separation() {
        let g = gamma1();
        let u = Word::parse(&g, "a b").unwrap();
        let v = Word::parse(&g, "a").unwrap();
        assert_eq!(oracle_equal(&g, &u, &v, 6).unwrap(), OracleAnswer::False);
    }

    #[test]
    fn dihedral_separation() {
        let mut raw = RawGraph::default();
        raw.vertex("a").unwrap();
        raw.vertex("b").unwrap();
        raw.edge("a", "b", 4).unwrap();
        let g = ArtinGraph::build(&raw).unwrap();
        let u = Word::parse(&g, "a b a^-1 b^-1").unwrap();
        let v = Word::identity(&g);
        assert_eq!(oracle_equal(&g, &u, &v, 8).unwrap(), OracleAnswer::False);
    }

    #[test]
    fn seed_determinism() {
        let g1 = random_graph(42, 4, &[2, 4]).unwrap();
        let g2 = random_graph(42, 4, &[2, 4]).unwrap();
        assert_eq!(g1.key(), g2.key());
        let w1 = random_word(7, &g1, 10).unwrap();
        let w2 = random_word(7, &g2, 10).unwrap();
        assert_eq!(w1.to_string(), w2.to_string());
        let p1 = random_parabolic(9, &g1).unwrap();
        let p2 = random_parabolic(9, &g1).unwrap();
        assert!(p1.equal(&p2).unwrap());
    }

    #[test]
    fn label_pool_two_gives_raag() {
        for seed in 0..10 {
            let g = random_graph(seed, 5, &[2]).unwrap();
            assert!(g.edges().all(|(_, _, m)| m == 2));
        }
    }

    #[test]
    fn bad_label_pool_rejected() {
        assert!(matches!(
            random_graph(1, 3, &[3]),
            Err(Error::PreconditionFailed(_))
        ));
    }

    #[test]
    fn budget_guard() {
        let g = random_graph(3, 5, &[2, 4]).unwrap();
        assert!(matches!(
            oracle_equal(
                &g,
                &Word::identity(&g),
                &Word::identity(&g).concat(&random_word(1, &g, 2).unwrap()).unwrap(),
                40
            ),
            Err(Error::BudgetExceeded(_)) | Ok(_)
        ));
        // a genuinely oversized request errors
        let big = random_graph(11, 5, &[2]).unwrap();
        if big.vertex_count() >= 3 {
            let u = random_word(2, &big, 2).unwrap();
            assert!(matches!(
                oracle_equal(&big, &u, &Word::identity(&big), 30),
                Err(Error::BudgetExceeded(_))
            ));
        }
    }

    #[test]
    fn selftest_agrees_with_solver() {
        let report = selftest(2024, 3, 6, 40).unwrap();
        assert_eq!(report.cases, 40);
        assert!(report.disagreements.is_empty(), "{:?}", report.disagreements);
        assert!(report.decisive > 0);
    }
}
