//! Syllable words over an Artin graph's generating set.
//!
//! Words are kept freely reduced at all times: adjacent syllables have
//! distinct generators and no exponent is zero. A configurable global
//! length cap aborts runaway computations.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};
use crate::graph::{ArtinGraph, VertexId, VertexSet};

static LENGTH_CAP: AtomicUsize = AtomicUsize::new(10_000);

/// Sets the global syllable cap. Returns the previous value.
pub fn set_length_cap(cap: usize) -> usize {
    LENGTH_CAP.swap(cap, Ordering::Relaxed)
}

pub fn length_cap() -> usize {
    LENGTH_CAP.load(Ordering::Relaxed)
}

#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Syllable {
    pub gen: VertexId,
    pub exp: i64,
}

/// A freely reduced word, tagged with its ambient graph.
#[derive(Clone, PartialEq, Eq)]
pub struct Word {
    graph: ArtinGraph,
    syllables: Vec<Syllable>,
}

impl Word {
    pub fn identity(graph: &ArtinGraph) -> Word {
        Word {
            graph: graph.clone(),
            syllables: Vec::new(),
        }
    }

    pub fn generator(graph: &ArtinGraph, v: &VertexId, exp: i64) -> Result<Word> {
        Word::from_syllables(graph, [(v.clone(), exp)])
    }

    /// Builds a word from raw syllables, freely reducing on the way.
    pub fn from_syllables<I>(graph: &ArtinGraph, syllables: I) -> Result<Word>
    where
        I: IntoIterator<Item = (VertexId, i64)>,
    {
        let mut out: Vec<Syllable> = Vec::new();
        for (gen, exp) in syllables {
            if !graph.contains(&gen) {
                return Err(Error::UnknownVertex(gen.to_string()));
            }
            push_syllable(&mut out, gen, exp)?;
        }
        Ok(Word {
            graph: graph.clone(),
            syllables: out,
        })
    }

    pub fn graph(&self) -> &ArtinGraph {
        &self.graph
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn is_identity_word(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Number of syllables.
    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Number of letters, counting exponents.
    pub fn letter_len(&self) -> usize {
        self.syllables
            .iter()
            .map(|s| s.exp.unsigned_abs() as usize)
            .sum()
    }

    fn check_same_graph(&self, other: &Word) -> Result<()> {
        if self.graph == other.graph {
            Ok(())
        } else {
            Err(Error::GraphMismatch)
        }
    }

    pub fn concat(&self, other: &Word) -> Result<Word> {
        self.check_same_graph(other)?;
        let mut out = self.syllables.clone();
        for s in &other.syllables {
            push_syllable(&mut out, s.gen.clone(), s.exp)?;
        }
        Ok(Word {
            graph: self.graph.clone(),
            syllables: out,
        })
    }

    pub fn inverse(&self) -> Word {
        Word {
            graph: self.graph.clone(),
            syllables: self
                .syllables
                .iter()
                .rev()
                .map(|s| Syllable {
                    gen: s.gen.clone(),
                    exp: -s.exp,
                })
                .collect(),
        }
    }

    /// `by · self · by^{-1}`
    pub fn conjugate(&self, by: &Word) -> Result<Word> {
        by.concat(self)?.concat(&by.inverse())
    }

    pub fn pow(&self, n: i64) -> Result<Word> {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity(&self.graph);
        for _ in 0..n.unsigned_abs() {
            out = out.concat(&base)?;
        }
        Ok(out)
    }

    /// `ρ_S(w)`: delete the syllables outside `S` and freely reduce.
    /// A homomorphism because every label is even.
    pub fn retraction_image(&self, s: &VertexSet) -> Result<Word> {
        for v in s {
            if !self.graph.contains(v) {
                return Err(Error::UnknownVertex(v.to_string()));
            }
        }
        let mut out: Vec<Syllable> = Vec::new();
        for syl in &self.syllables {
            if s.contains(&syl.gen) {
                push_syllable(&mut out, syl.gen.clone(), syl.exp)?;
            }
        }
        Ok(Word {
            graph: self.graph.clone(),
            syllables: out,
        })
    }

    /// Sum of the exponents of `v`; the image of the word under `ρ_{{v}}`
    /// composed with `⟨v⟩ ≅ Z`.
    pub fn exponent_sum(&self, v: &VertexId) -> i64 {
        self.syllables
            .iter()
            .filter(|s| &s.gen == v)
            .map(|s| s.exp)
            .sum()
    }

    /// The set of generators that occur.
    pub fn support(&self) -> VertexSet {
        self.syllables.iter().map(|s| s.gen.clone()).collect()
    }

    /// Re-tags the word onto another graph with the same generator names.
    /// Transports between a subgraph and its parent.
    pub fn transport(&self, target: &ArtinGraph) -> Result<Word> {
        Word::from_syllables(
            target,
            self.syllables.iter().map(|s| (s.gen.clone(), s.exp)),
        )
    }

    /// `prod(u,v,n)`: the prefix of length `n` of `uvuv...`.
    pub fn alternating(graph: &ArtinGraph, u: &VertexId, v: &VertexId, n: i64) -> Result<Word> {
        let mut syls = Vec::new();
        for i in 0..n {
            let gen = if i % 2 == 0 { u.clone() } else { v.clone() };
            syls.push((gen, 1));
        }
        Word::from_syllables(graph, syls)
    }

    /// Parses whitespace-separated tokens `gen` or `gen^k`; the empty
    /// word is spelled `1`.
    pub fn parse(graph: &ArtinGraph, text: &str) -> Result<Word> {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens == ["1"] {
            return Ok(Word::identity(graph));
        }
        let mut syls = Vec::new();
        for tok in tokens {
            let (name, exp) = match tok.split_once('^') {
                Some((name, exp_str)) => {
                    let exp: i64 = exp_str.parse().map_err(|_| Error::Parse {
                        line: 0,
                        msg: format!("bad exponent in `{tok}`"),
                    })?;
                    if exp == 0 {
                        return Err(Error::Parse {
                            line: 0,
                            msg: format!("zero exponent in `{tok}`"),
                        });
                    }
                    (name, exp)
                }
                None => (tok, 1),
            };
            syls.push((VertexId::new(name)?, exp));
        }
        Word::from_syllables(graph, syls)
    }
}

fn push_syllable(out: &mut Vec<Syllable>, gen: VertexId, exp: i64) -> Result<()> {
    if exp == 0 {
        return Ok(());
    }
    if let Some(last) = out.last_mut() {
        if last.gen == gen {
            last.exp += exp;
            if last.exp == 0 {
                out.pop();
            }
            return Ok(());
        }
    }
    out.push(Syllable { gen, exp });
    let cap = length_cap();
    if out.len() > cap {
        return Err(Error::LengthCapExceeded(cap));
    }
    Ok(())
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return f.write_str("1");
        }
        for (i, s) in self.syllables.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if s.exp == 1 {
                write!(f, "{}", s.gen)?;
            } else {
                write!(f, "{}^{}", s.gen, s.exp)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

/// A total substitution from the generators of a source graph to words
/// over a target graph. Carries retractions, kernel embeddings and the
/// automorphisms of the intersection engine.
#[derive(Clone, Debug)]
pub struct GeneratorMap {
    source: ArtinGraph,
    target: ArtinGraph,
    images: BTreeMap<VertexId, Word>,
}

impl GeneratorMap {
    pub fn new(
        source: &ArtinGraph,
        target: &ArtinGraph,
        images: BTreeMap<VertexId, Word>,
    ) -> Result<GeneratorMap> {
        for v in source.vertices() {
            let w = images
                .get(v)
                .ok_or_else(|| Error::UnmappedGenerator(v.to_string()))?;
            if w.graph() != target {
                return Err(Error::GraphMismatch);
            }
        }
        Ok(GeneratorMap {
            source: source.clone(),
            target: target.clone(),
            images,
        })
    }

    /// The identity substitution.
    pub fn identity(graph: &ArtinGraph) -> GeneratorMap {
        let images = graph
            .vertices()
            .iter()
            .map(|v| {
                (
                    v.clone(),
                    Word::generator(graph, v, 1).expect("vertex of the graph"),
                )
            })
            .collect();
        GeneratorMap {
            source: graph.clone(),
            target: graph.clone(),
            images,
        }
    }

    pub fn source(&self) -> &ArtinGraph {
        &self.source
    }

    pub fn target(&self) -> &ArtinGraph {
        &self.target
    }

    pub fn image(&self, v: &VertexId) -> Option<&Word> {
        self.images.get(v)
    }

    /// Syllable-wise substitution, freely reduced.
    pub fn apply(&self, w: &Word) -> Result<Word> {
        if w.graph() != &self.source {
            return Err(Error::GraphMismatch);
        }
        let mut out = Word::identity(&self.target);
        for s in w.syllables() {
            let image = self
                .images
                .get(&s.gen)
                .ok_or_else(|| Error::UnmappedGenerator(s.gen.to_string()))?;
            out = out.concat(&image.pow(s.exp)?)?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::RawGraph;

    fn v(name: &str) -> VertexId {
        VertexId::new(name).unwrap()
    }

    fn graph_ax4() -> ArtinGraph {
        let mut raw = RawGraph::default();
        raw.vertex("a").unwrap();
        raw.vertex("x").unwrap();
        raw.edge("a", "x", 4).unwrap();
        ArtinGraph::build(&raw).unwrap()
    }

    #[test]
    fn free_reduction_on_construction() {
        let g = graph_ax4();
        let w = Word::from_syllables(&g, [(v("a"), 2), (v("a"), -2)]).unwrap();
        assert!(w.is_empty());
        let w = Word::from_syllables(&g, [(v("a"), 1), (v("x"), 1), (v("x"), -1), (v("a"), 1)])
            .unwrap();
        assert_eq!(w.to_string(), "a^2");
        let w = Word::from_syllables(&g, [(v("a"), 3)]).unwrap();
        assert_eq!(w.to_string(), "a^3");
    }

    #[test]
    fn concat_invert_conjugate() {
        let g = graph_ax4();
        let a = Word::parse(&g, "a x^-1").unwrap();
        assert_eq!(a.inverse().to_string(), "x a^-1");
        let x = Word::parse(&g, "x").unwrap();
        let aa = Word::parse(&g, "a").unwrap();
        assert_eq!(aa.conjugate(&x).unwrap().to_string(), "x a x^-1");
        assert!(aa.concat(&aa.inverse()).unwrap().is_empty());
    }

    #[test]
    fn graph_mismatch_rejected() {
        let g = graph_ax4();
        let mut raw = RawGraph::default();
        raw.vertex("a").unwrap();
        let other = ArtinGraph::build(&raw).unwrap();
        let u = Word::parse(&g, "a").unwrap();
        let w = Word::parse(&other, "a").unwrap();
        assert!(matches!(u.concat(&w), Err(Error::GraphMismatch)));
    }

    #[test]
    fn retraction_image_cases() {
        let mut raw = RawGraph::default();
        raw.vertex("a").unwrap();
        raw.vertex("b").unwrap();
        raw.vertex("x").unwrap();
        raw.edge("a", "x", 4).unwrap();
        raw.edge("b", "x", 2).unwrap();
        raw.edge("a", "b", 2).unwrap();
        let g = ArtinGraph::build(&raw).unwrap();
        let w = Word::parse(&g, "a x b x^-1").unwrap();
        let ab: VertexSet = [v("a"), v("b")].into_iter().collect();
        assert_eq!(w.retraction_image(&ab).unwrap().to_string(), "a b");
        assert!(w.retraction_image(&VertexSet::new()).unwrap().is_empty());
        assert_eq!(w.retraction_image(g.vertices()).unwrap(), w);
    }

    #[test]
    fn exponent_sums() {
        let g = graph_ax4();
        let w = Word::parse(&g, "x a x^-1").unwrap();
        assert_eq!(w.exponent_sum(&v("x")), 0);
        let w = Word::parse(&g, "x^3 a x^-1").unwrap();
        assert_eq!(w.exponent_sum(&v("x")), 2);
        assert_eq!(Word::parse(&g, "a").unwrap().exponent_sum(&v("x")), 0);
    }

    #[test]
    fn apply_map_kills_and_fixes() {
        let g = graph_ax4();
        let images: BTreeMap<VertexId, Word> = [
            (v("a"), Word::parse(&g, "a").unwrap()),
            (v("x"), Word::identity(&g)),
        ]
        .into_iter()
        .collect();
        let m = GeneratorMap::new(&g, &g, images).unwrap();
        let w = Word::parse(&g, "x a x^-1").unwrap();
        assert_eq!(m.apply(&w).unwrap().to_string(), "a");
        let id = GeneratorMap::identity(&g);
        assert_eq!(id.apply(&w).unwrap(), w);
    }

    #[test]
    fn word_parse_and_display() {
        let g = graph_ax4();
        assert!(Word::parse(&g, "1").unwrap().is_empty());
        let w = Word::parse(&g, "a x^-1 a^3").unwrap();
        assert_eq!(w.to_string(), "a x^-1 a^3");
        assert!(Word::parse(&g, "a^0").is_err());
        assert!(Word::parse(&g, "zz").is_err());
    }

    #[test]
    fn length_cap_enforced() {
        let g = graph_ax4();
        let old = set_length_cap(8);
        let mut syls = Vec::new();
        for i in 0..20 {
            syls.push((if i % 2 == 0 { v("a") } else { v("x") }, 1));
        }
        let r = Word::from_syllables(&g, syls);
        assert!(matches!(r, Err(Error::LengthCapExceeded(8))));
        set_length_cap(old);
    }
}
