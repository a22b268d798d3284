//! The AGM over `F_q` and the functional graph it generates.
//!
//! A pair `(a, b)` is admissible when `a, b != 0`, `a != ±b` and
//! `phi(ab) = 1`. The step sends it to `((a+b)/2, d)` where `d` is the square
//! root of `ab` with `phi((a+b)/2 * d) = 1`. Since `phi(-1) = -1` exactly one
//! root qualifies.
//!
//! [`Swarm::build`] computes the successor of all `(q-1)(q-3)/2` admissible
//! pairs and splits the graph into jellyfish: a cycle (the bell head) plus
//! the in-degree-zero nodes hanging off it.

pub mod export;

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::legendre::JellyfishAnnotation;

/// Largest `q` for which [`Swarm::build`] materializes the full graph.
pub const MAX_SWARM_ORDER: u32 = 1 << 14;

/// Dense node identifier: the rank of the pair among all admissible pairs
/// in lexicographic order of `(enc(a), enc(b))`.
pub type NodeId = u32;

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct AdmissiblePair {
    pub a: FieldElement,
    pub b: FieldElement,
}

impl AdmissiblePair {
    pub fn new(field: &Field, a: FieldElement, b: FieldElement) -> Result<AdmissiblePair> {
        if is_admissible(field, a, b) {
            Ok(AdmissiblePair { a, b })
        } else {
            Err(Error::InvalidPair { a: a.encoding(), b: b.encoding() })
        }
    }

    /// Builds a pair from integer encodings.
    pub fn from_encodings(field: &Field, a: u64, b: u64) -> Result<AdmissiblePair> {
        AdmissiblePair::new(field, field.elem(a)?, field.elem(b)?)
    }
}

impl std::fmt::Display for AdmissiblePair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

pub fn is_admissible(field: &Field, a: FieldElement, b: FieldElement) -> bool {
    !a.is_zero() && !b.is_zero() && a != b && a != field.neg(b) && field.phi(field.mul(a, b)) == 1
}

/// One AGM step. Panics if the result is not admissible, which would
/// contradict the well-definedness of the step.
pub fn agm_step(field: &Field, pair: AdmissiblePair) -> AdmissiblePair {
    let c = field.half(field.add(pair.a, pair.b));
    let r = field.canonical_sqrt(field.mul(pair.a, pair.b)).expect("ab is a square");
    let d = if field.phi(field.mul(c, r)) == 1 { r } else { field.neg(r) };
    debug_assert!(is_admissible(field, c, d), "AGM step left the admissible set at {pair}");
    AdmissiblePair { a: c, b: d }
}

/// `(alpha a, alpha b)`; the scaling commutes with [`agm_step`].
pub fn scale(field: &Field, pair: AdmissiblePair, alpha: FieldElement) -> Result<AdmissiblePair> {
    if alpha.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(AdmissiblePair { a: field.mul(alpha, pair.a), b: field.mul(alpha, pair.b) })
}

/// All admissible `(A, B)` whose step is `pair`.
///
/// Solves `A + B = 2a`, `AB = b^2`, which needs `a^2 - b^2` to be a square.
pub fn parents(field: &Field, pair: AdmissiblePair) -> Vec<AdmissiblePair> {
    let disc = field.sub(field.square(pair.a), field.square(pair.b));
    let Ok(r) = field.canonical_sqrt(disc) else {
        return Vec::new();
    };
    let (hi, lo) = (field.add(pair.a, r), field.sub(pair.a, r));
    let mut out = Vec::with_capacity(2);
    for (x, y) in [(hi, lo), (lo, hi)] {
        if is_admissible(field, x, y) {
            let cand = AdmissiblePair { a: x, b: y };
            if agm_step(field, cand) == pair && !out.contains(&cand) {
                out.push(cand);
            }
        }
    }
    out.sort();
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    pub preperiod: Vec<AdmissiblePair>,
    pub cycle: Vec<AdmissiblePair>,
}

/// Iterates the step from `start` until a pair repeats.
pub fn orbit(field: &Field, start: AdmissiblePair) -> Orbit {
    let mut seen: HashMap<AdmissiblePair, usize> = HashMap::new();
    let mut path = Vec::new();
    let mut cur = start;
    while !seen.contains_key(&cur) {
        seen.insert(cur, path.len());
        path.push(cur);
        cur = agm_step(field, cur);
    }
    let cycle = path.split_off(seen[&cur]);
    Orbit { preperiod: path, cycle }
}

/// Bijection between admissible pairs and `0..(q-1)(q-3)/2`.
///
/// Row `a` holds the `(q-3)/2` elements `b != a` with `phi(b) = phi(a)`;
/// `-a` never appears because `phi(-1) = -1`.
#[derive(Clone, Debug)]
pub struct NodeIndex {
    width: u32,
    class_rank: Vec<u32>,
    residues: Vec<u32>,
    nonresidues: Vec<u32>,
    is_residue: Vec<bool>,
}

impl NodeIndex {
    pub fn new(field: &Field) -> NodeIndex {
        let q = field.q();
        let mut class_rank = vec![0; q as usize];
        let mut is_residue = vec![false; q as usize];
        let (mut residues, mut nonresidues) = (Vec::new(), Vec::new());
        for x in field.elements().skip(1) {
            let enc = x.encoding();
            if field.phi(x) == 1 {
                class_rank[enc as usize] = residues.len() as u32;
                is_residue[enc as usize] = true;
                residues.push(enc);
            } else {
                class_rank[enc as usize] = nonresidues.len() as u32;
                nonresidues.push(enc);
            }
        }
        NodeIndex { width: q.saturating_sub(3) / 2, class_rank, residues, nonresidues, is_residue }
    }

    pub fn len(&self) -> usize {
        (self.class_rank.len().saturating_sub(1)) * self.width as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Identifier of an admissible pair. The pair is not re-checked.
    pub fn id(&self, pair: AdmissiblePair) -> NodeId {
        let (a, b) = (pair.a.encoding(), pair.b.encoding());
        let in_row = self.class_rank[b as usize] - u32::from(a < b);
        (a - 1) * self.width + in_row
    }

    pub fn pair(&self, id: NodeId) -> AdmissiblePair {
        let a = id / self.width + 1;
        let mut r = id % self.width;
        if r >= self.class_rank[a as usize] {
            r += 1;
        }
        let class = if self.is_residue[a as usize] { &self.residues } else { &self.nonresidues };
        AdmissiblePair { a: FieldElement::raw(a), b: FieldElement::raw(class[r as usize]) }
    }
}

/// One weakly connected component.
#[derive(Clone, Debug)]
pub struct Jellyfish {
    pub id: usize,
    /// Bell head in successor order, starting at its smallest node.
    pub cycle: Vec<NodeId>,
    /// `tentacles[k]` is the tentacle attached to `cycle[k]`.
    pub tentacles: Vec<NodeId>,
    pub annotation: Option<JellyfishAnnotation>,
}

impl Jellyfish {
    pub fn size(&self) -> usize {
        self.cycle.len() + self.tentacles.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.cycle.iter().chain(self.tentacles.iter()).copied()
    }

    pub fn trace(&self) -> Option<i64> {
        self.annotation.as_ref().map(|a| a.trace)
    }
}

#[derive(Clone, Debug)]
pub struct Swarm {
    field: Field,
    index: NodeIndex,
    succ: Vec<NodeId>,
    component: Vec<u32>,
    jellyfish: Vec<Jellyfish>,
}

const UNSEEN: u32 = u32::MAX;
const ON_PATH: u32 = u32::MAX - 1;

impl Swarm {
    /// Builds the complete swarm for `field`. `q = 3` gives the empty swarm.
    pub fn build(field: &Field) -> Result<Swarm> {
        if field.q() > MAX_SWARM_ORDER {
            return Err(Error::TooLarge {
                what: "swarm q",
                value: field.q() as u64,
                max: MAX_SWARM_ORDER as u64,
            });
        }
        let index = NodeIndex::new(field);
        let n = index.len();
        let mut succ = vec![0u32; n];
        if n > 0 {
            let width = index.width as usize;
            succ.par_chunks_mut(width).enumerate().try_for_each(|(row, out)| {
                let base = (row * width) as NodeId;
                for (k, slot) in out.iter_mut().enumerate() {
                    let pair = index.pair(base + k as NodeId);
                    let next = agm_step(field, pair);
                    if !is_admissible(field, next.a, next.b) {
                        return Err(Error::Invariant(format!("{pair} steps to inadmissible {next}")));
                    }
                    *slot = index.id(next);
                }
                Ok(())
            })?;
        }
        let (component, jellyfish) = decompose(&succ);
        Ok(Swarm { field: field.clone(), index, succ, component, jellyfish })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn node_count(&self) -> usize {
        self.succ.len()
    }

    /// Number of jellyfish, `d(F_q)`.
    pub fn d(&self) -> usize {
        self.jellyfish.len()
    }

    pub fn jellyfish(&self) -> &[Jellyfish] {
        &self.jellyfish
    }

    pub(crate) fn jellyfish_mut(&mut self) -> &mut [Jellyfish] {
        &mut self.jellyfish
    }

    pub fn pair(&self, id: NodeId) -> AdmissiblePair {
        self.index.pair(id)
    }

    pub fn id(&self, pair: AdmissiblePair) -> Result<NodeId> {
        if is_admissible(&self.field, pair.a, pair.b) {
            Ok(self.index.id(pair))
        } else {
            Err(Error::InvalidPair { a: pair.a.encoding(), b: pair.b.encoding() })
        }
    }

    pub fn successor(&self, id: NodeId) -> NodeId {
        self.succ[id as usize]
    }

    pub fn jellyfish_of(&self, pair: AdmissiblePair) -> Result<&Jellyfish> {
        let id = self.id(pair)?;
        Ok(&self.jellyfish[self.component[id as usize] as usize])
    }

    pub fn cycle_pairs(&self, jf: &Jellyfish) -> Vec<AdmissiblePair> {
        jf.cycle.iter().map(|&v| self.pair(v)).collect()
    }

    pub fn tentacle_pairs(&self, jf: &Jellyfish) -> Vec<AdmissiblePair> {
        jf.tentacles.iter().map(|&v| self.pair(v)).collect()
    }

    /// `n -> N_n`, the number of jellyfish with `n` nodes.
    pub fn size_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for jf in &self.jellyfish {
            *h.entry(jf.size()).or_insert(0) += 1;
        }
        h
    }

    pub fn stats(&self) -> SwarmStats {
        let histogram = self.size_histogram();
        let q = self.field.q() as usize;
        SwarmStats {
            q: self.field.q(),
            node_count: self.node_count(),
            d: self.d(),
            min_size: histogram.keys().next().copied(),
            max_size: histogram.keys().next_back().copied(),
            divisibility_holds: histogram.iter().all(|(&n, &count)| (n * count) % (q - 1) == 0),
            histogram,
        }
    }

    /// Checks every structural claim about the swarm against the stored
    /// graph: node count, successor closure, bell-head/tentacle shape,
    /// in-degrees and the `(q-1) | n N_n` divisibility.
    pub fn verify_structure(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Invariant(msg));
        let q = self.field.q() as usize;
        let expected = if q >= 3 { (q - 1) * (q - 3) / 2 } else { 0 };
        if self.node_count() != expected {
            return fail(format!("{} nodes, expected {expected}", self.node_count()));
        }
        for (v, &s) in self.succ.iter().enumerate() {
            let pair = self.pair(v as NodeId);
            if !is_admissible(&self.field, pair.a, pair.b) {
                return fail(format!("node {v} decodes to inadmissible {pair}"));
            }
            if self.pair(s) != agm_step(&self.field, pair) {
                return fail(format!("successor of {pair} is wrong"));
            }
        }
        let mut indeg = vec![0u8; self.node_count()];
        for &s in &self.succ {
            indeg[s as usize] = indeg[s as usize].saturating_add(1);
        }
        let mut total = 0;
        for jf in &self.jellyfish {
            let len = jf.cycle.len();
            if len == 0 || jf.tentacles.len() != len {
                return fail(format!("jellyfish {} has {} tentacles on a {len}-cycle", jf.id, jf.tentacles.len()));
            }
            for k in 0..len {
                let (c, t) = (jf.cycle[k], jf.tentacles[k]);
                if self.successor(c) != jf.cycle[(k + 1) % len] {
                    return fail(format!("jellyfish {} cycle is broken at position {k}", jf.id));
                }
                if self.successor(t) != c {
                    return fail(format!("tentacle {t} does not point at cycle node {c}"));
                }
                if indeg[c as usize] != 2 || indeg[t as usize] != 0 {
                    return fail(format!("bad in-degree around cycle node {c}"));
                }
            }
            if jf.nodes().any(|v| self.component[v as usize] as usize != jf.id) {
                return fail(format!("jellyfish {} has foreign nodes", jf.id));
            }
            total += jf.size();
        }
        if total != self.node_count() {
            return fail(format!("jellyfish cover {total} of {} nodes", self.node_count()));
        }
        if !self.stats().divisibility_holds {
            return fail("(q-1) does not divide n N_n".into());
        }
        Ok(())
    }
}

/// Splits a functional graph into components, each with its cycle and the
/// remaining (off-cycle) nodes ordered by the cycle position they feed.
fn decompose(succ: &[NodeId]) -> (Vec<u32>, Vec<Jellyfish>) {
    let n = succ.len();
    let mut component = vec![UNSEEN; n];
    // cycle position + 1 for cycle nodes, 0 elsewhere
    let mut cycle_pos = vec![0u32; n];
    let mut jellyfish: Vec<Jellyfish> = Vec::new();
    let mut path = Vec::new();
    for start in 0..n as NodeId {
        if component[start as usize] != UNSEEN {
            continue;
        }
        path.clear();
        let mut v = start;
        while component[v as usize] == UNSEEN {
            component[v as usize] = ON_PATH;
            path.push(v);
            v = succ[v as usize];
        }
        let id = if component[v as usize] == ON_PATH {
            let id = jellyfish.len() as u32;
            let mut cycle = vec![v];
            let mut w = succ[v as usize];
            while w != v {
                cycle.push(w);
                w = succ[w as usize];
            }
            let min_at = (0..cycle.len()).min_by_key(|&k| cycle[k]).unwrap();
            cycle.rotate_left(min_at);
            for (k, &c) in cycle.iter().enumerate() {
                cycle_pos[c as usize] = k as u32 + 1;
            }
            jellyfish.push(Jellyfish { id: id as usize, cycle, tentacles: Vec::new(), annotation: None });
            id
        } else {
            component[v as usize]
        };
        for &w in &path {
            component[w as usize] = id;
        }
    }
    let mut off_cycle: Vec<Vec<(u32, NodeId)>> = vec![Vec::new(); jellyfish.len()];
    for v in 0..n {
        if cycle_pos[v] == 0 {
            let key = cycle_pos[succ[v] as usize];
            off_cycle[component[v] as usize].push((if key == 0 { u32::MAX } else { key }, v as NodeId));
        }
    }
    for (jf, mut rest) in jellyfish.iter_mut().zip(off_cycle) {
        rest.sort_unstable();
        jf.tentacles = rest.into_iter().map(|(_, v)| v).collect();
    }
    (component, jellyfish)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SwarmStats {
    pub q: u32,
    pub node_count: usize,
    pub d: usize,
    pub histogram: BTreeMap<usize, usize>,
    pub min_size: Option<usize>,
    pub max_size: Option<usize>,
    pub divisibility_holds: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(q: u64) -> Field {
        Field::from_order(q).unwrap()
    }

    fn pair(k: &Field, a: u64, b: u64) -> AdmissiblePair {
        AdmissiblePair::from_encodings(k, a, b).unwrap()
    }

    #[test]
    fn admissibility() {
        let k = field(7);
        let e = |n| k.elem(n).unwrap();
        assert!(is_admissible(&k, e(1), e(2)));
        assert!(!is_admissible(&k, e(1), e(1)));
        assert!(!is_admissible(&k, e(1), e(3)));
        assert!(!is_admissible(&k, e(1), e(6)));
        assert!(!is_admissible(&k, e(0), e(2)));
        assert!(AdmissiblePair::from_encodings(&k, 1, 3).is_err());
    }

    #[test]
    fn f7_steps() {
        let k = field(7);
        assert_eq!(agm_step(&k, pair(&k, 1, 2)), pair(&k, 5, 3));
        assert_eq!(agm_step(&k, pair(&k, 6, 3)), pair(&k, 1, 2));
        assert_eq!(agm_step(&k, pair(&k, 5, 3)), pair(&k, 4, 1));
    }

    #[test]
    fn f7_orbit() {
        let k = field(7);
        let o = orbit(&k, pair(&k, 1, 2));
        assert!(o.preperiod.is_empty());
        let expected: Vec<_> =
            [(1, 2), (5, 3), (4, 1), (6, 5), (2, 4), (3, 6)].iter().map(|&(a, b)| pair(&k, a, b)).collect();
        assert_eq!(o.cycle, expected);
        let o = orbit(&k, pair(&k, 6, 3));
        assert_eq!(o.preperiod, vec![pair(&k, 6, 3)]);
        assert_eq!(o.cycle.len(), 6);
    }

    #[test]
    fn parents_of_cycle_and_tentacle_nodes() {
        let k = field(7);
        let ps = parents(&k, pair(&k, 1, 2));
        assert_eq!(ps.len(), 2);
        assert!(ps.contains(&pair(&k, 6, 3)));
        assert!(ps.contains(&pair(&k, 3, 6)));
        assert!(parents(&k, pair(&k, 6, 3)).is_empty());
        for q in [19, 23, 27, 31] {
            let k = field(q);
            let swarm = Swarm::build(&k).unwrap();
            for jf in swarm.jellyfish() {
                for (&c, &t) in jf.cycle.iter().zip(&jf.tentacles) {
                    let ps = parents(&k, swarm.pair(c));
                    assert_eq!(ps.len(), 2);
                    assert!(ps.contains(&swarm.pair(t)));
                    assert!(parents(&k, swarm.pair(t)).is_empty());
                }
            }
        }
    }

    #[test]
    fn node_index_is_a_bijection() {
        for q in [7, 11, 27, 43] {
            let k = field(q);
            let idx = NodeIndex::new(&k);
            let mut count = 0;
            for a in k.elements() {
                for b in k.elements() {
                    if is_admissible(&k, a, b) {
                        let p = AdmissiblePair { a, b };
                        assert_eq!(idx.id(p), count, "ids follow lexicographic order");
                        assert_eq!(idx.pair(count), p);
                        count += 1;
                    }
                }
            }
            assert_eq!(count as usize, idx.len());
        }
    }

    #[test]
    fn small_swarms() {
        let empty = Swarm::build(&field(3)).unwrap();
        assert_eq!((empty.node_count(), empty.d()), (0, 0));
        empty.verify_structure().unwrap();

        let s7 = Swarm::build(&field(7)).unwrap();
        assert_eq!((s7.node_count(), s7.d()), (12, 1));
        s7.verify_structure().unwrap();
        let jf = &s7.jellyfish()[0];
        assert_eq!(s7.pair(jf.cycle[0]), pair(&field(7), 1, 2));

        let s19 = Swarm::build(&field(19)).unwrap();
        assert_eq!((s19.node_count(), s19.d()), (144, 8));
        let mut cycles: Vec<_> = s19.jellyfish().iter().map(|j| j.cycle.len()).collect();
        cycles.sort();
        assert_eq!(cycles, vec![6, 6, 6, 6, 6, 6, 18, 18]);
        let stats = s19.stats();
        assert_eq!(stats.histogram, BTreeMap::from([(12, 6), (36, 2)]));
        assert!(stats.divisibility_holds);

        assert_eq!(Swarm::build(&field(27)).unwrap().d(), 39);
    }

    #[test]
    fn swarm_rejects_large_fields() {
        let k = field(16_411);
        assert!(matches!(Swarm::build(&k), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn jellyfish_ids_follow_smallest_node() {
        let s = Swarm::build(&field(31)).unwrap();
        let mins: Vec<_> = s.jellyfish().iter().map(|j| j.nodes().min().unwrap()).collect();
        assert!(mins.windows(2).all(|w| w[0] < w[1]));
        for jf in s.jellyfish() {
            assert_eq!(jf.cycle[0], *jf.cycle.iter().min().unwrap());
        }
    }

    #[test]
    fn scaling_commutes_with_the_step() {
        for q in [7, 11, 19, 23, 27, 31] {
            let k = field(q);
            let idx = NodeIndex::new(&k);
            for v in 0..idx.len() as NodeId {
                let p = idx.pair(v);
                for alpha in k.elements().skip(1) {
                    let scaled = scale(&k, p, alpha).unwrap();
                    assert!(is_admissible(&k, scaled.a, scaled.b));
                    assert_eq!(agm_step(&k, scaled), scale(&k, agm_step(&k, p), alpha).unwrap());
                }
            }
        }
        let k = field(7);
        assert_eq!(scale(&k, pair(&k, 1, 2), k.one()).unwrap(), pair(&k, 1, 2));
        assert_eq!(scale(&k, pair(&k, 1, 2), k.elem(3).unwrap()).unwrap(), pair(&k, 3, 6));
        assert!(scale(&k, pair(&k, 1, 2), k.zero()).is_err());
    }

    #[test]
    fn orbit_cycle_length_is_constant_on_components() {
        let k = field(43);
        let s = Swarm::build(&k).unwrap();
        for jf in s.jellyfish() {
            for v in jf.nodes() {
                assert_eq!(orbit(&k, s.pair(v)).cycle.len(), jf.cycle.len());
            }
        }
    }
}
