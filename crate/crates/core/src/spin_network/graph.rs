//! Oriented multigraphs and orientation-aware isomorphism search.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Directed link from `src` to `dst`. Self-loops and parallel links allowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Link {
    pub id: usize,
    pub src: usize,
    pub dst: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Graph {
    pub nodes: Vec<usize>,
    pub links: Vec<Link>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphDefect {
    DuplicateNode(usize),
    DuplicateLink(usize),
    DanglingLink { link: usize, node: usize },
}

impl Graph {
    pub fn new(nodes: Vec<usize>, links: Vec<Link>) -> Self {
        Self { nodes, links }
    }

    /// One node with one self-loop.
    pub fn single_loop() -> Self {
        Self::new(vec![0], vec![Link { id: 0, src: 0, dst: 0 }])
    }

    /// Two nodes joined by three parallel links `0 -> 1`.
    pub fn theta() -> Self {
        Self::new(
            vec![0, 1],
            (0..3).map(|id| Link { id, src: 0, dst: 1 }).collect(),
        )
    }

    /// One node with `k` self-loops.
    pub fn bouquet(k: usize) -> Self {
        Self::new(vec![0], (0..k).map(|id| Link { id, src: 0, dst: 0 }).collect())
    }

    /// `k` disjoint one-node loops.
    pub fn loops(k: usize) -> Self {
        Self::new(
            (0..k).collect(),
            (0..k).map(|id| Link { id, src: id, dst: id }).collect(),
        )
    }

    /// Cycle of `k >= 1` two-valent nodes, link `i` from node `i` to `i + 1 mod k`.
    pub fn ring(k: usize) -> Self {
        Self::new(
            (0..k).collect(),
            (0..k).map(|id| Link { id, src: id, dst: (id + 1) % k }).collect(),
        )
    }

    /// Single link between two univalent nodes.
    pub fn segment() -> Self {
        Self::new(vec![0, 1], vec![Link { id: 0, src: 0, dst: 1 }])
    }

    pub fn link(&self, id: usize) -> Option<&Link> {
        self.links.iter().find(|l| l.id == id)
    }

    pub fn defects(&self) -> Vec<GraphDefect> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for &n in &self.nodes {
            if !seen.insert(n) {
                out.push(GraphDefect::DuplicateNode(n));
            }
        }
        let mut lseen = BTreeSet::new();
        for l in &self.links {
            if !lseen.insert(l.id) {
                out.push(GraphDefect::DuplicateLink(l.id));
            }
            for n in [l.src, l.dst] {
                if !seen.contains(&n) {
                    out.push(GraphDefect::DanglingLink { link: l.id, node: n });
                }
            }
        }
        out
    }

    /// Number of link endpoints at `node`; self-loops count twice.
    pub fn valence(&self, node: usize) -> usize {
        self.links
            .iter()
            .map(|l| (l.src == node) as usize + (l.dst == node) as usize)
            .sum()
    }

    /// Link endpoints at `node`: links sorted by id, `(link id, incoming)`,
    /// with the outgoing end of a self-loop first.
    pub fn endpoints(&self, node: usize) -> Vec<(usize, bool)> {
        let mut links: Vec<&Link> = self.links.iter().collect();
        links.sort_by_key(|l| l.id);
        let mut out = Vec::new();
        for l in links {
            if l.src == node {
                out.push((l.id, false));
            }
            if l.dst == node {
                out.push((l.id, true));
            }
        }
        out
    }

    /// Disjoint union; ids of `other` are shifted past those of `self`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let node_shift = self.nodes.iter().max().map_or(0, |m| m + 1);
        let link_shift = self.links.iter().map(|l| l.id).max().map_or(0, |m| m + 1);
        let mut g = self.clone();
        g.nodes.extend(other.nodes.iter().map(|n| n + node_shift));
        g.links.extend(other.links.iter().map(|l| Link {
            id: l.id + link_shift,
            src: l.src + node_shift,
            dst: l.dst + node_shift,
        }));
        g
    }

    /// Connected components in order of their smallest node, ids kept.
    pub fn components(&self) -> Vec<Graph> {
        let mut comp: BTreeMap<usize, usize> = self.nodes.iter().map(|&n| (n, n)).collect();
        fn root(c: &mut BTreeMap<usize, usize>, n: usize) -> usize {
            let p = c[&n];
            if p == n {
                return n;
            }
            let r = root(c, p);
            c.insert(n, r);
            r
        }
        for l in &self.links {
            let (a, b) = (root(&mut comp, l.src), root(&mut comp, l.dst));
            if a != b {
                comp.insert(a.max(b), a.min(b));
            }
        }
        let mut groups: BTreeMap<usize, Graph> = BTreeMap::new();
        let mut nodes = self.nodes.clone();
        nodes.sort_unstable();
        for n in nodes {
            let r = root(&mut comp, n);
            groups.entry(r).or_default().nodes.push(n);
        }
        for l in &self.links {
            let r = root(&mut comp, l.src);
            groups.get_mut(&r).unwrap().links.push(*l);
        }
        // each root is the smallest node of its component
        groups.into_values().collect()
    }

    /// Canonical-ish invariant used for memoisation: sorted node valence
    /// profile `(out, in, loops)` plus counts.
    pub fn shape_key(&self) -> String {
        let mut prof: Vec<(usize, usize, usize)> = self
            .nodes
            .iter()
            .map(|&n| {
                let out = self.links.iter().filter(|l| l.src == n && l.dst != n).count();
                let inc = self.links.iter().filter(|l| l.dst == n && l.src != n).count();
                let lp = self.links.iter().filter(|l| l.src == n && l.dst == n).count();
                (out, inc, lp)
            })
            .collect();
        prof.sort_unstable();
        format!("{}n{}l{:?}", self.nodes.len(), self.links.len(), prof)
    }
}

/// How a link of one graph sits in another.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkImage {
    pub link: usize,
    pub reversed: bool,
}

/// Node and link correspondence between two graphs.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GraphIso {
    pub nodes: BTreeMap<usize, usize>,
    pub links: BTreeMap<usize, LinkImage>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchMode {
    /// Link orientations must agree.
    #[default]
    Strict,
    /// A link may map onto a reversed link.
    AllowReversal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsoSearch {
    None,
    Unique(GraphIso),
    Ambiguous,
}

impl GraphIso {
    /// Checks that this is an isomorphism from `a` onto `b`.
    pub fn is_valid(&self, a: &Graph, b: &Graph, mode: MatchMode) -> bool {
        if a.nodes.len() != b.nodes.len() || a.links.len() != b.links.len() {
            return false;
        }
        if self.nodes.len() != a.nodes.len() || self.links.len() != a.links.len() {
            return false;
        }
        let imgs: BTreeSet<usize> = self.nodes.values().copied().collect();
        if imgs.len() != a.nodes.len() || !b.nodes.iter().all(|n| imgs.contains(n)) {
            return false;
        }
        let limgs: BTreeSet<usize> = self.links.values().map(|i| i.link).collect();
        if limgs.len() != a.links.len() {
            return false;
        }
        for l in &a.links {
            let Some(img) = self.links.get(&l.id) else { return false };
            let Some(t) = b.link(img.link) else { return false };
            let (Some(&s), Some(&d)) = (self.nodes.get(&l.src), self.nodes.get(&l.dst)) else {
                return false;
            };
            let ok = if img.reversed {
                mode == MatchMode::AllowReversal && t.src == d && t.dst == s
            } else {
                t.src == s && t.dst == d
            };
            if !ok {
                return false;
            }
        }
        true
    }

    /// Same node and link ids on both sides.
    pub fn identity_map(a: &Graph) -> GraphIso {
        GraphIso {
            nodes: a.nodes.iter().map(|&n| (n, n)).collect(),
            links: a
                .links
                .iter()
                .map(|l| (l.id, LinkImage { link: l.id, reversed: false }))
                .collect(),
        }
    }
}

/// Searches for isomorphisms `a -> b`, stopping after the second.
///
/// Isolated nodes are paired in id order and do not count as distinct
/// solutions.
pub fn find_isomorphism(a: &Graph, b: &Graph, mode: MatchMode) -> IsoSearch {
    if a.nodes.len() != b.nodes.len() || a.links.len() != b.links.len() {
        return IsoSearch::None;
    }
    let mut a_links = a.links.clone();
    a_links.sort();
    // order links so that each one touches an already-mapped node when possible
    let mut ordered: Vec<Link> = Vec::new();
    let mut touched: BTreeSet<usize> = BTreeSet::new();
    let mut rest = a_links;
    while !rest.is_empty() {
        let pos = rest
            .iter()
            .position(|l| touched.contains(&l.src) || touched.contains(&l.dst))
            .unwrap_or(0);
        let l = rest.remove(pos);
        touched.insert(l.src);
        touched.insert(l.dst);
        ordered.push(l);
    }
    let val_a: BTreeMap<usize, (usize, usize)> = a.nodes.iter().map(|&n| (n, in_out(a, n))).collect();
    let val_b: BTreeMap<usize, (usize, usize)> = b.nodes.iter().map(|&n| (n, in_out(b, n))).collect();

    struct State<'g> {
        a: &'g Graph,
        b: &'g Graph,
        mode: MatchMode,
        ordered: Vec<Link>,
        val_a: BTreeMap<usize, (usize, usize)>,
        val_b: BTreeMap<usize, (usize, usize)>,
        nodes: BTreeMap<usize, usize>,
        used_nodes: BTreeSet<usize>,
        links: BTreeMap<usize, LinkImage>,
        used_links: BTreeSet<usize>,
        found: Vec<GraphIso>,
    }

    fn compatible(st: &State, na: usize, nb: usize) -> bool {
        let (ia, oa) = st.val_a[&na];
        let (ib, ob) = st.val_b[&nb];
        match st.mode {
            MatchMode::Strict => ia == ib && oa == ob,
            MatchMode::AllowReversal => ia + oa == ib + ob,
        }
    }

    fn bind(st: &mut State, na: usize, nb: usize, fresh: &mut Vec<usize>) -> bool {
        match st.nodes.get(&na) {
            Some(&m) => m == nb,
            None => {
                if st.used_nodes.contains(&nb) || !compatible(st, na, nb) {
                    return false;
                }
                st.nodes.insert(na, nb);
                st.used_nodes.insert(nb);
                fresh.push(na);
                true
            }
        }
    }

    fn rec(st: &mut State, i: usize) {
        if st.found.len() >= 2 {
            return;
        }
        if i == st.ordered.len() {
            let mut nodes = st.nodes.clone();
            let free_a: Vec<usize> = {
                let mut v: Vec<usize> = st.a.nodes.iter().copied().filter(|n| !nodes.contains_key(n)).collect();
                v.sort_unstable();
                v
            };
            let mut free_b: Vec<usize> = st.b.nodes.iter().copied().filter(|n| !st.used_nodes.contains(n)).collect();
            free_b.sort_unstable();
            if free_a.len() != free_b.len() {
                return;
            }
            for (x, y) in free_a.into_iter().zip(free_b) {
                if st.val_b[&y] != (0, 0) {
                    return;
                }
                nodes.insert(x, y);
            }
            st.found.push(GraphIso {
                nodes,
                links: st.links.clone(),
            });
            return;
        }
        let l = st.ordered[i];
        let candidates: Vec<Link> = st.b.links.iter().copied().filter(|t| !st.used_links.contains(&t.id)).collect();
        for t in candidates {
            let orientations: &[bool] = match st.mode {
                MatchMode::Strict => &[false],
                MatchMode::AllowReversal => &[false, true],
            };
            for &rev in orientations {
                // a reversed self-loop is the same embedding; count it once
                if rev && t.src == t.dst {
                    continue;
                }
                let (ts, td) = if rev { (t.dst, t.src) } else { (t.src, t.dst) };
                let mut fresh = Vec::new();
                let ok = bind(st, l.src, ts, &mut fresh) && bind(st, l.dst, td, &mut fresh);
                if ok {
                    st.links.insert(l.id, LinkImage { link: t.id, reversed: rev });
                    st.used_links.insert(t.id);
                    rec(st, i + 1);
                    st.links.remove(&l.id);
                    st.used_links.remove(&t.id);
                }
                for n in fresh {
                    let m = st.nodes.remove(&n).unwrap();
                    st.used_nodes.remove(&m);
                }
                if st.found.len() >= 2 {
                    return;
                }
            }
        }
    }

    let mut st = State {
        a,
        b,
        mode,
        ordered,
        val_a,
        val_b,
        nodes: BTreeMap::new(),
        used_nodes: BTreeSet::new(),
        links: BTreeMap::new(),
        used_links: BTreeSet::new(),
        found: Vec::new(),
    };
    rec(&mut st, 0);
    match st.found.len() {
        0 => IsoSearch::None,
        1 => IsoSearch::Unique(st.found.pop().unwrap()),
        _ => IsoSearch::Ambiguous,
    }
}

fn in_out(g: &Graph, n: usize) -> (usize, usize) {
    let inc = g.links.iter().filter(|l| l.dst == n).count();
    let out = g.links.iter().filter(|l| l.src == n).count();
    (inc, out)
}
