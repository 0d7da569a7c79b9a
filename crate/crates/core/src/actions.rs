//! Actions of F on Γ = Z[1/2] and on the covering space Λ = Z × Γ,
//! Schreier balls, and rooted labeled ball comparison.
//!
//! Λ is acted on letter by letter: `a` moves only the Γ-coordinate and `b`
//! moves `(n, 0)` to `(n + 1, 0)`. Arbitrary [`PlHomeo`]s do not act on Λ;
//! only words do.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fgroup::{GenWord, Generator, Letter};
use crate::numerics::{DyadicRational, ParseDyadicError};

/// Largest ball radius built unless overridden.
pub const DEFAULT_RADIUS_CAP: u32 = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error("radius {radius} exceeds the cap {cap}")]
    RadiusOverCap { radius: u32, cap: u32 },
    #[error("bad point syntax {0:?}")]
    BadPoint(String),
    #[error(transparent)]
    Dyadic(#[from] ParseDyadicError),
    #[error("no n <= {n_max} has matching balls over the whole window (radius {radius})")]
    LimitExhausted { radius: u32, n_max: u32 },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
}

/// A point `(n, γ)` of Λ. `n` indexes the copy of Γ hanging from the
/// `n`-th black node. Ordered lexicographically by `(n, γ)`; serialized as
/// `[n, "γ"]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(i64, DyadicRational)", into = "(i64, DyadicRational)")]
pub struct LambdaPoint {
    pub n: i64,
    pub gamma: DyadicRational,
}

impl LambdaPoint {
    pub fn new(n: i64, gamma: impl Into<DyadicRational>) -> Self {
        Self {
            n,
            gamma: gamma.into(),
        }
    }

    pub fn black(n: i64) -> Self {
        Self::new(n, DyadicRational::zero())
    }

    pub fn is_black(&self) -> bool {
        self.gamma.is_zero()
    }
}

impl From<(i64, DyadicRational)> for LambdaPoint {
    fn from((n, gamma): (i64, DyadicRational)) -> Self {
        Self { n, gamma }
    }
}

impl From<LambdaPoint> for (i64, DyadicRational) {
    fn from(p: LambdaPoint) -> Self {
        (p.n, p.gamma)
    }
}

impl fmt::Display for LambdaPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n, self.gamma)
    }
}

impl FromStr for LambdaPoint {
    type Err = ActionError;

    /// Accepts `(n,γ)` with optional surrounding whitespace.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ActionError::BadPoint(s.to_string());
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (n, g) = inner.split_once(',').ok_or_else(bad)?;
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let gamma: DyadicRational = g.trim().parse()?;
        Ok(Self { n, gamma })
    }
}

/// Image of a Λ-point under one letter.
pub fn lambda_apply_letter(s: Letter, p: &LambdaPoint) -> LambdaPoint {
    match s {
        Letter::A | Letter::AInv => LambdaPoint {
            n: p.n,
            gamma: s.apply(&p.gamma),
        },
        Letter::B | Letter::BInv if p.gamma.is_zero() => {
            let step = if s == Letter::B { 1 } else { -1 };
            LambdaPoint::black(p.n + step)
        }
        Letter::B | Letter::BInv => LambdaPoint {
            n: p.n,
            gamma: s.apply(&p.gamma),
        },
    }
}

/// Image of a Λ-point under a word; the rightmost letter acts first.
pub fn lambda_apply_word(w: &GenWord, p: &LambdaPoint) -> LambdaPoint {
    w.letters()
        .iter()
        .rev()
        .fold(p.clone(), |acc, &s| lambda_apply_letter(s, &acc))
}

/// The covering map Λ → Γ.
pub fn psi(p: &LambdaPoint) -> DyadicRational {
    p.gamma.clone()
}

/// A set on which the letters act, for building Schreier graphs.
pub trait SchreierSpace {
    type Point: Clone + Eq + Hash + fmt::Display;

    fn act(letter: Letter, p: &Self::Point) -> Self::Point;

    /// Whether the point is a black node (`γ = 0`).
    fn is_black(p: &Self::Point) -> bool;
}

/// Γ with the action of F on the line.
pub struct GammaSpace;

/// Λ with the letterwise action.
pub struct LambdaSpace;

impl SchreierSpace for GammaSpace {
    type Point = DyadicRational;

    fn act(letter: Letter, p: &DyadicRational) -> DyadicRational {
        letter.apply(p)
    }

    fn is_black(p: &DyadicRational) -> bool {
        p.is_zero()
    }
}

impl SchreierSpace for LambdaSpace {
    type Point = LambdaPoint;

    fn act(letter: Letter, p: &LambdaPoint) -> LambdaPoint {
        lambda_apply_letter(letter, p)
    }

    fn is_black(p: &LambdaPoint) -> bool {
        p.is_black()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphNode {
    pub id: usize,
    pub name: String,
    pub black: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GraphEdge {
    pub src: usize,
    pub dst: usize,
    pub label: Generator,
}

/// A finite rooted graph with directed edges labeled `a` or `b`. Each label
/// is a partial injection on the node set. Node ids are indices into
/// `nodes`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootedLabeledGraph {
    pub nodes: Vec<GraphNode>,
    pub root: usize,
    pub edges: Vec<GraphEdge>,
    #[serde(skip)]
    out_edges: Vec<[Option<usize>; 2]>,
    #[serde(skip)]
    in_edges: Vec<[Option<usize>; 2]>,
}

fn label_index(l: Generator) -> usize {
    match l {
        Generator::A => 0,
        Generator::B => 1,
    }
}

impl RootedLabeledGraph {
    /// Validates the partial-injection and root invariants and indexes
    /// the edges.
    pub fn new(
        nodes: Vec<GraphNode>,
        root: usize,
        edges: Vec<GraphEdge>,
    ) -> Result<Self, ActionError> {
        let n = nodes.len();
        if root >= n {
            return Err(ActionError::InvalidGraph(format!(
                "root {root} is not a node"
            )));
        }
        let mut out_edges = vec![[None; 2]; n];
        let mut in_edges = vec![[None; 2]; n];
        for e in &edges {
            if e.src >= n || e.dst >= n {
                return Err(ActionError::InvalidGraph(format!(
                    "edge {e:?} leaves the node set"
                )));
            }
            let li = label_index(e.label);
            if out_edges[e.src][li].replace(e.dst).is_some()
                || in_edges[e.dst][li].replace(e.src).is_some()
            {
                return Err(ActionError::InvalidGraph(format!(
                    "label {} is not injective at edge {e:?}",
                    e.label.name()
                )));
            }
        }
        Ok(Self {
            nodes,
            root,
            edges,
            out_edges,
            in_edges,
        })
    }

    /// Re-indexes a graph read from JSON.
    pub fn reindexed(self) -> Result<Self, ActionError> {
        Self::new(self.nodes, self.root, self.edges)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn out_neighbor(&self, node: usize, label: Generator) -> Option<usize> {
        self.out_edges[node][label_index(label)]
    }

    pub fn in_neighbor(&self, node: usize, label: Generator) -> Option<usize> {
        self.in_edges[node][label_index(label)]
    }

    pub fn has_edge(&self, src: usize, dst: usize, label: Generator) -> bool {
        self.out_neighbor(src, label) == Some(dst)
    }

    pub fn self_loop_count(&self) -> usize {
        self.edges.iter().filter(|e| e.src == e.dst).count()
    }

    pub fn node_names(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().map(|n| n.name.as_str())
    }

    /// DOT export: `a` edges solid, `b` edges dotted, self-loops omitted,
    /// black nodes filled.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph schreier {\n");
        for node in &self.nodes {
            let mut attrs = format!("label=\"{}\"", node.name);
            if node.black {
                attrs.push_str(", style=filled, fillcolor=black, fontcolor=white");
            }
            if node.id == self.root {
                attrs.push_str(", shape=doublecircle");
            }
            out.push_str(&format!("  n{} [{attrs}];\n", node.id));
        }
        for e in self.edges.iter().filter(|e| e.src != e.dst) {
            let style = match e.label {
                Generator::A => "solid",
                Generator::B => "dotted",
            };
            out.push_str(&format!(
                "  n{} -> n{} [label=\"{}\", style={style}];\n",
                e.src,
                e.dst,
                e.label.name()
            ));
        }
        out.push_str("}\n");
        out
    }

    /// JSON export with self-loops omitted.
    pub fn to_export_json(&self) -> serde_json::Value {
        let edges: Vec<&GraphEdge> = self.edges.iter().filter(|e| e.src != e.dst).collect();
        serde_json::json!({
            "nodes": self.nodes,
            "root": self.root,
            "edges": edges,
            "selfLoopsOmitted": true,
        })
    }
}

/// Ball of the given radius around `root` in the Schreier graph, as the
/// induced subgraph on all points at undirected word distance `<= radius`.
/// Nodes are numbered in breadth-first discovery order with letters tried
/// in the order `a, a⁻¹, b, b⁻¹`; self-loops are kept.
pub fn schreier_ball<S: SchreierSpace>(
    root: S::Point,
    radius: u32,
    cap: u32,
) -> Result<RootedLabeledGraph, ActionError> {
    if radius > cap {
        return Err(ActionError::RadiusOverCap { radius, cap });
    }
    let mut points: Vec<S::Point> = vec![root.clone()];
    let mut index: HashMap<S::Point, usize> = HashMap::from([(root, 0)]);
    let mut queue = VecDeque::from([(0usize, 0u32)]);
    while let Some((i, dist)) = queue.pop_front() {
        if dist == radius {
            continue;
        }
        for letter in Letter::ALL {
            let q = S::act(letter, &points[i]);
            if !index.contains_key(&q) {
                index.insert(q.clone(), points.len());
                queue.push_back((points.len(), dist + 1));
                points.push(q);
            }
        }
    }
    let mut edges = Vec::new();
    for (i, p) in points.iter().enumerate() {
        for g in [Generator::A, Generator::B] {
            if let Some(&j) = index.get(&S::act(g.letter(), p)) {
                edges.push(GraphEdge {
                    src: i,
                    dst: j,
                    label: g,
                });
            }
        }
    }
    let nodes = points
        .iter()
        .enumerate()
        .map(|(id, p)| GraphNode {
            id,
            name: p.to_string(),
            black: S::is_black(p),
        })
        .collect();
    RootedLabeledGraph::new(nodes, 0, edges)
}

/// Root-, label- and direction-preserving isomorphism test.
///
/// Labels are partial injections, so once a node is matched every neighbor
/// reached through a labeled edge is forced. Branching only happens when
/// the unmatched part is disconnected from the matched part.
pub fn rooted_ball_isomorphic(g: &RootedLabeledGraph, h: &RootedLabeledGraph) -> bool {
    if g.node_count() != h.node_count()
        || g.edge_count() != h.edge_count()
        || g.self_loop_count() != h.self_loop_count()
    {
        return false;
    }
    let mut matcher = Matcher {
        g,
        h,
        fwd: vec![None; g.node_count()],
        back: vec![None; h.node_count()],
    };
    matcher.extend(g.root, h.root)
}

struct Matcher<'a> {
    g: &'a RootedLabeledGraph,
    h: &'a RootedLabeledGraph,
    fwd: Vec<Option<usize>>,
    back: Vec<Option<usize>>,
}

impl Matcher<'_> {
    /// Whether `u ↦ v` is consistent with every edge to already-matched
    /// nodes, in both directions.
    fn compatible(&self, u: usize, v: usize) -> bool {
        for label in [Generator::A, Generator::B] {
            let pairs = [
                (self.g.out_neighbor(u, label), self.h.out_neighbor(v, label)),
                (self.g.in_neighbor(u, label), self.h.in_neighbor(v, label)),
            ];
            for (gu, hv) in pairs {
                let image = |x: usize| if x == u { Some(v) } else { self.fwd[x] };
                let preimage = |y: usize| if y == v { Some(u) } else { self.back[y] };
                if let Some(img) = gu.and_then(image) {
                    if hv != Some(img) {
                        return false;
                    }
                }
                if let Some(pre) = hv.and_then(preimage) {
                    if gu != Some(pre) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Matches `u ↦ v` and propagates forced pairs; undoes everything on
    /// failure.
    fn extend(&mut self, u: usize, v: usize) -> bool {
        let mut assigned = Vec::new();
        let mut stack = vec![(u, v)];
        let mut ok = true;
        while let Some((x, y)) = stack.pop() {
            match (self.fwd[x], self.back[y]) {
                (Some(y0), _) if y0 == y => continue,
                (Some(_), _) | (_, Some(_)) => {
                    ok = false;
                    break;
                }
                _ => {}
            }
            if !self.compatible(x, y) {
                ok = false;
                break;
            }
            self.fwd[x] = Some(y);
            self.back[y] = Some(x);
            assigned.push(x);
            for label in [Generator::A, Generator::B] {
                let outs = (self.g.out_neighbor(x, label), self.h.out_neighbor(y, label));
                let ins = (self.g.in_neighbor(x, label), self.h.in_neighbor(y, label));
                for pair in [outs, ins] {
                    match pair {
                        (Some(gx), Some(hy)) => stack.push((gx, hy)),
                        (None, None) => {}
                        _ => {
                            ok = false;
                        }
                    }
                }
            }
            if !ok {
                break;
            }
        }
        if ok && self.search_rest() {
            return true;
        }
        for x in assigned {
            if let Some(y) = self.fwd[x].take() {
                self.back[y] = None;
            }
        }
        false
    }

    /// Matches nodes not reachable from already-matched ones.
    fn search_rest(&mut self) -> bool {
        let Some(u) = self.fwd.iter().position(Option::is_none) else {
            return true;
        };
        let candidates: Vec<usize> = (0..self.h.node_count())
            .filter(|&v| self.back[v].is_none())
            .collect();
        candidates.into_iter().any(|v| self.extend(u, v))
    }
}

/// Smallest `n <= n_max` such that the radius-`radius` ball around
/// `1/2^m` in Γ is isomorphic to the ball around `(0,0)` in Λ for every
/// `m` in `n..=n + window`.
pub fn limit_check(radius: u32, n_max: u32, window: u32, cap: u32) -> Result<u32, ActionError> {
    let target = schreier_ball::<LambdaSpace>(LambdaPoint::black(0), radius, cap)?;
    let top = n_max + window;
    let matches: Vec<bool> = (0..=top)
        .map(|m| {
            let root = DyadicRational::pow2(-i64::from(m));
            schreier_ball::<GammaSpace>(root, radius, cap)
                .map(|ball| rooted_ball_isomorphic(&ball, &target))
        })
        .collect::<Result<_, _>>()?;
    (0..=n_max)
        .find(|&n| {
            matches[n as usize..=(n + window) as usize]
                .iter()
                .all(|&b| b)
        })
        .ok_or(ActionError::LimitExhausted { radius, n_max })
}
