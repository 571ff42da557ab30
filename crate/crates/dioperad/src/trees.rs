//! Colored shuffle/planar tree monomials.
//!
//! A tree monomial is a planar rooted tree whose internal vertices are
//! decorated by generators and whose leaves carry the labels `1..=n`. In
//! shuffle mode the children of every vertex are ordered by the minimal leaf
//! label of the subtree they root; in planar mode the leaves read `1..=n`
//! left to right. Every edge carries one of two colors, determined by the
//! generator signatures, never stored on the tree itself.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

/// Edge color of the two-colored operad. `Straight < Dotted` by convention.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Color {
    Straight,
    Dotted,
}

impl Color {
    pub fn letter(self) -> char {
        match self {
            Color::Straight => 's',
            Color::Dotted => 'd',
        }
    }

    pub fn from_letter(c: char) -> Option<Color> {
        match c {
            's' => Some(Color::Straight),
            'd' => Some(Color::Dotted),
            _ => None,
        }
    }

    pub fn flip(self) -> Color {
        match self {
            Color::Straight => Color::Dotted,
            Color::Dotted => Color::Straight,
        }
    }
}

/// Ordered input colors plus the output color of an operation or monomial.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AritySignature {
    pub inputs: Vec<Color>,
    pub output: Color,
}

impl AritySignature {
    pub fn new(inputs: Vec<Color>, output: Color) -> Self {
        AritySignature { inputs, output }
    }

    pub fn arity(&self) -> usize {
        self.inputs.len()
    }
}

impl fmt::Display for AritySignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for c in &self.inputs {
            write!(f, "{}", c.letter())?;
        }
        write!(f, ")->{}", self.output.letter())
    }
}

/// Index of a generator inside a presentation's generator list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GenId(pub u32);

impl GenId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

/// A named generator of a free colored operad.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeneratorSymbol {
    pub name: String,
    pub signature: AritySignature,
    /// Contribution to the weight grading. Almost always 1.
    pub weight: u32,
    /// Homological degree; carried along, consumed only by resolutions.
    pub hdegree: i32,
}

impl GeneratorSymbol {
    pub fn new(name: impl Into<String>, inputs: Vec<Color>, output: Color) -> Self {
        GeneratorSymbol {
            name: name.into(),
            signature: AritySignature::new(inputs, output),
            weight: 1,
            hdegree: 0,
        }
    }

    pub fn arity(&self) -> usize {
        self.signature.arity()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Mode {
    Shuffle,
    Planar,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Node {
    Leaf(u32),
    Vertex { gen: GenId, children: Vec<Node> },
}

impl Node {
    pub fn leaf(label: u32) -> Node {
        Node::Leaf(label)
    }

    pub fn vertex(gen: GenId, children: Vec<Node>) -> Node {
        Node::Vertex { gen, children }
    }

    /// Minimal leaf label in the subtree.
    pub fn min_label(&self) -> u32 {
        match self {
            Node::Leaf(l) => *l,
            Node::Vertex { children, .. } => {
                children.iter().map(Node::min_label).min().expect("vertex with no children")
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Node::Leaf(_) => 1,
            Node::Vertex { children, .. } => children.iter().map(Node::leaf_count).sum(),
        }
    }

    fn collect_labels(&self, out: &mut Vec<u32>) {
        match self {
            Node::Leaf(l) => out.push(*l),
            Node::Vertex { children, .. } => {
                for c in children {
                    c.collect_labels(out);
                }
            }
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Node::Leaf(_))
    }
}

/// A tree monomial: basis element of a free colored shuffle or planar operad.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TreeMonomial {
    pub root: Node,
    pub mode: Mode,
}

/// Why a tree fails to be a valid monomial, naming the offending vertex
/// (preorder index, root = 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub vertex: usize,
    pub kind: ViolationKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    LabelsNotPermutation,
    ChildCountMismatch { expected: usize, found: usize },
    ColorMismatch { slot: usize, expected: Color, found: Color },
    ChildMinimaNotIncreasing,
    PlanarLabelsNotConsecutive,
    UnknownGenerator,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ViolationKind::LabelsNotPermutation => {
                write!(f, "leaf labels are not 1..n (vertex {})", self.vertex)
            }
            ViolationKind::ChildCountMismatch { expected, found } => write!(
                f,
                "vertex {} has {} children, generator takes {}",
                self.vertex, found, expected
            ),
            ViolationKind::ColorMismatch { slot, expected, found } => write!(
                f,
                "vertex {} slot {}: expected color {}, found {}",
                self.vertex,
                slot + 1,
                expected.letter(),
                found.letter()
            ),
            ViolationKind::ChildMinimaNotIncreasing => {
                write!(f, "child minima not increasing at vertex {}", self.vertex)
            }
            ViolationKind::PlanarLabelsNotConsecutive => {
                write!(f, "planar leaves not consecutive at vertex {}", self.vertex)
            }
            ViolationKind::UnknownGenerator => {
                write!(f, "vertex {} references an unknown generator", self.vertex)
            }
        }
    }
}

impl TreeMonomial {
    pub fn new(root: Node, mode: Mode) -> Self {
        TreeMonomial { root, mode }
    }

    /// The identity monomial: a bare leaf.
    pub fn identity(mode: Mode) -> Self {
        TreeMonomial { root: Node::Leaf(1), mode }
    }

    pub fn is_identity(&self) -> bool {
        self.root.is_leaf()
    }

    pub fn leaf_count(&self) -> usize {
        self.root.leaf_count()
    }

    /// Sum of generator weights over internal vertices.
    pub fn weight(&self, gens: &[GeneratorSymbol]) -> u32 {
        fn go(n: &Node, gens: &[GeneratorSymbol]) -> u32 {
            match n {
                Node::Leaf(_) => 0,
                Node::Vertex { gen, children } => {
                    gens[gen.idx()].weight + children.iter().map(|c| go(c, gens)).sum::<u32>()
                }
            }
        }
        go(&self.root, gens)
    }

    pub fn vertex_count(&self) -> usize {
        fn go(n: &Node) -> usize {
            match n {
                Node::Leaf(_) => 0,
                Node::Vertex { children, .. } => 1 + children.iter().map(go).sum::<usize>(),
            }
        }
        go(&self.root)
    }

    /// Internal vertices in preorder (root first, children left to right).
    pub fn vertices(&self) -> Vec<&Node> {
        let mut out = Vec::new();
        fn go<'a>(n: &'a Node, out: &mut Vec<&'a Node>) {
            if let Node::Vertex { children, .. } = n {
                out.push(n);
                for c in children {
                    go(c, out);
                }
            }
        }
        go(&self.root, &mut out);
        out
    }

    /// Arity signature; `None` for the bare identity leaf, whose color is
    /// not determined by the tree itself.
    pub fn signature(&self, gens: &[GeneratorSymbol]) -> Option<AritySignature> {
        match &self.root {
            Node::Leaf(_) => None,
            Node::Vertex { gen, .. } => {
                let n = self.leaf_count();
                let mut inputs = vec![Color::Straight; n];
                fn go(n: &Node, gens: &[GeneratorSymbol], inputs: &mut [Color]) {
                    if let Node::Vertex { gen, children } = n {
                        for (slot, c) in children.iter().enumerate() {
                            match c {
                                Node::Leaf(l) => {
                                    inputs[(*l - 1) as usize] =
                                        gens[gen.idx()].signature.inputs[slot]
                                }
                                v => go(v, gens, inputs),
                            }
                        }
                    }
                }
                go(&self.root, gens, &mut inputs);
                Some(AritySignature::new(inputs, gens[gen.idx()].signature.output))
            }
        }
    }

    /// Leaf labels read left to right in the planar embedding.
    pub fn planar_leaf_order(&self) -> Vec<u32> {
        let mut out = Vec::new();
        self.root.collect_labels(&mut out);
        out
    }

    /// Colors of all internal edges, in (parent preorder id, slot) order.
    pub fn internal_edge_colors(&self, gens: &[GeneratorSymbol]) -> Vec<Color> {
        let mut out = Vec::new();
        fn go(n: &Node, gens: &[GeneratorSymbol], out: &mut Vec<Color>) {
            if let Node::Vertex { gen, children } = n {
                for (slot, c) in children.iter().enumerate() {
                    if !c.is_leaf() {
                        out.push(gens[gen.idx()].signature.inputs[slot]);
                        go(c, gens, out);
                    }
                }
            }
        }
        go(&self.root, gens, &mut out);
        out
    }

    pub fn dotted_internal_edges(&self, gens: &[GeneratorSymbol]) -> usize {
        self.internal_edge_colors(gens).iter().filter(|c| **c == Color::Dotted).count()
    }
}

/// Check every monomial invariant; diagnostic result, never a panic.
pub fn validate(t: &TreeMonomial, gens: &[GeneratorSymbol]) -> Result<(), Violation> {
    let mut labels = Vec::new();
    t.root.collect_labels(&mut labels);
    let n = labels.len();
    let mut sorted = labels.clone();
    sorted.sort_unstable();
    if sorted != (1..=n as u32).collect::<Vec<_>>() {
        return Err(Violation { vertex: 0, kind: ViolationKind::LabelsNotPermutation });
    }
    if t.mode == Mode::Planar && labels != (1..=n as u32).collect::<Vec<_>>() {
        return Err(Violation { vertex: 0, kind: ViolationKind::PlanarLabelsNotConsecutive });
    }

    // Walk in preorder, tracking vertex ids.
    fn go(
        n: &Node,
        gens: &[GeneratorSymbol],
        mode: Mode,
        next_id: &mut usize,
    ) -> Result<(), Violation> {
        let Node::Vertex { gen, children } = n else { return Ok(()) };
        let id = *next_id;
        *next_id += 1;
        let Some(sym) = gens.get(gen.idx()) else {
            return Err(Violation { vertex: id, kind: ViolationKind::UnknownGenerator });
        };
        if children.len() != sym.arity() {
            return Err(Violation {
                vertex: id,
                kind: ViolationKind::ChildCountMismatch {
                    expected: sym.arity(),
                    found: children.len(),
                },
            });
        }
        for (slot, c) in children.iter().enumerate() {
            if let Node::Vertex { gen: cg, .. } = c {
                let found = gens
                    .get(cg.idx())
                    .map(|g| g.signature.output)
                    .ok_or(Violation { vertex: id, kind: ViolationKind::UnknownGenerator })?;
                let expected = sym.signature.inputs[slot];
                if found != expected {
                    return Err(Violation {
                        vertex: id,
                        kind: ViolationKind::ColorMismatch { slot, expected, found },
                    });
                }
            }
        }
        if mode == Mode::Shuffle {
            let minima: Vec<u32> = children.iter().map(Node::min_label).collect();
            if !minima.windows(2).all(|w| w[0] < w[1]) {
                return Err(Violation { vertex: id, kind: ViolationKind::ChildMinimaNotIncreasing });
            }
        }
        for c in children {
            go(c, gens, mode, next_id)?;
        }
        Ok(())
    }
    go(&t.root, gens, t.mode, &mut 0)
}

/// Errors from grafting one monomial into a leaf of another.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubstituteError {
    NoSuchLeaf(u32),
    RelabelNotBijective,
    RelabelNotOrderPreserving,
    ColorMismatch { expected: Color, found: Color },
    InvalidResult(Violation),
    ModeMismatch,
}

impl fmt::Display for SubstituteError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubstituteError::NoSuchLeaf(l) => write!(f, "host has no leaf {l}"),
            SubstituteError::RelabelNotBijective => {
                write!(f, "relabel is not a bijection onto 1..n")
            }
            SubstituteError::RelabelNotOrderPreserving => {
                write!(f, "relabel does not preserve the order of each label block")
            }
            SubstituteError::ColorMismatch { expected, found } => write!(
                f,
                "graft color mismatch: slot is {}, subtree output is {}",
                expected.letter(),
                found.letter()
            ),
            SubstituteError::InvalidResult(v) => write!(f, "grafted tree invalid: {v}"),
            SubstituteError::ModeMismatch => write!(f, "host and subtree modes differ"),
        }
    }
}

/// Relabeling data for `substitute`: images of the host's remaining labels
/// and of the grafted monomial's labels, as parallel sorted vectors.
#[derive(Clone, Debug)]
pub struct Relabel {
    /// `host[i]` = new label of the i-th smallest remaining host label.
    pub host: Vec<u32>,
    /// `inner[j]` = new label of the j-th smallest label of the graft.
    pub inner: Vec<u32>,
}

impl Relabel {
    /// The order-preserving relabel that keeps host labels first where
    /// possible: inner labels become consecutive starting at the grafted
    /// leaf's position.
    pub fn consecutive(host_leaves: usize, graft_leaf: u32, inner_leaves: usize) -> Relabel {
        let shift = inner_leaves as u32 - 1;
        let host: Vec<u32> = (1..=host_leaves as u32)
            .filter(|l| *l != graft_leaf)
            .map(|l| if l < graft_leaf { l } else { l + shift })
            .collect();
        let inner: Vec<u32> = (0..inner_leaves as u32).map(|j| graft_leaf + j).collect();
        Relabel { host, inner }
    }
}

/// Graft `inner` into the leaf `leaf` of `host` and relabel. Children along
/// the path to the root are re-sorted so the shuffle condition holds.
pub fn substitute(
    host: &TreeMonomial,
    leaf: u32,
    inner: &TreeMonomial,
    relabel: &Relabel,
) -> Result<TreeMonomial, SubstituteError> {
    substitute_in(host, leaf, inner, relabel, &[])
}

/// `substitute` with generator table, enabling color checks. An empty table
/// skips color checking (used by uncolored contexts in tests).
pub fn substitute_in(
    host: &TreeMonomial,
    leaf: u32,
    inner: &TreeMonomial,
    relabel: &Relabel,
    gens: &[GeneratorSymbol],
) -> Result<TreeMonomial, SubstituteError> {
    if host.mode != inner.mode {
        return Err(SubstituteError::ModeMismatch);
    }
    let nh = host.leaf_count();
    let ni = inner.leaf_count();
    if leaf == 0 || leaf > nh as u32 {
        return Err(SubstituteError::NoSuchLeaf(leaf));
    }
    let host_labels: Vec<u32> = (1..=nh as u32).filter(|l| *l != leaf).collect();
    if relabel.host.len() != nh - 1 || relabel.inner.len() != ni {
        return Err(SubstituteError::RelabelNotBijective);
    }
    let total = (nh - 1 + ni) as u32;
    let mut all: Vec<u32> = relabel.host.iter().chain(relabel.inner.iter()).copied().collect();
    all.sort_unstable();
    if all != (1..=total).collect::<Vec<_>>() {
        return Err(SubstituteError::RelabelNotBijective);
    }
    if !relabel.host.windows(2).all(|w| w[0] < w[1])
        || !relabel.inner.windows(2).all(|w| w[0] < w[1])
    {
        return Err(SubstituteError::RelabelNotOrderPreserving);
    }

    // Color check at the graft site.
    if !gens.is_empty() {
        if let Some(slot_color) = leaf_slot_color(&host.root, leaf, gens) {
            if let Node::Vertex { gen, .. } = &inner.root {
                let found = gens[gen.idx()].signature.output;
                if found != slot_color {
                    return Err(SubstituteError::ColorMismatch {
                        expected: slot_color,
                        found,
                    });
                }
            }
        }
    }

    let host_map = |l: u32| -> u32 {
        let i = host_labels.binary_search(&l).expect("host label");
        relabel.host[i]
    };
    let inner_map = |l: u32| -> u32 { relabel.inner[(l - 1) as usize] };

    fn rebuild(
        n: &Node,
        leaf: u32,
        inner: &Node,
        host_map: &dyn Fn(u32) -> u32,
        inner_map: &dyn Fn(u32) -> u32,
        mode: Mode,
    ) -> Node {
        match n {
            Node::Leaf(l) if *l == leaf => relabel_node(inner, inner_map),
            Node::Leaf(l) => Node::Leaf(host_map(*l)),
            Node::Vertex { gen, children } => {
                let mut kids: Vec<Node> = children
                    .iter()
                    .map(|c| rebuild(c, leaf, inner, host_map, inner_map, mode))
                    .collect();
                if mode == Mode::Shuffle {
                    kids.sort_by_key(Node::min_label);
                }
                Node::Vertex { gen: *gen, children: kids }
            }
        }
    }

    let root = rebuild(&host.root, leaf, &inner.root, &host_map, &inner_map, host.mode);
    let result = TreeMonomial::new(root, host.mode);
    if !gens.is_empty() {
        validate(&result, gens).map_err(SubstituteError::InvalidResult)?;
    }
    Ok(result)
}

fn relabel_node(n: &Node, map: &dyn Fn(u32) -> u32) -> Node {
    match n {
        Node::Leaf(l) => Node::Leaf(map(*l)),
        Node::Vertex { gen, children } => Node::Vertex {
            gen: *gen,
            children: children.iter().map(|c| relabel_node(c, map)).collect(),
        },
    }
}

/// Relabel all leaves by `map` and re-sort children (shuffle mode); the
/// vertex decorations are untouched, so the result is only valid when the
/// generator colors permit the re-sorted slot assignment.
pub fn relabel_and_sort(t: &TreeMonomial, map: &dyn Fn(u32) -> u32) -> TreeMonomial {
    fn go(n: &Node, map: &dyn Fn(u32) -> u32, mode: Mode) -> Node {
        match n {
            Node::Leaf(l) => Node::Leaf(map(*l)),
            Node::Vertex { gen, children } => {
                let mut kids: Vec<Node> = children.iter().map(|c| go(c, map, mode)).collect();
                if mode == Mode::Shuffle {
                    kids.sort_by_key(Node::min_label);
                }
                Node::Vertex { gen: *gen, children: kids }
            }
        }
    }
    TreeMonomial::new(go(&t.root, map, t.mode), t.mode)
}

fn leaf_slot_color(n: &Node, leaf: u32, gens: &[GeneratorSymbol]) -> Option<Color> {
    if let Node::Vertex { gen, children } = n {
        for (slot, c) in children.iter().enumerate() {
            match c {
                Node::Leaf(l) if *l == leaf => {
                    return Some(gens[gen.idx()].signature.inputs[slot])
                }
                _ => {
                    if let Some(col) = leaf_slot_color(c, leaf, gens) {
                        return Some(col);
                    }
                }
            }
        }
    }
    None
}

/// An occurrence of a pattern monomial inside a host monomial. The map sends
/// the pattern's internal vertices (preorder) to host vertices (preorder);
/// it is fully determined by the image of the pattern's root vertex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Embedding {
    pub vertex_map: Vec<usize>,
}

impl Embedding {
    pub fn root_image(&self) -> usize {
        self.vertex_map[0]
    }

    pub fn image_set(&self) -> Vec<usize> {
        let mut v = self.vertex_map.clone();
        v.sort_unstable();
        v
    }
}

/// All occurrences of `pattern` in `host`: exhaustive and duplicate-free.
pub fn find_divisors(
    host: &TreeMonomial,
    pattern: &TreeMonomial,
    _gens: &[GeneratorSymbol],
) -> Vec<Embedding> {
    let mut out = Vec::new();
    if host.mode != pattern.mode || pattern.root.is_leaf() {
        return out;
    }
    let host_vertices = preorder_nodes(&host.root);
    for (root_id, node) in host_vertices.iter().enumerate() {
        if let Some(emb) = try_match_at(node, root_id, &host_vertices, pattern) {
            out.push(emb);
        }
    }
    out
}

/// Occurrences of `pattern` whose image root is the root vertex of `host`.
pub fn find_divisors_at_root(host: &TreeMonomial, pattern: &TreeMonomial) -> Option<Embedding> {
    if host.mode != pattern.mode || pattern.root.is_leaf() || host.root.is_leaf() {
        return None;
    }
    let host_vertices = preorder_nodes(&host.root);
    try_match_at(host_vertices[0], 0, &host_vertices, pattern)
}

/// Internal vertices of a node in preorder, as references.
pub fn preorder_nodes(root: &Node) -> Vec<&Node> {
    let mut out = Vec::new();
    fn go<'a>(n: &'a Node, out: &mut Vec<&'a Node>) {
        if let Node::Vertex { children, .. } = n {
            out.push(n);
            for c in children {
                go(c, out);
            }
        }
    }
    go(root, &mut out);
    out
}

fn try_match_at(
    host_node: &Node,
    host_root_id: usize,
    host_vertices: &[&Node],
    pattern: &TreeMonomial,
) -> Option<Embedding> {
    // Structural match: pattern internal vertices map positionally; pattern
    // leaves capture hanging host subtrees.
    let mut vertex_map = Vec::new();
    let mut captured: Vec<(u32, &Node)> = Vec::new();

    fn index_of(host_vertices: &[&Node], node: &Node) -> usize {
        host_vertices
            .iter()
            .position(|v| std::ptr::eq(*v, node))
            .expect("vertex present in preorder list")
    }

    fn go<'h>(
        p: &Node,
        h: &'h Node,
        host_vertices: &[&'h Node],
        vertex_map: &mut Vec<usize>,
        captured: &mut Vec<(u32, &'h Node)>,
    ) -> bool {
        match (p, h) {
            (Node::Vertex { gen: pg, children: pc }, Node::Vertex { gen: hg, children: hc }) => {
                if pg != hg || pc.len() != hc.len() {
                    return false;
                }
                vertex_map.push(index_of(host_vertices, h));
                for (pchild, hchild) in pc.iter().zip(hc.iter()) {
                    match pchild {
                        Node::Leaf(l) => captured.push((*l, hchild)),
                        v => {
                            if hchild.is_leaf() {
                                return false;
                            }
                            if !go(v, hchild, host_vertices, vertex_map, captured) {
                                return false;
                            }
                        }
                    }
                }
                true
            }
            _ => false,
        }
    }

    if !go(&pattern.root, host_node, host_vertices, &mut vertex_map, &mut captured) {
        return None;
    }
    debug_assert_eq!(host_root_id, vertex_map[0]);

    // Label-order condition: the captured subtrees, ranked by their minimal
    // host label, must realize exactly the pattern's leaf labels.
    let mut mins: Vec<u32> = captured.iter().map(|(_, sub)| sub.min_label()).collect();
    mins.sort_unstable();
    for (label, sub) in &captured {
        let rank = mins.binary_search(&sub.min_label()).unwrap() as u32 + 1;
        if rank != *label {
            return None;
        }
    }
    Some(Embedding { vertex_map })
}

/// Data needed to rebuild a host around an embedding: the captured hanging
/// subtrees in pattern-label order.
pub fn captured_subtrees<'h>(
    host: &'h TreeMonomial,
    pattern: &TreeMonomial,
    emb: &Embedding,
) -> Vec<&'h Node> {
    let host_vertices = preorder_nodes(&host.root);
    let mut captured: Vec<(u32, &Node)> = Vec::new();
    fn go<'h>(p: &Node, h: &'h Node, captured: &mut Vec<(u32, &'h Node)>) {
        if let (Node::Vertex { children: pc, .. }, Node::Vertex { children: hc, .. }) = (p, h) {
            for (pchild, hchild) in pc.iter().zip(hc.iter()) {
                match pchild {
                    Node::Leaf(l) => captured.push((*l, hchild)),
                    v => go(v, hchild, captured),
                }
            }
        }
    }
    go(&pattern.root, host_vertices[emb.root_image()], &mut captured);
    captured.sort_by_key(|(l, _)| *l);
    captured.into_iter().map(|(_, sub)| sub).collect()
}

/// Replace the embedded pattern occurrence by another monomial of the same
/// signature, reattaching the hanging subtrees by label rank. The result is
/// again a valid monomial; no re-sorting is ever needed because minimal
/// labels are preserved slotwise.
pub fn replace_monomial(
    host: &TreeMonomial,
    pattern: &TreeMonomial,
    emb: &Embedding,
    replacement: &TreeMonomial,
) -> TreeMonomial {
    let subs = captured_subtrees(host, pattern, emb);
    let host_vertices = preorder_nodes(&host.root);
    let target: &Node = host_vertices[emb.root_image()];

    fn instantiate(n: &Node, subs: &[&Node]) -> Node {
        match n {
            Node::Leaf(l) => subs[(*l - 1) as usize].clone(),
            Node::Vertex { gen, children } => Node::Vertex {
                gen: *gen,
                children: children.iter().map(|c| instantiate(c, subs)).collect(),
            },
        }
    }
    let new_subtree = instantiate(&replacement.root, &subs);

    fn rebuild(n: &Node, target: &Node, new_subtree: &Node) -> Node {
        if std::ptr::eq(n, target) {
            return new_subtree.clone();
        }
        match n {
            Node::Leaf(l) => Node::Leaf(*l),
            Node::Vertex { gen, children } => Node::Vertex {
                gen: *gen,
                children: children.iter().map(|c| rebuild(c, target, new_subtree)).collect(),
            },
        }
    }
    TreeMonomial::new(rebuild(&host.root, target, &new_subtree), host.mode)
}

// ---------------------------------------------------------------------------
// Monomial orders
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrderKind {
    PathLex,
    RevPathLex,
    QuantumPath,
}

impl OrderKind {
    pub fn name(self) -> &'static str {
        match self {
            OrderKind::PathLex => "pathlex",
            OrderKind::RevPathLex => "revpathlex",
            OrderKind::QuantumPath => "quantumpath",
        }
    }
}

/// A total order on tree monomials of equal arity signature.
///
/// `gen_rank[g]` is the rank of generator `g`; larger rank compares greater.
/// For `quantumpath` each generator maps to a letter: unary generators to
/// `y`, all others to `x`, with the q-exponent counting `yx` inversions
/// along each root-to-leaf path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialOrder {
    pub kind: OrderKind,
    pub gen_rank: Vec<u32>,
}

impl MonomialOrder {
    /// Order with generator ranks by declaration order: later declared is
    /// greater.
    pub fn declaration(kind: OrderKind, gens: &[GeneratorSymbol]) -> Self {
        MonomialOrder { kind, gen_rank: (0..gens.len() as u32).collect() }
    }

    /// Order from an explicit list of generator names in decreasing order.
    pub fn from_decreasing_names(
        kind: OrderKind,
        names: &[String],
        gens: &[GeneratorSymbol],
    ) -> Option<Self> {
        let mut gen_rank = vec![u32::MAX; gens.len()];
        for (pos, name) in names.iter().enumerate() {
            let idx = gens.iter().position(|g| &g.name == name)?;
            gen_rank[idx] = (names.len() - pos - 1) as u32;
        }
        if gen_rank.iter().any(|r| *r == u32::MAX) {
            return None;
        }
        Some(MonomialOrder { kind, gen_rank })
    }

    /// Generator names in decreasing rank order (for serialization).
    pub fn decreasing_names(&self, gens: &[GeneratorSymbol]) -> Vec<String> {
        let mut idx: Vec<usize> = (0..gens.len()).collect();
        idx.sort_by(|a, b| self.gen_rank[*b].cmp(&self.gen_rank[*a]));
        idx.into_iter().map(|i| gens[i].name.clone()).collect()
    }

    pub fn compare(
        &self,
        a: &TreeMonomial,
        b: &TreeMonomial,
        gens: &[GeneratorSymbol],
    ) -> Ordering {
        match self.kind {
            OrderKind::PathLex => self.compare_pathlex(a, b, gens),
            OrderKind::RevPathLex => self.compare_pathlex(b, a, gens),
            OrderKind::QuantumPath => self.compare_quantumpath(a, b, gens),
        }
    }

    /// Path-lexicographic comparison: root-to-leaf generator words compared
    /// degree-lexicographically leaf by leaf, then the planar permutation.
    fn compare_pathlex(
        &self,
        a: &TreeMonomial,
        b: &TreeMonomial,
        _gens: &[GeneratorSymbol],
    ) -> Ordering {
        let wa = leaf_words(&a.root);
        let wb = leaf_words(&b.root);
        debug_assert_eq!(wa.len(), wb.len(), "pathlex compares equal arities");
        for (x, y) in wa.iter().zip(wb.iter()) {
            let c = self.cmp_word(x, y);
            if c != Ordering::Equal {
                return c;
            }
        }
        let c = a.planar_leaf_order().cmp(&b.planar_leaf_order());
        if c != Ordering::Equal {
            return c;
        }
        structural_cmp(&a.root, &b.root, &self.gen_rank)
    }

    /// Words compared degree-lexicographically: longer is greater, ties by
    /// generator rank letterwise.
    fn cmp_word(&self, x: &[GenId], y: &[GenId]) -> Ordering {
        x.len().cmp(&y.len()).then_with(|| {
            for (g, h) in x.iter().zip(y.iter()) {
                let c = self.gen_rank[g.idx()].cmp(&self.gen_rank[h.idx()]);
                if c != Ordering::Equal {
                    return c;
                }
            }
            Ordering::Equal
        })
    }

    fn compare_quantumpath(
        &self,
        a: &TreeMonomial,
        b: &TreeMonomial,
        gens: &[GeneratorSymbol],
    ) -> Ordering {
        let qa = quantum_words(&a.root, gens);
        let qb = quantum_words(&b.root, gens);
        for (x, y) in qa.iter().zip(qb.iter()) {
            let c = x.cmp(y);
            if c != Ordering::Equal {
                return c;
            }
        }
        let c = a.planar_leaf_order().cmp(&b.planar_leaf_order());
        if c != Ordering::Equal {
            return c;
        }
        structural_cmp(&a.root, &b.root, &self.gen_rank)
    }
}

/// Root-to-leaf generator words, indexed by leaf label.
fn leaf_words(root: &Node) -> Vec<Vec<GenId>> {
    let n = root.leaf_count();
    let mut words = vec![Vec::new(); n];
    let mut path = Vec::new();
    fn go(n: &Node, path: &mut Vec<GenId>, words: &mut [Vec<GenId>]) {
        match n {
            Node::Leaf(l) => words[(*l - 1) as usize] = path.clone(),
            Node::Vertex { gen, children } => {
                path.push(*gen);
                for c in children {
                    go(c, path, words);
                }
                path.pop();
            }
        }
    }
    go(root, &mut path, &mut words);
    words
}

/// Per-leaf quantum monomial (x-count, y-count, q-exponent), where unary
/// generators read as `y`, all others as `x`, and the q-exponent counts the
/// `y..x` inversions in the root-to-leaf word.
fn quantum_words(root: &Node, gens: &[GeneratorSymbol]) -> Vec<(u32, u32, u32)> {
    let words = leaf_words(root);
    words
        .iter()
        .map(|w| {
            let mut xs = 0u32;
            let mut ys = 0u32;
            let mut q = 0u32;
            for g in w {
                if gens[g.idx()].arity() == 1 {
                    ys += 1;
                } else {
                    xs += 1;
                    q += ys;
                }
            }
            (xs, ys, q)
        })
        .collect()
}

fn structural_cmp(a: &Node, b: &Node, rank: &[u32]) -> Ordering {
    match (a, b) {
        (Node::Leaf(x), Node::Leaf(y)) => x.cmp(y),
        (Node::Leaf(_), Node::Vertex { .. }) => Ordering::Less,
        (Node::Vertex { .. }, Node::Leaf(_)) => Ordering::Greater,
        (Node::Vertex { gen: g, children: ca }, Node::Vertex { gen: h, children: cb }) => rank
            [g.idx()]
        .cmp(&rank[h.idx()])
        .then_with(|| {
            for (x, y) in ca.iter().zip(cb.iter()) {
                let c = structural_cmp(x, y, rank);
                if c != Ordering::Equal {
                    return c;
                }
            }
            ca.len().cmp(&cb.len())
        }),
    }
}

// ---------------------------------------------------------------------------
// Term grammar: gen(a1,...,ak) with integer leaves.
// ---------------------------------------------------------------------------

pub fn format_term(t: &TreeMonomial, gens: &[GeneratorSymbol]) -> String {
    fn go(n: &Node, gens: &[GeneratorSymbol], out: &mut String) {
        match n {
            Node::Leaf(l) => out.push_str(&l.to_string()),
            Node::Vertex { gen, children } => {
                out.push_str(&gens[gen.idx()].name);
                out.push('(');
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    go(c, gens, out);
                }
                out.push(')');
            }
        }
    }
    let mut s = String::new();
    go(&t.root, gens, &mut s);
    s
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub at: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: {}", self.at, self.message)
    }
}

pub struct TermParser<'a> {
    pub src: &'a [u8],
    pub pos: usize,
}

impl<'a> TermParser<'a> {
    pub fn new(src: &'a str) -> Self {
        TermParser { src: src.as_bytes(), pos: 0 }
    }

    pub fn skip_ws(&mut self) {
        while self.pos < self.src.len() && (self.src[self.pos] as char).is_whitespace() {
            self.pos += 1;
        }
    }

    pub fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src.get(self.pos).map(|b| *b as char)
    }

    pub fn expect(&mut self, c: char) -> Result<(), ParseError> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&(c as u8)) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    pub fn error(&self, message: String) -> ParseError {
        ParseError { at: self.pos, message }
    }

    pub fn parse_uint(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos] as char).is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected integer".into()));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|e| self.error(format!("bad integer: {e}")))
    }

    pub fn parse_name(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.pos < self.src.len() {
            let c = self.src[self.pos] as char;
            if c.is_ascii_alphabetic() || c == '_' {
                self.pos += 1;
                while self.pos < self.src.len() {
                    let c = self.src[self.pos] as char;
                    if c.is_ascii_alphanumeric() || c == '_' {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
            }
        }
        if start == self.pos {
            return Err(self.error("expected name".into()));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string())
    }

    pub fn parse_node(&mut self, gens: &[GeneratorSymbol]) -> Result<Node, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c.is_ascii_digit() => Ok(Node::Leaf(self.parse_uint()? as u32)),
            Some(_) => {
                let name = self.parse_name()?;
                let gen = gens
                    .iter()
                    .position(|g| g.name == name)
                    .ok_or_else(|| self.error(format!("unknown generator '{name}'")))?;
                self.expect('(')?;
                let mut children = Vec::new();
                loop {
                    children.push(self.parse_node(gens)?);
                    match self.peek() {
                        Some(',') => {
                            self.expect(',')?;
                        }
                        Some(')') => {
                            self.expect(')')?;
                            break;
                        }
                        _ => return Err(self.error("expected ',' or ')'".into())),
                    }
                }
                Ok(Node::Vertex { gen: GenId(gen as u32), children })
            }
            None => Err(self.error("unexpected end of input".into())),
        }
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.src.len()
    }
}

/// Parse a term against a generator table.
pub fn parse_term(
    src: &str,
    gens: &[GeneratorSymbol],
    mode: Mode,
) -> Result<TreeMonomial, ParseError> {
    let mut p = TermParser::new(src);
    let node = p.parse_node(gens)?;
    if !p.at_end() {
        return Err(p.error("trailing input after term".into()));
    }
    Ok(TreeMonomial::new(node, mode))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary(name: &str, a: Color, b: Color, out: Color) -> GeneratorSymbol {
        GeneratorSymbol::new(name, vec![a, b], out)
    }

    fn one_gen() -> Vec<GeneratorSymbol> {
        vec![binary("m", Color::Straight, Color::Straight, Color::Straight)]
    }

    fn t(src: &str, gens: &[GeneratorSymbol]) -> TreeMonomial {
        parse_term(src, gens, Mode::Shuffle).unwrap()
    }

    #[test]
    fn corolla_is_valid() {
        let gens = one_gen();
        let c = t("m(1,2)", &gens);
        assert!(validate(&c, &gens).is_ok());
    }

    #[test]
    fn decreasing_minima_rejected() {
        let gens = one_gen();
        let bad = TreeMonomial::new(
            Node::vertex(
                GenId(0),
                vec![Node::Leaf(2), Node::vertex(GenId(0), vec![Node::Leaf(1), Node::Leaf(3)])],
            ),
            Mode::Shuffle,
        );
        let err = validate(&bad, &gens).unwrap_err();
        assert_eq!(err.kind, ViolationKind::ChildMinimaNotIncreasing);
    }

    #[test]
    fn paper_non_shuffle_tree_rejected_at_root() {
        // The 4-leaf non-shuffle tree: root children drawn as the subtree
        // {1,2} *after* the leaf labeled 3, so the circled 3,1 violate the
        // minima rule at the root.
        let gens = one_gen();
        let bad = TreeMonomial::new(
            Node::vertex(
                GenId(0),
                vec![
                    Node::vertex(GenId(0), vec![Node::Leaf(3), Node::Leaf(4)]),
                    Node::vertex(GenId(0), vec![Node::Leaf(1), Node::Leaf(2)]),
                ],
            ),
            Mode::Shuffle,
        );
        let err = validate(&bad, &gens).unwrap_err();
        assert_eq!(err.vertex, 0);
        assert_eq!(err.kind, ViolationKind::ChildMinimaNotIncreasing);
    }

    #[test]
    fn identity_substitution() {
        let gens = one_gen();
        let id = TreeMonomial::identity(Mode::Shuffle);
        let c = t("m(1,2)", &gens);
        let r = substitute_in(&id, 1, &c, &Relabel::consecutive(1, 1, 2), &gens).unwrap();
        assert_eq!(r, c);
    }

    #[test]
    fn consecutive_graft() {
        let gens = one_gen();
        let c = t("m(1,2)", &gens);
        let r = substitute_in(&c, 1, &c, &Relabel::consecutive(2, 1, 2), &gens).unwrap();
        assert_eq!(r, t("m(m(1,2),3)", &gens));
    }

    #[test]
    fn interleaved_graft() {
        let gens = one_gen();
        let c = t("m(1,2)", &gens);
        // inner leaves to {1,3}, outer leaf 2 -> 2
        let r =
            substitute_in(&c, 1, &c, &Relabel { host: vec![2], inner: vec![1, 3] }, &gens).unwrap();
        assert_eq!(r, t("m(m(1,3),2)", &gens));
    }

    #[test]
    fn all_three_shuffle_grafts_validate() {
        // Grafting m(1,2) into leaf 1 of m(1,2): the three order shuffles.
        let gens = one_gen();
        let c = t("m(1,2)", &gens);
        let shuffles = [
            (Relabel { host: vec![3], inner: vec![1, 2] }, "m(m(1,2),3)"),
            (Relabel { host: vec![2], inner: vec![1, 3] }, "m(m(1,3),2)"),
            (Relabel { host: vec![1], inner: vec![2, 3] }, "m(1,m(2,3))"),
        ];
        for (relabel, expect) in shuffles {
            let r = substitute_in(&c, 1, &c, &relabel, &gens).unwrap();
            assert_eq!(r, t(expect, &gens));
            assert!(validate(&r, &gens).is_ok());
        }
    }

    #[test]
    fn find_divisors_on_left_comb() {
        let gens = one_gen();
        let host = parse_term("m(m(m(1,2),3),4)", &gens, Mode::Planar).unwrap();
        let pattern = parse_term("m(m(1,2),3)", &gens, Mode::Planar).unwrap();
        let embs = find_divisors(&host, &pattern, &gens);
        assert_eq!(embs.len(), 2);
    }

    #[test]
    fn min_order_distinguishes_patterns() {
        let gens = one_gen();
        let host = t("m(m(1,3),2)", &gens);
        let left = t("m(m(1,2),3)", &gens);
        assert!(find_divisors(&host, &left, &gens).is_empty());
        let same = t("m(m(1,3),2)", &gens);
        assert_eq!(find_divisors(&host, &same, &gens).len(), 1);
    }

    #[test]
    fn replace_associativity() {
        let gens = one_gen();
        let host = parse_term("m(m(m(1,2),3),4)", &gens, Mode::Planar).unwrap();
        let pattern = parse_term("m(m(1,2),3)", &gens, Mode::Planar).unwrap();
        let rhs = parse_term("m(1,m(2,3))", &gens, Mode::Planar).unwrap();
        let embs = find_divisors(&host, &pattern, &gens);
        let at_root = embs.iter().find(|e| e.root_image() == 0).unwrap();
        let out = replace_monomial(&host, &pattern, at_root, &rhs);
        assert_eq!(out, parse_term("m(m(1,2),m(3,4))", &gens, Mode::Planar).unwrap());
        let deeper = embs.iter().find(|e| e.root_image() == 1).unwrap();
        let out2 = replace_monomial(&host, &pattern, deeper, &rhs);
        assert_eq!(out2, parse_term("m(m(1,m(2,3)),4)", &gens, Mode::Planar).unwrap());
        assert!(validate(&out2, &gens).is_ok());
    }

    #[test]
    fn pathlex_right_comb_minimal() {
        let gens = one_gen();
        let order = MonomialOrder::declaration(OrderKind::PathLex, &gens);
        let monos =
            [t("m(m(1,2),3)", &gens), t("m(m(1,3),2)", &gens), t("m(1,m(2,3))", &gens)];
        let mut sorted = monos.to_vec();
        sorted.sort_by(|a, b| order.compare(a, b, &gens));
        assert_eq!(sorted[0], t("m(1,m(2,3))", &gens));
        for m in &monos {
            assert_eq!(order.compare(m, m, &gens), Ordering::Equal);
        }
    }

    #[test]
    fn revpathlex_right_comb_maximal() {
        let gens = one_gen();
        let order = MonomialOrder::declaration(OrderKind::RevPathLex, &gens);
        let mut monos =
            vec![t("m(m(1,2),3)", &gens), t("m(m(1,3),2)", &gens), t("m(1,m(2,3))", &gens)];
        monos.sort_by(|a, b| order.compare(a, b, &gens));
        assert_eq!(monos[2], t("m(1,m(2,3))", &gens));
    }

    #[test]
    fn format_parse_roundtrip() {
        let gens = one_gen();
        let m = t("m(m(1,4),m(2,3))", &gens);
        assert_eq!(t(&format_term(&m, &gens), &gens), m);
    }
}
