//! Dioperadic trees and presentations, the rerooting map, and the expansion
//! of a dioperad presentation into a 2-colored shuffle presentation.
//!
//! Rerooting turns a dioperadic tree into a rooted 2-colored tree: pick a
//! free leg as the global root, orient every edge toward it, and draw an
//! edge straight when the new orientation agrees with the original one,
//! dotted otherwise. Doing this for every root choice of every generator
//! and relation yields a presentation of a 2-colored shuffle operad whose
//! components in either root color recover the dioperad.

use crate::presentation::{
    canonicalize_polynomial, orient_relations_block, Certificate, Coefficient, Polynomial,
    Presentation,
};
use crate::trees::{Color, GenId, GeneratorSymbol, Mode, MonomialOrder, Node, OrderKind, TreeMonomial};
use num_rational::BigRational;
use num_traits::One;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

// ---------------------------------------------------------------------------
// Legs and permutation symmetry
// ---------------------------------------------------------------------------

/// A leg of a dioperadic generator: input `i` or output `j`, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Leg {
    In(u32),
    Out(u32),
}

impl fmt::Display for Leg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Leg::In(i) => write!(f, "in{i}"),
            Leg::Out(j) => write!(f, "out{j}"),
        }
    }
}

/// A signed permutation symmetry: images of inputs and outputs plus a sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryElement {
    /// `in_perm[i]` = image of input i+1 (1-based values).
    pub in_perm: Vec<u32>,
    pub out_perm: Vec<u32>,
    pub sign: i8,
}

impl SymmetryElement {
    pub fn identity(m: usize, n: usize) -> Self {
        SymmetryElement {
            in_perm: (1..=m as u32).collect(),
            out_perm: (1..=n as u32).collect(),
            sign: 1,
        }
    }

    fn compose(&self, other: &SymmetryElement) -> SymmetryElement {
        SymmetryElement {
            in_perm: other.in_perm.iter().map(|i| self.in_perm[(*i - 1) as usize]).collect(),
            out_perm: other.out_perm.iter().map(|j| self.out_perm[(*j - 1) as usize]).collect(),
            sign: self.sign * other.sign,
        }
    }

    fn apply(&self, leg: Leg) -> Leg {
        match leg {
            Leg::In(i) => Leg::In(self.in_perm[(i - 1) as usize]),
            Leg::Out(j) => Leg::Out(self.out_perm[(j - 1) as usize]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DioperadGenerator {
    pub name: String,
    pub inputs: u32,
    pub outputs: u32,
    pub symmetry: Vec<SymmetryElement>,
    pub weight: u32,
    pub hdegree: i32,
}

impl DioperadGenerator {
    pub fn new(name: impl Into<String>, inputs: u32, outputs: u32) -> Self {
        DioperadGenerator {
            name: name.into(),
            inputs,
            outputs,
            symmetry: Vec::new(),
            weight: 1,
            hdegree: 0,
        }
    }

    pub fn legs(&self) -> Vec<Leg> {
        (1..=self.inputs).map(Leg::In).chain((1..=self.outputs).map(Leg::Out)).collect()
    }

    /// Close the declared symmetry elements into a group; error on a sign
    /// clash (the same permutation reached with two different signs).
    pub fn closed_symmetry(&self) -> Result<Vec<SymmetryElement>, DioperadError> {
        let id = SymmetryElement::identity(self.inputs as usize, self.outputs as usize);
        let mut elems: BTreeMap<(Vec<u32>, Vec<u32>), i8> = BTreeMap::new();
        elems.insert((id.in_perm.clone(), id.out_perm.clone()), 1);
        let mut frontier = vec![id];
        while let Some(e) = frontier.pop() {
            for d in &self.symmetry {
                let f = d.compose(&e);
                let key = (f.in_perm.clone(), f.out_perm.clone());
                match elems.get(&key) {
                    Some(sign) => {
                        if *sign != f.sign {
                            return Err(DioperadError::InconsistentCharacter(self.name.clone()));
                        }
                    }
                    None => {
                        if elems.len() >= 40_320 {
                            return Err(DioperadError::SymmetryTooLarge(self.name.clone()));
                        }
                        elems.insert(key, f.sign);
                        frontier.push(f);
                    }
                }
            }
        }
        Ok(elems
            .into_iter()
            .map(|((in_perm, out_perm), sign)| SymmetryElement { in_perm, out_perm, sign })
            .collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DioperadError {
    InconsistentCharacter(String),
    SymmetryTooLarge(String),
    NotATree(String),
    BadLabels(String),
    Syntax { line: usize, message: String },
    UnknownGenerator { line: usize, name: String },
    RootNotALeg(String),
    SignClash(String),
}

impl fmt::Display for DioperadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DioperadError::InconsistentCharacter(g) => {
                write!(f, "generator '{g}': symmetry signs are inconsistent")
            }
            DioperadError::SymmetryTooLarge(g) => {
                write!(f, "generator '{g}': symmetry group exceeds the desk-scale bound")
            }
            DioperadError::NotATree(m) => write!(f, "dioperadic graph is not a tree: {m}"),
            DioperadError::BadLabels(m) => write!(f, "bad leg labels: {m}"),
            DioperadError::Syntax { line, message } => write!(f, "line {line}: {message}"),
            DioperadError::UnknownGenerator { line, name } => {
                write!(f, "line {line}: unknown generator '{name}'")
            }
            DioperadError::RootNotALeg(m) => write!(f, "root is not a free leg: {m}"),
            DioperadError::SignClash(m) => write!(f, "sign clash during expansion: {m}"),
        }
    }
}

impl std::error::Error for DioperadError {}

// ---------------------------------------------------------------------------
// Dioperadic trees
// ---------------------------------------------------------------------------

/// A dioperadic tree: vertices decorated by generators, internal edges from
/// output slots to input slots, and globally labeled free legs.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct DioperadTree {
    pub vertices: Vec<u32>,
    /// (from vertex, out slot) -> (to vertex, in slot), 1-based slots.
    pub edges: Vec<((usize, u32), (usize, u32))>,
    /// free input slot -> global input label 1..M
    pub free_inputs: BTreeMap<(usize, u32), u32>,
    /// free output slot -> global output label 1..N
    pub free_outputs: BTreeMap<(usize, u32), u32>,
}

impl DioperadTree {
    pub fn corolla(gen_index: u32, m: u32, n: u32) -> DioperadTree {
        DioperadTree {
            vertices: vec![gen_index],
            edges: Vec::new(),
            free_inputs: (1..=m).map(|i| ((0, i), i)).collect(),
            free_outputs: (1..=n).map(|j| ((0, j), j)).collect(),
        }
    }

    pub fn arity(&self) -> (u32, u32) {
        (self.free_inputs.len() as u32, self.free_outputs.len() as u32)
    }

    pub fn validate(&self, gens: &[DioperadGenerator]) -> Result<(), DioperadError> {
        let v = self.vertices.len();
        if self.edges.len() + 1 != v {
            return Err(DioperadError::NotATree(format!(
                "{} vertices, {} internal edges",
                v,
                self.edges.len()
            )));
        }
        let mut parent: Vec<usize> = (0..v).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for ((a, _), (b, _)) in &self.edges {
            let (ra, rb) = (find(&mut parent, *a), find(&mut parent, *b));
            if ra == rb {
                return Err(DioperadError::NotATree("cycle among internal edges".into()));
            }
            parent[ra] = rb;
        }
        let mut used: BTreeSet<(usize, Leg)> = BTreeSet::new();
        let mut mark = |vslot: (usize, Leg)| -> Result<(), DioperadError> {
            if !used.insert(vslot) {
                return Err(DioperadError::BadLabels(format!(
                    "slot {} of vertex {} used twice",
                    vslot.1, vslot.0
                )));
            }
            Ok(())
        };
        for ((a, i), (b, j)) in &self.edges {
            mark((*a, Leg::Out(*i)))?;
            mark((*b, Leg::In(*j)))?;
        }
        for (v, s) in self.free_inputs.keys() {
            mark((*v, Leg::In(*s)))?;
        }
        for (v, s) in self.free_outputs.keys() {
            mark((*v, Leg::Out(*s)))?;
        }
        for (vi, g) in self.vertices.iter().enumerate() {
            let gen = &gens[*g as usize];
            for leg in gen.legs() {
                if !used.contains(&(vi, leg)) {
                    return Err(DioperadError::BadLabels(format!(
                        "slot {leg} of vertex {vi} unused"
                    )));
                }
            }
        }
        let (m, n) = self.arity();
        let mut in_labels: Vec<u32> = self.free_inputs.values().cloned().collect();
        in_labels.sort_unstable();
        if in_labels != (1..=m).collect::<Vec<_>>() {
            return Err(DioperadError::BadLabels("free inputs not labeled 1..M".into()));
        }
        let mut out_labels: Vec<u32> = self.free_outputs.values().cloned().collect();
        out_labels.sort_unstable();
        if out_labels != (1..=n).collect::<Vec<_>>() {
            return Err(DioperadError::BadLabels("free outputs not labeled 1..N".into()));
        }
        Ok(())
    }
}

/// A free leg usable as the global root.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum RootLeg {
    Input(u32),
    Output(u32),
}

impl fmt::Display for RootLeg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootLeg::Input(i) => write!(f, "in{i}"),
            RootLeg::Output(j) => write!(f, "out{j}"),
        }
    }
}

/// The image of a dioperadic tree under rerooting: a rooted tree with typed
/// leaf labels and colored edges; children at every vertex follow the fixed
/// linearization (vertex inputs ascending, then outputs ascending, skipping
/// the root-ward leg).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RootedColoredTree {
    pub root_color: Color,
    pub root: RootedNode,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum RootedNode {
    Leaf { leg: RootLeg, color: Color },
    Vertex { gen: u32, root_leg: Leg, children: Vec<(Color, RootedNode)> },
}

/// Reroot a dioperadic tree at a free leg. Edges are straight when their
/// outer orientation (toward the root) coincides with the inner one: below
/// any vertex, original input slots hang straight and original output slots
/// hang dotted; the root edge is straight exactly when the root is an
/// output.
pub fn reroot(
    t: &DioperadTree,
    gens: &[DioperadGenerator],
    root: RootLeg,
) -> Result<RootedColoredTree, DioperadError> {
    t.validate(gens)?;
    let (root_vertex, root_vslot, root_color) = match root {
        RootLeg::Output(j) => {
            let ((v, s), _) = t
                .free_outputs
                .iter()
                .find(|(_, lab)| **lab == j)
                .ok_or_else(|| DioperadError::RootNotALeg(format!("out{j}")))?;
            (*v, Leg::Out(*s), Color::Straight)
        }
        RootLeg::Input(i) => {
            let ((v, s), _) = t
                .free_inputs
                .iter()
                .find(|(_, lab)| **lab == i)
                .ok_or_else(|| DioperadError::RootNotALeg(format!("in{i}")))?;
            (*v, Leg::In(*s), Color::Dotted)
        }
    };

    #[derive(Clone)]
    enum Attach {
        FreeIn(u32),
        FreeOut(u32),
        Edge { other: usize, other_slot: Leg },
    }
    let mut adj: BTreeMap<(usize, Leg), Attach> = BTreeMap::new();
    for ((a, i), (b, j)) in &t.edges {
        adj.insert((*a, Leg::Out(*i)), Attach::Edge { other: *b, other_slot: Leg::In(*j) });
        adj.insert((*b, Leg::In(*j)), Attach::Edge { other: *a, other_slot: Leg::Out(*i) });
    }
    for ((v, s), lab) in &t.free_inputs {
        adj.insert((*v, Leg::In(*s)), Attach::FreeIn(*lab));
    }
    for ((v, s), lab) in &t.free_outputs {
        adj.insert((*v, Leg::Out(*s)), Attach::FreeOut(*lab));
    }

    fn build(
        t: &DioperadTree,
        gens: &[DioperadGenerator],
        adj: &BTreeMap<(usize, Leg), Attach>,
        vertex: usize,
        toward_root: Leg,
    ) -> RootedNode {
        let g = &gens[t.vertices[vertex] as usize];
        let mut children = Vec::new();
        for leg in g.legs() {
            if leg == toward_root {
                continue;
            }
            let color = match leg {
                Leg::In(_) => Color::Straight,
                Leg::Out(_) => Color::Dotted,
            };
            let node = match &adj[&(vertex, leg)] {
                Attach::FreeIn(lab) => RootedNode::Leaf { leg: RootLeg::Input(*lab), color },
                Attach::FreeOut(lab) => RootedNode::Leaf { leg: RootLeg::Output(*lab), color },
                Attach::Edge { other, other_slot } => build(t, gens, adj, *other, *other_slot),
            };
            children.push((color, node));
        }
        RootedNode::Vertex { gen: t.vertices[vertex], root_leg: toward_root, children }
    }

    let root_node = build(t, gens, &adj, root_vertex, root_vslot);
    Ok(RootedColoredTree { root_color, root: root_node })
}

/// Reconstruct the dioperadic tree: inverse of `reroot` given the root leg.
pub fn unroot(r: &RootedColoredTree, gens: &[DioperadGenerator], root: RootLeg) -> DioperadTree {
    let mut tree = DioperadTree {
        vertices: Vec::new(),
        edges: Vec::new(),
        free_inputs: BTreeMap::new(),
        free_outputs: BTreeMap::new(),
    };
    fn go(node: &RootedNode, tree: &mut DioperadTree, gens: &[DioperadGenerator]) -> (usize, Leg) {
        match node {
            RootedNode::Leaf { .. } => unreachable!("leaves are handled by their parent"),
            RootedNode::Vertex { gen, root_leg, children } => {
                let vid = tree.vertices.len();
                tree.vertices.push(*gen);
                let g = &gens[*gen as usize];
                let mut child_iter = children.iter();
                for leg in g.legs() {
                    if leg == *root_leg {
                        continue;
                    }
                    let (_, child) = child_iter.next().expect("one child per non-root leg");
                    match child {
                        RootedNode::Leaf { leg: free, .. } => match (leg, free) {
                            (Leg::In(s), RootLeg::Input(lab)) => {
                                tree.free_inputs.insert((vid, s), *lab);
                            }
                            (Leg::Out(s), RootLeg::Output(lab)) => {
                                tree.free_outputs.insert((vid, s), *lab);
                            }
                            _ => unreachable!("leaf type matches slot type"),
                        },
                        v => {
                            let (cid, cleg) = go(v, tree, gens);
                            match (leg, cleg) {
                                (Leg::Out(i), Leg::In(j)) => tree.edges.push(((vid, i), (cid, j))),
                                (Leg::In(j), Leg::Out(i)) => tree.edges.push(((cid, i), (vid, j))),
                                _ => unreachable!("edges join outputs to inputs"),
                            }
                        }
                    }
                }
                (vid, *root_leg)
            }
        }
    }
    let (vid, leg) = go(&r.root, &mut tree, gens);
    match (root, leg) {
        (RootLeg::Input(lab), Leg::In(s)) => {
            tree.free_inputs.insert((vid, s), lab);
        }
        (RootLeg::Output(lab), Leg::Out(s)) => {
            tree.free_outputs.insert((vid, s), lab);
        }
        _ => unreachable!("root leg type is consistent"),
    }
    tree
}

// ---------------------------------------------------------------------------
// Presentations
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DioperadRelation {
    pub name: String,
    pub terms: Vec<(Coefficient, DioperadTree)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DioperadPresentation {
    pub generators: Vec<DioperadGenerator>,
    pub relations: Vec<DioperadRelation>,
    /// Order used to orient the expanded relations.
    pub order_kind: OrderKind,
}

// ---------------------------------------------------------------------------
// Expansion tables
// ---------------------------------------------------------------------------

/// A rooted ordering of a generator: the leg toward the root plus the
/// remaining legs in child order.
pub type RootedTuple = (Leg, Vec<Leg>);

fn leg_color_as_input(leg: Leg) -> Color {
    match leg {
        Leg::In(_) => Color::Straight,
        Leg::Out(_) => Color::Dotted,
    }
}

fn leg_color_as_root(leg: Leg) -> Color {
    match leg {
        Leg::In(_) => Color::Dotted,
        Leg::Out(_) => Color::Straight,
    }
}

/// The shuffle-generator tables of an expanded dioperad: every rooted
/// ordering of every generator resolves to a (shuffle generator, sign) pair,
/// or to nothing when the component vanishes under the sign character.
pub struct ColoredExpansion {
    pub shuffle_generators: Vec<GeneratorSymbol>,
    lookup: BTreeMap<(u32, RootedTuple), Option<(GenId, i8)>>,
    /// (shuffle gen, perm) -> (shuffle gen, sign); perm[new_slot] = old_slot.
    slot_perm: BTreeMap<(GenId, Vec<u8>), Option<(GenId, i8)>>,
}

impl ColoredExpansion {
    pub fn lookup_tuple(&self, gen: u32, tuple: &RootedTuple) -> Option<(GenId, i8)> {
        self.lookup.get(&(gen, tuple.clone())).cloned().flatten()
    }

    pub fn permute_slots(&self, gen: GenId, perm: &[u8]) -> Option<(GenId, i8)> {
        self.slot_perm.get(&(gen, perm.to_vec())).cloned().flatten()
    }

    /// Assemble tables directly (used by the coloring functor, whose orbit
    /// enumeration lives elsewhere).
    pub(crate) fn from_tables(
        shuffle_generators: Vec<GeneratorSymbol>,
        slot_perm: BTreeMap<(GenId, Vec<u8>), Option<(GenId, i8)>>,
    ) -> Self {
        ColoredExpansion { shuffle_generators, lookup: BTreeMap::new(), slot_perm }
    }
}

pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::new();
        for p in &out {
            for i in 0..=p.len() {
                let mut q = p.clone();
                q.insert(i, p.len());
                next.push(q);
            }
        }
        out = next;
    }
    out.sort();
    out
}

/// One shuffle generator per orbit of rooted orderings under the signed
/// symmetry; orbits with a sign clash vanish.
pub fn expand_generators(gens: &[DioperadGenerator]) -> Result<ColoredExpansion, DioperadError> {
    struct Orbit {
        dgen: u32,
        rep: RootedTuple,
        members: BTreeMap<RootedTuple, i8>,
        vanished: bool,
    }
    let mut orbits: Vec<Orbit> = Vec::new();
    for (gi, g) in gens.iter().enumerate() {
        let group = g.closed_symmetry()?;
        let legs = g.legs();
        let mut seen: BTreeSet<RootedTuple> = BTreeSet::new();
        for root in &legs {
            let rest: Vec<Leg> = legs.iter().filter(|l| **l != *root).cloned().collect();
            for perm in permutations(rest.len()) {
                let tuple: RootedTuple = (*root, perm.iter().map(|i| rest[*i]).collect());
                if seen.contains(&tuple) {
                    continue;
                }
                let mut members: BTreeMap<RootedTuple, i8> = BTreeMap::new();
                let mut vanished = false;
                for e in &group {
                    let img: RootedTuple =
                        (e.apply(tuple.0), tuple.1.iter().map(|l| e.apply(*l)).collect());
                    match members.get(&img) {
                        Some(sign) => {
                            if *sign != e.sign {
                                vanished = true;
                            }
                        }
                        None => {
                            members.insert(img, e.sign);
                        }
                    }
                }
                for t in members.keys() {
                    seen.insert(t.clone());
                }
                let rep = members.keys().next().cloned().expect("orbit nonempty");
                let base = members[&rep];
                let members: BTreeMap<RootedTuple, i8> =
                    members.iter().map(|(t, s)| (t.clone(), s * base)).collect();
                orbits.push(Orbit { dgen: gi as u32, rep, members, vanished });
            }
        }
    }

    // Canonical generator order: fewer dotted inputs first, then the input
    // color word (straight before dotted), then output (straight before
    // dotted), then declaration index, then the representative tuple.
    let key_of = |o: &Orbit| {
        let inputs: Vec<Color> = o.rep.1.iter().map(|l| leg_color_as_input(*l)).collect();
        let dotted = inputs.iter().filter(|c| **c == Color::Dotted).count();
        let in_key: Vec<u8> =
            inputs.iter().map(|c| if *c == Color::Dotted { 1 } else { 0 }).collect();
        let out_key: u8 = if leg_color_as_root(o.rep.0) == Color::Dotted { 1 } else { 0 };
        (dotted, in_key, out_key, o.dgen, o.rep.clone())
    };
    orbits.sort_by(|a, b| key_of(a).cmp(&key_of(b)));

    let mut shuffle_generators = Vec::new();
    let mut lookup: BTreeMap<(u32, RootedTuple), Option<(GenId, i8)>> = BTreeMap::new();
    let mut name_count: BTreeMap<String, u32> = BTreeMap::new();
    for o in &orbits {
        if o.vanished {
            for t in o.members.keys() {
                lookup.insert((o.dgen, t.clone()), None);
            }
            continue;
        }
        let inputs: Vec<Color> = o.rep.1.iter().map(|l| leg_color_as_input(*l)).collect();
        let output = leg_color_as_root(o.rep.0);
        let base = &gens[o.dgen as usize];
        let colors: String = inputs.iter().map(|c| c.letter()).collect();
        let stem = format!("{}_{}_{}", base.name, colors, output.letter());
        let count = name_count.entry(stem.clone()).or_insert(0);
        *count += 1;
        let name = if *count > 1 { format!("{}_{}", stem, count) } else { stem };
        let id = GenId(shuffle_generators.len() as u32);
        let mut sym = GeneratorSymbol::new(name, inputs, output);
        sym.weight = base.weight;
        sym.hdegree = base.hdegree;
        shuffle_generators.push(sym);
        for (t, s) in &o.members {
            lookup.insert((o.dgen, t.clone()), Some((id, *s)));
        }
    }

    let mut rep_of: BTreeMap<GenId, (u32, RootedTuple)> = BTreeMap::new();
    for ((dgen, tuple), v) in &lookup {
        if let Some((id, s)) = v {
            if *s == 1 && !rep_of.contains_key(id) {
                rep_of.insert(*id, (*dgen, tuple.clone()));
            }
        }
    }
    let mut slot_perm = BTreeMap::new();
    for (id, (dgen, rep)) in &rep_of {
        for perm in permutations(rep.1.len()) {
            let permuted: RootedTuple = (rep.0, perm.iter().map(|i| rep.1[*i]).collect());
            let entry = lookup.get(&(*dgen, permuted)).cloned().flatten();
            slot_perm.insert((*id, perm.iter().map(|i| *i as u8).collect::<Vec<u8>>()), entry);
        }
    }

    Ok(ColoredExpansion { shuffle_generators, lookup, slot_perm })
}

// ---------------------------------------------------------------------------
// Symmetric-level trees
// ---------------------------------------------------------------------------

/// A decorated planar tree over shuffle generators whose leaves carry
/// arbitrary distinct labels; the shuffle condition is not imposed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymTree {
    pub node: Node,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymRelation {
    pub name: String,
    pub terms: Vec<(Coefficient, SymTree)>,
}

pub struct SymmetricPresentation {
    pub expansion: ColoredExpansion,
    pub relations: Vec<SymRelation>,
    pub order_kind: OrderKind,
}

/// Convert a rooted colored tree to a symmetric-level tree over the shuffle
/// generators. Leaf labels follow the linearization: original inputs first
/// (ascending), then outputs (ascending), skipping the root leg. Returns the
/// accumulated sign, or None when a vertex's component vanishes.
pub fn rooted_to_sym(
    r: &RootedColoredTree,
    m: u32,
    root: RootLeg,
    exp: &ColoredExpansion,
) -> Option<(i8, SymTree)> {
    fn leaf_label(leg: RootLeg, root: RootLeg, m: u32) -> u32 {
        match (leg, root) {
            (RootLeg::Input(i), RootLeg::Input(r)) => {
                if i < r {
                    i
                } else {
                    i - 1
                }
            }
            (RootLeg::Input(i), RootLeg::Output(_)) => i,
            (RootLeg::Output(j), RootLeg::Input(_)) => m - 1 + j,
            (RootLeg::Output(j), RootLeg::Output(r)) => m + if j < r { j } else { j - 1 },
        }
    }
    fn go(
        node: &RootedNode,
        root: RootLeg,
        m: u32,
        exp: &ColoredExpansion,
        sign: &mut i8,
    ) -> Option<Node> {
        match node {
            RootedNode::Leaf { leg, .. } => Some(Node::Leaf(leaf_label(*leg, root, m))),
            RootedNode::Vertex { gen, root_leg, children } => {
                // Children are stored in leg order minus the root leg, which
                // is exactly the linearized tuple; recover the legs from the
                // edge colors (straight = original input, dotted = output)
                // counting each kind up and skipping the root leg's index.
                let mut slots = Vec::with_capacity(children.len());
                let mut next_in = 1u32;
                let mut next_out = 1u32;
                for (color, _) in children {
                    let leg = match color {
                        Color::Straight => {
                            if let Leg::In(r) = root_leg {
                                if next_in == *r {
                                    next_in += 1;
                                }
                            }
                            let l = Leg::In(next_in);
                            next_in += 1;
                            l
                        }
                        Color::Dotted => {
                            if let Leg::Out(r) = root_leg {
                                if next_out == *r {
                                    next_out += 1;
                                }
                            }
                            let l = Leg::Out(next_out);
                            next_out += 1;
                            l
                        }
                    };
                    slots.push(leg);
                }
                let tuple: RootedTuple = (*root_leg, slots);
                let (id, s) = exp.lookup_tuple(*gen, &tuple)?;
                *sign *= s;
                let mut kids = Vec::with_capacity(children.len());
                for (_, c) in children {
                    kids.push(go(c, root, m, exp, sign)?);
                }
                Some(Node::Vertex { gen: id, children: kids })
            }
        }
    }
    let mut sign = 1i8;
    let node = go(&r.root, root, m, exp, &mut sign)?;
    Some((sign, SymTree { node }))
}

/// Reroot every relation at every free leg: one colored symmetric relation
/// per (relation, root choice).
pub fn psi_presentation(d: &DioperadPresentation) -> Result<SymmetricPresentation, DioperadError> {
    let expansion = expand_generators(&d.generators)?;
    let mut relations = Vec::new();
    for rel in &d.relations {
        let (m, n) = rel.terms.first().map(|(_, t)| t.arity()).unwrap_or((0, 0));
        let roots: Vec<RootLeg> =
            (1..=m).map(RootLeg::Input).chain((1..=n).map(RootLeg::Output)).collect();
        for root in roots {
            let mut terms: Vec<(Coefficient, SymTree)> = Vec::new();
            for (c, t) in &rel.terms {
                let rooted = reroot(t, &d.generators, root)?;
                if let Some((sign, sym)) = rooted_to_sym(&rooted, m, root, &expansion) {
                    let coeff = if sign >= 0 { c.clone() } else { -c.clone() };
                    terms.push((coeff, sym));
                }
            }
            if !terms.is_empty() {
                relations.push(SymRelation { name: format!("{}_{}", rel.name, root), terms });
            }
        }
    }
    Ok(SymmetricPresentation { expansion, relations, order_kind: d.order_kind })
}

/// Canonicalize a symmetric tree into a shuffle monomial with a sign:
/// recursively sort children by minimal label, replacing each vertex's
/// generator by its slot-permuted image; None when a component vanishes.
pub fn sym_to_shuffle(t: &SymTree, exp: &ColoredExpansion) -> Option<(i8, TreeMonomial)> {
    fn go(n: &Node, exp: &ColoredExpansion, sign: &mut i8) -> Option<Node> {
        match n {
            Node::Leaf(l) => Some(Node::Leaf(*l)),
            Node::Vertex { gen, children } => {
                let kids: Option<Vec<Node>> = children.iter().map(|c| go(c, exp, sign)).collect();
                let mut kids = kids?;
                let mut idx: Vec<usize> = (0..kids.len()).collect();
                idx.sort_by_key(|i| kids[*i].min_label());
                let perm: Vec<u8> = idx.iter().map(|i| *i as u8).collect();
                let (new_gen, s) = exp.permute_slots(*gen, &perm)?;
                *sign *= s;
                let mut sorted = Vec::with_capacity(kids.len());
                for i in idx {
                    sorted.push(std::mem::replace(&mut kids[i], Node::Leaf(0)));
                }
                Some(Node::Vertex { gen: new_gen, children: sorted })
            }
        }
    }
    let mut sign = 1i8;
    let node = go(&t.node, exp, &mut sign)?;
    Some((sign, TreeMonomial::new(node, Mode::Shuffle)))
}

/// Expand a symmetric presentation into a shuffle presentation: instantiate
/// every relation over all leaf permutations, canonicalize with signs,
/// deduplicate by row reduction per block, and orient by the declared order
/// over the canonical generator order.
pub fn shuffle_expand(s: &SymmetricPresentation) -> Result<Presentation, DioperadError> {
    let gens = s.expansion.shuffle_generators.clone();
    let order = MonomialOrder::declaration(s.order_kind, &gens);
    let mut polys: Vec<Polynomial> = Vec::new();
    for rel in &s.relations {
        let n = rel
            .terms
            .first()
            .map(|(_, t)| TreeMonomial::new(t.node.clone(), Mode::Shuffle).leaf_count())
            .unwrap_or(0);
        for perm in permutations(n) {
            let mut raw: Vec<(Coefficient, TreeMonomial)> = Vec::new();
            for (c, t) in &rel.terms {
                let relabeled =
                    SymTree { node: relabel_node(&t.node, &|l| perm[(l - 1) as usize] as u32 + 1) };
                if let Some((sign, shuf)) = sym_to_shuffle(&relabeled, &s.expansion) {
                    let coeff = if sign >= 0 { c.clone() } else { -c.clone() };
                    raw.push((coeff, shuf));
                }
            }
            match canonicalize_polynomial(raw, &gens) {
                Ok(p) if !p.is_zero() => polys.push(p),
                Ok(_) => {}
                Err(e) => {
                    return Err(DioperadError::SignClash(format!("relation '{}': {e}", rel.name)))
                }
            }
        }
    }
    let rules = orient_relations_block(&polys, &order, &gens, "r");
    let p = Presentation {
        mode: Mode::Shuffle,
        generators: gens,
        rules,
        certificate: Certificate::Order(order),
    };
    crate::presentation::validate_presentation(&p)
        .map_err(|e| DioperadError::SignClash(e.to_string()))?;
    Ok(p)
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

/// Full expansion pipeline: dioperad presentation to oriented shuffle
/// presentation.
pub fn expand(d: &DioperadPresentation) -> Result<Presentation, DioperadError> {
    shuffle_expand(&psi_presentation(d)?)
}

// ---------------------------------------------------------------------------
// Dioperad file format
// ---------------------------------------------------------------------------

/// Parse the dioperad block format:
///
/// ```text
/// dioperad
/// order pathlex
/// dgen NAME : (M,N) [sym (INPERM|-; OUTPERM|-; SIGN)]* [deg INT] [wt INT]
/// drel NAME : COEFF * dtree{ a=GEN; b=GEN; edge a.out 1 -> b.in 2; in a.in 1 = 1; out b.out 1 = 1 } [(+|-) ...] = 0
/// ```
pub fn parse_dioperad(text: &str) -> Result<DioperadPresentation, DioperadError> {
    let mut generators: Vec<DioperadGenerator> = Vec::new();
    let mut relations: Vec<DioperadRelation> = Vec::new();
    let mut order_kind = OrderKind::PathLex;
    let mut seen_header = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw.find('#') {
            Some(k) => &raw[..k],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| DioperadError::Syntax { line: line_no, message };
        let (directive, rest) = match line.split_once(char::is_whitespace) {
            Some((d, r)) => (d, r.trim()),
            None => (line, ""),
        };
        match directive {
            "dioperad" => seen_header = true,
            "order" => {
                order_kind = match rest {
                    "pathlex" => OrderKind::PathLex,
                    "revpathlex" => OrderKind::RevPathLex,
                    "quantumpath" => OrderKind::QuantumPath,
                    other => return Err(err(format!("unknown order '{other}'"))),
                };
            }
            "dgen" => generators.push(parse_dgen(rest, line_no)?),
            "drel" => relations.push(parse_drel(rest, line_no, &generators)?),
            other => return Err(err(format!("unknown directive '{other}'"))),
        }
    }
    if !seen_header {
        return Err(DioperadError::Syntax { line: 1, message: "missing 'dioperad' header".into() });
    }
    for r in &relations {
        for (_, t) in &r.terms {
            t.validate(&generators)?;
        }
    }
    Ok(DioperadPresentation { generators, relations, order_kind })
}

fn parse_perm(tok: &str, len: u32, line: usize) -> Result<Vec<u32>, DioperadError> {
    if tok == "-" {
        return Ok((1..=len).collect());
    }
    let digits: Vec<u32> = tok
        .chars()
        .map(|c| {
            c.to_digit(10)
                .ok_or(DioperadError::Syntax { line, message: format!("bad permutation '{tok}'") })
        })
        .collect::<Result<_, _>>()?;
    let mut sorted = digits.clone();
    sorted.sort_unstable();
    if sorted != (1..=len).collect::<Vec<_>>() {
        return Err(DioperadError::Syntax {
            line,
            message: format!("permutation '{tok}' is not on 1..{len}"),
        });
    }
    Ok(digits)
}

fn parse_dgen(rest: &str, line: usize) -> Result<DioperadGenerator, DioperadError> {
    let err = |message: String| DioperadError::Syntax { line, message };
    let (name, body) =
        rest.split_once(':').ok_or_else(|| err("dgen needs 'NAME : (M,N) ...'".into()))?;
    let name = name.trim().to_string();
    let body = body.trim();
    let open = body.find('(').ok_or_else(|| err("missing '(M,N)'".into()))?;
    let close = body.find(')').ok_or_else(|| err("missing ')'".into()))?;
    let (m, n) =
        body[open + 1..close].split_once(',').ok_or_else(|| err("arity needs 'M,N'".into()))?;
    let m: u32 = m.trim().parse().map_err(|_| err("bad M".into()))?;
    let n: u32 = n.trim().parse().map_err(|_| err("bad N".into()))?;
    let mut g = DioperadGenerator::new(name, m, n);
    let mut tail = body[close + 1..].trim();
    while !tail.is_empty() {
        if let Some(rest2) = tail.strip_prefix("sym") {
            let rest2 = rest2.trim_start();
            let open = rest2.find('(').ok_or_else(|| err("sym needs '(..)'".into()))?;
            let close = rest2.find(')').ok_or_else(|| err("sym needs ')'".into()))?;
            let parts: Vec<&str> = rest2[open + 1..close].split(';').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(err("sym needs '(INPERM; OUTPERM; SIGN)'".into()));
            }
            let sign: i8 = parts[2].parse().map_err(|_| err("bad sign".into()))?;
            if sign != 1 && sign != -1 {
                return Err(err("sign must be 1 or -1".into()));
            }
            g.symmetry.push(SymmetryElement {
                in_perm: parse_perm(parts[0], g.inputs, line)?,
                out_perm: parse_perm(parts[1], g.outputs, line)?,
                sign,
            });
            tail = rest2[close + 1..].trim();
        } else if let Some(rest2) = tail.strip_prefix("deg") {
            let mut it = rest2.trim_start().splitn(2, char::is_whitespace);
            g.hdegree = it.next().unwrap_or("").parse().map_err(|_| err("bad deg".into()))?;
            tail = it.next().unwrap_or("").trim();
        } else if let Some(rest2) = tail.strip_prefix("wt") {
            let mut it = rest2.trim_start().splitn(2, char::is_whitespace);
            g.weight = it.next().unwrap_or("").parse().map_err(|_| err("bad wt".into()))?;
            tail = it.next().unwrap_or("").trim();
        } else {
            return Err(err(format!("unexpected '{tail}'")));
        }
    }
    Ok(g)
}

fn parse_slot(
    tok: &str,
    expect_kind: &str,
    names: &BTreeMap<String, usize>,
    line: usize,
) -> Result<(usize, u32), DioperadError> {
    let err = |message: String| DioperadError::Syntax { line, message };
    let (vname, slot) = tok.split_once('.').ok_or_else(|| err(format!("bad slot '{tok}'")))?;
    let v = *names.get(vname.trim()).ok_or_else(|| err(format!("unknown vertex '{vname}'")))?;
    let rest = slot
        .trim()
        .strip_prefix(expect_kind)
        .ok_or_else(|| err(format!("expected '{expect_kind}' slot in '{tok}'")))?;
    let idx: u32 = rest.trim().parse().map_err(|_| err(format!("bad slot index '{rest}'")))?;
    Ok((v, idx))
}

fn parse_dtree(
    body: &str,
    line: usize,
    gens: &[DioperadGenerator],
) -> Result<DioperadTree, DioperadError> {
    let err = |message: String| DioperadError::Syntax { line, message };
    let mut names: BTreeMap<String, usize> = BTreeMap::new();
    let mut tree = DioperadTree {
        vertices: Vec::new(),
        edges: Vec::new(),
        free_inputs: BTreeMap::new(),
        free_outputs: BTreeMap::new(),
    };
    for stmt in body.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some(rest) = stmt.strip_prefix("edge ") {
            let (lhs, rhs) = rest.split_once("->").ok_or_else(|| err("edge needs '->'".into()))?;
            let (va, si) = parse_slot(lhs.trim(), "out", &names, line)?;
            let (vb, sj) = parse_slot(rhs.trim(), "in", &names, line)?;
            tree.edges.push(((va, si), (vb, sj)));
        } else if let Some(rest) = stmt.strip_prefix("in ") {
            let (slot, lab) = rest.split_once('=').ok_or_else(|| err("in needs '='".into()))?;
            let (v, s) = parse_slot(slot.trim(), "in", &names, line)?;
            let lab: u32 = lab.trim().parse().map_err(|_| err("bad label".into()))?;
            tree.free_inputs.insert((v, s), lab);
        } else if let Some(rest) = stmt.strip_prefix("out ") {
            let (slot, lab) = rest.split_once('=').ok_or_else(|| err("out needs '='".into()))?;
            let (v, s) = parse_slot(slot.trim(), "out", &names, line)?;
            let lab: u32 = lab.trim().parse().map_err(|_| err("bad label".into()))?;
            tree.free_outputs.insert((v, s), lab);
        } else if let Some((vname, gname)) = stmt.split_once('=') {
            let gname = gname.trim();
            let gi = gens
                .iter()
                .position(|g| g.name == gname)
                .ok_or(DioperadError::UnknownGenerator { line, name: gname.to_string() })?;
            names.insert(vname.trim().to_string(), tree.vertices.len());
            tree.vertices.push(gi as u32);
        } else {
            return Err(err(format!("bad dtree statement '{stmt}'")));
        }
    }
    Ok(tree)
}

fn parse_drel(
    rest: &str,
    line: usize,
    gens: &[DioperadGenerator],
) -> Result<DioperadRelation, DioperadError> {
    let err = |message: String| DioperadError::Syntax { line, message };
    let (name, body) = rest.split_once(':').ok_or_else(|| err("drel needs 'NAME : ...'".into()))?;
    let name = name.trim().to_string();
    let body = body
        .trim()
        .strip_suffix("= 0")
        .or_else(|| body.trim().strip_suffix("=0"))
        .ok_or_else(|| err("drel must end with '= 0'".into()))?
        .trim();
    let mut terms: Vec<(Coefficient, DioperadTree)> = Vec::new();
    let mut rest = body;
    let mut sign = BigRational::one();
    if let Some(r) = rest.strip_prefix('-') {
        sign = -sign;
        rest = r.trim_start();
    } else if let Some(r) = rest.strip_prefix('+') {
        rest = r.trim_start();
    }
    loop {
        let star = rest.find('*').ok_or_else(|| err("term needs 'COEFF * dtree{..}'".into()))?;
        let coeff_txt = rest[..star].trim();
        let coeff = parse_rational(coeff_txt)
            .ok_or_else(|| err(format!("bad coefficient '{coeff_txt}'")))?;
        let after = rest[star + 1..].trim_start();
        let after =
            after.strip_prefix("dtree").ok_or_else(|| err("expected 'dtree{...}'".into()))?;
        let inner = after.trim_start().strip_prefix('{').ok_or_else(|| err("expected '{'".into()))?;
        let close = inner.find('}').ok_or_else(|| err("missing '}'".into()))?;
        let tree = parse_dtree(&inner[..close], line, gens)?;
        terms.push((&sign * coeff, tree));
        let mut tail = inner[close + 1..].trim_start();
        if tail.is_empty() {
            break;
        }
        if let Some(r) = tail.strip_prefix('+') {
            sign = BigRational::one();
            tail = r.trim_start();
        } else if let Some(r) = tail.strip_prefix('-') {
            sign = -BigRational::one();
            tail = r.trim_start();
        } else {
            return Err(err(format!("unexpected '{tail}'")));
        }
        rest = tail;
    }
    Ok(DioperadRelation { name, terms })
}

fn parse_rational(s: &str) -> Option<Coefficient> {
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().ok()?;
        let d: i64 = d.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        Some(BigRational::new(n.into(), d.into()))
    } else {
        Some(BigRational::from_integer(s.trim().parse::<i64>().ok()?.into()))
    }
}

/// Leaf legs of a rooted colored tree, with edge colors, in planar order.
pub fn rooted_leaves(t: &RootedColoredTree) -> Vec<(RootLeg, Color)> {
    fn go(n: &RootedNode, out: &mut Vec<(RootLeg, Color)>) {
        match n {
            RootedNode::Leaf { leg, color } => out.push((*leg, *color)),
            RootedNode::Vertex { children, .. } => {
                for (_, c) in children {
                    go(c, out);
                }
            }
        }
    }
    let mut leaves = Vec::new();
    go(&t.root, &mut leaves);
    leaves
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free_qp_dioperad() -> DioperadPresentation {
        // One (2,2) generator, symmetric in inputs, antisymmetric in outputs.
        let mut g = DioperadGenerator::new("p", 2, 2);
        g.symmetry.push(SymmetryElement { in_perm: vec![2, 1], out_perm: vec![1, 2], sign: 1 });
        g.symmetry.push(SymmetryElement { in_perm: vec![1, 2], out_perm: vec![2, 1], sign: -1 });
        DioperadPresentation {
            generators: vec![g],
            relations: Vec::new(),
            order_kind: OrderKind::PathLex,
        }
    }

    #[test]
    fn qp_generator_expands_to_six() {
        let d = free_qp_dioperad();
        let exp = expand_generators(&d.generators).unwrap();
        assert_eq!(exp.shuffle_generators.len(), 6);
        let straight =
            exp.shuffle_generators.iter().filter(|g| g.signature.output == Color::Straight).count();
        assert_eq!(straight, 3);
    }

    #[test]
    fn unary_gen_expands_to_two() {
        let g = DioperadGenerator::new("e", 1, 1);
        let exp = expand_generators(&[g]).unwrap();
        assert_eq!(exp.shuffle_generators.len(), 2);
        let sigs: Vec<_> = exp
            .shuffle_generators
            .iter()
            .map(|g| (g.signature.inputs[0], g.signature.output))
            .collect();
        assert!(sigs.contains(&(Color::Straight, Color::Straight)));
        assert!(sigs.contains(&(Color::Dotted, Color::Dotted)));
    }

    #[test]
    fn corolla_reroot_colors() {
        let g = DioperadGenerator::new("g", 3, 2);
        let gens = vec![g];
        let t = DioperadTree::corolla(0, 3, 2);
        let r = reroot(&t, &gens, RootLeg::Output(1)).unwrap();
        assert_eq!(r.root_color, Color::Straight);
        let leaves = rooted_leaves(&r);
        let straight = leaves.iter().filter(|(_, c)| *c == Color::Straight).count();
        assert_eq!((straight, leaves.len()), (3, 4));
        let r2 = reroot(&t, &gens, RootLeg::Input(1)).unwrap();
        assert_eq!(r2.root_color, Color::Dotted);
        let leaves2 = rooted_leaves(&r2);
        let straight2 = leaves2.iter().filter(|(_, c)| *c == Color::Straight).count();
        assert_eq!((straight2, leaves2.len()), (2, 4));
    }

    #[test]
    fn reroot_unroot_roundtrip() {
        let ga = DioperadGenerator::new("a", 2, 2);
        let gb = DioperadGenerator::new("b", 2, 1);
        let gens = vec![ga, gb];
        let t = DioperadTree {
            vertices: vec![0, 1],
            edges: vec![((0, 1), (1, 2))],
            free_inputs: vec![((0, 1), 1), ((0, 2), 2), ((1, 1), 3)].into_iter().collect(),
            free_outputs: vec![((0, 2), 2), ((1, 1), 1)].into_iter().collect(),
        };
        t.validate(&gens).unwrap();
        for root in [RootLeg::Output(1), RootLeg::Output(2), RootLeg::Input(2)] {
            let r = reroot(&t, &gens, root).unwrap();
            let back = unroot(&r, &gens, root);
            let r2 = reroot(&back, &gens, root).unwrap();
            assert_eq!(r, r2);
        }
    }

    #[test]
    fn paper_three_vertex_tree_coloring() {
        // Vertices: A in P(3,3), B in P(2,2), C in P(2,3); edges A->C, B->C.
        // Rooted at output 6 both internal edges are straight; rooted at
        // input 5 the edge B-C flips to dotted while A-C stays straight.
        let gens = vec![
            DioperadGenerator::new("A", 3, 3),
            DioperadGenerator::new("B", 2, 2),
            DioperadGenerator::new("C", 2, 3),
        ];
        let t = DioperadTree {
            vertices: vec![0, 1, 2],
            edges: vec![((0, 3), (2, 1)), ((1, 2), (2, 2))],
            free_inputs: vec![((0, 1), 1), ((0, 2), 2), ((0, 3), 3), ((1, 1), 4), ((1, 2), 5)]
                .into_iter()
                .collect(),
            free_outputs: vec![
                ((0, 1), 1),
                ((0, 2), 2),
                ((1, 1), 3),
                ((2, 1), 4),
                ((2, 2), 5),
                ((2, 3), 6),
            ]
            .into_iter()
            .collect(),
        };
        t.validate(&gens).unwrap();
        let r = reroot(&t, &gens, RootLeg::Output(6)).unwrap();
        assert_eq!(r.root_color, Color::Straight);
        let RootedNode::Vertex { gen, children, .. } = &r.root else { panic!("vertex") };
        assert_eq!(*gen, 2);
        let internal: Vec<&(Color, RootedNode)> =
            children.iter().filter(|(_, n)| matches!(n, RootedNode::Vertex { .. })).collect();
        assert_eq!(internal.len(), 2);
        assert!(internal.iter().all(|(c, _)| *c == Color::Straight));
        for (leg, color) in rooted_leaves(&r) {
            match leg {
                RootLeg::Input(_) => assert_eq!(color, Color::Straight),
                RootLeg::Output(_) => assert_eq!(color, Color::Dotted),
            }
        }

        let r5 = reroot(&t, &gens, RootLeg::Input(5)).unwrap();
        assert_eq!(r5.root_color, Color::Dotted);
        let RootedNode::Vertex { gen, children, .. } = &r5.root else { panic!("vertex") };
        assert_eq!(*gen, 1);
        let (c_color, c_node) = children
            .iter()
            .find(|(_, n)| matches!(n, RootedNode::Vertex { .. }))
            .expect("C below B");
        assert_eq!(*c_color, Color::Dotted);
        let RootedNode::Vertex { gen: cg, children: cc, .. } = c_node else { panic!() };
        assert_eq!(*cg, 2);
        let (a_color, _) =
            cc.iter().find(|(_, n)| matches!(n, RootedNode::Vertex { .. })).expect("A below C");
        assert_eq!(*a_color, Color::Straight);
    }

    #[test]
    fn dioperad_format_parses() {
        let text = "\ndioperad\norder pathlex\ndgen m : (2,1) sym (21; -; 1)\ndgen w : (1,2) sym (-; 21; 1)\ndrel assoc : 1 * dtree{ a=m; b=m; edge a.out 1 -> b.in 1; in a.in 1 = 1; in a.in 2 = 2; in b.in 2 = 3; out b.out 1 = 1 } - 1 * dtree{ a=m; b=m; edge a.out 1 -> b.in 1; in a.in 1 = 2; in a.in 2 = 3; in b.in 2 = 1; out b.out 1 = 1 } = 0\n";
        let d = parse_dioperad(text).unwrap();
        assert_eq!(d.generators.len(), 2);
        assert_eq!(d.relations.len(), 1);
        assert_eq!(d.relations[0].terms.len(), 2);
        let exp = expand_generators(&d.generators).unwrap();
        assert_eq!(exp.shuffle_generators.len(), 6);
    }
}
