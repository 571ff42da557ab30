//! The coloring functor from cyclic-operad presentations to dioperads,
//! recoloring relations, and the caterpillar machinery.
//!
//! A coloring rule picks which (inputs, outputs) splittings of the legs of a
//! cyclic operation survive. Composing with the rerooting map, each cyclic
//! generator explodes into one colored shuffle generator per admissible
//! coloring of its legs (times the orderings its symmetry does not absorb),
//! and the coloring of internal edges becomes immaterial: the recoloring
//! relations. When the cyclic system's normal forms are caterpillar, every
//! shape class of a right-hand side has a unique maximal coloring and the
//! colored system stays convergent, certified by the lexicographic measure
//! (shape rank, dotted internal edges).

use crate::presentation::{
    Certificate, Coefficient, MeasureKind, Polynomial, Presentation, RewriteRule,
};
use crate::psi::{permutations, ColoredExpansion, SymRelation, SymTree, SymmetricPresentation};
use crate::trees::{
    Color, GenId, GeneratorSymbol, Mode, Node, OrderKind, TreeMonomial,
};
use num_traits::One;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

// ---------------------------------------------------------------------------
// Coloring rules
// ---------------------------------------------------------------------------

/// A set of (m, n) arities closed under (m,n),(m',n') -> (m+m'-1, n+n'-1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColoringRule {
    PositivePositive,
    NonnegPositive,
    NonnegNonneg,
    /// All inputs, one output: plain symmetric operads.
    OutputsOne,
    /// Equal numbers of inputs and outputs.
    Equal,
    Custom { table: BTreeSet<(u32, u32)>, bound: u32 },
}

impl ColoringRule {
    pub fn admits(&self, m: u32, n: u32) -> bool {
        match self {
            ColoringRule::PositivePositive => m >= 1 && n >= 1,
            ColoringRule::NonnegPositive => n >= 1,
            ColoringRule::NonnegNonneg => true,
            ColoringRule::OutputsOne => m >= 1 && n == 1,
            ColoringRule::Equal => m == n && m >= 1,
            ColoringRule::Custom { table, .. } => table.contains(&(m, n)),
        }
    }

    /// Exhaustively verify closure under composition up to the bound.
    pub fn closure_check(&self, bound: u32) -> Result<(), (u32, u32)> {
        for m in 0..=bound {
            for n in 0..=bound {
                if !self.admits(m, n) {
                    continue;
                }
                for m2 in 0..=bound {
                    for n2 in 0..=bound {
                        if !self.admits(m2, n2) {
                            continue;
                        }
                        if n == 0 || m2 == 0 {
                            // no composable pair of legs
                            continue;
                        }
                        let (cm, cn) = (m + m2 - 1, n + n2 - 1);
                        if cm <= bound && cn <= bound && !self.admits(cm, cn) {
                            return Err((cm, cn));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Cyclic presentations
// ---------------------------------------------------------------------------

/// A generator of a cyclic operad: legs 0..legs-1 where leg 0 is the
/// operadic output, with a signed permutation symmetry on all legs
/// (including the rotations that make it cyclic; declared, not verified).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicGenerator {
    pub name: String,
    pub legs: u32,
    /// (perm, sign): perm[i] = image of leg i, 0-based.
    pub symmetry: Vec<(Vec<u32>, i8)>,
    pub weight: u32,
    pub hdegree: i32,
}

impl CyclicGenerator {
    pub fn new(name: impl Into<String>, legs: u32) -> Self {
        CyclicGenerator { name: name.into(), legs, symmetry: Vec::new(), weight: 1, hdegree: 0 }
    }

    fn closed_symmetry(&self) -> Result<Vec<(Vec<u32>, i8)>, ThetaError> {
        let id: Vec<u32> = (0..self.legs).collect();
        let mut elems: BTreeMap<Vec<u32>, i8> = BTreeMap::new();
        elems.insert(id.clone(), 1);
        let mut frontier = vec![(id, 1i8)];
        while let Some((p, s)) = frontier.pop() {
            for (q, t) in &self.symmetry {
                let comp: Vec<u32> = p.iter().map(|i| q[*i as usize]).collect();
                let sign = s * t;
                match elems.get(&comp) {
                    Some(existing) => {
                        if *existing != sign {
                            return Err(ThetaError::InconsistentCharacter(self.name.clone()));
                        }
                    }
                    None => {
                        if elems.len() >= 40_320 {
                            return Err(ThetaError::SymmetryTooLarge(self.name.clone()));
                        }
                        elems.insert(comp.clone(), sign);
                        frontier.push((comp, sign));
                    }
                }
            }
        }
        Ok(elems.into_iter().collect())
    }
}

/// Operadic tree over cyclic generators, rooted at leg 0 of each vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CycNode {
    Leaf(u32),
    Vertex { gen: u32, children: Vec<CycNode> },
}

impl CycNode {
    fn leaf_count(&self) -> usize {
        match self {
            CycNode::Leaf(_) => 1,
            CycNode::Vertex { children, .. } => children.iter().map(CycNode::leaf_count).sum(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicRelation {
    pub name: String,
    pub terms: Vec<(Coefficient, CycNode)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicPresentation {
    pub generators: Vec<CyclicGenerator>,
    pub relations: Vec<CyclicRelation>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ThetaError {
    InconsistentCharacter(String),
    SymmetryTooLarge(String),
    ClosureViolated { m: u32, n: u32 },
    NonCaterpillar(String),
    NoAdmissibleColoring(String),
    GeneratorMismatch(String),
    Expansion(String),
}

impl fmt::Display for ThetaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThetaError::InconsistentCharacter(g) => {
                write!(f, "cyclic generator '{g}': inconsistent symmetry signs")
            }
            ThetaError::SymmetryTooLarge(g) => {
                write!(f, "cyclic generator '{g}': symmetry exceeds desk-scale bound")
            }
            ThetaError::ClosureViolated { m, n } => {
                write!(f, "coloring rule not closed at ({m},{n})")
            }
            ThetaError::NonCaterpillar(m) => {
                write!(f, "right-hand side contains a non-caterpillar monomial: {m}")
            }
            ThetaError::NoAdmissibleColoring(m) => {
                write!(f, "no admissible internal coloring for shape: {m}")
            }
            ThetaError::GeneratorMismatch(m) => write!(f, "generator tables disagree: {m}"),
            ThetaError::Expansion(m) => write!(f, "expansion failed: {m}"),
        }
    }
}

impl std::error::Error for ThetaError {}

// ---------------------------------------------------------------------------
// Uncolored and colored expansions of cyclic generators
// ---------------------------------------------------------------------------

/// Tables for the uncolored shuffle image of a cyclic presentation: one
/// generator per orbit of orderings of legs 1..k under the stabilizer of
/// leg 0.
pub struct UncoloredTables {
    pub generators: Vec<GeneratorSymbol>,
    /// (cyclic gen, ordering of legs 1..k) -> (gen, sign)
    lookup: BTreeMap<(u32, Vec<u32>), Option<(GenId, i8)>>,
    /// representative ordering per generator
    rep: Vec<(u32, Vec<u32>)>,
    slot_perm: BTreeMap<(GenId, Vec<u8>), Option<(GenId, i8)>>,
}

impl UncoloredTables {
    pub fn rep_of(&self, gen: GenId) -> &(u32, Vec<u32>) {
        &self.rep[gen.idx()]
    }
}

pub fn uncolored_tables(c: &CyclicPresentation) -> Result<UncoloredTables, ThetaError> {
    let mut generators = Vec::new();
    let mut lookup: BTreeMap<(u32, Vec<u32>), Option<(GenId, i8)>> = BTreeMap::new();
    let mut rep = Vec::new();
    for (gi, g) in c.generators.iter().enumerate() {
        let group = g.closed_symmetry()?;
        let stab: Vec<&(Vec<u32>, i8)> = group.iter().filter(|(p, _)| p[0] == 0).collect();
        let legs: Vec<u32> = (1..g.legs).collect();
        let k = legs.len();
        let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
        let mut orbit_idx = 0;
        for perm in permutations(k) {
            let ordering: Vec<u32> = perm.iter().map(|i| legs[*i]).collect();
            if seen.contains(&ordering) {
                continue;
            }
            let mut members: BTreeMap<Vec<u32>, i8> = BTreeMap::new();
            let mut vanished = false;
            for (p, s) in &stab {
                let img: Vec<u32> = ordering.iter().map(|l| p[*l as usize]).collect();
                match members.get(&img) {
                    Some(sign) => {
                        if sign != s {
                            vanished = true;
                        }
                    }
                    None => {
                        members.insert(img, *s);
                    }
                }
            }
            for o in members.keys() {
                seen.insert(o.clone());
            }
            let orep = members.keys().next().cloned().expect("orbit nonempty");
            let base = members[&orep];
            if vanished {
                for o in members.keys() {
                    lookup.insert((gi as u32, o.clone()), None);
                }
                continue;
            }
            orbit_idx += 1;
            let name = format!("{}{}", g.name, orbit_idx);
            let id = GenId(generators.len() as u32);
            let mut sym =
                GeneratorSymbol::new(name, vec![Color::Straight; k], Color::Straight);
            sym.weight = g.weight;
            sym.hdegree = g.hdegree;
            generators.push(sym);
            rep.push((gi as u32, orep.clone()));
            for (o, s) in &members {
                lookup.insert((gi as u32, o.clone()), Some((id, s * base)));
            }
        }
        // A single orbit keeps the bare cyclic name.
        let produced: Vec<usize> =
            (0..generators.len()).filter(|i| rep[*i].0 == gi as u32).collect();
        if produced.len() == 1 {
            generators[produced[0]].name = g.name.clone();
        }
    }
    // Slot permutations.
    let mut slot_perm = BTreeMap::new();
    for (idx, (gi, orep)) in rep.iter().enumerate() {
        let id = GenId(idx as u32);
        for perm in permutations(orep.len()) {
            let permuted: Vec<u32> = perm.iter().map(|i| orep[*i]).collect();
            let entry = lookup.get(&(*gi, permuted)).cloned().flatten();
            slot_perm.insert((id, perm.iter().map(|i| *i as u8).collect::<Vec<u8>>()), entry);
        }
    }
    Ok(UncoloredTables { generators, lookup, rep, slot_perm })
}

/// Expand the cyclic relations over the uncolored generators into shuffle
/// polynomials (all leaf permutations, canonicalized, not yet deduplicated).
pub fn uncolored_relations(
    c: &CyclicPresentation,
    t: &UncoloredTables,
) -> Result<Vec<Polynomial>, ThetaError> {
    let exp = ColoredExpansion::from_tables(t.generators.clone(), t.slot_perm.clone());
    let mut polys = Vec::new();
    for rel in &c.relations {
        let n = rel.terms.first().map(|(_, t)| t.leaf_count()).unwrap_or(0);
        for perm in permutations(n) {
            let mut raw: Vec<(Coefficient, TreeMonomial)> = Vec::new();
            for (coeff, tree) in &rel.terms {
                let (sign, node) = match cyc_to_uncolored(tree, t, &perm) {
                    Some(v) => v,
                    None => continue,
                };
                if let Some((s2, m)) = crate::psi::sym_to_shuffle(&SymTree { node }, &exp) {
                    let total = sign * s2;
                    let c2 = if total >= 0 { coeff.clone() } else { -coeff.clone() };
                    raw.push((c2, m));
                }
            }
            match crate::presentation::canonicalize_polynomial(raw, &t.generators) {
                Ok(p) if !p.is_zero() => polys.push(p),
                Ok(_) => {}
                Err(e) => return Err(ThetaError::Expansion(e.to_string())),
            }
        }
    }
    Ok(polys)
}

/// Convert a cyclic tree to a symmetric tree over the uncolored generators,
/// applying a leaf permutation; the tree's slots are legs 1..k in order, so
/// only identity-ordering lookups appear.
fn cyc_to_uncolored(
    tree: &CycNode,
    t: &UncoloredTables,
    perm: &[usize],
) -> Option<(i8, Node)> {
    fn go(node: &CycNode, t: &UncoloredTables, perm: &[usize], sign: &mut i8) -> Option<Node> {
        match node {
            CycNode::Leaf(l) => Some(Node::Leaf(perm[(*l - 1) as usize] as u32 + 1)),
            CycNode::Vertex { gen, children } => {
                let ordering: Vec<u32> = (1..=children.len() as u32).collect();
                let (id, s) = t.lookup.get(&(*gen, ordering)).cloned().flatten()?;
                *sign *= s;
                let kids: Option<Vec<Node>> =
                    children.iter().map(|c| go(c, t, perm, sign)).collect();
                Some(Node::Vertex { gen: id, children: kids? })
            }
        }
    }
    let mut sign = 1i8;
    let node = go(tree, t, perm, &mut sign)?;
    Some((sign, node))
}

// ---------------------------------------------------------------------------
// Colored expansion under a coloring rule
// ---------------------------------------------------------------------------

/// Tables for the colored shuffle image: a generator per orbit of
/// (root leg, ordering, in/out assignment) under the full symmetry, with
/// inadmissible colorings dropped.
pub struct ColoredTables {
    pub generators: Vec<GeneratorSymbol>,
    /// (cyclic gen, root leg, ordering, colors of (root, slots)) -> entry.
    /// Colors: root color then slot colors; assignment is recoverable from
    /// colors, so they key the table.
    lookup: BTreeMap<(u32, u32, Vec<u32>, Vec<Color>), Option<(GenId, i8)>>,
    slot_perm: BTreeMap<(GenId, Vec<u8>), Option<(GenId, i8)>>,
    /// Map from colored generator to the uncolored generator it shapes to.
    pub strip: Vec<GenId>,
}

impl ColoredTables {
    pub fn lookup_colored(
        &self,
        gen: u32,
        root_leg: u32,
        ordering: &[u32],
        root_color: Color,
        slot_colors: &[Color],
    ) -> Option<(GenId, i8)> {
        let mut colors = vec![root_color];
        colors.extend_from_slice(slot_colors);
        self.lookup.get(&(gen, root_leg, ordering.to_vec(), colors)).cloned().flatten()
    }
}

pub fn colored_tables(
    c: &CyclicPresentation,
    rule: &ColoringRule,
    uncolored: &UncoloredTables,
) -> Result<ColoredTables, ThetaError> {
    // Key: (root leg, ordering, in/out per leg as bitmask by leg index).
    // The orbit machinery runs on (root, ordering, assignment) triples.
    type Item = (u32, Vec<u32>, Vec<bool>); // assignment[leg] = true when in-leg
    let mut generators = Vec::new();
    let mut lookup: BTreeMap<(u32, u32, Vec<u32>, Vec<Color>), Option<(GenId, i8)>> =
        BTreeMap::new();
    let mut rep: Vec<(u32, u32, Vec<u32>, Vec<Color>)> = Vec::new();
    let mut strip: Vec<GenId> = Vec::new();

    struct Orbit {
        cyc: u32,
        rep_item: (u32, Vec<u32>, Vec<bool>),
        members: BTreeMap<(u32, Vec<u32>, Vec<bool>), i8>,
        vanished: bool,
        admissible: bool,
    }
    let mut orbits: Vec<Orbit> = Vec::new();

    for (gi, g) in c.generators.iter().enumerate() {
        let group = g.closed_symmetry()?;
        let legs: Vec<u32> = (0..g.legs).collect();
        let mut seen: BTreeSet<Item> = BTreeSet::new();
        for root in &legs {
            let rest: Vec<u32> = legs.iter().filter(|l| **l != *root).cloned().collect();
            for perm in permutations(rest.len()) {
                let ordering: Vec<u32> = perm.iter().map(|i| rest[*i]).collect();
                for mask in 0..(1u32 << g.legs) {
                    let assignment: Vec<bool> =
                        (0..g.legs).map(|l| mask & (1 << l) != 0).collect();
                    let item: Item = (*root, ordering.clone(), assignment.clone());
                    if seen.contains(&item) {
                        continue;
                    }
                    let m = assignment.iter().filter(|b| **b).count() as u32;
                    let n = g.legs - m;
                    let admissible = rule.admits(m, n);
                    let mut members: BTreeMap<Item, i8> = BTreeMap::new();
                    let mut vanished = false;
                    for (p, s) in &group {
                        let img_root = p[item.0 as usize];
                        let img_ord: Vec<u32> =
                            item.1.iter().map(|l| p[*l as usize]).collect();
                        let mut img_assign = vec![false; g.legs as usize];
                        for l in 0..g.legs {
                            img_assign[p[l as usize] as usize] = assignment[l as usize];
                        }
                        let img: Item = (img_root, img_ord, img_assign);
                        match members.get(&img) {
                            Some(sign) => {
                                if sign != s {
                                    vanished = true;
                                }
                            }
                            None => {
                                members.insert(img, *s);
                            }
                        }
                    }
                    for it in members.keys() {
                        seen.insert(it.clone());
                    }
                    let orep = members.keys().next().cloned().expect("orbit nonempty");
                    let base = members[&orep];
                    let members: BTreeMap<Item, i8> =
                        members.iter().map(|(t, s)| (t.clone(), s * base)).collect();
                    orbits.push(Orbit {
                        cyc: gi as u32,
                        rep_item: orep,
                        members,
                        vanished,
                        admissible,
                    });
                }
            }
        }
    }

    // Canonical order mirrors the dioperad expansion: (#dotted inputs,
    // input colors, output color, uncolored shape, rep item). Sorting by
    // the uncolored shape keeps name-prefix stripping aligned with the
    // uncolored generator order.
    let colors_of = |item: &(u32, Vec<u32>, Vec<bool>)| -> (Color, Vec<Color>) {
        let root_in = item.2[item.0 as usize];
        let root_color = if root_in { Color::Dotted } else { Color::Straight };
        let slot_colors: Vec<Color> = item
            .1
            .iter()
            .map(|l| if item.2[*l as usize] { Color::Straight } else { Color::Dotted })
            .collect();
        (root_color, slot_colors)
    };
    let shape_of = |o: &Orbit| -> Option<GenId> {
        uncolored_shape_of(c, uncolored, o.cyc, &o.rep_item.0, &o.rep_item.1)
    };
    let key_of = |o: &Orbit| {
        let (root_color, slot_colors) = colors_of(&o.rep_item);
        let dotted = slot_colors.iter().filter(|c| **c == Color::Dotted).count();
        let in_key: Vec<u8> =
            slot_colors.iter().map(|c| if *c == Color::Dotted { 1 } else { 0 }).collect();
        let out_key: u8 = if root_color == Color::Dotted { 1 } else { 0 };
        let shape_key = shape_of(o).map(|g| g.0).unwrap_or(u32::MAX);
        (dotted, in_key, out_key, shape_key, o.cyc, o.rep_item.clone())
    };
    orbits.sort_by(|a, b| key_of(a).cmp(&key_of(b)));

    let mut name_count: BTreeMap<String, u32> = BTreeMap::new();
    for o in &orbits {
        let (root_color, slot_colors) = colors_of(&o.rep_item);
        if o.vanished || !o.admissible {
            for it in o.members.keys() {
                let (rc, sc) = colors_of(it);
                let mut colors = vec![rc];
                colors.extend(sc);
                lookup.insert((o.cyc, it.0, it.1.clone(), colors), None);
            }
            continue;
        }
        // The uncolored generator this coloring shapes to: move the root to
        // leg 0 by a symmetry and look the ordering up.
        let ucid = shape_of(o).ok_or_else(|| {
            ThetaError::GeneratorMismatch(format!(
                "no uncolored shape for cyclic gen {} rooted at {}",
                o.cyc, o.rep_item.0
            ))
        })?;
        let base_name = &uncolored.generators[ucid.idx()].name;
        let colors_str: String = slot_colors.iter().map(|c| c.letter()).collect();
        let stem = format!("{}_{}_{}", base_name, colors_str, root_color.letter());
        let count = name_count.entry(stem.clone()).or_insert(0);
        *count += 1;
        let name = if *count > 1 { format!("{}_{}", stem, count) } else { stem };
        let id = GenId(generators.len() as u32);
        let g = &c.generators[o.cyc as usize];
        let mut sym = GeneratorSymbol::new(name, slot_colors.clone(), root_color);
        sym.weight = g.weight;
        sym.hdegree = g.hdegree;
        generators.push(sym);
        let mut rep_colors = vec![root_color];
        rep_colors.extend(slot_colors.clone());
        rep.push((o.cyc, o.rep_item.0, o.rep_item.1.clone(), rep_colors));
        strip.push(ucid);
        for (it, s) in &o.members {
            let (rc, sc) = colors_of(it);
            let mut colors = vec![rc];
            colors.extend(sc);
            lookup.insert((o.cyc, it.0, it.1.clone(), colors), Some((id, *s)));
        }
    }

    let mut slot_perm = BTreeMap::new();
    for (idx, (cyc, root, ordering, colors)) in rep.iter().enumerate() {
        let id = GenId(idx as u32);
        for perm in permutations(ordering.len()) {
            let permuted_ord: Vec<u32> = perm.iter().map(|i| ordering[*i]).collect();
            let mut permuted_colors = vec![colors[0]];
            for i in perm.iter() {
                permuted_colors.push(colors[1 + i]);
            }
            let entry =
                lookup.get(&(*cyc, *root, permuted_ord, permuted_colors)).cloned().flatten();
            slot_perm.insert((id, perm.iter().map(|i| *i as u8).collect::<Vec<u8>>()), entry);
        }
    }

    Ok(ColoredTables { generators, lookup, slot_perm, strip })
}

/// The uncolored generator whose orbit contains the given rooted ordering:
/// move the root to leg 0 by a symmetry and look the ordering up.
fn uncolored_shape_of(
    c: &CyclicPresentation,
    uncolored: &UncoloredTables,
    cyc: u32,
    root: &u32,
    ordering: &[u32],
) -> Option<GenId> {
    let g = &c.generators[cyc as usize];
    let group = g.closed_symmetry().ok()?;
    for (p, _) in &group {
        if p[*root as usize] == 0 {
            let moved: Vec<u32> = ordering.iter().map(|l| p[*l as usize]).collect();
            if let Some(Some((id, _))) = uncolored.lookup.get(&(cyc, moved)) {
                return Some(*id);
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// theta_presentation
// ---------------------------------------------------------------------------

/// The symmetric 2-colored presentation of the colored dioperad: all
/// admissible colorings of the cyclic generators, all colorings of the
/// cyclic relations, plus the recoloring relations.
pub fn theta_presentation(
    c: &CyclicPresentation,
    rule: &ColoringRule,
) -> Result<(ColoredTables, SymmetricPresentation), ThetaError> {
    rule.closure_check(8).map_err(|(m, n)| ThetaError::ClosureViolated { m, n })?;
    let uncolored = uncolored_tables(c)?;
    let tables = colored_tables(c, rule, &uncolored)?;
    let mut relations: Vec<SymRelation> = Vec::new();

    // Colorings of the cyclic relations.
    for rel in &c.relations {
        let n = rel.terms.first().map(|(_, t)| t.leaf_count()).unwrap_or(0);
        // Enumerate leaf colorings and root color; internal orientations are
        // enumerated per term inside colorize_all.
        for mask in 0..(1u32 << n) {
            let leaf_colors: Vec<Color> = (0..n)
                .map(|i| if mask & (1 << i) != 0 { Color::Dotted } else { Color::Straight })
                .collect();
            for root_color in [Color::Straight, Color::Dotted] {
                let mut terms: Vec<(Coefficient, SymTree)> = Vec::new();
                for (coeff, tree) in &rel.terms {
                    // All internal orientations of this term; every
                    // admissible one is a valid representative, and they are
                    // pairwise equal through the recoloring relations, so
                    // take the first.
                    let mut colored = colorize_all(tree, &tables, &leaf_colors, root_color);
                    colored.sort();
                    if let Some((sign, node)) = colored.into_iter().next() {
                        let c2 = if sign >= 0 { coeff.clone() } else { -coeff.clone() };
                        terms.push((c2, SymTree { node }));
                    }
                }
                if !terms.is_empty() {
                    relations.push(SymRelation {
                        name: format!("{}_{}{}", rel.name, mask, root_color.letter()),
                        terms,
                    });
                }
            }
        }
    }

    // Recoloring relations: both internal orientations of every two-vertex
    // composite, as symmetric relations.
    relations.extend(recoloring_relations(c, &tables)?);

    let exp = ColoredExpansion::from_tables(tables.generators.clone(), tables.slot_perm.clone());
    Ok((
        tables,
        SymmetricPresentation { expansion: exp, relations, order_kind: OrderKind::PathLex },
    ))
}

/// All admissible colored symmetric trees over a cyclic tree with the given
/// leaf and root colors: one per internal-edge orientation choice.
fn colorize_all(
    tree: &CycNode,
    tables: &ColoredTables,
    leaf_colors: &[Color],
    root_color: Color,
) -> Vec<(i8, Node)> {
    fn go(
        node: &CycNode,
        tables: &ColoredTables,
        leaf_colors: &[Color],
        out_color: Color,
    ) -> Vec<(i8, Node)> {
        match node {
            CycNode::Leaf(l) => {
                if leaf_colors[(*l - 1) as usize] == out_color {
                    vec![(1, Node::Leaf(*l))]
                } else {
                    Vec::new()
                }
            }
            CycNode::Vertex { gen, children } => {
                let k = children.len();
                // Each child gets a color: leaves forced by leaf_colors,
                // internal edges free.
                let child_color_choices: Vec<Vec<Color>> = children
                    .iter()
                    .map(|c| match c {
                        CycNode::Leaf(l) => vec![leaf_colors[(*l - 1) as usize]],
                        _ => vec![Color::Straight, Color::Dotted],
                    })
                    .collect();
                let mut out = Vec::new();
                let mut idx = vec![0usize; k];
                loop {
                    let slot_colors: Vec<Color> =
                        idx.iter().enumerate().map(|(i, j)| child_color_choices[i][*j]).collect();
                    // ordering = legs 1..k in order; root leg 0.
                    let ordering: Vec<u32> = (1..=k as u32).collect();
                    if let Some((id, sign)) =
                        tables.lookup_colored(*gen, 0, &ordering, out_color, &slot_colors)
                    {
                        // Recurse into children with their chosen colors.
                        let mut parts: Vec<Vec<(i8, Node)>> = Vec::with_capacity(k);
                        let mut dead = false;
                        for (i, c) in children.iter().enumerate() {
                            let sub = go(c, tables, leaf_colors, slot_colors[i]);
                            if sub.is_empty() {
                                dead = true;
                                break;
                            }
                            parts.push(sub);
                        }
                        if !dead {
                            let mut pick = vec![0usize; k];
                            loop {
                                let mut total = sign;
                                let mut kids = Vec::with_capacity(k);
                                for (i, p) in pick.iter().enumerate() {
                                    let (s, n) = &parts[i][*p];
                                    total *= s;
                                    kids.push(n.clone());
                                }
                                out.push((total, Node::Vertex { gen: id, children: kids }));
                                let mut i = 0;
                                loop {
                                    if i == k {
                                        break;
                                    }
                                    pick[i] += 1;
                                    if pick[i] < parts[i].len() {
                                        break;
                                    }
                                    pick[i] = 0;
                                    i += 1;
                                }
                                if i == k {
                                    break;
                                }
                            }
                        }
                    }
                    let mut i = 0;
                    loop {
                        if i == k {
                            break;
                        }
                        idx[i] += 1;
                        if idx[i] < child_color_choices[i].len() {
                            break;
                        }
                        idx[i] = 0;
                        i += 1;
                    }
                    if i == k {
                        break;
                    }
                }
                out
            }
        }
    }
    go(tree, tables, leaf_colors, root_color)
}

/// The recoloring relations: for every two-vertex composite and admissible
/// coloring of its free legs, the two internal orientations are equal.
fn recoloring_relations(
    c: &CyclicPresentation,
    tables: &ColoredTables,
) -> Result<Vec<SymRelation>, ThetaError> {
    let mut out = Vec::new();
    for (g1, gen1) in c.generators.iter().enumerate() {
        let k1 = gen1.legs as usize - 1;
        for (g2, gen2) in c.generators.iter().enumerate() {
            let k2 = gen2.legs as usize - 1;
            for slot in 0..k1 {
                // Composite: vertex1's child `slot` is vertex2.
                let n = k1 - 1 + k2;
                let children: Vec<CycNode> = (0..k1)
                    .map(|s| {
                        if s == slot {
                            CycNode::Vertex {
                                gen: g2 as u32,
                                children: (0..k2)
                                    .map(|j| {
                                        CycNode::Leaf((s + j + 1) as u32)
                                    })
                                    .collect(),
                            }
                        } else if s < slot {
                            CycNode::Leaf((s + 1) as u32)
                        } else {
                            CycNode::Leaf((s + k2) as u32)
                        }
                    })
                    .collect();
                let tree = CycNode::Vertex { gen: g1 as u32, children };
                for mask in 0..(1u32 << n) {
                    let leaf_colors: Vec<Color> = (0..n)
                        .map(|i| {
                            if mask & (1 << i) != 0 {
                                Color::Dotted
                            } else {
                                Color::Straight
                            }
                        })
                        .collect();
                    for root_color in [Color::Straight, Color::Dotted] {
                        let colored = colorize_all(&tree, tables, &leaf_colors, root_color);
                        if colored.len() == 2 {
                            let (s1, m1) = &colored[0];
                            let (s2, m2) = &colored[1];
                            let c1 = if *s1 >= 0 {
                                Coefficient::one()
                            } else {
                                -Coefficient::one()
                            };
                            let c2 = if *s2 >= 0 {
                                -Coefficient::one()
                            } else {
                                Coefficient::one()
                            };
                            out.push(SymRelation {
                                name: format!("recolor_{g1}_{slot}_{g2}_{mask}{}",
                                    root_color.letter()),
                                terms: vec![
                                    (c1, SymTree { node: m1.clone() }),
                                    (c2, SymTree { node: m2.clone() }),
                                ],
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Caterpillar machinery
// ---------------------------------------------------------------------------

/// True when no internal vertex has two or more internal-edge children.
pub fn is_caterpillar(t: &TreeMonomial) -> bool {
    fn go(n: &Node) -> bool {
        match n {
            Node::Leaf(_) => true,
            Node::Vertex { children, .. } => {
                let internal = children.iter().filter(|c| !c.is_leaf()).count();
                internal <= 1 && children.iter().all(go)
            }
        }
    }
    go(&t.root)
}

/// A shape class: a monomial over the uncolored generators together with
/// the colors of its leaves and root (internal edge colors erased).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeClass {
    pub stripped: TreeMonomial,
    pub leaf_colors: Vec<Color>,
    pub root_color: Color,
}

/// All admissible colorings of a shape over the colored tables, with signs.
pub fn admissible_colorings(
    shape: &ShapeClass,
    uncolored: &UncoloredTables,
    tables: &ColoredTables,
) -> Vec<(i8, TreeMonomial)> {
    fn go(
        n: &Node,
        out_color: Color,
        shape: &ShapeClass,
        uncolored: &UncoloredTables,
        tables: &ColoredTables,
    ) -> Vec<(i8, Node)> {
        match n {
            Node::Leaf(l) => {
                if shape.leaf_colors[(*l - 1) as usize] == out_color {
                    vec![(1, Node::Leaf(*l))]
                } else {
                    Vec::new()
                }
            }
            Node::Vertex { gen, children } => {
                let (cyc, ordering) = uncolored.rep_of(*gen).clone();
                let k = children.len();
                let child_choices: Vec<Vec<Color>> = children
                    .iter()
                    .map(|c| match c {
                        Node::Leaf(l) => vec![shape.leaf_colors[(*l - 1) as usize]],
                        _ => vec![Color::Straight, Color::Dotted],
                    })
                    .collect();
                let mut result = Vec::new();
                let mut idx = vec![0usize; k];
                loop {
                    let slot_colors: Vec<Color> =
                        idx.iter().enumerate().map(|(i, j)| child_choices[i][*j]).collect();
                    if let Some((id, sign)) =
                        tables.lookup_colored(cyc, 0, &ordering, out_color, &slot_colors)
                    {
                        let mut parts: Vec<Vec<(i8, Node)>> = Vec::with_capacity(k);
                        let mut dead = false;
                        for (i, c) in children.iter().enumerate() {
                            let sub = go(c, slot_colors[i], shape, uncolored, tables);
                            if sub.is_empty() {
                                dead = true;
                                break;
                            }
                            parts.push(sub);
                        }
                        if !dead {
                            let mut pick = vec![0usize; k];
                            loop {
                                let mut total = sign;
                                let mut kids = Vec::with_capacity(k);
                                for (i, p) in pick.iter().enumerate() {
                                    let (s, node) = &parts[i][*p];
                                    total *= s;
                                    kids.push(node.clone());
                                }
                                result.push((total, Node::Vertex { gen: id, children: kids }));
                                let mut i = 0;
                                loop {
                                    if i == k {
                                        break;
                                    }
                                    pick[i] += 1;
                                    if pick[i] < parts[i].len() {
                                        break;
                                    }
                                    pick[i] = 0;
                                    i += 1;
                                }
                                if i == k {
                                    break;
                                }
                            }
                        }
                    }
                    let mut i = 0;
                    loop {
                        if i == k {
                            break;
                        }
                        idx[i] += 1;
                        if idx[i] < child_choices[i].len() {
                            break;
                        }
                        idx[i] = 0;
                        i += 1;
                    }
                    if i == k {
                        break;
                    }
                }
                result
            }
        }
    }
    go(&shape.stripped.root, shape.root_color, shape, uncolored, tables)
        .into_iter()
        .map(|(s, n)| (s, TreeMonomial::new(n, Mode::Shuffle)))
        .collect()
}

/// The unique admissible coloring with the maximal number of straight
/// internal edges. Errors when the shape is not caterpillar or admits no
/// coloring; asserts uniqueness of the maximum.
pub fn max_coloring(
    shape: &ShapeClass,
    uncolored: &UncoloredTables,
    tables: &ColoredTables,
) -> Result<(i8, TreeMonomial), ThetaError> {
    if !is_caterpillar(&shape.stripped) {
        return Err(ThetaError::NonCaterpillar(format!("{:?}", shape.stripped)));
    }
    let all = admissible_colorings(shape, uncolored, tables);
    if all.is_empty() {
        return Err(ThetaError::NoAdmissibleColoring(format!("{:?}", shape.stripped)));
    }
    let straight_count = |t: &TreeMonomial| {
        t.internal_edge_colors(&tables.generators)
            .iter()
            .filter(|c| **c == Color::Straight)
            .count()
    };
    let best = all.iter().map(|(_, t)| straight_count(t)).max().unwrap();
    let winners: Vec<&(i8, TreeMonomial)> =
        all.iter().filter(|(_, t)| straight_count(t) == best).collect();
    debug_assert_eq!(winners.len(), 1, "caterpillar shape classes have a unique supremum");
    Ok(winners[0].clone())
}

// ---------------------------------------------------------------------------
// theta_rules
// ---------------------------------------------------------------------------

/// A cyclic presentation together with a convergent caterpillar rewriting
/// system for its uncolored shuffle image.
pub struct CyclicSystem {
    pub cyclic: CyclicPresentation,
    pub system: Presentation,
}

/// Build the colored rewriting system: recoloring rules (oriented to
/// increase straight edges) plus one rule per (cyclic rule, leaf/root
/// coloring, internal coloring) rewriting to the maximal colorings of the
/// right-hand side. Certified by the (shape rank, dotted edge) measure.
pub fn theta_rules(s: &CyclicSystem, rule: &ColoringRule) -> Result<Presentation, ThetaError> {
    rule.closure_check(8).map_err(|(m, n)| ThetaError::ClosureViolated { m, n })?;
    let uncolored = uncolored_tables(&s.cyclic)?;
    if uncolored.generators != s.system.generators {
        return Err(ThetaError::GeneratorMismatch(
            "the rewriting system must be over the cyclic presentation's uncolored generators"
                .into(),
        ));
    }
    let tables = colored_tables(&s.cyclic, rule, &uncolored)?;
    let gens = tables.generators.clone();
    let mut rules: Vec<RewriteRule> = Vec::new();
    let mut seen_lhs: BTreeSet<TreeMonomial> = BTreeSet::new();

    // Recoloring rules: for every weight-2 colored monomial with a dotted
    // internal edge whose shape admits a straighter coloring, rewrite to the
    // maximal coloring of its own shape.
    let strip_map: Vec<GenId> = tables.strip.clone();
    let weight2 = crate::rewrite::all_weight_two_monomials(&gens, Mode::Shuffle);
    for m in weight2 {
        if m.dotted_internal_edges(&gens) == 0 {
            continue;
        }
        let shape = ShapeClass {
            stripped: crate::presentation::strip_monomial(&m, &strip_map),
            leaf_colors: m.signature(&gens).expect("vertex monomial").inputs,
            root_color: m.signature(&gens).expect("vertex monomial").output,
        };
        let all = admissible_colorings(&shape, &uncolored, &tables);
        // Find this monomial and the maximal one.
        let this = all.iter().find(|(_, t)| *t == m);
        let Some((s_this, _)) = this else { continue };
        let (s_max, m_max) = match max_coloring(&shape, &uncolored, &tables) {
            Ok(v) => v,
            Err(_) => continue,
        };
        if m_max == m {
            continue;
        }
        let sign = s_this * s_max;
        let rhs = Polynomial::term(
            if sign >= 0 { Coefficient::one() } else { -Coefficient::one() },
            m_max,
        );
        if seen_lhs.insert(m.clone()) {
            rules.push(RewriteRule { name: format!("recolor{}", rules.len() + 1), lhs: m, rhs });
        }
    }

    // Caterpillar rules: colorings of each cyclic rule.
    for r in &s.system.rules {
        let tau = &r.lhs;
        let n = tau.leaf_count();
        for (_, mt) in r.rhs.terms() {
            if !is_caterpillar(mt) {
                return Err(ThetaError::NonCaterpillar(crate::trees::format_term(
                    mt,
                    &s.system.generators,
                )));
            }
        }
        for mask in 0..(1u32 << n) {
            let leaf_colors: Vec<Color> = (0..n)
                .map(|i| if mask & (1 << i) != 0 { Color::Dotted } else { Color::Straight })
                .collect();
            for root_color in [Color::Straight, Color::Dotted] {
                let lhs_shape = ShapeClass {
                    stripped: tau.clone(),
                    leaf_colors: leaf_colors.clone(),
                    root_color,
                };
                let lhs_colorings = colored_instances(&lhs_shape, &uncolored, &tables);
                if lhs_colorings.is_empty() {
                    continue;
                }
                // Right-hand side: maximal coloring of each term; a term
                // with no admissible coloring vanishes from this instance.
                let mut rhs_terms: Vec<(Coefficient, i8, TreeMonomial)> = Vec::new();
                for (coeff, mt) in r.rhs.terms() {
                    let shape = ShapeClass {
                        stripped: mt.clone(),
                        leaf_colors: leaf_colors.clone(),
                        root_color,
                    };
                    match max_coloring(&shape, &uncolored, &tables) {
                        Ok((sgn, mono)) => rhs_terms.push((coeff.clone(), sgn, mono)),
                        Err(ThetaError::NoAdmissibleColoring(_)) => {}
                        Err(e) => return Err(e),
                    }
                }
                for (s_lhs, lhs) in lhs_colorings {
                    if seen_lhs.contains(&lhs) {
                        continue;
                    }
                    let raw: Vec<(Coefficient, TreeMonomial)> = rhs_terms
                        .iter()
                        .map(|(c, sgn, m)| {
                            let total = s_lhs * *sgn;
                            let c2 = if total >= 0 { c.clone() } else { -c.clone() };
                            (c2, m.clone())
                        })
                        .collect();
                    let rhs = crate::presentation::canonicalize_polynomial(raw, &gens)
                        .map_err(|e| ThetaError::Expansion(e.to_string()))?;
                    seen_lhs.insert(lhs.clone());
                    rules.push(RewriteRule {
                        name: format!("{}_{}{}", r.name, mask, root_color.letter()),
                        lhs,
                        rhs,
                    });
                }
            }
        }
    }

    let order_kind = match &s.system.certificate {
        Certificate::Order(o) => o.kind,
        _ => OrderKind::PathLex,
    };
    let p = Presentation {
        mode: Mode::Shuffle,
        generators: gens,
        rules,
        certificate: Certificate::Measure(vec![
            MeasureKind::ShapeRank(order_kind),
            MeasureKind::DottedInternalEdges,
        ]),
    };
    crate::presentation::validate_presentation(&p)
        .map_err(|e| ThetaError::Expansion(e.to_string()))?;
    Ok(p)
}

/// All colored instances of a shape (not only the maximum).
fn colored_instances(
    shape: &ShapeClass,
    uncolored: &UncoloredTables,
    tables: &ColoredTables,
) -> Vec<(i8, TreeMonomial)> {
    admissible_colorings(shape, uncolored, tables)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coloring_rules_closed() {
        for rule in [
            ColoringRule::PositivePositive,
            ColoringRule::NonnegPositive,
            ColoringRule::NonnegNonneg,
            ColoringRule::OutputsOne,
            ColoringRule::Equal,
        ] {
            assert!(rule.closure_check(8).is_ok(), "{rule:?} must be closed");
        }
    }

    #[test]
    fn caterpillar_detection() {
        use crate::trees::{parse_term, GeneratorSymbol};
        let gens = vec![GeneratorSymbol::new(
            "m",
            vec![Color::Straight, Color::Straight],
            Color::Straight,
        )];
        let comb = parse_term("m(m(1,2),3)", &gens, Mode::Shuffle).unwrap();
        assert!(is_caterpillar(&comb));
        let right = parse_term("m(1,m(2,3))", &gens, Mode::Shuffle).unwrap();
        assert!(is_caterpillar(&right));
        let cherry = parse_term("m(m(1,2),m(3,4))", &gens, Mode::Shuffle).unwrap();
        assert!(!is_caterpillar(&cherry));
        assert!(is_caterpillar(&TreeMonomial::identity(Mode::Shuffle)));
    }
}
