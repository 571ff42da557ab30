//! Reduction to normal form, overlap enumeration, S-polynomial confluence
//! checking, Buchberger-style completion, and the leading-monomial operad.

use crate::par::{self, Parallelism};
use crate::presentation::{
    canonicalize_polynomial, orient_relation, replace, Certificate, Coefficient, Polynomial,
    Presentation, RewriteRule,
};
use crate::trees::{
    find_divisors, Color, Embedding, GenId, GeneratorSymbol, Mode, Node,
    TreeMonomial,
};

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

pub const DEFAULT_STEP_BUDGET: u64 = 1_000_000;

/// One reduction step: rewrite exactly one redex occurrence, chosen
/// deterministically (order-largest reducible monomial, then lexicographically
/// smallest embedding image, then lowest rule index).
pub fn reduce_step(p: &Polynomial, pres: &Presentation) -> (Polynomial, bool) {
    let gens = &pres.generators;
    // Candidate monomials in selection order.
    let mut terms: Vec<usize> = (0..p.terms().len()).collect();
    if let Certificate::Order(order) = &pres.certificate {
        terms.sort_by(|a, b| {
            order.compare(&p.terms()[*b].1, &p.terms()[*a].1, gens)
        });
    }
    for ti in terms {
        let (coeff, mono) = &p.terms()[ti];
        let mut best: Option<(Vec<usize>, usize, Embedding)> = None;
        for (ri, rule) in pres.rules.iter().enumerate() {
            for emb in find_divisors(mono, &rule.lhs, gens) {
                let key = emb.image_set();
                let better = match &best {
                    None => true,
                    Some((bkey, bri, _)) => (key.clone(), ri) < (bkey.clone(), *bri),
                };
                if better {
                    best = Some((key, ri, emb));
                }
            }
        }
        if let Some((_, ri, emb)) = best {
            let rule = &pres.rules[ri];
            let replaced = replace(mono, &rule.lhs, &emb, &rule.rhs, gens)
                .expect("rule instance matches signature");
            if cfg!(debug_assertions) {
                for (_, m) in replaced.terms() {
                    debug_assert_eq!(
                        pres.certificate_compare(m, mono).unwrap_or(Ordering::Less),
                        Ordering::Less,
                        "certificate must strictly decrease on every reduction"
                    );
                }
            }
            let mut raw: Vec<(Coefficient, TreeMonomial)> = p
                .terms()
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != ti)
                .map(|(_, t)| t.clone())
                .collect();
            for (c, m) in replaced.terms() {
                raw.push((coeff * c, m.clone()));
            }
            let out = canonicalize_polynomial(raw, gens).expect("reduction stays in one block");
            return (out, true);
        }
    }
    (p.clone(), false)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BudgetExhausted {
    pub partial: Polynomial,
    pub steps: u64,
}

impl fmt::Display for BudgetExhausted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step budget exhausted after {} reductions", self.steps)
    }
}

impl std::error::Error for BudgetExhausted {}

/// Reduce to the fixpoint of `reduce_step`. With a valid termination
/// certificate the fixpoint is reached well before any sane budget.
pub fn normal_form(
    p: &Polynomial,
    pres: &Presentation,
    budget: u64,
) -> Result<Polynomial, BudgetExhausted> {
    let mut cur = p.clone();
    for step in 0..budget {
        let (next, applied) = reduce_step(&cur, pres);
        if !applied {
            return Ok(next);
        }
        cur = next;
        let _ = step;
    }
    // One more probe: if already irreducible we were done exactly at budget.
    let (next, applied) = reduce_step(&cur, pres);
    if !applied {
        return Ok(next);
    }
    Err(BudgetExhausted { partial: cur, steps: budget })
}

// ---------------------------------------------------------------------------
// Overlaps
// ---------------------------------------------------------------------------

/// A monomial covered by two overlapping rule left-hand sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Overlap {
    pub host: TreeMonomial,
    pub rule_a: usize,
    pub emb_a: Embedding,
    pub rule_b: usize,
    pub emb_b: Embedding,
}

/// Undecorated host shape produced by superimposing two patterns.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Shape {
    Slot(Color),
    Vertex { gen: GenId, children: Vec<Shape> },
}

fn pattern_shape(n: &Node, gens: &[GeneratorSymbol], slot_color: Color) -> Shape {
    match n {
        Node::Leaf(_) => Shape::Slot(slot_color),
        Node::Vertex { gen, children } => Shape::Vertex {
            gen: *gen,
            children: children
                .iter()
                .enumerate()
                .map(|(s, c)| pattern_shape(c, gens, gens[gen.idx()].signature.inputs[s]))
                .collect(),
        },
    }
}

/// Superimpose pattern `b` with its root aligned at the shape node `a`;
/// None when the trees disagree on a shared vertex.
fn merge_shapes(a: &Shape, b: &Shape) -> Option<Shape> {
    match (a, b) {
        (Shape::Slot(ca), Shape::Slot(cb)) => {
            if ca == cb {
                Some(Shape::Slot(*ca))
            } else {
                None
            }
        }
        (Shape::Slot(ca), Shape::Vertex { gen, children }) => {
            // b extends below a hanging slot; colors must agree.
            let _ = (ca, gen, children);
            Some(b.clone())
        }
        (Shape::Vertex { .. }, Shape::Slot(_)) => Some(a.clone()),
        (
            Shape::Vertex { gen: ga, children: ca },
            Shape::Vertex { gen: gb, children: cb },
        ) => {
            if ga != gb || ca.len() != cb.len() {
                return None;
            }
            let mut children = Vec::with_capacity(ca.len());
            for (x, y) in ca.iter().zip(cb.iter()) {
                children.push(merge_shapes(x, y)?);
            }
            Some(Shape::Vertex { gen: *ga, children })
        }
    }
}

/// Replace the subtree at preorder vertex `at` of shape `a` by the merge of
/// that subtree with shape `b`.
fn overlay_at(a: &Shape, at: usize, b: &Shape) -> Option<Shape> {
    fn go(a: &Shape, at: usize, b: &Shape, next: &mut usize) -> Option<Option<Shape>> {
        match a {
            Shape::Slot(_) => Some(None),
            Shape::Vertex { gen, children } => {
                let id = *next;
                *next += 1;
                if id == at {
                    return merge_shapes(a, b).map(|m| Some(m));
                }
                let mut new_children = Vec::with_capacity(children.len());
                let mut changed = false;
                for c in children {
                    match go(c, at, b, next)? {
                        Some(nc) => {
                            new_children.push(nc);
                            changed = true;
                        }
                        None => new_children.push(c.clone()),
                    }
                }
                if changed {
                    Some(Some(Shape::Vertex { gen: *gen, children: new_children }))
                } else {
                    Some(None)
                }
            }
        }
    }
    let mut next = 0;
    match go(a, at, b, &mut next) {
        Some(Some(s)) => Some(s),
        Some(None) => None,
        None => None,
    }
}

fn shape_vertex_count(s: &Shape) -> usize {
    match s {
        Shape::Slot(_) => 0,
        Shape::Vertex { children, .. } => {
            1 + children.iter().map(shape_vertex_count).sum::<usize>()
        }
    }
}

fn shape_root_color(s: &Shape, gens: &[GeneratorSymbol]) -> Option<Color> {
    match s {
        Shape::Slot(c) => Some(*c),
        Shape::Vertex { gen, .. } => Some(gens[gen.idx()].signature.output),
    }
}

/// All shuffle (or planar) labelings of a decorated shape.
fn labelings_of_shape(shape: &Shape, mode: Mode, gens: &[GeneratorSymbol]) -> Vec<TreeMonomial> {
    // Count slots.
    fn slots(s: &Shape) -> usize {
        match s {
            Shape::Slot(_) => 1,
            Shape::Vertex { children, .. } => children.iter().map(slots).sum(),
        }
    }
    let n = slots(shape);
    let labels: Vec<u32> = (1..=n as u32).collect();
    fn go(s: &Shape, labels: &[u32], mode: Mode) -> Vec<Node> {
        match s {
            Shape::Slot(_) => {
                if labels.len() == 1 {
                    vec![Node::Leaf(labels[0])]
                } else {
                    Vec::new()
                }
            }
            Shape::Vertex { gen, children } => {
                let k = children.len();
                let per_child: Vec<usize> = children.iter().map(slots).collect();
                let mut out = Vec::new();
                // Distribute the label set into blocks of fixed sizes with the
                // mode's ordering condition.
                let blocks = sized_partitions(labels, &per_child, mode);
                for blockset in blocks {
                    let mut choices: Vec<Vec<Node>> = Vec::with_capacity(k);
                    let mut dead = false;
                    for (c, b) in children.iter().zip(blockset.iter()) {
                        let v = go(c, b, mode);
                        if v.is_empty() {
                            dead = true;
                            break;
                        }
                        choices.push(v);
                    }
                    if dead {
                        continue;
                    }
                    let mut idx = vec![0usize; k];
                    loop {
                        let kids: Vec<Node> =
                            idx.iter().enumerate().map(|(s, i)| choices[s][*i].clone()).collect();
                        out.push(Node::Vertex { gen: *gen, children: kids });
                        let mut s = 0;
                        loop {
                            if s == k {
                                break;
                            }
                            idx[s] += 1;
                            if idx[s] < choices[s].len() {
                                break;
                            }
                            idx[s] = 0;
                            s += 1;
                        }
                        if s == k {
                            break;
                        }
                    }
                }
                out
            }
        }
    }
    let _ = gens;
    go(shape, &labels, mode).into_iter().map(|n| TreeMonomial::new(n, mode)).collect()
}

/// Partitions of a sorted label set into blocks of prescribed sizes, with
/// strictly increasing minima (shuffle) or consecutive runs (planar).
fn sized_partitions(labels: &[u32], sizes: &[usize], mode: Mode) -> Vec<Vec<Vec<u32>>> {
    match mode {
        Mode::Planar => {
            let mut at = 0;
            let mut blocks = Vec::new();
            for s in sizes {
                blocks.push(labels[at..at + s].to_vec());
                at += s;
            }
            vec![blocks]
        }
        Mode::Shuffle => {
            let mut out = Vec::new();
            fn go(
                remaining: &[u32],
                sizes: &[usize],
                last_min: u32,
                acc: &mut Vec<Vec<u32>>,
                out: &mut Vec<Vec<Vec<u32>>>,
            ) {
                if sizes.is_empty() {
                    if remaining.is_empty() {
                        out.push(acc.clone());
                    }
                    return;
                }
                let size = sizes[0];
                // Block must contain remaining[0]? No: block minima increase,
                // so the first block always takes the overall minimum.
                let min = remaining[0];
                if min <= last_min {
                    return;
                }
                // Choose size-1 further elements from the rest.
                let rest: Vec<u32> = remaining[1..].to_vec();
                let mut combo = vec![0usize; size - 1];
                fn choose(
                    rest: &[u32],
                    k: usize,
                    start: usize,
                    combo: &mut Vec<usize>,
                    depth: usize,
                    min: u32,
                    sizes: &[usize],
                    acc: &mut Vec<Vec<u32>>,
                    out: &mut Vec<Vec<Vec<u32>>>,
                ) {
                    if depth == k {
                        let chosen: BTreeSet<usize> = combo[..k].iter().cloned().collect();
                        let mut block = vec![min];
                        let mut remaining2 = Vec::new();
                        for (i, v) in rest.iter().enumerate() {
                            if chosen.contains(&i) {
                                block.push(*v);
                            } else {
                                remaining2.push(*v);
                            }
                        }
                        acc.push(block);
                        go(&remaining2, &sizes[1..], min, acc, out);
                        acc.pop();
                        return;
                    }
                    for i in start..rest.len() {
                        combo[depth] = i;
                        choose(rest, k, i + 1, combo, depth + 1, min, sizes, acc, out);
                    }
                }
                choose(&rest, size - 1, 0, &mut combo, 0, min, sizes, acc, out);
            }
            go(labels, sizes, 0, &mut Vec::new(), &mut out);
            out
        }
    }
}

/// Enumerate all overlap ambiguities between two rules: hosts carrying an
/// occurrence of each lhs such that the occurrences share a vertex and
/// jointly cover the host. Inclusion ambiguities are included; for a rule
/// against itself the identity overlap is excluded.
pub fn enumerate_overlaps(
    pres: &Presentation,
    rule_a: usize,
    rule_b: usize,
) -> Vec<Overlap> {
    let gens = &pres.generators;
    let a = &pres.rules[rule_a].lhs;
    let b = &pres.rules[rule_b].lhs;
    let mut seen: BTreeSet<(TreeMonomial, Vec<usize>, Vec<usize>)> = BTreeSet::new();
    let mut out = Vec::new();

    let consider = |host: TreeMonomial,
                        seen: &mut BTreeSet<(TreeMonomial, Vec<usize>, Vec<usize>)>,
                        out: &mut Vec<Overlap>| {
        let embs_a = find_divisors(&host, a, gens);
        let embs_b = find_divisors(&host, b, gens);
        let total = host.vertex_count();
        for ea in &embs_a {
            for eb in &embs_b {
                if rule_a == rule_b && ea.vertex_map >= eb.vertex_map {
                    continue;
                }
                let sa: BTreeSet<usize> = ea.vertex_map.iter().cloned().collect();
                let sb: BTreeSet<usize> = eb.vertex_map.iter().cloned().collect();
                if sa.intersection(&sb).next().is_none() {
                    continue;
                }
                if sa.union(&sb).count() != total {
                    continue;
                }
                let key = (host.clone(), ea.vertex_map.clone(), eb.vertex_map.clone());
                if seen.insert(key) {
                    out.push(Overlap {
                        host: host.clone(),
                        rule_a,
                        emb_a: ea.clone(),
                        rule_b,
                        emb_b: eb.clone(),
                    });
                }
            }
        }
    };

    // Superimpose b's root at every vertex of a, and a's root at every
    // vertex of b.
    let out_color =
        |t: &TreeMonomial| t.signature(gens).map(|s| s.output).unwrap_or(Color::Straight);
    let shape_a = pattern_shape(&a.root, gens, out_color(a));
    let shape_b = pattern_shape(&b.root, gens, out_color(b));
    let mut hosts: BTreeSet<Shape> = BTreeSet::new();
    for at in 0..shape_vertex_count(&shape_a) {
        if let Some(s) = overlay_at(&shape_a, at, &shape_b) {
            // Root color compatibility when b roots below a slot is implicit:
            // overlay at a vertex always shares that vertex.
            if shape_root_color(&s, gens).is_some() {
                hosts.insert(s);
            }
        }
    }
    for at in 0..shape_vertex_count(&shape_b) {
        if let Some(s) = overlay_at(&shape_b, at, &shape_a) {
            hosts.insert(s);
        }
    }
    for shape in hosts {
        for host in labelings_of_shape(&shape, pres.mode, gens) {
            if crate::trees::validate(&host, gens).is_ok() {
                consider(host, &mut seen, &mut out);
            }
        }
    }
    out
}

/// The S-polynomial of an overlap: the difference of its two one-step
/// reductions, canonicalized.
pub fn s_polynomial(o: &Overlap, pres: &Presentation) -> Polynomial {
    let gens = &pres.generators;
    let ra = &pres.rules[o.rule_a];
    let rb = &pres.rules[o.rule_b];
    let via_a = replace(&o.host, &ra.lhs, &o.emb_a, &ra.rhs, gens).expect("overlap instance");
    let via_b = replace(&o.host, &rb.lhs, &o.emb_b, &rb.rhs, gens).expect("overlap instance");
    via_a.sub(&via_b, gens)
}

#[derive(Clone, Debug)]
pub struct ConfluenceFailure {
    pub overlap: Overlap,
    pub residual: Polynomial,
    pub budget_hit: bool,
}

#[derive(Clone, Debug)]
pub struct ConfluenceReport {
    pub overlaps_checked: usize,
    pub failures: Vec<ConfluenceFailure>,
    pub step_budget_hit: bool,
}

impl ConfluenceReport {
    pub fn confluent(&self) -> bool {
        self.failures.is_empty() && !self.step_budget_hit
    }
}

/// Enumerate every pairwise overlap and reduce its S-polynomial.
pub fn check_confluence(pres: &Presentation, budget: u64, par: Parallelism) -> ConfluenceReport {
    let mut overlaps = Vec::new();
    for i in 0..pres.rules.len() {
        for j in i..pres.rules.len() {
            overlaps.extend(enumerate_overlaps(pres, i, j));
        }
    }
    let overlaps_checked = overlaps.len();
    let results = par::map_items(par, overlaps, |o| {
        let s = s_polynomial(&o, pres);
        match normal_form(&s, pres, budget) {
            Ok(nf) if nf.is_zero() => None,
            Ok(nf) => Some(ConfluenceFailure { overlap: o, residual: nf, budget_hit: false }),
            Err(b) => {
                Some(ConfluenceFailure { overlap: o, residual: b.partial, budget_hit: true })
            }
        }
    });
    let failures: Vec<ConfluenceFailure> = results.into_iter().flatten().collect();
    let step_budget_hit = failures.iter().any(|f| f.budget_hit);
    ConfluenceReport { overlaps_checked, failures, step_budget_hit }
}

#[derive(Clone, Debug)]
pub enum CompleteError {
    NeedsOrderCertificate,
    MaxRoundsExceeded { partial: Presentation },
    Budget(BudgetExhausted),
}

impl fmt::Display for CompleteError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompleteError::NeedsOrderCertificate => {
                write!(f, "completion requires an order certificate")
            }
            CompleteError::MaxRoundsExceeded { .. } => write!(f, "completion rounds exhausted"),
            CompleteError::Budget(b) => write!(f, "{b}"),
        }
    }
}

/// Buchberger-style completion: repeatedly add reduced nonzero S-polynomials
/// as rules oriented by the order, with lhs weight at most `max_weight`.
/// Returns the enlarged presentation and whether closure was reached (false
/// when some S-polynomial above the weight bound stayed nonzero).
pub fn complete(
    pres: &Presentation,
    max_weight: u32,
    max_rounds: u32,
    par: Parallelism,
) -> Result<(Presentation, bool), CompleteError> {
    let order = match &pres.certificate {
        Certificate::Order(o) => o.clone(),
        _ => return Err(CompleteError::NeedsOrderCertificate),
    };
    let mut cur = pres.clone();
    let mut skipped_beyond_bound = false;
    for _round in 0..max_rounds {
        let mut overlaps = Vec::new();
        for i in 0..cur.rules.len() {
            for j in i..cur.rules.len() {
                overlaps.extend(enumerate_overlaps(&cur, i, j));
            }
        }
        let cur_ref = &cur;
        let residuals: Vec<Polynomial> = par::map_items(par, overlaps, |o| {
            let s = s_polynomial(&o, cur_ref);
            normal_form(&s, cur_ref, DEFAULT_STEP_BUDGET)
                .unwrap_or_else(|b| b.partial)
        })
        .into_iter()
        .filter(|p| !p.is_zero())
        .collect();
        if residuals.is_empty() {
            return Ok((cur, !skipped_beyond_bound));
        }
        let mut added = false;
        for r in residuals {
            // Re-reduce against rules added this round.
            let r = normal_form(&r, &cur, DEFAULT_STEP_BUDGET).map_err(CompleteError::Budget)?;
            if r.is_zero() {
                continue;
            }
            let name = format!("c{}", cur.rules.len() + 1);
            let rule = orient_relation(&r, &order, &cur.generators, name)
                .expect("nonzero polynomial orients");
            if rule.lhs.weight(&cur.generators) > max_weight {
                skipped_beyond_bound = true;
                continue;
            }
            cur.rules.push(rule);
            added = true;
        }
        if !added {
            return Ok((cur, !skipped_beyond_bound));
        }
    }
    Err(CompleteError::MaxRoundsExceeded { partial: cur })
}

/// The associated monomial operad: every rule becomes lhs -> 0.
pub fn leading_monomial_operad(pres: &Presentation) -> Presentation {
    Presentation {
        mode: pres.mode,
        generators: pres.generators.clone(),
        rules: pres
            .rules
            .iter()
            .map(|r| RewriteRule {
                name: r.name.clone(),
                lhs: r.lhs.clone(),
                rhs: Polynomial::zero(),
            })
            .collect(),
        certificate: pres.certificate.clone(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DualError {
    NotMonomial(String),
    NotQuadratic(String),
}

impl fmt::Display for DualError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DualError::NotMonomial(r) => write!(f, "rule '{r}' has a nonzero right-hand side"),
            DualError::NotQuadratic(r) => write!(f, "rule '{r}' is not quadratic"),
        }
    }
}

/// All weight-2 monomials over the generator table, grouped in generation
/// order: every composition of two generators at every slot and labeling.
pub fn all_weight_two_monomials(gens: &[GeneratorSymbol], mode: Mode) -> Vec<TreeMonomial> {
    let mut out = Vec::new();
    for (go_idx, outer) in gens.iter().enumerate() {
        if outer.arity() == 0 {
            continue;
        }
        for slot in 0..outer.arity() {
            for (gi_idx, inner) in gens.iter().enumerate() {
                if inner.arity() == 0
                    || inner.signature.output != outer.signature.inputs[slot]
                {
                    continue;
                }
                let n = outer.arity() + inner.arity() - 1;
                let labels: Vec<u32> = (1..=n as u32).collect();
                let sizes: Vec<usize> = (0..outer.arity())
                    .map(|s| if s == slot { inner.arity() } else { 1 })
                    .collect();
                for blocks in sized_partitions(&labels, &sizes, mode) {
                    let children: Vec<Node> = blocks
                        .iter()
                        .enumerate()
                        .map(|(s, b)| {
                            if s == slot {
                                Node::Vertex {
                                    gen: GenId(gi_idx as u32),
                                    children: b.iter().map(|l| Node::Leaf(*l)).collect(),
                                }
                            } else {
                                Node::Leaf(b[0])
                            }
                        })
                        .collect();
                    let t = TreeMonomial::new(
                        Node::Vertex { gen: GenId(go_idx as u32), children },
                        mode,
                    );
                    debug_assert!(crate::trees::validate(&t, gens).is_ok());
                    out.push(t);
                }
            }
        }
    }
    out
}

/// Quadratic monomial dual: same generators, relations replaced by the
/// complement within all weight-2 monomials of each signature.
pub fn monomial_quadratic_dual(pres: &Presentation) -> Result<Presentation, DualError> {
    for r in &pres.rules {
        if !r.rhs.is_zero() {
            return Err(DualError::NotMonomial(r.name.clone()));
        }
        if r.lhs.weight(&pres.generators) != 2 {
            return Err(DualError::NotQuadratic(r.name.clone()));
        }
    }
    let lhs_set: BTreeSet<&TreeMonomial> = pres.rules.iter().map(|r| &r.lhs).collect();
    let mut rules = Vec::new();
    for m in all_weight_two_monomials(&pres.generators, pres.mode) {
        if !lhs_set.contains(&m) {
            rules.push(RewriteRule {
                name: format!("d{}", rules.len() + 1),
                lhs: m,
                rhs: Polynomial::zero(),
            });
        }
    }
    Ok(Presentation {
        mode: pres.mode,
        generators: pres.generators.clone(),
        rules,
        certificate: pres.certificate.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    const COM: &str = "\noperad shuffle\norder pathlex\ngen m : (ss) -> s\nrule r1 : m(m(1,2),3) -> 1 * m(1,m(2,3))\nrule r2 : m(m(1,3),2) -> 1 * m(1,m(2,3))\n";

    const ASSOC_PLANAR: &str = "\noperad planar\norder pathlex\ngen m : (ss) -> s\nrule assoc : m(m(1,2),3) -> 1 * m(1,m(2,3))\n";

    #[test]
    fn irreducible_unchanged() {
        let p = parse_presentation(COM).unwrap();
        let t = Polynomial::monomial(p.parse_term("m(1,m(2,3))").unwrap());
        let (out, applied) = reduce_step(&t, &p);
        assert!(!applied);
        assert_eq!(out, t);
    }

    #[test]
    fn normal_form_zero() {
        let p = parse_presentation(COM).unwrap();
        assert!(normal_form(&Polynomial::zero(), &p, 10).unwrap().is_zero());
    }

    #[test]
    fn planar_assoc_pentagon_confluent() {
        let p = parse_presentation(ASSOC_PLANAR).unwrap();
        let report = check_confluence(&p, 1000, Parallelism::Sequential);
        assert!(report.overlaps_checked >= 1);
        assert!(report.confluent());
    }

    #[test]
    fn com_is_confluent() {
        let p = parse_presentation(COM).unwrap();
        let report = check_confluence(&p, 1000, Parallelism::Sequential);
        assert!(report.confluent());
    }

    #[test]
    fn disjoint_signatures_no_overlap() {
        let text = "\noperad shuffle\norder pathlex\ngen m : (ss) -> s\ngen w : (dd) -> d\nrule a : m(m(1,2),3) -> 1 * m(1,m(2,3))\nrule b : w(w(1,2),3) -> 1 * w(1,w(2,3))\n";
        let p = parse_presentation(text).unwrap();
        assert!(enumerate_overlaps(&p, 0, 1).is_empty());
    }

    #[test]
    fn already_confluent_complete_unchanged() {
        let p = parse_presentation(COM).unwrap();
        let (q, closed) = complete(&p, 4, 10, Parallelism::Sequential).unwrap();
        assert!(closed);
        assert_eq!(q.rules.len(), p.rules.len());
    }

    #[test]
    fn dual_of_empty_is_everything() {
        let text = "\noperad shuffle\norder pathlex\ngen m : (ss) -> s\n";
        let p = parse_presentation(text).unwrap();
        let d = monomial_quadratic_dual(&p).unwrap();
        assert_eq!(d.rules.len(), 3);
        let dd = monomial_quadratic_dual(&leading_monomial_operad(&d)).unwrap();
        assert!(dd.rules.is_empty());
    }

    #[test]
    fn dual_is_involutive() {
        let p = parse_presentation(COM).unwrap();
        let m = leading_monomial_operad(&p);
        let d = monomial_quadratic_dual(&m).unwrap();
        assert_eq!(d.rules.len(), 1);
        let dd = monomial_quadratic_dual(&d).unwrap();
        let lhs_m: BTreeSet<_> = m.rules.iter().map(|r| r.lhs.clone()).collect();
        let lhs_dd: BTreeSet<_> = dd.rules.iter().map(|r| r.lhs.clone()).collect();
        assert_eq!(lhs_m, lhs_dd);
    }

    #[test]
    fn shuffle_lie_self_overlap_matches_naive() {
        // Anti-symmetric bracket: b(1,b(2,3)) -> b(b(1,2),3) - b(b(1,3),2).
        let text = "\noperad shuffle\norder revpathlex\ngen b : (ss) -> s\nrule jac : b(1,b(2,3)) -> 1 * b(b(1,2),3) - 1 * b(b(1,3),2)\n";
        let p = parse_presentation(text).unwrap();
        let overlaps = enumerate_overlaps(&p, 0, 0);
        // Naive search: all weight-3 monomials carrying two distinct
        // embeddings of the lhs that share a vertex and cover everything.
        let sig = crate::trees::AritySignature::new(vec![Color::Straight; 4], Color::Straight);
        let all = crate::hilbert::enumerate_monomials(&p, &sig, 3, false);
        let mut naive = 0;
        for host in &all {
            let embs = find_divisors(&host, &p.rules[0].lhs, &p.generators);
            for (i, ea) in embs.iter().enumerate() {
                for eb in embs.iter().skip(i + 1) {
                    let sa: BTreeSet<usize> = ea.vertex_map.iter().cloned().collect();
                    let sb: BTreeSet<usize> = eb.vertex_map.iter().cloned().collect();
                    if sa.intersection(&sb).next().is_some()
                        && sa.union(&sb).count() == host.vertex_count()
                    {
                        naive += 1;
                    }
                }
            }
        }
        assert_eq!(overlaps.len(), naive);
        assert!(naive > 0);
        // And the system is confluent (shuffle Lie).
        let report = check_confluence(&p, 10_000, Parallelism::Sequential);
        assert!(report.confluent());
    }
}
