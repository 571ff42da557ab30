//! The built-in corpus: presentations of the dioperads studied by the
//! library. Dioperadic entries are stored in the dioperad block format and
//! expanded on demand; colored entries derived from cyclic operads are
//! produced by the coloring machinery; the remaining entries are literal
//! presentation files.

use crate::presentation::{parse_presentation, Presentation};
use crate::psi::{self, DioperadPresentation};
use crate::theta::{
    self, ColoringRule, CycNode, CyclicGenerator, CyclicPresentation, CyclicRelation,
    CyclicSystem,
};
use crate::trees::{MonomialOrder, OrderKind};
use num_rational::BigRational;
use num_traits::One;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Mutex;

pub const CORPUS_NAMES: [&str; 15] = [
    "frob",
    "lieb",
    "lieb_tri",
    "v_d",
    "w_d",
    "w_dual",
    "qpois_dual",
    "theta_lie",
    "theta_assoc",
    "plieb_dual",
    "qlieb_dual",
    "com_shuffle",
    "lie_shuffle",
    "assoc_planar",
    "com2_cyclic",
];

#[derive(Clone, Debug)]
pub enum CorpusError {
    Unknown(String),
    Build(String),
}

impl fmt::Display for CorpusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorpusError::Unknown(n) => write!(f, "unknown corpus entry '{n}'"),
            CorpusError::Build(m) => write!(f, "corpus construction failed: {m}"),
        }
    }
}

impl std::error::Error for CorpusError {}

fn build_err(e: impl fmt::Display) -> CorpusError {
    CorpusError::Build(e.to_string())
}

// ---------------------------------------------------------------------------
// Dioperad sources
// ---------------------------------------------------------------------------

/// Frobenius: symmetric multiplication and cosymmetric comultiplication;
/// associativity, coassociativity, and the Frobenius compatibilities.
const FROB_DIOPERAD: &str = "\
dioperad
order pathlex
dgen m : (2,1) sym (21; -; 1)
dgen w : (1,2) sym (-; 21; 1)
drel assoc1 : 1 * dtree{ a=m; b=m; edge a.out 1 -> b.in 1; in a.in 1 = 1; in a.in 2 = 2; in b.in 2 = 3; out b.out 1 = 1 } - 1 * dtree{ a=m; b=m; edge a.out 1 -> b.in 1; in a.in 1 = 2; in a.in 2 = 3; in b.in 2 = 1; out b.out 1 = 1 } = 0
drel assoc2 : 1 * dtree{ a=m; b=m; edge a.out 1 -> b.in 1; in a.in 1 = 1; in a.in 2 = 2; in b.in 2 = 3; out b.out 1 = 1 } - 1 * dtree{ a=m; b=m; edge a.out 1 -> b.in 1; in a.in 1 = 3; in a.in 2 = 1; in b.in 2 = 2; out b.out 1 = 1 } = 0
drel coassoc1 : 1 * dtree{ a=w; b=w; edge a.out 1 -> b.in 1; in a.in 1 = 1; out b.out 1 = 1; out b.out 2 = 2; out a.out 2 = 3 } - 1 * dtree{ a=w; b=w; edge a.out 1 -> b.in 1; in a.in 1 = 1; out b.out 1 = 2; out b.out 2 = 3; out a.out 2 = 1 } = 0
drel coassoc2 : 1 * dtree{ a=w; b=w; edge a.out 1 -> b.in 1; in a.in 1 = 1; out b.out 1 = 1; out b.out 2 = 2; out a.out 2 = 3 } - 1 * dtree{ a=w; b=w; edge a.out 1 -> b.in 1; in a.in 1 = 1; out b.out 1 = 3; out b.out 2 = 1; out a.out 2 = 2 } = 0
drel frob1 : 1 * dtree{ a=m; b=w; edge a.out 1 -> b.in 1; in a.in 1 = 1; in a.in 2 = 2; out b.out 1 = 1; out b.out 2 = 2 } - 1 * dtree{ v=w; u=m; edge v.out 1 -> u.in 2; in u.in 1 = 1; in v.in 1 = 2; out u.out 1 = 1; out v.out 2 = 2 } = 0
drel frob2 : 1 * dtree{ a=m; b=w; edge a.out 1 -> b.in 1; in a.in 1 = 1; in a.in 2 = 2; out b.out 1 = 1; out b.out 2 = 2 } - 1 * dtree{ v=w; u=m; edge v.out 2 -> u.in 2; in u.in 1 = 1; in v.in 1 = 2; out v.out 1 = 1; out u.out 1 = 2 } = 0
";

/// Lie bialgebras: antisymmetric bracket and cobracket; Jacobi, co-Jacobi,
/// and the cocycle compatibility relation.
const LIEB_DIOPERAD: &str = "\
dioperad
order revpathlex
dgen b : (2,1) sym (21; -; -1)
dgen c : (1,2) sym (-; 21; -1)
drel jac : 1 * dtree{ a=b; r=b; edge a.out 1 -> r.in 1; in a.in 1 = 1; in a.in 2 = 2; in r.in 2 = 3; out r.out 1 = 1 } + 1 * dtree{ a=b; r=b; edge a.out 1 -> r.in 1; in a.in 1 = 2; in a.in 2 = 3; in r.in 2 = 1; out r.out 1 = 1 } + 1 * dtree{ a=b; r=b; edge a.out 1 -> r.in 1; in a.in 1 = 3; in a.in 2 = 1; in r.in 2 = 2; out r.out 1 = 1 } = 0
drel cojac : 1 * dtree{ a=c; r=c; edge a.out 1 -> r.in 1; in a.in 1 = 1; out r.out 1 = 1; out r.out 2 = 2; out a.out 2 = 3 } + 1 * dtree{ a=c; r=c; edge a.out 1 -> r.in 1; in a.in 1 = 1; out r.out 1 = 2; out r.out 2 = 3; out a.out 2 = 1 } + 1 * dtree{ a=c; r=c; edge a.out 1 -> r.in 1; in a.in 1 = 1; out r.out 1 = 3; out r.out 2 = 1; out a.out 2 = 2 } = 0
drel cocycle : 1 * dtree{ v=b; w=c; edge v.out 1 -> w.in 1; in v.in 1 = 1; in v.in 2 = 2; out w.out 1 = 1; out w.out 2 = 2 } - 1 * dtree{ w=c; v=b; edge w.out 1 -> v.in 2; in v.in 1 = 1; in w.in 1 = 2; out v.out 1 = 1; out w.out 2 = 2 } - 1 * dtree{ w=c; v=b; edge w.out 2 -> v.in 2; in v.in 1 = 1; in w.in 1 = 2; out w.out 1 = 1; out v.out 1 = 2 } + 1 * dtree{ w=c; v=b; edge w.out 1 -> v.in 2; in v.in 1 = 2; in w.in 1 = 1; out v.out 1 = 1; out w.out 2 = 2 } + 1 * dtree{ w=c; v=b; edge w.out 2 -> v.in 2; in v.in 1 = 2; in w.in 1 = 1; out w.out 1 = 1; out v.out 1 = 2 } = 0
";

/// Triangular Lie bialgebras: the colored Jacobi rules and the Yang-Baxter
/// rule, a Groebner basis for the reverse path-lexicographic order.
const LIEB_TRI: &str = "\
operad shuffle
order revpathlex b_ss b_ds b_sd u
gen b_ss : (ss) -> s
gen b_ds : (ds) -> d
gen b_sd : (sd) -> d
gen u : (d) -> s
rule jac_s : b_ss(1,b_ss(2,3)) -> 1 * b_ss(b_ss(1,2),3) - 1 * b_ss(b_ss(1,3),2)
rule jac_d1 : b_sd(1,b_sd(2,3)) -> 1 * b_sd(b_ss(1,2),3) - 1 * b_ds(b_sd(1,3),2)
rule jac_d2 : b_sd(1,b_ds(2,3)) -> 1 * b_ds(b_sd(1,2),3) - 1 * b_sd(b_ss(1,3),2)
rule jac_d3 : b_ds(1,b_ss(2,3)) -> 1 * b_ds(b_ds(1,2),3) - 1 * b_ds(b_ds(1,3),2)
rule yb : u(b_ds(1,u(2))) -> 1 * b_ss(u(1),u(2)) - 1 * u(b_sd(u(1),2))
";

/// Tradler-Zeinalian V: planar associative structure with a copairing that
/// slides across the multiplication.
const V_D: &str = "\
operad planar
order quantumpath
gen a : (ss) -> s
gen b : (ds) -> d
gen c : (sd) -> d
gen u : (d) -> s deg 1
rule r1 : a(a(1,2),3) -> 1 * a(1,a(2,3))
rule r2 : b(b(1,2),3) -> 1 * b(1,a(2,3))
rule r3 : b(c(1,2),3) -> 1 * c(1,b(2,3))
rule r4 : c(a(1,2),3) -> 1 * c(1,c(2,3))
rule r5 : u(b(1,2)) -> 1 * a(u(1),2)
rule r6 : u(c(1,2)) -> 1 * a(1,u(2))
";

/// The W variant: the copairing is antisymmetric, putting a sign on the two
/// sliding rules.
const W_D: &str = "\
operad planar
order quantumpath
gen a : (ss) -> s
gen b : (ds) -> d
gen c : (sd) -> d
gen u : (d) -> s deg 1
rule r1 : a(a(1,2),3) -> 1 * a(1,a(2,3))
rule r2 : b(b(1,2),3) -> 1 * b(1,a(2,3))
rule r3 : b(c(1,2),3) -> 1 * c(1,b(2,3))
rule r4 : c(a(1,2),3) -> 1 * c(1,c(2,3))
rule r5 : u(b(1,2)) -> - 1 * a(u(1),2)
rule r6 : u(c(1,2)) -> - 1 * a(1,u(2))
";

const ASSOC_PLANAR: &str = "\
operad planar
order pathlex
gen m : (ss) -> s
rule assoc : m(m(1,2),3) -> 1 * m(1,m(2,3))
";

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

fn qpois_dual_dioperad() -> DioperadPresentation {
    use psi::{DioperadGenerator, DioperadRelation, DioperadTree, SymmetryElement};
    let mut p = DioperadGenerator::new("p", 2, 2);
    p.symmetry.push(SymmetryElement { in_perm: vec![2, 1], out_perm: vec![1, 2], sign: 1 });
    p.symmetry.push(SymmetryElement { in_perm: vec![1, 2], out_perm: vec![2, 1], sign: -1 });

    // T(sigma|tau): two p's composed along a.out2 -> b.in1, free inputs
    // (a.in1, a.in2, b.in2) and free outputs (a.out1, b.out1, b.out2).
    let tree = |ins: [u32; 3], outs: [u32; 3]| DioperadTree {
        vertices: vec![0, 0],
        edges: vec![((0, 2), (1, 1))],
        free_inputs: vec![((0, 1), ins[0]), ((0, 2), ins[1]), ((1, 2), ins[2])]
            .into_iter()
            .collect(),
        free_outputs: vec![((0, 1), outs[0]), ((1, 1), outs[1]), ((1, 2), outs[2])]
            .into_iter()
            .collect(),
    };
    let perms3: [[u32; 3]; 6] =
        [[1, 2, 3], [1, 3, 2], [2, 1, 3], [2, 3, 1], [3, 1, 2], [3, 2, 1]];
    let sgn = |p: &[u32; 3]| -> i64 {
        let mut inv = 0;
        for i in 0..3 {
            for j in i + 1..3 {
                if p[i] > p[j] {
                    inv += 1;
                }
            }
        }
        if inv % 2 == 0 {
            1
        } else {
            -1
        }
    };
    let mut relations = Vec::new();
    for ins in &perms3 {
        for outs in &perms3 {
            if *ins == [1, 2, 3] && *outs == [1, 2, 3] {
                continue;
            }
            let sign = BigRational::from_integer(sgn(outs).into());
            relations.push(DioperadRelation {
                name: format!(
                    "prop_{}{}{}_{}{}{}",
                    ins[0], ins[1], ins[2], outs[0], outs[1], outs[2]
                ),
                terms: vec![
                    (BigRational::one(), tree(*ins, *outs)),
                    (-sign, tree([1, 2, 3], [1, 2, 3])),
                ],
            });
        }
    }
    DioperadPresentation { generators: vec![p], relations, order_kind: OrderKind::PathLex }
}

fn left_comb(gen: u32, x: u32, y: u32, z: u32) -> CycNode {
    CycNode::Vertex {
        gen,
        children: vec![
            CycNode::Vertex { gen, children: vec![CycNode::Leaf(x), CycNode::Leaf(y)] },
            CycNode::Leaf(z),
        ],
    }
}

fn right_comb(gen: u32, x: u32, y: u32, z: u32) -> CycNode {
    CycNode::Vertex {
        gen,
        children: vec![
            CycNode::Leaf(x),
            CycNode::Vertex { gen, children: vec![CycNode::Leaf(y), CycNode::Leaf(z)] },
        ],
    }
}

fn com_cyclic() -> CyclicPresentation {
    // Fully symmetric binary generator with associativity.
    let mut m = CyclicGenerator::new("m", 3);
    m.symmetry.push((vec![0, 2, 1], 1));
    m.symmetry.push((vec![1, 2, 0], 1));
    let assoc = CyclicRelation {
        name: "assoc".into(),
        terms: vec![
            (BigRational::one(), left_comb(0, 1, 2, 3)),
            (-BigRational::one(), right_comb(0, 1, 2, 3)),
        ],
    };
    CyclicPresentation { generators: vec![m], relations: vec![assoc] }
}

fn lie_cyclic() -> CyclicPresentation {
    // Anti-symmetric bracket, cyclically invariant (the sign character).
    let mut b = CyclicGenerator::new("b", 3);
    b.symmetry.push((vec![0, 2, 1], -1));
    b.symmetry.push((vec![1, 2, 0], 1));
    let jac = CyclicRelation {
        name: "jac".into(),
        terms: vec![
            (BigRational::one(), left_comb(0, 1, 2, 3)),
            (BigRational::one(), left_comb(0, 2, 3, 1)),
            (BigRational::one(), left_comb(0, 3, 1, 2)),
        ],
    };
    CyclicPresentation { generators: vec![b], relations: vec![jac] }
}

fn assoc_cyclic() -> CyclicPresentation {
    // Non-symmetric multiplication with only the cyclic rotation.
    let mut a = CyclicGenerator::new("a", 3);
    a.symmetry.push((vec![1, 2, 0], 1));
    let assoc = CyclicRelation {
        name: "assoc".into(),
        terms: vec![
            (BigRational::one(), left_comb(0, 1, 2, 3)),
            (-BigRational::one(), right_comb(0, 1, 2, 3)),
        ],
    };
    CyclicPresentation { generators: vec![a], relations: vec![assoc] }
}

fn com2_cyclic() -> CyclicPresentation {
    // Fully symmetric ternary generator; all binary self-compositions agree.
    let mut t = CyclicGenerator::new("t", 4);
    t.symmetry.push((vec![0, 2, 1, 3], 1));
    t.symmetry.push((vec![0, 1, 3, 2], 1));
    t.symmetry.push((vec![1, 2, 3, 0], 1));
    let comp = |at: usize| {
        let mut children = Vec::new();
        let mut next = 1u32;
        for s in 0..3 {
            if s == at {
                children.push(CycNode::Vertex {
                    gen: 0,
                    children: vec![
                        CycNode::Leaf(next),
                        CycNode::Leaf(next + 1),
                        CycNode::Leaf(next + 2),
                    ],
                });
                next += 3;
            } else {
                children.push(CycNode::Leaf(next));
                next += 1;
            }
        }
        CycNode::Vertex { gen: 0, children }
    };
    let rel = |name: &str, i: usize, j: usize| CyclicRelation {
        name: name.into(),
        terms: vec![(BigRational::one(), comp(i)), (-BigRational::one(), comp(j))],
    };
    CyclicPresentation {
        generators: vec![t],
        relations: vec![rel("odd_assoc1", 0, 1), rel("odd_assoc2", 1, 2)],
    }
}

/// Build the convergent uncolored system of a cyclic presentation: expand
/// the relations, orient by the given order, and deduplicate. The corpus
/// systems are quadratic Groebner bases, verified by the test suite.
fn derived_cyclic_system(
    c: CyclicPresentation,
    kind: OrderKind,
) -> Result<CyclicSystem, CorpusError> {
    let tables = theta::uncolored_tables(&c).map_err(build_err)?;
    let polys = theta::uncolored_relations(&c, &tables).map_err(build_err)?;
    let order = MonomialOrder::declaration(kind, &tables.generators);
    let rules =
        crate::presentation::orient_relations_block(&polys, &order, &tables.generators, "r");
    let system = Presentation {
        mode: crate::trees::Mode::Shuffle,
        generators: tables.generators.clone(),
        rules,
        certificate: crate::presentation::Certificate::Order(order),
    };
    crate::presentation::validate_presentation(&system).map_err(build_err)?;
    Ok(CyclicSystem { cyclic: c, system })
}

/// Quadratic Poisson dual: the equal-arity coloring of the odd commutative
/// operad (the paper's model, up to the output sign twist that changes no
/// dimension or leading-term datum). Every two quadratic monomials of one
/// signature represent the same one-dimensional cyclic component, so the
/// relations are exactly the blockwise equalities, oriented to the smallest
/// monomial.
fn qpois_dual_presentation() -> Result<Presentation, CorpusError> {
    let c = com2_cyclic();
    let uncolored = theta::uncolored_tables(&c).map_err(build_err)?;
    let tables = theta::colored_tables(&c, &ColoringRule::Equal, &uncolored).map_err(build_err)?;
    let gens = tables.generators.clone();
    let order = MonomialOrder::declaration(OrderKind::PathLex, &gens);
    let mut blocks: BTreeMap<crate::trees::AritySignature, Vec<crate::trees::TreeMonomial>> =
        BTreeMap::new();
    for m in crate::rewrite::all_weight_two_monomials(&gens, crate::trees::Mode::Shuffle) {
        blocks.entry(m.signature(&gens).expect("vertex monomial")).or_default().push(m);
    }
    let mut rules = Vec::new();
    for (_, mut monos) in blocks {
        monos.sort_by(|a, b| order.compare(a, b, &gens));
        let min = monos[0].clone();
        for m in monos.into_iter().skip(1) {
            rules.push(crate::presentation::RewriteRule {
                name: format!("r{}", rules.len() + 1),
                lhs: m,
                rhs: crate::presentation::Polynomial::monomial(min.clone()),
            });
        }
    }
    let p = Presentation {
        mode: crate::trees::Mode::Shuffle,
        generators: gens,
        rules,
        certificate: crate::presentation::Certificate::Order(order),
    };
    crate::presentation::validate_presentation(&p).map_err(build_err)?;
    Ok(p)
}

/// A named cyclic system usable by the coloring functor: `com`, `lie`,
/// `assoc`, `com2`.
pub fn cyclic_system(name: &str) -> Result<CyclicSystem, CorpusError> {
    match name {
        "com" => derived_cyclic_system(com_cyclic(), OrderKind::PathLex),
        "lie" => derived_cyclic_system(lie_cyclic(), OrderKind::RevPathLex),
        "assoc" => derived_cyclic_system(assoc_cyclic(), OrderKind::RevPathLex),
        "com2" => derived_cyclic_system(com2_cyclic(), OrderKind::PathLex),
        other => Err(CorpusError::Unknown(other.into())),
    }
}

/// The dioperad-format source of an entry, when it has one.
pub fn corpus_dioperad(name: &str) -> Result<DioperadPresentation, CorpusError> {
    match name {
        "frob" => psi::parse_dioperad(FROB_DIOPERAD).map_err(build_err),
        "lieb" => psi::parse_dioperad(LIEB_DIOPERAD).map_err(build_err),
        "qpois_dual" => Ok(qpois_dual_dioperad()),
        other => Err(CorpusError::Unknown(other.into())),
    }
}

fn build(name: &str) -> Result<Presentation, CorpusError> {
    match name {
        "frob" | "lieb" => psi::expand(&corpus_dioperad(name)?).map_err(build_err),
        "qpois_dual" => qpois_dual_presentation(),
        "lieb_tri" => parse_presentation(LIEB_TRI).map_err(build_err),
        "v_d" => parse_presentation(V_D).map_err(build_err),
        "w_d" => parse_presentation(W_D).map_err(build_err),
        "w_dual" => {
            // The quadratic dual swaps the copairing degree d for 1-d; the
            // rules and dimensions are unchanged.
            let mut p = parse_presentation(W_D).map_err(build_err)?;
            for g in &mut p.generators {
                if g.name == "u" {
                    g.hdegree = 0;
                }
            }
            Ok(p)
        }
        "theta_lie" => {
            let s = cyclic_system("lie")?;
            theta::theta_rules(&s, &ColoringRule::PositivePositive).map_err(build_err)
        }
        "theta_assoc" => {
            let s = cyclic_system("assoc")?;
            theta::theta_rules(&s, &ColoringRule::PositivePositive).map_err(build_err)
        }
        "plieb_dual" => {
            let s = cyclic_system("com")?;
            theta::theta_rules(&s, &ColoringRule::NonnegNonneg).map_err(build_err)
        }
        "qlieb_dual" => {
            let s = cyclic_system("com")?;
            theta::theta_rules(&s, &ColoringRule::NonnegPositive).map_err(build_err)
        }
        "com_shuffle" => Ok(cyclic_system("com")?.system),
        "lie_shuffle" => Ok(cyclic_system("lie")?.system),
        "com2_cyclic" => Ok(cyclic_system("com2")?.system),
        "assoc_planar" => parse_presentation(ASSOC_PLANAR).map_err(build_err),
        other => Err(CorpusError::Unknown(other.into())),
    }
}

static CACHE: Mutex<BTreeMap<String, Presentation>> = Mutex::new(BTreeMap::new());

/// Look up a corpus entry by name.
pub fn corpus(name: &str) -> Result<Presentation, CorpusError> {
    if let Some(p) = CACHE.lock().unwrap().get(name) {
        return Ok(p.clone());
    }
    let built = build(name)?;
    CACHE.lock().unwrap().insert(name.to_string(), built.clone());
    Ok(built)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::par::Parallelism;
    use crate::rewrite::{self, check_confluence};

    #[test]
    fn frob_expands_to_six_generators() {
        let p = corpus("frob").unwrap();
        assert_eq!(p.generators.len(), 6);
        // One normal form survives per admissible signature class: the 54
        // weight-2 monomials lose 14, leaving 40 oriented rules.
        assert_eq!(p.rules.len(), 40);
        let names: Vec<&str> = p.generators.iter().map(|g| g.name.as_str()).collect();
        assert_eq!(names, ["m_ss_s", "m_sd_d", "w_sd_s", "m_ds_d", "w_ds_s", "w_dd_d"]);
    }

    #[test]
    fn lieb_expands_to_fourteen_rules() {
        let p = corpus("lieb").unwrap();
        assert_eq!(p.generators.len(), 6);
        assert_eq!(p.rules.len(), 14);
        for r in &p.rules {
            let crate::trees::Node::Vertex { children, .. } = &r.lhs.root else { panic!() };
            assert!(children[0].is_leaf(), "lieb leading terms are right combs");
        }
    }

    #[test]
    fn lieb_tri_parses() {
        let p = corpus("lieb_tri").unwrap();
        assert_eq!(p.generators.len(), 4);
        assert_eq!(p.rules.len(), 5);
    }

    #[test]
    fn lie_shuffle_is_single_rule() {
        let p = corpus("lie_shuffle").unwrap();
        assert_eq!(p.generators.len(), 1);
        assert_eq!(p.rules.len(), 1);
        assert!(check_confluence(&p, 10_000, Parallelism::Sequential).confluent());
    }

    #[test]
    fn com_shuffle_is_two_rules() {
        let p = corpus("com_shuffle").unwrap();
        assert_eq!(p.generators.len(), 1);
        assert_eq!(p.rules.len(), 2);
        assert!(check_confluence(&p, 10_000, Parallelism::Sequential).confluent());
    }

    #[test]
    fn assoc_system_is_confluent_with_comb_normal_forms() {
        let s = cyclic_system("assoc").unwrap();
        assert_eq!(s.system.generators.len(), 2);
        assert_eq!(s.system.rules.len(), 6);
        assert!(check_confluence(&s.system, 10_000, Parallelism::Sequential).confluent());
        use crate::hilbert::enumerate_monomials;
        use crate::trees::{AritySignature, Color};
        for n in 3..=4usize {
            let sig = AritySignature::new(vec![Color::Straight; n], Color::Straight);
            for m in enumerate_monomials(&s.system, &sig, n as u32 - 1, true) {
                assert!(crate::theta::is_caterpillar(&m));
            }
        }
    }

    #[test]
    fn com2_has_nine_rules() {
        let p = corpus("com2_cyclic").unwrap();
        assert_eq!(p.generators.len(), 1);
        assert_eq!(p.rules.len(), 9);
        assert!(check_confluence(&p, 10_000, Parallelism::Sequential).confluent());
    }

    #[test]
    fn qpois_dual_expands() {
        let p = corpus("qpois_dual").unwrap();
        assert_eq!(p.generators.len(), 6);
        assert!(!p.rules.is_empty());
    }

    #[test]
    fn plieb_dual_has_eight_generators() {
        let p = corpus("plieb_dual").unwrap();
        assert_eq!(p.generators.len(), 8);
    }

    #[test]
    fn qlieb_dual_has_seven_generators() {
        let p = corpus("qlieb_dual").unwrap();
        assert_eq!(p.generators.len(), 7);
    }

    #[test]
    fn serialization_roundtrip_all_entries() {
        for name in CORPUS_NAMES {
            let p = corpus(name).unwrap();
            let text = crate::presentation::serialize_presentation(&p);
            let q = parse_presentation(&text)
                .unwrap_or_else(|e| panic!("{name} failed roundtrip: {e}"));
            assert_eq!(p, q, "{name} roundtrip");
        }
    }

    #[test]
    fn rewrite_dual_examples() {
        // gr(frob) leading terms complement the normal forms; its quadratic
        // dual has one relation (the surviving normal form) per class.
        let frob = corpus("frob").unwrap();
        let gr = rewrite::leading_monomial_operad(&frob);
        let dual = rewrite::monomial_quadratic_dual(&gr).unwrap();
        assert_eq!(dual.rules.len(), 14);
        let dd = rewrite::monomial_quadratic_dual(&dual).unwrap();
        let lhs_gr: std::collections::BTreeSet<_> =
            gr.rules.iter().map(|r| r.lhs.clone()).collect();
        let lhs_dd: std::collections::BTreeSet<_> =
            dd.rules.iter().map(|r| r.lhs.clone()).collect();
        assert_eq!(lhs_gr, lhs_dd);
    }
}
