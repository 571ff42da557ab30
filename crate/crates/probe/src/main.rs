use dioperad::corpus::corpus;
use dioperad::hilbert::enumerate_monomials;
use dioperad::rewrite::all_weight_two_monomials;
use dioperad::trees::{find_divisors, AritySignature, Color, Mode, Node, TreeMonomial};
use std::cmp::Ordering;
use std::collections::BTreeMap;

fn depth_seq(t: &TreeMonomial) -> Vec<usize> {
    fn go(n: &Node, d: usize, out: &mut Vec<(u32, usize)>) {
        match n {
            Node::Leaf(l) => out.push((*l, d)),
            Node::Vertex { children, .. } => children.iter().for_each(|c| go(c, d + 1, out)),
        }
    }
    let mut v = Vec::new();
    go(&t.root, 0, &mut v);
    v.sort();
    v.into_iter().map(|(_, d)| d).collect()
}

fn words(t: &TreeMonomial) -> Vec<Vec<u32>> {
    fn go(n: &Node, path: &mut Vec<u32>, out: &mut Vec<(u32, Vec<u32>)>) {
        match n {
            Node::Leaf(l) => out.push((*l, path.clone())),
            Node::Vertex { gen, children } => {
                path.push(gen.0);
                children.iter().for_each(|c| go(c, path, out));
                path.pop();
            }
        }
    }
    let mut v = Vec::new();
    go(&t.root, &mut Vec::new(), &mut v);
    v.sort();
    v.into_iter().map(|(_, w)| w).collect()
}

fn cmp_variant(variant: u32, a: &TreeMonomial, b: &TreeMonomial) -> Ordering {
    let deglex = |x: &Vec<u32>, y: &Vec<u32>| x.len().cmp(&y.len()).then_with(|| x.cmp(y));
    let wordcmp = |a: &TreeMonomial, b: &TreeMonomial| {
        for (x, y) in words(a).iter().zip(words(b).iter()) {
            let c = deglex(x, y);
            if c != Ordering::Equal {
                return c;
            }
        }
        Ordering::Equal
    };
    let sigma = |t: &TreeMonomial| t.planar_leaf_order();
    let c = match variant {
        0 => wordcmp(a, b).then_with(|| sigma(a).cmp(&sigma(b))),
        1 => sigma(a).cmp(&sigma(b)).then_with(|| wordcmp(a, b)),
        2 => depth_seq(a)
            .cmp(&depth_seq(b))
            .then_with(|| sigma(a).cmp(&sigma(b)))
            .then_with(|| wordcmp(a, b)),
        3 => depth_seq(a)
            .cmp(&depth_seq(b))
            .then_with(|| wordcmp(a, b))
            .then_with(|| sigma(a).cmp(&sigma(b))),
        4 => sigma(a).cmp(&sigma(b)).reverse().then_with(|| wordcmp(a, b)),
        _ => unreachable!(),
    };
    c.then_with(|| a.cmp(b))
}

fn all_sigs(n: usize) -> Vec<AritySignature> {
    let mut v = Vec::new();
    for mask in 0..(1u32 << n) {
        for out in [Color::Straight, Color::Dotted] {
            let inputs: Vec<Color> = (0..n)
                .map(|i| if mask & (1 << i) != 0 { Color::Dotted } else { Color::Straight })
                .collect();
            v.push(AritySignature::new(inputs, out));
        }
    }
    v
}

fn main() {
    let p = corpus("qpois_dual").unwrap();
    let gens = &p.generators;
    let w2 = all_weight_two_monomials(gens, Mode::Shuffle);
    for variant in 0..5u32 {
        // block minima at weight 2
        let mut blocks: BTreeMap<AritySignature, Vec<TreeMonomial>> = BTreeMap::new();
        for m in &w2 {
            blocks.entry(m.signature(gens).unwrap()).or_default().push(m.clone());
        }
        let mut non_min: Vec<TreeMonomial> = Vec::new();
        for (_, mut monos) in blocks {
            monos.sort_by(|a, b| cmp_variant(variant, a, b));
            non_min.extend(monos.into_iter().skip(1));
        }
        // weight-3 blocks: count irreducibles (no non-min divisor)
        let mut bad = 0;
        let mut total = 0;
        let mut worst = 0;
        for sig in all_sigs(7) {
            let monos = enumerate_monomials(&p, &sig, 3, false);
            if monos.is_empty() {
                continue;
            }
            total += 1;
            let irr = monos
                .iter()
                .filter(|m| non_min.iter().all(|pat| find_divisors(m, pat, gens).is_empty()))
                .count();
            if irr != 1 {
                bad += 1;
                worst = worst.max(irr);
            }
        }
        println!("variant {variant}: rules={} weight-3 blocks={total} bad={bad} worst-irr={worst}", non_min.len());
    }
}
