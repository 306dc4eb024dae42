//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use cyclic_ainf::ainf::ClassKey;
use cyclic_ainf::q;
use cyclic_ainf::trees::{RibbonTree, Tok, VertexKind};

pub fn c(e: i64) -> ClassKey {
    ClassKey::new(q(e), vec![])
}

pub fn prufer_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    if n == 1 {
        return vec![vec![]];
    }
    if n == 2 {
        return vec![vec![(0, 1)]];
    }
    let mut out = Vec::new();
    let total = n.pow(n as u32 - 2);
    for code in 0..total {
        let mut seq = Vec::with_capacity(n - 2);
        let mut x = code;
        for _ in 0..n - 2 {
            seq.push(x % n);
            x /= n;
        }
        let mut degree = vec![1; n];
        for &s in &seq {
            degree[s] += 1;
        }
        let mut edges = Vec::new();
        for &s in &seq {
            let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
            edges.push((leaf, s));
            degree[leaf] -= 1;
            degree[s] -= 1;
        }
        let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
        edges.push((rest[0], rest[1]));
        out.push(edges);
    }
    out
}

pub fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Cyclic orders: first neighbour fixed, the rest permuted.
fn cyclic_orders(nbrs: &[usize]) -> Vec<Vec<usize>> {
    if nbrs.is_empty() {
        return vec![vec![]];
    }
    permutations(&nbrs[1..])
        .into_iter()
        .map(|mut p| {
            p.insert(0, nbrs[0]);
            p
        })
        .collect()
}

fn assignments(
    degrees: &[usize],
    labels: &[i64],
    k: usize,
    energy: i64,
    acc: &mut Vec<VertexKind>,
    out: &mut Vec<Vec<VertexKind>>,
) {
    let v = acc.len();
    let ext = acc.iter().filter(|x| x.is_exterior()).count();
    let used: i64 = acc
        .iter()
        .filter_map(|x| x.class())
        .map(|c| c.energy.to_integer().try_into().unwrap_or(0i64))
        .sum();
    if ext > k || used > energy {
        return;
    }
    if v == degrees.len() {
        if ext == k && used == energy && ext < v {
            out.push(acc.clone());
        }
        return;
    }
    let mut options = Vec::new();
    if degrees[v] == 1 {
        options.push(VertexKind::Exterior);
    }
    if degrees[v] >= 3 {
        options.push(VertexKind::Interior(c(0)));
    }
    for &l in labels {
        options.push(VertexKind::Interior(c(l)));
    }
    for o in options {
        acc.push(o);
        assignments(degrees, labels, k, energy, acc, out);
        acc.pop();
    }
}

pub fn brute_force(k: usize, energy: i64, labels: &[i64], max_n: usize) -> BTreeMap<Vec<Tok>, (usize, usize)> {
    let mut counts: BTreeMap<Vec<Tok>, (usize, usize)> = BTreeMap::new();
    for n in 1..=max_n {
        for edges in prufer_trees(n) {
            let mut adj = vec![Vec::new(); n];
            for &(a, b) in &edges {
                adj[a].push(b);
                adj[b].push(a);
            }
            let degrees: Vec<usize> = adj.iter().map(Vec::len).collect();
            let mut kinds_list = Vec::new();
            assignments(&degrees, labels, k, energy, &mut Vec::new(), &mut kinds_list);
            if kinds_list.is_empty() {
                continue;
            }
            let mut orders: Vec<Vec<Vec<usize>>> = vec![vec![]];
            for nb in &adj {
                let mut next = Vec::new();
                for prefix in &orders {
                    for o in cyclic_orders(nb) {
                        let mut p = prefix.clone();
                        p.push(o);
                        next.push(p);
                    }
                }
                orders = next;
            }
            for kinds in &kinds_list {
                for o in &orders {
                    let t = RibbonTree::new(kinds.clone(), o.clone()).expect("valid labelled tree");
                    counts.entry(t.canonical()).or_insert((0, n)).0 += 1;
                }
            }
        }
    }
    counts
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Vertex permutations preserving kinds, adjacency and every cyclic order.
pub fn brute_aut(t: &RibbonTree) -> usize {
    let n = t.len();
    let ids: Vec<usize> = (0..n).collect();
    permutations(&ids)
        .into_iter()
        .filter(|p| {
            (0..n).all(|v| {
                if t.kind(p[v]) != t.kind(v) {
                    return false;
                }
                let image: Vec<usize> = t.neighbors(v).iter().map(|&w| p[w]).collect();
                let target = t.neighbors(p[v]);
                image.len() == target.len()
                    && (image.is_empty() || (0..image.len()).any(|r| image.iter().cycle().skip(r).take(image.len()).eq(target.iter())))
            })
        })
        .count()
}
