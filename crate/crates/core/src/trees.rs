//! Ribbon trees with class-labelled interior vertices: the sets `Gr⁻(k,β)`
//! and their rooted versions, automorphisms, and splittings at flags and
//! edges.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

use crate::ainf::ClassKey;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexKind {
    Exterior,
    Interior(ClassKey),
}

impl VertexKind {
    pub fn is_exterior(&self) -> bool {
        matches!(self, VertexKind::Exterior)
    }

    pub fn class(&self) -> Option<&ClassKey> {
        match self {
            VertexKind::Interior(c) => Some(c),
            VertexKind::Exterior => None,
        }
    }
}

/// Token of a dart encoding.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tok {
    Open,
    Close,
    Vertex(VertexKind),
}

/// A planar tree: `adj[v]` lists the neighbours of `v` in counter-clockwise order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RibbonTree {
    kinds: Vec<VertexKind>,
    adj: Vec<Vec<usize>>,
}

impl RibbonTree {
    /// Checks that the data is a tree with exterior vertices of degree one and
    /// zero-class interior vertices of degree at least three.
    pub fn new(kinds: Vec<VertexKind>, adj: Vec<Vec<usize>>) -> Result<Self> {
        let n = kinds.len();
        if adj.len() != n || n == 0 {
            return Err(Error::Invalid("tree needs one adjacency list per vertex".into()));
        }
        let mut edges = 0;
        for (v, nbrs) in adj.iter().enumerate() {
            for &w in nbrs {
                if w >= n || w == v || !adj[w].contains(&v) {
                    return Err(Error::Invalid(format!("adjacency {v}–{w} is not symmetric")));
                }
                if nbrs.iter().filter(|&&x| x == w).count() > 1 {
                    return Err(Error::Invalid(format!("double edge {v}–{w}")));
                }
            }
            edges += nbrs.len();
        }
        if edges / 2 + 1 != n {
            return Err(Error::Invalid("edge count is not that of a tree".into()));
        }
        let tree = RibbonTree { kinds, adj };
        if tree.component(0, None).len() != n {
            return Err(Error::Invalid("tree is disconnected".into()));
        }
        for v in 0..n {
            match &tree.kinds[v] {
                VertexKind::Exterior if tree.adj[v].len() != 1 => {
                    return Err(Error::Invalid(format!("exterior vertex {v} has degree {}", tree.adj[v].len())));
                }
                VertexKind::Interior(c) if c.is_zero() && tree.adj[v].len() < 3 => {
                    return Err(Error::Invalid(format!("vertex {v} of class zero has fewer than 3 edges")));
                }
                _ => {}
            }
        }
        Ok(tree)
    }

    /// The edgeless tree with one interior vertex.
    pub fn single(beta: ClassKey) -> Self {
        RibbonTree { kinds: vec![VertexKind::Interior(beta)], adj: vec![Vec::new()] }
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn kind(&self, v: usize) -> &VertexKind {
        &self.kinds[v]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn interior_vertices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| !self.kinds[v].is_exterior()).collect()
    }

    pub fn exterior_vertices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.kinds[v].is_exterior()).collect()
    }

    /// Edges `(v, w)` with `v < w`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for v in 0..self.len() {
            for &w in &self.adj[v] {
                if v < w {
                    out.push((v, w));
                }
            }
        }
        out
    }

    /// Edges joining two interior vertices.
    pub fn interior_edges(&self) -> Vec<(usize, usize)> {
        self.edges()
            .into_iter()
            .filter(|&(v, w)| !self.kinds[v].is_exterior() && !self.kinds[w].is_exterior())
            .collect()
    }

    /// Flags `(v, w)`: an interior vertex `v` and the edge towards `w`.
    pub fn flags(&self) -> Vec<(usize, usize)> {
        self.interior_vertices()
            .into_iter()
            .flat_map(|v| self.adj[v].iter().map(move |&w| (v, w)))
            .collect()
    }

    /// Sum of the interior labels, or `None` if the tree has none.
    pub fn total_class(&self) -> Option<ClassKey> {
        let mut it = self.kinds.iter().filter_map(VertexKind::class);
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, c| acc.add(c)))
    }

    /// Vertices reachable from `v` without crossing `blocked`.
    fn component(&self, v: usize, blocked: Option<usize>) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        if let Some(b) = blocked {
            seen[b] = true;
        }
        let mut stack = vec![v];
        seen[v] = true;
        let mut out = Vec::new();
        while let Some(x) = stack.pop() {
            out.push(x);
            for &y in &self.adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Neighbours of `v` in counter-clockwise order starting at `first`.
    fn rotated(&self, v: usize, first: usize) -> Vec<usize> {
        let nbrs = &self.adj[v];
        let i = nbrs.iter().position(|&w| w == first).expect("not a neighbour");
        nbrs[i..].iter().chain(&nbrs[..i]).copied().collect()
    }

    fn encode_below(&self, v: usize, parent: usize, out: &mut Vec<Tok>) {
        out.push(Tok::Vertex(self.kinds[v].clone()));
        out.push(Tok::Open);
        for &w in self.rotated(v, parent).iter().skip(1) {
            self.encode_below(w, v, out);
        }
        out.push(Tok::Close);
    }

    /// Encoding of the tree read from the dart `v → w`.
    pub fn encode_from(&self, v: usize, w: usize) -> Vec<Tok> {
        let mut out = vec![Tok::Vertex(self.kinds[v].clone()), Tok::Open];
        for &x in &self.rotated(v, w) {
            self.encode_below(x, v, &mut out);
        }
        out.push(Tok::Close);
        out
    }

    fn darts(&self) -> Vec<(usize, usize)> {
        (0..self.len()).flat_map(|v| self.adj[v].iter().map(move |&w| (v, w))).collect()
    }

    /// Minimal dart encoding; equal for isomorphic trees.
    pub fn canonical(&self) -> Vec<Tok> {
        if self.len() == 1 {
            return vec![Tok::Vertex(self.kinds[0].clone()), Tok::Open, Tok::Close];
        }
        self.darts().into_iter().map(|(v, w)| self.encode_from(v, w)).min().expect("a dart")
    }

    /// Order of the ribbon automorphism group. Automorphisms act freely on
    /// darts, so this counts the darts realizing the canonical encoding.
    pub fn aut_order(&self) -> usize {
        if self.len() == 1 {
            return 1;
        }
        let canon = self.canonical();
        self.darts().into_iter().filter(|&(v, w)| self.encode_from(v, w) == canon).count()
    }

    /// Rebuilds a tree from an encoding produced by [`RibbonTree::encode_from`].
    pub fn decode(code: &[Tok]) -> Result<RibbonTree> {
        let mut kinds = Vec::new();
        let mut adj: Vec<Vec<usize>> = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        let mut i = 0;
        while i < code.len() {
            match &code[i] {
                Tok::Vertex(k) => {
                    let v = kinds.len();
                    kinds.push(k.clone());
                    adj.push(Vec::new());
                    if let Some(&p) = stack.last() {
                        adj[p].push(v);
                        adj[v].push(p);
                    }
                    if code.get(i + 1) != Some(&Tok::Open) {
                        return Err(Error::Parse { path: format!("token {i}"), msg: "vertex not followed by '('".into() });
                    }
                    stack.push(v);
                    i += 2;
                }
                Tok::Close => {
                    stack.pop().ok_or_else(|| Error::Parse { path: format!("token {i}"), msg: "unbalanced".into() })?;
                    i += 1;
                }
                Tok::Open => {
                    return Err(Error::Parse { path: format!("token {i}"), msg: "stray '('".into() });
                }
            }
        }
        RibbonTree::new(kinds, adj)
    }

    /// Re-numbers the vertices so that each `adj` is read as a ribbon structure
    /// after removing `v`; returns the subtree spanned by `keep` with `stub`
    /// turned into an exterior vertex.
    fn induced(&self, keep: &[usize], stub: usize) -> RibbonTree {
        let index: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let kinds = keep
            .iter()
            .map(|&v| if v == stub { VertexKind::Exterior } else { self.kinds[v].clone() })
            .collect();
        let adj = keep
            .iter()
            .map(|&v| self.adj[v].iter().filter_map(|w| index.get(w).copied()).collect())
            .collect();
        RibbonTree { kinds, adj }
    }

    /// Components of `Γ ∖ v`, each with its edge to `v` and rooted at a copy
    /// of `v`; the one containing the edge to `w` first, then counter-clockwise.
    pub fn split_at_flag(&self, v: usize, w: usize) -> Result<Vec<RootedTree>> {
        if self.kinds[v].is_exterior() || !self.adj[v].contains(&w) {
            return Err(Error::Domain(format!("({v}, {w}) is not a flag")));
        }
        let mut out = Vec::new();
        for x in self.rotated(v, w) {
            let mut keep = self.component(x, Some(v));
            keep.push(v);
            keep.sort_unstable();
            let t = self.induced(&keep, v);
            let root = keep.iter().position(|&y| y == v).expect("kept");
            out.push(RootedTree { tree: t, root });
        }
        Ok(out)
    }

    /// Cuts the interior edge `v–w`: `Γ₍₀₎` is the side of `v` with the edge
    /// ending in a new exterior root, `Γ₍₁₎` the other side with the edge and
    /// `v` turned into its exterior root.
    pub fn split_at_edge(&self, v: usize, w: usize) -> Result<(RootedTree, RootedTree)> {
        if !self.adj[v].contains(&w) {
            return Err(Error::Domain(format!("{v}–{w} is not an edge")));
        }
        if self.kinds[v].is_exterior() || self.kinds[w].is_exterior() {
            return Err(Error::Domain(format!("{v}–{w} is an exterior edge")));
        }
        let mut side0 = self.component(v, Some(w));
        side0.push(w);
        side0.sort_unstable();
        let mut side1 = self.component(w, Some(v));
        side1.push(v);
        side1.sort_unstable();
        let g0 = self.induced(&side0, w);
        let g1 = self.induced(&side1, v);
        let r0 = side0.iter().position(|&y| y == w).expect("kept");
        let r1 = side1.iter().position(|&y| y == v).expect("kept");
        Ok((RootedTree { tree: g0, root: r0 }, RootedTree { tree: g1, root: r1 }))
    }
}

impl fmt::Display for RibbonTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in self.canonical() {
            match t {
                Tok::Open => write!(f, "(")?,
                Tok::Close => write!(f, ")")?,
                Tok::Vertex(VertexKind::Exterior) => write!(f, "*")?,
                Tok::Vertex(VertexKind::Interior(c)) => write!(f, "[{c}]")?,
            }
        }
        Ok(())
    }
}

/// A ribbon tree with an exterior root; its automorphism group is trivial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedTree {
    pub tree: RibbonTree,
    pub root: usize,
}

impl RootedTree {
    pub fn new(tree: RibbonTree, root: usize) -> Result<Self> {
        if root >= tree.len() || !tree.kind(root).is_exterior() {
            return Err(Error::Invalid("root must be an exterior vertex".into()));
        }
        Ok(RootedTree { tree, root })
    }

    /// The vertex next to the root.
    pub fn top(&self) -> usize {
        self.tree.neighbors(self.root)[0]
    }

    /// One edge between two exterior vertices.
    pub fn is_trivial(&self) -> bool {
        self.tree.kind(self.top()).is_exterior()
    }

    pub fn encoding(&self) -> Vec<Tok> {
        self.tree.encode_from(self.root, self.top())
    }

    /// Exterior vertices other than the root, in counter-clockwise order from the root.
    pub fn inputs(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![(self.top(), self.root)];
        while let Some((v, parent)) = stack.pop() {
            if self.tree.kind(v).is_exterior() {
                out.push(v);
                continue;
            }
            let order = self.tree.rotated(v, parent);
            for &w in order.iter().skip(1).rev() {
                stack.push((w, v));
            }
        }
        out
    }

    /// Subtrees hanging below the top vertex, in order (empty when trivial).
    pub fn children(&self) -> Result<Vec<RootedTree>> {
        if self.is_trivial() {
            return Ok(Vec::new());
        }
        let mut parts = self.tree.split_at_flag(self.top(), self.root)?;
        parts.remove(0);
        Ok(parts)
    }
}

/// Ordered tree used during enumeration: the first node is attached above.
#[derive(Debug)]
struct Node {
    kind: VertexKind,
    children: Vec<Rc<Node>>,
}

fn to_ribbon(root: &Node) -> RibbonTree {
    fn walk(n: &Node, parent: Option<usize>, kinds: &mut Vec<VertexKind>, adj: &mut Vec<Vec<usize>>) -> usize {
        let v = kinds.len();
        kinds.push(n.kind.clone());
        adj.push(parent.into_iter().collect());
        for c in &n.children {
            let w = walk(c, Some(v), kinds, adj);
            adj[v].push(w);
        }
        v
    }
    let mut kinds = Vec::new();
    let mut adj = Vec::new();
    walk(root, None, &mut kinds, &mut adj);
    RibbonTree { kinds, adj }
}

/// Memoized enumeration of ordered subtrees by (exterior count, class).
struct Enumerator<'a> {
    labels: &'a [ClassKey],
    zero: ClassKey,
    reachable: Vec<ClassKey>,
    subs: HashMap<(usize, ClassKey), Rc<Vec<Rc<Node>>>>,
    seqs: HashMap<(usize, ClassKey, usize), Rc<Vec<Vec<Rc<Node>>>>>,
}

impl<'a> Enumerator<'a> {
    fn new(labels: &'a [ClassKey], beta: &ClassKey) -> Self {
        let zero = ClassKey::zero(beta.b1());
        // all sums of labels bounded by β
        let mut reachable = vec![zero.clone()];
        let mut i = 0;
        while i < reachable.len() {
            let c = reachable[i].clone();
            for l in labels {
                let s = c.add(l);
                if beta.sub(&s).is_some() && !reachable.contains(&s) {
                    reachable.push(s);
                }
            }
            i += 1;
        }
        Enumerator { labels, zero, reachable, subs: HashMap::new(), seqs: HashMap::new() }
    }

    /// Subtrees attached to a parent, using `k` exterior vertices and class `beta`.
    fn sub(&mut self, k: usize, beta: &ClassKey) -> Rc<Vec<Rc<Node>>> {
        if let Some(v) = self.subs.get(&(k, beta.clone())) {
            return v.clone();
        }
        let mut out = Vec::new();
        if k == 1 && beta.is_zero() {
            out.push(Rc::new(Node { kind: VertexKind::Exterior, children: Vec::new() }));
        }
        if !(k == 0 && beta.is_zero()) {
            let mut choices: Vec<ClassKey> = self.labels.to_vec();
            choices.push(self.zero.clone());
            for g in choices {
                let Some(rest) = beta.sub(&g) else { continue };
                let min = if g.is_zero() { 2 } else { 0 };
                for kids in self.seq(k, &rest, min).iter() {
                    out.push(Rc::new(Node { kind: VertexKind::Interior(g.clone()), children: kids.clone() }));
                }
            }
        }
        let out = Rc::new(out);
        self.subs.insert((k, beta.clone()), out.clone());
        out
    }

    /// Ordered lists of at least `min` subtrees with totals `(k, beta)`.
    fn seq(&mut self, k: usize, beta: &ClassKey, min: usize) -> Rc<Vec<Vec<Rc<Node>>>> {
        if let Some(v) = self.seqs.get(&(k, beta.clone(), min)) {
            return v.clone();
        }
        let mut out = Vec::new();
        if k == 0 && beta.is_zero() {
            if min == 0 {
                out.push(Vec::new());
            }
        } else {
            for b1 in self.reachable.clone() {
                let Some(rest) = beta.sub(&b1) else { continue };
                for k1 in 0..=k {
                    if k1 == 0 && b1.is_zero() {
                        continue;
                    }
                    let tails = self.seq(k - k1, &rest, min.saturating_sub(1));
                    if tails.is_empty() {
                        continue;
                    }
                    let firsts = self.sub(k1, &b1);
                    for f in firsts.iter() {
                        for t in tails.iter() {
                            let mut v = Vec::with_capacity(t.len() + 1);
                            v.push(f.clone());
                            v.extend(t.iter().cloned());
                            out.push(v);
                        }
                    }
                }
            }
        }
        let out = Rc::new(out);
        self.seqs.insert((k, beta.clone(), min), out.clone());
        out
    }
}

/// An isomorphism class of `Gr⁻(k,β)` with its automorphism count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeClass {
    pub tree: RibbonTree,
    pub aut: usize,
}

/// `Gr⁻(k, β)`: one representative per isomorphism class of ribbon trees with
/// `k` exterior vertices and interior labels from `labels` (plus the zero
/// class, allowed at vertices of degree ≥ 3) summing to `β`. Trees without
/// interior vertices are left out; the edgeless tree appears for `k = 0` when
/// `β` is a label.
pub fn enum_gr_minus(k: usize, beta: &ClassKey, labels: &[ClassKey]) -> Vec<TreeClass> {
    let labels: Vec<ClassKey> = labels.iter().filter(|l| !l.is_zero()).cloned().collect();
    let mut en = Enumerator::new(&labels, beta);
    let mut found: BTreeMap<Vec<Tok>, RibbonTree> = BTreeMap::new();
    if k == 0 {
        let mut choices = labels.clone();
        choices.push(en.zero.clone());
        for g in choices {
            let Some(rest) = beta.sub(&g) else { continue };
            let min = if g.is_zero() { 3 } else { 0 };
            for kids in en.seq(0, &rest, min).iter() {
                let node = Node { kind: VertexKind::Interior(g.clone()), children: kids.clone() };
                let t = to_ribbon(&node);
                found.entry(t.canonical()).or_insert(t);
            }
        }
    } else {
        for child in en.sub(k - 1, beta).iter() {
            let node = Node { kind: VertexKind::Exterior, children: vec![child.clone()] };
            let t = to_ribbon(&node);
            if t.interior_vertices().is_empty() {
                continue;
            }
            found.entry(t.canonical()).or_insert(t);
        }
    }
    found
        .into_values()
        .map(|tree| {
            let aut = tree.aut_order();
            TreeClass { tree, aut }
        })
        .collect()
}

/// Rooted trees in `Gr(k, β)`: `k` exterior vertices, one of them the root.
/// Includes the trivial edge for `(k, β) = (2, 0)`.
pub fn enum_gr_rooted(k: usize, beta: &ClassKey, labels: &[ClassKey]) -> Vec<RootedTree> {
    if k == 0 {
        return Vec::new();
    }
    let labels: Vec<ClassKey> = labels.iter().filter(|l| !l.is_zero()).cloned().collect();
    let mut en = Enumerator::new(&labels, beta);
    let mut out: Vec<RootedTree> = en
        .sub(k - 1, beta)
        .iter()
        .map(|child| {
            let node = Node { kind: VertexKind::Exterior, children: vec![child.clone()] };
            RootedTree { tree: to_ribbon(&node), root: 0 }
        })
        .collect();
    out.sort_by_key(RootedTree::encoding);
    out
}

/// Nonzero monoid elements below the truncation as labels with no boundary.
pub fn labels_from_energies(energies: &[crate::coeff::Rational], b1: usize) -> Vec<ClassKey> {
    energies
        .iter()
        .filter(|e| **e > crate::coeff::Rational::from_integer(0.into()))
        .map(|e| ClassKey::new(e.clone(), vec![0; b1]))
        .collect()
}
