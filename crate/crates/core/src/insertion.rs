//! Explicit enumeration of increasing dessins by contracting the last two
//! labels and inserting black-and-white trees back into the special
//! vertices.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dessin::{dessin_sign, Dessin, RealVertex};
use crate::error::{Error, Result};
use crate::partition::{partitions_with_length, sub_partitions, Partition, TypeList};
use crate::trees::{
    disorders_of, enumerate_marked_trees, enumerate_real_trees, tree_side, tree_sign, Color,
    PlaneTree, RealBWTree,
};

/// Which out-dart marks an upper-half special vertex.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Marking {
    /// Smallest canonical index among the out-darts of the conjugate pair.
    #[default]
    MinIndex,
    /// Largest canonical index; only used to check marking independence.
    MaxIndex,
}

/// A tree as a rotation system, with the dart whose corner receives the
/// anchor dart of the special vertex.
#[derive(Clone, Debug)]
pub(crate) struct TreeMap {
    alpha: Vec<u32>,
    rho: Vec<u32>,
    color: Vec<Color>,
    conj: Option<Vec<u32>>,
    anchor: u32,
}

struct MapBuilder {
    alpha: Vec<u32>,
    rho: Vec<u32>,
    color: Vec<Color>,
    conj: Vec<u32>,
}

impl MapBuilder {
    fn new() -> Self {
        MapBuilder {
            alpha: Vec::new(),
            rho: Vec::new(),
            color: Vec::new(),
            conj: Vec::new(),
        }
    }

    fn edge(&mut self, cu: Color, cv: Color) -> (u32, u32) {
        let a = self.alpha.len() as u32;
        let b = a + 1;
        self.alpha.extend([b, a]);
        self.rho.extend([a, b]);
        self.color.extend([cu, cv]);
        self.conj.extend([a, b]);
        (a, b)
    }

    fn cycle(&mut self, ds: &[u32]) {
        for i in 0..ds.len() {
            self.rho[ds[i] as usize] = ds[(i + 1) % ds.len()];
        }
    }

    /// Builds a planted tree in the upper half-plane and its mirror image in
    /// the lower one; returns the parent-side darts of both copies.
    fn planted_pair(&mut self, t: &PlaneTree, parent: Color) -> (u32, u32) {
        let (up_p, up_x) = self.edge(parent, t.root_color);
        let (lo_p, lo_x) = self.edge(parent, t.root_color);
        self.conj[up_p as usize] = lo_p;
        self.conj[lo_p as usize] = up_p;
        self.conj[up_x as usize] = lo_x;
        self.conj[lo_x as usize] = up_x;
        let kids: Vec<(u32, u32)> = t
            .children
            .iter()
            .map(|c| self.planted_pair(c, t.root_color))
            .collect();
        let mut up = vec![up_x];
        up.extend(kids.iter().map(|k| k.0));
        let mut lo = vec![lo_x];
        lo.extend(kids.iter().rev().map(|k| k.1));
        self.cycle(&up);
        self.cycle(&lo);
        (up_p, lo_p)
    }

    fn planted(&mut self, t: &PlaneTree, parent: Color) -> u32 {
        let (p, x) = self.edge(parent, t.root_color);
        let kids: Vec<u32> = t
            .children
            .iter()
            .map(|c| self.planted(c, t.root_color))
            .collect();
        let mut ds = vec![x];
        ds.extend(kids);
        self.cycle(&ds);
        p
    }
}

impl TreeMap {
    pub(crate) fn from_real(t: &RealBWTree) -> TreeMap {
        let spine = t.spine();
        let l = spine.len();
        let mut b = MapBuilder::new();
        let mut right = vec![None; l];
        let mut left = vec![None; l];
        for i in 0..l.saturating_sub(1) {
            let (r, lft) = b.edge(spine[i].color, spine[i + 1].color);
            right[i] = Some(r);
            left[i + 1] = Some(lft);
        }
        let mut anchor = 0;
        for (i, v) in spine.iter().enumerate() {
            let roots: Vec<(u32, u32)> =
                v.upper.iter().map(|p| b.planted_pair(p, v.color)).collect();
            let mut ccw = Vec::new();
            ccw.extend(right[i]);
            ccw.extend(roots.iter().rev().map(|r| r.0));
            ccw.extend(left[i]);
            ccw.extend(roots.iter().map(|r| r.1));
            b.cycle(&ccw);
            if i == l - 1 {
                anchor = *ccw.last().expect("a real tree has an edge");
            }
        }
        TreeMap {
            alpha: b.alpha,
            rho: b.rho,
            color: b.color,
            conj: Some(b.conj),
            anchor,
        }
    }

    /// White-rooted marked tree: the anchor corner follows the last root edge.
    pub(crate) fn from_marked(t: &PlaneTree) -> TreeMap {
        let mut b = MapBuilder::new();
        let roots: Vec<u32> = t
            .children
            .iter()
            .map(|c| b.planted(c, t.root_color))
            .collect();
        // `planted` returned the parent-side darts, which sit at the root
        b.cycle(&roots);
        TreeMap {
            alpha: b.alpha,
            rho: b.rho,
            color: b.color,
            conj: None,
            anchor: *roots.last().expect("a marked tree has an edge"),
        }
    }

    fn len(&self) -> usize {
        self.alpha.len()
    }
}

/// One special vertex (or conjugate pair) of the contracted dessin together
/// with the tree inserted there.
pub(crate) enum Insert<'a> {
    Real { right_dart: u32, tree: &'a TreeMap },
    Pair { marked_dart: u32, tree: &'a TreeMap },
}

/// Glues trees into every special vertex of `ghat`; the special label of
/// `ghat` splits into labels `k - 1` (black) and `k` (white).
pub(crate) fn insert(ghat: &Dessin, inserts: &[Insert<'_>]) -> Dessin {
    let k = ghat.k + 1;
    let special = ghat.k as u8;
    let mut total = ghat.rho.len();
    for ins in inserts {
        total += match ins {
            Insert::Real { tree, .. } => tree.len(),
            Insert::Pair { tree, .. } => 2 * tree.len(),
        };
    }
    let mut rho = ghat.rho.clone();
    let mut alpha = ghat.alpha.clone();
    let mut conj = ghat.conj.clone();
    let mut label = ghat.label.clone();
    let mut tail = ghat.tail.clone();
    rho.reserve(total);
    for d in 0..ghat.rho.len() {
        if label[d] == special && tail[d] {
            label[d] = k as u8;
        }
    }
    let tree_label = |c: Color| match c {
        Color::Black => (k as u8 - 1, true),
        Color::White => (k as u8, false),
    };
    let push_tree = |t: &TreeMap,
                     inverse: bool,
                     rho: &mut Vec<u32>,
                     alpha: &mut Vec<u32>,
                     conj: &mut Vec<u32>,
                     label: &mut Vec<u8>,
                     tail: &mut Vec<bool>|
     -> u32 {
        let o = rho.len() as u32;
        let mut r = vec![0u32; t.len()];
        for d in 0..t.len() {
            if inverse {
                r[t.rho[d] as usize] = d as u32;
            } else {
                r[d] = t.rho[d];
            }
        }
        for d in 0..t.len() {
            rho.push(o + r[d]);
            alpha.push(o + t.alpha[d]);
            conj.push(o + t.conj.as_ref().map_or(d as u32, |c| c[d]));
            let (l, tl) = tree_label(t.color[d]);
            label.push(l);
            tail.push(tl);
        }
        o
    };
    for ins in inserts {
        match ins {
            Insert::Real { right_dart, tree } => {
                let o = push_tree(
                    tree, false, &mut rho, &mut alpha, &mut conj, &mut label, &mut tail,
                );
                glue(&ghat.rho, *right_dart, tree, o, &mut rho);
            }
            Insert::Pair { marked_dart, tree } => {
                let o = push_tree(
                    tree, false, &mut rho, &mut alpha, &mut conj, &mut label, &mut tail,
                );
                let o2 = push_tree(
                    tree, true, &mut rho, &mut alpha, &mut conj, &mut label, &mut tail,
                );
                for d in 0..tree.len() as u32 {
                    conj[(o + d) as usize] = o2 + d;
                    conj[(o2 + d) as usize] = o + d;
                }
                let corners = glue(&ghat.rho, *marked_dart, tree, o, &mut rho);
                for (dj, cj) in corners {
                    let cd = ghat.conj[dj as usize];
                    let start = o2 + tree.rho[cj as usize];
                    rho[start as usize] = cd;
                    rho[cd as usize] = o2 + cj;
                }
            }
        }
    }
    Dessin {
        n: ghat.n,
        k,
        rho,
        alpha,
        conj,
        label,
        tail,
        root: ghat.root,
    }
}

/// Matches the darts around a special vertex, counterclockwise from `d0`,
/// with the corners of the tree's boundary walk from the anchor corner.
fn glue(ghat_rho: &[u32], d0: u32, t: &TreeMap, o: u32, rho: &mut [u32]) -> Vec<(u32, u32)> {
    let mut out = Vec::with_capacity(t.len());
    let mut d = d0;
    let mut c = t.anchor;
    loop {
        out.push((d, c));
        let next_c = t.alpha[t.rho[c as usize] as usize];
        rho[(o + c) as usize] = d;
        rho[d as usize] = o + t.rho[c as usize];
        d = ghat_rho[d as usize];
        c = next_c;
        if d == d0 {
            debug_assert_eq!(c, t.anchor);
            return out;
        }
    }
}

/// The special vertices of a contracted dessin: real ones left to right,
/// then one representative dart per conjugate pair.
#[derive(Clone, Debug)]
pub struct SpecialLayout {
    pub real: Vec<RealVertex>,
    /// `(marked out-dart, order)` per conjugate pair.
    pub pairs: Vec<(u32, u32)>,
}

pub fn special_layout(ghat: &Dessin, marking: Marking) -> Result<SpecialLayout> {
    let special = ghat.k as u8;
    let real: Vec<RealVertex> = ghat
        .real_vertices()?
        .into_iter()
        .filter(|r| r.label == special)
        .collect();
    let (vid, verts) = ghat.vertices();
    let idx = ghat.canonical_index();
    let mut done = vec![false; verts.len()];
    let mut pairs = Vec::new();
    for (v, ds) in verts.iter().enumerate() {
        if done[v] || ghat.label[ds[0] as usize] != special {
            continue;
        }
        let w = vid[ghat.conj[ds[0] as usize] as usize] as usize;
        done[v] = true;
        done[w] = true;
        if w == v {
            continue;
        }
        let outs = ds
            .iter()
            .chain(verts[w].iter())
            .copied()
            .filter(|&d| ghat.tail[d as usize]);
        let pick = match marking {
            Marking::MinIndex => outs.min_by_key(|&d| idx[d as usize]),
            Marking::MaxIndex => outs.max_by_key(|&d| idx[d as usize]),
        }
        .expect("special vertices have out-darts");
        pairs.push((pick, ds.len() as u32 / 2));
    }
    pairs.sort_by_key(|&(d, _)| idx[d as usize]);
    Ok(SpecialLayout { real, pairs })
}

/// A dessin with a pair of partitions on each special vertex (the vertices
/// with the top label).
#[derive(Clone, Debug)]
pub struct EnhancedDessin {
    pub base: Dessin,
    /// Vertex index (as in [`Dessin::vertices`]) → `(n_b, n_w)`.
    pub enhancement: BTreeMap<u32, (Partition, Partition)>,
}

impl EnhancedDessin {
    pub fn new(base: Dessin, enhancement: BTreeMap<u32, (Partition, Partition)>) -> Result<Self> {
        let e = EnhancedDessin { base, enhancement };
        let v = e.violations();
        if v.is_empty() {
            Ok(e)
        } else {
            Err(Error::InvalidDessin(v))
        }
    }

    fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let (vid, verts) = self.base.vertices();
        let special = self.base.k as u8;
        for (i, ds) in verts.iter().enumerate() {
            let is_special = self.base.label[ds[0] as usize] == special;
            match (is_special, self.enhancement.get(&(i as u32))) {
                (true, None) => v.push(format!("special vertex {i} has no partitions")),
                (false, Some(_)) => v.push(format!("vertex {i} is not special")),
                (true, Some((nb, nw))) => {
                    let half = ds.len() as u32 / 2;
                    if nb.size() != half || nw.size() != half {
                        v.push(format!("partitions at vertex {i} do not have size {half}"));
                    }
                    let w = vid[self.base.conj[ds[0] as usize] as usize];
                    if self.enhancement.get(&w) != Some(&(nb.clone(), nw.clone())) {
                        v.push(format!(
                            "enhancement not conjugation invariant at vertex {i}"
                        ));
                    }
                }
                (false, None) => {}
            }
        }
        v
    }

    /// Vertex of the dart.
    pub fn vertex_of(&self, dart: u32) -> u32 {
        self.base.vertices().0[dart as usize]
    }
}

/// Ordinary disorders at the non-special labels plus special disorders.
pub fn enhanced_sign(e: &EnhancedDessin) -> Result<i32> {
    let special = e.base.k as u8;
    let (vid, _) = e.base.vertices();
    let rv = e.base.real_vertices()?;
    let ordinary: Vec<(u8, u32)> = rv
        .iter()
        .filter(|r| r.label != special)
        .map(|r| (r.label, r.order))
        .collect();
    let mut d = disorders_of(&ordinary) as u64;
    let parts: Vec<&(Partition, Partition)> = rv
        .iter()
        .filter(|r| r.label == special)
        .map(|r| {
            e.enhancement
                .get(&vid[r.right_dart as usize])
                .ok_or_else(|| {
                    Error::InvalidDessin(vec!["special vertex without partitions".into()])
                })
        })
        .collect::<Result<_>>()?;
    d += special_disorders(&parts);
    Ok(if d.is_multiple_of(2) { 1 } else { -1 })
}

pub(crate) fn special_disorders(parts: &[&(Partition, Partition)]) -> u64 {
    let mut d = 0u64;
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            for (a, b) in [(&parts[i].0, &parts[j].0), (&parts[i].1, &parts[j].1)] {
                for &x in a.parts() {
                    d += b.parts().iter().filter(|&&y| x > y).count() as u64;
                }
            }
        }
    }
    d
}

/// How a dessin arose from its contraction.
#[derive(Clone, Debug)]
pub struct Provenance<'a> {
    pub contracted: &'a Dessin,
    pub layout: &'a SpecialLayout,
    /// `(n_b, n_w)` for the real special vertices, then for the pairs.
    pub real_parts: Vec<(Partition, Partition)>,
    pub pair_parts: Vec<(Partition, Partition)>,
    pub real_tree_signs: Vec<i32>,
}

impl Provenance<'_> {
    pub fn enhanced(&self) -> EnhancedDessin {
        let (vid, _) = self.contracted.vertices();
        let mut map = BTreeMap::new();
        for (r, p) in self.layout.real.iter().zip(&self.real_parts) {
            map.insert(vid[r.right_dart as usize], p.clone());
        }
        for (&(d, _), p) in self.layout.pairs.iter().zip(&self.pair_parts) {
            map.insert(vid[d as usize], p.clone());
            map.insert(vid[self.contracted.conj[d as usize] as usize], p.clone());
        }
        EnhancedDessin {
            base: self.contracted.clone(),
            enhancement: map,
        }
    }
}

type RealKey = (Partition, Partition, Color);

/// Caches of tree maps and sub-enumerations shared by one enumeration run.
#[derive(Default)]
pub struct Explicit {
    marking: Marking,
    real: Mutex<HashMap<RealKey, Arc<Vec<(TreeMap, i32)>>>>,
    marked: Mutex<HashMap<(Partition, Partition), Arc<Vec<TreeMap>>>>,
    levels: Mutex<HashMap<TypeList, Arc<Vec<Dessin>>>>,
}

impl Explicit {
    pub fn new(marking: Marking) -> Self {
        Explicit {
            marking,
            ..Default::default()
        }
    }

    fn real_trees(
        &self,
        nb: &Partition,
        nw: &Partition,
        side: Color,
    ) -> Result<Arc<Vec<(TreeMap, i32)>>> {
        let key = (nb.clone(), nw.clone(), side);
        if let Some(v) = self.real.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let v: Vec<(TreeMap, i32)> = enumerate_real_trees(nb, nw)?
            .iter()
            .filter(|t| tree_side(t) == side)
            .map(|t| (TreeMap::from_real(t), tree_sign(t)))
            .collect();
        let v = Arc::new(v);
        self.real.lock().unwrap().insert(key, v.clone());
        Ok(v)
    }

    fn marked_trees(&self, nb: &Partition, nw: &Partition) -> Result<Arc<Vec<TreeMap>>> {
        let key = (nb.clone(), nw.clone());
        if let Some(v) = self.marked.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let v: Vec<TreeMap> = enumerate_marked_trees(nb, nw)?
            .iter()
            .map(TreeMap::from_marked)
            .collect();
        let v = Arc::new(v);
        self.marked.lock().unwrap().insert(key, v.clone());
        Ok(v)
    }

    /// All increasing dessins of type `t`, sorted by canonical code.
    pub fn enumerate(&self, t: &TypeList) -> Result<Arc<Vec<Dessin>>> {
        if let Some(v) = self.levels.lock().unwrap().get(t) {
            return Ok(v.clone());
        }
        let out = Arc::new(self.enumerate_uncached(t)?);
        self.levels.lock().unwrap().insert(t.clone(), out.clone());
        Ok(out)
    }

    fn enumerate_uncached(&self, t: &TypeList) -> Result<Vec<Dessin>> {
        let k = t.k();
        let n = t.degree();
        if k == 0 {
            return Err(Error::Precondition(
                "dessins need at least one branch value".into(),
            ));
        }
        if k == 1 {
            return Ok(vec![Dessin::star(n)]);
        }
        let mut all: Vec<(Vec<u8>, Dessin)> = Vec::new();
        for (ghat, _) in self.contracted_levels(t)? {
            let found: Vec<Result<Vec<(Vec<u8>, Dessin)>>> = ghat
                .par_iter()
                .map(|g| {
                    let mut v = Vec::new();
                    self.children(g, t, &mut |d, _| v.push((d.canonical_code(), d)))?;
                    Ok(v)
                })
                .collect();
            for f in found {
                all.extend(f?);
            }
        }
        all.par_sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let before = all.len();
        all.dedup_by(|a, b| a.0 == b.0);
        assert_eq!(
            before,
            all.len(),
            "insertion produced homeomorphic dessins twice"
        );
        Ok(all.into_iter().map(|(_, d)| d).collect())
    }

    /// Dessins of every contracted type `(Λ_1, …, Λ_{k-2}, M)`.
    fn contracted_levels(&self, t: &TypeList) -> Result<Vec<(Arc<Vec<Dessin>>, Partition)>> {
        let e = t.entries();
        let k = e.len();
        let n = t.degree() as i64;
        let len = e[k - 2].len() as i64 + e[k - 1].len() as i64 - n;
        let mut out = Vec::new();
        if len <= 0 {
            return Ok(out);
        }
        for m in partitions_with_length(n as u32, len as usize) {
            let ct = t.contracted(m.clone());
            out.push((self.enumerate(&ct)?, m));
        }
        Ok(out)
    }

    /// Streams every dessin of type `t` with its provenance.
    pub fn for_each_with_provenance(
        &self,
        t: &TypeList,
        f: &mut dyn FnMut(Dessin, &Provenance<'_>),
    ) -> Result<()> {
        if t.k() < 2 {
            return Err(Error::Precondition(
                "provenance needs at least two labels".into(),
            ));
        }
        for (ghat, _) in self.contracted_levels(t)? {
            for g in ghat.iter() {
                self.children(g, t, f)?;
            }
        }
        Ok(())
    }

    /// Every dessin of type `t` contracting to `ghat`.
    fn children(
        &self,
        ghat: &Dessin,
        t: &TypeList,
        f: &mut dyn FnMut(Dessin, &Provenance<'_>),
    ) -> Result<()> {
        let k = t.k();
        let layout = special_layout(ghat, self.marking)?;
        let pool_b = t.entries()[k - 2].multiplicities();
        let pool_w = t.entries()[k - 1].multiplicities();
        let mut st = ChildState {
            real_parts: Vec::new(),
            pair_parts: Vec::new(),
            real_trees: Vec::new(),
            pair_trees: Vec::new(),
        };
        self.children_rec(ghat, &layout, 0, pool_b, pool_w, &mut st, f)
    }

    #[allow(clippy::too_many_arguments)]
    fn children_rec(
        &self,
        ghat: &Dessin,
        layout: &SpecialLayout,
        i: usize,
        pool_b: BTreeMap<u32, u32>,
        pool_w: BTreeMap<u32, u32>,
        st: &mut ChildState,
        f: &mut dyn FnMut(Dessin, &Provenance<'_>),
    ) -> Result<()> {
        let nr = layout.real.len();
        if i == nr + layout.pairs.len() {
            if pool_b.values().any(|&c| c > 0) || pool_w.values().any(|&c| c > 0) {
                return Ok(());
            }
            return self.emit(ghat, layout, st, f);
        }
        let (e, copies) = if i < nr {
            (layout.real[i].order, 1)
        } else {
            (layout.pairs[i - nr].1, 2)
        };
        for nb in sub_partitions(&pool_b, e, None, copies) {
            let want = e as usize + 1 - nb.len();
            if want == 0 {
                continue;
            }
            for nw in sub_partitions(&pool_w, e, Some(want), copies) {
                let pb = take(&pool_b, &nb, copies);
                let pw = take(&pool_w, &nw, copies);
                if i < nr {
                    let side = if ghat.tail[layout.real[i].right_dart as usize] {
                        Color::White
                    } else {
                        Color::Black
                    };
                    let trees = self.real_trees(&nb, &nw, side)?;
                    if trees.is_empty() {
                        continue;
                    }
                    st.real_parts.push((nb.clone(), nw.clone()));
                    for ti in 0..trees.len() {
                        st.real_trees.push((trees.clone(), ti));
                        self.children_rec(ghat, layout, i + 1, pb.clone(), pw.clone(), st, f)?;
                        st.real_trees.pop();
                    }
                    st.real_parts.pop();
                } else {
                    let trees = self.marked_trees(&nb, &nw)?;
                    if trees.is_empty() {
                        continue;
                    }
                    st.pair_parts.push((nb.clone(), nw.clone()));
                    for ti in 0..trees.len() {
                        st.pair_trees.push((trees.clone(), ti));
                        self.children_rec(ghat, layout, i + 1, pb.clone(), pw.clone(), st, f)?;
                        st.pair_trees.pop();
                    }
                    st.pair_parts.pop();
                }
            }
        }
        Ok(())
    }

    fn emit(
        &self,
        ghat: &Dessin,
        layout: &SpecialLayout,
        st: &ChildState,
        f: &mut dyn FnMut(Dessin, &Provenance<'_>),
    ) -> Result<()> {
        let mut inserts = Vec::new();
        for (r, (trees, ti)) in layout.real.iter().zip(&st.real_trees) {
            inserts.push(Insert::Real {
                right_dart: r.right_dart,
                tree: &trees[*ti].0,
            });
        }
        for (&(d, _), (trees, ti)) in layout.pairs.iter().zip(&st.pair_trees) {
            inserts.push(Insert::Pair {
                marked_dart: d,
                tree: &trees[*ti],
            });
        }
        let g = insert(ghat, &inserts);
        let prov = Provenance {
            contracted: ghat,
            layout,
            real_parts: st.real_parts.clone(),
            pair_parts: st.pair_parts.clone(),
            real_tree_signs: st.real_trees.iter().map(|(t, i)| t[*i].1).collect(),
        };
        f(g, &prov);
        Ok(())
    }
}

struct ChildState {
    real_parts: Vec<(Partition, Partition)>,
    pair_parts: Vec<(Partition, Partition)>,
    real_trees: Vec<(Arc<Vec<(TreeMap, i32)>>, usize)>,
    pair_trees: Vec<(Arc<Vec<TreeMap>>, usize)>,
}

fn take(pool: &BTreeMap<u32, u32>, p: &Partition, copies: u32) -> BTreeMap<u32, u32> {
    let mut out = pool.clone();
    for &x in p.parts() {
        *out.get_mut(&x).expect("sub-multiset") -= copies;
    }
    out
}

/// All increasing dessins of type `t`, sorted by canonical code.
pub fn enumerate_dessins(t: &TypeList) -> Result<Vec<Dessin>> {
    Ok(Explicit::new(Marking::MinIndex)
        .enumerate(t)?
        .as_ref()
        .clone())
}

/// Sum of dessin signs over the explicit enumeration.
pub fn explicit_s_number(t: &TypeList) -> Result<i64> {
    if t.k() == 0 {
        return Ok(1);
    }
    let ds = Explicit::new(Marking::MinIndex).enumerate(t)?;
    ds.iter().map(|d| dessin_sign(d).map(i64::from)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tl(s: &str) -> TypeList {
        TypeList::parse(s).unwrap()
    }

    #[test]
    fn quartic_example() {
        let ds = enumerate_dessins(&tl("2,2;2,1,1")).unwrap();
        assert_eq!(ds.len(), 2);
        let mut signs: Vec<i32> = ds.iter().map(|d| dessin_sign(d).unwrap()).collect();
        signs.sort();
        assert_eq!(signs, vec![-1, 1]);
        for d in &ds {
            assert!(d.validate(&tl("2,2;2,1,1")).is_empty());
        }
        assert_ne!(ds[0].canonical_code(), ds[1].canonical_code());
        assert!(enumerate_dessins(&tl("2,1,1;2,2")).unwrap().is_empty());
    }

    #[test]
    fn simple_quintic() {
        let ds = enumerate_dessins(&tl("2,1,1,1;2,1,1,1;2,1,1,1;2,1,1,1")).unwrap();
        assert_eq!(ds.len(), 5);
        for d in &ds {
            assert_eq!(dessin_sign(d).unwrap(), 1);
        }
    }

    #[test]
    fn enumerated_dessins_validate() {
        for s in [
            "3,1;2,1,1",
            "2,1;2,1",
            "3;",
            "2,1,1;3,1",
            "2,2,1;2,1,1,1;2,1,1,1",
        ] {
            let s = s.trim_end_matches(';');
            let t = tl(s);
            for d in enumerate_dessins(&t).unwrap().iter() {
                let v = d.validate(&t);
                assert!(v.is_empty(), "{s}: {v:?}");
            }
        }
    }

    #[test]
    fn enhanced_sign_on_star() {
        let base = Dessin::star(3);
        let mut map = BTreeMap::new();
        let p = Partition::parse;
        map.insert(0, (p("2,1").unwrap(), p("1,1,1").unwrap()));
        let e = EnhancedDessin::new(base, map).unwrap();
        assert_eq!(enhanced_sign(&e).unwrap(), 1);
    }

    #[test]
    fn special_disorder_count() {
        let p = |s: &str| Partition::parse(s).unwrap();
        let left = (p("2"), p("1,1"));
        let right = (p("1,1"), p("1,1"));
        assert_eq!(special_disorders(&[&left, &right]), 2);
    }
}
