//! Real black-and-white trees: bicolored plane trees invariant under complex
//! conjugation, stored as the real spine plus the forests hanging into the
//! upper half-plane.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::Partition;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Black,
    White,
}

impl Color {
    pub fn opposite(self) -> Color {
        match self {
            Color::Black => Color::White,
            Color::White => Color::Black,
        }
    }

    fn idx(self) -> usize {
        match self {
            Color::Black => 0,
            Color::White => 1,
        }
    }

    fn letter(self) -> char {
        match self {
            Color::Black => 'b',
            Color::White => 'w',
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::Black => "black",
            Color::White => "white",
        })
    }
}

impl std::str::FromStr for Color {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "black" | "b" => Ok(Color::Black),
            "white" | "w" => Ok(Color::White),
            _ => Err(Error::Parse(format!(
                "color must be black or white, got `{s}`"
            ))),
        }
    }
}

/// A plane tree hanging from a parent edge. `children` are listed
/// counterclockwise starting just after the parent edge. When used as a
/// free rooted tree (see [`marked_plane_tree_count`]) the root has no parent
/// and its children start at the marked half-edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PlaneTree {
    pub root_color: Color,
    pub children: Vec<PlaneTree>,
}

impl PlaneTree {
    pub fn leaf(color: Color) -> Self {
        PlaneTree {
            root_color: color,
            children: Vec::new(),
        }
    }

    pub fn new(root_color: Color, children: Vec<PlaneTree>) -> Result<Self> {
        if children.iter().any(|c| c.root_color == root_color) {
            return Err(Error::Precondition(
                "colors must alternate along edges".into(),
            ));
        }
        Ok(PlaneTree {
            root_color,
            children,
        })
    }

    /// Number of edges below the root (the parent edge excluded).
    pub fn edges(&self) -> u32 {
        self.children.iter().map(|c| 1 + c.edges()).sum()
    }

    /// Reflection: reverses the cyclic order everywhere.
    pub fn mirror(&self) -> PlaneTree {
        PlaneTree {
            root_color: self.root_color,
            children: self.children.iter().rev().map(PlaneTree::mirror).collect(),
        }
    }

    fn write_code(&self, out: &mut String) {
        out.push('(');
        for c in &self.children {
            c.write_code(out);
        }
        out.push(')');
    }

    /// Degrees of the nodes of a planted tree (parent edge counted),
    /// pushed into per-color lists.
    fn planted_degrees(&self, acc: &mut [Vec<u32>; 2]) {
        acc[self.root_color.idx()].push(self.children.len() as u32 + 1);
        for c in &self.children {
            c.planted_degrees(acc);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpineVertex {
    pub color: Color,
    /// Trees attached in the upper half-plane, left to right.
    pub upper: Vec<PlaneTree>,
}

/// A conjugation-invariant bicolored plane tree. The lower half-plane is the
/// mirror image of the upper one and is never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RealBWTree {
    spine: Vec<SpineVertex>,
}

impl RealBWTree {
    pub fn new(spine: Vec<SpineVertex>) -> Result<Self> {
        if spine.is_empty() {
            return Err(Error::Precondition("spine must have a vertex".into()));
        }
        for w in spine.windows(2) {
            if w[0].color == w[1].color {
                return Err(Error::Precondition("spine colors must alternate".into()));
            }
        }
        for v in &spine {
            for t in &v.upper {
                if t.root_color == v.color {
                    return Err(Error::Precondition(
                        "forest roots must have the opposite color".into(),
                    ));
                }
                PlaneTree::new(t.root_color, t.children.clone())?;
                check_alternation(t)?;
            }
        }
        let t = RealBWTree { spine };
        if t.edges() == 0 {
            return Err(Error::Precondition(
                "a real tree needs at least one edge".into(),
            ));
        }
        Ok(t)
    }

    pub fn spine(&self) -> &[SpineVertex] {
        &self.spine
    }

    pub fn edges(&self) -> u32 {
        let forest: u32 = self
            .spine
            .iter()
            .flat_map(|v| v.upper.iter())
            .map(|t| 1 + t.edges())
            .sum();
        self.spine.len() as u32 - 1 + 2 * forest
    }

    pub fn spine_degree(&self, i: usize) -> u32 {
        let l = self.spine.len();
        let nbrs = if l == 1 {
            0
        } else if i == 0 || i == l - 1 {
            1
        } else {
            2
        };
        nbrs + 2 * self.spine[i].upper.len() as u32
    }

    /// `(color, degree)` of the real vertices, left to right.
    pub fn real_part(&self) -> Vec<(Color, u32)> {
        (0..self.spine.len())
            .map(|i| (self.spine[i].color, self.spine_degree(i)))
            .collect()
    }

    /// Black and white degree partitions of the whole tree.
    pub fn degree_partitions(&self) -> (Partition, Partition) {
        let mut acc: [Vec<u32>; 2] = [Vec::new(), Vec::new()];
        for (i, v) in self.spine.iter().enumerate() {
            acc[v.color.idx()].push(self.spine_degree(i));
            for t in &v.upper {
                let mut half: [Vec<u32>; 2] = [Vec::new(), Vec::new()];
                t.planted_degrees(&mut half);
                for c in 0..2 {
                    acc[c].extend(half[c].iter().copied());
                    acc[c].extend(half[c].iter().copied());
                }
            }
        }
        let [b, w] = acc;
        (Partition::from_positive(b), Partition::from_positive(w))
    }

    /// Canonical serialization; two trees are isomorphic iff codes are equal.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        for v in &self.spine {
            s.push(v.color.letter());
            s.push('[');
            for t in &v.upper {
                t.write_code(&mut s);
            }
            s.push(']');
        }
        s
    }

    /// Parses the output of [`canonical`](Self::canonical).
    pub fn parse(code: &str) -> Result<Self> {
        let bytes = code.as_bytes();
        let mut pos = 0;
        let mut spine = Vec::new();
        fn tree(bytes: &[u8], pos: &mut usize, color: Color) -> Result<PlaneTree> {
            if bytes.get(*pos) != Some(&b'(') {
                return Err(Error::Parse("expected `(`".into()));
            }
            *pos += 1;
            let mut children = Vec::new();
            while bytes.get(*pos) == Some(&b'(') {
                children.push(tree(bytes, pos, color.opposite())?);
            }
            if bytes.get(*pos) != Some(&b')') {
                return Err(Error::Parse("expected `)`".into()));
            }
            *pos += 1;
            Ok(PlaneTree {
                root_color: color,
                children,
            })
        }
        while pos < bytes.len() {
            let color = match bytes[pos] {
                b'b' => Color::Black,
                b'w' => Color::White,
                _ => return Err(Error::Parse(format!("bad tree code `{code}`"))),
            };
            pos += 1;
            if bytes.get(pos) != Some(&b'[') {
                return Err(Error::Parse(format!("bad tree code `{code}`")));
            }
            pos += 1;
            let mut upper = Vec::new();
            while bytes.get(pos) == Some(&b'(') {
                upper.push(tree(bytes, &mut pos, color.opposite())?);
            }
            if bytes.get(pos) != Some(&b']') {
                return Err(Error::Parse(format!("bad tree code `{code}`")));
            }
            pos += 1;
            spine.push(SpineVertex { color, upper });
        }
        RealBWTree::new(spine)
    }

    /// Rotation by 180 degrees about the origin.
    pub fn rotate180(&self) -> RealBWTree {
        RealBWTree {
            spine: self
                .spine
                .iter()
                .rev()
                .map(|v| SpineVertex {
                    color: v.color,
                    upper: v.upper.iter().rev().map(PlaneTree::mirror).collect(),
                })
                .collect(),
        }
    }
}

fn check_alternation(t: &PlaneTree) -> Result<()> {
    for c in &t.children {
        if c.root_color == t.root_color {
            return Err(Error::Precondition(
                "colors must alternate along edges".into(),
            ));
        }
        check_alternation(c)?;
    }
    Ok(())
}

impl fmt::Display for RealBWTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

/// Pairs of real vertices of the same color whose left member has the larger
/// degree.
pub fn tree_disorders(t: &RealBWTree) -> u32 {
    disorders_of(&t.real_part())
}

pub(crate) fn disorders_of<C: PartialEq>(seq: &[(C, u32)]) -> u32 {
    let mut d = 0;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i].0 == seq[j].0 && seq[i].1 > seq[j].1 {
                d += 1;
            }
        }
    }
    d
}

pub fn tree_sign(t: &RealBWTree) -> i32 {
    if tree_disorders(t).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Color of the rightmost real vertex.
pub fn tree_side(t: &RealBWTree) -> Color {
    t.spine.last().expect("non-empty spine").color
}

pub fn tree_weight(t: &RealBWTree) -> i32 {
    let rp = t.real_part();
    let l = rp.len();
    if (0..l).any(|i| rp[i] != rp[l - 1 - i]) {
        return 0;
    }
    if l == 1 {
        return 1;
    }
    if rp[l / 2].0 == rp[0].0 {
        -1
    } else {
        1
    }
}

type Budget = [Vec<u32>; 2];

fn budget_from(p: &Partition, e: u32) -> Vec<u32> {
    let mut v = vec![0u32; e as usize + 2];
    for &x in p.parts() {
        v[x as usize] += 1;
    }
    v
}

fn check_sizes(lb: &Partition, lw: &Partition) -> Result<u32> {
    if lb.size() != lw.size() {
        return Err(Error::SizeMismatch {
            black: lb.size(),
            white: lw.size(),
        });
    }
    if lb.size() == 0 {
        return Err(Error::Precondition(
            "a real tree needs at least one edge".into(),
        ));
    }
    Ok(lb.size())
}

/// All isomorphism classes of real trees with black degrees `lb` and white
/// degrees `lw`, sorted by canonical code.
pub fn enumerate_real_trees(lb: &Partition, lw: &Partition) -> Result<Vec<RealBWTree>> {
    let e = check_sizes(lb, lw)?;
    let full: Budget = [budget_from(lb, e), budget_from(lw, e)];
    let mut out = Vec::new();
    for first in [Color::Black, Color::White] {
        // spine length has the parity of e + 1
        let mut len = if e % 2 == 0 { 1 } else { 2 };
        while len <= e as usize + 1 {
            let colors: Vec<Color> = (0..len)
                .map(|i| if i % 2 == 0 { first } else { first.opposite() })
                .collect();
            let mut budget = full.clone();
            let mut roots = vec![0u32; len];
            choose_spine(&colors, 0, &mut budget, &mut roots, &mut out);
            len += 2;
        }
    }
    out.sort_by_cached_key(RealBWTree::canonical);
    debug_assert!(out.windows(2).all(|w| w[0].canonical() != w[1].canonical()));
    Ok(out)
}

fn choose_spine(
    colors: &[Color],
    i: usize,
    budget: &mut Budget,
    roots: &mut Vec<u32>,
    out: &mut Vec<RealBWTree>,
) {
    let l = colors.len();
    if i == l {
        // the rest of the degrees come in conjugate pairs
        if budget.iter().any(|b| b.iter().any(|&m| m % 2 == 1)) {
            return;
        }
        let mut half: Budget = [
            budget[0].iter().map(|m| m / 2).collect(),
            budget[1].iter().map(|m| m / 2).collect(),
        ];
        let nodes: u32 = half.iter().flatten().sum();
        let slots: u32 = roots.iter().sum::<u32>()
            + half
                .iter()
                .flat_map(|b| {
                    b.iter()
                        .enumerate()
                        .map(|(d, &m)| m * (d as u32).saturating_sub(1))
                })
                .sum::<u32>();
        if nodes != slots {
            return;
        }
        let mut seq = Vec::new();
        let mut stack = Vec::new();
        let mut seqs = Vec::new();
        forest_sequences(colors, roots, 0, &mut half, &mut stack, &mut seq, &mut seqs);
        for s in seqs {
            out.push(decode(colors, roots, &s));
        }
        return;
    }
    let nbrs = if l == 1 {
        0
    } else if i == 0 || i == l - 1 {
        1
    } else {
        2
    };
    let c = colors[i].idx();
    for d in 1..budget[c].len() {
        if budget[c][d] == 0 || (d as u32) < nbrs || (d as u32 - nbrs) % 2 == 1 {
            continue;
        }
        budget[c][d] -= 1;
        roots[i] = (d as u32 - nbrs) / 2;
        choose_spine(colors, i + 1, budget, roots, out);
        budget[c][d] += 1;
    }
}

/// Preorder degree sequences of the upper forests, spine vertex by spine
/// vertex, consuming the budget exactly.
fn forest_sequences(
    colors: &[Color],
    roots: &[u32],
    next: usize,
    budget: &mut Budget,
    stack: &mut Vec<Color>,
    seq: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    let Some(color) = stack.pop() else {
        if next == colors.len() {
            if budget.iter().all(|b| b.iter().all(|&m| m == 0)) {
                out.push(seq.clone());
            }
            return;
        }
        let c = colors[next].opposite();
        stack.extend(std::iter::repeat_n(c, roots[next] as usize));
        forest_sequences(colors, roots, next + 1, budget, stack, seq, out);
        stack.truncate(stack.len() - roots[next] as usize);
        return;
    };
    let ci = color.idx();
    for d in 1..budget[ci].len() {
        if budget[ci][d] == 0 {
            continue;
        }
        budget[ci][d] -= 1;
        let base = stack.len();
        stack.extend(std::iter::repeat_n(color.opposite(), d - 1));
        seq.push(d as u32);
        forest_sequences(colors, roots, next, budget, stack, seq, out);
        seq.pop();
        stack.truncate(base);
        budget[ci][d] += 1;
    }
    stack.push(color);
}

fn decode(colors: &[Color], roots: &[u32], seq: &[u32]) -> RealBWTree {
    let mut it = seq.iter();
    let spine = colors
        .iter()
        .zip(roots)
        .map(|(&c, &r)| SpineVertex {
            color: c,
            upper: (0..r)
                .map(|_| build_planted(c.opposite(), &mut it))
                .collect(),
        })
        .collect();
    RealBWTree { spine }
}

/// Sum of tree signs over the trees of the given side.
pub fn signed_sum(lb: &Partition, lw: &Partition, side: Color) -> Result<i64> {
    Ok(enumerate_real_trees(lb, lw)?
        .iter()
        .filter(|t| tree_side(t) == side)
        .map(|t| tree_sign(t) as i64)
        .sum())
}

/// Memoized [`signed_sum`], shared across threads.
pub fn signed_sum_cached(lb: &Partition, lw: &Partition, side: Color) -> Result<i64> {
    static CACHE: Mutex<Option<HashMap<(Partition, Partition, Color), i64>>> = Mutex::new(None);
    let key = (lb.clone(), lw.clone(), side);
    if let Some(v) = CACHE
        .lock()
        .unwrap()
        .get_or_insert_with(HashMap::new)
        .get(&key)
    {
        return Ok(*v);
    }
    let v = signed_sum(lb, lw, side)?;
    CACHE
        .lock()
        .unwrap()
        .get_or_insert_with(HashMap::new)
        .insert(key, v);
    Ok(v)
}

/// Number of plane bicolored trees with black degrees `nb`, white degrees
/// `nw` and one marked white half-edge, up to mark-preserving isomorphism.
///
/// A marked half-edge roots the tree, so classes are white-rooted plane trees
/// whose root children are read counterclockwise from the mark; these are
/// counted through their preorder degree sequences.
pub fn marked_plane_tree_count(nb: &Partition, nw: &Partition) -> Result<BigInt> {
    let e = check_sizes(nb, nw)?;
    if nb.len() + nw.len() != e as usize + 1 {
        return Ok(BigInt::zero());
    }
    let budget: Budget = [budget_from(nb, e), budget_from(nw, e)];
    let mut memo = HashMap::new();
    let mut total = BigInt::zero();
    for d in 1..budget[1].len() {
        if budget[1][d] == 0 {
            continue;
        }
        let mut b = budget.clone();
        b[1][d] -= 1;
        // the root has no parent edge: d children, stored as d pending slots
        let stack = vec![Color::Black; d];
        total += count_sequences(&mut b, stack, &mut memo);
    }
    Ok(total)
}

fn count_sequences(
    budget: &mut Budget,
    mut stack: Vec<Color>,
    memo: &mut HashMap<(Budget, Vec<Color>), BigInt>,
) -> BigInt {
    let Some(color) = stack.pop() else {
        return if budget.iter().all(|b| b.iter().all(|&m| m == 0)) {
            BigInt::from(1)
        } else {
            BigInt::zero()
        };
    };
    stack.push(color);
    let key = (budget.clone(), stack.clone());
    if let Some(v) = memo.get(&key) {
        return v.clone();
    }
    stack.pop();
    let ci = color.idx();
    let mut total = BigInt::zero();
    for d in 1..budget[ci].len() {
        if budget[ci][d] == 0 {
            continue;
        }
        budget[ci][d] -= 1;
        let mut s = stack.clone();
        s.extend(std::iter::repeat_n(color.opposite(), d - 1));
        total += count_sequences(budget, s, memo);
        budget[ci][d] += 1;
    }
    memo.insert(key, total.clone());
    total
}

/// The marked trees themselves: white roots whose children are listed
/// counterclockwise, the last child edge being the marked half-edge.
pub fn enumerate_marked_trees(nb: &Partition, nw: &Partition) -> Result<Vec<PlaneTree>> {
    let e = check_sizes(nb, nw)?;
    let mut out = Vec::new();
    if nb.len() + nw.len() != e as usize + 1 {
        return Ok(out);
    }
    let budget: Budget = [budget_from(nb, e), budget_from(nw, e)];
    for d in 1..budget[1].len() {
        if budget[1][d] == 0 {
            continue;
        }
        let mut b = budget.clone();
        b[1][d] -= 1;
        let mut stack = vec![Color::Black; d];
        let mut seq = Vec::new();
        let mut seqs = Vec::new();
        forest_sequences(&[], &[], 0, &mut b, &mut stack, &mut seq, &mut seqs);
        for s in seqs {
            let mut it = s.iter();
            let children = (0..d)
                .map(|_| build_planted(Color::Black, &mut it))
                .collect();
            out.push(PlaneTree {
                root_color: Color::White,
                children,
            });
        }
    }
    Ok(out)
}

fn build_planted(color: Color, it: &mut std::slice::Iter<'_, u32>) -> PlaneTree {
    let d = *it.next().expect("sequence long enough");
    PlaneTree {
        root_color: color,
        children: (1..d)
            .map(|_| build_planted(color.opposite(), it))
            .collect(),
    }
}

/// Memoized [`marked_plane_tree_count`].
pub fn marked_count_cached(nb: &Partition, nw: &Partition) -> Result<BigInt> {
    static CACHE: Mutex<Option<HashMap<(Partition, Partition), BigInt>>> = Mutex::new(None);
    let key = (nb.clone(), nw.clone());
    if let Some(v) = CACHE
        .lock()
        .unwrap()
        .get_or_insert_with(HashMap::new)
        .get(&key)
    {
        return Ok(v.clone());
    }
    let v = marked_plane_tree_count(nb, nw)?;
    CACHE
        .lock()
        .unwrap()
        .get_or_insert_with(HashMap::new)
        .insert(key, v.clone());
    Ok(v)
}

/// Cut-and-paste involution between even-edge trees with a single real vertex
/// and palindromic trees with several real vertices.
///
/// Forward direction: follow the midline of the rightmost upper branch of the
/// lone real vertex. At a node of even degree `d` the midline continues
/// through the middle child and splits the others into the `d/2 - 1` children
/// before it (part A) and the ones after it (part B); at a node of odd degree
/// it stops and the children split evenly. The midline nodes are laid out on
/// the real axis, A parts on the right and B parts on the left.
pub fn midline_bijection(t: &RealBWTree) -> Result<RealBWTree> {
    if t.edges() % 2 == 1 {
        return Err(Error::Precondition(
            "midline needs an even edge count".into(),
        ));
    }
    if t.spine.len() == 1 {
        Ok(unfold(t))
    } else {
        if tree_weight(t) == 0 {
            return Err(Error::Precondition(
                "midline inverse needs a palindromic real part".into(),
            ));
        }
        Ok(fold(t))
    }
}

fn unfold(t: &RealBWTree) -> RealBWTree {
    let v = &t.spine[0];
    let mut rest = v.upper.clone();
    let mut node = rest.pop().expect("even edge count means a branch exists");
    let mut a_side = Vec::new();
    let mut b_side = Vec::new();
    loop {
        let d = node.children.len() + 1;
        let mut children = std::mem::take(&mut node.children);
        if d.is_multiple_of(2) {
            let mid = d / 2 - 1;
            let b: Vec<PlaneTree> = children.split_off(mid + 1);
            let next = children.pop().expect("middle child");
            a_side.push(side_vertex(node.root_color, &children));
            b_side.push(side_vertex(node.root_color, &b));
            node = next;
        } else {
            let b = children.split_off((d - 1) / 2);
            a_side.push(side_vertex(node.root_color, &children));
            b_side.push(side_vertex(node.root_color, &b));
            break;
        }
    }
    let mut spine: Vec<SpineVertex> = b_side.into_iter().rev().collect();
    spine.push(SpineVertex {
        color: v.color,
        upper: rest,
    });
    spine.extend(a_side);
    RealBWTree { spine }
}

fn side_vertex(color: Color, part: &[PlaneTree]) -> SpineVertex {
    SpineVertex {
        color,
        upper: part.iter().map(PlaneTree::mirror).collect(),
    }
}

fn fold(t: &RealBWTree) -> RealBWTree {
    let l = t.spine.len();
    let mid = l / 2;
    let unmirror =
        |v: &SpineVertex| -> Vec<PlaneTree> { v.upper.iter().map(PlaneTree::mirror).collect() };
    let mut node: Option<PlaneTree> = None;
    for j in (1..=mid).rev() {
        let a = &t.spine[mid + j];
        let b = &t.spine[mid - j];
        let mut children = unmirror(a);
        if let Some(n) = node.take() {
            children.push(n);
        }
        children.extend(unmirror(b));
        node = Some(PlaneTree {
            root_color: a.color,
            children,
        });
    }
    let mut upper = t.spine[mid].upper.clone();
    upper.push(node.expect("several real vertices"));
    RealBWTree {
        spine: vec![SpineVertex {
            color: t.spine[mid].color,
            upper,
        }],
    }
}

/// Graphviz rendering: spine on one rank, upper forests above it, disorders
/// as dashed red arcs when requested.
pub fn tree_to_dot(t: &RealBWTree, show_disorders: bool) -> String {
    let mut s = String::from("graph tree {\n  node [shape=circle, style=filled, label=\"\"];\n");
    let mut next_id = 0usize;
    let fill = |c: Color| if c == Color::Black { "black" } else { "white" };
    let mut spine_ids = Vec::new();
    for (i, v) in t.spine.iter().enumerate() {
        let id = next_id;
        next_id += 1;
        spine_ids.push(id);
        let _ = writeln!(
            s,
            "  n{id} [fillcolor={}, xlabel=\"{}\"];",
            fill(v.color),
            t.spine_degree(i)
        );
    }
    let _ = writeln!(
        s,
        "  {{ rank=same; {} }}",
        spine_ids
            .iter()
            .map(|i| format!("n{i}"))
            .collect::<Vec<_>>()
            .join("; ")
    );
    for w in spine_ids.windows(2) {
        let _ = writeln!(s, "  n{} -- n{};", w[0], w[1]);
    }
    fn emit(t: &PlaneTree, parent: usize, next_id: &mut usize, s: &mut String) {
        let id = *next_id;
        *next_id += 1;
        let fill = if t.root_color == Color::Black {
            "black"
        } else {
            "white"
        };
        let _ = writeln!(s, "  n{id} [fillcolor={fill}];");
        let _ = writeln!(s, "  n{id} -- n{parent};");
        for c in &t.children {
            emit(c, id, next_id, s);
        }
    }
    for (i, v) in t.spine.iter().enumerate() {
        for tr in &v.upper {
            emit(tr, spine_ids[i], &mut next_id, &mut s);
        }
    }
    if show_disorders {
        let rp = t.real_part();
        for i in 0..rp.len() {
            for j in i + 1..rp.len() {
                if rp[i].0 == rp[j].0 && rp[i].1 > rp[j].1 {
                    let _ = writeln!(
                        s,
                        "  n{} -- n{} [style=dashed, color=red, constraint=false];",
                        spine_ids[i], spine_ids[j]
                    );
                }
            }
        }
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{partitions_of, Partition};
    use proptest::prelude::*;

    fn p(v: &[u32]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    fn all_trees(e: u32) -> Vec<RealBWTree> {
        let mut out = Vec::new();
        for lb in partitions_of(e) {
            for lw in partitions_of(e) {
                out.extend(enumerate_real_trees(&lb, &lw).unwrap());
            }
        }
        out
    }

    #[test]
    fn single_edge() {
        let ts = enumerate_real_trees(&p(&[1]), &p(&[1])).unwrap();
        assert_eq!(ts.len(), 2);
        for t in &ts {
            assert_eq!(tree_disorders(t), 0);
            assert_eq!(tree_sign(t), 1);
            assert_eq!(tree_weight(t), 0);
        }
        assert_eq!(signed_sum(&p(&[1]), &p(&[1]), Color::White).unwrap(), 1);
        assert_eq!(signed_sum(&p(&[1]), &p(&[1]), Color::Black).unwrap(), 1);
    }

    #[test]
    fn four_edges_total() {
        assert_eq!(all_trees(4).len(), 12);
    }

    #[test]
    fn family_422() {
        let lb = p(&[4, 2, 2]);
        let lw = p(&[2, 2, 1, 1, 1, 1]);
        assert_eq!(signed_sum(&lb, &lw, Color::White).unwrap(), 2);
        assert_eq!(signed_sum(&lb, &lw, Color::Black).unwrap(), 2);
    }

    #[test]
    fn rejects_mismatch() {
        assert!(enumerate_real_trees(&p(&[2]), &p(&[1])).is_err());
        assert!(marked_plane_tree_count(&p(&[2]), &p(&[1])).is_err());
    }

    #[test]
    fn canonical_roundtrip() {
        for t in all_trees(5) {
            let code = t.canonical();
            assert_eq!(RealBWTree::parse(&code).unwrap(), t);
            let (b, w) = t.degree_partitions();
            assert_eq!(b.size(), 5);
            assert_eq!(w.size(), 5);
        }
    }

    #[test]
    fn marked_small_counts() {
        assert_eq!(
            marked_plane_tree_count(&p(&[1]), &p(&[1])).unwrap(),
            BigInt::from(1)
        );
        assert_eq!(
            marked_plane_tree_count(&p(&[2]), &p(&[1, 1])).unwrap(),
            BigInt::from(1)
        );
        assert_eq!(
            marked_plane_tree_count(&p(&[1, 1]), &p(&[2])).unwrap(),
            BigInt::from(1)
        );
        assert_eq!(
            marked_plane_tree_count(&p(&[3]), &p(&[2, 1])).unwrap(),
            BigInt::zero()
        );
    }

    #[test]
    fn marked_enumeration_matches_count() {
        for e in 1..7 {
            for nb in partitions_of(e) {
                for nw in partitions_of(e) {
                    let ts = enumerate_marked_trees(&nb, &nw).unwrap();
                    let c = marked_plane_tree_count(&nb, &nw).unwrap();
                    assert_eq!(BigInt::from(ts.len()), c);
                    let mut sorted = ts.clone();
                    sorted.sort();
                    sorted.dedup();
                    assert_eq!(sorted.len(), ts.len());
                }
            }
        }
    }

    #[test]
    fn odd_edge_weights_vanish() {
        for e in [1, 3, 5] {
            for t in all_trees(e) {
                assert_eq!(tree_weight(&t), 0);
            }
        }
    }

    #[test]
    fn midline_is_involution() {
        for e in [2, 4, 6] {
            for t in all_trees(e) {
                if t.spine().len() == 1 || tree_weight(&t) != 0 {
                    let u = midline_bijection(&t).unwrap();
                    assert_eq!(u.degree_partitions(), t.degree_partitions());
                    assert_ne!(u.spine().len() == 1, t.spine().len() == 1);
                    assert_eq!(midline_bijection(&u).unwrap(), t);
                }
            }
        }
        let odd = &all_trees(3)[0];
        assert!(midline_bijection(odd).is_err());
    }

    #[test]
    fn dot_mentions_every_vertex() {
        let t = RealBWTree::parse("b[(())]w[]").unwrap();
        let d = tree_to_dot(&t, true);
        assert!(d.starts_with("graph tree"));
        assert_eq!(d.matches("fillcolor").count(), 4);
    }

    proptest! {
        #[test]
        fn rotation_preserves_sign_for_mixed_borders(e in 1u32..7, pick in 0usize..10_000) {
            let ts = all_trees(e);
            let t = &ts[pick % ts.len()];
            let r = t.rotate180();
            prop_assert_eq!(r.rotate180(), t.clone());
            if t.spine()[0].color != tree_side(t) {
                prop_assert_eq!(tree_sign(&r), tree_sign(t));
            }
        }

        #[test]
        fn enumeration_respects_degrees(e in 1u32..7, i in 0usize..100, j in 0usize..100) {
            let parts = partitions_of(e);
            let lb = &parts[i % parts.len()];
            let lw = &parts[j % parts.len()];
            for t in enumerate_real_trees(lb, lw).unwrap() {
                prop_assert_eq!(t.degree_partitions(), (lb.clone(), lw.clone()));
                prop_assert_eq!(t.edges(), e);
            }
        }
    }
}
