//! Real polynomial dessins as rotation systems with an orientation-reversing
//! involution.
//!
//! Darts carry everything: `rho` is the counterclockwise successor around the
//! vertex, `alpha` the other half of the edge, `conj` the complex conjugation.
//! Every edge is oriented `∞ → 1 → 2 → … → k → ∞`; a dart is a *tail* when its
//! edge leaves from it. Label `0` stands for `∞`.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{Partition, TypeList};
use crate::trees::disorders_of;

pub const INF: u8 = 0;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dessin {
    pub(crate) n: u32,
    pub(crate) k: u32,
    pub(crate) rho: Vec<u32>,
    pub(crate) alpha: Vec<u32>,
    pub(crate) conj: Vec<u32>,
    /// Label of the vertex the dart belongs to.
    pub(crate) label: Vec<u8>,
    pub(crate) tail: Vec<bool>,
    /// Tail dart of the real edge of type `k → ∞` arriving at `+∞`.
    pub(crate) root: u32,
}

/// A real finite vertex met while walking the real circle from `-∞` to `+∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RealVertex {
    pub label: u8,
    /// Half the valency, i.e. the ramification order.
    pub order: u32,
    /// The real dart pointing towards `+∞`.
    pub right_dart: u32,
}

impl Dessin {
    /// Builds a dessin from raw tables without validating it.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        n: u32,
        k: u32,
        rho: Vec<u32>,
        alpha: Vec<u32>,
        conj: Vec<u32>,
        label: Vec<u8>,
        tail: Vec<bool>,
        root: u32,
    ) -> Self {
        Dessin {
            n,
            k,
            rho,
            alpha,
            conj,
            label,
            tail,
            root,
        }
    }

    /// The unique dessin of type `((n))`: one finite vertex with `2n` rays
    /// alternating between `1 → ∞` and `∞ → 1`.
    pub fn star(n: u32) -> Dessin {
        let m = 2 * n as usize;
        // a_j = j, b_j = m + j
        let mut rho = vec![0u32; 2 * m];
        let mut alpha = vec![0u32; 2 * m];
        let mut conj = vec![0u32; 2 * m];
        let mut label = vec![0u8; 2 * m];
        let mut tail = vec![false; 2 * m];
        for j in 0..m {
            let a = j;
            let b = m + j;
            rho[a] = ((j + 1) % m) as u32;
            rho[b] = (m + (j + m - 1) % m) as u32;
            alpha[a] = b as u32;
            alpha[b] = a as u32;
            let mirror = (m - j) % m;
            conj[a] = mirror as u32;
            conj[b] = (m + mirror) as u32;
            label[a] = 1;
            label[b] = INF;
            tail[a] = j % 2 == 0;
            tail[b] = j % 2 == 1;
        }
        Dessin {
            n,
            k: 1,
            rho,
            alpha,
            conj,
            label,
            tail,
            root: 0,
        }
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn dart_count(&self) -> usize {
        self.rho.len()
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn rho(&self) -> &[u32] {
        &self.rho
    }

    pub fn alpha(&self) -> &[u32] {
        &self.alpha
    }

    pub fn conj(&self) -> &[u32] {
        &self.conj
    }

    pub fn labels(&self) -> &[u8] {
        &self.label
    }

    pub fn tails(&self) -> &[bool] {
        &self.tail
    }

    /// Replaces the conjugation table (used to build negative examples).
    pub fn with_conj(mut self, conj: Vec<u32>) -> Self {
        self.conj = conj;
        self
    }

    /// Applies a dart renaming: dart `d` becomes `perm[d]`.
    pub fn relabeled(&self, perm: &[u32]) -> Dessin {
        let m = self.rho.len();
        let mut out = self.clone();
        for d in 0..m {
            let p = perm[d] as usize;
            out.rho[p] = perm[self.rho[d] as usize];
            out.alpha[p] = perm[self.alpha[d] as usize];
            out.conj[p] = perm[self.conj[d] as usize];
            out.label[p] = self.label[d];
            out.tail[p] = self.tail[d];
        }
        out.root = perm[self.root as usize];
        out
    }

    /// Vertex index of every dart and the darts of each vertex in
    /// counterclockwise order starting from the smallest dart.
    pub fn vertices(&self) -> (Vec<u32>, Vec<Vec<u32>>) {
        orbits(&self.rho)
    }

    /// Faces as orbits of `rho ∘ alpha`.
    pub fn faces(&self) -> Vec<Vec<u32>> {
        let phi: Vec<u32> = (0..self.rho.len())
            .map(|d| self.rho[self.alpha[d] as usize])
            .collect();
        orbits(&phi).1
    }

    /// Walks the real circle from `-∞` to `+∞`.
    pub fn real_vertices(&self) -> Result<Vec<RealVertex>> {
        let (vid, verts) = self.vertices();
        let fixed_at = |v: usize| -> Vec<u32> {
            verts[v]
                .iter()
                .copied()
                .filter(|&d| self.conj[d as usize] == d)
                .collect()
        };
        let inf_end = self.alpha[self.root as usize];
        let inf_fixed = fixed_at(vid[inf_end as usize] as usize);
        if inf_fixed.len() != 2 || !inf_fixed.contains(&inf_end) {
            return Err(Error::InvalidDessin(vec![
                "root does not reach ∞ along the real circle".into(),
            ]));
        }
        let start = if inf_fixed[0] == inf_end {
            inf_fixed[1]
        } else {
            inf_fixed[0]
        };
        let mut out = Vec::new();
        let mut x = self.alpha[start as usize];
        let limit = verts.len();
        loop {
            let v = vid[x as usize] as usize;
            if self.label[x as usize] == INF {
                return Err(Error::InvalidDessin(vec![
                    "real circle returns to ∞ too early".into(),
                ]));
            }
            let fx = fixed_at(v);
            if fx.len() != 2 || !fx.contains(&x) {
                return Err(Error::InvalidDessin(vec![format!(
                    "real vertex at dart {x} does not have exactly two real darts"
                )]));
            }
            let y = if fx[0] == x { fx[1] } else { fx[0] };
            out.push(RealVertex {
                label: self.label[x as usize],
                order: verts[v].len() as u32 / 2,
                right_dart: y,
            });
            let next = self.alpha[y as usize];
            if self.label[next as usize] == INF {
                if y != self.root {
                    return Err(Error::InvalidDessin(vec![
                        "real circle does not end at the root".into(),
                    ]));
                }
                return Ok(out);
            }
            x = next;
            if out.len() > limit {
                return Err(Error::InvalidDessin(vec![
                    "real circle does not close".into()
                ]));
            }
        }
    }

    /// Every axiom violation; empty iff `self` is an increasing real
    /// polynomial dessin of type `t`.
    pub fn validate(&self, t: &TypeList) -> Vec<String> {
        let mut v = Vec::new();
        let m = self.rho.len();
        let k = self.k as usize;
        let n = self.n as usize;
        if self.n != t.degree() || k != t.k() {
            v.push(format!(
                "degree/level count ({}, {}) differ from type ({}, {})",
                self.n,
                self.k,
                t.degree(),
                t.k()
            ));
            return v;
        }
        if [
            self.alpha.len(),
            self.conj.len(),
            self.label.len(),
            self.tail.len(),
        ]
        .iter()
        .any(|&l| l != m)
        {
            v.push("tables have different lengths".into());
            return v;
        }
        if m != 2 * (k + 1) * n {
            v.push(format!("expected {} darts, found {m}", 2 * (k + 1) * n));
        }
        for (name, p) in [
            ("rotation", &self.rho),
            ("edge pairing", &self.alpha),
            ("conj", &self.conj),
        ] {
            if !is_permutation(p) {
                v.push(format!("{name} is not a permutation"));
                return v;
            }
        }
        if (0..m).any(|d| {
            self.alpha[d] as usize == d || self.alpha[self.alpha[d] as usize] as usize != d
        }) {
            v.push("edge pairing is not a fixed-point-free involution".into());
        }
        if (0..m).any(|d| self.conj[self.conj[d] as usize] as usize != d) {
            v.push("conj is not an involution".into());
        }
        let c = |d: usize| self.conj[d] as usize;
        if (0..m).any(|d| c(self.rho[d] as usize) != self.inv_rho(c(d))) {
            v.push("conj not orientation-reversing: conj∘rho∘conj ≠ rho⁻¹".into());
        }
        if (0..m).any(|d| c(self.alpha[d] as usize) != self.alpha[c(d)] as usize) {
            v.push("conj does not commute with the edge pairing".into());
        }
        if (0..m).any(|d| self.label[c(d)] != self.label[d] || self.tail[c(d)] != self.tail[d]) {
            v.push("conj does not preserve labels and orientations".into());
        }
        for d in 0..m {
            let a = self.alpha[d] as usize;
            if self.tail[d] == self.tail[a] {
                v.push(format!("edge at dart {d} is not oriented"));
                break;
            }
            if self.tail[d] {
                let from = self.label[d] as usize;
                let to = self.label[a] as usize;
                if from > k || to != (from + 1) % (k + 1) {
                    v.push(format!("edge at dart {d} has forbidden type {from}→{to}"));
                    break;
                }
            }
        }
        let (vid, verts) = self.vertices();
        for ds in &verts {
            if ds
                .iter()
                .any(|&d| self.label[d as usize] != self.label[ds[0] as usize])
            {
                v.push("labels are not constant around a vertex".into());
                break;
            }
        }
        if (0..m).any(|d| self.tail[self.rho[d] as usize] == self.tail[d]) {
            v.push("incoming and outgoing darts do not alternate around a vertex".into());
        }
        let mut by_label: BTreeMap<u8, Vec<u32>> = BTreeMap::new();
        for ds in &verts {
            by_label
                .entry(self.label[ds[0] as usize])
                .or_default()
                .push(ds.len() as u32);
        }
        match by_label.get(&INF) {
            Some(degs) if degs.len() == 1 && degs[0] as usize == 2 * n => {}
            _ => v.push(format!(
                "there must be exactly one ∞ vertex, of degree {}",
                2 * n
            )),
        }
        for (i, lam) in t.entries().iter().enumerate() {
            let degs = by_label.get(&((i + 1) as u8)).cloned().unwrap_or_default();
            if degs.iter().any(|d| d % 2 == 1) {
                v.push(format!("label {} has a vertex of odd degree", i + 1));
                continue;
            }
            let halves = Partition::new(degs.iter().map(|d| d / 2).collect()).ok();
            if halves.as_ref() != Some(lam) {
                v.push(format!(
                    "label {} vertex degrees are not twice {}",
                    i + 1,
                    lam
                ));
            }
        }
        let faces = self.faces();
        if faces.len() != 2 * n {
            v.push(format!("{} faces instead of {}", faces.len(), 2 * n));
        }
        for f in &faces {
            let mut seen = vec![0u32; k + 1];
            for &d in f {
                let d = d as usize;
                let t = if self.tail[d] {
                    d
                } else {
                    self.alpha[d] as usize
                };
                let ty = self.label[t] as usize;
                if ty <= k {
                    seen[ty] += 1;
                }
            }
            if seen.iter().any(|&s| s != 1) {
                v.push("a face does not contain each edge type exactly once".into());
                break;
            }
        }
        if !connected(&self.rho, &self.alpha) {
            v.push("not connected".into());
        }
        let euler = verts.len() as i64 - (m / 2) as i64 + faces.len() as i64;
        if euler != 2 {
            v.push(format!("Euler characteristic {euler} instead of 2"));
        }
        for ds in &verts {
            let fixed = ds.iter().filter(|&&d| c(d as usize) == d as usize).count();
            let invariant = ds.contains(&(c(ds[0] as usize) as u32));
            if invariant && fixed != 2 || !invariant && fixed != 0 {
                v.push("real vertices must carry exactly two real darts".into());
                break;
            }
        }
        let r = self.root as usize;
        if r >= m
            || c(r) != r
            || !self.tail[r]
            || self.label[r] as usize != k
            || self.label[self.alpha[r] as usize] != INF
        {
            v.push("root is not a real edge of type k→∞".into());
        } else if v.is_empty() {
            match self.real_vertices() {
                Ok(rv) => {
                    let on_circle = rv.len() + 1;
                    let invariant_vertices = verts
                        .iter()
                        .filter(|ds| ds.contains(&(c(ds[0] as usize) as u32)))
                        .count();
                    if on_circle != invariant_vertices {
                        v.push("real darts do not form a single circle".into());
                    }
                }
                Err(Error::InvalidDessin(e)) => v.extend(e),
                Err(e) => v.push(e.to_string()),
            }
        }
        let _ = vid;
        v
    }

    fn inv_rho(&self, d: usize) -> usize {
        // vertices are short cycles, so walking is cheap
        let mut x = d;
        loop {
            let y = self.rho[x] as usize;
            if y == d {
                return x;
            }
            x = y;
        }
    }

    /// Pairs of real finite vertices with equal labels, left one of larger
    /// degree.
    pub fn disorders(&self) -> Result<u32> {
        let rv = self.real_vertices()?;
        let seq: Vec<(u8, u32)> = rv.iter().map(|r| (r.label, r.order)).collect();
        Ok(disorders_of(&seq))
    }

    /// Root-anchored breadth-first renumbering; equal codes iff the dessins
    /// are isomorphic.
    pub fn canonical_code(&self) -> Vec<u8> {
        let m = self.rho.len();
        let mut idx = vec![u32::MAX; m];
        let mut order = Vec::with_capacity(m);
        let mut queue = VecDeque::new();
        idx[self.root as usize] = 0;
        order.push(self.root);
        queue.push_back(self.root);
        while let Some(d) = queue.pop_front() {
            for nb in [self.rho[d as usize], self.alpha[d as usize]] {
                if idx[nb as usize] == u32::MAX {
                    idx[nb as usize] = order.len() as u32;
                    order.push(nb);
                    queue.push_back(nb);
                }
            }
        }
        let wide = m > u16::MAX as usize;
        let mut out = Vec::with_capacity(8 + m * 8);
        out.extend_from_slice(&self.n.to_le_bytes());
        out.extend_from_slice(&self.k.to_le_bytes());
        let push = |out: &mut Vec<u8>, x: u32| {
            if wide {
                out.extend_from_slice(&x.to_le_bytes());
            } else {
                out.extend_from_slice(&(x as u16).to_le_bytes());
            }
        };
        for &d in &order {
            let d = d as usize;
            push(&mut out, idx[self.rho[d] as usize]);
            push(&mut out, idx[self.alpha[d] as usize]);
            push(&mut out, idx[self.conj[d] as usize]);
            out.push(self.label[d] | if self.tail[d] { 0x80 } else { 0 });
        }
        out
    }

    /// Canonical breadth-first index of every dart.
    pub fn canonical_index(&self) -> Vec<u32> {
        let m = self.rho.len();
        let mut idx = vec![u32::MAX; m];
        let mut queue = VecDeque::new();
        let mut next = 0u32;
        idx[self.root as usize] = next;
        next += 1;
        queue.push_back(self.root);
        while let Some(d) = queue.pop_front() {
            for nb in [self.rho[d as usize], self.alpha[d as usize]] {
                if idx[nb as usize] == u32::MAX {
                    idx[nb as usize] = next;
                    next += 1;
                    queue.push_back(nb);
                }
            }
        }
        idx
    }

    /// Graphviz rendering of the affine dessin (the ∞ vertex and its edges
    /// are left out). Real vertices are drawn as boxes.
    pub fn to_dot(&self) -> String {
        let (vid, verts) = self.vertices();
        let mut s = String::from("graph dessin {\n  node [shape=circle];\n");
        for (i, ds) in verts.iter().enumerate() {
            let l = self.label[ds[0] as usize];
            if l == INF {
                continue;
            }
            let real = ds.iter().any(|&d| self.conj[d as usize] == d);
            let _ = writeln!(
                s,
                "  v{i} [label=\"{l}\"{}];",
                if real { ", shape=box" } else { "" }
            );
        }
        for d in 0..self.rho.len() {
            let a = self.alpha[d] as usize;
            if !self.tail[d] || self.label[d] == INF || self.label[a] == INF {
                continue;
            }
            let real = self.conj[d] as usize == d;
            let _ = writeln!(
                s,
                "  v{} -- v{}{};",
                vid[d],
                vid[a],
                if real { " [penwidth=2]" } else { "" }
            );
        }
        s.push_str("}\n");
        s
    }
}

/// Sign of a dessin: parity of its disorders.
pub fn dessin_sign(d: &Dessin) -> Result<i32> {
    Ok(if d.disorders()? % 2 == 0 { 1 } else { -1 })
}

/// `dessin_sign` after checking validity against `t`.
pub fn checked_sign(d: &Dessin, t: &TypeList) -> Result<i32> {
    let v = d.validate(t);
    if !v.is_empty() {
        return Err(Error::InvalidDessin(v));
    }
    dessin_sign(d)
}

/// Canonical code after checking validity against `t`.
pub fn checked_code(d: &Dessin, t: &TypeList) -> Result<Vec<u8>> {
    let v = d.validate(t);
    if !v.is_empty() {
        return Err(Error::InvalidDessin(v));
    }
    Ok(d.canonical_code())
}

pub(crate) fn orbits(p: &[u32]) -> (Vec<u32>, Vec<Vec<u32>>) {
    let mut id = vec![u32::MAX; p.len()];
    let mut out = Vec::new();
    for s in 0..p.len() {
        if id[s] != u32::MAX {
            continue;
        }
        let mut cyc = Vec::new();
        let mut x = s;
        while id[x] == u32::MAX {
            id[x] = out.len() as u32;
            cyc.push(x as u32);
            x = p[x] as usize;
            if cyc.len() > p.len() {
                break;
            }
        }
        out.push(cyc);
    }
    (id, out)
}

fn is_permutation(p: &[u32]) -> bool {
    let mut seen = vec![false; p.len()];
    for &x in p {
        let x = x as usize;
        if x >= p.len() || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

fn connected(rho: &[u32], alpha: &[u32]) -> bool {
    if rho.is_empty() {
        return true;
    }
    let mut seen = vec![false; rho.len()];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(d) = stack.pop() {
        for nb in [rho[d] as usize, alpha[d] as usize] {
            if !seen[nb] {
                seen[nb] = true;
                count += 1;
                stack.push(nb);
            }
        }
    }
    count == rho.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn star_is_valid() {
        for n in 2..7 {
            let t = TypeList::parse(&n.to_string()).unwrap();
            let s = Dessin::star(n);
            assert!(s.validate(&t).is_empty(), "{:?}", s.validate(&t));
            assert_eq!(dessin_sign(&s).unwrap(), 1);
            assert_eq!(s.real_vertices().unwrap().len(), 1);
        }
    }

    #[test]
    fn star_without_conjugation_is_rejected() {
        let t = TypeList::parse("3").unwrap();
        let s = Dessin::star(3);
        let m = s.dart_count() as u32;
        let bad = s.with_conj((0..m).collect());
        let v = bad.validate(&t);
        assert!(v
            .iter()
            .any(|e| e.contains("conj not orientation-reversing")));
    }

    #[test]
    fn broken_faces_are_reported() {
        let t = TypeList::parse("3").unwrap();
        let mut s = Dessin::star(3);
        // flip the orientation of a conjugate pair of edges
        for d in [1usize, 5] {
            let a = s.alpha[d] as usize;
            s.tail[d] = !s.tail[d];
            s.tail[a] = !s.tail[a];
        }
        assert!(!s.validate(&t).is_empty());
    }

    #[test]
    fn code_is_renaming_invariant() {
        let s = Dessin::star(4);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut perm: Vec<u32> = (0..s.dart_count() as u32).collect();
        for _ in 0..20 {
            perm.shuffle(&mut rng);
            let r = s.relabeled(&perm);
            assert!(r.validate(&TypeList::parse("4").unwrap()).is_empty());
            assert_eq!(r.canonical_code(), s.canonical_code());
        }
    }

    #[test]
    fn dot_skips_infinity() {
        let d = Dessin::star(2).to_dot();
        assert_eq!(d.matches("label=").count(), 1);
    }
}
