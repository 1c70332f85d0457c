//! Ideal triangulations of 3-manifolds with taut structures.
//!
//! Face `f` of a tetrahedron is the face opposite vertex `f`. The gluing
//! permutation across face `f` sends vertices of this tetrahedron to those
//! of the neighbor. A face cooriented `In` points into its tetrahedron.
//! The π angles sit on the edge shared by the two inward faces (the bottom
//! diagonal) and the edge shared by the two outward faces (the top one).

use serde::{Deserialize, Serialize};

pub type Perm4 = [u8; 4];

pub const EDGES: [(u8, u8); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

pub fn perm_inverse(p: Perm4) -> Perm4 {
    let mut q = [0u8; 4];
    for i in 0..4 {
        q[p[i] as usize] = i as u8;
    }
    q
}

/// `(q ∘ p)(i) = q[p[i]]`.
pub fn perm_compose(q: Perm4, p: Perm4) -> Perm4 {
    [
        q[p[0] as usize],
        q[p[1] as usize],
        q[p[2] as usize],
        q[p[3] as usize],
    ]
}

pub fn perm_is_even(p: Perm4) -> bool {
    let mut inv = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    inv % 2 == 0
}

pub fn perm_to_string(p: Perm4) -> String {
    p.iter().map(|d| char::from(b'0' + d)).collect()
}

pub fn perm_from_str(s: &str) -> Option<Perm4> {
    let b = s.as_bytes();
    if b.len() != 4 {
        return None;
    }
    let mut p = [0u8; 4];
    for i in 0..4 {
        p[i] = b[i].checked_sub(b'0').filter(|&d| d < 4)?;
    }
    let mut seen = [false; 4];
    for &d in &p {
        if std::mem::replace(&mut seen[d as usize], true) {
            return None;
        }
    }
    Some(p)
}

pub fn edge_index(a: u8, b: u8) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    EDGES
        .iter()
        .position(|&e| e == (a, b))
        .expect("distinct vertices")
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Coorientation {
    In,
    Out,
}

impl Coorientation {
    pub fn flip(self) -> Self {
        match self {
            Coorientation::In => Coorientation::Out,
            Coorientation::Out => Coorientation::In,
        }
    }

    pub fn tag(self) -> char {
        match self {
            Coorientation::In => 'I',
            Coorientation::Out => 'O',
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct TautTetrahedron {
    pub neighbors: [usize; 4],
    pub gluings: [Perm4; 4],
    pub coorientation: [Coorientation; 4],
}

impl TautTetrahedron {
    pub fn faces_with(&self, c: Coorientation) -> Vec<u8> {
        (0..4u8)
            .filter(|&f| self.coorientation[f as usize] == c)
            .collect()
    }

    /// Bottom and top π edges, when the face condition holds.
    pub fn pi_edges(&self) -> Option<[(u8, u8); 2]> {
        let ins = self.faces_with(Coorientation::In);
        if ins.len() != 2 {
            return None;
        }
        let outs = self.faces_with(Coorientation::Out);
        // the edge shared by two faces joins the two remaining vertices
        Some([(outs[0], outs[1]), (ins[0], ins[1])])
    }

    pub fn is_pi(&self, e: (u8, u8)) -> bool {
        let e = if e.0 < e.1 { e } else { (e.1, e.0) };
        self.pi_edges().is_some_and(|p| p.contains(&e))
    }
}

/// A corner of an edge class: tetrahedron and edge.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct EdgeCorner {
    pub tet: usize,
    pub edge: (u8, u8),
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct TautTriangulation3 {
    pub tetrahedra: Vec<TautTetrahedron>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum TautViolation {
    FaceCount { tet: usize, inward: usize },
    Gluing { tet: usize, face: u8 },
    Coorientation { tet: usize, face: u8 },
    AngleSum { edge: usize, pi_corners: usize },
}

impl std::fmt::Display for TautViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TautViolation::FaceCount { tet, inward } => {
                write!(f, "tetrahedron {} has {} inward faces", tet, inward)
            }
            TautViolation::Gluing { tet, face } => write!(
                f,
                "face {} of tetrahedron {} is glued inconsistently",
                face, tet
            ),
            TautViolation::Coorientation { tet, face } => {
                write!(
                    f,
                    "face {} of tetrahedron {} meets a face of the same coorientation",
                    face, tet
                )
            }
            TautViolation::AngleSum { edge, pi_corners } => {
                write!(
                    f,
                    "edge {} has {} corners of angle π (angle sum {}π)",
                    edge, pi_corners, pi_corners
                )
            }
        }
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
    /// Class index per element, numbered by first occurrence.
    fn classes(&mut self) -> (Vec<usize>, usize) {
        let n = self.0.len();
        let mut label = vec![usize::MAX; n];
        let mut out = vec![0; n];
        let mut count = 0;
        for x in 0..n {
            let r = self.find(x);
            if label[r] == usize::MAX {
                label[r] = count;
                count += 1;
            }
            out[x] = label[r];
        }
        (out, count)
    }
}

impl TautTriangulation3 {
    pub fn new(tetrahedra: Vec<TautTetrahedron>) -> Self {
        TautTriangulation3 { tetrahedra }
    }

    pub fn len(&self) -> usize {
        self.tetrahedra.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tetrahedra.is_empty()
    }

    /// Gluings are mutually inverse, which every other query assumes.
    pub fn check_gluings(&self) -> Vec<TautViolation> {
        let mut out = Vec::new();
        for (t, tet) in self.tetrahedra.iter().enumerate() {
            for f in 0..4u8 {
                let n = tet.neighbors[f as usize];
                let p = tet.gluings[f as usize];
                let ok = n < self.len() && {
                    let g = p[f as usize];
                    let back = &self.tetrahedra[n];
                    back.neighbors[g as usize] == t && back.gluings[g as usize] == perm_inverse(p)
                };
                if !ok {
                    out.push(TautViolation::Gluing { tet: t, face: f });
                }
            }
        }
        out
    }

    /// Edge class of every `(tet, edge index)`, and the number of classes.
    pub fn edge_classes(&self) -> (Vec<[usize; 6]>, usize) {
        let mut uf = UnionFind::new(6 * self.len());
        for (t, tet) in self.tetrahedra.iter().enumerate() {
            for f in 0..4u8 {
                let p = tet.gluings[f as usize];
                let n = tet.neighbors[f as usize];
                for (k, &(a, b)) in EDGES.iter().enumerate() {
                    if a != f && b != f {
                        uf.union(6 * t + k, 6 * n + edge_index(p[a as usize], p[b as usize]));
                    }
                }
            }
        }
        let (cls, count) = uf.classes();
        let per = (0..self.len())
            .map(|t| std::array::from_fn(|k| cls[6 * t + k]))
            .collect();
        (per, count)
    }

    /// Cyclic sequence of corners around the edge class of `start`.
    pub fn edge_walk(&self, start: EdgeCorner) -> Vec<EdgeCorner> {
        let (i, j) = start.edge;
        let others: Vec<u8> = (0..4u8).filter(|&v| v != i && v != j).collect();
        let (mut t, mut i, mut j, mut k, mut l) = (start.tet, i, j, others[0], others[1]);
        let mut out = Vec::new();
        loop {
            out.push(EdgeCorner {
                tet: t,
                edge: (i.min(j), i.max(j)),
            });
            // leave through the face opposite k
            let p = self.tetrahedra[t].gluings[k as usize];
            let n = self.tetrahedra[t].neighbors[k as usize];
            let (ni, nj, nk, nl) = (p[i as usize], p[j as usize], p[l as usize], p[k as usize]);
            t = n;
            i = ni;
            j = nj;
            k = nk;
            l = nl;
            if (t == start.tet && (i.min(j), i.max(j)) == start.edge && k == others[0])
                || out.len() > 6 * self.len()
            {
                break;
            }
        }
        out
    }

    pub fn num_edges(&self) -> usize {
        self.edge_classes().1
    }

    /// Vertex class (cusp) of every `(tet, vertex)`, and the number of cusps.
    pub fn vertex_classes(&self) -> (Vec<[usize; 4]>, usize) {
        let mut uf = UnionFind::new(4 * self.len());
        for (t, tet) in self.tetrahedra.iter().enumerate() {
            for f in 0..4u8 {
                let p = tet.gluings[f as usize];
                let n = tet.neighbors[f as usize];
                for v in (0..4u8).filter(|&v| v != f) {
                    uf.union(4 * t + v as usize, 4 * n + p[v as usize] as usize);
                }
            }
        }
        let (cls, count) = uf.classes();
        let per = (0..self.len())
            .map(|t| std::array::from_fn(|k| cls[4 * t + k]))
            .collect();
        (per, count)
    }

    pub fn num_cusps(&self) -> usize {
        self.vertex_classes().1
    }

    /// Face classes as pairs of `(tet, face)`, outward side first.
    pub fn face_classes(&self) -> Vec<[(usize, u8); 2]> {
        let mut out = Vec::new();
        for (t, tet) in self.tetrahedra.iter().enumerate() {
            for f in 0..4u8 {
                if tet.coorientation[f as usize] == Coorientation::Out {
                    let n = tet.neighbors[f as usize];
                    let g = tet.gluings[f as usize][f as usize];
                    out.push([(t, f), (n, g)]);
                }
            }
        }
        out
    }

    /// Index into [`face_classes`](Self::face_classes) for every `(tet, face)`.
    pub fn face_class_of(&self) -> Vec<[usize; 4]> {
        let mut out = vec![[usize::MAX; 4]; self.len()];
        for (i, [(a, f), (b, g)]) in self.face_classes().into_iter().enumerate() {
            out[a][f as usize] = i;
            out[b][g as usize] = i;
        }
        out
    }

    pub fn check_taut(&self) -> Result<(), Vec<TautViolation>> {
        let mut v = self.check_gluings();
        if !v.is_empty() {
            return Err(v);
        }
        for (t, tet) in self.tetrahedra.iter().enumerate() {
            let inward = tet.faces_with(Coorientation::In).len();
            if inward != 2 {
                v.push(TautViolation::FaceCount { tet: t, inward });
            }
            for f in 0..4u8 {
                let n = tet.neighbors[f as usize];
                let g = tet.gluings[f as usize][f as usize];
                if self.tetrahedra[n].coorientation[g as usize] == tet.coorientation[f as usize] {
                    v.push(TautViolation::Coorientation { tet: t, face: f });
                }
            }
        }
        if !v.is_empty() {
            return Err(v);
        }
        let (cls, count) = self.edge_classes();
        let mut pis = vec![0; count];
        for (t, tet) in self.tetrahedra.iter().enumerate() {
            for (k, &e) in EDGES.iter().enumerate() {
                if tet.is_pi(e) {
                    pis[cls[t][k]] += 1;
                }
            }
        }
        for (edge, &p) in pis.iter().enumerate() {
            if p != 2 {
                v.push(TautViolation::AngleSum {
                    edge,
                    pi_corners: p,
                });
            }
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(v)
        }
    }

    /// Orientation sign per tetrahedron, or `None` if not orientable.
    pub fn orientation(&self) -> Option<Vec<i8>> {
        let mut sign = vec![0i8; self.len()];
        for root in 0..self.len() {
            if sign[root] != 0 {
                continue;
            }
            sign[root] = 1;
            let mut stack = vec![root];
            while let Some(t) = stack.pop() {
                for f in 0..4 {
                    let n = self.tetrahedra[t].neighbors[f];
                    // compatible orientations make the gluing odd
                    let s = if perm_is_even(self.tetrahedra[t].gluings[f]) {
                        -sign[t]
                    } else {
                        sign[t]
                    };
                    if sign[n] == 0 {
                        sign[n] = s;
                        stack.push(n);
                    } else if sign[n] != s {
                        return None;
                    }
                }
            }
        }
        Some(sign)
    }

    /// Flips every coorientation.
    pub fn reverse(&self) -> TautTriangulation3 {
        let mut out = self.clone();
        for tet in &mut out.tetrahedra {
            for c in &mut tet.coorientation {
                *c = c.flip();
            }
        }
        out
    }

    /// Applies a relabeling: tetrahedron `t` becomes `tet_map[t]` with its
    /// vertices renamed by `vert_maps[t]`.
    pub fn relabel(&self, tet_map: &[usize], vert_maps: &[Perm4]) -> TautTriangulation3 {
        let n = self.len();
        let mut out = vec![None; n];
        for (t, tet) in self.tetrahedra.iter().enumerate() {
            let sigma = vert_maps[t];
            let sigma_inv = perm_inverse(sigma);
            let mut nb = [0usize; 4];
            let mut gl = [[0u8; 4]; 4];
            let mut co = [Coorientation::In; 4];
            for f in 0..4 {
                let nf = sigma[f] as usize;
                let other = tet.neighbors[f];
                nb[nf] = tet_map[other];
                gl[nf] = perm_compose(vert_maps[other], perm_compose(tet.gluings[f], sigma_inv));
                co[nf] = tet.coorientation[f];
            }
            out[tet_map[t]] = Some(TautTetrahedron {
                neighbors: nb,
                gluings: gl,
                coorientation: co,
            });
        }
        TautTriangulation3 {
            tetrahedra: out.into_iter().map(|t| t.unwrap()).collect(),
        }
    }
}
