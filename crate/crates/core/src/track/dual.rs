//! Ideal triangulations of the surface dual to a trivalent track.

use serde::{Deserialize, Serialize};

use super::{Port, Slot, TrackError, TrainTrack};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TriangleSide {
    pub triangle: usize,
    pub side: u8,
}

/// Triangle `t` goes to `triangles[t]`, its side `j` to side
/// `(j + shifts[t]) % 3` there, and edge `e` to `edges[e]`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct TriangulationIso {
    pub triangles: Vec<usize>,
    pub shifts: Vec<u8>,
    pub edges: Vec<usize>,
}

/// Triangles list their edges counterclockwise. Rotations carry no meaning.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct IdealTriangulation2 {
    triangles: Vec<[usize; 3]>,
    edges: Vec<[TriangleSide; 2]>,
}

impl IdealTriangulation2 {
    pub fn new(triangles: Vec<[usize; 3]>) -> Result<Self, TrackError> {
        let ne = triangles
            .iter()
            .flatten()
            .map(|&e| e + 1)
            .max()
            .unwrap_or(0);
        let mut found: Vec<Vec<TriangleSide>> = vec![Vec::new(); ne];
        for (t, tri) in triangles.iter().enumerate() {
            for (k, &e) in tri.iter().enumerate() {
                found[e].push(TriangleSide {
                    triangle: t,
                    side: k as u8,
                });
            }
        }
        let mut edges = Vec::with_capacity(ne);
        for (e, f) in found.into_iter().enumerate() {
            if f.len() != 2 {
                return Err(TrackError::IncompleteTrack(format!(
                    "edge {} has {} sides",
                    e,
                    f.len()
                )));
            }
            edges.push([f[0], f[1]]);
        }
        Ok(IdealTriangulation2 { triangles, edges })
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn triangle(&self, t: usize) -> [usize; 3] {
        self.triangles[t]
    }

    pub fn edge_sides(&self, e: usize) -> [TriangleSide; 2] {
        self.edges[e]
    }

    /// Ideal vertices, as cycles of triangle corners `(triangle, side)`; the
    /// corner at `side` sits between that side and the next one.
    pub fn vertices(&self) -> Vec<Vec<TriangleSide>> {
        let mut seen = vec![[false; 3]; self.triangles.len()];
        let mut out = Vec::new();
        for t in 0..self.triangles.len() {
            for k in 0..3 {
                if seen[t][k] {
                    continue;
                }
                let mut cyc = Vec::new();
                let (mut ct, mut ck) = (t, k);
                while !seen[ct][ck] {
                    seen[ct][ck] = true;
                    cyc.push(TriangleSide {
                        triangle: ct,
                        side: ck as u8,
                    });
                    // cross the next side counterclockwise to the neighbor
                    let nk = (ck + 1) % 3;
                    let e = self.triangles[ct][nk];
                    let other = self.across(
                        e,
                        TriangleSide {
                            triangle: ct,
                            side: nk as u8,
                        },
                    );
                    ct = other.triangle;
                    ck = other.side as usize;
                }
                out.push(cyc);
            }
        }
        out
    }

    fn across(&self, e: usize, from: TriangleSide) -> TriangleSide {
        let [a, b] = self.edges[e];
        if a == from {
            b
        } else {
            a
        }
    }

    /// Renames triangle `t` to `tri_map[t]` and edge `e` to `edge_map[e]`,
    /// keeping the side order of every triangle.
    pub fn relabel(&self, tri_map: &[usize], edge_map: &[usize]) -> IdealTriangulation2 {
        let mut tris = vec![[0; 3]; self.triangles.len()];
        for (t, tri) in self.triangles.iter().enumerate() {
            tris[tri_map[t]] = tri.map(|e| edge_map[e]);
        }
        IdealTriangulation2::new(tris).expect("relabeling keeps every edge on two sides")
    }

    /// Flips edge `e` inside the quadrilateral formed by its two triangles.
    pub fn whitehead(&self, e: usize) -> Result<IdealTriangulation2, TrackError> {
        let [s1, s2] = self.edges[e];
        if s1.triangle == s2.triangle {
            return Err(TrackError::SelfAdjacentEdge(e));
        }
        let (t1, i1) = (s1.triangle, s1.side as usize);
        let (t2, i2) = (s2.triangle, s2.side as usize);
        let a1 = self.triangles[t1][(i1 + 1) % 3];
        let a2 = self.triangles[t1][(i1 + 2) % 3];
        let b1 = self.triangles[t2][(i2 + 1) % 3];
        let b2 = self.triangles[t2][(i2 + 2) % 3];
        let mut tris = self.triangles.clone();
        tris[t1][(i1 + 1) % 3] = a2;
        tris[t1][(i1 + 2) % 3] = b1;
        tris[t2][(i2 + 1) % 3] = b2;
        tris[t2][(i2 + 2) % 3] = a1;
        IdealTriangulation2::new(tris)
    }

    /// Every orientation-preserving isomorphism onto `other`.
    pub fn isomorphisms_to(&self, other: &IdealTriangulation2) -> Vec<TriangulationIso> {
        let n = self.triangles.len();
        if n != other.triangles.len() || self.edges.len() != other.edges.len() || n == 0 {
            return Vec::new();
        }
        let mut out = Vec::new();
        for t0 in 0..n {
            for r0 in 0..3u8 {
                if let Some(iso) = self.iso_from(other, t0, r0) {
                    out.push(iso);
                }
            }
        }
        out
    }

    fn iso_from(&self, other: &IdealTriangulation2, t0: usize, r0: u8) -> Option<TriangulationIso> {
        let n = self.triangles.len();
        let mut tri = vec![usize::MAX; n];
        let mut shift = vec![0u8; n];
        let mut edges = vec![usize::MAX; self.edges.len()];
        let mut used = vec![false; n];
        tri[0] = t0;
        shift[0] = r0;
        used[t0] = true;
        let mut stack = vec![0];
        while let Some(t) = stack.pop() {
            for j in 0..3usize {
                let k = (j + shift[t] as usize) % 3;
                let e = self.triangles[t][j];
                let f = other.triangles[tri[t]][k];
                if edges[e] == usize::MAX {
                    edges[e] = f;
                } else if edges[e] != f {
                    return None;
                }
                let o = self.across(
                    e,
                    TriangleSide {
                        triangle: t,
                        side: j as u8,
                    },
                );
                let p = other.across(
                    f,
                    TriangleSide {
                        triangle: tri[t],
                        side: k as u8,
                    },
                );
                let s = ((p.side + 3 - o.side) % 3) as u8;
                if tri[o.triangle] == usize::MAX {
                    if used[p.triangle] {
                        return None;
                    }
                    used[p.triangle] = true;
                    tri[o.triangle] = p.triangle;
                    shift[o.triangle] = s;
                    stack.push(o.triangle);
                } else if tri[o.triangle] != p.triangle || shift[o.triangle] != s {
                    return None;
                }
            }
        }
        if tri.contains(&usize::MAX) {
            return None;
        }
        Some(TriangulationIso {
            triangles: tri,
            shifts: shift,
            edges,
        })
    }

    /// Complete isomorphism invariant (up to relabeling and rotation).
    pub fn canonical_key(&self) -> Vec<usize> {
        let mut best: Option<Vec<usize>> = None;
        for t0 in 0..self.triangles.len() {
            for r0 in 0..3 {
                let key = self.key_from(t0, r0);
                if best.as_ref().is_none_or(|b| key < *b) {
                    best = Some(key);
                }
            }
        }
        best.unwrap_or_default()
    }

    fn key_from(&self, t0: usize, r0: usize) -> Vec<usize> {
        let n = self.triangles.len();
        let mut tri_label = vec![usize::MAX; n];
        let mut rot = vec![0usize; n];
        let mut edge_label = vec![usize::MAX; self.edges.len()];
        let mut order = vec![t0];
        tri_label[t0] = 0;
        rot[t0] = r0;
        let mut key = Vec::new();
        let mut i = 0;
        while i < order.len() {
            let t = order[i];
            i += 1;
            for j in 0..3 {
                let k = (rot[t] + j) % 3;
                let e = self.triangles[t][k];
                if edge_label[e] == usize::MAX {
                    edge_label[e] = key.len();
                }
                let o = self.across(
                    e,
                    TriangleSide {
                        triangle: t,
                        side: k as u8,
                    },
                );
                if tri_label[o.triangle] == usize::MAX {
                    tri_label[o.triangle] = order.len();
                    rot[o.triangle] = o.side as usize;
                    order.push(o.triangle);
                }
                let orel = (o.side as usize + 3 - rot[o.triangle]) % 3;
                key.push(tri_label[o.triangle] * 3 + orel);
            }
        }
        key
    }
}

/// The triangulation dual to `track`: triangle `s` for switch `s`, edge `b`
/// for branch `b`. Each triangle starts at the side whose branch end has the
/// smallest `(branch, end)`, so the large side is not recorded.
pub fn dual_triangulation(
    track: &TrainTrack,
) -> Result<(IdealTriangulation2, Vec<u8>), TrackError> {
    let open: Vec<usize> = track
        .regions()
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.punctured)
        .map(|(i, _)| i)
        .collect();
    if !open.is_empty() {
        return Err(TrackError::NotFullyPunctured(open));
    }
    let mut tris = Vec::with_capacity(track.num_switches());
    let mut large = Vec::with_capacity(track.num_switches());
    for s in 0..track.num_switches() {
        let ends = track.switch_slots(s);
        let start = (0..3)
            .min_by_key(|&k| (ends[k].branch, ends[k].end))
            .unwrap();
        tris.push([
            ends[start].branch,
            ends[(start + 1) % 3].branch,
            ends[(start + 2) % 3].branch,
        ]);
        large.push(((3 - start) % 3) as u8);
    }
    Ok((
        IdealTriangulation2::new(tris).expect("dual of a complete track"),
        large,
    ))
}

/// Inverse of [`dual_triangulation`]: `large[t]` is the side of triangle `t`
/// crossed by the large half-branch. The result has no punctures marked.
pub fn track_from_triangulation(
    tri: &IdealTriangulation2,
    large: &[u8],
) -> Result<TrainTrack, TrackError> {
    let mut ports = vec![[None::<Port>; 2]; tri.num_edges()];
    for t in 0..tri.num_triangles() {
        let l = large[t] as usize;
        for (j, slot) in Slot::ALL.iter().enumerate() {
            let side = (l + j) % 3;
            let e = tri.triangle(t)[side];
            let idx = tri
                .edge_sides(e)
                .iter()
                .position(|s| s.triangle == t && s.side as usize == side)
                .unwrap();
            ports[e][idx] = Some(Port::new(t, *slot));
        }
    }
    let ports: Vec<[Port; 2]> = ports
        .into_iter()
        .map(|p| [p[0].unwrap(), p[1].unwrap()])
        .collect();
    TrainTrack::from_branches(tri.num_triangles(), &ports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::track::fixtures::torus;

    #[test]
    fn torus_dual() {
        let t = torus();
        let (d, large) = dual_triangulation(&t).unwrap();
        assert_eq!(d.num_triangles(), 2);
        assert_eq!(d.num_edges(), 3);
        assert_eq!(d.vertices().len(), 1);
        let mut back = track_from_triangulation(&d, &large).unwrap();
        back.puncture_all();
        assert_eq!(back, t);
    }

    #[test]
    fn double_flip_returns() {
        let (d, _) = dual_triangulation(&torus()).unwrap();
        for e in 0..3 {
            let f = d.whitehead(e).unwrap().whitehead(e).unwrap();
            assert_eq!(f.canonical_key(), d.canonical_key());
        }
    }

    #[test]
    fn unpunctured_region_rejected() {
        let t = TrainTrack::from_branches(
            2,
            &[
                [Port::new(0, Slot::L), Port::new(1, Slot::L)],
                [Port::new(0, Slot::SR), Port::new(1, Slot::SR)],
                [Port::new(0, Slot::SL), Port::new(1, Slot::SL)],
            ],
        )
        .unwrap();
        assert_eq!(
            dual_triangulation(&t).unwrap_err(),
            TrackError::NotFullyPunctured(vec![0])
        );
    }

    #[test]
    fn vertices_match_regions() {
        let t = torus();
        let (d, _) = dual_triangulation(&t).unwrap();
        assert_eq!(d.vertices().len(), t.regions().len());
    }
}
