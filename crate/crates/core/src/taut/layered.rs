//! Layered taut triangulations swept out by periodic splitting sequences.
//!
//! Each split of a large branch `e` between switches `s1, s2` adds one
//! tetrahedron on top of the two triangles dual to `s1, s2`. Its vertices
//! are `0, 1` (the ends of `e`, the bottom diagonal) and `2, 3` (the cusp
//! corners of `s1, s2`, joined by the new diagonal). Faces 3 and 2 are the
//! old triangles, faces 1 and 0 the new ones.

use serde::{Deserialize, Serialize};

use super::triangulation::{
    perm_inverse, Coorientation, Perm4, TautTetrahedron, TautTriangulation3,
};
use super::TautError;
use crate::moves::{MoveKind, MoveRecord, PeriodicityCertificate, SplittingSequence, TrackIso};
use crate::track::{
    dual_triangulation, BranchId, IdealTriangulation2, SwitchId, TrainTrack, TriangulationIso,
};

/// Tetrahedron vertex at each triangle corner, indexed by the opposite slot
/// `[L, SR, SL]`.
pub type CornerMap = [u8; 3];

const OLD_S1: CornerMap = [2, 1, 0];
const OLD_S2: CornerMap = [3, 0, 1];
const LEFT_S1: CornerMap = [2, 3, 0];
const LEFT_S2: CornerMap = [3, 2, 1];
const RIGHT_S1: CornerMap = [2, 1, 3];
const RIGHT_S2: CornerMap = [3, 0, 2];

fn missing_vertex(m: CornerMap) -> u8 {
    6 - m.iter().sum::<u8>()
}

/// A surface triangle seen as a face of the 3-manifold.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct FaceRef {
    pub tet: usize,
    pub face: u8,
    /// Tetrahedron vertex at the corner opposite each side of the layer's
    /// normalized triangle.
    pub corners: [u8; 3],
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LayeredStructure {
    /// Surface triangulations of states `n .. n + m - 1`.
    pub layers: Vec<IdealTriangulation2>,
    /// Per layer and triangle, the face it occupies in the 3-manifold.
    pub faces: Vec<Vec<FaceRef>>,
    /// Per step, the split branches with the tetrahedra attached for them.
    pub moves: Vec<Vec<(BranchId, usize)>>,
    pub closing: TrackIso,
}

impl LayeredStructure {
    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    /// The same layers swept in the opposite direction, to be paired with
    /// the reversed triangulation.
    pub fn reversed(&self) -> LayeredStructure {
        let m = self.layers.len();
        let iso = &self.closing;
        let mut top_faces = self.faces[0].clone();
        for (x, f) in self.faces[0].iter().enumerate() {
            top_faces[iso.switches[x]] = *f;
        }
        let mut layers = vec![self.layers[0].relabel(&iso.switches, &iso.branches)];
        let mut faces = vec![top_faces];
        for k in (1..m).rev() {
            layers.push(self.layers[k].clone());
            faces.push(self.faces[k].clone());
        }
        LayeredStructure {
            layers,
            faces,
            moves: self.moves.iter().rev().cloned().collect(),
            closing: iso.inverse(),
        }
    }
}

#[derive(Clone, Copy)]
enum Occupant {
    Base,
    Tet(usize, CornerMap),
}

struct Builder {
    tets: Vec<TautTetrahedron>,
    glued: Vec<[bool; 4]>,
}

impl Builder {
    fn add(&mut self) -> usize {
        use Coorientation::*;
        self.tets.push(TautTetrahedron {
            neighbors: [usize::MAX; 4],
            gluings: [[0, 1, 2, 3]; 4],
            coorientation: [Out, Out, In, In],
        });
        self.glued.push([false; 4]);
        self.tets.len() - 1
    }

    /// Glues the top face `(lower, lower_map)` to the bottom face `(upper, upper_map)`.
    fn glue(
        &mut self,
        lower: usize,
        lower_map: CornerMap,
        upper: usize,
        upper_map: CornerMap,
    ) -> Result<(), TautError> {
        let fl = missing_vertex(lower_map);
        let fu = missing_vertex(upper_map);
        let mut p: Perm4 = [0; 4];
        for c in 0..3 {
            p[upper_map[c] as usize] = lower_map[c];
        }
        p[fu as usize] = fl;
        if self.glued[upper][fu as usize] || self.glued[lower][fl as usize] {
            return Err(TautError::ClosingMismatch(format!(
                "face glued twice at tetrahedra {}, {}",
                lower, upper
            )));
        }
        self.tets[upper].neighbors[fu as usize] = lower;
        self.tets[upper].gluings[fu as usize] = p;
        self.tets[lower].neighbors[fl as usize] = upper;
        self.tets[lower].gluings[fl as usize] = perm_inverse(p);
        self.glued[upper][fu as usize] = true;
        self.glued[lower][fl as usize] = true;
        Ok(())
    }
}

/// Which slot each normalized side of the dual triangle of `s` carries.
fn side_slots(dual_large: &[u8], s: SwitchId) -> [usize; 3] {
    let l = dual_large[s] as usize;
    // side j holds slot (j - l) mod 3 in the order L, SR, SL
    [(3 - l) % 3, (4 - l) % 3, (5 - l) % 3]
}

/// Builds the layered triangulation of one period; within a batch the
/// splits are attached in ascending branch order, or descending if
/// `reverse_batches`.
pub fn build_layered_ordered(
    seq: &SplittingSequence,
    cert: &PeriodicityCertificate,
    reverse_batches: bool,
) -> Result<(TautTriangulation3, LayeredStructure), TautError> {
    let (n, m) = (cert.n, cert.m);
    let tracks: Vec<TrainTrack> = seq.states[n..n + m].iter().map(|s| s.0.clone()).collect();
    build_layered_from(&tracks, &seq.batches[n..n + m], &cert.iso, reverse_batches)
}

/// Layers an arbitrary closed cycle of splits: `batches[k]` carries
/// `tracks[k]` to `tracks[k + 1]`, and the last batch ends at the image of
/// `tracks[0]` under `iso`. No maximality is assumed.
pub fn build_layered_from(
    tracks: &[TrainTrack],
    batches: &[Vec<MoveRecord>],
    iso: &TrackIso,
    reverse_batches: bool,
) -> Result<(TautTriangulation3, LayeredStructure), TautError> {
    let m = tracks.len();
    let v = tracks[0].num_switches();
    let mut b = Builder {
        tets: Vec::new(),
        glued: Vec::new(),
    };
    let mut above = vec![Occupant::Base; v];
    let mut pending: Vec<Option<(usize, CornerMap)>> = vec![None; v];
    let mut snapshots = Vec::with_capacity(m);
    let mut moves = Vec::with_capacity(m);
    for k in 0..m {
        snapshots.push(above.clone());
        let mut batch: Vec<_> = batches[k].iter().collect();
        if reverse_batches {
            batch.reverse();
        }
        let mut step = Vec::new();
        for rec in batch {
            let [s1, s2] = rec.switches;
            let t = b.add();
            for (s, map) in [(s1, OLD_S1), (s2, OLD_S2)] {
                match above[s] {
                    Occupant::Tet(lower, lmap) => b.glue(lower, lmap, t, map)?,
                    Occupant::Base => pending[s] = Some((t, map)),
                }
            }
            let (m1, m2) = match rec.kind {
                MoveKind::SplitLeft => (LEFT_S1, LEFT_S2),
                MoveKind::SplitRight => (RIGHT_S1, RIGHT_S2),
                _ => {
                    return Err(TautError::ClosingMismatch(
                        "sequence contains a non-split move".into(),
                    ))
                }
            };
            above[s1] = Occupant::Tet(t, m1);
            above[s2] = Occupant::Tet(t, m2);
            step.push((rec.branch, t));
        }
        step.sort();
        moves.push(step);
    }
    // top triangle iso(s) is identified with bottom triangle s, slot for slot
    let below = |s: SwitchId| -> Result<(usize, CornerMap), TautError> {
        let mut y = iso.switches[s];
        for _ in 0..=v {
            if let Occupant::Tet(t, map) = above[y] {
                return Ok((t, map));
            }
            y = iso.switches[y];
        }
        Err(TautError::ClosingMismatch(format!(
            "triangle {} is never covered",
            s
        )))
    };
    for s in 0..v {
        if let Some((t, map)) = pending[s] {
            let (lower, lmap) = below(s)?;
            b.glue(lower, lmap, t, map)?;
        }
    }
    if b.glued.iter().any(|g| g.iter().any(|x| !x)) {
        return Err(TautError::ClosingMismatch(
            "some face is left unglued".into(),
        ));
    }

    let mut layers = Vec::with_capacity(m);
    let mut faces = Vec::with_capacity(m);
    for (j, snap) in snapshots.iter().enumerate() {
        let mut full = tracks[j].clone();
        full.puncture_all();
        let (tri, large) = dual_triangulation(&full)?;
        let mut row = Vec::with_capacity(v);
        for s in 0..v {
            let (t, map) = match (snap[s], pending[s]) {
                (Occupant::Tet(t, map), _) => (t, map),
                (Occupant::Base, Some(p)) => p,
                (Occupant::Base, None) => below(s)?,
            };
            let slots = side_slots(&large, s);
            let corners = [map[slots[0]], map[slots[1]], map[slots[2]]];
            row.push(FaceRef {
                tet: t,
                face: missing_vertex(map),
                corners,
            });
        }
        layers.push(tri);
        faces.push(row);
    }
    let tri = TautTriangulation3::new(b.tets);
    Ok((
        tri,
        LayeredStructure {
            layers,
            faces,
            moves,
            closing: iso.clone(),
        },
    ))
}

pub fn build_layered(
    seq: &SplittingSequence,
    cert: &PeriodicityCertificate,
) -> Result<(TautTriangulation3, LayeredStructure), TautError> {
    build_layered_ordered(seq, cert, false)
}

fn rotate(map: CornerMap, shift: u8) -> CornerMap {
    let r = shift as usize;
    [map[r % 3], map[(1 + r) % 3], map[(2 + r) % 3]]
}

/// Layers an arbitrary cycle of Whitehead moves, with no train track in
/// sight: `flips` are applied to `base` in order and `closing` identifies
/// `base` with the final triangulation. Corner maps here are indexed by the
/// side position within each triangle.
pub fn build_layered_flips(
    base: &IdealTriangulation2,
    flips: &[usize],
    closing: &TriangulationIso,
) -> Result<TautTriangulation3, TautError> {
    let v = base.num_triangles();
    let mut b = Builder {
        tets: Vec::new(),
        glued: Vec::new(),
    };
    let mut above = vec![Occupant::Base; v];
    let mut pending: Vec<Option<(usize, CornerMap)>> = vec![None; v];
    let mut tri = base.clone();
    for &e in flips {
        let [x, y] = tri.edge_sides(e);
        let next = tri.whitehead(e)?;
        let t = b.add();
        let at = |side: u8, m: [u8; 3]| -> CornerMap {
            let i = side as usize;
            let mut out = [0; 3];
            for k in 0..3 {
                out[(i + k) % 3] = m[k];
            }
            out
        };
        for (s, map) in [
            (x.triangle, at(x.side, OLD_S1)),
            (y.triangle, at(y.side, OLD_S2)),
        ] {
            match above[s] {
                Occupant::Tet(lower, lmap) => b.glue(lower, lmap, t, map)?,
                Occupant::Base => pending[s] = Some((t, map)),
            }
        }
        above[x.triangle] = Occupant::Tet(t, at(x.side, [1, 3, 2]));
        above[y.triangle] = Occupant::Tet(t, at(y.side, [0, 2, 3]));
        tri = next;
    }
    for s in 0..v {
        let Some((t, map)) = pending[s] else { continue };
        let (mut y, mut shift) = (closing.triangles[s], closing.shifts[s]);
        let mut found = None;
        for _ in 0..=v {
            if let Occupant::Tet(lower, lmap) = above[y] {
                found = Some((lower, rotate(lmap, shift)));
                break;
            }
            shift = (shift + closing.shifts[y]) % 3;
            y = closing.triangles[y];
        }
        let (lower, lmap) = found.ok_or_else(|| {
            TautError::ClosingMismatch(format!("triangle {} is never covered", s))
        })?;
        b.glue(lower, lmap, t, map)?;
    }
    if b.glued.iter().any(|g| g.iter().any(|x| !x)) {
        return Err(TautError::ClosingMismatch(
            "some face is left unglued".into(),
        ));
    }
    Ok(TautTriangulation3::new(b.tets))
}
