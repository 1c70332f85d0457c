//! Desk-scale search for a measured track on the five-punctured sphere
//! whose periodic maximal splitting has a prescribed dilatation.
//!
//! Tracks are enumerated through their dual triangulations of the sphere
//! with six ideal vertices (the trigon is punctured for dualizing), then
//! closed cycles of single splits are searched depth first. A cycle is
//! accepted only after the leading eigenvector of its transition matrix,
//! used as a measure, reproduces it under `run_sequence`.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::algebra::{AlgebraicNumber, IntPolynomial, IntegerMatrix};
use crate::moves::{canonical_form, isomorphisms, run_sequence, split_unmeasured, MoveRecord};
use crate::track::{
    serialize_track, track_from_triangulation, BranchKind, IdealTriangulation2, SurfaceHeader,
    TrackFile, TrainTrack,
};

/// The octahedron: north pole, south pole and an equator of four vertices.
pub fn octahedron() -> IdealTriangulation2 {
    // edges: 0..4 north spokes, 4..8 south spokes, 8..12 equator
    let mut tris = Vec::new();
    for i in 0..4 {
        let j = (i + 1) % 4;
        tris.push([i, 8 + i, j]);
    }
    for i in 0..4 {
        let j = (i + 1) % 4;
        tris.push([4 + j, 8 + i, 4 + i]);
    }
    IdealTriangulation2::new(tris).expect("closed octahedron")
}

/// All triangulations reachable from `base` by Whitehead moves, one per
/// isomorphism class.
pub fn triangulations(base: &IdealTriangulation2, limit: usize) -> Vec<IdealTriangulation2> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::from([base.clone()]);
    seen.insert(base.canonical_key());
    while let Some(t) = queue.pop_front() {
        for e in 0..t.num_edges() {
            if let Ok(f) = t.whitehead(e) {
                if seen.insert(f.canonical_key()) && seen.len() <= limit {
                    queue.push_back(f);
                }
            }
        }
        out.push(t);
    }
    out
}

/// Tracks dual to `tri` whose complementary regions are one trigon, left
/// unpunctured, and punctured monogons.
pub fn candidate_tracks(tri: &IdealTriangulation2) -> Vec<TrainTrack> {
    let v = tri.num_triangles();
    let mut out = Vec::new();
    let mut large = vec![0u8; v];
    loop {
        if let Ok(t) = track_from_triangulation(tri, &large) {
            let regions = t.regions();
            let trigons: Vec<usize> = (0..regions.len())
                .filter(|&i| regions[i].cusps == 3)
                .collect();
            if trigons.len() == 1
                && regions.iter().filter(|r| r.cusps == 1).count() == regions.len() - 1
            {
                let mut t = t;
                for i in 0..regions.len() {
                    if i != trigons[0] {
                        t.puncture(i).expect("region exists");
                    }
                }
                if t.validate().is_ok() {
                    out.push(t);
                }
            }
        }
        let mut k = 0;
        while k < v && large[k] == 2 {
            large[k] = 0;
            k += 1;
        }
        if k == v {
            break;
        }
        large[k] += 1;
    }
    out
}

/// Candidate tracks over every triangulation, one per isomorphism class.
pub fn all_candidates(limit: usize) -> Vec<TrainTrack> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for tri in triangulations(&octahedron(), limit) {
        for t in candidate_tracks(&tri) {
            if seen.insert(canonical_form(&t, None)) {
                out.push(t);
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct SearchHit {
    pub track: TrainTrack,
    pub measure: Vec<AlgebraicNumber>,
    pub cycle: Vec<MoveRecord>,
}

fn transition(cycle: &[MoveRecord], iso_branches: &[usize], nb: usize) -> IntegerMatrix {
    let mut product = IntegerMatrix::identity(nb);
    for rec in cycle {
        product = product.mul(&rec.fold_matrix(nb));
    }
    let mut t = IntegerMatrix::identity(nb);
    for i in 0..nb {
        for j in 0..nb {
            t.set(i, j, product.get(i, iso_branches[j]).clone());
        }
    }
    t
}

pub struct SearchStats {
    pub candidates: usize,
    pub cycles_checked: usize,
}

/// Depth-first search for closed cycles of `len` single splits whose
/// transition matrix has `target` as a factor of its characteristic
/// polynomial, then confirmation by running the maximal splitting sequence
/// from the leading eigenvector.
pub fn search_cycles(
    candidates: &[TrainTrack],
    len: usize,
    target: &IntPolynomial,
    max_hits: usize,
) -> (Vec<SearchHit>, SearchStats) {
    let mut hits = Vec::new();
    let mut checked = 0;
    let mut tried_polys: HashMap<String, bool> = HashMap::new();
    for start in candidates {
        let mut stack: Vec<(TrainTrack, Vec<MoveRecord>)> = vec![(start.clone(), Vec::new())];
        while let Some((cur, path)) = stack.pop() {
            if path.len() == len {
                for iso in isomorphisms(start, None, &cur, None) {
                    checked += 1;
                    let m = transition(&path, &iso.branches, start.num_branches());
                    let cp = m.char_poly();
                    let key = format!("{:?}", cp.coeffs());
                    let divisible = *tried_polys
                        .entry(key)
                        .or_insert_with(|| has_factor(&cp, target));
                    if !divisible {
                        continue;
                    }
                    if let Some(hit) = confirm(start, &m, len, target) {
                        hits.push(hit);
                        if hits.len() >= max_hits {
                            return (
                                hits,
                                SearchStats {
                                    candidates: candidates.len(),
                                    cycles_checked: checked,
                                },
                            );
                        }
                    }
                }
                continue;
            }
            for e in 0..cur.num_branches() {
                if cur.classify_branch(e) != BranchKind::Large {
                    continue;
                }
                for left in [true, false] {
                    if let Ok((next, rec)) = split_unmeasured(&cur, e, left) {
                        let mut p = path.clone();
                        p.push(rec);
                        stack.push((next, p));
                    }
                }
            }
        }
    }
    (
        hits,
        SearchStats {
            candidates: candidates.len(),
            cycles_checked: checked,
        },
    )
}

fn has_factor(p: &IntPolynomial, f: &IntPolynomial) -> bool {
    let f = f.primitive();
    crate::algebra::factor(p).iter().any(|(g, _)| *g == f)
}

fn confirm(
    start: &TrainTrack,
    m: &IntegerMatrix,
    len: usize,
    target: &IntPolynomial,
) -> Option<SearchHit> {
    let pf = crate::algebra::pf_eigenpair(m).ok()?;
    if pf.field().minpoly() != target {
        return None;
    }
    let (seq, cert) = run_sequence(start, &pf.vector, 4 * len).ok()?;
    let cert = cert?;
    if cert.n != 0 || cert.total_splits(&seq) != len || &cert.minimal_polynomial != target {
        return None;
    }
    let cycle = seq.batches[..cert.m].iter().flatten().cloned().collect();
    Some(SearchHit {
        track: start.clone(),
        measure: pf.vector,
        cycle,
    })
}

/// `x⁴ - 2x³ - 2x + 1`.
pub fn sigma05_target() -> IntPolynomial {
    IntPolynomial::from_i64s(&[1, -2, 0, -2, 1])
}

/// Runs the whole search and returns the first confirmed hit.
pub fn find_sigma05() -> (Option<SearchHit>, SearchStats) {
    let candidates = all_candidates(10_000);
    let (hits, stats) = search_cycles(&candidates, 6, &sigma05_target(), 1);
    (hits.into_iter().next(), stats)
}

/// The hit as a track file with its exact measure.
pub fn fixture_text(hit: &SearchHit) -> String {
    serialize_track(&TrackFile {
        surface: SurfaceHeader::Auto,
        track: hit.track.clone(),
        measure: Some(hit.measure.clone()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::track::parse_track;

    #[test]
    fn octahedron_is_a_sphere_with_six_punctures() {
        let o = octahedron();
        assert_eq!((o.num_triangles(), o.num_edges()), (8, 12));
        assert_eq!(o.whitehead(8).unwrap().num_edges(), 12);
    }

    #[test]
    fn candidates_of_the_octahedron() {
        let c = candidate_tracks(&octahedron());
        assert!(c
            .iter()
            .all(|t| t.num_branches() == 12 && t.num_switches() == 8));
        for t in &c {
            let s = t.validate().unwrap();
            assert_eq!((s.genus, s.punctures), (0, 5));
        }
    }

    #[test]
    fn fixture_is_confirmed() {
        let f = parse_track(include_str!("../fixtures/sigma05.tt")).unwrap();
        let mu = f.measure.unwrap();
        assert_eq!(mu[0].field().minpoly(), &sigma05_target());
        let (seq, cert) = run_sequence(&f.track, &mu, 100).unwrap();
        let cert = cert.unwrap();
        assert_eq!((cert.n, cert.m, cert.total_splits(&seq)), (0, 6, 6));
    }

    #[test]
    #[ignore = "full search, about 15 s in release"]
    fn search_finds_a_fixture() {
        let (hit, stats) = find_sigma05();
        assert_eq!(stats.candidates, 14973);
        let hit = hit.unwrap();
        assert_eq!(hit.cycle.len(), 6);
        assert!(parse_track(&fixture_text(&hit)).is_ok());
    }
}
