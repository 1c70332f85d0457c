//! Recovering the folding cycle from a layered veering triangulation.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::layered::LayeredStructure;
use super::triangulation::{Coorientation, TautTriangulation3};
use super::veering::check_veering;
use super::TautError;
use crate::algebra::{
    compare_real, largest_real_root_factor, null_vector, AlgebraicNumber, IntPolynomial,
    IntegerMatrix, NumberField,
};
use crate::moves::{canonical_form, is_max, split, split_unmeasured, MoveRecord};
use crate::track::{track_from_triangulation, TrainTrack};

#[derive(Clone, Debug)]
pub struct ExtractedFolding {
    /// Per layer, the side of each triangle crossed by the large half-branch.
    pub large_sides: Vec<Vec<u8>>,
    pub tracks: Vec<TrainTrack>,
    /// Per step, the splits carrying layer `k` to layer `k + 1`.
    pub splits: Vec<Vec<MoveRecord>>,
    pub transition: IntegerMatrix,
    pub minimal_polynomial: IntPolynomial,
    pub dilatation: AlgebraicNumber,
    /// Projective invariant measure on each layer.
    pub measures: Vec<Vec<AlgebraicNumber>>,
    pub canonical_forms: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldingSummary {
    pub steps: Vec<String>,
    pub minimal_polynomial: String,
}

impl ExtractedFolding {
    pub fn summary(&self) -> FoldingSummary {
        FoldingSummary {
            steps: self
                .splits
                .iter()
                .map(|b| {
                    b.iter()
                        .map(|r| format!("{}{}", r.kind.tag(), r.branch))
                        .collect::<Vec<_>>()
                        .join(",")
                })
                .collect(),
            minimal_polynomial: self.minimal_polynomial.to_coeff_string(),
        }
    }
}

fn mismatch(s: impl Into<String>) -> TautError {
    TautError::FoldingMismatch(s.into())
}

/// Large side of each triangle of layer `k`, read off the bottom π edge of
/// the tetrahedron in front of it.
fn large_sides(
    t: &TautTriangulation3,
    layering: &LayeredStructure,
    k: usize,
) -> Result<Vec<u8>, TautError> {
    let mut out = Vec::with_capacity(layering.faces[k].len());
    for (s, f) in layering.faces[k].iter().enumerate() {
        let (tet, corners) =
            if t.tetrahedra[f.tet].coorientation[f.face as usize] == Coorientation::In {
                (f.tet, f.corners)
            } else {
                let p = t.tetrahedra[f.tet].gluings[f.face as usize];
                (
                    t.tetrahedra[f.tet].neighbors[f.face as usize],
                    f.corners.map(|c| p[c as usize]),
                )
            };
        let [(a, b), _] = t.tetrahedra[tet]
            .pi_edges()
            .ok_or_else(|| mismatch(format!("tetrahedron {} is not taut", tet)))?;
        let side = (0..3)
            .find(|&j| {
                let (x, y) = (corners[(j + 1) % 3], corners[(j + 2) % 3]);
                (x == a && y == b) || (x == b && y == a)
            })
            .ok_or_else(|| {
                mismatch(format!(
                    "triangle {} of layer {} has no side on a bottom diagonal",
                    s, k
                ))
            })?;
        out.push(side as u8);
    }
    Ok(out)
}

fn same_ports(a: &TrainTrack, b: &TrainTrack) -> bool {
    a.num_branches() == b.num_branches()
        && (0..a.num_branches()).all(|e| {
            let [p, q] = a.ports(e);
            let [r, s] = b.ports(e);
            (p == r && q == s) || (p == s && q == r)
        })
}

fn leading_eigenvector(
    m: &IntegerMatrix,
) -> Result<(AlgebraicNumber, Vec<AlgebraicNumber>), TautError> {
    let (top, lo, hi) = largest_real_root_factor(&m.char_poly())
        .ok_or_else(|| mismatch("transition has no real eigenvalue"))?;
    let field = NumberField::new(top, lo, hi).map_err(|e| mismatch(e.to_string()))?;
    let lambda = field.generator();
    let n = m.dim();
    let mut a: Vec<Vec<AlgebraicNumber>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = field.from_rational(m.get(i, j).clone().into());
                    if i == j {
                        &c - &lambda
                    } else {
                        c
                    }
                })
                .collect()
        })
        .collect();
    let v = null_vector(&mut a).ok_or_else(|| mismatch("leading eigenspace is not a line"))?;
    let pivot = v
        .iter()
        .find(|x| !x.is_zero())
        .ok_or_else(|| mismatch("zero eigenvector"))?
        .clone();
    let mut out = Vec::with_capacity(n);
    for x in &v {
        let y = x.checked_div(&pivot).map_err(|e| mismatch(e.to_string()))?;
        if !y.is_positive() {
            return Err(mismatch("leading eigenvector is not positive"));
        }
        out.push(y);
    }
    Ok((lambda, out))
}

/// Reads the train tracks off the layers and the folding cycle between them.
pub fn extract_folding(
    t: &TautTriangulation3,
    layering: &LayeredStructure,
) -> Result<ExtractedFolding, TautError> {
    check_veering(t).map_err(|e| TautError::VeeringRequired(e.to_string()))?;
    let m = layering.num_layers();
    let mut sides = Vec::with_capacity(m);
    let mut tracks = Vec::with_capacity(m);
    for k in 0..m {
        let large = large_sides(t, layering, k)?;
        let mut track = track_from_triangulation(&layering.layers[k], &large)?;
        track.puncture_all();
        sides.push(large);
        tracks.push(track);
    }
    let iso = &layering.closing;
    let closed = tracks[0].relabel(&iso.switches, &iso.branches);

    let mut splits = Vec::with_capacity(m);
    for k in 0..m {
        let target = if k + 1 < m { &tracks[k + 1] } else { &closed };
        let moves = &layering.moves[k];
        let mut found = None;
        for mask in 0..(1u32 << moves.len()) {
            let mut cur = tracks[k].clone();
            let mut batch = Vec::with_capacity(moves.len());
            for (i, &(e, _)) in moves.iter().enumerate() {
                match split_unmeasured(&cur, e, mask & (1 << i) == 0) {
                    Ok((next, rec)) => {
                        cur = next;
                        batch.push(rec);
                    }
                    Err(_) => break,
                }
            }
            if batch.len() == moves.len() && same_ports(&cur, target) {
                found = Some(batch);
                break;
            }
        }
        let batch = found.ok_or_else(|| {
            mismatch(format!(
                "no split of layer {} gives layer {}",
                k,
                (k + 1) % m
            ))
        })?;
        splits.push(batch);
    }

    let nb = tracks[0].num_branches();
    let mut product = IntegerMatrix::identity(nb);
    for rec in splits.iter().flatten() {
        product = product.mul(&rec.fold_matrix(nb));
    }
    let mut transition = IntegerMatrix::identity(nb);
    for i in 0..nb {
        for j in 0..nb {
            transition.set(i, j, product.get(i, iso.branches[j]).clone());
        }
    }
    let (dilatation, mu0) = leading_eigenvector(&transition)?;
    let minimal_polynomial = dilatation.minimal_polynomial();

    let mut measures = vec![mu0];
    let mut forms = vec![canonical_form(&tracks[0], Some(&measures[0]))];
    for k in 0..m {
        let mut cur = tracks[k].clone();
        let mut mu = measures[k].clone();
        let maxes = is_max(&mu)?;
        let mut want: Vec<_> = splits[k].iter().map(|r| r.branch).collect();
        want.sort();
        if maxes != want {
            return Err(mismatch(format!(
                "step {} does not split exactly the heaviest branches",
                k
            )));
        }
        for rec in &splits[k] {
            let (next, w, got) = split(&cur, &mu, rec.branch)?;
            if got.kind != rec.kind {
                return Err(mismatch(format!(
                    "measure splits branch {} the other way",
                    rec.branch
                )));
            }
            cur = next;
            mu = w;
        }
        if k + 1 < m {
            forms.push(canonical_form(&cur, Some(&mu)));
            measures.push(mu);
        } else {
            let back: Vec<AlgebraicNumber> = (0..nb).map(|b| mu[iso.branches[b]].clone()).collect();
            let scale = back[0]
                .checked_div(&measures[0][0])
                .map_err(|e| mismatch(e.to_string()))?;
            for b in 0..nb {
                if back[b]
                    != measures[0][b]
                        .checked_mul(&scale)
                        .map_err(|e| mismatch(e.to_string()))?
                {
                    return Err(mismatch("measure does not return to a multiple of itself"));
                }
            }
            if compare_real(
                &scale.inverse().map_err(|e| mismatch(e.to_string()))?,
                &dilatation,
            ) != Ordering::Equal
            {
                return Err(mismatch("period does not scale by the dilatation"));
            }
        }
    }
    Ok(ExtractedFolding {
        large_sides: sides,
        tracks,
        splits,
        transition,
        minimal_polynomial,
        dilatation,
        measures,
        canonical_forms: forms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moves::{
        power_certificate, run_sequence, PeriodicityCertificate, SplittingSequence,
    };
    use crate::seed::{seed_punctured_torus, word_exponent};
    use crate::taut::build_layered;

    fn run(word: &str) -> (SplittingSequence, PeriodicityCertificate) {
        let (t, mu) = seed_punctured_torus(word).unwrap();
        let (mut seq, cert) = run_sequence(&t, &mu, 200).unwrap();
        let mut cert = cert.unwrap();
        let k = word_exponent(word);
        if k > 1 {
            cert = power_certificate(&mut seq, &cert, k).unwrap();
        }
        (seq, cert)
    }

    fn generating_forms(seq: &SplittingSequence, cert: &PeriodicityCertificate) -> Vec<String> {
        (cert.n..cert.n + cert.m)
            .map(|k| {
                let (mut t, mu) = seq.states[k].clone();
                t.puncture_all();
                canonical_form(&t, Some(&mu))
            })
            .collect()
    }

    #[test]
    fn rl_round_trip() {
        let (seq, cert) = run("RL");
        let (t, l) = build_layered(&seq, &cert).unwrap();
        let x = extract_folding(&t, &l).unwrap();
        assert_eq!(x.splits.len(), 2);
        assert_eq!(x.minimal_polynomial, IntPolynomial::from_i64s(&[1, -3, 1]));
        assert_eq!(x.canonical_forms, generating_forms(&seq, &cert));
    }

    #[test]
    fn torus_words_round_trip() {
        for w in ["RRL", "RLL", "RRLL", "RLRL", "RRLRL", "RLRRLLRL"] {
            let (seq, cert) = run(w);
            let (t, l) = build_layered(&seq, &cert).unwrap();
            let x = extract_folding(&t, &l).unwrap();
            assert_eq!(x.canonical_forms, generating_forms(&seq, &cert), "{}", w);
            assert_eq!(x.minimal_polynomial, cert.minimal_polynomial, "{}", w);
        }
    }

    #[test]
    fn reversed_recovers_unstable_cycle() {
        for w in ["RL", "RRL", "RLRRLLRL"] {
            let (seq, cert) = run(w);
            let (t, l) = build_layered(&seq, &cert).unwrap();
            let x = extract_folding(&t.reverse(), &l.reversed()).unwrap();
            assert_eq!(x.splits.len(), cert.m, "{}", w);
            assert_eq!(x.minimal_polynomial, cert.minimal_polynomial, "{}", w);
        }
    }
}
