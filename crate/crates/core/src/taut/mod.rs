//! Layered taut ideal triangulations, veering, and the fiber 2-cycle.

mod extract;
mod fiber;
mod format;
mod layered;
mod triangulation;
mod veering;

pub use extract::{extract_folding, ExtractedFolding, FoldingSummary};
pub use fiber::{
    chain_boundary, compare_conjugacy, conjugacy_key, fiber_cycle, flow_pairing, relabel_cycle,
    tetrahedron_sums, ConjugacyKey, FiberCycle,
};
pub use format::{
    parse_triangulation, serialize_triangulation, triangulation_json, EdgeJson, FaceJson,
    TetrahedronJson, TriangulationFile, TriangulationJson,
};
pub use layered::{
    build_layered, build_layered_flips, build_layered_from, build_layered_ordered, CornerMap,
    FaceRef, LayeredStructure,
};
pub use triangulation::{
    edge_index, perm_compose, perm_from_str, perm_inverse, perm_is_even, perm_to_string,
    Coorientation, EdgeCorner, Perm4, TautTetrahedron, TautTriangulation3, TautViolation, EDGES,
};
pub use veering::{check_veering, equatorial_labels, Veer, VeeringColoring, VeeringError};

use thiserror::Error;

use crate::moves::MoveError;
use crate::track::TrackError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TautError {
    #[error("closing the layers failed: {0}")]
    ClosingMismatch(String),
    #[error("veering structure required: {0}")]
    VeeringRequired(String),
    #[error("degenerate linear system: rank {rank}, expected {expected}")]
    DegenerateSystem { rank: usize, expected: usize },
    #[error("folding data does not match: {0}")]
    FoldingMismatch(String),
    #[error(transparent)]
    Track(#[from] TrackError),
    #[error(transparent)]
    Move(#[from] MoveError),
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::moves::{power_certificate, run_sequence};
    use crate::seed::{seed_punctured_torus, word_exponent};

    pub(crate) fn layered(word: &str) -> (TautTriangulation3, LayeredStructure) {
        let (t, mu) = seed_punctured_torus(word).unwrap();
        let (mut seq, cert) = run_sequence(&t, &mu, 200).unwrap();
        let mut cert = cert.unwrap();
        let k = word_exponent(word);
        if k > 1 {
            cert = power_certificate(&mut seq, &cert, k).unwrap();
        }
        build_layered(&seq, &cert).unwrap()
    }

    #[test]
    fn rl_is_two_tetrahedra_one_cusp() {
        let (t, l) = layered("RL");
        assert_eq!(t.len(), 2);
        assert!(t.check_taut().is_ok(), "{:?}", t.check_taut());
        assert_eq!(t.num_edges(), 2);
        assert_eq!(t.num_cusps(), 1);
        assert_eq!(l.num_layers(), 2);
        for tet in &t.tetrahedra {
            for p in tet.gluings {
                assert!(!perm_is_even(p));
            }
        }
        let c = check_veering(&t).unwrap();
        assert_eq!(c.degrees, vec![6, 6]);
    }

    #[test]
    fn torus_words_are_veering() {
        for w in ["RRL", "RLL", "RRLL", "RLRL", "RRRLRL", "RLRRLLRL"] {
            let (t, _) = layered(w);
            assert_eq!(t.len(), w.len(), "{}", w);
            assert_eq!(t.num_edges(), t.len(), "{}", w);
            assert!(t.check_taut().is_ok(), "{}", w);
            assert!(check_veering(&t).is_ok(), "{}: {:?}", w, check_veering(&t));
            let r = t.reverse();
            assert!(r.check_taut().is_ok(), "{}", w);
            assert!(
                check_veering(&r).is_ok(),
                "{} reversed: {:?}",
                w,
                check_veering(&r)
            );
        }
    }
}


#[cfg(test)]
mod homology_tests {
    use super::homology::h1;
    use super::tests::layered;

    #[test]
    fn rl_is_the_figure_eight_complement() {
        let (t, _) = layered("RL");
        assert_eq!(h1(&t), (1, vec![]));
    }

    #[test]
    fn torus_bundle_homology_matches_monodromy() {
        // H1 of the bundle with monodromy A is Z + coker(A - I)
        let (t, _) = layered("RRL");
        // [[3,2],[1,1]] - I = [[2,2],[1,0]], determinant -2
        assert_eq!(h1(&t), (1, vec![2]));
        let (t, _) = layered("RRRL");
        // [[4,3],[1,1]] - I has determinant -3
        assert_eq!(h1(&t), (1, vec![3]));
    }

    #[test]
    fn other_certificate_isomorphism_gives_minus_a() {
        use crate::moves::{isomorphisms, run_sequence};
        use crate::seed::seed_punctured_torus;
        let (t, mu) = seed_punctured_torus("RL").unwrap();
        let (seq, cert) = run_sequence(&t, &mu, 100).unwrap();
        let cert = cert.unwrap();
        let (a, b) = (&seq.states[cert.n], &seq.states[cert.n + cert.m]);
        let other = isomorphisms(&a.0, Some(&a.1), &b.0, Some(&b.1))
            .into_iter()
            .find(|i| *i != cert.iso)
            .unwrap();
        let mut alt = cert.clone();
        alt.iso = other;
        let (tri, _) = super::build_layered(&seq, &alt).unwrap();
        assert!(super::check_veering(&tri).is_ok());
        // coker(-A - I) for A = [[2,1],[1,1]] has order det(A + I) = 5
        assert_eq!(super::homology::h1(&tri), (1, vec![5]));
    }
}

#[cfg(test)]
mod flip_tests {
    use super::*;
    use crate::seed::punctured_torus_track;
    use crate::track::dual_triangulation;

    fn final_of(
        base: &crate::track::IdealTriangulation2,
        flips: &[usize],
    ) -> crate::track::IdealTriangulation2 {
        flips
            .iter()
            .fold(base.clone(), |t, &e| t.whitehead(e).unwrap())
    }

    #[test]
    fn backtrack_gives_mixed_edge() {
        let (base, _) = dual_triangulation(&punctured_torus_track()).unwrap();
        let good = [2, 1];
        let isos: Vec<_> = base
            .isomorphisms_to(&final_of(&base, &good))
            .into_iter()
            .filter(|iso| {
                let t = build_layered_flips(&base, &good, iso).unwrap();
                check_veering(&t).is_ok()
            })
            .collect();
        assert_eq!(isos.len(), 2);
        for iso in &isos {
            let t = build_layered_flips(&base, &good, iso).unwrap();
            assert_eq!(t.len(), 2);
            assert_eq!(check_veering(&t).unwrap().degrees, vec![6, 6]);
            // flip edge 0 forth and back in the middle of the cycle
            let bad = [2, 0, 0, 1];
            assert_eq!(final_of(&base, &bad), final_of(&base, &good));
            let t = build_layered_flips(&base, &bad, iso).unwrap();
            assert!(t.check_taut().is_ok());
            assert!(
                matches!(check_veering(&t), Err(VeeringError::Mixed { .. })),
                "{:?}",
                check_veering(&t)
            );
        }
    }
}
