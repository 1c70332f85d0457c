//! The harmonic fiber 2-cycle and the conjugacy key built from it.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::layered::LayeredStructure;
use super::triangulation::{
    edge_index, perm_compose, perm_inverse, perm_to_string, Coorientation, Perm4,
    TautTriangulation3, EDGES,
};
use super::TautError;
use crate::algebra::format_rational;

/// Rational weights on the face classes of [`TautTriangulation3::face_classes`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberCycle {
    pub weights: Vec<BigRational>,
}

impl FiberCycle {
    pub fn is_positive(&self) -> bool {
        self.weights.iter().all(|w| w.is_positive())
    }

    pub fn total(&self) -> BigRational {
        self.weights.iter().fold(BigRational::zero(), |a, w| a + w)
    }

    /// The projective class, scaled to total weight one.
    pub fn projective(&self) -> Vec<BigRational> {
        let s = self.total();
        if s.is_zero() {
            return self.weights.clone();
        }
        self.weights.iter().map(|w| w / &s).collect()
    }
}

/// Sign of each oriented tetrahedron edge `(u, v)`, `u < v`, relative to the
/// representative of its class.
fn oriented_edges(t: &TautTriangulation3) -> (Vec<[usize; 6]>, Vec<[i8; 6]>, usize) {
    let mut cls = vec![[usize::MAX; 6]; t.len()];
    let mut sgn = vec![[0i8; 6]; t.len()];
    let mut count = 0;
    for t0 in 0..t.len() {
        for k0 in 0..6 {
            if cls[t0][k0] != usize::MAX {
                continue;
            }
            cls[t0][k0] = count;
            sgn[t0][k0] = 1;
            let mut stack = vec![(t0, k0)];
            while let Some((i, k)) = stack.pop() {
                let (u, v) = EDGES[k];
                for f in 0..4u8 {
                    if f == u || f == v {
                        continue;
                    }
                    let n = t.tetrahedra[i].neighbors[f as usize];
                    let g = t.tetrahedra[i].gluings[f as usize];
                    let (x, y) = (g[u as usize], g[v as usize]);
                    let kn = edge_index(x, y);
                    let s = if x < y { sgn[i][k] } else { -sgn[i][k] };
                    if cls[n][kn] == usize::MAX {
                        cls[n][kn] = count;
                        sgn[n][kn] = s;
                        stack.push((n, kn));
                    }
                }
            }
            count += 1;
        }
    }
    (cls, sgn, count)
}

/// Boundary of a weighted 2-chain, with face classes oriented by their
/// coorientation.
pub fn chain_boundary(t: &TautTriangulation3, weights: &[BigRational]) -> Option<Vec<BigRational>> {
    let sign = t.orientation()?;
    let (cls, sgn, count) = oriented_edges(t);
    let mut out = vec![BigRational::zero(); count];
    for (c, [(tet, f), _]) in t.face_classes().into_iter().enumerate() {
        let verts: Vec<u8> = (0..4u8).filter(|&v| v != f).collect();
        let s = if f % 2 == 0 { sign[tet] } else { -sign[tet] };
        for (x, y, e) in [(1, 2, 1i8), (0, 2, -1), (0, 1, 1)] {
            let k = edge_index(verts[x], verts[y]);
            let coeff = i64::from(s * e * sgn[tet][k]);
            out[cls[tet][k]] += &weights[c] * BigRational::from_integer(BigInt::from(coeff));
        }
    }
    Some(out)
}

/// Coorientation-signed face-weight sum of every tetrahedron.
pub fn tetrahedron_sums(t: &TautTriangulation3, weights: &[BigRational]) -> Vec<BigRational> {
    let of = t.face_class_of();
    t.tetrahedra
        .iter()
        .enumerate()
        .map(|(i, tet)| {
            (0..4).fold(BigRational::zero(), |acc, f| match tet.coorientation[f] {
                Coorientation::Out => acc + &weights[of[i][f]],
                Coorientation::In => acc - &weights[of[i][f]],
            })
        })
        .collect()
}

/// Gaussian elimination; returns the rank and one solution if consistent.
fn solve(
    mut a: Vec<Vec<BigRational>>,
    mut b: Vec<BigRational>,
) -> (usize, Option<Vec<BigRational>>) {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        b.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        b[r] *= &inv;
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let d = &f * &a[r][j];
                    a[i][j] -= d;
                }
                let d = &f * &b[r];
                b[i] -= d;
            }
        }
        pivots.push(c);
        r += 1;
    }
    if b[r..].iter().any(|x| !x.is_zero()) {
        return (r, None);
    }
    let mut x = vec![BigRational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = b[i].clone();
    }
    (r, Some(x))
}

/// The harmonic representative of the fiber class: layer 0 plus the
/// boundary of a rational 3-chain, chosen so every tetrahedron's signed
/// face sum vanishes. It meets a closed flow line once per turn around the
/// circle.
pub fn fiber_cycle(
    t: &TautTriangulation3,
    layering: &LayeredStructure,
) -> Result<FiberCycle, TautError> {
    let n = t.len();
    let classes = t.face_classes();
    let of = t.face_class_of();
    let mut fiber = vec![BigRational::zero(); classes.len()];
    for f in &layering.faces[0] {
        fiber[of[f.tet][f.face as usize]] += BigRational::one();
    }
    // d[c][i]: coefficient of face class c in the boundary of tetrahedron i
    let mut d = vec![vec![0i64; n]; classes.len()];
    for (i, tet) in t.tetrahedra.iter().enumerate() {
        for f in 0..4 {
            d[of[i][f]][i] += match tet.coorientation[f] {
                Coorientation::Out => 1,
                Coorientation::In => -1,
            };
        }
    }
    let q = |x: i64| BigRational::from_integer(BigInt::from(x));
    let mut gram = vec![vec![BigRational::zero(); n]; n];
    let mut rhs = vec![BigRational::zero(); n];
    for (c, row) in d.iter().enumerate() {
        for i in 0..n {
            if row[i] == 0 {
                continue;
            }
            rhs[i] -= q(row[i]) * &fiber[c];
            for j in 0..n {
                gram[i][j] += q(row[i] * row[j]);
            }
        }
    }
    let (rank, sol) = solve(gram, rhs);
    if rank + 1 != n {
        return Err(TautError::DegenerateSystem {
            rank,
            expected: n - 1,
        });
    }
    let c = sol.ok_or(TautError::DegenerateSystem {
        rank,
        expected: n - 1,
    })?;
    let mut weights = fiber;
    for (k, row) in d.iter().enumerate() {
        for i in 0..n {
            if row[i] != 0 {
                weights[k] += q(row[i]) * &c[i];
            }
        }
    }
    if tetrahedron_sums(t, &weights).iter().any(|s| !s.is_zero()) {
        return Err(TautError::DegenerateSystem {
            rank,
            expected: n - 1,
        });
    }
    match chain_boundary(t, &weights) {
        Some(b) if b.iter().all(|x| x.is_zero()) => {}
        _ => {
            return Err(TautError::DegenerateSystem {
                rank,
                expected: n - 1,
            })
        }
    }
    Ok(FiberCycle { weights })
}

/// Algebraic intersection of a 2-chain with the closed dual loop found by
/// always leaving through the lowest outward face, and the number of
/// tetrahedra on that loop.
pub fn flow_pairing(t: &TautTriangulation3, weights: &[BigRational]) -> (BigRational, usize) {
    let of = t.face_class_of();
    let mut first_seen = vec![usize::MAX; t.len()];
    let mut path = Vec::new();
    let mut cur = 0;
    while first_seen[cur] == usize::MAX {
        first_seen[cur] = path.len();
        let f = t.tetrahedra[cur].faces_with(Coorientation::Out)[0] as usize;
        path.push(of[cur][f]);
        cur = t.tetrahedra[cur].neighbors[f];
    }
    let start = first_seen[cur];
    let total = path[start..]
        .iter()
        .fold(BigRational::zero(), |a, &c| a + &weights[c]);
    (total, path.len() - start)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjugacyKey {
    pub tetrahedra: usize,
    pub key: String,
    pub digest: String,
}

fn all_perms() -> Vec<Perm4> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4u8 {
        for b in (0..4u8).filter(|&b| b != a) {
            for c in (0..4u8).filter(|&c| c != a && c != b) {
                out.push([a, b, c, 6 - a - b - c]);
            }
        }
    }
    out
}

fn serialize_from(
    t: &TautTriangulation3,
    w: &[BigRational],
    of: &[[usize; 4]],
    t0: usize,
    p0: Perm4,
) -> String {
    let mut index = vec![usize::MAX; t.len()];
    // maps each old tetrahedron's vertices to new ones
    let mut maps: Vec<Perm4> = vec![[0; 4]; t.len()];
    let mut order = vec![t0];
    index[t0] = 0;
    maps[t0] = p0;
    let mut out = String::new();
    let mut head = 0;
    while head < order.len() {
        let old = order[head];
        head += 1;
        let tet = &t.tetrahedra[old];
        let inv = perm_inverse(maps[old]);
        for nf in 0..4u8 {
            let f = inv[nf as usize] as usize;
            let nb = tet.neighbors[f];
            let g = tet.gluings[f];
            if index[nb] == usize::MAX {
                index[nb] = order.len();
                order.push(nb);
                maps[nb] = perm_compose(maps[old], perm_inverse(g));
            }
            let ng = perm_compose(maps[nb], perm_compose(g, inv));
            out.push_str(&format!(
                "{}:{}{}{};",
                index[nb],
                perm_to_string(ng),
                tet.coorientation[f].tag(),
                format_rational(&w[of[old][f]])
            ));
        }
        out.push('|');
    }
    out
}

/// Lexicographically least serialization over all tetrahedron and vertex
/// relabelings, with the cycle scaled to total weight one.
pub fn conjugacy_key(t: &TautTriangulation3, c: &FiberCycle) -> ConjugacyKey {
    let w = c.projective();
    let of = t.face_class_of();
    let perms = all_perms();
    let mut best: Option<String> = None;
    for t0 in 0..t.len() {
        for &p in &perms {
            let s = serialize_from(t, &w, &of, t0, p);
            if best.as_ref().is_none_or(|b| s < *b) {
                best = Some(s);
            }
        }
    }
    let key = format!("{}#{}", t.len(), best.unwrap_or_default());
    let digest = format!("{:x}", Sha256::digest(key.as_bytes()));
    ConjugacyKey {
        tetrahedra: t.len(),
        key,
        digest,
    }
}

/// Carries a cycle on `t` along `t.relabel(tet_map, vert_maps)`.
pub fn relabel_cycle(
    t: &TautTriangulation3,
    c: &FiberCycle,
    tet_map: &[usize],
    vert_maps: &[Perm4],
) -> FiberCycle {
    let of = t.relabel(tet_map, vert_maps).face_class_of();
    let mut w = vec![BigRational::zero(); c.weights.len()];
    for (k, [(tet, f), _]) in t.face_classes().into_iter().enumerate() {
        w[of[tet_map[tet]][vert_maps[tet][f as usize] as usize]] = c.weights[k].clone();
    }
    FiberCycle { weights: w }
}

pub fn compare_conjugacy(a: &ConjugacyKey, b: &ConjugacyKey) -> bool {
    a.key == b.key
}
