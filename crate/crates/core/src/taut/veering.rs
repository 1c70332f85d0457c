use serde::{Deserialize, Serialize};

use super::triangulation::{
    edge_index, perm_is_even, EdgeCorner, TautTriangulation3, TautViolation, EDGES,
};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Veer {
    Left,
    Right,
}

impl Veer {
    pub fn tag(self) -> char {
        match self {
            Veer::Left => 'L',
            Veer::Right => 'R',
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct VeeringColoring {
    pub colors: Vec<Veer>,
    pub degrees: Vec<usize>,
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum VeeringError {
    #[error("triangulation is not taut: {0:?}")]
    NotTaut(Vec<TautViolation>),
    #[error("triangulation is not orientable")]
    NotOrientable,
    #[error("edge {edge} veers both left and right")]
    Mixed { edge: usize },
    #[error("edge {edge} has an empty side between its π corners")]
    EmptySide { edge: usize },
}

/// Left/right label of each equatorial edge `(tet, edge index)`.
pub fn equatorial_labels(t: &TautTriangulation3, sign: &[i8]) -> Vec<[Option<Veer>; 6]> {
    let mut out = Vec::with_capacity(t.len());
    for (i, tet) in t.tetrahedra.iter().enumerate() {
        let mut labels = [None; 6];
        if let Some([(a, b), (c, d)]) = tet.pi_edges() {
            let ccw = perm_is_even([a, b, c, d]) == (sign[i] > 0);
            let order = if ccw { [d, a, c, b] } else { [b, c, a, d] };
            for k in 0..4 {
                let (x, y) = (order[k], order[(k + 1) % 4]);
                let v = if x == a || x == b {
                    Veer::Left
                } else {
                    Veer::Right
                };
                labels[edge_index(x, y)] = Some(v);
            }
        }
        out.push(labels);
    }
    out
}

/// Colors every edge class, or reports the first edge that is not veering.
pub fn check_veering(t: &TautTriangulation3) -> Result<VeeringColoring, VeeringError> {
    t.check_taut().map_err(VeeringError::NotTaut)?;
    let sign = t.orientation().ok_or(VeeringError::NotOrientable)?;
    let labels = equatorial_labels(t, &sign);
    let (cls, count) = t.edge_classes();
    let mut colors: Vec<Option<Veer>> = vec![None; count];
    let mut degrees = vec![0; count];
    let mut first: Vec<Option<EdgeCorner>> = vec![None; count];
    let mut mixed = vec![false; count];
    for (i, row) in cls.iter().enumerate() {
        for (k, &c) in row.iter().enumerate() {
            degrees[c] += 1;
            first[c].get_or_insert(EdgeCorner {
                tet: i,
                edge: EDGES[k],
            });
            if let Some(v) = labels[i][k] {
                match colors[c] {
                    None => colors[c] = Some(v),
                    Some(w) if w != v => mixed[c] = true,
                    _ => {}
                }
            }
        }
    }
    for c in 0..count {
        let walk = t.edge_walk(first[c].expect("every class has a corner"));
        let pis: Vec<usize> = walk
            .iter()
            .enumerate()
            .filter(|(_, ec)| t.tetrahedra[ec.tet].is_pi(ec.edge))
            .map(|(i, _)| i)
            .collect();
        if pis.len() != 2 || pis[1] - pis[0] < 2 || walk.len() - (pis[1] - pis[0]) < 2 {
            return Err(VeeringError::EmptySide { edge: c });
        }
        if mixed[c] {
            return Err(VeeringError::Mixed { edge: c });
        }
    }
    Ok(VeeringColoring {
        colors: colors
            .into_iter()
            .map(|c| c.expect("each edge is equatorial somewhere"))
            .collect(),
        degrees,
    })
}
