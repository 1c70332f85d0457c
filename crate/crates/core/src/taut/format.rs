//! Text and JSON forms of a taut triangulation with its coloring and cycle.
//!
//! ```text
//! tet 0 nbr 1 1 1 1 perm 1032 1032 2301 2301 coor OOII pi 01 23
//! edge 0 degree 6 color L
//! face 0 weight 1/2
//! ```

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::fiber::FiberCycle;
use super::triangulation::{
    perm_from_str, perm_to_string, Coorientation, TautTetrahedron, TautTriangulation3,
};
use super::veering::{Veer, VeeringColoring};
use crate::algebra::{format_rational, parse_rational};
use crate::track::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangulationFile {
    pub triangulation: TautTriangulation3,
    pub coloring: Option<VeeringColoring>,
    pub fiber: Option<FiberCycle>,
}

fn perr(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

fn pi_string(tet: &TautTetrahedron) -> String {
    match tet.pi_edges() {
        Some([(a, b), (c, d)]) => format!("{}{} {}{}", a, b, c, d),
        None => "- -".to_string(),
    }
}

pub fn serialize_triangulation(f: &TriangulationFile) -> String {
    let mut out = String::new();
    for (i, tet) in f.triangulation.tetrahedra.iter().enumerate() {
        let nbr: Vec<String> = tet.neighbors.iter().map(|n| n.to_string()).collect();
        let perm: Vec<String> = tet.gluings.iter().map(|p| perm_to_string(*p)).collect();
        let coor: String = tet.coorientation.iter().map(|c| c.tag()).collect();
        out.push_str(&format!(
            "tet {} nbr {} perm {} coor {} pi {}\n",
            i,
            nbr.join(" "),
            perm.join(" "),
            coor,
            pi_string(tet)
        ));
    }
    if let Some(c) = &f.coloring {
        for (i, (col, deg)) in c.colors.iter().zip(&c.degrees).enumerate() {
            out.push_str(&format!("edge {} degree {} color {}\n", i, deg, col.tag()));
        }
    }
    if let Some(c) = &f.fiber {
        for (i, w) in c.weights.iter().enumerate() {
            out.push_str(&format!("face {} weight {}\n", i, format_rational(w)));
        }
    }
    out
}

fn index(tok: Option<&str>, expected: usize, what: &str, line: usize) -> Result<(), ParseError> {
    match tok.and_then(|t| t.parse::<usize>().ok()) {
        Some(i) if i == expected => Ok(()),
        _ => Err(perr(line, format!("expected {} {}", what, expected))),
    }
}

fn keyword(tok: Option<&str>, kw: &str, line: usize) -> Result<(), ParseError> {
    if tok == Some(kw) {
        Ok(())
    } else {
        Err(perr(line, format!("expected '{}'", kw)))
    }
}

pub fn parse_triangulation(text: &str) -> Result<TriangulationFile, ParseError> {
    let mut tets = Vec::new();
    let mut colors = Vec::new();
    let mut degrees = Vec::new();
    let mut weights = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut toks = body.split_whitespace();
        match toks.next() {
            Some("tet") => {
                index(toks.next(), tets.len(), "tetrahedron", line)?;
                keyword(toks.next(), "nbr", line)?;
                let mut neighbors = [0usize; 4];
                for n in &mut neighbors {
                    *n = toks
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| perr(line, "bad neighbor"))?;
                }
                keyword(toks.next(), "perm", line)?;
                let mut gluings = [[0u8; 4]; 4];
                for g in &mut gluings {
                    *g = toks
                        .next()
                        .and_then(perm_from_str)
                        .ok_or_else(|| perr(line, "bad permutation"))?;
                }
                keyword(toks.next(), "coor", line)?;
                let coor = toks
                    .next()
                    .ok_or_else(|| perr(line, "missing coorientation"))?;
                if coor.len() != 4 {
                    return Err(perr(line, "coorientation needs four letters"));
                }
                let mut coorientation = [Coorientation::In; 4];
                for (c, ch) in coorientation.iter_mut().zip(coor.chars()) {
                    *c = match ch {
                        'I' => Coorientation::In,
                        'O' => Coorientation::Out,
                        _ => return Err(perr(line, format!("bad coorientation letter {:?}", ch))),
                    };
                }
                let tet = TautTetrahedron {
                    neighbors,
                    gluings,
                    coorientation,
                };
                keyword(toks.next(), "pi", line)?;
                let pi: Vec<&str> = toks.by_ref().take(2).collect();
                if pi.join(" ") != pi_string(&tet) {
                    return Err(perr(line, "π edges do not match the coorientation"));
                }
                tets.push(tet);
            }
            Some("edge") => {
                index(toks.next(), colors.len(), "edge", line)?;
                keyword(toks.next(), "degree", line)?;
                let d: usize = toks
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| perr(line, "bad degree"))?;
                keyword(toks.next(), "color", line)?;
                let c = match toks.next() {
                    Some("L") => Veer::Left,
                    Some("R") => Veer::Right,
                    _ => return Err(perr(line, "color must be L or R")),
                };
                degrees.push(d);
                colors.push(c);
            }
            Some("face") => {
                index(toks.next(), weights.len(), "face", line)?;
                keyword(toks.next(), "weight", line)?;
                let w: BigRational = toks
                    .next()
                    .and_then(parse_rational)
                    .ok_or_else(|| perr(line, "bad rational weight"))?;
                weights.push(w);
            }
            Some(other) => return Err(perr(line, format!("unknown record {:?}", other))),
            None => {}
        }
        if toks.next().is_some() {
            return Err(perr(line, "trailing tokens"));
        }
    }
    if tets.is_empty() {
        return Err(perr(0, "no tetrahedra"));
    }
    let n = tets.len();
    if tets.iter().any(|t| t.neighbors.iter().any(|&x| x >= n)) {
        return Err(perr(0, "neighbor index out of range"));
    }
    Ok(TriangulationFile {
        triangulation: TautTriangulation3::new(tets),
        coloring: (!colors.is_empty()).then_some(VeeringColoring { colors, degrees }),
        fiber: (!weights.is_empty()).then_some(FiberCycle { weights }),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TetrahedronJson {
    pub id: usize,
    pub neighbors: [usize; 4],
    pub gluings: [String; 4],
    pub coorientation: String,
    pub pi: Option<[String; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub id: usize,
    pub degree: usize,
    pub color: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceJson {
    pub id: usize,
    pub weight: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangulationJson {
    pub tetrahedra: Vec<TetrahedronJson>,
    pub edges: Vec<EdgeJson>,
    pub faces: Vec<FaceJson>,
}

pub fn triangulation_json(f: &TriangulationFile) -> TriangulationJson {
    let tetrahedra = f
        .triangulation
        .tetrahedra
        .iter()
        .enumerate()
        .map(|(id, tet)| TetrahedronJson {
            id,
            neighbors: tet.neighbors,
            gluings: tet.gluings.map(perm_to_string),
            coorientation: tet.coorientation.iter().map(|c| c.tag()).collect(),
            pi: tet
                .pi_edges()
                .map(|[(a, b), (c, d)]| [format!("{}{}", a, b), format!("{}{}", c, d)]),
        })
        .collect();
    let edges = f.coloring.as_ref().map_or_else(Vec::new, |c| {
        c.colors
            .iter()
            .zip(&c.degrees)
            .enumerate()
            .map(|(id, (col, &degree))| EdgeJson {
                id,
                degree,
                color: col.tag().to_string(),
            })
            .collect()
    });
    let faces = f.fiber.as_ref().map_or_else(Vec::new, |c| {
        c.weights
            .iter()
            .enumerate()
            .map(|(id, w)| FaceJson {
                id,
                weight: format_rational(w),
            })
            .collect()
    });
    TriangulationJson {
        tetrahedra,
        edges,
        faces,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taut::tests::layered;
    use crate::taut::{check_veering, fiber_cycle};

    #[test]
    fn round_trip() {
        for w in ["RL", "RRLRL"] {
            let (t, l) = layered(w);
            let f = TriangulationFile {
                coloring: Some(check_veering(&t).unwrap()),
                fiber: Some(fiber_cycle(&t, &l).unwrap()),
                triangulation: t,
            };
            let text = serialize_triangulation(&f);
            assert_eq!(parse_triangulation(&text).unwrap(), f);
            let j = triangulation_json(&f);
            assert_eq!(j.tetrahedra.len(), w.len());
            assert_eq!(j.faces.len(), 2 * w.len());
        }
    }

    #[test]
    fn rl_text() {
        let (t, _) = layered("RL");
        let text = serialize_triangulation(&TriangulationFile {
            triangulation: t,
            coloring: None,
            fiber: None,
        });
        assert_eq!(text.lines().count(), 2);
        assert!(text.lines().all(|l| l.ends_with("coor OOII pi 01 23")));
    }

    #[test]
    fn errors_have_lines() {
        let e =
            parse_triangulation("tet 0 nbr 0 0 0 0 perm 0123 0123 0123 0123 coor OOII pi 23 01\n")
                .unwrap_err();
        assert_eq!(e.line, 1);
        let e = parse_triangulation("\nbogus 1\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e =
            parse_triangulation("tet 0 nbr 5 0 0 0 perm 0123 0123 0123 0123 coor OOII pi 01 23\n")
                .unwrap_err();
        assert!(e.message.contains("range"));
    }
}
