//! Canonical forms of projectively measured tracks and the isomorphisms
//! between them.

use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraicNumber;
use crate::track::{BranchId, Port, Slot, SwitchId, TrainTrack};

/// A slot-preserving isomorphism, as maps from source ids to target ids.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct TrackIso {
    pub switches: Vec<SwitchId>,
    pub branches: Vec<BranchId>,
}

impl TrackIso {
    pub fn identity(switches: usize, branches: usize) -> Self {
        TrackIso {
            switches: (0..switches).collect(),
            branches: (0..branches).collect(),
        }
    }

    pub fn is_identity_on_switches(&self) -> bool {
        self.switches.iter().enumerate().all(|(i, &s)| i == s)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &TrackIso) -> TrackIso {
        TrackIso {
            switches: self.switches.iter().map(|&s| other.switches[s]).collect(),
            branches: self.branches.iter().map(|&b| other.branches[b]).collect(),
        }
    }

    pub fn inverse(&self) -> TrackIso {
        let mut s = vec![0; self.switches.len()];
        let mut b = vec![0; self.branches.len()];
        for (i, &j) in self.switches.iter().enumerate() {
            s[j] = i;
        }
        for (i, &j) in self.branches.iter().enumerate() {
            b[j] = i;
        }
        TrackIso {
            switches: s,
            branches: b,
        }
    }
}

struct Labeling {
    key: String,
    switch_label: Vec<usize>,
    branch_label: Vec<usize>,
}

fn punctured_darts(t: &TrainTrack) -> Vec<[bool; 3]> {
    let mut out = vec![[false; 3]; t.num_switches()];
    for r in t.regions() {
        if r.punctured {
            for e in &r.boundary {
                let p = t.port(*e);
                out[p.switch][p.slot.index()] = true;
            }
        }
    }
    out
}

fn label_from(
    t: &TrainTrack,
    mu: Option<&[AlgebraicNumber]>,
    punct: &[[bool; 3]],
    start: SwitchId,
) -> Option<Labeling> {
    let n = t.num_switches();
    let mut switch_label = vec![usize::MAX; n];
    let mut branch_label = vec![usize::MAX; t.num_branches()];
    let mut order = vec![start];
    switch_label[start] = 0;
    let mut nb = 0;
    let mut key = String::new();
    let mut i = 0;
    while i < order.len() {
        let s = order[i];
        i += 1;
        for k in Slot::ALL {
            let end = t.at(Port::new(s, k));
            let far = t.port(TrainTrack::other_end(end));
            if branch_label[end.branch] == usize::MAX {
                branch_label[end.branch] = nb;
                nb += 1;
            }
            if switch_label[far.switch] == usize::MAX {
                switch_label[far.switch] = order.len();
                order.push(far.switch);
            }
            key.push_str(&format!(
                "{}:{}{}{};",
                branch_label[end.branch],
                switch_label[far.switch],
                far.slot.name(),
                if punct[s][k.index()] { "*" } else { "" }
            ));
        }
    }
    if order.len() != n {
        return None;
    }
    if let Some(mu) = mu {
        let mut by_label = vec![0; mu.len()];
        for (b, &l) in branch_label.iter().enumerate() {
            by_label[l] = b;
        }
        let first = &mu[by_label[0]];
        key.push('|');
        for &b in &by_label {
            let w = mu[b]
                .checked_div(first)
                .expect("weights share a field and are nonzero");
            key.push_str(&w.to_coeff_string());
            key.push(';');
        }
    }
    Some(Labeling {
        key,
        switch_label,
        branch_label,
    })
}

fn labelings(t: &TrainTrack, mu: Option<&[AlgebraicNumber]>) -> Vec<Labeling> {
    let punct = punctured_darts(t);
    (0..t.num_switches())
        .filter_map(|s| label_from(t, mu, &punct, s))
        .collect()
}

/// Canonical key of a connected track with optional projective measure.
/// Equal keys mean a slot-preserving isomorphism that matches punctures and
/// carries one measure to a positive multiple of the other.
pub fn canonical_form(t: &TrainTrack, mu: Option<&[AlgebraicNumber]>) -> String {
    labelings(t, mu)
        .into_iter()
        .map(|l| l.key)
        .min()
        .unwrap_or_default()
}

/// Every isomorphism `a → b` respecting slots, punctures and projective measures.
pub fn isomorphisms(
    a: &TrainTrack,
    mu_a: Option<&[AlgebraicNumber]>,
    b: &TrainTrack,
    mu_b: Option<&[AlgebraicNumber]>,
) -> Vec<TrackIso> {
    if a.num_switches() != b.num_switches()
        || a.num_branches() != b.num_branches()
        || a.num_switches() == 0
    {
        return Vec::new();
    }
    let punct_a = punctured_darts(a);
    let Some(base) = label_from(a, mu_a, &punct_a, 0) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for l in labelings(b, mu_b) {
        if l.key != base.key {
            continue;
        }
        let mut inv_s = vec![0; l.switch_label.len()];
        for (s, &x) in l.switch_label.iter().enumerate() {
            inv_s[x] = s;
        }
        let mut inv_b = vec![0; l.branch_label.len()];
        for (e, &x) in l.branch_label.iter().enumerate() {
            inv_b[x] = e;
        }
        out.push(TrackIso {
            switches: base.switch_label.iter().map(|&x| inv_s[x]).collect(),
            branches: base.branch_label.iter().map(|&x| inv_b[x]).collect(),
        });
    }
    out.sort_by(|x, y| {
        x.switches
            .cmp(&y.switches)
            .then_with(|| x.branches.cmp(&y.branches))
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::NumberField;
    use crate::track::fixtures::torus;

    #[test]
    fn relabeling_and_scaling_preserve_key() {
        let t = torus();
        let q = NumberField::rationals();
        let mu = vec![q.from_int(5), q.from_int(2), q.from_int(3)];
        let seven: Vec<_> = mu.iter().map(|w| w * &q.from_int(7)).collect();
        let k = canonical_form(&t, Some(&mu));
        assert_eq!(k, canonical_form(&t, Some(&seven)));
        let r = t.relabel(&[1, 0], &[2, 0, 1]);
        let mu_r = vec![mu[1].clone(), mu[2].clone(), mu[0].clone()];
        assert_eq!(k, canonical_form(&r, Some(&mu_r)));
        let other = vec![q.from_int(5), q.from_int(3), q.from_int(2)];
        assert_ne!(k, canonical_form(&t, Some(&other)));
    }

    #[test]
    fn torus_isomorphisms() {
        let t = torus();
        // the swap of the two switches is a symmetry of the bare track
        let isos = isomorphisms(&t, None, &t, None);
        assert_eq!(isos.len(), 2);
        assert!(isos[0].is_identity_on_switches());
        let inv = isos[1].inverse();
        assert_eq!(isos[1].then(&inv), TrackIso::identity(2, 3));
    }
}
