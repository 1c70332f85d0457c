use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use num_bigint::BigInt;

use super::canonical::{canonical_form, isomorphisms, TrackIso};
use super::elementary::{split, MoveRecord};
use super::MoveError;
use crate::algebra::{
    compare_real, largest_real_root_factor, AlgebraicNumber, IntPolynomial, IntegerMatrix,
    NumberField,
};
use crate::track::{BranchId, BranchKind, TrainTrack};

pub const DEFAULT_MAX_STEPS: usize = 10_000;

#[derive(Clone, Debug)]
pub struct SplittingSequence {
    pub states: Vec<(TrainTrack, Vec<AlgebraicNumber>)>,
    pub batches: Vec<Vec<MoveRecord>>,
}

impl SplittingSequence {
    pub fn new(t: TrainTrack, mu: Vec<AlgebraicNumber>) -> Self {
        SplittingSequence {
            states: vec![(t, mu)],
            batches: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.batches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.batches.is_empty()
    }

    pub fn last(&self) -> &(TrainTrack, Vec<AlgebraicNumber>) {
        self.states.last().expect("a sequence has an initial state")
    }

    /// Appends one maximal splitting of the last state.
    pub fn step(&mut self) -> Result<(), MoveError> {
        let (t, mu) = self.last();
        let (t2, mu2, batch) = maximal_split(t, mu)?;
        self.states.push((t2, mu2));
        self.batches.push(batch);
        Ok(())
    }

    pub fn canonical_keys(&self) -> Vec<String> {
        self.states
            .iter()
            .map(|(t, mu)| canonical_form(t, Some(mu)))
            .collect()
    }
}

/// Witness that states `n` and `n + m` agree up to `iso` and scaling by `scale`.
#[derive(Clone, Debug)]
pub struct PeriodicityCertificate {
    pub n: usize,
    pub m: usize,
    /// Sends branches and switches of state `n` to those of state `n + m`.
    pub iso: TrackIso,
    /// `μ_{n+m}(iso(b)) = scale · μ_n(b)` for every branch `b`.
    pub scale: AlgebraicNumber,
    /// `λ = 1 / scale`, in the measure field.
    pub dilatation: AlgebraicNumber,
    pub minimal_polynomial: IntPolynomial,
    /// Fold product over the period composed with the relabeling by `iso`.
    pub transition: IntegerMatrix,
    pub fold_factors: Vec<IntegerMatrix>,
}

impl PeriodicityCertificate {
    pub fn total_splits(&self, seq: &SplittingSequence) -> usize {
        seq.batches[self.n..self.n + self.m]
            .iter()
            .map(|b| b.len())
            .sum()
    }
}

pub(crate) fn is_max(mu: &[AlgebraicNumber]) -> Result<Vec<BranchId>, MoveError> {
    let mut best = 0;
    for b in 1..mu.len() {
        if mu[b].compare(&mu[best])? == Ordering::Greater {
            best = b;
        }
    }
    Ok((0..mu.len()).filter(|&b| mu[b] == mu[best]).collect())
}

/// Splits every large branch of maximal weight, in ascending id order.
pub fn maximal_split(
    t: &TrainTrack,
    mu: &[AlgebraicNumber],
) -> Result<(TrainTrack, Vec<AlgebraicNumber>, Vec<MoveRecord>), MoveError> {
    let maxes = is_max(mu)?;
    for &b in &maxes {
        if t.classify_branch(b) != BranchKind::Large {
            return Err(MoveError::MaximalNotLarge(b));
        }
    }
    let (mut t, mut mu) = (t.clone(), mu.to_vec());
    let mut batch = Vec::with_capacity(maxes.len());
    for b in maxes {
        let (t2, mu2, rec) = split(&t, &mu, b).map_err(|e| match e {
            MoveError::CentralSplit(b) => MoveError::CentralSplitInBatch(b),
            other => other,
        })?;
        t = t2;
        mu = mu2;
        batch.push(rec);
    }
    Ok((t, mu, batch))
}

/// Iterates maximal splitting until the projective measured track repeats.
pub fn run_sequence(
    t: &TrainTrack,
    mu: &[AlgebraicNumber],
    max_steps: usize,
) -> Result<(SplittingSequence, Option<PeriodicityCertificate>), MoveError> {
    t.validate_measure(mu)?;
    let mut seq = SplittingSequence::new(t.clone(), mu.to_vec());
    let mut seen: HashMap<String, usize> = HashMap::new();
    seen.insert(canonical_form(t, Some(mu)), 0);
    for i in 1..=max_steps {
        seq.step()?;
        let (t2, mu2) = seq.last();
        let key = canonical_form(t2, Some(mu2));
        if let Some(&n) = seen.get(&key) {
            let cert = certify(&seq, n, i - n)?;
            return Ok((seq, Some(cert)));
        }
        seen.insert(key, i);
    }
    Ok((seq, None))
}

/// Extends the sequence so the certificate covers `k` consecutive periods.
pub fn power_certificate(
    seq: &mut SplittingSequence,
    cert: &PeriodicityCertificate,
    k: usize,
) -> Result<PeriodicityCertificate, MoveError> {
    assert!(k >= 1);
    let end = cert.n + k * cert.m;
    while seq.len() < end {
        seq.step()?;
    }
    certify(seq, cert.n, k * cert.m)
}

fn choose_iso(mut isos: Vec<TrackIso>) -> Option<TrackIso> {
    if let Some(i) = isos.iter().position(|i| i.is_identity_on_switches()) {
        return Some(isos.swap_remove(i));
    }
    isos.into_iter().next()
}

/// Builds and checks the certificate for states `n` and `n + m` of `seq`.
pub fn certify(
    seq: &SplittingSequence,
    n: usize,
    m: usize,
) -> Result<PeriodicityCertificate, MoveError> {
    let fail = |s: &str| MoveError::CertificateFailed(s.to_string());
    let (tn, mun) = &seq.states[n];
    let (tm, mum) = &seq.states[n + m];
    let iso = choose_iso(isomorphisms(tn, Some(mun), tm, Some(mum)))
        .ok_or_else(|| fail("no isomorphism"))?;
    let scale = mum[iso.branches[0]].checked_div(&mun[0])?;
    for b in 0..mun.len() {
        if mum[iso.branches[b]] != mun[b].checked_mul(&scale)? {
            return Err(fail("measures are not proportional under the isomorphism"));
        }
    }
    let one = scale.field().from_int(1);
    if !scale.is_positive() || scale.compare(&one)? != Ordering::Less {
        return Err(fail("scale is not in (0, 1)"));
    }
    let dilatation = scale.inverse()?;

    let nb = mun.len();
    let mut fold_factors = Vec::new();
    let mut product = IntegerMatrix::identity(nb);
    for batch in &seq.batches[n..n + m] {
        for rec in batch {
            let f = rec.fold_matrix(nb);
            product = product.mul(&f);
            fold_factors.push(f);
        }
    }
    // T = M P^{-1}, where (P μ)_b = μ(iso(b))
    let mut transition = IntegerMatrix::identity(nb);
    for i in 0..nb {
        for j in 0..nb {
            transition.set(i, j, product.get(i, iso.branches[j]).clone());
        }
    }
    // T μ_n = λ μ_n, exactly
    for i in 0..nb {
        let mut acc = scale.field().from_int(0);
        for j in 0..nb {
            let c = transition.get(i, j);
            if *c != BigInt::from(0) {
                acc = acc.checked_add(
                    &mun[j].checked_mul(&scale.field().from_rational(c.clone().into()))?,
                )?;
            }
        }
        if acc != mun[i].checked_mul(&dilatation)? {
            return Err(fail(
                "measure is not an eigenvector of the transition matrix",
            ));
        }
    }
    let minimal_polynomial = dilatation.minimal_polynomial();
    let (top, lo, hi) = largest_real_root_factor(&transition.char_poly())
        .ok_or_else(|| fail("no real eigenvalue"))?;
    if top != minimal_polynomial {
        return Err(fail("dilatation is not the leading eigenvalue"));
    }
    // the leading root of that factor is the dilatation itself
    let field = NumberField::new(top, lo, hi)?;
    if compare_real(&field.generator(), &dilatation) != Ordering::Equal {
        return Err(fail("dilatation is not the leading eigenvalue"));
    }

    let mut split_ids: BTreeSet<BranchId> = BTreeSet::new();
    for batch in &seq.batches[n..n + m] {
        split_ids.extend(batch.iter().map(|r| r.branch));
    }
    let mut frontier: Vec<BranchId> = split_ids.iter().copied().collect();
    while let Some(b) = frontier.pop() {
        let img = iso.branches[b];
        let pre = iso.inverse().branches[b];
        for x in [img, pre] {
            if split_ids.insert(x) {
                frontier.push(x);
            }
        }
    }
    let unsplit: Vec<BranchId> = (0..nb).filter(|b| !split_ids.contains(b)).collect();
    if !unsplit.is_empty() {
        return Err(MoveError::UnsplitBranches(unsplit));
    }

    Ok(PeriodicityCertificate {
        n,
        m,
        iso,
        scale,
        dilatation,
        minimal_polynomial,
        transition,
        fold_factors,
    })
}

/// Text dump: one `step` line per state and a closing `period` line.
pub fn dump_sequence(seq: &SplittingSequence, cert: Option<&PeriodicityCertificate>) -> String {
    let mut s = String::new();
    for (i, (_, mu)) in seq.states.iter().enumerate() {
        let batch = if i == 0 {
            "-".to_string()
        } else {
            seq.batches[i - 1]
                .iter()
                .map(|r| format!("{}{}", r.branch, r.kind.tag()))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let weights = mu
            .iter()
            .enumerate()
            .map(|(b, w)| format!("{}:{}", b, w.to_coeff_string().replace(' ', ",")))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(s, "step {} | batch {} | weights {}", i, batch, weights);
    }
    if let Some(c) = cert {
        let _ = writeln!(
            s,
            "period n={} m={} scale={} iso={}",
            c.n,
            c.m,
            c.scale.to_coeff_string().replace(' ', ","),
            format_iso(&c.iso)
        );
    }
    s
}

pub fn format_iso(iso: &TrackIso) -> String {
    let sw = iso
        .switches
        .iter()
        .enumerate()
        .map(|(a, b)| format!("s{}>{}", a, b));
    let br = iso
        .branches
        .iter()
        .enumerate()
        .map(|(a, b)| format!("b{}>{}", a, b));
    sw.chain(br).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::{seed_punctured_torus, word_exponent, word_matrix};

    fn run(word: &str) -> (SplittingSequence, PeriodicityCertificate) {
        let (t, mu) = seed_punctured_torus(word).unwrap();
        let (mut seq, cert) = run_sequence(&t, &mu, 100).unwrap();
        let cert = cert.expect("periodic");
        let k = word_exponent(word);
        let cert = if k > 1 {
            power_certificate(&mut seq, &cert, k).unwrap()
        } else {
            cert
        };
        (seq, cert)
    }

    #[test]
    fn rl_period_two() {
        let (seq, cert) = run("RL");
        assert_eq!((cert.n, cert.m), (0, 2));
        assert_eq!(
            cert.minimal_polynomial,
            IntPolynomial::from_i64s(&[1, -3, 1])
        );
        assert!(cert.iso.is_identity_on_switches());
        let kinds: Vec<_> = seq.batches.iter().map(|b| b[0].kind.tag()).collect();
        assert_eq!(kinds, vec!["R", "L"]);
        let keys = seq.canonical_keys();
        assert_eq!(keys[0], keys[2]);
        assert_ne!(keys[0], keys[1]);
        for f in &cert.fold_factors {
            assert_eq!(f.entry_sum(), BigInt::from(5));
        }
    }

    #[test]
    fn torus_words_match_matrix_oracle() {
        for w in ["RRL", "RLL", "RRLL", "RLRLL", "RLRL"] {
            let (_, cert) = run(w);
            assert_eq!(cert.m, w.len(), "{}", w);
            let (oracle, _, _) = largest_real_root_factor(&word_matrix(w).char_poly()).unwrap();
            assert_eq!(cert.minimal_polynomial, oracle, "{}", w);
        }
    }

    #[test]
    fn rational_measure_hits_central_split() {
        let (t, _) = seed_punctured_torus("RL").unwrap();
        let q = NumberField::rationals();
        let mu = vec![q.from_int(5), q.from_int(3), q.from_int(2)];
        assert!(matches!(
            run_sequence(&t, &mu, 100),
            Err(MoveError::CentralSplitInBatch(_))
        ));
    }

    #[test]
    fn dump_has_period_line() {
        let (seq, cert) = run("RL");
        let d = dump_sequence(&seq, Some(&cert));
        assert!(d.starts_with("step 0 | batch - | weights "));
        assert!(d.contains("step 1 | batch 0R |"));
        assert!(d
            .lines()
            .last()
            .unwrap()
            .starts_with("period n=0 m=2 scale="));
    }
}
