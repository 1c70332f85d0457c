//! End-to-end run: splitting sequence, certificate, layered triangulation,
//! checks, fiber cycle, conjugacy key and bounds, gathered in a report.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{format_rational, AlgebraicNumber};
use crate::bounds::{verify_inequality, BoundReport, BoundsError};
use crate::moves::{
    canonical_form, isomorphisms, power_certificate, run_sequence, MoveError,
    PeriodicityCertificate, SplittingSequence,
};
use crate::seed::{seed_punctured_torus, word_exponent, SeedError};
use crate::taut::{
    build_layered, build_layered_ordered, check_veering, conjugacy_key, extract_folding,
    fiber_cycle, ConjugacyKey, ExtractedFolding, FiberCycle, LayeredStructure, TautError,
    TautTriangulation3, VeeringColoring,
};
use crate::track::{SurfaceSummary, TrackError, TrainTrack};

pub const REPORT_SCHEMA: &str = "veering-run/1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PipelineError {
    #[error(transparent)]
    Track(#[from] TrackError),
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error(transparent)]
    Taut(#[from] TautError),
    #[error(transparent)]
    Seed(#[from] SeedError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error("no period found within {0} steps")]
    NoPeriod(usize),
    #[error("triangulation check failed: {0}")]
    CheckFailed(String),
}

#[derive(Clone, Debug)]
pub struct PipelineInput {
    pub descriptor: String,
    pub track: TrainTrack,
    pub measure: Vec<AlgebraicNumber>,
    /// Number of periods of the detected cycle to layer.
    pub power: usize,
}

impl PipelineInput {
    pub fn from_word(word: &str) -> Result<Self, PipelineError> {
        let (track, measure) = seed_punctured_torus(word)?;
        Ok(PipelineInput {
            descriptor: format!("word {}", word),
            track,
            measure,
            power: word_exponent(word),
        })
    }

    pub fn from_track(descriptor: &str, track: TrainTrack, measure: Vec<AlgebraicNumber>) -> Self {
        PipelineInput {
            descriptor: descriptor.to_string(),
            track,
            measure,
            power: 1,
        }
    }
}

pub struct Pipeline {
    pub input: PipelineInput,
    pub surface: SurfaceSummary,
    pub sequence: SplittingSequence,
    pub certificate: PeriodicityCertificate,
    pub triangulation: TautTriangulation3,
    pub layering: LayeredStructure,
    pub coloring: VeeringColoring,
    pub reverse_coloring: VeeringColoring,
    pub folding: ExtractedFolding,
    pub fiber: FiberCycle,
    pub key: ConjugacyKey,
    pub bounds: BoundReport,
    pub report: RunReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldReport {
    pub minpoly: String,
    pub root_interval: [String; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DilatationReport {
    pub minpoly: String,
    /// Coefficients in the power basis of the field generator.
    pub exact: String,
    pub decimal: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodReport {
    pub n: usize,
    pub m: usize,
    pub splits: usize,
    pub moves: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountsReport {
    pub tetrahedra: usize,
    pub edges: usize,
    pub cusps: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChecksReport {
    pub taut: bool,
    pub veering: bool,
    pub reverse_veering: bool,
    pub round_trip: bool,
    pub batch_order_independent: bool,
    pub certificate_isomorphisms: usize,
    /// Distinct conjugacy keys among the triangulations closed up by each
    /// certificate isomorphism.
    pub distinct_keys_across_isomorphisms: usize,
    /// Every face weight of the harmonic fiber cycle is positive.
    pub fiber_positive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub input: String,
    pub surface: [i64; 2],
    pub field: FieldReport,
    pub dilatation: DilatationReport,
    pub period: PeriodReport,
    pub counts: CountsReport,
    pub colors: String,
    pub degrees: Vec<usize>,
    pub checks: ChecksReport,
    pub fiber: Vec<String>,
    pub conjugacy_key: String,
    pub conjugacy_digest: String,
    pub bounds: BoundReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

fn punctured_forms(seq: &SplittingSequence, cert: &PeriodicityCertificate) -> Vec<String> {
    (cert.n..cert.n + cert.m)
        .map(|k| {
            let (mut t, mu) = seq.states[k].clone();
            t.puncture_all();
            canonical_form(&t, Some(&mu))
        })
        .collect()
}

/// Runs every stage; any failed check is an error.
pub fn run_pipeline(input: PipelineInput, max_steps: usize) -> Result<Pipeline, PipelineError> {
    let surface = input.track.validate()?;
    let (mut seq, cert) = run_sequence(&input.track, &input.measure, max_steps)?;
    let mut cert = cert.ok_or(PipelineError::NoPeriod(max_steps))?;
    if input.power > 1 {
        cert = power_certificate(&mut seq, &cert, input.power)?;
    }
    let (tri, layering) = build_layered(&seq, &cert)?;
    tri.check_taut()
        .map_err(|v| PipelineError::CheckFailed(format!("not taut: {:?}", v)))?;
    let coloring = check_veering(&tri).map_err(|e| PipelineError::CheckFailed(e.to_string()))?;
    let reverse_coloring = check_veering(&tri.reverse())
        .map_err(|e| PipelineError::CheckFailed(format!("reverse: {}", e)))?;
    let folding = extract_folding(&tri, &layering)?;
    let round_trip = folding.canonical_forms == punctured_forms(&seq, &cert);
    if !round_trip {
        return Err(PipelineError::CheckFailed(
            "extracted folding does not match the sequence".into(),
        ));
    }
    let fiber = fiber_cycle(&tri, &layering)?;
    let key = conjugacy_key(&tri, &fiber);

    let (ordered, ordered_layers) = build_layered_ordered(&seq, &cert, true)?;
    let batch_order_independent =
        conjugacy_key(&ordered, &fiber_cycle(&ordered, &ordered_layers)?).key == key.key;
    let (a, b) = (&seq.states[cert.n], &seq.states[cert.n + cert.m]);
    let isos = isomorphisms(&a.0, Some(&a.1), &b.0, Some(&b.1));
    let mut keys = std::collections::BTreeSet::new();
    for iso in &isos {
        let mut alt = cert.clone();
        alt.iso = iso.clone();
        let (t2, l2) = build_layered(&seq, &alt)?;
        keys.insert(conjugacy_key(&t2, &fiber_cycle(&t2, &l2)?).key);
    }

    let bounds = verify_inequality(&seq, &cert, surface.genus, surface.punctures)?;
    let lambda = &cert.dilatation;
    let field = lambda.field();
    let iv = field.root_interval(64);
    let report = RunReport {
        schema: REPORT_SCHEMA.to_string(),
        input: input.descriptor.clone(),
        surface: [surface.genus, surface.punctures],
        field: FieldReport {
            minpoly: field.minpoly().to_coeff_string(),
            root_interval: [format_rational(&iv.lo), format_rational(&iv.hi)],
        },
        dilatation: DilatationReport {
            minpoly: cert.minimal_polynomial.to_coeff_string(),
            exact: lambda.to_coeff_string(),
            decimal: lambda.to_decimal(12),
        },
        period: PeriodReport {
            n: cert.n,
            m: cert.m,
            splits: cert.total_splits(&seq),
            moves: folding.summary().steps,
        },
        counts: CountsReport {
            tetrahedra: tri.len(),
            edges: tri.num_edges(),
            cusps: tri.num_cusps(),
        },
        colors: coloring.colors.iter().map(|c| c.tag()).collect(),
        degrees: coloring.degrees.clone(),
        checks: ChecksReport {
            taut: true,
            veering: true,
            reverse_veering: true,
            round_trip,
            batch_order_independent,
            certificate_isomorphisms: isos.len(),
            distinct_keys_across_isomorphisms: keys.len(),
            fiber_positive: fiber.is_positive(),
        },
        fiber: fiber.weights.iter().map(format_rational).collect(),
        conjugacy_key: key.key.clone(),
        conjugacy_digest: key.digest.clone(),
        bounds: bounds.clone(),
        timing_ms: None,
    };
    Ok(Pipeline {
        input,
        surface,
        sequence: seq,
        certificate: cert,
        triangulation: tri,
        layering,
        coloring,
        reverse_coloring,
        folding,
        fiber,
        key,
        bounds,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moves::DEFAULT_MAX_STEPS;

    #[test]
    fn rl_report() {
        let p = run_pipeline(PipelineInput::from_word("RL").unwrap(), DEFAULT_MAX_STEPS).unwrap();
        let r = &p.report;
        assert_eq!(r.schema, REPORT_SCHEMA);
        assert_eq!(
            r.counts,
            CountsReport {
                tetrahedra: 2,
                edges: 2,
                cusps: 1
            }
        );
        assert!(r.dilatation.decimal.starts_with("2.6180339887"));
        assert!(r.checks.round_trip && r.checks.batch_order_independent);
        // the hyperelliptic involution also preserves the measured track
        assert_eq!(r.checks.certificate_isomorphisms, 2);
        assert_eq!(r.checks.distinct_keys_across_isomorphisms, 2);
        assert_eq!(r.fiber, vec!["1/2"; 4]);
        assert!(r.checks.fiber_positive);
        let json = serde_json::to_value(r).unwrap();
        assert!(json.get("bounds").is_some());
        assert!(json.get("timing_ms").is_none());
        let back: RunReport = serde_json::from_value(json).unwrap();
        assert_eq!(&back, r);
    }

    #[test]
    fn reports_are_deterministic() {
        let a = run_pipeline(
            PipelineInput::from_word("RRLRL").unwrap(),
            DEFAULT_MAX_STEPS,
        )
        .unwrap()
        .report;
        let b = run_pipeline(
            PipelineInput::from_word("RRLRL").unwrap(),
            DEFAULT_MAX_STEPS,
        )
        .unwrap()
        .report;
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }
}
