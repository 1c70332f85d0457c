use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use veering_core::algebra::{format_rational, AlgebraicNumber};
use veering_core::bounds::verify_inequality;
use veering_core::moves::{
    dump_sequence, format_iso, power_certificate, run_sequence, DEFAULT_MAX_STEPS,
};
use veering_core::pipeline::{run_pipeline, PipelineError, PipelineInput, RunReport};
use veering_core::search::{find_sigma05, fixture_text};
use veering_core::seed::{seed_punctured_torus, word_exponent, SeedError};
use veering_core::taut::{
    compare_conjugacy, conjugacy_key, parse_triangulation, serialize_triangulation,
    triangulation_json, ConjugacyKey, TriangulationFile,
};
use veering_core::track::{parse_track, serialize_track, SurfaceHeader, TrackFile, TrainTrack};

#[derive(Parser)]
#[command(
    name = "veering",
    version,
    about = "Layered veering triangulations from periodic splitting sequences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct Common {
    /// Measured track file.
    #[arg(long, conflicts_with = "word")]
    input: Option<PathBuf>,
    /// Once-punctured torus word over R and L.
    #[arg(long)]
    word: Option<String>,
    #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
    max_steps: usize,
    /// Width of printed root intervals, in bits.
    #[arg(long, default_value_t = 64)]
    precision_bits: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the main output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a track (and its measure) and summarize the surface.
    Validate(Common),
    /// Run the maximal splitting sequence and print its certificate.
    Run(Common),
    /// Build the layered triangulation and the run report.
    Triangulate {
        #[command(flatten)]
        common: Common,
        /// Also write the run report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Record wall-clock time in the report.
        #[arg(long)]
        timing: bool,
    },
    /// Minimal polynomial and decimal enclosure of the dilatation.
    Dilatation(Common),
    /// Inequality and branch-count checks for one run.
    Bounds(Common),
    /// Decide conjugacy from two run reports or triangulation files.
    Compare {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print the measured track of a punctured-torus word.
    SeedTorus {
        #[arg(long)]
        word: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for the five-punctured sphere fixture and write it.
    SearchFixture {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum CliError {
    Parse(String),
    Domain(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Parse(_) => 2,
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        CliError::Domain(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn domain(e: impl ToString) -> CliError {
    CliError::Domain(e.to_string())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {}", path.display(), e)))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| domain(format!("{}: {}", p.display(), e))),
        None => {
            print!("{}", text);
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn seed(word: &str) -> Result<(TrainTrack, Vec<AlgebraicNumber>)> {
    seed_punctured_torus(word).map_err(|e| match e {
        SeedError::BadWord(_) => CliError::Parse(e.to_string()),
        _ => domain(e),
    })
}

fn load_file(c: &Common) -> Result<TrackFile> {
    match (&c.input, &c.word) {
        (Some(p), _) => {
            let text = read(p)?;
            parse_track(&text).map_err(|e| CliError::Parse(format!("{}: {}", p.display(), e)))
        }
        (None, Some(w)) => {
            let (track, measure) = seed(w)?;
            Ok(TrackFile {
                surface: SurfaceHeader::Auto,
                track,
                measure: Some(measure),
            })
        }
        (None, None) => Err(CliError::Parse(
            "one of --input or --word is required".into(),
        )),
    }
}

fn load_input(c: &Common) -> Result<PipelineInput> {
    if let Some(w) = &c.word {
        seed(w)?;
        return Ok(PipelineInput::from_word(w)?);
    }
    let f = load_file(c)?;
    let measure = f
        .measure
        .ok_or_else(|| domain("the track file has no measure"))?;
    let name = c
        .input
        .as_ref()
        .map(|p| p.display().to_string())
        .unwrap_or_default();
    Ok(PipelineInput::from_track(
        &format!("file {}", name),
        f.track,
        measure,
    ))
}

fn validate(c: &Common) -> Result<()> {
    let f = load_file(c)?;
    let s = f.track.validate().map_err(domain)?;
    if let SurfaceHeader::Explicit { genus, punctures } = f.surface {
        if (genus, punctures) != (s.genus, s.punctures) {
            return Err(domain(format!(
                "header declares g={} n={} but the track gives g={} n={}",
                genus, punctures, s.genus, s.punctures
            )));
        }
    }
    if let Some(mu) = &f.measure {
        f.track.validate_measure(mu).map_err(domain)?;
    }
    let text = match c.format {
        Format::Json => to_json(&json!({ "surface": s, "measured": f.measure.is_some() })),
        Format::Text => {
            let mut t = format!(
                "genus {}\npunctures {}\nswitches {}\nbranches {}\n",
                s.genus, s.punctures, s.switches, s.branches
            );
            for (i, r) in s.regions.iter().enumerate() {
                t.push_str(&format!(
                    "region {} cusps {} punctured {}\n",
                    i, r.cusps, r.punctured
                ));
            }
            t.push_str(if f.measure.is_some() {
                "measure ok\n"
            } else {
                "measure none\n"
            });
            t
        }
    };
    emit(&c.out, &text)
}

fn run(c: &Common) -> Result<()> {
    let input = load_input(c)?;
    let (mut seq, cert) =
        run_sequence(&input.track, &input.measure, c.max_steps).map_err(domain)?;
    let mut cert = cert.ok_or_else(|| domain(PipelineError::NoPeriod(c.max_steps)))?;
    if input.power > 1 {
        cert = power_certificate(&mut seq, &cert, input.power).map_err(domain)?;
    }
    let text = match c.format {
        Format::Text => dump_sequence(&seq, Some(&cert)),
        Format::Json => {
            let batches: Vec<Vec<String>> = seq
                .batches
                .iter()
                .map(|b| {
                    b.iter()
                        .map(|r| format!("{}{}", r.branch, r.kind.tag()))
                        .collect()
                })
                .collect();
            to_json(&json!({
                "batches": batches,
                "certificate": {
                    "n": cert.n,
                    "m": cert.m,
                    "splits": cert.total_splits(&seq),
                    "scale": cert.scale.to_coeff_string(),
                    "iso": format_iso(&cert.iso),
                    "minpoly": cert.minimal_polynomial.to_coeff_string(),
                },
            }))
        }
    };
    emit(&c.out, &text)
}

fn report_comment(r: &RunReport) -> String {
    let mut s = String::new();
    s.push_str(&format!("# input {}\n", r.input));
    s.push_str(&format!(
        "# surface g={} n={}\n",
        r.surface[0], r.surface[1]
    ));
    s.push_str(&format!(
        "# dilatation minpoly {} decimal {}\n",
        r.dilatation.minpoly, r.dilatation.decimal
    ));
    s.push_str(&format!(
        "# period n={} m={} splits={}\n",
        r.period.n, r.period.m, r.period.splits
    ));
    s.push_str(&format!(
        "# tetrahedra {} edges {} cusps {}\n",
        r.counts.tetrahedra, r.counts.edges, r.counts.cusps
    ));
    s.push_str(&format!(
        "# veering {} colors {}\n",
        r.checks.veering, r.colors
    ));
    s.push_str(&format!("# conjugacy {}\n", r.conjugacy_digest));
    s
}

fn triangulate(c: &Common, report_path: &Option<PathBuf>, timing: bool) -> Result<()> {
    let input = load_input(c)?;
    let start = Instant::now();
    let p = run_pipeline(input, c.max_steps)?;
    let mut report = p.report.clone();
    if timing {
        report.timing_ms = Some(start.elapsed().as_millis() as u64);
    }
    let file = TriangulationFile {
        triangulation: p.triangulation.clone(),
        coloring: Some(p.coloring.clone()),
        fiber: Some(p.fiber.clone()),
    };
    let text = match c.format {
        Format::Text => format!(
            "{}{}",
            report_comment(&report),
            serialize_triangulation(&file)
        ),
        Format::Json => {
            to_json(&json!({ "report": report, "triangulation": triangulation_json(&file) }))
        }
    };
    if let Some(path) = report_path {
        fs::write(path, to_json(&report))
            .map_err(|e| domain(format!("{}: {}", path.display(), e)))?;
    }
    emit(&c.out, &text)
}

fn dilatation(c: &Common) -> Result<()> {
    let p = run_pipeline(load_input(c)?, c.max_steps)?;
    let lambda = &p.certificate.dilatation;
    let iv = lambda.approx(c.precision_bits);
    let digits = (c.precision_bits as f64 / 3.33) as usize;
    let text = match c.format {
        Format::Text => format!(
            "minpoly {}\nexact {}\ndecimal {}\ninterval {} {}\n",
            p.certificate.minimal_polynomial.to_coeff_string(),
            lambda.to_coeff_string(),
            lambda.to_decimal(digits.max(1)),
            format_rational(&iv.lo),
            format_rational(&iv.hi)
        ),
        Format::Json => to_json(&json!({
            "minpoly": p.certificate.minimal_polynomial.to_coeff_string(),
            "field_minpoly": lambda.field().minpoly().to_coeff_string(),
            "exact": lambda.to_coeff_string(),
            "decimal": lambda.to_decimal(digits.max(1)),
            "interval": [format_rational(&iv.lo), format_rational(&iv.hi)],
        })),
    };
    emit(&c.out, &text)
}

fn bounds(c: &Common) -> Result<()> {
    let input = load_input(c)?;
    let surface = input.track.validate().map_err(domain)?;
    let (mut seq, cert) =
        run_sequence(&input.track, &input.measure, c.max_steps).map_err(domain)?;
    let mut cert = cert.ok_or_else(|| domain(PipelineError::NoPeriod(c.max_steps)))?;
    if input.power > 1 {
        cert = power_certificate(&mut seq, &cert, input.power).map_err(domain)?;
    }
    let r = verify_inequality(&seq, &cert, surface.genus, surface.punctures).map_err(domain)?;
    let text = match c.format {
        Format::Json => to_json(&r),
        Format::Text => format!(
            "e {}\nm {}\nlambda {} ({})\nmargin {} {}\nfold_entry_sums {}\nsurface g={} n={}\nbranch_bound {}\npsi_exponent {}\n",
            r.e,
            r.m,
            r.lambda_decimal,
            r.lambda_minpoly,
            r.inequality_margin[0],
            r.inequality_margin[1],
            r.fold_entry_sums.join(" "),
            r.genus,
            r.punctures,
            r.branch_bound,
            r.psi_exponent
        ),
    };
    emit(&c.out, &text)
}

/// A conjugacy key from a run report, a `triangulate --format json`
/// document, or a triangulation text file with face weights.
fn load_key(path: &Path) -> Result<ConjugacyKey> {
    let text = read(path)?;
    if let Ok(v) = serde_json::from_str::<serde_json::Value>(&text) {
        let report = v.get("report").cloned().unwrap_or(v);
        let r: RunReport = serde_json::from_value(report)
            .map_err(|e| CliError::Parse(format!("{}: {}", path.display(), e)))?;
        return Ok(ConjugacyKey {
            tetrahedra: r.counts.tetrahedra,
            key: r.conjugacy_key,
            digest: r.conjugacy_digest,
        });
    }
    let f = parse_triangulation(&text)
        .map_err(|e| CliError::Parse(format!("{}: {}", path.display(), e)))?;
    let fiber = f
        .fiber
        .ok_or_else(|| domain(format!("{}: no face weights", path.display())))?;
    if fiber.weights.len() != 2 * f.triangulation.len() {
        return Err(domain(format!(
            "{}: expected {} face weights",
            path.display(),
            2 * f.triangulation.len()
        )));
    }
    Ok(conjugacy_key(&f.triangulation, &fiber))
}

fn compare(a: &Path, b: &Path, format: Format) -> Result<()> {
    let (ka, kb) = (load_key(a)?, load_key(b)?);
    let same = compare_conjugacy(&ka, &kb);
    let verdict = if same { "conjugate" } else { "not conjugate" };
    match format {
        Format::Text => println!("{}", verdict),
        Format::Json => print!("{}", to_json(&json!({ "conjugate": same }))),
    }
    Ok(())
}

fn seed_torus(word: &str, out: &Option<PathBuf>) -> Result<()> {
    let (track, measure) = seed(word)?;
    let k = word_exponent(word);
    let mut text = String::new();
    if k > 1 {
        text.push_str(&format!("# {} is a power of exponent {}\n", word, k));
    }
    text.push_str(&serialize_track(&TrackFile {
        surface: SurfaceHeader::Auto,
        track,
        measure: Some(measure),
    }));
    emit(out, &text)
}

fn search_fixture(out: &Option<PathBuf>) -> Result<()> {
    let (hit, stats) = find_sigma05();
    let hit = hit.ok_or_else(|| {
        domain(format!(
            "no fixture among {} candidates ({} cycles)",
            stats.candidates, stats.cycles_checked
        ))
    })?;
    eprintln!(
        "{} candidates, {} closed cycles checked",
        stats.candidates, stats.cycles_checked
    );
    emit(out, &fixture_text(&hit))
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Validate(c) => validate(&c),
        Command::Run(c) => run(&c),
        Command::Triangulate {
            common,
            report,
            timing,
        } => triangulate(&common, &report, timing),
        Command::Dilatation(c) => dilatation(&c),
        Command::Bounds(c) => bounds(&c),
        Command::Compare {
            first,
            second,
            format,
        } => compare(&first, &second, format),
        Command::SeedTorus { word, out } => seed_torus(&word, &out),
        Command::SearchFixture { out } => search_fixture(&out),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (CliError::Parse(m) | CliError::Domain(m)) = &e;
            eprintln!("error: {}", m);
            ExitCode::from(e.code())
        }
    }
}
