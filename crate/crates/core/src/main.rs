use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use treenorm::certificates::{
    extend_within_ball, fresh_candidate, l1_basis_check, m_ccw_witness, octahedrality_deficit, product_mesh,
    sd2p_witnesses, standard_mesh,
};
use treenorm::duals::{dual_norm, DualNormOptions};
use treenorm::rational::{parse_q, Q};
use treenorm::slices::{slice_diameter, slice_members, Scenario, SliceSpec};
use treenorm::spaces::{norm_with_caps, SparseVector};
use treenorm::tree::{EnumCaps, NodePath, SegmentVariant, SpaceKind, SpaceSpec};
use treenorm::verify::{self, Suite};
use treenorm::wire::{self, FunctionalDoc, VectorDoc};
use treenorm::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "treenorm", version, about = "Exact computations in James-type tree spaces")]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct GlobalOpts {
    /// JSON file with defaults; flags given on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Space when the input does not name one: JT_INF, JH, JH_INF, M_HYP.
    #[arg(long, global = true)]
    space: Option<SpaceKind>,
    /// JT_INF segment reading; `literal` also reports gapped chains.
    #[arg(long, global = true, value_enum)]
    segments: Option<Segments>,
    /// Deepest tree level searched by slices and dual norms.
    #[arg(long, global = true)]
    level_cap: Option<usize>,
    /// Family enumeration cap.
    #[arg(long, global = true)]
    enum_cap: Option<usize>,
    /// Dual norm gap tolerance, as a rational.
    #[arg(long, global = true)]
    tol: Option<String>,
    /// Coefficient step of JT_INF grid molecules.
    #[arg(long, global = true)]
    grid_resolution: Option<String>,
    /// Member pairs evaluated for a diameter lower bound.
    #[arg(long, global = true)]
    max_pairs: Option<usize>,
    /// Seed of the randomized verification suites.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads; output does not depend on it.
    #[arg(long, global = true)]
    parallel: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Segments {
    Interval,
    Literal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
enum Format {
    #[default]
    Json,
    Tsv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Norm of a vector with its maximizing family.
    Norm { vector: PathBuf },
    /// Certified dual norm of a segment functional combination.
    DualNorm { functional: PathBuf },
    /// Representatives of the norming-set slice at `x`.
    Slice {
        vector: PathBuf,
        #[arg(long)]
        alpha: String,
    },
    /// Diameter bounds of the norming-set slice at `x`.
    Diameter {
        /// Optional when `--scenario` is given.
        vector: Option<PathBuf>,
        #[arg(long)]
        alpha: String,
        /// JT_SQRT2, JHINF_53 or JH_ZERO.
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long)]
        epsilon: Option<String>,
        #[arg(long)]
        delta: Option<String>,
    },
    /// Builds and verifies a constructive certificate.
    #[command(subcommand)]
    Certify(Certify),
    /// Runs the acceptance checks; exits 1 if any fails.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

#[derive(Subcommand, Debug)]
enum Certify {
    /// `{"space", "slices": [{"functional", "alpha", "weight"}]}`.
    Sd2p { input: PathBuf },
    /// `{"slices": [{"x", "epsilon", "weight"}]}` in M_HYP.
    Ccw { input: PathBuf },
    /// `{"space", "basis": [vector], "candidate"?, "mesh"?: {"lambdas", "coeffs"}}`.
    Octahedral { input: PathBuf },
    /// Adds `n` signed fresh coordinates of size `1/n`.
    Extend {
        vector: PathBuf,
        #[arg(long)]
        n: usize,
        /// Comma-separated `+`/`-`; all `+` when omitted.
        #[arg(long)]
        signs: Option<String>,
    },
    /// Norm of `Σ a_i e_(i)` over level-one siblings against `Σ|a_i|`.
    L1 {
        #[arg(required = true, allow_hyphen_values = true)]
        coefficients: Vec<String>,
    },
}

/// Settings after merging defaults, the config file and flags.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RunConfig {
    space: Option<SpaceKind>,
    segments: Option<Segments>,
    level_cap: Option<usize>,
    enum_cap: Option<usize>,
    tol: Option<String>,
    grid_resolution: Option<String>,
    max_pairs: Option<usize>,
    seed: Option<u64>,
    format: Option<Format>,
    parallel: Option<usize>,
}

impl RunConfig {
    fn load(opts: &GlobalOpts) -> Result<Self> {
        let mut c: RunConfig = match &opts.config {
            Some(p) => wire::parse_json(&read(p)?)?,
            None => RunConfig::default(),
        };
        macro_rules! flag {
            ($($f:ident),*) => { $( if opts.$f.is_some() { c.$f = opts.$f.clone(); } )* };
        }
        flag!(space, segments, level_cap, enum_cap, tol, grid_resolution, max_pairs, seed, format, parallel);
        if c.enum_cap == Some(0) || c.parallel == Some(0) {
            return Err(Error::Precondition("caps and worker counts must be positive".into()));
        }
        if let Some(t) = &c.tol {
            if parse_q(t)? <= Q::default() {
                return Err(Error::Precondition("tol must be positive".into()));
            }
        }
        Ok(c)
    }

    fn caps(&self) -> EnumCaps {
        let mut caps = EnumCaps::default();
        if let Some(n) = self.enum_cap {
            caps.max_families = n;
        }
        caps
    }

    fn dual(&self) -> Result<DualNormOptions> {
        let mut o = DualNormOptions { level_cap: self.level_cap, ..Default::default() };
        if let Some(t) = &self.tol {
            o.tol = parse_q(t)?;
        }
        Ok(o)
    }

    fn space(&self, embedded: Option<SpaceKind>) -> Result<SpaceKind> {
        embedded
            .or(self.space)
            .ok_or_else(|| Error::Precondition("no space given: use --space or a \"space\" field".into()))
    }

    fn slice_spec(&self, x: SparseVector, alpha: Q, space: SpaceKind) -> Result<SliceSpec> {
        let mut spec = SliceSpec::new(x, alpha, space);
        spec.level_cap = self.level_cap;
        spec.caps = self.caps();
        spec.dual = self.dual()?;
        if let Some(r) = &self.grid_resolution {
            spec.grid_resolution = parse_q(r)?;
        }
        if let Some(n) = self.max_pairs {
            spec.max_pairs = n;
        }
        Ok(spec)
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn read_vector(path: &Path) -> Result<(SparseVector, Option<SpaceKind>)> {
    wire::parse_vector(&read(path)?)
}

/// Scenario parameters not given as flags are read off the vector.
fn scenario_from(name: &str, alpha: &Q, epsilon: Option<Q>, delta: Option<Q>, x: Option<&SparseVector>) -> Result<Scenario> {
    let at = |n: Vec<u32>| x.map(|v| v.get(&NodePath::new(n)));
    let missing = |p: &str| Error::Precondition(format!("scenario {name} needs --{p}"));
    let alpha = alpha.clone();
    Ok(match name {
        "JT_SQRT2" => Scenario::JtSqrt2 {
            epsilon: epsilon.or_else(|| at(vec![1])).ok_or_else(|| missing("epsilon"))?,
            alpha,
            delta: delta.ok_or_else(|| missing("delta"))?,
        },
        "JHINF_53" => Scenario::JhInf53 { alpha, delta: delta.or_else(|| at(vec![1])).ok_or_else(|| missing("delta"))? },
        "JH_ZERO" => Scenario::JhZero { epsilon: epsilon.or_else(|| at(vec![0])).ok_or_else(|| missing("epsilon"))?, alpha },
        other => return Err(Error::Parse(format!("unknown scenario {other:?}"))),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Sd2pInput {
    space: SpaceKind,
    slices: Vec<Sd2pSliceInput>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Sd2pSliceInput {
    functional: FunctionalDoc,
    alpha: String,
    weight: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CcwInput {
    slices: Vec<CcwSliceInput>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CcwSliceInput {
    x: VectorDoc,
    epsilon: String,
    weight: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OctahedralInput {
    space: SpaceKind,
    basis: Vec<VectorDoc>,
    #[serde(default)]
    candidate: Option<VectorDoc>,
    #[serde(default)]
    mesh: Option<MeshInput>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MeshInput {
    lambdas: Vec<String>,
    coeffs: Vec<String>,
}

fn parse_all(v: &[String]) -> Result<Vec<Q>> {
    v.iter().map(|s| parse_q(s)).collect()
}

/// Report plus whether verification failed.
fn dispatch(cmd: &Command, cfg: &RunConfig) -> Result<(Value, bool)> {
    let ok = |v: Value| Ok((v, false));
    match cmd {
        Command::Norm { vector } => {
            let (x, embedded) = read_vector(vector)?;
            let kind = cfg.space(embedded)?;
            let spec = match cfg.segments {
                Some(Segments::Literal) => SpaceSpec::literal(kind)?,
                _ => SpaceSpec { kind, variant: SegmentVariant::Interval },
            };
            ok(wire::norm_json(&norm_with_caps(&x, spec, &cfg.caps())?))
        }
        Command::DualNorm { functional } => {
            let doc: FunctionalDoc = wire::parse_json(&read(functional)?)?;
            let kind = cfg.space(doc.space)?;
            let g = wire::functional_from_doc(&doc, kind)?;
            let spec = match cfg.segments {
                Some(Segments::Literal) => SpaceSpec::literal(kind)?,
                _ => SpaceSpec::new(kind),
            };
            ok(wire::dual_norm_json(kind, &dual_norm(&g, spec, &cfg.dual()?)?))
        }
        Command::Slice { vector, alpha } => {
            let (x, embedded) = read_vector(vector)?;
            let kind = cfg.space(embedded)?;
            let alpha = parse_q(alpha)?;
            let members = slice_members(&cfg.slice_spec(x, alpha.clone(), kind)?)?;
            ok(wire::members_json(kind, &alpha, &members))
        }
        Command::Diameter { vector, alpha, scenario, epsilon, delta } => {
            let alpha = parse_q(alpha)?;
            let read = vector.as_deref().map(read_vector).transpose()?;
            let eps = epsilon.as_deref().map(parse_q).transpose()?;
            let del = delta.as_deref().map(parse_q).transpose()?;
            let scenario =
                scenario.as_deref().map(|s| scenario_from(s, &alpha, eps, del, read.as_ref().map(|r| &r.0))).transpose()?;
            let (x, kind) = match (read, &scenario) {
                (Some((x, embedded)), _) => {
                    let kind = match (&scenario, embedded.or(cfg.space)) {
                        (Some(s), None) => s.space(),
                        _ => cfg.space(embedded)?,
                    };
                    (x, kind)
                }
                (None, Some(s)) => (s.vector(), s.space()),
                (None, None) => return Err(Error::Precondition("diameter needs a vector or --scenario".into())),
            };
            if let Some(s) = &scenario {
                s.check()?;
            }
            let spec = cfg.slice_spec(x, alpha, kind)?;
            ok(wire::diameter_json(&slice_diameter(&spec, scenario.as_ref())?))
        }
        Command::Certify(c) => certify(c, cfg),
        Command::Verify { suite } => {
            let suite: Suite = suite.parse()?;
            let checks = verify::run_suite(suite, cfg.seed.unwrap_or(verify::DEFAULT_SEED));
            let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
            let report = json!({
                "passed": failed.is_empty(),
                "failed": failed,
                "checks": checks.iter().map(|c| json!({
                    "id": c.id, "name": c.name, "passed": c.passed, "detail": c.detail,
                })).collect::<Vec<_>>(),
            });
            Ok((report, !failed.is_empty()))
        }
    }
}

fn certify(c: &Certify, cfg: &RunConfig) -> Result<(Value, bool)> {
    let v = match c {
        Certify::Sd2p { input } => {
            let inp: Sd2pInput = wire::parse_json(&read(input)?)?;
            let mut slices = Vec::new();
            let mut weights = Vec::new();
            for s in &inp.slices {
                slices.push((wire::functional_from_doc(&s.functional, inp.space)?, parse_q(&s.alpha)?));
                weights.push(parse_q(&s.weight)?);
            }
            wire::sd2p_json(&sd2p_witnesses(&slices, &weights, inp.space)?)
        }
        Certify::Ccw { input } => {
            let inp: CcwInput = wire::parse_json(&read(input)?)?;
            let mut slices = Vec::new();
            let mut weights = Vec::new();
            for s in &inp.slices {
                slices.push((wire::vector_from_doc(&s.x)?.0, parse_q(&s.epsilon)?));
                weights.push(parse_q(&s.weight)?);
            }
            wire::ccw_json(&m_ccw_witness(&slices, &weights)?)
        }
        Certify::Octahedral { input } => {
            let inp: OctahedralInput = wire::parse_json(&read(input)?)?;
            let basis: Vec<SparseVector> =
                inp.basis.iter().map(|d| wire::vector_from_doc(d).map(|r| r.0)).collect::<Result<_>>()?;
            for b in &basis {
                b.validate(inp.space)?;
            }
            let x = match &inp.candidate {
                Some(d) => wire::vector_from_doc(d)?.0,
                None => fresh_candidate(&basis),
            };
            let mesh = match &inp.mesh {
                Some(m) => product_mesh(&parse_all(&m.lambdas)?, &parse_all(&m.coeffs)?, basis.len()),
                None => standard_mesh(basis.len()),
            };
            wire::octahedral_json(&octahedrality_deficit(inp.space, &basis, &x, &mesh)?)
        }
        Certify::Extend { vector, n, signs } => {
            let (x, embedded) = read_vector(vector)?;
            let kind = cfg.space(embedded)?;
            let signs: Vec<Q> = match signs {
                None => vec![Q::from_integer(1.into()); *n],
                Some(s) => s
                    .split(',')
                    .map(|t| match t.trim() {
                        "+" | "+1" | "1" => Ok(Q::from_integer(1.into())),
                        "-" | "-1" => Ok(Q::from_integer((-1).into())),
                        o => Err(Error::Parse(format!("bad sign {o:?}"))),
                    })
                    .collect::<Result<_>>()?,
            };
            let y = extend_within_ball(&x, *n, &signs, kind)?;
            let ny = norm_with_caps(&y, kind, &cfg.caps())?.value;
            wire::extension_json(kind, &x, &y, *n, &ny)
        }
        Certify::L1 { coefficients } => {
            let kind = cfg.space.unwrap_or(SpaceKind::JhInf);
            let (value, equal) = l1_basis_check(kind, &parse_all(coefficients)?)?;
            json!({"space": kind.name(), "value": wire::q_json(&value), "equal": equal})
        }
    };
    Ok((v, false))
}

fn emit(v: &Value, format: Format) {
    match format {
        Format::Json => println!("{}", serde_json::to_string(v).expect("json")),
        Format::Tsv => print!("{}", wire::to_tsv(v)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            e.exit()
        }
        Err(e) => {
            emit(&wire::error_json(&Error::Parse(e.to_string().trim().to_string())), Format::Json);
            return ExitCode::from(2);
        }
    };
    let cfg = match RunConfig::load(&cli.opts) {
        Ok(c) => c,
        Err(e) => {
            emit(&wire::error_json(&e), Format::Json);
            return ExitCode::from(2);
        }
    };
    let format = cfg.format.unwrap_or_default();
    if let Some(n) = cfg.parallel {
        // only fails if a pool already exists, which cannot happen this early
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match dispatch(&cli.command, &cfg) {
        Ok((report, failed)) => {
            emit(&report, format);
            if failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            emit(&wire::error_json(&e), format);
            ExitCode::from(if matches!(e, Error::Certificate(_)) { 1 } else { 2 })
        }
    }
}
