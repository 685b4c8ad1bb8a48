//! `mls`: batch front end for building unitary groups, constructing and
//! verifying logarithmic signatures, and running the spread audits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mls_core::arith;
use mls_core::construct::psu::{mls_psu3, Psu3Parts, Psu3Variant};
use mls_core::construct::{self, ConstructError, Construction};
use mls_core::geometry::{self, HermitianSpace, TraceForm};
use mls_core::gf::Field;
use mls_core::logsig::{self, LsError, Verification};
use mls_core::matrix::Matrix;
use mls_core::matgrp::{self, cosets, unitary, GroupHandle, DEFAULT_GROUP_CAP};
use mls_core::refute::{self, AuditReport, RefuteError};

const EXIT_VERIFY: u8 = 1;
const EXIT_HYPOTHESIS: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "mls", version, about = "Minimal logarithmic signatures for finite unitary groups")]
struct Cli {
    /// Enumeration cap for element tables and exhaustive verification.
    /// Defaults: 2^21 for tables, 2^33 for `ls verify`.
    #[arg(long, global = true, env = "MLS_CAP")]
    cap: Option<u128>,
    /// Worker threads for verification (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Finite field parameters.
    Field {
        #[command(subcommand)]
        cmd: FieldCmd,
    },
    /// Isotropic points and spreads.
    Geometry {
        #[command(subcommand)]
        cmd: GeometryCmd,
    },
    /// Permutation groups from matrix groups.
    Group {
        #[command(subcommand)]
        cmd: GroupCmd,
    },
    /// Read and check LS files.
    Ls {
        #[command(subcommand)]
        cmd: LsCmd,
    },
    /// Build a log signature and its certificate.
    Construct(ConstructArgs),
    /// Audits of the unitary spread construction.
    Refute {
        /// `all` (R1-R5) or one of R1..R6.
        claim: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long)]
        q: u64,
    },
}

#[derive(Subcommand)]
enum FieldCmd {
    Info {
        #[arg(long)]
        q: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Gram,
    Literal,
    Hermitian,
}

#[derive(Subcommand)]
enum GeometryCmd {
    /// Count isotropic points of `GF(q²)ⁿ` by enumeration.
    Isotropic {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
        #[arg(long, value_enum, default_value_t = Model::Gram)]
        model: Model,
    },
    /// Validate the classical spread of `GF(q^{2n})` and the action of `⟨X^{qⁿ-1}⟩`.
    Spread {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Psu,
    Su,
    Sl,
}

#[derive(Clone, Copy, ValueEnum)]
enum Part {
    Full,
    Singer,
    Torus,
    Stabilizer,
    Unipotent,
}

#[derive(Args)]
struct GroupSpec {
    #[arg(long, value_enum, default_value_t = Family::Psu)]
    family: Family,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long)]
    q: u64,
}

#[derive(Subcommand)]
enum GroupCmd {
    /// Build the group and print its descriptor and stabilizer chain.
    Build(GroupSpec),
    /// Order from the stabilizer chain and, under the cap, by enumeration.
    Order(GroupSpec),
    /// Orbits on the action domain; subgroups of `PSU₃(q)` via `--part`.
    Orbits {
        #[command(flatten)]
        spec: GroupSpec,
        #[arg(long, value_enum, default_value_t = Part::Full)]
        part: Part,
    },
}

#[derive(Subcommand)]
enum LsCmd {
    /// Exhaustive check of unique factorization.
    Verify { file: PathBuf },
    /// Length against the lower bound.
    Minimality { file: PathBuf },
    Info { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Recipe {
    Psu3,
    Solvable,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long, value_enum)]
    recipe: Recipe,
    /// `psu3` variant: even_qp1_prime, even_q2q1_prime, odd_q2q1_prime, odd_q1_2p.
    #[arg(long)]
    variant: Option<String>,
    #[arg(long)]
    q: u64,
    /// `solvable` input: a subgroup of `PSU₃(q)`.
    #[arg(long, value_enum, default_value_t = Part::Stabilizer)]
    part: Part,
    /// LS output; the certificate goes to `<out>.cert`.
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn new(code: u8, msg: impl Into<String>) -> Failure {
        Failure { code, msg: msg.into() }
    }
}

impl From<ConstructError> for Failure {
    fn from(e: ConstructError) -> Failure {
        let code = match e {
            ConstructError::Collision { .. } => EXIT_VERIFY,
            _ => EXIT_HYPOTHESIS,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<matgrp::GroupError> for Failure {
    fn from(e: matgrp::GroupError) -> Failure {
        Failure::new(EXIT_HYPOTHESIS, e.to_string())
    }
}

impl From<geometry::GeometryError> for Failure {
    fn from(e: geometry::GeometryError) -> Failure {
        Failure::new(EXIT_HYPOTHESIS, e.to_string())
    }
}

impl From<LsError> for Failure {
    fn from(e: LsError) -> Failure {
        let code = match e {
            LsError::CapExceeded { .. } => EXIT_HYPOTHESIS,
            _ => EXIT_VERIFY,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<RefuteError> for Failure {
    fn from(e: RefuteError) -> Failure {
        let code = match e {
            RefuteError::BadParameters(_) => EXIT_USAGE,
            _ => EXIT_HYPOTHESIS,
        };
        Failure::new(code, e.to_string())
    }
}

type Out = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(EXIT_USAGE);
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().expect("thread pool configured once");
    }
    let start = Instant::now();
    let result = run(&cli);
    eprintln!("elapsed {:.3}s", start.elapsed().as_secs_f64());
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Out {
    match &cli.verb {
        Verb::Field { cmd: FieldCmd::Info { q } } => field_info(*q),
        Verb::Geometry { cmd } => match cmd {
            GeometryCmd::Isotropic { n, q, model } => isotropic(*n, *q, *model),
            GeometryCmd::Spread { n, q } => spread(*n, *q),
        },
        Verb::Group { cmd } => match cmd {
            GroupCmd::Build(s) => group_build(s),
            GroupCmd::Order(s) => group_order(s, cli.cap.unwrap_or(DEFAULT_GROUP_CAP)),
            GroupCmd::Orbits { spec, part } => group_orbits(spec, *part),
        },
        Verb::Ls { cmd } => match cmd {
            LsCmd::Verify { file } => ls_verify(file, cli.cap.unwrap_or(logsig::DEFAULT_VERIFY_CAP)),
            LsCmd::Minimality { file } => {
                let ls = load(file)?;
                Ok(format!("{}\n", logsig::ls_minimality(&ls)))
            }
            LsCmd::Info { file } => ls_info(file),
        },
        Verb::Construct(args) => construct_cmd(args, cli.cap.unwrap_or(DEFAULT_GROUP_CAP)),
        Verb::Refute { claim, n, q } => refute_cmd(claim, *n, *q, cli.cap.unwrap_or(DEFAULT_GROUP_CAP)),
    }
}

fn field_info(q: u64) -> Out {
    let (p, k) = arith::prime_power(q).ok_or_else(|| Failure::new(EXIT_USAGE, format!("q = {q} is not a prime power")))?;
    let f = Field::new(p, k).map_err(|e| Failure::new(EXIT_HYPOTHESIS, e.to_string()))?;
    let modulus: Vec<String> = f.modulus().iter().map(|c| c.to_string()).collect();
    Ok(format!(
        "GF({q}) p={p} k={k} order={} modulus=[{}] generator_order={}\n",
        f.order(),
        modulus.join(","),
        f.element_order(f.generator())
    ))
}

fn isotropic(n: usize, q: u64, model: Model) -> Out {
    let space = match model {
        Model::Gram => HermitianSpace::standard(n, q)?,
        Model::Literal => HermitianSpace::trace(n, q, TraceForm::Literal)?,
        Model::Hermitian => HermitianSpace::trace(n, q, TraceForm::Hermitian)?,
    };
    let count = geometry::isotropic_points(&space)?.len();
    let formula = arith::isotropic_point_count(n as u32, q);
    let ok = count as u128 == formula;
    let text = format!("n={n} q={q} isotropic_points={count} closed_form={formula} {}\n", if ok { "MATCH" } else { "MISMATCH" });
    if ok || !matches!(model, Model::Gram) {
        Ok(text)
    } else {
        Err(Failure::new(EXIT_VERIFY, text.trim_end()))
    }
}

fn spread(n: usize, q: u64) -> Out {
    let cs = geometry::classical_spread(n, q)?;
    let report = geometry::spread_validate(&cs.spread, None);
    let x = cs.singer_matrix();
    let qn = (q as u128).pow(n as u32);
    let step = x.pow(qn - 1);
    let mut a = Vec::new();
    let mut cur = Matrix::identity(&cs.field_q, 2 * n);
    for _ in 0..=qn {
        a.push(cur.clone());
        cur = cur.mul(&step);
    }
    let sharp = cosets::sharply_transitive(&a, &cs.spread.members, cs.base_member(), |m, s| s.apply(m));
    let mut out = format!("{report}\n");
    writeln!(out, "expected_members={}", qn + 1).unwrap();
    writeln!(out, "A=<X^(q^n-1)> order={} SHARPLY-TRANSITIVE {}", a.len(), if sharp { "OK" } else { "FAIL" }).unwrap();
    if report.all_ok() && sharp && report.members as u128 == qn + 1 {
        Ok(out)
    } else {
        Err(Failure::new(EXIT_VERIFY, out.trim_end()))
    }
}

fn build(spec: &GroupSpec) -> Result<GroupHandle, Failure> {
    Ok(match spec.family {
        Family::Psu => unitary::psu(spec.n, spec.q)?,
        Family::Su => unitary::su_on_vectors(spec.n, spec.q, geometry::DEFAULT_ENUM_CAP)?,
        Family::Sl => matgrp::special_linear(spec.n, spec.q, geometry::DEFAULT_ENUM_CAP)?,
    })
}

fn group_build(spec: &GroupSpec) -> Out {
    let g = build(spec)?;
    let chain = g.group.chain();
    let lens: Vec<String> = chain.orbit_lengths().iter().map(|l| l.to_string()).collect();
    Ok(format!(
        "{}\ngenerators={} base_length={} orbit_lengths=[{}]\n",
        g.descriptor(),
        g.group.gens().len(),
        chain.base().len(),
        lens.join(",")
    ))
}

fn group_order(spec: &GroupSpec, cap: u128) -> Out {
    let g = build(spec)?;
    let chain = g.order();
    let formula = match spec.family {
        Family::Psu => arith::psu_order(spec.n as u32, spec.q),
        Family::Su => arith::su_order(spec.n as u32, spec.q),
        Family::Sl => sl_order(spec.n as u32, spec.q),
    };
    let enumerated = if chain <= cap { Some(g.group.table(cap)?.len() as u128) } else { None };
    let ok = chain == formula && enumerated.map_or(true, |e| e == chain);
    let text = format!(
        "stabchain={chain} enumerated={} formula={formula}\n",
        enumerated.map(|e| e.to_string()).unwrap_or_else(|| "skipped".into())
    );
    if ok {
        Ok(text)
    } else {
        Err(Failure::new(EXIT_VERIFY, text.trim_end()))
    }
}

fn sl_order(n: u32, q: u64) -> u128 {
    let q = q as u128;
    let mut o = q.pow(n * (n - 1) / 2);
    for i in 2..=n {
        o *= q.pow(i) - 1;
    }
    o
}

fn group_orbits(spec: &GroupSpec, part: Part) -> Out {
    let h = if matches!(part, Part::Full) {
        build(spec)?
    } else {
        if !matches!(spec.family, Family::Psu) || spec.n != 3 {
            return Err(Failure::new(EXIT_USAGE, "--part needs --family psu --n 3"));
        }
        let parts = Psu3Parts::new(spec.q)?;
        match part {
            Part::Singer => parts.singer()?,
            Part::Torus => parts.torus()?,
            Part::Stabilizer => parts.point_stabilizer()?,
            Part::Unipotent => parts.q_group()?,
            Part::Full => unreachable!(),
        }
    };
    let orbits = h.group.orbits();
    let mut sizes: Vec<usize> = orbits.iter().map(|o| o.len()).collect();
    sizes.sort_unstable();
    let mut runs: Vec<(usize, usize)> = Vec::new();
    for s in sizes {
        match runs.last_mut() {
            Some((v, c)) if *v == s => *c += 1,
            _ => runs.push((s, 1)),
        }
    }
    let shape: Vec<String> = runs.iter().map(|&(s, c)| if c == 1 { s.to_string() } else { format!("{s}^{c}") }).collect();
    Ok(format!("order={} domain={} orbits={} sizes={}\n", h.order(), h.degree(), orbits.len(), shape.join(",")))
}

fn load(file: &Path) -> Result<logsig::LogSignature, Failure> {
    let text = fs::read_to_string(file).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", file.display())))?;
    Ok(logsig::ls_load(&text)?)
}

fn ls_verify(file: &Path, cap: u128) -> Out {
    let ls = load(file)?;
    match logsig::ls_verify_capped(&ls, cap)? {
        Verification::Valid => {
            let m = logsig::ls_minimality(&ls);
            Ok(format!("VALID length={} minimal={}\n", ls.length(), if m.minimal { "yes" } else { "no" }))
        }
        Verification::Collision { first, second } => {
            Err(Failure::new(EXIT_VERIFY, format!("INVALID collision {first:?} {second:?}")))
        }
    }
}

fn ls_info(file: &Path) -> Out {
    let ls = load(file)?;
    let ty: Vec<String> = ls.type_vector().iter().map(|r| r.to_string()).collect();
    Ok(format!(
        "{}\nblocks={} type={} length={} nontrivial={}\n",
        ls.group().descriptor(),
        ty.len(),
        ty.join(","),
        ls.length(),
        if ls.is_nontrivial() { "yes" } else { "no" }
    ))
}

fn construct_cmd(args: &ConstructArgs, cap: u128) -> Out {
    let c: Construction = match args.recipe {
        Recipe::Psu3 => {
            let name = args.variant.as_deref().ok_or_else(|| Failure::new(EXIT_USAGE, "--variant is required for psu3"))?;
            let variant: Psu3Variant = name.parse().map_err(|e: String| Failure::new(EXIT_USAGE, e))?;
            mls_psu3(args.q, variant, cap)?
        }
        Recipe::Solvable => {
            let parts = Psu3Parts::new(args.q)?;
            let g = match args.part {
                Part::Stabilizer => parts.point_stabilizer()?,
                Part::Unipotent => parts.q_group()?,
                Part::Torus => parts.torus()?,
                Part::Singer => parts.singer()?,
                Part::Full => parts.g.clone(),
            };
            let ls = construct::mls_solvable(&g, cap)?;
            let mut cert = construct::Certificate::new("solvable");
            cert.order("G", g.order());
            cert.check("ls_verify exhaustive", true);
            cert.mode = construct::VerificationMode::Full;
            cert.length = Some(ls.length());
            cert.minimal = Some(logsig::ls_minimality(&ls).minimal);
            Construction { ls: Some(ls), certificate: cert }
        }
    };
    let cert = format!("{}\n", c.certificate);
    if let Some(out) = &args.out {
        let mut sidecar = out.clone().into_os_string();
        sidecar.push(".cert");
        let io = |e: std::io::Error| Failure::new(EXIT_USAGE, format!("{}: {e}", out.display()));
        if let Some(ls) = &c.ls {
            fs::write(out, ls.serialize()).map_err(io)?;
        }
        fs::write(PathBuf::from(sidecar), &cert).map_err(io)?;
    }
    if c.certificate.all_passed() {
        Ok(cert)
    } else {
        Err(Failure::new(EXIT_VERIFY, cert.trim_end()))
    }
}

fn refute_cmd(claim: &str, n: usize, q: u64, cap: u128) -> Out {
    let reports: Vec<AuditReport> = match claim.to_ascii_uppercase().as_str() {
        "ALL" => refute::audit_all(n, q)?,
        "R1" => vec![refute::audit_trace_of_one(n, q)?],
        "R2" => vec![refute::audit_subfield_ti(n, q)?],
        "R3" => vec![refute::audit_isotropic_count(n, q)?],
        "R4" => vec![refute::audit_torus_orders(n, q)?],
        "R5" => vec![refute::audit_product_cardinality(n, q)?],
        "R6" => vec![refute::audit_psu4_decomposition(q, cap)?],
        other => return Err(Failure::new(EXIT_USAGE, format!("unknown claim `{other}`"))),
    };
    Ok(reports.iter().map(|r| format!("{r}\n")).collect())
}
