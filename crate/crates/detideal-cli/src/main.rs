//! Command-line front end. Every command reads JSON (stdin or `--input`) and
//! writes JSON (stdout or `--output`).
//!
//! Exit codes: 0 success, 1 acceptance failure, 2 invalid input,
//! 3 contract violation, 4 budget or exponent overflow.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use detideal::abp::{det_abp, LayeredAbp};
use detideal::acceptance::{report_json, run_all};
use detideal::degeneration::{reduce_to_single_bideterminant, DEFAULT_BUDGET};
use detideal::hasse::deriv_space_dim;
use detideal::ips::{
    build_rank_instance_with, corank_one_certificate, det_inversion_refutation, det_inversion_system,
    extract_ideal_element, verified, verify_certificate, AxiomSystem, IpsCertificate,
};
use detideal::oracle::{compose_projection, proj_to_det, proj_to_imm};
use detideal::pfaffian::{
    block_skew, pfaff_compose, pfaff_reduce, pfaff_straighten, pfaffian, pfaffian_abp, skew_size, subpfaff_embed,
};
use detideal::pit::{
    apply_generator, expand_generator, fs_condenser, recursive_generator, sz_test, vanishing_equivalence,
    MatrixGenerator, Sides,
};
use detideal::poly::{generic_matrix, poly_from_json, poly_to_json, rat_from_json, PolyMatrix};
use detideal::random::{random_abp, rng};
use detideal::scalar::{parse_rat, Rat};
use detideal::straighten::{is_in_det_ideal, straighten, x_dims};
use detideal::{Error, Poly};
use num_traits::Zero;
use serde_json::{json, Value};

const DEFAULT_SEED: u64 = 2024;

#[derive(Parser)]
#[command(name = "detideal", version, about = "Exact workbench for determinantal and Pfaffian ideals")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, env = "DETIDEAL_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Term-count budget for symbolic expansions.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Read the JSON input from this file instead of stdin.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Write the JSON output to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct RankArg {
    #[arg(long)]
    r: u32,
}

#[derive(Subcommand)]
enum Command {
    /// Poly → standard bideterminant expansion.
    Straighten,
    /// Poly → {"member", "min_width"} for the ideal of r×r minors.
    IdealMember(RankArg),
    /// Poly in I_r → verified single-bideterminant reduction.
    Reduce(RankArg),
    /// Poly in I_r → oracle circuit for a determinant, IMM or ABP target.
    ComposeOracle(ComposeArgs),
    #[command(subcommand)]
    Pfaffian(PfaffCmd),
    /// Poly → {"dim", "order"} of its Hasse-derivative space.
    DerivativeDim {
        #[arg(long)]
        order: Option<u32>,
    },
    #[command(subcommand)]
    Pit(PitCmd),
    #[command(subcommand)]
    Ips(IpsCmd),
    #[command(subcommand)]
    Abp(AbpCmd),
    /// Runs the acceptance suite and prints the report.
    Accept,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Det,
    Imm,
    Abp,
}

#[derive(Args)]
struct ComposeArgs {
    #[arg(long)]
    r: u32,
    #[arg(long, value_enum)]
    target: Target,
    /// Size of the determinant target.
    #[arg(long)]
    n: Option<usize>,
    /// IMM width.
    #[arg(long)]
    w: Option<usize>,
    /// IMM length.
    #[arg(long)]
    d: Option<usize>,
}

#[derive(Subcommand)]
enum PfaffCmd {
    /// Skew matrix → its Pfaffian.
    Eval,
    /// Poly → standard monomial expansion.
    Straighten,
    /// Poly in the 2r-Pfaffian ideal → verified reduction.
    Reduce {
        #[arg(long)]
        r: u32,
        /// Skew matrix size; inferred from the input when omitted.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Square matrix (or generic n×n) → interleaved and block skew embeddings.
    Embed {
        #[arg(long)]
        n: Option<usize>,
    },
    /// Poly in the 2r-Pfaffian ideal → circuit for the Pfaffian program of the given order.
    Compose {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Subcommand)]
enum PitCmd {
    /// The matrix generator G_{n,m,r}.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        r: usize,
    },
    /// Poly → its image under G_{n,m,r−1} and the vanishing/membership comparison.
    Apply(RankArg),
    /// Recursive generator with a comma-separated r-schedule.
    Recursive {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, value_delimiter = ',')]
        schedule: Vec<usize>,
    },
    /// Folded-Wronskian rank condenser.
    Condenser {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value = "2")]
        omega: String,
        /// Comma-separated evaluation points; defaults to 1..=2r(n−r)+1.
        #[arg(long, value_delimiter = ',')]
        points: Vec<String>,
    },
    /// Poly → seeded randomized identity test.
    Sz {
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 1000)]
        range: i64,
    },
}

#[derive(Subcommand)]
enum IpsCmd {
    /// The rank instance: hard condensed-minor axioms plus XY − I.
    BuildInstance {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        boolean: bool,
        #[arg(long)]
        two_sided: bool,
    },
    /// {"system", "certificate"} → {"verified"}.
    Verify,
    /// A system with a verified refutation: det inversion for r = n, the corank-one two-sided instance for r = n − 1.
    Refute {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: Option<usize>,
    },
    /// {"system", "certificate"} → extracted ideal element.
    Extract,
}

#[derive(Subcommand)]
enum AbpCmd {
    /// ABP → the polynomial it computes.
    Eval,
    /// ABP → its Valiant matrix and determinant.
    Valiant,
    /// Seeded random layered ABP.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: u32,
    },
    /// The clow program for det_n.
    Det {
        #[arg(long)]
        n: usize,
    },
}

/// CLI failures: library errors keep their own code, parsing problems are input errors.
enum Failure {
    Lib(Error),
    Input(String),
    Acceptance,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn read_input(path: &Option<PathBuf>) -> CliResult<Value> {
    let text = match path {
        Some(p) => fs::read_to_string(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?,
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(|e| Failure::Input(e.to_string()))?;
            s
        }
    };
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("bad JSON: {e}")))
}

fn field<'a>(v: &'a Value, key: &str) -> CliResult<&'a Value> {
    v.get(key).ok_or_else(|| Failure::Input(format!("input needs \"{key}\"")))
}

/// A matrix entry: a rational (string or number) or a Poly object.
fn entry(v: &Value) -> CliResult<Poly> {
    if v.is_object() {
        Ok(poly_from_json(v)?)
    } else {
        Ok(Poly::from_rat(rat_from_json(v)?))
    }
}

/// `{"size": n, "entries": [[i, j, value], ...]}` with `i < j`; missing entries are zero.
fn skew_from_json(v: &Value) -> CliResult<PolyMatrix> {
    let size = field(v, "size")?.as_u64().ok_or_else(|| Failure::Input("size must be an integer".into()))? as usize;
    let mut m = vec![vec![Poly::zero(); size]; size];
    for e in field(v, "entries")?.as_array().ok_or_else(|| Failure::Input("entries must be an array".into()))? {
        let bad = || Failure::Input(format!("bad skew entry {e}"));
        let a = e.as_array().filter(|a| a.len() == 3).ok_or_else(bad)?;
        let (i, j) = (a[0].as_u64().ok_or_else(bad)? as usize, a[1].as_u64().ok_or_else(bad)? as usize);
        if !(1 <= i && i < j && j <= size) {
            return Err(Failure::Input(format!("skew entries need 1 ≤ i < j ≤ size, got ({i}, {j})")));
        }
        let p = entry(&a[2])?;
        m[j - 1][i - 1] = -p.clone();
        m[i - 1][j - 1] = p;
    }
    Ok(m)
}

fn matrix_from_json(v: &Value) -> CliResult<PolyMatrix> {
    let rows = field(v, "rows")?.as_array().ok_or_else(|| Failure::Input("rows must be an array".into()))?;
    rows.iter()
        .map(|r| {
            r.as_array().ok_or_else(|| Failure::Input("each row must be an array".into()))?.iter().map(entry).collect()
        })
        .collect()
}

fn matrix_to_json(m: &PolyMatrix) -> Value {
    m.iter().map(|r| r.iter().map(poly_to_json).collect::<Vec<_>>()).collect::<Vec<_>>().into()
}

fn upper_entries(m: &PolyMatrix) -> Value {
    let mut out = Vec::new();
    for (i, row) in m.iter().enumerate() {
        for (j, p) in row.iter().enumerate().skip(i + 1) {
            if !p.is_zero() {
                out.push(json!([i + 1, j + 1, poly_to_json(p)]));
            }
        }
    }
    json!({"size": m.len(), "entries": out})
}

fn poly_input(cli: &Cli) -> CliResult<Poly> {
    let v = read_input(&cli.input)?;
    Ok(poly_from_json(v.get("f").unwrap_or(&v))?)
}

fn system_and_cert(cli: &Cli) -> CliResult<(AxiomSystem, IpsCertificate)> {
    let v = read_input(&cli.input)?;
    Ok((AxiomSystem::from_json(field(&v, "system")?)?, IpsCertificate::from_json(field(&v, "certificate")?)?))
}

fn run(cli: &Cli) -> CliResult<Value> {
    let budget = cli.budget;
    Ok(match &cli.command {
        Command::Straighten => straighten(&poly_input(cli)?)?.to_json(),
        Command::IdealMember(RankArg { r }) => {
            let f = poly_input(cli)?;
            let min_width = if f.is_zero() { None } else { Some(straighten(&f)?.min_width()?) };
            json!({"member": is_in_det_ideal(&f, *r)?, "min_width": min_width})
        }
        Command::Reduce(RankArg { r }) => {
            let (res, slice) = reduce_to_single_bideterminant(&poly_input(cli)?, *r, budget)?;
            res.to_json(&slice)
        }
        Command::ComposeOracle(a) => {
            let v = read_input(&cli.input)?;
            let f = poly_from_json(v.get("f").unwrap_or(&v))?;
            let need = |o: Option<usize>, name: &str| o.ok_or_else(|| Failure::Input(format!("--{name} is required")));
            let c = match a.target {
                Target::Det => proj_to_det(&f, a.r, need(a.n, "n")?, budget)?,
                Target::Imm => proj_to_imm(&f, a.r, need(a.w, "w")?, need(a.d, "d")?, budget)?,
                Target::Abp => compose_projection(&f, a.r, &LayeredAbp::from_json(field(&v, "abp")?)?, budget)?,
            };
            json!({"circuit": c.to_json(), "gates": c.gate_count()})
        }
        Command::Pfaffian(cmd) => pfaffian_cmd(cli, cmd)?,
        Command::DerivativeDim { order } => {
            json!({"dim": deriv_space_dim(&poly_input(cli)?, *order)?, "order": order})
        }
        Command::Pit(cmd) => pit_cmd(cli, cmd)?,
        Command::Ips(cmd) => ips_cmd(cli, cmd)?,
        Command::Abp(cmd) => abp_cmd(cli, cmd)?,
        Command::Accept => {
            let outcomes = run_all(cli.seed);
            for o in &outcomes {
                eprintln!("{}", o.line());
            }
            let report = report_json(cli.seed, &outcomes);
            if report["all_pass"] != true {
                emit(cli, &report)?;
                return Err(Failure::Acceptance);
            }
            report
        }
    })
}

fn pfaffian_cmd(cli: &Cli, cmd: &PfaffCmd) -> CliResult<Value> {
    let budget = cli.budget;
    let size_of = |f: &Poly, n: Option<usize>| -> CliResult<usize> {
        match n {
            Some(n) => Ok(n),
            None => Ok(skew_size(f)?),
        }
    };
    Ok(match cmd {
        PfaffCmd::Eval => json!({"pfaffian": poly_to_json(&pfaffian(&skew_from_json(&read_input(&cli.input)?)?)?)}),
        PfaffCmd::Straighten => {
            let e = pfaff_straighten(&poly_input(cli)?)?;
            json!({"expansion": e.to_json(), "min_width": e.min_width()?})
        }
        PfaffCmd::Reduce { r, n } => {
            let f = poly_input(cli)?;
            let (red, slice) = pfaff_reduce(&f, size_of(&f, *n)?, *r, budget)?;
            red.to_json(&slice)
        }
        PfaffCmd::Embed { n } => {
            let a = match n {
                Some(n) => generic_matrix(*n, *n),
                None => matrix_from_json(&read_input(&cli.input)?)?,
            };
            if a.iter().any(|row| row.len() != a.len()) {
                return Err(Failure::Input("embedding needs a square matrix".into()));
            }
            json!({"interleaved": upper_entries(&subpfaff_embed(&a)), "block": upper_entries(&block_skew(&a))})
        }
        PfaffCmd::Compose { r, order, n } => {
            let f = poly_input(cli)?;
            let c = pfaff_compose(&f, size_of(&f, *n)?, *r, &pfaffian_abp(*order)?, budget)?;
            json!({"circuit": c.to_json(), "gates": c.gate_count()})
        }
    })
}

fn pit_cmd(cli: &Cli, cmd: &PitCmd) -> CliResult<Value> {
    Ok(match cmd {
        PitCmd::Gen { n, m, r } => {
            let g = MatrixGenerator::new(*n, m.unwrap_or(*n), *r)?;
            json!({
                "n": g.n, "m": g.m, "r": g.r,
                "seed_length": g.seed_length(),
                "seed": g.seed_vars().iter().map(ToString::to_string).collect::<Vec<_>>(),
                "coordinates": matrix_to_json(&expand_generator(&g)),
            })
        }
        PitCmd::Apply(RankArg { r }) => {
            let f = poly_input(cli)?;
            if *r == 0 {
                return Err(Failure::Input("--r must be positive".into()));
            }
            let (n, m) = x_dims(&f)?;
            let g = MatrixGenerator::new(n, m, (*r as usize - 1).min(n.min(m)))?;
            json!({"image": poly_to_json(&apply_generator(&f, &g)?), "report": vanishing_equivalence(&f, *r)?.to_json()})
        }
        PitCmd::Recursive { n, k, schedule } => recursive_generator(*n, *k, schedule)?.to_json(),
        PitCmd::Condenser { n, r, omega, points } => {
            let omega = parse_rat(omega)?;
            let pts: Vec<Rat> = points.iter().map(|p| parse_rat(p)).collect::<Result<_, _>>()?;
            let pts = if pts.is_empty() { None } else { Some(pts.as_slice()) };
            fs_condenser(*n, *r, &omega, pts)?.to_json()
        }
        PitCmd::Sz { trials, range } => {
            let f = poly_input(cli)?;
            json!({"nonzero": sz_test(&f, *trials, cli.seed, -range, *range)?, "trials": trials, "seed": cli.seed})
        }
    })
}

fn ips_cmd(cli: &Cli, cmd: &IpsCmd) -> CliResult<Value> {
    Ok(match cmd {
        IpsCmd::BuildInstance { n, r, boolean, two_sided } => {
            let c = fs_condenser(*n, *r, &Rat::from_integer(2.into()), None)?;
            let sides = if *two_sided { Sides::TwoSided } else { Sides::OneSided };
            build_rank_instance_with(*n, *r, &c, *boolean, sides)?.to_json()
        }
        IpsCmd::Verify => {
            let (sys, cert) = system_and_cert(cli)?;
            json!({"verified": verify_certificate(&cert, &sys)?})
        }
        IpsCmd::Refute { n, r } => {
            let r = r.unwrap_or(*n);
            let (sys, cert) = if r == *n {
                (det_inversion_system(*n, false)?, det_inversion_refutation(*n))
            } else if r + 1 == *n {
                let c = fs_condenser(*n, r, &Rat::from_integer(2.into()), None)?;
                (
                    build_rank_instance_with(*n, r, &c, false, Sides::TwoSided)?,
                    corank_one_certificate(&c, Sides::TwoSided)?,
                )
            } else {
                return Err(Failure::Input("refutations are built for r = n and r = n − 1 only".into()));
            };
            let cert = verified(cert, &sys)?;
            json!({"system": sys.to_json(), "certificate": cert.to_json()})
        }
        IpsCmd::Extract => {
            let (sys, cert) = system_and_cert(cli)?;
            extract_ideal_element(&cert, &sys)?.to_json()
        }
    })
}

fn abp_cmd(cli: &Cli, cmd: &AbpCmd) -> CliResult<Value> {
    let load = || -> CliResult<LayeredAbp> { Ok(LayeredAbp::from_json(&read_input(&cli.input)?)?) };
    Ok(match cmd {
        AbpCmd::Eval => {
            let g = load()?;
            json!({"value": poly_to_json(&g.eval()), "vertices": g.vertex_count(), "path_length": g.path_length()})
        }
        AbpCmd::Valiant => {
            let g = load()?;
            let a = g.valiant_matrix();
            json!({"matrix": matrix_to_json(&a), "det": poly_to_json(&detideal::poly::det_poly(&a))})
        }
        AbpCmd::Random { n, k } => {
            if *n < 2 {
                return Err(Failure::Input("an ABP needs at least 2 vertices".into()));
            }
            random_abp(&mut rng(cli.seed), *n, *k).to_json()
        }
        AbpCmd::Det { n } => det_abp(*n).to_json(),
    })
}

fn emit(cli: &Cli, v: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    text.push('\n');
    match &cli.output {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Input(e.to_string())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|v| emit(&cli, &v));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Acceptance) => {
            eprintln!("error: acceptance suite failed");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
