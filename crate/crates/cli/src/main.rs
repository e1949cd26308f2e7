//! Command-line front end for the corner-homology workbench.

mod render;

use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;

use corner_homology::acceptance::{run_all, run_criterion, CriterionResult};
use corner_homology::complexes::{FilteredComplex, FilteredComplexJson};
use corner_homology::corners::{
    cohomology, laurent_space, relative_cohomology, BaseJson, CwComplex, CwJson, FacePoset, FamilyJson,
};
use corner_homology::hochschild::{
    associated_graded, compare_e1_with_gr, hc, hh, hochschild_filtration, sbi_check, FilteredSuperAlgebra,
    SuperAlgebra,
};
use corner_homology::poisson::{
    alpha_op, d_full, d_hor, d_vert, delta, delta_vert, homogeneous_derham, poisson_homology, verify_theorem_delta,
    Bivector, Form, HomologyOp, Patch, PatchJson, Star, TermJson,
};
use corner_homology::spectral::{check_convergence, pages};
use corner_homology::symbols::{
    residue_supertrace, trace_space_probe, BaseFunctional, FormalSymbol, ProbeModel,
};
use corner_homology::Error;

use render::Markdown;

const MAX_N_CAP: usize = 6;
const WINDOW_CAP: i32 = 6;

#[derive(Parser)]
#[command(name = "corner-homology", version, about = "Exact homological algebra on small models")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Lift the safety caps on truncation parameters.
    #[arg(long, global = true)]
    force: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Markdown,
}

#[derive(Args)]
struct AlgebraInput {
    /// Algebra file (`-` for stdin).
    #[arg(long, conflicts_with = "builtin")]
    algebra: Option<PathBuf>,
    #[arg(long, value_enum)]
    builtin: Option<Builtin>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Builtin {
    Q,
    DualNumbers,
    Clifford,
    M2,
    M3,
    M11,
    SquareZero,
}

#[derive(Subcommand)]
enum Command {
    /// Hochschild homology.
    Hh {
        #[command(flatten)]
        input: AlgebraInput,
        #[arg(long, default_value_t = 4)]
        max_n: usize,
    },
    /// Cyclic homology.
    Hc {
        #[command(flatten)]
        input: AlgebraInput,
        #[arg(long, default_value_t = 4)]
        max_n: usize,
    },
    /// Exactness of the SBI sequence.
    SbiCheck {
        #[command(flatten)]
        input: AlgebraInput,
        #[arg(long, default_value_t = 4)]
        max_n: usize,
    },
    /// Associated graded of a filtered algebra.
    Gr {
        #[arg(long)]
        filtered: PathBuf,
    },
    /// Spectral sequence of the Hochschild filtration, with E^1 against HH(Gr).
    FiltrationSs {
        #[arg(long)]
        filtered: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_n: usize,
        #[arg(long, default_value_t = 2)]
        max_r: usize,
    },
    /// Pages of a filtered complex.
    Spectral {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_r: usize,
    },
    /// Cellular chains of the Laurent space of a face poset.
    LaurentSpace {
        #[arg(long)]
        poset: PathBuf,
        /// CW realization of the poset, with `faces` on every cell.
        #[arg(long)]
        realization: Option<PathBuf>,
    },
    /// Cellular cohomology of a CW complex (stdin by default).
    Cohomology {
        #[arg(long, default_value = "-")]
        cw: PathBuf,
        /// Subcomplex `{degree: [cell indices]}` for relative cohomology.
        #[arg(long)]
        relative: Option<PathBuf>,
    },
    /// Minimal faces of a face poset.
    MinimalFaces {
        #[arg(long)]
        poset: PathBuf,
    },
    /// Cohomology of the base with coefficients in the fibrewise Laurent cohomology.
    Family {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        fiber: PathBuf,
        #[arg(long)]
        monodromy: Option<PathBuf>,
        #[arg(long)]
        realization: Option<PathBuf>,
    },
    /// Poisson homology of `--op` on the complex `P^k` at homogeneity `l`, or
    /// one operator applied to a form.
    Poisson {
        #[arg(long)]
        patch: PathBuf,
        #[arg(long, value_enum, default_value_t = PoissonOp::Delta)]
        op: PoissonOp,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        k: i64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        l: i32,
        #[arg(long, default_value_t = 3)]
        window: i32,
        /// Apply `--op` to the form in this file instead.
        #[arg(long)]
        apply: Option<PathBuf>,
    },
    /// Homogeneous de Rham cohomology tables.
    Derham {
        #[arg(long)]
        patch: PathBuf,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        l: i32,
        #[arg(long, default_value_t = 3)]
        window: i32,
    },
    /// delta-homology against the star-transported de Rham cohomology.
    TheoremDelta {
        #[arg(long)]
        patch: PathBuf,
        /// Form degree.
        #[arg(long, allow_hyphen_values = true)]
        degree: i64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        l: i32,
        #[arg(long, default_value_t = 3)]
        window: i32,
    },
    /// Formal symbols and residue traces.
    Symbols {
        #[command(subcommand)]
        command: SymbolCommand,
    },
    /// Runs the acceptance suite.
    Accept {
        /// `all` or a criterion number.
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PoissonOp {
    Delta,
    DeltaVert,
    Alpha,
    D,
    DVert,
    DHor,
    Star,
}

#[derive(Subcommand)]
enum SymbolCommand {
    /// Composition `a o b`.
    Compose {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        k_max: Option<usize>,
    },
    /// Residue supertrace against a base functional.
    Trace {
        #[arg(long)]
        symbol: PathBuf,
        /// Base functional; evaluation at the origin when omitted.
        #[arg(long)]
        mu: Option<PathBuf>,
    },
    /// Dimension of the trace space on growing truncations.
    TraceSpace {
        #[arg(long, default_value_t = 3)]
        max_len: i32,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long, default_value_t = 0)]
        s: usize,
        /// 1 for the one-sided model, 2 for both ends.
        #[arg(long, default_value_t = 1)]
        sheets: usize,
    },
}

#[derive(Debug)]
enum Failure {
    Domain(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

/// Rendered output and exit code.
type Outcome = Result<(String, u8), Failure>;

fn read_input(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::Io(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
    }
}

fn load<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = read_input(path)?;
    serde_json::from_str(&text).map_err(|e| Failure::Domain(Error::Parse(format!("{}: {e}", path.display()))))
}

fn emit<T: Serialize + Markdown>(format: Format, value: &T) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(value).expect("reports serialize") + "\n",
        Format::Markdown => value.markdown(),
    }
}

fn cap_n(max_n: usize, force: bool) -> Result<(), Failure> {
    if max_n > MAX_N_CAP && !force {
        return Err(Error::OutOfRange(format!("max_n = {max_n} exceeds {MAX_N_CAP}; pass --force")).into());
    }
    Ok(())
}

fn cap_window(window: i32, force: bool) -> Result<(), Failure> {
    if window > WINDOW_CAP && !force {
        return Err(Error::OutOfRange(format!("window = {window} exceeds {WINDOW_CAP}; pass --force")).into());
    }
    Ok(())
}

fn algebra(input: &AlgebraInput) -> Result<SuperAlgebra, Failure> {
    match (&input.algebra, input.builtin) {
        (Some(p), _) => load(p),
        (None, Some(b)) => Ok(match b {
            Builtin::Q => SuperAlgebra::ground_field(),
            Builtin::DualNumbers => SuperAlgebra::dual_numbers(),
            Builtin::Clifford => SuperAlgebra::clifford(),
            Builtin::M2 => SuperAlgebra::matrix_algebra(2),
            Builtin::M3 => SuperAlgebra::matrix_algebra(3),
            Builtin::M11 => SuperAlgebra::super_matrix(1, 1),
            Builtin::SquareZero => SuperAlgebra::square_zero(),
        }),
        (None, None) => Err(Error::Parse("need --algebra or --builtin".into()).into()),
    }
}

fn patch(path: &Path) -> Result<Patch, Failure> {
    Ok(Patch::try_from(load::<PatchJson>(path)?)?)
}

fn run(cli: &Cli) -> Outcome {
    let f = cli.format;
    let ok = |s: String| Ok((s, 0));
    match &cli.command {
        Command::Hh { input, max_n } => {
            cap_n(*max_n, cli.force)?;
            ok(emit(f, &render::Hh(hh(&algebra(input)?, *max_n)?)))
        }
        Command::Hc { input, max_n } => {
            cap_n(*max_n, cli.force)?;
            ok(emit(f, &hc(&algebra(input)?, *max_n)?))
        }
        Command::SbiCheck { input, max_n } => {
            cap_n(*max_n, cli.force)?;
            let r = sbi_check(&algebra(input)?, *max_n)?;
            let code = if r.exact { 0 } else { 2 };
            Ok((emit(f, &r), code))
        }
        Command::Gr { filtered } => {
            let a: FilteredSuperAlgebra = load(filtered)?;
            ok(emit(f, &associated_graded(&a)?))
        }
        Command::FiltrationSs { filtered, max_n, max_r } => {
            cap_n(*max_n, cli.force)?;
            let a: FilteredSuperAlgebra = load(filtered)?;
            let fc = hochschild_filtration(&a, *max_n)?;
            let pages = pages(&fc, *max_r)?.iter().map(|p| p.report()).collect();
            let e1 = compare_e1_with_gr(&a, *max_n)?;
            ok(emit(f, &render::FiltrationSs { pages, e1_vs_gr: e1 }))
        }
        Command::Spectral { complex, max_r } => {
            let fc = FilteredComplex::try_from(load::<FilteredComplexJson>(complex)?)?;
            let pages = pages(&fc, *max_r)?.iter().map(|p| p.report()).collect();
            let convergence = check_convergence(&fc)?;
            ok(emit(f, &render::Spectral { pages, convergence }))
        }
        Command::LaurentSpace { poset, realization } => {
            let p: FacePoset = load(poset)?;
            let cw = realization.as_ref().map(|r| load::<CwJson>(r)?.into_cw(Some(&p)).map_err(Failure::from)).transpose()?;
            let l = laurent_space(&p, cw.as_ref())?;
            ok(emit(f, &render::Cw(CwJson::from(&l.cw))))
        }
        Command::Cohomology { cw, relative } => {
            let c: CwComplex = load::<CwJson>(cw)?.into_cw(None)?;
            let dims = match relative {
                None => cohomology(&c),
                Some(r) => relative_cohomology(&c, &load::<BTreeMap<i64, Vec<usize>>>(r)?)?,
            };
            ok(emit(f, &render::Dims { dims }))
        }
        Command::MinimalFaces { poset } => {
            let p: FacePoset = load(poset)?;
            let faces = p.minimal_faces();
            ok(emit(f, &render::MinimalFaces { count: faces.len(), faces: faces.iter().map(|x| x.id).collect() }))
        }
        Command::Family { base, fiber, monodromy, realization } => {
            let job = FamilyJson {
                base: load::<BaseJson>(base)?,
                fiber: load(fiber)?,
                realization: realization.as_ref().map(|r| load(r)).transpose()?,
                monodromy: monodromy.as_ref().map(|m| load(m)).transpose()?.unwrap_or_default(),
            };
            ok(emit(f, &job.run()?))
        }
        Command::Poisson { patch: pp, op, k, l, window, apply } => {
            cap_window(*window, cli.force)?;
            let patch = patch(pp)?;
            let g = Bivector::canonical(&patch);
            if let Some(path) = apply {
                let form = Form::from_json(&patch, &load::<Vec<TermJson>>(path)?)?;
                let out = match op {
                    PoissonOp::Delta => delta(&patch, &g, &form),
                    PoissonOp::DeltaVert => delta_vert(&patch, &g, &form),
                    PoissonOp::Alpha => alpha_op(&patch, &g, &form),
                    PoissonOp::D => d_full(&patch, &form),
                    PoissonOp::DVert => d_vert(&patch, &form),
                    PoissonOp::DHor => d_hor(&patch, &form),
                    PoissonOp::Star => Star::new(&patch).apply(&form),
                };
                return ok(emit(f, &render::Terms(out.to_json(&patch))));
            }
            let hop = match op {
                PoissonOp::Delta => HomologyOp::Delta,
                PoissonOp::DeltaVert => HomologyOp::DeltaVert,
                _ => {
                    return Err(Error::OutOfRange("homology is computed for --op delta or delta-vert; use --apply for the others".into()).into())
                }
            };
            let h = poisson_homology(&patch, &g, hop, *k, *l, *window)?;
            ok(emit(f, &h))
        }
        Command::Derham { patch: pp, l, window } => {
            cap_window(*window, cli.force)?;
            ok(emit(f, &homogeneous_derham(&patch(pp)?, *l, *window)?))
        }
        Command::TheoremDelta { patch: pp, degree, l, window } => {
            cap_window(*window, cli.force)?;
            let r = verify_theorem_delta(&patch(pp)?, *degree, *l, *window)?;
            let code = if r.agree && r.intertwining && r.star_involution { 0 } else { 2 };
            Ok((emit(f, &r), code))
        }
        Command::Symbols { command } => match command {
            SymbolCommand::Compose { a, b, k_max } => {
                let a: FormalSymbol = load(a)?;
                let b: FormalSymbol = load(b)?;
                let c = a.compose(&b, *k_max)?;
                ok(emit(f, &render::Composed { discarded: c.discarded, symbol: c.symbol }))
            }
            SymbolCommand::Trace { symbol, mu } => {
                let a: FormalSymbol = load(symbol)?;
                let mu = match mu {
                    Some(p) => load(p)?,
                    None => BaseFunctional::delta(a.base_dim()),
                };
                ok(emit(f, &render::TraceValue { value: residue_supertrace(&a, &mu)? }))
            }
            SymbolCommand::TraceSpace { max_len, r, s, sheets } => {
                if *max_len > WINDOW_CAP && !cli.force {
                    return Err(Error::OutOfRange(format!("max_len = {max_len} exceeds {WINDOW_CAP}; pass --force")).into());
                }
                ok(emit(f, &trace_space_probe(ProbeModel { size: (*r, *s), sheets: *sheets }, *max_len)?))
            }
        },
        Command::Accept { suite } => {
            let results: Vec<CriterionResult> = if suite == "all" {
                run_all()
            } else {
                let id: u8 = suite
                    .parse()
                    .map_err(|_| Error::Parse(format!("suite {suite:?}; expected `all` or 1..=10")))?;
                if !(1..=10).contains(&id) {
                    return Err(Error::OutOfRange(format!("criterion {id}; expected 1..=10")).into());
                }
                vec![run_criterion(id)]
            };
            let passed = results.iter().all(|r| r.passed);
            Ok((emit(f, &render::Acceptance { all_passed: passed, criteria: results }), u8::from(!passed)))
        }
    }
}

fn configure_threads() {
    #[cfg(feature = "parallel")]
    if let Some(n) = std::env::var("CORNER_HOMOLOGY_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match run(&cli) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(failure) => {
            let (kind, message, code) = match &failure {
                Failure::Domain(e) if e.is_invariant_violation() => (e.kind(), e.to_string(), 2),
                Failure::Domain(e) => (e.kind(), e.to_string(), 1),
                Failure::Io(m) => ("io", m.clone(), 1),
            };
            let body = serde_json::json!({ "error": { "kind": kind, "message": message } });
            eprintln!("{}", serde_json::to_string_pretty(&body).expect("error JSON"));
            ExitCode::from(code)
        }
    }
}
