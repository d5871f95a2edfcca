//! `chaindet`: determinant counts over finite chain rings and their products.
//!
//! Reports go to stdout, diagnostics (including wall time) to stderr, so
//! the same command with the same cap always prints the same bytes.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 a formula disagreed
//! with the census, 3 a conjecture scan found a counterexample.

use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use chaindet::census::{self, CensusOptions, GridCell, ImageMode};
use chaindet::cfpir::{self, enumerate_product_tally, ProductRing};
use chaindet::counting::{self, CountQuery, DetClass, Shape};
use chaindet::limits;
use chaindet::report::{Conjecture, Emit, ImageReport, ReportRow, VerificationReport};
use chaindet::ringspec::{self, RingSpec, Target};
use chaindet::{ChainRing, Error};
use num_bigint::BigUint;

#[derive(Parser)]
#[command(name = "chaindet", version, about = "Exact determinant census over finite chain rings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count matrices of one shape whose determinant lies in a class or equals an element.
    Count(CountArgs),
    /// Compare every closed form with the census over a grid of rings and dimensions.
    Verify(GridArgs),
    /// List the determinants attained.
    DetImage(ImageArgs),
    /// Scan a conjecture over a grid.
    Conjecture(ConjectureArgs),
    /// Closed-form values over a grid, without enumeration.
    Table(GridArgs),
}

#[derive(Args)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = EmitArg::Json)]
    emit: EmitArg,
    /// Maximum matrices enumerated per cell (overrides CENSUS_MAX_ENUM).
    #[arg(long)]
    max_enum: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum EmitArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ShapeArg {
    Diagonal,
    Circulant,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Formula,
    Oracle,
    Both,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long)]
    ring: String,
    #[arg(long)]
    n: u32,
    #[arg(long, value_enum)]
    shape: ShapeArg,
    /// `unit`, `zero`, `gamma^s`, a coordinate list like `[1,0]`, or an
    /// integer; components joined by ` x ` for products.
    #[arg(long)]
    class: String,
    #[arg(long, value_enum, default_value_t = MethodArg::Both)]
    method: MethodArg,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct GridArgs {
    /// Comma-separated ring specs.
    #[arg(long, alias = "ring")]
    rings: String,
    /// Single dimension (instead of 1..=n-max).
    #[arg(long, conflicts_with = "n_max")]
    n: Option<u32>,
    #[arg(long)]
    n_max: Option<u32>,
    #[arg(long, value_enum, default_value_t = ShapeArg::Both)]
    shape: ShapeArg,
    /// Only for `table`: add the census column as well.
    #[arg(long, value_enum, default_value_t = MethodArg::Formula)]
    method: MethodArg,
    /// Use the eigenvalue determinant for circulants when n | q - 1.
    #[arg(long)]
    eigen: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ImageArgs {
    #[arg(long)]
    ring: String,
    #[arg(long)]
    n: u32,
    #[arg(long, value_enum, default_value_t = ShapeArg::Circulant)]
    shape: ShapeArg,
    /// Only the two-parameter family cir(a, b, ..., b) / diag(a, b, ..., b).
    #[arg(long)]
    cheap: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConjectureArg {
    OrbitWithoutGcd,
    UnitCoverage,
}

#[derive(Args)]
struct ConjectureArgs {
    #[arg(value_enum)]
    which: ConjectureArg,
    #[arg(long, alias = "ring")]
    rings: String,
    #[arg(long, conflicts_with = "n_max")]
    n: Option<u32>,
    #[arg(long)]
    n_max: Option<u32>,
    #[command(flatten)]
    common: Common,
}

enum Failure {
    Usage(String),
    Mismatch,
    Counterexample,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

impl Common {
    fn emit(&self) -> Emit {
        match self.emit {
            EmitArg::Json => Emit::Json,
            EmitArg::Csv => Emit::Csv,
        }
    }

    fn cap(&self) -> u64 {
        self.max_enum.unwrap_or_else(limits::max_enum_from_env)
    }
}

fn shapes(arg: ShapeArg) -> Vec<Shape> {
    match arg {
        ShapeArg::Diagonal => vec![Shape::Diagonal],
        ShapeArg::Circulant => vec![Shape::Circulant],
        ShapeArg::Both => vec![Shape::Diagonal, Shape::Circulant],
    }
}

fn single_shape(arg: ShapeArg) -> Result<Shape, Failure> {
    match arg {
        ShapeArg::Diagonal => Ok(Shape::Diagonal),
        ShapeArg::Circulant => Ok(Shape::Circulant),
        ShapeArg::Both => Err(Failure::Usage("this command takes a single shape".into())),
    }
}

fn dimensions(n: Option<u32>, n_max: Option<u32>) -> Result<Vec<u32>, Failure> {
    match (n, n_max) {
        (Some(0), _) | (_, Some(0)) => Err(Failure::Usage("dimensions start at 1".into())),
        (Some(n), _) => Ok(vec![n]),
        (None, Some(m)) => Ok((1..=m).collect()),
        (None, None) => Err(Failure::Usage("give --n or --n-max".into())),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let start = Instant::now();
    let outcome = match cli.command {
        Command::Count(args) => count(args),
        Command::Verify(args) => verify(args, true),
        Command::Table(args) => verify(args, false),
        Command::DetImage(args) => det_image(args),
        Command::Conjecture(args) => conjecture(args),
    };
    eprintln!("wall time: {:.3}s", start.elapsed().as_secs_f64());
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Mismatch) => {
            eprintln!("verification FAILED: a closed form disagrees with the census");
            ExitCode::from(2)
        }
        Err(Failure::Counterexample) => {
            eprintln!("COUNTEREXAMPLE FOUND: see the report");
            ExitCode::from(3)
        }
    }
}

fn finish(report: &VerificationReport, emit: Emit) -> Outcome {
    print!("{}", report.emit(emit));
    if report.has_mismatch() {
        Err(Failure::Mismatch)
    } else {
        Ok(())
    }
}

fn count(args: CountArgs) -> Outcome {
    let cap = args.common.cap();
    let opts = CensusOptions::with_cap(cap);
    let shape = single_shape(args.shape)?;
    if args.n == 0 {
        return Err(Failure::Usage("dimensions start at 1".into()));
    }
    let spec = RingSpec::parse(&args.ring, cap)?;
    let want_formula = args.method != MethodArg::Oracle;
    let want_oracle = args.method != MethodArg::Formula;
    let row = match &spec {
        RingSpec::Chain(ring) => count_chain(ring, args.n, shape, &args.class, want_formula, want_oracle, &opts)?,
        RingSpec::Product(ring) => count_product(ring, args.n, shape, &args.class, want_formula, want_oracle, &opts)?,
    };
    let report = VerificationReport {
        rows: vec![row],
        ..Default::default()
    };
    finish(&report, args.common.emit())
}

fn row_for(
    ring: String,
    q: String,
    e: String,
    n: u32,
    shape: Shape,
    class: String,
    formula: Option<BigUint>,
    applicable: bool,
    oracle: Option<BigUint>,
) -> ReportRow {
    let matched = matches!((&formula, &oracle), (Some(f), Some(o)) if f == o);
    ReportRow {
        ring,
        q,
        e,
        n,
        shape,
        class,
        formula,
        oracle,
        applicable,
        matched,
    }
}

fn count_chain(
    ring: &ChainRing,
    n: u32,
    shape: Shape,
    class_text: &str,
    want_formula: bool,
    want_oracle: bool,
    opts: &CensusOptions,
) -> Result<ReportRow, Failure> {
    let target = ringspec::parse_target(ring, class_text)?;
    let class = match target {
        Target::Class(c) => c,
        Target::Element(x) => DetClass::from_valuation(ring.valuation(x).s, ring.e()),
    };
    let query = CountQuery::new(ring.q(), ring.e(), n, class)?;
    let result = match shape {
        Shape::Diagonal => counting::d_count(&query),
        Shape::Circulant => counting::c_count(&query),
    };
    if let Some(reason) = &result.reason {
        eprintln!("formula: {reason}");
    }
    let oracle = if want_oracle {
        let tally = census::enumerate_tally(ring, n, shape, opts)?;
        Some(BigUint::from(match target {
            Target::Element(x) => tally.count(x),
            Target::Class(c) => match tally.class_value(c) {
                Some(v) => v,
                None => {
                    eprintln!("census: counts differ across the class {c}; reporting its first member");
                    tally.count(tally.class_members(c)[0])
                }
            },
        }))
    } else {
        None
    };
    Ok(row_for(
        ring.name(),
        ring.q().to_string(),
        ring.e().to_string(),
        n,
        shape,
        class_text.trim().to_string(),
        if want_formula { result.value.clone() } else { None },
        result.applicable(),
        oracle,
    ))
}

fn count_product(
    ring: &ProductRing,
    n: u32,
    shape: Shape,
    class_text: &str,
    want_formula: bool,
    want_oracle: bool,
    opts: &CensusOptions,
) -> Result<ReportRow, Failure> {
    let targets = ringspec::parse_product_target(ring, class_text)?;
    let classes: Vec<DetClass> = ring
        .factors()
        .iter()
        .zip(&targets)
        .map(|(r, t)| match t {
            Target::Class(c) => *c,
            Target::Element(x) => DetClass::from_valuation(r.valuation(*x).s, r.e()),
        })
        .collect();
    let (value, reason) = match shape {
        Shape::Diagonal => (Some(cfpir::d_count_product_classes(ring, n, &classes)?), None),
        Shape::Circulant => {
            let res = cfpir::c_count_product_classes(ring, n, &classes)?;
            (res.value, res.reason)
        }
    };
    if let Some(reason) = &reason {
        eprintln!("formula: {reason}");
    }
    let oracle = if want_oracle {
        let tally = enumerate_product_tally(ring, n, shape, opts)?;
        // representative: the element itself, or the first class member
        let members: Vec<_> = ring
            .elements(opts.cap)?
            .into_iter()
            .filter(|x| {
                ring.factors()
                    .iter()
                    .zip(&x.0)
                    .zip(&targets)
                    .all(|((r, &c), t)| match t {
                        Target::Element(y) => c == *y,
                        Target::Class(k) => DetClass::from_valuation(r.valuation(c).s, r.e()) == *k,
                    })
            })
            .collect();
        let first = tally.count(&members[0]);
        if members.iter().any(|x| tally.count(x) != first) {
            eprintln!("census: counts differ across the class; reporting its first member");
        }
        Some(BigUint::from(first))
    } else {
        None
    };
    Ok(row_for(
        ring.name(),
        ring.q_label(),
        ring.e_label(),
        n,
        shape,
        class_text.trim().to_string(),
        if want_formula { value.clone() } else { None },
        value.is_some(),
        oracle,
    ))
}

/// `verify` enumerates; `table` prints closed forms unless asked for the census too.
fn verify(args: GridArgs, enumerate: bool) -> Outcome {
    let cap = args.common.cap();
    let opts = CensusOptions {
        cap,
        eigen_fast_path: args.eigen,
    };
    let specs = ringspec::parse_ring_list(&args.rings, cap)?;
    if specs.is_empty() {
        return Err(Failure::Usage("no rings given".into()));
    }
    let dims = dimensions(args.n, args.n_max)?;
    let shapes = shapes(args.shape);
    let with_oracle = enumerate || args.method != MethodArg::Formula;
    let clear_formula = !enumerate && args.method == MethodArg::Oracle;
    let mut report = VerificationReport::default();
    for spec in &specs {
        for &n in &dims {
            match spec {
                RingSpec::Chain(ring) => {
                    let cell = [GridCell::new(ring.clone(), n)];
                    let mut part = if with_oracle {
                        census::verify(&cell, &shapes, &opts)
                    } else {
                        formula_rows(ring, n, &shapes)?
                    };
                    if clear_formula {
                        // `table --method oracle`: census column only
                        for row in &mut part.rows {
                            row.formula = None;
                            row.matched = false;
                        }
                    }
                    report.extend(part);
                }
                RingSpec::Product(ring) => {
                    for &shape in &shapes {
                        match cfpir::product_verify(ring, n, shape, &opts) {
                            Ok(part) => report.extend(part),
                            Err(err @ Error::TooLarge { .. }) => {
                                report.skipped.push(chaindet::report::SkippedCell {
                                    ring: ring.name(),
                                    n,
                                    shape,
                                    reason: err.to_string(),
                                })
                            }
                            Err(err) => return Err(err.into()),
                        }
                    }
                }
            }
        }
    }
    for skipped in &report.skipped {
        eprintln!("skipped {} n={} {}: {}", skipped.ring, skipped.n, skipped.shape, skipped.reason);
    }
    finish(&report, args.common.emit())
}

fn formula_rows(ring: &ChainRing, n: u32, shapes: &[Shape]) -> Result<VerificationReport, Failure> {
    let mut report = VerificationReport::default();
    for &shape in shapes {
        for class in DetClass::all(ring.e()) {
            let formula = census::formula_for(ring, n, shape, class)?;
            report.rows.push(row_for(
                ring.name(),
                ring.q().to_string(),
                ring.e().to_string(),
                n,
                shape,
                class.to_string(),
                formula.clone(),
                formula.is_some(),
                None,
            ));
        }
    }
    Ok(report)
}

fn det_image(args: ImageArgs) -> Outcome {
    let cap = args.common.cap();
    let opts = CensusOptions::with_cap(cap);
    let shape = single_shape(args.shape)?;
    let ring = ringspec::parse_chain_ring(&args.ring, cap)?;
    let mode = if args.cheap { ImageMode::Cheap } else { ImageMode::Full };
    let image = census::det_image(&ring, args.n, shape, mode, &opts)?;
    let attained: std::collections::HashSet<_> = image.iter().copied().collect();
    let report = ImageReport {
        ring: ring.name(),
        n: args.n,
        shape,
        mode: if args.cheap { "cheap" } else { "full" }.to_string(),
        image: image.iter().map(|&x| ring.format_element(x)).collect(),
        missing: ring
            .enumeration_order()
            .iter()
            .filter(|x| !attained.contains(x))
            .map(|&x| ring.format_element(x))
            .collect(),
    };
    print!("{}", report.emit(args.common.emit()));
    Ok(())
}

fn conjecture(args: ConjectureArgs) -> Outcome {
    let cap = args.common.cap();
    let opts = CensusOptions::with_cap(cap);
    let which = match args.which {
        ConjectureArg::OrbitWithoutGcd => Conjecture::OrbitWithoutGcd,
        ConjectureArg::UnitCoverage => Conjecture::UnitCoverage,
    };
    let dims = dimensions(args.n, args.n_max)?;
    let mut grid = Vec::new();
    for spec in ringspec::parse_ring_list(&args.rings, cap)? {
        let RingSpec::Chain(ring) = spec else {
            return Err(Failure::Usage(format!(
                "conjecture scans take chain rings, not the product {spec}"
            )));
        };
        grid.extend(dims.iter().map(|&n| GridCell::new(ring.clone(), n)));
    }
    let report = census::conjecture_scan(which, &grid, &opts);
    print!("{}", report.emit(args.common.emit()));
    if report.found_counterexample() {
        Err(Failure::Counterexample)
    } else {
        Ok(())
    }
}
