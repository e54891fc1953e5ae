use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use recsum::arith::cfrac::cfrac_expand_expr;
use recsum::arith::real::parse_decimal;
use recsum::certificate::Certificate;
use recsum::matveev::{lower_bound_exponent, matveev_constant, LinearFormSpec};
use recsum::pipeline::{
    theorem1_constant, theorem2_solve_with, BoundLedger, Check, LedgerStep, Sense, StepOutput, Theorem2Options,
};
use recsum::reduction::{baker_davenport, ConvergentChoice, ReductionInstance, DEFAULT_RETRIES};
use recsum::search::{enumerate_box, index_bound_from_valuation, valuation_scan, ScanParams};
use recsum::spec_file::parse_spec;
use recsum::{BinaryRecurrence, CertifiedReal, Error, Expr, PrecisionPolicy, Real};

#[derive(Parser, Debug)]
#[command(name = "recsum", version, about = "Certified solver for sums of recurrence terms equal to sums of prime powers")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Write a JSON certificate to this path.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Precision ceiling in bits for certified arithmetic.
    #[arg(long, global = true, value_name = "BITS", default_value_t = 16384, value_parser = clap::value_parser!(u32).range(8..))]
    precision_bits: u32,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, value_name = "N", value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,
    /// Record wall-clock time per phase in the certificate.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve F_{n1} + F_{n2} = 2^{z1} + 3^{z2} completely.
    #[command(name = "solve-fib23")]
    SolveFib23 {
        /// Bound on the multiplier in every reduction.
        #[arg(long, default_value = "9e30")]
        m: String,
        /// Largest n_1 searched exhaustively.
        #[arg(long, default_value_t = 100)]
        box_n: u64,
    },
    /// Effective constant C for the equation described by a spec file.
    #[command(name = "bound-chain")]
    BoundChain {
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = Scalar::Certified)]
        scalar: Scalar,
    },
    /// One Baker–Davenport reduction of 0 < u gamma - n + mu < A B^{-m}.
    Reduce {
        #[arg(long)]
        gamma: String,
        #[arg(long)]
        mu: String,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        m: String,
        /// Use this convergent index instead of the smallest with q > 6M.
        #[arg(long)]
        pinned: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_RETRIES)]
        retries: usize,
    },
    /// Matveev's constant for t logarithms over a field of degree D.
    Matveev {
        #[arg(long)]
        t: usize,
        #[arg(long = "degree", short = 'd')]
        degree: u32,
        /// One per logarithm.
        #[arg(long = "a", num_args = 1.., required = true)]
        a: Vec<String>,
        #[arg(long)]
        b: String,
    },
    /// Convergents p_0/q_0, ..., p_k/q_k of a real expression.
    Cfrac { expr: String, k: usize },
    /// Maximum of nu_p(U_{n1} + U_{n2} - base^{z1}) over a box.
    #[command(name = "scan-valuation")]
    ScanValuation {
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        base: u64,
        /// n_1 runs over (n1-lo, n1-hi].
        #[arg(long, default_value_t = 100)]
        n1_lo: u64,
        #[arg(long, default_value_t = 493)]
        n1_hi: u64,
        #[arg(long, default_value_t = 485)]
        gap: u64,
        #[arg(long, default_value_t = 222)]
        z1_max: u64,
        /// Recurrence as P,Q,U0,U1.
        #[arg(long, default_value = "1,1,0,1")]
        recurrence: String,
    },
    /// All solutions of the Fibonacci equation with n_1 <= N.
    Enumerate { n: u64 },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Scalar {
    Certified,
    F64,
    F32,
}

/// Exit 2: the input was unusable. Exit 1: the computation failed.
enum Failure {
    Usage(String),
    Compute { error: Error, cert: Option<Box<Certificate>> },
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure::Compute { error, cert: None }
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn expr(src: &str, what: &str) -> Result<Expr, Failure> {
    Expr::parse(src).map_err(|e| usage(format!("{what}: {e}")))
}

fn integer(src: &str, what: &str) -> Result<BigInt, Failure> {
    let r = parse_decimal(src).map_err(|e| usage(format!("{what}: {e}")))?;
    if !r.is_integer() {
        return Err(usage(format!("{what}: {src} is not an integer")));
    }
    Ok(r.to_integer())
}

struct Ctx<'a> {
    global: &'a Global,
    policy: PrecisionPolicy,
    command: &'static str,
}

impl Ctx<'_> {
    fn write(&self, cert: &Certificate) -> Result<(), Failure> {
        if let Some(path) = &self.global.json {
            fs::write(path, cert.to_json()).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
        }
        Ok(())
    }

    fn cert(&self, ledger: BoundLedger) -> Certificate {
        Certificate::new(self.command, &self.policy, None, ledger)
    }

    /// Wrap a computational error with whatever ledger exists so far.
    fn fail(&self, error: Error, ledger: BoundLedger) -> Failure {
        let cert = self.cert(ledger).failed(&error);
        Failure::Compute { error, cert: Some(Box::new(cert)) }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(n) = cli.global.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global().map_err(usage)?;
    }
    let policy = PrecisionPolicy::with_ceiling(cli.global.precision_bits);
    let command = match &cli.command {
        Command::SolveFib23 { .. } => "solve-fib23",
        Command::BoundChain { .. } => "bound-chain",
        Command::Reduce { .. } => "reduce",
        Command::Matveev { .. } => "matveev",
        Command::Cfrac { .. } => "cfrac",
        Command::ScanValuation { .. } => "scan-valuation",
        Command::Enumerate { .. } => "enumerate",
    };
    let ctx = Ctx { global: &cli.global, policy, command };
    match &cli.command {
        Command::SolveFib23 { m, box_n } => solve_fib23(&ctx, integer(m, "--m")?, *box_n),
        Command::BoundChain { spec, scalar } => bound_chain(&ctx, spec, *scalar),
        Command::Reduce { gamma, mu, a, b, m, pinned, retries } => {
            let choice = match pinned {
                Some(k) => ConvergentChoice::Pinned(*k),
                None => ConvergentChoice::Smallest { retries: *retries },
            };
            let inst = ReductionInstance::new(
                expr(gamma, "--gamma")?,
                expr(mu, "--mu")?,
                expr(a, "--a")?,
                expr(b, "--b")?,
                integer(m, "--m")?,
            )
            .map_err(usage)?;
            reduce(&ctx, inst, choice)
        }
        Command::Matveev { t, degree, a, b } => {
            let a = a.iter().map(|s| expr(s, "--a")).collect::<Result<Vec<_>, _>>()?;
            matveev(&ctx, *t, *degree, a, expr(b, "--b")?)
        }
        Command::Cfrac { expr: src, k } => cfrac(&ctx, expr(src, "expression")?, *k),
        Command::ScanValuation { p, base, n1_lo, n1_hi, gap, z1_max, recurrence } => {
            let parts = recurrence
                .split(',')
                .map(|s| s.trim().parse::<i64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| usage("--recurrence expects four integers P,Q,U0,U1"))?;
            let [pp, qq, u0, u1] = parts[..] else {
                return Err(usage("--recurrence expects four integers P,Q,U0,U1"));
            };
            let rec = BinaryRecurrence::new(pp, qq, u0, u1).map_err(usage)?;
            if n1_hi <= n1_lo {
                return Err(usage("--n1-hi must exceed --n1-lo"));
            }
            let params = ScanParams { n1_exclusive_lo: *n1_lo, n1_hi: *n1_hi, gap_max: *gap, z1_max: *z1_max, p: *p, base: *base };
            scan(&ctx, &rec, params)
        }
        Command::Enumerate { n } => enumerate(&ctx, *n),
    }
}

fn solve_fib23(ctx: &Ctx<'_>, m: BigInt, box_n: u64) -> Result<(), Failure> {
    let opts = Theorem2Options { policy: ctx.policy, m, box_n, ..Theorem2Options::default() };
    match theorem2_solve_with(&opts) {
        Ok(sol) => {
            for s in &sol.solutions {
                println!("{s}");
            }
            let mut cert = ctx.cert(sol.ledger).with_solutions(sol.solutions);
            if ctx.global.timings {
                cert = cert.with_timings(sol.phases);
            }
            ctx.write(&cert)
        }
        Err(f) => {
            let mut cert = ctx.cert(f.ledger).failed(&f.error);
            if ctx.global.timings {
                cert = cert.with_timings(f.phases);
            }
            Err(Failure::Compute { error: f.error, cert: Some(Box::new(cert)) })
        }
    }
}

fn bound_chain(ctx: &Ctx<'_>, path: &PathBuf, scalar: Scalar) -> Result<(), Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let spec = parse_spec(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let result = match scalar {
        Scalar::Certified => theorem1_constant::<CertifiedReal>(&spec).map(|(c, l)| (c.approx(), c.record(), l)),
        Scalar::F64 => theorem1_constant::<f64>(&spec).map(|(c, l)| (c, Real::record(&c), l)),
        Scalar::F32 => theorem1_constant::<f32>(&spec).map(|(c, l)| (c as f64, Real::record(&c), l)),
    };
    let (approx, record, ledger) = result.map_err(|e| {
        let cert = Certificate::new(ctx.command, &ctx.policy, Some(spec.clone()), BoundLedger::new("")).failed(&e);
        Failure::Compute { error: e, cert: Some(Box::new(cert)) }
    })?;
    for step in &ledger.steps {
        println!("{:22} {:>14}  {}", step.name, step.output_summary(), step.statement);
    }
    println!("C <= {approx:.6e} (hi = {})", record.hi);
    let mut cert = ctx.cert(ledger);
    cert.spec = Some(spec);
    ctx.write(&cert)
}

fn reduce(ctx: &Ctx<'_>, inst: ReductionInstance, choice: ConvergentChoice) -> Result<(), Failure> {
    let outcome = baker_davenport(&inst, choice, &ctx.policy).map_err(|e| ctx.fail(e, BoundLedger::new(CertifiedReal::NAME)))?;
    println!("convergent k = {}, q_k = {}", outcome.k, outcome.q_k);
    println!("epsilon in [{}, {}]", outcome.epsilon.lo, outcome.epsilon.hi);
    let Some(max) = outcome.max_m() else {
        let e = Error::DegenerateCase(format!("epsilon <= 0 at every convergent tried {:?}", outcome.tried));
        return Err(ctx.fail(e, BoundLedger::new(CertifiedReal::NAME)));
    };
    let max = max.max(BigInt::from(0));
    if let Some(b) = &outcome.bound {
        println!("log(A q/epsilon)/log B <= {}", b.hi);
    }
    println!("m <= {max}");
    let mut ledger = BoundLedger::new(CertifiedReal::NAME);
    ledger.push(LedgerStep::new(
        "reduction",
        format!("m <= {max}"),
        "reduction",
        StepOutput::Integer(max),
        Check::Reduction { instance: inst, choice, outcome },
    ));
    ctx.write(&ctx.cert(ledger))
}

fn matveev(ctx: &Ctx<'_>, t: usize, degree: u32, a: Vec<Expr>, b: Expr) -> Result<(), Failure> {
    let fail = |e: Error| ctx.fail(e, BoundLedger::new(CertifiedReal::NAME));
    if t == 0 || a.len() != t {
        return Err(usage(format!("--t {t} needs exactly {t} values of --a, got {}", a.len())));
    }
    let av = a.iter().map(|e| ctx.policy.run(|p| e.eval(p))).collect::<Result<Vec<_>, _>>().map_err(fail)?;
    let bv = ctx.policy.run(|p| b.eval(p)).map_err(fail)?;
    let c = matveev_constant(t, degree, &av).map_err(fail)?;
    let lf = LinearFormSpec::new(degree, av, bv);
    let e = lower_bound_exponent(&lf).map_err(fail)?;
    println!("C(t, D) A_1 ... A_t <= {}", c.to_record().hi);
    println!("log|Lambda| > -{}", e.to_record().hi);
    let mut ledger = BoundLedger::new(CertifiedReal::NAME);
    ledger.push(
        LedgerStep::new("matveev", "constant of the lower bound", "linear form lower bound", StepOutput::Real(c.to_record()), Check::Matveev {
            t,
            degree,
            a: a.clone(),
        }),
    );
    ledger.push(
        LedgerStep::new(
            "exponent",
            "log|Lambda| > -E (1 + log B)",
            "linear form lower bound",
            StepOutput::Real(e.to_record()),
            Check::Formula { expr: Expr::var("matveev").mul(Expr::int(1).add(b.log())), sense: Sense::Upper },
        )
        .inputs(&["matveev"]),
    );
    ctx.write(&ctx.cert(ledger))
}

fn cfrac(ctx: &Ctx<'_>, e: Expr, k: usize) -> Result<(), Failure> {
    let cf = cfrac_expand_expr(&e, k + 1, &ctx.policy).map_err(|e| ctx.fail(e, BoundLedger::new(CertifiedReal::NAME)))?;
    let items: Vec<String> = (0..=k)
        .map(|i| {
            let p = cf.numerator(i)?;
            let q = cf.denominator(i)?;
            Ok(if q == &BigInt::from(1) { p.to_string() } else { format!("{p}/{q}") })
        })
        .collect::<Result<_, Error>>()
        .map_err(|e| ctx.fail(e, BoundLedger::new(CertifiedReal::NAME)))?;
    println!("{}", items.join(", "));
    ctx.write(&ctx.cert(BoundLedger::new(CertifiedReal::NAME)))
}

fn scan(ctx: &Ctx<'_>, rec: &BinaryRecurrence, params: ScanParams) -> Result<(), Failure> {
    let fail = |e: Error| ctx.fail(e, BoundLedger::new(CertifiedReal::NAME));
    let r = valuation_scan(rec, &params).map_err(fail)?;
    println!("max valuation {} over {} triples", r.max_valuation, r.triples);
    if let Some((n1, n2, z1)) = r.argmax {
        println!("attained at (n1, n2, z1) = ({n1}, {n2}, {z1})");
    }
    if !r.zero_cases.is_empty() {
        println!("{} exact zeros excluded", r.zero_cases.len());
    }
    let idx = index_bound_from_valuation(rec.alpha(), params.p, r.max_valuation, &ctx.policy).map_err(fail)?;
    println!("alpha^(n1 - 2) <= 2 p^z gives n1 <= {idx}");
    // replay knows only the Fibonacci scan with p = 3 and base 2
    let mut ledger = BoundLedger::new(CertifiedReal::NAME);
    if rec == &BinaryRecurrence::fibonacci() && params.p == 3 && params.base == 2 {
        ledger.push(LedgerStep::new(
            "valuation_scan",
            format!("maximal valuation {}", r.max_valuation),
            "p-adic valuation",
            StepOutput::Integer(BigInt::from(r.max_valuation)),
            Check::ValuationScan { result: r },
        ));
    }
    ctx.write(&ctx.cert(ledger))
}

fn enumerate(ctx: &Ctx<'_>, n: u64) -> Result<(), Failure> {
    let sols = enumerate_box(n);
    for s in &sols {
        println!("{s}");
    }
    let mut ledger = BoundLedger::new(CertifiedReal::NAME);
    ledger.push(LedgerStep::new(
        "box_search",
        format!("all solutions with n_2 <= n_1 <= {n}: {} tuples", sols.len()),
        "finite search",
        StepOutput::Solutions(sols.clone()),
        Check::Enumeration { n_max: n },
    ));
    ctx.write(&ctx.cert(ledger).with_solutions(sols))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute { error, cert }) => {
            eprintln!("computation failed: {error}");
            if let (Some(cert), Some(path)) = (cert, &cli.global.json) {
                match fs::write(path, cert.to_json()) {
                    Ok(()) => eprintln!("partial certificate written to {}", path.display()),
                    Err(e) => eprintln!("cannot write {}: {e}", path.display()),
                }
            }
            ExitCode::from(1)
        }
    }
}
