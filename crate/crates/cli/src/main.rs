use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ringlp::channel::{Channel, Complex64, CostVector, PskAwgn, QarySymmetric};
use ringlp::decoder::{DecodeMode, LpDecoder, Outcome};
use ringlp::harness::{self, verify, ExperimentConfig};
use ringlp::pseudocodeword::LpPseudocodeword;
use ringlp::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_ABORT: u8 = 2;
const EXIT_VERIFY: u8 = 3;

/// LP decoding of linear codes over finite rings.
#[derive(Parser)]
#[command(name = "ringlp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decode one received word.
    Decode(DecodeArgs),
    /// Run a Monte Carlo sweep and write its CSV.
    Sweep(ExperimentArgs),
    /// Compare all-zero and random-codeword transmission.
    Independence(ExperimentArgs),
    /// Write the analytic and simulated curves.
    Curves {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Output directory.
        #[arg(long, default_value = "curves")]
        dir: PathBuf,
    },
    /// Run the built-in property suites.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// Config file plus per-key overrides.
#[derive(Args)]
struct ExperimentArgs {
    /// `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    code: Option<String>,
    #[arg(long)]
    scheme: Option<String>,
    /// SNR grid in dB: `a,b,c` or `start:stop:step`.
    #[arg(long, allow_hyphen_values = true)]
    snr: Option<String>,
    /// Crossover grid for the symmetric channel.
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    policy: Option<String>,
    #[arg(long)]
    workers: Option<String>,
    #[arg(long)]
    output: Option<String>,
}

impl ExperimentArgs {
    fn resolve(&self) -> Result<ExperimentConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::read(path)?,
            None => ExperimentConfig::default(),
        };
        let overrides = [
            ("code", &self.code),
            ("scheme", &self.scheme),
            ("snr", &self.snr),
            ("eps", &self.eps),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("mode", &self.mode),
            ("policy", &self.policy),
            ("workers", &self.workers),
            ("output", &self.output),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct DecodeArgs {
    /// `golay` or a code file.
    #[arg(long, default_value = "golay")]
    code: String,
    #[arg(long, default_value = "psk")]
    scheme: String,
    /// PSK: SNR per information symbol in dB.
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    snr: f64,
    /// Symmetric channel crossover probability.
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value = "float-recheck")]
    mode: String,
    /// Received word: `re:im` pairs for PSK, symbols for the symmetric channel.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "costs")]
    received: Option<String>,
    /// Raw cost vector, `n (q - 1)` comma-separated values.
    #[arg(long, allow_hyphen_values = true)]
    costs: Option<String>,
    /// Print the pseudocodeword of a fractional output.
    #[arg(long)]
    report: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Solver(_) => EXIT_ABORT,
        _ => EXIT_USAGE,
    }
}

fn run(command: Command) -> Result<u8, Error> {
    match command {
        Command::Decode(args) => decode(&args),
        Command::Sweep(args) => {
            let cfg = args.resolve()?;
            let result = harness::run_sweep(&cfg)?;
            if cfg.output.is_none() {
                print!("{}", result.to_csv());
            }
            if result.aborts() > 0 {
                eprintln!("error: {} decode aborts", result.aborts());
                return Ok(EXIT_ABORT);
            }
            Ok(0)
        }
        Command::Independence(args) => {
            let cfg = args.resolve()?;
            let report = harness::run_independence_test(&cfg)?;
            if cfg.output.is_none() {
                print!("{}", report.render());
            }
            if report.zero.aborts() + report.random.aborts() > 0 {
                return Ok(EXIT_ABORT);
            }
            Ok(if report.passed() { 0 } else { EXIT_VERIFY })
        }
        Command::Curves { exp, dir } => {
            let cfg = exp.resolve()?;
            for path in harness::emit_curves(&cfg, &dir)? {
                println!("{}", path.display());
            }
            Ok(0)
        }
        Command::Verify { seed } => {
            let results = verify::run_all(seed);
            for r in &results {
                println!("{r}");
            }
            Ok(if results.iter().all(|r| r.passed) { 0 } else { EXIT_VERIFY })
        }
    }
}

fn decode(args: &DecodeArgs) -> Result<u8, Error> {
    let mut cfg = ExperimentConfig::default();
    cfg.set("code", &args.code)?;
    let code = cfg.code.load()?;
    let mode: DecodeMode = args.mode.parse()?;
    let q = code.ring().q();
    let costs = match (&args.costs, &args.received) {
        (Some(text), _) => CostVector::new(q, parse_list(text, |s| s.parse::<f64>().ok())?)?,
        (None, Some(text)) => match args.scheme.as_str() {
            "psk" => {
                let ch = PskAwgn::from_snr_db(q, args.snr, harness::code_rate(&code)?)?;
                ch.check_ring(code.ring())?;
                let y = parse_list(text, |s| {
                    let (re, im) = s.split_once(':').unwrap_or((s, "0"));
                    Some(Complex64::new(re.trim().parse().ok()?, im.trim().parse().ok()?))
                })?;
                ch.cost_vector(&y)
            }
            "qsc" => {
                let ch = QarySymmetric::with_ring(code.ring(), args.eps)?;
                let y = parse_list(text, |s| s.parse::<usize>().ok().filter(|&v| v < q))?;
                ch.cost_vector(&y)
            }
            other => return Err(Error::Config(format!("unknown scheme `{other}`"))),
        },
        (None, None) => return Err(Error::Config("pass --received or --costs".into())),
    };
    if costs.n() != code.n() {
        return Err(Error::DimensionMismatch { expected: code.n(), actual: costs.n() });
    }
    let decoder = LpDecoder::new(code, mode)?;
    let result = decoder.decode(&costs)?;
    match &result.outcome {
        Outcome::Codeword(c) => println!("codeword {}", join(c)),
        Outcome::Fractional => println!("fractional"),
    }
    println!("objective {:.12e}", result.objective);
    println!("estimate {}", join(&result.symbol_estimate()));
    if args.report && result.outcome == Outcome::Fractional {
        let exact = match result.exact {
            Some(s) => s,
            None => decoder.solve_exact_for(&costs, Some(&result.basis))?,
        };
        let pc = LpPseudocodeword::extract(decoder.code(), decoder.layout(), &exact.values)?;
        print!("{}", pc.report(decoder.layout(), Some(&costs)));
    }
    Ok(0)
}

fn parse_list<T>(text: &str, parse: impl Fn(&str) -> Option<T>) -> Result<Vec<T>, Error> {
    text.split(',')
        .map(|s| parse(s.trim()).ok_or_else(|| Error::Config(format!("cannot parse `{}`", s.trim()))))
        .collect()
}

fn join(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}
