use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{ExperimentConfig, Policy, Scheme};
use super::stats::{overlaps, wer_interval};
use crate::analysis::{binomial, hard_ml_wer_perfect, union_bound_wer, AnalyticCurve};
use crate::channel::{Channel, PskAwgn, QarySymmetric};
use crate::code::Code;
use crate::decoder::{symbol_errors, LpDecoder, TrialOutcome};
use crate::error::{Error, Result};
use crate::ring::Elem;

/// Exact CSV header of sweep output.
pub const SWEEP_HEADER: &str = "snr_db,trials,word_errors,frac_failures,ml_errors,wer,wer_ci_lo,wer_ci_hi,ser";

/// Seed offset separating the two arms of the independence experiment.
const RANDOM_ARM_SEED: u64 = 0x9e37_79b9_7f4a_7c15;

/// Aggregated counts for one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    /// SNR in dB, or the crossover probability for the symmetric channel.
    pub x: f64,
    pub trials: u64,
    pub word_errors: u64,
    pub frac_failures: u64,
    pub ml_errors: u64,
    pub symbol_errors: u64,
    pub aborts: u64,
    pub wer: f64,
    pub wer_ci: (f64, f64),
    pub ser: f64,
    pub mean_decode_secs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub scheme: Scheme,
    pub policy: Policy,
    pub n: usize,
    pub points: Vec<PointResult>,
}

impl SweepResult {
    pub fn aborts(&self) -> u64 {
        self.points.iter().map(|p| p.aborts).sum()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(SWEEP_HEADER);
        s.push('\n');
        for p in &self.points {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{:.6e},{:.6e},{:.6e},{:.6e}",
                p.x, p.trials, p.word_errors, p.frac_failures, p.ml_errors, p.wer, p.wer_ci.0, p.wer_ci.1, p.ser
            );
        }
        s
    }
}

#[derive(Default, Clone, Copy)]
struct Tally {
    trials: u64,
    fractional: u64,
    ml: u64,
    symbol_errors: u64,
    aborts: u64,
    secs: f64,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            trials: self.trials + o.trials,
            fractional: self.fractional + o.fractional,
            ml: self.ml + o.ml,
            symbol_errors: self.symbol_errors + o.symbol_errors,
            aborts: self.aborts + o.aborts,
            secs: self.secs + o.secs,
        }
    }
}

/// `log_q |C| / n`, from the dimension over a field or by counting codewords.
pub fn code_rate(code: &Code) -> Result<f64> {
    let n = code.n() as f64;
    if let Some(k) = code.dimension() {
        return Ok(k as f64 / n);
    }
    let size = code.codewords()?.count() as f64;
    Ok(size.ln() / (code.ring().q() as f64).ln() / n)
}

/// The generator for trial `trial` at grid point `point`.
pub fn trial_rng(seed: u64, trial: u64, point: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ trial);
    rng.set_stream(point as u64);
    rng
}

/// Shared state for running trials of one experiment.
pub struct Runner {
    code: Code,
    decoder: LpDecoder,
    rate: f64,
    codebook: Option<Vec<Vec<Elem>>>,
    pool: rayon::ThreadPool,
}

impl Runner {
    pub fn new(code: Code, cfg: &ExperimentConfig) -> Result<Self> {
        let decoder = LpDecoder::new(code.clone(), cfg.mode)?;
        let rate = match cfg.scheme {
            Scheme::Psk => code_rate(&code)?,
            Scheme::Qsc => 1.0,
        };
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
        Ok(Runner { code, decoder, rate, codebook: None, pool })
    }

    pub fn code(&self) -> &Code {
        &self.code
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    fn ensure_codebook(&mut self) -> Result<()> {
        if self.codebook.is_none() {
            self.codebook = Some(self.code.codewords()?.collect());
        }
        Ok(())
    }

    /// Runs every grid point of `cfg` with the given policy and seed.
    pub fn sweep(&mut self, cfg: &ExperimentConfig, policy: Policy, seed: u64) -> Result<SweepResult> {
        cfg.validate()?;
        if policy == Policy::RandomCodeword {
            self.ensure_codebook()?;
        }
        let q = self.code.ring().q();
        let mut points = Vec::with_capacity(cfg.grid().len());
        for (k, &x) in cfg.grid().iter().enumerate() {
            let tally = match cfg.scheme {
                Scheme::Psk => {
                    let ch = PskAwgn::from_snr_db(q, x, self.rate)?;
                    ch.check_ring(self.code.ring())?;
                    self.run_point(&ch, cfg.trials, seed, k, policy)
                }
                Scheme::Qsc => {
                    let ch = QarySymmetric::with_ring(self.code.ring(), x)?;
                    self.run_point(&ch, cfg.trials, seed, k, policy)
                }
            };
            points.push(self.summarize(x, tally));
        }
        Ok(SweepResult { scheme: cfg.scheme, policy, n: self.code.n(), points })
    }

    fn summarize(&self, x: f64, t: Tally) -> PointResult {
        let word_errors = t.fractional + t.ml;
        let decoded = t.trials - t.aborts;
        let denom = decoded.max(1);
        PointResult {
            x,
            trials: t.trials,
            word_errors,
            frac_failures: t.fractional,
            ml_errors: t.ml,
            symbol_errors: t.symbol_errors,
            aborts: t.aborts,
            wer: word_errors as f64 / denom as f64,
            wer_ci: wer_interval(word_errors, denom),
            ser: t.symbol_errors as f64 / (denom as f64 * self.code.n() as f64),
            mean_decode_secs: t.secs / denom as f64,
        }
    }

    fn run_point<C: Channel>(&self, ch: &C, trials: u64, seed: u64, point: usize, policy: Policy) -> Tally {
        let n = self.code.n();
        let zero = vec![0; n];
        self.pool.install(|| {
            (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = trial_rng(seed, t, point);
                    let sent: &[Elem] = match (policy, &self.codebook) {
                        (Policy::RandomCodeword, Some(book)) => &book[rng.gen_range(0..book.len())],
                        _ => &zero,
                    };
                    let y = ch.transmit(&ch.modulate(sent), &mut rng);
                    let costs = ch.cost_vector(&y);
                    let start = Instant::now();
                    let result = self.decoder.decode_with_hint(&costs, sent).and_then(|r| {
                        // Ties with the transmitted word count as failures.
                        match TrialOutcome::classify(&r, sent) {
                            TrialOutcome::Success => Ok(self.decoder.tie_check(&costs, sent, &r)?.unwrap_or(r)),
                            _ => Ok(r),
                        }
                    });
                    let secs = start.elapsed().as_secs_f64();
                    let mut tally = Tally { trials: 1, secs, ..Tally::default() };
                    match result {
                        Ok(r) => {
                            match TrialOutcome::classify(&r, sent) {
                                TrialOutcome::Success => {}
                                TrialOutcome::Fractional => tally.fractional = 1,
                                TrialOutcome::MlError => tally.ml = 1,
                            }
                            tally.symbol_errors = symbol_errors(&r.symbol_estimate(), sent) as u64;
                        }
                        Err(e) => {
                            log::error!("trial {t} at grid point {point}: {e}");
                            tally.aborts = 1;
                        }
                    }
                    tally
                })
                .reduce(Tally::default, Tally::merge)
        })
    }
}

/// Runs the configured sweep and writes its CSV when `output` is set.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    let mut runner = Runner::new(cfg.code.load()?, cfg)?;
    let result = runner.sweep(cfg, cfg.policy, cfg.seed)?;
    if let Some(path) = &cfg.output {
        write_file(path, &result.to_csv())?;
    }
    Ok(result)
}

/// Per-point comparison of the all-zero and random-codeword arms.
#[derive(Debug, Clone, PartialEq)]
pub struct IndependenceReport {
    pub zero: SweepResult,
    pub random: SweepResult,
    pub overlap: Vec<bool>,
}

impl IndependenceReport {
    pub fn passed(&self) -> bool {
        self.overlap.iter().all(|&o| o) && self.zero.aborts() == 0 && self.random.aborts() == 0
    }

    pub fn render(&self) -> String {
        let mut s = String::from("x,wer_zero,ci_zero_lo,ci_zero_hi,wer_random,ci_random_lo,ci_random_hi,overlap\n");
        for ((a, b), o) in self.zero.points.iter().zip(&self.random.points).zip(&self.overlap) {
            let _ = writeln!(
                s,
                "{},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{}",
                a.x, a.wer, a.wer_ci.0, a.wer_ci.1, b.wer, b.wer_ci.0, b.wer_ci.1, o
            );
        }
        let _ = writeln!(s, "# result: {}", if self.passed() { "pass" } else { "fail" });
        s
    }
}

/// Runs the sweep twice, transmitting the all-zero word and then uniformly
/// random codewords with an independent seed, and compares the intervals.
pub fn run_independence_test(cfg: &ExperimentConfig) -> Result<IndependenceReport> {
    let code = cfg.code.load()?;
    if cfg.scheme == Scheme::Psk {
        PskAwgn::new(code.ring().q(), 1.0, 1.0)?
            .check_ring(code.ring())
            .map_err(|e| Error::SchemeMismatch(format!("no symmetry maps for this ring: {e}")))?;
    }
    let mut runner = Runner::new(code, cfg)?;
    let zero = runner.sweep(cfg, Policy::AllZero, cfg.seed)?;
    let random = runner.sweep(cfg, Policy::RandomCodeword, cfg.seed ^ RANDOM_ARM_SEED)?;
    let overlap = zero
        .points
        .iter()
        .zip(&random.points)
        .map(|(a, b)| overlaps(a.wer_ci, b.wer_ci))
        .collect();
    let report = IndependenceReport { zero, random, overlap };
    if let Some(path) = &cfg.output {
        write_file(path, &report.render())?;
    }
    Ok(report)
}

/// Minimum distance and error-correcting radius when the code is perfect.
pub fn perfect_code_radius(code: &Code) -> Result<Option<usize>> {
    let a = code.weight_enumerator()?;
    let size: u64 = a.iter().sum();
    let Some(dmin) = a.iter().skip(1).position(|&v| v > 0).map(|w| w + 1) else {
        return Ok(None);
    };
    let t = (dmin - 1) / 2;
    let q = code.ring().q() as f64;
    let ball: f64 = (0..=t).map(|l| binomial(code.n(), l) * (q - 1.0).powi(l as i32)).sum();
    let perfect = (size as f64 * ball - q.powi(code.n() as i32)).abs() < 0.5;
    Ok(perfect.then_some(t))
}

/// Writes the analytic hard-decision and union-bound curves on the sweep
/// grid, plus the simulated LP sweep, into `dir`. Returns the written paths.
pub fn emit_curves(cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    if cfg.scheme != Scheme::Psk {
        return Err(Error::Config("reference curves exist only for PSK".into()));
    }
    let code = cfg.code.load()?;
    let q = code.ring().q();
    if q != 3 {
        return Err(Error::Config("the union-bound constant assumes 3-PSK".into()));
    }
    let t = perfect_code_radius(&code)?
        .ok_or_else(|| Error::Config("the exact hard-decision curve needs a perfect code".into()))?;
    let rate = code_rate(&code)?;
    let weights = code.weight_enumerator()?;
    let name = code.name().to_string();
    let grid = cfg.grid();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let hd = AnalyticCurve::tabulate("hard-decision-exact", &name, "3-PSK", grid, |s| {
        hard_ml_wer_perfect(s, code.n(), t, rate, q)
    });
    let ub = AnalyticCurve::tabulate("union-bound", &name, "3-PSK", grid, |s| union_bound_wer(s, &weights, rate));
    let sim = run_sweep(&ExperimentConfig { output: None, ..cfg.clone() })?;
    let mut written = Vec::new();
    for (file, body) in [
        ("hard_decision.csv", hd.to_csv()),
        ("union_bound.csv", ub.to_csv()),
        ("lp_sim.csv", sim.to_csv()),
    ] {
        let path = dir.join(file);
        write_file(&path, &body)?;
        written.push(path);
    }
    if sim.aborts() > 0 {
        return Err(Error::Solver(format!("{} decode aborts during the sweep", sim.aborts())));
    }
    Ok(written)
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, body).map_err(|e| Error::io(path, e))
}
