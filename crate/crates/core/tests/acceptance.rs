mod common;

use std::collections::BTreeSet;
use std::io::Write;
use std::sync::OnceLock;
use std::time::Instant;

use common::{brute_local_codewords, decoding_vertices_f, min_over, oracle_codes, zq_code};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use ringlp::analysis;
use ringlp::channel::{Channel, Complex64, CostVector, PskAwgn};
use ringlp::code::Code;
use ringlp::decoder::{DecodeMode, LpDecoder, Outcome};
use ringlp::harness::{self, ExperimentConfig};
use ringlp::lp::{self, exact, LpStatus};
use ringlp::polytope::{build_lp, VariableLayout};
use ringlp::pseudocodeword::{build_cover, cover_to_lppc, verify_cover, GraphCover, LpPseudocodeword};
use ringlp::ring::Elem;

const GOLAY_RATE: f64 = 6.0 / 11.0;

// Bypasses the test harness capture so every verdict is visible.
fn verdict(name: &str, passed: bool, detail: &str) {
    let tag = if passed { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "[{tag}] {name}: {detail}");
    assert!(passed, "{name}: {detail}");
}

fn satisfies(code: &Code, word: &[Elem]) -> bool {
    let q = code.ring().q();
    code.rows()
        .iter()
        .all(|row| row.iter().zip(word).map(|(&h, &x)| h * x).sum::<usize>() % q == 0)
}

fn odometer(v: &mut [usize], base: usize) -> bool {
    for d in v.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

// Golay codewords by testing all 3^11 words against the parity checks (Z3
// arithmetic done on integers here).
fn golay_codewords() -> &'static Vec<Vec<Elem>> {
    static WORDS: OnceLock<Vec<Vec<Elem>>> = OnceLock::new();
    WORDS.get_or_init(|| {
        let code = Code::ternary_golay();
        let mut out = Vec::new();
        let mut w = vec![0; 11];
        loop {
            if satisfies(&code, &w) {
                out.push(w.clone());
            }
            if !odometer(&mut w, 3) {
                return out;
            }
        }
    })
}

fn word_cost(costs: &CostVector, c: &[Elem]) -> f64 {
    c.iter().enumerate().filter(|(_, &a)| a != 0).map(|(i, &a)| costs.get(i, a)).sum()
}

fn word_cost_exact(costs: &CostVector, c: &[Elem]) -> BigRational {
    c.iter()
        .enumerate()
        .filter(|(_, &a)| a != 0)
        .map(|(i, &a)| exact(costs.get(i, a)))
        .sum()
}

#[test]
fn golay_weight_enumerator() {
    let start = Instant::now();
    let mut a = vec![0u64; 12];
    for c in golay_codewords() {
        a[c.iter().filter(|&&x| x != 0).count()] += 1;
    }
    let lib = Code::ternary_golay().weight_enumerator().unwrap();
    let secs = start.elapsed().as_secs_f64();
    let expected = [1, 0, 0, 0, 0, 132, 132, 0, 330, 110, 0, 24];
    verdict(
        "Golay weight enumerator",
        a == expected && lib == expected && secs < 5.0,
        &format!("brute force {a:?}, library {lib:?}, {secs:.2} s"),
    );
}

#[test]
fn integral_points_are_exactly_codewords() {
    let start = Instant::now();
    let codes = vec![
        zq_code(3, vec![vec![1, 1, 1, 0], vec![0, 1, 2, 1]]),
        zq_code(3, vec![vec![1, 2, 0, 1, 1], vec![0, 1, 1, 2, 0]]),
        zq_code(4, vec![vec![1, 1, 3, 0], vec![0, 2, 1, 1]]),
        zq_code(4, vec![vec![2, 1, 3]]),
    ];
    let mut problems = Vec::new();
    let mut summary = Vec::new();
    for code in &codes {
        let (n, q) = (code.n(), code.ring().q());
        let layout = VariableLayout::new(code).unwrap();
        let locals: Vec<Vec<Vec<Elem>>> = (0..code.m()).map(|j| brute_local_codewords(code, j)).collect();

        // Words to points.
        let mut codewords = BTreeSet::new();
        let mut w = vec![0; n];
        loop {
            let cw = satisfies(code, &w);
            if cw {
                codewords.insert(w.clone());
            }
            let inside = layout
                .codeword_point(&w)
                .map(|x| layout.contains_exact(&x.iter().map(|&v| exact(v)).collect::<Vec<_>>()).unwrap())
                .unwrap_or(false);
            if inside != cw {
                problems.push(format!("{w:?}: codeword {cw}, embedded point in Q {inside}"));
            }
            if !odometer(&mut w, q) {
                break;
            }
        }

        // Integral candidates to words. An integral w with unit sums per check
        // is one-hot, so candidates are a 0/1 vector f and one local
        // codeword per check; the linking equalities decide membership.
        let mut found = BTreeSet::new();
        let mut bits = vec![0usize; n * (q - 1)];
        let mut candidates = 0u64;
        loop {
            let mut choice = vec![0usize; code.m()];
            loop {
                candidates += 1;
                let linked = (0..code.m()).all(|j| {
                    let cfg = &locals[j][choice[j]];
                    code.support(j)
                        .iter()
                        .zip(cfg)
                        .all(|(&i, &v)| (1..q).all(|a| bits[i * (q - 1) + a - 1] == (v == a) as usize))
                });
                if linked {
                    let word: Vec<Elem> = bits
                        .chunks(q - 1)
                        .map(|b| b.iter().position(|&x| x == 1).map_or(0, |a| a + 1))
                        .collect();
                    if !satisfies(code, &word) {
                        problems.push(format!("integral point with f = {bits:?} is not a codeword"));
                    }
                    // The library must agree that this point lies in Q.
                    let mut x: Vec<BigRational> = bits.iter().map(|&b| BigRational::from_integer(b.into())).collect();
                    x.resize(layout.num_vars(), BigRational::zero());
                    for j in 0..code.m() {
                        let k = layout
                            .local_codewords(j)
                            .iter()
                            .position(|c| c.values == locals[j][choice[j]])
                            .unwrap();
                        x[layout.w_col(j, k)] = BigRational::from_integer(1.into());
                    }
                    if !layout.contains_exact(&x).unwrap() {
                        problems.push(format!("library rejects integral point {bits:?}"));
                    }
                    found.insert(word);
                }
                let mut p = 0;
                while p < choice.len() {
                    choice[p] += 1;
                    if choice[p] < locals[p].len() {
                        break;
                    }
                    choice[p] = 0;
                    p += 1;
                }
                if p == choice.len() {
                    break;
                }
            }
            if !odometer(&mut bits, 2) {
                break;
            }
        }
        if found != codewords {
            problems.push(format!("{} integral points vs {} codewords", found.len(), codewords.len()));
        }
        summary.push(format!("{} n={} {} codewords/{} candidates", code.ring().name(), n, codewords.len(), candidates));
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        "integral points of Q are exactly the codewords",
        problems.is_empty() && secs < 60.0,
        &format!("{}; {} violations; {secs:.1} s", summary.join(", "), problems.len()),
    );
}

#[test]
fn ml_certificate() {
    let words = golay_codewords();
    let mut violations = Vec::new();
    let mut integral = [0usize; 2];
    for (slot, mode) in [DecodeMode::Float, DecodeMode::FloatRecheck].into_iter().enumerate() {
        let dec = LpDecoder::new(Code::ternary_golay(), mode).unwrap();
        for snr in [3.0, 6.0] {
            let ch = PskAwgn::from_snr_db(3, snr, GOLAY_RATE).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + snr as u64);
            for t in 0..2000 {
                let cv = ch.cost_vector(&ch.transmit(&ch.modulate(&[0; 11]), &mut rng));
                let r = dec.decode(&cv).unwrap();
                let Outcome::Codeword(c) = &r.outcome else { continue };
                integral[slot] += 1;
                let costs: Vec<f64> = words.iter().map(|w| word_cost(&cv, w)).collect();
                let best = costs.iter().cloned().fold(f64::INFINITY, f64::min);
                if mode == DecodeMode::Float {
                    if (r.objective - best).abs() > 1e-6 {
                        violations.push(format!("float {snr} dB trial {t}: {} vs {best}", r.objective));
                    }
                } else {
                    // Exact minimum over the codewords within float reach of the best.
                    let exact_best = words
                        .iter()
                        .zip(&costs)
                        .filter(|(_, &c)| c <= best + 1e-6)
                        .map(|(w, _)| word_cost_exact(&cv, w))
                        .min()
                        .unwrap();
                    let obj = r.exact.as_ref().unwrap().objective.clone();
                    if obj != exact_best || word_cost_exact(&cv, c) != exact_best {
                        violations.push(format!("exact {snr} dB trial {t}: {obj} vs {exact_best}"));
                    }
                }
            }
        }
    }
    verdict(
        "ML certificate",
        violations.is_empty(),
        &format!(
            "4000 float trials ({} integral), 4000 exact trials ({} integral) at 3 and 6 dB, {} violations {}",
            integral[0],
            integral[1],
            violations.len(),
            violations.first().map_or("", |s| s.as_str())
        ),
    );
}

struct Failure {
    costs: CostVector,
    pc: LpPseudocodeword,
    fractional: bool,
}

// All-zero transmissions at 1 dB until 50 fractional failures are seen.
fn golay_failures() -> &'static (Vec<Failure>, usize) {
    static FAILS: OnceLock<(Vec<Failure>, usize)> = OnceLock::new();
    FAILS.get_or_init(|| {
        let code = Code::ternary_golay();
        let dec = LpDecoder::new(code.clone(), DecodeMode::FloatRecheck).unwrap();
        let ch = PskAwgn::from_snr_db(3, 1.0, GOLAY_RATE).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut out = Vec::new();
        let mut trials = 0;
        while out.iter().filter(|f: &&Failure| f.fractional).count() < 50 {
            trials += 1;
            let cv = ch.cost_vector(&ch.transmit(&ch.modulate(&[0; 11]), &mut rng));
            let r = dec.decode(&cv).unwrap();
            if r.word() == Some(&[0; 11][..]) {
                continue;
            }
            let pc = LpPseudocodeword::extract(&code, dec.layout(), &r.exact.as_ref().unwrap().values).unwrap();
            out.push(Failure { costs: cv, pc, fractional: r.outcome == Outcome::Fractional });
        }
        (out, trials)
    })
}

#[test]
fn failures_have_nonpositive_cost() {
    let (fails, trials) = golay_failures();
    let mut bad = 0;
    for f in fails {
        let cost: BigRational = f
            .pc
            .h
            .iter()
            .zip(f.costs.as_slice())
            .map(|(&h, &l)| BigRational::from_integer(h.into()) * exact(l))
            .sum();
        if f.pc.h.iter().all(|&h| h == 0) || cost > BigRational::zero() {
            bad += 1;
        }
    }
    let fractional = fails.iter().filter(|f| f.fractional).count();
    verdict(
        "failing trials give nonzero pseudocodewords of nonpositive cost",
        bad == 0 && fractional >= 50,
        &format!("{} failures ({fractional} fractional) in {trials} trials at 1 dB, {bad} violations", fails.len()),
    );
}

// Independent cover check: every edge fiber is a permutation and every check
// copy is satisfied.
fn cover_ok(code: &Code, cover: &GraphCover) -> bool {
    let m = cover.degree;
    let q = code.ring().q();
    (0..code.m()).all(|j| {
        let support = code.support(j);
        let perms = (0..support.len()).all(|p| {
            let mut hit: Vec<usize> = cover.wiring[j].iter().map(|links| links[p]).collect();
            hit.sort();
            hit == (0..m).collect::<Vec<_>>()
        });
        perms
            && cover.wiring[j].iter().all(|links| {
                support
                    .iter()
                    .zip(links)
                    .map(|(&i, &l)| code.entry(j, i) * cover.values[i][l])
                    .sum::<usize>()
                    % q
                    == 0
            })
    })
}

fn count_matrix(cover: &GraphCover, q: usize) -> Vec<Vec<u64>> {
    cover
        .values
        .iter()
        .map(|copies| (0..q).map(|a| copies.iter().filter(|&&v| v == a).count() as u64).collect())
        .collect()
}

// Defining equalities of a pseudocodeword, checked against brute-force local
// codewords rather than the library's layout.
fn pseudocodeword_ok(code: &Code, layout: &VariableLayout, pc: &LpPseudocodeword) -> bool {
    let q = code.ring().q();
    let m = pc.scale;
    let rows_ok = pc.matrix_representation().iter().all(|r| r.iter().sum::<u64>() == m);
    rows_ok
        && (0..code.m()).all(|j| {
            let configs = layout.local_codewords(j);
            let brute: BTreeSet<Vec<Elem>> = brute_local_codewords(code, j).into_iter().collect();
            let listed: BTreeSet<Vec<Elem>> = configs.iter().map(|c| c.values.clone()).collect();
            listed == brute
                && pc.z[j].iter().sum::<u64>() == m
                && code.support(j).iter().enumerate().all(|(p, &i)| {
                    (1..q).all(|a| {
                        let s: u64 = configs
                            .iter()
                            .zip(&pc.z[j])
                            .filter(|(c, _)| c.values[p] == a)
                            .map(|(_, &z)| z)
                            .sum();
                        s == pc.h[i * (q - 1) + a - 1]
                    })
                })
        })
}

#[test]
fn pseudocodeword_cover_round_trip() {
    let (fails, _) = golay_failures();
    let golay = Code::ternary_golay();
    let glayout = VariableLayout::new(&golay).unwrap();
    let mut bad = Vec::new();
    for (k, f) in fails.iter().enumerate() {
        let cover = build_cover(&golay, &glayout, &f.pc).unwrap();
        if !verify_cover(&golay, &cover).is_valid() || !cover_ok(&golay, &cover) {
            bad.push(format!("failure {k}: invalid cover"));
            continue;
        }
        let back = cover_to_lppc(&golay, &glayout, &cover).unwrap();
        if back.matrix_representation() != f.pc.matrix_representation()
            || count_matrix(&cover, 3) != f.pc.matrix_representation()
        {
            bad.push(format!("failure {k}: matrix changed"));
        }
    }

    // Random valid 2-covers of a small Z3 code: random wiring, then values
    // drawn uniformly from the assignments satisfying every check copy.
    let small = zq_code(3, vec![vec![1, 1, 1, 0], vec![0, 1, 2, 1]]);
    let layout = VariableLayout::new(&small).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut nonzero = 0;
    for s in 0..100 {
        let wiring: Vec<Vec<Vec<usize>>> = (0..small.m())
            .map(|j| {
                let flips: Vec<bool> = small.support(j).iter().map(|_| rng.gen()).collect();
                (0..2).map(|l| flips.iter().map(|&f| if f { 1 - l } else { l }).collect()).collect()
            })
            .collect();
        let mut valid = Vec::new();
        let mut flat = vec![0; small.n() * 2];
        loop {
            let cover = GraphCover {
                degree: 2,
                values: flat.chunks(2).map(|c| c.to_vec()).collect(),
                wiring: wiring.clone(),
            };
            if cover_ok(&small, &cover) {
                valid.push(cover);
            }
            if !odometer(&mut flat, 3) {
                break;
            }
        }
        let cover = valid.swap_remove(rng.gen_range(0..valid.len()));
        nonzero += cover.values.iter().flatten().any(|&v| v != 0) as usize;
        let pc = cover_to_lppc(&small, &layout, &cover).unwrap();
        if !pseudocodeword_ok(&small, &layout, &pc) || pc.matrix_representation() != count_matrix(&cover, 3) {
            bad.push(format!("random cover {s}: invalid pseudocodeword"));
        }
    }
    verdict(
        "pseudocodeword and graph-cover round trip",
        bad.is_empty() && fails.len() >= 50,
        &format!(
            "{} extracted pseudocodewords, 100 random 2-covers ({nonzero} nonzero), {} violations {}",
            fails.len(),
            bad.len(),
            bad.first().map_or("", |s| s.as_str())
        ),
    );
}

// Probability that 3-PSK hard decision errs, integrating the Gaussian over the
// correct 120-degree wedge {|y| < sqrt(3) x}.
fn psk3_symbol_error(es_n0: f64) -> f64 {
    let a = es_n0.sqrt();
    let sigma = 0.5f64.sqrt();
    let phi = |x: f64| 0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2);
    let density = |x: f64| (-(x - a) * (x - a) / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    let (lo, hi) = (0.0, a + 40.0 * sigma);
    let steps = 200_000;
    let h = (hi - lo) / steps as f64;
    let g = |x: f64| density(x) * (phi(3f64.sqrt() * x / sigma) - phi(-(3f64.sqrt()) * x / sigma));
    let mut s = g(lo) + g(hi);
    for k in 1..steps {
        s += g(lo + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    1.0 - s * h / 3.0
}

fn hd_wer(snr_db: f64) -> f64 {
    let p = psk3_symbol_error(GOLAY_RATE * 10f64.powf(snr_db / 10.0));
    (3..=11)
        .map(|l| {
            let c = (0..l).fold(1.0, |acc, i| acc * (11 - i) as f64 / (i + 1) as f64);
            c * p.powi(l as i32) * (1.0 - p).powi(11 - l as i32)
        })
        .sum()
}

fn union_bound(snr_db: f64) -> f64 {
    let g = GOLAY_RATE * 10f64.powf(snr_db / 10.0);
    [(5, 132.0), (6, 132.0), (8, 330.0), (9, 110.0), (11, 24.0)]
        .iter()
        .map(|&(w, a)| 0.5 * a * statrs::function::erf::erfc((0.75 * w as f64 * g).sqrt()))
        .sum()
}

fn bisect(f: impl Fn(f64) -> f64, target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 15.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn lp_tracks_hard_decision() {
    let start = Instant::now();
    let cfg = ExperimentConfig {
        snr_db: vec![5.0, 6.0, 7.0],
        trials: 20_000,
        seed: 2009,
        ..ExperimentConfig::default()
    };
    let sweep = harness::run_sweep(&cfg).unwrap();
    let mut ok = sweep.aborts() == 0;
    let mut parts = Vec::new();
    for p in &sweep.points {
        let hd = hd_wer(p.x);
        let lib = analysis::hard_ml_wer_perfect(p.x, 11, 2, GOLAY_RATE, 3);
        let diff = (p.wer.log10() - hd.log10()).abs();
        ok &= (1e-3..=1e-1).contains(&hd) && diff <= 0.3 && ((lib - hd) / hd).abs() < 1e-6;
        parts.push(format!("{} dB: LP {:.3e} ({} frac, {} ML) vs HD {:.3e}, |dlog10| {:.3}", p.x, p.wer, p.frac_failures, p.ml_errors, hd, diff));
    }
    verdict(
        "LP WER tracks exact hard-decision WER",
        ok,
        &format!("{}; 20000 trials each, {:.0} s", parts.join("; "), start.elapsed().as_secs_f64()),
    );
}

#[test]
fn analytic_gap() {
    let start = Instant::now();
    let hd = bisect(hd_wer, 1e-4);
    let ub = bisect(union_bound, 1e-4);
    let weights = Code::ternary_golay().weight_enumerator().unwrap();
    let lib_hd = analysis::crossing(|s| analysis::hard_ml_wer_perfect(s, 11, 2, GOLAY_RATE, 3), 1e-4, 0.0, 15.0).unwrap();
    let lib_ub = analysis::crossing(|s| analysis::union_bound_wer(s, &weights, GOLAY_RATE), 1e-4, 0.0, 15.0).unwrap();
    let gap = hd - ub;
    let secs = start.elapsed().as_secs_f64();
    let agree = (lib_hd - hd).abs() < 1e-6 && (lib_ub - ub).abs() < 1e-6;
    verdict(
        "hard-decision to union-bound gap at WER 1e-4",
        agree && (gap - 1.43).abs() <= 0.15,
        &format!(
            "HD {hd:.4} dB, UB {ub:.4} dB, gap {gap:.4} dB (target 1.43 +- 0.15), library {:.4} dB, {secs:.2} s",
            lib_hd - lib_ub
        ),
    );
}

#[test]
fn codeword_independence() {
    let cfg = ExperimentConfig {
        snr_db: vec![4.0, 6.0],
        trials: 10_000,
        seed: 4242,
        ..ExperimentConfig::default()
    };
    let report = harness::run_independence_test(&cfg).unwrap();
    let parts: Vec<String> = report
        .zero
        .points
        .iter()
        .zip(&report.random.points)
        .map(|(a, b)| {
            format!(
                "{} dB: zero {:.3e} [{:.3e}, {:.3e}] random {:.3e} [{:.3e}, {:.3e}]",
                a.x, a.wer, a.wer_ci.0, a.wer_ci.1, b.wer, b.wer_ci.0, b.wer_ci.1
            )
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let snr = rng.gen_range(-2.0..10.0);
        let ch = PskAwgn::from_snr_db(3, snr, GOLAY_RATE).unwrap();
        let (energy, n0) = (ch.energy(), ch.n0());
        let (alpha, beta) = (rng.gen_range(0..3), rng.gen_range(0..3));
        let centre = rng.gen_range(0..3);
        let s = |k: usize| Complex64::from_polar(energy.sqrt(), 2.0 * std::f64::consts::PI * k as f64 / 3.0);
        let noise = Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal));
        let y = s(centre) + noise * (n0 / 2.0).sqrt();
        let density = |y: Complex64, b: usize| (-(y - s(b)).norm_sqr() / n0).exp() / (std::f64::consts::PI * n0);
        let p = density(y, beta);
        let pt = density(ch.tau(alpha, &y), (beta + 3 - alpha) % 3);
        worst = worst.max((p - pt).abs() / p.max(pt));
    }
    verdict(
        "WER independent of the transmitted codeword",
        report.passed() && worst <= 1e-12,
        &format!("{}; density identity worst relative error {worst:.2e} over 10000 samples", parts.join("; ")),
    );
}

#[test]
fn lp_engine_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let mut count = 0;
    let mut worst = 0.0f64;
    let mut bad = 0;
    for code in oracle_codes().into_iter().filter(|c| c.n() <= 4) {
        let verts = decoding_vertices_f(&code);
        let q = code.ring().q();
        for _ in 0..20 {
            let costs: Vec<f64> = (0..code.n() * (q - 1)).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let cv = CostVector::new(q, costs.clone()).unwrap();
            let (_, lp) = build_lp(&code, &cv).unwrap();
            let best = min_over(&verts, &costs.iter().map(|&v| exact(v)).collect::<Vec<_>>());
            let ra = lp::solve_rational(&lp);
            let fl = lp::solve_float(&lp);
            if ra.status != LpStatus::Optimal || ra.objective != best || fl.status != LpStatus::Optimal {
                bad += 1;
            }
            worst = worst.max((fl.objective - best.to_f64().unwrap()).abs());
            count += 1;
        }
    }
    verdict(
        "LP engine matches vertex enumeration",
        count >= 100 && bad == 0 && worst <= 1e-9,
        &format!("{count} decoding LPs, {bad} rational mismatches, worst float error {worst:.2e}"),
    );
}
