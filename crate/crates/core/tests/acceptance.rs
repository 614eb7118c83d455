//! Acceptance suite. Prints one PASS/FAIL line per criterion, then fails if
//! any criterion failed. Run with
//! `cargo test --release --test acceptance -- --nocapture`.

use std::process::Command;
use std::time::{Duration, Instant};

use lpq::bounds::{
    dyadic_variation, hoermander_classic, hoermander_upper_fun, hoermander_upper_seq, lizorkin_classic,
    lizorkin_classic_terms, lizorkin_upper_fun, lizorkin_upper_seq, marcinkiewicz_variation, necessary_lower_seq,
    tau_to_tau_upper, FunOptions,
};
use lpq::examples::{exam_h2, exam_l2, exm_h1, laz2, osc};
use lpq::netspace::{averaged_profile_seq, interval_avg_sup_seq, net_norm_seq, IntervalFamily};
use lpq::opnorm::{estimate_opnorm, witness_ratio, DiscreteMultiplier, DEFAULT_ITERS, DEFAULT_RESTARTS};
use lpq::rearrange::{lorentz_seq_norm, rearrangement_seq, IndexSet};
use lpq::symbols::{make_exponents, FunSymbol, Mode, SeqSymbol, Symbol};
use lpq::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn seq_of(s: &Symbol) -> &SeqSymbol {
    match s {
        Symbol::Seq(a) => a,
        Symbol::Fun(_) => panic!("expected a sequence symbol"),
    }
}

fn fun_of(s: &Symbol) -> &FunSymbol {
    match s {
        Symbol::Fun(f) => f,
        Symbol::Seq(_) => panic!("expected a function symbol"),
    }
}

fn random_complex(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

fn within(elapsed: Duration, limit: f64) -> bool {
    elapsed.as_secs_f64() < limit
}

fn exm_h1_block_and_classic() -> Outcome {
    let start = Instant::now();
    let x = exm_h1(2.0).unwrap();
    let opts = FunOptions {
        krange: (-5, 10),
        ..x.fun_options
    };
    let block = hoermander_upper_fun(fun_of(&x.symbol), &x.exponents, &opts).unwrap();
    let classic = hoermander_classic(&x.symbol, &x.exponents, &opts).unwrap();
    let elapsed = start.elapsed();
    let block_ok = (block.value() - 1.0).abs() <= 0.02;
    // The nested domains span 2^{kmin} .. 2^{kmax+1}, i.e. more than two decades.
    let span = 2f64.powi(opts.krange.1 + 1 - opts.krange.0);
    let classic_ok = classic.divergent && span >= 100.0;
    (
        block_ok && classic_ok && within(elapsed, 5.0),
        format!(
            "block = {:.6} (want 1 +- 2%), classic divergent = {} growth {:?} over domain span {span}, {:.2}s",
            block.value(),
            classic.divergent,
            classic.growth,
            elapsed.as_secs_f64()
        ),
    )
}

fn exam_h2_exact() -> Outcome {
    let start = Instant::now();
    let r = 2.0;
    let x = exam_h2(r, 12).unwrap();
    let a = seq_of(&x.symbol);
    let block = hoermander_upper_seq(a, &x.exponents).unwrap();
    let rows_ok = block.rows.iter().filter(|b| b.k <= 12).all(|b| (b.value - 1.0).abs() <= 1e-12);
    let mut detail = format!("{} block rows, max |row - 1| = {:.1e}", block.rows.len(), block.rows.iter().map(|b| (b.value - 1.0).abs()).fold(0.0, f64::max));
    let mut ok = rows_ok;
    let mut prev: Option<(i32, f64)> = None;
    for depth in [4, 6, 8, 10, 12] {
        let y = exam_h2(r, depth).unwrap();
        let q = hoermander_classic(&y.symbol, &y.exponents, &FunOptions::default()).unwrap();
        // Unit entries: one per block, depth + 1 of them.
        let n = (depth + 1) as f64;
        let want = n.powf(1.0 / r);
        ok &= (q.value - want).abs() <= 1e-12 && q.divergent;
        if let Some((d0, v0)) = prev {
            let scale = (n / (d0 + 1) as f64).powf(1.0 / r);
            ok &= (q.value / v0 - scale).abs() <= 1e-12;
        }
        prev = Some((depth, q.value));
        if depth == 12 {
            detail += &format!(", classic = {:.6} (want {want:.6}), divergent = {}", q.value, q.divergent);
        }
    }
    let elapsed = start.elapsed();
    (ok && within(elapsed, 1.0), format!("{detail}, {:.3}s", elapsed.as_secs_f64()))
}

fn exam_l2_jumps() -> Outcome {
    let start = Instant::now();
    let r = 2.0;
    let x = exam_l2(r, 20).unwrap();
    let a = seq_of(&x.symbol);
    let e = make_exponents(x.exponents.p, x.exponents.q, Mode::Lizorkin).unwrap();
    let dyadic = lizorkin_upper_seq(a, &e, None).unwrap();
    let rows: Vec<_> = dyadic.rows.iter().filter(|b| b.k >= 1 && b.k <= 20).collect();
    let rows_ok = rows.iter().all(|b| (b.value - 1.0).abs() <= 1e-12);
    let classic = lizorkin_classic(&x.symbol, &e, &x.fun_options).unwrap();
    let terms = lizorkin_classic_terms(a, &e);
    let mut worst: f64 = 0.0;
    for k in 1..=20 {
        let m = (1i64 << k) - 1;
        let (_, _, d) = terms.iter().copied().find(|t| t.0 == m).unwrap();
        let want = (m as f64 / (1i64 << k) as f64).powf(1.0 / r) * m as f64;
        worst = worst.max((d - want).abs() / want);
    }
    let elapsed = start.elapsed();
    let ok = rows_ok && classic.divergent && worst <= 1e-12 && within(elapsed, 1.0);
    let values: Vec<f64> = rows.iter().map(|b| b.value).collect();
    (
        ok,
        format!(
            "per-block values {:?}..(want 1), classic divergent = {}, worst rel. error of jump terms {worst:.1e}, {:.3}s",
            &values[..3],
            classic.divergent,
            elapsed.as_secs_f64()
        ),
    )
}

fn laz2_two() -> Outcome {
    let mut got = Vec::new();
    for depth in 2..=12 {
        let x = laz2(2.0, depth).unwrap();
        let e = make_exponents(x.exponents.p, x.exponents.q, Mode::Lizorkin).unwrap();
        got.push(lizorkin_upper_seq(seq_of(&x.symbol), &e, None).unwrap().value());
    }
    let ok = got.iter().all(|&v| (v - 2.0).abs() <= 1e-12);
    (ok, format!("values for depth 2..=12: {got:?}"))
}

fn oscillating() -> Outcome {
    let tau = 3.0;
    let x = osc(tau, 13).unwrap();
    let a = seq_of(&x.symbol);
    let hi = a.window_hi() + 1;
    let upper = tau_to_tau_upper(a, tau).unwrap();
    let var = dyadic_variation(a);
    let at = |n: i32| var.iter().find(|v| v.0 == n).map(|v| v.1).unwrap();
    let (v4, v12) = (at(4), at(12));
    let marc = marcinkiewicz_variation(a);
    let ok = upper.value() <= 1.0 + 1e-12 && v12 >= 10.0 * v4 && marc.divergent;
    (
        ok,
        format!(
            "window {hi}: tau-to-tau block = {:.6} (want <= 1), variation n=4 {v4:.3}, n=12 {v12:.3} ({:.1}x), divergent = {}",
            upper.value(),
            v12 / v4,
            marc.divergent
        ),
    )
}

fn two_two_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let n = 1024;
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let lo = rng.gen_range(-256..=0);
        let hi = rng.gen_range(0..=256);
        let v = random_complex(&mut rng, (hi - lo + 1) as usize);
        let a = SeqSymbol::new(lo, v, false).unwrap();
        let t = DiscreteMultiplier::periodic(&a, n).unwrap();
        let est = estimate_opnorm(&t, 2.0, 2.0, DEFAULT_ITERS, DEFAULT_RESTARTS, i).unwrap();
        worst = worst.max((est.value - a.max_abs()).abs());
    }
    (worst <= 1e-9, format!("max |estimate - max|lambda|| = {worst:.2e} over 50 symbols"))
}

fn sup_form_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut mismatches = 0;
    for _ in 0..100 {
        let n = rng.gen_range(1..=128);
        let a = SeqSymbol::new(-rng.gen_range(0..n as i64), random_complex(&mut rng, n), false).unwrap();
        let p = rng.gen_range(1.05..8.0);
        let prof = averaged_profile_seq(&a, &IntervalFamily::All);
        if prof.weighted_sup(p) != net_norm_seq(&a, p, &IntervalFamily::All).unwrap() {
            mismatches += 1;
        }
    }
    (mismatches == 0, format!("{mismatches} of 100 differ"))
}

fn brute_force_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut bad = 0;
    for _ in 0..200 {
        let n = rng.gen_range(1..=64);
        let v = random_complex(&mut rng, n);
        let a = SeqSymbol::new(-rng.gen_range(0..n as i64), v.clone(), false).unwrap();
        let p = rng.gen_range(1.05..8.0);
        let mut sums = Vec::new();
        for i in 0..n {
            for j in i..n {
                let mut s = Complex64::new(0.0, 0.0);
                for x in &v[i..=j] {
                    s += x;
                }
                sums.push(((j - i + 1) as f64, s.norm()));
            }
        }
        let net = sums.iter().map(|&(l, s)| l.powf(1.0 / p) * (s / l)).fold(0.0, f64::max);
        bad += (net_norm_seq(&a, p, &IntervalFamily::All).unwrap() != net) as usize;
        for t in 1..=n {
            let want = sums
                .iter()
                .filter(|&&(l, _)| l >= t as f64)
                .map(|&(l, s)| s / l)
                .fold(0.0, f64::max);
            bad += (interval_avg_sup_seq(&a, t, &IntervalFamily::All).unwrap().value != want) as usize;
        }
        let mut sorted: Vec<f64> = v.iter().map(|z| z.norm()).collect();
        sorted.sort_by(|x, y| y.total_cmp(x));
        bad += (rearrangement_seq(&a) != sorted) as usize;
    }
    (bad == 0, format!("{bad} mismatches over 200 sequences"))
}

fn restriction_contraction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut bad = 0;
    for _ in 0..100 {
        let n = rng.gen_range(1..=300);
        let a = SeqSymbol::new(-rng.gen_range(0..n as i64), random_complex(&mut rng, n), false).unwrap();
        let p = rng.gen_range(1.05..2.0);
        let q = rng.gen_range(2.0..8.0);
        let e = make_exponents(p, q, Mode::Hoermander).unwrap();
        let block = hoermander_upper_seq(&a, &e).unwrap().value();
        let global = lorentz_seq_norm(&a, e.r, f64::INFINITY, &IndexSet::All).unwrap();
        bad += (block > global) as usize;
    }
    (bad == 0, format!("{bad} of 100 violate block <= global"))
}

fn lizorkin_dyadic_vs_classic() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let c = rng.gen_range(0.5..3.0);
        let s = rng.gen_range(0.2..3.0);
        let m: i32 = rng.gen_range(1..=3);
        let f = FunSymbol::real(move |x: f64| if x > 0.0 { c * x.powi(m) * (-s * x).exp() } else { 0.0 })
            .with_derivative(move |x: f64| {
                if x > 0.0 {
                    c * (m as f64 * x.powi(m - 1) - s * x.powi(m)) * (-s * x).exp()
                } else {
                    0.0
                }
            })
            .unwrap()
            .with_vanishing(true);
        let p = rng.gen_range(1.1..3.0);
        let q = p * rng.gen_range(1.2..4.0);
        let e = make_exponents(p, q, Mode::Lizorkin).unwrap();
        let opts = FunOptions::default();
        let dyadic = lizorkin_upper_fun(&f, &e, &opts).unwrap().value();
        let classic = lizorkin_classic(&Symbol::Fun(f), &e, &opts).unwrap().value;
        let factor = e.r * (1.0 - 2f64.powf(-1.0 / e.r));
        worst = worst.max(dyadic / (classic * factor));
    }
    (worst <= 1.0 + 1e-6, format!("max dyadic / (classic * r(1 - 2^(-1/r))) = {worst:.6}"))
}

fn witness_band() -> Outcome {
    let e = make_exponents(4.0 / 3.0, 4.0, Mode::Hoermander).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut symbols = vec![seq_of(&exam_h2(2.0, 8).unwrap().symbol).clone()];
    for _ in 0..20 {
        let v: Vec<f64> = (0..512).map(|_| rng.gen_range(0.01..1.0)).collect();
        symbols.push(SeqSymbol::from_real(0, &v, false).unwrap());
    }
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let mut count = 0;
    for a in &symbols {
        for k in 0..=8 {
            let (b0, b1) = (1i64 << k, (1i64 << (k + 1)) - 1);
            let mut intervals = vec![(b0, b1)];
            for _ in 0..3 {
                let x = rng.gen_range(b0..=b1);
                let y = rng.gen_range(b0..=b1);
                intervals.push((x.min(y), x.max(y)));
            }
            for (i, j) in intervals {
                let n = ((8 * j) as usize).next_power_of_two().max(64);
                let w = witness_ratio(a, (i, j), e.p, e.q, n).unwrap();
                let sum: Complex64 = (i..=j).map(|m| a.get(m)).sum();
                let len = (j - i + 1) as f64;
                let formula = len.powf(-e.inv_r_conj()) * sum.norm();
                let ratio = w / formula;
                lo = lo.min(ratio);
                hi = hi.max(ratio);
                count += 1;
            }
        }
    }
    (
        lo >= 0.1 && hi <= 10.0,
        format!("{count} intervals, witness / formula in [{lo:.3}, {hi:.3}] (band [0.1, 10])"),
    )
}

fn lpq(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_lpq")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn homogeneity_and_determinism() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let e = make_exponents(4.0 / 3.0, 4.0, Mode::Hoermander).unwrap();
    let liz = make_exponents(4.0 / 3.0, 4.0, Mode::Lizorkin).unwrap();
    let opts = FunOptions::default();
    let mut bad = Vec::new();
    for trial in 0..10 {
        let n = rng.gen_range(2..=200);
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a = SeqSymbol::from_real(-rng.gen_range(0..n as i64), &v, true).unwrap();
        let bounds = |a: &SeqSymbol| {
            let s = Symbol::Seq(a.clone());
            vec![
                hoermander_upper_seq(a, &e).unwrap().value(),
                hoermander_classic(&s, &e, &opts).unwrap().value,
                lizorkin_upper_seq(a, &liz, None).unwrap().value(),
                lizorkin_classic(&s, &liz, &opts).unwrap().value,
                necessary_lower_seq(a, &e).unwrap().value,
                tau_to_tau_upper(a, 3.0).unwrap().value(),
                marcinkiewicz_variation(a).value,
            ]
        };
        let base = bounds(&a);
        for c in [-4.0, 0.5, 8.0] {
            let scaled = bounds(&a.scale(Complex64::new(c, 0.0)));
            for (i, (x, y)) in base.iter().zip(&scaled).enumerate() {
                if *y != f64::abs(c) * x {
                    bad.push(format!("trial {trial} bound {i} c {c}"));
                }
            }
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("traj.csv");
    let csv = csv.to_str().unwrap();
    let runs: Vec<(i32, Vec<u8>)> = (0..2)
        .flat_map(|_| {
            [
                lpq(&["report", "--example", "examH2", "--depth", "8", "--p", "4/3", "--q", "4", "--N", "2048", "--restarts", "4", "--seed", "5"]),
                lpq(&["opnorm", "--example", "Laz2", "--p", "3/2", "--q", "3", "--N", "1024", "--restarts", "4", "--seed", "5", "--trajectory-csv", csv]),
            ]
        })
        .collect();
    let identical = runs[0] == runs[2] && runs[1] == runs[3] && runs.iter().all(|r| r.0 == 0 && !r.1.is_empty());
    (
        bad.is_empty() && identical,
        format!("{} homogeneity violations, repeated CLI runs identical = {identical}", bad.len()),
    )
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 12] = [
        ("exmH1 block value and classic divergence", exm_h1_block_and_classic),
        ("examH2 block and global values", exam_h2_exact),
        ("examL2 dyadic jumps and classic terms", exam_l2_jumps),
        ("Laz2 dyadic value", laz2_two),
        ("oscillating tau-to-tau bound and variation", oscillating),
        ("2 -> 2 estimate equals max |lambda|", two_two_identity),
        ("profile sup equals net norm", sup_form_equivalence),
        ("brute-force oracles", brute_force_oracles),
        ("block restriction contraction", restriction_contraction),
        ("Lizorkin dyadic vs classic", lizorkin_dyadic_vs_classic),
        ("witness ratio band", witness_band),
        ("homogeneity and determinism", homogeneity_and_determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (ok, detail) = check();
        println!("criterion {:>2} {}: {name}: {detail}", i + 1, if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
