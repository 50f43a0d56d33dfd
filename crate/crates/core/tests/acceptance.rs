//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use num_rational::Ratio;
use qupdate_core::campaign::{preset, run_campaign, MessagePolicy};
use qupdate_core::css::{qudits_per_helper, CssCode, Sample};
use qupdate_core::field::{FieldMatrix, PrimeField};
use qupdate_core::mds::MdsCode;
use qupdate_core::protocol::{bandwidth_report, PauliExponents, ProtocolInstance};
use qupdate_core::qsim::{apply_pauli, StateVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Tolerances and sizes.
const EXAMPLE_RUNTIME_S: f64 = 1.0;
const EIGEN_RESIDUAL: f64 = 1e-8;
const GRID_MIN_TOTAL: u64 = 8_000_000;
const GRID_MIN_RANDOM: u64 = 100_000;
const GRID_BUDGET: u64 = 10_000_000;
const GENERAL_MIN_CONFIGS: usize = 21;
const GENERAL_MIN_PER_CONFIG: u64 = 100_000;
const GENERAL_MIN_TOTAL: u64 = 2_000_000;
const SZ_SEEDS: u64 = 10_000;
const NOISE_MIN_TRIALS: u64 = 100_000;
const NOISE_P: [f64; 4] = [0.0, 0.5, 0.9, 0.99];
const PROPERTY_INSTANCES: usize = 1_000;
const PHASE_TOL: f64 = 1e-12;

type Outcome = Result<String, String>;

fn check(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn modpow(b: i64, mut e: i64, q: i64) -> i64 {
    let (mut r, mut b) = (1, b.rem_euclid(q));
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % q;
        }
        b = b * b % q;
        e >>= 1;
    }
    r
}

fn c1_example() -> Outcome {
    let t = Instant::now();
    let r = run_campaign(&preset("paper-example").unwrap()).map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    check(r.totals.cases == 625, format!("{} cases", r.totals.cases))?;
    check(r.totals.failures == 0, format!("{} failures", r.totals.failures))?;
    check(secs < EXAMPLE_RUNTIME_S, format!("took {secs:.3}s"))?;
    Ok(format!("625 cases, 0 failures, {secs:.3}s"))
}

fn c2_quantum() -> Outcome {
    let t = Instant::now();
    let r = run_campaign(&preset("paper-quantum").unwrap()).map_err(|e| e.to_string())?;
    check(r.totals.cases == 1250, format!("{} cases", r.totals.cases))?;
    check(r.totals.failures == 0, format!("{} failures", r.totals.failures))?;
    let params: Vec<Option<u32>> = preset("paper-quantum").unwrap().configurations.iter().map(|c| c.css_param).collect();
    check(params == vec![Some(1), Some(2)], "expected two Bell-pair parameters")?;
    let worst = r.configurations.iter().filter_map(|c| c.max_residual).fold(0.0, f64::max);
    check(r.configurations.iter().all(|c| c.max_residual.is_some()), "quantum oracle did not run")?;
    check(worst < EIGEN_RESIDUAL, format!("residual {worst:e}"))?;
    Ok(format!("1,250 quantum cases, 0 mismatches, max residual {worst:.1e}, {:.2}s", t.elapsed().as_secs_f64()))
}

fn c3_grid() -> Outcome {
    let t = Instant::now();
    let spec = preset("paper-grid").unwrap();
    check(spec.budget == GRID_BUDGET, "budget")?;
    check(spec.messages == MessagePolicy::Auto { count: GRID_MIN_RANDOM }, "message policy")?;
    let r = run_campaign(&spec).map_err(|e| e.to_string())?;
    let mut grid_pairs = Vec::new();
    for c in &r.configurations {
        let q = c.q as u128;
        let space = q.pow((c.alpha * c.k) as u32);
        let per = if space <= GRID_BUDGET as u128 { space as u64 } else { GRID_MIN_RANDOM };
        check(c.messages_per_choice == per, format!("{}: {} messages per choice", c.label, c.messages_per_choice))?;
        let binom = (0..c.k).fold(1usize, |acc, i| acc * (c.n - i) / (i + 1));
        check(c.helper_choices == binom * (c.n - c.k), format!("{}: {} choices", c.label, c.helper_choices))?;
        if c.mds == "interleaved-rs" {
            grid_pairs.push((c.n, c.k, c.q));
        }
    }
    for (n, k) in [(3, 2), (4, 2), (5, 3), (6, 4)] {
        for q in [5u32, 7, 11, 13] {
            check(grid_pairs.contains(&(n, k, q)) || (q as usize) < n, format!("missing ({n},{k}) q={q}"))?;
        }
    }
    check(r.totals.cases > GRID_MIN_TOTAL, format!("{} cases", r.totals.cases))?;
    check(r.totals.failures == 0, format!("{} failures", r.totals.failures))?;
    Ok(format!(
        "{} cases over {} configurations, 0 failures, {:.1}s",
        r.totals.cases,
        r.totals.configurations,
        t.elapsed().as_secs_f64()
    ))
}

fn c4_general_alpha() -> Outcome {
    let t = Instant::now();
    let r = run_campaign(&preset("paper-general-alpha").unwrap()).map_err(|e| e.to_string())?;
    check(r.configurations.len() >= GENERAL_MIN_CONFIGS, format!("{} configurations", r.configurations.len()))?;
    for c in &r.configurations {
        check((2..=6).contains(&c.alpha) && c.k <= 4 && c.q <= 11, format!("{} outside the grid", c.label))?;
        check(c.q as usize > qudits_per_helper(c.alpha) * c.k, format!("{}: q too small", c.label))?;
        check(c.cases_run >= GENERAL_MIN_PER_CONFIG, format!("{}: {} cases", c.label, c.cases_run))?;
    }
    let mut alphas: Vec<usize> = r.configurations.iter().map(|c| c.alpha).collect();
    alphas.dedup();
    check(alphas == vec![2, 3, 4, 5, 6], format!("alphas {alphas:?}"))?;
    check(r.totals.cases >= GENERAL_MIN_TOTAL, format!("{} cases", r.totals.cases))?;
    check(r.totals.failures == 0, format!("{} failures", r.totals.failures))?;
    Ok(format!(
        "{} configurations, {} cases, 0 failures, {:.1}s",
        r.configurations.len(),
        r.totals.cases,
        t.elapsed().as_secs_f64()
    ))
}

fn c5_worked_example() -> Outcome {
    let f = PrimeField::new(7).unwrap();
    let general = CssCode::build_css_general(3, 3, 7).map_err(|e| e.to_string())?;
    let h_z = FieldMatrix::from_rows(f, &[[1, 1, 1, 1, 1, 1], [1, 2, 3, 4, 5, 6]]).unwrap();
    check(general.h_z() == &h_z, "H_Z differs")?;
    check(h_z.kernel_basis().len() == 4, "ker H_Z is not 4-dimensional")?;
    let h_x = FieldMatrix::from_rows(f, &[[6, 6, 1, 6, 1, 1]]).unwrap();
    let code = CssCode::from_parts(3, 3, h_x, h_z).map_err(|e| e.to_string())?;
    check(code.check_dual_containment(), "dual containment")?;
    check(code.check_subblock_ranks(), "subblock ranks")?;
    for h in 0..3 {
        let m = code.transfer_matrix(h).map_err(|e| e.to_string())?.matrix;
        check((m.rows(), m.cols(), m.rank()) == (3, 4, 3), format!("M_{h} is {}x{} rank {}", m.rows(), m.cols(), m.rank()))?;
    }
    let mds = MdsCode::build_interleaved_rs(4, 3, 3, 7).map_err(|e| e.to_string())?;
    let inst = ProtocolInstance::bind(mds, code, &[0, 1, 2], 3).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(57);
    for _ in 0..1000 {
        let mp: Vec<u32> = (0..9).map(|_| rng.random_range(0..7)).collect();
        check(inst.run_update(&mp, &mp).map_err(|e| e.to_string())?.correct, "round with the explicit H_X failed")?;
    }
    Ok("H_Z matches, H_X = (6,6,1,6,1,1) valid, three 3x4 rank-3 transfer matrices".into())
}

fn c6_factorization() -> Outcome {
    let mut fixtures = 0;
    for c in preset("paper-general-alpha").unwrap().configurations {
        let code = CssCode::build_css_general(c.alpha, c.k, c.q).map_err(|e| e.to_string())?;
        let q = c.q as i64;
        let beta = qudits_per_helper(c.alpha);
        let n_q = (beta * c.k) as i64;
        let r_z = c.alpha - beta;
        let w = |j: i64| (1..=n_q).filter(|&m| m != j).fold(1i64, |acc, m| acc * (j - m).rem_euclid(q) % q);
        for h in 0..c.k {
            let a: Vec<i64> = (0..beta).map(|m| (h * beta + m + 1) as i64).collect();
            for i in 0..r_z {
                for m in 0..beta {
                    let v = modpow(a[m], i as i64, q);
                    let d = modpow(w(a[m]), q - 2, q);
                    let expect = (v * d % q) as u32;
                    let got = code.h_x().get(i, h * beta + m);
                    check(got == expect, format!("alpha={} k={} q={}: H_X[{i},{}] = {got}, V D gives {expect}", c.alpha, c.k, c.q, h * beta + m))?;
                }
            }
        }
        fixtures += 1;
    }
    Ok(format!("H_X|I_h = V_h D_h entrywise on {fixtures} fixtures"))
}

fn c7_converse() -> Outcome {
    let r = run_campaign(&preset("paper-converse").unwrap()).map_err(|e| e.to_string())?;
    let mut mds_checks = 0;
    let mut negatives = 0;
    for c in &r.converse {
        if c.negative {
            negatives += 1;
            check(c.non_injective > 0, format!("{}: negative fixture passed", c.label))?;
        } else {
            for item in &c.items {
                check(item.injective, format!("{}: helper {} not injective", c.label, item.helper))?;
                check(item.image_size == item.target, format!("{}: image {}", c.label, item.image_size))?;
                mds_checks += 1;
            }
        }
    }
    for c in preset("paper-converse").unwrap().configurations.iter().filter(|c| !c.negative) {
        let target = (c.q as u64).pow(c.alpha as u32);
        let rec = r.converse.iter().find(|x| x.label == c.label()).ok_or("missing record")?;
        check(rec.items.iter().all(|i| i.target == target), format!("{}: target != q^alpha", c.label()))?;
    }
    check(negatives == 1, "negative fixture missing")?;
    check(r.totals.converse_failures == 0, "unexpected converse verdicts")?;
    Ok(format!("{mds_checks} MDS checks injective with image q^alpha, non-MDS fixture rejected"))
}

fn c8_schwartz_zippel() -> Outcome {
    let mut lines = Vec::new();
    for (alpha, k, q) in [(3, 3, 7), (3, 2, 5), (4, 2, 5), (4, 3, 7), (5, 2, 7), (6, 2, 7), (2, 4, 5)] {
        let r_z = alpha - qudits_per_helper(alpha);
        let mut rejected = 0u64;
        for seed in 0..SZ_SEEDS {
            match CssCode::sample_css_random(alpha, k, q, seed).map_err(|e| e.to_string())? {
                Sample::Accepted(code) => check(code.check_dual_containment(), "accepted sample breaks containment")?,
                Sample::Rejected => rejected += 1,
            }
        }
        let bound = (k * r_z) as f64 / q as f64;
        let sigma = (bound * (1.0 - bound) / SZ_SEEDS as f64).sqrt();
        let frac = rejected as f64 / SZ_SEEDS as f64;
        check(frac <= bound + 3.0 * sigma, format!("({alpha},{k},{q}): rejection {frac:.4} > {bound:.4} + 3 sigma"))?;
        lines.push(format!("({alpha},{k},{q}) {frac:.3}<={bound:.3}"));
    }
    Ok(lines.join(", "))
}

fn c9_noise() -> Outcome {
    let spec = preset("paper-noise").unwrap();
    let noise = spec.noise.clone().ok_or("no noise suite")?;
    check(noise.trials >= NOISE_MIN_TRIALS && noise.p == NOISE_P, "noise parameters")?;
    let c = &spec.configurations[0];
    check((c.alpha, c.q) == (2, 5), "configuration")?;
    let r = run_campaign(&spec).map_err(|e| e.to_string())?;
    check(r.noise.len() == NOISE_P.len(), "missing noise points")?;
    let mut parts = Vec::new();
    for n in &r.noise {
        let expected = n.p + (1.0 - n.p) / 25.0;
        let sigma = (expected * (1.0 - expected) / n.trials as f64).sqrt();
        check((n.expected - expected).abs() < 1e-15, "expected rate formula")?;
        check((n.rate - expected).abs() <= 3.0 * sigma, format!("p={}: rate {} vs {expected}", n.p, n.rate))?;
        parts.push(format!("p={} {:.4}", n.p, n.rate));
    }
    Ok(parts.join(", "))
}

fn c10_bandwidth() -> Outcome {
    let mut checked = 0;
    for alpha in 2..=12usize {
        for k in 2..=6 {
            for q in [5u32, 7, 11, 13] {
                let r = bandwidth_report(alpha, k, q);
                let expect = if alpha % 2 == 0 {
                    Ratio::from_integer(2u64)
                } else {
                    Ratio::new(2 * alpha as u64, alpha as u64 + 1)
                };
                check(r.ratio_exact() == expect, format!("alpha={alpha}: ratio {}", r.ratio_exact()))?;
                let log_q = (q as f64).log2();
                check((r.quantum_bits_equiv - (alpha.div_ceil(2) * k) as f64 * log_q).abs() < 1e-9, "quantum bits")?;
                check((r.classical_lb_bits - (alpha * k) as f64 * log_q).abs() < 1e-9, "classical bits")?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} parameter sets, ratio 2 (even) and 2a/(a+1) (odd)"))
}

fn random_instance(rng: &mut ChaCha8Rng) -> ProtocolInstance {
    loop {
        let alpha = rng.random_range(2..=6);
        let k = rng.random_range(2..=4);
        let q = [5u32, 7, 11, 13][rng.random_range(0..4)];
        let n = k + rng.random_range(1..=2);
        if q as usize <= qudits_per_helper(alpha) * k || (q as usize) < n {
            continue;
        }
        let mds = MdsCode::build_interleaved_rs(n, k, alpha, q).unwrap();
        let css = CssCode::build_css_general(alpha, k, q).unwrap();
        let mut nodes: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            nodes.swap(i, rng.random_range(0..=i));
        }
        return ProtocolInstance::bind(mds, css, &nodes[..k], nodes[k]).unwrap();
    }
}

fn c11_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..PROPERTY_INSTANCES {
        let inst = random_instance(&mut rng);
        let f = inst.field();
        let q = f.modulus();
        let css = inst.css();
        let alpha = css.alpha();
        let b = inst.mds().message_len();
        let rand_vec = |rng: &mut ChaCha8Rng, n: usize| -> Vec<u32> { (0..n).map(|_| rng.random_range(0..q)).collect() };
        let h = rng.random_range(0..inst.helpers().len());
        let node = inst.helpers()[h];

        // Obliviousness: two messages with equal share at helper h.
        let m1 = rand_vec(&mut rng, b);
        let g = inst.mds().generator(node).unwrap();
        let kernel = g.kernel_basis();
        let mut m2 = m1.clone();
        for v in &kernel {
            let c = rng.random_range(0..q);
            m2 = f.add_vec(&m2, &v.iter().map(|&x| f.mul(c, x)).collect::<Vec<_>>());
        }
        let e1 = &inst.encode_all(&m1).unwrap()[h];
        let e2 = &inst.encode_all(&m2).unwrap()[h];
        check(e1 == e2, "helper output depends on more than its share")?;

        // Linearity.
        let (d1, d2, c) = (rand_vec(&mut rng, alpha), rand_vec(&mut rng, alpha), rng.random_range(0..q));
        let comb: Vec<u32> = d1.iter().zip(&d2).map(|(&x, &y)| f.add(f.mul(c, x), y)).collect();
        let (a, bb, ab) = (inst.helper_encode(h, &d1).unwrap(), inst.helper_encode(h, &d2).unwrap(), inst.helper_encode(h, &comb).unwrap());
        let lin = |u: &[u32], v: &[u32]| -> Vec<u32> { u.iter().zip(v).map(|(&x, &y)| f.add(f.mul(c, x), y)).collect() };
        check(ab.x == lin(&a.x, &bb.x) && ab.z == lin(&a.z, &bb.z), "encoding is not linear")?;

        // Logical-operator invariance.
        let mp = rand_vec(&mut rng, b);
        let enc = inst.encode_all(&mp).unwrap();
        let base = inst.syndrome_extract(&enc).unwrap();
        let beta = css.beta();
        let shift = |enc: &[PauliExponents], v: &[u32], on_x: bool| -> Vec<PauliExponents> {
            enc.iter()
                .map(|e| {
                    let mut e = e.clone();
                    let target = if on_x { &mut e.x } else { &mut e.z };
                    for (t, o) in target.iter_mut().zip(&v[e.helper * beta..]) {
                        *t = f.add(*t, *o);
                    }
                    e
                })
                .collect()
        };
        for v in css.h_z().kernel_basis() {
            let s = inst.syndrome_extract(&shift(&enc, &v, true)).unwrap();
            check(s.s_x == base.s_x, "ker H_Z shift changed s_X")?;
        }
        for w in css.h_x().kernel_basis() {
            let s = inst.syndrome_extract(&shift(&enc, &w, false)).unwrap();
            check(s.s_z == base.s_z, "ker H_X shift changed s_Z")?;
        }

        // Dual containment, including a random-kernel sample.
        check(css.check_dual_containment(), "H_X H_Z^T != 0")?;
        if let Sample::Accepted(s) = CssCode::sample_css_random(alpha, css.k(), q, rng.random()).unwrap() {
            check(s.check_dual_containment(), "sampled code breaks containment")?;
        }

        // Pauli commutation phase on a random two-qudit state.
        let qs = [5u32, 7][rng.random_range(0..2)];
        let amps: Vec<Complex64> =
            (0..qs * qs).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        let psi = StateVector::from_amplitudes(qs, 2, amps).unwrap();
        let (pa, pb, qd) = (rng.random_range(0..qs), rng.random_range(0..qs), rng.random_range(0..2));
        let xz = apply_pauli(&psi, qd, pa, pb);
        let zx = apply_pauli(&apply_pauli(&psi, qd, pa, 0), qd, 0, pb);
        let phase = Complex64::from_polar(1.0, std::f64::consts::TAU * ((pa * pb) % qs) as f64 / qs as f64);
        let dev = zx.amplitudes().iter().zip(xz.amplitudes()).map(|(u, v)| (u - phase * v).norm()).fold(0.0, f64::max);
        check(dev < PHASE_TOL, format!("commutation phase off by {dev:e}"))?;
        check((xz.norm() - 1.0).abs() < PHASE_TOL, "apply_pauli changed the norm")?;
    }
    Ok(format!("{PROPERTY_INSTANCES} random instances, 0 violations"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("(3,2) exhaustive over F_5", c1_example),
        ("(3,2) quantum oracle, two CSS choices", c2_quantum),
        ("grid of (n,k) and q", c3_grid),
        ("general-alpha grid", c4_general_alpha),
        ("alpha=3, k=3, q=7 fixture", c5_worked_example),
        ("explicit H_X factorization", c6_factorization),
        ("converse injectivity", c7_converse),
        ("random H_X rejection bound", c8_schwartz_zippel),
        ("noisy shared state", c9_noise),
        ("bandwidth ratio", c10_bandwidth),
        ("property suites", c11_properties),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(msg) => println!("criterion {:>2} PASS  {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
