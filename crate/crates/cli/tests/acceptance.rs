//! Acceptance criteria, one line of output per criterion.
//!
//! Run with `cargo test -p easym-cli --test acceptance --release` for the
//! fastest turnaround; the quench criteria diagonalize L = 12 chains.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use easym::analysis::{detect_crossing, find_peak, late_time_average, power_law_fit, DEFAULT_MIN_PERSISTENCE};
use easym::circuit::{ensemble_average, sample_haar_unitary, sample_u1_gate, CircuitConfig, EnsembleSeries};
use easym::evolution::{evolve_krylov, trajectory, uniform_grid, window_grid, KrylovConfig, Propagator, SpectralPropagator};
use easym::hamiltonian::build_hamiltonian;
use easym::observables::{
    dephased_entropy, entanglement_asymmetry, reduced_density_matrix, sector_project, von_neumann_entropy,
};
use easym::oracles::{early_time_cv, tilted_product_ea};
use easym::state::build_initial_state;
use easym::{HamiltonianParams, Pattern, Probe, ProductStateSpec, Region, StateVector, Symmetry, TimeSeries, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

const L: usize = 12;
const PATTERNS: [Pattern; 3] = [Pattern::Ferromagnetic, Pattern::Antiferromagnetic, Pattern::DomainWall];

fn ea_u1(region: &Region) -> Probe {
    Probe::Asymmetry { region: region.clone(), symmetry: Symmetry::U1 }
}

fn series(prop: Propagator<'_>, spec: ProductStateSpec, num_sites: usize, times: &[f64], probe: Probe) -> TimeSeries {
    let s = build_initial_state(&spec, num_sites).unwrap();
    trajectory(prop, &s, times, &[probe]).unwrap()[0].time_series().unwrap()
}

fn ferro(theta_pi: f64) -> ProductStateSpec {
    ProductStateSpec::new(Pattern::Ferromagnetic, theta_pi * PI)
}

fn criterion_1() -> Outcome {
    let times = uniform_grid(20.0, 0.05).unwrap();
    let region = Region::contiguous(0, 8 / 3, 8).unwrap();
    let mut worst: f64 = 0.0;
    for params in [HamiltonianParams::h1(8, 1.0), HamiltonianParams::h2(8, 1.0)] {
        let sp = SpectralPropagator::from_pauli_sum(&build_hamiltonian(&params).unwrap()).unwrap();
        for pattern in PATTERNS {
            for r in [region.clone(), Region::contiguous(3, 3, 8).unwrap()] {
                let s = series(Propagator::Spectral(&sp), ProductStateSpec::untilted(pattern), 8, &times, ea_u1(&r));
                worst = s.values().iter().fold(worst, |m, v| m.max(v.abs()));
            }
        }
    }
    outcome(worst <= 1e-10, format!("max |EA| = {worst:.2e}"))
}

/// Quench results at L = 12 for one γ, so each diagonalization is done once.
#[derive(Default)]
struct QuenchData {
    /// Untilted ferromagnet, third of the chain, t ≤ 20.
    peak: Option<(f64, f64)>,
    /// Mean EA over [200, 2000].
    late: Option<f64>,
    crossing: Option<Option<f64>>,
    /// Worst relative deviation from the charge-variance expansion.
    cv_error: Option<f64>,
}

fn quench_data(gamma: f64) -> QuenchData {
    let h = build_hamiltonian(&HamiltonianParams::h1(L, gamma)).unwrap();
    let sp = SpectralPropagator::from_pauli_sum(&h).unwrap();
    let prop = Propagator::Spectral(&sp);
    let third = Region::contiguous(0, L / 3, L).unwrap();
    let quarter = Region::contiguous(0, L / 4, L).unwrap();
    let mut out = QuenchData::default();
    if [0.9, 0.7, 0.5, 0.3].contains(&gamma) {
        let early = series(prop, ferro(0.0), L, &uniform_grid(20.0, 0.05).unwrap(), ea_u1(&third));
        out.peak = Some(find_peak(&early).unwrap());
    }
    if gamma == 0.5 {
        let late = series(prop, ferro(0.0), L, &window_grid(200.0, 2000.0, 2000).unwrap(), ea_u1(&third));
        out.late = Some(late_time_average(&late, (200.0, 2000.0)).unwrap().0);
    }
    if [1.0, 0.9, 0.5].contains(&gamma) {
        let times = uniform_grid(60.0, 0.05).unwrap();
        let less = series(prop, ferro(0.2), L, &times, ea_u1(&quarter));
        let more = series(prop, ferro(0.5), L, &times, ea_u1(&quarter));
        out.crossing = Some(detect_crossing(&less, &more, DEFAULT_MIN_PERSISTENCE).unwrap().t_cross);
    }
    if [0.6, 0.7].contains(&gamma) {
        let times = uniform_grid(0.3, 0.01).unwrap();
        let mut worst: f64 = 0.0;
        for theta_pi in [0.2, 0.5] {
            let cv = series(prop, ferro(theta_pi), L, &times, Probe::ChargeVariance);
            for (&t, &v) in cv.times().iter().zip(cv.values()) {
                let want = early_time_cv(theta_pi * PI, gamma, 0.4, L, t);
                worst = worst.max((v - want).abs() / v.abs());
            }
        }
        out.cv_error = Some(worst);
    }
    out
}

fn criterion_2(q: &BTreeMap<&str, QuenchData>) -> Outcome {
    let errs: Vec<f64> = ["0.6", "0.7"].iter().map(|g| q[g].cv_error.unwrap()).collect();
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    outcome(worst < 0.02, format!("max relative deviation {:.3}% (gamma 0.6, 0.7: {:.3}%, {:.3}%)", 100.0 * worst, 100.0 * errs[0], 100.0 * errs[1]))
}

fn criterion_3() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 0..=5 {
        let theta = 0.1 * PI * k as f64;
        let s = build_initial_state(&ProductStateSpec::new(Pattern::Ferromagnetic, theta), L).unwrap();
        for n in 1..=6 {
            for start in [0, 5] {
                let ea = entanglement_asymmetry(&s, &Region::contiguous(start, n, L).unwrap(), Symmetry::U1).unwrap();
                worst = worst.max((ea - tilted_product_ea(n, theta).unwrap()).abs());
            }
        }
    }
    outcome(worst <= 1e-10, format!("max deviation {worst:.2e}"))
}

fn criterion_4(q: &BTreeMap<&str, QuenchData>) -> Outcome {
    let d = &q["0.5"];
    let (t, peak) = d.peak.unwrap();
    let late = d.late.unwrap();
    outcome(
        peak >= 1.5 * late && late > 0.01,
        format!("peak {peak:.4} at t = {t:.2}, late mean {late:.4}, ratio {:.2}", peak / late),
    )
}

fn criterion_5(q: &BTreeMap<&str, QuenchData>) -> Outcome {
    let peaks: Vec<f64> = ["0.9", "0.7", "0.5", "0.3"].iter().map(|g| q[g].peak.unwrap().1).collect();
    let increasing = peaks.windows(2).all(|w| w[1] > w[0]);
    outcome(increasing, format!("peaks along gamma 0.9, 0.7, 0.5, 0.3: {peaks:.4?}"))
}

fn criterion_6(q: &BTreeMap<&str, QuenchData>) -> Outcome {
    let c = |g: &str| q[g].crossing.unwrap();
    let pass = c("1.0").is_some() && c("0.9").is_some() && c("0.5").is_none();
    outcome(pass, format!("t_cross: gamma 1.0 {:?}, 0.9 {:?}, 0.5 {:?}", c("1.0"), c("0.9"), c("0.5")))
}

fn criterion_7() -> Outcome {
    let l = 10;
    let times = uniform_grid(20.0, 0.05).unwrap();
    let mut worst: f64 = 0.0;
    for gamma in [0.3, 0.7] {
        let sp = SpectralPropagator::from_pauli_sum(&build_hamiltonian(&HamiltonianParams::h1(l, gamma)).unwrap()).unwrap();
        for pattern in [Pattern::DomainWall, Pattern::Antiferromagnetic] {
            let s = series(Propagator::Spectral(&sp), ProductStateSpec::untilted(pattern), l, &times, Probe::ChargeMean);
            worst = s.values().iter().fold(worst, |m, v| m.max(v.abs()));
        }
    }
    outcome(worst <= 1e-10, format!("max |<Q>| = {worst:.2e}"))
}

fn circuit(p_haar: f64, depth_units: usize, seed: u64, spec: ProductStateSpec, probe: Probe) -> EnsembleSeries {
    let cfg = CircuitConfig { num_sites: L, p_haar, depth_units, master_seed: seed, n_realizations: 200 };
    let s = build_initial_state(&spec, L).unwrap();
    ensemble_average(&cfg, &s, &[probe]).unwrap().remove(0)
}

fn peak_of(e: &EnsembleSeries) -> f64 {
    e.mean.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

fn criteria_8_and_10() -> (Outcome, Outcome) {
    let quarter = Region::contiguous(0, L / 4, L).unwrap();
    let af = ProductStateSpec::untilted(Pattern::Antiferromagnetic);
    let ps = [0.05, 0.1, 0.2, 0.3, 0.5];
    let runs: Vec<EnsembleSeries> = ps.iter().map(|&p| circuit(p, 40, 2024, af, ea_u1(&quarter))).collect();
    let peaks: Vec<f64> = runs.iter().map(peak_of).collect();

    let r = &runs[3];
    let last = *r.mean.last().unwrap();
    let c8 = outcome(
        last < 0.05 && last < 0.1 * peaks[3],
        format!("final {last:.5} (se {:.1e}), peak {:.4}", r.std_error.last().unwrap(), peaks[3]),
    );
    let (a, b) = power_law_fit(&ps, &peaks).unwrap();
    let c10 = outcome((0.6..=1.2).contains(&b), format!("b = {b:.3}, a = {a:.3}, peaks {peaks:.4?}"));
    (c8, c10)
}

fn criterion_9() -> Outcome {
    let third = Region::contiguous(0, L / 3, L).unwrap();
    let mut worst: f64 = 0.0;
    for pattern in PATTERNS {
        let e = circuit(0.0, 24, 7, ProductStateSpec::untilted(pattern), ea_u1(&third));
        worst = e.mean.iter().chain(&e.std_error).fold(worst, |m, v| m.max(v.abs()));
    }
    outcome(worst == 0.0, format!("max |mean|, |se| = {worst:.2e}"))
}

fn criterion_11() -> Outcome {
    let quarter = Region::contiguous(0, L / 4, L).unwrap();
    let less = circuit(1.0, 20, 11, ferro(0.2), ea_u1(&quarter));
    let more = circuit(1.0, 20, 12, ferro(0.5), ea_u1(&quarter));
    let z = |k: usize| {
        let se = (less.std_error[k].powi(2) + more.std_error[k].powi(2)).sqrt();
        (more.mean[k] - less.mean[k]) / se
    };
    let at_one = z(1);
    let reversed = (1..less.mean.len()).filter(|&k| z(k) < -3.0).collect::<Vec<_>>();
    outcome(
        at_one.abs() < 3.0 && reversed.is_empty(),
        format!(
            "t=1: {:.4} vs {:.4} ({at_one:+.2} se); significant reversals at t = {reversed:?}",
            less.mean[1], more.mean[1]
        ),
    )
}

fn criterion_12() -> Outcome {
    let n = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut sum = [[0.0; 4]; 4];
    let mut sum_sq = [[0.0; 4]; 4];
    for _ in 0..n {
        let u = sample_haar_unitary(4, &mut rng).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let w = u[(i, j)].norm_sqr();
                sum[i][j] += w;
                sum_sq[i][j] += w * w;
            }
        }
    }
    let mut worst_z: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let mean = sum[i][j] / n as f64;
            let var = (sum_sq[i][j] - n as f64 * mean * mean) / (n as f64 - 1.0);
            worst_z = worst_z.max((mean - 0.25).abs() / (var / n as f64).sqrt());
        }
    }
    // two-site charge σ^z ⊗ 1 + 1 ⊗ σ^z in the local basis |00⟩, |01⟩, |10⟩, |11⟩
    let q = [2.0, 0.0, 0.0, -2.0];
    let mut worst_comm: f64 = 0.0;
    for _ in 0..n {
        let g = sample_u1_gate(&mut rng);
        for r in 0..4 {
            for c in 0..4 {
                worst_comm = worst_comm.max((g.0[r][c] * (q[c] - q[r])).norm());
            }
        }
    }
    outcome(worst_z < 3.0 && worst_comm < 1e-12, format!("max |mean - 1/4| = {worst_z:.2} sigma; max |[U, Q]| = {worst_comm:.1e}"))
}

fn random_state(l: usize, rng: &mut ChaCha8Rng) -> StateVector {
    let mut amps: Vec<C64> = (0..1 << l)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    if rng.random_bool(0.5) {
        // sparse states keep reduced states away from maximal mixing
        let keep = rng.random_range(0..amps.len());
        for (k, a) in amps.iter_mut().enumerate() {
            if k != keep && rng.random_bool(0.9) {
                *a = C64::new(0.0, 0.0);
            }
        }
    }
    StateVector::from_amplitudes(l, amps).unwrap().normalized()
}

fn random_region(l: usize, max_len: usize, rng: &mut ChaCha8Rng) -> Region {
    let mut sites: Vec<usize> = (0..l).filter(|_| rng.random_bool(0.5)).take(max_len).collect();
    if sites.is_empty() {
        sites.push(rng.random_range(0..l));
    }
    Region::new(sites, l).unwrap()
}

fn criterion_13() -> Outcome {
    const CASES: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut failures: BTreeMap<&str, usize> = BTreeMap::new();
    let mut fail = |name: &'static str, ok: bool| *failures.entry(name).or_default() += usize::from(!ok);
    for _ in 0..CASES {
        let l = rng.random_range(2..=8);
        let psi = random_state(l, &mut rng);
        let region = random_region(l, 5, &mut rng);
        let rho = reduced_density_matrix(&psi, &region).unwrap();
        let s = von_neumann_entropy(&rho).unwrap();
        let u1 = entanglement_asymmetry(&psi, &region, Symmetry::U1).unwrap();
        let z2 = entanglement_asymmetry(&psi, &region, Symmetry::Z2).unwrap();
        fail("EA >= 0", u1 >= 0.0 && z2 >= 0.0);
        fail("Z2 <= U1", z2 <= u1 + 1e-10);
        for sym in [Symmetry::U1, Symmetry::Z2] {
            let once = sector_project(&rho, sym);
            fail("idempotence", (once.entries() - sector_project(&once, sym).entries()).norm_max() == 0.0);
            fail("S(rho_Q) >= S(rho)", dephased_entropy(&rho, sym).unwrap() >= s - 1e-10);
        }
    }
    for _ in 0..CASES {
        let l = rng.random_range(1..=6);
        let psi = random_state(l, &mut rng);
        let region = random_region(l, l, &mut rng);
        let rho = reduced_density_matrix(&psi, &region).unwrap();
        let sites = region.sites();
        let local = |x: usize| sites.iter().enumerate().fold(0, |acc, (k, &s)| acc | ((x >> s) & 1) << k);
        let n = 1 << sites.len();
        let mut want = vec![C64::new(0.0, 0.0); n * n];
        let a = psi.amplitudes();
        for x in 0..a.len() {
            for y in 0..a.len() {
                if x & !region.mask() == y & !region.mask() {
                    want[local(x) * n + local(y)] += a[x] * a[y].conj();
                }
            }
        }
        let ok = (0..n * n).all(|k| (rho.get(k / n, k % n) - want[k]).norm() < 1e-12);
        fail("partial trace", ok);
    }
    let mut cache: BTreeMap<(usize, usize), (easym::PauliSum, SpectralPropagator)> = BTreeMap::new();
    for _ in 0..CASES {
        let l = rng.random_range(3..=10);
        let g = rng.random_range(0..4);
        let (h, sp) = cache.entry((l, g)).or_insert_with(|| {
            let d2 = if l >= 5 && g % 2 == 1 { 0.05 } else { 0.0 };
            let h = build_hamiltonian(&HamiltonianParams::new(l, [0.3, 0.6, 0.9, 1.0][g], 0.4, d2)).unwrap();
            let sp = SpectralPropagator::from_pauli_sum(&h).unwrap();
            (h, sp)
        });
        let psi = random_state(l, &mut rng);
        let t = rng.random_range(0.0..4.0);
        let a = sp.evolve(&psi, t).unwrap();
        let b = evolve_krylov(h, &psi, t, &KrylovConfig::default()).unwrap();
        let dev = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        fail("backend equivalence", dev < 1e-8);
    }
    let total: usize = failures.values().sum();
    outcome(total == 0, format!("{CASES} cases per suite, failures {failures:?}"))
}

fn run_cli(config: &str, dir: &Path, threads: usize) -> BTreeMap<String, Vec<u8>> {
    let cfg_path = dir.join("config.toml");
    fs::write(&cfg_path, config).unwrap();
    let out = dir.join(format!("out{threads}"));
    let status = Command::new(env!("CARGO_BIN_EXE_easym"))
        .arg("run")
        .arg(&cfg_path)
        .arg("--out")
        .arg(&out)
        .args(["--seed", "99", "--threads", &threads.to_string()])
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect()
}

const CIRCUIT_CONFIG: &str = r#"mode = "circuit"
probes = ["EA-U1", "EA-Z2", "CV"]
region = "quarter"

[circuit]
L = 8
p_haar = 0.3
depth_units = 12
n_realizations = 64

[initial]
pattern = "ferromagnetic"
tilt_angle_pi = 0.2
"#;

const QUENCH_CONFIG: &str = r#"mode = "quench"
probes = ["EA-U1", "CV", "PQ"]
region = "third"

[hamiltonian]
L = 8
gamma = 0.6

[initial]
pattern = "antiferromagnetic"
tilt_angle_pi = 0.3

[time]
t_max = 10.0
dt = 0.05
"#;

fn criterion_14() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut notes = Vec::new();
    let mut pass = true;
    for (name, config) in [("circuit", CIRCUIT_CONFIG), ("quench", QUENCH_CONFIG)] {
        let sub = dir.path().join(name);
        fs::create_dir_all(&sub).unwrap();
        let outputs: Vec<_> = [1, 2, 8].iter().map(|&t| run_cli(config, &sub, t)).collect();
        let same = !outputs[0].is_empty() && outputs.iter().all(|o| o == &outputs[0]);
        pass &= same;
        notes.push(format!("{name}: {} CSV files {}", outputs[0].len(), if same { "identical" } else { "DIFFER" }));
    }
    outcome(pass, format!("threads 1/2/8; {}", notes.join("; ")))
}

fn main() -> ExitCode {
    let mut results: Vec<(u32, Outcome)> = Vec::new();
    let mut report = |n: u32, f: &mut dyn FnMut() -> Outcome| {
        let t0 = Instant::now();
        let o = f();
        println!(
            "criterion {n:>2} {} {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t0.elapsed().as_secs_f64()
        );
        results.push((n, o));
    };
    report(1, &mut criterion_1);
    report(3, &mut criterion_3);
    report(7, &mut criterion_7);
    report(12, &mut criterion_12);

    let t0 = Instant::now();
    let quench: BTreeMap<&str, QuenchData> = ["1.0", "0.9", "0.7", "0.6", "0.5", "0.3"]
        .into_iter()
        .map(|g| (g, quench_data(g.parse().unwrap())))
        .collect();
    println!("(L = 12 quench data computed in {:.1}s)", t0.elapsed().as_secs_f64());
    report(2, &mut || criterion_2(&quench));
    report(4, &mut || criterion_4(&quench));
    report(5, &mut || criterion_5(&quench));
    report(6, &mut || criterion_6(&quench));
    drop(quench);

    let (c8, c10) = criteria_8_and_10();
    let mut c8 = Some(c8);
    let mut c10 = Some(c10);
    report(8, &mut || c8.take().unwrap());
    report(9, &mut criterion_9);
    report(10, &mut || c10.take().unwrap());
    report(11, &mut criterion_11);
    report(13, &mut criterion_13);
    report(14, &mut criterion_14);

    let failed: Vec<u32> = results.iter().filter(|(_, o)| !o.pass).map(|(n, _)| *n).collect();
    if failed.is_empty() {
        println!("all {} criteria passed", results.len());
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
