//! Acceptance suite. Runs every criterion at its stated tolerance, prints one
//! PASS/FAIL line per criterion and exits non-zero if any criterion fails.
//!
//! `cargo test -p qrp-cli --test acceptance`

use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use qrp_core::experiments::{
    gen_mixed_state_dataset, gen_noon_dataset, run_noon_experiment, run_rank_experiment, run_spiral_experiment,
    run_tomography_experiment, sweep_reservoir_size, Details, FeatureSource, NoonConfig, RankConfig, ResultRecord,
    SpiralConfig, TomographyConfig,
};
use qrp_core::linalg::{dagger, eigvalsh, max_abs_diff, trace, CMatrix, C64};
use qrp_core::metrics::{analytic_noon_metrics, matrix_metrics};
use qrp_core::optics::{haar_unitary, lift_unitary, output_amplitudes};
use qrp_core::tomography::{fidelity, project_physical};
use qrp_core::{enumerate_fixed, enumerate_up_to, DensityMatrix, FockBasis, ModeUnitary, Occupation, ParamStructure};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    check: fn() -> Outcome,
}

fn verdict(pass: bool, detail: String) -> Outcome {
    if pass {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn unwrap<T>(r: qrp_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| format!("error: {e}"))
}

fn tomography_details(r: &ResultRecord) -> &qrp_core::experiments::TomographyDetails {
    match &r.details {
        Details::Tomography(d) => d,
        _ => panic!("not a tomography record"),
    }
}

fn prob(amps: &[C64], basis: &FockBasis, occ: &[u32]) -> f64 {
    amps[basis.index_of(&Occupation::new(occ.to_vec())).unwrap()].norm_sqr()
}

fn linear_optics_kernel() -> Outcome {
    let basis = unwrap(enumerate_fixed(2, 2))?;
    let amps = unwrap(output_amplitudes(&ModeUnitary::balanced_beamsplitter(), &Occupation::new(vec![1, 1]), &basis))?;
    let (p11, p20, p02) = (prob(&amps, &basis, &[1, 1]), prob(&amps, &basis, &[2, 0]), prob(&amps, &basis, &[0, 2]));
    let hom = p11.abs().max((p20 - 0.5).abs()).max((p02 - 0.5).abs());

    let mut unitarity = 0.0f64;
    let mut homomorphism = 0.0f64;
    for basis in [enumerate_fixed(3, 2), enumerate_up_to(3, 2)] {
        let basis = Arc::new(unwrap(basis)?);
        for case in 0..20u64 {
            let u = unwrap(haar_unitary(3, 1000 + 2 * case))?;
            let v = unwrap(haar_unitary(3, 1001 + 2 * case))?;
            let uv = unwrap(u.then_after(&v))?;
            let lu = unwrap(lift_unitary(&u, &basis))?;
            let lv = unwrap(lift_unitary(&v, &basis))?;
            let luv = unwrap(lift_unitary(&uv, &basis))?;
            let id = CMatrix::identity(basis.len(), basis.len());
            unitarity = unitarity.max(max_abs_diff(&(lu.matrix() * dagger(lu.matrix())), &id));
            homomorphism = homomorphism.max(max_abs_diff(luv.matrix(), &(lu.matrix() * lv.matrix())));
        }
    }
    verdict(
        hom <= 1e-12 && unitarity <= 1e-8 && homomorphism <= 1e-8,
        format!(
            "HOM P(1,1)={p11:.1e} P(2,0)={p20:.15} P(0,2)={p02:.15} (max dev {hom:.1e}); \
             max unitarity err {unitarity:.1e}, max homomorphism err {homomorphism:.1e}"
        ),
    )
}

fn block_structure() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for (modes, want_blocks, want_params) in [(2usize, vec![1usize, 2, 3], 13usize), (3, vec![1, 3, 6], 45)] {
        let samples = unwrap(gen_mixed_state_dataset(50, modes, 77))?;
        let structure = ParamStructure::photon_number_blocks(Arc::clone(samples[0].state.basis()));
        let blocks = structure.block_sizes();
        // Hermitian blocks of size k carry k² real parameters; unit trace removes one.
        let counted: usize = blocks.iter().map(|k| k * k).sum::<usize>() - 1;
        let mut off_block = 0.0f64;
        for s in &samples {
            let m = s.state.matrix();
            for r in 0..m.nrows() {
                for c in 0..m.ncols() {
                    if !structure.in_block(r, c) {
                        off_block = off_block.max(m[(r, c)].norm());
                    }
                }
            }
        }
        pass &= blocks == want_blocks
            && structure.param_count() == want_params
            && counted == want_params
            && off_block < 1e-12;
        notes.push(format!(
            "{modes}-mode blocks {blocks:?}, {} params, max off-block {off_block:.1e}",
            structure.param_count()
        ));
    }
    verdict(pass, notes.join("; "))
}

fn single_basis_tomography() -> Outcome {
    let cfg = TomographyConfig::default();
    let qrp = unwrap(run_tomography_experiment(&cfg, true))?;
    let pnr = unwrap(run_tomography_experiment(&cfg, false))?;
    let n = cfg.split_seeds as f64;
    let combined_se = ((qrp.sd / n.sqrt()).powi(2) + (pnr.sd / n.sqrt()).powi(2)).sqrt();
    let gap = qrp.mean - pnr.mean;
    let bench = tomography_details(&pnr);
    let ratio = bench.mean_offdiag_predicted / bench.mean_offdiag_true;
    let fidelity_ok = qrp.mean >= 0.99;
    let gap_ok = gap > 2.0 * combined_se;
    let offdiag_ok = ratio < 0.02;
    let flag = |ok: bool| if ok { "ok" } else { "FAILED" };
    verdict(
        fidelity_ok && gap_ok && offdiag_ok,
        format!(
            "QRP {:.5}±{:.5} [{}]; QRP-PNR gap {gap:.4} vs 2·SE {:.4} (PNR {:.5}) [{}]; \
             benchmark off-diagonal {:.4} / true {:.4} = {ratio:.3} (needs < 0.02) [{}]",
            qrp.mean,
            qrp.sd,
            flag(fidelity_ok),
            2.0 * combined_se,
            pnr.mean,
            flag(gap_ok),
            bench.mean_offdiag_predicted,
            bench.mean_offdiag_true,
            flag(offdiag_ok),
        ),
    )
}

fn reservoir_thresholds() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for (modes, below, at) in [(2usize, 3usize, 4usize), (3, 8, 9)] {
        let cfg = TomographyConfig { state_modes: modes, ..TomographyConfig::default() };
        let records = unwrap(sweep_reservoir_size(&cfg, &[below, at]))?;
        let (f_below, f_at) = (records[0].mean, records[1].mean);
        pass &= f_below < 0.99 && f_at >= 0.99;
        notes.push(format!("{modes}-mode: size {below} {f_below:.5}, size {at} {f_at:.5}"));
    }
    verdict(pass, notes.join("; "))
}

fn closed_form(n1: f64, n2: f64, sigma: f64) -> [f64; 3] {
    let half_gap = (((n1 - n2) / 2.0).powi(2) + sigma * sigma).sqrt();
    let entropy = [0.5 + half_gap, 0.5 - half_gap].iter().filter(|&&l| l > 0.0).map(|&l| -l * l.ln()).sum();
    [n1 * n1 + n2 * n2 + 2.0 * sigma * sigma, entropy, sigma.abs()]
}

fn noon_metrics() -> Outcome {
    let samples = unwrap(gen_noon_dataset(10_000, 4242))?;
    let mut worst = 0.0f64;
    for s in &samples {
        let st = &s.state;
        let want = closed_form(st.n1, st.n2, st.sigma);
        let from_matrix = unwrap(matrix_metrics(&s.density, 2))?.to_array();
        let analytic = analytic_noon_metrics(st).to_array();
        for k in 0..3 {
            worst = worst.max((from_matrix[k] - want[k]).abs()).max((analytic[k] - want[k]).abs());
        }
    }
    let qrp = unwrap(run_noon_experiment(&NoonConfig::default()))?;
    let bench = unwrap(run_noon_experiment(&NoonConfig { benchmark: true, ..NoonConfig::default() }))?;
    let (d, b) = match (&qrp.details, &bench.details) {
        (Details::Noon(d), Details::Noon(b)) => (d, b),
        _ => return Err("not NOON records".into()),
    };
    let rmse = [d.rmse_purity.mean, d.rmse_entropy.mean, d.rmse_negativity.mean];
    let bench_neg = b.mean_abs_predicted_negativity;
    verdict(
        worst <= 1e-9 && rmse.iter().all(|&e| e <= 1e-3) && bench_neg < 0.02,
        format!(
            "closed forms max dev {worst:.1e} over 10^4 states; 3-detector RMSE purity {:.2e} entropy {:.2e} \
             negativity {:.2e}; benchmark mean |N| {bench_neg:.4}",
            rmse[0], rmse[1], rmse[2]
        ),
    )
}

fn rank_rule() -> Outcome {
    let rank_of = |cfg: RankConfig| -> Result<usize, String> {
        match unwrap(run_rank_experiment(&cfg))?.details {
            Details::Rank(d) => Ok(d.rank),
            _ => Err("not a rank record".into()),
        }
    };
    let noon = rank_of(RankConfig { source: FeatureSource::Noon, detector_count: 3, ..RankConfig::default() })?;
    let tomo = rank_of(RankConfig {
        source: FeatureSource::Tomography,
        state_modes: 2,
        reservoir_modes: 4,
        ..RankConfig::default()
    })?;
    verdict(
        noon == 4 && tomo == 14,
        format!("3-detector NOON rank {noon} (want 4); two-mode tomography rank {tomo} (want 14)"),
    )
}

fn mitigation_ordering() -> Outcome {
    let cfg = SpiralConfig::default();
    let record = unwrap(run_spiral_experiment(&cfg))?;
    let d = match &record.details {
        Details::Spiral(d) => d,
        _ => return Err("not a spiral record".into()),
    };
    let curve = &d.accuracy_vs_epsilon;
    let best = (0..curve.len()).max_by(|&a, &b| curve[a].mean.total_cmp(&curve[b].mean)).unwrap();
    let interior = best > 0 && best + 1 < curve.len() && curve[best].x > 0.0;
    let margin = curve[best].mean - curve[0].mean;
    let sem = (curve[best].sd.powi(2) + curve[0].sd.powi(2)).sqrt();
    let classical_ok = d.clean_accuracy.mean >= d.classical_accuracy.mean;
    let table: Vec<String> = curve.iter().map(|p| format!("{}:{:.4}", p.x, p.mean)).collect();
    verdict(
        interior && margin > sem && classical_ok,
        format!(
            "accuracy vs ε [{}]; peak at ε={} (interior: {interior}); margin over ε=0 {margin:.4} vs SEM {sem:.4}; \
             clean quantum {:.4} vs classical {:.4}",
            table.join(", "),
            curve[best].x,
            d.clean_accuracy.mean,
            d.classical_accuracy.mean
        ),
    )
}

fn random_hermitian(dim: usize, rng: &mut StdRng) -> CMatrix {
    let a =
        CMatrix::from_fn(dim, dim, |_, _| C64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0));
    (&a + dagger(&a)).map(|z| z * 0.5)
}

fn random_density(basis: &Arc<FockBasis>, rng: &mut StdRng) -> DensityMatrix {
    let g = CMatrix::from_fn(basis.len(), basis.len(), |_, _| {
        C64::new(rng.sample(rand_distr::StandardNormal), rng.sample(rand_distr::StandardNormal))
    });
    let m = &g * dagger(&g);
    let t = trace(&m);
    DensityMatrix::new(Arc::clone(basis), m.map(|z| z / t)).unwrap()
}

fn random_pure(basis: &Arc<FockBasis>, rng: &mut StdRng) -> (Vec<C64>, DensityMatrix) {
    let mut psi: Vec<C64> = (0..basis.len())
        .map(|_| C64::new(rng.sample(rand_distr::StandardNormal), rng.sample(rand_distr::StandardNormal)))
        .collect();
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    psi.iter_mut().for_each(|z| *z /= norm);
    let rho = DensityMatrix::pure(Arc::clone(basis), &psi).unwrap();
    (psi, rho)
}

fn physicalization_and_fidelity() -> Outcome {
    let mut rng = StdRng::seed_from_u64(8);
    let bases = [Arc::new(unwrap(enumerate_up_to(2, 2))?), Arc::new(unwrap(enumerate_up_to(3, 2))?)];
    let (mut idem, mut min_eig, mut trace_err) = (0.0f64, f64::INFINITY, 0.0f64);
    for i in 0..1000 {
        let basis = &bases[i % 2];
        let h = random_hermitian(basis.len(), &mut rng);
        let once = unwrap(project_physical(&h, basis))?.state;
        let twice = unwrap(project_physical(once.matrix(), basis))?.state;
        idem = idem.max(max_abs_diff(once.matrix(), twice.matrix()));
        min_eig = min_eig.min(eigvalsh(once.matrix()).min());
        trace_err = trace_err.max((trace(once.matrix()) - C64::new(1.0, 0.0)).norm());
    }

    let (mut self_err, mut pure_err) = (0.0f64, 0.0f64);
    for i in 0..100 {
        let basis = &bases[i % 2];
        let rho = random_density(basis, &mut rng);
        let (psi, pure) = random_pure(basis, &mut rng);
        self_err = self_err.max((unwrap(fidelity(&rho, &rho))? - 1.0).abs());
        let overlap: C64 = (0..psi.len())
            .flat_map(|r| (0..psi.len()).map(move |c| (r, c)))
            .map(|(r, c)| psi[r].conj() * rho.matrix()[(r, c)] * psi[c])
            .sum();
        pure_err = pure_err
            .max((unwrap(fidelity(&pure, &rho))? - overlap.re).abs())
            .max((unwrap(fidelity(&rho, &pure))? - overlap.re).abs());
    }
    verdict(
        idem <= 1e-10 && min_eig >= -1e-10 && trace_err <= 1e-10 && self_err <= 1e-8 && pure_err <= 1e-8,
        format!(
            "idempotence {idem:.1e}, min eigenvalue {min_eig:.1e}, trace err {trace_err:.1e} over 10^3 inputs; \
             |F(ρ,ρ)-1| {self_err:.1e}, pure-state reduction err {pure_err:.1e} over 100 pairs"
        ),
    )
}

fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("timing");
            map.values_mut().for_each(strip_timing);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

fn run_manifest(manifest: &Path, out: &Path, threads: usize) -> Result<(String, String), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_qrp"))
        .args(["run", "--config", manifest.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .env("QRP_THREADS", threads.to_string())
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(String::from_utf8_lossy(&status.stderr).into_owned());
    }
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(out.join("results.json")).unwrap()).unwrap();
    strip_timing(&mut v);
    Ok((serde_json::to_string_pretty(&v).unwrap(), std::fs::read_to_string(out.join("per_split.csv")).unwrap()))
}

fn determinism() -> Outcome {
    let tmp = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let manifests = [
        json!({ "experiment": "tomography", "config": { "dataset_size": 40, "train_count": 28, "split_seeds": 6, "shots": 300 } }),
        json!({ "experiment": "sweep", "sizes": [2, 4], "config": { "dataset_size": 30, "train_count": 20, "split_seeds": 4 } }),
        json!({ "experiment": "noon", "config": { "train_count": 80, "test_count": 20, "reservoir_count": 4 } }),
        json!({ "experiment": "spiral", "config": {
            "points_per_class": 40, "test_points_per_class": 40, "epochs": 40,
            "reservoir_realizations": 3, "epsilon_sweep": [0.0, 0.075, 0.15]
        } }),
        json!({ "experiment": "rank", "config": { "source": "tomography" } }),
    ];
    let mut notes = Vec::new();
    let mut pass = true;
    for (i, doc) in manifests.iter().enumerate() {
        let kind = doc["experiment"].as_str().unwrap();
        let path = tmp.path().join(format!("{kind}.json"));
        std::fs::write(&path, doc.to_string()).unwrap();
        let runs = [1usize, 4]
            .iter()
            .map(|&t| run_manifest(&path, &tmp.path().join(format!("{i}-{t}")), t))
            .collect::<Result<Vec<_>, _>>()?;
        // Rerun the single-thread case from the manifest it wrote.
        let resolved = tmp.path().join(format!("{i}-1")).join("config.json");
        let rerun = run_manifest(&resolved, &tmp.path().join(format!("{i}-rerun")), 2)?;
        let same = runs[0] == runs[1] && runs[0] == rerun;
        pass &= same;
        notes.push(format!("{kind} {}", if same { "identical" } else { "DIFFERS" }));
    }
    verdict(pass, format!("threads 1/4 and rerun from written manifest: {}", notes.join(", ")))
}

fn main() {
    let criteria = [
        Criterion {
            id: 1,
            name: "linear-optics kernel",
            limit: Some(Duration::from_secs(5)),
            check: linear_optics_kernel,
        },
        Criterion {
            id: 2,
            name: "reduced-state block structure",
            limit: Some(Duration::from_secs(30)),
            check: block_structure,
        },
        Criterion {
            id: 3,
            name: "single-basis tomography",
            limit: Some(Duration::from_secs(300)),
            check: single_basis_tomography,
        },
        Criterion {
            id: 4,
            name: "reservoir-size thresholds",
            limit: Some(Duration::from_secs(1200)),
            check: reservoir_thresholds,
        },
        Criterion { id: 5, name: "NOON metrics", limit: Some(Duration::from_secs(600)), check: noon_metrics },
        Criterion { id: 6, name: "rank rule", limit: Some(Duration::from_secs(60)), check: rank_rule },
        Criterion {
            id: 7,
            name: "mitigation ordering",
            limit: Some(Duration::from_secs(1800)),
            check: mitigation_ordering,
        },
        Criterion {
            id: 8,
            name: "physicalization and fidelity",
            limit: Some(Duration::from_secs(60)),
            check: physicalization_and_fidelity,
        },
        Criterion { id: 9, name: "determinism", limit: None, check: determinism },
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = Vec::new();
    for c in &criteria {
        if !filter.is_empty() && !filter.iter().any(|f| c.id.to_string() == *f) {
            continue;
        }
        let start = Instant::now();
        let outcome = (c.check)();
        let elapsed = start.elapsed();
        let over_time = c.limit.is_some_and(|l| elapsed > l);
        let (pass, detail) = match outcome {
            Ok(d) => (!over_time, d),
            Err(d) => (false, d),
        };
        let time_note = match c.limit {
            Some(l) => format!(
                "{:.1} s, limit {} s{}",
                elapsed.as_secs_f64(),
                l.as_secs(),
                if over_time { ", OVER" } else { "" }
            ),
            None => format!("{:.1} s", elapsed.as_secs_f64()),
        };
        println!("{} criterion {} ({}) [{}]: {}", if pass { "PASS" } else { "FAIL" }, c.id, c.name, time_note, detail);
        if !pass {
            failed.push(c.id);
        }
    }
    if !failed.is_empty() {
        println!("acceptance: criteria {failed:?} failed");
        std::process::exit(1);
    }
    println!("acceptance: all criteria passed");
}
