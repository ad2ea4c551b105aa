//! End-to-end acceptance checks. Runs every criterion in order, prints one
//! PASS/FAIL line each and exits nonzero if any failed.

#[path = "../../core/tests/support/reference_model.rs"]
mod reference_model;

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use ocmsim_cli::sweep::{run_grid, SweepSpec};
use ocmsim_cli::{PresetStore, RunConfig};
use ocmsim_core::memory_timing::*;
use ocmsim_core::photonic_link::*;
use ocmsim_core::sim_core::*;
use ocmsim_core::workloads::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use reference_model::reference_profile;

type Outcome = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(x: f64, target: f64, rel: f64) -> bool {
    (x / target - 1.0).abs() <= rel
}

fn ocm(serdes: f64, roundtrip_m: f64) -> InterconnectModel {
    InterconnectModel::Ocm(OcmLatencyParams::preset(serdes, roundtrip_m))
}

fn blocking(ic: InterconnectModel) -> SimConfig {
    SimConfig { interconnect: ic, hierarchy: HierarchyConfig { miss_window: 1, ..Default::default() }, ..Default::default() }
}

fn area_reproduction() -> Outcome {
    let area = |m: u32| link_area_mm2(&LinkDesign::new(m, 614.8 / m as f64, 183.5, 1).unwrap());
    let (a35, a39) = (area(35), area(39));
    ensure(
        within(a35, 51.4e-3, 0.005) && within(a39, 57.3e-3, 0.005),
        format!("m=35 {a35:.4e} mm2, m=39 {a39:.4e} mm2"),
    )
}

fn bandwidth_reproduction() -> Outcome {
    let bw = required_link_bandwidth(4, 153.7);
    ensure((bw - 614.8).abs() < 1e-9 && bw.round() == 615.0, format!("{bw} Gbps (~{})", bw.round()))
}

/// Returns the number of bracket edges crossed.
fn sawtooth_holds(p: &PhotonicDeviceParams, c: &CalibrationParams, m: u32) -> Result<usize, String> {
    let laser = |b: f64| evaluate_link(&LinkDesign::new(m, b, 183.5, 1).unwrap(), p, c).map(|e| e.energy.laser);
    let rates: Vec<f64> = (1..=300).map(|i| i as f64 * 0.1).collect();
    let mut edges = 0;
    for w in rates.windows(2) {
        let (e0, e1) = match (laser(w[0]), laser(w[1])) {
            (Ok(a), Ok(b)) => (a, b),
            _ => continue,
        };
        let same_bracket = sensitivity_steps(w[0], c) == sensitivity_steps(w[1], c);
        if same_bracket && e1 >= e0 {
            return Err(format!("laser energy rises inside a bracket at {} Gbps", w[1]));
        }
        if !same_bracket {
            if e1 <= e0 {
                return Err(format!("no step at the bracket edge near {} Gbps", w[1]));
            }
            edges += 1;
        }
    }
    Ok(edges)
}

fn energy_optimum() -> Outcome {
    let (p, c) = (PhotonicDeviceParams::default(), CalibrationParams::default());
    let mut notes = Vec::new();
    let mut ok = true;
    for (target, m_ref, e_ref) in [(614.8, 35u32, 1.07), (802.0, 39, 1.57)] {
        let s = design_sweep(target, &p, &c, 10..=60).map_err(|e| e.to_string())?;
        let best = s.best();
        let m = best.design.wavelength_count();
        ok &= m.abs_diff(m_ref) <= 5 && within(best.energy_pj_per_bit, e_ref, 0.25);
        notes.push(format!("{target} Gbps: m={m}, {:.3} pJ/bit", best.energy_pj_per_bit));
    }
    let mut edges = 0;
    for m in [10, 35, 39] {
        match sawtooth_holds(&p, &c, m) {
            Ok(n) => edges += n,
            Err(e) => {
                ok = false;
                notes.push(format!("m={m}: {e}"));
            }
        }
    }
    ok &= edges > 0;
    notes.push(format!("sawtooth over {edges} bracket edges"));
    ensure(ok, notes.join("; "))
}

fn energy_overhead() -> Outcome {
    let s = design_sweep(614.8, &PhotonicDeviceParams::default(), &CalibrationParams::default(), 10..=60)
        .map_err(|e| e.to_string())?;
    let overhead = s.best().energy_pj_per_bit / 10.0;
    ensure(within(overhead, 0.107, 0.25), format!("{:.1}% of 10 pJ/bit", overhead * 100.0))
}

fn latency_presets() -> Outcome {
    let dist: Vec<f64> = ROUNDTRIP_PRESETS_M.iter().map(|&d| OcmLatencyParams::preset(10.0, d).t_dist_cycles()).collect();
    if dist != [30.0, 60.0, 90.0] {
        return Err(format!("T_dist {dist:?}"));
    }
    let mut rng = StdRng::seed_from_u64(0x0c3);
    for i in 0..1000 {
        let p = OcmLatencyParams {
            t_contr_cycles: rng.gen_range(0.0..200.0),
            t_serdes_cycles: rng.gen_range(0.0..500.0),
            t_mod_cycles: rng.gen_range(0.0..50.0),
            t_demod_cycles: rng.gen_range(0.0..50.0),
            distance_m: rng.gen_range(0.0..20.0),
            propagation_ns_per_m: rng.gen_range(3.0..7.0),
            core_ghz: rng.gen_range(0.5..5.0),
        };
        let t_mem = rng.gen_range(0.0..300.0);
        for b in [ocm_round_trip(&p, t_mem), nic_round_trip(&NicParams { fixed_cycles: rng.gen_range(1.0..5000.0), core_ghz: p.core_ghz }, t_mem)] {
            let sum: f64 = b.terms().iter().map(|t| t.1).sum();
            if sum != b.total_cycles {
                return Err(format!("set {i}: terms sum {sum} != total {}", b.total_cycles));
            }
        }
    }
    Ok("T_dist 30/60/90 cycles; 1000 random breakdowns sum exactly".into())
}

fn nic_vs_ocm() -> Outcome {
    let spec = SyntheticWorkloadSpec {
        kind: WorkloadKind::PointerChase,
        footprint_bytes: 256 << 20,
        memory_intensity: 1.0,
        length_instructions: 1_000_000,
        seed: 7,
        ..Default::default()
    };
    let trace: Vec<TraceRecord> = generate(&spec).map_err(|e| e.to_string())?.collect();
    let run = |ic| run_records(trace.iter().copied(), &blocking(ic)).map_err(|e| e.to_string());
    let local = run(InterconnectModel::Local)?;
    let nic = run(InterconnectModel::Nic(NicParams::default()))?;
    let fast = run(ocm(10.0, 2.0))?;
    let slow = run(ocm(340.0, 2.0))?;
    let all_miss = local.l3.misses == local.accesses() && local.accesses() == 1_000_000;
    let (r_fast, r_slow) = (slowdown(&nic, &fast), slowdown(&nic, &slow));
    ensure(
        all_miss && (5.0..=6.0).contains(&r_fast) && (1.9..=2.5).contains(&r_slow),
        format!(
            "speedup {r_fast:.3}x (serdes 10), {r_slow:.3}x (serdes 340); local access {:.1} ns, L3 miss {:.0}%",
            local.amat_ns(),
            local.l3.miss_rate() * 100.0
        ),
    )
}

fn compute_bound() -> Outcome {
    let spec = SyntheticWorkloadSpec {
        kind: WorkloadKind::Stream,
        footprint_bytes: 16 << 10,
        memory_intensity: 0.3,
        length_instructions: 2_000_000,
        ..Default::default()
    };
    let trace: Vec<TraceRecord> = generate(&spec).map_err(|e| e.to_string())?.collect();
    let grid = run_grid(&SweepSpec::default(), &SimConfig::default(), &trace, None).map_err(|e| e.to_string())?;
    let worst = grid.cells.iter().map(|c| c.slowdown).fold(0.0, f64::max);
    ensure(grid.cells.len() == 9 && worst < 1.05, format!("worst slowdown {worst:.4} over {} cells", grid.cells.len()))
}

fn grid_is_monotone(cells: &[f64]) -> bool {
    // cells arrive sorted by SERDES then roundtrip: index = 3 * s + d
    (0..3).all(|s| (0..2).all(|d| cells[3 * s + d + 1] >= cells[3 * s + d]))
        && (0..3).all(|d| (0..2).all(|s| cells[3 * (s + 1) + d] >= cells[3 * s + d]))
}

fn monotonic_grid() -> Outcome {
    let stream = SyntheticWorkloadSpec {
        kind: WorkloadKind::Stream,
        footprint_bytes: 64 << 20,
        access_bytes: 128,
        memory_intensity: 0.3,
        length_instructions: 1_000_000,
        ..Default::default()
    };
    let chase = SyntheticWorkloadSpec {
        kind: WorkloadKind::PointerChase,
        footprint_bytes: 32 << 20,
        memory_intensity: 0.2,
        length_instructions: 1_000_000,
        seed: 3,
        ..Default::default()
    };
    let mixed = SyntheticWorkloadSpec {
        kind: WorkloadKind::MixedLocality,
        footprint_bytes: 1 << 30,
        memory_intensity: 0.3,
        length_instructions: 1_000_000,
        seed: 5,
        write_ratio: 0.1,
        reuse_distance_profile: [(8, 0.85), (400, 0.07), (20_000, 0.04), (0, 0.04)]
            .iter()
            .map(|&(distance, probability)| ReuseBin { distance, probability })
            .collect(),
        ..Default::default()
    };
    let mut ok = true;
    let mut notes = Vec::new();
    let mut stream_worst = 0.0;
    for (name, spec) in [("stream", stream), ("pointer_chase", chase), ("mixed", mixed)] {
        let trace: Vec<TraceRecord> = generate(&spec).map_err(|e| e.to_string())?.collect();
        let grid = run_grid(&SweepSpec::default(), &SimConfig::default(), &trace, None).map_err(|e| e.to_string())?;
        let cells: Vec<f64> = grid.cells.iter().map(|c| c.slowdown).collect();
        let mono = cells.len() == 9 && grid_is_monotone(&cells);
        let worst = cells.iter().copied().fold(0.0, f64::max);
        if name == "stream" {
            stream_worst = worst;
        }
        ok &= mono;
        notes.push(format!("{name} worst {worst:.3}{}", if mono { "" } else { " NOT monotone" }));
    }
    ok &= (1.3..=3.0).contains(&stream_worst);
    ensure(ok, notes.join(", "))
}

fn engine_vs_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x0a3a7);
    let models = [InterconnectModel::Local, ocm(10.0, 2.0), ocm(150.0, 4.0), ocm(340.0, 6.0), InterconnectModel::Nic(NicParams::default())];
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let mut bins: Vec<(u64, f64)> = vec![
            (rng.gen_range(1..40), rng.gen_range(0.1..1.0)),
            (rng.gen_range(100..1500), rng.gen_range(0.0..0.4)),
            (rng.gen_range(3000..40_000), rng.gen_range(0.0..0.3)),
            (0, rng.gen_range(0.0..0.3)),
        ];
        let total: f64 = bins.iter().map(|b| b.1).sum();
        bins.iter_mut().for_each(|b| b.1 /= total);
        let spec = SyntheticWorkloadSpec {
            kind: WorkloadKind::MixedLocality,
            footprint_bytes: 1 << 30,
            memory_intensity: rng.gen_range(0.1..0.6),
            length_instructions: 100_000,
            seed: rng.gen(),
            reuse_distance_profile: bins.iter().map(|&(distance, probability)| ReuseBin { distance, probability }).collect(),
            ..Default::default()
        };
        let trace: Vec<TraceRecord> = generate(&spec).map_err(|e| e.to_string())?.collect();
        let ic = models[i % models.len()];
        let cfg = blocking(ic);
        let sim = run_records(trace.iter().copied(), &cfg).map_err(|e| e.to_string())?;
        let oracle = amat_oracle(&reference_profile(&trace, &cfg), &cfg.hierarchy, &ic);
        let err = (sim.amat_ns() / oracle - 1.0).abs();
        worst = worst.max(err);
        if err > 0.02 {
            return Err(format!("trace {i} ({}): engine {:.3} ns vs oracle {oracle:.3} ns", ic.label(), sim.amat_ns()));
        }
    }
    Ok(format!("20 traces, worst AMAT error {:.2e}", worst))
}

fn dram_cache_property() -> Outcome {
    let store = PresetStore::builtin();
    let cached_cfg = RunConfig::parse("presets = [\"memconf2\", \"ocm-mid\"]", &store).map_err(|e| e.to_string())?.sim_config();
    let plain_cfg = SimConfig { dram_cache: None, ..cached_cfg.clone() };
    let reuse = SyntheticWorkloadSpec {
        kind: WorkloadKind::Stream,
        footprint_bytes: 64 << 20,
        access_bytes: 128,
        memory_intensity: 0.3,
        length_instructions: 1_000_000,
        ..Default::default()
    };
    let trace: Vec<TraceRecord> = generate(&reuse).map_err(|e| e.to_string())?.collect();
    let with = run_records(trace.iter().copied(), &cached_cfg).map_err(|e| e.to_string())?;
    let without = run_records(trace.iter().copied(), &plain_cfg).map_err(|e| e.to_string())?;

    // uniform pages over twice the capacity, straight into the cache
    let dc = DramCacheConfig { capacity_bytes: 16 << 20, ..Default::default() };
    let uniform = SyntheticWorkloadSpec {
        kind: WorkloadKind::UniformRandom,
        footprint_bytes: 2 * dc.capacity_bytes,
        memory_intensity: 0.2,
        length_instructions: 5_000_000,
        seed: 11,
        ..Default::default()
    };
    let mut cache = DramCache::new(&dc);
    for r in generate(&uniform).map_err(|e| e.to_string())? {
        cache.access(r.address / dc.page_bytes as u64, false);
    }
    let direct = cache.stats().hit_rate();
    // and behind the full cache hierarchy
    let engine_cfg = SimConfig { dram_cache: Some(dc), interconnect: ocm(150.0, 4.0), ..Default::default() };
    let engine = run_records(generate(&uniform).map_err(|e| e.to_string())?, &engine_cfg).map_err(|e| e.to_string())?;
    let behind_l3 = engine.dram_cache_hit_rate().unwrap_or(0.0);

    ensure(
        with.total_cycles <= without.total_cycles && (direct - 0.5).abs() <= 0.05 && (behind_l3 - 0.5).abs() <= 0.05,
        format!(
            "page reuse {:.3e} vs {:.3e} cycles; uniform hit rate {direct:.3} (direct), {behind_l3:.3} (behind L3)",
            with.total_cycles, without.total_cycles
        ),
    )
}

fn ocmsim(dir: &Path, args: &[&str]) -> Result<Vec<u8>, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_ocmsim"))
        .args(args)
        .current_dir(dir)
        .env_remove("OCMSIM_PRESET_DIR")
        .output()
        .map_err(|e| e.to_string())?;
    if !o.status.success() {
        return Err(format!("ocmsim {args:?}: {}", String::from_utf8_lossy(&o.stderr)));
    }
    Ok(o.stdout)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = r#"
presets = ["memconf1", "ocm-mid"]

[workload]
kind = "mixed_locality"
footprint_bytes = 268435456
memory_intensity = 0.3
length_instructions = 300000
write_ratio = 0.2
reuse_distance_profile = [
    { distance = 6, probability = 0.8 },
    { distance = 5000, probability = 0.1 },
    { distance = 0, probability = 0.1 },
]

[sweep.axes]
interconnect = ["local", "nic", "ocm"]

[link_sweep]
target_bw_gbps = [614.8, 802.0]
"#;
    fs::write(dir.path().join("d.toml"), cfg).map_err(|e| e.to_string())?;
    let d = dir.path();
    let mut checked = 0;
    for verb in ["run", "sweep", "link-sweep"] {
        let a = ocmsim(d, &[verb, "--config", "d.toml", "--jobs", "1"])?;
        let b = ocmsim(d, &[verb, "--config", "d.toml", "--jobs", "1"])?;
        let c = ocmsim(d, &[verb, "--config", "d.toml", "--jobs", "8"])?;
        if a != b || a != c {
            return Err(format!("`{verb}` output differs between runs"));
        }
        checked += a.len();
    }
    Ok(format!("run, sweep, link-sweep identical across repeats and --jobs 1/8 ({checked} bytes)"))
}

type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn main() -> ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria: [Criterion; 11] = [
        ("area reproduction", area_reproduction, None),
        ("bandwidth reproduction", bandwidth_reproduction, None),
        ("energy optimum", energy_optimum, secs(1)),
        ("energy-overhead ratio", energy_overhead, None),
        ("latency presets", latency_presets, None),
        ("NIC-vs-OCM ratio", nic_vs_ocm, secs(10)),
        ("compute-bound bound", compute_bound, secs(10)),
        ("monotonicity grid", monotonic_grid, secs(60)),
        ("engine vs oracle", engine_vs_oracle, secs(60)),
        ("DRAM cache property", dram_cache_property, secs(60)),
        ("determinism", determinism, secs(60)),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(d), Some(l)) if elapsed > *l => Err(format!("{d}; took {elapsed:.2?}, limit {l:?}")),
            (o, _) => o,
        };
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {:>2} {name}: {detail} [{elapsed:.2?}]", i + 1);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
