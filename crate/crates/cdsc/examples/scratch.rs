use std::sync::Arc;
use std::time::Instant;

use cdsc::code::{
    build_layout, preset, tiled_pattern, two_ninths_four_ninths_cell, DeformedCode, FamilyParams,
    Preset,
};
use cdsc::decode::DecoderKind;
use cdsc::harness::{estimate_logical_rate, CodeSource, RunSpec};
use cdsc::metrics::effective_distance_increment;
use cdsc::noise::{hashing_bound, Bias, BiasedNoiseParams};
use cdsc::statmech::{
    cluster_threshold, fisher_exponent_fit, path_length_exponent, percolation_stats, ClusterLevel,
};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(String::as_str).unwrap_or("help");
    match which {
        "percolation" => calib_percolation(),
        "dgrid" => calib_dprime_grid(args.get(2).map_or(60, |s| s.parse().unwrap())),
        "cluster" => calib_cluster(),
        "subthreshold" => calib_subthreshold(args.get(2).map_or(2000, |s| s.parse().unwrap())),
        "phase" => calib_phase(args.get(2).map_or(1500, |s| s.parse().unwrap())),
        _ => eprintln!("benches: percolation dgrid cluster subthreshold phase"),
    }
}

fn calib_percolation() {
    let family = FamilyParams::new(0.5, 0.0).unwrap();
    let mut lengths = Vec::new();
    for (l, reals) in [(64usize, 600), (128, 300), (256, 300), (512, 200)] {
        let t0 = Instant::now();
        let run = percolation_stats(family, l, reals, 42).unwrap();
        let tau = fisher_exponent_fit(&run);
        println!(
            "L={l} reals={reals}: span_p={:.3} largest={:.1} path={:?} tau={:?} ({:.1}s)",
            run.spanning_probability,
            run.mean_largest_cluster,
            run.mean_spanning_path,
            tau,
            t0.elapsed().as_secs_f64()
        );
        // Maximum-likelihood power-law fit over [smin, scut].
        for (smin, frac) in [(8usize, 1.2f64), (8, 1.3), (16, 1.3), (16, 1.25), (32, 1.3)] {
            let scut = (l as f64).powf(frac) as usize;
            let mut count = 0u64;
            let mut logsum = 0.0f64;
            for (&size, &c) in run.size_histogram.range(smin..=scut) {
                count += c;
                logsum += c as f64 * (size as f64 / (smin as f64 - 0.5)).ln();
            }
            if count > 0 {
                let tau_ml = 1.0 + count as f64 / logsum;
                println!("  ML [{smin}, L^{frac}={scut}] n={count} tau={tau_ml:.4}");
            }
        }
        for (smin, frac) in [(8.0f64, 1.2f64), (8.0, 1.3), (8.0, 1.35), (16.0, 1.3), (8.0, 1.5)] {
            let upper = (l as f64).powf(frac);
            let mut pts: Vec<(f64, f64)> = Vec::new();
            let mut lo = smin;
            while lo < upper {
                let hi = lo * 2.0;
                let count: u64 = run
                    .size_histogram
                    .range((lo.ceil() as usize)..(hi.ceil() as usize))
                    .map(|(_, &c)| c)
                    .sum();
                if count > 0 {
                    pts.push(((lo * hi).sqrt().ln(), (count as f64 / ((hi - lo) * reals as f64)).ln()));
                }
                lo = hi;
            }
            if pts.len() >= 3 {
                let n = pts.len() as f64;
                let sx: f64 = pts.iter().map(|p| p.0).sum();
                let sy: f64 = pts.iter().map(|p| p.1).sum();
                let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
                let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
                let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
                println!("  window [{smin}, L^{frac}] bins={} tau={:.4}", pts.len(), -slope);
            }
        }
        if let Some(m) = run.mean_spanning_path {
            lengths.push((l, m));
        }
    }
    println!("path exponent: {:?}", path_length_exponent(&lengths));
}

fn calib_dprime_grid(reals: usize) {
    let grid: Vec<(f64, f64)> = vec![
        (0.0, 0.0),
        (0.25, 0.0),
        (0.5, 0.0),
        (0.0, 0.25),
        (0.25, 0.25),
        (0.5, 0.25),
        (0.75, 0.25),
        (0.0, 0.5),
        (0.25, 0.5),
        (0.5, 0.5),
        (0.0, 0.75),
        (0.25, 0.75),
        (0.0, 1.0),
    ];
    let t0 = Instant::now();
    for (xz, yz) in grid {
        let (mean, se) = effective_distance_increment(
            FamilyParams::new(xz, yz).unwrap(),
            0.02,
            Bias::new(100.0).unwrap(),
            reals,
            20260810,
        )
        .unwrap();
        println!("({xz},{yz}): {mean:.4} +- {se:.4}");
    }
    println!("total {:.1}s", t0.elapsed().as_secs_f64());
}

fn calib_cluster() {
    for eta in [0.5, 3.0, 10.0, 30.0, 100.0] {
        let bias = Bias::new(eta).unwrap();
        let hb = hashing_bound(bias);
        let c0 = cluster_threshold(bias, ClusterLevel::C0, 0, 0).unwrap();
        let t0 = Instant::now();
        let c1 = cluster_threshold(bias, ClusterLevel::C1, 0, 0).unwrap();
        let c2 = cluster_threshold(bias, ClusterLevel::C2, 0, 0).unwrap();
        println!(
            "eta={eta}: hb={hb:.6} c0={c0:.6} c1={c1:.6} c2={c2:.6} |c1-hb|={:.2e} |c2-c1|={:.2e} ({:.1}s)",
            (c1 - hb).abs(),
            (c2 - c1).abs(),
            t0.elapsed().as_secs_f64()
        );
    }
}

fn calib_subthreshold(trials: usize) {
    let chi: usize = std::env::args().nth(3).map_or(20, |s| s.parse().unwrap());
    for l in [9usize, 13] {
        let layout = Arc::new(build_layout(l).unwrap());
        let sources = [
            ("family(0.25,0.5)", CodeSource::Family(FamilyParams::new(0.25, 0.5).unwrap())),
            ("xzzx", CodeSource::Fixed(preset(Preset::Xzzx, l))),
            ("xy", CodeSource::Fixed(preset(Preset::Xy, l))),
            (
                "ti(2/9,4/9)",
                CodeSource::Fixed(tiled_pattern(&two_ninths_four_ninths_cell(), l).unwrap()),
            ),
        ];
        for (name, source) in sources {
            let t0 = Instant::now();
            let est = estimate_logical_rate(&RunSpec {
                layout: Arc::clone(&layout),
                code: source,
                params: BiasedNoiseParams::new(0.2, Bias::new(100.0).unwrap()).unwrap(),
                decoder: DecoderKind::Tn { chi },
                trials,
                seed: 99,
            })
            .unwrap();
            println!(
                "L={l} {name}: {:.4} +- {:.4} conv={:.3} ({:.0}s)",
                est.p_logical,
                est.std_error,
                est.converged_fraction,
                t0.elapsed().as_secs_f64()
            );
        }
    }
}

fn calib_phase(trials: usize) {
    let chi = 24;
    for (xz, yz) in [(0.5, 0.0), (0.1, 0.1)] {
        for l in [9usize, 13] {
            let layout = Arc::new(build_layout(l).unwrap());
            for p in [0.30, 0.40, 0.45] {
                let est = estimate_logical_rate(&RunSpec {
                    layout: Arc::clone(&layout),
                    code: CodeSource::Family(FamilyParams::new(xz, yz).unwrap()),
                    params: BiasedNoiseParams::new(p, Bias::new(1e8).unwrap()).unwrap(),
                    decoder: DecoderKind::Tn { chi },
                    trials,
                    seed: 7,
                })
                .unwrap();
                println!(
                    "({xz},{yz}) L={l} p={p}: {:.4} +- {:.4} conv={:.3}",
                    est.p_logical, est.std_error, est.converged_fraction
                );
            }
        }
    }
}
