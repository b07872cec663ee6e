// calibration: unnormalized variogram vs exact band expectation
use projmc2_core::simgen::{default_spec, simulate};
use projmc2_core::spatial::{dist, Kernel};

fn main() {
    let kernel = Kernel::exponential(6.0).unwrap();
    let mut diffs = Vec::new();
    let mut bands = Vec::new();
    for seed in 0..60u64 {
        let mut spec = default_spec();
        spec.n = 300;
        spec.seed = 7000 + seed;
        let (data, truth) = simulate(&spec).unwrap();
        let f1 = truth.factors.column(0);
        let locs = data.locs();
        let n = spec.n;
        let (mut gamma, mut band_corr, mut count) = (0.0, 0.0, 0usize);
        for i in 0..n {
            for j in (i + 1)..n {
                let d = dist(locs.site(i), locs.site(j));
                if (0.45..=0.55).contains(&d) {
                    let diff = f1[i] - f1[j];
                    gamma += 0.5 * diff * diff;
                    band_corr += kernel.correlation(locs.site(i), locs.site(j));
                    count += 1;
                }
            }
        }
        let est = 1.0 - gamma / count as f64;
        let expect = band_corr / count as f64;
        diffs.push(est - expect);
        bands.push(expect);
    }
    let m = diffs.iter().sum::<f64>() / diffs.len() as f64;
    let sd = (diffs.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (diffs.len() - 1) as f64).sqrt();
    let bm = bands.iter().sum::<f64>() / bands.len() as f64;
    println!("diff mean {m:.4} sd {sd:.4}; band expectation mean {bm:.5} (e^-3 = {:.5})", (-3.0f64).exp());
}
