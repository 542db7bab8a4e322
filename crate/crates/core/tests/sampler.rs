use hesmooth_core::{RngStream, Scenario, SizeDistribution};

const DRAWS: usize = 1_000_000;

// Upper 0.001 quantiles of the chi-square distribution, df = 1..=150.
const CHI2_999: [f64; 150] = [
    10.828, 13.816, 16.266, 18.467, 20.515, 22.458, 24.322, 26.124, 27.877, 29.588, 31.264, 32.909,
    34.528, 36.123, 37.697, 39.252, 40.790, 42.312, 43.820, 45.315, 46.797, 48.268, 49.728, 51.179,
    52.620, 54.052, 55.476, 56.892, 58.301, 59.703, 61.098, 62.487, 63.870, 65.247, 66.619, 67.985,
    69.346, 70.703, 72.055, 73.402, 74.745, 76.084, 77.419, 78.750, 80.077, 81.400, 82.720, 84.037,
    85.351, 86.661, 87.968, 89.272, 90.573, 91.872, 93.168, 94.461, 95.751, 97.039, 98.324, 99.607,
    100.888, 102.166, 103.442, 104.716, 105.988, 107.258, 108.526, 109.791, 111.055, 112.317,
    113.577, 114.835, 116.092, 117.346, 118.599, 119.850, 121.100, 122.348, 123.594, 124.839,
    126.083, 127.324, 128.565, 129.804, 131.041, 132.277, 133.512, 134.745, 135.978, 137.208,
    138.438, 139.666, 140.893, 142.119, 143.344, 144.567, 145.789, 147.010, 148.230, 149.449,
    150.667, 151.884, 153.099, 154.314, 155.528, 156.740, 157.952, 159.162, 160.372, 161.581,
    162.788, 163.995, 165.201, 166.406, 167.610, 168.813, 170.016, 171.217, 172.418, 173.617,
    174.816, 176.014, 177.212, 178.408, 179.604, 180.799, 181.993, 183.186, 184.379, 185.571,
    186.762, 187.953, 189.142, 190.331, 191.520, 192.707, 193.894, 195.080, 196.266, 197.451,
    198.635, 199.819, 201.002, 202.184, 203.366, 204.547, 205.727, 206.907, 208.086, 209.265,
];

fn draw(dist: &SizeDistribution, seed: u64) -> Vec<u32> {
    let mut rng = RngStream::from_seed(seed);
    (0..DRAWS).map(|_| dist.sample(&mut rng)).collect()
}

/// Pearson statistic over bins `1, 2, ..., K-1, >=K`, where the tail starts
/// as soon as a bin or what remains after it would expect fewer than 5.
fn chi_square(dist: &SizeDistribution, sample: &[u32]) -> (f64, usize) {
    let n = sample.len() as f64;
    let max = *sample.iter().max().unwrap() as usize;
    let mut counts = vec![0u64; max + 2];
    for &x in sample {
        counts[x as usize] += 1;
    }
    let mut bins = Vec::new();
    let mut cum = 0.0;
    let mut k = 1usize;
    loop {
        let p = dist.pmf(k as u64).unwrap();
        if n * p < 5.0 || n * (1.0 - cum - p) < 5.0 {
            break;
        }
        bins.push((counts.get(k).copied().unwrap_or(0) as f64, n * p));
        cum += p;
        k += 1;
    }
    let tail_observed: u64 = counts.iter().skip(k).sum();
    let tail = (tail_observed as f64, n * (1.0 - cum));
    if tail.1 < 5.0 {
        let last = bins.last_mut().unwrap();
        last.0 += tail.0;
        last.1 += tail.1;
    } else {
        bins.push(tail);
    }
    let stat = bins.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    (stat, bins.len() - 1)
}

fn mean_and_se(sample: &[u32]) -> (f64, f64) {
    let n = sample.len() as f64;
    let mean = sample.iter().map(|&x| f64::from(x)).sum::<f64>() / n;
    let var = sample
        .iter()
        .map(|&x| (f64::from(x) - mean).powi(2))
        .sum::<f64>()
        / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn distributions() -> [SizeDistribution; 4] {
    [
        SizeDistribution::logarithmic(0.001).unwrap(),
        SizeDistribution::logarithmic(0.9).unwrap(),
        SizeDistribution::geometric(0.2).unwrap(),
        SizeDistribution::geometric(0.8).unwrap(),
    ]
}

#[test]
fn sizes_fit_their_pmf() {
    for (i, dist) in distributions().iter().enumerate() {
        let sample = draw(dist, 0x5eed + i as u64);
        let (stat, df) = chi_square(dist, &sample);
        assert!(df >= 1 && df <= CHI2_999.len(), "{dist:?}: df {df}");
        let critical = CHI2_999[df - 1];
        assert!(
            stat < critical,
            "{dist:?}: chi2 {stat:.3} >= {critical} (df {df})"
        );
    }
}

#[test]
fn sample_means_match() {
    for (i, dist) in distributions().iter().enumerate() {
        let sample = draw(dist, 0xbeef + i as u64);
        let (mean, se) = mean_and_se(&sample);
        assert!(
            (mean - dist.mean()).abs() < 3.0 * se,
            "{dist:?}: mean {mean} vs {} (se {se})",
            dist.mean()
        );
    }
    let log = SizeDistribution::logarithmic(0.001).unwrap();
    assert!((log.mean() - 1.0005).abs() < 1e-4);
    let (mean, _) = mean_and_se(&draw(&log, 11));
    assert!((mean - 1.0005).abs() < 1e-3);
    let (mean, _) = mean_and_se(&draw(&SizeDistribution::geometric(0.2).unwrap(), 12));
    assert!((mean - 5.0).abs() < 0.02);
}

#[test]
fn occurrence_rate_matches_p0() {
    let scenario = Scenario::stationary(SizeDistribution::constant(1).unwrap(), 0.5)
        .unwrap()
        .with_init_len(0)
        .with_horizon(DRAWS);
    let series = scenario.generate(&mut RngStream::from_seed(3));
    let nonzero = series.eval.iter().filter(|&&d| d != 0).count();
    let rate = nonzero as f64 / DRAWS as f64;
    assert!((rate - 0.5).abs() < 0.002, "{rate}");
}

#[test]
fn sizes_are_at_least_one() {
    for (i, dist) in distributions().iter().enumerate() {
        let mut rng = RngStream::from_seed(i as u64);
        assert!((0..10_000).all(|_| dist.sample(&mut rng) >= 1));
    }
}
