//! Synthetic KDD99-format records for integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Profile {
    label: &'static str,
    weight: f64,
    protocol: &'static [&'static str],
    service: &'static [&'static str],
    flag: &'static [&'static str],
}

const PROFILES: [Profile; 7] = [
    Profile { label: "normal.", weight: 0.60, protocol: &["tcp", "udp", "tcp"], service: &["http", "smtp", "ftp_data", "domain_u", "private"], flag: &["SF", "SF", "REJ"] },
    Profile { label: "smurf.", weight: 0.17, protocol: &["icmp"], service: &["ecr_i"], flag: &["SF"] },
    Profile { label: "neptune.", weight: 0.13, protocol: &["tcp"], service: &["private", "http", "telnet"], flag: &["S0", "REJ"] },
    Profile { label: "portsweep.", weight: 0.04, protocol: &["tcp"], service: &["private", "telnet"], flag: &["REJ", "RSTR"] },
    Profile { label: "ipsweep.", weight: 0.03, protocol: &["icmp"], service: &["eco_i", "ecr_i"], flag: &["SF"] },
    Profile { label: "guess_passwd.", weight: 0.02, protocol: &["tcp"], service: &["telnet", "ftp"], flag: &["SF", "RSTO"] },
    Profile { label: "buffer_overflow.", weight: 0.01, protocol: &["tcp"], service: &["telnet", "ftp_data"], flag: &["SF"] },
];

fn pick<'a>(rng: &mut ChaCha8Rng, xs: &'a [&'a str]) -> &'a str {
    xs[rng.gen_range(0..xs.len())]
}

fn rate(rng: &mut ChaCha8Rng, centre: f64, spread: f64) -> f64 {
    let v: f64 = centre + rng.gen_range(-spread..=spread);
    (v.clamp(0.0, 1.0) * 100.0).round() / 100.0
}

/// `n` comma-separated records with the 41 KDD99 features and a label.
pub fn synthetic_kdd(n: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    for _ in 0..n {
        let mut u: f64 = rng.gen();
        let mut which = 0;
        for (i, p) in PROFILES.iter().enumerate() {
            if u < p.weight {
                which = i;
                break;
            }
            u -= p.weight;
        }
        let p = &PROFILES[which];
        let mut f = vec![String::new(); 42];
        let attack = which != 0;
        let dos = which == 1 || which == 2;
        let duration = if which >= 5 { rng.gen_range(0..3000) } else if attack { 0 } else { rng.gen_range(0..200) * rng.gen_range(0..2) };
        f[0] = duration.to_string();
        f[1] = pick(&mut rng, p.protocol).into();
        f[2] = pick(&mut rng, p.service).into();
        f[3] = pick(&mut rng, p.flag).into();
        let src = match which {
            1 => [520, 1032][rng.gen_range(0..2)],
            2 | 3 => 0,
            4 => 8 + rng.gen_range(0..12),
            _ => rng.gen_range(100..3000),
        };
        f[4] = src.to_string();
        f[5] = if attack { rng.gen_range(0..40) } else { rng.gen_range(0..20000) }.to_string();
        f[6] = u8::from(rng.gen_bool(0.001)).to_string();
        f[7] = if which == 4 { rng.gen_range(0..2) } else { 0 }.to_string();
        f[8] = "0".into();
        f[9] = if which >= 5 { rng.gen_range(1..5) } else { rng.gen_range(0..2) * rng.gen_range(0..2) }.to_string();
        f[10] = if which == 5 { rng.gen_range(1..5) } else { 0 }.to_string();
        let logged_in = which == 0 && !f[3].starts_with("REJ") || which == 6;
        f[11] = u8::from(logged_in).to_string();
        f[12] = if which == 6 { rng.gen_range(1..4) } else { 0 }.to_string();
        f[13] = u8::from(which == 6 && rng.gen_bool(0.7)).to_string();
        f[14] = "0".into();
        f[15] = if which == 6 { rng.gen_range(0..3) } else { 0 }.to_string();
        f[16] = if which == 6 { 1 } else { rng.gen_range(0..2) * u32::from(rng.gen_bool(0.05)) }.to_string();
        f[17] = u8::from(which == 6).to_string();
        f[18] = u8::from(rng.gen_bool(0.02)).to_string();
        f[19] = "0".into();
        f[20] = "0".into();
        f[21] = u8::from(which == 0 && rng.gen_bool(0.01)).to_string();
        let count = if dos { rng.gen_range(200..512) } else if which == 3 || which == 4 { rng.gen_range(1..20) } else { rng.gen_range(1..30) };
        f[22] = count.to_string();
        f[23] = if which == 1 { count } else if which == 2 { rng.gen_range(1..30) } else { rng.gen_range(1..count + 1) }.to_string();
        let serror = if which == 2 && f[3] == "S0" { rate(&mut rng, 0.98, 0.02) } else { rate(&mut rng, 0.0, 0.02) };
        f[24] = serror.to_string();
        f[25] = (if serror > 0.5 { rate(&mut rng, 0.98, 0.02) } else { rate(&mut rng, 0.0, 0.02) }).to_string();
        let rerror = if f[3] == "REJ" || f[3] == "RSTR" { rate(&mut rng, 0.9, 0.1) } else { rate(&mut rng, 0.0, 0.03) };
        f[26] = rerror.to_string();
        f[27] = rate(&mut rng, rerror, 0.05).to_string();
        let same = match which { 1 => 1.0, 2 => rate(&mut rng, 0.05, 0.05), 3 => rate(&mut rng, 0.2, 0.2), _ => rate(&mut rng, 0.95, 0.05) };
        f[28] = same.to_string();
        f[29] = rate(&mut rng, 1.0 - same, 0.05).to_string();
        f[30] = (if which == 4 { rate(&mut rng, 0.8, 0.2) } else { rate(&mut rng, 0.1, 0.1) }).to_string();
        let dh = if dos { 255 } else { rng.gen_range(1..256) };
        f[31] = dh.to_string();
        f[32] = (if which == 1 { 255 } else if which == 2 { rng.gen_range(1..25) } else { rng.gen_range(1..256) }).to_string();
        f[33] = rate(&mut rng, same, 0.05).to_string();
        f[34] = rate(&mut rng, 1.0 - same, 0.05).to_string();
        f[35] = (if which == 1 || which == 3 { rate(&mut rng, 0.9, 0.1) } else { rate(&mut rng, 0.05, 0.05) }).to_string();
        f[36] = rate(&mut rng, 0.02, 0.02).to_string();
        f[37] = rate(&mut rng, serror, 0.03).to_string();
        f[38] = rate(&mut rng, serror, 0.03).to_string();
        f[39] = rate(&mut rng, rerror, 0.05).to_string();
        f[40] = rate(&mut rng, rerror, 0.05).to_string();
        f[41] = p.label.into();
        out.push_str(&f.join(","));
        out.push('\n');
    }
    out
}

use netgauntlet::classifiers::{weighted_gini, MlpModel};
use netgauntlet::dataset::{Column, Dataset, FeatureKind, LabelScheme, Schema};

/// Writes `n` synthetic records to `dir/name` and returns the path.
pub fn write_synthetic(dir: &std::path::Path, name: &str, n: usize, seed: u64) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, synthetic_kdd(n, seed)).unwrap();
    path
}

/// Minimum weighted child Gini over every admissible binary split, found by
/// enumerating each continuous threshold between distinct values and each
/// one-code-vs-rest categorical partition.
pub fn exhaustive_root_gini(columns: &[Column<f64>], labels: &[usize], n_classes: usize) -> Option<f64> {
    let n = labels.len();
    let mut best: Option<f64> = None;
    let mut consider = |left: &[bool]| {
        let mut l = vec![0usize; n_classes];
        let mut r = vec![0usize; n_classes];
        for i in 0..n {
            if left[i] { l[labels[i]] += 1 } else { r[labels[i]] += 1 }
        }
        if l.iter().sum::<usize>() == 0 || r.iter().sum::<usize>() == 0 {
            return;
        }
        let g: f64 = weighted_gini(&l, &r);
        if best.is_none_or(|b| g < b) {
            best = Some(g);
        }
    };
    for col in columns {
        match col {
            Column::Continuous(v) => {
                let mut distinct = v.clone();
                distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
                distinct.dedup();
                for w in distinct.windows(2) {
                    let t = (w[0] + w[1]) / 2.0;
                    let left: Vec<bool> = v.iter().map(|&x| x <= t).collect();
                    consider(&left);
                }
            }
            Column::Categorical { codes, .. } => {
                let mut distinct = codes.clone();
                distinct.sort();
                distinct.dedup();
                for &c in &distinct {
                    let left: Vec<bool> = codes.iter().map(|&x| x == c).collect();
                    consider(&left);
                }
            }
        }
    }
    best
}

/// Central-difference gradient of the mean loss.
pub fn numeric_gradient(model: &MlpModel<f64>, inputs: &[f64], labels: &[usize], h: f64) -> Vec<f64> {
    let base = model.parameters();
    let mut m = model.clone();
    let mut out = Vec::with_capacity(base.len());
    for i in 0..base.len() {
        let mut p = base.clone();
        p[i] = base[i] + h;
        m.set_parameters(&p);
        let up = m.loss(inputs, labels);
        p[i] = base[i] - h;
        m.set_parameters(&p);
        let down = m.loss(inputs, labels);
        out.push((up - down) / (2.0 * h));
    }
    out
}

/// Random joint count table, `nx` by `ny`, with a nonzero total.
pub fn random_joint(rng: &mut ChaCha8Rng, nx: usize, ny: usize) -> Vec<u64> {
    loop {
        let t: Vec<u64> = (0..nx * ny)
            .map(|_| if rng.gen_bool(0.3) { 0 } else { rng.gen_range(0..25) })
            .collect();
        if t.iter().sum::<u64>() > 0 {
            return t;
        }
    }
}

/// Dataset from continuous feature columns and raw label texts.
pub fn continuous_dataset(columns: Vec<Vec<f64>>, labels: &[&str]) -> Dataset<f64> {
    let schema = Schema::from_pairs((0..columns.len()).map(|i| (format!("f{i}"), FeatureKind::Continuous))).unwrap();
    Dataset::from_columns(schema, columns.into_iter().map(Column::Continuous).collect(), labels, &LabelScheme::binary()).unwrap()
}

/// Mixed table with distinct rows: `n` records, `m` continuous columns of
/// small integers and one categorical column, random binary labels.
pub fn random_mixed(rng: &mut ChaCha8Rng, n: usize, m: usize) -> (Vec<Column<f64>>, Vec<usize>) {
    let mut columns: Vec<Column<f64>> = (0..m)
        .map(|_| Column::Continuous((0..n).map(|_| rng.gen_range(0..6) as f64).collect()))
        .collect();
    columns.push(Column::Categorical {
        codes: (0..n).map(|_| rng.gen_range(0..4)).collect(),
        table: (0..4).map(|c| format!("c{c}")).collect(),
    });
    let labels = (0..n).map(|_| rng.gen_range(0..2)).collect();
    (columns, labels)
}

/// Gives every repeated feature vector the label of its first occurrence,
/// leaving a consistent table.
pub fn make_consistent(columns: &[Column<f64>], labels: &mut [usize]) {
    let mut seen: std::collections::HashMap<Vec<u64>, usize> = Default::default();
    for (r, label) in labels.iter_mut().enumerate() {
        let key: Vec<u64> = columns.iter().map(|c| c.real(r).to_bits()).collect();
        *label = *seen.entry(key).or_insert(*label);
    }
}
