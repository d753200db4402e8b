//! Synthetic rows in the AI4I schema.
//!
//! The public AI4I 2020 file is itself simulated, and its documentation
//! describes the generating process: product mix L/M/H = 50/30/20 %,
//! air temperature as a random walk normalised to 300 ± 2 K, process
//! temperature 10 K above it with ±1 K, torque around 40 Nm with rotational
//! speed tied to it through roughly constant power, tool wear growing by
//! 5/3/2 minutes per process for H/M/L, and five rule-based failure modes.
//! This module follows that description so the pipeline can be exercised
//! end to end when the original file is not at hand. The rows are NOT the
//! published dataset and carry none of its exact counts.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{FailureModes, RawRecord, TypeCode};
use crate::rng;

fn normalise(series: &mut [f64], mean: f64, sd: f64) {
    let n = series.len() as f64;
    let mu = series.iter().sum::<f64>() / n;
    let var = series.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / n;
    let s = if var > 0.0 { var.sqrt() } else { 1.0 };
    for v in series.iter_mut() {
        *v = mean + sd * (*v - mu) / s;
    }
}

fn walk(n: usize, rng: &mut rng::Rng) -> Vec<f64> {
    let step = Normal::new(0.0, 1.0).unwrap();
    let mut out = Vec::with_capacity(n);
    let mut x = 0.0;
    for _ in 0..n {
        x = 0.995 * x + step.sample(rng);
        out.push(x);
    }
    out
}

fn one_decimal(v: f64) -> f64 {
    (v * 10.0).round() / 10.0
}

pub fn generate(n: usize, seed: u64) -> Vec<RawRecord> {
    if n == 0 {
        return Vec::new();
    }
    let mut rng = rng::seeded(seed);
    let mut air = walk(n, &mut rng);
    normalise(&mut air, 300.0, 2.0);
    let mut offset = walk(n, &mut rng);
    normalise(&mut offset, 0.0, 1.0);

    let torque_dist = Normal::new(40.0, 10.0).unwrap();
    let speed_noise = Normal::new(0.0, 85.0).unwrap();

    let mut wear = 0.0_f64;
    let mut replace_at = rng.random_range(200.0..240.0);
    let mut records = Vec::with_capacity(n);

    for i in 0..n {
        let u: f64 = rng.random();
        let type_code = if u < 0.5 {
            TypeCode::L
        } else if u < 0.8 {
            TypeCode::M
        } else {
            TypeCode::H
        };
        let air_temp = one_decimal(air[i]);
        let process_temp = one_decimal(air[i] + 10.0 + offset[i]);

        let torque = loop {
            let t: f64 = torque_dist.sample(&mut rng);
            if t > 3.8 {
                break one_decimal(t);
            }
        };
        let rot_speed = (1538.8 - 15.8 * (torque - 40.0) + speed_noise.sample(&mut rng))
            .max(1168.0)
            .round();

        let tool_wear = wear;
        let twf = if wear >= replace_at {
            let failed = rng.random::<f64>() < 0.43;
            wear = 0.0;
            replace_at = rng.random_range(200.0..240.0);
            failed
        } else {
            wear += match type_code {
                TypeCode::H => 5.0,
                TypeCode::M => 3.0,
                TypeCode::L => 2.0,
            };
            false
        };

        let hdf = process_temp - air_temp < 8.6 && rot_speed < 1380.0;
        let power = torque * rot_speed * std::f64::consts::TAU / 60.0;
        let pwf = !(3500.0..=9000.0).contains(&power);
        let strain_limit = match type_code {
            TypeCode::L => 11_000.0,
            TypeCode::M => 12_000.0,
            TypeCode::H => 13_000.0,
        };
        let osf = tool_wear * torque > strain_limit;
        let rnf = rng.random::<f64>() < 0.001;
        let modes = FailureModes {
            twf,
            hdf,
            pwf,
            osf,
            rnf,
        };

        records.push(RawRecord {
            udi: i as u64 + 1,
            product_id: format!("{type_code}{}", rng.random_range(10_000..100_000)),
            type_code,
            air_temp,
            process_temp,
            rot_speed,
            torque,
            tool_wear,
            machine_failure: u8::from(twf || hdf || pwf || osf || rnf),
            modes,
        });
    }
    records
}
