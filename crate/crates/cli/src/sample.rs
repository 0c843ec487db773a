use std::io::Write;

use facet_volumes::simplex::{
    classify, derived_rng, facet_volume_vector, sample_gaussian_simplex, squared_volume_vector, ShapeClass,
    SHAPE_TOL,
};
use facet_volumes::Result;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleRecord {
    pub squared_volumes: Vec<f64>,
    /// `squared_volumes / sum(squared_volumes)`.
    pub normalized_squared: Vec<f64>,
    #[serde(serialize_with = "display")]
    pub class: ShapeClass,
    pub seed_index: u64,
}

fn display<S: serde::Serializer>(c: &ShapeClass, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(c)
}

/// Record `index` of the stream for `seed`; independent of every other index.
pub fn sample_record(d: usize, seed: u64, index: u64) -> Result<SampleRecord> {
    let simplex = sample_gaussian_simplex(d, &mut derived_rng(seed, index))?;
    let f = facet_volume_vector(&simplex)?;
    let squared = squared_volume_vector(&f);
    let total: f64 = squared.iter().sum();
    Ok(SampleRecord {
        normalized_squared: squared.iter().map(|s| s / total).collect(),
        squared_volumes: squared,
        class: classify(&f, SHAPE_TOL),
        seed_index: index,
    })
}

/// `count` records in index order, generated in parallel.
pub fn sample_records(d: usize, count: usize, seed: u64) -> Result<Vec<SampleRecord>> {
    (0..count as u64)
        .into_par_iter()
        .map(|i| sample_record(d, seed, i))
        .collect()
}

pub fn csv_header(d: usize) -> String {
    let mut cols: Vec<String> = (1..=d + 1).map(|i| format!("s{i}")).collect();
    cols.push("class".into());
    cols.push("seed_index".into());
    cols.join(",")
}

pub fn write_csv<W: Write>(out: &mut W, d: usize, records: &[SampleRecord]) -> std::io::Result<()> {
    writeln!(out, "{}", csv_header(d))?;
    for r in records {
        for s in &r.normalized_squared {
            write!(out, "{s:.16e},")?;
        }
        writeln!(out, "{},{}", r.class, r.seed_index)?;
    }
    Ok(())
}

pub fn write_json<W: Write>(out: &mut W, records: &[SampleRecord]) -> std::io::Result<()> {
    writeln!(out, "[")?;
    for (i, r) in records.iter().enumerate() {
        serde_json::to_writer(&mut *out, r)?;
        writeln!(out, "{}", if i + 1 < records.len() { "," } else { "" })?;
    }
    writeln!(out, "]")
}
