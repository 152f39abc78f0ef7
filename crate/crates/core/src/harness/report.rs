//! CSV and text artifacts of a comparison run.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{Comparison, FrequencyOfFrequency, Histogram, UniformityReport};
use crate::Result;

/// `count,multiplicity` rows in ascending count order.
pub fn fof_csv(fof: &FrequencyOfFrequency) -> String {
    let mut out = String::from("count,multiplicity\n");
    for (c, m) in fof.iter() {
        writeln!(out, "{c},{m}").unwrap();
    }
    out
}

/// `witness,count` rows; a witness is its signed literals separated by spaces.
pub fn histogram_csv(h: &Histogram) -> String {
    let mut out = String::from("witness,count\n");
    for (w, c) in h.entries() {
        let lits: Vec<String> = w
            .to_lits()
            .iter()
            .map(|l| l.to_dimacs().to_string())
            .collect();
        writeln!(out, "{},{c}", lits.join(" ")).unwrap();
    }
    out
}

fn sig6(x: f64) -> String {
    format!("{x:.5e}")
}

pub fn summary_text(r: &UniformityReport, q: Option<i64>) -> String {
    let mut out = String::new();
    let mut line = |k: &str, v: String| writeln!(out, "{k:<20} {v}").unwrap();
    line("epsilon", sig6(r.epsilon));
    line("witnesses", r.witnesses.to_string());
    line("draws", r.draws.to_string());
    line("successes", r.successes.to_string());
    line("success_rate", sig6(r.success_rate));
    line("hash_width_q", q.map_or("none".into(), |q| q.to_string()));
    line("min_probability", sig6(r.min_probability));
    line("max_probability", sig6(r.max_probability));
    line("lower_bound", sig6(r.lower_bound));
    line("upper_bound", sig6(r.upper_bound));
    line("lower_limit", sig6(r.lower_limit));
    line("upper_limit", sig6(r.upper_limit));
    line("within_bounds", r.within_bounds.to_string());
    line("chi_square_sampler", sig6(r.chi_square_sampler));
    line("chi_square_ideal", sig6(r.chi_square_ideal));
    line("chi_square_ratio", sig6(r.chi_square_ratio()));
    out
}

#[derive(Debug, Clone)]
pub struct ReportFiles {
    pub summary: PathBuf,
    pub sampler_histogram: PathBuf,
    pub ideal_histogram: PathBuf,
    pub sampler_fof: PathBuf,
    pub ideal_fof: PathBuf,
}

/// Writes the summary and the four CSVs into `dir`, creating it if needed.
pub fn emit_report(dir: &Path, c: &Comparison) -> Result<ReportFiles> {
    fs::create_dir_all(dir)?;
    let files = ReportFiles {
        summary: dir.join("summary.txt"),
        sampler_histogram: dir.join("sampler_histogram.csv"),
        ideal_histogram: dir.join("ideal_histogram.csv"),
        sampler_fof: dir.join("sampler_fof.csv"),
        ideal_fof: dir.join("ideal_fof.csv"),
    };
    fs::write(&files.summary, summary_text(&c.report, c.q))?;
    fs::write(&files.sampler_histogram, histogram_csv(&c.sampled))?;
    fs::write(&files.ideal_histogram, histogram_csv(&c.ideal))?;
    fs::write(&files.sampler_fof, fof_csv(&c.sampled_fof()))?;
    fs::write(&files.ideal_fof, fof_csv(&c.ideal_fof()))?;
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::SamplingSet;

    #[test]
    fn empty_histogram_is_header_only() {
        let h = Histogram::new(&SamplingSet::from_indices(&[1, 2], 2).unwrap());
        assert_eq!(histogram_csv(&h), "witness,count\n");
        assert_eq!(
            fof_csv(&h.frequency_of_frequency(None)),
            "count,multiplicity\n"
        );
    }

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(1.0 / 1785.0), "5.60224e-4");
        assert_eq!(sig6(7.0 / 255.0), "2.74510e-2");
        assert_eq!(sig6(6.0), "6.00000e0");
    }
}
