//! Command-line front end. Every subcommand produces one CSV table.
//!
//! Floats are written with 17 significant digits, positionally when the
//! decimal exponent is in `-5..17` and in `d.ddde±x` form otherwise.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use crate::error::{domain, Error, Result};
use crate::extrema::{rho_exact, rho_series, RhoEstimate, RhoMethod};
use crate::gauss_cf::mc_cf_rho_curve;
use crate::luroth::{expand, reconstruct};
use crate::mori::{c_k, j2_partial_sums};
use crate::simulation::{
    max_scaled_cdf_exact, max_scaled_cdf_limit, mc_max_scaled_cdf, mc_rho, trimmed_ensemble,
};
use crate::HighPrecisionReal;

/// Slack allowed when checking a series bound against `--tol`.
const TOL_SLACK: f64 = 1e-6;

/// A CSV table plus whether every bound in it was certified.
#[derive(Clone, Debug, PartialEq)]
pub struct Csv {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub certified: bool,
}

impl Csv {
    fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
            certified: true,
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    let x = if x == 0.0 { 0.0 } else { x };
    let sci = format!("{x:.16e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..]
        .parse()
        .expect("integer exponent");
    if (-5..17).contains(&exp) {
        format!("{:.*}", (16 - exp) as usize, x)
    } else {
        sci
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RhoMode {
    Exact,
    Series,
    Mc,
    All,
}

impl RhoMode {
    fn methods(self) -> &'static [RhoMethod] {
        match self {
            RhoMode::Exact => &[RhoMethod::ExactFormula],
            RhoMode::Series => &[RhoMethod::Series],
            RhoMode::Mc => &[RhoMethod::MonteCarlo],
            RhoMode::All => &[RhoMethod::ExactFormula, RhoMethod::Series, RhoMethod::MonteCarlo],
        }
    }
}

/// Settings shared by the `rho` rows.
#[derive(Clone, Copy, Debug)]
pub struct RhoSettings {
    pub precision_bits: u32,
    pub tol: f64,
    pub samples: u64,
    pub seed: u64,
}

fn rho_row(k: u64, method: RhoMethod, s: &RhoSettings) -> Result<(RhoEstimate, bool)> {
    match method {
        RhoMethod::ExactFormula => Ok((rho_exact(k, s.precision_bits)?, true)),
        RhoMethod::Series => {
            let est = rho_series(k, s.tol)?;
            let ok = est.error_bound <= s.tol * (1.0 + TOL_SLACK);
            Ok((est, ok))
        }
        RhoMethod::MonteCarlo => {
            let r = mc_rho(k, s.samples, s.seed)?;
            let est = RhoEstimate {
                k,
                value: HighPrecisionReal::from_f64(r.estimate)?,
                error_bound: r.standard_error,
                method,
            };
            Ok((est, true))
        }
    }
}

/// `k,method,value,error_bound` for `k = 2..=k_max`. Monte Carlo rows carry
/// the standard error in the bound column.
pub fn cmd_rho(k_max: u64, mode: RhoMode, settings: &RhoSettings) -> Result<Csv> {
    if k_max < 2 {
        return domain("kmax", k_max, ">= 2");
    }
    let mut csv = Csv::new(&["k", "method", "value", "error_bound"]);
    for k in 2..=k_max {
        for &method in mode.methods() {
            let (est, ok) = rho_row(k, method, settings)?;
            csv.certified &= ok;
            csv.push(vec![
                k.to_string(),
                method.to_string(),
                format_float(est.value_f64()),
                format_float(est.error_bound),
            ]);
        }
    }
    Ok(csv)
}

/// Parses `p/q` or an integer.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("{s:?} is not a rational of the form p/q"));
    let s = s.trim();
    if s.is_empty() || s.contains(char::is_whitespace) {
        return Err(bad());
    }
    let (num, den) = s.split_once('/').unwrap_or((s, "1"));
    let num = num_bigint::BigInt::from_str(num).map_err(|_| bad())?;
    let den = num_bigint::BigInt::from_str(den).map_err(|_| bad())?;
    if den == num_bigint::BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// `index,digit` rows, then optionally `remainder,<p/q>`.
pub fn cmd_expand(x: &str, count: usize, with_remainder: bool) -> Result<Csv> {
    let x = parse_rational(x)?;
    let seq = expand(&x, count)?;
    let mut csv = Csv::new(&["index", "digit"]);
    for (i, d) in seq.digits().iter().enumerate() {
        csv.push(vec![(i + 1).to_string(), d.to_string()]);
    }
    if with_remainder {
        let r = seq.remainder().expect("exact expansion");
        csv.push(vec!["remainder".into(), r.to_string()]);
    }
    Ok(csv)
}

/// `exact,value`: the truncated Lüroth series of the digits.
pub fn cmd_reconstruct(digits: &[u64]) -> Result<Csv> {
    let r: BigRational = reconstruct(digits)?;
    let value = HighPrecisionReal::from_rational(&r, 64).to_f64();
    let mut csv = Csv::new(&["exact", "value"]);
    csv.push(vec![r.to_string(), format_float(value)]);
    Ok(csv)
}

/// `N,partial_sum` for `N = 3..=n_max`.
pub fn cmd_j2(n_max: u64) -> Result<Csv> {
    if n_max < 3 {
        return domain("nmax", n_max, ">= 3");
    }
    let mut csv = Csv::new(&["N", "partial_sum"]);
    for s in j2_partial_sums(n_max)?.into_iter().filter(|s| s.n >= 3) {
        csv.push(vec![s.n.to_string(), format_float(s.value)]);
    }
    Ok(csv)
}

/// Powers of ten below `k_max`, then `k_max` itself.
pub fn trim_checkpoints(k_max: u64) -> Vec<u64> {
    let mut out: Vec<u64> = std::iter::successors(Some(10u64), |p| p.checked_mul(10))
        .take_while(|&p| p < k_max)
        .collect();
    out.push(k_max);
    out
}

/// `seed,k,statistic,c_k` for seeds `first_seed..first_seed+seeds`, grouped
/// by checkpoint.
pub fn cmd_trim(k_max: u64, seeds: u64, first_seed: u64) -> Result<Csv> {
    if k_max < 2 {
        return domain("kmax", k_max, ">= 2");
    }
    if seeds < 1 {
        return domain("seeds", seeds, ">= 1");
    }
    let checkpoints = trim_checkpoints(k_max);
    let seed_list: Vec<u64> = (0..seeds).map(|i| first_seed.wrapping_add(i)).collect();
    let paths = trimmed_ensemble(k_max, &checkpoints, &seed_list)?;
    let mut csv = Csv::new(&["seed", "k", "statistic", "c_k"]);
    for (ci, &k) in checkpoints.iter().enumerate() {
        let ck = format_float(c_k(k)?);
        for (seed, path) in seed_list.iter().zip(&paths) {
            csv.push(vec![
                seed.to_string(),
                k.to_string(),
                format_float(path[ci].1),
                ck.clone(),
            ]);
        }
    }
    Ok(csv)
}

/// `c,empirical,exact_finite_k,limit_exp` for `P(M_k/k < c)`.
pub fn cmd_maxdist(k: u64, cs: &[f64], samples: u64, seed: u64) -> Result<Csv> {
    if cs.is_empty() {
        return domain("c", "[]", "at least one value");
    }
    let mut csv = Csv::new(&["c", "empirical", "exact_finite_k", "limit_exp"]);
    for &c in cs {
        let mc = mc_max_scaled_cdf(k, c, samples, seed)?;
        csv.push(vec![
            format_float(c),
            format_float(mc.estimate),
            format_float(max_scaled_cdf_exact(k, c)?),
            format_float(max_scaled_cdf_limit(c)),
        ]);
    }
    Ok(csv)
}

/// `k,rho_hat,se` for `k = 1..=k_max` continued-fraction digits, plus the
/// number of trials that hit zero.
pub fn cmd_cf(k_max: u64, samples: u64, seed: u64) -> Result<(Csv, u64)> {
    let curve = mc_cf_rho_curve(k_max as usize, samples, seed)?;
    let aborted = curve.first().map_or(0, |r| r.aborted);
    let mut csv = Csv::new(&["k", "rho_hat", "se"]);
    for r in curve {
        csv.push(vec![
            r.k.to_string(),
            format_float(r.result.estimate),
            format_float(r.result.standard_error),
        ]);
    }
    Ok((csv, aborted))
}

pub const FIG1_K_MAX: u64 = 40;
pub const FIG2_N_MAX: u64 = 1000;

/// `fig1.csv` (exact `ρ_k`, `k = 2..40`) and `fig2.csv` (`J₂` partial sums).
pub fn cmd_figures(settings: &RhoSettings) -> Result<[(&'static str, Csv); 2]> {
    Ok([
        ("fig1.csv", cmd_rho(FIG1_K_MAX, RhoMode::Exact, settings)?),
        ("fig2.csv", cmd_j2(FIG2_N_MAX)?),
    ])
}

fn positive_f64(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(_) => Err("must be a positive finite number".into()),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Parser)]
#[command(name = "luroth", version, about = "Lüroth digit statistics as CSV")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, default_value_t = 1_000_000,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,

    #[arg(long = "precision-bits", global = true, default_value_t = 128,
          value_parser = clap::value_parser!(u32).range(1..))]
    pub precision_bits: u32,

    #[arg(long, global = true, default_value_t = 1e-6, value_parser = positive_f64)]
    pub tol: f64,

    /// Largest k (rho, trim, cf).
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub kmax: Option<u32>,

    /// Output file; a directory for `figures`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = RhoMode::Exact)]
    pub mode: RhoMode,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Probability that the maximum of k digits is unique.
    Rho,
    /// Lüroth digits of a rational p/q in (0, 1].
    Expand {
        x: String,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        /// Append the exact remainder as a final row.
        #[arg(long)]
        remainder: bool,
    },
    /// Rational value of a finite digit string.
    Reconstruct {
        #[arg(required = true, value_delimiter = ',')]
        digits: Vec<u64>,
    },
    /// Partial sums of the J2 series.
    J2 {
        #[arg(long, default_value_t = 1000)]
        nmax: u64,
    },
    /// Trimmed sums (S_k - M_k)/(k ln k) along independent paths.
    Trim {
        #[arg(long, default_value_t = 32, value_parser = clap::value_parser!(u64).range(1..))]
        seeds: u64,
    },
    /// Distribution of the scaled maximum M_k/k.
    Maxdist {
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        #[arg(long = "c", default_value = "1", value_parser = positive_f64)]
        c: Vec<f64>,
    },
    /// Unique-maximum probability for continued-fraction digits.
    Cf {
        #[arg(long, default_value_t = 32, value_parser = clap::value_parser!(u64).range(1..=40))]
        k: u64,
    },
    /// Write fig1.csv and fig2.csv.
    Figures,
}

fn write_output(csv: &Csv, out: Option<&Path>) -> std::io::Result<()> {
    use std::io::Write;
    let text = csv.render();
    match out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Domain { .. } | Error::Parse(_) | Error::EmptyDigits => 2,
        _ => 1,
    }
}

fn execute(cli: &Cli) -> Result<(Vec<(PathBuf, Csv)>, Option<Csv>, Vec<String>)> {
    let settings = RhoSettings {
        precision_bits: cli.precision_bits,
        tol: cli.tol,
        samples: cli.samples,
        seed: cli.seed,
    };
    let mut notes = Vec::new();
    let csv = match &cli.command {
        Command::Rho => cmd_rho(cli.kmax.map_or(40, u64::from), cli.mode, &settings)?,
        Command::Expand {
            x,
            count,
            remainder,
        } => cmd_expand(x, *count as usize, *remainder)?,
        Command::Reconstruct { digits } => cmd_reconstruct(digits)?,
        Command::J2 { nmax } => cmd_j2(*nmax)?,
        Command::Trim { seeds } => cmd_trim(cli.kmax.map_or(1_000_000, u64::from), *seeds, cli.seed)?,
        Command::Maxdist { k, c } => cmd_maxdist(*k, c, cli.samples, cli.seed)?,
        Command::Cf { k } => {
            let (csv, aborted) = cmd_cf(*k, cli.samples, cli.seed)?;
            if aborted > 0 {
                notes.push(format!("{aborted} trials hit zero and were excluded"));
            }
            csv
        }
        Command::Figures => {
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
            let files = cmd_figures(&settings)?
                .into_iter()
                .map(|(name, csv)| (dir.join(name), csv))
                .collect();
            return Ok((files, None, notes));
        }
    };
    Ok((Vec::new(), Some(csv), notes))
}

/// Runs the CLI and returns the process exit code: 0 when every bound was
/// certified, 1 on computation or I/O failure, 2 on bad input.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let (files, single, notes) = match execute(&cli) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code_for(&e);
        }
    };
    for note in notes {
        eprintln!("note: {note}");
    }
    let mut certified = true;
    let mut written = Vec::new();
    for (path, csv) in &files {
        certified &= csv.certified;
        written.push((csv, Some(path.as_path())));
    }
    if let Some(csv) = &single {
        certified &= csv.certified;
        written.push((csv, cli.out.as_deref()));
    }
    for (csv, path) in written {
        if let Err(e) = write_output(csv, path) {
            let target = path.map_or("stdout".into(), |p| p.display().to_string());
            eprintln!("error: cannot write {target}: {e}");
            return 1;
        }
    }
    if !certified {
        eprintln!("error: some error bounds were not certified");
        return 1;
    }
    0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_has_17_digits() {
        assert_eq!(format_float(0.5), "0.50000000000000000");
        assert_eq!(format_float(1.0), "1.0000000000000000");
        assert_eq!(format_float(0.0), "0.0000000000000000");
        assert_eq!(format_float(-0.0), "0.0000000000000000");
        assert_eq!(format_float(123.25), "123.25000000000000");
        assert_eq!(format_float(1e-3), "0.0010000000000000000");
        assert_eq!(format_float(1e-6), "9.9999999999999995e-7");
        assert_eq!(format_float(0.5e-6), "4.9999999999999998e-7");
        assert_eq!(format_float(1e20), "1.0000000000000000e20");
        assert_eq!(format_float(0.1), "0.10000000000000001");
        assert_eq!(format_float(f64::NAN), "NaN");
    }

    #[test]
    fn formatted_floats_round_trip() {
        for x in [std::f64::consts::PI, 1.0 / 3.0, 7.1e-300, 0.70_1, 9.999_999_999_999_999e16] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("1/2").unwrap().to_string(), "1/2");
        assert_eq!(parse_rational("1").unwrap().to_string(), "1");
        assert_eq!(parse_rational("4/8").unwrap().to_string(), "1/2");
        for bad in ["", "1/0", "a/2", "1/2/3", "1 /2", "0.5"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn expand_examples() {
        let csv = cmd_expand("1/2", 3, false).unwrap();
        let digits: Vec<&str> = csv.rows.iter().map(|r| r[1].as_str()).collect();
        assert_eq!(digits, ["2", "1", "1"]);
        let csv = cmd_expand("1", 2, true).unwrap();
        assert_eq!(csv.render(), "index,digit\n1,1\n2,1\nremainder,1\n");
        assert!(cmd_expand("3/2", 1, false).is_err());
    }

    #[test]
    fn checkpoints() {
        assert_eq!(trim_checkpoints(1_000_000), [10, 100, 1000, 10_000, 100_000, 1_000_000]);
        assert_eq!(trim_checkpoints(2500), [10, 100, 1000, 2500]);
        assert_eq!(trim_checkpoints(5), [5]);
    }

    #[test]
    fn rho_needs_two() {
        let s = RhoSettings {
            precision_bits: 128,
            tol: 1e-6,
            samples: 1000,
            seed: 0,
        };
        assert!(matches!(cmd_rho(1, RhoMode::Exact, &s), Err(Error::Domain { .. })));
        let csv = cmd_rho(2, RhoMode::Exact, &s).unwrap();
        assert_eq!(csv.rows[0][0..2], ["2", "exact-formula"]);
        assert!(csv.rows[0][2].starts_with("0.71013"));
    }
}
