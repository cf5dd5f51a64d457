//! Command-line driver for the exact verification library.
//!
//! Subcommands:
//!
//! - `verify-ogg`: every check at one pair `(N, p)`; exits 0 when all
//!   checks pass, 1 when a check fails, 2 on invalid input.
//! - `batch`: every square-free level in a range against every prime
//!   `p <= pmax` with `p` not dividing `6N`.
//! - `basis`: the Eisenstein basis `f_d` at a level.
//! - `cuspforms`: the integral basis of cusp forms at a level.
//! - `cuspidal`: cuspidal group invariants, the values of the functional
//!   `lambda` on the p-primary generators, and the cyclicity certificate.
//! - `ideal`: Eisenstein ideal data at `(N, p)`: ranks, the index
//!   `[T : I]`, the comparison of `J` with `I~`, and the membership
//!   checks for the unit-derived elements.
//!
//! Formats: `text` (default, human-readable, with timings), `json`
//! (stable keys, for scripting), and `csv` for coefficient tables and
//! batch summaries.

use std::error::Error;
use std::fmt::Write as _;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num::{BigInt, BigRational, One, Zero};
use serde_json::json;

use cuspidal::qexp::Series;
use cuspidal::{cusps, eisenstein, hecke, modsym, qexp, verify};

#[derive(Parser)]
#[command(
    name = "cuspidal",
    version,
    about = "Exact verification of cuspidal subgroups, Eisenstein ideals, \
             and p-primary order equalities for J_0(N) at square-free levels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check at one pair (N, p)
    VerifyOgg {
        /// Square-free level N >= 2
        #[arg(long)]
        level: u64,
        /// Prime p not dividing 6N
        #[arg(long)]
        p: u64,
        /// Largest auxiliary prime used when generating the ideal J
        #[arg(long)]
        qmax: Option<u64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Verify a range of levels against all admissible primes
    Batch {
        /// Inclusive level range "A..B" (a single level "N" also works)
        #[arg(long, value_parser = parse_levels)]
        levels: (u64, u64),
        /// Largest prime to test at each level
        #[arg(long)]
        pmax: u64,
        /// Largest auxiliary prime used when generating the ideal J
        #[arg(long)]
        qmax: Option<u64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print the Eisenstein basis f_d at a level
    Basis {
        /// Square-free level N >= 2
        #[arg(long)]
        level: u64,
        /// Coefficients a_0..a_prec (default: the Sturm bound)
        #[arg(long)]
        prec: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print the integral basis of cusp forms at a level
    Cuspforms {
        /// Square-free level N >= 2
        #[arg(long)]
        level: u64,
        /// Coefficients a_0..a_prec
        #[arg(long)]
        prec: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Cuspidal group invariants, lambda values, and cyclicity at (N, p)
    Cuspidal {
        /// Square-free level N >= 2
        #[arg(long)]
        level: u64,
        /// Prime p not dividing 6N
        #[arg(long)]
        p: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Eisenstein ideal data at (N, p)
    Ideal {
        /// Square-free level N >= 2
        #[arg(long)]
        level: u64,
        /// Prime p not dividing 6N
        #[arg(long)]
        p: u64,
        /// Largest auxiliary prime used when generating the ideal J
        #[arg(long)]
        qmax: Option<u64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

fn parse_levels(s: &str) -> Result<(u64, u64), String> {
    if let Some((a, b)) = s.split_once("..") {
        let lo: u64 = a.trim().parse().map_err(|_| format!("bad level '{}'", a))?;
        let hi: u64 = b.trim().parse().map_err(|_| format!("bad level '{}'", b))?;
        if lo > hi {
            return Err(format!("empty level range {}..{}", lo, hi));
        }
        Ok((lo, hi))
    } else {
        let n: u64 = s.trim().parse().map_err(|_| format!("bad level '{}'", s))?;
        Ok((n, n))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    match run(cli.command, &mut out) {
        Ok(code) => {
            print_guarded(&out);
            code
        }
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(2)
        }
    }
}

/// Writes to stdout, treating a closed pipe (`cuspidal ... | head`) as a
/// clean exit instead of a panic.
fn print_guarded(s: &str) {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(s.as_bytes()).and_then(|_| stdout.flush());
}

fn run(cmd: Command, out: &mut String) -> Result<ExitCode, Box<dyn Error>> {
    match cmd {
        Command::VerifyOgg { level, p, qmax, format } => {
            run_verify(level, p, qmax, format, out)
        }
        Command::Batch { levels, pmax, qmax, format } => {
            run_batch(levels, pmax, qmax, format, out)
        }
        Command::Basis { level, prec, format } => {
            run_basis(level, prec, format, out)
        }
        Command::Cuspforms { level, prec, format } => {
            run_cuspforms(level, prec, format, out)
        }
        Command::Cuspidal { level, p, format } => {
            run_cuspidal(level, p, format, out)
        }
        Command::Ideal { level, p, qmax, format } => {
            run_ideal(level, p, qmax, format, out)
        }
    }
}

fn reject_csv(format: Format, cmd: &str) -> Result<(), Box<dyn Error>> {
    if format == Format::Csv {
        return Err(format!("{} has no csv output; use text or json", cmd).into());
    }
    Ok(())
}

fn line(out: &mut String, args: std::fmt::Arguments<'_>) {
    out.write_fmt(args).expect("writing to a String cannot fail");
    out.push('\n');
}

macro_rules! outln {
    ($out:expr, $($arg:tt)*) => { line($out, format_args!($($arg)*)) };
}

fn run_verify(
    level: u64,
    p: u64,
    qmax: Option<u64>,
    format: Format,
    out: &mut String,
) -> Result<ExitCode, Box<dyn Error>> {
    reject_csv(format, "verify-ogg")?;
    let start = Instant::now();
    let report = verify::verify_ogg(level, p, qmax)?;
    let ok = report.passed();
    match format {
        Format::Json => outln!(out, "{}", serde_json::to_string_pretty(&report)?),
        _ => {
            outln!(out, "level {}, p = {} (genus {})", report.level, report.p,
                report.genus);
            outln!(out,
                "  ord_p|C| = {}   ord_p[T:I] = {}   ord_p|X| = {}   torsion bound = {}",
                report.ord_p_cuspidal, report.ord_p_index, report.ord_p_x,
                report.torsion_bound);
            outln!(out, "  cuspidal invariants [{}], lambda denominators [{}]",
                report.cuspidal_invariants.join(", "),
                report.lambda_denominators.join(", "));
            for (name, val) in report.flags() {
                outln!(out, "  {:<24} {}", name, if val { "pass" } else { "FAIL" });
            }
            outln!(out, "{} in {:.2}s", if ok { "PASS" } else { "FAIL" },
                start.elapsed().as_secs_f64());
        }
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run_batch(
    (lo, hi): (u64, u64),
    pmax: u64,
    qmax: Option<u64>,
    format: Format,
    out: &mut String,
) -> Result<ExitCode, Box<dyn Error>> {
    let start = Instant::now();
    let b = verify::batch(lo, hi, pmax, qmax.unwrap_or(verify::DEFAULT_QMAX));
    match format {
        Format::Json => outln!(out, "{}", serde_json::to_string_pretty(&b)?),
        Format::Csv => {
            outln!(out,
                "level,p,passed,ord_p_cuspidal,ord_p_index,ord_p_x,\
                 torsion_bound,bound_tight");
            for e in &b.entries {
                match &e.report {
                    Some(r) => outln!(out, "{},{},{},{},{},{},{},{}",
                        e.level, e.p, e.passed, r.ord_p_cuspidal, r.ord_p_index,
                        r.ord_p_x, r.torsion_bound, r.bound_tight),
                    None => outln!(out, "{},{},{},,,,,", e.level, e.p, e.passed),
                }
            }
        }
        Format::Text => {
            for e in &b.entries {
                match (&e.report, &e.error) {
                    (Some(r), _) => outln!(out,
                        "N={:<3} p={:<3} {}  ords {}/{}/{}  bound {}{}",
                        e.level, e.p,
                        if e.passed { "PASS" } else { "FAIL" },
                        r.ord_p_cuspidal, r.ord_p_index, r.ord_p_x,
                        r.torsion_bound,
                        if r.bound_tight { "" } else { " (not tight)" }),
                    (None, Some(msg)) => {
                        outln!(out, "N={:<3} p={:<3} ERROR  {}", e.level, e.p, msg)
                    }
                    (None, None) => {
                        outln!(out, "N={:<3} p={:<3} ERROR", e.level, e.p)
                    }
                }
            }
            outln!(out, "{} pairs, {} failures in {:.2}s", b.pairs, b.failures,
                start.elapsed().as_secs_f64());
        }
    }
    Ok(if b.all_passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run_basis(
    level: u64,
    prec: Option<usize>,
    format: Format,
    out: &mut String,
) -> Result<ExitCode, Box<dyn Error>> {
    let prec = match prec {
        Some(b) => b,
        None => qexp::sturm_bound(level)?,
    };
    let basis = eisenstein::fd_basis(level, prec)?;
    match format {
        Format::Json => {
            let forms: Vec<serde_json::Value> = basis
                .forms
                .iter()
                .map(|(d, s)| json!({ "d": d, "coefficients": coeff_strings(s) }))
                .collect();
            let v = json!({
                "level": level,
                "precision": prec,
                "forms": forms,
            });
            outln!(out, "{}", serde_json::to_string_pretty(&v)?);
        }
        Format::Csv => csv_forms(out, basis.forms.iter().map(|(_, s)| s)),
        Format::Text => {
            outln!(out,
                "level {}: Eisenstein basis, {} forms, coefficients a_0..a_{}",
                level, basis.rank(), prec);
            for (d, s) in &basis.forms {
                outln!(out, "f_{} = {}", d, fmt_series(s));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_cuspforms(
    level: u64,
    prec: usize,
    format: Format,
    out: &mut String,
) -> Result<ExitCode, Box<dyn Error>> {
    let forms = modsym::integral_cuspform_basis(level, prec)?;
    match format {
        Format::Json => {
            let rows: Vec<Vec<String>> = forms.iter().map(coeff_strings).collect();
            let v = json!({
                "level": level,
                "precision": prec,
                "forms": rows,
            });
            outln!(out, "{}", serde_json::to_string_pretty(&v)?);
        }
        Format::Csv => csv_forms(out, forms.iter()),
        Format::Text => {
            outln!(out, "level {}: {} cusp forms, coefficients a_0..a_{}",
                level, forms.len(), prec);
            for (i, s) in forms.iter().enumerate() {
                outln!(out, "f{} = {}", i + 1, fmt_series(s));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_cuspidal(
    level: u64,
    p: u64,
    format: Format,
    out: &mut String,
) -> Result<ExitCode, Box<dyn Error>> {
    reject_csv(format, "cuspidal")?;
    let ha = hecke::hecke_algebra(level)?;
    let cg = cusps::cuspidal_group(level)?;
    let lam = cusps::lambda_and_cyclicity(&ha, &cg, p)?;
    let invariants: Vec<String> =
        cg.invariants.iter().map(|d| d.to_string()).collect();
    let p_invariants = cg.p_invariants(p);
    let values: Vec<String> = lam.values.iter().map(|x| x.to_string()).collect();
    let denominators: Vec<String> =
        lam.denominators.iter().map(|x| x.to_string()).collect();
    match format {
        Format::Json => {
            let v = json!({
                "level": level,
                "p": p,
                "invariants": invariants,
                "p_invariants": p_invariants,
                "lambda_values": values,
                "lambda_denominators": denominators,
                "cyclic": lam.cyclic,
            });
            outln!(out, "{}", serde_json::to_string_pretty(&v)?);
        }
        _ => {
            outln!(out, "level {}, p = {}", level, p);
            outln!(out, "  cuspidal group invariants: [{}]", invariants.join(", "));
            if p_invariants.is_empty() {
                outln!(out, "  p-primary part: trivial");
            } else {
                let parts: Vec<String> = p_invariants
                    .iter()
                    .map(|e| format!("Z/{}^{}", p, e))
                    .collect();
                outln!(out, "  p-primary part: {}", parts.join(" x "));
                outln!(out, "  lambda values: [{}]", values.join(", "));
            }
            outln!(out, "  cyclic Hecke module: {}",
                if lam.cyclic { "yes" } else { "NO" });
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_ideal(
    level: u64,
    p: u64,
    qmax: Option<u64>,
    format: Format,
    out: &mut String,
) -> Result<ExitCode, Box<dyn Error>> {
    reject_csv(format, "ideal")?;
    let mut ha = hecke::hecke_algebra(level)?;
    let cd = ha.cuspidal_data();
    let index_ord = ha.cuspidal_index_ppart(&cd, p)?;
    let j = ha.ideal_j(p, qmax.unwrap_or(verify::DEFAULT_QMAX))?;
    let mem = ha.memberships(&j, p);
    let presentation_ok = ha.presentation_check(p)?;
    let rank_itilde = ha.itilde.rank();
    let rank_quot = ha.rank - rank_itilde;
    let index_ppart = BigInt::from(p).pow(index_ord);
    match format {
        Format::Json => {
            let v = json!({
                "level": level,
                "p": p,
                "rank_Ttilde": ha.rank,
                "rank_Itilde": rank_itilde,
                "rank_TtildeI": rank_quot,
                "ord_p_index_TI": index_ord,
                "index_TI_ppart": index_ppart.to_string(),
                "J_primes": j.primes_used,
                "ord_p_index_Itilde_J": j.index_ord,
                "J_equals_Itilde_ppart": j.index_ord == 0,
                "memberships": {
                    "quadratic_in_Itilde": mem.quadratic_in_itilde,
                    "product_in_Itilde": mem.product_in_itilde,
                    "quadratic_in_J": mem.quadratic_in_j,
                    "product_in_J": mem.product_in_j,
                    "all": mem.all_hold(),
                },
                "presentation_ok": presentation_ok,
            });
            outln!(out, "{}", serde_json::to_string_pretty(&v)?);
        }
        _ => {
            outln!(out, "level {}, p = {}", level, p);
            outln!(out, "  rank T~ = {}, rank I~ = {}, rank T~/I~ = {}",
                ha.rank, rank_itilde, rank_quot);
            outln!(out, "  ord_p[T:I] = {} (p-part {})", index_ord, index_ppart);
            let qs: Vec<String> =
                j.primes_used.iter().map(|q| q.to_string()).collect();
            outln!(out, "  J from primes [{}]; ord_p[I~:J] = {}; J = I~ at p: {}",
                qs.join(", "), j.index_ord,
                if j.index_ord == 0 { "yes" } else { "NO" });
            outln!(out,
                "  memberships: (U-1)(U-l) in I~ {}, product in I~ {}, \
                 in J at p: {} / {}",
                yn(mem.quadratic_in_itilde), yn(mem.product_in_itilde),
                yn(mem.quadratic_in_j), yn(mem.product_in_j));
            outln!(out, "  presentation check: {}",
                if presentation_ok { "pass" } else { "FAIL" });
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn yn(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "NO"
    }
}

fn coeff_strings(s: &Series) -> Vec<String> {
    s.coeffs().iter().map(|c| c.to_string()).collect()
}

/// Rows `n,numerator,denominator`, one block per form, blocks separated
/// by `# f<i>` comment lines; a single header row comes first.
fn csv_forms<'a>(out: &mut String, forms: impl Iterator<Item = &'a Series>) {
    outln!(out, "n,numerator,denominator");
    for (i, s) in forms.enumerate() {
        outln!(out, "# f{}", i + 1);
        for (n, c) in s.coeffs().iter().enumerate() {
            outln!(out, "{},{},{}", n, c.numer(), c.denom());
        }
    }
}

/// Renders a truncated q-expansion as a polynomial in q with an explicit
/// remainder term, e.g. `55 + 132*q + 396*q^2 + O(q^3)`.
fn fmt_series(s: &Series) -> String {
    let one = BigRational::one();
    let mut parts: Vec<String> = Vec::new();
    for (k, c) in s.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mono = match k {
            0 => String::new(),
            1 => "q".to_string(),
            _ => format!("q^{}", k),
        };
        let term = if k == 0 {
            c.to_string()
        } else if *c == one {
            mono
        } else if *c == -&one {
            format!("-{}", mono)
        } else {
            format!("{}*{}", c, mono)
        };
        parts.push(term);
    }
    let body = if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ").replace("+ -", "- ")
    };
    format!("{} + O(q^{})", body, s.precision() + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_parse_levels() {
        assert_eq!(parse_levels("2..60").unwrap(), (2, 60));
        assert_eq!(parse_levels("11").unwrap(), (11, 11));
        assert!(parse_levels("9..3").is_err());
        assert!(parse_levels("x..3").is_err());
        assert!(parse_levels("").is_err());
    }

    #[test]
    fn test_fmt_series() {
        let br = |x: i64| BigRational::from(BigInt::from(x));
        let s = Series::new(vec![br(55), br(132), br(396)]);
        assert_eq!(fmt_series(&s), "55 + 132*q + 396*q^2 + O(q^3)");
        let t = Series::new(vec![br(0), br(1), br(-2), br(-1)]);
        assert_eq!(fmt_series(&t), "q - 2*q^2 - q^3 + O(q^4)");
        let z = Series::zero(2);
        assert_eq!(fmt_series(&z), "0 + O(q^3)");
        let h = Series::new(vec![
            BigRational::new(BigInt::from(5), BigInt::from(12)),
            br(1),
        ]);
        assert_eq!(fmt_series(&h), "5/12 + q + O(q^2)");
    }
}
