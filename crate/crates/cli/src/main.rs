//! qtail: compute colored Jones tails as truncated q-series, verify the
//! Rogers-Ramanujan / false-theta identities they satisfy, run finite-color
//! stabilization and route cross-checks, and compare against the Kauffman
//! bracket oracle.
//!
//! Exit codes are the machine contract: 0 verified/success, 1 identity or
//! agreement mismatch (first mismatching exponent is reported), 2 usage
//! error.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qtail_core::bracket::{head_tail_match, jones2, kauffman_bracket, pretzel_pd, PDDiagram};
use qtail_core::qfun::{euler_function, pochhammer_q, SignedMonomial};
use qtail_core::series::TruncatedSeries;
use qtail_core::skein::{
    bubble_general, bubble_nann, bubble_sym, c_coeff, coeff_e, coeff_p, delta, gamma_coeff,
    theta_coeff, theta_nn2i, GammaMethod, Method,
};
use qtail_core::stabilization::{route_check, stabilization_check};
use qtail_core::tails::{
    tail_lk_multisum, tail_lk_product, tail_phi, tail_torus_even, tail_torus_odd, TailFamily,
    TailSpec,
};
use qtail_core::theta::{false_theta, ramanujan_theta};

#[derive(Parser)]
#[command(name = "qtail", version, about, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    TorusOdd,
    TorusEven,
    Phi,
    LkProduct,
    LkMultisum,
}

#[derive(Args)]
struct CommonOpts {
    /// Truncation: number of exact q coefficients to compute.
    #[arg(long, default_value_t = 100)]
    terms: i64,
    /// Worker threads for the outermost summation (QTAIL_JOBS overrides).
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, value_enum, default_value_t = Format::Plain)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a tail series for one of the knot/graph families.
    Tail {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, default_value_t = 1)]
        k: u64,
        /// Second Phi parameter (Phi family only).
        #[arg(long, default_value_t = 1)]
        u: u64,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Verify one of the named q-series identities; exit 1 on mismatch.
    Verify {
        #[arg(long)]
        identity: String,
        #[arg(long, default_value_t = 1)]
        k: u64,
        #[arg(long, default_value_t = 1)]
        u: u64,
        /// Color parameter for stabilize / routes-lk.
        #[arg(long, default_value_t = 3)]
        n: u64,
        /// Test hook: perturb one side by +q^7 before comparing.
        #[arg(long, default_value_t = false)]
        perturb: bool,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Finite-color stabilization check S_B^(n)/Delta_n vs the tail.
    Stabilize {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, default_value_t = 1)]
        k: u64,
        #[arg(long, default_value_t = 1)]
        u: u64,
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Kauffman bracket and Jones polynomial of a pretzel or PD diagram.
    Jones {
        /// Pretzel parameters, comma separated (e.g. 3,2,3).
        #[arg(long, value_delimiter = ',')]
        pretzel: Option<Vec<u64>>,
        /// Ad-hoc planar diagram code, e.g. "X[1,4,2,5];X[3,6,4,1];X[5,2,6,3]".
        #[arg(long)]
        pd: Option<String>,
        /// Compare the normalized ends against this family tail.
        #[arg(long, value_enum)]
        match_family: Option<FamilyArg>,
        #[arg(long, default_value_t = 1)]
        k: u64,
        #[arg(long, default_value_t = 1)]
        u: u64,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Inspect a single skein coefficient by name and indices.
    SkeinCoeff {
        /// delta | theta | theta-nn2i | bubble | bubble-nann | bubble-sym
        /// | e | p | c | gamma
        #[arg(long)]
        name: String,
        /// Indices, comma separated (meaning depends on the coefficient).
        #[arg(long, value_delimiter = ',')]
        indices: Vec<u64>,
        #[arg(long, value_enum, default_value_t = MethodArg::Closed)]
        method: MethodArg,
        #[command(flatten)]
        common: CommonOpts,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Definitional,
    Closed,
    Assembled,
}

fn jobs_of(common: &CommonOpts) -> usize {
    std::env::var("QTAIL_JOBS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(common.jobs)
        .max(1)
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn print_series(s: &TruncatedSeries, format: Format) {
    match format {
        Format::Plain => println!("{s}"),
        Format::Json => println!("{}", s.to_json()),
        Format::Csv => {
            println!("exponent,coefficient");
            for (i, c) in s.coeffs().iter().enumerate() {
                let e = s.offset() + i as i64;
                let g = s.grid() as i64;
                if e % g == 0 {
                    println!("{},{}", e / g, c);
                } else {
                    println!("{}/{},{}", e, g, c);
                }
            }
        }
    }
}

struct CheckLine {
    label: String,
    ok: bool,
    first_mismatch: Option<i64>,
}

fn report_checks(lines: &[CheckLine], format: Format) -> ExitCode {
    match format {
        Format::Json => {
            let items: Vec<_> = lines
                .iter()
                .map(|l| {
                    serde_json::json!({
                        "check": l.label,
                        "ok": l.ok,
                        "first_mismatch": l.first_mismatch,
                    })
                })
                .collect();
            println!("{}", serde_json::Value::Array(items));
        }
        Format::Csv => {
            println!("check,ok,first_mismatch");
            for l in lines {
                let fm = l.first_mismatch.map(|e| e.to_string()).unwrap_or_default();
                println!("{},{},{}", l.label, l.ok, fm);
            }
        }
        Format::Plain => {
            for l in lines {
                if l.ok {
                    println!("ok   {}", l.label);
                } else {
                    let fm = l
                        .first_mismatch
                        .map(|e| format!(" (first mismatch at q^{e})"))
                        .unwrap_or_default();
                    println!("FAIL {}{}", l.label, fm);
                }
            }
        }
    }
    if lines.iter().all(|l| l.ok) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

/// First exponent (integer grid, q units) where the two series differ on
/// their common known window.
fn first_mismatch(a: &TruncatedSeries, b: &TruncatedSeries) -> Option<i64> {
    let g = a.grid().max(b.grid());
    let a = a.promote(g).expect("grids unify");
    let b = b.promote(g).expect("grids unify");
    let t = a.trunc().min(b.trunc());
    let lo = a.offset().min(b.offset());
    for e in lo..t {
        if a.known_coeff(e) != b.known_coeff(e) {
            return Some(e.div_euclid(g as i64));
        }
    }
    None
}

fn compare(label: &str, a: &TruncatedSeries, b: &TruncatedSeries, perturb: bool) -> CheckLine {
    let b = if perturb {
        b.add(&TruncatedSeries::monomial(b.grid(), 1, 7 * b.grid() as i64))
    } else {
        b.clone()
    };
    let fm = first_mismatch(a, &b);
    CheckLine { label: label.to_string(), ok: fm.is_none(), first_mismatch: fm }
}

/// The published 8_5 tail display, evaluated directly:
///   (q;q)_inf^2 sum_{i,j} q^(i+i^2+j+j^2) (q;q)_(i+j) / ((q;q)_i^2 (q;q)_j^2)
fn t85_display(trunc: i64) -> TruncatedSeries {
    let mut sum = TruncatedSeries::zero(1, trunc);
    let mut i = 0i64;
    while i * (i + 1) < trunc {
        let mut j = 0i64;
        while i * (i + 1) + j * (j + 1) < trunc {
            let num = pochhammer_q((i + j) as u64).mul_monomial(1, i + i * i + j + j * j);
            let den = pochhammer_q(i as u64).pow(2).mul(&pochhammer_q(j as u64).pow(2));
            sum = sum.add(&num.div_to(&den, trunc).expect("unit denominator"));
            j += 1;
        }
        i += 1;
    }
    let e = euler_function(trunc);
    sum.mul(&e).mul(&e).truncate_to(trunc)
}

fn run_verify(
    identity: &str,
    k: u64,
    u: u64,
    n: u64,
    perturb: bool,
    common: &CommonOpts,
) -> Result<ExitCode, String> {
    let jobs = jobs_of(common);
    let t = common.terms;
    let err = |e: &dyn std::fmt::Display| format!("{e}");
    let mut lines = Vec::new();
    match identity {
        "false-theta-chain" => {
            let psi = false_theta(SignedMonomial::q_pow(3), SignedMonomial::q_pow(1), t)
                .map_err(|e| err(&e))?;
            let mid = tail_torus_even(2, t, jobs).map_err(|e| err(&e))?;
            let right = tail_lk_product(1, t, jobs).map_err(|e| err(&e))?;
            lines.push(compare("Psi(q^3,q) = (q;q)_inf sum q^(k^2+k)/(q;q)_k^2", &psi, &mid, perturb));
            lines.push(compare("middle = (q;q)_inf^2 sum q^k/(q;q)_k^2", &mid, &right, false));
        }
        "fock2" => {
            if k < 2 {
                return Err("fock2 needs --k >= 2".into());
            }
            let lhs = false_theta(SignedMonomial::q_pow(2 * k as i64 - 1), SignedMonomial::q_pow(1), t)
                .map_err(|e| err(&e))?;
            let rhs = tail_torus_even(k, t, jobs).map_err(|e| err(&e))?;
            lines.push(compare(&format!("Psi(q^{},q) = torus-even multi-sum k={k}", 2 * k - 1), &lhs, &rhs, perturb));
        }
        "and1" => {
            let lhs = ramanujan_theta(
                SignedMonomial::neg_q_pow(2 * k as i64),
                SignedMonomial::neg_q_pow(1),
                t,
            )
            .map_err(|e| err(&e))?;
            let rhs = tail_torus_odd(k, t, jobs).map_err(|e| err(&e))?;
            lines.push(compare(&format!("f(-q^{},-q) = torus-odd multi-sum k={k}", 2 * k), &lhs, &rhs, perturb));
            if k == 1 {
                lines.push(compare("k=1 multi-sum = (q;q)_inf", &rhs, &euler_function(t), false));
            }
        }
        "corollary" => {
            let a = tail_lk_product(k, t, jobs).map_err(|e| err(&e))?;
            let b = tail_lk_multisum(k, t, jobs).map_err(|e| err(&e))?;
            lines.push(compare(&format!("L_k product form = multi-sum form, k={k}"), &a, &b, perturb));
            if k == 1 {
                let psi = false_theta(SignedMonomial::q_pow(3), SignedMonomial::q_pow(1), t)
                    .map_err(|e| err(&e))?;
                lines.push(compare("k=1 = Psi(q^3,q)", &a, &psi, false));
            }
        }
        "phi-85" => {
            let a = tail_phi(1, 1, t, jobs).map_err(|e| err(&e))?;
            let b = t85_display(t);
            lines.push(compare("Phi(1,1) tail = published 8_5 display", &a, &b, perturb));
        }
        "routes-lk" => {
            let r = route_check(n, k, 2 * t).map_err(|e| err(&e))?;
            if common.format == Format::Json {
                println!("{}", r.to_json());
            } else {
                println!(
                    "theta vs bubble (corrected bound): {}",
                    if r.corrected_equal { "equal" } else { "MISMATCH" }
                );
                println!(
                    "theta vs bubble (printed bound):   {}",
                    match r.printed_first_mismatch {
                        None => "equal".to_string(),
                        Some(e) => format!("first mismatch at q^({e}/2)"),
                    }
                );
            }
            return Ok(if r.corrected_equal { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        "stabilize" => {
            return run_stabilize(FamilyArg::LkProduct, k, u, n, common);
        }
        "jones-match" => {
            let d = pretzel_pd(&[1, 1, 1]).map_err(|e| err(&e))?;
            let j = jones2(&d, jobs).map_err(|e| err(&e))?;
            let tail = tail_torus_odd(1, t.max(4), jobs).map_err(|e| err(&e))?;
            let (r, _) = head_tail_match(&j, &tail).map_err(|e| err(&e))?;
            lines.push(CheckLine {
                label: "jones2(P(1,1,1)) matches torus-odd k=1 tail on 2 coefficients".into(),
                ok: r.agreed_terms >= 2,
                first_mismatch: r.first_mismatch,
            });
        }
        other => return Err(format!("unknown identity {other:?}")),
    }
    Ok(report_checks(&lines, common.format))
}

fn family_of(arg: FamilyArg, k: u64, u: u64) -> TailFamily {
    match arg {
        FamilyArg::TorusOdd => TailFamily::TorusOdd { k },
        FamilyArg::TorusEven => TailFamily::TorusEven { k },
        FamilyArg::Phi => TailFamily::Phi { k, u },
        FamilyArg::LkProduct => TailFamily::LkProduct { k },
        FamilyArg::LkMultisum => TailFamily::LkMultisum { k },
    }
}

fn run_stabilize(
    family: FamilyArg,
    k: u64,
    u: u64,
    n: u64,
    common: &CommonOpts,
) -> Result<ExitCode, String> {
    let spec = TailSpec { family: family_of(family, k, u), trunc: common.terms };
    let report = stabilization_check(&spec, n).map_err(|e| e.to_string())?;
    let ok = report.agreed() && report.agreed_terms >= n as usize;
    let line = CheckLine {
        label: format!("S_B^({n})/Delta_{n} agrees with {:?} tail in {} terms", spec.family, n),
        ok,
        first_mismatch: report.first_mismatch,
    };
    Ok(report_checks(&[line], common.format))
}

fn run_jones(
    pretzel: Option<Vec<u64>>,
    pd: Option<String>,
    match_family: Option<FamilyArg>,
    k: u64,
    u: u64,
    common: &CommonOpts,
) -> Result<ExitCode, String> {
    let jobs = jobs_of(common);
    let diagram: PDDiagram = match (pretzel, pd) {
        (Some(p), None) => pretzel_pd(&p).map_err(|e| e.to_string())?,
        (None, Some(text)) => text.parse().map_err(|e: qtail_core::bracket::BracketError| e.to_string())?,
        _ => return Err("give exactly one of --pretzel or --pd".into()),
    };
    let bracket = kauffman_bracket(&diagram, jobs).map_err(|e| e.to_string())?;
    let j2 = jones2(&diagram, jobs).map_err(|e| e.to_string())?;
    let matched = match match_family {
        None => None,
        Some(f) => {
            let spec = TailSpec { family: family_of(f, k, u), trunc: common.terms.max(4) };
            let tail = spec.eval(jobs).map_err(|e| e.to_string())?;
            let (r, end) = head_tail_match(&j2, &tail).map_err(|e| e.to_string())?;
            Some((r, end))
        }
    };
    match common.format {
        Format::Json => {
            let mut obj = serde_json::json!({
                "components": diagram.component_count(),
                "writhe": diagram.writhe(),
                "bracket": bracket.to_json(),
                "jones2": j2.to_json(),
            });
            if let Some((r, end)) = &matched {
                obj["tail_match"] = serde_json::json!({
                    "agreed_terms": r.agreed_terms,
                    "first_mismatch": r.first_mismatch,
                    "end": format!("{end:?}"),
                    "ok": r.agreed_terms >= 2,
                });
            }
            println!("{obj}");
        }
        _ => {
            println!("components: {}", diagram.component_count());
            if let Some(w) = diagram.writhe() {
                println!("writhe: {w}");
            }
            println!("bracket (A = q^(1/4)): {bracket}");
            println!("jones2: {j2}");
            if let Some((r, end)) = &matched {
                println!(
                    "tail match: {} terms agreed on the {:?} end{}",
                    r.agreed_terms,
                    end,
                    r.first_mismatch
                        .map(|e| format!(", first mismatch q^{e}"))
                        .unwrap_or_default()
                );
            }
        }
    }
    if let Some((r, _)) = matched {
        if r.agreed_terms < 2 {
            return Ok(ExitCode::from(1));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_skein_coeff(
    name: &str,
    idx: &[u64],
    method: MethodArg,
    common: &CommonOpts,
) -> Result<ExitCode, String> {
    // trunc for grid-2 values: half-exponent units
    let t2 = 2 * common.terms;
    let need = |n: usize| -> Result<(), String> {
        if idx.len() != n {
            Err(format!("{name} needs {n} indices, got {}", idx.len()))
        } else {
            Ok(())
        }
    };
    let series = match name {
        "delta" => {
            need(1)?;
            delta(idx[0])
        }
        "theta" => {
            need(3)?;
            theta_coeff(idx[0], idx[1], idx[2], t2)
        }
        "theta-nn2i" => {
            need(2)?;
            theta_nn2i(idx[0], idx[1], t2).map_err(|e| e.to_string())?
        }
        "bubble" => {
            need(5)?;
            bubble_general(idx[0], idx[1], idx[2], idx[3], idx[4], t2).map_err(|e| e.to_string())?
        }
        "bubble-nann" => {
            need(3)?;
            bubble_nann(idx[0], idx[1], idx[2], t2).map_err(|e| e.to_string())?
        }
        "bubble-sym" => {
            need(3)?;
            bubble_sym(idx[0], idx[1], idx[2], t2).map_err(|e| e.to_string())?
        }
        "e" | "E" => {
            let m = if matches!(method, MethodArg::Definitional) {
                Method::Definitional
            } else {
                Method::Closed
            };
            coeff_e(idx[0], &idx[1..], m, t2).map_err(|e| e.to_string())?
        }
        "p" | "P" => {
            let m = if matches!(method, MethodArg::Definitional) {
                Method::Definitional
            } else {
                Method::Closed
            };
            coeff_p(idx[0], &idx[1..], m, t2).map_err(|e| e.to_string())?
        }
        "c" | "C" => {
            need(3)?;
            c_coeff(idx[0], idx[1], idx[2], t2).map_err(|e| e.to_string())?
        }
        "gamma" => {
            need(3)?;
            let m = if matches!(method, MethodArg::Assembled) {
                GammaMethod::Assembled
            } else {
                GammaMethod::Closed
            };
            gamma_coeff(idx[0], idx[1], idx[2], m, t2).map_err(|e| e.to_string())?
        }
        other => return Err(format!("unknown coefficient {other:?}")),
    };
    print_series(&series, common.format);
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Tail { family, k, u, common } => {
            let spec = TailSpec { family: family_of(*family, *k, *u), trunc: common.terms };
            match spec.eval(jobs_of(common)) {
                Ok(s) => {
                    print_series(&s, common.format);
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => Err(e.to_string()),
            }
        }
        Command::Verify { identity, k, u, n, perturb, common } => {
            run_verify(identity, *k, *u, *n, *perturb, common)
        }
        Command::Stabilize { family, k, u, n, common } => {
            run_stabilize(*family, *k, *u, *n, common)
        }
        Command::Jones { pretzel, pd, match_family, k, u, common } => {
            run_jones(pretzel.clone(), pd.clone(), *match_family, *k, *u, common)
        }
        Command::SkeinCoeff { name, indices, method, common } => {
            run_skein_coeff(name, indices, *method, common)
        }
    };
    result.unwrap_or_else(usage_error)
}
