//! `tangentcone` command-line front end. Every subcommand prints one JSON
//! document on standard output. Exit codes: 0 success, 1 bad input or domain
//! error, 2 structural failure (a checked identity did not hold).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use tangentcone::algebra::rational::{format_rational, parse_rational_list, Rational};
use tangentcone::distribution::generators::{
    check_involutive, commuting_family, eigen_constant, generators_symbolic, generators_to_level, random_points,
    rank_at_point, GeneratorSet, Strategy,
};
use tangentcone::distribution::solver::solve_generator;
use tangentcone::integrals::{curve_invariants, first_integrals, verify_annihilation};
use tangentcone::io::{
    generator_set_json, integral_set_from_json, integral_set_json, normal_form_json, FirstIntegralSetJson,
};
use tangentcone::normal_form::{build_normal_form, dims, parse_entry, Multiplicities, ParamMatrix};
use tangentcone::prenorm::{default_max_height, prenormalize, CurveInput};
use tangentcone::sampling::Sampler;
use tangentcone::selfcheck::{run_all, Scope};
use tangentcone::{Error, Result};

const DEFAULT_SEED: u64 = 7;

#[derive(Parser, Debug)]
#[command(
    name = "tangentcone",
    version,
    about = "Normal forms, generators and rational invariants of plane curves with smooth transverse branches"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads (0 uses all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Pretty,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dimension counts for `p` branches.
    Dims {
        #[arg(short)]
        p: usize,
    },
    /// Expanded normal form at a parameter matrix.
    NormalForm {
        /// Entries `k,l:value`; several may be separated by `;` or given repeatedly.
        #[arg(long)]
        entries: Vec<String>,
        #[command(flatten)]
        family: Family,
        /// Use multiplicity 1 for every branch.
        #[arg(long)]
        reduced: bool,
    },
    /// Reduces a curve JSON file to its parameter matrix.
    Prenormalize {
        curve: PathBuf,
        #[arg(long)]
        max_height: Option<usize>,
    },
    /// Symbolic generators of the distribution for a fixed first line.
    Generators {
        #[command(flatten)]
        family: Family,
        /// Keep only levels up to this one (exact: lower levels do not depend on higher slices).
        #[arg(long)]
        max_level: Option<usize>,
        #[arg(long, value_enum, default_value_t = StrategyArg::Direct)]
        strategy: StrategyArg,
        /// Cross-check against the jet solver at one seeded point, with this truncation cap.
        #[arg(long)]
        truncation_cap: Option<usize>,
    },
    /// Generic and per-level ranks at seeded random points.
    Rank {
        #[command(flatten)]
        family: Family,
        #[arg(long, default_value_t = 5)]
        points: usize,
    },
    /// Bracket relations among the generators.
    Brackets {
        #[command(flatten)]
        family: Family,
        #[arg(long, default_value_t = 3)]
        points: usize,
    },
    /// Rational first integrals for a fixed first line.
    Integrals {
        #[command(flatten)]
        family: Family,
    },
    /// Invariant tuple of a curve JSON file.
    Invariants {
        curve: PathBuf,
        #[arg(long)]
        max_height: Option<usize>,
    },
    /// Re-checks the annihilation of every member of an integrals JSON file.
    Verify { integrals: PathBuf },
    /// Runs the self-checks at p <= 7 and the nine-branch fixtures.
    Selftest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Direct,
    Interpolation,
}

#[derive(Args, Debug, Clone)]
struct Family {
    #[arg(short)]
    p: usize,
    /// First-line entries `a_{1,1..p-3}`, comma separated; random when omitted.
    #[arg(long, allow_hyphen_values = true)]
    first_line: Option<String>,
    /// Branch multiplicities, comma separated (default all 1).
    #[arg(long, allow_hyphen_values = true)]
    mult: Option<String>,
    /// Read `--mult` as rational Darboux exponents.
    #[arg(long)]
    darboux: bool,
}

impl Family {
    fn multiplicities(&self) -> Result<Multiplicities> {
        let n = match &self.mult {
            None if self.darboux => return Err(Error::domain("--darboux needs --mult")),
            None => Multiplicities::reduced(self.p),
            Some(s) => {
                let values = parse_rational_list(s)?;
                if self.darboux {
                    Multiplicities::darboux(values)
                } else {
                    let mut n = Multiplicities::reduced(self.p);
                    n.values = values;
                    n
                }
            }
        };
        n.validate(self.p)?;
        Ok(n)
    }

    fn first_line(&self, seed: u64) -> Result<Vec<Rational>> {
        if self.p < 4 {
            return Err(Error::domain(format!("p must be at least 4, got {}", self.p)));
        }
        match &self.first_line {
            Some(s) => {
                let v = parse_rational_list(s)?;
                if v.len() != self.p - 3 {
                    return Err(Error::domain(format!("first line needs {} entries, got {}", self.p - 3, v.len())));
                }
                Ok(v)
            }
            None => Ok(Sampler::new(seed).first_line(self.p)),
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable output")
}

fn line_json(a1: &[Rational]) -> Value {
    json!(a1.iter().map(format_rational).collect::<Vec<_>>())
}

/// Compares the symbolic generators with the jet solver at one seeded point.
fn jet_check(g: &GeneratorSet, n: &Multiplicities, cap: usize, max_level: usize, seed: u64) -> Result<Value> {
    let a = Sampler::new(seed.wrapping_add(1)).params_with_first_line(g.p, &g.first_line);
    let point = g.point(&a)?;
    let mut truncations = Vec::new();
    for gen in &g.generators {
        let sol = solve_generator(gen.i, gen.j, &a, n, Some(cap))?;
        for ((k, l), v) in &sol.x {
            let symbolic = if *k == 1 { Rational::zero() } else { gen.x.get(*k, *l).eval(&point)? };
            if *k <= max_level && symbolic != *v {
                return Err(Error::structural(format!(
                    "X_({},{}) disagrees with the jet solver on a_{k}_{l}: {} vs {}",
                    gen.i,
                    gen.j,
                    format_rational(&symbolic),
                    format_rational(v)
                )));
            }
        }
        truncations.push(json!({ "i": gen.i, "j": gen.j, "dUsed": sol.diagnostics.d_used }));
    }
    Ok(json!({ "point": to_value(&a), "cap": cap, "agree": true, "truncations": truncations }))
}

fn run(cli: &Cli) -> Result<(Value, bool)> {
    let seed = cli.seed;
    match &cli.command {
        Command::Dims { p } => Ok((to_value(&dims(*p)?), true)),
        Command::NormalForm { entries, family, reduced } => {
            let p = &family.p;
            let mut a = ParamMatrix::new(*p);
            if let Some(s) = &family.first_line {
                a = ParamMatrix::with_first_line(*p, &parse_rational_list(s)?)?;
            }
            for e in entries.iter().flat_map(|s| s.split(';')).map(str::trim).filter(|s| !s.is_empty()) {
                let ((k, l), v) = parse_entry(e)?;
                if !(1 <= k && k <= l && l + 3 <= *p) {
                    return Err(Error::domain(format!("entry ({k},{l}) outside the matrix for p={p}")));
                }
                a.set(k, l, v);
            }
            let n = family.multiplicities()?;
            let nf = build_normal_form(&a, &n, *reduced)?;
            let reg = tangentcone::algebra::registry::VarRegistry::new(*p);
            Ok((
                json!({ "params": to_value(&a), "multiplicities": to_value(&n), "normalForm": to_value(&normal_form_json(&nf, &reg)) }),
                true,
            ))
        }
        Command::Prenormalize { curve, max_height } => {
            let c: CurveInput = read_json(curve)?;
            let h = max_height.unwrap_or_else(|| default_max_height(c.p()));
            let (a, report) = prenormalize(&c, h)?;
            Ok((json!({ "params": to_value(&a), "report": to_value(&report) }), true))
        }
        Command::Generators { family, max_level, strategy, truncation_cap } => {
            let n = family.multiplicities()?;
            let a1 = family.first_line(seed)?;
            let g = match (max_level, strategy) {
                (Some(l), StrategyArg::Direct) => generators_to_level(family.p, &n, &a1, *l)?,
                (None, StrategyArg::Direct) => generators_symbolic(family.p, &n, &a1, Strategy::Direct)?,
                (None, StrategyArg::Interpolation) => {
                    generators_symbolic(family.p, &n, &a1, Strategy::Interpolation { seed })?
                }
                (Some(_), StrategyArg::Interpolation) => {
                    return Err(Error::domain("--max-level is only available with the direct strategy"))
                }
            };
            let mut out = to_value(&generator_set_json(&g));
            if let Some(cap) = *truncation_cap {
                out["jetCheck"] = jet_check(&g, &n, cap, max_level.unwrap_or(family.p - 3), seed)?;
            }
            Ok((out, true))
        }
        Command::Rank { family, points } => {
            let n = family.multiplicities()?;
            let a1 = family.first_line(seed)?;
            let mut s = Sampler::new(seed.wrapping_add(1));
            let samples: Vec<ParamMatrix> = (0..*points).map(|_| s.params_with_first_line(family.p, &a1)).collect();
            let reports = samples.par_iter().map(|a| rank_at_point(a, &n)).collect::<Result<Vec<_>>>()?;
            let ok = reports.iter().all(|r| r.total as i64 == r.expected_total && r.per_level == r.expected_per_level);
            let rows: Vec<Value> = samples
                .iter()
                .zip(&reports)
                .map(|(a, r)| json!({ "point": to_value(a), "rank": to_value(r) }))
                .collect();
            Ok((json!({ "p": family.p, "firstLine": line_json(&a1), "matchesExpected": ok, "samples": rows }), true))
        }
        Command::Brackets { family, points } => {
            let n = family.multiplicities()?;
            let a1 = family.first_line(seed)?;
            let g = generators_symbolic(family.p, &n, &a1, Strategy::Direct)?;
            let kappa = eigen_constant(&g)?;
            let family_fields = commuting_family(&g)?;
            check_involutive(&g, &random_points(&g, *points, seed))?;
            let pairs: Vec<Value> = g
                .generators
                .iter()
                .enumerate()
                .flat_map(|(i, x)| g.generators[i + 1..].iter().map(move |y| (x, y)))
                .map(|(x, y)| {
                    let br = x.x.bracket(&y.x, &g.reg);
                    let levels: Vec<usize> = br
                        .components()
                        .map(|((k, _), _)| *k)
                        .collect::<std::collections::BTreeSet<_>>()
                        .into_iter()
                        .collect();
                    json!({ "left": [x.i, x.j], "right": [y.i, y.j], "zero": br.is_zero(), "levels": levels })
                })
                .collect();
            Ok((
                json!({
                    "p": family.p,
                    "firstLine": line_json(&a1),
                    "kappa": kappa.map(|k| format_rational(&k)),
                    "commuting": family_fields.iter().map(|f| json!({ "i": f.i, "j": f.j, "exponent": f.exponent })).collect::<Vec<_>>(),
                    "involutiveAtSamples": *points,
                    "brackets": pairs,
                }),
                true,
            ))
        }
        Command::Integrals { family } => {
            let n = family.multiplicities()?;
            let a1 = family.first_line(seed)?;
            let set = first_integrals(family.p, &n, &a1)?;
            Ok((to_value(&integral_set_json(&set)), true))
        }
        Command::Invariants { curve, max_height } => {
            let c: CurveInput = read_json(curve)?;
            let h = max_height.unwrap_or_else(|| default_max_height(c.p()));
            Ok((to_value(&curve_invariants(&c, h)?), true))
        }
        Command::Verify { integrals } => {
            let doc: FirstIntegralSetJson = read_json(integrals)?;
            let set = integral_set_from_json(&doc)?;
            let g = generators_to_level(set.p, &set.n, &set.first_line, set.max_level.max(2))?;
            let mut all = true;
            let mut rows = Vec::new();
            for f in &set.integrals {
                let r = verify_annihilation(&f.projectivized, &g)?;
                all &= r.is_none();
                rows.push(match r {
                    None => json!({ "label": f.label, "annihilated": true }),
                    Some((i, j, res)) => json!({
                        "label": f.label,
                        "annihilated": false,
                        "witness": { "generator": [i, j], "residual": res.display(&g.reg) },
                    }),
                });
            }
            Ok((json!({ "p": set.p, "tau": set.tau(), "allAnnihilated": all, "integrals": rows }), all))
        }
        Command::Selftest => {
            let reports = run_all(Scope::Quick, seed);
            let ok = reports.iter().all(|r| r.passed);
            Ok((json!({ "passed": ok, "criteria": to_value(&reports) }), ok))
        }
    }
}

fn error_value(e: &Error) -> Value {
    let kind = match e {
        Error::Domain(_) => "domain",
        Error::Structural(_) => "structural",
        Error::Registry(_) => "registry",
        Error::Inconsistent => "inconsistent",
        Error::Parse(_) => "parse",
    };
    json!({ "error": { "kind": kind, "message": e.to_string() } })
}

fn emit(v: &Value, format: Format) {
    let text = match format {
        Format::Json => serde_json::to_string(v),
        Format::Pretty => serde_json::to_string_pretty(v),
    };
    println!("{}", text.expect("serializable output"));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            emit(&json!({ "error": { "kind": "usage", "message": e.to_string() } }), Format::Json);
            return ExitCode::from(1);
        }
    };
    if cli.threads > 0 {
        // a second initialization can only fail if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    match run(&cli) {
        Ok((v, ok)) => {
            emit(&v, cli.format);
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            emit(&error_value(&e), cli.format);
            ExitCode::from(if e.is_structural() { 2 } else { 1 })
        }
    }
}
