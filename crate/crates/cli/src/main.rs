//! `morrey`: batch front end for the morrey library.
//!
//! Exit codes: 0 when the result was computed, 1 when a mathematical
//! precondition fails (for example a trivial space), 2 for usage, schema
//! and I/O errors.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use morrey::embeddings::{is_continuous, is_strictly_singular};
use morrey::finite_dim::{opnorm_id, SearchConfig};
use morrey::norms::{norm_mps, Attainment};
use morrey::witnesses::{self, DecaySchedule};
use morrey::{Error, LatticePoint, SpaceParams, SparseSequence, WitnessBundle};

#[derive(Parser, Debug)]
#[command(
    name = "morrey",
    version,
    about = "Norms, embeddings and witness sequences for Morrey sequence spaces"
)]
struct Cli {
    /// Print the report as JSON on standard output.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized searches.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Morrey norm of a finitely supported sequence.
    Norm {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        seq: PathBuf,
    },
    /// Weight-class checks for a space.
    #[command(group(ArgGroup::new("what").required(true).args(["gp", "nontrivial", "classify", "rphi", "regularize"])))]
    Check {
        #[arg(long)]
        space: PathBuf,
        /// Membership of the weight in G_p.
        #[arg(long)]
        gp: bool,
        /// Whether the space is non-trivial.
        #[arg(long)]
        nontrivial: bool,
        /// Structural classification of the space.
        #[arg(long)]
        classify: bool,
        /// Largest p with the weight in G_p.
        #[arg(long)]
        rphi: bool,
        /// Write an equivalent G_p weight to --out.
        #[arg(long, requires = "out")]
        regularize: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Continuity (and optionally strict singularity) of the embedding.
    Embed {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
        #[arg(long)]
        strict_singularity: bool,
    },
    /// Norm of the identity between the finite-dimensional spaces on Q_(-J,0).
    Opnorm {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
        #[arg(long)]
        level: u32,
        /// Local-search iterations for the lower bound when p1 < p2.
        #[arg(long, default_value_t = 400)]
        iterations: usize,
    },
    /// Generate a witness sequence with its certificates.
    Witness {
        #[arg(long, value_enum)]
        kind: WitnessKind,
        #[arg(long)]
        space: PathBuf,
        /// Target space (embedding-failure only).
        #[arg(long)]
        to: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Cube level for `char`.
        #[arg(long, default_value_t = 0)]
        k0: u32,
        /// Cube corner for `char`, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        corner: Vec<i128>,
        /// Number of shells, spikes or blocks.
        #[arg(long, alias = "blocks", alias = "shells", default_value_t = 3)]
        count: usize,
        /// Index set for `lambda-e`, comma separated.
        #[arg(long, value_delimiter = ',')]
        subset: Vec<usize>,
        /// Values for `linf-copy`, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        mu: Vec<f64>,
        /// Number of terms for `ss-demo`.
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = Schedule::Harmonic)]
        schedule: Schedule,
        /// Step index for `embedding-failure`.
        #[arg(long, default_value_t = 1)]
        ell: usize,
    },
    /// Re-check the certificates stored in a witness file.
    Verify {
        #[arg(long)]
        witness: PathBuf,
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        to: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WitnessKind {
    Char,
    C0,
    Spike,
    LambdaE,
    ProperSubspace,
    LinfCopy,
    SsDemo,
    EmbeddingFailure,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Schedule {
    Geometric,
    Harmonic,
}

enum Failure {
    Domain(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_domain_error() {
            Failure::Domain(e)
        } else {
            Failure::Usage(format!("{}: {e}", e.code()))
        }
    }
}

struct Report {
    command: &'static str,
    result: Value,
    summary: String,
}

/// JSON number, or the strings "Infinity"/"-Infinity"/"NaN".
fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("NaN")
    } else if x > 0.0 {
        json!("Infinity")
    } else {
        json!("-Infinity")
    }
}

fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    fn new() -> Self {
        Inputs { hasher: Sha256::new() }
    }

    fn read(&mut self, path: &Path) -> Result<String, Failure> {
        let text =
            fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        self.hasher.update((text.len() as u64).to_le_bytes());
        self.hasher.update(text.as_bytes());
        Ok(text)
    }

    fn param(&mut self, s: &str) {
        self.hasher.update((s.len() as u64).to_le_bytes());
        self.hasher.update(s.as_bytes());
    }

    fn space(&mut self, path: &Path) -> Result<SpaceParams, Failure> {
        let text = self.read(path)?;
        let parsed: Result<SpaceParams, String> = if path.extension().is_some_and(|e| e == "toml") {
            toml::from_str(&text).map_err(|e| e.to_string())
        } else {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        };
        let s = parsed.map_err(|e| Failure::Usage(format!("schema error in {}: {e}", path.display())))?;
        if !(s.p > 0.0 && s.p.is_finite()) {
            return Err(Failure::Usage(format!(
                "schema error in {}: p must be positive",
                path.display()
            )));
        }
        Ok(s)
    }

    fn sequence(&mut self, path: &Path) -> Result<SparseSequence, Failure> {
        let text = self.read(path)?;
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("schema error in {}: {e}", path.display())))
    }

    fn digest(self) -> String {
        hex::encode(self.hasher.finalize())
    }
}

fn write_json(path: &Path, v: &impl serde::Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(v).map_err(|e| Failure::Usage(e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn attainment_json(a: &Attainment) -> Value {
    match a {
        Attainment::Cube(c) => {
            let corner: Vec<Value> = c
                .corner
                .iter()
                .map(|x| x.parse::<i64>().map_or_else(|_| json!(x), |v| json!(v)))
                .collect();
            json!({ "level": c.level, "corner": corner })
        }
        Attainment::TailDivergence => json!("tail-divergence"),
        Attainment::EmptySupport => Value::Null,
    }
}

fn run(cli: &Cli, inputs: &mut Inputs) -> Result<Report, Failure> {
    match &cli.command {
        Command::Norm { space, seq } => {
            let params = inputs.space(space)?;
            let seq = inputs.sequence(seq)?;
            if !params.weight.is_nontrivial(params.p) {
                return Err(Failure::Domain(Error::TrivialSpace));
            }
            let r = norm_mps(&seq, &params)?;
            Ok(Report {
                command: "norm",
                result: json!({
                    "value": num(r.value),
                    "attaining_cube": attainment_json(&r.attainment()),
                }),
                summary: format!("norm = {}", r.value),
            })
        }
        Command::Check {
            space,
            gp,
            nontrivial,
            classify,
            rphi,
            regularize,
            out,
        } => {
            let params = inputs.space(space)?;
            let (w, p) = (&params.weight, params.p);
            if *gp {
                let v = w.is_gp(p);
                Ok(Report {
                    command: "check",
                    result: json!({ "gp": v }),
                    summary: format!("weight in G_p for p = {p}: {v}"),
                })
            } else if *nontrivial {
                let v = w.is_nontrivial(p);
                Ok(Report {
                    command: "check",
                    result: json!({ "nontrivial": v }),
                    summary: format!("space non-trivial: {v}"),
                })
            } else if *classify {
                let c = w.classify_space(p)?;
                let summary = format!(
                    "equals l_inf: {}, equals l_p: {}, separable: {}, relation to c0: {:?}",
                    c.equals_linf, c.equals_lp, c.separable, c.comparable_with_c0
                );
                Ok(Report {
                    command: "check",
                    result: json!({
                        "nontrivial": c.nontrivial,
                        "equals_linf": c.equals_linf,
                        "equals_lp": c.equals_lp,
                        "separable": c.separable,
                        "comparable_with_c0": c.comparable_with_c0,
                        "limit_at_infinity": num(c.limit_at_infinity),
                        "sup_phi": num(c.sup_phi),
                    }),
                    summary,
                })
            } else if *rphi {
                let r = w.r_phi()?;
                Ok(Report {
                    command: "check",
                    result: json!({ "r_phi": num(r) }),
                    summary: format!("r_phi = {r}"),
                })
            } else {
                debug_assert!(*regularize);
                let reg = w.regularize(p)?;
                let out = out.as_ref().expect("clap enforces --out");
                let new = SpaceParams::new(reg, p)?;
                write_json(out, &new)?;
                Ok(Report {
                    command: "check",
                    result: json!({
                        "regularized": new,
                        "gp": new.weight.is_gp(p),
                        "out": out.display().to_string(),
                    }),
                    summary: format!("regularized weight written to {}", out.display()),
                })
            }
        }
        Command::Embed {
            from,
            to,
            strict_singularity,
        } => {
            let a = inputs.space(from)?;
            let b = inputs.space(to)?;
            let v = is_continuous(&a.weight, a.p, &b.weight, b.p)?;
            let mut result = json!({
                "continuous": v.continuous,
                "rho": num(v.rho),
                "criterion_sup": num(v.criterion_sup),
                "constant_bound": opt_num(v.constant_bound),
                "compact": v.compact,
                "regime": v.regime,
                "notes": v.notes,
            });
            let mut summary = format!("continuous: {} (criterion sup {})", v.continuous, v.criterion_sup);
            if !v.continuous {
                result["witness"] = json!({
                    "kind": "embedding-failure",
                    "recipe": format!(
                        "morrey witness --kind embedding-failure --space {} --to {} --ell L --out FILE",
                        from.display(),
                        to.display()
                    ),
                });
            }
            if *strict_singularity {
                let s = is_strictly_singular(&a.weight, a.p, &b.weight, b.p)?;
                summary.push_str(&format!("; {:?} ({})", s.kind, s.reason));
                result["strict_singularity"] = json!(s);
            }
            Ok(Report {
                command: "embed",
                result,
                summary,
            })
        }
        Command::Opnorm {
            from,
            to,
            level,
            iterations,
        } => {
            let a = inputs.space(from)?;
            let b = inputs.space(to)?;
            inputs.param(&format!("level={level};iterations={iterations};seed={}", cli.seed));
            let cfg = SearchConfig {
                seed: cli.seed,
                iterations: *iterations,
            };
            let r = opnorm_id(&a.weight, a.p, &b.weight, b.p, *level, &cfg)?;
            let summary = match r.exact {
                Some(x) => format!("||id_{level}|| = {x}"),
                None => format!("{} <= ||id_{level}|| <= {}", r.lower, r.upper),
            };
            Ok(Report {
                command: "opnorm",
                result: json!({
                    "exact": opt_num(r.exact),
                    "lower": num(r.lower),
                    "upper": num(r.upper),
                    "constructive_lower": num(r.constructive_lower),
                    "regime": r.regime,
                    "nu0": r.nu0,
                    "achieved_constant": opt_num(r.achieved_constant),
                    "achieved_by": r.achieved_by,
                }),
                summary,
            })
        }
        Command::Witness {
            kind,
            space,
            to,
            out,
            k0,
            corner,
            count,
            subset,
            mu,
            n,
            eps,
            schedule,
            ell,
        } => {
            let params = inputs.space(space)?;
            let target = match to {
                Some(t) => Some(inputs.space(t)?),
                None => None,
            };
            inputs.param(&format!(
                "{kind:?};{k0};{corner:?};{count};{subset:?};{mu:?};{n};{eps};{schedule:?};{ell}"
            ));
            let dim = params.dim();
            let bundle: WitnessBundle = match kind {
                WitnessKind::Char => {
                    let m0 = if corner.is_empty() {
                        LatticePoint::origin(dim)
                    } else {
                        LatticePoint::new(corner.clone())
                    };
                    witnesses::char_sequence(&params, *k0, m0)?
                }
                WitnessKind::C0 => witnesses::c0_counterexample(&params, *count)?,
                WitnessKind::Spike => witnesses::spike_sequence(&params, *count)?,
                WitnessKind::LambdaE => {
                    let e: BTreeSet<usize> = subset.iter().copied().collect();
                    witnesses::lambda_e(&params, &e, *count)?
                }
                WitnessKind::ProperSubspace => witnesses::proper_subspace_witness(&params, *count)?,
                WitnessKind::LinfCopy => witnesses::linf_copy(&params, mu)?,
                WitnessKind::SsDemo => {
                    let s = match schedule {
                        Schedule::Geometric => DecaySchedule::Geometric,
                        Schedule::Harmonic => DecaySchedule::Harmonic,
                    };
                    witnesses::ss_demo(&params, *n, *eps, s)?
                }
                WitnessKind::EmbeddingFailure => {
                    let t = target
                        .as_ref()
                        .ok_or_else(|| Failure::Usage("embedding-failure needs --to".into()))?;
                    witnesses::embedding_failure(&params.weight, params.p, &t.weight, t.p, *ell)?
                }
            };
            write_json(out, &bundle)?;
            // Check the file as written, not the in-memory bundle.
            let text = fs::read_to_string(out).map_err(|e| Failure::Usage(e.to_string()))?;
            let back: WitnessBundle = serde_json::from_str(&text).map_err(|e| Failure::Usage(e.to_string()))?;
            let checks = back.verify(&params, target.as_ref())?;
            let all = checks.iter().all(|c| c.holds);
            Ok(Report {
                command: "witness",
                result: json!({
                    "kind": back.kind,
                    "out": out.display().to_string(),
                    "support_size": back.sequence.len(),
                    "levels": back.levels,
                    "checks": checks_json(&checks),
                    "all_hold": all,
                }),
                summary: format!(
                    "{} witness with {} entries written to {}; certificates hold: {all}",
                    back.kind,
                    back.sequence.len(),
                    out.display()
                ),
            })
        }
        Command::Verify { witness, space, to } => {
            let text = inputs.read(witness)?;
            let params = inputs.space(space)?;
            let target = match to {
                Some(t) => Some(inputs.space(t)?),
                None => None,
            };
            let bundle: WitnessBundle = serde_json::from_str(&text)
                .map_err(|e| Failure::Usage(format!("schema error in {}: {e}", witness.display())))?;
            let checks = bundle.verify(&params, target.as_ref())?;
            let all = checks.iter().all(|c| c.holds);
            Ok(Report {
                command: "verify",
                result: json!({ "checks": checks_json(&checks), "all_hold": all }),
                summary: format!("{} certificates, all hold: {all}", checks.len()),
            })
        }
    }
}

fn checks_json(checks: &[witnesses::CertificateCheck]) -> Value {
    Value::Array(
        checks
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "value": num(c.value),
                    "bound": num(c.bound),
                    "direction": c.direction,
                    "holds": c.holds,
                })
            })
            .collect(),
    )
}

/// Writes a line to stdout, ignoring a closed pipe.
fn emit(s: &str) {
    let _ = writeln!(std::io::stdout(), "{s}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut inputs = Inputs::new();
    let outcome = run(&cli, &mut inputs);
    let digest = inputs.digest();
    match outcome {
        Ok(r) => {
            if cli.json {
                let v = json!({
                    "command": r.command,
                    "inputs_digest": digest,
                    "result": r.result,
                    "summary": r.summary,
                });
                emit(&serde_json::to_string_pretty(&v).expect("report serializes"));
            } else {
                emit(&r.summary);
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            let (code, name, msg) = match f {
                Failure::Domain(e) => (1u8, e.code().to_string(), e.to_string()),
                Failure::Usage(m) => (2u8, "Usage".to_string(), m),
            };
            if cli.json {
                let v = json!({ "inputs_digest": digest, "error": { "code": name, "message": msg } });
                emit(&serde_json::to_string_pretty(&v).expect("report serializes"));
            }
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_finite_numbers_become_strings() {
        assert_eq!(num(f64::INFINITY), json!("Infinity"));
        assert_eq!(num(f64::NEG_INFINITY), json!("-Infinity"));
        assert_eq!(num(1.5), json!(1.5));
        assert_eq!(opt_num(None), Value::Null);
    }
}
