//! Command-line front-end. Every command prints one JSON report.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nuca_core::analysis::{
    counting_bound, cyclic_bijectivity_check, image_count_finite_support, kernel_search, orphan_search,
    preinjectivity_search, surjunctivity_probe, verify_collision, verify_kernel, verify_orphan, BoundKind,
    Method, Mode, WrapStatus,
};
use nuca_core::constructions::{
    build_family_distribution, build_family_rules, lift_counterexample, family_witness, template_lift,
    wrap_distribution, Family, LiftWitness, FamilyWitness, Placement,
};
use nuca_core::recurrence::{is_recurrent, shortest_unique_pattern, uniform_recurrence_check, Recurrence, UniformRecurrence};
use nuca_core::{Automaton, Budget, Domain, Error, RuleSet};
use serde_json::{json, Value};

use crate::exec::Pool;
use crate::pgm;
use crate::report;
use crate::schema::{to_pretty, ConfigFile, DistFile, LoadedDist, RulesFile, SchemaError};

#[derive(Debug, Parser)]
#[command(name = "nuca", version, about = "Non-uniform cellular automata analysis")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Limit on enumerated candidates, automaton states and materialized cells.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Worker threads for window scans.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum MethodArg {
    Auto,
    Exhaustive,
    Rank,
    Fiber,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Auto => Method::Auto,
            MethodArg::Exhaustive => Method::Exhaustive,
            MethodArg::Rank => Method::Rank,
            MethodArg::Fiber => Method::Fiber,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FamilyArg {
    Moore,
    Myhill,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Moore => Family::Moore,
            FamilyArg::Myhill => Family::Myhill,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum PlacementArg {
    Single,
    Periodic,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BoundArg {
    #[value(name = "moore_d")]
    MooreD,
    #[value(name = "myhill_1d")]
    Myhill1D,
}

#[derive(Debug, Args)]
pub struct Scan {
    /// Leftmost window start to scan (default: enough to cover the distribution).
    #[arg(long, allow_hyphen_values = true, requires = "scan_to")]
    pub scan_from: Option<i64>,
    #[arg(long, allow_hyphen_values = true, requires = "scan_from")]
    pub scan_to: Option<i64>,
}

impl Scan {
    fn get(&self) -> Option<(i64, i64)> {
        self.scan_from.zip(self.scan_to)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Space-time diagram of a configuration on a window.
    Simulate {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        from: i64,
        #[arg(long, allow_hyphen_values = true)]
        to: i64,
        #[arg(long, default_value_t = 1)]
        steps: usize,
        /// Also write the diagram as a PGM image.
        #[arg(long)]
        pgm: Option<PathBuf>,
    },
    /// First orphan on windows up to a width.
    Orphan {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        max_width: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        #[command(flatten)]
        scan: Scan,
    },
    /// First kernel element of a linear NUCA on windows up to a width.
    Kernel {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        max_width: usize,
        #[command(flatten)]
        scan: Scan,
    },
    /// First pair of asymptotic configurations with equal images.
    Preinj {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        max_width: usize,
        /// Uniform backgrounds to try, in order.
        #[arg(long = "background", default_values_t = [0u32])]
        backgrounds: Vec<u32>,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        #[command(flatten)]
        scan: Scan,
    },
    /// Bijectivity of a cyclic distribution.
    Cyclic {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
    },
    /// Cut the cyclic wrap of an eventually periodic distribution.
    Wrap {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        search_cells: usize,
    },
    /// Wrap for every n up to a bound and carry cyclic collisions to the line.
    ProbeSurjunctivity {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value_t = 1000)]
        search_cells: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
    },
    /// Build one of the counterexample families and verify its witness.
    Construct {
        #[command(subcommand)]
        what: Construct,
    },
    /// Recurrence of a distribution or template.
    Recurrence {
        #[arg(long)]
        dist: PathBuf,
        /// Longest factor checked for scanned presentations and uniform widths.
        #[arg(long, default_value_t = 12)]
        max_length: usize,
        /// Also check uniform recurrence.
        #[arg(long)]
        uniform: bool,
    },
    /// Shortest, then leftmost, factor occurring exactly once.
    UniquePattern {
        #[arg(long)]
        dist: PathBuf,
    },
    /// Least size satisfying a counting inequality.
    Bounds {
        #[arg(long, value_enum)]
        kind: BoundArg,
        #[arg(long, default_value_t = 1)]
        d: u32,
        #[arg(long)]
        s: u64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        r: u64,
    },
    /// Number of distinct images of configurations supported on an interval.
    CountImages {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        from: i64,
        #[arg(long, allow_hyphen_values = true)]
        to: i64,
        #[arg(long, default_value_t = 0)]
        q: u32,
    },
}

#[derive(Debug, Subcommand)]
pub enum Construct {
    /// `f_n, g_n`.
    Moore(FamilyArgs),
    /// `γ_n, δ_n`.
    Myhill(FamilyArgs),
    /// Lift a rule pair to a template with a unique word.
    Lift {
        #[arg(long)]
        template: PathBuf,
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Size of the base rules (default: the unique word length, at least 2).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = PlacementArg::Single)]
    pub placement: PlacementArg,
    /// First cell of the block.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
    pub at: i64,
    /// Write `rules.json` and `dist.json` here.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Verification(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Verification(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            Error::Verification(_) => CliError::Verification(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<SchemaError> for CliError {
    fn from(e: SchemaError) -> Self {
        CliError::Usage(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn budget(global: &Global) -> Budget {
    match global.budget {
        Some(limit) => Budget {
            cells: usize::try_from(limit).unwrap_or(usize::MAX),
            ..Budget::with_limit(limit)
        },
        None => Budget::DEFAULT,
    }
}

fn load(path: &Path, budget: &Budget) -> CliResult<LoadedDist> {
    Ok(DistFile::load(path, budget.cells)?)
}

fn automaton(d: &LoadedDist) -> CliResult<Automaton> {
    Ok(Automaton::new(d.rules()?.clone(), d.dist.clone())?)
}

fn require(verified: bool, what: &str) -> CliResult<()> {
    if verified {
        Ok(())
    } else {
        Err(CliError::Verification(format!("{what} failed its re-check")))
    }
}

/// Orphans are re-checked by enumeration when it fits the budget.
fn check_orphan(a: &Automaton, w: &nuca_core::analysis::OrphanWitness, budget: &Budget) -> CliResult<()> {
    let ok = match verify_orphan(a, w, Mode::Exhaustive, budget) {
        Err(Error::BudgetExceeded { .. }) => verify_orphan(a, w, w.mode, budget)?,
        other => other?,
    };
    require(ok, "orphan")
}

fn write_files(dir: &Path, rules: &RuleSet, dist: &nuca_core::Distribution) -> CliResult<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("rules.json"), to_pretty(&RulesFile::from_ruleset(rules)))?;
    let file = DistFile::from_dist(dist, rules.names(), Some("rules.json".into()));
    std::fs::write(dir.join("dist.json"), to_pretty(&file))?;
    Ok(())
}

pub fn run(cli: &Cli) -> CliResult<Value> {
    let budget = budget(&cli.global);
    let pool = Pool::new(cli.global.jobs).map_err(|e| CliError::Usage(e.to_string()))?;
    match &cli.command {
        Command::Simulate {
            dist,
            config,
            from,
            to,
            steps,
            pgm: image,
        } => {
            let d = load(dist, &budget)?;
            let a = automaton(&d)?;
            let c = ConfigFile::load(config)?;
            let window = Domain::interval(*from, *to);
            let rows: Vec<Vec<u32>> = a.trace(&c, &window, *steps)?.into_iter().map(|p| p.into_states()).collect();
            let mut out = json!({ "window": report::interval(&window), "rows": rows });
            if let Some(path) = image {
                pgm::write(path, &rows, a.rules().alphabet().size())?;
                out["pgm"] = json!(path.display().to_string());
            }
            Ok(out)
        }
        Command::Orphan {
            dist,
            max_width,
            method,
            scan,
        } => {
            let a = automaton(&load(dist, &budget)?)?;
            let found = orphan_search(&a, *max_width, scan.get(), (*method).into(), &budget, &pool)?;
            Ok(match found {
                Some(w) => {
                    check_orphan(&a, &w, &budget)?;
                    json!({ "max_width": max_width, "orphan": report::orphan(&w, true) })
                }
                None => json!({ "max_width": max_width, "orphan": null }),
            })
        }
        Command::Kernel { dist, max_width, scan } => {
            let a = automaton(&load(dist, &budget)?)?;
            Ok(match kernel_search(&a, *max_width, scan.get(), &pool)? {
                Some(k) => {
                    require(verify_kernel(&a, &k)?, "kernel element")?;
                    json!({ "max_width": max_width, "kernel": report::kernel(&k, true) })
                }
                None => json!({ "max_width": max_width, "kernel": null }),
            })
        }
        Command::Preinj {
            dist,
            max_width,
            backgrounds,
            method,
            scan,
        } => {
            let a = automaton(&load(dist, &budget)?)?;
            let found = preinjectivity_search(&a, *max_width, backgrounds, scan.get(), (*method).into(), &budget, &pool)?;
            Ok(match found {
                Some(w) => {
                    require(verify_collision(&a, &w.c1, &w.c2)?, "collision")?;
                    json!({ "max_width": max_width, "collision": report::collision(&w, true) })
                }
                None => json!({ "max_width": max_width, "collision": null }),
            })
        }
        Command::Cyclic { dist, method } => {
            let a = automaton(&load(dist, &budget)?)?;
            let v = cyclic_bijectivity_check(&a, (*method).into(), &budget)?;
            Ok(json!({
                "injective": v.injective,
                "surjective": v.surjective,
                "mode": v.mode.name(),
                "rank": v.rank,
                "collision": v.collision.map(|(c1, c2)| json!({ "c1": c1, "c2": c2 })),
            }))
        }
        Command::Wrap { dist, n, search_cells } => {
            let d = load(dist, &budget)?;
            Ok(match wrap_distribution(&d.dist, *n, *search_cells) {
                Ok(w) => json!({
                    "n": n,
                    "m": w.m,
                    "occurrence": w.occurrence,
                    "start": w.start,
                    "word": report::word(&d.symbols, &w.line_word()),
                }),
                Err(Error::NotFound(msg)) => json!({ "n": n, "m": null, "not_found": msg }),
                Err(e) => return Err(e.into()),
            })
        }
        Command::ProbeSurjunctivity {
            dist,
            n_max,
            search_cells,
            method,
        } => {
            let d = load(dist, &budget)?;
            let a = automaton(&d)?;
            let report = surjunctivity_probe(&a, *n_max, *search_cells, (*method).into(), &budget)?;
            let entries: Vec<Value> = report
                .entries
                .iter()
                .map(|e| {
                    let (status, witness) = match &e.status {
                        WrapStatus::Bijective => ("bijective", Value::Null),
                        WrapStatus::Verified(c) => (
                            "verified",
                            json!({
                                "case": c.case,
                                "c1": report::finite_support(&c.c1),
                                "c2": report::finite_support(&c.c2),
                                "verified": true,
                            }),
                        ),
                        WrapStatus::SeamArtifact => ("seam_artifact", Value::Null),
                        WrapStatus::Unverified => ("unverified", Value::Null),
                    };
                    json!({
                        "n": e.n,
                        "m": e.wrap.m,
                        "word": report::word(&d.symbols, &e.wrap.line_word()),
                        "bijective": e.verdict.is_bijective(),
                        "short_wrap": e.short_wrap,
                        "status": status,
                        "witness": witness,
                    })
                })
                .collect();
            Ok(json!({ "entries": entries, "stopped_at": report.stopped }))
        }
        Command::Construct { what } => construct(what, &budget),
        Command::Recurrence {
            dist,
            max_length,
            uniform,
        } => {
            let d = load(dist, &budget)?;
            let mut out = match is_recurrent(&d.dist, *max_length)? {
                Recurrence::Recurrent => json!({ "verdict": "Recurrent" }),
                Recurrence::NonRecurrent { pattern, .. } => {
                    json!({ "verdict": "NonRecurrent", "witness": report::word(&d.symbols, &pattern) })
                }
                Recurrence::BoundedRecurrent { length, range } => {
                    json!({ "verdict": "BoundedRecurrent", "length": length, "range": [range.0, range.1] })
                }
            };
            if *uniform {
                out["uniform"] = match uniform_recurrence_check(&d.dist, *max_length)? {
                    UniformRecurrence::UniformlyRecurrent { widths, exact } => {
                        json!({ "verdict": "UniformlyRecurrent", "widths": widths, "exact": exact })
                    }
                    UniformRecurrence::Fails { pattern, window } => json!({
                        "verdict": "Fails",
                        "witness": report::word(&d.symbols, &pattern),
                        "window": [window.0, window.1],
                    }),
                };
            }
            Ok(out)
        }
        Command::UniquePattern { dist } => {
            let d = load(dist, &budget)?;
            let u = shortest_unique_pattern(&d.dist)?;
            Ok(json!({
                "position": u.position,
                "length": u.len(),
                "pattern": report::word(&d.symbols, &u.pattern),
            }))
        }
        Command::Bounds { kind, d, s, n, r } => Ok(match kind {
            BoundArg::MooreD => json!({ "k": counting_bound(BoundKind::MooreD, *d, *s, *n, *r)? }),
            BoundArg::Myhill1D => json!({ "m": counting_bound(BoundKind::Myhill1D, *d, *s, *n, *r)? }),
        }),
        Command::CountImages { dist, from, to, q } => {
            let a = automaton(&load(dist, &budget)?)?;
            let c = image_count_finite_support(&a, &Domain::interval(*from, *to), *q, &budget)?;
            Ok(json!({
                "configurations": c.configurations,
                "images": c.images,
                "pigeonhole": c.pigeonhole(),
            }))
        }
    }
}

fn construct(what: &Construct, budget: &Budget) -> CliResult<Value> {
    match what {
        Construct::Moore(args) | Construct::Myhill(args) => {
            let family = if matches!(what, Construct::Moore(_)) { Family::Moore } else { Family::Myhill };
            let rules = build_family_rules(family, args.n)?;
            let placement = match args.placement {
                PlacementArg::Single => Placement::SingleBlock(args.at),
                PlacementArg::Periodic => Placement::Periodic,
            };
            let dist = build_family_distribution(family, args.n, placement)?;
            if let Some(dir) = &args.out_dir {
                write_files(dir, &rules, &dist)?;
            }
            let names = rules.names().to_vec();
            let mut out = json!({
                "family": family.name(),
                "n": args.n,
                "rules": serde_json::to_value(RulesFile::from_ruleset(&rules)).expect("serializable"),
                "dist": serde_json::to_value(DistFile::from_dist(&dist, &names, None)).expect("serializable"),
            });
            if let Placement::SingleBlock(_) = placement {
                let a = Automaton::new(rules, dist)?;
                out["witness"] = match family_witness(family, args.n, &a, budget)? {
                    FamilyWitness::Orphan { witness, .. } => {
                        check_orphan(&a, &witness, budget)?;
                        json!({ "orphan": report::orphan(&witness, true) })
                    }
                    FamilyWitness::Collision(w) => {
                        require(verify_collision(&a, &w.c1, &w.c2)?, "collision")?;
                        json!({ "collision": report::collision(&w, true) })
                    }
                };
            }
            Ok(out)
        }
        Construct::Lift {
            template,
            family,
            n,
            out_dir,
        } => {
            let family: Family = (*family).into();
            let t = DistFile::load(template, budget.cells)?.template()?;
            let unique = shortest_unique_pattern(t.layout())?;
            let n = n.unwrap_or(unique.len().max(2));
            let base = build_family_rules(family, n)?;
            let (lifted, assignment) =
                template_lift(&t, (unique.position, unique.len()), &base, Family::BLOCK, Family::FILL)?;
            let a = lifted.automaton(&t, &assignment)?;
            if let Some(dir) = out_dir {
                write_files(dir, lifted.rules(), a.dist())?;
            }
            let witness = match lift_counterexample(&lifted, &a, family, budget)? {
                LiftWitness::Orphan { witness, .. } => {
                    check_orphan(&a, &witness, budget)?;
                    json!({ "orphan": report::orphan(&witness, true) })
                }
                LiftWitness::Collision(w) => {
                    require(verify_collision(&a, &w.c1, &w.c2)?, "collision")?;
                    json!({ "collision": report::collision(&w, true) })
                }
            };
            Ok(json!({
                "family": family.name(),
                "n": n,
                "unique_word": report::word(t.symbols(), lifted.word()),
                "position": lifted.position(),
                "alphabet": lifted.alphabet().tracks(),
                "radius": lifted.rules().neighborhood().radius(),
                "rules": lifted.rules().names(),
                "witness": witness,
            }))
        }
    }
}
