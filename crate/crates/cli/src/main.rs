use std::fs;
use std::path::{Path, PathBuf};

use aerial_alloc::baselines::{brute_force_optimum, Objective};
use aerial_alloc::experiments::{self as ex, Check, Sample, Source};
use aerial_alloc::matching::matching_csv;
use aerial_alloc::outage::{self, LinkKind, LinkSpec, MeanSnr};
use aerial_alloc::scenario::load_scenario;
use aerial_alloc::SimConfig;
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "aerial-alloc", about = "Sub-carrier and power allocation for UEs and UAVs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// JSON file with SimConfig fields; missing fields keep their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Comma-separated seeds.
    #[arg(long, global = true, value_delimiter = ',', default_value = "0,1,2,3,4,5,6,7,8,9")]
    seeds: Vec<u64>,
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Scenario file to use instead of generated ones.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    #[arg(long, global = true)]
    dump_links: bool,
    #[arg(long, global = true)]
    dump_matching: bool,
    #[arg(long, global = true)]
    dump_ops: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Mean,
    Max,
}

#[derive(Subcommand)]
enum Command {
    /// Outage per user kind across outage thresholds.
    GammaSweep {
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
    },
    /// Outage per user kind across network sizes.
    DeviceSweep {
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
    },
    /// Random, random with power reduction, matching and the full game.
    Compare {
        #[arg(long, value_delimiter = ',', default_value = "70,100")]
        sizes: Vec<usize>,
    },
    /// Users per carrier index after the game.
    CarrierDistribution,
    /// Game against exhaustive search on small fully occupied instances.
    Optimality {
        #[arg(long, default_value_t = 0.15)]
        max_gap: f64,
    },
    /// Analytic outage against Monte-Carlo for links read from CSV
    /// (columns kind,m,gamma_th,serving,interferers).
    OutageCheck {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        draws: Option<u64>,
    },
    /// Exhaustive search for the best assignment.
    BruteForce {
        #[arg(long, value_enum, default_value = "mean")]
        objective: ObjectiveArg,
    },
}

fn load_config(path: Option<&Path>, base: SimConfig) -> Result<SimConfig> {
    let Some(p) = path else { return Ok(base) };
    let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
    let v: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?;
    Ok(base.with_overrides(&v)?)
}

fn write(dir: &Path, name: &str, body: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    let p = dir.join(name);
    fs::write(&p, body).with_context(|| format!("writing {}", p.display()))
}

fn finish(common: &Common, name: &str, body: String, samples: &[Sample], mut checks: Vec<Check>, failures: &[ex::Failure]) -> Result<()> {
    write(&common.out, &format!("{name}.csv"), &body)?;
    write(&common.out, "failures.csv", &ex::failures_csv(failures))?;
    checks.push(ex::failure_check(failures));
    let summary = ex::emit_summary(samples, &checks);
    write(&common.out, "summary.csv", &summary.aggregate_csv)?;
    write(&common.out, "digest.txt", &summary.digest)?;
    print!("{}", summary.digest);
    Ok(())
}

fn dumps(common: &Common, source: &Source) -> Result<()> {
    if !(common.dump_links || common.dump_matching || common.dump_ops) {
        return Ok(());
    }
    for &seed in &common.seeds {
        let s = source.scenario(seed, None)?;
        let dir = common.out.join(format!("seed_{seed}"));
        if common.dump_links {
            write(&dir, "links.csv", &s.links().to_csv())?;
        }
        if common.dump_matching || common.dump_ops {
            let g = ex::run_global_game(&s, seed)?;
            if common.dump_matching {
                write(&dir, "matching.csv", &matching_csv(&g.matching, &s))?;
            }
            if common.dump_ops {
                write(&dir, "ops.csv", &g.log.to_csv())?;
            }
        }
    }
    Ok(())
}

fn mean_snr(kind: LinkKind, field: &str) -> Result<MeanSnr> {
    let num = |t: &str| t.trim().parse::<f64>().with_context(|| format!("bad number `{t}`"));
    Ok(match kind {
        LinkKind::Ue => MeanSnr::Rayleigh { mean: num(field)? },
        LinkKind::Uav => {
            let (a, b) = field.split_once(':').with_context(|| format!("UAV mean SNR `{field}` is not los:nlos"))?;
            MeanSnr::Mixture { los: num(a)?, nlos: num(b)? }
        }
    })
}

fn read_links(path: &Path) -> Result<Vec<LinkSpec>> {
    let mut rdr = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name).with_context(|| format!("missing column `{name}`"));
    let (ck, cm, cg, cs, ci) = (col("kind")?, col("m")?, col("gamma_th")?, col("serving")?, col("interferers")?);
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = || format!("row {}", i + 2);
        let kind = match rec[ck].trim().to_ascii_uppercase().as_str() {
            "UE" => LinkKind::Ue,
            "UAV" => LinkKind::Uav,
            k => bail!("{}: unknown kind `{k}`", row()),
        };
        let interferers = rec[ci]
            .split(';')
            .filter(|t| !t.trim().is_empty())
            .map(|t| mean_snr(kind, t))
            .collect::<Result<Vec<_>>>()
            .with_context(row)?;
        let link = LinkSpec {
            kind,
            serving: mean_snr(kind, &rec[cs]).with_context(row)?,
            interferers,
            m: rec[cm].trim().parse().with_context(row)?,
            gamma_th: rec[cg].trim().parse().with_context(row)?,
        };
        link.validate().with_context(row)?;
        out.push(link);
    }
    Ok(out)
}

fn outage_check(common: &Common, cfg: &SimConfig, input: &Path, draws: Option<u64>) -> Result<()> {
    let links = read_links(input)?;
    let draws = draws.unwrap_or(cfg.mc_draws as u64);
    let mut body = String::from("analytic,mc,stderr,abs_diff,pass\n");
    let mut bad = Vec::new();
    for (i, link) in links.iter().enumerate() {
        let a = outage::outage(link, cfg.laguerre_order)?;
        let mc = outage::outage_mc(link, draws, cfg.seed.wrapping_add(i as u64))?;
        let diff = (a - mc.outage).abs();
        let pass = diff <= f64::max(0.005, 3.0 * mc.std_err);
        if !pass {
            bad.push(i as u64);
        }
        body.push_str(&format!("{a:.9},{:.9},{:.3e},{diff:.3e},{pass}\n", mc.outage, mc.std_err));
    }
    let check = Check {
        name: "analytic outage within max(0.005, 3 stderr) of Monte-Carlo".into(),
        failing_seeds: bad,
        detail: format!("{} links, {draws} draws (failing entries are row indices)", links.len()),
    };
    finish(common, "outage_check", body, &[], vec![check], &[])
}

fn brute_force(common: &Common, source: &Source, objective: Objective) -> Result<()> {
    let mut body = String::from("seed,objective,mean_outage,max_outage,candidates,assignment\n");
    let mut failures = Vec::new();
    for &seed in &common.seeds {
        let s = source.scenario(seed, None)?;
        match brute_force_optimum(&s, objective) {
            Ok(o) => {
                let a: Vec<String> = o.assignment.carrier_of.iter().map(|c| c.to_string()).collect();
                body.push_str(&format!(
                    "{seed},{objective:?},{:.12},{:.12},{},{}\n",
                    o.report.mean_outage,
                    o.report.max_outage,
                    o.candidates,
                    a.join(";")
                ));
            }
            Err(e) => {
                eprintln!("seed {seed}: {e}");
                failures.push(ex::Failure { seed, stage: "size gate".into(), message: e.to_string() });
            }
        }
    }
    finish(common, "brute_force", body, &[], vec![], &failures)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let common = &cli.common;
    if common.seeds.is_empty() {
        bail!("--seeds must list at least one seed");
    }
    let base = match cli.command {
        Command::Optimality { .. } | Command::BruteForce { .. } => ex::optimality_config(),
        _ => SimConfig::default(),
    };
    let cfg = load_config(common.config.as_deref(), base)?;
    let source = match &common.scenario {
        Some(p) => Source::Fixed(load_scenario(p)?),
        None => Source::Generate(cfg.clone()),
    };
    match cli.command {
        Command::GammaSweep { grid } => {
            let grid = grid.unwrap_or_else(|| ex::GAMMA_GRID.to_vec());
            let run = ex::run_gamma_sweep(&source, &common.seeds, &grid);
            finish(
                common,
                "gamma_sweep",
                ex::kind_rows_csv("gamma_th", &run.rows),
                &ex::kind_samples("gamma_th", &run.rows),
                ex::gamma_checks(&run.rows),
                &run.failures,
            )?;
        }
        Command::DeviceSweep { sizes } => {
            let sizes = sizes.unwrap_or_else(ex::device_grid);
            let run = ex::run_device_sweep(&source, &common.seeds, &sizes);
            finish(
                common,
                "device_sweep",
                ex::kind_rows_csv("n_users", &run.rows),
                &ex::kind_samples("n_users", &run.rows),
                ex::device_checks(&run.rows),
                &run.failures,
            )?;
        }
        Command::Compare { sizes } => {
            let run = ex::run_compare(&source, &common.seeds, &sizes);
            let largest = run.rows.iter().map(|r| r.n_users).max();
            finish(
                common,
                "compare",
                ex::compare_csv(&run.rows),
                &ex::compare_samples(&run.rows),
                ex::compare_checks(&run.rows, largest.map(|n| (n, 0.25))),
                &run.failures,
            )?;
        }
        Command::CarrierDistribution => {
            let (dist, run) = ex::run_distribution(&source, &common.seeds);
            write(&common.out, "carrier_index.csv", &ex::carrier_index_csv(&run.rows))?;
            let samples: Vec<Sample> = run
                .rows
                .iter()
                .flat_map(|r| {
                    [("mean_index_ue", r.mean_index_ue), ("mean_index_uav", r.mean_index_uav)]
                        .map(|(m, v)| Sample { group: "all".into(), metric: m.into(), seed: r.seed, value: v })
                })
                .collect();
            finish(common, "distribution", ex::distribution_csv(&dist), &samples, ex::distribution_checks(&run.rows), &run.failures)?;
        }
        Command::Optimality { max_gap } => {
            let run = ex::run_optimality(&source, &common.seeds);
            let samples: Vec<Sample> = run
                .rows
                .iter()
                .map(|r| Sample { group: "all".into(), metric: "ratio".into(), seed: r.seed, value: r.ratio })
                .collect();
            finish(common, "optimality", ex::optimality_csv(&run.rows), &samples, ex::optimality_checks(&run.rows, max_gap), &run.failures)?;
        }
        Command::OutageCheck { input, draws } => return outage_check(common, &cfg, &input, draws),
        Command::BruteForce { objective } => {
            let objective = match objective {
                ObjectiveArg::Mean => Objective::Mean,
                ObjectiveArg::Max => Objective::Max,
            };
            brute_force(common, &source, objective)?;
        }
    }
    dumps(common, &source)
}
