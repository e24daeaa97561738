//! `mcpoint`: genera, point counts and Weil polynomials of Atkin–Lehner
//! quotients of `X(n0, n_ns)`.
//!
//! Output lines are `key=value` pairs separated by spaces. Exit status is
//! 0 on success, 1 when a computation or the data fails, 2 on bad usage.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use mcpoint_core::curve::{parse_table_notation, AlSubgroup, QuotientCurve};
use mcpoint_core::lattice::{reduce_to_basis, BasisData};
use mcpoint_core::multiplicity::{decompose, EpsilonPolicy, IsogenyDecomposition};
use mcpoint_core::newform::NewformStore;
use mcpoint_core::points::{count_points, genus, hws_bound, real_weil_poly_of_curve, FieldSize};
use mcpoint_core::scanner::{
    best_table, format_coeffs, maximal_table, record_table, scan, sidecar_path, write_best_csv,
    write_maximal_csv, write_record_csv, ScanConfig, UpperBounds,
};
use mcpoint_lmfdb::{fetch_into, ClientOptions, FetchRequest};
use num_bigint::BigInt;

#[derive(Parser)]
#[command(name = "mcpoint", version, about = "Point counts on quotients of Borel-Cartan modular curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DataArgs {
    /// Fixture file or directory; defaults to $MCPOINT_FIXTURES.
    #[arg(long)]
    fixtures: Option<PathBuf>,
    /// Fail when an Atkin-Lehner sign outside the form's level is needed.
    #[arg(long)]
    strict_epsilon: bool,
}

impl DataArgs {
    fn store(&self) -> Result<NewformStore> {
        NewformStore::load_default(self.fixtures.as_deref()).context("newform-store")
    }

    fn policy(&self) -> EpsilonPolicy {
        if self.strict_epsilon {
            EpsilonPolicy::Strict
        } else {
            EpsilonPolicy::OldformPlusOne
        }
    }
}

fn parse_curve(s: &str) -> Result<QuotientCurve, String> {
    parse_table_notation(s).map_err(|e| e.to_string())
}

fn parse_q(s: &str) -> Result<FieldSize, String> {
    s.parse().map_err(|e: mcpoint_core::points::PointError| e.to_string())
}

fn parse_mask(s: &str) -> Result<u32, String> {
    let t = s.trim();
    let r = match t.strip_prefix("0b") {
        Some(b) => u32::from_str_radix(b, 2),
        None => t.parse(),
    };
    r.map_err(|_| format!("{s:?} is not a bitmask"))
}

/// `1,2,5-9` style lists.
fn parse_list(s: &str) -> Result<Vec<u64>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let num = |x: &str| x.trim().parse::<u64>().map_err(|_| format!("{x:?} is not a number"));
        match part.split_once('-') {
            Some((a, b)) => out.extend(num(a)?..=num(b)?),
            None => out.push(num(part)?),
        }
    }
    Ok(out)
}

#[derive(Subcommand)]
enum Command {
    /// Genus and number of F_q-points.
    Count {
        #[arg(long, value_parser = parse_curve)]
        curve: QuotientCurve,
        /// Field size as p^k or a prime power; repeatable.
        #[arg(long, value_parser = parse_q, required = true)]
        q: Vec<FieldSize>,
        #[command(flatten)]
        data: DataArgs,
    },
    /// Genus only.
    Genus {
        #[arg(long, value_parser = parse_curve)]
        curve: QuotientCurve,
        #[command(flatten)]
        data: DataArgs,
    },
    /// Newform classes and their multiplicities in the Jacobian.
    Decompose {
        #[arg(long, value_parser = parse_curve)]
        curve: QuotientCurve,
        #[command(flatten)]
        data: DataArgs,
    },
    /// Real Weil polynomial over F_q, coefficients in ascending order.
    Weil {
        #[arg(long, value_parser = parse_curve)]
        curve: QuotientCurve,
        #[arg(long, value_parser = parse_q)]
        q: FieldSize,
        #[command(flatten)]
        data: DataArgs,
    },
    /// Hasse-Weil-Serre bound q + 1 + g*floor(2*sqrt(q)).
    Bound {
        #[arg(long)]
        genus: u64,
        #[arg(long, value_parser = parse_q)]
        q: FieldSize,
    },
    /// Evaluates a subgroup from values on the subsets of the standard basis.
    Lattice {
        #[arg(long)]
        r: usize,
        /// JSON object from subset bitmask to integer, e.g. {"0":16,"1":6,"2":7,"3":2}.
        #[arg(long)]
        data: String,
        /// Generators of the subgroup as bitmasks, comma separated.
        #[arg(long, value_delimiter = ',', value_parser = parse_mask)]
        subgroup: Vec<u32>,
    },
    /// Runs the scanner described by a TOML config.
    Scan {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's thread count.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Downloads newform data from the LMFDB into a fixture file.
    Fetch {
        #[arg(long, value_parser = parse_list)]
        levels: Vec<u64>,
        #[arg(long, value_parser = parse_list)]
        primes: Vec<u64>,
        #[arg(long)]
        cache: PathBuf,
        /// Fixture file to create or update.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        offline: bool,
        #[arg(long)]
        refresh: bool,
        /// API base URL; defaults to $MCPOINT_LMFDB_URL or the public site.
        #[arg(long)]
        url: Option<String>,
        #[arg(long, default_value_t = 30)]
        timeout_secs: u64,
    },
}

fn decomposition(curve: &QuotientCurve, data: &DataArgs) -> Result<IsogenyDecomposition> {
    let store = data.store()?;
    decompose(curve, &store, data.policy()).context("multiplicity-engine")
}

fn run(cli: Cli) -> Result<Vec<String>> {
    let mut out = Vec::new();
    match cli.command {
        Command::Count { curve, q, data } => {
            let dec = decomposition(&curve, &data)?;
            for q in q {
                let r = count_points(&dec, q).context("point-counter")?;
                out.push(format!(
                    "curve={curve} q={q} genus={} count={} maximal={} bound={}",
                    r.genus, r.count, r.maximal, r.hws_bound
                ));
            }
        }
        Command::Genus { curve, data } => {
            let dec = decomposition(&curve, &data)?;
            out.push(format!("curve={curve} genus={}", genus(&dec)));
        }
        Command::Decompose { curve, data } => {
            let dec = decomposition(&curve, &data)?;
            for t in &dec.terms {
                out.push(format!(
                    "label={} dim={} multiplicity={}",
                    t.form.label, t.form.dim, t.multiplicity
                ));
            }
            out.push(format!(
                "curve={curve} genus={} classes={} dropped={}",
                genus(&dec),
                dec.terms.len(),
                dec.dropped
            ));
        }
        Command::Weil { curve, q, data } => {
            let dec = decomposition(&curve, &data)?;
            let h = real_weil_poly_of_curve(&dec, q).context("point-counter")?;
            out.push(format!("curve={curve} q={q} genus={} h_w={}", genus(&dec), format_coeffs(&h)));
        }
        Command::Bound { genus, q } => {
            out.push(format!("genus={genus} q={q} bound={}", hws_bound(genus, q)));
        }
        Command::Lattice { r, data, subgroup } => {
            let raw: BTreeMap<String, serde_json::Value> =
                serde_json::from_str(&data).context("quotient-lattice: --data must be a JSON object")?;
            let mut values = BTreeMap::new();
            for (k, v) in raw {
                let mask = parse_mask(&k).map_err(|e| anyhow!("quotient-lattice: {e}"))?;
                let v: BigInt = v
                    .to_string()
                    .parse()
                    .map_err(|_| anyhow!("quotient-lattice: value {v} for {k} is not an integer"))?;
                values.insert(mask, v);
            }
            let w = AlSubgroup::generated(r, subgroup).context("curve-model")?;
            let basis = BasisData::standard(r, values).context("quotient-lattice")?;
            let comb = reduce_to_basis(&w, basis.basis()).context("quotient-lattice")?;
            let value = basis.evaluate(&comb).context("quotient-lattice")?;
            if value < BigInt::from(0) {
                return Err(anyhow!("quotient-lattice: evaluated value {value} is negative"));
            }
            let mut terms: Vec<(u32, i64)> = comb
                .terms()
                .map(|(h, c)| (h.basis().iter().fold(0, |a, v| a | v), c))
                .collect();
            terms.sort_unstable();
            for (mask, c) in terms {
                out.push(format!("subset={mask:#b} coefficient={c}"));
            }
            out.push(format!("value={value}"));
        }
        Command::Scan { config, threads } => {
            let mut cfg = ScanConfig::read(&config).context("scanner")?;
            if let Some(t) = threads {
                cfg.threads = t;
            }
            out.extend(run_scan(&cfg)?);
        }
        Command::Fetch {
            levels,
            primes,
            cache,
            out: target,
            offline,
            refresh,
            url,
            timeout_secs,
        } => {
            let mut opts = ClientOptions::default();
            if let Some(u) = url {
                opts.base_url = u;
            }
            opts.timeout = Duration::from_secs(timeout_secs);
            let req = FetchRequest {
                levels: levels.into_iter().collect::<BTreeSet<_>>(),
                primes_needed: primes.into_iter().collect(),
                cache_dir: cache,
                offline,
                refresh,
            };
            let file = fetch_into(&req, &opts, &target).context("lmfdb-client")?;
            out.push(format!(
                "out={} levels={} records={}",
                target.display(),
                file.coverage.len(),
                file.records.len()
            ));
        }
    }
    Ok(out)
}

fn run_scan(cfg: &ScanConfig) -> Result<Vec<String>> {
    let store = NewformStore::load(&cfg.fixtures).context("newform-store")?;
    let outcome = scan(cfg, &store).context("scanner")?;
    let bounds = match &cfg.bounds {
        Some(p) => UpperBounds::read(p).context("scanner")?,
        None => UpperBounds::new(),
    };
    let range = cfg.genus_range[0]..=cfg.genus_range[1];
    let in_range: Vec<_> = outcome
        .rows
        .iter()
        .filter(|r| range.contains(&r.genus))
        .cloned()
        .collect();
    let best = best_table(&in_range, range.clone(), None);
    let maximal = maximal_table(&in_range, &store, cfg.policy(), &bounds).context("scanner")?;
    let records = record_table(&best, &bounds).context("scanner")?;
    write_best_csv(&sidecar_path(&cfg.output, "best.csv"), &best)?;
    write_maximal_csv(&sidecar_path(&cfg.output, "maximal.csv"), &maximal)?;
    write_record_csv(&sidecar_path(&cfg.output, "records.csv"), &records)?;
    Ok(vec![format!(
        "output={} rows={} skipped={} computed={} resumed={} best={} maximal_groups={} records={}",
        display(&cfg.output),
        outcome.rows.len(),
        outcome.skips.len(),
        outcome.computed,
        outcome.resumed,
        best.len(),
        maximal.len(),
        records.len()
    )])
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
