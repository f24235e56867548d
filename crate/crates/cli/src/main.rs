use clap::{Arg, ArgAction, ArgMatches, Command};
use lclab_cli::criteria::{verify_all, Summary, DEFAULT_SEED};
use lclab_cli::experiments::EXPERIMENTS;
use lclab_cli::{error_code, ExperimentConfig, UsageError, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};
use std::path::PathBuf;
use std::process::exit;

fn common_args(cmd: Command) -> Command {
    cmd.arg(Arg::new("config").long("config").value_name("PATH").value_parser(clap::value_parser!(PathBuf)).help("JSON experiment config"))
        .arg(Arg::new("seed").long("seed").value_name("U64").value_parser(clap::value_parser!(u64)).help("overrides the config seed"))
        .arg(Arg::new("out").long("out").value_name("DIR").value_parser(clap::value_parser!(PathBuf)).help("directory for CSV and JSON outputs"))
        .arg(Arg::new("quick").long("quick").action(ArgAction::SetTrue).help("run the fast subset (verify-all only)"))
        .arg(Arg::new("json").long("json").action(ArgAction::SetTrue).help("print the report as JSON"))
}

fn cli() -> Command {
    let mut cmd = Command::new("lclab")
        .about("Numerical laboratory for log-concave measures")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .subcommand(Command::new("list").about("list the registered experiments"))
        .subcommand(common_args(Command::new("verify-all").about("run the acceptance suite")));
    for e in EXPERIMENTS {
        cmd = cmd.subcommand(common_args(Command::new(e.name).about(e.about)));
    }
    cmd
}

fn config_for(name: &str, m: &ArgMatches) -> Result<ExperimentConfig, UsageError> {
    let mut cfg = match m.get_one::<PathBuf>("config") {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::new(name),
    };
    if cfg.experiment != name {
        return Err(UsageError(format!("config names experiment '{}' but '{name}' was invoked", cfg.experiment)));
    }
    if let Some(s) = m.get_one::<u64>("seed") {
        cfg.seed = *s;
    }
    if let Some(o) = m.get_one::<PathBuf>("out") {
        cfg.out = Some(o.clone());
    }
    Ok(cfg)
}

fn run_experiment(name: &str, m: &ArgMatches) -> i32 {
    let cfg = match config_for(name, m) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    match lclab_cli::run(&cfg) {
        Ok(report) => {
            if m.get_flag("json") {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                print!("{}", report.render());
            }
            if report.passed { EXIT_PASS } else { EXIT_FAIL }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            error_code(&e)
        }
    }
}

fn write_summary(dir: &PathBuf, s: &Summary) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("verify.csv"), s.to_csv())?;
    std::fs::write(dir.join("verify.json"), serde_json::to_string_pretty(s).expect("summary serializes"))
}

fn run_verify(m: &ArgMatches) -> i32 {
    if m.get_one::<PathBuf>("config").is_some() {
        eprintln!("error: verify-all takes no config");
        return EXIT_USAGE;
    }
    let seed = m.get_one::<u64>("seed").copied().unwrap_or(DEFAULT_SEED);
    let summary = verify_all(seed, m.get_flag("quick"));
    if let Some(dir) = m.get_one::<PathBuf>("out") {
        if let Err(e) = write_summary(dir, &summary) {
            eprintln!("error: cannot write to {}: {e}", dir.display());
            return EXIT_USAGE;
        }
    }
    if m.get_flag("json") {
        println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
    } else {
        print!("{}", summary.render());
    }
    match summary.first_failure() {
        Some(o) => {
            eprintln!("criterion {} ({}) failed", o.id, o.title);
            EXIT_FAIL
        }
        None => EXIT_PASS,
    }
}

fn main() {
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            exit(code);
        }
    };
    let code = match matches.subcommand() {
        Some(("list", _)) => {
            for e in EXPERIMENTS {
                println!("{:<24} {}", e.name, e.about);
            }
            EXIT_PASS
        }
        Some(("verify-all", m)) => run_verify(m),
        Some((name, m)) => run_experiment(name, m),
        None => EXIT_USAGE,
    };
    exit(code)
}
