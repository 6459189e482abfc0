use std::fs;
use std::io::{self, BufRead, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Arg, ArgMatches, Command};
use log::info;

use spamadjust::corpus::{generate_synthetic, write_tsv};
use spamadjust::pipeline::{self, PipelineConfig, KEYS};
use spamadjust::{textproc, Error};

/// Adds `--config` and one `--<key> VALUE` flag per configuration key.
fn with_config_args(cmd: Command) -> Command {
    let cmd = cmd.arg(
        Arg::new("config")
            .long("config")
            .short('c')
            .value_name("FILE")
            .value_parser(clap::value_parser!(PathBuf))
            .help("key = value configuration file"),
    );
    KEYS.iter().fold(cmd, |cmd, (key, doc)| {
        cmd.arg(Arg::new(*key).long(*key).value_name("VALUE").help(*doc))
    })
}

fn cli() -> Command {
    Command::new("spamadjust")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Spam classification with subtopic descriptor/discriminator adjustment")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .subcommand(with_config_args(
            Command::new("run").about("Cross-validate the configured pipeline and write its artifacts"),
        ))
        .subcommand(with_config_args(
            Command::new("compare").about("Compare the configured pipeline against alpha = beta = 0"),
        ))
        .subcommand(
            with_config_args(Command::new("gen").about("Write the configured synthetic corpus as label<TAB>text"))
                .arg(
                    Arg::new("out")
                        .long("out")
                        .short('o')
                        .value_name("FILE")
                        .value_parser(clap::value_parser!(PathBuf))
                        .help("output file (default: stdout)"),
                ),
        )
        .subcommand(Command::new("stem").about("Stem whitespace-separated words read from stdin, one per line"))
        .subcommand(Command::new("keys").about("Print every configuration key with its default"))
}

fn load_config(m: &ArgMatches) -> Result<PipelineConfig, Error> {
    let text = match m.get_one::<PathBuf>("config") {
        Some(path) => fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        })?,
        None => String::new(),
    };
    let overrides: Vec<(String, String)> = KEYS
        .iter()
        .filter_map(|(key, _)| m.get_one::<String>(key).map(|v| (key.to_string(), v.clone())))
        .collect();
    pipeline::parse_config(&text, &overrides)
}

fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> Error {
    let path = path.into();
    move |source| Error::Io { path, source }
}

fn cmd_run(m: &ArgMatches) -> Result<(), Error> {
    let cfg = load_config(m)?;
    let run = pipeline::run_pipeline(&cfg)?;
    let mut out = io::stdout().lock();
    run.report().write_text(&mut out).map_err(io_err("<stdout>"))?;
    info!("artifacts written to {}", cfg.output_dir.display());
    Ok(())
}

fn cmd_compare(m: &ArgMatches) -> Result<(), Error> {
    let cfg = load_config(m)?;
    let cmp = pipeline::run_compare(&cfg)?;
    cmp.write_text(io::stdout().lock()).map_err(io_err("<stdout>"))?;
    info!("artifacts written to {}", cfg.output_dir.display());
    Ok(())
}

fn cmd_gen(m: &ArgMatches) -> Result<(), Error> {
    let cfg = load_config(m)?;
    let corpus = generate_synthetic(&cfg.synthetic)?.corpus;
    match m.get_one::<PathBuf>("out") {
        Some(path) => {
            let file = fs::File::create(path).map_err(io_err(path))?;
            write_tsv(&corpus, BufWriter::new(file)).map_err(io_err(path))
        }
        None => write_tsv(&corpus, io::stdout().lock()).map_err(io_err("<stdout>")),
    }
}

fn cmd_stem() -> Result<(), Error> {
    let mut out = io::stdout().lock();
    for line in io::stdin().lock().lines() {
        let line = line.map_err(io_err("<stdin>"))?;
        for word in line.split_whitespace() {
            writeln!(out, "{}", textproc::stem(word)).map_err(io_err("<stdout>"))?;
        }
    }
    out.flush().map_err(io_err("<stdout>"))
}

fn cmd_keys() -> Result<(), Error> {
    let cfg = PipelineConfig::default();
    io::stdout()
        .lock()
        .write_all(cfg.to_text().as_bytes())
        .map_err(io_err("<stdout>"))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let matches = cli().get_matches();
    let result = match matches.subcommand() {
        Some(("run", m)) => cmd_run(m),
        Some(("compare", m)) => cmd_compare(m),
        Some(("gen", m)) => cmd_gen(m),
        Some(("stem", _)) => cmd_stem(),
        Some(("keys", _)) => cmd_keys(),
        _ => unreachable!("subcommand_required"),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
