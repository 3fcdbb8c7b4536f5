use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use orgprofile::address::{parse_address, split_addresses};
use orgprofile::corpus::DocType;
use orgprofile::normalize::render_suggestions;
use orgprofile::pipeline::{
    analyze, run_outputs, run_pipeline, validate_config, OutputSet, Overrides, PipelineConfig,
    PipelineError, YearRange,
};

const EXIT_INVALID: u8 = 1;
const EXIT_RUNTIME: u8 = 2;

#[derive(Parser)]
#[command(name = "orgprofile", version, about = "Organizational-unit research profiles from affiliation addresses")]
struct Cli {
    /// Pipeline configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Keep exported edges with weight above this value.
    #[arg(long = "min-cooc", global = true)]
    min_cooc: Option<u64>,
    /// List units with more publications than this.
    #[arg(long = "min-pubs", global = true)]
    min_pubs: Option<u64>,
    /// Comma-separated document types, e.g. article,review.
    #[arg(long = "doc-types", global = true, value_delimiter = ',')]
    doc_types: Option<Vec<DocType>>,
    /// Publication years, e.g. 2006-2010.
    #[arg(long, global = true)]
    years: Option<YearRange>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load and filter the corpus and print where every record ended up.
    Ingest,
    /// Print the decomposition of one or more raw address fields.
    ParseDebug {
        #[arg(required = true)]
        addresses: Vec<String>,
    },
    /// Propose alias groups for unit-name variants still in the data.
    SuggestAliases {
        #[arg(long, default_value_t = 2)]
        max_distance: usize,
    },
    /// Write node/edge tables, components, GraphML and DOT.
    Network,
    /// Write research profiles and the indicator table.
    Profiles,
    /// Write the exclusion summary and the unit-type distribution.
    Report,
    /// Run the full pipeline.
    Run,
}

enum Failure {
    Invalid(String),
    Runtime(String),
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Invalid(_) => Failure::Invalid(e.to_string()),
            PipelineError::Stage { .. } => Failure::Runtime(e.to_string()),
        }
    }
}

fn load_config(cli: &Cli) -> Result<PipelineConfig, Failure> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Failure::Invalid("this command needs --config".to_string()))?;
    let mut config = PipelineConfig::load(path).map_err(Failure::Invalid)?;
    Overrides {
        min_cooccurrence: cli.min_cooc,
        min_publications: cli.min_pubs,
        doc_types: cli.doc_types.as_ref().map(|v| v.iter().copied().collect::<BTreeSet<_>>()),
        years: cli.years,
        output_dir: cli.out.clone(),
    }
    .apply(&mut config);
    let problems = validate_config(&config);
    if !problems.is_empty() {
        let lines: Vec<String> = problems.iter().map(|p| format!("  {p}")).collect();
        return Err(Failure::Invalid(format!("invalid configuration:\n{}", lines.join("\n"))));
    }
    Ok(config)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::ParseDebug { addresses } => {
            for field in addresses {
                let split = split_addresses(field);
                if let Some(d) = &split.diagnostic {
                    eprintln!("warning: {d}");
                }
                for address in &split.addresses {
                    println!("address: {address}");
                    match parse_address(address) {
                        Ok(parse) => println!("{parse}\n"),
                        Err(e) => println!("error: {e}\n"),
                    }
                }
            }
        }
        Command::Ingest => {
            let analysis = analyze(&load_config(cli)?)?;
            for w in &analysis.warnings {
                eprintln!("warning: {w}");
            }
            let json = serde_json::to_string_pretty(&analysis.counts).expect("counts serialize");
            println!("{json}");
        }
        Command::SuggestAliases { max_distance } => {
            let config = load_config(cli)?;
            let analysis = analyze(&config)?;
            let text = render_suggestions(&analysis.alias_suggestions(*max_distance));
            match &cli.out {
                Some(dir) => {
                    let path = dir.join("alias_suggestions.tsv");
                    fs::create_dir_all(dir)
                        .and_then(|_| fs::write(&path, text))
                        .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
                    println!("wrote {}", path.display());
                }
                None => print!("{text}"),
            }
        }
        Command::Network | Command::Profiles | Command::Report => {
            let set = match cli.command {
                Command::Network => OutputSet::Network,
                Command::Profiles => OutputSet::Profiles,
                _ => OutputSet::Report,
            };
            let config = load_config(cli)?;
            let (analysis, files) = run_outputs(&config, set)?;
            for w in &analysis.warnings {
                eprintln!("warning: {w}");
            }
            for name in files.keys() {
                println!("wrote {}", config.output_dir.join(name).display());
            }
        }
        Command::Run => {
            let config = load_config(cli)?;
            let report = run_pipeline(&config)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            let c = report.counts;
            println!(
                "records: {} total, {} analyzed, {} university-only, {} doc-type filtered, {} out of period, {} without target address",
                c.total, c.analyzed, c.university_only, c.doc_type_filtered, c.out_of_period, c.no_target_address
            );
            println!(
                "network: {} units, {} edges, {} component(s); {} indicator row(s)",
                report.units,
                report.edges,
                report.components.len(),
                report.indicator_rows
            );
            println!("outputs in {}", config.output_dir.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INVALID)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
