use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use wordvec::corpus::{build_vocabulary, TokenStream, DEFAULT_MIN_COUNT};
use wordvec::eval::{evaluate, load_questions};
use wordvec::lfw::{export_weight_curve, write_curve_csv, LfwFormula};
use wordvec::model_io::{self, ModelFile, ModelFormat, Sidecar};
use wordvec::trainer::{train, ModelKind, TrainConfig};
use wordvec::window::{WindowStrategy, DEFAULT_PHASES};
use wordvec::{Error, Result};

#[derive(Parser)]
#[command(
    name = "wordvec",
    version,
    about = "CBOW / Skip-gram word embeddings with distance weighting and window scheduling"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Cbow,
    Skipgram,
}

#[derive(Clone, Copy, ValueEnum)]
enum LfwArg {
    None,
    Eq3,
    Eq4,
    Eq5,
    Eq6,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Fixed,
    Random,
    Edws,
}

#[derive(Clone, Copy, ValueEnum)]
enum FileFormat {
    Text,
    Bin,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Table,
    Csv,
    Json,
}

impl From<FileFormat> for ModelFormat {
    fn from(f: FileFormat) -> Self {
        match f {
            FileFormat::Text => ModelFormat::Text,
            FileFormat::Bin => ModelFormat::Binary,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Train embeddings on a preprocessed corpus.
    Train {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value = "cbow")]
        model: ModelArg,
        #[arg(long, value_enum, default_value = "none")]
        lfw: LfwArg,
        /// Defaults to `fixed` for CBOW and `random` for Skip-gram.
        #[arg(long, value_enum)]
        window_strategy: Option<StrategyArg>,
        #[arg(long, default_value_t = 15)]
        window: usize,
        #[arg(long, default_value_t = 6)]
        epochs: usize,
        #[arg(long, default_value_t = DEFAULT_PHASES)]
        edws_phases: usize,
        #[arg(long, default_value_t = 128)]
        dim: usize,
        #[arg(long, default_value_t = 5)]
        negatives: usize,
        /// Defaults to 0.05 for CBOW and 0.025 for Skip-gram.
        #[arg(long)]
        lr: Option<f64>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Keep words occurring at least this many times.
        #[arg(long, default_value_t = DEFAULT_MIN_COUNT)]
        min_count: u64,
        /// Subsampling threshold (e.g. 1e-5); disabled when omitted.
        #[arg(long)]
        subsample: Option<f64>,
        #[arg(long, default_value_t = 0.1)]
        lfw_lr_scale: f64,
        /// Keep the distance-weight parameters at zero.
        #[arg(long)]
        freeze_lfw: bool,
        #[arg(long, value_enum, default_value = "bin")]
        format: FileFormat,
        /// Also write the vocabulary (`word count` per line).
        #[arg(long)]
        vocab_out: Option<PathBuf>,
        /// Also write the normalized weight curve as CSV.
        #[arg(long)]
        curve_out: Option<PathBuf>,
    },
    /// Score a model on an analogy question file.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        questions: PathBuf,
        #[arg(long, value_enum, default_value = "table")]
        format: ReportFormat,
    },
    /// Convert between text and binary model files.
    Convert {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
        #[arg(long, value_enum)]
        format: FileFormat,
    },
    /// Build and print the vocabulary of a corpus.
    Vocab {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MIN_COUNT)]
        min_count: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Export the normalized weight curve stored in a training sidecar.
    Curve {
        #[arg(long)]
        sidecar: PathBuf,
        /// Defaults to the window recorded in the sidecar.
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn open_corpus(path: &PathBuf) -> Result<BufReader<File>> {
    File::open(path)
        .map(|f| BufReader::with_capacity(1 << 20, f))
        .map_err(|e| Error::IoAt {
            path: path.clone(),
            source: e,
        })
}

fn output_writer(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(File::create(p).map_err(|e| {
            Error::IoAt {
                path: p.clone(),
                source: e,
            }
        })?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train {
            input,
            output,
            model,
            lfw,
            window_strategy,
            window,
            epochs,
            edws_phases,
            dim,
            negatives,
            lr,
            threads,
            seed,
            min_count,
            subsample,
            lfw_lr_scale,
            freeze_lfw,
            format,
            vocab_out,
            curve_out,
        } => {
            let kind = match model {
                ModelArg::Cbow => ModelKind::Cbow,
                ModelArg::Skipgram => ModelKind::SkipGram,
            };
            let mut config = TrainConfig::new(kind);
            config.window.strategy = match window_strategy {
                Some(StrategyArg::Fixed) => WindowStrategy::Fixed,
                Some(StrategyArg::Random) => WindowStrategy::RandomDynamic,
                Some(StrategyArg::Edws) => WindowStrategy::EpochBased,
                None => config.window.strategy,
            };
            config.window.max_window = window;
            config.window.epochs = epochs;
            config.window.phases = edws_phases;
            config.lfw = match lfw {
                LfwArg::None => None,
                LfwArg::Eq3 => Some(LfwFormula::PowerShared),
                LfwArg::Eq4 => Some(LfwFormula::PowerSplit),
                LfwArg::Eq5 => Some(LfwFormula::ExpShared),
                LfwArg::Eq6 => Some(LfwFormula::ExpSplit),
            };
            config.freeze_lfw = freeze_lfw;
            config.lfw_lr_scale = lfw_lr_scale;
            config.dim = dim;
            config.negatives = negatives;
            if let Some(lr) = lr {
                config.learning_rate = lr;
            }
            config.threads = threads;
            config.seed = seed;
            config.subsample = subsample;
            config.validate()?;

            let vocab = build_vocabulary(open_corpus(&input)?, min_count)?;
            log::info!("vocabulary size {}", vocab.len());
            if let Some(p) = &vocab_out {
                vocab.write_to(output_writer(Some(p))?)?;
            }
            let stream = TokenStream::from_reader(open_corpus(&input)?, &vocab)?;
            log::info!("{} training tokens", stream.len());

            let out = train::<f32>(&vocab, &stream, &config)?;
            let file = ModelFile::from_embeddings(&vocab, &out.embeddings)?;
            model_io::save(&file, &output, format.into())?;
            let sidecar = Sidecar::new(
                &config,
                vocab.len(),
                min_count,
                out.lfw.as_ref(),
                &out.epochs,
            );
            model_io::save_sidecar(&sidecar, model_io::sidecar_path(&output))?;
            if let (Some(p), Some(params)) = (&curve_out, &out.lfw) {
                let curve = export_weight_curve(params, config.window.max_window)?;
                write_curve_csv(&curve, output_writer(Some(p))?)?;
            }
            log::info!("model written to {}", output.display());
        }
        Command::Eval {
            model,
            questions,
            format,
        } => {
            let file = model_io::load(&model)?;
            let questions = load_questions(&questions)?;
            let report = evaluate(&file.solver()?, &questions);
            let mut out = io::stdout().lock();
            match format {
                ReportFormat::Table => report.write_table(&mut out)?,
                ReportFormat::Csv => out.write_all(report.to_csv().as_bytes())?,
                ReportFormat::Json => writeln!(out, "{}", report.to_json())?,
            }
        }
        Command::Convert {
            input,
            output,
            format,
        } => {
            let file = model_io::load(&input)?;
            model_io::save(&file, &output, format.into())?;
        }
        Command::Vocab {
            input,
            min_count,
            output,
        } => {
            let vocab = build_vocabulary(open_corpus(&input)?, min_count)?;
            eprintln!("vocabulary size {}", vocab.len());
            vocab.write_to(output_writer(output.as_ref())?)?;
        }
        Command::Curve {
            sidecar,
            window,
            output,
        } => {
            let sc = model_io::load_sidecar(&sidecar)?;
            let record = sc
                .lfw
                .ok_or_else(|| Error::Config("sidecar has no distance-weight parameters".into()))?;
            let params = record.to_params()?;
            let curve =
                export_weight_curve(&params, window.unwrap_or(sc.config.window.max_window))?;
            write_curve_csv(&curve, output_writer(output.as_ref())?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
