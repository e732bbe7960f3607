use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use curator::checkpoint::Checkpoint;
use curator::error::{CuratorError, Result};
use curator::pipeline::{self, DiscSettings};
use curator::plan::StepPlan;
use curator::report::{self, StepReport};
use curator::websource::{
    build_caption_memory, CaptionMemory, CaptionProvider, Manifest, ManifestCaptions, MockBackend,
};
use curator::{fixture, io};
use curator_core::semfilter::NounCount;
use serde_json::json;

#[derive(Parser)]
#[command(name = "curator", version, about = "Curate web images for incremental weakly-supervised segmentation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the plan seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Captioner {
    /// Caption column of the manifests.
    Manifest,
    /// External service at $CURATOR_CAPTION_URL.
    Http,
}

#[derive(Subcommand)]
enum Command {
    /// Train the dataset-vs-web spectrum discriminator.
    TrainDisc {
        #[command(flatten)]
        common: Common,
        /// Step-0 dataset manifest (positives).
        #[arg(long)]
        manifest: PathBuf,
        /// Web manifest (negatives).
        #[arg(long)]
        web: PathBuf,
        #[arg(long, requires = "holdout_web")]
        holdout_manifest: Option<PathBuf>,
        #[arg(long, requires = "holdout_manifest")]
        holdout_web: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        epochs: usize,
        #[arg(long, default_value_t = 0.01)]
        learning_rate: f64,
        #[arg(long, default_value_t = 24)]
        batch_size: usize,
        /// Stop after the first epoch reaching this training accuracy.
        #[arg(long)]
        target_accuracy: Option<f64>,
    },
    /// Caption the step-0 images into a caption memory.
    BuildMemory {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, value_enum, default_value = "manifest")]
        captioner: Captioner,
    },
    /// Crawl, gate, caption and label images of the new classes.
    Acquire {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        plan: PathBuf,
        /// Web manifest searched by the mock backend.
        #[arg(long)]
        manifest: PathBuf,
        /// Discriminator checkpoint from `train-disc`.
        #[arg(long)]
        model: PathBuf,
        /// Class lexicon; the VOC lexicon when omitted.
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "manifest")]
        captioner: Captioner,
        /// Keep going when a class ends up with no images.
        #[arg(long)]
        allow_empty: bool,
    },
    /// Retrieve and filter rehearsal images for the old classes.
    Rehearse {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        /// Caption memory from `build-memory`.
        #[arg(long)]
        memory: PathBuf,
        /// Directory holding `index.noun` and `data.noun`; the bundled mini
        /// database when omitted.
        #[arg(long)]
        wordnet: Option<PathBuf>,
        #[arg(long)]
        stopwords: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "manifest")]
        captioner: Captioner,
    },
    /// Train the toy per-pixel scorer on the loss stack.
    ToyStep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        plan: PathBuf,
        /// Toy training manifest.
        #[arg(long)]
        manifest: PathBuf,
        /// Toy rehearsal manifest.
        #[arg(long)]
        rehearsal: Option<PathBuf>,
        /// Overrides the plan's toy epochs.
        #[arg(long)]
        epochs: Option<usize>,
    },
    /// Kept-rate of the caption filter over a grid of thresholds and noun counts.
    AblateFilter {
        #[command(flatten)]
        common: Common,
        /// Tab-separated caption pairs.
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 0.6, 0.7])]
        thresholds: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values = ["2", "ALL"])]
        nouns: Vec<NounCount>,
        #[arg(long)]
        wordnet: Option<PathBuf>,
        #[arg(long)]
        stopwords: Option<PathBuf>,
    },
    /// Merge step reports into a text and JSON summary.
    Report {
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        /// Also draw the toy loss curves.
        #[arg(long)]
        svg: bool,
    },
    /// Regenerate the bundled fixture corpus.
    Fixture {
        #[arg(long)]
        out: PathBuf,
    },
}

fn provider(kind: Captioner, manifests: &[&Manifest]) -> Result<Box<dyn CaptionProvider>> {
    match kind {
        Captioner::Manifest => Ok(Box::new(ManifestCaptions::from_manifests(manifests.iter().copied()))),
        #[cfg(feature = "http")]
        Captioner::Http => curator::websource::HttpCaptioner::from_env(std::time::Duration::from_secs(30))
            .map(|c| Box::new(c) as Box<dyn CaptionProvider>)
            .ok_or_else(|| CuratorError::config("CURATOR_CAPTION_URL is not set")),
        #[cfg(not(feature = "http"))]
        Captioner::Http => Err(CuratorError::config("built without the `http` feature")),
    }
}

fn run_config(out: &Path, command: &str, args: serde_json::Value, plan: Option<&StepPlan>) -> Result<()> {
    io::write_json(
        &out.join("run_config.json"),
        &json!({
            "command": command,
            "version": env!("CARGO_PKG_VERSION"),
            "args": args,
            "plan": plan,
        }),
    )
}

fn load_plan(path: &Path, seed: Option<u64>) -> Result<StepPlan> {
    let mut plan = StepPlan::load(path)?;
    if let Some(s) = seed {
        plan.seed = s;
    }
    Ok(plan)
}

fn report_for(plan: &StepPlan, command: &str) -> StepReport {
    let mut r = StepReport::new(plan.step, Some(plan.name.clone()));
    r.config.insert(command.to_string(), json!(plan));
    r
}

fn run(cmd: Command) -> Result<()> {
    let started = Instant::now();
    let out = match &cmd {
        Command::TrainDisc {
            common,
            manifest,
            web,
            holdout_manifest,
            holdout_web,
            epochs,
            learning_rate,
            batch_size,
            target_accuracy,
        } => {
            let settings = DiscSettings {
                epochs: *epochs,
                learning_rate: *learning_rate,
                batch_size: *batch_size,
                target_accuracy: *target_accuracy,
                seed: common.seed.unwrap_or(0),
                ..DiscSettings::default()
            };
            let ds = Manifest::load(manifest)?;
            let wb = Manifest::load(web)?;
            let holdout = match (holdout_manifest, holdout_web) {
                (Some(a), Some(b)) => Some((Manifest::load(a)?, Manifest::load(b)?)),
                _ => None,
            };
            let (ckpt, section) =
                pipeline::train_discriminator(&ds, &wb, holdout.as_ref().map(|(a, b)| (a, b)), &settings)?;
            ckpt.save(&common.out.join("discriminator.bin"))?;
            let mut r = StepReport::new(0, None);
            r.config.insert("train-disc".into(), json!(settings));
            log::info!(
                "training accuracy {:.3} after {} epochs",
                section.epoch_accuracy.last().copied().unwrap_or(section.initial_accuracy),
                section.epoch_accuracy.len()
            );
            r.discriminator = Some(section);
            io::write_json(&common.out.join("report.json"), &r)?;
            run_config(
                &common.out,
                "train-disc",
                json!({"manifest": manifest, "web": web, "holdout_manifest": holdout_manifest,
                       "holdout_web": holdout_web, "settings": settings}),
                None,
            )?;
            common.out.clone()
        }
        Command::BuildMemory {
            common,
            manifest,
            captioner,
        } => {
            let m = Manifest::load(manifest)?;
            let p = provider(*captioner, &[&m])?;
            let memory = build_caption_memory(&m, p.as_ref())?;
            memory.save(&common.out.join("caption_memory.jsonl"))?;
            log::info!("{} captions stored", memory.len());
            run_config(&common.out, "build-memory", json!({"manifest": manifest}), None)?;
            common.out.clone()
        }
        Command::Acquire {
            common,
            plan,
            manifest,
            model,
            lexicon,
            captioner,
            allow_empty,
        } => {
            let mut plan = load_plan(plan, common.seed)?;
            plan.allow_empty |= *allow_empty;
            let gate = Checkpoint::load(model)?;
            let lex = io::load_lexicon(lexicon.as_deref())?;
            let web = Manifest::load(manifest)?;
            let p = provider(*captioner, &[&web])?;
            let backend = MockBackend::new(web);
            let acq = pipeline::acquire(&plan, &gate, &lex, p.as_ref(), &backend)?;
            io::write_jsonl(&common.out.join("acquired.jsonl"), &acq.records)?;
            let mut r = report_for(&plan, "acquire");
            r.acquisition = Some(acq.section);
            io::write_json(&common.out.join("report.json"), &r)?;
            run_config(
                &common.out,
                "acquire",
                json!({"manifest": manifest, "model": model, "lexicon": lexicon}),
                Some(&plan),
            )?;
            common.out.clone()
        }
        Command::Rehearse {
            common,
            plan,
            manifest,
            memory,
            wordnet,
            stopwords,
            captioner,
        } => {
            let plan = load_plan(plan, common.seed)?;
            let graph = io::load_wordnet(wordnet.as_deref(), stopwords.as_deref())?;
            let mem = CaptionMemory::load(memory)?;
            let web = Manifest::load(manifest)?;
            let p = provider(*captioner, &[&web])?;
            let backend = MockBackend::new(web);
            let reh = pipeline::rehearse(&plan, &mem, &backend, p.as_ref(), &graph)?;
            io::write_jsonl(&common.out.join("rehearsal.jsonl"), &reh.records)?;
            let mut r = report_for(&plan, "rehearse");
            r.rehearsal = Some(reh.section);
            io::write_json(&common.out.join("report.json"), &r)?;
            run_config(
                &common.out,
                "rehearse",
                json!({"manifest": manifest, "memory": memory, "wordnet": wordnet, "stopwords": stopwords}),
                Some(&plan),
            )?;
            common.out.clone()
        }
        Command::ToyStep {
            common,
            plan,
            manifest,
            rehearsal,
            epochs,
        } => {
            let plan = load_plan(plan, common.seed)?;
            let ctx = plan.context()?;
            let train = pipeline::load_toy_samples(manifest, &ctx)?;
            let reh = match rehearsal {
                Some(p) => pipeline::load_toy_samples(p, &ctx)?,
                None => Vec::new(),
            };
            let run = pipeline::toy_step(&plan, &train, &reh, *epochs, plan.seed)?;
            io::write_json(
                &common.out.join("toy_model.json"),
                &json!({"classes": run.model.classes(), "params": run.model.params()}),
            )?;
            let mut r = report_for(&plan, "toy-step");
            r.toy = Some(run.section);
            io::write_json(&common.out.join("report.json"), &r)?;
            run_config(
                &common.out,
                "toy-step",
                json!({"manifest": manifest, "rehearsal": rehearsal, "epochs": epochs}),
                Some(&plan),
            )?;
            common.out.clone()
        }
        Command::AblateFilter {
            common,
            manifest,
            thresholds,
            nouns,
            wordnet,
            stopwords,
        } => {
            let graph = io::load_wordnet(wordnet.as_deref(), stopwords.as_deref())?;
            let pairs = pipeline::parse_caption_pairs(&io::read_text(manifest)?, manifest)?;
            let section = pipeline::ablate_filter(&pairs, &graph, thresholds, nouns)?;
            let mut r = StepReport::new(0, None);
            let nouns: Vec<String> = nouns.iter().map(|n| n.to_string()).collect();
            let args = json!({"manifest": manifest, "thresholds": thresholds, "nouns": nouns});
            r.config.insert("ablate-filter".into(), args.clone());
            r.ablation = Some(section);
            io::write_json(&common.out.join("report.json"), &r)?;
            print!("{}", report::render_text(&report::merge(vec![r])));
            run_config(&common.out, "ablate-filter", args, None)?;
            common.out.clone()
        }
        Command::Report { out, reports, svg } => {
            let loaded = reports.iter().map(|p| io::read_json(p)).collect::<Result<Vec<StepReport>>>()?;
            let summary = report::merge(loaded);
            let text = report::render_text(&summary);
            io::write_json(&out.join("summary.json"), &summary)?;
            io::write_text(&out.join("summary.txt"), &text)?;
            if *svg {
                match report::render_svg(&summary) {
                    Some(s) => io::write_text(&out.join("loss.svg"), &s)?,
                    None => log::warn!("no toy loss curves to plot"),
                }
            }
            print!("{text}");
            run_config(out, "report", json!({"reports": reports, "svg": svg}), None)?;
            out.clone()
        }
        Command::Fixture { out } => {
            let n = fixture::write_fixture(out)?;
            log::info!("wrote {n} fixture files");
            return Ok(());
        }
    };
    io::write_json(
        &out.join("timing.json"),
        &json!({"wall_seconds": started.elapsed().as_secs_f64()}),
    )
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
