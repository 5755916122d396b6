mod sim_cmd;
mod store;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use clothbench_core::cloth::{
    ClothObject, ClothSet, ColorLabel, ConstructionTechnique, Dimension, MaterialLabel, ReferenceLine, ShapeCategory,
};
use clothbench_core::eval::{self, SampleResults};
use clothbench_core::mask::{self, Polarity, SegmentationConfig};
use clothbench_core::measure::{
    self, Calibration, ElasticityInputs, FlatReference, FrictionInputs, MeasurementRecord, PlateSpec, RawInputs,
};
use clothbench_core::radar::{self, AxisValue, RenderOptions};

/// Error that maps to exit code 2.
#[derive(Debug)]
pub struct Usage(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

#[derive(Parser)]
#[command(name = "clothbench", version, about = "Measure, compare and simulate cloth properties")]
struct Cli {
    /// Registry file.
    #[arg(long, global = true, env = "CLOTHBENCH_REGISTRY", default_value = "clothbench.json")]
    registry: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cloth objects.
    #[command(subcommand)]
    Object(ObjectCmd),
    /// Named collections of objects.
    #[command(subcommand)]
    Set(SetCmd),
    /// Run a measurement protocol and record the result.
    #[command(subcommand)]
    Measure(MeasureCmd),
    /// Set variability profiles.
    #[command(subcommand)]
    Radar(RadarCmd),
    /// Manipulation outcome metrics.
    #[command(subcommand)]
    Eval(EvalCmd),
    /// Simulated experiments.
    #[command(subcommand)]
    Sim(SimCmd),
}

#[derive(Subcommand)]
enum ObjectCmd {
    /// Register a new object.
    Add(ObjectArgs),
    /// One line per object.
    List,
    /// Full JSON record.
    Show { id: String },
}

#[derive(Args)]
struct ObjectArgs {
    #[arg(long)]
    id: String,
    #[arg(long)]
    name: Option<String>,
    #[arg(long, default_value = "rectangular")]
    shape: ShapeCategory,
    /// Size along a reference line, e.g. `L1=300` (mm). Repeatable.
    #[arg(long = "dim", value_parser = parse_dim, required = true)]
    dims: Vec<Dimension>,
    /// Grams.
    #[arg(long)]
    weight: f64,
    #[arg(long = "color", value_delimiter = ',', required = true)]
    colors: Vec<ColorLabel>,
    #[arg(long = "material", value_delimiter = ',')]
    materials: Vec<MaterialLabel>,
    #[arg(long, default_value = "woven")]
    construction: ConstructionTechnique,
    #[arg(long)]
    print: bool,
}

fn parse_dim(s: &str) -> Result<Dimension, String> {
    let (line, len) = s.split_once('=').ok_or("expected LINE=MM")?;
    Ok(Dimension {
        line: line.parse().map_err(|e| format!("{e}"))?,
        length: len.trim().parse().map_err(|_| format!("bad length {len:?}"))?,
    })
}

#[derive(Subcommand)]
enum SetCmd {
    /// New set, optionally with members.
    Create {
        id: String,
        #[arg(long)]
        name: Option<String>,
        #[arg(long, default_value = "")]
        source: String,
        #[arg(long = "member", value_delimiter = ',')]
        members: Vec<String>,
    },
    /// Add an existing object to a set.
    AddMember {
        set: String,
        object: String,
    },
    /// Id, name and members per set.
    List,
}

#[derive(Args)]
struct RecordArgs {
    /// Object the value belongs to.
    #[arg(long)]
    object: Option<String>,
    /// Free-text protocol note.
    #[arg(long)]
    note: Option<String>,
}

#[derive(Subcommand)]
enum MeasureCmd {
    /// Drape test from top-view images.
    Stiffness {
        #[arg(long)]
        flat: PathBuf,
        #[arg(long)]
        draped: PathBuf,
        #[arg(long = "plate-diameter")]
        plate_diameter: f64,
        #[arg(long, conflicts_with = "plate_mask")]
        scale: Option<f64>,
        #[arg(long = "plate-mask")]
        plate_mask: Option<PathBuf>,
        #[arg(long, default_value_t = 128)]
        threshold: u8,
        /// Cloth is brighter than the background.
        #[arg(long = "cloth-brighter")]
        cloth_brighter: bool,
        #[arg(long = "close", default_value_t = 0)]
        closing_radius: u32,
        #[command(flatten)]
        record: RecordArgs,
    },
    /// Elongation under load along one reference line.
    Elasticity {
        #[arg(long)]
        line: ReferenceLine,
        /// Rest length, mm.
        #[arg(long)]
        li: f64,
        /// Loaded length, mm.
        #[arg(long)]
        lf: f64,
        /// Load, g.
        #[arg(long, default_value_t = measure::STANDARD_LOAD_G)]
        load: f64,
        #[command(flatten)]
        record: RecordArgs,
    },
    /// Incline test: lift height at slide onset over surface length.
    Friction {
        #[arg(long)]
        height: f64,
        #[arg(long)]
        length: f64,
        #[arg(long, default_value = measure::STANDARD_SURFACE)]
        surface: String,
        #[command(flatten)]
        record: RecordArgs,
    },
}

#[derive(Subcommand)]
enum RadarCmd {
    /// Per-axis ranges of one set.
    Profile {
        set: String,
    },
    /// Radar chart and comparison table for several sets.
    Compare {
        #[arg(required = true, num_args = 2..)]
        sets: Vec<String>,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        title: Option<String>,
    },
}

#[derive(Subcommand)]
enum EvalCmd {
    /// Area retention between two masks.
    Fr {
        #[arg(long)]
        before: PathBuf,
        #[arg(long)]
        after: PathBuf,
    },
    /// Fold quality from the folded mask and the uncovered bottom half.
    Fold {
        #[arg(long)]
        after: PathBuf,
        #[arg(long)]
        uncovered: PathBuf,
    },
    /// Mean and population deviation of repeated runs.
    Aggregate {
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', conflicts_with = "runs")]
        values: Vec<f64>,
        /// CSV with a `sample,primitive,fr` header.
        #[arg(long)]
        runs: Option<PathBuf>,
        /// Rank samples per primitive, using registry properties.
        #[arg(long, requires = "runs")]
        trend: bool,
        #[arg(long, requires = "trend")]
        csv: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SimArgs {
    /// TOML scenario file.
    #[arg(long)]
    config: PathBuf,
    /// Write particle positions as CSV.
    #[arg(long)]
    trajectory: Option<PathBuf>,
    /// Steps between trajectory frames.
    #[arg(long, default_value_t = 1000)]
    every: u64,
}

#[derive(Subcommand)]
enum SimCmd {
    /// Drape test on a plate.
    Drape(SimArgs),
    /// Incline test: tilt step by step until the cloth slides.
    Incline(SimArgs),
    /// Tensile pull under a fixed load.
    Pull(SimArgs),
    /// One manipulation primitive.
    Primitive {
        #[command(flatten)]
        args: SimArgs,
        /// Default-parameter primitive, overriding the file.
        #[arg(long)]
        primitive: Option<String>,
    },
    /// Run a scenario over a list of parameter values.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let reg = cli.registry.as_path();
    match cli.command {
        Command::Object(c) => object(reg, c),
        Command::Set(c) => set(reg, c),
        Command::Measure(c) => measure(reg, c),
        Command::Radar(c) => radar(reg, c),
        Command::Eval(c) => evaluate(reg, c),
        Command::Sim(c) => simulate(c),
    }
}

fn object(reg: &Path, cmd: ObjectCmd) -> Result<()> {
    match cmd {
        ObjectCmd::Add(a) => {
            let obj = ClothObject {
                name: a.name.unwrap_or_else(|| a.id.clone()),
                id: a.id,
                shape: a.shape,
                dimensions: a.dims,
                weight: a.weight,
                colors: a.colors.into_iter().collect(),
                has_print: a.print,
                materials: a.materials.into_iter().collect(),
                construction: a.construction,
                mechanical: None,
            };
            let id = obj.id.clone();
            store::update(reg, |r| Ok(r.add_object(obj)?))?;
            println!("added {id}");
        }
        ObjectCmd::List => {
            for o in store::read(reg)?.objects.values() {
                println!("{}\t{}\t{:?}\t{} g", o.id, o.name, o.shape, o.weight);
            }
        }
        ObjectCmd::Show { id } => {
            println!("{}", serde_json::to_string_pretty(store::read(reg)?.object(&id)?)?);
        }
    }
    Ok(())
}

fn set(reg: &Path, cmd: SetCmd) -> Result<()> {
    match cmd {
        SetCmd::Create {
            id,
            name,
            source,
            members,
        } => {
            let set = ClothSet {
                name: name.unwrap_or_else(|| id.clone()),
                id: id.clone(),
                source,
                members,
            };
            store::update(reg, |r| Ok(r.create_set(set)?))?;
            println!("created {id}");
        }
        SetCmd::AddMember { set, object } => {
            store::update(reg, |r| Ok(r.add_member(&set, &object)?))?;
            println!("{set} += {object}");
        }
        SetCmd::List => {
            for s in store::read(reg)?.sets.values() {
                println!("{}\t{}\t{}", s.id, s.name, s.members.join(","));
            }
        }
    }
    Ok(())
}

fn save_record(reg: &Path, mut rec: MeasurementRecord, args: RecordArgs) -> Result<f64> {
    rec.object_id = args.object;
    rec.timestamp = Some(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
    if args.note.is_some() {
        rec.notes.text = args.note;
    }
    let value = rec.value;
    store::update(reg, |r| Ok(r.record(rec)?))?;
    Ok(value)
}

fn measure(reg: &Path, cmd: MeasureCmd) -> Result<()> {
    let rec = match cmd {
        MeasureCmd::Stiffness {
            flat,
            draped,
            plate_diameter,
            scale,
            plate_mask,
            threshold,
            cloth_brighter,
            closing_radius,
            record,
        } => {
            let seg = SegmentationConfig {
                threshold,
                polarity: if cloth_brighter {
                    Polarity::ClothBrighter
                } else {
                    Polarity::ClothDarker
                },
                closing_radius,
                ..SegmentationConfig::default()
            };
            let calibration = match (scale, plate_mask) {
                (Some(s), _) => Some(Calibration::Scale(s)),
                (None, Some(p)) => Some(Calibration::PlateMask(mask::load_mask(&p)?)),
                (None, None) => None,
            };
            let plate = PlateSpec {
                diameter: plate_diameter,
                coverage_ratio: measure::DEFAULT_COVERAGE_RATIO,
            };
            let flat = mask::load_image(&flat)?;
            let draped = mask::load_image(&draped)?;
            let rec = measure::stiffness_from_images(
                FlatReference::Image(&flat),
                &draped,
                &plate,
                &seg,
                calibration.as_ref(),
            )?;
            (rec, record)
        }
        MeasureCmd::Elasticity {
            line,
            li,
            lf,
            load,
            record,
        } => {
            let inputs = ElasticityInputs {
                line,
                rest_length: li,
                loaded_length: lf,
                load,
            };
            (MeasurementRecord::measure(RawInputs::Elasticity(inputs))?, record)
        }
        MeasureCmd::Friction {
            height,
            length,
            surface,
            record,
        } => {
            let mut rec = MeasurementRecord::measure(RawInputs::Friction(FrictionInputs { height, length }))?;
            rec.notes.surface = Some(surface);
            (rec, record)
        }
    };
    let value = save_record(reg, rec.0, rec.1)?;
    println!("{value:.6}");
    Ok(())
}

fn axis_text(v: &AxisValue) -> String {
    match v {
        AxisValue::Range { range, .. } => format!("{range:.2}"),
        AxisValue::Count { count } => count.to_string(),
        AxisValue::Missing => "NA".into(),
    }
}

fn radar(reg: &Path, cmd: RadarCmd) -> Result<()> {
    let r = store::read(reg)?;
    let profile = |id: &str| -> Result<radar::RadarProfile> { Ok(radar::radar_profile(r.set(id)?, &r.members(id)?)?) };
    match cmd {
        RadarCmd::Profile { set } => {
            let p = profile(&set)?;
            for e in &p.axes {
                println!("{}\t{}\t{}", e.axis, axis_text(&e.value), e.unit);
            }
            for w in &p.warnings {
                eprintln!("warning: {w}");
            }
        }
        RadarCmd::Compare { sets, svg, csv, title } => {
            let profiles = sets.iter().map(|s| profile(s)).collect::<Result<Vec<_>>>()?;
            let report = radar::compare_report(&profiles)?;
            print!("{report}");
            if let Some(path) = svg {
                let style = RenderOptions {
                    title,
                    ..RenderOptions::default()
                };
                let text = radar::render_radar(&profiles, &style)?;
                std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            }
            if let Some(path) = csv {
                std::fs::write(&path, report.to_csv()?).with_context(|| format!("writing {}", path.display()))?;
            }
        }
    }
    Ok(())
}

fn evaluate(reg: &Path, cmd: EvalCmd) -> Result<()> {
    match cmd {
        EvalCmd::Fr { before, after } => {
            let fr = eval::final_ratio(&mask::load_mask(&before)?, &mask::load_mask(&after)?)?;
            println!("{fr:.6}");
        }
        EvalCmd::Fold { after, uncovered } => {
            let fr = eval::fold_ratio(&mask::load_mask(&after)?, &mask::load_mask(&uncovered)?)?;
            println!("{fr:.6}");
        }
        EvalCmd::Aggregate {
            values,
            runs,
            trend,
            csv,
        } => match runs {
            None => {
                if values.is_empty() {
                    return Err(Usage("give --values or --runs".into()).into());
                }
                let (mean, sd) = eval::aggregate(&values)?;
                println!("{mean:.6} ± {sd:.6}");
            }
            Some(path) => {
                let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                let grouped = eval::parse_runs(&text)?;
                if !trend {
                    println!("sample,primitive,n,mean,stddev");
                    for (id, results) in &grouped {
                        for r in results {
                            let name = r.primitive.name().to_lowercase();
                            println!("{id},{name},{},{:.6},{:.6}", r.repetitions.len(), r.mean, r.stddev);
                        }
                    }
                    return Ok(());
                }
                let r = store::read(reg)?;
                let samples: Vec<SampleResults> = grouped
                    .into_iter()
                    .map(|(id, results)| SampleResults {
                        properties: r
                            .objects
                            .get(&id)
                            .and_then(|o| o.mechanical.clone())
                            .unwrap_or_default(),
                        id,
                        results,
                    })
                    .collect();
                let report = eval::trend_report(&samples)?;
                print!("{report}");
                if let Some(out) = csv {
                    std::fs::write(&out, report.to_csv()?).with_context(|| format!("writing {}", out.display()))?;
                }
            }
        },
    }
    Ok(())
}

fn simulate(cmd: SimCmd) -> Result<()> {
    let (args, kind, primitive) = match cmd {
        SimCmd::Drape(a) => (a, "drape", None),
        SimCmd::Incline(a) => (a, "incline", None),
        SimCmd::Pull(a) => (a, "pull", None),
        SimCmd::Primitive { args, primitive } => (args, "primitive", primitive),
        SimCmd::Sweep { config } => {
            let cfg = sim_cmd::load_config(&config, None, None)?;
            let field = cfg.sweep.as_ref().map_or("", |s| s.field.name());
            println!("field,value,scenario,result,steps");
            for (v, r) in sim_cmd::sweep(&cfg)? {
                println!("{field},{v},{},{:.6},{}", r.scenario, r.value, r.steps);
            }
            return Ok(());
        }
    };
    let cfg = sim_cmd::load_config(&args.config, Some(kind), primitive.as_deref())?;
    let result = sim_cmd::run(&cfg, args.trajectory.as_deref(), args.every)?;
    println!("{}\t{:.6}\t{} steps", result.scenario, result.value, result.steps);
    Ok(())
}
