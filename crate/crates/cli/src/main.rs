//! `collinlab` command-line front end.
//!
//! Exit status: 0 clean, 1 operational error, 2 collinearity or
//! instability alarm.

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use collinlab::augmentation::{required_replication, verify_identities, CoefficientSet};
use collinlab::diagnostics::{diagnose, CnScaling, Thresholds};
use collinlab::io::{load_csv, york_analysis, CsvSchema, YorkParams};
use collinlab::perturbation::{monte_carlo_stability, NoiseKind, PerturbationConfig};
use collinlab::regression::{fit_ols, Dataset, SignificanceConfig};
use collinlab::replicate_sample;
use collinlab::report::{
    export_report, AugmentationSection, DiagnosticsSection, FitSection, Format, Header, PerturbationSection, Report,
};

#[derive(Parser, Debug)]
#[command(
    name = "collinlab",
    version,
    about = "Collinearity diagnostics, replication and perturbation experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit OLS and report VIF, condition number and correlation determinant
    Diagnose(DiagnoseArgs),
    /// Replicate the sample h times: predicted vs re-fitted statistics
    Augment(AugmentArgs),
    /// Monte-Carlo perturbation of the regressors
    Perturb(PerturbArgs),
    /// Eigenvalues and condition number of the York design
    York(YorkArgs),
    /// Diagnose, augment and perturb in one report
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct InputArgs {
    /// CSV file with a header row
    input: PathBuf,
    /// Response column
    #[arg(long)]
    y: String,
    /// Regressor columns, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    x: Vec<String>,
    /// Do not add an intercept column
    #[arg(long)]
    no_intercept: bool,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DiagnosticArgs {
    #[arg(long, value_enum, default_value_t = Scaling::Unit)]
    cn_scaling: Scaling,
    /// Condition number at which collinearity counts as moderate
    #[arg(long, default_value_t = 20.0)]
    cn_moderate: f64,
    /// Condition number above which collinearity counts as strong
    #[arg(long, default_value_t = 30.0)]
    cn_strong: f64,
    /// VIF at which a regressor is flagged as problematic
    #[arg(long, default_value_t = 10.0)]
    vif_max: f64,
    /// VIF at which a regressor is flagged as elevated
    #[arg(long, default_value_t = 4.0)]
    vif_elevated: f64,
}

#[derive(Args, Debug)]
struct ReplicationArgs {
    /// Total number of stacked copies of the sample
    #[arg(long, conflicts_with = "auto")]
    h: Option<usize>,
    /// Use the smallest h that makes every slope significant at this level
    #[arg(long, value_name = "ALPHA", num_args = 0..=1, default_missing_value = "0.05")]
    auto: Option<f64>,
    /// Significance level for the replication bound
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Count the intercept when computing the required replication
    #[arg(long)]
    include_intercept: bool,
}

#[derive(Args, Debug)]
struct MonteCarloArgs {
    /// Relative size of each column perturbation (0.01 = 1%)
    #[arg(long, default_value_t = 0.01)]
    pct: f64,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, env = "COLLINLAB_SEED", default_value_t = 0)]
    seed: u64,
    /// Mean coefficient shift (percent) above which the run is an alarm
    #[arg(long, value_name = "PCT", default_value_t = 10.0)]
    threshold: f64,
    #[arg(long, value_enum, default_value_t = Noise::Normal)]
    noise: Noise,
    /// Perturb the intercept column too
    #[arg(long)]
    perturb_intercept: bool,
    /// Run trials on one thread
    #[arg(long)]
    sequential: bool,
}

#[derive(Args, Debug)]
struct DiagnoseArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    diag: DiagnosticArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct AugmentArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    rep: ReplicationArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct PerturbArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Replicate the sample this many times before perturbing
    #[arg(long, default_value_t = 1)]
    h: usize,
    #[command(flatten)]
    mc: MonteCarloArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct YorkArgs {
    /// Block multiplier; the design has 100·m rows
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct ReportArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    diag: DiagnosticArgs,
    #[command(flatten)]
    rep: ReplicationArgs,
    #[command(flatten)]
    mc: MonteCarloArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutputFormat {
    Json,
    Markdown,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Scaling {
    Unit,
    Raw,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Noise {
    Normal,
    Uniform,
    UnitUniform,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Json => Format::Json,
            OutputFormat::Markdown => Format::Markdown,
        }
    }
}

impl From<Scaling> for CnScaling {
    fn from(s: Scaling) -> Self {
        match s {
            Scaling::Unit => CnScaling::UnitLength,
            Scaling::Raw => CnScaling::Raw,
        }
    }
}

impl From<Noise> for NoiseKind {
    fn from(n: Noise) -> Self {
        match n {
            Noise::Normal => NoiseKind::Normal,
            Noise::Uniform => NoiseKind::Uniform,
            Noise::UnitUniform => NoiseKind::UnitUniform,
        }
    }
}

/// A failure tagged with the pipeline stage that produced it.
#[derive(Debug)]
struct Failure {
    stage: &'static str,
    message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.stage, self.message)
    }
}

trait Stage<T> {
    fn stage(self, stage: &'static str) -> Result<T, Failure>;
}

impl<T, E: fmt::Display> Stage<T> for Result<T, E> {
    fn stage(self, stage: &'static str) -> Result<T, Failure> {
        self.map_err(|e| Failure {
            stage,
            message: e.to_string(),
        })
    }
}

fn invalid(stage: &'static str, message: impl Into<String>) -> Failure {
    Failure {
        stage,
        message: message.into(),
    }
}

enum Outcome {
    Clean,
    Alarm,
}

impl InputArgs {
    fn load(&self) -> Result<Dataset, Failure> {
        let mut schema = CsvSchema::new(self.y.clone(), self.x.clone()).stage("arguments")?;
        if self.no_intercept {
            schema = schema.without_intercept();
        }
        load_csv(&self.input, &schema).stage("load_csv")
    }

    fn echo(&self, h: Header) -> Header {
        h.option("input", self.input.display().to_string())
            .option("y", self.y.clone())
            .option("x", self.x.clone())
            .option("intercept", !self.no_intercept)
    }
}

impl DiagnosticArgs {
    fn thresholds(&self) -> Result<Thresholds, Failure> {
        let ok = self.cn_moderate >= 1.0
            && self.cn_strong >= self.cn_moderate
            && self.vif_elevated >= 1.0
            && self.vif_max >= self.vif_elevated;
        if !ok {
            return Err(invalid(
                "arguments",
                "thresholds must satisfy 1 <= cn-moderate <= cn-strong and 1 <= vif-elevated <= vif-max",
            ));
        }
        Ok(Thresholds {
            cn_moderate: self.cn_moderate,
            cn_strong: self.cn_strong,
            vif_problematic: self.vif_max,
            vif_elevated: self.vif_elevated,
        })
    }

    fn echo(&self, h: Header) -> Header {
        h.option("cn_scaling", CnScaling::from(self.cn_scaling).as_str())
            .option("cn_moderate", self.cn_moderate)
            .option("cn_strong", self.cn_strong)
            .option("vif_max", self.vif_max)
            .option("vif_elevated", self.vif_elevated)
    }
}

impl ReplicationArgs {
    fn alpha(&self) -> f64 {
        self.auto.unwrap_or(self.alpha)
    }

    fn validate(&self) -> Result<(), Failure> {
        let a = self.alpha();
        if !(a > 0.0 && a < 1.0) {
            return Err(invalid(
                "arguments",
                format!("significance level must be in (0, 1), got {a}"),
            ));
        }
        if self.h == Some(0) {
            return Err(invalid("arguments", "--h must be at least 1"));
        }
        Ok(())
    }

    fn set(&self) -> CoefficientSet {
        if self.include_intercept {
            CoefficientSet::All
        } else {
            CoefficientSet::Slopes
        }
    }

    fn echo(&self, h: Header) -> Header {
        let h = match (self.h, self.auto) {
            (Some(n), _) => h.option("h", n),
            (None, Some(_)) => h.option("auto", true),
            (None, None) => h,
        };
        h.option("alpha", self.alpha())
            .option("include_intercept", self.include_intercept)
    }
}

impl MonteCarloArgs {
    fn config(&self) -> Result<PerturbationConfig, Failure> {
        let cfg = PerturbationConfig {
            pct: self.pct,
            trials: self.trials,
            seed: self.seed,
            perturb_intercept: self.perturb_intercept,
            noise: self.noise.into(),
            parallel: !self.sequential,
        };
        cfg.validate().stage("arguments")?;
        if !(self.threshold.is_finite() && self.threshold >= 0.0) {
            return Err(invalid("arguments", "--threshold must be a non-negative percentage"));
        }
        Ok(cfg)
    }

    fn echo(&self, h: Header) -> Header {
        h.option("pct", self.pct)
            .option("trials", self.trials)
            .option("seed", self.seed)
            .option("threshold", self.threshold)
            .option("noise", NoiseKind::from(self.noise).as_str())
            .option("perturb_intercept", self.perturb_intercept)
    }
}

impl OutputArgs {
    fn echo(&self, h: Header) -> Header {
        h.option(
            "format",
            match self.format {
                OutputFormat::Json => "json",
                OutputFormat::Markdown => "markdown",
            },
        )
    }

    fn emit(&self, report: &Report) -> Result<(), Failure> {
        let bytes = export_report(report, self.format.into());
        match &self.out {
            Some(path) => std::fs::write(path, bytes).stage("write_output"),
            None => {
                use std::io::Write;
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(&bytes)
                    .and_then(|_| stdout.flush())
                    .stage("write_output")
            }
        }
    }
}

fn add_diagnostics(
    report: &mut Report,
    data: &Dataset,
    args: &DiagnosticArgs,
    sig: &SignificanceConfig,
) -> Result<bool, Failure> {
    let th = args.thresholds()?;
    let fit = fit_ols(data).stage("fit_ols")?;
    let diag = diagnose(data, &fit, args.cn_scaling.into(), &th).stage("diagnose")?;
    report.fit = Some(FitSection::from_fit(&fit, sig));
    report.diagnostics = Some(DiagnosticsSection::from(&diag));
    Ok(diag.verdict.is_alarming())
}

fn add_augmentation(
    report: &mut Report,
    data: &Dataset,
    args: &ReplicationArgs,
    sig: &SignificanceConfig,
) -> Result<(), Failure> {
    args.validate()?;
    let fit = fit_ols(data).stage("fit_ols")?;
    let plan = if fit.k > 1 || args.include_intercept {
        Some(required_replication(&fit, args.alpha(), args.set()).stage("required_replication")?)
    } else {
        None
    };
    let h = match (args.h, args.auto, &plan) {
        (Some(h), _, _) => h,
        (None, Some(_), Some(p)) => p.h_required,
        (None, Some(_), None) => return Err(invalid("required_replication", "model has no slope coefficients")),
        (None, None, _) => return Err(invalid("arguments", "augment needs --h N or --auto [ALPHA]")),
    };
    let check = verify_identities(data, h).stage("verify_identities")?;
    report.fit = Some(FitSection::from_fit(&check.base, sig));
    report.augmentation = Some(AugmentationSection::new(&check, plan.as_ref(), sig));
    Ok(())
}

fn add_perturbation(report: &mut Report, data: &Dataset, h: usize, args: &MonteCarloArgs) -> Result<bool, Failure> {
    let cfg = args.config()?;
    if h == 0 {
        return Err(invalid("arguments", "--h must be at least 1"));
    }
    let data = replicate_sample(data, h).stage("replicate_sample")?;
    let summary = monte_carlo_stability(&data, &cfg).stage("monte_carlo_stability")?;
    report.perturbation = Some(PerturbationSection::new(&summary, h));
    Ok(summary.mean > args.threshold)
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    let sig = SignificanceConfig::default();
    let alarm = |a: bool| if a { Outcome::Alarm } else { Outcome::Clean };
    match cli.command {
        Command::Diagnose(a) => {
            let header = a.output.echo(a.diag.echo(a.input.echo(Header::new("diagnose"))));
            let data = a.input.load()?;
            let mut report = Report::new(header);
            let flagged = add_diagnostics(&mut report, &data, &a.diag, &sig)?;
            a.output.emit(&report)?;
            Ok(alarm(flagged))
        }
        Command::Augment(a) => {
            let header = a.output.echo(a.rep.echo(a.input.echo(Header::new("augment"))));
            a.rep.validate()?;
            let data = a.input.load()?;
            let mut report = Report::new(header);
            add_augmentation(&mut report, &data, &a.rep, &sig)?;
            a.output.emit(&report)?;
            Ok(Outcome::Clean)
        }
        Command::Perturb(a) => {
            let header = a
                .output
                .echo(a.mc.echo(a.input.echo(Header::new("perturb")).option("h", a.h)));
            a.mc.config()?;
            let data = a.input.load()?;
            let mut report = Report::new(header);
            let unstable = add_perturbation(&mut report, &data, a.h, &a.mc)?;
            a.output.emit(&report)?;
            Ok(alarm(unstable))
        }
        Command::York(a) => {
            let header = a.output.echo(Header::new("york").option("m", a.m));
            let params = YorkParams::new(a.m).stage("arguments")?;
            let mut report = Report::new(header);
            report.york = Some(york_analysis(params).stage("york_analysis")?);
            a.output.emit(&report)?;
            Ok(Outcome::Clean)
        }
        Command::Report(a) => {
            let header = a
                .output
                .echo(a.mc.echo(a.rep.echo(a.diag.echo(a.input.echo(Header::new("report"))))));
            a.rep.validate()?;
            a.mc.config()?;
            let data = a.input.load()?;
            let mut report = Report::new(header);
            let flagged = add_diagnostics(&mut report, &data, &a.diag, &sig)?;
            let h = if a.rep.h.is_some() || a.rep.auto.is_some() {
                add_augmentation(&mut report, &data, &a.rep, &sig)?;
                report.augmentation.as_ref().map_or(1, |s| s.h)
            } else {
                1
            };
            let unstable = add_perturbation(&mut report, &data, h, &a.mc)?;
            a.output.emit(&report)?;
            Ok(alarm(flagged || unstable))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::Alarm) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
