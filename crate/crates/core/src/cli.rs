//! The `ia3` command line.
//!
//! Every subcommand writes one artifact (stdout or `--out`). JSON and CSV
//! artifacts carry the tool version, antenna counts, extension factor, seed
//! and tolerances, and are byte-identical for identical flags.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::alignment::{
    reverse_link, synth_mixed, synth_nullspace_intersection, synth_zero_forcing, ChainInstance,
    PrecoderDoc, PrecoderSet, Regime, SchemePlan,
};
use crate::certify::{
    build_decoders, certify, estimate_dof_slope, matched_decoders, DecoderSet, DofCertificate,
    RateCurve,
};
use crate::channel::{ChannelDoc, ChannelSet, FieldMode, NoiseModel};
use crate::dofcalc::{
    achievable, chain_nullity, fig1_ratio_grid, min_feasible_l, sweep_fig1, sweep_fig2,
    write_fig1_csv, write_fig2_csv, BoundsReport, Rational,
};
use crate::error::{invalid, Error, Result};
use crate::matkit::Tolerance;

pub const TOOL: &str = "ia3";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Gen,
    Synth,
    Certify,
    Bounds,
    SweepFig1,
    SweepFig2,
    Slope,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Inclusive `lo:hi` range; a bare value means `lo = hi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Span<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: FromStr + Copy + PartialOrd> FromStr for Span<T> {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parse = |x: &str| {
            x.trim()
                .parse::<T>()
                .map_err(|_| format!("cannot parse '{x}'"))
        };
        let (lo, hi) = match s.split_once(':') {
            Some((a, b)) => (parse(a)?, parse(b)?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(format!("empty range '{s}'"));
        }
        Ok(Span { lo, hi })
    }
}

impl<T: std::fmt::Display + PartialEq> std::fmt::Display for Span<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.lo == self.hi {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}:{}", self.lo, self.hi)
        }
    }
}

/// Parsed invocation.
#[derive(Clone, Debug, Parser)]
#[command(
    name = "ia3",
    version,
    about = "Interference alignment for the 3-user MIMO interference channel"
)]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Transmit antennas; `lo:hi` for sweep-fig2.
    #[arg(long)]
    pub m: Option<Span<usize>>,
    /// Receive antennas.
    #[arg(long)]
    pub n: Option<usize>,
    /// Chain depth; `lo:hi` lists depths for sweep-fig1.
    #[arg(long)]
    pub l: Option<Span<usize>>,
    #[arg(long)]
    pub dtilde: Option<usize>,
    /// Symbol-extension factor.
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long, default_value_t = crate::dofcalc::DEFAULT_T_MAX)]
    pub t_max: usize,
    #[arg(long, env = "IA3_SEED", default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub tol_rank: Option<f64>,
    #[arg(long, default_value_t = 1e-8)]
    pub tol_leak: f64,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FieldArg::Complex)]
    pub field: FieldArg,
    /// Channel JSON (a `gen` artifact or a `synth` bundle).
    #[arg(long)]
    pub channel: Option<PathBuf>,
    /// Precoder JSON (a `synth` bundle).
    #[arg(long)]
    pub precoders: Option<PathBuf>,
    /// SNR grid in dB for `slope`.
    #[arg(long, default_value = "0:60")]
    pub snr: Span<f64>,
    #[arg(long, default_value_t = 2.0)]
    pub snr_step: f64,
    #[arg(long, default_value_t = 20.0)]
    pub fit_span: f64,
    /// Grid steps per unit ratio for sweep-fig1.
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FieldArg {
    Real,
    Complex,
}

impl From<FieldArg> for FieldMode {
    fn from(f: FieldArg) -> Self {
        match f {
            FieldArg::Real => FieldMode::Real,
            FieldArg::Complex => FieldMode::Complex,
        }
    }
}

#[derive(Serialize)]
struct Meta {
    tool: &'static str,
    version: &'static str,
    command: Command,
    m: Option<usize>,
    n: Option<usize>,
    t: Option<usize>,
    seed: u64,
    tolerances: Tolerance,
}

/// Exit status of a finished run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    CertificationFailed,
}

pub fn exit_code(result: &Result<Status>) -> i32 {
    match result {
        Ok(Status::Ok) => 0,
        Ok(Status::CertificationFailed) => 4,
        Err(Error::InvalidInput(_)) => 2,
        Err(Error::Regime(_) | Error::Infeasible(_)) => 3,
        Err(Error::NotCertifiable(_)) => 4,
        Err(Error::Json(_) | Error::Csv(_) | Error::Io(_)) => 1,
    }
}

/// Parses `args`, runs, and returns the process exit code. Errors go to stderr.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = run(&cfg);
    if let Err(e) = &result {
        eprintln!("ia3: {e}");
    } else if result.as_ref().ok() == Some(&Status::CertificationFailed) {
        eprintln!("ia3: certification failed");
    }
    exit_code(&result)
}

impl RunConfig {
    fn tolerance(&self) -> Result<Tolerance> {
        Tolerance::new(self.tol_rank, self.tol_leak)
    }

    fn single_m(&self) -> Result<usize> {
        match self.m {
            Some(s) if s.lo == s.hi => Ok(s.lo),
            Some(s) => invalid(format!("--m {s}: a single value is required")),
            None => invalid("--m is required"),
        }
    }

    fn need_n(&self) -> Result<usize> {
        self.n
            .ok_or_else(|| Error::InvalidInput("--n is required".into()))
    }

    fn meta(&self, m: Option<usize>, n: Option<usize>, t: Option<usize>) -> Result<Meta> {
        Ok(Meta {
            tool: TOOL,
            version: VERSION,
            command: self.command,
            m,
            n,
            t,
            seed: self.seed,
            tolerances: self.tolerance()?,
        })
    }

    fn csv_comment(&self, meta: &Meta) -> String {
        let rank = meta
            .tolerances
            .rel_rank_tol
            .map_or("default".to_string(), |r| r.to_string());
        let mut s = format!("# tool={} version={}", meta.tool, meta.version);
        if let Some(m) = self.m {
            let _ = write!(s, " m={m}");
        }
        if let Some(n) = meta.n {
            let _ = write!(s, " n={n}");
        }
        if let Some(t) = meta.t {
            let _ = write!(s, " t={t}");
        }
        let _ = write!(
            s,
            " t_max={} seed={} rel_rank_tol={rank} leakage_tol={}",
            self.t_max, meta.seed, meta.tolerances.leakage_tol
        );
        s.push('\n');
        s
    }
}

fn emit(cfg: &RunConfig, body: &str) -> Result<()> {
    match &cfg.out {
        Some(path) => fs::write(path, body)?,
        None => std::io::stdout().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Executes one command.
pub fn run(cfg: &RunConfig) -> Result<Status> {
    if cfg.format == Some(Format::Csv)
        && matches!(
            cfg.command,
            Command::Gen | Command::Synth | Command::Certify
        )
    {
        return invalid("csv output is only available for bounds, sweeps and slope");
    }
    match cfg.command {
        Command::Gen => run_gen(cfg),
        Command::Synth => run_synth(cfg),
        Command::Certify => run_certify(cfg),
        Command::Bounds => run_bounds(cfg),
        Command::SweepFig1 => run_fig1(cfg),
        Command::SweepFig2 => run_fig2(cfg),
        Command::Slope => run_slope(cfg),
    }
}

fn run_gen(cfg: &RunConfig) -> Result<Status> {
    let (m, n) = (cfg.single_m()?, cfg.need_n()?);
    let mut ch = ChannelSet::generate(m, n, cfg.seed, cfg.field.into())?;
    if let Some(t) = cfg.t {
        ch = ch.extend(t)?;
    }
    let meta = cfg.meta(Some(m), Some(n), Some(ch.t()))?;
    let body = match cfg.format.unwrap_or(Format::Json) {
        Format::Text => format!(
            "channel M={m} N={n} t={} seed={} field={:?}\n",
            ch.t(),
            ch.seed(),
            ch.field_mode()
        ),
        _ => to_json(&serde_json::json!({ "meta": meta, "channel": ch.to_doc() }))?,
    };
    emit(cfg, &body)?;
    Ok(Status::Ok)
}

/// Output of the synthesis pipeline on the forward channel.
pub struct Synthesis {
    pub plan: SchemePlan,
    pub channel: ChannelSet,
    pub precoders: PrecoderSet,
    pub decoders: DecoderSet,
    pub certificate: DofCertificate,
}

fn forced_plan(cfg: &RunConfig, m: usize, n: usize) -> Result<SchemePlan> {
    // Design dimensions: the reverse link when M < N.
    let (dm, dn) = if m < n { (n, m) } else { (m, n) };
    let t = cfg.t.unwrap_or(1);
    if t == 0 {
        return invalid("--t must be >= 1");
    }
    let mut plan = if dm >= 3 * dn {
        SchemePlan::zero_forcing(dn, t)
    } else if dm >= 2 * dn {
        SchemePlan::nullspace_intersection(cfg.dtilde.unwrap_or(dm * t / 3), t)
    } else {
        let l = match cfg.l {
            Some(s) if s.lo == s.hi => s.lo,
            Some(s) => return invalid(format!("--l {s}: a single depth is required")),
            None => min_feasible_l(dm, dn)?,
        };
        let cap = t as i64 * chain_nullity(dm, dn, l).max(0);
        let dtilde = cfg
            .dtilde
            .unwrap_or_else(|| (cap as usize).min(dn * t / (2 * l + 1)));
        if dtilde == 0 {
            return Err(Error::Infeasible(format!(
                "no streams fit at M={dm}, N={dn}, L={l}, t={t}"
            )));
        }
        let plan = SchemePlan::chain(t, vec![ChainInstance { l, dtilde }]);
        plan.validate(dm, dn)
            .map_err(|e| Error::Infeasible(e.to_string()))?;
        plan
    };
    plan.reciprocal = m < n;
    Ok(plan)
}

/// Plans (or takes the forced plan), synthesizes and certifies.
pub fn synthesize(cfg: &RunConfig) -> Result<Synthesis> {
    let (m, n) = (cfg.single_m()?, cfg.need_n()?);
    let tol = cfg.tolerance()?;
    if m == n {
        return Err(Error::Regime(format!(
            "M = N = {m}: the reference value {} is reported by `bounds` but not constructed",
            Rational::new(3 * m as i64, 2)
        )));
    }
    let plan = if cfg.l.is_some() || cfg.dtilde.is_some() || cfg.t.is_some() {
        forced_plan(cfg, m, n)?
    } else {
        achievable(m, n, cfg.t_max)?
            .plan
            .ok_or_else(|| Error::Regime("no constructive plan".into()))?
    };
    let channel = ChannelSet::generate(m, n, cfg.seed, cfg.field.into())?.extend(plan.t)?;
    let design = if plan.reciprocal {
        channel.reciprocal()
    } else {
        channel.clone()
    };
    // Design-side decoders only matter when they become forward precoders.
    let design_decoders = |v: &PrecoderSet| -> Result<DecoderSet> {
        match build_decoders(&design, v, &tol) {
            Err(Error::NotCertifiable(_)) => matched_decoders(&design, v),
            other => other,
        }
    };
    let (v, u) = match plan.regime {
        Regime::ZeroForcing => {
            let v = synth_zero_forcing(&design, &tol)?;
            let u = design_decoders(&v)?;
            (v, u)
        }
        Regime::NullspaceIntersection => synth_nullspace_intersection(
            &design,
            plan.per_user_streams,
            cfg.seed.wrapping_add(1),
            &tol,
        )?,
        Regime::Chain | Regime::MixedChain => {
            let mut design_plan = plan.clone();
            design_plan.reciprocal = false;
            let v = synth_mixed(&design, &design_plan, &tol)?;
            let u = design_decoders(&v)?;
            (v, u)
        }
    };
    let (mut precoders, _) = if plan.reciprocal {
        reverse_link(&v, &u, &tol)
    } else {
        (v, u)
    };
    precoders.plan = Some(plan.clone());
    let certificate = certify(&channel, &precoders, &tol)?;
    let decoders = match build_decoders(&channel, &precoders, &tol) {
        Ok(u) => u,
        Err(Error::NotCertifiable(_)) => matched_decoders(&channel, &precoders)?,
        Err(e) => return Err(e),
    };
    Ok(Synthesis {
        plan,
        channel,
        precoders,
        decoders,
        certificate,
    })
}

fn verdict(cert: &DofCertificate) -> Status {
    if cert.pass {
        Status::Ok
    } else {
        Status::CertificationFailed
    }
}

fn run_synth(cfg: &RunConfig) -> Result<Status> {
    let s = synthesize(cfg)?;
    let meta = cfg.meta(
        Some(s.channel.m()),
        Some(s.channel.n()),
        Some(s.channel.t()),
    )?;
    let body = match cfg.format.unwrap_or(Format::Json) {
        Format::Text => s.certificate.to_table(),
        _ => to_json(&serde_json::json!({
            "meta": meta,
            "plan": s.plan,
            "channel": s.channel.to_doc(),
            "precoders": s.precoders.to_doc(),
            "certificate": s.certificate,
        }))?,
    };
    emit(cfg, &body)?;
    Ok(verdict(&s.certificate))
}

/// Reads a JSON file and returns `key` if the document is a bundle.
fn load_section(path: &Path, key: &str) -> Result<Value> {
    let text = fs::read_to_string(path)?;
    let mut v: Value = serde_json::from_str(&text)?;
    Ok(match v.get_mut(key) {
        Some(inner) => inner.take(),
        None => v,
    })
}

fn load_inputs(cfg: &RunConfig) -> Result<(ChannelSet, PrecoderSet)> {
    let (Some(cp), Some(pp)) = (&cfg.channel, &cfg.precoders) else {
        return invalid("--channel and --precoders are required");
    };
    let cdoc: ChannelDoc = serde_json::from_value(load_section(cp, "channel")?)?;
    let pdoc: PrecoderDoc = serde_json::from_value(load_section(pp, "precoders")?)?;
    Ok((ChannelSet::from_doc(&cdoc)?, PrecoderSet::from_doc(&pdoc)?))
}

fn run_certify(cfg: &RunConfig) -> Result<Status> {
    let (ch, v) = load_inputs(cfg)?;
    let cert = certify(&ch, &v, &cfg.tolerance()?)?;
    let meta = cfg.meta(Some(ch.m()), Some(ch.n()), Some(ch.t()))?;
    let body = match cfg.format.unwrap_or(Format::Json) {
        Format::Text => cert.to_table(),
        _ => to_json(&serde_json::json!({ "meta": meta, "certificate": cert }))?,
    };
    emit(cfg, &body)?;
    Ok(verdict(&cert))
}

fn bounds_text(r: &BoundsReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "M={} N={}", r.m, r.n);
    for (name, v) in [
        ("general upperbound", r.general_ub),
        ("beamforming upperbound", r.beamforming_ub),
        ("baseline", r.baseline),
        ("achievable", r.achievable),
    ] {
        let _ = writeln!(s, "{name:<24}{v:>8}  ({})", v.decimal());
    }
    match &r.plan {
        Some(p) => {
            let _ = writeln!(
                s,
                "scheme {}{} t={} streams/user={}",
                if p.reciprocal { "reciprocal " } else { "" },
                p.regime_label(),
                p.t,
                p.per_user_streams
            );
            for i in &p.instances {
                let _ = writeln!(s, "  L={} dtilde={}", i.l, i.dtilde);
            }
        }
        None => {
            let _ = writeln!(s, "scheme reference (not constructed)");
        }
    }
    s
}

fn run_bounds(cfg: &RunConfig) -> Result<Status> {
    let (m, n) = (cfg.single_m()?, cfg.need_n()?);
    let report = achievable(m, n, cfg.t_max)?;
    let t = report.plan.as_ref().map(|p| p.t);
    let meta = cfg.meta(Some(m), Some(n), t)?;
    let body = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&serde_json::json!({ "meta": meta, "bounds": report }))?,
        Format::Text => bounds_text(&report),
        Format::Csv => {
            let rows = sweep_fig2(n, m, m, cfg.t_max)?;
            let mut buf = cfg.csv_comment(&meta).into_bytes();
            write_fig2_csv(&mut buf, &rows)?;
            String::from_utf8(buf).expect("utf-8 csv")
        }
    };
    emit(cfg, &body)?;
    Ok(Status::Ok)
}

fn csv_as_text(csv_text: &str) -> String {
    let rows: Vec<Vec<&str>> = csv_text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').collect())
        .collect();
    let cols = rows.first().map_or(0, Vec::len);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .map(|r| r.get(c).map_or(0, |x| x.len()))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut s = String::new();
    for r in &rows {
        let line: Vec<String> = r
            .iter()
            .zip(&widths)
            .map(|(x, w)| format!("{x:>w$}"))
            .collect();
        let _ = writeln!(s, "{}", line.join("  "));
    }
    s
}

fn run_fig2(cfg: &RunConfig) -> Result<Status> {
    let n = cfg.need_n()?;
    let span = cfg.m.unwrap_or(Span {
        lo: 1,
        hi: 3 * n + 1,
    });
    let rows = sweep_fig2(n, span.lo, span.hi, cfg.t_max)?;
    let meta = cfg.meta(None, Some(n), None)?;
    let body = match cfg.format.unwrap_or(Format::Csv) {
        Format::Json => {
            to_json(&serde_json::json!({ "meta": meta, "m": span.to_string(), "rows": rows }))?
        }
        fmt => {
            let mut buf = Vec::new();
            write_fig2_csv(&mut buf, &rows)?;
            let csv_text = String::from_utf8(buf).expect("utf-8 csv");
            if fmt == Format::Text {
                csv_as_text(&csv_text)
            } else {
                cfg.csv_comment(&meta) + &csv_text
            }
        }
    };
    emit(cfg, &body)?;
    Ok(Status::Ok)
}

fn run_fig1(cfg: &RunConfig) -> Result<Status> {
    let depths = cfg.l.unwrap_or(Span { lo: 1, hi: 4 });
    let l_list: Vec<usize> = (depths.lo..=depths.hi).collect();
    if cfg.steps == 0 {
        return invalid("--steps must be >= 1");
    }
    let rows = sweep_fig1(&l_list, &fig1_ratio_grid(&l_list, cfg.steps))?;
    let meta = cfg.meta(None, None, None)?;
    let body = match cfg.format.unwrap_or(Format::Csv) {
        Format::Json => {
            to_json(&serde_json::json!({ "meta": meta, "l": depths.to_string(), "rows": rows }))?
        }
        fmt => {
            let mut buf = Vec::new();
            write_fig1_csv(&mut buf, &rows)?;
            let csv_text = String::from_utf8(buf).expect("utf-8 csv");
            if fmt == Format::Text {
                csv_as_text(&csv_text)
            } else {
                let mut head = cfg.csv_comment(&meta);
                head.insert_str(head.len() - 1, &format!(" l={depths} steps={}", cfg.steps));
                head + &csv_text
            }
        }
    };
    emit(cfg, &body)?;
    Ok(Status::Ok)
}

fn snr_grid(cfg: &RunConfig) -> Result<Vec<f64>> {
    if cfg.snr_step.is_nan() || cfg.snr_step <= 0.0 {
        return invalid("--snr-step must be positive");
    }
    let count = ((cfg.snr.hi - cfg.snr.lo) / cfg.snr_step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|k| cfg.snr.lo + k as f64 * cfg.snr_step)
        .collect())
}

fn run_slope(cfg: &RunConfig) -> Result<Status> {
    let tol = cfg.tolerance()?;
    let (ch, v, u, cert) = if cfg.channel.is_some() || cfg.precoders.is_some() {
        let (ch, v) = load_inputs(cfg)?;
        let cert = certify(&ch, &v, &tol)?;
        let u = build_decoders(&ch, &v, &tol)?;
        (ch, v, u, cert)
    } else {
        let s = synthesize(cfg)?;
        (s.channel, s.precoders, s.decoders, s.certificate)
    };
    let grid = snr_grid(cfg)?;
    let curve: RateCurve = estimate_dof_slope(
        &ch,
        &v,
        &u,
        &NoiseModel::default(),
        &grid,
        cfg.fit_span,
        &tol,
    )?;
    let meta = cfg.meta(Some(ch.m()), Some(ch.n()), Some(ch.t()))?;
    let body = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&serde_json::json!({
            "meta": meta,
            "certified_dof": cert.per_slot_dof,
            "certificate_pass": cert.pass,
            "curve": curve,
        }))?,
        Format::Csv => {
            let mut s = cfg.csv_comment(&meta);
            s.insert_str(
                s.len() - 1,
                &format!(
                    " fitted_slope={} certified_dof={}",
                    curve.fitted_slope, cert.per_slot_dof
                ),
            );
            s.push_str("snr_db,sum_rate\n");
            for (x, y) in curve.snr_db.iter().zip(&curve.sum_rates) {
                let _ = writeln!(s, "{x},{y}");
            }
            s
        }
        Format::Text => format!(
            "fitted slope {:.4} over the top {} dB, certified DoF {} ({})\n",
            curve.fitted_slope,
            curve.fit_span_db,
            cert.per_slot_dof,
            cert.per_slot_dof.decimal()
        ),
    };
    emit(cfg, &body)?;
    Ok(verdict(&cert))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(args: &[&str]) -> RunConfig {
        RunConfig::try_parse_from(std::iter::once("ia3").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn span_parsing() {
        assert_eq!("3".parse::<Span<usize>>().unwrap(), Span { lo: 3, hi: 3 });
        assert_eq!(
            "1:16".parse::<Span<usize>>().unwrap(),
            Span { lo: 1, hi: 16 }
        );
        assert!("5:2".parse::<Span<usize>>().is_err());
        assert!("a:2".parse::<Span<usize>>().is_err());
        assert_eq!("40:60".parse::<Span<f64>>().unwrap().hi, 60.0);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Ok(Status::Ok)), 0);
        assert_eq!(exit_code(&Ok(Status::CertificationFailed)), 4);
        assert_eq!(exit_code(&Err(Error::InvalidInput(String::new()))), 2);
        assert_eq!(exit_code(&Err(Error::Infeasible(String::new()))), 3);
        assert_eq!(exit_code(&Err(Error::Regime(String::new()))), 3);
    }

    #[test]
    fn missing_flags_are_invalid() {
        assert!(matches!(
            run(&cfg(&["synth", "--n", "3"])),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            run(&cfg(&["certify"])),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            run(&cfg(&["synth", "--m", "1:4", "--n", "3"])),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn square_configuration_is_not_constructed() {
        assert!(matches!(
            synthesize(&cfg(&["synth", "--m", "4", "--n", "4"])),
            Err(Error::Regime(_))
        ));
    }

    #[test]
    fn forced_depth_defaults_dtilde() {
        let plan = forced_plan(&cfg(&["synth", "--m", "7", "--n", "5", "--l", "2"]), 7, 5).unwrap();
        assert_eq!(plan.instances, vec![ChainInstance { l: 2, dtilde: 1 }]);
        let plan = forced_plan(&cfg(&["synth", "--m", "3", "--n", "5", "--t", "1"]), 3, 5).unwrap();
        assert!(plan.reciprocal);
        assert_eq!(plan.instances[0].l, 1);
    }

    #[test]
    fn forced_oversized_dtilde_is_infeasible() {
        let c = cfg(&["synth", "--m", "5", "--n", "3", "--l", "1", "--dtilde", "2"]);
        assert!(matches!(synthesize(&c), Err(Error::Infeasible(_))));
    }

    #[test]
    fn reciprocal_synthesis_certifies() {
        let s = synthesize(&cfg(&["synth", "--m", "3", "--n", "5", "--seed", "4"])).unwrap();
        assert!(s.certificate.pass);
        assert_eq!(s.certificate.per_slot_dof, Rational::from_integer(6));
    }
}
