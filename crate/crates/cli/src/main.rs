//! `qcorr` command-line front end.

mod config;
mod report;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use qcorr::bloch::is_in_tetrahedron;
use qcorr::coherence::{avg_coherence, suborbit_avg_coherence, von_neumann_entropy};
use qcorr::figures::figure;
use qcorr::mutual_info::{avg_mi_classical, avg_mi_general, avg_mi_isotropic, mi_from_correlation, omega_max_dim};
use qcorr::rsp::{average_over_relevant, evaluate, mc_average_rsp, pure_state, simulate_trials, BetaPolicy, RspTask};
use qcorr::sphere::mc_average_s2x_s2;
use qcorr::symmetry::{classify, orbit, orbit_physical_subset, spin_flip_admissible, suborbits, SymmetryClass, CLASS_TOL};
use qcorr::verify::{run_check, Suite, VerifyConfig};
use qcorr::{McSpec, Observable, TwoQubitState, Vec3};

use config::RunConfig;
use report::{render, Output, Record};

#[derive(Parser, Debug)]
#[command(name = "qcorr", version, about = "Correlations between local qubit observables and remote state preparation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Data table behind figure 1–6.
    Figure { id: u8 },
    /// Symmetry class, orbit sizes and Ω_Max dimension of κĉ.
    Classify,
    /// Average mutual information over all observable pairs.
    Mi,
    /// Von Neumann entropy and average coherence.
    Coherence,
    /// Standard and optimized protocol for one target.
    RspEval,
    /// Protocol figures averaged over targets.
    RspAverage,
    /// Shot-by-shot run of the protocol.
    Simulate,
    /// Numeric acceptance checks; exits 1 when any fails.
    Verify { suite: Option<String> },
}

#[derive(clap::Args, Debug)]
struct Opts {
    /// Correlation strength |c⃗|.
    #[arg(long, global = true, allow_hyphen_values = true)]
    kappa: Option<f64>,
    /// Correlation direction x,y,z (normalized on input).
    #[arg(long, global = true, allow_hyphen_values = true)]
    c_hat: Option<String>,
    /// Pure state λ|00⟩ + √(1 − λ²)|11⟩; excludes --kappa, --c-hat and --b.
    #[arg(long, global = true)]
    lambda: Option<f64>,
    /// B's Bloch vector x,y,z.
    #[arg(long, global = true, allow_hyphen_values = true)]
    b: Option<String>,
    /// Target axis n̂ as x,y,z.
    #[arg(long, global = true, allow_hyphen_values = true)]
    target: Option<String>,
    /// Rotation axis β̂ ⊥ n̂ as x,y,z (default: ẑ × n̂, or x̂ when n̂ ∥ ẑ).
    #[arg(long, global = true, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long, global = true)]
    quad_theta: Option<usize>,
    #[arg(long, global = true)]
    quad_phi: Option<usize>,
    /// Monte-Carlo samples for the cross-check estimates (0 disables them).
    #[arg(long, global = true)]
    mc_samples: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Points along κ or λ for figures 1–4.
    #[arg(long, global = true)]
    points: Option<usize>,
    /// κ grid size for figures 5 and 6.
    #[arg(long, global = true)]
    kappa_points: Option<usize>,
    /// b grid size for figures 5 and 6.
    #[arg(long, global = true)]
    b_points: Option<usize>,
    /// Flat `key = value` file with the same keys as the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

impl Opts {
    fn flags(&self) -> Vec<(&'static str, Option<String>)> {
        let s = |v: &Option<String>| v.clone();
        let n = |v: Option<f64>| v.map(|x| x.to_string());
        let u = |v: Option<usize>| v.map(|x| x.to_string());
        vec![
            ("kappa", n(self.kappa)),
            ("c-hat", s(&self.c_hat)),
            ("lambda", n(self.lambda)),
            ("b", s(&self.b)),
            ("target", s(&self.target)),
            ("beta", s(&self.beta)),
            ("quad-theta", u(self.quad_theta)),
            ("quad-phi", u(self.quad_phi)),
            ("mc-samples", u(self.mc_samples)),
            ("seed", self.seed.map(|x| x.to_string())),
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
            ("format", s(&self.format)),
            ("trials", self.trials.map(|x| x.to_string())),
            ("points", u(self.points)),
            ("kappa-points", u(self.kappa_points)),
            ("b-points", u(self.b_points)),
        ]
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Returns whether every check passed (always true outside `verify`).
fn run(cli: &Cli) -> Result<bool> {
    let mut flags = cli.opts.flags();
    if let Command::Verify { suite: Some(s) } = &cli.command {
        flags.push(("suite", Some(s.clone())));
    }
    let cfg = RunConfig::resolve(cli.opts.config.as_deref(), &flags)?;
    cfg.format()?;
    let (name, output, ok) = match &cli.command {
        Command::Figure { id } => (format!("figure {id}"), Output::Table(figure(*id, &cfg.grid()?, &cfg.quadrature()?)?), true),
        Command::Classify => ("classify".into(), Output::Record(cmd_classify(&cfg)?), true),
        Command::Mi => ("mi".into(), Output::Record(cmd_mi(&cfg)?), true),
        Command::Coherence => ("coherence".into(), Output::Record(cmd_coherence(&cfg)?), true),
        Command::RspEval => ("rsp-eval".into(), Output::Record(cmd_rsp_eval(&cfg)?), true),
        Command::RspAverage => ("rsp-average".into(), Output::Record(cmd_rsp_average(&cfg)?), true),
        Command::Simulate => ("simulate".into(), Output::Record(cmd_simulate(&cfg)?), true),
        Command::Verify { .. } => {
            let (rows, ok) = cmd_verify(&cfg)?;
            ("verify".into(), Output::Rows(rows), ok)
        }
    };
    let text = render(&output, &cfg, &name)?;
    match cfg.get("out") {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {path}"))?,
        None => print!("{text}"),
    }
    Ok(ok)
}

fn direction(cfg: &RunConfig) -> Result<Vec3> {
    let c = cfg.vec3("c-hat")?.unwrap_or_else(Vec3::z);
    let norm = c.norm();
    if norm == 0.0 {
        bail!("c-hat must be nonzero");
    }
    Ok(c / norm)
}

fn kappa(cfg: &RunConfig) -> Result<f64> {
    let k = cfg.f64("kappa")?.ok_or_else(|| anyhow!("--kappa is required"))?;
    if k < 0.0 {
        bail!("kappa must be ≥ 0, got {k}");
    }
    Ok(k)
}

/// Pure state from --lambda, otherwise a⃗ = 0, b⃗ from --b (default 0) and
/// E = κ diag(ĉ).
fn state(cfg: &RunConfig) -> Result<TwoQubitState> {
    if let Some(l) = cfg.f64("lambda")? {
        if cfg.is_set("kappa") || cfg.is_set("c-hat") || cfg.is_set("b") {
            bail!("--lambda cannot be combined with --kappa, --c-hat or --b");
        }
        return Ok(pure_state(l)?);
    }
    let (k, c) = (kappa(cfg)?, direction(cfg)?);
    Ok(match cfg.vec3("b")? {
        Some(b) => TwoQubitState::new(Vec3::zeros(), b, c * k)?,
        None => TwoQubitState::mmms(k, c)?,
    })
}

fn task(cfg: &RunConfig) -> Result<RspTask> {
    let n = cfg.vec3("target")?.ok_or_else(|| anyhow!("--target is required"))?;
    let n = Observable::from_direction(n)?;
    Ok(match cfg.vec3("beta")? {
        Some(b) => RspTask::new(n, Observable::from_direction(b)?)?,
        None => RspTask::with_policy(n, &BetaPolicy::default()),
    })
}

fn mc_spec(cfg: &RunConfig) -> Result<Option<McSpec>> {
    match cfg.usize("mc-samples")? {
        0 => Ok(None),
        n => Ok(Some(McSpec::new(n, cfg.seed()?)?)),
    }
}

fn class_fields(r: &mut Record, c: &Vec3) -> Result<SymmetryClass> {
    let cls = classify(c, CLASS_TOL)?;
    r.push("class", cls.class.tag());
    match cls.class.epsilon() {
        Some(e) => r.num("epsilon", e),
        None => r.push("epsilon", serde_json::Value::Null),
    };
    r.push("near_boundary", cls.near_boundary);
    Ok(cls.class)
}

fn cmd_classify(cfg: &RunConfig) -> Result<Record> {
    let (k, c) = (kappa(cfg)?, direction(cfg)?);
    if !is_in_tetrahedron(&(c * k)) {
        return Err(qcorr::Error::Domain(format!("κĉ = {:?} lies outside the tetrahedron", (c * k).as_slice())).into());
    }
    let state = TwoQubitState::mmms(k, c)?;
    let mut r = Record::default();
    r.num("kappa", k).vec3("c_hat", &c);
    class_fields(&mut r, &c)?;
    let (proper, improper) = suborbits(&c, CLASS_TOL);
    r.push("orbit", orbit(&c, CLASS_TOL).len())
        .push("proper_suborbit", proper.len())
        .push("improper_suborbit", improper.len())
        .push("physical_orbit", orbit_physical_subset(k, &c).len());
    match omega_max_dim(&state) {
        Ok(d) => r.push("omega_max_dim", d),
        Err(_) => r.push("omega_max_dim", serde_json::Value::Null),
    };
    r.num("purity", state.purity()).push("spin_flip_admissible", spin_flip_admissible(&(c * k))?);
    Ok(r)
}

fn cmd_mi(cfg: &RunConfig) -> Result<Record> {
    let s = state(cfg)?;
    if !s.is_mmms() {
        bail!("mi needs maximally mixed marginals (no --b or --lambda)");
    }
    let (k, c) = (s.kappa(), s.c_hat());
    let mut r = Record::default();
    r.num("kappa", k).vec3("c_hat", &c);
    let class = class_fields(&mut r, &c)?;
    r.num("avg_mi", avg_mi_general(&s, &cfg.quadrature()?)?);
    match class {
        SymmetryClass::Iso3 => r.num("avg_mi_closed_form", avg_mi_isotropic(k)?),
        SymmetryClass::Iso2_0 => r.num("avg_mi_closed_form", avg_mi_classical(k)?),
        _ => r.push("avg_mi_closed_form", serde_json::Value::Null),
    };
    r.num("max_mi", mi_from_correlation(k * c.amax()));
    if k > 0.0 {
        r.push("omega_max_dim", omega_max_dim(&s)?);
    }
    if let Some(spec) = mc_spec(cfg)? {
        let e = s.e;
        let est = mc_average_s2x_s2(|n, m| mi_from_correlation(e.bilinear(n, m)), &spec);
        r.num("avg_mi_mc", est.mean).num("avg_mi_mc_std_err", est.std_err);
    }
    Ok(r)
}

fn cmd_coherence(cfg: &RunConfig) -> Result<Record> {
    let s = state(cfg)?;
    let mut r = Record::default();
    r.num("s_vn", von_neumann_entropy(&s)?);
    if !s.is_mmms() {
        return Ok(r);
    }
    let quad = cfg.quadrature()?;
    let (k, c) = (s.kappa(), s.c_hat());
    r.num("avg_coherence", avg_coherence(&s, &quad)?);
    let flipped = TwoQubitState::mmms(k, -c);
    match flipped {
        Ok(f) => r.num("s_vn_flipped", von_neumann_entropy(&f)?),
        Err(_) => r.push("s_vn_flipped", serde_json::Value::Null),
    };
    let (plus, minus) = suborbit_avg_coherence(k, &c, &quad)?;
    let spread = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if v.is_empty() { 0.0 } else { hi - lo }
    };
    r.push("suborbit_plus_size", plus.len()).num("suborbit_plus_spread", spread(&plus));
    r.push("suborbit_minus_size", minus.len()).num("suborbit_minus_spread", spread(&minus));
    Ok(r)
}

fn cmd_rsp_eval(cfg: &RunConfig) -> Result<Record> {
    let s = state(cfg)?;
    let t = task(cfg)?;
    let ev = evaluate(&s, &t)?;
    let mut r = Record::default();
    r.vec3("target", &t.target().axis()).vec3("beta", &t.axis().axis());
    match ev.m_opt {
        Some(m) => r.vec3("m_opt", &m.axis()),
        None => r.push("m_opt", serde_json::Value::Null),
    };
    r.num("correlation", ev.correlation)
        .num("polarization", ev.polarization)
        .num("F_U", ev.f_u)
        .num("F_UN", ev.f_un)
        .num("F_opt", ev.f_opt)
        .push("useful", ev.useful)
        .num("gain", ev.gain)
        .push("gain_flagged", ev.gain_flagged)
        .push("stripped_physical", ev.stripped_physical);
    if let Some(n) = cfg.u64("trials")?.filter(|&n| n > 0) {
        trial_fields(&mut r, &s, &t, n, cfg.seed()?)?;
    }
    Ok(r)
}

fn trial_fields(r: &mut Record, s: &TwoQubitState, t: &RspTask, n: u64, seed: u64) -> Result<()> {
    let st = simulate_trials(s, t, n, seed)?;
    r.push("trials", st.n_trials)
        .vec3("measurement", &st.measurement.axis())
        .push("a_plus", st.a_plus)
        .push("b_plus", st.b_plus)
        .num("freq_plus", st.freq_plus)
        .num("freq_minus", st.freq_minus)
        .num("expected_plus", st.expected_plus)
        .num("std_err", st.std_err)
        .num("z_score", st.z_score());
    Ok(())
}

fn cmd_rsp_average(cfg: &RunConfig) -> Result<Record> {
    let s = state(cfg)?;
    let policy = match cfg.vec3("beta")? {
        Some(b) => BetaPolicy::Toward(b),
        None => BetaPolicy::default(),
    };
    let avg = average_over_relevant(&s, &policy, &cfg.quadrature()?)?;
    let mut r = Record::default();
    r.num("avg_F_U", avg.f_u)
        .num("avg_F_UN", avg.f_un)
        .num("avg_F_opt", avg.f_opt)
        .num("avg_gain", avg.gain)
        .num("delta_F", avg.delta_f)
        .num("useful_fraction", avg.useful_fraction);
    if let Some(spec) = mc_spec(cfg)? {
        for (key, est) in [
            ("avg_F_U_mc", mc_average_rsp(&s, &spec, |x| x.f_u)?),
            ("avg_F_opt_mc", mc_average_rsp(&s, &spec, |x| x.f_opt)?),
            ("avg_gain_mc", mc_average_rsp(&s, &spec, |x| x.gain)?),
        ] {
            r.num(key, est.mean).num(&format!("{key}_std_err"), est.std_err);
        }
    }
    Ok(r)
}

fn cmd_simulate(cfg: &RunConfig) -> Result<Record> {
    let s = state(cfg)?;
    let t = task(cfg)?;
    let n = cfg.u64("trials")?.unwrap_or(100_000);
    let mut r = Record::default();
    r.vec3("target", &t.target().axis()).vec3("beta", &t.axis().axis());
    trial_fields(&mut r, &s, &t, n, cfg.seed()?)?;
    Ok(r)
}

fn cmd_verify(cfg: &RunConfig) -> Result<(Vec<Record>, bool)> {
    let suite: Suite = cfg.get("suite").unwrap_or("all").parse()?;
    let vcfg = VerifyConfig { quad: cfg.quadrature()?, seed: cfg.seed()? };
    let mut rows = Vec::new();
    let mut ok = true;
    for id in suite.ids() {
        let res = run_check(id, &vcfg)?;
        eprintln!(
            "check {:>2} {} {} ({:.2} s): {}",
            res.id,
            if res.pass { "PASS" } else { "FAIL" },
            res.name,
            res.seconds,
            res.detail
        );
        ok &= res.pass;
        let mut r = Record::default();
        r.push("id", res.id)
            .push("name", res.name)
            .push("pass", res.pass)
            .num("measured", res.measured)
            .num("tolerance", res.tolerance)
            .push("detail", res.detail);
        rows.push(r);
    }
    Ok((rows, ok))
}
