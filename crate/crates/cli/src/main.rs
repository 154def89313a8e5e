//! `bandwave`: construct, verify and analyse band-limited wavelets.
//!
//! Exit status: 0 when the checked property holds, 1 when it does not,
//! 2 on usage errors, 3 on I/O or parse failures.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bandwave::builder::{
    build_family, from_bell, random_candidate, CandidateKind, Family, FrequencyWavelet,
};
use bandwave::classes::{classify, classify_verified};
use bandwave::descriptor::WaveletDescriptor;
use bandwave::dimension::{closed_form_matches, dimension_function, mra_verdict, MraKind};
use bandwave::error::Error;
use bandwave::exact::format_rational;
use bandwave::profile::StepProfile;
use bandwave::sets::{named_set, wavelet_set_check, SnGeometry};
use bandwave::time_domain::{identity_defect, sample_time, GramContext};
use bandwave::verifier::{verify, EquationCheck};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "bandwave",
    version,
    about = "Exact construction and verification of band-limited wavelets"
)]
struct Cli {
    /// Directory for relative output paths.
    #[arg(long, global = true, env = "BANDWAVE_OUT_DIR")]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a wavelet descriptor.
    Construct {
        /// gamma, msf-a, msf-b, psi-sixone, w-sixtwo, shannon, custom or random.
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: Option<u32>,
        /// Offset for msf-b, in 1..=2^(n-1)-2.
        #[arg(long)]
        p: Option<u32>,
        /// Bell profile on [e_n, b_n) as step-profile JSON (custom only).
        #[arg(long)]
        bell: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// valid, broken-iii or broken-v (random only).
        #[arg(long)]
        kind: Option<String>,
        /// Draw a bell with b²(ξ) + b²(2π − ξ) = 1 (random only).
        #[arg(long)]
        even: bool,
        #[arg(long)]
        notes: Option<String>,
        /// Output file; the descriptor goes to stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exact verification; prints the report as JSON.
    Verify {
        file: PathBuf,
        /// Record the verdict in the descriptor.
        #[arg(long)]
        stamp: bool,
    },
    /// Dimension function and MRA verdict.
    Dimension {
        file: PathBuf,
        /// Compare against the closed form D_N.
        #[arg(long, value_name = "N")]
        closed_form: Option<u32>,
        #[arg(long, value_name = "OUT")]
        csv: Option<PathBuf>,
    },
    /// Equivalence class label.
    Classify {
        file: PathBuf,
        /// Largest class index searched.
        #[arg(long, value_name = "M", default_value_t = 31)]
        max_class: u32,
        /// Verify now instead of requiring a stamped descriptor.
        #[arg(long)]
        force_verify: bool,
    },
    /// Time-domain samples of ψ.
    Sample {
        file: PathBuf,
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_hyphen_values = true)]
        range: Vec<f64>,
        #[arg(long, value_name = "N")]
        points: usize,
        /// CSV output; stdout when omitted.
        #[arg(long, value_name = "OUT")]
        csv: Option<PathBuf>,
    },
    /// Gram matrix of ψ_{j,k} as JSON.
    Gram {
        file: PathBuf,
        #[arg(long, num_args = 2, value_names = ["J0", "J1"], allow_hyphen_values = true, default_values_t = [-2, 2])]
        j: Vec<i32>,
        #[arg(long, num_args = 2, value_names = ["K0", "K1"], allow_hyphen_values = true, default_values_t = [-8, 8])]
        k: Vec<i64>,
    },
    /// Wavelet-set test for a named frequency set.
    Set {
        /// shannon, journe, lemarie, S_n, W_n or F_n.
        #[arg(long)]
        name: String,
        #[arg(long)]
        n: Option<u32>,
    },
}

enum Failure {
    Usage(String),
    Io(String),
    Check(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::OutOfRange(_) | Error::InvalidValue(_) => Failure::Usage(e.to_string()),
            Error::Parse(_) | Error::Json(_) => Failure::Io(e.to_string()),
            _ => Failure::Check(e.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

struct Ctx {
    out_dir: Option<PathBuf>,
}

impl Ctx {
    fn out_path(&self, p: &Path) -> PathBuf {
        match &self.out_dir {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p.to_path_buf(),
        }
    }

    fn write(&self, p: &Path, contents: &str) -> Result<PathBuf, Failure> {
        let path = self.out_path(p);
        if let Some(parent) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(parent)
                .map_err(|e| Failure::Io(format!("{}: {e}", parent.display())))?;
        }
        fs::write(&path, contents).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        Ok(path)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<(WaveletDescriptor, FrequencyWavelet), Failure> {
    let d = WaveletDescriptor::from_json(&read(path)?)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let w = d
        .to_wavelet()
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    Ok((d, w))
}

/// Writes to stdout; a closed pipe is not an error.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn print_json(v: &impl serde::Serialize) {
    emit(&(serde_json::to_string_pretty(v).expect("serializable") + "\n"));
}

fn reject_unless(cond: bool, flag: &str, family: &str) -> Result<(), Failure> {
    if cond {
        Ok(())
    } else {
        Err(Failure::Usage(format!(
            "{flag} does not apply to family '{family}'"
        )))
    }
}

#[allow(clippy::too_many_arguments)]
fn construct(
    ctx: &Ctx,
    family: &str,
    n: Option<u32>,
    p: Option<u32>,
    bell: Option<&Path>,
    seed: Option<u64>,
    kind: Option<&str>,
    even: bool,
    notes: Option<String>,
    output: Option<&Path>,
) -> Outcome {
    let need_n = || n.ok_or_else(|| Failure::Usage(format!("family '{family}' needs --n")));
    reject_unless(p.is_none() || family == "msf-b", "--p", family)?;
    reject_unless(bell.is_none() || family == "custom", "--bell", family)?;
    let random = family == "random";
    reject_unless(seed.is_none() || random, "--seed", family)?;
    reject_unless(kind.is_none() || random, "--kind", family)?;
    reject_unless(!even || random, "--even", family)?;

    let mut d = match family {
        "custom" => {
            let path = bell.ok_or_else(|| Failure::Usage("family 'custom' needs --bell".into()))?;
            let g = SnGeometry::new(need_n()?)?;
            let bell2: StepProfile = serde_json::from_str(&read(path)?)
                .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            WaveletDescriptor::from_wavelet(&from_bell(&g, &bell2, "custom")?)
        }
        "random" => {
            let n = need_n()?;
            let g = SnGeometry::new(n)?;
            let kind: CandidateKind = kind.unwrap_or("valid").parse()?;
            let seed = seed.unwrap_or(0);
            let c = random_candidate(&g, seed, kind, even)?;
            let mut d = WaveletDescriptor::from_wavelet(&c.wavelet);
            d.seed = Some(seed);
            d.kind = Some(kind.name().to_string());
            if let Some(defect) = &c.defect {
                d.notes = format!("defect on {defect}");
            }
            d
        }
        name => {
            let f: Family = name.parse()?;
            let n_val = match f {
                Family::Shannon => n.unwrap_or(0),
                _ => need_n()?,
            };
            if f == Family::MsfB && p.is_none() {
                return Err(Failure::Usage("family 'msf-b' needs --p".into()));
            }
            WaveletDescriptor::from_wavelet(&build_family(f, n_val, p)?)
        }
    };
    d.n = if family == "shannon" { None } else { n };
    d.p = p;
    if let Some(text) = notes {
        d.notes = text;
    }

    let w = d.to_wavelet()?;
    let summary = format!(
        "support measure {} pi, {} pieces",
        format_rational(w.support().measure().coeff()),
        w.mag2().pieces().len()
    );
    match output {
        Some(out) => {
            let path = ctx.write(out, &(d.to_json() + "\n"))?;
            emit(&format!("wrote {}: {summary}\n", path.display()));
        }
        None => {
            emit(&(d.to_json() + "\n"));
            eprintln!("{summary}");
        }
    }
    Ok(true)
}

fn failing_cells(name: &str, c: &EquationCheck) -> Option<String> {
    let w = c.witnesses.first()?;
    let cell = match &w.cell {
        Some(iv) => iv.to_string(),
        None => format!("{:.6} pi", w.cell_approx[0]),
    };
    Some(format!(
        "{name} fails on {cell} (index {}, residual {:e})",
        w.index, w.residual
    ))
}

fn cmd_verify(file: &Path, stamp: bool) -> Outcome {
    let (mut d, w) = load(file)?;
    let report = verify(&w)?;
    print_json(&report);
    for (name, c) in [
        ("eq1", &report.eq1),
        ("eq2", &report.eq2),
        ("eq3", &report.eq3),
        ("eq4", &report.eq4),
    ] {
        if let Some(line) = failing_cells(name, c) {
            eprintln!("{line}");
        }
    }
    if !report.norm_ok() {
        eprintln!(
            "norm squared is {}",
            report.norm_sq.as_deref().unwrap_or("?")
        );
    }
    if stamp {
        d.verified = Some(report.verdict);
        fs::write(file, d.to_json() + "\n")
            .map_err(|e| Failure::Io(format!("{}: {e}", file.display())))?;
    }
    Ok(report.verdict)
}

fn cmd_dimension(ctx: &Ctx, file: &Path, closed_form: Option<u32>, csv: Option<&Path>) -> Outcome {
    let (_, w) = load(file)?;
    let d = dimension_function(&w)?;
    let mra = mra_verdict(&w)?;
    let mut out = d.to_json();
    out["even"] = json!(d.is_even());
    out["mra"] = json!(mra.kind);
    if let Some((cell, v)) = &mra.evidence {
        out["mra_evidence"] = json!({"cell": cell, "value": format_rational(v)});
    }
    let mut ok = true;
    if let Some(n) = closed_form {
        let matches = closed_form_matches(&d, n)?;
        ok = matches;
        out["closed_form"] = json!({
            "n": n,
            "verdict": if matches { "EXACT MATCH" } else { "MISMATCH" },
        });
    }
    if let Some(path) = csv {
        let p = ctx.write(path, &d.to_csv())?;
        out["csv"] = json!(p.display().to_string());
    }
    print_json(&out);
    if closed_form.is_some() {
        eprintln!("{}", if ok { "EXACT MATCH" } else { "MISMATCH" });
    }
    debug_assert_eq!(d.is_mra, mra.kind == MraKind::Mra);
    Ok(ok)
}

fn cmd_classify(file: &Path, max_class: u32, force_verify: bool) -> Outcome {
    let (d, w) = load(file)?;
    let max_k = max_class.saturating_add(1);
    let label = match (d.verified, force_verify) {
        (_, true) => classify(&w, max_k)?,
        (Some(true), false) => classify_verified(&w, max_k),
        (Some(false), false) => {
            return Err(Failure::Check(
                "descriptor is stamped as not a wavelet".into(),
            ))
        }
        (None, false) => {
            return Err(Failure::Usage(
                "descriptor is not verified; run `verify --stamp` first or pass --force-verify"
                    .into(),
            ))
        }
    };
    print_json(&label);
    Ok(true)
}

fn cmd_sample(ctx: &Ctx, file: &Path, range: &[f64], points: usize, csv: Option<&Path>) -> Outcome {
    let (_, w) = load(file)?;
    let s = sample_time(&w, range[0], range[1], points)?;
    let max_abs = s.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    match csv {
        Some(path) => {
            let p = ctx.write(path, &s.to_csv())?;
            print_json(&json!({
                "csv": p.display().to_string(),
                "points": s.xs.len(),
                "real_valued": s.real_valued,
                "max_abs": max_abs,
            }));
        }
        None => emit(&s.to_csv()),
    }
    Ok(true)
}

fn cmd_gram(file: &Path, j: &[i32], k: &[i64]) -> Outcome {
    let (_, w) = load(file)?;
    let js: Vec<i32> = (j[0]..=j[1]).collect();
    let ks: Vec<i64> = (k[0]..=k[1]).collect();
    if js.is_empty() || ks.is_empty() {
        return Err(Failure::Usage("empty j or k range".into()));
    }
    let g = GramContext::new(&w).matrix(&js, &ks)?;
    let matrix: Vec<Value> = g
        .iter()
        .map(|row| json!(row.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()))
        .collect();
    print_json(&json!({
        "js": js,
        "ks": ks,
        "max_identity_defect": identity_defect(&g),
        "matrix": matrix,
    }));
    Ok(true)
}

fn cmd_set(name: &str, n: Option<u32>) -> Outcome {
    let set = named_set(name, n)?;
    let v = wavelet_set_check(&set);
    print_json(&json!({
        "name": name,
        "n": n,
        "pieces": set,
        "measure_over_pi": format_rational(v.measure.coeff()),
        "translation_tiling": v.translation_tiling,
        "dilation_tiling": v.dilation_tiling,
        "is_wavelet_set": v.is_wavelet_set,
    }));
    Ok(v.is_wavelet_set)
}

fn run(cli: Cli) -> Outcome {
    let ctx = Ctx {
        out_dir: cli.out_dir,
    };
    match cli.command {
        Command::Construct {
            family,
            n,
            p,
            bell,
            seed,
            kind,
            even,
            notes,
            output,
        } => construct(
            &ctx,
            &family,
            n,
            p,
            bell.as_deref(),
            seed,
            kind.as_deref(),
            even,
            notes,
            output.as_deref(),
        ),
        Command::Verify { file, stamp } => cmd_verify(&file, stamp),
        Command::Dimension {
            file,
            closed_form,
            csv,
        } => cmd_dimension(&ctx, &file, closed_form, csv.as_deref()),
        Command::Classify {
            file,
            max_class,
            force_verify,
        } => cmd_classify(&file, max_class, force_verify),
        Command::Sample {
            file,
            range,
            points,
            csv,
        } => cmd_sample(&ctx, &file, &range, points, csv.as_deref()),
        Command::Gram { file, j, k } => cmd_gram(&file, &j, &k),
        Command::Set { name, n } => cmd_set(&name, n),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            let (Failure::Usage(m) | Failure::Io(m) | Failure::Check(m)) = &f;
            eprintln!("error: {m}");
            ExitCode::from(f.code())
        }
    }
}
