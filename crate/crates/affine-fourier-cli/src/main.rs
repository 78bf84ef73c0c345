//! Command-line front end: parse specs, dispatch to the library, emit CSV
//! scan artifacts with a JSON provenance header beside them.
//!
//! Every run writes `<base>.csv` (the data body, floats at 17 significant
//! digits so artifacts double as regression goldens) and `<base>.json`
//! (config echo, library version, wall time).  Identical config and seed
//! reproduce the CSV body byte for byte; only the JSON wall time varies.
//! Files are written atomically (temp file + rename).
//!
//! Exit codes: 0 success, 2 validation error, 3 numeric failure.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use affine_fourier::algebraic::{self, IntPolynomial, PisotContext};
use affine_fourier::chaos;
use affine_fourier::detmeasure::{CylinderSpec, CylinderSpecJson, Kernel, KernelSpec};
use affine_fourier::fourier::{self, ScanSystem};
use affine_fourier::ifs::{self, AffineIfs, IfsSpec};
use affine_fourier::induced::{self, InducedSystem};
use affine_fourier::{Error, ErrorKind};

/// Environment variable naming the default artifact directory.
const OUT_DIR_ENV: &str = "AFFINE_FOURIER_OUT";

#[derive(Parser)]
#[command(
    name = "affine-fourier",
    version,
    about = "Fourier transforms of affine-IFS and determinantal-induced measures",
    after_help = "Artifacts: each run writes <base>.csv and <base>.json; \
                  --out sets the base, otherwise $AFFINE_FOURIER_OUT/<command> is used."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputArgs {
    /// Artifact basename (writes <out>.csv and <out>.json)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Certify that the dominant root of a polynomial is a Pisot number
    PisotCertify {
        /// Monic integer polynomial, "x^2 - x - 1" or "[1,-1,-1]"
        #[arg(long)]
        poly: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact integer traces s_k and mod-1 distances of alpha^k
    PisotTrace {
        #[arg(long)]
        poly: String,
        /// Largest exponent k
        #[arg(long, default_value_t = 40)]
        kmax: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate the transform of an affine IFS at frequencies
    IfsTransform {
        /// IFS spec: inline JSON or a path ({dim, A, B, p})
        #[arg(long)]
        spec: String,
        /// Single frequency vector, comma-separated
        #[arg(long, allow_hyphen_values = true)]
        xi: Option<String>,
        /// Scalar frequency grid "start:stop:count" along --dir
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// Direction vector for --grid (defaults to all-ones)
        #[arg(long, allow_hyphen_values = true)]
        dir: Option<String>,
        /// Truncation tolerance
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Also run a chaos-game sample of this size and report the
        /// empirical characteristic function
        #[arg(long)]
        sample: Option<usize>,
        /// RNG seed for --sample
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Non-decay scan |mu(alpha^k)| along a Pisot geometric sequence
    ErdosScan {
        /// Minimal polynomial of the Pisot number alpha = 1/lambda
        #[arg(long)]
        poly: String,
        /// System: "1d", "simplex:D", or "intdir:N1,N2"
        #[arg(long, default_value = "1d")]
        system: String,
        /// Largest exponent k
        #[arg(long, default_value_t = 40)]
        kmax: usize,
        /// Truncation tolerance
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Scan the triangular matrix family [[alpha,0],[b,c]] at alpha^k [1,0]
    PisotMatrixScan {
        /// Minimal polynomial of the Pisot number alpha
        #[arg(long)]
        poly: String,
        #[arg(long, default_value_t = 0.7, allow_negative_numbers = true)]
        b: f64,
        #[arg(long, default_value_t = 2.0)]
        c: f64,
        #[arg(long, default_value_t = 25)]
        kmax: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Cylinder probability mu_T(G(xi)) = det W(xi)
    DetCylinder {
        /// Kernel spec: inline JSON or a path ({variant, p?, a?, matrix?})
        #[arg(long)]
        kernel: String,
        /// Cylinder spec: {"F":[...], "xi":[...]}
        #[arg(long)]
        cyl: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Kolmogorov additivity sweep over small cylinders
    DetConsistency {
        #[arg(long)]
        kernel: String,
        /// Largest cylinder size
        #[arg(long, default_value_t = 4)]
        fmax: usize,
        /// Index range 1..=range for F and insertion points
        #[arg(long, default_value_t = 6)]
        range: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Induced-measure transform by determinant truncation on a t-grid
    InducedTransform {
        #[arg(long)]
        kernel: String,
        #[arg(long)]
        lambda: f64,
        /// t-grid "start:stop:count"
        #[arg(long, default_value = "-2:2:17", allow_hyphen_values = true)]
        grid: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Truncation ladder cap
        #[arg(long, default_value_t = 64)]
        depth: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compare the Toeplitz determinant against the Bernoulli product and P_n
    ToeplitzCompare {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, default_value_t = 12)]
        nmax: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Infinite determinant det_lambda on a t-grid, with identity residuals
    DetLambda {
        #[arg(long)]
        kernel: String,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value = "-2:2:17", allow_hyphen_values = true)]
        grid: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 64)]
        depth: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Separation bounds for translates t_n = lambda^n / 2
    ChaosScan {
        /// Minimal polynomial of the Pisot number 1/lambda
        #[arg(long)]
        poly: String,
        #[arg(long, default_value_t = 20)]
        nmax: usize,
        /// Separation threshold for the verdict
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn main() {
    let cli = Cli::parse();
    let started = Instant::now();
    match run(cli, started) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err.kind() {
                ErrorKind::Validation => 2,
                ErrorKind::Numeric => 3,
            };
            std::process::exit(code);
        }
    }
}

/// 17 significant digits: enough to round-trip any double exactly.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn default_base(command: &str) -> PathBuf {
    let dir = std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    dir.join(command)
}

fn write_atomic(path: &Path, contents: &str) -> Result<(), Error> {
    let tmp = path.with_extension(format!(
        "{}.tmp-{}",
        path.extension().and_then(|e| e.to_str()).unwrap_or("out"),
        std::process::id()
    ));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn emit(
    base: &Path,
    command: &str,
    config: serde_json::Value,
    extra: serde_json::Value,
    csv: &str,
    started: Instant,
) -> Result<(), Error> {
    if let Some(parent) = base.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let header = json!({
        "command": command,
        "config": config,
        "result": extra,
        "library_version": env!("CARGO_PKG_VERSION"),
        "wall_time_s": started.elapsed().as_secs_f64(),
    });
    write_atomic(&base.with_extension("csv"), csv)?;
    write_atomic(&base.with_extension("json"), &format!("{:#}\n", header))?;
    println!(
        "wrote {} and {}",
        base.with_extension("csv").display(),
        base.with_extension("json").display()
    );
    Ok(())
}

/// Accept inline JSON or a file path.
fn read_spec(input: &str) -> Result<String, Error> {
    let trimmed = input.trim();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        Ok(trimmed.to_string())
    } else {
        Ok(std::fs::read_to_string(trimmed)?)
    }
}

fn parse_kernel(input: &str) -> Result<Kernel, Error> {
    let text = read_spec(input)?;
    let spec: KernelSpec =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("kernel spec: {e}")))?;
    Kernel::from_spec(&spec)
}

fn parse_ifs(input: &str) -> Result<AffineIfs, Error> {
    let text = read_spec(input)?;
    let spec: IfsSpec =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("ifs spec: {e}")))?;
    AffineIfs::from_spec(&spec)
}

fn parse_vector(input: &str) -> Result<Vec<f64>, Error> {
    input
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number '{s}'")))
        })
        .collect()
}

/// "start:stop:count" inclusive linear grid.
fn parse_grid(input: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = input.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!(
            "grid '{input}' is not start:stop:count"
        )));
    }
    let start: f64 = parts[0]
        .parse()
        .map_err(|_| Error::Parse(format!("bad grid start '{}'", parts[0])))?;
    let stop: f64 = parts[1]
        .parse()
        .map_err(|_| Error::Parse(format!("bad grid stop '{}'", parts[1])))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| Error::Parse(format!("bad grid count '{}'", parts[2])))?;
    if count == 0 {
        return Err(Error::Parse("grid count must be >= 1".into()));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let step = (stop - start) / (count - 1) as f64;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

fn parse_system(input: &str) -> Result<ScanSystem, Error> {
    let s = input.trim().to_lowercase();
    if s == "1d" {
        return Ok(ScanSystem::Bernoulli1d);
    }
    if let Some(d) = s.strip_prefix("simplex:") {
        let d: usize = d
            .parse()
            .map_err(|_| Error::Parse(format!("bad simplex dimension '{d}'")))?;
        return Ok(ScanSystem::Simplex { d });
    }
    if let Some(dir) = s.strip_prefix("intdir:") {
        let parts: Vec<&str> = dir.split(',').collect();
        if parts.len() != 2 {
            return Err(Error::Parse(format!("bad direction '{dir}'")));
        }
        let n1: i64 = parts[0]
            .parse()
            .map_err(|_| Error::Parse(format!("bad integer '{}'", parts[0])))?;
        let n2: i64 = parts[1]
            .parse()
            .map_err(|_| Error::Parse(format!("bad integer '{}'", parts[1])))?;
        return Ok(ScanSystem::IntegerDirection { n1, n2 });
    }
    Err(Error::Parse(format!(
        "unknown system '{input}' (want 1d, simplex:D, intdir:N1,N2)"
    )))
}

fn certify(poly: &str) -> Result<(IntPolynomial, PisotContext), Error> {
    let p = IntPolynomial::parse(poly)?;
    let ctx = algebraic::certify_pisot(&p)?;
    Ok((p, ctx))
}

fn run(cli: Cli, started: Instant) -> Result<(), Error> {
    match cli.command {
        Command::PisotCertify { poly, output } => {
            let p = IntPolynomial::parse(&poly)?;
            let base = output.out.unwrap_or_else(|| default_base("pisot-certify"));
            let config = json!({"poly": p.to_string()});
            match algebraic::certify_pisot(&p) {
                Ok(ctx) => {
                    let mut csv = String::from("index,re,im,modulus\n");
                    for (i, c) in ctx.conjugates().iter().enumerate() {
                        let _ = writeln!(
                            csv,
                            "{},{},{},{}",
                            i + 1,
                            fmt_f64(c.re),
                            fmt_f64(c.im),
                            fmt_f64(c.norm())
                        );
                    }
                    println!(
                        "certified: alpha = {}, conjugate max = {}",
                        ctx.alpha(),
                        ctx.conjugate_max()
                    );
                    emit(
                        &base,
                        "pisot-certify",
                        config,
                        json!({
                            "certified": true,
                            "alpha": ctx.alpha(),
                            "degree": ctx.degree(),
                            "conjugate_max": ctx.conjugate_max(),
                        }),
                        &csv,
                        started,
                    )
                }
                // a rejection is a successful determination, not a failure
                Err(err @ (Error::NotPisot(_) | Error::PisotIndeterminate { .. })) => {
                    let indeterminate = matches!(err, Error::PisotIndeterminate { .. });
                    println!("rejected: {err}");
                    emit(
                        &base,
                        "pisot-certify",
                        config,
                        json!({
                            "certified": false,
                            "indeterminate": indeterminate,
                            "reason": err.to_string(),
                        }),
                        "index,re,im,modulus\n",
                        started,
                    )
                }
                Err(other) => Err(other),
            }
        }

        Command::PisotTrace { poly, kmax, output } => {
            let (p, ctx) = certify(&poly)?;
            let mut csv = String::from("k,s_k,dist_mod1\n");
            let mut traces = Vec::with_capacity(kmax + 1);
            for k in 0..=kmax {
                let s = ctx.trace(k);
                let m = ctx.alpha_pow_mod1(k);
                let _ = writeln!(csv, "{k},{s},{}", fmt_f64(m.value));
                traces.push(s.to_string());
            }
            let base = output.out.unwrap_or_else(|| default_base("pisot-trace"));
            emit(
                &base,
                "pisot-trace",
                json!({"poly": p.to_string(), "kmax": kmax}),
                json!({"alpha": ctx.alpha(), "traces": traces}),
                &csv,
                started,
            )
        }

        Command::IfsTransform {
            spec,
            xi,
            grid,
            dir,
            tol,
            sample,
            seed,
            output,
        } => {
            let system = parse_ifs(&spec)?;
            let mut csv = String::from("xi,re,im,abs,depth,tail_bound\n");
            let mut frequencies: Vec<Vec<f64>> = Vec::new();
            match (&xi, &grid) {
                (Some(point), None) => {
                    let v = parse_vector(point)?;
                    frequencies.push(v);
                }
                (None, Some(g)) => {
                    let direction = match &dir {
                        Some(d) => parse_vector(d)?,
                        None => vec![1.0; system.dim()],
                    };
                    if direction.len() != system.dim() {
                        return Err(Error::Invalid("direction of wrong dimension".into()));
                    }
                    for s in parse_grid(g)? {
                        frequencies.push(direction.iter().map(|w| w * s).collect());
                    }
                }
                _ => return Err(Error::Invalid("give exactly one of --xi or --grid".into())),
            }
            for freq in &frequencies {
                let ev = fourier::mu_hat(&system, freq, tol)?;
                let label = freq
                    .iter()
                    .map(|v| fmt_f64(*v))
                    .collect::<Vec<_>>()
                    .join(";");
                let _ = writeln!(
                    csv,
                    "{label},{},{},{},{},{}",
                    fmt_f64(ev.value.re),
                    fmt_f64(ev.value.im),
                    fmt_f64(ev.value.norm()),
                    ev.depth,
                    fmt_f64(ev.tail_bound)
                );
            }
            let mut extra = json!({"points": frequencies.len()});
            let base = output.out.unwrap_or_else(|| default_base("ifs-transform"));
            if let Some(n) = sample {
                let emp = ifs::chaos_game(&system, n, seed)?;
                let first = &frequencies[0];
                let cf = emp.characteristic_function(first);
                let exact = fourier::mu_hat(&system, first, tol)?.value;
                extra = json!({
                    "points": frequencies.len(),
                    "sample_size": n,
                    "seed": seed,
                    "empirical_cf_re": cf.re,
                    "empirical_cf_im": cf.im,
                    "empirical_gap": (cf - exact).norm(),
                });
                let sample_path = base.with_extension("samples.csv");
                write_atomic(&sample_path, &emp.to_csv())?;
                println!("wrote {}", sample_path.display());
            }
            emit(
                &base,
                "ifs-transform",
                json!({
                    "spec": system.to_spec(),
                    "tol": tol,
                    "grid": grid,
                    "dir": dir,
                    "xi": xi,
                }),
                extra,
                &csv,
                started,
            )
        }

        Command::ErdosScan {
            poly,
            system,
            kmax,
            tol,
            output,
        } => {
            let (p, ctx) = certify(&poly)?;
            let sys = parse_system(&system)?;
            let scan = fourier::erdos_scan(sys, &ctx, kmax, tol)?;
            let mut csv = String::from("k,re,im,abs,split_residual,depth\n");
            for ev in &scan.evaluations {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    ev.k,
                    fmt_f64(ev.split.re),
                    fmt_f64(ev.split.im),
                    fmt_f64(ev.split.norm()),
                    fmt_f64(ev.residual),
                    ev.tail.depth
                );
            }
            println!(
                "floor {} certified {} over k <= {kmax}",
                scan.floor, scan.certified.value
            );
            let base = output.out.unwrap_or_else(|| default_base("erdos-scan"));
            emit(
                &base,
                "erdos-scan",
                json!({"poly": p.to_string(), "system": system, "kmax": kmax, "tol": tol}),
                json!({
                    "alpha": ctx.alpha(),
                    "theta": scan.certified.theta,
                    "theta_start": scan.certified.theta_start,
                    "certified_floor": scan.certified.value,
                    "empirical_floor": scan.floor,
                    "split_residual_max": scan.split_residual_max,
                }),
                &csv,
                started,
            )
        }

        Command::PisotMatrixScan {
            poly,
            b,
            c,
            kmax,
            tol,
            output,
        } => {
            let (p, ctx) = certify(&poly)?;
            let ms = fourier::pisot_matrix_scan(&ctx, b, c, kmax, tol)?;
            let mut csv = String::from("k,abs_reduced,abs_general,agreement\n");
            for k in 0..=kmax {
                let _ = writeln!(
                    csv,
                    "{k},{},{},{}",
                    fmt_f64(ms.scan.values[k]),
                    fmt_f64(ms.general_values[k]),
                    fmt_f64(ms.agreement[k])
                );
            }
            let worst = ms.agreement.iter().cloned().fold(0.0f64, f64::max);
            println!("floor {} worst agreement {worst}", ms.scan.floor);
            let base = output
                .out
                .unwrap_or_else(|| default_base("pisot-matrix-scan"));
            emit(
                &base,
                "pisot-matrix-scan",
                json!({"poly": p.to_string(), "b": b, "c": c, "kmax": kmax, "tol": tol}),
                json!({
                    "floor": ms.scan.floor,
                    "certified_floor": ms.scan.certified.value,
                    "worst_agreement": worst,
                }),
                &csv,
                started,
            )
        }

        Command::DetCylinder {
            kernel,
            cyl,
            output,
        } => {
            let k = parse_kernel(&kernel)?;
            let text = read_spec(&cyl)?;
            let cj: CylinderSpecJson = serde_json::from_str(&text)
                .map_err(|e| Error::Parse(format!("cylinder spec: {e}")))?;
            let cylinder = CylinderSpec::from_json(&cj)?;
            let prob = affine_fourier::detmeasure::cylinder_prob(&k, &cylinder)?;
            println!("{}", fmt_f64(prob));
            let mut csv = String::from("F,xi,probability\n");
            let f_label = cylinder
                .indices()
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(";");
            let xi_label = cylinder
                .bits()
                .iter()
                .map(|b| b.to_string())
                .collect::<Vec<_>>()
                .join(";");
            let _ = writeln!(csv, "{f_label},{xi_label},{}", fmt_f64(prob));
            let base = output.out.unwrap_or_else(|| default_base("det-cylinder"));
            emit(
                &base,
                "det-cylinder",
                json!({"kernel": k.to_spec(), "cyl": {"F": cylinder.indices(), "xi": cylinder.bits()}}),
                json!({"probability": prob}),
                &csv,
                started,
            )
        }

        Command::DetConsistency {
            kernel,
            fmax,
            range,
            output,
        } => {
            let k = parse_kernel(&kernel)?;
            if range == 0 || range > 16 {
                return Err(Error::Invalid("range must be in 1..=16".into()));
            }
            if fmax >= range {
                return Err(Error::Invalid("fmax must be below range".into()));
            }
            let mut csv = String::from("F,k,residual\n");
            let mut worst = 0.0f64;
            let mut checks = 0usize;
            for mask in 0u32..(1 << range) {
                let f: Vec<usize> = (1..=range).filter(|i| (mask >> (i - 1)) & 1 == 1).collect();
                if f.len() > fmax {
                    continue;
                }
                for point in 1..=range {
                    if f.contains(&point) {
                        continue;
                    }
                    let residual = affine_fourier::detmeasure::consistency_check(&k, &f, point)?;
                    worst = worst.max(residual);
                    checks += 1;
                    let label = f
                        .iter()
                        .map(|i| i.to_string())
                        .collect::<Vec<_>>()
                        .join(";");
                    let _ = writeln!(csv, "{label},{point},{}", fmt_f64(residual));
                }
            }
            println!("{checks} checks, worst residual {worst}");
            let base = output
                .out
                .unwrap_or_else(|| default_base("det-consistency"));
            emit(
                &base,
                "det-consistency",
                json!({"kernel": k.to_spec(), "fmax": fmax, "range": range}),
                json!({"checks": checks, "worst_residual": worst}),
                &csv,
                started,
            )
        }

        Command::InducedTransform {
            kernel,
            lambda,
            grid,
            tol,
            depth,
            output,
        } => {
            let k = parse_kernel(&kernel)?;
            let sys = InducedSystem::new(lambda, k.clone())?;
            let ts = parse_grid(&grid)?;
            let mut csv = String::from("t,re,im,abs,n_used,stagnation\n");
            for &t in &ts {
                let r = induced::nu_hat_det_with(&sys, t, tol, depth)?;
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    fmt_f64(t),
                    fmt_f64(r.value.re),
                    fmt_f64(r.value.im),
                    fmt_f64(r.value.norm()),
                    r.n_used,
                    fmt_f64(r.stagnation)
                );
            }
            let base = output
                .out
                .unwrap_or_else(|| default_base("induced-transform"));
            emit(
                &base,
                "induced-transform",
                json!({"kernel": k.to_spec(), "lambda": lambda, "grid": grid, "tol": tol, "depth": depth}),
                json!({"points": ts.len()}),
                &csv,
                started,
            )
        }

        Command::ToeplitzCompare {
            p,
            a,
            lambda,
            t,
            nmax,
            output,
        } => {
            if nmax == 0 || nmax > 16 {
                return Err(Error::Invalid("nmax must be in 1..=16".into()));
            }
            let mut csv = String::from(
                "n,det_re,det_im,product_re,product_im,deviation,pn_re,pn_im,pn_det_gap\n",
            );
            for n in 1..=nmax {
                let ap = induced::toeplitz_product_approx(p, a, lambda, t, n)?;
                let pn = induced::toeplitz_exact_pn(p, a, lambda, t, n)?;
                let _ = writeln!(
                    csv,
                    "{n},{},{},{},{},{},{},{},{}",
                    fmt_f64(ap.det.re),
                    fmt_f64(ap.det.im),
                    fmt_f64(ap.product.re),
                    fmt_f64(ap.product.im),
                    fmt_f64(ap.deviation),
                    fmt_f64(pn.pn.re),
                    fmt_f64(pn.pn.im),
                    fmt_f64(pn.det_gap)
                );
            }
            let base = output
                .out
                .unwrap_or_else(|| default_base("toeplitz-compare"));
            emit(
                &base,
                "toeplitz-compare",
                json!({"p": p, "a": a, "lambda": lambda, "t": t, "nmax": nmax}),
                json!({}),
                &csv,
                started,
            )
        }

        Command::DetLambda {
            kernel,
            lambda,
            grid,
            tol,
            depth,
            output,
        } => {
            let k = parse_kernel(&kernel)?;
            let ts = parse_grid(&grid)?;
            let mut csv = String::from("t,re,im,abs,n_used,identity_residual\n");
            for &t in &ts {
                let r = induced::det_lambda_with(&k, lambda, t, tol, depth)?;
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    fmt_f64(t),
                    fmt_f64(r.result.value.re),
                    fmt_f64(r.result.value.im),
                    fmt_f64(r.result.value.norm()),
                    r.result.n_used,
                    fmt_f64(r.identity_residual_max)
                );
            }
            let base = output.out.unwrap_or_else(|| default_base("det-lambda"));
            emit(
                &base,
                "det-lambda",
                json!({"kernel": k.to_spec(), "lambda": lambda, "grid": grid, "tol": tol, "depth": depth}),
                json!({"points": ts.len()}),
                &csv,
                started,
            )
        }

        Command::ChaosScan {
            poly,
            nmax,
            eps,
            tol,
            output,
        } => {
            let (p, ctx) = certify(&poly)?;
            let bounds = chaos::separation_scan(&ctx, nmax, tol)?;
            let mut csv = String::from("n,t_n,witness_xi,bound\n");
            for (n, b) in bounds.iter().enumerate() {
                let _ = writeln!(
                    csv,
                    "{n},{},{},{}",
                    fmt_f64(b.t),
                    fmt_f64(b.witness_xi),
                    fmt_f64(b.bound)
                );
            }
            let floor = bounds.iter().map(|b| b.bound).fold(f64::INFINITY, f64::min);
            let eps = eps.unwrap_or(floor * 0.999);
            let lambda = 1.0 / ctx.alpha();
            let verdict = chaos::chaos_classify(lambda, Some(&ctx), eps, nmax, tol)?;
            let verdict_label = match &verdict {
                chaos::ChaosVerdict::ChaoticCertified { .. } => "chaotic-certified",
                chaos::ChaosVerdict::NoEvidence { .. } => "no-evidence",
            };
            println!("floor {floor} verdict {verdict_label}");
            let base = output.out.unwrap_or_else(|| default_base("chaos-scan"));
            emit(
                &base,
                "chaos-scan",
                json!({"poly": p.to_string(), "nmax": nmax, "eps": eps, "tol": tol}),
                json!({"floor": floor, "verdict": verdict_label}),
                &csv,
                started,
            )
        }
    }
}
