//! `superanalysis`: command-line front end for demos, tables and the acceptance suite.
//!
//! Exit codes: 0 on success, 1 when a computation fails, 2 on a usage error. Outputs depend
//! only on the flags; the RNG seed may also come from `SUPERANALYSIS_SEED`.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use superanalysis::berezin::{q_gaussian, shear_counterexample, OddPolynomial};
use superanalysis::error::{Error, Result};
use superanalysis::fourier_odd::{fo, fo_bar, OddFourierConfig};
use superanalysis::grassmann::{random_supernumber, Supernumber, C64};
use superanalysis::rmt::{self, GueParams};
use superanalysis::selftest;
use superanalysis::superlinalg::{random_even, sdet_flow_check, MatrixParity, Supermatrix};
use superanalysis::superspace::expr::Expr;
use superanalysis::susyqm::{self, MetricData, Poly};
use superanalysis::weyl_dynamics::{
    analytic_from_expr, free_propagator_momentum, qi_fd, qi_solve, super_hamilton_flow, FlowConfig, FlowState, SuperHamiltonian, WeylSymbolParams,
};

const SEED_VAR: &str = "SUPERANALYSIS_SEED";

/// `println!` that exits quietly when the reader has gone away (`| head`).
macro_rules! say {
    ($($t:tt)*) => {
        if let Err(e) = writeln!(io::stdout().lock(), $($t)*) {
            stdout_failed(e)
        }
    };
}

fn stdout_failed(e: io::Error) -> ! {
    if e.kind() == io::ErrorKind::BrokenPipe {
        std::process::exit(0);
    }
    eprintln!("error: write failed: {e}");
    std::process::exit(1)
}

#[derive(Parser)]
#[command(name = "superanalysis", version, about = "Finite-generator superanalysis: demos, tables and self-checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Supernumber arithmetic on JSON operands.
    #[command(subcommand)]
    Algebra(AlgebraCmd),
    /// Supermatrices: random samples and the Liouville identity.
    #[command(subcommand)]
    Linalg(LinalgCmd),
    /// Berezin integration demos.
    #[command(subcommand)]
    Berezin(BerezinCmd),
    /// Odd Fourier transform of a polynomial in n odd variables.
    #[command(subcommand)]
    Fourier(FourierCmd),
    /// Weyl propagator and super-Hamilton flows.
    #[command(subcommand)]
    Weyl(WeylCmd),
    /// Weakly hyperbolic equation: closed form against finite differences.
    #[command(subcommand)]
    Qi(QiCmd),
    /// GUE densities, edge scaling and sampling.
    #[command(subcommand)]
    Rmt(RmtCmd),
    /// Supersymmetric quantum mechanics.
    #[command(subcommand)]
    Susy(SusyCmd),
    /// Run the acceptance suite; exits 1 if any criterion fails.
    Selftest {
        /// Run only this criterion (1-based).
        #[arg(long)]
        only: Option<usize>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum AlgebraCmd {
    Mul { a: String, b: String },
    Inverse { a: String },
    Exp { a: String },
    /// A random supernumber in Λ_L.
    Random {
        #[arg(long, default_value_t = 4)]
        l: u32,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Subcommand)]
enum LinalgCmd {
    /// A random even (m|n) supermatrix with its str, sdet and inverse check.
    Random {
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        l: u32,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// sdet X(t) against exp ∫ str M for a fixed (1|1) example.
    Liouville {
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
    },
}

#[derive(Subcommand)]
enum BerezinCmd {
    /// The shear counterexample on (0, 1): naive change of variables against the FSM integral.
    DemoCounterexample {
        #[arg(long, default_value = "q")]
        phi: String,
        #[arg(long, default_value = "q")]
        u0: String,
        #[arg(long, default_value = "1")]
        u1: String,
        #[arg(long, default_value_t = 16)]
        nodes: usize,
    },
    /// The Gaussian integral over the Q-matrix, directly and after diagonalizing.
    QGaussian {
        #[arg(long, default_value_t = 40)]
        nodes: usize,
    },
}

#[derive(Subcommand)]
enum FourierCmd {
    /// Coefficients as `mask:re[:im]`, comma separated; bit j-1 of the mask is θ_j.
    Transform {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        coeffs: String,
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        #[arg(long, default_value_t = 0.0)]
        kappa_im: f64,
        /// Apply the inverse transform instead.
        #[arg(long)]
        inverse: bool,
    },
}

#[derive(Subcommand)]
enum WeylCmd {
    /// The 2×2 propagator in momentum space, from classical quantities and in closed form.
    Propagate {
        #[arg(long)]
        t: f64,
        /// Momentum `p1,p2,p3`.
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
    },
    /// Integrate the electromagnetic Weyl flow with odd data θ = (σ1, σ2), π = (σ3, σ4).
    Flow {
        #[arg(long, default_value_t = 1.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, allow_hyphen_values = true, default_value = "0,0,0")]
        x: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0,0,1")]
        xi: String,
        /// Scalar potential in t, q1, q2, q3.
        #[arg(long, default_value = "0")]
        a0: String,
        /// Vector potential components, comma separated.
        #[arg(long, default_value = "0,0,0")]
        a: String,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 1.0)]
        e: f64,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
    },
}

#[derive(Subcommand)]
enum QiCmd {
    /// Closed form against finite differences for Gaussian data e^{-q²}.
    Solve {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = -8.0, allow_hyphen_values = true)]
        qmin: f64,
        #[arg(long, default_value_t = 8.0)]
        qmax: f64,
        #[arg(long, default_value_t = 2000)]
        nq: usize,
        #[arg(long, default_value_t = 1000)]
        nt: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
#[allow(non_snake_case)]
enum RmtCmd {
    /// Exact density against the semicircle and the refined law.
    Density {
        #[arg(long = "N")]
        N: usize,
        #[arg(long = "J", default_value_t = 1.0)]
        J: f64,
        #[arg(long, allow_hyphen_values = true)]
        lmin: f64,
        #[arg(long, allow_hyphen_values = true)]
        lmax: f64,
        #[arg(long, default_value_t = 101)]
        steps: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Scaled edge density against the Airy profile.
    Edge {
        #[arg(long = "N")]
        N: usize,
        #[arg(long = "J", default_value_t = 1.0)]
        J: f64,
        #[arg(long, allow_hyphen_values = true, default_value = "-2,-1,0,1,2")]
        z: String,
    },
    /// Sample GUE spectra; reports the histogram and the KS distance to the exact CDF.
    Sample {
        #[arg(long = "N")]
        N: usize,
        #[arg(long = "J", default_value_t = 1.0)]
        J: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 60)]
        bins: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// The double-integral representation against the closed form.
    Brezin {
        #[arg(long = "N")]
        N: usize,
        #[arg(long = "J", default_value_t = 1.0)]
        J: f64,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
    },
}

#[derive(Subcommand)]
enum SusyCmd {
    /// Heat-kernel supertrace of the d-dimensional oscillator.
    Witten {
        #[arg(long, allow_hyphen_values = true)]
        omegas: String,
        #[arg(long)]
        t: f64,
    },
    /// Kernel dimensions of A = d/dq + φ for polynomial φ (coefficients from degree 0).
    Index {
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
    },
    /// The supersymmetric extension at a point, with θ_i = σ_i and π_i = σ_{d+i}.
    Extend {
        /// Metric rows separated by `;`, entries by `,`, in q1..qd.
        #[arg(long)]
        metric: String,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Momentum ξ; zero by default.
        #[arg(long, allow_hyphen_values = true)]
        momentum: Option<String>,
        #[arg(long, default_value = "")]
        potential: String,
        #[arg(long, default_value = "0")]
        w: String,
    },
    /// Supercharge and energy drift along the flat flow.
    Drift {
        #[arg(long, default_value = "0.65*q^2")]
        w: String,
        #[arg(long, default_value = "0")]
        a: String,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| Error::Parse(format!("{SEED_VAR} must be an unsigned integer, got {v:?}"))),
        Err(_) => Ok(0),
    }
}

fn floats(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("not a number: {t:?}")))).collect()
}

fn triple(s: &str) -> Result<[f64; 3]> {
    floats(s)?.try_into().map_err(|v: Vec<f64>| Error::ShapeMismatch(format!("expected 3 components, got {}", v.len())))
}

fn print_json(v: &serde_json::Value) {
    say!("{}", serde_json::to_string_pretty(v).expect("values serialize"));
}

fn output(csv: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match csv {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| Error::Domain(format!("cannot create {}: {e}", path.display())))?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn io_err(e: io::Error) -> Error {
    if e.kind() == io::ErrorKind::BrokenPipe {
        stdout_failed(e);
    }
    Error::Domain(format!("write failed: {e}"))
}

fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Algebra(c) => algebra(c)?,
        Command::Linalg(c) => linalg(c)?,
        Command::Berezin(c) => berezin(c)?,
        Command::Fourier(c) => fourier(c)?,
        Command::Weyl(c) => weyl(c)?,
        Command::Qi(c) => qi(c)?,
        Command::Rmt(c) => rmt_cmd(c)?,
        Command::Susy(c) => susy(c)?,
        Command::Selftest { only, json } => return Ok(run_selftest(only, json)),
    }
    Ok(ExitCode::SUCCESS)
}

fn run_selftest(only: Option<usize>, json: bool) -> ExitCode {
    let results = match only {
        Some(id) => match selftest::run_one(id) {
            Some(r) => vec![r],
            None => {
                eprintln!("error: criterion must be in 1..={}", selftest::criterion_count());
                return ExitCode::from(2);
            }
        },
        None => selftest::run_all(),
    };
    if json {
        say!("{}", serde_json::to_string_pretty(&results).expect("results serialize"));
    } else {
        for r in &results {
            say!("{r}");
        }
    }
    if results.iter().all(|r| r.passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn algebra(c: AlgebraCmd) -> Result<()> {
    let out = match c {
        AlgebraCmd::Mul { a, b } => {
            let (a, b) = (Supernumber::from_json(&a)?, Supernumber::from_json(&b)?);
            &a * &b
        }
        AlgebraCmd::Inverse { a } => Supernumber::from_json(&a)?.inverse()?,
        AlgebraCmd::Exp { a } => Supernumber::from_json(&a)?.exp(),
        AlgebraCmd::Random { l, density, seed: s } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed(s)?);
            random_supernumber(&mut rng, l, None, density)
        }
    };
    say!("{}", out.to_json());
    Ok(())
}

fn linalg(c: LinalgCmd) -> Result<()> {
    match c {
        LinalgCmd::Random { m, n, l, seed: s } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed(s)?);
            let a = random_even(&mut rng, m, n, l, 2.0);
            let inv = a.inverse()?;
            let check = a.mul(&inv)?.max_diff(&Supermatrix::identity(m, n, l));
            print_json(&json!({
                "matrix": serde_json::from_str::<serde_json::Value>(&a.to_json()).expect("valid JSON"),
                "str": a.str()?,
                "sdet": a.sdet()?,
                "inverse_residual": check,
            }));
        }
        LinalgCmd::Liouville { t, h } => {
            let l = 4;
            let mono = |mask: u32, c: f64| Supernumber::monomial(l, mask, c).expect("mask fits");
            let m_of_t = |s: f64| {
                let a = Supernumber::scalar(l, 0.2 * s) + mono(0b11, s);
                let c = mono(0b1, 1.0) + mono(0b100, 0.5 * s);
                let d = mono(0b10, s.cos()) + mono(0b1000, 1.0);
                let b = Supernumber::scalar(l, -0.1) + mono(0b1100, s * s);
                Supermatrix::new(1, 1, 1, 1, MatrixParity::Even, vec![a, c, d, b]).expect("even by construction")
            };
            let (lhs, rhs) = sdet_flow_check(&m_of_t, t, h)?;
            print_json(&json!({ "sdet": lhs, "exp_int_str": rhs, "max_diff": lhs.max_diff(&rhs) }));
        }
    }
    Ok(())
}

fn berezin(c: BerezinCmd) -> Result<()> {
    match c {
        BerezinCmd::DemoCounterexample { phi, u0, u1, nodes } => {
            let r = shear_counterexample(&Expr::parse(&phi)?, &Expr::parse(&u0)?, &Expr::parse(&u1)?, (0.0, 1.0), nodes)?;
            say!("{:<28} {:>16}", "quantity", "value");
            for (name, v) in [
                ("naive, original coords", r.naive_direct),
                ("naive, pulled back", r.naive_pullback),
                ("pulled back - original", r.naive_pullback - r.naive_direct),
                ("boundary term [phi u0]", r.boundary_term),
                ("FSM, original coords", r.fsm_direct),
                ("FSM, pulled back", r.fsm_pullback),
            ] {
                say!("{name:<28} {:>16.12}", v.re);
            }
        }
        BerezinCmd::QGaussian { nodes } => {
            let r = q_gaussian(nodes)?;
            say!("{:<28} {:>16}", "route", "value");
            say!("{:<28} {:>16.12}", "direct", r.direct.re);
            say!("{:<28} {:>16.12}", "naive after diagonalizing", r.naive_diagonal.re);
            say!("{:<28} {:>16.12}", "FSM after diagonalizing", r.fsm_diagonal.re);
        }
    }
    Ok(())
}

fn fourier(c: FourierCmd) -> Result<()> {
    let FourierCmd::Transform { n, coeffs, kappa, kappa_im, inverse } = c;
    let mut terms = Vec::new();
    for item in coeffs.split(',').filter(|s| !s.trim().is_empty()) {
        let parts: Vec<&str> = item.trim().split(':').collect();
        let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad coefficient {item:?}")));
        let (mask, re, im) = match parts.as_slice() {
            [m, re] => (m, num(re)?, 0.0),
            [m, re, im] => (m, num(re)?, num(im)?),
            _ => return Err(Error::Parse(format!("expected mask:re[:im], got {item:?}"))),
        };
        let mask: u32 = mask.parse().map_err(|_| Error::Parse(format!("bad mask in {item:?}")))?;
        terms.push((mask, Supernumber::scalar(0, C64::new(re, im))));
    }
    let v = OddPolynomial::from_coeffs(0, n, terms)?;
    let cfg = OddFourierConfig::new(n, C64::new(kappa, kappa_im))?;
    let w = if inverse { fo_bar(&v, &cfg)? } else { fo(&v, &cfg)? };
    let out: Vec<_> = (0..1u32 << n)
        .filter_map(|a| {
            let c = w.coefficient(a).body();
            (c.norm() > 0.0).then(|| json!({ "mask": a, "re": c.re, "im": c.im }))
        })
        .collect();
    print_json(&json!({ "n": n, "inverse": inverse, "terms": out }));
    Ok(())
}

fn weyl(c: WeylCmd) -> Result<()> {
    match c {
        WeylCmd::Propagate { t, p, c, hbar } => {
            let mom = triple(&p)?;
            let params = WeylSymbolParams::new(c, hbar, hbar)?;
            let classical = params.propagator_from_classical(t, mom)?;
            let closed = free_propagator_momentum(t, mom, c, hbar);
            let grid = |m: &nalgebra::Matrix2<C64>| (0..2).map(|i| (0..2).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect::<Vec<_>>()).collect::<Vec<_>>();
            let diff = (classical - closed).iter().map(|z| z.norm()).fold(0.0, f64::max);
            print_json(&json!({ "from_classical": grid(&classical), "closed_form": grid(&closed), "max_diff": diff }));
        }
        WeylCmd::Flow { t_end, step, x, xi, a0, a, c, e, hbar } => {
            let vars = ["t", "q1", "q2", "q3"];
            let parse = |s: &str| Expr::parse_with(s.trim(), &vars);
            let pots: Vec<Expr> = a.split(',').map(parse).collect::<Result<_>>()?;
            let pots: [Expr; 3] = pots.try_into().map_err(|v: Vec<Expr>| Error::ShapeMismatch(format!("vector potential needs 3 components, got {}", v.len())))?;
            let h = SuperHamiltonian::em_weyl(c, e, hbar, pots, parse(&a0)?)?;
            let l = 4;
            let scalars = |v: [f64; 3]| v.iter().map(|&s| Supernumber::scalar(l, s)).collect::<Vec<_>>();
            let g = |j| Supernumber::generator(l, j);
            let init = FlowState::new(0.0, scalars(triple(&x)?), scalars(triple(&xi)?), vec![g(1)?, g(2)?], vec![g(3)?, g(4)?])?;
            let traj = super_hamilton_flow(&h, &init, &FlowConfig::new(t_end, step))?;
            let h0 = h.value(&init)?;
            let last = traj.last().expect("final state is kept");
            print_json(&json!({ "final": last, "energy": h.value(last)?, "energy_change": h.value(last)?.max_diff(&h0) }));
        }
    }
    Ok(())
}

fn qi(c: QiCmd) -> Result<()> {
    let QiCmd::Solve { k, t, qmin, qmax, nq, nt, csv } = c;
    let (q, v_fd) = qi_fd(k, &|x| (-x * x).exp(), t, qmin, qmax, nq, nt)?;
    let exact = qi_solve(k, &analytic_from_expr(&Expr::parse("exp(-q^2)")?), t, &q)?;
    let mut out = output(csv.as_deref())?;
    writeln!(out, "q,v_formula,v_fd,abs_err").map_err(io_err)?;
    for ((q, v), f) in q.iter().zip(&exact.v).zip(&v_fd) {
        writeln!(out, "{q},{:e},{f:e},{:e}", v.re, (v.re - f).abs()).map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

#[allow(non_snake_case)]
fn rmt_cmd(c: RmtCmd) -> Result<()> {
    match c {
        RmtCmd::Density { N, J, lmin, lmax, steps, csv } => {
            if steps < 2 || !(lmax > lmin) {
                return Err(Error::Domain("need steps >= 2 and lmax > lmin".into()));
            }
            let p = GueParams::new(N, J)?;
            let mut out = output(csv.as_deref())?;
            writeln!(out, "lambda,exact,semicircle,refined,abs_err").map_err(io_err)?;
            for i in 0..steps {
                let l = lmin + (lmax - lmin) * i as f64 / (steps - 1) as f64;
                let exact = rmt::density_exact(&p, l);
                let semi = rmt::semicircle(l, J);
                // The refined law only exists strictly inside the bulk; outside it both columns stay empty.
                let (refined, err) = match rmt::refined_density(&p, l) {
                    Ok(r) => (format!("{r:e}"), format!("{:e}", (exact - r).abs())),
                    Err(_) => (String::new(), String::new()),
                };
                writeln!(out, "{l},{exact:e},{semi:e},{refined},{err}").map_err(io_err)?;
            }
            out.flush().map_err(io_err)?;
        }
        RmtCmd::Edge { N, J, z } => {
            let p = GueParams::new(N, J)?;
            let rows: Vec<_> = floats(&z)?.into_iter().map(|z| rmt::edge_density(&p, z)).collect();
            print_json(&json!({ "params": p, "points": rows }));
        }
        RmtCmd::Sample { N, J, samples, bins, seed: s } => {
            let p = GueParams::new(N, J)?;
            let sample = rmt::gue_sample(&p, samples, bins, seed(s)?)?;
            let ks = rmt::ks_distance(&sample.eigenvalues, &p);
            print_json(&json!({
                "params": p,
                "seed": sample.seed,
                "histogram": sample.histogram,
                "ks_distance": ks,
                "ks_critical_1pct": rmt::ks_critical_1pct(sample.eigenvalues.len()),
            }));
        }
        RmtCmd::Brezin { N, J, lambda } => {
            let p = GueParams::new(N, J)?;
            let via = rmt::brezin_cross_check(&p, lambda, &rmt::brezin_quad(&p))?;
            let exact = rmt::density_exact(&p, lambda);
            print_json(&json!({ "lambda": lambda, "double_integral": via, "exact": exact, "abs_err": (via - exact).abs() }));
        }
    }
    Ok(())
}

fn susy(c: SusyCmd) -> Result<()> {
    match c {
        SusyCmd::Witten { omegas, t } => {
            let omegas = floats(&omegas)?;
            let s = susyqm::witten_supertrace(&omegas, t)?;
            print_json(&json!({ "omegas": omegas, "t": t, "supertrace": s }));
        }
        SusyCmd::Index { phi } => {
            let phi = Poly::new(floats(&phi)?);
            let rec = susyqm::kernel_dims(&phi);
            let f = susyqm::susy_factorize(&phi);
            print_json(&json!({
                "phi": phi.to_string(),
                "A*A": f.h_minus.to_string(),
                "AA*": f.h_plus.to_string(),
                "index": rec,
            }));
        }
        SusyCmd::Extend { metric, point, momentum, potential, w } => {
            let data = MetricData::parse(&metric, &potential, &w)?;
            let d = data.dim();
            let q = floats(&point)?;
            let p = match momentum {
                Some(m) => floats(&m)?,
                None => vec![0.0; d],
            };
            if q.len() != d || p.len() != d {
                return Err(Error::ShapeMismatch(format!("point and momentum need {d} components")));
            }
            let l = 2 * d as u32;
            let x: Vec<_> = q.iter().map(|&v| Supernumber::scalar(l, v)).collect();
            let xi: Vec<_> = p.iter().map(|&v| Supernumber::scalar(l, v)).collect();
            let theta = (1..=d).map(|j| Supernumber::generator(l, j)).collect::<Result<Vec<_>>>()?;
            let pi = (1..=d).map(|j| Supernumber::generator(l, d + j)).collect::<Result<Vec<_>>>()?;
            let h = susyqm::susy_extension(&data, &x, &xi, &theta, &pi)?;
            say!("{}", h.to_json());
        }
        SusyCmd::Drift { w, a, t, step } => {
            let l = 2;
            let s1 = Supernumber::generator(l, 1)?;
            let s2 = Supernumber::generator(l, 2)?;
            let s12 = &s1 * &s2;
            let init = FlowState::new(0.0, vec![s12.scale(0.1).add_scalar(0.3)], vec![s12.scale(-0.2).add_scalar(0.2)], vec![&s1 + &s2.scale(0.5)], vec![s1.scale(0.4) - &s2])?;
            let cfg = FlowConfig::new(t, step).with_odd_scale(susyqm::SUPERCHARGE_ODD_SCALE);
            let rep = susyqm::supercharge_drift(&Expr::parse(&a)?, &Expr::parse(&w)?, &init, &cfg)?;
            print_json(&json!(rep));
        }
    }
    Ok(())
}
