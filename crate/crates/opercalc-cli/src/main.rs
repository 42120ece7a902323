use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use opercalc::env::{fmt_monomial, lstorto, sugawara1, sugawara2, Algebra, EnvElement};
use opercalc::opers::{
    coord_expand, f_lambda, factor_rational, hyper_oper, p_lambda, rational_coeffs, weight_of, CoordVar, OperPoly,
    Side,
};
use opercalc::verify::{reports_json, run_suite, Suite, VerifyOptions};

#[derive(Parser)]
#[command(name = "opercalc", version, about = "Exact computations with two-point opers and Sugawara operators")]
struct Cli {
    /// Emit JSON instead of text
    #[arg(long, global = true)]
    json: bool,
    /// Seed for suites with random inputs
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (1 runs sequentially)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Record per-case wall time (reports are then no longer reproducible)
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one object and print it
    Compute {
        #[command(subcommand)]
        object: Object,
    },
    /// Run a verification suite
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum Object {
    /// Equation of the one-point oper space of weight λ
    Plambda {
        #[arg(long)]
        lambda: i64,
    },
    /// Diagonal restriction of the t-side equation, as a polynomial in z[-2]
    Flambda {
        #[arg(long)]
        lambda: i64,
        #[arg(long)]
        mu: i64,
        /// Print the leading coefficient and roots instead
        #[arg(long)]
        factored: bool,
    },
    /// One-variable Sugawara operator of doubled index k2
    Sugawara1 {
        #[arg(long)]
        k2: i64,
        #[arg(long)]
        level: i64,
    },
    /// Two-variable Sugawara operator of doubled index k2
    Sugawara2 {
        #[arg(long)]
        k2: i64,
        #[arg(long)]
        level: i64,
    },
    /// Two-variable operator built from the one-variable fields
    Lstorto {
        #[arg(long)]
        k2: i64,
        #[arg(long)]
        level: i64,
    },
    /// Hypergeometric point attached to (λ, μ, ν)
    Hyper {
        #[arg(long)]
        lambda: i64,
        #[arg(long)]
        mu: i64,
        #[arg(long)]
        nu: i64,
    },
    /// A one-point coordinate written in two-point coordinates
    Coordmap {
        #[arg(long, value_enum)]
        side: SideArg,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[arg(long, default_value_t = 2)]
        floor: i64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    T,
    S,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name, or `all`
    suite: String,
    #[arg(long)]
    max_weight: Option<i64>,
    #[arg(long)]
    kmax: Option<i64>,
    #[arg(long)]
    level: Option<i64>,
    /// Smaller ranges where a suite allows it
    #[arg(long)]
    quick: bool,
}

enum Failure {
    Invalid(String),
    Internal(String),
    ChecksFailed,
}

fn invalid(e: impl ToString) -> Failure {
    Failure::Invalid(e.to_string())
}

fn internal(e: impl ToString) -> Failure {
    Failure::Internal(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match &cli.command {
        Command::Compute { object } => compute(object, cli.json).map(|out| println!("{out}")),
        Command::Verify(args) => verify(args, &cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::ChecksFailed) => ExitCode::from(1),
        Err(Failure::Internal(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn element_json(x: &EnvElement) -> Value {
    let terms: Vec<Value> = x
        .terms()
        .map(|(m, c)| json!({ "monomial": fmt_monomial(x.algebra(), m), "coefficient": EnvElement::scalar(x.algebra(), c.clone()).to_string() }))
        .collect();
    json!({ "schema": 1, "level": x.level(), "terms": terms })
}

fn render_element(x: &EnvElement, as_json: bool) -> String {
    if as_json {
        element_json(x).to_string()
    } else {
        x.to_string()
    }
}

fn render_poly(p: &OperPoly, as_json: bool) -> String {
    if as_json {
        json!({ "schema": 1, "polynomial": p.to_string() }).to_string()
    } else {
        p.to_string()
    }
}

fn non_negative(name: &str, v: i64) -> Result<(), Failure> {
    if v < 0 {
        Err(invalid(format!("--{name} must be non-negative")))
    } else {
        Ok(())
    }
}

fn compute(object: &Object, as_json: bool) -> Result<String, Failure> {
    match *object {
        Object::Plambda { lambda } => {
            non_negative("lambda", lambda)?;
            Ok(render_poly(&p_lambda(lambda), as_json))
        }
        Object::Flambda { lambda, mu, factored } => {
            non_negative("lambda", lambda)?;
            non_negative("mu", mu)?;
            let f = f_lambda(lambda, mu).map_err(invalid)?;
            if !factored {
                return Ok(render_poly(&f, as_json));
            }
            let z = CoordVar::z(-2);
            let coeffs = rational_coeffs(&f.univariate(z).map_err(internal)?).map_err(internal)?;
            let fac = factor_rational(&coeffs).map_err(internal)?;
            let roots: Vec<String> = fac.roots.iter().rev().map(|r| r.to_string()).collect();
            let weights: Vec<Option<i64>> = fac.roots.iter().rev().map(weight_of).collect();
            if as_json {
                let cofactor: Vec<String> = fac.cofactor.iter().map(|c| c.to_string()).collect();
                Ok(json!({ "schema": 1, "leading": fac.leading.to_string(), "roots": roots, "weights": weights, "cofactor": cofactor })
                    .to_string())
            } else {
                let named: Vec<String> = roots
                    .iter()
                    .zip(&weights)
                    .map(|(r, w)| match w {
                        Some(w) => format!("{r} (A_{w})"),
                        None => r.clone(),
                    })
                    .collect();
                Ok(format!("leading: {}\nroots: {{{}}}\n{}", fac.leading, roots.join(", "), named.join("\n")))
            }
        }
        Object::Sugawara1 { k2, level } => {
            let x = sugawara1(Algebra::One, k2, 2 * level).map_err(invalid)?;
            Ok(render_element(&x, as_json))
        }
        Object::Sugawara2 { k2, level } => Ok(render_element(&sugawara2(k2, 2 * level), as_json)),
        Object::Lstorto { k2, level } => {
            let x = lstorto(k2, 2 * level).map_err(invalid)?;
            Ok(render_element(&x, as_json))
        }
        Object::Hyper { lambda, mu, nu } => {
            let p = hyper_oper(lambda, mu, nu).map_err(invalid)?;
            if as_json {
                let coords: Vec<Value> = p
                    .coords
                    .iter()
                    .map(|(i, (a, b))| json!({ "index": i, "u": a.to_string(), "v": b.to_string() }))
                    .collect();
                Ok(json!({ "schema": 1, "coordinates": coords, "function": p.to_fun().to_string() }).to_string())
            } else {
                Ok(p.to_string())
            }
        }
        Object::Coordmap { side, n, floor } => {
            non_negative("floor", floor)?;
            let side = match side {
                SideArg::T => Side::T,
                SideArg::S => Side::S,
            };
            Ok(render_poly(&coord_expand(side, n, floor), as_json))
        }
    }
}

fn verify(args: &VerifyArgs, cli: &Cli) -> Result<(), Failure> {
    let suites: Vec<Suite> = if args.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![Suite::from_name(&args.suite).ok_or_else(|| invalid(format!("unknown suite `{}`", args.suite)))?]
    };
    let opts = VerifyOptions {
        seed: cli.seed,
        quick: args.quick,
        timings: cli.timings,
        max_weight: args.max_weight,
        kmax: args.kmax,
        level: args.level,
    };
    let reports: Vec<_> = suites.into_iter().map(|s| run_suite(s, &opts)).collect();
    if cli.json {
        let text = serde_json::to_string_pretty(&reports_json(&reports)).map_err(internal)?;
        println!("{text}");
    } else {
        for r in &reports {
            print!("{}", r.render_text());
        }
    }
    if reports.iter().all(|r| r.passed()) {
        Ok(())
    } else {
        Err(Failure::ChecksFailed)
    }
}
