use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use qsphere::arith::Var;
use qsphere::cotangent::{Cotangent, Membership, ModuleElement, Side};
use qsphere::model::{check_generic_q, Model, Params};
use qsphere::parse::parse_expression;
use qsphere::sphere::Sphere;
use qsphere::symmetry::Placement;
use qsphere::tensor::{Space, TensorElement};
use qsphere::verify::{self, table, Config, Profile};

/// Directory for `verify` reports when `--json` is not given.
const REPORT_DIR_ENV: &str = "QSPHERE_REPORT_DIR";

#[derive(Parser)]
#[command(
    name = "qsphere",
    version,
    about = "Exact computations on the quantum sphere and its cotangent modules"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct Bindings {
    /// Bind q to an exact rational such as 3/2 (symbolic by default).
    #[arg(long, value_parser = parse_q, allow_hyphen_values = true)]
    q: Option<BigRational>,
    /// Bind c to a non-zero exact rational (symbolic by default).
    #[arg(long, value_parser = parse_c, allow_hyphen_values = true)]
    c: Option<BigRational>,
}

impl Bindings {
    fn params(&self) -> Params {
        let mut p = Params::symbolic();
        if let Some(q) = &self.q {
            p = p.with_q(q);
        }
        if let Some(c) = &self.c {
            p = p.with_c(c);
        }
        p
    }

    fn model(&self) -> Result<Model, String> {
        Model::new(self.params()).map_err(|e| e.to_string())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification checks and report their status.
    Verify {
        /// Run only this check (repeatable).
        #[arg(long = "check", value_name = "NAME")]
        checks: Vec<String>,
        /// `default` or `quick`.
        #[arg(long, default_value = "default")]
        profile: String,
        /// Write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Override the filtration degree used for membership tests.
        #[arg(long)]
        filtration: Option<u32>,
        /// List the available checks and exit.
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        bind: Bindings,
    },
    /// Reduce an expression in the sphere algebra (or a one-sided module).
    NormalForm {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[command(flatten)]
        bind: Bindings,
    },
    /// Filtered dimensions for degrees 0..=N.
    DimSeries {
        #[arg(long)]
        max_degree: u32,
        #[arg(long, value_enum, default_value = "algebra")]
        module: ModuleKind,
        #[command(flatten)]
        bind: Bindings,
    },
    /// Images of the basis words under P0, P1, P2.
    ProjectorTable {
        /// V.V, V.V', V'.V or V'.V'.
        #[arg(long, default_value = "V.V'", value_parser = parse_placement)]
        placement: Placement,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Print the closed-form entries with their check instead.
        #[arg(long)]
        named: bool,
        #[command(flatten)]
        bind: Bindings,
    },
    /// Decide whether an element lies in the submodule generated by the
    /// spin-0 relation, up to a filtration degree.
    Membership {
        #[arg(long, value_enum)]
        side: SideArg,
        #[arg(long)]
        degree: u32,
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[command(flatten)]
        bind: Bindings,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModuleKind {
    Algebra,
    Right,
    Left,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Right,
    Left,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Right => Side::Right,
            SideArg::Left => Side::Left,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn parse_rational(s: &str) -> Result<BigRational, String> {
    BigRational::from_str(s.trim()).map_err(|_| format!("'{}' is not an exact rational (use forms like 3/2 or -2)", s))
}

fn parse_q(s: &str) -> Result<BigRational, String> {
    let q = parse_rational(s)?;
    check_generic_q(&q).map_err(|e| e.to_string())?;
    Ok(q)
}

fn parse_c(s: &str) -> Result<BigRational, String> {
    let c = parse_rational(s)?;
    if c == BigRational::from_integer(0.into()) {
        return Err("c must be non-zero".into());
    }
    Ok(c)
}

fn parse_placement(s: &str) -> Result<Placement, String> {
    Placement::from_name(s).ok_or_else(|| format!("unknown placement '{}'; use V.V, V.V', V'.V or V'.V'", s))
}

fn bound_expression(text: &str, params: &Params) -> Result<TensorElement, String> {
    let x = parse_expression(text).map_err(|e| format!("{}\n  {}", e, text))?;
    let mut b = BTreeMap::new();
    b.insert(Var::Q, params.q.clone());
    b.insert(Var::C, params.c.clone());
    x.try_map_coefficients(|c| c.substitute(&b)).map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Verify {
            checks,
            profile,
            json,
            filtration,
            list,
            bind,
        } => {
            if list {
                for name in verify::check_names() {
                    println!("{}", name);
                }
                return Ok(ExitCode::SUCCESS);
            }
            let mut profile = Profile::by_name(&profile)
                .ok_or_else(|| format!("unknown profile '{}'; use default or quick", profile))?;
            if let Some(f) = filtration {
                profile.filtration = f;
            }
            let mut config = Config::new(profile);
            config.params = bind.params();
            if !checks.is_empty() {
                config.checks = Some(checks);
            }
            let report = verify::run_all(&config).map_err(|e| e.to_string())?;
            print!("{}", report.summary());
            let path = json.or_else(|| std::env::var_os(REPORT_DIR_ENV).map(|d| PathBuf::from(d).join("report.json")));
            if let Some(path) = path {
                let text = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
                std::fs::write(&path, text + "\n").map_err(|e| format!("cannot write {}: {}", path.display(), e))?;
            }
            Ok(if report.all_verified() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::NormalForm { expr, bind } => {
            let model = bind.model()?;
            let x = bound_expression(&expr, &model.params)?;
            let sig = x.signature();
            if sig.iter().all(|s| *s == Space::Base) {
                let nf = model.sphere.reduce(&x).map_err(|e| e.to_string())?;
                println!("{}", nf);
            } else {
                let side = match (sig.first(), sig.last()) {
                    (Some(Space::Diff), _) => Side::Right,
                    (_, Some(Space::Diff)) => Side::Left,
                    _ => return Err("a module element needs its differential first or last".into()),
                };
                let m = ModuleElement::from_tensor(side, &model.sphere, &x).map_err(|e| e.to_string())?;
                println!("{}", m);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::DimSeries {
            max_degree,
            module,
            bind,
        } => {
            let dims: Vec<usize> = match module {
                ModuleKind::Algebra => (0..=max_degree).map(Sphere::filtered_dimension).collect(),
                ModuleKind::Right | ModuleKind::Left => {
                    let model = bind.model()?;
                    let side = if matches!(module, ModuleKind::Right) {
                        Side::Right
                    } else {
                        Side::Left
                    };
                    let cot = Cotangent::new(&model.sphere, &model.decomposition, side);
                    (0..=max_degree).map(|d| cot.filtered_dimension(d)).collect()
                }
            };
            let parts: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
            println!("{}", parts.join(", "));
            Ok(ExitCode::SUCCESS)
        }
        Command::ProjectorTable {
            placement,
            format,
            named,
            bind,
        } => {
            let model = bind.model()?;
            if named {
                let images = table::named_images(&model);
                let ok = images.iter().all(|i| i.matches());
                match format {
                    Format::Text => {
                        for i in &images {
                            println!(
                                "{} = {}  [{}]",
                                i.label,
                                i.computed,
                                if i.matches() { "ok" } else { "MISMATCH" }
                            );
                        }
                    }
                    Format::Json => {
                        let rows: Vec<_> = images
                            .iter()
                            .map(|i| {
                                serde_json::json!({
                                    "label": i.label,
                                    "computed": i.computed.to_string(),
                                    "expected": i.expected.to_string(),
                                    "matches": i.matches(),
                                })
                            })
                            .collect();
                        println!("{}", serde_json::to_string_pretty(&rows).map_err(|e| e.to_string())?);
                    }
                }
                return Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) });
            }
            let rows = table::full_table(&model, placement);
            match format {
                Format::Text => {
                    for r in &rows {
                        println!("P{}({}) = {}", r.spin, r.input, r.image);
                    }
                }
                Format::Json => println!("{}", serde_json::to_string_pretty(&rows).map_err(|e| e.to_string())?),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Membership {
            side,
            degree,
            expr,
            bind,
        } => {
            let model = bind.model()?;
            let x = bound_expression(&expr, &model.params)?;
            let side: Side = side.into();
            let m = ModuleElement::from_tensor(side, &model.sphere, &x).map_err(|e| e.to_string())?;
            let cot = Cotangent::new(&model.sphere, &model.decomposition, side);
            match cot.membership_test(&m, degree).map_err(|e| e.to_string())? {
                Membership::Member { g } => {
                    println!("member");
                    println!("g = {}", g);
                }
                Membership::NonMember { certificate } => {
                    let valid = certificate.validate(&cot.submodule_basis(degree), &m);
                    println!("non-member");
                    println!("certificate: {}", certificate);
                    println!("certificate re-validated: {}", valid);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(2)
        }
    }
}
