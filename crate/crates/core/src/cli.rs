//! Command-line runner. Every subcommand produces a report and an overall
//! pass flag; exit status is 0 when all verdicts pass, 2 when any fails and
//! 1 on input errors.

use std::f64::consts::PI;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimates::{
    corpus, counterexample_series, extended_case, global_energy_checks, global_estimate,
    harnack_corpus, interior_corpus, parse_cases, sobolev_check, ExperimentCase,
};
use crate::pde::{convergence_study, PolarGrid, SolverOptions};
use crate::rearrange::{
    atom_proxy_norm, direct_pairing, pairing_upper, rearrange, zygmund_modular, zygmund_norm,
    WeightedSamples,
};
use crate::report::{csv_table, emit_series, emit_verdicts, write_output, Format, Series};
use crate::surface::{Geometry, MetricProfile, SampledMetric, SurfaceQuadrature};
use crate::verdict::{all_pass, VerdictReport};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_INPUT_ERROR: i32 = 1;
pub const EXIT_FAIL: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "zygmund-lab",
    version,
    about = "Verification runner for estimates of Δu = gu + f with L ln L data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Seed for every random generator.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Relative residual tolerance of the linear solver (solve subcommand).
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Relative headroom on measured constants.
    #[arg(long, global = true, default_value_t = 0.2)]
    pub headroom: f64,
    /// json | csv | svg
    #[arg(long, global = true, default_value = "json")]
    pub format: String,
    /// Report destination; stdout when absent.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Radial quadrature nodes for surface integrals.
    #[arg(long, global = true, default_value_t = 512)]
    pub radial_nodes: usize,
    /// Angular quadrature nodes for surface integrals.
    #[arg(long, global = true, default_value_t = 256)]
    pub angular_nodes: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Volume and length bounds of geodesic balls.
    VerifyGeometry {
        /// flat | sphere | hyperbolic | perturbed:ε
        #[arg(long, default_value = "flat")]
        metric: String,
        /// Sampled metric JSON; overrides --metric.
        #[arg(long)]
        metric_file: Option<PathBuf>,
        /// Isoperimetric constant; defaults to max(A_iso, A_curv).
        #[arg(long = "A")]
        a: Option<f64>,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, value_delimiter = ',')]
        radii: Vec<f64>,
    },
    /// Rearrangement and Zygmund-norm checks on a sample file.
    VerifyNorms {
        #[arg(long)]
        input: PathBuf,
        /// Domain measure; defaults to the total sample measure.
        #[arg(long)]
        domain: Option<f64>,
    },
    /// Solves every case of a case file.
    Solve {
        #[arg(long)]
        cases: PathBuf,
    },
    /// Interior-estimate ratios over a corpus.
    Interior {
        #[arg(long)]
        cases: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Harnack ratios over a case file or the spike family.
    Harnack {
        #[arg(long)]
        cases: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "8,12,16,24,32,48,64")]
        ks: Vec<u32>,
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Maximum-principle, John–Nirenberg, energy and Sobolev checks.
    Global {
        #[arg(long)]
        cases: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long)]
        resolution: Option<usize>,
        /// Isoperimetric constant; defaults to the measured A_iso on B₂.
        #[arg(long = "A")]
        a: Option<f64>,
        /// Cutoff ladder indices, e.g. 2,4,8,16.
        #[arg(long, value_delimiter = ',')]
        ladder: Vec<u32>,
        /// Random zero-boundary draws for the Sobolev check.
        #[arg(long, default_value_t = 50)]
        draws: usize,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
        q: Vec<f64>,
    },
    /// Logarithmic blow-up of the counterexample family.
    Counterexample {
        #[arg(long, default_value_t = 16)]
        kmin: u32,
        #[arg(long, default_value_t = 256)]
        kmax: u32,
    },
    /// Manufactured-solution convergence order.
    Convergence {
        /// flat | sphere
        #[arg(long, default_value = "flat")]
        metric: String,
        #[arg(long, value_delimiter = ',', default_value = "32,64,128")]
        resolutions: Vec<usize>,
    },
    /// Re-emits a verdict JSON file in another format.
    Report {
        #[arg(long)]
        input: PathBuf,
    },
}

/// Rendered report, overall verdict and diagnostics for stderr.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub body: String,
    pub pass: bool,
    pub notes: Vec<String>,
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_cases(path: &Path) -> Result<Vec<ExperimentCase>> {
    parse_cases(&read_file(path)?).map_err(|e| match e {
        Error::Json { source, .. } => Error::Json {
            context: path.display().to_string(),
            source,
        },
        other => other,
    })
}

fn override_resolution(cases: Vec<ExperimentCase>, n: Option<usize>) -> Vec<ExperimentCase> {
    match n {
        Some(n) => cases
            .into_iter()
            .map(|c| {
                let n_theta =
                    ((n as f64 * c.n_theta as f64 / c.n_r as f64).round() as usize).max(8);
                c.with_resolution(n, n_theta)
            })
            .collect(),
        None => cases,
    }
}

/// JSON emits the full summary; CSV and SVG emit the verdict list.
fn verdict_outcome<T: Serialize>(
    summary: &T,
    verdicts: Vec<VerdictReport>,
    format: Format,
    extra_pass: bool,
) -> Result<Outcome> {
    let pass = extra_pass && all_pass(&verdicts);
    let body = match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(summary).map_err(|source| Error::Json {
                context: "summary".into(),
                source,
            })?;
            s.push('\n');
            s
        }
        f => emit_verdicts(&verdicts, f)?,
    };
    Ok(Outcome {
        body,
        pass,
        notes: Vec::new(),
    })
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Uniform-boundedness verdicts: `max ≤ 3·median` and `min ≥ median/3`.
pub fn spread_verdicts(name: &str, values: &[f64]) -> Vec<VerdictReport> {
    let m = median(values);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    vec![
        VerdictReport::check(format!("{name}_max_vs_median"), "", hi, 3.0 * m, 0.0),
        VerdictReport::at_least(format!("{name}_min_vs_median"), "", lo, m / 3.0, 0.0),
    ]
}

/// Powers of two times `kmin` up to `kmax`.
pub fn k_ladder(kmin: u32, kmax: u32) -> Vec<u32> {
    std::iter::successors(Some(kmin), |&k| k.checked_mul(2))
        .take_while(|&k| k <= kmax)
        .collect()
}

/// Measured `A_iso` of `metric` on geodesic balls up to `radius`.
pub fn measured_a_iso(metric: &MetricProfile, radius: f64) -> Result<f64> {
    let m = metric.with_r_max(radius)?;
    let radii: Vec<f64> = (1..=20).map(|i| radius * i as f64 / 20.0).collect();
    Ok(Geometry::new(&m).isoperimetric_constant(&radii, 2.0)?.a_iso)
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let format: Format = cli.format.parse()?;
    let quad = SurfaceQuadrature {
        radial: cli.radial_nodes,
        angular: cli.angular_nodes,
    };
    match &cli.command {
        Command::VerifyGeometry {
            metric,
            metric_file,
            a,
            p,
            radii,
        } => {
            let profile = match metric_file {
                Some(path) => {
                    MetricProfile::sampled(SampledMetric::from_json_str(&read_file(path)?)?)?
                }
                None => MetricProfile::from_name(metric, None)?,
            };
            let geo = Geometry::with_quadrature(&profile, quad);
            let limit = profile.r_max().min(1.0);
            let radii: Vec<f64> = if radii.is_empty() {
                (1..=10).map(|i| limit * i as f64 / 10.0).collect()
            } else {
                radii.clone()
            };
            let admissible: Vec<f64> = radii
                .iter()
                .copied()
                .filter(|&r| r > 0.0 && r <= limit)
                .collect();
            let estimate = if admissible.is_empty() {
                None
            } else {
                Some(geo.isoperimetric_constant(&admissible, p.max(1.0 + 1e-9))?)
            };
            let a = a
                .or(estimate.map(|e| e.admissible_constant()))
                .ok_or(Error::EmptyRadii)?;
            let check = geo.geometry_bounds_check(a, *p, &radii)?;
            #[derive(Serialize)]
            struct Summary<'a> {
                metric: String,
                a: f64,
                p: f64,
                estimate: Option<crate::surface::IsoperimetricEstimate>,
                check: &'a crate::surface::GeometryCheck,
            }
            let summary = Summary {
                metric: profile.name(),
                a,
                p: *p,
                estimate,
                check: &check,
            };
            let mut out = verdict_outcome(
                &summary,
                check.verdicts.clone(),
                format,
                !check.verdicts.is_empty(),
            )?;
            if let Some(msg) = &check.invalid_case {
                out.notes.push(format!("warning: invalid case: {msg}"));
            }
            Ok(out)
        }
        Command::VerifyNorms { input, domain } => {
            let f = WeightedSamples::from_json_str(&read_file(input)?)?;
            let domain = domain.unwrap_or_else(|| f.total_measure());
            let norm = zygmund_norm(&f, domain)?;
            let l1 = f.l1_norm();
            let profile = rearrange(&f);
            let doubled = zygmund_norm(&f.map_values(|v| 2.0 * v)?, domain)?;
            let abs = f.map_values(f64::abs)?;
            let verdicts = vec![
                VerdictReport::check(
                    "equimeasurable",
                    "",
                    (profile.integral() - l1).abs(),
                    1e-12 * l1.max(1.0),
                    0.0,
                ),
                VerdictReport::check(
                    "homogeneity",
                    "",
                    (doubled - 2.0 * norm).abs(),
                    1e-10 * norm.max(1.0),
                    0.0,
                ),
                VerdictReport::check(
                    "hardy_littlewood",
                    "",
                    direct_pairing(&f, &abs)?,
                    pairing_upper(&f, &abs)?,
                    1e-12,
                ),
            ];
            #[derive(Serialize)]
            struct Summary {
                samples: usize,
                total_measure: f64,
                domain: f64,
                zygmund_norm: f64,
                modular: f64,
                l1: f64,
                sup: f64,
                atom_proxy_norm: Option<f64>,
                verdicts: Vec<VerdictReport>,
            }
            let atom = if f.has_positions() {
                Some(atom_proxy_norm(&f)?.0)
            } else {
                None
            };
            let summary = Summary {
                samples: f.len(),
                total_measure: f.total_measure(),
                domain,
                zygmund_norm: norm,
                modular: zygmund_modular(&f),
                l1,
                sup: f.sup_abs(),
                atom_proxy_norm: atom,
                verdicts: verdicts.clone(),
            };
            verdict_outcome(&summary, verdicts, format, true)
        }
        Command::Solve { cases } => {
            let cases = load_cases(cases)?;
            let opts = SolverOptions {
                tol: cli.tol,
                ..SolverOptions::default()
            };
            #[derive(Serialize)]
            struct Record {
                id: String,
                n_r: usize,
                n_theta: usize,
                r_max: f64,
                converged: bool,
                iterations: usize,
                residual_norm: f64,
                values: Vec<f64>,
            }
            let records: Vec<Record> = cases
                .par_iter()
                .map(|c| {
                    let data = c.data()?;
                    let (u, report) = crate::pde::solve_dirichlet_with(
                        &data.grid,
                        &data.g,
                        &data.f,
                        &data.boundary,
                        opts,
                    )?;
                    Ok(Record {
                        id: c.id.clone(),
                        n_r: c.n_r,
                        n_theta: c.n_theta,
                        r_max: c.r_max,
                        converged: report.converged,
                        iterations: report.iterations,
                        residual_norm: report.residual_norm,
                        values: if report.converged {
                            u.values
                        } else {
                            Vec::new()
                        },
                    })
                })
                .collect::<Result<_>>()?;
            let verdicts: Vec<VerdictReport> = records
                .iter()
                .map(|r| {
                    let mut v = VerdictReport::check(
                        "solver_residual",
                        &r.id,
                        r.residual_norm,
                        cli.tol,
                        0.0,
                    );
                    v.pass &= r.converged;
                    v
                })
                .collect();
            let pass = all_pass(&verdicts);
            let body = match format {
                Format::Json => verdict_outcome(&records, verdicts, format, true)?.body,
                Format::Csv => {
                    #[derive(Serialize)]
                    struct Row<'a> {
                        case: &'a str,
                        r: f64,
                        theta: f64,
                        u: f64,
                    }
                    let mut rows = Vec::new();
                    for (rec, case) in records.iter().zip(&cases) {
                        let grid = case.grid()?;
                        for (k, &u) in rec.values.iter().enumerate() {
                            let (r, theta) = grid.polar(k);
                            rows.push(Row {
                                case: &rec.id,
                                r,
                                theta,
                                u,
                            });
                        }
                    }
                    csv_table(&rows)?
                }
                Format::Svg => emit_verdicts(&verdicts, format)?,
            };
            Ok(Outcome {
                body,
                pass,
                notes: Vec::new(),
            })
        }
        Command::Interior {
            cases,
            count,
            resolution,
        } => {
            let cases = match cases {
                Some(p) => override_resolution(load_cases(p)?, *resolution),
                None => corpus::interior_cases(*count, cli.seed, resolution.unwrap_or(32)),
            };
            let summary = interior_corpus(&cases);
            let verdicts = summary.verdicts(cli.headroom);
            let mut out = verdict_outcome(
                &summary,
                verdicts,
                format,
                summary.skipped.is_empty() && summary.measured_constant.is_finite(),
            )?;
            out.notes.extend(
                summary
                    .skipped
                    .iter()
                    .map(|id| format!("warning: case {id} failed to solve")),
            );
            Ok(out)
        }
        Command::Harnack {
            cases,
            ks,
            resolution,
        } => {
            let cases = match cases {
                Some(p) => override_resolution(load_cases(p)?, *resolution),
                None => corpus::harnack_spike_cases(ks, resolution.unwrap_or(128), [0.2, 0.1])?,
            };
            let summary = harnack_corpus(&cases)?;
            let ratios: Vec<f64> = summary.ratios.iter().map(|r| r.ratio).collect();
            let mut verdicts: Vec<VerdictReport> = summary
                .ratios
                .iter()
                .map(|r| {
                    VerdictReport::check(
                        "harnack",
                        &r.case,
                        r.ratio,
                        summary.measured_constant,
                        cli.headroom,
                    )
                })
                .collect();
            if !ratios.is_empty() {
                verdicts.extend(spread_verdicts("harnack_ratio", &ratios));
            }
            #[derive(Serialize)]
            struct Summary<'a> {
                summary: &'a crate::estimates::HarnackSummary,
                verdicts: &'a [VerdictReport],
            }
            let mut out = verdict_outcome(
                &Summary {
                    summary: &summary,
                    verdicts: &verdicts,
                },
                verdicts.clone(),
                format,
                !ratios.is_empty(),
            )?;
            out.notes.extend(
                summary
                    .discarded
                    .iter()
                    .map(|id| format!("note: case {id} discarded, solution changes sign")),
            );
            Ok(out)
        }
        Command::Global {
            cases,
            count,
            resolution,
            a,
            ladder,
            draws,
            q,
        } => {
            let cases = match cases {
                Some(p) => override_resolution(load_cases(p)?, *resolution),
                None => corpus::global_cases(*count, cli.seed, resolution.unwrap_or(32)),
            };
            let ladder = (!ladder.is_empty()).then_some(ladder.as_slice());
            #[derive(Serialize)]
            struct CaseResult {
                id: String,
                estimate: crate::estimates::GlobalEstimate,
                energy: crate::estimates::GlobalEnergy,
                a: f64,
            }
            let results: Vec<CaseResult> = cases
                .par_iter()
                .map(|c| {
                    let a = match a {
                        Some(a) => *a,
                        None => measured_a_iso(&c.metric_profile()?, 2.0 * c.r_max)?,
                    };
                    let estimate = global_estimate(c, ladder)?;
                    let v = extended_case(c).solve()?;
                    let energy = global_energy_checks(&v, a, 0.0)?;
                    Ok(CaseResult {
                        id: c.id.clone(),
                        estimate,
                        energy,
                        a,
                    })
                })
                .collect::<Result<_>>()?;
            let mut verdicts = Vec::new();
            for r in &results {
                verdicts.push(r.estimate.maximum_principle.clone());
                if let Some(l) = &r.estimate.ladder {
                    verdicts.push(l.cauchy.clone());
                    let mut tails = VerdictReport::check(
                        "cutoff_tail_exponent",
                        &r.id,
                        l.tail_exponent,
                        -0.5,
                        0.0,
                    );
                    tails.pass = l.tails_vanish;
                    verdicts.push(tails);
                }
                verdicts.extend(r.energy.verdicts().into_iter().cloned());
            }
            let sobolev = if *draws > 0 {
                let metric = MetricProfile::flat(1.0)?;
                let n = resolution.unwrap_or(32);
                let grid = PolarGrid::new(&metric, n, 2 * n, 1.0)?;
                let us = corpus::zero_boundary_draws(&grid, *draws, cli.seed);
                let a_flat = 1.0 / (4.0 * PI);
                let mut out = Vec::new();
                for (i, u) in us.iter().enumerate() {
                    for &qq in q {
                        let mut v = sobolev_check(&grid, u, qq, a_flat, 0.0)?;
                        v.case = format!("draw-{i:03}");
                        out.push(v);
                    }
                }
                out
            } else {
                Vec::new()
            };
            verdicts.extend(sobolev.iter().cloned());
            #[derive(Serialize)]
            struct Summary<'a> {
                cases: &'a [CaseResult],
                sobolev: &'a [VerdictReport],
            }
            verdict_outcome(
                &Summary {
                    cases: &results,
                    sobolev: &sobolev,
                },
                verdicts,
                format,
                true,
            )
        }
        Command::Counterexample { kmin, kmax } => {
            let ks = k_ladder(*kmin, *kmax);
            if ks.is_empty() {
                return Err(Error::InvalidCase(format!("no k in [{kmin}, {kmax}]")));
            }
            let series = counterexample_series(&ks)?;
            let pass = series.slope_paper > 0.0;
            let body = match format {
                Format::Json => verdict_outcome(&series, Vec::new(), format, true)?.body,
                Format::Csv => {
                    #[derive(Serialize)]
                    struct Row {
                        k: u32,
                        u0_paper: f64,
                        u0_standard: f64,
                        atom_size: f64,
                        min_radius: f64,
                        zygmund_norm: f64,
                        fitted_slope: f64,
                    }
                    let rows: Vec<Row> = series
                        .runs
                        .iter()
                        .map(|r| Row {
                            k: r.k,
                            u0_paper: r.u0_paper,
                            u0_standard: r.u0_standard,
                            atom_size: r.atom_size,
                            min_radius: r.min_radius,
                            zygmund_norm: r.zygmund_norm,
                            fitted_slope: series.slope_paper,
                        })
                        .collect();
                    csv_table(&rows)?
                }
                Format::Svg => {
                    let pts = series
                        .runs
                        .iter()
                        .map(|r| ((r.k as f64).ln(), r.u0_paper.abs()))
                        .collect();
                    emit_series(
                        &Series::new("counterexample |u_k(0)|", "ln k", "|u_k(0)|", pts),
                        format,
                    )?
                }
            };
            Ok(Outcome {
                body,
                pass,
                notes: vec![format!("note: fitted slope {:.6}", series.slope_paper)],
            })
        }
        Command::Convergence {
            metric,
            resolutions,
        } => {
            let n0 = resolutions.first().copied().unwrap_or(32);
            let case = match metric.as_str() {
                "flat" => ExperimentCase::manufactured_flat(n0),
                "sphere" => ExperimentCase::manufactured_sphere(n0),
                other => {
                    return Err(Error::InvalidMetric(format!(
                        "no manufactured solution for {other:?}"
                    )))
                }
            };
            let study = convergence_study(&case, resolutions)?;
            let verdicts = vec![
                VerdictReport::at_least(
                    "order_min",
                    &study.case_id,
                    study.measured_order,
                    1.7,
                    0.0,
                ),
                VerdictReport::check("order_max", &study.case_id, study.measured_order, 2.3, 0.0),
            ];
            let pass = all_pass(&verdicts);
            let body = match format {
                Format::Json => verdict_outcome(&study, verdicts, format, true)?.body,
                Format::Csv => {
                    #[derive(Serialize)]
                    struct Row {
                        n_r: usize,
                        error: f64,
                    }
                    csv_table(
                        &study
                            .resolutions
                            .iter()
                            .zip(&study.errors)
                            .map(|(&n_r, &error)| Row { n_r, error })
                            .collect::<Vec<_>>(),
                    )?
                }
                Format::Svg => {
                    let pts = study
                        .resolutions
                        .iter()
                        .zip(&study.errors)
                        .map(|(&n, &e)| ((n as f64).ln(), -e.ln()))
                        .collect();
                    emit_series(
                        &Series::new("convergence", "ln n_r", "-ln error", pts),
                        format,
                    )?
                }
            };
            Ok(Outcome {
                body,
                pass,
                notes: Vec::new(),
            })
        }
        Command::Report { input } => {
            let text = read_file(input)?;
            let verdicts: Vec<VerdictReport> =
                serde_json::from_str(&text).map_err(|source| Error::Json {
                    context: input.display().to_string(),
                    source,
                })?;
            let body = emit_verdicts(&verdicts, format)?;
            Ok(Outcome {
                body,
                pass: all_pass(&verdicts),
                notes: Vec::new(),
            })
        }
    }
}

/// Parses `args`, runs the command, writes the report and returns the exit
/// status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_INPUT_ERROR
            } else {
                EXIT_PASS
            };
        }
    };
    if let Some(n) = cli.threads {
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match execute(&cli).and_then(|out| write_output(cli.output.as_deref(), &out.body).map(|_| out))
    {
        Ok(out) => {
            for n in &out.notes {
                eprintln!("{n}");
            }
            if out.pass {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT_ERROR
        }
    }
}
