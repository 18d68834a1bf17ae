//! The `mixmoment` command line.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::experiments::{
    alpha_grid, exp_sum_ratio, expectation_stat, mixed_moment_sum, moment1_scan, moment2_scan,
    nonvanishing_scan, records_table, sc_se_eval, terms_table, variance_stat, ExperimentRecord,
    MaassFormData, Parity,
};
use crate::geometry::{l4_norm, mixed_moment_geometric, parseval_spectral};
use crate::io::{fmt_f64, ingest_maass, Config, CsvTable};
use crate::lfun::{
    kernel_v3, kernel_v3_minus, kernel_v6, l_half_maass_with, l_half_rs_with, l_half_sym2_with,
    l_one_sym2_maass, l_one_sym2_value, AfeOptions,
};
use crate::modforms::{
    dim_cusp_space, hecke_basis, serialize_eigenform, set_working_precision, HeckeEigenform,
};
use crate::special::Window;
use crate::trace::{bessel_average, petersson_grid, PeterssonReport};

#[derive(Parser, Debug)]
#[command(
    name = "mixmoment",
    version,
    about = "Hecke eigenforms, L-values and mixed moment identities at desk scale",
    after_help = "Every subcommand writes CSV files into the output directory (default `results`) \
                  and prints a summary. Exit status: 0 success, 1 computation error or failed check, \
                  2 usage error."
)]
struct Cli {
    /// Config file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (0: one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Working precision in bits for eigenform construction.
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Maass form data file.
    #[arg(long, global = true)]
    maass: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum LKind {
    /// L(1/2 + it, sym^2 f)
    Sym2,
    /// L(1, sym^2 f)
    Sym2One,
    /// L(1/2, sym^2 f x phi)
    Rs,
    /// L(1/2, phi)
    Maass,
    /// L(1, sym^2 phi)
    Sym2MaassOne,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hecke eigenvalues lambda_f(n) of every f in H_k.
    #[command(after_help = "CSV eigenforms_k<K>.csv: form,n,lambda")]
    Eigenforms {
        #[arg(long)]
        weight: u32,
        #[arg(long, default_value_t = 10)]
        terms: usize,
    },
    /// Petersson formula: both sides for even k in [kmin, kmax] and m, n <= mnmax.
    #[command(after_help = "CSV ptf.csv: k,m,n,lhs,rhs,residual,tail_bound,pass")]
    PtfCheck {
        #[arg(long, default_value_t = 12)]
        kmin: u32,
        #[arg(long, default_value_t = 30)]
        kmax: u32,
        #[arg(long, default_value_t = 10)]
        mnmax: u64,
    },
    /// Windowed J-Bessel average against its main term.
    #[command(after_help = "CSV bessel_avg.csv: K,x,lhs,main_term,error_budget,ratio,pass")]
    BesselAvg {
        #[arg(long = "big-k", value_delimiter = ',', default_values_t = [50u32, 100])]
        big_k: Vec<u32>,
        /// Arguments x; default K/10, K, K^2/10, K^2/2 for each K.
        #[arg(long, value_delimiter = ',')]
        x: Vec<f64>,
        /// Pass when |lhs - main| <= factor * error_budget.
        #[arg(long, default_value_t = 10.0)]
        factor: f64,
    },
    /// The AFE kernels V3+, V3- and (with --t-phi) V6 at the given y.
    #[command(
        after_help = "CSV afe_kernels.csv: y,v3_plus_re,v3_plus_im,v3_minus_re,v3_minus_im,v6"
    )]
    Afe {
        #[arg(long)]
        weight: u32,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t: f64,
        #[arg(long = "t-phi")]
        t_phi: Option<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 1.0, 10.0, 100.0, 1000.0])]
        y: Vec<f64>,
    },
    /// One family of L-values.
    #[command(after_help = "CSV lvalue_<kind>.csv: kind,k,f,t_phi,t,re,im,error,cutoff")]
    Lvalue {
        #[arg(long, value_enum)]
        kind: LKind,
        #[arg(long)]
        weight: Option<u32>,
        /// Form index in H_k; all forms when absent.
        #[arg(long)]
        index: Option<usize>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t: f64,
        /// Maass form index in the data file; all (even, where required) forms when absent.
        #[arg(long)]
        form: Option<usize>,
    },
    /// Mixed moment of one pair by quadrature and by Parseval, with the L4 norm of F.
    #[command(after_help = "CSV mixed.csv: k,f,l,g,geometric,spectral,rel_diff,l4_f")]
    Mixed {
        #[arg(long)]
        weight: u32,
        #[arg(long)]
        ell: u32,
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long, default_value_t = 0)]
        gindex: usize,
    },
    /// Quadrature against Parseval for every form pair at the given weights.
    #[command(after_help = "CSV parseval.csv: k,f,l,g,geometric,spectral,rel_diff,pass")]
    ParsevalCheck {
        /// Weight pairs k:l.
        #[arg(long, value_delimiter = ',', default_values_t = ["12:12".to_string(), "12:16".into(), "16:16".into(), "12:24".into()])]
        pairs: Vec<String>,
    },
    /// Variance of mixed moments over K < k <= 2K.
    #[command(
        after_help = "CSV variance.csv and variance_terms.csv (record layout below).\n\n\
                            Record CSV: experiment,<parameters>,value,error,diagnostics\n\
                            Terms CSV: experiment,term,value"
    )]
    Variance {
        /// K values; default the config k_grid.
        #[arg(long = "big-k", value_delimiter = ',')]
        big_k: Vec<u32>,
        #[arg(long, default_value_t = 12)]
        ell: u32,
        #[arg(long, default_value_t = 0)]
        gindex: usize,
    },
    /// Averaged mixed moment over K < k <= 2K.
    #[command(after_help = "CSV expectation.csv and expectation_terms.csv (record layout).")]
    Expectation {
        #[arg(long = "big-k", value_delimiter = ',')]
        big_k: Vec<u32>,
        #[arg(long, default_value_t = 12)]
        ell: u32,
        #[arg(long, default_value_t = 0)]
        gindex: usize,
    },
    /// First moment of L(1/2, sym^2 f x phi), plain and harmonic.
    #[command(after_help = "CSV moment1.csv and moment1_terms.csv (record layout).")]
    Moment1 {
        #[arg(long = "big-k", value_delimiter = ',')]
        big_k: Vec<u32>,
        /// Maass form index in the data file; default the first even form.
        #[arg(long)]
        form: Option<usize>,
    },
    /// Second moment of L(1/2 + it, sym^2 f).
    #[command(after_help = "CSV moment2.csv and moment2_terms.csv (record layout).")]
    Moment2 {
        #[arg(long = "big-k", value_delimiter = ',')]
        big_k: Vec<u32>,
        /// t values; default the config t_grid.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        t: Vec<f64>,
    },
    /// Weighted sum of L(1/2, phi) L(1/2, sym^2 g x phi) over the Maass data.
    #[command(after_help = "CSV mixed_sum.csv and mixed_sum_terms.csv (record layout).")]
    MixedSum {
        /// Weights l; default the config ell_grid.
        #[arg(long, value_delimiter = ',')]
        ell: Vec<u32>,
    },
    /// Maximal GL(2) exponential sum ratio over an alpha grid.
    #[command(after_help = "CSV expsum.csv and expsum_terms.csv (record layout).")]
    Expsum {
        #[arg(long, default_value_t = 0)]
        form: usize,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 256)]
        grid: usize,
    },
    /// Cusp and Eisenstein bounding sums.
    #[command(after_help = "CSV scse.csv and scse_terms.csv (record layout).")]
    Scse {
        #[arg(long = "big-k", value_delimiter = ',', default_values_t = [12u32])]
        big_k: Vec<u32>,
        #[arg(long, default_value_t = 12)]
        ell: u32,
    },
    /// Largest extracted triple L-value for each pair of forms on the grids.
    #[command(after_help = "CSV nonvanish.csv and nonvanish_terms.csv (record layout).")]
    Nonvanish {
        /// Weights k; default the config k_grid.
        #[arg(long, value_delimiter = ',')]
        weights: Vec<u32>,
        /// Weights l; default the config ell_grid.
        #[arg(long, value_delimiter = ',')]
        ells: Vec<u32>,
    },
}

struct Run {
    cfg: Config,
    maass: Option<PathBuf>,
}

enum Outcome {
    Pass,
    Fail(String),
}

impl Run {
    fn opts(&self) -> AfeOptions {
        self.cfg.afe_options()
    }

    fn spectrum(&self) -> Result<Vec<MaassFormData>> {
        match &self.maass {
            Some(p) => ingest_maass(p),
            None => Err(Error::invalid(
                "no Maass data: pass --maass or set maass_data in the config",
            )),
        }
    }

    fn write(&self, name: &str, table: &CsvTable) -> Result<()> {
        let path = self.cfg.out_dir.join(format!("{name}.csv"));
        table.write(&path)?;
        println!("wrote {}", path.display());
        Ok(())
    }

    fn write_records(&self, name: &str, records: &[ExperimentRecord]) -> Result<()> {
        let table = records_table(records);
        print!("{}", table.to_csv());
        self.write(name, &table)?;
        self.write(&format!("{name}_terms"), &terms_table(records))
    }
}

fn form(k: u32, index: usize) -> Result<HeckeEigenform> {
    let forms = hecke_basis(k)?;
    let n = forms.len();
    forms
        .into_iter()
        .nth(index)
        .ok_or_else(|| Error::invalid(format!("H_{k} has {n} forms, no index {index}")))
}

fn nonempty_or(v: &[u32], fallback: &[u32]) -> Vec<u32> {
    if v.is_empty() { fallback } else { v }.to_vec()
}

fn pass_text(ok: bool) -> String {
    if ok { "true" } else { "false" }.to_string()
}

fn execute(run: &Run, command: &Command) -> Result<Outcome> {
    let cfg = &run.cfg;
    match command {
        Command::Eigenforms { weight, terms } => {
            let mut table = CsvTable::new(&["form", "n", "lambda"]);
            if dim_cusp_space(*weight as i64)? == 0 {
                println!("weight={weight} dim=0");
            } else {
                for f in hecke_basis(*weight)? {
                    print!("{}", serialize_eigenform(&f, *terms));
                    let lam = f.lambdas(*terms);
                    for n in 1..=*terms {
                        table.push(vec![f.index().to_string(), n.to_string(), fmt_f64(lam[n])])?;
                    }
                }
            }
            run.write(&format!("eigenforms_k{weight}"), &table)?;
            Ok(Outcome::Pass)
        }
        Command::PtfCheck { kmin, kmax, mnmax } => {
            if kmin > kmax || *mnmax == 0 {
                return Err(Error::invalid("need kmin <= kmax and mnmax >= 1"));
            }
            let weights: Vec<u32> = (*kmin..=*kmax).filter(|k| k % 2 == 0).collect();
            let reports = petersson_grid(&weights, *mnmax)?;
            let mut header = PeterssonReport::CSV_HEADER.to_vec();
            header.push("pass");
            let mut table = CsvTable::new(&header);
            let mut failed = 0;
            let mut worst = 0.0f64;
            for r in &reports {
                let ok = r.passes(cfg.ptf_tolerance);
                failed += usize::from(!ok);
                worst = worst.max(r.residual);
                let mut row = r.csv_row();
                row.push(pass_text(ok));
                table.push(row)?;
            }
            run.write("ptf", &table)?;
            println!(
                "{} cells, {failed} failing, worst residual {worst:e}",
                reports.len()
            );
            Ok(if failed == 0 {
                Outcome::Pass
            } else {
                Outcome::Fail(format!("{failed} Petersson cells exceed the tolerance"))
            })
        }
        Command::BesselAvg { big_k, x, factor } => {
            let w = Window::default();
            let mut table = CsvTable::new(&[
                "K",
                "x",
                "lhs",
                "main_term",
                "error_budget",
                "ratio",
                "pass",
            ]);
            let mut failed = 0;
            for &k in big_k {
                let kf = k as f64;
                let xs = if x.is_empty() {
                    vec![kf / 10.0, kf, kf * kf / 10.0, kf * kf / 2.0]
                } else {
                    x.clone()
                };
                for xv in xs {
                    let b = bessel_average(kf, xv, &w)?;
                    let ok = b.ratio() <= *factor;
                    failed += usize::from(!ok);
                    println!("K={k} x={xv} ratio={:.4}", b.ratio());
                    table.push(vec![
                        k.to_string(),
                        fmt_f64(xv),
                        fmt_f64(b.lhs),
                        fmt_f64(b.main_term),
                        fmt_f64(b.error_budget),
                        fmt_f64(b.ratio()),
                        pass_text(ok),
                    ])?;
                }
            }
            run.write("bessel_avg", &table)?;
            Ok(if failed == 0 {
                Outcome::Pass
            } else {
                Outcome::Fail(format!("{failed} points exceed {factor} x error_budget"))
            })
        }
        Command::Afe {
            weight,
            t,
            t_phi,
            y,
        } => {
            let mut table = CsvTable::new(&[
                "y",
                "v3_plus_re",
                "v3_plus_im",
                "v3_minus_re",
                "v3_minus_im",
                "v6",
            ]);
            for &yv in y {
                let p = kernel_v3(yv, *t, *weight)?;
                let m = kernel_v3_minus(yv, *t, *weight)?;
                let v6 = match t_phi {
                    Some(tp) => fmt_f64(kernel_v6(yv, *weight, *tp)?),
                    None => String::new(),
                };
                println!("y={yv} V3+={p} V3-={m} V6={v6}");
                table.push(vec![
                    fmt_f64(yv),
                    fmt_f64(p.re),
                    fmt_f64(p.im),
                    fmt_f64(m.re),
                    fmt_f64(m.im),
                    v6,
                ])?;
            }
            run.write("afe_kernels", &table)?;
            Ok(Outcome::Pass)
        }
        Command::Lvalue {
            kind,
            weight,
            index,
            t,
            form: phi_index,
        } => lvalue(run, *kind, *weight, *index, *t, *phi_index),
        Command::Mixed {
            weight,
            ell,
            index,
            gindex,
        } => {
            let f = form(*weight, *index)?;
            let g = form(*ell, *gindex)?;
            let geometric = mixed_moment_geometric(&f, &g)?;
            let spectral = parseval_spectral(&f, &g)?;
            let rel = (geometric - spectral).abs() / spectral.abs();
            let l4 = l4_norm(&f)?;
            let mut table = CsvTable::new(&[
                "k",
                "f",
                "l",
                "g",
                "geometric",
                "spectral",
                "rel_diff",
                "l4_f",
            ]);
            table.push(vec![
                weight.to_string(),
                index.to_string(),
                ell.to_string(),
                gindex.to_string(),
                fmt_f64(geometric),
                fmt_f64(spectral),
                fmt_f64(rel),
                fmt_f64(l4),
            ])?;
            println!("geometric={geometric} spectral={spectral} rel_diff={rel:e} l4={l4}");
            run.write("mixed", &table)?;
            Ok(Outcome::Pass)
        }
        Command::ParsevalCheck { pairs } => {
            let mut table = CsvTable::new(&[
                "k",
                "f",
                "l",
                "g",
                "geometric",
                "spectral",
                "rel_diff",
                "pass",
            ]);
            let mut failed = 0;
            for p in pairs {
                let (k, l) = p
                    .split_once(':')
                    .and_then(|(a, b)| {
                        Some((a.trim().parse::<u32>().ok()?, b.trim().parse::<u32>().ok()?))
                    })
                    .ok_or_else(|| {
                        Error::invalid(format!("bad weight pair '{p}', expected k:l"))
                    })?;
                for f in hecke_basis(k)? {
                    for g in hecke_basis(l)? {
                        let geometric = mixed_moment_geometric(&f, &g)?;
                        let spectral = parseval_spectral(&f, &g)?;
                        let rel = (geometric - spectral).abs() / spectral.abs();
                        let ok = rel < cfg.parseval_tolerance;
                        failed += usize::from(!ok);
                        println!(
                            "({k},{}) x ({l},{}): rel_diff {rel:e}",
                            f.index(),
                            g.index()
                        );
                        table.push(vec![
                            k.to_string(),
                            f.index().to_string(),
                            l.to_string(),
                            g.index().to_string(),
                            fmt_f64(geometric),
                            fmt_f64(spectral),
                            fmt_f64(rel),
                            pass_text(ok),
                        ])?;
                    }
                }
            }
            run.write("parseval", &table)?;
            Ok(if failed == 0 {
                Outcome::Pass
            } else {
                Outcome::Fail(format!("{failed} pairs exceed the Parseval tolerance"))
            })
        }
        Command::Variance { big_k, ell, gindex } | Command::Expectation { big_k, ell, gindex } => {
            let variance = matches!(command, Command::Variance { .. });
            let g = form(*ell, *gindex)?;
            let mut records = Vec::new();
            for k in nonempty_or(big_k, &cfg.k_grid) {
                records.push(if variance {
                    variance_stat(k, &g)?
                } else {
                    expectation_stat(k, &g)?
                });
            }
            run.write_records(if variance { "variance" } else { "expectation" }, &records)?;
            Ok(Outcome::Pass)
        }
        Command::Moment1 {
            big_k,
            form: phi_index,
        } => {
            let spectrum = run.spectrum()?;
            let phi = match phi_index {
                Some(i) => spectrum
                    .get(*i)
                    .ok_or_else(|| Error::invalid(format!("no Maass form with index {i}")))?,
                None => spectrum
                    .iter()
                    .find(|p| p.parity == Parity::Even)
                    .ok_or_else(|| Error::invalid("the Maass data has no even form"))?,
            };
            let mut records = Vec::new();
            for k in nonempty_or(big_k, &cfg.k_grid) {
                let (a, b) = moment1_scan(k, phi, &Window::default(), &run.opts())?;
                records.push(a);
                records.push(b);
            }
            run.write_records("moment1", &records)?;
            Ok(Outcome::Pass)
        }
        Command::Moment2 { big_k, t } => {
            let ts = if t.is_empty() {
                cfg.t_grid.clone()
            } else {
                t.clone()
            };
            let mut records = Vec::new();
            for k in nonempty_or(big_k, &cfg.k_grid) {
                for &tv in &ts {
                    records.push(moment2_scan(k, tv, &run.opts())?);
                }
            }
            run.write_records("moment2", &records)?;
            Ok(Outcome::Pass)
        }
        Command::MixedSum { ell } => {
            let spectrum = run.spectrum()?;
            let mut records = Vec::new();
            for l in nonempty_or(ell, &cfg.ell_grid) {
                for g in hecke_basis(l)? {
                    let r = mixed_moment_sum(&g, &spectrum, &run.opts())?;
                    if let Some(w) = r.get_note("warning") {
                        eprintln!("warning: {w}");
                    }
                    records.push(r);
                }
            }
            run.write_records("mixed_sum", &records)?;
            Ok(Outcome::Pass)
        }
        Command::Expsum { form: i, n, grid } => {
            let spectrum = run.spectrum()?;
            let phi = spectrum
                .get(*i)
                .ok_or_else(|| Error::invalid(format!("no Maass form with index {i}")))?;
            let r = exp_sum_ratio(phi, *n, &alpha_grid(*grid))?;
            run.write_records("expsum", &[r])?;
            Ok(Outcome::Pass)
        }
        Command::Scse { big_k, ell } => {
            let spectrum = run.spectrum()?;
            let g = form(*ell, 0)?;
            let mut records = Vec::new();
            for &k in big_k {
                let (c, e) = sc_se_eval(k, &g, &spectrum, &run.opts())?;
                records.push(c);
                records.push(e);
            }
            run.write_records("scse", &records)?;
            Ok(Outcome::Pass)
        }
        Command::Nonvanish { weights, ells } => {
            let records = nonvanishing_scan(
                &nonempty_or(weights, &cfg.k_grid),
                &nonempty_or(ells, &cfg.ell_grid),
            )?;
            run.write_records("nonvanish", &records)?;
            let vanishing: Vec<String> = records
                .iter()
                .filter(|r| r.get_note("nonzero") == Some("0"))
                .map(|r| format!("{:?}", r.params))
                .collect();
            Ok(if vanishing.is_empty() {
                Outcome::Pass
            } else {
                Outcome::Fail(format!(
                    "no nonzero triple value for {}",
                    vanishing.join(", ")
                ))
            })
        }
    }
}

fn lvalue(
    run: &Run,
    kind: LKind,
    weight: Option<u32>,
    index: Option<usize>,
    t: f64,
    phi_index: Option<usize>,
) -> Result<Outcome> {
    let opts = run.opts();
    let needs_form = matches!(kind, LKind::Sym2 | LKind::Sym2One | LKind::Rs);
    let forms: Vec<HeckeEigenform> = if needs_form {
        let k = weight.ok_or_else(|| Error::invalid("this kind needs --weight"))?;
        match index {
            Some(i) => vec![form(k, i)?],
            None => hecke_basis(k)?,
        }
    } else {
        Vec::new()
    };
    let needs_phi = matches!(kind, LKind::Rs | LKind::Maass | LKind::Sym2MaassOne);
    let phis: Vec<MaassFormData> = if needs_phi {
        let spectrum = run.spectrum()?;
        match phi_index {
            Some(i) => vec![spectrum
                .get(i)
                .cloned()
                .ok_or_else(|| Error::invalid(format!("no Maass form with index {i}")))?],
            None if kind == LKind::Sym2MaassOne => spectrum,
            None => spectrum
                .into_iter()
                .filter(|p| p.parity == Parity::Even)
                .collect(),
        }
    } else {
        Vec::new()
    };

    let name = format!("{kind:?}").to_lowercase();
    let mut table = CsvTable::new(&[
        "kind", "k", "f", "t_phi", "t", "re", "im", "error", "cutoff",
    ]);
    let mut emit = |f: Option<&HeckeEigenform>,
                    phi: Option<&MaassFormData>,
                    t: f64,
                    v: Complex64,
                    err: f64,
                    cut: usize| {
        println!(
            "{name} k={} f={} t_phi={} t={t}: {} + {}i (error {err:e}, cutoff {cut})",
            f.map(|f| f.weight().to_string()).unwrap_or_default(),
            f.map(|f| f.index().to_string()).unwrap_or_default(),
            phi.map(|p| p.t_phi.to_string()).unwrap_or_default(),
            v.re,
            v.im
        );
        table.push(vec![
            name.clone(),
            f.map(|f| f.weight().to_string()).unwrap_or_default(),
            f.map(|f| f.index().to_string()).unwrap_or_default(),
            phi.map(|p| fmt_f64(p.t_phi)).unwrap_or_default(),
            fmt_f64(t),
            fmt_f64(v.re),
            fmt_f64(v.im),
            fmt_f64(err),
            cut.to_string(),
        ])
    };
    let real = |x: f64| Complex64::new(x, 0.0);
    match kind {
        LKind::Sym2 => {
            for f in &forms {
                let v = l_half_sym2_with(f, t, &opts)?;
                emit(Some(f), None, t, v.value, v.error, v.cutoff)?;
            }
        }
        LKind::Sym2One => {
            for f in &forms {
                let v = l_one_sym2_value(f)?;
                emit(Some(f), None, 0.0, real(v.value), v.error, v.cutoff)?;
            }
        }
        LKind::Rs => {
            for f in &forms {
                for phi in &phis {
                    let v = l_half_rs_with(f, phi, &opts)?;
                    emit(Some(f), Some(phi), 0.0, real(v.value), v.error, v.cutoff)?;
                }
            }
        }
        LKind::Maass => {
            for phi in &phis {
                let v = l_half_maass_with(phi, &opts)?;
                emit(None, Some(phi), 0.0, real(v.value), v.error, v.cutoff)?;
            }
        }
        LKind::Sym2MaassOne => {
            for phi in &phis {
                let v = l_one_sym2_maass(phi)?;
                emit(None, Some(phi), 0.0, real(v.value), v.error, v.cutoff)?;
            }
        }
    }
    run.write(&format!("lvalue_{name}"), &table)?;
    Ok(Outcome::Pass)
}

fn usage_error(e: &Error) -> bool {
    matches!(e, Error::InvalidArgument(_) | Error::Parse { .. })
}

fn setup(cli: &Cli) -> Result<Run> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(o) = &cli.out {
        cfg.out_dir = o.clone();
    }
    if let Some(t) = cli.threads {
        cfg.threads = t;
    }
    if let Some(p) = cli.precision {
        cfg.set("precision", &p.to_string())?;
    }
    let maass = match &cli.maass {
        Some(p) if !p.is_file() => {
            return Err(Error::invalid(format!(
                "Maass data file {} not found",
                p.display()
            )))
        }
        Some(p) => Some(p.clone()),
        None => cfg.maass_data.clone(),
    };
    set_working_precision(cfg.precision);
    // the global pool can only be configured once per process
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build_global();
    Ok(Run { cfg, maass })
}

/// Parses `args` (program name first), runs the subcommand and returns the exit status.
pub fn run_command<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let run = match setup(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match execute(&run, &cli.command) {
        Ok(Outcome::Pass) => 0,
        Ok(Outcome::Fail(msg)) => {
            eprintln!("check failed: {msg}");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            if usage_error(&e) {
                2
            } else {
                1
            }
        }
    }
}
