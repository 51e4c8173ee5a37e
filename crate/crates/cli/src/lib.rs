//! Command implementations behind the `floquet-tls` binary.
//!
//! Every command reads a [`RunConfig`], writes CSV files into an output
//! directory and reports failures through [`CliError`], whose
//! [`exit_code`](CliError::exit_code) follows the contract
//! 0 success, 1 verification failure, 2 configuration error,
//! 3 numerical degeneracy.

pub mod config;
pub mod output;

use std::path::{Path, PathBuf};

use floquet_tls::dissipator::{evolve_schrodinger, total_generator, DensityMatrix};
use floquet_tls::spectroscopy::{default_window, local_maxima, mollow_spectrum, Spectrum};
use floquet_tls::thermo::{detuning_sweep, entropy_production, thermo_report, von_neumann_entropy, Regime};
use floquet_tls::verify::{run_all, VerifyOptions, VerifyReport};
use floquet_tls::{Basis, BathSpec, Channel, DressedBasis, SpectralDensity};

pub use config::RunConfig;
use output::{fmt_float, CsvTable};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("output error: {0}")]
    Io(String),
    #[error("numerical degeneracy: {0}")]
    Degenerate(floquet_tls::Error),
    #[error("{0} verification checks failed")]
    VerificationFailed(usize),
}

impl CliError {
    /// Degenerate parameter points map to exit code 3, everything else the
    /// library rejects is a configuration error.
    pub fn from_core(e: floquet_tls::Error) -> Self {
        if e.is_degeneracy() {
            CliError::Degenerate(e)
        } else {
            CliError::Config(e.to_string())
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerificationFailed(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Degenerate(_) => 3,
        }
    }
}

impl From<floquet_tls::Error> for CliError {
    fn from(e: floquet_tls::Error) -> Self {
        CliError::from_core(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn ensure_dir(out: &Path) -> CliResult<()> {
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("cannot create {}: {e}", out.display())))
}

/// Files written by a command plus a short human-readable summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
}

/// Computes the fluorescence spectrum of the configured single vacuum bath.
pub fn spectrum_of(cfg: &RunConfig) -> CliResult<Spectrum> {
    let p = cfg.params()?;
    let baths = cfg.bath_specs()?;
    let a = match baths.as_slice() {
        [BathSpec { channel: Channel::Sigma1, temperature, density: SpectralDensity::Cubic { a }, .. }]
            if *temperature == 0.0 =>
        {
            *a
        }
        _ => {
            return Err(CliError::Config(
                "spectrum needs exactly one sigma1 bath at zero temperature with a cubic density".into(),
            ))
        }
    };
    // assembling the generator rejects colliding transition frequencies (exit 3)
    total_generator(&DressedBasis::new(&p)?, &baths)?;
    let (lo, hi) = default_window(&p);
    let lo = cfg.spectrum.omega_min.unwrap_or(lo);
    let hi = cfg.spectrum.omega_max.unwrap_or(hi);
    let s = mollow_spectrum(&p, a)?.with_grid(lo, hi, cfg.spectrum.points)?;
    Ok(if cfg.spectrum.normalize { s.normalized() } else { s })
}

/// Writes `spectrum_lines.csv` and, unless `points = 0`, `spectrum.csv`.
pub fn cmd_spectrum(cfg: &RunConfig, out: &Path) -> CliResult<Outcome> {
    let s = spectrum_of(cfg)?;
    ensure_dir(out)?;
    let mut files = Vec::new();
    let mut summary = Vec::new();

    let mut lines = CsvTable::new(&["kind", "center", "width", "weight"]);
    for l in s.line_table() {
        lines.push(vec![l.kind.to_string(), fmt_float(l.center), fmt_float(l.width), fmt_float(l.weight)]);
    }
    files.push(lines.write(&out.join("spectrum_lines.csv"))?);

    if let Some(grid) = &s.grid {
        let mut table = CsvTable::new(&["omega", "intensity"]);
        for &(w, i) in grid {
            table.push(vec![fmt_float(w), fmt_float(i)]);
        }
        files.push(table.write(&out.join("spectrum.csv"))?);
        let values: Vec<f64> = grid.iter().map(|g| g.1).collect();
        let peaks: Vec<String> = local_maxima(&values).iter().map(|&i| format!("{:.6}", grid[i].0)).collect();
        summary.push(format!("{} local maxima at omega = [{}]", peaks.len(), peaks.join(", ")));
    }
    summary.push(format!(
        "weights: elastic {:.6}, central {:.6}, side_minus {:.6}, side_plus {:.6}",
        s.elastic_weight, s.lines[0].weight, s.lines[1].weight, s.lines[2].weight
    ));
    Ok(Outcome { files, summary })
}

/// Electromagnetic and dephasing bath of a heat-pump configuration.
pub fn heatpump_baths(cfg: &RunConfig) -> CliResult<(BathSpec, BathSpec)> {
    let baths = cfg.bath_specs()?;
    let find = |c: Channel| baths.iter().filter(|b| b.channel == c).cloned().collect::<Vec<_>>();
    match (baths.len(), find(Channel::Sigma1).as_slice(), find(Channel::Sigma3).as_slice()) {
        (2, [e], [d]) if e.temperature > 0.0 && d.temperature > 0.0 => Ok((e.clone(), d.clone())),
        _ => Err(CliError::Config(
            "heatpump needs exactly two baths: sigma1 and sigma3, both at positive temperature".into(),
        )),
    }
}

/// Stationary heat-pump thermodynamics: `(J_d, J_e, P, entropy rate, regime)`.
pub fn heatpump_point(cfg: &RunConfig) -> CliResult<(f64, f64, f64, f64, Regime)> {
    let (e, d) = heatpump_baths(cfg)?;
    let p = cfg.params()?;
    let gen = total_generator(&DressedBasis::new(&p)?, &[e.clone(), d.clone()])?;
    let rep = thermo_report(&gen)?;
    let j_d = rep.current(&d.label).expect("bath present");
    let j_e = rep.current(&e.label).expect("bath present");
    Ok((j_d, j_e, rep.power, rep.entropy_rate, floquet_tls::thermo::classify_regime(j_d, j_e)))
}

/// Writes `thermo.csv` and, with a sweep block, `sweep.csv`.
pub fn cmd_heatpump(cfg: &RunConfig, out: &Path) -> CliResult<Outcome> {
    let (j_d, j_e, power, entropy, regime) = heatpump_point(cfg)?;
    let (e, d) = heatpump_baths(cfg)?;
    ensure_dir(out)?;
    let mut files = Vec::new();
    let mut table = CsvTable::new(&["J_d", "J_e", "P", "entropy_rate", "regime"]);
    table.push(vec![fmt_float(j_d), fmt_float(j_e), fmt_float(power), fmt_float(entropy), regime.to_string()]);
    files.push(table.write(&out.join("thermo.csv"))?);
    let mut summary = vec![format!("J_d = {j_d:e}, J_e = {j_e:e}, P = {power:e}, regime {regime}")];

    if let Some(sweep) = &cfg.heatpump.sweep {
        let points = detuning_sweep(
            cfg.system.omega,
            cfg.system.g,
            &e,
            &d,
            &sweep.detunings(),
            cfg.heatpump.margin,
        )?;
        let mut table = CsvTable::new(&[
            "delta",
            "omega0",
            "J_d",
            "J_e",
            "P",
            "entropy_rate",
            "regime",
            "J_d_approx",
            "J_e_approx",
        ]);
        for pt in &points {
            let (ad, ae) = match pt.approx {
                Some(a) => (fmt_float(a.j_d), fmt_float(a.j_e)),
                None => (String::new(), String::new()),
            };
            table.push(vec![
                fmt_float(pt.detuning),
                fmt_float(cfg.system.omega + pt.detuning),
                fmt_float(pt.j_d),
                fmt_float(pt.j_e),
                fmt_float(pt.power),
                fmt_float(-(pt.j_d / d.temperature + pt.j_e / e.temperature)),
                pt.regime.to_string(),
                ad,
                ae,
            ]);
        }
        files.push(table.write(&out.join("sweep.csv"))?);
        summary.push(format!("sweep over {} detunings written", points.len()));
    }
    Ok(Outcome { files, summary })
}

/// Writes `evolve.csv`: lab-basis density matrix, purity, entropy and
/// entropy production along the trajectory.
pub fn cmd_evolve(cfg: &RunConfig, out: &Path) -> CliResult<Outcome> {
    let p = cfg.params()?;
    let baths = cfg.bath_specs()?;
    let basis = DressedBasis::new(&p)?;
    let gen = total_generator(&basis, &baths)?;
    let ev = &cfg.evolve;
    let rho0 = match ev.basis {
        config::BasisConfig::Lab => {
            let lab = DensityMatrix::from_bloch(ev.rho0, Basis::Lab)?;
            DensityMatrix::new(basis.to_dressed(lab.matrix())?)?
        }
        config::BasisConfig::Dressed => DensityMatrix::from_bloch(ev.rho0, Basis::Dressed)?,
    };
    let times: Vec<f64> = match ev.samples {
        0 => Vec::new(),
        1 => vec![0.0],
        n => (0..n).map(|i| ev.t_max * i as f64 / (n - 1) as f64).collect(),
    };
    let sigma = entropy_production(&gen, &rho0, &times)?;
    ensure_dir(out)?;
    let mut table = CsvTable::new(&[
        "t",
        "rho_ee",
        "rho_gg",
        "re_rho_eg",
        "im_rho_eg",
        "purity",
        "entropy",
        "entropy_production",
    ]);
    for (&t, &(_, s)) in times.iter().zip(&sigma.points) {
        let rho = evolve_schrodinger(&gen, &rho0, t)?;
        let lab = basis.to_lab(rho.matrix())?;
        let purity = (lab * lab).trace().re;
        table.push(vec![
            fmt_float(t),
            fmt_float(lab.get(0, 0).re),
            fmt_float(lab.get(1, 1).re),
            fmt_float(lab.get(0, 1).re),
            fmt_float(lab.get(0, 1).im),
            fmt_float(purity),
            fmt_float(von_neumann_entropy(&rho)?),
            fmt_float(s),
        ]);
    }
    let file = table.write(&out.join("evolve.csv"))?;
    let mut summary = vec![format!("{} samples up to t = {}", times.len(), ev.t_max)];
    if sigma.vacuum_excluded {
        summary.push("vacuum: second-law check via Spohn inequality only".into());
    }
    Ok(Outcome { files: vec![file], summary })
}

pub fn verify_options(cfg: &RunConfig) -> VerifyOptions {
    VerifyOptions {
        seed: cfg.verify.seed,
        cases: cfg.verify.cases,
        tolerances: cfg.verify.tolerances.clone(),
    }
}

/// Runs all suites and writes `verify.txt`; fails with exit code 1 if any
/// check fails.
pub fn cmd_verify(cfg: &RunConfig, out: &Path) -> CliResult<(VerifyReport, Outcome)> {
    let report = run_all(&verify_options(cfg));
    ensure_dir(out)?;
    let path = out.join("verify.txt");
    std::fs::write(&path, report.table()).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    let outcome = Outcome { files: vec![path], summary: Vec::new() };
    Ok((report, outcome))
}
