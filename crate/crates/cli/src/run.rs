use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use hme_core::assembly::linearize;
use hme_core::stability::{space_sweep_1d, sweep_points, time_sweep};
use hme_core::verify::{linear_model, random_wave_vectors, verify, SweepConfig, System, VerifyConfig};
use hme_core::{LinearModel, MomentBasis};

use crate::args::{Command, Format, KSweep, OmegaSweep, OutputArgs, SystemArgs};
use crate::table::{self, Meta};
use crate::{state_file, Failure};

/// Runs one command; `Ok(false)` means a stability verdict failed.
pub fn run(cmd: Command) -> Result<bool, Failure> {
    match cmd {
        Command::DispersionTime { system, k, tol, out } => {
            let (model, collision) = build(&system)?;
            let tol = tol.apply(&collision).time;
            let ks = wave_vectors(system.dim, &k)?;
            let points = time_sweep(&model, &ks)?;
            let meta = meta(&system, collision, tol);
            let pass = points.iter().all(|p| p.is_stable(tol));
            emit(&out, |w| match out.format {
                Format::Csv => table::write_time_csv(w, &meta, &points),
                Format::Json => table::write_json(w, &meta, &points, |p| p.is_stable(tol)),
            })?;
            let worst = points.iter().map(|p| p.min_im).fold(f64::INFINITY, f64::min);
            summary(pass, &format!("{} wave numbers, min Im Ω = {worst:.3e}", points.len()));
            Ok(pass)
        }
        Command::DispersionSpace {
            system,
            omega,
            tol,
            out,
        } => {
            if system.dim != 1 {
                return Err(Failure::Config(format!(
                    "spatial dispersion needs --dim 1, got {}",
                    system.dim
                )));
            }
            let (model, collision) = build(&system)?;
            let tol = tol.apply(&collision).product;
            let omegas = sweep_points(omega.omega_min, omega.omega_max, omega.omega_steps, true)?;
            let points = space_sweep_1d(&model, &omegas)?;
            let meta = meta(&system, collision, tol);
            let pass = points.iter().all(|p| p.is_stable(tol));
            emit(&out, |w| match out.format {
                Format::Csv => table::write_space_csv(w, &meta, &points),
                Format::Json => table::write_json(w, &meta, &points, |p| p.is_stable(tol)),
            })?;
            let worst = points.iter().map(|p| p.worst_product).fold(f64::NEG_INFINITY, f64::max);
            summary(
                pass,
                &format!("{} frequencies, worst k_r k_i/|k|² = {worst:.3e}", points.len()),
            );
            Ok(pass)
        }
        Command::Verify {
            system,
            k,
            omega,
            tol,
            output,
            state_file,
            rest_states,
            lemma_trials,
            lemma_size,
        } => {
            check_order(&system)?;
            let collision = system.collision();
            let mut cfg = VerifyConfig::new(system.dim, system.order, system.system.into(), collision.clone());
            cfg.rho0 = system.rho0;
            cfg.theta0 = system.theta0;
            cfg.sweep = sweep_config(&k, &omega);
            cfg.tolerances = tol.apply(&collision);
            cfg.rest_states = rest_states;
            cfg.lemma_trials = lemma_trials;
            cfg.lemma_size = lemma_size;
            if let Some(path) = &state_file {
                let basis = MomentBasis::new(system.dim, system.order)?;
                cfg.state = Some(state_file::load(path, &basis, system.rho0, system.theta0)?);
            }
            let report = verify(&cfg)?;
            let out = OutputArgs {
                output,
                format: Format::Json,
            };
            emit(&out, |mut w| {
                serde_json::to_writer_pretty(&mut w, &report).map_err(|e| Failure::Config(e.to_string()))?;
                writeln!(w).map_err(|e| Failure::Config(e.to_string()))
            })?;
            for c in report.stability.checks.iter().filter(|c| !c.pass) {
                eprintln!("failed: {} = {:.3e} (limit {:.3e})", c.name, c.value, c.limit);
            }
            for n in &report.notes {
                eprintln!("note: {n}");
            }
            summary(
                report.pass,
                &format!("{} D={} M={}", cfg.system.name(), cfg.dim, cfg.order),
            );
            Ok(report.pass)
        }
    }
}

fn check_order(system: &SystemArgs) -> Result<(), Failure> {
    if system.order < 3 {
        return Err(Failure::Config(format!(
            "--order must be at least 3, got {}",
            system.order
        )));
    }
    if system.system == crate::args::SystemName::Grad1d && system.dim != 1 {
        return Err(Failure::Config(format!("grad1d needs --dim 1, got {}", system.dim)));
    }
    Ok(())
}

fn build(system: &SystemArgs) -> Result<(LinearModel, hme_core::CollisionModel), Failure> {
    check_order(system)?;
    let collision = system.collision();
    let basis = MomentBasis::new(system.dim, system.order)?;
    let lin = linearize(&basis, system.rho0, system.theta0)?;
    let model = linear_model(System::from(system.system), &lin, collision.qbar(&basis)?)?;
    Ok((model, collision))
}

fn wave_vectors(dim: usize, k: &KSweep) -> Result<Vec<Vec<f64>>, Failure> {
    if dim == 1 {
        Ok(sweep_points(k.kmin, k.kmax, k.ksteps, k.log)?
            .into_iter()
            .map(|x| vec![x])
            .collect())
    } else {
        Ok(random_wave_vectors(dim, k.wave_vectors, k.kmin, k.kmax, k.seed)?)
    }
}

fn sweep_config(k: &KSweep, omega: &OmegaSweep) -> SweepConfig {
    SweepConfig {
        kmin: k.kmin,
        kmax: k.kmax,
        ksteps: k.ksteps,
        log: k.log,
        wave_vectors: k.wave_vectors,
        omega_min: omega.omega_min,
        omega_max: omega.omega_max,
        omega_steps: omega.omega_steps,
        seed: k.seed,
    }
}

fn meta(system: &SystemArgs, collision: hme_core::CollisionModel, tolerance: f64) -> Meta {
    Meta {
        dim: system.dim,
        order: system.order,
        system: System::from(system.system).name(),
        collision,
        tolerance,
    }
}

fn emit(out: &OutputArgs, write: impl FnOnce(&mut dyn Write) -> Result<(), Failure>) -> Result<(), Failure> {
    match &out.output {
        Some(path) => {
            let mut w = BufWriter::new(create(path)?);
            write(&mut w)?;
            w.flush()
                .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write(&mut w)
        }
    }
}

fn create(path: &Path) -> Result<File, Failure> {
    File::create(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn summary(pass: bool, detail: &str) {
    eprintln!("{} {detail}", if pass { "PASS" } else { "FAIL" });
}
