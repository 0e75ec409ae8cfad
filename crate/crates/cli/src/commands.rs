use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use schurscape::classical::{norm_landscape, norm_landscape_series, poincare_section, ClassicalMap, NormLandscape};
use schurscape::compare::{jsd, scan_landscapes};
use schurscape::density::{solve_threshold, SupportMode};
use schurscape::io::fmt17;
use schurscape::linalg::{dot, random_gaussian_matrix};
use schurscape::model::{build_floquet, su2_propagator, su2_schur_reference, FloquetOperator, Su2Params};
use schurscape::phasespace::{husimi_sum_columns, CoherentFactory, Field, HusimiSum};
use schurscape::spectral::{
    norm_operator_trajectory_against, ordered_schur, schur_fraction_sets, top_n_set, OrderedSchur, QuasiEnergySet,
};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::Output;

struct Spectrum {
    op: FloquetOperator,
    schur: OrderedSchur,
    q: QuasiEnergySet,
}

fn spectrum(cfg: &RunConfig) -> Result<Spectrum, CliError> {
    let params = cfg.rotor()?;
    let start = Instant::now();
    let op = build_floquet(&params)?;
    let schur = ordered_schur(&op.matrix)?;
    let q = QuasiEnergySet::from_eigenvalues(schur.eigenvalues(), params.hbar(), cfg.spectral.tol_mu)?;
    log::info!("ordered Schur form of N = {} in {:.2?}", params.n, start.elapsed());
    Ok(Spectrum { op, schur, q })
}

/// A Schur-vector set named in the config.
#[derive(Clone, Copy, Debug, PartialEq)]
enum StateSet {
    Mode(SupportMode),
    All,
}

fn state_set(cfg: &RunConfig) -> Result<StateSet, CliError> {
    match cfg.density.mode.as_str() {
        "all" => Ok(StateSet::All),
        m => m.parse().map(StateSet::Mode).map_err(|e: schurscape::Error| CliError::Config(e.to_string())),
    }
}

fn support_mode(cfg: &RunConfig) -> Result<SupportMode, CliError> {
    match state_set(cfg)? {
        StateSet::Mode(m) => Ok(m),
        StateSet::All => Err(CliError::Config("density mode 'all' only applies to husimi".into())),
    }
}

/// Schur indices of the configured set.
fn columns(cfg: &RunConfig, q: &QuasiEnergySet) -> Result<Vec<usize>, CliError> {
    let sets = schur_fraction_sets(q);
    Ok(match state_set(cfg)? {
        StateSet::All => (0..q.len()).collect(),
        StateSet::Mode(SupportMode::Gain) => sets.gain,
        StateSet::Mode(SupportMode::Stable) => sets.stable,
        StateSet::Mode(SupportMode::Loss) => sets.loss,
        StateSet::Mode(SupportMode::TopN) => {
            let n = cfg.density.count.ok_or_else(|| CliError::Config("top-n needs density.count".into()))?;
            top_n_set(q, n)?
        }
    })
}

fn quantum_husimi(cfg: &RunConfig, sp: &Spectrum, cols: &[usize]) -> Result<HusimiSum, CliError> {
    let start = Instant::now();
    let factory = CoherentFactory::new(sp.op.dim())?;
    let h = husimi_sum_columns(&sp.schur.v, cols, &cfg.grid()?, &factory)?;
    log::info!("Husimi sum of {} states in {:.2?}", cols.len(), start.elapsed());
    Ok(h)
}

fn husimi_meta(cfg: &RunConfig, count: usize) -> Vec<(String, String)> {
    let m = &cfg.model;
    vec![
        ("quantity".into(), "husimi_sum".into()),
        ("set".into(), cfg.density.mode.clone()),
        ("states".into(), count.to_string()),
        ("variant".into(), m.variant.clone()),
        ("n".into(), m.n.to_string()),
        ("k".into(), format!("{:?}", m.k)),
        ("gamma".into(), format!("{:?}", m.gamma)),
    ]
}

pub fn operator(cfg: &RunConfig) -> Result<(), CliError> {
    let out = Output::create("operator", cfg)?;
    let sp = spectrum(cfg)?;
    if cfg.output.binary {
        let mut w = std::io::BufWriter::new(std::fs::File::create(out.path("operator.bin"))?);
        sp.op.save(&mut w)?;
        w.flush()?;
    }
    out.csv("spectrum.csv", |w| sp.q.write_table(w))?;
    let (g, s, l) = sp.q.counts();
    let (fg, fs, fl) = sp.q.fractions();
    out.csv("fractions.csv", |w| {
        writeln!(w, "class,count,fraction")?;
        for (name, c, f) in [("gain", g, fg), ("stable", s, fs), ("loss", l, fl)] {
            writeln!(w, "{name},{c},{}", fmt17(f))?;
        }
        Ok(())
    })?;
    out.summary(vec![
        ("dimension", sp.op.dim().into()),
        ("gain", g.into()),
        ("stable", s.into()),
        ("loss", l.into()),
        ("f_gain", fg.into()),
        ("f_stable", fs.into()),
        ("f_loss", fl.into()),
        ("tol_mu", sp.q.tol_mu.into()),
        ("schur_residual", sp.schur.residual(&sp.op.matrix).into()),
        ("schur_unitarity_defect", sp.schur.unitarity_defect().into()),
    ])
}

pub fn husimi(cfg: &RunConfig) -> Result<(), CliError> {
    let out = Output::create("husimi", cfg)?;
    let sp = spectrum(cfg)?;
    let cols = columns(cfg, &sp.q)?;
    let h = quantum_husimi(cfg, &sp, &cols)?;
    out.field("husimi", &h.field, &husimi_meta(cfg, cols.len()))?;
    let mut summary = vec![
        ("set", cfg.density.mode.clone().into()),
        ("states", cols.len().into()),
        ("integral_in_planck_cells", (h.field.integral() * sp.op.dim() as f64).into()),
        ("min", h.field.min().into()),
        ("max", h.field.max().into()),
        ("orthonormality_defect", h.orthonormality_defect.into()),
    ];
    if let Some(w) = h.warning {
        summary.push(("warning", w.into()));
    }
    out.summary(summary)
}

fn build_landscape(cfg: &RunConfig) -> Result<NormLandscape, CliError> {
    let map = ClassicalMap::from_params(&cfg.rotor()?);
    let start = Instant::now();
    let l = norm_landscape(&map, &cfg.grid()?, cfg.landscape.t_f, &cfg.ensemble())?;
    log::info!("landscape at t_f = {} in {:.2?}", cfg.landscape.t_f, start.elapsed());
    Ok(l)
}

pub fn landscape(cfg: &RunConfig) -> Result<(), CliError> {
    let out = Output::create("landscape", cfg)?;
    let l = build_landscape(cfg)?;
    out.field("landscape", &l.ln_mean_w, &l.metadata())?;
    out.text("landscape_meta.txt", |w| l.write_metadata(w).map_err(std::io::Error::other))?;
    out.summary(vec![
        ("t_f", l.t_f.into()),
        ("min_ln_mean_w", l.ln_mean_w.min().into()),
        ("max_ln_mean_w", l.ln_mean_w.max().into()),
        ("samples", l.ensemble.samples.into()),
        ("sigma", l.ensemble.sigma.into()),
        ("seed", (l.ensemble.seed as usize).into()),
    ])
}

pub fn density(cfg: &RunConfig) -> Result<(), CliError> {
    let out = Output::create("density", cfg)?;
    let mode = support_mode(cfg)?;
    let n = cfg.model.n;
    let quantum = if cfg.density.compare || cfg.density.count.is_none() {
        let sp = spectrum(cfg)?;
        let cols = columns(cfg, &sp.q)?;
        let h = if cfg.density.compare { Some(quantum_husimi(cfg, &sp, &cols)?) } else { None };
        Some((cols.len(), h))
    } else {
        None
    };
    let count = match (cfg.density.count, &quantum) {
        (Some(c), _) => c,
        (None, Some((c, _))) => *c,
        (None, None) => unreachable!("spectrum computed when the count is open"),
    };
    let l = build_landscape(cfg)?;
    let d = solve_threshold(&l, mode, count, n)?;
    let mut meta = l.metadata();
    meta.push(("quantity".into(), "density".into()));
    meta.push(("mode".into(), mode.to_string()));
    meta.push(("delta".into(), format!("{:?}", d.delta())));
    out.field("density", &d.field, &meta)?;
    out.text("solver_log.txt", |w| d.write_log(w).map_err(std::io::Error::other))?;
    let mut summary = vec![
        ("mode", mode.to_string().into()),
        ("count", count.into()),
        ("t_f", l.t_f.into()),
        ("delta", d.delta().into()),
        ("integral", d.integral.into()),
        ("f_classical", d.fraction().into()),
        ("f_quantum", (count as f64 / n as f64).into()),
    ];
    if let Some((_, Some(h))) = &quantum {
        out.field("husimi", &h.field, &husimi_meta(cfg, count))?;
        summary.push(("jsd", jsd(&h.field, &d.field)?.into()));
    }
    out.summary(summary)
}

pub fn scan(cfg: &RunConfig) -> Result<(), CliError> {
    let out = Output::create("scan", cfg)?;
    let mode = support_mode(cfg)?;
    let times = cfg.scan_times()?;
    let sp = spectrum(cfg)?;
    let cols = columns(cfg, &sp.q)?;
    let count = cfg.density.count.unwrap_or(cols.len());
    let h = quantum_husimi(cfg, &sp, &cols)?;
    let map = ClassicalMap::from_params(&cfg.rotor()?);
    let start = Instant::now();
    let ls = norm_landscape_series(&map, &cfg.grid()?, &times, &cfg.ensemble())?;
    log::info!("{} landscapes in {:.2?}", ls.len(), start.elapsed());
    let result = scan_landscapes(&h.field, &ls, mode, count, cfg.model.n);
    out.csv("scan.csv", |w| result.write_csv(w))?;
    let mut summary = vec![("mode", mode.to_string().into()), ("count", count.into())];
    match result.argmin() {
        Some(best) => {
            summary.push(("argmin_t_f", best.t_f.into()));
            summary.push(("min_jsd", best.jsd.expect("successful row").into()));
            summary.push(("delta_at_min", best.delta.expect("successful row").into()));
            summary.push(("plateau", result.plateau().into()));
            if let Some(v) = result.window_variation(0.1) {
                summary.push(("variation_within_10_percent", v.into()));
            }
        }
        None => summary.push(("status", "every row failed".into())),
    }
    out.summary(summary)
}

pub fn su2_verify(cfg: &RunConfig) -> Result<(), CliError> {
    let out = Output::create("su2-verify", cfg)?;
    let s = &cfg.su2;
    let mut times = s.times.clone();
    times.sort_unstable();
    times.dedup();
    if times.is_empty() {
        return Err(CliError::Config("su2.times is empty".into()));
    }
    let (u, reference, label) = if s.generic {
        let u = random_gaussian_matrix(8, s.matrix_seed);
        let v = ordered_schur(&u)?.v;
        (u, v, "generic 8x8")
    } else {
        let p = Su2Params::new(s.dim, s.gamma)?;
        (su2_propagator(&p, s.tau)?, su2_schur_reference(&p)?, "su2")
    };
    // Numerical ordered Schur vectors against the reference, up to phases.
    let numeric = ordered_schur(&u)?;
    let reference_deviation = (0..u.ncols())
        .map(|k| 1.0 - dot(numeric.v.col_as_slice(k), reference.col_as_slice(k)).norm())
        .fold(0.0f64, f64::max);
    let runs = norm_operator_trajectory_against(&u, &reference, &times)?;
    out.csv("su2_overlaps.csv", |w| {
        writeln!(w, "t,index,overlap")?;
        for r in &runs {
            for (i, o) in r.report.overlaps.iter().enumerate() {
                writeln!(w, "{},{i},{}", r.report.t, fmt17(*o))?;
            }
        }
        Ok(())
    })?;
    out.csv("su2_convergence.csv", |w| {
        writeln!(w, "t,min_overlap,max_deviation,max_subspace_sine")?;
        for r in &runs {
            let m = r.report.min_overlap();
            writeln!(w, "{},{},{},{}", r.report.t, fmt17(m), fmt17(1.0 - m), fmt17(r.report.max_subspace_sine()))?;
        }
        Ok(())
    })?;
    let last = &runs.last().expect("non-empty").report;
    out.summary(vec![
        ("matrix", label.into()),
        ("dimension", u.ncols().into()),
        ("final_t", last.t.into()),
        ("final_min_overlap", last.min_overlap().into()),
        ("final_max_deviation", (1.0 - last.min_overlap()).into()),
        ("final_max_subspace_sine", last.max_subspace_sine().into()),
        ("schur_reference_deviation", reference_deviation.into()),
    ])
}

pub fn poincare(cfg: &RunConfig) -> Result<(), CliError> {
    let out = Output::create("poincare", cfg)?;
    let map = ClassicalMap::from_params(&cfg.rotor()?);
    let p = &cfg.poincare;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let seeds: Vec<(f64, f64)> = (0..p.seeds).map(|_| (rng.random::<f64>(), rng.random::<f64>() - 0.5)).collect();
    let points = poincare_section(&map, &seeds, p.steps)?;
    out.csv("poincare.csv", |w| {
        writeln!(w, "seed,step,q,p,in_loss_region")?;
        for (i, pt) in points.iter().enumerate() {
            writeln!(w, "{},{},{},{},{}", i / p.steps, i % p.steps + 1, fmt17(pt.q), fmt17(pt.p), pt.in_loss_region as u8)?;
        }
        Ok(())
    })?;
    // Occupancy raster for a quick look.
    let grid = cfg.grid()?;
    let mut occ = Field::constant(grid, 0.0);
    for pt in &points {
        let iq = ((pt.q * grid.nq as f64) as usize).min(grid.nq - 1);
        let ip = (((pt.p + 0.5) * grid.np as f64) as usize).min(grid.np - 1);
        occ.values[grid.index(iq, ip)] += 1.0;
    }
    out.field("occupancy", &occ, &[("quantity".into(), "visits".into())])?;
    let in_loss = points.iter().filter(|p| p.in_loss_region).count();
    out.summary(vec![
        ("points", points.len().into()),
        ("in_loss_region", in_loss.into()),
        ("occupied_cells", occ.values.iter().filter(|&&v| v > 0.0).count().into()),
    ])
}
