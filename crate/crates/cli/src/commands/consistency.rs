//! `consistency`: boundary-flux convergence toward the fine-grid surrogate
//! and decay of the regularisation component, with empirical rates.

use waveinv_core::time;
use waveinv_core::wave::{self, ObservationPair, WaveProblem};
use waveinv_core::Grid1D;

use crate::config::ConsistencyConfig;
use crate::csvio::{fmt_f64, fmt_opt, CsvTable};
use crate::runner::map_cells;
use crate::{CliError, CliResult, Outcome, RunContext};

pub fn run(ctx: &RunContext) -> CliResult<Outcome> {
    ctx.prepare()?;
    let solver = ctx.config.solver();
    let cfg: ConsistencyConfig = ctx.config.consistency.clone().unwrap_or_default();
    let max_n = *ctx.config.grids.iter().max().unwrap();
    let n_ref = solver.n_ref.unwrap_or(8 * max_n);
    if n_ref < 8 * max_n {
        return Err(CliError::Config(format!(
            "reference resolution n_ref = {n_ref} below 8 x largest grid {max_n}"
        )));
    }

    let cells: Vec<usize> = ctx.config.grids.clone();
    let results: Vec<CliResult<(usize, f64, f64, f64)>> = map_cells(ctx.jobs, cells, |n| {
        let grid = Grid1D::new(n)?;
        let axis = solver.axis(grid)?;
        let q = cfg.p.sample(grid);
        let traj = wave::solve(&WaveProblem::sample(grid, axis, q, &cfg.data))?;
        let obs = wave::observe(&traj)?;
        let reference =
            wave::reference_observation(|x| cfg.p.eval(x), &cfg.data, grid, axis, n_ref)?;
        let dflux: Vec<f64> = obs
            .flux_dt()
            .iter()
            .zip(reference.flux_dt())
            .map(|(a, b)| a - b)
            .collect();
        let flux_err = time::l2_norm_time(axis.dt(), &dflux);
        let tych_norm = obs.tych_l2();
        if cfg.dump_solution {
            dump_solution(ctx, n, &traj, &obs)?;
        }
        Ok((n, grid.h(), flux_err, tych_norm))
    });

    let mut table = CsvTable::create(
        &ctx.out_dir.join("consistency.csv"),
        &[
            "n",
            "h",
            "seed",
            "flux_err",
            "tych_norm",
            "flux_rate",
            "tych_rate",
        ],
    )?;
    let mut prev: Option<(f64, f64)> = None;
    let mut flux_rates = Vec::new();
    let mut tych_rates = Vec::new();
    for res in results {
        let (n, h, flux_err, tych_norm) = res?;
        let (fr, tr) = match prev {
            Some((pf, pt)) => {
                let fr = (pf / flux_err).log2();
                let tr = (pt / tych_norm).log2();
                flux_rates.push(fr);
                tych_rates.push(tr);
                (Some(fr), Some(tr))
            }
            None => (None, None),
        };
        prev = Some((flux_err, tych_norm));
        table.row(&[
            n.to_string(),
            fmt_f64(h),
            ctx.seed.to_string(),
            fmt_f64(flux_err),
            fmt_f64(tych_norm),
            fmt_opt(fr),
            fmt_opt(tr),
        ])?;
    }
    table.finish()?;

    if flux_rates.is_empty() {
        println!("consistency: single grid, no rates");
        return Ok(Outcome::Passed);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let fr = mean(&flux_rates);
    let tr = mean(&tych_rates);
    let ok = fr >= 0.5 && (0.7..=1.3).contains(&tr);
    println!(
        "consistency: mean flux rate {fr:.3} (gate >= 0.5), mean tych rate {tr:.3} (gate 1 +- 0.3) -> {}",
        if ok { "pass" } else { "FAIL" }
    );
    Ok(if ok { Outcome::Passed } else { Outcome::GateFailed })
}

fn dump_solution(
    ctx: &RunContext,
    n: usize,
    traj: &wave::Trajectory,
    obs: &ObservationPair,
) -> CliResult<()> {
    let axis = traj.axis();
    let grid = traj.grid();
    let mut t_table = CsvTable::create(
        &ctx.out_dir.join(format!("trajectory_n{n}.csv")),
        &["n", "t", "j", "x", "y"],
    )?;
    for m in 0..axis.num_points() {
        let state = traj.state(m);
        for j in 0..grid.num_nodes() {
            t_table.row(&[
                m.to_string(),
                fmt_f64(axis.t(m)),
                j.to_string(),
                fmt_f64(grid.node(j)),
                fmt_f64(state.at(j)),
            ])?;
        }
    }
    t_table.finish()?;

    let mut f_table = CsvTable::create(
        &ctx.out_dir.join(format!("observation_flux_n{n}.csv")),
        &["n", "t", "flux_dt"],
    )?;
    for (m, v) in obs.flux_dt().iter().enumerate() {
        f_table.row(&[m.to_string(), fmt_f64(axis.t(m)), fmt_f64(*v)])?;
    }
    f_table.finish()?;

    let mut y_table = CsvTable::create(
        &ctx.out_dir.join(format!("observation_tych_n{n}.csv")),
        &["n", "t", "j", "tych"],
    )?;
    for (m, face) in obs.tych().iter().enumerate() {
        for k in 0..grid.num_faces() {
            y_table.row(&[
                m.to_string(),
                fmt_f64(axis.t(m)),
                k.to_string(),
                fmt_f64(face.at(k)),
            ])?;
        }
    }
    y_table.finish()?;
    Ok(())
}
