//! `identities`: the stencil-calculus identity suite over seeded random
//! inputs, gated at 1e-12.

use waveinv_core::identities::{self, Identity};
use waveinv_core::rng;
use waveinv_core::Grid1D;

use crate::csvio::{fmt_f64, CsvTable};
use crate::runner::map_cells;
use crate::{CliResult, Outcome, RunContext};

const GATE: f64 = 1e-12;

pub fn run(ctx: &RunContext) -> CliResult<Outcome> {
    ctx.prepare()?;
    let cfg = ctx.config.identities.clone().unwrap_or_default();
    let seed = ctx.seed;

    struct Cell {
        n: usize,
        grid_index: usize,
    }
    let cells: Vec<Cell> = ctx
        .config
        .grids
        .iter()
        .enumerate()
        .map(|(grid_index, &n)| Cell { n, grid_index })
        .collect();

    let fault = cfg.fault_injection;
    let trials = cfg.trials.max(1);
    let results = map_cells(ctx.jobs, cells, |cell| -> CliResult<_> {
        let grid = Grid1D::new(cell.n)?;
        let mut worst = vec![0.0f64; identities::ALL.len()];
        for trial in 0..trials {
            let stream = (cell.grid_index as u64) * 1_000_000 + trial as u64;
            let mut r = rng::seeded(seed, stream);
            let f = rng::random_node_fn(grid, &mut r, false);
            let g = rng::random_node_fn(grid, &mut r, false);
            let mut v = rng::random_node_fn(grid, &mut r, true);
            if let Some(fault) = fault {
                // corrupt the zero-boundary hypothesis on purpose
                v.vals_mut()[0] = fault;
            }
            for (i, (_, err)) in identities::eval_all(&f, &g, &v).into_iter().enumerate() {
                worst[i] = worst[i].max(err);
            }
        }
        Ok((cell.n, grid.h(), worst))
    });

    let mut table = CsvTable::create(
        &ctx.out_dir.join("identities.csv"),
        &["identity", "n", "h", "seed", "max_rel_err"],
    )?;
    let mut all_ok = true;
    let mut worst_row: Option<(Identity, usize, f64)> = None;
    for res in results {
        let (n, h, worst) = res?;
        for (i, id) in identities::ALL.iter().enumerate() {
            table.row(&[
                id.name().to_string(),
                n.to_string(),
                fmt_f64(h),
                ctx.seed.to_string(),
                fmt_f64(worst[i]),
            ])?;
            if worst[i] > GATE {
                all_ok = false;
            }
            if worst_row.map(|(_, _, w)| worst[i] > w).unwrap_or(true) {
                worst_row = Some((*id, n, worst[i]));
            }
        }
    }
    table.finish()?;

    if let Some((id, n, w)) = worst_row {
        println!(
            "identities: worst {} at N={n}: {:.3e} (gate {GATE:.0e}) -> {}",
            id.name(),
            w,
            if all_ok { "pass" } else { "FAIL" }
        );
    }
    Ok(if all_ok {
        Outcome::Passed
    } else {
        Outcome::GateFailed
    })
}
