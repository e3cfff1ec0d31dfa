//! The five subcommand bodies. Grid-shaped work (sweep, phase) runs on a
//! rayon pool sized by `--workers` and gathers rows in grid order, so the
//! emitted bytes do not depend on the worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use dqd_core::entanglement::{closed_form_from_rho4, random_axial_rho4, wootters_concurrence};
use dqd_core::model::{hybridization_width, ModelSpec, Topology};
use dqd_core::pipeline::{solve, SolveOptions};
use dqd_core::scales::{
    critical_j_analytic, haldane_tk, rkky_estimate, two_stage_tk2, JcOutcome, ScaleConstants,
    ONSET_THRESHOLD,
};

use crate::config::{
    grid_points, load_or_default, merge_constants, merge_model, merge_phase, merge_sweep,
    solve_options, CommonArgs, ConstantArgs, EngineArgs, ModelArgs, ModelSettings, PhaseGridArgs,
    SweepArgs,
};
use crate::fail::{error_slug, Failure};
use crate::table::{
    document, emit, result_row, sig, PHASE_HEADER, RESULT_HEADER, SCALES_HEADER,
};

/// Tolerance of the oracle self-check.
const ORACLE_TOL: f64 = 1e-10;

fn run_pool<T: Send>(
    workers: Option<usize>,
    job: impl FnOnce() -> T + Send,
) -> Result<T, Failure> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Failure::config(format!("workers: {e}")))?;
    Ok(pool.install(job))
}

pub fn cmd_solve(
    common: &CommonArgs,
    engine: &EngineArgs,
    model_flags: &ModelArgs,
) -> Result<(), Failure> {
    let file = load_or_default(&common.config)?;
    let model = merge_model(&file.model, model_flags)?;
    let opts = solve_options(engine);
    let spec = model.spec();
    let point = solve(&spec, &opts).map_err(Failure::from)?;
    let content = document(RESULT_HEADER, &[result_row(&spec, &Ok(point))]);
    emit(common.out.as_deref(), &content)
}

pub fn cmd_sweep(
    common: &CommonArgs,
    engine: &EngineArgs,
    model_flags: &ModelArgs,
    sweep_flags: &SweepArgs,
) -> Result<(), Failure> {
    let file = load_or_default(&common.config)?;
    let model = merge_model(&file.model, model_flags)?;
    let sweep = merge_sweep(&file.sweep, sweep_flags)?;
    let opts = solve_options(engine);
    let grid = grid_points(sweep.min, sweep.max, sweep.count, sweep.spacing);
    let rows: Vec<String> = run_pool(engine.workers, || {
        grid.par_iter()
            .map(|&value| {
                let spec = model.at(sweep.axis, value);
                let outcome = solve(&spec, &opts);
                result_row(&spec, &outcome)
            })
            .collect()
    })?;
    emit(common.out.as_deref(), &document(RESULT_HEADER, &rows))
}

pub fn cmd_phase(
    common: &CommonArgs,
    engine: &EngineArgs,
    model_flags: &ModelArgs,
    grid_flags: &PhaseGridArgs,
    const_flags: &ConstantArgs,
) -> Result<(), Failure> {
    let file = load_or_default(&common.config)?;
    let model = merge_model(&file.model, model_flags)?;
    let phase = merge_phase(&file.phase, grid_flags)?;
    let consts = merge_constants(&file.constants, const_flags)?;
    let opts = solve_options(engine);
    let rows: Vec<String> = run_pool(engine.workers, || {
        phase
            .u_over_gamma
            .par_iter()
            .map(|&ratio| phase_row(&model, ratio, (phase.t_lo, phase.t_hi), &consts, &opts))
            .collect()
    })?;
    emit(common.out.as_deref(), &document(PHASE_HEADER, &rows))
}

/// One boundary column: at fixed wiring (hence fixed Gamma) set
/// `U = ratio * Gamma`, then locate the concurrence onset numerically,
/// quote the analytic critical coupling, find where the spin correlator
/// crosses -1/4, and record the charge fluctuation at the onset.
fn phase_row(
    model: &ModelSettings,
    ratio: f64,
    bracket: (f64, f64),
    consts: &ScaleConstants,
    opts: &SolveOptions,
) -> String {
    let nan = f64::NAN;
    let gamma = match hybridization_width(&model.spec()) {
        Ok(g) => g.value(),
        Err(e) => {
            let cols = [sig(ratio), sig(nan), sig(nan), sig(nan), sig(nan), sig(nan),
                sig(nan), sig(nan), sig(nan)];
            return format!("{},error:{}", cols.join(","), error_slug(&e));
        }
    };
    let u = ratio * gamma;
    let mut settings = *model;
    settings.u = u;
    let template = settings.spec();

    let t_k = haldane_tk(u, gamma).unwrap_or(nan);
    let j_analytic = critical_j_analytic(settings.topology, u, gamma, consts)
        .map(|est| est.j_c)
        .unwrap_or(nan);

    let mut status = "ok".to_string();
    let (j_c, t_c, dn2_at_jc) =
        match dqd_core::scales::find_jc_numeric(&template, bracket, ONSET_THRESHOLD, opts) {
            Ok(JcOutcome::Crossing(est)) => {
                let dn2 = solve(&ModelSpec { t: est.t_c, ..template }, opts)
                    .map(|p| p.correlators.dn2_a)
                    .unwrap_or(nan);
                (est.j_c, est.t_c, dn2)
            }
            Ok(JcOutcome::NoCrossing { .. }) => {
                status = "error:no_crossing".to_string();
                (nan, nan, nan)
            }
            Err(e) => {
                status = format!("error:{}", error_slug(&e));
                (nan, nan, nan)
            }
        };

    let j_quarter = match quarter_crossing(&template, bracket, opts) {
        Ok(Some(j)) => j,
        Ok(None) => nan,
        Err(e) => {
            if status == "ok" {
                status = format!("error:{}", error_slug(&e));
            }
            nan
        }
    };

    [
        sig(ratio),
        sig(u),
        sig(gamma),
        sig(t_k),
        sig(j_c),
        sig(t_c),
        sig(j_analytic),
        sig(j_quarter),
        sig(dn2_at_jc),
        status,
    ]
    .join(",")
}

/// Exchange where `<S_A . S_B>` crosses -1/4, by bisection on the
/// interdot hopping; `None` when the correlator does not straddle -1/4
/// inside the bracket.
fn quarter_crossing(
    template: &ModelSpec,
    bracket: (f64, f64),
    opts: &SolveOptions,
) -> Result<Option<f64>, dqd_core::Error> {
    let spin_dot = |t: f64| -> Result<f64, dqd_core::Error> {
        Ok(solve(&ModelSpec { t, ..*template }, opts)?.correlators.spin_dot)
    };
    let (mut lo, mut hi) = bracket;
    let f_lo = spin_dot(lo)? + 0.25;
    let f_hi = spin_dot(hi)? + 0.25;
    if (f_lo > 0.0) == (f_hi > 0.0) {
        return Ok(None);
    }
    let falling = f_hi < 0.0;
    while hi - lo > 1e-3 * hi {
        let mid = 0.5 * (lo + hi);
        let f = spin_dot(mid)? + 0.25;
        if (f < 0.0) == falling {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let t_q = 0.5 * (lo + hi);
    Ok(Some(4.0 * t_q * t_q / template.u))
}

/// Flags of the scales table; the formula inputs are explicit here rather
/// than drawn from a model spec.
#[derive(clap::Args, Debug)]
pub struct ScalesArgs {
    /// On-dot Coulomb repulsion U.
    #[arg(long)]
    pub u: f64,
    /// Hybridization width quoted for the geometry.
    #[arg(long)]
    pub gamma: f64,
    /// Interdot exchange J fed to the two-stage formula.
    #[arg(long)]
    pub j: f64,
}

pub fn cmd_scales(
    common: &CommonArgs,
    args: &ScalesArgs,
    const_flags: &ConstantArgs,
) -> Result<(), Failure> {
    let file = load_or_default(&common.config)?;
    let consts = merge_constants(&file.constants, const_flags)?;
    let as_config = |e: dqd_core::Error| Failure::config(e.to_string());
    let t_k = haldane_tk(args.u, args.gamma).map_err(as_config)?;
    let t_k2 = two_stage_tk2(args.j, t_k, &consts).map_err(as_config)?;
    let j_rkky = rkky_estimate(args.gamma, args.u, &consts).map_err(as_config)?;
    let mut j_c = [0.0; 3];
    for (slot, topology) in j_c
        .iter_mut()
        .zip([Topology::Series, Topology::SideCoupled, Topology::Parallel])
    {
        *slot = critical_j_analytic(topology, args.u, args.gamma, &consts)
            .map_err(as_config)?
            .j_c;
    }
    let row = [
        sig(args.u),
        sig(args.gamma),
        sig(args.j),
        sig(consts.d1),
        sig(consts.d2),
        sig(consts.c),
        sig(t_k),
        sig(t_k2),
        sig(j_rkky),
        sig(j_c[0]),
        sig(j_c[1]),
        sig(j_c[2]),
        "ok".to_string(),
    ]
    .join(",");
    emit(common.out.as_deref(), &document(SCALES_HEADER, &[row]))
}

/// Flags of the oracle self-check.
#[derive(clap::Args, Debug)]
pub struct OracleArgs {
    /// RNG seed for the random density matrices.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Number of random matrices to compare.
    #[arg(long, default_value_t = 1000)]
    pub count: u64,
    /// Corrupt the comparison to exercise the failure path.
    #[arg(long, hide = true)]
    pub corrupt: bool,
}

pub fn cmd_oracle_check(common: &CommonArgs, args: &OracleArgs) -> Result<(), Failure> {
    if args.count == 0 {
        return Err(Failure::config("--count must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut worst = f64::NEG_INFINITY;
    let mut worst_rho = None;
    for _ in 0..args.count {
        let rho = random_axial_rho4(&mut rng);
        let closed = closed_form_from_rho4(&rho)
            .map_err(|e| Failure::numerical(format!("closed form: {e}")))?;
        let closed = if args.corrupt { closed + 1e-6 } else { closed };
        let oracle = wootters_concurrence(&rho)
            .map_err(|e| Failure::numerical(format!("spin-flip construction: {e}")))?;
        let deviation = (closed - oracle).abs();
        if deviation > worst {
            worst = deviation;
            worst_rho = Some(rho);
        }
    }
    let pass = worst <= ORACLE_TOL;
    let summary = format!(
        "oracle-check: seed={} count={} max_deviation={}\n{}\n",
        args.seed,
        args.count,
        sig(worst),
        if pass { "PASS" } else { "FAIL" }
    );
    emit(common.out.as_deref(), &summary)?;
    if pass {
        Ok(())
    } else {
        if let Some(rho) = worst_rho {
            eprintln!("worst-case density matrix (row per line, re+im pairs):");
            for r in 0..4 {
                let cells: Vec<String> = (0..4)
                    .map(|c| format!("{:+.17e}{:+.17e}i", rho[(r, c)].re, rho[(r, c)].im))
                    .collect();
                eprintln!("  {}", cells.join("  "));
            }
        }
        Err(Failure::check(format!(
            "max deviation {} exceeds tolerance {ORACLE_TOL:.0e}",
            sig(worst)
        )))
    }
}
