//! Reference search methods over the coarse design space.
//!
//! These exist to calibrate the policy-gradient searcher: every method
//! here sees the same flattened index space, the same evaluation budget
//! (`eps` genome evaluations), and the same scoring path, so their results
//! are directly comparable. None of them learns anything across
//! evaluations beyond what its classic formulation keeps (a current point,
//! a temperature, a population).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::search_space::{
    genome_cost, BestTracker, CoarseSpace, GenomeRepr, SearchContext, SearchResult,
};

/// Which baseline to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineMethod {
    /// Lexicographic lattice walk with a stride.
    Grid,
    /// Uniform independent samples.
    Random,
    /// Simulated annealing with single-digit neighborhood moves.
    Annealing,
    /// Generational genetic search with tournament selection.
    Genetic,
}

impl BaselineMethod {
    pub fn name(self) -> &'static str {
        match self {
            BaselineMethod::Grid => "grid",
            BaselineMethod::Random => "random",
            BaselineMethod::Annealing => "sa",
            BaselineMethod::Genetic => "ga",
        }
    }

    pub fn parse(s: &str) -> Option<BaselineMethod> {
        match s {
            "grid" => Some(BaselineMethod::Grid),
            "random" => Some(BaselineMethod::Random),
            "sa" => Some(BaselineMethod::Annealing),
            "ga" => Some(BaselineMethod::Genetic),
            _ => None,
        }
    }
}

/// Shared budget plus per-method parameters. `eps` caps the number of
/// genome evaluations for every method; each method stops exactly there
/// (grid may stop earlier if it exhausts the lattice).
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineCfg {
    pub method: BaselineMethod,
    pub eps: u64,
    pub seed: u64,
    /// Grid: lattice stride per digit.
    pub grid_stride: usize,
    /// Annealing: starting and final temperature of the exponential decay.
    pub sa_t0: f64,
    pub sa_t_end: f64,
    /// Annealing: neighborhood radius in level steps.
    pub sa_step: usize,
    /// Annealing: restart from a fresh random point after this many
    /// consecutive infeasible evaluations.
    pub sa_restart_after: u32,
    /// Genetic: population per generation.
    pub ga_population: usize,
    /// Genetic: probability of single-point crossover (else the child is a
    /// clone of its first parent).
    pub ga_crossover: f64,
    /// Genetic: per-digit mutation probability.
    pub ga_mutation: f64,
}

impl BaselineCfg {
    pub fn new(method: BaselineMethod, eps: u64, seed: u64) -> BaselineCfg {
        BaselineCfg {
            method,
            eps,
            seed,
            grid_stride: 1,
            sa_t0: 10.0,
            sa_t_end: 0.1,
            sa_step: 1,
            sa_restart_after: 100,
            ga_population: 100,
            ga_crossover: 0.05,
            ga_mutation: 0.05,
        }
    }
}

/// Runs the configured baseline. All methods return the same result shape
/// as the other searchers in the crate; ticks count evaluations.
pub fn run_baseline(ctx: &SearchContext, cfg: &BaselineCfg) -> Result<SearchResult> {
    if cfg.eps == 0 {
        return Err(Error::InvalidConfig(
            "evaluation budget must be >= 1".to_string(),
        ));
    }
    match cfg.method {
        BaselineMethod::Grid => grid_search(ctx, cfg),
        BaselineMethod::Random => random_search(ctx, cfg),
        BaselineMethod::Annealing => simulated_annealing(ctx, cfg),
        BaselineMethod::Genetic => genetic_global(ctx, cfg),
    }
}

/// Walks the lattice in lexicographic order, visiting every `stride`-th
/// level per digit, until the budget runs out or the walk wraps.
pub fn grid_search(ctx: &SearchContext, cfg: &BaselineCfg) -> Result<SearchResult> {
    if cfg.grid_stride == 0 {
        return Err(Error::InvalidConfig(
            "grid stride must be >= 1".to_string(),
        ));
    }
    let space = CoarseSpace::new(ctx);
    let mut tracker = BestTracker::new();
    let mut point = space.origin();
    loop {
        let tick = tracker.evaluations() + 1;
        let genome = space.decode(&point);
        let cost = genome_cost(ctx, &genome)?;
        tracker.observe(tick, &cost, || GenomeRepr::Coarse(genome.clone()));
        if tracker.evaluations() >= cfg.eps || !space.advance_lex(&mut point, cfg.grid_stride) {
            break;
        }
    }
    let total = tracker.evaluations();
    Ok(tracker.finish(total))
}

/// Scores `eps` points drawn uniformly at random.
pub fn random_search(ctx: &SearchContext, cfg: &BaselineCfg) -> Result<SearchResult> {
    let space = CoarseSpace::new(ctx);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut tracker = BestTracker::new();
    for tick in 1..=cfg.eps {
        let genome = space.decode(&space.random_point(&mut rng));
        let cost = genome_cost(ctx, &genome)?;
        tracker.observe(tick, &cost, || GenomeRepr::Coarse(genome.clone()));
    }
    Ok(tracker.finish(cfg.eps))
}

/// Classic annealing over the lattice. Infeasible points act as +inf
/// energy: they are never accepted from a feasible state, and a long
/// streak of them triggers a restart from a fresh random point.
pub fn simulated_annealing(ctx: &SearchContext, cfg: &BaselineCfg) -> Result<SearchResult> {
    if cfg.sa_step == 0 {
        return Err(Error::InvalidConfig(
            "annealing step must be >= 1".to_string(),
        ));
    }
    let space = CoarseSpace::new(ctx);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut tracker = BestTracker::new();

    let fitness = |cost: &crate::search_space::GenomeCost| {
        if cost.feasible {
            cost.value
        } else {
            f64::INFINITY
        }
    };

    let mut current = space.random_point(&mut rng);
    let genome = space.decode(&current);
    let cost = genome_cost(ctx, &genome)?;
    tracker.observe(1, &cost, || GenomeRepr::Coarse(genome.clone()));
    let mut current_fit = fitness(&cost);
    let mut infeasible_streak: u32 = if cost.feasible { 0 } else { 1 };

    for tick in 2..=cfg.eps {
        // Exponential temperature decay across the whole budget.
        let progress = (tick - 1) as f64 / (cfg.eps - 1).max(1) as f64;
        let temp = cfg.sa_t0 * (cfg.sa_t_end / cfg.sa_t0).powf(progress);

        let restart = infeasible_streak >= cfg.sa_restart_after;
        let candidate = if restart {
            space.random_point(&mut rng)
        } else {
            space.neighbor(&current, cfg.sa_step, &mut rng)
        };
        let genome = space.decode(&candidate);
        let cost = genome_cost(ctx, &genome)?;
        tracker.observe(tick, &cost, || GenomeRepr::Coarse(genome.clone()));
        let cand_fit = fitness(&cost);

        infeasible_streak = if cost.feasible {
            0
        } else {
            infeasible_streak + 1
        };

        let accept = if restart {
            true
        } else if cand_fit <= current_fit {
            true
        } else {
            // cand_fit > current_fit implies both are finite here, so the
            // ratio below is well defined.
            rng.gen::<f64>() < (-(cand_fit - current_fit) / temp).exp()
        };
        if accept {
            current = candidate;
            current_fit = cand_fit;
        }
    }
    Ok(tracker.finish(cfg.eps))
}

/// Generational genetic search over digit vectors: 2-way tournaments pick
/// parents, single-point crossover and per-digit resampling produce
/// children, and the best individual survives unchanged. The final
/// generation is truncated so the total evaluation count lands exactly on
/// the budget.
pub fn genetic_global(ctx: &SearchContext, cfg: &BaselineCfg) -> Result<SearchResult> {
    if cfg.ga_population < 2 {
        return Err(Error::InvalidConfig(format!(
            "population must be >= 2, got {}",
            cfg.ga_population
        )));
    }
    let space = CoarseSpace::new(ctx);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut tracker = BestTracker::new();

    let evaluate = |pop: &[Vec<usize>],
                    tracker: &mut BestTracker|
     -> Result<Vec<f64>> {
        let mut fits = Vec::with_capacity(pop.len());
        for point in pop {
            let tick = tracker.evaluations() + 1;
            let genome = space.decode(point);
            let cost = genome_cost(ctx, &genome)?;
            tracker.observe(tick, &cost, || GenomeRepr::Coarse(genome.clone()));
            fits.push(if cost.feasible {
                cost.value
            } else {
                f64::INFINITY
            });
        }
        Ok(fits)
    };

    let first = (cfg.ga_population as u64).min(cfg.eps) as usize;
    let mut pop: Vec<Vec<usize>> = (0..first).map(|_| space.random_point(&mut rng)).collect();
    let mut fits = evaluate(&pop, &mut tracker)?;

    while tracker.evaluations() < cfg.eps {
        let tournament = |rng: &mut ChaCha8Rng, fits: &[f64]| -> usize {
            let a = rng.gen_range(0..fits.len());
            let b = rng.gen_range(0..fits.len());
            if fits[b] < fits[a] {
                b
            } else {
                a
            }
        };
        let elite = (0..pop.len())
            .min_by(|&a, &b| fits[a].partial_cmp(&fits[b]).unwrap().then(a.cmp(&b)))
            .unwrap();

        let mut next: Vec<Vec<usize>> = vec![pop[elite].clone()];
        while next.len() < cfg.ga_population {
            let p1 = tournament(&mut rng, &fits);
            let p2 = tournament(&mut rng, &fits);
            let mut child = if pop[p1].len() >= 2 && rng.gen::<f64>() < cfg.ga_crossover {
                let cut = rng.gen_range(1..pop[p1].len());
                let mut c = pop[p1][..cut].to_vec();
                c.extend_from_slice(&pop[p2][cut..]);
                c
            } else {
                pop[p1].clone()
            };
            for (digit, &dim) in child.iter_mut().zip(&space.dims) {
                if rng.gen::<f64>() < cfg.ga_mutation {
                    *digit = rng.gen_range(0..dim);
                }
            }
            next.push(child);
        }
        // Truncate the last generation to land exactly on the budget.
        let room = (cfg.eps - tracker.evaluations()) as usize;
        next.truncate(room.min(cfg.ga_population));
        fits = evaluate(&next, &mut tracker)?;
        pop = next;
    }
    Ok(tracker.finish(cfg.eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost_model::{DataflowStyle, HwConstants};
    use crate::search_space::{
        exhaustive_oracle, ActionLevels, ConstraintKind, ConstraintSpec, DataflowChoice,
        Deployment, Objective, EXHAUSTIVE_GUARD,
    };
    use crate::workloads::{builtin, ModelDesc};

    fn toy_ctx<'a>(
        model: &'a ModelDesc,
        levels: &'a ActionLevels,
        hw: &'a HwConstants,
    ) -> SearchContext<'a> {
        SearchContext {
            model,
            levels,
            dataflow: DataflowChoice::Fixed(DataflowStyle::Dla),
            constraint: ConstraintSpec::unconstrained(Deployment::LayerPipelined),
            objective: Objective::LATENCY_SUM,
            hw,
        }
    }

    #[test]
    fn grid_with_unit_stride_matches_oracle() {
        let model = builtin("toy2").unwrap();
        let levels = ActionLevels::truncated(4).unwrap();
        let hw = HwConstants::default();
        let ctx = toy_ctx(&model, &levels, &hw);
        let oracle = exhaustive_oracle(&ctx, EXHAUSTIVE_GUARD).unwrap();
        let grid = grid_search(&ctx, &BaselineCfg::new(BaselineMethod::Grid, 10_000, 0)).unwrap();
        assert_eq!(grid.best_value, oracle.best_value);
        assert_eq!(grid.best_genome, oracle.best_genome);
        // full lattice is 256 points; the walk stops when it wraps
        assert_eq!(grid.evaluations, 256);
    }

    #[test]
    fn grid_respects_budget_and_stride() {
        let model = builtin("toy2").unwrap();
        let levels = ActionLevels::truncated(4).unwrap();
        let hw = HwConstants::default();
        let ctx = toy_ctx(&model, &levels, &hw);
        let mut cfg = BaselineCfg::new(BaselineMethod::Grid, 100, 0);
        let r = grid_search(&ctx, &cfg).unwrap();
        assert_eq!(r.evaluations, 100);
        cfg.grid_stride = 2;
        cfg.eps = 10_000;
        let r = grid_search(&ctx, &cfg).unwrap();
        assert_eq!(r.evaluations, 16); // 2^4 strided points
    }

    #[test]
    fn random_search_spends_exact_budget() {
        let model = builtin("toy2").unwrap();
        let levels = ActionLevels::truncated(4).unwrap();
        let hw = HwConstants::default();
        let ctx = toy_ctx(&model, &levels, &hw);
        let cfg = BaselineCfg::new(BaselineMethod::Random, 333, 7);
        let a = random_search(&ctx, &cfg).unwrap();
        let b = random_search(&ctx, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.evaluations, 333);
        assert!(a.feasible);
    }

    #[test]
    fn annealing_spends_exact_budget_and_tracks_best() {
        let model = builtin("toy2").unwrap();
        let levels = ActionLevels::truncated(4).unwrap();
        let hw = HwConstants::default();
        let mut ctx = toy_ctx(&model, &levels, &hw);
        ctx.constraint.kind = ConstraintKind::Area(3000.0);
        let cfg = BaselineCfg::new(BaselineMethod::Annealing, 500, 11);
        let a = simulated_annealing(&ctx, &cfg).unwrap();
        let b = simulated_annealing(&ctx, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.evaluations, 500);
        if a.feasible {
            let best = a.best_genome.as_ref().unwrap();
            let cost = crate::search_space::repr_cost(&ctx, best).unwrap();
            assert!(cost.feasible);
            assert_eq!(cost.value, a.best_value);
        }
    }

    #[test]
    fn annealing_restarts_out_of_infeasible_regions() {
        // Budget so tight that only the very smallest designs fit: the
        // walker must restart its way to one.
        let model = builtin("toy2").unwrap();
        let levels = ActionLevels::default_levels();
        let hw = HwConstants::default();
        let mut ctx = toy_ctx(&model, &levels, &hw);
        ctx.constraint.kind = ConstraintKind::Counts { pe: 3, buf: 60 };
        let cfg = BaselineCfg::new(BaselineMethod::Annealing, 3000, 5);
        let r = simulated_annealing(&ctx, &cfg).unwrap();
        assert!(r.feasible, "annealing should escape via restarts");
    }

    #[test]
    fn genetic_budget_is_exact_even_when_not_a_multiple() {
        let model = builtin("toy2").unwrap();
        let levels = ActionLevels::truncated(4).unwrap();
        let hw = HwConstants::default();
        let ctx = toy_ctx(&model, &levels, &hw);
        for eps in [50, 100, 250, 437] {
            let cfg = BaselineCfg::new(BaselineMethod::Genetic, eps, 3);
            let r = genetic_global(&ctx, &cfg).unwrap();
            assert_eq!(r.evaluations, eps);
        }
    }

    #[test]
    fn genetic_is_deterministic_and_consistent() {
        let model = builtin("toy2").unwrap();
        let levels = ActionLevels::truncated(4).unwrap();
        let hw = HwConstants::default();
        let ctx = toy_ctx(&model, &levels, &hw);
        let cfg = BaselineCfg::new(BaselineMethod::Genetic, 400, 21);
        let a = genetic_global(&ctx, &cfg).unwrap();
        let b = genetic_global(&ctx, &cfg).unwrap();
        assert_eq!(a, b);
        let best = a.best_genome.as_ref().unwrap();
        let cost = crate::search_space::repr_cost(&ctx, best).unwrap();
        assert_eq!(cost.value, a.best_value);
    }

    #[test]
    fn dispatch_covers_all_methods() {
        let model = builtin("toy2").unwrap();
        let levels = ActionLevels::truncated(3).unwrap();
        let hw = HwConstants::default();
        let ctx = toy_ctx(&model, &levels, &hw);
        for method in [
            BaselineMethod::Grid,
            BaselineMethod::Random,
            BaselineMethod::Annealing,
            BaselineMethod::Genetic,
        ] {
            let r = run_baseline(&ctx, &BaselineCfg::new(method, 120, 1)).unwrap();
            assert!(r.feasible, "{} found nothing on an open space", method.name());
            assert!(r.trace.last().unwrap().value.is_finite());
        }
        assert!(matches!(
            run_baseline(&ctx, &BaselineCfg::new(BaselineMethod::Grid, 0, 1)),
            Err(Error::InvalidConfig(_))
        ));
    }
}
