use pathfield::field::{generate_plan, FieldConfig, ForceWeights, PlannerMode, State};
use pathfield::geometry::SamplingRegion;
use pathfield::presets;
use pathfield::rrt::{rrt_plan, simplify_path, RrtConfig};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let scenario = presets::u_trap();
    let world = &scenario.world;
    let region = SamplingRegion::from_bounds(world.bounds);
    let rrt_cfg = RrtConfig::default();
    let weights = ForceWeights::default_for(world);
    let cfg = FieldConfig { mode: PlannerMode::Prior, ..FieldConfig::default() };
    for seed in 0..6u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let result =
            rrt_plan(scenario.start, scenario.goal, world, &region, &rrt_cfg, &mut rng).unwrap();
        let path = simplify_path(&result.path.unwrap(), world, rrt_cfg.inflation);
        println!(
            "seed {seed}: len={:.1} verts={:?}",
            path.total_length(),
            path.vertices().iter().map(|p| (p.x.round(), p.y.round())).collect::<Vec<_>>()
        );
        let plan = generate_plan(
            State::at(scenario.start),
            scenario.goal,
            world,
            Some(&path),
            &weights,
            &cfg,
        )
        .unwrap();
        let f = plan.final_state().position;
        println!(
            "   -> {:?} states={} final ({:.1},{:.1})",
            plan.outcome,
            plan.states.len(),
            f.x,
            f.y
        );
        for st in plan.states.iter().step_by(30) {
            print!(" ({:.0},{:.0})", st.position.x, st.position.y);
        }
        println!();
    }
}
