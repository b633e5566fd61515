//! Dataset generation, experiment pipelines, plotting, and run reports.

pub mod config;
pub mod dataset;
pub mod experiments;
pub mod plot;
pub mod report;

pub use config::{
    CriticParams, DatasetParams, ExperimentConfig, OodSweepParams, SnrSweepParams,
};
pub use dataset::{
    default_scene_prior, generate_dataset, generate_scenes_min_objects, load_scenes, save_scenes,
    CategoryPrior, SceneFile, ScenePrior,
};
pub use experiments::{
    build_eval_pool, channel_accuracy_sweep, critic_trial_outcomes, encode_dataset,
    exp_critic_sweep, exp_ood_sweep, exp_pareto, exp_snr_sweep, exp_tau_sweep, run_critic_sweep,
    CriticSweepRow, EncodedFile, EncodedScene, OodSweepRow, ParetoOutcome, ProviderCurve,
    SnrSweepRow,
};
pub use plot::{emit_plot, emit_plots};
pub use report::{content_hash, write_csv, RunReport};
