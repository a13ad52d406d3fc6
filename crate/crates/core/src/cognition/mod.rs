//! Thinking mode (plans) and study mode (post-loss review).

pub mod study;
pub mod thinking;

pub use study::{
    detect_turning_points, effective_duration, explore_lines, skip_probability, study_budget,
    ExploredLine, StudyParams,
};
pub use thinking::{
    check_plan, disruption_probability, maybe_generate_plan, DisruptionParams, Plan, PlanBuffer,
    PlanOutcome, DEFAULT_LOOKAHEAD, PLAN_CONFIDENCE_THRESHOLD,
};
