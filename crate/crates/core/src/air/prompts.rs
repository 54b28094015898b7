//! Prompt templates shipped under `assets/prompts`.

pub const PROMPT_VERSION: &str = "prompts/v1";

pub const SYSTEM: &str = include_str!("../../assets/prompts/system.txt");
pub const BACKGROUND: &str = include_str!("../../assets/prompts/background.txt");
pub const DIM_IMPLEMENTATION: &str = include_str!("../../assets/prompts/dim_implementation.txt");
pub const DIM_ARCHITECTURE: &str = include_str!("../../assets/prompts/dim_architecture.txt");
pub const DIM_INTERACTIONS: &str = include_str!("../../assets/prompts/dim_interactions.txt");
pub const DIM_TASK: &str = include_str!("../../assets/prompts/dim_task.txt");
pub const GENERATION: &str = include_str!("../../assets/prompts/generation.txt");
pub const REPAIR: &str = include_str!("../../assets/prompts/repair.txt");
pub const FEEDBACK: &str = include_str!("../../assets/prompts/feedback.txt");
pub const STRATEGY_F1: &str = include_str!("../../assets/prompts/strategy_f1.txt");
pub const STRATEGY_F2: &str = include_str!("../../assets/prompts/strategy_f2.txt");
pub const STRATEGY_F3: &str = include_str!("../../assets/prompts/strategy_f3.txt");
pub const STRATEGY_L1: &str = include_str!("../../assets/prompts/strategy_l1.txt");
pub const STRATEGY_GENERIC: &str = include_str!("../../assets/prompts/strategy_generic.txt");

/// Substitutes `{{key}}` placeholders. Panics on a placeholder left unfilled.
pub fn render(template: &str, vars: &[(&str, &str)]) -> String {
    let mut out = template.to_string();
    for (k, v) in vars {
        out = out.replace(&format!("{{{{{k}}}}}"), v);
    }
    if let Some(pos) = out.find("{{") {
        let rest: String = out[pos..].chars().take(40).collect();
        panic!("unfilled template placeholder near '{rest}'");
    }
    out.trim_end().to_string()
}

/// "one reward function" / "4 different reward functions".
pub fn count_phrase(n: usize) -> String {
    if n == 1 {
        "one reward function".to_string()
    } else {
        format!("{n} different reward functions")
    }
}
