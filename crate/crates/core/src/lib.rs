pub mod air;
pub mod dsl;
pub mod evoleap;
pub mod filter;
pub mod llm;
pub mod network;
pub mod sim;
pub mod pipeline;
pub mod trainer;
