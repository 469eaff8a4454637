pub mod cli;
pub mod curvature;
pub mod duality;
pub mod exterior;
pub mod fibration;
pub mod jetframe;
pub mod samples;
pub mod symexpr;
