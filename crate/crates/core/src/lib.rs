pub mod algebra;
pub mod liouville;
pub mod parser;
pub mod transforms;
pub mod kovacic;
pub mod verify;
pub mod propagator;
pub mod pipeline;
