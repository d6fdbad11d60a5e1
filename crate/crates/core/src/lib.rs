pub mod abstraction;
pub mod fixpoint;
pub mod frontend;
pub mod interp;
pub mod pipeline;
pub mod pos;
pub mod report;
