pub mod corpus;
pub mod driver;
pub mod elab;
pub mod env;
pub mod kernel;
pub mod prelude;
pub mod server;
pub mod syntax;
pub mod tactic;
pub mod term;
