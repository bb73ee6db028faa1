pub mod answer;
pub mod capacity;
pub mod error;
pub mod eval;
pub mod numerics;
pub mod syntax;
pub mod wp;
pub mod prevision;
pub mod fuzz;
