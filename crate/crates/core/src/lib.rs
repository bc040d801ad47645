pub mod criteria;
pub mod curve;
pub mod density;
pub mod divisors;
pub mod error;
pub mod field;
pub mod harness;
pub mod hyperelliptic;
pub mod numstr;
pub mod poly;
pub mod quadratic;
pub mod zeta;
