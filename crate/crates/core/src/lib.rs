pub mod error;
pub mod expansion;
pub mod function;
pub mod gegenbauer;
pub mod measure;
pub mod multiplier;
pub mod poly;
pub mod quadrature;
pub mod report;
pub mod sobolev;
pub mod verification;
