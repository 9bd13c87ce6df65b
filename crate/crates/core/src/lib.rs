pub mod cohomology;
pub mod exactla;
pub mod gmcheck;
pub mod graded;
pub mod lie;
pub mod nabtower;
pub mod poly;
pub mod random;
pub mod validation;
