pub mod builder;
pub mod cancel;
pub mod classes;
pub mod descriptor;
pub mod dimension;
pub mod error;
pub mod exact;
pub mod numeric;
pub mod profile;
pub mod sets;
pub mod time_domain;
pub mod verifier;
