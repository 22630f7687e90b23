pub mod carleman;
pub mod consistency;
pub mod identities;
pub mod reconstruct;
pub mod stability;
