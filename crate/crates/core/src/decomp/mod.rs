pub mod cuts;
pub mod lazy;
pub mod reflect;
pub mod star;
pub mod transfer;
