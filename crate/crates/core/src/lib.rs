pub mod abelian;
pub mod error;
pub mod linalg;
pub mod root_system;
pub mod weyl;
pub mod root_datum;
pub mod character;
pub mod stabilizer;
pub mod rgroup;
pub mod oracle;
pub mod transfer;
pub mod atlas;
