//! Group determinants and the structures built on them.

pub mod afrob;
pub mod chartable;
pub mod cyclotomic;
pub mod detfact;
pub mod efun;
pub mod fd;
pub mod frobgroup;
pub mod group;
pub mod linalg;
pub mod pde;
pub mod poly;
pub mod quad;
pub mod special;
pub mod testfn;

use thiserror::Error;

/// Any domain error, tagged with the module it came from.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("group: {0}")]
    Group(#[from] group::GroupError),
    #[error("detfact: {0}")]
    Det(#[from] detfact::DetError),
    #[error("pde: {0}")]
    Pde(#[from] pde::PdeError),
    #[error("efun: {0}")]
    Efun(#[from] efun::EfunError),
    #[error("frobgroup: {0}")]
    Frob(#[from] frobgroup::FrobError),
    #[error("afrob: {0}")]
    Afrob(#[from] afrob::AfrobError),
}

impl Error {
    pub fn module(&self) -> &'static str {
        match self {
            Error::Group(_) => "group",
            Error::Det(_) => "detfact",
            Error::Pde(_) => "pde",
            Error::Efun(_) => "efun",
            Error::Frob(_) => "frobgroup",
            Error::Afrob(_) => "afrob",
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            Error::Group(e) => e.code(),
            Error::Det(e) => e.code(),
            Error::Pde(e) => e.code(),
            Error::Efun(e) => e.code(),
            Error::Frob(e) => e.code(),
            Error::Afrob(e) => e.code(),
        }
    }
}
