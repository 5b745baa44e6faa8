//! Archive store, HTTP voting API and command implementations around
//! `debunk-core`.

pub mod api;
pub mod commands;
pub mod settings;
pub mod store;

pub use api::router;
pub use settings::Settings;
pub use store::{ClusterView, DayRecord, Store, StoreError};
