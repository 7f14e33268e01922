//! Domain types shared by every analysis stage.

mod config;
mod corpus;
mod object;
mod time;
mod token;
mod unit;

pub use config::{AnalysisConfig, TIME_RESOLUTION_MS};
pub use corpus::Corpus;
pub use object::{objects_match, space_of, Category, FocusClass, Granularity, ObjectRef, Space};
pub use time::{Millis, TimeInterval};
pub use token::Token;
pub use unit::{
    Act, ActionFamily, AnnotationUnit, Channel, GestureAction, GestureAttrs, Modality, Modulation, Polarity, Tool,
    VerbalAction, VerbalKind,
};
