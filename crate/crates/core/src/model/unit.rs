//! Coded annotation units: verbal moves and graphico-gestural actions.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::object::ObjectRef;
use super::time::TimeInterval;
use super::token::Token;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Modality {
    Verbal,
    Gestural,
}

impl Modality {
    pub fn code(self) -> &'static str {
        match self {
            Modality::Verbal => "V",
            Modality::Gestural => "G",
        }
    }
}

/// Semiotic channel of a unit. Graphico-gestural units split into graphical
/// (tracing, writing) and gestural (everything else) channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Channel {
    Verbal,
    Graphical,
    Gestural,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::Verbal, Channel::Graphical, Channel::Gestural];

    pub fn as_str(self) -> &'static str {
        match self {
            Channel::Verbal => "VERBAL",
            Channel::Graphical => "GRAPHICAL",
            Channel::Gestural => "GESTURAL",
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Modulation {
    #[default]
    Assert,
    Request,
}

impl Modulation {
    pub fn code(self) -> &'static str {
        match self {
            Modulation::Assert => "A",
            Modulation::Request => "REQ",
        }
    }
}

impl FromStr for Modulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Modulation> {
        match s.to_ascii_uppercase().as_str() {
            "A" | "ASSERT" => Ok(Modulation::Assert),
            "REQ" | "REQUEST" => Ok(Modulation::Request),
            _ => Err(Error::InvalidValue { field: "modulation", value: s.to_string() }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Polarity {
    Pos,
    Neg,
    Neutral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerbalKind {
    Gen,
    Eval,
    Info,
    Interp,
}

/// Predicate of a verbal unit. Evaluations always carry a polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VerbalAction {
    Generate,
    Evaluate(Polarity),
    Inform,
    Interpret,
}

impl VerbalAction {
    pub const ALL: [VerbalAction; 6] = [
        VerbalAction::Generate,
        VerbalAction::Evaluate(Polarity::Pos),
        VerbalAction::Evaluate(Polarity::Neg),
        VerbalAction::Evaluate(Polarity::Neutral),
        VerbalAction::Inform,
        VerbalAction::Interpret,
    ];

    pub fn kind(self) -> VerbalKind {
        match self {
            VerbalAction::Generate => VerbalKind::Gen,
            VerbalAction::Evaluate(_) => VerbalKind::Eval,
            VerbalAction::Inform => VerbalKind::Info,
            VerbalAction::Interpret => VerbalKind::Interp,
        }
    }

    pub fn polarity(self) -> Option<Polarity> {
        match self {
            VerbalAction::Evaluate(p) => Some(p),
            _ => None,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            VerbalAction::Generate => "GEN",
            VerbalAction::Evaluate(Polarity::Pos) => "EVAL+",
            VerbalAction::Evaluate(Polarity::Neg) => "EVAL-",
            VerbalAction::Evaluate(Polarity::Neutral) => "EVAL0",
            VerbalAction::Inform => "INFO",
            VerbalAction::Interpret => "INTERP",
        }
    }
}

impl fmt::Display for VerbalAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for VerbalAction {
    type Err = Error;

    fn from_str(s: &str) -> Result<VerbalAction> {
        match s {
            "GEN" => Ok(VerbalAction::Generate),
            "EVAL+" => Ok(VerbalAction::Evaluate(Polarity::Pos)),
            "EVAL-" => Ok(VerbalAction::Evaluate(Polarity::Neg)),
            "EVAL0" => Ok(VerbalAction::Evaluate(Polarity::Neutral)),
            "INFO" => Ok(VerbalAction::Inform),
            "INTERP" => Ok(VerbalAction::Interpret),
            _ => Err(Error::InvalidValue { field: "verbal action", value: s.to_string() }),
        }
    }
}

impl Serialize for VerbalAction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.code())
    }
}

/// Graphico-gestural action. Tokens outside the closed vocabulary are kept
/// verbatim as [`GestureAction::Ext`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GestureAction {
    Point,
    Delim2d,
    Delim3d,
    GraphTrac,
    TextTrac,
    Moving,
    Rotating,
    Overlaying,
    Ext(Token),
}

impl GestureAction {
    pub const CLOSED: [GestureAction; 8] = [
        GestureAction::Point,
        GestureAction::Delim2d,
        GestureAction::Delim3d,
        GestureAction::GraphTrac,
        GestureAction::TextTrac,
        GestureAction::Moving,
        GestureAction::Rotating,
        GestureAction::Overlaying,
    ];

    /// Builds an extension action; the token must not name a closed action.
    pub fn ext(token: Token) -> Result<GestureAction> {
        if Self::known(token.as_str()).is_some() {
            return Err(Error::InvalidValue { field: "extension gesture", value: token.to_string() });
        }
        Ok(GestureAction::Ext(token))
    }

    fn known(s: &str) -> Option<GestureAction> {
        let norm: String = s.chars().filter(|c| *c != '_').collect::<String>().to_ascii_lowercase();
        Some(match norm.as_str() {
            "point" => GestureAction::Point,
            "delimit2d" | "delim2d" => GestureAction::Delim2d,
            "delimit3d" | "delim3d" => GestureAction::Delim3d,
            "graphtrac" => GestureAction::GraphTrac,
            "texttrac" => GestureAction::TextTrac,
            "moving" => GestureAction::Moving,
            "rotating" => GestureAction::Rotating,
            "overlaying" => GestureAction::Overlaying,
            _ => return None,
        })
    }

    /// Parses a gesture token, case- and underscore-insensitively for the
    /// closed vocabulary; anything else becomes an extension.
    pub fn parse(s: &str) -> Result<GestureAction> {
        match Self::known(s) {
            Some(g) => Ok(g),
            None => Ok(GestureAction::Ext(Token::new(s)?)),
        }
    }

    pub fn is_ext(&self) -> bool {
        matches!(self, GestureAction::Ext(_))
    }

    pub fn channel(&self) -> Channel {
        match self {
            GestureAction::GraphTrac | GestureAction::TextTrac => Channel::Graphical,
            _ => Channel::Gestural,
        }
    }

    pub fn code(&self) -> &str {
        match self {
            GestureAction::Point => "Point",
            GestureAction::Delim2d => "Delimit_2D",
            GestureAction::Delim3d => "Delimit_3D",
            GestureAction::GraphTrac => "Graph_trac",
            GestureAction::TextTrac => "Text_trac",
            GestureAction::Moving => "Moving",
            GestureAction::Rotating => "Rotating",
            GestureAction::Overlaying => "Overlaying",
            GestureAction::Ext(t) => t.as_str(),
        }
    }
}

impl fmt::Display for GestureAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl Serialize for GestureAction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tool {
    Hand,
    Pen,
    Pencil,
    Ruler,
    Other(Token),
}

impl Tool {
    pub fn parse(s: &str) -> Result<Tool> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "hand" => Tool::Hand,
            "pen" => Tool::Pen,
            "pencil" => Tool::Pencil,
            "ruler" => Tool::Ruler,
            _ => Tool::Other(Token::new(s)?),
        })
    }

    pub fn code(&self) -> &str {
        match self {
            Tool::Hand => "hand",
            Tool::Pen => "pen",
            Tool::Pencil => "pencil",
            Tool::Ruler => "ruler",
            Tool::Other(t) => t.as_str(),
        }
    }
}

impl Serialize for Tool {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.code())
    }
}

/// Attributes of a graphico-gestural unit: the document acted on, an
/// optional secondary object, the tool and the table area.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GestureAttrs {
    pub obj1: Token,
    pub obj2: Option<Token>,
    pub tool: Option<Tool>,
    pub area: Option<Token>,
}

impl GestureAttrs {
    pub fn new(obj1: Token) -> GestureAttrs {
        GestureAttrs { obj1, obj2: None, tool: None, area: None }
    }
}

/// Modality-specific part of a unit. Encoding it as an enum makes a verbal
/// unit with gesture attributes (or the reverse) unrepresentable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Act {
    Verbal { modulation: Modulation, action: VerbalAction },
    Gestural { action: GestureAction, attrs: GestureAttrs },
}

/// Family used to tell redundant from complementary cross-modal pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ActionFamily {
    Elaboration,
    Evaluation,
    Clarification,
    Manipulation,
}

impl Act {
    pub fn modality(&self) -> Modality {
        match self {
            Act::Verbal { .. } => Modality::Verbal,
            Act::Gestural { .. } => Modality::Gestural,
        }
    }

    pub fn channel(&self) -> Channel {
        match self {
            Act::Verbal { .. } => Channel::Verbal,
            Act::Gestural { action, .. } => action.channel(),
        }
    }

    pub fn family(&self) -> ActionFamily {
        match self {
            Act::Verbal { action, .. } => match action.kind() {
                VerbalKind::Gen => ActionFamily::Elaboration,
                VerbalKind::Eval => ActionFamily::Evaluation,
                VerbalKind::Info | VerbalKind::Interp => ActionFamily::Clarification,
            },
            Act::Gestural { action, .. } => match action {
                GestureAction::Point
                | GestureAction::Delim2d
                | GestureAction::Delim3d
                | GestureAction::GraphTrac
                | GestureAction::TextTrac => ActionFamily::Elaboration,
                _ => ActionFamily::Manipulation,
            },
        }
    }

    /// Action token as written in the corpus `action` column.
    pub fn code(&self) -> &str {
        match self {
            Act::Verbal { action, .. } => action.code(),
            Act::Gestural { action, .. } => action.code(),
        }
    }
}

/// One coded action by one actor in one modality over a time interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationUnit {
    pub id: Token,
    pub actor: Token,
    pub interval: TimeInterval,
    pub object: ObjectRef,
    pub transcription: Option<String>,
    pub act: Act,
}

impl AnnotationUnit {
    pub fn verbal(
        id: Token,
        actor: Token,
        interval: TimeInterval,
        action: VerbalAction,
        object: ObjectRef,
    ) -> AnnotationUnit {
        AnnotationUnit {
            id,
            actor,
            interval,
            object,
            transcription: None,
            act: Act::Verbal { modulation: Modulation::Assert, action },
        }
    }

    pub fn gestural(
        id: Token,
        actor: Token,
        interval: TimeInterval,
        action: GestureAction,
        object: ObjectRef,
        attrs: GestureAttrs,
    ) -> AnnotationUnit {
        AnnotationUnit { id, actor, interval, object, transcription: None, act: Act::Gestural { action, attrs } }
    }

    pub fn with_transcription(mut self, text: impl Into<String>) -> AnnotationUnit {
        self.transcription = Some(text.into());
        self
    }

    pub fn modality(&self) -> Modality {
        self.act.modality()
    }

    pub fn channel(&self) -> Channel {
        self.act.channel()
    }

    pub(crate) fn sort_key(&self) -> (crate::model::Millis, crate::model::Millis, &str) {
        (self.interval.start(), self.interval.end(), self.id.as_str())
    }
}
