//! Concrete syntax for `.paloma` model files.
//!
//! ```text
//! // comment
//! param r = 2.0;
//! location l0 = (-1, 0);
//! location l1 = (1, 0);
//! Transmitter(l0) := !!(message, r)@Ir{all}.Transmitter(l1);
//! Receiver(l1) := ??(message, 0.9)@Wt{1}.Receiver(l0);
//! Tick(l0) := (tick, 1.0).Tick(l0) + ?(alarm, 0.5)@Prob{0.4}.Tick(l1);
//! system Main := Transmitter(l0) || Receiver(l1);
//! ```
//!
//! Values are decimal literals or names of `param` declarations. `Ir{all}`
//! expands to every declared location. System definitions compose constants
//! (or choices of constants at one location) with `||`.

mod elaborate;
mod lexer;
mod printer;
mod syntax;
mod validate;

use std::fmt;

use crate::model::{ModelDefinition, Pos};

pub use printer::{pretty_print, show_const, show_model, show_prefix, show_range, show_seq, show_term};
pub use validate::validate;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub pos: Option<Pos>,
}

impl Diagnostic {
    pub fn error(message: impl Into<String>, pos: Pos) -> Self {
        Diagnostic {
            severity: Severity::Error,
            message: message.into(),
            pos: Some(pos),
        }
    }

    pub fn error_nopos(message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            message: message.into(),
            pos: None,
        }
    }

    pub fn warning(message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            message: message.into(),
            pos: None,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        match self.pos {
            Some(p) => write!(f, "{sev}: {}:{}: {}", p.line, p.column, self.message),
            None => write!(f, "{sev}: {}", self.message),
        }
    }
}

/// Parses and elaborates a model. Never panics: malformed input yields at
/// least one error diagnostic.
pub fn parse_model(text: &str) -> Result<ModelDefinition, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let toks = lexer::lex(text, &mut diags);
    let stmts = syntax::parse(toks, &mut diags);
    let def = elaborate::elaborate(&stmts, &mut diags);
    if diags.iter().any(Diagnostic::is_error) {
        Err(diags)
    } else {
        Ok(def)
    }
}

/// Parse followed by [`validate`]. On success returns the definition together
/// with any warnings.
pub fn load(text: &str) -> Result<(ModelDefinition, Vec<Diagnostic>), Vec<Diagnostic>> {
    let def = parse_model(text)?;
    let diags = validate(&def);
    if diags.iter().any(Diagnostic::is_error) {
        Err(diags)
    } else {
        Ok((def, diags))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ConstRef, LocId, Prefix, Term};

    const SCENARIO: &str = r#"
        param r = 2.0;
        param p = 0.75;
        param v = 1.5;
        location l0 = (-1, 0);
        location l1 = (1, 0);
        Transmitter(l0) := !!(message_move, r)@Ir{all}.Transmitter(l1);
        Transmitter(l1) := !!(message_move, r)@Ir{all}.Transmitter(l0);
        Receiver(l1) := ??(message_move, p)@Wt{v}.Receiver(l0);
        Receiver(l0) := ??(message_move, p)@Wt{v}.Receiver(l1);
        system Scenario1 := Transmitter(l0) || Receiver(l1);
        system Scenario2 := Transmitter(l1) || Receiver(l0);
    "#;

    fn errors(text: &str) -> Vec<Diagnostic> {
        match parse_model(text) {
            Ok(_) => vec![],
            Err(d) => d,
        }
    }

    #[test]
    fn unicast_output_with_all_range() {
        let def = parse_model(SCENARIO).unwrap();
        let key = ConstRef::new("Transmitter", LocId(0));
        match def.equation(&key).unwrap() {
            Term::Prefix(Prefix::UnicastOut { label, rate, range }, next) => {
                assert_eq!(label.as_str(), "message_move");
                assert_eq!(*rate, 2.0);
                assert_eq!(*range, def.all_locations());
                assert_eq!(*next, ConstRef::new("Transmitter", LocId(1)));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unicast_input_and_spontaneous() {
        let def = parse_model(
            "location l0 = (0,0); location l1 = (1,0); param p = 0.25;
             R(l1) := ??(msg, p)@Wt{2.0}.R(l0);
             R(l0) := (tick, 1.0).R(l0);",
        )
        .unwrap();
        match def.equation(&ConstRef::new("R", LocId(1))).unwrap() {
            Term::Prefix(
                Prefix::UnicastIn {
                    act_prob, weight, ..
                },
                _,
            ) => {
                assert_eq!(*act_prob, 0.25);
                assert_eq!(*weight, 2.0);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            def.equation(&ConstRef::new("R", LocId(0))).unwrap(),
            Term::Prefix(Prefix::Spontaneous { rate, .. }, _) if *rate == 1.0
        ));
    }

    #[test]
    fn probability_out_of_range() {
        let d = errors("location l0 = (0,0); R(l0) := ??(msg, 1.5)@Wt{1}.R(l0);");
        assert_eq!(d.len(), 1);
        assert!(d[0].message.contains("probability out of range"), "{}", d[0]);
        assert_eq!(d[0].pos.unwrap().line, 1);
    }

    #[test]
    fn non_positive_rate_and_unknown_names() {
        let d = errors(
            "location l0 = (0,0); A(l0) := (t, 0).A(l0); B(l0) := (t, q).B(l9);",
        );
        let msgs: Vec<_> = d.iter().map(|d| d.message.clone()).collect();
        assert!(msgs.iter().any(|m| m.contains("rate must be positive")));
        assert!(msgs.iter().any(|m| m.contains("unknown parameter `q`")));
        assert!(msgs.iter().any(|m| m.contains("unknown location `l9`")));
    }

    #[test]
    fn missing_semicolon_has_position() {
        let d = errors("location l0 = (0,0)\nA(l0) := (t, 1).A(l0);");
        assert!(!d.is_empty());
        assert_eq!(d[0].pos, Some(Pos { line: 2, column: 1 }));
    }

    #[test]
    fn all_must_be_alone() {
        let d = errors("location l0 = (0,0); A(l0) := !(m, 1)@Ir{all, l0}.A(l0);");
        assert!(d.iter().any(|d| d.message.contains("`all` must appear alone")));
    }

    #[test]
    fn prefixes_rejected_in_systems() {
        let d = errors("location l0 = (0,0); system S := (t, 1).A(l0);");
        assert!(d.iter().any(|d| d.message.contains("not allowed in system")));
    }

    #[test]
    fn duplicates_rejected() {
        let d = errors(
            "param r = 1; param r = 2; location l0 = (0,0); location l0 = (1,1);
             A(l0) := (t, 1).A(l0); A(l0) := (t, 2).A(l0);",
        );
        assert_eq!(d.iter().filter(|d| d.message.contains("duplicate")).count(), 3);
    }

    #[test]
    fn validate_dangling_continuation() {
        let def = parse_model(
            "location l0 = (0,0); location l9 = (9,9); T(l0) := (t, 1).T(l9);",
        )
        .unwrap();
        let d = validate(&def);
        assert!(d.iter().any(|d| d.is_error() && d.message.contains("`T(l9)` has no defining equation")));
    }

    #[test]
    fn validate_shared_coordinates() {
        let def = parse_model(
            "location a = (1,2); location b = (1,2); T(a) := (t, 1).T(a);",
        )
        .unwrap();
        let d = validate(&def);
        assert!(d.iter().any(|d| d.is_error() && d.message.contains("share coordinates")));
    }

    #[test]
    fn validate_unreachable_unicast_warns() {
        let def = parse_model(
            "location l0 = (0,0); location l2 = (2,0);
             T(l0) := !!(m, 1)@Ir{l2}.T(l0);
             R(l0) := ??(m, 1)@Wt{1}.R(l0);
             U(l2) := (t, 1).U(l2);",
        )
        .unwrap();
        let d = validate(&def);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].severity, Severity::Warning);
        assert!(d[0].message.contains("!!m"));
    }

    #[test]
    fn validate_choice_location_and_duplicate_inputs() {
        let def = parse_model(
            "location l0 = (0,0); location l1 = (1,0);
             A(l0) := ??(m, 1)@Wt{1}.A(l0) + B(l0);
             B(l0) := ??(m, 0.5)@Wt{1}.B(l0);
             C(l0) := (t, 1).C(l0) + B(l1);
             B(l1) := (t, 1).B(l1);",
        )
        .unwrap();
        let d = validate(&def);
        assert!(d.iter().any(|d| d.message.contains("not located at `l0`")));
        assert!(d.iter().any(|d| d.message.starts_with("A(l0): 2 alternative `??m`")));
    }

    #[test]
    fn validate_unguarded_recursion() {
        let def = parse_model(
            "location l0 = (0,0); A(l0) := B(l0); B(l0) := A(l0) + (t, 1).A(l0);",
        )
        .unwrap();
        let d = validate(&def);
        assert_eq!(d.iter().filter(|d| d.message.contains("unguarded")).count(), 2);
    }

    #[test]
    fn scenario_round_trips() {
        let def = parse_model(SCENARIO).unwrap();
        let printed = pretty_print(&def);
        let again = parse_model(&printed).unwrap();
        assert_eq!(def, again);
        assert_eq!(printed, pretty_print(&again));
    }

    #[test]
    fn round_trip_keeps_choice_shape_and_parallel_order() {
        let text = "location l0 = (0,0); location l1 = (0.5,0);
            A(l0) := (a, 1).A(l0) + ((b, 2).A(l0) + (c, 3).A(l0));
            B(l0) := ((a, 1).A(l0) + (b, 2).A(l0)) + (c, 3).A(l0);
            system S := B(l0) || A(l0) + B(l0) || A(l0);";
        let def = parse_model(text).unwrap();
        assert_ne!(
            def.equation(&ConstRef::new("A", LocId(0))),
            def.equation(&ConstRef::new("B", LocId(0)))
        );
        let again = parse_model(&pretty_print(&def)).unwrap();
        assert_eq!(def, again);
    }
}
