//! The fixed builtin namespace available to MiniLang programs.
//!
//! `math` exposes a handful of integer members and methods so programs can
//! exercise member references and method invocations without user-defined
//! types. The checker and the interpreter both read these tables.

pub const NAMESPACE: &str = "math";

/// Member name → constant value.
pub const MEMBERS: &[(&str, i64)] = &[("zero", 0), ("one", 1), ("two", 2)];

/// Method name → arity. All methods take and return Int.
pub const METHODS: &[(&str, usize)] = &[("abs", 1), ("max", 2), ("min", 2), ("sgn", 1)];

pub fn member_value(name: &str) -> Option<i64> {
    MEMBERS.iter().find(|(n, _)| *n == name).map(|(_, v)| *v)
}

pub fn method_arity(name: &str) -> Option<usize> {
    METHODS.iter().find(|(n, _)| *n == name).map(|(_, a)| *a)
}

pub fn eval_method(name: &str, args: &[i64]) -> Option<i64> {
    match (name, args) {
        ("abs", [x]) => Some(x.wrapping_abs()),
        ("max", [a, b]) => Some(*a.max(b)),
        ("min", [a, b]) => Some(*a.min(b)),
        ("sgn", [x]) => Some(x.signum()),
        _ => None,
    }
}
