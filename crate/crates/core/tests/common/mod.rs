#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use recursive_truth::grounding::GroundAtom;
use recursive_truth::prop::Formula;
use recursive_truth::{Atom, Literal, Program, Rule, Term};

/// Bounds for random programs.
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub predicates: usize,
    pub max_arity: usize,
    pub constants: usize,
    pub max_rules: usize,
    pub max_body: usize,
    pub negation: bool,
}

impl Default for Shape {
    fn default() -> Self {
        Self {
            predicates: 4,
            max_arity: 2,
            constants: 3,
            max_rules: 12,
            max_body: 3,
            negation: true,
        }
    }
}

const CONSTANTS: [&str; 3] = ["a", "b", "c"];
const VARIABLES: [&str; 3] = ["X", "Y", "Z"];

fn term<R: Rng>(rng: &mut R, shape: &Shape) -> Term {
    if rng.gen_bool(0.5) {
        Term::Variable(VARIABLES[rng.gen_range(0..VARIABLES.len())].into())
    } else {
        Term::Constant(CONSTANTS[rng.gen_range(0..shape.constants)].into())
    }
}

pub fn random_program<R: Rng>(rng: &mut R, shape: &Shape) -> Program {
    let arities: Vec<usize> = (0..shape.predicates)
        .map(|_| rng.gen_range(0..=shape.max_arity))
        .collect();
    let atom = |rng: &mut R, p: usize| {
        let args = (0..arities[p]).map(|_| term(rng, shape)).collect();
        Atom::new(format!("p{p}"), args)
    };
    let n_rules = rng.gen_range(1..=shape.max_rules);
    let rules = (0..n_rules)
        .map(|_| {
            let p = rng.gen_range(0..shape.predicates);
            let head = atom(rng, p);
            let n_body = rng.gen_range(0..=shape.max_body);
            let body = (0..n_body)
                .map(|_| {
                    let p = rng.gen_range(0..shape.predicates);
                    Literal {
                        atom: atom(rng, p),
                        negated: shape.negation && rng.gen_bool(0.4),
                    }
                })
                .collect();
            Rule { head, body }
        })
        .collect();
    Program::from_rules(rules).expect("arities are fixed per predicate")
}

/// The same rules in another order.
pub fn shuffled<R: Rng>(rng: &mut R, program: &Program) -> Program {
    let mut rules = program.rules().to_vec();
    rules.shuffle(rng);
    Program::from_rules(rules).unwrap()
}

/// Least Herbrand model of a negation-free program by naive bottom-up
/// iteration with two truth values. Written independently of the engines.
pub fn least_model(program: &Program, universe: &[String]) -> BTreeSet<GroundAtom> {
    assert!(program.rules().iter().all(|r| r.body.iter().all(|l| !l.negated)));
    let mut model: BTreeSet<GroundAtom> = BTreeSet::new();
    loop {
        let mut next = model.clone();
        for rule in program.rules() {
            let vars = rule.variables();
            let mut assignment = vec![0usize; vars.len()];
            'assignments: loop {
                let value = |t: &Term| match t {
                    Term::Constant(c) => c.clone(),
                    Term::Variable(v) => universe[assignment[vars.iter().position(|x| x == v).unwrap()]].clone(),
                };
                let inst = |a: &Atom| GroundAtom {
                    predicate: a.predicate.clone(),
                    args: a.args.iter().map(value).collect(),
                };
                if rule.body.iter().all(|l| model.contains(&inst(&l.atom))) {
                    next.insert(inst(&rule.head));
                }
                let mut i = vars.len();
                loop {
                    if i == 0 {
                        break 'assignments;
                    }
                    i -= 1;
                    assignment[i] += 1;
                    if assignment[i] < universe.len() {
                        break;
                    }
                    assignment[i] = 0;
                }
            }
        }
        if next == model {
            return model;
        }
        model = next;
    }
}

const PROP_VARS: [&str; 4] = ["p", "q", "r", "s"];

pub fn random_formula<R: Rng>(rng: &mut R, vars: usize, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return Formula::var(PROP_VARS[rng.gen_range(0..vars)]);
    }
    let sub = |rng: &mut R| Box::new(random_formula(rng, vars, depth - 1));
    match rng.gen_range(0..6) {
        0 => Formula::Not(sub(rng)),
        1 => Formula::And(sub(rng), sub(rng)),
        2 => Formula::Or(sub(rng), sub(rng)),
        3 => Formula::Implies(sub(rng), sub(rng)),
        4 => Formula::Iff(sub(rng), sub(rng)),
        _ => Formula::var(PROP_VARS[rng.gen_range(0..vars)]),
    }
}

/// Classical truth-table evaluation, independent of the three-valued tables.
pub fn eval_bool(f: &Formula, env: &dyn Fn(&str) -> bool) -> bool {
    match f {
        Formula::Var(v) => env(v),
        Formula::Not(a) => !eval_bool(a, env),
        Formula::And(a, b) => eval_bool(a, env) && eval_bool(b, env),
        Formula::Or(a, b) => eval_bool(a, env) || eval_bool(b, env),
        Formula::Implies(a, b) => !eval_bool(a, env) || eval_bool(b, env),
        Formula::Iff(a, b) => eval_bool(a, env) == eval_bool(b, env),
    }
}

/// Checks `value` against the subset of JSON Schema used by the files under
/// `schema/`: `type`, `enum`, `minLength`, `minimum`, `properties`,
/// `required` and `additionalProperties: false`.
pub fn check_schema(schema: &serde_json::Value, value: &serde_json::Value) -> Result<(), String> {
    use serde_json::Value;
    if let Some(t) = schema.get("type").and_then(Value::as_str) {
        let ok = match t {
            "object" => value.is_object(),
            "string" => value.is_string(),
            "integer" => value.is_i64() || value.is_u64(),
            "number" => value.is_number(),
            "boolean" => value.is_boolean(),
            other => return Err(format!("unsupported type `{other}`")),
        };
        if !ok {
            return Err(format!("{value} is not of type {t}"));
        }
    }
    if let Some(options) = schema.get("enum").and_then(Value::as_array) {
        if !options.contains(value) {
            return Err(format!("{value} is not one of {options:?}"));
        }
    }
    if let (Some(min), Some(s)) = (schema.get("minLength").and_then(Value::as_u64), value.as_str()) {
        if (s.chars().count() as u64) < min {
            return Err(format!("{value} is shorter than {min}"));
        }
    }
    if let (Some(min), Some(n)) = (schema.get("minimum").and_then(Value::as_f64), value.as_f64()) {
        if n < min {
            return Err(format!("{value} is below {min}"));
        }
    }
    if let Some(object) = value.as_object() {
        let properties = schema.get("properties").and_then(Value::as_object);
        for key in schema.get("required").and_then(Value::as_array).into_iter().flatten() {
            let key = key.as_str().unwrap_or_default();
            if !object.contains_key(key) {
                return Err(format!("missing required key `{key}`"));
            }
        }
        for (key, v) in object {
            match properties.and_then(|p| p.get(key)) {
                Some(sub) => check_schema(sub, v).map_err(|e| format!("{key}: {e}"))?,
                None if schema.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    return Err(format!("unexpected key `{key}`"))
                }
                None => {}
            }
        }
    }
    Ok(())
}
