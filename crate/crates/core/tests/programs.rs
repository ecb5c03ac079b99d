use afflang_core::denote::{denote_term, FuelModel, Outcome};
use afflang_core::frontend::{parse_program, print_value};
use afflang_core::interp::{run, Configuration, RunOutcome};
use afflang_core::{Checker, Type, Value, ValueAssignment};

const NAT_COUNTDOWN: &str = include_str!("../../../corpus/nat.afl");
const LIST_LENGTH: &str = include_str!("../../../corpus/list_bit.afl");

fn with_input(src: &str, decl: &str, value: &Value) -> String {
    let start = src.find(decl).expect("input declaration");
    let rest = &src[start + decl.len()..];
    let mut depth = 0i32;
    let end = rest
        .char_indices()
        .find(|&(_, c)| {
            match c {
                '(' | '[' => depth += 1,
                ')' | ']' => depth -= 1,
                _ => {}
            }
            depth == 0 && (c == ',' || c == ';')
        })
        .map(|(i, _)| i)
        .unwrap();
    format!("{}{decl}{}{}", &src[..start], print_value(value), &rest[end..])
}

fn execute(src: &str) -> (ValueAssignment, Outcome) {
    let program = parse_program(src).unwrap();
    let gamma = program.declared_context().unwrap();
    let store = program.initial_store().unwrap();
    Checker::default().check_declared_configuration(&gamma, &program.term, &store).unwrap();
    let c = Configuration::new(program.term.clone(), store.clone());
    let RunOutcome::Terminated { store: out, .. } = run(&c, 100_000) else { panic!("did not terminate") };
    let d = denote_term(&gamma, &program.term).unwrap();
    (out, d.eval(&store, 100_000, FuelModel::Unfoldings))
}

fn bit_list(bits: &[bool]) -> Value {
    let list = Type::list(Type::bit());
    let cell = Type::tensor(Type::bit(), list.clone());
    let mut v = Value::fold(list.clone(), Value::left(Type::Unit, cell.clone(), Value::Star));
    for &b in bits.iter().rev() {
        let head = if b { Value::tt() } else { Value::ff() };
        v = Value::fold(list.clone(), Value::right(Type::Unit, cell.clone(), Value::pair(head, v)));
    }
    v
}

#[test]
fn countdown_parity_matches_arithmetic() {
    for n in 0..16usize {
        let src = with_input(NAT_COUNTDOWN, "input n : Nat = ", &Value::nat(n));
        let (out, denoted) = execute(&src);
        let expected_odd = if n % 2 == 1 { Value::tt() } else { Value::ff() };
        assert_eq!(out.get("odd"), Some(&expected_odd), "n = {n}");
        assert_eq!(out.get("n"), Some(&Value::nat(0)));
        assert_eq!(out.get("go"), Some(&Value::ff()));
        assert_eq!(denoted, Outcome::Defined(out), "n = {n}");
    }
}

#[test]
fn list_length_counts_cells() {
    let cases: [&[bool]; 5] = [&[], &[true], &[false, true], &[true, true, false], &[false; 6]];
    for bits in cases {
        let src = with_input(LIST_LENGTH, "input l : List(bit) = ", &bit_list(bits));
        let (out, denoted) = execute(&src);
        assert_eq!(out.get("len"), Some(&Value::nat(bits.len())), "{bits:?}");
        assert_eq!(out.len(), 2);
        assert_eq!(denoted, Outcome::Defined(out));
    }
}
