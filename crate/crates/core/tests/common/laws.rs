//! Fixed suite of single-step laws for the event semantics.

use archproof::dsl::parse_architecture;
use archproof::semantics::{run_trace, ComponentState, Event, GlobalState, LiveState, Value};
use archproof::{Architecture, ComponentId, ConstId, Equation, Statement, Subject, Term, VarId};

const ARCH: &str = "
component A, B;
var x; var y; var z;
const k;
fun F/1, G/2;
has^3 A(x);
has A(k);
compute^3 {A} y = F(x);
compute^3 {A} z = G(x^3, k);
receive^3 B <- A items {y};
trust B A;
verify^3 B attest A {y = F(x)};
";

fn arch() -> Architecture {
    parse_architecture(ARCH).expect("law architecture parses")
}

fn a() -> ComponentId {
    ComponentId::new("A")
}

fn b() -> ComponentId {
    ComponentId::new("B")
}

fn has_x(t: u32) -> Event {
    Event::Has {
        comp: a(),
        var: VarId::new("x"),
        value: Value::Token(t),
    }
}

fn has_k() -> Event {
    Event::HasConst {
        comp: a(),
        constant: ConstId::new("k"),
    }
}

fn compute_y() -> Event {
    Event::Compute {
        group: vec![a()],
        target: Subject::var("y"),
        rhs: Term::app("F", vec![Term::var("x")]),
    }
}

fn compute_z() -> Event {
    Event::Compute {
        group: vec![a()],
        target: Subject::var("z"),
        rhs: Term::app("G", vec![Term::windowed("x", 3), Term::constant("k")]),
    }
}

fn claim() -> Equation {
    Equation::eq(Term::var("y"), Term::app("F", vec![Term::var("x")]))
}

fn verify(claims: Vec<Equation>) -> Event {
    Event::Verify {
        comp: b(),
        statement: Statement::attest("A", claims),
    }
}

fn live<'s>(st: &'s GlobalState, c: &ComponentId) -> &'s LiveState {
    st.live(c).expect("component is live")
}

fn var<'s>(st: &'s GlobalState, c: &ComponentId, v: &str) -> &'s [Option<Value>] {
    &live(st, c).vars[&VarId::new(v)]
}

fn lengths_match_session(st: &GlobalState) -> bool {
    st.comps.values().filter_map(ComponentState::live).all(|s| {
        s.vars.values().chain(s.consts.values()).all(|l| l.len() as u64 == st.session)
    })
}

fn init_state() -> bool {
    let ar = arch();
    let st = GlobalState::init(&ar);
    st.session == 1
        && lengths_match_session(&st)
        && st.comps.values().filter_map(ComponentState::live).all(|s| {
            s.knows.is_empty() && s.vars.values().chain(s.consts.values()).all(|l| l == &vec![None])
        })
        && live(&st, &b()).trusts.contains(&a())
        && live(&st, &a()).trusts.is_empty()
}

fn session_on_init() -> bool {
    let ar = arch();
    let st = run_trace(&ar, &[Event::Session]);
    st.session == 2 && lengths_match_session(&st) && live(&st, &b()).trusts.contains(&a())
}

fn lengths_follow_sessions() -> bool {
    let ar = arch();
    let trace = [has_x(1), Event::Session, has_k(), compute_y(), Event::Session, has_x(2), Event::Session];
    let st = run_trace(&ar, &trace);
    st.session == 4 && lengths_match_session(&st)
}

fn has_replaces_last_value() -> bool {
    let ar = arch();
    let st = run_trace(&ar, &[has_x(1), has_x(2)]);
    var(&st, &a(), "x") == [Some(Value::Token(2))]
}

fn constants_persist() -> bool {
    let ar = arch();
    let st = run_trace(&ar, &[has_k(), Event::Session, Event::Session]);
    let k = Some(Value::Const(ConstId::new("k")));
    live(&st, &a()).consts[&ConstId::new("k")] == vec![k.clone(), k.clone(), k]
}

fn compute_assigns_and_learns() -> bool {
    let ar = arch();
    let st = run_trace(&ar, &[has_x(7), compute_y()]);
    let want = Value::App("F".into(), vec![Value::Token(7)]);
    var(&st, &a(), "y") == [Some(want)] && live(&st, &a()).knows.contains(&claim())
}

fn compute_without_history_errors() -> bool {
    let ar = arch();
    let st = run_trace(&ar, &[has_k(), has_x(1), Event::Session, has_x(2), compute_z()]);
    st.component(&a()) == Some(&ComponentState::Error) && st.live(&b()).is_some()
}

fn windowed_compute_uses_last_values() -> bool {
    let ar = arch();
    let trace = [
        has_k(),
        has_x(1),
        Event::Session,
        has_x(2),
        Event::Session,
        Event::Session,
        has_x(3),
        compute_z(),
    ];
    let st = run_trace(&ar, &trace);
    let window = Value::Window(vec![Value::Token(1), Value::Token(2), Value::Token(3)]);
    let want = Value::App("G".into(), vec![window, Value::Const(ConstId::new("k"))]);
    var(&st, &a(), "z").last() == Some(&Some(want))
}

fn error_absorbs() -> bool {
    let ar = arch();
    let mut st = run_trace(&ar, &[has_x(1), compute_z()]);
    let before = st.component(&a()).cloned();
    for e in [has_x(2), has_k(), compute_y(), Event::Session] {
        st.step(&ar, &e);
    }
    before == Some(ComponentState::Error) && st.component(&a()) == Some(&ComponentState::Error)
}

fn reset_restores_init() -> bool {
    let ar = arch();
    let init = GlobalState::init(&ar);
    let once = run_trace(&ar, &[has_x(1), compute_z(), Event::Session, verify(vec![claim()]), Event::Reset]);
    let twice = run_trace(&ar, &[has_x(1), Event::Reset, Event::Reset]);
    once == init && twice == init
}

fn trusted_attestation_lasts_one_session() -> bool {
    let ar = arch();
    let st = run_trace(&ar, &[verify(vec![claim()])]);
    let learned = live(&st, &b()).knows.contains(&claim());
    let st = run_trace(&ar, &[verify(vec![claim()]), Event::Session]);
    learned && live(&st, &b()).knows.is_empty()
}

fn invalid_statement_errors() -> bool {
    let ar = arch();
    let bogus = Equation::eq(Term::var("z"), Term::var("x"));
    let st = run_trace(&ar, &[verify(vec![bogus])]);
    st.component(&b()) == Some(&ComponentState::Error) && st.live(&a()).is_some()
}

type Law = (&'static str, fn() -> bool);

/// Every law with its outcome.
pub fn run_all() -> Vec<(&'static str, bool)> {
    let cases: [Law; 12] = [
        ("initial state", init_state),
        ("session on the initial state", session_on_init),
        ("list lengths follow the session counter", lengths_follow_sessions),
        ("has replaces the last value", has_replaces_last_value),
        ("constants persist across sessions", constants_persist),
        ("compute assigns and records its equation", compute_assigns_and_learns),
        ("compute without enough history errors", compute_without_history_errors),
        ("windowed compute reads the last values", windowed_compute_uses_last_values),
        ("error absorbs later events", error_absorbs),
        ("reset restores the initial state", reset_restores_init),
        ("trusted attestation lasts one session", trusted_attestation_lasts_one_session),
        ("invalid statement errors", invalid_statement_errors),
    ];
    cases.iter().map(|(n, f)| (*n, f())).collect()
}
