use std::ffi::CString;
use std::path::Path;

use chaincongruence::chaincongruence;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn run_python(code: &str) {
    pyo3::append_to_inittab!(chaincongruence);
    Python::initialize();
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/cube.json");
    Python::attach(|py| {
        let globals = PyDict::new(py);
        globals
            .set_item("FIXTURE", fixture.to_str().unwrap())
            .unwrap();
        let code = CString::new(code).unwrap();
        if let Err(e) = py.run(&code, Some(&globals), None) {
            e.print(py);
            panic!("python code failed");
        }
    });
}

#[test]
fn module_round_trip() {
    run_python(
        r#"
import chaincongruence as cc

acc = cc.load_complex(FIXTURE)
assert acc.counts() == (24, 24, 6)
q = cc.chain_congruence(acc)
assert q.counts() == (8, 12, 6)
assert sorted(sorted(e) for e in q.ev)[0] == [0, 1]
assert (q.delta1 @ q.delta0).nnz == 0

aa = cc.chain_congruence(acc, engine="aa", threads=2)
assert aa.delta0 is None and aa.ev == q.ev

report = cc.validate(q, expected_euler=2)
assert report.passed and report.dd_zero and report.euler == 2
assert cc.euler_characteristic([1192, 3182, 2824, 834]) == 0

back = cc.QuotientComplex.from_json(q.to_json())
assert back.to_json() == q.to_json()

g = cc.exploded_grid((2, 2, 2), seed=3, jitter=2e-7)
assert cc.chain_congruence(g).counts() == (27, 54, 36)

w, classes = cc.vertex_congruence([[0, 0, 0], [1, 0, 0], [0, 0, 1e-9]], epsilon=1e-6)
assert classes == [[0, 2], [1]] and len(w) == 2

m = cc.SparseMatrix(2, 3, [(0, 0, 1), (1, 2, -1)])
assert m.transpose().transpose() == m and m.shape == (2, 3)

try:
    cc.chain_congruence(acc, engine="bogus")
except cc.ChainCongruenceError as e:
    assert "PARAMETER" in str(e)
else:
    raise AssertionError("bad engine accepted")
try:
    cc.SparseMatrix(1, 1, [(3, 0, 1)])
except ValueError:
    pass
else:
    raise AssertionError("out of range entry accepted")
"#,
    );
}
