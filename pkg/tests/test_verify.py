import io

from heavytails.verify import CHECKS, run_all


def test_all_invariants_pass():
    buf = io.StringIO()
    assert run_all(seed=1, out=buf)
    lines = buf.getvalue().splitlines()
    assert len(lines) == len(CHECKS)
    for line in lines:
        ident, status, measured, bound = line.split("\t")
        assert status == "PASS" and ident and bound


def test_crash_is_reported_as_failure(monkeypatch):
    import heavytails.verify as v

    def boom(rng):
        raise RuntimeError("broken")

    monkeypatch.setattr(v, "CHECKS", [boom])
    buf = io.StringIO()
    assert not v.run_all(out=buf)
    assert "FAIL" in buf.getvalue() and "broken" in buf.getvalue()
