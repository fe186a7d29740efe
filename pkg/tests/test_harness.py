import json
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from twistedcubic import cli, harness
from twistedcubic.cubic import LineClass, expected_class_sizes
from twistedcubic.gf import is_prime, prime_power

PRIME_POWERS = [q for q in range(5, 200) if any(q == p**k for p in range(2, 200) if is_prime(p) for k in range(1, 8))]


def _xi(q):
    return {0: 0, 1: 1, 2: -1}[q % 3]


@given(st.sampled_from(PRIME_POWERS))
def test_predicted_orbits_add_up(q):
    exp = harness.expected_line_orbits(q)
    assert sum(len(v) for v in exp.values()) == 2 * q + 7 + _xi(q)
    assert len(exp[LineClass.EnG]) == harness.expected_external_count(q)
    assert sum(exp[LineClass.EnG]) == (q * q - q) * (q * q - 1)
    for v in exp.values():
        assert all((q**3 - q) % s == 0 for s in v)
    assert {c: sum(v) for c, v in exp.items()} == expected_class_sizes(q)


@given(st.sampled_from([q for q in PRIME_POWERS if q % 2]))
def test_fractional_count_is_integral(q):
    xi = _xi(q)
    n = (2 * q - 6 - Fraction(9, 2) * xi * xi - Fraction(1, 2) * xi) / 3
    assert n.denominator == 1


def test_external_orbits_known_values():
    assert Counter(harness.external_nongamma_orbits(7)) == {84: 1, 168: 6, 336: 2, 28: 1, 112: 2}
    assert Counter(harness.external_nongamma_orbits(9)) == {180: 4, 360: 8, 720: 3}
    assert Counter(harness.external_nongamma_orbits(8)) == {504: 1, 252: 12}


def test_tested_range():
    assert harness.in_tested_range(7, 1) and harness.in_tested_range(64, 1)
    assert not harness.in_tested_range(43, 1) and not harness.in_tested_range(49, 1)


@pytest.mark.parametrize("q,L_sigma,L_EnG", [(7, 22, 12), (8, 22, 13), (9, 25, 15)])
def test_verify_examples(q, L_sigma, L_EnG):
    r = harness.verify(q)
    assert r.passed, r.summary()
    assert (r.L_sigma, r.L_EnG) == (L_sigma, L_EnG)


def test_verify_q9_detail():
    r = harness.verify(9)
    assert r.classes["EA"] == [40, 40, 720]
    assert Counter(r.classes["EnG"]) == {180: 4, 360: 8, 720: 3}


def test_report_is_deterministic():
    assert harness.verify(5).dumps() == harness.verify(5).dumps()
    assert harness.verify(5, threads=2).dumps() == harness.verify(5).dumps()


@pytest.mark.parametrize("q", [5, 7])
def test_choice_of_nonsquare_does_not_change_partitions(q):
    F = harness.field_for(q)
    nonsquares = [x for x in range(1, q) if not F.is_square(x)]
    digests = {json.dumps(harness.verify(q, rho=r).digests, sort_keys=True) for r in nonsquares}
    assert len(nonsquares) > 1 and len(digests) == 1
    assert all(harness.verify(q, rho=r).passed for r in nonsquares)
    with pytest.raises(ValueError):
        harness.verify(q, rho=1)


def test_failed_verdict_is_reported():
    r = harness.OrbitReport(5, -1, "odd", [0, 1])
    v = r.add("demo", [1, 2], [2, 1])
    assert not v.passed and not r.passed
    assert "FAIL demo" in r.summary() and "expected [1, 2]" in r.summary()


@pytest.mark.parametrize("q,xi", [(2, -1), (3, 0), (4, 1)])
def test_small_q(q, xi):
    r = harness.small_q(q)
    assert r.xi == xi and r.passed, r.summary()


def test_small_q_rejects_other_orders():
    with pytest.raises(harness.UnsupportedField):
        harness.small_q(5)


def test_unsupported_fields():
    for q in (1, 6, 12, 128):
        with pytest.raises(harness.UnsupportedField):
            harness.field_for(q)


def test_census_csv():
    text = harness.census_csv(5, harness.census(5))
    rows = [line.split(",") for line in text.strip().splitlines()]
    assert rows[0] == ["q", "class", "count"]
    assert sum(int(r[2]) for r in rows[1:]) == 806 and len(rows) == 10


def test_rep_orbit():
    out = harness.rep_orbit(9, "0:1:0:0;1:0:rho:0")
    assert out["orbit_size"] == 40 and out["class"] == "EA"
    assert harness.rep_orbit(9, "0:1:0:0;1:0:2:0")["orbit_size"] == 40


def test_orbits_cmd():
    parts = harness.orbits_cmd(5, "T", "bfs")
    assert len(parts) == 1 and parts[0].sizes == [6]
    assert len(harness.orbits_cmd(5)) == 9
    with pytest.raises(ValueError):
        harness.orbits_cmd(5, "EA")


# command line


def test_cli_census(capsys):
    assert cli.main(["census", "--q", "5"]) == 0
    assert capsys.readouterr().out.startswith("q,class,count\n5,RC,15\n")


def test_cli_custom_modulus(capsys):
    assert cli.main(["census", "--q", "9", "--poly", "1,0,1"]) == 0
    assert "9,EA,800" in capsys.readouterr().out


def test_cli_orbits(tmp_path, capsys):
    out = tmp_path / "t.json"
    assert cli.main(["orbits", "--q", "5", "--class", "T", "--method", "bfs", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["orbits"][0]["size"] == 6 and doc["class"] == "T"
    assert cli.main(["orbits", "--q", "5", "--dump-members"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["partitions"]) == 9 and "members" in doc["partitions"][0]["orbits"][0]


def test_cli_verify(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert cli.main(["verify", "--q", "7", "--json", str(out), "--threads", "2"]) == 0
    assert json.loads(out.read_text())["L_sigma"] == 22
    assert "PASS" in capsys.readouterr().out


def test_cli_small_q_and_rep_orbit(capsys):
    assert cli.main(["small-q", "--q", "3"]) == 0
    assert cli.main(["rep-orbit", "--q", "5", "--line", "0:0:0:1;1:0:1:0"]) == 0
    assert '"orbit_size": 60' in capsys.readouterr().out


def test_cli_usage_errors(capsys):
    assert cli.main(["verify", "--q", "6"]) == 2
    assert cli.main(["rep-orbit", "--q", "5", "--line", "1:2"]) == 2
    assert cli.main(["census", "--q", "9", "--poly", "1,0,2,1"]) == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["small-q", "--q", "5"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == 2


def test_prime_power_helper():
    assert prime_power(64) == (2, 6) and prime_power(27) == (3, 3)
