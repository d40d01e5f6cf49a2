import json
import math
import subprocess
import sys

import pytest

from adelic_energy import __version__
from adelic_energy.cli import dumps, main, parse_point
from adelic_energy.heights import AlgebraicOrbit
from adelic_energy.maps import INFINITY

CHEBYSHEV_NORM = math.log((3 + math.sqrt(5)) / 2)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def test_norm_of_chebyshev(capsys):
    code, out = run_json(capsys, "norm", "z^2-2", "--depth", "2", "--samples", "20000", "--period-max", "6")
    assert code == 0
    assert out["command"] == "norm" and out["version"] == __version__
    assert out["map"]["num"] == ["-2", "0", "1"] and out["map"]["den"] == ["1"]
    assert out["enclosure"]["lo"] <= CHEBYSHEV_NORM <= out["enclosure"]["hi"]
    assert [lvl["n"] for lvl in out["levels"]] == [1, 2]
    assert abs(out["small_points"]["estimate"] - CHEBYSHEV_NORM) < 1e-6
    mc = out["monte_carlo"]
    assert abs(mc["estimate"] - CHEBYSHEV_NORM) < 4 * mc["stderr"]
    assert out["config"]["seed"] == "0"


def test_norm_json_is_byte_identical_across_threads(capsys):
    argv = ["norm", "z^2-2", "--depth", "2", "--samples", "4000", "--period-max", "4", "--seed", "17"]
    _, one, _ = run(capsys, *argv, "--threads", "1")
    _, four, _ = run(capsys, *argv, "--threads", "4")
    _, again, _ = run(capsys, *argv, "--threads", "1")
    assert one == four == again
    _, other, _ = run(capsys, *argv[:-1], "18")
    assert json.loads(other)["monte_carlo"] != json.loads(one)["monte_carlo"]


def test_norm_of_rational_map_skips_monte_carlo(capsys):
    code, out = run_json(capsys, "norm", "(z^2+1)/(2z)", "--depth", "1", "--period-max", "3")
    assert code == 0
    assert out["monte_carlo"] is None and "polynomial" in out["monte_carlo_skipped"]


def test_az_pairing(capsys):
    code, out = run_json(capsys, "az", "z^2-2", "z^2", "--period-max", "6")
    assert code == 0
    assert out["envelope"]["lo"] <= out["estimate"] <= out["envelope"]["hi"]
    assert out["estimate"] == pytest.approx(0.3230659472194505, abs=1e-3)


def test_height_command(capsys):
    code, out = run_json(capsys, "height", "2/3")
    assert code == 0
    assert out["naive"] == pytest.approx(math.log(3))
    assert out["arakelov"] == pytest.approx(0.5 * math.log(13))
    assert all(s >= 0 for s in out["inequality_slacks"].values())
    code, out = run_json(capsys, "height", "2", "--map", "z^2")
    assert code == 0 and json.dumps(out).count("0.693147") >= 1


def test_parse_point():
    assert parse_point("inf") is INFINITY
    assert parse_point("-3/4") == pytest.approx(-0.75)
    orbit = parse_point("z^2 - z - 1")
    assert isinstance(orbit, AlgebraicOrbit) and orbit.N == 2


def test_map_info(capsys):
    code, out = run_json(capsys, "map-info", "z^2/2")
    assert code == 0
    assert out["reduction_datum"] == "4" and out["bad_primes"] == {"2": 2}
    assert out["arakelov_height"] == pytest.approx(0.5 * math.log(5))


def test_input_file(capsys, tmp_path):
    path = tmp_path / "maps.json"
    path.write_text(json.dumps({"maps": [{"num": [-2, 0, 1]}]}))
    code, from_file = run_json(capsys, "map-info", "--in", str(path))
    _, from_arg = run_json(capsys, "map-info", "z^2 - 2")
    assert code == 0 and from_file == from_arg


@pytest.mark.parametrize(
    "argv, code, error",
    [
        (["norm", "z^^2"], 2, "parse-error"),
        (["norm", "z^2 - z^2"], 2, "degenerate-map"),
        (["norm"], 2, "usage-error"),
        (["az", "z^2"], 2, "usage-error"),
        (["map-info", "--in", "/nonexistent/file.json"], 2, "usage-error"),
    ],
)
def test_error_exit_codes(capsys, argv, code, error):
    got, out = run_json(capsys, *argv)
    assert got == code and out["error"] == error and "message" in out


def test_parse_error_reports_offset(capsys):
    _, out = run_json(capsys, "map-info", "(z + 1")
    assert out["offset"] == 6


def test_argparse_usage_errors(capsys):
    assert main(["bogus"]) == 2
    assert main(["norm", "z^2", "--depth", "0"]) == 2
    assert main(["norm", "z^2", "--seed", str(2**64)]) == 2
    capsys.readouterr()


def test_quad_selftest(capsys):
    code, out = run_json(capsys, "quad-selftest")
    assert code == 0
    assert {c["criterion"] for c in out["checks"]} == {"1", "2", "3"}
    assert all(c["status"] == "pass" for c in out["checks"])


def test_verify_subset_text_table(capsys):
    code, out, _ = run(capsys, "verify", "--criteria", "3,10", "--format", "text")
    assert code == 0
    assert "criterion" in out.splitlines()[0] and "0 fail" in out


def test_verify_known_false_rows_do_not_fail(capsys):
    code, out = run_json(capsys, "verify", "--criteria", "12")
    statuses = [c["status"] for c in out["checks"]]
    assert "xfail" in statuses and "fail" not in statuses
    assert code == 0


def test_big_integers_are_strings():
    assert json.loads(dumps({"x": 2**60, "y": 3}))["x"] == str(2**60)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "adelic_energy", "map-info", "z^2 - 2"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["reduction_datum"] == "1"
