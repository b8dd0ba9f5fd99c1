"""CLI behavior: subcommands, output modes, exit codes, thin-client mode."""

import json

import pytest

from qmahler.cli import main
from qmahler.errors import IndeterminateComparisonError


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_field_info_table(capsys):
    code, out, _ = run_cli(capsys, "field", "info", "-d", "3")
    assert code == 0
    assert "balanced: false" in out
    assert "witness: 1+sqrt(3)" in out
    assert "fundamental unit 2+sqrt(3)" in out


def test_field_info_minus_163(capsys):
    code, out, _ = run_cli(capsys, "field", "info", "-d", "-163")
    assert code == 0
    assert "class_number: 1" in out


def test_tmetric_table(capsys):
    code, out, _ = run_cli(capsys, "tmetric", "-d", "Q", "--alpha", "12", "--t", "inf")
    assert code == 0
    assert "log(3)" in out and "3 * 2 * 2" in out


def test_json_mode_round_trips(capsys):
    code, out, _ = run_cli(
        capsys, "-o", "json", "element", "height", "-d", "Q", "-x", "2/3"
    )
    assert code == 0
    body = json.loads(out)
    assert body["value"]["exact_form"] == "log(3)"


def test_json_and_table_agree(capsys):
    _, table_out, _ = run_cli(capsys, "element", "height", "-d", "Q", "-x", "7/5")
    _, json_out, _ = run_cli(
        capsys, "-o", "json", "element", "height", "-d", "Q", "-x", "7/5"
    )
    body = json.loads(json_out)
    assert body["value"]["exact_form"] in table_out
    assert body["value"]["decimal"] in table_out


def test_ideal_subcommands(capsys):
    code, out, _ = run_cli(capsys, "ideal", "factor", "-d", "-5", "--ideal", "(2)")
    assert code == 0 and "ramified" in out
    code, out, _ = run_cli(
        capsys,
        "ideal",
        "refine",
        "-d",
        "Q",
        "--ideal",
        "(12)",
        "--parts",
        "(6);(6)",
    )
    assert code == 0 and "I_1 = (6)" in out and "I_2 = (2)" in out


def test_replace_subcommand(capsys):
    code, out, _ = run_cli(
        capsys, "replace", "-d", "Q", "--alpha", "2", "--factors", "6,1/3"
    )
    assert code == 0 and "certified: true" in out


def test_power_replace_subcommand(capsys):
    code, out, _ = run_cli(
        capsys,
        "power-replace",
        "-d",
        "-5",
        "--lambda",
        "2",
        "--alpha",
        "2",
        "--factors",
        "1+sqrt(-5),(1-sqrt(-5))/3",
    )
    assert code == 0 and "certified: true" in out


def test_verify_subcommand(capsys):
    code, out, _ = run_cli(capsys, "verify", "--suite", "units")
    assert code == 0 and "PASS" in out


def test_usage_error_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["field", "info"])  # missing -d
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["bogus"])
    assert exc.value.code == 2


def test_domain_error_exit_3(capsys):
    code, _, err = run_cli(capsys, "element", "height", "-d", "Q", "-x", "0")
    assert code == 3 and "error" in err
    code, _, err = run_cli(capsys, "field", "info", "-d", "12")
    assert code == 3 and "squarefree" in err


def test_indeterminate_exit_4(capsys, monkeypatch):
    def boom(req):
        raise IndeterminateComparisonError("forced for the test")

    monkeypatch.setitem(
        __import__("qmahler.cli", fromlist=["_ENDPOINTS"])._ENDPOINTS,
        "field_info",
        ("/field/info", boom, None),
    )
    code, _, err = run_cli(capsys, "field", "info", "-d", "3")
    assert code == 4 and "indeterminate" in err


def test_thin_client_against_live_server(capsys):
    """End-to-end: spawn the service with uvicorn, point the CLI at it."""
    import socket
    import subprocess
    import sys
    import time

    import httpx

    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        port = s.getsockname()[1]
    proc = subprocess.Popen(
        [sys.executable, "-m", "uvicorn", "qmahler.service:app", "--port", str(port)],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
    )
    try:
        base = f"http://127.0.0.1:{port}"
        for _ in range(100):
            try:
                if httpx.get(base + "/health", timeout=1.0).status_code == 200:
                    break
            except httpx.HTTPError:
                time.sleep(0.1)
        else:
            pytest.skip("service did not come up")
        code, out, _ = run_cli(
            capsys,
            "--server",
            base,
            "tmetric",
            "-d",
            "Q",
            "--alpha",
            "12",
            "--t",
            "inf",
        )
        assert code == 0 and "log(3)" in out
        # remote and local runs agree byte for byte in JSON mode
        _, remote, _ = run_cli(
            capsys, "--server", base, "-o", "json", "field", "info", "-d", "2"
        )
        _, local, _ = run_cli(capsys, "-o", "json", "field", "info", "-d", "2")
        assert remote == local
        # domain errors map to exit 3 over HTTP too
        code, _, err = run_cli(
            capsys, "--server", base, "element", "height", "-d", "Q", "-x", "0"
        )
        assert code == 3 and "height of zero" in err
    finally:
        proc.terminate()
        proc.wait(timeout=10)
