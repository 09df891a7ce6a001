import json
import math

import pytest

from kfree import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_oracle_prints_count(capsys):
    code, out, _ = run(capsys, "oracle", "--n", "1", "--k", "2", "--L", "4")
    assert code == 0 and out.strip() == "15"


def test_holes_scan_reports_48(capsys, tmp_path):
    out_file = tmp_path / "scan.json"
    code, out, _ = run(
        capsys, "holes", "--n", "1", "--k", "2", "--m", "3",
        "--scan", "--limit", "10000", "-o", str(out_file),
    )
    assert code == 0
    assert "48" in out
    doc = json.loads(out_file.read_text())
    assert doc["t"] == ["48"]


def test_holes_certificate_json(capsys, tmp_path):
    out_file = tmp_path / "cert.json"
    code, out, _ = run(capsys, "holes", "--n", "1", "--k", "2", "--m", "3", "-o", str(out_file))
    assert code == 0
    doc = json.loads(out_file.read_text())
    assert doc["schema"] == "kfree.hole-certificate.v1"
    assert int(doc["t"][0]) % 900 == 548


def test_density_csv_last_row(capsys, tmp_path):
    out_file = tmp_path / "density.csv"
    code, _, _ = run(
        capsys, "density", "--n", "1", "--k", "2", "--N-max", "1000000",
        "--steps", "2", "-o", str(out_file),
    )
    assert code == 0
    lines = out_file.read_text().splitlines()
    assert lines[0].startswith("# schema: kfree.frequency.v1")
    last = lines[-1].split(",")
    assert last[0] == "1000000"
    assert abs(float(last[3]) - 6 / math.pi**2) < 2e-3


def test_density_worker_determinism(capsys, tmp_path):
    files = []
    for w in ("1", "4"):
        f = tmp_path / f"density-{w}.csv"
        code, _, _ = run(
            capsys, "density", "--n", "1", "--k", "2", "--N-max", "100000",
            "--steps", "3", "--workers", w, "-o", str(f),
        )
        assert code == 0
        files.append(f.read_text())
    assert files[0] == files[1]


def test_sieve_points_output(capsys, tmp_path):
    out_file = tmp_path / "points.txt"
    code, _, _ = run(
        capsys, "sieve", "--n", "1", "--k", "2", "--N", "10", "-o", str(out_file)
    )
    assert code == 0
    lines = out_file.read_text().splitlines()
    assert lines[0].startswith("# schema: kfree.points.v1")
    assert [int(l) for l in lines[1:]] == [1, 2, 3, 5, 6, 7, 10]


def test_truncated_family_subcommands(capsys, tmp_path):
    pts_file = tmp_path / "trunc.txt"
    code, _, _ = run(
        capsys, "sieve", "--n", "1", "--k", "2", "--N", "8",
        "--family", "truncated", "--P", "2", "-o", str(pts_file),
    )
    assert code == 0
    assert [int(l) for l in pts_file.read_text().splitlines()[1:]] == [1, 2, 3, 5, 6, 7]
    cen_file = tmp_path / "trunc-census.json"
    code, out, _ = run(
        capsys, "patterns", "--n", "1", "--k", "2", "--L", "8", "--N", "10000",
        "--family", "truncated", "--P", "2", "-o", str(cen_file),
    )
    assert code == 0 and json.loads(cen_file.read_text())["count"] == 4
    code, _, err = run(capsys, "sieve", "--n", "1", "--k", "2", "--N", "8",
                       "--family", "truncated")
    assert code == 2  # --P missing


def test_patterns_census_json(capsys, tmp_path):
    out_file = tmp_path / "census.json"
    code, out, _ = run(
        capsys, "patterns", "--n", "1", "--k", "2", "--L", "4",
        "--N", "100000", "-o", str(out_file),
    )
    assert code == 0 and "census count = 15" in out
    doc = json.loads(out_file.read_text())
    assert doc["count"] == 15 and doc["mode"] == "coloured"


def test_patterns_complement_check(capsys, tmp_path):
    out_file = tmp_path / "comp.json"
    code, out, _ = run(
        capsys, "patterns", "--n", "2", "--k", "1", "--L", "3",
        "--N", "100", "--complement-check", "-o", str(out_file),
    )
    assert code == 0
    doc = json.loads(out_file.read_text())
    assert doc["equal"] is True


def test_entropy_csv(capsys, tmp_path):
    out_file = tmp_path / "entropy.csv"
    code, _, _ = run(
        capsys, "entropy", "--n", "1", "--k", "2", "--L-list", "4", "8",
        "--P-U", "50", "--scan-N", "100000", "-o", str(out_file),
    )
    assert code == 0
    lines = out_file.read_text().splitlines()
    assert lines[1] == "L,count,per_site_log2,lower_bits,upper_bits"
    row4 = lines[2].split(",")
    assert row4[0] == "4" and row4[1] == "15"


def test_euclid_density_csv(capsys, tmp_path):
    out_file = tmp_path / "euclid.csv"
    code, _, _ = run(
        capsys, "euclid", "--d", "2", "--window", "0", "1",
        "--mode", "density", "--T", "5000", "-o", str(out_file),
    )
    assert code == 0
    lines = out_file.read_text().splitlines()
    last = lines[-1].split(",")
    assert abs(float(last[3]) - 1 / (2 * math.sqrt(2))) < 1e-2


def test_euclid_exact_window_triple(capsys, tmp_path):
    out_file = tmp_path / "pts.csv"
    code, _, _ = run(
        capsys, "euclid", "--window", "0,0,1", "1,1,2", "--mode", "points",
        "--T", "50", "-o", str(out_file),
    )
    assert code == 0
    assert out_file.read_text().startswith("# schema: kfree.euclid-points.v1")


def test_invalid_usage_exit_2(capsys):
    # unknown subcommand (argparse level)
    with pytest.raises(SystemExit) as exc:
        cli.main(["teleport"])
    assert exc.value.code == 2
    # missing flags and semantic validation (library level)
    code, _, err = run(capsys, "density", "--n", "1", "--k", "2")
    assert code == 2 and "error" in err
    code, _, err = run(capsys, "patterns", "--n", "1", "--k", "2", "--N", "100")
    assert code == 2 and "error" in err
    code, _, err = run(capsys, "sieve", "--n", "1", "--k", "1", "--N", "10")
    assert code == 2  # nk = 1 degenerate


def test_resource_cap_exit_3(capsys):
    code, _, err = run(
        capsys, "density", "--n", "1", "--k", "2", "--N-max", str(2**29), "--steps", "1"
    )
    assert code == 3 and "resource" in err


def test_patterns_worker_determinism(capsys, tmp_path):
    outputs = []
    for w in ("1", "8"):
        f = tmp_path / f"census-{w}.json"
        code, _, _ = run(
            capsys, "patterns", "--n", "1", "--k", "2", "--L", "6",
            "--N", "200000", "--list-patterns", "--workers", w, "-o", str(f),
        )
        assert code == 0
        outputs.append(f.read_text())
    assert outputs[0] == outputs[1]


def test_verify_failure_exit_1(capsys, monkeypatch):
    from kfree import verify as verify_mod

    def doomed(workers):
        return verify_mod.CheckResult("synthetic.always-fails", False, "negative control")

    monkeypatch.setattr(verify_mod, "CHECKS", [doomed])
    code, out, _ = run(capsys, "verify")
    assert code == 1 and "FAIL synthetic.always-fails" in out


def test_config_file_defaults_and_override(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 1, "k": 2, "L": 4}))
    code, out, _ = run(capsys, "--config", str(cfg), "oracle")
    assert code == 0 and out.strip() == "15"
    code, out, _ = run(capsys, "--config", str(cfg), "oracle", "--L", "5")
    assert code == 0 and out.strip() == "29"
