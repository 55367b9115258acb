import subprocess
import sys

import pytest

from sdmasim.cli import CSV_HEADER, main



def test_fig5_grid(tmp_path):
    out = tmp_path / "fig5.csv"
    assert main(["--scenario", "fig5", "--topologies", "2", "--seed", "7", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    rows = [ln.split(",") for ln in lines[1:]]
    assert len(rows) == 4 * 8
    assert {r[0] for r in rows} == {"baseline", "enhanced", "enhanced-ummse", "nonconcurrent"}
    assert [(r[0], int(r[1])) for r in rows] == sorted((r[0], int(r[1])) for r in rows)
    assert all(r[4] == "2" for r in rows)
    for r in rows:
        float(r[2]), float(r[3])


def test_rerun_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for f in (a, b):
        assert main(["--scenario", "fig1", "--seed", "7", "--topologies", "2", "--out", str(f)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_seed_changes_output(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["--scenario", "fig3", "--seed", "1", "--topologies", "3", "--out", str(a)])
    main(["--scenario", "fig3", "--seed", "2", "--topologies", "3", "--out", str(b)])
    assert a.read_bytes() != b.read_bytes()


def test_unknown_scenario_exit_2(capsys):
    with pytest.raises(SystemExit) as e:
        main(["--scenario", "nosuch"])
    assert e.value.code == 2
    assert "usage:" in capsys.readouterr().err


def test_custom_requires_config(capsys):
    with pytest.raises(SystemExit) as e:
        main(["--scenario", "custom"])
    assert e.value.code == 2
    assert "--config" in capsys.readouterr().err


def test_unwritable_output_exit_1(tmp_path, capsys):
    assert main(["--scenario", "fig3", "--topologies", "1",
                 "--out", str(tmp_path / "missing" / "x.csv")]) == 1
    assert "cannot write" in capsys.readouterr().err


def test_custom_bad_file_exit_1(tmp_path, capsys):
    f = tmp_path / "s.yaml"
    f.write_text("schemes:\n  - {rx: mmes}\n")
    assert main(["--scenario", "custom", "--config", str(f)]) == 1
    assert "mmes" in capsys.readouterr().err


def test_custom_to_stdout(tmp_path, capsys):
    f = tmp_path / "s.yaml"
    f.write_text("k_values: [1, 2]\ntopologies: 2\nschemes:\n  - {name: b, mcs: 0}\n")
    assert main(["--scenario", "custom", "--config", str(f)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == CSV_HEADER and len(lines) == 3
    assert lines[1].startswith("b,1,")


def test_plot_pair(tmp_path):
    out = tmp_path / "f3.csv"
    assert main(["--scenario", "fig3", "--topologies", "2", "--out", str(out), "--plot"]) == 0
    dat = (tmp_path / "f3.plot.dat").read_text().splitlines()
    assert dat[0].split("\t") == ["k", "beamnull-zf-mcs0", "beamnull-zf-mcs5", "beamnull-zf-adaptive"]
    assert len(dat) == 9
    src = (tmp_path / "f3.plot.py").read_text()
    compile(src, "f3.plot.py", "exec")
    assert "Sum throughput" in src


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "sdmasim", "--scenario", "nosuch"],
                       capture_output=True, text=True)
    assert r.returncode == 2 and "usage:" in r.stderr
