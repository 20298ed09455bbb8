import json
import subprocess
import sys


from kpplab import cli


def run(tmp_path, *argv):
    lines = []
    status = cli.run([*argv, "--output-dir", str(tmp_path)], out=lines.append)
    return status, lines


def only_dir(tmp_path, command):
    dirs = sorted(tmp_path.glob(f"{command}-*"))
    return dirs


def test_simulate_is_byte_reproducible(tmp_path):
    for _ in range(2):
        assert run(tmp_path, "simulate", "--seed", "7", "--T", "2")[0] == 0
    a, b = only_dir(tmp_path, "simulate")
    assert (a.name, b.name) == ("simulate-001", "simulate-002")
    assert (a / "snapshots.csv").read_bytes() == (b / "snapshots.csv").read_bytes()
    assert (a / "snapshots.csv").read_text().splitlines()[0] == "replica,t,id,parent_id,x,y,max_drift_excess"


def test_manifest_records_and_reproduces(tmp_path):
    status, _ = run(tmp_path, "martingales", "--seed", "3", "--replicas", "20", "--T", "1",
                    "--checkpoints", "0.5,1", "--alpha", "2", "--lam-mu", "1,0.5", "--svg")
    assert status == 0
    (d,) = only_dir(tmp_path, "martingales")
    man = json.loads((d / "manifest.json").read_text())
    assert man["exit_status"] == 0 and man["command"] == "martingales"
    assert man["config"]["seed"] == 3 and man["config"]["alpha"] == [2.0]
    assert set(man["artifacts"]) == {"series.csv", "summary.csv", "means.svg"}
    assert {"kpplab", "python", "numpy", "scipy", "backend"} <= set(man["versions"])
    assert man["wall_time_s"] >= 0
    # replaying the recorded argv reproduces every artifact
    assert cli.run(man["argv"], out=lambda *_: None) == 0
    (d2,) = [p for p in only_dir(tmp_path, "martingales") if p != d]
    man2 = json.loads((d2 / "manifest.json").read_text())
    assert man2["artifacts"] == man["artifacts"]


def test_speed_guard(tmp_path):
    assert run(tmp_path, "ode-1d", "--c", "1.4142135", "--x-range=-30,20", "--h", "0.02")[0] == 0
    assert run(tmp_path, "pde-wave", "--c", "1.0")[0] == 2


def test_pde_wave_small_domain(tmp_path):
    status, _ = run(tmp_path, "pde-wave", "--c", "1.4142135", "--x-lo", "-6", "--Lx", "14", "--Ly", "10",
                    "--h", "0.2", "--svg")
    assert status == 0
    (d,) = only_dir(tmp_path, "pde-wave")
    side = json.loads((d / "field.json").read_text())
    assert side["x_range"] == [-6.0, 8.0] and side["nx"] == 71 and side["ny"] == 51
    assert (d / "field.svg").read_text().startswith("<svg")


def test_unknown_flag_and_subcommand(tmp_path, capsys):
    assert run(tmp_path, "simulate", "--bogus") != 0
    assert run(tmp_path, "teleport") != 0
    assert "usage" in capsys.readouterr().err


def test_config_file_overrides_flags(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text("seed = 11\n[simulate]\nT = 0.5\n")
    assert run(tmp_path, "simulate", "--seed", "1", "--T", "2", "--config", str(cfg))[0] == 0
    (d,) = only_dir(tmp_path, "simulate")
    man = json.loads((d / "manifest.json").read_text())
    assert man["config"]["seed"] == 11 and man["config"]["T"] == 0.5
    assert man["config_file"] == {"seed": 11, "T": 0.5}
    bad = tmp_path / "bad.toml"
    bad.write_text("warp = 9\n")
    assert run(tmp_path, "simulate", "--config", str(bad))[0] == 2


def test_runs_are_append_only(tmp_path):
    run(tmp_path, "simulate", "--T", "0.5")
    first = only_dir(tmp_path, "simulate")[0]
    before = {p.name: p.read_bytes() for p in first.iterdir()}
    run(tmp_path, "simulate", "--T", "0.5", "--seed", "5")
    assert {p.name: p.read_bytes() for p in first.iterdir()} == before
    assert len(only_dir(tmp_path, "simulate")) == 2


def test_threads_flag(tmp_path, monkeypatch):
    monkeypatch.delenv("KPP_THREADS", raising=False)
    assert run(tmp_path, "simulate", "--T", "0.5", "--threads", "2")[0] == 0
    assert run(tmp_path, "simulate", "--threads", "0")[0] == 2


def test_fit_tail_and_potential_reports(tmp_path):
    assert run(tmp_path, "fit-tail")[0] == 0
    status, lines = run(tmp_path, "potential", "--check", "eta", "--samples", "1000")
    assert status == 0 and any("roundtrip" in s for s in lines)
    (d,) = only_dir(tmp_path, "potential")
    assert (d / "report.csv").read_text().startswith("check,param,y,value,tolerance,pass\n")


def test_verify_coupled(tmp_path):
    status, _ = run(tmp_path, "verify", "--check", "coupled-w", "--T", "3", "--replicas", "500")
    assert status == 0


def test_mc_wave_probe_csv(tmp_path):
    status, _ = run(tmp_path, "mc-wave", "--x", "0,1", "--y", "1", "--T", "3", "--replicas", "200")
    assert status == 0
    (d,) = only_dir(tmp_path, "mc-wave")
    rows = (d / "probe.csv").read_text().splitlines()
    assert rows[0] == "x,y,estimate,std_error,replicas,T,alpha" and len(rows) == 3
    assert run(tmp_path, "mc-wave", "--lam", "1", "--mu", "1.2", "--replicas", "200")[0] == 2


def test_accept_subset(tmp_path):
    status, lines = run(tmp_path, "accept", "--quick", "--criteria", "4,11")
    assert status == 0
    assert any("2/2 passed" in s for s in lines)
    (d,) = only_dir(tmp_path, "accept")
    assert (d / "acceptance.csv").read_text().startswith("criterion,name,pass,seconds,details\n")


def test_console_entry_point(tmp_path):
    p = subprocess.run([sys.executable, "-m", "kpplab.cli", "--version"], capture_output=True, text=True)
    assert p.returncode == 0 and "kpplab" in p.stdout
