import math
from pathlib import Path

import pytest

from fockbench.bench import figure1_text
from fockbench.cli import main, sparkline

DATA = Path(__file__).parent / "data"


def run_cli(*argv):
    return main(list(argv))


class TestRun:
    def test_golden_csv(self, tmp_path):
        # frozen once from the verified engine; byte-exact thereafter
        code = run_cli("run", "--mode", "active", "--trials", "1000",
                       "--phi-steps", "25", "--seed", "7", "--out", str(tmp_path))
        assert code == 0
        got = (tmp_path / "fringe.csv").read_bytes()
        assert got == (DATA / "golden_run.csv").read_bytes()

    def test_writes_manifest(self, tmp_path):
        run_cli("run", "--trials", "50", "--phi-steps", "5", "--out", str(tmp_path))
        manifest = (tmp_path / "manifest.txt").read_text()
        assert "seed=0" in manifest
        assert "mode=passive" in manifest
        assert "trials=50" in manifest

    def test_manifest_rerun_is_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        run_cli("run", "--mode", "active", "--trials", "200", "--phi-steps", "7",
                "--seed", "3", "--qe", "0.6", "--out", str(a))
        run_cli("run", "--manifest", str(a / "manifest.txt"), "--out", str(b))
        assert (a / "fringe.csv").read_bytes() == (b / "fringe.csv").read_bytes()

    def test_workers_do_not_change_output(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        run_cli("run", "--trials", "300", "--phi-steps", "5", "--seed", "9",
                "--workers", "1", "--out", str(a))
        run_cli("run", "--trials", "300", "--phi-steps", "5", "--seed", "9",
                "--workers", "4", "--out", str(b))
        assert (a / "fringe.csv").read_bytes() == (b / "fringe.csv").read_bytes()

    def test_missing_bench_exits_3(self, tmp_path):
        code = run_cli("run", "--bench", str(tmp_path / "missing.bench"),
                       "--out", str(tmp_path))
        assert code == 3

    def test_bad_bench_exits_3(self, tmp_path):
        bad = tmp_path / "bad.bench"
        bad.write_text("path a\nbs a zz theta=0.5\n")
        code = run_cli("run", "--bench", str(bad), "--out", str(tmp_path))
        assert code == 3

    def test_bogus_mode_exits_2(self, tmp_path):
        with pytest.raises(SystemExit) as err:
            run_cli("run", "--mode", "bogus", "--out", str(tmp_path))
        assert err.value.code == 2

    def test_unknown_flag_exits_2(self, tmp_path):
        with pytest.raises(SystemExit) as err:
            run_cli("run", "--frobnicate", "--out", str(tmp_path))
        assert err.value.code == 2

    def test_event_log_export(self, tmp_path):
        run_cli("run", "--mode", "active", "--trials", "20", "--phi-steps", "4",
                "--log-events", "--out", str(tmp_path))
        events = (tmp_path / "events.csv").read_text()
        assert events.startswith("timestamp_ns,event,detail")
        assert "PhotonEmitted" in events

    def test_delay_override_defeats_the_correction(self, tmp_path):
        from fockbench.protocol import FringeData

        # 1 m of line is 3 ns of grace against a 22 ns risetime: every D2
        # trigger misses, so at phi=0 nothing lands on D2-D2*
        run_cli("run", "--mode", "active", "--trials", "3000", "--phi-steps", "5",
                "--seed", "8", "--delay-m", "1.0", "--out", str(tmp_path / "short"))
        run_cli("run", "--mode", "active", "--trials", "3000", "--phi-steps", "5",
                "--seed", "8", "--out", str(tmp_path / "long"))
        short = FringeData.from_csv((tmp_path / "short" / "fringe.csv").read_text())
        long = FringeData.from_csv((tmp_path / "long" / "fringe.csv").read_text())
        assert short.counts["D2-D2*"][0] == 0
        assert long.counts["D2-D2*"][0] > 0

    def test_input_theta_flag_sets_fringe_contrast(self, tmp_path):
        import math

        import numpy as np

        from fockbench.analysis import fit_fringe
        from fockbench.protocol import FringeData

        # a lopsided qubit interferes with contrast sin(2 theta)
        run_cli("run", "--trials", "20000", "--phi-steps", "13", "--seed", "2",
                "--input-theta", "1.4", "--out", str(tmp_path))
        data = FringeData.from_csv((tmp_path / "fringe.csv").read_text())
        fit = fit_fringe(np.array(data.phi_grid), data.counts["D1-D2*"])
        assert fit.visibility == pytest.approx(math.sin(2.8), abs=0.03)


class TestAnalyze:
    def test_reports_all_pairs(self, tmp_path, capsys):
        run_cli("run", "--trials", "2000", "--phi-steps", "9", "--seed", "1",
                "--out", str(tmp_path))
        capsys.readouterr()
        code = run_cli("analyze", str(tmp_path / "fringe.csv"))
        out = capsys.readouterr().out
        assert code == 0
        for pair in ("D1-D1s", "D1-D2s", "D2-D1s", "D2-D2s"):
            assert f"{pair}.visibility=" in out
            assert f"{pair}.fidelity=" in out
            assert f"{pair}.beats_classical_bound=" in out

    def test_noiseless_run_beats_bound(self, tmp_path, capsys):
        run_cli("run", "--trials", "5000", "--phi-steps", "9", "--seed", "2",
                "--out", str(tmp_path))
        capsys.readouterr()
        run_cli("analyze", str(tmp_path / "fringe.csv"))
        out = capsys.readouterr().out
        assert "D1-D2s.beats_classical_bound=true" in out


class TestCompare:
    def test_self_compare_is_exactly_zero(self, tmp_path, capsys):
        run_cli("run", "--trials", "1000", "--phi-steps", "9", "--seed", "4",
                "--out", str(tmp_path))
        capsys.readouterr()
        csv = str(tmp_path / "fringe.csv")
        code = run_cli("compare", csv, csv)
        out = capsys.readouterr().out
        assert code == 0
        assert "delta_phi0=0.000000" in out
        assert "delta_visibility=0.000000" in out
        assert "pi_offset=false" in out

    def test_grid_mismatch_exits_3(self, tmp_path, capsys):
        run_cli("run", "--trials", "100", "--phi-steps", "5", "--out",
                str(tmp_path / "a"))
        run_cli("run", "--trials", "100", "--phi-steps", "7", "--out",
                str(tmp_path / "b"))
        capsys.readouterr()
        code = run_cli("compare", str(tmp_path / "a" / "fringe.csv"),
                       str(tmp_path / "b" / "fringe.csv"))
        assert code == 3

    def test_inhibited_vs_passive_shows_pi(self, tmp_path, capsys):
        run_cli("run", "--mode", "passive", "--trials", "4000", "--phi-steps", "13",
                "--seed", "5", "--out", str(tmp_path / "p"))
        run_cli("run", "--mode", "active-inhibited", "--trials", "4000",
                "--phi-steps", "13", "--seed", "6", "--out", str(tmp_path / "i"))
        capsys.readouterr()
        code = run_cli("compare", str(tmp_path / "i" / "fringe.csv"),
                       str(tmp_path / "p" / "fringe.csv"),
                       "--pair-a", "D2-D2*", "--pair-b", "D1-D2*")
        out = capsys.readouterr().out
        assert code == 0
        assert "pi_offset=true" in out


class TestValidateBench:
    def test_figure1_ok(self, tmp_path, capsys):
        f = tmp_path / "fig1.bench"
        f.write_text(figure1_text())
        assert run_cli("validate-bench", str(f)) == 0
        assert "ok:" in capsys.readouterr().out

    def test_bad_bench_lists_diagnostics(self, tmp_path, capsys):
        f = tmp_path / "bad.bench"
        f.write_text("path a\nsource photon a V\nbs a zz theta=0.5\n")
        assert run_cli("validate-bench", str(f)) == 3
        out = capsys.readouterr().out
        assert "undeclared-path" in out

    def test_missing_file(self, tmp_path):
        assert run_cli("validate-bench", str(tmp_path / "nope.bench")) == 3


class TestReproducePaper:
    def test_smoke_noiseless(self, tmp_path, capsys):
        code = run_cli("reproduce-paper", "--trials", "1500", "--phi-steps", "9",
                       "--passive-sigma", "0", "--dephasing-sigma", "0",
                       "--out", str(tmp_path))
        out = capsys.readouterr().out
        assert code == 0
        assert "F_passive=" in out and "F_active=" in out
        f_passive = float(out.split("F_passive=")[1].splitlines()[0])
        f_active = float(out.split("F_active=")[1].splitlines()[0])
        assert f_passive == pytest.approx(1.0, abs=0.02)
        assert f_active == pytest.approx(1.0, abs=0.02)
        assert (tmp_path / "passive.csv").exists()
        assert (tmp_path / "active.csv").exists()


class TestSparkline:
    def test_shape(self):
        line = sparkline([0, 1, 2, 3, 4])
        assert len(line) == 5
        assert line[0] == " " and line[-1] == "█"

    def test_all_zero(self):
        assert sparkline([0, 0, 0]) == "   "
