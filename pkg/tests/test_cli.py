"""CLI determinism, exit codes, and the pinned CSV shapes."""

import math

import numpy as np
import pytest

from catpump import cli


def write_config(tmp_path, kind, body, name="run.ini"):
    path = tmp_path / name
    path.write_text(f"[{kind}]\n{body}\n")
    return str(path)


def read_rows(path):
    header, columns, rows = None, None, []
    trailer = []
    for line in open(path):
        line = line.rstrip("\n")
        if line.startswith("#"):
            (trailer if columns else [header]).append(line)
            if header is None:
                header = line
            continue
        if columns is None:
            columns = line.split(",")
        else:
            rows.append(line.split(","))
    return header, columns, rows, trailer


PHI_BODY = "phi_inv = 2,4\nsignal_dim = 24\npump_dim = 12\nn_cycles = 6"


def test_identical_config_gives_identical_bytes(tmp_path):
    cfg = write_config(tmp_path, "phi-sweep", PHI_BODY)
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(["phi-sweep", "--config", cfg, "--out", str(out1)]) == 0
    assert cli.main(["phi-sweep", "--config", cfg, "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_worker_count_does_not_change_bytes(tmp_path):
    cfg = write_config(tmp_path, "phi-sweep", PHI_BODY)
    serial, pooled = tmp_path / "serial.csv", tmp_path / "pooled.csv"
    assert cli.main(["phi-sweep", "--config", cfg, "--out", str(serial)]) == 0
    assert cli.main(
        ["phi-sweep", "--config", cfg, "--out", str(pooled), "--workers", "2"]
    ) == 0
    assert serial.read_bytes() == pooled.read_bytes()


def test_phi_sweep_header_columns_and_order(tmp_path):
    cfg = write_config(tmp_path, "phi-sweep", PHI_BODY)
    out = tmp_path / "sweep.csv"
    assert cli.main(["phi-sweep", "--config", cfg, "--out", str(out)]) == 0
    header, columns, rows, _ = read_rows(out)
    assert header.startswith("# catpump-config-v1 experiment=phi-sweep")
    assert "signal_dim=24" in header and "phi_inv=2,4" in header
    assert columns == list(cli.COLUMNS["phi-sweep"])
    assert [r[0] for r in rows] == ["2", "4"]
    assert all(float(r[1]) > 0.4 for r in rows)
    assert rows[0][5] == "24" and rows[0][6] == "12"


def test_config_errors_exit_2(tmp_path, capsys):
    missing = str(tmp_path / "nope.ini")
    assert cli.main(["phi-sweep", "--config", missing]) == 2
    no_section = write_config(tmp_path, "trajectory", "mode = synchronous", "a.ini")
    assert cli.main(["phi-sweep", "--config", no_section]) == 2
    bad_key = write_config(tmp_path, "phi-sweep", PHI_BODY + "\nbogus = 1", "b.ini")
    assert cli.main(["phi-sweep", "--config", bad_key]) == 2
    assert "bogus" in capsys.readouterr().err
    empty_grid = write_config(tmp_path, "phi-sweep", "phi_inv =", "c.ini")
    assert cli.main(["phi-sweep", "--config", empty_grid]) == 2
    small_pump = write_config(
        tmp_path, "phi-sweep", "phi_inv = 0.5\npump_dim = 12", "d.ini"
    )
    assert cli.main(["phi-sweep", "--config", small_pump]) == 2


def test_numerical_failure_exits_3(tmp_path, capsys):
    cfg = write_config(
        tmp_path,
        "wigner",
        "phi_inv = 2\nsnapshots = 0.5\nsignal_dim = 16\npump_dim = 8\nextent = 5.0",
    )
    assert cli.main(["wigner", "--config", cfg, "--out", str(tmp_path / "w.csv")]) == 3
    assert "TruncationError" in capsys.readouterr().err


def test_unknown_subcommand_exits_2(tmp_path):
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate", "--config", "x.ini"])
    assert exc.value.code == 2


def test_trajectory_synchronous_rows(tmp_path):
    cfg = write_config(
        tmp_path, "trajectory", "mode = synchronous\nphi_inv = 2\nn_cycles = 2"
    )
    out = tmp_path / "traj.csv"
    assert cli.main(["trajectory", "--config", cfg, "--out", str(out)]) == 0
    _, columns, rows, _ = read_rows(out)
    assert columns == list(cli.COLUMNS["trajectory"])
    assert len(rows) == 2
    assert float(rows[0][0]) == pytest.approx(0.5)
    # one lossless cycle at phase 1/2: best in-range cat sits at the search
    # floor with this fidelity
    assert float(rows[0][1]) == pytest.approx(0.8944284804, abs=1e-5)
    assert float(rows[0][2]) == pytest.approx(1.2, abs=1e-6)


def test_trajectory_adiabatic_from_pump(tmp_path):
    body = (
        "mode = adiabatic\nomega_p = 4\ng_nl = 1\ngamma_p = 10\n"
        "t_final = 1.0\nn_samples = 3\nsignal_dim = 24"
    )
    cfg = write_config(tmp_path, "trajectory", body)
    out = tmp_path / "adia.csv"
    assert cli.main(["trajectory", "--config", cfg, "--out", str(out)]) == 0
    header, columns, rows, _ = read_rows(out)
    assert "two_photon_pump=0.8" in header and "two_photon_loss=0.4" in header
    assert len(rows) == 3
    assert float(rows[0][0]) == 0.0
    for row in rows:
        assert float(row[3]) == pytest.approx(1.0, abs=1e-6)  # parity stays even
    assert float(rows[-1][1]) > float(rows[0][1])  # fidelity grows from vacuum


def test_trajectory_mode_validation(tmp_path):
    cfg = write_config(tmp_path, "trajectory", "mode = sideways")
    assert cli.main(["trajectory", "--config", cfg]) == 2
    both = write_config(
        tmp_path,
        "trajectory",
        "mode = adiabatic\ntwo_photon_pump = 0.2\ntwo_photon_loss = 0.1\nomega_p = 1\ng_nl = 1\ngamma_p = 1",
        "both.ini",
    )
    assert cli.main(["trajectory", "--config", both]) == 2


def test_degenerate_loss_sweep_matches_phi_sweep(tmp_path):
    phi_cfg = write_config(tmp_path, "phi-sweep", PHI_BODY, "phi.ini")
    loss_cfg = write_config(
        tmp_path,
        "loss-sweep",
        PHI_BODY + "\ngamma_s_signal = 0\ngamma_s_pump = 0",
        "loss.ini",
    )
    phi_out, loss_out = tmp_path / "phi.csv", tmp_path / "loss.csv"
    assert cli.main(["phi-sweep", "--config", phi_cfg, "--out", str(phi_out)]) == 0
    assert cli.main(["loss-sweep", "--config", loss_cfg, "--out", str(loss_out)]) == 0
    _, _, phi_rows, _ = read_rows(phi_out)
    _, columns, loss_rows, _ = read_rows(loss_out)
    assert columns == list(cli.COLUMNS["loss-sweep"])
    assert len(loss_rows) == len(phi_rows)
    for pr, lr in zip(phi_rows, loss_rows):
        assert lr[0] == pr[0]
        assert lr[1] == "0" and lr[2] == "0"
        assert lr[3] == pr[1]  # identical f_max bytes
        assert lr[4] == pr[2]


def test_lossy_sweep_runs_and_orders_rows(tmp_path):
    body = (
        "phi_inv = 2\ngamma_s_signal = 0.1\ngamma_s_pump = 0,0.2\n"
        "signal_dim = 16\npump_dim = 8\nn_cycles = 3"
    )
    cfg = write_config(tmp_path, "loss-sweep", body)
    out = tmp_path / "lossy.csv"
    assert cli.main(["loss-sweep", "--config", cfg, "--out", str(out)]) == 0
    _, _, rows, _ = read_rows(out)
    assert [r[2] for r in rows] == ["0", "0.2"]
    assert all(0.0 < float(r[3]) <= 1.0 for r in rows)


def test_wigner_snapshot_alignment_and_horizon(tmp_path):
    misaligned = write_config(tmp_path, "wigner", "phi_inv = 2\nsnapshots = 0.3")
    assert cli.main(["wigner", "--config", misaligned]) == 2
    beyond = write_config(
        tmp_path, "wigner", "phi_inv = 2\nsnapshots = 99", "far.ini"
    )
    assert cli.main(["wigner", "--config", beyond]) == 2


def test_wigner_snapshot_normalization_and_negativity(tmp_path):
    body = (
        "phi_inv = 2\nsnapshots = 0.5\nsignal_dim = 90\npump_dim = 12\n"
        "extent = 4.5\nn_points = 41"
    )
    cfg = write_config(tmp_path, "wigner", body)
    out = tmp_path / "wig.csv"
    assert cli.main(["wigner", "--config", cfg, "--out", str(out)]) == 0
    _, columns, rows, _ = read_rows(out)
    assert columns == list(cli.COLUMNS["wigner"])
    assert len(rows) == 41 * 41
    values = np.array([float(r[3]) for r in rows])
    xs = sorted({float(r[1]) for r in rows})
    step = xs[1] - xs[0]
    assert values.sum() * step * step == pytest.approx(1.0, abs=1e-3)
    # the one-cycle state is only mildly cat-like; its fringes dip a little
    # below zero, well clear of the ~1e-6 truncation noise floor
    assert values.min() < -1e-3
    assert np.abs(values).max() <= 2.0 / math.pi + 1e-6


def test_effective_loss_table(tmp_path):
    body = "g_loss_hz = 1e7\ngamma_re_hz = 1e7\ndelta_hz = -3e7,0,3e7"
    cfg = write_config(tmp_path, "effective-loss", body)
    out = tmp_path / "eff.csv"
    assert cli.main(["effective-loss", "--config", cfg, "--out", str(out)]) == 0
    header, columns, rows, _ = read_rows(out)
    assert columns == list(cli.COLUMNS["effective-loss"])
    assert "g_nl_hz=100000" in header
    by_delta = {r[2]: r for r in rows}
    on_res = by_delta["0"]
    assert float(on_res[3]) == pytest.approx(1e7, rel=1e-12)  # g^2 / gamma_re
    assert on_res[4] == "0"
    minus, plus = by_delta["-30000000"], by_delta["30000000"]
    assert minus[3] == plus[3]
    assert float(minus[4]) == pytest.approx(-float(plus[4]), rel=1e-12)
    assert float(plus[5]) == pytest.approx(float(plus[3]) / 1e5, rel=1e-12)


def test_convergence_flag_appends_trailer(tmp_path):
    body = "g_loss_hz = 1e7\ngamma_re_hz = 1e7\ndelta_hz = 1e9"
    cfg = write_config(tmp_path, "effective-loss", body)
    out = tmp_path / "conv.csv"
    assert cli.main(
        ["effective-loss", "--config", cfg, "--out", str(out), "--convergence"]
    ) == 0
    _, _, _, trailer = read_rows(out)
    assert any(
        t.startswith("# convergence_check signal_dim=60 pump_dim=30") for t in trailer
    )
    assert any("max_abs_deviation=0" in t for t in trailer)


def test_default_output_path(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    body = "g_loss_hz = 1e7\ngamma_re_hz = 1e7\ndelta_hz = 0"
    cfg = write_config(tmp_path, "effective-loss", body)
    assert cli.main(["effective-loss", "--config", cfg]) == 0
    assert (tmp_path / "effective-loss.csv").is_file()
