import io
import json

import pandas as pd
import pytest

from main import run
from tests.conftest import CONSTRAINTS_FILE, REFERENCE_COIL_FILE, REFERENCE_SQUARE_FILE


def _csv(text):
    return pd.read_csv(io.StringIO(text), float_precision="round_trip")


def test_center(capsys):
    assert run(["center", "--coil", REFERENCE_COIL_FILE, "--current", "175mA"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "H_center ≈ 1.39e4 A/m"


def test_center_square_is_flagged(capsys):
    assert run(["center", "--coil", REFERENCE_SQUARE_FILE, "--current", "1A", "--format", "json"]) == 0
    document = json.loads(capsys.readouterr().out)
    assert "extension" in document["metadata"]["model"]


def test_axis_csv(capsys):
    argv = ["axis", "--coil", REFERENCE_COIL_FILE, "--current", "300mA", "--from", "0", "--to", "1mm",
            "--samples", "101", "--format", "csv"]
    assert run(argv) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "d_m,x_m,H_A_per_m"
    frame = _csv(out)
    assert len(frame) == 101
    assert frame["H_A_per_m"].is_monotonic_decreasing
    assert frame["H_A_per_m"].is_unique


def test_axis_both_shapes(capsys):
    argv = ["axis", "--coil", REFERENCE_COIL_FILE, "--current", "1A", "--to", "20um", "--samples", "11",
            "--both-shapes", "--format", "csv"]
    assert run(argv) == 0
    frame = _csv(capsys.readouterr().out)
    assert frame.columns.tolist() == ["d_m", "H_round_A_per_m", "H_square_A_per_m", "round_over_square"]
    assert frame["round_over_square"].between(1.05, 1.15).all()


def test_lateral_two_distances(capsys):
    argv = ["lateral", "--coil", REFERENCE_COIL_FILE, "--current", "300mA", "--distance", "2mm",
            "--distance", "3mm", "--from=-1mm", "--to", "1mm", "--samples", "21", "--format", "csv"]
    assert run(argv) == 0
    frame = _csv(capsys.readouterr().out)
    assert len(frame) == 42
    assert frame.groupby("d_m")["H_norm"].max().tolist() == pytest.approx([1.0, 1.0])


def test_lateral_zero_current(capsys):
    argv = ["lateral", "--coil", REFERENCE_COIL_FILE, "--current", "0A", "--distance", "2mm",
            "--from=-1mm", "--to", "1mm", "--samples", "5", "--format", "csv"]
    assert run(argv) == 0
    frame = _csv(capsys.readouterr().out)
    assert (frame["H_A_per_m"] == 0.0).all()
    assert frame["H_norm"].isna().all()


def test_lateral_reports_uniformity_at_half_millimeter(capsys):
    argv = ["lateral", "--coil", REFERENCE_COIL_FILE, "--current", "300mA", "--distance", "2mm",
            "--from=-1mm", "--to", "1mm", "--samples", "41", "--format", "json"]
    assert run(argv) == 0
    document = json.loads(capsys.readouterr().out)
    (note,) = document["metadata"]["notes@d=0.002"]
    assert "x=500um" in note
    assert "outside the 10% uniformity target" in note


def test_sensor_average(capsys):
    argv = ["sensor-avg", "--coil", REFERENCE_COIL_FILE, "--current", "300mA", "--distance", "2mm",
            "--format", "json"]
    assert run(argv) == 0
    document = json.loads(capsys.readouterr().out)
    row = document["rows"][0]
    assert row["H_avg_A_per_m"] < row["H_axis_A_per_m"]
    assert document["metadata"]["window_length_m"] == pytest.approx(2e-3)


def test_sweep_csv_and_json_agree(capsys):
    argv = ["sweep-turns", "--normalize"]
    assert run(argv + ["--format", "csv"]) == 0
    csv_frame = _csv(capsys.readouterr().out)
    assert run(argv + ["--format", "json"]) == 0
    document = json.loads(capsys.readouterr().out)

    assert csv_frame["N"].tolist() == list(range(5, 41, 5))
    assert document["metadata"]["H_center_per_A_vs_N_r_squared"] > 0.999
    for csv_row, json_row in zip(csv_frame.to_dict(orient="records"), document["rows"]):
        for column in ("memf_A_per_m", "P_W", "ratio_A_per_m_per_W", "memf_A_per_m_norm"):
            assert csv_row[column] == json_row[column]


def test_drive_all_substrates(capsys):
    assert run(["drive", "--coil", REFERENCE_COIL_FILE, "--substrate", "all", "--format", "csv"]) == 0
    frame = _csv(capsys.readouterr().out)
    assert frame["substrate"].tolist() == ["kapton", "silicon_on_wafer", "silicon_to220_glued"]
    to220 = frame.set_index("substrate").loc["silicon_to220_glued"]
    assert to220["I_max_mA"] == pytest.approx(175.0)
    assert to220["P_W"] == pytest.approx(0.76, rel=0.1)


def test_scenario_table(capsys):
    assert run(["scenario-table", "--coil", REFERENCE_COIL_FILE]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert sum(1 for line in lines if line[:2] in ("S1", "S2", "K1", "K2", "K3", "K4")) == 6


def test_scenario_table_json_keeps_drive_note(capsys):
    assert run(["scenario-table", "--coil", REFERENCE_COIL_FILE, "--format", "json"]) == 0
    document = json.loads(capsys.readouterr().out)
    (note,) = document["metadata"]["notes"]
    assert "300 mA" in note
    assert "175 mA" in note
    assert [row["scenario"] for row in document["rows"]] == ["S1", "S2", "K1", "K2", "K3", "K4"]


def test_sweep_csv_header_order(capsys):
    assert run(["sweep-turns", "--normalize", "--format", "csv"]) == 0
    header = capsys.readouterr().out.splitlines()[0]
    assert header == (
        "N,memf_A_per_m,P_W,ratio_A_per_m_per_W,"
        "memf_A_per_m_norm,P_W_norm,ratio_A_per_m_per_W_norm,"
        "H_center_per_A,w_um,I_max_mA,feasible"
    )


def test_optimize_family(capsys):
    argv = ["optimize", "--family", "--objective", "max_field_per_ampere", "--turns", "5,10,20,40",
            "--constraints", CONSTRAINTS_FILE, "--format", "csv"]
    assert run(argv) == 0
    frame = _csv(capsys.readouterr().out)
    assert frame.loc[0, "N"] == 40


def test_optimize_grid_needs_widths(capsys):
    assert run(["optimize", "--turns", "10"]) == 2
    assert "--widths" in capsys.readouterr().err


def test_oracle_check_quick(capsys):
    argv = ["oracle-check", "--coil", REFERENCE_COIL_FILE, "--annulus-filaments", "1000", "--format", "csv"]
    assert run(argv) == 0
    frame = _csv(capsys.readouterr().out)
    assert frame["passed"].all()


@pytest.mark.parametrize(
    "argv",
    [
        ["center", "--coil", REFERENCE_COIL_FILE, "--current", "175"],
        ["center", "--coil", REFERENCE_COIL_FILE, "--current", "175um"],
        ["axis", "--coil", REFERENCE_COIL_FILE, "--current", "1A", "--to", "-1mm"],
        ["center", "--coil", REFERENCE_COIL_FILE],
        [],
        ["axis", "--coil", REFERENCE_COIL_FILE, "--current", "1A", "--from", "2mm", "--to", "1mm"],
        ["lateral", "--coil", REFERENCE_COIL_FILE, "--current", "1A", "--distance", "2mm", "--from", "1mm",
         "--to", "1mm"],
        ["sensor-avg", "--coil", REFERENCE_COIL_FILE, "--current", "1A"],
        ["sensor-avg", "--coil", REFERENCE_COIL_FILE, "--current", "1A", "--from", "2mm", "--to", "1mm"],
        ["sweep-turns", "--turns-min", "20", "--turns-max", "10"],
    ],
)
def test_usage_errors(argv):
    assert run(argv) == 2


def test_unknown_command_suggestion(capsys):
    assert run(["centre", "--coil", REFERENCE_COIL_FILE]) == 2
    assert "did you mean 'center'" in capsys.readouterr().err


def test_unknown_flag_suggestion(capsys):
    assert run(["center", "--coil", REFERENCE_COIL_FILE, "--current", "1A", "--formt", "csv"]) == 2
    assert "did you mean '--format'" in capsys.readouterr().err


def test_domain_errors(tmp_path, capsys):
    coil = tmp_path / "coil.json"
    coil.write_text(json.dumps({"shape": "round", "turns": 60, "outer_radius_um": 500, "track_width_um": 5,
                                "track_spacing_um": 5, "track_thickness_um": 10}), encoding="utf-8")
    assert run(["center", "--coil", str(coil), "--current", "1A"]) == 1
    assert run(["center", "--coil", str(tmp_path / "missing.json"), "--current", "1A"]) == 1
    assert run(["drive", "--coil", REFERENCE_SQUARE_FILE]) == 1
    assert "error:" in capsys.readouterr().err


def test_help_exits_cleanly(capsys):
    assert run(["--help"]) == 0
    assert "oracle-check" in capsys.readouterr().out
